//! The obstacle/fragment game, fine connectivity, gap filling and constants.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fragments::{
    concatenate, min_integral_fragment, normalize, pareto_fragments, Fragment, LegKind, SearchOptions,
};
use crate::graph::{dijkstra_with_parents, walk_back};
use crate::poincare::rho_test_function;
use crate::space::{le, lt, tol, Space};

pub const DEFAULT_EXHAUSTION_LIMIT: usize = 22;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConnParams {
    pub c: f64,
    pub delta: f64,
    pub eps: f64,
}

impl ConnParams {
    pub fn new(c: f64, delta: f64, eps: f64) -> Result<ConnParams> {
        if !(c >= 1.0) {
            return Err(invalid("C", format!("must be ≥ 1, got {c}")));
        }
        if !(delta > 0.0) {
            return Err(invalid("delta", format!("must be positive, got {delta}")));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(invalid("eps", format!("must lie in (0, 1), got {eps}")));
        }
        Ok(ConnParams { c, delta, eps })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryMode {
    Exact,
    Greedy,
    RhoGuided,
}

impl std::str::FromStr for AdversaryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(AdversaryMode::Exact),
            "greedy" => Ok(AdversaryMode::Greedy),
            "rho" | "rho-guided" => Ok(AdversaryMode::RhoGuided),
            other => Err(invalid("mode", format!("unknown adversary mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    CertifiedYes,
    Refuted,
    NoCounterexampleFound,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub x: usize,
    pub y: usize,
    pub params: ConnParams,
    pub status: Status,
    pub mode: AdversaryMode,
    pub witness_obstacle: Option<Vec<usize>>,
    pub witness_fragment: Option<Fragment>,
    /// Least undef the fragment side achieves against the strongest obstacle found.
    pub worst_undef: f64,
    /// `δ·d(x,y)`.
    pub threshold: f64,
    pub margin: f64,
    /// Certified with `worst_undef = δ·d(x,y)` up to tolerance.
    pub zero_margin: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WorstObstacle {
    /// Chosen obstacle vertices inside `B(x, Cr)`, ascending.
    pub obstacle: Vec<usize>,
    pub min_undef: f64,
    pub candidates: usize,
    pub evaluations: usize,
    /// False when the search stopped at a caller-supplied target.
    pub exhausted: bool,
}

struct Game<'a> {
    space: &'a Space,
    x: usize,
    y: usize,
    budget_len: f64,
    mass_budget: f64,
    /// Vertices outside `B(x, Cr)`: free for the obstacle.
    base: Vec<bool>,
    candidates: Vec<usize>,
    evaluations: usize,
}

impl<'a> Game<'a> {
    fn new(space: &'a Space, x: usize, y: usize, c: f64, eps: f64) -> Game<'a> {
        let r = space.dist(x, y);
        let budget_len = c * r;
        let ball = space.ball(x, budget_len.max(f64::MIN_POSITIVE)).expect("positive radius");
        let mass_budget = eps * ball.mass;
        let mut inside = vec![false; space.n()];
        for &v in &ball.members {
            inside[v] = true;
        }
        let mut base: Vec<bool> = inside.iter().map(|&b| !b).collect();
        base[x] = false;
        base[y] = false;
        let rx = space.row(x).to_vec();
        let ry = space.row(y).to_vec();
        let mut candidates: Vec<usize> = ball
            .members
            .iter()
            .copied()
            .filter(|&v| v != x && v != y && le(rx[v] + ry[v], budget_len))
            .filter(|&v| lt(space.weight(v), mass_budget))
            .collect();
        // near the geodesic and central first: strong obstacles early tighten the bound
        candidates.sort_by(|&a, &b| {
            (rx[a] + ry[a])
                .total_cmp(&(rx[b] + ry[b]))
                .then((rx[a] - ry[a]).abs().total_cmp(&(rx[b] - ry[b]).abs()))
                .then(space.id(a).cmp(&space.id(b)))
        });
        Game {
            space,
            x,
            y,
            budget_len,
            mass_budget,
            base,
            candidates,
            evaluations: 0,
        }
    }

    fn mask(&self, set: &[usize]) -> Vec<bool> {
        let mut m = self.base.clone();
        for &v in set {
            m[v] = true;
        }
        m
    }

    fn fits(&self, mass: f64) -> bool {
        lt(mass, self.mass_budget)
    }

    fn min_undef(&mut self, set: &[usize]) -> f64 {
        self.evaluations += 1;
        let m = self.mask(set);
        pareto_fragments(self.space, self.x, self.y, &m, self.budget_len, SearchOptions::default())
            .expect("validated inputs")
            .min_undef()
            .unwrap_or(f64::INFINITY)
    }

    fn best_fragment(&self, set: &[usize], cap: f64) -> Option<Fragment> {
        let m = self.mask(set);
        pareto_fragments(self.space, self.x, self.y, &m, self.budget_len, SearchOptions::default())
            .ok()?
            .shortest_with_undef_at_most(cap)
            .map(|e| e.fragment.clone())
    }

    fn min_undef_fragment(&self, set: &[usize]) -> Option<Fragment> {
        let m = self.mask(set);
        pareto_fragments(self.space, self.x, self.y, &m, self.budget_len, SearchOptions::default())
            .ok()?
            .entries
            .last()
            .map(|e| e.fragment.clone())
    }
}

struct Search {
    best: f64,
    best_set: Vec<usize>,
    target: Option<f64>,
    stopped: bool,
}

fn branch(game: &mut Game, search: &mut Search, start: usize, set: &mut Vec<usize>, mass: f64, value: f64) {
    if value > search.best + tol(search.best.min(1e300)) {
        search.best = value;
        search.best_set = set.clone();
    }
    if let Some(t) = search.target {
        if search.best > t {
            search.stopped = true;
        }
    }
    if search.stopped {
        return;
    }
    let rest: Vec<usize> = (start..game.candidates.len())
        .filter(|&j| game.fits(mass + game.space.weight(game.candidates[j])))
        .collect();
    if rest.is_empty() {
        return;
    }
    let mut all = set.clone();
    all.extend(rest.iter().map(|&j| game.candidates[j]));
    // removing obstacle vertices never raises the least undef
    let upper = game.min_undef(&all);
    if upper <= search.best + tol(search.best.min(1e300)) {
        return;
    }
    let total: f64 = mass + rest.iter().map(|&j| game.space.weight(game.candidates[j])).sum::<f64>();
    if game.fits(total) {
        search.best = upper;
        search.best_set = all;
        if let Some(t) = search.target {
            search.stopped = upper > t;
        }
        return;
    }
    for &j in &rest {
        let v = game.candidates[j];
        set.push(v);
        let val = game.min_undef(set);
        branch(game, search, j + 1, set, mass + game.space.weight(v), val);
        set.pop();
        if search.stopped {
            return;
        }
    }
}

/// Obstacle of mass `< ε·μ(B(x,Cr))` maximizing the least undef over
/// fragments of length `≤ C·d(x,y)`, by branch and bound over subsets of the
/// ball. Stops early once the incumbent exceeds `target`.
pub fn worst_obstacle(
    space: &Space,
    x: usize,
    y: usize,
    c: f64,
    eps: f64,
    limit: usize,
    target: Option<f64>,
) -> Result<WorstObstacle> {
    if x >= space.n() || y >= space.n() {
        return Err(invalid("x", "vertex outside the space"));
    }
    if !(c >= 1.0) || !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("C", "need C ≥ 1 and 0 < ε < 1"));
    }
    if x == y {
        return Ok(WorstObstacle {
            obstacle: Vec::new(),
            min_undef: 0.0,
            candidates: 0,
            evaluations: 0,
            exhausted: true,
        });
    }
    let mut game = Game::new(space, x, y, c, eps);
    if game.candidates.len() > limit {
        return Err(Error::ExhaustionLimit {
            candidates: game.candidates.len(),
            limit,
        });
    }
    let empty = game.min_undef(&[]);
    let mut search = Search {
        best: empty,
        best_set: Vec::new(),
        target,
        stopped: false,
    };
    let mut set = Vec::new();
    branch(&mut game, &mut search, 0, &mut set, 0.0, empty);
    let mut obstacle = search.best_set;
    obstacle.sort_unstable();
    Ok(WorstObstacle {
        obstacle,
        min_undef: search.best,
        candidates: game.candidates.len(),
        evaluations: game.evaluations,
        exhausted: !search.stopped,
    })
}

/// Greedy bottleneck packing: repeatedly block the lightest interior vertex
/// of the current least-undef fragment.
fn greedy_obstacle(game: &mut Game) -> (Vec<usize>, f64) {
    let mut set: Vec<usize> = Vec::new();
    let mut mass = 0.0;
    let mut value = game.min_undef(&set);
    loop {
        let Some(frag) = game.min_undef_fragment(&set) else {
            break;
        };
        let pick = frag
            .interior()
            .into_iter()
            .filter(|v| game.candidates.contains(v) && !set.contains(v))
            .filter(|&v| game.fits(mass + game.space.weight(v)))
            .min_by(|&a, &b| {
                game.space
                    .weight(a)
                    .total_cmp(&game.space.weight(b))
                    .then(game.space.id(a).cmp(&game.space.id(b)))
            });
        let Some(v) = pick else {
            break;
        };
        set.push(v);
        mass += game.space.weight(v);
        value = game.min_undef(&set);
    }
    (set, value)
}

/// ρ-guided packing: rank candidates by `ρ_x + ρ_y` (cheap routes first),
/// then add the candidate with the largest undef gain per unit mass among the
/// best-ranked few.
fn rho_obstacle(game: &mut Game, b: f64) -> (Vec<usize>, f64) {
    const LOOKAHEAD: usize = 12;
    let mut set: Vec<usize> = Vec::new();
    let mut mass = 0.0;
    let mut value = game.min_undef(&set);
    loop {
        let rx = rho_test_function(game.space, game.x, &set, b).expect("B ≥ 1").rho;
        let ry = rho_test_function(game.space, game.y, &set, b).expect("B ≥ 1").rho;
        let mut ranked: Vec<usize> = game
            .candidates
            .iter()
            .copied()
            .filter(|v| !set.contains(v) && game.fits(mass + game.space.weight(*v)))
            .collect();
        if ranked.is_empty() {
            break;
        }
        ranked.sort_by(|&a, &c| (rx[a] + ry[a]).total_cmp(&(rx[c] + ry[c])).then(a.cmp(&c)));
        ranked.truncate(LOOKAHEAD);
        let mut best: Option<(f64, usize, f64)> = None;
        for &v in &ranked {
            set.push(v);
            let val = game.min_undef(&set);
            set.pop();
            let gain = (val - value) / game.space.weight(v);
            if best.map_or(true, |(g, _, _)| gain > g) {
                best = Some((gain, v, val));
            }
        }
        let (_, v, val) = best.expect("nonempty ranking");
        set.push(v);
        mass += game.space.weight(v);
        value = val;
    }
    (set, value)
}

/// Decides whether `(x, y)` is `(C, δ, ε)`-connected against the chosen
/// adversary. Certification requires `undef ≤ δ·d(x,y)`; equality is
/// flagged through `zero_margin`.
pub fn verify_pair(
    space: &Space,
    x: usize,
    y: usize,
    params: ConnParams,
    mode: AdversaryMode,
    limit: usize,
) -> Result<Verdict> {
    if x >= space.n() || y >= space.n() {
        return Err(invalid("x", "vertex outside the space"));
    }
    let r = space.dist(x, y);
    if lt(space.scale_cap(), r) {
        return Err(invalid(
            "pair",
            format!("d(x,y) = {r} exceeds the scale cap {}", space.scale_cap()),
        ));
    }
    let threshold = params.delta * r;
    let verdict = |status, obstacle, fragment, worst: f64| {
        let margin = threshold - worst;
        Verdict {
            x,
            y,
            params,
            status,
            mode,
            witness_obstacle: obstacle,
            witness_fragment: fragment,
            worst_undef: worst,
            threshold,
            margin,
            zero_margin: status == Status::CertifiedYes && margin.abs() <= tol(threshold),
        }
    };
    if x == y || params.delta >= 1.0 {
        return Ok(verdict(
            Status::CertifiedYes,
            None,
            Some(Fragment::pure_gap(x, y)),
            r,
        )
        .with_trivial(r));
    }
    let mut game = Game::new(space, x, y, params.c, params.eps);
    match mode {
        AdversaryMode::Exact => {
            let w = worst_obstacle(space, x, y, params.c, params.eps, limit, Some(threshold + tol(threshold)))?;
            if w.min_undef > threshold + tol(threshold) {
                Ok(verdict(Status::Refuted, Some(w.obstacle), None, w.min_undef))
            } else {
                let frag = game.best_fragment(&w.obstacle, threshold + tol(threshold));
                Ok(verdict(Status::CertifiedYes, Some(w.obstacle), frag, w.min_undef))
            }
        }
        AdversaryMode::Greedy | AdversaryMode::RhoGuided => {
            let (set, value) = if mode == AdversaryMode::Greedy {
                greedy_obstacle(&mut game)
            } else {
                rho_obstacle(&mut game, params.c)
            };
            let mut set = set;
            set.sort_unstable();
            if value > threshold + tol(threshold) {
                Ok(verdict(Status::Refuted, Some(set), None, value))
            } else {
                let frag = game.best_fragment(&set, threshold + tol(threshold));
                Ok(verdict(Status::NoCounterexampleFound, Some(set), frag, value))
            }
        }
    }
}

impl Verdict {
    fn with_trivial(mut self, r: f64) -> Verdict {
        // the pure gap has undef d(x,y) < δ·d(x,y) once δ ≥ 1
        self.worst_undef = r;
        self.margin = self.threshold - r;
        self.zero_margin = r > 0.0 && self.margin.abs() <= tol(self.threshold);
        self
    }
}

/// Pairs `(x, y)` with `x ≠ y`, `d(x,y) ≥ min_dist` and `d ≤ r₀`.
pub fn pairs_at_least(space: &Space, min_dist: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for x in 0..space.n() {
        let row = space.row(x);
        for y in 0..space.n() {
            if x != y && le(min_dist, row[y]) && le(row[y], space.scale_cap()) {
                out.push((x, y));
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaRow {
    pub tau: f64,
    /// Smallest `δ` with every sampled pair `(C₁, δ, τ)`-connected.
    pub delta: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub used_in_fit: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaFit {
    pub alpha: f64,
    pub c2: f64,
    /// Root mean square residual of the log-log fit.
    pub residual: f64,
    pub table: Vec<AlphaRow>,
}

const DELTA_FLOOR: f64 = 1e-6;

/// Default `τ` grid: `points` geometric steps from just above the lightest
/// obstacle that fits some sampled ball up to `½`.
pub fn default_tau_grid(space: &Space, c1: f64, pairs: &[(usize, usize)], points: usize) -> Vec<f64> {
    let mut lo: f64 = 0.0;
    for &(x, y) in pairs {
        let ball = match space.ball(x, (c1 * space.dist(x, y)).max(f64::MIN_POSITIVE)) {
            Ok(b) => b,
            Err(_) => continue,
        };
        let lightest = ball
            .members
            .iter()
            .filter(|&&v| v != x && v != y)
            .map(|&v| space.weight(v))
            .fold(f64::INFINITY, f64::min);
        if lightest.is_finite() {
            lo = lo.max(lightest / ball.mass);
        }
    }
    let lo = (lo * 1.01).clamp(1e-6, 0.25);
    if points <= 1 {
        return vec![lo];
    }
    let ratio = (0.5f64 / lo).powf(1.0 / (points - 1) as f64);
    (0..points).map(|i| lo * ratio.powi(i as i32)).collect()
}

/// Fits `δ(τ) ≈ C₂ τ^α`, where `δ(τ)` is the smallest gap fraction certified
/// by the exact adversary over `pairs`. Points with `δ ≥ 1` are trivial and
/// left out of the fit.
pub fn estimate_fine_alpha(
    space: &Space,
    c1: f64,
    taus: &[f64],
    pairs: &[(usize, usize)],
    limit: usize,
) -> Result<AlphaFit> {
    if taus.is_empty() || taus.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
        return Err(invalid("tau", "grid must be nonempty and inside (0, 1)"));
    }
    if pairs.is_empty() {
        return Err(invalid("pairs", "no pairs to test"));
    }
    let mut table = Vec::with_capacity(taus.len());
    for &tau in taus {
        let mut worst = 0.0f64;
        let mut worst_pair = None;
        for &(x, y) in pairs {
            let r = space.dist(x, y);
            if r == 0.0 {
                continue;
            }
            let w = worst_obstacle(space, x, y, c1, tau, limit, None)?;
            let d = w.min_undef / r;
            if d > worst || worst_pair.is_none() {
                worst = worst.max(d);
                worst_pair = Some((x, y));
            }
        }
        let delta = worst.max(DELTA_FLOOR);
        table.push(AlphaRow {
            tau,
            delta,
            worst_pair,
            used_in_fit: delta < 1.0 - 1e-12,
        });
    }
    let pts: Vec<(f64, f64)> = table
        .iter()
        .filter(|r| r.used_in_fit)
        .map(|r| (r.tau.ln(), r.delta.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "{} of {} grid points lie below the trivial regime δ ≥ 1",
            pts.len(),
            table.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(AlphaFit {
        alpha: slope,
        c2: intercept.exp(),
        residual,
        table,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IterRecord {
    pub iteration: usize,
    pub len: f64,
    pub undef: f64,
    /// Undef carried by gaps at or below resolution, which are no longer refined.
    pub frozen_undef: f64,
    /// `δⁿ·d(x,y) + frozen_undef`.
    pub undef_bound: f64,
    pub open_gaps: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Quasiconvex {
    pub fragment: Fragment,
    pub len: f64,
    /// `C/(1−δ)·d(x,y)`.
    pub len_bound: f64,
    pub ledger: Vec<IterRecord>,
    pub complete: bool,
}

fn solid_path(space: &Space, u: usize, v: usize) -> Option<Fragment> {
    let (dist, parent) = dijkstra_with_parents(space.adjacency(), u);
    if !dist[v].is_finite() {
        return None;
    }
    Some(Fragment::along(&walk_back(&parent, v)))
}

/// Splices `replace(u, v)` into every gap leg the closure accepts.
fn refine<F>(space: &Space, f: &Fragment, mut replace: F) -> Result<Fragment>
where
    F: FnMut(usize, usize) -> Result<Option<Fragment>>,
{
    let mut waypoints = vec![f.start];
    let mut parts = Vec::new();
    for leg in &f.legs {
        let part = match leg.kind {
            LegKind::Gap => replace(leg.u, leg.v)?,
            LegKind::Solid => None,
        };
        parts.push(part.unwrap_or(Fragment {
            start: leg.u,
            legs: vec![*leg],
        }));
        waypoints.push(leg.v);
    }
    normalize(space, &concatenate(&waypoints, &parts)?)
}

/// Gap filling with `E = ∅`: each gap `(u,v)` above resolution is replaced by
/// the shortest fragment of length `≤ C·d(u,v)` with undef `≤ δ·d(u,v)`;
/// gaps at or below resolution become solid shortest paths when one exists.
pub fn quasiconvexify_from(space: &Space, initial: &Fragment, c: f64, delta: f64, max_iters: usize) -> Result<Quasiconvex> {
    if !(c >= 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", "need C ≥ 1 and 0 < δ < 1"));
    }
    initial.validate(space)?;
    let h = space.resolution();
    let d = space.dist(initial.start, initial.end());
    let none = vec![false; space.n()];
    let mut frag = normalize(space, initial)?;
    let mut ledger = Vec::new();
    let mut frozen = 0.0;
    let record = |frag: &Fragment, i: usize, frozen: f64, ledger: &mut Vec<IterRecord>| {
        let open = frag.gaps().filter(|l| space.dist(l.u, l.v) > h + tol(h)).count();
        ledger.push(IterRecord {
            iteration: i,
            len: frag.len(space),
            undef: frag.undef(space),
            frozen_undef: frozen,
            undef_bound: delta.powi(i as i32) * d + frozen,
            open_gaps: open,
        });
        open
    };
    let mut open = record(&frag, 0, frozen, &mut ledger);
    let mut i = 0;
    while open > 0 && i < max_iters {
        i += 1;
        frag = refine(space, &frag, |u, v| {
            let duv = space.dist(u, v);
            if duv <= h + tol(h) {
                return Ok(None);
            }
            let front = pareto_fragments(space, u, v, &none, c * duv, SearchOptions::default())?;
            match front.shortest_with_undef_at_most(delta * duv) {
                Some(e) => Ok(Some(e.fragment.clone())),
                None => Err(Error::Refuted {
                    x: space.id(u),
                    y: space.id(v),
                }),
            }
        })?;
        frozen = frag
            .gaps()
            .map(|l| space.dist(l.u, l.v))
            .filter(|&g| g <= h + tol(h))
            .sum();
        open = record(&frag, i, frozen, &mut ledger);
    }
    let complete = open == 0;
    if complete {
        frag = refine(space, &frag, |u, v| Ok(solid_path(space, u, v)))?;
    }
    Ok(Quasiconvex {
        len: frag.len(space),
        len_bound: c / (1.0 - delta) * d,
        fragment: frag,
        ledger,
        complete,
    })
}

pub fn quasiconvexify(space: &Space, x: usize, y: usize, c: f64, delta: f64, max_iters: usize) -> Result<Quasiconvex> {
    if x >= space.n() || y >= space.n() {
        return Err(invalid("x", "vertex outside the space"));
    }
    quasiconvexify_from(space, &Fragment::pure_gap(x, y), c, delta, max_iters)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FineParams {
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralRound {
    pub round: usize,
    pub level: f64,
    pub obstacle_vertices: usize,
    pub integral: f64,
    pub undef: f64,
    pub open_gaps: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralCurve {
    pub fragment: Fragment,
    pub integral: f64,
    /// `C₃·d(x,y)`.
    pub bound: f64,
    pub m: f64,
    pub gap_fraction: f64,
    pub rounds: Vec<IntegralRound>,
    pub complete: bool,
}

/// Gap filling that keeps `∫_γ g ds` small. Round `n` fills each gap
/// `(u,v)` above resolution with the fragment of least `∫ g` among those of
/// length `≤ C₁·d(u,v)` and undef `≤ δ_g·d(u,v)` whose interior avoids
/// `{M_{2C₁d(u,v)} gᵖ > Mⁿᵖ}`. Here `M = 2(D⁴)^{1/(pα−1)}`, `τ = D⁴/Mᵖ` and
/// `δ_g = min(C₂τ^α, ½)`.
pub fn avoid_integral_curve(
    space: &Space,
    x: usize,
    y: usize,
    g: &[f64],
    p: f64,
    fine: FineParams,
    max_iters: usize,
) -> Result<IntegralCurve> {
    if x >= space.n() || y >= space.n() || g.len() != space.n() {
        return Err(invalid("x", "vertex or field outside the space"));
    }
    if !(fine.alpha > 0.0) || !(p * fine.alpha > 1.0) {
        return Err(invalid("p", format!("need p > 1/α, got p = {p}, α = {}", fine.alpha)));
    }
    let dd = space.measured_doubling();
    let m = 2.0 * dd.powi(4).powf(1.0 / (p * fine.alpha - 1.0));
    let tau = dd.powi(4) / m.powf(p);
    let delta = tau.powf(fine.alpha);
    let gap_fraction = (fine.c2 * delta).min(0.5);
    let c3 = fine.c1 * m / (1.0 - m * delta);
    let h = space.resolution();
    let d = space.dist(x, y);
    let gp: Vec<f64> = g.iter().map(|v| v.abs().powf(p)).collect();
    let mut frag = Fragment::pure_gap(x, y);
    let mut rounds = Vec::new();
    let mut round = 0;
    let open_gaps = |f: &Fragment| f.gaps().filter(|l| space.dist(l.u, l.v) > h + tol(h)).count();
    while open_gaps(&frag) > 0 && round < max_iters {
        round += 1;
        let level = m.powf(round as f64 * p);
        let mut blocked = 0;
        frag = refine(space, &frag, |u, v| {
            let duv = space.dist(u, v);
            if duv <= h + tol(h) {
                return Ok(None);
            }
            let mf = space.maximal_function(&gp, 2.0 * fine.c1 * duv)?;
            let mask: Vec<bool> = mf.iter().map(|&v| v > level).collect();
            blocked += mask.iter().filter(|&&b| b).count();
            match min_integral_fragment(space, u, v, &mask, fine.c1 * duv, gap_fraction * duv, g)? {
                Some((_, f)) => Ok(Some(f)),
                None => Err(Error::Refuted {
                    x: space.id(u),
                    y: space.id(v),
                }),
            }
        })?;
        rounds.push(IntegralRound {
            round,
            level,
            obstacle_vertices: blocked,
            integral: crate::fragments::fragment_integral(space, &frag, g),
            undef: frag.undef(space),
            open_gaps: open_gaps(&frag),
        });
    }
    let complete = open_gaps(&frag) == 0;
    if complete {
        frag = refine(space, &frag, |u, v| Ok(solid_path(space, u, v)))?;
    }
    Ok(IntegralCurve {
        integral: crate::fragments::fragment_integral(space, &frag, g),
        bound: c3 * d,
        m,
        gap_fraction,
        fragment: frag,
        rounds,
        complete,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PredictedConstants {
    pub alpha: f64,
    pub m: f64,
    pub c1: f64,
    pub c2: f64,
    pub m_prime: f64,
    pub delta_prime: f64,
    pub c3: f64,
    pub c_pi: f64,
    /// Exponent `k = 1 − 1/log₂δ` of the implied doubling bound.
    pub k: f64,
    /// `ε^k`: lower bound for `μ(B(x,r/2))/μ(B(x,r))`.
    pub half_ball_ratio: f64,
}

/// Explicit constants from `(D, C, δ, ε)` and the exponent `p`.
pub fn predicted_constants(d: f64, c: f64, delta: f64, eps: f64, p: f64) -> Result<PredictedConstants> {
    if !(d >= 1.0) {
        return Err(invalid("D", format!("must be ≥ 1, got {d}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", format!("must lie in (0, 1), got {delta}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps", format!("must lie in (0, 1), got {eps}")));
    }
    if !(c >= 1.0) {
        return Err(invalid("C", format!("must be ≥ 1, got {c}")));
    }
    let m = 2.0 * d.powf(-(1.0 - delta).log2() + 1.0).max(d.powi(3));
    let alpha = delta.ln() / (eps / (2.0 * m)).ln();
    if !(p * alpha > 1.0) {
        return Err(invalid("p", format!("need p > 1/α = {}, got {p}", 1.0 / alpha)));
    }
    let c1 = c / (1.0 - delta);
    let c2 = 2.0 * m / eps;
    let m_prime = 2.0 * d.powi(4).powf(1.0 / (p * alpha - 1.0));
    let delta_prime = (d.powi(4) / m_prime.powf(p)).powf(alpha);
    if !(m_prime * delta_prime < 1.0) {
        return Err(invalid("p", "M'δ' ≥ 1, so C₃ is undefined"));
    }
    let c3 = c1 * m_prime / (1.0 - m_prime * delta_prime);
    let k = 1.0 - 1.0 / delta.log2();
    Ok(PredictedConstants {
        alpha,
        m,
        c1,
        c2,
        m_prime,
        delta_prime,
        c3,
        c_pi: 2.0 * c3,
        k,
        half_ball_ratio: eps.powf(k),
    })
}

/// `(2^K C, δ, ε D^{−K−1})`.
pub fn change_scale_params(c: f64, delta: f64, eps: f64, k_shift: u32, d: f64) -> Result<ConnParams> {
    if !(d >= 1.0) {
        return Err(invalid("D", format!("must be ≥ 1, got {d}")));
    }
    ConnParams::new(2f64.powi(k_shift as i32) * c, delta, eps * d.powi(-(k_shift as i32) - 1))
}

#[derive(Clone, Debug, Serialize)]
pub struct HalfBallCheck {
    pub k: f64,
    pub ratio_bound: f64,
    /// Least `μ(B(x,r/2))/μ(B(x,r))` seen.
    pub worst_ratio: f64,
    pub worst_center: Option<usize>,
    pub worst_radius: f64,
    pub violations: usize,
    pub holds: bool,
}

/// Checks `μ(B(x,r/2)) ≥ ε^k μ(B(x,r))` with `k = 1 − 1/log₂δ` for every
/// center and every critical radius `r ≤ r₀`.
pub fn implied_doubling_check(space: &Space, delta: f64, eps: f64) -> Result<HalfBallCheck> {
    if !(delta > 0.0 && delta < 1.0) || !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("delta", "need 0 < δ < 1 and 0 < ε < 1"));
    }
    let k = 1.0 - 1.0 / delta.log2();
    let bound = eps.powf(k);
    let r0 = space.scale_cap();
    let mut out = HalfBallCheck {
        k,
        ratio_bound: bound,
        worst_ratio: 1.0,
        worst_center: None,
        worst_radius: 0.0,
        violations: 0,
        holds: true,
    };
    for x in 0..space.n() {
        let prof = space.profile(x);
        let mut radii: Vec<f64> = prof.levels.iter().flat_map(|&(d, _)| [d, 2.0 * d]).filter(|&r| r > 0.0 && le(r, r0)).collect();
        radii.push(r0);
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        // mass is constant on (a, b], so probe just above each breakpoint
        for &b in &radii {
            let r = b * (1.0 + 1e-7);
            let r = if r > r0 { r0 } else { r };
            let ratio = prof.mass_open(r / 2.0) / prof.mass_open(r);
            if ratio < out.worst_ratio {
                out.worst_ratio = ratio;
                out.worst_center = Some(x);
                out.worst_radius = r;
            }
            if lt(ratio, bound) {
                out.violations += 1;
            }
        }
    }
    out.holds = out.violations == 0;
    Ok(out)
}
