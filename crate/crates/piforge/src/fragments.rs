//! Curve fragments: chains of solid edge traversals and gap jumps.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::space::{le, lt, tol, Space};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LegKind {
    Solid,
    Gap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Leg {
    pub kind: LegKind,
    pub u: usize,
    pub v: usize,
}

impl Leg {
    pub fn solid(u: usize, v: usize) -> Leg {
        Leg { kind: LegKind::Solid, u, v }
    }

    pub fn gap(u: usize, v: usize) -> Leg {
        Leg { kind: LegKind::Gap, u, v }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fragment {
    pub start: usize,
    pub legs: Vec<Leg>,
}

impl Fragment {
    /// The fragment that stays at `x`.
    pub fn point(x: usize) -> Fragment {
        Fragment { start: x, legs: Vec::new() }
    }

    /// The two-point fragment `{0, d(x,y)}`.
    pub fn pure_gap(x: usize, y: usize) -> Fragment {
        if x == y {
            return Fragment::point(x);
        }
        Fragment {
            start: x,
            legs: vec![Leg::gap(x, y)],
        }
    }

    /// Solid fragment along a vertex path.
    pub fn along(path: &[usize]) -> Fragment {
        Fragment {
            start: path[0],
            legs: path.windows(2).map(|w| Leg::solid(w[0], w[1])).collect(),
        }
    }

    pub fn end(&self) -> usize {
        self.legs.last().map(|l| l.v).unwrap_or(self.start)
    }

    /// Visited vertices in order, starting with `start`.
    pub fn vertices(&self) -> Vec<usize> {
        let mut out = vec![self.start];
        out.extend(self.legs.iter().map(|l| l.v));
        out
    }

    pub fn gaps(&self) -> impl Iterator<Item = &Leg> {
        self.legs.iter().filter(|l| l.kind == LegKind::Gap)
    }

    /// Checks chaining and that every solid leg is a graph edge.
    pub fn validate(&self, space: &Space) -> Result<()> {
        let mut at = self.start;
        for (i, leg) in self.legs.iter().enumerate() {
            if leg.u >= space.n() || leg.v >= space.n() {
                return Err(Error::Fragment(format!("leg {i} names a vertex outside the space")));
            }
            if leg.u != at {
                return Err(Error::Fragment(format!(
                    "leg {i} starts at {} but the previous leg ended at {}",
                    space.id(leg.u),
                    space.id(at)
                )));
            }
            if leg.kind == LegKind::Solid && leg.u != leg.v && space.edge_length(leg.u, leg.v).is_none() {
                return Err(Error::Fragment(format!(
                    "solid leg {i} ({}, {}) is not an edge",
                    space.id(leg.u),
                    space.id(leg.v)
                )));
            }
            at = leg.v;
        }
        Ok(())
    }

    fn leg_length(space: &Space, leg: &Leg) -> f64 {
        if leg.u == leg.v {
            return 0.0;
        }
        match leg.kind {
            LegKind::Solid => space.edge_length(leg.u, leg.v).unwrap_or(f64::NAN),
            LegKind::Gap => space.dist(leg.u, leg.v),
        }
    }

    /// `len(γ)`: solid edge lengths plus gap distances.
    pub fn len(&self, space: &Space) -> f64 {
        self.legs.iter().map(|l| Self::leg_length(space, l)).sum()
    }

    /// `|Undef(γ)|`: the summed gap distances.
    pub fn undef(&self, space: &Space) -> f64 {
        self.gaps().map(|l| Self::leg_length(space, l)).sum()
    }

    pub fn solid_len(&self, space: &Space) -> f64 {
        self.legs
            .iter()
            .filter(|l| l.kind == LegKind::Solid)
            .map(|l| Self::leg_length(space, l))
            .sum()
    }

    /// Vertices strictly between the endpoints that the fragment touches.
    pub fn interior(&self) -> Vec<usize> {
        let v = self.vertices();
        if v.len() <= 2 {
            return Vec::new();
        }
        v[1..v.len() - 1].to_vec()
    }
}

/// Merges consecutive gaps and drops zero-length legs.
pub fn normalize(space: &Space, fragment: &Fragment) -> Result<Fragment> {
    fragment.validate(space)?;
    let mut legs: Vec<Leg> = Vec::with_capacity(fragment.legs.len());
    for &leg in &fragment.legs {
        if leg.u == leg.v {
            continue;
        }
        match legs.last_mut() {
            Some(prev) if prev.kind == LegKind::Gap && leg.kind == LegKind::Gap => {
                prev.v = leg.v;
                if prev.u == prev.v {
                    legs.pop();
                }
            }
            _ => legs.push(leg),
        }
    }
    Ok(Fragment {
        start: fragment.start,
        legs,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Dilation {
    /// Stretched parameter length `max K'`.
    pub new_length: f64,
    /// `max K + (C−1)|Undef(γ)|`.
    pub bound: f64,
}

/// Stretches gap `i` by `factors[i] ∈ (1, C]`. The legs are unchanged; only
/// the parameter length grows.
pub fn dilate_gaps(space: &Space, fragment: &Fragment, factors: &[f64], c: f64) -> Result<Dilation> {
    fragment.validate(space)?;
    let gaps: Vec<f64> = fragment.gaps().map(|l| space.dist(l.u, l.v)).collect();
    if factors.len() != gaps.len() {
        return Err(invalid(
            "factors",
            format!("{} factors for {} gaps", factors.len(), gaps.len()),
        ));
    }
    if let Some(f) = factors.iter().find(|&&f| !(f > 1.0 && f <= c)) {
        return Err(invalid("factors", format!("factor {f} outside (1, {c}]")));
    }
    let solid = fragment.solid_len(space);
    let undef: f64 = gaps.iter().sum();
    let new_length = solid + gaps.iter().zip(factors).map(|(g, f)| g * f).sum::<f64>();
    Ok(Dilation {
        new_length,
        bound: solid + undef + (c - 1.0) * undef,
    })
}

/// Chains `fragments[i]` from `waypoints[i]` to `waypoints[i+1]`.
pub fn concatenate(waypoints: &[usize], fragments: &[Fragment]) -> Result<Fragment> {
    if waypoints.len() != fragments.len() + 1 {
        return Err(invalid(
            "waypoints",
            format!("{} waypoints for {} fragments", waypoints.len(), fragments.len()),
        ));
    }
    let mut legs = Vec::new();
    for (i, f) in fragments.iter().enumerate() {
        if f.start != waypoints[i] || f.end() != waypoints[i + 1] {
            return Err(Error::Fragment(format!("fragment {i} does not join waypoints {i} and {}", i + 1)));
        }
        legs.extend_from_slice(&f.legs);
    }
    Ok(Fragment {
        start: waypoints[0],
        legs,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConcatParams {
    pub c: f64,
    pub delta: f64,
    pub eps: f64,
    /// `log₂ ε'`, kept separately since `ε'` underflows for realistic `D`.
    pub log2_eps: f64,
}

/// Parameters after concatenating `n` fragments:
/// `(LC, 2Lδ, ε·D^{log₂δ − log₂L − log₂n − log₂C − 6})`.
pub fn concatenation_params(l: f64, c: f64, delta: f64, eps: f64, n: f64, d: f64) -> Result<ConcatParams> {
    for (name, v) in [("L", l), ("C", c), ("n", n), ("D", d)] {
        if !(v >= 1.0) {
            return Err(invalid(name, format!("must be ≥ 1, got {v}")));
        }
    }
    if !(delta > 0.0) || !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("delta", "need δ > 0 and 0 < ε < 1"));
    }
    let exponent = delta.log2() - l.log2() - n.log2() - c.log2() - 6.0;
    let log2_eps = eps.log2() + exponent * d.log2();
    Ok(ConcatParams {
        c: l * c,
        delta: 2.0 * l * delta,
        eps: log2_eps.exp2(),
        log2_eps,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FrontEntry {
    pub len: f64,
    pub undef: f64,
    pub fragment: Fragment,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParetoFront {
    /// Increasing in `len`, strictly decreasing in `undef`.
    pub entries: Vec<FrontEntry>,
    /// Set when ε-dominance pruning was used; the front may then miss entries.
    pub heuristic: bool,
}

impl ParetoFront {
    pub fn min_undef(&self) -> Option<f64> {
        self.entries.last().map(|e| e.undef)
    }

    /// Entry of least `len` among those with `undef ≤ cap`.
    pub fn shortest_with_undef_at_most(&self, cap: f64) -> Option<&FrontEntry> {
        self.entries.iter().find(|e| le(e.undef, cap))
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SearchOptions {
    /// Undef resolution for ε-dominance; `None` runs the exact search.
    pub eps_dominance: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
struct Label {
    vertex: usize,
    len: f64,
    undef: f64,
    parent: Option<usize>,
    kind: LegKind,
}

#[derive(Clone, Copy, Debug)]
struct Key {
    len: f64,
    undef: f64,
    label: usize,
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .len
            .total_cmp(&self.len)
            .then_with(|| other.undef.total_cmp(&self.undef))
            .then_with(|| other.label.cmp(&self.label))
    }
}

/// Nondominated `(len, undef)` fragments from `x` to `y` with `len ≤ budget`
/// whose interior avoids `obstacle`. Bi-objective label setting: labels are
/// popped in lexicographic `(len, undef)` order and a label is kept only if
/// it strictly improves the least undef already settled at its vertex.
pub fn pareto_fragments(
    space: &Space,
    x: usize,
    y: usize,
    obstacle: &[bool],
    budget: f64,
    opts: SearchOptions,
) -> Result<ParetoFront> {
    let n = space.n();
    if x >= n || y >= n {
        return Err(invalid("x", "vertex outside the space"));
    }
    if obstacle.len() != n {
        return Err(invalid("E", format!("mask has {} entries for {n} vertices", obstacle.len())));
    }
    let heuristic = opts.eps_dominance.is_some();
    if x == y {
        return Ok(ParetoFront {
            entries: vec![FrontEntry {
                len: 0.0,
                undef: 0.0,
                fragment: Fragment::point(x),
            }],
            heuristic,
        });
    }
    let to_y = space.row(y).to_vec();
    if lt(budget, to_y[x]) {
        return Ok(ParetoFront {
            entries: Vec::new(),
            heuristic,
        });
    }
    let slack = tol(budget);
    let fits = |len: f64, v: usize| len + to_y[v] <= budget + slack;
    let from_x = space.row(x).to_vec();
    // vertices a fragment may pass through
    let usable: Vec<usize> = (0..n)
        .filter(|&w| w != x && (w == y || !obstacle[w]) && from_x[w] + to_y[w] <= budget + slack)
        .collect();
    let resolution = opts.eps_dominance.unwrap_or(0.0);

    let mut labels = vec![Label {
        vertex: x,
        len: 0.0,
        undef: 0.0,
        parent: None,
        kind: LegKind::Solid,
    }];
    let mut best_undef = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    heap.push(Key {
        len: 0.0,
        undef: 0.0,
        label: 0,
    });
    let mut at_y = Vec::new();
    while let Some(Key { len, undef, label }) = heap.pop() {
        let v = labels[label].vertex;
        if !(undef < best_undef[v] - tol(budget) - resolution) {
            continue;
        }
        best_undef[v] = undef;
        if v == y {
            at_y.push(label);
            continue;
        }
        let mut push = |w: usize, step: f64, gap: bool, labels: &mut Vec<Label>| {
            let nl = len + step;
            let nu = if gap { undef + step } else { undef };
            if !fits(nl, w) || !(nu < best_undef[w]) {
                return;
            }
            labels.push(Label {
                vertex: w,
                len: nl,
                undef: nu,
                parent: Some(label),
                kind: if gap { LegKind::Gap } else { LegKind::Solid },
            });
            heap.push(Key {
                len: nl,
                undef: nu,
                label: labels.len() - 1,
            });
        };
        for &(w, l) in space.neighbors(v) {
            if w != x && (w == y || !obstacle[w]) {
                push(w, l, false, &mut labels);
            }
        }
        let row = space.row(v);
        for &w in &usable {
            if w != v {
                push(w, row[w], true, &mut labels);
            }
        }
    }
    let entries = at_y
        .into_iter()
        .map(|label| {
            let mut legs = Vec::new();
            let mut cur = label;
            while let Some(p) = labels[cur].parent {
                legs.push(Leg {
                    kind: labels[cur].kind,
                    u: labels[p].vertex,
                    v: labels[cur].vertex,
                });
                cur = p;
            }
            legs.reverse();
            let raw = Fragment { start: x, legs };
            let fragment = normalize(space, &raw).expect("search builds chained fragments");
            FrontEntry {
                len: labels[label].len,
                undef: labels[label].undef,
                fragment,
            }
        })
        .collect();
    Ok(ParetoFront { entries, heuristic })
}

/// Least undef achievable within `budget`, or `None` when `y` is out of reach.
pub fn min_undef(space: &Space, x: usize, y: usize, obstacle: &[bool], budget: f64) -> Result<Option<f64>> {
    Ok(pareto_fragments(space, x, y, obstacle, budget, SearchOptions::default())?.min_undef())
}

/// `∫_γ g ds` with trapezoid quadrature on solid legs; gaps contribute 0.
pub fn fragment_integral(space: &Space, fragment: &Fragment, g: &[f64]) -> f64 {
    fragment
        .legs
        .iter()
        .filter(|l| l.kind == LegKind::Solid && l.u != l.v)
        .map(|l| space.edge_length(l.u, l.v).unwrap_or(f64::NAN) * (g[l.u] + g[l.v]) / 2.0)
        .sum()
}

/// `max |f(u) − f(v)| / d(u,v)` over all pairs.
pub fn global_lipschitz(space: &Space, f: &[f64]) -> f64 {
    let mut best: f64 = 0.0;
    for u in 0..space.n() {
        let row = space.row(u);
        for v in (u + 1)..space.n() {
            best = best.max((f[u] - f[v]).abs() / row[v]);
        }
    }
    best
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Oscillation {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `|f(start) − f(end)| ≤ LIP·undef + ∫_γ lip f ds`.
pub fn oscillation_check(space: &Space, fragment: &Fragment, f: &[f64], lip: f64) -> Result<Oscillation> {
    fragment.validate(space)?;
    if f.len() != space.n() || f.iter().any(|v| !v.is_finite()) {
        return Err(invalid("f", "need one finite value per vertex"));
    }
    let measured = global_lipschitz(space, f);
    if lt(lip, measured) {
        return Err(invalid(
            "LIP",
            format!("{lip} is below the measured Lipschitz constant {measured}"),
        ));
    }
    let lhs = (f[fragment.start] - f[fragment.end()]).abs();
    let rhs = lip * fragment.undef(space) + fragment_integral(space, fragment, &crate::poincare::lip_field(space, f));
    Ok(Oscillation {
        lhs,
        rhs,
        holds: le(lhs, rhs),
    })
}

#[derive(Clone, Copy, Debug)]
struct CostKey {
    cost: f64,
    len: f64,
    label: usize,
}

impl PartialEq for CostKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for CostKey {}

impl PartialOrd for CostKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CostKey {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.len.total_cmp(&self.len))
            .then_with(|| other.label.cmp(&self.label))
    }
}

/// Fragment from `x` to `y` minimizing `∫_γ g ds` subject to `len ≤ budget`,
/// `undef ≤ undef_cap` and an interior avoiding `obstacle`. Gap legs are
/// only used when `undef_cap > 0`. Labels carry `(cost, len, undef)` and are
/// popped by cost, so the first label to reach `y` is optimal.
pub fn min_integral_fragment(
    space: &Space,
    x: usize,
    y: usize,
    obstacle: &[bool],
    budget: f64,
    undef_cap: f64,
    g: &[f64],
) -> Result<Option<(f64, Fragment)>> {
    let n = space.n();
    if x >= n || y >= n || obstacle.len() != n || g.len() != n {
        return Err(invalid("x", "vertex or field outside the space"));
    }
    if g.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(invalid("g", "values must be finite and nonnegative"));
    }
    if x == y {
        return Ok(Some((0.0, Fragment::point(x))));
    }
    let to_y = space.row(y).to_vec();
    let slack = tol(budget);
    let cap_slack = undef_cap + tol(undef_cap.max(budget));
    if to_y[x] > budget + slack {
        return Ok(None);
    }
    let from_x = space.row(x).to_vec();
    let usable: Vec<usize> = (0..n)
        .filter(|&w| w != x && (w == y || !obstacle[w]) && from_x[w] + to_y[w] <= budget + slack)
        .collect();
    let mut labels = vec![Label {
        vertex: x,
        len: 0.0,
        undef: 0.0,
        parent: None,
        kind: LegKind::Solid,
    }];
    let mut settled: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n];
    let mut heap = BinaryHeap::new();
    heap.push(CostKey {
        cost: 0.0,
        len: 0.0,
        label: 0,
    });
    let dominated = |set: &[(f64, f64)], len: f64, undef: f64| {
        set.iter().any(|&(l, u)| l <= len + tol(len) && u <= undef + tol(undef))
    };
    while let Some(CostKey { cost, label, .. }) = heap.pop() {
        let Label { vertex: v, len, undef, .. } = labels[label];
        if dominated(&settled[v], len, undef) {
            continue;
        }
        settled[v].push((len, undef));
        if v == y {
            let mut legs = Vec::new();
            let mut cur = label;
            while let Some(p) = labels[cur].parent {
                legs.push(Leg {
                    kind: labels[cur].kind,
                    u: labels[p].vertex,
                    v: labels[cur].vertex,
                });
                cur = p;
            }
            legs.reverse();
            let frag = normalize(space, &Fragment { start: x, legs })?;
            return Ok(Some((cost, frag)));
        }
        let mut push = |w: usize, step: f64, gap: bool, labels: &mut Vec<Label>| {
            let nl = len + step;
            let nu = if gap { undef + step } else { undef };
            if nl + to_y[w] > budget + slack || nu > cap_slack || dominated(&settled[w], nl, nu) {
                return;
            }
            let nc = if gap { cost } else { cost + step * (g[v] + g[w]) / 2.0 };
            labels.push(Label {
                vertex: w,
                len: nl,
                undef: nu,
                parent: Some(label),
                kind: if gap { LegKind::Gap } else { LegKind::Solid },
            });
            heap.push(CostKey {
                cost: nc,
                len: nl,
                label: labels.len() - 1,
            });
        };
        for &(w, l) in space.neighbors(v) {
            if w != x && (w == y || !obstacle[w]) {
                push(w, l, false, &mut labels);
            }
        }
        if undef_cap > 0.0 {
            let row = space.row(v);
            for &w in &usable {
                if w != v {
                    push(w, row[w], true, &mut labels);
                }
            }
        }
    }
    Ok(None)
}
