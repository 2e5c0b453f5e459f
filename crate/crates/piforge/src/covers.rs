//! Nested separated nets, Whitney-type gap points and Vitali selection.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::space::{le, lt, Space};

#[derive(Clone, Debug, Serialize)]
pub struct NetHierarchy {
    /// `levels[j]` is the `2^{-j}`-separated net `N_j`, sorted by vertex id.
    pub levels: Vec<Vec<usize>>,
    /// Level at which each vertex enters the hierarchy (`Sc_N = 2^{-i}·unit`).
    pub entry: Vec<Option<usize>>,
    /// Length that counts as 1 when forming the scales `2^{-j}`.
    pub unit: f64,
}

impl NetHierarchy {
    pub fn all(&self) -> &[usize] {
        self.levels.last().map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// `Sc_N(n)`, or `None` if `n` is not a net point.
    pub fn scale(&self, n: usize) -> Option<f64> {
        self.entry[n].map(|i| 2f64.powi(-(i as i32)) * self.unit)
    }

    pub fn entry_level(&self, n: usize) -> Option<usize> {
        self.entry[n]
    }
}

fn by_id(space: &Space, set: &[usize]) -> Vec<usize> {
    let mut v = set.to_vec();
    v.sort_by_key(|&x| space.id(x));
    v.dedup();
    v
}

/// Greedy maximal nets `N_0 ⊆ … ⊆ N_{j_max}` of `K`, scanning in ascending
/// vertex id.
pub fn build_nets(space: &Space, k: &[usize], j_max: usize) -> Result<NetHierarchy> {
    build_nets_in_units(space, k, j_max, 1.0)
}

/// [`build_nets`] with separations `2^{-j}·unit`.
pub fn build_nets_in_units(space: &Space, k: &[usize], j_max: usize, unit: f64) -> Result<NetHierarchy> {
    if !(unit > 0.0 && unit.is_finite()) {
        return Err(invalid("unit", format!("must be positive, got {unit}")));
    }
    if k.is_empty() {
        return Err(invalid("K", "empty vertex set"));
    }
    let order = by_id(space, k);
    let mut current: Vec<usize> = Vec::new();
    let mut levels = Vec::with_capacity(j_max + 1);
    let mut entry = vec![None; space.n()];
    for j in 0..=j_max {
        let sep = 2f64.powi(-(j as i32)) * unit;
        for &v in &order {
            if entry[v].is_some() {
                continue;
            }
            let row = space.row(v);
            if current.iter().all(|&m| !lt(row[m], sep)) {
                current.push(v);
                entry[v] = Some(j);
            }
        }
        let mut level = current.clone();
        level.sort_by_key(|&x| space.id(x));
        levels.push(level);
    }
    Ok(NetHierarchy { levels, entry, unit })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapPoint {
    pub vertex: usize,
    /// Scale index: `Sc_G = 2^{-k}` and `2^{-k-1} < d(g,K) ≤ 2^{-k}`, in units.
    pub k: i32,
    /// `d(g,K)` in units.
    pub dist_to_k: f64,
}

impl GapPoint {
    pub fn scale(&self) -> f64 {
        2f64.powi(-self.k)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GapPointSet {
    /// Selected gap points ordered by scale index, then vertex id.
    pub points: Vec<GapPoint>,
    /// Candidates that lay in the unit neighborhood of `K` inside `A`.
    pub candidates: Vec<GapPoint>,
    pub unit: f64,
}

impl GapPointSet {
    pub fn at_scale(&self, k: i32) -> impl Iterator<Item = &GapPoint> {
        self.points.iter().filter(move |g| g.k == k)
    }
}

/// The unique `k` with `2^{-k-1} < d ≤ 2^{-k}`.
pub fn scale_index(d: f64) -> i32 {
    let mut k = (-d.log2()).floor() as i32;
    loop {
        let hi = 2f64.powi(-k);
        let lo = 2f64.powi(-k - 1);
        if d > hi {
            k -= 1;
        } else if d <= lo {
            k += 1;
        } else {
            return k;
        }
    }
}

/// Greedy Vitali selection: balls by descending radius, then ascending center
/// id; a ball is kept when it is metrically disjoint (`d ≥ r₁ + r₂`) from every
/// kept ball. Returns indices into `balls`.
pub fn vitali_select(space: &Space, balls: &[(usize, f64)]) -> Result<Vec<usize>> {
    if let Some(b) = balls.iter().find(|b| !(b.1 > 0.0)) {
        return Err(invalid("balls", format!("radius must be positive, got {}", b.1)));
    }
    let mut order: Vec<usize> = (0..balls.len()).collect();
    order.sort_by(|&a, &b| {
        balls[b]
            .1
            .total_cmp(&balls[a].1)
            .then(space.id(balls[a].0).cmp(&space.id(balls[b].0)))
    });
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        let (c, r) = balls[i];
        let row = space.row(c);
        if kept.iter().all(|&j| !lt(row[balls[j].0], r + balls[j].1)) {
            kept.push(i);
        }
    }
    Ok(kept)
}

/// Gap points of `A \ K` inside the unit neighborhood of `K`, keeping scales
/// `2^{-k} ≥ min_scale`. Selection is one Vitali pass over all scales at the
/// radii `2^{-k-15}`, so disjointness holds across scales too.
pub fn build_gap_points(space: &Space, k: &[usize], a: &[usize], min_scale: f64) -> Result<GapPointSet> {
    build_gap_points_in_units(space, k, a, min_scale, 1.0)
}

/// [`build_gap_points`] where the neighborhood radius and every scale are
/// multiplied by `unit`; `k` indices still refer to `2^{-k}·unit`.
pub fn build_gap_points_in_units(
    space: &Space,
    k: &[usize],
    a: &[usize],
    min_scale: f64,
    unit: f64,
) -> Result<GapPointSet> {
    if !(unit > 0.0 && unit.is_finite()) {
        return Err(invalid("unit", format!("must be positive, got {unit}")));
    }
    if k.is_empty() {
        return Err(invalid("K", "empty vertex set"));
    }
    let mut in_k = vec![false; space.n()];
    for &v in k {
        in_k[v] = true;
    }
    let mut candidates = Vec::new();
    for v in by_id(space, a) {
        if in_k[v] {
            continue;
        }
        let row = space.row(v);
        let d = k.iter().map(|&x| row[x]).fold(f64::INFINITY, f64::min);
        if !(d < unit) {
            continue;
        }
        let kk = scale_index(d / unit);
        if !le(min_scale, 2f64.powi(-kk) * unit) {
            continue;
        }
        candidates.push(GapPoint {
            vertex: v,
            k: kk,
            dist_to_k: d / unit,
        });
    }
    let balls: Vec<(usize, f64)> = candidates.iter().map(|g| (g.vertex, 2f64.powi(-g.k - 15) * unit)).collect();
    let kept = vitali_select(space, &balls)?;
    let mut points: Vec<GapPoint> = kept.into_iter().map(|i| candidates[i]).collect();
    points.sort_by(|a, b| a.k.cmp(&b.k).then(space.id(a.vertex).cmp(&space.id(b.vertex))));
    let set = GapPointSet { points, candidates, unit };
    let report = check_gap_points(space, &set);
    if let Some(c) = report.uncovered {
        return Err(invalid(
            "gap points",
            format!("internal error: candidate {} is not covered", space.id(c)),
        ));
    }
    Ok(set)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GapCheck {
    pub annulus_violation: Option<usize>,
    pub overlapping_pair: Option<(usize, usize)>,
    pub uncovered: Option<usize>,
}

impl GapCheck {
    pub fn ok(&self) -> bool {
        self.annulus_violation.is_none() && self.overlapping_pair.is_none() && self.uncovered.is_none()
    }
}

/// Checks the annulus, disjointness and covering conditions exactly.
pub fn check_gap_points(space: &Space, set: &GapPointSet) -> GapCheck {
    let mut out = GapCheck::default();
    for g in &set.points {
        let hi = 2f64.powi(-g.k);
        if !(g.dist_to_k > hi / 2.0 && g.dist_to_k <= hi) {
            out.annulus_violation = Some(g.vertex);
        }
    }
    'pairs: for (i, a) in set.points.iter().enumerate() {
        let row = space.row(a.vertex);
        for b in &set.points[i + 1..] {
            if lt(row[b.vertex], (2f64.powi(-a.k - 15) + 2f64.powi(-b.k - 15)) * set.unit) {
                out.overlapping_pair = Some((a.vertex, b.vertex));
                break 'pairs;
            }
        }
    }
    for c in &set.candidates {
        let row = space.row(c.vertex);
        let covered = set
            .points
            .iter()
            .any(|g| g.vertex == c.vertex || lt(row[g.vertex], 2f64.powi(-g.k - 10) * set.unit));
        if !covered {
            out.uncovered = Some(c.vertex);
            break;
        }
    }
    out
}
