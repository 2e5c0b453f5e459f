//! Finite metric measure spaces: atoms with positive weights, a metric given by
//! shortest paths (or an explicit matrix), and the ball-level primitives built
//! on top of it.

use std::collections::{HashMap, VecDeque};
use std::ops::Deref;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graph::{dijkstra, Adjacency};

/// Relative tolerance for every threshold comparison on distances and masses.
pub const TOL: f64 = 1e-9;

/// Spaces with more vertices than this keep no distance matrix; rows are
/// computed by Dijkstra on demand and cached.
pub const DENSE_LIMIT: usize = 6000;

const ROW_CACHE: usize = 512;

#[inline]
pub fn tol(scale: f64) -> f64 {
    TOL * scale.abs().max(1.0)
}

/// `a < b` with the global tolerance (ties count as not less).
#[inline]
pub fn lt(a: f64, b: f64) -> bool {
    a < b - tol(b)
}

/// `a <= b` up to the global tolerance.
#[inline]
pub fn le(a: f64, b: f64) -> bool {
    a <= b + tol(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

/// A borrowed or shared row of the distance matrix.
pub enum Row<'a> {
    Borrowed(&'a [f64]),
    Shared(Arc<[f64]>),
}

impl Deref for Row<'_> {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        match self {
            Row::Borrowed(s) => s,
            Row::Shared(a) => a,
        }
    }
}

struct RowCache {
    rows: HashMap<usize, Arc<[f64]>>,
    order: VecDeque<usize>,
}

enum Metric {
    Dense(Vec<f64>),
    OnDemand {
        arcs: Adjacency,
        cache: Mutex<RowCache>,
    },
}

pub struct Space {
    ids: Vec<i64>,
    index: HashMap<i64, usize>,
    weights: Vec<f64>,
    edges: Vec<Edge>,
    adjacency: Adjacency,
    metric: Metric,
    from_matrix: bool,
    has_arcs: bool,
    resolution: f64,
    scale_cap: f64,
}

impl Clone for Space {
    fn clone(&self) -> Self {
        let metric = match &self.metric {
            Metric::Dense(m) => Metric::Dense(m.clone()),
            Metric::OnDemand { arcs, .. } => Metric::OnDemand {
                arcs: arcs.clone(),
                cache: Mutex::new(RowCache {
                    rows: HashMap::new(),
                    order: VecDeque::new(),
                }),
            },
        };
        Space {
            ids: self.ids.clone(),
            index: self.index.clone(),
            weights: self.weights.clone(),
            edges: self.edges.clone(),
            adjacency: self.adjacency.clone(),
            metric,
            from_matrix: self.from_matrix,
            has_arcs: self.has_arcs,
            resolution: self.resolution,
            scale_cap: self.scale_cap,
        }
    }
}

impl std::fmt::Debug for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Space")
            .field("n", &self.n())
            .field("edges", &self.edges.len())
            .field("resolution", &self.resolution)
            .field("scale_cap", &self.scale_cap)
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
    pub members: Vec<usize>,
    pub mass: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Doubling {
    pub value: f64,
    pub center: usize,
    pub radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Perfectness {
    /// Smallest admissible constant, with the (center, radius) realizing it.
    Constant { l: f64, center: usize, radius: f64 },
    /// An inhabited exterior annulus with an empty inner annulus at every L.
    Fails { center: usize, radius: f64 },
}

/// Distances from one center in ascending order, grouped into distance
/// levels, with cumulative masses.
#[derive(Clone, Debug)]
pub struct Profile {
    pub center: usize,
    pub order: Vec<usize>,
    pub dists: Vec<f64>,
    pub cum: Vec<f64>,
    /// `(distance, end)`: vertices `order[..end]` lie at distance `<= distance`.
    pub levels: Vec<(f64, usize)>,
}

impl Profile {
    /// Number of vertices in the open ball of radius `r`; the center always counts.
    pub fn count_open(&self, r: f64) -> usize {
        let k = self.dists.partition_point(|&d| lt(d, r));
        k.max(1)
    }

    pub fn mass_open(&self, r: f64) -> f64 {
        self.cum[self.count_open(r) - 1]
    }

    pub fn members_open(&self, r: f64) -> &[usize] {
        &self.order[..self.count_open(r)]
    }
}

fn validate_common(ids: &[i64], weights: &[f64], resolution: f64, scale_cap: f64) -> Result<HashMap<i64, usize>> {
    if ids.is_empty() {
        return Err(invalid("vertices", "a space needs at least one vertex"));
    }
    if ids.len() != weights.len() {
        return Err(invalid("weights", "one weight per vertex is required"));
    }
    let mut index = HashMap::with_capacity(ids.len());
    for (i, (&id, &w)) in ids.iter().zip(weights).enumerate() {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::BadVertex {
                id,
                reason: format!("weight must be positive and finite, got {w}"),
            });
        }
        if index.insert(id, i).is_some() {
            return Err(Error::BadVertex {
                id,
                reason: "duplicate vertex id".into(),
            });
        }
    }
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(invalid("resolution", format!("must be positive, got {resolution}")));
    }
    if !(scale_cap.is_finite() && scale_cap > 0.0) {
        return Err(invalid("scale_cap", format!("must be positive, got {scale_cap}")));
    }
    Ok(index)
}

fn build_adjacency(n: usize, ids: &[i64], edges: &[Edge]) -> Result<(Vec<Edge>, Adjacency)> {
    let mut adjacency: Adjacency = vec![Vec::new(); n];
    let mut canon = Vec::with_capacity(edges.len());
    let mut seen = HashMap::new();
    for (index, e) in edges.iter().enumerate() {
        let bad = |reason: String| Error::BadEdge {
            index,
            u: ids.get(e.u).copied().unwrap_or(-1),
            v: ids.get(e.v).copied().unwrap_or(-1),
            reason,
        };
        if e.u >= n || e.v >= n {
            return Err(bad("endpoint out of range".into()));
        }
        if e.u == e.v {
            return Err(bad("self-loop".into()));
        }
        if !(e.length.is_finite() && e.length > 0.0) {
            return Err(bad(format!("length must be positive and finite, got {}", e.length)));
        }
        let (u, v) = if e.u < e.v { (e.u, e.v) } else { (e.v, e.u) };
        if seen.insert((u, v), index).is_some() {
            return Err(bad("duplicate edge".into()));
        }
        canon.push(Edge { u, v, length: e.length });
        adjacency[u].push((v, e.length));
        adjacency[v].push((u, e.length));
    }
    for list in &mut adjacency {
        list.sort_by(|a, b| a.0.cmp(&b.0));
    }
    Ok((canon, adjacency))
}

impl Space {
    /// Space whose metric is the shortest-path metric of the given edges.
    pub fn from_edges(
        ids: Vec<i64>,
        weights: Vec<f64>,
        edges: Vec<Edge>,
        resolution: f64,
        scale_cap: f64,
    ) -> Result<Space> {
        Self::from_graph_with_arcs(ids, weights, edges, Vec::new(), resolution, scale_cap)
    }

    /// Shortest-path metric over solid edges plus metric-only arcs. Arcs
    /// shorten distances but are not traversable by curves.
    pub fn from_graph_with_arcs(
        ids: Vec<i64>,
        weights: Vec<f64>,
        edges: Vec<Edge>,
        arcs: Vec<Edge>,
        resolution: f64,
        scale_cap: f64,
    ) -> Result<Space> {
        let index = validate_common(&ids, &weights, resolution, scale_cap)?;
        let n = ids.len();
        let (edges, adjacency) = build_adjacency(n, &ids, &edges)?;
        let mut all = adjacency.clone();
        for (k, a) in arcs.iter().enumerate() {
            if a.u >= n || a.v >= n || a.u == a.v || !(a.length > 0.0 && a.length.is_finite()) {
                return Err(Error::BadEdge {
                    index: edges.len() + k,
                    u: ids.get(a.u).copied().unwrap_or(-1),
                    v: ids.get(a.v).copied().unwrap_or(-1),
                    reason: "invalid metric arc".into(),
                });
            }
            all[a.u].push((a.v, a.length));
            all[a.v].push((a.u, a.length));
        }
        let reach = dijkstra(&all, &[(0, 0.0)]);
        if let Some(bad) = reach.iter().position(|d| !d.is_finite()) {
            return Err(Error::Disconnected(ids[bad]));
        }
        let metric = if n <= DENSE_LIMIT {
            let rows: Vec<Vec<f64>> = (0..n)
                .into_par_iter()
                .map(|s| dijkstra(&all, &[(s, 0.0)]))
                .collect();
            let mut m = Vec::with_capacity(n * n);
            for r in rows {
                m.extend_from_slice(&r);
            }
            Metric::Dense(m)
        } else {
            Metric::OnDemand {
                arcs: all,
                cache: Mutex::new(RowCache {
                    rows: HashMap::new(),
                    order: VecDeque::new(),
                }),
            }
        };
        Ok(Space {
            ids,
            index,
            weights,
            edges,
            adjacency,
            metric,
            from_matrix: false,
            has_arcs: !arcs.is_empty(),
            resolution,
            scale_cap,
        })
    }

    /// Space with an explicit distance matrix. `edges` are the solid edges
    /// (possibly none); each must be at least as long as the distance it spans.
    pub fn from_matrix(
        ids: Vec<i64>,
        weights: Vec<f64>,
        matrix: Vec<Vec<f64>>,
        edges: Vec<Edge>,
        resolution: f64,
        scale_cap: f64,
    ) -> Result<Space> {
        let index = validate_common(&ids, &weights, resolution, scale_cap)?;
        let n = ids.len();
        if matrix.len() != n {
            return Err(invalid("matrix", format!("expected {n} rows, got {}", matrix.len())));
        }
        let mut m = Vec::with_capacity(n * n);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::BadMatrix {
                    i: ids[i],
                    j: -1,
                    reason: format!("row has {} entries, expected {n}", row.len()),
                });
            }
            m.extend_from_slice(row);
        }
        for i in 0..n {
            for j in 0..n {
                let d = m[i * n + j];
                let bad = |reason: String| Error::BadMatrix {
                    i: ids[i],
                    j: ids[j],
                    reason,
                };
                if !d.is_finite() {
                    return Err(bad("distance must be finite".into()));
                }
                if i == j && d != 0.0 {
                    return Err(bad("diagonal must be zero".into()));
                }
                if i != j && d <= 0.0 {
                    return Err(bad("distinct vertices need positive distance".into()));
                }
                if (d - m[j * n + i]).abs() > tol(d) {
                    return Err(bad("matrix is not symmetric".into()));
                }
            }
        }
        check_triangle(&ids, &m, n)?;
        let (edges, adjacency) = build_adjacency(n, &ids, &edges)?;
        for (index, e) in edges.iter().enumerate() {
            if lt(e.length, m[e.u * n + e.v]) {
                return Err(Error::BadEdge {
                    index,
                    u: ids[e.u],
                    v: ids[e.v],
                    reason: format!("edge length {} is shorter than the distance {}", e.length, m[e.u * n + e.v]),
                });
            }
        }
        Ok(Space {
            ids,
            index,
            weights,
            edges,
            adjacency,
            metric: Metric::Dense(m),
            from_matrix: true,
            has_arcs: false,
            resolution,
            scale_cap,
        })
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[i64] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> i64 {
        self.ids[v]
    }

    pub fn index_of(&self, id: i64) -> Result<usize> {
        self.index.get(&id).copied().ok_or(Error::UnknownVertex(id))
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> f64 {
        self.weights[v]
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn mass_of(&self, set: &[usize]) -> f64 {
        set.iter().map(|&v| self.weights[v]).sum()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub(crate) fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    pub fn edge_length(&self, u: usize, v: usize) -> Option<f64> {
        let list = &self.adjacency[u];
        list.binary_search_by(|probe| probe.0.cmp(&v)).ok().map(|k| list[k].1)
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn scale_cap(&self) -> f64 {
        self.scale_cap
    }

    pub fn is_matrix_form(&self) -> bool {
        self.from_matrix
    }

    /// Whether the metric was built with metric-only arcs.
    pub fn has_arcs(&self) -> bool {
        self.has_arcs
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.metric, Metric::Dense(_))
    }

    pub fn with_scales(mut self, resolution: f64, scale_cap: f64) -> Result<Space> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(invalid("resolution", "must be positive"));
        }
        if !(scale_cap > 0.0 && scale_cap.is_finite()) {
            return Err(invalid("scale_cap", "must be positive"));
        }
        self.resolution = resolution;
        self.scale_cap = scale_cap;
        Ok(self)
    }

    /// Same metric, weights multiplied pointwise by `w`.
    pub fn weighted(&self, w: &[f64]) -> Result<Space> {
        if w.len() != self.n() {
            return Err(invalid("w", format!("expected {} values, got {}", self.n(), w.len())));
        }
        if let Some(k) = w.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::BadVertex {
                id: self.ids[k],
                reason: format!("weight factor must be positive, got {}", w[k]),
            });
        }
        let mut out = self.clone();
        for (a, b) in out.weights.iter_mut().zip(w) {
            *a *= b;
        }
        Ok(out)
    }

    pub fn row(&self, x: usize) -> Row<'_> {
        match &self.metric {
            Metric::Dense(m) => {
                let n = self.n();
                Row::Borrowed(&m[x * n..(x + 1) * n])
            }
            Metric::OnDemand { arcs, cache } => {
                if let Some(r) = cache.lock().expect("row cache poisoned").rows.get(&x) {
                    return Row::Shared(r.clone());
                }
                let row: Arc<[f64]> = dijkstra(arcs, &[(x, 0.0)]).into();
                let mut c = cache.lock().expect("row cache poisoned");
                if !c.rows.contains_key(&x) {
                    c.rows.insert(x, row.clone());
                    c.order.push_back(x);
                    while c.order.len() > ROW_CACHE {
                        if let Some(old) = c.order.pop_front() {
                            c.rows.remove(&old);
                        }
                    }
                }
                Row::Shared(row)
            }
        }
    }

    pub fn dist(&self, x: usize, y: usize) -> f64 {
        match &self.metric {
            Metric::Dense(m) => m[x * self.n() + y],
            Metric::OnDemand { .. } => self.row(x)[y],
        }
    }

    /// Full matrix, row by row. Only sensible for small spaces.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|x| self.row(x).to_vec()).collect()
    }

    pub fn diameter(&self) -> f64 {
        (0..self.n())
            .map(|x| self.row(x).iter().cloned().fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    pub fn min_positive_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for x in 0..self.n() {
            for &d in self.row(x).iter() {
                if d > 0.0 && d < best {
                    best = d;
                }
            }
        }
        best
    }

    pub fn profile(&self, x: usize) -> Profile {
        let row = self.row(x);
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
        // keep the center first even when another vertex sits at distance 0
        if let Some(p) = order.iter().position(|&v| v == x) {
            order[..=p].rotate_right(1);
        }
        let dists: Vec<f64> = order.iter().map(|&v| row[v]).collect();
        let mut cum = Vec::with_capacity(order.len());
        let mut acc = 0.0;
        for &v in &order {
            acc += self.weights[v];
            cum.push(acc);
        }
        let mut levels = Vec::new();
        let mut i = 0;
        while i < dists.len() {
            let d = dists[i];
            let mut j = i + 1;
            while j < dists.len() && dists[j] - d <= tol(d) {
                j += 1;
            }
            levels.push((dists[j - 1], j));
            i = j;
        }
        Profile {
            center: x,
            order,
            dists,
            cum,
            levels,
        }
    }

    pub fn ball(&self, center: usize, r: f64) -> Result<Ball> {
        if !(r > 0.0) {
            return Err(invalid("r", format!("radius must be positive, got {r}")));
        }
        if center >= self.n() {
            return Err(invalid("center", "vertex out of range"));
        }
        let row = self.row(center);
        let mut members: Vec<usize> = (0..self.n()).filter(|&y| y == center || lt(row[y], r)).collect();
        members.sort_unstable();
        let mass = self.mass_of(&members);
        Ok(Ball {
            center,
            radius: r,
            members,
            mass,
        })
    }

    pub fn ball_mass(&self, center: usize, r: f64) -> f64 {
        let row = self.row(center);
        (0..self.n())
            .filter(|&y| y == center || lt(row[y], r))
            .map(|y| self.weights[y])
            .sum()
    }

    /// `sup μ(B(x,2r))/μ(B(x,r))` over `x ∈ along` and radii in `(0, r₀]`.
    /// Each center's critical radii (its distances and their halves) are
    /// adjoined to `radii`, which makes the supremum exact.
    pub fn doubling_constant(&self, radii: &[f64], along: &[usize]) -> Result<Doubling> {
        if along.is_empty() {
            return Err(invalid("along", "empty vertex set"));
        }
        if let Some(&r) = radii.iter().find(|r| !(**r > 0.0)) {
            return Err(invalid("radii", format!("radius must be positive, got {r}")));
        }
        let cap = self.scale_cap;
        let per: Vec<Doubling> = along
            .par_iter()
            .map(|&x| {
                let p = self.profile(x);
                let mut cands: Vec<f64> = Vec::new();
                for &(d, _) in &p.levels {
                    if d > 0.0 {
                        for r in [d, d / 2.0] {
                            if le(r, cap) {
                                cands.push(r);
                            }
                        }
                    }
                }
                cands.extend(radii.iter().copied().filter(|&r| le(r, cap)));
                cands.push(cap);
                cands.sort_by(f64::total_cmp);
                let mut best = Doubling {
                    value: 1.0,
                    center: x,
                    radius: cap,
                };
                for r in cands {
                    let ratio = p.mass_open(2.0 * r) / p.mass_open(r);
                    if ratio > best.value + tol(best.value) {
                        best = Doubling {
                            value: ratio,
                            center: x,
                            radius: r,
                        };
                    }
                }
                best
            })
            .collect();
        let mut best = per[0];
        for d in per.into_iter().skip(1) {
            if d.value > best.value + tol(best.value) {
                best = d;
            }
        }
        Ok(best)
    }

    /// Doubling constant over every vertex at every critical radius.
    pub fn measured_doubling(&self) -> f64 {
        let all: Vec<usize> = (0..self.n()).collect();
        self.doubling_constant(&[], &all).map(|d| d.value).unwrap_or(1.0)
    }

    /// `M_s f(x)`: the largest average of `|f|` over open balls of radius
    /// below `s` that contain `x`.
    pub fn maximal_function(&self, f: &[f64], s: f64) -> Result<Vec<f64>> {
        if !(s > 0.0) {
            return Err(invalid("s", format!("scale must be positive, got {s}")));
        }
        if f.len() != self.n() {
            return Err(invalid("f", "one value per vertex is required"));
        }
        let n = self.n();
        let partial: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|y| {
                let p = self.profile(y);
                let mut out = vec![0.0; n];
                // admissible prefixes: level distance strictly below s
                let mut avgs = Vec::new();
                let mut acc = 0.0;
                let mut start = 0;
                for &(d, end) in &p.levels {
                    if !lt(d, s) {
                        break;
                    }
                    for &v in &p.order[start..end] {
                        acc += self.weights[v] * f[v].abs();
                    }
                    avgs.push(acc / p.cum[end - 1]);
                    start = end;
                }
                let mut suffix = vec![0.0; avgs.len()];
                let mut m: f64 = 0.0;
                for k in (0..avgs.len()).rev() {
                    m = m.max(avgs[k]);
                    suffix[k] = m;
                }
                let mut start = 0;
                for (k, &(_, end)) in p.levels.iter().enumerate().take(avgs.len()) {
                    for &v in &p.order[start..end] {
                        out[v] = suffix[k];
                    }
                    start = end;
                }
                out
            })
            .collect();
        let mut m = vec![0.0f64; n];
        for row in partial {
            for (a, b) in m.iter_mut().zip(row) {
                *a = a.max(b);
            }
        }
        Ok(m)
    }

    /// Average of `|f − a|` over the ball; `a = None` uses the ball mean.
    pub fn mean_deviation(&self, f: &[f64], ball: &Ball, a: Option<f64>) -> f64 {
        let a = a.unwrap_or_else(|| self.average(f, &ball.members));
        let s: f64 = ball.members.iter().map(|&v| self.weights[v] * (f[v] - a).abs()).sum();
        s / ball.mass
    }

    pub fn average(&self, f: &[f64], set: &[usize]) -> f64 {
        let mass = self.mass_of(set);
        set.iter().map(|&v| self.weights[v] * f[v]).sum::<f64>() / mass
    }

    /// Smallest `L` such that every inhabited exterior annulus
    /// `B(x,r₀)\B(x,r)` forces an inhabited inner annulus `B(x,r)\B(x,r/L)`,
    /// for `x ∈ S` and radii in `(h, r₀)` with `h` the resolution.
    pub fn uniform_perfectness(&self, s: &[usize], r0: f64) -> Result<Perfectness> {
        if s.is_empty() {
            return Err(invalid("S", "empty vertex set"));
        }
        if !(r0 > 0.0) {
            return Err(invalid("r0", "must be positive"));
        }
        let h = self.resolution;
        let mut best = Perfectness::Constant {
            l: 1.0,
            center: s[0],
            radius: r0,
        };
        let mut best_l = 1.0;
        for &x in s {
            let p = self.profile(x);
            let a: Vec<f64> = p.levels.iter().map(|l| l.0).filter(|&d| d > 0.0).collect();
            if a.is_empty() {
                continue;
            }
            if lt(h, a[0]) && lt(a[0], r0) {
                return Ok(Perfectness::Fails { center: x, radius: a[0] });
            }
            for k in 1..a.len() {
                if lt(a[k], r0) && lt(h, a[k]) {
                    let l = a[k] / a[k - 1];
                    if l > best_l + tol(best_l) {
                        best_l = l;
                        best = Perfectness::Constant {
                            l,
                            center: x,
                            radius: a[k],
                        };
                    }
                }
            }
        }
        Ok(best)
    }

    /// Points of `A` whose balls of radius below `r₀` all carry at least a
    /// `1 − ε` fraction of their mass inside `A`.
    pub fn density_points(&self, a: &[usize], eps: f64, r0: f64) -> Result<Vec<usize>> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(invalid("eps", format!("must lie in (0,1), got {eps}")));
        }
        let mut in_a = vec![false; self.n()];
        for &v in a {
            in_a[v] = true;
        }
        let mut out: Vec<usize> = a
            .par_iter()
            .filter(|&&x| {
                let p = self.profile(x);
                let mut inside = 0.0;
                let mut start = 0;
                for &(d, end) in &p.levels {
                    if !lt(d, r0) {
                        break;
                    }
                    for &v in &p.order[start..end] {
                        if in_a[v] {
                            inside += self.weights[v];
                        }
                    }
                    start = end;
                    if lt(inside / p.cum[end - 1], 1.0 - eps) {
                        return false;
                    }
                }
                true
            })
            .copied()
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Every vertex at distance at most `r` from `x` (closed ball).
    pub fn closed_ball_members(&self, x: usize, r: f64) -> Vec<usize> {
        let row = self.row(x);
        (0..self.n()).filter(|&y| le(row[y], r)).collect()
    }
}

fn check_triangle(ids: &[i64], m: &[f64], n: usize) -> Result<()> {
    let fail = |a: usize, b: usize, c: usize| Error::Triangle {
        a: ids[a],
        b: ids[b],
        c: ids[c],
        dab: m[a * n + b],
        via: m[a * n + c] + m[c * n + b],
    };
    if n <= 400 {
        for a in 0..n {
            for b in (a + 1)..n {
                let dab = m[a * n + b];
                for c in 0..n {
                    if c != a && c != b && dab > m[a * n + c] + m[c * n + b] + tol(dab) {
                        return Err(fail(a, b, c));
                    }
                }
            }
        }
    } else {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7472_6961);
        for _ in 0..2_000_000 {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            let c = rng.gen_range(0..n);
            let dab = m[a * n + b];
            if dab > m[a * n + c] + m[c * n + b] + tol(dab) {
                return Err(fail(a, b, c));
            }
        }
    }
    Ok(())
}

/// Vertex-set helpers shared by the modules.
pub fn indicator(n: usize, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in set {
        m[v] = true;
    }
    m
}
