//! Thickening a compact set `K ⊆ A ⊆ X` into `K̄ = K ∪ T`, where `T` is a
//! scale-graded tree of bridges over the gaps of `A \ K`.
//!
//! All lengths in the output are in the ambient units. Internally the scales
//! are `2^{-k}·unit` with `unit = r₀/2²⁰`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::connectivity::{verify_pair, AdversaryMode, ConnParams, Status, DEFAULT_EXHAUSTION_LIMIT};
use crate::covers::{build_gap_points_in_units, build_nets_in_units, GapPointSet, NetHierarchy};
use crate::error::{invalid, Result};
use crate::graph::dijkstra;
use crate::poincare::{pi_scan, standard_family, PoincareReport};
use crate::space::{le, lt, tol, Edge, Space};

/// The normalized value of `r₀`.
pub const RESCALED_R0: f64 = 1_048_576.0;

/// Tree edges have length `EDGE_FACTOR·(r+s)`.
pub const EDGE_FACTOR: f64 = 16.0;

/// A scale ray `n → (n,s)` is replaced by a link of cost `LINK_FACTOR·s`.
pub const LINK_FACTOR: f64 = 48.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    K,
    Net,
    Gap,
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeVertex {
    /// Ambient vertex index.
    pub location: usize,
    pub scale: f64,
    /// `scale = 2^{-level}·unit`.
    pub level: i32,
    pub kind: VertexKind,
    /// `μ(B(location, scale))` in the ambient space.
    pub ball_mass: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Link {
    /// Position of the net point in `ThickenedComplex::k`.
    pub k_index: usize,
    pub vertex: usize,
    pub length: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeSample {
    pub center: usize,
    pub radius: f64,
    pub inner_mass: f64,
    pub outer_mass: f64,
    /// `A ∩ B(x,r₀) \ B(x,r)` is nonempty.
    pub applicable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThickenedComplex {
    /// Ambient indices of `K`, ascending.
    pub k: Vec<usize>,
    pub k_ids: Vec<i64>,
    pub k_weights: Vec<f64>,
    pub r0: f64,
    pub unit: f64,
    /// Smallest retained scale.
    pub h: f64,
    /// Measured doubling constant of the ambient space.
    pub doubling: f64,
    pub nets: NetHierarchy,
    pub gaps: GapPointSet,
    /// `l(n)` for each point of `K`, parallel to `k`.
    pub lenscale: Vec<f64>,
    pub vertices: Vec<TreeVertex>,
    pub edges: Vec<TreeEdge>,
    pub links: Vec<Link>,
    /// Ambient indices that occur as `K` points or vertex locations, ascending.
    pub locations: Vec<usize>,
    pub location_dist: Vec<Vec<f64>>,
    pub volume: Vec<VolumeSample>,
    pub hypothesis: String,
}

impl ThickenedComplex {
    fn loc(&self, ambient: usize) -> usize {
        self.locations.binary_search(&ambient).expect("location is tabulated")
    }

    /// Ambient distance between two tabulated locations.
    pub fn ambient_dist(&self, a: usize, b: usize) -> f64 {
        self.location_dist[self.loc(a)][self.loc(b)]
    }

    pub fn incident(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.a].push(i);
            out[e.b].push(i);
        }
        out
    }

    pub fn total_tree_mass(&self) -> f64 {
        self.edges.iter().map(|e| e.mass).sum()
    }
}

fn sorted_unique(set: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(&bad) = v.iter().find(|&&x| x >= n) {
        return Err(invalid("K", format!("vertex index {bad} is outside the space")));
    }
    Ok(v)
}

/// Builds the complex. Scales below `h` are truncated; each net point is
/// linked to every one of its retained scale vertices.
pub fn thicken(space: &Space, a: &[usize], k: &[usize], r0: f64, h: f64) -> Result<ThickenedComplex> {
    if k.is_empty() {
        return Err(invalid("K", "empty vertex set"));
    }
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(invalid("r0", format!("must be positive, got {r0}")));
    }
    let a = sorted_unique(a, space.n())?;
    let k = sorted_unique(k, space.n())?;
    if let Some(&bad) = k.iter().find(|v| a.binary_search(v).is_err()) {
        return Err(invalid("K", format!("vertex {} lies in K but not in A", space.id(bad))));
    }
    let unit = r0 / RESCALED_R0;
    if !(h > 0.0 && h <= unit) {
        return Err(invalid("h", format!("need 0 < h ≤ r₀/2²⁰ = {unit}, got {h}")));
    }
    let doubling = space.measured_doubling();

    let min_sep = k
        .iter()
        .flat_map(|&x| {
            let row = space.row(x);
            k.iter().filter(move |&&y| y != x).map(move |&y| row[y]).collect::<Vec<_>>()
        })
        .fold(f64::INFINITY, f64::min);
    let finest = if min_sep.is_finite() { min_sep.min(h) } else { h };
    let j_max = (unit / finest).log2().ceil().max(0.0) as usize + 1;
    let nets = build_nets_in_units(space, &k, j_max, unit)?;
    let gaps = build_gap_points_in_units(space, &k, &a, h, unit)?;

    let scale = |level: i32| 2f64.powi(-level) * unit;
    let ball_mass = |x: usize, r: f64| space.ball_mass(x, r);

    // l(n)
    let mut lenscale = vec![0.0; k.len()];
    let mut len_level: Vec<Option<i32>> = vec![None; k.len()];
    for (i, &n) in k.iter().enumerate() {
        let sc_n = nets.scale(n).expect("every point of K is a net point");
        let row = space.row(n);
        for g in &gaps.points {
            let sg = scale(g.k);
            if le(row[g.vertex], 16.0 * sg) && le(sg, sc_n) && sg > lenscale[i] {
                lenscale[i] = sg;
                len_level[i] = Some(g.k);
            }
        }
    }

    let mut vertices = Vec::new();
    for g in &gaps.points {
        let r = scale(g.k);
        vertices.push(TreeVertex {
            location: g.vertex,
            scale: r,
            level: g.k,
            kind: VertexKind::Gap,
            ball_mass: ball_mass(g.vertex, r),
        });
    }
    let mut links = Vec::new();
    for (i, &n) in k.iter().enumerate() {
        let Some(top) = len_level[i] else { continue };
        let mut level = top;
        while le(h, scale(level)) {
            let r = scale(level);
            links.push(Link {
                k_index: i,
                vertex: vertices.len(),
                length: LINK_FACTOR * r,
            });
            vertices.push(TreeVertex {
                location: n,
                scale: r,
                level,
                kind: VertexKind::Net,
                ball_mass: ball_mass(n, r),
            });
            level += 1;
        }
    }

    let mut edges = Vec::new();
    for i in 0..vertices.len() {
        let (x, r) = (vertices[i].location, vertices[i].scale);
        let row = space.row(x);
        for j in (i + 1)..vertices.len() {
            let (y, s) = (vertices[j].location, vertices[j].scale);
            let ratio = r / s;
            if le(row[y], EDGE_FACTOR * (r + s)) && le(0.5, ratio) && le(ratio, 2.0) {
                edges.push(TreeEdge {
                    a: i,
                    b: j,
                    length: EDGE_FACTOR * (r + s),
                    mass: vertices[i].ball_mass + vertices[j].ball_mass,
                });
            }
        }
    }

    let mut locations: Vec<usize> = k.iter().copied().chain(gaps.points.iter().map(|g| g.vertex)).collect();
    locations.sort_unstable();
    locations.dedup();
    let location_dist: Vec<Vec<f64>> = locations
        .iter()
        .map(|&x| {
            let row = space.row(x);
            locations.iter().map(|&y| row[y]).collect()
        })
        .collect();

    let mut volume = Vec::new();
    let floor = h.max(4.0 * space.resolution());
    for &x in &k {
        let row = space.row(x);
        let reach = a.iter().map(|&y| row[y]).filter(|&d| d < r0).fold(0.0, f64::max);
        let mut level = 0;
        while le(floor, scale(level)) {
            let r = scale(level);
            volume.push(VolumeSample {
                center: x,
                radius: r,
                inner_mass: ball_mass(x, r / 2.0),
                outer_mass: ball_mass(x, r),
                applicable: !lt(reach, r),
            });
            level += 1;
        }
    }

    Ok(ThickenedComplex {
        k_ids: k.iter().map(|&v| space.id(v)).collect(),
        k_weights: k.iter().map(|&v| space.weight(v)).collect(),
        k,
        r0,
        unit,
        h,
        doubling,
        nets,
        gaps,
        lenscale,
        vertices,
        edges,
        links,
        locations,
        location_dist,
        volume,
        hypothesis: "A is (C, 2^-60, ε, r₀)-connected along K: assumed, not checked".into(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GluedMetric {
    /// Nodes `0..|K|` are the points of `K`; node `|K| + i` is vertex `i`.
    pub k_count: usize,
    pub dist: Vec<Vec<f64>>,
    /// Tree vertices with no finite route to `K`.
    pub unreachable: Vec<usize>,
}

impl GluedMetric {
    pub fn k_node(&self, i: usize) -> usize {
        i
    }

    pub fn vertex_node(&self, v: usize) -> usize {
        self.k_count + v
    }
}

/// `d̄` on `K ∪ V`: shortest paths whose steps are `K–K` moves at ambient
/// distance, tree edges at `|e|`, and links `n–(n,s)` at `48s`.
pub fn glued_metric(complex: &ThickenedComplex) -> GluedMetric {
    let kc = complex.k.len();
    let n = kc + complex.vertices.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..kc {
        for j in (i + 1)..kc {
            let d = complex.ambient_dist(complex.k[i], complex.k[j]);
            adj[i].push((j, d));
            adj[j].push((i, d));
        }
    }
    for e in &complex.edges {
        adj[kc + e.a].push((kc + e.b, e.length));
        adj[kc + e.b].push((kc + e.a, e.length));
    }
    for l in &complex.links {
        adj[l.k_index].push((kc + l.vertex, l.length));
        adj[kc + l.vertex].push((l.k_index, l.length));
    }
    let dist: Vec<Vec<f64>> = (0..n).map(|s| dijkstra(&adj, &[(s, 0.0)])).collect();
    let unreachable = (0..complex.vertices.len())
        .filter(|&v| (0..kc).all(|i| !dist[kc + v][i].is_finite()))
        .collect();
    GluedMetric {
        k_count: kc,
        dist,
        unreachable,
    }
}

#[derive(Clone, Debug)]
pub struct GluedSpace {
    pub space: Space,
    /// Node of each point of `K`, parallel to `ThickenedComplex::k`.
    pub k_nodes: Vec<usize>,
    /// Node of each tree vertex.
    pub vertex_nodes: Vec<usize>,
    pub segment: f64,
}

/// Discretizes `K̄`: each tree edge becomes a chain of `⌈|e|/h⌉` equal
/// segments whose masses `mass(e)/segments` are split evenly between the
/// two segment endpoints. Points of `K` keep `μ|_K`, `K–K` distances enter
/// as metric-only arcs and the lowest link of each scale ray is a solid edge.
pub fn glued_measure(complex: &ThickenedComplex, h: f64) -> Result<GluedSpace> {
    let min_edge = complex.edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min);
    if !(h > 0.0) || (min_edge.is_finite() && !le(h, min_edge / 2.0)) {
        return Err(invalid("h", format!("need 0 < h ≤ min|e|/2 = {}, got {h}", min_edge / 2.0)));
    }
    let kc = complex.k.len();
    let mut weights: Vec<f64> = complex.k_weights.clone();
    let mut ids: Vec<i64> = complex.k_ids.clone();
    let mut next_id = ids.iter().copied().max().unwrap_or(0).max(-1) + 1;
    let mut fresh = |ids: &mut Vec<i64>, weights: &mut Vec<f64>, w: f64| {
        ids.push(next_id);
        next_id += 1;
        weights.push(w);
        ids.len() - 1
    };
    let vertex_nodes: Vec<usize> = (0..complex.vertices.len())
        .map(|_| fresh(&mut ids, &mut weights, 0.0))
        .collect();
    let mut edges = Vec::new();
    for e in &complex.edges {
        let m = (e.length / h - 1e-9).ceil().max(1.0) as usize;
        let seg = e.length / m as f64;
        let share = e.mass / m as f64 / 2.0;
        let mut prev = vertex_nodes[e.a];
        weights[prev] += share;
        for _ in 1..m {
            let node = fresh(&mut ids, &mut weights, 2.0 * share);
            edges.push(Edge {
                u: prev,
                v: node,
                length: seg,
            });
            prev = node;
        }
        edges.push(Edge {
            u: prev,
            v: vertex_nodes[e.b],
            length: seg,
        });
        weights[vertex_nodes[e.b]] += share;
    }
    let mut lowest: Vec<Option<&Link>> = vec![None; kc];
    for l in &complex.links {
        let cur = &mut lowest[l.k_index];
        if cur.map_or(true, |c| l.length < c.length) {
            *cur = Some(l);
        }
    }
    for l in lowest.into_iter().flatten() {
        edges.push(Edge {
            u: l.k_index,
            v: vertex_nodes[l.vertex],
            length: l.length,
        });
    }
    let mut arcs = Vec::new();
    for i in 0..kc {
        for j in (i + 1)..kc {
            arcs.push(Edge {
                u: i,
                v: j,
                length: complex.ambient_dist(complex.k[i], complex.k[j]),
            });
        }
    }
    // isolated tree vertices (no edges) still need mass
    for &v in &vertex_nodes {
        if weights[v] == 0.0 {
            return Err(invalid(
                "complex",
                format!("tree vertex node {} has no incident edge", ids[v]),
            ));
        }
    }
    let min_k = arcs.iter().map(|a| a.length).fold(f64::INFINITY, f64::min);
    let resolution = edges.iter().map(|e| e.length).chain([min_k]).fold(f64::INFINITY, f64::min);
    let resolution = if resolution.is_finite() { resolution } else { 1.0 };
    let s = Space::from_graph_with_arcs(ids, weights, edges, arcs, resolution, 1.0)?;
    let diam = s.diameter().max(resolution);
    let space = s.with_scales(resolution, diam)?;
    Ok(GluedSpace {
        space,
        k_nodes: (0..kc).collect(),
        vertex_nodes,
        segment: h,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateStatus {
    Pass,
    Fail,
    Vacuous,
    ByConstruction,
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateEntry {
    pub id: String,
    pub status: EstimateStatus,
    pub checked: usize,
    pub failures: usize,
    /// Least `rhs − lhs` over the checked instances.
    pub worst_margin: f64,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub entries: Vec<EstimateEntry>,
    pub all_pass: bool,
}

impl EstimateReport {
    pub fn get(&self, id: &str) -> Option<&EstimateEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

struct Tally {
    id: &'static str,
    checked: usize,
    failures: usize,
    worst: f64,
    witness: Option<String>,
}

impl Tally {
    fn new(id: &'static str) -> Tally {
        Tally {
            id,
            checked: 0,
            failures: 0,
            worst: f64::INFINITY,
            witness: None,
        }
    }

    /// Records `lhs ≤ rhs` with a relative tolerance.
    fn check(&mut self, lhs: f64, rhs: f64, what: impl FnOnce() -> String) {
        self.checked += 1;
        let margin = rhs - lhs;
        let failed = lt(rhs, lhs) && (lhs - rhs) > tol(lhs.abs().max(rhs.abs()));
        if failed {
            self.failures += 1;
        }
        if margin < self.worst || (failed && self.failures == 1) {
            self.worst = self.worst.min(margin);
            self.witness = Some(what());
        }
    }

    fn finish(self) -> EstimateEntry {
        let status = if self.checked == 0 {
            EstimateStatus::Vacuous
        } else if self.failures == 0 {
            EstimateStatus::Pass
        } else {
            EstimateStatus::Fail
        };
        EstimateEntry {
            id: self.id.into(),
            status,
            checked: self.checked,
            failures: self.failures,
            worst_margin: if self.checked == 0 { 0.0 } else { self.worst },
            witness: self.witness,
        }
    }
}

fn structural(id: &str) -> EstimateEntry {
    EstimateEntry {
        id: id.into(),
        status: EstimateStatus::ByConstruction,
        checked: 0,
        failures: 0,
        worst_margin: 0.0,
        witness: None,
    }
}

/// Checks the estimates on `K̄` with explicit margins. Estimate 5 is checked
/// with the upper bound `d(x,y) + 2⁸·max(r,s)`. Upper bounds on `d̄` carry
/// the truncation allowance `48h`: below `h` a scale ray is cut short and
/// its remaining descent is paid by a single link.
pub fn verify_estimates(complex: &ThickenedComplex, metric: &GluedMetric) -> EstimateReport {
    let kc = complex.k.len();
    let v = &complex.vertices;
    let d_ = complex.doubling;
    let dbar = |a: usize, b: usize| metric.dist[a][b];
    let vname = |i: usize| format!("(#{}, {})", v[i].location, v[i].scale);
    let slack = LINK_FACTOR * complex.h;
    let mut entries = Vec::new();

    let mut e1 = Tally::new("1");
    for i in 0..kc {
        for j in (i + 1)..kc {
            let d = complex.ambient_dist(complex.k[i], complex.k[j]);
            let got = dbar(i, j);
            e1.check((got - d).abs(), 0.0, || format!("K points #{i}, #{j}: d̄ = {got}, d = {d}"));
        }
    }
    entries.push(e1.finish());
    entries.push(structural("2"));

    let mut e3 = Tally::new("3");
    for i in 0..v.len() {
        let best = (0..kc).map(|n| dbar(kc + i, n)).fold(f64::INFINITY, f64::min);
        e3.check(best, 64.0 * v[i].scale + slack, || format!("vertex {}", vname(i)));
    }
    entries.push(e3.finish());

    let mut e4 = Tally::new("4");
    for i in 0..v.len() {
        for (j, &y) in complex.k.iter().enumerate() {
            let d = complex.ambient_dist(v[i].location, y);
            let got = dbar(kc + i, j);
            let r = v[i].scale;
            e4.check(r.max(d), got, || format!("vertex {} to K point #{j}: lower", vname(i)));
            e4.check(got, d + 256.0 * r + slack, || format!("vertex {} to K point #{j}: upper", vname(i)));
        }
    }
    entries.push(e4.finish());

    let mut e5 = Tally::new("5");
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            let d = complex.ambient_dist(v[i].location, v[j].location);
            let got = dbar(kc + i, kc + j);
            let (r, s) = (v[i].scale, v[j].scale);
            e5.check(d.max(r + s), got, || format!("{} to {}: lower", vname(i), vname(j)));
            e5.check(got, d + 256.0 * r.max(s) + slack, || format!("{} to {}: upper", vname(i), vname(j)));
        }
    }
    entries.push(e5.finish());
    entries.push(structural("6"));

    let incident = complex.incident();
    let mut e7 = Tally::new("7");
    for (i, inc) in incident.iter().enumerate() {
        for &ei in inc {
            let e = &complex.edges[ei];
            let r = v[i].scale;
            e7.check(e.length, 128.0 * r, || format!("edge #{ei} at {}: length", vname(i)));
            e7.check(v[i].ball_mass, e.mass, || format!("edge #{ei} at {}: mass below", vname(i)));
            e7.check(e.mass, 2.0 * d_.powi(7) * v[i].ball_mass, || {
                format!("edge #{ei} at {}: mass above", vname(i))
            });
        }
    }
    entries.push(e7.finish());

    let mut e8 = Tally::new("8");
    let bound8 = 2f64.powi(20) * d_.powi(37);
    for (ki, _) in complex.k.iter().enumerate() {
        let mut ray: Vec<usize> = complex.links.iter().filter(|l| l.k_index == ki).map(|l| l.vertex).collect();
        ray.sort_by(|&a, &b| v[a].scale.total_cmp(&v[b].scale));
        let mut acc = 0.0;
        for &vi in &ray {
            acc += incident[vi].iter().map(|&ei| complex.edges[ei].mass).sum::<f64>();
            e8.check(acc, bound8 * v[vi].ball_mass, || format!("ray of K point #{ki} at {}", vname(vi)));
        }
    }
    entries.push(e8.finish());

    let mut e9 = Tally::new("9");
    let mut fibers: std::collections::BTreeMap<usize, usize> = Default::default();
    for (ki, &n) in complex.k.iter().enumerate() {
        let l = complex.lenscale[ki];
        if l == 0.0 {
            continue;
        }
        let target = complex
            .gaps
            .points
            .iter()
            .filter(|g| (2f64.powi(-g.k) * complex.unit - l).abs() <= tol(l))
            .filter(|g| le(complex.ambient_dist(g.vertex, n), 16.0 * l))
            .min_by_key(|g| g.vertex);
        match target {
            Some(g) => {
                *fibers.entry(g.vertex).or_default() += 1;
                e9.check(complex.ambient_dist(g.vertex, n), 16.0 * l, || format!("K point #{ki}"));
            }
            None => e9.check(1.0, 0.0, || format!("K point #{ki}: no gap point at scale l(n)")),
        }
    }
    for (g, count) in fibers {
        e9.check(count as f64, d_.powi(25), || format!("fiber over gap point {g}"));
    }
    entries.push(e9.finish());

    let mut ec = Tally::new("edge_count");
    for (i, inc) in incident.iter().enumerate() {
        ec.check(inc.len() as f64, 4.0 * d_.powi(25), || format!("vertex {}", vname(i)));
    }
    entries.push(ec.finish());

    let mut vol = Tally::new("volume");
    let sigma = 1.0 / d_.powi(4);
    for s in complex.volume.iter().filter(|s| s.applicable) {
        vol.check(s.inner_mass, (1.0 - sigma) * s.outer_mass, || {
            format!("center {} radius {}", s.center, s.radius)
        });
    }
    entries.push(vol.finish());

    let mut rules = Tally::new("edge_rules");
    for (ei, e) in complex.edges.iter().enumerate() {
        let (a, b) = (&v[e.a], &v[e.b]);
        let d = complex.ambient_dist(a.location, b.location);
        rules.check(d, EDGE_FACTOR * (a.scale + b.scale), || format!("edge #{ei}: distance"));
        let ratio = a.scale / b.scale;
        rules.check(0.5, ratio, || format!("edge #{ei}: ratio"));
        rules.check(ratio, 2.0, || format!("edge #{ei}: ratio"));
        rules.check((e.length - EDGE_FACTOR * (a.scale + b.scale)).abs(), 0.0, || format!("edge #{ei}: length"));
        rules.check((e.mass - a.ball_mass - b.ball_mass).abs(), 0.0, || format!("edge #{ei}: mass"));
    }
    entries.push(rules.finish());

    let mut reach = Tally::new("completeness");
    for i in 0..v.len() {
        let unreachable = if metric.unreachable.contains(&i) { 1.0 } else { 0.0 };
        reach.check(unreachable, 0.0, || format!("vertex {} has no route to K", vname(i)));
    }
    entries.push(reach.finish());

    let all_pass = entries.iter().all(|e| e.status != EstimateStatus::Fail);
    EstimateReport { entries, all_pass }
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub p_grid: Vec<f64>,
    pub pairs: usize,
    pub params: ConnParams,
    /// Pairs whose ball `B(x, C·d)` has at most this many members also run
    /// the exact adversary.
    pub exact_ball_limit: usize,
    /// Pairs whose ball has more members than this are skipped.
    pub greedy_ball_limit: usize,
    /// Doubling is measured at every node up to this many nodes, otherwise
    /// at the structural nodes plus a random sample of this size.
    pub doubling_centers: usize,
    pub pi_centers: usize,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            p_grid: vec![2.0],
            pairs: 12,
            params: ConnParams {
                c: 4.0,
                delta: 0.5,
                eps: 0.05,
            },
            exact_ball_limit: 14,
            greedy_ball_limit: 300,
            doubling_centers: 2000,
            pi_centers: 200,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairOutcome {
    pub x: i64,
    pub y: i64,
    pub greedy: Status,
    pub exact: Option<Status>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThickenedCertificate {
    pub nodes: usize,
    pub doubling: f64,
    pub doubling_centers: usize,
    pub doubling_sampled: bool,
    /// `log₂` of the global bound `2²⁰⁰ D⁵⁰⁰`.
    pub log2_global_bound: f64,
    pub within_global_bound: bool,
    pub pairs: Vec<PairOutcome>,
    /// Sampled pairs dropped for exceeding `greedy_ball_limit`.
    pub skipped_pairs: usize,
    pub refuted: usize,
    pub pi: Vec<PoincareReport>,
}

/// Empirical certificates on the glued space: doubling, obstacle games and
/// Poincaré scans.
pub fn certify_thickened(
    complex: &ThickenedComplex,
    glued: &GluedSpace,
    opts: &CertifyOptions,
) -> Result<ThickenedCertificate> {
    let s = &glued.space;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let structural: Vec<usize> = glued.k_nodes.iter().chain(&glued.vertex_nodes).copied().collect();
    let sample = |rng: &mut ChaCha8Rng, limit: usize| -> (Vec<usize>, bool) {
        if s.n() <= limit {
            return ((0..s.n()).collect(), false);
        }
        let mut rest: Vec<usize> = (structural.len()..s.n()).collect();
        rest.shuffle(rng);
        rest.truncate(limit);
        let mut c = structural.clone();
        c.extend(rest);
        c.sort_unstable();
        c.dedup();
        (c, true)
    };
    let (centers, sampled) = sample(&mut rng, opts.doubling_centers);
    let doubling = s.doubling_constant(&[], &centers)?.value;
    let log2_bound = 200.0 + 500.0 * complex.doubling.max(1.0).log2();

    let mut pairs = Vec::new();
    let mut refuted = 0;
    let mut skipped = 0;
    let mut tries = 0;
    while pairs.len() < opts.pairs && tries < 50 * opts.pairs.max(1) {
        tries += 1;
        let x = *structural.choose(&mut rng).expect("K is nonempty");
        let y = *structural.choose(&mut rng).expect("K is nonempty");
        if x == y || !le(s.dist(x, y), s.scale_cap()) {
            continue;
        }
        let ball = s.ball(x, opts.params.c * s.dist(x, y))?;
        if ball.members.len() > opts.greedy_ball_limit {
            skipped += 1;
            continue;
        }
        let greedy = verify_pair(s, x, y, opts.params, AdversaryMode::Greedy, DEFAULT_EXHAUSTION_LIMIT)?.status;
        let exact = if ball.members.len() <= opts.exact_ball_limit {
            Some(verify_pair(s, x, y, opts.params, AdversaryMode::Exact, DEFAULT_EXHAUSTION_LIMIT)?.status)
        } else {
            None
        };
        if greedy == Status::Refuted || exact == Some(Status::Refuted) {
            refuted += 1;
        }
        pairs.push(PairOutcome {
            x: s.id(x),
            y: s.id(y),
            greedy,
            exact,
        });
    }

    let (pi_centers, _) = sample(&mut rng, opts.pi_centers);
    let family = standard_family(s, 4, opts.seed);
    let mut radii = Vec::new();
    let mut r = s.diameter() / 2.0;
    while r >= 2.0 * s.resolution() && radii.len() < 6 {
        radii.push(r);
        r /= 4.0;
    }
    if radii.is_empty() {
        radii.push(s.diameter().max(s.resolution()));
    }
    let pi = opts
        .p_grid
        .iter()
        .map(|&p| pi_scan(s, p, 1.0, &family, &radii, Some(&pi_centers)))
        .collect::<Result<Vec<_>>>()?;

    Ok(ThickenedCertificate {
        nodes: s.n(),
        doubling,
        doubling_centers: centers.len(),
        doubling_sampled: sampled,
        log2_global_bound: log2_bound,
        within_global_bound: doubling.log2() <= log2_bound,
        pairs,
        skipped_pairs: skipped,
        refuted,
        pi,
    })
}
