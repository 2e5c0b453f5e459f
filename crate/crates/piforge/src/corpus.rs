//! Canonical example spaces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::space::{Edge, Space};

/// A generated space, plus the designated subsets for generators that
/// produce a triple.
#[derive(Clone, Debug)]
pub struct Generated {
    pub space: Space,
    pub a: Option<Vec<usize>>,
    pub k: Option<Vec<usize>>,
}

impl From<Space> for Generated {
    fn from(space: Space) -> Self {
        Generated { space, a: None, k: None }
    }
}

fn unit_graph(n: usize, edges: Vec<(usize, usize)>) -> Result<Space> {
    let ids = (0..n as i64).collect();
    let weights = vec![1.0; n];
    let edges = edges
        .into_iter()
        .map(|(u, v)| Edge { u, v, length: 1.0 })
        .collect();
    let s = Space::from_edges(ids, weights, edges, 1.0, 1.0)?;
    let diam = s.diameter().max(1.0);
    s.with_scales(1.0, diam)
}

/// Path with `n` vertices, unit edges and unit weights.
pub fn path(n: usize) -> Result<Space> {
    if n == 0 {
        return Err(invalid("n", "path needs at least one vertex"));
    }
    unit_graph(n, (1..n).map(|i| (i - 1, i)).collect())
}

/// `n × n` grid graph for `dim = 2`, path for `dim = 1`.
pub fn grid(n: usize, dim: usize) -> Result<Space> {
    match dim {
        1 => path(n),
        2 => {
            if n == 0 {
                return Err(invalid("n", "grid needs at least one vertex per side"));
            }
            let mut edges = Vec::new();
            for r in 0..n {
                for c in 0..n {
                    let v = r * n + c;
                    if c + 1 < n {
                        edges.push((v, v + 1));
                    }
                    if r + 1 < n {
                        edges.push((v, v + n));
                    }
                }
            }
            unit_graph(n * n, edges)
        }
        _ => Err(invalid("dim", format!("grid supports dim 1 or 2, got {dim}"))),
    }
}

pub fn cycle(n: usize) -> Result<Space> {
    if n < 3 {
        return Err(invalid("n", "cycle needs at least three vertices"));
    }
    unit_graph(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
}

/// Center 0 with `rays` paths of `len` vertices each.
pub fn star(rays: usize, len: usize) -> Result<Space> {
    if rays == 0 || len == 0 {
        return Err(invalid("rays", "star needs at least one ray of positive length"));
    }
    let mut edges = Vec::new();
    for r in 0..rays {
        let base = 1 + r * len;
        edges.push((0, base));
        for i in 1..len {
            edges.push((base + i - 1, base + i));
        }
    }
    unit_graph(1 + rays * len, edges)
}

/// Two copies of `P_n` sharing their vertex 0. Vertex 0 is the junction,
/// `1..n` the first arm and `n..2n−1` the second.
pub fn glued_lines(n: usize) -> Result<Space> {
    if n < 2 {
        return Err(invalid("n", "each line needs at least two vertices"));
    }
    let mut edges = vec![(0, 1), (0, n)];
    for i in 2..n {
        edges.push((i - 1, i));
        edges.push((n + i - 2, n + i - 1));
    }
    unit_graph(2 * n - 1, edges)
}

/// `n` equally spaced points of `[−1, 1]` with weights `max(|x|, 0.05)^a`.
pub fn weighted_line(n: usize, a: f64) -> Result<Space> {
    if n < 2 {
        return Err(invalid("n", "line needs at least two points"));
    }
    if !a.is_finite() {
        return Err(invalid("a", "exponent must be finite"));
    }
    let step = 2.0 / (n - 1) as f64;
    let xs = line_points(n);
    let weights = xs.iter().map(|x| x.abs().max(0.05).powf(a)).collect();
    let edges = (1..n).map(|i| Edge { u: i - 1, v: i, length: step }).collect();
    Space::from_edges((0..n as i64).collect(), weights, edges, step, 2.0)
}

/// Coordinates used by [`weighted_line`].
pub fn line_points(n: usize) -> Vec<f64> {
    let step = 2.0 / (n - 1) as f64;
    (0..n).map(|i| -1.0 + i as f64 * step).collect()
}

/// Discrete fat Cantor set inside a grid path. Level `k` (1-based) removes a
/// run of `2^(depth−k)` grid points from the middle of every remaining
/// interval; the surviving intervals have two points each. The grid step is
/// the largest power of two that fits the whole grid into `[0, 1)`, so all
/// distances are exact dyadic rationals. Returns `X`, with `A = X` and `K` the
/// surviving points.
pub fn fat_cantor(depth: usize) -> Result<Generated> {
    if depth == 0 || depth > 8 {
        return Err(invalid("depth", format!("fat_cantor supports depth 1..=8, got {depth}")));
    }
    fn build(level: usize, depth: usize, out: &mut Vec<bool>) {
        if level > depth {
            out.extend([true, true]);
            return;
        }
        build(level + 1, depth, out);
        out.extend(std::iter::repeat(false).take(1 << (depth - level)));
        build(level + 1, depth, out);
    }
    let mut in_k = Vec::new();
    build(1, depth, &mut in_k);
    let n = in_k.len();
    let exp = (usize::BITS - (n - 1).leading_zeros()) as i32;
    let step = 2f64.powi(-exp);
    let edges = (1..n).map(|i| Edge { u: i - 1, v: i, length: step }).collect();
    let space = Space::from_edges((0..n as i64).collect(), vec![step; n], edges, step, 1.0)?;
    let k: Vec<usize> = (0..n).filter(|&i| in_k[i]).collect();
    Ok(Generated {
        a: Some((0..n).collect()),
        k: Some(k),
        space,
    })
}

/// `n` uniform points in the unit square joined when closer than `radius`,
/// plus minimum-spanning-tree edges so the graph is connected.
pub fn random_geometric(n: usize, radius: f64, seed: u64) -> Result<Space> {
    if n == 0 {
        return Err(invalid("n", "need at least one point"));
    }
    if !(radius > 0.0) {
        return Err(invalid("radius", "must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
    let euclid = |i: usize, j: usize| ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt();
    let mut chosen = std::collections::BTreeSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if euclid(i, j) < radius {
                chosen.insert((i, j));
            }
        }
    }
    // Prim's algorithm on the complete Euclidean graph
    let mut in_tree = vec![false; n];
    let mut best = vec![(f64::INFINITY, 0usize); n];
    in_tree[0] = true;
    for j in 1..n {
        best[j] = (euclid(0, j), 0);
    }
    for _ in 1..n {
        let (j, _) = (0..n)
            .filter(|&j| !in_tree[j])
            .map(|j| (j, best[j].0))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("vertices remain");
        in_tree[j] = true;
        let p = best[j].1;
        chosen.insert((p.min(j), p.max(j)));
        for k in 0..n {
            if !in_tree[k] && euclid(j, k) < best[k].0 {
                best[k] = (euclid(j, k), j);
            }
        }
    }
    let edges: Vec<Edge> = chosen
        .into_iter()
        .map(|(u, v)| Edge { u, v, length: euclid(u, v) })
        .collect();
    let res = edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min);
    let res = if res.is_finite() { res } else { 1.0 };
    let s = Space::from_edges((0..n as i64).collect(), vec![1.0; n], edges, res, 1.0)?;
    let diam = s.diameter().max(res);
    s.with_scales(res, diam)
}

fn parse_args(spec: &str, raw: &str, count: usize) -> Result<Vec<f64>> {
    let parts: Vec<&str> = if raw.is_empty() { Vec::new() } else { raw.split(',').collect() };
    if parts.len() != count {
        return Err(invalid("space", format!("`{spec}` expects {count} parameter(s)")));
    }
    parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| invalid("space", format!("`{spec}`: cannot parse `{p}`")))
        })
        .collect()
}

fn as_count(x: f64, spec: &str) -> Result<usize> {
    if x >= 0.0 && x.fract() == 0.0 && x < 1e9 {
        Ok(x as usize)
    } else {
        Err(invalid("space", format!("`{spec}` expects a nonnegative integer, got {x}")))
    }
}

/// Builds a space from a generator spec such as `path:5`, `grid:4,2`,
/// `star:3,4`, `weighted_line:21,0.5`, `fat_cantor:3` or
/// `random_geometric:30,0.3,7`.
pub fn generate(spec: &str) -> Result<Generated> {
    let (name, raw) = spec.split_once(':').unwrap_or((spec, ""));
    let g: Generated = match name {
        "path" => path(as_count(parse_args(spec, raw, 1)?[0], spec)?)?.into(),
        "cycle" => cycle(as_count(parse_args(spec, raw, 1)?[0], spec)?)?.into(),
        "glued_lines" => glued_lines(as_count(parse_args(spec, raw, 1)?[0], spec)?)?.into(),
        "grid" => {
            let a = parse_args(spec, raw, 2)?;
            grid(as_count(a[0], spec)?, as_count(a[1], spec)?)?.into()
        }
        "star" => {
            let a = parse_args(spec, raw, 2)?;
            star(as_count(a[0], spec)?, as_count(a[1], spec)?)?.into()
        }
        "weighted_line" => {
            let a = parse_args(spec, raw, 2)?;
            weighted_line(as_count(a[0], spec)?, a[1])?.into()
        }
        "fat_cantor" => fat_cantor(as_count(parse_args(spec, raw, 1)?[0], spec)?)?,
        "random_geometric" => {
            let a = parse_args(spec, raw, 3)?;
            random_geometric(as_count(a[0], spec)?, a[1], as_count(a[2], spec)? as u64)?.into()
        }
        other => return Err(Error::UnknownGenerator(other.to_string())),
    };
    Ok(g)
}
