//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use piforge::corpus;
use piforge::space::{Edge, Space};

fn p5() -> Space {
    corpus::path(5).unwrap()
}

/// Every simple leg sequence from `x` to `y` within `budget`, reduced to its
/// nondominated `(len, undef)` pairs.
pub fn brute_front(s: &Space, x: usize, y: usize, e: &[bool], budget: f64) -> Vec<(f64, f64)> {
    fn go(
        s: &Space,
        at: usize,
        y: usize,
        e: &[bool],
        budget: f64,
        len: f64,
        undef: f64,
        seen: &mut Vec<bool>,
        out: &mut Vec<(f64, f64)>,
    ) {
        if at == y {
            out.push((len, undef));
            return;
        }
        for w in 0..s.n() {
            if seen[w] || (w != y && e[w]) {
                continue;
            }
            let d = s.dist(at, w);
            seen[w] = true;
            if len + d <= budget + 1e-9 {
                go(s, w, y, e, budget, len + d, undef + d, seen, out);
            }
            if let Some(l) = s.edge_length(at, w) {
                if len + l <= budget + 1e-9 {
                    go(s, w, y, e, budget, len + l, undef, seen, out);
                }
            }
            seen[w] = false;
        }
    }
    if x == y {
        return vec![(0.0, 0.0)];
    }
    let mut seen = vec![false; s.n()];
    seen[x] = true;
    let mut all = Vec::new();
    go(s, x, y, e, budget, 0.0, 0.0, &mut seen, &mut all);
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut front: Vec<(f64, f64)> = Vec::new();
    for (l, u) in all {
        if front.last().map_or(true, |f| u < f.1 - 1e-9) {
            front.push((l, u));
        }
    }
    front
}

pub fn small_spaces() -> Vec<Space> {
    let mut out = vec![
        corpus::path(2).unwrap(),
        p5(),
        corpus::path(8).unwrap(),
        corpus::cycle(6).unwrap(),
        corpus::cycle(8).unwrap(),
        corpus::star(3, 2).unwrap(),
        corpus::grid(2, 2).unwrap(),
        corpus::glued_lines(4).unwrap(),
        corpus::weighted_line(7, 0.5).unwrap(),
    ];
    for seed in 0..6 {
        out.push(corpus::random_geometric(7 + (seed as usize % 2), 0.45, seed).unwrap());
    }
    out
}

/// Least undef over all simple leg sequences within `budget`.
pub fn brute_min_undef(s: &Space, x: usize, y: usize, e: &[bool], budget: f64) -> f64 {
    brute_front(s, x, y, e, budget).last().map_or(f64::INFINITY, |f| f.1)
}

/// Worst obstacle by enumerating every subset of the other vertices; those
/// outside `B(x, Cr)` cost nothing.
pub fn brute_worst<F>(s: &Space, x: usize, y: usize, c: f64, eps: f64, inner: F) -> f64
where
    F: Fn(&[bool]) -> f64,
{
    let n = s.n();
    let r = s.dist(x, y);
    if x == y {
        return 0.0;
    }
    let ball = s.ball(x, c * r).unwrap();
    let budget = eps * ball.mass;
    let others: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << others.len()) {
        let mut e = vec![false; n];
        let mut mass = 0.0;
        for (i, &v) in others.iter().enumerate() {
            if mask >> i & 1 == 1 {
                e[v] = true;
                if ball.members.contains(&v) {
                    mass += s.weight(v);
                }
            }
        }
        if mass < budget - 1e-9 * budget.max(1.0) {
            best = best.max(inner(&e));
        }
    }
    best
}

pub fn complete_graph(n: usize) -> Space {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push(Edge { u, v, length: 1.0 });
        }
    }
    Space::from_edges((0..n as i64).collect(), vec![1.0; n], edges, 1.0, 1.0).unwrap()
}

/// Solves `min Σ a ρ²` subject to `Aρ ≥ 1` exactly by enumerating active sets.
pub fn qp_oracle(a: &[f64], rows: &[Vec<f64>]) -> f64 {
    let m = rows.len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << m) {
        let act: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        // ρ = diag(1/2a) Aᵀλ, A_S ρ = 1  ⇒  G λ = 1 with G = A_S diag(1/2a) A_Sᵀ
        let k = act.len();
        let mut g = vec![vec![0.0; k + 1]; k];
        for (i, &ri) in act.iter().enumerate() {
            for (j, &rj) in act.iter().enumerate() {
                g[i][j] = (0..a.len())
                    .filter(|&v| a[v] > 0.0)
                    .map(|v| rows[ri][v] * rows[rj][v] / (2.0 * a[v]))
                    .sum();
            }
            g[i][k] = 1.0;
        }
        let Some(lambda) = gauss(g) else { continue };
        if lambda.iter().any(|&l| l < -1e-12) {
            continue;
        }
        let rho: Vec<f64> = (0..a.len())
            .map(|v| {
                if a[v] > 0.0 {
                    act.iter().zip(&lambda).map(|(&i, l)| l * rows[i][v]).sum::<f64>() / (2.0 * a[v])
                } else {
                    0.0
                }
            })
            .collect();
        let feasible = rows.iter().all(|r| r.iter().zip(&rho).map(|(c, x)| c * x).sum::<f64>() >= 1.0 - 1e-9);
        if feasible {
            best = best.min(rho.iter().zip(a).map(|(r, av)| av * r * r).sum());
        }
    }
    best
}

pub fn gauss(mut m: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let k = m.len();
    for c in 0..k {
        let piv = (c..k).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[piv][c].abs() < 1e-12 {
            return None;
        }
        m.swap(c, piv);
        for r in 0..k {
            if r != c {
                let f = m[r][c] / m[c][c];
                for j in c..=k {
                    m[r][j] -= f * m[c][j];
                }
            }
        }
    }
    Some((0..k).map(|i| m[i][k] / m[i][i]).collect())
}

/// Trapezoid rows of every simple solid path from `x` to `y` within `budget`.
pub fn path_rows(s: &Space, x: usize, y: usize, budget: f64) -> Vec<Vec<f64>> {
    fn go(s: &Space, at: usize, y: usize, left: f64, seen: &mut Vec<bool>, row: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if at == y {
            out.push(row.clone());
            return;
        }
        for &(w, l) in s.neighbors(at) {
            if seen[w] || l > left + 1e-9 {
                continue;
            }
            seen[w] = true;
            row[at] += l / 2.0;
            row[w] += l / 2.0;
            go(s, w, y, left - l, seen, row, out);
            row[at] -= l / 2.0;
            row[w] -= l / 2.0;
            seen[w] = false;
        }
    }
    let mut seen = vec![false; s.n()];
    seen[x] = true;
    let mut out = Vec::new();
    go(s, x, y, budget, &mut seen, &mut vec![0.0; s.n()], &mut out);
    out
}
