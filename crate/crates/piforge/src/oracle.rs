//! Brute-force cross-checks of the fragment search and the exact adversary
//! on small spaces.

use serde::Serialize;

use crate::connectivity::worst_obstacle;
use crate::error::{invalid, Result};
use crate::fragments::{pareto_fragments, SearchOptions};
use crate::space::{tol, Space};

/// Largest space the enumeration accepts.
pub const MAX_ORACLE_VERTICES: usize = 10;

/// Nondominated `(len, undef)` pairs over every simple leg sequence from
/// `x` to `y` of length `≤ budget` avoiding `obstacle` in its interior.
pub fn brute_front(space: &Space, x: usize, y: usize, obstacle: &[bool], budget: f64) -> Vec<(f64, f64)> {
    struct Walk<'a> {
        space: &'a Space,
        y: usize,
        obstacle: &'a [bool],
        budget: f64,
        seen: Vec<bool>,
        out: Vec<(f64, f64)>,
    }
    fn go(w: &mut Walk, at: usize, len: f64, undef: f64) {
        if at == w.y {
            w.out.push((len, undef));
            return;
        }
        let slack = tol(w.budget);
        for v in 0..w.space.n() {
            if w.seen[v] || (v != w.y && w.obstacle[v]) {
                continue;
            }
            w.seen[v] = true;
            let d = w.space.dist(at, v);
            if len + d <= w.budget + slack {
                go(w, v, len + d, undef + d);
            }
            if let Some(l) = w.space.edge_length(at, v) {
                if len + l <= w.budget + slack {
                    go(w, v, len + l, undef);
                }
            }
            w.seen[v] = false;
        }
    }
    if x == y {
        return vec![(0.0, 0.0)];
    }
    let mut walk = Walk {
        space,
        y,
        obstacle,
        budget,
        seen: vec![false; space.n()],
        out: Vec::new(),
    };
    walk.seen[x] = true;
    go(&mut walk, x, 0.0, 0.0);
    let mut all = walk.out;
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut front: Vec<(f64, f64)> = Vec::new();
    for (l, u) in all {
        if front.last().map_or(true, |f| u < f.1 - tol(budget)) {
            front.push((l, u));
        }
    }
    front
}

/// Worst least-undef over every obstacle of mass `< ε·μ(B(x, C·d(x,y)))`,
/// by enumerating all subsets of the ball.
pub fn brute_worst_undef(space: &Space, x: usize, y: usize, c: f64, eps: f64) -> Result<f64> {
    if x == y {
        return Ok(0.0);
    }
    let r = space.dist(x, y);
    let ball = space.ball(x, c * r)?;
    let cap = eps * ball.mass;
    let mut obstacle: Vec<bool> = (0..space.n()).map(|v| !ball.members.contains(&v)).collect();
    obstacle[x] = false;
    obstacle[y] = false;
    let free: Vec<usize> = ball.members.iter().copied().filter(|&v| v != x && v != y).collect();
    let mut best = 0.0f64;
    for mask in 0u64..(1 << free.len()) {
        let mass: f64 = free
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| space.weight(v))
            .sum();
        if !(mass < cap - tol(cap)) {
            continue;
        }
        let mut e = obstacle.clone();
        for (i, &v) in free.iter().enumerate() {
            e[v] = mask >> i & 1 == 1;
        }
        let front = brute_front(space, x, y, &e, c * r);
        best = best.max(front.last().map_or(f64::INFINITY, |f| f.1));
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub x: i64,
    pub y: i64,
    pub what: String,
    pub search: f64,
    pub brute: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub pairs: usize,
    pub front_points: usize,
    pub mismatches: Vec<Mismatch>,
}

fn same(a: f64, b: f64) -> bool {
    (a.is_infinite() && b.is_infinite()) || (a - b).abs() <= tol(a.abs().max(b.abs()))
}

/// Compares the Pareto front with the empty obstacle and the exact adversary
/// with [`brute_worst_undef`] on every ordered pair.
pub fn cross_check(space: &Space, c: f64, eps: f64) -> Result<OracleReport> {
    if space.n() > MAX_ORACLE_VERTICES {
        return Err(invalid(
            "space",
            format!("oracle enumeration is limited to {MAX_ORACLE_VERTICES} vertices, got {}", space.n()),
        ));
    }
    let none = vec![false; space.n()];
    let mut report = OracleReport {
        pairs: 0,
        front_points: 0,
        mismatches: Vec::new(),
    };
    for x in 0..space.n() {
        for y in 0..space.n() {
            if x == y {
                continue;
            }
            report.pairs += 1;
            let budget = c * space.dist(x, y);
            let front = pareto_fragments(space, x, y, &none, budget, SearchOptions::default())?;
            let got: Vec<(f64, f64)> = front.entries.iter().map(|e| (e.len, e.undef)).collect();
            let want = brute_front(space, x, y, &none, budget);
            report.front_points += want.len();
            let agree = got.len() == want.len() && got.iter().zip(&want).all(|(a, b)| same(a.0, b.0) && same(a.1, b.1));
            if !agree {
                report.mismatches.push(Mismatch {
                    x: space.id(x),
                    y: space.id(y),
                    what: format!("front {got:?} vs {want:?}"),
                    search: got.len() as f64,
                    brute: want.len() as f64,
                });
            }
            let w = worst_obstacle(space, x, y, c, eps, space.n(), None)?;
            let b = brute_worst_undef(space, x, y, c, eps)?;
            if !same(w.min_undef, b) {
                report.mismatches.push(Mismatch {
                    x: space.id(x),
                    y: space.id(y),
                    what: "worst obstacle".into(),
                    search: w.min_undef,
                    brute: b,
                });
            }
        }
    }
    Ok(report)
}
