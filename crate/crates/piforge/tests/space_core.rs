use piforge::corpus;
use piforge::space::{Edge, Perfectness, Space};
use proptest::prelude::*;

fn p5() -> Space {
    corpus::path(5).unwrap()
}

/// Open-ball membership computed from coordinates on the integer line.
fn line_ball(n: usize, c: usize, r: f64) -> Vec<usize> {
    (0..n).filter(|&i| ((i as f64) - (c as f64)).abs() < r).collect()
}

fn line_space(xs: &[f64]) -> Space {
    let n = xs.len();
    let m: Vec<Vec<f64>> = xs.iter().map(|a| xs.iter().map(|b| (a - b).abs()).collect()).collect();
    let edges = (1..n)
        .map(|i| Edge {
            u: i - 1,
            v: i,
            length: xs[i] - xs[i - 1],
        })
        .collect();
    Space::from_matrix((0..n as i64).collect(), vec![1.0; n], m, edges, 1e-3, 10.0).unwrap()
}

#[test]
fn ball_on_p5() {
    let s = p5();
    let b = s.ball(2, 1.5).unwrap();
    assert_eq!(b.members, line_ball(5, 2, 1.5));
    assert_eq!(b.members, vec![1, 2, 3]);
    assert_eq!(b.mass, 3.0);
    let all = s.ball(0, 10.0).unwrap();
    assert_eq!(all.members.len(), 5);
    assert_eq!(all.mass, 5.0);
    assert_eq!(s.ball(3, 1e-6).unwrap().members, vec![3]);
    assert!(s.ball(0, 0.0).is_err());
}

#[test]
fn ties_are_excluded_from_open_balls() {
    let s = p5();
    assert_eq!(s.ball(0, 2.0).unwrap().members, vec![0, 1]);
}

#[test]
fn doubling_examples() {
    let single = corpus::path(1).unwrap();
    assert_eq!(single.doubling_constant(&[1.0], &[0]).unwrap().value, 1.0);

    let c8 = corpus::cycle(8).unwrap();
    for x in 0..8 {
        let ratio = c8.ball_mass(x, 2.0) / c8.ball_mass(x, 1.0);
        assert_eq!(ratio, 3.0);
    }

    let s = p5();
    assert_eq!(s.ball_mass(0, 3.0) / s.ball_mass(0, 1.5), 1.5);
    assert!(s.doubling_constant(&[], &[]).is_err());
}

#[test]
fn doubling_matches_dense_radius_scan() {
    for s in [p5(), corpus::cycle(8).unwrap(), corpus::star(3, 3).unwrap(), corpus::grid(3, 2).unwrap()] {
        let all: Vec<usize> = (0..s.n()).collect();
        let d = s.doubling_constant(&[], &all).unwrap();
        // oracle: scan a fine grid of radii
        let mut best: f64 = 1.0;
        for x in 0..s.n() {
            let mut r = 0.01;
            while r <= s.scale_cap() + 1e-12 {
                best = best.max(s.ball_mass(x, 2.0 * r) / s.ball_mass(x, r));
                r += 0.01;
            }
        }
        assert!((d.value - best).abs() < 1e-12, "{} vs {}", d.value, best);
    }
}

#[test]
fn maximal_function_examples() {
    let s = p5();
    let f = [0.0, 0.0, 1.0, 0.0, 0.0];
    let m1 = s.maximal_function(&f, 1.0).unwrap();
    assert_eq!(m1[1], 0.0);
    let m15 = s.maximal_function(&f, 1.5).unwrap();
    assert!((m15[1] - 1.0 / 3.0).abs() < 1e-15);
    let c = s.maximal_function(&[-2.0; 5], 3.0).unwrap();
    assert!(c.iter().all(|&v| (v - 2.0).abs() < 1e-15));
}

/// Enumerates balls directly from the definition.
fn maximal_oracle(s: &Space, f: &[f64], sc: f64) -> Vec<f64> {
    let n = s.n();
    let mut radii: Vec<f64> = Vec::new();
    for x in 0..n {
        for y in 0..n {
            radii.push(s.dist(x, y) + 1e-7);
        }
    }
    let mut out = vec![0.0f64; n];
    for y in 0..n {
        for &r in &radii {
            if r >= sc {
                continue;
            }
            let b = s.ball(y, r).unwrap();
            let avg = b.members.iter().map(|&v| s.weight(v) * f[v].abs()).sum::<f64>() / b.mass;
            for &v in &b.members {
                out[v] = out[v].max(avg);
            }
        }
    }
    out
}

#[test]
fn maximal_function_matches_ball_enumeration() {
    let spaces = [p5(), corpus::star(3, 2).unwrap(), corpus::weighted_line(9, 0.5).unwrap()];
    for s in &spaces {
        let f: Vec<f64> = (0..s.n()).map(|i| ((i * 7) % 5) as f64 - 1.5).collect();
        for sc in [0.3, 1.0, 1.7, 2.5, 4.0] {
            let fast = s.maximal_function(&f, sc).unwrap();
            let slow = maximal_oracle(s, &f, sc);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-12, "s={sc}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn mean_deviation_examples() {
    let s = p5();
    let f = [0.0, 1.0, 2.0, 3.0, 4.0];
    let b = s.ball(2, 10.0).unwrap();
    let mean = s.mean_deviation(&f, &b, None);
    assert!((mean - 1.2).abs() < 1e-15);
    let zero = s.mean_deviation(&f, &b, Some(0.0));
    assert!((zero - 2.0).abs() < 1e-15);
    assert!(mean <= 2.0 * zero);
    assert_eq!(s.mean_deviation(&[3.0; 5], &b, None), 0.0);
}

#[test]
fn perfectness_examples() {
    let p9 = corpus::path(9).unwrap();
    let all: Vec<usize> = (0..9).collect();
    match p9.uniform_perfectness(&all, 4.0).unwrap() {
        Perfectness::Constant { l, .. } => assert!(l <= 2.0),
        other => panic!("unexpected {other:?}"),
    }

    let two = line_space(&[0.0, 1.0]).with_scales(0.25, 2.0).unwrap();
    assert!(matches!(two.uniform_perfectness(&[0], 2.0).unwrap(), Perfectness::Fails { .. }));

    // no exterior point closer than r0
    match two.uniform_perfectness(&[0], 0.5).unwrap() {
        Perfectness::Constant { l, .. } => assert_eq!(l, 1.0),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn density_examples() {
    let s = p5();
    let all: Vec<usize> = (0..5).collect();
    assert_eq!(s.density_points(&all, 0.3, 1.5).unwrap(), all);
    let a = [0, 1, 2, 3];
    let d = s.density_points(&a, 0.3, 1.5).unwrap();
    assert!(!d.contains(&3));
    assert!(d.contains(&1));
    assert_eq!(s.density_points(&a, 1.0 - 1e-12, 1.5).unwrap(), a.to_vec());
}

#[test]
fn matrix_validation_reports_witnesses() {
    let bad = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
    let err = Space::from_matrix(vec![10, 20, 30], vec![1.0; 3], bad, vec![], 0.1, 5.0).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("(10, 30, 20)"), "{msg}");

    let err = Space::from_edges(
        vec![0, 1],
        vec![1.0, 1.0],
        vec![Edge { u: 0, v: 1, length: -1.0 }],
        1.0,
        1.0,
    )
    .unwrap_err();
    assert!(err.to_string().contains("edge #0 (0, 1)"));
}

#[test]
fn weighted_space_scaling() {
    let s = corpus::weighted_line(21, 0.5).unwrap();
    let same = s.weighted(&vec![1.0; 21]).unwrap();
    assert_eq!(same.weights(), s.weights());
    let doubled = s.weighted(&vec![2.0; 21]).unwrap();
    assert!((doubled.measured_doubling() - s.measured_doubling()).abs() < 1e-12);
    assert!(s.measured_doubling().is_finite());
}

/// The maximal bound with the enlarged ball `B(x, r + 2s)` and constant `D³`.
fn weak_bound_holds(s: &Space, f: &[f64], lambda: f64, x: usize, r: f64, sc: f64, d: f64) -> (f64, f64) {
    let m = s.maximal_function(f, sc).unwrap();
    let b = s.ball(x, r).unwrap();
    let lhs: f64 = b.members.iter().filter(|&&v| m[v] > lambda).map(|&v| s.weight(v)).sum();
    let big = s.ball(x, r + 2.0 * sc).unwrap();
    let l1: f64 = big.members.iter().map(|&v| s.weight(v) * f[v].abs()).sum();
    (lhs, d.powi(3) * l1 / lambda)
}

#[test]
fn weak_maximal_bound_with_literal_enlargement_can_fail() {
    // f = 1 at vertex 3 of the integer path; the ball B(1, 2.05) reaches both
    // 0 and 3, so M f(0) = 1/4 while f vanishes on B(0, 0.5 + 2.1).
    let s = corpus::path(6).unwrap();
    let f = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
    let m = s.maximal_function(&f, 2.1).unwrap();
    assert!((m[0] - 0.25).abs() < 1e-15);
    let literal: f64 = s.ball(0, 0.5 + 2.1).unwrap().members.iter().map(|&v| f[v]).sum();
    assert_eq!(literal, 0.0);
    let d = s.measured_doubling();
    let (lhs, rhs) = weak_bound_holds(&s, &f, 0.2, 0, 0.5, 2.1, d);
    assert!(lhs <= rhs);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn averaging_lemma(vals in prop::collection::vec(-5.0f64..5.0, 7), a in -6.0f64..6.0, c in 0usize..7, r in 0.5f64..4.0) {
        let s = corpus::path(7).unwrap();
        let b = s.ball(c, r).unwrap();
        let lhs = s.mean_deviation(&vals, &b, None);
        let rhs = 2.0 * s.mean_deviation(&vals, &b, Some(a));
        prop_assert!(lhs <= rhs + 1e-12);
    }

    #[test]
    fn balls_are_monotone(c in 0usize..9, r1 in 0.1f64..5.0, dr in 0.0f64..3.0) {
        let s = corpus::grid(3, 2).unwrap();
        let small = s.ball(c, r1).unwrap();
        let big = s.ball(c, r1 + dr).unwrap();
        prop_assert!(small.members.iter().all(|v| big.members.contains(v)));
        prop_assert!(small.mass <= big.mass);
    }

    #[test]
    fn weak_maximal_bound(vals in prop::collection::vec(0.0f64..3.0, 8), lambda in 0.05f64..2.0, x in 0usize..8, r in 0.3f64..5.0, sc in 0.3f64..4.0) {
        let s = corpus::cycle(8).unwrap();
        let d = s.measured_doubling();
        let (lhs, rhs) = weak_bound_holds(&s, &vals, lambda, x, r, sc, d);
        prop_assert!(lhs <= rhs + 1e-9);
    }
}
