use piforge::corpus;
use piforge::fragments::{
    concatenate, concatenation_params, dilate_gaps, fragment_integral, normalize, oscillation_check,
    pareto_fragments, Fragment, Leg, SearchOptions,
};
use piforge::space::{indicator, Space};
use proptest::prelude::*;

mod common;
use common::{brute_front, small_spaces};

fn p5() -> Space {
    corpus::path(5).unwrap()
}

#[test]
fn pareto_examples() {
    let s = p5();
    let none = vec![false; 5];
    let f = pareto_fragments(&s, 2, 2, &none, 0.0, SearchOptions::default()).unwrap();
    assert_eq!(f.entries.len(), 1);
    assert_eq!((f.entries[0].len, f.entries[0].undef), (0.0, 0.0));
    assert!(f.entries[0].fragment.legs.is_empty());

    let f = pareto_fragments(&s, 0, 4, &none, 4.0, SearchOptions::default()).unwrap();
    assert_eq!(f.entries.len(), 1);
    assert_eq!((f.entries[0].len, f.entries[0].undef), (4.0, 0.0));
    assert_eq!(f.entries[0].fragment, Fragment::along(&[0, 1, 2, 3, 4]));

    let e = indicator(5, &[2]);
    let f = pareto_fragments(&s, 0, 4, &e, 4.0, SearchOptions::default()).unwrap();
    assert_eq!(f.entries.len(), 1);
    assert_eq!((f.entries[0].len, f.entries[0].undef), (4.0, 2.0));
    let frag = &f.entries[0].fragment;
    assert_eq!(frag.len(&s), 4.0);
    assert_eq!(frag.undef(&s), 2.0);
    assert!(!frag.vertices().contains(&2));
    assert_eq!(brute_front(&s, 0, 4, &e, 4.0), vec![(4.0, 2.0)]);

    assert!(pareto_fragments(&s, 0, 4, &none, 3.0, SearchOptions::default())
        .unwrap()
        .entries
        .is_empty());
}

#[test]
fn endpoints_are_exempt_from_the_obstacle() {
    let s = p5();
    let e = indicator(5, &[0, 4]);
    let f = pareto_fragments(&s, 0, 4, &e, 4.0, SearchOptions::default()).unwrap();
    assert_eq!(f.min_undef(), Some(0.0));
}

#[test]
fn pareto_matches_brute_force_on_small_spaces() {
    for s in small_spaces() {
        let n = s.n();
        for x in 0..n {
            for y in 0..n {
                for mask in [0usize, 0b100, 0b1010, 0b10110] {
                    let e: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
                    for factor in [1.0, 1.5, 2.5] {
                        let budget = factor * s.dist(x, y);
                        let front = pareto_fragments(&s, x, y, &e, budget, SearchOptions::default()).unwrap();
                        let got: Vec<(f64, f64)> = front.entries.iter().map(|e| (e.len, e.undef)).collect();
                        let want = brute_front(&s, x, y, &e, budget);
                        assert_eq!(got.len(), want.len(), "x={x} y={y} mask={mask:b} budget={budget}: {got:?} vs {want:?}");
                        for (a, b) in got.iter().zip(&want) {
                            assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9, "{got:?} vs {want:?}");
                        }
                        for entry in &front.entries {
                            assert!((entry.fragment.len(&s) - entry.len).abs() < 1e-9);
                            assert!((entry.fragment.undef(&s) - entry.undef).abs() < 1e-9);
                            assert!(entry.fragment.interior().iter().all(|&v| !e[v]));
                            assert_eq!(entry.fragment.end(), y);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn eps_dominance_is_marked_heuristic() {
    let s = p5();
    let opts = SearchOptions {
        eps_dominance: Some(s.resolution() / 16.0),
    };
    let f = pareto_fragments(&s, 0, 4, &vec![false; 5], 4.0, opts).unwrap();
    assert!(f.heuristic);
    assert_eq!(f.min_undef(), Some(0.0));
}

#[test]
fn normalize_examples() {
    let s = p5();
    let looped = Fragment {
        start: 0,
        legs: vec![Leg::solid(0, 1), Leg::solid(1, 1), Leg::solid(1, 2)],
    };
    let n = normalize(&s, &looped).unwrap();
    assert_eq!(n, Fragment::along(&[0, 1, 2]));
    assert_eq!(n.len(&s), looped.len(&s));

    let gaps = Fragment {
        start: 0,
        legs: vec![Leg::gap(0, 3), Leg::gap(3, 1)],
    };
    let n = normalize(&s, &gaps).unwrap();
    assert_eq!(n.legs, vec![Leg::gap(0, 1)]);
    assert!(n.undef(&s) <= gaps.undef(&s));
    assert_eq!(normalize(&s, &n).unwrap(), n);

    let broken = Fragment {
        start: 0,
        legs: vec![Leg::solid(0, 1), Leg::solid(2, 3)],
    };
    assert!(normalize(&s, &broken).is_err());
    let not_edge = Fragment {
        start: 0,
        legs: vec![Leg::solid(0, 2)],
    };
    assert!(normalize(&s, &not_edge).is_err());
}

#[test]
fn dilate_examples() {
    let s = corpus::path(8).unwrap();
    let solid = Fragment::along(&[0, 1, 2]);
    let d = dilate_gaps(&s, &solid, &[], 2.0).unwrap();
    assert_eq!(d.new_length, 2.0);

    let one = Fragment {
        start: 0,
        legs: vec![Leg::solid(0, 1), Leg::solid(1, 2), Leg::solid(2, 3), Leg::gap(3, 5)],
    };
    let d = dilate_gaps(&s, &one, &[1.5], 1.5).unwrap();
    assert_eq!((d.new_length, d.bound), (6.0, 6.0));

    let two = Fragment {
        start: 0,
        legs: vec![Leg::gap(0, 1), Leg::solid(1, 1), Leg::gap(1, 2)],
    };
    let d = dilate_gaps(&s, &two, &[2.0, 2.0], 2.0).unwrap();
    assert_eq!((d.new_length, d.bound), (4.0, 4.0));

    assert!(dilate_gaps(&s, &one, &[1.0], 2.0).is_err());
    assert!(dilate_gaps(&s, &one, &[2.5], 2.0).is_err());
    assert!(dilate_gaps(&s, &one, &[], 2.0).is_err());
}

#[test]
fn concatenate_examples() {
    let s = p5();
    let a = Fragment::along(&[0, 1]);
    assert_eq!(concatenate(&[0, 1], &[a.clone()]).unwrap(), a);
    let b = Fragment::along(&[1, 2]);
    let c = concatenate(&[0, 1, 2], &[a.clone(), b.clone()]).unwrap();
    assert_eq!((c.len(&s), c.undef(&s)), (2.0, 0.0));
    assert!(concatenate(&[0, 2, 3], &[a, b]).is_err());
}

#[test]
fn concatenation_params_reproduce_case_four() {
    // C = 2²⁰C₀ with C₀ = 3, δ = 2⁻³⁰, fragments n = 4, L = 2¹⁵
    let c0 = 3.0;
    let d = 5.0f64;
    let eps = 0.25;
    let p = concatenation_params(2f64.powi(15), 2f64.powi(20) * c0, 2f64.powi(-30), eps, 4.0, d).unwrap();
    assert_eq!(p.c, 2f64.powi(35) * c0);
    assert_eq!(p.delta, 2f64.powi(-14));
    let exponent = -30.0 - 15.0 - 2.0 - (20.0 + c0.log2()) - 6.0;
    assert!((p.log2_eps - (eps.log2() + exponent * d.log2())).abs() < 1e-9);
    // at least ε(2D)^{-2000-2log₂C}
    let floor = eps.log2() + (-2000.0 - 2.0 * (2f64.powi(20) * c0).log2()) * (2.0 * d).log2();
    assert!(p.log2_eps >= floor);
    assert!(concatenation_params(0.5, 1.0, 0.1, 0.1, 1.0, 2.0).is_err());
}

#[test]
fn integral_examples() {
    let s = p5();
    let path = Fragment::along(&[0, 1, 2, 3, 4]);
    assert_eq!(fragment_integral(&s, &path, &[0.0; 5]), 0.0);
    let spike = [0.0, 0.0, 1.0, 0.0, 0.0];
    assert_eq!(fragment_integral(&s, &path, &spike), 1.0);
    let s9 = corpus::path(9).unwrap();
    let mixed = Fragment {
        start: 0,
        legs: vec![Leg::solid(0, 1), Leg::gap(1, 3), Leg::solid(3, 4), Leg::solid(4, 5)],
    };
    assert_eq!(fragment_integral(&s9, &mixed, &[1.0; 9]), 3.0);
}

#[test]
fn oscillation_examples() {
    let s = p5();
    let f: Vec<f64> = (0..5).map(|i| i as f64).collect();
    let path = Fragment::along(&[0, 1, 2, 3, 4]);
    let o = oscillation_check(&s, &path, &[2.0; 5], 1.0).unwrap();
    assert!(o.holds && o.lhs == 0.0);
    let o = oscillation_check(&s, &path, &f, 1.0).unwrap();
    assert_eq!((o.lhs, o.rhs), (4.0, 4.0));
    assert!(o.holds);
    let mixed = Fragment {
        start: 0,
        legs: vec![Leg::solid(0, 1), Leg::gap(1, 3), Leg::solid(3, 4)],
    };
    let o = oscillation_check(&s, &mixed, &f, 1.0).unwrap();
    assert_eq!((o.lhs, o.rhs), (4.0, 4.0));
    assert!(oscillation_check(&s, &path, &f, 0.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_is_idempotent(steps in prop::collection::vec((0usize..6, any::<bool>()), 0..10)) {
        let s = corpus::cycle(6).unwrap();
        let mut legs = Vec::new();
        let mut at = 0;
        for (to, solid) in steps {
            let leg = if solid && (to == at || s.edge_length(at, to).is_some()) { Leg::solid(at, to) } else { Leg::gap(at, to) };
            legs.push(leg);
            at = to;
        }
        let f = Fragment { start: 0, legs };
        let n = normalize(&s, &f).unwrap();
        prop_assert!(n.undef(&s) <= f.undef(&s) + 1e-12);
        prop_assert!(n.len(&s) <= f.len(&s) + 1e-12);
        prop_assert_eq!(n.end(), f.end());
        prop_assert_eq!(normalize(&s, &n).unwrap(), n);
    }

    #[test]
    fn concatenation_is_additive(cuts in prop::collection::vec(0usize..9, 1..5)) {
        let s = corpus::path(9).unwrap();
        let mut waypoints = vec![0usize];
        waypoints.extend(cuts);
        let mut parts = Vec::new();
        for w in waypoints.windows(2) {
            let f = pareto_fragments(&s, w[0], w[1], &vec![false; 9], 9.0, SearchOptions::default()).unwrap();
            parts.push(f.entries[0].fragment.clone());
        }
        let c = concatenate(&waypoints, &parts).unwrap();
        let len: f64 = parts.iter().map(|p| p.len(&s)).sum();
        let undef: f64 = parts.iter().map(|p| p.undef(&s)).sum();
        prop_assert!((c.len(&s) - len).abs() < 1e-12);
        prop_assert!((c.undef(&s) - undef).abs() < 1e-12);
    }
}
