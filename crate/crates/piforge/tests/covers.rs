use piforge::corpus;
use piforge::covers::{build_gap_points, build_nets, check_gap_points, scale_index, vitali_select};
use piforge::space::{Edge, Space};
use proptest::prelude::*;

fn line(xs: &[f64]) -> Space {
    let n = xs.len();
    let edges = (1..n)
        .map(|i| Edge {
            u: i - 1,
            v: i,
            length: xs[i] - xs[i - 1],
        })
        .collect();
    Space::from_edges((0..n as i64).collect(), vec![1.0; n], edges, 1e-3, 4.0).unwrap()
}

#[test]
fn nets_examples() {
    let s = line(&[0.0, 1.0]);
    let nets = build_nets(&s, &[0, 1], 0).unwrap();
    assert_eq!(nets.levels[0], vec![0, 1]);

    let s = line(&[0.0, 0.4, 1.0]);
    let nets = build_nets(&s, &[0, 1, 2], 2).unwrap();
    assert_eq!(nets.levels[0], vec![0, 2]);
    assert_eq!(nets.levels[1], vec![0, 2]);
    assert_eq!(nets.levels[2], vec![0, 1, 2]);
    assert_eq!(nets.scale(1), Some(0.25));
    assert_eq!(nets.scale(0), Some(1.0));

    let single = build_nets(&s, &[1], 5).unwrap();
    assert!(single.levels.iter().all(|l| l == &vec![1]));
    assert!(build_nets(&s, &[], 1).is_err());
}

#[test]
fn scale_index_brackets_distance() {
    assert_eq!(scale_index(0.5), 1);
    assert_eq!(scale_index(0.25), 2);
    assert_eq!(scale_index(0.3), 1);
    assert_eq!(scale_index(1.0), 0);
    assert_eq!(scale_index(0.999), 0);
}

#[test]
fn gap_point_examples() {
    let s = line(&[0.0, 0.5, 1.0]);
    assert!(build_gap_points(&s, &[0, 1, 2], &[0, 1, 2], 0.0).unwrap().points.is_empty());

    let g = build_gap_points(&s, &[0, 2], &[0, 1, 2], 0.0).unwrap();
    assert_eq!(g.points.len(), 1);
    assert_eq!(g.points[0].vertex, 1);
    assert_eq!(g.points[0].k, 1);
    assert_eq!(g.points[0].dist_to_k, 0.5);

    let s = line(&[0.0, 0.25, 0.5, 1.0]);
    let g = build_gap_points(&s, &[0, 3], &[0, 1, 2, 3], 0.0).unwrap();
    let got: Vec<(usize, i32)> = g.points.iter().map(|p| (p.vertex, p.k)).collect();
    assert_eq!(got, vec![(2, 1), (1, 2)]);
    assert!(check_gap_points(&s, &g).ok());

    // the scale floor drops the fine point
    let g = build_gap_points(&s, &[0, 3], &[0, 1, 2, 3], 0.5).unwrap();
    assert_eq!(g.points.len(), 1);
}

#[test]
fn vitali_examples() {
    let s = corpus::path(3).unwrap();
    assert_eq!(vitali_select(&s, &[(1, 0.5)]).unwrap(), vec![0]);
    assert_eq!(vitali_select(&s, &[(0, 0.4), (2, 0.4)]).unwrap(), vec![0, 1]);
    assert_eq!(vitali_select(&s, &[(0, 0.75), (1, 0.75), (2, 0.75)]).unwrap(), vec![0, 2]);
    assert!(vitali_select(&s, &[(0, 0.0)]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nets_are_separated_maximal_nested(n in 3usize..30, radius in 0.15f64..0.5, seed in 0u64..1000, j_max in 0usize..6) {
        let s = corpus::random_geometric(n, radius, seed).unwrap();
        let k: Vec<usize> = (0..n).filter(|v| v % 3 != 1).collect();
        let nets = build_nets(&s, &k, j_max).unwrap();
        for (j, level) in nets.levels.iter().enumerate() {
            let sep = 2f64.powi(-(j as i32));
            for (i, &a) in level.iter().enumerate() {
                for &b in &level[i + 1..] {
                    prop_assert!(s.dist(a, b) >= sep - 1e-9);
                }
            }
            for &v in &k {
                prop_assert!(level.contains(&v) || level.iter().any(|&m| s.dist(v, m) < sep));
            }
            if j > 0 {
                prop_assert!(nets.levels[j - 1].iter().all(|v| level.contains(v)));
            }
        }
        let again = build_nets(&s, &k, j_max).unwrap();
        prop_assert_eq!(again.levels, nets.levels);
    }

    #[test]
    fn gap_points_satisfy_whitney_conditions(n in 3usize..30, radius in 0.15f64..0.5, seed in 0u64..1000) {
        let s = corpus::random_geometric(n, radius, seed).unwrap();
        let k: Vec<usize> = (0..n).filter(|v| v % 4 == 0).collect();
        let a: Vec<usize> = (0..n).filter(|v| v % 4 != 3).collect();
        let g = build_gap_points(&s, &k, &a, 0.0).unwrap();
        prop_assert!(check_gap_points(&s, &g).ok());
        for p in &g.points {
            prop_assert!(!k.contains(&p.vertex) && a.contains(&p.vertex));
        }
    }
}
