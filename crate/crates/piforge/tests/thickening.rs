use piforge::corpus;
use piforge::space::{Edge, Space};
use piforge::thickening::{
    certify_thickened, glued_measure, glued_metric, thicken, verify_estimates, CertifyOptions, EstimateStatus,
    VertexKind, RESCALED_R0,
};

fn line(xs: &[f64]) -> Space {
    let n = xs.len();
    let edges = (1..n)
        .map(|i| Edge {
            u: i - 1,
            v: i,
            length: xs[i] - xs[i - 1],
        })
        .collect();
    let res = (1..n).map(|i| xs[i] - xs[i - 1]).fold(f64::INFINITY, f64::min);
    Space::from_edges((0..n as i64).collect(), vec![1.0; n], edges, res, xs[n - 1] - xs[0]).unwrap()
}

#[test]
fn three_point_line() {
    let x = line(&[0.0, 0.5, 1.0]);
    let c = thicken(&x, &[0, 1, 2], &[0, 2], RESCALED_R0, 0.25).unwrap();
    assert_eq!(c.gaps.points.len(), 1);
    assert_eq!(c.gaps.points[0].vertex, 1);
    assert_eq!(c.lenscale, vec![0.5, 0.5]);
    let mut net: Vec<(usize, f64)> = c
        .vertices
        .iter()
        .filter(|v| v.kind == VertexKind::Net)
        .map(|v| (v.location, v.scale))
        .collect();
    net.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(net, vec![(0, 0.25), (0, 0.5), (2, 0.25), (2, 0.5)]);

    let gap = c.vertices.iter().position(|v| v.kind == VertexKind::Gap).unwrap();
    let top0 = c.vertices.iter().position(|v| v.location == 0 && v.scale == 0.5).unwrap();
    let e = c
        .edges
        .iter()
        .find(|e| (e.a, e.b) == (gap.min(top0), gap.max(top0)))
        .expect("edge between (0,½) and (0.5,½)");
    assert_eq!(e.length, 16.0);
    assert_eq!(e.mass, 2.0);
    assert!(e.length <= 128.0 * 0.5);

    let m = glued_metric(&c);
    assert_eq!(m.dist[0][1], 1.0);
    assert!(m.unreachable.is_empty());
    let rep = verify_estimates(&c, &m);
    for entry in &rep.entries {
        assert_ne!(entry.status, EstimateStatus::Fail, "{entry:?}");
    }
    assert_eq!(rep.get("1").unwrap().worst_margin, 0.0);
    // link from 0 to (0,½)
    let link = m.dist[0][m.vertex_node(top0)];
    assert!(link <= 48.0 * 0.5);
}

#[test]
fn no_gaps_gives_k_itself() {
    let p = corpus::path(4).unwrap();
    let all = [0, 1, 2, 3];
    let c = thicken(&p, &all, &all, RESCALED_R0, 0.25).unwrap();
    assert!(c.gaps.points.is_empty());
    assert!(c.vertices.is_empty() && c.edges.is_empty());
    assert!(c.lenscale.iter().all(|&l| l == 0.0));
    let m = glued_metric(&c);
    let rep = verify_estimates(&c, &m);
    assert!(rep.all_pass);
    assert_eq!(rep.get("1").unwrap().worst_margin, 0.0);
    assert_eq!(rep.get("3").unwrap().status, EstimateStatus::Vacuous);
    let g = glued_measure(&c, 1.0).unwrap();
    assert_eq!(g.space.n(), 4);
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(g.space.dist(i, j), p.dist(i, j));
        }
    }
    assert_eq!(g.space.weights(), p.weights());
}

#[test]
fn thicken_errors() {
    let x = line(&[0.0, 0.5, 1.0]);
    assert!(thicken(&x, &[0, 1], &[], RESCALED_R0, 0.25).is_err());
    assert!(thicken(&x, &[0, 1], &[0, 2], RESCALED_R0, 0.25).is_err());
    assert!(thicken(&x, &[0, 1, 2], &[0, 2], RESCALED_R0, 2.0).is_err());
}

#[test]
fn glued_measure_subdivision() {
    let x = line(&[0.0, 0.5, 1.0]);
    let c = thicken(&x, &[0, 1, 2], &[0, 2], RESCALED_R0, 0.25).unwrap();
    let min_edge = c.edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min);
    assert!(glued_measure(&c, min_edge).is_err());
    let g = glued_measure(&c, 4.0).unwrap();
    let total: f64 = g.space.weights().iter().sum();
    let want = c.k_weights.iter().sum::<f64>() + c.total_tree_mass();
    assert!((total - want).abs() < 1e-12 * want);
    for (i, &node) in g.k_nodes.iter().enumerate() {
        assert_eq!(g.space.weight(node), c.k_weights[i]);
    }
    // the 16-long edge of mass 2 has 4 segments: 3 interior nodes of ½
    let gap = c.vertices.iter().position(|v| v.kind == VertexKind::Gap).unwrap();
    let top0 = c.vertices.iter().position(|v| v.location == 0 && v.scale == 0.5).unwrap();
    let (a, b) = (g.vertex_nodes[gap], g.vertex_nodes[top0]);
    assert!((g.space.dist(a, b) - 16.0).abs() < 1e-12);
    let interior: Vec<usize> = (0..g.space.n())
        .filter(|&v| {
            (g.space.dist(a, v) + g.space.dist(v, b) - 16.0).abs() < 1e-9 && v != a && v != b && g.space.neighbors(v).len() == 2
        })
        .filter(|&v| g.space.neighbors(v).iter().all(|&(_, l)| (l - 4.0).abs() < 1e-12))
        .collect();
    assert_eq!(interior.len(), 3);
    for v in interior {
        assert_eq!(g.space.weight(v), 0.5);
    }
    // K is isometrically embedded
    assert_eq!(g.space.dist(g.k_nodes[0], g.k_nodes[1]), 1.0);
}

#[test]
fn fat_cantor_pipeline() {
    let gen = corpus::fat_cantor(3).unwrap();
    let (a, k) = (gen.a.unwrap(), gen.k.unwrap());
    let c = thicken(&gen.space, &a, &k, RESCALED_R0, 1.0 / 64.0).unwrap();
    assert!(!c.gaps.points.is_empty());
    let m = glued_metric(&c);
    let rep = verify_estimates(&c, &m);
    for id in ["1", "3", "4", "5", "7", "8", "9", "edge_count", "edge_rules", "completeness"] {
        let e = rep.get(id).unwrap();
        assert_eq!(e.status, EstimateStatus::Pass, "{e:?}");
    }
    assert_eq!(rep.get("1").unwrap().worst_margin, 0.0);
    let min_edge = c.edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min);
    let g = glued_measure(&c, min_edge / 2.0).unwrap();
    for (i, &ki) in g.k_nodes.iter().enumerate() {
        for (j, &kj) in g.k_nodes.iter().enumerate() {
            assert_eq!(g.space.dist(ki, kj), gen.space.dist(c.k[i], c.k[j]));
        }
    }
    let opts = CertifyOptions {
        pairs: 3,
        pi_centers: 40,
        ..CertifyOptions::default()
    };
    let cert = certify_thickened(&c, &g, &opts).unwrap();
    assert!(cert.doubling.is_finite());
    assert!(cert.within_global_bound);
    assert!(cert.pi.iter().all(|r| r.c_pi_hat.is_finite()));
}
