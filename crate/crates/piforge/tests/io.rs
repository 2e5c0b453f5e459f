use piforge::corpus;
use piforge::io::{
    load_report, load_space, parse_report, parse_space, resolve_space, save_report, save_space, space_to_json,
    CheckResult, Report,
};
use piforge::thickening::{glued_measure, thicken, RESCALED_R0};
use piforge::Error;
use serde_json::json;

#[test]
fn path_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p5.json");
    let p = corpus::path(5).unwrap();
    save_space(&file, &p).unwrap();
    let back = load_space(&file).unwrap();
    assert_eq!(back.n(), 5);
    assert_eq!(back.matrix(), p.matrix());
    assert_eq!(back.weights(), p.weights());
    assert_eq!(back.edges(), p.edges());
    assert_eq!(space_to_json(&back), space_to_json(&p));
}

#[test]
fn matrix_and_arc_spaces_round_trip_through_matrix_form() {
    let gen = corpus::fat_cantor(2).unwrap();
    let c = thicken(&gen.space, gen.a.as_ref().unwrap(), gen.k.as_ref().unwrap(), RESCALED_R0, 0.25).unwrap();
    let min_edge = c.edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min);
    let g = glued_measure(&c, min_edge / 2.0).unwrap().space;
    assert!(g.has_arcs());
    let text = space_to_json(&g);
    assert!(text.contains("\"matrix\""));
    let back = parse_space(&text).unwrap();
    assert!(back.is_matrix_form());
    assert_eq!(back.matrix(), g.matrix());
    assert_eq!(back.edges(), g.edges());
    assert_eq!(space_to_json(&back), text);
}

#[test]
fn negative_edge_is_named() {
    let text = r#"{"vertices":[{"id":0,"weight":1},{"id":1,"weight":1},{"id":2,"weight":1}],
        "edges":[{"u":0,"v":1,"length":1},{"u":1,"v":2,"length":-2}],
        "resolution":1,"scale_cap":2}"#;
    match parse_space(text) {
        Err(Error::BadEdge { index, u, v, .. }) => assert_eq!((index, u, v), (1, 1, 2)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn schema_errors_name_the_field() {
    let missing = r#"{"vertices":[{"id":0,"weight":1},{"id":1}],"edges":[],"resolution":1,"scale_cap":1}"#;
    let msg = parse_space(missing).unwrap_err().to_string();
    assert!(msg.contains("vertices[1]") && msg.contains("weight"), "{msg}");

    let wrong = r#"{"vertices":[{"id":0,"weight":1}],"edges":[{"u":0,"v":"x","length":1}],"resolution":1,"scale_cap":1}"#;
    let msg = parse_space(wrong).unwrap_err().to_string();
    assert!(msg.contains("edges[0].v"), "{msg}");

    let unknown = r#"{"vertices":[{"id":0,"weight":1},{"id":1,"weight":1}],"edges":[{"u":0,"v":7,"length":1}],"resolution":1,"scale_cap":1}"#;
    let msg = parse_space(unknown).unwrap_err().to_string();
    assert!(msg.contains("edges[0].v") && msg.contains('7'), "{msg}");

    let extra = r#"{"vertices":[],"edges":[],"resolution":1,"scale_cap":1,"colour":3}"#;
    assert!(parse_space(extra).unwrap_err().to_string().contains("colour"));
}

#[test]
fn triangle_violation_reports_a_witness() {
    let m = vec![
        vec![0.0, 1.0, 5.0, 2.0],
        vec![1.0, 0.0, 1.0, 2.0],
        vec![5.0, 1.0, 0.0, 2.0],
        vec![2.0, 2.0, 2.0, 0.0],
    ];
    // every violating triple by exhaustive scan
    let mut bad = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                if a != b && b != c && a != c && m[a][b] > m[a][c] + m[c][b] {
                    bad.push((a as i64, b as i64, c as i64));
                }
            }
        }
    }
    assert!(!bad.is_empty());
    let doc = json!({
        "vertices": (0..4).map(|i| json!({"id": i, "weight": 1.0})).collect::<Vec<_>>(),
        "edges": [],
        "matrix": m,
        "resolution": 1.0,
        "scale_cap": 5.0,
    });
    match parse_space(&doc.to_string()) {
        Err(Error::Triangle { a, b, c, dab, via }) => {
            assert!(bad.contains(&(a, b, c)), "({a},{b},{c})");
            assert!(dab > via);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn report_round_trip() {
    let mut r = Report::new("path:5", "poincare", json!({"p": 2.0, "C": 1.0}));
    r.push(CheckResult::new("pi_ratio", 0.48, 1.0, json!({"center": 2})));
    r.push(CheckResult::new("unbounded", 3.0, f64::INFINITY, json!(null)));
    assert!(r.all_hold());
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("r.json");
    save_report(&file, &r).unwrap();
    let back = load_report(&file).unwrap();
    assert_eq!(back.results[0], r.results[0]);
    assert!(back.results[1].rhs.is_nan());
    assert_eq!(back.to_json(), r.to_json());
    assert!(parse_report(r#"{"tool_version":"x","space_spec":"s","operation":"o","params":{}}"#)
        .unwrap_err()
        .to_string()
        .contains("results"));
}

#[test]
fn failing_check_is_detected() {
    let mut r = Report::new("path:5", "x", json!({}));
    r.push(CheckResult::new("bound", 2.0, 1.0, json!(null)));
    assert_eq!(r.results[0].margin, -1.0);
    assert!(!r.all_hold());
}

#[test]
fn resolve_specs() {
    assert_eq!(resolve_space("path:5").unwrap().space.n(), 5);
    assert!(matches!(resolve_space("torus:3"), Err(Error::UnknownGenerator(_))));
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.json");
    save_space(&file, &corpus::cycle(6).unwrap()).unwrap();
    let spec = format!("file:{}", file.display());
    assert_eq!(resolve_space(&spec).unwrap().space.n(), 6);
    assert_eq!(resolve_space(file.to_str().unwrap()).unwrap().space.n(), 6);
}

#[test]
fn oracle_agrees_on_small_spaces() {
    use piforge::oracle::cross_check;
    for s in [corpus::path(5).unwrap(), corpus::cycle(6).unwrap(), corpus::star(3, 2).unwrap()] {
        let rep = cross_check(&s, 2.0, 0.3).unwrap();
        assert!(rep.mismatches.is_empty(), "{:?}", rep.mismatches);
        assert_eq!(rep.pairs, s.n() * (s.n() - 1));
    }
    assert!(cross_check(&corpus::path(11).unwrap(), 2.0, 0.3).is_err());
}
