use clap::Args;
use serde::Serialize;
use serde_json::{json, Value};

use piforge::connectivity::{
    default_tau_grid, estimate_fine_alpha, pairs_at_least, predicted_constants, quasiconvexify, verify_pair,
    AdversaryMode, ConnParams, Status, DEFAULT_EXHAUSTION_LIMIT,
};
use piforge::corpus::Generated;
use piforge::io::{resolve_space, save_report, CheckResult, Report};
use piforge::oracle::cross_check;
use piforge::poincare::{check_ainfty, modulus_lower_bound, pi_scan, standard_family};
use piforge::thickening::{
    certify_thickened, glued_measure, glued_metric, thicken as build_complex, verify_estimates, CertifyOptions,
    EstimateStatus, RESCALED_R0,
};
use piforge::Space;

use crate::Common;

type Outcome = Result<u8, Box<dyn std::error::Error>>;

fn load(common: &Common) -> Result<(String, Generated), Box<dyn std::error::Error>> {
    let spec = common.space.clone().ok_or("--space is required")?;
    let g = resolve_space(&spec)?;
    Ok((spec, g))
}

fn ids(space: &Space, v: &[usize]) -> Vec<i64> {
    v.iter().map(|&i| space.id(i)).collect()
}

fn finish(common: &Common, report: Report) -> Outcome {
    for r in &report.results {
        println!(
            "{:<40} lhs={:<14.6e} rhs={:<14.6e} {}",
            r.check,
            r.lhs,
            r.rhs,
            if r.holds() { "ok" } else { "FAILED" }
        );
    }
    if let Some(path) = &common.out {
        save_report(path, &report)?;
    }
    Ok(if report.all_hold() { 0 } else { 1 })
}

fn params<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn default_radii(space: &Space) -> Vec<f64> {
    let mut out = Vec::new();
    let mut r = space.diameter() / 2.0;
    while r >= space.resolution() && out.len() < 8 {
        out.push(r);
        r /= 2.0;
    }
    if out.is_empty() {
        out.push(space.diameter().max(space.resolution()));
    }
    out
}

#[derive(Args, Debug, Serialize)]
pub struct CertifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long = "C")]
    #[serde(rename = "C")]
    pub c: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub eps: f64,
    /// exact, greedy or rho.
    #[arg(long, default_value = "exact")]
    pub mode: String,
    /// Candidate cap for the exact adversary.
    #[arg(long, default_value_t = DEFAULT_EXHAUSTION_LIMIT)]
    pub limit: usize,
    /// Only pairs with d(x,y) at least this.
    #[arg(long = "min-dist", default_value_t = 0.0)]
    #[serde(rename = "min-dist")]
    pub min_dist: f64,
    #[arg(long, requires = "y")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<i64>,
    #[arg(long, requires = "x")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<i64>,
}

pub fn certify(a: CertifyArgs) -> Outcome {
    let (spec, g) = load(&a.common)?;
    let s = &g.space;
    let conn = ConnParams::new(a.c, a.delta, a.eps)?;
    let mode: AdversaryMode = a.mode.parse()?;
    let pairs = match (a.x, a.y) {
        (Some(x), Some(y)) => vec![(s.index_of(x)?, s.index_of(y)?)],
        _ => pairs_at_least(s, a.min_dist.max(f64::MIN_POSITIVE)),
    };
    let mut report = Report::new(spec, "certify", params(&a));
    for (x, y) in pairs {
        let v = verify_pair(s, x, y, conn, mode, a.limit)?;
        let witness = json!({
            "x": s.id(x),
            "y": s.id(y),
            "status": v.status,
            "obstacle": v.witness_obstacle.as_ref().map(|o| ids(s, o)),
            "fragment": v.witness_fragment,
            "zero_margin": v.zero_margin,
        });
        let lhs = if v.status == Status::Refuted { v.worst_undef } else { v.worst_undef.min(v.threshold) };
        report.push(CheckResult::new(
            format!("undef({},{}) <= delta*d", s.id(x), s.id(y)),
            lhs,
            v.threshold,
            witness,
        ));
    }
    finish(&a.common, report)
}

#[derive(Args, Debug, Serialize)]
pub struct AlphaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long = "C1", default_value_t = 2.0)]
    #[serde(rename = "C1")]
    pub c1: f64,
    #[arg(long, default_value_t = 6)]
    pub points: usize,
    /// Explicit τ grid; overrides --points.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub taus: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_EXHAUSTION_LIMIT)]
    pub limit: usize,
}

pub fn alpha(a: AlphaArgs) -> Outcome {
    let (spec, g) = load(&a.common)?;
    let s = &g.space;
    let pairs = pairs_at_least(s, s.diameter() / 2.0);
    let taus = if a.taus.is_empty() { default_tau_grid(s, a.c1, &pairs, a.points) } else { a.taus.clone() };
    let fit = estimate_fine_alpha(s, a.c1, &taus, &pairs, a.limit)?;
    let mut report = Report::new(spec, "alpha", params(&a));
    report.push(CheckResult::new(
        "alpha > 0",
        0.0,
        fit.alpha,
        json!({"c2": fit.c2, "residual": fit.residual, "table": fit.table}),
    ));
    let code = finish(&a.common, report)?;
    // the inequality is strict
    Ok(if fit.alpha > 0.0 { code } else { 1 })
}

#[derive(Args, Debug, Serialize)]
pub struct QuasiconvexArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long = "C")]
    #[serde(rename = "C")]
    pub c: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long = "max-iters", default_value_t = 60)]
    #[serde(rename = "max-iters")]
    pub max_iters: usize,
    #[arg(long, requires = "y")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<i64>,
    #[arg(long, requires = "x")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<i64>,
}

pub fn quasiconvex(a: QuasiconvexArgs) -> Outcome {
    let (spec, g) = load(&a.common)?;
    let s = &g.space;
    let pairs: Vec<(usize, usize)> = match (a.x, a.y) {
        (Some(x), Some(y)) => vec![(s.index_of(x)?, s.index_of(y)?)],
        _ => pairs_at_least(s, f64::MIN_POSITIVE).into_iter().filter(|(x, y)| x < y).collect(),
    };
    let h = s.resolution();
    let mut report = Report::new(spec, "quasiconvex", params(&a));
    for (x, y) in pairs {
        let name = format!("len({},{}) <= C/(1-delta)*d + 2h", s.id(x), s.id(y));
        match quasiconvexify(s, x, y, a.c, a.delta, a.max_iters) {
            Ok(q) => report.push(CheckResult::new(
                name,
                q.len,
                q.len_bound + 2.0 * h,
                json!({"complete": q.complete, "fragment": q.fragment, "iterations": q.ledger.len() - 1}),
            )),
            Err(piforge::Error::Refuted { x: u, y: v }) => report.push(CheckResult::new(
                name,
                f64::INFINITY,
                a.c / (1.0 - a.delta) * s.dist(x, y) + 2.0 * h,
                json!({"refuted_gap": [u, v]}),
            )),
            Err(e) => return Err(e.into()),
        }
    }
    finish(&a.common, report)
}

#[derive(Args, Debug, Serialize)]
pub struct PoincareArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    pub p: f64,
    #[arg(long = "C", default_value_t = 1.0)]
    #[serde(rename = "C")]
    pub c: f64,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<f64>,
    /// Test functions of each kind.
    #[arg(long, default_value_t = 6)]
    pub family: usize,
    /// Connectivity parameters `C,δ,ε` for the predicted constant.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub conn: Vec<f64>,
}

pub fn poincare(a: PoincareArgs) -> Outcome {
    let (spec, g) = load(&a.common)?;
    let s = &g.space;
    let radii = if a.radii.is_empty() { default_radii(s) } else { a.radii.clone() };
    let family = standard_family(s, a.family, a.common.seed);
    let mut rep = pi_scan(s, a.p, a.c, &family, &radii, None)?;
    let bound = match a.conn.as_slice() {
        [] => f64::MAX,
        [c, d, e] => {
            let k = predicted_constants(s.measured_doubling(), *c, *d, *e, a.p)?;
            rep.predicted_c_pi = Some(k.c_pi);
            k.c_pi
        }
        _ => return Err("--conn takes three values C,delta,eps".into()),
    };
    let mut report = Report::new(spec, "poincare", params(&a));
    let name = if rep.predicted_c_pi.is_some() { "C_PI_hat <= predicted C_PI" } else { "C_PI_hat finite" };
    report.push(CheckResult::new(
        name,
        rep.c_pi_hat,
        bound,
        json!({"worst": rep.worst, "evaluations": rep.evaluations, "radii": rep.radii}),
    ));
    report.push(CheckResult::new(
        "balls with lip f = 0 and f nonconstant",
        rep.zero_gradient_violations.len() as f64,
        0.0,
        json!(rep.zero_gradient_violations),
    ));
    finish(&a.common, report)
}

#[derive(Args, Debug, Serialize)]
pub struct ModulusArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    pub x: i64,
    #[arg(long)]
    pub y: i64,
    #[arg(long = "C", default_value_t = 1.0)]
    #[serde(rename = "C")]
    pub c: f64,
    #[arg(long)]
    pub p: f64,
    /// Radius of the normalizing ball B(x,s); defaults to 2C·d(x,y).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// Compare with the lower bound 1/(2 C₃ᵖ rᵖ) for this C₃.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c3: Option<f64>,
}

pub fn modulus(a: ModulusArgs) -> Outcome {
    let (spec, g) = load(&a.common)?;
    let sp = &g.space;
    let (x, y) = (sp.index_of(a.x)?, sp.index_of(a.y)?);
    let r = sp.dist(x, y);
    let radius = a.s.unwrap_or(2.0 * a.c * r);
    let m = piforge::poincare::modulus(sp, x, y, a.c, a.p, radius)?;
    let mut report = Report::new(spec, "modulus", params(&a));
    let witness = json!({
        "value": m.value,
        "empty_family": m.empty_family,
        "iterations": m.iterations,
        "active_paths": m.active_paths.len(),
        "rho": m.rho,
    });
    report.push(CheckResult::new("dual bound <= modulus", m.dual_bound, m.value, witness));
    if let Some(c3) = a.c3 {
        let lb = modulus_lower_bound(c3, a.p, r);
        report.push(CheckResult::new("lower bound <= modulus", lb, m.value, json!({"c3": c3, "r": r})));
    }
    finish(&a.common, report)
}

#[derive(Args, Debug, Serialize)]
pub struct AinftyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub eps: f64,
    /// The weight is `max(d(·, origin), floor)^exp`.
    #[arg(long = "weight-exp")]
    #[serde(rename = "weight-exp")]
    pub weight_exp: f64,
    /// Origin vertex id; defaults to a vertex of least eccentricity.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin: Option<i64>,
    #[arg(long, default_value_t = 0.05)]
    pub floor: f64,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<f64>,
}

pub fn ainfty(a: AinftyArgs) -> Outcome {
    let (spec, g) = load(&a.common)?;
    let s = &g.space;
    let origin = match a.origin {
        Some(id) => s.index_of(id)?,
        None => (0..s.n())
            .min_by(|&u, &v| {
                let ecc = |x: usize| s.row(x).iter().copied().fold(0.0, f64::max);
                ecc(u).total_cmp(&ecc(v)).then(u.cmp(&v))
            })
            .ok_or("empty space")?,
    };
    let row = s.row(origin);
    let w: Vec<f64> = row.iter().map(|&d| d.max(a.floor).powf(a.weight_exp)).collect();
    let radii = if a.radii.is_empty() { default_radii(s) } else { a.radii.clone() };
    let rep = check_ainfty(s, &w, a.delta, a.eps, &radii)?;
    let mut report = Report::new(spec, "ainfty", params(&a));
    report.push(CheckResult::new(
        "mu(E)/mu(B) <= eps when nu(E) <= delta nu(B)",
        rep.worst_mu_fraction,
        a.eps,
        json!({"violations": rep.violations.len(), "first": rep.violations.first(), "origin": s.id(origin)}),
    ));
    finish(&a.common, report)
}

#[derive(Args, Debug, Serialize)]
pub struct ThickenArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Smallest retained scale.
    #[arg(long)]
    pub h: f64,
    #[arg(long, default_value_t = RESCALED_R0)]
    pub r0: f64,
    /// Vertex ids of K; defaults to the generator's K.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub k: Vec<i64>,
    /// Vertex ids of A; defaults to the generator's A, else all vertices.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub a: Vec<i64>,
    /// Segment length of the glued space; defaults to half the shortest tree edge.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segment: Option<f64>,
    #[arg(long = "p", value_delimiter = ',', default_value = "2")]
    #[serde(rename = "p")]
    pub p_grid: Vec<f64>,
    #[arg(long, default_value_t = 12)]
    pub pairs: usize,
    #[arg(long = "pi-centers", default_value_t = 200)]
    #[serde(rename = "pi-centers")]
    pub pi_centers: usize,
    /// Write the complex as JSON here.
    #[arg(long)]
    #[serde(skip)]
    pub complex: Option<std::path::PathBuf>,
}

pub fn thicken(a: ThickenArgs) -> Outcome {
    let (spec, g) = load(&a.common)?;
    let s = &g.space;
    let to_idx = |v: &[i64]| v.iter().map(|&id| s.index_of(id)).collect::<piforge::Result<Vec<_>>>();
    let k = if a.k.is_empty() { g.k.clone().ok_or("--k is required for this space")? } else { to_idx(&a.k)? };
    let set_a = if a.a.is_empty() { g.a.clone().unwrap_or_else(|| (0..s.n()).collect()) } else { to_idx(&a.a)? };
    let c = build_complex(s, &set_a, &k, a.r0, a.h)?;
    if let Some(path) = &a.complex {
        std::fs::write(path, serde_json::to_string_pretty(&c)? + "\n")?;
    }
    let metric = glued_metric(&c);
    let est = verify_estimates(&c, &metric);
    let mut report = Report::new(spec, "thicken", params(&a));
    for e in &est.entries {
        if e.status == EstimateStatus::ByConstruction {
            continue;
        }
        report.push(CheckResult::new(
            format!("estimate {} failures", e.id),
            e.failures as f64,
            0.0,
            json!({"status": e.status, "checked": e.checked, "worst_margin": e.worst_margin, "witness": e.witness}),
        ));
    }
    let min_edge = c.edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min);
    let segment = a.segment.unwrap_or(if min_edge.is_finite() { min_edge / 2.0 } else { 1.0 });
    let glued = glued_measure(&c, segment)?;
    let opts = CertifyOptions {
        p_grid: a.p_grid.clone(),
        pairs: a.pairs,
        pi_centers: a.pi_centers,
        seed: a.common.seed,
        ..CertifyOptions::default()
    };
    let cert = certify_thickened(&c, &glued, &opts)?;
    report.push(CheckResult::new(
        "log2 doubling of glued space <= log2(2^200 D^500)",
        cert.doubling.log2(),
        cert.log2_global_bound,
        json!({"doubling": cert.doubling, "nodes": cert.nodes, "sampled": cert.doubling_sampled}),
    ));
    for r in &cert.pi {
        report.push(CheckResult::new(
            format!("C_PI_hat finite at p = {}", r.p),
            r.c_pi_hat,
            f64::MAX,
            json!({"worst": r.worst, "evaluations": r.evaluations}),
        ));
    }
    report.push(CheckResult::new(
        "glued pairs refuted (informational)",
        cert.refuted as f64,
        cert.pairs.len() as f64,
        json!({"pairs": cert.pairs, "skipped": cert.skipped_pairs, "params": opts.params}),
    ));
    finish(&a.common, report)
}

#[derive(Args, Debug, Serialize)]
pub struct ConstantsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long = "D")]
    #[serde(rename = "D")]
    pub d: f64,
    #[arg(long = "C")]
    #[serde(rename = "C")]
    pub c: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub p: f64,
}

pub fn constants(a: ConstantsArgs) -> Outcome {
    let k = predicted_constants(a.d, a.c, a.delta, a.eps, a.p)?;
    println!("alpha    {}", k.alpha);
    println!("M        {}", k.m);
    println!("C1       {}", k.c1);
    println!("C2       {}", k.c2);
    println!("M'       {}", k.m_prime);
    println!("delta'   {}", k.delta_prime);
    println!("C3       {}", k.c3);
    println!("C_PI     {}", k.c_pi);
    println!("k        {}", k.k);
    println!("eps^k    {}", k.half_ball_ratio);
    let spec = a.common.space.clone().unwrap_or_default();
    let mut report = Report::new(spec, "constants", params(&a));
    report.push(CheckResult::new("1/alpha < p", 1.0 / k.alpha, a.p, json!(k)));
    report.push(CheckResult::new("M' delta' < 1", k.m_prime * k.delta_prime, 1.0, Value::Null));
    finish(&a.common, report)
}

#[derive(Args, Debug, Serialize)]
pub struct OracleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long = "C", default_value_t = 2.0)]
    #[serde(rename = "C")]
    pub c: f64,
    #[arg(long, default_value_t = 0.3)]
    pub eps: f64,
}

pub fn oracle(a: OracleArgs) -> Outcome {
    let (spec, g) = load(&a.common)?;
    let rep = cross_check(&g.space, a.c, a.eps)?;
    let mut report = Report::new(spec, "oracle", params(&a));
    report.push(CheckResult::new(
        "search vs enumeration mismatches",
        rep.mismatches.len() as f64,
        0.0,
        json!({"pairs": rep.pairs, "front_points": rep.front_points, "mismatches": rep.mismatches}),
    ));
    finish(&a.common, report)
}
