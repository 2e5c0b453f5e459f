//! Poincaré scans, p-modulus, test functions and A∞ weights.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fragments::{min_integral_fragment, Fragment};
use crate::graph::dijkstra;
use crate::space::{indicator, le, lt, tol, Space};

/// Discrete `lip f(v)`: the largest difference quotient over graph neighbors.
pub fn lip_field(space: &Space, f: &[f64]) -> Vec<f64> {
    (0..space.n())
        .map(|v| {
            space
                .neighbors(v)
                .iter()
                .map(|&(u, l)| (f[v] - f[u]).abs() / l)
                .fold(0.0, f64::max)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoField {
    pub rho: Vec<f64>,
    /// Upper gradient `1_E + 1/B`.
    pub g: Vec<f64>,
}

/// `ρ(z) = inf over solid paths from x of len/(2B) + time spent in E`, where
/// an edge `(u,v)` spends `ℓ/2` in `E` for each endpoint in `E`.
pub fn rho_test_function(space: &Space, x: usize, obstacle: &[usize], b: f64) -> Result<RhoField> {
    if !(b >= 1.0) {
        return Err(invalid("B", format!("must be ≥ 1, got {b}")));
    }
    if x >= space.n() {
        return Err(invalid("x", "vertex outside the space"));
    }
    let in_e = indicator(space.n(), obstacle);
    let adj: Vec<Vec<(usize, f64)>> = (0..space.n())
        .map(|u| {
            space
                .neighbors(u)
                .iter()
                .map(|&(v, l)| {
                    let transit = l * (in_e[u] as u8 as f64 + in_e[v] as u8 as f64) / 2.0;
                    (v, l / (2.0 * b) + transit)
                })
                .collect()
        })
        .collect();
    let rho = dijkstra(&adj, &[(x, 0.0)]);
    let g = in_e.iter().map(|&e| e as u8 as f64 + 1.0 / b).collect();
    Ok(RhoField { rho, g })
}

#[derive(Clone, Debug, Serialize)]
pub struct TestFunction {
    pub name: String,
    pub values: Vec<f64>,
}

impl TestFunction {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> TestFunction {
        TestFunction {
            name: name.into(),
            values,
        }
    }
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, size: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    all.truncate(size.clamp(1, n));
    all.sort_unstable();
    all
}

/// `d(·, S)` for random sets `S` of one to three vertices, plus `d(·, B(s,t))`
/// for random balls.
pub fn distance_functions(space: &Space, count: usize, seed: u64) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = space.n();
    let diam = space.diameter();
    (0..count)
        .map(|i| {
            let set = if i % 2 == 0 {
                let size = rng.gen_range(1..=3);
                random_subset(&mut rng, n, size)
            } else {
                let c = rng.gen_range(0..n);
                let t = rng.gen::<f64>() * diam / 2.0 + space.resolution() / 2.0;
                space.closed_ball_members(c, t)
            };
            let sources: Vec<(usize, f64)> = set.iter().map(|&v| (v, 0.0)).collect();
            let values = distance_from(space, &sources);
            TestFunction::new(format!("dist{:?}", set.iter().map(|&v| space.id(v)).collect::<Vec<_>>()), values)
        })
        .collect()
}

/// `ρ` test functions for random centers and random small obstacles.
pub fn rho_functions(space: &Space, count: usize, seed: u64, b: f64) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = space.n();
    (0..count)
        .map(|_| {
            let x = rng.gen_range(0..n);
            let size = rng.gen_range(0..=(n / 4).max(1));
            let e = if size == 0 { Vec::new() } else { random_subset(&mut rng, n, size) };
            let rho = rho_test_function(space, x, &e, b).expect("B ≥ 1").rho;
            TestFunction::new(format!("rho(x={},|E|={})", space.id(x), e.len()), rho)
        })
        .collect()
}

/// 1-Lipschitz fields `min_i (h_i + d(·, s_i))` from random seeds.
pub fn inf_convolutions(space: &Space, count: usize, seed: u64) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = space.n();
    let diam = space.diameter();
    (0..count)
        .map(|i| {
            let k = rng.gen_range(2..=5).min(n);
            let seeds = random_subset(&mut rng, n, k);
            let sources: Vec<(usize, f64)> = seeds.iter().map(|&v| (v, rng.gen::<f64>() * diam / 2.0)).collect();
            TestFunction::new(format!("infconv#{i}"), distance_from(space, &sources))
        })
        .collect()
}

/// The default scan family: distance functions, `ρ` functions with `B = 1`
/// and inf-convolutions, `count` of each.
pub fn standard_family(space: &Space, count: usize, seed: u64) -> Vec<TestFunction> {
    let mut out = distance_functions(space, count, seed);
    out.extend(rho_functions(space, count, seed.wrapping_add(1), 1.0));
    out.extend(inf_convolutions(space, count, seed.wrapping_add(2)));
    out
}

/// Metric distance to the nearest source plus its offset.
fn distance_from(space: &Space, sources: &[(usize, f64)]) -> Vec<f64> {
    let mut out = vec![f64::INFINITY; space.n()];
    for &(s, h) in sources {
        let row = space.row(s);
        for (o, d) in out.iter_mut().zip(row.iter()) {
            *o = o.min(h + d);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct PiWitness {
    pub center: usize,
    pub radius: f64,
    pub function: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PoincareReport {
    pub p: f64,
    pub c: f64,
    pub radii: Vec<f64>,
    pub evaluations: usize,
    /// Empirical sup of `lhs/rhs` over the scanned balls and functions.
    pub c_pi_hat: f64,
    pub worst: Option<PiWitness>,
    /// Balls where `rhs = 0 < lhs`.
    pub zero_gradient_violations: Vec<PiWitness>,
    pub predicted_c_pi: Option<f64>,
}

fn pi_terms(space: &Space, f: &[f64], lip: &[f64], x: usize, r: f64, p: f64, c: f64) -> Result<(f64, f64)> {
    let ball = space.ball(x, r)?;
    let lhs = space.mean_deviation(f, &ball, None);
    let big = space.ball(x, c * r)?;
    let top = big.members.iter().map(|&v| lip[v]).fold(0.0, f64::max);
    if top == 0.0 {
        return Ok((lhs, 0.0));
    }
    let avg = big.members.iter().map(|&v| space.weight(v) * (lip[v] / top).powf(p)).sum::<f64>() / big.mass;
    Ok((lhs, r * top * avg.powf(1.0 / p)))
}

/// `⨍_B |f − f_B| ≤ C_PI r (⨍_{CB} (lip f)ᵖ)^{1/p}` over every center in
/// `centers` (all vertices when `None`), every radius and every function.
pub fn pi_scan(
    space: &Space,
    p: f64,
    c: f64,
    family: &[TestFunction],
    radii: &[f64],
    centers: Option<&[usize]>,
) -> Result<PoincareReport> {
    if family.is_empty() {
        return Err(invalid("family", "no test functions"));
    }
    if !(p >= 1.0) || !(c >= 1.0) {
        return Err(invalid("p", "need p ≥ 1 and C ≥ 1"));
    }
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(invalid("radii", "need at least one positive radius"));
    }
    for f in family {
        if f.values.len() != space.n() || f.values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("family", format!("`{}` is not a finite field on the space", f.name)));
        }
    }
    let all: Vec<usize> = (0..space.n()).collect();
    let centers = centers.unwrap_or(&all);
    let lips: Vec<Vec<f64>> = family.iter().map(|f| lip_field(space, &f.values)).collect();
    let jobs: Vec<(usize, usize, f64)> = family
        .iter()
        .enumerate()
        .flat_map(|(i, _)| centers.iter().flat_map(move |&x| radii.iter().map(move |&r| (i, x, r))))
        .collect();
    let terms: Vec<Result<(f64, f64)>> = jobs
        .par_iter()
        .map(|&(i, x, r)| pi_terms(space, &family[i].values, &lips[i], x, r, p, c))
        .collect();
    let mut report = PoincareReport {
        p,
        c,
        radii: radii.to_vec(),
        evaluations: jobs.len(),
        c_pi_hat: 0.0,
        worst: None,
        zero_gradient_violations: Vec::new(),
        predicted_c_pi: None,
    };
    for (&(i, x, r), t) in jobs.iter().zip(terms) {
        let (lhs, rhs) = t?;
        let witness = || PiWitness {
            center: x,
            radius: r,
            function: family[i].name.clone(),
            lhs,
            rhs,
        };
        if rhs == 0.0 {
            if lhs > tol(0.0) {
                report.zero_gradient_violations.push(witness());
            }
            continue;
        }
        let ratio = lhs / rhs;
        if ratio > report.c_pi_hat {
            report.c_pi_hat = ratio;
            report.worst = Some(witness());
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct ModulusResult {
    /// Feasible value: `⨍ ρᵖ` after scaling `ρ` to be admissible.
    pub value: f64,
    /// Dual lower bound from the restricted program.
    pub dual_bound: f64,
    pub rho: Vec<f64>,
    pub active_paths: Vec<Fragment>,
    pub iterations: usize,
    /// No admissible curve exists; the value is 0 by convention.
    pub empty_family: bool,
}

struct Restricted {
    /// `a_v = w_v / μ(B)` inside the normalizing ball, 0 outside.
    a: Vec<f64>,
    p: f64,
    /// Sparse constraint rows: `Σ_v c_v ρ_v ≥ 1`.
    rows: Vec<Vec<(usize, f64)>>,
    lambda: Vec<f64>,
}

impl Restricted {
    fn rho_from(&self, g: &[f64]) -> Vec<f64> {
        g.iter()
            .zip(&self.a)
            .map(|(&gv, &av)| {
                if av > 0.0 && gv > 0.0 {
                    (gv / (self.p * av)).powf(1.0 / (self.p - 1.0))
                } else {
                    0.0
                }
            })
            .collect()
    }

    fn gradient(&self) -> Vec<f64> {
        let mut g = vec![0.0; self.a.len()];
        for (row, &l) in self.rows.iter().zip(&self.lambda) {
            for &(v, c) in row {
                g[v] += l * c;
            }
        }
        g
    }

    fn dual(&self, g: &[f64]) -> f64 {
        let q = self.p / (self.p - 1.0);
        let mut val: f64 = self.lambda.iter().sum();
        for (&gv, &av) in g.iter().zip(&self.a) {
            if av > 0.0 && gv > 0.0 {
                val -= (self.p - 1.0) * av * (gv / (self.p * av)).powf(q);
            }
        }
        val
    }

    /// Coordinate ascent on the dual; each coordinate solves
    /// `Σ_v c_v ρ_v(λ) = 1` by bisection.
    fn solve(&mut self, sweeps: usize) {
        let mut g = self.gradient();
        for _ in 0..sweeps {
            let mut moved: f64 = 0.0;
            for k in 0..self.rows.len() {
                let row = self.rows[k].clone();
                let old = self.lambda[k];
                let integral = |lam: f64, g: &[f64]| -> f64 {
                    row.iter()
                        .map(|&(v, c)| {
                            let gv = g[v] + (lam - old) * c;
                            let av = self.a[v];
                            if av > 0.0 && gv > 0.0 {
                                c * (gv / (self.p * av)).powf(1.0 / (self.p - 1.0))
                            } else {
                                0.0
                            }
                        })
                        .sum()
                };
                let new = if integral(0.0, &g) >= 1.0 {
                    0.0
                } else {
                    let mut lo = 0.0;
                    let mut hi = old.max(1e-12);
                    while integral(hi, &g) < 1.0 {
                        hi *= 2.0;
                        if hi > 1e300 {
                            break;
                        }
                    }
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if integral(mid, &g) < 1.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                        if hi - lo <= 1e-15 * hi {
                            break;
                        }
                    }
                    hi
                };
                if new != old {
                    for &(v, c) in &row {
                        g[v] += (new - old) * c;
                    }
                    moved = moved.max((new - old).abs() / new.max(old).max(1e-300));
                    self.lambda[k] = new;
                }
            }
            if moved < 1e-13 {
                break;
            }
        }
    }
}

/// Trapezoid coefficients of `∫_γ ρ ds` per vertex.
fn path_row(space: &Space, f: &Fragment) -> Vec<(usize, f64)> {
    let mut acc: std::collections::BTreeMap<usize, f64> = Default::default();
    for leg in &f.legs {
        let l = space.edge_length(leg.u, leg.v).unwrap_or(0.0);
        *acc.entry(leg.u).or_default() += l / 2.0;
        *acc.entry(leg.v).or_default() += l / 2.0;
    }
    acc.into_iter().collect()
}

/// `Mod_p^{x,s}(Γ_{x,y,C})` over solid paths of length `≤ C·d(x,y)`, with
/// `ρ = 0` outside `B(x,s)`. Cutting planes: solve the program restricted to
/// the known paths, then add the path of least `∫ ρ ds` while it falls
/// short of 1 by more than `10⁻⁶`.
pub fn modulus(space: &Space, x: usize, y: usize, c: f64, p: f64, s: f64) -> Result<ModulusResult> {
    if x >= space.n() || y >= space.n() {
        return Err(invalid("x", "vertex outside the space"));
    }
    if !(p > 1.0) {
        return Err(invalid("p", format!("need p > 1, got {p}")));
    }
    if !(c >= 1.0) || !(s > 0.0) {
        return Err(invalid("C", "need C ≥ 1 and s > 0"));
    }
    if x == y {
        return Err(invalid("y", "the endpoints must differ"));
    }
    let budget = c * space.dist(x, y);
    let ball = space.ball(x, s)?;
    let mut a = vec![0.0; space.n()];
    for &v in &ball.members {
        a[v] = space.weight(v) / ball.mass;
    }
    let none = vec![false; space.n()];
    let empty = |iterations| ModulusResult {
        value: 0.0,
        dual_bound: 0.0,
        rho: vec![0.0; space.n()],
        active_paths: Vec::new(),
        iterations,
        empty_family: true,
    };
    let separate = |rho: &[f64]| min_integral_fragment(space, x, y, &none, budget, 0.0, rho);
    let Some((_, first)) = separate(&vec![1.0; space.n()])? else {
        return Ok(empty(0));
    };
    let mut prog = Restricted {
        a,
        p,
        rows: vec![path_row(space, &first)],
        lambda: vec![0.0],
    };
    let mut paths = vec![first];
    let mut iterations = 0;
    loop {
        iterations += 1;
        prog.solve(10_000);
        let g = prog.gradient();
        let rho = prog.rho_from(&g);
        let (t, path) = separate(&rho)?.expect("a path was found before");
        if t >= 1.0 - 1e-6 || iterations >= 500 {
            let dual = prog.dual(&g);
            let scale = if t > 0.0 { 1.0 / t } else { f64::INFINITY };
            let rho: Vec<f64> = rho.iter().map(|r| r * scale).collect();
            let value: f64 = rho.iter().zip(&prog.a).map(|(r, av)| av * r.powf(p)).sum();
            return Ok(ModulusResult {
                value,
                dual_bound: dual,
                rho,
                active_paths: paths,
                iterations,
                empty_family: false,
            });
        }
        prog.rows.push(path_row(space, &path));
        prog.lambda.push(0.0);
        paths.push(path);
    }
}

/// The modulus lower bound `1/(2 C₃ᵖ rᵖ)` for `Γ_{x,y,C₃}` at scale `2C₁r`.
pub fn modulus_lower_bound(c3: f64, p: f64, r: f64) -> f64 {
    1.0 / (2.0 * c3.powf(p) * r.powf(p))
}

/// Increasing `[0,∞) → [0,∞)` profile: `coef·t^exp` or piecewise linear
/// through samples (with `(0,0)` prepended, extended by the last slope).
#[derive(Clone, Debug, Serialize)]
pub enum MonotoneFn {
    Power { exp: f64, coef: f64 },
    Tabulated { points: Vec<(f64, f64)> },
}

impl std::str::FromStr for MonotoneFn {
    type Err = Error;

    /// `identity`, `power:EXP` or `power:EXP,COEF`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "identity" {
            return Ok(MonotoneFn::Power { exp: 1.0, coef: 1.0 });
        }
        let rest = s
            .strip_prefix("power:")
            .ok_or_else(|| invalid("form", format!("unknown profile `{s}`")))?;
        let parts: Vec<f64> = rest
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| invalid("form", format!("cannot parse `{t}`"))))
            .collect::<Result<_>>()?;
        match parts.as_slice() {
            [e] => MonotoneFn::power(*e, 1.0),
            [e, c] => MonotoneFn::power(*e, *c),
            _ => Err(invalid("form", format!("`{s}` takes one or two numbers"))),
        }
    }
}

impl MonotoneFn {
    pub fn power(exp: f64, coef: f64) -> Result<MonotoneFn> {
        if !(exp > 0.0) || !(coef > 0.0) {
            return Err(invalid("form", "power profiles need positive exponent and coefficient"));
        }
        Ok(MonotoneFn::Power { exp, coef })
    }

    pub fn tabulated(mut points: Vec<(f64, f64)>) -> Result<MonotoneFn> {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        points.retain(|p| p.0 > 0.0);
        if points.is_empty() {
            return Err(invalid("form", "need at least one sample with t > 0"));
        }
        let mut prev = (0.0, 0.0);
        for &q in &points {
            if !(q.1 > prev.1) {
                return Err(invalid("form", "samples must be strictly increasing"));
            }
            prev = q;
        }
        points.insert(0, (0.0, 0.0));
        Ok(MonotoneFn::Tabulated { points })
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            MonotoneFn::Power { exp, coef } => coef * t.max(0.0).powf(*exp),
            MonotoneFn::Tabulated { points } => interpolate(points, t.max(0.0), false),
        }
    }

    /// `ξ(t) = inf{s : F(s) ≥ t}`.
    pub fn right_inverse(&self, t: f64) -> f64 {
        match self {
            MonotoneFn::Power { exp, coef } => (t.max(0.0) / coef).powf(1.0 / exp),
            MonotoneFn::Tabulated { points } => interpolate(points, t.max(0.0), true),
        }
    }

    /// `σ(t) = sup{s : F(s) ≤ t}`; equals the right inverse for strictly
    /// increasing continuous profiles.
    pub fn gauge(&self, t: f64) -> f64 {
        self.right_inverse(t)
    }
}

fn interpolate(points: &[(f64, f64)], t: f64, inverse: bool) -> f64 {
    let key = |p: &(f64, f64)| if inverse { p.1 } else { p.0 };
    let val = |p: &(f64, f64)| if inverse { p.0 } else { p.1 };
    let i = points.partition_point(|p| key(p) < t);
    let (a, b) = if i == 0 {
        return val(&points[0]);
    } else if i >= points.len() {
        (points[points.len() - 2], points[points.len() - 1])
    } else {
        (points[i - 1], points[i])
    };
    let w = (t - key(&a)) / (key(&b) - key(&a));
    val(&a) + w * (val(&b) - val(&a))
}

#[derive(Clone, Debug, Serialize)]
pub struct NonHomogeneousForm {
    pub phi: MonotoneFn,
    pub psi: MonotoneFn,
}

impl NonHomogeneousForm {
    /// `B = max(C, [σ(ξ(1/(20D⁵))/2)]⁻¹)`.
    pub fn adversary_b(&self, c: f64, d: f64) -> f64 {
        let xi = self.psi.right_inverse(1.0 / (20.0 * d.powi(5)));
        c.max(1.0 / self.phi.gauge(xi / 2.0))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NonHomogeneousReport {
    /// Least `rΨ(⨍ Φ∘g) − ⨍|f − f_B|`.
    pub worst_margin: f64,
    pub witness: Option<PiWitness>,
    pub holds: bool,
    pub adversary_b: f64,
}

/// Pairs `(f, g)` where `g` must be an upper gradient of `f` along every edge.
pub fn check_nonhomogeneous_pi(
    space: &Space,
    form: &NonHomogeneousForm,
    c: f64,
    family: &[(TestFunction, Vec<f64>)],
    radii: &[f64],
) -> Result<NonHomogeneousReport> {
    if family.is_empty() || radii.is_empty() {
        return Err(invalid("family", "need functions and radii"));
    }
    for (f, g) in family {
        for e in space.edges() {
            let lhs = (f.values[e.u] - f.values[e.v]).abs();
            let rhs = e.length * (g[e.u] + g[e.v]) / 2.0;
            if lt(rhs, lhs) {
                return Err(invalid(
                    "family",
                    format!(
                        "`{}`: g is not an upper gradient on edge ({}, {})",
                        f.name,
                        space.id(e.u),
                        space.id(e.v)
                    ),
                ));
            }
        }
    }
    let mut worst = f64::INFINITY;
    let mut witness = None;
    for (f, g) in family {
        let phi_g: Vec<f64> = g.iter().map(|&v| form.phi.eval(v)).collect();
        for x in 0..space.n() {
            for &r in radii {
                let ball = space.ball(x, r)?;
                let lhs = space.mean_deviation(&f.values, &ball, None);
                let big = space.ball(x, c * r)?;
                let rhs = r * form.psi.eval(space.average(&phi_g, &big.members));
                if rhs - lhs < worst {
                    worst = rhs - lhs;
                    witness = Some(PiWitness {
                        center: x,
                        radius: r,
                        function: f.name.clone(),
                        lhs,
                        rhs,
                    });
                }
            }
        }
    }
    Ok(NonHomogeneousReport {
        worst_margin: worst,
        witness,
        holds: worst >= -tol(1.0),
        adversary_b: form.adversary_b(c, space.measured_doubling()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AinftyViolation {
    pub center: usize,
    pub radius: f64,
    pub set: Vec<usize>,
    pub nu_fraction: f64,
    pub mu_fraction: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AinftyReport {
    pub delta: f64,
    pub eps: f64,
    pub holds: bool,
    /// Largest `μ(E)/μ(B)` among sets with `ν(E) ≤ δ ν(B)`.
    pub worst_mu_fraction: f64,
    pub violations: Vec<AinftyViolation>,
}

/// `ν(E) ≤ δ ν(B) ⟹ μ(E) ≤ ε μ(B)` for `ν = wμ` on every ball at the given
/// radii. Candidate sets are prefixes of the ball sorted by ascending `w`;
/// these are the extremal sets when `μ` is uniform on the ball.
pub fn check_ainfty(space: &Space, w: &[f64], delta: f64, eps: f64, radii: &[f64]) -> Result<AinftyReport> {
    if w.len() != space.n() || w.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(invalid("w", "need one positive finite weight per vertex"));
    }
    if !(delta > 0.0 && delta < 1.0) || !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("delta", "need 0 < δ, ε < 1"));
    }
    let mut report = AinftyReport {
        delta,
        eps,
        holds: true,
        worst_mu_fraction: 0.0,
        violations: Vec::new(),
    };
    for x in 0..space.n() {
        for &r in radii {
            let ball = space.ball(x, r)?;
            let mut order = ball.members.clone();
            order.sort_by(|&a, &b| w[a].total_cmp(&w[b]).then(space.id(a).cmp(&space.id(b))));
            let nu_ball: f64 = order.iter().map(|&v| w[v] * space.weight(v)).sum();
            let (mut nu, mut mu) = (0.0, 0.0);
            let mut worst: Option<(usize, f64, f64)> = None;
            for (k, &v) in order.iter().enumerate() {
                nu += w[v] * space.weight(v);
                mu += space.weight(v);
                if !le(nu, delta * nu_ball) {
                    break;
                }
                worst = Some((k + 1, nu / nu_ball, mu / ball.mass));
            }
            if let Some((k, nf, mf)) = worst {
                report.worst_mu_fraction = report.worst_mu_fraction.max(mf);
                if lt(eps, mf) {
                    let mut set = order[..k].to_vec();
                    set.sort_unstable();
                    report.violations.push(AinftyViolation {
                        center: x,
                        radius: r,
                        set,
                        nu_fraction: nf,
                        mu_fraction: mf,
                    });
                }
            }
        }
    }
    report.holds = report.violations.is_empty();
    Ok(report)
}

/// The same metric with masses multiplied by `w`.
pub fn weighted_space(space: &Space, w: &[f64]) -> Result<Space> {
    space.weighted(w)
}
