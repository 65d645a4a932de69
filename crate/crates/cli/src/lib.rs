//! Commands behind the `kahlerlab` binary. Each command returns an [`Output`]
//! holding a JSON document, a CSV table and the outcome of its checks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use kahlerlab::bergman::{self, approximation_table, epsilon_grid, HilbertBasisSpec, Probe, Quantization, Weight};
use kahlerlab::calabi::{self, calabi_matrix, obstruction_limit_test, pk_at_zero, pk_polynomial_test, Precision, PsdVerdict, SignCall};
use kahlerlab::fit::fit_expansion_dim;
use kahlerlab::geometry::{a2_closed_form, A2_SCALE, a2_flat_closed_form, a2_flat_reduced, curvature_closed_form, curvature_tensor_path, point_at_tau};
use kahlerlab::momentum::{scaling_check, MomentumTable};
use kahlerlab::profile::{ma_marinescu_bounds, phi_eval, BaseData, Family};
use kahlerlab::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub family: Option<Family>,
    pub mu0: f64,
    pub tau: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Tolerance of the invariant checks.
    pub tol: f64,
    pub quad_tol: f64,
    pub tail_tol: f64,
    pub sign_tol: f64,
    pub format: Format,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inject_fault: Option<String>,
}

impl RunConfig {
    pub fn new(family: Option<Family>) -> Self {
        RunConfig {
            family,
            mu0: 1.0,
            tau: Vec::new(),
            alpha: Vec::new(),
            tol: 1e-7,
            quad_tol: bergman::QUAD_TOL,
            tail_tol: bergman::TAIL_TOL,
            sign_tol: calabi::SIGN_TOL,
            format: Format::Json,
            seed: 0,
            inject_fault: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(f) = &self.family {
            f.validate().map_err(CliError::usage)?;
        }
        for (name, v) in [("mu0", self.mu0), ("tol", self.tol), ("quad_tol", self.quad_tol), ("tail_tol", self.tail_tol), ("sign_tol", self.sign_tol)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CliError::usage(format!("{name} must be positive, got {v}")));
            }
        }
        if self.tau.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(CliError::usage("tau values must be finite and nonnegative"));
        }
        if self.alpha.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(CliError::usage("alpha values must be positive"));
        }
        Ok(())
    }

    fn family(&self) -> Result<Family, CliError> {
        self.family.ok_or_else(|| CliError::usage("this command needs a family: --flat N BETA or --ok K"))
    }
}

#[derive(Debug)]
pub struct CliError {
    /// Process exit code: 2 for usage errors, 1 otherwise.
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(e: impl ToString) -> Self {
        CliError { code: 2, message: e.to_string() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Contract(_) => 2,
            _ => 1,
        };
        CliError { code, message: e.to_string() }
    }
}

/// A grid written as `a..b` (step 0.5), `a..b:step`, `x,y,z` or a single value.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| CliError::usage(format!("cannot read '{x}' as a number")));
    if let Some((a, rest)) = s.split_once("..") {
        let (b, step) = match rest.split_once(':') {
            Some((b, st)) => (num(b)?, num(st)?),
            None => (num(rest)?, 0.5),
        };
        let a = num(a)?;
        if !(step > 0.0) || b < a {
            return Err(CliError::usage(format!("bad range '{s}'")));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize;
        if count > 100_000 {
            return Err(CliError::usage(format!("range '{s}' has too many points")));
        }
        return Ok((0..=count).map(|i| a + step * i as f64).collect());
    }
    s.split(',').map(num).collect()
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Output {
    pub json: Value,
    pub table: Table,
    pub ok: bool,
}

fn envelope(command: &str, cfg: &RunConfig, ok: bool, data: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": cfg,
        "checks_passed": ok,
        "data": data,
    })
}

fn grid_or(cfg: &RunConfig, default: &[f64]) -> Vec<f64> {
    if cfg.tau.is_empty() {
        default.to_vec()
    } else {
        cfg.tau.clone()
    }
}

fn sample_z(n: u32, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

fn label(v: impl Serialize) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

fn rel(a: f64, want: f64) -> f64 {
    if want.abs() > 1e-10 {
        (a - want).abs() / want.abs()
    } else {
        (a - want).abs()
    }
}

pub fn cmd_profile(cfg: &RunConfig) -> Result<Output, CliError> {
    let base = cfg.family()?.base();
    let mut t = Table::new(&["tau", "phi", "phi_1", "phi_2", "q"]);
    let mut rows = Vec::new();
    for tau in grid_or(cfg, &parse_grid("0..5")?) {
        let pj = phi_eval(&base, tau, 2)?;
        let v = [tau, pj.values.derivative_value(0), pj.values.derivative_value(1), pj.values.derivative_value(2), pj.q_values.value()];
        t.push(v.iter().map(|x| num(*x)).collect());
        rows.push(json!({"tau": v[0], "phi": v[1], "phi_1": v[2], "phi_2": v[3], "q": v[4]}));
    }
    Ok(Output { json: envelope("profile", cfg, true, json!({ "rows": rows })), table: t, ok: true })
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = cfg.family()?;
    let table = MomentumTable::with_defaults(f.base(), cfg.mu0)?;
    let mut t = Table::new(&["tau", "t", "f"]);
    let mut rows = Vec::new();
    for tau in grid_or(cfg, &parse_grid("0.25..5:0.25")?) {
        if tau == 0.0 {
            continue;
        }
        let (tt, ff) = table.eval(tau)?;
        t.push(vec![num(tau), num(tt), num(ff)]);
        rows.push(json!({"tau": tau, "t": tt, "f": ff}));
    }
    let data = json!({ "tau_max": table.tau_max, "rows": rows });
    Ok(Output { json: envelope("solve", cfg, true, data), table: t, ok: true })
}

pub fn cmd_curvature(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = cfg.family()?;
    let table = MomentumTable::with_defaults(f.base(), cfg.mu0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut t = Table::new(&["tau", "sigma", "riem_norm2", "ric_norm2", "lap_sigma", "a2", "a2_closed_form"]);
    let mut rows = Vec::new();
    let mut ok = true;
    for tau in grid_or(cfg, &parse_grid("0..5")?) {
        let z = sample_z(f.base().n, &mut rng);
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let p = point_at_tau(&f, &table, tau, z, theta)?;
        let r = curvature_tensor_path(&f, &table, &p)?;
        ok &= r.sigma.abs() <= cfg.tol;
        let closed = match f {
            Family::OMinusK { k } => {
                let c = a2_closed_form(k, tau);
                ok &= rel(r.a2, c) < 1e-6;
                if k == 2 {
                    ok &= r.ric_norm2 < 1e-12;
                }
                Some(c)
            }
            Family::Flat { .. } => None,
        };
        t.push(vec![
            num(tau),
            num(r.sigma),
            num(r.riem_norm2),
            num(r.ric_norm2),
            num(r.lap_sigma),
            num(r.a2),
            closed.map(num).unwrap_or_default(),
        ]);
        rows.push(json!({"tau": tau, "z": p.z.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(), "xi": [p.xi.re, p.xi.im], "report": r, "a2_closed_form": closed}));
    }
    Ok(Output { json: envelope("curvature", cfg, ok, json!({ "rows": rows })), table: t, ok })
}

pub fn cmd_a2(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = cfg.family()?;
    let table = MomentumTable::with_defaults(f.base(), cfg.mu0)?;
    let mut t = Table::new(&["tau", "a2_tensor", "a2_closed_form", "error", "a2_displayed", "displayed_error"]);
    let mut rows = Vec::new();
    let mut ok = true;
    for tau in grid_or(cfg, &[0.0, 0.5, 1.0, 2.0, 5.0]) {
        let z = (0..f.base().n).map(|j| Complex64::new(0.3 - 0.1 * j as f64, 0.2)).collect();
        let p = point_at_tau(&f, &table, tau, z, 0.0)?;
        let tensor = curvature_tensor_path(&f, &table, &p)?.a2;
        // The displayed flat expression is compared but not checked; it holds only for n = 1.
        let (closed, displayed) = match f {
            Family::OMinusK { k } => (Some(a2_closed_form(k, tau)), None),
            Family::Flat { n, beta } => (a2_flat_reduced(n, beta, tau), Some(a2_flat_closed_form(&f.base(), tau)?)),
        };
        let err = closed.map(|c| rel(tensor, c));
        ok &= err.is_none_or(|e| e < 1e-6);
        let derr = displayed.map(|d| rel(tensor, d));
        let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
        t.push(vec![num(tau), num(tensor), opt(closed), opt(err), opt(displayed), opt(derr)]);
        rows.push(json!({"tau": tau, "a2_tensor": tensor, "a2_closed_form": closed, "error": err, "a2_displayed": displayed, "displayed_error": derr}));
    }
    Ok(Output { json: envelope("a2", cfg, ok, json!({ "rows": rows })), table: t, ok })
}

pub fn cmd_obstruct(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = cfg.family()?;
    let base = f.base();
    let necessary = obstruction_limit_test(&base)?;
    let mut t = Table::new(&["test", "value", "verdict"]);
    let n_sum = base.n as f64 * (base.lambda + 2.0 * base.beta);
    t.push(vec!["n(lambda+2beta)".into(), num(n_sum), label(necessary.verdict)]);
    for p in &necessary.probes {
        t.push(vec![format!("d4 at mu0={}", p.mu0), num(p.d4), label(p.sign)]);
    }
    let mut ok = necessary.consistent;
    let mut obstructed = necessary.verdict == calabi::NecessaryCondition::Violated;
    let mut data = json!({ "n_lambda_plus_2beta": n_sum, "necessary_condition": necessary });
    let mu0 = if cfg.mu0 == 1.0 { 1e-3 } else { cfg.mu0 };
    let matrix = calabi_matrix(&base, mu0, 4, Precision::Extended)?;
    t.push(vec![format!("matrix up to order 4 at mu0={mu0}"), String::new(), label(matrix.psd_verdict)]);
    obstructed |= matrix.psd_verdict == PsdVerdict::Fail;
    data["matrix"] = json!(matrix);
    if let Family::OMinusK { k } = f {
        let pk = pk_polynomial_test(k, mu0)?;
        ok &= pk.signs_agree && pk.relative_gap < 1e-6;
        obstructed |= pk.b44_sign == SignCall::Negative;
        t.push(vec!["P_k(0)".into(), pk_at_zero(k).to_string(), label(pk.b44_sign)]);
        t.push(vec![format!("b44 at mu0={mu0}"), num(pk.b44), format!("closed form {}", num(pk.b44_closed_form))]);
        data["pk"] = json!(pk);
    }
    let summary = if obstructed { "not projectively induced" } else { "no obstruction found up to order 4" };
    t.push(vec!["summary".into(), String::new(), summary.into()]);
    data["summary"] = json!(summary);
    Ok(Output { json: envelope("obstruct", cfg, ok, data), table: t, ok })
}

pub fn cmd_epsilon(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = cfg.family()?;
    let table = MomentumTable::with_defaults(f.base(), cfg.mu0)?;
    let alphas = if cfg.alpha.is_empty() { vec![6.0, 8.0, 10.0, 12.0, 16.0] } else { cfg.alpha.clone() };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let probes: Vec<Probe> = grid_or(cfg, &[0.2, 0.5, 1.0, 2.0, 3.5])
        .into_iter()
        .map(|tau| Probe::new(tau, sample_z(f.base().n, &mut rng).iter().map(|c| (c.re, c.im)).collect()))
        .collect();
    let grid = epsilon_grid(f, &table, &alphas, &probes, 0)?;
    let mut t = Table::new(&["alpha", "tau", "z", "epsilon", "tail_bound"]);
    let mut ok = true;
    for row in &grid {
        for e in row {
            ok &= e.value > 0.0 && e.tail_bound < 0.01 * e.value;
            let z: Vec<String> = e.z.iter().map(|(a, b)| format!("{a}{b:+}i")).collect();
            t.push(vec![num(e.alpha), e.tau.map(num).unwrap_or_default(), z.join(";"), num(e.value), num(e.tail_bound)]);
        }
    }
    let dim = f.dim() as u32;
    let fits: Vec<Value> = (0..probes.len())
        .map(|j| {
            let values: Vec<f64> = grid.iter().map(|row| row[j].value).collect();
            match fit_expansion_dim(&alphas, &values, dim) {
                Ok(fit) => {
                    let reference = match f {
                        Family::OMinusK { k } => Some(a2_closed_form(k, probes[j].tau) / A2_SCALE),
                        Family::Flat { .. } => None,
                    };
                    json!({"probe": probes[j], "fit": fit, "a2_over_scale": reference})
                }
                Err(e) => json!({"probe": probes[j], "error": e.to_string()}),
            }
        })
        .collect();
    let approx = approximation_table(f, &table, &alphas, &probes)?;
    let data = json!({ "estimates": grid, "fits": fits, "approximation": approx });
    Ok(Output { json: envelope("epsilon", cfg, ok, data), table: t, ok })
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

type CheckFn = fn(&RunConfig) -> kahlerlab::Result<Check>;

fn check_scalar_flat(_: &RunConfig) -> kahlerlab::Result<Check> {
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for f in [Family::Flat { n: 1, beta: -1.0 }, Family::Flat { n: 2, beta: -3.0 }, Family::OMinusK { k: 1 }, Family::OMinusK { k: 4 }] {
        let table = MomentumTable::with_defaults(f.base(), 1.0)?;
        for tau in [0.0, 0.05, 0.7, 3.0] {
            let p = point_at_tau(&f, &table, tau, sample_z(f.base().n, &mut rng), 0.5)?;
            worst = worst.max(curvature_tensor_path(&f, &table, &p)?.sigma.abs());
        }
    }
    Ok(Check { name: "scalar curvature vanishes", pass: worst < 1e-7, detail: format!("max |sigma| {worst:.1e}") })
}

fn check_ricci_flat(_: &RunConfig) -> kahlerlab::Result<Check> {
    let f = Family::OMinusK { k: 2 };
    let table = MomentumTable::with_defaults(f.base(), 1.0)?;
    let mut worst = 0.0f64;
    for tau in [0.0, 0.4, 2.0] {
        let p = point_at_tau(&f, &table, tau, vec![Complex64::new(0.5, 0.2)], 1.0)?;
        worst = worst.max(curvature_tensor_path(&f, &table, &p)?.ric_norm2);
    }
    Ok(Check { name: "O(-2) metric is Ricci-flat", pass: worst < 1e-12, detail: format!("max |Ric|^2 {worst:.1e}") })
}

fn check_a2(cfg: &RunConfig) -> kahlerlab::Result<Check> {
    let flip = if cfg.inject_fault.as_deref() == Some("a2-sign") { -1.0 } else { 1.0 };
    let mut worst = 0.0f64;
    for k in 2..=4 {
        let f = Family::OMinusK { k };
        let table = MomentumTable::with_defaults(f.base(), 1.0)?;
        for tau in [0.0, 1.0, 2.5] {
            let p = point_at_tau(&f, &table, tau, vec![Complex64::new(0.1, 0.3)], 0.0)?;
            worst = worst.max(rel(curvature_tensor_path(&f, &table, &p)?.a2, flip * a2_closed_form(k, tau)));
        }
    }
    Ok(Check { name: "a2 closed form for O(-k) matches the tensor path", pass: worst < 1e-6, detail: format!("max rel err {worst:.1e}") })
}

fn check_norms(_: &RunConfig) -> kahlerlab::Result<Check> {
    let mut worst = 0.0f64;
    for k in [1, 3, 5] {
        let f = Family::OMinusK { k };
        let table = MomentumTable::with_defaults(f.base(), 1.0)?;
        for tau in [0.5, 2.0] {
            let p = point_at_tau(&f, &table, tau, vec![Complex64::new(-0.2, 0.6)], 0.0)?;
            let r = curvature_tensor_path(&f, &table, &p)?;
            let c = curvature_closed_form(k, tau)?;
            worst = worst.max(rel(r.riem_norm2, c.riem_norm2)).max(rel(r.ric_norm2, c.ric_norm2));
        }
    }
    Ok(Check { name: "|R|^2 and |Ric|^2 closed forms match the tensor path", pass: worst < 1e-6, detail: format!("max rel err {worst:.1e}") })
}

fn check_pk(_: &RunConfig) -> kahlerlab::Result<Check> {
    let values = [pk_at_zero(1), pk_at_zero(2), pk_at_zero(3)];
    let mut gap = 0.0f64;
    let mut agree = true;
    for k in [3, 5] {
        let r = pk_polynomial_test(k, 1e-3)?;
        gap = gap.max(r.relative_gap);
        agree &= r.signs_agree && r.b44 < 0.0;
    }
    Ok(Check {
        name: "eighth-order obstruction: P_k(0) and b44 by two routes",
        pass: values == [32, 7, -18] && agree && gap < 1e-6,
        detail: format!("P_k(0) {values:?}; route gap {gap:.1e}"),
    })
}

fn check_k1_psd(_: &RunConfig) -> kahlerlab::Result<Check> {
    let r = calabi_matrix(&BaseData::projective_line(1)?, 1.0, 4, Precision::Double)?;
    Ok(Check { name: "O(-1) Calabi matrix nonnegative up to order 4", pass: r.psd_verdict == PsdVerdict::PassUpToOrder, detail: format!("{:?}", r.psd_verdict) })
}

fn check_flat_obstruction(_: &RunConfig) -> kahlerlab::Result<Check> {
    let r = obstruction_limit_test(&BaseData::flat(2, -1.5)?)?;
    Ok(Check {
        name: "flat(2, -1.5) violates the fourth-order necessary condition",
        pass: r.verdict == calabi::NecessaryCondition::Violated && r.consistent,
        detail: format!("margin {}", r.margin),
    })
}

fn check_momentum(_: &RunConfig) -> kahlerlab::Result<Check> {
    let table = MomentumTable::with_defaults(BaseData::projective_line(1)?, 1.0)?;
    let mut worst = 0.0f64;
    for tau in [1e-3, 0.3, 1.0, 7.0] {
        let (t, f) = table.eval(tau)?;
        worst = worst.max((t - 0.5 * tau.ln()).abs()).max((f - 0.5 * (tau - 1.0)).abs());
    }
    let mut scaling = 0.0f64;
    for c in [0.5, 2.0, 3.0] {
        scaling = scaling.max(scaling_check(&BaseData::projective_line(3)?, c, 1.0)?);
    }
    Ok(Check {
        name: "momentum profile: linear closed form and scaling law",
        pass: worst < 1e-10 && scaling < 1e-7,
        detail: format!("closed form {worst:.1e}; scaling {scaling:.1e}"),
    })
}

fn check_gauge(_: &RunConfig) -> kahlerlab::Result<Check> {
    let f = Family::OMinusK { k: 3 };
    let mut vals = Vec::new();
    for mu0 in [0.5, 1.0, 2.0] {
        let table = MomentumTable::with_defaults(f.base(), mu0)?;
        let p = point_at_tau(&f, &table, 0.8, vec![Complex64::new(0.3, 0.3)], 0.0)?;
        vals.push(curvature_tensor_path(&f, &table, &p)?.riem_norm2);
    }
    let spread = bergman::relative_spread(&vals);
    Ok(Check { name: "curvature does not depend on mu0", pass: spread < 1e-7, detail: format!("spread {spread:.1e}") })
}

fn check_bounds(_: &RunConfig) -> kahlerlab::Result<Check> {
    let grid: Vec<f64> = (0..=100).map(|i| 1000.0 * (i as f64 / 100.0).powi(3)).collect();
    let mut pass = true;
    for b in [BaseData::flat(1, -1.0)?, BaseData::flat(2, -3.0)?, BaseData::projective_line(1)?, BaseData::projective_line(4)?] {
        pass &= ma_marinescu_bounds(&b, &grid)?.passes(1e-7);
    }
    Ok(Check { name: "bounds of (phi Q)'/Q and its derivative", pass, detail: "tau in [0, 1000]".into() })
}

fn check_gaussian(_: &RunConfig) -> kahlerlab::Result<Check> {
    let f = Family::Flat { n: 1, beta: -1.0 };
    let table = MomentumTable::with_defaults(f.base(), 1.0)?;
    let alpha = 3.0f64;
    let mut q = Quantization::new(HilbertBasisSpec::new(f, alpha)?.with_weight(Weight::GaussianModel)?, &table)?;
    let mut worst = 0.0f64;
    for (m, l) in [(0u32, 0u32), (4, 9), (30, 2)] {
        let want = 2.0 * std::f64::consts::PI.ln() + ln_factorial(m) + ln_factorial(l) - (m + l + 2) as f64 * alpha.ln();
        worst = worst.max((q.log_norm(&[m], l)? - want).exp_m1().abs());
    }
    let ortho = q.orthogonality_residual((&[2], 1), (&[3], 1))?;
    Ok(Check {
        name: "Gaussian monomial norms and orthogonality",
        pass: worst < 1e-8 && ortho < 1e-10,
        detail: format!("norm rel err {worst:.1e}; orthogonality {ortho:.1e}"),
    })
}

fn ln_factorial(m: u32) -> f64 {
    (1..=m).map(|i| (i as f64).ln()).sum()
}

fn check_epsilon_constant(_: &RunConfig) -> kahlerlab::Result<Check> {
    let f = Family::OMinusK { k: 1 };
    let table = MomentumTable::with_defaults(f.base(), 1.0)?;
    let probes = [Probe::new(0.3, vec![(0.0, 0.0)]), Probe::new(1.0, vec![(1.0, 0.5)]), Probe::new(3.0, vec![(-2.0, 0.0)])];
    let row = &epsilon_grid(f, &table, &[4.0], &probes, 0)?[0];
    let vals: Vec<f64> = row.iter().map(|e| e.value).collect();
    let spread = bergman::relative_spread(&vals);
    Ok(Check { name: "O(-1) epsilon function is constant", pass: spread < 0.02, detail: format!("spread {spread:.1e}") })
}

fn check_range_error(_: &RunConfig) -> kahlerlab::Result<Check> {
    let table = MomentumTable::with_defaults(BaseData::projective_line(2)?, 1.0)?;
    let beyond = table.tau_max * 2.0;
    let pass = matches!(table.t_of_tau(beyond), Err(Error::Range { .. }));
    Ok(Check { name: "momentum beyond the table is a range error", pass, detail: format!("tau_max {}", table.tau_max) })
}

const CHECKS: [CheckFn; 13] = [
    check_scalar_flat,
    check_ricci_flat,
    check_a2,
    check_norms,
    check_pk,
    check_k1_psd,
    check_flat_obstruction,
    check_momentum,
    check_gauge,
    check_bounds,
    check_gaussian,
    check_epsilon_constant,
    check_range_error,
];

pub fn cmd_verify(cfg: &RunConfig) -> Result<Output, CliError> {
    let mut t = Table::new(&["status", "check", "detail"]);
    let mut rows = Vec::new();
    let mut ok = true;
    for c in CHECKS {
        let (name, pass, detail) = match c(cfg) {
            Ok(ch) => (ch.name.to_string(), ch.pass, ch.detail),
            Err(e) => ("check raised an error".to_string(), false, e.to_string()),
        };
        ok &= pass;
        t.push(vec![if pass { "PASS" } else { "FAIL" }.into(), name.clone(), detail.clone()]);
        rows.push(json!({"check": name, "pass": pass, "detail": detail}));
    }
    Ok(Output { json: envelope("verify", cfg, ok, json!({ "checks": rows })), table: t, ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0..1").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("1..2:0.25").unwrap().len(), 5);
        assert_eq!(parse_grid("0.2, 3").unwrap(), vec![0.2, 3.0]);
        assert_eq!(parse_grid("4").unwrap(), vec![4.0]);
        assert!(parse_grid("2..1").is_err());
        assert!(parse_grid("x").is_err());
    }

    #[test]
    fn numbers_have_seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn config_round_trips() {
        let mut c = RunConfig::new(Some(Family::Flat { n: 2, beta: -1.5 }));
        c.tau = vec![0.1, 1.0 / 3.0];
        c.alpha = vec![6.0, 8.5];
        c.seed = 42;
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut c = RunConfig::new(Some(Family::OMinusK { k: 0 }));
        assert_eq!(c.validate().unwrap_err().code, 2);
        c.family = Some(Family::OMinusK { k: 1 });
        c.tol = 0.0;
        assert!(c.validate().is_err());
    }
}
