//! Command surface of the `conejsr` binary.

use conejsr_core::cone::PolyhedralCone;
use conejsr_core::jsr::{jsr_bounds, JsrParams, NormChoice};
use conejsr_core::linalg::Vector;
use conejsr_core::maps::classify_map;
use conejsr_core::norms::{
    boundedness_diagnostic, build_extremal_norm, eccentricity, extremality_residual, positivity_check, BaseNorm,
    EccMethod, NormMode, DEFAULT_NORM_BUDGET,
};
use conejsr_core::problem::ProblemSpec;
use conejsr_core::regularity::{lipschitz_experiment, LipschitzParams};
use conejsr_core::semigroup::{evolve_jump, Semantics};
use conejsr_core::{family_irreducible, matrix_exponential, Error, Result};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Analyze,
    Jsr,
    Norm,
    Simulate,
    Lipschitz,
}

/// Global flags; unset values fall back to the problem document, then to defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Flags {
    pub tol: Option<f64>,
    pub seed: u64,
    pub budget: Option<u64>,
    pub depth: Option<usize>,
    pub delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Value,
    /// Tabular companion: header row then data rows.
    pub table: Option<Vec<Vec<String>>>,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(report: Value, table: Option<Vec<Vec<String>>>) -> Self {
        Self { report, table, exit_code: EXIT_OK }
    }

    pub fn csv(&self) -> Option<String> {
        let table = self.table.as_ref()?;
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in table {
            w.write_record(row).ok()?;
        }
        String::from_utf8(w.into_inner().ok()?).ok()
    }
}

/// JSON body for an error: module, message and, when known, the document path.
pub fn error_report(e: &Error) -> Value {
    let mut body = json!({ "module": e.module(), "message": e.to_string() });
    if let Error::Parse { path, .. } | Error::Validation { path, .. } = e {
        body["path"] = json!(path);
    }
    json!({ "error": body })
}

pub fn error_outcome(e: &Error) -> Outcome {
    let exit_code = if matches!(e, Error::BudgetExceeded { .. }) { EXIT_BUDGET } else { EXIT_ERROR };
    Outcome { report: error_report(e), table: None, exit_code }
}

fn row<I: IntoIterator<Item = T>, T: ToString>(items: I) -> Vec<String> {
    items.into_iter().map(|x| x.to_string()).collect()
}

fn cone_for(spec: &ProblemSpec, flags: &Flags) -> Result<PolyhedralCone> {
    match flags.tol {
        Some(tol) => PolyhedralCone::from_spec(&spec.cone_spec, tol),
        None => Ok(spec.cone.clone()),
    }
}

fn jsr_params(spec: &ProblemSpec, flags: &Flags) -> JsrParams {
    let mut p = JsrParams::default();
    if let Some(t) = &spec.tasks.jsr {
        p.depth = t.depth.unwrap_or(p.depth);
        p.delta = t.delta.unwrap_or(p.delta);
        p.budget = t.budget.unwrap_or(p.budget);
        p.step = t.step.unwrap_or(p.step);
        p.refinements = t.refinements.unwrap_or(p.refinements);
        if let Some(e) = &t.order_unit {
            p.norm = NormChoice::OrderUnit(e.clone());
        } else if t.norm.as_deref() == Some("max_row_sum") {
            p.norm = NormChoice::MaxRowSum;
        }
    }
    p.depth = flags.depth.unwrap_or(p.depth);
    p.delta = flags.delta.unwrap_or(p.delta);
    p.budget = flags.budget.unwrap_or(p.budget);
    p
}

fn vecs(v: &[Vector]) -> Vec<Vec<f64>> {
    v.iter().map(|x| x.iter().copied().collect()).collect()
}

fn label(spec: &ProblemSpec, k: usize) -> String {
    spec.family.labels.as_ref().and_then(|l| l.get(k).cloned()).unwrap_or_else(|| k.to_string())
}

fn analyze(spec: &ProblemSpec, cone: &PolyhedralCone) -> Result<Outcome> {
    let mut members = Vec::new();
    let mut table = vec![row(["member", "cone_preserving", "k_positive", "cross_positive", "exp_k_positive"])];
    for (k, a) in spec.family.matrices.iter().enumerate() {
        let c = classify_map(a, cone)?;
        table.push(vec![
            label(spec, k),
            c.cone_preserving.to_string(),
            c.k_positive.to_string(),
            c.cross_positive.to_string(),
            json!(c.exp_k_positive).as_str().unwrap_or_default().to_string(),
        ]);
        members.push(json!({ "label": label(spec, k), "classification": c }));
    }
    let irreducibility = match family_irreducible(&spec.family, cone) {
        Ok(r) => {
            let mut j = r.certificate_json();
            j["summary"] = json!(if r.is_irreducible() { "irreducible" } else { "reducible" });
            j
        }
        Err(e) => error_report(&e),
    };
    let report = json!({
        "command": "analyze",
        "cone": { "kind": cone.kind, "dim": cone.dim, "generators": vecs(&cone.generators), "facets": vecs(&cone.facets) },
        "semantics": spec.family.semantics,
        "members": members,
        "irreducibility": irreducibility,
    });
    Ok(Outcome::ok(report, Some(table)))
}

fn jsr(spec: &ProblemSpec, cone: &PolyhedralCone, flags: &Flags) -> Result<Outcome> {
    let b = jsr_bounds(&spec.family, Some(cone), &jsr_params(spec, flags))?;
    let mut table = vec![row(["t", "norm_bound", "spectral_bound", "complete"])];
    for r in &b.per_depth {
        table.push(row([r.t.to_string(), r.norm_bound.to_string(), r.spectral_bound.to_string(), r.complete.to_string()]));
    }
    let mut report = b.to_json();
    report["command"] = json!("jsr");
    let exit_code = if b.budget_exhausted && !b.complete { EXIT_BUDGET } else { EXIT_OK };
    Ok(Outcome { report, table: Some(table), exit_code })
}

fn norm(spec: &ProblemSpec, cone: &PolyhedralCone, flags: &Flags) -> Result<Outcome> {
    if spec.family.semantics != Semantics::Discrete {
        return Err(Error::BadParams("the norm command takes discrete families".into()));
    }
    let task = spec.tasks.norm.clone().unwrap_or_default();
    let n = cone.dim;
    let base = match task.base.as_deref().unwrap_or("order_unit") {
        "order_unit" => BaseNorm::order_unit(cone, task.order_unit.as_ref().map(|e| Vector::from_column_slice(e)).as_ref())?,
        "sup" => BaseNorm::sup(n),
        "l1" => BaseNorm::l1(n),
        other => return Err(Error::Validation { path: "tasks.norm.base".into(), message: format!("unknown base norm {other}") }),
    };
    let (rho_hat, jsr_report) = match task.rho_hat {
        Some(r) => (r, Value::Null),
        None => {
            let b = jsr_bounds(&spec.family, Some(cone), &jsr_params(spec, flags))?;
            (b.upper, json!({ "lower": b.lower, "upper": b.upper }))
        }
    };
    let depth = flags.depth.or(task.depth).unwrap_or(8);
    let mode = task.mode.unwrap_or(NormMode::Monotone);
    let budget = flags.budget.or(task.budget).unwrap_or(DEFAULT_NORM_BUDGET);
    let v = build_extremal_norm(&spec.family, cone, &base, rho_hat, depth, mode, budget)?;
    let samples = task.samples.unwrap_or(1000);
    let residual = extremality_residual(&v, &spec.family, cone, rho_hat, samples, flags.seed);
    let method = if n <= 3 { EccMethod::Vertex } else { EccMethod::Sampling { count: samples.max(1000), seed: flags.seed } };
    let ecc = eccentricity(&v, &base, method)?;
    let positivity = positivity_check(&v, n, samples, flags.seed);
    let boundedness = match task.boundedness_depth {
        Some(d) => match boundedness_diagnostic(&spec.family, cone, rho_hat, d) {
            Ok(r) => json!(r),
            Err(e) => error_report(&e),
        },
        None => Value::Null,
    };
    let mut table = vec![{
        let mut h = row(["index", "base"]);
        h.extend((0..n).map(|i| format!("w{i}")));
        h
    }];
    for (i, w) in v.functionals.iter().enumerate() {
        let mut r = row([i.to_string(), (i < v.base_count).to_string()]);
        r.extend(w.iter().map(|x| x.to_string()));
        table.push(r);
    }
    let report = json!({
        "command": "norm",
        "norm": v.to_json(),
        "jsr": jsr_report,
        "residual": residual,
        "eccentricity": ecc,
        "positivity_witness": positivity.map(|z| z.iter().copied().collect::<Vec<_>>()),
        "boundedness": boundedness,
    });
    Ok(Outcome::ok(report, Some(table)))
}

fn simulate(spec: &ProblemSpec) -> Result<Outcome> {
    let task = spec.tasks.simulate.clone().ok_or_else(|| Error::Validation {
        path: "tasks.simulate".into(),
        message: "simulate needs x0 and a signal".into(),
    })?;
    let n = spec.family.dim;
    let per_piece = task.samples_per_piece.unwrap_or(10).max(1);
    let mut x = Vector::from_column_slice(&task.x0);
    let mut t = 0.0;
    let mut header = row(["t", "piece", "index"]);
    header.extend((0..n).map(|i| format!("x{i}")));
    let mut table = vec![header];
    let push = |table: &mut Vec<Vec<String>>, t: f64, piece: String, index: String, x: &Vector| {
        let mut r = vec![t.to_string(), piece, index];
        r.extend(x.iter().map(|v| v.to_string()));
        table.push(r);
    };
    push(&mut table, 0.0, String::new(), String::new(), &x);
    for (p, &(k, d)) in task.signal.iter().enumerate() {
        if k >= spec.family.len() {
            return Err(Error::IndexOutOfRange { index: k, len: spec.family.len() });
        }
        if !(d >= 0.0) || !d.is_finite() {
            return Err(Error::BadGrid(format!("negative duration {d}")));
        }
        let start = x.clone();
        match spec.family.semantics {
            Semantics::Discrete => {
                if d.fract() != 0.0 {
                    return Err(Error::BadGrid(format!("discrete piece {p} needs an integer step count, got {d}")));
                }
                for _ in 0..d as usize {
                    x = &spec.family.matrices[k] * x;
                    t += 1.0;
                    push(&mut table, t, p.to_string(), k.to_string(), &x);
                }
            }
            Semantics::Continuous | Semantics::Jump => {
                for s in 1..=per_piece {
                    let tau = d * s as f64 / per_piece as f64;
                    let m = if spec.family.semantics == Semantics::Jump {
                        evolve_jump(&spec.family, &[(k, tau)])?.matrix
                    } else {
                        matrix_exponential(&spec.family.matrices[k], tau)?
                    };
                    x = m * &start;
                    push(&mut table, t + tau, p.to_string(), k.to_string(), &x);
                }
                t += d;
            }
        }
    }
    let report = json!({
        "command": "simulate",
        "semantics": spec.family.semantics,
        "t_final": t,
        "final_state": x.iter().copied().collect::<Vec<_>>(),
        "samples": table.len() - 1,
    });
    Ok(Outcome::ok(report, Some(table)))
}

fn lipschitz(spec: &ProblemSpec, cone: &PolyhedralCone, flags: &Flags) -> Result<Outcome> {
    let task = spec.tasks.lipschitz.clone().unwrap_or_default();
    let mut p = LipschitzParams { seed: flags.seed, ..LipschitzParams::default() };
    p.epsilon = task.epsilon.unwrap_or(p.epsilon);
    p.trials = task.trials.unwrap_or(p.trials);
    p.norm_depth = task.norm_depth.unwrap_or(p.norm_depth);
    p.require_k_positive = task.require_k_positive.unwrap_or(false);
    p.sample_outside = task.sample_outside.unwrap_or(false);
    p.jsr.depth = flags.depth.unwrap_or(p.jsr.depth);
    p.jsr.delta = flags.delta.unwrap_or(p.jsr.delta);
    p.jsr.budget = flags.budget.unwrap_or(p.jsr.budget);
    let r = lipschitz_experiment(&spec.family, cone, &p)?;
    let mut table = vec![row(["trial", "h", "delta_rho", "ratio"])];
    for t in &r.rows {
        table.push(row([t.trial.to_string(), t.h.to_string(), t.delta_rho.to_string(), t.ratio.map_or(String::new(), |x| x.to_string())]));
    }
    let mut report = r.to_json();
    report["command"] = json!("lipschitz");
    Ok(Outcome::ok(report, Some(table)))
}

/// Run one command on a validated problem. Errors become a JSON error report
/// with exit code 1, or 2 when a budget ran out.
pub fn run_command(command: Command, spec: &ProblemSpec, flags: &Flags) -> Outcome {
    let result = cone_for(spec, flags).and_then(|cone| match command {
        Command::Analyze => analyze(spec, &cone),
        Command::Jsr => jsr(spec, &cone, flags),
        Command::Norm => norm(spec, &cone, flags),
        Command::Simulate => simulate(spec),
        Command::Lipschitz => lipschitz(spec, &cone, flags),
    });
    result.unwrap_or_else(|e| error_outcome(&e))
}
