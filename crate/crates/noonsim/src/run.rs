//! Scenario execution. Each kind maps onto `noonsim-core` calls and renders
//! a deterministic CSV or JSON document.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use noonsim_core::identity::sample_pairs;
use noonsim_core::{
    canonical_multiport, check_identity, condition_counts, evolve, free_phase_8port, fringe_point,
    make_input, nonresolving_n3_coincidence, noon_fidelity, postselect_total, project_vacuum,
    success_probability_exact, Error, FockState, InputSpec, ModeUnitary, NetworkTransfer,
    ScanResult, UNITARITY_TOLERANCE,
};

use crate::config::{Format, Kind, Scenario};
use crate::formats::{self, sig17};

/// Tolerance on the norm of evolved states before reporting on them.
const NORM_TOLERANCE: f64 = 1e-9;
const IDENTITY_SAMPLES: usize = 1000;
const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(String),
    #[error("complexity guard: {0}")]
    Guard(String),
    #[error("numerical invariant violated: {0}")]
    Invariant(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 1,
            RunError::Guard(_) => 2,
            RunError::Invariant(_) => 3,
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::ComplexityGuard { .. } => RunError::Guard(e.to_string()),
            Error::NotUnitary { .. } => RunError::Invariant(e.to_string()),
            other => RunError::Config(other.to_string()),
        }
    }
}

/// Rendered output plus a violation to report after it is written.
#[derive(Debug)]
pub struct RunOutput {
    pub body: String,
    pub violation: Option<RunError>,
}

impl RunOutput {
    fn ok(body: String) -> Self {
        Self {
            body,
            violation: None,
        }
    }
}

pub fn run(scenario: &Scenario) -> Result<RunOutput, RunError> {
    match scenario.kind {
        Kind::NoonFock => noon_fock(scenario),
        Kind::MziScan => mzi_scan(scenario),
        Kind::CoherentNoon => coherent(scenario, false),
        Kind::CoherentExact => coherent(scenario, true),
        Kind::FreePhaseCheck => free_phase_check(scenario),
        Kind::Exact2211 => exact_2211(scenario),
        Kind::NonresolvingN3 => nonresolving(scenario),
        Kind::VerifyIdentity => verify_identity(scenario),
        Kind::MatrixDump => matrix_dump(scenario),
    }
}

fn checked_network(u: ModeUnitary) -> Result<NetworkTransfer, RunError> {
    let dev = u.unitarity_deviation();
    if dev.is_nan() || dev >= UNITARITY_TOLERANCE {
        return Err(RunError::Invariant(format!(
            "transfer matrix deviates from unitary by {dev:e}"
        )));
    }
    Ok(u.into())
}

fn check_norm(s: &FockState, expected: f64) -> Result<(), RunError> {
    let n = s.norm_sqr();
    if (n - expected).abs() > NORM_TOLERANCE + s.truncation_tail() {
        return Err(RunError::Invariant(format!(
            "state norm^2 {n} differs from {expected}"
        )));
    }
    Ok(())
}

fn check_probability(p: f64, what: &str) -> Result<f64, RunError> {
    if !(-1e-12..=1.0 + 1e-12).contains(&p) {
        return Err(RunError::Invariant(format!(
            "{what} = {p} lies outside [0, 1]"
        )));
    }
    Ok(p)
}

fn multiport_output(spec: &InputSpec) -> Result<FockState, RunError> {
    let input = make_input(spec)?;
    let net = checked_network(canonical_multiport(spec.n_modes())?)?;
    let out = evolve(&input, &net)?;
    check_norm(&out, input.norm_sqr())?;
    Ok(out)
}

/// Report as JSON, or as `quantity,value` rows of its scalar entries.
fn render_report(scenario: &Scenario, report: Map<String, Value>) -> String {
    match scenario.format {
        Format::Json => formats::to_json(&Value::Object(report)),
        Format::Csv => {
            let mut out = String::from("quantity,value\n");
            for (k, v) in &report {
                let cell = match v {
                    Value::Number(x) => match x.as_u64() {
                        Some(i) if !x.is_f64() => i.to_string(),
                        _ => sig17(x.as_f64().unwrap_or(f64::NAN)),
                    },
                    Value::Bool(b) => b.to_string(),
                    Value::String(s) => s.clone(),
                    _ => continue,
                };
                out.push_str(&format!("{k},{cell}\n"));
            }
            out
        }
    }
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("report literals are objects"),
    }
}

fn noon_fock(sc: &Scenario) -> Result<RunOutput, RunError> {
    let n = sc.modes();
    let out = multiport_output(&InputSpec::single_photons(n))?;
    let counted = postselect_total(&out, &[0, 1], n as u32)?;
    let p = check_probability(counted.probability, "postselection probability")?;
    let ancillas: Vec<usize> = (2..n).collect();
    let heralded = if ancillas.is_empty() {
        None
    } else {
        Some(check_probability(
            project_vacuum(&out, &ancillas)?.probability,
            "vacuum heralding probability",
        )?)
    };
    let noon = noon_fidelity(&counted.state, (0, 1), n as u32)?;
    let report = json!({
        "kind": sc.kind.to_string(),
        "n": n,
        "postselection_probability": p,
        "analytic_probability": success_probability_exact(n as u32)?,
        "vacuum_heralding_probability": heralded,
        "fidelity": noon.fidelity.min(1.0),
        "relative_phase": noon.best_relative_phase,
        "postselected_state": formats::state_records(&counted.state),
    });
    Ok(RunOutput::ok(render_report(sc, object(report))))
}

fn mzi_scan(sc: &Scenario) -> Result<RunOutput, RunError> {
    let n = sc.modes();
    let spec = InputSpec::single_photons(n);
    let mut phis = sc.phis();
    phis.sort_by(f64::total_cmp);
    let rows = phis
        .par_iter()
        .map(|&phi| fringe_point(n, &spec, phi, sc.efficiency))
        .collect::<Result<Vec<_>, _>>()?;
    for r in &rows {
        check_probability(r.post_prob, "post_prob")?;
    }
    let scan = ScanResult {
        n,
        input: spec,
        detector_efficiency: sc.efficiency,
        rows,
    };
    let body = match sc.format {
        Format::Csv => formats::scan_to_csv(&scan),
        Format::Json => formats::scan_to_json(&scan, sc),
    };
    Ok(RunOutput::ok(body))
}

fn coherent(sc: &Scenario, exact: bool) -> Result<RunOutput, RunError> {
    let n = sc.modes();
    let alpha = sc.alpha.expect("validated scenario carries alpha").value();
    let spec = InputSpec::coherent_with_photons(n, alpha, sc.tail_epsilon);
    let out = multiport_output(&spec)?;
    let ancillas: Vec<usize> = (2..n).collect();
    let (state, vacuum_probability) = if exact && !ancillas.is_empty() {
        let vac = project_vacuum(&out, &ancillas)?;
        (vac.state, vac.probability)
    } else {
        (out.clone(), 1.0)
    };
    let counted = postselect_total(&state, &[0, 1], n as u32)?;
    let probability = check_probability(
        vacuum_probability * counted.probability,
        "success probability",
    )?;
    let noon = noon_fidelity(&counted.state, (0, 1), n as u32)?;
    let report = json!({
        "kind": sc.kind.to_string(),
        "n": n,
        "alpha": [alpha.re, alpha.im],
        "tail_epsilon": sc.tail_epsilon,
        "truncation_tail": out.truncation_tail(),
        "probability": probability,
        "fidelity": noon.fidelity.min(1.0),
        "relative_phase": noon.best_relative_phase,
        "postselected_state": formats::state_records(&counted.state),
    });
    Ok(RunOutput::ok(render_report(sc, object(report))))
}

fn free_phase_check(sc: &Scenario) -> Result<RunOutput, RunError> {
    let theta = sc.theta.expect("validated scenario carries theta");
    let canonical = canonical_multiport(4)?;
    let m = free_phase_8port(theta);
    let dev = m.unitarity_deviation();
    let report = json!({
        "kind": sc.kind.to_string(),
        "theta": theta,
        "unitarity_deviation": dev,
        "distance_to_canonical": m.max_abs_diff(&canonical),
        "distance_to_canonical_at_half_pi": free_phase_8port(FRAC_PI_2).max_abs_diff(&canonical),
        "matrix": formats::MatrixJson::from(&m),
    });
    let violation = (dev.is_nan() || dev >= UNITARITY_TOLERANCE).then(|| {
        RunError::Invariant(format!(
            "free-phase eight-port deviates from unitary by {dev:e}"
        ))
    });
    Ok(RunOutput {
        body: render_report(sc, object(report)),
        violation,
    })
}

fn exact_2211(sc: &Scenario) -> Result<RunOutput, RunError> {
    let out = multiport_output(&InputSpec::fock(&[2, 2, 1, 1]))?;
    let r = condition_counts(&out, &[(0, 1), (2, 1)])?;
    let probability = check_probability(r.probability, "heralding probability")?;
    let noon = noon_fidelity(&r.state, (0, 1), 4)?;
    let report = json!({
        "kind": sc.kind.to_string(),
        "fidelity": noon.fidelity.min(1.0),
        "probability": probability,
        "relative_phase": noon.best_relative_phase,
        "conditional_state": formats::state_records(&r.state),
    });
    Ok(RunOutput::ok(render_report(sc, object(report))))
}

fn nonresolving(sc: &Scenario) -> Result<RunOutput, RunError> {
    let mut phis = sc.phis();
    phis.sort_by(f64::total_cmp);
    let probs = phis
        .par_iter()
        .map(|&phi| nonresolving_n3_coincidence(phi))
        .collect::<Result<Vec<_>, _>>()?;
    for &p in &probs {
        check_probability(p, "coincidence probability")?;
    }
    let body = match sc.format {
        Format::Csv => formats::table_to_csv(
            &["phi", "coincidence_probability"],
            &phis
                .iter()
                .zip(&probs)
                .map(|(&a, &b)| vec![a, b])
                .collect::<Vec<_>>(),
        ),
        Format::Json => {
            let rows: Vec<Value> = phis
                .iter()
                .zip(&probs)
                .map(|(phi, p)| json!({"phi": phi, "coincidence_probability": p}))
                .collect();
            formats::to_json(&json!({"rows": rows, "config_echo": sc}))
        }
    };
    Ok(RunOutput::ok(body))
}

fn verify_identity(sc: &Scenario) -> Result<RunOutput, RunError> {
    let samples = sample_pairs(IDENTITY_SAMPLES, 2.0);
    let orders: Vec<u32> = (1..=12).collect();
    let check = check_identity(&samples, &orders);
    let pass = check.passes(IDENTITY_TOLERANCE);
    let report = json!({
        "kind": sc.kind.to_string(),
        "samples": check.samples,
        "product_residual": check.product_residual,
        "determinant_residual": check.determinant_residual,
        "tolerance": IDENTITY_TOLERANCE,
        "pass": pass,
    });
    let violation = (!pass).then(|| {
        RunError::Invariant(format!(
            "product identity residual {:e} / determinant residual {:e} exceed {IDENTITY_TOLERANCE:e}",
            check.product_residual, check.determinant_residual
        ))
    });
    Ok(RunOutput {
        body: render_report(sc, object(report)),
        violation,
    })
}

fn matrix_dump(sc: &Scenario) -> Result<RunOutput, RunError> {
    let m = canonical_multiport(sc.modes())?;
    checked_network(m.clone())?;
    Ok(RunOutput::ok(formats::matrix_to_json(&m)))
}
