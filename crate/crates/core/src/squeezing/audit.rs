//! Comparison of the transcribed closed forms against the moment oracle on a
//! fixed probe set, and bookkeeping of the known disagreements.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::reference::{self, Form};
use super::{moment_oracle, OracleConfig, Regime, SqueezeParams};
use crate::error::Result;
use crate::exec::Execution;

/// Relative disagreement above which a probe counts as a mismatch.
pub const MISMATCH_TOL: f64 = 1e-6;

const AUDIT_SEED: u64 = 0x5EED_A0D1;
const TIMES: [f64; 5] = [0.0, 0.3, 0.7, 1.3, 2.1];

/// One `(λ, ξ)` point of the probe set, in units where `ξ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRegime {
    pub label: &'static str,
    pub lambda: f64,
    pub xi: f64,
}

pub const PROBE_REGIMES: [ProbeRegime; 4] = [
    ProbeRegime { label: "hyperbolic_pos", lambda: 0.6, xi: 1.0 },
    ProbeRegime { label: "hyperbolic_neg", lambda: -0.6, xi: 1.0 },
    ProbeRegime { label: "oscillatory_pos", lambda: 1.5, xi: 1.0 },
    ProbeRegime { label: "oscillatory_neg", lambda: -1.5, xi: 1.0 },
];

/// Phases probed for one regime: seeded random angles, a uniform grid, and
/// the special angles of each published form (including both the
/// `arctan` and `atan2` readings of the hyperbolic special angle).
pub fn probe_angles(reg: &ProbeRegime) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(AUDIT_SEED);
    let mut out: Vec<f64> = (0..24).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    out.extend((0..8).map(|k| k as f64 * PI / 8.0));
    let p = SqueezeParams::from_rates(reg.lambda, reg.xi, 0.0, 0.0).expect("valid probe");
    match p.regime() {
        Regime::Hyperbolic => {
            let lp = p.lambda_p.re;
            let half_atan = 0.5 * (lp / reg.lambda).atan();
            out.extend([half_atan, half_atan + PI, -half_atan, PI - half_atan]);
            out.extend([p.theta_squeezing_angle(), p.theta_amplifying_angle()]);
        }
        _ => {
            out.extend([
                0.5 * (reg.xi / reg.lambda).acos(),
                0.5 * PI,
                PI,
                0.25 * PI,
                -0.25 * PI,
            ]);
        }
    }
    out
}

pub fn probe_id(label: &str, phi: f64, t: f64) -> String {
    format!("{label}/phi={phi:.9}/t={t}")
}

/// Result of evaluating one form at one probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub form: Form,
    pub probe: String,
    pub regime: String,
    pub phi: f64,
    pub t: f64,
    pub closed: Option<f64>,
    pub oracle: f64,
    pub rel_error: f64,
    /// The form is undefined here (zero denominator).
    pub singular: bool,
}

impl Evaluation {
    pub fn mismatch(&self) -> bool {
        !self.singular && !(self.rel_error <= MISMATCH_TOL)
    }
}

fn forms_for(regime: Regime) -> &'static [Form] {
    match regime {
        Regime::Hyperbolic => &[
            Form::ThetaHyperbolicGeneral,
            Form::JGeneral,
            Form::ThetaHyperbolicSimplified,
            Form::ThetaSpecialAngle,
        ],
        _ => &[Form::JGeneral, Form::ThetaOscillatoryGeneral, Form::ThetaOscillatoryCases],
    }
}

/// `(value, singular)`; `None` when the form does not cover this angle.
fn evaluate(form: Form, t: f64, p: &SqueezeParams) -> Option<(Option<f64>, bool)> {
    match form {
        Form::ThetaHyperbolicGeneral => Some((Some(reference::theta_hyperbolic_general(t, p)), false)),
        Form::JGeneral => {
            let e = reference::j_general(t, p);
            // A non-real result counts as a disagreement.
            let value = e
                .value
                .map(|v| if e.imag.abs() > 1e-12 * v.abs().max(1.0) { f64::NAN } else { v });
            Some((value, e.singular))
        }
        Form::ThetaHyperbolicSimplified => Some((Some(reference::theta_hyperbolic_simplified(t, p)), false)),
        Form::ThetaSpecialAngle => reference::theta_special_angle(t, p).map(|v| (Some(v), false)),
        Form::ThetaOscillatoryGeneral => Some((Some(reference::theta_oscillatory_general(t, p)), false)),
        Form::ThetaOscillatoryCases => reference::theta_oscillatory_cases(t, p).map(|v| (Some(v), false)),
    }
}

/// Runs every applicable form at every probe (vacuum initial state).
pub fn run_audit(exec: Execution) -> Result<Vec<Evaluation>> {
    let mut jobs = Vec::new();
    for reg in PROBE_REGIMES.iter() {
        for phi in probe_angles(reg) {
            jobs.push((*reg, phi));
        }
    }
    let cfg = OracleConfig::default();
    let per_job: Vec<Result<Vec<Evaluation>>> = exec.map(&jobs, |(reg, phi)| {
        let p = SqueezeParams::from_rates(reg.lambda, reg.xi, *phi, 0.0)?;
        let trace = moment_oracle(&TIMES, &p, &cfg)?;
        let mut out = Vec::new();
        for &form in forms_for(p.regime()) {
            for (i, &t) in TIMES.iter().enumerate() {
                let Some((closed, singular)) = evaluate(form, t, &p) else { continue };
                let oracle = if form.is_j() { trace.s_j[i] } else { trace.s_theta[i] };
                let rel_error = match closed {
                    Some(v) => (v - oracle).abs() / oracle.abs(),
                    None => 0.0,
                };
                out.push(Evaluation {
                    form,
                    probe: probe_id(reg.label, *phi, t),
                    regime: reg.label.to_string(),
                    phi: *phi,
                    t,
                    closed,
                    oracle,
                    rel_error: if rel_error.is_nan() { f64::INFINITY } else { rel_error },
                    singular,
                });
            }
        }
        Ok(out)
    });
    let mut all = Vec::new();
    for r in per_job {
        all.extend(r?);
    }
    Ok(all)
}

/// Documented disagreements of one form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub form: Form,
    pub summary: String,
    pub probes_evaluated: usize,
    pub mismatches: usize,
    /// Largest finite relative error among the mismatches.
    pub max_rel_error: f64,
    /// Mismatches where the form returned a non-real or non-finite value.
    pub non_finite: usize,
    pub regimes_affected: Vec<String>,
    pub singular_probes: Vec<String>,
    pub mismatched_probes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindingsFile {
    pub tolerance: f64,
    pub reference: String,
    pub findings: Vec<Finding>,
}

/// Known analysis of each form, recorded with the findings.
pub fn summary_for(form: Form) -> &'static str {
    match form {
        Form::ThetaHyperbolicGeneral => {
            "cosh and sinh are interchanged and the sin(2phi) term carries lambda where lambda_p is needed; \
             correct form: (2n+1)/(4 lp^2) [(xi^2 - lambda xi c) cosh(2 lp t) - lp xi s sinh(2 lp t) - (lambda^2 - lambda xi c)]"
        }
        Form::JGeneral => {
            "disagrees with the oracle at every probe where it is defined, t = 0 included; singular where xi cos(2phi) = lambda. \
             correct form: (2n+1)/4 [1 + (xi^2 + lambda xi c)(cosh(2 lp t) - 1)/lp^2 + xi s sinh(2 lp t)/lp]"
        }
        Form::ThetaHyperbolicSimplified => {
            "twice the exact variance for lambda > 0; for lambda < 0 arctan(lp/lambda) lands on the wrong branch as well"
        }
        Form::ThetaSpecialAngle => {
            "correct for lambda > 0; for lambda < 0 the squeezing angle is 0.5*atan2(lp, lambda), not 0.5*arctan(lp/lambda)"
        }
        Form::ThetaOscillatoryGeneral => "agrees with the oracle",
        Form::ThetaOscillatoryCases => {
            "agrees for lambda > 0; for lambda < 0 the arccos family needs |lambda| in the denominator"
        }
    }
}

/// Groups evaluations into one finding per form.
pub fn summarize(evals: &[Evaluation]) -> FindingsFile {
    let mut by_form: BTreeMap<Form, Vec<&Evaluation>> = BTreeMap::new();
    for e in evals {
        by_form.entry(e.form).or_default().push(e);
    }
    let findings = Form::ALL
        .iter()
        .filter_map(|f| by_form.get(f).map(|v| (*f, v)))
        .map(|(form, v)| {
            let bad: Vec<&&Evaluation> = v.iter().filter(|e| e.mismatch()).collect();
            let regimes: BTreeSet<String> = bad.iter().map(|e| e.regime.clone()).collect();
            Finding {
                form,
                summary: if bad.is_empty() {
                    "agrees with the oracle".to_string()
                } else {
                    summary_for(form).to_string()
                },
                probes_evaluated: v.len(),
                mismatches: bad.len(),
                max_rel_error: bad
                    .iter()
                    .map(|e| e.rel_error)
                    .filter(|r| r.is_finite())
                    .fold(0.0, f64::max),
                non_finite: bad.iter().filter(|e| !e.rel_error.is_finite()).count(),
                regimes_affected: regimes.into_iter().collect(),
                singular_probes: v.iter().filter(|e| e.singular).map(|e| e.probe.clone()).collect(),
                mismatched_probes: bad.iter().map(|e| e.probe.clone()).collect(),
            }
        })
        .collect();
    FindingsFile {
        tolerance: MISMATCH_TOL,
        reference: "moment oracle, vacuum initial state, no damping, xi = 1".to_string(),
        findings,
    }
}

/// Mismatches not listed in `file`.
pub fn undocumented<'a>(evals: &'a [Evaluation], file: &FindingsFile) -> Vec<&'a Evaluation> {
    let known: BTreeSet<(Form, &str)> = file
        .findings
        .iter()
        .flat_map(|f| f.mismatched_probes.iter().map(move |p| (f.form, p.as_str())))
        .collect();
    evals
        .iter()
        .filter(|e| e.mismatch() && !known.contains(&(e.form, e.probe.as_str())))
        .collect()
}
