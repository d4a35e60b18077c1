//! Numerical ground truth: second moments `⟨b²⟩`, `⟨b†b⟩` integrated in time.
//!
//! ```text
//! d⟨b²⟩/dt  = 2iλ⟨b²⟩ + iξe^{2iφ}(2⟨b†b⟩ + 1) − γ⟨b²⟩
//! d⟨b†b⟩/dt = 2ξ Im(e^{−2iφ}⟨b²⟩) − γ(⟨b†b⟩ − n_b)
//! ```
//!
//! The fluctuation operators have zero mean, so
//! `S_θ = (⟨b²⟩ + ⟨b†²⟩ + 2⟨b†b⟩ + 1)/4` and `S_J = (−⟨b²⟩ − ⟨b†²⟩ + 2⟨b†b⟩ + 1)/4`.

use serde::{Deserialize, Serialize};

use super::{SqueezeParams, TraceSource, VarianceTrace};
use crate::error::{invalid, Error, Result};
use crate::ode::{integrate_samples, StepperConfig, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Energy damping rate; 0 for the closed (undamped) dynamics.
    pub gamma_b: f64,
    /// Bath occupation the damping relaxes towards.
    pub nbar_bath: f64,
    /// Relative integration tolerance.
    pub tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            gamma_b: 0.0,
            nbar_bath: 0.0,
            tol: 1e-12,
        }
    }
}

impl OracleConfig {
    pub fn damped(gamma_b: f64, nbar_bath: f64) -> Self {
        OracleConfig {
            gamma_b,
            nbar_bath,
            ..Default::default()
        }
    }
}

/// Integrates the moment equations from a thermal state with `⟨b†b⟩ = p.nbar`
/// at `t = 0` and samples them at `times` (ascending, `>= 0`).
pub fn moment_oracle(times: &[f64], p: &SqueezeParams, cfg: &OracleConfig) -> Result<VarianceTrace> {
    if !(cfg.gamma_b >= 0.0 && cfg.gamma_b.is_finite()) {
        return Err(invalid("gamma_b", format!("must be >= 0, got {}", cfg.gamma_b)));
    }
    if !(cfg.nbar_bath >= 0.0) {
        return Err(invalid("nbar_bath", "must be >= 0"));
    }
    if !(cfg.tol > 0.0) {
        return Err(invalid("tol", "must be > 0"));
    }
    if let Some(i) = times.windows(2).position(|w| !(w[1] >= w[0])) {
        return Err(Error::NonMonotoneGrid(i + 1));
    }
    if times.first().is_some_and(|&t| !(t >= 0.0)) {
        return Err(invalid("times", "must start at t >= 0"));
    }
    let (s2, c2) = (2.0 * p.phi).sin_cos();
    let (lambda, xi, g, nb) = (p.lambda, p.xi, cfg.gamma_b, cfg.nbar_bath);
    let rhs = move |_t: f64, y: &[f64; 3], dy: &mut [f64; 3]| {
        let (mr, mi, n) = (y[0], y[1], y[2]);
        let k = 2.0 * n + 1.0;
        // 2iλm
        dy[0] = -2.0 * lambda * mi - g * mr;
        dy[1] = 2.0 * lambda * mr - g * mi;
        // iξ e^{2iφ} (2N + 1)
        dy[0] -= xi * s2 * k;
        dy[1] += xi * c2 * k;
        // Im(e^{−2iφ} m) = mi cos2φ − mr sin2φ
        dy[2] = 2.0 * xi * (mi * c2 - mr * s2) - g * (n - nb);
    };
    let scale = p.benchmark();
    let cfg_ode = StepperConfig {
        tol: Tolerance {
            rtol: cfg.tol,
            atol: cfg.tol * scale,
        },
        ..StepperConfig::new(cfg.tol)
    };
    let states = integrate_samples(rhs, 0.0, [0.0, 0.0, p.nbar], times, cfg_ode).map_err(|(_, e)| e)?;
    let s_theta = states.iter().map(|y| 0.25 * (2.0 * y[0] + 2.0 * y[2] + 1.0)).collect();
    let s_j = states.iter().map(|y| 0.25 * (-2.0 * y[0] + 2.0 * y[2] + 1.0)).collect();
    Ok(VarianceTrace {
        times: times.to_vec(),
        s_theta,
        s_j,
        regime: p.regime(),
        phi: p.phi,
        source: TraceSource::Oracle {
            gamma_b: cfg.gamma_b,
            nbar_bath: cfg.nbar_bath,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squeezing::{variance_j, variance_theta};
    use approx::assert_relative_eq;

    #[test]
    fn starts_at_thermal_benchmark() {
        let p = SqueezeParams::from_rates(0.4, 1.0, 0.3, 7.0).unwrap();
        let tr = moment_oracle(&[0.0, 0.5], &p, &OracleConfig::default()).unwrap();
        assert_eq!(tr.s_theta[0], 3.75);
        assert_eq!(tr.s_j[0], 3.75);
    }

    #[test]
    fn agrees_with_exact_forms() {
        let times: Vec<f64> = (0..=20).map(|i| 0.1 * i as f64).collect();
        for (lambda, phi) in [(0.6, 0.2), (-0.6, 2.0), (1.7, 1.1), (-1.3, 4.0)] {
            let p = SqueezeParams::from_rates(lambda, 1.0, phi, 0.5).unwrap();
            let tr = moment_oracle(&times, &p, &OracleConfig::default()).unwrap();
            for (i, &t) in times.iter().enumerate() {
                assert_relative_eq!(tr.s_theta[i], variance_theta(t, &p), max_relative = 1e-9);
                assert_relative_eq!(tr.s_j[i], variance_j(t, &p), max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn damping_relaxes_to_bath() {
        let p = SqueezeParams::from_rates(2.0, 1.0, 0.0, 0.0).unwrap();
        // Far from the instability, strong damping pulls the state to a near-thermal bath state.
        let tr = moment_oracle(&[60.0], &p, &OracleConfig::damped(5.0, 3.0)).unwrap();
        let sum = tr.s_theta[0] + tr.s_j[0];
        assert!((sum - 3.5).abs() < 0.5, "{sum}");
    }

    #[test]
    fn rejects_unsorted_times() {
        let p = SqueezeParams::from_rates(0.6, 1.0, 0.0, 0.0).unwrap();
        assert!(moment_oracle(&[1.0, 0.5], &p, &OracleConfig::default()).is_err());
    }
}
