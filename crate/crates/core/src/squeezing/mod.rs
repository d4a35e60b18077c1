//! Quadrature variances of the linearized fluctuation dynamics
//!
//! ```text
//! db/dt = iλ b + iξ e^{2iφ} b†,   λ = Δ + 24ηr²,  ξ = 12ηr²
//! ```
//!
//! around a steady amplitude `β₀ = r e^{iφ}`. `S_θ` and `S_J` are the
//! variances of `X₁ = (b + b†)/2` and `X₂ = (b − b†)/2i`; both equal 1/4 in
//! vacuum.
//!
//! [`variance_theta`] and [`variance_j`] are exact closed forms written with
//! functions that stay finite through `λ_p → 0`. [`reference`] holds the
//! published expressions transcribed as printed, [`oracle`] integrates the
//! second-moment equations, and [`audit`] compares the two.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::exec::Execution;

pub mod audit;
pub mod oracle;
pub mod reference;

pub use oracle::{moment_oracle, OracleConfig};

/// Relative width of the degenerate band `|ξ² − λ²| < 1e-9 ξ²`.
pub const DEGENERATE_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `ξ² > λ²`: real `λ_p`, exponential growth and decay.
    Hyperbolic,
    /// `ξ² < λ²`: imaginary `λ_p`, periodic variances.
    Oscillatory,
    /// `ξ² = λ²` within the band.
    Degenerate,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Hyperbolic => "hyperbolic",
            Regime::Oscillatory => "oscillatory",
            Regime::Degenerate => "degenerate",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    pub lambda: f64,
    pub xi: f64,
    pub phi: f64,
    pub r: f64,
    pub nbar: f64,
    #[serde(with = "crate::steadystate::complex_serde")]
    pub lambda_p: Complex64,
}

impl SqueezeParams {
    /// Builds parameters directly from `λ`, `ξ` (used by tests and the audit).
    pub fn from_rates(lambda: f64, xi: f64, phi: f64, nbar: f64) -> Result<Self> {
        if !lambda.is_finite() || !phi.is_finite() {
            return Err(invalid("lambda/phi", "must be finite"));
        }
        if !(xi >= 0.0 && xi.is_finite()) {
            return Err(invalid("xi", format!("must be >= 0, got {xi}")));
        }
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(invalid("nbar", format!("must be >= 0, got {nbar}")));
        }
        Ok(SqueezeParams {
            lambda,
            xi,
            phi,
            r: f64::NAN,
            nbar,
            lambda_p: Complex64::new(lambda_p_squared(lambda, xi), 0.0).sqrt(),
        })
    }

    pub fn with_phi(self, phi: f64) -> Self {
        SqueezeParams { phi, ..self }
    }

    pub fn with_nbar(self, nbar: f64) -> Self {
        SqueezeParams { nbar, ..self }
    }

    /// `λ_p² = ξ² − λ²`, evaluated as `(ξ − λ)(ξ + λ)`.
    pub fn lambda_p_squared(&self) -> f64 {
        lambda_p_squared(self.lambda, self.xi)
    }

    pub fn regime(&self) -> Regime {
        let lp2 = self.lambda_p_squared();
        let xi2 = self.xi * self.xi;
        if lp2.abs() < DEGENERATE_BAND * xi2 {
            Regime::Degenerate
        } else if lp2 > 0.0 {
            Regime::Hyperbolic
        } else {
            Regime::Oscillatory
        }
    }

    /// `λ_p′ = √(λ² − ξ²)`, the oscillation rate in the oscillatory regime (0 otherwise).
    pub fn lambda_p_prime(&self) -> f64 {
        (-self.lambda_p_squared()).max(0.0).sqrt()
    }

    /// Variance period `π/λ_p′` in the oscillatory regime.
    pub fn period(&self) -> Option<f64> {
        match self.regime() {
            Regime::Oscillatory => Some(std::f64::consts::PI / self.lambda_p_prime()),
            _ => None,
        }
    }

    /// Thermal benchmark `(2n̄ + 1)/4`.
    pub fn benchmark(&self) -> f64 {
        0.25 * (2.0 * self.nbar + 1.0)
    }

    /// Angle at which `S_θ = (2n̄+1)/4 · e^{−2λ_p t}` in the hyperbolic regime,
    /// `φ = ½ atan2(λ_p, λ)`.
    pub fn theta_squeezing_angle(&self) -> f64 {
        0.5 * self.lambda_p.re.atan2(self.lambda)
    }

    /// Angle at which `S_θ` grows as `e^{+2λ_p t}` (and `S_J` decays),
    /// `φ = −½ atan2(λ_p, λ)`.
    pub fn theta_amplifying_angle(&self) -> f64 {
        -self.theta_squeezing_angle()
    }

    /// Complementary angle `π/2 − ½ atan2(λ_p, λ)`, at which `S_J` grows as `e^{+2λ_p t}`.
    pub fn j_amplifying_angle(&self) -> f64 {
        0.5 * std::f64::consts::PI - self.theta_squeezing_angle()
    }
}

#[inline]
fn lambda_p_squared(lambda: f64, xi: f64) -> f64 {
    (xi - lambda) * (xi + lambda)
}

/// Parameters for drive detuning `delta_ml`, Kerr coefficient `eta`, steady
/// amplitude `r` and phase `phi`, with initial thermal occupation `nbar`.
pub fn squeeze_params(delta_ml: f64, eta: f64, r: f64, phi: f64, nbar: f64) -> Result<SqueezeParams> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(invalid("eta", format!("must be > 0, got {eta}")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid("r", format!("must be >= 0, got {r}")));
    }
    let xi = 12.0 * eta * r * r;
    let lambda = delta_ml + 2.0 * xi;
    let mut p = SqueezeParams::from_rates(lambda, xi, phi, nbar)?;
    p.r = r;
    Ok(p)
}

/// The regime boundaries `(ω_ml1, ω_ml2) = (ω_t − 36ηr², ω_t − 12ηr²)`.
/// The hyperbolic regime lies strictly between them.
pub fn characteristic_frequencies(omega_t: f64, eta: f64, r: f64) -> (f64, f64) {
    let er2 = eta * r * r;
    (omega_t - 36.0 * er2, omega_t - 12.0 * er2)
}

/// `C(t) = (cosh(2λ_p t) − 1)/λ_p²` and `S(t) = sinh(2λ_p t)/λ_p` as entire
/// functions of `λ_p²` (trigonometric for negative `λ_p²`).
pub fn growth_functions(lp2: f64, t: f64) -> (f64, f64) {
    let z = lp2 * t * t;
    if z.abs() <= 1.0 {
        // C = t² Σ_{k≥1} 4^k z^{k−1}/(2k)!,  S = t Σ_{k≥0} 2·4^k z^k/(2k+1)!
        let (mut c, mut s) = (0.0, 0.0);
        let mut term_c = 2.0; // k = 1: 4/2!
        let mut term_s = 2.0; // k = 0: 2/1!
        for k in 0..40 {
            s += term_s;
            c += term_c;
            let kf = k as f64;
            term_s *= 4.0 * z / ((2.0 * kf + 2.0) * (2.0 * kf + 3.0));
            term_c *= 4.0 * z / ((2.0 * kf + 3.0) * (2.0 * kf + 4.0));
            if term_s.abs() < 1e-18 * s.abs() && term_c.abs() < 1e-18 * c.abs() {
                break;
            }
        }
        (c * t * t, s * t)
    } else if lp2 > 0.0 {
        let lp = lp2.sqrt();
        let x = 2.0 * lp * t;
        // cosh x − 1 = 2 sinh²(x/2) avoids cancellation.
        let sh = (0.5 * x).sinh();
        (2.0 * sh * sh / lp2, x.sinh() / lp)
    } else {
        let lp = (-lp2).sqrt();
        let x = 2.0 * lp * t;
        let sn = (0.5 * x).sin();
        (2.0 * sn * sn / (-lp2), x.sin() / lp)
    }
}

/// Exact `S_θ(t)` for a thermal initial state, valid in every regime.
pub fn variance_theta(t: f64, p: &SqueezeParams) -> f64 {
    let (c1, s1) = growth_functions(p.lambda_p_squared(), t);
    let (s2, c2) = (2.0 * p.phi).sin_cos();
    let xi = p.xi;
    p.benchmark() * (1.0 + (xi * xi - p.lambda * xi * c2) * c1 - xi * s2 * s1)
}

/// Exact `S_J(t)` for a thermal initial state, valid in every regime.
pub fn variance_j(t: f64, p: &SqueezeParams) -> f64 {
    let (c1, s1) = growth_functions(p.lambda_p_squared(), t);
    let (s2, c2) = (2.0 * p.phi).sin_cos();
    let xi = p.xi;
    p.benchmark() * (1.0 + (xi * xi + p.lambda * xi * c2) * c1 + xi * s2 * s1)
}

/// Where a trace came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceSource {
    /// Exact closed form, undamped.
    ClosedForm,
    /// Integrated second moments with energy damping `gamma_b` towards a bath of occupation `nbar_bath`.
    Oracle { gamma_b: f64, nbar_bath: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceTrace {
    pub times: Vec<f64>,
    pub s_theta: Vec<f64>,
    pub s_j: Vec<f64>,
    pub regime: Regime,
    pub phi: f64,
    pub source: TraceSource,
}

impl VarianceTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `S_θ · S_J` at each sample.
    pub fn uncertainty_products(&self) -> Vec<f64> {
        self.s_theta.iter().zip(&self.s_j).map(|(a, b)| a * b).collect()
    }
}

/// Closed-form trace on the given times.
pub fn closed_trace(p: &SqueezeParams, times: &[f64]) -> VarianceTrace {
    VarianceTrace {
        times: times.to_vec(),
        s_theta: times.iter().map(|&t| variance_theta(t, p)).collect(),
        s_j: times.iter().map(|&t| variance_j(t, p)).collect(),
        regime: p.regime(),
        phi: p.phi,
        source: TraceSource::ClosedForm,
    }
}

/// Relative margin below the benchmark required to call a sample squeezed,
/// so that round-off at the benchmark itself is not reported as squeezing.
pub const SQUEEZE_MARGIN: f64 = 1e-12;

/// Per-sample verdicts `(θ squeezed, J squeezed)` against `(2n̄+1)/4`
/// (the vacuum value 1/4 when `nbar = 0`). The comparison is strict.
pub fn thermal_squeezing_check(trace: &VarianceTrace, nbar: f64) -> Vec<(bool, bool)> {
    let bench = 0.25 * (2.0 * nbar + 1.0) * (1.0 - SQUEEZE_MARGIN);
    trace
        .s_theta
        .iter()
        .zip(&trace.s_j)
        .map(|(&a, &b)| (a < bench, b < bench))
        .collect()
}

/// Oracle traces for several phases of the same `(λ, ξ, n̄)`, one per angle.
pub fn angle_traces(
    base: &SqueezeParams,
    angles: &[f64],
    times: &[f64],
    cfg: &OracleConfig,
    exec: Execution,
) -> Result<Vec<VarianceTrace>> {
    exec.map(angles, |&phi| moment_oracle(times, &base.with_phi(phi), cfg))
        .into_iter()
        .collect()
}
