//! Published closed-form variances, transcribed term by term.
//!
//! These are kept for comparison only; see [`super::audit`] for how they fare
//! against the moment oracle. Forms printed for the vacuum are scaled by the
//! thermal prefactor `2n̄ + 1`. Shorthands: `c = cos 2φ`, `s = sin 2φ`,
//! `3ηr² = ξ/4`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::SqueezeParams;

/// Identifiers of the transcribed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    /// General hyperbolic `S_θ`.
    ThetaHyperbolicGeneral,
    /// General `S_J`.
    JGeneral,
    /// Hyperbolic `S_θ` rewritten with `arctan(λ_p/λ)` phase shifts.
    ThetaHyperbolicSimplified,
    /// Hyperbolic `S_θ` at the two special angles.
    ThetaSpecialAngle,
    /// General oscillatory `S_θ`.
    ThetaOscillatoryGeneral,
    /// Oscillatory `S_θ` at four angle families.
    ThetaOscillatoryCases,
}

impl Form {
    pub const ALL: [Form; 6] = [
        Form::ThetaHyperbolicGeneral,
        Form::JGeneral,
        Form::ThetaHyperbolicSimplified,
        Form::ThetaSpecialAngle,
        Form::ThetaOscillatoryGeneral,
        Form::ThetaOscillatoryCases,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Form::ThetaHyperbolicGeneral => "theta_hyperbolic_general",
            Form::JGeneral => "j_general",
            Form::ThetaHyperbolicSimplified => "theta_hyperbolic_simplified",
            Form::ThetaSpecialAngle => "theta_special_angle",
            Form::ThetaOscillatoryGeneral => "theta_oscillatory_general",
            Form::ThetaOscillatoryCases => "theta_oscillatory_cases",
        }
    }

    /// `true` for forms of `S_J`, `false` for `S_θ`.
    pub fn is_j(self) -> bool {
        self == Form::JGeneral
    }
}

fn prefactor(p: &SqueezeParams) -> f64 {
    2.0 * p.nbar + 1.0
}

fn angles(p: &SqueezeParams) -> (f64, f64) {
    let (s, c) = (2.0 * p.phi).sin_cos();
    (c, s)
}

/// `φ ≡ target (mod π)`.
fn same_angle(phi: f64, target: f64) -> bool {
    let k = (phi - target) / PI;
    (k - k.round()).abs() < 1e-9
}

/// General hyperbolic `S_θ`:
/// `(2n̄+1)/(4λ_p²) · ((ξ² − λξc) sinh(2λ_p t) − λξs cosh(2λ_p t) − (λ² − λξc))`.
pub fn theta_hyperbolic_general(t: f64, p: &SqueezeParams) -> f64 {
    let (c, s) = angles(p);
    let (l, xi, lp) = (p.lambda, p.xi, p.lambda_p);
    let x = lp * (2.0 * t);
    let v = (x.sinh() * (xi * xi - l * xi * c) - x.cosh() * (l * xi * s) - (l * l - l * xi * c)) / (lp * lp * 4.0);
    prefactor(p) * v.re
}

/// Value of the general `S_J` form, or `None` where its denominator
/// `(ξc − λ)²` vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JEvaluation {
    pub value: Option<f64>,
    /// Imaginary part left over when `λ_p` is imaginary.
    pub imag: f64,
    pub singular: bool,
}

/// General `S_J`, evaluated with complex `λ_p` so it can be probed in both regimes.
pub fn j_general(t: f64, p: &SqueezeParams) -> JEvaluation {
    let (c, s) = angles(p);
    let (l, xi, lp) = (p.lambda, p.xi, p.lambda_p);
    let den_root = xi * c - l;
    if den_root.abs() <= 1e-9 * xi.max(l.abs()).max(f64::MIN_POSITIVE) {
        return JEvaluation {
            value: None,
            imag: 0.0,
            singular: true,
        };
    }
    let lp2 = lp * lp;
    let s2 = s * s;
    let x = lp * (2.0 * t);
    let a = lp2 * (xi * xi) + xi.powi(4) * s2 - l * xi.powi(3) * s2 * c + lp2 * (l * xi * c) - lp * (2.0 * l * xi * xi * s2);
    let b = lp2 * l + l * xi * xi * s2 - lp * (xi * xi) - lp * (l * xi * c);
    let tail = (Complex64::new(xi * xi * s2, 0.0) - lp2) * (l * (l - xi * c));
    let v = (a * x.cosh() - b * s * x.sinh() - tail) / (lp2 * (4.0 * den_root * den_root));
    let v = v * prefactor(p);
    JEvaluation {
        value: Some(v.re),
        imag: v.im,
        singular: false,
    }
}

/// Hyperbolic `S_θ` in phase-shifted form:
/// `ξ²/(4(ξ² − λ²)) · ((1 − cos(2φ − a))e^{2λ_p t} + (1 − cos(2φ + a))e^{−2λ_p t} + 2(λ/ξ)(c − λ/ξ))`
/// with `a = arctan(λ_p/λ)`.
pub fn theta_hyperbolic_simplified(t: f64, p: &SqueezeParams) -> f64 {
    let (c, _) = angles(p);
    let (l, xi) = (p.lambda, p.xi);
    let lp = p.lambda_p.re;
    let a = (lp / l).atan();
    let tp = 2.0 * p.phi;
    let e = (2.0 * lp * t).exp();
    let v = xi * xi / (4.0 * (xi * xi - l * l))
        * ((1.0 - (tp - a).cos()) * e + (1.0 - (tp + a).cos()) / e + 2.0 * (l / xi) * (c - l / xi));
    prefactor(p) * v
}

/// Special-angle values `¼e^{−2λ_p t}` at `φ = ½arctan(λ_p/λ) + nπ` and
/// `¼e^{2λ_p t}` at `φ = nπ − ½arctan(λ_p/λ)`; `None` at other angles.
pub fn theta_special_angle(t: f64, p: &SqueezeParams) -> Option<f64> {
    let lp = p.lambda_p.re;
    let half = 0.5 * (lp / p.lambda).atan();
    if same_angle(p.phi, half) {
        Some(prefactor(p) * 0.25 * (-2.0 * lp * t).exp())
    } else if same_angle(p.phi, -half) {
        Some(prefactor(p) * 0.25 * (2.0 * lp * t).exp())
    } else {
        None
    }
}

/// General oscillatory `S_θ`:
/// `(2n̄+1)/(4λ_p²) · (ξ(ξ − λc)cos(2λ_p′t) + ξλ_p′ s sin(2λ_p′t) + λ(ξc − λ))` with `λ_p² = −λ_p′²`.
pub fn theta_oscillatory_general(t: f64, p: &SqueezeParams) -> f64 {
    let (c, s) = angles(p);
    let (l, xi) = (p.lambda, p.xi);
    let lpp = p.lambda_p_prime();
    let x = 2.0 * lpp * t;
    let v = (xi * (xi - l * c) * x.cos() + xi * lpp * s * x.sin() + l * (xi * c - l)) / (4.0 * p.lambda_p_squared());
    prefactor(p) * v
}

/// Which of the four oscillatory angle families `φ` belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OscillatoryCase {
    /// `φ = ½ arccos(ξ/λ)`
    HalfArccos,
    /// `φ = π/2 + mπ`
    HalfPi,
    /// `φ = π + mπ`
    Pi,
    /// `φ = π/4 + mπ`
    QuarterPi,
    /// `φ = −π/4 + mπ`
    MinusQuarterPi,
}

pub fn oscillatory_case(p: &SqueezeParams) -> Option<OscillatoryCase> {
    let ratio = p.xi / p.lambda;
    if ratio.abs() <= 1.0 && same_angle(p.phi, 0.5 * ratio.acos()) {
        Some(OscillatoryCase::HalfArccos)
    } else if same_angle(p.phi, 0.5 * PI) {
        Some(OscillatoryCase::HalfPi)
    } else if same_angle(p.phi, 0.0) {
        Some(OscillatoryCase::Pi)
    } else if same_angle(p.phi, 0.25 * PI) {
        Some(OscillatoryCase::QuarterPi)
    } else if same_angle(p.phi, -0.25 * PI) {
        Some(OscillatoryCase::MinusQuarterPi)
    } else {
        None
    }
}

/// Oscillatory `S_θ` for the listed angle families; `None` elsewhere.
///
/// ```text
/// ½arccos(ξ/λ):  ¼ − 3ηr²/(Δ + 24ηr²) · sin(2λ_p′t)
/// π/2 + mπ:      ¼ + 3ηr²/(Δ + 12ηr²) · (1 − cos(2λ_p′t))
/// π + mπ:        ¼ + 3ηr²/(Δ + 36ηr²) · (cos(2λ_p′t) − 1)
/// ±π/4 + mπ:     ¼ − ξ sin(λ_p′t)/(2(ξ² − λ²)) · (ξ sin(λ_p′t) ∓ λ_p′ cos(λ_p′t))
/// ```
pub fn theta_oscillatory_cases(t: f64, p: &SqueezeParams) -> Option<f64> {
    let (l, xi) = (p.lambda, p.xi);
    let lpp = p.lambda_p_prime();
    let three_eta_r2 = 0.25 * xi;
    // Δ + 12ηr² = λ − ξ,  Δ + 24ηr² = λ,  Δ + 36ηr² = λ + ξ
    let x = 2.0 * lpp * t;
    let quarter = |sign: f64| {
        let (sn, cs) = (lpp * t).sin_cos();
        0.25 - xi * sn / (2.0 * (xi * xi - l * l)) * (xi * sn - sign * lpp * cs)
    };
    let v = match oscillatory_case(p)? {
        OscillatoryCase::HalfArccos => 0.25 - three_eta_r2 / l * x.sin(),
        OscillatoryCase::HalfPi => 0.25 + three_eta_r2 / (l - xi) * (1.0 - x.cos()),
        OscillatoryCase::Pi => 0.25 + three_eta_r2 / (l + xi) * (x.cos() - 1.0),
        OscillatoryCase::QuarterPi => quarter(1.0),
        OscillatoryCase::MinusQuarterPi => quarter(-1.0),
    };
    Some(prefactor(p) * v)
}

/// Dispatches to the published general forms: hyperbolic or oscillatory
/// `S_θ` by regime. In the degenerate band, where both divide by `λ_p² ≈ 0`,
/// the exact series-based form is used instead.
pub fn variance_theta_closed(t: f64, p: &SqueezeParams) -> f64 {
    match p.regime() {
        super::Regime::Hyperbolic => theta_hyperbolic_general(t, p),
        super::Regime::Oscillatory => theta_oscillatory_general(t, p),
        super::Regime::Degenerate => super::variance_theta(t, p),
    }
}

/// Published general `S_J`; degenerate band handled as in [`variance_theta_closed`].
pub fn variance_j_closed(t: f64, p: &SqueezeParams) -> JEvaluation {
    match p.regime() {
        super::Regime::Degenerate => JEvaluation {
            value: Some(super::variance_j(t, p)),
            imag: 0.0,
            singular: false,
        },
        _ => j_general(t, p),
    }
}
