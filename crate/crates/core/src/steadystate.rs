//! Driven, damped mean-field steady states of the Kerr librational mode.
//!
//! In the frame rotating at the drive frequency the amplitude obeys
//!
//! ```text
//! dβ/dt = (iΔ − γ/2 + 12iη(|β|² + 1)) β − iΩ/2
//! ```
//!
//! Setting the left side to zero and taking the modulus squared gives a cubic
//! in the occupation `n = |β|²`:
//!
//! ```text
//! Ω²/4 = n [γ²/4 + (Δ + 12η(n + 1))²]
//! ```
//!
//! Internally the cubic is solved in `x = 12η n`, which has units of rad/s and
//! keeps the coefficients well scaled for any `η`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cubic;
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Parameters of the mean-field equation, all in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldParams {
    /// Drive detuning `ω_ml − ω_t` (signed).
    pub delta_ml: f64,
    /// Drive amplitude `Ω`.
    pub omega_drive: f64,
    pub gamma_b: f64,
    pub eta: f64,
}

impl MeanFieldParams {
    pub fn new(delta_ml: f64, omega_drive: f64, gamma_b: f64, eta: f64) -> Result<Self> {
        let p = MeanFieldParams {
            delta_ml,
            omega_drive,
            gamma_b,
            eta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delta_ml.is_finite() {
            return Err(invalid("delta_ml", "must be finite"));
        }
        if !(self.omega_drive >= 0.0 && self.omega_drive.is_finite()) {
            return Err(invalid("omega_drive", format!("must be >= 0, got {}", self.omega_drive)));
        }
        if !(self.gamma_b >= 0.0 && self.gamma_b.is_finite()) {
            return Err(invalid("gamma_b", format!("must be >= 0, got {}", self.gamma_b)));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(invalid("eta", format!("must be > 0, got {}", self.eta)));
        }
        Ok(())
    }

    pub fn with_drive(self, omega_drive: f64) -> Self {
        MeanFieldParams {
            omega_drive,
            ..self
        }
    }

    /// `12η`
    #[inline]
    pub fn kerr_rate(&self) -> f64 {
        12.0 * self.eta
    }

    /// Linear detuning including the zero-point Kerr shift, `Δ + 12η`.
    #[inline]
    pub fn shifted_detuning(&self) -> f64 {
        self.delta_ml + self.kerr_rate()
    }

    /// Frequency `Δ + 12η(n + 1)` seen by the amplitude at occupation `n`.
    #[inline]
    pub fn dressed_detuning(&self, n: f64) -> f64 {
        self.shifted_detuning() + self.kerr_rate() * n
    }

    /// Effective detuning `Δ + 24ηn`.
    #[inline]
    pub fn effective_detuning(&self, n: f64) -> f64 {
        self.delta_ml + 24.0 * self.eta * n
    }

    /// Right side of the steady-state cubic, `4n[γ²/4 + (Δ + 12η(n+1))²]`,
    /// i.e. the squared drive that supports occupation `n`.
    pub fn drive_squared_for(&self, n: f64) -> f64 {
        let d = self.dressed_detuning(n);
        4.0 * n * (0.25 * self.gamma_b * self.gamma_b + d * d)
    }

    /// Signed residual `Ω²/4 − n[γ²/4 + (Δ + 12η(n+1))²]`.
    pub fn cubic_residual(&self, n: f64) -> f64 {
        0.25 * (self.omega_drive * self.omega_drive - self.drive_squared_for(n))
    }
}

/// Real steady-state occupations, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyRoots {
    pub n: Vec<f64>,
    /// Two of the roots coincide (saddle-node tangency).
    pub tangent: bool,
}

impl SteadyRoots {
    pub fn count(&self) -> usize {
        self.n.len()
    }
}

fn merge_tolerance(n: f64) -> f64 {
    1e-8 * n.abs().max(1.0)
}

/// Solves the steady-state cubic. Returns one or three roots (a tangent
/// double root is listed twice).
pub fn steady_occupations(p: &MeanFieldParams) -> SteadyRoots {
    let a = p.kerr_rate();
    let d0 = p.shifted_detuning();
    let q = a * 0.25 * p.omega_drive * p.omega_drive;
    // x³ + 2 d0 x² + (γ²/4 + d0²) x − q = 0,  x = a n
    let b = 2.0 * d0;
    let c = 0.25 * p.gamma_b * p.gamma_b + d0 * d0;
    let mut n: Vec<f64> = cubic::real_roots(b, c, -q)
        .into_iter()
        .map(|x| (x / a).max(0.0))
        .collect();
    n.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let mut tangent = false;
    if n.len() == 3 {
        for i in 0..2 {
            if (n[i + 1] - n[i]).abs() <= merge_tolerance(n[i + 1]) {
                let mid = 0.5 * (n[i] + n[i + 1]);
                n[i] = mid;
                n[i + 1] = mid;
                tangent = true;
            }
        }
    }
    SteadyRoots { n, tangent }
}

/// Complex steady amplitude for a root `n` of the cubic.
///
/// `β₀ = (iΩ/2) / (−γ/2 + i(Δ + 12η(n+1)))`
pub fn beta_from_n(p: &MeanFieldParams, n: f64) -> Result<Complex64> {
    let denom = Complex64::new(-0.5 * p.gamma_b, p.dressed_detuning(n));
    let numer = Complex64::new(0.0, 0.5 * p.omega_drive);
    if p.omega_drive == 0.0 {
        if n == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        // Undriven self-sustained orbit (γ = 0): the phase is free.
        if p.gamma_b == 0.0 && p.dressed_detuning(n).abs() <= 1e-9 * p.kerr_rate() * n.max(1.0) {
            return Ok(Complex64::new(n.sqrt(), 0.0));
        }
        return Err(Error::NotARoot {
            n,
            residual: f64::INFINITY,
        });
    }
    if denom.norm() == 0.0 {
        return Err(Error::NotARoot {
            n,
            residual: f64::INFINITY,
        });
    }
    let beta = numer / denom;
    let residual = (beta.norm_sqr() - n).abs() / n.max(f64::MIN_POSITIVE);
    if residual > 1e-9 {
        return Err(Error::NotARoot { n, residual });
    }
    Ok(beta)
}

/// 2×2 complex matrix, row-major.
pub type Matrix2 = [[Complex64; 2]; 2];

pub fn trace(m: &Matrix2) -> Complex64 {
    m[0][0] + m[1][1]
}

pub fn det(m: &Matrix2) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Eigenvalues of a 2×2 matrix from its trace and determinant.
pub fn eigenvalues(m: &Matrix2) -> [Complex64; 2] {
    let half_tr = 0.5 * trace(m);
    let root = (half_tr * half_tr - det(m)).sqrt();
    [half_tr + root, half_tr - root]
}

/// Fluctuation matrix `A` of `d/dt (β₁, β₁*) = −A (β₁, β₁*)`.
///
/// `A = [[κ + 2χn, χβ₀²], [χ*β₀*², κ* + 2χ*n]]` with `χ = −12iη` and
/// `κ = γ/2 − i(Δ + 12η)`.
pub fn stability_matrix(p: &MeanFieldParams, n: f64, beta0: Complex64) -> Matrix2 {
    let chi = Complex64::new(0.0, -p.kerr_rate());
    let kappa = Complex64::new(0.5 * p.gamma_b, -p.shifted_detuning());
    let b2 = beta0 * beta0;
    [
        [kappa + 2.0 * chi * n, chi * b2],
        [chi.conj() * b2.conj(), kappa.conj() + 2.0 * chi.conj() * n],
    ]
}

/// `Det(A)` in the expanded form `|κ|² + 2(χκ* + κχ*)n + 3|χ|²n²`, which is
/// also `dΩ²/dn / 4` along the steady-state curve.
pub fn stability_determinant(p: &MeanFieldParams, n: f64) -> f64 {
    let a = p.kerr_rate();
    let d0 = p.shifted_detuning();
    0.25 * p.gamma_b * p.gamma_b + d0 * d0 + 4.0 * a * d0 * n + 3.0 * a * a * n * n
}

/// Linear-stability verdict from the Routh-Hurwitz conditions on `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    /// Zero trace or zero determinant: neither attracting nor repelling at linear order.
    Marginal,
}

impl Stability {
    pub fn is_stable(self) -> bool {
        self == Stability::Stable
    }
}

/// Stable iff `Re Tr A > 0` and `Re Det A > 0`. A negative determinant is a
/// saddle regardless of damping; zero damping with positive determinant is a
/// centre and reported as marginal.
pub fn classify_stability(a: &Matrix2) -> Stability {
    let tr = trace(a).re;
    let dt = det(a).re;
    if dt < 0.0 {
        Stability::Unstable
    } else if tr > 0.0 && dt > 0.0 {
        Stability::Stable
    } else if tr < 0.0 {
        Stability::Unstable
    } else {
        Stability::Marginal
    }
}

/// One steady-state solution with its linear-stability data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyBranch {
    pub n: f64,
    #[serde(with = "complex_serde")]
    pub beta0: Complex64,
    /// `Δ + 24ηn`
    pub delta_eff: f64,
    pub stability: Stability,
    /// Eigenvalues of `−A`; the branch is stable when both have negative real part.
    #[serde(with = "complex_pair_serde")]
    pub eigenvalues: [Complex64; 2],
    pub tangent: bool,
}

impl SteadyBranch {
    pub fn stable(&self) -> bool {
        self.stability.is_stable()
    }
}

/// All steady branches at the drive in `p`, ascending in `n`.
pub fn steady_branches(p: &MeanFieldParams) -> Result<Vec<SteadyBranch>> {
    p.validate()?;
    let roots = steady_occupations(p);
    let mut out = Vec::with_capacity(roots.count());
    for (i, &n) in roots.n.iter().enumerate() {
        let beta0 = beta_from_n(p, n)?;
        let a = stability_matrix(p, n, beta0);
        let tangent_here = roots.tangent && {
            let prev = i.checked_sub(1).map(|j| roots.n[j]);
            let next = roots.n.get(i + 1).copied();
            prev == Some(n) || next == Some(n)
        };
        let stability = if tangent_here {
            Stability::Marginal
        } else {
            classify_stability(&a)
        };
        let ev = eigenvalues(&a);
        out.push(SteadyBranch {
            n,
            beta0,
            delta_eff: p.effective_detuning(n),
            stability,
            eigenvalues: [-ev[0], -ev[1]],
            tangent: tangent_here,
        });
    }
    Ok(out)
}

/// Outcome of the bistability test on the drive frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BistabilityCheck {
    pub bistable: bool,
    /// Critical drive frequency `ω_t − 12η − √3γ/2`, rad/s.
    pub omega_c: f64,
}

/// Three steady states exist for some drive amplitude iff
/// `0 ≤ ω_ml < ω_t − 12η − √3γ/2`. At equality the response curve has an
/// inflection ("platform") and is reported as not bistable.
pub fn bistability_condition(omega_ml: f64, omega_t: f64, eta: f64, gamma_b: f64) -> BistabilityCheck {
    let omega_c = omega_t - critical_offset(eta, gamma_b);
    BistabilityCheck {
        bistable: omega_ml >= 0.0 && omega_ml < omega_c,
        omega_c,
    }
}

/// `ω_t − ω_c = 12η(ζ + 1)` with `ζ = √3γ/(24η)`.
#[inline]
pub fn critical_offset(eta: f64, gamma_b: f64) -> f64 {
    12.0 * eta + 0.5 * SQRT3 * gamma_b
}

/// Characteristic detuning `δ = ω_ml − ω_c`; bistable iff `δ < 0`.
#[inline]
pub fn characteristic_detuning(delta_ml: f64, eta: f64, gamma_b: f64) -> f64 {
    delta_ml + critical_offset(eta, gamma_b)
}

/// Turning points in effective detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoints {
    pub delta_eff_plus: f64,
    pub delta_eff_minus: f64,
    /// `Δ_eff+ − Δ_eff−`
    pub window: f64,
    /// Both turning points lie at non-negative occupation (`δ ≤ 0`). For
    /// `δ ≥ √3γ` the formulas are real but describe negative occupations.
    pub physical: bool,
}

/// `Δ_eff± = [−δ + 12η(ζ − 3) ± 2√(δ² − √3γδ)] / 3` and
/// `Δ_w = (4/3)√(δ² − √3γδ)`.
///
/// Fails with [`Error::WindowClosed`] when the square root is imaginary
/// (`0 < δ < √3γ`).
pub fn turning_points(delta: f64, eta: f64, gamma_b: f64) -> Result<TurningPoints> {
    let disc = delta * delta - SQRT3 * gamma_b * delta;
    if disc < 0.0 {
        return Err(Error::WindowClosed { delta, gamma_b });
    }
    let zeta = SQRT3 * gamma_b / (24.0 * eta);
    let centre = (-delta + 12.0 * eta * (zeta - 3.0)) / 3.0;
    let half = 2.0 * disc.sqrt() / 3.0;
    Ok(TurningPoints {
        delta_eff_plus: centre + half,
        delta_eff_minus: centre - half,
        window: 4.0 * disc.sqrt() / 3.0,
        physical: delta <= 0.0,
    })
}

/// Damping that gives a bistable window of width `window` at detuning
/// `delta_ml`: inverts `Δ_w = (4/3)√((Δ + 12η)² − 3γ²/4)`.
pub fn damping_for_window(delta_ml: f64, eta: f64, window: f64) -> Result<f64> {
    let d0 = delta_ml + 12.0 * eta;
    let g2 = (4.0 * d0 * d0 - 2.25 * window * window) / 3.0;
    if !(window > 0.0) || !(d0 < 0.0) || !(g2 >= 0.0) {
        return Err(invalid(
            "window",
            format!("no damping gives window {window} at shifted detuning {d0}"),
        ));
    }
    Ok(g2.sqrt())
}

/// A saddle-node point of the steady-state curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoint {
    pub n: f64,
    pub delta_eff: f64,
    /// Drive amplitude at which the branch folds.
    pub omega_drive: f64,
}

/// The two folds of the response curve for the detuning and damping in `p`,
/// `[lower-n fold, upper-n fold]`. The lower-n fold sits at the larger drive
/// (up-sweep jump); the upper-n fold at the smaller drive (down-sweep jump).
pub fn turning_drives(p: &MeanFieldParams) -> Option<[TurningPoint; 2]> {
    let delta = characteristic_detuning(p.delta_ml, p.eta, p.gamma_b);
    if delta >= 0.0 {
        return None;
    }
    let tp = turning_points(delta, p.eta, p.gamma_b).ok()?;
    let to_point = |delta_eff: f64| {
        let n = ((delta_eff - p.delta_ml) / (24.0 * p.eta)).max(0.0);
        TurningPoint {
            n,
            delta_eff,
            omega_drive: p.drive_squared_for(n).sqrt(),
        }
    };
    Some([to_point(tp.delta_eff_minus), to_point(tp.delta_eff_plus)])
}

/// Squared drive as a function of effective and characteristic detuning:
///
/// `Ω² = (γ² + (Δ_eff + δ − 12η(ζ − 1))²)(Δ_eff − δ + 12η(ζ + 1)) / (24η)`.
pub fn drive_squared_parametric(delta_eff: f64, delta: f64, eta: f64, gamma_b: f64) -> f64 {
    let zeta = SQRT3 * gamma_b / (24.0 * eta);
    let u = delta_eff + delta - 12.0 * eta * (zeta - 1.0);
    let v = delta_eff - delta + 12.0 * eta * (zeta + 1.0);
    (gamma_b * gamma_b + u * u) * v / (24.0 * eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimumDrive {
    pub omega_min: f64,
    /// Characteristic detuning at which the minimum is attained.
    pub delta0: f64,
}

/// Drive amplitude `γ√((Δ_eff + 12η)/(12η))` on the curve of fold points,
/// reached at `δ₀ = 12η(ζ − 1) − Δ_eff`.
///
/// This is the leading-order minimum over `δ` of the parametric drive at
/// fixed `Δ_eff`; the exact minimum differs by a relative
/// `O(γ² / (Δ_eff + 12η)²)`.
pub fn minimum_drive(delta_eff: f64, eta: f64, gamma_b: f64) -> Result<MinimumDrive> {
    if !(delta_eff + 12.0 * eta > 0.0) {
        return Err(invalid(
            "delta_eff",
            format!("need delta_eff + 12 eta > 0, got {}", delta_eff + 12.0 * eta),
        ));
    }
    let zeta = SQRT3 * gamma_b / (24.0 * eta);
    Ok(MinimumDrive {
        omega_min: gamma_b * ((delta_eff + 12.0 * eta) / (12.0 * eta)).sqrt(),
        delta0: 12.0 * eta * (zeta - 1.0) - delta_eff,
    })
}

/// Branches at one drive amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramSample {
    pub omega_drive: f64,
    pub branches: Vec<SteadyBranch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BistabilityDiagram {
    pub samples: Vec<DiagramSample>,
    /// `[lower-n fold, upper-n fold]`; present iff `bistable`.
    pub turning_points: Option<[TurningPoint; 2]>,
    /// `Δ_w`, zero when not bistable.
    pub window_width: f64,
    /// `ω_c − ω_t = −(12η + √3γ/2)`; add `ω_t` for the absolute critical frequency.
    pub critical_detuning: f64,
    pub bistable: bool,
    /// The drive sits exactly at the critical frequency.
    pub platform: bool,
}

/// Sweeps the drive amplitude over `grid` (ascending) at the detuning,
/// damping and nonlinearity of `base`.
pub fn sweep_diagram(base: &MeanFieldParams, grid: &[f64], exec: Execution) -> Result<BistabilityDiagram> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for (i, w) in grid.windows(2).enumerate() {
        if !(w[1] >= w[0]) {
            return Err(Error::NonMonotoneGrid(i + 1));
        }
    }
    base.with_drive(grid[0]).validate()?;

    let samples = exec
        .map(grid, |&omega| {
            let p = base.with_drive(omega);
            steady_branches(&p).map(|branches| DiagramSample {
                omega_drive: omega,
                branches,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let delta = characteristic_detuning(base.delta_ml, base.eta, base.gamma_b);
    let turning = turning_drives(base);
    let window_width = match turning {
        Some(_) => turning_points(delta, base.eta, base.gamma_b)?.window,
        None => 0.0,
    };
    Ok(BistabilityDiagram {
        samples,
        bistable: turning.is_some(),
        turning_points: turning,
        window_width,
        critical_detuning: -critical_offset(base.eta, base.gamma_b),
        platform: delta == 0.0,
    })
}

/// Evenly spaced grid of `points` values from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (points - 1) as f64;
            (0..points)
                .map(|i| if i + 1 == points { end } else { start + step * i as f64 })
                .collect()
        }
    }
}

pub(crate) mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

mod complex_pair_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &[Complex64; 2], s: S) -> Result<S::Ok, S::Error> {
        [[z[0].re, z[0].im], [z[1].re, z[1].im]].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Complex64; 2], D::Error> {
        let v = <[[f64; 2]; 2]>::deserialize(d)?;
        Ok([Complex64::new(v[0][0], v[0][1]), Complex64::new(v[1][0], v[1][1])])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn red_params() -> MeanFieldParams {
        // η = 1, γ = 2, Δ = −60: δ = −60 + 12 + √3 ≈ −46.3 (bistable)
        MeanFieldParams::new(-60.0, 0.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn undriven_root_is_zero() {
        let p = red_params();
        let r = steady_occupations(&p);
        assert_eq!(r.n, vec![0.0]);
        assert_eq!(beta_from_n(&p, 0.0).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn weak_drive_linear_response() {
        let p = MeanFieldParams::new(-30.0, 1e-3, 2.0, 1.0).unwrap();
        let r = steady_occupations(&p);
        assert_eq!(r.count(), 1);
        let d = p.shifted_detuning();
        let lin = 0.25 * p.omega_drive.powi(2) / (0.25 * p.gamma_b.powi(2) + d * d);
        assert_relative_eq!(r.n[0], lin, max_relative = 1e-6);
    }

    #[test]
    fn residuals_and_amplitudes_in_window() {
        let base = red_params();
        let [lo, hi] = turning_drives(&base).unwrap();
        let p = base.with_drive(0.5 * (lo.omega_drive + hi.omega_drive));
        let roots = steady_occupations(&p);
        assert_eq!(roots.count(), 3);
        assert!(!roots.tangent);
        let scale = 0.25 * p.omega_drive * p.omega_drive;
        for &n in &roots.n {
            assert!(p.cubic_residual(n).abs() <= 1e-9 * scale);
            let beta = beta_from_n(&p, n).unwrap();
            assert_relative_eq!(beta.norm_sqr(), n, max_relative = 1e-9);
            // Substituting back reproduces the drive term.
            let lhs = Complex64::new(-0.5 * p.gamma_b, p.dressed_detuning(n)) * beta;
            assert!((lhs - Complex64::new(0.0, 0.5 * p.omega_drive)).norm() <= 1e-9 * 0.5 * p.omega_drive);
            // Energy balance: γ n = −Ω Im β₀ in this phase convention.
            assert_relative_eq!(p.gamma_b * n, -p.omega_drive * beta.im, max_relative = 1e-9);
        }
        let mods: Vec<f64> = roots.n.iter().map(|&n| beta_from_n(&p, n).unwrap().norm()).collect();
        assert!(mods[0] < mods[1] && mods[1] < mods[2]);
    }

    #[test]
    fn beta_rejects_non_roots() {
        let p = red_params().with_drive(50.0);
        let r = steady_occupations(&p);
        assert!(matches!(beta_from_n(&p, r.n[0] * 1.01 + 1.0), Err(Error::NotARoot { .. })));
    }

    #[test]
    fn undamped_amplitude_is_real() {
        // γ = 0: β₀ = Ω / (2D), in phase or in antiphase with the drive.
        let p = MeanFieldParams::new(10.0, 5.0, 0.0, 1.0).unwrap();
        let n = steady_occupations(&p).n[0];
        let beta = beta_from_n(&p, n).unwrap();
        assert!(beta.im.abs() <= 1e-12 * beta.norm());
        assert_relative_eq!(beta.re, 5.0 / (2.0 * p.dressed_detuning(n)), max_relative = 1e-12);
    }

    #[test]
    fn stability_matrix_trace_and_determinant() {
        let base = red_params();
        for omega in [0.0, 10.0, 100.0, 400.0] {
            let p = base.with_drive(omega);
            for &n in &steady_occupations(&p).n {
                let beta = beta_from_n(&p, n).unwrap();
                let a = stability_matrix(&p, n, beta);
                assert_relative_eq!(trace(&a).re, p.gamma_b, max_relative = 1e-14);
                assert!(trace(&a).im.abs() < 1e-12);
                let scale = stability_determinant(&p, 0.0) + 3.0 * p.kerr_rate().powi(2) * n * n;
                assert!((det(&a).re - stability_determinant(&p, n)).abs() <= 1e-10 * scale);
                assert!(det(&a).im.abs() <= 1e-10 * scale);
            }
        }
        let p = base;
        let a = stability_matrix(&p, 0.0, Complex64::new(0.0, 0.0));
        let kappa = Complex64::new(1.0, -(p.delta_ml + 12.0));
        assert_eq!(a[0][0], kappa);
        assert_eq!(a[1][1], kappa.conj());
        assert_eq!(a[0][1], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn stability_pattern_in_window() {
        let base = red_params();
        assert_eq!(steady_branches(&base).unwrap()[0].stability, Stability::Stable);
        let [lo, hi] = turning_drives(&base).unwrap();
        let p = base.with_drive(0.5 * (lo.omega_drive + hi.omega_drive));
        let v: Vec<Stability> = steady_branches(&p).unwrap().iter().map(|b| b.stability).collect();
        assert_eq!(v, vec![Stability::Stable, Stability::Unstable, Stability::Stable]);
        for b in steady_branches(&p).unwrap() {
            let re_max = b.eigenvalues.iter().map(|z| z.re).fold(f64::MIN, f64::max);
            assert_eq!(b.stable(), re_max < 0.0);
        }
    }

    #[test]
    fn undamped_is_marginal() {
        let p = MeanFieldParams::new(10.0, 5.0, 0.0, 1.0).unwrap();
        assert_eq!(steady_branches(&p).unwrap()[0].stability, Stability::Marginal);
    }

    #[test]
    fn bistability_condition_cases() {
        let c = bistability_condition(1e6, 1e6, 1.0, 2.0);
        assert!(!c.bistable);
        let c = bistability_condition(0.0, 1e6, 1.0, 0.0);
        assert_eq!(c.omega_c, 1e6 - 12.0);
        let c = bistability_condition(1e6 - 12.0, 1e6, 1.0, 0.0);
        assert!(!c.bistable, "platform is not bistable");
        assert!(bistability_condition(1e6 - 12.1, 1e6, 1.0, 0.0).bistable);
        assert!(!bistability_condition(1e6 + 5.0, 1e6, 1.0, 0.0).bistable);
    }

    #[test]
    fn turning_point_edge_cases() {
        let g = 2.0;
        let t = turning_points(SQRT3 * g, 1.0, g).unwrap();
        assert_eq!(t.window, 0.0);
        assert_eq!(t.delta_eff_plus, t.delta_eff_minus);
        assert!(!t.physical);

        let t = turning_points(0.0, 1.0, g).unwrap();
        assert_eq!(t.window, 0.0);

        let t = turning_points(-9.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(t.window, 12.0, max_relative = 1e-15);
        assert!(t.physical);

        assert!(matches!(turning_points(1.0, 1.0, g), Err(Error::WindowClosed { .. })));
    }

    #[test]
    fn turning_points_are_folds() {
        let base = red_params();
        let delta = characteristic_detuning(base.delta_ml, base.eta, base.gamma_b);
        let tp = turning_points(delta, base.eta, base.gamma_b).unwrap();
        for de in [tp.delta_eff_minus, tp.delta_eff_plus] {
            let n = (de - base.delta_ml) / (24.0 * base.eta);
            let scale = stability_determinant(&base, 0.0);
            assert!(stability_determinant(&base, n).abs() < 1e-10 * scale);
        }
        let [lo, hi] = turning_drives(&base).unwrap();
        assert!(lo.omega_drive > hi.omega_drive);
        assert!(lo.n < hi.n);
    }

    #[test]
    fn damping_fit_inverts_window() {
        let (delta, eta, gamma) = (-300.0, 0.5, 7.0);
        let w = turning_points(characteristic_detuning(delta, eta, gamma), eta, gamma).unwrap().window;
        assert_relative_eq!(damping_for_window(delta, eta, w).unwrap(), gamma, max_relative = 1e-10);
        assert!(damping_for_window(10.0, eta, w).is_err());
        assert!(damping_for_window(delta, eta, 1e6).is_err());
    }

    #[test]
    fn parametric_drive_matches_cubic() {
        let base = red_params();
        let delta = characteristic_detuning(base.delta_ml, base.eta, base.gamma_b);
        for n in [0.0, 0.3, 1.7, 4.0, 9.5] {
            let de = base.effective_detuning(n);
            let w2 = drive_squared_parametric(de, delta, base.eta, base.gamma_b);
            assert_relative_eq!(w2, base.drive_squared_for(n), max_relative = 1e-12, epsilon = 1e-9);
        }
    }

    #[test]
    fn minimum_drive_cases() {
        assert_eq!(minimum_drive(5.0, 1.0, 0.0).unwrap().omega_min, 0.0);
        assert_relative_eq!(minimum_drive(0.0, 1.0, 3.0).unwrap().omega_min, 3.0);
        assert!(minimum_drive(-12.0, 1.0, 3.0).is_err());
    }

    #[test]
    fn sweep_monostable_and_errors() {
        let p = MeanFieldParams::new(5.0, 0.0, 2.0, 1.0).unwrap();
        let grid = linspace(0.0, 500.0, 101);
        let d = sweep_diagram(&p, &grid, Execution::Sequential).unwrap();
        assert!(!d.bistable && d.turning_points.is_none());
        assert!(d.samples.iter().all(|s| s.branches.len() == 1));
        assert_eq!(sweep_diagram(&p, &[], Execution::Sequential), Err(Error::EmptyGrid));
        assert_eq!(
            sweep_diagram(&p, &[1.0, 0.5], Execution::Sequential),
            Err(Error::NonMonotoneGrid(1))
        );
    }

    #[test]
    fn sweep_bistable_has_three_branch_interval() {
        let base = red_params();
        let [lo, hi] = turning_drives(&base).unwrap();
        let grid = linspace(0.0, 1.5 * lo.omega_drive, 301);
        let d = sweep_diagram(&base, &grid, Execution::Parallel).unwrap();
        assert!(d.bistable);
        for s in &d.samples {
            let inside = s.omega_drive > hi.omega_drive && s.omega_drive < lo.omega_drive;
            assert_eq!(s.branches.len() == 3, inside, "omega = {}", s.omega_drive);
        }
        let seq = sweep_diagram(&base, &grid, Execution::Sequential).unwrap();
        assert_eq!(seq, d);
    }

    #[test]
    fn platform_at_critical_frequency() {
        let eta = 1.0;
        let g = 2.0;
        let p = MeanFieldParams::new(-critical_offset(eta, g), 0.0, g, eta).unwrap();
        let grid = linspace(0.0, 200.0, 2001);
        let d = sweep_diagram(&p, &grid, Execution::Parallel).unwrap();
        assert!(d.platform && !d.bistable);
        assert!(d.samples.iter().all(|s| s.branches.len() == 1 || s.branches.iter().any(|b| b.tangent)));
    }
}
