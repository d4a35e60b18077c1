//! Time integration of the mean-field amplitude and drive-ramp protocols.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ode::{DormandPrince, StepperConfig};
use crate::steadystate::MeanFieldParams;

/// `dβ/dt = (iΔ − γ/2 + 12iη(|β|² + 1)) β − iΩ/2`.
#[inline]
pub fn mean_field_rhs(beta: Complex64, p: &MeanFieldParams) -> Complex64 {
    let d = p.dressed_detuning(beta.norm_sqr());
    Complex64::new(-0.5 * p.gamma_b, d) * beta - Complex64::new(0.0, 0.5 * p.omega_drive)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RampMode {
    /// Piecewise-constant drive: `steps` equal increments, each held for `dwell` seconds.
    QuasiStatic { steps: usize, dwell: f64 },
    /// Linear ramp at `rate` (rad/s per second), sampled at `samples` evenly spaced times.
    Continuous { rate: f64, samples: usize },
}

/// Drive-amplitude schedule from `omega_start` to `omega_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampProtocol {
    pub omega_start: f64,
    pub omega_end: f64,
    pub mode: RampMode,
}

/// Default hold time per drive step in units of `1/γ`.
pub const DEFAULT_DWELL_RELAXATIONS: f64 = 20.0;

impl RampProtocol {
    /// Quasi-static protocol with the default dwell `20/γ`.
    pub fn quasi_static(omega_start: f64, omega_end: f64, steps: usize, gamma_b: f64) -> Self {
        RampProtocol {
            omega_start,
            omega_end,
            mode: RampMode::QuasiStatic {
                steps,
                dwell: DEFAULT_DWELL_RELAXATIONS / gamma_b,
            },
        }
    }

    pub fn continuous(omega_start: f64, omega_end: f64, rate: f64, samples: usize) -> Self {
        RampProtocol {
            omega_start,
            omega_end,
            mode: RampMode::Continuous { rate, samples },
        }
    }

    pub fn direction(&self) -> Direction {
        if self.omega_end >= self.omega_start {
            Direction::Up
        } else {
            Direction::Down
        }
    }

    /// The same protocol run backwards.
    pub fn reversed(&self) -> Self {
        RampProtocol {
            omega_start: self.omega_end,
            omega_end: self.omega_start,
            mode: self.mode,
        }
    }

    /// Checks the protocol and returns advisory warnings about the ramp speed.
    pub fn validate(&self, gamma_b: f64) -> Result<Vec<String>> {
        if !(self.omega_start >= 0.0 && self.omega_end >= 0.0)
            || !self.omega_start.is_finite()
            || !self.omega_end.is_finite()
        {
            return Err(invalid("ramp.omega", "drive bounds must be finite and >= 0"));
        }
        let mut warnings = Vec::new();
        match self.mode {
            RampMode::QuasiStatic { steps, dwell } => {
                if steps == 0 {
                    return Err(invalid("ramp.steps", "must be >= 1"));
                }
                if !(dwell > 0.0 && dwell.is_finite()) {
                    return Err(invalid("ramp.dwell", format!("must be > 0, got {dwell}")));
                }
                if gamma_b * dwell < 10.0 {
                    warnings.push(format!(
                        "dwell {dwell:e} s is only {:.2} damping times; the sweep may not be quasi-static",
                        gamma_b * dwell
                    ));
                }
            }
            RampMode::Continuous { rate, samples } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(invalid("ramp.rate", format!("must be > 0, got {rate}")));
                }
                if samples < 2 {
                    return Err(invalid("ramp.samples", "must be >= 2"));
                }
                let span = (self.omega_end - self.omega_start).abs();
                if gamma_b <= 0.0 || rate * 2.0 / gamma_b > 0.01 * span {
                    warnings.push(format!(
                        "ramp rate {rate:e} changes the drive by more than 1% of the span per relaxation time"
                    ));
                }
            }
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(warnings)
    }

    pub fn duration(&self) -> f64 {
        match self.mode {
            RampMode::QuasiStatic { steps, dwell } => (steps + 1) as f64 * dwell,
            RampMode::Continuous { rate, .. } => (self.omega_end - self.omega_start).abs() / rate,
        }
    }

    /// Drive levels of the quasi-static staircase (`steps + 1` values).
    pub fn levels(&self) -> Vec<f64> {
        match self.mode {
            RampMode::QuasiStatic { steps, .. } => {
                crate::steadystate::linspace(self.omega_start, self.omega_end, steps + 1)
            }
            RampMode::Continuous { .. } => vec![self.omega_start, self.omega_end],
        }
    }

    /// Drive applied at time `t` after the start of the protocol.
    pub fn drive_at(&self, t: f64) -> f64 {
        match self.mode {
            RampMode::QuasiStatic { steps, dwell } => {
                let k = ((t / dwell).floor().max(0.0) as usize).min(steps);
                let frac = k as f64 / steps as f64;
                if k == steps {
                    self.omega_end
                } else {
                    self.omega_start + (self.omega_end - self.omega_start) * frac
                }
            }
            RampMode::Continuous { rate, .. } => {
                let sign = if self.omega_end >= self.omega_start { 1.0 } else { -1.0 };
                let w = self.omega_start + sign * rate * t.max(0.0);
                if sign > 0.0 {
                    w.min(self.omega_end)
                } else {
                    w.max(self.omega_end)
                }
            }
        }
    }
}

/// Drive applied during an integration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveSchedule {
    Constant(f64),
    Ramp(RampProtocol),
}

impl DriveSchedule {
    fn drive_at(&self, t: f64) -> f64 {
        match self {
            DriveSchedule::Constant(w) => *w,
            DriveSchedule::Ramp(r) => r.drive_at(t),
        }
    }

    /// Times inside `(t0, t1)` where the drive jumps.
    fn breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        match self {
            DriveSchedule::Ramp(RampProtocol {
                mode: RampMode::QuasiStatic { steps, dwell },
                ..
            }) => (1..=*steps)
                .map(|k| k as f64 * dwell)
                .filter(|&t| t > t0 && t < t1)
                .collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub beta: Vec<[f64; 2]>,
    pub n: Vec<f64>,
    pub omega_applied: Vec<f64>,
}

impl Trajectory {
    fn push(&mut self, t: f64, y: &[f64; 2], omega: f64) {
        self.times.push(t);
        self.beta.push(*y);
        self.n.push(y[0] * y[0] + y[1] * y[1]);
        self.omega_applied.push(omega);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_beta(&self) -> Option<Complex64> {
        self.beta.last().map(|b| Complex64::new(b[0], b[1]))
    }
}

/// Failed run: the error and everything computed before it.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationFailure {
    pub partial: Trajectory,
    pub error: Error,
}

impl std::fmt::Display for IntegrationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({} samples recorded)", self.error, self.partial.len())
    }
}

impl std::error::Error for IntegrationFailure {}

fn rhs_real(p: &MeanFieldParams, omega: f64) -> impl Fn(f64, &[f64; 2], &mut [f64; 2]) + '_ {
    move |_t, y, dy| {
        let d = mean_field_rhs(Complex64::new(y[0], y[1]), &p.with_drive(omega));
        dy[0] = d.re;
        dy[1] = d.im;
    }
}

/// Integrates the mean-field equation from `beta_init` at `t = t_span.0`
/// and samples it at `samples` evenly spaced times up to `t_span.1`
/// (including both ends). `p.omega_drive` is ignored in favour of `schedule`.
pub fn integrate(
    p: &MeanFieldParams,
    beta_init: Complex64,
    schedule: &DriveSchedule,
    t_span: (f64, f64),
    samples: usize,
    tol: f64,
) -> std::result::Result<Trajectory, IntegrationFailure> {
    let fail = |e: Error| IntegrationFailure {
        partial: Trajectory::default(),
        error: e,
    };
    if !(tol > 0.0) {
        return Err(fail(invalid("tol", format!("must be > 0, got {tol}"))));
    }
    if samples < 2 || !(t_span.1 > t_span.0) {
        return Err(fail(invalid("t_span", "need t1 > t0 and at least two samples")));
    }
    let times = crate::steadystate::linspace(t_span.0, t_span.1, samples);
    integrate_at(p, beta_init, schedule, t_span.0, &times, tol)
}

/// Like [`integrate`] but with explicit, ascending output times.
pub fn integrate_at(
    p: &MeanFieldParams,
    beta_init: Complex64,
    schedule: &DriveSchedule,
    t0: f64,
    times: &[f64],
    tol: f64,
) -> std::result::Result<Trajectory, IntegrationFailure> {
    let cfg = StepperConfig::new(tol);
    let mut traj = Trajectory::default();
    let mut stepper = DormandPrince::new(cfg, t0, [beta_init.re, beta_init.im]);
    let mut t_cur = t0;
    for &t_out in times {
        // Advance through drive discontinuities one piece at a time.
        let mut stops = schedule.breakpoints(t_cur, t_out);
        stops.push(t_out);
        for stop in stops {
            let omega = match schedule {
                DriveSchedule::Constant(w) => *w,
                DriveSchedule::Ramp(r) => match r.mode {
                    // Midpoint: `k * dwell / dwell` may floor to `k - 1`.
                    RampMode::QuasiStatic { .. } => r.drive_at(0.5 * (t_cur + stop)),
                    RampMode::Continuous { .. } => f64::NAN,
                },
            };
            let result = if omega.is_nan() {
                let f = |t: f64, y: &[f64; 2], dy: &mut [f64; 2]| {
                    let d = mean_field_rhs(Complex64::new(y[0], y[1]), &p.with_drive(schedule.drive_at(t)));
                    dy[0] = d.re;
                    dy[1] = d.im;
                };
                stepper.advance_to(&f, stop)
            } else {
                let f = rhs_real(p, omega);
                stepper.advance_to(&f, stop)
            };
            if let Err(error) = result {
                return Err(IntegrationFailure {
                    partial: traj,
                    error,
                });
            }
            if stop < t_out || matches!(schedule, DriveSchedule::Ramp(RampProtocol { mode: RampMode::QuasiStatic { .. }, .. })) {
                let y = *stepper.y();
                stepper.reset_state(y);
            }
            t_cur = stop;
        }
        traj.push(t_out, stepper.y(), schedule.drive_at(t_out));
    }
    Ok(traj)
}

/// Drive and response along one sweep.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepTrace {
    /// Sample times from the start of the sweep, s.
    pub times: Vec<f64>,
    pub omega: Vec<f64>,
    pub n: Vec<f64>,
    pub delta_eff: Vec<f64>,
    pub beta: Vec<[f64; 2]>,
}

/// A discontinuity in the response along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    /// Drive at the first sample past the fold.
    pub omega_drive: f64,
    pub delta_eff_before: f64,
    pub delta_eff_after: f64,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HysteresisResult {
    pub up: SweepTrace,
    pub down: SweepTrace,
    pub jump_up: Option<Jump>,
    pub jump_down: Option<Jump>,
    /// `∫ |Δ_eff,down − Δ_eff,up| dΩ` over the common drive range, (rad/s)².
    pub loop_area: f64,
    /// `loop_area` divided by the drive span times the largest Kerr shift `|Δ_eff − Δ|`.
    pub loop_fraction: f64,
    pub warnings: Vec<String>,
}

/// Ratio between a jump and the slope expected from the preceding step.
pub const JUMP_FACTOR: f64 = 5.0;

/// Finds the first jump: a change in `n` exceeding [`JUMP_FACTOR`] times the
/// previous increment (the local quasi-static slope prediction).
pub fn detect_jump(trace: &SweepTrace) -> Option<Jump> {
    let n = &trace.n;
    if n.len() < 3 {
        return None;
    }
    let scale = n.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let floor = 1e-12 * scale;
    let diffs: Vec<f64> = n.windows(2).map(|w| w[1] - w[0]).collect();
    for i in 1..diffs.len() {
        let pred = diffs[i - 1].abs().max(floor);
        let d = diffs[i].abs();
        if d > JUMP_FACTOR * pred && d > 1e-6 * scale {
            // Follow the transition until the increments settle.
            let mut end = i + 1;
            while end < diffs.len() && diffs[end].abs() > JUMP_FACTOR * pred {
                end += 1;
            }
            return Some(Jump {
                omega_drive: trace.omega[i + 1],
                delta_eff_before: trace.delta_eff[i],
                delta_eff_after: trace.delta_eff[end],
                index: i + 1,
            });
        }
    }
    None
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    // xs monotone (either direction)
    let asc = xs.first() <= xs.last();
    let idx = if asc {
        xs.partition_point(|&v| v < x)
    } else {
        xs.partition_point(|&v| v > x)
    };
    if idx == 0 {
        return ys[0];
    }
    if idx >= xs.len() {
        return ys[ys.len() - 1];
    }
    let (x0, x1) = (xs[idx - 1], xs[idx]);
    let (y0, y1) = (ys[idx - 1], ys[idx]);
    if x1 == x0 {
        y1
    } else {
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// Area between the up and down response curves over their common drive range.
pub fn loop_area(up: &SweepTrace, down: &SweepTrace) -> f64 {
    if up.omega.len() < 2 || down.omega.len() < 2 {
        return 0.0;
    }
    let lo = up.omega.iter().cloned().fold(f64::INFINITY, f64::min).max(
        down.omega.iter().cloned().fold(f64::INFINITY, f64::min),
    );
    let hi = up.omega.iter().cloned().fold(f64::NEG_INFINITY, f64::max).min(
        down.omega.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    if !(hi > lo) {
        return 0.0;
    }
    // Merge both drive grids so that jumps in either trace are resolved.
    let mut xs: Vec<f64> = up
        .omega
        .iter()
        .chain(down.omega.iter())
        .cloned()
        .filter(|&w| w >= lo && w <= hi)
        .collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    let gap = |w: f64| {
        (interpolate(&down.omega, &down.delta_eff, w) - interpolate(&up.omega, &up.delta_eff, w)).abs()
    };
    xs.windows(2)
        .map(|w| 0.5 * (w[1] - w[0]) * (gap(w[0]) + gap(w[1])))
        .sum()
}

/// Runs one sweep starting from `beta_init` and records the response.
pub fn run_sweep(
    p: &MeanFieldParams,
    protocol: &RampProtocol,
    beta_init: Complex64,
    tol: f64,
) -> std::result::Result<SweepTrace, IntegrationFailure> {
    let times: Vec<f64> = match protocol.mode {
        // Sample at the end of each dwell.
        RampMode::QuasiStatic { steps, dwell } => (0..=steps).map(|k| (k as f64 + 1.0) * dwell - dwell * 1e-9).collect(),
        RampMode::Continuous { samples, .. } => crate::steadystate::linspace(0.0, protocol.duration(), samples),
    };
    let traj = integrate_at(p, beta_init, &DriveSchedule::Ramp(*protocol), 0.0, &times, tol)?;
    let omega = match protocol.mode {
        RampMode::QuasiStatic { .. } => protocol.levels(),
        RampMode::Continuous { .. } => traj.omega_applied.clone(),
    };
    Ok(SweepTrace {
        times: traj.times.clone(),
        delta_eff: traj.n.iter().map(|&n| p.effective_detuning(n)).collect(),
        omega,
        n: traj.n,
        beta: traj.beta,
    })
}

/// Up sweep from the undriven vacuum followed by a down sweep that starts
/// from the state reached at the end of the up sweep.
pub fn hysteresis_sweep(
    p: &MeanFieldParams,
    protocol_up: &RampProtocol,
    protocol_down: &RampProtocol,
    tol: f64,
) -> Result<HysteresisResult> {
    p.validate()?;
    let mut warnings = protocol_up.validate(p.gamma_b)?;
    warnings.extend(protocol_down.validate(p.gamma_b)?);
    let up = run_sweep(p, protocol_up, Complex64::new(0.0, 0.0), tol).map_err(|f| f.error)?;
    let start_down = up
        .beta
        .last()
        .map(|b| Complex64::new(b[0], b[1]))
        .unwrap_or_default();
    let down = run_sweep(p, protocol_down, start_down, tol).map_err(|f| f.error)?;

    let area = loop_area(&up, &down);
    let span = {
        let all = up.omega.iter().chain(down.omega.iter());
        let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &w| (a.min(w), b.max(w)));
        (hi - lo).max(f64::MIN_POSITIVE)
    };
    let shift = up
        .delta_eff
        .iter()
        .chain(down.delta_eff.iter())
        .map(|d| (d - p.delta_ml).abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    Ok(HysteresisResult {
        jump_up: detect_jump(&up),
        jump_down: detect_jump(&down),
        loop_area: area,
        loop_fraction: area / (span * shift),
        up,
        down,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steadystate::{steady_branches, steady_occupations, turning_drives};
    use approx::assert_relative_eq;

    fn params() -> MeanFieldParams {
        MeanFieldParams::new(-60.0, 0.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn rhs_vanishes_at_steady_state() {
        let base = params();
        let [lo, hi] = turning_drives(&base).unwrap();
        let p = base.with_drive(0.5 * (lo.omega_drive + hi.omega_drive));
        for b in steady_branches(&p).unwrap() {
            let r = mean_field_rhs(b.beta0, &p);
            assert!(r.norm() <= 1e-9 * p.omega_drive, "{r}");
            // Energy balance from Re(β* · rhs) = 0.
            assert_relative_eq!(p.gamma_b * b.n, -p.omega_drive * b.beta0.im, max_relative = 1e-9);
        }
    }

    #[test]
    fn free_linear_decay_matches_closed_form() {
        // η enters only via the Kerr terms; make them negligible relative to Δ.
        let p = MeanFieldParams::new(3.0, 0.0, 0.8, 1e-300).unwrap();
        let b0 = Complex64::new(0.7, -0.2);
        let tol = 1e-9;
        let traj = integrate(&p, b0, &DriveSchedule::Constant(0.0), (0.0, 5.0), 51, tol).unwrap();
        for (t, b) in traj.times.iter().zip(&traj.beta) {
            let exact = b0 * (Complex64::new(-0.4, 3.0) * t).exp();
            let got = Complex64::new(b[0], b[1]);
            assert!((got - exact).norm() < 10.0 * tol, "t = {t}");
        }
    }

    #[test]
    fn stable_root_is_fixed_point() {
        let base = params();
        let p = base.with_drive(20.0);
        let b = steady_branches(&p).unwrap()[0];
        let tol = 1e-10;
        let traj = integrate(&p, b.beta0, &DriveSchedule::Constant(20.0), (0.0, 10.0), 11, tol).unwrap();
        for beta in &traj.beta {
            let z = Complex64::new(beta[0], beta[1]);
            assert!((z - b.beta0).norm() < 1e3 * tol);
        }
    }

    #[test]
    fn unstable_root_escapes_to_an_outer_root() {
        let base = params();
        let [lo, hi] = turning_drives(&base).unwrap();
        let w = 0.5 * (lo.omega_drive + hi.omega_drive);
        let p = base.with_drive(w);
        let br = steady_branches(&p).unwrap();
        let mid = br[1];
        for sign in [1.0, -1.0] {
            let start = mid.beta0 * (1.0 + sign * 1e-6);
            let traj = integrate(&p, start, &DriveSchedule::Constant(w), (0.0, 60.0), 2, 1e-10).unwrap();
            let n_final = *traj.n.last().unwrap();
            let near = |k: usize| (n_final - br[k].n).abs() < 1e-5 * br[k].n.max(1.0);
            assert!(near(0) || near(2), "n_final = {n_final}");
        }
    }

    #[test]
    fn protocol_schedule() {
        let r = RampProtocol::quasi_static(0.0, 10.0, 5, 2.0);
        assert_eq!(r.levels(), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        assert_eq!(r.drive_at(0.0), 0.0);
        assert_eq!(r.drive_at(10.5), 2.0);
        assert_eq!(r.drive_at(1e9), 10.0);
        assert_eq!(r.direction(), Direction::Up);
        assert_eq!(r.reversed().direction(), Direction::Down);
        assert!(r.validate(2.0).unwrap().is_empty());
        let fast = RampProtocol {
            mode: RampMode::QuasiStatic { steps: 5, dwell: 1.0 },
            ..r
        };
        assert_eq!(fast.validate(2.0).unwrap().len(), 1);
        let c = RampProtocol::continuous(10.0, 0.0, 2.0, 11);
        assert_eq!(c.drive_at(1.0), 8.0);
        assert_eq!(c.drive_at(100.0), 0.0);
        assert!(RampProtocol::continuous(0.0, 1.0, -1.0, 11).validate(1.0).is_err());
    }

    #[test]
    fn monostable_sweeps_coincide() {
        let p = MeanFieldParams::new(10.0, 0.0, 2.0, 1.0).unwrap();
        let up = RampProtocol::quasi_static(0.0, 300.0, 60, p.gamma_b);
        let res = hysteresis_sweep(&p, &up, &up.reversed(), 1e-9).unwrap();
        assert!(res.jump_up.is_none() && res.jump_down.is_none());
        assert!(res.loop_fraction < 1e-4, "{}", res.loop_fraction);
    }

    #[test]
    fn bistable_sweeps_jump_near_folds() {
        // Folds at Ω ≈ 5.12 (up) and Ω ≈ 1.63 (down).
        let p = MeanFieldParams::new(-20.0, 0.0, 2.0, 1.0).unwrap();
        let [lo, hi] = turning_drives(&p).unwrap();
        let up = RampProtocol::quasi_static(0.0, 1.3 * lo.omega_drive, 800, p.gamma_b);
        let res = hysteresis_sweep(&p, &up, &up.reversed(), 1e-9).unwrap();
        let ju = res.jump_up.expect("up jump");
        let jd = res.jump_down.expect("down jump");
        assert!((ju.omega_drive / lo.omega_drive - 1.0).abs() < 0.02, "{ju:?} vs {lo:?}");
        assert!((jd.omega_drive / hi.omega_drive - 1.0).abs() < 0.02, "{jd:?} vs {hi:?}");
        assert!(ju.delta_eff_after > ju.delta_eff_before);
        assert!(jd.delta_eff_after < jd.delta_eff_before);
        assert!(res.loop_area > 0.0);
        // Final states sit on the steady branches.
        let top = steady_occupations(&p.with_drive(1.3 * lo.omega_drive)).n;
        assert_relative_eq!(*res.up.n.last().unwrap(), *top.last().unwrap(), max_relative = 1e-4);
    }
}
