//! Adaptive Dormand-Prince 5(4) integrator with PI step-size control.
//!
//! Small fixed-size real systems only; the state is a `[f64; N]`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Tolerance {
    pub fn uniform(tol: f64) -> Self {
        Tolerance { rtol: tol, atol: tol }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub tol: Tolerance,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_max: f64,
    /// Smallest step accepted relative to `|t|` before giving up.
    pub h_min_rel: f64,
    pub max_steps: usize,
}

impl StepperConfig {
    pub fn new(tol: f64) -> Self {
        StepperConfig {
            tol: Tolerance::uniform(tol),
            h_init: None,
            h_max: f64::INFINITY,
            h_min_rel: 1e-14,
            max_steps: 50_000_000,
        }
    }
}

// Dormand-Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b* (error weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Stateful stepper that can be advanced to successive output times while
/// keeping its step-size history (FSAL and PI controller state).
pub struct DormandPrince<const N: usize> {
    cfg: StepperConfig,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    err_prev: f64,
    fresh: bool,
    steps: usize,
    rejected: usize,
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

impl<const N: usize> DormandPrince<N> {
    pub fn new(cfg: StepperConfig, t0: f64, y0: [f64; N]) -> Self {
        DormandPrince {
            cfg,
            t: t0,
            y: y0,
            k1: [0.0; N],
            h: cfg.h_init.unwrap_or(0.0),
            err_prev: 1e-4,
            fresh: true,
            steps: 0,
            rejected: 0,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    pub fn accepted_steps(&self) -> usize {
        self.steps
    }

    pub fn rejected_steps(&self) -> usize {
        self.rejected
    }

    /// Replaces the state (e.g. after a discontinuous change of the right side).
    pub fn reset_state(&mut self, y: [f64; N]) {
        self.y = y;
        self.fresh = true;
    }

    fn err_norm(&self, y_new: &[f64; N], err: &[f64; N]) -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            let sc = self.cfg.tol.atol + self.cfg.tol.rtol * self.y[i].abs().max(y_new[i].abs());
            let r = err[i] / sc;
            acc += r * r;
        }
        (acc / N as f64).sqrt()
    }

    fn initial_step<F>(&self, f: &F, direction: f64) -> f64
    where
        F: Fn(f64, &[f64; N], &mut [f64; N]),
    {
        // Hairer-Wanner starting step heuristic.
        let tol = self.cfg.tol;
        let sc: Vec<f64> = self.y.iter().map(|v| tol.atol + tol.rtol * v.abs()).collect();
        let d0 = (self.y.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / N as f64).sqrt();
        let d1 = (self.k1.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / N as f64).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1 = axpy(&self.y, direction * h0, &[(1.0, &self.k1)]);
        let mut f1 = [0.0; N];
        f(self.t + direction * h0, &y1, &mut f1);
        let d2 = (f1
            .iter()
            .zip(&self.k1)
            .zip(&sc)
            .map(|((a, b), s)| ((a - b) / s).powi(2))
            .sum::<f64>()
            / N as f64)
            .sqrt()
            / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / 5.0)
        };
        (100.0 * h0).min(h1).min(self.cfg.h_max)
    }

    /// Advances the solution to exactly `t_end`.
    pub fn advance_to<F>(&mut self, f: &F, t_end: f64) -> Result<()>
    where
        F: Fn(f64, &[f64; N], &mut [f64; N]),
    {
        if t_end == self.t {
            return Ok(());
        }
        let direction = (t_end - self.t).signum();
        if self.fresh {
            f(self.t, &self.y, &mut self.k1);
            if self.h == 0.0 {
                self.h = self.initial_step(f, direction);
            }
            self.fresh = false;
        }
        let (safety, min_fac, max_fac) = (0.9, 0.2, 5.0);
        let (alpha, beta) = (0.7 / 5.0, 0.4 / 5.0);
        loop {
            let remaining = (t_end - self.t) * direction;
            if remaining <= 0.0 {
                return Ok(());
            }
            if self.steps + self.rejected >= self.cfg.max_steps {
                return Err(Error::StepUnderflow { t: self.t, h: self.h });
            }
            let mut h = self.h.abs().min(self.cfg.h_max);
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            let h_min = self.cfg.h_min_rel * self.t.abs().max(remaining).max(f64::MIN_POSITIVE);
            if h < h_min && !last {
                return Err(Error::StepUnderflow { t: self.t, h });
            }
            let hs = direction * h;
            let t = self.t;
            let y = self.y;
            let k1 = self.k1;
            let mut k2 = [0.0; N];
            let mut k3 = [0.0; N];
            let mut k4 = [0.0; N];
            let mut k5 = [0.0; N];
            let mut k6 = [0.0; N];
            let mut k7 = [0.0; N];
            f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]), &mut k2);
            f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]), &mut k3);
            f(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]), &mut k4);
            f(
                t + C5 * hs,
                &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
                &mut k5,
            );
            f(
                t + hs,
                &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
                &mut k6,
            );
            let y_new = axpy(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            f(t + hs, &y_new, &mut k7);
            let mut err = [0.0; N];
            for i in 0..N {
                err[i] = hs
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            }
            let en = self.err_norm(&y_new, &err);
            if !en.is_finite() {
                self.rejected += 1;
                self.h = h * min_fac;
                continue;
            }
            if en <= 1.0 {
                let fac = if en == 0.0 {
                    max_fac
                } else {
                    (safety * en.powf(-alpha) * self.err_prev.powf(beta)).clamp(min_fac, max_fac)
                };
                self.err_prev = en.max(1e-4);
                self.t = if last { t_end } else { t + hs };
                self.y = y_new;
                self.k1 = k7;
                self.steps += 1;
                // Keep the controller's step when the last step was clipped.
                if !last || h * fac > self.h.abs() {
                    self.h = h * fac;
                }
            } else {
                self.rejected += 1;
                let fac = (safety * en.powf(-alpha)).clamp(min_fac, 1.0);
                self.h = h * fac;
            }
        }
    }
}

/// Integrates `y' = f(t, y)` from `t0` and records the state at each time in
/// `t_out` (ascending, all `>= t0`).
///
/// On failure the samples computed so far are returned alongside the error.
pub fn integrate_samples<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_out: &[f64],
    cfg: StepperConfig,
) -> std::result::Result<Vec<[f64; N]>, (Vec<[f64; N]>, Error)>
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    let mut stepper = DormandPrince::new(cfg, t0, y0);
    let mut out = Vec::with_capacity(t_out.len());
    for &t in t_out {
        if let Err(e) = stepper.advance_to(&f, t) {
            return Err((out, e));
        }
        out.push(*stepper.y());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let f = |_t: f64, y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = -2.0 * y[0];
        let ts: Vec<f64> = (1..=10).map(|i| i as f64 * 0.5).collect();
        let out = integrate_samples(f, 0.0, [1.0], &ts, StepperConfig::new(1e-10)).unwrap();
        for (t, y) in ts.iter().zip(&out) {
            assert!((y[0] - (-2.0 * t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn harmonic_oscillator_long_run() {
        let f = |_t: f64, y: &[f64; 2], dy: &mut [f64; 2]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let t = 20.0 * std::f64::consts::PI;
        let out = integrate_samples(f, 0.0, [1.0, 0.0], &[t], StepperConfig::new(1e-11)).unwrap();
        assert!((out[0][0] - 1.0).abs() < 1e-8);
        assert!(out[0][1].abs() < 1e-8);
    }

    #[test]
    fn singular_rhs_underflows() {
        // y' = y² blows up at t = 1.
        let f = |_t: f64, y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = y[0] * y[0];
        let res = integrate_samples(f, 0.0, [1.0], &[0.5, 2.0], StepperConfig::new(1e-8));
        let (partial, err) = res.unwrap_err();
        assert_eq!(partial.len(), 1);
        assert!((partial[0][0] - 2.0).abs() < 1e-6);
        assert!(matches!(err, Error::StepUnderflow { .. }));
    }
}
