//! Brute-force reference computations used to cross-check the closed forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::NanoparticleSpec;
use crate::steadystate::MeanFieldParams;

/// Monte Carlo estimate of the moment of inertia about the short axis `y`,
/// `∫ρ(x² + z²) dV` with `z` along the long axis. Returns `(estimate, standard error)`.
pub fn inertia_monte_carlo(spec: &NanoparticleSpec, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (spec.r_a, spec.r_b);
    let box_volume = 8.0 * a * b * b;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let x: f64 = rng.gen_range(-b..b);
        let y: f64 = rng.gen_range(-b..b);
        let z: f64 = rng.gen_range(-a..a);
        let inside = (x * x + y * y) / (b * b) + z * z / (a * a) <= 1.0;
        let v = if inside { x * x + z * z } else { 0.0 };
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    let scale = spec.density * box_volume;
    (scale * mean, scale * (var / n).sqrt())
}

/// Steady-state occupations found by scanning the cubic residual on a uniform
/// grid of `points` values over `[0, n_max]`, bracketing sign changes and
/// bisecting each bracket. Grid nodes where the residual is exactly zero are
/// reported directly.
pub fn scan_occupations(p: &MeanFieldParams, points: usize) -> Vec<f64> {
    let n_max = scan_upper_bound(p);
    let f = |n: f64| p.cubic_residual(n);
    let h = n_max / (points - 1) as f64;
    let mut roots = Vec::new();
    let mut x0 = 0.0;
    let mut f0 = f(x0);
    if f0 == 0.0 {
        roots.push(0.0);
    }
    for i in 1..points {
        let x1 = if i + 1 == points { n_max } else { i as f64 * h };
        let f1 = f(x1);
        if f1 == 0.0 {
            roots.push(x1);
        } else if f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
            roots.push(bisect(&f, x0, x1, f0));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

/// Every real root `x = 12ηn` of the cubic lies below `max(−(Δ+12η), 0) + (12ηΩ²/4)^{1/3}`.
pub fn scan_upper_bound(p: &MeanFieldParams) -> f64 {
    let a = p.kerr_rate();
    let q = a * 0.25 * p.omega_drive * p.omega_drive;
    let x_max = (-p.shifted_detuning()).max(0.0) + q.cbrt();
    (x_max / a) * (1.0 + 1e-9) + f64::MIN_POSITIVE
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Local extrema of `Ω²(n)` (the drive that supports occupation `n`), located
/// by scanning the sign of a centred finite difference and refining by
/// golden-section search. Returns `(n, Ω²)` pairs in ascending `n`.
pub fn drive_extrema(p: &MeanFieldParams, n_max: f64, points: usize) -> Vec<(f64, f64)> {
    let g = |n: f64| p.drive_squared_for(n);
    let h = n_max / (points - 1) as f64;
    let slope = |n: f64| g(n + 0.5 * h) - g((n - 0.5 * h).max(0.0));
    let mut out = Vec::new();
    let mut s0 = slope(h);
    for i in 2..points - 1 {
        let n = i as f64 * h;
        let s1 = slope(n);
        if (s0 > 0.0) != (s1 > 0.0) {
            let maximize = s0 > 0.0;
            let x = golden(&g, n - 2.0 * h, n + h, maximize);
            out.push((x, g(x)));
        }
        s0 = s1;
    }
    out
}

fn golden<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, maximize: bool) -> f64 {
    let sign = if maximize { -1.0 } else { 1.0 };
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (sign * f(c), sign * f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * b.abs().max(a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = sign * f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = sign * f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rotational_inertia, Material};
    use crate::steadystate::steady_occupations;

    #[test]
    fn monte_carlo_inertia_sphere_and_spheroid() {
        for (a, b) in [(50e-9, 50e-9), (50e-9, 30e-9)] {
            let spec = NanoparticleSpec::new(a, b, Material::DIAMOND).unwrap();
            let (est, se) = inertia_monte_carlo(&spec, 400_000, 7);
            let exact = rotational_inertia(&spec);
            assert!((est - exact).abs() < 5.0 * se, "{est} vs {exact} (se {se})");
        }
    }

    #[test]
    fn scan_finds_three_roots() {
        let p = MeanFieldParams::new(-60.0, 40.0, 2.0, 1.0).unwrap();
        let scanned = scan_occupations(&p, 200_000);
        let closed = steady_occupations(&p).n;
        assert_eq!(scanned.len(), closed.len());
        for (a, b) in scanned.iter().zip(&closed) {
            assert!((a - b).abs() <= 1e-9 * b.max(1.0));
        }
    }

    #[test]
    fn extrema_of_bistable_curve() {
        let p = MeanFieldParams::new(-60.0, 0.0, 2.0, 1.0).unwrap();
        let ext = drive_extrema(&p, 10.0, 20_000);
        assert_eq!(ext.len(), 2);
        assert!(ext[0].1 > ext[1].1);
    }
}
