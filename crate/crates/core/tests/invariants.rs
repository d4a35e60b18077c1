use libration::dynamics::{integrate, run_sweep, DriveSchedule, RampProtocol};
use libration::steadystate::{
    det, linspace, stability_determinant, stability_matrix, steady_branches, sweep_diagram, trace, turning_drives,
    MeanFieldParams, Stability,
};
use libration::Execution;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Drive scale at which the Kerr shift becomes comparable to `|Δ|`.
fn knee(delta: f64, eta: f64) -> f64 {
    (delta.abs().powi(3) / (12.0 * eta)).sqrt()
}

fn params() -> impl Strategy<Value = MeanFieldParams> {
    (-200.0..-5.0f64, 0.05..10.0f64, 0.01..2.0f64, 0.0..2.0f64).prop_map(|(delta, gamma, eta, u)| {
        MeanFieldParams::new(delta, u * knee(delta, eta), gamma, eta).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn roots_reproduce_the_drive(p in params()) {
        for b in steady_branches(&p).unwrap() {
            let w2 = p.drive_squared_for(b.n);
            let target = p.omega_drive * p.omega_drive;
            prop_assert!((w2 - target).abs() <= 1e-7 * target.max(1e-300), "{w2} vs {target}");
        }
    }

    #[test]
    fn energy_balance(p in params()) {
        for b in steady_branches(&p).unwrap() {
            let lhs = p.gamma_b * b.n;
            let rhs = -p.omega_drive * b.beta0.im;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1e-300));
        }
    }

    #[test]
    fn trace_and_determinant(p in params()) {
        for b in steady_branches(&p).unwrap() {
            let a = stability_matrix(&p, b.n, b.beta0);
            let tr = trace(&a);
            prop_assert!((tr.re - p.gamma_b).abs() <= 1e-12 * p.gamma_b.max(p.shifted_detuning().abs()));
            prop_assert!(tr.im.abs() <= 1e-12 * p.shifted_detuning().abs().max(1.0));
            let d = det(&a);
            let expect = stability_determinant(&p, b.n);
            let scale = p.shifted_detuning().powi(2) + p.gamma_b.powi(2);
            prop_assert!((d.re - expect).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn stability_pattern(p in params()) {
        let branches = steady_branches(&p).unwrap();
        if branches.iter().any(|b| b.tangent) {
            return Ok(());
        }
        let pattern: Vec<Stability> = branches.iter().map(|b| b.stability).collect();
        match pattern.len() {
            1 => prop_assert_eq!(pattern, vec![Stability::Stable]),
            3 => prop_assert_eq!(pattern, vec![Stability::Stable, Stability::Unstable, Stability::Stable]),
            k => prop_assert!(false, "{k} roots"),
        }
    }
}

#[test]
fn execution_policies_agree() {
    let base = MeanFieldParams::new(-60.0, 0.0, 2.0, 1.0).unwrap();
    let grid = linspace(0.0, 2.0 * knee(-60.0, 1.0), 5000);
    let seq = sweep_diagram(&base, &grid, Execution::Sequential).unwrap();
    let par = sweep_diagram(&base, &grid, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
}

fn distance_after(p: &MeanFieldParams, start: Complex64, t: f64) -> f64 {
    let traj = integrate(p, start, &DriveSchedule::Constant(p.omega_drive), (0.0, t), 2, 1e-10).unwrap();
    traj.last_beta().unwrap().norm()
}

#[test]
fn stable_roots_attract_unstable_roots_repel() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 100 {
        let delta = rng.gen_range(-120.0..-20.0);
        let gamma = rng.gen_range(0.5..4.0);
        let p0 = MeanFieldParams::new(delta, 0.0, gamma, 1.0).unwrap();
        let Some([up, down]) = turning_drives(&p0) else { continue };
        let omega = down.omega_drive + rng.gen_range(0.1..0.9) * (up.omega_drive - down.omega_drive);
        let p = p0.with_drive(omega);
        let branches = steady_branches(&p).unwrap();
        if branches.len() != 3 || branches.iter().any(|b| b.tangent) {
            continue;
        }
        for b in &branches {
            let kick = 1e-4 * b.beta0.norm().max(1.0);
            let start = b.beta0 + Complex64::new(kick, 0.5 * kick);
            let t = 15.0 / gamma;
            let end = integrate(&p, start, &DriveSchedule::Constant(omega), (0.0, t), 2, 1e-10)
                .unwrap()
                .last_beta()
                .unwrap();
            let dist = (end - b.beta0).norm();
            if b.stable() {
                assert!(dist < 0.1 * kick, "stable root at n = {} drifted to {dist:e}", b.n);
            } else {
                assert!(dist > 10.0 * kick, "unstable root at n = {} held ({dist:e})", b.n);
            }
        }
        checked += 1;
    }
    // Sanity: the undriven vacuum stays put.
    let p = MeanFieldParams::new(-30.0, 0.0, 1.0, 1.0).unwrap();
    assert_eq!(distance_after(&p, Complex64::new(0.0, 0.0), 10.0), 0.0);
}

/// Drive at which the continuous up-ramp leaves the lower branch, taken as
/// the first sample where `n` passes the geometric mean of the fold occupation
/// and the upper branch it lands on.
fn switching_drive(p: &MeanFieldParams, rate: f64) -> f64 {
    let [up, _] = turning_drives(p).unwrap();
    let start = 0.9 * up.omega_drive;
    let end = 1.3 * up.omega_drive;
    let upper = steady_branches(&p.with_drive(up.omega_drive)).unwrap().last().unwrap().n;
    let threshold = (up.n * upper).sqrt();
    let beta0 = steady_branches(&p.with_drive(start)).unwrap()[0].beta0;
    let samples = ((end - start) / rate * p.gamma_b * 20.0) as usize;
    let proto = RampProtocol::continuous(start, end, rate, samples);
    let trace = run_sweep(p, &proto, beta0, 1e-10).unwrap();
    let i = trace.n.iter().position(|&n| n > threshold).expect("no switch");
    trace.omega[i]
}

#[test]
fn ramp_delay_shrinks_with_rate() {
    let p = MeanFieldParams::new(-20.0, 0.0, 2.0, 1.0).unwrap();
    let [up, _] = turning_drives(&p).unwrap();
    let rate = 0.5 * up.omega_drive;
    let d1 = switching_drive(&p, rate) - up.omega_drive;
    let d2 = switching_drive(&p, 0.5 * rate) - up.omega_drive;
    assert!(d1 > 0.0 && d2 > 0.0, "delays {d1} {d2}");
    let ratio = d2 / d1;
    assert!((0.5..=0.71).contains(&ratio), "delay ratio {ratio} ({d1} -> {d2})");
}
