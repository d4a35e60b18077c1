//! Subcommand bodies. Each writes its tables into the output directory and
//! returns a short text report for the terminal.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use libration::constants::{rad_to_hz, TWO_PI};
use libration::dynamics::{hysteresis_sweep, Jump, RampProtocol, SweepTrace};
use libration::model::{mode_parameters, NanoparticleSpec};
use libration::oracles::inertia_monte_carlo;
use libration::squeezing::{
    angle_traces, characteristic_frequencies, closed_trace, squeeze_params, thermal_squeezing_check, OracleConfig,
    Regime, VarianceTrace,
};
use libration::steadystate::{
    characteristic_detuning, critical_offset, linspace, steady_branches, sweep_diagram, turning_drives,
    turning_points, MeanFieldParams, TurningPoint,
};
use libration::Execution;
use log::warn;

use crate::config::{BranchRef, NamedAngle, RampKind, RampSection, Resolved, RunConfig};
use crate::error::CliError;
use crate::svg::{Chart, Style};
use crate::table::{flag, num, Table};

#[derive(Debug, Clone)]
pub struct Options {
    pub out: PathBuf,
    pub svg: bool,
    pub seed: u64,
    /// Monte Carlo samples for the inertia cross-check in `derive`; 0 skips it.
    pub mc_samples: usize,
    pub exec: Execution,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl Report {
    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn table(&mut self, opts: &Options, name: &str, t: &Table) -> Result<(), CliError> {
        let path = opts.out.join(name);
        t.write(&path)?;
        self.files.push(path);
        Ok(())
    }

    fn chart(&mut self, opts: &Options, name: &str, c: &Chart) -> Result<(), CliError> {
        if opts.svg {
            let path = opts.out.join(name);
            c.write(&path)?;
            self.files.push(path);
        }
        Ok(())
    }
}

pub fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// `quantity,value,unit` table.
struct Quantities(Table);

impl Quantities {
    fn new() -> Self {
        Quantities(Table::new(&["quantity", "value", "unit"]))
    }

    fn add(&mut self, name: &str, value: f64, unit: &str) {
        self.0.push(vec![name.to_string(), num(value), unit.to_string()]);
    }

    /// An angular frequency in rad/s and in Hz.
    fn freq(&mut self, name: &str, omega: f64) {
        self.add(name, omega, "rad/s");
        self.add(&format!("{name}_hz"), rad_to_hz(omega), "Hz");
    }

    fn boolean(&mut self, name: &str, b: bool) {
        self.0.push(vec![name.to_string(), flag(b), String::new()]);
    }
}

fn derive_row(spec: &NanoparticleSpec, trap: &libration::model::TrapConfig) -> Result<Vec<String>, CliError> {
    let m = mode_parameters(spec, trap)?;
    Ok(vec![
        num(spec.r_a),
        num(spec.r_b),
        num(spec.eccentricity()),
        num(m.inertia),
        num(m.kappa_x),
        num(m.kappa_y),
        num(m.omega_t),
        num(rad_to_hz(m.omega_t)),
        num(m.eta),
        num(rad_to_hz(m.eta)),
        num(m.eta / m.omega_t),
        num(TWO_PI * m.eta / m.omega_t),
    ])
}

const DERIVE_SWEEP_COLUMNS: [&str; 12] = [
    "r_a_m",
    "r_b_m",
    "eccentricity",
    "inertia_kg_m2",
    "kappa_x",
    "kappa_y",
    "omega_t",
    "omega_t_hz",
    "eta",
    "eta_hz",
    "eta_over_omega_t",
    "two_pi_eta_over_omega_t",
];

pub fn derive(cfg: &RunConfig, opts: &Options) -> Result<Report, CliError> {
    let r = cfg.resolve()?;
    let m = r.mode;
    let mut rep = Report::default();
    let mut q = Quantities::new();
    q.add("r_a", r.spec.r_a, "m");
    q.add("r_b", r.spec.r_b, "m");
    q.add("eccentricity", r.spec.eccentricity(), "");
    q.add("density", r.spec.density, "kg/m^3");
    q.add("eps_r", r.spec.eps_r, "");
    q.add("inertia", m.inertia, "kg m^2");
    q.add("kappa_x", m.kappa_x, "");
    q.add("kappa_y", m.kappa_y, "");
    q.freq("omega_t", m.omega_t);
    q.add("mode_period", TWO_PI / m.omega_t, "s");
    q.freq("eta", m.eta);
    q.add("eta_over_omega_t", m.eta / m.omega_t, "");
    q.add("two_pi_eta_over_omega_t", TWO_PI * m.eta / m.omega_t, "");
    q.add("theta0", m.theta0, "rad");
    q.add("j0", m.j0, "kg m^2/s");
    q.freq("gamma_b", r.gamma_b);
    q.add("nbar", r.nbar, "");
    if let Some(delta) = r.delta_ml {
        q.freq("omega_ml", delta + m.omega_t);
        q.freq("delta_ml", delta);
        q.freq("omega_drive", r.omega_drive);
        q.freq("omega_c", m.omega_t - critical_offset(m.eta, r.gamma_b));
        q.boolean("bistable", characteristic_detuning(delta, m.eta, r.gamma_b) < 0.0);
    }
    if opts.mc_samples > 0 {
        let (est, se) = inertia_monte_carlo(&r.spec, opts.mc_samples, opts.seed);
        q.add("inertia_monte_carlo", est, "kg m^2");
        q.add("inertia_monte_carlo_stderr", se, "kg m^2");
        rep.line(format!(
            "inertia Monte Carlo ({} samples, seed {}): {est:.6e} +- {se:.1e} kg m^2 (closed form {:.6e})",
            opts.mc_samples, opts.seed, m.inertia
        ));
    }
    rep.line(format!(
        "omega_t = {:.6e} rad/s ({:.6} MHz), period {:.4} us",
        m.omega_t,
        rad_to_hz(m.omega_t) * 1e-6,
        TWO_PI / m.omega_t * 1e6
    ));
    rep.line(format!(
        "eta = {:.6e} rad/s, eta/omega_t = {:.4e}, 2 pi eta/omega_t = {:.4e}",
        m.eta,
        m.eta / m.omega_t,
        TWO_PI * m.eta / m.omega_t
    ));
    rep.line(format!("I = {:.6e} kg m^2, kappa = ({:.6}, {:.6})", m.inertia, m.kappa_x, m.kappa_y));
    rep.table(opts, "derive.csv", &q.0)?;

    let material = cfg.particle.material()?;
    if let Some(sweep) = &cfg.sweep {
        if let Some(range) = &sweep.r_a_nm {
            let e = r.spec.eccentricity();
            let radii = range.values("sweep.r_a_nm")?;
            let rows = opts.exec.map(&radii, |&ra| {
                let spec = NanoparticleSpec::from_eccentricity(ra * 1e-9, e, material)?;
                derive_row(&spec, &r.trap)
            });
            let t = collect_rows(&DERIVE_SWEEP_COLUMNS, rows)?;
            eta_chart(&t, "r_a_m", "long semi-axis r_a (m)", true, &format!("eta vs r_a at e = {e:.4}"))
                .map(|c| rep.chart(opts, "derive_sweep_r_a.svg", &c))
                .transpose()?;
            rep.table(opts, "derive_sweep_r_a.csv", &t)?;
        }
        if let Some(range) = &sweep.eccentricity {
            let es = range.values("sweep.eccentricity")?;
            let rows = opts.exec.map(&es, |&e| {
                let spec = NanoparticleSpec::from_eccentricity(r.spec.r_a, e, material)?;
                derive_row(&spec, &r.trap)
            });
            let t = collect_rows(&DERIVE_SWEEP_COLUMNS, rows)?;
            eta_chart(
                &t,
                "eccentricity",
                "eccentricity e",
                false,
                &format!("eta vs e at r_a = {:.3e} m", r.spec.r_a),
            )
            .map(|c| rep.chart(opts, "derive_sweep_eccentricity.svg", &c))
            .transpose()?;
            rep.table(opts, "derive_sweep_eccentricity.csv", &t)?;
        }
    }
    Ok(rep)
}

fn collect_rows(headers: &[&str], rows: Vec<Result<Vec<String>, CliError>>) -> Result<Table, CliError> {
    let mut t = Table::new(headers);
    for row in rows {
        t.push(row?);
    }
    Ok(t)
}

fn eta_chart(t: &Table, x_col: &str, x_label: &str, log: bool, title: &str) -> Option<Chart> {
    let xs = t.column_f64(x_col)?;
    let ys = t.column_f64("eta")?;
    let mut c = Chart::new(title, x_label, "eta (rad/s)");
    c.log_x = log;
    c.log_y = log;
    c.add("eta", xs.into_iter().zip(ys).collect(), Style::Line);
    Some(c)
}

/// Drive scale at which the Kerr shift matches the detuning (or the damping).
fn drive_scale(p: &MeanFieldParams) -> f64 {
    let d = p.shifted_detuning().abs().max(p.gamma_b).max(p.kerr_rate());
    (d.powi(3) / p.kerr_rate()).sqrt()
}

fn default_drive_end(p: &MeanFieldParams) -> f64 {
    match turning_drives(p) {
        Some([up, _]) => 1.5 * up.omega_drive,
        None => 1.5 * drive_scale(p),
    }
}

fn fold_rows(q: &mut Quantities, label: &str, tp: &TurningPoint) {
    q.freq(&format!("{label}_omega_drive"), tp.omega_drive);
    q.freq(&format!("{label}_delta_eff"), tp.delta_eff);
    q.add(&format!("{label}_n"), tp.n, "");
}

pub fn bistability(cfg: &RunConfig, opts: &Options) -> Result<Report, CliError> {
    let r = cfg.resolve()?;
    let p = r.mean_field()?;
    let mut rep = Report::default();
    let grid = match cfg.sweep.as_ref().map(|s| s.drive_grid()).transpose()?.flatten() {
        Some(g) => g,
        None => linspace(0.0, default_drive_end(&p), 2001),
    };
    let diag = sweep_diagram(&p, &grid, opts.exec)?;

    let mut t = Table::new(&[
        "omega_drive",
        "n",
        "delta_eff",
        "stable",
        "re_eig1",
        "im_eig1",
        "re_eig2",
        "im_eig2",
        "branch",
        "omega_drive_hz",
        "delta_eff_hz",
    ]);
    let mut stable_pts = Vec::new();
    let mut unstable_pts = Vec::new();
    for s in &diag.samples {
        for (i, b) in s.branches.iter().enumerate() {
            t.push(vec![
                num(s.omega_drive),
                num(b.n),
                num(b.delta_eff),
                flag(b.stable()),
                num(b.eigenvalues[0].re),
                num(b.eigenvalues[0].im),
                num(b.eigenvalues[1].re),
                num(b.eigenvalues[1].im),
                i.to_string(),
                num(rad_to_hz(s.omega_drive)),
                num(rad_to_hz(b.delta_eff)),
            ]);
            let pt = (rad_to_hz(s.omega_drive), rad_to_hz(b.delta_eff));
            if b.stable() {
                stable_pts.push(pt);
            } else {
                unstable_pts.push(pt);
            }
        }
    }
    rep.table(opts, "diagram.csv", &t)?;

    let m = r.mode;
    let delta = characteristic_detuning(p.delta_ml, p.eta, p.gamma_b);
    let mut q = Quantities::new();
    q.freq("omega_t", m.omega_t);
    q.freq("omega_ml", p.delta_ml + m.omega_t);
    q.freq("delta_ml", p.delta_ml);
    q.freq("eta", p.eta);
    q.freq("gamma_b", p.gamma_b);
    q.freq("omega_c", m.omega_t + diag.critical_detuning);
    q.freq("characteristic_detuning", delta);
    q.boolean("bistable", diag.bistable);
    q.boolean("platform", diag.platform);
    q.freq("window_width", diag.window_width);
    let mut chart = Chart::new("steady states", "drive amplitude (Hz)", "effective detuning (Hz)");
    if let Some([up, down]) = diag.turning_points {
        fold_rows(&mut q, "fold_up", &up);
        fold_rows(&mut q, "fold_down", &down);
        chart.v_lines.push((rad_to_hz(up.omega_drive), "up jump".into()));
        chart.v_lines.push((rad_to_hz(down.omega_drive), "down jump".into()));
        rep.line(format!(
            "bistable: window {:.6e} rad/s ({:.4} Hz); folds at Omega = {:.6e} / {:.6e} rad/s, delta_eff = {:.6e} / {:.6e} rad/s",
            diag.window_width,
            rad_to_hz(diag.window_width),
            up.omega_drive,
            down.omega_drive,
            up.delta_eff,
            down.delta_eff
        ));
    } else {
        rep.line(format!(
            "monostable: omega_ml - omega_c = {:.6e} rad/s ({:.4} Hz)",
            delta,
            rad_to_hz(delta)
        ));
    }
    rep.table(opts, "bistability_summary.csv", &q.0)?;
    chart.add("stable", stable_pts, Style::Markers);
    chart.add("unstable", unstable_pts, Style::Markers);
    rep.chart(opts, "diagram.svg", &chart)?;

    if let Some(pressures) = cfg.sweep.as_ref().map(|s| s.pressures()).transpose()?.flatten() {
        if r.env.gamma_b_override.is_some() {
            return Err(CliError::config(
                "environment.gamma_b",
                "a fixed damping cannot be combined with a pressure sweep",
            ));
        }
        let sweep = cfg.sweep.as_ref().expect("pressures come from the sweep section");
        // Window width against δ at fixed damping, one curve per pressure.
        let deltas = match sweep.detuning_grid()? {
            Some(g) => g,
            None => {
                let span = p.delta_ml.abs().max(3f64.sqrt() * r.env.damping_coeff * pressures.iter().cloned().fold(0.0, f64::max));
                linspace(-2.0 * span, 0.0, 201)
            }
        };
        let mut pt = Table::new(&[
            "pressure_pa",
            "gamma_b",
            "characteristic_detuning",
            "window_width",
            "bistable",
            "gamma_b_hz",
            "characteristic_detuning_hz",
            "window_width_hz",
        ]);
        let mut c = Chart::new("window width vs characteristic detuning", "delta (Hz)", "window width (Hz)");
        for &pr in &pressures {
            let gamma = r.env.damping_coeff * pr;
            let mut pts = Vec::new();
            for &d in &deltas {
                let (bistable, w) = if d < 0.0 {
                    (true, turning_points(d, p.eta, gamma)?.window)
                } else {
                    (false, 0.0)
                };
                pt.push(vec![
                    num(pr),
                    num(gamma),
                    num(d),
                    num(w),
                    flag(bistable),
                    num(rad_to_hz(gamma)),
                    num(rad_to_hz(d)),
                    num(rad_to_hz(w)),
                ]);
                pts.push((rad_to_hz(d), rad_to_hz(w)));
            }
            c.add(format!("{pr:.3e} Pa"), pts, Style::Line);
        }
        rep.table(opts, "window_vs_pressure.csv", &pt)?;
        rep.chart(opts, "window_vs_pressure.svg", &c)?;
    }
    Ok(rep)
}

pub fn ramp_protocol(ramp: &RampSection, p: &MeanFieldParams) -> Result<RampProtocol, CliError> {
    let (start, end) = ramp.bounds()?;
    let start = start.unwrap_or(0.0);
    let end = match end {
        Some(e) => e,
        None => match turning_drives(p) {
            Some([up, _]) => ramp.overshoot.unwrap_or(1.25) * up.omega_drive,
            None => default_drive_end(p),
        },
    };
    if end == start {
        return Err(CliError::config("ramp", "start and end drive coincide"));
    }
    Ok(match ramp.mode {
        RampKind::QuasiStatic => {
            if !(p.gamma_b > 0.0) {
                return Err(CliError::config(
                    "environment",
                    "a quasi-static ramp needs damping > 0 to set its dwell time",
                ));
            }
            let steps = ramp.steps.unwrap_or(1000);
            let mut proto = RampProtocol::quasi_static(start, end, steps, p.gamma_b);
            if let Some(k) = ramp.dwell_relaxations {
                proto.mode = libration::dynamics::RampMode::QuasiStatic {
                    steps,
                    dwell: k / p.gamma_b,
                };
            }
            proto
        }
        RampKind::Continuous => {
            let rate = ramp.rate()?.expect("validated");
            RampProtocol::continuous(start, end, rate, ramp.samples.unwrap_or(2000))
        }
    })
}

fn trajectory_table(tr: &SweepTrace) -> Table {
    let mut t = Table::new(&[
        "t",
        "re_beta",
        "im_beta",
        "n",
        "omega_applied",
        "delta_eff",
        "omega_applied_hz",
        "delta_eff_hz",
    ]);
    for i in 0..tr.n.len() {
        t.push(vec![
            num(tr.times[i]),
            num(tr.beta[i][0]),
            num(tr.beta[i][1]),
            num(tr.n[i]),
            num(tr.omega[i]),
            num(tr.delta_eff[i]),
            num(rad_to_hz(tr.omega[i])),
            num(rad_to_hz(tr.delta_eff[i])),
        ]);
    }
    t
}

fn jump_row(direction: &str, jump: Option<&Jump>, fold: Option<f64>, area: f64, fraction: f64) -> Vec<String> {
    let nan = f64::NAN;
    let (w, before, after) = jump.map_or((nan, nan, nan), |j| (j.omega_drive, j.delta_eff_before, j.delta_eff_after));
    let fold = fold.unwrap_or(nan);
    vec![
        direction.to_string(),
        flag(jump.is_some()),
        num(w),
        num(fold),
        num((w - fold) / fold),
        num(before),
        num(after),
        num(area),
        num(fraction),
        num(rad_to_hz(w)),
        num(rad_to_hz(fold)),
        num(rad_to_hz(before)),
        num(rad_to_hz(after)),
    ]
}

pub fn hysteresis(cfg: &RunConfig, opts: &Options) -> Result<Report, CliError> {
    let r = cfg.resolve()?;
    let p = r.mean_field()?;
    let ramp = cfg.ramp.clone().unwrap_or_default();
    let tol = ramp.tolerance.unwrap_or(1e-8);
    let up = ramp_protocol(&ramp, &p)?;
    let down = up.reversed();
    let res = hysteresis_sweep(&p, &up, &down, tol)?;
    for w in &res.warnings {
        warn!("{w}");
    }
    let mut rep = Report::default();
    rep.table(opts, "hysteresis_up.csv", &trajectory_table(&res.up))?;
    rep.table(opts, "hysteresis_down.csv", &trajectory_table(&res.down))?;

    let folds = turning_drives(&p);
    let mut s = Table::new(&[
        "direction",
        "jumped",
        "omega_jump",
        "static_fold",
        "rel_offset",
        "delta_eff_before",
        "delta_eff_after",
        "loop_area",
        "loop_fraction",
        "omega_jump_hz",
        "static_fold_hz",
        "delta_eff_before_hz",
        "delta_eff_after_hz",
    ]);
    let (up_fold, down_fold) = match folds {
        Some([u, d]) => (Some(u.omega_drive), Some(d.omega_drive)),
        None => (None, None),
    };
    s.push(jump_row("up", res.jump_up.as_ref(), up_fold, res.loop_area, res.loop_fraction));
    s.push(jump_row("down", res.jump_down.as_ref(), down_fold, res.loop_area, res.loop_fraction));
    rep.table(opts, "hysteresis_summary.csv", &s)?;

    for (name, j, fold) in [("up", &res.jump_up, up_fold), ("down", &res.jump_down, down_fold)] {
        match (j, fold) {
            (Some(j), Some(f)) => rep.line(format!(
                "{name} jump at Omega = {:.6e} rad/s (static fold {:.6e}, offset {:+.3}%)",
                j.omega_drive,
                f,
                100.0 * (j.omega_drive - f) / f
            )),
            (Some(j), None) => rep.line(format!("{name} jump at Omega = {:.6e} rad/s", j.omega_drive)),
            (None, _) => rep.line(format!("{name}: no jump")),
        }
    }
    rep.line(format!(
        "loop area {:.6e} (rad/s)^2, fraction {:.4e}",
        res.loop_area, res.loop_fraction
    ));

    let mut c = Chart::new("hysteresis", "drive amplitude (Hz)", "effective detuning (Hz)");
    let pts = |tr: &SweepTrace| -> Vec<(f64, f64)> {
        tr.omega
            .iter()
            .zip(&tr.delta_eff)
            .map(|(&w, &d)| (rad_to_hz(w), rad_to_hz(d)))
            .collect()
    };
    c.add("up sweep", pts(&res.up), Style::Line);
    c.add("down sweep", pts(&res.down), Style::Dashed);
    if let (Some(u), Some(d)) = (up_fold, down_fold) {
        c.v_lines.push((rad_to_hz(u), "fold (up)".into()));
        c.v_lines.push((rad_to_hz(d), "fold (down)".into()));
    }
    rep.chart(opts, "hysteresis.svg", &c)?;
    Ok(rep)
}

fn trace_table(tr: &VarianceTrace, nbar: f64) -> Table {
    let mut t = Table::new(&["t", "S_theta", "S_J", "squeezed_theta", "squeezed_J", "regime"]);
    let verdicts = thermal_squeezing_check(tr, nbar);
    for (i, (sq_t, sq_j)) in verdicts.into_iter().enumerate() {
        t.push(vec![
            num(tr.times[i]),
            num(tr.s_theta[i]),
            num(tr.s_j[i]),
            flag(sq_t),
            flag(sq_j),
            tr.regime.label().to_string(),
        ]);
    }
    t
}

fn extrema(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Amplitude and phase of the requested steady branch.
fn branch_amplitude(r: &Resolved, which: BranchRef) -> Result<(f64, f64), CliError> {
    let p = r.mean_field()?;
    let branches = steady_branches(&p)?;
    let b = match (which, branches.len()) {
        (BranchRef::Lower, _) => branches.first(),
        (BranchRef::Upper, _) => branches.last(),
        (BranchRef::Middle, 3) => branches.get(1),
        (BranchRef::Middle, k) => {
            return Err(CliError::config(
                "squeeze.branch",
                format!("the drive supports {k} steady state(s); no middle branch"),
            ))
        }
    }
    .ok_or_else(|| CliError::config("squeeze.branch", "no steady state"))?;
    Ok((b.beta0.norm(), b.beta0.arg()))
}

pub fn squeeze(cfg: &RunConfig, opts: &Options) -> Result<Report, CliError> {
    let r = cfg.resolve()?;
    let sq = cfg
        .squeeze
        .as_ref()
        .ok_or_else(|| CliError::config("squeeze", "missing `squeeze` section"))?;
    let delta = r
        .delta_ml
        .ok_or_else(|| CliError::config("drive", "a drive frequency (`omega_ml_*` or `detuning_*`) is required"))?;
    let eta = r.mode.eta;

    let (amp, branch_phi) = match (sq.r, sq.branch) {
        (Some(a), _) => (a, None),
        (None, Some(b)) => {
            let (a, phi) = branch_amplitude(&r, b)?;
            (a, Some(phi))
        }
        (None, None) => unreachable!("validated"),
    };
    let base = squeeze_params(delta, eta, amp, 0.0, sq.nbar)?;
    let mut angles: Vec<f64> = branch_phi.into_iter().collect();
    angles.extend(&sq.phi_rad);
    for named in &sq.angles {
        if base.regime() != Regime::Hyperbolic {
            return Err(CliError::config(
                "squeeze.angles",
                format!("named angles need the hyperbolic regime, parameters are {}", base.regime()),
            ));
        }
        angles.push(match named {
            NamedAngle::ThetaSqueezing => base.theta_squeezing_angle(),
            NamedAngle::ThetaAmplifying => base.theta_amplifying_angle(),
            NamedAngle::JAmplifying => base.j_amplifying_angle(),
        });
    }
    if angles.is_empty() {
        return Err(CliError::config("squeeze.phi_rad", "give at least one angle"));
    }
    let times = linspace(0.0, sq.t_end_s, sq.points);

    let mut rep = Report::default();
    let (w1, w2) = characteristic_frequencies(r.mode.omega_t, eta, amp);
    let mut q = Quantities::new();
    q.add("r", amp, "");
    q.freq("delta_ml", delta);
    q.freq("eta", eta);
    q.freq("lambda", base.lambda);
    q.freq("xi", base.xi);
    q.freq("lambda_p_re", base.lambda_p.re);
    q.freq("lambda_p_im", base.lambda_p.im);
    q.freq("omega_ml1", w1);
    q.freq("omega_ml2", w2);
    q.add("period", base.period().unwrap_or(f64::NAN), "s");
    q.add("nbar", sq.nbar, "");
    q.add("benchmark", base.benchmark(), "");
    rep.table(opts, "squeeze_params.csv", &q.0)?;
    rep.line(format!(
        "{} regime: lambda = {:.6e} rad/s, xi = {:.6e} rad/s, lambda_p = {:.6e}{:+.6e}i rad/s",
        base.regime(),
        base.lambda,
        base.xi,
        base.lambda_p.re,
        base.lambda_p.im
    ));
    if let Some(period) = base.period() {
        rep.line(format!("variance period pi/lambda_p' = {period:.6e} s"));
    }

    let closed: Vec<VarianceTrace> = opts
        .exec
        .map(&angles, |&phi| closed_trace(&base.with_phi(phi), &times));
    let run_oracle = sq.oracle.unwrap_or(true) || sq.damped;
    let (oracle_cfg, oracle_label) = if sq.damped {
        (OracleConfig::damped(r.gamma_b, r.nbar), "oracle_damped")
    } else {
        (OracleConfig::default(), "oracle")
    };
    let oracle = if run_oracle {
        Some(angle_traces(&base, &angles, &times, &oracle_cfg, opts.exec)?)
    } else {
        None
    };

    let mut summary = Table::new(&[
        "index",
        "phi",
        "source",
        "regime",
        "min_S_theta",
        "max_S_theta",
        "min_S_J",
        "max_S_J",
        "squeezed_theta_any",
        "squeezed_J_any",
        "min_uncertainty_product",
        "max_rel_diff_vs_closed",
    ]);
    let mut chart = Chart::new("angle variance", "t (s)", "S_theta");
    chart.h_lines.push((base.benchmark(), "(2n+1)/4".into()));
    for (i, &phi) in angles.iter().enumerate() {
        let mut sources: Vec<(&str, &VarianceTrace)> = vec![("closed_form", &closed[i])];
        if let Some(o) = &oracle {
            sources.push((oracle_label, &o[i]));
        }
        for (label, tr) in &sources {
            let table = trace_table(tr, sq.nbar);
            let file = format!("squeeze_{label}_{i:02}.csv");
            rep.table(opts, &file, &table)?;
            let (lo_t, hi_t) = extrema(&tr.s_theta);
            let (lo_j, hi_j) = extrema(&tr.s_j);
            let verdicts = thermal_squeezing_check(tr, sq.nbar);
            let diff = if *label == "closed_form" {
                0.0
            } else {
                tr.s_theta
                    .iter()
                    .zip(&closed[i].s_theta)
                    .chain(tr.s_j.iter().zip(&closed[i].s_j))
                    .map(|(a, b)| (a - b).abs() / b.abs())
                    .fold(0.0, f64::max)
            };
            let (min_prod, _) = extrema(&tr.uncertainty_products());
            summary.push(vec![
                i.to_string(),
                num(phi),
                label.to_string(),
                tr.regime.label().to_string(),
                num(lo_t),
                num(hi_t),
                num(lo_j),
                num(hi_j),
                flag(verdicts.iter().any(|v| v.0)),
                flag(verdicts.iter().any(|v| v.1)),
                num(min_prod),
                num(diff),
            ]);
        }
        let plotted = oracle.as_ref().map_or(&closed[i], |o| &o[i]);
        chart.add(
            format!("phi = {:.3} pi", phi / PI),
            times.iter().copied().zip(plotted.s_theta.iter().copied()).collect(),
            Style::Line,
        );
        let (lo, hi) = extrema(&plotted.s_theta);
        rep.line(format!("phi = {phi:+.6} rad: S_theta in [{lo:.6e}, {hi:.6e}]"));
    }
    rep.table(opts, "squeeze_summary.csv", &summary)?;
    rep.chart(opts, "squeeze_theta.svg", &chart)?;
    Ok(rep)
}
