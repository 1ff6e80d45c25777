//! Subcommand implementations. Each writes its artifacts and returns a short console summary.

use std::io::IsTerminal;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tdho::amplitude::classical_oracle;
use tdho::catalog;
use tdho::evolution::{apply_kernel_onto, CN_MAX_OMEGA_DT, MIN_POINTS_PER_OSCILLATION};
use tdho::prelude::*;
use tdho::profiles::ProfileKind;
use tdho::propagator::QuadraticKernel;

use crate::config::{ConfigError, SimulationConfig};
use crate::output::{write_json, OutputError, Table};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] tdho::Error),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("{failed} of {total} verification checks failed")]
    VerifyFailed { failed: usize, total: usize },
}

impl CommandError {
    /// 2 for numerical failures, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CommandError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }

    pub fn failure_time(&self) -> Option<f64> {
        match self {
            CommandError::Core(e) if e.is_numerical() => e.failure_time(),
            _ => None,
        }
    }
}

pub type CommandResult<T = ()> = Result<T, CommandError>;

/// A loaded configuration together with where its inputs and outputs live.
#[derive(Debug, Clone)]
pub struct Run {
    pub config: SimulationConfig,
    /// Directory against which relative profile CSV paths resolve.
    pub base_dir: PathBuf,
    pub output_dir: PathBuf,
}

impl Run {
    pub fn new(config: SimulationConfig, base_dir: PathBuf, output_dir: Option<PathBuf>) -> Self {
        let output_dir = output_dir.unwrap_or_else(|| PathBuf::from(&config.output_dir));
        Run { config, base_dir, output_dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }

    fn profile(&self) -> CommandResult<FrequencyProfile> {
        Ok(self.config.build_profile(&self.base_dir)?)
    }

    fn initial(&self) -> InitialAmplitude {
        let a = self.config.amplitude;
        InitialAmplitude::new(Complex64::new(a.a0[0], a.a0[1]), Complex64::new(a.adot0[0], a.adot0[1]))
    }

    fn trajectory(&self, profile: &FrequencyProfile) -> CommandResult<AmplitudeTrajectory> {
        let c = &self.config;
        Ok(solve_amplitude(profile, c.t0, c.t1, self.initial(), c.tolerance()?)?)
    }

    fn structure(&self, profile: &FrequencyProfile) -> CommandResult<StructureFunctions> {
        let sf = StructureFunctions::build(self.trajectory(profile)?, self.config.mass, self.config.hbar)?;
        Ok(sf.with_caustic_epsilon(self.config.kernel.caustic_epsilon)?)
    }

    fn sample_times(&self) -> Vec<f64> {
        let (a, b, n) = (self.config.t0, self.config.t1, self.config.samples);
        (0..n).map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect()
    }

    /// Checkpoints, or `t1` alone when none are configured.
    fn checkpoints(&self) -> Vec<f64> {
        if self.config.checkpoints.is_empty() {
            vec![self.config.t1]
        } else {
            self.config.checkpoints.clone()
        }
    }

    fn initial_state(&self) -> CommandResult<WavefunctionGrid> {
        let (g, s, c) = (self.config.grid, self.config.initial_state, &self.config);
        let grid = GridSpec::new(g.x_min, g.x_max, g.n)?;
        Ok(gaussian_state(&grid, s.center, s.momentum, s.sigma, c.mass, c.hbar)?)
    }

    fn cn_step(&self, profile: &FrequencyProfile) -> f64 {
        self.config.evolve.dt.unwrap_or(0.1 * CN_MAX_OMEGA_DT / profile.omega_max())
    }
}

pub fn solve_amplitude_cmd(run: &Run) -> CommandResult<String> {
    let profile = run.profile()?;
    let traj = run.trajectory(&profile)?;
    let mut table = Table::new(&["t", "re_a", "im_a", "re_adot", "im_adot", "theta"]);
    for t in run.sample_times() {
        let (a, adot) = traj.amplitude(t)?;
        table.push(&[t, a.re, a.im, adot.re, adot.im, traj.phase(t)?]);
    }
    let path = run.path("amplitude.csv");
    table.write(&path)?;
    Ok(format!("wrote {} rows to {}", table.len(), path.display()))
}

pub fn structure_cmd(run: &Run) -> CommandResult<String> {
    let sf = run.structure(&run.profile()?)?;
    let mut table = Table::new(&["t", "re_f0", "im_f0", "re_f1", "im_f1", "re_c", "im_c", "u", "v", "udot", "vdot"]);
    for t in run.sample_times() {
        let r = sf.raw(t)?;
        let b = sf.basis(t)?;
        table.push(&[t, r.f0.re, r.f0.im, r.f1.re, r.f1.im, r.c.re, r.c.im, b.u, b.v, b.udot, b.vdot]);
    }
    let path = run.path("structure.csv");
    table.write(&path)?;
    let caustics: Vec<String> = sf.caustic_times().iter().map(|t| format!("{t:.6}")).collect();
    Ok(format!("wrote {} rows to {}; caustics at [{}]", table.len(), path.display(), caustics.join(", ")))
}

/// Kernel samples on the `q × q0` lattice at each time; `times` overrides the configuration.
pub fn kernel_cmd(run: &Run, times: &[f64]) -> CommandResult<String> {
    let c = &run.config;
    let times = if !times.is_empty() {
        times.to_vec()
    } else if !c.kernel.times.is_empty() {
        c.kernel.times.clone()
    } else {
        run.checkpoints()
    };
    if let Some(&t) = times.iter().find(|&&t| !(t >= c.t0 && t <= c.t1)) {
        return Err(ConfigError::Invalid {
            field: "time".into(),
            message: format!("{t} lies outside [{}, {}]", c.t0, c.t1),
        }
        .into());
    }
    let sf = run.structure(&run.profile()?)?;
    let mut table = Table::new(&["q", "q0", "t", "re_k", "im_k", "action", "maslov"]);
    let mut flagged = 0;
    for &t in &times {
        for &q in &c.kernel.q {
            for &q0 in &c.kernel.q0 {
                let k = kernel(&sf, q, q0, t)?;
                flagged += usize::from(k.caustic_flag);
                table.push(&[q, q0, t, k.value.re, k.value.im, k.action, k.maslov_index as f64]);
            }
        }
    }
    let path = run.path("kernel.csv");
    table.write(&path)?;
    let mut msg = format!("wrote {} rows to {}", table.len(), path.display());
    if flagged > 0 {
        msg.push_str(&format!("; {flagged} samples lie close to a caustic"));
    }
    Ok(msg)
}

#[derive(Debug, Serialize)]
struct EvolveCheckpoint {
    t: f64,
    file: String,
    norm: f64,
    mean_position: f64,
    maslov_index: u32,
    caustic_flag: bool,
    min_points_per_oscillation: Option<f64>,
    warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    l2_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fidelity: Option<f64>,
}

#[derive(Debug, Serialize)]
struct OracleInfo {
    method: &'static str,
    dt: f64,
}

#[derive(Debug, Serialize)]
struct EvolveSummary {
    profile: &'static str,
    t0: f64,
    mass: f64,
    hbar: f64,
    grid: crate::config::GridConfig,
    initial_state: crate::config::InitialStateSpec,
    initial_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleInfo>,
    checkpoints: Vec<EvolveCheckpoint>,
}

/// Kernel-propagated states at each checkpoint, optionally compared against Crank–Nicolson.
pub fn evolve_cmd(run: &Run, oracle: bool) -> CommandResult<String> {
    let c = &run.config;
    let oracle = oracle || c.evolve.oracle;
    let profile = run.profile()?;
    let sf = run.structure(&profile)?;
    let psi0 = run.initial_state()?;
    let grid = *psi0.grid();
    let checkpoints = run.checkpoints();
    let dt = run.cn_step(&profile);
    let references =
        if oracle { Some(crank_nicolson_checkpoints(&profile, &psi0, c.t0, &checkpoints, dt)?) } else { None };

    let mut entries = Vec::with_capacity(checkpoints.len());
    for (i, &t) in checkpoints.iter().enumerate() {
        // At t0 the kernel is a delta function and the state is the initial one.
        let (state, ppo, warnings, nu, flag) = if t == c.t0 {
            (psi0.clone(), None, Vec::new(), 0, false)
        } else {
            let app = apply_kernel_onto(&sf, &psi0, t, &grid)?;
            let qk = QuadraticKernel::at(&sf, t)?;
            (app.state, Some(app.min_points_per_oscillation), app.warnings, qk.maslov_index, qk.caustic_flag)
        };
        let file = format!("evolve_{i:03}.csv");
        let mut table = Table::new(&["x", "re_psi", "im_psi", "prob"]);
        for (k, z) in state.values().iter().enumerate() {
            table.push(&[grid.x(k), z.re, z.im, z.norm_sqr()]);
        }
        table.write(&run.path(&file))?;
        let (l2, fid) = match &references {
            Some(refs) => (Some(l2_error(&state, &refs[i])?), Some(fidelity(&state, &refs[i])?)),
            None => (None, None),
        };
        entries.push(EvolveCheckpoint {
            t,
            file,
            norm: state.norm(),
            mean_position: state.mean_position(),
            maslov_index: nu,
            caustic_flag: flag,
            min_points_per_oscillation: ppo,
            warnings,
            l2_error: l2,
            fidelity: fid,
        });
    }
    let summary = EvolveSummary {
        profile: profile.kind().name(),
        t0: c.t0,
        mass: c.mass,
        hbar: c.hbar,
        grid: c.grid,
        initial_state: c.initial_state,
        initial_norm: psi0.norm(),
        oracle: oracle.then_some(OracleInfo { method: "crank_nicolson", dt }),
        checkpoints: entries,
    };
    let path = run.path("evolve_summary.json");
    write_json(&path, &summary)?;
    let mut msg = format!("wrote {} checkpoint files and {}", summary.checkpoints.len(), path.display());
    if oracle {
        let worst = summary.checkpoints.iter().filter_map(|e| e.l2_error).fold(0.0, f64::max);
        msg.push_str(&format!("; largest L2 difference from Crank–Nicolson {worst:.3e}"));
    }
    Ok(msg)
}

/// Names accepted by `verify`.
pub const CHECKS: [&str; 9] =
    ["admissibility", "wronskian", "mode", "basis", "commutator", "action", "mehler", "ermakov", "evolution"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    pub detail: String,
}

fn measured(name: &'static str, value: f64, limit: f64, detail: String) -> CheckResult {
    let status = if value <= limit { Status::Pass } else { Status::Fail };
    CheckResult { name, status, value: Some(value), limit: Some(limit), detail }
}

fn skipped(name: &'static str, detail: impl Into<String>) -> CheckResult {
    CheckResult { name, status: Status::Skip, value: None, limit: None, detail: detail.into() }
}

#[derive(Debug, Serialize)]
struct VerifyReport<'a> {
    profile: &'static str,
    t0: f64,
    t1: f64,
    passed: bool,
    checks: &'a [CheckResult],
}

#[derive(Debug, Serialize)]
struct ErmakovSample {
    t: f64,
    pinney_residual: f64,
    pinney_scale: f64,
    gamma_residual: f64,
    gamma_scale: f64,
}

#[derive(Debug, Serialize)]
struct ErmakovReport {
    scale: f64,
    orientation: f64,
    equivalence_error: f64,
    max_relative_pinney_residual: f64,
    max_relative_gamma_residual: f64,
    samples: Vec<ErmakovSample>,
}

/// Bundles everything the checks share.
struct Verifier<'a> {
    run: &'a Run,
    profile: FrequencyProfile,
    sf: StructureFunctions,
    times: Vec<f64>,
}

impl Verifier<'_> {
    /// Sample times at least `margin` away from caustics and declared breakpoints.
    fn regular_times(&self, margin: f64) -> impl Iterator<Item = f64> + '_ {
        let avoid: Vec<f64> = std::iter::once(self.run.config.t0)
            .chain(self.sf.caustic_times().iter().copied())
            .chain(self.profile.breakpoints().iter().copied())
            .collect();
        self.times.clone().into_iter().filter(move |&t| avoid.iter().all(|&b| (t - b).abs() >= margin))
    }

    fn run_check(&self, name: &'static str) -> CommandResult<CheckResult> {
        let traj = self.sf.trajectory();
        Ok(match name {
            "admissibility" => {
                let r = self.profile.validate_admissibility();
                CheckResult {
                    name,
                    status: if r.admissible { Status::Pass } else { Status::Fail },
                    value: Some(r.max_nonadiabaticity),
                    limit: None,
                    detail: if r.admissible {
                        format!("max |ω̇|/ω² = {:.3}", r.max_nonadiabaticity)
                    } else {
                        format!("violations: {:?}", r.violations)
                    },
                }
            }
            "wronskian" => {
                let c0 = traj.initial_wronskian();
                let mut worst: f64 = 0.0;
                for &t in traj.sample_times() {
                    worst = worst.max((traj.wronskian(t)? - c0).norm() / c0.norm());
                }
                measured(name, worst, 1e-8, format!("relative drift of C over {} samples", traj.sample_times().len()))
            }
            "mode" => {
                let c = &self.run.config;
                let (f0, fdot0) = traj.mode(c.t0)?;
                let oracle = classical_oracle(&self.profile, c.t0, c.t1, f0, fdot0, c.tolerance()?)?;
                let (mut worst, mut peak): (f64, f64) = (0.0, 0.0);
                for &t in &self.times {
                    let f = traj.mode(t)?.0;
                    peak = peak.max(f.norm());
                    worst = worst.max((f - oracle.eval(t)?[0]).norm());
                }
                measured(name, worst / peak, 1e-7, "sup |f − q| / sup |f| against direct integration".into())
            }
            "basis" => {
                let mut worst: f64 = 0.0;
                for &t in &self.times {
                    worst = worst.max((self.sf.basis(t)?.wronskian() - 1.0).abs());
                }
                measured(name, worst, 1e-8, "|u̇v − uv̇ − 1|".into())
            }
            "commutator" => {
                let (m, hbar) = (self.sf.mass(), self.sf.hbar());
                let mut worst: f64 = 0.0;
                for &t in &self.times {
                    let expected = hbar * self.sf.u(t)?.abs() / m;
                    worst = worst.max((self.sf.commutator_coefficient(t)?.norm() - expected).abs());
                }
                measured(name, worst, 1e-8, "| |iħF0/(mC)| − ħ|u|/m |".into())
            }
            "action" => {
                let h = 1e-4;
                let (mut worst, mut count): (f64, usize) = (0.0, 0);
                for t in self.regular_times(0.05) {
                    if self.sf.u(t)?.abs() < 0.05 {
                        continue;
                    }
                    for (q0, p0) in [(0.7, -0.4), (-1.3, 0.9)] {
                        let p0 = p0 * self.sf.mass();
                        let (q, p) = self.sf.classical_trajectory(q0, p0, t)?;
                        let s = |q: f64, q0: f64| self.sf.classical_action(q, q0, t);
                        let ds_dq = (s(q + h, q0)? - s(q - h, q0)?) / (2.0 * h);
                        let ds_dq0 = (s(q, q0 + h)? - s(q, q0 - h)?) / (2.0 * h);
                        worst = worst.max((ds_dq - p).abs()).max((ds_dq0 + p0).abs());
                        count += 1;
                    }
                }
                measured(name, worst, 1e-5, format!("∂S/∂q = p and ∂S/∂q0 = −p0 on {count} paths"))
            }
            "mehler" => {
                let ProfileKind::Constant { omega0 } = *self.profile.kind() else {
                    return Ok(skipped(name, "closed form only exists for a constant frequency"));
                };
                let (c, mut worst, mut count) = (&self.run.config, 0.0f64, 0usize);
                for t in self.regular_times(0.0) {
                    let dt = t - c.t0;
                    if (omega0 * dt).sin().abs() <= 0.05 {
                        continue;
                    }
                    for &q in &[-2.0, -0.5, 0.0, 1.0, 2.5] {
                        for &q0 in &[-1.5, 0.0, 0.75, 2.0] {
                            let k = kernel(&self.sf, q, q0, t)?.value;
                            let m = mehler_kernel(omega0, c.mass, c.hbar, q, q0, dt)?;
                            worst = worst.max((k - m).norm() / m.norm());
                            count += 1;
                        }
                    }
                }
                measured(name, worst, 1e-10, format!("relative error against the Mehler kernel, {count} samples"))
            }
            "ermakov" => {
                let report = self.ermakov_report()?;
                write_json(&self.run.path("ermakov_report.json"), &report)?;
                let worst = (report.equivalence_error / 1e-6)
                    .max(report.max_relative_pinney_residual / 1e-6)
                    .max(report.max_relative_gamma_residual / 1e-5);
                measured(
                    name,
                    worst,
                    1.0,
                    format!(
                        "Pinney {:.2e}·scale, γ {:.2e}·scale, |S·e^(iγ) − c·f| {:.2e}; value is the largest ratio to its limit",
                        report.max_relative_pinney_residual,
                        report.max_relative_gamma_residual,
                        report.equivalence_error
                    ),
                )
            }
            "evolution" => self.evolution_check()?,
            other => unreachable!("unknown check {other}"),
        })
    }

    fn ermakov_report(&self) -> CommandResult<ErmakovReport> {
        let sol = ErmakovSolution::from_mode(self.sf.trajectory())?;
        let (t0, t1) = self.sf.span();
        let margin = 5e-3;
        let mut samples = Vec::new();
        for &t in &self.times {
            if t - t0 < margin || t1 - t < margin || self.profile.breakpoints().iter().any(|&b| (t - b).abs() < 0.01) {
                continue;
            }
            let (pinney_scale, gamma_scale) = sol.residual_scales(t)?;
            samples.push(ErmakovSample {
                t,
                pinney_residual: sol.pinney_residual(t)?,
                pinney_scale,
                gamma_residual: sol.gamma_residual(t)?,
                gamma_scale,
            });
        }
        let max_rel = |f: fn(&ErmakovSample) -> f64| samples.iter().map(f).fold(0.0, f64::max);
        Ok(ErmakovReport {
            scale: sol.scale(),
            orientation: sol.orientation(),
            equivalence_error: sol.equivalence_error()?,
            max_relative_pinney_residual: max_rel(|s| s.pinney_residual / s.pinney_scale),
            max_relative_gamma_residual: max_rel(|s| s.gamma_residual / s.gamma_scale),
            samples,
        })
    }

    fn evolution_check(&self) -> CommandResult<CheckResult> {
        let name = "evolution";
        let run = self.run;
        let times: Vec<f64> = run
            .checkpoints()
            .into_iter()
            .filter(|&t| t > run.config.t0 && self.sf.caustic_times().iter().all(|&z| (t - z).abs() > 0.05))
            .collect();
        if times.is_empty() {
            return Ok(skipped(name, "no checkpoint away from t0 and the caustics"));
        }
        let psi0 = run.initial_state()?;
        let dt = run.cn_step(&self.profile);
        let refs = crank_nicolson_checkpoints(&self.profile, &psi0, run.config.t0, &times, dt)?;
        let (mut worst_l2, mut worst_fid): (f64, f64) = (0.0, 1.0);
        let mut under_resolved = Vec::new();
        for (&t, reference) in times.iter().zip(&refs) {
            let app = apply_kernel_onto(&self.sf, &psi0, t, psi0.grid())?;
            worst_l2 = worst_l2.max(l2_error(&app.state, reference)?);
            worst_fid = worst_fid.min(fidelity(&app.state, reference)?);
            if app.min_points_per_oscillation < MIN_POINTS_PER_OSCILLATION {
                under_resolved.push(format!("t = {t} ({:.2})", app.min_points_per_oscillation));
            }
        }
        let mut detail =
            format!("kernel against Crank–Nicolson at {} checkpoints, lowest fidelity {worst_fid:.7}", times.len());
        if !under_resolved.is_empty() {
            detail.push_str(&format!(
                "; grid under-resolves the kernel phase at {} points per oscillation",
                under_resolved.join(", ")
            ));
        }
        let mut r = measured(name, worst_l2, 1e-3, detail);
        if worst_fid < 0.999 {
            r.status = Status::Fail;
        }
        Ok(r)
    }
}

/// Runs the named check, or all of them when `name` is `None`.
///
/// Writes `verify_report.json`; the `ermakov` check also writes `ermakov_report.json`.
pub fn verify_cmd(run: &Run, name: Option<&str>) -> CommandResult<Vec<CheckResult>> {
    let selected: Vec<&'static str> = match name {
        None => CHECKS.to_vec(),
        Some(n) => match CHECKS.iter().find(|&&c| c == n) {
            Some(&c) => vec![c],
            None => {
                return Err(ConfigError::Invalid {
                    field: "check".into(),
                    message: format!("unknown check {n:?}; available: {}", CHECKS.join(", ")),
                }
                .into())
            }
        },
    };
    let profile = run.profile()?;
    let sf = run.structure(&profile)?;
    let verifier = Verifier { run, profile, times: dense_times(&sf), sf };
    let mut results = Vec::with_capacity(selected.len());
    for check in selected {
        results.push(verifier.run_check(check)?);
    }
    let passed = results.iter().all(|r| r.status != Status::Fail);
    write_json(
        &run.path("verify_report.json"),
        &VerifyReport {
            profile: verifier.profile.kind().name(),
            t0: run.config.t0,
            t1: run.config.t1,
            passed,
            checks: &results,
        },
    )?;
    Ok(results)
}

fn dense_times(sf: &StructureFunctions) -> Vec<f64> {
    const N: usize = 400;
    let (a, b) = sf.span();
    (0..=N).map(|k| if k == N { b } else { a + (b - a) * k as f64 / N as f64 }).collect()
}

/// Colour only for terminals, and never when `NO_COLOR` is set.
pub fn use_color() -> bool {
    std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

pub fn format_check(r: &CheckResult, color: bool) -> String {
    let (label, code) = match r.status {
        Status::Pass => ("PASS", "32"),
        Status::Fail => ("FAIL", "31"),
        Status::Skip => ("SKIP", "33"),
    };
    let label = if color { format!("\x1b[{code}m{label}\x1b[0m") } else { label.to_string() };
    match (r.value, r.limit) {
        (Some(v), Some(l)) => format!("{label} {:<13} {v:.3e} (limit {l:.0e}): {}", r.name, r.detail),
        _ => format!("{label} {:<13} {}", r.name, r.detail),
    }
}

/// One line per bundled profile with its law and parameters.
pub fn profiles_listing() -> String {
    let (a, b) = catalog::DOMAIN;
    let mut lines = vec![format!("bundled profiles on [{a}, {b}]:")];
    for e in catalog::bundled() {
        lines.push(format!(
            "{:<15} {:<22} {}  ({})",
            e.name,
            e.profile.kind().name(),
            parameters(&e.profile),
            e.summary
        ));
    }
    lines.join("\n")
}

fn parameters(p: &FrequencyProfile) -> String {
    match p.kind() {
        ProfileKind::Constant { omega0 } => format!("omega0={omega0}"),
        ProfileKind::LinearRamp { omega0, slope } => format!("omega0={omega0} slope={slope}"),
        ProfileKind::Sinusoidal { omega0, depth, rate } => format!("omega0={omega0} depth={depth} rate={rate}"),
        ProfileKind::TanhQuench { omega_initial, omega_final, center, width } => {
            format!("omega_initial={omega_initial} omega_final={omega_final} center={center} width={width}")
        }
        ProfileKind::GaussianPulse { omega0, amplitude, center, width } => {
            format!("omega0={omega0} amplitude={amplitude} center={center} width={width}")
        }
        ProfileKind::Tabulated { times, .. } => {
            format!("knots={} breakpoints={:?}", times.len(), p.breakpoints())
        }
    }
}

/// Directory of a config file, for resolving paths inside it.
pub fn config_dir(path: &Path) -> PathBuf {
    path.parent().filter(|p| !p.as_os_str().is_empty()).map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))
}
