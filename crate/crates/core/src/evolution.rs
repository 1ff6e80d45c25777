//! Wavefunctions on uniform grids, kernel quadrature and a Crank–Nicolson reference solver.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::profiles::{FrequencyProfile, Side};
use crate::propagator::{KernelOptions, QuadraticKernel};
use crate::structure::StructureFunctions;

type C64 = Complex64;

/// Uniform grid `x_i = x_min + i·(x_max − x_min)/(n − 1)`.
///
/// Powers of two with `n ≥ 16` are the intended sizes; others are accepted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidArgument(format!(
                "grid bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n < 4 {
            return Err(Error::InvalidArgument(format!("grid needs at least 4 points, got {n}")));
        }
        Ok(GridSpec { x_min, x_max, n })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionGrid {
    grid: GridSpec,
    values: Vec<C64>,
    mass: f64,
    hbar: f64,
}

impl WavefunctionGrid {
    pub fn new(grid: GridSpec, values: Vec<C64>, mass: f64, hbar: f64) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidArgument(format!("{} values for a grid of {} points", values.len(), grid.n)));
        }
        if !(mass > 0.0 && hbar > 0.0) {
            return Err(Error::InvalidArgument("mass and hbar must be positive".into()));
        }
        Ok(WavefunctionGrid { grid, values, mass, hbar })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn probability(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Trapezoidal `sqrt(∫|ψ|²)`.
    pub fn norm(&self) -> f64 {
        trapezoid(&self.grid, |i| self.values[i].norm_sqr()).sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.values.iter_mut().for_each(|z| *z /= n);
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_grid(other)?;
        Ok(trapezoid_c(&self.grid, |i| self.values[i].conj() * other.values[i]))
    }

    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        Ok(trapezoid(&self.grid, |i| (self.values[i] - other.values[i]).norm_sqr()).sqrt())
    }

    /// `⟨x⟩` of the normalized state.
    pub fn mean_position(&self) -> f64 {
        let num = trapezoid(&self.grid, |i| self.grid.x(i) * self.values[i].norm_sqr());
        num / self.norm().powi(2)
    }

    /// Larger of `|ψ|` at the two end points.
    pub fn edge_amplitude(&self) -> f64 {
        self.values[0].norm().max(self.values[self.grid.n - 1].norm())
    }

    pub fn max_amplitude(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

fn trapezoid(grid: &GridSpec, f: impl Fn(usize) -> f64) -> f64 {
    let n = grid.n;
    let inner: f64 = (1..n - 1).map(&f).sum();
    grid.dx() * (inner + 0.5 * (f(0) + f(n - 1)))
}

fn trapezoid_c(grid: &GridSpec, f: impl Fn(usize) -> C64) -> C64 {
    let n = grid.n;
    let inner: C64 = (1..n - 1).map(&f).sum();
    (inner + (f(0) + f(n - 1)) * 0.5) * grid.dx()
}

/// Trapezoidal `‖a − b‖`.
pub fn l2_error(a: &WavefunctionGrid, b: &WavefunctionGrid) -> Result<f64> {
    a.l2_distance(b)
}

/// `|⟨a|b⟩|² / (‖a‖²‖b‖²)`.
pub fn fidelity(a: &WavefunctionGrid, b: &WavefunctionGrid) -> Result<f64> {
    let overlap = a.inner(b)?.norm_sqr();
    let denom = (a.norm() * b.norm()).powi(2);
    if denom == 0.0 {
        return Err(Error::InvalidArgument("fidelity of a zero state".into()));
    }
    Ok((overlap / denom).min(1.0))
}

/// Normalized `exp(−(x−x̄)²/(2σ²) + i·p̄x/ħ)`; requires `6σ` of grid on both sides of `x̄`.
pub fn gaussian_state(
    grid: &GridSpec,
    center: f64,
    momentum: f64,
    sigma: f64,
    mass: f64,
    hbar: f64,
) -> Result<WavefunctionGrid> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("width must be positive, got {sigma}")));
    }
    if center - 6.0 * sigma < grid.x_min || center + 6.0 * sigma > grid.x_max {
        return Err(Error::InvalidArgument(format!(
            "Gaussian at {center} with width {sigma} needs [{}, {}] inside the grid [{}, {}]",
            center - 6.0 * sigma,
            center + 6.0 * sigma,
            grid.x_min,
            grid.x_max
        )));
    }
    let values = (0..grid.n)
        .map(|i| {
            let x = grid.x(i);
            let d = (x - center) / sigma;
            C64::from_polar((-0.5 * d * d).exp(), momentum * x / hbar)
        })
        .collect();
    let mut psi = WavefunctionGrid::new(*grid, values, mass, hbar)?;
    psi.normalize();
    Ok(psi)
}

/// Result of a kernel quadrature with its sampling diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelApplication {
    pub state: WavefunctionGrid,
    /// Smallest number of input points per local phase oscillation of the integrand.
    pub min_points_per_oscillation: f64,
    pub warnings: Vec<String>,
}

/// Recommended lower bound on points per oscillation.
pub const MIN_POINTS_PER_OSCILLATION: f64 = 8.0;

/// `ψ(q, t) = ∫K(q,t; q0,t0)ψ0(q0) dq0` on the input grid.
pub fn apply_kernel(sf: &StructureFunctions, psi0: &WavefunctionGrid, t: f64) -> Result<WavefunctionGrid> {
    Ok(apply_kernel_onto(sf, psi0, t, psi0.grid())?.state)
}

/// Same as [`apply_kernel`] but sampling the output on `out`.
pub fn apply_kernel_onto(
    sf: &StructureFunctions,
    psi0: &WavefunctionGrid,
    t: f64,
    out: &GridSpec,
) -> Result<KernelApplication> {
    apply_kernel_with(sf, psi0, t, out, KernelOptions::default())
}

#[doc(hidden)]
pub fn apply_kernel_with(
    sf: &StructureFunctions,
    psi0: &WavefunctionGrid,
    t: f64,
    out: &GridSpec,
    opts: KernelOptions,
) -> Result<KernelApplication> {
    if psi0.mass() != sf.mass() || psi0.hbar() != sf.hbar() {
        return Err(Error::InvalidArgument("state and structure functions use different mass or hbar".into()));
    }
    let peak = psi0.max_amplitude();
    if peak == 0.0 {
        return Err(Error::InvalidArgument("initial state is identically zero".into()));
    }
    let limit = 1e-12 * peak;
    if psi0.edge_amplitude() > limit {
        return Err(Error::EdgeAmplitude { amplitude: psi0.edge_amplitude(), limit });
    }
    let qk = QuadraticKernel::with_options(sf, t, opts)?;
    let grid = psi0.grid();
    let h = grid.dx();
    let weights = quadrature_weights(grid.n, h);

    // Everything independent of the output point.
    let g: Vec<C64> = (0..grid.n)
        .map(|j| {
            let q0 = grid.x(j);
            psi0.values()[j] * weights[j] * C64::cis(qk.beta * q0 * q0)
        })
        .collect();

    let values: Vec<C64> = (0..out.n)
        .into_par_iter()
        .map(|i| {
            let q = out.x(i);
            let k = qk.gamma * q;
            let step = C64::cis(-k * h);
            let mut acc = C64::new(0.0, 0.0);
            let mut z = C64::new(1.0, 0.0);
            for (j, gj) in g.iter().enumerate() {
                if j % 1024 == 0 {
                    z = C64::cis(-k * grid.x(j));
                }
                acc += gj * z;
                z *= step;
            }
            qk.prefactor * C64::cis(qk.alpha * q * q) * acc
        })
        .collect();

    // The phase gradient in q0 is 2βq0 − γq; only the populated part of the input matters.
    let support: Vec<usize> = (0..grid.n).filter(|&j| psi0.values()[j].norm() > 1e-10 * peak).collect();
    let (lo, hi) = (grid.x(support[0]), grid.x(*support.last().unwrap()));
    let min_ppo = (0..out.n)
        .map(|i| {
            let q = out.x(i);
            let grad = (2.0 * qk.beta * lo - qk.gamma * q).abs().max((2.0 * qk.beta * hi - qk.gamma * q).abs());
            2.0 * PI / (h * grad)
        })
        .fold(f64::INFINITY, f64::min);

    let state = WavefunctionGrid::new(*out, values, psi0.mass(), psi0.hbar())?;
    let mut warnings = Vec::new();
    if min_ppo < MIN_POINTS_PER_OSCILLATION {
        warnings.push(format!(
            "kernel integrand sampled at {min_ppo:.2} points per oscillation (want at least {MIN_POINTS_PER_OSCILLATION})"
        ));
    }
    let deviation = (state.norm() - psi0.norm()).abs() / psi0.norm();
    if deviation > 1e-3 {
        warnings.push(format!(
            "output norm deviates from input by {deviation:.3e}; the output grid may be aliased or too narrow"
        ));
    }
    for w in &warnings {
        log::warn!("t = {t}: {w}");
    }
    Ok(KernelApplication { state, min_points_per_oscillation: min_ppo, warnings })
}

/// Composite Simpson weights, closing with a 3/8 panel when the interval count is odd.
fn quadrature_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    let intervals = n - 1;
    let simpson_end = if intervals.is_multiple_of(2) { n - 1 } else { n - 4 };
    for k in (0..simpson_end).step_by(2) {
        w[k] += h / 3.0;
        w[k + 1] += 4.0 * h / 3.0;
        w[k + 2] += h / 3.0;
    }
    if intervals % 2 == 1 {
        let s = n - 4;
        for (off, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
            w[s + off] += 3.0 * h / 8.0 * c;
        }
    }
    w
}

/// Largest allowed `dt·ω_max` for the Crank–Nicolson oracle.
pub const CN_MAX_OMEGA_DT: f64 = 0.01;

/// Evolves `psi0` from `t0` to `t1` under `H = p²/2m + mω²(t)x²/2`.
///
/// Time stepping is Crank–Nicolson with `ω` sampled at half steps. The spatial
/// operator uses the fourth-order compact (Numerov) Laplacian, which keeps the
/// linear systems tridiagonal. Boundaries are Dirichlet; the state must be
/// negligible at the edges (relative `1e-8`) at both ends of the run. The step
/// is shrunk so that a whole number of steps fits the interval.
pub fn crank_nicolson_evolve(
    profile: &FrequencyProfile,
    psi0: &WavefunctionGrid,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<WavefunctionGrid> {
    let mut out = crank_nicolson_checkpoints(profile, psi0, t0, &[t1], dt)?;
    Ok(out.pop().unwrap())
}

/// Like [`crank_nicolson_evolve`], returning the state at each of the increasing `checkpoints`.
pub fn crank_nicolson_checkpoints(
    profile: &FrequencyProfile,
    psi0: &WavefunctionGrid,
    t0: f64,
    checkpoints: &[f64],
    dt: f64,
) -> Result<Vec<WavefunctionGrid>> {
    let omega_max = profile.omega_max();
    if !(dt > 0.0) || dt * omega_max > CN_MAX_OMEGA_DT * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "time step {dt} does not resolve ω_max = {omega_max}; need dt ≤ {}",
            CN_MAX_OMEGA_DT / omega_max
        )));
    }
    let mut prev = t0;
    for &c in checkpoints {
        if c < prev {
            return Err(Error::InvalidArgument(format!(
                "checkpoints must increase from t0 = {t0}, got {c} after {prev}"
            )));
        }
        prev = c;
    }
    check_edges(psi0)?;
    profile.omega(t0)?;
    profile.omega(prev)?;

    let mut stepper = CnStepper::new(psi0);
    let mut t = t0;
    let mut out = Vec::with_capacity(checkpoints.len());
    for &c in checkpoints {
        let span = c - t;
        let steps = (span / dt).ceil() as usize;
        let h = if steps > 0 { span / steps as f64 } else { 0.0 };
        for k in 0..steps {
            let tm = t + (k as f64 + 0.5) * h;
            stepper.step(profile.omega_unchecked(tm, Side::Both), h);
        }
        t = c;
        let mut values = Vec::with_capacity(psi0.grid().n);
        values.push(C64::new(0.0, 0.0));
        values.extend_from_slice(&stepper.psi);
        values.push(C64::new(0.0, 0.0));
        let psi = WavefunctionGrid::new(*psi0.grid(), values, psi0.mass(), psi0.hbar())?;
        check_edges(&psi)?;
        out.push(psi);
    }
    Ok(out)
}

fn check_edges(psi: &WavefunctionGrid) -> Result<()> {
    let limit = 1e-8 * psi.max_amplitude();
    let edge = psi.edge_amplitude();
    if edge > limit {
        return Err(Error::EdgeAmplitude { amplitude: edge, limit });
    }
    Ok(())
}

struct CnStepper {
    psi: Vec<C64>,
    x2: Vec<f64>,
    kinetic: f64,
    mass: f64,
    hbar: f64,
    rhs: Vec<C64>,
    scratch: Vec<C64>,
}

impl CnStepper {
    fn new(psi0: &WavefunctionGrid) -> Self {
        let g = psi0.grid();
        let dx = g.dx();
        // Interior unknowns only; the end points stay pinned at zero.
        let psi: Vec<C64> = psi0.values()[1..g.n - 1].to_vec();
        let x2 = (1..g.n - 1).map(|i| g.x(i).powi(2)).collect();
        let n = psi.len();
        CnStepper {
            psi,
            x2,
            kinetic: psi0.hbar() * psi0.hbar() / (2.0 * psi0.mass() * dx * dx),
            mass: psi0.mass(),
            hbar: psi0.hbar(),
            rhs: vec![C64::new(0.0, 0.0); n],
            scratch: vec![C64::new(0.0, 0.0); n],
        }
    }

    /// One step of `(M + iδK)ψ' = (M − iδK)ψ` with `K = −ħ²D/2m + M·V`, `δ = h/2ħ`.
    fn step(&mut self, omega: f64, h: f64) {
        let n = self.psi.len();
        let delta = C64::new(0.0, h / (2.0 * self.hbar));
        let half_k = 0.5 * self.mass * omega * omega;
        let v = |i: usize| half_k * self.x2[i];
        // Row i of K: off-diagonal entries sit at columns i±1.
        let k_diag = |i: usize| 2.0 * self.kinetic + 10.0 / 12.0 * v(i);
        let k_off = |j: usize| -self.kinetic + v(j) / 12.0;
        let (m_diag, m_off) = (10.0 / 12.0, 1.0 / 12.0);

        for i in 0..n {
            let mut r = (m_diag - delta * k_diag(i)) * self.psi[i];
            if i > 0 {
                r += (m_off - delta * k_off(i - 1)) * self.psi[i - 1];
            }
            if i + 1 < n {
                r += (m_off - delta * k_off(i + 1)) * self.psi[i + 1];
            }
            self.rhs[i] = r;
        }

        // Thomas algorithm; scratch holds the modified super-diagonal.
        let lower = |i: usize| m_off + delta * k_off(i - 1);
        let upper = |i: usize| m_off + delta * k_off(i + 1);
        let diag = |i: usize| m_diag + delta * k_diag(i);
        let mut denom = diag(0);
        self.scratch[0] = if n > 1 { upper(0) / denom } else { C64::new(0.0, 0.0) };
        self.psi[0] = self.rhs[0] / denom;
        for i in 1..n {
            let l = lower(i);
            denom = diag(i) - l * self.scratch[i - 1];
            if i + 1 < n {
                self.scratch[i] = upper(i) / denom;
            }
            self.psi[i] = (self.rhs[i] - l * self.psi[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            let next = self.psi[i + 1];
            self.psi[i] -= self.scratch[i] * next;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::{solve_amplitude, InitialAmplitude};
    use crate::integrator::Tolerance;

    fn sf_of(p: &FrequencyProfile, t1: f64) -> StructureFunctions {
        let traj = solve_amplitude(p, 0.0, t1, InitialAmplitude::default(), Tolerance::default()).unwrap();
        StructureFunctions::build(traj, 1.0, 1.0).unwrap()
    }

    fn full_state(grid: &GridSpec, values: Vec<C64>, psi: &WavefunctionGrid) -> WavefunctionGrid {
        WavefunctionGrid::new(*grid, values, psi.mass(), psi.hbar()).unwrap()
    }

    #[test]
    fn gaussian_is_normalized_and_centered() {
        let g = GridSpec::new(-10.0, 10.0, 512).unwrap();
        let psi = gaussian_state(&g, 0.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        assert!(psi.mean_position().abs() < 1e-10);
        let shifted = gaussian_state(&g, 1.5, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert!((shifted.mean_position() - 1.5).abs() < 1e-10);
        assert!(gaussian_state(&g, 5.0, 0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn identical_and_negated_metrics() {
        let g = GridSpec::new(-10.0, 10.0, 256).unwrap();
        let psi = gaussian_state(&g, 0.5, 1.0, 1.2, 1.0, 1.0).unwrap();
        assert_eq!(l2_error(&psi, &psi).unwrap(), 0.0);
        assert!((fidelity(&psi, &psi).unwrap() - 1.0).abs() < 1e-14);
        let neg = full_state(&g, psi.values().iter().map(|z| -z).collect(), &psi);
        assert!((l2_error(&psi, &neg).unwrap() - 2.0 * psi.norm()).abs() < 1e-12);
        assert!((fidelity(&psi, &neg).unwrap() - 1.0).abs() < 1e-14);
        let other = gaussian_state(&GridSpec::new(-10.0, 10.0, 128).unwrap(), 0.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(l2_error(&psi, &other).unwrap_err(), Error::GridMismatch);
    }

    #[test]
    fn quadrature_weights_integrate_cubics() {
        for n in [5, 6, 7, 8, 2048, 2049] {
            let w = quadrature_weights(n, 1.0 / (n - 1) as f64);
            let integral: f64 = w
                .iter()
                .enumerate()
                .map(|(i, wi)| {
                    let x = i as f64 / (n - 1) as f64;
                    wi * (x * x * x - x + 2.0)
                })
                .sum();
            assert!((integral - 1.75).abs() < 1e-13, "n = {n}: {integral}");
        }
    }

    #[test]
    fn ground_state_modulus_is_stationary_under_kernel() {
        let p = FrequencyProfile::constant(1.0, 0.0, 3.0).unwrap();
        let sf = sf_of(&p, 3.0);
        let g = GridSpec::new(-10.0, 10.0, 1024).unwrap();
        let psi0 = gaussian_state(&g, 0.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        for t in [0.7, 2.3] {
            let psi = apply_kernel(&sf, &psi0, t).unwrap();
            let a: Vec<C64> = psi.values().iter().map(|z| C64::new(z.norm(), 0.0)).collect();
            let b: Vec<C64> = psi0.values().iter().map(|z| C64::new(z.norm(), 0.0)).collect();
            let d = l2_error(&full_state(&g, a, &psi0), &full_state(&g, b, &psi0)).unwrap();
            assert!(d < 1e-6, "t = {t}: {d}");
        }
    }

    #[test]
    fn coherent_state_follows_classical_path() {
        let p = FrequencyProfile::constant(1.0, 0.0, 3.0).unwrap();
        let sf = sf_of(&p, 3.0);
        let g = GridSpec::new(-10.0, 10.0, 1024).unwrap();
        let psi0 = gaussian_state(&g, 1.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        for t in [0.5, 1.5, 2.5] {
            let psi = apply_kernel(&sf, &psi0, t).unwrap();
            assert!((psi.mean_position() - t.cos()).abs() < 1e-5);
            assert!((psi.norm() - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn edge_amplitude_is_rejected() {
        let p = FrequencyProfile::constant(1.0, 0.0, 1.0).unwrap();
        let sf = sf_of(&p, 1.0);
        let g = GridSpec::new(-3.0, 3.0, 128).unwrap();
        let values = (0..g.n).map(|i| C64::new((-0.5 * g.x(i).powi(2)).exp(), 0.0)).collect();
        let psi = WavefunctionGrid::new(g, values, 1.0, 1.0).unwrap();
        assert!(matches!(apply_kernel(&sf, &psi, 0.5), Err(Error::EdgeAmplitude { .. })));
        assert!(matches!(crank_nicolson_evolve(&p, &psi, 0.0, 0.1, 0.01), Err(Error::EdgeAmplitude { .. })));
    }

    #[test]
    fn coarse_sampling_is_reported() {
        let p = FrequencyProfile::constant(1.0, 0.0, 1.0).unwrap();
        let sf = sf_of(&p, 1.0);
        let g = GridSpec::new(-10.0, 10.0, 256).unwrap();
        let psi0 = gaussian_state(&g, 0.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        let out = apply_kernel_onto(&sf, &psi0, 0.01, &g).unwrap();
        assert!(out.min_points_per_oscillation < MIN_POINTS_PER_OSCILLATION);
        assert!(!out.warnings.is_empty());
    }

    #[test]
    fn cn_conserves_norm() {
        let p = FrequencyProfile::sinusoidal(1.0, 0.5, 3.0, 0.0, 2.0).unwrap();
        let g = GridSpec::new(-10.0, 10.0, 512).unwrap();
        let psi0 = gaussian_state(&g, 0.5, 0.3, 0.8, 1.0, 1.0).unwrap();
        let psi = crank_nicolson_evolve(&p, &psi0, 0.0, 1.0, 0.001).unwrap();
        assert!((psi.norm() - psi0.norm()).abs() <= 1e-10);
    }

    #[test]
    fn cn_ground_state_is_stationary() {
        let p = FrequencyProfile::constant(1.0, 0.0, 7.0).unwrap();
        let g = GridSpec::new(-10.0, 10.0, 512).unwrap();
        let psi0 = gaussian_state(&g, 0.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        let psi = crank_nicolson_evolve(&p, &psi0, 0.0, 2.0 * PI, 0.005).unwrap();
        let a: Vec<C64> = psi.values().iter().map(|z| C64::new(z.norm(), 0.0)).collect();
        let b: Vec<C64> = psi0.values().iter().map(|z| C64::new(z.norm(), 0.0)).collect();
        let d = l2_error(&full_state(&g, a, &psi0), &full_state(&g, b, &psi0)).unwrap();
        assert!(d < 1e-6, "{d}");
    }

    #[test]
    fn cn_coherent_state_tracks_classical_path() {
        let p = FrequencyProfile::linear_ramp(1.0, 0.3, 0.0, 3.0).unwrap();
        let sf = sf_of(&p, 3.0);
        let g = GridSpec::new(-10.0, 10.0, 1024).unwrap();
        let psi0 = gaussian_state(&g, 1.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        let times = [1.0, 2.0, 3.0];
        let dt = 0.0025 / p.omega_max();
        let states = crank_nicolson_checkpoints(&p, &psi0, 0.0, &times, dt).unwrap();
        for (t, psi) in times.iter().zip(&states) {
            let (q, _) = sf.classical_trajectory(1.0, 0.0, *t).unwrap();
            assert!((psi.mean_position() - q).abs() < 1e-4, "t = {t}: {} vs {q}", psi.mean_position());
        }
    }

    #[test]
    fn cn_rejects_coarse_step() {
        let p = FrequencyProfile::constant(2.0, 0.0, 1.0).unwrap();
        let g = GridSpec::new(-10.0, 10.0, 128).unwrap();
        let psi0 = gaussian_state(&g, 0.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert!(crank_nicolson_evolve(&p, &psi0, 0.0, 1.0, 0.01).is_err());
    }

    #[test]
    fn kernel_agrees_with_cn_for_constant_frequency() {
        let p = FrequencyProfile::constant(1.0, 0.0, 2.0).unwrap();
        let sf = sf_of(&p, 2.0);
        let g = GridSpec::new(-12.0, 12.0, 1024).unwrap();
        let psi0 = gaussian_state(&g, 0.5, 0.0, 0.7, 1.0, 1.0).unwrap();
        let a = apply_kernel(&sf, &psi0, 1.5).unwrap();
        let b = crank_nicolson_evolve(&p, &psi0, 0.0, 1.5, 0.002).unwrap();
        assert!(l2_error(&a, &b).unwrap() < 1e-3);
        assert!(fidelity(&a, &b).unwrap() > 0.999);
    }
}
