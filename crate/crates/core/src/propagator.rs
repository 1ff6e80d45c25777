//! The transformation function `⟨q,t|q0,t0⟩` for a time-dependent frequency.
//!
//! At a fixed non-caustic time the kernel is a Gaussian chirp in `(q, q0)`:
//!
//! ```text
//! K = sqrt(m / (2πħ|u|)) · e^{−iπ/4} · e^{−iπν/2} · exp(iS/ħ)
//! S = (m / 2u)·(u̇q² + v·q0² − 2q·q0)
//! ```
//!
//! where `ν` counts the zeros of `u` on `(t0, t]`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{apply_kernel_onto, gaussian_state, GridSpec};
use crate::structure::{action_from_basis, StructureFunctions, DEFAULT_CAUSTIC_EPSILON};

type C64 = Complex64;

/// A kernel value with its phase bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSample {
    pub value: C64,
    /// Classical action `S(q, q0, t)`.
    pub action: f64,
    /// `sqrt(m / (2πħ|u|))`, equal to `|value|`.
    pub prefactor_modulus: f64,
    pub maslov_index: u32,
    /// Set when `|u|` is within three decades of the caustic threshold.
    pub caustic_flag: bool,
}

#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelOptions {
    /// When false, the prefactor is the principal root of `m/(2πiħu)` with
    /// signed `u` and no crossing phase. Exists for negative controls.
    pub maslov_correction: bool,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions { maslov_correction: true }
    }
}

/// The kernel at a fixed time: `P·exp(i(α·q² + β·q0² − γ·q·q0))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticKernel {
    pub prefactor: C64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub u: f64,
    pub maslov_index: u32,
    pub caustic_flag: bool,
}

impl QuadraticKernel {
    pub fn at(sf: &StructureFunctions, t: f64) -> Result<Self> {
        Self::with_options(sf, t, KernelOptions::default())
    }

    #[doc(hidden)]
    pub fn with_options(sf: &StructureFunctions, t: f64, opts: KernelOptions) -> Result<Self> {
        let b = sf.noncaustic_basis(t)?;
        let nu = count_zeros(sf, t);
        let (m, hbar) = (sf.mass(), sf.hbar());
        let modulus = (m / (2.0 * PI * hbar * b.u.abs())).sqrt();
        let prefactor = if opts.maslov_correction {
            C64::from_polar(modulus, -FRAC_PI_4 - FRAC_PI_2 * nu as f64)
        } else {
            (C64::new(m, 0.0) / (C64::i() * 2.0 * PI * hbar * b.u)).sqrt()
        };
        let scale = m / (hbar * b.u);
        Ok(QuadraticKernel {
            prefactor,
            alpha: 0.5 * scale * b.udot,
            beta: 0.5 * scale * b.v,
            gamma: scale,
            u: b.u,
            maslov_index: nu,
            caustic_flag: b.u.abs() < 1e3 * sf.caustic_epsilon(),
        })
    }

    /// `S/ħ` at `(q, q0)`.
    pub fn phase(&self, q: f64, q0: f64) -> f64 {
        self.alpha * q * q + self.beta * q0 * q0 - self.gamma * q * q0
    }

    pub fn eval(&self, q: f64, q0: f64) -> C64 {
        self.prefactor * C64::cis(self.phase(q, q0))
    }
}

pub fn kernel(sf: &StructureFunctions, q: f64, q0: f64, t: f64) -> Result<PropagatorSample> {
    kernel_with(sf, q, q0, t, KernelOptions::default())
}

#[doc(hidden)]
pub fn kernel_with(sf: &StructureFunctions, q: f64, q0: f64, t: f64, opts: KernelOptions) -> Result<PropagatorSample> {
    let b = sf.noncaustic_basis(t)?;
    let qk = QuadraticKernel::with_options(sf, t, opts)?;
    Ok(PropagatorSample {
        value: qk.eval(q, q0),
        action: action_from_basis(&b, sf.mass(), q, q0),
        prefactor_modulus: qk.prefactor.norm(),
        maslov_index: qk.maslov_index,
        caustic_flag: qk.caustic_flag,
    })
}

/// Number of zeros of `u` on `(t0, t]`.
pub fn maslov_index(sf: &StructureFunctions, t: f64) -> Result<u32> {
    sf.noncaustic_basis(t)?;
    Ok(count_zeros(sf, t))
}

fn count_zeros(sf: &StructureFunctions, t: f64) -> u32 {
    sf.caustic_times().iter().take_while(|&&z| z <= t).count() as u32
}

/// Closed-form kernel of a constant-frequency oscillator over an interval `dt`.
pub fn mehler_kernel(omega0: f64, mass: f64, hbar: f64, q: f64, q0: f64, dt: f64) -> Result<C64> {
    if !(omega0 > 0.0 && mass > 0.0 && hbar > 0.0) {
        return Err(Error::InvalidArgument("frequency, mass and hbar must be positive".into()));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("interval must be positive, got {dt}")));
    }
    let (s, c) = (omega0 * dt).sin_cos();
    if (s / omega0).abs() <= DEFAULT_CAUSTIC_EPSILON {
        let k = (omega0 * dt / PI).round();
        return Err(Error::Caustic { t: dt, u: s / omega0, nearest: k * PI / omega0 });
    }
    let nu = (omega0 * dt / PI).floor();
    let modulus = (mass * omega0 / (2.0 * PI * hbar * s.abs())).sqrt();
    let exponent = mass * omega0 / (2.0 * hbar * s) * ((q * q + q0 * q0) * c - 2.0 * q * q0);
    Ok(C64::from_polar(modulus, -FRAC_PI_4 - FRAC_PI_2 * nu + exponent))
}

/// Largest distance accepted for the smallest interval of a delta-family check.
pub const DELTA_FAMILY_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaFamilySpec {
    /// Strictly decreasing positive intervals after `t0`.
    pub dts: Vec<f64>,
    pub sigma: f64,
    pub center: f64,
    pub momentum: f64,
}

impl DeltaFamilySpec {
    pub fn new(dts: Vec<f64>, sigma: f64) -> Self {
        DeltaFamilySpec { dts, sigma, center: 0.0, momentum: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaFamilyStep {
    pub dt: f64,
    /// `min_φ ‖e^{iφ}ψ(t0+dt) − ψ0‖`.
    pub distance: f64,
    /// `‖ψ(t0+dt) − ψ0‖`, which also contains the dynamical phase.
    pub raw_distance: f64,
    pub norm: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaFamilyReport {
    pub steps: Vec<DeltaFamilyStep>,
    pub monotone: bool,
    pub final_distance: f64,
    pub passed: bool,
}

/// Applies the kernel over each interval to a Gaussian and measures how close
/// the result stays to the initial state.
pub fn delta_family_check(sf: &StructureFunctions, spec: &DeltaFamilySpec) -> Result<DeltaFamilyReport> {
    if spec.dts.is_empty() {
        return Err(Error::InvalidArgument("no intervals given".into()));
    }
    if !(spec.sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("width must be positive, got {}", spec.sigma)));
    }
    if spec.dts.iter().any(|&d| !(d > 0.0)) || spec.dts.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("intervals must be positive and strictly decreasing".into()));
    }
    let (m, hbar) = (sf.mass(), sf.hbar());
    let t0 = sf.span().0;
    let half = 8.0 * spec.sigma;
    let (lo, hi) = (spec.center - half, spec.center + half);
    let out_grid = GridSpec::new(lo, hi, 257)?;
    let target = gaussian_state(&out_grid, spec.center, spec.momentum, spec.sigma, m, hbar)?;

    let mut steps = Vec::with_capacity(spec.dts.len());
    for &dt in &spec.dts {
        let qk = QuadraticKernel::at(sf, t0 + dt)?;
        // Steepest phase gradient in q0 over the box, plus the state's own.
        let k_max = [lo, hi]
            .iter()
            .flat_map(|&q| [lo, hi].map(|q0| (2.0 * qk.beta * q0 - qk.gamma * q).abs()))
            .fold(0.0, f64::max)
            + (spec.momentum / hbar).abs();
        let h = 2.0 * PI / (8.0 * k_max);
        let n = (((hi - lo) / h).ceil() as usize + 1).max(257);
        let in_grid = GridSpec::new(lo, hi, n)?;
        let psi0 = gaussian_state(&in_grid, spec.center, spec.momentum, spec.sigma, m, hbar)?;
        let out = apply_kernel_onto(sf, &psi0, t0 + dt, &out_grid)?;
        let psi = out.state;
        let overlap = psi.inner(&target)?.norm();
        let (na, nb) = (psi.norm(), target.norm());
        let distance = (na * na + nb * nb - 2.0 * overlap).max(0.0).sqrt();
        steps.push(DeltaFamilyStep { dt, distance, raw_distance: psi.l2_distance(&target)?, norm: na, points: n });
    }
    let monotone = steps.windows(2).all(|w| w[1].distance < w[0].distance);
    let final_distance = steps.last().unwrap().distance;
    Ok(DeltaFamilyReport {
        monotone,
        final_distance,
        passed: monotone && final_distance < DELTA_FAMILY_TOLERANCE,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::{solve_amplitude, InitialAmplitude};
    use crate::integrator::Tolerance;
    use crate::profiles::FrequencyProfile;

    fn build(p: &FrequencyProfile, t1: f64) -> StructureFunctions {
        let (t0, _) = p.domain();
        let traj = solve_amplitude(p, t0, t1, InitialAmplitude::default(), Tolerance::default()).unwrap();
        StructureFunctions::build(traj, 1.0, 1.0).unwrap()
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn pure_prefactor_at_quarter_period() {
        let sf = build(&FrequencyProfile::constant(1.0, 0.0, 2.0).unwrap(), 2.0);
        let k = kernel(&sf, 0.0, 0.0, FRAC_PI_4).unwrap();
        let expected = (1.0 / (C64::i() * 2.0 * PI * FRAC_PI_4.sin())).sqrt();
        assert!(rel(k.value, expected) < 1e-10);
        assert!((k.value.norm() - k.prefactor_modulus).abs() < 1e-14);
        assert_eq!(k.maslov_index, 0);
        assert!(!k.caustic_flag);
    }

    #[test]
    fn matches_mehler_across_caustics() {
        let w0 = 1.3;
        let sf = build(&FrequencyProfile::constant(w0, 0.0, 9.0).unwrap(), 9.0);
        for k in 1..90 {
            let t = 0.1 * k as f64;
            if (w0 * t).sin().abs() < 0.05 {
                continue;
            }
            let (q, q0) = (0.7 - 0.01 * k as f64, -0.4 + 0.02 * k as f64);
            let a = kernel(&sf, q, q0, t).unwrap();
            let b = mehler_kernel(w0, 1.0, 1.0, q, q0, t).unwrap();
            assert!(rel(a.value, b) < 1e-9, "t={t}: {} vs {b}", a.value);
            assert_eq!(a.maslov_index, (w0 * t / PI).floor() as u32);
        }
    }

    #[test]
    fn short_time_limit_is_free() {
        let sf = build(&FrequencyProfile::constant(1.0, 0.0, 1.0).unwrap(), 1.0);
        let dt = 1e-4;
        for (q, q0) in [(0.0, 0.0), (0.01, -0.005), (0.002, 0.003)] {
            let k = kernel(&sf, q, q0, dt).unwrap().value;
            let free = (1.0 / (C64::i() * 2.0 * PI * dt)).sqrt() * C64::cis((q - q0) * (q - q0) / (2.0 * dt));
            assert!(rel(k, free) < 1e-6, "{k} vs {free}");
        }
    }

    #[test]
    fn mehler_cross_term_vanishes_at_quarter_period() {
        let a = mehler_kernel(2.0, 1.0, 1.0, 0.8, 0.0, PI / 4.0).unwrap();
        let b = mehler_kernel(2.0, 1.0, 1.0, -0.3, 0.0, PI / 4.0).unwrap();
        assert!((a - b).norm() < 1e-12);
        assert!(matches!(mehler_kernel(1.0, 1.0, 1.0, 0.0, 0.0, PI), Err(Error::Caustic { .. })));
    }

    #[test]
    fn maslov_counts_constant_frequency() {
        let sf = build(&FrequencyProfile::constant(1.0, 0.0, 8.0).unwrap(), 8.0);
        assert_eq!(maslov_index(&sf, 3.0).unwrap(), 0);
        assert_eq!(maslov_index(&sf, 4.0).unwrap(), 1);
        assert_eq!(maslov_index(&sf, 7.0).unwrap(), 2);
        assert!(matches!(maslov_index(&sf, PI), Err(Error::Caustic { .. })));
    }

    #[test]
    fn symmetric_profile_gives_symmetric_kernel() {
        let p = FrequencyProfile::gaussian_pulse(1.0, 0.8, 1.0, 0.3, 0.0, 2.0).unwrap();
        let sf = build(&p, 2.0);
        for (q, q0) in [(0.3, -1.1), (1.5, 0.2), (-0.7, 0.9)] {
            let a = kernel(&sf, q, q0, 2.0).unwrap().value;
            let b = kernel(&sf, q0, q, 2.0).unwrap().value;
            assert!(rel(a, b) < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn exponent_is_quadratic_with_expected_coefficients() {
        let p = FrequencyProfile::sinusoidal(1.0, 0.5, 3.0, 0.0, 3.0).unwrap();
        let sf = build(&p, 3.0);
        let t = 1.3;
        let b = sf.basis(t).unwrap();
        let pts = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (-0.5, 0.25), (0.3, -0.8)];
        // Fit i·(a q² + b q0² + c q q0 + d q + e q0 + g) to the phase with six samples.
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let reference = kernel(&sf, 0.0, 0.0, t).unwrap().value;
        for &(q, q0) in &pts {
            let k = kernel(&sf, q, q0, t).unwrap().value;
            rows.push([q * q, q0 * q0, q * q0, q, q0, 1.0]);
            rhs.push((k / reference).arg());
        }
        let coef = solve6(rows, rhs);
        let s = 1.0 / (2.0 * b.u);
        assert!((coef[0] - s * b.udot).abs() < 1e-9);
        assert!((coef[1] - s * b.v).abs() < 1e-9);
        assert!((coef[2] + 2.0 * s).abs() < 1e-9);
        for c in &coef[3..] {
            assert!(c.abs() < 1e-9);
        }
    }

    fn solve6(mut a: Vec<[f64; 6]>, mut b: Vec<f64>) -> [f64; 6] {
        for col in 0..6 {
            let piv = (col..6).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            for r in col + 1..6 {
                let f = a[r][col] / a[col][col];
                let pivot = a[col];
                for (x, p) in a[r][col..].iter_mut().zip(&pivot[col..]) {
                    *x -= f * p;
                }
                b[r] -= f * b[col];
            }
        }
        let mut x = [0.0; 6];
        for r in (0..6).rev() {
            let s: f64 = (r + 1..6).map(|c| a[r][c] * x[c]).sum();
            x[r] = (b[r] - s) / a[r][r];
        }
        x
    }

    #[test]
    fn disabled_correction_differs_only_past_caustic() {
        let sf = build(&FrequencyProfile::constant(1.0, 0.0, 5.0).unwrap(), 5.0);
        let off = KernelOptions { maslov_correction: false };
        let a = kernel_with(&sf, 0.2, 0.1, 1.0, off).unwrap().value;
        let b = kernel(&sf, 0.2, 0.1, 1.0).unwrap().value;
        assert!(rel(a, b) < 1e-14);
        let a = kernel_with(&sf, 0.2, 0.1, 4.0, off).unwrap().value;
        let b = kernel(&sf, 0.2, 0.1, 4.0).unwrap().value;
        assert!(rel(a, -b) < 1e-12);
    }

    #[test]
    fn delta_family_distances_shrink() {
        let sf = build(&FrequencyProfile::constant(1.0, 0.0, 1.0).unwrap(), 1.0);
        let spec = DeltaFamilySpec { dts: vec![0.1, 0.01, 0.001], sigma: 1.0, center: 1.0, momentum: 0.0 };
        let report = delta_family_check(&sf, &spec).unwrap();
        assert!(report.monotone, "{report:?}");
        for s in &report.steps {
            assert!((s.norm - 1.0).abs() < 1e-6, "{s:?}");
            assert!(s.raw_distance >= s.distance - 1e-12);
        }
        let bad = DeltaFamilySpec::new(vec![0.01, 0.1], 1.0);
        assert!(delta_family_check(&sf, &bad).is_err());
    }
}
