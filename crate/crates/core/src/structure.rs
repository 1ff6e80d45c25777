//! Structure functions built from a solved mode.
//!
//! With `f = A·e^{iθ}` and initial data `(A0, Ȧ0)`:
//!
//! ```text
//! F0(t) = A0·f*(t) − c.c.
//! F1(t) = (Ȧ0* − iω0·A0*)·f(t) − c.c.
//! C(t)  = A*Ȧ − AȦ* + 2iω|A|²        (= f*ḟ − fḟ*, conserved)
//! ```
//!
//! These are purely imaginary. The real classical basis used throughout is
//! `u = −F0/C(t0)` and `v = −F1/C(t0)`, normalized so that `u(t0) = 0`,
//! `u̇(t0) = 1`, `v(t0) = 1`, `v̇(t0) = 0`, giving `q(t) = v·q0 + u·p0/m`.

use num_complex::Complex64;

use crate::amplitude::AmplitudeTrajectory;
use crate::error::{Error, Result};

type C64 = Complex64;

/// Default threshold on `|u(t)|` below which a time counts as a caustic.
pub const DEFAULT_CAUSTIC_EPSILON: f64 = 1e-8;

/// `u, v` and their time derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalBasis {
    pub u: f64,
    pub v: f64,
    pub udot: f64,
    pub vdot: f64,
}

impl ClassicalBasis {
    /// `u̇v − uv̇`, identically 1 for exact solutions.
    pub fn wronskian(&self) -> f64 {
        self.udot * self.v - self.u * self.vdot
    }
}

/// Raw structure functions at one instant, as complex numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawStructure {
    pub f0: C64,
    pub f0_dot: C64,
    pub f1: C64,
    pub f1_dot: C64,
    pub c: C64,
}

#[derive(Debug, Clone)]
pub struct StructureFunctions {
    traj: AmplitudeTrajectory,
    mass: f64,
    hbar: f64,
    c0: C64,
    /// Coefficients of `f*` and `f` in F1: `F1 = k·f − k*·f*` with `k = Ȧ0* − iω0A0*`.
    k1: C64,
    caustic_epsilon: f64,
    caustics: Vec<f64>,
}

impl StructureFunctions {
    pub fn build(traj: AmplitudeTrajectory, mass: f64, hbar: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {mass}")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        let init = traj.initial();
        let w0 = traj.omega0();
        let c0 = traj.initial_wronskian();
        let scale = init.a0.norm() * (init.adot0.norm() + w0 * init.a0.norm());
        if c0.norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::DegenerateMode);
        }
        let k1 = init.adot0.conj() - C64::i() * w0 * init.a0.conj();
        let mut sf = StructureFunctions {
            traj,
            mass,
            hbar,
            c0,
            k1,
            caustic_epsilon: DEFAULT_CAUSTIC_EPSILON,
            caustics: Vec::new(),
        };
        sf.caustics = sf.locate_caustics()?;
        Ok(sf)
    }

    /// Replaces the caustic threshold on `|u|`.
    pub fn with_caustic_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("caustic threshold must be positive, got {epsilon}")));
        }
        self.caustic_epsilon = epsilon;
        Ok(self)
    }

    pub fn trajectory(&self) -> &AmplitudeTrajectory {
        &self.traj
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn span(&self) -> (f64, f64) {
        self.traj.span()
    }

    pub fn caustic_epsilon(&self) -> f64 {
        self.caustic_epsilon
    }

    /// `C(t0)`.
    pub fn c0(&self) -> C64 {
        self.c0
    }

    /// Zeros of `u` on `(t0, t1]`, in increasing order.
    pub fn caustic_times(&self) -> &[f64] {
        &self.caustics
    }

    /// `F0, Ḟ0, F1, Ḟ1, C` exactly as defined, at time `t`.
    pub fn raw(&self, t: f64) -> Result<RawStructure> {
        let (f, fdot) = self.traj.mode(t)?;
        let a0 = self.traj.initial().a0;
        let anti = |z: C64| z - z.conj();
        Ok(RawStructure {
            f0: anti(a0 * f.conj()),
            f0_dot: anti(a0 * fdot.conj()),
            f1: anti(self.k1 * f),
            f1_dot: anti(self.k1 * fdot),
            c: self.traj.wronskian(t)?,
        })
    }

    pub fn f0(&self, t: f64) -> Result<C64> {
        Ok(self.raw(t)?.f0)
    }

    pub fn f1(&self, t: f64) -> Result<C64> {
        Ok(self.raw(t)?.f1)
    }

    /// `C(t)` from the amplitude at `t` (not the conserved value).
    pub fn c(&self, t: f64) -> Result<C64> {
        self.traj.wronskian(t)
    }

    /// `u, v, u̇, v̇` at `t`.
    pub fn basis(&self, t: f64) -> Result<ClassicalBasis> {
        let raw = self.raw(t)?;
        let norm = -1.0 / self.c0;
        Ok(ClassicalBasis {
            u: (raw.f0 * norm).re,
            v: (raw.f1 * norm).re,
            udot: (raw.f0_dot * norm).re,
            vdot: (raw.f1_dot * norm).re,
        })
    }

    pub fn u(&self, t: f64) -> Result<f64> {
        Ok(self.basis(t)?.u)
    }

    /// Returns the basis, or a caustic error when `|u(t)|` is at or below the threshold.
    pub(crate) fn noncaustic_basis(&self, t: f64) -> Result<ClassicalBasis> {
        let b = self.basis(t)?;
        if b.u.abs() <= self.caustic_epsilon {
            return Err(Error::Caustic { t, u: b.u, nearest: self.nearest_caustic(t) });
        }
        Ok(b)
    }

    fn nearest_caustic(&self, t: f64) -> f64 {
        std::iter::once(self.span().0)
            .chain(self.caustics.iter().copied())
            .min_by(|a, b| (a - t).abs().total_cmp(&(b - t).abs()))
            .unwrap()
    }

    /// Phase-space point `(q, p)` at `t` of the classical path through `(q0, p0)` at `t0`.
    pub fn classical_trajectory(&self, q0: f64, p0: f64, t: f64) -> Result<(f64, f64)> {
        let b = self.basis(t)?;
        let m = self.mass;
        Ok((b.v * q0 + b.u * p0 / m, m * (b.vdot * q0 + b.udot * p0 / m)))
    }

    /// `iħF0(t)/(m·C(t))`, the c-number in `[q̂(t0), q̂(t)]`.
    pub fn commutator_coefficient(&self, t: f64) -> Result<C64> {
        let raw = self.raw(t)?;
        Ok(C64::i() * self.hbar * raw.f0 / (self.mass * raw.c))
    }

    /// Classical action `S = (m/2u)(u̇q² + v·q0² − 2q·q0)` of the path from `q0` at `t0` to `q` at `t`.
    pub fn classical_action(&self, q: f64, q0: f64, t: f64) -> Result<f64> {
        let b = self.noncaustic_basis(t)?;
        Ok(action_from_basis(&b, self.mass, q, q0))
    }

    fn locate_caustics(&self) -> Result<Vec<f64>> {
        const SUBDIVISIONS: usize = 4;
        let times = self.traj.sample_times();
        let mut zeros = Vec::new();
        let mut prev_t = times[0];
        // u̇(t0) = 1 so u starts out positive.
        let mut prev_u = 1.0_f64;
        for w in times.windows(2) {
            for j in 1..=SUBDIVISIONS {
                let t = if j == SUBDIVISIONS { w[1] } else { w[0] + (w[1] - w[0]) * j as f64 / SUBDIVISIONS as f64 };
                let u = self.u(t)?;
                if u == 0.0 {
                    zeros.push(t);
                } else if prev_u != 0.0 && u.signum() != prev_u.signum() {
                    zeros.push(self.bisect_u(prev_t, t, prev_u)?);
                }
                prev_t = t;
                prev_u = u;
            }
        }
        Ok(zeros)
    }

    fn bisect_u(&self, mut lo: f64, mut hi: f64, u_lo: f64) -> Result<f64> {
        let sign_lo = u_lo.signum();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let um = self.u(mid)?;
            if um == 0.0 {
                return Ok(mid);
            }
            if um.signum() == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

pub(crate) fn action_from_basis(b: &ClassicalBasis, mass: f64, q: f64, q0: f64) -> f64 {
    mass / (2.0 * b.u) * (b.udot * q * q + b.v * q0 * q0 - 2.0 * q * q0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::{solve_amplitude, InitialAmplitude};
    use crate::integrator::Tolerance;
    use crate::profiles::FrequencyProfile;
    use std::f64::consts::PI;

    fn constant(w0: f64, t1: f64) -> StructureFunctions {
        let p = FrequencyProfile::constant(w0, 0.0, t1).unwrap();
        let traj = solve_amplitude(&p, 0.0, t1, InitialAmplitude::default(), Tolerance::default()).unwrap();
        StructureFunctions::build(traj, 1.0, 1.0).unwrap()
    }

    #[test]
    fn constant_frequency_closed_forms() {
        let w0 = 1.4;
        let sf = constant(w0, 6.0);
        assert!((sf.c0() - C64::new(0.0, 2.0 * w0)).norm() < 1e-15);
        for k in 0..=60 {
            let t = 0.1 * k as f64;
            let raw = sf.raw(t).unwrap();
            let (s, c) = (w0 * t).sin_cos();
            assert!((raw.f0 - C64::new(0.0, -2.0 * s)).norm() < 1e-10);
            assert!((raw.f1 - C64::new(0.0, -2.0 * w0 * c)).norm() < 1e-10);
            let b = sf.basis(t).unwrap();
            assert!((b.u - s / w0).abs() < 1e-10);
            assert!((b.v - c).abs() < 1e-10);
            assert!((b.udot - c).abs() < 1e-10);
            assert!((b.vdot + w0 * s).abs() < 1e-10);
        }
    }

    #[test]
    fn initial_identities() {
        let p = FrequencyProfile::sinusoidal(1.2, 0.4, 2.0, 0.0, 4.0).unwrap();
        let init = InitialAmplitude::new(C64::new(0.7, 0.2), C64::new(-0.3, 0.5));
        let traj = solve_amplitude(&p, 0.0, 4.0, init, Tolerance::default()).unwrap();
        let sf = StructureFunctions::build(traj, 2.0, 0.5).unwrap();
        let raw = sf.raw(0.0).unwrap();
        assert!(raw.f0.norm() < 1e-15);
        assert!((raw.f1 + sf.c0()).norm() < 1e-14);
        assert!((raw.f0_dot + sf.c0()).norm() < 1e-14);
        let b = sf.basis(0.0).unwrap();
        assert!(b.u.abs() < 1e-15 && (b.udot - 1.0).abs() < 1e-14);
        assert!((b.v - 1.0).abs() < 1e-14 && b.vdot.abs() < 1e-14);
        for t in [0.5, 1.7, 3.9] {
            let raw = sf.raw(t).unwrap();
            assert!(raw.f0.re.abs() < 1e-15 && raw.c.re.abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_mode_is_rejected() {
        let p = FrequencyProfile::constant(1.0, 0.0, 1.0).unwrap();
        // ḟ(t0) = 0 makes the mode real, so C(t0) = 0.
        let init = InitialAmplitude::new(C64::new(1.0, 0.0), C64::new(0.0, -1.0));
        let traj = solve_amplitude(&p, 0.0, 1.0, init, Tolerance::default()).unwrap();
        assert_eq!(StructureFunctions::build(traj, 1.0, 1.0).unwrap_err(), Error::DegenerateMode);
    }

    #[test]
    fn trajectory_rotation() {
        let sf = constant(1.0, 4.0);
        let (q, p) = sf.classical_trajectory(1.0, 0.0, PI / 2.0).unwrap();
        assert!(q.abs() < 1e-10 && (p + 1.0).abs() < 1e-10);
        assert_eq!(sf.classical_trajectory(0.3, -0.8, 0.0).unwrap(), (0.3, -0.8));
    }

    #[test]
    fn action_examples() {
        let sf = constant(1.0, 4.0);
        let s = sf.classical_action(1.0, 1.0, PI / 2.0).unwrap();
        assert!((s + 1.0).abs() < 1e-10, "{s}");
        assert_eq!(sf.classical_action(0.0, 0.0, 2.0).unwrap(), 0.0);
        let dt = 1e-3;
        let free = 0.1_f64.powi(2) / (2.0 * dt);
        let s = sf.classical_action(0.1, 0.0, dt).unwrap();
        assert!((s - free).abs() < 0.01 * free, "{s} vs {free}");
    }

    #[test]
    fn caustics_of_constant_frequency() {
        let sf = constant(2.0, 5.0);
        let zeros = sf.caustic_times();
        assert_eq!(zeros.len(), 3);
        for (k, z) in zeros.iter().enumerate() {
            assert!((z - (k + 1) as f64 * PI / 2.0).abs() < 1e-9, "{z}");
        }
        let err = sf.classical_action(1.0, 0.5, zeros[0]).unwrap_err();
        match err {
            Error::Caustic { nearest, .. } => assert!((nearest - PI / 2.0).abs() < 1e-9),
            other => panic!("{other}"),
        }
        assert!(matches!(sf.classical_action(1.0, 0.5, 0.0), Err(Error::Caustic { .. })));
    }

    #[test]
    fn commutator_vanishes_at_start() {
        let sf = constant(1.0, 3.0);
        assert_eq!(sf.commutator_coefficient(0.0).unwrap().norm(), 0.0);
        let c = sf.commutator_coefficient(PI / 2.0).unwrap();
        assert!((c.norm() - 1.0).abs() < 1e-10);
        // −iħu/m
        assert!((c - C64::new(0.0, -1.0)).norm() < 1e-10);
    }

    #[test]
    fn rejects_bad_physical_parameters() {
        let p = FrequencyProfile::constant(1.0, 0.0, 1.0).unwrap();
        let traj = solve_amplitude(&p, 0.0, 1.0, InitialAmplitude::default(), Tolerance::default()).unwrap();
        assert!(StructureFunctions::build(traj.clone(), 0.0, 1.0).is_err());
        assert!(StructureFunctions::build(traj.clone(), 1.0, -1.0).is_err());
        let sf = StructureFunctions::build(traj, 1.0, 1.0).unwrap();
        assert!(sf.with_caustic_epsilon(0.0).is_err());
    }
}
