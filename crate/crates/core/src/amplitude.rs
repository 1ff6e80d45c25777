//! The amplitude equation `Ä + 2iωȦ + iω̇A = 0` and the mode `f = A·e^{iθ}`.
//!
//! Writing a classical solution as `q(t) = A(t)·exp(i∫ω)` turns
//! `q̈ + ω²q = 0` into a first-order-in-`Ȧ` equation for the amplitude that
//! needs no slow-variation assumption on `ω`. It is integrated here as the
//! complex system `(A, Ȧ)`, and the phase `θ` always comes from the profile.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrator::{integrate, OdeSolution, Tolerance};
use crate::profiles::{FrequencyProfile, Side};

type C64 = Complex64;

/// Initial data `(A(t0), Ȧ(t0))` for the amplitude equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialAmplitude {
    pub a0: C64,
    pub adot0: C64,
}

impl Default for InitialAmplitude {
    /// `A0 = 1, Ȧ0 = 0`: the mode starts as `f(t0) = 1, ḟ(t0) = iω0`.
    fn default() -> Self {
        InitialAmplitude { a0: C64::new(1.0, 0.0), adot0: C64::new(0.0, 0.0) }
    }
}

impl InitialAmplitude {
    pub fn new(a0: C64, adot0: C64) -> Self {
        InitialAmplitude { a0, adot0 }
    }
}

/// A solved amplitude `A(t)` on `[t0, t1]` with dense output.
#[derive(Debug, Clone)]
pub struct AmplitudeTrajectory {
    profile: FrequencyProfile,
    t0: f64,
    t1: f64,
    initial: InitialAmplitude,
    omega0: f64,
    tol: Tolerance,
    solution: OdeSolution,
}

fn check_span(profile: &FrequencyProfile, t0: f64, t1: f64) -> Result<()> {
    let (start, end) = profile.domain();
    if !(t0 < t1) {
        return Err(Error::InvalidArgument(format!("need t0 < t1, got [{t0}, {t1}]")));
    }
    if t0 < start || t1 > end {
        return Err(Error::OutOfDomain { t: if t0 < start { t0 } else { t1 }, start, end });
    }
    for &b in profile.breakpoints() {
        let left = profile.omega_at(b, Side::Left)?;
        let right = profile.omega_at(b, Side::Right)?;
        if left != right && b > t0 && b < t1 {
            return Err(Error::NotAdmissible(format!("ω jumps from {left} to {right} at t = {b}")));
        }
    }
    Ok(())
}

fn events_within(profile: &FrequencyProfile, t0: f64, t1: f64) -> Vec<f64> {
    profile.smoothness_breaks().into_iter().filter(|&b| b > t0 && b < t1).collect()
}

/// Integrates the amplitude equation from `(A0, Ȧ0)` at `t0` up to `t1`.
pub fn solve_amplitude(
    profile: &FrequencyProfile,
    t0: f64,
    t1: f64,
    initial: InitialAmplitude,
    tol: Tolerance,
) -> Result<AmplitudeTrajectory> {
    check_span(profile, t0, t1)?;
    if initial.a0 == C64::new(0.0, 0.0) && initial.adot0 == C64::new(0.0, 0.0) {
        return Err(Error::DegenerateMode);
    }
    let events = events_within(profile, t0, t1);
    let rhs = |t: f64, side: Side, y: &[C64], dy: &mut [C64]| {
        let w = profile.omega_unchecked(t, side);
        let wdot = profile.omega_dot_unchecked(t, side);
        dy[0] = y[1];
        dy[1] = -C64::i() * (2.0 * w * y[1] + wdot * y[0]);
    };
    let solution = integrate(rhs, &[initial.a0, initial.adot0], (t0, t1), tol, &events)?;
    Ok(AmplitudeTrajectory {
        profile: profile.clone(),
        t0,
        t1,
        initial,
        omega0: profile.omega_at(t0, Side::Right)?,
        tol,
        solution,
    })
}

/// Integrates `q̈ = −ω²q` directly. Used to check the amplitude route.
pub fn classical_oracle(
    profile: &FrequencyProfile,
    t0: f64,
    t1: f64,
    q0: C64,
    qdot0: C64,
    tol: Tolerance,
) -> Result<OdeSolution> {
    check_span(profile, t0, t1)?;
    let events = events_within(profile, t0, t1);
    let rhs = |t: f64, side: Side, y: &[C64], dy: &mut [C64]| {
        let w = profile.omega_unchecked(t, side);
        dy[0] = y[1];
        dy[1] = -(w * w) * y[0];
    };
    integrate(rhs, &[q0, qdot0], (t0, t1), tol, &events)
}

impl AmplitudeTrajectory {
    pub fn profile(&self) -> &FrequencyProfile {
        &self.profile
    }

    pub fn span(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    pub fn initial(&self) -> InitialAmplitude {
        self.initial
    }

    /// `ω(t0)`.
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn solution(&self) -> &OdeSolution {
        &self.solution
    }

    /// Accepted step endpoints of the underlying integration.
    pub fn sample_times(&self) -> &[f64] {
        self.solution.times()
    }

    fn check(&self, t: f64) -> Result<()> {
        let slack = 1e-12 * (self.t1 - self.t0).max(1.0);
        if t.is_nan() || t < self.t0 - slack || t > self.t1 + slack {
            return Err(Error::OutOfDomain { t, start: self.t0, end: self.t1 });
        }
        Ok(())
    }

    /// `(A(t), Ȧ(t))` from dense output.
    pub fn amplitude(&self, t: f64) -> Result<(C64, C64)> {
        self.check(t)?;
        let mut y = [C64::new(0.0, 0.0); 2];
        self.solution.eval_into(t, &mut y)?;
        Ok((y[0], y[1]))
    }

    /// Accumulated phase `θ(t) = ∫_{t0}^{t} ω`.
    pub fn phase(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        self.profile.phase_integral(self.t0, t.clamp(self.t0, self.t1))
    }

    /// The mode `f = A·e^{iθ}` and its derivative `ḟ = (Ȧ + iωA)·e^{iθ}`.
    pub fn mode(&self, t: f64) -> Result<(C64, C64)> {
        let (a, adot) = self.amplitude(t)?;
        let t = t.clamp(self.t0, self.t1);
        let rotor = C64::from_polar(1.0, self.profile.phase_unchecked(self.t0, t));
        let w = self.profile.omega_unchecked(t, Side::Both);
        Ok((a * rotor, (adot + C64::i() * w * a) * rotor))
    }

    /// `C(t) = A*Ȧ − AȦ* + 2iω|A|²`, evaluated from the amplitude at `t`.
    pub fn wronskian(&self, t: f64) -> Result<C64> {
        let (a, adot) = self.amplitude(t)?;
        let w = self.profile.omega_unchecked(t.clamp(self.t0, self.t1), Side::Both);
        Ok(wronskian_of(a, adot, w))
    }

    /// `C(t0)` computed exactly from the initial data.
    pub fn initial_wronskian(&self) -> C64 {
        wronskian_of(self.initial.a0, self.initial.adot0, self.omega0)
    }
}

pub(crate) fn wronskian_of(a: C64, adot: C64, omega: f64) -> C64 {
    a.conj() * adot - a * adot.conj() + C64::new(0.0, 2.0 * omega * a.norm_sqr())
}
