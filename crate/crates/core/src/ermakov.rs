//! Amplitude and phase of the mode in the form `S·e^{iγ}`, with `S` solving
//! `S̈ + ω²S = S⁻³` and `γ̇ = 1/S²`.
//!
//! `S` is read off the mode as `|f|·sqrt(2/|C(t0)|)`. `γ` is integrated
//! independently by quadrature of `1/S²`, so agreement between `S·e^{iγ}` and
//! `f` is a real check rather than a tautology.

use num_complex::Complex64;

use crate::amplitude::AmplitudeTrajectory;
use crate::error::{Error, Result};
use crate::profiles::Side;

type C64 = Complex64;

/// Finite-difference step used by the residuals.
const FD_STEP: f64 = 2e-3;

// Five-point Gauss–Legendre nodes on [-1, 1] and weights.
const GL_NODES: [f64; 5] =
    [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
const GL_WEIGHTS: [f64; 5] =
    [0.236_926_885_056_189, 0.478_628_670_499_366, 0.568_888_888_888_889, 0.478_628_670_499_366, 0.236_926_885_056_189];

#[derive(Debug, Clone)]
pub struct ErmakovSolution {
    traj: AmplitudeTrajectory,
    scale: f64,
    orientation: f64,
    gamma0: f64,
    knots: Vec<f64>,
    cumulative: Vec<f64>,
    amplitude_factor: f64,
    gamma_quadratic: f64,
}

impl ErmakovSolution {
    pub fn from_mode(traj: &AmplitudeTrajectory) -> Result<Self> {
        let c0 = traj.initial_wronskian();
        if c0.norm() == 0.0 || c0.re.abs() > 1e-12 * c0.norm() {
            return Err(Error::DegenerateMode);
        }
        let (t0, _) = traj.span();
        let (f0, _) = traj.mode(t0)?;
        let mut sol = ErmakovSolution {
            traj: traj.clone(),
            scale: (2.0 / c0.norm()).sqrt(),
            orientation: c0.im.signum(),
            gamma0: f0.arg() * c0.im.signum(),
            knots: traj.sample_times().to_vec(),
            cumulative: Vec::new(),
            amplitude_factor: 1.0,
            gamma_quadratic: 0.0,
        };
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(sol.knots.len());
        cumulative.push(0.0);
        for w in sol.knots.windows(2) {
            acc += sol.integrate_rate(w[0], w[1])?;
            cumulative.push(acc);
        }
        sol.cumulative = cumulative;
        Ok(sol)
    }

    /// Multiplies `S` by `factor` and adds `c·(t − t0)²` to `γ`. For sensitivity checks.
    #[doc(hidden)]
    pub fn corrupted(mut self, amplitude_factor: f64, gamma_quadratic: f64) -> Self {
        self.amplitude_factor *= amplitude_factor;
        self.gamma_quadratic += gamma_quadratic;
        self
    }

    pub fn trajectory(&self) -> &AmplitudeTrajectory {
        &self.traj
    }

    /// `sqrt(2/|C(t0)|)`, the factor relating `|f|` to `S`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `+1` when `S·e^{iγ}` follows `f`, `−1` when it follows `f*`.
    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn s(&self, t: f64) -> Result<f64> {
        let (f, _) = self.traj.mode(t)?;
        let s = self.amplitude_factor * self.scale * f.norm();
        if !(s > 0.0) {
            return Err(Error::DegenerateMode);
        }
        Ok(s)
    }

    pub fn s_dot(&self, t: f64) -> Result<f64> {
        let (f, fdot) = self.traj.mode(t)?;
        Ok(self.amplitude_factor * self.scale * (f.conj() * fdot).re / f.norm())
    }

    fn uncorrupted_rate(&self, t: f64) -> Result<f64> {
        let (f, _) = self.traj.mode(t)?;
        Ok(1.0 / (self.scale * f.norm()).powi(2))
    }

    fn integrate_rate(&self, a: f64, b: f64) -> Result<f64> {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut sum = 0.0;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            sum += w * self.uncorrupted_rate(mid + half * x)?;
        }
        Ok(sum * half)
    }

    pub fn gamma(&self, t: f64) -> Result<f64> {
        let (t0, _) = self.traj.span();
        self.traj.mode(t)?;
        let k = self.knots.partition_point(|&x| x <= t).saturating_sub(1);
        let base = self.cumulative[k] + self.integrate_rate(self.knots[k], t)?;
        Ok(self.gamma0 + base + self.gamma_quadratic * (t - t0).powi(2))
    }

    /// `γ̇`, which is `1/S²` for the uncorrupted solution.
    pub fn gamma_dot(&self, t: f64) -> Result<f64> {
        let (t0, _) = self.traj.span();
        Ok(self.uncorrupted_rate(t)? + 2.0 * self.gamma_quadratic * (t - t0))
    }

    /// `S(t)·e^{iγ(t)}`.
    pub fn ansatz(&self, t: f64) -> Result<C64> {
        Ok(C64::from_polar(self.s(t)?, self.gamma(t)?))
    }

    /// The mode, conjugated when the orientation is negative.
    fn oriented_mode(&self, t: f64) -> Result<C64> {
        let (f, _) = self.traj.mode(t)?;
        Ok(if self.orientation < 0.0 { f.conj() } else { f })
    }

    /// Largest `|S·e^{iγ} − c·f|` over the solver samples, with `c` fitted at `t0`.
    pub fn equivalence_error(&self) -> Result<f64> {
        let (t0, _) = self.traj.span();
        let c = self.ansatz(t0)? / self.oriented_mode(t0)?;
        let mut worst: f64 = 0.0;
        for &t in &self.knots {
            worst = worst.max((self.ansatz(t)? - c * self.oriented_mode(t)?).norm());
        }
        Ok(worst)
    }

    /// `|S̈ + ω²S − S⁻³|` with `S̈` from fourth-order differences of `Ṡ`.
    pub fn pinney_residual(&self, t: f64) -> Result<f64> {
        self.check_interior(t)?;
        let s_ddot = d1(|x| self.s_dot(x), t)?;
        let omega = self.traj.profile().omega_at(t, Side::Both)?;
        let s = self.s(t)?;
        Ok((s_ddot + omega * omega * s - s.powi(-3)).abs())
    }

    /// `|γ̇γ⃛ − (3/2)γ̈² − 2(ω² − γ̇²)γ̇²|` with `γ̈, γ⃛` from fourth-order differences of `γ̇`.
    pub fn gamma_residual(&self, t: f64) -> Result<f64> {
        self.check_interior(t)?;
        let g1 = self.gamma_dot(t)?;
        let g2 = d1(|x| self.gamma_dot(x), t)?;
        let g3 = d2(|x| self.gamma_dot(x), t)?;
        let omega = self.traj.profile().omega_at(t, Side::Both)?;
        Ok((g1 * g3 - 1.5 * g2 * g2 - 2.0 * (omega * omega - g1 * g1) * g1 * g1).abs())
    }

    /// Magnitudes the two residuals are compared against: the largest term of
    /// each equation, `max(|S̈|, ω²S, S⁻³)` and `max(|γ̇γ⃛|, (3/2)γ̈², 2ω²γ̇², 2γ̇⁴)`.
    pub fn residual_scales(&self, t: f64) -> Result<(f64, f64)> {
        self.check_interior(t)?;
        let omega = self.traj.profile().omega_at(t, Side::Both)?;
        let w2 = omega * omega;
        let s = self.s(t)?;
        let s_ddot = d1(|x| self.s_dot(x), t)?;
        let pinney = s_ddot.abs().max(w2 * s).max(s.powi(-3));
        let g1 = self.gamma_dot(t)?;
        let g2 = d1(|x| self.gamma_dot(x), t)?;
        let g3 = d2(|x| self.gamma_dot(x), t)?;
        let gamma = (g1 * g3).abs().max(1.5 * g2 * g2).max(2.0 * w2 * g1 * g1).max(2.0 * g1.powi(4));
        Ok((pinney, gamma))
    }

    fn check_interior(&self, t: f64) -> Result<()> {
        let (a, b) = self.traj.span();
        if t - 2.0 * FD_STEP < a || t + 2.0 * FD_STEP > b {
            return Err(Error::InvalidArgument(format!(
                "residual at t = {t} needs [{}, {}] inside the span [{a}, {b}]",
                t - 2.0 * FD_STEP,
                t + 2.0 * FD_STEP
            )));
        }
        Ok(())
    }
}

fn d1(f: impl Fn(f64) -> Result<f64>, t: f64) -> Result<f64> {
    let h = FD_STEP;
    Ok((f(t - 2.0 * h)? - 8.0 * f(t - h)? + 8.0 * f(t + h)? - f(t + 2.0 * h)?) / (12.0 * h))
}

fn d2(f: impl Fn(f64) -> Result<f64>, t: f64) -> Result<f64> {
    let h = FD_STEP;
    Ok((-f(t - 2.0 * h)? + 16.0 * f(t - h)? - 30.0 * f(t)? + 16.0 * f(t + h)? - f(t + 2.0 * h)?) / (12.0 * h * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::{solve_amplitude, InitialAmplitude};
    use crate::integrator::Tolerance;
    use crate::profiles::FrequencyProfile;

    fn solve(p: &FrequencyProfile, init: InitialAmplitude) -> ErmakovSolution {
        let (a, b) = p.domain();
        let traj = solve_amplitude(p, a, b, init, Tolerance::default()).unwrap();
        ErmakovSolution::from_mode(&traj).unwrap()
    }

    #[test]
    fn constant_frequency_closed_form() {
        let w0 = 2.5;
        let sol = solve(&FrequencyProfile::constant(w0, 0.0, 4.0).unwrap(), InitialAmplitude::default());
        for t in [0.3, 1.7, 3.5] {
            assert!((sol.s(t).unwrap() - w0.powf(-0.5)).abs() < 1e-12);
            assert!((sol.gamma_dot(t).unwrap() - w0).abs() < 1e-10);
            assert!((sol.gamma(t).unwrap() - w0 * t).abs() < 1e-9);
            assert!(sol.pinney_residual(t).unwrap() < 1e-10);
            assert!(sol.gamma_residual(t).unwrap() < 1e-10);
        }
    }

    #[test]
    fn sinusoidal_ansatz_matches_mode() {
        let p = FrequencyProfile::sinusoidal(1.0, 0.5, 3.0, 0.0, 10.0).unwrap();
        let sol = solve(&p, InitialAmplitude::default());
        assert!(sol.equivalence_error().unwrap() < 1e-6);
        for t in [0.5, 2.0, 5.5, 9.0] {
            let (ps, gs) = sol.residual_scales(t).unwrap();
            assert!(sol.pinney_residual(t).unwrap() < 1e-6 * ps);
            assert!(sol.gamma_residual(t).unwrap() < 1e-5 * gs);
        }
    }

    #[test]
    fn negative_orientation_follows_conjugate() {
        let p = FrequencyProfile::linear_ramp(1.0, 0.3, 0.0, 5.0).unwrap();
        // ḟ(t0) = −iω0 gives C(t0) = −2iω0.
        let init = InitialAmplitude::new(C64::new(1.0, 0.0), C64::new(0.0, -2.0));
        let sol = solve(&p, init);
        assert_eq!(sol.orientation(), -1.0);
        assert!(sol.equivalence_error().unwrap() < 1e-6);
        let (ps, _) = sol.residual_scales(2.5).unwrap();
        assert!(sol.pinney_residual(2.5).unwrap() < 1e-6 * ps);
    }

    #[test]
    fn corruptions_are_detected() {
        let p = FrequencyProfile::linear_ramp(1.0, 0.3, 0.0, 5.0).unwrap();
        let clean = solve(&p, InitialAmplitude::default());
        let t = 2.0;
        let base = clean.pinney_residual(t).unwrap();
        let bad = clean.clone().corrupted(1.01, 0.0).pinney_residual(t).unwrap();
        assert!(bad > 1e4 * base.max(1e-12), "{bad} vs {base}");

        let g = |c: f64| clean.clone().corrupted(1.0, c).gamma_residual(t).unwrap();
        let (g1, g2) = (g(0.01), g(0.02));
        assert!(g1 > 1e3 * g(0.0).max(1e-9));
        assert!((g2 / g1 - 2.0).abs() < 0.3, "{g1} {g2}");
    }

    #[test]
    fn residual_needs_interior_time() {
        let sol = solve(&FrequencyProfile::constant(1.0, 0.0, 1.0).unwrap(), InitialAmplitude::default());
        assert!(sol.pinney_residual(0.0).is_err());
        assert!(sol.gamma_residual(1.0).is_err());
    }
}
