//! Time-dependent frequency laws `ω(t)`.
//!
//! A [`FrequencyProfile`] is immutable once built. Construction checks that
//! `ω(t) > 0` on a dense sample of the domain, and every evaluation is a pure
//! function of `t`. Profiles may carry *breakpoints*: times where `ω̇` is
//! allowed to jump. Integrators place step endpoints exactly on them, and
//! `ω̇` must be asked for as a one-sided limit there.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use crate::error::{Error, Result};

/// Which one-sided limit to take when evaluating at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Side {
    /// Ordinary evaluation. Ambiguous for `ω̇` at a declared breakpoint.
    #[default]
    Both,
    Left,
    Right,
}

/// The supported frequency laws.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// `ω(t) = ω0`.
    Constant { omega0: f64 },
    /// `ω(t) = ω0 + slope·t`.
    LinearRamp { omega0: f64, slope: f64 },
    /// `ω(t) = ω0 + depth·sin(rate·t)`.
    Sinusoidal { omega0: f64, depth: f64, rate: f64 },
    /// Smooth step from `omega_initial` to `omega_final`:
    /// `ω(t) = ωi + (ωf − ωi)·(1 + tanh((t − center)/width))/2`.
    TanhQuench { omega_initial: f64, omega_final: f64, center: f64, width: f64 },
    /// `ω(t) = ω0 + amplitude·exp(−(t − center)²/(2·width²))`.
    GaussianPulse { omega0: f64, amplitude: f64, center: f64, width: f64 },
    /// Samples `(t_i, ω_i)` joined by a monotone cubic (PCHIP) interpolant.
    ///
    /// Times must be non-decreasing. A repeated time encodes a jump of `ω`
    /// (which makes the profile inadmissible, but it can still be built and
    /// inspected).
    Tabulated { times: Vec<f64>, omegas: Vec<f64> },
}

impl ProfileKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProfileKind::Constant { .. } => "constant",
            ProfileKind::LinearRamp { .. } => "linear_ramp",
            ProfileKind::Sinusoidal { .. } => "sinusoidal_modulation",
            ProfileKind::TanhQuench { .. } => "tanh_quench",
            ProfileKind::GaussianPulse { .. } => "gaussian_pulse",
            ProfileKind::Tabulated { .. } => "tabulated",
        }
    }
}

/// An admissible-by-construction frequency law on a closed time domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyProfile {
    kind: ProfileKind,
    start: f64,
    end: f64,
    breakpoints: Vec<f64>,
    interp: Option<PiecewiseHermite>,
}

const POSITIVITY_SAMPLES: usize = 4096;

impl FrequencyProfile {
    /// Builds a profile on `[t_min, t_max]` with the given declared breakpoints.
    ///
    /// For tabulated data the breakpoints must coincide with sample times, and
    /// repeated sample times are added to the breakpoint list automatically.
    pub fn new(kind: ProfileKind, t_min: f64, t_max: f64, breakpoints: Vec<f64>) -> Result<Self> {
        if !(t_min.is_finite() && t_max.is_finite() && t_min < t_max) {
            return Err(Error::InvalidProfile(format!("domain [{t_min}, {t_max}] must be finite with t_min < t_max")));
        }
        validate_parameters(&kind)?;

        let mut breakpoints = breakpoints;
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidProfile("breakpoints must be finite".into()));
        }
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        if let Some(&b) = breakpoints.iter().find(|&&b| b <= t_min || b >= t_max) {
            return Err(Error::InvalidProfile(format!(
                "breakpoint {b} is not strictly inside the domain [{t_min}, {t_max}]"
            )));
        }

        let interp = match &kind {
            ProfileKind::Tabulated { times, omegas } => {
                if t_min < times[0] || t_max > *times.last().unwrap() {
                    return Err(Error::InvalidProfile(format!(
                        "domain [{t_min}, {t_max}] exceeds the tabulated range [{}, {}]",
                        times[0],
                        times.last().unwrap()
                    )));
                }
                for w in times.windows(2) {
                    if w[0] == w[1] && w[0] > t_min && w[0] < t_max {
                        breakpoints.push(w[0]);
                    }
                }
                breakpoints.sort_by(f64::total_cmp);
                breakpoints.dedup();
                Some(PiecewiseHermite::new(times, omegas, &breakpoints)?)
            }
            _ => None,
        };

        let profile = FrequencyProfile { kind, start: t_min, end: t_max, breakpoints, interp };
        profile.check_positive()?;
        Ok(profile)
    }

    pub fn constant(omega0: f64, t_min: f64, t_max: f64) -> Result<Self> {
        Self::new(ProfileKind::Constant { omega0 }, t_min, t_max, vec![])
    }

    pub fn linear_ramp(omega0: f64, slope: f64, t_min: f64, t_max: f64) -> Result<Self> {
        Self::new(ProfileKind::LinearRamp { omega0, slope }, t_min, t_max, vec![])
    }

    pub fn sinusoidal(omega0: f64, depth: f64, rate: f64, t_min: f64, t_max: f64) -> Result<Self> {
        Self::new(ProfileKind::Sinusoidal { omega0, depth, rate }, t_min, t_max, vec![])
    }

    pub fn tanh_quench(
        omega_initial: f64,
        omega_final: f64,
        center: f64,
        width: f64,
        t_min: f64,
        t_max: f64,
    ) -> Result<Self> {
        Self::new(ProfileKind::TanhQuench { omega_initial, omega_final, center, width }, t_min, t_max, vec![])
    }

    pub fn gaussian_pulse(
        omega0: f64,
        amplitude: f64,
        center: f64,
        width: f64,
        t_min: f64,
        t_max: f64,
    ) -> Result<Self> {
        Self::new(ProfileKind::GaussianPulse { omega0, amplitude, center, width }, t_min, t_max, vec![])
    }

    /// Tabulated profile over the full sampled range.
    pub fn tabulated(times: Vec<f64>, omegas: Vec<f64>, breakpoints: Vec<f64>) -> Result<Self> {
        let (Some(&first), Some(&last)) = (times.first(), times.last()) else {
            return Err(Error::InvalidProfile("tabulated profile needs samples".into()));
        };
        Self::new(ProfileKind::Tabulated { times, omegas }, first, last, breakpoints)
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.start, self.end)
    }

    /// Declared breakpoints, sorted, strictly inside the domain.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Interior times where `ω` loses smoothness: declared breakpoints plus,
    /// for tabulated data, the interpolation knots (`ω̈` jumps there).
    /// Integrators should end steps on these.
    pub fn smoothness_breaks(&self) -> Vec<f64> {
        let mut out = self.breakpoints.clone();
        if let Some(interp) = &self.interp {
            out.extend(interp.knots().filter(|&k| k > self.start && k < self.end));
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Whether `t` is (to roundoff) one of the declared breakpoints.
    pub fn is_breakpoint(&self, t: f64) -> bool {
        self.breakpoints.iter().any(|&b| (t - b).abs() <= 4.0 * f64::EPSILON * b.abs().max(1.0))
    }

    fn check_domain(&self, t: f64) -> Result<f64> {
        let slack = 1e-12 * (self.end - self.start).max(1.0);
        if t.is_nan() || t < self.start - slack || t > self.end + slack {
            return Err(Error::OutOfDomain { t, start: self.start, end: self.end });
        }
        Ok(t.clamp(self.start, self.end))
    }

    /// Angular frequency `ω(t)`. At a jump of tabulated data this is the right limit.
    pub fn omega(&self, t: f64) -> Result<f64> {
        self.omega_at(t, Side::Both)
    }

    /// `ω(t)` with an explicit one-sided limit.
    pub fn omega_at(&self, t: f64, side: Side) -> Result<f64> {
        let t = self.check_domain(t)?;
        Ok(self.omega_unchecked(t, side))
    }

    /// `ω̇(t)`. Requesting [`Side::Both`] exactly at a declared breakpoint is an error.
    pub fn omega_dot(&self, t: f64, side: Side) -> Result<f64> {
        let t = self.check_domain(t)?;
        if side == Side::Both && self.is_breakpoint(t) {
            return Err(Error::AmbiguousAtBreakpoint { t });
        }
        Ok(self.omega_dot_unchecked(t, side))
    }

    /// Accumulated phase `θ = ∫_{t0}^{t} ω(τ) dτ`, antisymmetric in its arguments.
    pub fn phase_integral(&self, t0: f64, t: f64) -> Result<f64> {
        let t0 = self.check_domain(t0)?;
        let t = self.check_domain(t)?;
        Ok(self.phase_unchecked(t0, t))
    }

    /// Largest `ω` found on a dense sample of the domain.
    pub fn omega_max(&self) -> f64 {
        self.sample_times(POSITIVITY_SAMPLES)
            .map(|t| self.omega_unchecked(t, Side::Left).max(self.omega_unchecked(t, Side::Right)))
            .fold(0.0, f64::max)
    }

    fn sample_times(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let h = (self.end - self.start) / n as f64;
        (0..=n)
            .map(move |k| if k == n { self.end } else { self.start + k as f64 * h })
            .chain(self.breakpoints.iter().copied())
    }

    fn check_positive(&self) -> Result<()> {
        let mut times: Vec<f64> = self.sample_times(POSITIVITY_SAMPLES).collect();
        if let Some(interp) = &self.interp {
            times.extend(interp.knots().filter(|&t| t >= self.start && t <= self.end));
        }
        for t in times {
            for side in [Side::Left, Side::Right] {
                let w = self.omega_unchecked(t, side);
                if !(w > 0.0) || !w.is_finite() {
                    return Err(Error::InvalidProfile(format!("ω must stay positive, found ω({t}) = {w}")));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn omega_unchecked(&self, t: f64, side: Side) -> f64 {
        match self.kind {
            ProfileKind::Constant { omega0 } => omega0,
            ProfileKind::LinearRamp { omega0, slope } => omega0 + slope * t,
            ProfileKind::Sinusoidal { omega0, depth, rate } => omega0 + depth * (rate * t).sin(),
            ProfileKind::TanhQuench { omega_initial, omega_final, center, width } => {
                omega_initial + 0.5 * (omega_final - omega_initial) * (1.0 + ((t - center) / width).tanh())
            }
            ProfileKind::GaussianPulse { omega0, amplitude, center, width } => {
                let x = (t - center) / width;
                omega0 + amplitude * (-0.5 * x * x).exp()
            }
            ProfileKind::Tabulated { .. } => self.interp.as_ref().unwrap().value(t, side),
        }
    }

    pub(crate) fn omega_dot_unchecked(&self, t: f64, side: Side) -> f64 {
        match self.kind {
            ProfileKind::Constant { .. } => 0.0,
            ProfileKind::LinearRamp { slope, .. } => slope,
            ProfileKind::Sinusoidal { depth, rate, .. } => depth * rate * (rate * t).cos(),
            ProfileKind::TanhQuench { omega_initial, omega_final, center, width } => {
                let sech = 1.0 / ((t - center) / width).cosh();
                0.5 * (omega_final - omega_initial) * sech * sech / width
            }
            ProfileKind::GaussianPulse { amplitude, center, width, .. } => {
                let x = (t - center) / width;
                -amplitude * x / width * (-0.5 * x * x).exp()
            }
            ProfileKind::Tabulated { .. } => self.interp.as_ref().unwrap().derivative(t, side),
        }
    }

    pub(crate) fn phase_unchecked(&self, t0: f64, t: f64) -> f64 {
        match self.kind {
            ProfileKind::Constant { omega0 } => omega0 * (t - t0),
            ProfileKind::LinearRamp { omega0, slope } => (t - t0) * (omega0 + 0.5 * slope * (t + t0)),
            ProfileKind::Sinusoidal { omega0, depth, rate } => {
                // cos(a) - cos(b) = -2 sin((a+b)/2) sin((a-b)/2)
                let dcos = -2.0 * (0.5 * rate * (t + t0)).sin() * (0.5 * rate * (t - t0)).sin();
                omega0 * (t - t0) - depth / rate * dcos
            }
            ProfileKind::TanhQuench { omega_initial, omega_final, center, width } => {
                let dw = omega_final - omega_initial;
                let lc = ln_cosh((t - center) / width) - ln_cosh((t0 - center) / width);
                omega_initial * (t - t0) + 0.5 * dw * ((t - t0) + width * lc)
            }
            ProfileKind::GaussianPulse { omega0, amplitude, center, width } => {
                let a = (t0 - center) / (SQRT_2 * width);
                let b = (t - center) / (SQRT_2 * width);
                omega0 * (t - t0) + amplitude * width * FRAC_PI_2.sqrt() * erf_difference(a, b)
            }
            ProfileKind::Tabulated { .. } => {
                let interp = self.interp.as_ref().unwrap();
                interp.primitive(t) - interp.primitive(t0)
            }
        }
    }

    /// Scans `ω` and finite-difference `ω̇` on a dense mesh.
    pub fn validate_admissibility(&self) -> AdmissibilityReport {
        const CELLS: usize = 20_000;
        let mut violations = Vec::new();
        let h = (self.end - self.start) / CELLS as f64;

        let mut max_ratio: f64 = 0.0;
        let mut max_rate: f64 = 0.0;
        for k in 0..=CELLS {
            let t = self.start + k as f64 * h;
            let w = self.omega_unchecked(t, Side::Right);
            if w <= 0.0 && !violations.iter().any(|v| matches!(v, Violation::NonPositive { .. })) {
                violations.push(Violation::NonPositive { t, omega: w });
            }
            let dw = self.omega_dot_unchecked(t, Side::Right).abs();
            max_rate = max_rate.max(dw);
            if w > 0.0 {
                max_ratio = max_ratio.max(dw / (w * w));
            }
        }

        for &b in &self.breakpoints {
            let left = self.omega_unchecked(b, Side::Left);
            let right = self.omega_unchecked(b, Side::Right);
            if (left - right).abs() > 1e-12 * left.abs().max(right.abs()) {
                violations.push(Violation::OmegaJump { t: b, left, right });
            }
        }

        let tol = 1e-6 + 1e-3 * max_rate;
        let omega = |t: f64| self.omega_unchecked(t, Side::Both);
        for (t, jump) in scan_derivative_jumps(omega, self.start, self.end, CELLS, &self.breakpoints, tol) {
            violations.push(Violation::UndeclaredDerivativeJump { t, jump });
        }

        AdmissibilityReport {
            admissible: violations.is_empty(),
            breakpoints: self.breakpoints.clone(),
            violations,
            max_nonadiabaticity: max_ratio,
        }
    }
}

/// Outcome of [`FrequencyProfile::validate_admissibility`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub breakpoints: Vec<f64>,
    pub violations: Vec<Violation>,
    /// `max |ω̇|/ω²` over the mesh; values above 1 mean the law is far from adiabatic.
    pub max_nonadiabaticity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositive {
        t: f64,
        omega: f64,
    },
    /// `ω` itself is discontinuous.
    OmegaJump {
        t: f64,
        left: f64,
        right: f64,
    },
    /// `ω̇` jumps at a time that was not declared as a breakpoint.
    UndeclaredDerivativeJump {
        t: f64,
        jump: f64,
    },
}

/// Finds jumps of the first derivative of `f` away from the `declared` times.
///
/// Compares second-order one-sided difference quotients at every mesh node.
/// Candidates are re-examined on two successively finer local meshes: for a
/// smooth function the mismatch shrinks quadratically and the candidate is
/// dropped, whereas a genuine kink keeps a mismatch of the order of the jump.
pub(crate) fn scan_derivative_jumps(
    f: impl Fn(f64) -> f64,
    start: f64,
    end: f64,
    cells: usize,
    declared: &[f64],
    tol: f64,
) -> Vec<(f64, f64)> {
    let mismatch = |t: f64, h: f64| {
        let left = (3.0 * f(t) - 4.0 * f(t - h) + f(t - 2.0 * h)) / (2.0 * h);
        let right = (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2.0 * h)) / (2.0 * h);
        right - left
    };
    let h = (end - start) / cells as f64;
    let near_declared = |t: f64, reach: f64| declared.iter().any(|&b| (t - b).abs() < reach);

    let mut found: Vec<(f64, f64)> = Vec::new();
    for k in 2..cells.saturating_sub(1) {
        let t = start + k as f64 * h;
        if near_declared(t, 2.5 * h) || found.iter().any(|&(s, _)| (s - t).abs() < 4.0 * h) {
            continue;
        }
        if mismatch(t, h).abs() <= tol {
            continue;
        }
        let mut centre = t;
        let mut step = h;
        let mut confirmed = true;
        let mut jump = 0.0;
        for _ in 0..2 {
            let sub = step / 16.0;
            let mut best = (centre, 0.0_f64);
            let mut s = centre - 2.0 * step;
            while s <= centre + 2.0 * step {
                if s - 2.0 * sub >= start && s + 2.0 * sub <= end && !near_declared(s, 2.5 * sub) {
                    let m = mismatch(s, sub);
                    if m.abs() > best.1.abs() {
                        best = (s, m);
                    }
                }
                s += sub;
            }
            if best.1.abs() <= tol {
                confirmed = false;
                break;
            }
            centre = best.0;
            jump = best.1;
            step = sub;
        }
        if confirmed {
            found.push((centre, jump));
        }
    }
    found
}

fn validate_parameters(kind: &ProfileKind) -> Result<()> {
    let finite = |name: &str, v: f64| {
        if v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidProfile(format!("parameter {name} = {v} is not finite")))
        }
    };
    let positive = |name: &str, v: f64| {
        finite(name, v)?;
        if v > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidProfile(format!("parameter {name} = {v} must be positive")))
        }
    };
    match kind {
        ProfileKind::Constant { omega0 } => finite("omega0", *omega0),
        ProfileKind::LinearRamp { omega0, slope } => {
            finite("omega0", *omega0)?;
            finite("slope", *slope)
        }
        ProfileKind::Sinusoidal { omega0, depth, rate } => {
            finite("omega0", *omega0)?;
            finite("depth", *depth)?;
            positive("rate", *rate)
        }
        ProfileKind::TanhQuench { omega_initial, omega_final, center, width } => {
            finite("omega_initial", *omega_initial)?;
            finite("omega_final", *omega_final)?;
            finite("center", *center)?;
            positive("width", *width)
        }
        ProfileKind::GaussianPulse { omega0, amplitude, center, width } => {
            finite("omega0", *omega0)?;
            finite("amplitude", *amplitude)?;
            finite("center", *center)?;
            positive("width", *width)
        }
        ProfileKind::Tabulated { times, omegas } => {
            if times.len() != omegas.len() {
                return Err(Error::InvalidProfile(format!(
                    "{} sample times but {} frequencies",
                    times.len(),
                    omegas.len()
                )));
            }
            if times.len() < 2 {
                return Err(Error::InvalidProfile("tabulated profile needs at least two samples".into()));
            }
            if times.iter().chain(omegas).any(|v| !v.is_finite()) {
                return Err(Error::InvalidProfile("tabulated samples must be finite".into()));
            }
            if times.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::InvalidProfile("sample times must be non-decreasing".into()));
            }
            if times.windows(3).any(|w| w[0] == w[2]) {
                return Err(Error::InvalidProfile("a sample time may repeat at most twice".into()));
            }
            if times[0] == times[1] || times[times.len() - 1] == times[times.len() - 2] {
                return Err(Error::InvalidProfile("a jump cannot sit at the end of the table".into()));
            }
            Ok(())
        }
    }
}

fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `erf(b) − erf(a)` without cancellation in the far tails.
fn erf_difference(a: f64, b: f64) -> f64 {
    if a > 1.0 && b > 1.0 {
        libm::erfc(a) - libm::erfc(b)
    } else if a < -1.0 && b < -1.0 {
        libm::erfc(-b) - libm::erfc(-a)
    } else {
        libm::erf(b) - libm::erf(a)
    }
}

/// Piecewise cubic Hermite interpolant with PCHIP slopes.
///
/// The table is split into independent pieces at jumps and declared
/// breakpoints; within a piece the interpolant is C¹.
#[derive(Debug, Clone, PartialEq)]
struct PiecewiseHermite {
    pieces: Vec<HermitePiece>,
}

#[derive(Debug, Clone, PartialEq)]
struct HermitePiece {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
    /// Integral from the first knot of the whole table to each knot.
    cumulative: Vec<f64>,
}

impl PiecewiseHermite {
    fn new(times: &[f64], values: &[f64], breakpoints: &[f64]) -> Result<Self> {
        for &b in breakpoints {
            if !times.contains(&b) {
                return Err(Error::InvalidProfile(format!(
                    "breakpoint {b} of a tabulated profile must be one of its sample times"
                )));
            }
        }
        let mut pieces = Vec::new();
        let mut lo = 0;
        let mut offset = 0.0;
        while lo < times.len() - 1 {
            // A piece ends at the next breakpoint knot or at the end of the table.
            let mut hi = lo + 1;
            while hi < times.len() - 1 && !breakpoints.contains(&times[hi]) && times[hi + 1] != times[hi] {
                hi += 1;
            }
            let piece = HermitePiece::new(&times[lo..=hi], &values[lo..=hi], offset);
            offset = *piece.cumulative.last().unwrap();
            pieces.push(piece);
            // Skip over the duplicated knot of a jump.
            lo = if hi + 1 < times.len() && times[hi + 1] == times[hi] { hi + 1 } else { hi };
        }
        Ok(PiecewiseHermite { pieces })
    }

    fn knots(&self) -> impl Iterator<Item = f64> + '_ {
        self.pieces.iter().flat_map(|p| p.x.iter().copied())
    }

    fn piece(&self, t: f64, side: Side) -> &HermitePiece {
        let idx = match side {
            Side::Left => self.pieces.partition_point(|p| p.x[0] < t),
            Side::Both | Side::Right => self.pieces.partition_point(|p| p.x[0] <= t),
        };
        &self.pieces[idx.saturating_sub(1)]
    }

    fn value(&self, t: f64, side: Side) -> f64 {
        self.piece(t, side).value(t)
    }

    fn derivative(&self, t: f64, side: Side) -> f64 {
        self.piece(t, side).derivative(t)
    }

    fn primitive(&self, t: f64) -> f64 {
        self.piece(t, Side::Both).primitive(t)
    }
}

impl HermitePiece {
    fn new(x: &[f64], y: &[f64], offset: f64) -> Self {
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                if delta[k - 1] * delta[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
                }
            }
            d[0] = pchip_endpoint(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = pchip_endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        let mut cumulative = Vec::with_capacity(n);
        cumulative.push(offset);
        for k in 0..n - 1 {
            let area = 0.5 * h[k] * (y[k] + y[k + 1]) + h[k] * h[k] * (d[k] - d[k + 1]) / 12.0;
            cumulative.push(cumulative[k] + area);
        }
        HermitePiece { x: x.to_vec(), y: y.to_vec(), d, cumulative }
    }

    fn interval(&self, t: f64) -> (usize, f64, f64) {
        let k = self.x.partition_point(|&xk| xk <= t).saturating_sub(1).min(self.x.len() - 2);
        let h = self.x[k + 1] - self.x[k];
        (k, h, (t - self.x[k]) / h)
    }

    fn value(&self, t: f64) -> f64 {
        let (k, h, s) = self.interval(t);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.y[k]
            + (s3 - 2.0 * s2 + s) * h * self.d[k]
            + (-2.0 * s3 + 3.0 * s2) * self.y[k + 1]
            + (s3 - s2) * h * self.d[k + 1]
    }

    fn derivative(&self, t: f64) -> f64 {
        let (k, h, s) = self.interval(t);
        let s2 = s * s;
        (6.0 * s2 - 6.0 * s) / h * self.y[k]
            + (3.0 * s2 - 4.0 * s + 1.0) * self.d[k]
            + (-6.0 * s2 + 6.0 * s) / h * self.y[k + 1]
            + (3.0 * s2 - 2.0 * s) * self.d[k + 1]
    }

    fn primitive(&self, t: f64) -> f64 {
        let (k, h, s) = self.interval(t);
        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s3 * s;
        self.cumulative[k]
            + h * (self.y[k] * (0.5 * s4 - s3 + s)
                + h * self.d[k] * (0.25 * s4 - 2.0 * s3 / 3.0 + 0.5 * s2)
                + self.y[k + 1] * (-0.5 * s4 + s3)
                + h * self.d[k + 1] * (0.25 * s4 - s3 / 3.0))
    }
}

/// Shape-preserving three-point end slope.
fn pchip_endpoint(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() || m0 == 0.0 {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}
