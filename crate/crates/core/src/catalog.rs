//! Bundled frequency profiles, all on `[0, 10]`.

use crate::profiles::FrequencyProfile;

pub const DOMAIN: (f64, f64) = (0.0, 10.0);

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub profile: FrequencyProfile,
}

/// Every bundled profile in a fixed order.
pub fn bundled() -> Vec<CatalogEntry> {
    let (a, b) = DOMAIN;
    let entry = |name, summary, profile: crate::Result<FrequencyProfile>| CatalogEntry {
        name,
        summary,
        profile: profile.expect("bundled profile is valid"),
    };
    vec![
        entry("constant", "ω = 1", FrequencyProfile::constant(1.0, a, b)),
        entry("ramp", "ω = 1 + 0.3t", FrequencyProfile::linear_ramp(1.0, 0.3, a, b)),
        entry("sinusoidal", "ω = 1 + 0.5·sin(3t)", FrequencyProfile::sinusoidal(1.0, 0.5, 3.0, a, b)),
        entry(
            "tanh_quench",
            "ω from 1 to 2 around t = 0.5 with width 0.1",
            FrequencyProfile::tanh_quench(1.0, 2.0, 0.5, 0.1, a, b),
        ),
        entry(
            "gaussian_pulse",
            "ω = 1 + 1.5·exp(−(t − 5)²/(2·0.2²))",
            FrequencyProfile::gaussian_pulse(1.0, 1.5, 5.0, 0.2, a, b),
        ),
        entry(
            "kinked_table",
            "piecewise linear, 1 → 1.5 on [0, 2] then 1.5 → 1.1 on [2, 10], kink at t = 2",
            kinked_table(),
        ),
    ]
}

pub fn names() -> Vec<&'static str> {
    bundled().into_iter().map(|e| e.name).collect()
}

pub fn by_name(name: &str) -> Option<FrequencyProfile> {
    bundled().into_iter().find(|e| e.name == name).map(|e| e.profile)
}

fn kinked_table() -> crate::Result<FrequencyProfile> {
    let times: Vec<f64> = (0..=40).map(|k| 0.25 * k as f64).collect();
    let omegas = times.iter().map(|&t| if t <= 2.0 { 1.0 + 0.25 * t } else { 1.5 - 0.05 * (t - 2.0) }).collect();
    FrequencyProfile::tabulated(times, omegas, vec![2.0])
}
