//! Simulation configuration: TOML in, validated [`SimulationConfig`] out.

use std::path::Path;

use serde::{Deserialize, Serialize};
use tdho::catalog;
use tdho::integrator::Tolerance;
use tdho::profiles::FrequencyProfile;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.to_string(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    /// Times at which `evolve` and `verify` sample states.
    #[serde(default)]
    pub checkpoints: Vec<f64>,
    /// Number of uniform time samples in amplitude and structure tables.
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub profile: ProfileSpec,
    #[serde(default)]
    pub tolerance: ToleranceSpec,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub initial_state: InitialStateSpec,
    #[serde(default)]
    pub amplitude: AmplitudeSpec,
    #[serde(default)]
    pub kernel: KernelSpec,
    #[serde(default)]
    pub evolve: EvolveSpec,
}

fn one() -> f64 {
    1.0
}

fn default_output_dir() -> String {
    "output".into()
}

fn default_samples() -> usize {
    201
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant {
        omega0: f64,
    },
    LinearRamp {
        omega0: f64,
        slope: f64,
    },
    #[serde(rename = "sinusoidal_modulation")]
    Sinusoidal {
        omega0: f64,
        depth: f64,
        rate: f64,
    },
    TanhQuench {
        omega_initial: f64,
        omega_final: f64,
        center: f64,
        width: f64,
    },
    GaussianPulse {
        omega0: f64,
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// Samples given inline or as a two-column CSV (`t,omega`) relative to the config file.
    Tabulated {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        csv: Option<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        times: Vec<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        omegas: Vec<f64>,
        #[serde(default)]
        breakpoints: Vec<f64>,
    },
    /// A profile from the bundled catalog.
    Bundled {
        name: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceSpec {
    pub rel: f64,
    pub abs: f64,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        ToleranceSpec { rel: 1e-10, abs: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { x_min: -12.0, x_max: 12.0, n: 2048 }
    }
}

/// Gaussian initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialStateSpec {
    pub center: f64,
    pub momentum: f64,
    pub sigma: f64,
}

impl Default for InitialStateSpec {
    fn default() -> Self {
        InitialStateSpec { center: 0.0, momentum: 0.0, sigma: 1.0 }
    }
}

/// Initial amplitude data as `[re, im]` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmplitudeSpec {
    pub a0: [f64; 2],
    pub adot0: [f64; 2],
}

impl Default for AmplitudeSpec {
    fn default() -> Self {
        AmplitudeSpec { a0: [1.0, 0.0], adot0: [0.0, 0.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSpec {
    pub q: Vec<f64>,
    pub q0: Vec<f64>,
    /// Evaluation times; empty means the checkpoints, or `t1` when there are none.
    pub times: Vec<f64>,
    pub caustic_epsilon: f64,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec {
            q: vec![-1.0, 0.0, 1.0],
            q0: vec![-1.0, 0.0, 1.0],
            times: Vec::new(),
            caustic_epsilon: tdho::structure::DEFAULT_CAUSTIC_EPSILON,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveSpec {
    /// Crank–Nicolson step; defaults to `0.001/ω_max`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Also run the Crank–Nicolson reference and report differences.
    pub oracle: bool,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<SimulationConfig, ConfigError> {
    let config: SimulationConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<SimulationConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_config(&text)
}

pub fn serialize_config(config: &SimulationConfig) -> String {
    toml::to_string(config).expect("configuration is always representable as TOML")
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl SimulationConfig {
    /// Defaults around a bundled profile over the catalog domain.
    pub fn for_bundled(name: &str) -> Result<Self, ConfigError> {
        let mut config = SimulationConfig {
            t0: catalog::DOMAIN.0,
            t1: catalog::DOMAIN.1,
            mass: 1.0,
            hbar: 1.0,
            output_dir: default_output_dir(),
            checkpoints: Vec::new(),
            samples: default_samples(),
            profile: ProfileSpec::Bundled { name: name.to_string() },
            tolerance: ToleranceSpec::default(),
            grid: GridConfig::default(),
            initial_state: InitialStateSpec::default(),
            amplitude: AmplitudeSpec::default(),
            kernel: KernelSpec::default(),
            evolve: EvolveSpec::default(),
        };
        config.checkpoints = (1..=4).map(|k| config.t1 * k as f64 / 4.0).collect();
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.t0.is_finite() {
            return Err(invalid("t0", "must be finite"));
        }
        if !(self.t1.is_finite() && self.t1 > self.t0) {
            return Err(invalid("t1", format!("must be greater than t0 = {}, got {}", self.t0, self.t1)));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(invalid("mass", "must be positive"));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(invalid("hbar", "must be positive"));
        }
        if let Some(&c) = self.checkpoints.iter().find(|&&c| !(c >= self.t0 && c <= self.t1)) {
            return Err(invalid("checkpoints", format!("{c} lies outside [{}, {}]", self.t0, self.t1)));
        }
        if self.checkpoints.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("checkpoints", "must be in increasing order"));
        }
        if self.samples < 2 {
            return Err(invalid("samples", "need at least 2"));
        }
        if !(self.tolerance.rel > 0.0) {
            return Err(invalid("tolerance.rel", "must be positive"));
        }
        if !(self.tolerance.abs > 0.0) {
            return Err(invalid("tolerance.abs", "must be positive"));
        }
        if !(self.grid.x_max > self.grid.x_min) {
            return Err(invalid("grid.x_max", "must exceed grid.x_min"));
        }
        if self.grid.n < 4 {
            return Err(invalid("grid.n", "need at least 4 points"));
        }
        if !(self.initial_state.sigma > 0.0) {
            return Err(invalid("initial_state.sigma", "must be positive"));
        }
        if self.kernel.q.is_empty() {
            return Err(invalid("kernel.q", "must not be empty"));
        }
        if self.kernel.q0.is_empty() {
            return Err(invalid("kernel.q0", "must not be empty"));
        }
        if let Some(&t) = self.kernel.times.iter().find(|&&t| !(t >= self.t0 && t <= self.t1)) {
            return Err(invalid("kernel.times", format!("{t} lies outside [{}, {}]", self.t0, self.t1)));
        }
        if !(self.kernel.caustic_epsilon > 0.0) {
            return Err(invalid("kernel.caustic_epsilon", "must be positive"));
        }
        if let Some(dt) = self.evolve.dt {
            if !(dt > 0.0) {
                return Err(invalid("evolve.dt", "must be positive"));
            }
        }
        match &self.profile {
            ProfileSpec::Bundled { name } if catalog::by_name(name).is_none() => {
                return Err(invalid(
                    "profile.name",
                    format!("unknown bundled profile {name:?}; available: {}", catalog::names().join(", ")),
                ));
            }
            ProfileSpec::Tabulated { csv: None, times, .. } if times.is_empty() => {
                return Err(invalid("profile", "tabulated profile needs `csv` or `times`/`omegas`"));
            }
            ProfileSpec::Tabulated { csv: Some(_), times, omegas, .. } if !times.is_empty() || !omegas.is_empty() => {
                return Err(invalid("profile", "give either `csv` or inline `times`/`omegas`, not both"));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn tolerance(&self) -> Result<Tolerance, ConfigError> {
        Tolerance::new(self.tolerance.rel, self.tolerance.abs).map_err(|e| invalid("tolerance", e.to_string()))
    }

    /// Builds the profile; `base` resolves a relative CSV path.
    pub fn build_profile(&self, base: &Path) -> Result<FrequencyProfile, ConfigError> {
        let (a, b) = (self.t0, self.t1);
        let built = match &self.profile {
            ProfileSpec::Constant { omega0 } => FrequencyProfile::constant(*omega0, a, b),
            ProfileSpec::LinearRamp { omega0, slope } => FrequencyProfile::linear_ramp(*omega0, *slope, a, b),
            ProfileSpec::Sinusoidal { omega0, depth, rate } => {
                FrequencyProfile::sinusoidal(*omega0, *depth, *rate, a, b)
            }
            ProfileSpec::TanhQuench { omega_initial, omega_final, center, width } => {
                FrequencyProfile::tanh_quench(*omega_initial, *omega_final, *center, *width, a, b)
            }
            ProfileSpec::GaussianPulse { omega0, amplitude, center, width } => {
                FrequencyProfile::gaussian_pulse(*omega0, *amplitude, *center, *width, a, b)
            }
            ProfileSpec::Tabulated { csv, times, omegas, breakpoints } => {
                let (times, omegas) = match csv {
                    Some(path) => read_table(&base.join(path))?,
                    None => (times.clone(), omegas.clone()),
                };
                FrequencyProfile::tabulated(times, omegas, breakpoints.clone())
            }
            ProfileSpec::Bundled { name } => Ok(catalog::by_name(name).expect("validated")),
        }
        .map_err(|e| invalid("profile", e.to_string()))?;
        let (start, end) = built.domain();
        if self.t0 < start {
            return Err(invalid("t0", format!("{} precedes the profile domain start {start}", self.t0)));
        }
        if self.t1 > end {
            return Err(invalid("t1", format!("{} exceeds the profile domain end {end}", self.t1)));
        }
        Ok(built)
    }
}

fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>), ConfigError> {
    let io = |message: String| ConfigError::Io { path: path.display().to_string(), message };
    let mut reader = csv::Reader::from_path(path).map_err(|e| io(e.to_string()))?;
    let (mut times, mut omegas) = (Vec::new(), Vec::new());
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| io(e.to_string()))?;
        let field = |i: usize| -> Result<f64, ConfigError> {
            record
                .get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| io(format!("row {}: expected two numbers `t,omega`", row + 2)))
        };
        times.push(field(0)?);
        omegas.push(field(1)?);
    }
    Ok((times, omegas))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "t1 = 5.0\n[profile]\nkind = \"constant\"\nomega0 = 1.0\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.t0, 0.0);
        assert_eq!((c.mass, c.hbar), (1.0, 1.0));
        assert_eq!(c.tolerance, ToleranceSpec { rel: 1e-10, abs: 1e-12 });
        assert_eq!(c.grid.n, 2048);
        assert_eq!(c.samples, 201);
    }

    #[test]
    fn sections_may_be_partial() {
        let c = parse_config(&format!("{MINIMAL}[grid]\nn = 512\n[tolerance]\nrel = 1e-8\n")).unwrap();
        assert_eq!(c.grid, GridConfig { n: 512, ..GridConfig::default() });
        assert_eq!(c.tolerance.abs, 1e-12);
        assert!(parse_config(&format!("{MINIMAL}[grid]\npoints = 512\n")).is_err());
    }

    #[test]
    fn integer_literals_are_accepted() {
        let c = parse_config("t0 = 0\nt1 = 3\n[profile]\nkind = \"constant\"\nomega0 = 2\n").unwrap();
        assert_eq!(c.t1, 3.0);
    }

    #[test]
    fn reversed_span_names_t1() {
        let err = parse_config("t0 = 2.0\nt1 = 1.0\n[profile]\nkind = \"constant\"\nomega0 = 1.0\n").unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { field, .. } if field == "t1"), "{err}");
        assert!(err.to_string().contains("t1"));
    }

    #[test]
    fn unknown_key_is_rejected_with_line() {
        let err =
            parse_config("t1 = 5.0\nomega_max = 3.0\n[profile]\nkind = \"constant\"\nomega0 = 1.0\n").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("omega_max"), "{text}");
        assert!(matches!(err, ConfigError::Parse { line: Some(2), .. }), "{text}");
        let err = parse_config("t1 = 5.0\n[profile]\nkind = \"constant\"\nomega0 = 1.0\nslope = 2.0\n").unwrap_err();
        assert!(err.to_string().contains("slope"));
    }

    #[test]
    fn round_trip() {
        let text = r#"
            t0 = 0.5
            t1 = 4.25
            mass = 2.0
            checkpoints = [1.0, 2.0, 4.0]
            [profile]
            kind = "tabulated"
            times = [0.0, 1.0, 2.0, 5.0]
            omegas = [1.0, 1.5, 1.2, 1.1]
            breakpoints = [2.0]
            [tolerance]
            rel = 1e-9
            abs = 1e-13
            [evolve]
            dt = 0.0005
            oracle = true
        "#;
        let c = parse_config(text).unwrap();
        assert_eq!(parse_config(&serialize_config(&c)).unwrap(), c);
        let b = SimulationConfig::for_bundled("tanh_quench").unwrap();
        assert_eq!(parse_config(&serialize_config(&b)).unwrap(), b);
    }

    #[test]
    fn profile_domain_must_cover_span() {
        let c = parse_config("t1 = 12.0\n[profile]\nkind = \"bundled\"\nname = \"ramp\"\n").unwrap();
        let err = c.build_profile(Path::new(".")).unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref field, .. } if field == "t1"));
        let err = parse_config("t1 = 1.0\n[profile]\nkind = \"bundled\"\nname = \"nope\"\n").unwrap_err();
        assert!(err.to_string().contains("constant"));
    }
}
