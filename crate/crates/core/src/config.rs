//! Run configuration: TOML schema, validation and construction of the
//! model, initial state and stepper settings.

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{DiagnosticsConfig, DEFAULT_SKIP_FRACTION};
use crate::model::{Model, ModelKind, ParamError};
use crate::muskat::{self, MuskatModel, MuskatPhysicalParams, N2bFactor};
use crate::spectral::{SpectralError, TrigPoly};
use crate::state::{SimState, StateError};
use crate::stokes::{self, StokesModel, StokesPhysicalParams};
use crate::timestepper::StepperConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("initial data: {0}")]
    Spectral(#[from] SpectralError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelKind,
    /// Leading factor of the gravity part of the second Muskat nonlinearity.
    #[serde(default)]
    pub n2b_leading_factor: N2bFactor,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalSection {
    pub mu_minus: f64,
    pub mu_plus: f64,
    /// Densities and gravity default to 0, which only capillary Stokes
    /// accepts.
    #[serde(default)]
    pub rho_minus: f64,
    #[serde(default)]
    pub rho_plus: f64,
    #[serde(default)]
    pub gamma_f: f64,
    #[serde(default)]
    pub gamma_h: f64,
    #[serde(default)]
    pub gravity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeansSection {
    pub f: f64,
    pub g: f64,
}

/// Initial perturbation of one film height (zero-mean part only).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialComponent {
    Zero,
    /// `(k, re, im)` entries; each also fixes the conjugate mode `−k`.
    Explicit { modes: Vec<(i64, f64, f64)> },
    /// `amplitude · cos(k x)`.
    SingleMode { amplitude: f64, k: usize },
    /// Random phases with `|û(k)| ∝ k^{−exponent}`, scaled so that the
    /// component's `Ȧ⁰` norm equals `amplitude`.
    RandomDecay {
        seed: u64,
        exponent: f64,
        amplitude: f64,
    },
    /// `Σ_k amplitudes[k−1] cos(k x)`: even data, the periodic extension of
    /// a Neumann problem on `[0, π]`.
    EvenCosine { amplitudes: Vec<f64> },
}

impl InitialComponent {
    /// Largest wavenumber the datum needs.
    pub fn degree(&self) -> usize {
        match self {
            InitialComponent::Zero | InitialComponent::RandomDecay { .. } => 1,
            InitialComponent::Explicit { modes } => modes
                .iter()
                .map(|m| m.0.unsigned_abs() as usize)
                .max()
                .unwrap_or(1),
            InitialComponent::SingleMode { k, .. } => *k,
            InitialComponent::EvenCosine { amplitudes } => amplitudes.len(),
        }
        .max(1)
    }

    pub fn build(&self, bandwidth: usize, seed_override: Option<u64>) -> Result<TrigPoly, ConfigError> {
        let u = match self {
            InitialComponent::Zero => TrigPoly::zeros(bandwidth),
            InitialComponent::Explicit { modes } => {
                if modes.iter().any(|m| m.0 == 0 && (m.1 != 0.0 || m.2 != 0.0)) {
                    return Err(ConfigError::Invalid(
                        "initial perturbations are zero-mean; set the mean in [means]".into(),
                    ));
                }
                TrigPoly::from_modes(bandwidth, modes)?
            }
            InitialComponent::SingleMode { amplitude, k } => {
                if *k == 0 {
                    return Err(ConfigError::Invalid("single_mode requires k >= 1".into()));
                }
                TrigPoly::cosine(bandwidth, *k, *amplitude)?
            }
            InitialComponent::RandomDecay {
                seed,
                exponent,
                amplitude,
            } => random_decay(bandwidth, seed_override.unwrap_or(*seed), *exponent, *amplitude)?,
            InitialComponent::EvenCosine { amplitudes } => {
                let modes: Vec<(i64, f64, f64)> = amplitudes
                    .iter()
                    .enumerate()
                    .map(|(i, a)| (i as i64 + 1, a / 2.0, 0.0))
                    .collect();
                TrigPoly::from_modes(bandwidth, &modes)?
            }
        };
        if !u.is_finite() {
            return Err(ConfigError::Invalid("initial data must be finite".into()));
        }
        Ok(u)
    }
}

/// Random zero-mean polynomial with algebraically decaying spectrum.
pub fn random_decay(
    bandwidth: usize,
    seed: u64,
    exponent: f64,
    amplitude: f64,
) -> Result<TrigPoly, ConfigError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut half = vec![Complex64::new(0.0, 0.0); bandwidth + 1];
    for (k, c) in half.iter_mut().enumerate().skip(1) {
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        let size = rng.gen_range(0.5..1.0) * (k as f64).powf(-exponent);
        *c = Complex64::from_polar(size, phase);
    }
    let u = TrigPoly::from_half_spectrum(half)?;
    let norm = u.wiener_norm(0)?;
    Ok(if norm > 0.0 { u.scale(amplitude / norm) } else { u })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub f: InitialComponent,
    pub g: InitialComponent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateName {
    Smallness,
    WienerDecay,
    SobolevPropagation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSection {
    #[serde(default = "default_require")]
    pub require: Vec<GateName>,
}

fn default_require() -> Vec<GateName> {
    vec![GateName::WienerDecay]
}

impl Default for CheckSection {
    fn default() -> Self {
        Self {
            require: default_require(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuditSection {
    /// Relative slack of the decay envelope.
    pub envelope_tol: f64,
    /// Additive tolerance of the energy-inequality audit.
    pub energy_tol: f64,
    /// Sobolev audit bound as a multiple of the initial value.
    pub sobolev_growth_factor: f64,
    /// Share of the horizon skipped by rate fits.
    pub skip_fraction: f64,
    /// Run the Sobolev-propagation audit (needs the matching gate).
    pub sobolev: bool,
}

impl Default for AuditSection {
    fn default() -> Self {
        Self {
            envelope_tol: 1e-2,
            energy_tol: 1e-3,
            sobolev_growth_factor: 2.0,
            skip_fraction: DEFAULT_SKIP_FRACTION,
            sobolev: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub csv: String,
    pub report: String,
    pub plot_script: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            csv: "series.csv".into(),
            report: "report.toml".into(),
            plot_script: "plot_series.py".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// Dotted path of a numeric config key, e.g. `means.g`.
    pub key: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub axis: Vec<SweepAxis>,
    /// Also integrate each grid point and fit its decay rate.
    #[serde(default)]
    pub run: bool,
    #[serde(default = "default_sweep_csv")]
    pub csv: String,
}

fn default_sweep_csv() -> String {
    "sweep.csv".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceSection {
    /// Number of time-step levels `dt, dt/2, …`.
    pub levels: u32,
    /// Also compare bandwidth `K` against `2K`.
    pub refine_bandwidth: bool,
    pub csv: String,
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        Self {
            levels: 3,
            refine_bandwidth: true,
            csv: "convergence.csv".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub physical: PhysicalSection,
    pub means: MeansSection,
    pub initial: InitialSection,
    #[serde(default)]
    pub stepper: Option<StepperConfig>,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub check: CheckSection,
    #[serde(default)]
    pub audit: AuditSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub convergence: ConvergenceSection,
}

/// Everything needed to evaluate certificates and integrate.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub model: Model,
    pub initial: SimState,
    /// Factor converting physical time into the solver's rescaled time.
    pub time_scale: f64,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_table(table: toml::Table) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::Value::Table(table).try_into()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, toml::Table), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let table: toml::Table = text.parse()?;
        let cfg = Self::from_table(table.clone())?;
        Ok((cfg, table))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(st) = &self.stepper {
            st.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        self.diagnostics.validate().map_err(ConfigError::Invalid)?;
        if let Some(sweep) = &self.sweep {
            for axis in &sweep.axis {
                if axis.values.is_empty() {
                    return Err(ConfigError::Invalid(format!(
                        "sweep axis `{}` has no values",
                        axis.key
                    )));
                }
            }
        }
        if self.convergence.levels < 2 {
            return Err(ConfigError::Invalid("convergence.levels must be at least 2".into()));
        }
        let a = &self.audit;
        for (name, v) in [
            ("audit.envelope_tol", a.envelope_tol),
            ("audit.energy_tol", a.energy_tol),
            ("audit.sobolev_growth_factor", a.sobolev_growth_factor),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ConfigError::Invalid(format!("{name} must be non-negative")));
            }
        }
        if !(0.0..1.0).contains(&a.skip_fraction) {
            return Err(ConfigError::Invalid("audit.skip_fraction must lie in [0, 1)".into()));
        }
        Ok(())
    }

    /// Bandwidth of the initial state: the stepper's, or the smallest one
    /// holding the initial data when no stepper is configured.
    pub fn bandwidth(&self) -> usize {
        match &self.stepper {
            Some(st) => st.bandwidth,
            None => self.initial.f.degree().max(self.initial.g.degree()),
        }
    }

    pub fn stepper(&self) -> Result<&StepperConfig, ConfigError> {
        self.stepper
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid("this command needs a [stepper] section".into()))
    }

    pub fn build_model(&self) -> Result<(Model, f64), ConfigError> {
        let p = &self.physical;
        let kind = self.model.kind;
        if let Some(variant) = kind.muskat_variant() {
            let params = MuskatPhysicalParams {
                mu_minus: p.mu_minus,
                mu_plus: p.mu_plus,
                rho_minus: p.rho_minus,
                rho_plus: p.rho_plus,
                gamma_f: p.gamma_f,
                gamma_h: p.gamma_h,
                gravity: p.gravity,
            };
            let constants = muskat::reduce_params(&params, variant)?;
            let model = MuskatModel {
                constants,
                n2b_factor: self.model.n2b_leading_factor,
            };
            Ok((Model::Muskat(model), params.time_scale()))
        } else {
            let drive = kind.stokes_drive().expect("non-Muskat kinds are Stokes");
            let params = StokesPhysicalParams {
                mu_minus: p.mu_minus,
                mu_plus: p.mu_plus,
                rho_minus: p.rho_minus,
                rho_plus: p.rho_plus,
                gamma_f: p.gamma_f,
                gamma_h: p.gamma_h,
                gravity: p.gravity,
                drive,
            };
            let constants = stokes::reduce_params(&params)?;
            Ok((Model::Stokes(StokesModel::new(constants)), constants.q))
        }
    }

    pub fn build(&self, seed_override: Option<u64>) -> Result<Experiment, ConfigError> {
        let (model, time_scale) = self.build_model()?;
        let k = self.bandwidth();
        for (name, comp) in [("f", &self.initial.f), ("g", &self.initial.g)] {
            if comp.degree() > k && !matches!(comp, InitialComponent::Zero) {
                return Err(ConfigError::Invalid(format!(
                    "initial.{name} needs bandwidth {} but the run uses {k}",
                    comp.degree()
                )));
            }
        }
        // Distinct streams for the two components when both are random.
        let seed_f = seed_override;
        let seed_g = seed_override.map(|s| s.wrapping_add(1));
        let fbar = self.initial.f.build(k, seed_f)?;
        let gbar = self.initial.g.build(k, seed_g)?;
        let initial = SimState::new(fbar, gbar, self.means.f, self.means.g)?;
        Ok(Experiment {
            model,
            initial,
            time_scale,
        })
    }
}

/// Sets a dotted numeric key (e.g. `physical.rho_minus`) in a TOML table.
/// Integer-typed targets receive an integer when the value is integral.
pub fn set_dotted(table: &mut toml::Table, key: &str, value: f64) -> Result<(), ConfigError> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts
        .pop()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| ConfigError::Invalid(format!("empty sweep key `{key}`")))?;
    let mut cur = table;
    for p in parts {
        cur = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| ConfigError::Invalid(format!("sweep key `{key}`: `{p}` is not a section")))?;
    }
    let new = match cur.get(last) {
        Some(toml::Value::Integer(_)) if value.fract() == 0.0 => toml::Value::Integer(value as i64),
        Some(toml::Value::Integer(_)) => {
            return Err(ConfigError::Invalid(format!("sweep key `{key}` takes integers")))
        }
        Some(toml::Value::Float(_)) | None => toml::Value::Float(value),
        Some(_) => return Err(ConfigError::Invalid(format!("sweep key `{key}` is not numeric"))),
    };
    cur.insert(last.to_string(), new);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
[model]
kind = "muskat_capillary"

[physical]
mu_minus = 1.0
mu_plus = 1.0
rho_minus = 2.0
rho_plus = 1.0
gamma_f = 1.0
gamma_h = 1.0
gravity = 1.0

[means]
f = 1.0
g = 1.5

[initial.f]
kind = "single_mode"
amplitude = 0.01
k = 1

[initial.g]
kind = "zero"

[stepper]
dt = 1e-3
bandwidth = 8
t_end = 0.1
sample_every = 10
"#;

    #[test]
    fn parses_example() {
        let cfg = RunConfig::from_toml_str(EXAMPLE).unwrap();
        let exp = cfg.build(None).unwrap();
        assert!((exp.initial.e0() - 0.01).abs() < 1e-17);
        assert_eq!(exp.initial.bandwidth(), 8);
        assert_eq!(exp.model.kind(), ModelKind::MuskatCapillary);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = EXAMPLE.replace("gravity = 1.0", "gravity = 1.0\ngravty = 2.0");
        assert!(matches!(RunConfig::from_toml_str(&text), Err(ConfigError::Parse(_))));
        let text = EXAMPLE.replace("sample_every = 10", "sample_every = 10\nsubsteps = 2");
        assert!(RunConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn even_cosine_and_explicit_agree() {
        let a = InitialComponent::EvenCosine {
            amplitudes: vec![0.0, 0.2],
        }
        .build(4, None)
        .unwrap();
        let b = InitialComponent::Explicit {
            modes: vec![(2, 0.1, 0.0)],
        }
        .build(4, None)
        .unwrap();
        assert_eq!(a, b);
        assert!(InitialComponent::Explicit {
            modes: vec![(0, 1.0, 0.0)]
        }
        .build(4, None)
        .is_err());
    }

    #[test]
    fn random_decay_is_seeded() {
        let a = random_decay(16, 7, 2.0, 0.05).unwrap();
        let b = random_decay(16, 7, 2.0, 0.05).unwrap();
        let c = random_decay(16, 8, 2.0, 0.05).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!((a.wiener_norm(0).unwrap() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn dotted_keys() {
        let mut t: toml::Table = EXAMPLE.parse().unwrap();
        set_dotted(&mut t, "means.g", 0.5).unwrap();
        set_dotted(&mut t, "stepper.bandwidth", 16.0).unwrap();
        assert!(set_dotted(&mut t, "stepper.bandwidth", 1.5).is_err());
        let cfg = RunConfig::from_table(t).unwrap();
        assert_eq!(cfg.means.g, 0.5);
        assert_eq!(cfg.bandwidth(), 16);
    }
}
