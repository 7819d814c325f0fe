//! Experiment configuration: a single TOML file drives every run.
//!
//! Every key has a default except the seed, which must be given explicitly
//! in the file or on the command line; unknown keys are rejected by name
//! rather than ignored, so a typo cannot silently fall back to a default.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certifier::search::{SearchFamily, SearchSpec, SetFamily};
use crate::certifier::suites::{BodyKind, ClassicalSpec, NegativePSpec, SuiteSpec};
use crate::measures::{MeasureSpec, SetSpec};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("seed is required: set `seed` in the config file or pass --seed")]
    MissingSeed,
    #[error("config field `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("config pins command `{expected}` but `{got}` was invoked")]
    CommandMismatch { expected: String, got: String },
}

/// The run modes the binary dispatches on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyTheorem1,
    VerifyCw,
    VerifyClassical,
    Tightness,
    SearchExtremal,
    FitConstant,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::VerifyTheorem1,
        Command::VerifyCw,
        Command::VerifyClassical,
        Command::Tightness,
        Command::SearchExtremal,
        Command::FitConstant,
    ];

    pub fn from_label(label: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.label() == label)
    }

    pub fn label(self) -> &'static str {
        match self {
            Command::VerifyTheorem1 => "verify-theorem1",
            Command::VerifyCw => "verify-cw",
            Command::VerifyClassical => "verify-classical",
            Command::Tightness => "tightness",
            Command::SearchExtremal => "search-extremal",
            Command::FitConstant => "fit-constant",
        }
    }
}

impl std::fmt::Display for Command {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Report serialization formats. CSV is write-only; JSON round-trips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

fn default_c() -> f64 {
    4.0
}

fn default_r() -> f64 {
    4.0
}

fn default_confidence() -> f64 {
    0.99
}

/// Instance grid for the restricted-norm and level-set suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub dims: Vec<usize>,
    pub degrees: Vec<usize>,
    pub exponents: Vec<f64>,
    pub bodies: Vec<BodyKind>,
    pub polys_per_cell: usize,
    /// Level-set thresholds, as multiples of the estimated p-norm.
    pub thresholds: Vec<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        let s = SuiteSpec::default();
        GridSection {
            dims: s.dims,
            degrees: s.degrees,
            exponents: s.exponents,
            bodies: s.bodies,
            polys_per_cell: s.polys_per_cell,
            thresholds: s.thresholds,
        }
    }
}

/// Sample and iteration budgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetSection {
    /// Monte-Carlo cloud size per (body, dimension) cell.
    pub samples: usize,
    /// Separate cloud used to place quantile cuts.
    pub calibration_samples: usize,
    /// Hill-climb iterations per restart (search command).
    pub iterations: usize,
    pub restarts: usize,
    /// Cloud size for the search objective.
    pub search_samples: usize,
}

impl Default for BudgetSection {
    fn default() -> Self {
        BudgetSection {
            samples: 100_000,
            calibration_samples: 16_384,
            iterations: 60,
            restarts: 2,
            search_samples: 20_000,
        }
    }
}

/// Restriction-set family of the suites: halfspace cuts and quadratic
/// sublevel cuts placed at calibrated measure quantiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SetSection {
    pub halfspace_quantiles: Vec<f64>,
    pub sublevel_quantiles: Vec<f64>,
}

impl Default for SetSection {
    fn default() -> Self {
        let s = SuiteSpec::default();
        SetSection {
            halfspace_quantiles: s.halfspace_quantiles,
            sublevel_quantiles: s.sublevel_quantiles,
        }
    }
}

/// Budget for the sup-norm suite over subinterval unions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassicalSection {
    pub scalar_instances: usize,
    pub vector_instances: usize,
    pub trig_instances: usize,
    pub max_degree: usize,
    pub max_components: usize,
    /// Base of the sup-norm constant for the trigonometric class.
    pub trig_base: f64,
    pub min_fraction: f64,
    pub max_subintervals: usize,
}

impl Default for ClassicalSection {
    fn default() -> Self {
        let s = ClassicalSpec::default();
        ClassicalSection {
            scalar_instances: s.scalar_instances,
            vector_instances: s.vector_instances,
            trig_instances: s.trig_instances,
            max_degree: s.max_degree,
            max_components: s.max_components,
            trig_base: s.trig_base,
            min_fraction: s.min_fraction,
            max_subintervals: s.max_subintervals,
        }
    }
}

/// Grid for the exact monomial family t^d on the exponential law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TightnessSection {
    pub degrees: Vec<u32>,
    pub epsilons: Vec<f64>,
}

impl Default for TightnessSection {
    fn default() -> Self {
        TightnessSection {
            degrees: (1..=10).collect(),
            epsilons: vec![0.1, 0.5, 1.0],
        }
    }
}

/// Extremal-ratio search setup. At most one of `window_length` and
/// `set_intervals` selects the restriction-set family; with neither,
/// the search runs against the fixed set [0, 0.5].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchSection {
    /// "monomials" or "dense".
    pub family: String,
    /// Dense family: ambient dimension and degree.
    pub n: usize,
    pub d: usize,
    /// Monomial family: largest exponent enumerated.
    pub d_max: usize,
    /// "box", "ball", "simplex", "gaussian", "exponential", or "interval".
    pub measure: String,
    pub measure_dim: usize,
    /// Endpoints when `measure = "interval"`.
    pub interval: Option<(f64, f64)>,
    /// Sliding-window set family: window length.
    pub window_length: Option<f64>,
    /// Fixed set family: union of closed intervals.
    pub set_intervals: Option<Vec<(f64, f64)>>,
    pub p: f64,
    /// Initial perturbation scale of the hill climb.
    pub step: f64,
    /// Geometric decay of the scale per iteration.
    pub decay: f64,
}

impl Default for SearchSection {
    fn default() -> Self {
        SearchSection {
            family: "monomials".into(),
            n: 1,
            d: 4,
            d_max: 6,
            measure: "exponential".into(),
            measure_dim: 1,
            interval: None,
            window_length: None,
            set_intervals: None,
            p: 1.0,
            step: 0.5,
            decay: 0.9,
        }
    }
}

/// Everything a run needs, as read from disk plus command-line overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Optional pin: when present, the invoked subcommand must match.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Constant plugged into the restricted-norm and level-set bounds.
    pub c: f64,
    /// Class parameter of the sup-norm bounds: polynomial classes use
    /// base `r`, so the certified ratio constant is (r/λ)^d.
    pub r: f64,
    pub confidence: f64,
    pub fixed_clock: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<ReportFormat>,
    pub grid: GridSection,
    pub budgets: BudgetSection,
    pub sets: SetSection,
    pub classical: ClassicalSection,
    pub tightness: TightnessSection,
    pub search: SearchSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            command: None,
            seed: None,
            c: default_c(),
            r: default_r(),
            confidence: default_confidence(),
            fixed_clock: false,
            out: None,
            format: None,
            grid: GridSection::default(),
            budgets: BudgetSection::default(),
            sets: SetSection::default(),
            classical: ClassicalSection::default(),
            tightness: TightnessSection::default(),
            search: SearchSection::default(),
        }
    }
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), message: message.into() }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), source: e })?;
        ExperimentConfig::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }

    /// Full validation for a given run mode. Checks the seed, the shared
    /// constants, and whichever sections the mode consumes.
    pub fn validate_for(&self, command: Command) -> Result<(), ConfigError> {
        if let Some(pinned) = self.command {
            if pinned != command {
                return Err(ConfigError::CommandMismatch {
                    expected: pinned.label().into(),
                    got: command.label().into(),
                });
            }
        }
        if self.seed.is_none() {
            return Err(ConfigError::MissingSeed);
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(invalid("c", format!("must be finite and positive, got {}", self.c)));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(invalid("r", format!("must be finite and positive, got {}", self.r)));
        }
        if !(self.confidence > 0.5 && self.confidence < 1.0) {
            return Err(invalid(
                "confidence",
                format!("must lie in (0.5, 1), got {}", self.confidence),
            ));
        }
        self.validate_grid()?;
        match command {
            Command::VerifyTheorem1 | Command::VerifyCw | Command::FitConstant => {
                self.suite_spec().map(|_| ())
            }
            Command::VerifyClassical => self.classical_spec().map(|_| ()),
            Command::Tightness => self.validate_tightness(),
            Command::SearchExtremal => self.search_spec().map(|_| ()),
        }
    }

    /// Exponent admissibility against the degree grid: every p must lie
    /// in (-1/d, 0) ∪ (0, ∞) for every degree d it will be paired with.
    fn validate_grid(&self) -> Result<(), ConfigError> {
        for &p in &self.grid.exponents {
            if !p.is_finite() || p == 0.0 {
                return Err(invalid(
                    "grid.exponents",
                    format!("p must be finite and nonzero, got {p}"),
                ));
            }
            if p < 0.0 {
                for &d in &self.grid.degrees {
                    if d >= 1 && p <= -1.0 / (d as f64) {
                        return Err(invalid(
                            "grid.exponents",
                            format!(
                                "p = {p} with d = {d} lies outside (-1/{d}, 0) ∪ (0, ∞)"
                            ),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn validate_tightness(&self) -> Result<(), ConfigError> {
        if self.tightness.degrees.is_empty() {
            return Err(invalid("tightness.degrees", "must be non-empty"));
        }
        if self.tightness.degrees.iter().any(|&d| d == 0 || d > 150) {
            return Err(invalid("tightness.degrees", "degrees must lie in 1..=150"));
        }
        if self.tightness.epsilons.is_empty()
            || self.tightness.epsilons.iter().any(|&e| !(e > 0.0) || !e.is_finite())
        {
            return Err(invalid("tightness.epsilons", "must be non-empty, finite, positive"));
        }
        Ok(())
    }

    fn seed_or_err(&self) -> Result<u64, ConfigError> {
        self.seed.ok_or(ConfigError::MissingSeed)
    }

    /// Assemble the restricted-norm / level-set suite from the grid,
    /// budget, and set sections. The suites themselves only accept p > 0.
    pub fn suite_spec(&self) -> Result<SuiteSpec, ConfigError> {
        if let Some(&p) = self.grid.exponents.iter().find(|&&p| p <= 0.0) {
            return Err(invalid(
                "grid.exponents",
                format!("restricted-norm suites need p > 0, got {p}"),
            ));
        }
        let spec = SuiteSpec {
            dims: self.grid.dims.clone(),
            degrees: self.grid.degrees.clone(),
            exponents: self.grid.exponents.clone(),
            bodies: self.grid.bodies.clone(),
            polys_per_cell: self.grid.polys_per_cell,
            samples: self.budgets.samples,
            calibration_samples: self.budgets.calibration_samples,
            c: self.c,
            confidence: self.confidence,
            seed: self.seed_or_err()?,
            fixed_clock: self.fixed_clock,
            halfspace_quantiles: self.sets.halfspace_quantiles.clone(),
            sublevel_quantiles: self.sets.sublevel_quantiles.clone(),
            thresholds: self.grid.thresholds.clone(),
        };
        spec.validate().map_err(|e| invalid("grid", e.to_string()))?;
        Ok(spec)
    }

    pub fn classical_spec(&self) -> Result<ClassicalSpec, ConfigError> {
        let spec = ClassicalSpec {
            scalar_instances: self.classical.scalar_instances,
            vector_instances: self.classical.vector_instances,
            trig_instances: self.classical.trig_instances,
            max_degree: self.classical.max_degree,
            max_components: self.classical.max_components,
            poly_base: self.r,
            trig_base: self.classical.trig_base,
            min_fraction: self.classical.min_fraction,
            max_subintervals: self.classical.max_subintervals,
            seed: self.seed_or_err()?,
            fixed_clock: self.fixed_clock,
        };
        spec.validate().map_err(|e| invalid("classical", e.to_string()))?;
        Ok(spec)
    }

    pub fn negative_spec(&self) -> Result<NegativePSpec, ConfigError> {
        let spec = NegativePSpec {
            confidence: self.confidence,
            seed: self.seed_or_err()?,
            fixed_clock: self.fixed_clock,
            ..NegativePSpec::default()
        };
        spec.validate().map_err(|e| invalid("negative", e.to_string()))?;
        Ok(spec)
    }

    fn search_measure(&self) -> Result<MeasureSpec, ConfigError> {
        let n = self.search.measure_dim;
        let built = match self.search.measure.as_str() {
            "box" => MeasureSpec::uniform_box(n),
            "ball" => MeasureSpec::uniform_ball(n),
            "simplex" => MeasureSpec::uniform_simplex(n),
            "gaussian" => MeasureSpec::gaussian_standard(n),
            "exponential" => MeasureSpec::exponential_halfline(),
            "interval" => {
                let (a, b) = self.search.interval.ok_or_else(|| {
                    invalid("search.interval", "required when search.measure = \"interval\"")
                })?;
                MeasureSpec::interval_uniform(a, b)
            }
            other => {
                return Err(invalid(
                    "search.measure",
                    format!(
                        "unknown measure \"{other}\"; expected box, ball, simplex, \
                         gaussian, exponential, or interval"
                    ),
                ));
            }
        };
        built.map_err(|e| invalid("search.measure", e.to_string()))
    }

    pub fn search_spec(&self) -> Result<SearchSpec, ConfigError> {
        let family = match self.search.family.as_str() {
            "monomials" => SearchFamily::Monomials { d_max: self.search.d_max },
            "dense" => SearchFamily::DenseCoefficients { n: self.search.n, d: self.search.d },
            other => {
                return Err(invalid(
                    "search.family",
                    format!("unknown family \"{other}\"; expected monomials or dense"),
                ));
            }
        };
        let set = match (&self.search.window_length, &self.search.set_intervals) {
            (Some(_), Some(_)) => {
                return Err(invalid(
                    "search",
                    "window_length and set_intervals are mutually exclusive",
                ));
            }
            (Some(len), None) => SetFamily::Window { length: *len },
            (None, Some(ivs)) => {
                if ivs.is_empty() {
                    return Err(invalid("search.set_intervals", "must list at least one interval"));
                }
                if ivs.iter().any(|&(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
                    return Err(invalid(
                        "search.set_intervals",
                        "each interval needs finite endpoints with a < b",
                    ));
                }
                SetFamily::Fixed { set: SetSpec::Intervals { intervals: ivs.clone() } }
            }
            (None, None) => {
                SetFamily::Fixed { set: SetSpec::Intervals { intervals: vec![(0.0, 0.5)] } }
            }
        };
        let spec = SearchSpec {
            family,
            measure: self.search_measure()?,
            set,
            p: self.search.p,
            iterations: self.budgets.iterations,
            restarts: self.budgets.restarts,
            samples: self.budgets.search_samples,
            c: self.c,
            seed: self.seed_or_err()?,
            step: self.search.step,
            decay: self.search.decay,
        };
        spec.validate().map_err(|e| invalid("search", e.to_string()))?;
        Ok(spec)
    }

    pub fn tightness_grid(&self) -> (Vec<u32>, Vec<f64>) {
        (self.tightness.degrees.clone(), self.tightness.epsilons.clone())
    }
}
