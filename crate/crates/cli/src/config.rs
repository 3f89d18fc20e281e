use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use fockstab::liouville::{SolverMethod, SteadyStateOptions, Superoperator};
use fockstab::models::{
    build_full, build_generic, build_reduced, ideal_detuning, EffectiveParams, GenericParams,
    RawOptomechParams, ReducedOptions, DEFAULT_FULL_DIMS, FULL_MODES, GENERIC_MODES, REDUCED_MODES,
};
use fockstab::wigner::GridSpec;
use serde::Deserialize;
use toml::Spanned;

use crate::CliError;

pub const PRESETS: [(&str, &str); 2] = [
    ("fig3ab", include_str!("../presets/fig3ab.toml")),
    ("fig3cd", include_str!("../presets/fig3cd.toml")),
];

pub fn preset(name: &str) -> Result<&'static str, CliError> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            let names: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
            CliError::Config(format!(
                "unknown preset '{name}' (available: {})",
                names.join(", ")
            ))
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Generic,
    Reduced,
    Full,
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "generic" => Ok(Self::Generic),
            "reduced" => Ok(Self::Reduced),
            "full" => Ok(Self::Full),
            other => Err(format!(
                "unknown model '{other}' (expected generic, reduced or full)"
            )),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Generic => "generic",
            Self::Reduced => "reduced",
            Self::Full => "full",
        })
    }
}

impl ModelKind {
    pub fn labels(self) -> &'static [&'static str] {
        match self {
            Self::Generic => &GENERIC_MODES,
            Self::Reduced => &REDUCED_MODES,
            Self::Full => &FULL_MODES,
        }
    }

    fn default_dims(self) -> &'static [usize] {
        match self {
            Self::Generic => &[3, 8],
            Self::Reduced => &[3, 8],
            Self::Full => &DEFAULT_FULL_DIMS,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    model: Spanned<String>,
    output_dir: Option<PathBuf>,
    parameters: BTreeMap<Spanned<String>, f64>,
    #[serde(default)]
    dims: BTreeMap<Spanned<String>, usize>,
    #[serde(default)]
    wigner: WignerSettings,
    #[serde(default)]
    solver: SolverSection,
    #[serde(default)]
    options: Options,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct WignerSettings {
    pub enabled: bool,
    pub half_width: f64,
    pub points: usize,
}

impl Default for WignerSettings {
    fn default() -> Self {
        let spec = GridSpec::default();
        Self {
            enabled: true,
            half_width: spec.q_range.1,
            points: spec.points,
        }
    }
}

impl WignerSettings {
    pub fn grid_spec(&self) -> GridSpec {
        GridSpec::square(self.half_width, self.points)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SolverSection {
    method: String,
    tol: f64,
    convergence_threshold: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            method: "auto".into(),
            tol: SteadyStateOptions::default().tol,
            convergence_threshold: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings {
    pub method: SolverMethod,
    pub tol: f64,
    /// Largest accepted `|dP_n|` when a truncation is doubled.
    pub convergence_threshold: f64,
}

impl SolverSettings {
    pub fn options(&self) -> SteadyStateOptions {
        SteadyStateOptions {
            method: self.method,
            tol: self.tol,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    pub cross_kappa: bool,
    pub include_pair_loss: bool,
    pub include_cross_kerr: bool,
}

/// A validated scenario: parameters are kept as a flat map so sweeps can
/// rewrite any of them.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub model: ModelKind,
    pub output_dir: PathBuf,
    pub params: BTreeMap<String, f64>,
    /// Truncations in the model's mode order.
    pub dims: Vec<usize>,
    pub wigner: WignerSettings,
    pub solver: SolverSettings,
    pub options: Options,
}

const GENERIC_KEYS: [&str; 5] = [
    "g_tilde",
    "conversion_rate",
    "kappa",
    "gamma_down",
    "gamma_up",
];
const EFFECTIVE_REQUIRED: [&str; 11] = [
    "g_pp",
    "g_pm",
    "g3",
    "kappa_plus",
    "kappa_minus",
    "kappa3",
    "omega_m",
    "gamma",
    "n_th",
    "coupling_down",
    "coupling_up",
];
const EFFECTIVE_OPTIONAL: [&str; 3] = ["g_mm", "kappa_pm", "delta_plus"];
const RAW_REQUIRED: [&str; 14] = [
    "omega1",
    "omega2",
    "tunneling",
    "g1",
    "g2",
    "kappa1",
    "kappa2",
    "g3",
    "kappa3",
    "omega_m",
    "gamma",
    "n_th",
    "drive_down",
    "drive_up",
];
const RAW_OPTIONAL: [&str; 2] = ["kappa_minus_ext", "delta_plus"];
/// Keys that only exist in the physical-cavity parameter set.
const RAW_MARKERS: [&str; 9] = [
    "omega1",
    "omega2",
    "tunneling",
    "g1",
    "g2",
    "kappa1",
    "kappa2",
    "drive_down",
    "drive_up",
];

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Which parameter set a map describes, with its required and optional keys.
fn key_sets(
    model: ModelKind,
    params: &BTreeMap<String, f64>,
) -> (&'static [&'static str], &'static [&'static str]) {
    match model {
        ModelKind::Generic => (&GENERIC_KEYS, &[]),
        _ if RAW_MARKERS.iter().any(|k| params.contains_key(*k)) => (&RAW_REQUIRED, &RAW_OPTIONAL),
        _ => (&EFFECTIVE_REQUIRED, &EFFECTIVE_OPTIONAL),
    }
}

impl Scenario {
    /// Parses and validates a configuration; `origin` names the source in messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let file: ConfigFile = toml::from_str(text)
            .map_err(|e| CliError::Config(format!("{origin}: {}", e.to_string().trim_end())))?;
        let at = |span: std::ops::Range<usize>| format!("{origin}:{}", line_of(text, span.start));
        let model = ModelKind::from_str(file.model.get_ref())
            .map_err(|e| CliError::Config(format!("{}: {e}", at(file.model.span()))))?;

        let params: BTreeMap<String, f64> = file
            .parameters
            .iter()
            .map(|(k, v)| (k.get_ref().clone(), *v))
            .collect();
        let (required, optional) = key_sets(model, &params);
        for key in file.parameters.keys() {
            let name = key.get_ref().as_str();
            if !required.contains(&name) && !optional.contains(&name) {
                return Err(CliError::Config(format!(
                    "{}: unknown parameter '{name}' for model {model} (expected {})",
                    at(key.span()),
                    required.join(", ")
                )));
            }
        }
        if let Some(missing) = required.iter().find(|k| !params.contains_key(**k)) {
            return Err(CliError::Config(format!(
                "{origin}: missing parameter '{missing}' for model {model}"
            )));
        }

        let labels = model.labels();
        let mut dims = model.default_dims().to_vec();
        for (key, &d) in &file.dims {
            let idx = labels
                .iter()
                .position(|l| l == key.get_ref())
                .ok_or_else(|| {
                    CliError::Config(format!(
                        "{}: unknown mode '{}' for model {model} (modes: {})",
                        at(key.span()),
                        key.get_ref(),
                        labels.join(", ")
                    ))
                })?;
            dims[idx] = d;
        }

        let method = SolverMethod::from_str(&file.solver.method)
            .map_err(|e| CliError::Config(format!("{origin}: solver.method: {e}")))?;
        let scenario = Self {
            model,
            output_dir: file.output_dir.unwrap_or_else(|| PathBuf::from("out")),
            params,
            dims,
            wigner: file.wigner,
            solver: SolverSettings {
                method,
                tol: file.solver.tol,
                convergence_threshold: file.solver.convergence_threshold,
            },
            options: file.options,
        };
        scenario.validate().map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{origin}: {msg}")),
            other => other,
        })?;
        Ok(scenario)
    }

    /// Checks everything that does not need a solve.
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.solver.tol > 0.0) || !(self.solver.convergence_threshold > 0.0) {
            return Err(CliError::Config(
                "solver.tol and solver.convergence_threshold must be positive".into(),
            ));
        }
        if self.wigner.enabled && (!(self.wigner.half_width > 0.0) || self.wigner.points < 3) {
            return Err(CliError::Config(
                "wigner.half_width must be positive and wigner.points at least 3".into(),
            ));
        }
        self.model_spec()?;
        Ok(())
    }

    /// Parses `label:dim,label:dim` and overrides the named truncations.
    pub fn override_dims(&mut self, spec: &str) -> Result<(), CliError> {
        let labels = self.model.labels();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (label, dim) = item.rsplit_once(':').ok_or_else(|| {
                CliError::Config(format!("--dims entry '{item}' is not label:dim"))
            })?;
            let idx = labels.iter().position(|l| *l == label).ok_or_else(|| {
                CliError::Config(format!(
                    "--dims: unknown mode '{label}' (modes: {})",
                    labels.join(", ")
                ))
            })?;
            self.dims[idx] = dim
                .parse()
                .map_err(|_| CliError::Config(format!("--dims: '{dim}' is not a dimension")))?;
        }
        self.validate()
    }

    /// Sets a sweep axis: a parameter name or `dims.<label>`.
    pub fn set_axis(&mut self, axis: &str, value: f64) -> Result<(), CliError> {
        if let Some(label) = axis.strip_prefix("dims.") {
            let idx = self
                .model
                .labels()
                .iter()
                .position(|l| *l == label)
                .ok_or_else(|| CliError::Config(format!("sweep axis: unknown mode '{label}'")))?;
            if value.fract() != 0.0 || value < 1.0 {
                return Err(CliError::Config(format!(
                    "sweep axis {axis}: {value} is not a dimension"
                )));
            }
            self.dims[idx] = value as usize;
            return Ok(());
        }
        let (required, optional) = key_sets(self.model, &self.params);
        if !required.contains(&axis) && !optional.contains(&axis) {
            return Err(CliError::Config(format!(
                "sweep axis '{axis}' is not a parameter of model {}",
                self.model
            )));
        }
        self.params.insert(axis.to_string(), value);
        Ok(())
    }

    pub fn model_spec(&self) -> Result<ModelSpec, CliError> {
        let p = |k: &str| self.params.get(k).copied().unwrap_or(0.0);
        let spec = match self.model {
            ModelKind::Generic => ModelSpec::Generic(GenericParams {
                g_tilde: p("g_tilde"),
                conversion_rate: p("conversion_rate"),
                kappa: p("kappa"),
                gamma_down: p("gamma_down"),
                gamma_up: p("gamma_up"),
                dims: [self.dims[0], self.dims[1]],
            }),
            kind => {
                let mut eff = if self.params.contains_key("tunneling") {
                    let raw = RawOptomechParams {
                        omega1: p("omega1"),
                        omega2: p("omega2"),
                        tunneling: p("tunneling"),
                        g1: p("g1"),
                        g2: p("g2"),
                        kappa1: p("kappa1"),
                        kappa2: p("kappa2"),
                        kappa_minus_ext: p("kappa_minus_ext"),
                        g3: p("g3"),
                        kappa3: p("kappa3"),
                        omega_m: p("omega_m"),
                        gamma: p("gamma"),
                        n_th: p("n_th"),
                        drive_down: p("drive_down"),
                        drive_up: p("drive_up"),
                    };
                    EffectiveParams::from_raw(&raw).map_err(|e| CliError::Config(e.to_string()))?
                } else {
                    EffectiveParams {
                        g_pp: p("g_pp"),
                        g_mm: p("g_mm"),
                        g_pm: p("g_pm"),
                        g3: p("g3"),
                        kappa_plus: p("kappa_plus"),
                        kappa_minus: p("kappa_minus"),
                        kappa_pm: p("kappa_pm"),
                        kappa3: p("kappa3"),
                        omega_m: p("omega_m"),
                        gamma: p("gamma"),
                        n_th: p("n_th"),
                        coupling_down: p("coupling_down"),
                        coupling_up: p("coupling_up"),
                        delta_plus: 0.0,
                        modes: None,
                        drive: None,
                    }
                };
                eff.delta_plus = match self.params.get("delta_plus") {
                    Some(&d) => d,
                    None => ideal_detuning(eff.omega_m, eff.coupling_down, eff.coupling_up)
                        .map_err(|e| CliError::Config(e.to_string()))?,
                };
                eff.validate()
                    .map_err(|e| CliError::Config(e.to_string()))?;
                if kind == ModelKind::Reduced {
                    ModelSpec::Reduced {
                        eff,
                        dims: [self.dims[0], self.dims[1]],
                        opts: ReducedOptions {
                            include_pair_loss: self.options.include_pair_loss,
                            include_cross_kerr: self.options.include_cross_kerr,
                        },
                    }
                } else {
                    ModelSpec::Full {
                        eff,
                        dims: [self.dims[0], self.dims[1], self.dims[2], self.dims[3]],
                        cross_kappa: self.options.cross_kappa,
                    }
                }
            }
        };
        // builders check the truncations
        spec.build().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(spec)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelSpec {
    Generic(GenericParams),
    Reduced {
        eff: EffectiveParams,
        dims: [usize; 2],
        opts: ReducedOptions,
    },
    Full {
        eff: EffectiveParams,
        dims: [usize; 4],
        cross_kappa: bool,
    },
}

impl ModelSpec {
    pub fn build(&self) -> fockstab::Result<Superoperator> {
        match self {
            Self::Generic(p) => build_generic(p),
            Self::Reduced { eff, dims, opts } => build_reduced(eff, *dims, *opts),
            Self::Full {
                eff,
                dims,
                cross_kappa,
            } => build_full(eff, *dims, *cross_kappa),
        }
    }

    pub fn effective(&self) -> Option<&EffectiveParams> {
        match self {
            Self::Generic(_) => None,
            Self::Reduced { eff, .. } | Self::Full { eff, .. } => Some(eff),
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        match self {
            Self::Generic(p) => p.dims.to_vec(),
            Self::Reduced { dims, .. } => dims.to_vec(),
            Self::Full { dims, .. } => dims.to_vec(),
        }
    }

    pub fn with_dims(&self, new: &[usize]) -> Self {
        let mut out = *self;
        match &mut out {
            Self::Generic(p) => p.dims.copy_from_slice(new),
            Self::Reduced { dims, .. } => dims.copy_from_slice(new),
            Self::Full { dims, .. } => dims.copy_from_slice(new),
        }
        out
    }
}
