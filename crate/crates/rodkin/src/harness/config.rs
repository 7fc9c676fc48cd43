//! Line-oriented `key = value` run configuration.
//!
//! Unknown keys, malformed values, and cross-field constraint violations are
//! all rejected with the offending key and line number. An empty text parses
//! to the defaults: Model I on a 64x64x64 grid, isotropic initial state, all
//! rate coefficients 1.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_4, PI};
use std::path::PathBuf;

use thiserror::Error;

use crate::agents::AgentParams;
use crate::grid::{GridSpec, KineticField, ScalarField};
use crate::harness::io::{self, IoError};
use crate::interaction::{AlignmentForm, AlignmentSpec, InteractionError, Psi};
use crate::models::{ChemoCoupling, ModelError, ModelKind, ModelParams, SimState};

const INV_2PI: f64 = 1.0 / (2.0 * PI);

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: expected 'key = value', got '{text}'")]
    Syntax { line: usize, text: String },
    #[error("config line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: bad value '{value}' for key '{key}': {reason}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },
    #[error("config key '{key}' (line {line}): {reason}")]
    Constraint {
        key: String,
        line: usize,
        reason: String,
    },
}

/// Initial states constructible from configuration alone.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// Uniform density 1/(2π): unit mass, fixed point of every model.
    Isotropic,
    /// `(1/2π) [1 + a1 cos(2θ − π/4) + a2 cos(2πx₁) cos 2θ]`: π-periodic in
    /// θ with both nematic moments active; requires |a1| + |a2| ≤ 1.
    TwoMode { a1: f64, a2: f64 },
    /// Spatially uniform wrapped-Gaussian bump in orientation, normalized to
    /// unit mass on the grid.
    Bump { theta0: f64, width: f64 },
    /// A previously stored field file; its grid must match the configured one
    /// and its stored time becomes the start time.
    File(PathBuf),
}

/// Analytic chemoattractant profiles for Model III.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SProfile {
    Zero,
    Uniform,
    CosX1,
}

/// A fully validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub nx: usize,
    pub ny: usize,
    pub ntheta: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Observer cadence; must be an integer multiple of `dt` dividing `t_end`.
    pub cadence: f64,
    pub seed: u64,
    pub eps_scale: f64,
    pub eps_reg: f64,
    pub align_form: AlignmentForm,
    pub align_bound: f64,
    pub align_radius: f64,
    pub init: InitialCondition,
    pub chemo: ChemoCoupling,
    pub s_profile: SProfile,
    pub s_amplitude: f64,
    pub agents_n: usize,
    pub agents: AgentParams,
    /// Orientation histogram bins for agent runs and the agent study.
    pub nbins: usize,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelKind::ModelI,
            nx: 64,
            ny: 64,
            ntheta: 64,
            dt: 1e-3,
            t_end: 1.0,
            cadence: 0.1,
            seed: 0,
            eps_scale: 1.0,
            eps_reg: 0.0,
            align_form: AlignmentForm::ClampedSum,
            align_bound: 1.0,
            align_radius: 0.0,
            init: InitialCondition::Isotropic,
            chemo: ChemoCoupling::GivenS,
            s_profile: SProfile::CosX1,
            s_amplitude: 1.0,
            agents_n: 1000,
            agents: AgentParams::default(),
            nbins: 32,
            out: None,
        }
    }
}

fn parse_num<T>(key: &str, value: &str, line: usize) -> Result<T, ConfigError>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::BadValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

fn parse_dim(key: &str, value: &str, line: usize) -> Result<usize, ConfigError> {
    let n: usize = parse_num(key, value, line)?;
    if n < 4 || n % 2 != 0 {
        return Err(ConfigError::BadValue {
            line,
            key: key.to_string(),
            value: value.to_string(),
            reason: "grid dimensions must be even and at least 4".to_string(),
        });
    }
    Ok(n)
}

fn parse_model(value: &str, line: usize) -> Result<ModelKind, ConfigError> {
    match value {
        "model1" | "I" => Ok(ModelKind::ModelI),
        "model1-scaled" | "I-scaled" => Ok(ModelKind::ModelIScaled),
        "model2" | "II" => Ok(ModelKind::ModelII),
        "model2-reg" | "II-reg" | "II-regularized" => Ok(ModelKind::ModelIIRegularized),
        "model3" | "III" => Ok(ModelKind::ModelIII),
        _ => Err(ConfigError::BadValue {
            line,
            key: "model".to_string(),
            value: value.to_string(),
            reason: "expected one of model1, model1-scaled, model2, model2-reg, model3"
                .to_string(),
        }),
    }
}

fn model_token(model: ModelKind) -> &'static str {
    match model {
        ModelKind::ModelI => "model1",
        ModelKind::ModelIScaled => "model1-scaled",
        ModelKind::ModelII => "model2",
        ModelKind::ModelIIRegularized => "model2-reg",
        ModelKind::ModelIII => "model3",
    }
}

fn parse_form(key: &str, value: &str, line: usize) -> Result<AlignmentForm, ConfigError> {
    match value {
        "clamped-sum" => Ok(AlignmentForm::ClampedSum),
        "clamped-current" => Ok(AlignmentForm::ClampedCurrent),
        _ => Err(ConfigError::BadValue {
            line,
            key: key.to_string(),
            value: value.to_string(),
            reason: "expected clamped-sum or clamped-current".to_string(),
        }),
    }
}

fn form_token(form: AlignmentForm) -> &'static str {
    match form {
        AlignmentForm::ClampedSum => "clamped-sum",
        AlignmentForm::ClampedCurrent => "clamped-current",
    }
}

/// Parses a configuration text, fills defaults, and validates every
/// cross-field constraint.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    // Initial-condition scratch: the enum is assembled after the full pass so
    // sub-keys may appear in any order.
    let mut init_kind = "isotropic".to_string();
    let mut init_a1 = 0.3;
    let mut init_a2 = 0.2;
    let mut init_theta0 = 0.0;
    let mut init_width = 0.3;
    let mut init_file: Option<PathBuf> = None;
    let mut eps_reg_set = false;
    let mut lines: HashMap<&'static str, usize> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        let Some((key, value)) = stripped.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: stripped.to_string(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                text: stripped.to_string(),
            });
        }
        match key {
            "model" => {
                cfg.model = parse_model(value, line)?;
                lines.insert("model", line);
            }
            "nx" => {
                cfg.nx = parse_dim(key, value, line)?;
                lines.insert("nx", line);
            }
            "ny" => {
                cfg.ny = parse_dim(key, value, line)?;
                lines.insert("ny", line);
            }
            "ntheta" => {
                cfg.ntheta = parse_dim(key, value, line)?;
                lines.insert("ntheta", line);
            }
            "dt" => {
                cfg.dt = parse_num(key, value, line)?;
                lines.insert("dt", line);
            }
            "t_end" => {
                cfg.t_end = parse_num(key, value, line)?;
                lines.insert("t_end", line);
            }
            "cadence" => {
                cfg.cadence = parse_num(key, value, line)?;
                lines.insert("cadence", line);
            }
            "seed" => {
                cfg.seed = parse_num(key, value, line)?;
                lines.insert("seed", line);
            }
            "eps_scale" => {
                cfg.eps_scale = parse_num(key, value, line)?;
                lines.insert("eps_scale", line);
            }
            "eps_reg" => {
                cfg.eps_reg = parse_num(key, value, line)?;
                eps_reg_set = true;
                lines.insert("eps_reg", line);
            }
            "align_form" => {
                cfg.align_form = parse_form(key, value, line)?;
                lines.insert("align_form", line);
            }
            "align_bound" => {
                cfg.align_bound = parse_num(key, value, line)?;
                lines.insert("align_bound", line);
            }
            "align_radius" => {
                cfg.align_radius = parse_num(key, value, line)?;
                lines.insert("align_radius", line);
            }
            "init" => {
                match value {
                    "isotropic" | "two-mode" | "bump" | "file" => {
                        init_kind = value.to_string();
                    }
                    _ => {
                        return Err(ConfigError::BadValue {
                            line,
                            key: key.to_string(),
                            value: value.to_string(),
                            reason: "expected isotropic, two-mode, bump, or file".to_string(),
                        });
                    }
                }
                lines.insert("init", line);
            }
            "init_a1" => {
                init_a1 = parse_num(key, value, line)?;
                lines.insert("init_a1", line);
            }
            "init_a2" => {
                init_a2 = parse_num(key, value, line)?;
                lines.insert("init_a2", line);
            }
            "init_theta0" => {
                init_theta0 = parse_num(key, value, line)?;
                lines.insert("init_theta0", line);
            }
            "init_width" => {
                init_width = parse_num(key, value, line)?;
                lines.insert("init_width", line);
            }
            "init_file" => {
                init_file = Some(PathBuf::from(value));
                lines.insert("init_file", line);
            }
            "chemo" => {
                cfg.chemo = match value {
                    "given" => ChemoCoupling::GivenS,
                    "coupled" => ChemoCoupling::Coupled,
                    _ => {
                        return Err(ConfigError::BadValue {
                            line,
                            key: key.to_string(),
                            value: value.to_string(),
                            reason: "expected given or coupled".to_string(),
                        });
                    }
                };
                lines.insert("chemo", line);
            }
            "s_profile" => {
                cfg.s_profile = match value {
                    "zero" => SProfile::Zero,
                    "uniform" => SProfile::Uniform,
                    "cos-x1" => SProfile::CosX1,
                    _ => {
                        return Err(ConfigError::BadValue {
                            line,
                            key: key.to_string(),
                            value: value.to_string(),
                            reason: "expected zero, uniform, or cos-x1".to_string(),
                        });
                    }
                };
                lines.insert("s_profile", line);
            }
            "s_amplitude" => {
                cfg.s_amplitude = parse_num(key, value, line)?;
                lines.insert("s_amplitude", line);
            }
            "agents_n" => {
                cfg.agents_n = parse_num(key, value, line)?;
                lines.insert("agents_n", line);
            }
            "agents_v0" => {
                cfg.agents.v0 = parse_num(key, value, line)?;
                lines.insert("agents_v0", line);
            }
            "agents_gamma" => {
                cfg.agents.gamma = parse_num(key, value, line)?;
                lines.insert("agents_gamma", line);
            }
            "agents_sigma" => {
                cfg.agents.sigma = parse_num(key, value, line)?;
                lines.insert("agents_sigma", line);
            }
            "agents_lambda" => {
                cfg.agents.lambda = parse_num(key, value, line)?;
                lines.insert("agents_lambda", line);
            }
            "agents_radius" => {
                cfg.agents.radius = parse_num(key, value, line)?;
                lines.insert("agents_radius", line);
            }
            "agents_length" => {
                cfg.agents.length = parse_num(key, value, line)?;
                lines.insert("agents_length", line);
            }
            "agents_width" => {
                cfg.agents.width = parse_num(key, value, line)?;
                lines.insert("agents_width", line);
            }
            "agents_form" => {
                cfg.agents.form = parse_form(key, value, line)?;
                lines.insert("agents_form", line);
            }
            "nbins" => {
                cfg.nbins = parse_num(key, value, line)?;
                lines.insert("nbins", line);
            }
            "out" => {
                cfg.out = Some(PathBuf::from(value));
                lines.insert("out", line);
            }
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
        }
    }

    if !eps_reg_set && cfg.model == ModelKind::ModelIIRegularized {
        cfg.eps_reg = 0.01;
    }
    cfg.init = match init_kind.as_str() {
        "isotropic" => InitialCondition::Isotropic,
        "two-mode" => InitialCondition::TwoMode {
            a1: init_a1,
            a2: init_a2,
        },
        "bump" => InitialCondition::Bump {
            theta0: init_theta0,
            width: init_width,
        },
        "file" => {
            let Some(path) = init_file else {
                return Err(ConfigError::Constraint {
                    key: "init_file".to_string(),
                    line: lines.get("init").copied().unwrap_or(0),
                    reason: "init = file requires an init_file path".to_string(),
                });
            };
            InitialCondition::File(path)
        }
        _ => unreachable!("init token validated above"),
    };

    validate(&cfg, &lines)?;
    Ok(cfg)
}

fn line_of(lines: &HashMap<&'static str, usize>, key: &'static str) -> usize {
    lines.get(key).copied().unwrap_or(0)
}

fn constraint(
    lines: &HashMap<&'static str, usize>,
    key: &'static str,
    reason: String,
) -> ConfigError {
    ConfigError::Constraint {
        key: key.to_string(),
        line: line_of(lines, key),
        reason,
    }
}

fn validate(cfg: &RunConfig, lines: &HashMap<&'static str, usize>) -> Result<(), ConfigError> {
    GridSpec::new(cfg.nx, cfg.ny, cfg.ntheta)
        .map_err(|e| constraint(lines, "nx", e.to_string()))?;

    if !(cfg.t_end > 0.0 && cfg.t_end.is_finite()) {
        return Err(constraint(
            lines,
            "t_end",
            format!("horizon must be positive and finite, got {}", cfg.t_end),
        ));
    }
    if !(cfg.cadence > 0.0 && cfg.cadence.is_finite()) {
        return Err(constraint(
            lines,
            "cadence",
            format!("cadence must be positive and finite, got {}", cfg.cadence),
        ));
    }

    // Model-parameter constraints, attributed to the key that carries them.
    match cfg.model_params().validate() {
        Ok(()) => {}
        Err(ModelError::BadTimeStep(v)) => {
            return Err(constraint(
                lines,
                "dt",
                format!("time step must be positive and finite, got {v}"),
            ));
        }
        Err(e @ ModelError::BadScale { .. }) => {
            return Err(constraint(lines, "eps_scale", e.to_string()));
        }
        Err(e @ ModelError::BadRegularization { .. }) => {
            return Err(constraint(lines, "eps_reg", e.to_string()));
        }
        Err(ModelError::Alignment(e)) => {
            let key = match e {
                InteractionError::BadRadius(_) => "align_radius",
                _ => "align_bound",
            };
            return Err(constraint(lines, key, e.to_string()));
        }
        Err(e) => {
            return Err(constraint(lines, "model", e.to_string()));
        }
    }

    // Cadence compatibility: cadence = k·dt and t_end = m·cadence.
    let ticks = cfg.cadence / cfg.dt;
    if (ticks - ticks.round()).abs() > 1e-9 * ticks.max(1.0) || ticks.round() < 1.0 {
        return Err(constraint(
            lines,
            "cadence",
            format!(
                "cadence {} must be a positive integer multiple of dt {}",
                cfg.cadence, cfg.dt
            ),
        ));
    }
    let spans = cfg.t_end / cfg.cadence;
    if (spans - spans.round()).abs() > 1e-9 * spans.max(1.0) || spans.round() < 1.0 {
        return Err(constraint(
            lines,
            "t_end",
            format!(
                "t_end {} must be a positive integer multiple of cadence {}",
                cfg.t_end, cfg.cadence
            ),
        ));
    }

    match &cfg.init {
        InitialCondition::Isotropic | InitialCondition::File(_) => {}
        InitialCondition::TwoMode { a1, a2 } => {
            if !(a1.is_finite() && a2.is_finite() && a1.abs() + a2.abs() <= 1.0) {
                return Err(constraint(
                    lines,
                    "init_a1",
                    format!("two-mode amplitudes need |a1| + |a2| <= 1, got {a1} and {a2}"),
                ));
            }
        }
        InitialCondition::Bump { theta0, width } => {
            if !theta0.is_finite() {
                return Err(constraint(
                    lines,
                    "init_theta0",
                    format!("bump center must be finite, got {theta0}"),
                ));
            }
            if !(width.is_finite() && *width > 0.0) {
                return Err(constraint(
                    lines,
                    "init_width",
                    format!("bump width must be positive, got {width}"),
                ));
            }
        }
    }

    if !cfg.s_amplitude.is_finite() {
        return Err(constraint(
            lines,
            "s_amplitude",
            format!("chemoattractant amplitude must be finite, got {}", cfg.s_amplitude),
        ));
    }

    if cfg.agents_n == 0 {
        return Err(constraint(
            lines,
            "agents_n",
            "ensemble size must be at least 1".to_string(),
        ));
    }
    if cfg.nbins == 0 {
        return Err(constraint(
            lines,
            "nbins",
            "histogram needs at least one bin".to_string(),
        ));
    }
    if let Err(e) = cfg.agents.validate() {
        let key = match &e {
            crate::agents::AgentError::BadParam { name, .. } => match *name {
                "v0" => "agents_v0",
                "gamma" => "agents_gamma",
                "sigma" => "agents_sigma",
                "lambda" => "agents_lambda",
                "radius" => "agents_radius",
                "length" => "agents_length",
                _ => "agents_width",
            },
            _ => "agents_radius",
        };
        return Err(constraint(lines, key, e.to_string()));
    }
    Ok(())
}

/// Emits the canonical text form; `parse_config` reproduces an equal config.
pub fn serialize_config(cfg: &RunConfig) -> String {
    let mut s = String::new();
    let mut push = |k: &str, v: String| {
        s.push_str(k);
        s.push_str(" = ");
        s.push_str(&v);
        s.push('\n');
    };
    push("model", model_token(cfg.model).to_string());
    push("nx", cfg.nx.to_string());
    push("ny", cfg.ny.to_string());
    push("ntheta", cfg.ntheta.to_string());
    push("dt", cfg.dt.to_string());
    push("t_end", cfg.t_end.to_string());
    push("cadence", cfg.cadence.to_string());
    push("seed", cfg.seed.to_string());
    push("eps_scale", cfg.eps_scale.to_string());
    push("eps_reg", cfg.eps_reg.to_string());
    push("align_form", form_token(cfg.align_form).to_string());
    push("align_bound", cfg.align_bound.to_string());
    push("align_radius", cfg.align_radius.to_string());
    match &cfg.init {
        InitialCondition::Isotropic => push("init", "isotropic".to_string()),
        InitialCondition::TwoMode { a1, a2 } => {
            push("init", "two-mode".to_string());
            push("init_a1", a1.to_string());
            push("init_a2", a2.to_string());
        }
        InitialCondition::Bump { theta0, width } => {
            push("init", "bump".to_string());
            push("init_theta0", theta0.to_string());
            push("init_width", width.to_string());
        }
        InitialCondition::File(path) => {
            push("init", "file".to_string());
            push("init_file", path.display().to_string());
        }
    }
    push(
        "chemo",
        match cfg.chemo {
            ChemoCoupling::GivenS => "given",
            ChemoCoupling::Coupled => "coupled",
        }
        .to_string(),
    );
    push(
        "s_profile",
        match cfg.s_profile {
            SProfile::Zero => "zero",
            SProfile::Uniform => "uniform",
            SProfile::CosX1 => "cos-x1",
        }
        .to_string(),
    );
    push("s_amplitude", cfg.s_amplitude.to_string());
    push("agents_n", cfg.agents_n.to_string());
    push("agents_v0", cfg.agents.v0.to_string());
    push("agents_gamma", cfg.agents.gamma.to_string());
    push("agents_sigma", cfg.agents.sigma.to_string());
    push("agents_lambda", cfg.agents.lambda.to_string());
    push("agents_radius", cfg.agents.radius.to_string());
    push("agents_length", cfg.agents.length.to_string());
    push("agents_width", cfg.agents.width.to_string());
    push("agents_form", form_token(cfg.agents.form).to_string());
    push("nbins", cfg.nbins.to_string());
    if let Some(out) = &cfg.out {
        push("out", out.display().to_string());
    }
    s
}

impl RunConfig {
    pub fn grid(&self) -> GridSpec {
        GridSpec::new(self.nx, self.ny, self.ntheta).expect("config grid validated at parse time")
    }

    /// Model parameters implied by the configuration (`xdiff_coef` is always
    /// 1; only the diffusion-limit study's reference run overrides it).
    pub fn model_params(&self) -> ModelParams {
        let mut p = ModelParams::new(self.model, self.dt);
        p.alignment = AlignmentSpec {
            form: self.align_form,
            bound: self.align_bound,
            radius: self.align_radius,
        };
        p.psi = Psi::Clamp;
        p.eps_scale = self.eps_scale;
        p.eps_reg = self.eps_reg;
        p.chemo = self.chemo;
        p
    }

    /// Builds the configured initial kinetic density.
    pub fn initial_field(&self) -> Result<KineticField, IoError> {
        let grid = self.grid();
        match &self.init {
            InitialCondition::Isotropic => {
                Ok(KineticField::from_fn(grid, 0.0, |_, _, _| INV_2PI))
            }
            InitialCondition::TwoMode { a1, a2 } => Ok(KineticField::from_fn(grid, 0.0, {
                let (a1, a2) = (*a1, *a2);
                move |x1, _, th| {
                    INV_2PI
                        * (1.0
                            + a1 * (2.0 * th - FRAC_PI_4).cos()
                            + a2 * (2.0 * PI * x1).cos() * (2.0 * th).cos())
                }
            })),
            InitialCondition::Bump { theta0, width } => {
                let profile: Vec<f64> = grid
                    .theta_nodes()
                    .into_iter()
                    .map(|th| {
                        let mut d = th - theta0;
                        while d > PI {
                            d -= 2.0 * PI;
                        }
                        while d <= -PI {
                            d += 2.0 * PI;
                        }
                        (-0.5 * (d / width) * (d / width)).exp()
                    })
                    .collect();
                let z: f64 = profile.iter().sum::<f64>() * grid.dtheta();
                let mut f = KineticField::zeros(grid, 0.0);
                for ((_, _, k), v) in f.values.indexed_iter_mut() {
                    *v = profile[k] / z;
                }
                Ok(f)
            }
            InitialCondition::File(path) => {
                let f = io::read_field(path)?;
                if f.grid() != grid {
                    return Err(IoError::GridMismatch {
                        expected: (grid.nx(), grid.ny(), grid.ntheta()),
                        got: (f.grid().nx(), f.grid().ny(), f.grid().ntheta()),
                    });
                }
                Ok(f)
            }
        }
    }

    /// The configured chemoattractant start state; `Some` only for Model III.
    pub fn initial_chemo(&self) -> Option<ScalarField> {
        if self.model != ModelKind::ModelIII {
            return None;
        }
        let grid = self.grid();
        let amp = self.s_amplitude;
        Some(match self.s_profile {
            SProfile::Zero => ScalarField::zeros(grid, 0.0),
            SProfile::Uniform => ScalarField::from_fn(grid, 0.0, |_, _| amp),
            SProfile::CosX1 => {
                ScalarField::from_fn(grid, 0.0, |x1, _| amp * (2.0 * PI * x1).cos())
            }
        })
    }

    /// Initial simulation state: field plus chemoattractant where the model
    /// needs one.
    pub fn initial_state(&self) -> Result<SimState, IoError> {
        let f = self.initial_field()?;
        Ok(match self.initial_chemo() {
            Some(s) => SimState::with_chemo(f, s),
            None => SimState::new(f),
        })
    }

}
