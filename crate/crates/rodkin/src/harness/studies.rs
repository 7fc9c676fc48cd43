//! The built-in experiments.
//!
//! * [`study_localization`]: Model I with the disk-averaged alignment rate at
//!   radius ε against the localized rate, measuring the ε → 0 substitution
//!   error and its observed order.
//! * [`study_diffusion_limit`]: the scaled fast-reversal model against its
//!   leading-order uni-directional diffusion limit.
//! * [`study_agents_vs_kinetic`]: the spatially homogeneous rod ensemble
//!   against the matching kinetic orientation marginal, over ensemble sizes,
//!   with the Monte-Carlo fit exponent.
//! * [`study_norms`]: moment-average norms of the regularized model across
//!   regularization strengths.
//!
//! Each study writes its per-run field files and its table under
//! `config.out` when set; the localization and diffusion tables are exact
//! functions of the stored fields, and the agent table of the stored
//! histograms. All outputs are byte-deterministic for a fixed config.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::agents::{step_agents, theta_histogram, AgentEnsemble, AgentError, AgentParams};
use crate::diagnostics::{
    fractional_norm, l2_norm, nematic_symmetry_error, DiagnosticsError, MomentCollector,
    FRACTIONAL_EXPONENT,
};
use crate::grid::GridSpec;
use crate::harness::config::{InitialCondition, RunConfig};
use crate::harness::io::{self, IoError};
use crate::models::{self, ModelKind, ModelParams, Observer, SimState};
use crate::rng;

/// Orientation resolution of the kinetic reference in the agent study.
pub const AGENT_REFERENCE_NTHETA: usize = 256;
/// Independent replicas averaged per ensemble size in the agent study.
pub const AGENT_STUDY_SEEDS: u64 = 5;
/// The diffusion-limit reference carries the fast-reversal asymptotic
/// coefficient 1/2 on the uni-directional operator.
pub const DIFFUSION_LIMIT_XDIFF_COEF: f64 = 0.5;
/// Splitting-bias cap for the scaled runs: dt ≤ ε²/20 keeps the stiff-mode
/// decay-rate bias below ~0.1%.
const SCALED_DT_FACTOR: f64 = 1.0 / 20.0;

#[derive(Debug, Error)]
pub enum StudyError {
    #[error(transparent)]
    Model(#[from] models::ModelError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("bad study parameter list: {0}")]
    BadList(String),
    #[error("the agent study needs a spatially homogeneous setting: {0}")]
    NotHomogeneous(String),
    #[error(
        "initial state is not half-turn symmetric (error {got:.3e} > {tol:.3e}); \
         the limit problem needs a π-periodic start"
    )]
    NotSymmetric { got: f64, tol: f64 },
}

/// Errors (one per label) with observed inter-row orders and an optional
/// global log-log fit exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    pub labels: Vec<f64>,
    pub errors: Vec<f64>,
    /// `orders[i]` is the observed order between rows i and i+1; empty for a
    /// single-row table.
    pub orders: Vec<f64>,
    /// Least-squares slope of ln(error) against ln(label), when requested.
    pub fit_exponent: Option<f64>,
}

impl RateTable {
    pub fn new(labels: Vec<f64>, errors: Vec<f64>, with_fit: bool) -> Self {
        assert_eq!(labels.len(), errors.len());
        let orders = labels
            .windows(2)
            .zip(errors.windows(2))
            .map(|(l, e)| {
                if e[0] > 0.0 && e[1] > 0.0 {
                    (e[0] / e[1]).ln() / (l[0] / l[1]).ln()
                } else {
                    f64::NAN
                }
            })
            .collect();
        let fit_exponent = if with_fit && labels.len() >= 2 {
            let xs: Vec<f64> = labels.iter().map(|l| l.ln()).collect();
            let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
            let n = xs.len() as f64;
            let xm = xs.iter().sum::<f64>() / n;
            let ym = ys.iter().sum::<f64>() / n;
            let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
            let den: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
            Some(num / den)
        } else {
            None
        };
        RateTable {
            labels,
            errors,
            orders,
            fit_exponent,
        }
    }

    /// Writes `label,error,order` rows; the first row's order is NaN since an
    /// order needs two rows.
    pub fn write_csv(&self, path: &Path, label_name: &str) -> Result<(), IoError> {
        let rows: Vec<Vec<f64>> = self
            .labels
            .iter()
            .zip(&self.errors)
            .enumerate()
            .map(|(i, (&l, &e))| {
                let order = if i == 0 {
                    f64::NAN
                } else {
                    self.orders[i - 1]
                };
                vec![l, e, order]
            })
            .collect();
        io::write_csv(path, &[label_name, "error", "order"], &rows)
    }
}

/// Moment-average norms per regularization strength.
#[derive(Debug, Clone, PartialEq)]
pub struct NormTable {
    pub eps: Vec<f64>,
    pub phi_labels: Vec<String>,
    /// `values[p][e]` is the norm of moment p at regularization `eps[e]`.
    pub values: Vec<Vec<f64>>,
}

impl NormTable {
    /// Max/min across regularization strengths for one moment.
    pub fn ratio(&self, phi: usize) -> f64 {
        let row = &self.values[phi];
        let max = row.iter().cloned().fold(f64::MIN, f64::max);
        let min = row.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }

    /// The largest per-moment ratio.
    pub fn max_ratio(&self) -> f64 {
        (0..self.phi_labels.len())
            .map(|p| self.ratio(p))
            .fold(f64::MIN, f64::max)
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), IoError> {
        let names: Vec<String> = self
            .phi_labels
            .iter()
            .map(|l| format!("norm_{l}"))
            .collect();
        let mut header = vec!["eps_reg"];
        header.extend(names.iter().map(String::as_str));
        let rows: Vec<Vec<f64>> = self
            .eps
            .iter()
            .enumerate()
            .map(|(e, &eps)| {
                let mut row = vec![eps];
                row.extend(self.values.iter().map(|v| v[e]));
                row
            })
            .collect();
        io::write_csv(path, &header, &rows)
    }
}

fn ensure_out(cfg: &RunConfig) -> Result<Option<PathBuf>, IoError> {
    match &cfg.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            Ok(Some(dir.clone()))
        }
        None => Ok(None),
    }
}

fn check_list(name: &str, list: &[f64], lo: f64, hi: f64) -> Result<(), StudyError> {
    if list.is_empty() {
        return Err(StudyError::BadList(format!("{name} list is empty")));
    }
    for &v in list {
        if !(v > lo && v <= hi && v.is_finite()) {
            return Err(StudyError::BadList(format!(
                "{name} value {v} outside ({lo}, {hi}]"
            )));
        }
    }
    for w in list.windows(2) {
        if !(w[1] < w[0]) {
            return Err(StudyError::BadList(format!(
                "{name} list must be strictly decreasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

fn run_silent(state: SimState, params: &ModelParams, t_end: f64) -> Result<SimState, StudyError> {
    let span = t_end - state.t;
    Ok(models::run(state, params, t_end, span, &mut [])?)
}

/// Substitution error of the disk-averaged alignment rate: Model I is run
/// with averaging radius ε for each ε against the localized-rate reference,
/// from the same start to the same horizon (`cfg.t_end`). Errors are final
/// L² distances; expected order in ε is 2 (mean of a disk sample of a smooth
/// field). Runs Model I regardless of `cfg.model`.
pub fn study_localization(cfg: &RunConfig, eps_list: &[f64]) -> Result<RateTable, StudyError> {
    check_list("eps", eps_list, 0.0, 0.499_999_999)?;
    let out = ensure_out(cfg)?;
    let f0 = cfg.initial_field()?;

    let mut params = ModelParams::new(ModelKind::ModelI, cfg.dt);
    params.alignment.form = cfg.align_form;
    params.alignment.bound = cfg.align_bound;
    params.alignment.radius = 0.0;

    let reference = run_silent(SimState::new(f0.clone()), &params, cfg.t_end)?;
    if let Some(dir) = &out {
        io::write_field(&dir.join("field_reference.bin"), &reference.f)?;
    }

    let mut errors = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        params.alignment.radius = eps;
        let state = run_silent(SimState::new(f0.clone()), &params, cfg.t_end)?;
        errors.push(state.f.l2_distance(&reference.f));
        if let Some(dir) = &out {
            io::write_field(&dir.join(format!("field_eps_{eps}.bin")), &state.f)?;
        }
    }

    let table = RateTable::new(eps_list.to_vec(), errors, false);
    if let Some(dir) = &out {
        table.write_csv(&dir.join("localization.csv"), "eps")?;
    }
    Ok(table)
}

/// Fast-reversal limit: the scaled model at each ε against the leading-order
/// equation (uni-directional diffusion with the asymptotic coefficient 1/2,
/// orientation diffusion, localized alignment). Scaled runs use the
/// disk-averaged rate at radius ε and a per-ε time step capped at ε²/20 so
/// splitting bias stays far below the O(ε) distances being measured.
pub fn study_diffusion_limit(cfg: &RunConfig, eps_list: &[f64]) -> Result<RateTable, StudyError> {
    check_list("eps", eps_list, 0.0, 1.0)?;
    let out = ensure_out(cfg)?;
    let f0 = cfg.initial_field()?;
    let sym = nematic_symmetry_error(&f0);
    let tol = 1e-10 * l2_norm(&f0).max(1.0);
    if sym > tol {
        return Err(StudyError::NotSymmetric { got: sym, tol });
    }

    let mut ref_params = ModelParams::new(ModelKind::ModelII, cfg.dt);
    ref_params.alignment.form = cfg.align_form;
    ref_params.alignment.bound = cfg.align_bound;
    ref_params.alignment.radius = 0.0;
    ref_params.xdiff_coef = DIFFUSION_LIMIT_XDIFF_COEF;
    let reference = run_silent(SimState::new(f0.clone()), &ref_params, cfg.t_end)?;
    if let Some(dir) = &out {
        io::write_field(&dir.join("field_reference.bin"), &reference.f)?;
    }

    let mut errors = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let dt_target = cfg.dt.min(SCALED_DT_FACTOR * eps * eps);
        let steps = (cfg.t_end / dt_target).ceil().max(1.0);
        let mut params = ModelParams::new(ModelKind::ModelIScaled, cfg.t_end / steps);
        params.eps_scale = eps;
        params.alignment.form = cfg.align_form;
        params.alignment.bound = cfg.align_bound;
        params.alignment.radius = eps;
        let state = run_silent(SimState::new(f0.clone()), &params, cfg.t_end)?;
        errors.push(state.f.l2_distance(&reference.f));
        if let Some(dir) = &out {
            io::write_field(&dir.join(format!("field_eps_{eps}.bin")), &state.f)?;
        }
    }

    let table = RateTable::new(eps_list.to_vec(), errors, false);
    if let Some(dir) = &out {
        table.write_csv(&dir.join("diffusion_limit.csv"), "eps")?;
    }
    Ok(table)
}

/// The ensemble parameters that put the rod model in exact correspondence
/// with the unit-coefficient kinetic equation: alignment strength 1/N with
/// clamp bound N (rod area π/N), all-to-all interaction, orientation noise
/// √2, unit reversal rate, no self-propulsion. A rate set to exactly 0 in
/// `base` stays 0 and disables the matching kinetic term too.
fn matched_agent_params(base: &AgentParams, n: usize) -> AgentParams {
    let lw = (PI / n as f64).sqrt();
    AgentParams {
        v0: 0.0,
        gamma: if base.gamma == 0.0 { 0.0 } else { 1.0 / n as f64 },
        sigma: if base.sigma == 0.0 { 0.0 } else { std::f64::consts::SQRT_2 },
        lambda: if base.lambda == 0.0 { 0.0 } else { 1.0 },
        radius: 1.0,
        length: lw,
        width: lw,
        form: base.form,
    }
}

/// Mean-field convergence of the homogeneous rod ensemble: for each N the
/// ensemble's orientation histogram at `t_end` is compared in L²(θ) with the
/// bin-aggregated kinetic marginal; errors are averaged over
/// [`AGENT_STUDY_SEEDS`] replicas and fitted as a power of N (Monte-Carlo
/// scaling predicts exponent −1/2). Requires `cfg.agents.v0 == 0`, an
/// x-uniform analytic initial state, and `nbins` dividing
/// [`AGENT_REFERENCE_NTHETA`].
pub fn study_agents_vs_kinetic(cfg: &RunConfig, n_list: &[usize]) -> Result<RateTable, StudyError> {
    if n_list.is_empty() {
        return Err(StudyError::BadList("N list is empty".to_string()));
    }
    for w in n_list.windows(2) {
        if w[1] <= w[0] {
            return Err(StudyError::BadList(
                "N list must be strictly increasing".to_string(),
            ));
        }
    }
    if n_list[0] == 0 {
        return Err(StudyError::BadList("N must be positive".to_string()));
    }
    if cfg.agents.v0 != 0.0 {
        return Err(StudyError::NotHomogeneous(format!(
            "self-propulsion v0 = {} must be 0",
            cfg.agents.v0
        )));
    }
    match &cfg.init {
        InitialCondition::Isotropic | InitialCondition::Bump { .. } => {}
        InitialCondition::TwoMode { a2, .. } if *a2 == 0.0 => {}
        other => {
            return Err(StudyError::NotHomogeneous(format!(
                "initial state {other:?} is not analytic and x-uniform"
            )));
        }
    }
    let nbins = cfg.nbins;
    if AGENT_REFERENCE_NTHETA % nbins != 0 {
        return Err(StudyError::BadList(format!(
            "nbins = {nbins} must divide the reference orientation resolution \
             {AGENT_REFERENCE_NTHETA}"
        )));
    }
    let out = ensure_out(cfg)?;

    // Kinetic reference: the same initial profile on a fine orientation grid,
    // run as Model I with any zeroed agent rate's term disabled.
    let mut ref_cfg = cfg.clone();
    ref_cfg.nx = 4;
    ref_cfg.ny = 4;
    ref_cfg.ntheta = AGENT_REFERENCE_NTHETA;
    ref_cfg.out = None;
    let f0_ref = ref_cfg.initial_field()?;
    let mut params = ModelParams::new(ModelKind::ModelI, cfg.dt);
    params.alignment.bound = 1.0;
    params.alignment.radius = 0.0;
    params.terms.alignment = cfg.agents.gamma != 0.0;
    params.terms.theta_diffusion = cfg.agents.sigma != 0.0;
    params.terms.reversal = cfg.agents.lambda != 0.0;
    let reference = run_silent(SimState::new(f0_ref.clone()), &params, cfg.t_end)?;
    if let Some(dir) = &out {
        io::write_field(&dir.join("field_reference.bin"), &reference.f)?;
    }

    // Aggregate the reference marginal into histogram bins by node index:
    // nodes sit at bin left edges, so each bin takes an equal run of nodes.
    let grid = reference.f.grid();
    let per_bin = AGENT_REFERENCE_NTHETA / nbins;
    let mut ref_bins = vec![0.0; nbins];
    for (b, rb) in ref_bins.iter_mut().enumerate() {
        let mut acc = 0.0;
        for k in b * per_bin..(b + 1) * per_bin {
            let mut m = 0.0;
            for i in 0..grid.nx() {
                for j in 0..grid.ny() {
                    m += reference.f.values[[i, j, k]];
                }
            }
            acc += m / (grid.nx() * grid.ny()) as f64;
        }
        *rb = acc / per_bin as f64;
    }
    let db = 2.0 * PI / nbins as f64;

    let steps = (cfg.t_end / cfg.dt).round() as u64;
    let mut errors = Vec::with_capacity(n_list.len());
    for (ni, &n) in n_list.iter().enumerate() {
        let aparams = matched_agent_params(&cfg.agents, n);
        let mut acc = 0.0;
        for s in 0..AGENT_STUDY_SEEDS {
            let run_seed = rng::mix(cfg.seed, ni as u64, s, 0xA6E1);
            let mut ens = AgentEnsemble::sample_from_field(&f0_ref, n, run_seed)?;
            for _ in 0..steps {
                ens = step_agents(&ens, &aparams, cfg.dt)?;
            }
            let hist = theta_histogram(&ens, nbins);
            let err_sq: f64 = hist
                .iter()
                .zip(&ref_bins)
                .map(|(h, r)| (h - r) * (h - r) * db)
                .sum();
            acc += err_sq.sqrt();
            if let Some(dir) = &out {
                let rows: Vec<Vec<f64>> = hist
                    .iter()
                    .zip(&ref_bins)
                    .enumerate()
                    .map(|(b, (&h, &r))| vec![-PI + (b as f64 + 0.5) * db, h, r])
                    .collect();
                io::write_csv(
                    &dir.join(format!("hist_n{n}_s{s}.csv")),
                    &["theta", "ensemble", "kinetic"],
                    &rows,
                )?;
            }
        }
        errors.push(acc / AGENT_STUDY_SEEDS as f64);
    }

    let labels: Vec<f64> = n_list.iter().map(|&n| n as f64).collect();
    let table = RateTable::new(labels, errors, true);
    if let Some(dir) = &out {
        table.write_csv(&dir.join("agents_vs_kinetic.csv"), "n")?;
    }
    Ok(table)
}

/// Moment labels and weights for the averaging-norm pipeline.
fn norm_moments(grid: GridSpec) -> Vec<(String, Vec<f64>)> {
    vec![
        ("one".to_string(), grid.sample_theta(|_| 1.0)),
        (
            "cos2theta".to_string(),
            grid.sample_theta(|t| (2.0 * t).cos()),
        ),
        (
            "sin2theta".to_string(),
            grid.sample_theta(|t| (2.0 * t).sin()),
        ),
    ]
}

/// Runs the regularized uni-directional model once per regularization
/// strength, collects the density and both nematic moments at every cadence
/// tick, and reports each moment's fractional space-time norm. Bounded-ness
/// of the family shows up as a small max/min ratio across strengths.
pub fn study_norms(cfg: &RunConfig, eps_list: &[f64]) -> Result<NormTable, StudyError> {
    check_list("eps_reg", eps_list, 0.0, f64::MAX)?;
    let out = ensure_out(cfg)?;
    let f0 = cfg.initial_field()?;
    let grid = f0.grid();
    let moments = norm_moments(grid);

    let mut values = vec![Vec::with_capacity(eps_list.len()); moments.len()];
    for &eps in eps_list {
        let mut params = ModelParams::new(ModelKind::ModelIIRegularized, cfg.dt);
        params.eps_reg = eps;
        params.alignment.form = cfg.align_form;
        params.alignment.bound = cfg.align_bound;
        params.alignment.radius = cfg.align_radius;
        let mut collectors: Vec<MomentCollector> = moments
            .iter()
            .map(|(_, phi)| MomentCollector::new(phi.clone()))
            .collect();
        {
            let mut obs: Vec<&mut dyn Observer> = collectors
                .iter_mut()
                .map(|c| c as &mut dyn Observer)
                .collect();
            let state = models::run(
                SimState::new(f0.clone()),
                &params,
                cfg.t_end,
                cfg.cadence,
                &mut obs,
            )?;
            if let Some(dir) = &out {
                io::write_field(&dir.join(format!("field_eps_{eps}.bin")), &state.f)?;
            }
        }
        for (p, c) in collectors.into_iter().enumerate() {
            let window = c.finish()?;
            values[p].push(fractional_norm(&window, FRACTIONAL_EXPONENT));
        }
    }

    let table = NormTable {
        eps: eps_list.to_vec(),
        phi_labels: moments.into_iter().map(|(l, _)| l).collect(),
        values,
    };
    if let Some(dir) = &out {
        table.write_csv(&dir.join("norms.csv"))?;
    }
    Ok(table)
}
