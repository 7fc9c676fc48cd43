//! Command-line front end: one subcommand per experiment.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 I/O failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rodkin::agents::{
    bin_density, step_agents, theta_histogram, AgentEnsemble, AgentError,
};
use rodkin::diagnostics::{
    agent_nematic_order, nematic_symmetry_error, total_mass, EnergyLedger, LedgerLayout,
    MassTrace, SeriesTrace,
};
use rodkin::harness::config::{parse_config, serialize_config, ConfigError, RunConfig};
use rodkin::harness::io::{self, IoError};
use rodkin::harness::studies::{
    study_agents_vs_kinetic, study_diffusion_limit, study_localization, study_norms, NormTable,
    RateTable, StudyError,
};
use rodkin::models::{self, ModelError, ModelKind, Observer};

/// Simulator and verification studies for kinetic models of rod-shaped cells.
#[derive(Parser)]
#[command(name = "rodkin", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration file (line-oriented `key = value`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for fields and tables (overrides the config key).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed override.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Full kinetic model: transport, alignment, orientation diffusion,
    /// reversals.
    Model1(Common),
    /// The fast-reversal scaling (transport 1/ε, reversals 1/ε²).
    Model1Scaled(Common),
    /// Uni-directional diffusion model (regularized when eps_reg > 0).
    Model2(Common),
    /// Uni-directional diffusion with chemotaxis.
    Model3(Common),
    /// The stochastic rod ensemble.
    Agents(Common),
    /// Disk-averaged vs localized alignment rate, over averaging radii.
    StudyLocalization(Common),
    /// Scaled fast-reversal runs against the limit equation, over ε.
    StudyDiffusionLimit(Common),
    /// Ensemble orientation statistics against the kinetic marginal, over N.
    StudyAgents(Common),
    /// Moment-average norms across regularization strengths.
    Norms(Common),
}

enum AppError {
    Config(ConfigError),
    Model(ModelError),
    Agent(AgentError),
    Study(StudyError),
    Io(IoError),
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Config(e) => write!(f, "{e}"),
            AppError::Model(e) => write!(f, "{e}"),
            AppError::Agent(e) => write!(f, "{e}"),
            AppError::Study(e) => write!(f, "{e}"),
            AppError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError::Config(e)
    }
}
impl From<ModelError> for AppError {
    fn from(e: ModelError) -> Self {
        AppError::Model(e)
    }
}
impl From<AgentError> for AppError {
    fn from(e: AgentError) -> Self {
        AppError::Agent(e)
    }
}
impl From<StudyError> for AppError {
    fn from(e: StudyError) -> Self {
        AppError::Study(e)
    }
}
impl From<IoError> for AppError {
    fn from(e: IoError) -> Self {
        AppError::Io(e)
    }
}

fn exit_code(e: &AppError) -> u8 {
    match e {
        AppError::Config(_) => 2,
        AppError::Model(ModelError::NonFinite { .. }) => 3,
        AppError::Model(_) => 2,
        AppError::Agent(_) => 2,
        AppError::Study(StudyError::Model(ModelError::NonFinite { .. })) => 3,
        AppError::Study(StudyError::Io(_)) => 4,
        AppError::Study(_) => 2,
        AppError::Io(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig, AppError> {
    let text = match &common.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| AppError::Io(IoError::Io(e)))?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

fn dispatch(command: Command) -> Result<(), AppError> {
    match command {
        Command::Model1(c) => run_model(&c, ModelKind::ModelI),
        Command::Model1Scaled(c) => run_model(&c, ModelKind::ModelIScaled),
        Command::Model2(c) => {
            let cfg = load_config(&c)?;
            let kind = if cfg.eps_reg > 0.0 {
                ModelKind::ModelIIRegularized
            } else {
                ModelKind::ModelII
            };
            run_model_cfg(cfg, kind)
        }
        Command::Model3(c) => run_model(&c, ModelKind::ModelIII),
        Command::Agents(c) => run_agents(&c),
        Command::StudyLocalization(c) => {
            let cfg = load_config(&c)?;
            let table = study_localization(&cfg, &[0.2, 0.1, 0.05])?;
            print_rate_table("eps", &table);
            Ok(())
        }
        Command::StudyDiffusionLimit(c) => {
            let cfg = load_config(&c)?;
            let table = study_diffusion_limit(&cfg, &[0.2, 0.1, 0.05])?;
            print_rate_table("eps", &table);
            Ok(())
        }
        Command::StudyAgents(c) => {
            let cfg = load_config(&c)?;
            let table = study_agents_vs_kinetic(&cfg, &[1_000, 10_000, 100_000])?;
            print_rate_table("n", &table);
            Ok(())
        }
        Command::Norms(c) => {
            let cfg = load_config(&c)?;
            let table = study_norms(&cfg, &[1.0, 0.1, 0.01])?;
            print_norm_table(&table);
            Ok(())
        }
    }
}

fn run_model(common: &Common, kind: ModelKind) -> Result<(), AppError> {
    run_model_cfg(load_config(common)?, kind)
}

/// Runs one kinetic model to the configured horizon with the standard
/// observers and writes the artifact set.
fn run_model_cfg(mut cfg: RunConfig, kind: ModelKind) -> Result<(), AppError> {
    cfg.model = kind;
    let params = cfg.model_params();
    params.validate()?;
    let state = cfg.initial_state()?;
    let mass0 = total_mass(&state.f);

    let layout = match kind {
        ModelKind::ModelI | ModelKind::ModelIScaled => LedgerLayout::Reversal,
        _ => LedgerLayout::Directional {
            eps_reg: cfg.eps_reg,
        },
    };
    let mut mass = MassTrace::default();
    let mut ledger = EnergyLedger::new(layout);
    let mut symmetry = SeriesTrace::new(|s: &rodkin::SimState| nematic_symmetry_error(&s.f));
    let final_state = {
        let mut obs: Vec<&mut dyn Observer> = vec![&mut mass, &mut ledger, &mut symmetry];
        models::run(state, &params, cfg.t_end, cfg.cadence, &mut obs)?
    };

    let mass_drift = mass
        .series
        .iter()
        .map(|(_, m)| (m - mass0).abs())
        .fold(0.0, f64::max);
    println!(
        "{}: t = {}, mass drift {:.3e}, energy ledger {}, half-turn asymmetry {:.3e}",
        model_name(kind),
        final_state.t,
        mass_drift,
        if ledger.satisfied() {
            "satisfied"
        } else {
            "VIOLATED"
        },
        symmetry.series.last().map(|&(_, v)| v).unwrap_or(0.0),
    );

    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir).map_err(|e| AppError::Io(IoError::Io(e)))?;
        std::fs::write(dir.join("config.txt"), serialize_config(&cfg))
            .map_err(|e| AppError::Io(IoError::Io(e)))?;
        io::write_field(&dir.join("field_final.bin"), &final_state.f)?;
        io::write_series_csv(&dir.join("mass.csv"), "mass", &mass.series)?;
        io::write_series_csv(&dir.join("symmetry.csv"), "asymmetry", &symmetry.series)?;
        io::write_ledger_csv(&dir.join("ledger.csv"), &ledger)?;
    }
    Ok(())
}

fn model_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::ModelI => "model1",
        ModelKind::ModelIScaled => "model1-scaled",
        ModelKind::ModelII => "model2",
        ModelKind::ModelIIRegularized => "model2 (regularized)",
        ModelKind::ModelIII => "model3",
    }
}

/// Runs the rod ensemble from the configured initial density and reports the
/// orientation histogram, order parameter, and reversal statistics.
fn run_agents(common: &Common) -> Result<(), AppError> {
    let cfg = load_config(common)?;
    let f0 = cfg.initial_field()?;
    let mut ens = AgentEnsemble::sample_from_field(&f0, cfg.agents_n, cfg.seed)?;
    let steps = (cfg.t_end / cfg.dt).round() as u64;
    let cadence_steps = (cfg.cadence / cfg.dt).round() as u64;
    let mut order_series = vec![(ens.t, agent_nematic_order(&ens.theta))];
    for i in 1..=steps {
        ens = step_agents(&ens, &cfg.agents, cfg.dt)?;
        if i % cadence_steps == 0 {
            order_series.push((ens.t, agent_nematic_order(&ens.theta)));
        }
    }
    let total_reversals: u64 = ens.reversals.iter().sum();
    let order = agent_nematic_order(&ens.theta);
    println!(
        "agents: N = {}, t = {}, nematic order {:.4}, mean reversals {:.3}",
        ens.n(),
        ens.t,
        order,
        total_reversals as f64 / ens.n() as f64,
    );

    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir).map_err(|e| AppError::Io(IoError::Io(e)))?;
        std::fs::write(dir.join("config.txt"), serialize_config(&cfg))
            .map_err(|e| AppError::Io(IoError::Io(e)))?;
        let hist = theta_histogram(&ens, cfg.nbins);
        let db = 2.0 * std::f64::consts::PI / cfg.nbins as f64;
        let rows: Vec<Vec<f64>> = hist
            .iter()
            .enumerate()
            .map(|(b, &h)| vec![-std::f64::consts::PI + (b as f64 + 0.5) * db, h])
            .collect();
        io::write_csv(&dir.join("theta_hist.csv"), &["theta", "density"], &rows)?;
        io::write_series_csv(&dir.join("order.csv"), "nematic_order", &order_series)?;
        io::write_field(&dir.join("field_final.bin"), &bin_density(&ens, f0.grid()))?;
    }
    Ok(())
}

fn print_rate_table(label: &str, table: &RateTable) {
    println!("{label:>12} {:>14} {:>10}", "error", "order");
    for (i, (&l, &e)) in table.labels.iter().zip(&table.errors).enumerate() {
        if i == 0 {
            println!("{l:>12} {e:>14.6e} {:>10}", "-");
        } else {
            println!("{l:>12} {e:>14.6e} {:>10.3}", table.orders[i - 1]);
        }
    }
    if let Some(fit) = table.fit_exponent {
        println!("log-log fit exponent: {fit:.3}");
    }
}

fn print_norm_table(table: &NormTable) {
    print!("{:>10}", "eps_reg");
    for l in &table.phi_labels {
        print!(" {:>16}", l);
    }
    println!();
    for (e, &eps) in table.eps.iter().enumerate() {
        print!("{eps:>10}");
        for p in 0..table.phi_labels.len() {
            print!(" {:>16.6e}", table.values[p][e]);
        }
        println!();
    }
    for (p, l) in table.phi_labels.iter().enumerate() {
        println!("max/min ratio for {l}: {:.3}", table.ratio(p));
    }
}
