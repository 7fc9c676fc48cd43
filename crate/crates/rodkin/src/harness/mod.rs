//! Run configuration, on-disk artifacts, and the built-in studies.
//!
//! * [`config`]: line-oriented `key = value` run configuration with strict
//!   validation, a serializer, and the initial-condition bank.
//! * [`io`]: the binary field-file format and CSV table output.
//! * [`studies`]: the localization, diffusion-limit, agent-vs-kinetic, and
//!   moment-norm experiments, each reporting a small table.

pub mod config;
pub mod io;
pub mod studies;

pub use config::{parse_config, serialize_config, ConfigError, InitialCondition, RunConfig, SProfile};
pub use io::IoError;
pub use studies::{
    study_agents_vs_kinetic, study_diffusion_limit, study_localization, study_norms, NormTable,
    RateTable, StudyError,
};
