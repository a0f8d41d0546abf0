//! Experiment orchestration: configs, PDE runs with TV monitoring, tables.

pub mod config;
pub mod experiment;
pub mod tables;

pub use config::{parse_config, read_config, ConfigFile};
pub use experiment::{
    convergence_rates, run_pde, tvd_verdict, ExperimentId, PdeRun, RunConfig, TvColumn, TvMonitor,
    TvRow, TvTimeSeries, TvdVerdict,
};
pub use tables::{run_experiment, write_table, Output};
