//! Oracles, exhaustive verification, Monte Carlo runs, audits and reporting.

pub mod audit;
pub mod config;
pub mod ftec;
pub mod montecarlo;
pub mod oracle;
pub mod report;
pub mod tables;

pub use audit::{canon_audit, eec_audit, CanonAudit, EecAudit};
pub use config::{run, ExperimentConfig, Mode, OutputFormat, RunReport};
pub use ftec::{verify_ftec_exhaustive, FtecReport, VerifyOptions};
pub use montecarlo::{run_montecarlo, MonteCarloConfig, MonteCarloStats, Rate};
pub use oracle::{oracle_min_measurements, oracle_min_sequence, sequence_restores};
pub use report::write_output;
pub use tables::{syndrome_table, SyndromeTable};
