//! `lossftec`: exhaustive verification, Monte Carlo runs and audits from the command line.
//!
//! Exit status: 0 when every check passes, 1 when a violation is found, 2 on usage or
//! input errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lossftec::faultsim::ClassRates;
use lossftec::harness::config::{CanonTarget, ExperimentConfig, Mode};
use lossftec::harness::{run, write_output};
use lossftec::protocol::ProtocolOptions;

#[derive(Parser)]
#[command(name = "lossftec", version, about = "Loss-tolerant syndrome extraction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Report format.
    #[arg(long, default_value = "text", value_parser = ["json", "text", "csv"])]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed.
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
}

#[derive(Args)]
struct ProtocolArgs {
    /// Use the amended stopping and correction rules instead of the literal ones.
    #[arg(long)]
    amended: bool,
    /// Let cat-state preparation fail too.
    #[arg(long)]
    cat_prep_faults: bool,
}

impl ProtocolArgs {
    fn options(&self) -> ProtocolOptions {
        if self.amended {
            ProtocolOptions::amended()
        } else {
            ProtocolOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check ECCP and ECRP on every within-budget fault schedule.
    Verify {
        /// Code file, or `builtin:<name>`.
        #[arg(long)]
        code: PathBuf,
        /// Fault budget; defaults to ⌊(dist − 1)/2⌋.
        #[arg(long)]
        t: Option<usize>,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Stochastic Pauli and loss noise on every circuit location.
    Montecarlo {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        p_pauli: f64,
        #[arg(long)]
        p_loss: f64,
        #[arg(long)]
        trials: u64,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the EEC measurement-count formulas with brute-force search.
    EecAudit {
        #[arg(long)]
        code: PathBuf,
        /// Largest erased set; defaults to dist − 1.
        #[arg(long)]
        max_erasures: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Check canonical generating sets of random groups on every bipartition.
    CanonAudit {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        n: usize,
        /// Number of random groups.
        #[arg(long, default_value_t = 200)]
        groups: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run an experiment described by a JSON configuration file.
    Run {
        config: PathBuf,
    },
}

fn configure(command: Command) -> ExperimentConfig {
    let (mut cfg, common) = match command {
        Command::Verify { code, t, protocol, common } => {
            let mut cfg = ExperimentConfig::new(Mode::VerifyExhaustive, Some(code), common.seed);
            cfg.limits.t = t;
            cfg.protocol = protocol.options();
            cfg.cat_prep_faults = protocol.cat_prep_faults;
            (cfg, common)
        }
        Command::Montecarlo { code, p_pauli, p_loss, trials, protocol, common } => {
            let mut cfg = ExperimentConfig::new(Mode::Montecarlo, Some(code), common.seed);
            cfg.trials = trials;
            cfg.noise.p_pauli = ClassRates::uniform(p_pauli);
            cfg.noise.p_loss = ClassRates::uniform(p_loss);
            cfg.protocol = protocol.options();
            cfg.cat_prep_faults = protocol.cat_prep_faults;
            (cfg, common)
        }
        Command::EecAudit { code, max_erasures, common } => {
            let mut cfg = ExperimentConfig::new(Mode::EecAudit, Some(code), common.seed);
            cfg.limits.max_erasures = max_erasures;
            (cfg, common)
        }
        Command::CanonAudit { dim, n, groups, common } => {
            let mut cfg = ExperimentConfig::new(Mode::CanonAudit, None, common.seed);
            cfg.canon = Some(CanonTarget { dim, n, groups });
            (cfg, common)
        }
        Command::Run { .. } => unreachable!("configured from file"),
    };
    cfg.output.format = common.format.parse().expect("restricted by clap");
    cfg.output.path = common.out;
    cfg
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.command {
        Command::Run { config } => ExperimentConfig::load(&config),
        other => Ok(configure(other)),
    };
    let result = cfg.and_then(|cfg| {
        let report = run(&cfg)?;
        let text = report.render(cfg.output.format)?;
        match &cfg.output.path {
            Some(path) => write_output(path, &text)?,
            None => print!("{text}"),
        }
        Ok(report.passed())
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("lossftec: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use lossftec::harness::config::OutputFormat;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn format_values_parse() {
        for f in ["json", "text", "csv"] {
            assert!(f.parse::<OutputFormat>().is_ok());
        }
    }
}
