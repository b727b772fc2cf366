//! Seeded Monte Carlo runs of the protocol under stochastic loss and Pauli noise.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::faultsim::{ClassRates, FaultSchedule, SimState};
use crate::harness::ftec::decode_ideal;
use crate::pauli::PauliOp;
use crate::protocol::{max_rounds, run_strong_protocol, ProtocolOptions, Verdict};
use crate::stab::{QuditSet, StabilizerGroup};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MonteCarloConfig {
    pub trials: u64,
    pub seed: u64,
    pub p_pauli: ClassRates,
    pub p_loss: ClassRates,
    #[serde(default)]
    pub cat_prep_faults: bool,
    #[serde(default)]
    pub protocol: ProtocolOptions,
}

impl MonteCarloConfig {
    pub fn uniform(trials: u64, seed: u64, p_pauli: f64, p_loss: f64) -> Self {
        Self {
            trials,
            seed,
            p_pauli: ClassRates::uniform(p_pauli),
            p_loss: ClassRates::uniform(p_loss),
            cat_prep_faults: false,
            protocol: ProtocolOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("montecarlo needs at least one trial".into()));
        }
        let rates = [self.p_pauli, self.p_loss];
        if rates.iter().flat_map(|r| [r.gate, r.idle, r.measurement, r.tldu]).any(|p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::Config("probabilities must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer; decorrelates per-trial seeds drawn from one master seed.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let mut z = master ^ trial.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Trial {
    pub verdict: Verdict,
    pub logical_error: bool,
    pub rounds: usize,
    pub measurements: usize,
    pub erasures: usize,
    /// Data qudits affected by losses: replaced, or hit by a Pauli from a collapsed cat.
    pub affected: usize,
    pub erasure_measurements: usize,
    pub pauli_faults: usize,
    pub losses: usize,
    /// `rounds ≤ max_rounds(t, erasures)`; rejected runs are exempt.
    pub rounds_within_bound: bool,
}

/// Runs trial `index` of `cfg` on `code`.
pub fn run_trial(code: &StabilizerGroup, cfg: &MonteCarloConfig, purified: &[PauliOp], index: u64) -> Result<Trial> {
    let schedule = FaultSchedule { cat_prep_faults: cfg.cat_prep_faults, ..FaultSchedule::stochastic(cfg.p_pauli, cfg.p_loss) };
    let mut st = SimState::codeword(code, trial_seed(cfg.seed, index), &schedule)?;
    let out = run_strong_protocol(&mut st, code, &cfg.protocol)?;
    let logical_error = if out.verdict == Verdict::Reject {
        false
    } else {
        let lost: QuditSet = (0..code.n()).filter(|&q| st.is_lost(st.data_phys(q))).collect();
        let located: QuditSet = out.affected.union(&lost).copied().collect();
        match decode_ideal(&st, code, &located) {
            Ok(dec) => !dec.stabilized_by(purified),
            Err(Error::TooManyErasures { .. }) => true,
            Err(e) => return Err(e),
        }
    };
    let counts = st.fault_counts();
    Ok(Trial {
        verdict: out.verdict,
        logical_error,
        rounds: out.rounds,
        measurements: out.measurements,
        erasures: out.erased.len(),
        affected: out.affected.len(),
        erasure_measurements: out.erasure_measurements,
        pauli_faults: counts.pauli,
        losses: counts.losses,
        rounds_within_bound: out.verdict == Verdict::Reject || out.rounds <= max_rounds(code.t()?, out.erased.len()),
    })
}

/// A rate with its 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub count: u64,
    pub total: u64,
    pub estimate: f64,
    pub low: f64,
    pub high: f64,
}

impl Rate {
    pub fn wilson(count: u64, total: u64) -> Self {
        const Z: f64 = 1.959_963_984_540_054;
        if total == 0 {
            return Self { count, total, estimate: 0.0, low: 0.0, high: 1.0 };
        }
        let n = total as f64;
        let p = count as f64 / n;
        let denom = 1.0 + Z * Z / n;
        let centre = (p + Z * Z / (2.0 * n)) / denom;
        let half = Z * (p * (1.0 - p) / n + Z * Z / (4.0 * n * n)).sqrt() / denom;
        let low = if count == 0 { 0.0 } else { (centre - half).max(0.0) };
        let high = if count == total { 1.0 } else { (centre + half).min(1.0) };
        Self { count, total, estimate: p, low, high }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MonteCarloStats {
    pub trials: u64,
    /// Logical errors among non-rejected trials.
    pub logical_error_rate: Rate,
    pub rejection_rate: Rate,
    pub mean_rounds: f64,
    pub max_rounds: usize,
    pub mean_measurements: f64,
    pub max_measurements: usize,
    pub max_erasures: usize,
    pub max_erasure_measurements: usize,
    /// Non-rejected trials whose erasure-attributable extra measurements exceed `2(dist − 1)`.
    pub extra_measurement_violations: u64,
    /// Non-rejected trials with more rounds than `max_rounds(t, erasures)`.
    pub round_bound_violations: u64,
    pub rounds_histogram: BTreeMap<usize, u64>,
    pub erasures_histogram: BTreeMap<usize, u64>,
}

/// Runs every trial in parallel and aggregates in trial order, so output depends only on
/// `(code, cfg)`.
pub fn run_montecarlo(code: &StabilizerGroup, cfg: &MonteCarloConfig) -> Result<MonteCarloStats> {
    cfg.validate()?;
    let purified = SimState::purified_generators(code)?;
    let trials: Vec<Trial> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(code, cfg, &purified, i))
        .collect::<Result<_>>()?;
    let dist = code.dist()?;
    let n = trials.len() as u64;
    let rejected = trials.iter().filter(|t| t.verdict == Verdict::Reject).count() as u64;
    let failures = trials.iter().filter(|t| t.logical_error).count() as u64;
    let mut rounds_histogram = BTreeMap::new();
    let mut erasures_histogram = BTreeMap::new();
    for t in &trials {
        *rounds_histogram.entry(t.rounds).or_insert(0) += 1;
        *erasures_histogram.entry(t.erasures).or_insert(0) += 1;
    }
    let mean = |f: fn(&Trial) -> usize| trials.iter().map(|t| f(t) as f64).sum::<f64>() / n as f64;
    Ok(MonteCarloStats {
        trials: n,
        logical_error_rate: Rate::wilson(failures, n - rejected),
        rejection_rate: Rate::wilson(rejected, n),
        mean_rounds: mean(|t| t.rounds),
        max_rounds: trials.iter().map(|t| t.rounds).max().unwrap_or(0),
        mean_measurements: mean(|t| t.measurements),
        max_measurements: trials.iter().map(|t| t.measurements).max().unwrap_or(0),
        max_erasures: trials.iter().map(|t| t.erasures).max().unwrap_or(0),
        max_erasure_measurements: trials.iter().map(|t| t.erasure_measurements).max().unwrap_or(0),
        extra_measurement_violations: trials
            .iter()
            .filter(|t| t.verdict != Verdict::Reject && t.erasure_measurements > 2 * (dist - 1))
            .count() as u64,
        round_bound_violations: trials.iter().filter(|t| !t.rounds_within_bound).count() as u64,
        rounds_histogram,
        erasures_histogram,
    })
}
