//! Exhaustive checks of the strong fault-tolerance conditions under the mixed loss+Pauli model.
//!
//! Budgets are counted in half-units: an erasure or loss weighs 1, a Pauli error weighs 2,
//! and `2t` is the allowance.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correction::{correction_operator, subsets_up_to};
use crate::error::{Error, Result};
use crate::faultsim::{FaultEvent, FaultKind, FaultSchedule, SimState};
use crate::pauli::PauliOp;
use crate::protocol::{run_strong_protocol, ProtocolOptions, ProtocolOutcome, Verdict};
use crate::stab::{next_combination, QuditSet, StabilizerGroup, SyndromeRecord};
use crate::zmod;

/// Largest code the exhaustive verifier accepts.
pub const VERIFY_MAX_N: usize = 12;

/// Syndrome of `p` against `gens`.
fn sigma(gens: &[PauliOp], p: &PauliOp) -> Vec<u32> {
    gens.iter().map(|g| g.comm_unchecked(p)).collect()
}

/// Data slots whose physical qudit is currently lost.
fn lost_slots(st: &SimState) -> QuditSet {
    (0..st.n()).filter(|&q| st.is_lost(st.data_phys(q))).collect()
}

/// Replaces every lost data qudit and measures the reduced generators noiselessly.
fn ideal_syndrome(st: &mut SimState, code: &StabilizerGroup) -> Result<(SyndromeRecord, QuditSet)> {
    let lost = lost_slots(st);
    for &q in &lost {
        st.replace_data(q);
    }
    let gens = code.reduce()?.gens().to_vec();
    let values = gens.iter().map(|g| st.measure_data_ideal(g)).collect();
    Ok((SyndromeRecord { basis: gens, values }, lost))
}

/// Ideal decoder: replaces lost qudits, treats `erased` plus those as located, measures the
/// generators noiselessly and applies the correction. Fails with `TooManyErasures` when the
/// located set reaches the distance.
pub fn decode_ideal(st: &SimState, code: &StabilizerGroup, erased: &QuditSet) -> Result<SimState> {
    let mut s = st.clone();
    let (rec, lost) = ideal_syndrome(&mut s, code)?;
    let located: QuditSet = erased.union(&lost).copied().collect();
    let plan = correction_operator(code, &located, &rec)?;
    s.apply_data_pauli(&plan.recovery());
    Ok(s)
}

/// Smallest weight of a Pauli off the located set that, after every located qudit is
/// corrected, maps the state back into the code space; `None` if it exceeds `max_weight`.
pub fn residual_weight(st: &SimState, code: &StabilizerGroup, erased: &QuditSet, max_weight: usize) -> Result<Option<usize>> {
    let mut s = st.clone();
    let (rec, lost) = ideal_syndrome(&mut s, code)?;
    let located: QuditSet = erased.union(&lost).copied().collect();
    let (dim, n) = (code.dim(), code.n());
    let gens = rec.basis.clone();
    let target: Vec<u32> = rec.values.iter().map(|v| v.expect("noiseless after replacement")).collect();
    let rows: Vec<Vec<u32>> = located
        .iter()
        .flat_map(|&q| [(1, 0), (0, 1)].map(|(r, z)| sigma(&gens, &PauliOp::single(dim, n, q, r, z))))
        .collect();
    let explained = |v: &[u32]| {
        let diff: Vec<u32> = v.iter().zip(&target).map(|(&a, &b)| (a + dim - b) % dim).collect();
        if rows.is_empty() {
            diff.iter().all(|&x| x == 0)
        } else {
            zmod::in_span(&rows, &diff, dim)
        }
    };
    let free: Vec<usize> = (0..n).filter(|q| !located.contains(q)).collect();
    let letters = (dim * dim - 1) as usize;
    for w in 0..=max_weight.min(free.len()) {
        let mut c: Vec<usize> = (0..w).collect();
        loop {
            for mut code_word in 0..letters.pow(w as u32) {
                let mut p = PauliOp::identity(dim, n);
                for &i in &c {
                    let l = code_word % letters + 1;
                    code_word /= letters;
                    p = p.mul_unchecked(&PauliOp::single(dim, n, free[i], (l % dim as usize) as u32, (l / dim as usize) as u32));
                }
                if explained(&sigma(&gens, &p)) {
                    return Ok(Some(w));
                }
            }
            if w == 0 || !next_combination(&mut c, free.len()) {
                break;
            }
        }
    }
    Ok(None)
}

/// One replayable verification case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FtecCase {
    /// Input Pauli error on the data, in the operator text grammar.
    pub input_pauli: String,
    /// Data slots lost before the protocol starts.
    pub input_erased: Vec<usize>,
    pub schedule: FaultSchedule,
    pub seed: u64,
    pub options: ProtocolOptions,
}

impl FtecCase {
    /// Input weight in half-units.
    pub fn input_units(&self, dim: u32, n: usize) -> Result<usize> {
        Ok(self.input_erased.len() + 2 * PauliOp::parse(&self.input_pauli, dim, n)?.weight())
    }

    /// Internal fault weight in half-units.
    pub fn internal_units(&self) -> usize {
        self.schedule
            .events
            .iter()
            .map(|e| match e.kind {
                FaultKind::Loss { .. } => 1,
                FaultKind::Pauli { .. } => 2,
            })
            .sum()
    }
}

/// Runs the protocol on a case and returns the final state with the outcome.
pub fn replay(code: &StabilizerGroup, case: &FtecCase) -> Result<(SimState, ProtocolOutcome)> {
    let mut st = SimState::codeword(code, case.seed, &case.schedule)?;
    for &q in &case.input_erased {
        if q >= code.n() {
            return Err(Error::IndexError { index: q, n: code.n() });
        }
        st.lose_data(q);
    }
    st.apply_data_pauli(&PauliOp::parse(&case.input_pauli, code.dim(), code.n())?);
    let out = run_strong_protocol(&mut st, code, &case.options)?;
    Ok((st, out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Eccp,
    Ecrp,
    /// The protocol rejected although the case is within budget.
    Reject,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Violation {
    pub check: Check,
    pub case: FtecCase,
    pub verdict: Verdict,
    pub rounds: usize,
    /// Residual weight found by the recovery check, if within the search bound.
    pub residual: Option<usize>,
}

/// Outcome of checking one case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub verdict: Verdict,
    pub rounds: usize,
    pub erasures: usize,
    pub erasure_measurements: usize,
    /// `None` when the case is outside the correctness budget.
    pub eccp: Option<bool>,
    /// `None` when the internal faults exceed the budget.
    pub ecrp: Option<bool>,
    pub residual: Option<usize>,
}

/// Runs one case and evaluates both conditions for budget `t`.
pub fn check_case(code: &StabilizerGroup, t: usize, case: &FtecCase, purified: &[PauliOp]) -> Result<CaseResult> {
    let (st, out) = replay(code, case)?;
    let input = case.input_units(code.dim(), code.n())?;
    let internal = case.internal_units();
    let located: QuditSet = out.affected.union(&lost_slots(&st)).copied().collect();
    let eccp = if input + internal <= 2 * t {
        Some(match decode_ideal(&st, code, &located) {
            Ok(dec) => dec.stabilized_by(purified),
            Err(Error::TooManyErasures { .. }) => false,
            Err(e) => return Err(e),
        })
    } else {
        None
    };
    let (ecrp, residual) = if internal <= 2 * t && located.len() < code.dist()? {
        let bound = internal / 2;
        let w = residual_weight(&st, code, &located, bound)?;
        (Some(w.is_some_and(|w| w <= bound)), w)
    } else {
        (None, None)
    };
    Ok(CaseResult {
        verdict: out.verdict,
        rounds: out.rounds,
        erasures: out.erased.len(),
        erasure_measurements: out.erasure_measurements,
        eccp,
        ecrp,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyOptions {
    /// Correctable weight `t`.
    pub t: usize,
    pub pauli_faults: bool,
    pub loss_faults: bool,
    /// Also run every input Pauli of any weight without internal faults (recovery check only).
    pub arbitrary_inputs: bool,
    pub cat_prep_faults: bool,
    pub seed: u64,
    pub protocol: ProtocolOptions,
}

impl VerifyOptions {
    pub fn new(t: usize) -> Self {
        Self {
            t,
            pauli_faults: true,
            loss_faults: true,
            arbitrary_inputs: true,
            cat_prep_faults: false,
            seed: 0x5eed,
            protocol: ProtocolOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FtecReport {
    pub t: usize,
    pub cases: usize,
    pub eccp_checked: usize,
    pub ecrp_checked: usize,
    /// Cases outside both budgets; they constrain nothing.
    pub out_of_contract: usize,
    pub eccp_violations: usize,
    pub ecrp_violations: usize,
    pub rejected_within_budget: usize,
    pub max_rounds: usize,
    pub max_erasure_measurements: usize,
    pub violations: Vec<Violation>,
}

impl FtecReport {
    /// No correctness or recovery violation and no rejection inside the budget.
    pub fn passed(&self) -> bool {
        self.eccp_violations == 0 && self.ecrp_violations == 0 && self.rejected_within_budget == 0
    }
}

/// All nontrivial Pauli exponent pairs on `arity` operands.
fn operand_paulis(dim: u32, arity: usize) -> Vec<(Vec<u32>, Vec<u32>)> {
    let total = (dim as usize).pow(2 * arity as u32);
    (1..total)
        .map(|mut c| {
            let mut x = vec![0; arity];
            let mut z = vec![0; arity];
            for i in 0..arity {
                x[i] = (c % dim as usize) as u32;
                c /= dim as usize;
                z[i] = (c % dim as usize) as u32;
                c /= dim as usize;
            }
            (x, z)
        })
        .collect()
}

/// Every Pauli on the data of weight `w`, supported off `avoid`.
fn paulis_of_weight(dim: u32, n: usize, w: usize, avoid: &QuditSet) -> Vec<PauliOp> {
    let free: Vec<usize> = (0..n).filter(|q| !avoid.contains(q)).collect();
    if w > free.len() {
        return vec![];
    }
    let letters = (dim * dim - 1) as usize;
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..w).collect();
    loop {
        for mut idx in 0..letters.pow(w as u32) {
            let mut p = PauliOp::identity(dim, n);
            for &i in &c {
                let l = idx % letters + 1;
                idx /= letters;
                p = p.mul_unchecked(&PauliOp::single(dim, n, free[i], (l % dim as usize) as u32, (l / dim as usize) as u32));
            }
            out.push(p);
        }
        if w == 0 || !next_combination(&mut c, free.len()) {
            break;
        }
    }
    out
}

/// The cases the exhaustive verifier runs: every input within budget combined with no
/// fault, each single loss and (budget permitting) each single Pauli fault at every
/// location the fault-free run visits; plus, optionally, every input Pauli of any weight
/// without internal faults.
pub fn enumerate_cases(code: &StabilizerGroup, opts: &VerifyOptions) -> Result<Vec<FtecCase>> {
    let (dim, n) = (code.dim(), code.n());
    let budget = 2 * opts.t;
    let base = FaultSchedule { cat_prep_faults: opts.cat_prep_faults, ..FaultSchedule::empty() };
    let case = |pauli: &PauliOp, erased: &QuditSet, events: Vec<FaultEvent>| FtecCase {
        input_pauli: pauli.to_text(),
        input_erased: erased.iter().copied().collect(),
        schedule: FaultSchedule { events, ..base.clone() },
        seed: opts.seed,
        options: opts.protocol,
    };
    let mut inputs: Vec<(PauliOp, QuditSet)> = Vec::new();
    for erased in subsets_up_to(n, budget.min(n)) {
        let left = budget - erased.len();
        for w in 0..=left / 2 {
            for p in paulis_of_weight(dim, n, w, &erased) {
                inputs.push((p, erased.clone()));
            }
        }
    }
    let mut cases = Vec::new();
    for (pauli, erased) in &inputs {
        let base_case = case(pauli, erased, vec![]);
        let left = budget - base_case.input_units(dim, n)?;
        cases.push(base_case.clone());
        if left == 0 || !(opts.loss_faults || opts.pauli_faults) {
            continue;
        }
        let mut st = SimState::codeword(code, opts.seed, &base_case.schedule)?;
        st.record_visits();
        for &q in erased {
            st.lose_data(q);
        }
        st.apply_data_pauli(pauli);
        run_strong_protocol(&mut st, code, &opts.protocol)?;
        for v in st.visits().to_vec() {
            if opts.loss_faults {
                for operand in 0..v.arity {
                    cases.push(case(pauli, erased, vec![FaultEvent { location: v.location, kind: FaultKind::Loss { operand } }]));
                }
            }
            if opts.pauli_faults && left >= 2 {
                for (x, z) in operand_paulis(dim, v.arity) {
                    cases.push(case(pauli, erased, vec![FaultEvent { location: v.location, kind: FaultKind::Pauli { x, z } }]));
                }
            }
        }
    }
    if opts.arbitrary_inputs {
        for w in opts.t + 1..=n {
            for p in paulis_of_weight(dim, n, w, &QuditSet::new()) {
                cases.push(case(&p, &QuditSet::new(), vec![]));
            }
        }
    }
    Ok(cases)
}

/// Runs every enumerated case (in parallel) and collects violations of both conditions.
pub fn verify_ftec_exhaustive(code: &StabilizerGroup, opts: &VerifyOptions) -> Result<FtecReport> {
    if code.n() > VERIFY_MAX_N {
        return Err(Error::Config(format!("exhaustive verification needs n <= {VERIFY_MAX_N}, got {}", code.n())));
    }
    let purified = SimState::purified_generators(code)?;
    let cases = enumerate_cases(code, opts)?;
    let results: Vec<Result<CaseResult>> = cases.par_iter().map(|c| check_case(code, opts.t, c, &purified)).collect();
    let mut report = FtecReport { t: opts.t, cases: cases.len(), ..Default::default() };
    for (case, res) in cases.iter().zip(results) {
        let res = res?;
        report.max_rounds = report.max_rounds.max(res.rounds);
        report.max_erasure_measurements = report.max_erasure_measurements.max(res.erasure_measurements);
        let mut flag = |check: Check| {
            report.violations.push(Violation {
                check,
                case: case.clone(),
                verdict: res.verdict,
                rounds: res.rounds,
                residual: res.residual,
            })
        };
        if res.eccp.is_none() && res.ecrp.is_none() {
            report.out_of_contract += 1;
            continue;
        }
        if res.eccp.is_some() && res.verdict == Verdict::Reject {
            report.rejected_within_budget += 1;
            flag(Check::Reject);
        }
        if let Some(ok) = res.eccp {
            report.eccp_checked += 1;
            if !ok {
                report.eccp_violations += 1;
                flag(Check::Eccp);
            }
        }
        if let Some(ok) = res.ecrp {
            report.ecrp_checked += 1;
            if !ok {
                report.ecrp_violations += 1;
                flag(Check::Ecrp);
            }
        }
    }
    Ok(report)
}
