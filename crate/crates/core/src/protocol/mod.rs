//! Adaptive, loss-tolerant Shor-style syndrome measurement.
//!
//! One round measures a minimal generating set with [`syndrome_string_extraction`]; a loss
//! detected by a gadget switches to the canonical generating set for the affected qudits and
//! re-measures only what the loss invalidated. [`run_strong_protocol`] repeats rounds until
//! the difference vector certifies a usable syndrome string.

mod delta;

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::correction::{correction_operator_with, CorrectionPlan, Representatives};
use crate::error::{Error, Result};
use crate::faultsim::{Outcome, SimState};
use crate::pauli::PauliOp;
use crate::stab::{canonical_gen_set, CanonicalGenSet, QuditSet, StabilizerGroup, SyndromeRecord};
use crate::zmod;

pub use delta::{find_usable_substring, find_usable_substring_outer, Block, DifferenceVector};

/// A gadget that returned INVALID during a round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InvalidEvent {
    /// 1-based position in the round's measurement sequence.
    pub position: usize,
    /// `L_g`.
    pub affected: QuditSet,
    /// `R_g`.
    pub replaced: QuditSet,
    /// Measurements this event added to the round: the wasted one plus every previously
    /// valid entry the basis change or the refresh invalidated.
    pub cost: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RoundRecord {
    pub index: u32,
    pub basis_start: Vec<PauliOp>,
    pub basis_end: Vec<PauliOp>,
    /// `s⃗_i` in `basis_end`.
    pub syndrome: SyndromeRecord,
    /// `R_i`: data qudits erased at least once in this round.
    pub erased_this_round: QuditSet,
    /// Union of the `L_g` of this round's INVALID outcomes (erased or syndrome-qudit loss).
    pub affected_this_round: QuditSet,
    /// `p_j` for qudits in `R_i`: 0 for an input loss, otherwise the 1-based position of the
    /// measurement that first erased it. Absent qudits have `p_j = r + 1`.
    pub first_erasure_positions: BTreeMap<usize, usize>,
    /// `A_i`: indices into `basis_end` of generators whose support meets `R_i`.
    pub refreshed_gens: Vec<usize>,
    pub measurements: usize,
    pub invalid_events: Vec<InvalidEvent>,
}

impl RoundRecord {
    /// `p_j` with the never-erased default `r + 1`.
    pub fn position(&self, q: usize) -> usize {
        self.first_erasure_positions.get(&q).copied().unwrap_or(self.basis_start.len() + 1)
    }

    /// Measurements added by INVALID outcomes with at least one erased data qudit.
    pub fn erasure_cost(&self) -> usize {
        self.invalid_events.iter().filter(|e| !e.replaced.is_empty()).map(|e| e.cost).sum()
    }
}

/// Result of one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    /// The round returned the rejection symbol.
    pub rejected: bool,
    /// Cumulative erased set `R` after the round.
    pub erased: QuditSet,
    pub record: RoundRecord,
}

/// One round of syndrome string extraction from basis `s`, given the qudits `r0` erased in
/// earlier rounds.
///
/// Returns early, possibly with INVALID entries, once `dist - 1` distinct data qudits have
/// been erased, and rejects once `dist` have.
pub fn syndrome_string_extraction(
    st: &mut SimState,
    code: &StabilizerGroup,
    s: &[PauliOp],
    r0: &QuditSet,
    round: u32,
) -> Result<Extraction> {
    extract_round(st, code, s, r0, round, true)
}

/// [`syndrome_string_extraction`], optionally finishing the round at `dist - 1` erasures
/// instead of returning early.
fn extract_round(
    st: &mut SimState,
    code: &StabilizerGroup,
    s: &[PauliOp],
    r0: &QuditSet,
    round: u32,
    budget_stop: bool,
) -> Result<Extraction> {
    let dist = code.dist()?;
    let mut basis = s.to_vec();
    let mut syn = SyndromeRecord { basis: basis.clone(), values: vec![None; basis.len()] };
    let mut erased = r0.clone();
    let mut record = RoundRecord {
        index: round,
        basis_start: basis.clone(),
        basis_end: vec![],
        syndrome: syn.clone(),
        erased_this_round: QuditSet::new(),
        affected_this_round: QuditSet::new(),
        first_erasure_positions: BTreeMap::new(),
        refreshed_gens: vec![],
        measurements: 0,
        invalid_events: vec![],
    };
    let mut queue: VecDeque<usize> = (0..basis.len()).collect();
    let mut rejected = false;
    while let Some(idx) = queue.pop_front() {
        record.measurements += 1;
        let pos = record.measurements;
        st.set_context(round, pos as u32);
        let res = st.measure_stabilizer(&basis[idx]);
        for &q in &res.replaced {
            if record.erased_this_round.insert(q) {
                let input = res.loss_locations.get(&q).is_some_and(|l| l.round < round);
                record.first_erasure_positions.insert(q, if input { 0 } else { pos });
            }
            erased.insert(q);
        }
        if res.outcome == Outcome::Reject || erased.len() >= dist {
            rejected = true;
            break;
        }
        if budget_stop && erased.len() == dist - 1 {
            break;
        }
        match res.outcome {
            Outcome::Value(v) => syn.values[idx] = Some(v),
            _ => {
                record.affected_this_round.extend(res.affected.iter().copied());
                let valid_before = syn.values.iter().filter(|v| v.is_some()).count();
                // A loss pattern carrying a logical operator cannot be cleaned; nothing
                // trustworthy can be measured afterwards.
                let canon = match canonical_gen_set(code, &res.affected) {
                    Ok(c) => c,
                    Err(Error::NotCleanable(_)) => {
                        rejected = true;
                        break;
                    }
                    Err(e) => return Err(e),
                };
                let canon = prefer_known_local_b(code, canon, &syn);
                let new_basis = canon.ordered();
                let mut next = syn.to_basis(&new_basis)?;
                let (local_a, pairs, _) = canon.block_ranges();
                let refreshed: Vec<usize> = pairs.chain(local_a).collect();
                for &i in &refreshed {
                    next.values[i] = None;
                }
                let valid_after = next.values.iter().filter(|v| v.is_some()).count();
                queue = refreshed.iter().copied().collect();
                queue.extend((0..new_basis.len()).filter(|i| next.values[*i].is_none() && !refreshed.contains(i)));
                record.invalid_events.push(InvalidEvent {
                    position: pos,
                    affected: res.affected.clone(),
                    replaced: res.replaced.clone(),
                    cost: 1 + valid_before.saturating_sub(valid_after),
                });
                basis = new_basis;
                syn = next;
            }
        }
    }
    record.refreshed_gens = (0..basis.len())
        .filter(|&i| !basis[i].support().is_disjoint(&record.erased_this_round))
        .collect();
    record.basis_end = basis;
    record.syndrome = syn;
    Ok(Extraction { rejected, erased, record })
}

/// Regenerates `S^B` from elements whose values `syn` already determines, where possible, so
/// the basis change keeps every outcome the loss did not touch.
fn prefer_known_local_b(code: &StabilizerGroup, mut canon: CanonicalGenSet, syn: &SyndromeRecord) -> CanonicalGenSet {
    let known: Vec<PauliOp> =
        syn.basis.iter().zip(&syn.values).filter(|(_, v)| v.is_some()).map(|(g, _)| g.clone()).collect();
    if known.is_empty() || canon.local_b.is_empty() {
        return canon;
    }
    let local_b = code.subgroup(canon.local_b.clone());
    let mut gens = local_b.intersect(&code.subgroup(known)).gens().to_vec();
    let mut rows: Vec<Vec<u32>> = gens.iter().map(PauliOp::symplectic).collect();
    for g in &canon.local_b {
        let v = g.symplectic();
        if !zmod::in_span(&rows, &v, code.dim()) {
            rows.push(v);
            gens.push(g.clone());
        }
    }
    // Composite d: a minimal generating set may change size; keep the original then.
    if gens.len() == canon.local_b.len() {
        canon.local_b = gens;
    }
    canon
}

/// Re-expresses a syndrome record in another generating set of the same group.
pub fn change_basis(syn: &SyndromeRecord, new: &[PauliOp]) -> Result<SyndromeRecord> {
    syn.to_basis(new)
}

/// `δ_i`: 0 iff `s⃗_i`, mapped into the next round's basis, agrees with `s⃗_{i+1}` on every
/// generator outside `A_{i+1}`.
pub fn difference_bit(prev: &RoundRecord, next: &RoundRecord) -> Result<u8> {
    let mapped = prev.syndrome.to_basis(&next.basis_end)?;
    let differs = (0..next.basis_end.len()).filter(|i| !next.refreshed_gens.contains(i)).any(|i| {
        match (mapped.values[i], next.syndrome.values[i]) {
            (Some(a), Some(b)) => a != b,
            _ => true,
        }
    });
    Ok(differs as u8)
}

/// Upper bound on extraction rounds for `t` correctable faults after `erasures` erasures;
/// 0 once the erasures alone exhaust the budget.
pub fn max_rounds(t: usize, erasures: usize) -> usize {
    let twice = 2 * t as i64 - erasures as i64;
    if twice < 0 {
        return 0;
    }
    let tp = (twice / 2) as usize;
    let bound = if tp % 2 == 1 { ((tp + 3) / 2).pow(2) } else { (tp + 2) / 2 * ((tp + 4) / 2) };
    bound.saturating_sub(3).max(1)
}

/// `⌊t − e/2⌋`, negative once erasures exceed the budget.
pub fn pauli_budget(t: usize, erasures: usize) -> i64 {
    (2 * t as i64 - erasures as i64).div_euclid(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// Stopped and the applied correction is the identity.
    Accept,
    /// Stopped and a nontrivial correction was applied.
    StopCorrected,
    Reject,
}

/// Why the protocol stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// The difference vector has a usable all-zero block.
    UsableBlock,
    /// The number of non-overlapping `11` substrings reached the Pauli budget.
    DoubleOnes,
    /// The last round was not fully valid (`dist - 1` erasures).
    NotFullyValid,
    /// The round cap was reached.
    RoundCap,
    /// The round returned the rejection symbol.
    Rejected,
    /// Stopped without any fully valid round to correct from.
    NoUsableString,
}

/// Which stopping and correction rules the protocol follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rules {
    /// The rules exactly as stated: the usable-block test credits every one next to a block to
    /// faults outside it, a round stops early at `dist - 1` erasures, and the correction treats
    /// only erased qudits as located.
    #[default]
    Literal,
    /// Three amendments the exhaustive checks call for: boundary ones are not credited
    /// (see [`find_usable_substring_outer`]), a round at `dist - 1` erasures is finished rather
    /// than abandoned and a fully valid round with no Pauli budget left stops at once, and
    /// every affected qudit (including one whose syndrome qudit was lost) counts as located.
    Amended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProtocolOptions {
    /// Stop once the round count reaches [`max_rounds`], which for `t = 1` is a single round;
    /// the difference-vector rules alone never stop before round two.
    pub round_cap: bool,
    pub rules: Rules,
    pub representatives: Representatives,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self { round_cap: true, rules: Rules::Literal, representatives: Representatives::default() }
    }
}

impl ProtocolOptions {
    /// The amended rules, without the round cap.
    pub fn amended() -> Self {
        Self { round_cap: false, rules: Rules::Amended, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolOutcome {
    pub verdict: Verdict,
    pub reason: StopReason,
    /// Correction computed from the chosen round, before restriction.
    pub correction: Option<CorrectionPlan>,
    /// Operator actually applied to the data: the recovery restricted off later erasures.
    pub applied: Option<PauliOp>,
    /// 1-based round whose syndrome string was used.
    pub used_round: Option<usize>,
    pub rounds: usize,
    pub measurements: usize,
    /// Measurements added by INVALID outcomes that erased data qudits, over the whole run.
    pub erasure_measurements: usize,
    /// Cumulative erased data qudits.
    pub erased: QuditSet,
    /// Cumulative affected data qudits (a superset of `erased`).
    pub affected: QuditSet,
    pub delta: DifferenceVector,
    pub transcript: Vec<RoundRecord>,
}

/// Safety net for runs that never meet a stopping rule.
const HARD_ROUND_LIMIT: usize = 64;

/// Repeats syndrome string extraction until a usable string is certified, then applies the
/// matching correction (restricted off qudits erased afterwards) to `st`.
pub fn run_strong_protocol(st: &mut SimState, code: &StabilizerGroup, opts: &ProtocolOptions) -> Result<ProtocolOutcome> {
    let t = code.t()?;
    let amended = opts.rules == Rules::Amended;
    let mut basis = code.reduce()?.gens().to_vec();
    let mut erased = QuditSet::new();
    let mut out = ProtocolOutcome {
        verdict: Verdict::Reject,
        reason: StopReason::Rejected,
        correction: None,
        applied: None,
        used_round: None,
        rounds: 0,
        measurements: 0,
        erasure_measurements: 0,
        erased: QuditSet::new(),
        affected: QuditSet::new(),
        delta: DifferenceVector::default(),
        transcript: vec![],
    };
    let chosen: std::result::Result<(usize, StopReason), StopReason> = loop {
        let i = out.transcript.len() + 1;
        let ext = extract_round(st, code, &basis, &erased, i as u32, !amended)?;
        erased = ext.erased;
        out.transcript.push(ext.record);
        let cur = out.transcript.last().expect("just pushed");
        if ext.rejected {
            break Err(StopReason::Rejected);
        }
        basis = cur.basis_end.clone();
        if !cur.syndrome.fully_valid() {
            let latest = out.transcript.iter().rposition(|r| r.syndrome.fully_valid());
            break latest.map(|c| (c + 1, StopReason::NotFullyValid)).ok_or(StopReason::NoUsableString);
        }
        let budget = pauli_budget(t, erased.len());
        if amended && budget <= 0 {
            break Ok((i, StopReason::UsableBlock));
        }
        if i >= 2 {
            let bit = difference_bit(&out.transcript[i - 2], cur)?;
            out.delta.push(bit);
            let usable = if amended { find_usable_substring_outer } else { find_usable_substring };
            if let Some(block) = usable(budget, &out.delta) {
                break Ok((*block.rounds().end(), StopReason::UsableBlock));
            }
            if out.delta.count_double_ones() as i64 == budget {
                break Ok((i, StopReason::DoubleOnes));
            }
        }
        if opts.round_cap && i >= max_rounds(t, erased.len()) {
            break Ok((i, StopReason::RoundCap));
        }
        if i >= HARD_ROUND_LIMIT {
            break Err(StopReason::NoUsableString);
        }
    };
    out.rounds = out.transcript.len();
    out.measurements = out.transcript.iter().map(|r| r.measurements).sum();
    out.erasure_measurements = out.transcript.iter().map(RoundRecord::erasure_cost).sum();
    out.erased = erased;
    out.affected = out.transcript.iter().flat_map(|r| r.affected_this_round.iter().chain(&r.erased_this_round).copied()).collect();
    let (c, reason) = match chosen {
        Ok(c) => c,
        Err(reason) => {
            out.reason = reason;
            return Ok(out);
        }
    };
    let located = |r: &RoundRecord| -> QuditSet {
        if amended {
            r.erased_this_round.union(&r.affected_this_round).copied().collect()
        } else {
            r.erased_this_round.clone()
        }
    };
    let upto: QuditSet = out.transcript[..c].iter().flat_map(located).collect();
    let later: QuditSet = out.transcript[c..].iter().flat_map(located).collect();
    let plan = match correction_operator_with(code, &upto, &out.transcript[c - 1].syndrome, opts.representatives) {
        Ok(p) => p,
        Err(Error::TooManyErasures { .. }) => {
            out.reason = StopReason::NoUsableString;
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    let keep: QuditSet = (0..code.n()).filter(|q| !later.contains(q)).collect();
    let applied = plan.recovery().mask(&keep);
    st.apply_data_pauli(&applied);
    out.verdict = if applied.is_identity() { Verdict::Accept } else { Verdict::StopCorrected };
    out.reason = reason;
    out.used_round = Some(c);
    out.correction = Some(plan);
    out.applied = Some(applied);
    Ok(out)
}

/// Short hex digest of a generator list.
pub fn basis_fingerprint(basis: &[PauliOp]) -> String {
    let mut h = Sha256::new();
    for g in basis {
        h.update(g.to_text().as_bytes());
        h.update(b"\n");
    }
    hex::encode(&h.finalize()[..8])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RoundSummary {
    pub index: u32,
    pub basis_start: String,
    pub basis_end: String,
    pub syndrome: String,
    pub erased: Vec<usize>,
    pub first_erasure_positions: BTreeMap<usize, usize>,
    pub refreshed: Vec<usize>,
    pub measurements: usize,
    pub invalid_events: Vec<InvalidEvent>,
}

/// Serializable digest of a protocol run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProtocolTranscript {
    pub rounds: Vec<RoundSummary>,
    pub delta: String,
    pub verdict: Verdict,
    pub reason: StopReason,
    pub used_round: Option<usize>,
    pub correction: Option<String>,
    pub applied: Option<String>,
    pub measurements: usize,
}

impl ProtocolOutcome {
    pub fn summary(&self) -> ProtocolTranscript {
        ProtocolTranscript {
            rounds: self
                .transcript
                .iter()
                .map(|r| RoundSummary {
                    index: r.index,
                    basis_start: basis_fingerprint(&r.basis_start),
                    basis_end: basis_fingerprint(&r.basis_end),
                    syndrome: r.syndrome.to_text(),
                    erased: r.erased_this_round.iter().copied().collect(),
                    first_erasure_positions: r.first_erasure_positions.clone(),
                    refreshed: r.refreshed_gens.clone(),
                    measurements: r.measurements,
                    invalid_events: r.invalid_events.clone(),
                })
                .collect(),
            delta: self.delta.to_text(),
            verdict: self.verdict,
            reason: self.reason,
            used_round: self.used_round,
            correction: self.correction.as_ref().map(|c| c.operator.to_text()),
            applied: self.applied.as_ref().map(PauliOp::to_text),
            measurements: self.measurements,
        }
    }

    pub fn transcript_json(&self) -> String {
        serde_json::to_string(&self.summary()).expect("plain data")
    }
}
