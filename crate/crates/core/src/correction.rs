//! Mixed erasure + Pauli correctability and correction-operator synthesis.
//!
//! The correction for an erased set `L` and a fully valid syndrome string is assembled in
//! the canonical basis of `(L, L̄)`: a minimum-weight operator off `L` explains the local-B
//! entries, and an operator on `L` fixes the local-A and pair entries. Pair entries are
//! fixed one at a time by destabilizer representatives supported on `L`.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliOp;
use crate::stab::{canonical_gen_set, CanonicalGenSet, QuditSet, StabilizerGroup, SyndromeRecord, SyndromeTable};

/// `e` erased qudits plus an unlocated Pauli component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedError {
    pub erased: QuditSet,
    pub pauli: PauliOp,
}

impl MixedError {
    /// Pauli weight counted off the erased set.
    pub fn pauli_weight(&self) -> usize {
        self.pauli.support().difference(&self.erased).count()
    }

    pub fn weight(&self) -> Ratio<u64> {
        mixed_weight(self.erased.len() as u64, self.pauli_weight() as u64)
    }
}

/// `e/2 + p`, exactly.
pub fn mixed_weight(e: u64, p: u64) -> Ratio<u64> {
    Ratio::new(e + 2 * p, 2)
}

/// True iff `wt(e, p) ≤ t`; Pauli components on erased qudits are free.
pub fn is_mixed_correctable(code: &StabilizerGroup, m: &MixedError) -> Result<bool> {
    Ok(m.weight() <= Ratio::from_integer(code.t()? as u64))
}

/// How pair entries of the syndrome are fixed on `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representatives {
    /// Coset leaders of a table over operators supported on `L`.
    #[default]
    MinWeight,
    /// The `L` half of the partner generator, raised to the power that hits the entry.
    PairPartner,
}

/// `operator` is the error estimate `E^c_tot`; the recovery applied to the state is its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionPlan {
    pub operator: PauliOp,
    #[serde(rename = "erasedPart")]
    pub erased_part: PauliOp,
    #[serde(rename = "bulkPart")]
    pub bulk_part: PauliOp,
}

impl CorrectionPlan {
    pub fn recovery(&self) -> PauliOp {
        self.operator.inverse()
    }
}

fn check_erasures(code: &StabilizerGroup, l: &QuditSet) -> Result<()> {
    let dist = code.dist()?;
    if l.len() >= dist {
        return Err(Error::TooManyErasures { erased: l.len(), limit: dist - 1 });
    }
    Ok(())
}

/// Correction for erased set `l` and a fully valid syndrome string in any generating set of
/// `code` (it is re-expressed in the canonical basis of `(l, l̄)`).
pub fn correction_operator(code: &StabilizerGroup, l: &QuditSet, s_use: &SyndromeRecord) -> Result<CorrectionPlan> {
    correction_operator_with(code, l, s_use, Representatives::MinWeight)
}

pub fn correction_operator_with(
    code: &StabilizerGroup,
    l: &QuditSet,
    s_use: &SyndromeRecord,
    reps: Representatives,
) -> Result<CorrectionPlan> {
    check_erasures(code, l)?;
    if !s_use.fully_valid() {
        return Err(Error::InvalidSyndrome);
    }
    let canon = canonical_gen_set(code, l)?;
    let values = s_use.to_basis(&canon.ordered())?.valid_values().ok_or(Error::InvalidSyndrome)?;
    Synthesizer::new(code, &canon).plan(&values, reps)
}

/// Reusable tables for one `(code, L)`.
struct Synthesizer<'a> {
    dim: u32,
    n: usize,
    canon: &'a CanonicalGenSet,
    ordered: Vec<PauliOp>,
    /// Basis `local-A ∪ pairs`, operators supported on `L`.
    on_l: SyndromeTable,
    /// Basis `local-B`, operators supported off `L`.
    off_l: SyndromeTable,
}

impl<'a> Synthesizer<'a> {
    fn new(code: &StabilizerGroup, canon: &'a CanonicalGenSet) -> Self {
        let (dim, n) = (code.dim(), code.n());
        let ordered = canon.ordered();
        let (_, pairs, _) = canon.block_ranges();
        let on_l = SyndromeTable::for_basis(dim, n, &ordered[..pairs.end], &canon.a);
        let off_l = SyndromeTable::for_basis(dim, n, &canon.local_b, &canon.b);
        Self { dim, n, canon, ordered, on_l, off_l }
    }

    fn syndrome(&self, e: &PauliOp) -> Vec<u32> {
        self.ordered.iter().map(|g| g.comm_unchecked(e)).collect()
    }

    /// Operator on `L` whose only nonzero entry is `v` at ordered index `j` (a pair slot).
    fn representative(&self, j: usize, v: u32, reps: Representatives) -> Result<PauliOp> {
        let (_, pairs, _) = self.canon.block_ranges();
        match reps {
            Representatives::MinWeight => {
                let mut key = vec![0; pairs.end];
                key[j] = v;
                self.on_l.get(&key).cloned().ok_or(Error::InfeasibleSyndrome)
            }
            Representatives::PairPartner => {
                let k = (j - pairs.start) / 2;
                let (g, h) = &self.canon.pairs[k];
                let partner = if (j - pairs.start).is_multiple_of(2) { h } else { g };
                let half = partner.restrict(&self.canon.a)?.embed(&self.canon.a, self.n)?.phase_free();
                let c = self.ordered[j].comm_unchecked(&half);
                let m = self.dim as u64;
                let x = (0..self.dim)
                    .find(|&x| (x as u64 * c as u64) % m == v as u64)
                    .ok_or(Error::InfeasibleSyndrome)?;
                Ok(half.pow(x))
            }
        }
    }

    fn plan(&self, values: &[u32], reps: Representatives) -> Result<CorrectionPlan> {
        let (local_a, pairs, local_b) = self.canon.block_ranges();
        let m = self.dim as u64;
        let bulk = self.off_l.get(&values[local_b]).cloned().ok_or(Error::InfeasibleSyndrome)?;
        // Pair entries left over once the bulk part is accounted for.
        let bulk_syn = self.syndrome(&bulk);
        let mut key = vec![0; pairs.end];
        key[local_a.clone()].copy_from_slice(&values[local_a]);
        let mut erased = self.on_l.get(&key).cloned().ok_or(Error::InfeasibleSyndrome)?;
        for j in pairs {
            let v = ((values[j] as u64 + m - bulk_syn[j] as u64) % m) as u32;
            if v != 0 {
                erased = erased.mul_unchecked(&self.representative(j, v, reps)?);
            }
        }
        let erased = erased.phase_free();
        let operator = erased.mul_unchecked(&bulk).phase_free();
        Ok(CorrectionPlan { operator, erased_part: erased, bulk_part: bulk })
    }
}

/// Precomputed `(L, s_use) → operator` map for small codes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionTable {
    pub version: u32,
    pub dim: u32,
    pub n: usize,
    /// Key `"<1-based L, comma separated>|<syndrome text in the canonical basis>"`.
    pub entries: BTreeMap<String, String>,
}

pub const TABLE_VERSION: u32 = 1;
/// Tables are only built for codes up to this many qudits.
pub const TABLE_MAX_N: usize = 10;

fn table_key(l: &QuditSet, values: &[u32]) -> String {
    let set: Vec<String> = l.iter().map(|q| (q + 1).to_string()).collect();
    let record = SyndromeRecord { basis: vec![], values: values.iter().map(|&v| Some(v)).collect() };
    format!("{}|{}", set.join(","), record.to_text())
}

impl CorrectionTable {
    /// Every correctable `L` with `|L| ≤ max_erased` (and `< dist`), every reachable syndrome.
    pub fn build(code: &StabilizerGroup, max_erased: usize) -> Result<Self> {
        let n = code.n();
        if n > TABLE_MAX_N {
            return Err(Error::Config(format!("correction tables need n ≤ {TABLE_MAX_N}, got {n}")));
        }
        let limit = max_erased.min(code.dist()?.saturating_sub(1));
        let mut entries = BTreeMap::new();
        for l in subsets_up_to(n, limit) {
            if !code.is_correctable_erasure(&l) {
                continue;
            }
            let canon = canonical_gen_set(code, &l)?;
            let synth = Synthesizer::new(code, &canon);
            let len = synth.ordered.len();
            let mut values = vec![0u32; len];
            loop {
                match synth.plan(&values, Representatives::MinWeight) {
                    Ok(plan) => {
                        entries.insert(table_key(&l, &values), plan.operator.to_text());
                    }
                    Err(Error::InfeasibleSyndrome) => {}
                    Err(e) => return Err(e),
                }
                if !odometer(&mut values, code.dim()) {
                    break;
                }
            }
        }
        Ok(Self { version: TABLE_VERSION, dim: code.dim(), n, entries })
    }

    /// Operator for `l` and a record already expressed in the canonical basis of `(l, l̄)`.
    pub fn lookup(&self, l: &QuditSet, s_use: &SyndromeRecord) -> Result<Option<PauliOp>> {
        let values = s_use.valid_values().ok_or(Error::InvalidSyndrome)?;
        self.entries
            .get(&table_key(l, &values))
            .map(|t| PauliOp::parse(t, self.dim, self.n))
            .transpose()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if t.version != TABLE_VERSION {
            return Err(Error::Parse(format!("unsupported correction table version {}", t.version)));
        }
        Ok(t)
    }
}

fn odometer(v: &mut [u32], dim: u32) -> bool {
    for x in v.iter_mut().rev() {
        *x += 1;
        if *x < dim {
            return true;
        }
        *x = 0;
    }
    false
}

/// All subsets of `0..n` with at most `k` elements, by size then lexicographically.
pub fn subsets_up_to(n: usize, k: usize) -> Vec<QuditSet> {
    let mut out = vec![QuditSet::new()];
    for size in 1..=k.min(n) {
        let mut c: Vec<usize> = (0..size).collect();
        loop {
            out.push(c.iter().copied().collect());
            if !crate::stab::next_combination(&mut c, n) {
                break;
            }
        }
    }
    out
}
