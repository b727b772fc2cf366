//! Audits behind the `eec-audit` and `canon-audit` commands.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::correction::subsets_up_to;
use crate::eec::{min_measurements_code, minimal_eec_sequence, AncillaMode};
use crate::error::{Error, Result};
use crate::harness::oracle::{oracle_min_measurements, sequence_restores};
use crate::stab::{canonical_gen_set, QuditSet, StabilizerGroup};
use crate::zmod;

/// Formula counts for one erased set next to the brute-force minimum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EecAuditRow {
    /// 1-based qudit labels.
    pub erased: Vec<usize>,
    /// Fresh-ancilla count from the subgroup-dimension formula.
    pub formula: usize,
    /// `n − k − dim S^{L̄}`; only defined for nondegenerate codes.
    pub nondegenerate: Option<usize>,
    /// Length of the canonical-set sequence, checked to restore the code.
    pub sequence: usize,
    pub sequence_restores: bool,
    pub oracle: usize,
}

impl EecAuditRow {
    pub fn agrees(&self) -> bool {
        self.sequence_restores
            && self.formula == self.oracle
            && self.sequence == self.oracle
            && self.nondegenerate.is_none_or(|c| c == self.oracle)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EecAudit {
    pub max_erasures: usize,
    pub rows: Vec<EecAuditRow>,
    /// Sets of size `≤ max_erasures` skipped because they carry a logical operator.
    pub uncorrectable: usize,
}

impl EecAudit {
    pub fn mismatches(&self) -> usize {
        self.rows.iter().filter(|r| !r.agrees()).count()
    }
}

/// Every nontrivial stabilizer has weight at least the distance.
pub fn is_nondegenerate(code: &StabilizerGroup) -> Result<bool> {
    let dist = code.dist()?;
    Ok(code.elements().iter().filter(|e| !e.is_scalar()).all(|e| e.weight() >= dist))
}

/// Compares the EEC counts with the oracle on every correctable `L`, `|L| ≤ max_erasures`.
pub fn eec_audit(code: &StabilizerGroup, max_erasures: usize) -> Result<EecAudit> {
    let n = code.n();
    let k = code.k()?;
    let nondegenerate = is_nondegenerate(code)?;
    let mut rows = Vec::new();
    let mut uncorrectable = 0;
    for l in subsets_up_to(n, max_erasures) {
        if !code.is_correctable_erasure(&l) {
            uncorrectable += 1;
            continue;
        }
        let a: QuditSet = (0..n).filter(|q| !l.contains(q)).collect();
        let kept = code.local_subgroup(&a);
        let formula = match min_measurements_code(code, &kept, &a, AncillaMode::Fresh) {
            Ok(r) => r.count,
            // Correctable beyond the distance guarantee: the formula is not claimed there.
            Err(Error::CorrectabilityNotGuaranteed { .. }) => continue,
            Err(e) => return Err(e),
        };
        let seq = minimal_eec_sequence(code, &l)?;
        rows.push(EecAuditRow {
            erased: l.iter().map(|q| q + 1).collect(),
            formula,
            nondegenerate: nondegenerate.then(|| n - k - kept.dimension()),
            sequence: seq.len(),
            sequence_restores: sequence_restores(code, &l, &seq)?,
            oracle: oracle_min_measurements(code, &l)?,
        });
    }
    Ok(EecAudit { max_erasures, rows, uncorrectable })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CanonFailure {
    pub group: Vec<String>,
    /// 1-based labels of side `A`.
    pub a: Vec<usize>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CanonAudit {
    pub dim: u32,
    pub n: usize,
    pub groups: usize,
    pub bipartitions: usize,
    /// Bipartitions whose side carries a logical operator; these must be refused.
    pub refused: usize,
    pub failures: Vec<CanonFailure>,
}

/// Checks one bipartition; `Ok(false)` for a correctly refused side.
fn check_bipartition(g: &StabilizerGroup, a: &QuditSet) -> std::result::Result<bool, String> {
    let c = match canonical_gen_set(g, a) {
        Ok(c) => c,
        Err(Error::NotCleanable(_)) if !g.is_correctable_erasure(a) => return Ok(false),
        Err(e) => return Err(e.to_string()),
    };
    c.check_invariants()?;
    let ordered = c.ordered();
    if let Some(e) = ordered.iter().find(|e| !g.contains_exact(e)) {
        return Err(format!("{e} is not an element of the group"));
    }
    let regenerated = g.subgroup(ordered);
    if !regenerated.same_group(g) {
        return Err("output does not regenerate the group".into());
    }
    if !zmod::is_prime(g.dim()) {
        let sym = |h: &StabilizerGroup| -> BTreeSet<Vec<u32>> { h.elements().iter().map(|e| e.symplectic()).collect() };
        if sym(&regenerated) != sym(g) {
            return Err("element sets differ".into());
        }
    }
    if !a.is_empty() && a.len() < g.n() {
        let restricted = g.reduce().map_err(|e| e.to_string())?.restriction(a);
        let cm: Vec<Vec<u32>> =
            restricted.iter().map(|p| restricted.iter().map(|q| p.comm_unchecked(q)).collect()).collect();
        let theta = zmod::theta(&cm, g.dim());
        if 2 * c.pairs.len() != theta {
            return Err(format!("{} pairs, commutation matrix rank {theta}", c.pairs.len()));
        }
    }
    Ok(true)
}

/// Random groups over `ℤ_dim^n`, every bipartition of each.
pub fn canon_audit(dim: u32, n: usize, groups: usize, seed: u64) -> Result<CanonAudit> {
    if dim < 2 || n == 0 || n > 10 {
        return Err(Error::Config(format!("canon-audit needs dim ≥ 2 and 1 ≤ n ≤ 10, got dim={dim} n={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CanonAudit { dim, n, groups, bipartitions: 0, refused: 0, failures: vec![] };
    for _ in 0..groups {
        let count = rng.random_range(1..=n);
        let g = StabilizerGroup::random(dim, n, count, &mut rng);
        for mask in 0..(1u32 << n) {
            let a: QuditSet = (0..n).filter(|q| mask >> q & 1 == 1).collect();
            report.bipartitions += 1;
            match check_bipartition(&g, &a) {
                Ok(true) => {}
                Ok(false) => report.refused += 1,
                Err(message) => report.failures.push(CanonFailure {
                    group: g.gens().iter().map(|p| p.to_text()).collect(),
                    a: a.iter().map(|q| q + 1).collect(),
                    message,
                }),
            }
        }
    }
    Ok(report)
}
