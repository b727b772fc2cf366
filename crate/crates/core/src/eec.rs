//! Minimal measurement counts for erasure error correction (EEC) and sequences realizing them.
//!
//! Counts are dimensions of subgroups modulo phases and assume prime `d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliOp;
use crate::stab::{canonical_gen_set, QuditSet, StabilizerGroup};
use crate::zmod;

/// How replacement qudits are prepared before the measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AncillaMode {
    /// Each replacement is a fresh `|0⟩`.
    #[default]
    Fresh,
    /// The replacements jointly carry the target's local subgroup on them.
    Optimal,
}

/// Named terms of a count formula; `count = total − intersectA − localB − boundary + constC`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EecTerms {
    pub total: usize,
    #[serde(rename = "intersectA")]
    pub intersect_a: usize,
    #[serde(rename = "localB")]
    pub local_b: usize,
    pub boundary: usize,
    #[serde(rename = "constC")]
    pub const_c: usize,
}

impl EecTerms {
    pub fn evaluate(&self) -> usize {
        (self.total + self.const_c)
            .checked_sub(self.intersect_a + self.local_b + self.boundary)
            .expect("subgroup terms never exceed the total")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EecCostReport {
    pub count: usize,
    pub terms: EecTerms,
    pub sequence: Vec<PauliOp>,
}

fn require_prime(d: u32) -> Result<()> {
    if zmod::is_prime(d) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

fn rows(ops: &[PauliOp]) -> Vec<Vec<u32>> {
    ops.iter().map(PauliOp::symplectic).collect()
}

fn rank(rows: &[Vec<u32>], ncols: usize, d: u32) -> usize {
    zmod::howell_form(rows, ncols, d).len()
}

/// Extends `fixed` by target generators (candidates first, in order) until the span
/// contains every target generator. Returns the added elements.
fn complete(fixed: &[Vec<u32>], candidates: &[PauliOp], target: &StabilizerGroup) -> Vec<PauliOp> {
    let (d, ncols) = (target.dim(), 2 * target.n());
    let mut span: Vec<Vec<u32>> = fixed.to_vec();
    let mut out = Vec::new();
    for g in candidates.iter().chain(target.gens()) {
        let v = g.symplectic();
        if !zmod::in_span(&span, &v, d) {
            span.push(v);
            out.push(g.clone());
        }
    }
    debug_assert_eq!(rank(&span, ncols, d), target.dimension());
    out
}

fn z_on(set: &QuditSet, d: u32, n: usize) -> Vec<PauliOp> {
    set.iter().map(|&q| PauliOp::single(d, n, q, 0, 1)).collect()
}

/// Minimum number of measurements turning `current ⊗ ancillas` into the state of `target`.
///
/// Both groups live on one register of `n` qudits; `current` is supported on `A ∪ E` and
/// `target` on `A ∪ B`. In [`AncillaMode::Fresh`] the `B` qudits start in `|0⟩`.
pub fn min_measurements_state(
    current: &StabilizerGroup,
    target: &StabilizerGroup,
    a: &QuditSet,
    b: &QuditSet,
    mode: AncillaMode,
) -> Result<EecCostReport> {
    let d = target.dim();
    require_prime(d)?;
    if current.dim() != d || current.n() != target.n() {
        return Err(Error::DimensionMismatch("current and target registers differ".into()));
    }
    let n = target.n();
    let total = target.dimension();
    let sa = current.local_subgroup(a);
    let ta = target.local_subgroup(a);
    let inter = sa.intersect(&ta);
    let intersect_a = inter.dimension();
    let mut fixed = rows(inter.gens());
    let local_b = match mode {
        AncillaMode::Optimal => {
            let tb = target.local_subgroup(b);
            fixed.extend(rows(tb.gens()));
            tb.dimension()
        }
        AncillaMode::Fresh => {
            let mut tgens = sa.gens().to_vec();
            tgens.extend(z_on(b, d, n));
            let t = target.subgroup(tgens).intersect(target);
            fixed.extend(rows(t.gens()));
            t.dimension() - intersect_a
        }
    };
    let terms = EecTerms { total, intersect_a, local_b, boundary: 0, const_c: 0 };
    let sequence = complete(&fixed, &[], target);
    Ok(EecCostReport { count: terms.evaluate(), terms, sequence })
}

/// Minimum number of measurements restoring the code after the qudits outside `a` were
/// erased and replaced; `current` stabilizes the damaged state (logical part excluded).
pub fn min_measurements_code(
    code: &StabilizerGroup,
    current: &StabilizerGroup,
    a: &QuditSet,
    mode: AncillaMode,
) -> Result<EecCostReport> {
    require_prime(code.dim())?;
    let n = code.n();
    let dist = code.dist()?;
    let erased = n - a.len();
    if a.len() + dist < n + 1 {
        return Err(Error::CorrectabilityNotGuaranteed { erased, needed: n + 1 - dist });
    }
    let b: QuditSet = (0..n).filter(|q| !a.contains(q)).collect();
    let mut report = min_measurements_state(current, code, a, &b, mode)?;
    let candidates = canonical_gen_set(code, &b)?.affected();
    let mut fixed = rows(current.local_subgroup(a).intersect(&code.local_subgroup(a)).gens());
    match mode {
        AncillaMode::Optimal => fixed.extend(rows(code.local_subgroup(&b).gens())),
        AncillaMode::Fresh => {
            let mut tgens = current.local_subgroup(a).gens().to_vec();
            tgens.extend(z_on(&b, code.dim(), n));
            fixed.extend(rows(code.subgroup(tgens).intersect(code).gens()));
        }
    }
    report.sequence = complete(&fixed, &candidates, code);
    Ok(report)
}

/// EEC cost after a Shor-style measurement of `p` with data losses `l1`, syndrome-qudit
/// losses `l2` and data-TLDU losses `l3`.
///
/// With `D = l1 ∪ l3` and `L = D ∪ l2`, the boundary term is the dimension of `S^{D̄}`
/// beyond its local parts `S^{L̄}` and `S^{L2∖D}`; `constC` is 1 iff a generator of
/// `S^{D̄}` fails to commute with `p` restricted to `L`.
pub fn shor_eec_cost(
    code: &StabilizerGroup,
    p: &PauliOp,
    l1: &QuditSet,
    l2: &QuditSet,
    l3: &QuditSet,
    mode: AncillaMode,
) -> Result<EecCostReport> {
    let d = code.dim();
    require_prime(d)?;
    let n = code.n();
    let dist = code.dist()?;
    let k = code.k()?;
    let detected: QuditSet = l1.union(l3).copied().collect();
    let l: QuditSet = detected.union(l2).copied().collect();
    if l.len() >= dist {
        return Err(Error::TooManyErasures { erased: l.len(), limit: dist - 1 });
    }
    if !code.contains(p) {
        return Err(Error::DimensionMismatch(format!("{p} is not a stabilizer")));
    }
    let complement = |s: &QuditSet| -> QuditSet { (0..n).filter(|q| !s.contains(q)).collect() };
    let l_bar = code.local_subgroup(&complement(&l));
    let l2_only = code.local_subgroup(&l2.difference(&detected).copied().collect());
    let d_bar = code.local_subgroup(&complement(&detected));
    let on_l1 = code.local_subgroup(l1);
    let p_l = p.mask(&l);
    let const_c = usize::from(d_bar.gens().iter().any(|s| !s.commutes_with(&p_l)));
    let local_b = match mode {
        AncillaMode::Optimal => on_l1.dimension(),
        AncillaMode::Fresh => code
            .subgroup(z_on(l1, d, n))
            .intersect(&on_l1)
            .dimension(),
    };
    let terms = EecTerms {
        total: n - k,
        intersect_a: l_bar.dimension(),
        local_b,
        boundary: l2_only.dimension() + d_bar.dimension() - l_bar.dimension() - l2_only.dimension(),
        const_c,
    };
    // Unaffected: the part of S^{D̄} commuting with P^L, plus what the ancillas carry.
    let kept: Vec<Vec<u32>> = {
        let gens = d_bar.gens();
        let comm: Vec<Vec<u32>> = gens.iter().map(|s| vec![s.comm_unchecked(&p_l)]).collect();
        zmod::left_kernel(&comm, 1, d)
            .iter()
            .map(|x| crate::stab::power_product(gens, x, d, n).symplectic())
            .collect()
    };
    let mut fixed = kept;
    match mode {
        AncillaMode::Optimal => fixed.extend(rows(on_l1.gens())),
        AncillaMode::Fresh => fixed.extend(rows(code.subgroup(z_on(l1, d, n)).intersect(&on_l1).gens())),
    }
    let candidates = canonical_gen_set(code, &l)?.affected();
    let sequence = complete(&fixed, &candidates, code);
    let count = terms.evaluate();
    debug_assert_eq!(sequence.len(), count);
    Ok(EecCostReport { count, terms, sequence })
}

/// Affected generators of the canonical set for erasure `l`: pair members first, then
/// the local generators on `l`.
pub fn minimal_eec_sequence(code: &StabilizerGroup, l: &QuditSet) -> Result<Vec<PauliOp>> {
    if !code.is_correctable_erasure(l) {
        return Err(Error::NotCleanable(format!("erasure {l:?} supports a logical operator")));
    }
    Ok(canonical_gen_set(code, l)?.affected())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes;
    use crate::harness::{oracle_min_measurements, sequence_restores};

    fn set(ix: &[usize]) -> QuditSet {
        ix.iter().map(|i| i - 1).collect()
    }

    fn op(t: &str, d: u32, n: usize) -> PauliOp {
        PauliOp::parse(t, d, n).unwrap()
    }

    fn ghz3() -> StabilizerGroup {
        StabilizerGroup::new(2, 3, vec![op("XXX", 2, 3), op("ZZI", 2, 3), op("IZZ", 2, 3)]).unwrap()
    }

    #[test]
    fn state_examples() {
        let g = ghz3();
        let all: QuditSet = (0..3).collect();
        let r = min_measurements_state(&g, &g, &all, &QuditSet::new(), AncillaMode::Fresh).unwrap();
        assert_eq!(r.count, 0);

        // Erase qubit 3: current group is what survives on {1,2} plus the discarded qubit.
        let current = g.local_subgroup(&set(&[1, 2]));
        let r = min_measurements_state(&current, &g, &set(&[1, 2]), &set(&[3]), AncillaMode::Fresh).unwrap();
        assert_eq!(r.count, 2);
        assert_eq!((r.terms.total, r.terms.intersect_a, r.terms.local_b), (3, 1, 0));
        assert_eq!(r.sequence.len(), 2);
        let r = min_measurements_state(&current, &g, &set(&[1, 2]), &set(&[3]), AncillaMode::Optimal).unwrap();
        assert_eq!(r.count, 2);

        let flipped = StabilizerGroup::new(2, 3, vec![op("XXX", 2, 3), op("-ZZI", 2, 3), op("IZZ", 2, 3)]).unwrap();
        let r = min_measurements_state(&flipped, &g, &all, &QuditSet::new(), AncillaMode::Fresh).unwrap();
        assert_eq!(r.count, 0);

        let qutrit = codes::builtin("d6_bell").unwrap();
        assert_eq!(
            min_measurements_state(&qutrit, &qutrit, &set(&[1]), &set(&[2]), AncillaMode::Fresh),
            Err(Error::UnsupportedDimension(6))
        );
    }

    #[test]
    fn code_examples() {
        let five = codes::builtin("five_qubit").unwrap();
        let all: QuditSet = (0..5).collect();
        assert_eq!(min_measurements_code(&five, &five, &all, AncillaMode::Fresh).unwrap().count, 0);
        let a = set(&[2, 3, 4, 5]);
        let current = five.local_subgroup(&a);
        let r = min_measurements_code(&five, &current, &a, AncillaMode::Fresh).unwrap();
        assert_eq!((r.count, r.terms.intersect_a, r.terms.local_b), (2, 2, 0));
        let steane = codes::builtin("steane").unwrap();
        let a = set(&[2, 3, 4, 5, 6, 7]);
        let r = min_measurements_code(&steane, &steane.local_subgroup(&a), &a, AncillaMode::Optimal).unwrap();
        assert_eq!((r.count, r.terms.intersect_a, r.terms.local_b), (2, 4, 0));
        let a = set(&[4, 5]);
        assert_eq!(
            min_measurements_code(&five, &five.local_subgroup(&a), &a, AncillaMode::Fresh),
            Err(Error::CorrectabilityNotGuaranteed { erased: 3, needed: 3 })
        );
    }

    #[test]
    fn shor_examples() {
        let five = codes::builtin("five_qubit").unwrap();
        let g1 = five.gens()[0].clone();
        let e = QuditSet::new();
        let r = shor_eec_cost(&five, &g1, &e, &e, &e, AncillaMode::Fresh).unwrap();
        assert_eq!(r.count, 0);
        let r = shor_eec_cost(&five, &g1, &set(&[2]), &e, &e, AncillaMode::Fresh).unwrap();
        assert_eq!(r.count, 2);
        assert_eq!(r.terms.intersect_a, 2);
        let steane = codes::builtin("steane").unwrap();
        for j in 1..=7 {
            let r = shor_eec_cost(&steane, &steane.gens()[0], &set(&[j]), &e, &e, AncillaMode::Fresh).unwrap();
            assert_eq!(r.count, 2);
        }
        assert_eq!(
            shor_eec_cost(&five, &g1, &set(&[1, 2]), &set(&[3]), &e, AncillaMode::Fresh),
            Err(Error::TooManyErasures { erased: 3, limit: 2 })
        );
    }

    #[test]
    fn syndrome_qudit_loss_costs_at_most_one() {
        let five = codes::builtin("five_qubit").unwrap();
        let e = QuditSet::new();
        for g in five.gens() {
            for q in g.support() {
                let l2: QuditSet = [q].into_iter().collect();
                let r = shor_eec_cost(&five, g, &e, &l2, &e, AncillaMode::Fresh).unwrap();
                assert_eq!(r.count, r.terms.const_c);
                assert!(r.count <= 1);
                assert_eq!(r.sequence.len(), r.count);
            }
        }
    }

    #[test]
    fn minimal_sequence_matches_oracle() {
        for name in ["five_qubit", "steane", "four_two_two"] {
            let code = codes::builtin(name).unwrap();
            let n = code.n();
            for mask in 0..(1u32 << n) {
                let l: QuditSet = (0..n).filter(|q| mask >> q & 1 == 1).collect();
                if l.len() > 2 || !code.is_correctable_erasure(&l) {
                    continue;
                }
                let seq = minimal_eec_sequence(&code, &l).unwrap();
                let oracle = oracle_min_measurements(&code, &l).unwrap();
                assert_eq!(seq.len(), oracle, "{name} L={l:?}");
                assert!(sequence_restores(&code, &l, &seq).unwrap(), "{name} L={l:?}");
                for skip in 0..seq.len() {
                    let mut shorter = seq.clone();
                    shorter.remove(skip);
                    assert!(!sequence_restores(&code, &l, &shorter).unwrap());
                }
            }
        }
        assert_eq!(minimal_eec_sequence(&codes::builtin("five_qubit").unwrap(), &QuditSet::new()).unwrap().len(), 0);
        assert_eq!(minimal_eec_sequence(&ghz3(), &set(&[3])).unwrap().len(), 2);
    }
}
