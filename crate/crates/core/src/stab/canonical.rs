//! Canonical bipartite generating sets.
//!
//! One construction serves every `d`: bring the restriction `S|_A` into symplectic block
//! form, lift its non-commuting pairs, rebuild `S^A` from the center of `S|_A` and `S^B`
//! from the kernel of `Ψ : x ↦ Σ x_i s'_i`.

use serde::{Deserialize, Serialize};

use super::{power_product, QuditSet, StabilizerGroup};
use crate::error::{Error, Result};
use crate::pauli::PauliOp;
use crate::zmod;

/// Generators split into local-A, local-B and anticommuting nonlocal pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalGenSet {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub local_a: Vec<PauliOp>,
    pub local_b: Vec<PauliOp>,
    /// `(g_k ⊗ ḡ_k, h_k ⊗ h̄_k)`.
    pub pairs: Vec<(PauliOp, PauliOp)>,
}

impl CanonicalGenSet {
    /// Basis order used for syndrome strings: local-A, pairs (`g`, `h` interleaved), local-B.
    pub fn ordered(&self) -> Vec<PauliOp> {
        let mut out = self.local_a.clone();
        for (g, h) in &self.pairs {
            out.push(g.clone());
            out.push(h.clone());
        }
        out.extend(self.local_b.iter().cloned());
        out
    }

    /// Generators whose outcomes an erasure of `A` invalidates: pair members, then local-A.
    pub fn affected(&self) -> Vec<PauliOp> {
        let mut out = Vec::with_capacity(2 * self.pairs.len() + self.local_a.len());
        for (g, h) in &self.pairs {
            out.push(g.clone());
            out.push(h.clone());
        }
        out.extend(self.local_a.iter().cloned());
        out
    }

    /// Offsets of the three blocks inside [`Self::ordered`].
    pub fn block_ranges(&self) -> (std::ops::Range<usize>, std::ops::Range<usize>, std::ops::Range<usize>) {
        let a = self.local_a.len();
        let p = a + 2 * self.pairs.len();
        (0..a, a..p, p..p + self.local_b.len())
    }

    /// Checks the structural invariants; returns a description of the first violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let a: QuditSet = self.a.iter().copied().collect();
        let b: QuditSet = self.b.iter().copied().collect();
        for g in &self.local_a {
            if !g.support().is_subset(&a) {
                return Err(format!("local-A generator {g} leaves A"));
            }
        }
        for g in &self.local_b {
            if !g.support().is_subset(&b) {
                return Err(format!("local-B generator {g} leaves B"));
            }
        }
        let side = |p: &PauliOp, s: &[usize]| p.restrict(s).expect("indices in range");
        for (g, h) in &self.pairs {
            for m in [g, h] {
                if side(m, &self.a).is_identity() || side(m, &self.b).is_identity() {
                    return Err(format!("pair member {m} is local"));
                }
            }
            if side(g, &self.a).commutes_with(&side(h, &self.a)) {
                return Err(format!("pair ({g}, {h}) commutes on A"));
            }
            if side(g, &self.b).commutes_with(&side(h, &self.b)) {
                return Err(format!("pair ({g}, {h}) commutes on B"));
            }
        }
        if self.a.is_empty() || self.b.is_empty() {
            return Ok(());
        }
        // Pairs are measured per side: cross-pair and pair-local commutation on A.
        let ordered = self.ordered();
        let pair_range = self.block_ranges().1;
        for i in 0..ordered.len() {
            for j in i + 1..ordered.len() {
                let same_pair = pair_range.contains(&i) && pair_range.contains(&j) && (i - pair_range.start) / 2 == (j - pair_range.start) / 2;
                if same_pair {
                    continue;
                }
                if !side(&ordered[i], &self.a).commutes_with(&side(&ordered[j], &self.a)) {
                    return Err(format!("{} and {} do not commute on A", ordered[i], ordered[j]));
                }
            }
        }
        Ok(())
    }
}

/// Output of symplectic Gram–Schmidt on a list of subsystem operators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramSchmidt {
    pub s1: Vec<PauliOp>,
    pub s2: Vec<PauliOp>,
    /// Minimal generators of the central part, phase-free.
    pub u: Vec<PauliOp>,
    /// Change of basis: new element `i` is `∏_j gens_j^{basis[i][j]}`.
    pub basis: Vec<Vec<u32>>,
}

fn commutator_matrix(ops: &[PauliOp]) -> Vec<Vec<u32>> {
    ops.iter()
        .map(|p| ops.iter().map(|q| p.comm_unchecked(q)).collect())
        .collect()
}

/// Gram–Schmidt generating set `S1 ∪ S2 ∪ U` of the group generated by `gens`.
pub fn gram_schmidt(gens: &[PauliOp]) -> GramSchmidt {
    let Some(first) = gens.first() else {
        return GramSchmidt { s1: vec![], s2: vec![], u: vec![], basis: vec![] };
    };
    let (dim, n) = (first.dim(), first.n());
    let form = zmod::alternating_normal_form(&commutator_matrix(gens), dim);
    let new: Vec<PauliOp> = form.basis.iter().map(|row| power_product(gens, row, dim, n)).collect();
    let s1 = (0..form.pairs).map(|m| new[2 * m].clone()).collect();
    let s2 = (0..form.pairs).map(|m| new[2 * m + 1].clone()).collect();
    let rest: Vec<Vec<u32>> = new[2 * form.pairs..].iter().map(PauliOp::symplectic).collect();
    let u = zmod::min_generators(&rest, 2 * n, dim)
        .iter()
        .map(|v| PauliOp::from_symplectic(dim, v))
        .collect();
    GramSchmidt { s1, s2, u, basis: form.basis }
}

/// Canonical generating set of `g` with respect to the bipartition `(A, [n] ∖ A)`.
///
/// Fails with `NotCleanable` when an element of the center of `S|_A` does not extend
/// trivially to `B`, which happens exactly when a nontrivial logical operator is
/// supported on `A`.
pub fn canonical_gen_set(g: &StabilizerGroup, a: &QuditSet) -> Result<CanonicalGenSet> {
    let n = g.n();
    let dim = g.dim();
    if let Some(&q) = a.iter().find(|&&q| q >= n) {
        return Err(Error::IndexError { index: q, n });
    }
    let red = g.reduce()?;
    let a_idx: Vec<usize> = a.iter().copied().collect();
    let b_idx: Vec<usize> = (0..n).filter(|q| !a.contains(q)).collect();
    let mut out = CanonicalGenSet { a: a_idx.clone(), b: b_idx.clone(), local_a: vec![], local_b: vec![], pairs: vec![] };
    if a_idx.is_empty() {
        out.local_b = red.gens().to_vec();
        return Ok(out);
    }
    if b_idx.is_empty() {
        out.local_a = red.gens().to_vec();
        return Ok(out);
    }

    // Step 1: Gram–Schmidt on S|_A, lifted through the same change of basis.
    let restricted: Vec<PauliOp> = red.gens().iter().map(|s| s.restrict(&a_idx).expect("in range")).collect();
    let c = commutator_matrix(&restricted);
    let form = zmod::alternating_normal_form(&c, dim);
    let lifts: Vec<PauliOp> = form.basis.iter().map(|row| red.product(row)).collect();
    let primes: Vec<Vec<u32>> = lifts.iter().map(|s| s.restrict(&a_idx).expect("in range").symplectic()).collect();
    out.pairs = (0..form.pairs).map(|m| (lifts[2 * m].clone(), lifts[2 * m + 1].clone())).collect();

    // Step 2: S^A from the center of S|_A.
    let gram = zmod::mat_mul(&zmod::mat_mul(&form.basis, &c, dim), &zmod::transpose(&form.basis), dim);
    let center: Vec<Vec<u32>> = zmod::left_kernel(&gram, primes.len(), dim)
        .iter()
        .map(|y| combine(&primes, y, dim))
        .collect();
    for u in zmod::min_generators(&center, 2 * a_idx.len(), dim) {
        let op = PauliOp::from_symplectic(dim, &u).embed(&a_idx, n).expect("in range");
        match red.element_for(&op.symplectic()) {
            Some(e) => out.local_a.push(e),
            None => {
                return Err(Error::NotCleanable(format!(
                    "{} commutes with S but is not a stabilizer",
                    op.to_text()
                )))
            }
        }
    }

    // Step 3: S^B from the lifted kernel of Ψ.
    let kernel_elems: Vec<Vec<u32>> = zmod::left_kernel(&primes, 2 * a_idx.len(), dim)
        .iter()
        .map(|kappa| power_product(&lifts, kappa, dim, n).symplectic())
        .collect();
    for v in zmod::min_generators(&kernel_elems, 2 * n, dim) {
        out.local_b.push(red.element_for(&v).expect("kernel lifts lie in S"));
    }
    Ok(out)
}

fn combine(rows: &[Vec<u32>], y: &[u32], dim: u32) -> Vec<u32> {
    let m = dim as u64;
    let width = rows.first().map_or(0, Vec::len);
    let mut acc = vec![0u64; width];
    for (row, &c) in rows.iter().zip(y) {
        for (a, &v) in acc.iter_mut().zip(row) {
            *a = (*a + c as u64 * v as u64) % m;
        }
    }
    acc.into_iter().map(|v| v as u32).collect()
}
