//! Syndrome → coset-leader tables.

use std::collections::HashMap;

use super::{StabilizerGroup, SyndromeRecord};
use crate::error::{Error, Result};
use crate::pauli::PauliOp;
use crate::zmod;

/// Number of elements in the ℤ_d row span of `rows`.
pub(crate) fn span_size(rows: &[Vec<u32>], ncols: usize, dim: u32) -> u128 {
    zmod::howell_form(rows, ncols, dim)
        .iter()
        .map(|r| {
            let c = r.iter().position(|&v| v != 0).expect("Howell rows are nonzero");
            (dim / r[c]) as u128
        })
        .product()
}

/// Minimum-weight phase-free representative for every reachable syndrome of a basis.
///
/// Candidates are enumerated by weight, then by sorted support tuple, then by the
/// per-qudit `(x, z)` exponents compared lexicographically; the first hit wins.
#[derive(Debug, Clone)]
pub struct SyndromeTable {
    dim: u32,
    n: usize,
    basis: Vec<PauliOp>,
    allowed: Vec<usize>,
    map: HashMap<Vec<u32>, PauliOp>,
}

impl SyndromeTable {
    pub fn build(g: &StabilizerGroup) -> Self {
        Self::for_basis(g.dim(), g.n(), g.gens(), &(0..g.n()).collect::<Vec<_>>())
    }

    /// Table over Paulis supported inside `allowed` only.
    pub fn for_basis(dim: u32, n: usize, basis: &[PauliOp], allowed: &[usize]) -> Self {
        let restricted: Vec<Vec<u32>> =
            basis.iter().map(|b| b.restrict(allowed).expect("in range").symplectic()).collect();
        // Image of e ↦ (⟦b_i, e⟧)_i has the size of the span of the restricted rows.
        let target = span_size(&restricted, 2 * allowed.len(), dim);
        let letters: Vec<(u32, u32)> = (0..dim)
            .flat_map(|x| (0..dim).map(move |z| (x, z)))
            .filter(|&v| v != (0, 0))
            .collect();
        let m = dim as u64;
        // contrib[slot][letter] is the syndrome of that single-qudit letter.
        let contrib: Vec<Vec<Vec<u32>>> = allowed
            .iter()
            .map(|&q| {
                letters
                    .iter()
                    .map(|&(x, z)| {
                        let e = PauliOp::single(dim, n, q, x, z);
                        basis.iter().map(|b| b.comm_unchecked(&e)).collect()
                    })
                    .collect()
            })
            .collect();
        let mut map = HashMap::new();
        map.insert(vec![0; basis.len()], PauliOp::identity(dim, n));
        let mut w = 1;
        while (map.len() as u128) < target && w <= allowed.len() {
            let mut slots: Vec<usize> = (0..w).collect();
            loop {
                let mut choice = vec![0usize; w];
                loop {
                    let mut s = vec![0u64; basis.len()];
                    for (slot, &l) in slots.iter().zip(&choice) {
                        for (acc, &v) in s.iter_mut().zip(&contrib[*slot][l]) {
                            *acc = (*acc + v as u64) % m;
                        }
                    }
                    let key: Vec<u32> = s.into_iter().map(|v| v as u32).collect();
                    map.entry(key).or_insert_with(|| {
                        let mut x = vec![0; n];
                        let mut z = vec![0; n];
                        for (slot, &l) in slots.iter().zip(&choice) {
                            x[allowed[*slot]] = letters[l].0;
                            z[allowed[*slot]] = letters[l].1;
                        }
                        PauliOp::new(dim, x, z, 0).expect("valid exponents")
                    });
                    if !advance(&mut choice, letters.len()) {
                        break;
                    }
                }
                if !next_combination(&mut slots, allowed.len()) {
                    break;
                }
            }
            w += 1;
        }
        Self { dim, n, basis: basis.to_vec(), allowed: allowed.to_vec(), map }
    }

    pub fn basis(&self) -> &[PauliOp] {
        &self.basis
    }

    pub fn allowed(&self) -> &[usize] {
        &self.allowed
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Coset leader for raw syndrome values in this table's basis.
    pub fn get(&self, values: &[u32]) -> Option<&PauliOp> {
        self.map.get(values)
    }

    pub fn lookup(&self, s: &SyndromeRecord) -> Result<PauliOp> {
        let values = s.valid_values().ok_or(Error::InvalidSyndrome)?;
        if s.basis.len() != self.basis.len()
            || s.basis.iter().zip(&self.basis).any(|(a, b)| a.symplectic() != b.symplectic())
        {
            return Err(Error::BasisMismatch);
        }
        let key: Vec<u32> = values.iter().map(|v| v % self.dim).collect();
        self.map.get(&key).cloned().ok_or(Error::InfeasibleSyndrome)
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Odometer over `choice`, most significant digit first.
fn advance(choice: &mut [usize], base: usize) -> bool {
    for i in (0..choice.len()).rev() {
        choice[i] += 1;
        if choice[i] < base {
            return true;
        }
        choice[i] = 0;
    }
    false
}

/// Next `k`-combination of `0..n` in lexicographic order.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
