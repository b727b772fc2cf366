//! Stabilizer groups as generated subgroups of the qudit Pauli group.
//!
//! Group membership, equality and dimensions are taken modulo the scalar subgroup
//! `K = {ζ^a I}`: two generating sets are considered equal when they generate the same
//! symplectic module. Phases are kept on the generators and recovered exactly whenever
//! an element is rebuilt as a product of generators.

mod canonical;
mod decode;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliOp;
use crate::zmod;

pub use canonical::{canonical_gen_set, gram_schmidt, CanonicalGenSet, GramSchmidt};
pub use decode::SyndromeTable;
pub(crate) use decode::next_combination;

/// Index sets are 0-based internally and printed 1-based.
pub type QuditSet = BTreeSet<usize>;

/// Code parameters attached to a stabilizer group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeMeta {
    pub k: usize,
    pub dist: usize,
    /// Logical operator pairs `(X̄_i, Z̄_i)`, when known.
    pub logical_x: Vec<PauliOp>,
    pub logical_z: Vec<PauliOp>,
}

/// A stabilizer group given by an ordered generating set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerGroup {
    dim: u32,
    n: usize,
    gens: Vec<PauliOp>,
    meta: Option<CodeMeta>,
}

impl StabilizerGroup {
    /// Validates that the generators pairwise commute and generate no nontrivial scalar.
    pub fn new(dim: u32, n: usize, gens: Vec<PauliOp>) -> Result<Self> {
        for g in &gens {
            if g.dim() != dim || g.n() != n {
                return Err(Error::DimensionMismatch(format!("generator {g} is not a d={dim}, n={n} operator")));
            }
        }
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                if !a.commutes_with(b) {
                    return Err(Error::NotAStabilizerGroup(format!("{a} and {b} do not commute")));
                }
            }
        }
        let group = Self { dim, n, gens, meta: None };
        group.check_scalars()?;
        Ok(group)
    }

    fn check_scalars(&self) -> Result<()> {
        for g in &self.gens {
            if !g.pow(self.dim).is_identity() {
                return Err(Error::NotAStabilizerGroup(format!("{g} has a nontrivial d-th power")));
            }
        }
        for rel in zmod::left_kernel(&self.sym_rows(), 2 * self.n, self.dim) {
            let p = self.product(&rel);
            if !p.is_identity() {
                return Err(Error::NotAStabilizerGroup(format!("generators multiply to the scalar {p}")));
            }
        }
        Ok(())
    }

    pub fn with_meta(mut self, meta: CodeMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> &[PauliOp] {
        &self.gens
    }

    pub fn meta(&self) -> Option<&CodeMeta> {
        self.meta.as_ref()
    }

    pub fn dist(&self) -> Result<usize> {
        self.meta.as_ref().map(|m| m.dist).ok_or(Error::MissingMetadata("distance"))
    }

    pub fn k(&self) -> Result<usize> {
        self.meta.as_ref().map(|m| m.k).ok_or(Error::MissingMetadata("k"))
    }

    /// Number of correctable Pauli errors `t = ⌊(dist − 1)/2⌋`.
    pub fn t(&self) -> Result<usize> {
        Ok(self.dist()?.saturating_sub(1) / 2)
    }

    pub fn sym_rows(&self) -> Vec<Vec<u32>> {
        self.gens.iter().map(PauliOp::symplectic).collect()
    }

    /// `∏ g_i^{x_i}` in generator order, with exact phase.
    pub fn product(&self, x: &[u32]) -> PauliOp {
        power_product(&self.gens, x, self.dim, self.n)
    }

    fn howell(&self) -> Vec<Vec<u32>> {
        zmod::howell_form(&self.sym_rows(), 2 * self.n, self.dim)
    }

    /// Membership up to phase.
    pub fn contains(&self, p: &PauliOp) -> bool {
        zmod::howell_reduce(&self.howell(), &p.symplectic(), self.dim, 2 * self.n)
            .iter()
            .all(|&v| v == 0)
    }

    /// The group element whose monomial is `v` (a symplectic row), with its exact phase.
    pub fn element_for(&self, v: &[u32]) -> Option<PauliOp> {
        let x = zmod::solve_left(&self.sym_rows(), v, self.dim)?;
        Some(self.product(&x))
    }

    /// Membership including the phase.
    pub fn contains_exact(&self, p: &PauliOp) -> bool {
        self.element_for(&p.symplectic()).is_some_and(|e| e == *p)
    }

    /// Number of elements of `S/K`.
    pub fn order(&self) -> u128 {
        decode::span_size(&self.sym_rows(), 2 * self.n, self.dim)
    }

    /// Size of a minimal generating set; equals the dimension for prime `d`.
    pub fn dimension(&self) -> usize {
        zmod::min_generators(&self.sym_rows(), 2 * self.n, self.dim).len()
    }

    /// Same group (up to phases) as `other`.
    pub fn same_group(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.n == other.n
            && self.howell() == other.howell()
    }

    /// Rebuilds a generating set from symplectic rows in the span, with exact phases.
    fn from_rows(&self, rows: Vec<Vec<u32>>) -> Vec<PauliOp> {
        rows.into_iter()
            .map(|r| self.element_for(&r).expect("row lies in the group"))
            .collect()
    }

    /// Independent (prime `d`) or minimal (composite `d`) generating set of the same group.
    pub fn reduce(&self) -> Result<Self> {
        self.check_scalars()?;
        let rows = zmod::min_generators(&self.sym_rows(), 2 * self.n, self.dim);
        // Prefer a subset of the input generators, in input order, when one is minimal.
        let mut kept: Vec<PauliOp> = Vec::new();
        let mut kept_rows: Vec<Vec<u32>> = Vec::new();
        for g in &self.gens {
            let v = g.symplectic();
            if !zmod::in_span(&kept_rows, &v, self.dim) {
                kept_rows.push(v);
                kept.push(g.clone());
            }
        }
        let gens = if kept.len() == rows.len() { kept } else { self.from_rows(rows) };
        Ok(Self { dim: self.dim, n: self.n, gens, meta: self.meta.clone() })
    }

    /// A group with the same metadata but a different generating set of the same group.
    pub fn with_gens(&self, gens: Vec<PauliOp>) -> Result<Self> {
        let g = Self::new(self.dim, self.n, gens)?;
        if !g.same_group(self) {
            return Err(Error::BasisMismatch);
        }
        Ok(Self { meta: self.meta.clone(), ..g })
    }

    /// Generators of the local subgroup `S^L` of elements supported inside `set`.
    pub fn local_subgroup(&self, set: &QuditSet) -> Self {
        let outside: Vec<usize> = (0..self.n).filter(|q| !set.contains(q)).collect();
        let elems: Vec<Vec<u32>> = if outside.is_empty() {
            self.sym_rows()
        } else {
            let rows: Vec<Vec<u32>> = self
                .gens
                .iter()
                .map(|g| g.restrict(&outside).expect("indices in range").symplectic())
                .collect();
            zmod::left_kernel(&rows, 2 * outside.len(), self.dim)
                .iter()
                .map(|x| self.product(x).symplectic())
                .collect()
        };
        let gens = self.from_rows(zmod::min_generators(&elems, 2 * self.n, self.dim));
        Self { dim: self.dim, n: self.n, gens, meta: None }
    }

    /// The subgroup generated by `gens` (assumed to be group elements).
    pub fn subgroup(&self, gens: Vec<PauliOp>) -> Self {
        Self { dim: self.dim, n: self.n, gens, meta: None }
    }

    /// Intersection of two subgroups of the same ambient group (up to phases).
    pub fn intersect(&self, other: &Self) -> Self {
        let a = self.sym_rows();
        let b = other.sym_rows();
        // Σ x_i a_i − Σ y_j b_j = 0; the left kernel of the stacked matrix gives x.
        let mut stacked = a.clone();
        stacked.extend(b.iter().cloned());
        let kernel = zmod::left_kernel(&stacked, 2 * self.n, self.dim);
        let elems: Vec<Vec<u32>> = kernel
            .iter()
            .map(|x| self.product(&x[..a.len()]).symplectic())
            .collect();
        let rows = zmod::min_generators(&elems, 2 * self.n, self.dim);
        let gens = self.from_rows(rows);
        Self { dim: self.dim, n: self.n, gens, meta: None }
    }

    /// Generators restricted to `set` (sorted order), as operators on `|set|` qudits.
    pub fn restriction(&self, set: &QuditSet) -> Vec<PauliOp> {
        let idx: Vec<usize> = set.iter().copied().collect();
        self.gens.iter().map(|g| g.restrict(&idx).expect("indices in range")).collect()
    }

    /// Order of the local normalizer `N(S)^L` modulo phases.
    fn local_normalizer_order(&self, set: &QuditSet) -> u128 {
        if set.is_empty() {
            return 1;
        }
        let image = StabilizerGroup { dim: self.dim, n: set.len(), gens: self.restriction(set), meta: None };
        // The symplectic complement of a submodule M of ℤ_d^{2m} has d^{2m} / |M| elements.
        (self.dim as u128).pow(2 * set.len() as u32) / image.order()
    }

    /// True iff no nontrivial logical operator is supported inside `set`.
    pub fn is_correctable_erasure(&self, set: &QuditSet) -> bool {
        self.local_normalizer_order(set) == self.local_subgroup(set).order()
    }

    /// `σ(e)` in this generating set.
    pub fn syndrome(&self, e: &PauliOp) -> SyndromeRecord {
        SyndromeRecord {
            basis: self.gens.clone(),
            values: self.gens.iter().map(|g| Some(g.comm_unchecked(e))).collect(),
        }
    }

    /// Minimum-weight phase-free Pauli with syndrome `s` (see [`SyndromeTable`] for the tie-break).
    pub fn reduced_error(&self, s: &SyndromeRecord) -> Result<PauliOp> {
        SyndromeTable::build(self).lookup(s)
    }
}

impl StabilizerGroup {
    /// All elements of `S/K` as phase-exact representatives; intended for small groups.
    pub fn elements(&self) -> Vec<PauliOp> {
        let red = zmod::min_generators(&self.sym_rows(), 2 * self.n, self.dim);
        let gens = self.from_rows(red);
        let mut out = std::collections::BTreeMap::new();
        let mut x = vec![0u32; gens.len()];
        loop {
            let p = power_product(&gens, &x, self.dim, self.n);
            out.entry(p.symplectic()).or_insert(p);
            let mut i = 0;
            loop {
                if i == x.len() {
                    return out.into_values().collect();
                }
                x[i] += 1;
                if x[i] < self.dim {
                    break;
                }
                x[i] = 0;
                i += 1;
            }
        }
    }

    /// A random stabilizer group with `count` generators drawn as random commuting Paulis.
    ///
    /// For prime `d` the generators are independent, so `count = n` gives a state.
    pub fn random<R: rand::Rng + ?Sized>(dim: u32, n: usize, count: usize, rng: &mut R) -> Self {
        let mut gens: Vec<PauliOp> = Vec::new();
        let mut tries = 0;
        while gens.len() < count && tries < 10_000 {
            tries += 1;
            let x: Vec<u32> = (0..n).map(|_| rng.random_range(0..dim)).collect();
            let z: Vec<u32> = (0..n).map(|_| rng.random_range(0..dim)).collect();
            let p = PauliOp::new(dim, x, z, 0).expect("valid exponents");
            if p.is_identity() || gens.iter().any(|g| !g.commutes_with(&p)) {
                continue;
            }
            let rows: Vec<Vec<u32>> = gens.iter().map(PauliOp::symplectic).collect();
            if zmod::in_span(&rows, &p.symplectic(), dim) {
                continue;
            }
            let dd = crate::pauli::phase_modulus(dim);
            let start = rng.random_range(0..dd);
            let candidate = (0..dd).map(|a| p.clone().with_phase((start + a) % dd)).find(|q| {
                let mut trial = gens.clone();
                trial.push(q.clone());
                Self::new(dim, n, trial).is_ok()
            });
            if let Some(q) = candidate {
                gens.push(q);
            }
        }
        Self::new(dim, n, gens).expect("construction keeps the group valid")
    }
}

impl fmt::Display for StabilizerGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.gens.iter().map(PauliOp::to_text).collect();
        write!(f, "⟨{}⟩", items.join(", "))
    }
}

/// `∏ ops_i^{x_i}` in list order, with exact phase.
pub fn power_product(ops: &[PauliOp], x: &[u32], dim: u32, n: usize) -> PauliOp {
    let mut acc = PauliOp::identity(dim, n);
    for (g, &e) in ops.iter().zip(x) {
        if e % dim != 0 {
            acc = acc.mul_unchecked(&g.pow(e % dim));
        }
    }
    acc
}

/// Per-generator syndrome values; `None` marks an INVALID entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeRecord {
    pub basis: Vec<PauliOp>,
    pub values: Vec<Option<u32>>,
}

impl SyndromeRecord {
    pub fn fully_valid(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    /// All values, if fully valid.
    pub fn valid_values(&self) -> Option<Vec<u32>> {
        self.values.iter().copied().collect()
    }

    /// Re-expresses the record in `new`, which must generate the same group up to phases.
    ///
    /// An entry of `new` is valid iff it is a product of generators whose entries are valid;
    /// its value is the matching sum.
    pub fn to_basis(&self, new: &[PauliOp]) -> Result<SyndromeRecord> {
        let Some(dim) = self.basis.first().or(new.first()).map(PauliOp::dim) else {
            return Ok(SyndromeRecord { basis: vec![], values: vec![] });
        };
        let old_rows: Vec<Vec<u32>> = self.basis.iter().map(PauliOp::symplectic).collect();
        let new_rows: Vec<Vec<u32>> = new.iter().map(PauliOp::symplectic).collect();
        let spans = |rows: &[Vec<u32>], others: &[Vec<u32>]| {
            others.iter().all(|v| {
                if rows.is_empty() {
                    v.iter().all(|&x| x == 0)
                } else {
                    zmod::in_span(rows, v, dim)
                }
            })
        };
        if !spans(&old_rows, &new_rows) || !spans(&new_rows, &old_rows) {
            return Err(Error::BasisMismatch);
        }
        let (valid_rows, valid_vals): (Vec<Vec<u32>>, Vec<u32>) = old_rows
            .iter()
            .zip(&self.values)
            .filter_map(|(r, v)| v.map(|v| (r.clone(), v)))
            .unzip();
        let m = dim as u64;
        let values = new_rows
            .iter()
            .map(|v| {
                zmod::solve_left(&valid_rows, v, dim).map(|x| {
                    (x.iter().zip(&valid_vals).map(|(&a, &b)| a as u64 * b as u64).sum::<u64>() % m) as u32
                })
            })
            .collect();
        Ok(SyndromeRecord { basis: new.to_vec(), values })
    }

    /// `*` marks INVALID entries; values above 9 are written in braces.
    pub fn to_text(&self) -> String {
        self.values
            .iter()
            .map(|v| match v {
                None => "*".to_string(),
                Some(x) if *x < 10 => x.to_string(),
                Some(x) => format!("{{{x}}}"),
            })
            .collect()
    }
}
