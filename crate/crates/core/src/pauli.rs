//! Qudit Pauli operators `ζ^a X^r Z^s` in symplectic form.
//!
//! The phase root is `ζ = e^{2πi/D}` with `D = d` for odd `d` and `D = 2d` for even `d`,
//! so `ω = e^{2πi/d} = ζ^{D/d}`. Multiplication uses `Z^s X^t = ω^{st} X^t Z^s`.
//!
//! # Text grammar
//!
//! ```text
//! op      := letters | product
//! letters := sign? [IXYZ]{n}              (qubits only; Y = iXZ)
//! sign    := "+" | "-" | "i" | "+i" | "-i"
//! product := ("w^" int)? factor* | "I"
//! factor  := ("X" | "Z") index ("^" int)?  (index is 1-based)
//! ```
//!
//! A product is read left to right as an operator product, so `Z1 X1` parses to
//! `w^2 X1 Z1` when `d = 2`. `w^a` means `ζ^a`. The printer emits the canonical form:
//! letters for `d = 2`, otherwise `w^a` (omitted when `a = 0`) followed by `X_i`, `Z_i`
//! factors in increasing qudit order with exponent `1` left implicit.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Phase modulus `D` for qudit dimension `d`.
pub fn phase_modulus(dim: u32) -> u32 {
    if dim.is_multiple_of(2) {
        2 * dim
    } else {
        dim
    }
}

/// An `n`-qudit generalized Pauli operator over ℤ_d.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliOp {
    dim: u32,
    x: Vec<u32>,
    z: Vec<u32>,
    phase: u32,
}

impl PauliOp {
    pub fn new(dim: u32, x: Vec<u32>, z: Vec<u32>, phase: u32) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionMismatch(format!("qudit dimension {dim} < 2")));
        }
        if x.len() != z.len() || x.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "exponent vectors of length {} and {}",
                x.len(),
                z.len()
            )));
        }
        let x = x.into_iter().map(|v| v % dim).collect();
        let z = z.into_iter().map(|v| v % dim).collect();
        Ok(Self { dim, x, z, phase: phase % phase_modulus(dim) })
    }

    pub fn identity(dim: u32, n: usize) -> Self {
        Self { dim, x: vec![0; n], z: vec![0; n], phase: 0 }
    }

    /// `X_q^r Z_q^s` on qudit `q` (0-based).
    pub fn single(dim: u32, n: usize, q: usize, r: u32, s: u32) -> Self {
        let mut p = Self::identity(dim, n);
        p.x[q] = r % dim;
        p.z[q] = s % dim;
        p
    }

    /// Builds the operator from a symplectic row `(x_1..x_n, z_1..z_n)` with phase 0.
    pub fn from_symplectic(dim: u32, v: &[u32]) -> Self {
        let n = v.len() / 2;
        Self {
            dim,
            x: v[..n].iter().map(|&a| a % dim).collect(),
            z: v[n..].iter().map(|&a| a % dim).collect(),
            phase: 0,
        }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[u32] {
        &self.x
    }

    pub fn z(&self) -> &[u32] {
        &self.z
    }

    pub fn phase(&self) -> u32 {
        self.phase
    }

    pub fn phase_modulus(&self) -> u32 {
        phase_modulus(self.dim)
    }

    pub fn with_phase(mut self, phase: u32) -> Self {
        self.phase = phase % phase_modulus(self.dim);
        self
    }

    /// The same monomial with phase exponent 0.
    pub fn phase_free(&self) -> Self {
        self.clone().with_phase(0)
    }

    /// Symplectic row `(x_1..x_n, z_1..z_n)`; the phase is dropped.
    pub fn symplectic(&self) -> Vec<u32> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.z);
        v
    }

    pub fn is_identity(&self) -> bool {
        self.phase == 0 && self.is_scalar()
    }

    /// True when the monomial part is trivial, i.e. the operator is `ζ^a I`.
    pub fn is_scalar(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&v| v == 0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.n() != other.n() {
            return Err(Error::DimensionMismatch(format!(
                "d={} n={} vs d={} n={}",
                self.dim,
                self.n(),
                other.dim,
                other.n()
            )));
        }
        Ok(())
    }

    /// Group product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let d = self.dim as u64;
        let dd = phase_modulus(self.dim) as u64;
        let scale = dd / d;
        let mut cross = 0u64;
        for (s, t) in self.z.iter().zip(&other.x) {
            cross += (*s as u64) * (*t as u64);
        }
        let phase = (self.phase as u64 + other.phase as u64 + scale * (cross % d)) % dd;
        Self {
            dim: self.dim,
            x: self.x.iter().zip(&other.x).map(|(a, b)| (a + b) % self.dim).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| (a + b) % self.dim).collect(),
            phase: phase as u32,
        }
    }

    /// `self^k` for `k ≥ 0`.
    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.dim, self.n());
        for _ in 0..k {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    /// Exact inverse, so that `p · p.inverse()` is the identity with phase 0.
    pub fn inverse(&self) -> Self {
        let mono = self.phase_free().pow(self.dim - 1);
        // p^{d} = ζ^c I for the monomial part; divide it out together with the phase.
        let full = mono.mul_unchecked(&self.phase_free());
        let dd = phase_modulus(self.dim);
        let fix = (2 * dd - full.phase - self.phase) % dd;
        let mut inv = mono;
        inv.phase = (inv.phase + fix) % dd;
        inv
    }

    /// Commutator exponent `⟦self, other⟧ = s·t − r·u (mod d)`, where `self = X^r Z^s` and
    /// `other = X^t Z^u`; `self · other = ω^⟦self, other⟧ other · self`.
    pub fn commutator_exponent(&self, other: &Self) -> Result<u32> {
        self.check(other)?;
        Ok(self.comm_unchecked(other))
    }

    pub(crate) fn comm_unchecked(&self, other: &Self) -> u32 {
        let d = self.dim as u64;
        let mut acc = 0u64;
        for i in 0..self.n() {
            acc += self.z[i] as u64 * other.x[i] as u64;
            acc += (d - self.x[i] as u64) * other.z[i] as u64;
        }
        (acc % d) as u32
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.comm_unchecked(other) == 0
    }

    pub fn support(&self) -> BTreeSet<usize> {
        (0..self.n()).filter(|&i| self.x[i] != 0 || self.z[i] != 0).collect()
    }

    pub fn weight(&self) -> usize {
        (0..self.n()).filter(|&i| self.x[i] != 0 || self.z[i] != 0).count()
    }

    /// Keeps the factors on `set` (0-based, in the iteration order of `set`); phase preserved.
    pub fn restrict(&self, set: &[usize]) -> Result<Self> {
        for &q in set {
            if q >= self.n() {
                return Err(Error::IndexError { index: q, n: self.n() });
            }
        }
        if set.is_empty() {
            return Err(Error::DimensionMismatch("restriction to an empty set".into()));
        }
        Ok(Self {
            dim: self.dim,
            x: set.iter().map(|&q| self.x[q]).collect(),
            z: set.iter().map(|&q| self.z[q]).collect(),
            phase: self.phase,
        })
    }

    /// Places a `|set|`-qudit operator at positions `set` of an `n`-qudit identity.
    pub fn embed(&self, set: &[usize], n: usize) -> Result<Self> {
        if set.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "embedding {} qudits into {} positions",
                self.n(),
                set.len()
            )));
        }
        let mut out = Self::identity(self.dim, n);
        for (i, &q) in set.iter().enumerate() {
            if q >= n {
                return Err(Error::IndexError { index: q, n });
            }
            out.x[q] = self.x[i];
            out.z[q] = self.z[i];
        }
        out.phase = self.phase;
        Ok(out)
    }

    /// Zeroes the factors outside `keep` (same qudit count); phase preserved.
    pub fn mask(&self, keep: &BTreeSet<usize>) -> Self {
        let mut out = self.clone();
        for i in 0..self.n() {
            if !keep.contains(&i) {
                out.x[i] = 0;
                out.z[i] = 0;
            }
        }
        out
    }

    /// Parses the text grammar described in the module docs.
    pub fn parse(text: &str, dim: u32, n: usize) -> Result<Self> {
        let t = text.trim();
        if dim == 2 {
            if let Some(p) = parse_letters(t, n) {
                return Ok(p);
            }
        }
        parse_product(t, dim, n)
    }

    /// Canonical text form.
    pub fn to_text(&self) -> String {
        if self.dim == 2 {
            return self.letters();
        }
        let mut parts = Vec::new();
        if self.phase != 0 {
            parts.push(format!("w^{}", self.phase));
        }
        for i in 0..self.n() {
            for (label, e) in [("X", self.x[i]), ("Z", self.z[i])] {
                match e {
                    0 => {}
                    1 => parts.push(format!("{label}{}", i + 1)),
                    _ => parts.push(format!("{label}{}^{e}", i + 1)),
                }
            }
        }
        if parts.is_empty() || (parts.len() == 1 && self.phase != 0) {
            parts.push("I".into());
        }
        parts.join(" ")
    }

    fn letters(&self) -> String {
        let mut ys = 0u32;
        let body: String = (0..self.n())
            .map(|i| match (self.x[i], self.z[i]) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => {
                    ys += 1;
                    'Y'
                }
            })
            .collect();
        let prefix = match (self.phase + 4 - ys % 4) % 4 {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        format!("{prefix}{body}")
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn parse_letters(t: &str, n: usize) -> Option<PauliOp> {
    let (sign, body) = if let Some(rest) = t.strip_prefix("-i") {
        (3, rest)
    } else if let Some(rest) = t.strip_prefix("+i") {
        (1, rest)
    } else if let Some(rest) = t.strip_prefix('i') {
        (1, rest)
    } else if let Some(rest) = t.strip_prefix('-') {
        (2, rest)
    } else if let Some(rest) = t.strip_prefix('+') {
        (0, rest)
    } else {
        (0, t)
    };
    if body.chars().count() != n || !body.chars().all(|c| "IXYZ".contains(c)) {
        return None;
    }
    let mut p = PauliOp::identity(2, n);
    let mut phase = sign;
    for (i, c) in body.chars().enumerate() {
        match c {
            'X' => p.x[i] = 1,
            'Z' => p.z[i] = 1,
            'Y' => {
                p.x[i] = 1;
                p.z[i] = 1;
                phase += 1;
            }
            _ => {}
        }
    }
    p.phase = phase % 4;
    Some(p)
}

fn parse_int(s: &str, what: &str) -> Result<u64> {
    s.parse::<u64>().map_err(|_| Error::Parse(format!("bad {what} `{s}`")))
}

fn parse_product(t: &str, dim: u32, n: usize) -> Result<PauliOp> {
    let mut acc = PauliOp::identity(dim, n);
    let dd = phase_modulus(dim);
    for tok in t.split_whitespace() {
        if tok == "I" {
            continue;
        }
        if let Some(a) = tok.strip_prefix("w^") {
            let a = parse_int(a, "phase exponent")?;
            acc.phase = ((acc.phase as u64 + a) % dd as u64) as u32;
            continue;
        }
        let (label, rest) = tok.split_at(1);
        if label != "X" && label != "Z" {
            return Err(Error::Parse(format!("unexpected token `{tok}`")));
        }
        let (idx, exp) = match rest.split_once('^') {
            Some((i, e)) => (parse_int(i, "qudit index")?, parse_int(e, "exponent")?),
            None => (parse_int(rest, "qudit index")?, 1),
        };
        if idx == 0 || idx as usize > n {
            return Err(Error::IndexError { index: idx as usize, n });
        }
        let e = (exp % dim as u64) as u32;
        let f = if label == "X" {
            PauliOp::single(dim, n, idx as usize - 1, e, 0)
        } else {
            PauliOp::single(dim, n, idx as usize - 1, 0, e)
        };
        acc = acc.mul_unchecked(&f);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense complex matrices, enough to check the algebra against explicit Kronecker products.
    #[derive(Clone, Copy, Debug)]
    struct C(f64, f64);

    impl C {
        fn mul(self, o: C) -> C {
            C(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
        }
        fn add(self, o: C) -> C {
            C(self.0 + o.0, self.1 + o.1)
        }
        fn close(self, o: C) -> bool {
            (self.0 - o.0).abs() < 1e-9 && (self.1 - o.1).abs() < 1e-9
        }
        fn root(k: u32, m: u32) -> C {
            let a = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            C(a.cos(), a.sin())
        }
    }

    type M = Vec<Vec<C>>;

    fn matmul(a: &M, b: &M) -> M {
        let n = a.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(C(0.0, 0.0), |acc, k| acc.add(a[i][k].mul(b[k][j]))))
                    .collect()
            })
            .collect()
    }

    fn kron(a: &M, b: &M) -> M {
        let (na, nb) = (a.len(), b.len());
        (0..na * nb)
            .map(|i| (0..na * nb).map(|j| a[i / nb][j / nb].mul(b[i % nb][j % nb])).collect())
            .collect()
    }

    fn dense(p: &PauliOp) -> M {
        let d = p.dim() as usize;
        let mut out: M = vec![vec![C(1.0, 0.0)]];
        for q in 0..p.n() {
            let mut m = vec![vec![C(0.0, 0.0); d]; d];
            // X^r Z^s |j> = ω^{sj} |j + r>
            for j in 0..d {
                let tgt = (j + p.x()[q] as usize) % d;
                m[tgt][j] = C::root((p.z()[q] as usize * j) as u32, p.dim());
            }
            out = kron(&out, &m);
        }
        let ph = C::root(p.phase(), p.phase_modulus());
        out.iter().map(|r| r.iter().map(|c| c.mul(ph)).collect()).collect()
    }

    fn same(a: &M, b: &M) -> bool {
        a.iter().zip(b).all(|(r, s)| r.iter().zip(s).all(|(x, y)| x.close(*y)))
    }

    fn all_ops(dim: u32, n: usize) -> Vec<PauliOp> {
        let total = (dim as usize).pow(2 * n as u32);
        (0..total)
            .map(|mut code| {
                let mut v = vec![0u32; 2 * n];
                for e in v.iter_mut() {
                    *e = (code % dim as usize) as u32;
                    code /= dim as usize;
                }
                PauliOp::from_symplectic(dim, &v)
            })
            .collect()
    }

    #[test]
    fn matrix_oracle_multiply_and_commutator() {
        for (dim, n) in [(2u32, 1usize), (2, 2), (3, 1), (3, 2), (2, 3)] {
            let ops = all_ops(dim, n);
            let step = if ops.len() > 20 { ops.len() / 20 } else { 1 };
            for p in ops.iter().step_by(step) {
                let p = p.clone().with_phase(1);
                for q in ops.iter().step_by(step) {
                    let pq = p.multiply(q).unwrap();
                    assert!(same(&dense(&pq), &matmul(&dense(&p), &dense(q))), "{p} * {q}");
                    let c = p.commutator_exponent(q).unwrap();
                    let lhs = matmul(&dense(&p), &dense(q));
                    let rhs = matmul(&dense(q), &dense(&p));
                    let w = C::root(c, dim);
                    let rhs: M = rhs.iter().map(|r| r.iter().map(|x| x.mul(w)).collect()).collect();
                    assert!(same(&lhs, &rhs), "commutator of {p} and {q}");
                }
            }
        }
    }

    #[test]
    fn qubit_products() {
        let x = PauliOp::parse("X", 2, 1).unwrap();
        let z = PauliOp::parse("Z", 2, 1).unwrap();
        assert!(x.multiply(&x).unwrap().is_identity());
        let xz = x.multiply(&z).unwrap();
        let zx = z.multiply(&x).unwrap();
        // ω = −1 = ζ², so the phases differ by two units of ζ
        assert_eq!((zx.phase() + 4 - xz.phase()) % 4, 2);
        assert_eq!(x.commutator_exponent(&z).unwrap(), 1);
    }

    #[test]
    fn qutrit_cyclic_and_commutator() {
        let x = PauliOp::single(3, 1, 0, 1, 0);
        let x2 = x.multiply(&x).unwrap();
        assert_eq!(x2, PauliOp::single(3, 1, 0, 2, 0));
        assert!(x2.multiply(&x).unwrap().is_identity());
        let p = PauliOp::parse("X1 Z1", 3, 1).unwrap();
        let q = PauliOp::parse("X1^2 Z1", 3, 1).unwrap();
        assert_eq!(p.commutator_exponent(&q).unwrap(), 1);
    }

    #[test]
    fn weight_support_restrict_embed() {
        assert_eq!(PauliOp::identity(2, 4).weight(), 0);
        let p = PauliOp::parse("X1 Z3", 2, 5).unwrap();
        assert_eq!(p.weight(), 2);
        assert_eq!(p.support().into_iter().collect::<Vec<_>>(), vec![0, 2]);
        let g = PauliOp::parse("XZZXI", 2, 5).unwrap();
        assert_eq!(g.weight(), 4);
        assert_eq!(g.restrict(&[0, 1]).unwrap(), PauliOp::parse("XZ", 2, 2).unwrap());
        let xz = PauliOp::parse("XZ", 2, 2).unwrap();
        assert_eq!(xz.embed(&[1, 3], 5).unwrap(), PauliOp::parse("IXIZI", 2, 5).unwrap());
        assert!(PauliOp::identity(2, 5).restrict(&[1, 2]).unwrap().is_identity());
        assert!(matches!(g.restrict(&[7]), Err(Error::IndexError { .. })));
    }

    #[test]
    fn mismatched_operands_are_rejected() {
        let a = PauliOp::identity(2, 2);
        let b = PauliOp::identity(2, 3);
        assert!(matches!(a.multiply(&b), Err(Error::DimensionMismatch(_))));
        assert!(matches!(a.commutator_exponent(&PauliOp::identity(3, 2)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn text_round_trip() {
        for s in ["XZZXI", "-iYIZ", "iIII", "-XYZ", "YYY"] {
            let p = PauliOp::parse(s, 2, s.trim_start_matches(['-', 'i', '+']).len()).unwrap();
            assert_eq!(p.to_text(), s);
        }
        for s in ["w^2 X1 Z1^2 X3", "Z2^2", "I", "w^1 I"] {
            let p = PauliOp::parse(s, 3, 3).unwrap();
            assert_eq!(p.to_text(), s);
        }
        // the product grammar also works for qubits
        let y = PauliOp::parse("w^1 X1 Z1", 2, 1).unwrap();
        assert_eq!(y.to_text(), "Y");
        assert_eq!(PauliOp::parse("Z1 X1", 2, 1).unwrap().to_text(), "iY");
    }

    #[test]
    fn inverse_is_exact() {
        for dim in [2u32, 3, 4, 6] {
            for p in all_ops(dim, 2).into_iter().step_by(7) {
                let p = p.with_phase(3);
                assert!(p.multiply(&p.inverse()).unwrap().is_identity(), "{p:?}");
            }
        }
    }
}
