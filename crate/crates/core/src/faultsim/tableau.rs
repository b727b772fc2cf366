//! Pure stabilizer states over prime-dimensional qudits with exact phases.

use rand::Rng;

use crate::pauli::PauliOp;
use crate::stab::power_product;
use crate::zmod;

/// Single- and two-qudit Cliffords known to the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    /// `|i⟩|j⟩ ↦ |i⟩|i + j⟩` on `(control, target)`.
    Sum,
    /// `F = d^{-1/2} Σ ω^{ij} |j⟩⟨i|`.
    Fourier,
    /// `Σ_k |k⟩⟨k| ⊗ P^k` on `(control, target)` for the letter `P = ζ^c X^r Z^s` with `P^d = I`.
    ControlledPauli { r: u32, s: u32 },
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::Fourier => 1,
            Gate::Sum | Gate::ControlledPauli { .. } => 2,
        }
    }
}

/// `(U X_i U†, U Z_i U†)` for each operand `i`, as operators on the operands alone.
fn gate_images(gate: Gate, dim: u32) -> Vec<(PauliOp, PauliOp)> {
    let n = gate.arity();
    let x = |q| PauliOp::single(dim, n, q, 1, 0);
    let z = |q| PauliOp::single(dim, n, q, 0, 1);
    match gate {
        Gate::Fourier => vec![(z(0), x(0).inverse())],
        Gate::Sum => vec![(x(0).mul_unchecked(&x(1)), z(0)), (x(1), z(0).inverse().mul_unchecked(&z(1)))],
        Gate::ControlledPauli { r, s } => {
            let p = letter(dim, n, 1, r, s);
            // P^k X P^{-k} = ω^{k s} X and P^k Z P^{-k} = ω^{-k r} Z.
            let zc = |e: u32| z(0).pow(e % dim);
            vec![
                (x(0).mul_unchecked(&p), z(0)),
                (zc(s).mul_unchecked(&x(1)), zc(dim - r % dim).mul_unchecked(&z(1))),
            ]
        }
    }
}

/// The single-qudit letter `ζ^c X^r Z^s` with the phase `c` that makes its `d`-th power trivial.
pub fn letter(dim: u32, n: usize, q: usize, r: u32, s: u32) -> PauliOp {
    let base = PauliOp::single(dim, n, q, r, s);
    let modulus = base.phase_modulus();
    (0..modulus)
        .map(|c| base.clone().with_phase(c))
        .find(|p| p.pow(dim).is_identity())
        .expect("some phase has order d")
}

/// Stabilizer generators of a pure state on `n` qudits; row `i` is an exact group element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    dim: u32,
    rows: Vec<PauliOp>,
}

impl Tableau {
    /// `|0…0⟩`.
    pub fn zero(dim: u32, n: usize) -> Self {
        Self { dim, rows: (0..n).map(|q| PauliOp::single(dim, n, q, 0, 1)).collect() }
    }

    /// Caller guarantees `rows` are independent, commuting and of order `d`.
    pub fn from_rows(dim: u32, rows: Vec<PauliOp>) -> Self {
        Self { dim, rows }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.rows.first().map_or(0, PauliOp::n)
    }

    pub fn rows(&self) -> &[PauliOp] {
        &self.rows
    }

    /// Conjugates every row by the Pauli `p`.
    pub fn apply_pauli(&mut self, p: &PauliOp) {
        let step = p.phase_modulus() / self.dim;
        for g in &mut self.rows {
            let c = p.comm_unchecked(g);
            if c != 0 {
                let phase = (g.phase() + step * c) % g.phase_modulus();
                *g = g.clone().with_phase(phase);
            }
        }
    }

    /// Conjugates by `gate` acting on `qudits` (in the gate's operand order).
    pub fn apply_gate(&mut self, gate: Gate, qudits: &[usize]) {
        let dim = self.dim;
        // Images of X and Z on each operand, on a register of just the operands; operators on
        // disjoint qudits multiply without a phase, so rows only change there.
        let images = gate_images(gate, dim);
        let arity = qudits.len();
        for g in &mut self.rows {
            if qudits.iter().all(|&q| g.x()[q] == 0 && g.z()[q] == 0) {
                continue;
            }
            let mut acc = PauliOp::identity(dim, arity);
            for (i, (ix, iz)) in images.iter().enumerate() {
                let (a, b) = (g.x()[qudits[i]], g.z()[qudits[i]]);
                if a != 0 {
                    acc = acc.mul_unchecked(&ix.pow(a));
                }
                if b != 0 {
                    acc = acc.mul_unchecked(&iz.pow(b));
                }
            }
            let mut xs = g.x().to_vec();
            let mut zs = g.z().to_vec();
            for (i, &q) in qudits.iter().enumerate() {
                xs[q] = acc.x()[i];
                zs[q] = acc.z()[i];
            }
            let phase = (g.phase() + acc.phase()) % g.phase_modulus();
            *g = PauliOp::new(dim, xs, zs, phase).expect("valid exponents");
        }
    }

    /// Element of the group with monomial `p` (ignoring `p`'s phase), if any.
    pub fn element_for(&self, p: &PauliOp) -> Option<PauliOp> {
        let rows: Vec<Vec<u32>> = self.rows.iter().map(PauliOp::symplectic).collect();
        let x = zmod::solve_left(&rows, &p.symplectic(), self.dim)?;
        Some(power_product(&self.rows, &x, self.dim, self.n()))
    }

    /// `p` (with its phase) stabilizes the state.
    pub fn stabilizes(&self, p: &PauliOp) -> bool {
        self.element_for(p).is_some_and(|e| e == *p)
    }

    /// Projective measurement of `p` (which must satisfy `p^d = I`); returns `m` with
    /// post-measurement state stabilized by `ω^{-m} p`.
    pub fn measure<R: Rng + ?Sized>(&mut self, p: &PauliOp, rng: &mut R) -> u32 {
        let dim = self.dim;
        let step = p.phase_modulus() / dim;
        let comms: Vec<u32> = self.rows.iter().map(|g| g.comm_unchecked(p)).collect();
        if let Some(pivot) = comms.iter().position(|&c| c != 0) {
            let inv = zmod::inv_mod(comms[pivot] as u64, dim as u64).expect("prime dimension") as u32;
            let pivot_row = self.rows[pivot].clone();
            for (j, &c) in comms.iter().enumerate() {
                if j != pivot && c != 0 {
                    let k = ((dim - c) as u64 * inv as u64 % dim as u64) as u32;
                    self.rows[j] = self.rows[j].mul_unchecked(&pivot_row.pow(k));
                }
            }
            let m = rng.random_range(0..dim);
            let phase = (p.phase() + step * ((dim - m) % dim)) % p.phase_modulus();
            self.rows[pivot] = p.clone().with_phase(phase);
            m
        } else {
            let e = self.element_for(p).expect("pure state: commuting Pauli lies in the group");
            // e = ζ^c p stabilizes, so p has eigenvalue ζ^{-c}.
            let c = (e.phase() + p.phase_modulus() - p.phase()) % p.phase_modulus();
            debug_assert_eq!(c % step, 0);
            (dim - (c / step) % dim) % dim
        }
    }
}
