//! Circuit-level simulation of Shor-style stabilizer measurements with data TLDUs.
//!
//! The state is a pure stabilizer tableau over physical qudits: `n` data slots (which move
//! between physical qudits as TLDUs teleport them), `k` reference qudits purifying the
//! logical information, and a pool of `|0⟩` ancillas. A lost qudit is measured out at the
//! moment of loss; since no later operation touches it until replacement, this realizes
//! the same channel as tracing it out.

mod schedule;
mod tableau;
#[cfg(test)]
mod tests;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use schedule::{ClassRates, FaultEvent, FaultKind, FaultSchedule, Location, LocationClass, NoiseMode};
pub use tableau::{letter, Gate, Tableau};

use crate::error::{Error, Result};
use crate::pauli::PauliOp;
use crate::stab::{QuditSet, StabilizerGroup};

/// Result of one stabilizer measurement gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Value(u32),
    Invalid,
    /// Only produced by the protocol layer.
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetResult {
    pub outcome: Outcome,
    /// `L_g`: data qudits whose own loss or whose syndrome qudit's loss was detected.
    pub affected: QuditSet,
    /// `R_g`: data qudits erased and replaced during this gadget.
    pub replaced: QuditSet,
    /// When each qudit in `replaced` was lost.
    pub loss_locations: BTreeMap<usize, Location>,
}

/// Result of one teleportation-based loss-detection unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TlduResult {
    pub detected: bool,
    /// Physical qudit now holding the data slot.
    pub replaced_by: usize,
    /// Fourier-basis outcome on the old qudit, or `None` (the loss symbol).
    pub outcome: Option<u32>,
    /// When the detected loss happened.
    pub lost_at: Option<Location>,
}

/// Role of a physical qudit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Data(usize),
    Reference(usize),
    Syndrome(usize),
    Fresh(usize),
    Free,
}

/// An undetected fresh-qudit loss (TLDU case 2), invisible to the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HiddenLoss {
    pub slot: usize,
    pub location: Location,
}

/// Internal faults that actually fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FaultCounts {
    pub pauli: usize,
    pub losses: usize,
}

/// A visited fault location, for enumerating single-fault schedules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Visit {
    pub location: Location,
    pub class: LocationClass,
    pub arity: usize,
}

#[derive(Debug, Clone)]
pub struct SimState {
    dim: u32,
    n: usize,
    k: usize,
    tab: Tableau,
    lost: Vec<bool>,
    /// Where each qudit was lost.
    lost_at: Vec<Option<Location>>,
    roles: Vec<Role>,
    data: Vec<usize>,
    pool: Vec<usize>,
    rng: ChaCha8Rng,
    events: BTreeMap<Location, Vec<FaultKind>>,
    mode: NoiseMode,
    cat_prep_faults: bool,
    round: u32,
    generator_index: u32,
    gate_index: u32,
    hidden: Vec<HiddenLoss>,
    counts: FaultCounts,
    visits: Option<Vec<Visit>>,
}

impl SimState {
    /// The code state `|0̄…0̄⟩` purified by `k` reference qudits, with `pool` ancillas in `|0⟩`.
    pub fn codeword(code: &StabilizerGroup, seed: u64, schedule: &FaultSchedule) -> Result<Self> {
        let dim = code.dim();
        if !crate::zmod::is_prime(dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let red = code.reduce()?;
        let n = code.n();
        let k = code.meta().map_or(0, |m| m.logical_x.len());
        let pool = 2 * red.gens().iter().map(PauliOp::weight).max().unwrap_or(1);
        let total = n + k + pool;
        let data_idx: Vec<usize> = (0..n).collect();
        let mut rows: Vec<PauliOp> = red.gens().iter().map(|g| g.embed(&data_idx, total).expect("in range")).collect();
        if let Some(meta) = code.meta() {
            for (i, (lx, lz)) in meta.logical_x.iter().zip(&meta.logical_z).enumerate() {
                let r = n + i;
                let a = lx.comm_unchecked(lz);
                let wide = |p: &PauliOp, rx: u32, rz: u32| {
                    let base = p.phase_free().embed(&data_idx, total).expect("in range");
                    let base = base.mul_unchecked(&PauliOp::single(dim, total, r, rx, rz));
                    let m = base.phase_modulus();
                    (0..m).map(|c| base.clone().with_phase(c)).find(|q| q.pow(dim).is_identity()).expect("order d")
                };
                rows.push(wide(lx, 1, 0));
                rows.push(wide(lz, 0, a));
            }
        }
        if rows.len() != n + k {
            return Err(Error::Config(format!("code has {} generators and {k} logical pairs on {n} qudits", red.gens().len())));
        }
        rows.extend((n + k..total).map(|q| PauliOp::single(dim, total, q, 0, 1)));
        let mut roles: Vec<Role> = (0..n).map(Role::Data).collect();
        roles.extend((0..k).map(Role::Reference));
        roles.extend((0..pool).map(|_| Role::Free));
        Ok(Self {
            dim,
            n,
            k,
            tab: Tableau::from_rows(dim, rows),
            lost: vec![false; total],
            lost_at: vec![None; total],
            roles,
            data: data_idx,
            pool: (n + k..total).rev().collect(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            events: schedule.by_location(),
            mode: schedule.mode.clone(),
            cat_prep_faults: schedule.cat_prep_faults,
            round: 0,
            generator_index: 0,
            gate_index: 0,
            hidden: vec![],
            counts: FaultCounts::default(),
            visits: None,
        })
    }

    /// `n` data qudits in `|0⟩` with no references; for gate-level tests.
    pub fn zero(dim: u32, n: usize, seed: u64) -> Result<Self> {
        let code = StabilizerGroup::new(dim, n, (0..n).map(|q| PauliOp::single(dim, n, q, 0, 1)).collect())?;
        Self::codeword(&code, seed, &FaultSchedule::empty())
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tableau(&self) -> &Tableau {
        &self.tab
    }

    pub fn data_phys(&self, slot: usize) -> usize {
        self.data[slot]
    }

    pub fn role(&self, phys: usize) -> Role {
        self.roles[phys]
    }

    pub fn is_lost(&self, phys: usize) -> bool {
        self.lost[phys]
    }

    /// Data slots whose current physical qudit is lost.
    pub fn lost_data(&self) -> QuditSet {
        (0..self.n).filter(|&q| self.lost[self.data[q]]).collect()
    }

    pub fn hidden_losses(&self) -> &[HiddenLoss] {
        &self.hidden
    }

    pub fn fault_counts(&self) -> FaultCounts {
        self.counts
    }

    /// Starts recording visited fault locations.
    pub fn record_visits(&mut self) {
        self.visits = Some(vec![]);
    }

    pub fn visits(&self) -> &[Visit] {
        self.visits.as_deref().unwrap_or(&[])
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Sets the `(round, generatorIndex)` part of subsequent fault locations.
    pub fn set_context(&mut self, round: u32, generator_index: u32) {
        self.round = round;
        self.generator_index = generator_index;
        self.gate_index = 0;
    }

    fn total(&self) -> usize {
        self.lost.len()
    }

    fn grow(&mut self, extra: usize) {
        let old = self.total();
        let new = old + extra;
        let idx: Vec<usize> = (0..old).collect();
        let mut rows: Vec<PauliOp> = self.tab.rows().iter().map(|r| r.embed(&idx, new).expect("in range")).collect();
        rows.extend((old..new).map(|q| PauliOp::single(self.dim, new, q, 0, 1)));
        self.tab = Tableau::from_rows(self.dim, rows);
        self.lost.resize(new, false);
        self.lost_at.resize(new, None);
        self.roles.resize(new, Role::Free);
        self.pool.extend((old..new).rev());
    }

    fn take(&mut self, count: usize) -> Vec<usize> {
        if self.pool.len() < count {
            self.grow(count - self.pool.len());
        }
        let at = self.pool.len() - count;
        let mut out = self.pool.split_off(at);
        out.reverse();
        out
    }

    /// Measures out a qudit and marks it lost.
    fn lose(&mut self, q: usize) {
        if self.lost[q] {
            return;
        }
        let z = PauliOp::single(self.dim, self.total(), q, 0, 1);
        self.tab.measure(&z, &mut self.rng);
        self.lost[q] = true;
        self.lost_at[q] = Some(self.here());
    }

    /// Returns `q` to `|0⟩`, replacing it by a fresh qudit if it was lost, and frees it.
    fn release(&mut self, q: usize) {
        self.lost[q] = false;
        self.lost_at[q] = None;
        let total = self.total();
        let m = self.tab.measure(&PauliOp::single(self.dim, total, q, 0, 1), &mut self.rng);
        if m != 0 {
            self.tab.apply_pauli(&PauliOp::single(self.dim, total, q, self.dim - m, 0));
        }
        self.roles[q] = Role::Free;
        self.pool.push(q);
    }

    fn here(&self) -> Location {
        Location { round: self.round, generator_index: self.generator_index, gate_index: self.gate_index }
    }

    fn wide_pauli(&self, operands: &[usize], x: &[u32], z: &[u32]) -> PauliOp {
        let total = self.total();
        let mut xs = vec![0; total];
        let mut zs = vec![0; total];
        for (i, &q) in operands.iter().enumerate() {
            if !self.lost[q] {
                xs[q] = x[i] % self.dim;
                zs[q] = z[i] % self.dim;
            }
        }
        PauliOp::new(self.dim, xs, zs, 0).expect("valid exponents")
    }

    /// Visits a fault location: applies scheduled or sampled losses now and returns the
    /// Pauli fault (if any) for the caller to place after the gate or before the measurement.
    fn visit(&mut self, class: LocationClass, operands: &[usize]) -> Option<PauliOp> {
        let loc = self.here();
        self.gate_index += 1;
        if let Some(v) = &mut self.visits {
            v.push(Visit { location: loc, class, arity: operands.len() });
        }
        let mut pauli = None;
        if let Some(kinds) = self.events.get(&loc).cloned() {
            for kind in kinds {
                match kind {
                    FaultKind::Loss { operand } => {
                        if let Some(&q) = operands.get(operand) {
                            if !self.lost[q] {
                                self.counts.losses += 1;
                                self.lose(q);
                            }
                        }
                    }
                    FaultKind::Pauli { x, z } => {
                        self.counts.pauli += 1;
                        pauli = Some(self.wide_pauli(operands, &x, &z));
                    }
                }
            }
        }
        if let NoiseMode::Stochastic { p_pauli, p_loss } = &self.mode {
            let (pp, pl) = (p_pauli.get(class), p_loss.get(class));
            for &q in operands {
                if pl > 0.0 && self.rng.random::<f64>() < pl && !self.lost[q] {
                    self.counts.losses += 1;
                    self.lose(q);
                }
            }
            if pp > 0.0 && self.rng.random::<f64>() < pp {
                let letters = (self.dim as usize).pow(2 * operands.len() as u32);
                let mut c = self.rng.random_range(1..letters);
                let mut x = vec![0; operands.len()];
                let mut z = vec![0; operands.len()];
                for i in 0..operands.len() {
                    x[i] = (c % self.dim as usize) as u32;
                    c /= self.dim as usize;
                    z[i] = (c % self.dim as usize) as u32;
                    c /= self.dim as usize;
                }
                self.counts.pauli += 1;
                pauli = Some(self.wide_pauli(operands, &x, &z));
            }
        }
        pauli
    }

    fn gate_at(&mut self, class: LocationClass, gate: Gate, operands: &[usize]) {
        let fault = self.visit(class, operands);
        self.raw_gate(gate, operands);
        if let Some(p) = fault {
            self.tab.apply_pauli(&p);
        }
    }

    fn measure_at(&mut self, class: LocationClass, q: usize) -> Option<u32> {
        if let Some(p) = self.visit(class, &[q]) {
            self.tab.apply_pauli(&p);
        }
        self.raw_measure_z(q)
    }

    fn raw_gate(&mut self, gate: Gate, operands: &[usize]) {
        if operands.iter().any(|&q| self.lost[q]) {
            return;
        }
        self.tab.apply_gate(gate, operands);
    }

    fn raw_measure_z(&mut self, q: usize) -> Option<u32> {
        if self.lost[q] {
            return None;
        }
        let z = PauliOp::single(self.dim, self.total(), q, 0, 1);
        Some(self.tab.measure(&z, &mut self.rng))
    }

    /// Noiseless gate on physical qudits; a no-op if any operand is lost.
    pub fn apply_gate(&mut self, gate: Gate, qudits: &[usize]) -> Result<()> {
        if qudits.len() != gate.arity() || qudits.iter().any(|&q| q >= self.total()) {
            return Err(Error::IndexError { index: qudits.iter().copied().max().unwrap_or(0), n: self.total() });
        }
        self.raw_gate(gate, qudits);
        Ok(())
    }

    /// Noiseless Z measurement of a physical qudit; `None` is the loss symbol.
    pub fn measure_z(&mut self, q: usize) -> Option<u32> {
        self.raw_measure_z(q)
    }

    /// Maps an operator on data slots (and references, after the data) onto physical qudits.
    fn to_phys(&self, p: &PauliOp) -> PauliOp {
        let mut idx = self.data.clone();
        idx.extend(self.n..self.n + self.k);
        let p = if p.n() == self.n {
            p.embed(&(0..self.n).collect::<Vec<_>>(), self.n + self.k).expect("in range")
        } else {
            p.clone()
        };
        p.embed(&idx, self.total()).expect("in range")
    }

    /// Applies a Pauli to the data slots, skipping lost qudits.
    pub fn apply_data_pauli(&mut self, p: &PauliOp) {
        let wide = self.to_phys(p);
        let keep: std::collections::BTreeSet<usize> = (0..self.total()).filter(|&q| !self.lost[q]).collect();
        self.tab.apply_pauli(&wide.mask(&keep));
    }

    /// Loses the physical qudit of a data slot (an input loss).
    pub fn lose_data(&mut self, slot: usize) {
        let q = self.data[slot];
        self.lose(q);
    }

    /// Ideal replacement of a data slot by a fresh `|0⟩` qudit.
    pub fn replace_data(&mut self, slot: usize) {
        let q = self.data[slot];
        self.lost[q] = true;
        let fresh = self.take(1)[0];
        self.release(q);
        self.data[slot] = fresh;
        self.roles[fresh] = Role::Data(slot);
    }

    /// Noiseless projective measurement of an operator on data slots; `None` if it touches a lost qudit.
    pub fn measure_data_ideal(&mut self, p: &PauliOp) -> Option<u32> {
        if p.support().iter().any(|&q| q < self.n && self.lost[self.data[q]]) {
            return None;
        }
        let wide = self.to_phys(p);
        Some(self.tab.measure(&wide, &mut self.rng))
    }

    /// True iff every operator in `ops` (on data slots, optionally followed by references)
    /// stabilizes the current state with its exact phase.
    pub fn stabilized_by(&self, ops: &[PauliOp]) -> bool {
        ops.iter().all(|p| self.tab.stabilizes(&self.to_phys(p)))
    }

    /// The stabilizer generators of the initial purified codeword on `n + k` qudits.
    pub fn purified_generators(code: &StabilizerGroup) -> Result<Vec<PauliOp>> {
        let s = Self::codeword(code, 0, &FaultSchedule::empty())?;
        let nk = s.n + s.k;
        let idx: Vec<usize> = (0..nk).collect();
        Ok(s.tab.rows()[..nk].iter().map(|r| r.restrict(&idx).expect("in range")).collect())
    }

    /// Shor-style measurement of `g` with a `|supp g|`-qudit cat state and a data TLDU after
    /// each controlled gate.
    pub fn measure_stabilizer(&mut self, g: &PauliOp) -> GadgetResult {
        let dim = self.dim;
        let support: Vec<usize> = g.support().into_iter().collect();
        let w = support.len();
        for q in 0..self.n {
            if !support.contains(&q) {
                let p = self.data[q];
                if let Some(f) = self.visit(LocationClass::Idle, &[p]) {
                    self.tab.apply_pauli(&f);
                }
            }
        }
        let cat = self.take(w);
        let fresh = self.take(w);
        for (j, &q) in support.iter().enumerate() {
            self.roles[cat[j]] = Role::Syndrome(q);
            self.roles[fresh[j]] = Role::Fresh(q);
        }
        self.prepare_cat(&cat);

        let mut replaced = QuditSet::new();
        let mut locations = BTreeMap::new();
        let mut affected = QuditSet::new();
        for (j, &q) in support.iter().enumerate() {
            let (s, f) = (cat[j], fresh[j]);
            let d = self.data[q];
            let gate = Gate::ControlledPauli { r: g.x()[q], s: g.z()[q] };
            self.gate_at(LocationClass::Gate, gate, &[s, d]);
            let t = self.tldu_inner(q, f);
            if t.detected {
                replaced.insert(q);
                affected.insert(q);
                locations.insert(q, t.lost_at.expect("detected losses are stamped"));
            }
        }

        let mut total = 0u64;
        let mut valid = true;
        for (j, &q) in support.iter().enumerate() {
            let s = cat[j];
            self.gate_at(LocationClass::Gate, Gate::Fourier, &[s]);
            match self.measure_at(LocationClass::Measurement, s) {
                Some(m) => total += m as u64,
                None => {
                    valid = false;
                    affected.insert(q);
                }
            }
        }
        for &s in &cat {
            self.release(s);
        }
        let outcome = if valid && replaced.is_empty() {
            // The letters multiply to ζ^e g; the cat parity measures the letters' product.
            let letters: PauliOp = support
                .iter()
                .fold(PauliOp::identity(dim, self.n), |acc, &q| acc.mul_unchecked(&letter(dim, self.n, q, g.x()[q], g.z()[q])));
            let step = g.phase_modulus() / dim;
            let e = (letters.phase() + g.phase_modulus() - g.phase()) % g.phase_modulus() / step;
            let lambda = (dim as u64 - total % dim as u64) % dim as u64;
            Outcome::Value(((lambda + dim as u64 - e as u64 % dim as u64) % dim as u64) as u32)
        } else {
            Outcome::Invalid
        };
        GadgetResult { outcome, affected, replaced, loss_locations: locations }
    }

    /// Teleports data slot `q` onto the `|0⟩` qudit `f` (data is the SUM control).
    fn tldu_inner(&mut self, q: usize, f: usize) -> TlduResult {
        let dim = self.dim;
        let d = self.data[q];
        self.gate_at(LocationClass::Tldu, Gate::Sum, &[d, f]);
        self.gate_at(LocationClass::Tldu, Gate::Fourier, &[d]);
        let a = self.measure_at(LocationClass::Tldu, d);
        // The classically controlled Z^{-a} on the fresh qudit.
        let fault = self.visit(LocationClass::Tldu, &[f]);
        if let Some(a) = a {
            if a != 0 && !self.lost[f] {
                let total = self.total();
                self.tab.apply_pauli(&PauliOp::single(dim, total, f, 0, dim - a));
            }
        }
        if let Some(p) = fault {
            self.tab.apply_pauli(&p);
        }
        let lost_at = if a.is_none() { self.lost_at[d] } else { None };
        if self.lost[f] {
            self.hidden.push(HiddenLoss { slot: q, location: self.lost_at[f].expect("stamped") });
        }
        self.data[q] = f;
        self.roles[f] = Role::Data(q);
        self.release(d);
        TlduResult { detected: a.is_none(), replaced_by: f, outcome: a, lost_at }
    }

    /// A stand-alone noiseless TLDU on data slot `slot`, with the data and/or fresh qudit
    /// lost just before the SUM gate.
    pub fn tldu(&mut self, slot: usize, lose_data: bool, lose_fresh: bool) -> TlduResult {
        let f = self.take(1)[0];
        self.roles[f] = Role::Fresh(slot);
        if lose_data {
            self.lose(self.data[slot]);
        }
        if lose_fresh {
            self.lose(f);
        }
        self.tldu_inner(slot, f)
    }

    fn prepare_cat(&mut self, cat: &[usize]) {
        let Some(&head) = cat.first() else { return };
        let steps = std::iter::once((Gate::Fourier, vec![head])).chain(cat[1..].iter().map(|&c| (Gate::Sum, vec![head, c])));
        for (gate, ops) in steps {
            if self.cat_prep_faults {
                self.gate_at(LocationClass::Gate, gate, &ops);
            } else {
                self.raw_gate(gate, &ops);
            }
        }
    }
}
