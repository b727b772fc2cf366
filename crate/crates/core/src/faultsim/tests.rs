use super::*;
use crate::codes;

/// Dense complex matrices for checking Clifford images exactly (up to float noise).
mod dense {
    use crate::pauli::PauliOp;

    pub type C = (f64, f64);
    pub type M = Vec<Vec<C>>;

    fn mul_c(a: C, b: C) -> C {
        (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
    }

    pub fn root(dmod: u32, a: u32) -> C {
        let t = 2.0 * std::f64::consts::PI * a as f64 / dmod as f64;
        (t.cos(), t.sin())
    }

    pub fn mul(a: &M, b: &M) -> M {
        let n = a.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold((0.0, 0.0), |acc, k| {
                            let p = mul_c(a[i][k], b[k][j]);
                            (acc.0 + p.0, acc.1 + p.1)
                        })
                    })
                    .collect()
            })
            .collect()
    }

    pub fn dagger(a: &M) -> M {
        let n = a.len();
        (0..n).map(|i| (0..n).map(|j| (a[j][i].0, -a[j][i].1)).collect()).collect()
    }

    pub fn kron(a: &M, b: &M) -> M {
        let (n, m) = (a.len(), b.len());
        (0..n * m)
            .map(|i| (0..n * m).map(|j| mul_c(a[i / m][j / m], b[i % m][j % m])).collect())
            .collect()
    }

    pub fn close(a: &M, b: &M) -> bool {
        a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x.0 - y.0).abs() < 1e-9 && (x.1 - y.1).abs() < 1e-9)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> C) -> M {
        (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect()
    }

    /// `ζ^a ⊗_q X^{x_q} Z^{z_q}`, qudit 0 most significant.
    pub fn pauli(p: &PauliOp) -> M {
        let d = p.dim() as usize;
        let mut out: M = vec![vec![(1.0, 0.0)]];
        for q in 0..p.n() {
            let (x, z) = (p.x()[q] as usize, p.z()[q] as usize);
            let xm = from_fn(d, |i, j| if i == (j + x) % d { (1.0, 0.0) } else { (0.0, 0.0) });
            let zm = from_fn(d, |i, j| if i == j { root(d as u32, (z * j) as u32) } else { (0.0, 0.0) });
            out = kron(&out, &mul(&xm, &zm));
        }
        let s = root(p.phase_modulus(), p.phase());
        out.iter().map(|r| r.iter().map(|&c| mul_c(c, s)).collect()).collect()
    }

    /// Gate unitary on 2 qudits (the Fourier gate acts on qudit 0).
    pub fn gate(g: super::Gate, d: usize) -> M {
        let w = |a: usize| root(d as u32, (a % d) as u32);
        let f = from_fn(d, |j, i| {
            let r = w(i * j);
            (r.0 / (d as f64).sqrt(), r.1 / (d as f64).sqrt())
        });
        let id = from_fn(d, |i, j| if i == j { (1.0, 0.0) } else { (0.0, 0.0) });
        match g {
            super::Gate::Fourier => kron(&f, &id),
            super::Gate::Sum => from_fn(d * d, |row, col| {
                let (i, j) = (col / d, col % d);
                if row == i * d + (i + j) % d {
                    (1.0, 0.0)
                } else {
                    (0.0, 0.0)
                }
            }),
            super::Gate::ControlledPauli { r, s } => {
                let p = pauli(&super::letter(d as u32, 1, 0, r, s));
                let mut out = from_fn(d * d, |_, _| (0.0, 0.0));
                let mut pk = id.clone();
                for k in 0..d {
                    for a in 0..d {
                        for b in 0..d {
                            out[k * d + a][k * d + b] = pk[a][b];
                        }
                    }
                    pk = mul(&p, &pk);
                }
                out
            }
        }
    }
}

#[test]
fn gate_images_match_dense_oracle() {
    for d in [2u32, 3] {
        let mut gates = vec![Gate::Fourier, Gate::Sum];
        for r in 0..d {
            for s in 0..d {
                gates.push(Gate::ControlledPauli { r, s });
            }
        }
        for gate in gates {
            let u = dense::gate(gate, d as usize);
            for q in 0..2 {
                for (x, z) in [(1, 0), (0, 1), (1, 1)] {
                    let p = PauliOp::single(d, 2, q, x, z);
                    let mut t = Tableau::from_rows(d, vec![p.clone()]);
                    let operands: Vec<usize> = (0..gate.arity()).collect();
                    t.apply_gate(gate, &operands);
                    let expect = dense::mul(&dense::mul(&u, &dense::pauli(&p)), &dense::dagger(&u));
                    assert!(dense::close(&dense::pauli(&t.rows()[0]), &expect), "d={d} {gate:?} on {p}");
                }
            }
        }
    }
}

#[test]
fn letters_have_order_d() {
    for d in [2u32, 3, 5] {
        for r in 0..d {
            for s in 0..d {
                assert!(letter(d, 1, 0, r, s).pow(d).is_identity());
            }
        }
    }
    assert_eq!(letter(2, 1, 0, 1, 1).to_text(), "Y");
}

#[test]
fn cnot_and_fourier_examples() {
    let mut st = SimState::zero(2, 2, 1).unwrap();
    st.apply_gate(Gate::Sum, &[0, 1]).unwrap();
    let zi = PauliOp::parse("ZI", 2, 2).unwrap();
    let zz = PauliOp::parse("ZZ", 2, 2).unwrap();
    assert!(st.stabilized_by(&[zi, zz]));

    let mut st = SimState::zero(3, 1, 1).unwrap();
    st.apply_gate(Gate::Fourier, &[0]).unwrap();
    assert!(st.stabilized_by(&[PauliOp::parse("X1", 3, 1).unwrap()]));
}

#[test]
fn gate_on_lost_qudit_is_a_no_op() {
    let mut st = SimState::zero(2, 2, 1).unwrap();
    st.lose_data(0);
    let before = st.tableau().clone();
    st.apply_gate(Gate::Sum, &[0, 1]).unwrap();
    st.apply_gate(Gate::Fourier, &[0]).unwrap();
    assert_eq!(st.tableau(), &before);
    assert_eq!(st.measure_z(0), None);
}

#[test]
fn tldu_without_loss_teleports_and_outcomes_are_uniform() {
    for d in [2u32, 3] {
        let code = codes::builtin(if d == 2 { "five_qubit" } else { "qutrit_five" }).unwrap();
        let target = SimState::purified_generators(&code).unwrap();
        let mut counts = vec![0usize; d as usize];
        let trials = 10_000;
        for seed in 0..trials {
            let mut st = SimState::codeword(&code, seed, &FaultSchedule::empty()).unwrap();
            let r = st.tldu(0, false, false);
            assert!(!r.detected);
            counts[r.outcome.unwrap() as usize] += 1;
            if seed < 200 {
                assert!(st.stabilized_by(&target));
            }
        }
        let expect = trials as f64 / d as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
        let p = 1.0 - statrs::distribution::ContinuousCDF::cdf(&statrs::distribution::ChiSquared::new(d as f64 - 1.0).unwrap(), chi2);
        assert!(p > 1e-3, "d={d} counts={counts:?}");
    }
}

#[test]
fn tldu_loss_cases() {
    let code = codes::builtin("five_qubit").unwrap();
    // Case 1: the data qudit is lost, detected, replaced by |0⟩.
    let mut st = SimState::codeword(&code, 3, &FaultSchedule::empty()).unwrap();
    let r = st.tldu(1, true, false);
    assert!(r.detected && r.outcome.is_none());
    assert!(!st.is_lost(r.replaced_by));
    let z2 = PauliOp::parse("IZIII", 2, 5).unwrap();
    assert!(st.stabilized_by(&[z2]));
    assert!(st.hidden_losses().is_empty());

    // Case 2: the fresh qudit is lost; not detected, recorded in the hidden ledger, and
    // detected by the next TLDU on the same slot.
    let mut st = SimState::codeword(&code, 3, &FaultSchedule::empty()).unwrap();
    let r = st.tldu(1, false, true);
    assert!(!r.detected && r.outcome.is_some());
    assert!(st.is_lost(st.data_phys(1)));
    assert_eq!(st.hidden_losses().len(), 1);
    let next = st.tldu(1, false, false);
    assert!(next.detected);
    assert!(!st.is_lost(st.data_phys(1)));

    // Case 3: both lost; detected, and the replacement is itself lost.
    let mut st = SimState::codeword(&code, 3, &FaultSchedule::empty()).unwrap();
    let r = st.tldu(1, true, true);
    assert!(r.detected);
    assert!(st.is_lost(st.data_phys(1)));
}

fn five_qubit_state(seed: u64) -> (StabilizerGroup, SimState) {
    let code = codes::builtin("five_qubit").unwrap();
    let st = SimState::codeword(&code, seed, &FaultSchedule::empty()).unwrap();
    (code, st)
}

#[test]
fn gadget_examples() {
    let (code, mut st) = five_qubit_state(7);
    let g4 = code.gens()[3].clone();
    assert_eq!(g4.to_text(), "ZXIXZ");
    let r = st.measure_stabilizer(&g4);
    assert_eq!(r.outcome, Outcome::Value(0));
    assert!(r.affected.is_empty() && r.replaced.is_empty());

    let (_, mut st) = five_qubit_state(7);
    st.apply_data_pauli(&PauliOp::parse("XIIII", 2, 5).unwrap());
    assert_eq!(st.measure_stabilizer(&g4).outcome, Outcome::Value(1));

    // Syndrome qudit of data qubit 2 (gadget operation 0 is the idle on qubit 3, then
    // qubit 1's controlled gate and TLDU occupy operations 1-5).
    let loc = Location { round: 1, generator_index: 1, gate_index: 6 };
    let sched = FaultSchedule::deterministic(vec![FaultEvent { location: loc, kind: FaultKind::Loss { operand: 0 } }]);
    let mut st = SimState::codeword(&code, 7, &sched).unwrap();
    st.set_context(1, 1);
    let r = st.measure_stabilizer(&g4);
    assert_eq!(r.outcome, Outcome::Invalid);
    assert_eq!(r.affected, QuditSet::from([1]));
    assert!(r.replaced.is_empty());
}

#[test]
fn full_round_reproduces_syndromes() {
    for name in ["five_qubit", "steane", "qutrit_five"] {
        let code = codes::builtin(name).unwrap();
        let (d, n) = (code.dim(), code.n());
        let mut seed = 0;
        for q1 in 0..n {
            for q2 in q1..n {
                for c in 1..d * d {
                    let mut e = PauliOp::single(d, n, q1, c / d, c % d);
                    if q2 != q1 {
                        e = e.mul_unchecked(&PauliOp::single(d, n, q2, (c + 1) % d, c % d));
                    }
                    seed += 1;
                    let mut st = SimState::codeword(&code, seed, &FaultSchedule::empty()).unwrap();
                    st.apply_data_pauli(&e);
                    let got: Vec<Option<u32>> = code
                        .gens()
                        .iter()
                        .map(|g| match st.measure_stabilizer(g).outcome {
                            Outcome::Value(v) => Some(v),
                            _ => None,
                        })
                        .collect();
                    assert_eq!(got, code.syndrome(&e).values, "{name} {e}");
                }
            }
        }
    }
}

#[test]
fn replay_is_bit_exact() {
    let code = codes::builtin("steane").unwrap();
    let sched = FaultSchedule::stochastic(ClassRates::uniform(0.05), ClassRates::uniform(0.02));
    let run = || {
        let mut st = SimState::codeword(&code, 99, &sched).unwrap();
        let outcomes: Vec<Outcome> = code
            .gens()
            .iter()
            .enumerate()
            .map(|(i, g)| {
                st.set_context(1, i as u32 + 1);
                st.measure_stabilizer(g).outcome
            })
            .collect();
        (outcomes, st.tableau().clone(), st.hidden_losses().to_vec(), st.fault_counts())
    };
    assert_eq!(run(), run());
    let back = FaultSchedule::from_json(&sched.to_json()).unwrap();
    assert_eq!(back, sched);
}

#[test]
fn unaffected_local_subgroup_keeps_its_signs() {
    let code = codes::builtin("steane").unwrap();
    let g = code.gens()[0].clone();
    let support: Vec<usize> = g.support().into_iter().collect();
    // Operations 0-2 idle qubits 1-3; 3 is the first controlled gate, 4 the TLDU's SUM.
    let cases: [&[(u32, usize)]; 5] = [&[(4, 0)], &[(4, 1)], &[(4, 0), (4, 1)], &[(3, 0)], &[(3, 1)]];
    for events in cases {
        let events = events
            .iter()
            .map(|&(gate_index, operand)| FaultEvent {
                location: Location { round: 1, generator_index: 1, gate_index },
                kind: FaultKind::Loss { operand },
            })
            .collect();
        let sched = FaultSchedule::deterministic(events);
        let mut st = SimState::codeword(&code, 5, &sched).unwrap();
        st.set_context(1, 1);
        let r = st.measure_stabilizer(&g);
        let mut touched = r.affected.clone();
        touched.extend(st.hidden_losses().iter().map(|h| h.slot));
        touched.insert(support[0]);
        let outside: QuditSet = (0..code.n()).filter(|q| !touched.contains(q)).collect();
        let local = code.local_subgroup(&outside);
        assert!(st.stabilized_by(local.gens()), "{sched:?}");
    }
}
