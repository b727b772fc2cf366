//! Brute-force reference for EEC measurement counts.
//!
//! States are tracked as stabilizer groups modulo phases on the data qudits plus `k`
//! reference qudits that purify the logical information, so "restores the code" means
//! "recovers the purified code group exactly".

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::pauli::PauliOp;
use crate::stab::{QuditSet, StabilizerGroup};
use crate::zmod;

const MAX_STATES: usize = 2_000_000;

fn sym_comm(a: &[u32], b: &[u32], d: u32) -> u32 {
    let n = a.len() / 2;
    let m = d as u64;
    let mut acc = 0u64;
    for i in 0..n {
        acc += a[n + i] as u64 * b[i] as u64 + (m - a[i] as u64) * b[n + i] as u64;
    }
    (acc % m) as u32
}

fn canon(rows: &[Vec<u32>], d: u32) -> Vec<Vec<u32>> {
    let ncols = rows.first().map_or(0, Vec::len);
    zmod::howell_form(rows, ncols, d)
}

/// Phase-free update of a stabilizer group (prime `d`) by a projective measurement of `v`.
pub fn measure_rows(rows: &[Vec<u32>], v: &[u32], d: u32) -> Vec<Vec<u32>> {
    let m = d as u64;
    let comms: Vec<u32> = rows.iter().map(|r| sym_comm(r, v, d)).collect();
    let Some(p) = comms.iter().position(|&c| c != 0) else {
        let mut out = rows.to_vec();
        out.push(v.to_vec());
        return canon(&out, d);
    };
    let inv = zmod::inv_mod(comms[p] as u64, m).expect("prime dimension");
    let mut out: Vec<Vec<u32>> = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        if i == p {
            out.push(v.to_vec());
        } else if comms[i] == 0 {
            out.push(r.clone());
        } else {
            let f = comms[i] as u64 * inv % m;
            out.push(
                r.iter()
                    .zip(&rows[p])
                    .map(|(&a, &b)| ((a as u64 + m - f * b as u64 % m) % m) as u32)
                    .collect(),
            );
        }
    }
    canon(&out, d)
}

/// Purified code group on `n + k` qudits: stabilizers plus `X̄_i X_ref`, `Z̄_i Z_ref^{a_i}`.
pub fn purified_rows(code: &StabilizerGroup) -> Result<Vec<Vec<u32>>> {
    let d = code.dim();
    let n = code.n();
    let k = code.k()?;
    let meta = code.meta().ok_or(Error::MissingMetadata("logical operators"))?;
    if meta.logical_x.len() != k {
        return Err(Error::MissingMetadata("logical operators"));
    }
    let total = n + k;
    let widen = |p: &PauliOp, rx: u32, rz: u32, slot: usize| -> Vec<u32> {
        let mut v = vec![0u32; 2 * total];
        v[..n].copy_from_slice(p.x());
        v[total..total + n].copy_from_slice(p.z());
        if k > 0 {
            v[n + slot] = rx;
            v[total + n + slot] = rz;
        }
        v
    };
    let mut rows: Vec<Vec<u32>> = code.gens().iter().map(|g| widen(g, 0, 0, 0)).collect();
    for (i, (x, z)) in meta.logical_x.iter().zip(&meta.logical_z).enumerate() {
        let a = x.comm_unchecked(z);
        rows.push(widen(x, 1, 0, i));
        rows.push(widen(z, 0, a, i));
    }
    Ok(canon(&rows, d))
}

/// Widens a data-register operator to the purified register.
fn widen_op(p: &PauliOp, k: usize) -> Vec<u32> {
    let n = p.n();
    let mut v = vec![0u32; 2 * (n + k)];
    v[..n].copy_from_slice(p.x());
    v[n + k..n + k + n].copy_from_slice(p.z());
    v
}

/// Group after erasing `l` and replacing each erased qudit with `|0⟩`.
pub fn erased_rows(code: &StabilizerGroup, l: &QuditSet) -> Result<Vec<Vec<u32>>> {
    let d = code.dim();
    let n = code.n();
    let k = code.k()?;
    let total = n + k;
    let full = purified_rows(code)?;
    // Keep the elements trivial on `l`: left kernel of the columns on `l`.
    let cols: Vec<Vec<u32>> = full
        .iter()
        .map(|r| l.iter().flat_map(|&q| [r[q], r[total + q]]).collect())
        .collect();
    let mut out: Vec<Vec<u32>> = if l.is_empty() {
        full.clone()
    } else {
        zmod::left_kernel(&cols, 2 * l.len(), d)
            .iter()
            .map(|x| {
                let mut acc = vec![0u64; 2 * total];
                for (r, &c) in full.iter().zip(x) {
                    for (a, &v) in acc.iter_mut().zip(r) {
                        *a = (*a + c as u64 * v as u64) % d as u64;
                    }
                }
                acc.into_iter().map(|v| v as u32).collect()
            })
            .collect()
    };
    for &q in l {
        let mut z = vec![0u32; 2 * total];
        z[total + q] = 1;
        out.push(z);
    }
    Ok(canon(&out, d))
}

/// Shortest sequence of code-group elements whose measurement restores the code after
/// erasing `l` and replacing with `|0⟩`; breadth-first over group states.
pub fn oracle_min_sequence(code: &StabilizerGroup, l: &QuditSet) -> Result<Vec<PauliOp>> {
    let d = code.dim();
    if !zmod::is_prime(d) {
        return Err(Error::UnsupportedDimension(d));
    }
    if code.n() > 7 || l.len() > 3 {
        return Err(Error::OracleBudgetExceeded(format!("n = {}, |L| = {}", code.n(), l.len())));
    }
    let k = code.k()?;
    let target = purified_rows(code)?;
    let start = erased_rows(code, l)?;
    if start == target {
        return Ok(Vec::new());
    }
    // One representative per cyclic subgroup of S/K.
    let mut seen = HashSet::new();
    let candidates: Vec<PauliOp> = code
        .elements()
        .into_iter()
        .filter(|e| !e.is_scalar())
        .filter(|e| {
            let v = e.symplectic();
            let lead = *v.iter().find(|&&x| x != 0).expect("nonzero");
            let inv = zmod::inv_mod(lead as u64, d as u64).expect("prime dimension");
            let norm: Vec<u32> = v.iter().map(|&x| (x as u64 * inv % d as u64) as u32).collect();
            seen.insert(norm)
        })
        .collect();
    let widened: Vec<Vec<u32>> = candidates.iter().map(|c| widen_op(c, k)).collect();
    let mut visited: HashSet<Vec<Vec<u32>>> = HashSet::new();
    let mut queue: VecDeque<(Vec<Vec<u32>>, Vec<usize>)> = VecDeque::new();
    visited.insert(start.clone());
    queue.push_back((start, Vec::new()));
    while let Some((state, path)) = queue.pop_front() {
        for (i, v) in widened.iter().enumerate() {
            let next = measure_rows(&state, v, d);
            if next == target {
                let mut p = path.clone();
                p.push(i);
                return Ok(p.into_iter().map(|j| candidates[j].clone()).collect());
            }
            if visited.insert(next.clone()) {
                if visited.len() > MAX_STATES {
                    return Err(Error::OracleBudgetExceeded(format!("more than {MAX_STATES} states")));
                }
                let mut p = path.clone();
                p.push(i);
                queue.push_back((next, p));
            }
        }
    }
    Err(Error::NotCleanable(format!("no measurement sequence restores the code after erasing {l:?}")))
}

pub fn oracle_min_measurements(code: &StabilizerGroup, l: &QuditSet) -> Result<usize> {
    oracle_min_sequence(code, l).map(|s| s.len())
}

/// Whether measuring `seq` (in order) after erasing `l` restores the code.
pub fn sequence_restores(code: &StabilizerGroup, l: &QuditSet, seq: &[PauliOp]) -> Result<bool> {
    let d = code.dim();
    let k = code.k()?;
    let mut state = erased_rows(code, l)?;
    for p in seq {
        state = measure_rows(&state, &widen_op(p, k), d);
    }
    Ok(state == purified_rows(code)?)
}
