//! Brute-force syndrome tables shipped next to the code corpus.
//!
//! File format, one entry per reachable syndrome in syndrome order:
//!
//! ```text
//! # <name> dim=<d> n=<n>
//! <syndrome> <weight> <operator>
//! ```

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::pauli::PauliOp;
use crate::stab::StabilizerGroup;

/// Enumeration cap: `d^{2n}` operators are visited.
pub const TABLE_MAX_OPERATORS: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndromeTable {
    /// Syndrome values → lightest operator, ties broken by the first in enumeration order.
    pub entries: BTreeMap<Vec<u32>, PauliOp>,
}

/// Lightest Pauli for every reachable syndrome, by visiting every operator.
pub fn syndrome_table(code: &StabilizerGroup) -> Result<SyndromeTable> {
    let (d, n) = (code.dim(), code.n());
    let total = (d as u64).checked_pow(2 * n as u32).filter(|&t| t <= TABLE_MAX_OPERATORS);
    let Some(total) = total else {
        return Err(Error::OracleBudgetExceeded(format!("{d}^{} operators", 2 * n)));
    };
    let mut entries: BTreeMap<Vec<u32>, PauliOp> = BTreeMap::new();
    for index in 0..total {
        let mut rest = index;
        let mut digits = vec![0u32; 2 * n];
        for v in digits.iter_mut() {
            *v = (rest % d as u64) as u32;
            rest /= d as u64;
        }
        let p = PauliOp::new(d, digits[..n].to_vec(), digits[n..].to_vec(), 0)?;
        let s = code.syndrome(&p).valid_values().expect("ideal syndromes are valid");
        match entries.get(&s) {
            Some(best) if best.weight() <= p.weight() => {}
            _ => {
                entries.insert(s, p);
            }
        }
    }
    Ok(SyndromeTable { entries })
}

impl SyndromeTable {
    pub fn to_text(&self, name: &str, code: &StabilizerGroup) -> String {
        let mut out = format!("# {name} dim={} n={}\n", code.dim(), code.n());
        for (s, p) in &self.entries {
            let s: String = s.iter().map(|v| char::from_digit(*v, 36).expect("dim ≤ 36")).collect();
            out.push_str(&format!("{s} {} {}\n", p.weight(), p.to_text()));
        }
        out
    }
}
