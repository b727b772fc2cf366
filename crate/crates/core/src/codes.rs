//! Code definition files and the bundled corpus.
//!
//! ```text
//! # comment
//! dim=<d> n=<n> k=<k> dist=<dist>
//! <generator>            one per line, in the `pauli` text grammar
//! LX <operator>          optional logical X̄_i
//! LZ <operator>          optional logical Z̄_i
//! ```
//!
//! Blank lines and `#` comments are ignored. Stabilizer states use `k=0`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::pauli::PauliOp;
use crate::stab::{CodeMeta, StabilizerGroup};

/// Names of the bundled codes, usable with [`builtin`].
pub const BUILTIN: &[&str] = &[
    "five_qubit",
    "steane",
    "four_two_two",
    "qutrit_five",
    "d4_single",
    "d4_bell",
    "d6_bell",
    "d6_split",
    "cyclic_13",
];

pub fn builtin_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "five_qubit" => include_str!("../codes/five_qubit.code"),
        "steane" => include_str!("../codes/steane.code"),
        "four_two_two" => include_str!("../codes/four_two_two.code"),
        "qutrit_five" => include_str!("../codes/qutrit_five.code"),
        "d4_single" => include_str!("../codes/d4_single.code"),
        "d4_bell" => include_str!("../codes/d4_bell.code"),
        "d6_bell" => include_str!("../codes/d6_bell.code"),
        "d6_split" => include_str!("../codes/d6_split.code"),
        "cyclic_13" => include_str!("../codes/cyclic_13.code"),
        _ => return None,
    })
}

/// A bundled code by name.
pub fn builtin(name: &str) -> Result<StabilizerGroup> {
    let text = builtin_text(name).ok_or_else(|| Error::Config(format!("unknown builtin code `{name}`")))?;
    parse(text)
}

/// Loads a code file, or a bundled code when `path` is `builtin:<name>`.
pub fn load(path: &Path) -> Result<StabilizerGroup> {
    if let Some(name) = path.to_str().and_then(|s| s.strip_prefix("builtin:")) {
        return builtin(name);
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse(&text)
}

fn header_field(fields: &[(&str, &str)], key: &str) -> Result<u64> {
    let v = fields
        .iter()
        .find(|(k, _)| *k == key)
        .ok_or_else(|| Error::Parse(format!("header lacks `{key}=`")))?
        .1;
    v.parse().map_err(|_| Error::Parse(format!("bad header value `{key}={v}`")))
}

pub fn parse(text: &str) -> Result<StabilizerGroup> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty code file".into()))?;
    let fields: Vec<(&str, &str)> = header
        .split_whitespace()
        .map(|f| f.split_once('=').ok_or_else(|| Error::Parse(format!("bad header field `{f}`"))))
        .collect::<Result<_>>()?;
    let dim = header_field(&fields, "dim")? as u32;
    let n = header_field(&fields, "n")? as usize;
    let k = header_field(&fields, "k")? as usize;
    let dist = header_field(&fields, "dist")? as usize;
    if dim < 2 || n == 0 {
        return Err(Error::Parse(format!("invalid dimensions dim={dim} n={n}")));
    }
    let mut gens = Vec::new();
    let mut logical_x = Vec::new();
    let mut logical_z = Vec::new();
    for line in lines {
        if let Some(rest) = line.strip_prefix("LX ") {
            logical_x.push(PauliOp::parse(rest, dim, n)?);
        } else if let Some(rest) = line.strip_prefix("LZ ") {
            logical_z.push(PauliOp::parse(rest, dim, n)?);
        } else {
            gens.push(PauliOp::parse(line, dim, n)?);
        }
    }
    if logical_x.len() != logical_z.len() {
        return Err(Error::Parse("LX and LZ lines must come in pairs".into()));
    }
    let group = StabilizerGroup::new(dim, n, gens)?;
    if crate::zmod::is_prime(dim) && group.dimension() + k != n {
        return Err(Error::Parse(format!(
            "{} independent generators do not match n - k = {}",
            group.dimension(),
            n - k
        )));
    }
    Ok(group.with_meta(CodeMeta { k, dist, logical_x, logical_z }))
}

/// Canonical text form; `parse(&to_text(g))` reproduces `g`.
pub fn to_text(g: &StabilizerGroup) -> String {
    let (k, dist) = g.meta().map_or((0, 1), |m| (m.k, m.dist));
    let mut out = format!("dim={} n={} k={k} dist={dist}\n", g.dim(), g.n());
    for s in g.gens() {
        out.push_str(&s.to_text());
        out.push('\n');
    }
    if let Some(m) = g.meta() {
        for (x, z) in m.logical_x.iter().zip(&m.logical_z) {
            out.push_str(&format!("LX {}\nLZ {}\n", x.to_text(), z.to_text()));
        }
    }
    out
}
