//! JSON, aligned-text and CSV renderings of run reports.

use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::audit::{CanonAudit, EecAudit};
use crate::harness::config::{OutputFormat, RunReport};
use crate::harness::ftec::FtecReport;
use crate::harness::montecarlo::{MonteCarloStats, Rate};

/// Left-aligned first column, right-aligned numbers, two spaces between columns.
fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| if c == 0 { format!("{s:<w$}", w = widths[c]) } else { format!("{s:>w$}", w = widths[c]) })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn kv(pairs: &[(&str, String)]) -> String {
    aligned(&pairs.iter().map(|(k, v)| vec![k.to_string(), v.clone()]).collect::<Vec<_>>())
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory writer");
    for r in rows {
        w.write_record(r).expect("in-memory writer");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 input")
}

fn rate(r: &Rate) -> String {
    format!("{:.6} [{:.6}, {:.6}] ({}/{})", r.estimate, r.low, r.high, r.count, r.total)
}

fn ftec_text(r: &FtecReport) -> String {
    let mut out = kv(&[
        ("t", r.t.to_string()),
        ("cases", r.cases.to_string()),
        ("eccp checked", r.eccp_checked.to_string()),
        ("ecrp checked", r.ecrp_checked.to_string()),
        ("out of contract", r.out_of_contract.to_string()),
        ("eccp violations", r.eccp_violations.to_string()),
        ("ecrp violations", r.ecrp_violations.to_string()),
        ("rejected in budget", r.rejected_within_budget.to_string()),
        ("max rounds", r.max_rounds.to_string()),
        ("max extra meas.", r.max_erasure_measurements.to_string()),
    ]);
    if !r.violations.is_empty() {
        let mut rows = vec![vec!["check".into(), "input".into(), "erased".into(), "faults".into(), "verdict".into()]];
        for v in &r.violations {
            rows.push(vec![
                format!("{:?}", v.check),
                v.case.input_pauli.clone(),
                format!("{:?}", v.case.input_erased),
                serde_json::to_string(&v.case.schedule.events).expect("plain data"),
                format!("{:?}", v.verdict),
            ]);
        }
        out.push('\n');
        out.push_str(&aligned(&rows));
    }
    out
}

fn montecarlo_text(s: &MonteCarloStats) -> String {
    let mut out = kv(&[
        ("trials", s.trials.to_string()),
        ("logical error rate", rate(&s.logical_error_rate)),
        ("rejection rate", rate(&s.rejection_rate)),
        ("mean rounds", format!("{:.4}", s.mean_rounds)),
        ("max rounds", s.max_rounds.to_string()),
        ("mean measurements", format!("{:.4}", s.mean_measurements)),
        ("max measurements", s.max_measurements.to_string()),
        ("max erasures", s.max_erasures.to_string()),
        ("max extra meas.", s.max_erasure_measurements.to_string()),
        ("extra meas. violations", s.extra_measurement_violations.to_string()),
        ("round bound violations", s.round_bound_violations.to_string()),
    ]);
    let mut rows = vec![vec!["rounds".to_string(), "trials".to_string()]];
    rows.extend(s.rounds_histogram.iter().map(|(k, v)| vec![k.to_string(), v.to_string()]));
    out.push('\n');
    out.push_str(&aligned(&rows));
    out
}

fn montecarlo_csv(s: &MonteCarloStats) -> String {
    let header = [
        "trials",
        "logical_errors",
        "accepted",
        "logical_error_rate",
        "ci_low",
        "ci_high",
        "rejections",
        "rejection_rate",
        "mean_rounds",
        "max_rounds",
        "mean_measurements",
        "max_measurements",
        "extra_measurement_violations",
        "round_bound_violations",
    ];
    let l = &s.logical_error_rate;
    let row = vec![
        s.trials.to_string(),
        l.count.to_string(),
        l.total.to_string(),
        l.estimate.to_string(),
        l.low.to_string(),
        l.high.to_string(),
        s.rejection_rate.count.to_string(),
        s.rejection_rate.estimate.to_string(),
        s.mean_rounds.to_string(),
        s.max_rounds.to_string(),
        s.mean_measurements.to_string(),
        s.max_measurements.to_string(),
        s.extra_measurement_violations.to_string(),
        s.round_bound_violations.to_string(),
    ];
    csv(&header, &[row])
}

fn eec_rows(a: &EecAudit) -> Vec<Vec<String>> {
    a.rows
        .iter()
        .map(|r| {
            vec![
                format!("{{{}}}", r.erased.iter().map(usize::to_string).collect::<Vec<_>>().join(",")),
                r.formula.to_string(),
                r.nondegenerate.map_or("-".into(), |c| c.to_string()),
                r.sequence.to_string(),
                r.oracle.to_string(),
                if r.agrees() { "ok" } else { "MISMATCH" }.to_string(),
            ]
        })
        .collect()
}

const EEC_HEADER: [&str; 6] = ["erased", "formula", "nondegenerate", "sequence", "oracle", "status"];

fn eec_text(a: &EecAudit) -> String {
    let mut rows = vec![EEC_HEADER.iter().map(|s| s.to_string()).collect()];
    rows.extend(eec_rows(a));
    let mut out = aligned(&rows);
    out.push_str(&format!("\n{} sets, {} mismatches, {} uncorrectable skipped\n", a.rows.len(), a.mismatches(), a.uncorrectable));
    out
}

fn canon_text(a: &CanonAudit) -> String {
    let mut out = kv(&[
        ("dim", a.dim.to_string()),
        ("n", a.n.to_string()),
        ("groups", a.groups.to_string()),
        ("bipartitions", a.bipartitions.to_string()),
        ("refused", a.refused.to_string()),
        ("failures", a.failures.len().to_string()),
    ]);
    for f in &a.failures {
        out.push_str(&format!("{} A={:?}: {}\n", f.group.join(" "), f.a, f.message));
    }
    out
}

fn canon_csv(a: &CanonAudit) -> String {
    let rows: Vec<Vec<String>> =
        a.failures.iter().map(|f| vec![f.group.join(" "), format!("{:?}", f.a), f.message.clone()]).collect();
    csv(&["group", "a", "message"], &rows)
}

impl RunReport {
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        Ok(match (format, self) {
            (OutputFormat::Json, _) => {
                let mut s = serde_json::to_string_pretty(self).expect("plain data");
                s.push('\n');
                s
            }
            (OutputFormat::Text, Self::VerifyExhaustive(r)) => ftec_text(r),
            (OutputFormat::Text, Self::Montecarlo(s)) => montecarlo_text(s),
            (OutputFormat::Text, Self::EecAudit(a)) => eec_text(a),
            (OutputFormat::Text, Self::CanonAudit(a)) => canon_text(a),
            (OutputFormat::Csv, Self::Montecarlo(s)) => montecarlo_csv(s),
            (OutputFormat::Csv, Self::EecAudit(a)) => csv(&EEC_HEADER, &eec_rows(a)),
            (OutputFormat::Csv, Self::CanonAudit(a)) => canon_csv(a),
            (OutputFormat::Csv, Self::VerifyExhaustive(_)) => {
                return Err(Error::Config("verify reports have no CSV form; use json or text".into()))
            }
        })
    }
}

pub fn write_output(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}
