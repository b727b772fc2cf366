use lossftec::codes;
use lossftec::harness::config::{CanonTarget, Limits};
use lossftec::harness::montecarlo::{run_trial, trial_seed};
use lossftec::harness::*;
use lossftec::faultsim::SimState;
use lossftec::protocol::{max_rounds, ProtocolOptions, Verdict};
use lossftec::Error;

#[test]
fn noiseless_montecarlo_is_exact() {
    let code = codes::builtin("five_qubit").unwrap();
    let s = run_montecarlo(&code, &MonteCarloConfig::uniform(50, 3, 0.0, 0.0)).unwrap();
    assert_eq!(s.logical_error_rate.count, 0);
    assert_eq!(s.rejection_rate.count, 0);
    assert_eq!((s.max_rounds, s.mean_rounds), (1, 1.0));
    assert_eq!(s.max_measurements, 4);
    assert_eq!(s.max_erasure_measurements, 0);
}

/// Rejections need `dist` affected qudits, except that the literal rules abandon a round at
/// `dist − 1` erasures and reject when no earlier round was fully valid.
#[test]
fn loss_only_rejections_need_dist_erasures() {
    let code = codes::builtin("five_qubit").unwrap();
    let purified = SimState::purified_generators(&code).unwrap();
    for (protocol, floor) in [(ProtocolOptions::amended(), 3), (ProtocolOptions::default(), 2)] {
        let cfg = MonteCarloConfig { protocol, ..MonteCarloConfig::uniform(400, 11, 0.0, 0.02) };
        let mut rejected = 0;
        for i in 0..cfg.trials {
            let t = run_trial(&code, &cfg, &purified, i).unwrap();
            assert_eq!(t.pauli_faults, 0);
            if t.verdict == Verdict::Reject {
                rejected += 1;
                assert!(t.affected >= floor, "trial {i}: rejected with {} affected", t.affected);
            } else {
                assert!(t.erasures < 3);
                assert!(!protocol.round_cap || t.rounds <= max_rounds(1, t.erasures));
            }
        }
        assert!(rejected > 0);
    }
}

#[test]
fn wilson_interval() {
    let r = Rate::wilson(0, 100);
    assert_eq!((r.estimate, r.low), (0.0, 0.0));
    assert!((r.high - 0.036995).abs() < 1e-5, "{}", r.high);
    let r = Rate::wilson(50, 100);
    assert!((r.low - 0.40383).abs() < 1e-4 && (r.high - 0.59617).abs() < 1e-4);
    assert_eq!(Rate::wilson(0, 0).high, 1.0);
}

#[test]
fn trial_seeds_are_distinct() {
    let seeds: std::collections::BTreeSet<u64> = (0..10_000).map(|i| trial_seed(42, i)).collect();
    assert_eq!(seeds.len(), 10_000);
    assert_ne!(trial_seed(1, 0), trial_seed(2, 0));
}

#[test]
fn config_validation() {
    let code = Some("builtin:five_qubit".into());
    let mut cfg = ExperimentConfig::new(Mode::Montecarlo, code.clone(), 1);
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    cfg.trials = 1;
    assert!(cfg.validate().is_ok());
    cfg.noise.p_loss.gate = 1.5;
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    assert!(ExperimentConfig::new(Mode::CanonAudit, None, 1).validate().is_err());
    assert!(ExperimentConfig::new(Mode::EecAudit, None, 1).validate().is_err());
    let json = serde_json::to_string(&cfg).unwrap();
    assert_eq!(ExperimentConfig::from_json(&json).unwrap(), cfg);
    let missing = ExperimentConfig::new(Mode::EecAudit, Some("/nonexistent/x.code".into()), 1);
    match run(&missing) {
        Err(Error::Io { path, .. }) => assert!(path.contains("nonexistent")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn verify_rejects_large_codes() {
    let mut gens = vec![];
    for i in 0..12 {
        let mut s = vec!['I'; 13];
        s[i] = 'Z';
        s[i + 1] = 'Z';
        gens.push(s.into_iter().collect::<String>());
    }
    let text = format!("dim=2 n=13 k=1 dist=1\n{}\n", gens.join("\n"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rep.code");
    std::fs::write(&path, text).unwrap();
    let cfg = ExperimentConfig::new(Mode::VerifyExhaustive, Some(path), 1);
    assert!(matches!(run(&cfg), Err(Error::Config(_))));
}

#[test]
fn eec_audit_small() {
    let code = codes::builtin("five_qubit").unwrap();
    let a = eec_audit(&code, 1).unwrap();
    assert_eq!(a.rows.len(), 6);
    assert_eq!(a.mismatches(), 0);
    assert_eq!(a.rows[1].oracle, 2);
    assert_eq!(a.rows[0].oracle, 0);
    let text = RunReport::EecAudit(a.clone()).render(OutputFormat::Text).unwrap();
    assert!(text.starts_with("erased"));
    let csv = RunReport::EecAudit(a).render(OutputFormat::Csv).unwrap();
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn canon_audit_runs_and_renders() {
    let a = canon_audit(2, 3, 5, 9).unwrap();
    assert_eq!(a.bipartitions, 40);
    assert!(a.failures.is_empty(), "{:?}", a.failures);
    let mut cfg = ExperimentConfig::new(Mode::CanonAudit, None, 9);
    cfg.canon = Some(CanonTarget { dim: 2, n: 3, groups: 5 });
    cfg.limits = Limits::default();
    let report = run(&cfg).unwrap();
    assert!(report.passed());
    assert_eq!(report, RunReport::CanonAudit(a));
    assert!(canon_audit(1, 3, 1, 0).is_err());
}

#[test]
fn montecarlo_outputs_are_byte_identical() {
    let mut cfg = ExperimentConfig::new(Mode::Montecarlo, Some("builtin:five_qubit".into()), 77);
    cfg.trials = 300;
    cfg.noise.p_pauli = lossftec::faultsim::ClassRates::uniform(0.01);
    cfg.noise.p_loss = lossftec::faultsim::ClassRates::uniform(0.01);
    let render = |f| run(&cfg).unwrap().render(f).unwrap();
    for f in [OutputFormat::Json, OutputFormat::Text, OutputFormat::Csv] {
        assert_eq!(render(f), render(f));
    }
    let other = ExperimentConfig { seed: 78, ..cfg.clone() };
    assert_ne!(run(&other).unwrap().render(OutputFormat::Json).unwrap(), render(OutputFormat::Json));
}
