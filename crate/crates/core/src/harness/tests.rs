use super::*;
use crate::code_model::{build_nr5g, DynFrozenCfg};

fn small_cfg(decoder: DecoderKind, grid: Vec<f64>) -> SimConfig {
    let mut cfg = SimConfig::new(decoder, ArithMode::Exact, 4, grid);
    cfg.stop = StopRule { min_block_errors: 20, max_blocks: 400 };
    cfg.batch_size = 16;
    cfg
}

#[test]
fn noiseless_channel_gives_no_errors() {
    let spec = build_nr5g(64, 32, DynFrozenCfg::default()).unwrap();
    for d in [DecoderKind::Scl, DecoderKind::Fscl, DecoderKind::SoScl, DecoderKind::SoFscl] {
        let mut cfg = small_cfg(d, vec![0.0]);
        cfg.noiseless = true;
        cfg.stop.max_blocks = 64;
        let s = &run_trials(&spec, &cfg).unwrap()[0];
        assert_eq!(s.blocks, 64);
        assert_eq!(s.bits, 64 * 64);
        assert_eq!((s.bit_errors, s.block_errors), (0, 0), "{d:?}");
    }
}

#[test]
fn runs_are_reproducible_from_the_seed() {
    let spec = build_nr5g(64, 32, DynFrozenCfg::default()).unwrap();
    let cfg = small_cfg(DecoderKind::SoFscl, vec![1.0, 2.0]);
    let strip = |v: Vec<TrialStats>| v.into_iter().map(|s| (s.blocks, s.block_errors, s.bit_errors)).collect::<Vec<_>>();
    let a = strip(run_trials(&spec, &cfg).unwrap());
    let b = strip(run_trials(&spec, &cfg).unwrap());
    assert_eq!(a, b);
    let mut other = cfg.clone();
    other.seed = 99;
    assert_ne!(a, strip(run_trials(&spec, &other).unwrap()));
}

#[test]
fn stop_rule_is_respected() {
    let spec = build_nr5g(64, 32, DynFrozenCfg::default()).unwrap();
    let cfg = small_cfg(DecoderKind::Fscl, vec![-2.0]);
    let s = &run_trials(&spec, &cfg).unwrap()[0];
    // Very low SNR: the error target is hit well before the block limit,
    // and stopping happens on a batch boundary.
    assert!(s.block_errors >= 20);
    assert!(s.blocks < 400);
    assert_eq!(s.blocks % 16, 0);
}

#[test]
fn hard_and_soft_decoders_agree_on_decisions() {
    // The soft output changes nothing about the list; block error counts of
    // FSCL and SO-FSCL are identical on the same trials.
    let spec = build_nr5g(128, 64, DynFrozenCfg::default()).unwrap();
    let mut a = small_cfg(DecoderKind::Fscl, vec![1.5]);
    a.stop.min_block_errors = u64::MAX;
    let mut b = a.clone();
    b.decoder = DecoderKind::SoFscl;
    let (x, y) = (&run_trials(&spec, &a).unwrap()[0], &run_trials(&spec, &b).unwrap()[0]);
    assert_eq!(x.block_errors, y.block_errors);
}

#[test]
fn csv_row_matches_header() {
    let s = TrialStats { ebn0_db: 2.5, blocks: 100, block_errors: 7, bits: 6400, bit_errors: 40, seconds: 1.25 };
    let row = s.csv_row();
    assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
    assert!(row.starts_with("2.5,100,7,6400,40,"));
    let f: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
    assert!((f[5] - 40.0 / 6400.0).abs() < 1e-9);
    assert!((f[6] - 0.07).abs() < 1e-9);
    // Wald half-width.
    assert!((f[8] - 1.959964 * (0.07f64 * 0.93 / 100.0).sqrt()).abs() < 1e-3);
}

#[test]
fn config_validation() {
    let mut c = small_cfg(DecoderKind::Scl, vec![]);
    assert!(c.validate().is_err());
    c.ebn0_grid = vec![1.0];
    assert!(c.validate().is_ok());
    c.list_size = 0;
    assert!(c.validate().is_err());
}

#[test]
fn xi_comparison_counts_are_consistent() {
    let spec = build_nr5g(64, 32, DynFrozenCfg::default()).unwrap();
    let mut cfg = small_cfg(DecoderKind::SoFscl, vec![1.0]);
    cfg.stop = StopRule { min_block_errors: u64::MAX, max_blocks: 200 };
    let x = xi_comparison(&spec, &cfg, 1.0).unwrap();
    assert_eq!(x.modified.blocks, 200);
    assert_eq!(x.modified.block_errors, x.unmodified.block_errors);
    let diff = x.modified.bit_errors as i64 - x.unmodified.bit_errors as i64;
    assert_eq!(diff, x.only_modified_wrong as i64 - x.only_unmodified_wrong as i64);
}

#[test]
fn calibration_covers_every_block() {
    let spec = build_nr5g(64, 32, DynFrozenCfg::default()).unwrap();
    let mut cfg = small_cfg(DecoderKind::SoFscl, vec![2.0]);
    cfg.list_size = 2;
    cfg.stop = StopRule { min_block_errors: u64::MAX, max_blocks: 300 };
    let rep = calibration_run(&spec, &cfg, 2.0, &DEFAULT_BIN_EXPONENTS).unwrap();
    assert_eq!(rep.blocks, 300);
    // Bins are disjoint, so they hold at most every block.
    let binned: u64 = rep.bins.iter().map(|b| b.blocks).sum();
    assert!(binned <= 300);
    for b in &rep.bins {
        assert!(b.blocks > 0);
        assert!(b.errors <= b.blocks);
        let m = b.mean_approx();
        assert!(m >= b.lo && m <= b.hi, "{m} outside [{}, {}]", b.lo, b.hi);
    }
}
