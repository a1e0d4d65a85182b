//! Reliability calibration: empirical BLER against the decoder's own
//! estimate 1 − Γ*, binned on a logarithmic grid.

use std::fmt::Write as _;

use crate::code_model::PolarCodeSpec;
use crate::harness::{make_trial, run_batches, BlockDecoder, HarnessError, SimConfig};

/// Bin exponents j: blocks with 1 − Γ* ∈ [10^{−j−0.1}, 10^{−j+0.1}).
pub const DEFAULT_BIN_EXPONENTS: [f64; 7] = [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0];

const HALF_WIDTH: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationBin {
    pub exponent: f64,
    pub lo: f64,
    pub hi: f64,
    pub blocks: u64,
    pub errors: u64,
    /// Σ (1 − Γ*) over the bin's blocks.
    pub approx_sum: f64,
}

impl CalibrationBin {
    pub fn mean_approx(&self) -> f64 {
        self.approx_sum / self.blocks as f64
    }

    pub fn empirical(&self) -> f64 {
        self.errors as f64 / self.blocks as f64
    }

    /// |log10(empirical) − log10(approximated)|; `None` without errors.
    pub fn log_deviation(&self) -> Option<f64> {
        (self.errors > 0).then(|| (self.empirical().log10() - self.mean_approx().log10()).abs())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationReport {
    pub ebn0_db: f64,
    pub blocks: u64,
    /// Nonempty bins only.
    pub bins: Vec<CalibrationBin>,
}

impl CalibrationReport {
    pub fn bin(&self, exponent: f64) -> Option<&CalibrationBin> {
        self.bins.iter().find(|b| (b.exponent - exponent).abs() < 1e-9)
    }

    /// Mean log deviation over bins that observed errors.
    pub fn aggregate_deviation(&self) -> f64 {
        let devs: Vec<f64> = self.bins.iter().filter_map(CalibrationBin::log_deviation).collect();
        if devs.is_empty() {
            f64::INFINITY
        } else {
            devs.iter().sum::<f64>() / devs.len() as f64
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("ebn0_db = {}\nblocks = {}\n", self.ebn0_db, self.blocks);
        let _ = writeln!(s, "exponent,blocks,errors,mean_approx_bler,empirical_bler");
        for b in &self.bins {
            let _ = writeln!(s, "{},{},{},{:.4e},{:.4e}", b.exponent, b.blocks, b.errors, b.mean_approx(), b.empirical());
        }
        s
    }
}

/// Decode `cfg.stop.max_blocks` blocks at `ebn0` and bin them by 1 − Γ*.
/// A block error is a wrong best codeword (equivalently, wrong û).
pub fn calibration_run(spec: &PolarCodeSpec, cfg: &SimConfig, ebn0: f64, exponents: &[f64]) -> Result<CalibrationReport, HarnessError> {
    cfg.validate()?;
    let dec = BlockDecoder::new(spec, cfg.decoder, cfg.mode, cfg.list_size, cfg.xi)?;
    let ch = cfg.channel_cfg(ebn0, spec.rate());
    let empty: Vec<CalibrationBin> = exponents
        .iter()
        .map(|&j| CalibrationBin {
            exponent: j,
            lo: 10f64.powf(-j - HALF_WIDTH),
            hi: 10f64.powf(-j + HALF_WIDTH),
            blocks: 0,
            errors: 0,
            approx_sum: 0.0,
        })
        .collect();
    let (bins, blocks) = run_batches(
        cfg.batch_size,
        cfg.stop.max_blocks,
        (empty.clone(), 0u64),
        |lo, hi| {
            let mut bins = empty.clone();
            for t in lo..hi {
                let trial = make_trial(spec, &ch, cfg.seed, 0, t)?;
                let d = dec.decode(&trial.llrs)?;
                let p = d
                    .approx_bler
                    .ok_or_else(|| HarnessError::Config(format!("{} does not estimate reliability", cfg.decoder.name())))?;
                if let Some(b) = bins.iter_mut().find(|b| p >= b.lo && p < b.hi) {
                    b.blocks += 1;
                    b.errors += (d.codeword != trial.codeword) as u64;
                    b.approx_sum += p;
                }
            }
            Ok((bins, hi - lo))
        },
        |acc, (bins, n)| {
            for (a, b) in acc.0.iter_mut().zip(bins) {
                a.blocks += b.blocks;
                a.errors += b.errors;
                a.approx_sum += b.approx_sum;
            }
            acc.1 += n;
        },
        |_| false,
    )?;
    Ok(CalibrationReport { ebn0_db: ebn0, blocks, bins: bins.into_iter().filter(|b| b.blocks > 0).collect() })
}
