//! Monte Carlo BER/BLER engine, calibration experiments, product-code
//! decoding and file formats.
//!
//! Trials are grouped in fixed-size batches. Batches run in parallel and are
//! folded back in batch order, and the stop rule is checked only at batch
//! boundaries, so results are identical for any thread count.

mod calibration;
mod io;
mod product;
mod pyndiah;

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

pub use calibration::{calibration_run, CalibrationBin, CalibrationReport, DEFAULT_BIN_EXPONENTS};
pub use io::{parse_llrs, read_llr_file, read_spec_file, write_csv, write_llr_file, write_spec_file};
pub use product::{product_decode, product_encode, product_trials, ProductCodeCfg, ProductOutcome, ProductStats};
pub use pyndiah::{pyndiah_baseline, pyndiah_counted};

use crate::analysis::DecoderKind;
use crate::channel::{channel_llr, transmit, trial_rng, ChannelCfg, ChannelError, ChannelKind};
use crate::code_model::{CodeError, PolarCodeSpec};
use crate::fscl::FastDecoder;
use crate::scl_core::{scl_decode, DecodeError};
use crate::soft_output::{so_fscl_decode_with, so_scl_decode, xi_pair, ArithMode, ListCandidate, SoftDecodeResult, XiVariant};

/// CSV header of simulation output.
pub const CSV_HEADER: &str = "ebn0_db,blocks,block_errors,bits,bit_errors,ber,bler,ci_ber,ci_bler,seconds";

/// Two-sided 95% normal quantile for the Wald intervals.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Stop when either limit is reached; checked after each batch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopRule {
    pub min_block_errors: u64,
    pub max_blocks: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { min_block_errors: 500, max_blocks: 10_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub decoder: DecoderKind,
    pub mode: ArithMode,
    pub list_size: usize,
    pub channel: ChannelKind,
    pub noiseless: bool,
    pub ebn0_grid: Vec<f64>,
    pub stop: StopRule,
    pub seed: u64,
    /// APP treatment of bits on which the list agrees.
    pub xi: XiVariant,
    pub batch_size: u64,
}

impl SimConfig {
    pub fn new(decoder: DecoderKind, mode: ArithMode, list_size: usize, ebn0_grid: Vec<f64>) -> Self {
        Self {
            decoder,
            mode,
            list_size,
            channel: ChannelKind::Awgn,
            noiseless: false,
            ebn0_grid,
            stop: StopRule::default(),
            seed: 1,
            xi: XiVariant::Modified,
            batch_size: 64,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.ebn0_grid.is_empty() {
            return Err(HarnessError::Config("empty Eb/N0 grid".into()));
        }
        if self.stop.min_block_errors == 0 || self.stop.max_blocks == 0 {
            return Err(HarnessError::Config("stop rule limits must be positive".into()));
        }
        if self.list_size == 0 {
            return Err(HarnessError::Config("list size must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(HarnessError::Config("batch size must be positive".into()));
        }
        Ok(())
    }

    pub fn channel_cfg(&self, ebn0_db: f64, rate: f64) -> ChannelCfg {
        ChannelCfg { kind: self.channel, ebn0_db, rate, noiseless: self.noiseless }
    }
}

/// Counts for one Eb/N0 point. BER counts codeword bits.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrialStats {
    pub ebn0_db: f64,
    pub blocks: u64,
    pub block_errors: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub seconds: f64,
}

impl TrialStats {
    pub fn ber(&self) -> f64 {
        ratio(self.bit_errors, self.bits)
    }

    pub fn bler(&self) -> f64 {
        ratio(self.block_errors, self.blocks)
    }

    /// 95% Wald half-width of the BER (bits treated as independent).
    pub fn ci_ber(&self) -> f64 {
        wald(self.ber(), self.bits)
    }

    pub fn ci_bler(&self) -> f64 {
        wald(self.bler(), self.blocks)
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6e},{:.6e},{:.3e},{:.3e},{:.3}",
            self.ebn0_db,
            self.blocks,
            self.block_errors,
            self.bits,
            self.bit_errors,
            self.ber(),
            self.bler(),
            self.ci_ber(),
            self.ci_bler(),
            self.seconds
        )
    }

    fn absorb(&mut self, o: &TrialStats) {
        self.blocks += o.blocks;
        self.block_errors += o.block_errors;
        self.bits += o.bits;
        self.bit_errors += o.bit_errors;
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn wald(p: f64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        Z95 * (p * (1.0 - p) / n as f64).sqrt()
    }
}

/// One encoded, transmitted block.
pub struct Trial {
    pub info: Vec<u8>,
    pub codeword: Vec<u8>,
    pub llrs: Vec<f64>,
}

/// Draw trial `index` of point `point` deterministically from `seed`.
pub fn make_trial(spec: &PolarCodeSpec, ch: &ChannelCfg, seed: u64, point: u64, index: u64) -> Result<Trial, HarnessError> {
    let mut rng = trial_rng(seed, (point << 40) | index);
    let info: Vec<u8> = (0..spec.k()).map(|_| rng.random::<bool>() as u8).collect();
    let codeword = spec.encode_info(&info)?;
    let obs = transmit(&codeword, ch, &mut rng)?;
    let llrs = channel_llr(&obs, ch);
    Ok(Trial { info, codeword, llrs })
}

/// Decoder prepared once per configuration.
pub struct BlockDecoder<'a> {
    spec: &'a PolarCodeSpec,
    kind: DecoderKind,
    mode: ArithMode,
    list_size: usize,
    xi: XiVariant,
    fast: Option<FastDecoder<'a>>,
}

/// Decision for one block.
#[derive(Clone, Debug)]
pub struct BlockDecision {
    /// Best list entry's codeword.
    pub codeword: Vec<u8>,
    /// Per-bit soft output, when the decoder provides one.
    pub app: Option<Vec<f64>>,
    /// Estimated probability that `codeword` is wrong.
    pub approx_bler: Option<f64>,
}

impl BlockDecision {
    /// Bit decisions: the sign of the soft output, else the best codeword.
    pub fn bits(&self) -> Vec<u8> {
        match &self.app {
            Some(a) => a.iter().map(|&x| (x < 0.0) as u8).collect(),
            None => self.codeword.clone(),
        }
    }
}

impl<'a> BlockDecoder<'a> {
    pub fn new(
        spec: &'a PolarCodeSpec,
        kind: DecoderKind,
        mode: ArithMode,
        list_size: usize,
        xi: XiVariant,
    ) -> Result<Self, HarnessError> {
        let fast = match kind {
            DecoderKind::SoFscl => Some(FastDecoder::new(spec, list_size, mode, true)?),
            DecoderKind::Fscl | DecoderKind::Pyndiah => Some(FastDecoder::new(spec, list_size, mode, false)?),
            DecoderKind::SoScl | DecoderKind::Scl => {
                if list_size == 0 {
                    return Err(DecodeError::ListSize.into());
                }
                None
            }
        };
        Ok(Self { spec, kind, mode, list_size, xi, fast })
    }

    /// Full soft-output result (soft-output decoders only).
    pub fn decode_soft(&self, llrs: &[f64]) -> Result<SoftDecodeResult, HarnessError> {
        match self.kind {
            DecoderKind::SoFscl => Ok(so_fscl_decode_with(self.fast.as_ref().expect("prepared"), llrs, self.xi)?),
            DecoderKind::SoScl => {
                let mut r = so_scl_decode(llrs, self.spec, self.list_size, self.mode)?;
                if self.xi != XiVariant::Modified {
                    r.app_llrs = xi_pair(&r.candidates, llrs, r.lambda_t).unmodified;
                }
                Ok(r)
            }
            k => Err(HarnessError::Config(format!("{} has no soft output with λ", k.name()))),
        }
    }

    pub fn decode(&self, llrs: &[f64]) -> Result<BlockDecision, HarnessError> {
        match self.kind {
            DecoderKind::SoFscl | DecoderKind::SoScl => {
                let r = self.decode_soft(llrs)?;
                let approx = crate::soft_output::approx_block_error(&r.candidates, r.lambda_t);
                Ok(BlockDecision { codeword: r.best().codeword.clone(), app: Some(r.app_llrs), approx_bler: Some(approx) })
            }
            DecoderKind::Fscl => {
                let run = self.fast.as_ref().expect("prepared").decode(llrs)?;
                Ok(BlockDecision { codeword: run.paths[0].codeword.clone(), app: None, approx_bler: None })
            }
            DecoderKind::Scl => {
                let run = scl_decode(llrs, self.spec, self.list_size, self.mode, false)?;
                Ok(BlockDecision { codeword: run.paths[0].codeword.clone(), app: None, approx_bler: None })
            }
            DecoderKind::Pyndiah => {
                let run = self.fast.as_ref().expect("prepared").decode(llrs)?;
                let list: Vec<(&[u8], f64)> = run.paths.iter().map(|p| (p.codeword.as_slice(), p.pm)).collect();
                let app = pyndiah_baseline(&list, llrs, None);
                Ok(BlockDecision { codeword: run.paths[0].codeword.clone(), app: Some(app), approx_bler: None })
            }
        }
    }

    /// List of the soft-output decoders, for consumers that need candidates.
    pub fn candidates(&self, llrs: &[f64]) -> Result<Vec<ListCandidate>, HarnessError> {
        Ok(self.decode_soft(llrs)?.candidates)
    }
}

/// Run batches in parallel, folding results in order until `done` says
/// to stop. Returns the folded accumulator.
pub(crate) fn run_batches<A, B, F, D>(batch_size: u64, max_blocks: u64, mut acc: A, run: F, fold: impl Fn(&mut A, B), done: D) -> Result<A, HarnessError>
where
    B: Send,
    F: Fn(u64, u64) -> Result<B, HarnessError> + Sync,
    D: Fn(&A) -> bool,
{
    let wave = (rayon::current_num_threads() as u64 * 2).max(1);
    let n_batches = max_blocks.div_ceil(batch_size);
    let mut next = 0u64;
    while next < n_batches {
        let upto = (next + wave).min(n_batches);
        let results: Vec<Result<B, HarnessError>> = (next..upto)
            .into_par_iter()
            .map(|b| {
                let lo = b * batch_size;
                let hi = ((b + 1) * batch_size).min(max_blocks);
                run(lo, hi)
            })
            .collect();
        for r in results {
            fold(&mut acc, r?);
            if done(&acc) {
                return Ok(acc);
            }
        }
        next = upto;
    }
    Ok(acc)
}

/// Monte Carlo BER/BLER at every grid point.
pub fn run_trials(spec: &PolarCodeSpec, cfg: &SimConfig) -> Result<Vec<TrialStats>, HarnessError> {
    cfg.validate()?;
    let dec = BlockDecoder::new(spec, cfg.decoder, cfg.mode, cfg.list_size, cfg.xi)?;
    let mut out = Vec::with_capacity(cfg.ebn0_grid.len());
    for (pi, &ebn0) in cfg.ebn0_grid.iter().enumerate() {
        let t0 = Instant::now();
        let ch = cfg.channel_cfg(ebn0, spec.rate());
        let stop = cfg.stop;
        let mut stats = run_batches(
            cfg.batch_size,
            stop.max_blocks,
            TrialStats { ebn0_db: ebn0, ..Default::default() },
            |lo, hi| {
                let mut s = TrialStats::default();
                for t in lo..hi {
                    let trial = make_trial(spec, &ch, cfg.seed, pi as u64, t)?;
                    let d = dec.decode(&trial.llrs)?;
                    let errs = d.bits().iter().zip(&trial.codeword).filter(|(a, b)| a != b).count() as u64;
                    s.blocks += 1;
                    s.bits += spec.n() as u64;
                    s.bit_errors += errs;
                    s.block_errors += (d.codeword != trial.codeword) as u64;
                }
                Ok(s)
            },
            |acc, s| acc.absorb(&s),
            |acc| acc.block_errors >= stop.min_block_errors,
        )?;
        stats.seconds = t0.elapsed().as_secs_f64();
        out.push(stats);
    }
    Ok(out)
}

/// Bit-error counts of both unanimous-bit treatments on the same decodes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct XiComparison {
    pub modified: TrialStats,
    pub unmodified: TrialStats,
    /// Bits wrong only under the modified / only under the unmodified rule.
    pub only_modified_wrong: u64,
    pub only_unmodified_wrong: u64,
}

impl XiComparison {
    /// McNemar statistic on the discordant bits; > 3.84 is significant at 5%.
    pub fn mcnemar(&self) -> f64 {
        let (b, c) = (self.only_modified_wrong as f64, self.only_unmodified_wrong as f64);
        if b + c == 0.0 {
            0.0
        } else {
            (b - c).powi(2) / (b + c)
        }
    }
}

/// Decode with a soft-output decoder and score both APP variants.
pub fn xi_comparison(spec: &PolarCodeSpec, cfg: &SimConfig, ebn0: f64) -> Result<XiComparison, HarnessError> {
    cfg.validate()?;
    let dec = BlockDecoder::new(spec, cfg.decoder, cfg.mode, cfg.list_size, XiVariant::Modified)?;
    let ch = cfg.channel_cfg(ebn0, spec.rate());
    let stop = cfg.stop;
    let t0 = Instant::now();
    let base = TrialStats { ebn0_db: ebn0, ..Default::default() };
    let mut r = run_batches(
        cfg.batch_size,
        stop.max_blocks,
        XiComparison { modified: base.clone(), unmodified: base, ..Default::default() },
        |lo, hi| {
            let mut x = XiComparison::default();
            for t in lo..hi {
                let trial = make_trial(spec, &ch, cfg.seed, 0, t)?;
                let res = dec.decode_soft(&trial.llrs)?;
                let pair = xi_pair(&res.candidates, &trial.llrs, res.lambda_t);
                let blk = (res.best().codeword != trial.codeword) as u64;
                for st in [&mut x.modified, &mut x.unmodified] {
                    st.blocks += 1;
                    st.bits += spec.n() as u64;
                    st.block_errors += blk;
                }
                for ((&m, &u), &c) in pair.modified.iter().zip(&pair.unmodified).zip(&trial.codeword) {
                    let em = ((m < 0.0) as u8 != c) as u64;
                    let eu = ((u < 0.0) as u8 != c) as u64;
                    x.modified.bit_errors += em;
                    x.unmodified.bit_errors += eu;
                    x.only_modified_wrong += em & (1 - eu);
                    x.only_unmodified_wrong += eu & (1 - em);
                }
            }
            Ok(x)
        },
        |acc, x| {
            acc.modified.absorb(&x.modified);
            acc.unmodified.absorb(&x.unmodified);
            acc.only_modified_wrong += x.only_modified_wrong;
            acc.only_unmodified_wrong += x.only_unmodified_wrong;
        },
        |acc| acc.modified.block_errors >= stop.min_block_errors,
    )?;
    let secs = t0.elapsed().as_secs_f64();
    r.modified.seconds = secs;
    r.unmodified.seconds = secs;
    Ok(r)
}

#[cfg(test)]
mod tests;
