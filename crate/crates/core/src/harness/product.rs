//! Two-dimensional product code with polar components, decoded iteratively
//! with a soft-output component decoder.
//!
//! Code arrays are N_c × N_c and stored row-major. Encoding places the
//! K_c × K_c information block, encodes its rows, then encodes every column.

use std::time::Instant;

use crate::channel::{channel_llr, clamp_llr, transmit, trial_rng, ChannelCfg};
use crate::code_model::PolarCodeSpec;
use crate::fscl::FastDecoder;
use crate::harness::{run_batches, HarnessError, TrialStats};
use crate::soft_output::{so_fscl_decode_with, ArithMode, XiVariant};

use rand::Rng;

#[derive(Clone, Debug)]
pub struct ProductCodeCfg {
    pub component: PolarCodeSpec,
    pub max_iters: usize,
    /// Extrinsic scaling w.
    pub scale: f64,
    pub mode: ArithMode,
    pub list_size: usize,
}

impl ProductCodeCfg {
    /// Scaling w = 0.4, 20 iterations, exact arithmetic, L = 4.
    pub fn new(component: PolarCodeSpec) -> Self {
        Self { component, max_iters: 20, scale: 0.4, mode: ArithMode::Exact, list_size: 4 }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(self.scale > 0.0 && self.scale <= 1.0) {
            return Err(HarnessError::Config(format!("scaling factor {} outside (0, 1]", self.scale)));
        }
        if self.max_iters == 0 {
            return Err(HarnessError::Config("at least one iteration is required".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.component.n() * self.component.n()
    }

    pub fn k(&self) -> usize {
        self.component.k() * self.component.k()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }
}

/// Encode a K_c × K_c information block (row-major).
pub fn product_encode(info: &[u8], cfg: &ProductCodeCfg) -> Result<Vec<u8>, HarnessError> {
    let (n, k) = (cfg.component.n(), cfg.component.k());
    if info.len() != k * k {
        return Err(HarnessError::Config(format!("expected {} information bits, got {}", k * k, info.len())));
    }
    let mut arr = vec![0u8; n * n];
    for r in 0..k {
        let row = cfg.component.encode_info(&info[r * k..(r + 1) * k])?;
        arr[r * n..(r + 1) * n].copy_from_slice(&row);
    }
    for c in 0..n {
        let col_info: Vec<u8> = (0..k).map(|r| arr[r * n + c]).collect();
        let col = cfg.component.encode_info(&col_info)?;
        for (r, &b) in col.iter().enumerate() {
            arr[r * n + c] = b;
        }
    }
    Ok(arr)
}

/// Inverse of [`product_encode`] on a valid code array.
fn product_info(arr: &[u8], spec: &PolarCodeSpec) -> Vec<u8> {
    let (n, k) = (spec.n(), spec.k());
    let mut rows = vec![0u8; k * n];
    for c in 0..n {
        let mut col: Vec<u8> = (0..n).map(|r| arr[r * n + c]).collect();
        crate::code_model::encode_in_place(&mut col);
        for (r, b) in spec.extract_info(&col).into_iter().enumerate() {
            rows[r * n + c] = b;
        }
    }
    let mut info = Vec::with_capacity(k * k);
    for r in 0..k {
        let mut row = rows[r * n..(r + 1) * n].to_vec();
        crate::code_model::encode_in_place(&mut row);
        info.extend(spec.extract_info(&row));
    }
    info
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductOutcome {
    pub info: Vec<u8>,
    /// Hard decisions on the code array.
    pub codeword: Vec<u8>,
    pub iterations: usize,
    /// Every row and column of `codeword` is a component codeword.
    pub converged: bool,
}

/// Iterative row/column decoding. Each component decode gets the channel
/// LLRs plus the scaled extrinsic output of the other dimension; the
/// extrinsic output is the APP LLR minus that input.
pub fn product_decode(ch: &[f64], cfg: &ProductCodeCfg) -> Result<ProductOutcome, HarnessError> {
    cfg.validate()?;
    let spec = &cfg.component;
    let n = spec.n();
    if ch.len() != n * n {
        return Err(crate::scl_core::DecodeError::Dimension(format!("expected {}×{} LLRs, got {}", n, n, ch.len())).into());
    }
    let dec = FastDecoder::new(spec, cfg.list_size, cfg.mode, true)?;
    let mut ext_r = vec![0.0; n * n];
    let mut ext_c = vec![0.0; n * n];
    let mut hard = vec![0u8; n * n];
    let mut input = vec![0.0; n];
    for it in 1..=cfg.max_iters {
        for r in 0..n {
            for c in 0..n {
                input[c] = clamp_llr(ch[r * n + c] + cfg.scale * ext_c[r * n + c]);
            }
            let res = so_fscl_decode_with(&dec, &input, XiVariant::Modified)?;
            for c in 0..n {
                ext_r[r * n + c] = res.app_llrs[c] - input[c];
            }
        }
        for c in 0..n {
            for r in 0..n {
                input[r] = clamp_llr(ch[r * n + c] + cfg.scale * ext_r[r * n + c]);
            }
            let res = so_fscl_decode_with(&dec, &input, XiVariant::Modified)?;
            for r in 0..n {
                ext_c[r * n + c] = res.app_llrs[r] - input[r];
                hard[r * n + c] = (res.app_llrs[r] < 0.0) as u8;
            }
        }
        if is_product_codeword(&hard, spec) {
            return Ok(ProductOutcome { info: product_info(&hard, spec), codeword: hard, iterations: it, converged: true });
        }
    }
    Ok(ProductOutcome { info: product_info(&hard, spec), codeword: hard, iterations: cfg.max_iters, converged: false })
}

fn is_product_codeword(arr: &[u8], spec: &PolarCodeSpec) -> bool {
    let n = spec.n();
    let rows_ok = (0..n).all(|r| spec.is_codeword(&arr[r * n..(r + 1) * n]));
    rows_ok && (0..n).all(|c| spec.is_codeword(&(0..n).map(|r| arr[r * n + c]).collect::<Vec<_>>()))
}

/// Block error counts for several iteration limits on the same channel
/// realisations.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductStats {
    pub iteration_limits: Vec<usize>,
    /// One entry per iteration limit.
    pub stats: Vec<TrialStats>,
    /// Mean iterations used under the largest limit.
    pub mean_iterations: f64,
}

/// Monte Carlo over the product code. Stops once the decoder with the
/// largest iteration limit has `min_block_errors` errors, or after
/// `max_blocks`.
pub fn product_trials(
    cfg: &ProductCodeCfg,
    iteration_limits: &[usize],
    ebn0: f64,
    seed: u64,
    min_block_errors: u64,
    max_blocks: u64,
) -> Result<ProductStats, HarnessError> {
    cfg.validate()?;
    if iteration_limits.is_empty() || iteration_limits.contains(&0) {
        return Err(HarnessError::Config("iteration limits must be positive".into()));
    }
    let t0 = Instant::now();
    let ch = ChannelCfg::awgn(ebn0, cfg.rate());
    let main = iteration_limits.iter().copied().enumerate().max_by_key(|&(_, v)| v).map(|(i, _)| i).unwrap_or(0);
    let empty = vec![TrialStats { ebn0_db: ebn0, ..Default::default() }; iteration_limits.len()];
    let (mut stats, iters) = run_batches(
        32,
        max_blocks,
        (empty.clone(), 0u64),
        |lo, hi| {
            let mut st = empty.clone();
            let mut iters = 0u64;
            for t in lo..hi {
                let mut rng = trial_rng(seed, t);
                let info: Vec<u8> = (0..cfg.k()).map(|_| rng.random::<bool>() as u8).collect();
                let cw = product_encode(&info, cfg)?;
                let obs = transmit(&cw, &ch, &mut rng)?;
                let llrs = channel_llr(&obs, &ch);
                for (s, &lim) in st.iter_mut().zip(iteration_limits) {
                    let sub = ProductCodeCfg { max_iters: lim, ..cfg.clone() };
                    let out = product_decode(&llrs, &sub)?;
                    s.blocks += 1;
                    s.bits += info.len() as u64;
                    s.bit_errors += out.info.iter().zip(&info).filter(|(a, b)| a != b).count() as u64;
                    s.block_errors += (out.codeword != cw) as u64;
                    if lim == iteration_limits[main] {
                        iters += out.iterations as u64;
                    }
                }
            }
            Ok((st, iters))
        },
        |acc, (st, it)| {
            for (a, b) in acc.0.iter_mut().zip(&st) {
                a.absorb(b);
            }
            acc.1 += it;
        },
        |acc| acc.0[main].block_errors >= min_block_errors,
    )?;
    let secs = t0.elapsed().as_secs_f64();
    for s in &mut stats {
        s.seconds = secs;
    }
    let blocks = stats[main].blocks.max(1);
    Ok(ProductStats { iteration_limits: iteration_limits.to_vec(), stats, mean_iterations: iters as f64 / blocks as f64 })
}
