//! Soft-output add-on: frozen-prefix metrics, the unvisited-path mass λ_T,
//! a-posteriori bit LLRs and the list-correctness estimate Γ*.
//!
//! λ_T is kept in the log domain as ln P*_T, an estimate of the total
//! probability of all paths that the list pruned away. Its contributions are
//! discounted by ln 2 per frozen leaf not yet checked, since a random path
//! satisfies each remaining frozen constraint with probability one half.

pub mod logdomain;

use std::f64::consts::LN_2;

pub use logdomain::{box_minus, box_plus, box_plus_all, box_plus_mode, softplus, ArithMode, LogDomainError, NEG_INF};

use crate::analysis::OpCounts;
use crate::channel::LLR_MAX;
use crate::code_model::{NodeKind, PolarCodeSpec};
use crate::fscl::{FastDecoder, NodeDecodeOutcome};
use crate::scl_core::{scl_decode, DecodeError, Kernel};

/// Relative gap below which a log-domain difference is treated as empty.
/// A few ULPs: anything larger is genuine pruned mass (a short Rate-1 node
/// can prune children whose parents differ from the survivors by ~1e-12).
const SNAP_TOL: f64 = 64.0 * f64::EPSILON;
/// Largest tolerated ordering violation before flagging a numeric fault.
const VIOLATION_TOL: f64 = 1e-6;

/// Path metric at the node's last frozen leaf, from the sign-corrected node
/// LLRs `alpha` and the parent metric `pm`.
///
/// The frozen prefix of a high-rate node is a short repetition (SPC, TypeIV)
/// or an all-frozen pair (TypeIII) after f-only descent, so the metric has a
/// closed form over the descended LLRs.
pub fn frz_dec(kind: NodeKind, alpha: &[f64], pm: f64, k: &mut Kernel) -> f64 {
    let target = match kind {
        NodeKind::Spc | NodeKind::TypeIII => 2,
        NodeKind::TypeIV => 4,
        _ => return pm,
    };
    let mut a = alpha.to_vec();
    while a.len() > target {
        let h = a.len() / 2;
        a = (0..h).map(|j| k.f(a[j], a[j + h])).collect();
    }
    let mut inc = 0.0;
    for &x in &a {
        let t = k.pm_inc(x, 0);
        inc = k.add(inc, t);
    }
    if kind != NodeKind::TypeIII {
        // Remove the information leaf of the repetition: sp(−Σa').
        let mut sum = 0.0;
        for &x in &a {
            sum = k.add(sum, x);
        }
        let last = k.pm_inc(sum, 0);
        inc = k.add(inc, -last);
    }
    k.add(pm, inc)
}

/// λ update after an exhaustively decoded (or Rate-0) node: every loser is
/// an exact path probability.
pub fn lambda_update_lowrate(lambda: f64, discount: f64, outcome: &NodeDecodeOutcome, k: &mut Kernel) -> f64 {
    let mut acc = discount_lambda(lambda, discount, k);
    for c in &outcome.discarded {
        acc = k.bplus(acc, -c.pm);
    }
    acc
}

/// λ update after a flip-decoded node.
///
/// Exact arithmetic: the pruned mass is the parents' frozen-prefix mass minus
/// the survivors' mass. Hardware-friendly arithmetic avoids the subtraction:
/// parents without surviving children contribute their full frozen-prefix
/// mass, and the losers of the last selection stand in for the remaining
/// pruned children with weight L − 1.
pub fn lambda_update_highrate(
    lambda: f64,
    discount: f64,
    pm_fs: &[f64],
    outcome: &NodeDecodeOutcome,
    list_size: usize,
    k: &mut Kernel,
) -> Result<f64, DecodeError> {
    let base = discount_lambda(lambda, discount, k);
    match k.mode {
        ArithMode::Exact => {
            if outcome.survivors.len() as f64 >= outcome.total_valid {
                return Ok(base);
            }
            let parents = k.bplus_all(pm_fs.iter().map(|&p| -p));
            let surv = k.bplus_all(outcome.survivors.iter().map(|c| -c.pm));
            let bracket = if parents >= surv {
                if parents - surv <= SNAP_TOL * (1.0 + parents.abs()) {
                    NEG_INF
                } else {
                    k.bminus(parents, surv)?
                }
            } else if surv - parents <= VIOLATION_TOL * (1.0 + parents.abs()) {
                NEG_INF
            } else {
                return Err(LogDomainError::NegativeDifference { a: parents, b: surv }.into());
            };
            Ok(k.bplus(base, bracket))
        }
        ArithMode::Hwf => {
            let mut inherited = vec![false; pm_fs.len()];
            for c in &outcome.survivors {
                inherited[c.parent] = true;
            }
            let mut acc = base;
            for (p, &fs) in pm_fs.iter().enumerate() {
                if !inherited[p] {
                    acc = k.bplus(acc, -fs);
                }
            }
            if list_size > 1 {
                let w = ((list_size - 1) as f64).ln();
                for c in &outcome.discarded {
                    let t = k.add(w, -c.pm);
                    acc = k.bplus(acc, t);
                }
            }
            Ok(acc)
        }
    }
}

fn discount_lambda(lambda: f64, discount: f64, k: &mut Kernel) -> f64 {
    if lambda == NEG_INF || discount == 0.0 {
        lambda
    } else {
        k.add(lambda, -discount)
    }
}

/// Treatment of bits on which the whole list agrees.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum XiVariant {
    /// Unanimous bits take the less likely channel hypothesis for the
    /// unvisited mass on the disagreeing side.
    #[default]
    Modified,
    /// Always weight the unvisited mass by the channel probabilities.
    Unmodified,
}

/// One list entry as seen by the soft-output stage.
#[derive(Clone, Debug, PartialEq)]
pub struct ListCandidate {
    pub u: Vec<u8>,
    pub codeword: Vec<u8>,
    pub pm: f64,
}

/// Bit-wise a-posteriori LLRs of the codeword bits, clamped to ±60.
pub fn app_llrs(list: &[ListCandidate], llrs: &[f64], lambda: f64, variant: XiVariant) -> Vec<f64> {
    app_llrs_counted(list, llrs, lambda, variant, &mut Kernel::new(ArithMode::Exact))
}

pub fn app_llrs_counted(
    list: &[ListCandidate],
    llrs: &[f64],
    lambda: f64,
    variant: XiVariant,
    k: &mut Kernel,
) -> Vec<f64> {
    let n = llrs.len();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let (mut s0, mut s1) = (NEG_INF, NEG_INF);
        let (mut n0, mut n1) = (0usize, 0usize);
        for c in list {
            if c.codeword[j] == 0 {
                s0 = k.bplus(s0, -c.pm);
                n0 += 1;
            } else {
                s1 = k.bplus(s1, -c.pm);
                n1 += 1;
            }
        }
        let (num, den) = if lambda == NEG_INF {
            (s0, s1)
        } else {
            let l0 = -k.pm_inc(llrs[j], 0);
            let l1 = k.add(l0, -llrs[j]);
            k.ops.compare += 1;
            let (lo, hi) = if l0 < l1 { (l0, l1) } else { (l1, l0) };
            let at = |x: f64, k: &mut Kernel| k.add(lambda, x);
            match variant {
                XiVariant::Modified if n1 == 0 => {
                    let h = at(hi, k);
                    (k.bplus(s0, h), at(lo, k))
                }
                XiVariant::Modified if n0 == 0 => {
                    let h = at(hi, k);
                    (at(lo, k), k.bplus(s1, h))
                }
                _ => {
                    let a0 = at(l0, k);
                    let a1 = at(l1, k);
                    (k.bplus(s0, a0), k.bplus(s1, a1))
                }
            }
        };
        out.push(log_ratio(num, den, k));
    }
    out
}

fn log_ratio(num: f64, den: f64, k: &mut Kernel) -> f64 {
    match (num == NEG_INF, den == NEG_INF) {
        (true, true) => 0.0,
        (false, true) => LLR_MAX,
        (true, false) => -LLR_MAX,
        _ => k.add(num, -den).clamp(-LLR_MAX, LLR_MAX),
    }
}

/// APP LLRs under both unanimous-bit treatments, from the same decode.
#[derive(Clone, Debug, PartialEq)]
pub struct XiPair {
    pub modified: Vec<f64>,
    pub unmodified: Vec<f64>,
}

pub fn xi_pair(list: &[ListCandidate], llrs: &[f64], lambda: f64) -> XiPair {
    XiPair {
        modified: app_llrs(list, llrs, lambda, XiVariant::Modified),
        unmodified: app_llrs(list, llrs, lambda, XiVariant::Unmodified),
    }
}

/// Estimated probability that the best list entry is the transmitted one:
/// its mass relative to the list mass plus λ.
pub fn gamma_star(list: &[ListCandidate], lambda: f64) -> f64 {
    let Some(best) = list.iter().map(|c| c.pm).min_by(f64::total_cmp) else {
        return 0.0;
    };
    let total = box_plus(box_plus_all(list.iter().map(|c| -c.pm), ArithMode::Exact), lambda);
    (-best - total).exp().min(1.0)
}

/// 1 − Γ*, computed without cancellation for Γ* near one.
pub fn approx_block_error(list: &[ListCandidate], lambda: f64) -> f64 {
    let Some(best) = list.iter().map(|c| c.pm).min_by(f64::total_cmp) else {
        return 1.0;
    };
    let total = box_plus(box_plus_all(list.iter().map(|c| -c.pm), ArithMode::Exact), lambda);
    (-(-best - total).min(0.0).exp_m1()).clamp(0.0, 1.0)
}

#[derive(Clone, Debug)]
pub struct SoftDecodeResult {
    /// Final list, ascending PM.
    pub candidates: Vec<ListCandidate>,
    pub app_llrs: Vec<f64>,
    /// ln P*_T.
    pub lambda_t: f64,
    pub gamma_star: f64,
    pub ops: OpCounts,
}

impl SoftDecodeResult {
    /// Hard decision of the best path.
    pub fn best(&self) -> &ListCandidate {
        &self.candidates[0]
    }
}

fn finish(
    candidates: Vec<ListCandidate>,
    llrs: &[f64],
    lambda: f64,
    variant: XiVariant,
    mut k: Kernel,
) -> SoftDecodeResult {
    let app = app_llrs_counted(&candidates, llrs, lambda, variant, &mut k);
    let gamma = gamma_star(&candidates, lambda);
    SoftDecodeResult { candidates, app_llrs: app, lambda_t: lambda, gamma_star: gamma, ops: k.ops }
}

/// Soft-output fast SCL decoding.
pub fn so_fscl_decode(
    llrs: &[f64],
    spec: &PolarCodeSpec,
    list_size: usize,
    mode: ArithMode,
) -> Result<SoftDecodeResult, DecodeError> {
    so_fscl_decode_with(&FastDecoder::new(spec, list_size, mode, true)?, llrs, XiVariant::Modified)
}

/// As [`so_fscl_decode`], reusing a prepared decoder.
pub fn so_fscl_decode_with(
    dec: &FastDecoder<'_>,
    llrs: &[f64],
    variant: XiVariant,
) -> Result<SoftDecodeResult, DecodeError> {
    let run = dec.decode(llrs)?;
    let mut k = Kernel::new(dec.mode());
    k.ops = run.ops;
    let cands = run
        .paths
        .into_iter()
        .map(|p| ListCandidate { u: p.u, codeword: p.codeword, pm: p.pm })
        .collect();
    Ok(finish(cands, llrs, run.lambda_t, variant, k))
}

/// Soft-output bit-by-bit SCL decoding.
pub fn so_scl_decode(
    llrs: &[f64],
    spec: &PolarCodeSpec,
    list_size: usize,
    mode: ArithMode,
) -> Result<SoftDecodeResult, DecodeError> {
    let run = scl_decode(llrs, spec, list_size, mode, true)?;
    let mut k = Kernel::new(mode);
    k.ops = run.ops;
    let cands = run
        .paths
        .into_iter()
        .map(|p| ListCandidate { u: p.u, codeword: p.codeword, pm: p.pm })
        .collect();
    Ok(finish(cands, llrs, run.lambda_t, XiVariant::Modified, k))
}

/// ln 2 per frozen leaf, for `n_frozen` leaves.
pub fn frozen_discount(n_frozen: usize) -> f64 {
    n_frozen as f64 * LN_2
}

#[cfg(test)]
mod tests;
