//! Counted arithmetic primitives shared by all decoders.

use crate::analysis::OpCounts;
use crate::soft_output::logdomain::{softplus_exact, softplus_hwf, LogDomainError, NEG_INF};
use crate::soft_output::ArithMode;

/// Arithmetic context of one decode: the mode plus running op counters.
#[derive(Clone, Debug, Default)]
pub struct Kernel {
    pub mode: ArithMode,
    pub ops: OpCounts,
}

impl Kernel {
    pub fn new(mode: ArithMode) -> Self {
        Self { mode, ops: OpCounts::default() }
    }

    #[inline]
    pub fn sp(&mut self, x: f64) -> f64 {
        match self.mode {
            ArithMode::Exact => {
                self.ops.softplus += 1;
                softplus_exact(x)
            }
            ArithMode::Hwf => {
                self.ops.mul_div += 1;
                self.ops.add_sub += 1;
                self.ops.compare += 2;
                softplus_hwf(x)
            }
        }
    }

    /// Check-node update: sign(a)sign(b)min(|a|,|b|) + sp(−|a+b|) − sp(−|a−b|).
    #[inline]
    pub fn f(&mut self, a: f64, b: f64) -> f64 {
        self.ops.add_sub += 4;
        self.ops.compare += 1;
        self.ops.hd_sign += 2;
        let ms = a.abs().min(b.abs()).copysign(a * b);
        let corr = self.sp(-(a + b).abs()) - self.sp(-(a - b).abs());
        ms + corr
    }

    /// Variable-node update: (1 − 2·bit)·a + b.
    #[inline]
    pub fn g(&mut self, a: f64, b: f64, bit: u8) -> f64 {
        self.ops.add_sub += 1;
        self.ops.hd_sign += 1;
        if bit == 0 {
            a + b
        } else {
            b - a
        }
    }

    /// PM increment for deciding `bit` against LLR `llr`.
    #[inline]
    pub fn pm_inc(&mut self, llr: f64, bit: u8) -> f64 {
        self.ops.hd_sign += 1;
        self.sp(if bit == 0 { -llr } else { llr })
    }

    #[inline]
    pub fn add(&mut self, a: f64, b: f64) -> f64 {
        self.ops.add_sub += 1;
        a + b
    }

    #[inline]
    pub fn bplus(&mut self, a: f64, b: f64) -> f64 {
        if a == NEG_INF {
            return b;
        }
        if b == NEG_INF {
            return a;
        }
        self.ops.compare += 1;
        self.ops.add_sub += 2;
        a.max(b) + self.sp(-(a - b).abs())
    }

    pub fn bplus_all<I: IntoIterator<Item = f64>>(&mut self, terms: I) -> f64 {
        let mut acc = NEG_INF;
        for t in terms {
            acc = self.bplus(acc, t);
        }
        acc
    }

    #[inline]
    pub fn bminus(&mut self, a: f64, b: f64) -> Result<f64, LogDomainError> {
        if b == NEG_INF {
            return Ok(a);
        }
        if a < b {
            return Err(LogDomainError::NegativeDifference { a, b });
        }
        if a == b {
            return Ok(NEG_INF);
        }
        self.ops.add_sub += 2;
        self.ops.lnexm1 += 1;
        Ok(b + (a - b).exp_m1().ln())
    }

    pub fn record_pm_sort(&mut self, size: usize) {
        *self.ops.pm_sorts.entry(size).or_insert(0) += 1;
    }

    pub fn record_llr_sort(&mut self, size: usize) {
        *self.ops.llr_sorts.entry(size).or_insert(0) += 1;
    }
}

/// Exact check-node update without counting.
pub fn f_func(a: f64, b: f64, mode: ArithMode) -> f64 {
    Kernel::new(mode).f(a, b)
}

pub fn g_func(a: f64, b: f64, bit: u8) -> f64 {
    if bit & 1 == 0 {
        a + b
    } else {
        b - a
    }
}

/// PM + sp(−(1 − 2·bit)·llr).
pub fn pm_update_bit(pm: f64, llr: f64, bit: u8, mode: ArithMode) -> f64 {
    pm + Kernel::new(mode).pm_inc(llr, bit & 1)
}

/// PM + Σ sp(−(1 − 2ŝ_k)·α_k).
pub fn pm_update_codeword(pm: f64, llrs: &[f64], s_hat: &[u8], mode: ArithMode) -> Option<f64> {
    if llrs.len() != s_hat.len() {
        return None;
    }
    let mut k = Kernel::new(mode);
    Some(llrs.iter().zip(s_hat).fold(pm, |acc, (&a, &s)| acc + k.pm_inc(a, s & 1)))
}
