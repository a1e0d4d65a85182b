//! Softplus and log-domain probability addition/subtraction.

use std::f64::consts::LN_2;

use thiserror::Error;

/// Log-domain zero.
pub const NEG_INF: f64 = f64::NEG_INFINITY;

/// Exact or hardware-friendly (piecewise-linear softplus) arithmetic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ArithMode {
    #[default]
    Exact,
    Hwf,
}

impl std::str::FromStr for ArithMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(ArithMode::Exact),
            "hwf" => Ok(ArithMode::Hwf),
            _ => Err(format!("unknown arithmetic mode `{s}` (expected exact|hwf)")),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LogDomainError {
    #[error("log-domain subtraction of a larger term (a = {a}, b = {b})")]
    NegativeDifference { a: f64, b: f64 },
}

/// ln(1 + e^x).
#[inline]
pub fn softplus_exact(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Piecewise-linear approximation of ln(1 + e^x).
#[inline]
pub fn softplus_hwf(x: f64) -> f64 {
    if x <= 0.0 {
        (0.25 * x + LN_2).max(0.0)
    } else {
        x.max(0.75 * x + LN_2)
    }
}

#[inline]
pub fn softplus(x: f64, mode: ArithMode) -> f64 {
    match mode {
        ArithMode::Exact => softplus_exact(x),
        ArithMode::Hwf => softplus_hwf(x),
    }
}

/// ln(e^a + e^b) with exact softplus.
#[inline]
pub fn box_plus(a: f64, b: f64) -> f64 {
    box_plus_mode(a, b, ArithMode::Exact)
}

#[inline]
pub fn box_plus_mode(a: f64, b: f64, mode: ArithMode) -> f64 {
    if a == NEG_INF {
        return b;
    }
    if b == NEG_INF {
        return a;
    }
    a.max(b) + softplus(-(a - b).abs(), mode)
}

/// ln(e^a − e^b); requires a ≥ b. Equal arguments give −∞.
pub fn box_minus(a: f64, b: f64) -> Result<f64, LogDomainError> {
    if b == NEG_INF {
        return Ok(a);
    }
    if a < b {
        return Err(LogDomainError::NegativeDifference { a, b });
    }
    if a == b {
        return Ok(NEG_INF);
    }
    Ok(b + (a - b).exp_m1().ln())
}

/// ⊞ over an iterator; the empty sum is −∞.
pub fn box_plus_all<I: IntoIterator<Item = f64>>(terms: I, mode: ArithMode) -> f64 {
    terms.into_iter().fold(NEG_INF, |acc, t| box_plus_mode(acc, t, mode))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softplus_reference_points() {
        assert_eq!(softplus_exact(0.0), LN_2);
        assert_eq!(softplus_hwf(0.0), LN_2);
        assert!(softplus_exact(-60.0) < 1e-26);
        assert_eq!(softplus_hwf(-60.0), 0.0);
        assert!((softplus_exact(2.0) - (1.0 + 2f64.exp()).ln()).abs() < 1e-15);
        assert!((softplus_exact(50.0) - 50.0).abs() < 1e-15);
    }

    #[test]
    fn softplus_odd_part_is_identity() {
        // sp(x) − sp(−x) = x holds for both variants.
        for i in -4000..=4000 {
            let x = i as f64 * 0.005;
            assert!((softplus_exact(x) - softplus_exact(-x) - x).abs() < 1e-12);
            assert!((softplus_hwf(x) - softplus_hwf(-x) - x).abs() < 1e-12);
        }
    }

    #[test]
    fn hwf_error_bound() {
        // Dense scan of the approximation error on [−20, 20].
        let mut worst: f64 = 0.0;
        let mut x = -20.0;
        while x <= 20.0 {
            worst = worst.max((softplus_hwf(x) - softplus_exact(x)).abs());
            x += 1e-3;
        }
        // Largest gap sits where the slope of ln(1 + e^x) equals 1/4 (or
        // 3/4), i.e. x = ∓ln 3: ln2 − ln3/4 − ln(4/3) ≈ 0.130812.
        let at = 0.25 * (-(3f64.ln())) + LN_2 - softplus_exact(-(3f64.ln()));
        assert!((at - 0.130_812).abs() < 1e-6);
        assert!(worst <= at + 1e-12 && worst > at - 1e-6, "worst = {worst}");
    }

    #[test]
    fn box_ops() {
        assert!((box_plus(0.0, 0.0) - LN_2).abs() < 1e-15);
        assert_eq!(box_plus(NEG_INF, -3.0), -3.0);
        assert_eq!(box_plus(NEG_INF, NEG_INF), NEG_INF);
        assert!((box_minus(LN_2, 0.0).unwrap() - 0.0).abs() < 1e-15);
        assert_eq!(box_minus(1.5, 1.5).unwrap(), NEG_INF);
        assert_eq!(box_minus(-2.0, NEG_INF).unwrap(), -2.0);
        assert!(box_minus(0.0, 1.0).is_err());
        assert_eq!(box_plus_all(std::iter::empty(), ArithMode::Exact), NEG_INF);
    }

    #[test]
    fn box_round_trip() {
        let mut s = 99u64;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 40.0 - 30.0
        };
        for _ in 0..10_000 {
            // Keep e^(b−a) moderate so the subtraction is well conditioned.
            let a = next() / 3.0;
            let b = a + next() / 6.0;
            let back = box_minus(box_plus(a, b), b).unwrap();
            assert!((back - a).abs() < 1e-9 * (1.0 + a.abs()), "a={a} b={b} back={back}");
        }
    }
}
