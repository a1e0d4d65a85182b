//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the crate's arithmetic: softplus, the polar transform and all posterior
//! sums are re-implemented directly from their definitions.

#![allow(dead_code)]

use polar_sofscl::code_model::PolarCodeSpec;
use polar_sofscl::scl_core::StepTrace;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub const LN2: f64 = std::f64::consts::LN_2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// ln(1 + e^x).
pub fn sp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// ln Σ e^{x_i}; −∞ for an empty slice.
pub fn lse(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

pub fn lse2(a: f64, b: f64) -> f64 {
    lse(&[a, b])
}

/// c = u·G_N by the recursive definition G_N = [[G_{N/2}, 0], [G_{N/2}, G_{N/2}]].
pub fn polar_transform(u: &[u8]) -> Vec<u8> {
    if u.len() == 1 {
        return u.to_vec();
    }
    let h = u.len() / 2;
    let a = polar_transform(&u[..h]);
    let b = polar_transform(&u[h..]);
    a.iter().zip(&b).map(|(x, y)| x ^ y).chain(b.iter().copied()).collect()
}

/// BPSK (0 → +1) over AWGN with noise standard deviation `sigma`.
pub fn awgn_llrs(c: &[u8], sigma: f64, r: &mut impl Rng) -> Vec<f64> {
    let nd = Normal::new(0.0, sigma).unwrap();
    c.iter()
        .map(|&b| {
            let y = 1.0 - 2.0 * b as f64 + nd.sample(r);
            2.0 * y / (sigma * sigma)
        })
        .collect()
}

pub fn sigma_for(ebn0_db: f64, rate: f64) -> f64 {
    (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt()
}

/// Random frozen mask with exactly `k` information positions.
pub fn random_frozen(n: usize, k: usize, r: &mut impl Rng) -> Vec<bool> {
    let mut frozen = vec![true; n];
    for i in sample(r, n, k) {
        frozen[i] = false;
    }
    frozen
}

/// Valid input vectors of the code, with frozen bits set by the code's rule.
pub fn valid_inputs(spec: &PolarCodeSpec) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for i in 0..spec.n() {
        let mut next = Vec::with_capacity(out.len() * 2);
        for u in out {
            if spec.is_frozen(i) {
                let v = spec.dynamic_frozen_value(&u, i).unwrap();
                let mut w = u;
                w.push(v);
                next.push(w);
            } else {
                for b in 0..2 {
                    let mut w = u.clone();
                    w.push(b);
                    next.push(w);
                }
            }
        }
        out = next;
    }
    out
}

/// ln P(c | y) for a codeword under independent bit channels.
pub fn log_prob_codeword(c: &[u8], llrs: &[f64]) -> f64 {
    c.iter().zip(llrs).map(|(&b, &l)| -sp(if b == 0 { -l } else { l })).sum()
}

/// Per-bit MAP LLRs over the code's full codebook. Bits that are constant
/// over the codebook give ±∞.
pub fn map_llrs(spec: &PolarCodeSpec, llrs: &[f64]) -> Vec<f64> {
    let n = spec.n();
    let mut num = vec![Vec::new(); n];
    let mut den = vec![Vec::new(); n];
    for u in valid_inputs(spec) {
        let c = polar_transform(&u);
        let lp = log_prob_codeword(&c, llrs);
        for j in 0..n {
            if c[j] == 0 {
                num[j].push(lp);
            } else {
                den[j].push(lp);
            }
        }
    }
    (0..n).map(|j| lse(&num[j]) - lse(&den[j])).collect()
}

/// ln P(u^m | y) for every prefix of every length, under a uniform prior
/// on all 2^N inputs. `levels[m][p]` holds prefix `p` (first bit = MSB).
pub struct PrefixMasses {
    levels: Vec<Vec<f64>>,
}

impl PrefixMasses {
    pub fn new(llrs: &[f64]) -> Self {
        let n = llrs.len();
        assert!(n <= 20, "exhaustive table limited to N ≤ 20");
        let cost0: Vec<f64> = llrs.iter().map(|&l| -sp(-l)).collect();
        let cost1: Vec<f64> = llrs.iter().map(|&l| -sp(l)).collect();
        let mut leaves = vec![0.0; 1 << n];
        let mut u = vec![0u8; n];
        for (idx, slot) in leaves.iter_mut().enumerate() {
            for (j, b) in u.iter_mut().enumerate() {
                *b = ((idx >> (n - 1 - j)) & 1) as u8;
            }
            let c = polar_transform(&u);
            *slot = c.iter().enumerate().map(|(j, &b)| if b == 0 { cost0[j] } else { cost1[j] }).sum();
        }
        let mut levels = vec![leaves];
        for _ in 0..n {
            let prev = levels.last().unwrap();
            let up: Vec<f64> = prev.chunks(2).map(|p| lse2(p[0], p[1])).collect();
            levels.push(up);
        }
        levels.reverse();
        Self { levels }
    }

    pub fn log_prefix(&self, prefix: &[u8]) -> f64 {
        let p = prefix.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        self.levels[prefix.len()][p]
    }
}

/// Valid extensions of `prefix` over positions `[prefix.len(), end)`.
pub fn valid_extensions(spec: &PolarCodeSpec, prefix: &[u8], end: usize) -> Vec<Vec<u8>> {
    let mut out = vec![prefix.to_vec()];
    for i in prefix.len()..end {
        let mut next = Vec::with_capacity(out.len() * 2);
        for u in out {
            if spec.is_frozen(i) {
                let v = spec.dynamic_frozen_value(&u, i).unwrap();
                let mut w = u;
                w.push(v);
                next.push(w);
            } else {
                for b in 0..2 {
                    let mut w = u.clone();
                    w.push(b);
                    next.push(w);
                }
            }
        }
        out = next;
    }
    out
}

/// ln of Σ over roots of unvisited valid subtrees a^i of 2^{−|F^{(>i)}|}·P(a^i | y),
/// replayed from a decoding trace against exhaustive prefix masses.
pub fn replay_lambda(spec: &PolarCodeSpec, trace: &[StepTrace], masses: &PrefixMasses) -> f64 {
    let mut terms = Vec::new();
    for st in trace {
        let discount = spec.frozen_from(st.end) as f64 * LN2;
        for p in &st.parents {
            for child in valid_extensions(spec, p, st.end) {
                if !st.survivors.contains(&child) {
                    terms.push(masses.log_prefix(&child) - discount);
                }
            }
        }
    }
    lse(&terms)
}

/// −ln P(u[..m] | α) by the bit-by-bit successive-cancellation chain rule
/// with exact check-node arithmetic, for a prefix of length m.
pub fn sc_prefix_metric(alpha: &[f64], prefix: &[u8]) -> f64 {
    fn check(a: f64, b: f64) -> f64 {
        // 2·atanh(tanh(a/2)·tanh(b/2)) in a numerically safe form.
        a.abs().min(b.abs()).copysign(a * b) + sp(-(a + b).abs()) - sp(-(a - b).abs())
    }
    fn rec(a: &[f64], u: &[u8], m: usize, pm: &mut f64) -> Vec<u8> {
        if a.len() == 1 {
            if m > 0 {
                *pm += sp(if u[0] == 0 { -a[0] } else { a[0] });
            }
            return vec![u[0]];
        }
        let h = a.len() / 2;
        let l: Vec<f64> = (0..h).map(|j| check(a[j], a[j + h])).collect();
        let bl = rec(&l, &u[..h], m.min(h), pm);
        let r: Vec<f64> = (0..h).map(|j| if bl[j] == 0 { a[j + h] + a[j] } else { a[j + h] - a[j] }).collect();
        let br = rec(&r, &u[h..], m.saturating_sub(h), pm);
        bl.iter().zip(&br).map(|(x, y)| x ^ y).chain(br.iter().copied()).collect()
    }
    let mut u = prefix.to_vec();
    u.resize(alpha.len(), 0);
    let mut pm = 0.0;
    rec(alpha, &u, prefix.len(), &mut pm);
    pm
}
