//! BPSK over AWGN or flat Rayleigh fading, and channel LLRs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// LLR magnitude clamp applied everywhere LLRs enter or leave a decoder.
pub const LLR_MAX: f64 = 60.0;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("code rate {0} outside (0, 1]")]
    BadRate(f64),
    #[error("length mismatch: codeword {cw}, observation {obs}")]
    LengthMismatch { cw: usize, obs: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelKind {
    Awgn,
    Rayleigh,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelCfg {
    pub kind: ChannelKind,
    pub ebn0_db: f64,
    pub rate: f64,
    /// Forces a noiseless channel regardless of `ebn0_db`.
    pub noiseless: bool,
}

impl ChannelCfg {
    pub fn awgn(ebn0_db: f64, rate: f64) -> Self {
        Self { kind: ChannelKind::Awgn, ebn0_db, rate, noiseless: false }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return Err(ChannelError::BadRate(self.rate));
        }
        Ok(())
    }

    /// Noise variance per real dimension for unit-energy BPSK, Eb/N0 counted
    /// per information bit.
    pub fn sigma2(&self) -> f64 {
        if self.noiseless {
            return 0.0;
        }
        1.0 / (2.0 * self.rate * 10f64.powf(self.ebn0_db / 10.0))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub y: Vec<f64>,
    pub fade: Vec<f64>,
}

/// Generator for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn transmit<R: Rng>(c: &[u8], cfg: &ChannelCfg, rng: &mut R) -> Result<Observation, ChannelError> {
    cfg.validate()?;
    let sigma = cfg.sigma2().sqrt();
    let mut y = Vec::with_capacity(c.len());
    let mut fade = Vec::with_capacity(c.len());
    for &bit in c {
        let x = 1.0 - 2.0 * f64::from(bit & 1);
        let h = match cfg.kind {
            ChannelKind::Awgn => 1.0,
            ChannelKind::Rayleigh => {
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                ((a * a + b * b) / 2.0).sqrt()
            }
        };
        let noise: f64 = if sigma > 0.0 { sigma * rng.sample::<f64, _>(StandardNormal) } else { 0.0 };
        y.push(h * x + noise);
        fade.push(h);
    }
    Ok(Observation { y, fade })
}

/// ℓ = 2·h·y/σ², clamped to ±LLR_MAX. A noiseless channel yields ±LLR_MAX.
pub fn channel_llr(obs: &Observation, cfg: &ChannelCfg) -> Vec<f64> {
    let s2 = cfg.sigma2();
    obs.y
        .iter()
        .zip(&obs.fade)
        .map(|(&y, &h)| {
            if s2 == 0.0 {
                if y == 0.0 {
                    0.0
                } else {
                    LLR_MAX.copysign(h * y)
                }
            } else {
                clamp_llr(2.0 * h * y / s2)
            }
        })
        .collect()
}

#[inline]
pub fn clamp_llr(x: f64) -> f64 {
    x.clamp(-LLR_MAX, LLR_MAX)
}
