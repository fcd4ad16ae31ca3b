//! Synthetic RSS traces built from the reflection model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use super::trace::RssRecord;
use crate::energy::ChannelSet;
use crate::error::{Error, Result};
use crate::model::{zeta, LinkGeometry, Point, ReflectionParams, ZetaMode};

/// Additive measurement noise, dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    Gaussian { sigma: f64 },
    /// Gaussian plus, with probability `prob`, a positive exponential
    /// excursion of mean `tail_mean`.
    Skewed { sigma: f64, prob: f64, tail_mean: f64 },
}

impl NoiseModel {
    fn validate(&self) -> Result<()> {
        let sigma = match *self {
            NoiseModel::Gaussian { sigma } => sigma,
            NoiseModel::Skewed { sigma, prob, tail_mean } => {
                if !(0.0..=1.0).contains(&prob) || !(tail_mean >= 0.0) {
                    return Err(Error::invalid("noise", "prob in [0, 1] and tail_mean >= 0 required"));
                }
                sigma
            }
        };
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::invalid("sigma", "must be non-negative"));
        }
        Ok(())
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseModel::Gaussian { sigma } => sigma * rng.sample::<f64, _>(StandardNormal),
            NoiseModel::Skewed { sigma, prob, tail_mean } => {
                let g: f64 = rng.sample(StandardNormal);
                let u: f64 = rng.random();
                let tail = if u < prob {
                    tail_mean * rng.sample::<f64, _>(Exp1)
                } else {
                    0.0
                };
                sigma * g + tail
            }
        }
    }
}

/// A run of consecutive sweeps with a fixed reflection signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub point: Option<String>,
    pub signal_db: Vec<f64>,
    pub sweeps: usize,
}

impl Segment {
    /// Empty room.
    pub fn vacant(channels: usize, sweeps: usize) -> Self {
        Segment {
            point: None,
            signal_db: vec![0.0; channels],
            sweeps,
        }
    }

    /// Person standing at `point`, labelled `id`.
    pub fn reflector(
        params: &ReflectionParams,
        geom: &LinkGeometry,
        point: Point,
        channels: &ChannelSet,
        sweeps: usize,
        id: impl Into<String>,
    ) -> Result<Self> {
        let p = params.with_delta(geom.excess_path_length(point))?;
        let signal_db = channels
            .betas()
            .map(|b| zeta(&p, geom.distance(), b, ZetaMode::Closed))
            .collect();
        Ok(Segment {
            point: Some(id.into()),
            signal_db,
            sweeps,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Line-of-sight power per channel, dBm.
    pub los_dbm: Vec<f64>,
    pub noise: NoiseModel,
    pub sweep_period: f64,
    pub seed: u64,
}

impl SynthConfig {
    /// `P_LoS(l) = -40 - l` dBm, a simple frequency-dependent baseline.
    pub fn sloped(channels: usize, noise: NoiseModel, sweep_period: f64, seed: u64) -> Self {
        SynthConfig {
            los_dbm: (0..channels).map(|l| -40.0 - l as f64).collect(),
            noise,
            sweep_period,
            seed,
        }
    }
}

/// Records for all segments back to back. Within a sweep the channels are
/// visited in index order, evenly spaced over `sweep_period`.
pub fn generate_trace(config: &SynthConfig, segments: &[Segment]) -> Result<Vec<RssRecord>> {
    config.noise.validate()?;
    if !(config.sweep_period > 0.0) {
        return Err(Error::invalid("sweep_period", "must be positive"));
    }
    let c = config.los_dbm.len();
    if c == 0 {
        return Err(Error::invalid("los_dbm", "at least one channel required"));
    }
    if let Some(s) = segments.iter().find(|s| s.signal_db.len() != c) {
        return Err(Error::LengthMismatch {
            expected: c,
            actual: s.signal_db.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let slot = config.sweep_period / c as f64;
    let total: usize = segments.iter().map(|s| s.sweeps).sum();
    let mut out = Vec::with_capacity(total * c);
    let mut k = 0usize;
    for seg in segments {
        for _ in 0..seg.sweeps {
            let t0 = k as f64 * config.sweep_period;
            for l in 0..c {
                let rss = config.los_dbm[l] + seg.signal_db[l] + config.noise.sample(&mut rng);
                out.push(RssRecord {
                    timestamp: t0 + l as f64 * slot,
                    channel: l,
                    rss_dbm: rss,
                    point: seg.point.clone(),
                });
            }
            k += 1;
        }
    }
    Ok(out)
}
