//! Vacant-room per-channel baseline.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::trace::RssRecord;
use crate::error::{Error, Result};

/// Per-channel mean RSS and residual spread from an empty-room recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineProfile {
    pub channels: Vec<ChannelBaseline>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelBaseline {
    pub index: usize,
    pub mean_dbm: f64,
    pub std_db: f64,
    pub samples: usize,
}

impl BaselineProfile {
    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn mean(&self, channel: usize) -> f64 {
        self.channels[channel].mean_dbm
    }

    pub fn means(&self) -> Vec<f64> {
        self.channels.iter().map(|c| c.mean_dbm).collect()
    }

    /// Smallest per-channel sample count.
    pub fn min_samples(&self) -> usize {
        self.channels.iter().map(|c| c.samples).min().unwrap_or(0)
    }

    /// Records with the channel mean removed.
    pub fn subtract(&self, records: &[RssRecord]) -> Result<Vec<RssRecord>> {
        records
            .iter()
            .map(|r| {
                let c = self.channels.get(r.channel).ok_or(Error::LengthMismatch {
                    expected: self.channels.len(),
                    actual: r.channel + 1,
                })?;
                Ok(RssRecord {
                    rss_dbm: r.rss_dbm - c.mean_dbm,
                    ..r.clone()
                })
            })
            .collect()
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let profile: BaselineProfile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for (i, c) in profile.channels.iter().enumerate() {
            if c.index != i {
                return Err(Error::Config(format!("channel entry {i} has index {}", c.index)));
            }
        }
        Ok(profile)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }
}

/// Mean and standard deviation of every channel in `0..channel_count`.
pub fn estimate_baseline(records: &[RssRecord], channel_count: usize) -> Result<BaselineProfile> {
    let mut sums = vec![0.0; channel_count];
    let mut counts = vec![0usize; channel_count];
    for r in records {
        if r.channel >= channel_count {
            return Err(Error::invalid(
                "channel",
                format!("index {} outside a {channel_count}-channel set", r.channel),
            ));
        }
        sums[r.channel] += r.rss_dbm;
        counts[r.channel] += 1;
    }
    if let Some(channel) = counts.iter().position(|&n| n == 0) {
        return Err(Error::EmptyChannel { channel });
    }
    let fewest = counts.iter().copied().min().unwrap_or(0);
    if fewest < super::DEFAULT_BASELINE_SAMPLES {
        log::warn!(
            "baseline built from {fewest} samples on some channel; {} recommended",
            super::DEFAULT_BASELINE_SAMPLES
        );
    }
    let means: Vec<f64> = sums.iter().zip(&counts).map(|(s, &n)| s / n as f64).collect();
    let mut sq = vec![0.0; channel_count];
    for r in records {
        sq[r.channel] += (r.rss_dbm - means[r.channel]).powi(2);
    }
    let channels = (0..channel_count)
        .map(|l| ChannelBaseline {
            index: l,
            mean_dbm: means[l],
            std_db: if counts[l] > 1 {
                (sq[l] / (counts[l] - 1) as f64).sqrt()
            } else {
                0.0
            },
            samples: counts[l],
        })
        .collect();
    Ok(BaselineProfile { channels })
}
