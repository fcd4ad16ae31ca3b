//! FIR low-pass filtering of per-channel RSS streams.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use super::trace::RssRecord;
use crate::error::{Error, Result};

/// Default tap count (order 64).
pub const DEFAULT_TAPS: usize = 65;
/// Default cutoff, Hz.
pub const DEFAULT_CUTOFF_HZ: f64 = 1.0;
/// Per-channel sample rate for a 32 ms sweep, Hz.
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 31.25;

/// Blackman-windowed sinc low-pass normalized to unit DC gain.
pub fn design_lowpass(taps: usize, cutoff_hz: f64, sample_rate_hz: f64) -> Result<Vec<f64>> {
    if taps == 0 {
        return Err(Error::invalid("taps", "at least one tap required"));
    }
    if !(cutoff_hz > 0.0 && cutoff_hz < 0.5 * sample_rate_hz) {
        return Err(Error::invalid("cutoff_hz", "must lie in (0, fs/2)"));
    }
    let fc = cutoff_hz / sample_rate_hz;
    let mid = (taps - 1) as f64 / 2.0;
    let span = (taps - 1).max(1) as f64;
    let mut h: Vec<f64> = (0..taps)
        .map(|n| {
            let m = n as f64 - mid;
            let sinc = if m == 0.0 {
                2.0 * fc
            } else {
                (2.0 * PI * fc * m).sin() / (PI * m)
            };
            let w = if taps == 1 {
                1.0
            } else {
                let r = 2.0 * PI * n as f64 / span;
                0.42 - 0.5 * r.cos() + 0.08 * (2.0 * r).cos()
            };
            sinc * w
        })
        .collect();
    let gain: f64 = h.iter().sum();
    h.iter_mut().for_each(|v| *v /= gain);
    Ok(h)
}

pub fn default_taps() -> Vec<f64> {
    design_lowpass(DEFAULT_TAPS, DEFAULT_CUTOFF_HZ, DEFAULT_SAMPLE_RATE_HZ).expect("default design is valid")
}

/// Reads taps from text, one value per line or comma/whitespace separated.
pub fn load_taps(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut taps = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for tok in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            taps.push(tok.parse::<f64>().map_err(|_| Error::Parse {
                path: path.display().to_string(),
                line: i + 1,
                reason: format!("bad tap `{tok}`"),
            })?);
        }
    }
    if taps.is_empty() {
        return Err(Error::invalid("taps", "file holds no coefficients"));
    }
    Ok(taps)
}

/// `y[n] = Σ_k h[k]·x[n−k]` with zero initial state; output length equals input.
pub fn fir_lowpass(series: &[f64], taps: &[f64]) -> Vec<f64> {
    assert!(!taps.is_empty(), "taps must be nonempty");
    (0..series.len())
        .map(|n| {
            taps.iter()
                .take(n + 1)
                .enumerate()
                .map(|(k, h)| h * series[n - k])
                .sum()
        })
        .collect()
}

/// Magnitude response `|H(e^{j2πf/fs})|`.
pub fn magnitude_response(taps: &[f64], freq_hz: f64, sample_rate_hz: f64) -> f64 {
    let w = 2.0 * PI * freq_hz / sample_rate_hz;
    let (re, im) = taps.iter().enumerate().fold((0.0, 0.0), |(re, im), (k, h)| {
        (re + h * (w * k as f64).cos(), im - h * (w * k as f64).sin())
    });
    re.hypot(im)
}

/// Filters each channel's stream separately, in record order. Each stream
/// starts from a state filled with its first sample so the output carries
/// no start-up transient toward zero.
pub fn filter_trace(records: &[RssRecord], taps: &[f64]) -> Vec<RssRecord> {
    let mut streams: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        streams.entry(r.channel).or_default().push(i);
    }
    let mut out = records.to_vec();
    let pad = taps.len() - 1;
    for idx in streams.values() {
        let first = records[idx[0]].rss_dbm;
        let series: Vec<f64> = std::iter::repeat_n(first, pad)
            .chain(idx.iter().map(|&i| records[i].rss_dbm))
            .collect();
        let y = fir_lowpass(&series, taps);
        for (k, &i) in idx.iter().enumerate() {
            out[i].rss_dbm = y[k + pad];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn impulse_response_is_taps() {
        let taps = vec![0.25, 0.5, 0.25];
        let mut x = vec![0.0; 6];
        x[0] = 1.0;
        let y = fir_lowpass(&x, &taps);
        assert_eq!(&y[..3], &taps[..]);
        assert!(y[3..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn constant_passes_with_unit_gain() {
        let taps = default_taps();
        assert_eq!(taps.len(), 65);
        assert_abs_diff_eq!(taps.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        let y = fir_lowpass(&[3.5; 200], &taps);
        assert_abs_diff_eq!(y[199], 3.5, epsilon = 1e-12);
    }

    #[test]
    fn stopband_attenuation_at_10_hz() {
        let taps = default_taps();
        let fs = DEFAULT_SAMPLE_RATE_HZ;
        let x: Vec<f64> = (0..2000).map(|n| (2.0 * PI * 10.0 * n as f64 / fs).sin()).collect();
        let y = fir_lowpass(&x, &taps);
        let peak = y[500..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(20.0 * peak.log10() < -40.0, "peak {peak}");
        assert!(20.0 * magnitude_response(&taps, 10.0, fs).log10() < -40.0);
        assert!(magnitude_response(&taps, 0.1, fs) > 0.9);
    }

    #[test]
    fn streams_do_not_mix() {
        let recs: Vec<_> = (0..100)
            .map(|i| RssRecord::new(i as f64, i % 2, if i % 2 == 0 { -40.0 } else { -60.0 }))
            .collect();
        let f = filter_trace(&recs, &default_taps());
        for r in &f {
            let want = if r.channel == 0 { -40.0 } else { -60.0 };
            assert_abs_diff_eq!(r.rss_dbm, want, epsilon = 1e-9);
        }
    }

    #[test]
    fn rejects_bad_design() {
        assert!(design_lowpass(0, 1.0, 10.0).is_err());
        assert!(design_lowpass(11, 6.0, 10.0).is_err());
    }
}
