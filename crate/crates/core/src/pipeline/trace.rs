//! Delimited-text RSS traces and their grouping into channel sweeps.
//!
//! One record per line: `timestamp, channel_index, rss_dbm[, point_id]`,
//! separated by commas or whitespace. Lines starting with `#` and blank
//! lines are ignored.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time for one sweep over 16 channels at 2 ms per packet, seconds.
pub const DEFAULT_SWEEP_PERIOD_S: f64 = 0.032;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RssRecord {
    pub timestamp: f64,
    pub channel: usize,
    pub rss_dbm: f64,
    /// Optional grid-point label attached to the record.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
}

impl RssRecord {
    pub fn new(timestamp: f64, channel: usize, rss_dbm: f64) -> Self {
        RssRecord {
            timestamp,
            channel,
            rss_dbm,
            point: None,
        }
    }

    pub fn with_point(mut self, point: impl Into<String>) -> Self {
        self.point = Some(point.into());
        self
    }
}

/// Parses trace text; `source` only labels error messages.
pub fn parse_trace(text: &str, source: &str) -> Result<Vec<RssRecord>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: String| Error::Parse {
            path: source.to_string(),
            line: i + 1,
            reason,
        };
        let fields: Vec<&str> = if line.contains(',') {
            line.split(',').map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        };
        if !(3..=4).contains(&fields.len()) {
            return Err(err(format!("expected 3 or 4 fields, found {}", fields.len())));
        }
        let timestamp: f64 = fields[0]
            .parse()
            .map_err(|_| err(format!("bad timestamp `{}`", fields[0])))?;
        let channel: usize = fields[1]
            .parse()
            .map_err(|_| err(format!("bad channel index `{}`", fields[1])))?;
        let rss_dbm: f64 = fields[2]
            .parse()
            .map_err(|_| err(format!("bad rss value `{}`", fields[2])))?;
        if !timestamp.is_finite() || !rss_dbm.is_finite() {
            return Err(err("non-finite value".into()));
        }
        let point = fields.get(3).filter(|s| !s.is_empty()).map(|s| s.to_string());
        out.push(RssRecord {
            timestamp,
            channel,
            rss_dbm,
            point,
        });
    }
    Ok(out)
}

pub fn read_trace(path: &Path) -> Result<Vec<RssRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trace(&text, &path.display().to_string())
}

/// Formats records as comma-separated text with a `#` header.
pub fn format_trace(records: &[RssRecord]) -> String {
    let mut s = String::from("# timestamp_s,channel_index,rss_dbm,point_id\n");
    for r in records {
        let _ = write!(s, "{:.6},{},{:.6}", r.timestamp, r.channel, r.rss_dbm);
        if let Some(p) = &r.point {
            let _ = write!(s, ",{p}");
        }
        s.push('\n');
    }
    s
}

pub fn write_trace(path: &Path, records: &[RssRecord]) -> Result<()> {
    std::fs::write(path, format_trace(records)).map_err(|e| Error::io(path, e))
}

/// One channel sweep; `values[l]` is the latest reading on channel `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub start: f64,
    pub values: Vec<Option<f64>>,
    pub point: Option<String>,
}

impl Sweep {
    /// Values on `subset`, or `None` if any of them is missing.
    pub fn select(&self, subset: &[usize]) -> Option<Vec<f64>> {
        subset.iter().map(|&l| self.values.get(l).copied().flatten()).collect()
    }
}

/// Groups records into sweeps.
///
/// A new sweep starts when a record arrives `sweep_period` or more after the
/// current sweep's first record, or when its channel was already seen in the
/// current sweep and its index is lower than the previous record's. A repeat
/// of a channel that does not wrap overwrites the earlier value.
pub fn group_sweeps(records: &[RssRecord], channel_count: usize, sweep_period: f64) -> Result<Vec<Sweep>> {
    if !(sweep_period > 0.0) {
        return Err(Error::invalid("sweep_period", "must be positive"));
    }
    let mut sweeps: Vec<Sweep> = Vec::new();
    let mut prev_channel: Option<usize> = None;
    for r in records {
        if r.channel >= channel_count {
            return Err(Error::invalid(
                "channel",
                format!("index {} outside a {channel_count}-channel set", r.channel),
            ));
        }
        let start_new = match sweeps.last() {
            None => true,
            Some(cur) => {
                let wrapped = cur.values[r.channel].is_some() && prev_channel.is_some_and(|p| r.channel < p);
                r.timestamp >= cur.start + sweep_period || wrapped
            }
        };
        if start_new {
            sweeps.push(Sweep {
                start: r.timestamp,
                values: vec![None; channel_count],
                point: r.point.clone(),
            });
        }
        let cur = sweeps.last_mut().expect("sweep exists");
        cur.values[r.channel] = Some(r.rss_dbm);
        prev_channel = Some(r.channel);
    }
    Ok(sweeps)
}
