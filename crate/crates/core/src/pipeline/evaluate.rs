//! Sweep-by-sweep detection over a trace.

use serde::Serialize;

use super::baseline::BaselineProfile;
use super::trace::{group_sweeps, RssRecord};
use crate::detector::DetectorConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowDecision {
    pub start: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    pub energy: f64,
    pub occupied: bool,
}

/// Detection ratio over all decisions labelled with one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRatio {
    pub point: String,
    pub decisions: usize,
    pub detections: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub sweeps: usize,
    /// Sweeps missing at least one selected channel.
    pub skipped: usize,
    pub threshold: f64,
    pub decisions: Vec<WindowDecision>,
    /// Per-point ratios in order of first appearance.
    pub points: Vec<PointRatio>,
}

impl Evaluation {
    pub fn detections(&self) -> usize {
        self.decisions.iter().filter(|d| d.occupied).count()
    }

    pub fn detection_ratio(&self) -> f64 {
        if self.decisions.is_empty() {
            0.0
        } else {
            self.detections() as f64 / self.decisions.len() as f64
        }
    }

    pub fn point(&self, id: &str) -> Option<&PointRatio> {
        self.points.iter().find(|p| p.point == id)
    }
}

fn check_subset(baseline: &BaselineProfile, subset: &[usize]) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::invalid("subset", "at least one channel required"));
    }
    if let Some(&l) = subset.iter().find(|&&l| l >= baseline.len()) {
        return Err(Error::invalid(
            "subset",
            format!("channel {l} not covered by a {}-channel baseline", baseline.len()),
        ));
    }
    Ok(())
}

/// Baseline-subtracted values of `subset` for every complete sweep,
/// flattened in sweep order, plus the number of incomplete sweeps.
pub fn residual_windows(
    records: &[RssRecord],
    baseline: &BaselineProfile,
    subset: &[usize],
    sweep_period: f64,
) -> Result<(Vec<f64>, usize)> {
    check_subset(baseline, subset)?;
    let sweeps = group_sweeps(records, baseline.len(), sweep_period)?;
    let mut out = Vec::with_capacity(sweeps.len() * subset.len());
    let mut skipped = 0;
    for s in &sweeps {
        match s.select(subset) {
            Some(v) => out.extend(v.iter().zip(subset).map(|(x, &l)| x - baseline.mean(l))),
            None => skipped += 1,
        }
    }
    Ok((out, skipped))
}

/// Subtracts the baseline from each complete sweep on `subset` and applies
/// the energy test.
pub fn evaluate_trace(
    records: &[RssRecord],
    baseline: &BaselineProfile,
    config: &DetectorConfig,
    subset: &[usize],
    sweep_period: f64,
) -> Result<Evaluation> {
    check_subset(baseline, subset)?;
    if subset.len() != config.channels() {
        return Err(Error::LengthMismatch {
            expected: config.channels(),
            actual: subset.len(),
        });
    }
    let sweeps = group_sweeps(records, baseline.len(), sweep_period)?;
    let mut decisions = Vec::with_capacity(sweeps.len());
    let mut points: Vec<PointRatio> = Vec::new();
    let mut skipped = 0;
    for s in &sweeps {
        let Some(values) = s.select(subset) else {
            skipped += 1;
            continue;
        };
        let z: Vec<f64> = values.iter().zip(subset).map(|(x, &l)| x - baseline.mean(l)).collect();
        let d = config.decide(&z)?;
        if let Some(id) = &s.point {
            let idx = match points.iter().position(|p| &p.point == id) {
                Some(i) => i,
                None => {
                    points.push(PointRatio {
                        point: id.clone(),
                        decisions: 0,
                        detections: 0,
                        ratio: 0.0,
                    });
                    points.len() - 1
                }
            };
            points[idx].decisions += 1;
            points[idx].detections += d.occupied as usize;
        }
        decisions.push(WindowDecision {
            start: s.start,
            point: s.point.clone(),
            energy: d.energy,
            occupied: d.occupied,
        });
    }
    for p in &mut points {
        p.ratio = p.detections as f64 / p.decisions as f64;
    }
    Ok(Evaluation {
        sweeps: sweeps.len(),
        skipped,
        threshold: config.threshold(),
        decisions,
        points,
    })
}
