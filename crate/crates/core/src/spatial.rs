//! Detection probability over a floor plan, and link-length planning.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{prob_detection, threshold_for_pf};
use crate::energy::{average_energy, energy, ChannelSet, EnergyMode};
use crate::error::{Error, Result};
use crate::model::{LinkGeometry, Point, ReflectionParams};

/// Rectangle sampled at cell centres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub resolution: f64,
}

impl GridSpec {
    pub fn new(x: (f64, f64), y: (f64, f64), resolution: f64) -> Result<Self> {
        if !(x.1 > x.0) || !(y.1 > y.0) {
            return Err(Error::invalid("grid", "ranges must have positive extent"));
        }
        if !(resolution > 0.0) {
            return Err(Error::invalid("resolution", "must be positive"));
        }
        Ok(GridSpec {
            x_min: x.0,
            x_max: x.1,
            y_min: y.0,
            y_max: y.1,
            resolution,
        })
    }

    fn count(span: f64, res: f64) -> usize {
        // Tolerate ranges that are a whole number of cells up to rounding.
        ((span / res) - 1e-9).ceil().max(1.0) as usize
    }

    pub fn nx(&self) -> usize {
        Self::count(self.x_max - self.x_min, self.resolution)
    }

    pub fn ny(&self) -> usize {
        Self::count(self.y_max - self.y_min, self.resolution)
    }

    /// Cell centres, `x` varying fastest.
    pub fn centers(&self) -> Vec<Point> {
        let (nx, ny) = (self.nx(), self.ny());
        let mut out = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            let y = self.y_min + (j as f64 + 0.5) * self.resolution;
            for i in 0..nx {
                out.push(Point::new(self.x_min + (i as f64 + 0.5) * self.resolution, y));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdCell {
    pub x: f64,
    pub y: f64,
    pub delta: f64,
    pub energy: f64,
    pub pd: f64,
    /// False when `Δ` is below one mean wavelength, where the body shadows
    /// the line of sight instead of reflecting.
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdMap {
    pub grid: GridSpec,
    pub nx: usize,
    pub ny: usize,
    pub tx: Point,
    pub rx: Point,
    pub gamma: f64,
    pub eta: f64,
    pub channels: usize,
    pub sigma: f64,
    pub pf: f64,
    pub threshold: f64,
    pub cells: Vec<PdCell>,
}

impl PdMap {
    pub fn cell(&self, i: usize, j: usize) -> &PdCell {
        &self.cells[j * self.nx + i]
    }

    /// Fraction of valid cells with `P_d` above `level`.
    pub fn coverage(&self, level: f64) -> f64 {
        let valid: Vec<_> = self.cells.iter().filter(|c| c.valid).collect();
        if valid.is_empty() {
            return 0.0;
        }
        valid.iter().filter(|c| c.pd > level).count() as f64 / valid.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x_m,y_m,delta_m,energy_db2,pd,valid\n");
        for c in &self.cells {
            let _ = writeln!(
                s,
                "{:.4},{:.4},{:.6},{:.9e},{:.9e},{}",
                c.x, c.y, c.delta, c.energy, c.pd, c.valid as u8
            );
        }
        s
    }
}

/// `P_d` at every cell centre, with `Δ` from the link geometry and the
/// exact channel-sum energy.
pub fn pd_map(
    geom: &LinkGeometry,
    grid: &GridSpec,
    gamma: f64,
    eta: f64,
    channels: &ChannelSet,
    sigma: f64,
    pf: f64,
) -> Result<PdMap> {
    let base = ReflectionParams::new(gamma, eta, 0.0)?;
    let c = channels.len();
    let threshold = threshold_for_pf(c, sigma, pf)?;
    let min_delta = 1.0 / channels.mean_beta();
    let d = geom.distance();
    let cells = grid
        .centers()
        .into_par_iter()
        .map(|p| {
            let delta = geom.excess_path_length(p);
            let params = base.with_delta(delta)?;
            let e = energy(&params, d, channels, EnergyMode::Exact)?.value;
            Ok(PdCell {
                x: p.x,
                y: p.y,
                delta,
                energy: e,
                pd: prob_detection(c, sigma, e, threshold)?,
                valid: delta >= min_delta,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PdMap {
        grid: *grid,
        nx: grid.nx(),
        ny: grid.ny(),
        tx: geom.tx(),
        rx: geom.rx(),
        gamma,
        eta,
        channels: c,
        sigma,
        pf,
        threshold,
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdPoint {
    pub delta: f64,
    pub energy: f64,
    pub average_energy: f64,
    pub pd: f64,
}

/// `P_d` against `Δ` for a link of length `d`, using exact energy.
pub fn pd_vs_delta(
    gamma: f64,
    eta: f64,
    d: f64,
    channels: &ChannelSet,
    sigma: f64,
    pf: f64,
    deltas: &[f64],
) -> Result<Vec<PdPoint>> {
    let base = ReflectionParams::new(gamma, eta, 0.0)?;
    let c = channels.len();
    let threshold = threshold_for_pf(c, sigma, pf)?;
    deltas
        .iter()
        .map(|&delta| {
            let params = base.with_delta(delta)?;
            let e = energy(&params, d, channels, EnergyMode::Exact)?.value;
            Ok(PdPoint {
                delta,
                energy: e,
                average_energy: average_energy(&params, d, c),
                pd: prob_detection(c, sigma, e, threshold)?,
            })
        })
        .collect()
}

/// Inputs to [`plan_distance`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanRequest {
    pub target_pd: f64,
    pub pf: f64,
    pub delta_band: (f64, f64),
    pub gamma: f64,
    pub eta: f64,
    pub channels: usize,
    pub sigma: f64,
    pub d_range: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PlanOutcome {
    Feasible { distance: f64, achieved_pd: f64 },
    Infeasible { best_distance: f64, best_pd: f64 },
}

const BAND_SAMPLES: usize = 65;
const MONOTONE_SAMPLES: usize = 65;
const PD_SLACK: f64 = 1e-12;

impl PlanRequest {
    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.delta_band;
        if !(lo >= 0.0 && lo <= hi) {
            return Err(Error::invalid("delta_band", "need 0 <= lo <= hi"));
        }
        let (dlo, dhi) = self.d_range;
        if !(dlo > 0.0 && dlo <= dhi) {
            return Err(Error::invalid("d_range", "need 0 < lo <= hi"));
        }
        if !(0.0..=1.0).contains(&self.target_pd) {
            return Err(Error::invalid("target_pd", "must lie in [0, 1]"));
        }
        Ok(())
    }

    fn band(&self) -> Vec<f64> {
        let (lo, hi) = self.delta_band;
        (0..BAND_SAMPLES)
            .map(|k| lo + (hi - lo) * k as f64 / (BAND_SAMPLES - 1) as f64)
            .collect()
    }

    /// Smallest average energy over the band at link length `d`.
    fn min_energy(&self, band: &[f64], d: f64) -> Result<f64> {
        let base = ReflectionParams::new(self.gamma, self.eta, 0.0)?;
        band.iter().try_fold(f64::INFINITY, |m, &delta| {
            Ok(m.min(average_energy(&base.with_delta(delta)?, d, self.channels)))
        })
    }

    fn min_pd(&self, band: &[f64], d: f64, threshold: f64) -> Result<f64> {
        prob_detection(self.channels, self.sigma, self.min_energy(band, d)?, threshold)
    }
}

/// Shortest link length in `d_range` whose worst-case `P_d` over the
/// `Δ` band reaches `target_pd`, using the mean two-harmonic energy.
pub fn plan_distance(req: &PlanRequest) -> Result<PlanOutcome> {
    req.validate()?;
    let threshold = threshold_for_pf(req.channels, req.sigma, req.pf)?;
    let band = req.band();
    let (dlo, dhi) = req.d_range;

    let mut prev = f64::NEG_INFINITY;
    for k in 0..MONOTONE_SAMPLES {
        let d = dlo + (dhi - dlo) * k as f64 / (MONOTONE_SAMPLES - 1) as f64;
        let e = req.min_energy(&band, d)?;
        if e < prev * (1.0 - 1e-12) {
            return Err(Error::Monotonicity(format!(
                "band energy drops from {prev:.6e} to {e:.6e} at d = {d:.4} m"
            )));
        }
        prev = e;
    }

    let pd_lo = req.min_pd(&band, dlo, threshold)?;
    if pd_lo + PD_SLACK >= req.target_pd {
        return Ok(PlanOutcome::Feasible {
            distance: dlo,
            achieved_pd: pd_lo,
        });
    }
    let pd_hi = req.min_pd(&band, dhi, threshold)?;
    if pd_hi + PD_SLACK < req.target_pd {
        return Ok(PlanOutcome::Infeasible {
            best_distance: dhi,
            best_pd: pd_hi,
        });
    }
    let (mut lo, mut hi, mut pd_at_hi) = (dlo, dhi, pd_hi);
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        let pd = req.min_pd(&band, mid, threshold)?;
        if pd + PD_SLACK >= req.target_pd {
            hi = mid;
            pd_at_hi = pd;
        } else {
            lo = mid;
        }
    }
    Ok(PlanOutcome::Feasible {
        distance: hi,
        achieved_pd: pd_at_hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig_geom() -> LinkGeometry {
        LinkGeometry::new(Point::new(0.0, 0.0), Point::new(3.0, 0.0)).unwrap()
    }

    #[test]
    fn grid_counts() {
        let g = GridSpec::new((0.0, 4.0), (-1.5, 1.5), 0.02).unwrap();
        assert_eq!((g.nx(), g.ny()), (200, 150));
        assert!(GridSpec::new((0.0, 0.0), (0.0, 1.0), 0.1).is_err());
        assert!(GridSpec::new((0.0, 1.0), (0.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn no_reflection_gives_false_alarm_everywhere() {
        let g = GridSpec::new((0.0, 3.0), (0.0, 1.0), 0.25).unwrap();
        let m = pd_map(&fig_geom(), &g, 0.0, 3.0, &ChannelSet::default(), 0.5, 6e-6).unwrap();
        for c in &m.cells {
            assert_relative_eq!(c.pd, 6e-6, max_relative = 1e-6);
        }
    }

    #[test]
    fn symmetric_about_los_and_depends_only_on_delta() {
        let g = GridSpec::new((-0.5, 3.5), (-1.0, 1.0), 0.1).unwrap();
        let m = pd_map(&fig_geom(), &g, 0.35, 3.0, &ChannelSet::default(), 0.5, 6e-6).unwrap();
        for j in 0..m.ny {
            for i in 0..m.nx {
                let a = m.cell(i, j);
                let b = m.cell(i, m.ny - 1 - j);
                assert_relative_eq!(a.pd, b.pd, max_relative = 1e-9, epsilon = 1e-15);
                let c = m.cell(m.nx - 1 - i, j);
                assert_relative_eq!(a.pd, c.pd, max_relative = 1e-9, epsilon = 1e-15);
            }
        }
        assert!(m.cells.iter().all(|c| (0.0..=1.0).contains(&c.pd)));
        assert!(m.to_csv().lines().count() == m.cells.len() + 1);
    }

    #[test]
    fn los_cells_flagged() {
        let g = GridSpec::new((1.0, 2.0), (-0.05, 0.05), 0.1).unwrap();
        let m = pd_map(&fig_geom(), &g, 0.35, 3.0, &ChannelSet::default(), 0.5, 6e-6).unwrap();
        assert!(m.cells.iter().all(|c| !c.valid));
    }

    fn request(target_pd: f64, sigma: f64) -> PlanRequest {
        PlanRequest {
            target_pd,
            pf: 6e-6,
            delta_band: (0.5, 2.0),
            gamma: 0.35,
            eta: 3.0,
            channels: 16,
            sigma,
            d_range: (0.5, 50.0),
        }
    }

    #[test]
    fn trivial_target_takes_range_minimum() {
        match plan_distance(&request(6e-6, 0.5)).unwrap() {
            PlanOutcome::Feasible { distance, .. } => assert_eq!(distance, 0.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip() {
        let req = request(0.9, 0.5);
        let PlanOutcome::Feasible { distance, achieved_pd } = plan_distance(&req).unwrap() else {
            panic!("expected feasible");
        };
        assert!(distance > 0.5);
        let threshold = threshold_for_pf(16, 0.5, 6e-6).unwrap();
        let check = req.min_pd(&req.band(), distance, threshold).unwrap();
        assert!(check >= 0.9 - 1e-6);
        assert_relative_eq!(check, achieved_pd, max_relative = 1e-12);
        let shorter = req.min_pd(&req.band(), distance * 0.99, threshold).unwrap();
        assert!(shorter < 0.9);
    }

    #[test]
    fn unattainable_target() {
        match plan_distance(&request(1.0 - 1e-12, 20.0)).unwrap() {
            PlanOutcome::Infeasible { best_pd, .. } => assert!(best_pd < 1.0 - 1e-12),
            other => panic!("{other:?}"),
        }
    }
}
