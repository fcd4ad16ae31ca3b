//! Synthetic grid walk through baseline, calibration and detection.

use rss_reflect::detector::DetectorConfig;
use rss_reflect::energy::{spread_indices, ChannelSet};
use rss_reflect::model::{LinkGeometry, Point, ReflectionParams};
use rss_reflect::pipeline::{
    calibrate_sigma, estimate_baseline, evaluate_trace, generate_trace, residual_windows, NoiseModel, Segment,
    SynthConfig, DEFAULT_SWEEP_PERIOD_S,
};

fn main() -> rss_reflect::Result<()> {
    let channels = ChannelSet::default();
    let geom = LinkGeometry::new(Point::new(0.0, 0.0), Point::new(3.0, 0.0))?;
    let params = ReflectionParams::new(0.35, 3.0, 0.0)?;

    let mut segments = vec![Segment::vacant(16, 3750)];
    for (i, y) in [0.1, 0.5, 1.0, 2.0].into_iter().enumerate() {
        segments.push(Segment::reflector(&params, &geom, Point::new(1.5, y), &channels, 300, format!("p{i}"))?);
    }
    let noise = NoiseModel::Skewed { sigma: 0.13, prob: 0.002, tail_mean: 0.5 };
    let trace = generate_trace(&SynthConfig::sloped(16, noise, DEFAULT_SWEEP_PERIOD_S, 1), &segments)?;
    let vacant: Vec<_> = trace.iter().filter(|r| r.point.is_none()).cloned().collect();
    let baseline = estimate_baseline(&vacant, 16)?;

    for c in [2, 4, 8, 16] {
        let subset = spread_indices(16, c)?;
        let (residuals, _) = residual_windows(&vacant, &baseline, &subset, DEFAULT_SWEEP_PERIOD_S)?;
        let cal = calibrate_sigma(&residuals, c, 6e-6)?;
        let det = DetectorConfig::new(c, cal.sigma_hat, 6e-6)?;
        let ev = evaluate_trace(&trace, &baseline, &det, &subset, DEFAULT_SWEEP_PERIOD_S)?;
        let ratios: Vec<String> = ev.points.iter().map(|p| format!("{}={:.3}", p.point, p.ratio)).collect();
        println!("C={c:2} σ={:.4} σ̂={:.4}  {}", cal.sigma, cal.sigma_hat, ratios.join(" "));
    }
    Ok(())
}
