//! Exact, two-term closed-form and average reflected energy against Δ.

use rss_reflect::energy::{energy, ChannelSet, EnergyMode};
use rss_reflect::model::ReflectionParams;

fn main() -> rss_reflect::Result<()> {
    let channels = ChannelSet::default();
    println!("{:>8} {:>12} {:>12} {:>12}", "delta_m", "exact", "two_term", "average");
    for k in 1..=20 {
        let delta = 0.1 * k as f64;
        let p = ReflectionParams::new(0.7, 3.0, delta)?;
        let e = |mode| energy(&p, 3.0, &channels, mode).map(|v| v.value);
        println!(
            "{delta:8.2} {:12.4} {:12.4} {:12.4}",
            e(EnergyMode::Exact)?,
            e(EnergyMode::ClosedTwoTerm)?,
            e(EnergyMode::Average)?
        );
    }
    Ok(())
}
