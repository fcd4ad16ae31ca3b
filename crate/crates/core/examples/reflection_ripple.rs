//! RSS ripple across the 16-channel plan for a person at a few excess path
//! lengths, and how much of its power the first two harmonics carry.

use rss_reflect::energy::ChannelSet;
use rss_reflect::model::{harmonic_power_fraction, signal_power, zeta, ReflectionParams, ZetaMode};

fn main() -> rss_reflect::Result<()> {
    let channels = ChannelSet::default();
    let d = 3.0;
    for delta in [0.05, 0.4, 1.5] {
        let p = ReflectionParams::new(0.35, 3.0, delta)?;
        let ripple: Vec<String> = channels
            .betas()
            .map(|b| format!("{:+.2}", zeta(&p, d, b, ZetaMode::Closed)))
            .collect();
        println!("Δ = {delta:4} m  ζ [dB]: {}", ripple.join(" "));
        println!(
            "           P_ζ = {:.3} dB², two harmonics carry {:.2}%",
            signal_power(&p, d),
            100.0 * harmonic_power_fraction(&p, d)
        );
    }
    Ok(())
}
