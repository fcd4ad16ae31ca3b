//! Seeded Monte Carlo against the closed-form detector, and the
//! characteristic-function inversion for unequal noise variances.

use rss_reflect::detector::{prob_detection, threshold_for_pf};
use rss_reflect::energy::ChannelSet;
use rss_reflect::model::ReflectionParams;
use rss_reflect::simulate::{
    binomial_std, empirical_rates, sample_exceedance, sf_via_cf_inversion, QuadraticFormSpec, SimSpec,
};

fn main() -> rss_reflect::Result<()> {
    let channels = ChannelSet::default();
    let sigma = 0.5;
    let x = threshold_for_pf(16, sigma, 6e-6)?;
    let params = ReflectionParams::new(0.35, 3.0, 0.4)?;
    let spec = SimSpec::reflection(&params, 3.0, &channels, sigma, 200_000, 7)?;
    let rates = empirical_rates(&spec, x);
    let pd = prob_detection(16, sigma, spec.signal_energy(), x)?;
    println!(
        "P_d: simulated {:.4}, predicted {pd:.4} (±{:.4})",
        rates.detection_rate,
        binomial_std(pd, rates.trials)
    );

    let qf = QuadraticFormSpec::new(vec![0.3, 0.0, -0.2], vec![1.0, 2.0, 3.0])?;
    let inv = sf_via_cf_inversion(&qf, 5.0)?;
    let mc = sample_exceedance(&qf, 5.0, 1_000_000, 1);
    println!("P{{Σx² > 5}}: inversion {inv:.5}, sampling {mc:.5}");
    Ok(())
}
