//! Detection probability against false-alarm rate for several channel
//! counts at a fixed per-channel SNR.

use rss_reflect::detector::{roc_point, threshold_for_pf};

fn main() -> rss_reflect::Result<()> {
    let snr = 2.0;
    println!("threshold for C = 16, σ = 1, P_f = 6e-6: {:.4}", threshold_for_pf(16, 1.0, 6e-6)?);
    println!("{:>10} {:>8} {:>8} {:>8} {:>8}", "pf", "C=2", "C=4", "C=8", "C=16");
    for exp in (-8..=-1).rev() {
        let pf = 10f64.powi(exp);
        let row: Vec<String> = [2usize, 4, 8, 16]
            .iter()
            .map(|&c| roc_point(c, 1.0, snr * c as f64, pf).map(|pd| format!("{pd:8.4}")))
            .collect::<Result<_, _>>()?;
        println!("{pf:10.0e} {}", row.join(" "));
    }
    Ok(())
}
