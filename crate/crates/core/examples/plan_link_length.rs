//! Shortest link that keeps P_d above a target for reflectors with
//! 0.5 m ≤ Δ ≤ 2 m.

use rss_reflect::spatial::{plan_distance, PlanOutcome, PlanRequest};

fn main() -> rss_reflect::Result<()> {
    for channels in [4, 8, 16] {
        let req = PlanRequest {
            target_pd: 0.95,
            pf: 6e-6,
            delta_band: (0.5, 2.0),
            gamma: 0.35,
            eta: 3.0,
            channels,
            sigma: 0.5,
            d_range: (0.5, 50.0),
        };
        match plan_distance(&req)? {
            PlanOutcome::Feasible { distance, achieved_pd } => {
                println!("C={channels:2}: d ≥ {distance:.3} m (P_d {achieved_pd:.4})")
            }
            PlanOutcome::Infeasible { best_pd, .. } => {
                println!("C={channels:2}: unreachable, best P_d {best_pd:.4}")
            }
        }
    }
    Ok(())
}
