//! Generalized Marcum Q function through its Bessel series.
//!
//! Kept independent of the Poisson/incomplete-gamma route in `chi2` so the
//! two can check each other for even degrees of freedom.

/// Exponentially scaled modified Bessel functions `e^{−z}·I_k(z)` for
/// `k = 0..=max_order`, by Miller's backward recurrence
/// `I_{k−1} = I_{k+1} + (2k/z)·I_k`, normalized with
/// `e^{z} = I_0(z) + 2·Σ_{k≥1} I_k(z)`.
pub fn bessel_i_scaled(z: f64, max_order: usize) -> Vec<f64> {
    assert!(z >= 0.0);
    let mut out = vec![0.0; max_order + 1];
    if z == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = max_order.max(z.ceil() as usize) + 60 + (8.0 * z.sqrt()).ceil() as usize;
    let mut values = vec![0.0; start + 2];
    values[start] = 1e-300;
    for k in (1..=start).rev() {
        values[k - 1] = values[k + 1] + (2.0 * k as f64 / z) * values[k];
        if values[k - 1] > 1e250 {
            for v in values[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let norm = values[0] + 2.0 * values[1..].iter().sum::<f64>();
    for (o, v) in out.iter_mut().zip(values.iter()) {
        *o = v / norm;
    }
    out
}

/// `Q_M(a, b) = e^{−(a²+b²)/2} Σ_{k=1−M}^{∞} (a/b)ᵏ I_k(ab)` for integer `M ≥ 1`.
pub fn marcum_q(m: u32, a: f64, b: f64) -> f64 {
    assert!(m >= 1 && a >= 0.0 && b >= 0.0);
    if b == 0.0 {
        return 1.0;
    }
    if a == 0.0 {
        // Q_M(0, b) = e^{−b²/2} Σ_{k<M} (b²/2)ᵏ/k!
        let x = 0.5 * b * b;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..m {
            term *= x / k as f64;
            sum += term;
        }
        return (-x).exp() * sum;
    }
    let z = a * b;
    let lambda = 0.5 * a * a;
    let span = lambda + z;
    let max_order = (span + 15.0 * span.sqrt() + 60.0 + m as f64).ceil() as usize;
    let scaled = bessel_i_scaled(z, max_order);
    let ln_ratio = (a / b).ln();
    let shift = -0.5 * (a - b) * (a - b);

    let mut sum = 0.0;
    for k in (1 - m as i64)..=(max_order as i64) {
        let bessel = scaled[k.unsigned_abs() as usize];
        if bessel == 0.0 {
            continue;
        }
        sum += (k as f64 * ln_ratio + bessel.ln() + shift).exp();
    }
    sum.clamp(0.0, 1.0)
}
