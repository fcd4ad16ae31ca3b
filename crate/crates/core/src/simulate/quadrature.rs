//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

#![allow(clippy::excessive_precision)]

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// One 15-point Kronrod estimate with `|K15 − G7|` as the error estimate.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, &x) in XGK.iter().take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        // Gauss nodes sit at the odd Kronrod indices.
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// Integrates `f` over `[a, b]` by recursive bisection until each piece's
/// error estimate is below its share of `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> Integral {
    let (value, error) = gk15(f, a, b);
    refine(f, a, b, value, error, tol, max_depth)
}

fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    tol: f64,
    depth: u32,
) -> Integral {
    if error <= tol {
        return Integral {
            value,
            error,
            converged: true,
        };
    }
    if depth == 0 {
        return Integral {
            value,
            error,
            converged: false,
        };
    }
    let mid = 0.5 * (a + b);
    let (lv, le) = gk15(f, a, mid);
    let (rv, re) = gk15(f, mid, b);
    let left = refine(f, a, mid, lv, le, 0.5 * tol, depth - 1);
    let right = refine(f, mid, b, rv, re, 0.5 * tol, depth - 1);
    Integral {
        value: left.value + right.value,
        error: left.error + right.error,
        converged: left.converged && right.converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let r = integrate(&|x: f64| x.powi(5) - 2.0 * x, 0.0, 2.0, 1e-14, 10);
        assert_abs_diff_eq!(r.value, 64.0 / 6.0 - 4.0, epsilon = 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn oscillatory() {
        let r = integrate(&|x: f64| (20.0 * x).sin() * x, 0.0, PI, 1e-12, 30);
        // ∫₀^π x sin(20x) dx = −π/20
        assert_abs_diff_eq!(r.value, -PI / 20.0, epsilon = 1e-11);
    }

    #[test]
    fn peaked_integrand_converges() {
        let r = integrate(&|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-10, 40);
        let exact = 2.0 * (1.0 / 1e-2f64) * (1.0 / 1e-2f64).atan();
        assert!(r.converged);
        assert_abs_diff_eq!(r.value, exact, epsilon = 1e-8);
    }
}
