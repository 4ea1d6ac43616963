use crate::Real;

// Acklam's rational approximation to the standard normal quantile
// (relative error ≈ 1.15e-9); only used for starting guesses.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];

fn poly<T: Real>(coeffs: &[f64], x: T) -> T {
    coeffs.iter().fold(T::zero(), |acc, &c| acc * x + T::c(c))
}

fn inv_std_normal<T: Real>(p: T) -> T {
    let p_low = T::c(0.02425);
    if p < p_low {
        let q = (T::c(-2.0) * p.ln()).sqrt();
        poly(&C, q) / (poly(&D, q) * q + T::one())
    } else if p <= T::one() - p_low {
        let q = p - T::c(0.5);
        let r = q * q;
        poly(&A, r) * q / (poly(&B, r) * r + T::one())
    } else {
        let q = (T::c(-2.0) * (T::one() - p).ln()).sqrt();
        -poly(&C, q) / (poly(&D, q) * q + T::one())
    }
}

/// `z` with `P(Z > z) = upper` for a standard normal `Z`.
pub fn inv_std_normal_upper<T: Real>(upper: T) -> T {
    -inv_std_normal(upper)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        assert!(inv_std_normal_upper(0.5_f64).abs() < 1e-9);
        assert!((inv_std_normal_upper(0.1_f64) - 1.281_551_565_544_6).abs() < 1e-8);
        assert!((inv_std_normal_upper(0.99_f64) + 2.326_347_874_040_8).abs() < 1e-8);
        assert!((inv_std_normal_upper(1e-6_f64) - 4.753_424_308_822_9).abs() < 1e-7);
    }
}
