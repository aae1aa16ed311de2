//! Familywise error control for smooth fields.
//!
//! The central approximation is P(sup Y > h) ≈ E χ(A_h) = Σ_d μ_d ρ_d(h):
//! intrinsic volumes of the search region times Euler characteristic
//! densities of the field. Alongside it sit the Bonferroni bound, the Rice
//! upcrossing rate for 1D processes and the Poisson clumping heuristic.

use core::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::grid::{Family, FieldSpec};
use crate::normal;
use crate::quad;
use crate::smoothing::Kernel1D;
use crate::topology::IntrinsicVolumes;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExpectedEC,
    Bonferroni,
    PoissonClump,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    /// Threshold on the scale of the statistic.
    pub h: f64,
    pub alpha_achieved: f64,
    pub method: Method,
}

/// EC density ρ_d(h) of a unit-variance field.
///
/// Gaussian fields support d ≤ 3 and any h. F-fields support d ≤ 2, h ≥ 0
/// and need α + β > 3.
pub fn ec_density(spec: &FieldSpec, d: usize, h: f64) -> Result<f64> {
    if h.is_nan() {
        return Err(invalid!("threshold is NaN"));
    }
    let lambda = spec.lambda();
    match spec.family() {
        Family::Gaussian if h.is_infinite() && d <= 3 => Ok(if d == 0 && h < 0.0 { 1.0 } else { 0.0 }),
        Family::Gaussian => {
            let g = libm::exp(-0.5 * h * h);
            match d {
                0 => Ok(normal::sf(h)),
                1 => Ok(libm::sqrt(lambda) * g / (2.0 * PI)),
                2 => Ok(lambda * h * g / libm::pow(2.0 * PI, 1.5)),
                3 => Ok(libm::pow(lambda, 1.5) * (h * h - 1.0) * g / (4.0 * PI * PI)),
                _ => Err(Error::UnsupportedCombination(alloc::format!(
                    "Gaussian EC density of dimension {d}"
                ))),
            }
        }
        Family::F { alpha, beta } => f_density(alpha as f64, beta as f64, lambda, d, h),
    }
}

fn f_density(a: f64, b: f64, lambda: f64, d: usize, h: f64) -> Result<f64> {
    if d > 2 {
        return Err(Error::UnsupportedCombination(alloc::format!(
            "F-field EC density of dimension {d}"
        )));
    }
    if a + b <= 3.0 {
        return Err(invalid!("F-field needs α + β > 3, got α = {a}, β = {b}"));
    }
    if h < 0.0 {
        return Err(invalid!("F-field threshold must be ≥ 0, got {h}"));
    }
    if h == f64::INFINITY {
        return Ok(0.0);
    }
    let ln_beta_fn = libm::lgamma(a / 2.0) + libm::lgamma(b / 2.0);
    let x = a * h / b;
    match d {
        0 => {
            if h == 0.0 {
                return Ok(1.0);
            }
            let ln_c = libm::lgamma((a + b) / 2.0) - ln_beta_fn + libm::log(a / b);
            let pdf = |t: f64| {
                let y = a * t / b;
                libm::exp(ln_c + (a - 2.0) / 2.0 * libm::log(y) - (a + b) / 2.0 * libm::log1p(y))
            };
            Ok(quad::integrate_to_infinity(pdf, h, 1e-9, 1e-300).min(1.0))
        }
        1 => {
            let c = libm::exp(libm::lgamma((a + b - 1.0) / 2.0) - ln_beta_fn) * libm::sqrt(2.0)
                / libm::sqrt(2.0 * PI);
            let tail = libm::pow(1.0 + x, -(a + b - 2.0) / 2.0);
            Ok(libm::sqrt(lambda) * c * libm::pow(x, (a - 1.0) / 2.0) * tail)
        }
        _ => {
            let c = libm::exp(libm::lgamma((a + b - 2.0) / 2.0) - ln_beta_fn);
            let tail = libm::pow(1.0 + x, -(a + b - 2.0) / 2.0);
            // x^{(α−2)/2}·[(β−1)x − (α−1)], expanded so α = 1 stays finite at x = 0.
            let lead = (b - 1.0) * libm::pow(x, a / 2.0);
            let trail = if a == 1.0 { 0.0 } else { (a - 1.0) * libm::pow(x, (a - 2.0) / 2.0) };
            Ok(lambda / (2.0 * PI) * c * tail * (lead - trail))
        }
    }
}

/// Σ_d μ_d ρ_d(h). Terms with μ_d = 0 are skipped.
pub fn expected_ec(iv: &IntrinsicVolumes, spec: &FieldSpec, h: f64) -> Result<f64> {
    let mut total = 0.0;
    for (d, &mu) in iv.mu().iter().enumerate() {
        if mu != 0.0 {
            total += mu * ec_density(spec, d, h)?;
        }
    }
    Ok(total)
}

/// Expected EC clamped to [0, 1].
pub fn corrected_pvalue(iv: &IntrinsicVolumes, spec: &FieldSpec, h_observed: f64) -> Result<f64> {
    Ok(expected_ec(iv, spec, h_observed)?.clamp(0.0, 1.0))
}

fn statistic_mode(spec: &FieldSpec) -> f64 {
    match spec.family() {
        Family::Gaussian => 0.0,
        Family::F { alpha, beta } => {
            let (a, b) = (alpha as f64, beta as f64);
            if alpha > 2 {
                (a - 2.0) / a * b / (b + 2.0)
            } else {
                0.0
            }
        }
    }
}

/// Solves Σ μ_d ρ_d(h) = α by bisection.
///
/// The bracket starts at h_lo = max(1, mode of the statistic) and doubles its
/// upper end until the expected EC falls below α. The expected EC must be
/// strictly decreasing at both ends.
pub fn rft_threshold(iv: &IntrinsicVolumes, spec: &FieldSpec, alpha: f64) -> Result<ThresholdResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid!("alpha must lie in (0, 1), got {alpha}"));
    }
    let e = |h: f64| expected_ec(iv, spec, h);
    let mut lo = statistic_mode(spec).max(1.0);
    let e_lo = e(lo)?;
    if e_lo < alpha {
        return Err(Error::RegimeViolation {
            floor: lo,
            expected_ec: e_lo,
            alpha,
        });
    }
    let mut hi = 2.0 * lo;
    while e(hi)? >= alpha {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(invalid!("expected EC stays above {alpha} up to h = {hi}"));
        }
    }
    let step = |h: f64| 1e-6 * h.max(1.0);
    if !(e(lo + step(lo))? < e_lo) {
        return Err(invalid!("expected EC is not decreasing at the bracket floor h = {lo}"));
    }
    let e_hi = e(hi)?;
    let e_below = e(hi - step(hi))?;
    if !(e_hi < e_below || (e_hi == 0.0 && e_below == 0.0)) {
        return Err(invalid!("expected EC is not decreasing at the bracket ceiling h = {hi}"));
    }

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = e(mid)?;
        if v == alpha {
            lo = mid;
            hi = mid;
            break;
        }
        if v > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (v_lo, v_hi) = (e(lo)?, e(hi)?);
    let (h, v) = if (v_lo - alpha).abs() <= (v_hi - alpha).abs() {
        (lo, v_lo)
    } else {
        (hi, v_hi)
    };
    if (v - alpha).abs() > 1e-8 {
        return Err(invalid!("threshold solver stalled at h = {h} with expected EC {v}"));
    }
    Ok(ThresholdResult {
        h,
        alpha_achieved: v.clamp(0.0, 1.0),
        method: Method::ExpectedEC,
    })
}

/// Φ⁻¹(1 − α/n) on the standard normal scale.
pub fn bonferroni_threshold(alpha: f64, n_tests: u64) -> Result<ThresholdResult> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid!("alpha must lie in (0, 1], got {alpha}"));
    }
    if n_tests == 0 {
        return Err(invalid!("need at least one test"));
    }
    let p = alpha / n_tests as f64;
    if p == 0.0 {
        return Err(invalid!("alpha / n = {alpha} / {n_tests} underflows"));
    }
    Ok(ThresholdResult {
        h: normal::upper_quantile(p),
        alpha_achieved: alpha,
        method: Method::Bonferroni,
    })
}

/// Spectral moments of a stationary 1D process: R0 = R(0) and R2 = −R″(0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiceInputs {
    r0: f64,
    r2: f64,
}

impl RiceInputs {
    pub fn new(r0: f64, r2: f64) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite()) || !(r2 >= 0.0 && r2.is_finite()) {
            return Err(invalid!("need R0 > 0 and R2 ≥ 0, got R0 = {r0}, R2 = {r2}"));
        }
        Ok(Self { r0, r2 })
    }

    /// Moments of white noise of sd `sigma_w` sampled at spacing `delta` and
    /// smoothed with `kernel`. R2 is taken from first differences, i.e. the
    /// variance of (X[i+1] − X[i])/δ.
    pub fn from_kernel(kernel: &Kernel1D, sigma_w: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(invalid!("lattice spacing must be positive, got {delta}"));
        }
        let taps = kernel.taps();
        let mut diff2 = taps[0] * taps[0] + taps[taps.len() - 1] * taps[taps.len() - 1];
        for w in taps.windows(2) {
            diff2 += (w[1] - w[0]) * (w[1] - w[0]);
        }
        let s2 = sigma_w * sigma_w;
        Self::new(s2 * kernel.sum_of_squares(), s2 * diff2 / (delta * delta))
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }
}

/// Expected upcrossings of level `h` per unit length:
/// (1/2π)·√(R2/R0)·exp(−h²/(2R0)).
pub fn rice_expected_upcrossings(inputs: &RiceInputs, h: f64) -> f64 {
    libm::sqrt(inputs.r2 / inputs.r0) * libm::exp(-h * h / (2.0 * inputs.r0)) / (2.0 * PI)
}

/// P(sup Y < h) ≈ exp(−(‖M‖ / E‖A_h‖)·P(Y ≥ h)).
pub fn poisson_clump_sup_prob(vol_m: f64, mean_clump: f64, marginal_tail: f64) -> Result<f64> {
    if !(vol_m > 0.0 && vol_m.is_finite()) {
        return Err(invalid!("region volume must be positive, got {vol_m}"));
    }
    if !(mean_clump > 0.0 && mean_clump.is_finite()) {
        return Err(invalid!("mean clump size must be positive, got {mean_clump}"));
    }
    if !(0.0..=1.0).contains(&marginal_tail) {
        return Err(invalid!("marginal tail probability must lie in [0, 1], got {marginal_tail}"));
    }
    Ok(libm::exp(-(vol_m / mean_clump) * marginal_tail))
}

/// Threshold h with 1 − [`poisson_clump_sup_prob`] = α for a Gaussian marginal.
pub fn poisson_clump_threshold(vol_m: f64, mean_clump: f64, alpha: f64) -> Result<ThresholdResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid!("alpha must lie in (0, 1), got {alpha}"));
    }
    poisson_clump_sup_prob(vol_m, mean_clump, 0.0)?;
    // exp(−(V/c)·q) = 1 − α  ⇔  q = −ln(1 − α)·c/V
    let q = -libm::log1p(-alpha) * mean_clump / vol_m;
    if q >= 1.0 {
        return Err(invalid!("clump ratio too small: every threshold reaches alpha = {alpha}"));
    }
    let h = normal::upper_quantile(q);
    let achieved = 1.0 - poisson_clump_sup_prob(vol_m, mean_clump, normal::sf(h))?;
    Ok(ThresholdResult {
        h,
        alpha_achieved: achieved.clamp(0.0, 1.0),
        method: Method::PoissonClump,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const LAMBDA: f64 = 0.027_725_887_222_397_812;

    fn iv(mu: &[f64]) -> IntrinsicVolumes {
        IntrinsicVolumes::new(mu.to_vec()).unwrap()
    }

    fn gauss(lambda: f64) -> FieldSpec {
        FieldSpec::gaussian(lambda).unwrap()
    }

    #[test]
    fn gaussian_density_identities() {
        let s = gauss(1.0);
        assert_eq!(ec_density(&s, 0, 0.0).unwrap(), 0.5);
        assert_eq!(ec_density(&s, 2, 0.0).unwrap(), 0.0);
        assert_eq!(ec_density(&s, 3, 1.0).unwrap(), 0.0);
        assert!((ec_density(&s, 1, 0.0).unwrap() - 0.159_154_943_091_895_34).abs() < 1e-16);
        assert!(ec_density(&s, 4, 0.0).is_err());
        for d in 0..4 {
            assert!(ec_density(&s, d, 40.0).unwrap().abs() < 1e-300);
        }
    }

    #[test]
    fn expected_ec_reference_values() {
        // Direct high-precision evaluation of the closed-form sum.
        let table = [
            (1.0, 14.050_864_6),
            (2.0, 5.504_986_903_882_469),
            (2.5, 2.172_768_069_882_369),
            (3.0, 0.646_924_002_742_447_3),
            (3.5, 0.146_608_194_522_515_8),
            (3.81, 0.051_054_218_712_816_68),
        ];
        let region = iv(&[1.0, 200.0, 10000.0]);
        for (h, want) in table {
            let got = expected_ec(&region, &gauss(LAMBDA), h).unwrap();
            assert!((got - want).abs() < 1e-7 * want, "h={h}: {got} vs {want}");
        }
        let point = iv(&[1.0, 0.0, 0.0, 0.0]);
        for h in [-2.0, 0.0, 1.3, 5.0] {
            assert_eq!(expected_ec(&point, &gauss(LAMBDA), h).unwrap(), normal::sf(h));
        }
        assert_eq!(expected_ec(&region, &gauss(LAMBDA), f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn threshold_inversion() {
        let point = rft_threshold(&iv(&[1.0, 0.0, 0.0, 0.0]), &gauss(LAMBDA), 0.05).unwrap();
        assert!((point.h - 1.644_853_626_951_472_7).abs() < 1e-8);
        let region = iv(&[1.0, 200.0, 10000.0]);
        let t = rft_threshold(&region, &gauss(LAMBDA), 0.05).unwrap();
        assert!((t.h - 3.815_843_770_552_645).abs() < 1e-8, "{}", t.h);
        assert_eq!(t.method, Method::ExpectedEC);
        assert!((t.alpha_achieved - 0.05).abs() < 1e-10);
        let half = rft_threshold(&region, &gauss(LAMBDA), 0.5).unwrap();
        assert!((half.h - 3.093_703_595_644_579).abs() < 1e-8);
        assert!(rft_threshold(&region, &gauss(LAMBDA), 0.0).is_err());
        assert!(rft_threshold(&region, &gauss(LAMBDA), 1.0).is_err());
        let err = rft_threshold(&iv(&[1.0, 0.0, 0.0, 0.0]), &gauss(LAMBDA), 0.5).unwrap_err();
        assert!(matches!(err, Error::RegimeViolation { floor, .. } if floor == 1.0));
    }

    #[test]
    fn bonferroni_values() {
        let b = bonferroni_threshold(0.05, 10000).unwrap();
        assert!((b.h - 4.417_173_413_469_022).abs() < 1e-9);
        assert!((bonferroni_threshold(0.05, 1).unwrap().h - 1.644_853_626_951_472_7).abs() < 1e-12);
        assert_eq!(bonferroni_threshold(0.5, 1).unwrap().h, 0.0);
        assert_eq!(bonferroni_threshold(1.0, 1).unwrap().h, f64::NEG_INFINITY);
        assert!(bonferroni_threshold(0.0, 1).is_err());
        assert!(bonferroni_threshold(1.5, 1).is_err());
        assert!(bonferroni_threshold(0.05, 0).is_err());
        assert!(bonferroni_threshold(1e-320, u64::MAX).is_err());
    }

    #[test]
    fn threshold_ordering() {
        let rft = rft_threshold(&iv(&[1.0, 200.0, 10000.0]), &gauss(LAMBDA), 0.05).unwrap().h;
        let pointwise = bonferroni_threshold(0.05, 1).unwrap().h;
        let bonf = bonferroni_threshold(0.05, 10000).unwrap().h;
        assert!(pointwise < rft && rft < bonf);
    }

    #[test]
    fn corrected_pvalues() {
        let region = iv(&[1.0, 200.0, 10000.0]);
        let s = gauss(LAMBDA);
        assert_eq!(corrected_pvalue(&region, &s, 1.0).unwrap(), 1.0);
        assert_eq!(corrected_pvalue(&region, &s, f64::INFINITY).unwrap(), 0.0);
        assert!((corrected_pvalue(&region, &s, 3.81).unwrap() - 0.05).abs() < 0.002);
    }

    // P(F > h) from frozen high-precision evaluations of the regularized
    // incomplete beta function; (2, 2) has the closed form 1/(1 + h).
    const F_TAIL: [((u32, u32), [f64; 4]); 4] = [
        ((3, 20), [0.686_518_612_836_403, 0.413_251_914_062_460_02, 0.146_438_803_086_621_53, 0.022_076_999_662_362_43]),
        ((5, 30), [0.773_733_593_703_594_9, 0.434_648_876_339_873_3, 0.107_335_318_104_958_75, 0.006_718_691_880_624_617]),
        ((1, 10), [0.495_647_504_383_119_94, 0.340_893_132_302_059_87, 0.187_669_870_869_603, 0.073_388_034_770_740_37]),
        ((2, 2), [2.0 / 3.0, 0.5, 1.0 / 3.0, 0.2]),
    ];

    #[test]
    fn f_density_zero_is_the_f_tail() {
        for ((a, b), tails) in F_TAIL {
            if a + b <= 3 {
                continue;
            }
            let s = FieldSpec::f(a, b, 1.0).unwrap();
            for (h, want) in [0.5, 1.0, 2.0, 4.0].into_iter().zip(tails) {
                let got = ec_density(&s, 0, h).unwrap();
                assert!((got - want).abs() < 1e-9, "F({a},{b}) h={h}: {got} vs {want}");
            }
            assert_eq!(ec_density(&s, 0, 0.0).unwrap(), 1.0);
        }
        let s = FieldSpec::f(2, 2, 1.0).unwrap();
        assert!(ec_density(&s, 0, -0.1).is_err());
        assert!(ec_density(&s, 3, 1.0).is_err());
        assert!(ec_density(&FieldSpec::f(1, 2, 1.0).unwrap(), 0, 1.0).is_err());
    }

    #[test]
    fn f_densities_approach_squared_gaussian() {
        // With α = 1 and β → ∞ the F-field tends to Z², whose excursion set
        // above u is {|Z| > √u}: two Gaussian excursions.
        let lambda = 0.7;
        let s = FieldSpec::f(1, 4_000_000, lambda).unwrap();
        let g = gauss(lambda);
        for u in [0.5f64, 2.0, 6.0] {
            for d in 0..3 {
                let f = ec_density(&s, d, u).unwrap();
                let z = 2.0 * ec_density(&g, d, u.sqrt()).unwrap();
                assert!((f - z).abs() < 1e-5 * z.abs().max(1e-3), "d={d} u={u}: {f} vs {z}");
            }
        }
    }

    #[test]
    fn f_densities_at_zero_are_finite() {
        for (a, b) in [(1, 10), (2, 10), (3, 10)] {
            let s = FieldSpec::f(a, b, 1.0).unwrap();
            for d in 0..3 {
                assert!(ec_density(&s, d, 0.0).unwrap().is_finite());
            }
        }
    }

    #[test]
    fn f_thresholds() {
        // A single point reduces the expansion to the F upper quantile.
        let s = FieldSpec::f(8, 40, LAMBDA).unwrap();
        let t = rft_threshold(&iv(&[1.0, 0.0, 0.0]), &s, 0.05).unwrap();
        assert!((t.h - 2.180_170_453_200_639_6).abs() < 1e-7, "{}", t.h);
        // On a large region the F expansion still rises at h = 1, so the
        // bracket check refuses rather than returning a spurious root.
        let err = rft_threshold(&iv(&[1.0, 200.0, 10000.0]), &s, 0.05).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn rice_formula() {
        let unit = RiceInputs::new(1.0, 1.0).unwrap();
        assert!((rice_expected_upcrossings(&unit, 0.0) - 1.0 / (2.0 * PI)).abs() < 1e-16);
        assert!(rice_expected_upcrossings(&unit, 2.0) < rice_expected_upcrossings(&unit, 1.0));
        let flat = RiceInputs::new(2.0, 0.0).unwrap();
        assert_eq!(rice_expected_upcrossings(&flat, 0.3), 0.0);
        assert!(RiceInputs::new(0.0, 1.0).is_err());
        assert!(RiceInputs::new(1.0, -1.0).is_err());
        // Kernel moments approach 1/(2σ²) relative to R0 for wide kernels.
        let p = crate::smoothing::smoothness_params(crate::smoothing::Smoothness::Fwhm(20.0)).unwrap();
        let k = crate::smoothing::gaussian_kernel_1d(&p, 1.0).unwrap();
        let r = RiceInputs::from_kernel(&k, 1.0, 1.0).unwrap();
        // Lattice correlation at lag δ is exp(−λδ²/2).
        let lag_one = 2.0 * (1.0 - (-p.lambda() / 2.0).exp());
        assert!((r.r2() / r.r0() / lag_one - 1.0).abs() < 1e-5, "{}", r.r2() / r.r0() / lag_one);
        let r3 = RiceInputs::from_kernel(&k, 3.0, 1.0).unwrap();
        assert!((r3.r0() / r.r0() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn poisson_clumping() {
        assert_eq!(poisson_clump_sup_prob(10.0, 2.0, 0.0).unwrap(), 1.0);
        assert!((poisson_clump_sup_prob(3.0, 3.0, 1.0).unwrap() - 0.367_879_441_171_442_33).abs() < 1e-15);
        assert!(poisson_clump_sup_prob(1.0, 0.0, 0.5).is_err());
        assert!(poisson_clump_sup_prob(0.0, 1.0, 0.5).is_err());
        assert!(poisson_clump_sup_prob(1.0, 1.0, 1.5).is_err());
        let t = poisson_clump_threshold(10000.0, 20.0, 0.05).unwrap();
        assert_eq!(t.method, Method::PoissonClump);
        assert!((t.alpha_achieved - 0.05).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn densities_scale_with_lambda(lambda in 1e-4f64..10.0, h in -4.0f64..6.0, d in 1usize..4) {
            let one = ec_density(&gauss(lambda), d, h).unwrap();
            let two = ec_density(&gauss(2.0 * lambda), d, h).unwrap();
            if one != 0.0 {
                prop_assert!((two / one - libm::pow(2.0, d as f64 / 2.0)).abs() < 1e-12);
            }
        }

        #[test]
        fn f_densities_scale_with_lambda(lambda in 1e-3f64..10.0, h in 0.1f64..8.0, d in 1usize..3) {
            let one = ec_density(&FieldSpec::f(4, 25, lambda).unwrap(), d, h).unwrap();
            let two = ec_density(&FieldSpec::f(4, 25, 2.0 * lambda).unwrap(), d, h).unwrap();
            if one != 0.0 {
                prop_assert!((two / one - libm::pow(2.0, d as f64 / 2.0)).abs() < 1e-12);
            }
        }

        #[test]
        fn threshold_round_trips(alpha in 0.001f64..0.2, side in 20.0f64..300.0) {
            let region = iv(&[1.0, 2.0 * side, side * side]);
            let t = rft_threshold(&region, &gauss(LAMBDA), alpha).unwrap();
            prop_assert!((corrected_pvalue(&region, &gauss(LAMBDA), t.h).unwrap() - alpha).abs() < 1e-6);
        }

        #[test]
        fn bonferroni_is_monotone(alpha in 0.001f64..0.9, n in 1u64..1_000_000) {
            let base = bonferroni_threshold(alpha, n).unwrap().h;
            prop_assert!(bonferroni_threshold(alpha, n + 1).unwrap().h > base);
            prop_assert!(bonferroni_threshold(alpha * 1.01, n).unwrap().h < base);
        }
    }

    #[test]
    fn expected_ec_over_a_ball() {
        let ball = crate::topology::closed_form_intrinsic_volumes(&crate::topology::Shape::Ball(5.0)).unwrap();
        let v = expected_ec(&ball, &gauss(LAMBDA), 3.0).unwrap();
        let manual: f64 = (0..4).map(|d| ball.mu()[d] * ec_density(&gauss(LAMBDA), d, 3.0).unwrap()).sum();
        assert_eq!(v, manual);
    }
}
