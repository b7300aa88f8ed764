//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error estimate drops below `max(abs_tol, rel_tol * |result|)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::domain("quadrature", "tolerances must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::domain("quadrature", "max_subdivisions must be at least 1"));
        }
        Ok(())
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, error }
}

/// Adaptive integral of `f` over the finite interval `[a, b]`.
pub fn integrate_finite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain("integrate_finite", format!("bad interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let first = gauss_kronrod(&f, a, b);
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::with_capacity(spec.max_subdivisions + 1);
    heap.push(first);
    let mut subdivisions = 0;
    // Segments too narrow to split further leave the work queue but keep
    // contributing their value and error.
    let mut frozen_value = 0.0;
    let mut frozen_err = 0.0;

    while total_err > spec.abs_tol.max(spec.rel_tol * total.abs()) {
        let Some(worst) = heap.pop() else {
            // only frozen segments remain: the error sits at the roundoff floor
            break;
        };
        if !total.is_finite() {
            return Err(Error::Accuracy {
                estimate: total,
                error_bound: total_err,
                subdivisions,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a) <= 1e3 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) {
            frozen_value += worst.value;
            frozen_err += worst.error;
            continue;
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Accuracy {
                estimate: total,
                error_bound: total_err,
                subdivisions,
            });
        }
        subdivisions += 1;
        let left = gauss_kronrod(&f, worst.a, mid);
        let right = gauss_kronrod(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // resum now and then so the running totals do not drift
        if subdivisions % 64 == 0 {
            total = frozen_value + heap.iter().map(|s| s.value).sum::<f64>();
            total_err = frozen_err + heap.iter().map(|s| s.error).sum::<f64>();
        }
    }
    Ok(frozen_value + heap.iter().map(|s| s.value).sum::<f64>())
}

/// Adaptive integral of `f` over `[a, ∞)` via the substitution
/// `x = a + t / (1 - t)`, `t ∈ [0, 1)`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, a: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::domain("integrate_semi_infinite", format!("lower limit {a} must be finite")));
    }
    let g = |t: f64| {
        let s = 1.0 - t;
        let x = a + t / s;
        if x.is_finite() {
            f(x) / (s * s)
        } else {
            0.0
        }
    };
    integrate_finite(g, 0.0, 1.0, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_k;

    #[test]
    fn polynomial_is_exact() {
        let spec = QuadratureSpec::default();
        assert!((integrate_finite(|x| x, 0.0, 1.0, &spec).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(integrate_finite(|x| x, 2.0, 2.0, &spec).unwrap(), 0.0);
    }

    #[test]
    fn disk_pdf_normalizes() {
        let spec = QuadratureSpec::default();
        let r = 100.0;
        let v = integrate_finite(|z| 2.0 * z / (r * r), 0.0, r, &spec).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let h = 80.0;
        let top = (r * r + h * h).sqrt();
        let v = integrate_finite(|w| 2.0 * w / (r * r), h, top, &spec).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_reversed_interval() {
        assert!(integrate_finite(|x| x, 1.0, 0.0, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn log_singularity_converges() {
        // ∫_0^1 ln x dx = -1
        let v = integrate_finite(|x| x.ln(), 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((v + 1.0).abs() < 1e-8);
    }

    #[test]
    fn reports_non_convergence_with_estimate() {
        let spec = QuadratureSpec::new(1e-14, 1e-14, 3).unwrap();
        match integrate_finite(|x| (1.0 / x).sin(), 1e-4, 1.0, &spec) {
            Err(Error::Accuracy { estimate, subdivisions, .. }) => {
                assert!(estimate.is_finite());
                assert_eq!(subdivisions, 3);
            }
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(0.0, 1e-8, 10).is_err());
        assert!(QuadratureSpec::new(1e-10, 1e-8, 0).is_err());
    }

    #[test]
    fn semi_infinite_exponential_moments() {
        let spec = QuadratureSpec::default();
        let v0 = integrate_semi_infinite(|x| (-x).exp(), 0.0, &spec).unwrap();
        let v1 = integrate_semi_infinite(|x| x * (-x).exp(), 0.0, &spec).unwrap();
        assert!((v0 - 1.0).abs() < 1e-9);
        assert!((v1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn semi_infinite_reproduces_bessel_k_identity() {
        // ∫_0^∞ e^{-βx - γ/x} dx = 2 sqrt(γ/β) K_1(2 sqrt(βγ))
        let spec = QuadratureSpec::default();
        for &beta in &[0.1, 1.0, 10.0] {
            for &gamma in &[0.1, 1.0, 10.0] {
                let lhs = integrate_semi_infinite(
                    |x| if x > 0.0 { (-beta * x - gamma / x).exp() } else { 0.0 },
                    0.0,
                    &spec,
                )
                .unwrap();
                let rhs = 2.0 * (gamma / beta).sqrt() * bessel_k(1, 2.0 * (beta * gamma).sqrt()).unwrap();
                assert!(((lhs - rhs) / rhs).abs() < 1e-6, "β={beta} γ={gamma}: {lhs} vs {rhs}");
            }
        }
    }
}
