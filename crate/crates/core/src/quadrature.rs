//! Adaptive Gauss–Kronrod quadrature (10-point Gauss, 21-point Kronrod)
//! with global subdivision of the worst interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
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

/// Stopping rule: accept once the estimated error is below
/// `max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-12,
            max_intervals: 10_000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Roundoff floor `50 ε ∫|f|` below which the error estimate cannot fall.
    floor: f64,
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

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    if !res_k.is_finite() {
        return Err(Error::Domain(format!("integrand not finite on [{a}, {b}]")));
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (res_k - res_g) * half;
    let hl = half.abs();
    Ok(Segment {
        a,
        b,
        value: res_k * half,
        error: rescale_error(err, res_abs * hl, res_asc * hl),
        floor: 50.0 * f64::EPSILON * res_abs * hl,
    })
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration limits must be finite".into()));
    }
    let first = gk21(&f, a, b)?;
    let mut evaluations = 21;
    let mut heap = BinaryHeap::new();
    let mut total = first.value;
    let mut total_err = first.error;
    let mut total_floor = first.floor;
    // the requested accuracy, relaxed to what rounding allows
    let goal = |value: f64, floor: f64| tol.target(value).max(1.01 * floor);
    // segments too short to split further, or already at the roundoff
    // floor; their error is frozen
    let mut frozen: Vec<Segment> = Vec::new();
    heap.push(first);
    while total_err > goal(total, total_floor) {
        if heap.len() >= tol.max_intervals {
            return Err(Error::Quadrature {
                achieved: total_err,
                target: tol.target(total),
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if worst.error <= worst.floor
            || !(mid > worst.a.min(worst.b) && mid < worst.a.max(worst.b))
            || (worst.b - worst.a).abs() < 1e-13 * (worst.a.abs() + worst.b.abs())
        {
            frozen.push(worst);
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = gk21(&f, worst.a, mid)?;
        let right = gk21(&f, mid, worst.b)?;
        evaluations += 42;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_floor += left.floor + right.floor - worst.floor;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to shed the drift of the running total
    let value = crate::sum::compensated_sum(heap.iter().chain(&frozen).map(|s| s.value));
    let error = heap.iter().chain(&frozen).map(|s| s.error).sum::<f64>();
    let floor = heap.iter().chain(&frozen).map(|s| s.floor).sum::<f64>();
    if error > goal(value, floor) {
        return Err(Error::Quadrature {
            achieved: error,
            target: tol.target(value),
        });
    }
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}

/// Smallest `start * 2^j` (j ≥ 0) at which `g` falls below `threshold`.
/// `g` must be eventually nonincreasing; gives up past `limit`.
pub fn doubling_cutoff<G: Fn(f64) -> f64>(
    g: G,
    start: f64,
    threshold: f64,
    limit: f64,
) -> Result<f64> {
    let mut y = start;
    while y <= limit {
        if g(y) < threshold {
            return Ok(y);
        }
        y *= 2.0;
    }
    Err(Error::Range(format!(
        "integrand still above {threshold:e} at cutoff limit {limit}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, Tolerance::default()).unwrap();
        assert!((r.value - 0.0).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫₀¹ x^{-1/2} dx = 2
        let r = integrate(|x| x.powf(-0.5), 0.0, 1.0, Tolerance::new(1e-12, 1e-12)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn peaked_integrand() {
        let r = integrate(
            |x| (-1e4 * (x - 0.3) * (x - 0.3)).exp(),
            0.0,
            1.0,
            Tolerance::new(1e-14, 1e-13),
        )
        .unwrap();
        let exact = (std::f64::consts::PI / 1e4).sqrt();
        assert!((r.value - exact).abs() < 1e-13);
    }

    #[test]
    fn reversed_limits_negate() {
        let f = |x: f64| x.exp();
        let a = integrate(f, 0.0, 1.0, Tolerance::default()).unwrap().value;
        let b = integrate(f, 1.0, 0.0, Tolerance::default()).unwrap().value;
        assert!((a + b).abs() < 1e-14);
    }

    #[test]
    fn exhausted_budget_reports_achieved_error() {
        let tol = Tolerance {
            abs: 1e-300,
            rel: 0.0,
            max_intervals: 3,
        };
        let err = integrate(|x| (1.0 / x).sin(), 1e-3, 1.0, tol).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn doubling_finds_cutoff() {
        let y = doubling_cutoff(|y| (-y).exp(), 1.0, 1e-14, 1e6).unwrap();
        assert_eq!(y, 64.0);
    }
}
