//! Real dilogarithm `Li₂(x) = -∫₀ˣ ln(1-u)/u du` for `x ≤ 1`.

use std::f64::consts::PI;

use crate::error::{domain, Result};

const PI2_6: f64 = PI * PI / 6.0;

/// `B_{2k} / (2k+1)!` for k = 1..10.
#[allow(clippy::excessive_precision)]
const BERNOULLI_OVER_FACT: [f64; 10] = [
    1.0 / 36.0,
    -1.0 / 3600.0,
    1.0 / 211_680.0,
    -1.0 / 10_886_400.0,
    1.0 / 526_901_760.0,
    -4.064_761_645_144_226e-11,
    8.921_691_020_456_453e-13,
    -1.993_929_586_072_108e-14,
    4.518_980_029_619_919e-16,
    -1.035_651_761_218_125e-17,
];

/// Bernoulli series in `u = -ln(1-x)`, valid for `x ∈ [-1, 1/2]`.
fn series(x: f64) -> f64 {
    let u = -(-x).ln_1p();
    let u2 = u * u;
    let mut pow = u;
    let mut acc = u - 0.25 * u2;
    for c in BERNOULLI_OVER_FACT {
        pow *= u2;
        acc += c * pow;
    }
    acc
}

pub fn dilog(x: f64) -> Result<f64> {
    if x.is_nan() || x > 1.0 {
        return domain(format!("dilogarithm defined here for x <= 1, got {x}"));
    }
    if x == 1.0 {
        return Ok(PI2_6);
    }
    if x < -1.0 {
        let l = (-x).ln();
        return Ok(-PI2_6 - 0.5 * l * l - series(1.0 / x));
    }
    if x <= 0.5 {
        return Ok(series(x));
    }
    Ok(PI2_6 - x.ln() * (-x).ln_1p() - series(1.0 - x))
}
