//! Complex gamma function.
//!
//! `ln_gamma` follows the analytic continuation of log Γ from the positive
//! real axis (the branch used by `scipy.special.loggamma`), so its imaginary
//! part is a continuous function of the argument in the right half plane.
//! Arguments with `Re z < 1/2` go through the reflection formula.

use std::f64::consts::PI;

use num_complex::Complex64;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// B_{2k} / (2k (2k-1)) for k = 1..=8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const SHIFT_TO: f64 = 15.0;

fn ln_gamma_right(z: Complex64) -> Complex64 {
    debug_assert!(z.re >= 0.5);
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < SHIFT_TO || w.re < 1.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + series - shift
}

/// log Γ(z).
///
/// On `Re z ≥ 1/2` this is the analytic continuation from the positive real
/// axis. On `Re z < 1/2` the value is correct modulo `2πi`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        ln_gamma_right(z)
    } else {
        // Γ(z) Γ(1-z) = π / sin(πz)
        let s = (z * PI).sin();
        Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_right(1.0 - z)
    }
}

/// Γ(z). Returns an infinite value at the poles.
pub fn gamma(z: Complex64) -> Complex64 {
    let r = recip_gamma(z);
    if r == Complex64::new(0.0, 0.0) {
        Complex64::new(f64::INFINITY, 0.0)
    } else {
        r.inv()
    }
}

/// 1/Γ(z), an entire function: exactly zero at z = 0, -1, -2, ...
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Complex64::new(0.0, 0.0);
    }
    if z.re >= 0.5 {
        (-ln_gamma_right(z)).exp()
    } else {
        // 1/Γ(z) = sin(πz) Γ(1-z) / π
        (z * PI).sin() * ln_gamma_right(1.0 - z).exp() / PI
    }
}

/// arg Γ(z) as the imaginary part of the continuous log-gamma.
///
/// Only meaningful (branch-continuous) for `Re z > 0`.
pub fn arg_gamma(z: Complex64) -> f64 {
    ln_gamma(z).im
}
