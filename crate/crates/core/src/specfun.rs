//! Parabolic cylinder functions D_p(ζ) for complex order and complex argument.
//!
//! D_p solves w'' + (p + 1/2 − ζ²/4) w = 0 and decays along the positive real
//! axis. Two regimes are used:
//!
//! * **Series** (`|ζ| <` crossover): the Maclaurin representation in terms of
//!   two Kummer series near the origin, continued outward by Taylor-series
//!   steps of the Weber equation. In the sector `|arg ζ| < π/4`, where D_p is
//!   the recessive solution, the continuation instead runs inward from the
//!   crossover circle so that the integration is always stable.
//! * **Asymptotic** (`|ζ| ≥` crossover): the Poincaré expansion, with the
//!   reflected `e^{+ζ²/4}` contribution switched on beyond the Stokes lines
//!   `|arg ζ| = π/2`.
//!
//! Every evaluation reports which regime produced it and an absolute error
//! estimate that includes rounding lost to cancellation in the series sums.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::recip_gamma;

const EPS: f64 = f64::EPSILON;
const SQRT_PI: f64 = 1.772_453_850_905_516;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Default boundary between the series and asymptotic regimes.
pub const DEFAULT_CROSSOVER: f64 = 12.0;
/// Radius inside which the Maclaurin series is summed directly.
const MACLAURIN_RADIUS: f64 = 3.0;
const SERIES_TOL: f64 = 1e-16;
const MAX_TERMS: usize = 10_000;

/// Order p of D_p. Both parts must be finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcfOrder(Complex64);

impl PcfOrder {
    pub fn new(p: Complex64) -> Result<Self> {
        if p.re.is_finite() && p.im.is_finite() {
            Ok(PcfOrder(p))
        } else {
            Err(Error::InvalidInput(format!("order must be finite, got {p}")))
        }
    }

    /// p = −iδ + δ′ for real and imaginary adiabatic parameters δ, δ′.
    pub fn from_adiabatic(delta: f64, delta_prime: f64) -> Result<Self> {
        Self::new(Complex64::new(delta_prime, -delta))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Series,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcfEvalReport {
    pub value: Complex64,
    pub regime: Regime,
    pub est_abs_error: f64,
}

/// Which of the two rays ±√2·e^{iπ/4}·z_a the argument lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ray {
    Plus,
    Minus,
}

/// Evaluator with a configurable series/asymptotic crossover radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pcf {
    crossover: f64,
}

impl Default for Pcf {
    fn default() -> Self {
        Pcf {
            crossover: DEFAULT_CROSSOVER,
        }
    }
}

impl Pcf {
    pub fn with_crossover(crossover: f64) -> Result<Self> {
        if !(crossover.is_finite() && crossover > MACLAURIN_RADIUS + 1.0) {
            return Err(Error::InvalidInput(format!(
                "crossover radius must exceed {}, got {crossover}",
                MACLAURIN_RADIUS + 1.0
            )));
        }
        Ok(Pcf { crossover })
    }

    pub fn crossover(&self) -> f64 {
        self.crossover
    }

    /// D_p(ζ), dispatching on |ζ| against the crossover radius.
    pub fn eval(&self, p: Complex64, zeta: Complex64) -> Result<PcfEvalReport> {
        check_inputs(p, zeta)?;
        if zeta.norm() < self.crossover {
            self.series(p, zeta)
        } else {
            self.asymptotic(p, zeta)
        }
    }

    /// Convergent-series regime. Requires `|ζ| ≤` crossover.
    pub fn series(&self, p: Complex64, zeta: Complex64) -> Result<PcfEvalReport> {
        check_inputs(p, zeta)?;
        let r = zeta.norm();
        if r > self.crossover {
            return Err(Error::Domain(format!(
                "series regime needs |zeta| <= {}, got {r}",
                self.crossover
            )));
        }
        let a = self.series_approx(p, zeta)?;
        let (value, err) = (a.value, a.err);
        Ok(PcfEvalReport {
            value,
            regime: Regime::Series,
            est_abs_error: err,
        })
    }

    fn series_approx(&self, p: Complex64, zeta: Complex64) -> Result<Approx> {
        if zeta.norm() <= MACLAURIN_RADIUS {
            return maclaurin(p, zeta);
        }
        let theta = zeta.arg();
        if theta.abs() > 3.0 * FRAC_PI_4 {
            // D_p(ζ) = e^{−iπp} D_p(−ζ) + √(2π)/Γ(−p) e^{−iπ(p+1)/2} D_{−p−1}(iζ);
            // −ζ lies in the recessive sector and iζ in the oscillatory one,
            // so neither piece is evaluated in an unstable direction.
            let i = Complex64::i();
            let near = self.series_approx(p, -zeta)?;
            let w1 = (-i * PI * p).exp();
            let mut value = w1 * near.value;
            let mut err = w1.norm() * near.err;
            let rg = recip_gamma(-p);
            if rg != Complex64::new(0.0, 0.0) {
                let far = self.series_approx(-p - 1.0, i * zeta)?;
                let w2 = SQRT_2PI * rg * (-i * PI * (p + 1.0) * 0.5).exp();
                value += w2 * far.value;
                err += w2.norm() * far.err;
            }
            err += 4.0 * EPS * value.norm();
            return Ok(Approx { value, err });
        }
        let dir = Complex64::from_polar(1.0, theta);
        let start = if theta.abs() < FRAC_PI_4 {
            // recessive sector: start on the crossover circle, step inward
            let z0 = dir * self.crossover;
            let d = asymptotic_expansion(p, z0)?;
            let dm1 = asymptotic_expansion(p - 1.0, z0)?;
            Seed::from_pair(p, z0, d, dm1)
        } else {
            let z0 = dir * MACLAURIN_RADIUS;
            let d = maclaurin(p, z0)?;
            let dm1 = maclaurin(p - 1.0, z0)?;
            Seed::from_pair(p, z0, d, dm1)
        };
        let (value, err) = continue_taylor(p, start, zeta)?;
        Ok(Approx { value, err })
    }

    /// Large-argument regime. Requires `|ζ| ≥` crossover.
    pub fn asymptotic(&self, p: Complex64, zeta: Complex64) -> Result<PcfEvalReport> {
        check_inputs(p, zeta)?;
        let r = zeta.norm();
        if r < self.crossover {
            return Err(Error::Domain(format!(
                "asymptotic regime needs |zeta| >= {}, got {r}",
                self.crossover
            )));
        }
        let s = asymptotic_expansion(p, zeta)?;
        Ok(PcfEvalReport {
            value: s.value,
            regime: Regime::Asymptotic,
            est_abs_error: s.err,
        })
    }
}

/// D_p(ζ) with the default crossover radius.
pub fn pcf(p: Complex64, zeta: Complex64) -> Result<PcfEvalReport> {
    Pcf::default().eval(p, zeta)
}

/// Series regime with the default crossover radius.
pub fn pcf_series(p: Complex64, zeta: Complex64) -> Result<PcfEvalReport> {
    Pcf::default().series(p, zeta)
}

/// Asymptotic regime with the default crossover radius.
pub fn pcf_asymptotic(p: Complex64, zeta: Complex64) -> Result<PcfEvalReport> {
    Pcf::default().asymptotic(p, zeta)
}

/// Truncated large-z_a form of D_p(±√2·e^{iπ/4}·z_a) for p = −iδ + δ′.
///
/// Keeps the correction terms through z_a⁻⁴ only, written with
/// Φ(z_a) = z_a²/2 + δ ln(√2 z_a). On the minus ray the reflected term uses
/// its own correction polynomial in (p+1)(p+2)…, the one that follows from
/// the connection formula for D_p across the Stokes line.
pub fn pcf_ray_asymptotic(p: Complex64, ray: Ray, z_a: f64) -> Result<Complex64> {
    check_inputs(p, Complex64::new(z_a, 0.0))?;
    if !(z_a > 0.0) {
        return Err(Error::Domain(format!("z_a must be positive, got {z_a}")));
    }
    let i = Complex64::i();
    let delta = -p.im;
    let delta_p = p.re;
    let ln_r = (SQRT_2 * z_a).ln();
    let phi = 0.5 * z_a * z_a + delta * ln_r;
    let z2 = z_a * z_a;
    let z4 = z2 * z2;
    let q2 = p * (p - 1.0);
    let q4 = q2 * (p - 2.0) * (p - 3.0);
    let corr = 1.0 + i * q2 / (4.0 * z2) - q4 / (32.0 * z4);
    match ray {
        Ray::Plus => {
            let e = -i * (phi - FRAC_PI_4 * delta_p) + delta_p * ln_r + FRAC_PI_4 * delta;
            Ok(e.exp() * corr)
        }
        Ray::Minus => {
            let e1 =
                -i * (phi + 3.0 * FRAC_PI_4 * delta_p) + delta_p * ln_r - 3.0 * FRAC_PI_4 * delta;
            let r2 = (p + 1.0) * (p + 2.0);
            let r4 = r2 * (p + 3.0) * (p + 4.0);
            let corr_reflected = 1.0 - i * r2 / (4.0 * z2) - r4 / (32.0 * z4);
            let e2 = i * (phi - FRAC_PI_4 * (delta_p + 1.0))
                - (delta_p + 1.0) * ln_r
                - FRAC_PI_4 * delta;
            Ok(e1.exp() * corr + SQRT_2PI * recip_gamma(-p) * e2.exp() * corr_reflected)
        }
    }
}

fn check_inputs(p: Complex64, zeta: Complex64) -> Result<()> {
    if !(p.re.is_finite() && p.im.is_finite()) {
        return Err(Error::InvalidInput(format!("order must be finite, got {p}")));
    }
    if !(zeta.re.is_finite() && zeta.im.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "argument must be finite, got {zeta}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
struct Approx {
    value: Complex64,
    err: f64,
}

/// Kummer M(a, b, x) with the first omitted term and the rounding
/// accumulated over |terms| folded into the error.
fn kummer(a: Complex64, b: f64, x: Complex64) -> Result<Approx> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut abs_sum = 1.0;
    let mut small = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * x / ((b + nf) * (nf + 1.0));
        sum += term;
        abs_sum += term.norm();
        if term.norm() < SERIES_TOL * sum.norm() || term == Complex64::new(0.0, 0.0) {
            small += 1;
            if small == 3 {
                let next = term * (a + nf + 1.0) * x / ((b + nf + 1.0) * (nf + 2.0));
                return Ok(Approx {
                    value: sum,
                    err: next.norm() + EPS * abs_sum,
                });
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence { terms: MAX_TERMS })
}

fn maclaurin(p: Complex64, z: Complex64) -> Result<Approx> {
    let x = z * z * 0.5;
    let m1 = kummer(-p * 0.5, 0.5, x)?;
    let m2 = kummer((1.0 - p) * 0.5, 1.5, x)?;
    let g1 = recip_gamma((1.0 - p) * 0.5);
    let g2 = recip_gamma(-p * 0.5);
    let pre = (p * (0.5 * 2f64.ln())).exp() * SQRT_PI * (-z * z * 0.25).exp();
    let a = m1.value * g1;
    let b = m2.value * g2 * z * SQRT_2;
    let value = pre * (a - b);
    let err = pre.norm()
        * (m1.err * g1.norm() + m2.err * g2.norm() * z.norm() * SQRT_2 + EPS * (a.norm() + b.norm()))
        + 4.0 * EPS * value.norm();
    Ok(Approx { value, err })
}

/// Large-|ζ| expansion summed to its smallest term.
fn asymptotic_expansion(p: Complex64, z: Complex64) -> Result<Approx> {
    let z2 = z * z;
    let inv = (2.0 * z2).inv();
    let (s1, e1) = poincare_sum(|s| {
        let sf = s as f64;
        -(-p + 2.0 * sf - 2.0) * (-p + 2.0 * sf - 1.0) / sf
    }, inv)?;
    let lead = (-z2 * 0.25 + p * z.ln()).exp();
    let mut value = lead * s1;
    let mut err = lead.norm() * e1;
    let ph = z.arg();
    if ph.abs() > FRAC_PI_2 {
        let rg = recip_gamma(-p);
        if rg != Complex64::new(0.0, 0.0) {
            let (s2, e2) = poincare_sum(|s| {
                let sf = s as f64;
                (p + 2.0 * sf - 1.0) * (p + 2.0 * sf) / sf
            }, inv)?;
            let sign = if ph > 0.0 { 1.0 } else { -1.0 };
            let refl = -SQRT_2PI
                * rg
                * (Complex64::i() * PI * p * sign).exp()
                * (z2 * 0.25 - (p + 1.0) * z.ln()).exp();
            value += refl * s2;
            err += refl.norm() * e2;
        }
    }
    err += 4.0 * EPS * value.norm();
    Ok(Approx { value, err })
}

/// Sums 1 + Σ t_s where t_s = t_{s-1} · ratio(s) · x^s-factor, stopping at the
/// smallest term. Returns the sum and the last included term's size.
fn poincare_sum(ratio: impl Fn(usize) -> Complex64, x: Complex64) -> Result<(Complex64, f64)> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut abs_sum = 1.0;
    let mut last = 1.0;
    for s in 1..MAX_TERMS {
        let next = term * ratio(s) * x;
        let n = next.norm();
        if n >= last {
            // terms started growing: optimal truncation reached
            return Ok((sum, last + EPS * abs_sum));
        }
        term = next;
        sum += term;
        abs_sum += n;
        last = n;
        if n < EPS * 1e-2 * sum.norm() {
            return Ok((sum, n + EPS * abs_sum));
        }
    }
    Err(Error::NonConvergence { terms: MAX_TERMS })
}

/// Value and derivative of D_p at a point, with relative error.
#[derive(Debug, Clone, Copy)]
struct Seed {
    z: Complex64,
    y: Complex64,
    dy: Complex64,
    rel_err: f64,
}

impl Seed {
    /// Uses D_p'(ζ) = −(ζ/2) D_p(ζ) + p D_{p−1}(ζ).
    fn from_pair(p: Complex64, z: Complex64, d: Approx, dm1: Approx) -> Self {
        let y = d.value;
        let dy = -z * 0.5 * y + p * dm1.value;
        let scale = y.norm().max(f64::MIN_POSITIVE);
        let rel_err = (d.err + p.norm() * dm1.err) / scale;
        Seed { z, y, dy, rel_err }
    }
}

/// Carries (D_p, D_p') from `seed.z` to `target` along a straight line with
/// Taylor steps of the Weber equation y'' = (ζ²/4 − p − 1/2) y.
fn continue_taylor(p: Complex64, seed: Seed, target: Complex64) -> Result<(Complex64, f64)> {
    let a = p + 0.5;
    let mut z = seed.z;
    let mut y = seed.y;
    let mut dy = seed.dy;
    let mut rel_err = seed.rel_err;
    let total = target - z;
    let length = total.norm();
    if length == 0.0 {
        return Ok((y, rel_err * y.norm()));
    }
    let dir = total / length;
    let mut travelled = 0.0;
    let mut coeffs: Vec<Complex64> = Vec::with_capacity(64);
    while travelled < length {
        let step = (1.0f64).min(3.0 / (z.norm() + 1.0)).min(length - travelled);
        let h = dir * step;
        let q0 = z * z * 0.25 - a;
        let q1 = z * 0.5;
        coeffs.clear();
        coeffs.push(y);
        coeffs.push(dy);
        let mut val = y + dy * h;
        let mut der = dy;
        let mut abs_val = y.norm() + (dy * h).norm();
        let mut hk = h; // h^(k-1) for the term index k below
        let mut small = 0;
        let mut k = 2;
        let trunc = loop {
            // (k)(k-1) c_k = q0 c_{k-2} + q1 c_{k-3} + c_{k-4}/4
            let mut rhs = q0 * coeffs[k - 2];
            if k >= 3 {
                rhs += q1 * coeffs[k - 3];
            }
            if k >= 4 {
                rhs += coeffs[k - 4] * 0.25;
            }
            let c = rhs / ((k * (k - 1)) as f64);
            coeffs.push(c);
            let dterm = c * hk * (k as f64);
            hk *= h;
            let vterm = c * hk;
            val += vterm;
            der += dterm;
            abs_val += vterm.norm();
            let mag = vterm.norm().max(dterm.norm() * step);
            if mag < SERIES_TOL * val.norm().max(der.norm() * step) {
                small += 1;
                if small == 3 {
                    break mag;
                }
            } else {
                small = 0;
            }
            k += 1;
            if k > MAX_TERMS {
                return Err(Error::NonConvergence { terms: MAX_TERMS });
            }
        };
        let scale = val.norm().max(f64::MIN_POSITIVE);
        rel_err += (trunc + EPS * abs_val) / scale;
        y = val;
        dy = der;
        z += h;
        travelled += step;
    }
    Ok((y, rel_err * y.norm()))
}
