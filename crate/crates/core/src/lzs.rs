//! Adiabatic-impulse description of two identical avoided crossings.
//!
//! Amplitudes are written in the adiabatic basis ordered (upper, lower).
//! The first crossing is h₁ = F(t − t₁)σz + mσx + iγσy and the second
//! h₂ = −F(t − t₂)σz ± mσx ± iγσy, the four sign choices labelling the
//! cases below.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::matrix::Complex2x2;
use crate::quadrature;
use crate::twolevel::{phi_s, real_gap_asymptotic_u, BandPopulations, RealGapLZParams};

/// Absolute tolerance of the dynamical-phase quadrature.
pub const PHASE_TOL: f64 = 1e-8;

/// Signs (of m, of γ) in h₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LzsCase {
    /// (−m, +γ)
    I,
    /// (+m, −γ)
    Ii,
    /// (+m, +γ)
    Iii,
    /// (−m, −γ)
    Iv,
}

impl LzsCase {
    pub const ALL: [LzsCase; 4] = [LzsCase::I, LzsCase::Ii, LzsCase::Iii, LzsCase::Iv];

    /// Cases with a sign change of the mass term carry an extra π in φ_t.
    pub fn has_pi_shift(self) -> bool {
        matches!(self, LzsCase::I | LzsCase::Iv)
    }
}

impl fmt::Display for LzsCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LzsCase::I => "i",
            LzsCase::Ii => "ii",
            LzsCase::Iii => "iii",
            LzsCase::Iv => "iv",
        };
        f.write_str(s)
    }
}

/// Upper-band energy E₊(t); the lower band is −E₊(t).
pub type Dispersion = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Where the dynamical phases between the crossings come from.
#[derive(Clone)]
pub enum PhaseSource {
    Given { phi_plus: f64, phi_minus: f64 },
    Dispersion(Dispersion),
}

impl fmt::Debug for PhaseSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseSource::Given {
                phi_plus,
                phi_minus,
            } => write!(f, "Given({phi_plus}, {phi_minus})"),
            PhaseSource::Dispersion(_) => f.write_str("Dispersion(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LzsSetup {
    pub params: RealGapLZParams,
    pub t1: f64,
    pub t2: f64,
    pub case: LzsCase,
    pub phases: PhaseSource,
    /// Keep Im∫E± as gain/loss factors in the adiabatic matrix. Off by default.
    pub imaginary_phase: bool,
}

impl LzsSetup {
    pub fn new(
        params: RealGapLZParams,
        t1: f64,
        t2: f64,
        case: LzsCase,
        phases: PhaseSource,
    ) -> Result<Self> {
        ensure_finite("t1", t1)?;
        ensure_finite("t2", t2)?;
        if t2 <= t1 {
            return Err(Error::InvalidInput(format!(
                "crossings must satisfy t2 > t1, got t1 = {t1}, t2 = {t2}"
            )));
        }
        Ok(LzsSetup {
            params,
            t1,
            t2,
            case,
            phases,
            imaginary_phase: false,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LzsResult {
    pub populations: BandPopulations,
    /// Total phase including the π of cases i and iv.
    pub phi_t: f64,
    pub phi_s: f64,
    pub u_a: Complex2x2,
}

/// I₁ = [[U₁₂, U₁₁], [U₂₂, U₂₁]].
pub fn impulse_matrix_first(params: &RealGapLZParams) -> Result<Complex2x2> {
    let u = real_gap_asymptotic_u(params)?;
    Ok(Complex2x2::new(
        u.get(0, 1),
        u.get(0, 0),
        u.get(1, 1),
        u.get(1, 0),
    ))
}

/// I₂ for the four sign cases, built from the first-crossing U.
pub fn impulse_matrix_second(params: &RealGapLZParams, case: LzsCase) -> Result<Complex2x2> {
    let u = real_gap_asymptotic_u(params)?;
    let (u11, u12, u21, u22) = (u.get(0, 0), u.get(0, 1), u.get(1, 0), u.get(1, 1));
    Ok(match case {
        LzsCase::I => Complex2x2::new(-u12, u11, u22, -u21),
        LzsCase::Ii => Complex2x2::new(u12, u11, u22, u21),
        LzsCase::Iii => Complex2x2::new(-u21.conj(), u11, u22, -u12.conj()),
        LzsCase::Iv => Complex2x2::new(u21.conj(), u11, u22, u12.conj()),
    })
}

/// (φ_{d+}, φ_{d−}) = ∫_{t₁}^{t₂} Re E±(t) dt.
pub fn adiabatic_phase(setup: &LzsSetup) -> Result<(f64, f64)> {
    match &setup.phases {
        PhaseSource::Given {
            phi_plus,
            phi_minus,
        } => Ok((*phi_plus, *phi_minus)),
        PhaseSource::Dispersion(e) => {
            let q = quadrature::integrate(|t| e(t).re, setup.t1, setup.t2, PHASE_TOL)?;
            Ok((q.value, -q.value))
        }
    }
}

fn imaginary_phase(setup: &LzsSetup) -> Result<f64> {
    match &setup.phases {
        PhaseSource::Dispersion(e) if setup.imaginary_phase => {
            Ok(quadrature::integrate(|t| e(t).im, setup.t1, setup.t2, PHASE_TOL)?.value)
        }
        _ => Ok(0.0),
    }
}

/// U_A = I₂·A·I₁ with A = diag(e^{−iφ_{d+}}, e^{−iφ_{d−}}).
pub fn compose(setup: &LzsSetup) -> Result<LzsResult> {
    let (phi_plus, phi_minus) = adiabatic_phase(setup)?;
    let gain = imaginary_phase(setup)?;
    compose_inner(&setup.params, setup.case, phi_plus, phi_minus, gain)
}

/// [`compose`] with the dynamical phases supplied directly.
pub fn compose_with_phases(
    params: &RealGapLZParams,
    case: LzsCase,
    phi_plus: f64,
    phi_minus: f64,
) -> Result<LzsResult> {
    compose_inner(params, case, phi_plus, phi_minus, 0.0)
}

fn compose_inner(
    params: &RealGapLZParams,
    case: LzsCase,
    phi_plus: f64,
    phi_minus: f64,
    gain: f64,
) -> Result<LzsResult> {
    let i1 = impulse_matrix_first(params)?;
    let i2 = impulse_matrix_second(params, case)?;
    // e^{−i∫E+} = e^{−iφ_{d+}}·e^{+Im∫E+}; the lower band has the opposite sign
    let a = Complex2x2::diag(
        Complex64::from_polar(gain.exp(), -phi_plus),
        Complex64::from_polar((-gain).exp(), -phi_minus),
    );
    let u_a = i2 * a * i1;
    let ps = phi_s(params.delta());
    let mut phi_t = phi_plus - phi_minus + 2.0 * ps;
    if case.has_pi_shift() {
        phi_t += PI;
    }
    Ok(LzsResult {
        populations: populations_of(&u_a),
        phi_t,
        phi_s: ps,
        u_a,
    })
}

/// Squared moduli of U_A in the (upper, lower) ordering.
pub fn populations_of(u_a: &Complex2x2) -> BandPopulations {
    BandPopulations {
        p_minus_plus: u_a.get(0, 1).norm_sqr(),
        p_minus_minus: u_a.get(1, 1).norm_sqr(),
        p_plus_minus: u_a.get(1, 0).norm_sqr(),
        p_plus_plus: u_a.get(0, 0).norm_sqr(),
    }
}

/// Closed-form populations. `phi` is φ_{d+} − φ_{d−} + 2φ_s; the extra π of
/// cases i and iv is added here.
pub fn analytic_populations(
    params: &RealGapLZParams,
    phi: f64,
    case: LzsCase,
) -> Result<BandPopulations> {
    ensure_finite("phi", phi)?;
    let (m, g) = (params.m, params.gamma);
    if m.abs() == g.abs() {
        return Err(Error::ExceptionalPoint { m, gamma: g });
    }
    let phi_t = if case.has_pi_shift() { phi + PI } else { phi };
    let p = params.p_lz();
    let q = -(-2.0 * PI * params.delta()).exp_m1();
    let pq = p * q;
    let s2 = (0.5 * phi_t).sin().powi(2);
    let cs = phi_t.cos();
    let r = (m - g) / (m + g);
    Ok(match case {
        LzsCase::I | LzsCase::Ii => {
            let inter = 4.0 * pq * (s2 + g * g / (m * m - g * g));
            BandPopulations {
                p_minus_plus: inter,
                p_plus_minus: inter,
                p_minus_minus: p * p + r * r * q * q + 2.0 * r * pq * cs,
                p_plus_plus: p * p + q * q / (r * r) + 2.0 / r * pq * cs,
            }
        }
        LzsCase::Iii | LzsCase::Iv => {
            let intra = p * p + q * q + 2.0 * pq * cs;
            BandPopulations {
                p_minus_plus: 4.0 * r * pq * s2,
                p_plus_minus: 4.0 / r * pq * s2,
                p_minus_minus: intra,
                p_plus_plus: intra,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: f64, g: f64) -> RealGapLZParams {
        RealGapLZParams::new(0.02, m, g).unwrap()
    }

    #[test]
    fn case_two_equals_first_impulse() {
        let p = params(0.2, 0.1);
        assert_eq!(
            impulse_matrix_second(&p, LzsCase::Ii).unwrap(),
            impulse_matrix_first(&p).unwrap()
        );
    }

    #[test]
    fn impulse_determinants_have_unit_modulus() {
        let p = params(0.2, 0.1);
        assert!((impulse_matrix_first(&p).unwrap().det().norm() - 1.0).abs() < 1e-10);
        for case in LzsCase::ALL {
            let d = impulse_matrix_second(&p, case).unwrap().det().norm();
            assert!((d - 1.0).abs() < 1e-10, "{case}");
        }
    }

    #[test]
    fn hermitian_cases_pair_up() {
        let p = params(0.2, 0.0);
        let m = |c| impulse_matrix_second(&p, c).unwrap();
        assert!(m(LzsCase::I).max_abs_diff(&m(LzsCase::Iv)) < 1e-15);
        assert!(m(LzsCase::Ii).max_abs_diff(&m(LzsCase::Iii)) < 1e-15);
    }

    #[test]
    fn beam_splitter_at_half() {
        // P_LZ = 1/2 ⇔ δ = ln 2 / 2π
        let m = (2.0 * 0.02 * 2f64.ln() / (2.0 * PI)).sqrt();
        let i1 = impulse_matrix_first(&params(m, 0.0)).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert!((i1.get(r, c).norm_sqr() - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn given_phases_pass_through() {
        let setup = LzsSetup::new(
            params(0.2, 0.1),
            0.0,
            1.0,
            LzsCase::I,
            PhaseSource::Given {
                phi_plus: 0.3,
                phi_minus: -0.3,
            },
        )
        .unwrap();
        assert_eq!(adiabatic_phase(&setup).unwrap(), (0.3, -0.3));
        assert!(LzsSetup::new(params(0.2, 0.1), 1.0, 1.0, LzsCase::I, setup.phases.clone()).is_err());
    }

    #[test]
    fn constant_dispersion_phase() {
        let e: Dispersion = Arc::new(|_t| Complex64::new(0.7, 0.0));
        let setup = LzsSetup::new(
            params(0.2, 0.1),
            0.0,
            3.0,
            LzsCase::Iii,
            PhaseSource::Dispersion(e),
        )
        .unwrap();
        let (a, b) = adiabatic_phase(&setup).unwrap();
        assert!((a - 2.1).abs() < 1e-12 && (b + 2.1).abs() < 1e-12);
    }

    #[test]
    fn hermitian_limit_reduces_to_two_path_formula() {
        let p = params(0.25, 0.0);
        let pl = p.p_lz();
        for case in LzsCase::ALL {
            for k in 0..16 {
                let phi = 0.4 * k as f64;
                let got = analytic_populations(&p, phi, case).unwrap();
                let phi_t = if case.has_pi_shift() { phi + PI } else { phi };
                let want = 4.0 * pl * (1.0 - pl) * (0.5 * phi_t).sin().powi(2);
                assert!((got.p_minus_plus - want).abs() < 1e-14);
                assert!((got.p_minus_plus + got.p_minus_minus - 1.0).abs() < 1e-12);
            }
        }
    }
}
