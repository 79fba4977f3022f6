//! Non-Hermitian Landau-Zener Hamiltonians.
//!
//! The generic model is H(t) = (Ft + iκ)σz + (m + im′)σx + (n + in′)σy with
//! complex adiabatic parameter δ + iδ′. The real-gap model
//! h(t) = Ftσz + mσx + iγσy is the δ′ = 0 special case with n′ = γ.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::gamma::{arg_gamma, recip_gamma};
use crate::matrix::{norm_sqr2, Complex2x2};
use crate::propagator::{evolution_matrix, IntegratorConfig};
use crate::specfun::Pcf;

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;
/// Relative size of |E±| (against the largest entry of H) below which the
/// spectrum is treated as degenerate.
const DEGENERACY_TOL: f64 = 1e-10;
/// Tolerance for the exact-boundary branches of the asymptotic classification.
pub const BOUNDARY_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Parameters of the generic non-Hermitian LZ Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenericLZParams {
    pub f: f64,
    pub kappa: f64,
    pub m: f64,
    pub n: f64,
    pub m_prime: f64,
    pub n_prime: f64,
}

impl GenericLZParams {
    pub fn new(f: f64, kappa: f64, m: f64, n: f64, m_prime: f64, n_prime: f64) -> Result<Self> {
        for (name, x) in [
            ("F", f),
            ("kappa", kappa),
            ("m", m),
            ("n", n),
            ("m_prime", m_prime),
            ("n_prime", n_prime),
        ] {
            ensure_finite(name, x)?;
        }
        if f <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "sweep velocity F must be positive, got {f}"
            )));
        }
        Ok(GenericLZParams {
            f,
            kappa,
            m,
            n,
            m_prime,
            n_prime,
        })
    }

    /// F = 1, κ = 0, m = n′ = δ′, n = (1 + 2δ)/2, m′ = (1 − 2δ)/2. Reaches
    /// every real (δ, δ′) pair.
    pub fn from_adiabatic(delta: f64, delta_prime: f64) -> Result<Self> {
        ensure_finite("delta", delta)?;
        ensure_finite("delta_prime", delta_prime)?;
        Self::new(
            1.0,
            0.0,
            delta_prime,
            0.5 + delta,
            0.5 - delta,
            delta_prime,
        )
    }

    /// δ = (m² − m′² + n² − n′²)/2F
    pub fn delta(&self) -> f64 {
        (self.m * self.m - self.m_prime * self.m_prime + self.n * self.n
            - self.n_prime * self.n_prime)
            / (2.0 * self.f)
    }

    /// δ′ = (m m′ + n n′)/F
    pub fn delta_prime(&self) -> f64 {
        (self.m * self.m_prime + self.n * self.n_prime) / self.f
    }

    /// PCF order p = −iδ + δ′.
    pub fn order(&self) -> Complex64 {
        c(self.delta_prime(), -self.delta())
    }

    /// Coefficient of σx, m + im′.
    pub fn mx(&self) -> Complex64 {
        c(self.m, self.m_prime)
    }

    /// Coefficient of σy, n + in′.
    pub fn ny(&self) -> Complex64 {
        c(self.n, self.n_prime)
    }
}

/// Parameters of h(t) = Ftσz + mσx + iγσy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealGapLZParams {
    pub f: f64,
    pub m: f64,
    pub gamma: f64,
}

impl RealGapLZParams {
    pub fn new(f: f64, m: f64, gamma: f64) -> Result<Self> {
        ensure_finite("F", f)?;
        ensure_finite("m", m)?;
        ensure_finite("gamma", gamma)?;
        if f <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "sweep velocity F must be positive, got {f}"
            )));
        }
        Ok(RealGapLZParams { f, m, gamma })
    }

    /// δ = (m² − γ²)/2F; negative in the PT-broken regime.
    pub fn delta(&self) -> f64 {
        (self.m * self.m - self.gamma * self.gamma) / (2.0 * self.f)
    }

    /// e^{−2πδ}
    pub fn p_lz(&self) -> f64 {
        (-2.0 * PI * self.delta()).exp()
    }

    pub fn to_generic(&self) -> GenericLZParams {
        GenericLZParams {
            f: self.f,
            kappa: 0.0,
            m: self.m,
            n: 0.0,
            m_prime: 0.0,
            n_prime: self.gamma,
        }
    }

    pub fn hamiltonian_at(&self, t: f64) -> Complex2x2 {
        hamiltonian_at(&self.to_generic(), t)
    }

    fn check_exceptional(&self) -> Result<()> {
        if self.m.abs() == self.gamma.abs() {
            Err(Error::ExceptionalPoint {
                m: self.m,
                gamma: self.gamma,
            })
        } else {
            Ok(())
        }
    }
}

/// Biorthogonal band weights ‖𝒫_+ψ‖², ‖𝒫_−ψ‖² of a single state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandWeights {
    pub upper: f64,
    pub lower: f64,
}

impl BandWeights {
    pub fn from_projection(p_plus: &Complex2x2, p_minus: &Complex2x2, v: [Complex64; 2]) -> Self {
        BandWeights {
            upper: norm_sqr2(p_plus.apply(v)),
            lower: norm_sqr2(p_minus.apply(v)),
        }
    }
}

/// Final band populations P_{ab}: start in band a, end in band b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPopulations {
    pub p_minus_plus: f64,
    pub p_minus_minus: f64,
    pub p_plus_minus: f64,
    pub p_plus_plus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Adiabatic,
    Diabatic,
}

impl BandPopulations {
    /// The pair (to upper, to lower) for a given initial band.
    pub fn row(&self, initial: Band) -> BandWeights {
        match initial {
            Band::Lower => BandWeights {
                upper: self.p_minus_plus,
                lower: self.p_minus_minus,
            },
            Band::Upper => BandWeights {
                upper: self.p_plus_plus,
                lower: self.p_plus_minus,
            },
        }
    }

    pub fn is_valid(&self) -> bool {
        [
            self.p_minus_plus,
            self.p_minus_minus,
            self.p_plus_minus,
            self.p_plus_plus,
        ]
        .iter()
        .all(|x| x.is_finite() && *x >= 0.0)
    }
}

/// H(t) = (Ft + iκ)σz + (m + im′)σx + (n + in′)σy.
pub fn hamiltonian_at(params: &GenericLZParams, t: f64) -> Complex2x2 {
    Complex2x2::from_pauli(params.mx(), params.ny(), c(params.f * t, params.kappa))
}

/// (E+, E−) with E+ the principal square root of −det h. The traceless part
/// of `h` is used.
pub fn adiabatic_spectrum(h: &Complex2x2) -> (Complex64, Complex64) {
    let d = -traceless(h).det();
    // +0.0 turns a signed zero imaginary part positive, so a negative real
    // radicand gives E+ on the positive imaginary axis
    let e = c(d.re, d.im + 0.0).sqrt();
    (e, -e)
}

fn traceless(h: &Complex2x2) -> Complex2x2 {
    let half = h.trace() * 0.5;
    *h - Complex2x2::identity().scale(half)
}

/// Spectral projectors (𝒫+, 𝒫−) = (I ± h/E+)/2 of the traceless part of h.
///
/// Equivalent to |u^R⟩⟨u^L| / ⟨u^L|u^R⟩; fails with `Degeneracy` when the two
/// eigenvalues coincide within tolerance, where that normalisation vanishes.
pub fn projectors(h: &Complex2x2) -> Result<(Complex2x2, Complex2x2)> {
    let h0 = traceless(h);
    let (e, _) = adiabatic_spectrum(&h0);
    let scale = h0.max_abs();
    if !(e.norm() > DEGENERACY_TOL * scale) {
        return Err(Error::Degeneracy(format!(
            "|E+| = {:e} against |H| = {scale:e}",
            e.norm()
        )));
    }
    let q = h0.scale(e.inv() * 0.5);
    let half = Complex2x2::identity().scale(c(0.5, 0.0));
    Ok((half + q, half - q))
}

/// Unit right eigenvector of a traceless h for eigenvalue `e`.
pub fn right_eigenvector(h: &Complex2x2, e: Complex64) -> Result<[Complex64; 2]> {
    let h0 = traceless(h);
    let (a, b, cc) = (h0.get(0, 0), h0.get(0, 1), h0.get(1, 0));
    // rows of (h − e) give two candidate null vectors; keep the larger
    let v1 = [b, e - a];
    let v2 = [e + a, cc];
    let v = if norm_sqr2(v1) >= norm_sqr2(v2) { v1 } else { v2 };
    let nrm = norm_sqr2(v).sqrt();
    if !(nrm > DEGENERACY_TOL * h0.max_abs().max(e.norm())) || !nrm.is_finite() {
        return Err(Error::Degeneracy("eigenvector vanishes".into()));
    }
    Ok([v[0] / nrm, v[1] / nrm])
}

/// Closed-form U(t_f, t_i) of the κ = 0 generic Hamiltonian in terms of
/// parabolic cylinder functions with τ = e^{iπ/4}√(2F)·t.
pub fn closed_form_evolution(params: &GenericLZParams, t_i: f64, t_f: f64) -> Result<Complex2x2> {
    closed_form_evolution_with(&Pcf::default(), params, t_i, t_f)
}

pub fn closed_form_evolution_with(
    pcf: &Pcf,
    params: &GenericLZParams,
    t_i: f64,
    t_f: f64,
) -> Result<Complex2x2> {
    ensure_finite("t_i", t_i)?;
    ensure_finite("t_f", t_f)?;
    if params.kappa != 0.0 {
        return Err(Error::InvalidInput(
            "closed form needs kappa = 0; use the propagator for kappa != 0".into(),
        ));
    }
    if t_f == t_i {
        return Ok(Complex2x2::identity());
    }
    let f = params.f;
    let mx = params.mx();
    let ny = params.ny();
    // H12 = m+im′ − i(n+in′), H21 = m+im′ + i(n+in′)
    let h12 = mx - Complex64::i() * ny;
    let h21 = mx + Complex64::i() * ny;
    let scale = mx.norm().max(ny.norm()).max(f.sqrt());
    if h12.norm() == 0.0 && h21.norm() == 0.0 {
        // no coupling: pure diabatic phases
        let ph = c(0.0, -0.5 * f * (t_f * t_f - t_i * t_i)).exp();
        return Ok(Complex2x2::diag(ph, ph.inv()));
    }
    if h21.norm() < 1e-9 * scale {
        return Ok(upper_triangular(pcf, f, h12, t_i, t_f)?);
    }
    let p = params.order();
    // Wronskian D_p(z)D_{p−1}(−z) + D_p(−z)D_{p−1}(z) = √(2π)/Γ(1−p)
    let w = SQRT_2PI * recip_gamma(1.0 - p);
    if w.norm() == 0.0 {
        return Err(Error::Domain(format!(
            "order p = {p} is a positive integer; the two solutions are dependent"
        )));
    }
    let rot = Complex64::from_polar((2.0 * f).sqrt(), FRAC_PI_4);
    let (ti, tf) = (rot * t_i, rot * t_f);
    let d = |q: Complex64, z: Complex64| pcf.eval(q, z).map(|r| r.value);
    let pm1 = p - 1.0;
    let (dp_f, dp_mf) = (d(p, tf)?, d(p, -tf)?);
    let (dp_i, dp_mi) = (d(p, ti)?, d(p, -ti)?);
    let (dq_f, dq_mf) = (d(pm1, tf)?, d(pm1, -tf)?);
    let (dq_i, dq_mi) = (d(pm1, ti)?, d(pm1, -ti)?);
    // C_AB = √(2F) e^{−iπ/4} / H21
    let cab = Complex64::from_polar((2.0 * f).sqrt(), -FRAC_PI_4) / h21;
    let u11 = (dp_f * dq_mi + dp_mf * dq_i) / w;
    let u12 = (dp_f * dp_mi - dp_mf * dp_i) / w * cab;
    let u21 = (dq_f * dq_mi - dq_mf * dq_i) / w / cab;
    let u22 = (dp_mi * dq_f + dp_i * dq_mf) / w;
    let u = Complex2x2::new(u11, u12, u21, u22);
    if !u.is_finite() {
        return Err(Error::Domain(
            "evolution matrix overflowed double precision".into(),
        ));
    }
    Ok(u)
}

/// H21 = 0: b evolves by a pure phase and a is driven by a Fresnel integral.
fn upper_triangular(
    pcf: &Pcf,
    f: f64,
    h12: Complex64,
    t_i: f64,
    t_f: f64,
) -> Result<Complex2x2> {
    let u11 = c(0.0, -0.5 * f * (t_f * t_f - t_i * t_i)).exp();
    let u22 = u11.inv();
    let integral = fresnel_primitive(pcf, f, t_f)? - fresnel_primitive(pcf, f, t_i)?;
    let u12 = -Complex64::i() * h12 * c(0.0, -0.5 * f * (t_f * t_f + t_i * t_i)).exp() * integral;
    Ok(Complex2x2::new(u11, u12, c(0.0, 0.0), u22))
}

/// A primitive of e^{iFs²}: −e^{−z²/4}D_{−1}(z)/(e^{−iπ/4}√(2F)) with
/// z = e^{−iπ/4}√(2F)s.
fn fresnel_primitive(pcf: &Pcf, f: f64, s: f64) -> Result<Complex64> {
    let k = Complex64::from_polar((2.0 * f).sqrt(), -FRAC_PI_4);
    let z = k * s;
    let d = pcf.eval(c(-1.0, 0.0), z)?.value;
    Ok(-(-z * z * 0.25).exp() * d / k)
}

/// Band populations after evolving from −T to +T.
///
/// Adiabatic basis: P_{ab} = ‖𝒫_b(T) U u_a(−T)‖² with u_a the unit right
/// eigenvector. Diabatic basis: squared moduli of the entries of U.
pub fn band_populations(params: &GenericLZParams, t: f64, basis: Basis) -> Result<BandPopulations> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("T must be positive, got {t}")));
    }
    let u = if params.kappa == 0.0 {
        closed_form_evolution(params, -t, t)?
    } else {
        let p = *params;
        evolution_matrix(
            move |s| hamiltonian_at(&p, s),
            -t,
            t,
            &IntegratorConfig::default(),
        )?
    };
    match basis {
        Basis::Diabatic => Ok(BandPopulations {
            p_minus_plus: u.get(0, 0).norm_sqr(),
            p_minus_minus: u.get(1, 0).norm_sqr(),
            p_plus_minus: u.get(0, 1).norm_sqr(),
            p_plus_plus: u.get(1, 1).norm_sqr(),
        }),
        Basis::Adiabatic => adiabatic_populations(&u, &hamiltonian_at(params, -t), &hamiltonian_at(params, t)),
    }
}

/// Adiabatic-basis populations of an evolution matrix between instants with
/// Hamiltonians `h_i` and `h_f`.
pub fn adiabatic_populations(
    u: &Complex2x2,
    h_i: &Complex2x2,
    h_f: &Complex2x2,
) -> Result<BandPopulations> {
    let (e_plus, e_minus) = adiabatic_spectrum(h_i);
    let (pp, pm) = projectors(h_f)?;
    let lower = u.apply(right_eigenvector(h_i, e_minus)?);
    let upper = u.apply(right_eigenvector(h_i, e_plus)?);
    let from_lower = BandWeights::from_projection(&pp, &pm, lower);
    let from_upper = BandWeights::from_projection(&pp, &pm, upper);
    Ok(BandPopulations {
        p_minus_plus: from_lower.upper,
        p_minus_minus: from_lower.lower,
        p_plus_minus: from_upper.lower,
        p_plus_plus: from_upper.upper,
    })
}

/// Large-T behaviour of one population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum AsymptoticBranch {
    /// Tends to a finite constant.
    Constant { value: f64 },
    /// Grows or decays as T^exponent.
    PowerLaw { exponent: f64 },
    /// Marginal case: mean + amplitude·sin(2Φ(z_a) − phase).
    Oscillatory {
        mean: f64,
        amplitude: f64,
        phase: f64,
    },
}

impl AsymptoticBranch {
    /// Value at z_a = √F·T for the constant and oscillatory branches.
    pub fn value_at(&self, delta: f64, z_a: f64) -> Option<f64> {
        match *self {
            AsymptoticBranch::Constant { value } => Some(value),
            AsymptoticBranch::PowerLaw { .. } => None,
            AsymptoticBranch::Oscillatory {
                mean,
                amplitude,
                phase,
            } => {
                let big_phi = 0.5 * z_a * z_a + delta * (std::f64::consts::SQRT_2 * z_a).ln();
                Some(mean + amplitude * (2.0 * big_phi - phase).sin())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticClassification {
    pub basis: Basis,
    /// P_{−+}
    pub to_upper: AsymptoticBranch,
    /// P_{−−}
    pub to_lower: AsymptoticBranch,
}

fn near(x: f64, y: f64) -> bool {
    (x - y).abs() <= BOUNDARY_TOL
}

/// g₀ = (m² + n² − m′² − n′²)/((m + n′)² + (m′ − n)²)
pub fn g0(p: &GenericLZParams) -> f64 {
    (p.m * p.m + p.n * p.n - p.m_prime * p.m_prime - p.n_prime * p.n_prime)
        / ((p.m + p.n_prime).powi(2) + (p.m_prime - p.n).powi(2))
}

/// g₁ = ((m′ + n)² + (m − n′)²)/(m² + n² − m′² − n′²)
pub fn g1(p: &GenericLZParams) -> f64 {
    ((p.m_prime + p.n).powi(2) + (p.m - p.n_prime).powi(2))
        / (p.m * p.m + p.n * p.n - p.m_prime * p.m_prime - p.n_prime * p.n_prime)
}

/// g₃ = (δ² + 9)/(δ²(δ² + 1)(δ² + 4))·g₀
pub fn g3(p: &GenericLZParams) -> f64 {
    let d2 = p.delta().powi(2);
    (d2 + 9.0) / (d2 * (d2 + 1.0) * (d2 + 4.0)) * g0(p)
}

/// Large-T classification of P_{−+} and P_{−−}. `params` only feeds the g
/// constants of the marginal branches.
pub fn asymptotic_band_populations(
    delta: f64,
    delta_prime: f64,
    params: &GenericLZParams,
    basis: Basis,
) -> AsymptoticClassification {
    let p_lz = (-2.0 * PI * delta).exp();
    let one_minus = -(-2.0 * PI * delta).exp_m1();
    let (edge, slope_offset) = match basis {
        Basis::Adiabatic => (1.5, 6.0),
        Basis::Diabatic => (0.5, 2.0),
    };
    let dp = delta_prime.abs();
    let to_upper = if near(dp, edge) {
        match basis {
            Basis::Adiabatic => {
                let d2 = delta * delta + 0.25;
                AsymptoticBranch::Oscillatory {
                    mean: (1.0 + p_lz) / d2 + p_lz,
                    amplitude: -2.0 * (-PI * delta).exp() * ((1.0 + p_lz) / d2).sqrt(),
                    phase: arg_gamma(c(-0.5, delta)),
                }
            }
            Basis::Diabatic => AsymptoticBranch::Oscillatory {
                mean: 1.0 + 2.0 * p_lz,
                amplitude: -2.0 * (-PI * delta).exp() * (1.0 + p_lz).sqrt(),
                phase: arg_gamma(c(0.5, delta)),
            },
        }
    } else if dp < edge {
        AsymptoticBranch::Constant { value: p_lz }
    } else {
        AsymptoticBranch::PowerLaw {
            exponent: 4.0 * dp - slope_offset,
        }
    };
    let shifted = (delta_prime - edge).abs();
    let to_lower = if near(shifted, edge) {
        let g = match basis {
            Basis::Adiabatic if near(delta_prime, 0.0) => g0(params),
            Basis::Adiabatic => g3(params),
            Basis::Diabatic if near(delta_prime, 0.0) => g0(params),
            Basis::Diabatic => g1(params),
        };
        AsymptoticBranch::Constant {
            value: g * one_minus,
        }
    } else if shifted < edge {
        AsymptoticBranch::Constant { value: 0.0 }
    } else {
        AsymptoticBranch::PowerLaw {
            exponent: 4.0 * shifted - slope_offset,
        }
    };
    AsymptoticClassification {
        basis,
        to_upper,
        to_lower,
    }
}

/// Stokes phase φ_s = π/4 + δ(ln|δ| − 1) − arg Γ(1 + iδ), with φ_s(0) = π/4.
pub fn phi_s(delta: f64) -> f64 {
    let log_term = if delta == 0.0 {
        0.0
    } else {
        delta * (delta.abs().ln() - 1.0)
    };
    FRAC_PI_4 + log_term - arg_gamma(c(1.0, delta))
}

/// Large-T real-gap evolution matrix with the adiabatic dynamical phase
/// dropped.
pub fn real_gap_asymptotic_u(params: &RealGapLZParams) -> Result<Complex2x2> {
    params.check_exceptional()?;
    let (m, g) = (params.m, params.gamma);
    let delta = params.delta();
    let diag = c((-PI * delta).exp(), 0.0);
    // 1 − e^{−2πδ}; the products below are nonnegative in every sign sector
    let one_minus = -(-2.0 * PI * delta).exp_m1();
    let a = ((m + g) / (m - g) * one_minus).max(0.0).sqrt();
    let b = ((m - g) / (m + g) * one_minus).max(0.0).sqrt();
    let ps = phi_s(delta);
    let u12 = Complex64::from_polar(signum(m + g) * a, -ps);
    let u21 = Complex64::from_polar(signum(g - m) * b, ps);
    Ok(Complex2x2::new(diag, u12, u21, diag))
}

fn signum(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Large-T real-gap populations.
pub fn real_gap_populations(params: &RealGapLZParams) -> Result<BandPopulations> {
    params.check_exceptional()?;
    let (m, g) = (params.m, params.gamma);
    let p_lz = params.p_lz();
    let one_minus = -(-2.0 * PI * params.delta()).exp_m1();
    Ok(BandPopulations {
        p_minus_plus: p_lz,
        p_plus_minus: p_lz,
        p_minus_minus: (m - g) / (m + g) * one_minus,
        p_plus_plus: (m + g) / (m - g) * one_minus,
    })
}

/// χ(δ) = π/4 − arg Γ(½ + iδ/2) − arg Γ(1 − iδ/2)
pub fn chi(delta: f64) -> f64 {
    FRAC_PI_4 - arg_gamma(c(0.5, 0.5 * delta)) - arg_gamma(c(1.0, -0.5 * delta))
}

/// Dimensionless LZ transition time |1 − P|/(√(2δ(1 − P)) cos χ(δ)), in
/// units of 1/√F.
///
/// Written as √((1 − P)/(2δ))/cos χ, which is regular at δ = 0 where it
/// takes the value √(2π).
pub fn scaled_lz_transition_time(delta: f64) -> Result<f64> {
    ensure_finite("delta", delta)?;
    let ratio = if delta == 0.0 {
        PI
    } else {
        -(-2.0 * PI * delta).exp_m1() / (2.0 * delta)
    };
    Ok(ratio.sqrt() / chi(delta).cos())
}

/// LZ transition time in the time units of `params`.
pub fn lz_transition_time(params: &RealGapLZParams) -> Result<f64> {
    Ok(scaled_lz_transition_time(params.delta())? / params.f.sqrt())
}

/// The three limiting forms of the transition time: e^{−πδ}/√(−2δ) for
/// δ ≪ −1, √(2π) for |δ| ≪ 1 and 2√(2δ) for δ ≫ 1, chosen by the nearest
/// regime (|δ| < 1 counts as small).
pub fn lz_transition_time_limit(delta: f64) -> f64 {
    if delta.abs() < 1.0 {
        SQRT_2PI
    } else if delta < 0.0 {
        (-PI * delta).exp() / (-2.0 * delta).sqrt()
    } else {
        2.0 * (2.0 * delta).sqrt()
    }
}

/// ∫₀ᵀ Re √(F²t² + 2Fδ) dt, the dynamical phase of the upper band on one
/// side of a real-gap crossing.
pub fn real_gap_dynamical_phase(params: &RealGapLZParams, t: f64) -> f64 {
    let f = params.f;
    let a = 2.0 * f * params.delta();
    let u = f * t.abs();
    let val = if a > 0.0 {
        let s = (u * u + a).sqrt();
        0.5 * (u * s + a * (u / a.sqrt()).asinh())
    } else if a < 0.0 {
        let c0 = (-a).sqrt();
        if u <= c0 {
            0.0
        } else {
            let s = (u * u + a).sqrt();
            0.5 * (u * s - (-a) * ((u + s) / c0).ln())
        }
    } else {
        0.5 * u * u
    };
    (val / f).copysign(t)
}
