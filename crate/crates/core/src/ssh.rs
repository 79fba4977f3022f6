//! Gain-and-loss SSH chain in a uniform field, in the moving Bloch frame.
//!
//! h(k, t) = 2J cos(kd + ℰt)σx − 2αJ sin(kd + ℰt)σy + iγσz, with hoppings
//! J₁,₂ = J(1 ± α). Near kd + ℰt = π/2 and 3π/2 the Hamiltonian reduces to
//! a pair of real-gap LZ crossings with F = 2Jℰ and m = 2αJ.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::lzs::{compose, Dispersion, LzsCase, LzsResult, LzsSetup, PhaseSource};
use crate::matrix::Complex2x2;
use crate::propagator::{band_project, integrate_sampled, IntegratorConfig, Trajectory, TwoLevel};
use crate::twolevel::{adiabatic_spectrum, right_eigenvector, Band, RealGapLZParams};

/// Dense-output samples per Bloch period for population curves.
pub const SAMPLES_PER_PERIOD: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SshParams {
    pub j: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub e_field: f64,
    pub d: f64,
    pub n_cells: usize,
}

impl SshParams {
    pub fn new(j: f64, alpha: f64, gamma: f64, e_field: f64, d: f64, n_cells: usize) -> Result<Self> {
        for (name, x) in [("J", j), ("alpha", alpha), ("gamma", gamma), ("E", e_field), ("d", d)] {
            ensure_finite(name, x)?;
        }
        if j <= 0.0 {
            return Err(Error::InvalidInput(format!("J must be positive, got {j}")));
        }
        if d <= 0.0 {
            return Err(Error::InvalidInput(format!("d must be positive, got {d}")));
        }
        if n_cells < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 unit cells, got {n_cells}"
            )));
        }
        Ok(SshParams {
            j,
            alpha,
            gamma,
            e_field,
            d,
            n_cells,
        })
    }

    pub fn j1(&self) -> f64 {
        self.j * (1.0 + self.alpha)
    }

    pub fn j2(&self) -> f64 {
        self.j * (1.0 - self.alpha)
    }

    /// F = 2Jℰ
    pub fn sweep(&self) -> f64 {
        2.0 * self.j * self.e_field
    }

    /// m = 2αJ
    pub fn gap(&self) -> f64 {
        2.0 * self.alpha * self.j
    }

    /// δ = ((2αJ)² − γ²)/(4Jℰ)
    pub fn delta(&self) -> f64 {
        (self.gap().powi(2) - self.gamma.powi(2)) / (2.0 * self.sweep())
    }

    /// Bloch period 2π/ℰ (with d absorbed into ℰ).
    pub fn period(&self) -> f64 {
        2.0 * PI / self.e_field
    }

    fn require_field(&self) -> Result<()> {
        if self.e_field > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "field must be positive, got {}",
                self.e_field
            )))
        }
    }
}

pub fn bloch_hamiltonian(params: &SshParams, k: f64, t: f64) -> Complex2x2 {
    let th = k * params.d + params.e_field * t;
    let two_j = 2.0 * params.j;
    Complex2x2::from_pauli(
        Complex64::new(two_j * th.cos(), 0.0),
        Complex64::new(-two_j * params.alpha * th.sin(), 0.0),
        Complex64::new(0.0, params.gamma),
    )
}

/// 4J²cos²(kd) + 4α²J²sin²(kd) − γ²
pub fn radicand(params: &SshParams, kd: f64) -> f64 {
    let two_j = 2.0 * params.j;
    let (s, c) = kd.sin_cos();
    (two_j * c).powi(2) + (two_j * params.alpha * s).powi(2) - params.gamma.powi(2)
}

/// Static spectrum ±√(radicand), principal branch; purely imaginary on
/// PT-broken arcs.
pub fn band_spectrum(params: &SshParams, k: f64) -> (Complex64, Complex64) {
    let r = radicand(params, k * params.d);
    let e = if r >= 0.0 {
        Complex64::new(r.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-r).sqrt())
    };
    (e, -e)
}

/// Quasimomenta in [0, 2π/d) where the two bands coalesce.
pub fn exceptional_points(params: &SshParams) -> Vec<f64> {
    let j2 = params.j * params.j;
    let a2 = params.alpha * params.alpha;
    let g2 = params.gamma * params.gamma;
    let denom = 4.0 * j2 * (1.0 - a2);
    let num = g2 - 4.0 * a2 * j2;
    let mut kd = Vec::new();
    if denom == 0.0 {
        // flat radicand: either everywhere or nowhere
        return kd;
    }
    let c2 = num / denom;
    if !(0.0..=1.0).contains(&c2) {
        return kd;
    }
    let x = c2.sqrt().acos(); // in [0, π/2]
    for v in [x, PI - x, PI + x, 2.0 * PI - x] {
        let w = v.rem_euclid(2.0 * PI);
        if !kd.iter().any(|&u: &f64| (u - w).abs() < 1e-12) {
            kd.push(w);
        }
    }
    kd.sort_by(|a, b| a.total_cmp(b));
    kd.into_iter().map(|v| v / params.d).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Crossing {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalExpansion {
    /// Parameters of the first crossing, F = 2Jℰ, m = 2αJ.
    pub params: RealGapLZParams,
    pub case: LzsCase,
    /// Crossing time π/(2ℰ) or 3π/(2ℰ).
    pub t_cross: f64,
}

/// Linearisation about a crossing. Both crossings map onto case i with the
/// same (F, m, γ).
pub fn local_expansion(params: &SshParams, crossing: Crossing) -> Result<LocalExpansion> {
    params.require_field()?;
    let lz = RealGapLZParams::new(params.sweep(), params.gap(), params.gamma)?;
    let t_cross = match crossing {
        Crossing::First => FRAC_PI_2 / params.e_field,
        Crossing::Second => 3.0 * FRAC_PI_2 / params.e_field,
    };
    Ok(LocalExpansion {
        params: lz,
        case: LzsCase::I,
        t_cross,
    })
}

/// Initial right eigenvector of h(k0, 0) for the requested band.
pub fn initial_state(params: &SshParams, k0: f64, band: Band) -> Result<[Complex64; 2]> {
    let h = bloch_hamiltonian(params, k0, 0.0);
    let (ep, em) = adiabatic_spectrum(&h);
    right_eigenvector(
        &h,
        match band {
            Band::Upper => ep,
            Band::Lower => em,
        },
    )
}

/// Single-k two-level dynamics sampled on a uniform grid of
/// [`SAMPLES_PER_PERIOD`] points per Bloch period, with band populations.
pub fn bloch_oscillation(
    params: &SshParams,
    k0: f64,
    band0: Band,
    t_f: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    params.require_field()?;
    if !(t_f > 0.0 && t_f.is_finite()) {
        return Err(Error::InvalidInput(format!("t_f must be positive, got {t_f}")));
    }
    let n = ((SAMPLES_PER_PERIOD as f64) * t_f / params.period()).ceil().max(1.0) as usize;
    let samples: Vec<f64> = (0..=n).map(|j| t_f * j as f64 / n as f64).collect();
    bloch_oscillation_sampled(params, k0, band0, &samples, cfg)
}

/// As [`bloch_oscillation`] at caller-chosen sample times starting at 0.
pub fn bloch_oscillation_sampled(
    params: &SshParams,
    k0: f64,
    band0: Band,
    samples: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let psi0 = initial_state(params, k0, band0)?;
    let t_f = *samples
        .last()
        .ok_or_else(|| Error::InvalidInput("no sample times".into()))?;
    let p = *params;
    let h = move |t: f64| bloch_hamiltonian(&p, k0, t);
    let traj = integrate_sampled(&TwoLevel(h), &psi0, 0.0, t_f, samples, cfg)?;
    band_project(&traj, h)
}

/// Final state of one Bloch period at k0 = 0 from the lower band.
pub fn bloch_period_final(params: &SshParams, cfg: &IntegratorConfig) -> Result<Trajectory> {
    bloch_oscillation_sampled(params, 0.0, Band::Lower, &[0.0, params.period()], cfg)
}

/// Case-i adiabatic-impulse prediction for one Bloch period starting at
/// k = 0, with φ_{d±} from the static SSH dispersion between the crossings.
pub fn lzs_prediction(params: &SshParams) -> Result<LzsResult> {
    let first = local_expansion(params, Crossing::First)?;
    let second = local_expansion(params, Crossing::Second)?;
    let p = *params;
    let e: Dispersion = Arc::new(move |t| band_spectrum(&p, p.e_field * t / p.d).0);
    let setup = LzsSetup::new(
        first.params,
        first.t_cross,
        second.t_cross,
        first.case,
        PhaseSource::Dispersion(e),
    )?;
    compose(&setup)
}
