//! Real-space propagation in a gain-and-loss SSH waveguide array.
//!
//! Site m sits at x_m = m·d; even sites belong to sublattice 1 (gain). The
//! array obeys i dψ_m/dz + J_m e^{iφ}ψ_{m+1} + J_{m−1} e^{−iφ}ψ_{m−1}
//! − iγ(−1)^m ψ_m = 0 with φ = −ℰz, where bond m joins sites m and m+1.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::matrix::Complex2x2;
use crate::propagator::{integrate_sampled, Generator, IntegratorConfig};
use crate::ssh::{band_spectrum, lzs_prediction, SshParams};
use crate::twolevel::{projectors, real_gap_asymptotic_u, RealGapLZParams};

/// Edge amplitude, relative to the peak, that counts as boundary contact.
pub const EDGE_RATIO: f64 = 1e-6;

/// Nearest-neighbour chain with alternating bonds J₁, J₂, staggered ±iγ and
/// a uniform Peierls phase φ(t) = rate·t on every bond.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub j1: f64,
    pub j2: f64,
    pub gamma: f64,
    pub phase_rate: f64,
    /// +1 for H = +hopping (the SSH model), −1 for the waveguide equation.
    pub hopping_sign: f64,
    pub n_sites: usize,
    pub periodic: bool,
    pub d: f64,
}

impl Chain {
    /// The waveguide operator: −hopping, φ = −ℰz, open ends.
    pub fn waveguide(params: &SshParams) -> Self {
        Chain {
            j1: params.j1(),
            j2: params.j2(),
            gamma: params.gamma,
            phase_rate: -params.e_field,
            hopping_sign: -1.0,
            n_sites: 2 * params.n_cells,
            periodic: false,
            d: params.d,
        }
    }

    /// The SSH chain after the gauge transformation V(t): +hopping with
    /// φ = +ℰt. Its Bloch matrix is exactly [`crate::ssh::bloch_hamiltonian`].
    pub fn ssh_gauge(params: &SshParams, periodic: bool) -> Self {
        Chain {
            j1: params.j1(),
            j2: params.j2(),
            gamma: params.gamma,
            phase_rate: params.e_field,
            hopping_sign: 1.0,
            n_sites: 2 * params.n_cells,
            periodic,
            d: params.d,
        }
    }

    fn bond(&self, m: usize) -> f64 {
        if m % 2 == 0 {
            self.j1
        } else {
            self.j2
        }
    }

    pub fn position(&self, m: usize) -> f64 {
        m as f64 * self.d
    }

    /// Bloch matrix in the basis (sublattice 1, sublattice 2) with the
    /// per-site phase convention ψ_m ∝ e^{ik x_m}.
    pub fn bloch(&self, k: f64, t: f64) -> Complex2x2 {
        let th = k * self.d + self.phase_rate * t;
        let e = Complex64::from_polar(1.0, th);
        let s = self.hopping_sign;
        let h12 = (e * self.j1 + e.conj() * self.j2) * s;
        let h21 = (e.conj() * self.j1 + e * self.j2) * s;
        Complex2x2::new(
            Complex64::new(0.0, self.gamma),
            h12,
            h21,
            Complex64::new(0.0, -self.gamma),
        )
    }
}

impl Generator for Chain {
    fn dim(&self) -> usize {
        self.n_sites
    }

    fn apply(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let n = self.n_sites;
        let e = Complex64::from_polar(self.hopping_sign, self.phase_rate * t);
        let ec = Complex64::from_polar(self.hopping_sign, -self.phase_rate * t);
        for m in 0..n {
            let g = if m % 2 == 0 { self.gamma } else { -self.gamma };
            let mut acc = psi[m] * Complex64::new(0.0, g);
            if m + 1 < n {
                acc += e * self.bond(m) * psi[m + 1];
            } else if self.periodic {
                acc += e * self.bond(m) * psi[0];
            }
            if m > 0 {
                acc += ec * self.bond(m - 1) * psi[m - 1];
            } else if self.periodic {
                acc += ec * self.bond(n - 1) * psi[n - 1];
            }
            out[m] = acc;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideConfig {
    /// The array has 2·`ssh.n_cells` waveguides.
    pub ssh: SshParams,
    pub x0: f64,
    pub l: f64,
    pub z_max: f64,
    pub sample_every: f64,
}

impl WaveguideConfig {
    /// Defaults: l = 8d, ℰ = 0.05, 400 snapshots per Bloch period.
    pub fn new(ssh: SshParams, x0: f64) -> Self {
        WaveguideConfig {
            ssh,
            x0,
            l: 8.0 * ssh.d,
            z_max: ssh.period(),
            sample_every: ssh.period() / 400.0,
        }
    }

    pub fn n_sites(&self) -> usize {
        2 * self.ssh.n_cells
    }

    /// Far edge of the array.
    pub fn extent(&self) -> f64 {
        (self.n_sites() - 1) as f64 * self.ssh.d
    }

    /// −E_w/ℰ with E_w = 2E₊(k=0).
    pub fn displacement(&self) -> f64 {
        displacement(&self.ssh)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("x0", self.x0),
            ("l", self.l),
            ("z_max", self.z_max),
            ("sample_every", self.sample_every),
        ] {
            ensure_finite(name, x)?;
        }
        let d = self.ssh.d;
        if self.l < 4.0 * d {
            return Err(Error::InvalidInput(format!(
                "beam width {} is below 4d = {}",
                self.l,
                4.0 * d
            )));
        }
        if !(self.z_max > 0.0 && self.sample_every > 0.0) {
            return Err(Error::InvalidInput(
                "z_max and sample_every must be positive".into(),
            ));
        }
        let margin = 3.0 * self.l;
        let mut centres = vec![("x0", self.x0)];
        if self.ssh.e_field > 0.0 {
            centres.push(("x0 + dx", self.x0 + self.displacement()));
        }
        for (name, x) in centres {
            if x < margin || x > self.extent() - margin {
                return Err(Error::InvalidInput(format!(
                    "{name} = {x} is closer than 3l = {margin} to the array ends [0, {}]",
                    self.extent()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamState {
    pub z: f64,
    pub psi: Vec<Complex64>,
    pub d: f64,
}

impl BeamState {
    pub fn intensity(&self) -> f64 {
        self.psi.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn peak(&self) -> f64 {
        self.psi.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest edge amplitude over the peak amplitude.
    pub fn edge_ratio(&self) -> f64 {
        let peak = self.peak();
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.psi.len();
        self.psi[0].norm().max(self.psi[n - 1].norm()) / peak
    }
}

/// ψ_m(0) = (√π l)^{−1/2} exp(−(x_m − x0)²/2l²)
pub fn init_gaussian(cfg: &WaveguideConfig) -> Result<BeamState> {
    cfg.validate()?;
    let norm = 1.0 / (PI.sqrt() * cfg.l).sqrt();
    let d = cfg.ssh.d;
    let psi = (0..cfg.n_sites())
        .map(|m| {
            let s = (m as f64 * d - cfg.x0) / cfg.l;
            Complex64::new(norm * (-0.5 * s * s).exp(), 0.0)
        })
        .collect();
    Ok(BeamState { z: 0.0, psi, d })
}

#[derive(Debug, Clone)]
pub struct Propagation {
    pub snapshots: Vec<BeamState>,
    /// First snapshot at which the beam touched an edge, as a
    /// [`Error::BoundaryContamination`] warning.
    pub contamination: Option<Error>,
}

/// Snapshot positions 0, Δz, 2Δz, … and z_max itself.
pub fn snapshot_grid(z_max: f64, every: f64) -> Vec<f64> {
    let n = (z_max / every * (1.0 + 1e-12)).floor() as usize;
    let mut zs: Vec<f64> = (0..=n).map(|j| j as f64 * every).collect();
    if z_max - zs[n] > 1e-9 * every {
        zs.push(z_max);
    } else {
        zs[n] = z_max;
    }
    zs
}

pub fn propagate(
    cfg: &WaveguideConfig,
    state0: &BeamState,
    icfg: &IntegratorConfig,
) -> Result<Propagation> {
    cfg.validate()?;
    if state0.psi.len() != cfg.n_sites() {
        return Err(Error::InvalidInput(format!(
            "state has {} sites, array has {}",
            state0.psi.len(),
            cfg.n_sites()
        )));
    }
    let chain = Chain::waveguide(&cfg.ssh);
    let zs: Vec<f64> = snapshot_grid(cfg.z_max, cfg.sample_every)
        .into_iter()
        .map(|z| z + state0.z)
        .collect();
    let tf = *zs.last().unwrap();
    let traj = integrate_sampled(&chain, &state0.psi, state0.z, tf, &zs, icfg)?;
    let mut contamination = None;
    let snapshots: Vec<BeamState> = traj
        .times
        .into_iter()
        .zip(traj.states)
        .map(|(z, psi)| BeamState {
            z,
            psi,
            d: cfg.ssh.d,
        })
        .collect();
    for s in &snapshots {
        let ratio = s.edge_ratio();
        if ratio > EDGE_RATIO {
            contamination = Some(Error::BoundaryContamination { z: s.z, ratio });
            break;
        }
    }
    Ok(Propagation {
        snapshots,
        contamination,
    })
}

/// x̄ = Σ x_m|ψ_m|² / Σ|ψ_m|²
pub fn center_of_mass(state: &BeamState) -> Result<f64> {
    weighted_mean(&state.psi, state.d)
}

fn weighted_mean(psi: &[Complex64], d: f64) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for (m, a) in psi.iter().enumerate() {
        let w = a.norm_sqr();
        num += m as f64 * d * w;
        den += w;
    }
    if den == 0.0 || !den.is_finite() {
        return Err(Error::ZeroIntensity);
    }
    Ok(num / den)
}

/// Intensity summed over each two-site cell, so the gain/loss stagger does
/// not show up as a comb of spurious peaks.
pub fn cell_intensity(state: &BeamState) -> Vec<f64> {
    state
        .psi
        .chunks(2)
        .map(|q| q.iter().map(|a| a.norm_sqr()).sum())
        .collect()
}

/// Positions (cell centres) of local maxima of [`cell_intensity`] that reach
/// `rel_threshold` of the global maximum.
pub fn profile_maxima(state: &BeamState, rel_threshold: f64) -> Vec<f64> {
    let cells = cell_intensity(state);
    let top = cells.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 || cells.len() < 3 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for i in 1..cells.len() - 1 {
        if cells[i] > cells[i - 1] && cells[i] >= cells[i + 1] && cells[i] >= rel_threshold * top {
            out.push((2 * i) as f64 * state.d + 0.5 * state.d);
        }
    }
    out
}

/// Δx = −E_w/ℰ, in units of length.
pub fn displacement(params: &SshParams) -> f64 {
    let e_w = 2.0 * band_spectrum(params, 0.0).0.re;
    -e_w * params.d / params.e_field
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComAt {
    HalfPeriod,
    FullPeriod,
}

/// Adiabatic-impulse CoM at z = π/ℰ or 2π/ℰ: the component that crossed
/// into the other band sits at x0 + Δx, the rest at x0.
pub fn analytic_com(params: &SshParams, x0: f64, at: ComAt) -> Result<f64> {
    ensure_finite("x0", x0)?;
    if !(params.e_field > 0.0) {
        return Err(Error::InvalidInput(format!(
            "field must be positive, got {}",
            params.e_field
        )));
    }
    let dx = displacement(params);
    let (moved, stayed) = match at {
        ComAt::HalfPeriod => {
            let lz = RealGapLZParams::new(params.sweep(), params.gap(), params.gamma)?;
            let u = real_gap_asymptotic_u(&lz)?;
            (u.get(1, 1).norm_sqr(), u.get(0, 1).norm_sqr())
        }
        ComAt::FullPeriod => {
            let p = lzs_prediction(params)?.populations;
            (p.p_plus_minus, p.p_plus_plus)
        }
    };
    Ok(((x0 + dx) * moved + x0 * stayed) / (moved + stayed))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandDecomposition {
    pub upper_weight: f64,
    pub lower_weight: f64,
    pub upper_com: f64,
    pub lower_com: f64,
    /// Some k-points sat on an exceptional point and were left out.
    pub approximate: bool,
}

/// Split a beam into the instantaneous upper and lower Bloch bands of the
/// waveguide operator at distance z. Weights are intensities, so they sum
/// to the total intensity when γ = 0.
pub fn band_decompose(state: &BeamState, params: &SshParams, z: f64) -> Result<BandDecomposition> {
    let n = state.psi.len();
    if n % 2 != 0 || n < 4 {
        return Err(Error::InvalidInput(format!(
            "band decomposition needs an even number of sites, got {n}"
        )));
    }
    let nc = n / 2;
    let chain = Chain::waveguide(params);
    let d = state.d;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(nc);
    let inv = planner.plan_fft_inverse(nc);

    let mut sub: [Vec<Complex64>; 2] = [
        state.psi.iter().step_by(2).copied().collect(),
        state.psi.iter().skip(1).step_by(2).copied().collect(),
    ];
    for s in sub.iter_mut() {
        fwd.process(s);
    }
    let ks: Vec<f64> = (0..nc).map(|j| 2.0 * PI * j as f64 / (2.0 * d * nc as f64)).collect();

    let mut up = [vec![Complex64::default(); nc], vec![Complex64::default(); nc]];
    let mut lo = up.clone();
    let mut approximate = false;
    for (j, &k) in ks.iter().enumerate() {
        // û_s(k) = Σ_i ψ_{s,i} e^{−ik x_{s,i}}, x_{s,i} = (2i + s)d
        let shift = Complex64::from_polar(1.0, -k * d);
        let v = [sub[0][j], sub[1][j] * shift];
        match projectors(&chain.bloch(k, z)) {
            Ok((pp, pm)) => {
                let a = pp.apply(v);
                let b = pm.apply(v);
                up[0][j] = a[0];
                up[1][j] = a[1] * shift.conj();
                lo[0][j] = b[0];
                lo[1][j] = b[1] * shift.conj();
            }
            Err(Error::Degeneracy(_)) => approximate = true,
            Err(e) => return Err(e),
        }
    }
    let back = |mut comps: [Vec<Complex64>; 2]| -> Vec<Complex64> {
        for c in comps.iter_mut() {
            inv.process(c);
        }
        let scale = 1.0 / nc as f64;
        (0..n).map(|m| comps[m % 2][m / 2] * scale).collect()
    };
    let psi_up = back(up);
    let psi_lo = back(lo);
    let weight = |p: &[Complex64]| p.iter().map(|a| a.norm_sqr()).sum::<f64>();
    let (wu, wl) = (weight(&psi_up), weight(&psi_lo));
    Ok(BandDecomposition {
        upper_weight: wu,
        lower_weight: wl,
        upper_com: if wu > 0.0 { weighted_mean(&psi_up, d)? } else { f64::NAN },
        lower_com: if wl > 0.0 { weighted_mean(&psi_lo, d)? } else { f64::NAN },
        approximate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(alpha: f64, gamma: f64, e: f64, cells: usize, x0: f64) -> WaveguideConfig {
        WaveguideConfig::new(SshParams::new(1.0, alpha, gamma, e, 1.0, cells).unwrap(), x0)
    }

    #[test]
    fn gaussian_shape() {
        let c = cfg(0.1, 0.1, 0.05, 80, 120.0);
        let b = init_gaussian(&c).unwrap();
        assert!((b.psi[120].re - (PI * 64.0).powf(-0.25)).abs() < 1e-15);
        assert!((b.intensity() - 1.0).abs() < 1e-3);
        for s in 1..20 {
            assert!((b.psi[120 + s] - b.psi[120 - s]).norm() < 1e-15);
        }
        assert!((center_of_mass(&b).unwrap() - 120.0).abs() < 1e-9);
    }

    #[test]
    fn com_examples() {
        let mut psi = vec![Complex64::default(); 20];
        psi[3] = Complex64::new(1.0, 0.0);
        psi[11] = Complex64::new(0.0, 1.0);
        let b = BeamState { z: 0.0, psi, d: 1.0 };
        assert!((center_of_mass(&b).unwrap() - 7.0).abs() < 1e-15);
        let zero = BeamState {
            z: 0.0,
            psi: vec![Complex64::default(); 4],
            d: 1.0,
        };
        assert!(matches!(center_of_mass(&zero), Err(Error::ZeroIntensity)));
    }

    #[test]
    fn maxima_of_two_packets() {
        let psi: Vec<Complex64> = (0..200)
            .map(|m| {
                let x = m as f64;
                let a = (-(x - 50.0).powi(2) / 50.0).exp() + 0.3 * (-(x - 140.0).powi(2) / 50.0).exp();
                // stagger the sublattices as gain and loss would
                Complex64::new(if m % 2 == 0 { a } else { 0.6 * a }, 0.0)
            })
            .collect();
        let b = BeamState { z: 0.0, psi, d: 1.0 };
        let peaks = profile_maxima(&b, 0.05);
        assert_eq!(peaks.len(), 2);
        assert!((peaks[0] - 50.0).abs() < 2.0 && (peaks[1] - 140.0).abs() < 2.0);
        assert_eq!(profile_maxima(&b, 0.5).len(), 1);
    }

    #[test]
    fn displacement_value() {
        let c = cfg(0.1, 0.1, 0.05, 80, 120.0);
        let e_w = 2.0 * (4.0f64 - 0.01).sqrt();
        assert!((e_w - 3.99500).abs() < 1e-5);
        assert!((c.displacement() + e_w / 0.05).abs() < 1e-12);
    }

    #[test]
    fn rejects_narrow_or_edge_beams() {
        let mut c = cfg(0.1, 0.1, 0.05, 80, 120.0);
        c.l = 3.0;
        assert!(c.validate().is_err());
        assert!(cfg(0.1, 0.1, 0.05, 80, 40.0).validate().is_err());
        assert!(cfg(0.1, 0.1, 0.05, 80, 150.0).validate().is_err());
        assert!(cfg(0.1, 0.1, 0.05, 80, 120.0).validate().is_ok());
    }

    #[test]
    fn bloch_matrix_matches_chain() {
        let p = SshParams::new(1.0, 0.3, 0.2, 0.07, 1.0, 8).unwrap();
        for chain in [Chain::waveguide(&p), Chain::ssh_gauge(&p, true)] {
            let mut chain = chain;
            chain.periodic = true;
            let n = chain.n_sites;
            let k = 2.0 * PI * 3.0 / (2.0 * n as f64 / 2.0);
            let t = 1.3;
            let h = chain.bloch(k, t);
            let u = [Complex64::new(0.3, 0.1), Complex64::new(-0.7, 0.4)];
            let psi: Vec<Complex64> = (0..n)
                .map(|m| u[m % 2] * Complex64::from_polar(1.0, k * m as f64))
                .collect();
            let mut out = vec![Complex64::default(); n];
            chain.apply(t, &psi, &mut out);
            let hu = h.apply(u);
            for m in 0..n {
                let want = hu[m % 2] * Complex64::from_polar(1.0, k * m as f64);
                assert!((out[m] - want).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn gauge_chain_is_the_ssh_bloch_hamiltonian() {
        let p = SshParams::new(1.0, 0.2, 0.15, 0.03, 1.0, 8).unwrap();
        let chain = Chain::ssh_gauge(&p, true);
        for (k, t) in [(0.0, 0.0), (0.4, 2.0), (1.1, 7.5)] {
            let a = chain.bloch(k, t);
            let b = crate::ssh::bloch_hamiltonian(&p, k, t);
            assert!(a.max_abs_diff(&b) < 1e-14);
        }
    }

    #[test]
    fn snapshot_grid_ends_at_z_max() {
        let g = snapshot_grid(1.0, 0.3);
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
        let g = snapshot_grid(1.2, 0.3);
        assert_eq!(g.len(), 5);
    }
}
