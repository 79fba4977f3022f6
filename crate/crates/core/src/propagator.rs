//! Adaptive integration of i dψ/dt = H(t) ψ for non-Hermitian H.
//!
//! Dormand–Prince 5(4) with a complex state vector, FSAL stages and cubic
//! Hermite dense output. The norm is never renormalised: gain and loss are
//! part of the physics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Complex2x2;
use crate::twolevel::{projectors, BandWeights};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const UNDERFLOW: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub dense_output: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            dense_output: false,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        IntegratorConfig {
            rel_tol,
            abs_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidInput(format!(
                "max_step must be positive, got {}",
                self.max_step
            )));
        }
        Ok(())
    }
}

/// Time-dependent linear generator H(t).
pub trait Generator {
    fn dim(&self) -> usize;
    /// `out = H(t)·psi`
    fn apply(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]);
}

/// Two-level generator from a closure returning H(t).
pub struct TwoLevel<F>(pub F);

impl<F: Fn(f64) -> Complex2x2> Generator for TwoLevel<F> {
    fn dim(&self) -> usize {
        2
    }

    fn apply(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let v = (self.0)(t).apply([psi[0], psi[1]]);
        out[0] = v[0];
        out[1] = v[1];
    }
}

/// Stored solution. `times` is strictly monotone in the direction of
/// integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    /// Filled by [`band_project`]; `None` entries mark degenerate times.
    pub populations: Option<Vec<Option<BandWeights>>>,
    derivs: Vec<Vec<Complex64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &[Complex64] {
        self.states.last().expect("trajectory holds at least one state")
    }

    /// Hermite interpolation between stored points. Only available when the
    /// trajectory was produced with `dense_output`.
    pub fn interpolate(&self, t: f64) -> Option<Vec<Complex64>> {
        if self.derivs.len() != self.times.len() || self.times.is_empty() {
            return None;
        }
        let (t0, tn) = (self.times[0], *self.times.last().unwrap());
        let forward = tn >= t0;
        let inside = if forward {
            t >= t0 && t <= tn
        } else {
            t <= t0 && t >= tn
        };
        if !inside {
            return None;
        }
        let j = self
            .times
            .partition_point(|&s| if forward { s <= t } else { s >= t })
            .clamp(1, self.times.len().max(2) - 1);
        if self.times.len() == 1 {
            return Some(self.states[0].clone());
        }
        Some(hermite(
            self.times[j - 1],
            &self.states[j - 1],
            &self.derivs[j - 1],
            self.times[j],
            &self.states[j],
            &self.derivs[j],
            t,
        ))
    }
}

fn hermite(
    t0: f64,
    y0: &[Complex64],
    f0: &[Complex64],
    t1: f64,
    y1: &[Complex64],
    f1: &[Complex64],
    t: f64,
) -> Vec<Complex64> {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    (0..y0.len())
        .map(|i| y0[i] * h00 + f0[i] * (h10 * h) + y1[i] * h01 + f1[i] * (h11 * h))
        .collect()
}

/// One accepted step, handed to the observer.
struct Step<'a> {
    t0: f64,
    y0: &'a [Complex64],
    f0: &'a [Complex64],
    t1: f64,
    y1: &'a [Complex64],
    f1: &'a [Complex64],
}

fn rhs<G: Generator + ?Sized>(g: &G, t: f64, y: &[Complex64], out: &mut [Complex64]) {
    g.apply(t, y, out);
    for v in out.iter_mut() {
        // -i·(H ψ)
        *v = Complex64::new(v.im, -v.re);
    }
}

fn sup_norm(y: &[Complex64]) -> f64 {
    y.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn drive<G, O>(
    g: &G,
    psi0: &[Complex64],
    t_i: f64,
    t_f: f64,
    cfg: &IntegratorConfig,
    mut observe: O,
) -> Result<Vec<Complex64>>
where
    G: Generator + ?Sized,
    O: FnMut(Step<'_>),
{
    cfg.validate()?;
    let n = g.dim();
    if psi0.len() != n {
        return Err(Error::InvalidInput(format!(
            "initial state has length {}, generator has dimension {n}",
            psi0.len()
        )));
    }
    if !(t_i.is_finite() && t_f.is_finite()) {
        return Err(Error::InvalidInput("integration limits must be finite".into()));
    }
    if psi0.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::InvalidInput("initial state must be finite".into()));
    }
    if sup_norm(psi0) == 0.0 {
        return Err(Error::InvalidInput("initial state must be nonzero".into()));
    }
    let mut y = psi0.to_vec();
    if t_f == t_i {
        return Ok(y);
    }
    let span = (t_f - t_i).abs();
    let dir = (t_f - t_i).signum();
    let zero = Complex64::new(0.0, 0.0);
    let mut k: Vec<Vec<Complex64>> = vec![vec![zero; n]; 7];
    let mut ytmp = vec![zero; n];
    let mut ynew = vec![zero; n];
    let mut t = t_i;
    rhs(g, t, &y, &mut k[0]);

    // Starting step from the usual two-norm heuristic.
    let sc0 = cfg.abs_tol + cfg.rel_tol * sup_norm(&y);
    let d0 = sup_norm(&y) / sc0;
    let d1 = sup_norm(&k[0]) / sc0;
    let mut h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h = h.min(cfg.max_step).min(span);

    loop {
        let remaining = (t_f - t) * dir;
        if remaining <= 0.0 {
            break;
        }
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let hs = h * dir;
        for s in 1..7 {
            let (done, rest) = k.split_at_mut(s);
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in done.iter().enumerate() {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += kj[i] * (hs * a);
                    }
                }
                ytmp[i] = acc;
            }
            rhs(g, t + C[s] * hs, &ytmp, &mut rest[0]);
        }
        // the last stage is evaluated at the fifth-order solution (FSAL)
        ynew.copy_from_slice(&ytmp);
        let scale = cfg.abs_tol + cfg.rel_tol * sup_norm(&y).max(sup_norm(&ynew));
        let mut err = 0.0f64;
        for i in 0..n {
            let mut e = zero;
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += kj[i] * E[j];
                }
            }
            err = err.max((e * hs).norm() / scale);
        }
        if !err.is_finite() {
            h *= MIN_FACTOR;
        } else if err <= 1.0 {
            let t_new = if last { t_f } else { t + hs };
            observe(Step {
                t0: t,
                y0: &y,
                f0: &k[0],
                t1: t_new,
                y1: &ynew,
                f1: &k[6],
            });
            t = t_new;
            y.copy_from_slice(&ynew);
            let f_last = k[6].clone();
            k[0].copy_from_slice(&f_last);
            if last {
                break;
            }
            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            h = (h * factor).min(cfg.max_step);
            continue;
        } else {
            h *= (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
        }
        if h < UNDERFLOW * span {
            return Err(Error::StepUnderflow { t, h });
        }
    }
    Ok(y)
}

/// Integrate from `t_i` to `t_f` (either direction), storing every accepted
/// step. With `dense_output` the stage derivatives are kept as well so that
/// [`Trajectory::interpolate`] works.
pub fn integrate<G: Generator + ?Sized>(
    g: &G,
    psi0: &[Complex64],
    t_i: f64,
    t_f: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let mut times = vec![t_i];
    let mut states = vec![psi0.to_vec()];
    let mut derivs = Vec::new();
    let dense = cfg.dense_output;
    drive(g, psi0, t_i, t_f, cfg, |s| {
        if dense && derivs.is_empty() {
            derivs.push(s.f0.to_vec());
        }
        times.push(s.t1);
        states.push(s.y1.to_vec());
        if dense {
            derivs.push(s.f1.to_vec());
        }
    })?;
    if dense && derivs.is_empty() {
        let mut f = vec![Complex64::new(0.0, 0.0); psi0.len()];
        rhs(g, t_i, psi0, &mut f);
        derivs.push(f);
    }
    Ok(Trajectory {
        times,
        states,
        populations: None,
        derivs,
    })
}

/// Integrate and sample the solution at `samples` (monotone in the direction
/// of integration, inside `[t_i, t_f]`) by Hermite interpolation.
pub fn integrate_sampled<G: Generator + ?Sized>(
    g: &G,
    psi0: &[Complex64],
    t_i: f64,
    t_f: f64,
    samples: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let dir = (t_f - t_i).signum();
    let lo = t_i.min(t_f);
    let hi = t_i.max(t_f);
    for w in samples.windows(2) {
        if (w[1] - w[0]) * dir <= 0.0 {
            return Err(Error::InvalidInput(
                "sample times must be strictly monotone along the integration".into(),
            ));
        }
    }
    if samples.iter().any(|&s| s < lo || s > hi) {
        return Err(Error::InvalidInput(
            "sample times must lie inside the integration interval".into(),
        ));
    }
    let mut states = Vec::with_capacity(samples.len());
    let mut next = 0;
    while next < samples.len() && samples[next] == t_i {
        states.push(psi0.to_vec());
        next += 1;
    }
    let last = drive(g, psi0, t_i, t_f, cfg, |s| {
        while next < samples.len() && (samples[next] - s.t1) * dir <= 0.0 {
            states.push(hermite(s.t0, s.y0, s.f0, s.t1, s.y1, s.f1, samples[next]));
            next += 1;
        }
    })?;
    while next < samples.len() {
        states.push(last.clone());
        next += 1;
    }
    Ok(Trajectory {
        times: samples.to_vec(),
        states,
        populations: None,
        derivs: Vec::new(),
    })
}

/// Final state only; nothing is stored along the way.
pub fn final_state<G: Generator + ?Sized>(
    g: &G,
    psi0: &[Complex64],
    t_i: f64,
    t_f: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<Complex64>> {
    drive(g, psi0, t_i, t_f, cfg, |_| {})
}

/// U(t_f, t_i) of a two-level generator, column by column.
pub fn evolution_matrix<F: Fn(f64) -> Complex2x2>(
    h: F,
    t_i: f64,
    t_f: f64,
    cfg: &IntegratorConfig,
) -> Result<Complex2x2> {
    let g = TwoLevel(h);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let c0 = final_state(&g, &[one, zero], t_i, t_f, cfg)?;
    let c1 = final_state(&g, &[zero, one], t_i, t_f, cfg)?;
    Ok(Complex2x2::from_columns([c0[0], c0[1]], [c1[0], c1[1]]))
}

/// Fill in biorthogonal band weights ‖𝒫_±(t)ψ(t)‖² at every stored time.
pub fn band_project<F: Fn(f64) -> Complex2x2>(traj: &Trajectory, h: F) -> Result<Trajectory> {
    let mut pops = Vec::with_capacity(traj.len());
    for (t, psi) in traj.times.iter().zip(&traj.states) {
        if psi.len() != 2 {
            return Err(Error::InvalidInput(
                "band projection needs a two-level trajectory".into(),
            ));
        }
        let v = [psi[0], psi[1]];
        pops.push(match projectors(&h(*t)) {
            Ok((pp, pm)) => Some(BandWeights::from_projection(&pp, &pm, v)),
            Err(Error::Degeneracy(_)) => None,
            Err(e) => return Err(e),
        });
    }
    let mut out = traj.clone();
    out.populations = Some(pops);
    Ok(out)
}
