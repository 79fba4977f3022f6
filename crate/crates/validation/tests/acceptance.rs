//! One line per acceptance criterion. Exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use lzslab::lzs::{analytic_populations, compose_with_phases, LzsCase};
use lzslab::propagator::{evolution_matrix, IntegratorConfig};
use lzslab::ssh::{bloch_oscillation, bloch_period_final, lzs_prediction, SshParams};
use lzslab::twolevel::{
    adiabatic_populations, band_populations, hamiltonian_at, lz_transition_time_limit, phi_s,
    scaled_lz_transition_time, Band, Basis, GenericLZParams, RealGapLZParams,
};
use lzslab::waveguide::{
    analytic_com, center_of_mass, init_gaussian, profile_maxima, propagate, ComAt,
    WaveguideConfig,
};
use lzslab::{selftest, Result};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn tight() -> IntegratorConfig {
    IntegratorConfig::with_tolerances(1e-11, 1e-13)
}

/// Adiabatic-basis populations from direct integration over [−T, T].
fn ode_populations(p: &GenericLZParams, t: f64) -> Result<lzslab::twolevel::BandPopulations> {
    let q = *p;
    let u = evolution_matrix(move |s| hamiltonian_at(&q, s), -t, t, &tight())?;
    adiabatic_populations(&u, &hamiltonian_at(p, -t), &hamiltonian_at(p, t))
}

fn lz_constant() -> Result<Outcome> {
    let p = GenericLZParams::from_adiabatic(9.0 / 32.0, 0.0)?;
    let got = ode_populations(&p, 40.0)?.p_minus_plus;
    let want = (-2.0 * PI * 9.0 / 32.0).exp();
    let rel = (got / want - 1.0).abs();
    outcome(
        rel <= 1e-2,
        format!("P_-+ = {got:.6}, e^(-2 pi delta) = {want:.6}, rel {rel:.2e} (tol 1e-2)"),
    )
}

fn power_laws() -> Result<Outcome> {
    let zs: Vec<f64> = linspace(20f64.ln(), 80f64.ln(), 25).into_iter().map(f64::exp).collect();
    let lz: Vec<f64> = zs.iter().map(|z| z.ln()).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for dp in [2.0, 2.5] {
        let p = GenericLZParams::from_adiabatic(9.0 / 32.0, dp)?;
        let mut up = Vec::new();
        let mut down = Vec::new();
        for &z in &zs {
            let q = band_populations(&p, z, Basis::Adiabatic)?;
            up.push(q.p_minus_plus.ln());
            down.push(q.p_minus_minus.ln());
        }
        let (s_up, s_down) = (slope(&lz, &up), slope(&lz, &down));
        let (e_up, e_down) = (4.0 * dp - 6.0, 4.0 * (dp - 1.5f64).abs() - 6.0);
        ok &= (s_up - e_up).abs() <= 0.1 && (s_down - e_down).abs() <= 0.1;
        parts.push(format!(
            "dp={dp}: P_-+ slope {s_up:.3} (want {e_up}), P_-- slope {s_down:.3} (want {e_down})"
        ));
    }
    outcome(ok, format!("{} (tol 0.1)", parts.join("; ")))
}

fn closed_form_oracle() -> Result<Outcome> {
    let worst = selftest::closed_form_vs_ode()?;
    outcome(
        worst <= 1e-6,
        format!("50 draws, max entry difference / max(1, |U|) = {worst:.2e} (tol 1e-6)"),
    )
}

fn gain_ratio() -> Result<Outcome> {
    let lz = RealGapLZParams::new(0.02, 0.2, 0.1)?;
    let t = 40.0 / lz.f.sqrt();
    let q = ode_populations(&lz.to_generic(), t)?;
    let ratio = q.p_plus_plus / q.p_minus_minus;
    let rel = (ratio / 9.0 - 1.0).abs();
    outcome(
        rel <= 1e-2,
        format!("P_++/P_-- = {ratio:.5}, want 9, rel {rel:.2e} (tol 1e-2)"),
    )
}

fn perfect_transmission() -> Result<Outcome> {
    let (f, m) = (1.0, 0.2);
    let p = RealGapLZParams::new(f, m, m)?.to_generic();
    let u = evolution_matrix(move |s| hamiltonian_at(&p, s), -40.0, 40.0, &tight())?;
    let up = u.get(0, 0).norm_sqr();
    let off = u.get(0, 1).norm();
    let want = 2.0 * m * (PI / f).sqrt();
    let rel = (off / want - 1.0).abs();
    outcome(
        (up - 1.0).abs() <= 1e-4 && rel <= 1e-2,
        format!(
            "|U11|^2 = {up:.8} (tol 1e-4), |U12| = {off:.5} vs 2m sqrt(pi/F) = {want:.5}, rel {rel:.2e} (tol 1e-2)"
        ),
    )
}

fn transition_time_limits() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for delta in [-3.0, 1e-3, 10.0] {
        let exact = scaled_lz_transition_time(delta)?;
        let limit = lz_transition_time_limit(delta);
        let rel = (exact / limit - 1.0).abs();
        ok &= rel <= 0.1;
        parts.push(format!("delta={delta}: {exact:.4} vs {limit:.4} (rel {rel:.3})"));
    }
    outcome(ok, format!("{} (tol 0.1)", parts.join("; ")))
}

fn composition_identity() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let delta = -1.0 + 3.0 * i as f64 / 19.0;
        // m = 0.2, F = 0.005, γ² = m² − 2Fδ
        let p = RealGapLZParams::new(0.005, 0.2, (0.04 - 0.01 * delta).sqrt())?;
        let ps = phi_s(p.delta());
        for j in 0..20 {
            let phi = 4.0 * PI * j as f64 / 19.0;
            let half = 0.5 * (phi - 2.0 * ps);
            for case in LzsCase::ALL {
                let a = analytic_populations(&p, phi, case)?;
                let b = compose_with_phases(&p, case, half, -half)?.populations;
                for (x, y) in [
                    (a.p_minus_plus, b.p_minus_plus),
                    (a.p_minus_minus, b.p_minus_minus),
                    (a.p_plus_minus, b.p_plus_minus),
                    (a.p_plus_plus, b.p_plus_plus),
                ] {
                    worst = worst.max((x - y).abs() / 1f64.max(x.abs()));
                }
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("20x20 grid, four cases, max |diff| / max(1, |P|) = {worst:.2e} (tol 1e-10)"),
    )
}

fn geometric_phase() -> Result<Outcome> {
    let mut shift: f64 = 0.0;
    let mut zeros: f64 = 0.0;
    for gamma in [0.0, 0.05, -0.05, 0.1, -0.1] {
        let p = RealGapLZParams::new(0.02, 0.2, gamma)?;
        for j in 0..64 {
            let dphi = 4.0 * PI * j as f64 / 63.0;
            let i = compose_with_phases(&p, LzsCase::I, 0.5 * dphi, -0.5 * dphi)?;
            let ii = compose_with_phases(&p, LzsCase::Ii, 0.5 * (dphi + PI), -0.5 * (dphi + PI))?;
            shift = shift.max((i.populations.p_minus_plus - ii.populations.p_minus_plus).abs());
        }
        let ps = phi_s(p.delta());
        for j in 0..4 {
            let half = 0.5 * (2.0 * PI * j as f64 - 2.0 * ps);
            let r = compose_with_phases(&p, LzsCase::Iii, half, -half)?;
            zeros = zeros.max(r.populations.p_minus_plus);
        }
    }
    outcome(
        shift < 1e-12 && zeros < 1e-12,
        format!("case i vs ii shifted by pi: {shift:.2e}; case iii P_-+ at 2j pi: {zeros:.2e} (tol 1e-12)"),
    )
}

struct Point {
    e: f64,
    exact: f64,
    analytic: f64,
}

fn period_sweep(alpha: f64, gamma: f64, fields: &[f64]) -> Result<Vec<Point>> {
    fields
        .iter()
        .map(|&e| {
            let p = SshParams::new(1.0, alpha, gamma, e, 1.0, 2)?;
            let traj = bloch_period_final(&p, &IntegratorConfig::default())?;
            let w = traj.populations.as_ref().unwrap().last().unwrap().unwrap();
            Ok(Point {
                e,
                exact: w.upper,
                analytic: lzs_prediction(&p)?.populations.p_minus_plus,
            })
        })
        .collect()
}

fn balanced_sweep() -> Result<Outcome> {
    let pts = period_sweep(0.2, 0.2, &linspace(0.01, 0.15, 30))?;
    let (worst, at) = pts
        .iter()
        .map(|p| ((p.exact - p.analytic).abs(), p.e))
        .fold((0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
    let high_end = at >= 0.08;
    outcome(
        worst <= 2e-2 && high_end,
        format!("max |analytic - exact| P_-+ = {worst:.4} at field {at:.4} (tol 2e-2, must sit at high field)"),
    )
}

fn double_jump() -> Result<Outcome> {
    let p = SshParams::new(1.0, 0.1, 0.1, 0.01, 1.0, 2)?;
    let traj = bloch_oscillation(&p, 0.0, Band::Lower, p.period(), &IntegratorConfig::default())?;
    let pops = traj.populations.unwrap();
    let max_up = pops.iter().flatten().map(|w| w.upper).fold(0.0, f64::max);
    let last = pops.last().unwrap().unwrap().lower;
    let rel = (last * 9.0 - 1.0).abs();
    outcome(
        rel <= 0.05 && max_up <= 1e-2,
        format!(
            "final P_-- = {last:.5} vs 1/9, rel {rel:.3} (tol 0.05); max P_-+ = {max_up:.4} (tol 1e-2)"
        ),
    )
}

fn strong_gain_trend() -> Result<Outcome> {
    let pts = period_sweep(0.1, 0.3, &linspace(0.02, 0.15, 50))?;
    let bins: Vec<f64> = pts
        .chunks(10)
        .map(|c| c.iter().map(|p| (p.analytic - p.exact).abs() / p.exact).sum::<f64>() / 10.0)
        .collect();
    let monotone = bins.windows(2).all(|w| w[1] <= w[0]);
    let shown: Vec<String> = bins.iter().map(|b| format!("{b:.4}")).collect();
    outcome(
        monotone,
        format!("bin means of |analytic - exact| / exact: {} (must be nonincreasing)", shown.join(", ")),
    )
}

fn com_sweep() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut at = 0.0;
    for e in linspace(0.03, 0.1, 15) {
        let ssh = SshParams::new(1.0, 0.1, 0.1, e, 1.0, 120)?;
        let mut cfg = WaveguideConfig::new(ssh, 200.0);
        cfg.sample_every = cfg.z_max;
        let run = propagate(&cfg, &init_gaussian(&cfg)?, &IntegratorConfig::default())?;
        let exact = center_of_mass(run.snapshots.last().unwrap())?;
        let diff = (exact - analytic_com(&ssh, cfg.x0, ComAt::FullPeriod)?).abs();
        if diff > worst {
            worst = diff;
            at = e;
        }
    }
    outcome(
        worst <= 0.5,
        format!("240 sites, max |x_exact - x_analytic| = {worst:.3}d at field {at:.3} (tol 0.5d)"),
    )
}

fn profile_morphology() -> Result<Outcome> {
    let ssh = SshParams::new(1.0, 0.1, 0.1, 0.05, 1.0, 80)?;
    let cfg = WaveguideConfig::new(ssh, 120.0);
    let run = propagate(&cfg, &init_gaussian(&cfg)?, &IntegratorConfig::default())?;
    let (mut early, mut early_bad) = (0, 0);
    let (mut split, mut split_bad) = (0, 0);
    let mut min_sep = f64::INFINITY;
    for s in &run.snapshots {
        let phase = ssh.e_field * s.z;
        let peaks = profile_maxima(s, 0.05);
        if phase < PI / 2.0 - 0.2 {
            early += 1;
            early_bad += usize::from(peaks.len() != 1);
        } else if phase > PI / 2.0 + 0.3 && phase < 1.5 * PI - 0.3 {
            split += 1;
            if peaks.len() == 2 {
                let sep = (peaks[1] - peaks[0]).abs();
                min_sep = min_sep.min(sep);
                split_bad += usize::from(sep <= 4.0 * ssh.d);
            } else {
                split_bad += 1;
            }
        }
    }
    outcome(
        early_bad == 0 && split_bad == 0,
        format!(
            "one maximum in {}/{early} early snapshots; two maxima in {}/{split} later snapshots, min separation {min_sep:.1}d (need > 4d)",
            early - early_bad,
            split - split_bad
        ),
    )
}

fn invariant_suite() -> Result<Outcome> {
    let report = selftest::run(false);
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    outcome(
        failed.is_empty() && report.seconds < 300.0,
        format!(
            "{} checks, failed: [{}], {:.1} s (limit 300 s)",
            report.checks.len(),
            failed.join(", "),
            report.seconds
        ),
    )
}

type Criterion = (&'static str, fn() -> Result<Outcome>, Option<f64>);

/// (name, check, runtime limit in seconds)
const CRITERIA: [Criterion; 14] = [
    ("lz asymptotic constant", lz_constant, Some(1.0)),
    ("power-law branches", power_laws, Some(10.0)),
    ("closed form vs ode oracle", closed_form_oracle, Some(30.0)),
    ("gain/loss population ratio", gain_ratio, None),
    ("perfect transmission at gamma = m", perfect_transmission, None),
    ("transition-time limits", transition_time_limits, None),
    ("lzs composition identity", composition_identity, None),
    ("geometric pi phase", geometric_phase, None),
    ("balanced gain sweep", balanced_sweep, Some(120.0)),
    ("adiabatic double jump", double_jump, None),
    ("strong gain deviation trend", strong_gain_trend, None),
    ("waveguide centre of mass sweep", com_sweep, Some(300.0)),
    ("beam profile splitting", profile_morphology, None),
    ("invariant suite", invariant_suite, Some(300.0)),
];

fn main() {
    let mut failures = 0;
    for (i, (name, check, limit)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        let (mut passed, mut detail) = match result {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if let Some(l) = limit {
            if secs > *l {
                passed = false;
                detail.push_str(&format!("; runtime over {l} s"));
            }
        }
        failures += usize::from(!passed);
        println!(
            "criterion {:>2} {} {name}: {detail} [{secs:.2} s]",
            i + 1,
            if passed { "PASS" } else { "FAIL" }
        );
    }
    println!("{} of {} criteria pass", CRITERIA.len() - failures, CRITERIA.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
