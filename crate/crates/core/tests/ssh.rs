use std::f64::consts::PI;

use lzslab::propagator::IntegratorConfig;
use lzslab::ssh::{
    band_spectrum, bloch_hamiltonian, bloch_oscillation, exceptional_points, initial_state,
    local_expansion, Crossing, SshParams,
};
use lzslab::twolevel::{projectors, Band};

fn ssh(alpha: f64, gamma: f64, e: f64) -> SshParams {
    SshParams::new(1.0, alpha, gamma, e, 1.0, 50).unwrap()
}

#[test]
fn hamiltonian_is_periodic_in_quasimomentum_and_time() {
    let p = ssh(0.3, 0.2, 0.05);
    let h = bloch_hamiltonian(&p, 0.4, 3.0);
    assert!(h.max_abs_diff(&bloch_hamiltonian(&p, 0.4 + 2.0 * PI, 3.0)) < 1e-13);
    assert!(h.max_abs_diff(&bloch_hamiltonian(&p, 0.4, 3.0 + p.period())) < 1e-12);
}

#[test]
fn gap_closes_at_the_threshold() {
    // 2αJ = γ: the points sit at kd = π/2, 3π/2
    let p = ssh(0.1, 0.2, 0.05);
    let eps = exceptional_points(&p);
    assert_eq!(eps.len(), 2);
    for k in eps {
        assert!(band_spectrum(&p, k).0.norm() < 1e-7);
    }
    assert!(exceptional_points(&ssh(0.3, 0.2, 0.05)).is_empty());
    let broken = ssh(0.1, 0.4, 0.05);
    let eps = exceptional_points(&broken);
    assert_eq!(eps.len(), 4);
    let mid = 0.5 * (eps[0] + eps[1]);
    assert!(band_spectrum(&broken, mid).0.re == 0.0 && band_spectrum(&broken, mid).0.im > 0.0);
}

#[test]
fn hermitian_oscillation_keeps_total_weight() {
    let p = ssh(0.2, 0.0, 0.05);
    let traj = bloch_oscillation(&p, 0.3, Band::Lower, p.period(), &IntegratorConfig::default()).unwrap();
    for w in traj.populations.unwrap().into_iter().flatten() {
        assert!((w.upper + w.lower - 1.0).abs() < 1e-6, "{w:?}");
    }
}

#[test]
fn initial_state_lies_in_the_requested_band() {
    let p = ssh(0.2, 0.1, 0.05);
    let (pp, pm) = projectors(&bloch_hamiltonian(&p, 0.0, 0.0)).unwrap();
    let up = initial_state(&p, 0.0, Band::Upper).unwrap();
    let v = pm.apply(up);
    assert!(v[0].norm() + v[1].norm() < 1e-14);
    let lo = initial_state(&p, 0.0, Band::Lower).unwrap();
    let v = pp.apply(lo);
    assert!(v[0].norm() + v[1].norm() < 1e-14);
}

#[test]
fn crossings_map_to_one_sweep() {
    let p = ssh(0.1, 0.1, 0.02);
    let a = local_expansion(&p, Crossing::First).unwrap();
    let b = local_expansion(&p, Crossing::Second).unwrap();
    assert_eq!(a.params, b.params);
    assert!((a.params.f - 0.04).abs() < 1e-15 && (a.params.m - 0.2).abs() < 1e-15);
    assert!((b.t_cross - a.t_cross - PI / 0.02).abs() < 1e-9);
    // |h| is smallest at the crossings
    let gap = |t: f64| band_spectrum(&p, p.e_field * t / p.d).0.norm();
    assert!(gap(a.t_cross) < gap(a.t_cross + 1.0) && gap(a.t_cross) < gap(a.t_cross - 1.0));
    assert!(local_expansion(&ssh(0.1, 0.1, 0.0), Crossing::First).is_err());
}
