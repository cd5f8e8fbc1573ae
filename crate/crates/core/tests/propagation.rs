use std::f64::consts::FRAC_PI_2;

use junction_core::dynamics::{
    make_gaussian_packet, norm, propagate, ControlSchedule, ProbeConfig, State, WavePacketSpec, C64,
};
use junction_core::model::{build_system, group_velocity, SystemParams, SystemSpec, Waveguide};
use junction_core::observables::integrated_probabilities;
use proptest::prelude::*;

fn system(n: usize, g: f64) -> SystemSpec {
    build_system(SystemParams {
        n_channel: n,
        n_atoms: 12,
        g,
        ..SystemParams::default()
    })
    .unwrap()
}

fn launch(sys: &SystemSpec, n0: f64, k0: f64, sigma: f64) -> State {
    let spec = WavePacketSpec {
        n0,
        k0,
        sigma,
        channel: Waveguide::A,
    };
    make_gaussian_packet(&spec, sys).unwrap().0
}

fn quiet() -> ProbeConfig {
    ProbeConfig {
        record_interval: 1.0,
        snapshot_interval: None,
        occupations: true,
    }
}

fn centroid(sys: &SystemSpec, s: &State) -> f64 {
    let w: f64 = s.alpha.iter().map(|z| z.norm_sqr()).sum();
    s.alpha
        .iter()
        .enumerate()
        .map(|(o, z)| sys.site_at(o) as f64 * z.norm_sqr())
        .sum::<f64>()
        / w
}

#[test]
fn free_packet_moves_at_group_velocity() {
    let sys = system(1000, 0.0);
    for k0 in [FRAC_PI_2, 1.3284] {
        let psi0 = launch(&sys, -500.0, k0, 100.0);
        let traj = propagate(&sys, &psi0, &ControlSchedule::constant(0.0), 200.0, 0.02, &quiet()).unwrap();
        let shift = centroid(&sys, &traj.final_state) - centroid(&sys, &psi0);
        let expected = group_velocity(k0) * 200.0;
        assert!((shift / expected - 1.0).abs() < 0.01, "k0={k0}: {shift} vs {expected}");
    }
}

#[test]
fn propagation_is_linear() {
    let sys = system(150, 0.5);
    let psi0 = launch(&sys, -60.0, 1.4, 15.0);
    let c = C64::new(0.6, -1.7);
    let sched = ControlSchedule::from_segments(&[(0.0, 0.3), (20.0, 0.0), (40.0, 0.5)]).unwrap();
    let a = propagate(&sys, &psi0, &sched, 80.0, 0.02, &quiet()).unwrap();
    let b = propagate(&sys, &psi0.scaled(c), &sched, 80.0, 0.02, &quiet()).unwrap();
    let expected = a.final_state.scaled(c);
    assert!(b.final_state.max_abs_diff(&expected) <= 1e-12);
}

#[test]
fn splitting_a_constant_schedule_changes_nothing() {
    let sys = system(150, 0.5);
    let psi0 = launch(&sys, -60.0, 1.4, 15.0);
    let whole = ControlSchedule::constant(0.4);
    let pieces = ControlSchedule::from_segments(&[(0.0, 0.4), (13.0, 0.4), (13.02, 0.4), (50.0, 0.4)]).unwrap();
    let a = propagate(&sys, &psi0, &whole, 80.0, 0.02, &quiet()).unwrap();
    let b = propagate(&sys, &psi0, &pieces, 80.0, 0.02, &quiet()).unwrap();
    assert!(a.final_state.max_abs_diff(&b.final_state) <= 1e-10);
}

#[test]
fn antisymmetric_packet_ignores_the_atoms() {
    let sys = system(300, 0.5);
    let mut psi0 = launch(&sys, -120.0, FRAC_PI_2, 30.0);
    psi0.beta = psi0.alpha.iter().map(|z| -z).collect();
    let n = norm(&psi0);
    psi0.scale(C64::new(1.0 / n.sqrt(), 0.0));
    let traj = propagate(&sys, &psi0, &ControlSchedule::constant(0.5), 150.0, 0.02, &quiet()).unwrap();
    let peak = traj
        .occupations
        .iter()
        .flat_map(|occ| occ.iter().map(|o| o.total()))
        .fold(0.0, f64::max);
    assert!(peak <= 1e-12);
    let p = integrated_probabilities(&traj.final_state, &sys);
    assert!(p.p_ar + p.p_br >= 1.0 - 1e-6, "{p:?}");
}

#[test]
fn storage_level_freezes_while_field_is_off() {
    let sys = system(300, 0.5);
    let psi0 = launch(&sys, -120.0, FRAC_PI_2, 30.0);
    let sched = ControlSchedule::constant(0.12).with_pause(70.0, 120.0).unwrap();
    let traj = propagate(&sys, &psi0, &sched, 150.0, 0.02, &quiet()).unwrap();
    let start = traj.times.iter().position(|&t| t == 70.0).unwrap();
    let stop = traj.times.iter().position(|&t| t == 120.0).unwrap();
    let reference = &traj.occupations[start];
    assert!(reference.iter().map(|o| o.storage).sum::<f64>() > 1e-3);
    for occ in &traj.occupations[start..=stop] {
        for (a, b) in occ.iter().zip(reference) {
            assert!((a.storage.sqrt() - b.storage.sqrt()).abs() <= 1e-10);
        }
    }
    assert!(traj.max_norm_drift <= 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn norm_is_conserved(
        g in 0.0_f64..1.5,
        w0 in -1.0_f64..1.0,
        w1 in -1.0_f64..1.0,
        k0 in 0.2_f64..2.9,
        de in -0.5_f64..0.5,
        ds in -0.5_f64..0.5,
    ) {
        let sys = build_system(SystemParams { n_channel: 60, n_atoms: 5, g, delta_e: de, delta_s: ds }).unwrap();
        let psi0 = launch(&sys, -20.0, k0, 5.0);
        let sched = ControlSchedule::from_segments(&[(0.0, w0), (10.0, w1)]).unwrap();
        let traj = propagate(&sys, &psi0, &sched, 30.0, 0.02, &quiet()).unwrap();
        prop_assert!(traj.max_norm_drift <= 1e-12);
        for p in &traj.probabilities {
            prop_assert!((p.total() - 1.0).abs() <= 1e-12);
        }
    }
}
