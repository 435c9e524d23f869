use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use cavity_cphase::dynamics::{extract_phase, propagate, PropagationSettings};
use cavity_cphase::hilbert::{
    build_full_hamiltonian, build_mode_hamiltonian, build_space, excitation_number,
    HamiltonianGenerator, SparseOperator, StateVector,
};
use cavity_cphase::SystemConfig;

fn two_site() -> SystemConfig {
    SystemConfig::uniform(2, 0.5, 20.0, &[18.0])
}

#[test]
fn hamiltonian_hermitian_at_sampled_times() {
    let cfg = SystemConfig::paper_n3();
    let space = build_space(3, 1).unwrap();
    let gen = build_full_hamiltonian(&cfg, &space);
    for i in 0..100 {
        let t = 0.37 * i as f64 + 1e-3 * (i * i) as f64;
        let h = gen.evaluate(t);
        assert!(
            h.hermiticity_defect() <= 1e-12,
            "t = {t}: {}",
            h.hermiticity_defect()
        );
    }
    let mode = build_mode_hamiltonian(&cfg, &space).unwrap();
    for i in 0..100 {
        assert!(mode.evaluate(1.3 * i as f64).hermiticity_defect() <= 1e-12);
    }
}

#[test]
fn excitations_conserved_without_drives() {
    let cfg = SystemConfig::paper_n3();
    let space = build_space(3, 2).unwrap();
    let gen =
        build_full_hamiltonian(&cfg, &space).without_channels(|c| c.label.starts_with("drive"));
    let n_exc = excitation_number(&space);
    for i in 0..20 {
        let h = gen.evaluate(0.7 * i as f64);
        assert!(h.commutator(&n_exc).max_abs() <= 1e-12);
    }
    // The drives do not conserve it.
    let driven = build_full_hamiltonian(&cfg, &space).evaluate(0.0);
    assert!(driven.commutator(&n_exc).max_abs() > 0.5);
}

fn final_error(e: f64, t: f64, dt: f64) -> f64 {
    let gen = HamiltonianGenerator {
        dim: 1,
        static_part: SparseOperator::from_diagonal(&[C64::new(e, 0.0)]),
        channels: vec![],
    };
    let s = PropagationSettings {
        dt,
        sample_stride: 1,
        norm_tol: 1.0,
    };
    let (_, psi) = propagate(&StateVector::basis(1, 0), &gen, None, t, &s).unwrap();
    (psi.amplitudes[0] - C64::from_polar(1.0, -e * t)).norm()
}

#[test]
fn integrator_is_fourth_order() {
    let (e, t) = (2.3, 10.0);
    let errs: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dt| final_error(e, t, dt))
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!(
            (ratio - 16.0).abs() <= 3.0,
            "ratio {ratio}, errors {errs:?}"
        );
    }
}

#[test]
fn site_and_mode_frames_agree_on_vacuum_overlaps() {
    // The frames differ by the hopping rotation, which leaves the photon
    // vacuum invariant, so overlaps with computational states coincide.
    let cfg = two_site();
    let space = build_space(2, 3).unwrap();
    let site = build_full_hamiltonian(&cfg, &space);
    let mode = build_mode_hamiltonian(&cfg, &space).unwrap();
    let s = PropagationSettings {
        dt: 2e-3,
        sample_stride: 50,
        norm_tol: 1e-8,
    };
    for bits in 0..4 {
        let psi = StateVector::basis(space.total_dim, space.qubit_state_index(bits));
        let (a, _) = propagate(&psi, &site, Some(&space), 20.0, &s).unwrap();
        let (b, _) = propagate(&psi, &mode, Some(&space), 20.0, &s).unwrap();
        let oa = a.overlaps.last().unwrap();
        let ob = b.overlaps.last().unwrap();
        assert!((oa - ob).norm() < 1e-5, "bits {bits}: {oa} vs {ob}");
        let ea = a.excited_pop.last().unwrap();
        let eb = b.excited_pop.last().unwrap();
        assert!((ea - eb).abs() < 1e-5);
    }
}

#[test]
fn dispersive_excitations_stay_small() {
    // Far-detuned drives leave the excited population of the order of
    // 2(Ω/Δ)², and the final state near the initial one.
    let cfg = two_site();
    let space = build_space(2, 1).unwrap();
    let gen = build_full_hamiltonian(&cfg, &space);
    let s = PropagationSettings {
        dt: 2e-3,
        sample_stride: 10,
        norm_tol: 1e-8,
    };
    let psi = StateVector::basis(space.total_dim, space.qubit_state_index(0b11));
    let (traj, _) = propagate(&psi, &gen, Some(&space), 30.0, &s).unwrap();
    let bound = 5.0 * 2.0 * 2.0 / 18f64.powi(2);
    assert!(traj.excited_pop.iter().all(|&p| p < bound));
    assert!(traj.photon_num.iter().all(|&p| p < 0.05));
    assert!(traj.final_leakage() < 0.1);
    extract_phase(&traj).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_configs_give_hermitian_generators(
        hop in 0.0..2.0f64,
        g in proptest::collection::vec(0.0..3.0f64, 3),
        det in proptest::collection::vec(5.0..30.0f64, 2),
        t in 0.0..500.0f64,
    ) {
        let mut cfg = SystemConfig::uniform(3, hop, 20.0, &det);
        cfg.g_atom = g;
        let space = build_space(3, 1).unwrap();
        let h = build_full_hamiltonian(&cfg, &space).evaluate(t);
        prop_assert!(h.hermiticity_defect() <= 1e-12);
    }

    #[test]
    fn norm_preserved_on_short_runs(bits in 0usize..8, t in 0.0..2.0f64) {
        let cfg = SystemConfig::paper_n3();
        let space = build_space(3, 1).unwrap();
        let gen = build_full_hamiltonian(&cfg, &space);
        let psi = StateVector::basis(space.total_dim, space.qubit_state_index(bits));
        let s = PropagationSettings { dt: 1e-3, sample_stride: 100, norm_tol: 1e-8 };
        let (traj, _) = propagate(&psi, &gen, None, t, &s).unwrap();
        prop_assert!(traj.max_norm_drift() < 1e-10);
    }
}

#[test]
fn default_step_resolves_paper_frequencies() {
    let cfg = SystemConfig::paper_n3();
    let space = build_space(3, 1).unwrap();
    let gen = build_full_hamiltonian(&cfg, &space);
    let f = cavity_cphase::dynamics::generator_max_frequency(&gen);
    assert!(PropagationSettings::default().dt <= TAU / (20.0 * f));
}

#[test]
fn perturbative_estimates_match_full_populations() {
    use cavity_cphase::budget::{photonic_excitation_probability, ExcitationWeights};
    use cavity_cphase::gate::{simulated_gate_diag, Source};

    let cfg = SystemConfig::paper_n3();
    let s = PropagationSettings {
        dt: 1e-3,
        sample_stride: 20,
        norm_tol: 1e-8,
    };
    let sim = simulated_gate_diag(&cfg, 50.0, Source::Full, &s).unwrap();

    let mean_photons = sim.runs.iter().map(|r| r.mean_photons).sum::<f64>() / 8.0;
    let p_c =
        photonic_excitation_probability(&cfg, &ExcitationWeights::three_site_photonic()).unwrap();
    let ratio = mean_photons / p_c;
    assert!((0.2..=5.0).contains(&ratio), "photon ratio {ratio}");

    // Each driven |g⟩ carries about 2(Ω/Δ)² of excited population per tone.
    for (bits, run) in sim.runs.iter().enumerate() {
        let mut estimate = 0.0;
        if bits & 0b100 != 0 {
            estimate += cfg.delta_ctrl.iter().map(|d| 2.0 / (d * d)).sum::<f64>();
        }
        for (t, mask) in [(2, 0b010), (3, 0b001)] {
            if bits & mask != 0 {
                estimate += 2.0 / cfg.tgt_detuning(t).powi(2);
            }
        }
        if estimate == 0.0 {
            assert!(run.mean_excited < 1e-20);
        } else {
            let r = run.mean_excited / estimate;
            assert!((0.2..=5.0).contains(&r), "state {bits}: ratio {r}");
        }
    }
}
