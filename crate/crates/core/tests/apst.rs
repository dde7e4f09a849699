use tomolab::apst::{apst_reconstruct, uda_witness_search, ApstConfig, WitnessParams};
use tomolab::oracle::{MeasurementMode, StateOracle};
use tomolab::quantum::haar_random_state;
use tomolab::{PureState, C64};

fn exact(psi: &PureState) -> StateOracle {
    StateOracle::from_pure(psi, MeasurementMode::Exact, 0).unwrap()
}

#[test]
fn count_law_for_basis_states() {
    for d in [2usize, 3, 4, 8] {
        for j in 0..d {
            let r = apst_reconstruct(exact(&PureState::basis(d, j).unwrap()), &ApstConfig::default()).unwrap();
            assert_eq!(r.measurement_count, 2 * d - j - 1, "d={d} j={j}");
            assert_eq!(r.ledger.count(), r.measurement_count);
            assert_eq!(r.k, j);
        }
    }
}

#[test]
fn haar_states_reconstruct_exactly() {
    for d in 2..=16usize {
        for seed in 0..40u64 {
            let psi = haar_random_state::<f64>(d, seed * 31 + d as u64).unwrap();
            let r = apst_reconstruct(exact(&psi), &ApstConfig::default()).unwrap();
            assert!(r.measurement_count < 2 * d);
            let f = r.state.fidelity(&psi).unwrap();
            assert!(f >= 1.0 - 1e-10, "d={d} seed={seed} f={f}");
        }
    }
}

#[test]
fn reconstructed_row_matches_queries() {
    // Row k of the reconstructed projector reproduces every queried value.
    let psi = haar_random_state::<f64>(5, 9).unwrap();
    let r = apst_reconstruct(exact(&psi), &ApstConfig::default()).unwrap();
    let rho = r.state.density_matrix();
    for (obs, v) in &r.outcomes {
        let e = rho.expectation(obs).unwrap();
        assert!((e - v).abs() < 1e-10, "{}: {e} vs {v}", obs.label());
    }
}

#[test]
fn skipped_leading_amplitudes() {
    let psi = PureState::superposition(4, &[(2, C64::new(0.6, 0.0)), (3, C64::new(0.0, -0.8))]).unwrap();
    let r = apst_reconstruct(exact(&psi), &ApstConfig::default()).unwrap();
    assert_eq!(r.k, 2);
    assert_eq!(r.measurement_count, 5);
    assert!((r.state.amplitude(3) - C64::new(0.0, -0.8)).norm() < 1e-14);
}

#[test]
fn shots_mode_reconstruction_is_close() {
    let psi = haar_random_state::<f64>(4, 2).unwrap();
    let oracle = StateOracle::from_pure(&psi, MeasurementMode::Shots(100_000), 5).unwrap();
    let r = apst_reconstruct(oracle, &ApstConfig::default()).unwrap();
    assert!(r.state.fidelity(&psi).unwrap() > 0.99);
    assert!(r.ledger.iter().all(|e| e.n_shots == Some(100_000)));
}

#[test]
fn json_report() {
    let psi = PureState::basis(2, 1).unwrap();
    let r = apst_reconstruct(exact(&psi), &ApstConfig::default()).unwrap();
    let v = r.to_json(Some(&psi)).unwrap();
    assert_eq!(v["k"], 1);
    assert_eq!(v["count"], 2);
    assert_eq!(v["fidelity_vs_hidden"], 1.0);
    assert_eq!(v["state"]["dim"], 2);
}

#[test]
fn witness_search_full_data_basis_state() {
    let psi = PureState::basis(2, 0).unwrap();
    let r = apst_reconstruct(exact(&psi), &ApstConfig::default()).unwrap();
    let w = uda_witness_search(&r.outcomes, &r.state, 2, 1, &WitnessParams::default());
    assert!(w.feasible_restarts > 0);
    assert!(w.max_distance <= 1e-4, "{w:?}");
}

#[test]
fn witness_search_full_data_haar_d3() {
    let psi = haar_random_state::<f64>(3, 17).unwrap();
    let r = apst_reconstruct(exact(&psi), &ApstConfig::default()).unwrap();
    let w = uda_witness_search(&r.outcomes, &r.state, 3, 2, &WitnessParams::default());
    assert!(w.feasible_restarts > 0);
    assert!(w.max_distance <= 1e-4, "{w:?}");
}

#[test]
fn witness_search_finds_phase_ambiguity() {
    let plus = PureState::superposition(2, &[(0, C64::new(1.0, 0.0)), (1, C64::new(1.0, 0.0))]).unwrap();
    let r = apst_reconstruct(exact(&plus), &ApstConfig::default()).unwrap();
    let step1: Vec<_> = r.outcomes.iter().filter(|(o, _)| o.label().starts_with('E')).cloned().collect();
    assert_eq!(step1.len(), 1);
    let w = uda_witness_search(&step1, &r.state, 2, 3, &WitnessParams::default());
    assert!(w.max_distance > 0.3, "{w:?}");
    assert!(w.residual <= 1e-8);
}
