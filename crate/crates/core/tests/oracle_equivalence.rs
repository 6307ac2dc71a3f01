use std::sync::Arc;

use hyperconc::devices::{build_ppc, build_spc, build_spm};
use hyperconc::oracle::{all_occupations, cross_check, transition_amplitude, PermanentQuery};
use hyperconc::{CopyId, FockState, ModeTable, OpticalCircuit, PhotonPaths, Polarization};

#[test]
fn hundred_random_circuits_agree_with_permanents() {
    let report = cross_check(100, 2024).unwrap();
    assert_eq!(report.trials, 100);
    assert!(report.amplitudes_compared > 100);
    assert!(report.max_amplitude_deviation <= 1e-10, "{report:?}");
    assert!(report.max_completeness_error <= 1e-9, "{report:?}");
    assert!(report.max_unitarity_error <= 1e-12, "{report:?}");
}

fn compare_on_basis_inputs(circuit: &OpticalCircuit, photons: usize) -> f64 {
    let table = circuit.shared_table().clone();
    let mut worst = 0.0f64;
    for input in all_occupations(table.len(), photons) {
        let state = FockState::from_terms(table.clone(), photons, [(input.clone(), 1.0.into())]).unwrap();
        let out = circuit.apply(&state).unwrap();
        for output in all_occupations(table.len(), photons) {
            let q = PermanentQuery { unitary: circuit.unitary(), input: &input, output: &output };
            let expected = transition_amplitude(&q).unwrap();
            worst = worst.max((out.amplitude(&output) - expected).norm());
        }
    }
    worst
}

#[test]
fn device_circuits_agree_with_permanents() {
    let table = Arc::new(ModeTable::for_copies(1, &[CopyId::First, CopyId::Second]));
    let x1 = PhotonPaths::new(0, CopyId::First);
    let x2 = PhotonPaths::new(0, CopyId::Second);
    let ppc = build_ppc(table.clone(), x1, x2).unwrap();
    let spc = build_spc(table.clone(), x1, x2).unwrap();
    let spm = build_spm(table.clone(), x2).unwrap();
    for device in [&ppc, &spc] {
        assert!(compare_on_basis_inputs(&device.circuit, 2) <= 1e-10);
    }
    assert!(compare_on_basis_inputs(&spm.circuit, 1) <= 1e-10);
}

#[test]
fn parity_check_superposed_inputs_agree_with_permanents() {
    // Superposed polarization-parity inputs, summed term by term through the oracle.
    let table = Arc::new(ModeTable::for_copies(1, &[CopyId::First, CopyId::Second]));
    let x1 = PhotonPaths::new(0, CopyId::First);
    let x2 = PhotonPaths::new(0, CopyId::Second);
    let ppc = build_ppc(table.clone(), x1, x2).unwrap();
    for (p1, p2) in [(Polarization::H, Polarization::H), (Polarization::H, Polarization::V), (Polarization::V, Polarization::H)] {
        let mut state = FockState::zero(table.clone(), 2);
        for a in [x1.up(), x1.down()] {
            for b in [x2.up(), x2.down()] {
                let ket = FockState::basis(table.clone(), &[a.mode(p1), b.mode(p2)]).unwrap();
                state = FockState::superpose(&state, 1.0.into(), &ket, 0.5.into()).unwrap();
            }
        }
        let out = ppc.circuit.apply(&state).unwrap();
        for output in all_occupations(table.len(), 2) {
            let mut expected = num_complex::Complex64::new(0.0, 0.0);
            for (input, amp) in state.terms() {
                let q = PermanentQuery { unitary: ppc.circuit.unitary(), input, output: &output };
                expected += amp * transition_amplitude(&q).unwrap();
            }
            assert!((out.amplitude(&output) - expected).norm() <= 1e-10);
        }
    }
}
