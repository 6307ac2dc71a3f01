//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use hyperconc::{Complex64, CopyId, Element, ModeTable, OpticalCircuit, PhotonPaths, Unitary};

/// Deterministic dense `n×n` matrix with entries on the unit circle, scaled by `1/√n`.
pub fn phase_matrix(n: usize) -> Unitary {
    Unitary::from_fn(n, n, |i, j| Complex64::from_polar(1.0 / (n as f64).sqrt(), 0.7 * (i * j) as f64 + 0.3 * i as f64))
}

/// A fully mixing 8-mode circuit on one party's two photon slots.
pub fn mixing_circuit() -> OpticalCircuit {
    let table = Arc::new(ModeTable::for_copies(1, &[CopyId::First, CopyId::Second]));
    let a = PhotonPaths::new(0, CopyId::First);
    let b = PhotonPaths::new(0, CopyId::Second);
    let elements = [
        Element::BeamSplitter { up: a.up(), down: b.up() },
        Element::BeamSplitter { up: a.down(), down: b.down() },
        Element::Pbs0 { first: a.up(), second: Some(a.down()) },
        Element::Pbs45 { path: b.up() },
        Element::Pbs45 { path: a.down() },
        Element::BeamSplitter { up: a.up(), down: a.down() },
        Element::BeamSplitter { up: b.up(), down: b.down() },
        Element::Pbs45 { path: a.up() },
        Element::Pbs45 { path: b.down() },
    ];
    OpticalCircuit::from_elements(table, elements).expect("valid circuit")
}
