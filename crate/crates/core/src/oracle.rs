//! Brute-force reference for multi-photon transition amplitudes.
//!
//! `⟨out| U |in⟩ = Per(U[out, in]) / √(∏ n_i! ∏ m_j!)`, where the submatrix
//! repeats column `i` `n_i` times and row `j` `m_j` times. This module shares no
//! expansion code with [`crate::optics`], so agreement between the two is a
//! genuine cross-check.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{CopyId, FockState, ModeTable, Occupation, PhotonPaths};
use crate::optics::{Element, OpticalCircuit, Unitary};

pub const MAX_PERMANENT_SIZE: usize = 12;

/// Permanent via Ryser's inclusion–exclusion formula, visiting column subsets
/// in Gray-code order so each step updates the row sums by one column.
pub fn permanent(matrix: &Unitary) -> Result<Complex64> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::NotSquare(n, matrix.ncols()));
    }
    if n > MAX_PERMANENT_SIZE {
        return Err(Error::PermanentTooLarge(n, MAX_PERMANENT_SIZE));
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    for k in 1u32..(1 << n) {
        let j = k.trailing_zeros() as usize;
        let gray = k ^ (k >> 1);
        if gray & (1 << j) != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += matrix[(i, j)];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= matrix[(i, j)];
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    Ok(if n % 2 == 1 { -total } else { total })
}

/// A single transition amplitude request.
#[derive(Debug, Clone)]
pub struct PermanentQuery<'a> {
    pub unitary: &'a Unitary,
    pub input: &'a Occupation,
    pub output: &'a Occupation,
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

pub fn transition_amplitude(q: &PermanentQuery<'_>) -> Result<Complex64> {
    let m = q.unitary.nrows();
    if q.unitary.ncols() != m {
        return Err(Error::NotSquare(m, q.unitary.ncols()));
    }
    for occ in [q.input, q.output] {
        if occ.len() != m {
            return Err(Error::OccupationLength { expected: m, found: occ.len() });
        }
    }
    if q.input.total() != q.output.total() {
        return Err(Error::PhotonNumberMismatch(q.input.total(), q.output.total()));
    }
    let cols: Vec<usize> = repeat_indices(q.input);
    let rows: Vec<usize> = repeat_indices(q.output);
    let k = cols.len();
    let sub = Unitary::from_fn(k, k, |r, c| q.unitary[(rows[r], cols[c])]);
    let norm: f64 = q.input.counts().iter().chain(q.output.counts()).map(|&n| factorial(n)).product();
    Ok(permanent(&sub)? / norm.sqrt())
}

fn repeat_indices(occ: &Occupation) -> Vec<usize> {
    occ.counts()
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| std::iter::repeat_n(i, n as usize))
        .collect()
}

/// Every occupation of `photons` photons over `modes` modes, in lexicographic order.
pub fn all_occupations(modes: usize, photons: usize) -> Vec<Occupation> {
    fn rec(modes: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Occupation>) {
        if cur.len() + 1 == modes {
            cur.push(left as u8);
            out.push(Occupation(cur.clone()));
            cur.pop();
            return;
        }
        for n in 0..=left {
            cur.push(n as u8);
            rec(modes, left - n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if modes == 0 {
        if photons == 0 {
            out.push(Occupation(Vec::new()));
        }
        return out;
    }
    rec(modes, photons, &mut Vec::with_capacity(modes), &mut out);
    out
}

/// Outcome of comparing circuit application against the permanent oracle.
#[derive(Debug, Clone, Serialize)]
pub struct CrossCheckReport {
    pub trials: usize,
    pub seed: u64,
    pub amplitudes_compared: usize,
    pub max_amplitude_deviation: f64,
    pub max_completeness_error: f64,
    pub max_unitarity_error: f64,
}

fn random_element<R: Rng>(rng: &mut R, table: &ModeTable) -> Element {
    let paths: Vec<_> = [CopyId::First, CopyId::Second]
        .into_iter()
        .flat_map(|c| [PhotonPaths::new(0, c).up(), PhotonPaths::new(0, c).down()])
        .collect();
    let a = rng.random_range(0..paths.len());
    let b = (a + rng.random_range(1..paths.len())) % paths.len();
    match rng.random_range(0..6) {
        0 => Element::BeamSplitter { up: paths[a], down: paths[b] },
        1 => Element::Pbs0 { first: paths[a], second: Some(paths[b]) },
        2 => Element::Pbs45 { path: paths[a] },
        3 => Element::HalfWavePlate45 { path: paths[a] },
        4 => Element::swap_paths(paths[a], paths[b]),
        _ => Element::Phase {
            mode: table.modes()[rng.random_range(0..table.len())],
            phase: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        },
    }
}

/// Random element circuits over the 8 modes of one party's two photons, applied to
/// random basis inputs of 1–4 photons. Every output amplitude is compared against
/// the oracle, and the oracle's output probabilities are checked to sum to one.
pub fn cross_check(trials: usize, seed: u64) -> Result<CrossCheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = Arc::new(ModeTable::for_copies(1, &[CopyId::First, CopyId::Second]));
    let mut report = CrossCheckReport {
        trials,
        seed,
        amplitudes_compared: 0,
        max_amplitude_deviation: 0.0,
        max_completeness_error: 0.0,
        max_unitarity_error: 0.0,
    };
    for _ in 0..trials {
        let depth = rng.random_range(4..20);
        let elements: Vec<Element> = (0..depth).map(|_| random_element(&mut rng, &table)).collect();
        let circuit = OpticalCircuit::from_elements(table.clone(), elements)?;
        report.max_unitarity_error = report.max_unitarity_error.max(circuit.unitarity_error());

        let photons = rng.random_range(1..=4);
        let modes: Vec<_> = (0..photons).map(|_| table.modes()[rng.random_range(0..table.len())]).collect();
        let input = FockState::basis(table.clone(), &modes)?;
        let (input_occ, _) = input.terms().next().expect("basis state has one term");
        let output = circuit.apply(&input)?;

        let mut total = 0.0;
        for occ in all_occupations(table.len(), photons) {
            let reference = transition_amplitude(&PermanentQuery {
                unitary: circuit.unitary(),
                input: input_occ,
                output: &occ,
            })?;
            total += reference.norm_sqr();
            let dev = (reference - output.amplitude(&occ)).norm();
            report.max_amplitude_deviation = report.max_amplitude_deviation.max(dev);
            report.amplitudes_compared += 1;
        }
        report.max_completeness_error = report.max_completeness_error.max((total - 1.0).abs());
    }
    Ok(report)
}
