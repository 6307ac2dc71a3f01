//! Linear-optical elements, circuits as dense mode-space unitaries, and
//! application of a circuit to a Fock state by creation-operator substitution.
//!
//! Matrix convention: column `i` of a circuit unitary holds the image of the
//! input creation operator `a_i†`, i.e. `a_i† ↦ Σ_j U[j, i] b_j†`.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockState, ModeId, ModeTable, Occupation, Path, Polarization};

pub type Unitary = DMatrix<Complex64>;

pub const UNITARITY_TOLERANCE: f64 = 1e-12;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A single optical element acting on named modes.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    /// 50:50 beam splitter between two paths, applied to each polarization layer:
    /// `In_u → (Out_u + Out_d)/√2`, `In_d → (Out_u − Out_d)/√2`. `Out_u` leaves on
    /// the `up` path and `Out_d` on the `down` path.
    BeamSplitter { up: Path, down: Path },
    /// Polarizing beam splitter at 0°. With two paths, `H` is reflected back onto
    /// its own path and `V` is transmitted across to the other one. With a single
    /// path it only sorts `H` and `V` onto separate detectors, which is the
    /// identity in mode space.
    Pbs0 { first: Path, second: Option<Path> },
    /// Polarizing beam splitter at 45° on one path. Afterwards the path's `H`
    /// slot carries the transmitted `|+⟩` port and its `V` slot the reflected
    /// `|−⟩` port.
    Pbs45 { path: Path },
    /// Half-wave plate at 45°: swaps `H` and `V` on one path.
    HalfWavePlate45 { path: Path },
    /// Renames mode `from[i]` to `to[i]`; `to` must be a permutation of `from`.
    Relabel { from: Vec<ModeId>, to: Vec<ModeId> },
    /// Phase shift `e^{iφ}` on one mode.
    Phase { mode: ModeId, phase: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElementKind {
    BeamSplitter,
    #[serde(rename = "PBS0")]
    Pbs0,
    #[serde(rename = "PBS45")]
    Pbs45,
    HalfWavePlate45,
    Relabel,
    Phase,
}

/// Serialized form of one element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub kind: ElementKind,
    pub modes: Vec<ModeId>,
    pub parameter: Option<f64>,
}

impl Element {
    /// Swaps the `u` and `d` paths of a photon (both polarizations) by renaming.
    pub fn swap_paths(a: Path, b: Path) -> Element {
        let [ah, av] = a.modes();
        let [bh, bv] = b.modes();
        Element::Relabel {
            from: vec![ah, av, bh, bv],
            to: vec![bh, bv, ah, av],
        }
    }

    pub fn kind(&self) -> ElementKind {
        match self {
            Element::BeamSplitter { .. } => ElementKind::BeamSplitter,
            Element::Pbs0 { .. } => ElementKind::Pbs0,
            Element::Pbs45 { .. } => ElementKind::Pbs45,
            Element::HalfWavePlate45 { .. } => ElementKind::HalfWavePlate45,
            Element::Relabel { .. } => ElementKind::Relabel,
            Element::Phase { .. } => ElementKind::Phase,
        }
    }

    pub fn acted_modes(&self) -> Vec<ModeId> {
        match self {
            Element::BeamSplitter { up, down } => [up.modes(), down.modes()].concat(),
            Element::Pbs0 { first, second } => {
                let mut v = first.modes().to_vec();
                if let Some(s) = second {
                    v.extend(s.modes());
                }
                v
            }
            Element::Pbs45 { path } | Element::HalfWavePlate45 { path } => path.modes().to_vec(),
            Element::Relabel { from, .. } => from.clone(),
            Element::Phase { mode, .. } => vec![*mode],
        }
    }

    pub fn record(&self) -> ElementRecord {
        let (modes, parameter) = match self {
            Element::Relabel { from, to } => ([from.as_slice(), to.as_slice()].concat(), None),
            Element::Phase { mode, phase } => (vec![*mode], Some(*phase)),
            other => (other.acted_modes(), None),
        };
        ElementRecord {
            kind: self.kind(),
            modes,
            parameter,
        }
    }

    fn validate(&self) -> Result<()> {
        let malformed = |msg: String| Err(Error::MalformedElement(msg));
        match self {
            Element::BeamSplitter { up, down } if up == down => malformed(format!("beam splitter on a single path {up}")),
            Element::Pbs0 { first, second: Some(s) } if first == s => malformed(format!("PBS on a single path {first}")),
            Element::Relabel { from, to } => {
                if from.len() != to.len() {
                    return malformed("relabel source and target lengths differ".into());
                }
                let mut a = from.clone();
                let mut b = to.clone();
                a.sort();
                b.sort();
                if a.windows(2).any(|w| w[0] == w[1]) {
                    return malformed("relabel repeats a mode".into());
                }
                if a != b {
                    return malformed("relabel is not a permutation".into());
                }
                Ok(())
            }
            Element::Phase { phase, .. } if !phase.is_finite() => malformed(format!("phase {phase}")),
            _ => Ok(()),
        }
    }

    /// Full `m×m` matrix of this element over `table`; identity outside the acted modes.
    pub fn matrix(&self, table: &ModeTable) -> Result<Unitary> {
        self.validate()?;
        for m in self.acted_modes() {
            table.index_of(m)?;
        }
        let n = table.len();
        let mut u = Unitary::identity(n, n);
        let idx = |m: ModeId| table.index_of(m).expect("checked above");
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        // Writes a 2x2 Hadamard block on (a, b): a → (a + b)/√2, b → (a − b)/√2.
        let hadamard = |u: &mut Unitary, a: usize, b: usize| {
            u[(a, a)] = s;
            u[(b, a)] = s;
            u[(a, b)] = s;
            u[(b, b)] = -s;
        };
        let swap = |u: &mut Unitary, a: usize, b: usize| {
            u[(a, a)] = zero;
            u[(b, b)] = zero;
            u[(a, b)] = one;
            u[(b, a)] = one;
        };
        match self {
            Element::BeamSplitter { up, down } => {
                for pol in Polarization::BOTH {
                    hadamard(&mut u, idx(up.mode(pol)), idx(down.mode(pol)));
                }
            }
            Element::Pbs0 { first, second } => {
                if let Some(second) = second {
                    swap(&mut u, idx(first.mode(Polarization::V)), idx(second.mode(Polarization::V)));
                }
            }
            Element::Pbs45 { path } => {
                hadamard(&mut u, idx(path.mode(Polarization::H)), idx(path.mode(Polarization::V)));
            }
            Element::HalfWavePlate45 { path } => {
                swap(&mut u, idx(path.mode(Polarization::H)), idx(path.mode(Polarization::V)));
            }
            Element::Relabel { from, to } => {
                for m in from {
                    let i = idx(*m);
                    u[(i, i)] = zero;
                }
                for (f, t) in from.iter().zip(to) {
                    u[(idx(*t), idx(*f))] = one;
                }
            }
            Element::Phase { mode, phase } => {
                let i = idx(*mode);
                u[(i, i)] = Complex64::from_polar(1.0, *phase);
            }
        }
        Ok(u)
    }
}

/// Max-norm distance of `U†U` from the identity.
pub fn unitarity_error(u: &Unitary) -> f64 {
    let n = u.nrows();
    let g = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// An ordered sequence of elements over a fixed mode table, with its product unitary.
#[derive(Debug, Clone)]
pub struct OpticalCircuit {
    table: Arc<ModeTable>,
    unitary: Unitary,
    elements: Vec<Element>,
}

impl OpticalCircuit {
    pub fn identity(table: Arc<ModeTable>) -> Self {
        let n = table.len();
        OpticalCircuit {
            table,
            unitary: Unitary::identity(n, n),
            elements: Vec::new(),
        }
    }

    pub fn from_elements(table: Arc<ModeTable>, elements: impl IntoIterator<Item = Element>) -> Result<Self> {
        let mut c = Self::identity(table);
        for e in elements {
            c.push(e)?;
        }
        Ok(c)
    }

    /// Appends an element after everything already in the circuit.
    pub fn push(&mut self, e: Element) -> Result<()> {
        let m = e.matrix(&self.table)?;
        self.unitary = m * &self.unitary;
        self.elements.push(e);
        Ok(())
    }

    pub fn then(mut self, e: Element) -> Result<Self> {
        self.push(e)?;
        Ok(self)
    }

    /// `a` followed by `b`: the unitary is `b·a` and the element logs are concatenated.
    pub fn compose(a: &OpticalCircuit, b: &OpticalCircuit) -> Result<OpticalCircuit> {
        if *a.table != *b.table {
            return Err(Error::ModeTableMismatch);
        }
        let mut elements = a.elements.clone();
        elements.extend(b.elements.iter().cloned());
        Ok(OpticalCircuit {
            table: a.table.clone(),
            unitary: &b.unitary * &a.unitary,
            elements,
        })
    }

    pub fn table(&self) -> &ModeTable {
        &self.table
    }

    pub fn shared_table(&self) -> &Arc<ModeTable> {
        &self.table
    }

    pub fn unitary(&self) -> &Unitary {
        &self.unitary
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element_log(&self) -> Vec<ElementRecord> {
        self.elements.iter().map(Element::record).collect()
    }

    pub fn element_log_json(&self) -> String {
        serde_json::to_string(&self.element_log()).expect("element log serialization is infallible")
    }

    pub fn unitarity_error(&self) -> f64 {
        unitarity_error(&self.unitary)
    }

    pub fn apply(&self, state: &FockState) -> Result<FockState> {
        if *state.table() != *self.table {
            return Err(Error::ModeTableMismatch);
        }
        apply_unitary(&self.unitary, state)
    }
}

fn sqrt_factorial_product(counts: &[u8]) -> f64 {
    counts
        .iter()
        .map(|&n| (1..=n as u32).map(f64::from).product::<f64>())
        .product::<f64>()
        .sqrt()
}

/// Applies an arbitrary mode unitary to a state over a table of matching size.
///
/// Each term is expanded photon by photon: the running polynomial in output
/// creation operators is multiplied by `Σ_j U[j, i] b_j†` and collected after
/// every substitution.
pub fn apply_unitary(u: &Unitary, state: &FockState) -> Result<FockState> {
    let n = state.table().len();
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::ModeTableMismatch);
    }
    let columns: Vec<Vec<(usize, Complex64)>> = (0..n)
        .map(|i| {
            (0..n)
                .filter_map(|j| {
                    let v = u[(j, i)];
                    (v != Complex64::new(0.0, 0.0)).then_some((j, v))
                })
                .collect()
        })
        .collect();

    let mut output: HashMap<Vec<u8>, Complex64> = HashMap::new();
    for (occ, &amp) in state.terms() {
        let mut poly: HashMap<Vec<u8>, Complex64> = HashMap::new();
        poly.insert(vec![0; n], amp / sqrt_factorial_product(occ.counts()));
        for (i, &count) in occ.counts().iter().enumerate() {
            for _ in 0..count {
                let mut next: HashMap<Vec<u8>, Complex64> = HashMap::with_capacity(poly.len() * columns[i].len());
                for (mono, coef) in &poly {
                    for &(j, uji) in &columns[i] {
                        let mut m = mono.clone();
                        m[j] += 1;
                        *next.entry(m).or_default() += coef * uji;
                    }
                }
                poly = next;
            }
        }
        for (mono, coef) in poly {
            let scale = sqrt_factorial_product(&mono);
            *output.entry(mono).or_default() += coef * scale;
        }
    }
    FockState::from_terms(
        state.shared_table().clone(),
        state.photons(),
        output.into_iter().map(|(o, a)| (Occupation(o), a)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{CopyId, PhotonPaths, Spatial};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn m(s: &str) -> ModeId {
        s.parse().unwrap()
    }

    fn p(s: &str) -> Path {
        m(&format!("{s}H")).path()
    }

    fn table1() -> Arc<ModeTable> {
        Arc::new(ModeTable::for_copies(1, &[CopyId::First]))
    }

    #[test]
    fn beam_splitter_column_matches_up_input_rule() {
        let t = table1();
        let bs = Element::BeamSplitter { up: p("p0c1u"), down: p("p0c1d") };
        let u = bs.matrix(&t).unwrap();
        let (iu, id) = (t.index_of(m("p0c1uH")).unwrap(), t.index_of(m("p0c1dH")).unwrap());
        assert_abs_diff_eq!(u[(iu, iu)].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(u[(id, iu)].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(u[(iu, id)].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(u[(id, id)].re, -FRAC_1_SQRT_2, epsilon = 1e-15);
        assert!(unitarity_error(&u) <= UNITARITY_TOLERANCE);
    }

    #[test]
    fn relabel_is_a_two_cycle() {
        let t = table1();
        let u = Element::swap_paths(p("p0c1u"), p("p0c1d")).matrix(&t).unwrap();
        let mut expected = Unitary::zeros(4, 4);
        for (a, b) in [(0, 2), (2, 0), (1, 3), (3, 1)] {
            expected[(a, b)] = Complex64::new(1.0, 0.0);
        }
        assert_eq!(u, expected);
    }

    #[test]
    fn involutions_compose_to_identity() {
        let t = table1();
        let hwp = Element::HalfWavePlate45 { path: p("p0c1u") };
        let c = OpticalCircuit::from_elements(t.clone(), [hwp.clone(), hwp]).unwrap();
        assert_eq!(*c.unitary(), Unitary::identity(4, 4));

        let swap = OpticalCircuit::from_elements(t.clone(), [Element::swap_paths(p("p0c1u"), p("p0c1d"))]).unwrap();
        let twice = OpticalCircuit::compose(&swap, &swap).unwrap();
        assert_eq!(*twice.unitary(), Unitary::identity(4, 4));
        assert_eq!(twice.elements().len(), 2);
    }

    #[test]
    fn beam_splitter_is_self_inverse() {
        // [[1,1],[1,-1]]/√2 squared is the identity.
        let t = table1();
        let bs = OpticalCircuit::from_elements(t, [Element::BeamSplitter { up: p("p0c1u"), down: p("p0c1d") }]).unwrap();
        let twice = OpticalCircuit::compose(&bs, &bs).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let v = twice.unitary()[(i, j)];
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((v - Complex64::new(target, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn compose_with_identity_is_neutral() {
        let t = table1();
        let c = OpticalCircuit::from_elements(
            t.clone(),
            [
                Element::BeamSplitter { up: p("p0c1u"), down: p("p0c1d") },
                Element::Phase { mode: m("p0c1dV"), phase: 0.3 },
            ],
        )
        .unwrap();
        let id = OpticalCircuit::identity(t);
        assert_eq!(OpticalCircuit::compose(&c, &id).unwrap().unitary(), c.unitary());
        assert_eq!(OpticalCircuit::compose(&id, &c).unwrap().unitary(), c.unitary());
    }

    #[test]
    fn compose_order_applies_first_argument_first() {
        let t = table1();
        let a = OpticalCircuit::from_elements(t.clone(), [Element::HalfWavePlate45 { path: p("p0c1u") }]).unwrap();
        let b = OpticalCircuit::from_elements(t.clone(), [Element::Pbs45 { path: p("p0c1u") }]).unwrap();
        let ab = OpticalCircuit::compose(&a, &b).unwrap();
        assert_eq!(*ab.unitary(), b.unitary() * a.unitary());
        let seq = OpticalCircuit::from_elements(t, ab.elements().iter().cloned()).unwrap();
        assert_eq!(seq.unitary(), ab.unitary());
    }

    #[test]
    fn malformed_and_unknown_elements_are_rejected() {
        let t = table1();
        let bad = Element::BeamSplitter { up: p("p0c1u"), down: p("p0c1u") };
        assert!(matches!(bad.matrix(&t), Err(Error::MalformedElement(_))));
        let bad = Element::Relabel { from: vec![m("p0c1uH"), m("p0c1uV")], to: vec![m("p0c1uH"), m("p0c1dV")] };
        assert!(matches!(bad.matrix(&t), Err(Error::MalformedElement(_))));
        let unknown = Element::Pbs45 { path: p("p3c1u") };
        assert!(matches!(unknown.matrix(&t), Err(Error::UnknownMode(_))));
    }

    #[test]
    fn hong_ou_mandel_on_beam_splitter() {
        // (a† + b†)(a† − b†)/2 = (a†² − b†²)/2 → (|2,0⟩ − |0,2⟩)/√2.
        let t = table1();
        let bs = OpticalCircuit::from_elements(t.clone(), [Element::BeamSplitter { up: p("p0c1u"), down: p("p0c1d") }]).unwrap();
        let input = FockState::basis(t.clone(), &[m("p0c1uH"), m("p0c1dH")]).unwrap();
        let out = bs.apply(&input).unwrap();
        assert_eq!(out.len(), 2);
        let uu = FockState::basis(t.clone(), &[m("p0c1uH"), m("p0c1uH")]).unwrap();
        let dd = FockState::basis(t, &[m("p0c1dH"), m("p0c1dH")]).unwrap();
        assert_abs_diff_eq!(FockState::inner_product(&uu, &out).unwrap().re, FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(FockState::inner_product(&dd, &out).unwrap().re, -FRAC_1_SQRT_2, epsilon = 1e-14);
    }

    #[test]
    fn identity_circuit_leaves_state_unchanged() {
        let t = table1();
        let s = FockState::basis(t.clone(), &[m("p0c1uH"), m("p0c1uH"), m("p0c1dV")]).unwrap();
        let out = OpticalCircuit::identity(t).apply(&s).unwrap();
        assert_eq!(out.to_json(), s.to_json());
    }

    #[test]
    fn element_log_serializes() {
        let t = table1();
        let c = OpticalCircuit::from_elements(
            t,
            [Element::Pbs45 { path: p("p0c1d") }, Element::Phase { mode: m("p0c1uV"), phase: 0.5 }],
        )
        .unwrap();
        assert_eq!(
            c.element_log_json(),
            r#"[{"kind":"PBS45","modes":["p0c1dH","p0c1dV"],"parameter":null},{"kind":"Phase","modes":["p0c1uV"],"parameter":0.5}]"#
        );
    }

    fn paths() -> Vec<Path> {
        [CopyId::First, CopyId::Second]
            .into_iter()
            .flat_map(|c| [PhotonPaths::new(0, c).up(), PhotonPaths::new(0, c).down()])
            .collect()
    }

    fn arb_element() -> impl Strategy<Value = Element> {
        let ps = paths();
        let ps2 = ps.clone();
        prop_oneof![
            (0usize..4, 1usize..4).prop_map(move |(a, k)| Element::BeamSplitter { up: ps[a], down: ps[(a + k) % 4] }),
            (0usize..4, 1usize..4).prop_map({
                let ps = ps2.clone();
                move |(a, k)| Element::Pbs0 { first: ps[a], second: Some(ps[(a + k) % 4]) }
            }),
            (0usize..4).prop_map({
                let ps = ps2.clone();
                move |a| Element::Pbs45 { path: ps[a] }
            }),
            (0usize..4).prop_map({
                let ps = ps2.clone();
                move |a| Element::HalfWavePlate45 { path: ps[a] }
            }),
            (0usize..8, -3.2f64..3.2).prop_map(|(i, phase)| Element::Phase {
                mode: ModeTable::for_copies(1, &[CopyId::First, CopyId::Second]).modes()[i],
                phase
            }),
        ]
    }

    proptest! {
        #[test]
        fn random_circuits_are_unitary_and_preserve_norm(
            elements in prop::collection::vec(arb_element(), 1..16),
            photons in prop::collection::vec(0usize..8, 1..5),
        ) {
            let t = Arc::new(ModeTable::for_copies(1, &[CopyId::First, CopyId::Second]));
            let c = OpticalCircuit::from_elements(t.clone(), elements).unwrap();
            prop_assert!(c.unitarity_error() <= UNITARITY_TOLERANCE);
            let modes: Vec<ModeId> = photons.iter().map(|&i| t.modes()[i]).collect();
            let s = FockState::basis(t, &modes).unwrap();
            let out = c.apply(&s).unwrap();
            prop_assert_eq!(out.photons(), s.photons());
            for (occ, _) in out.terms() {
                prop_assert_eq!(occ.total(), s.photons());
            }
            prop_assert!((out.norm_sqr() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn tap_paths_are_ordinary_modes() {
        let t = Arc::new(
            ModeTable::for_copies(1, &[CopyId::Second])
                .with_modes(PhotonPaths::new(0, CopyId::Second).tap(0).modes())
                .unwrap(),
        );
        let tap = Path::new(0, CopyId::Second, Spatial::Tap(0));
        let bs = Element::BeamSplitter { up: p("p0c2u"), down: tap };
        assert!(unitarity_error(&bs.matrix(&t).unwrap()) <= UNITARITY_TOLERANCE);
    }
}
