//! Sparse multi-photon Fock states over a fixed mode table.
//!
//! Amplitudes are stored against orthonormal occupation-number kets
//! `|n_0, n_1, ...⟩ = ∏ (a_i†)^{n_i} / √(n_i!) |0⟩`, so the stored map reads
//! directly as probability amplitudes. Combinatorial `√(n!)` factors only appear
//! inside circuit application and the permanent oracle.

mod mode;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use mode::{CopyId, ModeId, ModeTable, Path, PhotonPaths, Polarization, Spatial};

/// Amplitudes with magnitude below this are dropped after every operation.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Photon count per mode, indexed by mode-table position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Occupation(pub Vec<u8>);

impl Occupation {
    pub fn zeros(modes: usize) -> Self {
        Occupation(vec![0; modes])
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn counts(&self) -> &[u8] {
        &self.0
    }
}

impl From<Vec<u8>> for Occupation {
    fn from(v: Vec<u8>) -> Self {
        Occupation(v)
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

/// Coefficients of the partially entangled input state
/// `(α|H…H⟩ + β|V…V⟩) ⊗ (δ|u…u⟩ + η|d…d⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateParams {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub delta: Complex64,
    pub eta: Complex64,
}

impl StateParams {
    pub const NORM_TOLERANCE: f64 = 1e-12;

    pub fn new(alpha: Complex64, beta: Complex64, delta: Complex64, eta: Complex64) -> Result<Self> {
        let pol = alpha.norm_sqr() + beta.norm_sqr();
        let spa = delta.norm_sqr() + eta.norm_sqr();
        if (pol - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::InvalidParams(format!("|alpha|^2 + |beta|^2 = {pol}")));
        }
        if (spa - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::InvalidParams(format!("|delta|^2 + |eta|^2 = {spa}")));
        }
        Ok(StateParams { alpha, beta, delta, eta })
    }

    /// Real, non-negative amplitudes from the squared magnitudes `|α|²` and `|δ|²`.
    pub fn from_squared(alpha2: f64, delta2: f64) -> Result<Self> {
        for (name, v) in [("alpha2", alpha2), ("delta2", delta2)] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} = {v} outside [0, 1]")));
            }
        }
        let re = |x: f64| Complex64::new(x.sqrt(), 0.0);
        Self::new(re(alpha2), re(1.0 - alpha2), re(delta2), re(1.0 - delta2))
    }

    pub fn balanced() -> Self {
        Self::from_squared(0.5, 0.5).expect("balanced parameters are normalized")
    }

    /// `4|αβδη|²`, the closed-form success probability of the concentration.
    pub fn success_formula(&self) -> f64 {
        4.0 * (self.alpha * self.beta * self.delta * self.eta).norm_sqr()
    }
}

/// Sparse bosonic state. Immutable after construction.
#[derive(Debug, Clone)]
pub struct FockState {
    table: Arc<ModeTable>,
    photons: usize,
    terms: BTreeMap<Occupation, Complex64>,
}

/// Result of projecting a subset of modes onto a count pattern.
#[derive(Debug, Clone)]
pub struct Projection {
    pub probability: f64,
    /// Renormalized post-measurement state over the remaining modes; empty when
    /// `probability` is zero.
    pub remainder: FockState,
    /// Old mode index → new mode index, `None` for measured modes.
    pub reindex: Vec<Option<usize>>,
}

/// One observed count pattern from [`FockState::measure`].
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub pattern: Vec<u8>,
    pub projection: Projection,
}

fn prune(terms: &mut BTreeMap<Occupation, Complex64>) {
    terms.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
}

impl FockState {
    /// Builds a state from `(occupation, amplitude)` pairs. Repeated occupations are
    /// summed. Every occupation must carry exactly `photons` photons.
    pub fn from_terms(
        table: Arc<ModeTable>,
        photons: usize,
        terms: impl IntoIterator<Item = (Occupation, Complex64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (occ, amp) in terms {
            if occ.len() != table.len() {
                return Err(Error::OccupationLength {
                    expected: table.len(),
                    found: occ.len(),
                });
            }
            if occ.total() != photons {
                return Err(Error::PhotonNumberMismatch(photons, occ.total()));
            }
            *map.entry(occ).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        prune(&mut map);
        Ok(FockState {
            table,
            photons,
            terms: map,
        })
    }

    /// The empty (zero-norm) state with a declared photon number.
    pub fn zero(table: Arc<ModeTable>, photons: usize) -> Self {
        FockState {
            table,
            photons,
            terms: BTreeMap::new(),
        }
    }

    pub fn vacuum(table: Arc<ModeTable>) -> Self {
        let occ = Occupation::zeros(table.len());
        FockState {
            table,
            photons: 0,
            terms: BTreeMap::from([(occ, Complex64::new(1.0, 0.0))]),
        }
    }

    /// Single basis ket with one photon per listed mode (repeat a mode for multiple photons).
    pub fn basis(table: Arc<ModeTable>, photons_in: &[ModeId]) -> Result<Self> {
        let mut occ = Occupation::zeros(table.len());
        for &m in photons_in {
            occ.0[table.index_of(m)?] += 1;
        }
        let n = photons_in.len();
        Self::from_terms(table, n, [(occ, Complex64::new(1.0, 0.0))])
    }

    pub fn table(&self) -> &ModeTable {
        &self.table
    }

    pub fn shared_table(&self) -> &Arc<ModeTable> {
        &self.table
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (lexicographic occupation) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, occ: &Occupation) -> Complex64 {
        self.terms.get(occ).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    fn same_table(&self, other: &FockState) -> bool {
        Arc::ptr_eq(&self.table, &other.table) || *self.table == *other.table
    }

    pub fn scaled(&self, c: Complex64) -> FockState {
        let mut terms: BTreeMap<_, _> = self.terms.iter().map(|(o, &a)| (o.clone(), a * c)).collect();
        prune(&mut terms);
        FockState {
            table: self.table.clone(),
            photons: self.photons,
            terms,
        }
    }

    /// The state divided by its norm; the zero state stays zero.
    pub fn normalized(&self) -> FockState {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return self.clone();
        }
        self.scaled(Complex64::new(1.0 / n, 0.0))
    }

    /// `ca·a + cb·b`, pruned, not renormalized.
    pub fn superpose(a: &FockState, ca: Complex64, b: &FockState, cb: Complex64) -> Result<FockState> {
        if !a.same_table(b) {
            return Err(Error::ModeTableMismatch);
        }
        // A zero state carries no photon-number constraint.
        if a.photons != b.photons && !a.is_empty() && !b.is_empty() {
            return Err(Error::PhotonNumberMismatch(a.photons, b.photons));
        }
        let photons = if a.is_empty() { b.photons } else { a.photons };
        let mut terms = BTreeMap::new();
        for (o, &amp) in &a.terms {
            *terms.entry(o.clone()).or_insert(Complex64::default()) += ca * amp;
        }
        for (o, &amp) in &b.terms {
            *terms.entry(o.clone()).or_insert(Complex64::default()) += cb * amp;
        }
        prune(&mut terms);
        Ok(FockState {
            table: a.table.clone(),
            photons,
            terms,
        })
    }

    /// `⟨a|b⟩`, antilinear in `a`.
    pub fn inner_product(a: &FockState, b: &FockState) -> Result<Complex64> {
        if !a.same_table(b) {
            return Err(Error::ModeTableMismatch);
        }
        let (small, large, conj_small) = if a.len() <= b.len() { (a, b, true) } else { (b, a, false) };
        let mut acc = Complex64::default();
        for (o, &x) in &small.terms {
            if let Some(&y) = large.terms.get(o) {
                acc += if conj_small { x.conj() * y } else { y.conj() * x };
            }
        }
        Ok(acc)
    }

    /// `|⟨a|b⟩|²` for normalized states.
    pub fn fidelity(a: &FockState, b: &FockState) -> Result<f64> {
        const TOL: f64 = 1e-9;
        for s in [a, b] {
            if !s.is_normalized(TOL) {
                return Err(Error::NotNormalized(s.norm_sqr()));
            }
        }
        Ok(Self::inner_product(a, b)?.norm_sqr().min(1.0))
    }

    /// Projects `modes` onto the count `pattern` and removes them from the table.
    pub fn project_counts(&self, modes: &[ModeId], pattern: &[u8]) -> Result<Projection> {
        if modes.len() != pattern.len() {
            return Err(Error::OccupationLength {
                expected: modes.len(),
                found: pattern.len(),
            });
        }
        let pattern_total: usize = pattern.iter().map(|&n| n as usize).sum();
        if pattern_total > self.photons {
            return Err(Error::PatternTooLarge {
                pattern: pattern_total,
                photons: self.photons,
            });
        }
        let idx = modes.iter().map(|&m| self.table.index_of(m)).collect::<Result<Vec<_>>>()?;
        let (table, reindex) = self.table.without(modes)?;
        let table = Arc::new(table);
        let mut kept = Vec::new();
        let mut probability = 0.0;
        for (occ, &amp) in &self.terms {
            if idx.iter().zip(pattern).all(|(&i, &n)| occ.0[i] == n) {
                probability += amp.norm_sqr();
                kept.push((restrict(occ, &reindex, table.len()), amp));
            }
        }
        let remainder = if probability > 0.0 {
            let scale = 1.0 / probability.sqrt();
            FockState::from_terms(
                table.clone(),
                self.photons - pattern_total,
                kept.into_iter().map(|(o, a)| (o, a * scale)),
            )?
        } else {
            FockState::zero(table, self.photons - pattern_total)
        };
        Ok(Projection {
            probability,
            remainder,
            reindex,
        })
    }

    /// Every count pattern on `modes` with nonzero weight, in lexicographic
    /// pattern order, with its probability and post-measurement state.
    pub fn measure(&self, modes: &[ModeId]) -> Result<Vec<MeasurementOutcome>> {
        let idx = modes.iter().map(|&m| self.table.index_of(m)).collect::<Result<Vec<_>>>()?;
        let (table, reindex) = self.table.without(modes)?;
        let table = Arc::new(table);
        let mut groups: BTreeMap<Vec<u8>, Vec<(Occupation, Complex64)>> = BTreeMap::new();
        for (occ, &amp) in &self.terms {
            let pattern: Vec<u8> = idx.iter().map(|&i| occ.0[i]).collect();
            groups
                .entry(pattern)
                .or_default()
                .push((restrict(occ, &reindex, table.len()), amp));
        }
        groups
            .into_iter()
            .map(|(pattern, terms)| {
                let probability: f64 = terms.iter().map(|(_, a)| a.norm_sqr()).sum();
                let measured: usize = pattern.iter().map(|&n| n as usize).sum();
                let scale = 1.0 / probability.sqrt();
                let remainder = FockState::from_terms(
                    table.clone(),
                    self.photons - measured,
                    terms.into_iter().map(|(o, a)| (o, a * scale)),
                )?;
                Ok(MeasurementOutcome {
                    pattern,
                    projection: Projection {
                        probability,
                        remainder,
                        reindex: reindex.clone(),
                    },
                })
            })
            .collect()
    }

    /// Re-expresses the state over a larger table containing every current mode;
    /// the added modes are in vacuum.
    pub fn embed(&self, target: Arc<ModeTable>) -> Result<FockState> {
        let map = self
            .table
            .modes()
            .iter()
            .map(|&m| target.index_of(m))
            .collect::<Result<Vec<_>>>()?;
        let terms = self.terms.iter().map(|(occ, &a)| {
            let mut o = Occupation::zeros(target.len());
            for (i, &n) in occ.0.iter().enumerate() {
                o.0[map[i]] = n;
            }
            (o, a)
        });
        FockState::from_terms(target.clone(), self.photons, terms)
    }

    /// Tensor product of states over disjoint tables, expressed over the merged table.
    pub fn tensor(&self, other: &FockState) -> Result<FockState> {
        let table = Arc::new(self.table.merged(&other.table)?);
        let map_a = self.table.modes().iter().map(|&m| table.index_of(m)).collect::<Result<Vec<_>>>()?;
        let map_b = other.table.modes().iter().map(|&m| table.index_of(m)).collect::<Result<Vec<_>>>()?;
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for (oa, &a) in &self.terms {
            for (ob, &b) in &other.terms {
                let mut o = Occupation::zeros(table.len());
                for (i, &n) in oa.0.iter().enumerate() {
                    o.0[map_a[i]] = n;
                }
                for (i, &n) in ob.0.iter().enumerate() {
                    o.0[map_b[i]] = n;
                }
                terms.push((o, a * b));
            }
        }
        FockState::from_terms(table, self.photons + other.photons, terms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&StateDocument::from(self)).expect("state serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<FockState> {
        let doc: StateDocument = serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        doc.try_into()
    }
}

fn restrict(occ: &Occupation, reindex: &[Option<usize>], len: usize) -> Occupation {
    let mut o = Occupation::zeros(len);
    for (i, &n) in occ.0.iter().enumerate() {
        if let Some(j) = reindex[i] {
            o.0[j] = n;
        }
    }
    o
}

#[derive(Serialize, Deserialize)]
struct TermDocument {
    occ: Vec<u8>,
    re: f64,
    im: f64,
}

/// Canonical JSON layout of a state: mode labels in table order and terms in
/// lexicographic occupation order.
#[derive(Serialize, Deserialize)]
struct StateDocument {
    modes: Vec<String>,
    terms: Vec<TermDocument>,
}

impl From<&FockState> for StateDocument {
    fn from(s: &FockState) -> Self {
        StateDocument {
            modes: s.table.labels(),
            terms: s
                .terms
                .iter()
                .map(|(o, a)| TermDocument {
                    occ: o.0.clone(),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<StateDocument> for FockState {
    type Error = Error;

    fn try_from(doc: StateDocument) -> Result<Self> {
        let modes = doc.modes.iter().map(|s| s.parse()).collect::<Result<Vec<ModeId>>>()?;
        let table = ModeTable::from_modes(modes.clone())?;
        if table.modes() != modes.as_slice() {
            return Err(Error::Serialization("mode labels are not in canonical order".into()));
        }
        let photons = doc.terms.first().map(|t| t.occ.iter().map(|&n| n as usize).sum()).unwrap_or(0);
        FockState::from_terms(
            Arc::new(table),
            photons,
            doc.terms
                .into_iter()
                .map(|t| (Occupation(t.occ), Complex64::new(t.re, t.im))),
        )
    }
}

impl Serialize for FockState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StateDocument::from(self).serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn one_party_first_copy() -> Arc<ModeTable> {
        Arc::new(ModeTable::for_copies(1, &[CopyId::First]))
    }

    fn m(s: &str) -> ModeId {
        s.parse().unwrap()
    }

    #[test]
    fn superpose_builds_beam_splitter_output() {
        let t = one_party_first_copy();
        let up = FockState::basis(t.clone(), &[m("p0c1uH")]).unwrap();
        let down = FockState::basis(t.clone(), &[m("p0c1dH")]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let out = FockState::superpose(&up, c(s), &down, c(s)).unwrap();
        assert_eq!(out.len(), 2);
        assert_abs_diff_eq!(out.norm_sqr(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(FockState::inner_product(&up, &out).unwrap().re, s, epsilon = 1e-15);
    }

    #[test]
    fn superpose_cancels_and_keeps_identity() {
        let t = one_party_first_copy();
        let s = FockState::basis(t.clone(), &[m("p0c1uH"), m("p0c1dV")]).unwrap();
        let zero = FockState::superpose(&s, c(1.0), &s, c(-1.0)).unwrap();
        assert!(zero.is_empty());
        let z = FockState::zero(t, 2);
        let same = FockState::superpose(&s, c(1.0), &z, c(0.0)).unwrap();
        assert_eq!(same.to_json(), s.to_json());
    }

    #[test]
    fn superpose_rejects_mismatches() {
        let t = one_party_first_copy();
        let one = FockState::basis(t.clone(), &[m("p0c1uH")]).unwrap();
        let two = FockState::basis(t, &[m("p0c1uH"), m("p0c1uH")]).unwrap();
        assert_eq!(
            FockState::superpose(&one, c(1.0), &two, c(1.0)).unwrap_err(),
            Error::PhotonNumberMismatch(1, 2)
        );
        let other = Arc::new(ModeTable::for_copies(2, &[CopyId::First]));
        let elsewhere = FockState::basis(other, &[m("p1c1uH")]).unwrap();
        assert_eq!(
            FockState::superpose(&one, c(1.0), &elsewhere, c(1.0)).unwrap_err(),
            Error::ModeTableMismatch
        );
        assert_eq!(FockState::inner_product(&one, &elsewhere).unwrap_err(), Error::ModeTableMismatch);
    }

    #[test]
    fn inner_product_and_fidelity_on_basis_kets() {
        let t = one_party_first_copy();
        let a = FockState::basis(t.clone(), &[m("p0c1uH")]).unwrap();
        let b = FockState::basis(t.clone(), &[m("p0c1dH")]).unwrap();
        assert_eq!(FockState::inner_product(&a, &a).unwrap(), c(1.0));
        assert_eq!(FockState::inner_product(&a, &b).unwrap(), c(0.0));
        assert_eq!(FockState::fidelity(&a, &a).unwrap(), 1.0);
        assert_eq!(FockState::fidelity(&a, &b).unwrap(), 0.0);
        let unnormalized = a.scaled(c(2.0));
        assert!(matches!(FockState::fidelity(&unnormalized, &a), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn inner_product_is_antilinear_in_first_argument() {
        let t = one_party_first_copy();
        let a = FockState::basis(t.clone(), &[m("p0c1uH")]).unwrap();
        let b = a.scaled(Complex64::new(0.0, 1.0));
        assert_eq!(FockState::inner_product(&b, &a).unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(FockState::inner_product(&a, &b).unwrap(), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn project_symmetric_superposition() {
        let t = one_party_first_copy();
        let up = FockState::basis(t.clone(), &[m("p0c1uH")]).unwrap();
        let down = FockState::basis(t.clone(), &[m("p0c1dH")]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = FockState::superpose(&up, c(s), &down, c(s)).unwrap();
        let p = psi.project_counts(&[m("p0c1uH")], &[1]).unwrap();
        assert_abs_diff_eq!(p.probability, 0.5, epsilon = 1e-15);
        assert_eq!(p.remainder.photons(), 0);
        assert_eq!(p.remainder.len(), 1);
        assert_eq!(p.remainder.table().len(), 3);
        assert_abs_diff_eq!(p.remainder.norm_sqr(), 1.0, epsilon = 1e-15);
        assert_eq!(p.reindex, vec![None, Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn project_without_matching_component() {
        let t = one_party_first_copy();
        let s = FockState::basis(t, &[m("p0c1uH"), m("p0c1uH")]).unwrap();
        let p = s.project_counts(&[m("p0c1uH")], &[1]).unwrap();
        assert_eq!(p.probability, 0.0);
        assert!(p.remainder.is_empty());
        assert_eq!(
            s.project_counts(&[m("p0c1uH")], &[3]).unwrap_err(),
            Error::PatternTooLarge { pattern: 3, photons: 2 }
        );
        assert!(matches!(s.project_counts(&[m("p4c1uH")], &[0]), Err(Error::UnknownMode(_))));
    }

    #[test]
    fn tensor_interleaves_party_major() {
        let a_table = Arc::new(ModeTable::for_copies(2, &[CopyId::First]));
        let b_table = Arc::new(ModeTable::for_copies(2, &[CopyId::Second]));
        let a = FockState::basis(a_table, &[m("p0c1uH"), m("p1c1dV")]).unwrap();
        let b = FockState::basis(b_table, &[m("p0c2uH"), m("p1c2uV")]).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(*ab.table(), ModeTable::protocol(2));
        let (occ, _) = ab.terms().next().unwrap();
        let expected = FockState::basis(
            Arc::new(ModeTable::protocol(2)),
            &[m("p0c1uH"), m("p1c1dV"), m("p0c2uH"), m("p1c2uV")],
        )
        .unwrap();
        assert_eq!(expected.terms().next().unwrap().0, occ);
    }

    #[test]
    fn json_layout_is_canonical() {
        let t = one_party_first_copy();
        let a = FockState::basis(t.clone(), &[m("p0c1dH")]).unwrap();
        let b = FockState::basis(t, &[m("p0c1uH")]).unwrap();
        let s = FockState::superpose(&a, c(0.6), &b, c(-0.8)).unwrap();
        assert_eq!(
            s.to_json(),
            r#"{"modes":["p0c1uH","p0c1uV","p0c1dH","p0c1dV"],"terms":[{"occ":[0,0,1,0],"re":0.6,"im":0.0},{"occ":[1,0,0,0],"re":-0.8,"im":0.0}]}"#
        );
    }

    #[test]
    fn params_validation_and_formula() {
        let p = StateParams::from_squared(0.2, 0.5).unwrap();
        assert_abs_diff_eq!(p.success_formula(), 0.16, epsilon = 1e-15);
        assert_abs_diff_eq!(StateParams::balanced().success_formula(), 0.25, epsilon = 1e-15);
        assert!(StateParams::from_squared(1.2, 0.5).is_err());
        assert!(StateParams::new(c(1.0), c(1.0), c(1.0), c(0.0)).is_err());
    }

    fn arb_state() -> impl Strategy<Value = FockState> {
        // Up to 6 terms of 3 photons over a 4-mode table.
        prop::collection::vec(
            (prop::collection::vec(0usize..4, 3), -1.0f64..1.0, -1.0f64..1.0),
            1..6,
        )
        .prop_map(|raw| {
            let t = one_party_first_copy();
            let terms = raw.into_iter().map(|(modes, re, im)| {
                let mut o = Occupation::zeros(4);
                for i in modes {
                    o.0[i] += 1;
                }
                (o, Complex64::new(re, im))
            });
            FockState::from_terms(t, 3, terms).unwrap()
        })
    }

    proptest! {
        #[test]
        fn measurement_probabilities_sum_to_norm(s in arb_state(), k in 1usize..4) {
            let modes: Vec<ModeId> = s.table().modes()[..k].to_vec();
            let total: f64 = s.measure(&modes).unwrap().iter().map(|o| o.projection.probability).sum();
            prop_assert!((total - s.norm_sqr()).abs() <= 1e-10);
            for o in s.measure(&modes).unwrap() {
                let p = s.project_counts(&modes, &o.pattern).unwrap();
                prop_assert!((p.probability - o.projection.probability).abs() <= 1e-14);
                prop_assert_eq!(p.remainder.photons(), 3 - o.pattern.iter().map(|&n| n as usize).sum::<usize>());
            }
        }

        #[test]
        fn json_round_trip_is_byte_stable(s in arb_state()) {
            let json = s.to_json();
            let back = FockState::from_json(&json).unwrap();
            prop_assert_eq!(back.to_json(), json);
        }
    }
}
