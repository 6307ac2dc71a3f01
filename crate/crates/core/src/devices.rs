//! Measurement devices: polarization parity check (plain and improved), spatial
//! parity check, and the single-photon two-qubit measurement.
//!
//! All devices work in place on the mode table: the photon-1 paths become the
//! retained (port 1) output and the photon-2 paths carry the detector side.
//! After a 45° PBS a path's `H` slot is the `|+⟩` detector and its `V` slot the
//! `|−⟩` detector. Beam-splitter outputs leaving on the `up` path are tagged
//! `+′` and those on the `down` path `−′`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{CopyId, FockState, ModeId, ModeTable, Path, PhotonPaths, Polarization};
use crate::optics::{Element, OpticalCircuit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DeviceKind {
    #[serde(rename = "PPC")]
    Ppc,
    #[serde(rename = "improved PPC")]
    ImprovedPpc,
    #[serde(rename = "SPC")]
    Spc,
    #[serde(rename = "SPM")]
    Spm,
}

impl fmt::Display for DeviceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeviceKind::Ppc => "PPC",
            DeviceKind::ImprovedPpc => "improved PPC",
            DeviceKind::Spc => "SPC",
            DeviceKind::Spm => "SPM",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }
}

/// Polarization reading of a detector. Diagonal for every device except the
/// improved PPC, whose detectors sit behind polarization-sorting PBSs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PolarizationReading {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    H,
    V,
}

impl PolarizationReading {
    /// The diagonal-basis sign, if this is a diagonal reading.
    pub fn diagonal(self) -> Option<Sign> {
        match self {
            PolarizationReading::Plus => Some(Sign::Plus),
            PolarizationReading::Minus => Some(Sign::Minus),
            _ => None,
        }
    }
}

/// What a single detector click says about the measured photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OutcomeTag {
    pub spatial: Sign,
    pub polarization: PolarizationReading,
}

impl fmt::Display for OutcomeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.spatial {
            Sign::Plus => "+'",
            Sign::Minus => "-'",
        };
        let p = match self.polarization {
            PolarizationReading::Plus => "+",
            PolarizationReading::Minus => "-",
            PolarizationReading::H => "H",
            PolarizationReading::V => "V",
        };
        write!(f, "({s},{p})")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Detector {
    pub mode: ModeId,
    pub tag: OutcomeTag,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectorLayout {
    pub detectors: Vec<Detector>,
    pub kept_modes: Vec<ModeId>,
    /// Photons entering the device.
    pub input_photons: usize,
}

impl DetectorLayout {
    pub fn detector_modes(&self) -> Vec<ModeId> {
        self.detectors.iter().map(|d| d.mode).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum DetectorModel {
    /// Photon-number-resolving detectors.
    #[default]
    #[serde(rename = "pnr")]
    Pnr,
    /// Click/no-click detectors that cannot tell one photon from two.
    #[serde(rename = "bucket")]
    Bucket,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Classification {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionEvent {
    /// True photon numbers per detector.
    pub counts: Vec<u8>,
    /// What the detectors report under the chosen model.
    pub clicks: Vec<bool>,
    pub classification: Classification,
    /// Accepted on clicks although the true photon numbers violate the
    /// success signature (a bucket-detector false accept).
    pub ambiguous: bool,
    /// Tag of the single firing detector for accepted events.
    pub tag: Option<OutcomeTag>,
}

impl DetectionEvent {
    pub fn is_accept(&self) -> bool {
        self.classification == Classification::Accept
    }

    pub fn is_false_accept(&self) -> bool {
        self.is_accept() && self.ambiguous
    }
}

/// Success signature: exactly one photon on the detectors (and hence, for the
/// two-photon parity checks, exactly one on the retained port).
pub fn classify_event(layout: &DetectorLayout, model: DetectorModel, counts: &[u8]) -> Result<DetectionEvent> {
    if counts.len() != layout.detectors.len() {
        return Err(Error::DetectorCount {
            expected: layout.detectors.len(),
            found: counts.len(),
        });
    }
    let detected: usize = counts.iter().map(|&n| n as usize).sum();
    if detected > layout.input_photons {
        return Err(Error::DeviceInput(detected, layout.input_photons));
    }
    let truly_single = detected == 1;
    let clicks: Vec<bool> = counts.iter().map(|&n| n >= 1).collect();
    let accept = match model {
        DetectorModel::Pnr => truly_single,
        DetectorModel::Bucket => clicks.iter().filter(|&&c| c).count() == 1,
    };
    let tag = if accept {
        counts.iter().position(|&n| n > 0).map(|i| layout.detectors[i].tag)
    } else {
        None
    };
    Ok(DetectionEvent {
        counts: counts.to_vec(),
        clicks,
        classification: if accept { Classification::Accept } else { Classification::Reject },
        ambiguous: accept && !truly_single,
        tag,
    })
}

/// An optical circuit together with where its detectors sit.
#[derive(Debug, Clone)]
pub struct Device {
    pub kind: DeviceKind,
    pub circuit: OpticalCircuit,
    pub layout: DetectorLayout,
    pub input_modes: Vec<ModeId>,
}

#[derive(Debug, Clone)]
pub struct DeviceOutcome {
    pub event: DetectionEvent,
    pub probability: f64,
    /// Renormalized state of everything not absorbed by the detectors.
    pub remainder: FockState,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeviceDescription {
    pub kind: DeviceKind,
    pub elements: Vec<crate::optics::ElementRecord>,
    pub layout: DetectorLayout,
}

const fn tag(spatial: Sign, polarization: PolarizationReading) -> OutcomeTag {
    OutcomeTag { spatial, polarization }
}

/// Detectors behind a 45° PBS on each of two beam-splitter outputs.
fn diagonal_detectors(plus_path: Path, minus_path: Path) -> Vec<Detector> {
    use PolarizationReading::{Minus, Plus};
    vec![
        Detector { mode: plus_path.mode(Polarization::H), tag: tag(Sign::Plus, Plus) },
        Detector { mode: plus_path.mode(Polarization::V), tag: tag(Sign::Plus, Minus) },
        Detector { mode: minus_path.mode(Polarization::H), tag: tag(Sign::Minus, Plus) },
        Detector { mode: minus_path.mode(Polarization::V), tag: tag(Sign::Minus, Minus) },
    ]
}

fn check_distinct(a: PhotonPaths, b: PhotonPaths) -> Result<()> {
    if a == b {
        return Err(Error::PathCollision(format!("both photons use p{}c{}", a.party, a.copy.number())));
    }
    Ok(())
}

fn ppc_front(photon1: PhotonPaths, photon2: PhotonPaths) -> Vec<Element> {
    vec![
        Element::Pbs0 { first: photon1.up(), second: Some(photon2.up()) },
        Element::Pbs0 { first: photon1.down(), second: Some(photon2.down()) },
        Element::BeamSplitter { up: photon2.up(), down: photon2.down() },
    ]
}

/// Polarization parity check. One 0° PBS per spatial layer compares the two
/// photons' polarizations; the detector-side photon then meets a beam splitter
/// and a 45° PBS on each output.
pub fn build_ppc(table: Arc<ModeTable>, photon1: PhotonPaths, photon2: PhotonPaths) -> Result<Device> {
    check_distinct(photon1, photon2)?;
    let mut elements = ppc_front(photon1, photon2);
    elements.push(Element::Pbs45 { path: photon2.up() });
    elements.push(Element::Pbs45 { path: photon2.down() });
    let circuit = OpticalCircuit::from_elements(table, elements)?;
    Ok(Device {
        kind: DeviceKind::Ppc,
        circuit,
        layout: DetectorLayout {
            detectors: diagonal_detectors(photon2.up(), photon2.down()),
            kept_modes: photon1.modes().to_vec(),
            input_photons: 2,
        },
        input_modes: [photon1.modes(), photon2.modes()].concat(),
    })
}

/// Improved polarization parity check: a 0° PBS on each beam-splitter output
/// sends `H` and `V` to separate detectors, so two detector-side photons of
/// different polarization can never share a detector.
pub fn build_improved_ppc(table: Arc<ModeTable>, photon1: PhotonPaths, photon2: PhotonPaths) -> Result<Device> {
    use PolarizationReading::{H, V};
    check_distinct(photon1, photon2)?;
    let mut elements = ppc_front(photon1, photon2);
    elements.push(Element::Pbs0 { first: photon2.up(), second: None });
    elements.push(Element::Pbs0 { first: photon2.down(), second: None });
    let circuit = OpticalCircuit::from_elements(table, elements)?;
    let (up, down) = (photon2.up(), photon2.down());
    Ok(Device {
        kind: DeviceKind::ImprovedPpc,
        circuit,
        layout: DetectorLayout {
            detectors: vec![
                Detector { mode: up.mode(Polarization::H), tag: tag(Sign::Plus, H) },
                Detector { mode: up.mode(Polarization::V), tag: tag(Sign::Plus, V) },
                Detector { mode: down.mode(Polarization::H), tag: tag(Sign::Minus, H) },
                Detector { mode: down.mode(Polarization::V), tag: tag(Sign::Minus, V) },
            ],
            kept_modes: photon1.modes().to_vec(),
            input_photons: 2,
        },
        input_modes: [photon1.modes(), photon2.modes()].concat(),
    })
}

/// Optional spatial parity check variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SpcOptions {
    /// Put an extra beam splitter, fed by a vacuum tap port, on each
    /// detector-side path before its 45° PBS. The table must contain tap paths
    /// `t0` and `t1` of the photon-2 side.
    pub extra_splitters: bool,
}

/// Spatial parity check. `y1d` and `y2u` interfere on a beam splitter; `y2d` is
/// renamed to `y1d` so that the retained port carries the photon-1 paths.
pub fn build_spc(table: Arc<ModeTable>, photon1: PhotonPaths, photon2: PhotonPaths) -> Result<Device> {
    build_spc_with(table, photon1, photon2, SpcOptions::default())
}

pub fn build_spc_with(
    table: Arc<ModeTable>,
    photon1: PhotonPaths,
    photon2: PhotonPaths,
    options: SpcOptions,
) -> Result<Device> {
    check_distinct(photon1, photon2)?;
    let (y1u, y1d, y2u, y2d) = (photon1.up(), photon1.down(), photon2.up(), photon2.down());
    let [y1d_h, y1d_v] = y1d.modes();
    let [y2u_h, y2u_v] = y2u.modes();
    let [y2d_h, y2d_v] = y2d.modes();
    let mut elements = vec![
        // Out_u leaves in the y1d slot, Out_d in the y2u slot.
        Element::BeamSplitter { up: y1d, down: y2u },
        // y2d → y1d (retained), Out_u → y2u, Out_d → y2d.
        Element::Relabel {
            from: vec![y2d_h, y2d_v, y1d_h, y1d_v, y2u_h, y2u_v],
            to: vec![y1d_h, y1d_v, y2u_h, y2u_v, y2d_h, y2d_v],
        },
    ];
    let mut detectors = diagonal_detectors(y2u, y2d);
    if options.extra_splitters {
        let (t0, t1) = (photon2.tap(0), photon2.tap(1));
        elements.push(Element::BeamSplitter { up: y2u, down: t0 });
        elements.push(Element::BeamSplitter { up: y2d, down: t1 });
        for p in [t0, t1] {
            elements.push(Element::Pbs45 { path: p });
        }
        detectors.extend(diagonal_detectors(t0, t1));
    }
    elements.push(Element::Pbs45 { path: y2u });
    elements.push(Element::Pbs45 { path: y2d });
    let circuit = OpticalCircuit::from_elements(table, elements)?;
    let _ = y1u;
    Ok(Device {
        kind: DeviceKind::Spc,
        circuit,
        layout: DetectorLayout {
            detectors,
            kept_modes: photon1.modes().to_vec(),
            input_photons: 2,
        },
        input_modes: [photon1.modes(), photon2.modes()].concat(),
    })
}

/// Single-photon two-qubit measurement: a beam splitter across the photon's two
/// paths measures the spatial diagonal basis, a 45° PBS on each output the
/// polarization diagonal basis.
pub fn build_spm(table: Arc<ModeTable>, photon: PhotonPaths) -> Result<Device> {
    let circuit = OpticalCircuit::from_elements(
        table,
        [
            Element::BeamSplitter { up: photon.up(), down: photon.down() },
            Element::Pbs45 { path: photon.up() },
            Element::Pbs45 { path: photon.down() },
        ],
    )?;
    Ok(Device {
        kind: DeviceKind::Spm,
        circuit,
        layout: DetectorLayout {
            detectors: diagonal_detectors(photon.up(), photon.down()),
            kept_modes: Vec::new(),
            input_photons: 1,
        },
        input_modes: photon.modes().to_vec(),
    })
}

impl Device {
    pub fn description(&self) -> DeviceDescription {
        DeviceDescription {
            kind: self.kind,
            elements: self.circuit.element_log(),
            layout: self.layout.clone(),
        }
    }

    /// Every term of `state` must put exactly the device's photon count on its input modes.
    pub fn check_input(&self, state: &FockState) -> Result<()> {
        let idx = self
            .input_modes
            .iter()
            .map(|&m| state.table().index_of(m))
            .collect::<Result<Vec<_>>>()?;
        for (occ, _) in state.terms() {
            let n: usize = idx.iter().map(|&i| occ.counts()[i] as usize).sum();
            if n != self.layout.input_photons {
                return Err(Error::DeviceInput(n, self.layout.input_photons));
            }
        }
        Ok(())
    }

    /// Runs the device on `state` and returns every detector pattern with its
    /// classification, probability and post-measurement state.
    pub fn measure(&self, state: &FockState, model: DetectorModel) -> Result<Vec<DeviceOutcome>> {
        self.check_input(state)?;
        let out = self.circuit.apply(state)?;
        out.measure(&self.layout.detector_modes())?
            .into_iter()
            .map(|o| {
                Ok(DeviceOutcome {
                    event: classify_event(&self.layout, model, &o.pattern)?,
                    probability: o.projection.probability,
                    remainder: o.projection.remainder,
                })
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Truth tables

/// One row of a device truth table.
#[derive(Debug, Clone, Serialize)]
pub struct TruthRow {
    pub device: DeviceKind,
    pub input: String,
    /// Terms after the parity-comparing PBS stage (PPC only), as
    /// `photon@path` lists with their amplitudes.
    pub routed_terms: Option<Vec<(String, f64)>>,
    /// Probability of each detector-side photon number.
    pub detector_photons: BTreeMap<usize, f64>,
    /// Probability of each retained-port photon number.
    pub port1_photons: BTreeMap<usize, f64>,
    pub accept_pnr: f64,
    pub accept_bucket: f64,
    pub false_accept_bucket: f64,
    /// Probability of two or more photons on a single detector.
    pub shared_detector: f64,
    /// Probability of each single-detector outcome tag.
    pub outcome_tags: BTreeMap<String, f64>,
    pub verdict: String,
}

fn round(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 { 0.0 } else { r }
}

fn alias(kind: DeviceKind, m: ModeId) -> String {
    let name = match (kind, m.copy) {
        (DeviceKind::Spc, CopyId::First) => "y1",
        (DeviceKind::Spc, CopyId::Second) => "y2",
        (_, CopyId::First) => "x1",
        (_, CopyId::Second) => "x2",
    };
    let s = match m.spatial {
        crate::fock::Spatial::Up => "u".to_string(),
        crate::fock::Spatial::Down => "d".to_string(),
        crate::fock::Spatial::Tap(k) => format!("t{k}"),
    };
    let p = match m.polarization {
        Polarization::H => "H",
        Polarization::V => "V",
    };
    format!("{p}@{name}{s}")
}

fn describe_terms(kind: DeviceKind, state: &FockState) -> Vec<(String, f64)> {
    state
        .terms()
        .map(|(occ, amp)| {
            let mut photons = Vec::new();
            for (i, &n) in occ.counts().iter().enumerate() {
                for _ in 0..n {
                    photons.push(alias(kind, state.table().modes()[i]));
                }
            }
            (photons.join(" "), round(amp.re))
        })
        .collect()
}

/// Summarizes a device acting on `input`.
pub fn truth_row(device: &Device, input_label: &str, input: &FockState) -> Result<TruthRow> {
    let routed_terms = match device.kind {
        DeviceKind::Ppc | DeviceKind::ImprovedPpc => {
            let stage = OpticalCircuit::from_elements(
                device.circuit.shared_table().clone(),
                device.circuit.elements()[..2].iter().cloned(),
            )?;
            Some(describe_terms(device.kind, &stage.apply(input)?))
        }
        _ => None,
    };
    let pnr = device.measure(input, DetectorModel::Pnr)?;
    let bucket = device.measure(input, DetectorModel::Bucket)?;
    let mut row = TruthRow {
        device: device.kind,
        input: input_label.to_string(),
        routed_terms,
        detector_photons: BTreeMap::new(),
        port1_photons: BTreeMap::new(),
        accept_pnr: 0.0,
        accept_bucket: 0.0,
        false_accept_bucket: 0.0,
        shared_detector: 0.0,
        outcome_tags: BTreeMap::new(),
        verdict: String::new(),
    };
    for o in &pnr {
        let detected: usize = o.event.counts.iter().map(|&n| n as usize).sum();
        *row.detector_photons.entry(detected).or_default() += o.probability;
        if !device.layout.kept_modes.is_empty() {
            *row.port1_photons.entry(device.layout.input_photons - detected).or_default() += o.probability;
        }
        if o.event.counts.iter().any(|&n| n >= 2) {
            row.shared_detector += o.probability;
        }
        if let Some(t) = o.event.tag {
            row.accept_pnr += o.probability;
            *row.outcome_tags.entry(t.to_string()).or_default() += o.probability;
        }
    }
    for o in &bucket {
        if o.event.is_accept() {
            row.accept_bucket += o.probability;
        }
        if o.event.is_false_accept() {
            row.false_accept_bucket += o.probability;
        }
    }
    for v in row
        .detector_photons
        .values_mut()
        .chain(row.port1_photons.values_mut())
        .chain(row.outcome_tags.values_mut())
    {
        *v = round(*v);
    }
    row.detector_photons.retain(|_, v| *v != 0.0);
    row.port1_photons.retain(|_, v| *v != 0.0);
    row.outcome_tags.retain(|_, v| *v != 0.0);
    row.accept_pnr = round(row.accept_pnr);
    row.accept_bucket = round(row.accept_bucket);
    row.false_accept_bucket = round(row.false_accept_bucket);
    row.shared_detector = round(row.shared_detector);
    row.verdict = verdict(&row);
    Ok(row)
}

fn verdict(row: &TruthRow) -> String {
    let counts = |m: &BTreeMap<usize, f64>| m.keys().map(|k| k.to_string()).collect::<Vec<_>>().join("/");
    let outcome = if row.accept_pnr == 1.0 {
        "Accept"
    } else if row.accept_pnr == 0.0 {
        "Reject"
    } else {
        "Accept with probability"
    };
    if row.port1_photons.is_empty() {
        format!("{} detector photons, {outcome}", counts(&row.detector_photons))
    } else if row.detector_photons.len() == 1 && row.detector_photons.contains_key(&0) {
        format!("0 detector photons, both port 1, {outcome}")
    } else {
        format!("{} detector photons, {outcome}", counts(&row.detector_photons))
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn two_photon_input(
    table: &Arc<ModeTable>,
    photon1: (Polarization, &[Path]),
    photon2: (Polarization, &[Path]),
) -> Result<FockState> {
    let mut state = FockState::zero(table.clone(), 2);
    let w = 1.0 / ((photon1.1.len() * photon2.1.len()) as f64).sqrt();
    for a in photon1.1 {
        for b in photon2.1 {
            let term = FockState::basis(table.clone(), &[a.mode(photon1.0), b.mode(photon2.0)])?;
            state = FockState::superpose(&state, c(1.0), &term, c(w))?;
        }
    }
    Ok(state)
}

fn pol_label(p: Polarization) -> &'static str {
    match p {
        Polarization::H => "H",
        Polarization::V => "V",
    }
}

/// Truth tables for all four devices on one party's two photons.
pub fn truth_tables() -> Result<Vec<TruthRow>> {
    use Polarization::{H, V};
    let table = Arc::new(ModeTable::for_copies(1, &[CopyId::First, CopyId::Second]));
    let x1 = PhotonPaths::new(0, CopyId::First);
    let x2 = PhotonPaths::new(0, CopyId::Second);
    let mut rows = Vec::new();

    for device in [build_ppc(table.clone(), x1, x2)?, build_improved_ppc(table.clone(), x1, x2)?] {
        for (p1, p2) in [(H, H), (H, V), (V, H), (V, V)] {
            let input = two_photon_input(&table, (p1, &[x1.up(), x1.down()]), (p2, &[x2.up(), x2.down()]))?;
            let label = format!("|{}{}>(x1u+x1d)(x2u+x2d)/2", pol_label(p1), pol_label(p2));
            rows.push(truth_row(&device, &label, &input)?);
        }
    }

    let spc = build_spc(table.clone(), x1, x2)?;
    for (s1, s2) in [("u", "u"), ("u", "d"), ("d", "u"), ("d", "d")] {
        let pick = |p: PhotonPaths, s: &str| if s == "u" { p.up() } else { p.down() };
        for pol in [H, V] {
            let input = two_photon_input(&table, (pol, &[pick(x1, s1)]), (pol, &[pick(x2, s2)]))?;
            let label = format!("|{p}{p}>|y1{s1} y2{s2}>", p = pol_label(pol));
            rows.push(truth_row(&spc, &label, &input)?);
        }
    }

    let single = Arc::new(ModeTable::for_copies(1, &[CopyId::Second]));
    let spm = build_spm(single.clone(), x2)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let ket = |terms: &[(Polarization, Path, f64)]| -> Result<FockState> {
        let mut st = FockState::zero(single.clone(), 1);
        for &(p, path, w) in terms {
            st = FockState::superpose(&st, c(1.0), &FockState::basis(single.clone(), &[path.mode(p)])?, c(w))?;
        }
        Ok(st)
    };
    let (u, d) = (x2.up(), x2.down());
    let spm_inputs: Vec<(&str, FockState)> = vec![
        ("|+>(u+d)/sqrt2", ket(&[(H, u, 0.5), (V, u, 0.5), (H, d, 0.5), (V, d, 0.5)])?),
        ("|->(u-d)/sqrt2", ket(&[(H, u, 0.5), (V, u, -0.5), (H, d, -0.5), (V, d, 0.5)])?),
        ("|H>|u>", ket(&[(H, u, 1.0)])?),
        ("|V>|d>", ket(&[(V, d, 1.0)])?),
        ("|+>|u>", ket(&[(H, u, s), (V, u, s)])?),
    ];
    for (label, input) in spm_inputs {
        rows.push(truth_row(&spm, label, &input)?);
    }
    Ok(rows)
}
