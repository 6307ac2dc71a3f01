//! End-to-end hyperentanglement concentration.
//!
//! Two-copy mode: every party holds one photon of each of two identical
//! partially entangled GHZ states. The second copy is flipped in both degrees of
//! freedom, party 0 runs a polarization parity check, party 1 a spatial parity
//! check, and parties `2..N` measure their second photon with an SPM. Accepted
//! branches collapse to the maximally hyperentangled state up to phase flips,
//! which are fixed on party 0's remaining photon.
//!
//! Auxiliary mode replaces the second copy by a two-photon state held by
//! parties 0 and 1; no SPMs are needed.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{weighted::WeightedIndex, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::devices::{
    build_improved_ppc, build_ppc, build_spc_with, build_spm, DetectionEvent, DetectorModel, Device, DeviceKind,
    OutcomeTag, SpcOptions,
};
use crate::error::{Error, Result};
use crate::fock::{CopyId, FockState, ModeTable, PhotonPaths, Polarization, Spatial, StateParams};
use crate::optics::{Element, OpticalCircuit};

/// Upper bound on the party count; the two-copy protocol then holds at most 12 photons.
pub const MAX_PARTIES: u8 = 6;

/// Tolerance used when reading signs off a collapsed state.
const SIGN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum PpcVariant {
    #[default]
    #[serde(rename = "plain")]
    Plain,
    #[serde(rename = "improved")]
    Improved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Variant {
    #[default]
    #[serde(rename = "two-copies")]
    TwoCopies,
    #[serde(rename = "auxiliary")]
    Auxiliary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    #[default]
    Exact,
    Shots { count: u64, seed: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct ProtocolConfig {
    pub parties: u8,
    pub params: StateParams,
    pub detector_model: DetectorModel,
    pub ppc_variant: PpcVariant,
    pub spc_options: SpcOptions,
    pub mode: RunMode,
    pub variant: Variant,
}

impl ProtocolConfig {
    pub fn new(parties: u8, params: StateParams) -> Self {
        ProtocolConfig {
            parties,
            params,
            detector_model: DetectorModel::Pnr,
            ppc_variant: PpcVariant::Plain,
            spc_options: SpcOptions::default(),
            mode: RunMode::Exact,
            variant: Variant::TwoCopies,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.parties < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 parties, got {}", self.parties)));
        }
        if self.parties > MAX_PARTIES {
            return Err(Error::InvalidConfig(format!(
                "at most {MAX_PARTIES} parties are supported, got {}",
                self.parties
            )));
        }
        if let RunMode::Shots { count: 0, .. } = self.mode {
            return Err(Error::InvalidConfig("shot count must be at least 1".into()));
        }
        StateParams::new(self.params.alpha, self.params.beta, self.params.delta, self.params.eta)?;
        Ok(())
    }
}

/// GHZ-type product `(α|H…H⟩ + β|V…V⟩)(δ|u…u⟩ + η|d…d⟩)` on one copy of parties `0..parties`.
fn ghz_product(parties: u8, copy: CopyId, params: &StateParams) -> Result<FockState> {
    let table = Arc::new(ModeTable::for_copies(parties, &[copy]));
    let mut terms = Vec::with_capacity(4);
    for (pol, a) in [(Polarization::H, params.alpha), (Polarization::V, params.beta)] {
        for (spatial, b) in [(Spatial::Up, params.delta), (Spatial::Down, params.eta)] {
            let modes: Vec<_> = (0..parties)
                .map(|p| PhotonPaths::new(p, copy).up().mode(pol))
                .map(|m| crate::fock::ModeId { spatial, ..m })
                .collect();
            let basis = FockState::basis(table.clone(), &modes)?;
            let (occ, _) = basis.terms().next().expect("basis state has one term");
            terms.push((occ.clone(), a * b));
        }
    }
    FockState::from_terms(table, parties as usize, terms)
}

/// The partially entangled N-photon input state on the first copy.
pub fn build_input(parties: u8, params: &StateParams) -> Result<FockState> {
    if parties < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 parties, got {parties}")));
    }
    ghz_product(parties, CopyId::First, params)
}

/// The maximally hyperentangled target state on the first copy.
pub fn target_state(parties: u8) -> Result<FockState> {
    build_input(parties, &StateParams::balanced())
}

/// Flips polarization (45° half-wave plates) and renames `u ↔ d` for every
/// second-copy photon present in the state's table.
pub fn flip_second_copy(state: &FockState) -> Result<FockState> {
    let table = state.shared_table().clone();
    let parties: Vec<u8> = {
        let mut v: Vec<u8> = table
            .modes()
            .iter()
            .filter(|m| m.copy == CopyId::Second && matches!(m.spatial, Spatial::Up | Spatial::Down))
            .map(|m| m.party)
            .collect();
        v.dedup();
        v
    };
    if parties.is_empty() {
        return Err(Error::InvalidConfig("state has no second-copy modes to flip".into()));
    }
    let mut elements = Vec::new();
    for p in parties {
        let paths = PhotonPaths::new(p, CopyId::Second);
        elements.push(Element::HalfWavePlate45 { path: paths.up() });
        elements.push(Element::HalfWavePlate45 { path: paths.down() });
        elements.push(Element::swap_paths(paths.up(), paths.down()));
    }
    OpticalCircuit::from_elements(table, elements)?.apply(state)
}

/// Joint initial state of the chosen variant, including any vacuum tap ports.
pub fn build_joint_state(config: &ProtocolConfig) -> Result<FockState> {
    let first = build_input(config.parties, &config.params)?;
    let second_parties = match config.variant {
        Variant::TwoCopies => config.parties,
        Variant::Auxiliary => 2,
    };
    let second = flip_second_copy(&ghz_product(second_parties, CopyId::Second, &config.params)?)?;
    let joint = first.tensor(&second)?;
    if config.spc_options.extra_splitters {
        let bob = PhotonPaths::new(1, CopyId::Second);
        let table = joint.table().with_modes([bob.tap(0).modes(), bob.tap(1).modes()].concat())?;
        joint.embed(Arc::new(table))
    } else {
        Ok(joint)
    }
}

/// A device firing recorded for one branch.
#[derive(Debug, Clone, Serialize)]
pub struct DeviceRecord {
    pub device: DeviceKind,
    pub party: u8,
    pub event: DetectionEvent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Corrections {
    /// Polarization phase flip `|H⟩⟨H| − |V⟩⟨V|` on party 0.
    pub polarization: bool,
    /// Spatial phase flip `|u⟩⟨u| − |d⟩⟨d|` on party 0.
    pub spatial: bool,
}

/// Sign bits of an accepted branch.
#[derive(Debug, Clone, Serialize)]
pub struct SignRecord {
    /// Polarization sign after the two parity checks (parity of `|−⟩` results of
    /// their detector photons). `None` when a detector reads `H`/`V`.
    pub p: Option<u8>,
    /// Spatial sign after the two parity checks (parity of `−′` results).
    pub q: u8,
    /// Polarization sign after all measurements.
    #[serde(rename = "P")]
    pub big_p: Option<u8>,
    /// Spatial sign after all measurements.
    #[serde(rename = "Q")]
    pub big_q: u8,
    /// `(p, q)` read off the intermediate state, when it has GHZ⊗GHZ form.
    pub intermediate_state_signs: Option<(u8, u8)>,
    /// `(P, Q)` read off the final state, when it has GHZ⊗GHZ form.
    pub final_state_signs: Option<(u8, u8)>,
    pub corrections: Corrections,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProtocolOutcome {
    pub branch_id: usize,
    pub detections: Vec<DeviceRecord>,
    pub accepted: bool,
    pub false_accept: bool,
    pub probability: f64,
    pub signs: Option<SignRecord>,
    /// Uncorrected state left with the parties, for accepted branches.
    pub collapsed: Option<FockState>,
    pub fidelity_after_correction: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactSummary {
    pub success_probability: f64,
    pub formula_probability: f64,
    pub false_accept_probability: f64,
    pub reject_probability: f64,
    pub total_probability: f64,
    pub accept_branches: usize,
    pub reject_branches: usize,
    pub min_accept_fidelity: Option<f64>,
    /// Accept-probability-weighted mean fidelity after correction.
    pub mean_accept_fidelity: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShotSummary {
    pub shots: u64,
    pub seed: u64,
    pub accepted: u64,
    pub empirical_success_rate: f64,
    pub exact_success_probability: f64,
    /// Binomial standard deviation of the empirical rate at the exact probability.
    pub standard_error: f64,
    /// Shot counts per branch id; branches never drawn are omitted.
    pub branch_counts: BTreeMap<usize, u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ProtocolConfig,
    pub success_probability: f64,
    pub summary: ExactSummary,
    /// How outcome labels map onto the sign rules.
    pub sign_rule_mapping: &'static str,
    pub branches: Vec<ProtocolOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<ShotSummary>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

const SIGN_RULE_MAPPING: &str = "p/P: parity of '-' polarization outcomes; q/Q: parity of \
     spatial-diagonal outcomes on the beam-splitter 'down' output (-'), which is how a 'd' \
     result is read after the diagonal-basis beam splitter";

fn parity(bits: impl Iterator<Item = bool>) -> u8 {
    (bits.filter(|&b| b).count() % 2) as u8
}

/// Polarization and spatial sign bits from a list of detector tags.
fn rule_signs(tags: &[OutcomeTag]) -> (Option<u8>, u8) {
    let pol = tags
        .iter()
        .map(|t| t.polarization.diagonal())
        .collect::<Option<Vec<_>>>()
        .map(|signs| parity(signs.into_iter().map(|s| s.is_minus())));
    (pol, parity(tags.iter().map(|t| t.spatial.is_minus())))
}

/// Reads `(P, Q)` off a state of the form
/// `(|H…⟩ + (−1)^P |V…⟩)(|u…⟩ + (−1)^Q |d…⟩)/2` up to a global phase.
/// `None` if the state does not have that form.
pub fn state_signs(state: &FockState) -> Option<(u8, u8)> {
    if state.len() != 4 {
        return None;
    }
    let modes = state.table().modes();
    let mut classes: BTreeMap<(Polarization, Spatial), Complex64> = BTreeMap::new();
    for (occ, &amp) in state.terms() {
        let mut pol = None;
        let mut spatial = None;
        for (i, &n) in occ.counts().iter().enumerate() {
            if n == 0 {
                continue;
            }
            let m = modes[i];
            if *pol.get_or_insert(m.polarization) != m.polarization {
                return None;
            }
            if *spatial.get_or_insert(m.spatial) != m.spatial {
                return None;
            }
        }
        classes.insert((pol?, spatial?), amp);
    }
    let get = |p, s| classes.get(&(p, s)).copied();
    let reference = get(Polarization::H, Spatial::Up)?;
    let sign_of = |z: Complex64| -> Option<u8> {
        let r = z / reference;
        if (r - 1.0).norm() <= SIGN_TOLERANCE {
            Some(0)
        } else if (r + 1.0).norm() <= SIGN_TOLERANCE {
            Some(1)
        } else {
            None
        }
    };
    let big_p = sign_of(get(Polarization::V, Spatial::Up)?)?;
    let big_q = sign_of(get(Polarization::H, Spatial::Down)?)?;
    let both = sign_of(get(Polarization::V, Spatial::Down)?)?;
    (both == (big_p + big_q) % 2).then_some((big_p, big_q))
}

/// Derives `p, q, P, Q` from the detector outcomes and cross-checks them against
/// the collapsed states. `events` lists the parity-check events first, then the
/// SPM events.
pub fn classify_signs(events: &[DetectionEvent], intermediate: &FockState, collapsed: &FockState) -> Result<SignRecord> {
    if events.iter().any(|e| !e.is_accept()) {
        return Err(Error::RejectedBranch);
    }
    let tags: Vec<OutcomeTag> = events.iter().map(|e| e.tag.ok_or(Error::RejectedBranch)).collect::<Result<_>>()?;
    let (p, q) = rule_signs(&tags[..tags.len().min(2)]);
    let (big_p, big_q) = rule_signs(&tags);
    let intermediate_state_signs = state_signs(intermediate);
    let final_state_signs = state_signs(collapsed);
    let check = |what: &str, rule: (Option<u8>, u8), seen: Option<(u8, u8)>| -> Result<()> {
        if let (Some(pol), Some((sp, ss))) = (rule.0, seen) {
            if pol != sp || rule.1 != ss {
                return Err(Error::SignMismatch(format!(
                    "{what}: outcome parities ({pol}, {}) but state signs ({sp}, {ss})",
                    rule.1
                )));
            }
        }
        Ok(())
    };
    check("after parity checks", (p, q), intermediate_state_signs)?;
    check("after all measurements", (big_p, big_q), final_state_signs)?;
    Ok(SignRecord {
        p,
        q,
        big_p,
        big_q,
        intermediate_state_signs,
        final_state_signs,
        corrections: Corrections {
            polarization: big_p == Some(1),
            spatial: big_q == 1,
        },
    })
}

/// Applies the phase-flip corrections to party 0's first-copy photon.
pub fn apply_corrections(state: &FockState, corrections: Corrections) -> Result<FockState> {
    let alice = PhotonPaths::new(0, CopyId::First);
    let mut elements = Vec::new();
    if corrections.polarization {
        for path in [alice.up(), alice.down()] {
            elements.push(Element::Phase { mode: path.mode(Polarization::V), phase: std::f64::consts::PI });
        }
    }
    if corrections.spatial {
        for m in alice.down().modes() {
            elements.push(Element::Phase { mode: m, phase: std::f64::consts::PI });
        }
    }
    OpticalCircuit::from_elements(state.shared_table().clone(), elements)?.apply(state)
}

/// A partially expanded branch: everything measured so far and what is left.
#[derive(Debug, Clone)]
struct Partial {
    records: Vec<DeviceRecord>,
    probability: f64,
    state: FockState,
}

fn expand(partial: &Partial, device: &Device, party: u8, model: DetectorModel) -> Result<Vec<Partial>> {
    Ok(device
        .measure(&partial.state, model)?
        .into_iter()
        .map(|o| {
            let mut records = partial.records.clone();
            records.push(DeviceRecord {
                device: device.kind,
                party,
                event: o.event,
            });
            Partial {
                records,
                probability: partial.probability * o.probability,
                state: o.remainder,
            }
        })
        .collect())
}

fn ppc_for(config: &ProtocolConfig, table: Arc<ModeTable>) -> Result<Device> {
    let x1 = PhotonPaths::new(0, CopyId::First);
    let x2 = PhotonPaths::new(0, CopyId::Second);
    match config.ppc_variant {
        PpcVariant::Plain => build_ppc(table, x1, x2),
        PpcVariant::Improved => build_improved_ppc(table, x1, x2),
    }
}

/// Finishes an accepted parity-check branch: SPMs, sign classification,
/// corrections and fidelity. Returns the leaf branches without ids.
fn finish_accepted(config: &ProtocolConfig, after_checks: Partial, target: &FockState) -> Result<Vec<ProtocolOutcome>> {
    let intermediate = after_checks.state.clone();
    let spm_parties: Vec<u8> = match config.variant {
        Variant::TwoCopies => (2..config.parties).collect(),
        Variant::Auxiliary => Vec::new(),
    };
    let mut frontier = vec![after_checks];
    for party in spm_parties {
        let mut next = Vec::new();
        for partial in &frontier {
            let spm = build_spm(partial.state.shared_table().clone(), PhotonPaths::new(party, CopyId::Second))?;
            next.extend(expand(partial, &spm, party, config.detector_model)?);
        }
        frontier = next;
    }
    frontier
        .into_iter()
        .map(|leaf| {
            let events: Vec<DetectionEvent> = leaf.records.iter().map(|r| r.event.clone()).collect();
            let false_accept = events.iter().any(DetectionEvent::is_false_accept);
            let signs = classify_signs(&events, &intermediate, &leaf.state)?;
            let corrected = apply_corrections(&leaf.state, signs.corrections)?;
            let fidelity = FockState::fidelity(&corrected, target)?;
            Ok(ProtocolOutcome {
                branch_id: 0,
                detections: leaf.records,
                accepted: true,
                false_accept,
                probability: leaf.probability,
                signs: Some(signs),
                collapsed: Some(leaf.state),
                fidelity_after_correction: Some(fidelity),
            })
        })
        .collect()
}

fn rejected(partial: Partial) -> ProtocolOutcome {
    ProtocolOutcome {
        branch_id: 0,
        detections: partial.records,
        accepted: false,
        false_accept: false,
        probability: partial.probability,
        signs: None,
        collapsed: None,
        fidelity_after_correction: None,
    }
}

/// Every branch of the protocol with its exact probability, in lexicographic
/// detector-pattern order (PPC, then SPC, then SPMs by party).
pub fn enumerate_branches(config: &ProtocolConfig) -> Result<Vec<ProtocolOutcome>> {
    config.validate()?;
    let joint = build_joint_state(config)?;
    let target = target_state(config.parties)?;
    let model = config.detector_model;
    let root = Partial {
        records: Vec::new(),
        probability: 1.0,
        state: joint,
    };

    let ppc = ppc_for(config, root.state.shared_table().clone())?;
    let mut stage: Vec<Result<Vec<ProtocolOutcome>>> = Vec::new();
    let mut accepted_checks = Vec::new();
    for after_ppc in expand(&root, &ppc, 0, model)? {
        if !after_ppc.records[0].event.is_accept() {
            stage.push(Ok(vec![rejected(after_ppc)]));
            continue;
        }
        let spc = build_spc_with(
            after_ppc.state.shared_table().clone(),
            PhotonPaths::new(1, CopyId::First),
            PhotonPaths::new(1, CopyId::Second),
            config.spc_options,
        )?;
        for after_spc in expand(&after_ppc, &spc, 1, model)? {
            if after_spc.records[1].event.is_accept() {
                accepted_checks.push((stage.len(), after_spc));
                stage.push(Ok(Vec::new()));
            } else {
                stage.push(Ok(vec![rejected(after_spc)]));
            }
        }
    }
    // Accepted branches are independent; finish them in parallel and slot the
    // results back into enumeration order.
    let finished: Vec<(usize, Result<Vec<ProtocolOutcome>>)> = accepted_checks
        .into_par_iter()
        .map(|(slot, partial)| (slot, finish_accepted(config, partial, &target)))
        .collect();
    for (slot, result) in finished {
        stage[slot] = result;
    }
    let mut branches = Vec::new();
    for group in stage {
        branches.extend(group?);
    }
    for (i, b) in branches.iter_mut().enumerate() {
        b.branch_id = i;
    }
    log::debug!("enumerated {} branches for N={}", branches.len(), config.parties);
    Ok(branches)
}

fn summarize(config: &ProtocolConfig, branches: &[ProtocolOutcome]) -> ExactSummary {
    let accepted: Vec<&ProtocolOutcome> = branches.iter().filter(|b| b.accepted).collect();
    let success_probability = accepted.iter().map(|b| b.probability).sum::<f64>() + 0.0;
    let reject_probability = branches.iter().filter(|b| !b.accepted).map(|b| b.probability).sum::<f64>() + 0.0;
    let fidelities: Vec<f64> = accepted.iter().filter_map(|b| b.fidelity_after_correction).collect();
    let mean = (success_probability > 0.0).then(|| {
        accepted
            .iter()
            .map(|b| b.probability * b.fidelity_after_correction.unwrap_or(0.0))
            .sum::<f64>()
            / success_probability
    });
    ExactSummary {
        success_probability,
        formula_probability: config.params.success_formula(),
        false_accept_probability: accepted.iter().filter(|b| b.false_accept).map(|b| b.probability).sum::<f64>() + 0.0,
        reject_probability,
        total_probability: success_probability + reject_probability,
        accept_branches: accepted.len(),
        reject_branches: branches.len() - accepted.len(),
        min_accept_fidelity: fidelities.iter().copied().reduce(f64::min),
        mean_accept_fidelity: mean,
    }
}

/// Exact branch enumeration for either variant.
pub fn run_exact(config: &ProtocolConfig) -> Result<RunReport> {
    let branches = enumerate_branches(config)?;
    let summary = summarize(config, &branches);
    Ok(RunReport {
        config: config.clone(),
        success_probability: summary.success_probability,
        summary,
        sign_rule_mapping: SIGN_RULE_MAPPING,
        branches,
        shots: None,
    })
}

/// Samples detector patterns from the exact branch distribution.
pub fn run_shots(config: &ProtocolConfig) -> Result<RunReport> {
    let RunMode::Shots { count, seed } = config.mode else {
        return Err(Error::InvalidConfig("shot sampling needs a shot count and seed".into()));
    };
    let mut report = run_exact(config)?;
    let weights: Vec<f64> = report.branches.iter().map(|b| b.probability).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut branch_counts = BTreeMap::new();
    let mut accepted = 0u64;
    for _ in 0..count {
        let i = dist.sample(&mut rng);
        *branch_counts.entry(i).or_insert(0u64) += 1;
        if report.branches[i].accepted {
            accepted += 1;
        }
    }
    let p = report.summary.success_probability;
    report.shots = Some(ShotSummary {
        shots: count,
        seed,
        accepted,
        empirical_success_rate: accepted as f64 / count as f64,
        exact_success_probability: p,
        standard_error: (p * (1.0 - p) / count as f64).sqrt(),
        branch_counts,
    });
    Ok(report)
}

/// The auxiliary-photon variant.
pub fn run_auxiliary(config: &ProtocolConfig) -> Result<RunReport> {
    if config.variant != Variant::Auxiliary {
        return Err(Error::InvalidConfig("run_auxiliary needs the auxiliary variant".into()));
    }
    match config.mode {
        RunMode::Exact => run_exact(config),
        RunMode::Shots { .. } => run_shots(config),
    }
}

/// Runs whatever the configuration asks for.
pub fn run(config: &ProtocolConfig) -> Result<RunReport> {
    match config.mode {
        RunMode::Exact => run_exact(config),
        RunMode::Shots { .. } => run_shots(config),
    }
}
