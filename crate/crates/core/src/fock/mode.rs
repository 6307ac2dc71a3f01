//! Mode labels and the dense mode table every state and circuit is expressed over.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which of the two input copies a photon belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CopyId {
    First,
    Second,
}

impl CopyId {
    pub fn number(self) -> u8 {
        match self {
            CopyId::First => 1,
            CopyId::Second => 2,
        }
    }
}

/// Spatial path of a photon. `Tap` ports are auxiliary vacuum inputs used by
/// device variants that add extra beam splitters on the detector side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spatial {
    Up,
    Down,
    Tap(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];
}

/// A spatial path of one photon: both polarization modes travel along it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Path {
    pub party: u8,
    pub copy: CopyId,
    pub spatial: Spatial,
}

impl Path {
    pub fn new(party: u8, copy: CopyId, spatial: Spatial) -> Self {
        Path { party, copy, spatial }
    }

    pub fn mode(self, polarization: Polarization) -> ModeId {
        ModeId {
            party: self.party,
            copy: self.copy,
            spatial: self.spatial,
            polarization,
        }
    }

    pub fn modes(self) -> [ModeId; 2] {
        [self.mode(Polarization::H), self.mode(Polarization::V)]
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}c{}{}", self.party, self.copy.number(), spatial_label(self.spatial))
    }
}

/// The two paths (`u` and `d`) a photon of a given party and copy may occupy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhotonPaths {
    pub party: u8,
    pub copy: CopyId,
}

impl PhotonPaths {
    pub fn new(party: u8, copy: CopyId) -> Self {
        PhotonPaths { party, copy }
    }

    pub fn up(self) -> Path {
        Path::new(self.party, self.copy, Spatial::Up)
    }

    pub fn down(self) -> Path {
        Path::new(self.party, self.copy, Spatial::Down)
    }

    pub fn tap(self, k: u8) -> Path {
        Path::new(self.party, self.copy, Spatial::Tap(k))
    }

    pub fn modes(self) -> [ModeId; 4] {
        let [uh, uv] = self.up().modes();
        let [dh, dv] = self.down().modes();
        [uh, uv, dh, dv]
    }
}

/// Physical label of one optical mode.
///
/// The derived ordering is party-major, then copy, then spatial path, then
/// polarization; mode tables are always sorted in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeId {
    pub party: u8,
    pub copy: CopyId,
    pub spatial: Spatial,
    pub polarization: Polarization,
}

impl ModeId {
    pub fn new(party: u8, copy: CopyId, spatial: Spatial, polarization: Polarization) -> Self {
        ModeId {
            party,
            copy,
            spatial,
            polarization,
        }
    }

    pub fn path(self) -> Path {
        Path::new(self.party, self.copy, self.spatial)
    }

    /// Dense index over the full two-copy protocol table (8 modes per party).
    /// `None` for tap ports, which live outside the standard label space.
    pub fn flat_index(self) -> Option<usize> {
        let spatial = match self.spatial {
            Spatial::Up => 0,
            Spatial::Down => 1,
            Spatial::Tap(_) => return None,
        };
        let copy = match self.copy {
            CopyId::First => 0,
            CopyId::Second => 1,
        };
        let pol = match self.polarization {
            Polarization::H => 0,
            Polarization::V => 1,
        };
        Some(((self.party as usize * 2 + copy) * 2 + spatial) * 2 + pol)
    }
}

fn spatial_label(s: Spatial) -> String {
    match s {
        Spatial::Up => "u".into(),
        Spatial::Down => "d".into(),
        Spatial::Tap(k) => format!("t{k}"),
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pol = match self.polarization {
            Polarization::H => 'H',
            Polarization::V => 'V',
        };
        write!(f, "{}{}", self.path(), pol)
    }
}

impl FromStr for ModeId {
    type Err = Error;

    /// Parses labels of the form `p0c1uH`, `p3c2dV` or `p1c2t0H`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Serialization(format!("bad mode label {s:?}"));
        let rest = s.strip_prefix('p').ok_or_else(bad)?;
        let c_pos = rest.find('c').ok_or_else(bad)?;
        let party: u8 = rest[..c_pos].parse().map_err(|_| bad())?;
        let rest = &rest[c_pos + 1..];
        let mut chars = rest.chars();
        let copy = match chars.next() {
            Some('1') => CopyId::First,
            Some('2') => CopyId::Second,
            _ => return Err(bad()),
        };
        let rest = chars.as_str();
        let (body, pol) = rest.split_at(rest.len().checked_sub(1).ok_or_else(bad)?);
        let polarization = match pol {
            "H" => Polarization::H,
            "V" => Polarization::V,
            _ => return Err(bad()),
        };
        let spatial = match body {
            "u" => Spatial::Up,
            "d" => Spatial::Down,
            t if t.starts_with('t') => Spatial::Tap(t[1..].parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        Ok(ModeId::new(party, copy, spatial, polarization))
    }
}

impl Serialize for ModeId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ModeId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Dense, ordered set of modes. Position in the table is the mode's index in
/// occupation vectors and circuit matrices.
#[derive(Debug, Clone)]
pub struct ModeTable {
    modes: Vec<ModeId>,
    index: HashMap<ModeId, usize>,
}

impl PartialEq for ModeTable {
    fn eq(&self, other: &Self) -> bool {
        self.modes == other.modes
    }
}

impl Eq for ModeTable {}

impl ModeTable {
    /// Builds a table from arbitrary modes; they are sorted into canonical order.
    pub fn from_modes(mut modes: Vec<ModeId>) -> Result<Self> {
        modes.sort();
        if let Some(w) = modes.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateMode(w[0]));
        }
        let index = modes.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Ok(ModeTable { modes, index })
    }

    /// All `u`/`d` × `H`/`V` modes of the given copies for parties `0..parties`.
    pub fn for_copies(parties: u8, copies: &[CopyId]) -> Self {
        let modes = (0..parties)
            .flat_map(|p| copies.iter().flat_map(move |&c| PhotonPaths::new(p, c).modes()))
            .collect();
        Self::from_modes(modes).expect("generated labels are distinct")
    }

    /// The full two-copy table used by the concentration protocol: 8 modes per party.
    pub fn protocol(parties: u8) -> Self {
        Self::for_copies(parties, &[CopyId::First, CopyId::Second])
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn contains(&self, mode: ModeId) -> bool {
        self.index.contains_key(&mode)
    }

    pub fn index_of(&self, mode: ModeId) -> Result<usize> {
        self.index.get(&mode).copied().ok_or(Error::UnknownMode(mode))
    }

    pub fn labels(&self) -> Vec<String> {
        self.modes.iter().map(ToString::to_string).collect()
    }

    /// Table with `removed` dropped, densely reindexed. The returned mapping
    /// gives, for every old index, its new index (or `None` if removed).
    pub fn without(&self, removed: &[ModeId]) -> Result<(ModeTable, Vec<Option<usize>>)> {
        for &m in removed {
            self.index_of(m)?;
        }
        let kept: Vec<ModeId> = self.modes.iter().copied().filter(|m| !removed.contains(m)).collect();
        let table = ModeTable::from_modes(kept)?;
        let mapping = self.modes.iter().map(|m| table.index.get(m).copied()).collect();
        Ok((table, mapping))
    }

    /// Union of two disjoint tables.
    pub fn merged(&self, other: &ModeTable) -> Result<ModeTable> {
        let mut modes = self.modes.clone();
        modes.extend_from_slice(&other.modes);
        ModeTable::from_modes(modes)
    }

    /// Table extended with extra modes.
    pub fn with_modes(&self, extra: impl IntoIterator<Item = ModeId>) -> Result<ModeTable> {
        let mut modes = self.modes.clone();
        modes.extend(extra);
        ModeTable::from_modes(modes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protocol_table_is_party_major_and_matches_flat_index() {
        let t = ModeTable::protocol(3);
        assert_eq!(t.len(), 24);
        for (i, m) in t.modes().iter().enumerate() {
            assert_eq!(m.flat_index(), Some(i));
        }
        assert_eq!(t.modes()[0].to_string(), "p0c1uH");
        assert_eq!(t.modes()[7].to_string(), "p0c2dV");
        assert_eq!(t.modes()[8].to_string(), "p1c1uH");
    }

    #[test]
    fn labels_round_trip() {
        for label in ["p0c1uH", "p12c2dV", "p1c2t3H"] {
            let m: ModeId = label.parse().unwrap();
            assert_eq!(m.to_string(), label);
        }
        assert!("p0c3uH".parse::<ModeId>().is_err());
        assert!("q0c1uH".parse::<ModeId>().is_err());
        assert!("p0c1xH".parse::<ModeId>().is_err());
    }

    #[test]
    fn removal_reindexes_densely() {
        let t = ModeTable::protocol(2);
        let copy2 = ModeTable::for_copies(2, &[CopyId::Second]);
        let (rest, map) = t.without(copy2.modes()).unwrap();
        assert_eq!(rest, ModeTable::for_copies(2, &[CopyId::First]));
        assert_eq!(map[0], Some(0));
        assert_eq!(map[4], None);
        assert_eq!(map[8], Some(4));
    }

    #[test]
    fn duplicate_and_unknown_modes_are_rejected() {
        let m = ModeId::new(0, CopyId::First, Spatial::Up, Polarization::H);
        assert_eq!(ModeTable::from_modes(vec![m, m]), Err(Error::DuplicateMode(m)));
        let t = ModeTable::for_copies(1, &[CopyId::First]);
        let other = ModeId::new(1, CopyId::First, Spatial::Up, Polarization::H);
        assert_eq!(t.index_of(other), Err(Error::UnknownMode(other)));
    }
}
