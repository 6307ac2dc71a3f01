use thiserror::Error;

use crate::fock::ModeId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("states are expressed over different mode tables")]
    ModeTableMismatch,
    #[error("photon number mismatch: {0} vs {1}")]
    PhotonNumberMismatch(usize, usize),
    #[error("mode {0} is not in the mode table")]
    UnknownMode(ModeId),
    #[error("duplicate mode {0} in mode table")]
    DuplicateMode(ModeId),
    #[error("occupation vector has length {found}, expected {expected}")]
    OccupationLength { expected: usize, found: usize },
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("pattern of {pattern} photons exceeds state photon number {photons}")]
    PatternTooLarge { pattern: usize, photons: usize },
    #[error("malformed element: {0}")]
    MalformedElement(String),
    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("permanent size {0} exceeds the supported maximum of {1}")]
    PermanentTooLarge(usize, usize),
    #[error("photon paths collide: {0}")]
    PathCollision(String),
    #[error("device input carries {0} photons, expected {1}")]
    DeviceInput(usize, usize),
    #[error("detection counts have length {found}, layout has {expected} detectors")]
    DetectorCount { expected: usize, found: usize },
    #[error("invalid state parameters: {0}")]
    InvalidParams(String),
    #[error("invalid protocol configuration: {0}")]
    InvalidConfig(String),
    #[error("sign classification requested on a rejected branch")]
    RejectedBranch,
    #[error("sign rule disagrees with collapsed state: {0}")]
    SignMismatch(String),
    #[error("malformed state serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
