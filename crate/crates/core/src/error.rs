use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions {0:?}: every axis needs at least one voxel")]
    InvalidDims([usize; 3]),

    #[error("invalid spacing {0:?}: every axis must be positive and finite")]
    InvalidSpacing([f64; 3]),

    #[error("voxel buffer holds {actual} values, dimensions require {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("label code {0} is not canonical (expected 0..=3); remap the volume first")]
    NonCanonicalLabel(u8),

    #[error("label code {0} has no entry in the remap table")]
    UnmappedCode(u8),

    #[error("probability {value} at voxel {index} (channel {channel}) lies outside [0, 1]")]
    ProbabilityOutOfRange {
        channel: usize,
        index: usize,
        value: f64,
    },

    #[error("volume geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("connected component count exceeds the 32-bit label space")]
    ComponentOverflow,

    #[error("distance transform requires at least one foreground voxel")]
    EmptyMask,

    #[error("ensemble needs at least one input volume")]
    EmptyEnsemble,

    #[error("fixture primitive {index} extends outside the volume")]
    PrimitiveOutOfBounds { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Nifti(#[from] NiftiError),
}

/// Failures specific to decoding or encoding NIfTI-1 files.
#[derive(Debug, Error)]
pub enum NiftiError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bad magic {0:?}: expected \"n+1\\0\" or \"ni1\\0\"")]
    BadMagic([u8; 4]),

    #[error("NIfTI-2 and other non-348-byte headers are not supported (sizeof_hdr = {0})")]
    UnsupportedVersion(i32),

    #[error("unsupported NIfTI datatype code {0}")]
    UnsupportedDatatype(i16),

    #[error("file truncated: needed {expected} bytes, found {actual}")]
    TruncatedFile { expected: usize, actual: usize },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("expected 3 probability channels, found {0}")]
    ChannelCountMismatch(usize),

    #[error("voxel value {value} at index {index} is not a valid label code")]
    NonIntegralLabel { index: usize, value: f64 },
}
