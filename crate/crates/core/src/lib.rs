//! Evaluation and post-processing engine for volumetric brain-tumor segmentations.
//!
//! The crate consumes model outputs (region probability maps or label maps) and provides
//! classic and lesion-wise Dice / HD95 metrics, the three post-processing operators
//! (small-region removal, threshold modification, center filling), probability
//! ensembling and a NIfTI-1 reader/writer.

pub mod error;
pub mod fixtures;
pub mod metrics;
pub mod morphology;
pub mod nifti;
pub mod postproc;
pub mod volume;

pub use error::{Error, NiftiError, Result};
pub use morphology::{ComponentMap, ComponentStats, Connectivity};
pub use volume::{
    compose_region, remap_labels, voxel_volume_mm3, BinaryMask, BoundingBox, Dims, LabelClass,
    LabelMap, LabelVolume, ProbVolume, RegionId, Spacing, Volume,
};
pub use fixtures::{generate, FixtureSpec, Primitive, Shape};
pub use metrics::{
    dice, evaluate_case, evaluate_region, hd95, lesionwise, CaseMetrics, LesionKind,
    LesionRecord, LesionwiseParams, LesionwiseResult, RegionMetrics,
};
pub use nifti::{ChannelOrder, ProbSource, WriteOptions};
pub use postproc::{
    center_fill, ensemble_mean, remove_small_regions, run_pipeline, threshold_compose,
    ClassFloors, EnsembleMode, PostprocRules, RegionThresholds,
};
