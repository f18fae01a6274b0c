//! Classic and lesion-wise Dice / HD95.
//!
//! Lesion-wise scoring:
//! 1. the ground truth is dilated and its components define lesion identities
//!    (each lesion is the undilated GT inside one dilated component, the "zone");
//! 2. predicted components are matched to every zone they touch;
//! 3. each GT lesion is scored against the union of its matched components,
//!    unmatched lesions (FN) and unmatched components (FP) score 0 Dice and the
//!    HD95 penalty;
//! 4. scores are averaged over `#lesions + #FP`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morphology::{self, Connectivity};
use crate::volume::{
    compose_region, physical_diagonal_mm, BinaryMask, BoundingBox, Dims, LabelVolume, RegionId,
    Spacing, Volume,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LesionwiseParams {
    /// Radius of the GT dilation; 1 mm gives the 3×3×3 kernel at 1 mm spacing.
    pub dilation_radius_mm: f64,
    pub connectivity: Connectivity,
    /// HD95 assigned to FN/FP lesions and to one-sided empty comparisons.
    /// `None` uses the physical diagonal of the volume.
    pub penalty_mm: Option<f64>,
    pub percentile: f64,
}

impl Default for LesionwiseParams {
    fn default() -> Self {
        Self {
            dilation_radius_mm: 1.0,
            connectivity: Connectivity::Vertex26,
            penalty_mm: None,
            percentile: 95.0,
        }
    }
}

impl LesionwiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dilation_radius_mm.is_finite() && self.dilation_radius_mm >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dilation radius must be >= 0, got {}",
                self.dilation_radius_mm
            )));
        }
        if !(self.percentile > 0.0 && self.percentile <= 100.0) {
            return Err(Error::InvalidParameter(format!(
                "percentile must lie in (0, 100], got {}",
                self.percentile
            )));
        }
        if let Some(p) = self.penalty_mm {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::InvalidParameter(format!("penalty must be > 0, got {p}")));
            }
        }
        Ok(())
    }

    pub fn penalty_for(&self, dims: Dims, spacing: Spacing) -> f64 {
        self.penalty_mm
            .unwrap_or_else(|| physical_diagonal_mm(dims, spacing))
    }
}

/// Dice overlap in percent: `100 · 2|A∩B| / (|A| + |B|)`; two empty masks score 100.
pub fn dice(pred: &BinaryMask, gt: &BinaryMask) -> Result<f64> {
    pred.check_geometry(gt)?;
    let (mut a, mut b, mut both) = (0usize, 0usize, 0usize);
    for (&p, &g) in pred.data().iter().zip(gt.data()) {
        a += p as usize;
        b += g as usize;
        both += (p && g) as usize;
    }
    Ok(dice_from_counts(a, b, both))
}

fn dice_from_counts(a: usize, b: usize, both: usize) -> f64 {
    if a + b == 0 {
        100.0
    } else {
        200.0 * both as f64 / (a + b) as f64
    }
}

/// Linear-interpolation percentile of an ascending slice (`p` in (0, 100]).
pub fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let rank = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        return sorted[lo];
    }
    sorted[lo] + (sorted[hi] - sorted[lo]) * (rank - lo as f64)
}

/// Pooled directed surface distances between two masks, both non-empty.
/// The grid must already contain both masks fully; anything outside it is background.
fn pooled_surface_distances(a: &BinaryMask, b: &BinaryMask) -> Vec<f64> {
    let surf_a = morphology::surface_mask(a);
    let surf_b = morphology::surface_mask(b);
    let to_b = morphology::squared_distance_transform(&surf_b).expect("b non-empty");
    let to_a = morphology::squared_distance_transform(&surf_a).expect("a non-empty");
    let mut out = Vec::new();
    for (i, &s) in surf_a.data().iter().enumerate() {
        if s {
            out.push(to_b.data()[i].sqrt());
        }
    }
    for (i, &s) in surf_b.data().iter().enumerate() {
        if s {
            out.push(to_a.data()[i].sqrt());
        }
    }
    out
}

fn hd_of_cropped(a: &BinaryMask, b: &BinaryMask, percentile: f64) -> f64 {
    let mut d = pooled_surface_distances(a, b);
    d.sort_by(f64::total_cmp);
    percentile_sorted(&d, percentile)
}

/// Percentile Hausdorff distance (mm) over the pooled surface-to-surface distances.
///
/// Both empty gives 0; exactly one empty gives `penalty`.
pub fn hd95(pred: &BinaryMask, gt: &BinaryMask, percentile: f64, penalty: f64) -> Result<f64> {
    pred.check_geometry(gt)?;
    let (bp, bg) = (pred.bounding_box(), gt.bounding_box());
    let bbox = match (bp, bg) {
        (None, None) => return Ok(0.0),
        (Some(_), None) | (None, Some(_)) => return Ok(penalty),
        (Some(p), Some(g)) => p.union(&g),
    };
    // Distances between the two sets never depend on voxels outside their joint box.
    let a = morphology::crop(pred, &bbox);
    let b = morphology::crop(gt, &bbox);
    Ok(hd_of_cropped(&a, &b, percentile))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum LesionKind {
    Tp,
    Fn,
    Fp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LesionRecord {
    pub kind: LesionKind,
    /// Dilated-zone id of the GT lesion; `None` for false positives.
    pub gt_lesion_id: Option<u32>,
    pub gt_voxels: usize,
    pub matched_pred_component_ids: Vec<u32>,
    pub pred_voxels: usize,
    pub dice_percent: f64,
    pub hd95_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LesionwiseResult {
    pub records: Vec<LesionRecord>,
    pub lesionwise_dice: f64,
    pub lesionwise_hd95: f64,
    pub n_gt_lesions: usize,
    pub n_tp: usize,
    pub n_fn: usize,
    pub n_fp: usize,
}

pub fn lesionwise(pred: &BinaryMask, gt: &BinaryMask, params: &LesionwiseParams) -> Result<LesionwiseResult> {
    pred.check_geometry(gt)?;
    params.validate()?;
    let penalty = params.penalty_for(gt.dims(), gt.spacing());

    let zones = morphology::connected_components(
        &morphology::dilate(gt, params.dilation_radius_mm),
        params.connectivity,
    )?;
    let comps = morphology::connected_components(pred, params.connectivity)?;

    let mut gt_counts = vec![0usize; zones.len() + 1];
    let mut pairs: BTreeSet<(u32, u32)> = BTreeSet::new();
    for ((&z, &c), &g) in zones.ids().iter().zip(comps.ids()).zip(gt.data()) {
        if g {
            gt_counts[z as usize] += 1;
        }
        if z != 0 && c != 0 {
            pairs.insert((z, c));
        }
    }

    let mut matched_by_zone: Vec<Vec<u32>> = vec![Vec::new(); zones.len() + 1];
    let mut comp_matched = vec![false; comps.len() + 1];
    for &(z, c) in &pairs {
        matched_by_zone[z as usize].push(c);
        comp_matched[c as usize] = true;
    }

    let mut records = Vec::new();
    for zone in 1..=zones.len() as u32 {
        let matched = &matched_by_zone[zone as usize];
        let gt_voxels = gt_counts[zone as usize];
        if matched.is_empty() {
            records.push(LesionRecord {
                kind: LesionKind::Fn,
                gt_lesion_id: Some(zone),
                gt_voxels,
                matched_pred_component_ids: Vec::new(),
                pred_voxels: 0,
                dice_percent: 0.0,
                hd95_mm: penalty,
            });
            continue;
        }
        let mut bbox: BoundingBox = zones.stats(zone).bounding_box;
        let mut pred_voxels = 0;
        for &c in matched {
            bbox = bbox.union(&comps.stats(c).bounding_box);
            pred_voxels += comps.stats(c).voxel_count;
        }
        let (a, b) = lesion_crops(pred, gt, &zones, &comps, zone, matched, &bbox);
        let both = a.data().iter().zip(b.data()).filter(|(&x, &y)| x && y).count();
        records.push(LesionRecord {
            kind: LesionKind::Tp,
            gt_lesion_id: Some(zone),
            gt_voxels,
            matched_pred_component_ids: matched.clone(),
            pred_voxels,
            dice_percent: dice_from_counts(pred_voxels, gt_voxels, both),
            hd95_mm: hd_of_cropped(&a, &b, params.percentile),
        });
    }
    for c in 1..=comps.len() as u32 {
        if !comp_matched[c as usize] {
            records.push(LesionRecord {
                kind: LesionKind::Fp,
                gt_lesion_id: None,
                gt_voxels: 0,
                matched_pred_component_ids: vec![c],
                pred_voxels: comps.stats(c).voxel_count,
                dice_percent: 0.0,
                hd95_mm: penalty,
            });
        }
    }

    let count = |k: LesionKind| records.iter().filter(|r| r.kind == k).count();
    let (n_tp, n_fn, n_fp) = (count(LesionKind::Tp), count(LesionKind::Fn), count(LesionKind::Fp));
    let (lesionwise_dice, lesionwise_hd95) = if records.is_empty() {
        (100.0, 0.0)
    } else {
        let n = records.len() as f64;
        (
            records.iter().map(|r| r.dice_percent).sum::<f64>() / n,
            records.iter().map(|r| r.hd95_mm).sum::<f64>() / n,
        )
    };
    Ok(LesionwiseResult {
        records,
        lesionwise_dice,
        lesionwise_hd95,
        n_gt_lesions: zones.len(),
        n_tp,
        n_fn,
        n_fp,
    })
}

/// Cropped union of matched components (`a`) and the GT lesion of `zone` (`b`).
fn lesion_crops(
    pred: &BinaryMask,
    gt: &BinaryMask,
    zones: &morphology::ComponentMap,
    comps: &morphology::ComponentMap,
    zone: u32,
    matched: &[u32],
    bbox: &BoundingBox,
) -> (BinaryMask, BinaryMask) {
    let dims = pred.dims();
    let [ex, ey, ez] = bbox.extent();
    let crop_dims = Dims::new(ex, ey, ez).expect("non-empty box");
    let mut a = Vec::with_capacity(crop_dims.len());
    let mut b = Vec::with_capacity(crop_dims.len());
    for z in bbox.min[2]..=bbox.max[2] {
        for y in bbox.min[1]..=bbox.max[1] {
            let row = dims.index(bbox.min[0], y, z);
            for i in row..row + ex {
                let c = comps.ids()[i];
                a.push(c != 0 && matched.binary_search(&c).is_ok());
                b.push(gt.data()[i] && zones.ids()[i] == zone);
            }
        }
    }
    (
        Volume::new(crop_dims, pred.spacing(), a).expect("extent"),
        Volume::new(crop_dims, pred.spacing(), b).expect("extent"),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMetrics {
    pub region: RegionId,
    pub dice: f64,
    pub hd95: f64,
    pub lesionwise_dice: f64,
    pub lesionwise_hd95: f64,
    pub n_gt_lesions: usize,
    pub n_tp: usize,
    pub n_fn: usize,
    pub n_fp: usize,
    pub records: Vec<LesionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseMetrics {
    pub case_id: String,
    /// One entry per region in WT, TC, ET order.
    pub regions: Vec<RegionMetrics>,
}

impl CaseMetrics {
    pub fn region(&self, region: RegionId) -> &RegionMetrics {
        self.regions
            .iter()
            .find(|r| r.region == region)
            .expect("all regions evaluated")
    }
}

pub fn evaluate_region(pred: &BinaryMask, gt: &BinaryMask, region: RegionId, params: &LesionwiseParams) -> Result<RegionMetrics> {
    let penalty = params.penalty_for(gt.dims(), gt.spacing());
    let lw = lesionwise(pred, gt, params)?;
    Ok(RegionMetrics {
        region,
        dice: dice(pred, gt)?,
        hd95: hd95(pred, gt, params.percentile, penalty)?,
        lesionwise_dice: lw.lesionwise_dice,
        lesionwise_hd95: lw.lesionwise_hd95,
        n_gt_lesions: lw.n_gt_lesions,
        n_tp: lw.n_tp,
        n_fn: lw.n_fn,
        n_fp: lw.n_fp,
        records: lw.records,
    })
}

/// Classic and lesion-wise Dice / HD95 for WT, TC and ET.
pub fn evaluate_case(case_id: &str, pred: &LabelVolume, gt: &LabelVolume, params: &LesionwiseParams) -> Result<CaseMetrics> {
    pred.as_volume().check_geometry(gt.as_volume())?;
    params.validate()?;
    let regions = RegionId::ALL
        .iter()
        .map(|&r| evaluate_region(&compose_region(pred, r), &compose_region(gt, r), r, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(CaseMetrics {
        case_id: case_id.to_string(),
        regions,
    })
}
