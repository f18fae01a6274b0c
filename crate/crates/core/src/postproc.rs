//! Post-processing of region probabilities into label maps: threshold
//! modification, small-region removal, center filling and fold ensembling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morphology::{self, Connectivity};
use crate::volume::{LabelClass, LabelVolume, ProbVolume, RegionId};

/// Minimum component volume per tumor class, in mm³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassFloors {
    pub ncr: f64,
    pub ed: f64,
    pub et: f64,
}

impl ClassFloors {
    pub fn get(&self, class: LabelClass) -> f64 {
        match class {
            LabelClass::Ncr => self.ncr,
            LabelClass::Ed => self.ed,
            LabelClass::Et => self.et,
            LabelClass::Background => 0.0,
        }
    }
}

impl Default for ClassFloors {
    fn default() -> Self {
        Self {
            ncr: 75.0,
            ed: 500.0,
            et: 75.0,
        }
    }
}

impl std::str::FromStr for ClassFloors {
    type Err = Error;

    /// Parses `ncr=75,et=75,ed=500`; omitted classes keep their defaults.
    fn from_str(s: &str) -> Result<Self> {
        let mut out = Self::default();
        for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || Error::InvalidParameter(format!("bad volume floor {pair:?}"));
            let (k, v) = pair.split_once('=').ok_or_else(bad)?;
            let v: f64 = v.trim().parse().map_err(|_| bad())?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(bad());
            }
            match k.trim().to_ascii_lowercase().as_str() {
                "ncr" => out.ncr = v,
                "ed" => out.ed = v,
                "et" => out.et = v,
                _ => return Err(bad()),
            }
        }
        Ok(out)
    }
}

/// Hard-label thresholds per region probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionThresholds {
    pub wt: f64,
    pub tc: f64,
    pub et: f64,
}

impl RegionThresholds {
    pub fn uniform(t: f64) -> Self {
        Self { wt: t, tc: t, et: t }
    }

    pub fn get(&self, region: RegionId) -> f64 {
        match region {
            RegionId::Wt => self.wt,
            RegionId::Tc => self.tc,
            RegionId::Et => self.et,
        }
    }
}

impl Default for RegionThresholds {
    fn default() -> Self {
        Self {
            wt: 0.5,
            tc: 0.6,
            et: 0.6,
        }
    }
}

/// How multiple folds are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleMode {
    /// Average probabilities, then post-process once.
    #[default]
    ProbabilityMean,
    /// Post-process each fold, then take a per-region vote (ties count as present).
    LabelVote,
}

impl std::str::FromStr for EnsembleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "mean" | "probability_mean" => Ok(Self::ProbabilityMean),
            "vote" | "label_vote" => Ok(Self::LabelVote),
            other => Err(Error::InvalidParameter(format!("unknown ensemble mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PostprocRules {
    pub min_volume_mm3: ClassFloors,
    /// Components are removed only when their mean confidence is below this value.
    pub confidence_ceiling: f64,
    pub thresholds: RegionThresholds,
    pub region_removal: bool,
    pub center_fill: bool,
    pub connectivity: Connectivity,
    pub ensemble: EnsembleMode,
}

impl Default for PostprocRules {
    /// The tuned settings: NCR/ET floors 75 mm³, ED 500 mm³, θ = 0.9,
    /// thresholds WT 0.5 / TC 0.6 / ET 0.6, center filling on.
    fn default() -> Self {
        Self {
            min_volume_mm3: ClassFloors::default(),
            confidence_ceiling: 0.9,
            thresholds: RegionThresholds::default(),
            region_removal: true,
            center_fill: true,
            connectivity: Connectivity::Vertex26,
            ensemble: EnsembleMode::ProbabilityMean,
        }
    }
}

impl PostprocRules {
    /// Plain 0.5 thresholding with every other stage disabled.
    pub fn baseline() -> Self {
        Self {
            thresholds: RegionThresholds::uniform(0.5),
            region_removal: false,
            center_fill: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.min_volume_mm3;
        for v in [f.ncr, f.ed, f.et] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!("volume floor must be >= 0, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.confidence_ceiling) {
            return Err(Error::InvalidParameter(format!(
                "confidence ceiling must lie in [0, 1], got {}",
                self.confidence_ceiling
            )));
        }
        for r in RegionId::ALL {
            let t = self.thresholds.get(r);
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidParameter(format!("{r} threshold must lie in (0, 1), got {t}")));
            }
        }
        Ok(())
    }
}

#[inline]
fn cascade(p: [f32; 3], t: &RegionThresholds) -> LabelClass {
    let [wt, tc, et] = p.map(f64::from);
    if et >= t.et {
        LabelClass::Et
    } else if tc >= t.tc {
        LabelClass::Ncr
    } else if wt >= t.wt {
        LabelClass::Ed
    } else {
        LabelClass::Background
    }
}

/// Hard labels from region probabilities: ET, else NCR (TC), else ED (WT), else background.
pub fn threshold_compose(probs: &ProbVolume, rules: &PostprocRules) -> LabelVolume {
    let dims = probs.dims();
    let codes = (0..dims.len())
        .map(|i| cascade(probs.at(i), &rules.thresholds).code())
        .collect();
    LabelVolume::new(dims, probs.spacing(), codes).expect("cascade yields canonical codes")
}

/// Region channel used as the confidence of a class.
pub fn confidence_region(class: LabelClass) -> Option<RegionId> {
    match class {
        LabelClass::Et => Some(RegionId::Et),
        LabelClass::Ncr => Some(RegionId::Tc),
        LabelClass::Ed => Some(RegionId::Wt),
        LabelClass::Background => None,
    }
}

/// Sets to background every class component smaller than its volume floor whose
/// mean confidence is below the ceiling. Without `probs` the confidence clause always holds.
pub fn remove_small_regions(labels: &LabelVolume, probs: Option<&ProbVolume>, rules: &PostprocRules) -> Result<LabelVolume> {
    if let Some(p) = probs {
        p.check_geometry(labels.as_volume())?;
    }
    let mut out = labels.clone();
    for class in LabelClass::TUMOR {
        let floor = rules.min_volume_mm3.get(class);
        let comps = morphology::connected_components(&labels.class_mask(class), rules.connectivity)?;
        if comps.is_empty() {
            continue;
        }
        let mut conf_sum = vec![0.0f64; comps.len() + 1];
        if let Some(p) = probs {
            let channel = p.channel(confidence_region(class).expect("tumor class"));
            for (&id, &v) in comps.ids().iter().zip(channel) {
                conf_sum[id as usize] += v as f64;
            }
        }
        let remove: Vec<bool> = std::iter::once(false)
            .chain(comps.all_stats().iter().enumerate().map(|(k, s)| {
                let small = s.volume_mm3 < floor;
                let unsure = match probs {
                    Some(_) => conf_sum[k + 1] / (s.voxel_count as f64) < rules.confidence_ceiling,
                    None => true,
                };
                small && unsure
            }))
            .collect();
        for (code, &id) in out.codes_mut().iter_mut().zip(comps.ids()) {
            if id != 0 && remove[id as usize] {
                *code = LabelClass::Background.code();
            }
        }
    }
    Ok(out)
}

/// Relabels every voxel enclosed by the ET mask as NCR.
pub fn center_fill(labels: &LabelVolume) -> LabelVolume {
    let holes = morphology::interior_holes(&labels.class_mask(LabelClass::Et));
    let mut out = labels.clone();
    for (code, &h) in out.codes_mut().iter_mut().zip(holes.data()) {
        if h {
            *code = LabelClass::Ncr.code();
        }
    }
    out
}

/// Voxel-wise, channel-wise arithmetic mean.
pub fn ensemble_mean(inputs: &[ProbVolume]) -> Result<ProbVolume> {
    let first = inputs.first().ok_or(Error::EmptyEnsemble)?;
    for other in &inputs[1..] {
        first.check_geometry_prob(other)?;
    }
    if inputs.len() == 1 {
        return Ok(first.clone());
    }
    let n = inputs.len() as f64;
    let channels = std::array::from_fn(|c| {
        (0..first.dims().len())
            .map(|i| {
                let s: f64 = inputs.iter().map(|p| p.channels()[c][i] as f64).sum();
                ((s / n) as f32).clamp(0.0, 1.0)
            })
            .collect()
    });
    ProbVolume::new(first.dims(), first.spacing(), channels)
}

/// Threshold → region removal → center fill on one probability volume.
pub fn postprocess_single(probs: &ProbVolume, rules: &PostprocRules) -> Result<LabelVolume> {
    let mut labels = threshold_compose(probs, rules);
    if rules.region_removal {
        labels = remove_small_regions(&labels, Some(probs), rules)?;
    }
    if rules.center_fill {
        labels = center_fill(&labels);
    }
    Ok(labels)
}

fn vote(labels: &[LabelVolume]) -> LabelVolume {
    let first = &labels[0];
    let n = labels.len();
    let codes = (0..first.codes().len())
        .map(|i| {
            let mut votes = [0usize; 3];
            for l in labels {
                for r in RegionId::ALL {
                    votes[r.channel()] += r.contains_code(l.codes()[i]) as usize;
                }
            }
            let present = |r: RegionId| 2 * votes[r.channel()] >= n;
            // Region votes are nested, so the cascade reproduces a consistent label.
            if present(RegionId::Et) {
                LabelClass::Et
            } else if present(RegionId::Tc) {
                LabelClass::Ncr
            } else if present(RegionId::Wt) {
                LabelClass::Ed
            } else {
                LabelClass::Background
            }
            .code()
        })
        .collect();
    LabelVolume::new(first.dims(), first.spacing(), codes).expect("canonical")
}

/// Ensemble → threshold → region removal → center fill.
pub fn run_pipeline(inputs: &[ProbVolume], rules: &PostprocRules) -> Result<LabelVolume> {
    rules.validate()?;
    match rules.ensemble {
        EnsembleMode::ProbabilityMean => postprocess_single(&ensemble_mean(inputs)?, rules),
        EnsembleMode::LabelVote => {
            let first = inputs.first().ok_or(Error::EmptyEnsemble)?;
            for other in &inputs[1..] {
                first.check_geometry_prob(other)?;
            }
            let per_fold = inputs
                .iter()
                .map(|p| postprocess_single(p, rules))
                .collect::<Result<Vec<_>>>()?;
            Ok(vote(&per_fold))
        }
    }
}
