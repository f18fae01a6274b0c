//! Run configuration: defaults, JSON config files and validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tumorseg::{ChannelOrder, LabelMap, LesionwiseParams, PostprocRules};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    #[default]
    Both,
}

impl ReportFormat {
    pub fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Self::Json | Self::Both)
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "both" => Ok(Self::Both),
            other => Err(CliError::Config(format!("unknown report format {other:?}"))),
        }
    }
}

/// Everything a command needs. Loaded from defaults, then a JSON file, then flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    /// Prediction directories; more than one means fold ensembling in `postprocess`.
    pub pred_dirs: Vec<PathBuf>,
    pub gt_dir: Option<PathBuf>,
    /// Explicit input files (`postprocess`, `ensemble`).
    pub inputs: Vec<PathBuf>,
    pub out: Option<PathBuf>,
    /// Regex applied to file names; group 1 (or the whole match) is the case id.
    pub case_pattern: Option<String>,
    pub formats: ReportFormat,
    pub workers: usize,
    /// `legacy` (4 → 3), `identity`, or explicit `from=to` pairs.
    pub label_map: String,
    /// Region stored in each channel of probability files.
    pub channel_order: String,
    pub postproc: PostprocRules,
    pub lesionwise: LesionwiseParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            pred_dirs: Vec::new(),
            gt_dir: None,
            inputs: Vec::new(),
            out: None,
            case_pattern: None,
            formats: ReportFormat::Both,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            label_map: LabelMap::default().to_string(),
            channel_order: ChannelOrder::default().to_string(),
            postproc: PostprocRules::default(),
            lesionwise: LesionwiseParams::default(),
        }
    }
}

fn same_path(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn label_map(&self) -> Result<LabelMap> {
        self.label_map
            .parse()
            .map_err(|e| CliError::Config(format!("label map: {e}")))
    }

    pub fn channel_order(&self) -> Result<ChannelOrder> {
        self.channel_order
            .parse()
            .map_err(|e| CliError::Config(format!("channel order: {e}")))
    }

    pub fn pattern(&self) -> Result<Option<regex::Regex>> {
        let Some(p) = &self.case_pattern else {
            return Ok(None);
        };
        let re = regex::Regex::new(p)?;
        if re.captures_len() > 2 {
            return Err(CliError::Config(format!(
                "case pattern {p:?} must have at most one capture group"
            )));
        }
        Ok(Some(re))
    }

    /// Checks parameter ranges and that no two input/output locations coincide.
    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        self.label_map()?;
        self.channel_order()?;
        self.pattern()?;
        self.postproc
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        self.lesionwise
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;

        let mut paths: Vec<&Path> = self.pred_dirs.iter().map(PathBuf::as_path).collect();
        paths.extend(self.gt_dir.as_deref());
        paths.extend(self.inputs.iter().map(PathBuf::as_path));
        paths.extend(self.out.as_deref());
        for (i, a) in paths.iter().enumerate() {
            for b in &paths[i + 1..] {
                if same_path(a, b) {
                    return Err(CliError::Config(format!(
                        "path {} is used more than once",
                        a.display()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_tuned_rules() {
        let c = RunConfig::default();
        assert_eq!(c.postproc.thresholds.wt, 0.5);
        assert_eq!(c.postproc.thresholds.tc, 0.6);
        assert_eq!(c.postproc.thresholds.et, 0.6);
        assert_eq!(c.postproc.confidence_ceiling, 0.9);
        assert_eq!(
            (c.postproc.min_volume_mm3.ncr, c.postproc.min_volume_mm3.et, c.postproc.min_volume_mm3.ed),
            (75.0, 75.0, 500.0)
        );
        assert!(c.postproc.center_fill);
        c.validate().unwrap();
    }

    #[test]
    fn partial_json_keeps_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"workers": 3, "postproc": {"center_fill": false}}"#).unwrap();
        assert_eq!(c.workers, 3);
        assert!(!c.postproc.center_fill);
        assert_eq!(c.postproc.confidence_ceiling, 0.9);
    }

    #[test]
    fn rejects_zero_workers_and_shared_paths() {
        let c = RunConfig { workers: 0, ..Default::default() };
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
        let c = RunConfig {
            pred_dirs: vec!["x".into()],
            gt_dir: Some("x".into()),
            ..Default::default()
        };
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn pattern_with_two_groups_is_rejected() {
        let c = RunConfig { case_pattern: Some("(a)(b)".into()), ..Default::default() };
        assert!(c.validate().is_err());
    }
}
