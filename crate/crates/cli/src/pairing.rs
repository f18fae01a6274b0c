//! Matching prediction files to ground-truth files by case id.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use regex::Regex;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CasePair {
    pub case_id: String,
    pub pred: PathBuf,
    pub gt: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pairing {
    /// Sorted by case id.
    pub pairs: Vec<CasePair>,
    pub unmatched_pred: Vec<String>,
    pub unmatched_gt: Vec<String>,
}

impl Pairing {
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.unmatched_pred.is_empty() {
            out.push(format!("predictions without ground truth: {}", self.unmatched_pred.join(", ")));
        }
        if !self.unmatched_gt.is_empty() {
            out.push(format!("ground truth without predictions: {}", self.unmatched_gt.join(", ")));
        }
        out
    }
}

/// Case id of a file name: the pattern's first group (or whole match), else the
/// name up to its first `.`. `None` when a pattern is given and does not match.
pub fn case_id(file_name: &str, pattern: Option<&Regex>) -> Option<String> {
    match pattern {
        Some(re) => {
            let caps = re.captures(file_name)?;
            let m = caps.get(1).or_else(|| caps.get(0))?;
            Some(m.as_str().to_string())
        }
        None => {
            let stem = file_name.split('.').next().unwrap_or(file_name);
            (!stem.is_empty()).then(|| stem.to_string())
        }
    }
}

/// Regular, non-hidden files of `dir` keyed by case id.
pub fn scan_dir(dir: &Path, pattern: Option<&Regex>) -> Result<BTreeMap<String, PathBuf>> {
    let mut out: BTreeMap<String, PathBuf> = BTreeMap::new();
    let entries = std::fs::read_dir(dir).map_err(CliError::io(dir))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(CliError::io(dir))?;
        let path = entry.path();
        if !path.is_file() {
            continue;
        }
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') {
            continue;
        }
        files.push((name, path));
    }
    files.sort();
    for (name, path) in files {
        let Some(id) = case_id(&name, pattern) else {
            continue;
        };
        if let Some(first) = out.get(&id) {
            return Err(CliError::DuplicateCaseId {
                id,
                first: first.clone(),
                second: path,
            });
        }
        out.insert(id, path);
    }
    Ok(out)
}

pub fn pair_cases(pred_dir: &Path, gt_dir: &Path, pattern: Option<&Regex>) -> Result<Pairing> {
    let preds = scan_dir(pred_dir, pattern)?;
    let mut gts = scan_dir(gt_dir, pattern)?;
    let mut pairing = Pairing::default();
    for (id, pred) in preds {
        match gts.remove(&id) {
            Some(gt) => pairing.pairs.push(CasePair { case_id: id, pred, gt }),
            None => pairing.unmatched_pred.push(id),
        }
    }
    pairing.unmatched_gt = gts.into_keys().collect();
    if pairing.pairs.is_empty() {
        return Err(CliError::NoPairsFound {
            pred: pred_dir.to_path_buf(),
            gt: gt_dir.to_path_buf(),
        });
    }
    Ok(pairing)
}
