//! The `evaluate`, `postprocess`, `ensemble` and `fixtures` commands.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use tumorseg::nifti::{read_label_volume, read_prob_volume, write_label_volume, write_prob_volume};
use tumorseg::{
    evaluate_case, ChannelOrder, FixtureSpec, LabelMap, LesionwiseParams, ProbSource, ProbVolume,
    WriteOptions,
};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::pairing::{pair_cases, scan_dir, CasePair};
use crate::report::{CaseOutcome, DatasetReport};

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {workers} workers: {e}")))
}

pub fn evaluate_pair(pair: &CasePair, params: &LesionwiseParams, map: &LabelMap) -> CaseOutcome {
    let read = |path: &Path| read_label_volume(path, map).map_err(|e| format!("{}: {e}", path.display()));
    let result = read(&pair.pred).and_then(|pred| {
        let gt = read(&pair.gt)?;
        evaluate_case(&pair.case_id, &pred, &gt, params).map_err(|e| e.to_string())
    });
    match result {
        Ok(m) => CaseOutcome {
            case_id: pair.case_id.clone(),
            metrics: Some(m),
            error: None,
        },
        Err(e) => CaseOutcome {
            case_id: pair.case_id.clone(),
            metrics: None,
            error: Some(e),
        },
    }
}

/// Evaluates every pair on `workers` threads. Output order follows `pairs`.
pub fn evaluate_dataset(pairs: &[CasePair], params: &LesionwiseParams, map: &LabelMap, workers: usize) -> Result<Vec<CaseOutcome>> {
    Ok(pool(workers)?.install(|| pairs.par_iter().map(|p| evaluate_pair(p, params, map)).collect()))
}

pub struct EvaluateOutput {
    pub report: DatasetReport,
    pub warnings: Vec<String>,
}

pub fn cmd_evaluate(config: &RunConfig) -> Result<EvaluateOutput> {
    config.validate()?;
    let pred_dir = match config.pred_dirs.as_slice() {
        [one] => one,
        [] => return Err(CliError::Config("evaluate needs --pred-dir".into())),
        _ => return Err(CliError::Config("evaluate takes exactly one --pred-dir".into())),
    };
    let gt_dir = config
        .gt_dir
        .as_deref()
        .ok_or_else(|| CliError::Config("evaluate needs --gt-dir".into()))?;
    let pattern = config.pattern()?;
    let pairing = pair_cases(pred_dir, gt_dir, pattern.as_ref())?;
    let cases = evaluate_dataset(&pairing.pairs, &config.lesionwise, &config.label_map()?, config.workers)?;
    let report = DatasetReport::new(config, cases);
    if let Some(out) = &config.out {
        report.write_files(out, config.formats.csv(), config.formats.json())?;
    }
    Ok(EvaluateOutput {
        report,
        warnings: pairing.warnings(),
    })
}

fn read_probs(paths: &[PathBuf], order: ChannelOrder) -> Result<Vec<ProbVolume>> {
    Ok(paths
        .iter()
        .map(|p| read_prob_volume(&ProbSource::FourD(p.clone()), order))
        .collect::<tumorseg::Result<Vec<_>>>()?)
}

fn postprocess_files(inputs: &[PathBuf], out: &Path, config: &RunConfig, order: ChannelOrder) -> Result<()> {
    let probs = read_probs(inputs, order)?;
    let labels = tumorseg::run_pipeline(&probs, &config.postproc)?;
    write_label_volume(out, &labels)?;
    Ok(())
}

#[derive(Debug, Default)]
pub struct PostprocessOutput {
    pub written: Vec<PathBuf>,
    /// `(case_id, message)` for cases that failed.
    pub failures: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

/// With `inputs`, ensembles and post-processes them into the single file `out`.
/// With `pred_dirs`, processes every case present in all of them into `out/<case>.nii.gz`.
pub fn cmd_postprocess(config: &RunConfig) -> Result<PostprocessOutput> {
    config.validate()?;
    let order = config.channel_order()?;
    let out = config
        .out
        .as_deref()
        .ok_or_else(|| CliError::Config("postprocess needs --out".into()))?;
    let mut result = PostprocessOutput::default();

    match (config.inputs.is_empty(), config.pred_dirs.is_empty()) {
        (false, true) => {
            postprocess_files(&config.inputs, out, config, order)?;
            result.written.push(out.to_path_buf());
        }
        (true, false) => {
            let pattern = config.pattern()?;
            let folds = config
                .pred_dirs
                .iter()
                .map(|d| scan_dir(d, pattern.as_ref()))
                .collect::<Result<Vec<_>>>()?;
            let mut jobs = Vec::new();
            for (id, first) in &folds[0] {
                let mut paths = vec![first.clone()];
                for fold in &folds[1..] {
                    if let Some(p) = fold.get(id) {
                        paths.push(p.clone());
                    }
                }
                if paths.len() == folds.len() {
                    jobs.push((id.clone(), paths));
                } else {
                    result.warnings.push(format!("case {id} is missing from some folds; skipped"));
                }
            }
            if jobs.is_empty() {
                return Err(CliError::NoPairsFound {
                    pred: config.pred_dirs[0].clone(),
                    gt: config.pred_dirs.last().cloned().unwrap_or_default(),
                });
            }
            std::fs::create_dir_all(out).map_err(CliError::io(out))?;
            let outcomes: Vec<(String, PathBuf, Result<()>)> = pool(config.workers)?.install(|| {
                jobs.par_iter()
                    .map(|(id, paths)| {
                        let target = out.join(format!("{id}.nii.gz"));
                        let r = postprocess_files(paths, &target, config, order);
                        (id.clone(), target, r)
                    })
                    .collect()
            });
            for (id, target, r) in outcomes {
                match r {
                    Ok(()) => result.written.push(target),
                    Err(e) => result.failures.push((id, e.to_string())),
                }
            }
        }
        (true, true) => return Err(CliError::Config("postprocess needs --input or --pred-dir".into())),
        (false, false) => {
            return Err(CliError::Config("use either --input or --pred-dir, not both".into()))
        }
    }
    Ok(result)
}

/// Averages the `inputs` and writes a float32 4D probability file.
pub fn cmd_ensemble(config: &RunConfig) -> Result<PathBuf> {
    config.validate()?;
    let order = config.channel_order()?;
    if config.inputs.is_empty() {
        return Err(CliError::Config("ensemble needs at least one --input".into()));
    }
    let out = config
        .out
        .as_deref()
        .ok_or_else(|| CliError::Config("ensemble needs --out".into()))?;
    let mean = tumorseg::ensemble_mean(&read_probs(&config.inputs, order)?)?;
    write_prob_volume(out, &mean, order, WriteOptions::default())?;
    Ok(out.to_path_buf())
}

/// Writes `out/labels/<name>.nii.gz` and `out/probs/<name>.nii.gz`.
pub fn cmd_fixtures(spec: &FixtureSpec, name: &str, out: &Path, order: ChannelOrder) -> Result<[PathBuf; 2]> {
    let (labels, probs) = tumorseg::generate(spec)?;
    let label_dir = out.join("labels");
    let prob_dir = out.join("probs");
    for d in [&label_dir, &prob_dir] {
        std::fs::create_dir_all(d).map_err(CliError::io(d.as_path()))?;
    }
    let lp = label_dir.join(format!("{name}.nii.gz"));
    let pp = prob_dir.join(format!("{name}.nii.gz"));
    write_label_volume(&lp, &labels)?;
    write_prob_volume(&pp, &probs, order, WriteOptions::default())?;
    Ok([lp, pp])
}
