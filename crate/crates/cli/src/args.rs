//! Command-line parsing and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use tumorseg::postproc::{ClassFloors, EnsembleMode};
use tumorseg::{ChannelOrder, Connectivity, FixtureSpec};

use crate::config::{ReportFormat, RunConfig};
use crate::error::{CliError, Result};
use crate::run;

#[derive(Debug, Parser)]
#[command(name = "tumorseg", version, about = "Brain-tumor segmentation evaluation and post-processing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score predictions against ground truth (legacy and lesion-wise Dice / HD95).
    Evaluate(RunArgs),
    /// Threshold, clean and fill probability maps into label maps.
    Postprocess(RunArgs),
    /// Average probability maps into one float32 4D file.
    Ensemble(RunArgs),
    /// Write a synthetic case (labels and probabilities) as NIfTI.
    Fixtures(FixtureArgs),
}

/// Flags shared by the data commands. Each one overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON config file; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the effective configuration as JSON and exit.
    #[arg(long)]
    pub dump_config: bool,

    /// Prediction directory (repeat for fold ensembling in `postprocess`).
    #[arg(long = "pred-dir")]
    pub pred_dirs: Vec<PathBuf>,
    #[arg(long)]
    pub gt_dir: Option<PathBuf>,
    /// Input file (repeatable).
    #[arg(long = "input")]
    pub inputs: Vec<PathBuf>,
    /// Report directory, output directory, or output file depending on the command.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Regex over file names; group 1 (or the whole match) is the case id.
    #[arg(long)]
    pub pattern: Option<String>,
    /// csv | json | both
    #[arg(long)]
    pub format: Option<ReportFormat>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// legacy | identity | from=to,...
    #[arg(long)]
    pub label_map: Option<String>,
    /// Region of each probability channel, e.g. WT,TC,ET
    #[arg(long)]
    pub channel_order: Option<String>,

    /// 6 | 18 | 26
    #[arg(long)]
    pub connectivity: Option<Connectivity>,
    #[arg(long)]
    pub dilation_mm: Option<f64>,
    #[arg(long)]
    pub penalty_mm: Option<f64>,
    #[arg(long)]
    pub percentile: Option<f64>,

    #[arg(long)]
    pub t_wt: Option<f64>,
    #[arg(long)]
    pub t_tc: Option<f64>,
    #[arg(long)]
    pub t_et: Option<f64>,
    /// Per-class volume floors, e.g. ncr=75,et=75,ed=500
    #[arg(long)]
    pub min_mm3: Option<ClassFloors>,
    /// Confidence ceiling for region removal.
    #[arg(long)]
    pub confidence: Option<f64>,
    #[arg(long)]
    pub no_center_fill: bool,
    #[arg(long)]
    pub no_region_removal: bool,
    /// mean | vote
    #[arg(long)]
    pub ensemble_mode: Option<EnsembleMode>,
}

impl RunArgs {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self, command: &str) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        c.command = Some(command.to_string());
        if !self.pred_dirs.is_empty() {
            c.pred_dirs = self.pred_dirs.clone();
        }
        if !self.inputs.is_empty() {
            c.inputs = self.inputs.clone();
        }
        macro_rules! set {
            ($field:expr, $value:expr) => {
                if let Some(v) = $value.clone() {
                    $field = v;
                }
            };
        }
        macro_rules! set_opt {
            ($field:expr, $value:expr) => {
                if let Some(v) = $value.clone() {
                    $field = Some(v);
                }
            };
        }
        set_opt!(c.gt_dir, self.gt_dir);
        set_opt!(c.out, self.out);
        set_opt!(c.case_pattern, self.pattern);
        set!(c.formats, self.format);
        set!(c.workers, self.workers);
        set!(c.label_map, self.label_map);
        set!(c.channel_order, self.channel_order);
        if let Some(conn) = self.connectivity {
            c.lesionwise.connectivity = conn;
            c.postproc.connectivity = conn;
        }
        set!(c.lesionwise.dilation_radius_mm, self.dilation_mm);
        set_opt!(c.lesionwise.penalty_mm, self.penalty_mm);
        set!(c.lesionwise.percentile, self.percentile);
        set!(c.postproc.thresholds.wt, self.t_wt);
        set!(c.postproc.thresholds.tc, self.t_tc);
        set!(c.postproc.thresholds.et, self.t_et);
        set!(c.postproc.min_volume_mm3, self.min_mm3);
        set!(c.postproc.confidence_ceiling, self.confidence);
        set!(c.postproc.ensemble, self.ensemble_mode);
        if self.no_center_fill {
            c.postproc.center_fill = false;
        }
        if self.no_region_removal {
            c.postproc.region_removal = false;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Args)]
pub struct FixtureArgs {
    /// Fixture spec as JSON. Without it a random tumor layout is generated.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Seed for the random layout.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Grid size for the random layout, e.g. 240,240,155
    #[arg(long, value_delimiter = ',', default_values_t = [64usize, 64, 48])]
    pub dims: Vec<usize>,
    /// Case name used for both file names.
    #[arg(long, default_value = "case")]
    pub name: String,
    /// Directory receiving labels/ and probs/.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "WT,TC,ET")]
    pub channel_order: ChannelOrder,
}

fn report_case_failures(failures: usize) -> u8 {
    if failures > 0 {
        1
    } else {
        0
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn execute(cli: Cli) -> u8 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dump(config: &RunConfig) -> Result<u8> {
    println!("{}", serde_json::to_string_pretty(config)?);
    Ok(0)
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Evaluate(args) => {
            let config = args.resolve("evaluate")?;
            if args.dump_config {
                return dump(&config);
            }
            let out = run::cmd_evaluate(&config)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            for case in &out.report.cases {
                if let Some(e) = &case.error {
                    eprintln!("case {} failed: {e}", case.case_id);
                }
            }
            print!("{}", out.report.summary_table());
            Ok(report_case_failures(out.report.failures()))
        }
        Command::Postprocess(args) => {
            let config = args.resolve("postprocess")?;
            if args.dump_config {
                return dump(&config);
            }
            let out = run::cmd_postprocess(&config)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            for (id, e) in &out.failures {
                eprintln!("case {id} failed: {e}");
            }
            println!("wrote {} label map(s)", out.written.len());
            Ok(report_case_failures(out.failures.len()))
        }
        Command::Ensemble(args) => {
            let config = args.resolve("ensemble")?;
            if args.dump_config {
                return dump(&config);
            }
            let path = run::cmd_ensemble(&config)?;
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Fixtures(args) => {
            let spec = match &args.spec {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
                    serde_json::from_str::<FixtureSpec>(&text)
                        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
                }
                None => {
                    let dims: [usize; 3] = args
                        .dims
                        .clone()
                        .try_into()
                        .map_err(|_| CliError::Config("--dims takes three values".into()))?;
                    tumorseg::fixtures::random_tumor_spec(dims, args.seed)
                }
            };
            let [labels, probs] = run::cmd_fixtures(&spec, &args.name, &args.out, args.channel_order)?;
            println!("wrote {} and {}", labels.display(), probs.display());
            Ok(0)
        }
    }
}
