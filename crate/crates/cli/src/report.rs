//! Dataset reports: per-case rows, aggregates and their CSV / JSON / text forms.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tumorseg::{CaseMetrics, RegionId, RegionMetrics};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const CSV_HEADER: [&str; 11] = [
    "case_id",
    "region",
    "dice",
    "hd95",
    "lw_dice",
    "lw_hd95",
    "n_gt_lesions",
    "n_tp",
    "n_fn",
    "n_fp",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Dice,
    Hd95,
    LwDice,
    LwHd95,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Self::Dice, Self::Hd95, Self::LwDice, Self::LwHd95];

    pub fn of(self, m: &RegionMetrics) -> f64 {
        match self {
            Self::Dice => m.dice,
            Self::Hd95 => m.hd95,
            Self::LwDice => m.lesionwise_dice,
            Self::LwHd95 => m.lesionwise_hd95,
        }
    }
}

/// Outcome of one case: metrics, or the error that prevented them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseOutcome {
    pub case_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<CaseMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub region: RegionId,
    pub metric: Metric,
    /// Number of successful cases summarized.
    pub n: usize,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    /// Population standard deviation.
    pub std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub tool: String,
    pub version: String,
    pub timestamp_unix: u64,
    pub config: RunConfig,
}

impl RunMetadata {
    pub fn now(config: &RunConfig) -> Self {
        Self {
            tool: "tumorseg".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            config: config.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub metadata: RunMetadata,
    pub cases: Vec<CaseOutcome>,
    pub aggregates: Vec<Aggregate>,
}

pub fn summarize(values: &[f64]) -> (Option<f64>, Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    };
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (Some(mean), Some(median), Some(var.sqrt()))
}

pub fn aggregates(cases: &[CaseOutcome]) -> Vec<Aggregate> {
    let mut out = Vec::new();
    for region in RegionId::ALL {
        for metric in Metric::ALL {
            let values: Vec<f64> = cases
                .iter()
                .filter_map(|c| c.metrics.as_ref())
                .map(|m| metric.of(m.region(region)))
                .collect();
            let (mean, median, std) = summarize(&values);
            out.push(Aggregate {
                region,
                metric,
                n: values.len(),
                mean,
                median,
                std,
            });
        }
    }
    out
}

impl DatasetReport {
    /// Sorts cases by id and derives the aggregates from them.
    pub fn new(config: &RunConfig, mut cases: Vec<CaseOutcome>) -> Self {
        cases.sort_by(|a, b| a.case_id.cmp(&b.case_id));
        let aggregates = aggregates(&cases);
        Self {
            metadata: RunMetadata::now(config),
            cases,
            aggregates,
        }
    }

    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|c| c.error.is_some()).count()
    }

    pub fn aggregate(&self, region: RegionId, metric: Metric) -> &Aggregate {
        self.aggregates
            .iter()
            .find(|a| a.region == region && a.metric == metric)
            .expect("every region and metric is aggregated")
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CSV_HEADER)?;
        for case in &self.cases {
            for region in RegionId::ALL {
                let mut row = vec![case.case_id.clone(), region.to_string()];
                match &case.metrics {
                    Some(m) => {
                        let r = m.region(region);
                        // `{}` on f64 prints the shortest string that parses back exactly.
                        row.extend(Metric::ALL.iter().map(|k| format!("{}", k.of(r))));
                        row.extend([r.n_gt_lesions, r.n_tp, r.n_fn, r.n_fp].map(|v| v.to_string()));
                        row.push(String::new());
                    }
                    None => {
                        row.extend(std::iter::repeat_n(String::new(), 8));
                        row.push(case.error.clone().unwrap_or_default());
                    }
                }
                w.write_record(&row)?;
            }
        }
        w.flush().map_err(CliError::io("<csv>"))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `report.csv` and/or `report.json` into `dir`.
    pub fn write_files(&self, dir: &Path, csv: bool, json: bool) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
        if csv {
            let path = dir.join("report.csv");
            std::fs::write(&path, self.to_csv_string()?).map_err(CliError::io(&path))?;
        }
        if json {
            let path = dir.join("report.json");
            std::fs::write(&path, self.to_json_string()?).map_err(CliError::io(&path))?;
        }
        Ok(())
    }

    /// Mean scores laid out as HD95 (mm) and Dice (%) per ET/TC/WT with their average.
    pub fn summary_table(&self) -> String {
        let order = [RegionId::Et, RegionId::Tc, RegionId::Wt];
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
        let line = |metric: Metric| -> Vec<String> {
            let vals: Vec<Option<f64>> = order.iter().map(|&r| self.aggregate(r, metric).mean).collect();
            let avg = if vals.iter().all(Option::is_some) {
                Some(vals.iter().flatten().sum::<f64>() / 3.0)
            } else {
                None
            };
            vals.into_iter().chain([avg]).map(fmt).collect()
        };

        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<12} {:>40} {:>40}",
            "", "HD95 (mm)", "Dice Score (%)"
        );
        let _ = writeln!(
            s,
            "{:<12} {:>9} {:>9} {:>9} {:>9}  {:>9} {:>9} {:>9} {:>9}",
            "", "ET", "TC", "WT", "Avg.", "ET", "TC", "WT", "Avg."
        );
        for (name, hd, dice) in [
            ("Legacy", Metric::Hd95, Metric::Dice),
            ("Lesion-wise", Metric::LwHd95, Metric::LwDice),
        ] {
            let h = line(hd);
            let d = line(dice);
            let _ = writeln!(
                s,
                "{:<12} {:>9} {:>9} {:>9} {:>9}  {:>9} {:>9} {:>9} {:>9}",
                name, h[0], h[1], h[2], h[3], d[0], d[1], d[2], d[3]
            );
        }
        let _ = writeln!(s, "cases: {}, failed: {}", self.cases.len(), self.failures());
        s
    }
}
