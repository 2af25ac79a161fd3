//! The commands behind the `nonmarkov` binary. Each one computes every
//! artifact in memory first and only then writes, so a failure leaves no
//! partial output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::LearnSettings;
use super::io::{dataset_to_csv, fmt_f64, read_dataset, read_text, sha256_hex, sibling, write_all_atomic};
use crate::error::{Error, Result};
use crate::learn::{
    evaluate, k_fold_cv, knn_fit, parse_model, serialize_model, size_sweep, train_poly, train_test_split, CvReport,
    Dataset, MetricsReport, Regressor, SplitMode, SweepReport,
};
use crate::simulate::{generate_dataset, GenerationPlan};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
const TOOL: &str = "nonmarkov";

/// Where a report came from. No timestamps, so identical inputs give
/// identical files.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset_sha256: Option<String>,
    pub seeds: BTreeMap<&'static str, u64>,
}

impl Provenance {
    fn new<C: Serialize>(command: &'static str, config: &C, dataset_sha256: Option<String>, seeds: &[(&'static str, u64)]) -> Result<Self> {
        let json = serde_json::to_string(&(command, config)).map_err(|e| Error::Numerical(e.to_string()))?;
        Ok(Provenance {
            tool: TOOL,
            version: VERSION,
            command,
            config_sha256: sha256_hex(json.as_bytes()),
            dataset_sha256,
            seeds: seeds.iter().copied().collect(),
        })
    }

    fn text(&self) -> String {
        let mut s = format!("# {} {} {}\n", self.tool, self.command, self.version);
        let _ = writeln!(s, "config_sha256 {}", self.config_sha256);
        if let Some(d) = &self.dataset_sha256 {
            let _ = writeln!(s, "dataset_sha256 {d}");
        }
        for (k, v) in &self.seeds {
            let _ = writeln!(s, "{k} {v}");
        }
        s
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn split_label(mode: SplitMode) -> &'static str {
    match mode {
        SplitMode::Uniform => "uniform",
        SplitMode::Stratified => "stratified",
    }
}

#[derive(Serialize)]
struct DatasetMeta<'a> {
    provenance: Provenance,
    rows: usize,
    feature_names: Vec<String>,
    plan: &'a GenerationPlan,
}

/// Generates a dataset: `out` (CSV) and `out.meta.json`.
pub fn cmd_gen(plan: &GenerationPlan, out: &Path) -> Result<Vec<PathBuf>> {
    let rows = generate_dataset(plan)?;
    let names = plan.measurements.feature_names();
    let csv = dataset_to_csv(&rows, &names)?;
    let meta = DatasetMeta {
        provenance: Provenance::new("gen", plan, None, &[("base_seed", plan.base_seed)])?,
        rows: rows.len(),
        feature_names: names,
        plan,
    };
    let files = vec![(out.to_path_buf(), csv), (sibling(out, ".meta.json"), to_json(&meta)?)];
    write_all_atomic(&files)?;
    Ok(files.into_iter().map(|(p, _)| p).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainReport {
    pub provenance: Provenance,
    pub model: String,
    pub degree: usize,
    pub split: &'static str,
    pub train_fraction: f64,
    pub ridge: f64,
    pub train: MetricsReport,
    pub test: MetricsReport,
}

fn metrics_line(name: &str, m: &MetricsReport) -> String {
    format!("{name:<6} n={:<5} r2={:.6} mae={:.6}\n", m.n, m.r_squared, m.mae)
}

/// Fits one polynomial degree on the train split. Writes the model to `out`
/// and metrics to `out.metrics.txt` / `out.metrics.json`.
pub fn cmd_train(s: &LearnSettings, data: &Path, out: &Path) -> Result<TrainReport> {
    let degree = s.single_degree()?;
    let (ds, hash) = read_dataset(data)?;
    let (train, test) = train_test_split(&ds, s.train_fraction, s.seed, s.split)?;
    let model = train_poly(&train, degree, s.ridge)?;
    let report = TrainReport {
        provenance: Provenance::new("train", s, Some(hash), &[("split_seed", s.seed)])?,
        model: format!("polynomial degree {degree}"),
        degree,
        split: split_label(s.split),
        train_fraction: s.train_fraction,
        ridge: s.ridge,
        train: evaluate(&model, &train)?,
        test: evaluate(&model, &test)?,
    };
    let mut text = report.provenance.text();
    let _ = writeln!(text, "model {}\nsplit {} train_fraction {} ridge {}", report.model, report.split, s.train_fraction, s.ridge);
    text += &metrics_line("train", &report.train);
    text += &metrics_line("test", &report.test);
    let files = vec![
        (out.to_path_buf(), serialize_model(&model, ds.feature_names())?.into_bytes()),
        (sibling(out, ".metrics.txt"), text.into_bytes()),
        (sibling(out, ".metrics.json"), to_json(&report)?),
    ];
    write_all_atomic(&files)?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CvSummary {
    pub degree: usize,
    pub mean_r_squared: f64,
    pub std_r_squared: f64,
    pub mean_mae: f64,
    pub std_mae: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossvalReport {
    pub provenance: Provenance,
    pub k: usize,
    /// Population standard deviation across folds.
    pub std_kind: &'static str,
    pub summary: Vec<CvSummary>,
    pub runs: Vec<CvReport>,
}

/// k-fold cross-validation for each requested degree: `out` (text) and `out.json`.
pub fn cmd_crossval(s: &LearnSettings, data: &Path, out: &Path) -> Result<CrossvalReport> {
    let (ds, hash) = read_dataset(data)?;
    let runs = s.degrees.iter().map(|&d| k_fold_cv(&ds, s.kfold, d, s.seed, s.ridge)).collect::<Result<Vec<_>>>()?;
    let summary = runs
        .iter()
        .map(|r| CvSummary {
            degree: r.degree,
            mean_r_squared: r.mean_r_squared,
            std_r_squared: r.std_r_squared,
            mean_mae: r.mean_mae,
            std_mae: r.std_mae,
        })
        .collect();
    let report = CrossvalReport {
        provenance: Provenance::new("crossval", s, Some(hash), &[("fold_seed", s.seed)])?,
        k: s.kfold,
        std_kind: "population",
        summary,
        runs,
    };
    let mut text = report.provenance.text();
    let _ = writeln!(text, "k {} (std over folds, population)", s.kfold);
    let _ = writeln!(text, "{:<6} {:>9} {:>9} {:>9} {:>9}", "degree", "r2_mean", "r2_std", "mae_mean", "mae_std");
    for c in &report.summary {
        let _ = writeln!(
            text,
            "{:<6} {:>9.6} {:>9.6} {:>9.6} {:>9.6}",
            c.degree, c.mean_r_squared, c.std_r_squared, c.mean_mae, c.std_mae
        );
    }
    write_all_atomic(&[(out.to_path_buf(), text.into_bytes()), (sibling(out, ".json"), to_json(&report)?)])?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepFile {
    pub provenance: Provenance,
    pub sweep: SweepReport,
    pub largest_gap_train_size: Option<usize>,
}

/// Training-size sweep: `out` (text) and `out.json`.
pub fn cmd_sweep(s: &LearnSettings, data: &Path, out: &Path) -> Result<SweepFile> {
    let degree = s.single_degree()?;
    let (ds, hash) = read_dataset(data)?;
    let sweep = size_sweep(&ds, s.test_size, &s.train_sizes, degree, s.seed, s.ridge)?;
    let report = SweepFile {
        provenance: Provenance::new("sweep", s, Some(hash), &[("split_seed", s.seed)])?,
        largest_gap_train_size: sweep.largest_gap().map(|e| e.train_size),
        sweep,
    };
    let mut text = report.provenance.text();
    let _ = writeln!(text, "degree {degree} test_size {}", s.test_size);
    let _ = writeln!(text, "{:<10} {:>9} {:>9} {:>9} {:>9}", "train_size", "train_r2", "test_r2", "train_mae", "test_mae");
    for e in &report.sweep.entries {
        let _ = writeln!(
            text,
            "{:<10} {:>9.6} {:>9.6} {:>9.6} {:>9.6}",
            e.train_size, e.train.r_squared, e.test.r_squared, e.train.mae, e.test.mae
        );
    }
    if let Some(size) = report.largest_gap_train_size {
        let _ = writeln!(text, "largest train-test r2 gap at train_size {size}");
    }
    write_all_atomic(&[(out.to_path_buf(), text.into_bytes()), (sibling(out, ".json"), to_json(&report)?)])?;
    Ok(report)
}

/// Least-squares line `predicted ≈ slope · actual + intercept`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub method: &'static str,
    pub slope: f64,
    pub intercept: f64,
    pub n: usize,
    /// Set when either coordinate is constant; the slope is then reported as 0.
    pub degenerate: bool,
}

pub fn best_fit_line(actual: &[f64], predicted: &[f64]) -> Result<LineFit> {
    if actual.len() != predicted.len() || actual.is_empty() {
        return Err(Error::Dimension(format!("{} actual vs {} predicted values", actual.len(), predicted.len())));
    }
    let n = actual.len() as f64;
    let (ma, mp) = (actual.iter().sum::<f64>() / n, predicted.iter().sum::<f64>() / n);
    let constant = |v: &[f64]| v.iter().all(|&x| x == v[0]);
    let method = "ordinary least squares of predicted on actual";
    if constant(actual) || constant(predicted) {
        return Ok(LineFit { method, slope: 0.0, intercept: mp, n: actual.len(), degenerate: true });
    }
    let sxx: f64 = actual.iter().map(|a| (a - ma).powi(2)).sum();
    let sxy: f64 = actual.iter().zip(predicted).map(|(a, p)| (a - ma) * (p - mp)).sum();
    let slope = sxy / sxx;
    Ok(LineFit { method, slope, intercept: mp - slope * ma, n: actual.len(), degenerate: false })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScatterReport {
    pub provenance: Provenance,
    pub rows: &'static str,
    pub fit: LineFit,
}

/// Actual-vs-predicted pairs for the test split (or every row with
/// `all_rows`): `out` (CSV `id,actual,predicted`), `out.fit.txt` and `out.fit.json`.
pub fn cmd_scatter(s: &LearnSettings, model_path: &Path, data: &Path, out: &Path, all_rows: bool) -> Result<ScatterReport> {
    let model_text = read_text(model_path)?;
    let (model, names) = parse_model(&model_text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", model_path.display())),
        other => other,
    })?;
    let (ds, hash) = read_dataset(data)?;
    if names != ds.feature_names() {
        return Err(Error::Dimension(format!(
            "model features [{}] do not match dataset features [{}]",
            names.join(","),
            ds.feature_names().join(",")
        )));
    }
    let rows: Dataset = if all_rows { ds } else { train_test_split(&ds, s.train_fraction, s.seed, s.split)?.1 };
    let actual = rows.labels();
    let predicted = model.predict_dataset(&rows)?;
    let fit = best_fit_line(&actual, &predicted)?;

    let mut csv = String::from("id,actual,predicted\n");
    for ((r, a), p) in rows.rows().iter().zip(&actual).zip(&predicted) {
        let _ = writeln!(csv, "{},{},{}", r.id, fmt_f64(*a), fmt_f64(*p));
    }
    #[derive(Serialize)]
    struct Hashed<'a> {
        settings: &'a LearnSettings,
        model_sha256: String,
        all_rows: bool,
    }
    let hashed = Hashed { settings: s, model_sha256: sha256_hex(model_text.as_bytes()), all_rows };
    let report = ScatterReport {
        provenance: Provenance::new("scatter", &hashed, Some(hash), &[("split_seed", s.seed)])?,
        rows: if all_rows { "all" } else { "test split" },
        fit,
    };
    let mut text = report.provenance.text();
    let f = &report.fit;
    let _ = writeln!(text, "rows {} n={}\nfit {}\nslope {}\nintercept {}", report.rows, f.n, f.method, fmt_f64(f.slope), fmt_f64(f.intercept));
    if f.degenerate {
        text += "warning: constant actual or predicted values; slope undefined, reported as 0\n";
    }
    write_all_atomic(&[
        (out.to_path_buf(), csv.into_bytes()),
        (sibling(out, ".fit.txt"), text.into_bytes()),
        (sibling(out, ".fit.json"), to_json(&report)?),
    ])?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KnnReport {
    pub provenance: Provenance,
    pub neighbors: usize,
    pub split: &'static str,
    pub train: MetricsReport,
    pub test: MetricsReport,
}

/// k-nearest-neighbour baseline on the train split: `out` (text) and `out.json`.
pub fn cmd_knn(s: &LearnSettings, data: &Path, out: &Path) -> Result<KnnReport> {
    let (ds, hash) = read_dataset(data)?;
    let (train, test) = train_test_split(&ds, s.train_fraction, s.seed, s.split)?;
    let model = knn_fit(&train, s.neighbors)?;
    let report = KnnReport {
        provenance: Provenance::new("knn", s, Some(hash), &[("split_seed", s.seed)])?,
        neighbors: s.neighbors,
        split: split_label(s.split),
        train: evaluate(&model, &train)?,
        test: evaluate(&model, &test)?,
    };
    let mut text = report.provenance.text();
    let _ = writeln!(text, "model knn k={} euclidean, unscaled features\nsplit {} train_fraction {}", s.neighbors, report.split, s.train_fraction);
    text += &metrics_line("train", &report.train);
    text += &metrics_line("test", &report.test);
    write_all_atomic(&[(out.to_path_buf(), text.into_bytes()), (sibling(out, ".json"), to_json(&report)?)])?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit_examples() {
        let y = [0.1, 0.4, 0.2, 0.9];
        let f = best_fit_line(&y, &y).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-9 && f.intercept.abs() < 1e-9 && !f.degenerate);
        let f = best_fit_line(&y, &[0.3; 4]).unwrap();
        assert_eq!(f.slope, 0.0);
        assert!(f.degenerate);
        assert!((f.intercept - 0.3).abs() < 1e-15);
        assert!(best_fit_line(&[], &[]).is_err());
    }
}
