//! Evaluation protocol: repeated stratified random train/test splits,
//! abuse-class metrics, PR-curve threshold sweeps, a uniform-random
//! baseline, and CSV report emission.
//!
//! The protocol runs `n_runs` independent stratified random splits at
//! `train_fraction` (Monte-Carlo cross-validation): 10 runs at 70/30 by
//! default. Every fitted artifact (scaler, SVM, calibration) sees training
//! rows only.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::Dataset;
use crate::learn::{train, SvmModel, SvmParams};
use crate::par;
use crate::util::{fmt_f64, mean, task_seed};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldPlan {
    pub n_runs: usize,
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for FoldPlan {
    fn default() -> Self {
        FoldPlan {
            n_runs: 10,
            train_fraction: 0.7,
            seed: 7,
        }
    }
}

impl FoldPlan {
    pub fn protocol_description(&self) -> String {
        format!(
            "{} repeated stratified random {:.0}/{:.0} train/test splits (Monte-Carlo cross-validation)",
            self.n_runs,
            self.train_fraction * 100.0,
            (1.0 - self.train_fraction) * 100.0
        )
    }
}

/// Independent stratified splits; run r draws from sub-seed `seed + r`.
/// Train and test are disjoint, cover the dataset, and the train part keeps
/// at least one row of each class.
pub fn make_folds(data: &Dataset, plan: &FoldPlan) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if data.len() < 10 {
        return Err(Error::Protocol(format!(
            "need at least 10 rows, got {}",
            data.len()
        )));
    }
    if !(plan.train_fraction > 0.0 && plan.train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train_fraction must be in (0,1), got {}",
            plan.train_fraction
        )));
    }
    if plan.n_runs == 0 {
        return Err(Error::InvalidParameter("n_runs must be >= 1".into()));
    }
    let labels = data.labels();
    let positives: Vec<usize> = (0..data.len()).filter(|&i| labels[i]).collect();
    let negatives: Vec<usize> = (0..data.len()).filter(|&i| !labels[i]).collect();
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::Protocol("both classes must be present".into()));
    }
    let mut folds = Vec::with_capacity(plan.n_runs);
    for run in 0..plan.n_runs {
        let mut rng = ChaCha8Rng::seed_from_u64(task_seed(plan.seed, run as u64));
        let mut train_idx = Vec::new();
        let mut test_idx = Vec::new();
        for class in [&positives, &negatives] {
            let mut idx = class.clone();
            idx.shuffle(&mut rng);
            let take =
                ((idx.len() as f64 * plan.train_fraction).round() as usize).clamp(1, idx.len());
            train_idx.extend_from_slice(&idx[..take]);
            test_idx.extend_from_slice(&idx[take..]);
        }
        if test_idx.is_empty() {
            return Err(Error::Protocol(
                "train_fraction leaves an empty test set".into(),
            ));
        }
        train_idx.sort_unstable();
        test_idx.sort_unstable();
        folds.push((train_idx, test_idx));
    }
    Ok(folds)
}

/// One stratified random split of row indices into (kept, held_out) at
/// `fraction` kept per class (at least one row of each class stays on each
/// side when a class has two or more rows).
pub fn stratified_split(labels: &[bool], fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kept = Vec::new();
    let mut held = Vec::new();
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        let take = if idx.len() >= 2 {
            ((idx.len() as f64 * fraction).round() as usize).clamp(1, idx.len() - 1)
        } else {
            idx.len()
        };
        kept.extend_from_slice(&idx[..take]);
        held.extend_from_slice(&idx[take..]);
    }
    kept.sort_unstable();
    held.sort_unstable();
    (kept, held)
}

/// Confusion counts and abuse-class precision/recall/F; zero denominators
/// yield zero by convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

pub fn metrics(labels: &[bool], predictions: &[bool]) -> Result<Metrics> {
    if labels.len() != predictions.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: predictions.len(),
        });
    }
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    let mut tn = 0;
    for (&l, &p) in labels.iter().zip(predictions) {
        match (l, p) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let precision = if tp + fp > 0 {
        tp as f64 / (tp + fp) as f64
    } else {
        0.0
    };
    let recall = if tp + fn_ > 0 {
        tp as f64 / (tp + fn_) as f64
    } else {
        0.0
    };
    let f_measure = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(Metrics {
        tp,
        fp,
        fn_,
        tn,
        precision,
        recall,
        f_measure,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Sweep `n_thresholds` uniform probability thresholds over [0, 1] on the
/// calibrated probabilities.
pub fn pr_curve(model: &SvmModel, test: &Dataset, n_thresholds: usize) -> Result<Vec<PrPoint>> {
    if test.is_empty() {
        return Err(Error::Protocol(
            "PR curve needs a non-empty test set".into(),
        ));
    }
    if n_thresholds < 2 {
        return Err(Error::InvalidParameter("need at least 2 thresholds".into()));
    }
    let labels = test.labels();
    let probabilities: Vec<f64> = model
        .predict_dataset(test)?
        .iter()
        .map(|p| p.probability)
        .collect();
    (0..n_thresholds)
        .map(|i| {
            let threshold = i as f64 / (n_thresholds - 1) as f64;
            let predicted: Vec<bool> = probabilities.iter().map(|&p| p >= threshold).collect();
            let m = metrics(&labels, &predicted)?;
            Ok(PrPoint {
                threshold,
                precision: m.precision,
                recall: m.recall,
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub metrics: Metrics,
    pub baseline: Metrics,
    pub pr: Vec<PrPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanScores {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub protocol: String,
    pub runs: Vec<RunResult>,
    pub mean: MeanScores,
    pub baseline_mean: MeanScores,
    /// Per-threshold average of the per-run PR curves.
    pub mean_pr: Vec<PrPoint>,
}

pub const PR_THRESHOLDS: usize = 101;

/// Train and evaluate one model per fold, plus a uniform-random-score
/// baseline through the same metric path (baseline run r uses sub-seed
/// `plan.seed + n_runs + r`). Per-run SVM seeds are `params.seed + run`.
pub fn run_experiment(
    data: &Dataset,
    plan: &FoldPlan,
    params: &SvmParams,
) -> Result<ExperimentReport> {
    let folds = make_folds(data, plan)?;
    let runs: Vec<RunResult> = par::try_map_indexed(&folds, |run, (train_idx, test_idx)| {
        let run_params = SvmParams {
            seed: task_seed(params.seed, run as u64),
            ..*params
        };
        let model = train(&data.select_rows(train_idx), &run_params)?;
        let test = data.select_rows(test_idx);
        let labels = test.labels();
        let predicted: Vec<bool> = model
            .predict_dataset(&test)?
            .iter()
            .map(|p| p.label)
            .collect();
        let run_metrics = metrics(&labels, &predicted)?;

        let mut rng = ChaCha8Rng::seed_from_u64(task_seed(plan.seed, (plan.n_runs + run) as u64));
        let random_predicted: Vec<bool> = labels.iter().map(|_| rng.gen::<f64>() >= 0.5).collect();
        let baseline = metrics(&labels, &random_predicted)?;

        let pr = pr_curve(&model, &test, PR_THRESHOLDS)?;
        Ok(RunResult {
            metrics: run_metrics,
            baseline,
            pr,
        })
    })?;

    let mean_of = |f: &dyn Fn(&RunResult) -> &Metrics| MeanScores {
        precision: mean(&runs.iter().map(|r| f(r).precision).collect::<Vec<_>>()),
        recall: mean(&runs.iter().map(|r| f(r).recall).collect::<Vec<_>>()),
        f_measure: mean(&runs.iter().map(|r| f(r).f_measure).collect::<Vec<_>>()),
    };
    let mean_scores = mean_of(&|r| &r.metrics);
    let baseline_mean = mean_of(&|r| &r.baseline);

    let mean_pr = (0..PR_THRESHOLDS)
        .map(|i| PrPoint {
            threshold: runs[0].pr[i].threshold,
            precision: mean(&runs.iter().map(|r| r.pr[i].precision).collect::<Vec<_>>()),
            recall: mean(&runs.iter().map(|r| r.pr[i].recall).collect::<Vec<_>>()),
        })
        .collect();

    Ok(ExperimentReport {
        protocol: plan.protocol_description(),
        runs,
        mean: mean_scores,
        baseline_mean,
        mean_pr,
    })
}

/// metrics.csv: per-run and mean rows for the model and the random
/// baseline. The leading comment line states the split protocol.
pub fn write_metrics_csv<W: Write>(report: &ExperimentReport, mut writer: W) -> Result<()> {
    writeln!(writer, "# protocol: {}", report.protocol)?;
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "run",
        "kind",
        "precision",
        "recall",
        "f_measure",
        "tp",
        "fp",
        "fn",
        "tn",
    ])?;
    for (i, run) in report.runs.iter().enumerate() {
        for (kind, m) in [("model", &run.metrics), ("baseline", &run.baseline)] {
            w.write_record([
                i.to_string(),
                kind.to_string(),
                fmt_f64(m.precision),
                fmt_f64(m.recall),
                fmt_f64(m.f_measure),
                m.tp.to_string(),
                m.fp.to_string(),
                m.fn_.to_string(),
                m.tn.to_string(),
            ])?;
        }
    }
    for (kind, m) in [("model", &report.mean), ("baseline", &report.baseline_mean)] {
        w.write_record([
            "mean".to_string(),
            kind.to_string(),
            fmt_f64(m.precision),
            fmt_f64(m.recall),
            fmt_f64(m.f_measure),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// pr_curve.csv: per-run sweeps plus the averaged curve (run = "mean").
pub fn write_pr_csv<W: Write>(report: &ExperimentReport, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["run", "threshold", "precision", "recall"])?;
    for (i, run) in report.runs.iter().enumerate() {
        for p in &run.pr {
            w.write_record([
                i.to_string(),
                fmt_f64(p.threshold),
                fmt_f64(p.precision),
                fmt_f64(p.recall),
            ])?;
        }
    }
    for p in &report.mean_pr {
        w.write_record([
            "mean".to_string(),
            fmt_f64(p.threshold),
            fmt_f64(p.precision),
            fmt_f64(p.recall),
        ])?;
    }
    w.flush()?;
    Ok(())
}
