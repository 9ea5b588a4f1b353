//! Permutation feature importance: the drop in abuse-class F-measure when
//! one feature column is shuffled within the validation rows.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evaluate::metrics;
use crate::features::Dataset;
use crate::learn::SvmModel;
use crate::par;
use crate::util::{mean, task_seed};

#[derive(Debug, Clone)]
pub struct ImportanceReport {
    pub feature_names: Vec<String>,
    /// Mean F-measure drop per feature; may be negative.
    pub raw: Vec<f64>,
    pub baseline_f: f64,
}

impl ImportanceReport {
    /// Feature indices ordered most important first (ties broken by index).
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.raw.len()).collect();
        order.sort_by(|&a, &b| {
            self.raw[b]
                .partial_cmp(&self.raw[a])
                .unwrap()
                .then(a.cmp(&b))
        });
        order
    }

    /// Scores for ranked display; negative drops clamp to 0 here only, the
    /// raw values are retained.
    pub fn display_scores(&self) -> Vec<f64> {
        self.raw.iter().map(|&v| v.max(0.0)).collect()
    }
}

/// Importance averaged over the folds of a plan, all on the training side:
/// for each fold, a model is fit on 75% of the training rows and column
/// drops are measured on the held-out 25%, where the model is not
/// saturated. Fold `r` draws sub-seed `plan.seed + 2*n_runs + r`.
pub fn fold_importance(
    data: &Dataset,
    plan: &crate::evaluate::FoldPlan,
    params: &crate::learn::SvmParams,
    repeats: usize,
) -> Result<ImportanceReport> {
    let folds = crate::evaluate::make_folds(data, plan)?;
    let mut sums = vec![0.0; data.width()];
    let mut baseline_sum = 0.0;
    for (run, (train_idx, _)) in folds.iter().enumerate() {
        let run_params = crate::learn::SvmParams {
            seed: task_seed(params.seed, run as u64),
            ..*params
        };
        let train_rows = data.select_rows(train_idx);
        let importance_seed = task_seed(plan.seed, (2 * plan.n_runs + run) as u64);
        let (fit_idx, val_idx) =
            crate::evaluate::stratified_split(&train_rows.labels(), 0.75, importance_seed);
        let model = crate::learn::train(&train_rows.select_rows(&fit_idx), &run_params)?;
        let report = permutation_importance(
            &model,
            &train_rows.select_rows(&val_idx),
            repeats,
            importance_seed,
        )?;
        for (sum, raw) in sums.iter_mut().zip(&report.raw) {
            *sum += raw;
        }
        baseline_sum += report.baseline_f;
    }
    let n = folds.len() as f64;
    Ok(ImportanceReport {
        feature_names: data.feature_names.clone(),
        raw: sums.into_iter().map(|s| s / n).collect(),
        baseline_f: baseline_sum / n,
    })
}

/// Permute each feature column `repeats` times within `validation` and
/// average the F-measure drop. Task seeds follow `seed + feature * repeats
/// + repeat`.
pub fn permutation_importance(
    model: &SvmModel,
    validation: &Dataset,
    repeats: usize,
    seed: u64,
) -> Result<ImportanceReport> {
    if repeats == 0 {
        return Err(Error::InvalidParameter(
            "importance repeats must be >= 1".into(),
        ));
    }
    if validation.is_empty() {
        return Err(Error::Protocol(
            "importance needs a non-empty validation set".into(),
        ));
    }
    let labels = validation.labels();
    let baseline_preds = model.predict_dataset(validation)?;
    let baseline_labels: Vec<bool> = baseline_preds.iter().map(|p| p.label).collect();
    let baseline_f = metrics(&labels, &baseline_labels)?.f_measure;

    let columns: Vec<usize> = (0..validation.width()).collect();
    let raw = par::try_map(&columns, |&col| {
        let mut drops = Vec::with_capacity(repeats);
        for rep in 0..repeats {
            let mut rng = ChaCha8Rng::seed_from_u64(task_seed(seed, (col * repeats + rep) as u64));
            let mut perm: Vec<usize> = (0..validation.len()).collect();
            perm.shuffle(&mut rng);
            let mut predicted = Vec::with_capacity(validation.len());
            for (i, row) in validation.rows.iter().enumerate() {
                let mut values = row.values.clone();
                values[col] = validation.rows[perm[i]].values[col];
                predicted.push(model.predict(&values)?.label);
            }
            let f = metrics(&labels, &predicted)?.f_measure;
            drops.push(baseline_f - f);
        }
        Ok(mean(&drops))
    })?;

    Ok(ImportanceReport {
        feature_names: validation.feature_names.clone(),
        raw,
        baseline_f,
    })
}
