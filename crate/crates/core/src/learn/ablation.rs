//! Feature ablation: retrain and re-evaluate while removing features from
//! least to most important.

use crate::error::{Error, Result};
use crate::evaluate::{make_folds, metrics, FoldPlan};
use crate::features::Dataset;
use crate::learn::{train, SvmParams};
use crate::par;
use crate::util::{mean, task_seed};

#[derive(Debug, Clone, PartialEq)]
pub struct AblationPoint {
    pub features_remaining: usize,
    pub mean_f: f64,
    /// The feature removed to reach this point; None for the full model.
    pub removed: Option<String>,
}

/// Walk the ablation curve from the full feature set down to a single
/// feature. `importance_order` lists feature indices most important first;
/// each step drops the least important remaining feature, retrains on every
/// fold of `plan`, and records the mean abuse-class F-measure.
pub fn ablation_run(
    data: &Dataset,
    importance_order: &[usize],
    plan: &FoldPlan,
    params: &SvmParams,
) -> Result<Vec<AblationPoint>> {
    let width = data.width();
    let mut sorted = importance_order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..width).collect::<Vec<usize>>() {
        return Err(Error::InvalidParameter(
            "importance_order must be a permutation of the feature indices".into(),
        ));
    }
    let folds = make_folds(data, plan)?;

    let sizes: Vec<usize> = (1..=width).rev().collect();
    par::try_map(&sizes, |&keep| {
        // keep the `keep` most important features, in original column order
        let mut columns: Vec<usize> = importance_order[..keep].to_vec();
        columns.sort_unstable();
        let subset = data.select_columns(&columns);
        let mut scores = Vec::with_capacity(folds.len());
        for (run, (train_idx, test_idx)) in folds.iter().enumerate() {
            // per-run seeds match run_experiment, so the 75-feature point
            // reproduces the full-model score exactly
            let run_params = SvmParams {
                seed: task_seed(params.seed, run as u64),
                ..*params
            };
            let model = train(&subset.select_rows(train_idx), &run_params)?;
            let test = subset.select_rows(test_idx);
            let predicted: Vec<bool> = model
                .predict_dataset(&test)?
                .iter()
                .map(|p| p.label)
                .collect();
            scores.push(metrics(&test.labels(), &predicted)?.f_measure);
        }
        let removed = if keep == width {
            None
        } else {
            Some(data.feature_names[importance_order[keep]].clone())
        };
        Ok(AblationPoint {
            features_remaining: keep,
            mean_f: mean(&scores),
            removed,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::tests::dataset_from;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single_signal_dataset(n: usize, width: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..n)
            .map(|_| {
                let mut values: Vec<f64> =
                    (0..width).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
                let label = values[0] > 0.0;
                values[0] *= 5.0;
                (values, label)
            })
            .collect();
        dataset_from(rows)
    }

    #[test]
    fn rejects_non_permutation_order() {
        let data = single_signal_dataset(30, 3, 1);
        let plan = FoldPlan {
            n_runs: 2,
            train_fraction: 0.7,
            seed: 1,
        };
        let err = ablation_run(&data, &[0, 0, 2], &plan, &Default::default());
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn curve_spans_full_width_down_to_one() {
        let data = single_signal_dataset(40, 4, 2);
        let plan = FoldPlan {
            n_runs: 2,
            train_fraction: 0.7,
            seed: 3,
        };
        let curve = ablation_run(&data, &[0, 1, 2, 3], &plan, &Default::default()).unwrap();
        assert_eq!(curve.len(), 4);
        assert_eq!(curve[0].features_remaining, 4);
        assert_eq!(curve[0].removed, None);
        assert_eq!(curve[3].features_remaining, 1);
        assert_eq!(curve[3].removed.as_deref(), Some("f1"));
    }

    #[test]
    fn full_width_point_equals_the_experiment_score() {
        let data = single_signal_dataset(50, 3, 9);
        let plan = FoldPlan {
            n_runs: 3,
            train_fraction: 0.7,
            seed: 11,
        };
        let params = Default::default();
        let curve = ablation_run(&data, &[0, 1, 2], &plan, &params).unwrap();
        let report = crate::evaluate::run_experiment(&data, &plan, &params).unwrap();
        assert_eq!(curve[0].mean_f, report.mean.f_measure);
    }

    #[test]
    fn flat_until_the_informative_feature_goes() {
        let data = single_signal_dataset(80, 5, 4);
        let plan = FoldPlan {
            n_runs: 3,
            train_fraction: 0.7,
            seed: 5,
        };
        // feature 0 carries the label; rank it first so it is removed last
        let curve = ablation_run(&data, &[0, 1, 2, 3, 4], &plan, &Default::default()).unwrap();
        let full = curve[0].mean_f;
        assert!(full > 0.85, "full model F {full}");
        let at_one = curve.last().unwrap();
        assert_eq!(at_one.features_remaining, 1);
        assert!(
            at_one.mean_f > full - 0.1,
            "signal-only F {}",
            at_one.mean_f
        );
    }
}
