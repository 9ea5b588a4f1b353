//! Binary margin classifier: standardization, RBF-kernel SVM trained by
//! SMO, Platt-calibrated probabilities, permutation importance, and feature
//! ablation. Self-contained; no external ML runtime.

mod ablation;
mod importance;
mod platt;
mod scaler;
mod smo;

pub use ablation::{ablation_run, AblationPoint};
pub use importance::{fold_importance, permutation_importance, ImportanceReport};
pub use platt::PlattSigmoid;
pub use scaler::Scaler;

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::Dataset;
use crate::util::task_seed;

/// Kernel width selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gamma {
    /// 1 / (n_features * mean feature variance), computed on the scaled
    /// training matrix.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub gamma: Gamma,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            gamma: Gamma::Auto,
            seed: 7,
        }
    }
}

const KKT_TOLERANCE: f64 = 1e-3;

/// A trained, calibrated RBF SVM. The model file is self-describing JSON;
/// decision values are bit-reproducible after a save/load round trip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub feature_names: Vec<String>,
    pub scaler: Scaler,
    pub c: f64,
    pub gamma: f64,
    /// Support vectors in scaled feature space.
    pub support_vectors: Vec<Vec<f64>>,
    /// alpha_i * y_i per support vector; bounded by C in absolute value.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub platt: PlattSigmoid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: bool,
    pub probability: f64,
    pub decision_value: f64,
}

impl SvmModel {
    /// Decision value of a raw (unscaled) feature row.
    pub fn decision(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.feature_names.len() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_names.len(),
                got: row.len(),
            });
        }
        let scaled = self.scaler.transform_row(row);
        let mut sum = self.bias;
        for (sv, coef) in self.support_vectors.iter().zip(&self.dual_coefs) {
            sum += coef * smo::rbf_kernel(sv, &scaled, self.gamma);
        }
        Ok(sum)
    }

    pub fn predict(&self, row: &[f64]) -> Result<Prediction> {
        self.predict_with_threshold(row, 0.5)
    }

    pub fn predict_with_threshold(&self, row: &[f64], threshold: f64) -> Result<Prediction> {
        let decision_value = self.decision(row)?;
        let probability = self.platt.probability(decision_value);
        Ok(Prediction {
            label: probability >= threshold,
            probability,
            decision_value,
        })
    }

    /// Predict every row of a dataset, refusing if the header does not match
    /// the names the model was trained with.
    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<Prediction>> {
        if data.feature_names != self.feature_names {
            return Err(Error::FeatureNameMismatch(format!(
                "model was trained on {} features, dataset has {}",
                self.feature_names.len(),
                data.feature_names.len()
            )));
        }
        data.rows.iter().map(|r| self.predict(&r.values)).collect()
    }

    pub fn save<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, self)?;
        Ok(())
    }

    pub fn load<R: Read>(reader: R) -> Result<SvmModel> {
        Ok(serde_json::from_reader(reader)?)
    }
}

/// Train the calibrated SVM on a dataset.
///
/// The scaler is fit on the training rows, gamma is resolved against the
/// scaled matrix, Platt parameters are fit on out-of-sample decision values
/// from an internal stratified 80/20 split, and the final SVM is trained on
/// all rows. Sub-seeds: `seed` for the split, `seed+1` for the calibration
/// solver, `seed+2` for the final solver.
pub fn train(data: &Dataset, params: &SvmParams) -> Result<SvmModel> {
    if data.len() < 2 {
        return Err(Error::Training(format!(
            "need at least 2 training rows, got {}",
            data.len()
        )));
    }
    let labels = data.labels();
    if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
        return Err(Error::Training(
            "training set contains a single class".into(),
        ));
    }
    if params.c <= 0.0 || params.c.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "C must be positive, got {}",
            params.c
        )));
    }

    let raw: Vec<Vec<f64>> = data.rows.iter().map(|r| r.values.clone()).collect();
    let scaler = Scaler::fit(&raw);
    let x = scaler.transform_rows(&raw);
    let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
    let gamma = resolve_gamma(params.gamma, &x)?;

    // Calibration on held-out decision values.
    let (fit_idx, cal_idx) = calibration_split(&labels, params.seed);
    let platt = if cal_idx.is_empty() {
        // degenerate split (a class with a single row): calibrate in-sample
        let solution = solve_subset(&x, &y, &fit_idx, params, gamma, task_seed(params.seed, 1));
        let decisions: Vec<f64> = fit_idx.iter().map(|&i| solution.decision(&x[i])).collect();
        let cal_labels: Vec<bool> = fit_idx.iter().map(|&i| labels[i]).collect();
        platt::fit_sigmoid(&decisions, &cal_labels)
    } else {
        let solution = solve_subset(&x, &y, &fit_idx, params, gamma, task_seed(params.seed, 1));
        let decisions: Vec<f64> = cal_idx.iter().map(|&i| solution.decision(&x[i])).collect();
        let cal_labels: Vec<bool> = cal_idx.iter().map(|&i| labels[i]).collect();
        platt::fit_sigmoid(&decisions, &cal_labels)
    };

    // Final model on the full training set.
    let all: Vec<usize> = (0..data.len()).collect();
    let solution = solve_subset(&x, &y, &all, params, gamma, task_seed(params.seed, 2));

    let mut support_vectors = Vec::new();
    let mut dual_coefs = Vec::new();
    for (i, (&alpha, &label)) in solution.alphas.iter().zip(solution.y.iter()).enumerate() {
        if alpha > 0.0 {
            support_vectors.push(solution.x[i].clone());
            dual_coefs.push(alpha * label);
        }
    }

    Ok(SvmModel {
        feature_names: data.feature_names.clone(),
        scaler,
        c: params.c,
        gamma,
        support_vectors,
        dual_coefs,
        bias: solution.bias,
        platt,
    })
}

fn resolve_gamma(gamma: Gamma, scaled: &[Vec<f64>]) -> Result<f64> {
    match gamma {
        Gamma::Fixed(g) if g > 0.0 => Ok(g),
        Gamma::Fixed(g) => Err(Error::InvalidParameter(format!(
            "gamma must be positive, got {g}"
        ))),
        Gamma::Auto => {
            let d = scaled.first().map_or(0, Vec::len);
            if d == 0 {
                return Err(Error::Training("training rows have no features".into()));
            }
            let n = scaled.len() as f64;
            let mut mean_var = 0.0;
            for col in 0..d {
                let mean: f64 = scaled.iter().map(|r| r[col]).sum::<f64>() / n;
                let var: f64 = scaled
                    .iter()
                    .map(|r| (r[col] - mean) * (r[col] - mean))
                    .sum::<f64>()
                    / n;
                mean_var += var;
            }
            mean_var /= d as f64;
            if mean_var > 0.0 {
                Ok(1.0 / (d as f64 * mean_var))
            } else {
                Ok(1.0 / d as f64)
            }
        }
    }
}

/// Stratified 80/20 split of row indices (fit part, calibration part).
/// Classes with a single row stay entirely in the fit part.
fn calibration_split(labels: &[bool], seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fit = Vec::new();
    let mut cal = Vec::new();
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        let n = idx.len();
        let hold = if n >= 2 {
            ((n as f64 * 0.2).round() as usize).clamp(1, n - 1)
        } else {
            0
        };
        cal.extend_from_slice(&idx[..hold]);
        fit.extend_from_slice(&idx[hold..]);
    }
    fit.sort_unstable();
    cal.sort_unstable();
    (fit, cal)
}

struct SubsetSolution {
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    alphas: Vec<f64>,
    bias: f64,
    gamma: f64,
}

impl SubsetSolution {
    fn decision(&self, row: &[f64]) -> f64 {
        let mut sum = self.bias;
        for i in 0..self.x.len() {
            if self.alphas[i] > 0.0 {
                sum += self.alphas[i] * self.y[i] * smo::rbf_kernel(&self.x[i], row, self.gamma);
            }
        }
        sum
    }
}

fn solve_subset(
    x: &[Vec<f64>],
    y: &[f64],
    indices: &[usize],
    params: &SvmParams,
    gamma: f64,
    seed: u64,
) -> SubsetSolution {
    let sx: Vec<Vec<f64>> = indices.iter().map(|&i| x[i].clone()).collect();
    let sy: Vec<f64> = indices.iter().map(|&i| y[i]).collect();
    let problem = smo::SmoProblem {
        x: &sx,
        y: &sy,
        c: params.c,
        gamma,
        tol: KKT_TOLERANCE,
        seed,
    };
    let solution = smo::solve(&problem);
    SubsetSolution {
        x: sx,
        y: sy,
        alphas: solution.alphas,
        bias: solution.bias,
        gamma,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureVector;

    pub(crate) fn dataset_from(rows: Vec<(Vec<f64>, bool)>) -> Dataset {
        let width = rows[0].0.len();
        Dataset {
            feature_names: (0..width).map(|i| format!("f{i}")).collect(),
            rows: rows
                .into_iter()
                .enumerate()
                .map(|(i, (values, label))| FeatureVector {
                    message_id: format!("r{i}"),
                    label,
                    values,
                })
                .collect(),
        }
    }

    pub(crate) fn blobs(n_per_class: usize, separation: f64, seed: u64) -> Dataset {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        for i in 0..(2 * n_per_class) {
            let positive = i % 2 == 0;
            let center = if positive {
                separation / 2.0
            } else {
                -separation / 2.0
            };
            let values = vec![
                center + rng.gen::<f64>() - 0.5,
                center + rng.gen::<f64>() - 0.5,
            ];
            rows.push((values, positive));
        }
        dataset_from(rows)
    }

    #[test]
    fn separable_blobs_reach_full_training_accuracy() {
        let data = blobs(20, 10.0, 5);
        let model = train(&data, &SvmParams::default()).unwrap();
        let preds = model.predict_dataset(&data).unwrap();
        for (p, row) in preds.iter().zip(&data.rows) {
            assert_eq!(p.label, row.label);
        }
    }

    #[test]
    fn xor_pattern_is_learned() {
        let data = dataset_from(vec![
            (vec![0.0, 0.0], false),
            (vec![1.0, 1.0], false),
            (vec![0.0, 1.0], true),
            (vec![1.0, 0.0], true),
        ]);
        let params = SvmParams {
            c: 10.0,
            gamma: Gamma::Fixed(3.0),
            seed: 7,
        };
        let model = train(&data, &params).unwrap();
        // 4 points leave no room for a meaningful calibration holdout, so
        // check the decision function directly.
        for row in &data.rows {
            let d = model.decision(&row.values).unwrap();
            assert_eq!(d > 0.0, row.label, "row {:?}: decision {d}", row.values);
        }
    }

    #[test]
    fn duplicated_rows_keep_the_same_sign_pattern() {
        let data = blobs(15, 6.0, 11);
        let doubled = {
            let mut rows: Vec<(Vec<f64>, bool)> = data
                .rows
                .iter()
                .map(|r| (r.values.clone(), r.label))
                .collect();
            let copy = rows.clone();
            rows.extend(copy);
            dataset_from(rows)
        };
        let m1 = train(&data, &SvmParams::default()).unwrap();
        let m2 = train(&doubled, &SvmParams::default()).unwrap();
        for gx in -6..=6 {
            for gy in -6..=6 {
                let probe = vec![gx as f64, gy as f64];
                let d1 = m1.decision(&probe).unwrap();
                let d2 = m2.decision(&probe).unwrap();
                assert_eq!(d1 > 0.0, d2 > 0.0, "probe {probe:?}: {d1} vs {d2}");
            }
        }
    }

    #[test]
    fn single_class_training_fails() {
        let data = dataset_from(vec![(vec![0.0], true), (vec![1.0], true)]);
        assert!(matches!(
            train(&data, &SvmParams::default()),
            Err(Error::Training(_))
        ));
    }

    #[test]
    fn probability_is_monotone_in_decision_value() {
        let data = blobs(25, 4.0, 3);
        let model = train(&data, &SvmParams::default()).unwrap();
        let mut pairs: Vec<(f64, f64)> = data
            .rows
            .iter()
            .map(|r| {
                let p = model.predict(&r.values).unwrap();
                (p.decision_value, p.probability)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in pairs.windows(2) {
            assert!(w[1].1 >= w[0].1, "{w:?}");
        }
    }

    #[test]
    fn far_probe_gets_extreme_probability() {
        // Plenty of calibration rows so the Platt targets approach 0/1, and
        // probes deep inside each blob, far from the separating boundary.
        let data = blobs(150, 10.0, 17);
        let model = train(&data, &SvmParams::default()).unwrap();
        let hot = model.predict(&[5.0, 5.0]).unwrap();
        let cold = model.predict(&[-5.0, -5.0]).unwrap();
        assert!(hot.probability > 0.95, "{}", hot.probability);
        assert!(cold.probability < 0.05, "{}", cold.probability);
    }

    #[test]
    fn threshold_zero_labels_everything_positive() {
        let data = blobs(10, 2.0, 23);
        let model = train(&data, &SvmParams::default()).unwrap();
        for row in &data.rows {
            let p = model.predict_with_threshold(&row.values, 0.0).unwrap();
            assert!(p.label);
        }
    }

    #[test]
    fn dual_coefficients_are_bounded_by_c() {
        let data = blobs(20, 1.0, 29);
        let params = SvmParams {
            c: 0.7,
            ..Default::default()
        };
        let model = train(&data, &params).unwrap();
        assert!(!model.support_vectors.is_empty());
        for &coef in &model.dual_coefs {
            assert!(coef.abs() <= 0.7 + 1e-12);
        }
    }

    #[test]
    fn model_json_roundtrip_reproduces_decisions_exactly() {
        use rand::Rng;
        let data = blobs(20, 3.0, 31);
        let model = train(&data, &SvmParams::default()).unwrap();
        let mut buf = Vec::new();
        model.save(&mut buf).unwrap();
        let loaded = SvmModel::load(&buf[..]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let probe = vec![rng.gen::<f64>() * 8.0 - 4.0, rng.gen::<f64>() * 8.0 - 4.0];
            let a = model.decision(&probe).unwrap();
            let b = loaded.decision(&probe).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn column_scaling_is_absorbed_by_the_scaler() {
        // Power-of-two scaling commutes exactly with every float operation
        // in the scaler, so the standardized matrix and everything after it
        // are bit-identical.
        let data = blobs(20, 5.0, 37);
        let mut scaled_data = data.clone();
        for row in &mut scaled_data.rows {
            row.values[0] *= 1024.0;
        }
        let m1 = train(&data, &SvmParams::default()).unwrap();
        let m2 = train(&scaled_data, &SvmParams::default()).unwrap();
        for row in &data.rows {
            let mut scaled_row = row.values.clone();
            scaled_row[0] *= 1024.0;
            let p1 = m1.predict(&row.values).unwrap();
            let p2 = m2.predict(&scaled_row).unwrap();
            assert_eq!(p1.probability, p2.probability);
            assert_eq!(p1.decision_value, p2.decision_value);
        }
    }

    #[test]
    fn arbitrary_column_scaling_barely_moves_predictions() {
        // Non-dyadic constants perturb the standardized matrix in the last
        // ulp; the SMO stopping rule (KKT tolerance 1e-3) then pins the dual
        // solution only to that order, so exact equality cannot be expected.
        let data = blobs(20, 5.0, 37);
        let mut scaled_data = data.clone();
        for row in &mut scaled_data.rows {
            row.values[1] *= 3.7;
        }
        let m1 = train(&data, &SvmParams::default()).unwrap();
        let m2 = train(&scaled_data, &SvmParams::default()).unwrap();
        for row in &data.rows {
            let mut scaled_row = row.values.clone();
            scaled_row[1] *= 3.7;
            let p1 = m1.predict(&row.values).unwrap();
            let p2 = m2.predict(&scaled_row).unwrap();
            assert!((p1.probability - p2.probability).abs() < 5e-3);
            assert_eq!(p1.label, p2.label);
        }
    }

    #[test]
    fn training_is_deterministic_given_seed() {
        let data = blobs(15, 2.0, 41);
        let m1 = train(&data, &SvmParams::default()).unwrap();
        let m2 = train(&data, &SvmParams::default()).unwrap();
        assert_eq!(m1, m2);
    }

    #[test]
    fn predict_dataset_refuses_mismatched_names() {
        let data = blobs(10, 5.0, 43);
        let model = train(&data, &SvmParams::default()).unwrap();
        let mut other = data.clone();
        other.feature_names[0] = "renamed".into();
        assert!(matches!(
            model.predict_dataset(&other),
            Err(Error::FeatureNameMismatch(_))
        ));
    }
}
