//! Platt scaling: fit a sigmoid over decision values so the classifier
//! emits calibrated probabilities.

/// Sigmoid parameters such that P(abusive | f) = 1 / (1 + exp(-(a*f + b))).
/// With sane training data `a` is positive, making the probability monotone
/// non-decreasing in the decision value.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PlattSigmoid {
    pub a: f64,
    pub b: f64,
}

impl PlattSigmoid {
    pub fn probability(&self, decision: f64) -> f64 {
        let z = self.a * decision + self.b;
        // numerically stable logistic
        if z >= 0.0 {
            1.0 / (1.0 + (-z).exp())
        } else {
            let e = z.exp();
            e / (1.0 + e)
        }
    }
}

/// Fit the sigmoid by regularized maximum likelihood (Newton's method with
/// backtracking, after Lin, Lin & Weng 2007). Decision values should come
/// from rows not used to fit the classifier itself.
pub fn fit_sigmoid(decisions: &[f64], labels: &[bool]) -> PlattSigmoid {
    let n = decisions.len();
    let prior1 = labels.iter().filter(|&&l| l).count() as f64;
    let prior0 = n as f64 - prior1;

    let max_iter = 100;
    let min_step = 1e-10;
    let sigma = 1e-12;
    let eps = 1e-5;

    let hi_target = (prior1 + 1.0) / (prior1 + 2.0);
    let lo_target = 1.0 / (prior0 + 2.0);
    let targets: Vec<f64> = labels
        .iter()
        .map(|&l| if l { hi_target } else { lo_target })
        .collect();

    // Parametrized as p = 1/(1+exp(a*f+b)); orientation is flipped on return.
    let mut a = 0.0_f64;
    let mut b = ((prior0 + 1.0) / (prior1 + 1.0)).ln();

    let objective = |a: f64, b: f64| -> f64 {
        decisions
            .iter()
            .zip(&targets)
            .map(|(&f, &t)| {
                let z = a * f + b;
                if z >= 0.0 {
                    t * z + (1.0 + (-z).exp()).ln()
                } else {
                    (t - 1.0) * z + (1.0 + z.exp()).ln()
                }
            })
            .sum()
    };
    let mut fval = objective(a, b);

    for _ in 0..max_iter {
        let mut h11 = sigma;
        let mut h22 = sigma;
        let mut h21 = 0.0;
        let mut g1 = 0.0;
        let mut g2 = 0.0;
        for (&f, &t) in decisions.iter().zip(&targets) {
            let z = a * f + b;
            let (p, q) = if z >= 0.0 {
                let e = (-z).exp();
                (e / (1.0 + e), 1.0 / (1.0 + e))
            } else {
                let e = z.exp();
                (1.0 / (1.0 + e), e / (1.0 + e))
            };
            let d2 = p * q;
            h11 += f * f * d2;
            h22 += d2;
            h21 += f * d2;
            let d1 = t - p;
            g1 += f * d1;
            g2 += d1;
        }
        if g1.abs() < eps && g2.abs() < eps {
            break;
        }
        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let gd = g1 * da + g2 * db;

        let mut step = 1.0;
        while step >= min_step {
            let (na, nb) = (a + step * da, b + step * db);
            let nf = objective(na, nb);
            if nf < fval + 1e-4 * step * gd {
                a = na;
                b = nb;
                fval = nf;
                break;
            }
            step /= 2.0;
        }
        if step < min_step {
            break;
        }
    }
    // Flip so probability = sigmoid(a*f + b) with the standard logistic.
    PlattSigmoid { a: -a, b: -b }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_decisions_fit_a_steep_positive_slope() {
        let decisions = vec![-2.0, -1.5, -1.0, -0.9, 0.9, 1.0, 1.5, 2.0];
        let labels = vec![false, false, false, false, true, true, true, true];
        let s = fit_sigmoid(&decisions, &labels);
        assert!(s.a > 0.0, "slope {}", s.a);
        assert!(s.probability(2.0) > 0.9);
        assert!(s.probability(-2.0) < 0.1);
    }

    #[test]
    fn probability_is_monotone_in_decision_for_positive_slope() {
        let decisions = vec![-1.0, -0.5, 0.4, 1.1];
        let labels = vec![false, false, true, true];
        let s = fit_sigmoid(&decisions, &labels);
        let mut prev = 0.0;
        for i in -20..=20 {
            let p = s.probability(i as f64 / 5.0);
            assert!(p >= prev);
            prev = p;
        }
    }

    #[test]
    fn balanced_uninformative_decisions_give_half() {
        let decisions = vec![0.0; 10];
        let labels: Vec<bool> = (0..10).map(|i| i % 2 == 0).collect();
        let s = fit_sigmoid(&decisions, &labels);
        assert!((s.probability(0.0) - 0.5).abs() < 0.05);
    }
}
