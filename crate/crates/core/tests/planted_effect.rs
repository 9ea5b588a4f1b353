//! Statistical checks of the planted abuse dynamics at the documented
//! corpus scale (200 abuse + 200 normal targets).

use std::sync::OnceLock;

use chatgraph::features::{featurize_corpus, Dataset};
use chatgraph::netextract::ExtractionConfig;
use chatgraph::synth::{generate, SynthConfig};

fn corpus_config(pile_on: f64) -> SynthConfig {
    SynthConfig {
        n_users: 50,
        n_messages: 20_000,
        n_channels: 1,
        abuse_rate: 0.01,
        pile_on_intensity: pile_on,
        mention_rate: 0.15,
        seed: 7,
    }
}

fn featurized(pile_on: f64) -> Dataset {
    let corpus = generate(&corpus_config(pile_on)).unwrap();
    featurize_corpus(
        &corpus.channels,
        &corpus.targets,
        &ExtractionConfig::default(),
    )
    .unwrap()
}

fn null_dataset() -> &'static Dataset {
    static DATA: OnceLock<Dataset> = OnceLock::new();
    DATA.get_or_init(|| featurized(0.0))
}

fn column_by_class(data: &Dataset, feature: &str) -> (Vec<f64>, Vec<f64>) {
    let col = data
        .feature_names
        .iter()
        .position(|n| n == feature)
        .unwrap();
    let mut abuse = Vec::new();
    let mut normal = Vec::new();
    for row in &data.rows {
        if row.label {
            abuse.push(row.values[col]);
        } else {
            normal.push(row.values[col]);
        }
    }
    (abuse, normal)
}

/// Two-sample Kolmogorov-Smirnov p-value (asymptotic). Ties are handled by
/// advancing both samples through each distinct value before measuring.
fn ks_two_sample_p(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (n, m) = (a.len(), b.len());
    let mut i = 0;
    let mut j = 0;
    let mut d = 0.0_f64;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] == x {
            i += 1;
        }
        while j < m && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = ((n * m) as f64 / (n + m) as f64).sqrt();
    let lambda = (ne + 0.12 + 0.11 / ne) * d;
    let p: f64 = (1..=100)
        .map(|k| {
            let k = k as f64;
            2.0 * (-1.0_f64).powi(k as i32 - 1) * (-2.0 * k * k * lambda * lambda).exp()
        })
        .sum();
    p.clamp(0.0, 1.0)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[test]
fn null_corpus_classes_are_statistically_indistinguishable() {
    let data = null_dataset();
    for feature in ["after.edge_count", "after.vertex_count", "after.density"] {
        let (abuse, normal) = column_by_class(data, feature);
        assert_eq!(abuse.len(), 200);
        assert_eq!(normal.len(), 200);
        let p = ks_two_sample_p(&abuse, &normal);
        assert!(p > 0.01, "{feature}: KS p = {p:.4} <= 0.01 with pile_on 0");
    }
}

#[test]
fn planted_corpus_raises_after_edge_count_for_abuse() {
    let data = featurized(3.0);
    let (abuse, normal) = column_by_class(&data, "after.edge_count");
    assert!(
        mean(&abuse) > mean(&normal),
        "mean after.edge_count: abuse {} vs normal {}",
        mean(&abuse),
        mean(&normal)
    );
}

#[test]
fn every_feature_value_is_finite() {
    for data in [null_dataset(), &featurized(3.0)] {
        assert_eq!(data.feature_names.len(), 75);
        for row in &data.rows {
            assert_eq!(row.values.len(), 75);
            for (name, value) in data.feature_names.iter().zip(&row.values) {
                assert!(value.is_finite(), "{name} of {} is {value}", row.message_id);
            }
        }
    }
}

#[test]
fn planted_corpus_separates_target_local_features() {
    let data = featurized(3.0);
    for feature in ["after.pagerank", "after.degree_centrality"] {
        let (abuse, normal) = column_by_class(&data, feature);
        assert!(
            mean(&abuse) > mean(&normal) * 1.1,
            "{feature}: abuse mean {} not clearly above normal mean {}",
            mean(&abuse),
            mean(&normal)
        );
    }
}
