//! Small shared helpers.

/// Format a float with 17 significant digits, enough to round-trip an `f64`
/// exactly. All CSV output goes through this so reruns are byte-comparable.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Derive the seed for sub-task `index` from a master seed.
///
/// The splitting rule is `seed + index` (wrapping); every seeded component of
/// the pipeline documents which index range it consumes.
pub fn task_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index)
}

/// Mean of a slice; 0 for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}
