//! The affine maps that move `Low` and `LowComp` inputs into the domain of
//! the max-index and comparison circuits.

/// `v[i] + i/n`. Separates the coordinates of a binary vector so that its
/// lowest one becomes the unique maximum.
pub fn transform_s(v: &[f64]) -> Vec<f64> {
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| x + i as f64 / n)
        .collect()
}

/// `(v[i] + 1) / 2`, mapping `[0, 2)` onto `[1/2, 3/2)`.
pub fn transform_tl(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| (x + 1.0) / 2.0).collect()
}

/// `1/2 + x/n²`, mapping `[0, (n-1)²]` into `[1/2, 3/2)`.
pub fn transform_tc(x: f64, n: usize) -> f64 {
    0.5 + x / (n * n) as f64
}
