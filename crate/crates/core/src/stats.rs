//! Small statistics helpers for decay curves.

/// Least-squares line through `(i, ln(y_i + 1))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricFit {
    /// `exp(slope)`: the fitted per-round ratio.
    pub ratio: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fits `ln(count + 1) ≈ a + b·round`. Needs at least two points. A flat
/// series fits exactly and gets `R² = 1`.
pub fn geometric_fit(counts: &[f64]) -> Option<GeometricFit> {
    let n = counts.len();
    if n < 2 {
        return None;
    }
    let ys: Vec<f64> = counts.iter().map(|&c| (c + 1.0).ln()).collect();
    let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Some(GeometricFit { ratio: slope.exp(), slope, intercept, r_squared, points: n })
}
