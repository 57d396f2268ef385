/// Least-squares slope of `log y` against `log x`. Pairs with a non-positive
/// entry are skipped; `None` if fewer than two remain.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x.iter().zip(y).filter(|(a, b)| **a > 0.0 && **b > 0.0).map(|(a, b)| (a.ln(), b.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Observed order between consecutive levels whose parameter shrinks by `ratio`.
pub fn pairwise_rates(err: &[f64], ratio: f64) -> Vec<f64> {
    err.windows(2).map(|w| (w[0] / w[1]).ln() / ratio.ln()).collect()
}

/// True if every entry is strictly below its predecessor.
pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [1e-1, 1e-2, 1e-3];
        let y: Vec<f64> = x.iter().map(|s| 3.0 * s * s).collect();
        assert!((loglog_slope(&x, &y).unwrap() - 2.0).abs() < 1e-12);
        assert!(loglog_slope(&x, &[0.0, 0.0, 0.0]).is_none());
        let r = pairwise_rates(&[1.0, 0.25, 0.0625], 2.0);
        assert!(r.iter().all(|v| (v - 2.0).abs() < 1e-12));
    }
}
