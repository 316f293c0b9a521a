//! Small statistics helpers shared by the Monte Carlo estimators.

/// Sample mean. Returns 0 for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n-1 denominator). Returns 0 for n < 2.
pub fn sample_sd(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// 95% normal-approximation half-width for the mean of `xs`.
pub fn mean_ci_halfwidth(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::INFINITY;
    }
    1.96 * sample_sd(xs) / (xs.len() as f64).sqrt()
}

/// 95% normal-approximation half-width for a binomial proportion.
pub fn binomial_ci_halfwidth(p_hat: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    1.96 * (p_hat * (1.0 - p_hat) / n as f64).sqrt()
}

/// Weighted least-squares line fit `y = intercept + slope * x`.
///
/// Returns `(intercept, slope, r_squared)` where `r_squared` is the
/// weighted coefficient of determination. Requires at least two points
/// with positive weight; returns `None` otherwise.
pub fn weighted_linear_fit(xs: &[f64], ys: &[f64], ws: &[f64]) -> Option<(f64, f64, f64)> {
    assert_eq!(xs.len(), ys.len());
    assert_eq!(xs.len(), ws.len());
    let wsum: f64 = ws.iter().filter(|w| **w > 0.0).sum();
    let n_pos = ws.iter().filter(|w| **w > 0.0).count();
    if n_pos < 2 || wsum <= 0.0 {
        return None;
    }
    let wx: f64 = xs.iter().zip(ws).map(|(x, w)| x * w).sum::<f64>() / wsum;
    let wy: f64 = ys.iter().zip(ws).map(|(y, w)| y * w).sum::<f64>() / wsum;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for ((&x, &y), &w) in xs.iter().zip(ys).zip(ws) {
        if w <= 0.0 {
            continue;
        }
        sxx += w * (x - wx) * (x - wx);
        sxy += w * (x - wx) * (y - wy);
        syy += w * (y - wy) * (y - wy);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = wy - slope * wx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Some((intercept, slope, r2))
}

/// Quantile by linear interpolation on a sorted slice, q in [0, 1].
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let q = q.clamp(0.0, 1.0);
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}
