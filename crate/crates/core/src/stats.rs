//! Small numerical and statistical helpers.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Adaptive Simpson quadrature on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    rec(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 48)
}

/// Survival function of the Kolmogorov distribution.
pub fn q_ks(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=200 {
        let j = j as f64;
        let term = 2.0 * (-1f64).powi(j as i32 - 1) * (-2.0 * j * j * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// KS statistic and asymptotic p-value with the small-sample correction
/// `(sqrt(n) + 0.12 + 0.11 / sqrt(n)) D`.
fn ks_p(d: f64, n_eff: f64) -> f64 {
    let s = n_eff.sqrt();
    q_ks((s + 0.12 + 0.11 / s) * d)
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    if sample.is_empty() {
        return Err(Error::Statistical("empty sample".into()));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok((d, ks_p(d, n)))
}

/// Two-sample Kolmogorov-Smirnov test. Ties between samples are handled by
/// comparing the ECDFs only after each distinct value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Statistical("empty sample".into()));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let n_eff = (n * m) as f64 / (n + m) as f64;
    Ok((d, ks_p(d, n_eff)))
}

/// Upper tail of the chi-square distribution.
pub fn chi_square_sf(x: f64, df: f64) -> Result<f64> {
    let dist = ChiSquared::new(df).map_err(|e| Error::Statistical(e.to_string()))?;
    Ok(dist.sf(x))
}

/// Chi-square goodness of fit of integer counts against a Poisson law of
/// mean `lambda`. Upper categories are pooled until every expected count
/// reaches 5. Returns `(statistic, degrees of freedom, p-value)`.
pub fn poisson_gof(counts: &[u64], lambda: f64) -> Result<(f64, usize, f64)> {
    let n = counts.len() as f64;
    if counts.is_empty() || !(lambda > 0.0) {
        return Err(Error::Statistical(
            "Poisson fit needs counts and a positive mean".into(),
        ));
    }
    // Inclusive upper bounds of all categories but the last, which is the
    // tail above the final bound.
    let mut bounds: Vec<u64> = Vec::new();
    let mut expected = Vec::new();
    let (mut p, mut acc, mut cum) = ((-lambda).exp(), 0.0, 0.0);
    for k in 0u64.. {
        acc += p;
        cum += p;
        if (1.0 - cum) * n < 5.0 {
            break;
        }
        if acc * n >= 5.0 {
            bounds.push(k);
            expected.push(acc * n);
            acc = 0.0;
        }
        p *= lambda / (k + 1) as f64;
    }
    if bounds.is_empty() {
        return Err(Error::Statistical("too few categories for a chi-square fit".into()));
    }
    let below: f64 = expected.iter().sum::<f64>() / n;
    expected.push((1.0 - below) * n);
    let mut observed = vec![0.0; expected.len()];
    for &c in counts {
        observed[bounds.partition_point(|&b| b < c)] += 1.0;
    }
    let stat: f64 = observed.iter().zip(&expected).map(|(o, e)| (o - e) * (o - e) / e).sum();
    let df = expected.len() - 1;
    Ok((stat, df, chi_square_sf(stat, df as f64)?))
}

/// Sample mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    }
}
