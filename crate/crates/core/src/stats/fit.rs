use super::special::incomplete_beta;
use crate::dataset::{language_registry, N_LANGUAGES};
use crate::error::{Error, Result};

/// Two-sided tail `P(|T| >= |t|)` of Student's t with `df` degrees of freedom.
pub fn t_distribution_sf(t: f64, df: u32) -> Result<f64> {
    if df < 1 {
        return Err(Error::Usage("t distribution needs df >= 1".into()));
    }
    if t.is_nan() {
        return Err(Error::Numeric("t statistic is NaN".into()));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    let df = df as f64;
    Ok(incomplete_beta(df / 2.0, 0.5, df / (df + t * t)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Two-sided p for zero correlation, floored at the smallest positive f64.
    pub p_value: f64,
    pub n: usize,
}

/// Least-squares line of `y` on `x` with Pearson R² and its p-value.
pub fn pearson_fit(x: &[f64], y: &[f64]) -> Result<FitResult> {
    if x.len() != y.len() {
        return Err(Error::Data(format!(
            "fit needs paired data, got {} and {} values",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::Degenerate(format!(
            "fit needs at least 3 points, got {n}"
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Numeric("fit input is not finite".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate(
            "correlation undefined for constant data".into(),
        ));
    }
    let slope = sxy / sxx;
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let r_squared = r * r;
    let p = if r_squared >= 1.0 {
        0.0
    } else {
        t_distribution_sf(r * ((nf - 2.0) / (1.0 - r_squared)).sqrt(), (n - 2) as u32)?
    };
    Ok(FitResult {
        slope,
        intercept: my - slope * mx,
        r_squared,
        p_value: p.clamp(f64::MIN_POSITIVE, 1.0),
        n,
    })
}

/// Pairwise fits between systems' per-language F1 vectors; entry `[i][j]`
/// regresses system `j` on system `i`.
pub fn correlate_all(systems: &[(String, [f64; N_LANGUAGES])]) -> Result<Vec<Vec<FitResult>>> {
    systems
        .iter()
        .map(|(_, a)| systems.iter().map(|(_, b)| pearson_fit(a, b)).collect())
        .collect()
}

/// `(language, f1_a, f1_b)` points in registry order.
pub fn scatter_points(
    a: &[f64; N_LANGUAGES],
    b: &[f64; N_LANGUAGES],
) -> Vec<(&'static str, f64, f64)> {
    language_registry()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.iso639_3, a[i], b[i]))
        .collect()
}
