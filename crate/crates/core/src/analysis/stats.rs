use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Width of every statistical acceptance band, in standard deviations.
pub const SIGMA_BAND: f64 = 3.0;

/// Standard deviation of a Bernoulli(`p`) frequency over `n` trials.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Whether `observed` lies within `SIGMA_BAND` binomial deviations of `p`.
pub fn within_band(observed: f64, p: f64, n: usize) -> bool {
    (observed - p).abs() <= SIGMA_BAND * binomial_sigma(p, n)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of `counts` against the uniform law on its bins.
pub fn chi_square_uniform(counts: &[u64]) -> ChiSquare {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let statistic = counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let dof = counts.len().saturating_sub(1);
    let p_value = ChiSquared::new(dof as f64).map_or(f64::NAN, |d| d.sf(statistic));
    ChiSquare {
        statistic,
        dof,
        p_value,
    }
}
