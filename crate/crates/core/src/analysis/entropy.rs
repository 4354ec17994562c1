use crate::error::{Error, Result};

/// Binary entropy in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("entropy argument {alpha} outside [0, 1]")));
    }
    if alpha == 0.0 || alpha == 1.0 {
        return Ok(0.0);
    }
    Ok(-alpha * alpha.log2() - (1.0 - alpha) * (1.0 - alpha).log2())
}

/// Exact binomial coefficient as a float.
pub fn binomial(i: u64, j: u64) -> f64 {
    if j > i {
        return 0.0;
    }
    let j = j.min(i - j);
    let mut acc: u128 = 1;
    for t in 0..j {
        acc = acc * u128::from(i - t) / u128::from(t + 1);
    }
    acc as f64
}

/// `(2^{iH(j/i)} / (i + 1), 2^{iH(j/i)})`, which bracket `C(i, j)`.
pub fn binom_entropy_bounds(i: u64, j: u64) -> Result<(f64, f64)> {
    if i == 0 || j > i {
        return Err(Error::Domain(format!("need 0 <= j <= i and i >= 1, got i={i}, j={j}")));
    }
    let upper = 2f64.powf(i as f64 * binary_entropy(j as f64 / i as f64)?);
    Ok((upper / (i + 1) as f64, upper))
}

/// `floor(delta m) * 2^{-m(1 - H(delta))}`: a union bound on the probability
/// that one fixed base vector lies in the span of some `floor(delta m)`-subset
/// of `m` random queries. Multiply by `m` to cover every base.
pub fn spy_union_bound(m: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Domain(format!(
            "bound only holds for 0 < delta < 0.5, got {delta}"
        )));
    }
    let l = subset_size(m, delta);
    Ok(l as f64 * 2f64.powf(-(m as f64) * (1.0 - binary_entropy(delta)?)))
}

/// `floor(delta m)`, robust to representation error such as `0.3 * 10`.
pub fn subset_size(m: usize, delta: f64) -> usize {
    (delta * m as f64 + 1e-9).floor() as usize
}
