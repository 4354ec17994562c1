//! Exact 1-probability of an encoded bit `sum_i v_i f_i` when the content
//! bits `f_i` are i.i.d. Bernoulli(`bias`).
//!
//! With `v` uniform over all of `F_2^m` the bias averages out as
//! `E[(1 - 2p)^{|v|}] = (1 - p)^m`. Full-rank sampling never yields `v = 0`,
//! so an encoding column is uniform over the non-zero vectors instead, which
//! leaves a residual offset of order `2^-m`.

use crate::error::{Error, Result};

fn check(m: usize, bias: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain("need at least one content".into()));
    }
    if !(0.0..=1.0).contains(&bias) {
        return Err(Error::Domain(format!("bias {bias} outside [0, 1]")));
    }
    Ok(())
}

/// `(1 - (1 - p)^m) / 2`, for `v` uniform over `F_2^m`.
pub fn encoded_one_prob_uniform(m: usize, bias: f64) -> Result<f64> {
    check(m, bias)?;
    Ok(0.5 * (1.0 - (1.0 - bias).powi(m as i32)))
}

/// `2^{m-1} (1 - (1 - p)^m) / (2^m - 1)`, for `v` uniform over the non-zero
/// vectors of `F_2^m` (the marginal of one full-rank encoding column).
pub fn encoded_one_prob_nonzero(m: usize, bias: f64) -> Result<f64> {
    Ok(0.5 + nonzero_offset(m, bias)?)
}

/// `P - 1/2` for non-zero-uniform `v`, as `(1 - (2(1-p))^m) / (2 (2^m - 1))`,
/// which stays accurate after the offset drops below `f64::EPSILON`.
fn nonzero_offset(m: usize, bias: f64) -> Result<f64> {
    check(m, bias)?;
    let spread = (2.0 * (1.0 - bias)).powi(m as i32);
    let denominator = 2.0 * (2f64.powi(m as i32) - 1.0);
    Ok((1.0 - spread) / denominator)
}

/// `|P - 1/2|` for a full-rank encoding column. Zero at bias `1/2`, and
/// strictly decreasing in `m` for any bias in `(0, 1/2) U (1/2, 1]`.
pub fn uniformity_gap(m: usize, bias: f64) -> Result<f64> {
    Ok(nonzero_offset(m, bias)?.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact probability by enumerating every `v` (all, or non-zero only) and
    /// every content bit pattern.
    fn enumerate(m: usize, bias: f64, nonzero: bool) -> f64 {
        let mut total = 0.0;
        let mut weight = 0.0;
        for v in 0u32..1 << m {
            if nonzero && v == 0 {
                continue;
            }
            weight += 1.0;
            for f in 0u32..1 << m {
                let ones = f.count_ones() as i32;
                let p = bias.powi(ones) * (1.0 - bias).powi(m as i32 - ones);
                if (v & f).count_ones() % 2 == 1 {
                    total += p;
                }
            }
        }
        total / weight
    }

    #[test]
    fn closed_forms_match_enumeration() {
        for m in 1..=6 {
            for bias in [0.0, 0.1, 0.5, 0.9, 1.0] {
                let u = encoded_one_prob_uniform(m, bias).unwrap();
                let n = encoded_one_prob_nonzero(m, bias).unwrap();
                assert!((u - enumerate(m, bias, false)).abs() < 1e-12, "m={m} p={bias}");
                assert!((n - enumerate(m, bias, true)).abs() < 1e-12, "m={m} p={bias}");
            }
        }
    }

    #[test]
    fn reference_values() {
        assert!((encoded_one_prob_uniform(1, 0.9).unwrap() - 0.45).abs() < 1e-12);
        assert!((encoded_one_prob_uniform(2, 0.9).unwrap() - 0.495).abs() < 1e-12);
        assert!((encoded_one_prob_nonzero(1, 0.9).unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn gap_shrinks_with_m() {
        let gaps: Vec<f64> = [4, 16, 64, 256]
            .iter()
            .map(|&m| uniformity_gap(m, 0.9).unwrap())
            .collect();
        for w in gaps.windows(2) {
            assert!(w[1] < w[0], "{gaps:?}");
        }
        assert!(gaps[3] > 0.0);
    }

    #[test]
    fn domain() {
        assert!(encoded_one_prob_uniform(0, 0.5).is_err());
        assert!(encoded_one_prob_nonzero(3, 1.5).is_err());
    }
}
