use super::entropy::{spy_union_bound, subset_size};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, RngState};
use crate::storage::sample_full_rank;

/// Largest dimension the exhaustive search accepts.
pub const SEARCH_LIMIT: usize = 24;

/// Whether base `e_{base_index}` is a sum of at most `truncated_at` query columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanSearchResult {
    pub base_index: usize,
    pub found: bool,
    /// Smallest number of columns summing to the base, when `<= truncated_at`.
    pub min_weight: Option<usize>,
    pub subsets_examined: u64,
    pub truncated_at: usize,
}

fn check_size(queries: &BitMatrix, l: usize) -> Result<()> {
    if queries.rows() > SEARCH_LIMIT || queries.cols() > SEARCH_LIMIT {
        return Err(Error::SizeGuard(format!(
            "{}x{} exceeds the {SEARCH_LIMIT}x{SEARCH_LIMIT} search limit",
            queries.rows(),
            queries.cols()
        )));
    }
    if l > queries.cols() {
        return Err(Error::InvalidParams(format!(
            "weight bound {l} exceeds {} columns",
            queries.cols()
        )));
    }
    Ok(())
}

/// Next integer with the same popcount.
fn next_same_weight(x: u64) -> u64 {
    let low = x & x.wrapping_neg();
    let ripple = x + low;
    ripple | (((x ^ ripple) >> 2) / low)
}

/// Enumerates column subsets by increasing size and records, for every base
/// vector, the first size at which some subset sums to it. Finding `e_j` as a
/// subset sum of size `w` is the same as `e_j` lying in the span of some
/// `w`-subset, since any span element is a sum over a sub-subset.
pub fn brute_force_span_search(queries: &BitMatrix, l: usize) -> Result<Vec<SpanSearchResult>> {
    check_size(queries, l)?;
    let m = queries.rows();
    let n = queries.cols();
    let columns: Vec<u32> = queries.columns().iter().map(|c| c.words()[0] as u32).collect();
    let mut min_weight: Vec<Option<usize>> = vec![None; m];
    let mut examined = vec![0u64; m];
    let mut remaining = m;
    let mut count = 0u64;

    'sizes: for w in 1..=l {
        let mut mask: u64 = (1u64 << w) - 1;
        while mask < 1u64 << n {
            count += 1;
            let mut sum = 0u32;
            let mut bits = mask;
            while bits != 0 {
                sum ^= columns[bits.trailing_zeros() as usize];
                bits &= bits - 1;
            }
            if sum.count_ones() == 1 {
                let j = sum.trailing_zeros() as usize;
                if min_weight[j].is_none() {
                    min_weight[j] = Some(w);
                    examined[j] = count;
                    remaining -= 1;
                    if remaining == 0 {
                        break 'sizes;
                    }
                }
            }
            mask = next_same_weight(mask);
        }
    }

    Ok((0..m)
        .map(|j| SpanSearchResult {
            base_index: j,
            found: min_weight[j].is_some(),
            min_weight: min_weight[j],
            subsets_examined: if min_weight[j].is_some() { examined[j] } else { count },
            truncated_at: l,
        })
        .collect())
}

/// The same question for a square invertible query matrix, answered through
/// the unique solution `d` of `Q d = e_j`: its weight is the only possible
/// subset size.
pub fn min_weight_by_solution(queries: &BitMatrix, l: usize) -> Result<Vec<SpanSearchResult>> {
    check_size(queries, l)?;
    let inverse = queries.try_invert()?;
    let m = queries.rows();
    Ok((0..m)
        .map(|j| {
            let weight = inverse.mul_vec(&BitVec::unit(m, j)).weight();
            let min_weight = (weight <= l).then_some(weight);
            SpanSearchResult {
                base_index: j,
                found: min_weight.is_some(),
                min_weight,
                subsets_examined: 0,
                truncated_at: l,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpanInclusionRow {
    pub delta: f64,
    pub l: usize,
    pub trials: usize,
    pub hits: usize,
    pub probability: f64,
    /// `m * spy_union_bound(m, delta)`, when `delta < 0.5`.
    pub analytic_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpanInclusionTable {
    pub m: usize,
    pub rows: Vec<SpanInclusionRow>,
    /// Trials on which the subset search and the solution-weight shortcut agreed.
    pub agreeing_trials: usize,
}

/// Per `delta`, the fraction of trials in which at least one base vector lies
/// in the span of some `floor(delta m)`-subset of `m` independent uniform
/// queries. Trial `t` uses stream `rng.fork(t)`.
pub fn span_inclusion_experiment(
    m: usize,
    deltas: &[f64],
    trials: usize,
    rng: &RngState,
) -> Result<SpanInclusionTable> {
    if m == 0 || m > 20 {
        return Err(Error::SizeGuard(format!(
            "span inclusion runs for 1 <= m <= 20, got {m}"
        )));
    }
    if deltas.iter().any(|d| !(0.0..=1.0).contains(d)) {
        return Err(Error::Domain("every delta must lie in [0, 1]".into()));
    }
    let sizes: Vec<usize> = deltas.iter().map(|&d| subset_size(m, d)).collect();
    let l_max = sizes.iter().copied().max().unwrap_or(0);
    let mut hits = vec![0usize; deltas.len()];
    let mut agreeing = 0;
    for t in 0..trials {
        let mut trng = rng.fork(t as u64);
        let queries = BitMatrix::from_columns(m, &sample_full_rank(m, m, &mut trng)?.columns);
        let search = brute_force_span_search(&queries, l_max)?;
        let shortcut = min_weight_by_solution(&queries, l_max)?;
        let agree = search.iter().zip(&shortcut).all(|(a, b)| a.min_weight == b.min_weight);
        agreeing += usize::from(agree);
        let best = search.iter().filter_map(|r| r.min_weight).min();
        for (i, &l) in sizes.iter().enumerate() {
            if best.is_some_and(|w| w <= l) {
                hits[i] += 1;
            }
        }
    }
    let rows = deltas
        .iter()
        .zip(&sizes)
        .zip(&hits)
        .map(|((&delta, &l), &h)| SpanInclusionRow {
            delta,
            l,
            trials,
            hits: h,
            probability: if trials == 0 { 0.0 } else { h as f64 / trials as f64 },
            analytic_bound: spy_union_bound(m, delta).ok().map(|b| m as f64 * b),
        })
        .collect();
    Ok(SpanInclusionTable {
        m,
        rows,
        agreeing_trials: agreeing,
    })
}
