use crate::error::{Error, Result};

/// Infinite products are cut off here; the next factor differs from 1 by
/// less than `2^-64`.
pub const PRODUCT_TERMS: u32 = 64;

/// Shape of a random `m x l` matrix and the rank deficiency of interest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankStatQuery {
    pub m: usize,
    pub l: usize,
    /// Rank deficiency: the event is `rank == m - s`.
    pub s: usize,
    /// Subset fraction, for span-inclusion questions.
    pub delta: f64,
}

impl RankStatQuery {
    pub fn new(m: usize, l: usize, s: usize) -> Self {
        Self { m, l, s, delta: 0.0 }
    }

    /// Column excess `l - m`.
    pub fn c(&self) -> i64 {
        self.l as i64 - self.m as i64
    }

    pub fn limit(&self) -> Result<f64> {
        kolchin_rank_prob(self.c(), self.s)
    }

    pub fn exact(&self) -> Result<f64> {
        let rank = self
            .m
            .checked_sub(self.s)
            .ok_or_else(|| Error::Domain(format!("deficiency {} exceeds dimension {}", self.s, self.m)))?;
        Ok(exact_rank_prob(self.m, self.l, rank))
    }
}

fn one_minus_pow2(i: u32) -> f64 {
    1.0 - 0.5f64.powi(i as i32)
}

/// Limiting probability, as `m` grows with `l = m + c`, that a uniform
/// `m x l` matrix over GF(2) has rank `m - s`:
///
/// ```text
/// 2^{-s(s+c)} * prod_{i>s} (1 - 2^-i) / prod_{j=1}^{s+c} (1 - 2^-j)
/// ```
pub fn kolchin_rank_prob(c: i64, s: usize) -> Result<f64> {
    let excess = c + s as i64;
    if excess < 0 {
        return Err(Error::Domain(format!("c + s must be non-negative, got c={c}, s={s}")));
    }
    let s32 = s as u32;
    let tail: f64 = (s32 + 1..=PRODUCT_TERMS.max(s32 + 1)).map(one_minus_pow2).product();
    let head: f64 = (1..=excess as u32).map(one_minus_pow2).product();
    Ok(2f64.powi(-(s as i32) * excess as i32) * tail / head)
}

/// `prod_{i>=1} (1 - 2^-i)`: the limiting probability that a square uniform
/// matrix is invertible.
pub fn full_rank_limit() -> f64 {
    (1..=PRODUCT_TERMS).map(one_minus_pow2).product()
}

/// Exact probability that a uniform `m x l` matrix has rank `k`:
///
/// ```text
/// 2^{-(m-k)(l-k)} * prod_{i<k} (1 - 2^{i-m})(1 - 2^{i-l}) / (1 - 2^{i-k})
/// ```
pub fn exact_rank_prob(m: usize, l: usize, k: usize) -> f64 {
    if k > m.min(l) {
        return 0.0;
    }
    let pow = |e: i64| 2f64.powi(e as i32);
    let (m, l, k) = (m as i64, l as i64, k as i64);
    let product: f64 = (0..k)
        .map(|i| (1.0 - pow(i - m)) * (1.0 - pow(i - l)) / (1.0 - pow(i - k)))
        .product();
    pow(-(m - k) * (l - k)) * product
}

/// Lower and upper bounds on `F(c)`, the probability that `m + c` uniform
/// vectors span `F_2^m`: `(1 - 2^-c, 1 - 2^-(c+1))`.
pub fn span_prob_bounds(c: usize) -> (f64, f64) {
    let c = c as i32;
    (1.0 - 2f64.powi(-c), 1.0 - 2f64.powi(-(c + 1)))
}

/// Limit of `F(c)` as `m` grows: `prod_{i>c} (1 - 2^-i)`.
pub fn span_prob_limit(c: usize) -> f64 {
    kolchin_rank_prob(c as i64, 0).expect("c >= 0")
}

/// Expected number of uniform vectors drawn until they span `F_2^m`:
/// `m + sum_{i=1}^m 1 / (2^i - 1)`.
pub fn expected_span_count(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    let tail: f64 = (1..=m as i32).map(|i| 1.0 / (2f64.powi(i) - 1.0)).sum();
    Ok(m as f64 + tail)
}
