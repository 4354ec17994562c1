//! Closed-form predictors, the exhaustive span search, and the statistics
//! shared by the Monte Carlo checks.

mod entropy;
mod rank;
mod span_search;
mod stats;
mod uniformity;

pub use entropy::{binary_entropy, binom_entropy_bounds, binomial, spy_union_bound, subset_size};
pub use rank::{
    exact_rank_prob, expected_span_count, full_rank_limit, kolchin_rank_prob, span_prob_bounds, span_prob_limit,
    RankStatQuery, PRODUCT_TERMS,
};
pub use span_search::{
    brute_force_span_search, min_weight_by_solution, span_inclusion_experiment, SpanInclusionRow, SpanInclusionTable,
    SpanSearchResult, SEARCH_LIMIT,
};
pub use stats::{binomial_sigma, chi_square_uniform, within_band, ChiSquare, SIGMA_BAND};
pub use uniformity::{encoded_one_prob_nonzero, encoded_one_prob_uniform, uniformity_gap};
