// The analytic predictors, evaluated at a few reference points.

use sapir::analysis::{
    binary_entropy, binom_entropy_bounds, binomial, encoded_one_prob_nonzero, encoded_one_prob_uniform,
    expected_span_count, full_rank_limit, kolchin_rank_prob, span_prob_bounds, spy_union_bound,
};

pub fn run_example() -> sapir::Result<()> {
    println!("P[square matrix invertible] -> {:.10}", full_rank_limit());
    for (c, s) in [(0, 1), (1, 0), (2, 0)] {
        println!(
            "P[rank = m - {s} | {c} extra columns] -> {:.10}",
            kolchin_rank_prob(c, s)?
        );
    }
    let (lo, hi) = span_prob_bounds(7);
    println!("m + 7 queries span with probability in [{lo}, {hi}]");
    println!("expected draws to span F_2^30: {:.6}", expected_span_count(30)?);
    println!("H(0.2) = {:.6}", binary_entropy(0.2)?);
    let (blo, bhi) = binom_entropy_bounds(10, 5)?;
    println!("C(10,5) = {} in [{blo:.2}, {bhi}]", binomial(10, 5));
    println!("union bound, m = 20, delta = 0.2: {:.4}", spy_union_bound(20, 0.2)?);
    for m in [1, 2, 4, 16] {
        println!(
            "bias 0.9, m = {m}: P[encoded bit = 1] = {:.6} (uniform v), {:.6} (non-zero v)",
            encoded_one_prob_uniform(m, 0.9)?,
            encoded_one_prob_nonzero(m, 0.9)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sapir::Result<()> {
    run_example()
}
