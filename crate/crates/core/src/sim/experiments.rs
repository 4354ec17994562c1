//! Experiment runners. Each one is a pure function of its config and
//! renders a CSV table; trial `t` always draws from its own forked stream so
//! output is byte-identical across runs.
//!
//! | experiment      | columns |
//! |-----------------|---------|
//! | `span-prob`     | delta, l, trials, probability, analytic_bound |
//! | `expected-span` | m, trials, mean_attained, analytic_mean |
//! | `rank-dist`     | m, c, s, trials, count, frequency, kolchin_limit, exact, sigma |
//! | `tail-bounds`   | m, c, trials, p_attained_eq, tail_bound, f_c, lower_bound, upper_bound, f_c_limit |
//! | `hit-rate`      | m, pool_size, x_weight, trials, hits, frequency, analytic, sigma |
//! | `uniformity`    | m, bias, trials, freq_uniform_v, analytic_uniform_v, freq_full_rank_v, analytic_full_rank_v, gap_full_rank_v |
//! | `collusion`     | m, a, b, trials, leaks, frequency, mean_pooled, mean_delta, union_bound_at_mean_delta, all_batches_leaks |
//! | `cpop-sweep`    | a, trials, exact_fetches, cpop, analytic_cpop, max_tolerable_colluders |

use std::fmt::Write as _;

use super::config::ExperimentConfig;
use super::ledger::{measure_cpop, TranscriptLedger};
use crate::analysis::{
    binomial_sigma, encoded_one_prob_nonzero, encoded_one_prob_uniform, exact_rank_prob, expected_span_count,
    kolchin_rank_prob, span_inclusion_experiment, span_prob_bounds, span_prob_limit, spy_union_bound, uniformity_gap,
};
use crate::error::{Error, Result};
use crate::gf2::{random_bitvec, random_matrix, BitVec, RngState};
use crate::pir::{collusion_leakage, expand_request, generate_pool, partition_queries, pir_fetch};
use crate::retrieval::ContentRequest;
use crate::storage::{sample_full_rank, Cluster};

pub const EXPERIMENTS: [&str; 8] = [
    "span-prob",
    "expected-span",
    "rank-dist",
    "tail-bounds",
    "hit-rate",
    "uniformity",
    "collusion",
    "cpop-sweep",
];

/// Runs the configured experiment, writes the CSV to `config.output` when
/// set, and returns it.
pub fn run_experiment(config: &ExperimentConfig) -> Result<String> {
    let csv = render(config)?;
    if let Some(path) = &config.output {
        std::fs::write(path, &csv).map_err(|e| Error::io(path, e))?;
    }
    Ok(csv)
}

pub fn render(config: &ExperimentConfig) -> Result<String> {
    if config.trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    let rng = RngState::new(config.seed);
    match config.experiment.as_str() {
        "span-prob" => span_prob(config, &rng),
        "expected-span" => expected_span(config, &rng),
        "rank-dist" => rank_dist(config, &rng),
        "tail-bounds" => tail_bounds(config, &rng),
        "hit-rate" => hit_rate(config, &rng),
        "uniformity" => uniformity(config, &rng),
        "collusion" => collusion(config, &rng),
        "cpop-sweep" => cpop_sweep(config, &rng),
        other => Err(Error::UnknownExperiment(other.to_string())),
    }
}

fn opt(value: Option<f64>) -> String {
    value.map_or_else(String::new, |v| v.to_string())
}

fn sweep(config: &ExperimentConfig) -> Vec<usize> {
    config.ms.clone().unwrap_or_else(|| vec![config.contents])
}

fn span_prob(config: &ExperimentConfig, rng: &RngState) -> Result<String> {
    let table = span_inclusion_experiment(config.contents, &config.deltas, config.trials, rng)?;
    if table.agreeing_trials != config.trials {
        return Err(Error::Integrity(format!(
            "subset search and solution weight disagreed on {} trials",
            config.trials - table.agreeing_trials
        )));
    }
    let mut out = String::from("delta,l,trials,probability,analytic_bound\n");
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.delta,
            r.l,
            r.trials,
            r.probability,
            opt(r.analytic_bound)
        );
    }
    Ok(out)
}

/// Attained pool sizes for `trials` pools of dimension `m`.
fn attained_sizes(m: usize, epsilon: f64, trials: usize, rng: &RngState) -> Result<Vec<usize>> {
    (0..trials)
        .map(|t| Ok(generate_pool(m, epsilon, &mut rng.fork(t as u64))?.attained))
        .collect()
}

fn expected_span(config: &ExperimentConfig, rng: &RngState) -> Result<String> {
    let mut out = String::from("m,trials,mean_attained,analytic_mean\n");
    for (i, m) in sweep(config).into_iter().enumerate() {
        let sizes = attained_sizes(m, config.epsilon, config.trials, &rng.fork(i as u64))?;
        let mean = sizes.iter().sum::<usize>() as f64 / config.trials as f64;
        let _ = writeln!(out, "{m},{},{mean},{}", config.trials, expected_span_count(m)?);
    }
    Ok(out)
}

fn rank_dist(config: &ExperimentConfig, rng: &RngState) -> Result<String> {
    let mut out = String::from("m,c,s,trials,count,frequency,kolchin_limit,exact,sigma\n");
    for (i, m) in sweep(config).into_iter().enumerate() {
        for c in 0..=2usize {
            let crng = rng.fork(i as u64).fork(c as u64);
            let mut counts = vec![0usize; m + 1];
            for t in 0..config.trials {
                let rank = random_matrix(&mut crng.fork(t as u64), m, m + c).rank();
                counts[m - rank] += 1;
            }
            for (s, &count) in counts.iter().enumerate().take(4) {
                let limit = kolchin_rank_prob(c as i64, s)?;
                let freq = count as f64 / config.trials as f64;
                let _ = writeln!(
                    out,
                    "{m},{c},{s},{},{},{freq},{limit},{},{}",
                    config.trials,
                    count,
                    exact_rank_prob(m, m + c, m - s),
                    binomial_sigma(limit, config.trials)
                );
            }
        }
    }
    Ok(out)
}

fn tail_bounds(config: &ExperimentConfig, rng: &RngState) -> Result<String> {
    let m = config.contents;
    let sizes = attained_sizes(m, config.epsilon, config.trials, rng)?;
    let n = config.trials as f64;
    let mut out = String::from("m,c,trials,p_attained_eq,tail_bound,f_c,lower_bound,upper_bound,f_c_limit\n");
    for c in 0..=10usize {
        let eq = sizes.iter().filter(|&&a| a == m + c).count() as f64 / n;
        let within = sizes.iter().filter(|&&a| a <= m + c).count() as f64 / n;
        let (lo, hi) = span_prob_bounds(c);
        let _ = writeln!(
            out,
            "{m},{c},{},{eq},{},{within},{lo},{hi},{}",
            config.trials,
            0.5f64.powi(c as i32),
            span_prob_limit(c)
        );
    }
    Ok(out)
}

/// Frequency of `Q x == e_0` over fresh uniform `m x A` pools `Q`, for the
/// fixed alternating selector `x = 1010...`.
fn hit_rate(config: &ExperimentConfig, rng: &RngState) -> Result<String> {
    let m = config.contents;
    let pool_size = crate::pir::pool_capacity(m, config.epsilon)?;
    let x = BitVec::from_fn(pool_size, |i| i % 2 == 0);
    let target = BitVec::unit(m, 0);
    let mut hits = 0usize;
    let mut trng = rng.fork(0);
    for _ in 0..config.trials {
        let mut image = BitVec::zeros(m);
        for i in 0..pool_size {
            let q = random_bitvec(&mut trng, m)?;
            if x.get(i) {
                image.xor_assign(&q);
            }
        }
        hits += usize::from(image == target);
    }
    let p = 0.5f64.powi(m as i32);
    let mut out = String::from("m,pool_size,x_weight,trials,hits,frequency,analytic,sigma\n");
    let _ = writeln!(
        out,
        "{m},{pool_size},{},{},{hits},{},{p},{}",
        x.weight(),
        config.trials,
        hits as f64 / config.trials as f64,
        binomial_sigma(p, config.trials)
    );
    Ok(out)
}

/// Per trial: fresh Bernoulli(`bias`) content bits `f`, one uniform `v` and
/// one non-zero `v` (a full-rank encoding column); records both `v . f`.
fn uniformity(config: &ExperimentConfig, rng: &RngState) -> Result<String> {
    let ms = config.ms.clone().unwrap_or_else(|| vec![4, 16, 64, 256]);
    let mut out = String::from(
        "m,bias,trials,freq_uniform_v,analytic_uniform_v,freq_full_rank_v,analytic_full_rank_v,gap_full_rank_v\n",
    );
    for (i, m) in ms.into_iter().enumerate() {
        let mut trng = rng.fork(i as u64);
        let (mut ones_uniform, mut ones_full) = (0usize, 0usize);
        for _ in 0..config.trials {
            let f = BitVec::from_fn(m, |_| trng.bernoulli(config.bias));
            let v = random_bitvec(&mut trng, m)?;
            let nonzero = sample_full_rank(m, 1, &mut trng)?.columns.remove(0);
            ones_uniform += usize::from(v.dot(&f));
            ones_full += usize::from(nonzero.dot(&f));
        }
        let n = config.trials as f64;
        let _ = writeln!(
            out,
            "{m},{},{},{},{},{},{},{}",
            config.bias,
            config.trials,
            ones_uniform as f64 / n,
            encoded_one_prob_uniform(m, config.bias)?,
            ones_full as f64 / n,
            encoded_one_prob_nonzero(m, config.bias)?,
            uniformity_gap(m, config.bias)?
        );
    }
    Ok(out)
}

/// Colluders are the first `b` batches of each session.
fn collusion(config: &ExperimentConfig, rng: &RngState) -> Result<String> {
    let m = config.contents;
    if config.b > config.a {
        return Err(Error::InvalidParams(format!(
            "b = {} exceeds a = {}",
            config.b, config.a
        )));
    }
    let (mut leaks, mut all_leaks, mut pooled) = (0usize, 0usize, 0usize);
    for t in 0..config.trials {
        let mut trng = rng.fork(t as u64);
        let pool = generate_pool(m, config.epsilon, &mut trng)?;
        let request = ContentRequest::new(trng.below(m), m)?;
        let expansion = expand_request(&pool, &request)?;
        let session = partition_queries(&expansion, config.a, &mut trng)?;
        let colluders: Vec<usize> = (0..config.b.min(session.a())).collect();
        let report = collusion_leakage(&pool, &session, &colluders)?;
        leaks += usize::from(report.leaked);
        pooled += report.pooled_count;
        let everyone: Vec<usize> = (0..session.a()).collect();
        all_leaks += usize::from(collusion_leakage(&pool, &session, &everyone)?.leaked);
    }
    let n = config.trials as f64;
    let mean_pooled = pooled as f64 / n;
    let mean_delta = mean_pooled / m as f64;
    let bound = spy_union_bound(m, mean_delta).ok().map(|b| m as f64 * b);
    let mut out = String::from(
        "m,a,b,trials,leaks,frequency,mean_pooled,mean_delta,union_bound_at_mean_delta,all_batches_leaks\n",
    );
    let _ = writeln!(
        out,
        "{m},{},{},{},{leaks},{},{mean_pooled},{mean_delta},{},{all_leaks}",
        config.a,
        config.b,
        config.trials,
        leaks as f64 / n,
        opt(bound)
    );
    Ok(out)
}

/// cPoP for every `a` from 1 to the configured `a`, on one seeded cluster.
fn cpop_sweep(config: &ExperimentConfig, rng: &RngState) -> Result<String> {
    let cluster = Cluster::build(config.params()?, config.seed)?;
    let library = cluster.library()?;
    let m = config.contents;
    let mut out = String::from("a,trials,exact_fetches,cpop,analytic_cpop,max_tolerable_colluders\n");
    for a in 1..=config.a {
        let mut exact = 0usize;
        let mut cpop = 0.0;
        for t in 0..config.trials {
            let mut trng = rng.fork(a as u64).fork(t as u64);
            let pool = generate_pool(m, config.epsilon, &mut trng)?;
            let request = ContentRequest::new(trng.below(m), m)?;
            let mut ledger = TranscriptLedger::new();
            let fetch = pir_fetch(&cluster, &pool, &request, a, &mut trng, &mut ledger)?;
            exact += usize::from(&fetch.content == library.get(request.index));
            cpop += measure_cpop(&ledger, config.content_bits);
        }
        let _ = writeln!(
            out,
            "{a},{},{exact},{},{a},{}",
            config.trials,
            cpop / config.trials as f64,
            a.div_ceil(2) - 1
        );
    }
    Ok(out)
}
