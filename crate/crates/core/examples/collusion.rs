// Colluding groups pool their query batches and test whether any base
// vector falls in the span of what they hold.

use sapir::gf2::RngState;
use sapir::pir::{collusion_leakage, expand_request, generate_pool, partition_queries};
use sapir::retrieval::ContentRequest;

pub fn run_example() -> sapir::Result<()> {
    let (m, a, sessions) = (64, 4, 200);
    let mut leaks = vec![0usize; a + 1];
    for t in 0..sessions {
        let mut rng = RngState::new(9).fork(t);
        let pool = generate_pool(m, 0.01, &mut rng)?;
        let request = ContentRequest::new(rng.below(m), m)?;
        let session = partition_queries(&expand_request(&pool, &request)?, a, &mut rng)?;
        for (b, count) in leaks.iter_mut().enumerate() {
            let colluders: Vec<usize> = (0..b).collect();
            *count += usize::from(collusion_leakage(&pool, &session, &colluders)?.leaked);
        }
    }
    for (b, count) in leaks.iter().enumerate() {
        let regime = if 2 * b < a { "safe" } else { "unsafe" };
        println!("b = {b} of a = {a} ({regime}): leaked in {count} of {sessions} sessions");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sapir::Result<()> {
    run_example()
}
