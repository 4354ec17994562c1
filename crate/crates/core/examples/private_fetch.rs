// Private retrieval with random queries split across groups; the user
// downloads one content-sized answer per group.

use sapir::gf2::RngState;
use sapir::pir::{generate_pool, pir_fetch, SessionRecord};
use sapir::retrieval::ContentRequest;
use sapir::sim::{measure_cpop, TranscriptLedger};
use sapir::storage::{Cluster, SystemParams};

pub fn run_example() -> sapir::Result<()> {
    let params = SystemParams::new(16, 8, 16, 512, 0.5)?;
    let cluster = Cluster::build(params, 4)?;
    let library = cluster.library()?;
    let mut rng = RngState::new(21);
    println!("{} groups available", cluster.groups.len());

    let request = ContentRequest::new(9, params.contents)?;
    for a in 1..=cluster.groups.len().min(4) {
        let pool = generate_pool(params.contents, 0.01, &mut rng)?;
        let mut ledger = TranscriptLedger::new();
        let fetch = pir_fetch(&cluster, &pool, &request, a, &mut rng, &mut ledger)?;
        assert_eq!(&fetch.content, library.get(request.index));
        let sizes: Vec<usize> = fetch.session.batches.iter().map(Vec::len).collect();
        println!(
            "a = {a}: pool spanned after {} of {} draws, {} queries sent in batches {sizes:?}, cPoP {}",
            pool.attained,
            pool.queries.len(),
            fetch.expansion.weight(),
            measure_cpop(&ledger, params.content_bits)
        );
        if a == 2 {
            print!("{}", SessionRecord::new(&pool, &fetch).export());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sapir::Result<()> {
    run_example()
}
