// Fetch every content through a reconstruction group and account for the
// traffic on the simulated network.

use sapir::retrieval::{execute_retrieval, plan_retrieval, record_setup_exchange, ContentRequest};
use sapir::sim::{measure_cpop, TranscriptLedger};
use sapir::storage::{Cluster, SystemParams};

pub fn run_example() -> sapir::Result<()> {
    let cluster = Cluster::build(SystemParams::new(8, 4, 16, 128, 0.5)?, 2)?;
    let library = cluster.library()?;
    let group = cluster.group(0);

    let mut setup = TranscriptLedger::new();
    record_setup_exchange(&cluster, 0, &mut setup);
    println!("setup: {} bits on intra-group links", setup.intra_group_bits());

    for index in 0..cluster.params.contents {
        let request = ContentRequest::new(index, cluster.params.contents)?;
        let plan = plan_retrieval(group, &request)?;
        let mut ledger = TranscriptLedger::new();
        let content = execute_retrieval(&cluster, 0, &request, &mut ledger)?;
        assert_eq!(&content, library.get(index));
        if index == 0 {
            let slices: Vec<String> = plan.blocks.iter().map(|b| b.to_string()).collect();
            println!("decoding slices for content 1: {}", slices.join(" | "));
            print!(
                "{}",
                ledger
                    .export()
                    .lines()
                    .map(|l| format!("  {}\n", &l[..l.len().min(60)]))
                    .collect::<String>()
            );
        }
        assert_eq!(measure_cpop(&ledger, cluster.params.content_bits), group.size() as f64);
    }
    println!(
        "all {} contents exact; cPoP = group size = {}",
        cluster.params.contents,
        group.size()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> sapir::Result<()> {
    run_example()
}
