// An eavesdropper who sees every member-to-user link but one: the observed
// answers form a ciphertext, the missing answer is the key.

use sapir::gf2::RngState;
use sapir::retrieval::{
    decompose_secrecy, execute_plan, key_uniformity_report, ContentRequest, Eavesdropper, KeySchedule,
};
use sapir::sim::TranscriptLedger;
use sapir::storage::{Cluster, GroupingPolicy, SystemParams};

pub fn run_example() -> sapir::Result<()> {
    let params = SystemParams::new(10, 6, 24, 64, 0.9)?;
    let cluster = Cluster::build_with(params, 5, GroupingPolicy::WithSpare)?;
    let group = cluster.group(0);
    let schedule = KeySchedule::build(group)?;

    let request = ContentRequest::new(7, params.contents)?;
    let mut ledger = TranscriptLedger::new();
    execute_plan(&cluster, 0, &request, schedule.plan(7), &mut ledger);
    let eve = Eavesdropper::missing_last(group);
    let seen = eve.observe(&ledger, params.content_bits);
    let split = decompose_secrecy(&cluster, 0, &request, schedule.plan(7))?;
    println!("tapped {} links, missing server {}", seen.links_tapped, eve.unobserved);
    println!(
        "ciphertext {}\nkey        {}\ncontent    {}",
        split.ciphertext, split.key, split.message
    );
    assert!(split.identity_holds());
    assert_eq!(seen.ciphertext, split.ciphertext);

    let keys = schedule.key_vectors(group);
    let distinct: std::collections::HashSet<_> = keys.iter().collect();
    println!("{} contents, {} distinct key combinations", keys.len(), distinct.len());

    let small = SystemParams::new(12, 8, 32, 8, 0.9)?;
    let report = key_uniformity_report(&small, 2000, &RngState::new(1))?;
    let chi = report.chi_square.expect("8-bit keys get a chi-square test");
    println!(
        "keys from a 0.9-biased source: max bit deviation {:.4}, chi-square p = {:.3}",
        report.max_bit_deviation(),
        chi.p_value
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> sapir::Result<()> {
    run_example()
}
