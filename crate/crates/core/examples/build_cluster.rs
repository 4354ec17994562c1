// Encode a content library onto servers, form reconstruction groups, and
// round-trip the cluster through its binary file format.

use sapir::storage::{load_cluster, save_cluster, Cluster, GroupingPolicy, SystemParams};

pub fn run_example() -> sapir::Result<()> {
    let params = SystemParams::new(12, 8, 16, 256, 0.5)?;
    let cluster = Cluster::build(params, 3)?;
    for g in &cluster.groups {
        println!(
            "group {}: servers {:?}, stacked matrix {}x{}, coordinator {}",
            g.group_id,
            g.member_ids,
            g.stacked.rows(),
            g.stacked.cols(),
            g.coordinator_id
        );
    }

    let spare = Cluster::build_with(params, 3, GroupingPolicy::WithSpare)?;
    println!("with a spare member per group: {} groups", spare.groups.len());

    let path = std::env::temp_dir().join(format!("sapir-example-{}.sapr", std::process::id()));
    save_cluster(&path, &cluster)?;
    let loaded = load_cluster(&path)?;
    std::fs::remove_file(&path).ok();
    assert_eq!(loaded.servers, cluster.servers);
    loaded.check_integrity()?;
    println!("saved and reloaded {} servers", loaded.servers.len());

    let blind = cluster.encoded_only();
    println!("encoded-only copy keeps plaintext: {}", blind.library.is_some());
    Ok(())
}

#[allow(dead_code)]
fn main() -> sapir::Result<()> {
    run_example()
}
