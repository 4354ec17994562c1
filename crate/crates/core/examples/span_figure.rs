// Probability that some base vector is a sum of at most floor(delta m)
// independent random queries, with the union bound beside it.

use sapir::analysis::span_inclusion_experiment;
use sapir::gf2::RngState;

pub fn run_example() -> sapir::Result<()> {
    let table = span_inclusion_experiment(12, &[0.1, 0.2, 0.3, 0.4], 100, &RngState::new(6))?;
    println!("delta,l,trials,probability,analytic_bound");
    for row in &table.rows {
        let bound = row.analytic_bound.map_or(String::new(), |b| format!("{b:.4}"));
        println!("{},{},{},{},{bound}", row.delta, row.l, row.trials, row.probability);
    }
    println!(
        "subset search agreed with the solution weight on {} trials",
        table.agreeing_trials
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> sapir::Result<()> {
    run_example()
}
