// Moving one condition onto another without touching the rows of a support.

use cascade_core::cascade::{pad_common_domain, transport, Condition, Coordinate};
use cascade_core::forest::{NodeId, PredecessorForest};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // chain 0 <- 1 <- 2 <- 3, support {0}
    let forest = PredecessorForest::chain(4)?;
    let a = forest.window([NodeId(0)])?;
    let p = Condition::from_entries([
        (Coordinate::new(0, 0, 0), true),
        (Coordinate::new(2, 0, 1), false),
    ])?;
    let q = Condition::from_entries([
        (Coordinate::new(0, 0, 0), true),
        (Coordinate::new(3, 0, 1), true),
    ])?;

    let pi = transport(&p, &q, &a, &forest)?;
    let (pp, qp) = pad_common_domain(&p, &q);
    println!("p' = {pp:?}\nq' = {qp:?}\npi = {pi:?}");
    assert_eq!(pi.apply(&pp), qp);
    assert!(pi.fixes_rows_over(&a)?);

    for spec in pi.factorize() {
        println!(
            "  generator at node {} row {} toggling {}",
            spec.node, spec.row, spec.toggles
        );
    }
    Ok(())
}

fn main() {
    run_example().expect("transport example failed");
}
