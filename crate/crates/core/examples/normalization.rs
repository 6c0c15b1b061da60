// Rewriting a supported name as a packet scheme over its support.

use cascade_core::cascade::{Condition, Coordinate};
use cascade_core::forest::{NodeId, PredecessorForest};
use cascade_core::names::{
    check_support, normalize, same_semantics, CoordinateBox, RawName, SweepConfig,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let forest = PredecessorForest::star(3)?;
    let cbox = CoordinateBox::new(forest.full_window(), 1, 2)?;
    let a = forest.window([NodeId(0)])?;
    let c = |n, b, v| (Coordinate::new(n, 0, b), v);

    // 3 is in the name when (0,0,0) is set; the second pair only adds an
    // off-support coordinate and changes nothing
    let name = RawName::from_pairs([
        (3, Condition::from_entries([c(0, 0, true)])?),
        (3, Condition::from_entries([c(0, 0, true), c(1, 1, false)])?),
        (5, Condition::from_entries([c(0, 1, false)])?),
    ]);
    let config = SweepConfig::default();
    let verdict = check_support(&name, &a, &cbox, &config)?;
    println!(
        "supported by {a}: {} ({} assignments)",
        verdict.supported, verdict.assignments_checked
    );

    let scheme = normalize(&name, &a, &cbox, &config)?;
    print!("{}", scheme.to_text());
    assert!(same_semantics(&name, &scheme, &cbox)?);

    let off = RawName::from_pairs([(0, Condition::from_entries([c(1, 0, true)])?)]);
    let bad = check_support(&off, &a, &cbox, &config)?;
    println!("a name reading node 1 is supported: {}", bad.supported);
    assert!(!bad.supported);
    Ok(())
}

fn main() {
    run_example().expect("normalization example failed");
}
