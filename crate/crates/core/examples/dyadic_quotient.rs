// Translation-invariant partitions of F2^d are cosets of a subspace.

use cascade_core::orbits::{quotient_analysis, vector_string, TranslationPartition};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // label by the first coordinate
    let by_first = TranslationPartition::new(2, vec![0, 1, 0, 1])?;
    let q = quotient_analysis(&by_first);
    let basis: Vec<String> = q
        .subspace_basis
        .iter()
        .map(|&v| vector_string(v, 2))
        .collect();
    println!(
        "invariant={} classes={} W basis={basis:?}",
        q.invariant, q.class_count
    );
    assert_eq!(q.class_count, 2);

    let three = TranslationPartition::parse_text("2\n00 0\n10 1\n01 2\n11 2\n")?;
    let q = quotient_analysis(&three);
    println!(
        "three classes: invariant={} witness={:?}",
        q.invariant, q.witness
    );
    assert!(!q.invariant);
    Ok(())
}

fn main() {
    run_example().expect("dyadic_quotient example failed");
}
