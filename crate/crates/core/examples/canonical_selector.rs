// Choosing one of three distinct trace profiles by least code.

use cascade_core::forest::{NodeId, PredecessorForest};
use cascade_core::selectors::{canonical_selector, TraceProfile};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let forest = PredecessorForest::chain(2)?;
    let w = forest.full_window();
    let profiles = [
        TraceProfile::new(&w, [NodeId(0)])?,
        TraceProfile::new(&w, [NodeId(1)])?,
        TraceProfile::new(&w, [NodeId(0), NodeId(1)])?,
    ];
    let k = canonical_selector(&profiles)?;
    println!(
        "selected {:?} with code {:?}",
        profiles[k].nodes(),
        profiles[k].code()
    );
    assert_eq!(k, 1);

    let dup = [
        profiles[0].clone(),
        profiles[0].clone(),
        profiles[2].clone(),
    ];
    println!("duplicates: {}", canonical_selector(&dup).unwrap_err());
    Ok(())
}

fn main() {
    run_example().expect("canonical_selector example failed");
}
