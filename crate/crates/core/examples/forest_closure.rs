// Closing node sets under the predecessor map and picking a fresh pair.
//
// ```bash
// cargo run -p cascade-core --example forest_closure
// ```

use cascade_core::forest::{NodeId, PredecessorForest};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // 1 -> 0, 2 -> 0, 3 -> 1
    let forest = PredecessorForest::from_parents(&[0, 0, 1])?;
    let closure = forest.rho_closure([NodeId(3)])?;
    println!("closure of {{3}}: {closure}");
    assert_eq!(closure.to_string(), "0 1 3");

    let text = PredecessorForest::from_parents(&[0, 0, 1, 0])?.to_text();
    println!("forest file:\n{text}");
    let reread: PredecessorForest = text.parse()?;

    let a = reread.window([0, 1, 3].map(NodeId))?;
    let (beta, gamma) = reread.fresh_separation(&a)?;
    println!("fresh pair outside {a}: beta={beta} gamma={gamma}");
    assert_eq!((beta, gamma), (NodeId(4), NodeId(2)));
    Ok(())
}

fn main() {
    run_example().expect("forest_closure example failed");
}
