// The complement-swap witness: a symmetry fixing a condition and a support
// that exchanges the equality pattern of two fresh rows with its complement.

use cascade_core::cascade::Condition;
use cascade_core::forest::{NodeId, PredecessorForest};
use cascade_core::names::{CoordinateBox, SweepConfig};
use cascade_core::selectors::swap_witness;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (header, q) = Condition::parse_text("box 4 1 3\n2 0 2 1\n")?;
    let forest = PredecessorForest::star(header.nodes as usize)?;
    let cbox = CoordinateBox::new(forest.full_window(), header.rows, header.bits)?;
    let a = forest.window([NodeId(0)])?;

    let witness = swap_witness(&q, &a, 0, &cbox, &SweepConfig::default())?;
    print!("{}", witness.to_text());
    assert!(witness.certificate.all_pass());

    let everything = forest.full_window();
    let err = swap_witness(&q, &everything, 0, &cbox, &SweepConfig::default()).unwrap_err();
    println!("with A = everything: {err}");
    Ok(())
}

fn main() {
    run_example().expect("no_selector example failed");
}
