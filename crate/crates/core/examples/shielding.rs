// A toggle that avoids the shield set of a condition fixes it.

use cascade_core::cascade::{shield_set, CascadeAutomorphism, Condition, Coordinate, ToggleSet};
use cascade_core::forest::{NodeId, PredecessorForest};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let forest = PredecessorForest::star(3)?;
    let q = Condition::from_entries([
        (Coordinate::new(0, 0, 1), true),
        (Coordinate::new(2, 0, 4), false),
        (Coordinate::new(1, 1, 0), true),
    ])?;
    let shield = shield_set(&q, NodeId(0), 0, &forest)?;
    println!("shield of {q:?} at (0, row 0): {shield:?}");
    assert_eq!(shield.iter().copied().collect::<Vec<_>>(), vec![1, 4]);

    let tau = CascadeAutomorphism::generator(
        &forest,
        NodeId(0),
        0,
        ToggleSet::cofinite(shield.iter().copied()),
    )?;
    assert_eq!(tau.apply(&q), q);
    println!("toggle {} fixes q", ToggleSet::cofinite(shield));

    let hit = CascadeAutomorphism::generator(&forest, NodeId(0), 0, ToggleSet::singleton(4))?;
    println!("toggle fin{{4}} moves q to {:?}", hit.apply(&q));
    assert_ne!(hit.apply(&q), q);
    Ok(())
}

fn main() {
    run_example().expect("shielding example failed");
}
