// A choice function on the products `A_t × {0..k}` projects to one on `A_t`.

use std::collections::{BTreeMap, BTreeSet};

use cascade_core::selectors::{lift_choice, IndexedFamily};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let family = IndexedFamily::new(BTreeMap::from([
        (0, BTreeSet::from([10, 11])),
        (1, BTreeSet::from([20])),
    ]))?;
    let on_products = BTreeMap::from([(0, (11, 2)), (1, (20, 0))]);
    let choice = lift_choice(&family, 3, &on_products)?;
    println!("{on_products:?} projects to {choice:?}");
    assert!(family.is_choice(&choice));
    Ok(())
}

fn main() {
    run_example().expect("divisibility_lift example failed");
}
