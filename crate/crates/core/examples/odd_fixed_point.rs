// A 2-group acting on an odd set fixes a point.

use cascade_core::orbits::{close_group, odd_fixed_point, orbit_partition, Permutation};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = Permutation::from_cycles(5, &[&[0, 1]])?;
    let b = Permutation::from_cycles(5, &[&[2, 3]])?;
    let group = close_group(5, &[a, b])?;
    println!("group order {}", group.order());
    println!("orbits {:?}", orbit_partition(&group));
    let x = odd_fixed_point(&group)?;
    println!("fixed point {x}");
    assert_eq!(x, 4);

    let three = Permutation::from_cycles(3, &[&[0, 1, 2]])?;
    match close_group(3, &[three]) {
        Err(e) => println!("3-cycle rejected: {e}"),
        Ok(_) => unreachable!("a 3-cycle does not generate a 2-group"),
    }
    Ok(())
}

fn main() {
    run_example().expect("odd_fixed_point example failed");
}
