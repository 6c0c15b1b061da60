// Writing a 0/1 vector on a closed window as a sum of one-step stars.

use cascade_core::f2linalg::{combine_stars, solve_star_span, star_matrix, F2Vector};
use cascade_core::forest::PredecessorForest;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let fork = PredecessorForest::star(3)?;
    let k = fork.full_window();

    // children come first, so the matrix is unit upper triangular
    let m = star_matrix(&k)?;
    print!("star matrix on {k}:\n{}", m.to_text());
    assert!(m.is_upper_unitriangular());

    for target in ["111", "100", "010", "000"] {
        let t = F2Vector::parse_bits(&k, target)?;
        let coefficients = solve_star_span(&k, &t)?;
        let back = combine_stars(&k, coefficients.iter().copied())?;
        assert_eq!(back, t);
        println!("{target} = sum of stars at {coefficients:?}");
    }
    Ok(())
}

fn main() {
    run_example().expect("star_span example failed");
}
