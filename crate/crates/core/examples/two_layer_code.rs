// Coding a packet scheme by packet indices in a fixed enumeration.

use cascade_core::cascade::{Condition, Coordinate};
use cascade_core::forest::{NodeId, PredecessorForest};
use cascade_core::names::{
    normalize, same_semantics, two_layer_code, CoordinateBox, PacketEnumeration, RawName,
    SweepConfig, TwoLayerCode,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let forest = PredecessorForest::star(3)?;
    let cbox = CoordinateBox::new(forest.full_window(), 1, 2)?;
    let a = forest.window([NodeId(0)])?;
    let name = RawName::from_pairs([
        (
            1,
            Condition::from_entries([(Coordinate::new(0, 0, 1), true)])?,
        ),
        (4, Condition::new()),
    ]);
    let scheme = normalize(&name, &a, &cbox, &SweepConfig::default())?;
    let code = two_layer_code(&scheme, &cbox)?;
    let text = code.to_text();
    print!("{text}");

    let reread = TwoLayerCode::parse_text(&text, &forest)?;
    let decoded = reread.decode()?;
    assert!(same_semantics(&name, &decoded, &cbox)?);

    let en = PacketEnumeration::new(&cbox)?;
    println!(
        "{} conditions on a box of {} coordinates",
        en.total(),
        cbox.len()
    );
    Ok(())
}

fn main() {
    run_example().expect("two_layer_code example failed");
}
