#[allow(dead_code)]
mod canonical_selector {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/canonical_selector.rs"
    ));
}

#[allow(dead_code)]
mod divisibility_lift {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/divisibility_lift.rs"
    ));
}

#[allow(dead_code)]
mod dyadic_quotient {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/dyadic_quotient.rs"
    ));
}

#[allow(dead_code)]
mod forest_closure {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/forest_closure.rs"
    ));
}

#[allow(dead_code)]
mod no_selector {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/no_selector.rs"
    ));
}

#[allow(dead_code)]
mod normalization {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/normalization.rs"
    ));
}

#[allow(dead_code)]
mod odd_fixed_point {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/odd_fixed_point.rs"
    ));
}

#[allow(dead_code)]
mod shielding {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/shielding.rs"
    ));
}

#[allow(dead_code)]
mod star_span {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/star_span.rs"
    ));
}

#[allow(dead_code)]
mod transport {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/transport.rs"
    ));
}

#[allow(dead_code)]
mod two_layer_code {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/two_layer_code.rs"
    ));
}

#[test]
fn canonical_selector_example_runs() {
    canonical_selector::run_example().expect("canonical_selector example should run");
}

#[test]
fn divisibility_lift_example_runs() {
    divisibility_lift::run_example().expect("divisibility_lift example should run");
}

#[test]
fn dyadic_quotient_example_runs() {
    dyadic_quotient::run_example().expect("dyadic_quotient example should run");
}

#[test]
fn forest_closure_example_runs() {
    forest_closure::run_example().expect("forest_closure example should run");
}

#[test]
fn no_selector_example_runs() {
    no_selector::run_example().expect("no_selector example should run");
}

#[test]
fn normalization_example_runs() {
    normalization::run_example().expect("normalization example should run");
}

#[test]
fn odd_fixed_point_example_runs() {
    odd_fixed_point::run_example().expect("odd_fixed_point example should run");
}

#[test]
fn shielding_example_runs() {
    shielding::run_example().expect("shielding example should run");
}

#[test]
fn star_span_example_runs() {
    star_span::run_example().expect("star_span example should run");
}

#[test]
fn transport_example_runs() {
    transport::run_example().expect("transport example should run");
}

#[test]
fn two_layer_code_example_runs() {
    two_layer_code::run_example().expect("two_layer_code example should run");
}
