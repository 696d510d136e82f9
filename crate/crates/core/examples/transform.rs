//! Introduce guarded lists into the sequential Rush Hour program and
//! compare with the hand-written guarded variant.

use gbach::bench::{generate_rush_hour, Variant};
use gbach::parser::print_program;
use gbach::refinement::transform_to_guarded;

fn main() {
    let seq = generate_rush_hour(1, Variant::NoGL).unwrap();
    let goal = seq.formula("goal").unwrap().as_reach().unwrap().clone();
    let (gl, report) = transform_to_guarded(&seq, &goal, false);
    print!("{}", report.render("case1-nogl"));
    println!("same as the guarded variant: {}", gl == generate_rush_hour(1, Variant::GL).unwrap());
    print!("{}", print_program(&gl));
}
