//! Witness traces: save, load, replay, and replay a guarded witness step by
//! step on the sequential program.

use gbach::bench::{case_vehicles, generate_rush_hour, move_count, validate_solution, Variant};
use gbach::checker::{check, replay, Limits};
use gbach::trace::Trace;

fn main() {
    let gl = generate_rush_hour(2, Variant::GL).unwrap();
    let seq = generate_rush_hour(2, Variant::NoGL).unwrap();
    let r = check(&gl, gl.formula("goal").unwrap(), Limits::default());
    let w = r.verdict.witness().expect("case 2 is solvable");
    let text = w.to_text();
    print!("{text}");

    let loaded = Trace::from_text(&text).unwrap();
    println!("replays on the guarded program: {:?}", replay(&loaded, &gl));
    let expanded = loaded.expand_guarded();
    println!("expanded to {} steps, replays on the sequential program: {:?}", expanded.len(), replay(&expanded, &seq));
    println!("{} moves, board oracle: {:?}", move_count(&loaded), validate_solution(&loaded, &case_vehicles(2).unwrap()));
}
