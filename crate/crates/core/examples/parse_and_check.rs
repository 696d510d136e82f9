//! Parse a program, report static errors, print it back in canonical form.
//!
//! cargo run --example parse_and_check [FILE]

use gbach::parser::{parse_program, print_program};

fn main() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/programs");
    let files = match std::env::args().nth(1) {
        Some(f) => vec![f],
        None => vec![format!("{dir}/producer_consumer.gbach"), format!("{dir}/unguarded.gbach")],
    };
    for file in files {
        let text = std::fs::read_to_string(&file).expect("readable file");
        println!("== {file}");
        match parse_program(&text) {
            Ok(prog) => {
                println!("{} procedures, {} formulas", prog.procs.len(), prog.formulas.len());
                print!("{}", print_program(&prog));
            }
            Err(diags) => {
                for d in diags {
                    println!("{}", d.render(&file));
                }
            }
        }
    }
}
