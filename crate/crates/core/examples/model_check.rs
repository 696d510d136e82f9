//! Check reachability, `Next` and `Until` formulas and print witnesses.

use gbach::checker::{check, Limits, Verdict};
use gbach::parser::{parse_formula, parse_program};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/programs/producer_consumer.gbach");
    let prog = parse_program(&std::fs::read_to_string(path).unwrap()).unwrap();
    let formulas = [
        "all_done",
        "overflow",
        "Next Next (#slot = 2)",
        "(#done < 2) Until (#done = 2 & #slot = 2)",
    ];
    for f in formulas {
        let tf = match prog.formula(f) {
            Some(tf) => tf.clone(),
            None => parse_formula(f, &prog).unwrap(),
        };
        let r = check(&prog, &tf, Limits::default());
        println!("{tf}: {} after {} states", r.verdict.name(), r.stats.states_expanded);
        if let Verdict::Holds(w) = &r.verdict {
            for (i, step) in w.steps.iter().enumerate() {
                println!("  {i:>2}. {}", step.label);
            }
        }
    }
}
