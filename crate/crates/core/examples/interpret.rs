//! Step through a program by hand, then do one seeded random run.

use gbach::checker::random_run;
use gbach::parser::parse_program;
use gbach::semantics::{successors, Config};

const SRC: &str = "
gprim show.
run tell(a); ([get(a) -> tell(b), show(1)] || ask(a); tell(c)).
";

fn main() {
    let prog = parse_program(SRC).expect("valid program");
    let mut cfg = Config::initial(&prog);
    println!("start: {} with {}", cfg.agent, cfg.store);
    // always take the first move
    loop {
        let succs = successors(&cfg, &prog).expect("no engine error");
        for s in &succs {
            println!("  can do {} (via {:?}) -> {}", s.label, s.label.derivation, s.config.store);
        }
        let Some(first) = succs.into_iter().next() else { break };
        cfg = first.config;
        println!("took it: {} with {}", cfg.agent, cfg.store);
    }
    println!("terminated: {}", cfg.is_terminated());

    let run = random_run(&prog, 42, 100);
    println!("\nrandom run with seed 42 ({:?}):", run.end);
    print!("{}", run.trace.to_text());
}
