//! A guarded list runs in one atomic step; the same primitives in sequence
//! expose every intermediate store. Compare the state graphs.

use gbach::checker::{enumerate_space, Limits};
use gbach::parser::parse_program;

fn main() {
    let atomic = "run [tell(a) -> tell(b)] || [tell(c) -> tell(d)].";
    let split = "run tell(a); tell(b) || tell(c); tell(d).";
    for src in [atomic, split] {
        let prog = parse_program(src).unwrap();
        let (stats, graph) = enumerate_space(&prog, Limits::default(), true);
        println!("{src}\n  {} states, {} edges", stats.states_discovered, stats.edges);
        print!("{}", graph.unwrap().export());
    }
}
