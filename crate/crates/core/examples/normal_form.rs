//! The normal-form translation and its final observables.

use gbach::ast::{Agent, Program};
use gbach::checker::final_observables;
use gbach::parser::parse_agent;
use gbach::semantics::{is_normal_form, normal_form, Config};
use gbach::store::Store;

fn main() {
    let empty = Program::from_agent(Agent::Done);
    for src in ["tell(a)", "tell(a) || tell(b)", "(tell(a); get(a)) || ask(a)", "(tell(a) + nask(b)); tell(b) || get(a)"] {
        let a = parse_agent(src, &empty).unwrap();
        let nf = normal_form(&a).unwrap();
        assert!(is_normal_form(&nf));
        let of_a = final_observables(&empty, &Config::new(a, Store::new()), 10_000).unwrap();
        let of_nf = final_observables(&empty, &Config::new(nf.clone(), Store::new()), 10_000).unwrap();
        println!("{src}\n  => {nf}");
        let shown: Vec<String> = of_a.iter().map(|(s, m)| format!("{s} {m:?}")).collect();
        println!("  final observables: {} (same after translation: {})", shown.join(", "), of_a == of_nf);
    }
}
