//! Histories, contractions and a bounded refinement check between the
//! guarded and the sequential form of a truck move.

use gbach::bench::{generate_rush_hour, Variant};
use gbach::parser::{parse_agent, parse_formula, parse_store};
use gbach::refinement::{check_f_refinement, check_refinement, histories, is_contraction};

fn main() {
    let prog = generate_rush_hour(1, Variant::GL).unwrap();
    let gl = parse_agent("[get(free(pred(3),3)) -> move(purple,pred(3),3), tell(free(succ(succ(3)),3))]", &prog).unwrap();
    let seq = parse_agent("get(free(pred(3),3)); move(purple,pred(3),3); tell(free(succ(succ(3)),3))", &prog).unwrap();
    let from = parse_store("{free(2,3):1}").unwrap();

    let hg = histories(&gl, &from, &prog, Some(8)).unwrap();
    let hs = histories(&seq, &from, &prog, Some(8)).unwrap();
    for h in &hg {
        println!("guarded:    {h}");
    }
    for h in &hs {
        println!("sequential: {h}");
    }
    let (a, b) = (hg.iter().next().unwrap(), hs.iter().next().unwrap());
    println!("contraction: {:?}", is_contraction(a, b));

    let r = check_refinement(&gl, &seq, &[from.clone()], &prog, 8).unwrap();
    println!("guarded refines sequential up to depth 8: {}", r.holds);
    for f in ["#out = 1", "#free(2,3) = 1"] {
        let pf = parse_formula(&format!("Reach({f})"), &prog).unwrap().as_reach().unwrap().clone();
        let r = check_f_refinement(&gl, &seq, &[from.clone()], &prog, 8, &pf).unwrap();
        println!("preserves {f}: {}", r.holds);
    }
    let back = check_refinement(&seq, &gl, &[from], &prog, 8).unwrap();
    println!("sequential refines guarded: {} (uncovered: {})", back.holds, back.counterexample.unwrap().history);
}
