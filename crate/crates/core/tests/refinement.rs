use gbach::ast::{Agent, Program};
use gbach::bench::{generate_rush_hour, Variant};
use gbach::checker::{final_observables, Limits};
use gbach::corpus::{random_finite_agent, random_store, rng};
use gbach::logic::PropFormula;
use gbach::parser::{parse_agent, parse_formula, parse_store};
use gbach::refinement::{
    check_f_refinement, check_refinement, find_f_preserving_contraction, histories, is_contraction, observables_of,
    History, Terminal,
};
use gbach::semantics::Config;
use gbach::store::Store;
use gbach::term::SiTerm;
use rand::Rng;

fn empty() -> Program {
    Program::from_agent(Agent::Done)
}

fn prop(text: &str, prog: &Program) -> PropFormula {
    parse_formula(&format!("Reach({text})"), prog).unwrap().as_reach().unwrap().clone()
}

/// Contraction by trying every way of keeping `hc.len()` stores of `h`.
fn brute_contraction(hc: &History, h: &History, f: Option<&PropFormula>) -> bool {
    let (n, m) = (hc.stores.len(), h.stores.len());
    let finite = hc.terminal != Terminal::Ongoing;
    if finite && hc.terminal != h.terminal {
        return false;
    }
    if n == 0 || n > m {
        return n == 0 && m == 0;
    }
    (0u32..1 << m).filter(|mask| mask.count_ones() as usize == n).any(|mask| {
        let kept: Vec<usize> = (0..m).filter(|j| mask & (1 << j) != 0).collect();
        if finite && kept[n - 1] != m - 1 {
            return false;
        }
        if (0..n).any(|i| hc.stores[i] != h.stores[kept[i]]) {
            return false;
        }
        let Some(f) = f else { return true };
        (0..n).all(|i| {
            let start = if i == 0 { 0 } else { kept[i - 1] + 1 };
            (start..kept[i]).all(|k| f.eval(&h.stores[k]) == f.eval(&hc.stores[i]))
        })
    })
}

fn random_history(r: &mut impl Rng, max_len: usize) -> History {
    let len = r.gen_range(1..=max_len);
    let stores = (0..len)
        .map(|_| Store::from_terms(std::iter::repeat_n(SiTerm::token("a"), r.gen_range(0..3))))
        .collect();
    let terminal = [Terminal::Success, Terminal::Failure, Terminal::Ongoing][r.gen_range(0..3)];
    History::new(stores, terminal)
}

#[test]
fn contraction_search_agrees_with_brute_force() {
    let f = prop("#a = 1", &empty());
    let mut r = rng(11);
    let mut found = [0, 0];
    for _ in 0..3000 {
        let h = random_history(&mut r, 7);
        let hc = random_history(&mut r, 4);
        let plain = is_contraction(&hc, &h);
        assert_eq!(plain.is_some(), brute_contraction(&hc, &h, None), "{hc} vs {h}");
        let pres = find_f_preserving_contraction(&hc, &h, &f);
        assert_eq!(pres.is_some(), brute_contraction(&hc, &h, Some(&f)), "{hc} vs {h}");
        found[0] += usize::from(plain.is_some());
        found[1] += usize::from(pres.is_some());
    }
    // the corpus exercises both outcomes
    assert!(found[0] > 100 && found[1] > 50 && found[0] > found[1], "{found:?}");
}

#[test]
fn histories_agree_with_final_observables() {
    let mut r = rng(5);
    for _ in 0..100 {
        let a = random_finite_agent(&mut r, 4);
        let s = random_store(&mut r);
        let hs = histories(&a, &s, &empty(), None).unwrap();
        let of = final_observables(&empty(), &Config::new(a.clone(), s.clone()), Limits::default().max_states).unwrap();
        assert_eq!(observables_of(&hs), of, "{a} from {s}");
    }
}

#[test]
fn guarded_list_refines_its_sequence_but_not_back() {
    let p = empty();
    let gl = parse_agent("[get(a) -> tell(b), tell(c)] || get(b)", &p).unwrap();
    let seq = parse_agent("get(a); tell(b); tell(c) || get(b)", &p).unwrap();
    let stores = [parse_store("{a:1}").unwrap(), parse_store("{}").unwrap(), parse_store("{a:2}").unwrap()];
    let fwd = check_refinement(&gl, &seq, &stores, &p, 6).unwrap();
    assert!(fwd.holds);
    assert!(fwd.histories_checked >= 3);
    let back = check_refinement(&seq, &gl, &stores, &p, 6).unwrap();
    assert!(!back.holds);
    // the uncovered history passes through a store the guarded list hides
    let cx = back.counterexample.unwrap();
    assert!(cx.history.stores.iter().any(|s| s.is_empty() && cx.store.count(&SiTerm::token("a")) == 1));
}

#[test]
fn truck_move_preserves_the_exit_but_not_every_cell() {
    let gl_prog = generate_rush_hour(1, Variant::GL).unwrap();
    let seq_prog = generate_rush_hour(1, Variant::NoGL).unwrap();
    let snippet = "[get(free(pred(3),3)) -> move(purple,pred(3),3), tell(free(succ(succ(3)),3))]";
    let gl = parse_agent(snippet, &gl_prog).unwrap();
    let seq = parse_agent("get(free(pred(3),3)); move(purple,pred(3),3); tell(free(succ(succ(3)),3))", &gl_prog).unwrap();
    let from = [parse_store("{free(2,3):1}").unwrap()];
    for f in ["#out = 1", "#free(2,3) = 1"] {
        let r = check_f_refinement(&gl, &seq, &from, &gl_prog, 8, &prop(f, &gl_prog)).unwrap();
        assert!(r.holds, "{f}");
    }

    // the whole procedure can move the truck back down, which tells free(2,3)
    let call = parse_agent("VTruck(3,3,purple)", &gl_prog).unwrap();
    let from = &from[0];
    let hg = histories(&call, from, &gl_prog, Some(4)).unwrap();
    let hs = histories(&call, from, &seq_prog, Some(12)).unwrap();
    let covered = |f: &PropFormula| hg.iter().all(|h| hs.iter().any(|g| find_f_preserving_contraction(h, g, f).is_some()));
    assert!(covered(&prop("#out = 1", &gl_prog)));
    assert!(!covered(&prop("#free(2,3) = 1", &gl_prog)));
}
