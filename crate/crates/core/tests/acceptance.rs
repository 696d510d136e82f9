//! Acceptance run: one PASS/FAIL line per criterion. Built without the
//! libtest harness so the lines are always printed.
//!
//! `GBACH_SEED` changes the seed of the randomized corpora.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use gbach::ast::{Agent, GuardedList, Program};
use gbach::bench::{both_variants, generate_rush_hour, run_benchmark, BenchOptions, Variant};
use gbach::checker::{check, enumerate_space, final_observables, random_run, CheckOptions, Limits, Verdict};
use gbach::corpus::{self, random_chain_program, random_finite_agent, random_guardable_chain, random_store, seed_from_env};
use gbach::logic::{PropFormula, TemporalFormula};
use gbach::parser::{parse_agent, parse_program, parse_store};
use gbach::refinement::{
    check_f_refinement, check_refinement, find_f_preserving_contraction, histories, observables_of, transform_to_guarded,
    Action,
};
use gbach::semantics::{normal_form, successors, Config, EngineError, Rule};
use gbach::store::Store;

type Outcome = Result<String, String>;

fn main() {
    let seed = seed_from_env(20240611);
    println!("acceptance: seed {seed}");
    let criteria: [(&str, fn(u64) -> Outcome); 8] = [
        ("rule coverage", rule_coverage),
        ("rush hour cases 1-3 hold in both variants and pass the board oracle", rush_hour_solvable),
        ("guarded lists expand fewer states and run at least 2x faster on cases 2-3", guarded_gain),
        ("normal form keeps final observables on random agents", normal_form_observables),
        ("guarded chains refine sequences; transformation keeps Reach verdicts", chain_refinement),
        ("guarded move snippet is an F-preserving contraction of the sequential one", contraction_snippet),
        ("BFS witnesses are shortest (iterative-deepening oracle)", bfs_minimality),
        ("determinism and parallel mode", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = std::panic::catch_unwind(|| f(seed)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail}; {secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({why}; {secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn program(src: &str) -> Program {
    parse_program(src).unwrap_or_else(|d| panic!("{d:?}\n{src}"))
}

fn store(s: &str) -> Store {
    parse_store(s).unwrap()
}

// 1 -----------------------------------------------------------------------

/// The program's main agent from `store` must have exactly one successor,
/// reached by `derivation`, ending in `(agent, store)`.
fn forced(src: &str, from: &str, derivation: &[Rule], agent: &str, to: &str) -> Result<(), String> {
    let p = program(src);
    let succs = successors(&Config::new(p.main.clone(), store(from)), &p).map_err(|e| e.to_string())?;
    ensure(succs.len() == 1, || format!("`{src}`: {} successors", succs.len()))?;
    let s = &succs[0];
    ensure(s.label.derivation == derivation, || format!("`{src}`: derivation {:?}", s.label.derivation))?;
    ensure(s.label.rule == *derivation.last().filter(|r| **r != Rule::Le).unwrap_or(&Rule::GL), || {
        format!("`{src}`: rule {}", s.label.rule)
    })?;
    let want = if agent == "E" { Agent::Done } else { parse_agent(agent, &p).unwrap() };
    ensure(s.config.agent == want, || format!("`{src}`: continues as {}", s.config.agent))?;
    ensure(s.config.store == store(to), || format!("`{src}`: store {}", s.config.store))
}

fn blocked(src: &str, from: &str) -> Result<(), String> {
    let p = program(src);
    let succs = successors(&Config::new(p.main.clone(), store(from)), &p).map_err(|e| e.to_string())?;
    ensure(succs.is_empty(), || format!("`{src}` from {from} should block"))
}

fn rule_coverage(_: u64) -> Outcome {
    use Rule::*;
    let start = Instant::now();
    forced("run tell(a).", "{}", &[T], "E", "{a:1}")?;
    forced("run tell(a).", "{a:1}", &[T], "E", "{a:2}")?;
    forced("run ask(a).", "{a:1}", &[A], "E", "{a:1}")?;
    blocked("run ask(a).", "{}")?;
    forced("run get(a).", "{a:2}", &[G], "E", "{a:1}")?;
    blocked("run get(a).", "{b:1}")?;
    forced("run nask(a).", "{b:1}", &[N], "E", "{b:1}")?;
    blocked("run nask(a).", "{a:1}")?;
    forced("gprim move.\nrun move(red, 1).", "{a:1}", &[Gr], "E", "{a:1}")?;
    forced("run tell(a); ask(b).", "{}", &[S, T], "ask(b)", "{a:1}")?;
    forced("run ask(a) || tell(b).", "{}", &[P, T], "ask(a)", "{b:1}")?;
    forced("run ask(a) + tell(b).", "{}", &[C, T], "E", "{b:1}")?;
    forced("run (1 < 2) -> tell(a) <> tell(b).", "{}", &[Co, T], "E", "{a:1}")?;
    forced("run (2 < 1) -> tell(a) <> tell(b).", "{}", &[Co, T], "E", "{b:1}")?;
    blocked("run (2 < 1) -> tell(a).", "{}")?;
    forced("eset S = {x, y}.\nproc P(v: S) = tell(v).\nrun P(x).", "{}", &[Pc, T], "E", "{x:1}")?;
    forced("run [get(a)].", "{a:1}", &[GL, G, Le], "E", "{}")?;
    forced("run [get(a) -> tell(b)].", "{a:1}", &[GL, G, Ln, T, Le], "E", "{b:1}")?;
    forced("gprim move.\nrun [ask(a) -> move(1), tell(b)].", "{a:1}", &[GL, A, Ln, Gr, Ln, T, Le], "E", "{a:1, b:1}")?;
    blocked("run [get(a) -> tell(b)].", "{}")?;
    // guard fires, tail blocks: an error, never a silent partial step
    let p = program("run [tell(a) -> get(b)].");
    let r = successors(&Config::new(p.main.clone(), Store::new()), &p);
    ensure(matches!(r, Err(EngineError::GuardedTailFailure { index: 1, .. })), || format!("tail failure gave {r:?}"))?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok("13 rules, 22 forced outcomes".into())
}

// 2, 3 --------------------------------------------------------------------

fn rush_hour_solvable(_: u64) -> Outcome {
    let opts = BenchOptions { repeats: 1, ..BenchOptions::default() };
    let report = run_benchmark(&both_variants(&[1, 2, 3]), &opts).map_err(|e| e.to_string())?;
    for r in &report.rows {
        let cell = format!("case {} {}", r.cell.case, r.cell.variant);
        ensure(r.result.verdict.holds(), || format!("{cell}: {}", r.result.verdict.name()))?;
        ensure(r.validated(), || format!("{cell}: {:?}", r.validation))?;
        ensure(r.result.stats.states_discovered <= 10_000_000, || format!("{cell}: too many states"))?;
        ensure(r.wall < Duration::from_secs(15 * 60), || format!("{cell}: too slow"))?;
    }
    let nogl3 = report.row(3, Variant::NoGL).unwrap();
    Ok(format!("6 witnesses replayed and validated; NoGL case 3: {} states", nogl3.result.stats.states_expanded))
}

fn guarded_gain(_: u64) -> Outcome {
    let opts = BenchOptions { repeats: 5, ..BenchOptions::default() };
    let report = run_benchmark(&both_variants(&[1, 2, 3]), &opts).map_err(|e| e.to_string())?;
    let cmp = report.comparisons();
    ensure(cmp.len() == 3, || "not every case pair completed".into())?;
    let mut detail = Vec::new();
    for c in &cmp {
        let gl = report.row(c.case, Variant::GL).unwrap().result.stats.states_expanded;
        let nogl = report.row(c.case, Variant::NoGL).unwrap().result.stats.states_expanded;
        ensure(gl < nogl, || format!("case {}: GL {gl} states, NoGL {nogl}", c.case))?;
        if c.case >= 2 {
            ensure(c.speedup >= 2.0, || format!("case {}: speedup {:.2}", c.case, c.speedup))?;
        }
        detail.push(format!("case {}: states {gl}/{nogl}, speedup {:.1}x", c.case, c.speedup));
    }
    Ok(detail.join(", "))
}

// 4 -----------------------------------------------------------------------

fn normal_form_observables(seed: u64) -> Outcome {
    let start = Instant::now();
    let mut rng = corpus::rng(seed);
    let empty = Program::from_agent(Agent::Done);
    let n = 150;
    for i in 0..n {
        let a = random_finite_agent(&mut rng, 6);
        let nf = normal_form(&a).map_err(|e| e.to_string())?;
        for s in [Store::new(), random_store(&mut rng)] {
            let of_a = final_observables(&empty, &Config::new(a.clone(), s.clone()), 100_000).map_err(|e| e.to_string())?;
            let of_nf = final_observables(&empty, &Config::new(nf.clone(), s.clone()), 100_000).map_err(|e| e.to_string())?;
            ensure(of_a == of_nf, || format!("agent #{i} `{a}` from {s}: {of_a:?} vs {of_nf:?}"))?;
            // same sets through full history enumeration
            let via_histories = observables_of(&histories(&a, &s, &empty, None).map_err(|e| e.to_string())?);
            ensure(via_histories == of_a, || format!("agent #{i} `{a}`: histories disagree"))?;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(30), || format!("took {took:?}"))?;
    Ok(format!("{n} agents, 2 stores each"))
}

// 5 -----------------------------------------------------------------------

fn chain_refinement(seed: u64) -> Outcome {
    let mut rng = corpus::rng(seed.wrapping_add(1));
    let empty = Program::from_agent(Agent::Done);
    let chains = 120;
    for i in 0..chains {
        let chain = random_guardable_chain(&mut rng);
        let seq = Agent::seq_all(chain.iter().cloned().map(Agent::Prim));
        let gl = Agent::from(GuardedList::new(chain[0].clone(), chain[1..].to_vec()));
        let stores = [random_store(&mut rng), random_store(&mut rng)];
        let r = check_refinement(&gl, &seq, &stores, &empty, 8).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("chain #{i} `{gl}`: {:?}", r.counterexample))?;
    }

    let mut transformed = 0;
    let mut tried = 0;
    while transformed < 60 && tried < 1000 {
        tried += 1;
        let src = random_chain_program(&mut rng);
        let p = program(&src);
        let tf = p.formula("goal").unwrap().clone();
        let f = tf.as_reach().unwrap().clone();
        let (q, report) = transform_to_guarded(&p, &f, false);
        let before = check(&p, &tf, Limits::default()).verdict;
        if report.count(Action::Transformed) > 0 {
            transformed += 1;
            let after = check(&q, &tf, Limits::default()).verdict;
            ensure(!matches!(before, Verdict::Unknown { .. }), || format!("unknown on\n{src}"))?;
            ensure(before.name() == after.name(), || format!("{} before, {} after on\n{src}", before.name(), after.name()))?;
        }
        // one way only when forced
        let (forced, _) = transform_to_guarded(&p, &f, true);
        if check(&forced, &tf, Limits::default()).verdict.holds() {
            ensure(before.holds(), || format!("forced transform proves more than the original on\n{src}"))?;
        }
    }
    ensure(transformed >= 50, || format!("only {transformed} programs had a transformable chain"))?;
    Ok(format!("{chains} chains refine at depth 8; {transformed} transformed programs keep their verdict"))
}

// 6 -----------------------------------------------------------------------

fn contraction_snippet(_: u64) -> Outcome {
    let gl_prog = generate_rush_hour(1, Variant::GL).map_err(|e| e.to_string())?;
    let seq_prog = generate_rush_hour(1, Variant::NoGL).map_err(|e| e.to_string())?;
    let a = parse_agent("[get(free(pred(3),3)) -> move(purple,pred(3),3), tell(free(succ(succ(3)),3))]", &gl_prog).unwrap();
    let b = parse_agent("get(free(pred(3),3)); move(purple,pred(3),3); tell(free(succ(succ(3)),3))", &gl_prog).unwrap();
    let from = store("{free(2,3):1}");
    let fs: Vec<PropFormula> = ["#out = 1", "#free(2,3) = 1"]
        .iter()
        .map(|s| {
            let tf = gbach::parser::parse_formula(&format!("Reach({s})"), &gl_prog).unwrap();
            tf.as_reach().unwrap().clone()
        })
        .collect();
    let mut checked = 0;
    for depth in 1..=8 {
        for f in &fs {
            let r = check_f_refinement(&a, &b, &[from.clone()], &gl_prog, depth, f).map_err(|e| e.to_string())?;
            ensure(r.holds, || format!("snippet, depth {depth}, {f}: {:?}", r.counterexample))?;
            checked += r.histories_checked;
        }
    }
    // The whole truck procedure keeps moving up and down. Its tails never
    // tell `out`, so it must preserve #out = 1. Moving back down tells
    // free(2,3) in a tail, so #free(2,3) = 1 must not be preserved.
    let call = parse_agent("VTruck(3,3,purple)", &gl_prog).unwrap();
    let mut counterexample = false;
    for depth in 1..=8 {
        let hg = histories(&call, &from, &gl_prog, Some(depth)).map_err(|e| e.to_string())?;
        let hs = histories(&call, &from, &seq_prog, Some(3 * depth)).map_err(|e| e.to_string())?;
        for (k, f) in fs.iter().enumerate() {
            for h in &hg {
                checked += 1;
                let ok = hs.iter().any(|g| find_f_preserving_contraction(h, g, f).is_some());
                if k == 0 {
                    ensure(ok, || format!("VTruck, depth {depth}, {f}: uncovered {h}"))?;
                }
                counterexample |= k == 1 && !ok;
            }
        }
    }
    ensure(counterexample, || "VTruck should break #free(2,3) = 1 once it moves back".into())?;
    Ok(format!("{checked} history checks up to depth 8"))
}

// 7 -----------------------------------------------------------------------

/// Shortest number of steps to a store satisfying `pf`, by iterative
/// deepening over depth-first search.
fn iddfs(prog: &Program, pf: &PropFormula, max_depth: usize) -> Option<usize> {
    fn dls(cfg: &Config, prog: &Program, pf: &PropFormula, left: usize, seen: &mut HashMap<Vec<u8>, usize>) -> bool {
        if pf.eval(&cfg.store) {
            return true;
        }
        if left == 0 {
            return false;
        }
        let key = cfg.key();
        if seen.get(&key).is_some_and(|&l| l >= left) {
            return false;
        }
        seen.insert(key, left);
        let succs = successors(cfg, prog).expect("corpus programs do not fail");
        succs.iter().any(|s| dls(&s.config, prog, pf, left - 1, seen))
    }
    let init = Config::initial(prog);
    (0..=max_depth).find(|&d| dls(&init, prog, pf, d, &mut HashMap::new()))
}

fn bfs_minimality(seed: u64) -> Outcome {
    let mut rng = corpus::rng(seed.wrapping_add(2));
    let mut corpus: Vec<(String, Program, TemporalFormula)> = Vec::new();
    for case in [1, 2] {
        for v in [Variant::GL, Variant::NoGL] {
            let p = generate_rush_hour(case, v).map_err(|e| e.to_string())?;
            let tf = p.formula("goal").unwrap().clone();
            corpus.push((format!("rush hour {case} {v}"), p, tf));
        }
    }
    for i in 0..60 {
        let src = random_chain_program(&mut rng);
        let p = program(&src);
        let tf = p.formula("goal").unwrap().clone();
        let (q, _) = transform_to_guarded(&p, tf.as_reach().unwrap(), false);
        corpus.push((format!("random #{i}"), p, tf.clone()));
        corpus.push((format!("random #{i} transformed"), q, tf));
    }
    for i in 0..40 {
        let a = random_finite_agent(&mut rng, 6);
        let p = Program::from_agent(a);
        let goal = ["#a = 2", "#b = 0 & #a = 1", "#c >= 1"][i % 3];
        let tf = gbach::parser::parse_formula(&format!("Reach({goal})"), &p).unwrap();
        corpus.push((format!("agent #{i}"), p, tf));
    }
    let (mut compared, mut holds) = (0, 0);
    for (name, p, tf) in &corpus {
        let (space, _) = enumerate_space(p, Limits::states(10_000), false);
        if space.states_discovered > 10_000 || space.bound != gbach::checker::BoundStatus::Complete {
            continue;
        }
        let pf = tf.as_reach().unwrap();
        let want = iddfs(p, pf, space.states_discovered);
        let got = check(p, tf, Limits::default()).witness_len();
        ensure(got == want, || format!("{name}: BFS {got:?}, oracle {want:?}"))?;
        compared += 1;
        holds += usize::from(got.is_some());
    }
    ensure(compared >= 100, || format!("only {compared} spaces compared"))?;
    Ok(format!("{compared} state spaces, {holds} with witnesses"))
}

// 8 -----------------------------------------------------------------------

fn determinism(seed: u64) -> Outcome {
    let mut rng = corpus::rng(seed.wrapping_add(3));
    let mut progs = vec![
        generate_rush_hour(2, Variant::NoGL).map_err(|e| e.to_string())?,
        generate_rush_hour(3, Variant::GL).map_err(|e| e.to_string())?,
    ];
    progs.extend((0..20).map(|_| program(&random_chain_program(&mut rng))));
    for (i, p) in progs.iter().enumerate() {
        let tf = p.formula("goal").unwrap();
        let text = |workers: usize| {
            let r = check(p, tf, CheckOptions { limits: Limits::default(), workers });
            let w = r.verdict.witness().map(|t| t.to_text()).unwrap_or_default();
            (r.report(false), w, r.verdict.name(), r.witness_len())
        };
        let (one, two, par) = (text(1), text(1), text(4));
        ensure(one == two, || format!("program #{i}: two sequential runs differ"))?;
        ensure(one.2 == par.2 && one.3 == par.3, || format!("program #{i}: parallel gives {} / {:?}", par.2, par.3))?;
        ensure(one.1 == par.1, || format!("program #{i}: parallel witness differs"))?;
        let a = random_run(p, seed, 200).trace.to_text();
        ensure(a == random_run(p, seed, 200).trace.to_text(), || format!("program #{i}: random run not reproducible"))?;
    }
    Ok(format!("{} programs, 1 and 4 workers", progs.len()))
}
