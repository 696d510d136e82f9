//! Seeded random agents, stores and small programs for property tests.
//! Every generator takes the RNG explicitly; [`seed_from_env`] lets a run
//! pick its seed from `GBACH_SEED`.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::ast::{Agent, Prim, PrimKind};
use crate::store::Store;
use crate::term::SiTerm;

/// Environment variable holding the corpus seed.
pub const SEED_ENV: &str = "GBACH_SEED";

/// Seed from `GBACH_SEED`, or `default` when unset or not a number.
pub fn seed_from_env(default: u64) -> u64 {
    std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(default)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

const ATOMS: &[&str] = &["a", "b", "c"];

fn atom(rng: &mut impl Rng) -> SiTerm {
    SiTerm::token(ATOMS.choose(rng).expect("non-empty"))
}

/// A store over `a`, `b`, `c` with up to two copies of each.
pub fn random_store(rng: &mut impl Rng) -> Store {
    let mut s = Store::new();
    for a in ATOMS {
        for _ in 0..rng.gen_range(0..3) {
            s.insert(SiTerm::token(a));
        }
    }
    s
}

/// tell, ask, nask or get on one of `a`, `b`, `c`.
pub fn random_store_prim(rng: &mut impl Rng) -> Prim {
    let t = atom(rng);
    match rng.gen_range(0..4) {
        0 => Prim::tell(t),
        1 => Prim::ask(t),
        2 => Prim::nask(t),
        _ => Prim::get(t),
    }
}

/// A finite agent with 1 to `max_prims` store primitives combined by `;`,
/// `||` and `+`.
pub fn random_finite_agent(rng: &mut impl Rng, max_prims: usize) -> Agent {
    let n = rng.gen_range(1..=max_prims.max(1));
    build(rng, n)
}

fn build(rng: &mut impl Rng, n: usize) -> Agent {
    if n == 1 {
        return Agent::Prim(random_store_prim(rng));
    }
    let k = rng.gen_range(1..n);
    let (l, r) = (build(rng, k), build(rng, n - k));
    match rng.gen_range(0..3) {
        0 => Agent::seq(l, r),
        1 => Agent::par(l, r),
        _ => Agent::choice(l, r),
    }
}

/// `p; p1; ...; pn` with an arbitrary store primitive `p` and a tail of 1
/// to 3 tells (over `a` to `d`) and `draw(k)` events.
pub fn random_guardable_chain(rng: &mut impl Rng) -> Vec<Prim> {
    let mut chain = vec![random_store_prim(rng)];
    for _ in 0..rng.gen_range(1..=3) {
        chain.push(if rng.gen_bool(0.25) {
            Prim::graphical("draw", vec![SiTerm::Int(rng.gen_range(1..4))])
        } else {
            Prim::tell(SiTerm::token(["a", "b", "c", "d"].choose(rng).expect("non-empty")))
        });
    }
    chain
}

/// Source text of a small program: up to three parallel components, each
/// a choice or sequence of guardable chains and single primitives, plus
/// `formula goal = Reach(...)` on the atoms. Chains whose tail tells the
/// goal's atom are common, so transformations both apply and get skipped.
pub fn random_chain_program(rng: &mut impl Rng) -> String {
    let comps: Vec<String> = (0..rng.gen_range(1..=3)).map(|_| component(rng)).collect();
    let target = ["a", "b", "c", "d"].choose(rng).expect("non-empty");
    let goal = match rng.gen_range(0..3) {
        0 => format!("#{target} = {}", rng.gen_range(1..3)),
        1 => format!("#{target} = 0 & #{} >= 1", ATOMS.choose(rng).expect("non-empty")),
        _ => format!("#{target} >= 2"),
    };
    let init: Vec<String> = ATOMS.iter().filter(|_| rng.gen_bool(0.5)).map(|a| format!("tell({a})")).collect();
    let par = comps.join(" || ");
    let main = if init.is_empty() { format!("({par})") } else { format!("{}; ({par})", init.join("; ")) };
    format!("gprim draw.\nformula goal = Reach({goal}).\nrun {main}.\n")
}

fn component(rng: &mut impl Rng) -> String {
    let pieces: Vec<String> = (0..rng.gen_range(1..=2))
        .map(|_| {
            if rng.gen_bool(0.7) {
                let c: Vec<String> = random_guardable_chain(rng).iter().map(ToString::to_string).collect();
                c.join("; ")
            } else {
                random_store_prim(rng).to_string()
            }
        })
        .collect();
    let op = if rng.gen_bool(0.5) { " + " } else { "; " };
    let body: Vec<String> = pieces.iter().map(|p| format!("({p})")).collect();
    body.join(op)
}

/// Store primitives in `a`, in order.
pub fn prims_of(a: &Agent) -> Vec<Prim> {
    let mut v = Vec::new();
    a.for_each_prim(&mut |p| v.push(p.clone()));
    v
}

/// True for `tell`, `ask`, `nask` and `get`.
pub fn is_store_prim(p: &Prim) -> bool {
    !matches!(p.kind, PrimKind::Graphical(_))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    #[test]
    fn generated_programs_parse() {
        let mut r = rng(7);
        for _ in 0..200 {
            let src = random_chain_program(&mut r);
            parse_program(&src).unwrap_or_else(|d| panic!("{d:?}\n{src}"));
        }
    }

    #[test]
    fn agents_respect_the_size_bound() {
        let mut r = rng(1);
        for _ in 0..200 {
            let a = random_finite_agent(&mut r, 6);
            assert!((1..=6).contains(&prims_of(&a).len()));
            assert!(prims_of(&a).iter().all(is_store_prim));
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        let a: Vec<String> = (0..5).map(|_| random_chain_program(&mut rng(3))).collect();
        let b: Vec<String> = (0..5).map(|_| random_chain_program(&mut rng(3))).collect();
        assert_eq!(a, b);
    }
}
