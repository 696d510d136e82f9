//! Small-step transition engine.
//!
//! `successors` computes the complete set of one-step moves of a
//! configuration: primitives (tell, ask, nask, get, graphical), sequential
//! and parallel composition, choice, conditionals, procedure calls and
//! atomic guarded lists.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ast::{Agent, CmpOp, Condition, Conditional, GuardedList, Prim, PrimKind, Program};
use crate::store::Store;
use crate::term::{Defs, Name, SiTerm, TermError};

/// Deepest chain of procedure unfoldings tried within one step before the
/// engine gives up; only reachable with unguarded recursion.
const MAX_UNFOLD_DEPTH: usize = 256;

/// Transition rules, named after the inference rules they implement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// tell
    T,
    /// ask
    A,
    /// get
    G,
    /// nask
    N,
    /// graphical primitive
    Gr,
    /// guarded list
    GL,
    /// empty primitive list
    Le,
    /// non-empty primitive list
    Ln,
    /// sequential composition
    S,
    /// parallel composition
    P,
    /// choice
    C,
    /// conditional
    Co,
    /// procedure call
    Pc,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::T => "T",
            Rule::A => "A",
            Rule::G => "G",
            Rule::N => "N",
            Rule::Gr => "Gr",
            Rule::GL => "GL",
            Rule::Le => "Le",
            Rule::Ln => "Ln",
            Rule::S => "S",
            Rule::P => "P",
            Rule::C => "C",
            Rule::Co => "Co",
            Rule::Pc => "Pc",
        }
    }

    pub fn parse(s: &str) -> Option<Rule> {
        Some(match s {
            "T" => Rule::T,
            "A" => Rule::A,
            "G" => Rule::G,
            "N" => Rule::N,
            "Gr" => Rule::Gr,
            "GL" => Rule::GL,
            "Le" => Rule::Le,
            "Ln" => Rule::Ln,
            "S" => Rule::S,
            "P" => Rule::P,
            "C" => Rule::C,
            "Co" => Rule::Co,
            "Pc" => Rule::Pc,
            _ => return None,
        })
    }

    fn for_prim(kind: &PrimKind) -> Rule {
        match kind {
            PrimKind::Tell => Rule::T,
            PrimKind::Ask => Rule::A,
            PrimKind::Nask => Rule::N,
            PrimKind::Get => Rule::G,
            PrimKind::Graphical(_) => Rule::Gr,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a transition did: the primitive-level rule, the primitives fired
/// (arguments rewritten to final terms; for a guarded list the guard comes
/// first, then the tail in order) and the structural rules crossed to reach
/// them, outermost first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransitionLabel {
    pub rule: Rule,
    pub prims: Vec<Prim>,
    pub derivation: Vec<Rule>,
}

impl TransitionLabel {
    fn primitive(p: Prim) -> Self {
        let rule = Rule::for_prim(&p.kind);
        TransitionLabel { rule, prims: vec![p], derivation: vec![rule] }
    }

    /// Graphical primitives fired by this step.
    pub fn events(&self) -> impl Iterator<Item = &Prim> {
        self.prims.iter().filter(|p| matches!(p.kind, PrimKind::Graphical(_)))
    }

    /// Same rule and same fired primitives; the derivation path is ignored.
    pub fn same_action(&self, other: &TransitionLabel) -> bool {
        self.rule == other.rule && self.prims == other.prims
    }

    fn under(mut self, rule: Rule) -> Self {
        self.derivation.insert(0, rule);
        self
    }
}

/// `GL get(a) ; tell(b) ; tell(c)` or `T tell(a)`.
impl fmt::Display for TransitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rule)?;
        for (i, p) in self.prims.iter().enumerate() {
            f.write_str(if i == 0 { " " } else { " ; " })?;
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    pub agent: Agent,
    pub store: Store,
}

impl Config {
    pub fn new(agent: Agent, store: Store) -> Self {
        Config { agent, store }
    }

    pub fn initial(prog: &Program) -> Self {
        Config { agent: prog.main.clone(), store: Store::new() }
    }

    pub fn is_terminated(&self) -> bool {
        self.agent.is_done()
    }

    /// Visited-set key: agent structure followed by the canonical store.
    pub fn key(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(128);
        self.agent.encode_into(&mut out);
        self.store.encode_into(&mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Successor {
    pub config: Config,
    pub label: TransitionLabel,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("guarded list [{guard} -> ...]: tail primitive #{index} `{blocked}` blocked after the guard fired")]
    GuardedTailFailure { guard: String, blocked: String, index: usize },
    #[error("type mismatch in condition `{0}`: ordering is only defined on integers")]
    TypeMismatch(String),
    #[error("unknown procedure `{0}`")]
    UnknownProcedure(Name),
    #[error("procedure `{name}` expects {expected} argument(s), got {got}")]
    ArityMismatch { name: Name, expected: usize, got: usize },
    #[error("unsupported construct for this operation: {0}")]
    UnsupportedConstruct(String),
    #[error("procedure unfolding exceeded depth {0} within one step (unguarded recursion?)")]
    UnfoldDepth(usize),
}

/// One primitive against a store. `Ok(None)` means the primitive blocks.
pub fn step_primitive(p: &Prim, store: &Store, defs: &Defs) -> Result<Option<(Store, TransitionLabel)>, EngineError> {
    let args: Vec<SiTerm> = p.args.iter().map(|t| defs.rewrite(t)).collect::<Result<_, _>>()?;
    let fired = Prim { kind: p.kind.clone(), args: args.into(), pos: p.pos };
    let next = match (&fired.kind, fired.args.first()) {
        (PrimKind::Graphical(_), _) => Some(store.clone()),
        (PrimKind::Tell, Some(u)) => Some(store.add(u.clone())),
        (PrimKind::Ask, Some(u)) => store.contains(u).then(|| store.clone()),
        (PrimKind::Nask, Some(u)) => (!store.contains(u)).then(|| store.clone()),
        (PrimKind::Get, Some(u)) => store.remove(u),
        (_, None) => return Err(EngineError::UnsupportedConstruct(format!("`{p}` has no argument"))),
    };
    Ok(next.map(|s| (s, TransitionLabel::primitive(fired))))
}

/// Atomic execution of `[guard -> tail]`: `Ok(None)` if the guard blocks;
/// an error if the guard fires but a tail primitive then blocks.
pub fn step_guarded(g: &GuardedList, store: &Store, defs: &Defs) -> Result<Option<(Store, TransitionLabel)>, EngineError> {
    let Some((mut current, first)) = step_primitive(&g.guard, store, defs)? else {
        return Ok(None);
    };
    let mut prims = first.prims;
    let mut derivation = vec![Rule::GL, first.rule];
    for (i, p) in g.tail.iter().enumerate() {
        match step_primitive(p, &current, defs)? {
            Some((next, label)) => {
                current = next;
                derivation.push(Rule::Ln);
                derivation.push(label.rule);
                prims.extend(label.prims);
            }
            None => {
                return Err(EngineError::GuardedTailFailure {
                    guard: g.guard.to_string(),
                    blocked: p.to_string(),
                    index: i + 1,
                })
            }
        }
    }
    derivation.push(Rule::Le);
    Ok(Some((current, TransitionLabel { rule: Rule::GL, prims, derivation })))
}

/// Evaluates a condition. Conditions compare si-terms; they never consult
/// the store.
pub fn eval_condition(c: &Condition, defs: &Defs) -> Result<bool, EngineError> {
    Ok(match c {
        Condition::Bool(b) => *b,
        Condition::Not(c) => !eval_condition(c, defs)?,
        Condition::And(l, r) => eval_condition(l, defs)? && eval_condition(r, defs)?,
        Condition::Or(l, r) => eval_condition(l, defs)? || eval_condition(r, defs)?,
        Condition::Cmp(op, l, r) => {
            let (l, r) = (defs.rewrite(l)?, defs.rewrite(r)?);
            match (&l, &r) {
                (SiTerm::Int(a), SiTerm::Int(b)) => op.holds(a.cmp(b)),
                _ if op.is_ordering() => return Err(EngineError::TypeMismatch(c.to_string())),
                _ => (l == r) == (*op == CmpOp::Eq),
            }
        }
    })
}

/// The branch taken by `c -> then <> otherwise` when `c` is false. A
/// missing else-branch makes the conditional block: `c -> A` with `c` false
/// is stuck rather than terminated.
fn false_branch(c: &Conditional) -> Option<&Agent> {
    c.otherwise.as_ref()
}

/// Binds the formal parameters of `name` to the (rewritten) actuals and
/// returns the instantiated body.
pub fn unfold_call(name: &Name, args: &[SiTerm], prog: &Program) -> Result<Agent, EngineError> {
    let proc = prog.proc(name).ok_or_else(|| EngineError::UnknownProcedure(name.clone()))?;
    if proc.params.len() != args.len() {
        return Err(EngineError::ArityMismatch { name: name.clone(), expected: proc.params.len(), got: args.len() });
    }
    let mut bindings = HashMap::with_capacity(args.len());
    for (param, arg) in proc.params.iter().zip(args) {
        bindings.insert(param.name.clone(), prog.defs.rewrite(arg)?);
    }
    Ok(proc.body.instantiate(&bindings, &prog.defs))
}

/// All one-step successors of `cfg`, in enumeration order: left before
/// right for `||` and `+`. An empty result means `cfg` is terminated (agent
/// `E`) or deadlocked.
pub fn successors(cfg: &Config, prog: &Program) -> Result<Vec<Successor>, EngineError> {
    let mut out = Vec::new();
    agent_steps(&cfg.agent, &cfg.store, prog, 0, &mut |agent, store, label| {
        out.push(Successor { config: Config { agent, store }, label });
    })?;
    Ok(out)
}

fn agent_steps(
    agent: &Agent,
    store: &Store,
    prog: &Program,
    depth: usize,
    emit: &mut dyn FnMut(Agent, Store, TransitionLabel),
) -> Result<(), EngineError> {
    match agent {
        Agent::Done => {}
        Agent::Prim(p) => {
            if let Some((s, label)) = step_primitive(p, store, &prog.defs)? {
                emit(Agent::Done, s, label);
            }
        }
        Agent::Guarded(g) => {
            if let Some((s, label)) = step_guarded(g, store, &prog.defs)? {
                emit(Agent::Done, s, label);
            }
        }
        Agent::Seq(a, b) => {
            agent_steps(a, store, prog, depth, &mut |a2, s, label| emit(Agent::then(a2, b), s, label.under(Rule::S)))?;
        }
        Agent::Par(a, b) => {
            agent_steps(a, store, prog, depth, &mut |a2, s, label| {
                emit(Agent::beside(a2, b, true), s, label.under(Rule::P))
            })?;
            agent_steps(b, store, prog, depth, &mut |b2, s, label| {
                emit(Agent::beside(b2, a, false), s, label.under(Rule::P))
            })?;
        }
        Agent::Choice(a, b) => {
            agent_steps(a, store, prog, depth, &mut |a2, s, label| emit(a2, s, label.under(Rule::C)))?;
            agent_steps(b, store, prog, depth, &mut |b2, s, label| emit(b2, s, label.under(Rule::C)))?;
        }
        Agent::Cond(c) => {
            let branch = if eval_condition(&c.cond, &prog.defs)? { Some(&c.then) } else { false_branch(c) };
            if let Some(branch) = branch {
                agent_steps(branch, store, prog, depth, &mut |a2, s, label| emit(a2, s, label.under(Rule::Co)))?;
            }
        }
        Agent::Call(call) => {
            if depth >= MAX_UNFOLD_DEPTH {
                return Err(EngineError::UnfoldDepth(MAX_UNFOLD_DEPTH));
            }
            let body = unfold_call(&call.name, &call.args, prog)?;
            agent_steps(&body, store, prog, depth + 1, &mut |a2, s, label| emit(a2, s, label.under(Rule::Pc)))?;
        }
    }
    Ok(())
}

/// Rewrites `E; A`, `E || A` and `A || E` to `A` everywhere.
pub fn simplify(a: &Agent) -> Agent {
    a.simplify()
}

/// Translation of a finite agent (no calls, no conditionals) into an
/// equivalent agent of the shape `N ::= p | p; A | N + N`, where `p` is a
/// primitive or a guarded list. Parallel composition is expanded with the
/// left merge: `X || Y` becomes `tau(X) leftmerge Y + tau(Y) leftmerge X`.
pub fn normal_form(a: &Agent) -> Result<Agent, EngineError> {
    Ok(match a {
        Agent::Prim(_) | Agent::Guarded(_) => a.clone(),
        Agent::Seq(x, y) => seq_normal(normal_form(x)?, y),
        Agent::Choice(x, y) => Agent::choice(normal_form(x)?, normal_form(y)?),
        Agent::Par(x, y) => Agent::choice(left_merge(normal_form(x)?, y), left_merge(normal_form(y)?, x)),
        Agent::Done => return Err(EngineError::UnsupportedConstruct("E inside an agent to normalise".into())),
        Agent::Cond(_) => return Err(EngineError::UnsupportedConstruct("conditional".into())),
        Agent::Call(c) => return Err(EngineError::UnsupportedConstruct(format!("procedure call {}", c.name))),
    })
}

/// `N; Y` kept in normal form: `(p; A); Y = p; (A; Y)` and
/// `(N1 + N2); Y = N1; Y + N2; Y`.
fn seq_normal(n: Agent, rest: &Arc<Agent>) -> Agent {
    match n {
        Agent::Seq(p, a) => Agent::Seq(p, Arc::new(Agent::Seq(a, rest.clone()))),
        Agent::Choice(n1, n2) => {
            Agent::choice(seq_normal((*n1).clone(), rest), seq_normal((*n2).clone(), rest))
        }
        p => Agent::Seq(Arc::new(p), rest.clone()),
    }
}

/// `p leftmerge Z = p; Z`, `(p; A) leftmerge Z = p; (A || Z)`,
/// `(N1 + N2) leftmerge Z = N1 leftmerge Z + N2 leftmerge Z`.
fn left_merge(n: Agent, z: &Arc<Agent>) -> Agent {
    match n {
        Agent::Seq(p, a) => Agent::Seq(p, Arc::new(Agent::Par(a, z.clone()))),
        Agent::Choice(n1, n2) => Agent::choice(left_merge((*n1).clone(), z), left_merge((*n2).clone(), z)),
        p => Agent::Seq(Arc::new(p), z.clone()),
    }
}

/// True if `a` matches `N ::= p | p; A | N + N`.
pub fn is_normal_form(a: &Agent) -> bool {
    match a {
        Agent::Prim(_) | Agent::Guarded(_) => true,
        Agent::Seq(p, _) => matches!(**p, Agent::Prim(_) | Agent::Guarded(_)),
        Agent::Choice(x, y) => is_normal_form(x) && is_normal_form(y),
        _ => false,
    }
}
