//! Agents, procedures and programs.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::logic::TemporalFormula;
use crate::source::SrcPos;
use crate::store::{encode_term, put_varint};
use crate::term::{Defs, Name, SiTerm};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimKind {
    Tell,
    Ask,
    Nask,
    Get,
    /// A graphical primitive declared with `gprim`.
    Graphical(Name),
}

impl PrimKind {
    pub fn keyword(&self) -> &str {
        match self {
            PrimKind::Tell => "tell",
            PrimKind::Ask => "ask",
            PrimKind::Nask => "nask",
            PrimKind::Get => "get",
            PrimKind::Graphical(n) => n,
        }
    }

    /// Tell and graphical primitives can never block.
    pub fn always_succeeds(&self) -> bool {
        matches!(self, PrimKind::Tell | PrimKind::Graphical(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prim {
    pub kind: PrimKind,
    pub args: Arc<[SiTerm]>,
    pub pos: SrcPos,
}

impl Prim {
    pub fn new(kind: PrimKind, args: Vec<SiTerm>) -> Self {
        Prim { kind, args: args.into(), pos: SrcPos::default() }
    }

    pub fn tell(t: SiTerm) -> Self {
        Prim::new(PrimKind::Tell, vec![t])
    }

    pub fn ask(t: SiTerm) -> Self {
        Prim::new(PrimKind::Ask, vec![t])
    }

    pub fn nask(t: SiTerm) -> Self {
        Prim::new(PrimKind::Nask, vec![t])
    }

    pub fn get(t: SiTerm) -> Self {
        Prim::new(PrimKind::Get, vec![t])
    }

    pub fn graphical(head: &str, args: Vec<SiTerm>) -> Self {
        Prim::new(PrimKind::Graphical(crate::term::name(head)), args)
    }

    pub fn at(mut self, pos: SrcPos) -> Self {
        self.pos = pos;
        self
    }

    /// The store term of a tell/ask/nask/get primitive.
    pub fn term(&self) -> Option<&SiTerm> {
        match self.kind {
            PrimKind::Graphical(_) => None,
            _ => self.args.first(),
        }
    }

    fn map_terms(&self, f: &mut impl FnMut(&SiTerm) -> SiTerm) -> Prim {
        Prim { kind: self.kind.clone(), args: self.args.iter().map(|t| f(t)).collect(), pos: self.pos }
    }
}

impl fmt::Display for Prim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.kind.keyword())?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// `[guard -> p1, ..., pn]`; the tail may be empty (`[guard]`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GuardedList {
    pub guard: Prim,
    pub tail: Vec<Prim>,
}

impl GuardedList {
    pub fn new(guard: Prim, tail: Vec<Prim>) -> Self {
        GuardedList { guard, tail }
    }

    pub fn len(&self) -> usize {
        1 + self.tail.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn prims(&self) -> impl Iterator<Item = &Prim> {
        std::iter::once(&self.guard).chain(self.tail.iter())
    }
}

impl fmt::Display for GuardedList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.guard)?;
        if !self.tail.is_empty() {
            f.write_str(" -> ")?;
            for (i, p) in self.tail.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{p}")?;
            }
        }
        f.write_str("]")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn is_ordering(self) -> bool {
        !matches!(self, CmpOp::Eq | CmpOp::Ne)
    }

    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CmpOp::Eq => ord == Equal,
            CmpOp::Ne => ord != Equal,
            CmpOp::Lt => ord == Less,
            CmpOp::Le => ord != Greater,
            CmpOp::Gt => ord == Greater,
            CmpOp::Ge => ord != Less,
        }
    }
}

/// Conditions of `c -> A <> B`. They compare si-terms and never look at
/// the store.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    Bool(bool),
    Not(Box<Condition>),
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
    Cmp(CmpOp, SiTerm, SiTerm),
}

impl Condition {
    pub fn cmp(op: CmpOp, l: SiTerm, r: SiTerm) -> Self {
        Condition::Cmp(op, l, r)
    }

    pub fn and(l: Condition, r: Condition) -> Self {
        Condition::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Condition, r: Condition) -> Self {
        Condition::Or(Box::new(l), Box::new(r))
    }

    pub fn negate(c: Condition) -> Self {
        Condition::Not(Box::new(c))
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&SiTerm) -> SiTerm) -> Condition {
        match self {
            Condition::Bool(b) => Condition::Bool(*b),
            Condition::Not(c) => Condition::Not(Box::new(c.map_terms(f))),
            Condition::And(l, r) => Condition::And(Box::new(l.map_terms(f)), Box::new(r.map_terms(f))),
            Condition::Or(l, r) => Condition::Or(Box::new(l.map_terms(f)), Box::new(r.map_terms(f))),
            Condition::Cmp(op, l, r) => Condition::Cmp(*op, f(l), f(r)),
        }
    }

    pub fn for_each_term<'a>(&'a self, f: &mut impl FnMut(&'a SiTerm)) {
        match self {
            Condition::Bool(_) => {}
            Condition::Not(c) => c.for_each_term(f),
            Condition::And(l, r) | Condition::Or(l, r) => {
                l.for_each_term(f);
                r.for_each_term(f);
            }
            Condition::Cmp(_, l, r) => {
                f(l);
                f(r);
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Condition::Or(..) => 1,
            Condition::And(..) => 2,
            Condition::Not(_) => 3,
            Condition::Bool(_) | Condition::Cmp(..) => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let p = self.prec();
        if p < min {
            f.write_str("(")?;
        }
        match self {
            Condition::Bool(b) => write!(f, "{b}")?,
            Condition::Not(c) => {
                f.write_str("!")?;
                c.fmt_prec(f, 5)?;
            }
            Condition::And(l, r) => {
                l.fmt_prec(f, 3)?;
                f.write_str(" & ")?;
                r.fmt_prec(f, 2)?;
            }
            Condition::Or(l, r) => {
                l.fmt_prec(f, 2)?;
                f.write_str(" | ")?;
                r.fmt_prec(f, 1)?;
            }
            Condition::Cmp(op, l, r) => write!(f, "{l} {} {r}", op.symbol())?,
        }
        if p < min {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// `cond -> then <> otherwise`, or `cond -> then` when `otherwise` is absent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Conditional {
    pub cond: Condition,
    pub then: Agent,
    pub otherwise: Option<Agent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Call {
    pub name: Name,
    pub args: Arc<[SiTerm]>,
    pub pos: SrcPos,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Agent {
    /// The terminated agent `E`.
    Done,
    Prim(Prim),
    Guarded(Arc<GuardedList>),
    Seq(Arc<Agent>, Arc<Agent>),
    Par(Arc<Agent>, Arc<Agent>),
    Choice(Arc<Agent>, Arc<Agent>),
    Cond(Arc<Conditional>),
    Call(Call),
}

impl From<Prim> for Agent {
    fn from(p: Prim) -> Self {
        Agent::Prim(p)
    }
}

impl From<GuardedList> for Agent {
    fn from(g: GuardedList) -> Self {
        Agent::Guarded(Arc::new(g))
    }
}

impl Agent {
    pub fn seq(a: impl Into<Agent>, b: impl Into<Agent>) -> Agent {
        Agent::Seq(Arc::new(a.into()), Arc::new(b.into()))
    }

    pub fn par(a: impl Into<Agent>, b: impl Into<Agent>) -> Agent {
        Agent::Par(Arc::new(a.into()), Arc::new(b.into()))
    }

    pub fn choice(a: impl Into<Agent>, b: impl Into<Agent>) -> Agent {
        Agent::Choice(Arc::new(a.into()), Arc::new(b.into()))
    }

    pub fn cond(cond: Condition, then: impl Into<Agent>, otherwise: Option<Agent>) -> Agent {
        Agent::Cond(Arc::new(Conditional { cond, then: then.into(), otherwise }))
    }

    pub fn call(name: &str, args: Vec<SiTerm>) -> Agent {
        Agent::Call(Call { name: crate::term::name(name), args: args.into(), pos: SrcPos::default() })
    }

    /// Right-nested sequence `a1; (a2; (...; an))`. Empty input gives `E`.
    pub fn seq_all<I>(items: I) -> Agent
    where
        I: IntoIterator,
        I::IntoIter: DoubleEndedIterator,
        I::Item: Into<Agent>,
    {
        let mut it = items.into_iter().rev();
        let Some(last) = it.next() else { return Agent::Done };
        it.fold(last.into(), |acc, a| Agent::seq(a, acc))
    }

    /// Right-nested parallel composition.
    pub fn par_all<I>(items: I) -> Agent
    where
        I: IntoIterator,
        I::IntoIter: DoubleEndedIterator,
        I::Item: Into<Agent>,
    {
        let mut it = items.into_iter().rev();
        let Some(last) = it.next() else { return Agent::Done };
        it.fold(last.into(), |acc, a| Agent::par(a, acc))
    }

    pub fn is_done(&self) -> bool {
        matches!(self, Agent::Done)
    }

    /// Builds `a; b` with `E; b` collapsed to `b`.
    pub(crate) fn then(a: Agent, b: &Arc<Agent>) -> Agent {
        if a.is_done() {
            (**b).clone()
        } else {
            Agent::Seq(Arc::new(a), b.clone())
        }
    }

    /// Builds `a || b` with terminated sides dropped.
    pub(crate) fn beside(a: Agent, b: &Arc<Agent>, a_left: bool) -> Agent {
        if a.is_done() {
            return (**b).clone();
        }
        if b.is_done() {
            return a;
        }
        if a_left {
            Agent::Par(Arc::new(a), b.clone())
        } else {
            Agent::Par(b.clone(), Arc::new(a))
        }
    }

    /// Rewrites `E; A`, `E || A` and `A || E` to `A`, bottom-up, everywhere.
    pub fn simplify(&self) -> Agent {
        match self {
            Agent::Seq(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                if a.is_done() {
                    b
                } else {
                    Agent::seq(a, b)
                }
            }
            Agent::Par(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                match (a.is_done(), b.is_done()) {
                    (true, _) => b,
                    (_, true) => a,
                    _ => Agent::par(a, b),
                }
            }
            Agent::Choice(a, b) => Agent::choice(a.simplify(), b.simplify()),
            Agent::Cond(c) => Agent::cond(c.cond.clone(), c.then.simplify(), c.otherwise.as_ref().map(Agent::simplify)),
            _ => self.clone(),
        }
    }

    /// True when no `E; A`, `E || A` or `A || E` redex remains.
    pub fn is_simplified(&self) -> bool {
        match self {
            Agent::Seq(a, b) => !a.is_done() && a.is_simplified() && b.is_simplified(),
            Agent::Par(a, b) => !a.is_done() && !b.is_done() && a.is_simplified() && b.is_simplified(),
            Agent::Choice(a, b) => a.is_simplified() && b.is_simplified(),
            Agent::Cond(c) => c.then.is_simplified() && c.otherwise.as_ref().is_none_or(Agent::is_simplified),
            _ => true,
        }
    }

    /// Applies `f` to every si-term (primitive payloads, call arguments and
    /// condition operands).
    pub fn map_terms(&self, f: &mut impl FnMut(&SiTerm) -> SiTerm) -> Agent {
        match self {
            Agent::Done => Agent::Done,
            Agent::Prim(p) => Agent::Prim(p.map_terms(f)),
            Agent::Guarded(g) => Agent::Guarded(Arc::new(GuardedList {
                guard: g.guard.map_terms(f),
                tail: g.tail.iter().map(|p| p.map_terms(f)).collect(),
            })),
            Agent::Seq(a, b) => Agent::seq(a.map_terms(f), b.map_terms(f)),
            Agent::Par(a, b) => Agent::par(a.map_terms(f), b.map_terms(f)),
            Agent::Choice(a, b) => Agent::choice(a.map_terms(f), b.map_terms(f)),
            Agent::Cond(c) => Agent::cond(
                c.cond.map_terms(f),
                c.then.map_terms(f),
                c.otherwise.as_ref().map(|o| o.map_terms(f)),
            ),
            Agent::Call(c) => Agent::Call(Call {
                name: c.name.clone(),
                args: c.args.iter().map(|t| f(t)).collect(),
                pos: c.pos,
            }),
        }
    }

    /// Substitutes the bindings and rewrites every term that becomes final
    /// under the map equations. Terms whose rewriting fails are kept
    /// substituted but unrewritten: the failure surfaces when (and if) the
    /// term is actually used.
    pub fn instantiate(&self, bindings: &HashMap<Name, SiTerm>, defs: &Defs) -> Agent {
        self.map_terms(&mut |t| {
            let t = t.substitute(bindings);
            if t.is_ground() {
                defs.rewrite(&t).unwrap_or(t)
            } else {
                t
            }
        })
    }

    pub fn for_each_prim<'a>(&'a self, f: &mut impl FnMut(&'a Prim)) {
        match self {
            Agent::Prim(p) => f(p),
            Agent::Guarded(g) => g.prims().for_each(f),
            Agent::Seq(a, b) | Agent::Par(a, b) | Agent::Choice(a, b) => {
                a.for_each_prim(f);
                b.for_each_prim(f);
            }
            Agent::Cond(c) => {
                c.then.for_each_prim(f);
                if let Some(o) = &c.otherwise {
                    o.for_each_prim(f);
                }
            }
            Agent::Done | Agent::Call(_) => {}
        }
    }

    pub fn for_each_call<'a>(&'a self, f: &mut impl FnMut(&'a Call)) {
        match self {
            Agent::Call(c) => f(c),
            Agent::Seq(a, b) | Agent::Par(a, b) | Agent::Choice(a, b) => {
                a.for_each_call(f);
                b.for_each_call(f);
            }
            Agent::Cond(c) => {
                c.then.for_each_call(f);
                if let Some(o) = &c.otherwise {
                    o.for_each_call(f);
                }
            }
            _ => {}
        }
    }

    /// Number of primitive occurrences (a guarded list counts each member).
    pub fn prim_count(&self) -> usize {
        let mut n = 0;
        self.for_each_prim(&mut |_| n += 1);
        n
    }

    /// Prefix-free structural encoding, used for visited-set keys.
    pub fn encode_into(&self, out: &mut Vec<u8>) {
        match self {
            Agent::Done => out.push(0),
            Agent::Prim(p) => {
                out.push(1);
                encode_prim(p, out);
            }
            Agent::Guarded(g) => {
                out.push(2);
                encode_prim(&g.guard, out);
                put_varint(out, g.tail.len() as u64);
                for p in &g.tail {
                    encode_prim(p, out);
                }
            }
            Agent::Seq(a, b) | Agent::Par(a, b) | Agent::Choice(a, b) => {
                out.push(match self {
                    Agent::Seq(..) => 3,
                    Agent::Par(..) => 4,
                    _ => 5,
                });
                a.encode_into(out);
                b.encode_into(out);
            }
            Agent::Cond(c) => {
                out.push(6);
                // conditions are rare in states; their text is unambiguous
                let text = c.cond.to_string();
                put_varint(out, text.len() as u64);
                out.extend_from_slice(text.as_bytes());
                c.then.encode_into(out);
                match &c.otherwise {
                    Some(o) => {
                        out.push(1);
                        o.encode_into(out);
                    }
                    None => out.push(0),
                }
            }
            Agent::Call(c) => {
                out.push(7);
                put_varint(out, c.name.len() as u64);
                out.extend_from_slice(c.name.as_bytes());
                put_varint(out, c.args.len() as u64);
                for a in c.args.iter() {
                    encode_term(a, out);
                }
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Agent::Choice(..) => 1,
            Agent::Par(..) => 2,
            Agent::Seq(..) => 3,
            Agent::Cond(_) => 0,
            _ => 4,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn encode_prim(p: &Prim, out: &mut Vec<u8>) {
    match &p.kind {
        PrimKind::Tell => out.push(0),
        PrimKind::Ask => out.push(1),
        PrimKind::Nask => out.push(2),
        PrimKind::Get => out.push(3),
        PrimKind::Graphical(n) => {
            out.push(4);
            put_varint(out, n.len() as u64);
            out.extend_from_slice(n.as_bytes());
        }
    }
    put_varint(out, p.args.len() as u64);
    for a in p.args.iter() {
        encode_term(a, out);
    }
}

/// Canonical concrete syntax. Binary operators associate to the right; a
/// left operand of the same operator is parenthesised so that re-parsing
/// gives back the same tree.
impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Agent::Done => f.write_str("E"),
            Agent::Prim(p) => write!(f, "{p}"),
            Agent::Guarded(g) => write!(f, "{g}"),
            Agent::Seq(a, b) => {
                a.fmt_child(f, 4)?;
                f.write_str("; ")?;
                b.fmt_child(f, 3)
            }
            Agent::Par(a, b) => {
                a.fmt_child(f, 3)?;
                f.write_str(" || ")?;
                b.fmt_child(f, 2)
            }
            Agent::Choice(a, b) => {
                a.fmt_child(f, 2)?;
                f.write_str(" + ")?;
                b.fmt_child(f, 1)
            }
            Agent::Cond(c) => {
                write!(f, "({}) -> ", c.cond)?;
                c.then.fmt_child(f, 3)?;
                if let Some(o) = &c.otherwise {
                    f.write_str(" <> ")?;
                    o.fmt_child(f, 3)?;
                }
                Ok(())
            }
            Agent::Call(c) => {
                write!(f, "{}(", c.name)?;
                for (i, a) in c.args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: Name,
    pub set: Name,
}

/// `proc P(x: S, ...) = Agent.`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcDef {
    pub name: Name,
    pub params: Vec<Param>,
    pub body: Agent,
    pub pos: SrcPos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaDecl {
    pub name: Name,
    pub formula: TemporalFormula,
    pub pos: SrcPos,
}

/// Declaration order as written, for the pretty-printer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decl {
    Set(usize),
    Map(usize),
    GPrim(usize),
    Proc(usize),
    Formula(usize),
    Main,
}

#[derive(Clone, Debug)]
pub struct Program {
    pub defs: Defs,
    pub gprims: Vec<Name>,
    pub procs: Vec<ProcDef>,
    pub formulas: Vec<FormulaDecl>,
    pub main: Agent,
    pub main_pos: SrcPos,
    pub order: Vec<Decl>,
    proc_index: HashMap<Name, usize>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.defs == other.defs
            && self.gprims == other.gprims
            && self.procs == other.procs
            && self.formulas == other.formulas
            && self.main == other.main
            && self.order == other.order
    }
}

impl Eq for Program {}

impl Program {
    pub fn new(
        defs: Defs,
        gprims: Vec<Name>,
        procs: Vec<ProcDef>,
        formulas: Vec<FormulaDecl>,
        main: Agent,
        order: Vec<Decl>,
    ) -> Self {
        let proc_index = procs.iter().enumerate().map(|(i, p)| (p.name.clone(), i)).collect();
        Program { defs, gprims, procs, formulas, main, main_pos: SrcPos::default(), order, proc_index }
    }

    /// A program made only of a main agent (no sets, maps or procedures).
    pub fn from_agent(main: Agent) -> Self {
        Program::new(Defs::default(), Vec::new(), Vec::new(), Vec::new(), main, vec![Decl::Main])
    }

    pub fn proc(&self, name: &str) -> Option<&ProcDef> {
        self.proc_index.get(name).map(|&i| &self.procs[i])
    }

    pub fn formula(&self, name: &str) -> Option<&TemporalFormula> {
        self.formulas.iter().find(|f| &*f.name == name).map(|f| &f.formula)
    }

    pub fn with_main(&self, main: Agent) -> Program {
        let mut p = self.clone();
        p.main = main;
        p
    }

    /// Rebuilds the program with every agent (main and procedure bodies)
    /// passed through `f`.
    pub fn map_agents(&self, mut f: impl FnMut(&Agent) -> Agent) -> Program {
        let mut p = self.clone();
        for proc in &mut p.procs {
            proc.body = f(&proc.body);
        }
        p.main = f(&p.main);
        p
    }

    /// Longest guarded-list tail in the program.
    pub fn max_guarded_tail(&self) -> usize {
        let mut m = 0;
        let mut visit = |a: &Agent| {
            fn walk(a: &Agent, m: &mut usize) {
                match a {
                    Agent::Guarded(g) => *m = (*m).max(g.tail.len()),
                    Agent::Seq(x, y) | Agent::Par(x, y) | Agent::Choice(x, y) => {
                        walk(x, m);
                        walk(y, m);
                    }
                    Agent::Cond(c) => {
                        walk(&c.then, m);
                        if let Some(o) = &c.otherwise {
                            walk(o, m);
                        }
                    }
                    _ => {}
                }
            }
            walk(a, &mut m)
        };
        visit(&self.main);
        for p in &self.procs {
            visit(&p.body);
        }
        m
    }
}
