use std::collections::{HashMap, HashSet};

use crate::ast::{Agent, Condition, Prim, PrimKind, Program};
use crate::source::SrcPos;
use crate::term::{Defs, Name, SiTerm};

use super::{DiagKind, Diagnostic};

/// Static checks on a resolved program: name resolution, arities, set and
/// map well-formedness, equation overlap, condition typing and guardedness
/// of procedures. Never fails; problems come back as diagnostics, in
/// declaration order.
pub fn static_check(prog: &Program) -> Vec<Diagnostic> {
    let mut c = Checker { prog, defs: &prog.defs, diags: Vec::new() };
    c.names();
    c.sets();
    c.maps();
    c.procs();
    c.agent_in(&prog.main, &HashMap::new(), prog.main_pos);
    c.guardedness();
    c.diags
}

struct Checker<'a> {
    prog: &'a Program,
    defs: &'a Defs,
    diags: Vec<Diagnostic>,
}

/// Coarse static type of a term in a condition.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Ty {
    Int,
    Token,
    Compound,
    Unknown,
}

impl Checker<'_> {
    fn report(&mut self, kind: DiagKind, pos: SrcPos, msg: String) {
        self.diags.push(Diagnostic::new(kind, pos, msg));
    }

    fn names(&mut self) {
        let mut seen: HashMap<Name, &'static str> = HashMap::new();
        let mut entries: Vec<(Name, &'static str, SrcPos)> = Vec::new();
        entries.extend(self.defs.sets().iter().map(|s| (s.name.clone(), "set", s.pos)));
        entries.extend(self.defs.maps().iter().map(|m| (m.name.clone(), "map", m.pos)));
        entries.extend(self.prog.gprims.iter().map(|g| (g.clone(), "graphical primitive", SrcPos::default())));
        entries.extend(self.prog.procs.iter().map(|p| (p.name.clone(), "procedure", p.pos)));
        for (n, what, pos) in entries {
            match seen.get(&n) {
                // sets live in their own namespace
                Some(prev) if (*prev == "set") == (what == "set") => {
                    self.report(DiagKind::DuplicateDefinition, pos, format!("{what} `{n}` clashes with an earlier {prev}"))
                }
                _ => {
                    seen.entry(n).or_insert(what);
                }
            }
        }
        let mut formulas = HashSet::new();
        for f in &self.prog.formulas {
            if !formulas.insert(f.name.clone()) {
                self.report(DiagKind::DuplicateDefinition, f.pos, format!("formula `{}` defined twice", f.name));
            }
        }
    }

    fn sets(&mut self) {
        for s in self.defs.sets() {
            if s.elements.is_empty() {
                self.report(DiagKind::InvalidSet, s.pos, format!("set `{}` is empty", s.name));
            }
            let mut seen = HashSet::new();
            for e in &s.elements {
                if !seen.insert(e) {
                    self.report(DiagKind::InvalidSet, s.pos, format!("set `{}` lists `{e}` twice", s.name));
                }
            }
        }
    }

    fn maps(&mut self) {
        for m in self.defs.maps() {
            for set in m.domain.iter().chain(std::iter::once(&m.codomain)) {
                if self.defs.set(set).is_none() {
                    self.report(DiagKind::UnresolvedIdentifier, m.pos, format!("map `{}` uses undeclared set `{set}`", m.name));
                }
            }
            let mut lhs_seen: HashMap<&[SiTerm], SrcPos> = HashMap::new();
            for eq in &m.equations {
                if eq.args.len() != m.arity() {
                    self.report(
                        DiagKind::ArityMismatch,
                        eq.pos,
                        format!("equation for `{}` has {} argument(s), the map takes {}", m.name, eq.args.len(), m.arity()),
                    );
                    continue;
                }
                for (a, set) in eq.args.iter().zip(&m.domain) {
                    if !a.is_atom() {
                        self.report(DiagKind::TypeMismatch, eq.pos, format!("equation argument `{a}` is not a set element"));
                    } else if let Some(s) = self.defs.set(set) {
                        if !s.contains(a) {
                            self.report(DiagKind::TypeMismatch, eq.pos, format!("`{a}` is not an element of `{set}`"));
                        }
                    }
                }
                if eq.rhs.is_atom() {
                    if let Some(s) = self.defs.set(&m.codomain) {
                        if !s.contains(&eq.rhs) {
                            self.report(
                                DiagKind::TypeMismatch,
                                eq.pos,
                                format!("`{}` is not an element of `{}`", eq.rhs, m.codomain),
                            );
                        }
                    }
                }
                self.term(&eq.rhs, &HashMap::new(), eq.pos);
                match lhs_seen.get(eq.args.as_slice()) {
                    Some(first) => self.report(
                        DiagKind::OverlappingEquations,
                        eq.pos,
                        format!(
                            "{}({}) already has an equation at {first}",
                            m.name,
                            eq.args.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
                        ),
                    ),
                    None => {
                        lhs_seen.insert(&eq.args, eq.pos);
                    }
                }
            }
        }
    }

    fn procs(&mut self) {
        for p in &self.prog.procs {
            let mut params: HashMap<Name, Name> = HashMap::new();
            for param in &p.params {
                if self.defs.set(&param.set).is_none() {
                    self.report(
                        DiagKind::UnresolvedIdentifier,
                        p.pos,
                        format!("parameter `{}` of `{}` has undeclared set `{}`", param.name, p.name, param.set),
                    );
                }
                if params.insert(param.name.clone(), param.set.clone()).is_some() {
                    self.report(
                        DiagKind::DuplicateDefinition,
                        p.pos,
                        format!("parameter `{}` of `{}` declared twice", param.name, p.name),
                    );
                }
            }
            self.agent_in(&p.body, &params, p.pos);
        }
    }

    fn agent_in(&mut self, a: &Agent, params: &HashMap<Name, Name>, pos: SrcPos) {
        match a {
            Agent::Done => {}
            Agent::Prim(p) => self.prim(p, params, pos),
            Agent::Guarded(g) => {
                for p in g.prims() {
                    self.prim(p, params, pos);
                }
            }
            Agent::Seq(x, y) | Agent::Par(x, y) | Agent::Choice(x, y) => {
                self.agent_in(x, params, pos);
                self.agent_in(y, params, pos);
            }
            Agent::Cond(c) => {
                self.condition(&c.cond, params, pos);
                self.agent_in(&c.then, params, pos);
                if let Some(o) = &c.otherwise {
                    self.agent_in(o, params, pos);
                }
            }
            Agent::Call(call) => {
                let at = if call.pos.is_known() { call.pos } else { pos };
                for t in call.args.iter() {
                    self.term(t, params, at);
                }
                let Some(def) = self.prog.proc(&call.name) else {
                    self.report(DiagKind::UnresolvedIdentifier, at, format!("unknown procedure or primitive `{}`", call.name));
                    return;
                };
                if def.params.len() != call.args.len() {
                    self.report(
                        DiagKind::ArityMismatch,
                        at,
                        format!("`{}` expects {} argument(s), got {}", call.name, def.params.len(), call.args.len()),
                    );
                    return;
                }
                for (t, param) in call.args.iter().zip(&def.params) {
                    if let (true, Some(set)) = (t.is_atom(), self.defs.set(&param.set)) {
                        if !set.contains(t) {
                            self.report(
                                DiagKind::TypeMismatch,
                                at,
                                format!("argument `{t}` of `{}` is not an element of `{}`", call.name, param.set),
                            );
                        }
                    }
                }
            }
        }
    }

    fn prim(&mut self, p: &Prim, params: &HashMap<Name, Name>, pos: SrcPos) {
        let at = if p.pos.is_known() { p.pos } else { pos };
        match &p.kind {
            PrimKind::Graphical(g) => {
                if !self.prog.gprims.contains(g) {
                    self.report(DiagKind::UnresolvedIdentifier, at, format!("`{g}` is not a declared graphical primitive"));
                }
            }
            _ => {
                if p.args.len() != 1 {
                    self.report(
                        DiagKind::ArityMismatch,
                        at,
                        format!("`{}` takes exactly one argument, got {}", p.kind.keyword(), p.args.len()),
                    );
                }
            }
        }
        for t in p.args.iter() {
            self.term(t, params, at);
        }
    }

    /// Map applications must have the map's arity; variables must be
    /// parameters in scope.
    fn term(&mut self, t: &SiTerm, params: &HashMap<Name, Name>, pos: SrcPos) {
        let mut problems = Vec::new();
        t.for_each_subterm(&mut |s| match s {
            SiTerm::MapApp(m, args) => match self.defs.map(m) {
                Some(def) if def.arity() != args.len() => problems.push((
                    DiagKind::ArityMismatch,
                    format!("map `{m}` takes {} argument(s), got {}", def.arity(), args.len()),
                )),
                Some(_) => {}
                None => problems.push((DiagKind::UnresolvedIdentifier, format!("unknown map `{m}`"))),
            },
            SiTerm::Var(v) if !params.contains_key(v) => {
                problems.push((DiagKind::UnresolvedIdentifier, format!("unbound variable `{v}`")))
            }
            _ => {}
        });
        for (kind, msg) in problems {
            self.report(kind, pos, msg);
        }
    }

    fn ty(&self, t: &SiTerm, params: &HashMap<Name, Name>) -> Ty {
        let of_set = |set: &str| match self.defs.set(set) {
            Some(s) if s.all_ints() => Ty::Int,
            Some(s) if s.all_tokens() => Ty::Token,
            _ => Ty::Unknown,
        };
        match t {
            SiTerm::Int(_) => Ty::Int,
            SiTerm::Token(_) => Ty::Token,
            SiTerm::Compound(..) => Ty::Compound,
            SiTerm::Var(v) => params.get(v).map_or(Ty::Unknown, |s| of_set(s)),
            SiTerm::MapApp(m, _) => self.defs.map(m).map_or(Ty::Unknown, |d| of_set(&d.codomain)),
        }
    }

    fn condition(&mut self, c: &Condition, params: &HashMap<Name, Name>, pos: SrcPos) {
        match c {
            Condition::Bool(_) => {}
            Condition::Not(x) => self.condition(x, params, pos),
            Condition::And(l, r) | Condition::Or(l, r) => {
                self.condition(l, params, pos);
                self.condition(r, params, pos);
            }
            Condition::Cmp(op, l, r) => {
                self.term(l, params, pos);
                self.term(r, params, pos);
                let (tl, tr) = (self.ty(l, params), self.ty(r, params));
                let bad = if op.is_ordering() {
                    [tl, tr].iter().any(|t| !matches!(t, Ty::Int | Ty::Unknown))
                } else {
                    tl != tr && tl != Ty::Unknown && tr != Ty::Unknown
                };
                if bad {
                    let what = if op.is_ordering() { "ordering needs integers" } else { "operands of different kinds" };
                    let shown = Condition::Cmp(*op, l.clone(), r.clone());
                    self.report(DiagKind::TypeMismatch, pos, format!("condition `{shown}`: {what}"));
                }
            }
        }
    }

    /// A procedure is guarded when every path from its entry to a call
    /// crosses a primitive or a guarded list. Unguarded calls form a graph
    /// between procedures; any cycle in it is rejected.
    fn guardedness(&mut self) {
        let procs = &self.prog.procs;
        let edges: Vec<Vec<usize>> = procs
            .iter()
            .map(|p| {
                let mut calls = Vec::new();
                unguarded_calls(&p.body, &mut calls);
                let mut targets: Vec<usize> =
                    calls.iter().filter_map(|n| procs.iter().position(|q| &q.name == n)).collect();
                targets.sort_unstable();
                targets.dedup();
                targets
            })
            .collect();
        for (i, p) in procs.iter().enumerate() {
            // does i reach itself through unguarded calls?
            let mut stack = edges[i].clone();
            let mut seen = vec![false; procs.len()];
            let mut cyclic = false;
            while let Some(j) = stack.pop() {
                if j == i {
                    cyclic = true;
                    break;
                }
                if !std::mem::replace(&mut seen[j], true) {
                    stack.extend(edges[j].iter().copied());
                }
            }
            if cyclic {
                self.report(
                    DiagKind::UnguardedProcedure,
                    p.pos,
                    format!("procedure `{}` can call itself before executing any primitive", p.name),
                );
            }
        }
    }
}

/// Calls that may run before any primitive of `a` has fired.
fn unguarded_calls(a: &Agent, out: &mut Vec<Name>) {
    match a {
        Agent::Call(c) => out.push(c.name.clone()),
        Agent::Seq(x, y) => {
            unguarded_calls(x, out);
            if x.is_done() {
                unguarded_calls(y, out);
            }
        }
        Agent::Par(x, y) | Agent::Choice(x, y) => {
            unguarded_calls(x, out);
            unguarded_calls(y, out);
        }
        Agent::Cond(c) => {
            unguarded_calls(&c.then, out);
            if let Some(o) = &c.otherwise {
                unguarded_calls(o, out);
            }
        }
        Agent::Done | Agent::Prim(_) | Agent::Guarded(_) => {}
    }
}

#[cfg(test)]
mod tests {
    use crate::parser::{parse_program, DiagKind};

    fn kinds(text: &str) -> Vec<DiagKind> {
        match parse_program(text) {
            Ok(_) => Vec::new(),
            Err(d) => d.into_iter().map(|d| d.kind).collect(),
        }
    }

    #[test]
    fn self_call_is_unguarded() {
        assert_eq!(kinds("proc P() = P(). run P()."), vec![DiagKind::UnguardedProcedure]);
    }

    #[test]
    fn mutual_unguarded_recursion() {
        let k = kinds("proc P() = tell(a) + Q(). proc Q() = (1 = 1) -> P(). run P().");
        assert_eq!(k, vec![DiagKind::UnguardedProcedure, DiagKind::UnguardedProcedure]);
    }

    #[test]
    fn guarded_recursion_is_fine() {
        assert!(kinds("proc P() = tell(a); P() + [get(b)]; P(). run P().").is_empty());
    }

    #[test]
    fn overlapping_equations() {
        let k = kinds("eset S = {1, 2, 3}. map f : S -> S. eqn f(1) = 2. f(1) = 3. run tell(a).");
        assert_eq!(k, vec![DiagKind::OverlappingEquations]);
    }

    #[test]
    fn call_arity() {
        let k = kinds("eset S = {1, 2}. proc V(a: S, b: S, c: S) = tell(x(a, b, c)). run V(1).");
        assert_eq!(k, vec![DiagKind::ArityMismatch]);
    }

    #[test]
    fn unresolved_names() {
        assert_eq!(kinds("run Missing(1)."), vec![DiagKind::UnresolvedIdentifier]);
        assert_eq!(kinds("run [get(a) -> blink(1)]."), vec![DiagKind::UnresolvedIdentifier]);
        assert_eq!(kinds("map f : S -> S. run tell(a)."), vec![DiagKind::UnresolvedIdentifier; 2]);
    }

    #[test]
    fn condition_types() {
        assert_eq!(
            kinds("eset C = {red, blue}. proc P(c: C) = (c > 1) -> tell(a). run P(red)."),
            vec![DiagKind::TypeMismatch]
        );
        assert!(kinds("eset C = {red, blue}. proc P(c: C) = (c = red) -> tell(a). run P(red).").is_empty());
        assert_eq!(
            kinds("eset C = {red, blue}. eset R = {1}. proc P(c: C) = (c = 1) -> tell(a). run P(red)."),
            vec![DiagKind::TypeMismatch]
        );
    }

    #[test]
    fn argument_outside_parameter_set() {
        assert_eq!(kinds("eset R = {1, 2}. proc P(r: R) = tell(a). run P(7)."), vec![DiagKind::TypeMismatch]);
    }

    #[test]
    fn duplicates() {
        assert_eq!(kinds("proc P() = tell(a). proc P() = tell(b). run P()."), vec![DiagKind::DuplicateDefinition]);
        assert_eq!(kinds("eset S = {1, 1}. run tell(a)."), vec![DiagKind::InvalidSet]);
    }
}
