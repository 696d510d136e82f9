use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;

use crate::ast::{Agent, Call, CmpOp, Condition, Decl, FormulaDecl, GuardedList, Param, Prim, PrimKind, ProcDef, Program};
use crate::logic::{Expr, PropFormula, TemporalFormula};
use crate::semantics::{Rule, TransitionLabel};
use crate::source::SrcPos;
use crate::store::Store;
use crate::term::{name, Defs, Equation, MapDef, Name, SetDef, SiTerm};

use super::lexer::{lex, Tok, Token};
use super::{DiagKind, Diagnostic};

type PResult<T> = Result<T, Diagnostic>;

const KEYWORDS: &[&str] = &[
    "eset", "map", "eqn", "gprim", "proc", "formula", "run", "tell", "ask", "nask", "get", "Reach", "Until", "Next",
    "true", "false",
];

const DECL_KEYWORDS: &[&str] = &["eset", "map", "eqn", "gprim", "proc", "formula", "run"];

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        Ok(Parser { toks: lex(text)?, i: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> SrcPos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> Diagnostic {
        Diagnostic::new(
            DiagKind::SyntaxError,
            self.pos(),
            format!("expected {expected}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, t: Tok, expected: &str) -> PResult<SrcPos> {
        if self.peek() == &t {
            Ok(self.bump().pos)
        } else {
            Err(self.error(expected))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self, what: &str) -> PResult<(Name, SrcPos)> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let pos = self.bump().pos;
                Ok((name(&s), pos))
            }
            _ => Err(self.error(what)),
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    // ---- terms ----

    fn term(&mut self) -> PResult<SiTerm> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(SiTerm::Int(i))
            }
            Tok::Minus if matches!(self.peek_at(1), Tok::Int(_)) => {
                self.bump();
                let Tok::Int(i) = self.bump().tok else { unreachable!() };
                Ok(SiTerm::Int(-i))
            }
            Tok::Ident(_) => {
                let (head, _) = self.ident("a term")?;
                if self.eat(&Tok::LParen) {
                    let args = self.term_list(Tok::RParen)?;
                    Ok(SiTerm::Compound(head, args.into()))
                } else {
                    Ok(SiTerm::Token(head))
                }
            }
            _ => Err(self.error("a term")),
        }
    }

    /// Comma-separated terms up to and including `close`.
    fn term_list(&mut self, close: Tok) -> PResult<Vec<SiTerm>> {
        let mut args = Vec::new();
        if self.eat(&close) {
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(close.clone(), "`,` or a closing bracket")?;
            return Ok(args);
        }
    }

    fn cmp_op(&mut self) -> Option<CmpOp> {
        let op = match self.peek() {
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            _ => return None,
        };
        self.bump();
        Some(op)
    }

    // ---- conditions ----

    fn condition(&mut self) -> PResult<Condition> {
        let l = self.cond_and()?;
        if self.eat(&Tok::Bar) {
            return Ok(Condition::or(l, self.condition()?));
        }
        Ok(l)
    }

    fn cond_and(&mut self) -> PResult<Condition> {
        let l = self.cond_not()?;
        if self.eat(&Tok::Amp) {
            return Ok(Condition::and(l, self.cond_and()?));
        }
        Ok(l)
    }

    fn cond_not(&mut self) -> PResult<Condition> {
        if self.eat(&Tok::Bang) {
            return Ok(Condition::negate(self.cond_not()?));
        }
        if self.eat(&Tok::LParen) {
            let c = self.condition()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(c);
        }
        if self.is_kw("true") || self.is_kw("false") {
            let b = self.is_kw("true");
            self.bump();
            return Ok(Condition::Bool(b));
        }
        let l = self.term()?;
        let op = self.cmp_op().ok_or_else(|| self.error("a comparison operator"))?;
        let r = self.term()?;
        Ok(Condition::Cmp(op, l, r))
    }

    // ---- agents ----

    fn agent(&mut self) -> PResult<Agent> {
        let l = self.par_agent()?;
        if self.eat(&Tok::Plus) {
            return Ok(Agent::choice(l, self.agent()?));
        }
        Ok(l)
    }

    fn par_agent(&mut self) -> PResult<Agent> {
        let l = self.seq_agent()?;
        if self.eat(&Tok::Parallel) {
            return Ok(Agent::par(l, self.par_agent()?));
        }
        Ok(l)
    }

    fn seq_agent(&mut self) -> PResult<Agent> {
        let l = self.primary_agent()?;
        if self.eat(&Tok::Semi) {
            return Ok(Agent::seq(l, self.seq_agent()?));
        }
        Ok(l)
    }

    fn primary_agent(&mut self) -> PResult<Agent> {
        // `cond -> A <> B`: only committed once the arrow is seen
        let save = self.i;
        if let Ok(cond) = self.condition() {
            if self.eat(&Tok::Arrow) {
                let then = self.seq_agent()?;
                let otherwise = if self.eat(&Tok::Diamond) { Some(self.seq_agent()?) } else { None };
                return Ok(Agent::cond(cond, then, otherwise));
            }
        }
        self.i = save;
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let a = self.agent()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(a)
            }
            Tok::LBracket => self.guarded_list().map(Agent::from),
            Tok::Ident(s) if matches!(s.as_str(), "tell" | "ask" | "nask" | "get") => Ok(Agent::Prim(self.store_prim()?)),
            Tok::Ident(_) => {
                let (head, pos) = self.ident("an agent")?;
                let args = if self.eat(&Tok::LParen) { self.term_list(Tok::RParen)? } else { Vec::new() };
                Ok(Agent::Call(Call { name: head, args: args.into(), pos }))
            }
            _ => Err(self.error("an agent")),
        }
    }

    fn store_prim(&mut self) -> PResult<Prim> {
        let tok = self.bump();
        let kind = match &tok.tok {
            Tok::Ident(s) if s == "tell" => PrimKind::Tell,
            Tok::Ident(s) if s == "ask" => PrimKind::Ask,
            Tok::Ident(s) if s == "nask" => PrimKind::Nask,
            Tok::Ident(s) if s == "get" => PrimKind::Get,
            _ => unreachable!("caller checked the keyword"),
        };
        self.expect(Tok::LParen, "`(`")?;
        let t = self.term()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(Prim::new(kind, vec![t]).at(tok.pos))
    }

    /// Any primitive; non-keyword heads become graphical primitives.
    fn prim(&mut self) -> PResult<Prim> {
        match self.peek() {
            Tok::Ident(s) if matches!(s.as_str(), "tell" | "ask" | "nask" | "get") => self.store_prim(),
            _ => {
                let (head, pos) = self.ident("a primitive")?;
                let args = if self.eat(&Tok::LParen) { self.term_list(Tok::RParen)? } else { Vec::new() };
                Ok(Prim::new(PrimKind::Graphical(head), args).at(pos))
            }
        }
    }

    fn guarded_list(&mut self) -> PResult<GuardedList> {
        self.expect(Tok::LBracket, "`[`")?;
        let guard = self.prim()?;
        let mut tail = Vec::new();
        if self.eat(&Tok::Arrow) {
            loop {
                tail.push(self.prim()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RBracket, "`]`")?;
        Ok(GuardedList::new(guard, tail))
    }

    // ---- formulas ----

    fn temporal(&mut self) -> PResult<TemporalFormula> {
        if self.is_kw("Next") {
            self.bump();
            return Ok(TemporalFormula::next(self.temporal()?));
        }
        if self.is_kw("Reach") {
            self.bump();
            self.expect(Tok::LParen, "`(` after Reach")?;
            let pf = self.prop()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(TemporalFormula::reach(pf));
        }
        let save = self.i;
        match self.prop() {
            Ok(pf) => {
                if self.is_kw("Until") {
                    self.bump();
                    return Ok(TemporalFormula::until(pf, self.temporal()?));
                }
                Ok(TemporalFormula::Prop(pf))
            }
            Err(e) => {
                self.i = save;
                if self.eat(&Tok::LParen) {
                    let tf = self.temporal()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(tf);
                }
                Err(e)
            }
        }
    }

    fn prop(&mut self) -> PResult<PropFormula> {
        let l = self.prop_and()?;
        if self.eat(&Tok::Bar) {
            return Ok(PropFormula::or(l, self.prop()?));
        }
        Ok(l)
    }

    fn prop_and(&mut self) -> PResult<PropFormula> {
        let l = self.prop_not()?;
        if self.eat(&Tok::Amp) {
            return Ok(PropFormula::and(l, self.prop_and()?));
        }
        Ok(l)
    }

    fn prop_not(&mut self) -> PResult<PropFormula> {
        if self.eat(&Tok::Bang) {
            return Ok(PropFormula::negate(self.prop_not()?));
        }
        if self.is_kw("true") || self.is_kw("false") {
            let b = self.is_kw("true");
            self.bump();
            return Ok(PropFormula::Bool(b));
        }
        if self.peek() == &Tok::LParen {
            let save = self.i;
            self.bump();
            if let Ok(p) = self.prop() {
                if self.eat(&Tok::RParen) {
                    return Ok(p);
                }
            }
            self.i = save;
        }
        let l = self.expr()?;
        let op = self.cmp_op().ok_or_else(|| self.error("a comparison operator"))?;
        let r = self.expr()?;
        Ok(PropFormula::Cmp(op, l, r))
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut l = self.expr_mul()?;
        loop {
            if self.eat(&Tok::Plus) {
                l = Expr::add(l, self.expr_mul()?);
            } else if self.eat(&Tok::Minus) {
                l = Expr::sub(l, self.expr_mul()?);
            } else {
                return Ok(l);
            }
        }
    }

    fn expr_mul(&mut self) -> PResult<Expr> {
        let mut l = self.expr_unary()?;
        while self.eat(&Tok::Star) {
            l = Expr::mul(l, self.expr_unary()?);
        }
        Ok(l)
    }

    fn expr_unary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(Expr::Int(BigInt::from(i)))
            }
            Tok::Minus => {
                self.bump();
                if let Tok::Int(i) = *self.peek() {
                    self.bump();
                    return Ok(Expr::Int(-BigInt::from(i)));
                }
                Ok(Expr::Neg(Box::new(self.expr_unary()?)))
            }
            Tok::Hash => {
                self.bump();
                Ok(Expr::Count(self.term()?))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(self.error("an integer expression")),
        }
    }

    // ---- declarations ----

    fn skip_to_next_decl(&mut self) {
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Dot => {
                    self.bump();
                    if let Tok::Ident(s) = self.peek() {
                        if DECL_KEYWORDS.contains(&s.as_str()) {
                            return;
                        }
                    }
                }
                _ => {
                    self.bump();
                }
            }
        }
    }
}

#[derive(Default)]
struct RawProgram {
    sets: Vec<SetDef>,
    maps: Vec<MapDef>,
    eqns: Vec<(Name, SrcPos, Equation)>,
    gprims: Vec<(Name, SrcPos)>,
    procs: Vec<ProcDef>,
    formulas: Vec<(Name, SrcPos, TemporalFormula)>,
    main: Option<(Agent, SrcPos)>,
    order: Vec<Decl>,
}

fn parse_decl(p: &mut Parser, raw: &mut RawProgram, diags: &mut Vec<Diagnostic>) -> PResult<()> {
    let kw_pos = p.pos();
    let Tok::Ident(kw) = p.peek().clone() else {
        return Err(p.error("a declaration (eset, map, eqn, gprim, proc, formula, run)"));
    };
    match kw.as_str() {
        "eset" => {
            p.bump();
            let (set_name, pos) = p.ident("a set name")?;
            p.expect(Tok::Eq, "`=`")?;
            p.expect(Tok::LBrace, "`{`")?;
            let mut elements = Vec::new();
            if !p.eat(&Tok::RBrace) {
                loop {
                    let e = p.term()?;
                    if !e.is_atom() {
                        return Err(Diagnostic::new(DiagKind::InvalidSet, pos, format!("set element `{e}` is not an atom")));
                    }
                    elements.push(e);
                    if p.eat(&Tok::Comma) {
                        continue;
                    }
                    p.expect(Tok::RBrace, "`,` or `}`")?;
                    break;
                }
            }
            p.expect(Tok::Dot, "`.`")?;
            raw.order.push(Decl::Set(raw.sets.len()));
            raw.sets.push(SetDef { name: set_name, elements, pos });
        }
        "map" => {
            p.bump();
            let (map_name, pos) = p.ident("a map name")?;
            p.expect(Tok::Colon, "`:`")?;
            let mut domain = Vec::new();
            if !p.eat(&Tok::Arrow) {
                loop {
                    domain.push(p.ident("a set name")?.0);
                    if p.eat(&Tok::Hash) {
                        continue;
                    }
                    p.expect(Tok::Arrow, "`#` or `->`")?;
                    break;
                }
            }
            let codomain = p.ident("a set name")?.0;
            p.expect(Tok::Dot, "`.`")?;
            raw.order.push(Decl::Map(raw.maps.len()));
            raw.maps.push(MapDef { name: map_name, domain, codomain, equations: Vec::new(), pos });
        }
        "eqn" => {
            p.bump();
            let mut any = false;
            while let Tok::Ident(s) = p.peek() {
                if KEYWORDS.contains(&s.as_str()) {
                    break;
                }
                let (map_name, pos) = p.ident("a map name")?;
                let args = if p.eat(&Tok::LParen) { p.term_list(Tok::RParen)? } else { Vec::new() };
                p.expect(Tok::Eq, "`=`")?;
                let rhs = p.term()?;
                p.expect(Tok::Dot, "`.`")?;
                raw.eqns.push((map_name, pos, Equation { args, rhs, pos }));
                any = true;
            }
            if !any {
                return Err(p.error("an equation"));
            }
        }
        "gprim" => {
            p.bump();
            loop {
                let (g, pos) = p.ident("a graphical primitive name")?;
                raw.order.push(Decl::GPrim(raw.gprims.len()));
                raw.gprims.push((g, pos));
                if !p.eat(&Tok::Comma) {
                    break;
                }
            }
            p.expect(Tok::Dot, "`.`")?;
        }
        "proc" => {
            p.bump();
            let (proc_name, pos) = p.ident("a procedure name")?;
            let mut params = Vec::new();
            if p.eat(&Tok::LParen) && !p.eat(&Tok::RParen) {
                loop {
                    let (pname, _) = p.ident("a parameter name")?;
                    p.expect(Tok::Colon, "`:`")?;
                    let (set, _) = p.ident("a set name")?;
                    params.push(Param { name: pname, set });
                    if p.eat(&Tok::Comma) {
                        continue;
                    }
                    p.expect(Tok::RParen, "`,` or `)`")?;
                    break;
                }
            }
            p.expect(Tok::Eq, "`=`")?;
            let body = p.agent()?;
            p.expect(Tok::Dot, "`.`")?;
            raw.order.push(Decl::Proc(raw.procs.len()));
            raw.procs.push(ProcDef { name: proc_name, params, body, pos });
        }
        "formula" => {
            p.bump();
            let (fname, pos) = p.ident("a formula name")?;
            p.expect(Tok::Eq, "`=`")?;
            let tf = p.temporal()?;
            p.expect(Tok::Dot, "`.`")?;
            raw.order.push(Decl::Formula(raw.formulas.len()));
            raw.formulas.push((fname, pos, tf));
        }
        "run" => {
            p.bump();
            let agent = p.agent()?;
            p.expect(Tok::Dot, "`.`")?;
            if raw.main.is_some() {
                diags.push(Diagnostic::new(DiagKind::DuplicateDefinition, kw_pos, "more than one `run` declaration"));
            } else {
                raw.order.push(Decl::Main);
                raw.main = Some((agent, kw_pos));
            }
        }
        _ => return Err(p.error("a declaration (eset, map, eqn, gprim, proc, formula, run)")),
    }
    Ok(())
}

/// Name tables used to turn parsed identifiers into variables, map
/// applications, graphical primitives or calls.
struct Scope<'a> {
    maps: HashSet<&'a str>,
    gprims: HashSet<&'a str>,
    params: HashSet<Name>,
}

impl Scope<'_> {
    fn term(&self, t: &SiTerm) -> SiTerm {
        match t {
            SiTerm::Token(x) if self.params.contains(x) => SiTerm::Var(x.clone()),
            SiTerm::Token(x) if self.maps.contains(&**x) => SiTerm::MapApp(x.clone(), Vec::new().into()),
            SiTerm::Compound(f, args) => {
                let args = args.iter().map(|a| self.term(a)).collect();
                if self.maps.contains(&**f) {
                    SiTerm::MapApp(f.clone(), args)
                } else {
                    SiTerm::Compound(f.clone(), args)
                }
            }
            _ => t.clone(),
        }
    }

    fn agent(&self, a: &Agent) -> Agent {
        let a = a.map_terms(&mut |t| self.term(t));
        self.calls_to_gprims(&a)
    }

    fn calls_to_gprims(&self, a: &Agent) -> Agent {
        match a {
            Agent::Call(c) if self.gprims.contains(&*c.name) => {
                Agent::Prim(Prim { kind: PrimKind::Graphical(c.name.clone()), args: c.args.clone(), pos: c.pos })
            }
            Agent::Seq(x, y) => Agent::seq(self.calls_to_gprims(x), self.calls_to_gprims(y)),
            Agent::Par(x, y) => Agent::par(self.calls_to_gprims(x), self.calls_to_gprims(y)),
            Agent::Choice(x, y) => Agent::choice(self.calls_to_gprims(x), self.calls_to_gprims(y)),
            Agent::Cond(c) => Agent::cond(
                c.cond.clone(),
                self.calls_to_gprims(&c.then),
                c.otherwise.as_ref().map(|o| self.calls_to_gprims(o)),
            ),
            _ => a.clone(),
        }
    }

    fn temporal(&self, tf: &TemporalFormula) -> TemporalFormula {
        match tf {
            TemporalFormula::Prop(pf) => TemporalFormula::Prop(self.prop(pf)),
            TemporalFormula::Next(t) => TemporalFormula::next(self.temporal(t)),
            TemporalFormula::Until(pf, t) => TemporalFormula::until(self.prop(pf), self.temporal(t)),
        }
    }

    fn prop(&self, pf: &PropFormula) -> PropFormula {
        match pf {
            PropFormula::Bool(b) => PropFormula::Bool(*b),
            PropFormula::Not(p) => PropFormula::negate(self.prop(p)),
            PropFormula::And(l, r) => PropFormula::and(self.prop(l), self.prop(r)),
            PropFormula::Or(l, r) => PropFormula::or(self.prop(l), self.prop(r)),
            PropFormula::Cmp(op, l, r) => PropFormula::Cmp(*op, self.expr(l), self.expr(r)),
        }
    }

    fn expr(&self, e: &Expr) -> Expr {
        match e {
            Expr::Int(i) => Expr::Int(i.clone()),
            Expr::Count(t) => Expr::Count(self.term(t)),
            Expr::Neg(x) => Expr::Neg(Box::new(self.expr(x))),
            Expr::Add(l, r) => Expr::add(self.expr(l), self.expr(r)),
            Expr::Sub(l, r) => Expr::sub(self.expr(l), self.expr(r)),
            Expr::Mul(l, r) => Expr::mul(self.expr(l), self.expr(r)),
        }
    }
}

fn program_scope<'a>(maps: impl Iterator<Item = &'a Name>, gprims: impl Iterator<Item = &'a Name>) -> Scope<'a> {
    Scope { maps: maps.map(|m| &**m).collect(), gprims: gprims.map(|g| &**g).collect(), params: HashSet::new() }
}

pub fn parse_program(text: &str) -> Result<Program, Vec<Diagnostic>> {
    let mut p = Parser::new(text).map_err(|d| vec![d])?;
    let mut raw = RawProgram::default();
    let mut diags = Vec::new();
    while p.peek() != &Tok::Eof {
        if let Err(d) = parse_decl(&mut p, &mut raw, &mut diags) {
            diags.push(d);
            p.skip_to_next_decl();
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }

    let RawProgram { sets, mut maps, eqns, gprims, procs, formulas, main, order } = raw;
    let map_names: HashMap<Name, usize> = maps.iter().enumerate().map(|(i, m)| (m.name.clone(), i)).collect();
    let gprim_names: Vec<Name> = gprims.iter().map(|(g, _)| g.clone()).collect();
    let mut scope = program_scope(map_names.keys(), gprim_names.iter());

    for (map_name, pos, mut eq) in eqns {
        match map_names.get(&map_name) {
            Some(&i) => {
                eq.args = eq.args.iter().map(|a| scope.term(a)).collect();
                eq.rhs = scope.term(&eq.rhs);
                maps[i].equations.push(eq);
            }
            None => diags.push(Diagnostic::new(
                DiagKind::UnresolvedIdentifier,
                pos,
                format!("equation for undeclared map `{map_name}`"),
            )),
        }
    }

    let procs: Vec<ProcDef> = procs
        .into_iter()
        .map(|proc| {
            scope.params = proc.params.iter().map(|p| p.name.clone()).collect();
            let body = scope.agent(&proc.body);
            ProcDef { body, ..proc }
        })
        .collect();
    scope.params.clear();

    let (main, main_pos) = match main {
        Some((a, pos)) => (scope.agent(&a), pos),
        None => {
            diags.push(Diagnostic::new(DiagKind::SyntaxError, p.pos(), "program has no `run` declaration"));
            (Agent::Done, SrcPos::default())
        }
    };

    let defs = Defs::new(sets, maps.clone());
    let mut formula_decls = Vec::new();
    for (fname, pos, tf) in formulas {
        let mut tf = scope.temporal(&tf);
        match tf.validate(&defs) {
            Ok(()) => formula_decls.push(FormulaDecl { name: fname, formula: tf, pos }),
            Err(e) => diags.push(Diagnostic::new(DiagKind::InvalidFormula, pos, format!("formula `{fname}`: {e}"))),
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }

    let gprims = gprims.into_iter().map(|(g, _)| g).collect();
    let mut prog = Program::new(defs, gprims, procs, formula_decls, main, order);
    prog.main_pos = main_pos;
    Ok(prog)
}

pub fn parse_formula(text: &str, prog: &Program) -> PResult<TemporalFormula> {
    let mut p = Parser::new(text)?;
    let tf = p.temporal()?;
    p.expect_eof()?;
    let scope = program_scope(prog.defs.maps().iter().map(|m| &m.name), prog.gprims.iter());
    let mut tf = scope.temporal(&tf);
    tf.validate(&prog.defs)
        .map_err(|e| Diagnostic::new(DiagKind::InvalidFormula, SrcPos::new(1, 1), e.to_string()))?;
    Ok(tf)
}

pub fn parse_agent(text: &str, prog: &Program) -> PResult<Agent> {
    let mut p = Parser::new(text)?;
    let a = p.agent()?;
    p.expect_eof()?;
    let scope = program_scope(prog.defs.maps().iter().map(|m| &m.name), prog.gprims.iter());
    Ok(scope.agent(&a))
}

pub fn parse_final_term(text: &str) -> PResult<SiTerm> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_store(text: &str) -> PResult<Store> {
    let mut p = Parser::new(text)?;
    p.expect(Tok::LBrace, "`{`")?;
    let mut store = Store::new();
    if !p.eat(&Tok::RBrace) {
        loop {
            let t = p.term()?;
            p.expect(Tok::Colon, "`:`")?;
            let pos = p.pos();
            let Tok::Int(n) = p.bump().tok else {
                return Err(Diagnostic::new(DiagKind::SyntaxError, pos, "expected an occurrence count"));
            };
            if n < 1 {
                return Err(Diagnostic::new(DiagKind::SyntaxError, pos, "occurrence counts must be positive"));
            }
            for _ in 0..n {
                store.insert(t.clone());
            }
            if p.eat(&Tok::Comma) {
                continue;
            }
            p.expect(Tok::RBrace, "`,` or `}`")?;
            break;
        }
    }
    p.expect_eof()?;
    Ok(store)
}

pub fn parse_label(text: &str) -> PResult<TransitionLabel> {
    let mut p = Parser::new(text)?;
    let pos = p.pos();
    let rule = match p.bump().tok {
        Tok::Ident(s) => Rule::parse(&s),
        _ => None,
    }
    .ok_or_else(|| Diagnostic::new(DiagKind::SyntaxError, pos, "expected a rule name"))?;
    let mut prims = vec![p.prim()?];
    while p.eat(&Tok::Semi) {
        prims.push(p.prim()?);
    }
    p.expect_eof()?;
    let prims = prims.into_iter().map(|mut q| {
        q.pos = SrcPos::default();
        q
    });
    Ok(TransitionLabel { rule, prims: prims.collect(), derivation: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Conditional;

    fn prog(text: &str) -> Program {
        parse_program(text).unwrap_or_else(|d| panic!("{d:?}"))
    }

    #[test]
    fn guarded_list_without_tail() {
        let p = prog("run [ get(a) ].");
        match &p.main {
            Agent::Guarded(g) => {
                assert_eq!(g.guard, Prim::get(SiTerm::token("a")));
                assert!(g.tail.is_empty());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn operator_precedence() {
        let p = prog("run tell(a); tell(b) || tell(c) + tell(d).");
        let t = |s: &str| Agent::from(Prim::tell(SiTerm::token(s)));
        assert_eq!(p.main, Agent::choice(Agent::par(Agent::seq(t("a"), t("b")), t("c")), t("d")));
    }

    #[test]
    fn conditional_with_else() {
        let p = prog("run (1 < 2) -> tell(a) <> tell(b).");
        let Agent::Cond(c) = &p.main else { panic!() };
        let Conditional { cond, otherwise, .. } = &**c;
        assert_eq!(*cond, Condition::cmp(CmpOp::Lt, SiTerm::Int(1), SiTerm::Int(2)));
        assert!(otherwise.is_some());
    }

    #[test]
    fn params_maps_and_gprims_resolve() {
        let p = prog(
            "eset R = {1, 2}. map f : R -> R. eqn f(1) = 2. gprim draw.
             proc P(x: R) = get(cell(f(x))); draw(x); P(x).
             run P(1).",
        );
        let body = &p.proc("P").unwrap().body;
        let Agent::Seq(first, rest) = body else { panic!() };
        assert_eq!(
            **first,
            Agent::Prim(Prim::get(SiTerm::compound("cell", vec![SiTerm::map_app("f", vec![SiTerm::var("x")])])))
        );
        let Agent::Seq(draw, _) = &**rest else { panic!() };
        assert_eq!(**draw, Agent::Prim(Prim::graphical("draw", vec![SiTerm::var("x")])));
    }

    #[test]
    fn formulas() {
        let p = prog("eset R = {1, 2}. map f : R -> R. eqn f(1) = 2. formula x = Reach(#cell(f(1)) = 1). run tell(a).");
        let tf = p.formula("x").unwrap();
        let expected = TemporalFormula::reach(PropFormula::count_eq(SiTerm::compound("cell", vec![SiTerm::Int(2)]), 1));
        assert_eq!(tf, &expected);
        let nested = parse_formula("Next(Next(#a=1 & #b=1))", &p).unwrap();
        let inner = PropFormula::and(PropFormula::count_eq(SiTerm::token("a"), 1), PropFormula::count_eq(SiTerm::token("b"), 1));
        assert_eq!(nested, TemporalFormula::next(TemporalFormula::next(TemporalFormula::Prop(inner))));
        let until = parse_formula("#a = 0 Until Next (#b = 1)", &p).unwrap();
        assert!(matches!(until, TemporalFormula::Until(_, _)));
        let arith = parse_formula("(#a + 1) * 2 > -3", &p).unwrap();
        assert!(matches!(arith, TemporalFormula::Prop(PropFormula::Cmp(CmpOp::Gt, _, _))));
        assert_eq!(parse_formula("Reach(#f(2) = 1)", &p).unwrap_err().kind, DiagKind::InvalidFormula);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let d = parse_program("run tell(a).\nrun tell(.").unwrap_err();
        assert_eq!(d[0].kind, DiagKind::SyntaxError);
        assert_eq!((d[0].pos.line, d[0].pos.col), (2, 10));
    }

    #[test]
    fn store_and_label_text() {
        let s = parse_store("{free(1,1):2, out:1}").unwrap();
        assert_eq!(s.count(&SiTerm::compound("free", vec![SiTerm::Int(1), SiTerm::Int(1)])), 2);
        assert_eq!(parse_store(&s.to_string()).unwrap(), s);
        let l = parse_label("GL get(a) ; move(red,3,4) ; tell(b)").unwrap();
        assert_eq!(l.rule, Rule::GL);
        assert_eq!(l.prims.len(), 3);
        assert_eq!(l.to_string(), "GL get(a) ; move(red,3,4) ; tell(b)");
    }
}
