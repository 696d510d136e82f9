//! State formulae over occurrence counts and the temporal fragment
//! `TF ::= PF | Next TF | PF Until TF`.

use std::fmt;

use num_bigint::BigInt;

use crate::ast::CmpOp;
use crate::store::Store;
use crate::term::{Defs, SiTerm, TermError};

/// Integer expressions over literals and `#t` occurrence counts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(BigInt),
    Count(SiTerm),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn int(i: i64) -> Self {
        Expr::Int(BigInt::from(i))
    }

    pub fn count(t: SiTerm) -> Self {
        Expr::Count(t)
    }

    pub fn add(l: Expr, r: Expr) -> Self {
        Expr::Add(Box::new(l), Box::new(r))
    }

    pub fn sub(l: Expr, r: Expr) -> Self {
        Expr::Sub(Box::new(l), Box::new(r))
    }

    pub fn mul(l: Expr, r: Expr) -> Self {
        Expr::Mul(Box::new(l), Box::new(r))
    }

    pub fn eval(&self, store: &Store) -> BigInt {
        match self {
            Expr::Int(i) => i.clone(),
            Expr::Count(t) => BigInt::from(store.count(t)),
            Expr::Neg(e) => -e.eval(store),
            Expr::Add(l, r) => l.eval(store) + r.eval(store),
            Expr::Sub(l, r) => l.eval(store) - r.eval(store),
            Expr::Mul(l, r) => l.eval(store) * r.eval(store),
        }
    }

    fn terms_mut(&mut self, f: &mut impl FnMut(&mut SiTerm)) {
        match self {
            Expr::Int(_) => {}
            Expr::Count(t) => f(t),
            Expr::Neg(e) => e.terms_mut(f),
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) => {
                l.terms_mut(f);
                r.terms_mut(f);
            }
        }
    }

    fn terms<'a>(&'a self, out: &mut Vec<&'a SiTerm>) {
        match self {
            Expr::Int(_) => {}
            Expr::Count(t) => out.push(t),
            Expr::Neg(e) => e.terms(out),
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) => {
                l.terms(out);
                r.terms(out);
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Int(_) | Expr::Count(_) => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.prec() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Expr::Int(i) => write!(f, "{i}")?,
            Expr::Count(t) => write!(f, "#{t}")?,
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.fmt_prec(f, 4)?;
            }
            Expr::Add(l, r) | Expr::Sub(l, r) => {
                l.fmt_prec(f, 1)?;
                f.write_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                r.fmt_prec(f, 2)?;
            }
            Expr::Mul(l, r) => {
                l.fmt_prec(f, 2)?;
                f.write_str(" * ")?;
                r.fmt_prec(f, 3)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Propositional state formula, evaluated on a single store.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PropFormula {
    Bool(bool),
    Not(Box<PropFormula>),
    And(Box<PropFormula>, Box<PropFormula>),
    Or(Box<PropFormula>, Box<PropFormula>),
    Cmp(CmpOp, Expr, Expr),
}

impl PropFormula {
    pub fn cmp(op: CmpOp, l: Expr, r: Expr) -> Self {
        PropFormula::Cmp(op, l, r)
    }

    /// `#t = n`
    pub fn count_eq(t: SiTerm, n: i64) -> Self {
        PropFormula::Cmp(CmpOp::Eq, Expr::count(t), Expr::int(n))
    }

    pub fn and(l: PropFormula, r: PropFormula) -> Self {
        PropFormula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: PropFormula, r: PropFormula) -> Self {
        PropFormula::Or(Box::new(l), Box::new(r))
    }

    pub fn negate(p: PropFormula) -> Self {
        PropFormula::Not(Box::new(p))
    }

    pub fn eval(&self, store: &Store) -> bool {
        match self {
            PropFormula::Bool(b) => *b,
            PropFormula::Not(p) => !p.eval(store),
            PropFormula::And(l, r) => l.eval(store) && r.eval(store),
            PropFormula::Or(l, r) => l.eval(store) || r.eval(store),
            PropFormula::Cmp(op, l, r) => op.holds(l.eval(store).cmp(&r.eval(store))),
        }
    }

    /// The si-terms whose counts the formula observes.
    pub fn counted_terms(&self) -> Vec<&SiTerm> {
        let mut out = Vec::new();
        self.collect_terms(&mut out);
        out
    }

    fn collect_terms<'a>(&'a self, out: &mut Vec<&'a SiTerm>) {
        match self {
            PropFormula::Bool(_) => {}
            PropFormula::Not(p) => p.collect_terms(out),
            PropFormula::And(l, r) | PropFormula::Or(l, r) => {
                l.collect_terms(out);
                r.collect_terms(out);
            }
            PropFormula::Cmp(_, l, r) => {
                l.terms(out);
                r.terms(out);
            }
        }
    }

    fn terms_mut(&mut self, f: &mut impl FnMut(&mut SiTerm)) {
        match self {
            PropFormula::Bool(_) => {}
            PropFormula::Not(p) => p.terms_mut(f),
            PropFormula::And(l, r) | PropFormula::Or(l, r) => {
                l.terms_mut(f);
                r.terms_mut(f);
            }
            PropFormula::Cmp(_, l, r) => {
                l.terms_mut(f);
                r.terms_mut(f);
            }
        }
    }

    /// Rewrites every counted term to its final form.
    pub fn validate(&mut self, defs: &Defs) -> Result<(), TermError> {
        let mut err = None;
        self.terms_mut(&mut |t| {
            if err.is_none() {
                match defs.rewrite(t) {
                    Ok(u) => *t = u,
                    Err(e) => err = Some(e),
                }
            }
        });
        err.map_or(Ok(()), Err)
    }

    fn prec(&self) -> u8 {
        match self {
            PropFormula::Or(..) => 1,
            PropFormula::And(..) => 2,
            PropFormula::Not(_) => 3,
            PropFormula::Bool(_) | PropFormula::Cmp(..) => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.prec() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            PropFormula::Bool(b) => write!(f, "{b}")?,
            PropFormula::Not(p) => {
                f.write_str("!")?;
                p.fmt_prec(f, 5)?;
            }
            PropFormula::And(l, r) => {
                l.fmt_prec(f, 3)?;
                f.write_str(" & ")?;
                r.fmt_prec(f, 2)?;
            }
            PropFormula::Or(l, r) => {
                l.fmt_prec(f, 2)?;
                f.write_str(" | ")?;
                r.fmt_prec(f, 1)?;
            }
            PropFormula::Cmp(op, l, r) => write!(f, "{l} {} {r}", op.symbol())?,
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TemporalFormula {
    Prop(PropFormula),
    Next(Box<TemporalFormula>),
    Until(PropFormula, Box<TemporalFormula>),
}

impl TemporalFormula {
    pub fn next(tf: TemporalFormula) -> Self {
        TemporalFormula::Next(Box::new(tf))
    }

    pub fn until(pf: PropFormula, tf: TemporalFormula) -> Self {
        TemporalFormula::Until(pf, Box::new(tf))
    }

    pub fn reach(pf: PropFormula) -> Self {
        desugar_reach(pf)
    }

    /// The `pf` of `true Until pf`, if the formula has that shape.
    pub fn as_reach(&self) -> Option<&PropFormula> {
        match self {
            TemporalFormula::Until(PropFormula::Bool(true), tf) => match &**tf {
                TemporalFormula::Prop(pf) => Some(pf),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn validate(&mut self, defs: &Defs) -> Result<(), TermError> {
        match self {
            TemporalFormula::Prop(pf) => pf.validate(defs),
            TemporalFormula::Next(tf) => tf.validate(defs),
            TemporalFormula::Until(pf, tf) => {
                pf.validate(defs)?;
                tf.validate(defs)
            }
        }
    }

    pub fn counted_terms(&self) -> Vec<&SiTerm> {
        match self {
            TemporalFormula::Prop(pf) => pf.counted_terms(),
            TemporalFormula::Next(tf) => tf.counted_terms(),
            TemporalFormula::Until(pf, tf) => {
                let mut v = pf.counted_terms();
                v.extend(tf.counted_terms());
                v
            }
        }
    }
}

/// `Reach(pf)` abbreviates `true Until pf`.
pub fn desugar_reach(pf: PropFormula) -> TemporalFormula {
    TemporalFormula::until(PropFormula::Bool(true), TemporalFormula::Prop(pf))
}

pub fn eval_prop(pf: &PropFormula, store: &Store) -> bool {
    pf.eval(store)
}

impl fmt::Display for TemporalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(pf) = self.as_reach() {
            return write!(f, "Reach({pf})");
        }
        match self {
            TemporalFormula::Prop(pf) => write!(f, "{pf}"),
            TemporalFormula::Next(tf) => match &**tf {
                TemporalFormula::Prop(_) => write!(f, "Next ({tf})"),
                _ => write!(f, "Next {tf}"),
            },
            TemporalFormula::Until(pf, tf) => {
                let lhs = match pf {
                    PropFormula::Bool(_) | PropFormula::Cmp(..) | PropFormula::Not(_) => format!("{pf}"),
                    _ => format!("({pf})"),
                };
                match &**tf {
                    TemporalFormula::Prop(p) => write!(f, "{lhs} Until ({p})"),
                    _ => write!(f, "{lhs} Until {tf}"),
                }
            }
        }
    }
}
