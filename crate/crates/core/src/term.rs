//! Si-terms, user-defined sets and maps, and the rewriting relation that
//! reduces map applications to final terms.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::source::SrcPos;

/// Interned-ish identifier. Cheap to clone, ordered by string content.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Default number of equation applications allowed while rewriting one term.
pub const DEFAULT_REWRITE_BUDGET: usize = 10_000;

/// A structured piece of information.
///
/// `MapApp` and `Var` only occur before rewriting / substitution; a *final*
/// term is built from `Int`, `Token` and `Compound` alone.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SiTerm {
    Int(i64),
    Token(Name),
    Compound(Name, Arc<[SiTerm]>),
    MapApp(Name, Arc<[SiTerm]>),
    Var(Name),
}

impl SiTerm {
    pub fn token(s: &str) -> Self {
        SiTerm::Token(name(s))
    }

    pub fn compound(functor: &str, args: Vec<SiTerm>) -> Self {
        SiTerm::Compound(name(functor), args.into())
    }

    pub fn map_app(map: &str, args: Vec<SiTerm>) -> Self {
        SiTerm::MapApp(name(map), args.into())
    }

    pub fn var(s: &str) -> Self {
        SiTerm::Var(name(s))
    }

    pub fn is_final(&self) -> bool {
        match self {
            SiTerm::Int(_) | SiTerm::Token(_) => true,
            SiTerm::Compound(_, args) => args.iter().all(SiTerm::is_final),
            SiTerm::MapApp(..) | SiTerm::Var(_) => false,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            SiTerm::Int(_) | SiTerm::Token(_) => true,
            SiTerm::Compound(_, args) | SiTerm::MapApp(_, args) => args.iter().all(SiTerm::is_ground),
            SiTerm::Var(_) => false,
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, SiTerm::Int(_) | SiTerm::Token(_))
    }

    /// Head symbol and arity; `None` for integers, variables and map
    /// applications whose head is not known before rewriting.
    pub fn head(&self) -> Option<(&str, usize)> {
        match self {
            SiTerm::Token(t) => Some((t, 0)),
            SiTerm::Compound(f, args) => Some((f, args.len())),
            _ => None,
        }
    }

    /// Replace variables by the bound terms. Unbound variables stay.
    pub fn substitute(&self, bindings: &HashMap<Name, SiTerm>) -> SiTerm {
        match self {
            SiTerm::Var(v) => bindings.get(v).cloned().unwrap_or_else(|| self.clone()),
            SiTerm::Compound(f, args) => {
                SiTerm::Compound(f.clone(), args.iter().map(|a| a.substitute(bindings)).collect())
            }
            SiTerm::MapApp(f, args) => {
                SiTerm::MapApp(f.clone(), args.iter().map(|a| a.substitute(bindings)).collect())
            }
            SiTerm::Int(_) | SiTerm::Token(_) => self.clone(),
        }
    }

    pub fn for_each_subterm<'a>(&'a self, f: &mut impl FnMut(&'a SiTerm)) {
        f(self);
        if let SiTerm::Compound(_, args) | SiTerm::MapApp(_, args) = self {
            for a in args.iter() {
                a.for_each_subterm(f);
            }
        }
    }
}

impl fmt::Display for SiTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiTerm::Int(i) => write!(f, "{i}"),
            SiTerm::Token(t) | SiTerm::Var(t) => f.write_str(t),
            SiTerm::Compound(h, args) | SiTerm::MapApp(h, args) => {
                write!(f, "{h}(")?;
                for (i, a) in args.iter().enumerate() {
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

/// `eset Name = { e1, ..., en }.`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetDef {
    pub name: Name,
    pub elements: Vec<SiTerm>,
    pub pos: SrcPos,
}

impl SetDef {
    pub fn contains(&self, t: &SiTerm) -> bool {
        self.elements.contains(t)
    }

    pub fn all_ints(&self) -> bool {
        self.elements.iter().all(|e| matches!(e, SiTerm::Int(_)))
    }

    pub fn all_tokens(&self) -> bool {
        self.elements.iter().all(|e| matches!(e, SiTerm::Token(_)))
    }
}

/// One ground equation `m(a1, ..., an) = rhs.`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub args: Vec<SiTerm>,
    pub rhs: SiTerm,
    pub pos: SrcPos,
}

/// `map m : S1 # ... # Sn -> T.` together with its equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapDef {
    pub name: Name,
    pub domain: Vec<Name>,
    pub codomain: Name,
    pub equations: Vec<Equation>,
    pub pos: SrcPos,
}

impl MapDef {
    pub fn arity(&self) -> usize {
        self.domain.len()
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("no equation of map `{map}` matches {map}({args})")]
    UndefinedMapApplication { map: Name, args: String },
    #[error("rewrite budget of {budget} steps exceeded while rewriting `{term}`")]
    RewriteBudgetExceeded { term: String, budget: usize },
    #[error("unknown map `{0}`")]
    UnknownMap(Name),
    #[error("free variable `{0}` in a term that must be ground")]
    FreeVariable(Name),
}

/// Set and map definitions of a program, with an equation index for
/// rewriting.
#[derive(Clone, Debug, Default)]
pub struct Defs {
    sets: Vec<SetDef>,
    maps: Vec<MapDef>,
    set_index: HashMap<Name, usize>,
    map_index: HashMap<Name, usize>,
    // per map: argument tuple -> index of the first equation with that lhs
    eqn_index: Vec<HashMap<Vec<SiTerm>, usize>>,
    budget: usize,
}

impl PartialEq for Defs {
    fn eq(&self, other: &Self) -> bool {
        self.sets == other.sets && self.maps == other.maps
    }
}

impl Eq for Defs {}

impl Defs {
    pub fn new(sets: Vec<SetDef>, maps: Vec<MapDef>) -> Self {
        let set_index = sets.iter().enumerate().map(|(i, s)| (s.name.clone(), i)).collect();
        let map_index = maps.iter().enumerate().map(|(i, m)| (m.name.clone(), i)).collect();
        let eqn_index = maps
            .iter()
            .map(|m| {
                let mut idx = HashMap::new();
                for (i, eq) in m.equations.iter().enumerate() {
                    idx.entry(eq.args.clone()).or_insert(i);
                }
                idx
            })
            .collect();
        Defs { sets, maps, set_index, map_index, eqn_index, budget: DEFAULT_REWRITE_BUDGET }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn sets(&self) -> &[SetDef] {
        &self.sets
    }

    pub fn maps(&self) -> &[MapDef] {
        &self.maps
    }

    pub fn set(&self, name: &str) -> Option<&SetDef> {
        self.set_index.get(name).map(|&i| &self.sets[i])
    }

    pub fn map(&self, name: &str) -> Option<&MapDef> {
        self.map_index.get(name).map(|&i| &self.maps[i])
    }

    /// Rewrite `term` to a final si-term: arguments innermost-first and
    /// left-to-right, then the matching equation of the enclosing map.
    pub fn rewrite(&self, term: &SiTerm) -> Result<SiTerm, TermError> {
        if term.is_final() {
            return Ok(term.clone());
        }
        let mut steps = 0;
        self.rewrite_inner(term, &mut steps).map_err(|e| match e {
            TermError::RewriteBudgetExceeded { budget, .. } => {
                TermError::RewriteBudgetExceeded { term: term.to_string(), budget }
            }
            other => other,
        })
    }

    fn rewrite_inner(&self, term: &SiTerm, steps: &mut usize) -> Result<SiTerm, TermError> {
        match term {
            SiTerm::Int(_) | SiTerm::Token(_) => Ok(term.clone()),
            SiTerm::Var(v) => Err(TermError::FreeVariable(v.clone())),
            SiTerm::Compound(f, args) => {
                if term.is_final() {
                    return Ok(term.clone());
                }
                let args = args
                    .iter()
                    .map(|a| self.rewrite_inner(a, steps))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(SiTerm::Compound(f.clone(), args.into()))
            }
            SiTerm::MapApp(m, args) => {
                let args = args
                    .iter()
                    .map(|a| self.rewrite_inner(a, steps))
                    .collect::<Result<Vec<_>, _>>()?;
                *steps += 1;
                if *steps > self.budget {
                    return Err(TermError::RewriteBudgetExceeded { term: String::new(), budget: self.budget });
                }
                let &mi = self.map_index.get(m).ok_or_else(|| TermError::UnknownMap(m.clone()))?;
                match self.eqn_index[mi].get(args.as_slice()) {
                    Some(&ei) => self.rewrite_inner(&self.maps[mi].equations[ei].rhs, steps),
                    None => Err(TermError::UndefinedMapApplication {
                        map: m.clone(),
                        args: args.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
                    }),
                }
            }
        }
    }
}
