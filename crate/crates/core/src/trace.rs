//! Witness traces: an initial store followed by labelled steps, each
//! carrying the store delta it caused.

use std::fmt::Write as _;

use thiserror::Error;

use crate::ast::{Prim, PrimKind};
use crate::parser::{parse_label, parse_store, parse_term};
use crate::semantics::{Rule, TransitionLabel};
use crate::store::Store;
use crate::term::SiTerm;

const HEADER: &str = "gbach-trace 1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub label: TransitionLabel,
    /// Occurrences added by the step (one entry per occurrence).
    pub added: Vec<SiTerm>,
    pub removed: Vec<SiTerm>,
}

impl TraceStep {
    pub fn between(label: TransitionLabel, before: &Store, after: &Store) -> Self {
        let (added, removed) = before.diff(after);
        TraceStep { label, added, removed }
    }

    /// Applies the delta; `None` if a removed occurrence is missing.
    pub fn apply(&self, store: &Store) -> Option<Store> {
        let mut s = store.clone();
        for t in &self.removed {
            if !s.take(t) {
                return None;
            }
        }
        for t in &self.added {
            s.insert(t.clone());
        }
        Some(s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub initial: Store,
    pub steps: Vec<TraceStep>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceFormatError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

impl Trace {
    pub fn new(initial: Store) -> Self {
        Trace { initial, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The store after every step, starting with the initial store
    /// (`len() + 1` entries). Stops early if a delta does not apply.
    pub fn stores(&self) -> Vec<Store> {
        let mut out = vec![self.initial.clone()];
        for step in &self.steps {
            match step.apply(out.last().unwrap()) {
                Some(s) => out.push(s),
                None => break,
            }
        }
        out
    }

    pub fn final_store(&self) -> Store {
        self.stores().pop().unwrap_or_default()
    }

    /// Graphical events in order, each with the index of its step.
    pub fn events(&self) -> Vec<(usize, &Prim)> {
        self.steps.iter().enumerate().flat_map(|(i, s)| s.label.events().map(move |p| (i, p))).collect()
    }

    /// Splits every guarded-list step into one step per primitive, with the
    /// intermediate stores made explicit.
    pub fn expand_guarded(&self) -> Trace {
        let mut out = Trace::new(self.initial.clone());
        let mut store = self.initial.clone();
        for step in &self.steps {
            if step.label.rule != Rule::GL {
                store = step.apply(&store).unwrap_or(store);
                out.steps.push(step.clone());
                continue;
            }
            for p in &step.label.prims {
                let next = match (&p.kind, p.args.first()) {
                    (PrimKind::Tell, Some(t)) => store.add(t.clone()),
                    (PrimKind::Get, Some(t)) => store.remove(t).unwrap_or_else(|| store.clone()),
                    _ => store.clone(),
                };
                let label = TransitionLabel { rule: rule_of(&p.kind), prims: vec![p.clone()], derivation: Vec::new() };
                out.steps.push(TraceStep::between(label, &store, &next));
                store = next;
            }
        }
        out
    }

    /// Line-oriented text form:
    ///
    /// ```text
    /// gbach-trace 1
    /// init {free(2,3):1}
    /// step GL get(free(2,3)) ; move(red,3,3) ; tell(free(2,1))
    /// + free(2,1)
    /// - free(2,3)
    /// end
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{HEADER}");
        let _ = writeln!(out, "init {}", self.initial);
        for step in &self.steps {
            let _ = writeln!(out, "step {}", step.label);
            for t in &step.added {
                let _ = writeln!(out, "+ {t}");
            }
            for t in &step.removed {
                let _ = writeln!(out, "- {t}");
            }
        }
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Trace, TraceFormatError> {
        let bad = |line: usize, message: String| TraceFormatError::Malformed { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, l)) if l == HEADER => {}
            Some((n, l)) => return Err(bad(n, format!("expected `{HEADER}`, found `{l}`"))),
            None => return Err(bad(1, "empty trace".into())),
        }
        let initial = match lines.next() {
            Some((n, l)) => {
                let rest = l.strip_prefix("init ").ok_or_else(|| bad(n, "expected `init {store}`".into()))?;
                parse_store(rest).map_err(|d| bad(n, d.message))?
            }
            None => return Err(bad(2, "missing `init` line".into())),
        };
        let mut trace = Trace::new(initial);
        for (n, l) in lines {
            if l == "end" {
                return Ok(trace);
            }
            if let Some(rest) = l.strip_prefix("step ") {
                let label = parse_label(rest).map_err(|d| bad(n, d.message))?;
                trace.steps.push(TraceStep { label, added: Vec::new(), removed: Vec::new() });
                continue;
            }
            let (sign, rest) = l.split_at(1);
            let step = trace.steps.last_mut().ok_or_else(|| bad(n, "delta before any step".into()))?;
            let t = parse_term(rest.trim()).map_err(|d| bad(n, d.message))?;
            match sign {
                "+" => step.added.push(t),
                "-" => step.removed.push(t),
                _ => return Err(bad(n, format!("unexpected line `{l}`"))),
            }
        }
        Err(bad(text.lines().count(), "missing `end`".into()))
    }
}

fn rule_of(kind: &PrimKind) -> Rule {
    match kind {
        PrimKind::Tell => Rule::T,
        PrimKind::Ask => Rule::A,
        PrimKind::Nask => Rule::N,
        PrimKind::Get => Rule::G,
        PrimKind::Graphical(_) => Rule::Gr,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(s: &str) -> SiTerm {
        SiTerm::token(s)
    }

    fn gl_step() -> TraceStep {
        let label = TransitionLabel {
            rule: Rule::GL,
            prims: vec![Prim::get(tok("a")), Prim::graphical("move", vec![tok("red"), SiTerm::Int(3)]), Prim::tell(tok("b"))],
            derivation: Vec::new(),
        };
        TraceStep::between(label, &Store::from_terms([tok("a")]), &Store::from_terms([tok("b")]))
    }

    #[test]
    fn text_round_trip() {
        let mut t = Trace::new(Store::from_terms([tok("a")]));
        t.steps.push(gl_step());
        let text = t.to_text();
        assert_eq!(Trace::from_text(&text).unwrap(), t);
        assert_eq!(t.final_store(), Store::from_terms([tok("b")]));
    }

    #[test]
    fn expansion_makes_intermediate_stores() {
        let mut t = Trace::new(Store::from_terms([tok("a")]));
        t.steps.push(gl_step());
        let e = t.expand_guarded();
        assert_eq!(e.len(), 3);
        let stores = e.stores();
        assert_eq!(stores[1], Store::new());
        assert_eq!(stores[2], Store::new());
        assert_eq!(stores[3], Store::from_terms([tok("b")]));
        assert_eq!(e.events().len(), 1);
    }

    #[test]
    fn malformed_text() {
        assert!(Trace::from_text("").is_err());
        assert!(Trace::from_text("gbach-trace 1\ninit {}\n+ a\nend").is_err());
        assert!(Trace::from_text("gbach-trace 1\ninit {}\n").is_err());
    }
}
