//! The shared store: a finite multiset of final si-terms.

use std::collections::BTreeMap;
use std::fmt;

use crate::term::SiTerm;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Store {
    counts: BTreeMap<SiTerm, u32>,
}

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    pub fn from_terms<I: IntoIterator<Item = SiTerm>>(terms: I) -> Self {
        let mut s = Store::new();
        for t in terms {
            s.insert(t);
        }
        s
    }

    /// Adds one occurrence of `t` in place.
    pub fn insert(&mut self, t: SiTerm) {
        debug_assert!(t.is_final(), "store keys must be final: {t}");
        *self.counts.entry(t).or_insert(0) += 1;
    }

    /// Removes one occurrence of `t` in place; false if absent.
    pub fn take(&mut self, t: &SiTerm) -> bool {
        match self.counts.get_mut(t) {
            Some(c) if *c > 1 => {
                *c -= 1;
                true
            }
            Some(_) => {
                self.counts.remove(t);
                true
            }
            None => false,
        }
    }

    pub fn add(&self, t: SiTerm) -> Store {
        let mut s = self.clone();
        s.insert(t);
        s
    }

    /// `None` when `t` is absent: the primitive removing it blocks.
    pub fn remove(&self, t: &SiTerm) -> Option<Store> {
        let mut s = self.clone();
        s.take(t).then_some(s)
    }

    pub fn count(&self, t: &SiTerm) -> u32 {
        self.counts.get(t).copied().unwrap_or(0)
    }

    pub fn contains(&self, t: &SiTerm) -> bool {
        self.counts.contains_key(t)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total number of occurrences.
    pub fn len(&self) -> usize {
        self.counts.values().map(|&c| c as usize).sum()
    }

    /// Distinct terms with their multiplicities, in structural order.
    pub fn iter(&self) -> impl Iterator<Item = (&SiTerm, u32)> {
        self.counts.iter().map(|(t, &c)| (t, c))
    }

    /// Terms added and removed to go from `self` to `other`, one entry per
    /// occurrence.
    pub fn diff(&self, other: &Store) -> (Vec<SiTerm>, Vec<SiTerm>) {
        let mut added = Vec::new();
        let mut removed = Vec::new();
        for (t, c) in other.iter() {
            let before = self.count(t);
            for _ in before..c {
                added.push(t.clone());
            }
        }
        for (t, c) in self.iter() {
            let after = other.count(t);
            for _ in after..c {
                removed.push(t.clone());
            }
        }
        (added, removed)
    }

    /// Byte encoding that is equal for two stores iff they are equal as
    /// multisets: sorted `(term, count)` pairs in a prefix-free format.
    pub fn canonical_encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.encode_into(&mut out);
        out
    }

    pub(crate) fn encode_into(&self, out: &mut Vec<u8>) {
        put_varint(out, self.counts.len() as u64);
        for (t, &c) in &self.counts {
            encode_term(t, out);
            put_varint(out, c as u64);
        }
    }
}

impl FromIterator<SiTerm> for Store {
    fn from_iter<I: IntoIterator<Item = SiTerm>>(iter: I) -> Self {
        Store::from_terms(iter)
    }
}

/// `{free(1,1):1, out:1}`
impl fmt::Display for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (t, c)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}:{c}")?;
        }
        f.write_str("}")
    }
}

pub(crate) fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    put_varint(out, s.len() as u64);
    out.extend_from_slice(s.as_bytes());
}

pub(crate) fn encode_term(t: &SiTerm, out: &mut Vec<u8>) {
    match t {
        SiTerm::Int(i) => {
            out.push(0);
            out.extend_from_slice(&i.to_le_bytes());
        }
        SiTerm::Token(s) => {
            out.push(1);
            put_str(out, s);
        }
        SiTerm::Compound(f, args) | SiTerm::MapApp(f, args) => {
            out.push(if matches!(t, SiTerm::Compound(..)) { 2 } else { 3 });
            put_str(out, f);
            put_varint(out, args.len() as u64);
            for a in args.iter() {
                encode_term(a, out);
            }
        }
        SiTerm::Var(v) => {
            out.push(4);
            put_str(out, v);
        }
    }
}
