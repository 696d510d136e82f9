use std::fmt::Write as _;

use crate::ast::{Agent, Decl, Program};

/// Canonical source text of a program. Declarations come out in their
/// original order, each map followed by its equations; choice branches of a
/// procedure body and parallel components of the main agent go on separate
/// lines. `parse_program(print_program(p))` gives back `p`.
pub fn print_program(prog: &Program) -> String {
    let mut out = String::new();
    let mut k = 0;
    while k < prog.order.len() {
        match prog.order[k] {
            Decl::Set(i) => {
                let s = &prog.defs.sets()[i];
                let elems: Vec<String> = s.elements.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "eset {} = {{{}}}.", s.name, elems.join(", "));
            }
            Decl::Map(i) => {
                let m = &prog.defs.maps()[i];
                let domain: Vec<&str> = m.domain.iter().map(|d| &**d).collect();
                let _ = writeln!(out, "map {} : {}{}-> {}.", m.name, domain.join(" # "), if domain.is_empty() { "" } else { " " }, m.codomain);
                if !m.equations.is_empty() {
                    out.push_str("eqn");
                    for eq in &m.equations {
                        let args: Vec<String> = eq.args.iter().map(ToString::to_string).collect();
                        let _ = write!(out, " {}({}) = {}.", m.name, args.join(","), eq.rhs);
                    }
                    out.push('\n');
                }
            }
            Decl::GPrim(_) => {
                let mut names = Vec::new();
                while let Some(Decl::GPrim(i)) = prog.order.get(k) {
                    names.push(prog.gprims[*i].to_string());
                    k += 1;
                }
                let _ = writeln!(out, "gprim {}.", names.join(", "));
                continue;
            }
            Decl::Proc(i) => {
                let p = &prog.procs[i];
                let params: Vec<String> = p.params.iter().map(|q| format!("{}: {}", q.name, q.set)).collect();
                let head = if params.is_empty() { format!("proc {}", p.name) } else { format!("proc {}({})", p.name, params.join(", ")) };
                let alts = spine(&p.body, |a| match a {
                    Agent::Choice(x, y) => Some((&**x, &**y)),
                    _ => None,
                });
                if alts.len() == 1 {
                    let _ = writeln!(out, "{head} = {}.", p.body);
                } else {
                    let _ = writeln!(out, "{head} =");
                    for (j, alt) in alts.iter().enumerate() {
                        let text = match alt {
                            // a conditional's branches stop at `+`
                            Agent::Cond(_) => alt.to_string(),
                            _ => child(alt, |a| matches!(a, Agent::Choice(..))),
                        };
                        let _ = writeln!(out, "    {}{text}{}", if j == 0 { "  " } else { "+ " }, if j + 1 == alts.len() { "." } else { "" });
                    }
                }
            }
            Decl::Formula(i) => {
                let f = &prog.formulas[i];
                let _ = writeln!(out, "formula {} = {}.", f.name, f.formula);
            }
            Decl::Main => {
                let comps = spine(&prog.main, |a| match a {
                    Agent::Par(x, y) => Some((&**x, &**y)),
                    _ => None,
                });
                if comps.len() == 1 {
                    let _ = writeln!(out, "run {}.", prog.main);
                } else {
                    out.push_str("run\n");
                    for (j, c) in comps.iter().enumerate() {
                        let text = child(c, |a| matches!(a, Agent::Par(..) | Agent::Choice(..) | Agent::Cond(_)));
                        let _ = writeln!(out, "    {}{text}{}", if j == 0 { "   " } else { "|| " }, if j + 1 == comps.len() { "." } else { "" });
                    }
                }
            }
        }
        k += 1;
    }
    out
}

/// Operands of a right-nested chain of one binary operator.
fn spine<'a>(a: &'a Agent, split: impl Fn(&'a Agent) -> Option<(&'a Agent, &'a Agent)>) -> Vec<&'a Agent> {
    let mut out = Vec::new();
    let mut cur = a;
    while let Some((l, r)) = split(cur) {
        out.push(l);
        cur = r;
    }
    out.push(cur);
    out
}

fn child(a: &Agent, needs_parens: impl Fn(&Agent) -> bool) -> String {
    if needs_parens(a) {
        format!("({a})")
    } else {
        a.to_string()
    }
}
