//! Structural checks: undefined symbols, left recursion, unreachable rules.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use indexmap::IndexMap;

use crate::expr::{Expr, ExprKind};
use crate::grammar::{Grammar, GrammarForm, RuleKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    /// A nonterminal reference with no rule.
    UndefinedSymbol {
        name: String,
    },
    /// `<x>` used where `x` is a nonterminal rule, or the reverse.
    KindMismatch {
        name: String,
    },
    UndefinedStart {
        name: String,
    },
    /// `rule` can reach itself without consuming input; `cycle` starts and
    /// ends with `rule`.
    LeftRecursion {
        rule: String,
        cycle: Vec<String>,
    },
    Unreachable {
        rule: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    /// Rule in which the problem was found, when there is one.
    pub rule: Option<String>,
}

impl Diagnostic {
    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{level}: ")?;
        match &self.kind {
            DiagnosticKind::UndefinedSymbol { name } => write!(f, "undefined symbol `{name}`")?,
            DiagnosticKind::KindMismatch { name } => {
                write!(f, "`{name}` is used both as a nonterminal and as a lake")?
            }
            DiagnosticKind::UndefinedStart { name } => {
                write!(f, "start symbol `{name}` has no rule")?
            }
            DiagnosticKind::LeftRecursion { rule, cycle } => {
                write!(f, "left recursion on `{rule}` ({})", cycle.join(" -> "))?
            }
            DiagnosticKind::Unreachable { rule } => {
                write!(f, "rule `{rule}` is unreachable from the start symbol")?
            }
        }
        if let Some(rule) = &self.rule {
            write!(f, " in rule `{rule}`")?;
        }
        Ok(())
    }
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}

/// Checks a grammar of any form. Lakes without rules are legal: they stand
/// for the water expression until water insertion gives them a rule.
pub fn validate(g: &Grammar) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let default_water = Expr::not(Expr::any());
    let bodies = effective_bodies(g, &default_water);

    if g.rule(g.start()).is_none() {
        out.push(Diagnostic {
            severity: Severity::Error,
            kind: DiagnosticKind::UndefinedStart {
                name: g.start().to_string(),
            },
            rule: None,
        });
    }

    for rule in g.rules() {
        let mut reported = HashSet::new();
        for (name, is_lake) in rule.body.references() {
            if !reported.insert((name, is_lake)) {
                continue;
            }
            let target = g.rule(name);
            let kind = match (target, is_lake) {
                (None, false) => DiagnosticKind::UndefinedSymbol {
                    name: name.to_string(),
                },
                (None, true) => continue,
                (Some(t), true) if !t.is_lake() => DiagnosticKind::KindMismatch {
                    name: name.to_string(),
                },
                // lake-origin rules of a normal grammar are ordinary rules
                (Some(t), false) if t.is_lake() && g.form() != GrammarForm::Normal => {
                    DiagnosticKind::KindMismatch {
                        name: name.to_string(),
                    }
                }
                _ => continue,
            };
            out.push(Diagnostic {
                severity: Severity::Error,
                kind,
                rule: Some(rule.name.clone()),
            });
        }
    }

    out.extend(left_recursion(&bodies));

    let reachable = reachable_from(&bodies, g.start());
    for rule in g.rules() {
        if !reachable.contains(rule.name.as_str()) {
            out.push(Diagnostic {
                severity: Severity::Warning,
                kind: DiagnosticKind::Unreachable {
                    rule: rule.name.clone(),
                },
                rule: None,
            });
        }
    }
    out
}

/// Left-recursion errors only.
pub fn check_left_recursion(g: &Grammar) -> Vec<Diagnostic> {
    let default_water = Expr::not(Expr::any());
    left_recursion(&effective_bodies(g, &default_water))
}

/// What each symbol matches once water insertion has run: a lake rule of an
/// extended grammar also tries the water, and an unruled lake is the water.
fn effective_bodies<'g>(
    g: &'g Grammar,
    default_water: &'g Expr,
) -> IndexMap<&'g str, Vec<&'g Expr>> {
    let water = if g.form() == GrammarForm::Extended {
        g.water().unwrap_or(default_water)
    } else {
        default_water
    };
    let mut bodies: IndexMap<&str, Vec<&Expr>> = IndexMap::new();
    for rule in g.rules() {
        let mut alts = vec![&rule.body];
        if g.form() == GrammarForm::Extended && rule.kind == RuleKind::Lake {
            alts.push(water);
        }
        bodies.insert(rule.name.as_str(), alts);
    }
    for (name, is_lake) in g.references() {
        if is_lake && !bodies.contains_key(name) {
            bodies.insert(name, vec![water]);
        }
    }
    bodies
}

/// Rules that can succeed without consuming input.
pub fn nullable_rules(g: &Grammar) -> HashSet<String> {
    let default_water = Expr::not(Expr::any());
    let bodies = effective_bodies(g, &default_water);
    nullable_set(&bodies)
        .into_iter()
        .map(str::to_string)
        .collect()
}

fn nullable_set<'g>(bodies: &IndexMap<&'g str, Vec<&'g Expr>>) -> HashSet<&'g str> {
    let mut nullable = HashSet::new();
    loop {
        let mut changed = false;
        for (&name, alts) in bodies {
            if !nullable.contains(name) && alts.iter().any(|e| is_nullable(e, &nullable)) {
                nullable.insert(name);
                changed = true;
            }
        }
        if !changed {
            return nullable;
        }
    }
}

fn is_nullable(e: &Expr, nullable: &HashSet<&str>) -> bool {
    use ExprKind::*;
    match &e.kind {
        Terminal(_) => false,
        Nonterminal(n) | Lake(n) => nullable.contains(n.as_str()),
        Sequence(a, b) => is_nullable(a, nullable) && is_nullable(b, nullable),
        Choice(a, b) => is_nullable(a, nullable) || is_nullable(b, nullable),
        OneOrMore(x) => is_nullable(x, nullable),
        ZeroOrMore(_) | Optional(_) | Not(_) | And(_) => true,
    }
}

/// Symbols `e` may invoke at its own start position.
fn left_calls<'e>(e: &'e Expr, nullable: &HashSet<&str>, out: &mut Vec<&'e str>) {
    use ExprKind::*;
    match &e.kind {
        Terminal(_) => {}
        Nonterminal(n) | Lake(n) => out.push(n),
        Sequence(a, b) => {
            left_calls(a, nullable, out);
            if is_nullable(a, nullable) {
                left_calls(b, nullable, out);
            }
        }
        Choice(a, b) => {
            left_calls(a, nullable, out);
            left_calls(b, nullable, out);
        }
        ZeroOrMore(x) | OneOrMore(x) | Optional(x) | Not(x) | And(x) => {
            left_calls(x, nullable, out)
        }
    }
}

fn left_recursion(bodies: &IndexMap<&str, Vec<&Expr>>) -> Vec<Diagnostic> {
    let nullable = nullable_set(bodies);
    let graph: HashMap<&str, Vec<&str>> = bodies
        .iter()
        .map(|(&name, alts)| {
            let mut calls = Vec::new();
            for e in alts {
                left_calls(e, &nullable, &mut calls);
            }
            calls.dedup();
            (name, calls)
        })
        .collect();

    let mut out = Vec::new();
    for &rule in bodies.keys() {
        if let Some(cycle) = find_cycle(&graph, rule) {
            out.push(Diagnostic {
                severity: Severity::Error,
                kind: DiagnosticKind::LeftRecursion {
                    rule: rule.to_string(),
                    cycle,
                },
                rule: Some(rule.to_string()),
            });
        }
    }
    out
}

/// Shortest path `root -> ... -> root` in the left-call graph, by BFS.
fn find_cycle(graph: &HashMap<&str, Vec<&str>>, root: &str) -> Option<Vec<String>> {
    let mut parent: HashMap<&str, &str> = HashMap::new();
    let mut queue = VecDeque::from([root]);
    while let Some(node) = queue.pop_front() {
        for &next in graph.get(node).into_iter().flatten() {
            if next == root {
                let mut path = vec![root.to_string()];
                let mut cur = node;
                while cur != root {
                    path.push(cur.to_string());
                    cur = parent[cur];
                }
                path.push(root.to_string());
                path.reverse();
                return Some(path);
            }
            if !parent.contains_key(next) && graph.contains_key(next) {
                parent.insert(next, node);
                queue.push_back(next);
            }
        }
    }
    None
}

fn reachable_from<'g>(bodies: &IndexMap<&'g str, Vec<&'g Expr>>, start: &str) -> HashSet<&'g str> {
    let mut seen = HashSet::new();
    let Some((&start, _)) = bodies.get_key_value(start) else {
        return seen;
    };
    let mut stack = vec![start];
    seen.insert(start);
    while let Some(name) = stack.pop() {
        for e in &bodies[name] {
            for (r, _) in e.references() {
                if let Some((&key, _)) = bodies.get_key_value(r) {
                    if seen.insert(key) {
                        stack.push(key);
                    }
                }
            }
        }
    }
    seen
}
