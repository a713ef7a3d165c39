//! BEGINNING, SUCCEED, and ALT sets for every expression occurrence.
//!
//! Each table is a fixed point reached by repeated passes over all
//! occurrences. A pass visits occurrences in id order (or a caller-supplied
//! order) and updates sets in place, so later occurrences in a pass already
//! see earlier updates. The loop stops after the first pass that changes
//! nothing.
//!
//! BEGINNING is computed first, SUCCEED reads the finished BEGINNING, and ALT
//! reads both. The three update rules follow the reference algorithms case
//! for case: a symbol occurrence unions into its rule body's set, every other
//! case assigns its child's set. BEGINNING of a symbol occurrence also
//! contains ε when the symbol's rule body is nullable.

use std::collections::BTreeSet;
use std::fmt;

use crate::expr::{ExprId, ExprKind, TerminalForm};
use crate::grammar::Grammar;

/// Element of an analysis set. Ordered nonterminals, lakes, terminals, ε.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolItem {
    Nonterminal(String),
    Lake(String),
    Terminal(TerminalForm),
    Epsilon,
}

impl SymbolItem {
    pub fn is_epsilon(&self) -> bool {
        matches!(self, SymbolItem::Epsilon)
    }

    /// Name of a nonterminal or lake item.
    pub fn symbol_name(&self) -> Option<&str> {
        match self {
            SymbolItem::Nonterminal(n) | SymbolItem::Lake(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for SymbolItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolItem::Nonterminal(n) => f.write_str(n),
            SymbolItem::Lake(n) => write!(f, "<{n}>"),
            SymbolItem::Terminal(t) => write!(f, "{t}"),
            SymbolItem::Epsilon => f.write_str("ε"),
        }
    }
}

pub type SymbolSet = BTreeSet<SymbolItem>;

/// `{a, b, c}` in set order.
pub fn format_set(set: &SymbolSet) -> String {
    let items: Vec<String> = set.iter().map(ToString::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Repeat {
    Star,
    Plus,
    Optional,
}

/// One occurrence with its operands resolved to table indices.
#[derive(Clone, Debug)]
enum Node {
    Terminal(TerminalForm),
    Symbol {
        item: SymbolItem,
        body: Option<usize>,
    },
    Repeat(Repeat, usize),
    Not(usize),
    And(usize),
    Choice(usize, usize),
    Sequence(usize, usize),
}

fn occurrence_table(g: &Grammar) -> Vec<Node> {
    let body_of = |name: &str| g.rule(name).map(|r| r.body.id.index());
    g.occurrences()
        .into_iter()
        .map(|(_, e)| match &e.kind {
            ExprKind::Terminal(t) => Node::Terminal(t.clone()),
            ExprKind::Nonterminal(n) => Node::Symbol {
                item: SymbolItem::Nonterminal(n.clone()),
                body: body_of(n),
            },
            ExprKind::Lake(n) => Node::Symbol {
                item: SymbolItem::Lake(n.clone()),
                body: body_of(n),
            },
            ExprKind::ZeroOrMore(c) => Node::Repeat(Repeat::Star, c.id.index()),
            ExprKind::OneOrMore(c) => Node::Repeat(Repeat::Plus, c.id.index()),
            ExprKind::Optional(c) => Node::Repeat(Repeat::Optional, c.id.index()),
            ExprKind::Not(c) => Node::Not(c.id.index()),
            ExprKind::And(c) => Node::And(c.id.index()),
            ExprKind::Choice(a, b) => Node::Choice(a.id.index(), b.id.index()),
            ExprKind::Sequence(a, b) => Node::Sequence(a.id.index(), b.id.index()),
        })
        .collect()
}

/// One finished fixed-point table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetTable {
    sets: Vec<SymbolSet>,
    passes: usize,
    history: Option<Vec<Vec<SymbolSet>>>,
}

impl SetTable {
    pub fn get(&self, id: ExprId) -> &SymbolSet {
        &self.sets[id.index()]
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ExprId, &SymbolSet)> {
        self.sets
            .iter()
            .enumerate()
            .map(|(i, s)| (ExprId::from_index(i), s))
    }

    /// Passes executed, including the final pass that changed nothing.
    pub fn passes(&self) -> usize {
        self.passes
    }

    /// Passes that changed at least one set.
    pub fn iterations(&self) -> usize {
        self.passes - 1
    }

    /// Snapshot of every set after each changing pass, if recorded.
    pub fn history(&self) -> Option<&[Vec<SymbolSet>]> {
        self.history.as_deref()
    }

    pub fn sets(&self) -> &[SymbolSet] {
        &self.sets
    }
}

#[derive(Clone, Debug, Default)]
pub struct AnalysisOptions {
    /// Visiting order within a pass; must be a permutation of the grammar's
    /// occurrence ids. Defaults to id order.
    pub order: Option<Vec<ExprId>>,
    pub record_history: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisTables {
    pub beginning: SetTable,
    pub succeed: SetTable,
    pub alt: SetTable,
}

impl AnalysisTables {
    pub fn beginning(&self, id: ExprId) -> &SymbolSet {
        self.beginning.get(id)
    }

    pub fn succeed(&self, id: ExprId) -> &SymbolSet {
        self.succeed.get(id)
    }

    pub fn alt(&self, id: ExprId) -> &SymbolSet {
        self.alt.get(id)
    }

    /// ALT of the body of the rule for `name`.
    pub fn alt_of_rule<'a>(&'a self, g: &Grammar, name: &str) -> Option<&'a SymbolSet> {
        g.rule(name).map(|r| self.alt.get(r.body.id))
    }
}

/// Upper bound on the number of passes: |E| times the vocabulary size.
pub fn pass_bound(g: &Grammar) -> usize {
    let vocabulary = g.nonterminals().len() + g.lakes().len() + g.terminals().len();
    g.expression_count() * vocabulary.max(1)
}

pub fn analyze(g: &Grammar) -> AnalysisTables {
    analyze_with(g, &AnalysisOptions::default())
}

pub fn analyze_with(g: &Grammar, options: &AnalysisOptions) -> AnalysisTables {
    let nodes = occurrence_table(g);
    let order = visiting_order(nodes.len(), options);
    let beginning = beginning_table(&nodes, &order, options.record_history);
    let succeed = succeed_table(&nodes, &order, &beginning.sets, options.record_history);
    let alt = alt_table(
        &nodes,
        &order,
        &beginning.sets,
        &succeed.sets,
        options.record_history,
    );
    AnalysisTables {
        beginning,
        succeed,
        alt,
    }
}

pub fn compute_beginning(g: &Grammar) -> SetTable {
    let nodes = occurrence_table(g);
    let order: Vec<usize> = (0..nodes.len()).collect();
    beginning_table(&nodes, &order, false)
}

pub fn compute_succeed(g: &Grammar, beginning: &SetTable) -> SetTable {
    let nodes = occurrence_table(g);
    let order: Vec<usize> = (0..nodes.len()).collect();
    succeed_table(&nodes, &order, &beginning.sets, false)
}

pub fn compute_alt(g: &Grammar, beginning: &SetTable, succeed: &SetTable) -> SetTable {
    let nodes = occurrence_table(g);
    let order: Vec<usize> = (0..nodes.len()).collect();
    alt_table(&nodes, &order, &beginning.sets, &succeed.sets, false)
}

fn visiting_order(n: usize, options: &AnalysisOptions) -> Vec<usize> {
    match &options.order {
        None => (0..n).collect(),
        Some(ids) => {
            let order: Vec<usize> = ids.iter().map(|id| id.index()).collect();
            let mut sorted = order.clone();
            sorted.sort_unstable();
            assert!(
                sorted.iter().copied().eq(0..n),
                "visiting order must be a permutation of the occurrence ids"
            );
            order
        }
    }
}

/// Runs passes of `step` until one changes nothing.
fn iterate(
    n: usize,
    order: &[usize],
    record: bool,
    mut step: impl FnMut(&mut [SymbolSet], usize),
) -> SetTable {
    let mut sets = vec![SymbolSet::new(); n];
    let mut history = record.then(Vec::new);
    let mut passes = 0;
    loop {
        passes += 1;
        let before = sets.clone();
        for &i in order {
            step(&mut sets, i);
        }
        if sets == before {
            break;
        }
        if let Some(h) = history.as_mut() {
            h.push(sets.clone());
        }
    }
    SetTable {
        sets,
        passes,
        history,
    }
}

fn without_epsilon(set: &SymbolSet) -> impl Iterator<Item = SymbolItem> + '_ {
    set.iter().filter(|s| !s.is_epsilon()).cloned()
}

fn beginning_table(nodes: &[Node], order: &[usize], record: bool) -> SetTable {
    iterate(nodes.len(), order, record, |b, i| {
        let new: SymbolSet = match &nodes[i] {
            Node::Terminal(t) => [SymbolItem::Terminal(t.clone())].into(),
            Node::Symbol { item, body } => {
                let mut s: SymbolSet = [item.clone()].into();
                if body.is_some_and(|j| b[j].contains(&SymbolItem::Epsilon)) {
                    s.insert(SymbolItem::Epsilon);
                }
                s
            }
            Node::Repeat(Repeat::Star | Repeat::Optional, j) => {
                let mut s = b[*j].clone();
                s.insert(SymbolItem::Epsilon);
                s
            }
            Node::Repeat(Repeat::Plus, j) => b[*j].clone(),
            Node::Not(_) | Node::And(_) => [SymbolItem::Epsilon].into(),
            Node::Choice(j, k) => b[*j].union(&b[*k]).cloned().collect(),
            Node::Sequence(j, k) => {
                if b[*j].contains(&SymbolItem::Epsilon) {
                    without_epsilon(&b[*j])
                        .chain(b[*k].iter().cloned())
                        .collect()
                } else {
                    b[*j].clone()
                }
            }
        };
        b[i] = new;
    })
}

fn succeed_table(nodes: &[Node], order: &[usize], b: &[SymbolSet], record: bool) -> SetTable {
    iterate(nodes.len(), order, record, |s, i| match &nodes[i] {
        Node::Terminal(_) => {}
        Node::Symbol { body, .. } => {
            if let Some(j) = *body {
                let add = s[i].clone();
                s[j].extend(add);
            }
        }
        Node::Repeat(Repeat::Optional, j) => s[*j] = s[i].clone(),
        Node::Repeat(Repeat::Star | Repeat::Plus, j) => {
            s[*j] = s[i]
                .iter()
                .chain(b[i].iter())
                .filter(|x| !x.is_epsilon())
                .cloned()
                .collect();
        }
        Node::Not(j) | Node::And(j) => s[*j] = SymbolSet::new(),
        Node::Choice(j, k) => {
            s[*j] = s[i].clone();
            s[*k] = s[i].clone();
        }
        Node::Sequence(j, k) => {
            s[*k] = s[i].clone();
            s[*j] = if b[*k].contains(&SymbolItem::Epsilon) {
                without_epsilon(&b[*k])
                    .chain(s[*k].iter().cloned())
                    .collect()
            } else {
                b[*k].clone()
            };
        }
    })
}

fn alt_table(
    nodes: &[Node],
    order: &[usize],
    b: &[SymbolSet],
    s: &[SymbolSet],
    record: bool,
) -> SetTable {
    iterate(nodes.len(), order, record, |a, i| match &nodes[i] {
        Node::Terminal(_) => {}
        Node::Symbol { body, .. } => {
            if let Some(j) = *body {
                let add = a[i].clone();
                a[j].extend(add);
            }
        }
        Node::Repeat(_, j) => a[*j] = a[i].union(&s[i]).cloned().collect(),
        Node::Not(j) => a[*j] = s[i].clone(),
        Node::And(j) => a[*j] = a[i].clone(),
        Node::Choice(j, k) => {
            a[*k] = a[i].clone();
            let mut left = a[i].clone();
            if b[*k].contains(&SymbolItem::Epsilon) {
                left.extend(without_epsilon(&b[*k]));
                left.extend(s[*k].iter().cloned());
            } else {
                left.extend(b[*k].iter().cloned());
            }
            a[*j] = left;
        }
        Node::Sequence(j, k) => {
            a[*j] = a[i].clone();
            a[*k] = if b[*j].contains(&SymbolItem::Epsilon) {
                a[i].clone()
            } else {
                SymbolSet::new()
            };
        }
    })
}
