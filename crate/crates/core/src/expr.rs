//! Location-aware parsing expressions.
//!
//! Every node carries an [`ExprId`] naming its occurrence in a grammar. Two
//! lexically identical subexpressions at different places get different ids,
//! which is what the set analysis keys its tables on. Structural equality
//! (`==`) ignores ids.

use std::fmt;

/// Occurrence identifier of an expression node, 1-based within a grammar.
///
/// `ExprId::UNASSIGNED` marks nodes that have not been numbered yet; every
/// grammar constructor renumbers its rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExprId(u32);

impl ExprId {
    pub const UNASSIGNED: ExprId = ExprId(0);

    pub fn new(n: u32) -> Self {
        assert!(n > 0, "occurrence ids are 1-based");
        ExprId(n)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Zero-based position, for dense tables.
    pub fn index(self) -> usize {
        debug_assert!(self.0 > 0, "unassigned expression id");
        self.0 as usize - 1
    }

    pub fn from_index(index: usize) -> Self {
        ExprId(index as u32 + 1)
    }

    pub fn is_assigned(self) -> bool {
        self.0 != 0
    }
}

impl fmt::Display for ExprId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_assigned() {
            write!(f, "e{}", self.0)
        } else {
            f.write_str("e?")
        }
    }
}

/// Inclusive character range inside a character class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharRange {
    pub lo: char,
    pub hi: char,
}

impl CharRange {
    pub fn new(lo: char, hi: char) -> Self {
        CharRange { lo, hi }
    }

    pub fn single(c: char) -> Self {
        CharRange { lo: c, hi: c }
    }

    pub fn contains(&self, c: char) -> bool {
        self.lo <= c && c <= self.hi
    }
}

/// The three terminal forms of a scannerless PEG.
///
/// Terminals compare by form, so `';'` at two places in a grammar is the same
/// terminal symbol even though the occurrences differ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TerminalForm {
    /// Non-empty literal text.
    Literal(String),
    /// `[...]` or `[^...]`; at least one range.
    Class {
        ranges: Vec<CharRange>,
        negated: bool,
    },
    /// `.`
    Any,
}

impl TerminalForm {
    /// Length in characters of the match at `pos`, if any.
    pub fn match_at(&self, input: &[char], pos: usize) -> Option<usize> {
        match self {
            TerminalForm::Literal(text) => {
                let mut len = 0;
                for c in text.chars() {
                    if input.get(pos + len) != Some(&c) {
                        return None;
                    }
                    len += 1;
                }
                Some(len)
            }
            TerminalForm::Class { ranges, negated } => {
                let c = *input.get(pos)?;
                let hit = ranges.iter().any(|r| r.contains(c));
                (hit != *negated).then_some(1)
            }
            TerminalForm::Any => (pos < input.len()).then_some(1),
        }
    }
}

impl fmt::Display for TerminalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::text::write_terminal(f, self)
    }
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    Terminal(TerminalForm),
    Nonterminal(String),
    Lake(String),
    Sequence(Box<Expr>, Box<Expr>),
    Choice(Box<Expr>, Box<Expr>),
    ZeroOrMore(Box<Expr>),
    OneOrMore(Box<Expr>),
    Optional(Box<Expr>),
    Not(Box<Expr>),
    And(Box<Expr>),
}

impl PartialEq for ExprKind {
    fn eq(&self, other: &Self) -> bool {
        use ExprKind::*;
        match (self, other) {
            (Terminal(a), Terminal(b)) => a == b,
            (Nonterminal(a), Nonterminal(b)) | (Lake(a), Lake(b)) => a == b,
            (Sequence(a1, a2), Sequence(b1, b2)) | (Choice(a1, a2), Choice(b1, b2)) => {
                a1 == b1 && a2 == b2
            }
            (ZeroOrMore(a), ZeroOrMore(b))
            | (OneOrMore(a), OneOrMore(b))
            | (Optional(a), Optional(b))
            | (Not(a), Not(b))
            | (And(a), And(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for ExprKind {}

/// A parsing expression node.
#[derive(Clone, Debug)]
pub struct Expr {
    pub id: ExprId,
    pub kind: ExprKind,
}

/// Structural equality; occurrence ids are ignored.
impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Expr {}

impl From<ExprKind> for Expr {
    fn from(kind: ExprKind) -> Self {
        Expr {
            id: ExprId::UNASSIGNED,
            kind,
        }
    }
}

impl Expr {
    pub fn literal(text: impl Into<String>) -> Expr {
        let text = text.into();
        assert!(!text.is_empty(), "literal text must be non-empty");
        ExprKind::Terminal(TerminalForm::Literal(text)).into()
    }

    pub fn class(ranges: Vec<CharRange>, negated: bool) -> Expr {
        assert!(
            !ranges.is_empty(),
            "character class needs at least one range"
        );
        ExprKind::Terminal(TerminalForm::Class { ranges, negated }).into()
    }

    pub fn any() -> Expr {
        ExprKind::Terminal(TerminalForm::Any).into()
    }

    pub fn terminal(form: TerminalForm) -> Expr {
        ExprKind::Terminal(form).into()
    }

    pub fn nonterminal(name: impl Into<String>) -> Expr {
        ExprKind::Nonterminal(name.into()).into()
    }

    pub fn lake(name: impl Into<String>) -> Expr {
        ExprKind::Lake(name.into()).into()
    }

    pub fn seq(left: Expr, right: Expr) -> Expr {
        ExprKind::Sequence(Box::new(left), Box::new(right)).into()
    }

    pub fn choice(left: Expr, right: Expr) -> Expr {
        ExprKind::Choice(Box::new(left), Box::new(right)).into()
    }

    /// Left-associated sequence of one or more items.
    pub fn seq_all(items: impl IntoIterator<Item = Expr>) -> Expr {
        items
            .into_iter()
            .reduce(Expr::seq)
            .expect("sequence needs at least one item")
    }

    /// Left-associated prioritized choice of one or more alternatives.
    pub fn choice_all(items: impl IntoIterator<Item = Expr>) -> Expr {
        items
            .into_iter()
            .reduce(Expr::choice)
            .expect("choice needs at least one alternative")
    }

    pub fn star(inner: Expr) -> Expr {
        ExprKind::ZeroOrMore(Box::new(inner)).into()
    }

    pub fn plus(inner: Expr) -> Expr {
        ExprKind::OneOrMore(Box::new(inner)).into()
    }

    pub fn opt(inner: Expr) -> Expr {
        ExprKind::Optional(Box::new(inner)).into()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Expr) -> Expr {
        ExprKind::Not(Box::new(inner)).into()
    }

    pub fn and(inner: Expr) -> Expr {
        ExprKind::And(Box::new(inner)).into()
    }

    pub fn children(&self) -> Vec<&Expr> {
        use ExprKind::*;
        match &self.kind {
            Terminal(_) | Nonterminal(_) | Lake(_) => vec![],
            Sequence(a, b) | Choice(a, b) => vec![a, b],
            ZeroOrMore(e) | OneOrMore(e) | Optional(e) | Not(e) | And(e) => vec![e],
        }
    }

    fn children_mut(&mut self) -> Vec<&mut Expr> {
        use ExprKind::*;
        match &mut self.kind {
            Terminal(_) | Nonterminal(_) | Lake(_) => vec![],
            Sequence(a, b) | Choice(a, b) => vec![a, b],
            ZeroOrMore(e) | OneOrMore(e) | Optional(e) | Not(e) | And(e) => vec![e],
        }
    }

    /// Number of nodes in this expression tree.
    pub fn node_count(&self) -> usize {
        1 + self
            .children()
            .iter()
            .map(|c| c.node_count())
            .sum::<usize>()
    }

    /// Assigns ids in post-order (operands before the operator), starting at
    /// `*next`.
    pub(crate) fn number_post_order(&mut self, next: &mut u32) {
        for child in self.children_mut() {
            child.number_post_order(next);
        }
        self.id = ExprId::new(*next);
        *next += 1;
    }

    /// Visits every node, operands before operators.
    pub fn visit_post_order<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        for child in self.children() {
            child.visit_post_order(f);
        }
        f(self);
    }

    /// Visits every node, operators before operands.
    pub fn visit_pre_order<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for child in self.children() {
            child.visit_pre_order(f);
        }
    }

    /// Symbol references in pre-order: `(name, is_lake)`.
    pub fn references(&self) -> Vec<(&str, bool)> {
        let mut out = Vec::new();
        self.visit_pre_order(&mut |e| match &e.kind {
            ExprKind::Nonterminal(n) => out.push((n.as_str(), false)),
            ExprKind::Lake(n) => out.push((n.as_str(), true)),
            _ => {}
        });
        out
    }

    /// Short operator name, as used in analysis listings.
    pub fn operator_name(&self) -> &'static str {
        use ExprKind::*;
        match &self.kind {
            Terminal(_) => "terminal",
            Nonterminal(_) => "nonterminal",
            Lake(_) => "lake",
            Sequence(..) => "sequence",
            Choice(..) => "choice",
            ZeroOrMore(_) => "zero-or-more",
            OneOrMore(_) => "one-or-more",
            Optional(_) => "optional",
            Not(_) => "not",
            And(_) => "and",
        }
    }

    /// Binding strength: 5 primary, 4 postfix, 3 prefix, 2 sequence, 1 choice.
    pub fn precedence(&self) -> u8 {
        use ExprKind::*;
        match &self.kind {
            Terminal(_) | Nonterminal(_) | Lake(_) => 5,
            ZeroOrMore(_) | OneOrMore(_) | Optional(_) => 4,
            Not(_) | And(_) => 3,
            Sequence(..) => 2,
            Choice(..) => 1,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::text::write_expr(f, self)
    }
}
