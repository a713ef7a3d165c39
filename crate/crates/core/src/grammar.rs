//! Extended, intermediate, and normal grammars.
//!
//! One [`Grammar`] type covers all three stages of the lake pipeline; the
//! [`GrammarForm`] tag says which stage a value is in. Rules keep their
//! source order, and occurrence ids are assigned post-order across the rules
//! in that order, so the same rule list always yields the same ids.

use std::collections::{BTreeSet, HashSet};

use indexmap::IndexMap;

use crate::error::{Error, Result, SourceSpan};
use crate::expr::{Expr, ExprKind, TerminalForm};

/// Name of the special rule that defines the global water expression.
pub const WATER: &str = "water";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GrammarForm {
    /// PEG with lake symbols and an optional `water` rule.
    Extended,
    /// After water insertion: every lake has a rule ending in the water.
    Intermediate,
    /// Plain PEG. Lake rules survive as ordinary rules flagged by origin.
    Normal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Nonterminal,
    Lake,
    /// The `water` rule of an extended grammar.
    Water,
}

/// How a lake rule of an intermediate grammar was formed from the water.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WaterTail {
    /// Not a water-extended lake rule.
    None,
    /// `<X> <- e / e_w`: the user wrote a rule for the lake.
    Appended,
    /// `<X> <- e_w`: the lake had no rule.
    Only,
}

#[derive(Clone, Debug)]
pub struct Rule {
    pub name: String,
    pub kind: RuleKind,
    pub body: Expr,
    pub water_tail: WaterTail,
    pub span: Option<SourceSpan>,
}

impl Rule {
    pub fn new(name: impl Into<String>, kind: RuleKind, body: Expr) -> Self {
        Rule {
            name: name.into(),
            kind,
            body,
            water_tail: WaterTail::None,
            span: None,
        }
    }

    pub fn is_lake(&self) -> bool {
        self.kind == RuleKind::Lake
    }
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.kind == other.kind && self.body == other.body
    }
}

/// One entry of a rule list handed to [`Grammar::build`].
#[derive(Clone, Debug)]
pub struct RuleDef {
    pub name: String,
    pub is_lake: bool,
    pub body: Expr,
    pub span: Option<SourceSpan>,
}

impl RuleDef {
    pub fn new(name: impl Into<String>, is_lake: bool, body: Expr) -> Self {
        RuleDef {
            name: name.into(),
            is_lake,
            body,
            span: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Grammar {
    rules: IndexMap<String, Rule>,
    start: String,
    form: GrammarForm,
    explicit_water: bool,
}

/// Structural equality: same form, start, and rules (ids ignored).
impl PartialEq for Grammar {
    fn eq(&self, other: &Self) -> bool {
        self.form == other.form
            && self.start == other.start
            && self.rules.len() == other.rules.len()
            && self
                .rules
                .values()
                .zip(other.rules.values())
                .all(|(a, b)| a == b)
    }
}

impl Grammar {
    /// Builds an extended grammar. A non-lake rule named `water` becomes the
    /// global water expression. `start` defaults to the first non-water rule.
    pub fn build(defs: Vec<RuleDef>, start: Option<&str>) -> Result<Grammar> {
        let rules = defs
            .into_iter()
            .map(|d| {
                let kind = match (d.is_lake, d.name == WATER) {
                    (true, _) => RuleKind::Lake,
                    (false, true) => RuleKind::Water,
                    (false, false) => RuleKind::Nonterminal,
                };
                Rule {
                    span: d.span,
                    ..Rule::new(d.name, kind, d.body)
                }
            })
            .collect();
        Grammar::from_rules(GrammarForm::Extended, rules, start)
    }

    /// Builds a grammar of any form from complete rules.
    pub fn from_rules(form: GrammarForm, rules: Vec<Rule>, start: Option<&str>) -> Result<Grammar> {
        if rules.is_empty() {
            return Err(Error::EmptyGrammar);
        }
        let mut map = IndexMap::with_capacity(rules.len());
        for mut rule in rules {
            // only extended grammars treat `water` specially
            if form != GrammarForm::Extended && rule.kind == RuleKind::Water {
                rule.kind = RuleKind::Nonterminal;
            }
            insert_rule(&mut map, rule)?;
        }
        let start = match start {
            Some(s) if !map.contains_key(s) => return Err(Error::UnknownStart(s.to_string())),
            Some(s) => s.to_string(),
            None => map
                .values()
                .find(|r| r.kind != RuleKind::Water)
                .unwrap_or_else(|| &map[0])
                .name
                .clone(),
        };
        let mut g = Grammar {
            rules: map,
            start,
            form,
            explicit_water: false,
        };
        g.renumber();
        Ok(g)
    }

    pub(crate) fn set_explicit_water(&mut self, explicit: bool) {
        self.explicit_water = explicit;
    }

    /// Whether the water came from a user-written `water` rule (as opposed to
    /// the default `!.`). Meaningful for intermediate grammars.
    pub fn has_explicit_water(&self) -> bool {
        self.explicit_water
    }

    /// Reassigns occurrence ids: post-order within each rule, rules in order.
    pub fn renumber(&mut self) {
        let mut next = 1;
        for rule in self.rules.values_mut() {
            rule.body.number_post_order(&mut next);
        }
    }

    pub fn form(&self) -> GrammarForm {
        self.form
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    /// Same grammar with a different start symbol.
    pub fn with_start(mut self, start: &str) -> Result<Grammar> {
        if !self.rules.contains_key(start) {
            return Err(Error::UnknownStart(start.to_string()));
        }
        self.start = start.to_string();
        Ok(self)
    }

    pub fn rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.values()
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.get(name)
    }

    pub fn rule_index(&self, name: &str) -> Option<usize> {
        self.rules.get_index_of(name)
    }

    pub fn rule_at(&self, index: usize) -> &Rule {
        &self.rules[index]
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// The global water expression of an extended grammar.
    pub fn water(&self) -> Option<&Expr> {
        self.rules
            .values()
            .find(|r| r.kind == RuleKind::Water)
            .map(|r| &r.body)
    }

    /// Names with a rule of kind [`RuleKind::Nonterminal`].
    pub fn nonterminals(&self) -> Vec<&str> {
        self.rules
            .values()
            .filter(|r| r.kind == RuleKind::Nonterminal)
            .map(|r| r.name.as_str())
            .collect()
    }

    /// Lake symbols: ruled lakes and referenced-but-unruled lakes, in order
    /// of first appearance (rules first, then references in pre-order).
    pub fn lakes(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for rule in self.rules.values().filter(|r| r.is_lake()) {
            if seen.insert(rule.name.as_str()) {
                out.push(rule.name.as_str());
            }
        }
        for (name, is_lake) in self.references() {
            if is_lake && seen.insert(name) {
                out.push(name);
            }
        }
        out
    }

    /// Every symbol reference in every rule body, pre-order, rules in order.
    pub fn references(&self) -> Vec<(&str, bool)> {
        self.rules
            .values()
            .flat_map(|r| r.body.references())
            .collect()
    }

    /// Distinct terminal forms occurring in the grammar.
    pub fn terminals(&self) -> BTreeSet<&TerminalForm> {
        let mut out = BTreeSet::new();
        for rule in self.rules.values() {
            rule.body.visit_pre_order(&mut |e| {
                if let ExprKind::Terminal(t) = &e.kind {
                    out.insert(t);
                }
            });
        }
        out
    }

    /// Total number of expression occurrences.
    pub fn expression_count(&self) -> usize {
        self.rules.values().map(|r| r.body.node_count()).sum()
    }

    /// Every expression occurrence with the index of its owning rule, in id
    /// order.
    pub fn occurrences(&self) -> Vec<(usize, &Expr)> {
        let mut out = Vec::with_capacity(self.expression_count());
        for (i, rule) in self.rules.values().enumerate() {
            rule.body.visit_post_order(&mut |e| out.push((i, e)));
        }
        out
    }
}

fn insert_rule(map: &mut IndexMap<String, Rule>, rule: Rule) -> Result<()> {
    if map.contains_key(&rule.name) {
        return Err(Error::DuplicateRule {
            name: rule.name,
            span: rule.span,
        });
    }
    map.insert(rule.name.clone(), rule);
    Ok(())
}
