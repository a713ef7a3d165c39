//! Lake translation: extended grammar → intermediate grammar → normal PEG.
//!
//! Step 1 ([`insert_water`]) appends the water expression to every lake rule
//! and gives unruled lakes the rule `<X> <- e_w`, where `e_w` is the user's
//! `water` rule or `!.` when there is none. Step 2 ([`lower_lakes`]) appends
//! `!(s1 / ... / sn) .` to every lake rule, the `si` being the lake body's
//! alternative symbols.
//!
//! A user-written water expression is usually a wildcard of its own (for
//! example `STRING / .`), so Step 2 also puts the not-predicate in front of
//! the appended water copy. Otherwise the water would run over the very
//! symbols that are supposed to end the lake. The default water `!.` is kept
//! unguarded.

use std::fmt;

use crate::analysis::{analyze, AnalysisTables, SymbolItem};
use crate::error::{Error, Result};
use crate::expr::{Expr, ExprKind};
use crate::grammar::{Grammar, GrammarForm, Rule, RuleKind, WaterTail};
use crate::validate::{check_left_recursion, has_errors, validate, Diagnostic};

/// `!.`, the water used when a grammar has no `water` rule.
pub fn default_water() -> Expr {
    Expr::not(Expr::any())
}

/// Step 1. Grammars that are not extended are returned unchanged.
pub fn insert_water(g: &Grammar) -> Grammar {
    if g.form() != GrammarForm::Extended {
        return g.clone();
    }
    let explicit = g.water().is_some();
    let water = g.water().cloned().unwrap_or_else(default_water);
    let mut rules: Vec<Rule> = g
        .rules()
        .map(|r| {
            let mut rule = r.clone();
            match r.kind {
                RuleKind::Lake => {
                    rule.body = Expr::choice(r.body.clone(), water.clone());
                    rule.water_tail = WaterTail::Appended;
                }
                RuleKind::Water => rule.kind = RuleKind::Nonterminal,
                RuleKind::Nonterminal => {}
            }
            rule
        })
        .collect();
    for name in g.lakes() {
        if g.rule(name).is_none() {
            rules.push(Rule {
                water_tail: WaterTail::Only,
                ..Rule::new(name, RuleKind::Lake, water.clone())
            });
        }
    }
    let mut out = Grammar::from_rules(GrammarForm::Intermediate, rules, Some(g.start()))
        .expect("water insertion keeps rule names unique and the start symbol");
    out.set_explicit_water(explicit);
    out
}

/// The alternative symbols of one lake, in emission order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LakeAlternatives {
    pub lake: String,
    pub alternatives: Vec<SymbolItem>,
}

/// A lake whose alternative symbol can match the empty string, which makes
/// the lake's not-predicate fail everywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonWarning {
    pub lake: String,
    pub symbol: SymbolItem,
}

impl fmt::Display for EpsilonWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "warning: alternative symbol `{}` of lake `<{}>` can match the empty string; the lake cannot skip any input",
            self.symbol, self.lake
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoweringReport {
    pub lakes: Vec<LakeAlternatives>,
    pub warnings: Vec<EpsilonWarning>,
}

impl LoweringReport {
    pub fn lake_names(&self) -> impl Iterator<Item = &str> {
        self.lakes.iter().map(|l| l.lake.as_str())
    }

    /// Sum of the alternative-list lengths over all lakes.
    pub fn alt_total(&self) -> usize {
        self.lakes.iter().map(|l| l.alternatives.len()).sum()
    }
}

fn symbol_expr(item: &SymbolItem) -> Expr {
    match item {
        SymbolItem::Nonterminal(n) => Expr::nonterminal(n.clone()),
        SymbolItem::Lake(n) => Expr::lake(n.clone()),
        SymbolItem::Terminal(t) => Expr::terminal(t.clone()),
        SymbolItem::Epsilon => unreachable!("ALT sets never contain ε"),
    }
}

/// Step 2, on an intermediate grammar and its analysis tables.
pub fn lower_lakes(g: &Grammar, tables: &AnalysisTables) -> (Grammar, LoweringReport) {
    let mut report = LoweringReport::default();
    let guard_water = g.has_explicit_water();
    let rules: Vec<Rule> = g
        .rules()
        .map(|r| {
            if !r.is_lake() {
                return r.clone();
            }
            let alternatives: Vec<SymbolItem> = tables.alt(r.body.id).iter().cloned().collect();
            let guard = (!alternatives.is_empty())
                .then(|| Expr::not(Expr::choice_all(alternatives.iter().map(symbol_expr))));
            let guarded = |e: Expr| match &guard {
                Some(p) => Expr::seq(p.clone(), e),
                None => e,
            };
            let wildcard = guarded(Expr::any());
            let body = match (&r.body.kind, r.water_tail) {
                (ExprKind::Choice(user, water), WaterTail::Appended) if guard_water => {
                    Expr::choice_all([(**user).clone(), guarded((**water).clone()), wildcard])
                }
                (_, WaterTail::Only) if guard_water => {
                    Expr::choice(guarded(r.body.clone()), wildcard)
                }
                _ => Expr::choice(r.body.clone(), wildcard),
            };
            report.lakes.push(LakeAlternatives {
                lake: r.name.clone(),
                alternatives,
            });
            Rule {
                body,
                water_tail: WaterTail::None,
                ..r.clone()
            }
        })
        .collect();
    let normal = Grammar::from_rules(GrammarForm::Normal, rules, Some(g.start()))
        .expect("lowering keeps rule names unique and the start symbol");
    (normal, report)
}

/// Lakes of `g` with an alternative symbol whose rule body is nullable.
pub fn check_epsilon_alternatives(g: &Grammar, tables: &AnalysisTables) -> Vec<EpsilonWarning> {
    let mut out = Vec::new();
    for rule in g.rules().filter(|r| r.is_lake()) {
        for item in tables.alt(rule.body.id) {
            let nullable = item
                .symbol_name()
                .and_then(|n| g.rule(n))
                .is_some_and(|y| tables.beginning(y.body.id).contains(&SymbolItem::Epsilon));
            if nullable {
                out.push(EpsilonWarning {
                    lake: rule.name.clone(),
                    symbol: item.clone(),
                });
            }
        }
    }
    out
}

/// Everything produced on the way from an extended to a normal grammar.
#[derive(Clone, Debug)]
pub struct Translation {
    pub intermediate: Grammar,
    pub tables: AnalysisTables,
    pub normal: Grammar,
    pub report: LoweringReport,
    /// Non-fatal diagnostics from validation, such as unreachable rules.
    pub diagnostics: Vec<Diagnostic>,
}

/// Validates, inserts water, analyzes, and lowers. A normal grammar comes
/// back unchanged. Fails if the input is invalid or the lowered grammar is
/// left-recursive (a lake that can start with itself).
pub fn translate(g: &Grammar) -> Result<Translation> {
    let diagnostics = validate(g);
    if has_errors(&diagnostics) {
        return Err(Error::Invalid(
            diagnostics.into_iter().filter(|d| d.is_error()).collect(),
        ));
    }
    let intermediate = insert_water(g);
    let tables = analyze(&intermediate);
    if g.form() == GrammarForm::Normal {
        return Ok(Translation {
            normal: g.clone(),
            intermediate,
            tables,
            report: LoweringReport::default(),
            diagnostics,
        });
    }
    let warnings = check_epsilon_alternatives(&intermediate, &tables);
    let (normal, mut report) = lower_lakes(&intermediate, &tables);
    report.warnings = warnings;
    let recursion = check_left_recursion(&normal);
    if !recursion.is_empty() {
        return Err(Error::Invalid(recursion));
    }
    Ok(Translation {
        intermediate,
        tables,
        normal,
        report,
        diagnostics,
    })
}

/// Rule, lake, and alternative-symbol counts, taken after water insertion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrammarStats {
    pub rules: usize,
    pub lakes: usize,
    pub alt_total: usize,
}

impl GrammarStats {
    pub fn of(t: &Translation) -> GrammarStats {
        GrammarStats {
            rules: t.intermediate.rule_count(),
            lakes: t.report.lakes.len(),
            alt_total: t.report.alt_total(),
        }
    }
}

pub fn stats(g: &Grammar) -> Result<GrammarStats> {
    translate(g).map(|t| GrammarStats::of(&t))
}
