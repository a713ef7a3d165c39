//! Random grammars and inputs for property tests.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng;

use lakepeg::{CharRange, Expr, Grammar, RuleDef, TerminalForm};

pub struct GrammarShape {
    pub max_rules: usize,
    pub max_depth: usize,
    pub max_lakes: usize,
    /// Chance of a user-written `water` rule.
    pub water: f64,
}

impl Default for GrammarShape {
    fn default() -> Self {
        GrammarShape {
            max_rules: 10,
            max_depth: 4,
            max_lakes: 3,
            water: 0.25,
        }
    }
}

fn terminal(rng: &mut impl Rng) -> Expr {
    match rng.random_range(0..6) {
        0 => Expr::literal("a"),
        1 => Expr::literal("b"),
        2 => Expr::literal("ab"),
        3 => Expr::class(vec![CharRange::new('a', 'b')], false),
        4 => Expr::class(vec![CharRange::single('c')], true),
        _ => Expr::any(),
    }
}

fn expr(rng: &mut impl Rng, depth: usize, rules: usize, lakes: usize) -> Expr {
    if depth == 0 || rng.random_bool(0.3) {
        return match rng.random_range(0..5) {
            0 | 1 => terminal(rng),
            2 | 3 => Expr::nonterminal(format!("r{}", rng.random_range(0..rules))),
            _ => Expr::lake(format!("l{}", rng.random_range(0..lakes))),
        };
    }
    let d = depth - 1;
    match rng.random_range(0..7) {
        0 => Expr::seq(expr(rng, d, rules, lakes), expr(rng, d, rules, lakes)),
        1 => Expr::choice(expr(rng, d, rules, lakes), expr(rng, d, rules, lakes)),
        2 => Expr::star(expr(rng, d, rules, lakes)),
        3 => Expr::plus(expr(rng, d, rules, lakes)),
        4 => Expr::opt(expr(rng, d, rules, lakes)),
        5 => Expr::not(expr(rng, d, rules, lakes)),
        _ => Expr::and(expr(rng, d, rules, lakes)),
    }
}

/// An extended grammar with rules `r0..`, at least one lake `<l0>` (used in
/// `r0`), some lakes with rules of their own, and maybe a `water` rule.
/// Every nonterminal reference has a rule. Left recursion is possible.
pub fn random_grammar(rng: &mut impl Rng, shape: &GrammarShape) -> Grammar {
    let rules = rng.random_range(1..=shape.max_rules);
    let lakes = rng.random_range(1..=shape.max_lakes);
    let mut defs = Vec::new();
    for i in 0..rules {
        let mut body = expr(rng, shape.max_depth, rules, lakes);
        if i == 0 {
            body = Expr::seq(body, Expr::star(Expr::lake("l0")));
        }
        defs.push(RuleDef::new(format!("r{i}"), false, body));
    }
    for j in 0..lakes {
        if rng.random_bool(0.5) {
            defs.push(RuleDef::new(
                format!("l{j}"),
                true,
                expr(rng, 2, rules, lakes),
            ));
        }
    }
    if rng.random_bool(shape.water) {
        defs.push(RuleDef::new("water", false, expr(rng, 2, rules, lakes)));
    }
    Grammar::build(defs, Some("r0")).unwrap()
}

/// Characters the grammar's terminals mention, plus one they do not.
pub fn alphabet(g: &Grammar) -> Vec<char> {
    let mut chars = BTreeSet::new();
    for t in g.terminals() {
        match t {
            TerminalForm::Literal(s) => chars.extend(s.chars()),
            TerminalForm::Class { ranges, .. } => {
                for r in ranges {
                    chars.insert(r.lo);
                    chars.insert(r.hi);
                }
            }
            TerminalForm::Any => {}
        }
    }
    chars.insert('~');
    chars.into_iter().collect()
}

/// Random text of at most `max_len` characters, built from `tokens`.
pub fn random_input(rng: &mut impl Rng, tokens: &[&str], max_len: usize) -> Vec<char> {
    let target = rng.random_range(0..=max_len);
    let mut out: Vec<char> = Vec::new();
    while out.len() < target {
        out.extend(tokens.choose(rng).unwrap().chars());
    }
    out.truncate(target);
    out
}

/// Random text over single characters.
pub fn random_chars(rng: &mut impl Rng, alphabet: &[char], max_len: usize) -> Vec<char> {
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect()
}
