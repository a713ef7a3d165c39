//! Independent check that analysis tables are a fixed point: applying every
//! update rule once more to the finished tables must change nothing.

use std::collections::BTreeSet;

use lakepeg::{AnalysisTables, Expr, ExprKind, Grammar, SymbolItem};

type Set = BTreeSet<SymbolItem>;

fn eps() -> SymbolItem {
    SymbolItem::Epsilon
}

fn minus_eps(s: &Set) -> Set {
    s.iter().filter(|x| **x != eps()).cloned().collect()
}

fn union(a: &Set, b: &Set) -> Set {
    a.union(b).cloned().collect()
}

pub fn violations(g: &Grammar, t: &AnalysisTables) -> Vec<String> {
    let mut out = Vec::new();
    let b = |e: &Expr| t.beginning(e.id).clone();
    let s = |e: &Expr| t.succeed(e.id).clone();
    let a = |e: &Expr| t.alt(e.id).clone();
    let mut check = |what: &str, e: &Expr, ok: bool| {
        if !ok {
            out.push(format!("{what} constraint broken at {} ({e})", e.id));
        }
    };
    for (_, e) in g.occurrences() {
        match &e.kind {
            ExprKind::Terminal(term) => {
                check(
                    "BEGINNING",
                    e,
                    b(e) == Set::from([SymbolItem::Terminal(term.clone())]),
                );
            }
            ExprKind::Nonterminal(n) | ExprKind::Lake(n) => {
                let item = if matches!(e.kind, ExprKind::Lake(_)) {
                    SymbolItem::Lake(n.clone())
                } else {
                    SymbolItem::Nonterminal(n.clone())
                };
                match g.rule(n) {
                    Some(r) => {
                        let body = &r.body;
                        let mut want = Set::from([item]);
                        if b(body).contains(&eps()) {
                            want.insert(eps());
                        }
                        check("BEGINNING", e, b(e) == want);
                        check("SUCCEED", e, s(e).is_subset(&s(body)));
                        check("ALT", e, a(e).is_subset(&a(body)));
                    }
                    None => check("BEGINNING", e, b(e) == Set::from([item])),
                }
            }
            ExprKind::ZeroOrMore(c) | ExprKind::Optional(c) => {
                let mut want = b(c);
                want.insert(eps());
                check("BEGINNING", e, b(e) == want);
                if matches!(e.kind, ExprKind::Optional(_)) {
                    check("SUCCEED", e, s(c) == s(e));
                } else {
                    check("SUCCEED", e, s(c) == minus_eps(&union(&s(e), &b(e))));
                }
                check("ALT", e, a(c) == union(&a(e), &s(e)));
            }
            ExprKind::OneOrMore(c) => {
                check("BEGINNING", e, b(e) == b(c));
                check("SUCCEED", e, s(c) == minus_eps(&union(&s(e), &b(e))));
                check("ALT", e, a(c) == union(&a(e), &s(e)));
            }
            ExprKind::Not(c) | ExprKind::And(c) => {
                check("BEGINNING", e, b(e) == Set::from([eps()]));
                check("SUCCEED", e, s(c).is_empty());
                if matches!(e.kind, ExprKind::Not(_)) {
                    check("ALT", e, a(c) == s(e));
                } else {
                    check("ALT", e, a(c) == a(e));
                }
            }
            ExprKind::Choice(j, k) => {
                check("BEGINNING", e, b(e) == union(&b(j), &b(k)));
                check("SUCCEED", e, s(j) == s(e) && s(k) == s(e));
                check("ALT", e, a(k) == a(e));
                let want = if b(k).contains(&eps()) {
                    union(&union(&a(e), &minus_eps(&b(k))), &s(k))
                } else {
                    union(&a(e), &b(k))
                };
                check("ALT", e, a(j) == want);
            }
            ExprKind::Sequence(j, k) => {
                let want = if b(j).contains(&eps()) {
                    union(&minus_eps(&b(j)), &b(k))
                } else {
                    b(j)
                };
                check("BEGINNING", e, b(e) == want);
                check("SUCCEED", e, s(k) == s(e));
                let want = if b(k).contains(&eps()) {
                    union(&minus_eps(&b(k)), &s(k))
                } else {
                    b(k)
                };
                check("SUCCEED", e, s(j) == want);
                check("ALT", e, a(j) == a(e));
                let want = if b(j).contains(&eps()) {
                    a(e)
                } else {
                    Set::new()
                };
                check("ALT", e, a(k) == want);
            }
        }
    }
    // a rule body's union-only sets are exactly the join of its references
    for rule in g.rules() {
        let mut s_join = Set::new();
        let mut a_join = Set::new();
        for (_, e) in g.occurrences() {
            if let ExprKind::Nonterminal(n) | ExprKind::Lake(n) = &e.kind {
                if *n == rule.name {
                    s_join.extend(s(e));
                    a_join.extend(a(e));
                }
            }
        }
        if s(&rule.body) != s_join {
            out.push(format!(
                "SUCCEED of rule `{}` is not the join of its uses",
                rule.name
            ));
        }
        if a(&rule.body) != a_join {
            out.push(format!(
                "ALT of rule `{}` is not the join of its uses",
                rule.name
            ));
        }
    }
    out
}
