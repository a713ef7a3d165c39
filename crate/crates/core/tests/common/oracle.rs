//! Reference interpreter: plain recursive descent straight over the
//! expression trees, no memo table, no compiled form. Exponential in the
//! worst case, which is fine for short inputs.

use std::sync::Arc;

use lakepeg::{Expr, ExprKind, Grammar, ParseTree};

enum Piece {
    Node(ParseTree),
    Char(usize),
}

struct Naive<'a> {
    g: &'a Grammar,
    input: &'a [char],
}

impl Naive<'_> {
    fn eval(&self, e: &Expr, pos: usize, out: &mut Vec<Piece>) -> Option<usize> {
        match &e.kind {
            ExprKind::Terminal(t) => {
                let len = t.match_at(self.input, pos)?;
                out.extend((pos..pos + len).map(Piece::Char));
                Some(pos + len)
            }
            ExprKind::Nonterminal(n) | ExprKind::Lake(n) => {
                let node = self.call(n, pos)?;
                let end = node.end();
                out.push(Piece::Node(node));
                Some(end)
            }
            ExprKind::Sequence(a, b) => {
                let mark = out.len();
                let mid = self.eval(a, pos, out)?;
                match self.eval(b, mid, out) {
                    Some(end) => Some(end),
                    None => {
                        out.truncate(mark);
                        None
                    }
                }
            }
            ExprKind::Choice(a, b) => {
                let mark = out.len();
                if let Some(end) = self.eval(a, pos, out) {
                    return Some(end);
                }
                out.truncate(mark);
                self.eval(b, pos, out)
            }
            ExprKind::ZeroOrMore(a) => Some(self.many(a, pos, out)),
            ExprKind::OneOrMore(a) => {
                let end = self.eval(a, pos, out)?;
                if end == pos {
                    Some(end)
                } else {
                    Some(self.many(a, end, out))
                }
            }
            ExprKind::Optional(a) => {
                let mark = out.len();
                match self.eval(a, pos, out) {
                    Some(end) => Some(end),
                    None => {
                        out.truncate(mark);
                        Some(pos)
                    }
                }
            }
            ExprKind::Not(a) => {
                let mut scratch = Vec::new();
                match self.eval(a, pos, &mut scratch) {
                    Some(_) => None,
                    None => Some(pos),
                }
            }
            ExprKind::And(a) => {
                let mut scratch = Vec::new();
                self.eval(a, pos, &mut scratch).map(|_| pos)
            }
        }
    }

    fn many(&self, a: &Expr, mut pos: usize, out: &mut Vec<Piece>) -> usize {
        loop {
            let mut piece = Vec::new();
            match self.eval(a, pos, &mut piece) {
                Some(end) if end > pos => {
                    out.extend(piece);
                    pos = end;
                }
                _ => return pos,
            }
        }
    }

    fn call(&self, name: &str, pos: usize) -> Option<ParseTree> {
        let rule = self.g.rule(name).expect("undefined symbol");
        let mut pieces = Vec::new();
        let end = self.eval(&rule.body, pos, &mut pieces)?;
        let children = if end == pos {
            Vec::new()
        } else {
            group(pieces)
        };
        Some(ParseTree::Interior {
            symbol: Arc::from(name),
            lake: rule.is_lake(),
            start: pos,
            end,
            children: Arc::from(children),
        })
    }
}

/// Runs of consecutive characters become one leaf each.
fn group(pieces: Vec<Piece>) -> Vec<ParseTree> {
    let mut out = Vec::new();
    let mut run: Option<(usize, usize)> = None;
    for p in pieces {
        match p {
            Piece::Char(i) => {
                run = match run {
                    Some((s, e)) if e == i => Some((s, i + 1)),
                    Some((s, e)) => {
                        out.push(ParseTree::Leaf { start: s, end: e });
                        Some((i, i + 1))
                    }
                    None => Some((i, i + 1)),
                }
            }
            Piece::Node(n) => {
                if let Some((s, e)) = run.take() {
                    out.push(ParseTree::Leaf { start: s, end: e });
                }
                out.push(n);
            }
        }
    }
    if let Some((s, e)) = run {
        out.push(ParseTree::Leaf { start: s, end: e });
    }
    out
}

/// Parses with `start`; `None` on failure or, unless `prefix`, leftover input.
pub fn naive_parse(g: &Grammar, start: &str, input: &[char], prefix: bool) -> Option<ParseTree> {
    let tree = Naive { g, input }.call(start, 0)?;
    (prefix || tree.end() == input.len()).then_some(tree)
}
