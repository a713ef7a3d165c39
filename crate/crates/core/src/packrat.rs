//! Memoizing PEG interpreter.
//!
//! Every `(occurrence, offset)` pair is evaluated at most once. Offsets count
//! characters. Each rule invocation produces an interior node; terminals
//! produce leaves, and adjacent leaves under one node are merged into a
//! single span. Nothing matched inside `!e` or `&e` reaches the tree.
//!
//! `e*` and `e+` stop at the first iteration that consumes nothing, and that
//! iteration is dropped (the first `e+` iteration is always kept). Without
//! this, a lake lowered with the default water would loop at end of input.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::ser::{Serialize, SerializeMap, SerializeSeq, Serializer};

use crate::error::{Error, Result};
use crate::expr::{ExprKind, TerminalForm};
use crate::grammar::Grammar;
use crate::validate::{has_errors, validate, Diagnostic, DiagnosticKind, Severity};

/// A parse tree over character offsets `[start, end)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseTree {
    Interior {
        symbol: Arc<str>,
        /// The symbol was a lake in the source grammar.
        lake: bool,
        start: usize,
        end: usize,
        children: Arc<[ParseTree]>,
    },
    Leaf {
        start: usize,
        end: usize,
    },
}

impl ParseTree {
    pub fn start(&self) -> usize {
        match self {
            ParseTree::Interior { start, .. } | ParseTree::Leaf { start, .. } => *start,
        }
    }

    pub fn end(&self) -> usize {
        match self {
            ParseTree::Interior { end, .. } | ParseTree::Leaf { end, .. } => *end,
        }
    }

    pub fn symbol(&self) -> Option<&str> {
        match self {
            ParseTree::Interior { symbol, .. } => Some(symbol),
            ParseTree::Leaf { .. } => None,
        }
    }

    pub fn is_lake(&self) -> bool {
        matches!(self, ParseTree::Interior { lake: true, .. })
    }

    pub fn children(&self) -> &[ParseTree] {
        match self {
            ParseTree::Interior { children, .. } => children,
            ParseTree::Leaf { .. } => &[],
        }
    }

    /// Nodes in pre-order.
    pub fn walk(&self, f: &mut impl FnMut(&ParseTree)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    /// Interior nodes labeled `symbol`, nested ones included.
    pub fn count_islands(&self, symbol: &str) -> usize {
        let mut n = 0;
        self.walk(&mut |t| {
            if t.symbol() == Some(symbol) {
                n += 1;
            }
        });
        n
    }

    /// Interior nodes labeled `symbol`, in pre-order.
    pub fn find_all(&self, symbol: &str) -> Vec<&ParseTree> {
        fn go<'t>(t: &'t ParseTree, symbol: &str, out: &mut Vec<&'t ParseTree>) {
            if t.symbol() == Some(symbol) {
                out.push(t);
            }
            for c in t.children() {
                go(c, symbol, out);
            }
        }
        let mut out = Vec::new();
        go(self, symbol, &mut out);
        out
    }

    /// Leaf texts concatenated in order.
    pub fn leaf_text(&self, input: &[char]) -> String {
        let mut s = String::new();
        self.walk(&mut |t| {
            if let ParseTree::Leaf { start, end } = t {
                s.extend(&input[*start..*end]);
            }
        });
        s
    }

    pub fn to_json(&self, input: &str) -> String {
        let chars: Vec<char> = input.chars().collect();
        serde_json::to_string(&JsonTree {
            tree: self,
            input: &chars,
        })
        .expect("tree serialization cannot fail")
    }

    pub fn to_json_pretty(&self, input: &str) -> String {
        let chars: Vec<char> = input.chars().collect();
        serde_json::to_string_pretty(&JsonTree {
            tree: self,
            input: &chars,
        })
        .expect("tree serialization cannot fail")
    }
}

/// Serializes a tree together with the input it spans.
pub struct JsonTree<'a> {
    pub tree: &'a ParseTree,
    pub input: &'a [char],
}

impl Serialize for JsonTree<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.tree {
            ParseTree::Leaf { start, end } => {
                let text: String = self.input[*start..*end].iter().collect();
                let mut m = serializer.serialize_map(Some(3))?;
                m.serialize_entry("text", &text)?;
                m.serialize_entry("start", start)?;
                m.serialize_entry("end", end)?;
                m.end()
            }
            ParseTree::Interior {
                symbol,
                lake,
                start,
                end,
                children,
            } => {
                let mut m = serializer.serialize_map(Some(5))?;
                m.serialize_entry("symbol", &**symbol)?;
                m.serialize_entry("lake", lake)?;
                m.serialize_entry("start", start)?;
                m.serialize_entry("end", end)?;
                m.serialize_entry(
                    "children",
                    &JsonChildren {
                        children,
                        input: self.input,
                    },
                )?;
                m.end()
            }
        }
    }
}

struct JsonChildren<'a> {
    children: &'a [ParseTree],
    input: &'a [char],
}

impl Serialize for JsonChildren<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.children.len()))?;
        for c in self.children {
            seq.serialize_element(&JsonTree {
                tree: c,
                input: self.input,
            })?;
        }
        seq.end()
    }
}

/// Where and why a parse failed: the farthest offset any terminal was tried
/// at (outside predicates), and the terminals tried there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseFailure {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse failed at {}:{} (offset {})",
            self.line, self.column, self.offset
        )?;
        if !self.expected.is_empty() {
            write!(f, ", expected {}", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseFailure {}

pub const END_OF_INPUT: &str = "end of input";

/// 1-based line and column of a character offset.
pub fn line_column(input: &[char], offset: usize) -> (usize, usize) {
    let before = &input[..offset.min(input.len())];
    let line = 1 + before.iter().filter(|&&c| c == '\n').count();
    let column = 1 + before.iter().rev().take_while(|&&c| c != '\n').count();
    (line, column)
}

#[derive(Clone, Debug)]
enum Op {
    Terminal(TerminalForm),
    Call(usize),
    Sequence(usize, usize),
    Choice(usize, usize),
    ZeroOrMore(usize),
    OneOrMore(usize),
    Optional(usize),
    /// Predicates carry their source text for failure reports.
    Not(usize, Arc<str>),
    And(usize, Arc<str>),
}

#[derive(Clone, Debug)]
struct RuleInfo {
    name: Arc<str>,
    lake: bool,
    body: usize,
}

/// A compiled grammar ready to parse. Immutable and shareable across threads.
#[derive(Clone, Debug)]
pub struct Parser {
    ops: Vec<Op>,
    rules: Vec<RuleInfo>,
    start: usize,
}

/// Result of one parse plus work counters.
#[derive(Clone, Debug)]
pub struct ParseRun {
    pub result: std::result::Result<ParseTree, ParseFailure>,
    /// Expression evaluations that were not answered from the memo table.
    pub evaluations: usize,
    pub memo_entries: usize,
}

impl Parser {
    /// Compiles `g` starting at its start symbol. Every referenced symbol
    /// needs a rule, and the grammar must not be left-recursive.
    pub fn new(g: &Grammar) -> Result<Parser> {
        let mut errors: Vec<Diagnostic> = validate(g)
            .into_iter()
            .filter(Diagnostic::is_error)
            .collect();
        for (name, _) in g.references() {
            if g.rule(name).is_none() {
                let d = Diagnostic {
                    severity: Severity::Error,
                    kind: DiagnosticKind::UndefinedSymbol {
                        name: name.to_string(),
                    },
                    rule: None,
                };
                if !errors.contains(&d) {
                    errors.push(d);
                }
            }
        }
        if has_errors(&errors) {
            return Err(Error::Invalid(errors));
        }

        let rules: Vec<RuleInfo> = g
            .rules()
            .map(|r| RuleInfo {
                name: Arc::from(r.name.as_str()),
                lake: r.is_lake(),
                body: r.body.id.index(),
            })
            .collect();
        let call = |name: &str| g.rule_index(name).expect("references were checked");
        let ops = g
            .occurrences()
            .into_iter()
            .map(|(_, e)| match &e.kind {
                ExprKind::Terminal(t) => Op::Terminal(t.clone()),
                ExprKind::Nonterminal(n) | ExprKind::Lake(n) => Op::Call(call(n)),
                ExprKind::Sequence(a, b) => Op::Sequence(a.id.index(), b.id.index()),
                ExprKind::Choice(a, b) => Op::Choice(a.id.index(), b.id.index()),
                ExprKind::ZeroOrMore(a) => Op::ZeroOrMore(a.id.index()),
                ExprKind::OneOrMore(a) => Op::OneOrMore(a.id.index()),
                ExprKind::Optional(a) => Op::Optional(a.id.index()),
                ExprKind::Not(a) => Op::Not(a.id.index(), Arc::from(e.to_string())),
                ExprKind::And(a) => Op::And(a.id.index(), Arc::from(e.to_string())),
            })
            .collect();
        let start = call(g.start());
        Ok(Parser { ops, rules, start })
    }

    /// Same parser with another start symbol.
    pub fn with_start(mut self, start: &str) -> Result<Parser> {
        self.start = self
            .rules
            .iter()
            .position(|r| &*r.name == start)
            .ok_or_else(|| Error::UnknownStart(start.to_string()))?;
        Ok(self)
    }

    pub fn start(&self) -> &str {
        &self.rules[self.start].name
    }

    /// Number of expression occurrences.
    pub fn expression_count(&self) -> usize {
        self.ops.len()
    }

    /// Parses all of `input`.
    pub fn parse(&self, input: &str) -> std::result::Result<ParseTree, ParseFailure> {
        self.run(input, false).result
    }

    /// Parses the longest prefix of `input` the start symbol matches.
    pub fn parse_prefix(&self, input: &str) -> std::result::Result<ParseTree, ParseFailure> {
        self.run(input, true).result
    }

    pub fn run(&self, input: &str, prefix: bool) -> ParseRun {
        let chars: Vec<char> = input.chars().collect();
        self.run_chars(&chars, prefix)
    }

    pub fn run_chars(&self, input: &[char], prefix: bool) -> ParseRun {
        let mut state = State {
            parser: self,
            input,
            memo: HashMap::new(),
            evaluations: 0,
            farthest: None,
            expected: BTreeSet::new(),
        };
        let outcome = state.call(self.start, 0);
        let result = match outcome {
            Some((end, items)) if prefix || end == input.len() => Ok(items[0].clone()),
            Some((end, _)) => {
                state.note_failure(end, || END_OF_INPUT.to_string());
                Err(state.failure())
            }
            None => Err(state.failure()),
        };
        ParseRun {
            result,
            evaluations: state.evaluations,
            memo_entries: state.memo.len(),
        }
    }
}

type Items = Arc<Vec<ParseTree>>;
type Outcome = Option<(usize, Items)>;

/// Farthest terminal failure inside one evaluation, kept with its memo entry
/// so that a later hit reports the same failures as a fresh evaluation.
type FailureMark = Option<(usize, Arc<BTreeSet<String>>)>;

struct State<'p, 'i> {
    parser: &'p Parser,
    input: &'i [char],
    memo: HashMap<(usize, usize), (Outcome, FailureMark)>,
    evaluations: usize,
    farthest: Option<usize>,
    expected: BTreeSet<String>,
}

/// Appends `items`, merging a leading leaf into a trailing one it touches.
fn append(out: &mut Vec<ParseTree>, items: &[ParseTree]) {
    let mut rest = items;
    if let (
        Some(ParseTree::Leaf { end, .. }),
        Some(ParseTree::Leaf {
            start,
            end: next_end,
        }),
    ) = (out.last_mut(), items.first())
    {
        if *end == *start {
            *end = *next_end;
            rest = &items[1..];
        }
    }
    out.extend_from_slice(rest);
}

impl State<'_, '_> {
    fn note_failure(&mut self, pos: usize, what: impl FnOnce() -> String) {
        match self.farthest {
            Some(f) if f > pos => return,
            Some(f) if f == pos => {}
            _ => {
                self.farthest = Some(pos);
                self.expected.clear();
            }
        }
        self.expected.insert(what());
    }

    fn merge_failures(&mut self, pos: usize, expected: &BTreeSet<String>) {
        match self.farthest {
            Some(f) if f > pos => {}
            Some(f) if f == pos => self.expected.extend(expected.iter().cloned()),
            _ => {
                self.farthest = Some(pos);
                self.expected = expected.clone();
            }
        }
    }

    fn failure(&self) -> ParseFailure {
        let offset = self.farthest.unwrap_or(0);
        let (line, column) = line_column(self.input, offset);
        ParseFailure {
            offset,
            line,
            column,
            expected: self.expected.iter().cloned().collect(),
        }
    }

    /// Evaluates a predicate operand; failures inside it are not reported.
    fn probe(&mut self, op: usize, pos: usize) -> Outcome {
        let farthest = self.farthest;
        let expected = std::mem::take(&mut self.expected);
        let outcome = self.eval(op, pos);
        self.farthest = farthest;
        self.expected = expected;
        outcome
    }

    fn call(&mut self, rule: usize, pos: usize) -> Outcome {
        let info = &self.parser.rules[rule];
        let (name, lake, body) = (info.name.clone(), info.lake, info.body);
        let (end, items) = self.eval(body, pos)?;
        let children: Arc<[ParseTree]> = if end == pos {
            Arc::from([])
        } else {
            Arc::from(items.as_slice())
        };
        let node = ParseTree::Interior {
            symbol: name,
            lake,
            start: pos,
            end,
            children,
        };
        Some((end, Arc::new(vec![node])))
    }

    fn eval(&mut self, op: usize, pos: usize) -> Outcome {
        if let Some((outcome, mark)) = self.memo.get(&(op, pos)) {
            let (outcome, mark) = (outcome.clone(), mark.clone());
            if let Some((f, expected)) = mark {
                self.merge_failures(f, &expected);
            }
            return outcome;
        }
        self.evaluations += 1;
        let outer_farthest = self.farthest.take();
        let outer_expected = std::mem::take(&mut self.expected);
        let outcome = self.eval_uncached(op, pos);
        let mark = self
            .farthest
            .map(|f| (f, Arc::new(std::mem::take(&mut self.expected))));
        self.farthest = outer_farthest;
        self.expected = outer_expected;
        if let Some((f, expected)) = &mark {
            self.merge_failures(*f, expected);
        }
        self.memo.insert((op, pos), (outcome.clone(), mark));
        outcome
    }

    fn eval_uncached(&mut self, op: usize, pos: usize) -> Outcome {
        let empty = || Arc::new(Vec::new());
        match &self.parser.ops[op] {
            Op::Terminal(t) => match t.match_at(self.input, pos) {
                Some(len) => Some((
                    pos + len,
                    Arc::new(vec![ParseTree::Leaf {
                        start: pos,
                        end: pos + len,
                    }]),
                )),
                None => {
                    let t = t.clone();
                    self.note_failure(pos, || t.to_string());
                    None
                }
            },
            Op::Call(rule) => self.call(*rule, pos),
            &Op::Sequence(a, b) => {
                let (mid, left) = self.eval(a, pos)?;
                let (end, right) = self.eval(b, mid)?;
                if right.is_empty() {
                    return Some((end, left));
                }
                if left.is_empty() {
                    return Some((end, right));
                }
                let mut items = (*left).clone();
                append(&mut items, &right);
                Some((end, Arc::new(items)))
            }
            &Op::Choice(a, b) => self.eval(a, pos).or_else(|| self.eval(b, pos)),
            &Op::ZeroOrMore(a) => Some(self.repeat(a, pos, Vec::new())),
            &Op::OneOrMore(a) => {
                let (first_end, first) = self.eval(a, pos)?;
                if first_end == pos {
                    return Some((pos, first));
                }
                Some(self.repeat(a, first_end, (*first).clone()))
            }
            &Op::Optional(a) => Some(self.eval(a, pos).unwrap_or_else(|| (pos, empty()))),
            Op::Not(a, label) => match self.probe(*a, pos) {
                Some(_) => {
                    let label = label.to_string();
                    self.note_failure(pos, || label);
                    None
                }
                None => Some((pos, empty())),
            },
            Op::And(a, label) => match self.probe(*a, pos) {
                Some(_) => Some((pos, empty())),
                None => {
                    let label = label.to_string();
                    self.note_failure(pos, || label);
                    None
                }
            },
        }
    }

    fn repeat(&mut self, a: usize, mut pos: usize, mut items: Vec<ParseTree>) -> (usize, Items) {
        while let Some((end, more)) = self.eval(a, pos) {
            if end == pos {
                break;
            }
            append(&mut items, &more);
            pos = end;
        }
        (pos, Arc::new(items))
    }
}
