//! Grammar source text: reading `name <- expr` / `<lake> <- expr` rules and
//! writing any grammar back out.
//!
//! Operator precedence, tightest first: postfix `? * +`, prefix `! &`,
//! sequence, prioritized choice `/`. Sequence and choice associate to the
//! left. A rule body runs until the next rule header or the end of input.
//!
//! A grammar whose first line is [`NORMAL_MARKER`] is read as a normal PEG:
//! `<name>` symbols are ordinary nonterminals that remember their lake origin,
//! and `water` is an ordinary rule.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result, SourceSpan};
use crate::expr::{CharRange, Expr, ExprKind, TerminalForm};
use crate::grammar::{Grammar, GrammarForm, Rule, RuleKind};

pub const NORMAL_MARKER: &str = "# lakepeg: normal";

/// Reads an extended grammar (or a normal one, if marked).
pub fn read_grammar(text: &str) -> Result<Grammar> {
    let form = if text
        .lines()
        .find(|l| !l.trim().is_empty())
        .map(str::trim_end)
        == Some(NORMAL_MARKER)
    {
        GrammarForm::Normal
    } else {
        GrammarForm::Extended
    };
    read_grammar_as(text, form)
}

/// Reads grammar text in the given mode. Only `Extended` and `Normal` are
/// meaningful; intermediate grammars are not read back.
pub fn read_grammar_as(text: &str, form: GrammarForm) -> Result<Grammar> {
    let tokens = Lexer::new(text).tokenize()?;
    let mut parser = Parser { tokens, pos: 0 };
    let rules = parser.rules(form)?;
    if rules.is_empty() {
        return Err(Error::EmptyGrammar);
    }
    Grammar::from_rules(form, rules, None)
}

/// Parses a single expression, e.g. for tests and bindings.
pub fn read_expr(text: &str) -> Result<Expr> {
    let tokens = Lexer::new(text).tokenize()?;
    let mut parser = Parser { tokens, pos: 0 };
    let e = parser.choice()?;
    match parser.peek() {
        Tok::Eof => Ok(e),
        _ => Err(parser.error("unexpected token after expression")),
    }
}

/// One rule per line. Normal grammars start with [`NORMAL_MARKER`].
pub fn write_grammar(g: &Grammar) -> String {
    let mut out = String::new();
    if g.form() == GrammarForm::Normal {
        out.push_str(NORMAL_MARKER);
        out.push('\n');
    }
    for rule in g.rules() {
        let _ = writeln!(out, "{}", RuleDisplay(rule));
    }
    out
}

pub(crate) struct RuleDisplay<'a>(pub &'a Rule);

impl fmt::Display for RuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rule = self.0;
        if rule.kind == RuleKind::Lake {
            write!(f, "<{}> <- ", rule.name)?;
        } else {
            write!(f, "{} <- ", rule.name)?;
        }
        write_expr(f, &rule.body)
    }
}

pub(crate) fn write_expr(f: &mut impl fmt::Write, e: &Expr) -> fmt::Result {
    use ExprKind::*;
    match &e.kind {
        Terminal(t) => write_terminal(f, t),
        Nonterminal(n) => f.write_str(n),
        Lake(n) => write!(f, "<{n}>"),
        Sequence(a, b) => {
            write_operand(f, a, 2)?;
            f.write_char(' ')?;
            write_operand(f, b, 3)
        }
        Choice(a, b) => {
            write_operand(f, a, 1)?;
            f.write_str(" / ")?;
            write_operand(f, b, 2)
        }
        ZeroOrMore(x) => {
            write_operand(f, x, 4)?;
            f.write_char('*')
        }
        OneOrMore(x) => {
            write_operand(f, x, 4)?;
            f.write_char('+')
        }
        Optional(x) => {
            write_operand(f, x, 4)?;
            f.write_char('?')
        }
        Not(x) => {
            f.write_char('!')?;
            write_operand(f, x, 3)
        }
        And(x) => {
            f.write_char('&')?;
            write_operand(f, x, 3)
        }
    }
}

/// Writes `e`, parenthesized when it binds looser than `min`.
fn write_operand(f: &mut impl fmt::Write, e: &Expr, min: u8) -> fmt::Result {
    if e.precedence() < min {
        f.write_char('(')?;
        write_expr(f, e)?;
        f.write_char(')')
    } else {
        write_expr(f, e)
    }
}

pub(crate) fn write_terminal(f: &mut impl fmt::Write, t: &TerminalForm) -> fmt::Result {
    match t {
        TerminalForm::Literal(text) => {
            f.write_char('\'')?;
            for c in text.chars() {
                match c {
                    '\n' => f.write_str("\\n")?,
                    '\t' => f.write_str("\\t")?,
                    '\\' => f.write_str("\\\\")?,
                    '\'' => f.write_str("\\'")?,
                    c => f.write_char(c)?,
                }
            }
            f.write_char('\'')
        }
        TerminalForm::Class { ranges, negated } => {
            f.write_char('[')?;
            if *negated {
                f.write_char('^')?;
            }
            for r in ranges {
                write_class_char(f, r.lo)?;
                if r.hi != r.lo {
                    f.write_char('-')?;
                    write_class_char(f, r.hi)?;
                }
            }
            f.write_char(']')
        }
        TerminalForm::Any => f.write_char('.'),
    }
}

fn write_class_char(f: &mut impl fmt::Write, c: char) -> fmt::Result {
    match c {
        '\n' => f.write_str("\\n"),
        '\t' => f.write_str("\\t"),
        '\\' | ']' | '^' | '-' => {
            f.write_char('\\')?;
            f.write_char(c)
        }
        c => f.write_char(c),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LakeName(String),
    Arrow,
    Slash,
    Bang,
    Amp,
    Question,
    Star,
    Plus,
    LParen,
    RParen,
    Dot,
    Literal(String),
    Class(Vec<CharRange>, bool),
    Eof,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn here(&self) -> SourceSpan {
        SourceSpan::new(self.line, self.column, 1)
    }

    fn error(&self, message: impl Into<String>, span: SourceSpan) -> Error {
        Error::Syntax {
            message: message.into(),
            span,
        }
    }

    fn tokenize(mut self) -> Result<Vec<(Tok, SourceSpan)>> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let start = self.here();
            let Some(c) = self.peek() else {
                out.push((Tok::Eof, start));
                return Ok(out);
            };
            let tok = match c {
                '/' | '!' | '&' | '?' | '*' | '+' | '(' | ')' | '.' => {
                    self.bump();
                    match c {
                        '/' => Tok::Slash,
                        '!' => Tok::Bang,
                        '&' => Tok::Amp,
                        '?' => Tok::Question,
                        '*' => Tok::Star,
                        '+' => Tok::Plus,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        _ => Tok::Dot,
                    }
                }
                '<' => {
                    self.bump();
                    if self.peek() == Some('-') {
                        self.bump();
                        Tok::Arrow
                    } else {
                        let name = self.ident();
                        if name.is_empty() || self.peek() != Some('>') {
                            return Err(self.error("expected `<-` or a lake name `<name>`", start));
                        }
                        self.bump();
                        Tok::LakeName(name)
                    }
                }
                '\'' | '"' => {
                    self.bump();
                    let text = self.quoted(c, start)?;
                    if text.is_empty() {
                        return Err(self.error("empty literal", start));
                    }
                    Tok::Literal(text)
                }
                '[' => {
                    self.bump();
                    self.class(start)?
                }
                c if c == '_' || c.is_ascii_alphabetic() => Tok::Ident(self.ident()),
                c => return Err(self.error(format!("unexpected character `{c}`"), start)),
            };
            let length = if self.line == start.line {
                self.column - start.column
            } else {
                1
            };
            out.push((tok, SourceSpan { length, ..start }));
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn ident(&mut self) -> String {
        let mut name = String::new();
        if let Some(c) = self.peek() {
            if c == '_' || c.is_ascii_alphabetic() {
                name.push(c);
                self.bump();
            } else {
                return name;
            }
        }
        while let Some(c) = self.peek() {
            if c == '_' || c.is_ascii_alphanumeric() {
                name.push(c);
                self.bump();
            } else {
                break;
            }
        }
        name
    }

    fn escape(&mut self, in_class: bool) -> Result<char> {
        let at = self.here();
        match self.bump() {
            Some('n') => Ok('\n'),
            Some('t') => Ok('\t'),
            Some('\\') => Ok('\\'),
            Some('\'') => Ok('\''),
            Some('"') => Ok('"'),
            Some(c @ (']' | '^' | '-')) if in_class => Ok(c),
            Some(c) => Err(self.error(format!("unknown escape `\\{c}`"), at)),
            None => Err(self.error("unterminated escape", at)),
        }
    }

    fn quoted(&mut self, quote: char, start: SourceSpan) -> Result<String> {
        let mut text = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(self.error("unterminated literal", start)),
                Some('\\') => text.push(self.escape(false)?),
                Some(c) if c == quote => return Ok(text),
                Some(c) => text.push(c),
            }
        }
    }

    fn class_char(&mut self, start: SourceSpan) -> Result<char> {
        match self.bump() {
            None | Some('\n') => Err(self.error("unterminated character class", start)),
            Some('\\') => self.escape(true),
            Some(c) => Ok(c),
        }
    }

    fn class(&mut self, start: SourceSpan) -> Result<Tok> {
        let negated = self.peek() == Some('^');
        if negated {
            self.bump();
        }
        let mut ranges = Vec::new();
        loop {
            if self.peek() == Some(']') {
                self.bump();
                break;
            }
            let lo = self.class_char(start)?;
            // `a-z`, unless the dash closes the class
            let mut lookahead = self.chars.clone();
            if lookahead.next() == Some('-') && !matches!(lookahead.next(), Some(']') | None) {
                self.bump();
                let hi = self.class_char(start)?;
                if hi < lo {
                    return Err(self.error(format!("reversed range `{lo}-{hi}`"), start));
                }
                ranges.push(CharRange::new(lo, hi));
            } else {
                ranges.push(CharRange::single(lo));
            }
        }
        if ranges.is_empty() {
            return Err(self.error("empty character class", start));
        }
        Ok(Tok::Class(ranges, negated))
    }
}

struct Parser {
    tokens: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.tokens[self.pos].1
    }

    fn advance(&mut self) -> Tok {
        let tok = self.tokens[self.pos].0.clone();
        if tok != Tok::Eof {
            self.pos += 1;
        }
        tok
    }

    /// Error at the current token; at end of input, at the last real token so
    /// the span stays inside the offending rule.
    fn error(&self, message: &str) -> Error {
        let span = if *self.peek() == Tok::Eof && self.pos > 0 {
            self.tokens[self.pos - 1].1
        } else {
            self.span()
        };
        Error::Syntax {
            message: message.to_string(),
            span,
        }
    }

    fn at_header(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LakeName(_))
            && self.tokens.get(self.pos + 1).map(|t| &t.0) == Some(&Tok::Arrow)
    }

    fn rules(&mut self, form: GrammarForm) -> Result<Vec<Rule>> {
        let mut rules = Vec::new();
        while *self.peek() != Tok::Eof {
            let span = self.span();
            let (name, kind) = match self.advance() {
                Tok::Ident(n) if form == GrammarForm::Extended && n == crate::grammar::WATER => {
                    (n, RuleKind::Water)
                }
                Tok::Ident(n) => (n, RuleKind::Nonterminal),
                Tok::LakeName(n) => (n, RuleKind::Lake),
                _ => {
                    self.pos -= 1;
                    return Err(self.error("expected a rule header `name <-` or `<name> <-`"));
                }
            };
            if *self.peek() != Tok::Arrow {
                return Err(self.error("expected `<-` after rule name"));
            }
            self.advance();
            let body = self.choice()?;
            if !self.at_header() && *self.peek() != Tok::Eof {
                return Err(self.error("unexpected token in rule body"));
            }
            rules.push(Rule {
                span: Some(span),
                ..Rule::new(name, kind, body)
            });
        }
        Ok(rules)
    }

    fn choice(&mut self) -> Result<Expr> {
        let mut e = self.sequence()?;
        while *self.peek() == Tok::Slash {
            self.advance();
            let rhs = self.sequence()?;
            e = Expr::choice(e, rhs);
        }
        Ok(e)
    }

    fn starts_operand(&self) -> bool {
        !self.at_header()
            && matches!(
                self.peek(),
                Tok::Ident(_)
                    | Tok::LakeName(_)
                    | Tok::Literal(_)
                    | Tok::Class(..)
                    | Tok::Dot
                    | Tok::LParen
                    | Tok::Bang
                    | Tok::Amp
            )
    }

    fn sequence(&mut self) -> Result<Expr> {
        if !self.starts_operand() {
            return Err(self.error("expected an expression"));
        }
        let mut e = self.prefix()?;
        while self.starts_operand() {
            let rhs = self.prefix()?;
            e = Expr::seq(e, rhs);
        }
        Ok(e)
    }

    fn prefix(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Bang => {
                self.advance();
                Ok(Expr::not(self.prefix()?))
            }
            Tok::Amp => {
                self.advance();
                Ok(Expr::and(self.prefix()?))
            }
            _ => self.suffix(),
        }
    }

    fn suffix(&mut self) -> Result<Expr> {
        let mut e = self.primary()?;
        loop {
            e = match self.peek() {
                Tok::Question => Expr::opt(e),
                Tok::Star => Expr::star(e),
                Tok::Plus => Expr::plus(e),
                _ => return Ok(e),
            };
            self.advance();
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        if !self.starts_operand() {
            return Err(self.error("expected an expression"));
        }
        match self.advance() {
            Tok::Ident(n) => Ok(Expr::nonterminal(n)),
            Tok::LakeName(n) => Ok(Expr::lake(n)),
            Tok::Literal(s) => Ok(Expr::literal(s)),
            Tok::Class(ranges, negated) => Ok(Expr::class(ranges, negated)),
            Tok::Dot => Ok(Expr::any()),
            Tok::LParen => {
                let e = self.choice()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error("expected `)`"));
                }
                self.advance();
                Ok(e)
            }
            _ => unreachable!("primary called without an operand token"),
        }
    }
}
