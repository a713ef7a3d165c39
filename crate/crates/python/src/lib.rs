//! Python bindings: read, translate, analyze, and parse island grammars.

use std::sync::Arc;

use lakepeg_core as core;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(lakepeg, GrammarError, PyValueError);
create_exception!(lakepeg, ParseError, PyValueError);

fn grammar_err(e: core::Error) -> PyErr {
    GrammarError::new_err(e.to_string())
}

/// A grammar in extended (lake symbols) or normal (plain PEG) form.
#[pyclass(frozen, skip_from_py_object, module = "lakepeg")]
#[derive(Clone)]
struct Grammar {
    inner: Arc<core::Grammar>,
}

impl Grammar {
    fn wrap(g: core::Grammar) -> Self {
        Grammar { inner: Arc::new(g) }
    }

    /// The grammar a parser should run: lowered unless already normal.
    fn runnable(&self) -> PyResult<core::Grammar> {
        if self.inner.form() == core::GrammarForm::Normal {
            Ok((*self.inner).clone())
        } else {
            Ok(core::translate(&self.inner).map_err(grammar_err)?.normal)
        }
    }
}

#[pymethods]
impl Grammar {
    /// Reads grammar text; a `# lakepeg: normal` line selects normal form.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        core::read_grammar(text)
            .map(Grammar::wrap)
            .map_err(grammar_err)
    }

    #[staticmethod]
    fn from_file(path: std::path::PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path)?;
        Grammar::new(&text)
    }

    #[getter]
    fn start(&self) -> &str {
        self.inner.start()
    }

    /// "extended", "intermediate", or "normal".
    #[getter]
    fn form(&self) -> &'static str {
        match self.inner.form() {
            core::GrammarForm::Extended => "extended",
            core::GrammarForm::Intermediate => "intermediate",
            core::GrammarForm::Normal => "normal",
        }
    }

    #[getter]
    fn rules(&self) -> Vec<String> {
        self.inner.rules().map(|r| r.name.clone()).collect()
    }

    #[getter]
    fn lakes(&self) -> Vec<String> {
        self.inner.lakes().into_iter().map(str::to_string).collect()
    }

    fn to_text(&self) -> String {
        core::write_grammar(&self.inner)
    }

    fn translate(&self) -> PyResult<Translation> {
        translate(self)
    }

    fn __str__(&self) -> String {
        self.to_text()
    }

    fn __repr__(&self) -> String {
        format!(
            "<Grammar {} rules, start={}>",
            self.inner.rules().count(),
            self.inner.start()
        )
    }

    fn __eq__(&self, other: &Grammar) -> bool {
        self.inner == other.inner
    }
}

/// Output of lowering an extended grammar.
#[pyclass(frozen, module = "lakepeg")]
struct Translation {
    #[pyo3(get)]
    intermediate: Grammar,
    #[pyo3(get)]
    normal: Grammar,
    /// Lake name to its alternative symbols, in guard order.
    #[pyo3(get)]
    alternatives: Vec<(String, Vec<String>)>,
    #[pyo3(get)]
    warnings: Vec<String>,
}

/// Lowers lake symbols to guarded wildcards.
#[pyfunction]
fn translate(grammar: &Grammar) -> PyResult<Translation> {
    let t = core::translate(&grammar.inner).map_err(grammar_err)?;
    Ok(Translation {
        alternatives: t
            .report
            .lakes
            .iter()
            .map(|l| {
                (
                    l.lake.clone(),
                    l.alternatives.iter().map(ToString::to_string).collect(),
                )
            })
            .collect(),
        warnings: t.report.warnings.iter().map(ToString::to_string).collect(),
        intermediate: Grammar::wrap(t.intermediate),
        normal: Grammar::wrap(t.normal),
    })
}

/// One row per expression occurrence of the water-inserted grammar.
#[pyfunction]
fn analyze<'py>(py: Python<'py>, grammar: &Grammar) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let g = core::insert_water(&grammar.inner);
    let t = core::analyze(&g);
    let strings = |s: &core::SymbolSet| s.iter().map(ToString::to_string).collect::<Vec<_>>();
    g.occurrences()
        .into_iter()
        .map(|(rule, e)| {
            let row = PyDict::new(py);
            row.set_item("id", e.id.get())?;
            row.set_item("operator", e.operator_name())?;
            row.set_item("rule", rule)?;
            row.set_item("beginning", strings(t.beginning(e.id)))?;
            row.set_item("succeed", strings(t.succeed(e.id)))?;
            row.set_item("alt", strings(t.alt(e.id)))?;
            Ok(row)
        })
        .collect()
}

/// `{"rules", "lakes", "alt_total"}` of the lowered grammar.
#[pyfunction]
fn stats<'py>(py: Python<'py>, grammar: &Grammar) -> PyResult<Bound<'py, PyDict>> {
    let s = core::stats(&grammar.inner).map_err(grammar_err)?;
    let d = PyDict::new(py);
    d.set_item("rules", s.rules)?;
    d.set_item("lakes", s.lakes)?;
    d.set_item("alt_total", s.alt_total)?;
    Ok(d)
}

/// Packrat parser; extended grammars are translated first.
#[pyclass(frozen, module = "lakepeg")]
struct Parser {
    inner: core::Parser,
}

#[pymethods]
impl Parser {
    #[new]
    #[pyo3(signature = (grammar, start=None))]
    fn new(grammar: &Grammar, start: Option<&str>) -> PyResult<Self> {
        let mut p = core::Parser::new(&grammar.runnable()?).map_err(grammar_err)?;
        if let Some(s) = start {
            p = p.with_start(s).map_err(grammar_err)?;
        }
        Ok(Parser { inner: p })
    }

    /// Parses all of `text`, or its longest accepted prefix with `prefix=True`.
    #[pyo3(signature = (text, prefix=false))]
    fn parse(&self, py: Python<'_>, text: &str, prefix: bool) -> PyResult<ParseTree> {
        let input: Arc<[char]> = text.chars().collect();
        let run = py.detach(|| self.inner.run_chars(&input, prefix));
        match run.result {
            Ok(tree) => Ok(ParseTree { tree, input }),
            Err(f) => Err(ParseError::new_err((
                f.to_string(),
                f.offset,
                f.line,
                f.column,
                f.expected,
            ))),
        }
    }
}

/// Parses `text` with `grammar`.
#[pyfunction]
#[pyo3(signature = (grammar, text, start=None, prefix=false))]
fn parse(
    py: Python<'_>,
    grammar: &Grammar,
    text: &str,
    start: Option<&str>,
    prefix: bool,
) -> PyResult<ParseTree> {
    Parser::new(grammar, start)?.parse(py, text, prefix)
}

/// A parse tree node. Leaves have no symbol.
#[pyclass(frozen, module = "lakepeg")]
struct ParseTree {
    tree: core::ParseTree,
    input: Arc<[char]>,
}

impl ParseTree {
    fn child(&self, tree: &core::ParseTree) -> ParseTree {
        ParseTree {
            tree: tree.clone(),
            input: self.input.clone(),
        }
    }
}

#[pymethods]
impl ParseTree {
    #[getter]
    fn symbol(&self) -> Option<&str> {
        self.tree.symbol()
    }

    #[getter]
    fn is_lake(&self) -> bool {
        self.tree.is_lake()
    }

    #[getter]
    fn start(&self) -> usize {
        self.tree.start()
    }

    #[getter]
    fn end(&self) -> usize {
        self.tree.end()
    }

    #[getter]
    fn text(&self) -> String {
        self.input[self.tree.start()..self.tree.end()]
            .iter()
            .collect()
    }

    #[getter]
    fn children(&self) -> Vec<ParseTree> {
        self.tree.children().iter().map(|c| self.child(c)).collect()
    }

    fn find_all(&self, symbol: &str) -> Vec<ParseTree> {
        self.tree
            .find_all(symbol)
            .into_iter()
            .map(|c| self.child(c))
            .collect()
    }

    fn count_islands(&self, symbol: &str) -> usize {
        self.tree.count_islands(symbol)
    }

    #[pyo3(signature = (pretty=false))]
    fn to_json(&self, pretty: bool) -> String {
        let text: String = self.input.iter().collect();
        if pretty {
            self.tree.to_json_pretty(&text)
        } else {
            self.tree.to_json(&text)
        }
    }

    fn __repr__(&self) -> String {
        let (s, e) = (self.tree.start(), self.tree.end());
        match self.tree.symbol() {
            Some(sym) if self.tree.is_lake() => format!("<ParseTree <{sym}> {s}..{e}>"),
            Some(sym) => format!("<ParseTree {sym} {s}..{e}>"),
            None => format!("<ParseTree leaf {s}..{e}>"),
        }
    }
}

#[pymodule]
mod lakepeg {
    #[pymodule_export]
    use super::{
        analyze, parse, stats, translate, Grammar, GrammarError, ParseError, ParseTree, Parser,
        Translation,
    };
}
