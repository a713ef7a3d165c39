//! The `lakepeg` command line.
//!
//! Exit status: 0 on success, 1 when the input does not parse, 2 for usage,
//! I/O, and grammar errors. Data goes to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser as ClapParser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{analyze, format_set, AnalysisTables, SymbolSet};
use crate::error::Error;
use crate::grammar::{Grammar, GrammarForm};
use crate::lower::{insert_water, translate, GrammarStats, Translation};
use crate::packrat::Parser;
use crate::text::{read_grammar, write_grammar};
use crate::validate::{has_errors, validate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE_FAILURE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(ClapParser, Debug)]
#[command(
    name = "lakepeg",
    version,
    about = "PEG island parsers with lake symbols"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower an extended grammar to a plain PEG.
    Translate {
        #[arg(short, long)]
        grammar: PathBuf,
        /// Write the grammar here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print BEGINNING, SUCCEED, and ALT for every expression occurrence,
    /// computed after water insertion.
    Analyze {
        #[arg(short, long)]
        grammar: PathBuf,
        /// Tables to print; all three by default.
        #[arg(long, value_enum, value_delimiter = ',')]
        sets: Vec<SetName>,
        #[arg(long)]
        json: bool,
    },
    /// Parse an input file and print its tree as JSON.
    Parse {
        #[arg(short, long)]
        grammar: PathBuf,
        input: PathBuf,
        /// Start symbol; defaults to the grammar's first rule.
        #[arg(long)]
        start: Option<String>,
        /// Write the JSON tree here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Accept a match of a prefix of the input.
        #[arg(long)]
        prefix: bool,
    },
    /// Count rules, lakes, and alternative symbols. Rules are counted after
    /// water insertion, so lakes without a written rule count as rules.
    Stats {
        #[arg(short, long)]
        grammar: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SetName {
    Beginning,
    Succeed,
    Alt,
}

/// A failure already rendered for stderr, with its exit status.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn error(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_ERROR,
            message: message.into(),
        }
    }
}

type CmdResult = Result<(), Failure>;

/// Runs the command line and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_ERROR
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Translate { grammar, output } => {
            cmd_translate(&grammar, output.as_deref(), stdout, stderr)
        }
        Command::Analyze {
            grammar,
            sets,
            json,
        } => cmd_analyze(&grammar, &sets, json, stdout),
        Command::Parse {
            grammar,
            input,
            start,
            output,
            prefix,
        } => cmd_parse(
            &grammar,
            &input,
            start.as_deref(),
            output.as_deref(),
            prefix,
            stdout,
            stderr,
        ),
        Command::Stats { grammar, json } => cmd_stats(&grammar, json, stdout, stderr),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.message);
            f.code
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::error(format!("error: {}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CmdResult {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| Failure::error(format!("error: {}: {e}", p.display())))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::error(format!("error: writing output: {e}"))),
    }
}

fn grammar_failure(path: &Path, e: Error) -> Failure {
    let message = match e {
        Error::Syntax { message, span } => format!("error: {}:{span}: {message}", path.display()),
        Error::DuplicateRule {
            name,
            span: Some(span),
        } => {
            format!("error: {}:{span}: duplicate rule `{name}`", path.display())
        }
        Error::Invalid(diagnostics) => diagnostics
            .iter()
            .map(|d| format!("{}: {d}", path.display()))
            .collect::<Vec<_>>()
            .join("\n"),
        other => format!("error: {}: {other}", path.display()),
    };
    Failure::error(message)
}

fn load_grammar(path: &Path) -> Result<Grammar, Failure> {
    let text = read_file(path)?;
    read_grammar(&text).map_err(|e| grammar_failure(path, e))
}

fn load_translation(path: &Path, stderr: &mut dyn Write) -> Result<Translation, Failure> {
    let g = load_grammar(path)?;
    let t = translate(&g).map_err(|e| grammar_failure(path, e))?;
    for d in &t.diagnostics {
        let _ = writeln!(stderr, "{}: {d}", path.display());
    }
    for w in &t.report.warnings {
        let _ = writeln!(stderr, "{}: {w}", path.display());
    }
    Ok(t)
}

fn cmd_translate(
    path: &Path,
    output: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult {
    let t = load_translation(path, stderr)?;
    write_out(output, &write_grammar(&t.normal), stdout)
}

fn set_json(set: &SymbolSet) -> Value {
    Value::Array(set.iter().map(|s| Value::String(s.to_string())).collect())
}

fn cmd_analyze(path: &Path, sets: &[SetName], json: bool, stdout: &mut dyn Write) -> CmdResult {
    let g = load_grammar(path)?;
    let diagnostics = validate(&g);
    if has_errors(&diagnostics) {
        return Err(grammar_failure(
            path,
            Error::Invalid(diagnostics.into_iter().filter(|d| d.is_error()).collect()),
        ));
    }
    let intermediate = insert_water(&g);
    let tables = analyze(&intermediate);
    let wanted: Vec<SetName> = if sets.is_empty() {
        vec![SetName::Beginning, SetName::Succeed, SetName::Alt]
    } else {
        [SetName::Beginning, SetName::Succeed, SetName::Alt]
            .into_iter()
            .filter(|s| sets.contains(s))
            .collect()
    };
    let text = if json {
        let mut doc = serde_json::to_string_pretty(&analysis_json(&intermediate, &tables, &wanted))
            .expect("JSON values always serialize");
        doc.push('\n');
        doc
    } else {
        analysis_text(&intermediate, &tables, &wanted)
    };
    write_out(None, &text, stdout)
}

fn table(tables: &AnalysisTables, which: SetName) -> &crate::analysis::SetTable {
    match which {
        SetName::Beginning => &tables.beginning,
        SetName::Succeed => &tables.succeed,
        SetName::Alt => &tables.alt,
    }
}

fn set_label(which: SetName) -> &'static str {
    match which {
        SetName::Beginning => "beginning",
        SetName::Succeed => "succeed",
        SetName::Alt => "alt",
    }
}

fn analysis_json(g: &Grammar, tables: &AnalysisTables, wanted: &[SetName]) -> Value {
    let rows: Vec<Value> = g
        .occurrences()
        .into_iter()
        .map(|(rule, e)| {
            let mut row = serde_json::Map::new();
            row.insert("id".into(), json!(e.id.get()));
            row.insert("operator".into(), json!(e.operator_name()));
            row.insert("expression".into(), json!(e.to_string()));
            row.insert("rule".into(), json!(g.rule_at(rule).name));
            for &w in wanted {
                row.insert(set_label(w).into(), set_json(table(tables, w).get(e.id)));
            }
            Value::Object(row)
        })
        .collect();
    let mut iterations = serde_json::Map::new();
    for &w in wanted {
        iterations.insert(set_label(w).into(), json!(table(tables, w).iterations()));
    }
    json!({ "expressions": rows, "iterations": iterations })
}

fn analysis_text(g: &Grammar, tables: &AnalysisTables, wanted: &[SetName]) -> String {
    let mut out = String::new();
    for (rule, e) in g.occurrences() {
        out.push_str(&format!(
            "{}\t{}\t{}",
            e.id,
            e.operator_name(),
            g.rule_at(rule).name
        ));
        for &w in wanted {
            out.push_str(&format!(
                "\t{}={}",
                set_label(w),
                format_set(table(tables, w).get(e.id))
            ));
        }
        out.push('\n');
    }
    out
}

fn cmd_parse(
    grammar: &Path,
    input: &Path,
    start: Option<&str>,
    output: Option<&Path>,
    prefix: bool,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult {
    let g = load_grammar(grammar)?;
    let normal = if g.form() == GrammarForm::Normal {
        g
    } else {
        load_translation(grammar, stderr)?.normal
    };
    let mut parser = Parser::new(&normal).map_err(|e| grammar_failure(grammar, e))?;
    if let Some(s) = start {
        parser = parser
            .with_start(s)
            .map_err(|e| grammar_failure(grammar, e))?;
    }
    let text = read_file(input)?;
    let run = parser.run(&text, prefix);
    match run.result {
        Ok(tree) => {
            let mut json = tree.to_json(&text);
            json.push('\n');
            write_out(output, &json, stdout)
        }
        Err(failure) => Err(Failure {
            code: EXIT_PARSE_FAILURE,
            message: format!(
                "{}:{}:{}: {failure}",
                input.display(),
                failure.line,
                failure.column
            ),
        }),
    }
}

fn cmd_stats(path: &Path, json: bool, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let t = load_translation(path, stderr)?;
    let s = GrammarStats::of(&t);
    let text = if json {
        format!(
            "{}\n",
            json!({ "rules": s.rules, "lakes": s.lakes, "alt_total": s.alt_total })
        )
    } else {
        format!(
            "rules: {}\nlakes: {}\nalt-total: {}\n",
            s.rules, s.lakes, s.alt_total
        )
    };
    write_out(None, &text, stdout)
}
