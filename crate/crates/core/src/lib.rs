//! Island parsing with lake symbols.
//!
//! A grammar is a PEG that may also use lake symbols `<name>` (water inside
//! an island) and a `water` rule. [`translate`] turns it into a plain PEG in
//! two steps: the water expression is appended to every lake, then each lake
//! gets a wildcard alternative `!(s1 / ... / sn) .` guarded by the lake's
//! alternative symbols, which are found by fixed-point analysis
//! ([`analysis`]). [`Parser`] runs the result as a packrat parser.
//!
//! ```
//! use lakepeg::{read_grammar, translate, Parser};
//!
//! let g = read_grammar("
//!     block <- '{' stmt* '}'
//!     stmt <- expr_stmt / block
//!     expr_stmt <- <elake>* ';'
//! ").unwrap();
//! let t = translate(&g).unwrap();
//! assert_eq!(
//!     t.normal.rule("elake").unwrap().body.to_string(),
//!     "!. / !(block / ';' / '}') ."
//! );
//! let tree = Parser::new(&t.normal).unwrap().parse("{a = b;}").unwrap();
//! // one lake node per skipped character
//! assert_eq!(tree.count_islands("elake"), 5);
//! ```

pub mod analysis;
pub mod cli;
pub mod error;
pub mod expr;
pub mod grammar;
pub mod lower;
pub mod packrat;
pub mod text;
pub mod validate;

pub use analysis::{analyze, analyze_with, AnalysisOptions, AnalysisTables, SymbolItem, SymbolSet};
pub use error::{Error, Result, SourceSpan};
pub use expr::{CharRange, Expr, ExprId, ExprKind, TerminalForm};
pub use grammar::{Grammar, GrammarForm, Rule, RuleDef, RuleKind};
pub use lower::{
    check_epsilon_alternatives, insert_water, lower_lakes, stats, translate, EpsilonWarning,
    GrammarStats, LoweringReport, Translation,
};
pub use packrat::{ParseFailure, ParseTree, Parser};
pub use text::{read_grammar, write_grammar};
pub use validate::{validate, Diagnostic};
