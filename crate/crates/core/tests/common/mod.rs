#![allow(dead_code)]

pub mod fixpoint;
pub mod gen;
pub mod oracle;

use std::path::PathBuf;

use lakepeg::{read_grammar, Grammar};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("grammars")
        .join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn fixture(name: &str) -> Grammar {
    read_grammar(&fixture_text(name)).unwrap()
}
