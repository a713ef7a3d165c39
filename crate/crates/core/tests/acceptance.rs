//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are expected to fail; anything else
//! failing, or one of those unexpectedly passing, makes the run fail.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::gen::{random_grammar, random_input, GrammarShape};
use common::{fixpoint, fixture, fixture_path, fixture_text, oracle};
use lakepeg::analysis::{pass_bound, SymbolSet};
use lakepeg::expr::TerminalForm;
use lakepeg::{
    analyze, analyze_with, insert_water, read_grammar, translate, write_grammar, AnalysisOptions,
    ExprId, ExprKind, Grammar, ParseTree, Parser, Rule, SymbolItem,
};

type Outcome = Result<String, String>;

const KNOWN_UNATTAINABLE: &[(u32, &str)] = &[(
    4,
    "ALT(<term>) is empty under the literal update rules: the first element of a \
     sequence only inherits its parent's ALT, so `opt` never reaches <term>",
)];

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    check(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

/// Parses `{stmt, '}', <elake>, ε, .}`.
fn set(text: &str) -> SymbolSet {
    let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
    inner
        .split(", ")
        .filter(|s| !s.is_empty())
        .map(|item| match item {
            "ε" => SymbolItem::Epsilon,
            "." => SymbolItem::Terminal(TerminalForm::Any),
            s if s.starts_with('\'') => {
                SymbolItem::Terminal(TerminalForm::Literal(s[1..s.len() - 1].to_string()))
            }
            s if s.starts_with('<') => SymbolItem::Lake(s[1..s.len() - 1].to_string()),
            s => SymbolItem::Nonterminal(s.to_string()),
        })
        .collect()
}

/// Expected final BEGINNING, SUCCEED, ALT for e1..e15 of the block grammar.
const TABLE: [(&str, &str, &str); 15] = [
    ("{'{'}", "{stmt, '}'}", "{'}'}"),
    ("{stmt}", "{stmt, '}'}", "{'}'}"),
    ("{ε, stmt}", "{'}'}", "{}"),
    ("{'{'}", "{'}'}", "{'}'}"),
    ("{'}'}", "{stmt, '}'}", "{}"),
    ("{'{'}", "{stmt, '}'}", "{'}'}"),
    ("{expr_stmt}", "{stmt, '}'}", "{block, '}'}"),
    ("{block}", "{stmt, '}'}", "{'}'}"),
    ("{expr_stmt, block}", "{stmt, '}'}", "{'}'}"),
    ("{<elake>, ε}", "{<elake>, ';'}", "{';', block, '}'}"),
    ("{ε, <elake>}", "{';'}", "{block, '}'}"),
    ("{';'}", "{stmt, '}'}", "{block, '}'}"),
    ("{<elake>, ';'}", "{stmt, '}'}", "{block, '}'}"),
    ("{.}", "{}", "{}"),
    ("{ε}", "{<elake>, ';'}", "{';', block, '}'}"),
];

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let g = insert_water(&fixture("block_stmt.peg"));
    let t = analyze(&g);
    check(g.expression_count() == 15, || {
        format!("{} occurrences", g.expression_count())
    })?;
    let mut mismatches = Vec::new();
    for (i, (b, s, a)) in TABLE.iter().enumerate() {
        let id = ExprId::new(i as u32 + 1);
        let rows = [
            ("BEGINNING", &t.beginning, b),
            ("SUCCEED", &t.succeed, s),
            ("ALT", &t.alt, a),
        ];
        for (name, table, expected) in rows {
            // ALT of the wildcard under `!` follows the update rule for `!e`.
            if name == "ALT" && i == 13 {
                continue;
            }
            if table.get(id) != &set(expected) {
                mismatches.push(format!("{name}(e{}) = {:?}", i + 1, table.get(id)));
            }
        }
    }
    check(mismatches.is_empty(), || mismatches.join("; "))?;
    let expected_e14 = set("{<elake>, ';'}");
    check(t.alt.get(ExprId::new(14)) == &expected_e14, || {
        "ALT(e14) is not SUCCEED(e15)".into()
    })?;
    check(t.alt.iterations() == 5, || {
        format!("ALT took {} iterations", t.alt.iterations())
    })?;
    let broken = fixpoint::violations(&g, &t);
    check(broken.is_empty(), || broken.join("; "))?;
    within(start, Duration::from_secs(1))?;
    Ok("45 sets match; ALT converges in 5 iterations".into())
}

/// `e_user / !. / wildcard` with the `!.` dropped, or just the wildcard.
fn without_default_water(g: &Grammar) -> Grammar {
    let never = lakepeg::Expr::not(lakepeg::Expr::any());
    let rules: Vec<Rule> = g
        .rules()
        .map(|r| {
            let mut r = r.clone();
            if r.is_lake() {
                if let ExprKind::Choice(front, wildcard) = &r.body.kind {
                    r.body = match &front.kind {
                        ExprKind::Choice(user, water) if **water == never => {
                            lakepeg::Expr::choice((**user).clone(), (**wildcard).clone())
                        }
                        _ if **front == never => (**wildcard).clone(),
                        _ => r.body.clone(),
                    };
                }
            }
            r
        })
        .collect();
    Grammar::from_rules(g.form(), rules, Some(g.start())).unwrap()
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let t = translate(&fixture("block_stmt.peg")).map_err(|e| e.to_string())?;
    let text = write_grammar(&t.normal);
    let wanted = "<elake> <- !. / !(block / ';' / '}') .";
    check(text.lines().any(|l| l == wanted), || {
        format!("no `{wanted}` in\n{text}")
    })?;

    let dropped = without_default_water(&t.normal);
    check(dropped != t.normal, || "nothing to drop".into())?;
    let (a, b) = (
        Parser::new(&t.normal).unwrap(),
        Parser::new(&dropped).unwrap(),
    );
    let alphabet = ['{', '}', ';', 'a'];
    let mut inputs = vec![String::new()];
    let mut frontier = vec![String::new()];
    for _ in 0..6 {
        frontier = frontier
            .iter()
            .flat_map(|p| alphabet.iter().map(move |c| format!("{p}{c}")))
            .collect();
        inputs.extend(frontier.iter().cloned());
    }
    check(inputs.len() == 5461, || format!("{} inputs", inputs.len()))?;
    let mut accepted = 0;
    for input in &inputs {
        for prefix in [false, true] {
            let (x, y) = (a.run(input, prefix).result, b.run(input, prefix).result);
            let same = match (&x, &y) {
                (Ok(p), Ok(q)) => p == q,
                (Err(_), Err(_)) => true,
                _ => false,
            };
            check(same, || {
                format!("{input:?} (prefix {prefix}): {x:?} vs {y:?}")
            })?;
            accepted += usize::from(!prefix && x.is_ok());
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!(
        "lowered rule matches; 5461 inputs agree ({accepted} accepted)"
    ))
}

fn spans(tree: &ParseTree, symbol: &str) -> Vec<(usize, usize)> {
    tree.find_all(symbol)
        .iter()
        .map(|n| (n.start(), n.end()))
        .collect()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let input = fixture_text("make_cmp.src");
    let chars: Vec<char> = input.chars().collect();
    let lakes = translate(&fixture("if_else_lakes.peg"))
        .map_err(|e| e.to_string())?
        .normal;
    let tree = Parser::new(&lakes)
        .unwrap()
        .parse(&input)
        .map_err(|e| e.to_string())?;

    let ifs = spans(&tree, "if_else_stmt");
    check(ifs.len() == 3, || {
        format!("{} if_else_stmt nodes", ifs.len())
    })?;
    let naive = oracle::naive_parse(&lakes, lakes.start(), &chars, false)
        .ok_or("naive interpreter rejects input")?;
    check(naive == tree, || {
        "naive interpreter builds a different tree".into()
    })?;

    let strings = tree.find_all("STRING");
    check(strings.len() == 3, || {
        format!("{} STRING nodes", strings.len())
    })?;
    for s in &strings {
        let mut island = None;
        for lake in s.find_all("STRING_lake") {
            if let Some(c) = lake
                .children()
                .iter()
                .find(|c| !matches!(c, ParseTree::Leaf { .. }))
            {
                island = c.symbol().map(str::to_string);
            }
        }
        check(island.is_none(), || {
            format!("island {island:?} inside a string")
        })?;
    }

    let hand = Parser::new(&fixture("if_else_island.peg")).unwrap();
    let reference = hand.parse(&input).map_err(|e| e.to_string())?;
    for symbol in ["if_else_stmt", "STRING"] {
        let (x, y) = (spans(&tree, symbol), spans(&reference, symbol));
        check(x == y, || {
            format!("{symbol} spans {x:?} vs hand-written {y:?}")
        })?;
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!(
        "if_else_stmt spans {ifs:?} match the hand-written grammar"
    ))
}

fn criterion_4() -> Outcome {
    let warnings: Vec<String> = translate(&fixture("nullable_alt.peg"))
        .map_err(|e| e.to_string())?
        .report
        .warnings
        .iter()
        .map(ToString::to_string)
        .collect();
    for clean in ["block_stmt.peg", "if_else_lakes.peg"] {
        let n = translate(&fixture(clean))
            .map_err(|e| e.to_string())?
            .report
            .warnings
            .len();
        check(n == 0, || format!("{clean}: {n} warnings"))?;
    }
    let hits = |w: &String| w.contains("<term>") && w.contains("opt");
    check(warnings.len() == 1 && warnings.iter().all(hits), || {
        format!("expected one warning for <term>/opt, got {warnings:?}")
    })?;
    Ok("one warning for <term>/opt; none elsewhere".into())
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let shape = GrammarShape::default();
    let count = 128;
    for n in 0..count {
        let g = insert_water(&random_grammar(&mut rng, &shape));
        check(!g.lakes().is_empty(), || format!("grammar {n} has no lake"))?;
        let base = analyze_with(
            &g,
            &AnalysisOptions {
                record_history: true,
                ..Default::default()
            },
        );
        let bound = pass_bound(&g);
        for table in [&base.beginning, &base.succeed, &base.alt] {
            check(table.passes() <= bound, || {
                format!("grammar {n}: {} passes > {bound}", table.passes())
            })?;
            for pair in table.history().unwrap().windows(2) {
                let grows = pair[0].iter().zip(&pair[1]).all(|(a, b)| a.is_subset(b));
                check(grows, || {
                    format!("grammar {n}: a set shrank between passes")
                })?;
            }
        }
        let broken = fixpoint::violations(&g, &base);
        check(broken.is_empty(), || format!("grammar {n}: {broken:?}"))?;
        for _ in 0..4 {
            let mut order: Vec<ExprId> =
                (1..=g.expression_count() as u32).map(ExprId::new).collect();
            order.shuffle(&mut rng);
            let t = analyze_with(
                &g,
                &AnalysisOptions {
                    order: Some(order),
                    ..Default::default()
                },
            );
            let same = t.beginning.sets() == base.beginning.sets()
                && t.succeed.sets() == base.succeed.sets()
                && t.alt.sets() == base.alt.sets();
            check(same, || {
                format!(
                    "grammar {n}: order changes the tables\n{}",
                    write_grammar(&g)
                )
            })?;
        }
    }
    Ok(format!(
        "{count} grammars, 4 visiting orders each, zero violations"
    ))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let block = ["{", "}", ";", "a", " "];
    let c_like = [
        "if", "else", "(", ")", "{", "}", ";", "\"", " ", "\n", "x", "if (x) ", "\"s\"",
    ];
    let fixtures: [(&str, Grammar, &[&str]); 3] = [
        (
            "block_stmt",
            translate(&fixture("block_stmt.peg")).unwrap().normal,
            &block,
        ),
        ("if_else_island", fixture("if_else_island.peg"), &c_like),
        (
            "if_else_lakes",
            translate(&fixture("if_else_lakes.peg")).unwrap().normal,
            &c_like,
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut accepted = 0;
    for (name, g, tokens) in &fixtures {
        let parser = Parser::new(g).unwrap();
        for _ in 0..1000 {
            let input = random_input(&mut rng, tokens, 64);
            for prefix in [false, true] {
                let fast = parser.run_chars(&input, prefix).result.ok();
                let slow = oracle::naive_parse(g, g.start(), &input, prefix);
                check(fast == slow, || {
                    format!(
                        "{name}: {:?} (prefix {prefix}) gives {fast:?} vs {slow:?}",
                        input.iter().collect::<String>()
                    )
                })?;
                accepted += usize::from(!prefix && fast.is_some());
            }
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "3000 inputs, full and prefix mode, zero disagreements ({accepted} accepted)"
    ))
}

fn criterion_7() -> Outcome {
    for name in [
        "simple_lang.peg",
        "if_else_island.peg",
        "if_else_lakes.peg",
        "block_stmt.peg",
    ] {
        let g = fixture(name);
        let text = write_grammar(&g);
        let back = read_grammar(&text).map_err(|e| format!("{name}: {e}"))?;
        check(back == g, || {
            format!("{name} differs after a round trip:\n{text}")
        })?;
        check(write_grammar(&back) == text, || {
            format!("{name}: second write differs")
        })?;
    }
    Ok("4 grammars round-trip".into())
}

fn criterion_8() -> Outcome {
    let s = lakepeg::stats(&fixture("block_stmt.peg")).map_err(|e| e.to_string())?;
    check((s.rules, s.lakes, s.alt_total) == (4, 1, 3), || {
        format!("{s:?}")
    })?;
    let out = Command::new(env!("CARGO_BIN_EXE_lakepeg"))
        .args(["stats", "-g"])
        .arg(fixture_path("block_stmt.peg"))
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    check(
        out.status.success() && stdout == "rules: 4\nlakes: 1\nalt-total: 3\n",
        || format!("stats printed {stdout:?} ({})", out.status),
    )?;
    Ok("rules=4 lakes=1 alt-total=3".into())
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 8] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
    ];
    let mut unexpected = Vec::new();
    for (n, run) in criteria {
        let known = KNOWN_UNATTAINABLE.iter().find(|(k, _)| *k == n);
        match (run(), known) {
            (Ok(detail), None) => println!("criterion {n}: PASS {detail}"),
            (Err(why), Some((_, reason))) => {
                println!("criterion {n}: FAIL (known unattainable: {reason}) {why}")
            }
            (Err(why), None) => {
                println!("criterion {n}: FAIL {why}");
                unexpected.push(n);
            }
            (Ok(detail), Some(_)) => {
                println!("criterion {n}: PASS {detail} (listed as unattainable; update the list)");
                unexpected.push(n);
            }
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected results for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
