//! `tensorgram`: batch front end over the core library.
//!
//! Exit status: 0 success or derivable, 1 not derivable or not in the
//! language, 2 usage or format error, 3 inconclusive within the budget.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tensorgram::engine::{
    enumerate, generates, joined, recheck, translate, Grammar, ParseOutcome, Source,
};
use tensorgram::ettc::ext_prove;
use tensorgram::lambda_acg::parse_acg;
use tensorgram::lambek::{lambek_cycle, lc_prove, mode_for, parse_lambek_sequent, parse_lexicon};
use tensorgram::selftest::{criterion, CRITERIA};
use tensorgram::syntax::{judgement, parse_grammar, parse_script, ParseError};
use tensorgram::term::Word;
use tensorgram::ttc::{build_from_script, check, Budget, Derivation, Judgement, Mode};

#[derive(Parser)]
#[command(
    name = "tensorgram",
    version,
    about = "Tensor grammars: parsing, proof search, translations"
)]
struct Cli {
    /// Output format; `json` prints one JSON object per invocation.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SourceKind {
    Acg,
    Lambek,
}

#[derive(Subcommand)]
enum Command {
    /// Re-checks a derivation script against a grammar's axioms.
    Check {
        derivation: PathBuf,
        #[arg(long)]
        grammar: PathBuf,
        /// Also require the conclusion to be the goal for this sentence.
        #[arg(long)]
        sentence: Option<String>,
    },
    /// Parses a sentence; prints the derivation script or NOT-IN-LANGUAGE.
    Parse {
        grammar: PathBuf,
        sentence: String,
        /// Cap on axiom instances (default: the sentence length).
        #[arg(long)]
        max_axioms: Option<usize>,
    },
    /// Lists the words of the language up to a length.
    Enumerate {
        grammar: PathBuf,
        #[arg(long)]
        max_len: usize,
    },
    /// Translates an ACG or a Lambek lexicon into a tensor grammar file.
    Translate {
        #[arg(long, value_enum)]
        from: SourceKind,
        source: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Cut-free proof search for a judgement, or for a Lambek sequent
    /// through its cycle.
    Prove {
        /// Judgement text or a file holding it.
        judgement: String,
        /// Forbid empty antecedents.
        #[arg(long)]
        lambek_restriction: bool,
        /// Read the input as a Lambek sequent `A1, A2 |- B`.
        #[arg(long)]
        lambek: bool,
    },
    /// Rewrites every axiom into a lexical one and prints the grammar.
    Lexicalize {
        grammar: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Writes the term of a judgement as a Graphviz digraph.
    Graph {
        /// Judgement text or a file holding it.
        judgement: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Runs the differential suites behind the acceptance criteria.
    Selftest {
        /// Run only this criterion (1 to 8).
        #[arg(long)]
        criterion: Option<usize>,
    },
}

enum Failure {
    /// Bad input: exit 2.
    Input(String),
    /// Not derivable, not in the language, or a failed check: exit 1.
    Negative(Value, String),
    /// Budget exhausted: exit 3.
    Inconclusive(Value, String),
}

type Outcome = Result<(Value, String), Failure>;

fn at(path: &Path, e: &ParseError) -> String {
    match e {
        ParseError::At { line, col, msg } => format!("{}:{line}:{col}: {msg}", path.display()),
        ParseError::Line { line, msg } => format!("{}:{line}: {msg}", path.display()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Judgement arguments may name a file.
fn text_or_file(arg: &str) -> Result<(String, PathBuf), Failure> {
    let p = PathBuf::from(arg);
    if p.is_file() {
        Ok((read(&p)?.trim().to_string(), p))
    } else {
        Ok((arg.to_string(), PathBuf::from("<argument>")))
    }
}

/// Grammar by extension: `.acg` and `.lex` are translated on load.
fn load_grammar(path: &Path) -> Result<Grammar, Failure> {
    let src = read(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("acg") | Some("lex") => Ok(translate(&load_source(path, &src)?)
            .map_err(|e| Failure::Input(e.to_string()))?
            .grammar),
        _ => parse_grammar(&src).map_err(|e| Failure::Input(at(path, &e))),
    }
}

fn load_source(path: &Path, src: &str) -> Result<Source, Failure> {
    if path.extension().and_then(|e| e.to_str()) == Some("acg") {
        parse_acg(src)
            .map(Source::Acg)
            .map_err(|e| Failure::Input(at(path, &e)))
    } else {
        parse_lexicon(src)
            .map(Source::Lambek)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }
}

fn script_lines(d: &Derivation) -> Vec<String> {
    d.to_script().lines().map(str::to_string).collect()
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Check {
            derivation,
            grammar,
            sentence,
        } => {
            let g = load_grammar(grammar)?;
            let src = read(derivation)?;
            let steps = parse_script(&src).map_err(|e| Failure::Input(at(derivation, &e)))?;
            let d = match build_from_script(&steps, &g.pool(), g.mode) {
                Ok(d) => d,
                Err(e) => {
                    return Err(Failure::Negative(
                        json!({ "valid": false, "error": e.to_string() }),
                        format!("INVALID: {e}"),
                    ))
                }
            };
            let concl = check(&d, &g.pool(), g.mode).map_err(|e| {
                Failure::Negative(
                    json!({ "valid": false, "error": e.to_string() }),
                    format!("INVALID: {e}"),
                )
            })?;
            if let Some(s) = sentence {
                let w = Word::parse(s);
                if let Err(e) = recheck(&g, &w, &d) {
                    let msg = format!("conclusion {concl} is not the goal for {s:?}: {e}");
                    return Err(Failure::Negative(
                        json!({ "valid": false, "conclusion": concl.to_string(), "error": msg }),
                        format!("INVALID: {msg}"),
                    ));
                }
            }
            Ok((
                json!({ "valid": true, "conclusion": concl.to_string(), "steps": steps.len() }),
                format!("OK {concl}"),
            ))
        }
        Command::Parse {
            grammar,
            sentence,
            max_axioms,
        } => {
            let g = load_grammar(grammar)?;
            let budget = Budget {
                max_axioms: *max_axioms,
                ..Budget::default()
            };
            let w = Word::parse(sentence);
            match generates(&g, &w, &budget).map_err(|e| Failure::Input(e.to_string()))? {
                ParseOutcome::Parsed(p) => {
                    let lines = script_lines(&p.derivation);
                    let concl = p.derivation.conclusion.to_string();
                    let mut text = format!("# sentence: {sentence}\n# conclusion: {concl}\n");
                    for l in &lines {
                        let _ = writeln!(text, "{l}");
                    }
                    let v = json!({ "status": "parsed", "sentence": sentence, "conclusion": concl, "axioms_used": p.axioms_used, "derivation": lines });
                    Ok((v, text.trim_end().to_string()))
                }
                ParseOutcome::NotInLanguage => Err(Failure::Negative(
                    json!({ "status": "not-in-language", "sentence": sentence }),
                    "NOT-IN-LANGUAGE".into(),
                )),
                ParseOutcome::Inconclusive(m) => Err(Failure::Inconclusive(
                    json!({ "status": "inconclusive", "sentence": sentence, "reason": m }),
                    format!("INCONCLUSIVE: {m}"),
                )),
            }
        }
        Command::Enumerate { grammar, max_len } => {
            let g = load_grammar(grammar)?;
            let e = enumerate(&g, *max_len, &Budget::default())
                .map_err(|e| Failure::Input(e.to_string()))?;
            let words: Vec<String> = joined(&e.words).into_iter().collect();
            let open: Vec<String> = joined(&e.inconclusive).into_iter().collect();
            let mut text = words.join("\n");
            for w in &open {
                let _ = write!(text, "\n# inconclusive: {w}");
            }
            let v = json!({ "max_len": max_len, "words": words, "inconclusive": open });
            if open.is_empty() {
                Ok((v, text))
            } else {
                Err(Failure::Inconclusive(v, text))
            }
        }
        Command::Translate {
            from,
            source,
            output,
        } => {
            let src = read(source)?;
            let parsed = match from {
                SourceKind::Acg => parse_acg(&src)
                    .map(Source::Acg)
                    .map_err(|e| Failure::Input(at(source, &e)))?,
                SourceKind::Lambek => parse_lexicon(&src)
                    .map(Source::Lambek)
                    .map_err(|e| Failure::Input(format!("{}: {e}", source.display())))?,
            };
            let t = translate(&parsed).map_err(|e| Failure::Input(e.to_string()))?;
            let text = format!(
                "# {} ({})\n{}",
                t.provenance,
                source.display(),
                t.grammar.to_text()
            );
            fs::write(output, &text)
                .map_err(|e| Failure::Input(format!("{}: {e}", output.display())))?;
            let v = json!({ "output": output.display().to_string(), "provenance": t.provenance, "axioms": t.grammar.axioms.len() });
            Ok((v, format!("wrote {} ({})", output.display(), t.provenance)))
        }
        Command::Prove {
            judgement: arg,
            lambek_restriction,
            lambek,
        } => {
            let (src, path) = text_or_file(arg)?;
            let mode = mode_for(*lambek_restriction);
            let as_tensor = if *lambek { None } else { judgement(&src).ok() };
            let (goal, lc): (Judgement, Option<bool>) = match as_tensor {
                Some(j) => (j, None),
                None => {
                    let s = parse_lambek_sequent(&src).map_err(|e| {
                        Failure::Input(format!(
                            "{}: not a judgement or Lambek sequent: {e}",
                            path.display()
                        ))
                    })?;
                    (
                        lambek_cycle(&s),
                        Some(lc_prove(&s, *lambek_restriction).is_some()),
                    )
                }
            };
            let mode_name = if mode == Mode::LambekRestricted {
                "restricted"
            } else {
                "full"
            };
            match ext_prove(&goal, mode) {
                Some(d) => {
                    let lines = script_lines(&d);
                    let v = json!({ "derivable": true, "mode": mode_name, "goal": goal.to_string(), "lambek": lc, "derivation": lines });
                    Ok((v, format!("# goal: {goal}\n{}", lines.join("\n"))))
                }
                None => Err(Failure::Negative(
                    json!({ "derivable": false, "mode": mode_name, "goal": goal.to_string(), "lambek": lc }),
                    "NOT-DERIVABLE".into(),
                )),
            }
        }
        Command::Lexicalize { grammar, output } => {
            let g = load_grammar(grammar)?;
            let l = g.lexicalized().map_err(|e| Failure::Input(e.to_string()))?;
            let text = format!("# lexicalized from {}\n{}", grammar.display(), l.to_text());
            match output {
                Some(o) => {
                    fs::write(o, &text)
                        .map_err(|e| Failure::Input(format!("{}: {e}", o.display())))?;
                    Ok((
                        json!({ "output": o.display().to_string(), "grammar": text }),
                        format!("wrote {}", o.display()),
                    ))
                }
                None => Ok((json!({ "grammar": text }), text.trim_end().to_string())),
            }
        }
        Command::Graph {
            judgement: arg,
            output,
        } => {
            let (src, path) = text_or_file(arg)?;
            let j = judgement(&src).map_err(|e| Failure::Input(at(&path, &e)))?;
            let order: Vec<_> = j.types.iter().flat_map(|t| t.reading_order()).collect();
            let mut dot = String::new();
            for (k, t) in j.types.iter().enumerate() {
                let _ = writeln!(dot, "// member {k}: {t}");
            }
            dot.push_str(
                &j.term
                    .to_graph_text(&order)
                    .map_err(|e| Failure::Input(e.to_string()))?,
            );
            fs::write(output, &dot)
                .map_err(|e| Failure::Input(format!("{}: {e}", output.display())))?;
            Ok((
                json!({ "output": output.display().to_string(), "vertices": order.len(), "edges": j.term.edge_count() }),
                format!("wrote {}", output.display()),
            ))
        }
        Command::Selftest { criterion: only } => {
            let which: Vec<usize> = match only {
                Some(n) if (1..=CRITERIA).contains(n) => vec![*n],
                Some(n) => {
                    return Err(Failure::Input(format!(
                        "no criterion {n}; there are {CRITERIA}"
                    )))
                }
                None => (1..=CRITERIA).collect(),
            };
            let results: Vec<_> = which.into_iter().map(criterion).collect();
            let mut text = String::new();
            for c in &results {
                let _ = writeln!(text, "{}", c.line());
                for e in &c.report.examples {
                    let _ = writeln!(text, "    {e}");
                }
            }
            let ok = results.iter().all(|c| c.passed());
            let v = json!({ "passed": ok, "criteria": results.iter().map(|c| {
                let mut v = serde_json::to_value(c).unwrap_or(Value::Null);
                v["passed"] = json!(c.passed());
                v
            }).collect::<Vec<_>>() });
            if ok {
                Ok((v, text.trim_end().to_string()))
            } else {
                Err(Failure::Negative(v, text.trim_end().to_string()))
            }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Parse { .. } => "parse",
        Command::Enumerate { .. } => "enumerate",
        Command::Translate { .. } => "translate",
        Command::Prove { .. } => "prove",
        Command::Lexicalize { .. } => "lexicalize",
        Command::Graph { .. } => "graph",
        Command::Selftest { .. } => "selftest",
    }
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn out(s: &str) {
    use std::io::Write;
    let mut o = std::io::stdout().lock();
    let _ = writeln!(o, "{s}");
}

fn emit(cli: &Cli, mut v: Value, text: &str) {
    match cli.format {
        Format::Text => {
            if !text.is_empty() {
                out(text);
            }
        }
        Format::Json => {
            if let Value::Object(m) = &mut v {
                m.insert("command".into(), json!(command_name(&cli.command)));
            }
            out(&serde_json::to_string_pretty(&v).unwrap_or_default());
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((v, text)) => {
            emit(&cli, v, &text);
            ExitCode::SUCCESS
        }
        Err(Failure::Negative(v, text)) => {
            emit(&cli, v, &text);
            ExitCode::from(1)
        }
        Err(Failure::Inconclusive(v, text)) => {
            emit(&cli, v, &text);
            ExitCode::from(3)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            if cli.format == Format::Json {
                out(&json!({ "command": command_name(&cli.command), "error": msg }).to_string());
            }
            ExitCode::from(2)
        }
    }
}
