//! Batch command-line surface over the library. Every command is a thin
//! wrapper: load inputs, call the one library function, print its result.

use crate::classes::{gen_random, ClassId, SizeSpec};
use crate::constructions::{build, schema, ConstructionKind};
use crate::decide::{
    decide_pi2, decide_pi2_in_class, search_counterexample, DecideOptions, Pi2Verdict,
};
use crate::formula::Formula;
use crate::interpret::{translate, translate_open, verify, VerifyOutcome, Witness};
use crate::parser::parse;
use crate::signature::Signature;
use crate::structure::{Assignment, FiniteStructure};
use crate::transform::classify;
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {{
        let _ = writeln!($out, $($arg)*);
    }};
}

#[derive(Parser)]
#[command(
    name = "fointerp",
    version,
    about = "First-order interpretations between classes of finite structures"
)]
struct Cli {
    /// Machine-readable JSON reports.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FormulaArgs {
    /// Formula text.
    #[arg(long, required_unless_present = "file", conflicts_with = "file")]
    formula: Option<String>,
    /// Read the formula from a file instead.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print the canonical form.
    Parse(FormulaArgs),
    /// Print the prefix class of a formula.
    Classify(FormulaArgs),
    /// Translate a source-signature sentence through a construction schema.
    Translate {
        #[arg(long, value_parser = parse_kind)]
        kind: ConstructionKind,
        #[command(flatten)]
        formula: FormulaArgs,
        /// Keep schema parameters free instead of closing them
        /// existentially.
        #[arg(long)]
        open: bool,
    },
    /// Build the canonical host structure for a source structure.
    Construct {
        #[arg(long, value_parser = parse_kind)]
        kind: ConstructionKind,
        /// Source structure JSON.
        #[arg(long)]
        input: PathBuf,
        /// Write the host structure JSON here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build a construction on a source structure and machine-check it.
    Verify {
        #[arg(long, value_parser = parse_kind)]
        kind: ConstructionKind,
        /// Source structure JSON.
        #[arg(long)]
        input: PathBuf,
        /// Host structure JSON; defaults to the canonical build.
        #[arg(long)]
        host: Option<PathBuf>,
        /// Parameter values as name=element pairs, comma separated.
        #[arg(long)]
        params: Option<String>,
    },
    /// Print the defining formulas of a construction.
    Schema {
        #[arg(long, value_parser = parse_kind)]
        kind: ConstructionKind,
        /// Write the schema JSON here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Decide a universal-existential sentence over all finite structures.
    DecidePi2 {
        #[command(flatten)]
        formula: FormulaArgs,
        /// Signature JSON, a relation-to-arity map; defaults to the
        /// relations the formula uses.
        #[arg(long)]
        sig: Option<PathBuf>,
    },
    /// Decide a universal-existential sentence over every member of a
    /// class.
    DecidePi2Class {
        /// Class axiom: 2eq, leq, graph, bigraph, or bigraph3.
        #[arg(long, value_parser = parse_class)]
        axiom: ClassId,
        #[command(flatten)]
        formula: FormulaArgs,
    },
    /// Exhaustively search a class for a member falsifying a sentence.
    Search {
        #[arg(long, value_parser = parse_class)]
        class: ClassId,
        #[command(flatten)]
        formula: FormulaArgs,
        /// Largest member size to try.
        #[arg(long)]
        max_size: usize,
        /// Refuse sizes with more than 2^this members.
        #[arg(long, default_value_t = 20)]
        cap_log2: u32,
    },
    /// Generate a random member of a class.
    Gen {
        #[arg(long, value_parser = parse_class)]
        class: ClassId,
        #[arg(long)]
        seed: u64,
        /// Carrier size (graph, 2eq, leq).
        #[arg(long)]
        size: Option<usize>,
        /// Left part size (bigraph, bigraph3).
        #[arg(long)]
        left: Option<usize>,
        /// Right part size (bigraph, bigraph3).
        #[arg(long)]
        right: Option<usize>,
        /// Edge probability, default 0.5.
        #[arg(long)]
        edge_prob: Option<f64>,
        /// Write the structure JSON here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Rebuild a construction on its reference example and print the
    /// resulting partitions or order.
    Demo {
        #[arg(long, value_parser = parse_kind)]
        kind: ConstructionKind,
    },
}

fn parse_kind(s: &str) -> Result<ConstructionKind, String> {
    ConstructionKind::from_cli_name(s).ok_or_else(|| {
        format!("unknown kind `{s}` (expected big2eq, big2eq-param, 2eq2leq, 2eq2leq-param)")
    })
}

fn parse_class(s: &str) -> Result<ClassId, String> {
    match s {
        "graph" => Ok(ClassId::SimpleGraph),
        "bigraph" => Ok(ClassId::BipartiteGraph),
        "bigraph3" => Ok(ClassId::BipartiteGraph3),
        "2eq" => Ok(ClassId::TwoEq),
        "leq" => Ok(ClassId::LEq),
        _ => Err(format!(
            "unknown class `{s}` (expected graph, bigraph, bigraph3, 2eq, leq)"
        )),
    }
}

/// Runs the command line against the given streams and returns the exit
/// code: 0 for success and valid/verified results, 1 for invalid or
/// failed-verification results, 2 for usage and input errors.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match dispatch(cli.command, cli.json, out) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            2
        }
    }
}

fn dispatch(command: Command, json: bool, out: &mut dyn Write) -> Result<i32, String> {
    match command {
        Command::Parse(args) => {
            let f = load_formula(&args)?;
            let free: Vec<String> = f.free_vars().into_iter().collect();
            if json {
                say!(
                    out,
                    "{}",
                    pretty(&json!({ "formula": f.to_string(), "free_vars": free }))
                );
            } else {
                say!(out, "{f}");
                if !free.is_empty() {
                    say!(out, "free: {}", free.join(", "));
                }
            }
            Ok(0)
        }
        Command::Classify(args) => {
            let f = load_formula(&args)?;
            let c = classify(&f);
            if json {
                say!(out, "{}", pretty(&json!({ "class": c })));
            } else {
                say!(out, "{c}");
            }
            Ok(0)
        }
        Command::Translate {
            kind,
            formula,
            open,
        } => {
            let sch = schema(kind);
            let f = load_formula(&formula)?;
            let t = if open {
                translate_open(&sch, &f)
            } else {
                translate(&sch, &f)
            }
            .map_err(|e| e.to_string())?;
            if json {
                say!(
                    out,
                    "{}",
                    pretty(&json!({ "formula": t.to_string(), "class": classify(&t) }))
                );
            } else {
                say!(out, "{t}");
            }
            Ok(0)
        }
        Command::Construct {
            kind,
            input,
            output,
        } => {
            let a = load_structure(&input)?;
            let w = build(kind, &a).map_err(|e| e.to_string())?;
            if let Some(path) = &output {
                write_file(path, &w.structure.to_json_string())?;
            }
            if json {
                say!(
                    out,
                    "{}",
                    pretty(&json!({
                        "host": w.structure.to_json_value(),
                        "params": &w.params,
                    }))
                );
            } else {
                say!(out, "host: {} elements", w.structure.size());
                if !w.params.is_empty() {
                    say!(out, "params: {}", params_text(&w));
                }
                if output.is_none() {
                    say!(out, "{}", w.structure.to_json_string());
                }
            }
            Ok(0)
        }
        Command::Verify {
            kind,
            input,
            host,
            params,
        } => {
            let a = load_structure(&input)?;
            let sch = schema(kind);
            let w = witness_for(kind, &a, host.as_deref(), params.as_deref())?;
            let outcome = verify(&sch, &a, &w).map_err(|e| e.to_string())?;
            report_verify(out, json, &outcome);
            Ok(if outcome.valid() { 0 } else { 1 })
        }
        Command::Schema { kind, output } => {
            let sch = schema(kind);
            if let Some(path) = &output {
                write_file(path, &sch.to_json_string())?;
            }
            if json {
                say!(out, "{}", sch.to_json_string());
            } else if let Some(path) = &output {
                say!(out, "wrote schema to {}", path.display());
            } else {
                say!(out, "{}", sch.render());
            }
            Ok(0)
        }
        Command::DecidePi2 { formula, sig } => {
            let f = load_formula(&formula)?;
            let signature = match &sig {
                Some(path) => load_signature(path)?,
                None => Signature::new(f.relation_uses()).map_err(|e| e.to_string())?,
            };
            let verdict =
                decide_pi2(&signature, &f, decide_options()?).map_err(|e| e.to_string())?;
            report_verdict(out, json, &verdict);
            Ok(if verdict.is_valid() { 0 } else { 1 })
        }
        Command::DecidePi2Class { axiom, formula } => {
            let f = load_formula(&formula)?;
            let verdict =
                decide_pi2_in_class(axiom, &f, decide_options()?).map_err(|e| e.to_string())?;
            report_verdict(out, json, &verdict);
            Ok(if verdict.is_valid() { 0 } else { 1 })
        }
        Command::Search {
            class,
            formula,
            max_size,
            cap_log2,
        } => {
            let f = load_formula(&formula)?;
            match search_counterexample(class, &f, max_size, cap_log2).map_err(|e| e.to_string())?
            {
                Some(s) => {
                    if json {
                        say!(
                            out,
                            "{}",
                            pretty(&json!({ "found": true, "counterexample": s.to_json_value() }))
                        );
                    } else {
                        say!(out, "counterexample with {} elements:", s.size());
                        say!(out, "{}", s.to_json_string());
                    }
                    Ok(1)
                }
                None => {
                    if json {
                        say!(out, "{}", pretty(&json!({ "found": false, "max_size": max_size })));
                    } else {
                        say!(out, "no counterexample up to size {max_size}");
                    }
                    Ok(0)
                }
            }
        }
        Command::Gen {
            class,
            seed,
            size,
            left,
            right,
            edge_prob,
            output,
        } => {
            let spec = size_spec(class, size, left, right, edge_prob)?;
            let s = gen_random(class, spec, seed).map_err(|e| e.to_string())?;
            if let Some(path) = &output {
                write_file(path, &s.to_json_string())?;
                if json {
                    say!(
                        out,
                        "{}",
                        pretty(&json!({ "size": s.size(), "path": path.display().to_string() }))
                    );
                } else {
                    say!(out, "wrote {} elements to {}", s.size(), path.display());
                }
            } else {
                say!(out, "{}", s.to_json_string());
            }
            Ok(0)
        }
        Command::Demo { kind } => {
            let a = demo_source(kind);
            let w = build(kind, &a).map_err(|e| e.to_string())?;
            if json {
                say!(
                    out,
                    "{}",
                    pretty(&json!({
                        "source": a.to_json_value(),
                        "host": w.structure.to_json_value(),
                        "params": &w.params,
                    }))
                );
            } else {
                match kind {
                    ConstructionKind::BipartiteInTwoEqWithParams
                    | ConstructionKind::BipartiteInTwoEq => demo_two_eq(out, &a, &w),
                    ConstructionKind::TwoEqInOrderWithParams
                    | ConstructionKind::TwoEqInOrder => demo_order(out, &a, &w),
                }
            }
            Ok(0)
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).unwrap()
}

fn load_formula(args: &FormulaArgs) -> Result<Formula, String> {
    let text = match (&args.formula, &args.file) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => read_file(p)?,
        (None, None) => return Err("one of --formula or --file is required".into()),
    };
    parse(text.trim()).map_err(|e| e.to_string())
}

fn read_file(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, content: &str) -> Result<(), String> {
    std::fs::write(path, content).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_structure(path: &Path) -> Result<FiniteStructure, String> {
    FiniteStructure::from_json_str(&read_file(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_signature(path: &Path) -> Result<Signature, String> {
    let map: BTreeMap<String, usize> = serde_json::from_str(&read_file(path)?)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    Signature::new(map).map_err(|e| e.to_string())
}

/// Enumeration slot cap for the deciders, overridable through the
/// FOINTERP_CAP environment variable.
fn decide_options() -> Result<DecideOptions, String> {
    let mut opts = DecideOptions::default();
    if let Ok(text) = std::env::var("FOINTERP_CAP") {
        opts.slot_cap = text
            .trim()
            .parse()
            .map_err(|_| format!("FOINTERP_CAP must be a slot count, got `{text}`"))?;
    }
    Ok(opts)
}

fn witness_for(
    kind: ConstructionKind,
    a: &FiniteStructure,
    host: Option<&Path>,
    params: Option<&str>,
) -> Result<Witness, String> {
    let mut w = match host {
        Some(path) => Witness::new(load_structure(path)?, Assignment::new()),
        None => build(kind, a).map_err(|e| e.to_string())?,
    };
    if let Some(text) = params {
        w.params = parse_params(text)?;
    }
    Ok(w)
}

fn parse_params(text: &str) -> Result<Assignment, String> {
    let mut out = Assignment::new();
    for piece in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = piece
            .split_once('=')
            .ok_or_else(|| format!("expected name=element, got `{piece}`"))?;
        let value: usize = value
            .trim()
            .parse()
            .map_err(|_| format!("element `{}` is not a number", value.trim()))?;
        out.insert(name.trim().to_string(), value);
    }
    Ok(out)
}

fn size_spec(
    class: ClassId,
    size: Option<usize>,
    left: Option<usize>,
    right: Option<usize>,
    edge_prob: Option<f64>,
) -> Result<SizeSpec, String> {
    let need = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| format!("{flag} is required for this class"))
    };
    Ok(match class {
        ClassId::SimpleGraph => SizeSpec::Graph {
            size: need(size, "--size")?,
            edge_prob: edge_prob.unwrap_or(0.5),
        },
        ClassId::BipartiteGraph | ClassId::BipartiteGraph3 => SizeSpec::Bipartite {
            left: need(left, "--left")?,
            right: need(right, "--right")?,
            edge_prob: edge_prob.unwrap_or(0.5),
        },
        ClassId::TwoEq | ClassId::LEq => SizeSpec::Elements(need(size, "--size")?),
        ClassId::All => return Err("gen needs a concrete class".into()),
    })
}

fn report_verify(out: &mut dyn Write, json: bool, outcome: &VerifyOutcome) {
    let r = &outcome.report;
    if json {
        let violations: Vec<_> = r
            .violations
            .iter()
            .map(|(label, tuple)| json!({ "formula": label, "tuple": tuple }))
            .collect();
        say!(
            out,
            "{}",
            pretty(&json!({
                "valid": outcome.valid(),
                "domain": &r.domain,
                "domain_nonempty": r.domain_nonempty,
                "complement_consistent": r.complement_consistent,
                "violations": violations,
                "bijection": &outcome.bijection,
            }))
        );
        return;
    }
    if r.domain_nonempty {
        say!(out, "condition 1 (non-empty domain): ok, {} elements", r.domain.len());
    } else {
        say!(out, "condition 1 (non-empty domain): FAILED, domain is empty");
    }
    if r.complement_consistent {
        say!(out, "condition 2 (complementary definitions): ok");
    } else {
        say!(
            out,
            "condition 2 (complementary definitions): FAILED, {} violations",
            r.violations.len()
        );
        for (label, tuple) in &r.violations {
            say!(out, "  {label} at {tuple:?}");
        }
    }
    match (&r.induced, &outcome.bijection) {
        (None, _) => say!(out, "condition 3 (isomorphism): skipped"),
        (Some(_), Some(_)) => say!(out, "condition 3 (isomorphism): ok"),
        (Some(_), None) => say!(
            out,
            "condition 3 (isomorphism): FAILED, induced structure is not isomorphic"
        ),
    }
    say!(out, "{}", if outcome.valid() { "verified" } else { "not verified" });
}

fn report_verdict(out: &mut dyn Write, json: bool, verdict: &Pi2Verdict) {
    if json {
        say!(out, "{}", verdict.to_json_string());
        return;
    }
    say!(out, "{}", verdict.outcome);
    if let Some(c) = &verdict.countermodel {
        say!(out, "countermodel with {} elements:", c.size());
        say!(out, "{}", c.to_json_string());
    }
}

fn label(s: &FiniteStructure, e: usize) -> String {
    s.name_of(e)
        .map(str::to_string)
        .unwrap_or_else(|| format!("#{e}"))
}

fn block_text(s: &FiniteStructure, block: &[usize]) -> String {
    let names: Vec<String> = block.iter().map(|&e| label(s, e)).collect();
    format!("{{{}}}", names.join(", "))
}

fn params_text(w: &Witness) -> String {
    w.params
        .iter()
        .map(|(name, &v)| format!("{name}={}", label(&w.structure, v)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn demo_source(kind: ConstructionKind) -> FiniteStructure {
    use crate::fixtures::{bipartite_2x2_matching, bipartite_3x3_diagonal, two_eq_two_by_two};
    match kind {
        ConstructionKind::BipartiteInTwoEqWithParams => bipartite_2x2_matching(),
        ConstructionKind::BipartiteInTwoEq => bipartite_3x3_diagonal(),
        ConstructionKind::TwoEqInOrderWithParams | ConstructionKind::TwoEqInOrder => {
            two_eq_two_by_two()
        }
    }
}

fn demo_two_eq(out: &mut dyn Write, a: &FiniteStructure, w: &Witness) {
    let b = &w.structure;
    say!(out, "source: bipartite graph with {} vertices", a.size());
    say!(out, "host: {} elements", b.size());
    for rel in ["P", "Q"] {
        let classes = b.equivalence_classes(rel).expect("host carries equivalences");
        say!(out, "{rel}-classes ({}):", classes.len());
        for class in &classes {
            say!(out, "  {}", block_text(b, class));
        }
    }
    if !w.params.is_empty() {
        say!(out, "params: {}", params_text(w));
    }
}

fn demo_order(out: &mut dyn Write, a: &FiniteStructure, w: &Witness) {
    let b = &w.structure;
    say!(out, "source: two equivalences on {} elements", a.size());
    say!(out, "host: {} elements", b.size());
    let chain: Vec<String> = (0..b.size()).map(|e| label(b, e)).collect();
    say!(out, "order: {}", chain.join(" < "));
    let classes = b.equivalence_classes("≈").expect("host carries an equivalence");
    say!(out, "≈-classes ({}):", classes.len());
    for class in &classes {
        say!(out, "  {}", block_text(b, class));
    }
    if !w.params.is_empty() {
        say!(out, "params: {}", params_text(w));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::validate;

    fn run_cli(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args.iter().copied(), &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    fn temp_path(stem: &str) -> PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("fointerp-test-{}-{stem}", std::process::id()));
        p
    }

    #[test]
    fn classify_prints_the_prefix_class() {
        let (code, out, _) = run_cli(&[
            "fointerp",
            "classify",
            "--formula",
            "exists x. forall y. E(x,y)",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "Sigma 2");
    }

    #[test]
    fn parse_prints_canonical_text_and_free_variables() {
        let (code, out, _) = run_cli(&["fointerp", "parse", "--formula", "E(x,y) & !E(y,x)"]);
        assert_eq!(code, 0);
        assert_eq!(out, "E(x,y) & !E(y,x)\nfree: x, y\n");
    }

    #[test]
    fn usage_errors_exit_two() {
        let (code, _, err) = run_cli(&["fointerp", "classify"]);
        assert_eq!(code, 2);
        assert!(!err.is_empty());
        let (code, _, _) = run_cli(&["fointerp", "no-such-command"]);
        assert_eq!(code, 2);
        let (code, _, err) = run_cli(&["fointerp", "classify", "--formula", "E(x"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_cli(&["fointerp", "--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("decide-pi2-class"));
    }

    #[test]
    fn class_decision_prints_valid() {
        let (code, out, _) = run_cli(&[
            "fointerp",
            "decide-pi2-class",
            "--axiom",
            "2eq",
            "--formula",
            "forall x. forall y. (P(x,y) -> P(y,x))",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().next(), Some("valid"));
    }

    #[test]
    fn invalid_sentences_exit_one_with_a_countermodel() {
        let (code, out, _) = run_cli(&[
            "fointerp",
            "decide-pi2",
            "--formula",
            "forall x. exists y. E(x,y)",
        ]);
        assert_eq!(code, 1);
        assert_eq!(out.lines().next(), Some("invalid"));
        assert!(out.contains("countermodel with 1 elements"));
    }

    #[test]
    fn decide_json_report_round_trips() {
        let (code, out, _) = run_cli(&[
            "fointerp",
            "decide-pi2",
            "--json",
            "--formula",
            "forall x. exists y. E(x,y)",
        ]);
        assert_eq!(code, 1);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["outcome"], "invalid");
        let c = FiniteStructure::from_json_str(&v["countermodel"].to_string()).unwrap();
        assert_eq!(c.size(), 1);
    }

    #[test]
    fn verify_round_trip_exits_zero() {
        let input = temp_path("verify-in.json");
        std::fs::write(
            &input,
            crate::fixtures::bipartite_2x2_matching().to_json_string(),
        )
        .unwrap();
        let (code, out, _) = run_cli(&[
            "fointerp",
            "verify",
            "--kind",
            "big2eq-param",
            "--input",
            input.to_str().unwrap(),
        ]);
        std::fs::remove_file(&input).ok();
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("verified"));
    }

    #[test]
    fn verify_with_broken_params_exits_one() {
        let input = temp_path("verify-broken.json");
        std::fs::write(
            &input,
            crate::fixtures::two_eq_two_by_two().to_json_string(),
        )
        .unwrap();
        // The anchor parameter moved to a rank below every fenced block,
        // so the domain formula picks out nothing.
        let (code, out, _) = run_cli(&[
            "fointerp",
            "verify",
            "--kind",
            "2eq2leq-param",
            "--input",
            input.to_str().unwrap(),
            "--params",
            "y=0",
        ]);
        std::fs::remove_file(&input).ok();
        assert_eq!(code, 1, "{out}");
        assert!(out.contains("condition 1"));
        assert!(out.contains("FAILED"));
    }

    #[test]
    fn construct_writes_the_host_file() {
        let input = temp_path("construct-in.json");
        let output = temp_path("construct-out.json");
        std::fs::write(
            &input,
            crate::fixtures::two_eq_two_by_two().to_json_string(),
        )
        .unwrap();
        let (code, out, _) = run_cli(&[
            "fointerp",
            "construct",
            "--kind",
            "2eq2leq-param",
            "--input",
            input.to_str().unwrap(),
            "--output",
            output.to_str().unwrap(),
        ]);
        let host = FiniteStructure::from_json_str(&std::fs::read_to_string(&output).unwrap())
            .unwrap();
        std::fs::remove_file(&input).ok();
        std::fs::remove_file(&output).ok();
        assert_eq!(code, 0);
        assert_eq!(host.size(), 11);
        assert!(out.contains("params: y=astar"));
    }

    #[test]
    fn gen_emits_a_validating_member() {
        let (code, out, _) = run_cli(&[
            "fointerp", "gen", "--class", "2eq", "--seed", "7", "--size", "5",
        ]);
        assert_eq!(code, 0);
        let s = FiniteStructure::from_json_str(&out).unwrap();
        assert_eq!(s.size(), 5);
        assert!(validate(ClassId::TwoEq, &s).unwrap());
        let missing = run_cli(&["fointerp", "gen", "--class", "2eq", "--seed", "7"]);
        assert_eq!(missing.0, 2);
    }

    #[test]
    fn schema_json_round_trips() {
        let (code, out, _) = run_cli(&["fointerp", "schema", "--kind", "big2eq", "--json"]);
        assert_eq!(code, 0);
        let sch = crate::interpret::InterpretationSchema::from_json_str(&out).unwrap();
        assert_eq!(sch, schema(ConstructionKind::BipartiteInTwoEq));
    }

    #[test]
    fn translate_prints_a_parseable_sentence() {
        let (code, out, _) = run_cli(&[
            "fointerp",
            "translate",
            "--kind",
            "2eq2leq-param",
            "--formula",
            "exists x1. P(x1,x1)",
        ]);
        assert_eq!(code, 0);
        let t = parse(out.trim()).unwrap();
        assert!(t.free_vars().is_empty());
        assert!(classify(&t).within_sigma(1));
    }

    #[test]
    fn search_finds_and_reports_counterexamples() {
        let (code, out, _) = run_cli(&[
            "fointerp",
            "search",
            "--class",
            "2eq",
            "--formula",
            "forall x. exists y. (P(x,y) & !(x = y))",
            "--max-size",
            "2",
        ]);
        assert_eq!(code, 1);
        assert!(out.contains("counterexample with 1 elements"));
        let (code, out, _) = run_cli(&[
            "fointerp",
            "search",
            "--class",
            "2eq",
            "--formula",
            "forall x. P(x,x)",
            "--max-size",
            "3",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("no counterexample up to size 3"));
    }

    #[test]
    fn demo_order_chain_puts_the_anchor_after_the_rank_stubs() {
        let (code, out, _) = run_cli(&["fointerp", "demo", "--kind", "2eq2leq-param"]);
        assert_eq!(code, 0);
        assert!(out.contains("order: s0_1 < s0_2 < astar < s1_1"), "{out}");
        let (code, out, _) = run_cli(&["fointerp", "demo", "--kind", "2eq2leq"]);
        assert_eq!(code, 0);
        assert!(out.contains("c1 < c2 < c3 < c4"), "{out}");
    }

    #[test]
    fn demo_partitions_match_the_reference_example() {
        let (code, out, _) = run_cli(&["fointerp", "demo", "--kind", "big2eq-param"]);
        assert_eq!(code, 0);
        assert!(out.contains("P-classes (8):"), "{out}");
        assert!(out.contains("Q-classes (8):"), "{out}");
        assert!(out.contains("params: yL=cL yN=cN yP=cP yR=cR"), "{out}");
    }

    #[test]
    fn cap_override_is_read_from_the_environment() {
        std::env::set_var("FOINTERP_CAP", "0");
        let (code, out, _) = run_cli(&[
            "fointerp",
            "decide-pi2",
            "--formula",
            "forall x. exists y. x = y",
        ]);
        std::env::remove_var("FOINTERP_CAP");
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "valid");

        std::env::set_var("FOINTERP_CAP", "nonsense");
        let (code, _, err) = run_cli(&[
            "fointerp",
            "decide-pi2",
            "--formula",
            "forall x. exists y. x = y",
        ]);
        std::env::remove_var("FOINTERP_CAP");
        assert_eq!(code, 2);
        assert!(err.contains("FOINTERP_CAP"));
    }
}
