//! `tdesc`: compute planar tropical descendant invariants from the command line.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use tropdesc::cache::{CacheEntry, CacheError, CacheFile, EngineTag, TableProvider, CACHE_ENV};
use tropdesc::enumerate::{evaluate_by_types, evaluate_seeded, OracleError, OracleOptions, OracleProvider};
use tropdesc::family::{first_descendant_family, reachable_family, sweep_family};
use tropdesc::par::Execution;
use tropdesc::recursion::{Engine, EngineError, TraceNode};
use tropdesc::sweep::equivalence_sweep;
use tropdesc::{classify, format_value, parse_invariant, Invariant, InvariantShape, Value};

const PARSE: u8 = 2;
const DIMENSION: u8 = 3;
const UNSUPPORTED: u8 = 4;
const BASE: u8 = 5;
const MISMATCH: u8 = 6;
const OTHER: u8 = 1;

#[derive(Parser)]
#[command(name = "tdesc", version, about = "Exact planar tropical descendant invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Value by the recursion engine.
    Compute {
        expr: String,
        /// `oracle`, `table` (the cache file) or `table:FILE`.
        #[arg(long, default_value = "oracle")]
        base: String,
        /// Seed for oracle base values.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
        /// Record results in this cache file.
        #[arg(long, env = CACHE_ENV)]
        cache: Option<PathBuf>,
    },
    /// Value by counting curves through a random configuration.
    Enumerate {
        expr: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the solved curves as JSON.
        #[arg(long)]
        dump_curves: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long, env = CACHE_ENV)]
        cache: Option<PathBuf>,
    },
    /// Compare both engines and the oracle across seeds.
    Verify {
        #[arg(long, default_value_t = 2)]
        max_degree: u32,
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long, default_value_t = 7)]
        max_insertions: usize,
        /// `sweep`, `first` (free psi at most 1) or `reachable`.
        #[arg(long, default_value = "sweep")]
        family: String,
        /// List every failure instead of the first few.
        #[arg(long)]
        all: bool,
    },
    /// Values of a whole family.
    Table {
        #[arg(long, default_value_t = 2)]
        degree: u32,
        /// `sweep[:N]`, `first[:N]`, `reachable[:N]`, `base[:N]` or `file:PATH`.
        #[arg(long, default_value = "sweep")]
        family: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format; inferred from the extension of `--out` when omitted.
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, default_value_t = 1)]
        seeds: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Cache,
}

struct Failure {
    code: u8,
    message: String,
}

type Run = Result<(), Failure>;

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute { expr, base, seed, trace, json, cache } => compute(&expr, &base, seed, trace, json, cache),
        Command::Enumerate { expr, seed, dump_curves, json, cache } => enumerate(&expr, seed, dump_curves, json, cache),
        Command::Verify { max_degree, seeds, max_insertions, family, all } => {
            verify(max_degree, seeds, max_insertions, &family, all)
        }
        Command::Table { degree, family, out, format, seeds } => table(degree, &family, out, format, seeds),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("tdesc: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn parse(expr: &str) -> Result<Invariant, Failure> {
    parse_invariant(expr).map_err(|e| fail(PARSE, format!("cannot parse {expr:?}: {e}")))
}

fn engine_failure(e: EngineError) -> Failure {
    let code = match e {
        EngineError::DimensionInvalid(..) => DIMENSION,
        EngineError::Unsupported(_) => UNSUPPORTED,
        EngineError::BaseUnavailable(_) => BASE,
        EngineError::Cycle(_) => OTHER,
    };
    fail(code, e.to_string())
}

fn oracle_failure(e: OracleError) -> Failure {
    let code = match e {
        OracleError::DimensionInvalid(..) => DIMENSION,
        OracleError::Unsupported(_) | OracleError::DegreeTooHigh { .. } => UNSUPPORTED,
        _ => OTHER,
    };
    fail(code, e.to_string())
}

fn cache_failure(path: &Path, e: CacheError) -> Failure {
    let code = if matches!(e, CacheError::Conflicts(_)) { MISMATCH } else { OTHER };
    fail(code, format!("{}: {e}", path.display()))
}

fn load_table(path: &Path) -> Result<CacheFile, Failure> {
    CacheFile::load(path).map_err(|e| cache_failure(path, e))
}

fn record(path: Option<&Path>, entries: Vec<(Invariant, CacheEntry)>) -> Run {
    let Some(path) = path else { return Ok(()) };
    let mut file = CacheFile::load_or_new(path).map_err(|e| cache_failure(path, e))?;
    let mut conflicts = Vec::new();
    for (inv, entry) in entries {
        if let Err(c) = file.insert(inv, entry) {
            conflicts.push(*c);
        }
    }
    if !conflicts.is_empty() {
        return Err(cache_failure(path, CacheError::Conflicts(conflicts)));
    }
    file.save(path).map_err(|e| cache_failure(path, e))
}

fn compute(expr: &str, base: &str, seed: u64, trace: bool, as_json: bool, cache: Option<PathBuf>) -> Run {
    let inv = parse(expr)?;
    let table_path = match base {
        "oracle" => None,
        "table" => Some(
            cache
                .clone()
                .ok_or_else(|| fail(BASE, format!("--base table needs a file: use table:FILE or set {CACHE_ENV}")))?,
        ),
        other => match other.strip_prefix("table:") {
            Some(p) => Some(PathBuf::from(p)),
            None => return Err(fail(PARSE, format!("unknown base {other:?}, expected oracle, table or table:FILE"))),
        },
    };
    match table_path {
        None => {
            let engine = Engine::new(OracleProvider::new(seed));
            let (value, node) = engine.reduce(&inv).map_err(engine_failure)?;
            emit_compute(&inv, &value, &node, "oracle", trace, as_json);
            let entries = engine
                .cache()
                .entries()
                .into_iter()
                .map(|(i, v)| {
                    let engine = if is_base(&i) { EngineTag::Oracle } else { EngineTag::Recursion };
                    (i, CacheEntry { value: v, engine, seeds: vec![seed] })
                })
                .collect();
            record(cache.as_deref(), entries)
        }
        Some(path) => {
            let table = load_table(&path)?;
            let engine = Engine::new(TableProvider::new(table));
            let (value, node) = engine.reduce(&inv).map_err(engine_failure)?;
            cross_check(&engine, &path)?;
            emit_compute(&inv, &value, &node, "table", trace, as_json);
            Ok(())
        }
    }
}

fn is_base(inv: &Invariant) -> bool {
    classify(inv) == Ok(InvariantShape::PureTauPoint)
}

/// Every value the engine derived must agree with the table's entry for it.
fn cross_check(engine: &Engine<TableProvider>, path: &Path) -> Run {
    let table = &engine.provider().table;
    let mut bad = Vec::new();
    for (inv, value) in engine.cache().entries() {
        if let Some(entry) = table.get(&inv) {
            if entry.value != value {
                bad.push(format!(
                    "{inv}: table {} ({}) but derived {}",
                    format_value(&entry.value),
                    entry.engine,
                    format_value(&value)
                ));
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(fail(MISMATCH, format!("{} disagrees with the recursion: {}", path.display(), bad.join("; "))))
    }
}

fn emit_compute(inv: &Invariant, value: &Value, node: &TraceNode, base: &str, trace: bool, as_json: bool) {
    if as_json {
        let mut out = json!({ "invariant": inv.to_string(), "value": format_value(value), "base": base });
        if trace {
            out["trace"] = node.to_json();
        }
        println!("{}", serde_json::to_string_pretty(&out).expect("json"));
        return;
    }
    println!("{}", format_value(value));
    if trace {
        let mut text = String::new();
        render(node, 0, &mut HashSet::new(), &mut text);
        print!("{text}");
    }
}

/// Indented derivation; repeated subtrees are printed once.
fn render(node: &TraceNode, depth: usize, seen: &mut HashSet<Invariant>, out: &mut String) {
    let pad = "  ".repeat(depth);
    let rule = node.rule.name();
    match &node.invariant {
        Some(inv) => {
            let repeat = !node.children.is_empty() && !seen.insert(inv.clone());
            let _ = writeln!(
                out,
                "{pad}{inv} = {}  [{rule}{}]",
                format_value(&node.value),
                if repeat { ", above" } else { "" }
            );
            if repeat {
                return;
            }
        }
        None => {
            let _ = writeln!(out, "{pad}{} x product = {}", format_value(&node.coefficient), format_value(&node.value));
        }
    }
    for c in &node.children {
        render(c, depth + 1, seen, out);
    }
}

fn enumerate(expr: &str, seed: u64, dump: Option<PathBuf>, as_json: bool, cache: Option<PathBuf>) -> Run {
    let inv = parse(expr)?;
    if let Ok(InvariantShape::DimensionInvalid) = classify(&inv) {
        return Err(fail(DIMENSION, format!("{inv} is not zero-dimensional (balance {})", inv.dimension_balance())));
    }
    let opts = OracleOptions::default();
    let (value, config) = evaluate_seeded(&inv, seed, &opts).map_err(oracle_failure)?;
    let mut curves = None;
    if let Some(path) = &dump {
        let (by_types, solved) = evaluate_by_types(&inv, &config, &opts).map_err(oracle_failure)?;
        if by_types != value {
            return Err(fail(
                MISMATCH,
                format!("type sum {} differs from the search {}", format_value(&by_types), format_value(&value)),
            ));
        }
        let list: Vec<_> = solved.iter().map(|c| c.to_json()).collect();
        std::fs::write(path, serde_json::to_string_pretty(&list).expect("json"))
            .map_err(|e| fail(OTHER, format!("{}: {e}", path.display())))?;
        curves = Some(solved.len());
    }
    if as_json {
        let mut out = json!({
            "invariant": inv.to_string(),
            "value": format_value(&value),
            "seed": seed,
            "configuration": serde_json::to_value(&config).expect("json"),
        });
        if let Some(n) = curves {
            out["curves"] = n.into();
        }
        println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    } else {
        println!("{}", format_value(&value));
    }
    record(cache.as_deref(), vec![(inv, CacheEntry { value, engine: EngineTag::Oracle, seeds: vec![seed] })])
}

fn verify(max_degree: u32, seeds: u64, max_insertions: usize, family: &str, all: bool) -> Run {
    if seeds == 0 {
        return Err(fail(PARSE, "--seeds must be at least 1"));
    }
    if max_degree > OracleOptions::default().max_degree {
        return Err(fail(
            UNSUPPORTED,
            format!("the oracle enumerates degree at most {}", OracleOptions::default().max_degree),
        ));
    }
    let fam = match family {
        "sweep" => sweep_family(max_degree, max_insertions),
        "first" => first_descendant_family(max_degree, max_insertions),
        "reachable" => reachable_family(max_degree, max_insertions),
        other => return Err(fail(PARSE, format!("unknown family {other:?}, expected sweep, first or reachable"))),
    };
    let seed_list: Vec<u64> = (1..=seeds).collect();
    let report = equivalence_sweep(&fam, &seed_list, Execution::default());
    println!(
        "{} invariants, seeds 1..={seeds}: {} equal, {} outside the rules, {} value mismatches, {} seed dependent",
        fam.len(),
        report.equal(),
        report.outside_rules(),
        report.value_mismatches(),
        report.seed_dependent()
    );
    let failures: Vec<_> = report.failures().collect();
    let shown = if all { failures.len() } else { failures.len().min(10) };
    for (inv, outcome) in &failures[..shown] {
        eprintln!("{inv}: {}", outcome.describe());
    }
    if shown < failures.len() {
        eprintln!("... {} more (--all lists them)", failures.len() - shown);
    }
    if report.holds() {
        Ok(())
    } else {
        Err(fail(MISMATCH, format!("engine equivalence fails on {} invariants", failures.len())))
    }
}

fn family_from_spec(spec: &str, degree: u32) -> Result<Vec<Invariant>, Failure> {
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path).map_err(|e| fail(OTHER, format!("{path}: {e}")))?;
        let mut out = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            out.push(parse(line)?);
        }
        out.retain(|i| i.degree() <= degree);
        return Ok(out);
    }
    let (name, n) = match spec.split_once(':') {
        Some((name, n)) => (name, n.parse().map_err(|_| fail(PARSE, format!("bad insertion bound in {spec:?}")))?),
        None => (spec, 7),
    };
    Ok(match name {
        "sweep" => sweep_family(degree, n),
        "first" => first_descendant_family(degree, n),
        "reachable" => reachable_family(degree, n),
        "base" => sweep_family(degree, n).into_iter().filter(is_base).collect(),
        other => return Err(fail(PARSE, format!("unknown family {other:?}"))),
    })
}

struct Row {
    inv: Invariant,
    value: Value,
    engine: EngineTag,
    seeds: Vec<u64>,
}

fn table(degree: u32, spec: &str, out: Option<PathBuf>, format: Option<Format>, seeds: u64) -> Run {
    if seeds == 0 {
        return Err(fail(PARSE, "--seeds must be at least 1"));
    }
    let fam = family_from_spec(spec, degree)?;
    let seed_list: Vec<u64> = (1..=seeds).collect();
    let engine = Engine::new(OracleProvider::new(1));
    let opts = OracleOptions::default();
    let mut rows = Vec::with_capacity(fam.len());
    for inv in fam {
        match engine.reduce(&inv) {
            Ok((value, _)) => {
                let tag = if is_base(&inv) { EngineTag::Oracle } else { EngineTag::Recursion };
                rows.push(Row { inv, value, engine: tag, seeds: vec![engine.provider().seed] });
            }
            Err(EngineError::Unsupported(_)) => {
                let mut value = None;
                for &s in &seed_list {
                    let (v, _) = evaluate_seeded(&inv, s, &opts).map_err(oracle_failure)?;
                    match &value {
                        Some(prev) if *prev != v => {
                            return Err(fail(MISMATCH, format!("{inv}: oracle value depends on the seed")));
                        }
                        _ => value = Some(v),
                    }
                }
                rows.push(Row {
                    inv,
                    value: value.expect("at least one seed"),
                    engine: EngineTag::Oracle,
                    seeds: seed_list.clone(),
                });
            }
            Err(e) => return Err(engine_failure(e)),
        }
    }
    let format = format.unwrap_or_else(|| match out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        Some("cache") | Some("tdc") => Format::Cache,
        _ => Format::Csv,
    });
    let text = render_table(&rows, format);
    match out {
        Some(path) => std::fs::write(&path, text).map_err(|e| fail(OTHER, format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render_table(rows: &[Row], format: Format) -> String {
    let seeds = |r: &Row| r.seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["invariant", "degree", "value", "engine", "seeds"]).expect("in-memory csv");
            for r in rows {
                let record = [
                    r.inv.to_string(),
                    r.inv.degree().to_string(),
                    format_value(&r.value),
                    r.engine.to_string(),
                    seeds(r),
                ];
                w.write_record(&record).expect("in-memory csv");
            }
            String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
        }
        Format::Json => {
            let list: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "invariant": r.inv.to_string(),
                        "degree": r.inv.degree(),
                        "value": format_value(&r.value),
                        "engine": r.engine.name(),
                        "seeds": r.seeds,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&list).expect("json") + "\n"
        }
        Format::Cache => {
            let mut file = CacheFile::new();
            for r in rows {
                file.insert(
                    r.inv.clone(),
                    CacheEntry { value: r.value.clone(), engine: r.engine, seeds: r.seeds.clone() },
                )
                .expect("one row per invariant");
            }
            file.to_string()
        }
    }
}
