//! Thin command-line front end over the `chanres` library: parses the
//! input formats, dispatches to the analyses, and prints JSON reports.
//!
//! Exit codes for `check` and `classify`: 0 when every property holds
//! definitively, 1 on a violation, 2 when all verdicts hold but only up
//! to a bound, 3 on input errors.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chanres::csm::{classify_csm, Csm, CsmBounds};
use chanres::events::Word;
use chanres::globaltype::GlobalType;
use chanres::hmsc::Hmsc;
use chanres::indist::{closure, DEFAULT_CLOSURE_BUDGET};
use chanres::msc::PrefixMsc;
use chanres::report::{
    sha256_hex, Bounds, ExplorationSummary, InputDesc, Report, TOOL_NAME, TOOL_VERSION,
};
use chanres::restrictions::{
    classify_msc, is_k_synchronous, ExchangeLabels, Property, RestrictionVerdict, Witness,
};
use chanres::sampling;
use chanres::text;
use chanres::translate::{fuse_empty_vertices, translate, verify_translation};

#[derive(Parser)]
#[command(name = TOOL_NAME, version, about = "Channel-restriction analyses for message-passing protocols")]
struct Cli {
    /// Suppress the human-readable summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// Record wall-clock timing in reports (off keeps reports
    /// byte-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PropertyArg {
    /// Half-duplex communication.
    Hd,
    /// Existential channel bound.
    Exb,
    /// k-synchronisability.
    Ksync,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Bmsc,
    Hmsc,
    Gt,
    Csm,
    Word,
}

#[derive(Args, Clone)]
struct BoundArgs {
    /// Largest existential bound to search (default: per-input trivial
    /// bound for MSCs, the channel cap for state machines).
    #[arg(long)]
    max_b: Option<u32>,
    /// Exploration depth for state machines (steps per run).
    #[arg(long, default_value_t = 12)]
    depth: usize,
    /// Queue capacity during exploration.
    #[arg(long, default_value_t = 6)]
    cap: usize,
    /// Word-length bound for language generation.
    #[arg(long, default_value_t = 12)]
    max_len: usize,
    /// Lasso unrolling depth.
    #[arg(long, default_value_t = 3)]
    unroll: u32,
    /// Closure/language node budget.
    #[arg(long, default_value_t = DEFAULT_CLOSURE_BUDGET)]
    budget: usize,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Input file (.bmsc, .hmsc, .gt, .csm, .word).
    file: Option<PathBuf>,
    /// Inline word instead of a file.
    #[arg(long, conflicts_with = "file")]
    word: Option<String>,
    /// Override the input kind inferred from the file extension.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Check one channel restriction on an input.
    Check {
        #[arg(long, value_enum)]
        property: PropertyArg,
        /// Exchange size for the synchronisability check.
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[command(flatten)]
        bounds: BoundArgs,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Run all three channel-restriction analyses on an input.
    Classify {
        #[command(flatten)]
        bounds: BoundArgs,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Translate a global type (.gt) into an HMSC (.hmsc).
    Translate {
        file: PathBuf,
        /// Output path for the HMSC.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Check bounded language inclusion and closure equality.
        #[arg(long)]
        verify: bool,
        /// Write the vertex provenance map as JSON.
        #[arg(long)]
        map: Option<PathBuf>,
        /// Contract empty vertices with a single successor.
        #[arg(long)]
        fuse: bool,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Enumerate the bounded language of an input.
    Lang {
        /// Close the finite words under the indistinguishability swaps.
        #[arg(long)]
        closure: bool,
        #[command(flatten)]
        bounds: BoundArgs,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Close a set of words under the indistinguishability swaps.
    Closure {
        /// Word to close (repeatable).
        #[arg(long, required = true)]
        word: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_CLOSURE_BUDGET)]
        budget: usize,
    },
    /// Explore a state machine's reachable behaviour.
    Explore {
        file: PathBuf,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Validate an input file and report violations.
    Validate { file: PathBuf },
    /// Run the randomized self-check drivers.
    Selfcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
}

enum Input {
    Msc(PrefixMsc),
    Hmsc(Hmsc),
    Type(GlobalType),
    Csm(Csm),
    Word(Word),
}

struct LoadedInput {
    desc: InputDesc,
    input: Input,
}

fn infer_kind(path: &Path) -> Result<KindArg, String> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("bmsc") => Ok(KindArg::Bmsc),
        Some("hmsc") => Ok(KindArg::Hmsc),
        Some("gt") => Ok(KindArg::Gt),
        Some("csm") => Ok(KindArg::Csm),
        Some("word") => Ok(KindArg::Word),
        _ => Err(format!(
            "cannot infer input kind of {}; pass --kind",
            path.display()
        )),
    }
}

fn load(input: &InputArgs) -> Result<LoadedInput, String> {
    if let Some(text) = &input.word {
        let word = text::parse_word(text).map_err(|e| e.to_string())?;
        return Ok(LoadedInput {
            desc: InputDesc {
                source: text.clone(),
                kind: "word".into(),
                sha256: None,
            },
            input: Input::Word(word),
        });
    }
    let path = input.file.as_ref().ok_or("an input file or --word is required")?;
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let content = String::from_utf8(bytes.clone()).map_err(|_| "input is not UTF-8".to_string())?;
    let kind = match input.kind {
        Some(k) => k,
        None => infer_kind(path)?,
    };
    let parsed = match kind {
        KindArg::Bmsc => Input::Msc(text::parse_bmsc_file(&content).map_err(|e| e.to_string())?.1),
        KindArg::Hmsc => {
            let (_, h) = text::parse_hmsc_file(&content).map_err(|e| e.to_string())?;
            let report = h.validate();
            if !report.is_ok() {
                return Err(format!("invalid HMSC: {report}"));
            }
            Input::Hmsc(h)
        }
        KindArg::Gt => Input::Type(text::parse_global_type(&content).map_err(|e| e.to_string())?),
        KindArg::Csm => Input::Csm(text::parse_csm_file(&content).map_err(|e| e.to_string())?.1),
        KindArg::Word => Input::Word(text::parse_word(&content).map_err(|e| e.to_string())?),
    };
    let kind_name = match kind {
        KindArg::Bmsc => "bmsc",
        KindArg::Hmsc => "hmsc",
        KindArg::Gt => "gt",
        KindArg::Csm => "csm",
        KindArg::Word => "word",
    };
    Ok(LoadedInput {
        desc: InputDesc {
            source: path.display().to_string(),
            kind: kind_name.into(),
            sha256: Some(sha256_hex(&bytes)),
        },
        input: parsed,
    })
}

/// Rejects bound settings the engines cannot honour: word lengths past
/// the MSC node limit and depths past a sane recursion budget.
fn check_bound_args(args: &BoundArgs) -> Result<(), String> {
    if args.max_len > chanres::msc::MAX_NODES {
        return Err(format!(
            "--max-len {} exceeds the supported maximum of {}",
            args.max_len,
            chanres::msc::MAX_NODES
        ));
    }
    if args.depth > 10_000 {
        return Err(format!("--depth {} exceeds the supported maximum of 10000", args.depth));
    }
    Ok(())
}

fn resolved_bounds(args: &BoundArgs, k: Option<u32>, max_b: Option<u32>) -> Bounds {
    Bounds {
        max_b,
        k,
        depth: args.depth,
        channel_cap: args.cap,
        max_len: args.max_len,
        unroll: args.unroll,
        closure_budget: args.budget,
    }
}

/// Caps an HMSC-style exact-bound verdict at a user-requested maximum.
fn cap_bound_verdict(verdicts: &mut [RestrictionVerdict], cap: u32) {
    if let Property::ExistentiallyBounded { bound: Some(b) } = verdicts[1].property {
        if b > cap {
            verdicts[1] = RestrictionVerdict {
                property: Property::ExistentiallyBounded { bound: None },
                holds: false,
                bounded_claim: false,
                witness: verdicts[1].witness.clone(),
            };
        }
    }
}

/// Verdicts, the resolved bound cap, and exploration stats for CSMs.
type Classification = (Vec<RestrictionVerdict>, Option<u32>, Option<ExplorationSummary>);

/// All three verdicts for any input kind.
fn classify_input(input: &Input, args: &BoundArgs) -> Result<Classification, String> {
    match input {
        Input::Msc(m) => {
            let max_b = args.max_b.unwrap_or_else(|| chanres::restrictions::trivial_bound(m));
            Ok((classify_msc(m, max_b), Some(max_b), None))
        }
        Input::Hmsc(h) => {
            let mut verdicts = h.classify();
            if let Some(cap) = args.max_b {
                cap_bound_verdict(&mut verdicts, cap);
            }
            Ok((verdicts, args.max_b, None))
        }
        Input::Type(g) => {
            let mut verdicts = translate(g).hmsc.classify();
            if let Some(cap) = args.max_b {
                cap_bound_verdict(&mut verdicts, cap);
            }
            Ok((verdicts, args.max_b, None))
        }
        Input::Csm(c) => {
            let max_b = args.max_b.unwrap_or(args.cap as u32);
            let bounds = CsmBounds {
                depth: args.depth,
                channel_cap: args.cap,
                max_b,
                unroll: args.unroll,
            };
            let (verdicts, exploration) = classify_csm(c, &bounds);
            Ok((verdicts, Some(max_b), Some(ExplorationSummary::new(&exploration))))
        }
        Input::Word(w) => {
            if let Some((pos, e)) = w.compliance_violation() {
                return Err(format!(
                    "word is not channel-compliant at position {} ({e})",
                    pos + 1
                ));
            }
            let m = chanres::msc::msc_of(w).expect("compliant word");
            let max_b = args.max_b.unwrap_or_else(|| chanres::restrictions::trivial_bound(&m));
            let mut verdicts = classify_msc(&m, max_b);
            // Half-duplex on a word is judged on the word itself, not
            // on all linearizations of its MSC.
            verdicts[0] = RestrictionVerdict {
                property: Property::HalfDuplex,
                holds: w.is_half_duplex(),
                bounded_claim: false,
                witness: w.half_duplex_violation().map(|(pos, _)| Witness::Word {
                    word: Word::new(w.events()[..=pos].to_vec()).to_string(),
                }),
            };
            Ok((verdicts, Some(max_b), None))
        }
    }
}

fn run_check(
    property: PropertyArg,
    k: u32,
    args: &BoundArgs,
    input: &InputArgs,
    timing: bool,
    quiet: bool,
) -> Result<ExitCode, String> {
    check_bound_args(args)?;
    let started = Instant::now();
    let loaded = load(input)?;
    // The k-synchronisability check honours the requested k directly.
    let (verdict, max_b) = match (&loaded.input, property) {
        (Input::Msc(m), PropertyArg::Ksync) => {
            let v = match is_k_synchronous(m, k) {
                Some(d) => RestrictionVerdict {
                    property: Property::Synchronisable { k: Some(k) },
                    holds: true,
                    bounded_claim: false,
                    witness: Some(Witness::Decomposition {
                        k,
                        segments: d.segments.iter().map(|s| ExchangeLabels::new(m, s)).collect(),
                    }),
                },
                None => RestrictionVerdict {
                    property: Property::Synchronisable { k: Some(k) },
                    holds: false,
                    bounded_claim: false,
                    witness: None,
                },
            };
            (v, Some(args.max_b.unwrap_or_else(|| chanres::restrictions::trivial_bound(m))))
        }
        (Input::Hmsc(h), PropertyArg::Ksync) => (h.k_synchronisable(k), args.max_b),
        (Input::Type(g), PropertyArg::Ksync) => (translate(g).hmsc.k_synchronisable(k), args.max_b),
        _ => {
            let (verdicts, max_b, _) = classify_input(&loaded.input, args)?;
            let idx = match property {
                PropertyArg::Hd => 0,
                PropertyArg::Exb => 1,
                PropertyArg::Ksync => 2,
            };
            let mut v = verdicts.into_iter().nth(idx).expect("three verdicts");
            // For state machines the requested k bounds the verdict.
            if property == PropertyArg::Ksync {
                if let Property::Synchronisable { k: Some(found) } = v.property {
                    if v.holds && found > k {
                        v = RestrictionVerdict {
                            property: Property::Synchronisable { k: Some(k) },
                            holds: false,
                            bounded_claim: v.bounded_claim,
                            witness: None,
                        };
                    }
                }
            }
            (v, max_b)
        }
    };
    let report = Report {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        command: "check".into(),
        input: loaded.desc,
        bounds: resolved_bounds(args, (property == PropertyArg::Ksync).then_some(k), max_b),
        verdicts: vec![verdict],
        exploration: None,
        timing_ms: timing.then(|| started.elapsed().as_millis() as u64),
    };
    print!("{}", report.to_json());
    if !quiet {
        for v in &report.verdicts {
            eprintln!("{v}");
        }
    }
    Ok(exit_of(report.exit_code()))
}

fn run_classify(
    args: &BoundArgs,
    input: &InputArgs,
    timing: bool,
    quiet: bool,
) -> Result<ExitCode, String> {
    check_bound_args(args)?;
    let started = Instant::now();
    let loaded = load(input)?;
    let (verdicts, max_b, exploration) = classify_input(&loaded.input, args)?;
    let report = Report {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        command: "classify".into(),
        input: loaded.desc,
        bounds: resolved_bounds(args, None, max_b),
        verdicts,
        exploration,
        timing_ms: timing.then(|| started.elapsed().as_millis() as u64),
    };
    print!("{}", report.to_json());
    if !quiet {
        for v in &report.verdicts {
            eprintln!("{v}");
        }
    }
    Ok(exit_of(report.exit_code()))
}

fn run_translate(
    file: &Path,
    output: Option<&Path>,
    verify: bool,
    map: Option<&Path>,
    fuse: bool,
    args: &BoundArgs,
    quiet: bool,
) -> Result<ExitCode, String> {
    check_bound_args(args)?;
    let content = std::fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    let g = text::parse_global_type(&content).map_err(|e| e.to_string())?;
    let out = translate(&g);
    let hmsc = if fuse { fuse_empty_vertices(&out.hmsc) } else { out.hmsc.clone() };
    let name = file
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("translated")
        .replace(|c: char| !c.is_ascii_alphanumeric() && c != '_', "_");
    let rendered = text::write_hmsc_file(&name, &hmsc);
    match output {
        Some(path) => std::fs::write(path, &rendered).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{rendered}"),
    }
    if let Some(path) = map {
        let json = serde_json::to_string_pretty(&out.vertex_map).expect("map serializes");
        std::fs::write(path, json + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if verify {
        let check = verify_translation(&g, args.max_len, args.budget).map_err(|e| e.to_string())?;
        let json = serde_json::to_string_pretty(&check).expect("check serializes");
        println!("{json}");
        if !quiet {
            eprintln!(
                "inclusion: {}; closure equality: {}",
                if check.inclusion_failures.is_empty() { "ok" } else { "failed" },
                if check.closure_equal { "ok" } else { "failed" },
            );
        }
        if !check.passed() {
            return Ok(ExitCode::from(1));
        }
    } else if !quiet {
        eprintln!(
            "translated {} vertices, {} edges",
            hmsc.vertex_count(),
            hmsc.edges().count()
        );
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(serde::Serialize)]
struct LangOutput {
    command: &'static str,
    max_len: usize,
    words: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    prefixes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    lassos: Vec<LassoOutput>,
}

#[derive(serde::Serialize)]
struct LassoOutput {
    stem: String,
    cycle: String,
}

fn run_lang(
    close: bool,
    args: &BoundArgs,
    input: &InputArgs,
    quiet: bool,
) -> Result<ExitCode, String> {
    check_bound_args(args)?;
    let loaded = load(input)?;
    let mut words: BTreeSet<Word> = BTreeSet::new();
    let mut prefixes: BTreeSet<Word> = BTreeSet::new();
    let mut lassos: Vec<LassoOutput> = Vec::new();
    match &loaded.input {
        Input::Msc(m) => {
            words.extend(m.linearizations(args.budget));
        }
        Input::Hmsc(h) => {
            let lang = h.language(args.max_len, args.budget).map_err(|e| e.to_string())?;
            words = lang.words;
            prefixes = lang.prefixes;
        }
        Input::Type(g) => {
            let lang = g.language(args.max_len);
            words = lang.finite;
            lassos = lang
                .lassos
                .iter()
                .map(|l| LassoOutput {
                    stem: l.stem().to_string(),
                    cycle: l.cycle().to_string(),
                })
                .collect();
        }
        Input::Csm(c) => {
            let exploration = c.explore(args.depth, args.cap);
            words = exploration.finite_traces.keys().cloned().collect();
            lassos = exploration
                .lassos
                .iter()
                .map(|l| LassoOutput {
                    stem: l.stem().to_string(),
                    cycle: l.cycle().to_string(),
                })
                .collect();
        }
        Input::Word(w) => {
            words.insert(w.clone());
        }
    }
    if close {
        words = closure(&words, args.budget).map_err(|e| e.to_string())?;
    }
    let out = LangOutput {
        command: "lang",
        max_len: args.max_len,
        words: words.iter().map(Word::to_string).collect(),
        prefixes: prefixes.iter().map(Word::to_string).collect(),
        lassos,
    };
    println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
    if !quiet {
        eprintln!("{} words", out.words.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn run_closure(words: &[String], budget: usize, quiet: bool) -> Result<ExitCode, String> {
    let mut set = BTreeSet::new();
    for w in words {
        set.insert(text::parse_word(w).map_err(|e| e.to_string())?);
    }
    let closed = closure(&set, budget).map_err(|e| e.to_string())?;
    let list: Vec<String> = closed.iter().map(Word::to_string).collect();
    println!("{}", serde_json::to_string_pretty(&list).expect("serializes"));
    if !quiet {
        eprintln!("{} words in closure", list.len());
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(serde::Serialize)]
struct ExploreOutput {
    command: &'static str,
    depth: usize,
    channel_cap: usize,
    configurations: usize,
    finite_traces: Vec<FiniteTraceOutput>,
    lassos: Vec<LassoOutput>,
    depth_hit: bool,
    cap_hit_channels: Vec<String>,
    deadlock: Option<DeadlockOutput>,
}

#[derive(serde::Serialize)]
struct FiniteTraceOutput {
    trace: String,
    queues: BTreeMap<String, Vec<String>>,
}

#[derive(serde::Serialize)]
struct DeadlockOutput {
    trace: String,
    states: BTreeMap<String, String>,
    queues: BTreeMap<String, Vec<String>>,
}

fn run_explore(file: &Path, args: &BoundArgs, quiet: bool) -> Result<ExitCode, String> {
    check_bound_args(args)?;
    let content = std::fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    let (_, csm) = text::parse_csm_file(&content).map_err(|e| e.to_string())?;
    let r = csm.explore(args.depth, args.cap);
    let deadlock = csm.find_deadlock(args.depth, args.cap).map(|(config, trace)| {
        let (states, queues) = csm.describe(&config);
        DeadlockOutput {
            trace: trace.to_string(),
            states,
            queues,
        }
    });
    let out = ExploreOutput {
        command: "explore",
        depth: args.depth,
        channel_cap: args.cap,
        configurations: r.configurations.len(),
        finite_traces: r
            .finite_traces
            .iter()
            .map(|(w, queues)| FiniteTraceOutput {
                trace: w.to_string(),
                queues: queues
                    .iter()
                    .map(|(c, q)| {
                        (
                            c.to_string(),
                            q.iter().map(|m| m.label().to_string()).collect(),
                        )
                    })
                    .collect(),
            })
            .collect(),
        lassos: r
            .lassos
            .iter()
            .map(|l| LassoOutput {
                stem: l.stem().to_string(),
                cycle: l.cycle().to_string(),
            })
            .collect(),
        depth_hit: r.depth_hit,
        cap_hit_channels: r.cap_hit_channels.iter().map(|c| c.to_string()).collect(),
        deadlock: deadlock.map(Some).unwrap_or(None),
    };
    println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
    if !quiet {
        eprintln!(
            "{} configurations, {} finite traces, {} lassos",
            out.configurations,
            out.finite_traces.len(),
            out.lassos.len()
        );
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(serde::Serialize)]
struct ValidateOutput {
    command: &'static str,
    valid: bool,
    violations: Vec<String>,
}

fn run_validate(file: &Path, quiet: bool) -> Result<ExitCode, String> {
    let content = std::fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    let kind = infer_kind(file)?;
    let violations: Vec<String> = match kind {
        KindArg::Bmsc => {
            // Reparse through the builder to collect violations rather
            // than failing at the first.
            match text::parse_bmsc_file(&content) {
                Ok(_) => Vec::new(),
                Err(e) => vec![e.to_string()],
            }
        }
        KindArg::Hmsc => match text::parse_hmsc_file(&content) {
            Ok((_, h)) => h.validate().violations.iter().map(|v| v.to_string()).collect(),
            Err(e) => return Err(e.to_string()),
        },
        KindArg::Gt => match text::parse_global_type(&content) {
            Ok(_) => Vec::new(),
            Err(e) => vec![e.to_string()],
        },
        KindArg::Csm => match text::parse_csm_file(&content) {
            Ok(_) => Vec::new(),
            Err(e) => vec![e.to_string()],
        },
        KindArg::Word => match text::parse_word(&content) {
            Ok(w) => match w.compliance_violation() {
                None => Vec::new(),
                Some((pos, e)) => vec![format!("not channel-compliant at position {} ({e})", pos + 1)],
            },
            Err(e) => vec![e.to_string()],
        },
    };
    let out = ValidateOutput {
        command: "validate",
        valid: violations.is_empty(),
        violations,
    };
    println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
    if !quiet {
        eprintln!("{}", if out.valid { "valid" } else { "invalid" });
    }
    Ok(if out.valid { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(serde::Serialize)]
struct SelfcheckOutput {
    command: &'static str,
    seed: u64,
    count: usize,
    checks: Vec<SelfcheckEntry>,
    passed: bool,
}

#[derive(serde::Serialize)]
struct SelfcheckEntry {
    name: &'static str,
    cases: usize,
    failures: usize,
}

fn run_selfcheck(seed: u64, count: usize, quiet: bool) -> Result<ExitCode, String> {
    let mut checks = Vec::new();

    // Swap neighbours preserve word classification.
    let mut rng = sampling::rng(seed);
    let mut failures = 0;
    for i in 0..count {
        let len = 2 + (i % 9);
        let w = sampling::compliant_word(&mut rng, 3, 2, len);
        let c = chanres::restrictions::classify_word(&w, 10).expect("compliant");
        for n in chanres::indist::one_step_neighbors(&w) {
            let cn = chanres::restrictions::classify_word(&n, 10).expect("compliant");
            if cn != c {
                failures += 1;
            }
        }
    }
    checks.push(SelfcheckEntry {
        name: "swap_preserves_classification",
        cases: count,
        failures,
    });

    // Translated types pass all three restrictions.
    let mut rng = sampling::rng(seed.wrapping_add(1));
    let mut failures = 0;
    for _ in 0..count {
        let g = sampling::global_type(&mut rng, 4, 3, 3);
        let h = translate(&g).hmsc;
        if !(h.half_duplex().holds && h.existential_bound().0 <= 1 && h.k_synchronisable(1).holds) {
            failures += 1;
        }
    }
    checks.push(SelfcheckEntry {
        name: "translated_types_satisfy_restrictions",
        cases: count,
        failures,
    });

    // Random MSCs satisfy causal delivery and round-trip through their
    // linearizations.
    let mut rng = sampling::rng(seed.wrapping_add(2));
    let mut failures = 0;
    for _ in 0..count {
        let m = sampling::prefix_msc(&mut rng, 3, 8);
        if !m.satisfies_causal_delivery() {
            failures += 1;
        }
        for lin in m.linearizations(64) {
            let m2 = chanres::msc::msc_of(&lin).expect("linearizations are compliant");
            if !m.is_isomorphic(&m2) {
                failures += 1;
            }
        }
    }
    checks.push(SelfcheckEntry {
        name: "msc_roundtrip_and_causal_delivery",
        cases: count,
        failures,
    });

    let passed = checks.iter().all(|c| c.failures == 0);
    let out = SelfcheckOutput {
        command: "selfcheck",
        seed,
        count,
        checks,
        passed,
    };
    println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
    if !quiet {
        eprintln!("selfcheck {}", if passed { "passed" } else { "FAILED" });
    }
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn exit_of(code: i32) -> ExitCode {
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check {
            property,
            k,
            bounds,
            input,
        } => run_check(*property, *k, bounds, input, cli.timing, cli.quiet),
        Command::Classify { bounds, input } => run_classify(bounds, input, cli.timing, cli.quiet),
        Command::Translate {
            file,
            output,
            verify,
            map,
            fuse,
            bounds,
        } => run_translate(
            file,
            output.as_deref(),
            *verify,
            map.as_deref(),
            *fuse,
            bounds,
            cli.quiet,
        ),
        Command::Lang {
            closure,
            bounds,
            input,
        } => run_lang(*closure, bounds, input, cli.quiet),
        Command::Closure { word, budget } => run_closure(word, *budget, cli.quiet),
        Command::Explore { file, bounds } => run_explore(file, bounds, cli.quiet),
        Command::Validate { file } => run_validate(file, cli.quiet),
        Command::Selfcheck { seed, count } => run_selfcheck(*seed, *count, cli.quiet),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(3)
        }
    }
}
