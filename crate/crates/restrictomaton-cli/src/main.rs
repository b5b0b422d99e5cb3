//! Command-line front end: compile automata to molecule files, validate
//! encodings, simulate one-pot computations, query the classical oracle,
//! diff against the published reference table, and digest duplex records.
//!
//! Exit codes: 0 accept / 1 reject / 2 invalid input or failed validation /
//! 3 ambiguous step (encoding cross-talk) / 64 usage.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use restrictomaton::compile::{file_stem, table_diff, CompiledMachine, Layout};
use restrictomaton::enzyme::{digest, EnzymeSpec, Registry};
use restrictomaton::fsa::{parse_word, Automaton, Symbol};
use restrictomaton::seq::records;
use restrictomaton::sim::{
    any_accepted, default_max_steps, render_gel, run_deterministic, run_exhaustive_jobs,
    seed_pot, Count, SimError, SimResult,
};

const EXIT_ACCEPT: u8 = 0;
const EXIT_REJECT: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_AMBIGUOUS: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Environment variable overriding the enzyme registry file.
const ENZYMES_ENV: &str = "RESTRICTOMATON_ENZYMES";

#[derive(Parser)]
#[command(name = "restrictomaton", version, about = "DNA finite-automaton compiler and one-pot reaction simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Det,
    Exhaustive,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile an automaton into molecule records plus a machine manifest
    Compile {
        automaton: PathBuf,
        /// Output directory for .dx records and manifest.json
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Terminator tail length in bp
        #[arg(long, default_value_t = 80)]
        tail_len: usize,
    },
    /// Compile and print the encoding validation report
    Validate {
        automaton: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Simulate the one-pot computation of a word
    Simulate {
        automaton: PathBuf,
        word: String,
        #[arg(long, value_enum, default_value_t = Mode::Det)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Event budget (default 4·(|word|+2))
        #[arg(long)]
        depth: Option<usize>,
        /// Worker threads for exhaustive exploration; never changes results
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run the classical automaton on a word
    Oracle {
        automaton: PathBuf,
        word: String,
        /// Subset-construction acceptance instead of DFA semantics
        #[arg(long)]
        nfa: bool,
        #[arg(long)]
        json: bool,
    },
    /// Classify every reference-table row against the generator
    TableDiff {
        #[arg(long)]
        json: bool,
    },
    /// Digest duplex records with the named enzymes (comma-separated)
    Digest { records: PathBuf, enzymes: String },
    /// Simulate a word and render only the gel lane
    Gel {
        automaton: PathBuf,
        word: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    // die quietly when stdout is a closed pipe (e.g. piped into `head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own message; keep the documented usage code
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_ACCEPT });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {:#}", err);
            ExitCode::from(EXIT_INVALID)
        }
    }
}

fn registry() -> Result<Registry> {
    match std::env::var_os(ENZYMES_ENV) {
        Some(path) => {
            let text = fs::read_to_string(&path)
                .with_context(|| format!("reading {} ({})", Path::new(&path).display(), ENZYMES_ENV))?;
            Ok(Registry::parse(&text)?)
        }
        None => Ok(Registry::builtin().clone()),
    }
}

fn load_automaton(path: &Path) -> Result<Automaton> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Automaton::parse(&text)?)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Compile { automaton, out, seed, tail_len } => cmd_compile(&automaton, &out, seed, tail_len),
        Cmd::Validate { automaton, seed, json } => cmd_validate(&automaton, seed, json),
        Cmd::Simulate { automaton, word, mode, seed, depth, jobs, json } => {
            cmd_simulate(&automaton, &word, mode, seed, depth, jobs, json)
        }
        Cmd::Oracle { automaton, word, nfa, json } => cmd_oracle(&automaton, &word, nfa, json),
        Cmd::TableDiff { json } => cmd_table_diff(json),
        Cmd::Digest { records, enzymes } => cmd_digest(&records, &enzymes),
        Cmd::Gel { automaton, word, seed } => cmd_gel(&automaton, &word, seed),
    }
}

fn compile_machine(path: &Path, seed: u64, tail_len: usize) -> Result<Result<CompiledMachine, String>> {
    let aut = load_automaton(path)?;
    let reg = registry()?;
    match CompiledMachine::compile_with(&aut, &reg, seed, tail_len) {
        Ok(m) => Ok(Ok(m)),
        Err(restrictomaton::compile::CompileError::NotCompilable(msg)) => {
            Ok(Err(format!("not compilable: {}", msg)))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_compile(path: &Path, out: &Path, seed: u64, tail_len: usize) -> Result<u8> {
    let machine = match compile_machine(path, seed, tail_len)? {
        Ok(m) => m,
        Err(msg) => {
            eprintln!("{}", msg);
            return Ok(EXIT_INVALID);
        }
    };
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for (label, duplex) in machine.molecule_records() {
        let file = out.join(format!("{}.dx", file_stem(&label)));
        fs::write(&file, records::write_record(&label, &duplex))
            .with_context(|| format!("writing {}", file.display()))?;
    }
    let manifest = out.join("manifest.json");
    fs::write(&manifest, format!("{}\n", serde_json::to_string_pretty(&machine.manifest())?))
        .with_context(|| format!("writing {}", manifest.display()))?;
    let errors = machine.validation.error_count();
    println!(
        "compiled {} transition molecule(s), {} terminator(s) -> {}",
        machine.rules.len(),
        machine.terminators.len(),
        out.display()
    );
    if errors > 0 {
        for f in machine.validation.failures() {
            eprintln!("validation failure [{}]: {}", f.name, f.details);
        }
        println!("validation: {} error(s); report written to manifest", errors);
        return Ok(EXIT_INVALID);
    }
    println!("validation: clean");
    Ok(EXIT_ACCEPT)
}

fn cmd_validate(path: &Path, seed: u64, json: bool) -> Result<u8> {
    let machine = match compile_machine(path, seed, restrictomaton::compile::DEFAULT_TERMINATOR_TAIL)? {
        Ok(m) => m,
        Err(msg) => {
            eprintln!("{}", msg);
            return Ok(EXIT_INVALID);
        }
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&machine.validation)?);
    } else {
        for c in &machine.validation.checks {
            println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.details);
        }
        println!(
            "{} checks, {} failure(s)",
            machine.validation.checks.len(),
            machine.validation.error_count()
        );
    }
    Ok(if machine.validation.is_clean() { EXIT_ACCEPT } else { EXIT_INVALID })
}

fn reason_str(r: restrictomaton::sim::HaltReason) -> &'static str {
    use restrictomaton::sim::HaltReason::*;
    match r {
        TerminatorLigated => "terminator_ligated",
        Stalled => "stalled",
        DepthExceeded => "depth_exceeded",
    }
}

fn print_sim_human(r: &SimResult) {
    println!("{} ({})", if r.accepted { "accepted" } else { "rejected" }, reason_str(r.halt_reason));
    for (i, ev) in r.events.iter().enumerate() {
        let enzyme = ev.enzyme.as_deref().map(|e| format!(" [{}]", e)).unwrap_or_default();
        println!(
            "  {:>2}. {}{}: {} -> {}",
            i + 1,
            ev.kind,
            enzyme,
            ev.species_in.join(" + "),
            ev.species_out.join(" + ")
        );
    }
    println!();
    println!("{}", render_gel(&r.bands));
}

fn cmd_simulate(
    path: &Path,
    word: &str,
    mode: Mode,
    seed: u64,
    depth: Option<usize>,
    jobs: usize,
    json: bool,
) -> Result<u8> {
    let word: Vec<Symbol> = match parse_word(word) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("{}", e);
            return Ok(EXIT_USAGE);
        }
    };
    let machine = match compile_machine(path, seed, restrictomaton::compile::DEFAULT_TERMINATOR_TAIL)? {
        Ok(m) => m,
        Err(msg) => {
            eprintln!("{}", msg);
            return Ok(EXIT_INVALID);
        }
    };
    let reg = registry()?;
    let pot = seed_pot(&machine, &word, &reg, Count::Unbounded).map_err(sim_err)?;
    let budget = depth.unwrap_or_else(|| default_max_steps(word.len()));
    match mode {
        Mode::Det => match run_deterministic(&pot, &reg, budget) {
            Ok(r) => {
                if json {
                    println!("{}", serde_json::to_string_pretty(&r)?);
                } else {
                    print_sim_human(&r);
                }
                Ok(if r.accepted { EXIT_ACCEPT } else { EXIT_REJECT })
            }
            Err(SimError::AmbiguousStep { events }) => {
                eprintln!("ambiguous step:");
                for e in events {
                    eprintln!("  - {}", e);
                }
                Ok(EXIT_AMBIGUOUS)
            }
            Err(e) => Err(e.into()),
        },
        Mode::Exhaustive => {
            let results = run_exhaustive_jobs(&pot, &reg, budget, jobs);
            let accepted = any_accepted(&results);
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "accepted": accepted,
                        "results": results,
                    }))?
                );
            } else {
                println!(
                    "{} ({} distinct outcome(s))",
                    if accepted { "accepted" } else { "rejected" },
                    results.len()
                );
                for (i, r) in results.iter().enumerate() {
                    println!(
                        "  outcome {}: {} ({}), {} events",
                        i + 1,
                        if r.accepted { "accepted" } else { "rejected" },
                        reason_str(r.halt_reason),
                        r.events.len()
                    );
                }
            }
            Ok(if accepted { EXIT_ACCEPT } else { EXIT_REJECT })
        }
    }
}

fn sim_err(e: SimError) -> anyhow::Error {
    anyhow!("{}", e)
}

fn cmd_oracle(path: &Path, word: &str, nfa: bool, json: bool) -> Result<u8> {
    let aut = load_automaton(path)?;
    let word = match parse_word(word) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("{}", e);
            return Ok(EXIT_USAGE);
        }
    };
    if nfa {
        let accepted = aut.run_nfa(&word);
        if json {
            println!("{}", serde_json::json!({ "accepted": accepted }));
        } else {
            println!("{}", if accepted { "accepted" } else { "rejected" });
        }
        return Ok(if accepted { EXIT_ACCEPT } else { EXIT_REJECT });
    }
    let v = aut.run_dfa(&word)?;
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "accepted": v.accepted,
                "halt_reason": v.halt_reason,
                "final_state": v.final_state,
                "trace": v.trace.iter()
                    .map(|(s, sym)| serde_json::json!([s, sym.to_string()]))
                    .collect::<Vec<_>>(),
            }))?
        );
    } else {
        println!("{} in {}", if v.accepted { "accepted" } else { "rejected" }, v.final_state);
        for (s, sym) in &v.trace {
            println!("  {} --{}-->", s, sym);
        }
    }
    Ok(if v.accepted { EXIT_ACCEPT } else { EXIT_REJECT })
}

fn cmd_table_diff(json: bool) -> Result<u8> {
    let reg = registry()?;
    let layout = Layout::derive(&reg)?;
    let report = table_diff(&layout);
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", report);
    }
    Ok(if report.fully_classified() { EXIT_ACCEPT } else { EXIT_REJECT })
}

fn cmd_digest(path: &Path, enzymes: &str) -> Result<u8> {
    let reg = registry()?;
    let mut specs: Vec<EnzymeSpec> = Vec::new();
    for name in enzymes.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match reg.get(name) {
            Ok(e) => specs.push(e.clone()),
            Err(e) => {
                eprintln!("{}", e);
                return Ok(EXIT_USAGE);
            }
        }
    }
    if specs.is_empty() {
        eprintln!("no enzymes named");
        return Ok(EXIT_USAGE);
    }
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = records::parse_records(&text)?;
    let refs: Vec<&EnzymeSpec> = specs.iter().collect();
    for (name, duplex) in parsed {
        let frags = digest(&duplex, &refs);
        for (i, f) in frags.iter().enumerate() {
            print!("{}", records::write_record(&format!("{}.{}", name, i + 1), f));
        }
    }
    Ok(EXIT_ACCEPT)
}

fn cmd_gel(path: &Path, word: &str, seed: u64) -> Result<u8> {
    let word = match parse_word(word) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("{}", e);
            return Ok(EXIT_USAGE);
        }
    };
    let machine = match compile_machine(path, seed, restrictomaton::compile::DEFAULT_TERMINATOR_TAIL)? {
        Ok(m) => m,
        Err(msg) => {
            eprintln!("{}", msg);
            return Ok(EXIT_INVALID);
        }
    };
    let reg = registry()?;
    let pot = seed_pot(&machine, &word, &reg, Count::Unbounded).map_err(sim_err)?;
    match run_deterministic(&pot, &reg, default_max_steps(word.len())) {
        Ok(r) => {
            println!("{}", render_gel(&r.bands));
            Ok(if r.accepted { EXIT_ACCEPT } else { EXIT_REJECT })
        }
        Err(SimError::AmbiguousStep { events }) => {
            eprintln!("ambiguous step: {}", events.join("; "));
            Ok(EXIT_AMBIGUOUS)
        }
        Err(e) => Err(e.into()),
    }
}
