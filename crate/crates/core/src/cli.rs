// SPDX-License-Identifier: MIT OR Apache-2.0

//! The `twospaces` command line.
//!
//! Exit codes: 0 success or true, 1 false or mismatch, 2 usage or input
//! error, 3 budget exhausted.

use std::fs;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::abelian::{
    coset_count_window, coset_count_window_marked, format_matrix, hnf, parse_matrix, psi_preimage_marked,
    quotient_invariants, snf, Lattice,
};
use crate::config::{Config, OutputFormat};
use crate::duality::{
    annihilated_subgroup, annihilator, dual_invariants, is_connected, is_saturated, prufer_tower, solenoid_tower,
    TorusSubgroup, TowerReport,
};
use crate::genericity::{condition_from_file, play_strategy, CertifiedCondition, GameError, GameTranscript, Repl};
use crate::marked::{kernel_of_marking, Assignment, ConditionFile, MarkedGroup};
use crate::oracles::{check_axioms_window, named, GroupOracle};
use crate::transfer::{dm_check, f_map, phi, sigma_kernel, DmOutcome, TransferError};
use crate::words::{enumerate, Enumeration, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "twospaces", version, about = "Group operations on ℕ and marked groups")]
struct Cli {
    /// Probe budget for transversal scans and D_m checks
    #[arg(long, global = true, env = "TWOSPACES_BUDGET", value_parser = clap::value_parser!(u64).range(1..))]
    budget: Option<u64>,
    /// Window size for Cayley tables
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    window: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    JsonLines,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Free group words
    #[command(subcommand)]
    Words(WordsCmd),
    /// Named group oracles
    #[command(subcommand)]
    Group(GroupCmd),
    /// Kernels of markings
    #[command(subcommand)]
    Marked(MarkedCmd),
    /// Membership in Φ(G)
    Phi {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        word: String,
    },
    /// Cayley window of f(ker σ_G)
    F {
        #[arg(long)]
        spec: String,
    },
    /// Compare f(ker σ_G) with G on a window
    Roundtrip {
        #[arg(long)]
        spec: String,
    },
    /// Bounded D_m check
    Dm(DmArgs),
    /// Lattices in ℤⁿ
    #[command(subcommand)]
    Abelian(AbelianCmd),
    /// Annihilators and towers
    #[command(subcommand)]
    Dual(DualCmd),
    /// The density game
    #[command(subcommand)]
    Game(GameCmd),
}

#[derive(Subcommand, Debug)]
enum WordsCmd {
    /// Words w_k, w_{k+1}, ... of the canonical enumeration
    Enum {
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Enumerate words over x_0 .. x_{rank-1} only
        #[arg(long)]
        rank: Option<u64>,
    },
    /// Position of a word in the canonical enumeration
    Index {
        #[arg(long)]
        word: String,
    },
    Reduce {
        #[arg(long)]
        word: String,
    },
    Mul {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    Inv {
        #[arg(long)]
        word: String,
    },
}

#[derive(Subcommand, Debug)]
enum GroupCmd {
    /// Check the group axioms on a window
    Check {
        #[arg(long)]
        spec: String,
    },
    /// Print the Cayley window
    Table {
        #[arg(long)]
        spec: String,
    },
}

#[derive(Subcommand, Debug)]
enum MarkedCmd {
    /// Whether a word lies in the kernel of a marking
    Contains {
        #[arg(long)]
        group: String,
        #[arg(long)]
        assign: String,
        #[arg(long)]
        word: String,
    },
    /// Check a condition file against its witness
    Condition {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Args, Debug)]
struct DmArgs {
    /// Use ker σ_G
    #[arg(long, conflicts_with_all = ["spec_phi", "group"])]
    spec: Option<String>,
    /// Use Φ(G)
    #[arg(long, conflicts_with = "group")]
    spec_phi: Option<String>,
    /// Use the kernel of an explicit marking (with --assign)
    #[arg(long, requires = "assign")]
    group: Option<String>,
    #[arg(long)]
    assign: Option<String>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    m: u64,
}

#[derive(Subcommand, Debug)]
enum AbelianCmd {
    Hnf {
        #[arg(long = "matrix", visible_alias = "file")]
        matrix: PathBuf,
    },
    Snf {
        #[arg(long = "matrix", visible_alias = "file")]
        matrix: PathBuf,
    },
    /// Invariants of ℤⁿ modulo the row span
    Invariants {
        #[arg(long = "matrix", visible_alias = "file")]
        matrix: PathBuf,
    },
    /// Lattice membership of a vector, or Ψ(L) membership of a word
    Contains {
        #[arg(long = "matrix", visible_alias = "file")]
        matrix: PathBuf,
        #[arg(long, conflicts_with = "word", required_unless_present = "word")]
        vector: Option<String>,
        #[arg(long)]
        word: Option<String>,
    },
    /// Cosets met by the box of radius B, counted on both sides
    Cosets {
        #[arg(long = "matrix", visible_alias = "file")]
        matrix: PathBuf,
        #[arg(long)]
        radius: u64,
    },
}

#[derive(Subcommand, Debug)]
enum DualCmd {
    /// Annihilator of a torus subgroup file
    Ann {
        #[arg(long)]
        file: PathBuf,
    },
    /// Torus subgroup annihilated by a matrix file
    Unann {
        #[arg(long)]
        file: PathBuf,
    },
    /// Dual invariants of a torus subgroup file
    Invariants {
        #[arg(long)]
        file: PathBuf,
    },
    /// Double annihilator and saturation checks on a matrix file
    Check {
        #[arg(long)]
        file: PathBuf,
    },
    Prufer {
        #[arg(long)]
        p: u64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
    },
    Solenoid {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        levels: u32,
    },
}

#[derive(Subcommand, Debug)]
enum GameCmd {
    /// Automated play from a condition file or the vacuous condition
    Play {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        rounds: u64,
        #[arg(long)]
        initial: Option<PathBuf>,
    },
    /// Interactive play on standard input
    Repl {
        #[arg(long, default_value = "twospaces-transcript.txt")]
        transcript: PathBuf,
        #[arg(long)]
        initial: Option<PathBuf>,
    },
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

impl From<TransferError> for Failure {
    fn from(e: TransferError) -> Failure {
        let code = match e {
            TransferError::BudgetExhausted(_) => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<GameError> for Failure {
    fn from(e: GameError) -> Failure {
        let code = match e {
            GameError::BudgetExhausted { .. } => EXIT_BUDGET,
            GameError::CertificateFailed(_) | GameError::NotNested(_) | GameError::DensityFailed { .. } => EXIT_FALSE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

struct Out<'a> {
    sink: &'a mut dyn Write,
    format: OutputFormat,
}

impl Out<'_> {
    /// One record: `text` in text mode, `record` in json-lines mode.
    fn emit(&mut self, text: &str, record: Value) -> Result<(), Failure> {
        let line = match self.format {
            OutputFormat::Text => text.to_string(),
            OutputFormat::JsonLines => record.to_string(),
        };
        writeln!(self.sink, "{line}").map_err(|e| usage(format!("write failed: {e}")))
    }

    fn verdict(&mut self, holds: bool, record: Value) -> Result<i32, Failure> {
        self.emit(if holds { "true" } else { "false" }, record)?;
        Ok(if holds { EXIT_OK } else { EXIT_FALSE })
    }
}

fn parse_word(text: &str) -> Result<Word, Failure> {
    text.parse().map_err(|e| usage(format!("bad word `{text}`: {e}")))
}

fn group(spec: &str, config: &Config) -> Result<GroupOracle, Failure> {
    named(spec)
        .map(|g| g.with_scan_budget(config.scan_budget))
        .map_err(usage)
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn read_lattice(path: &PathBuf) -> Result<Lattice, Failure> {
    let (m, cols) = parse_matrix(&read(path)?).map_err(usage)?;
    Ok(Lattice::from_rows(cols, &m))
}

fn read_torus(path: &PathBuf) -> Result<TorusSubgroup, Failure> {
    read(path)?.parse().map_err(usage)
}

fn table_records(out: &mut Out, table: &[Vec<u64>]) -> Result<(), Failure> {
    for (a, row) in table.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        out.emit(&cells.join(" "), json!({ "row": a, "values": row }))?;
    }
    Ok(())
}

fn matrix_record(out: &mut Out, basis: &[Vec<BigInt>], cols: usize) -> Result<(), Failure> {
    let text = format_matrix(&basis.to_vec(), cols);
    out.emit(text.trim_end(), json!({ "matrix": text }))
}

fn tower_records(out: &mut Out, report: &TowerReport) -> Result<i32, Failure> {
    for line in report.to_string().lines() {
        out.emit(line, json!({ "line": line }))?;
    }
    Ok(if report.holds { EXIT_OK } else { EXIT_FALSE })
}

fn transcript_records(out: &mut Out, t: &GameTranscript) -> Result<(), Failure> {
    for e in &t.entries {
        let dm: serde_json::Map<String, Value> =
            e.dm.iter()
                .map(|(m, o)| (m.to_string(), json!(o.to_string())))
                .collect();
        let record = json!({
            "round": e.round,
            "player": e.player.to_string(),
            "in": e.condition.inside().iter().map(ToString::to_string).collect::<Vec<_>>(),
            "out": e.condition.outside().iter().map(ToString::to_string).collect::<Vec<_>>(),
            "dm": dm,
            "witness": e.condition.witness().to_string(),
        });
        out.emit(&e.to_string(), record)?;
    }
    if let Some(err) = &t.error {
        out.emit(&format!("ERROR | {err}"), json!({ "error": err }))?;
    }
    Ok(())
}

fn initial_condition(path: &Option<PathBuf>) -> Result<CertifiedCondition, Failure> {
    match path {
        Some(p) => {
            let file: ConditionFile = read(p)?.parse().map_err(usage)?;
            Ok(condition_from_file(&file)?)
        }
        None => Ok(CertifiedCondition::vacuous(sigma_kernel(
            &named("Z").expect("Z is named"),
        ))),
    }
}

fn run(cli: Cli, out: &mut Out, input: &mut dyn BufRead) -> Result<i32, Failure> {
    let mut config = Config::default();
    if let Some(b) = cli.budget {
        config = config.with_budget(b);
    }
    if let Some(w) = cli.window {
        config.window = w;
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    match cli.command {
        Command::Words(cmd) => words(cmd, out),
        Command::Group(GroupCmd::Check { spec }) => {
            let g = group(&spec, &config)?;
            let report = check_axioms_window(&g, config.window);
            let text = match &report.violation {
                None => format!("ok {} window {}", g.name(), config.window),
                Some(v) => format!("violation {v}"),
            };
            let record = json!({
                "group": g.name(),
                "window": config.window,
                "identity": report.identity,
                "violation": report.violation.as_ref().map(ToString::to_string),
            });
            out.emit(&text, record)?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_FALSE })
        }
        Command::Group(GroupCmd::Table { spec }) => {
            let g = group(&spec, &config)?;
            table_records(out, &g.table(config.window))?;
            Ok(EXIT_OK)
        }
        Command::Marked(MarkedCmd::Contains { group: g, assign, word }) => {
            let n = kernel_of_marking(&group(&g, &config)?, &assign.parse::<Assignment>().map_err(usage)?);
            let w = parse_word(&word)?;
            let holds = n.try_contains(&w).map_err(usage)?;
            out.verdict(holds, json!({ "word": w.to_string(), "contains": holds }))
        }
        Command::Marked(MarkedCmd::Condition { file }) => {
            let parsed: ConditionFile = read(&file)?.parse().map_err(usage)?;
            match condition_from_file(&parsed) {
                Ok(c) => {
                    out.emit(
                        &format!("certified {c}"),
                        json!({ "certified": true, "condition": parsed.to_string() }),
                    )?;
                    Ok(EXIT_OK)
                }
                Err(GameError::CertificateFailed(w)) => {
                    out.emit(
                        &format!("failed {w}"),
                        json!({ "certified": false, "word": w.to_string() }),
                    )?;
                    Ok(EXIT_FALSE)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Phi { spec, word } => {
            let w = parse_word(&word)?;
            let holds = phi(&group(&spec, &config)?).try_contains(&w).map_err(usage)?;
            out.verdict(holds, json!({ "word": w.to_string(), "contains": holds }))
        }
        Command::F { spec } => {
            let f = f_map(&sigma_kernel(&group(&spec, &config)?), config.coset_budget);
            table_records(out, &f.table(config.window)?)?;
            Ok(EXIT_OK)
        }
        Command::Roundtrip { spec } => {
            let g = group(&spec, &config)?;
            let f = f_map(&sigma_kernel(&g), config.coset_budget);
            for a in 0..config.window {
                for b in 0..config.window {
                    let (got, want) = (f.try_mul(a, b)?, g.mul(a, b));
                    if got != want {
                        out.emit(
                            &format!("mismatch at ({a},{b}): f gives {got}, {} gives {want}", g.name()),
                            json!({ "match": false, "a": a, "b": b, "f": got, "g": want }),
                        )?;
                        return Ok(EXIT_FALSE);
                    }
                }
            }
            out.emit(
                &format!("match {} window {}", g.name(), config.window),
                json!({ "match": true, "group": g.name(), "window": config.window }),
            )?;
            Ok(EXIT_OK)
        }
        Command::Dm(args) => {
            let n: MarkedGroup = match (&args.spec, &args.spec_phi, &args.group, &args.assign) {
                (Some(s), None, None, _) => sigma_kernel(&group(s, &config)?),
                (None, Some(s), None, _) => phi(&group(s, &config)?),
                (None, None, Some(g), Some(a)) => {
                    kernel_of_marking(&group(g, &config)?, &a.parse::<Assignment>().map_err(usage)?)
                }
                _ => {
                    return Err(usage(
                        "dm needs exactly one of --spec, --spec-phi, --group with --assign",
                    ))
                }
            };
            let outcome = dm_check(&n, args.m, config.dm_budget);
            out.emit(
                &outcome.to_string(),
                json!({ "m": args.m, "outcome": outcome.to_string() }),
            )?;
            Ok(match outcome {
                DmOutcome::True => EXIT_OK,
                DmOutcome::False => EXIT_FALSE,
                DmOutcome::Unknown => EXIT_BUDGET,
            })
        }
        Command::Abelian(cmd) => abelian(cmd, out),
        Command::Dual(cmd) => dual(cmd, out),
        Command::Game(GameCmd::Play { rounds, initial }) => {
            let start = initial_condition(&initial)?;
            let t = play_strategy(&start, rounds, config.dm_budget, config.seed);
            transcript_records(out, &t)?;
            Ok(match &t.error {
                None => EXIT_OK,
                Some(e) if e.contains("budget") => EXIT_BUDGET,
                Some(_) => EXIT_FALSE,
            })
        }
        Command::Game(GameCmd::Repl { transcript, initial }) => {
            let mut repl = Repl::new(initial_condition(&initial)?, config.dm_budget);
            let mut line = String::new();
            loop {
                line.clear();
                let read = input
                    .read_line(&mut line)
                    .map_err(|e| usage(format!("read failed: {e}")))?;
                if read == 0 {
                    break;
                }
                let reply = repl.handle_line(&line);
                if !reply.output.is_empty() {
                    out.emit(&reply.output, json!({ "reply": reply.output }))?;
                }
                if reply.quit {
                    break;
                }
            }
            fs::write(&transcript, repl.transcript().to_string())
                .map_err(|e| usage(format!("cannot write {}: {e}", transcript.display())))?;
            Ok(EXIT_OK)
        }
    }
}

fn words(cmd: WordsCmd, out: &mut Out) -> Result<i32, Failure> {
    match cmd {
        WordsCmd::Enum { k, count, rank } => {
            let e = rank.map_or(Enumeration::FULL, Enumeration::restricted);
            for j in k..k.saturating_add(count) {
                let w = if rank.is_none() { enumerate(j) } else { e.word(j) };
                out.emit(&w.to_string(), json!({ "k": j, "word": w.to_string() }))?;
            }
            Ok(EXIT_OK)
        }
        WordsCmd::Index { word } => {
            let w = parse_word(&word)?;
            let k = Enumeration::FULL
                .try_index(&w)
                .ok_or_else(|| usage(format!("index of {w} exceeds 64 bits")))?;
            out.emit(&k.to_string(), json!({ "word": w.to_string(), "k": k }))?;
            Ok(EXIT_OK)
        }
        WordsCmd::Reduce { word } => {
            let w = parse_word(&word)?;
            out.emit(&w.to_string(), json!({ "word": w.to_string() }))?;
            Ok(EXIT_OK)
        }
        WordsCmd::Mul { left, right } => {
            let w = parse_word(&left)?.mul(&parse_word(&right)?);
            out.emit(&w.to_string(), json!({ "word": w.to_string() }))?;
            Ok(EXIT_OK)
        }
        WordsCmd::Inv { word } => {
            let w = parse_word(&word)?.inv();
            out.emit(&w.to_string(), json!({ "word": w.to_string() }))?;
            Ok(EXIT_OK)
        }
    }
}

fn abelian(cmd: AbelianCmd, out: &mut Out) -> Result<i32, Failure> {
    match cmd {
        AbelianCmd::Hnf { matrix } => {
            let (m, cols) = parse_matrix(&read(&matrix)?).map_err(usage)?;
            matrix_record(out, &hnf(&m, cols), cols)?;
            Ok(EXIT_OK)
        }
        AbelianCmd::Snf { matrix } => {
            let (m, cols) = parse_matrix(&read(&matrix)?).map_err(usage)?;
            let d: Vec<String> = snf(&m, cols).iter().map(ToString::to_string).collect();
            out.emit(&d.join(" "), json!({ "diagonal": d }))?;
            Ok(EXIT_OK)
        }
        AbelianCmd::Invariants { matrix } => {
            let inv = quotient_invariants(&read_lattice(&matrix)?);
            let torsion: Vec<String> = inv.torsion.iter().map(ToString::to_string).collect();
            out.emit(&inv.to_string(), json!({ "rank": inv.rank, "torsion": torsion }))?;
            Ok(EXIT_OK)
        }
        AbelianCmd::Contains { matrix, vector, word } => {
            let l = read_lattice(&matrix)?;
            if let Some(word) = word {
                let w = parse_word(&word)?;
                let holds = psi_preimage_marked(&l).contains(&w);
                return out.verdict(holds, json!({ "word": w.to_string(), "contains": holds }));
            }
            let text = vector.unwrap_or_default();
            let v: Vec<BigInt> = text
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<BigInt>()
                        .map_err(|_| usage(format!("bad vector entry `{x}`")))
                })
                .collect::<Result<_, _>>()?;
            if v.len() != l.ambient() {
                return Err(usage(format!("vector needs {} entries", l.ambient())));
            }
            let holds = l.contains(&v);
            let entries: Vec<String> = v.iter().map(ToString::to_string).collect();
            out.verdict(holds, json!({ "vector": entries.join(","), "contains": holds }))
        }
        AbelianCmd::Cosets { matrix, radius } => {
            let l = read_lattice(&matrix)?;
            let lattice_side = coset_count_window(&l, radius).map_err(usage)?;
            let marked_side = coset_count_window_marked(&l, radius).map_err(usage)?;
            let agree = lattice_side == marked_side;
            out.emit(
                &format!("lattice {lattice_side} marked {marked_side}"),
                json!({ "lattice": lattice_side, "marked": marked_side }),
            )?;
            Ok(if agree { EXIT_OK } else { EXIT_FALSE })
        }
    }
}

fn dual(cmd: DualCmd, out: &mut Out) -> Result<i32, Failure> {
    match cmd {
        DualCmd::Ann { file } => {
            let l = annihilator(&read_torus(&file)?);
            matrix_record(out, l.basis(), l.ambient())?;
            Ok(EXIT_OK)
        }
        DualCmd::Unann { file } => {
            let k = annihilated_subgroup(&read_lattice(&file)?);
            let text = k.to_string();
            out.emit(text.trim_end(), json!({ "torus": text }))?;
            Ok(EXIT_OK)
        }
        DualCmd::Invariants { file } => {
            let inv = dual_invariants(&read_torus(&file)?);
            let torsion: Vec<String> = inv.torsion.iter().map(ToString::to_string).collect();
            out.emit(&inv.to_string(), json!({ "rank": inv.rank, "torsion": torsion }))?;
            Ok(EXIT_OK)
        }
        DualCmd::Check { file } => {
            let l = read_lattice(&file)?;
            let k = annihilated_subgroup(&l);
            let double = annihilator(&k) == l;
            let saturated = is_saturated(&l);
            let connected = is_connected(&k);
            let holds = double && saturated == connected;
            out.emit(
                &format!("double-annihilator {double} saturated {saturated} connected {connected}"),
                json!({ "double_annihilator": double, "saturated": saturated, "connected": connected }),
            )?;
            Ok(if holds { EXIT_OK } else { EXIT_FALSE })
        }
        DualCmd::Prufer { p, k } => {
            if p < 2 || !(2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
                return Err(usage(format!("{p} is not prime")));
            }
            tower_records(out, &prufer_tower(p, k))
        }
        DualCmd::Solenoid { levels } => tower_records(out, &solenoid_tower(levels)),
    }
}

/// Parse `args` (program name first), run, and write output to `stdout`.
/// Usage errors go to `stderr`.
pub fn dispatch<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let format = match cli.format {
        Format::Text => OutputFormat::Text,
        Format::JsonLines => OutputFormat::JsonLines,
    };
    let mut out = Out { sink: stdout, format };
    match run(cli, &mut out, stdin) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String) {
        let mut argv = vec!["twospaces"];
        argv.extend_from_slice(args);
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = dispatch(argv, &mut std::io::empty(), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap() + &String::from_utf8(e).unwrap())
    }

    #[test]
    fn spec_examples() {
        assert_eq!(call(&["words", "enum", "--k", "0"]), (0, "e\n".into()));
        assert_eq!(call(&["roundtrip", "--spec", "Z", "--window", "12"]).0, 0);
        assert!(matches!(call(&["dm", "--spec-phi", "Z", "--m", "2"]).0, 1 | 3));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["words", "reduce", "--word", "x0*x0^-1"]), (0, "e\n".into()));
        assert_eq!(call(&["phi", "--spec", "Z", "--word", "x1*x2"]).0, 0);
        assert_eq!(call(&["phi", "--spec", "Z", "--word", "x1"]).0, 1);
        assert_eq!(call(&["phi", "--spec", "Cyclic(2)", "--word", "x1"]).0, 2);
        assert_eq!(call(&["words", "frobnicate"]).0, 2);
        assert_eq!(call(&["dm", "--spec", "Z", "--m", "3", "--budget", "2"]).0, 3);
        assert_eq!(call(&["dm", "--spec", "Z", "--m", "3"]).0, 0);
        assert_eq!(call(&["f", "--spec", "Z", "--budget", "1", "--window", "3"]).0, 3);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn json_lines() {
        let (code, text) = call(&["--format", "json-lines", "words", "enum", "--k", "3", "--count", "2"]);
        assert_eq!(code, 0);
        let words: Vec<Word> = text
            .lines()
            .map(|l| {
                serde_json::from_str::<Value>(l).unwrap()["word"]
                    .as_str()
                    .unwrap()
                    .parse()
                    .unwrap()
            })
            .collect();
        assert_eq!(words, vec![enumerate(3), enumerate(4)]);
    }
}
