//! The `cascade` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 capacity error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::cascade::Condition;
use crate::error::CascadeError;
use crate::f2linalg::{combine_stars, solve_star_span, F2Vector};
use crate::forest::{parse_node_list, NodeId, PredecessorForest};
use crate::names::{CoordinateBox, SweepConfig};
use crate::selectors::swap_witness;
use crate::verify::{self, Lemma, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "cascade",
    version,
    about = "Forests, star spans and cascade automorphisms on finite conditions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a forest file or list the closure of a node set.
    #[command(subcommand)]
    Forest(ForestCommand),
    /// Write a 0/1 target on a closed window as a sum of star vectors.
    Starspan {
        #[arg(long = "in")]
        input: PathBuf,
        /// Closed window, e.g. "0 1 2" or "0,1,2".
        #[arg(long)]
        window: String,
        /// One 0/1 character per window node, in ascending node order.
        #[arg(long)]
        target: String,
    },
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Demonstrations built on the library.
    #[command(subcommand)]
    Demo(DemoCommand),
}

#[derive(Subcommand, Debug)]
enum ForestCommand {
    Gen {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Closure {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "")]
        set: String,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// One of the lemma ids; omit with --all.
    lemma: Option<String>,
    #[arg(long)]
    all: bool,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    exhaustive: bool,
    #[arg(long, default_value_t = 12)]
    max_window: usize,
    #[arg(long, default_value_t = 3)]
    dim: u32,
    /// Box shape `N,R,B` for the name runs.
    #[arg(long = "box")]
    box_shape: Option<String>,
}

#[derive(Subcommand, Debug)]
enum DemoCommand {
    /// Build and certify the complement-swap witness for a condition file.
    NoSelector {
        #[arg(long = "in")]
        input: PathBuf,
        /// Closed support window.
        #[arg(long)]
        support: String,
        #[arg(long, default_value_t = 0)]
        row: u32,
        /// Forest file; defaults to the star forest on the box's nodes.
        #[arg(long, conflicts_with = "seed")]
        forest: Option<PathBuf>,
        /// Use a random forest with this seed instead.
        #[arg(long)]
        seed: Option<u64>,
    },
}

enum Failure {
    Usage(String),
    Lib(CascadeError),
    Verify,
}

impl From<CascadeError> for Failure {
    fn from(e: CascadeError) -> Self {
        Failure::Lib(e)
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Verify) => EXIT_VERIFY_FAILED,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                CascadeError::Capacity(_) => EXIT_CAPACITY,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Forest(ForestCommand::Gen {
            size,
            seed,
            out: path,
        }) => {
            let text = PredecessorForest::random(size, seed)?.to_text();
            match path {
                Some(p) => fs::write(&p, text)
                    .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
                None => emit(out, &text),
            }
        }
        Command::Forest(ForestCommand::Closure { input, set }) => {
            let forest = PredecessorForest::parse_text(&read(&input)?)?;
            let closure = forest.rho_closure(parse_node_list(&set)?)?;
            if closure.is_empty() {
                Ok(())
            } else {
                emit(out, &format!("{closure}\n"))
            }
        }
        Command::Starspan {
            input,
            window,
            target,
        } => {
            let forest = PredecessorForest::parse_text(&read(&input)?)?;
            let k = forest.window(parse_node_list(&window)?)?;
            let target = F2Vector::parse_bits(&k, &target)?;
            let coefficients = solve_star_span(&k, &target)?;
            let rebuilt = combine_stars(&k, coefficients.iter().copied())?;
            assert_eq!(
                rebuilt, target,
                "star-span solution must reconstruct the target"
            );
            let list: Vec<String> = coefficients.iter().map(|n| n.to_string()).collect();
            emit(
                out,
                &format!(
                    "coefficients: {}\nreconstruction: {} (verified)\n",
                    list.join(" "),
                    rebuilt.to_bit_string()
                ),
            )
        }
        Command::Verify(args) => cmd_verify(args, out),
        Command::Demo(DemoCommand::NoSelector {
            input,
            support,
            row,
            forest,
            seed,
        }) => {
            let (header, q) = Condition::parse_text(&read(&input)?)?;
            let n = header.nodes as usize;
            let forest = match (forest, seed) {
                (Some(path), _) => PredecessorForest::parse_text(&read(&path)?)?,
                (None, Some(seed)) => PredecessorForest::random(n, seed)?,
                (None, None) => PredecessorForest::star(n)?,
            };
            if forest.universe_size() < n {
                return Err(Failure::Usage(format!(
                    "forest has {} nodes but the box needs {n}",
                    forest.universe_size()
                )));
            }
            let nodes = forest.window((0..header.nodes).map(NodeId))?;
            let cbox = CoordinateBox::new(nodes, header.rows, header.bits)?;
            let a = forest.window(parse_node_list(&support)?)?;
            let witness = swap_witness(&q, &a, row, &cbox, &SweepConfig::default())?;
            emit(out, &witness.to_text())?;
            if witness.certificate.all_pass() {
                Ok(())
            } else {
                Err(Failure::Verify)
            }
        }
    }
}

fn parse_box(text: &str) -> Result<(usize, u32, u32), Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || {
        Failure::Usage(format!(
            "--box expects N,R,B with positive integers, got `{text}`"
        ))
    };
    let [n, r, b] = parts[..] else {
        return Err(bad());
    };
    let n: usize = n.parse().map_err(|_| bad())?;
    let r: u32 = r.parse().map_err(|_| bad())?;
    let b: u32 = b.parse().map_err(|_| bad())?;
    if n == 0 || r == 0 || b == 0 || n * (r * b) as usize > 20 {
        return Err(Failure::Usage(format!(
            "--box {text}: need N,R,B ≥ 1 and N·R·B ≤ 20"
        )));
    }
    Ok((n, r, b))
}

fn cmd_verify(args: VerifyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let config = VerifyConfig {
        trials: args.trials,
        seed: args.seed,
        exhaustive: args.exhaustive,
        max_window: args.max_window,
        dim: args.dim,
        box_shape: args.box_shape.as_deref().map(parse_box).transpose()?,
    };
    let reports = match (args.all, args.lemma) {
        (true, None) => verify::run_all(&config),
        (false, Some(id)) => {
            let lemma: Lemma = id
                .parse()
                .map_err(|e: CascadeError| Failure::Usage(e.to_string()))?;
            vec![verify::run(lemma, &config)]
        }
        (true, Some(_)) => return Err(Failure::Usage("give a lemma id or --all, not both".into())),
        (false, None) => {
            let ids: Vec<&str> = Lemma::ALL.iter().map(|l| l.id()).collect();
            return Err(Failure::Usage(format!(
                "missing lemma id; valid ids: {}",
                ids.join(", ")
            )));
        }
    };
    let mut text = String::new();
    for r in &reports {
        text.push_str(&r.to_string());
    }
    emit(out, &text)?;
    if reports.iter().all(|r| r.passed()) {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}
