//! Command-line interface. Exit codes: 0 accepted or in agreement, 1 rejected
//! or in disagreement, 2 input error, 3 formula budget exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::construction::{recognized_set, recognized_set_observed, ConstructionError, ParamFormula};
use crate::diagram::{render, DiagramSpec};
use crate::dynamics::{basic_sequence, takeoff, Direction, End, TakeoffOutcome};
use crate::fuzz::{random_systems, FuzzConfig};
use crate::model::{bounds_profile, BoundsProfile, MultiSystem};
use crate::presburger::UltimatelyPeriodicSet;
use crate::sim::{accepts, run as simulate, SimError};
use crate::spec_file::{load_system, serialize_system, SpecError};

pub const EXIT_ACCEPT: i32 = 0;
pub const EXIT_REJECT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "multiauto",
    version,
    about = "Unary two-way multiautomata with bounded broadcast"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the system on a tape of length N and print the trace.
    Simulate {
        spec: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Print basic-sequence profiles, take-off outcomes and bounds as JSON.
    Analyze { spec: PathBuf },
    /// Print the set of accepted lengths.
    Extract {
        spec: PathBuf,
        /// Also print the intermediate formulas of one stage.
        #[arg(long, value_enum)]
        dump_formula: Option<DumpStage>,
    },
    /// Compare the extracted set with the simulator on lengths 0..=n-max.
    Verify {
        spec: PathBuf,
        #[arg(long, default_value_t = 300)]
        n_max: usize,
        /// Flip membership of one length in the extracted set.
        #[arg(long, hide = true)]
        corrupt: Option<usize>,
    },
    /// Verify pseudo-random systems.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_states: usize,
        #[arg(long, default_value_t = 3)]
        max_automata: usize,
        #[arg(long, default_value_t = 3)]
        max_messages: usize,
        #[arg(long, default_value_t = 200)]
        n_max: usize,
        /// Print every generated system before its verdict.
        #[arg(long)]
        print_specs: bool,
    },
    /// Draw the run on a tape of length N as SVG.
    Diagram {
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        /// Output file; standard output when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum DumpStage {
    Frontier,
    Accept,
    Condition,
    All,
}

impl DumpStage {
    fn includes(self, stage: &str) -> bool {
        match self {
            DumpStage::All => true,
            DumpStage::Frontier => stage == "frontier",
            DumpStage::Accept => stage == "accept",
            DumpStage::Condition => stage == "condition",
        }
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run(
    args: impl IntoIterator<Item = impl Into<OsString> + Clone>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_ACCEPT };
        }
    };
    let mut io = Io { out, err };
    let code = match cli.command {
        Command::Simulate { spec, n } => with_system(&spec, &mut io, |sys, io| cmd_simulate(sys, n, io)),
        Command::Analyze { spec } => with_system(&spec, &mut io, cmd_analyze),
        Command::Extract { spec, dump_formula } => {
            with_system(&spec, &mut io, |sys, io| cmd_extract(sys, dump_formula, io))
        }
        Command::Verify { spec, n_max, corrupt } => {
            with_system(&spec, &mut io, |sys, io| cmd_verify(sys, n_max, corrupt, io))
        }
        Command::Fuzz {
            count,
            seed,
            max_states,
            max_automata,
            max_messages,
            n_max,
            print_specs,
        } => {
            let cfg = FuzzConfig {
                max_states,
                max_automata,
                max_messages,
            };
            cmd_fuzz(count, seed, &cfg, n_max, print_specs, &mut io)
        }
        Command::Diagram { spec, n, output } => {
            with_system(&spec, &mut io, |sys, io| cmd_diagram(sys, n, output.as_deref(), io))
        }
    };
    let _ = io.out.flush();
    code
}

fn with_system(path: &std::path::Path, io: &mut Io, f: impl FnOnce(&MultiSystem, &mut Io) -> i32) -> i32 {
    match load_system(path) {
        Ok(sys) => f(&sys, io),
        Err(e @ SpecError::Io { .. }) => {
            let _ = writeln!(io.err, "error: {e}");
            EXIT_INPUT
        }
        Err(e) => {
            let _ = writeln!(io.err, "error: {}: {e}", path.display());
            EXIT_INPUT
        }
    }
}

fn sim_error(io: &mut Io, e: SimError) -> i32 {
    let _ = writeln!(io.err, "error: {e}");
    EXIT_INPUT
}

fn construction_error(io: &mut Io, e: ConstructionError) -> i32 {
    let _ = match e.stage() {
        Some(_) => writeln!(io.err, "error: {e}"),
        None => writeln!(io.err, "error: stage `construction`: {e}"),
    };
    if e.is_budget() {
        EXIT_BUDGET
    } else {
        EXIT_INPUT
    }
}

fn cmd_simulate(sys: &MultiSystem, n: usize, io: &mut Io) -> i32 {
    match simulate(sys, n) {
        Ok(trace) => {
            let _ = write!(io.out, "{}", trace.to_log(sys));
            if trace.outcome.is_accepted() {
                EXIT_ACCEPT
            } else {
                EXIT_REJECT
            }
        }
        Err(e) => sim_error(io, e),
    }
}

#[derive(Serialize)]
struct StateReport {
    state: String,
    k: usize,
    l: usize,
    lambda: Vec<i64>,
    c: i64,
    direction: Direction,
    amplitude: i64,
    takeoff_left: TakeoffOutcome,
    takeoff_right: TakeoffOutcome,
}

#[derive(Serialize)]
struct AutomatonReport {
    name: String,
    states: Vec<StateReport>,
}

#[derive(Serialize)]
struct AnalysisReport {
    bounds: BoundsReport,
    automata: Vec<AutomatonReport>,
}

#[derive(Serialize)]
struct BoundsReport {
    k: usize,
    g: usize,
    n_min: usize,
}

impl From<BoundsProfile> for BoundsReport {
    fn from(b: BoundsProfile) -> Self {
        BoundsReport {
            k: b.k,
            g: b.g,
            n_min: b.n_min,
        }
    }
}

fn analyze(sys: &MultiSystem) -> Result<AnalysisReport, crate::dynamics::DynamicsError> {
    let bounds = bounds_profile(sys);
    let mut automata = Vec::new();
    for a in sys.automata() {
        let mut states = Vec::new();
        for s in a.states() {
            let p = basic_sequence(a, s);
            states.push(StateReport {
                state: a.state_name(s).to_string(),
                k: p.k(),
                l: p.l(),
                lambda: p.lambda.clone(),
                c: p.c(),
                direction: p.direction,
                amplitude: p.amplitude,
                takeoff_left: takeoff(a, s, End::Left, bounds.n_min)?,
                takeoff_right: takeoff(a, s, End::Right, bounds.n_min)?,
            });
        }
        automata.push(AutomatonReport {
            name: a.name().to_string(),
            states,
        });
    }
    Ok(AnalysisReport {
        bounds: bounds.into(),
        automata,
    })
}

fn cmd_analyze(sys: &MultiSystem, io: &mut Io) -> i32 {
    match analyze(sys) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).expect("reports always serialize");
            let _ = writeln!(io.out, "{text}");
            EXIT_ACCEPT
        }
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn cmd_extract(sys: &MultiSystem, dump: Option<DumpStage>, io: &mut Io) -> i32 {
    let out = &mut *io.out;
    let mut observe = |stage: &str, label: &str, f: &ParamFormula| {
        if dump.is_some_and(|d| d.includes(stage)) {
            let _ = writeln!(out, "; {stage} {label}\n{f}");
        }
    };
    let result = recognized_set_observed(sys, &mut observe);
    match result {
        Ok(set) => {
            let _ = writeln!(io.out, "{set}");
            EXIT_ACCEPT
        }
        Err(e) => construction_error(io, e),
    }
}

/// First length in `0..=n_max` on which `set` and the simulator disagree.
pub fn first_disagreement(
    sys: &MultiSystem,
    set: &UltimatelyPeriodicSet,
    n_max: usize,
) -> Result<Option<usize>, SimError> {
    for n in 0..=n_max {
        if set.contains(n) != accepts(sys, n)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

fn corrupted(set: &UltimatelyPeriodicSet, at: usize) -> UltimatelyPeriodicSet {
    let t = set.threshold().max(at + 1);
    UltimatelyPeriodicSet::from_fn(t, set.period(), |n| set.contains(n) != (n == at))
}

fn cmd_verify(sys: &MultiSystem, n_max: usize, corrupt: Option<usize>, io: &mut Io) -> i32 {
    let set = match recognized_set(sys) {
        Ok(s) => s,
        Err(e) => return construction_error(io, e),
    };
    let set = match corrupt {
        Some(at) => corrupted(&set, at),
        None => set,
    };
    match first_disagreement(sys, &set, n_max) {
        Ok(None) => {
            let _ = writeln!(io.out, "OK {}", n_max + 1);
            EXIT_ACCEPT
        }
        Ok(Some(n)) => {
            let _ = writeln!(
                io.out,
                "MISMATCH N={n}: extracted {}, simulated {}",
                set.contains(n),
                !set.contains(n)
            );
            EXIT_REJECT
        }
        Err(e) => sim_error(io, e),
    }
}

fn cmd_fuzz(count: usize, seed: u64, cfg: &FuzzConfig, n_max: usize, print_specs: bool, io: &mut Io) -> i32 {
    let (mut ok, mut mismatches, mut budget) = (0, 0, 0);
    for (i, sys) in random_systems(seed, count, cfg).iter().enumerate() {
        if print_specs {
            let _ = write!(io.out, "# system {i}\n{}", serialize_system(sys));
        }
        let verdict = match recognized_set(sys) {
            Ok(set) => match first_disagreement(sys, &set, n_max) {
                Ok(None) => None,
                Ok(Some(n)) => Some(format!("mismatch at N={n}")),
                Err(e) => Some(e.to_string()),
            },
            Err(e) => {
                if e.is_budget() {
                    budget += 1;
                } else {
                    mismatches += 1;
                }
                let _ = write!(io.out, "FAIL #{i}: {e}\n{}", serialize_system(sys));
                continue;
            }
        };
        match verdict {
            None => ok += 1,
            Some(reason) => {
                mismatches += 1;
                let _ = write!(io.out, "FAIL #{i}: {reason}\n{}", serialize_system(sys));
            }
        }
    }
    let _ = writeln!(io.out, "{ok}/{count} OK");
    if mismatches > 0 {
        EXIT_REJECT
    } else if budget > 0 {
        EXIT_BUDGET
    } else {
        EXIT_ACCEPT
    }
}

fn cmd_diagram(sys: &MultiSystem, n: usize, output: Option<&std::path::Path>, io: &mut Io) -> i32 {
    let trace = match simulate(sys, n) {
        Ok(t) => t,
        Err(e) => return sim_error(io, e),
    };
    let svg = render(sys, &trace, &DiagramSpec::for_system(sys));
    match output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, svg) {
                let _ = writeln!(io.err, "error: {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => {
            let _ = io.out.write_all(svg.as_bytes());
        }
    }
    EXIT_ACCEPT
}
