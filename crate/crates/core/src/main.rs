//! Command-line front end: solve an instance with one strategy, or run all
//! three and compare their effort and solutions.
//!
//! Exit codes: 0 solution(s) found, 1 no solution (or strategies disagree in
//! `compare`), 2 usage or input error, 3 trial budget exhausted.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use backjump::engine::{solve, SearchLimits, SearchOutcome, SolveMode, Strategy, TraceEvent};
use backjump::model::CspInstance;
use backjump::problems::{paper_problem, parse_instance, queens};

#[derive(Parser)]
#[command(
    name = "backjump",
    about = "Finite-domain CSP search with chronological backtracking and conflict-directed backjumping"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance with one strategy.
    Solve(SolveArgs),
    /// Run chrono, alg1 and alg2 on the same instance and compare them.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArg,
    /// Search strategy: chrono | alg1 | alg2
    #[arg(long, value_parser = parse_strategy)]
    strategy: Strategy,
    #[command(flatten)]
    run: RunArgs,
    /// Stats format: text | json
    #[arg(long, default_value = "text", value_parser = parse_stats_format)]
    stats: StatsFormat,
    /// Write the search trace to this file, one event per line
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Do not print solution rows
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    problem: ProblemArg,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct ProblemArg {
    /// Instance: paper:V,K | queens:N | file:PATH
    #[arg(long, value_parser = ProblemSpec::from_str)]
    problem: ProblemSpec,
}

#[derive(Args)]
struct RunArgs {
    /// Solution quota: first | all | limit:N
    #[arg(long, default_value = "first", value_parser = parse_mode)]
    mode: SolveMode,
    /// Trial budget; 0 disables the guard
    #[arg(long, value_name = "N", default_value_t = 50_000_000)]
    max_trials: u64,
}

impl RunArgs {
    fn limits(&self) -> SearchLimits {
        SearchLimits {
            max_trials: if self.max_trials == 0 {
                None
            } else {
                Some(self.max_trials)
            },
        }
    }
}

#[derive(Clone)]
enum ProblemSpec {
    Paper { var_card: u32, value_card: u32 },
    Queens { n: u32 },
    File(PathBuf),
}

impl FromStr for ProblemSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| format!("`{s}` is not of the form paper:V,K | queens:N | file:PATH"))?;
        match kind {
            "paper" => {
                let (v, k) = rest
                    .split_once(',')
                    .ok_or_else(|| format!("`{rest}` is not of the form V,K"))?;
                let var_card = v
                    .parse()
                    .map_err(|_| format!("`{v}` is not a variable count"))?;
                let value_card = k
                    .parse()
                    .map_err(|_| format!("`{k}` is not a value count"))?;
                Ok(ProblemSpec::Paper {
                    var_card,
                    value_card,
                })
            }
            "queens" => {
                let n = rest
                    .parse()
                    .map_err(|_| format!("`{rest}` is not a board size"))?;
                Ok(ProblemSpec::Queens { n })
            }
            "file" => Ok(ProblemSpec::File(PathBuf::from(rest))),
            other => Err(format!("unknown problem kind `{other}`")),
        }
    }
}

impl ProblemSpec {
    fn load(&self) -> Result<CspInstance, String> {
        match self {
            ProblemSpec::Paper {
                var_card,
                value_card,
            } => Ok(paper_problem(*var_card, *value_card)),
            ProblemSpec::Queens { n } => Ok(queens(*n)),
            ProblemSpec::File(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()))
            }
        }
    }
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    match s {
        "chrono" => Ok(Strategy::Chrono),
        "alg1" => Ok(Strategy::Alg1),
        "alg2" => Ok(Strategy::Alg2),
        other => Err(format!(
            "unknown strategy `{other}` (expected chrono, alg1 or alg2)"
        )),
    }
}

fn parse_mode(s: &str) -> Result<SolveMode, String> {
    match s {
        "first" => Ok(SolveMode::First),
        "all" => Ok(SolveMode::All),
        _ => {
            let n = s
                .strip_prefix("limit:")
                .ok_or_else(|| format!("unknown mode `{s}` (expected first, all or limit:N)"))?;
            let n: u64 = n
                .parse()
                .map_err(|_| format!("`{n}` is not a solution count"))?;
            if n == 0 {
                return Err("limit must be at least 1".into());
            }
            Ok(SolveMode::Limit(n))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum StatsFormat {
    Text,
    Json,
}

fn parse_stats_format(s: &str) -> Result<StatsFormat, String> {
    match s {
        "text" => Ok(StatsFormat::Text),
        "json" => Ok(StatsFormat::Json),
        other => Err(format!(
            "unknown stats format `{other}` (expected text or json)"
        )),
    }
}

#[derive(serde::Serialize)]
struct StatsRecord {
    trials: u64,
    consistency_checks: u64,
    local_conflicts: u64,
    exhaustions: u64,
    backjumps: u64,
    solutions: u64,
    termination: String,
}

impl StatsRecord {
    fn of(outcome: &SearchOutcome) -> Self {
        StatsRecord {
            trials: outcome.stats.trials,
            consistency_checks: outcome.stats.consistency_checks,
            local_conflicts: outcome.stats.local_conflicts,
            exhaustions: outcome.stats.exhaustions,
            backjumps: outcome.stats.backjumps,
            solutions: outcome.stats.solutions,
            termination: outcome.termination.to_string(),
        }
    }
}

fn solution_row(solution: &backjump::engine::Solution) -> String {
    let cells: Vec<String> = solution
        .iter()
        .map(|a| format!("{}={}", a.var, a.value))
        .collect();
    cells.join(" ")
}

fn exit_code(outcome: &SearchOutcome) -> u8 {
    use backjump::engine::Termination;
    match outcome.termination {
        Termination::LimitReached => 3,
        _ if outcome.solutions.is_empty() => 1,
        _ => 0,
    }
}

fn run_solve(args: &SolveArgs) -> Result<u8, String> {
    let instance = args.problem.problem.load()?;
    let mut events: Vec<TraceEvent> = Vec::new();
    let sink: Option<&mut dyn backjump::engine::TraceSink> = if args.trace.is_some() {
        Some(&mut events)
    } else {
        None
    };
    let outcome = solve(
        &instance,
        args.strategy,
        args.run.mode,
        args.run.limits(),
        sink,
    );
    if let Some(path) = &args.trace {
        let mut text = String::new();
        for event in &events {
            text.push_str(&event.to_string());
            text.push('\n');
        }
        fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    if !args.quiet {
        for solution in &outcome.solutions {
            println!("{}", solution_row(solution));
        }
    }
    match args.stats {
        StatsFormat::Text => print!("{}", outcome.stats_text()),
        StatsFormat::Json => {
            let record = StatsRecord::of(&outcome);
            println!(
                "{}",
                serde_json::to_string(&record).expect("stats serialize")
            );
        }
    }
    Ok(exit_code(&outcome))
}

fn run_compare(args: &CompareArgs) -> Result<u8, String> {
    let instance = args.problem.problem.load()?;
    let limits = args.run.limits();
    let outcomes: Vec<(Strategy, SearchOutcome)> = Strategy::ALL
        .iter()
        .map(|&strategy| {
            (
                strategy,
                solve(&instance, strategy, args.run.mode, limits, None),
            )
        })
        .collect();
    for (strategy, outcome) in &outcomes {
        let s = &outcome.stats;
        println!(
            "strategy={} trials={} consistency_checks={} local_conflicts={} exhaustions={} \
             backjumps={} solutions={} termination={}",
            strategy,
            s.trials,
            s.consistency_checks,
            s.local_conflicts,
            s.exhaustions,
            s.backjumps,
            s.solutions,
            outcome.termination
        );
    }
    let identical = outcomes
        .windows(2)
        .all(|w| w[0].1.solutions == w[1].1.solutions);
    println!(
        "solutions: {}",
        if identical { "identical" } else { "different" }
    );
    if outcomes
        .iter()
        .any(|(_, o)| o.termination == backjump::engine::Termination::LimitReached)
    {
        return Ok(3);
    }
    if !identical {
        return Ok(1);
    }
    Ok(exit_code(&outcomes[0].1))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Compare(args) => run_compare(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
