use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use beliefvote::campaign::{campaign, CampaignConfig};
use beliefvote::decision::evaluate_move;
use beliefvote::dynamics::{equilibrium_check, Belief, GameState};
use beliefvote::election::BallotProfile;
use beliefvote::generate::{generate_instance, Family};
use beliefvote::oracles::{oracle_equilibrium, oracle_lower_expectation, oracle_pignistic, oracle_upper_expectation};
use beliefvote::rational::format_rational;
use beliefvote::scenario::{emit_scenario, load_scenario, Scenario};
use beliefvote::trace::{emit_trace, trace_records, RunSummary};
use beliefvote::uncertainty::DEFAULT_EXPANSION_CAP;
use beliefvote::{fixtures, Error};
use clap::{Parser, Subcommand};

/// Iterative plurality voting under belief-function uncertainty.
#[derive(Parser)]
#[command(name = "beliefvote", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario to equilibrium, cycle or step limit.
    Simulate {
        /// Scenario file, or the name of a shipped fixture.
        scenario: String,
        /// Write the move trace here as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the run summary here instead of stdout.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Test whether the scenario's initial ballots are an equilibrium.
    Check { scenario: String },
    /// Cross-check the fast paths against the brute-force oracles on a scenario.
    Verify { scenario: String },
    /// Run a batch of generated instances and write one CSV row per run.
    Campaign {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1000)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        min_voters: usize,
        #[arg(long, default_value_t = 6)]
        max_voters: usize,
        #[arg(long, default_value_t = 3)]
        min_candidates: usize,
        #[arg(long, default_value_t = 4)]
        max_candidates: usize,
        /// CSV output path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory receiving the scenario of every non-converging run.
        #[arg(long)]
        witness_dir: Option<PathBuf>,
    },
    /// Print a generated scenario.
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        voters: usize,
        #[arg(long, default_value_t = 3)]
        candidates: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    /// Bad input: exit 1.
    Invalid(String),
    /// A check that ran and failed: exit 2.
    Assertion(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn read_scenario(arg: &str) -> Result<Scenario, Failure> {
    let path = Path::new(arg);
    let text = if path.exists() {
        fs::read_to_string(path)?
    } else {
        fixtures::text(arg)
            .map_err(|_| Failure::Invalid(format!("{arg}: no such file or shipped fixture")))?
            .to_string()
    };
    Ok(load_scenario(&text)?)
}

fn write_or_print(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

fn simulate(arg: &str, trace: Option<&Path>, summary: Option<&Path>) -> CliResult {
    let scenario = read_scenario(arg)?;
    let outcome = scenario.run()?;
    if let Some(path) = trace {
        fs::write(path, emit_trace(&trace_records(&outcome, &scenario.candidates)))?;
    }
    let json = serde_json::to_string_pretty(&RunSummary::new(&outcome, &scenario)).expect("summary serializes");
    write_or_print(summary, &(json + "\n"))?;
    Ok(())
}

fn check(arg: &str) -> CliResult {
    let s = read_scenario(arg)?;
    let report = equilibrium_check(&s.initial, &s.voters, &s.tie)?;
    println!("equilibrium: {}", report.is_equilibrium);
    if let Some(w) = report.witness {
        let c = &s.candidates;
        println!(
            "witness: voter {} {} -> {} (criterion {})",
            w.voter,
            c.label(w.from),
            c.label(w.to),
            format_rational(&w.evaluation.criterion_value)
        );
    }
    Ok(())
}

/// Returns the number of comparisons made, or the first disagreement.
fn verify_state(s: &Scenario, state: &GameState, label: &str) -> Result<usize, Failure> {
    let fast = equilibrium_check(state, &s.voters, &s.tie)?.is_equilibrium;
    let slow = oracle_equilibrium(state, &s.voters, &s.tie)?;
    if fast != slow {
        return Err(Failure::Assertion(format!(
            "{label}: equilibrium_check says {fast}, oracle says {slow}"
        )));
    }
    let mut checks = 1;
    let score = state.score(s.candidates.len());
    for (i, v) in s.voters.iter().enumerate() {
        let mass = match &v.belief {
            Belief::Fixed(m) => m.clone(),
            Belief::Layered(spec) => spec.mass_around(&score, DEFAULT_EXPANSION_CAP)?,
        };
        if oracle_pignistic(&mass)? != mass.pignistic() {
            return Err(Failure::Assertion(format!("{label}: voter {i} pignistic disagrees")));
        }
        checks += 1;
        let from = state.profile.ballot(i);
        for to in 0..s.candidates.len() {
            let u = |x: &_| beliefvote::decision::move_utility(v.utility, &v.preference, from, to, x, &s.tie);
            let (lo, hi) = match (oracle_lower_expectation(&mass, u), oracle_upper_expectation(&mass, u)) {
                (Ok(lo), Ok(hi)) => (lo, hi),
                // larger than the selection oracle accepts
                (Err(Error::CapExceeded { .. }), _) | (_, Err(Error::CapExceeded { .. })) => continue,
                (Err(e), _) | (_, Err(e)) => return Err(e.into()),
            };
            let e = evaluate_move(&mass, &v.rule, v.utility, &v.preference, from, to, &s.tie);
            if e.lower != lo || e.upper != hi {
                return Err(Failure::Assertion(format!(
                    "{label}: voter {i} move to {} expectations disagree",
                    s.candidates.label(to)
                )));
            }
            checks += 1;
        }
    }
    Ok(checks)
}

fn verify(arg: &str) -> CliResult {
    let s = read_scenario(arg)?;
    let mut checks = verify_state(&s, &s.initial, "initial state")?;
    let outcome = s.run()?;
    let mut state = s.initial.clone();
    for (k, mv) in outcome.trace.iter().enumerate() {
        let mut ballots = state.profile.ballots().to_vec();
        ballots[mv.voter] = mv.to;
        state = GameState {
            profile: BallotProfile::new(ballots, &s.candidates)?,
            step: state.step + 1,
            next_voter: (mv.voter + 1) % s.voters.len(),
        };
        checks += verify_state(&s, &state, &format!("after move {k}"))?;
    }
    println!("verify: {checks} checks agree ({} states)", outcome.trace.len() + 1);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_campaign(
    family: &str,
    count: u64,
    seed: u64,
    voters: (usize, usize),
    candidates: (usize, usize),
    out: Option<&Path>,
    witness_dir: Option<&Path>,
) -> CliResult {
    let family: Family = family.parse()?;
    if voters.0 == 0 || voters.0 > voters.1 || candidates.0 < 3 || candidates.0 > candidates.1 {
        return Err(Failure::Invalid(
            "voter or candidate range is empty or too small".into(),
        ));
    }
    let config = CampaignConfig {
        family,
        base_seed: seed,
        count,
        voters,
        candidates,
    };
    let summary = campaign(&config)?;

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["seed", "status", "steps", "cycle_len"])
        .map_err(io::Error::from)?;
    for r in &summary.rows {
        let cycle = r.cycle_len.map(|c| c.to_string()).unwrap_or_default();
        csv.write_record([
            r.seed.to_string(),
            r.status.as_str().to_string(),
            r.steps.to_string(),
            cycle,
        ])
        .map_err(io::Error::from)?;
    }
    let bytes = csv.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
    write_or_print(out, &String::from_utf8(bytes).expect("csv output is utf-8"))?;

    if let Some(dir) = witness_dir {
        fs::create_dir_all(dir)?;
        for r in summary.rows.iter().filter(|r| summary.witnesses.contains(&r.seed)) {
            let file = generate_instance(r.seed, r.voters, r.candidates, family)?;
            fs::write(dir.join(format!("{}_{}.toml", family, r.seed)), emit_scenario(&file))?;
        }
    }
    eprintln!(
        "{}: {} runs, {} converged, {} cycles, {} step limits, convergence rate {}, max steps {}",
        family,
        summary.count,
        summary.converged,
        summary.cycles,
        summary.step_limits,
        format_rational(&summary.convergence_rate),
        summary.max_steps_observed
    );
    if summary.failed(family) {
        return Err(Failure::Assertion(format!(
            "{family} campaign failed; non-converging seeds: {:?}, off-winner moves: {}",
            summary.witnesses, summary.off_winner_moves
        )));
    }
    Ok(())
}

fn gen(family: &str, seed: u64, voters: usize, candidates: usize, out: Option<&Path>) -> CliResult {
    let file = generate_instance(seed, voters, candidates, family.parse()?)?;
    write_or_print(out, &emit_scenario(&file))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate {
            scenario,
            trace,
            summary,
        } => simulate(scenario, trace.as_deref(), summary.as_deref()),
        Command::Check { scenario } => check(scenario),
        Command::Verify { scenario } => verify(scenario),
        Command::Campaign {
            family,
            count,
            seed,
            min_voters,
            max_voters,
            min_candidates,
            max_candidates,
            out,
            witness_dir,
        } => run_campaign(
            family,
            *count,
            *seed,
            (*min_voters, *max_voters),
            (*min_candidates, *max_candidates),
            out.as_deref(),
            witness_dir.as_deref(),
        ),
        Command::Gen {
            family,
            seed,
            voters,
            candidates,
            out,
        } => gen(family, *seed, *voters, *candidates, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Assertion(msg)) => {
            eprintln!("failed: {msg}");
            ExitCode::from(2)
        }
    }
}
