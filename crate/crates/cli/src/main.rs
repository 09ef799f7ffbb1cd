use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use abcrules::axioms::find_dominator;
use abcrules::constructions::{evaluate, gen, ExpectedRatio, Family};
use abcrules::exact::{budget_from_env, optimal_phragmen_load, Enumerator};
use abcrules::guarantees::{guarantee_bounds, BoundRule, GuaranteeBounds, Optima};
use abcrules::harness::{decimal, read_profile, run_experiment, write_profile, ExperimentConfig};
use abcrules::rules::parse_rational;
use abcrules::scoring::{monroe_score, thiele_score};
use abcrules::sequential::{greedy_monroe, seq_phragmen, seq_thiele};
use abcrules::{ApprovalProfile, Committee, Error, Execution, Result, Rule, RuleId};
use clap::{Parser, Subcommand};

/// Exact approval-based committee elections.
#[derive(Parser)]
#[command(name = "abcrules", version)]
struct Cli {
    /// Maximum number of committees an exhaustive search may visit.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Run enumeration on a single thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Winning committees of a rule.
    Winners {
        rule: String,
        /// Profile file in the native format, `-` for stdin.
        profile: PathBuf,
        #[arg(short)]
        k: usize,
    },
    /// Score of a committee under an optimal rule.
    Score { rule: String, profile: PathBuf, committee: String },
    /// AV- and CC-ratios of rules on one profile.
    Ratios {
        profile: PathBuf,
        #[arg(short)]
        k: usize,
        /// Comma separated rules; defaults to the experiment rule list.
        #[arg(long, value_delimiter = ',')]
        rules: Vec<String>,
    },
    /// Run an experiment described by a config file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Look for a committee dominating the given one.
    CheckEfficiency {
        profile: PathBuf,
        #[arg(short)]
        k: usize,
        committee: String,
    },
    /// Print a worst-case profile family in the native format.
    Construct {
        family: String,
        #[arg(short)]
        k: usize,
        #[arg(short)]
        x: usize,
        #[arg(short)]
        p: Option<String>,
        /// Also report the ratio the family is built to reach.
        #[arg(long)]
        check: bool,
    },
    /// Guaranteed AV- and CC-ratio intervals of a rule.
    Bounds {
        rule: String,
        #[arg(short)]
        k: usize,
        #[arg(short)]
        p: Option<f64>,
    },
}

fn load(path: &Path) -> Result<ApprovalProfile> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path)?
    };
    read_profile(&text)
}

fn committees_of(rule: &Rule, profile: &ApprovalProfile, k: usize, e: &Enumerator) -> Result<()> {
    println!("rule: {rule}");
    println!("k: {k}");
    match rule {
        Rule::Optimal(id) => {
            let outcome = e.winners(id, profile, k)?;
            let label = if matches!(id, RuleId::OptPhragmen) { "max load" } else { "optimum" };
            println!("{label}: {}", outcome.optimum);
            println!("winners: {}", outcome.winners.len());
            for w in &outcome.winners {
                println!("{w}");
            }
        }
        Rule::Sequential(t) => {
            let (w, trace) = seq_thiele(t, profile, k)?;
            print_rounds(&w, &trace);
        }
        Rule::GreedyMonroe => {
            let (w, trace) = greedy_monroe(profile, k)?;
            print_rounds(&w, &trace);
        }
        Rule::SeqPhragmen => {
            let (w, trace, loads) = seq_phragmen(profile, k)?;
            print_rounds(&w, &trace);
            println!("max load: {}", loads.max());
        }
    }
    Ok(())
}

fn print_rounds(w: &Committee, trace: &abcrules::sequential::SeqTrace) {
    println!("committee: {w}");
    for (i, round) in trace.rounds.iter().enumerate() {
        println!("round {}: candidate {} value {}", i + 1, round.candidate, round.value);
    }
}

fn score(rule: &Rule, profile: &ApprovalProfile, w: &Committee) -> Result<()> {
    let value = match rule {
        Rule::Optimal(RuleId::Monroe) => monroe_score(profile, w)?.0,
        Rule::Optimal(RuleId::OptPhragmen) => optimal_phragmen_load(profile, w)?,
        Rule::Optimal(id) => thiele_score(&id.thiele().expect("thiele rule"), profile, w)?,
        other => return Err(Error::Parameter(format!("{other} has no committee score"))),
    };
    println!("{value}");
    Ok(())
}

fn ratios(profile: &ApprovalProfile, k: usize, rules: &[String], e: &Enumerator) -> Result<()> {
    let rules: Vec<Rule> = if rules.is_empty() {
        Rule::experiment_defaults()
    } else {
        rules.iter().map(|r| r.parse()).collect::<Result<_>>()?
    };
    let optima = Optima::compute(profile, k, e)?;
    println!("rule,k,av_ratio_exact,av_ratio,cc_ratio_exact,cc_ratio");
    for rule in &rules {
        let report = optima.report(profile, rule, &e.committees(rule, profile, k)?)?;
        println!(
            "{rule},{k},{},{},{},{}",
            report.av_ratio,
            decimal(&report.av_ratio, 12),
            report.cc_ratio,
            decimal(&report.cc_ratio, 12)
        );
    }
    Ok(())
}

fn interval(b: &GuaranteeBounds) -> String {
    if b.lower == b.upper {
        format!("{:.12}", b.lower)
    } else {
        format!("[{:.12}, {:.12}]", b.lower, b.upper)
    }
}

fn bounds(rule: &str, k: usize, p: Option<f64>) -> Result<()> {
    let (row, p) = match rule.parse::<BoundRule>() {
        Ok(row) => (row, p),
        Err(_) => {
            let (row, rule_p) = BoundRule::of(&rule.parse()?)?;
            (row, rule_p.or(p))
        }
    };
    let (av, cc) = guarantee_bounds(row, k, p)?;
    println!("rule: {row}");
    println!("k: {k}");
    println!("av_ratio: {}", interval(&av));
    println!("cc_ratio: {}", interval(&cc));
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let execution = if cli.sequential { Execution::Sequential } else { Execution::default() };
    let e = Enumerator::new(cli.budget.unwrap_or_else(budget_from_env), execution);
    match cli.command {
        Command::Winners { rule, profile, k } => committees_of(&rule.parse()?, &load(&profile)?, k, &e),
        Command::Score { rule, profile, committee } => score(&rule.parse()?, &load(&profile)?, &committee.parse()?),
        Command::Ratios { profile, k, rules } => ratios(&load(&profile)?, k, &rules, &e),
        Command::Experiment { config } => {
            let mut config = ExperimentConfig::load(&config)?;
            if let Some(b) = cli.budget {
                config.budget = b;
            }
            let result = run_experiment(&config)?;
            eprintln!(
                "{} instances, {} kept, {} skipped",
                result.instances, result.kept, result.skipped
            );
            if config.output.is_none() {
                print!("{}", result.to_csv());
            }
            if config.summary.is_none() {
                print!("{}", result.summary_csv());
            }
            Ok(())
        }
        Command::CheckEfficiency { profile, k, committee } => {
            let profile = load(&profile)?;
            let w: Committee = committee.parse()?;
            if w.size() != k {
                return Err(Error::Parameter(format!("committee {w} does not have size {k}")));
            }
            match find_dominator(&profile, &w, &e)? {
                Some(hit) => println!(
                    "dominated by {} (voter {} strictly better off)",
                    hit.dominator, hit.strictly_better_voter
                ),
                None => println!("undominated"),
            }
            Ok(())
        }
        Command::Construct { family, k, x, p, check } => {
            let p = p.as_deref().map(parse_rational).transpose()?;
            let (profile, spec) = gen(family.parse::<Family>()?, k, x, p.as_ref())?;
            print!("{}", write_profile(&profile));
            if check {
                let claimed = match &spec.expected {
                    ExpectedRatio::Exact(r) => format!("exactly {r}"),
                    ExpectedRatio::AtMost(b) => format!("at most {b:.12}"),
                };
                let got = evaluate(&profile, &spec, &e)?;
                eprintln!("claimed {claimed}, measured {got} ({})", decimal(&got, 12));
            }
            Ok(())
        }
        Command::Bounds { rule, k, p } => bounds(&rule, k, p),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
