//! `consortia` command-line tool.
//!
//! Exit status: 0 on success, 1 on a domain error (printed as
//! `error: <Name>: <message>`), 2 on a usage error.

use std::fs;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use consortia::analysis::{
    spoa_sweep, sweep_csv, verify_grid, worst_case_search, Game, GridLevel, SearchConfig, SearchFamily, SearchMode,
    SweepFamily, ValueGrid,
};
use consortia::generators::{family_instance, paper_instance, GraphFamily, PaperInstance, PaperParams};
use consortia::partition::parse_blocks;
use consortia::{
    ccc_is_strong, ccc_outcome, ccc_report, find_sow, goldrush_is_nash, goldrush_is_strong, goldrush_outcome,
    goldrush_report, magnet_closure, magnet_is_strong, magnet_outcome, magnet_report, ClosureTrace, EquilibriumReport,
    Instance, PriceOfAnarchy, ProposalProfile, Rational,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "consortia", version, about = "Exact solver for consortium-formation grant games")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,

    /// Write output here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    /// Largest instance the exhaustive solvers accept.
    #[arg(long, global = true, default_value_t = consortia::DEFAULT_LIMIT)]
    limit: usize,

    /// Lift the size limit to the instance size.
    #[arg(long, global = true)]
    force: bool,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Args)]
struct Input {
    /// Instance file (JSON).
    #[arg(short, long)]
    input: PathBuf,
}

#[derive(Subcommand)]
enum Verb {
    /// Social optimum winner.
    Sow {
        #[command(flatten)]
        input: Input,
    },
    /// Outcome and stability of one profile.
    Outcome {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        game: Game,
        /// Blocks such as `0,1|2,3`; unlisted players propose alone.
        #[arg(long)]
        profile: String,
    },
    /// Full equilibrium report.
    Equilibria {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        game: Game,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Price of anarchy and stability only.
    Spoa {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        game: Game,
    },
    /// Appeal rounds starting from an eligible consortium.
    Closure {
        #[command(flatten)]
        input: Input,
        /// Starting consortium, e.g. `0,1`.
        #[arg(long)]
        start: String,
        #[arg(long)]
        json: bool,
    },
    /// Write a generated instance.
    Gen(GenArgs),
    /// Worst observed spoa against the bound, as CSV.
    Sweep {
        /// clique or line.
        #[arg(long)]
        family: SweepFamily,
        #[arg(long)]
        game: Game,
        /// Single value or inclusive range such as `2..4`.
        #[arg(long, value_parser = parse_range)]
        k: RangeInclusive<usize>,
    },
    /// Worst-case instance search.
    Search(SearchArgs),
    /// Check every bound on the verification grid.
    Verify {
        #[arg(long, default_value = "default")]
        grid: GridLevel,
    },
}

#[derive(Args)]
struct GenArgs {
    /// A construction (ccc-clique-lower, magnet-clique-lower, line-worstcase,
    /// goldrush-worst, cartwheel-3nz, cartwheel-3nz-k3) or a graph family
    /// (complete, line, cycle, cartwheel, star) used with --values.
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long = "T")]
    t: Rational,
    #[arg(long, default_value = "1")]
    eps: Rational,
    #[arg(long = "X")]
    x: Option<Rational>,
    #[arg(long, default_value = "1")]
    prize: Rational,
    /// Comma-separated values for a graph family.
    #[arg(long, value_delimiter = ',')]
    values: Vec<Rational>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    game: Game,
    /// all, tree, or a graph family.
    #[arg(long, default_value = "all")]
    family: SearchFamily,
    /// Largest number of players.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    n_min: usize,
    /// Grid threshold; without it the default grids at T = 6 and T = 12 are used.
    #[arg(long = "T")]
    t: Option<Rational>,
    #[arg(long, default_value = "1")]
    eps: Rational,
    /// Sample random value tuples instead of enumerating the grid.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => Ok(num(a)?..=num(b.trim_start_matches('='))?),
        None => num(s).map(|k| k..=k),
    }
}

enum Failure {
    Domain(consortia::Error),
    Io(String),
    Usage(String),
}

impl From<consortia::Error> for Failure {
    fn from(e: consortia::Error) -> Self {
        Failure::Domain(e)
    }
}

type Res<T> = Result<T, Failure>;

fn read_instance(input: &Input) -> Res<Instance> {
    let text = fs::read_to_string(&input.input).map_err(|e| Failure::Io(format!("{}: {e}", input.input.display())))?;
    Ok(Instance::from_json(&text)?)
}

fn approx(r: Rational) -> String {
    format!("{r} (approx {:.6})", r.to_f64())
}

fn report_text(game: Game, rep: &EquilibriumReport, traces: &[ClosureTrace]) -> String {
    let mut out = format!("game: {game}\n");
    out += &format!("sow: {} avg={} k={}\n", rep.sow.consortium, rep.sow.avg, rep.sow.size);
    out += &format!("profiles: {}\n", rep.profiles);
    out += &format!("equilibria: {} (winnerless {})\n", rep.equilibria.len(), rep.winnerless_equilibria);
    let winners: Vec<String> = rep.se_winners.iter().map(|w| w.to_string()).collect();
    out += &format!("se_winners: {}\n", winners.join(" "));
    out += &format!("spoa: {}\n", approx(rep.spoa));
    out += &format!("spos: {}\n", approx(rep.spos));
    for (label, e) in [("worst", &rep.worst), ("best", &rep.best)] {
        out += &format!("{label}: profile={} round1={} winner={} avg={}\n", e.profile, e.round1, e.winner, e.avg);
    }
    for t in traces {
        out += &trace_text(t);
    }
    out
}

fn trace_text(t: &ClosureTrace) -> String {
    let mut out = String::new();
    for (i, round) in t.rounds.iter().enumerate() {
        if round.accepted_appeals.is_empty() {
            out += &format!("round {}: {} no appeals\n", i + 1, round.winner_before);
        } else {
            let appeals: Vec<String> = round.accepted_appeals.iter().map(|x| x.to_string()).collect();
            out += &format!(
                "round {}: {} + {} -> {}\n",
                i + 1,
                round.winner_before,
                appeals.join(" + "),
                round.winner_after
            );
        }
    }
    out
}

fn to_json<T: serde::Serialize>(v: &T, pretty: bool) -> String {
    let s = if pretty { serde_json::to_string_pretty(v) } else { serde_json::to_string(v) };
    s.expect("output serializes") + "\n"
}

/// Runs one verb; the flag says whether every check passed.
fn run(cli: &Cli) -> Res<(String, bool)> {
    let limit = |n: usize| if cli.force { cli.limit.max(n) } else { cli.limit };
    let out = match &cli.verb {
        Verb::Sow { input } => to_json(&find_sow(&read_instance(input)?)?, false),
        Verb::Outcome { input, game, profile } => {
            let inst = read_instance(input)?;
            let p = ProposalProfile::with_singletons(inst.n(), parse_blocks(profile)?)?;
            let v = match game {
                Game::Goldrush => {
                    let lab = p.to_labeling();
                    json!({
                        "outcome": goldrush_outcome(&inst, &lab),
                        "nash": goldrush_is_nash(&inst, &lab).witness(),
                        "strong": goldrush_is_strong(&inst, &lab).witness(),
                    })
                }
                Game::Ccc => json!({
                    "outcome": ccc_outcome(&inst, &p),
                    "strong": ccc_is_strong(&inst, &p).witness(),
                }),
                Game::Magnet => {
                    let m = magnet_outcome(&inst, &p);
                    json!({
                        "outcome": m.outcome,
                        "round1": m.round1,
                        "trace": m.trace,
                        "strong": magnet_is_strong(&inst, &p).witness(),
                    })
                }
            };
            // A null "strong"/"nash" field means no profitable deviation exists.
            to_json(&v, true)
        }
        Verb::Equilibria { input, game, json } => {
            let inst = read_instance(input)?;
            let lim = limit(inst.n());
            match game {
                Game::Goldrush => {
                    let rep = goldrush_report(&inst, lim)?;
                    if *json {
                        to_json(&rep, true)
                    } else {
                        let winners: Vec<String> = rep
                            .nash_winners
                            .iter()
                            .map(|w| w.as_ref().map_or("none".to_string(), |c| c.to_string()))
                            .collect();
                        let mut out = "game: goldrush\n".to_string();
                        out += &format!("sow: {} avg={} k={}\n", rep.sow.consortium, rep.sow.avg, rep.sow.size);
                        out += &format!("labelings: {}\n", rep.labelings);
                        out += &format!("nash_equilibria: {}\n", rep.nash_equilibria);
                        out += &format!("nash_winners: {}\n", winners.join(" "));
                        out += &format!("poa: {}\n", poa_text(rep.poa));
                        if let Some(l) = &rep.worst_nash {
                            out += &format!("worst: labels={:?}\n", l.labels());
                        }
                        out
                    }
                }
                Game::Ccc => {
                    let rep = ccc_report(&inst, lim)?;
                    if *json {
                        to_json(&rep, true)
                    } else {
                        report_text(*game, &rep, &[])
                    }
                }
                Game::Magnet => {
                    let rep = magnet_report(&inst, lim)?;
                    if *json {
                        to_json(&rep, true)
                    } else {
                        report_text(*game, &rep.report, &rep.traces)
                    }
                }
            }
        }
        Verb::Spoa { input, game } => {
            let inst = read_instance(input)?;
            let lim = limit(inst.n());
            match game {
                Game::Goldrush => format!("poa: {}\n", poa_text(goldrush_report(&inst, lim)?.poa)),
                Game::Ccc | Game::Magnet => {
                    let rep = match game {
                        Game::Ccc => ccc_report(&inst, lim)?,
                        _ => magnet_report(&inst, lim)?.report,
                    };
                    format!("spoa: {}\nspos: {}\n", approx(rep.spoa), approx(rep.spos))
                }
            }
        }
        Verb::Closure { input, start, json } => {
            let inst = read_instance(input)?;
            let blocks = parse_blocks(start)?;
            let [w] = blocks.as_slice() else {
                return Err(Failure::Usage("--start takes a single consortium such as 0,1".into()));
            };
            let cl = magnet_closure(&inst, &inst.consortium(w.members().iter().copied())?)?;
            if *json {
                to_json(&cl, true)
            } else {
                trace_text(&cl.trace) + &format!("final: {}\n", cl.final_winner)
            }
        }
        Verb::Gen(g) => gen(g)?.to_json() + "\n",
        Verb::Sweep { family, game, k } => {
            sweep_csv(&spoa_sweep(*family, k.clone(), *game, if cli.force { usize::MAX } else { cli.limit })?)
        }
        Verb::Search(s) => {
            let mut config = SearchConfig::new(s.game, s.family, s.n);
            config.n_min = s.n_min;
            config.limit = limit(s.n);
            if let Some(t) = s.t {
                config.grids = vec![ValueGrid::standard(t, s.eps)];
            }
            if let Some(seed) = s.seed {
                config.mode = SearchMode::Random { seed, samples: s.samples };
            }
            to_json(&worst_case_search(&config)?, true)
        }
        Verb::Verify { grid } => {
            let verdicts = verify_grid(*grid)?;
            let ok = verdicts.iter().all(|v| v.holds);
            let text: String = verdicts.iter().map(|v| format!("{v}\n")).collect();
            return Ok((text, ok));
        }
    };
    Ok((out, true))
}

fn poa_text(p: PriceOfAnarchy) -> String {
    match p {
        PriceOfAnarchy::Bounded(r) => approx(r),
        PriceOfAnarchy::Unbounded => "unbounded".into(),
    }
}

fn gen(g: &GenArgs) -> Res<Instance> {
    if let Ok(which) = g.family.parse::<PaperInstance>() {
        if !g.values.is_empty() {
            return Err(Failure::Usage(format!("--values does not apply to {which}")));
        }
        let params = PaperParams { n: g.n, k: g.k, threshold: g.t, eps: g.eps, prize: g.prize, x: g.x };
        return Ok(paper_instance(which, &params)?);
    }
    let family: GraphFamily = g.family.parse().map_err(|_| Failure::Usage(format!("unknown family {:?}", g.family)))?;
    if g.values.is_empty() {
        return Err(Failure::Usage(format!("--values is required for the {family} family")));
    }
    if let Some(n) = g.n.filter(|&n| n != g.values.len()) {
        return Err(Failure::Usage(format!("--n {n} does not match {} values", g.values.len())));
    }
    Ok(family_instance(family, g.values.clone(), g.t, g.prize)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    #[cfg(feature = "parallel")]
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    #[cfg(not(feature = "parallel"))]
    if cli.threads.is_some_and(|t| t > 1) {
        eprintln!("note: built without the parallel feature, --threads ignored");
    }
    match run(&cli) {
        Ok((text, ok)) => {
            let written = match &cli.output {
                Some(path) => fs::write(path, &text),
                None => io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: Io: {e}");
                return ExitCode::from(1);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: BoundViolated: at least one verdict does not hold");
                ExitCode::from(1)
            }
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: Io: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
