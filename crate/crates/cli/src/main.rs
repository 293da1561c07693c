//! `capcon`: command-line front end for the capcon toolkit.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use capcon::finite_game::{evaluate_strategy, theorem1_upper_bound, GameInstance, SenderStrategy, TieMode};
use capcon::info::{channel_capacity, make_bsc, make_perfect_channel, Channel, Distribution, CAPACITY_TOL};
use capcon::instances::{investment_game, two_project_game};
use capcon::shannon::{prepare_splitting, run_simulation, CodingParams, DEFAULT_DELTA, DEFAULT_ETA, DEFAULT_GAMMA};
use capcon::solver::{feasible_region_grid, value_dual_with, Entropy, SolverConfig};
use capcon::{Error, PersuasionProblem, Splitting};

#[derive(Parser)]
#[command(name = "capcon", version, about = "Bayesian persuasion over capacity-limited channels")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tie {
    Worst,
    Best,
}

impl From<Tie> for TieMode {
    fn from(t: Tie) -> Self {
        match t {
            Tie::Worst => TieMode::Worst,
            Tie::Best => TieMode::Best,
        }
    }
}

#[derive(clap::Args)]
struct Budget {
    /// Information budget in bits per state.
    #[arg(long, conflicts_with_all = ["channel", "ratio"])]
    capacity: Option<f64>,
    /// Channel file, `bsc025`, `bsc:<eps>` or `perfect:<m>`.
    #[arg(long, requires = "ratio")]
    channel: Option<String>,
    /// Channel uses per state; the budget is `ratio * C(Q)`.
    #[arg(long, requires = "channel")]
    ratio: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Capacity and capacity-achieving input of a channel.
    Capacity {
        #[arg(long)]
        channel: String,
        #[arg(long, default_value_t = CAPACITY_TOL)]
        tol: f64,
    },
    /// Constrained value V(mu, c) with an optimal splitting.
    Value {
        /// Problem file, or `investment[:prior]` / `two-project[:prior]`.
        #[arg(long)]
        problem: String,
        #[command(flatten)]
        budget: Budget,
        #[arg(long, default_value_t = 2000)]
        grid: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// CSV `prior,epsilon,value` over a prior grid, one curve per BSC noise level.
    ValueCurve {
        #[arg(long, default_value = "investment")]
        problem: String,
        /// Comma-separated BSC noise levels.
        #[arg(long, value_delimiter = ',', required = true)]
        eps_list: Vec<f64>,
        /// Number of prior intervals; priors are i/grid.
        #[arg(long)]
        grid: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// CSV `nu0,nu1,feasible` of one-shot feasible posterior pairs over BSC(eps).
    FeasibleRegion {
        #[arg(long, default_value_t = 0.5)]
        prior: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exact payoff of a sender strategy in the repeated game.
    Evaluate {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        channel: String,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long, value_enum, default_value = "worst")]
        tie: Tie,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Monte-Carlo runs of the random-coding strategy.
    Simulate {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        channel: String,
        /// Splitting file; defaults to the optimal splitting at the first (n, k).
        #[arg(long)]
        splitting: Option<PathBuf>,
        /// Perturbation applied to the splitting (default 0.02 for solved splittings).
        #[arg(long)]
        slack: Option<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Channel uses per run; defaults to n.
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_ETA)]
        eta: f64,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_GAMMA)]
        gamma: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Keep per-trial outcomes in the JSON report.
        #[arg(long)]
        outcomes: bool,
        #[arg(long)]
        output: Option<PathBuf>,
        /// CSV of per-run aggregates.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Shadow price t* of capacity.
    ShadowPrice {
        #[arg(long)]
        problem: String,
        #[command(flatten)]
        budget: Budget,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded(_)) => 3,
        Some(Error::IterationLimit { .. }) | Some(Error::Lp(_)) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("CAPCON_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: CAPCON_THREADS={v:?} is not a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Round to 9 significant digits.
fn sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

fn fmt9(x: f64) -> String {
    sig9(x).to_string()
}

fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(0.0);
            serde_json::Number::from_f64(sig9(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn emit(text: &str, path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json(v: Value, path: Option<&Path>) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(&round_json(v))?;
    text.push('\n');
    emit(&text, path)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_channel(spec: &str) -> anyhow::Result<Channel> {
    let built = if spec == "bsc025" {
        Some(make_bsc(0.25))
    } else if let Some(e) = spec.strip_prefix("bsc:") {
        Some(make_bsc(e.parse().with_context(|| format!("noise level in {spec:?}"))?))
    } else if let Some(m) = spec.strip_prefix("perfect:") {
        Some(make_perfect_channel(m.parse().with_context(|| format!("alphabet size in {spec:?}"))?))
    } else {
        None
    };
    match built {
        Some(c) => Ok(c?),
        None => read_json(Path::new(spec)),
    }
}

fn load_problem(spec: &str) -> anyhow::Result<PersuasionProblem> {
    let (name, prior) = match spec.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (spec, None),
    };
    let prior = prior
        .map(|p| p.parse::<f64>().with_context(|| format!("prior in {spec:?}")))
        .transpose()?;
    if !(0.0..=1.0).contains(&prior.unwrap_or(0.5)) {
        bail!("prior in {spec:?} must lie in [0, 1]");
    }
    match name {
        "investment" => Ok(investment_game(prior.unwrap_or(0.5))),
        "two-project" => Ok(two_project_game(prior.unwrap_or(0.5))),
        _ => read_json(Path::new(spec)),
    }
}

fn budget_bits(b: &Budget) -> anyhow::Result<(f64, Value)> {
    match (&b.capacity, &b.channel, &b.ratio) {
        (Some(c), _, _) => Ok((*c, json!({ "capacity": c }))),
        (None, Some(ch), Some(r)) => {
            if !(*r >= 0.0) {
                return Err(Error::InvalidParameter(format!("ratio {r} must be nonnegative")).into());
            }
            let cap = channel_capacity(&load_channel(ch)?, CAPACITY_TOL)?.capacity;
            Ok((r * cap, json!({ "channel": ch, "ratio": r, "channel_capacity": cap })))
        }
        _ => Err(anyhow!(Error::InvalidParameter(
            "give either --capacity or both --channel and --ratio".into()
        ))),
    }
}

fn run(cmd: Cmd) -> anyhow::Result<()> {
    match cmd {
        Cmd::Capacity { channel, tol } => {
            let q = load_channel(&channel)?;
            let cap = channel_capacity(&q, tol)?;
            emit_json(serde_json::to_value(cap)?, None)
        }
        Cmd::Value {
            problem,
            budget,
            grid,
            tol,
        } => {
            let p = load_problem(&problem)?;
            let (c, source) = budget_bits(&budget)?;
            let cfg = SolverConfig {
                grid,
                tol,
                ..SolverConfig::with_resolution(grid)
            };
            let v = value_dual_with(&p, c, &Entropy, &cfg)?;
            let mut out = serde_json::to_value(&v)?;
            out["budget"] = json!(c);
            out["source"] = source;
            emit_json(out, None)
        }
        Cmd::ValueCurve {
            problem,
            eps_list,
            grid,
            output,
        } => {
            let base = load_problem(&problem)?;
            if base.num_states() != 2 {
                return Err(Error::InvalidProblem("value curves need two states".into()).into());
            }
            if grid == 0 {
                return Err(Error::InvalidParameter("grid must be positive".into()).into());
            }
            let mut csv = String::from("prior,epsilon,value\n");
            for &eps in &eps_list {
                let c = channel_capacity(&make_bsc(eps)?, CAPACITY_TOL)?.capacity;
                for i in 0..=grid {
                    let mu = i as f64 / grid as f64;
                    let p = base.with_prior(Distribution::binary(mu)?)?;
                    let v = capcon::solver::value(&p, c)?.value;
                    csv.push_str(&format!("{},{},{}\n", fmt9(mu), fmt9(eps), fmt9(v)));
                }
            }
            emit(&csv, output.as_deref())
        }
        Cmd::FeasibleRegion {
            prior,
            eps,
            grid,
            output,
        } => {
            let pts = feasible_region_grid(&Distribution::binary(prior)?, eps, grid)?;
            let mut csv = String::from("nu0,nu1,feasible\n");
            for p in pts {
                csv.push_str(&format!("{},{},{}\n", fmt9(p.nu0), fmt9(p.nu1), u8::from(p.feasible)));
            }
            emit(&csv, output.as_deref())
        }
        Cmd::Evaluate {
            problem,
            channel,
            strategy,
            tie,
            output,
        } => {
            let p = load_problem(&problem)?;
            let q = load_channel(&channel)?;
            let s: SenderStrategy = read_json(&strategy)?;
            let (n, k) = s.shape();
            let g = GameInstance::new(p, q, n, k)?;
            let report = evaluate_strategy(&g, &s, tie.into())?;
            let mut out = serde_json::to_value(&report)?;
            out["n"] = json!(n);
            out["k"] = json!(k);
            out["upper_bound"] = json!(theorem1_upper_bound(&g)?);
            emit_json(out, output.as_deref())
        }
        Cmd::Simulate {
            problem,
            channel,
            splitting,
            slack,
            n,
            k,
            eta,
            delta,
            alpha,
            gamma,
            trials,
            seed,
            outcomes,
            output,
            csv,
        } => {
            let p = load_problem(&problem)?;
            let q = load_channel(&channel)?;
            let ks: Vec<usize> = match k.len() {
                0 => n.clone(),
                1 => vec![k[0]; n.len()],
                l if l == n.len() => k,
                _ => {
                    return Err(Error::InvalidParameter("--k needs one value or as many as --n".into()).into())
                }
            };
            let cap = channel_capacity(&q, CAPACITY_TOL)?;
            let base: Splitting = match &splitting {
                Some(path) => read_json(path)?,
                None => {
                    let c = ks[0] as f64 / n[0] as f64 * cap.capacity;
                    capcon::solver::value(&p, c)?.splitting
                }
            };
            let s = match (splitting.is_some(), slack) {
                (true, None) => base,
                (_, sl) => prepare_splitting(&p, &base, sl.unwrap_or(0.02))?,
            };
            let mut runs = Vec::new();
            let mut table = String::from("n,k,error_rate,b_rate,mean_payoff,upper_bound\n");
            for (&ni, &ki) in n.iter().zip(&ks) {
                let params = CodingParams {
                    n: ni,
                    k: ki,
                    eta,
                    delta,
                    seed,
                    input_dist: cap.input.clone(),
                    alpha,
                    gamma,
                };
                let mut r = run_simulation(&p, &q, &s, &params, trials)?;
                table.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    ni,
                    ki,
                    fmt9(r.error_rate),
                    fmt9(r.b_rate),
                    fmt9(r.mean_payoff),
                    fmt9(r.upper_bound)
                ));
                if !outcomes {
                    r.outcomes.clear();
                }
                runs.push(r);
            }
            if let Some(path) = &csv {
                emit(&table, Some(path))?;
            }
            emit_json(json!({ "splitting": s, "runs": runs }), output.as_deref())
        }
        Cmd::ShadowPrice { problem, budget } => {
            let p = load_problem(&problem)?;
            let (c, source) = budget_bits(&budget)?;
            let v = capcon::solver::value(&p, c)?;
            let note = if v.binding {
                format!(
                    "one more bit of capacity per state raises the sender's value by about {} utils",
                    fmt9(v.multiplier)
                )
            } else {
                "the unconstrained optimum is feasible; extra capacity is worth nothing".to_string()
            };
            emit_json(
                json!({
                    "budget": c,
                    "source": source,
                    "multiplier": v.multiplier,
                    "binding": v.binding,
                    "value": v.value,
                    "info_used": v.info_used,
                    "interpretation": note,
                }),
                None,
            )
        }
    }
}
