mod output;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mstk_core::experiments::{empirical_core_statistics, monte_carlo_mst_k, orientation_experiment};
use mstk_core::graph::WeightedGraph;
use mstk_core::matroid::{rank_with_partition, validate_witness, Witness};
use mstk_core::mu_constants::{expected_zk, mu2, mu2_with_cutoff};
use mstk_core::special_fn::f_tail;
use mstk_core::thresholds::{core_threshold, density_threshold_prime};
use mstk_core::verifier::{
    boundary_report, verify_edge_cases, verify_gap_polynomials, verify_interior_band, verify_l_gap,
    verify_ratio_bounds, GridReport, FULL_SPACING,
};
use output::{Format, Report, Table};
use serde_json::json;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

/// Constants, simulations and certified grid checks for minimum-weight
/// k edge-disjoint spanning trees.
#[derive(Parser, Debug)]
#[command(name = "mstk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Master seed; falls back to MSTK_SEED, then 0.
    #[arg(long, env = "MSTK_SEED", default_value_t = 0, global = true)]
    seed: u64,

    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,

    /// Drop every runtime field, so equal runs give identical bytes.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Core and density thresholds.
    Constants {
        /// Largest core order to report.
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(3..=30))]
        max_kappa: u64,
    },
    /// The limit of the minimum total weight of two disjoint spanning trees.
    Mu2 {
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        /// Upper integration limit; chosen from the tolerance when absent.
        #[arg(long)]
        cutoff: Option<f64>,
    },
    /// Expected sum of the k(n-1) smallest edge weights of K_n.
    Zk {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
    },
    /// Monte Carlo estimate of mst_k(K_n).
    Simulate {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// κ-core sizes of G(n, c/n), and optionally 3-core orientations.
    Core {
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 4.0)]
        c: f64,
        #[arg(long, default_value_t = 3)]
        kappa: usize,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        /// Also orient each 3-core with indegree target two.
        #[arg(long)]
        orient: bool,
    },
    /// Grid certification that the first-moment bound is below one.
    VerifyA {
        #[command(flatten)]
        profile: Profile,
        /// Grid spacing; overrides the profile.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Gap polynomial grids and the sampled L-gap check.
    VerifyB {
        #[command(flatten)]
        profile: Profile,
        /// Grid spacing; overrides the profile.
        #[arg(long)]
        spacing: Option<f64>,
        /// L-gap samples; overrides the profile.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Sampled inequalities between truncated exponential series.
    VerifyC {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Rank of the k-fold union of the graphic matroid of a graph file.
    Rank {
        /// Edge-list file, or `-` for stdin.
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Write the forest partition here as a witness.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Re-check a forest partition witness against its graph.
    CheckWitness {
        /// Edge-list file, or `-` for stdin.
        #[arg(long)]
        input: String,
        #[arg(long)]
        witness: PathBuf,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct Profile {
    /// Coarse grids that finish in seconds.
    #[arg(long, conflicts_with = "paper")]
    fast: bool,
    /// Full resolution (the default).
    #[arg(long)]
    paper: bool,
}

const FAST_DELTA: f64 = 1.0 / 1000.0;
const GAP_SPACING: f64 = 0.001;
const FAST_L_GAP_SAMPLES: usize = 1000;
const FULL_L_GAP_SAMPLES: usize = 10_000;

enum Failure {
    Usage(anyhow::Error),
    Verdict,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t as usize)
            .build_global()
            .map_err(|e| Failure::Usage(e.into()))?;
    }
    let started = Instant::now();
    let report = dispatch(cli).map_err(Failure::Usage)?;
    let passed = report.passed;
    output::emit(cli, report, started).map_err(Failure::Usage)?;
    match passed {
        Some(false) => Err(Failure::Verdict),
        _ => Ok(()),
    }
}

fn read_graph(input: &str) -> Result<WeightedGraph> {
    let text = if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        s
    } else {
        std::fs::read_to_string(input).with_context(|| format!("reading {input}"))?
    };
    WeightedGraph::parse_edge_list(&text).with_context(|| format!("parsing {input}"))
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        bail!("--{name} must be a positive number, got {x}")
    }
}

fn dispatch(cli: &Cli) -> Result<Report> {
    Ok(match &cli.command {
        Command::Constants { max_kappa } => constants(*max_kappa as usize)?,
        Command::Mu2 { tol, cutoff } => {
            let tol = positive("tol", *tol)?;
            let r = match cutoff {
                Some(c) => mu2_with_cutoff(tol, positive("cutoff", *c)?)?,
                None => mu2(tol)?,
            };
            let table = Table::new(["value", "abs_error_estimate", "tail_bound", "cutoff"])
                .row([r.value, r.abs_error_estimate, r.tail_bound, r.cutoff].map(|x| x.to_string()));
            Report::new("mu2", json!(r), table)
        }
        Command::Zk { n, k } => {
            let v = expected_zk(*n, *k)?;
            Report::new(
                "zk",
                json!({ "n": n, "k": k, "expected": v }),
                Table::new(["n", "k", "expected"]).row([n.to_string(), k.to_string(), v.to_string()]),
            )
        }
        Command::Simulate { n, k, trials } => {
            let s = monte_carlo_mst_k(*n, *k, *trials, cli.seed)?;
            Report::new("simulate", json!(s), Table::trials(&s))
        }
        Command::Core {
            n,
            c,
            kappa,
            trials,
            orient,
        } => {
            let stats = empirical_core_statistics(*n, positive("c", *c)?, *kappa, *trials, cli.seed)?;
            let mut table = Table::trials(&stats.vertex);
            let orientation = if *orient {
                let o = orientation_experiment(*n, *c, *trials, cli.seed)?;
                table = table.extend_trials(&o, "orientation");
                Some(o)
            } else {
                None
            };
            Report::new(
                "core",
                json!({ "statistics": stats, "orientation": orientation }),
                table,
            )
        }
        Command::VerifyA { profile, delta } => {
            let delta = match delta {
                Some(d) => positive("delta", *d)?,
                None if profile.fast => FAST_DELTA,
                None => FULL_SPACING,
            };
            let mut reports = vec![verify_interior_band(delta)?, boundary_report(delta)?];
            reports.extend(verify_edge_cases(delta)?);
            Report::verdict("verify-a", reports)
        }
        Command::VerifyB {
            profile,
            spacing,
            samples,
        } => {
            // the grids are cheap, so both profiles share the full spacing
            let spacing = spacing.map_or(Ok(GAP_SPACING), |s| positive("spacing", s))?;
            let samples = samples.unwrap_or(if profile.fast {
                FAST_L_GAP_SAMPLES
            } else {
                FULL_L_GAP_SAMPLES
            });
            let mut reports = verify_gap_polynomials(spacing)?;
            reports.push(verify_l_gap(samples, cli.seed)?);
            Report::verdict("verify-b", reports)
        }
        Command::VerifyC { samples } => Report::verdict("verify-c", verify_ratio_bounds(*samples)?),
        Command::Rank { input, k, witness } => {
            if *k == 0 {
                bail!("--k must be at least 1");
            }
            let g = read_graph(input)?;
            let partition = rank_with_partition(&g, *k);
            let w = Witness::from_partition(&g, &partition);
            if let Some(path) = witness {
                let text = serde_json::to_string_pretty(&w)?;
                std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
            }
            let rank = partition.len();
            Report::new(
                "rank",
                json!({ "n": g.n(), "edges": g.edge_count(), "k": k, "rank": rank }),
                Table::new(["n", "edges", "k", "rank"]).row([g.n(), g.edge_count(), *k, rank].map(|x| x.to_string())),
            )
        }
        Command::CheckWitness { input, witness } => {
            let g = read_graph(input)?;
            let text = std::fs::read_to_string(witness).with_context(|| format!("reading {}", witness.display()))?;
            let w: Witness = serde_json::from_str(&text).with_context(|| format!("parsing {}", witness.display()))?;
            let check = validate_witness(&g, &w);
            let problem = check.as_ref().err().map(ToString::to_string);
            let mut r = Report::new(
                "check-witness",
                json!({ "k": w.k, "edges": w.edge_count(), "valid": check.is_ok(), "problem": problem }),
                Table::new(["k", "edges", "valid"]).row([
                    w.k.to_string(),
                    w.edge_count().to_string(),
                    check.is_ok().to_string(),
                ]),
            );
            r.passed = Some(check.is_ok());
            r
        }
    })
}

fn constants(max_kappa: usize) -> Result<Report> {
    let mut table = Table::new(["name", "order", "c", "lambda"]);
    let mut cores = Vec::new();
    for kappa in 3..=max_kappa {
        let t = core_threshold(kappa)?;
        table = table.row([
            "core_threshold".into(),
            kappa.to_string(),
            t.c.to_string(),
            t.lambda.to_string(),
        ]);
        cores.push(t);
    }
    let mut dense = Vec::new();
    for k in 2..max_kappa {
        let t = density_threshold_prime(k)?;
        table = table.row([
            "density_threshold_prime".into(),
            k.to_string(),
            t.c.to_string(),
            t.lambda.to_string(),
        ]);
        dense.push(t);
    }
    let lambda = density_threshold_prime(2)?.lambda;
    let ratio = lambda.powi(4) / f_tail(3, lambda)?;
    table = table.row([
        "lambda4_over_f3".into(),
        "3".into(),
        ratio.to_string(),
        lambda.to_string(),
    ]);
    Ok(Report::new(
        "constants",
        json!({
            "core_threshold": cores,
            "density_threshold_prime": dense,
            "lambda2_prime": lambda,
            "lambda4_over_f3": ratio,
        }),
        table,
    ))
}

impl Report {
    fn verdict(command: &str, reports: Vec<GridReport>) -> Report {
        let passed = reports.iter().all(GridReport::passed);
        let table = Table::grid(&reports);
        let mut r = Report::new(
            command,
            json!({ "verdict": if passed { "pass" } else { "fail" }, "reports": reports }),
            table,
        );
        r.passed = Some(passed);
        r
    }
}
