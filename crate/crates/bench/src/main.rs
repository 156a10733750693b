use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use dpapsp_bench::config::{ExperimentConfig, Family};
use dpapsp_bench::experiment::generate;
use dpapsp_core::fvs::{compute_fvs_2approx, fvs_private_apsp, FvsDecomposition};
use dpapsp_core::seed::rng_from_seed;
use dpapsp_core::shortcut::release_synthetic_graph;
use dpapsp_core::{Graph, PrivacyBudget};

/// Differentially private all-pairs shortest-path distances.
#[derive(Parser)]
#[command(name = "dp-apsp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment grid and write CSV, SVG and gnuplot data.
    ///
    /// The output directory can be overridden with APSP_DP_OUTPUT_DIR.
    Run { config: PathBuf },
    /// Release the distances of one graph.
    ///
    /// `alg1` writes the noisy synthetic graph as an edge list plus a
    /// `<out>.meta` sidecar. `alg2` writes the released distance matrix.
    Release {
        graph: PathBuf,
        #[arg(long, value_enum)]
        mechanism: ReleaseMechanism,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 0.01)]
        gamma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the feedback vertex set found for a graph.
    Fvs { graph: PathBuf },
    /// Write a generated graph as an edge list.
    Generate {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        extra_edges: usize,
        #[arg(long, default_value_t = 2000.0)]
        weight_low: f64,
        #[arg(long, default_value_t = 3000.0)]
        weight_high: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReleaseMechanism {
    Alg1,
    Alg2,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    MultiStage,
    RandomTree,
    ConnectedRandom,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let (dir, panels) = dpapsp_bench::run_and_emit(&cfg)?;
            let total: usize = panels.iter().map(|p| p.records.len()).sum();
            log::info!("{total} records written to {}", dir.display());
        }
        Command::Release {
            graph,
            mechanism,
            epsilon,
            delta,
            gamma,
            seed,
            out,
        } => {
            let g = Graph::load(&graph)?;
            let budget = PrivacyBudget::new(epsilon, delta, gamma)?;
            let mut rng = rng_from_seed(seed);
            match mechanism {
                ReleaseMechanism::Alg1 => {
                    let sg = release_synthetic_graph(&g, &budget, &mut rng)?;
                    sg.save(&out)?;
                    log::info!(
                        "synthetic graph with {} edges ({} clamped) written to {}",
                        sg.base.m(),
                        sg.clamped_count,
                        out.display()
                    );
                }
                ReleaseMechanism::Alg2 => {
                    let r = fvs_private_apsp(&g, &budget, &mut rng)?;
                    if r.shortcut_preferred {
                        log::warn!(
                            "feedback vertex set of size {} has k² ≥ n = {}; alg1 has the better bound",
                            r.fvs.len(),
                            g.n()
                        );
                    }
                    std::fs::write(&out, r.release.distances.to_text())
                        .with_context(|| format!("writing {}", out.display()))?;
                    log::info!("distance matrix written to {}", out.display());
                }
            }
        }
        Command::Fvs { graph } => {
            let g = Graph::load(&graph)?;
            let s = compute_fvs_2approx(&g);
            let d = FvsDecomposition::new(&g, s)?;
            let ids: Vec<String> = d.s.iter().map(|v| v.to_string()).collect();
            println!("n {}", g.n());
            println!("m {}", g.m());
            println!("k {}", d.k());
            println!("fvs {}", ids.join(" "));
            println!("forest_edges {}", d.forest.m());
            println!("cross_edges {}", d.cross_edges.len());
            println!("shortcut_preferred {}", d.k() * d.k() >= g.n());
        }
        Command::Generate {
            family,
            n,
            extra_edges,
            weight_low,
            weight_high,
            seed,
            out,
        } => {
            if !(weight_low >= 0.0 && weight_low < weight_high) {
                bail!("weights need 0 <= low < high");
            }
            let family = match family {
                FamilyArg::MultiStage => Family::MultiStage,
                FamilyArg::RandomTree => Family::RandomTree,
                FamilyArg::ConnectedRandom => Family::ConnectedRandom { extra_edges },
            };
            let g = generate(family, n, (weight_low, weight_high), seed)?;
            g.save(&out)?;
        }
    }
    Ok(())
}
