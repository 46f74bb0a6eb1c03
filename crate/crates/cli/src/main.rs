use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use r443::canonical::canonical_form;
use r443::catalogue::{read_catalogue, run_enumeration, stats, verify_text, RunConfig};
use r443::interval::OrderStrategy;
use r443::probes::{
    build_isbell, parse_colouring, parse_triple_list, verify_partial_colouring, MinusEdgesSearch,
};

#[derive(Parser)]
#[command(
    name = "r443",
    version,
    about = "Enumerate and check R(4,4;3)-good 3-uniform hypergraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate one hypergraph per isomorphism class and write a sorted catalogue.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_edges: Option<usize>,
        /// Catalogue of seed hypergraphs on fewer points to extend.
        #[arg(long)]
        seeds: Option<PathBuf>,
        #[arg(long, env = "R443_JOBS")]
        jobs: Option<usize>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value = "grouped")]
        order: OrderStrategy,
        /// Keep deduplicating level by level while a level has at most this many classes.
        #[arg(long, default_value_t = 100_000_000)]
        dedup_threshold: usize,
        /// Seeds per checkpointed batch.
        #[arg(long, default_value_t = 256)]
        batch: usize,
        /// List every edge count in the report, not just up to half.
        #[arg(long)]
        full: bool,
        /// Print batch progress on stderr.
        #[arg(long)]
        progress: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Count classes by edge count and by automorphism group.
    Stats {
        file: PathBuf,
        #[arg(long)]
        full: bool,
    },
    /// Check every catalogue line, or a colouring file, for goodness.
    Verify { file: PathBuf },
    /// Print the canonical line of the 12-point, 110-edge construction.
    Isbell,
    /// Colourings of the complete 13-point hypergraph with some triples left uncoloured.
    Probe {
        /// Omitted triples as letter words, e.g. "abc,ade".
        #[arg(long)]
        omit: String,
        #[arg(long, value_enum)]
        mode: ProbeMode,
        #[arg(long, default_value_t = 1)]
        cap: usize,
        /// Colouring file to verify, or to take a seed prefix from.
        #[arg(long)]
        fixture: Option<PathBuf>,
        /// Start the search from the fixture's first M points.
        #[arg(long)]
        seed_points: Option<usize>,
        /// Allow a search from scratch, which may run for days.
        #[arg(long)]
        long_running: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProbeMode {
    Verify,
    Search,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Enumerate {
            n,
            max_edges,
            seeds,
            jobs,
            checkpoint,
            order,
            dedup_threshold,
            batch,
            full,
            progress,
            out,
        } => {
            let cfg = RunConfig {
                e_max: max_edges,
                seeds,
                checkpoint,
                jobs: jobs.unwrap_or_else(default_jobs),
                order,
                dedup_threshold,
                batch,
                progress,
                ..RunConfig::new(n, out)
            };
            let outcome = run_enumeration(&cfg)?;
            print!("{}", outcome.report.with_full(full));
            Ok(true)
        }
        Command::Stats { file, full } => {
            let graphs =
                read_catalogue(&file).with_context(|| format!("reading {}", file.display()))?;
            print!("{}", stats(&graphs, full));
            Ok(true)
        }
        Command::Verify { file } => {
            let text =
                fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let report = verify_text(&text);
            for f in &report.failures {
                println!("FAIL {f}");
            }
            println!("{} passed, {} failed", report.passed, report.failures.len());
            Ok(report.ok())
        }
        Command::Isbell => {
            println!("{}", canonical_form(&build_isbell()));
            Ok(true)
        }
        Command::Probe {
            omit,
            mode,
            cap,
            fixture,
            seed_points,
            long_running,
        } => {
            let omitted = parse_triple_list(&omit)?;
            if omitted.is_empty() {
                bail!("no omitted triples; use `enumerate --n 13` for the full hypergraph");
            }
            let pc = match &fixture {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    let pc = parse_colouring(&text)?;
                    let mut wanted = r443::hypergraph::EdgeBits::EMPTY;
                    omitted.iter().for_each(|t| wanted.insert(t.index()));
                    if *pc.omitted() != wanted {
                        bail!("{} omits different triples than --omit", path.display());
                    }
                    Some(pc)
                }
                None => None,
            };
            match mode {
                ProbeMode::Verify => {
                    let Some(pc) = pc else {
                        bail!("--mode verify needs --fixture");
                    };
                    let good = verify_partial_colouring(&pc);
                    println!("{}", if good { "good" } else { "bad" });
                    Ok(good)
                }
                ProbeMode::Search => {
                    let mut search = MinusEdgesSearch::new(omitted, cap);
                    match (seed_points, pc) {
                        (Some(m), Some(pc)) => search.seed = Some(pc.restrict(m)?.graph()),
                        (Some(_), None) => bail!("--seed-points needs --fixture"),
                        (None, _) if !long_running => {
                            bail!("an unseeded search can run for days; pass --long-running to start it")
                        }
                        (None, _) => {}
                    }
                    let found = search.run()?;
                    for (i, pc) in found.iter().enumerate() {
                        if i > 0 {
                            println!();
                        }
                        print!("{pc}");
                    }
                    eprintln!("{} colouring(s) found", found.len());
                    Ok(true)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
