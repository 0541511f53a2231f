use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use nrgraph::branching::compare_shells_with_process;
use nrgraph::engine::{exact_component_diameter, sample_giant_distances};
use nrgraph::experiment::{self, mean_of, ExperimentConfig};
use nrgraph::generator::{generate_exact, generate_fast};
use nrgraph::stats::median;
use nrgraph::structure::{backup_depth, core_parameters, delete_above, robust_distance_bound, w};
use nrgraph::theory::{core_removed_scale, extinction_probability, giant_fraction};
use nrgraph::{connected_components, sample_capacities, CapacitySequence, GraphHeader, MultiGraph};

#[derive(Parser)]
#[command(name = "nrgraph", version, about = "Power-law random multigraphs with Poisson edge counts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample capacities and a graph, and write the graph as an edge list.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2.5)]
        tau: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge-list output file.
        #[arg(long, short)]
        out: PathBuf,
        /// Also write the capacities in binary form.
        #[arg(long)]
        caps_out: Option<PathBuf>,
        /// Use the quadratic pairwise generator.
        #[arg(long)]
        exact: bool,
    },
    /// Components and sampled giant distances of a stored graph.
    Analyze {
        graph: PathBuf,
        #[arg(long, default_value_t = 500)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also compute the exact diameter of the largest component.
        #[arg(long)]
        diameter: bool,
    },
    /// Delete all vertices with capacity above n^gamma from a stored graph.
    Attack {
        graph: PathBuf,
        #[arg(long)]
        gamma: f64,
        /// Binary capacity file; by default capacities are resampled from
        /// the seed and tau in the graph header.
        #[arg(long)]
        caps: Option<PathBuf>,
        #[arg(long, default_value_t = 500)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the damaged graph (with relabeled vertices) here.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Compare BFS shells of graphs with the pruned branching process.
    Couple {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2.5)]
        tau: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the theoretical predictions for n and tau.
    Predict {
        #[arg(long, default_value_t = 2.5)]
        tau: f64,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Run an experiment described by a TOML file.
    Experiment {
        config: PathBuf,
        /// Output prefix, overriding `output_path` in the file.
        #[arg(long, short)]
        out: Option<String>,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn read_graph(path: &Path) -> Result<(GraphHeader, MultiGraph)> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    MultiGraph::read_edge_list(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

fn distance_summary(distances: &[u32]) -> serde_json::Value {
    let as_f64: Vec<f64> = distances.iter().map(|&d| d as f64).collect();
    json!({
        "pairs": distances.len(),
        "mean": mean_of(distances),
        "median": (!as_f64.is_empty()).then(|| median(&as_f64)),
        "max": distances.iter().max(),
    })
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Generate {
            n,
            tau,
            seed,
            out,
            caps_out,
            exact,
        } => {
            let caps = sample_capacities(n, tau, seed)?;
            let graph = if exact {
                generate_exact(&caps, seed)?
            } else {
                generate_fast(&caps, seed)
            };
            let header = GraphHeader { n, tau, seed };
            graph.write_edge_list(&header, File::create(&out).with_context(|| format!("creating {}", out.display()))?)?;
            if let Some(path) = caps_out {
                caps.write_binary(BufWriter::new(File::create(&path)?))?;
            }
            print_json(&json!({
                "n": n,
                "tau": tau,
                "seed": seed,
                "edge_total": graph.edge_total(),
                "distinct_edges": graph.distinct_edge_count(),
                "output": out,
            }))?;
        }
        Command::Analyze {
            graph,
            pairs,
            seed,
            diameter,
        } => {
            let (header, g) = read_graph(&graph)?;
            let labeling = connected_components(&g);
            let distances = if labeling.giant_size() >= 2 && pairs > 0 {
                sample_giant_distances(&g, &labeling, pairs, seed)?
            } else {
                Vec::new()
            };
            let diam = if diameter { Some(exact_component_diameter(&g)?) } else { None };
            print_json(&json!({
                "n": g.n(),
                "tau": header.tau,
                "edge_total": g.edge_total(),
                "components": labeling.component_count(),
                "giant_size": labeling.giant_size(),
                "giant_fraction": labeling.giant_size() as f64 / g.n().max(1) as f64,
                "distances": distance_summary(&distances),
                "diameter": diam,
            }))?;
        }
        Command::Attack {
            graph,
            gamma,
            caps,
            pairs,
            seed,
            out,
        } => {
            let (header, g) = read_graph(&graph)?;
            let caps = match caps {
                Some(path) => CapacitySequence::read_binary(BufReader::new(File::open(&path)?))?,
                None => sample_capacities(header.n, header.tau, header.seed)?,
            };
            if caps.n() != g.n() {
                bail!("capacity file has {} entries but the graph has {} vertices", caps.n(), g.n());
            }
            let baseline = connected_components(&g).giant_size();
            let h = delete_above(&g, &caps, gamma)?;
            let labeling = connected_components(&h.graph);
            let distances = if labeling.giant_size() >= 2 && pairs > 0 {
                sample_giant_distances(&h.graph, &labeling, pairs, seed)?
            } else {
                Vec::new()
            };
            if let Some(path) = &out {
                h.graph.write_edge_list(&GraphHeader { n: h.graph.n(), ..header }, File::create(path)?)?;
            }
            let bound = robust_distance_bound(g.n() as u64, gamma, header.tau).ok();
            print_json(&json!({
                "gamma": gamma,
                "deleted": g.n() - h.graph.n(),
                "surviving_vertices": h.graph.n(),
                "baseline_giant_size": baseline,
                "giant_size": labeling.giant_size(),
                "retention": labeling.giant_size() as f64 / baseline.max(1) as f64,
                "distances": distance_summary(&distances),
                "predicted_bound": bound,
            }))?;
        }
        Command::Couple { n, tau, samples, seed } => {
            let caps = sample_capacities(n, tau, seed)?;
            let cmp = compare_shells_with_process(&caps, samples, seed)?;
            print_json(&json!({
                "n": n,
                "tau": tau,
                "samples": samples,
                "tv": cmp.tv,
                "graph_split_half_tv": cmp.graph_split_half_tv,
            }))?;
        }
        Command::Predict { tau, n, gamma } => {
            let giant = giant_fraction(tau, 1e-12)?;
            let trace_len = extinction_probability(tau, 1e-12)?.trace.len();
            let mut report = json!({
                "tau": tau,
                "extinction_probability": giant.extinction_prob,
                "giant_fraction": giant.giant_fraction,
                "fixed_point_iterations": trace_len.saturating_sub(1),
            });
            if let Some(g) = gamma {
                report["w"] = json!(w(g, tau)?);
            }
            if let Some(n) = n {
                let params = core_parameters(n, tau)?;
                report["core"] = serde_json::to_value(&params)?;
                report["distance_bound"] = json!(2 * params.k_star);
                report["core_removed_scale"] = json!(core_removed_scale(n, tau)?);
                if let Some(g) = gamma {
                    report["robust_distance_bound"] = json!(robust_distance_bound(n, g, tau)?);
                    report["backup"] = serde_json::to_value(backup_depth(n, g, tau)?)?;
                }
            }
            print_json(&report)?;
        }
        Command::Experiment { config, out } => {
            let mut cfg = ExperimentConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
            if out.is_some() {
                cfg.output_path = out;
            }
            let result = experiment::run_and_write(&cfg)?;
            for c in &result.checks {
                println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if let Some(prefix) = &cfg.output_path {
                println!("wrote {prefix}.csv and {prefix}.json");
            }
            return Ok(result.passed());
        }
    }
    Ok(true)
}
