use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use srgg_core::clique::write_clique_csv;
use srgg_core::experiment::{run_experiment, sample_graph, BuilderKind, ExperimentConfig};
use srgg_core::graph::write_edge_list;
use srgg_core::point_process::{Purpose, RngStream};
use srgg_core::{Error, ModelParams, TheoryConstants};

#[derive(Parser)]
#[command(
    name = "srgg",
    version,
    about = "Soft random geometric graphs on the torus: long edges in k-cliques"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Simulate { config: PathBuf },
    /// Print the limit constants for (d, alpha, k) at torus side n.
    Constants {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: f64,
        #[arg(long, default_value_t = 1_000_000)]
        mk_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print only the JSON form.
        #[arg(long)]
        json: bool,
    },
    /// Sample one graph and write its edge list (and optionally its k-cliques).
    DumpGraph {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Builder::Tiered)]
        builder: Builder,
        #[arg(long, default_value_t = srgg_core::graph::DEFAULT_CUTOFF)]
        cutoff: f64,
        #[arg(long)]
        out: PathBuf,
        /// Write `v1,...,vk,max_len,long_edge_count` rows here, counting edges ≥ `r`.
        #[arg(long, requires = "r")]
        cliques: Option<PathBuf>,
        #[arg(long)]
        r: Option<f64>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Builder {
    Allpairs,
    Tiered,
}

impl From<Builder> for BuilderKind {
    fn from(b: Builder) -> Self {
        match b {
            Builder::Allpairs => BuilderKind::Allpairs,
            Builder::Tiered => BuilderKind::Tiered,
        }
    }
}

fn simulate(path: PathBuf) -> anyhow::Result<()> {
    let config = ExperimentConfig::from_path(&path)?;
    log::info!(
        "running {:?} with {} replications",
        config.experiment,
        config.replications
    );
    let output = run_experiment(&config)?;
    match config.resolved_output_dir() {
        Some(dir) => {
            for file in output.write_to(&dir)? {
                println!("wrote {}", file.display());
            }
        }
        None => println!("{}", output.report_json()?),
    }
    Ok(())
}

fn constants(
    d: usize,
    alpha: f64,
    k: usize,
    n: f64,
    mk_samples: usize,
    seed: u64,
    json_only: bool,
) -> anyhow::Result<()> {
    ModelParams::new(d, n, alpha, k)?;
    let stream = RngStream::new(seed, 0).purpose(Purpose::Integration);
    let t = TheoryConstants::compute(d, alpha, k, mk_samples, stream)?;
    let c = t.frechet_scale(n);
    let json = serde_json::json!({
        "d": d,
        "alpha": alpha,
        "k": k,
        "n": n,
        "c_d": t.c_d,
        "theta": t.theta,
        "m_k": t.m_k,
        "m_k_std_error": t.m_k_std_error,
        "w_prefactor": t.w_prefactor,
        "frechet_scale": c,
        "critical_radius_r0_1": t.critical_radius(n, 1.0),
    });
    let mut out = io::stdout().lock();
    if !json_only {
        let rows = [
            ("C_d", format!("{}", t.c_d)),
            ("theta", format!("{}", t.theta)),
            ("M_k", format!("{:.10} ± {:.3e}", t.m_k, t.m_k_std_error)),
            ("w_prefactor", format!("{:.10}", t.w_prefactor)),
            ("c(n)", format!("{c:.10}")),
            (
                "critical r (r0=1)",
                format!("{:.10}", t.critical_radius(n, 1.0)),
            ),
        ];
        let width = rows
            .iter()
            .map(|(name, _)| name.chars().count())
            .max()
            .unwrap_or(0);
        for (name, value) in rows {
            writeln!(out, "{name:<width$}  {value}")?;
        }
    }
    writeln!(out, "{}", serde_json::to_string_pretty(&json)?)?;
    Ok(())
}

fn dump_graph(
    params: ModelParams,
    seed: u64,
    builder: Builder,
    cutoff: f64,
    out: PathBuf,
    cliques: Option<PathBuf>,
    r: Option<f64>,
) -> anyhow::Result<()> {
    let graph = sample_graph(
        &params,
        builder.into(),
        cutoff,
        RngStream::replication(seed, 0),
    )?;
    let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
    let mut w = BufWriter::new(file);
    write_edge_list(&graph, seed, &mut w)?;
    w.flush()?;
    if let (Some(path), Some(r)) = (cliques, r) {
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write_clique_csv(&graph, params.k, r, BufWriter::new(file))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config } => simulate(config),
        Command::Constants {
            d,
            alpha,
            k,
            n,
            mk_samples,
            seed,
            json,
        } => constants(d, alpha, k, n, mk_samples, seed, json),
        Command::DumpGraph {
            d,
            alpha,
            k,
            n,
            seed,
            builder,
            cutoff,
            out,
            cliques,
            r,
        } => ModelParams::new(d, n, alpha, k)
            .map_err(anyhow::Error::from)
            .and_then(|p| dump_graph(p, seed, builder, cutoff, out, cliques, r)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let kind = err.downcast_ref::<Error>().map_or("error", Error::kind);
            let message = format!("{err:#}");
            eprintln!(
                "{}",
                serde_json::json!({ "error": kind, "message": message })
            );
            ExitCode::from(2)
        }
    }
}
