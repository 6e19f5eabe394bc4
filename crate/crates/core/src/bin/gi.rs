use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use gi_core::bounds::bound_sweep;
use gi_core::config::RunConfig;
use gi_core::gen::{generate_instance, Profile};
use gi_core::graph::{MetricClosure, Walk};
use gi_core::ilp::{build_model, export_lp, solve_lp_file};
use gi_core::io::{read_instance, save_instance, write_instance};
use gi_core::pipeline::run_pipeline;
use gi_core::results::{emit_results, write_csv};
use gi_core::{Error, Result};

#[derive(Parser)]
#[command(name = "gi", version, about = "Graph inspection walk planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance without color reduction.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Reduce and partition colors, solve every part, merge the walks.
    Pipeline {
        instance: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Steiner upper and LP lower bounds for a list of quotas.
    Bounds {
        instance: PathBuf,
        /// Comma-separated quotas over the original colors.
        #[arg(long, value_delimiter = ',')]
        quotas: Vec<usize>,
        /// Use quotas i/steps * |C| for i = 0..=steps instead.
        #[arg(long)]
        steps: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write a synthetic instance.
    Gen {
        #[arg(long, default_value = "uniform")]
        profile: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a walk file (whitespace-separated vertex ids) against an instance.
    Validate { instance: PathBuf, walk: PathBuf },
    /// Write the integer program of an instance in LP format.
    ExportLp {
        instance: PathBuf,
        #[arg(long)]
        t: Option<usize>,
        /// Drop integrality.
        #[arg(long)]
        relax: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an LP file with HiGHS and write a solution file.
    LpSolve {
        lp: PathBuf,
        sol: PathBuf,
        /// Seconds, or `inf`.
        time_limit: Option<String>,
        threads: Option<usize>,
    },
}

#[derive(Args, Default)]
struct RunArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_enum::<gi_core::config::SolverKind>)]
    solver: Option<gi_core::config::SolverKind>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long = "W")]
    parts: Option<usize>,
    /// rand, greedy, outlier, metric or none.
    #[arg(long)]
    reduction: Option<String>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, value_parser = parse_enum::<gi_core::reduction::PartitionMethod>)]
    partition: Option<gi_core::reduction::PartitionMethod>,
    #[arg(long, value_parser = parse_enum::<gi_core::reduction::PartitionMode>)]
    mode: Option<gi_core::reduction::PartitionMode>,
    #[arg(long, value_parser = parse_enum::<gi_core::merge::MergeStrategy>)]
    merge: Option<gi_core::merge::MergeStrategy>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long = "t-frac")]
    t_frac: Option<f64>,
    #[arg(long = "time-limit")]
    time_limit: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_enum::<gi_core::config::BackendKind>)]
    backend: Option<gi_core::config::BackendKind>,
    #[arg(long = "backend-path")]
    backend_path: Option<PathBuf>,
    /// Add bound columns to the report.
    #[arg(long)]
    bounds: bool,
    /// Output stem: writes `<out>.csv` and `<out>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_enum<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = self.$field.clone() { cfg.$target = v; })*
            };
        }
        set!(solver => solver, k => k, parts => parts, r => r, partition => partition,
             mode => mode, merge => merge, time_limit => time_limit, threads => threads,
             seed => seed, backend => backend);
        if let Some(r) = &self.reduction {
            cfg.reduction = if r == "none" {
                None
            } else {
                Some(parse_enum(r).map_err(Error::InvalidConfig)?)
            };
        }
        if self.t.is_some() {
            cfg.t = self.t;
        }
        if self.t_frac.is_some() {
            cfg.t_frac = self.t_frac;
        }
        if self.backend_path.is_some() {
            cfg.backend_path = self.backend_path.clone();
        }
        cfg.bounds |= self.bounds;
        cfg.apply_env();
        Ok(cfg)
    }
}

fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Returns whether every part was solved.
fn run_and_emit(instance: &Path, cfg: &RunConfig, out: Option<&Path>) -> Result<bool> {
    let inst = read_instance(instance)?;
    let report = run_pipeline(&inst, &instance_name(instance), cfg)?;
    for (i, p) in report.parts.iter().enumerate() {
        if let Some(msg) = &p.message {
            log::warn!("part {i}: {msg}");
        }
    }
    match out {
        Some(stem) => emit_results(std::slice::from_ref(&report), stem)?,
        None => write_csv(
            std::io::stdout().lock(),
            std::slice::from_ref(&report),
            true,
        )?,
    }
    eprintln!(
        "weight {} coverage {:.2}% walk {:?}",
        report.weight,
        100.0 * report.coverage,
        report.merged.vertices
    );
    Ok(report.all_solved())
}

/// `Ok(false)` when the run finished but some part stayed unsolved.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve { instance, run } => {
            let mut cfg = run.config()?;
            cfg.reduction = None;
            cfg.parts = 1;
            run_and_emit(&instance, &cfg, run.out.as_deref())
        }
        Command::Pipeline { instance, run } => {
            let cfg = run.config()?;
            run_and_emit(&instance, &cfg, run.out.as_deref())
        }
        Command::Bounds {
            instance,
            quotas,
            steps,
            run,
        } => {
            let cfg = run.config()?;
            let inst = read_instance(&instance)?;
            let norm = inst.normalize()?;
            let base = norm.instance;
            let c = inst.num_colors();
            let wanted: Vec<usize> = match steps {
                Some(s) if s > 0 => (0..=s).map(|i| (i * c + s / 2) / s).collect(),
                _ => quotas,
            };
            let available = base.collectible_colors().len();
            let shift = norm.start_colors.len();
            let local: Vec<usize> = wanted
                .iter()
                .map(|&t| t.saturating_sub(shift).min(available))
                .collect();
            let mc = MetricClosure::new(&base)?;
            let backend = cfg.backend()?;
            let reports = bound_sweep(&base, &mc, &local, backend.as_ref())?;
            println!("quota,lower,upper");
            for r in reports {
                println!("{},{},{}", r.quota + shift, r.lower, r.upper);
            }
            Ok(true)
        }
        Command::Gen {
            profile,
            n,
            seed,
            out,
        } => {
            let inst = generate_instance(profile.parse::<Profile>()?, n, seed)?;
            match out {
                Some(p) => save_instance(&inst, &p)?,
                None => print!("{}", write_instance(&inst)),
            }
            Ok(true)
        }
        Command::Validate { instance, walk } => {
            let inst = read_instance(&instance)?;
            let text = std::fs::read_to_string(&walk).map_err(|e| Error::Io {
                path: walk.clone(),
                source: e,
            })?;
            let vertices = text
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::InvalidWalk(format!("bad vertex id '{t}'")))
                })
                .collect::<Result<Vec<usize>>>()?;
            let w = Walk::from_vertices(&inst, vertices)?;
            w.validate(&inst, inst.start())?;
            println!(
                "valid: weight {} colors {} coverage {:.2}%",
                w.weight,
                w.collected.len(),
                100.0 * w.coverage(&inst)
            );
            Ok(true)
        }
        Command::ExportLp {
            instance,
            t,
            relax,
            out,
        } => {
            let inst = read_instance(&instance)?;
            let norm = inst.normalize()?;
            let t = t.unwrap_or(inst.quota());
            let at = norm
                .instance
                .with_quota(t.saturating_sub(norm.start_colors.len()))?;
            let text = export_lp(&build_model(&at)?, relax);
            match out {
                Some(p) => {
                    std::fs::write(&p, text).map_err(|e| Error::Io { path: p, source: e })?
                }
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::LpSolve {
            lp,
            sol,
            time_limit,
            threads,
        } => {
            let limit = match time_limit.as_deref() {
                None | Some("inf") => None,
                Some(s) => Some(
                    s.parse::<f64>()
                        .map_err(|_| Error::InvalidConfig(format!("bad time limit '{s}'")))?,
                ),
            };
            let status = solve_lp_file(&lp, &sol, limit, threads)?;
            log::info!("{status:?}");
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
