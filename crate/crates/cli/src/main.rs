//! `radial`: grow structures, measure accessibility, run ensembles and
//! preference sweeps.
//!
//! Exit codes: 0 on success, 1 on runtime failure, 2 on usage or
//! validation errors.

mod manifest;

use std::fmt;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use radial_core::accessibility::FieldMeta;
use radial_core::analysis::{
    border_nodes_with, measure_structure, write_borders_csv, write_histograms_csv, write_runs_csv,
    write_sweep_csv, SweepPoint,
};
use radial_core::config::{default_pn_sweep, RunConfig};
use radial_core::edgelist::{read_structure, write_structure};
use radial_core::growth::{derive_run_seed, GrowthConfig};
use radial_core::registry;
use radial_core::{accessibility_fields, grow_checkpoints, sweep_pn};

use manifest::Output;

/// Environment variable naming the default output root.
const OUT_ENV: &str = "RADIAL_OUT";
const DEFAULT_OUT_ROOT: &str = "radial-out";

#[derive(Parser)]
#[command(
    name = "radial",
    version,
    about = "Radial lattice growth and node accessibility"
)]
struct Cli {
    /// Worker threads for parallel work (default: all cores). Results do
    /// not depend on this.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow one structure and write an edge list at every checkpoint.
    Grow(Common),
    /// Compute accessibility fields and border nodes for a structure file.
    Measure {
        /// Edge-list file written by `grow`.
        structure: PathBuf,
        /// Hierarchies to measure, e.g. `3,5,10` (overrides `h_list`).
        #[arg(long = "h", value_delimiter = ',', value_name = "H")]
        hs: Option<Vec<usize>>,
        #[command(flatten)]
        common: Common,
    },
    /// Run seeded ensembles and write density and summary CSVs.
    Ensemble {
        #[command(flatten)]
        common: Common,
        /// Number of runs per `p_n` (overrides `runs`).
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Mean accessibility across a list of normal-growth preferences.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        runs: Option<usize>,
        /// Growth stage to measure (default: `e` from the config).
        #[arg(long)]
        stage: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// `key=value` config file; defaults apply to missing keys.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Master seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Override one config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (default: `$RADIAL_OUT/<command>` or `radial-out/<command>`).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Bad invocation: missing files and the like. Exits with 2.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    Usage(format!("cannot read config file {}: {e}", path.display()))
                })?;
                RunConfig::parse(&text)
                    .with_context(|| format!("in config file {}", path.display()))?
            }
            None => RunConfig::default(),
        };
        for assignment in &self.overrides {
            cfg.apply(assignment)
                .with_context(|| format!("in --set {assignment}"))?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }

    fn out_dir(&self, command: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| {
            let root = std::env::var_os(OUT_ENV)
                .map_or_else(|| PathBuf::from(DEFAULT_OUT_ROOT), PathBuf::from);
            root.join(command)
        })
    }
}

fn write_config(out: &mut Output, cfg: &RunConfig) -> Result<()> {
    out.write("config.txt", |w| {
        w.extend_from_slice(cfg.to_text().as_bytes());
        Ok(())
    })
}

fn pn_label(p_n: f64) -> String {
    format!("pn{p_n}")
}

fn cmd_grow(common: &Common) -> Result<PathBuf> {
    let cfg = common.load()?;
    let growth = cfg.growth();
    growth.validate()?;
    let sampler = registry::samplers().get(&cfg.sampler)?;
    let stages = cfg.growth_checkpoints();
    let (snapshots, trace) = grow_checkpoints(&growth, sampler.as_ref(), &stages)?;

    let mut out = Output::create(
        &common.out_dir("grow"),
        "grow",
        Some(cfg.seed),
        cfg.to_text(),
    )?;
    if let Some(path) = &common.config {
        out.add_input(path);
    }
    write_config(&mut out, &cfg)?;
    for (e, graph) in &snapshots {
        out.write(&format!("structures/e{e}.edges"), |w| {
            write_structure(w, graph, cfg.seed, cfg.p_n)
        })?;
    }
    out.write("trace.csv", |w| trace.write_csv(w))?;
    out.finish()
}

fn cmd_measure(structure: &Path, hs: Option<&[usize]>, common: &Common) -> Result<PathBuf> {
    let mut cfg = common.load()?;
    if let Some(hs) = hs {
        cfg.h_list = hs.to_vec();
    }
    let mut hs = cfg.h_list.clone();
    hs.sort_unstable();
    hs.dedup();
    let norm = registry::normalizations().get(&cfg.normalization)?;
    let file = File::open(structure).map_err(|e| {
        Usage(format!(
            "cannot open structure file {}: {e}",
            structure.display()
        ))
    })?;
    let parsed = read_structure(BufReader::new(file))
        .with_context(|| format!("reading {}", structure.display()))?;

    let meta = FieldMeta {
        e: radial_core::GraphView::edge_count(&parsed.graph),
        p_n: parsed.meta.p_n,
        seed: parsed.meta.seed,
    };
    let fields = accessibility_fields(&parsed.graph, &hs, norm.as_ref(), None)?;

    let mut out = Output::create(
        &common.out_dir("measure"),
        "measure",
        Some(parsed.meta.seed),
        cfg.to_text(),
    )?;
    out.add_input(structure);
    for mut field in fields {
        field.meta = meta;
        let h = field.h;
        out.write(&format!("alpha_h{h}.csv"), |w| field.write_csv(w))?;
        let border = border_nodes_with(&field, cfg.border_threshold, cfg.border_rule);
        out.write(&format!("borders_h{h}.csv"), |w| {
            write_borders_csv(w, &field, &border)
        })?;
    }
    out.finish()
}

fn cmd_ensemble(common: &Common, runs: Option<usize>) -> Result<PathBuf> {
    let mut cfg = common.load()?;
    if let Some(runs) = runs {
        cfg.runs = runs;
    }
    let pn_list = cfg.p_n_list.clone().unwrap_or_else(|| vec![cfg.p_n]);
    let configs = pn_list
        .iter()
        .map(|&p| cfg.ensemble(p))
        .collect::<radial_core::Result<Vec<_>>>()?;
    for ens in &configs {
        ens.validate()?;
    }

    let mut out = Output::create(
        &common.out_dir("ensemble"),
        "ensemble",
        Some(cfg.seed),
        cfg.to_text(),
    )?;
    if let Some(path) = &common.config {
        out.add_input(path);
    }
    write_config(&mut out, &cfg)?;

    let mut summaries = Vec::new();
    for ens in &configs {
        let p_n = ens.growth.p_n;
        let result = radial_core::ensemble(ens)?;
        out.write(&format!("runs/{}.csv", pn_label(p_n)), |w| {
            write_runs_csv(w, p_n, &result.runs)
        })?;

        // Run 0 regrown for maps of individual structures; identical to the
        // trajectory measured in the ensemble.
        let seed = derive_run_seed(ens.master_seed, 0);
        let growth = GrowthConfig {
            seed,
            target_e: *ens.e_checkpoints.iter().max().expect("validated"),
            ..ens.growth.clone()
        };
        let (snapshots, _) = grow_checkpoints(&growth, ens.sampler.as_ref(), &ens.e_checkpoints)?;
        for (e, graph) in &snapshots {
            let tag = format!("{}_e{e}", pn_label(p_n));
            out.write(&format!("structures/{tag}.edges"), |w| {
                write_structure(w, graph, seed, p_n)
            })?;
            for (field, _, _) in measure_structure(graph, ens, FieldMeta { e: *e, p_n, seed })? {
                let h = field.h;
                out.write(&format!("fields/{tag}_h{h}.csv"), |w| field.write_csv(w))?;
                let border = border_nodes_with(&field, ens.border_threshold, ens.border_rule);
                out.write(&format!("borders/{tag}_h{h}.csv"), |w| {
                    write_borders_csv(w, &field, &border)
                })?;
            }
        }
        summaries.extend(result.summaries);
    }
    out.write("histograms.csv", |w| write_histograms_csv(w, &summaries))?;
    let points: Vec<SweepPoint> = summaries
        .iter()
        .map(|s| SweepPoint {
            p_n: s.p_n,
            h: s.h,
            e: s.e,
            alpha_mean: s.alpha_mean,
            alpha_std: s.alpha_std,
            n_runs: s.n_runs,
        })
        .collect();
    out.write("summary.csv", |w| write_sweep_csv(w, &points))?;
    out.finish()
}

fn cmd_sweep(common: &Common, runs: Option<usize>, stage: Option<usize>) -> Result<PathBuf> {
    let mut cfg = common.load()?;
    if let Some(runs) = runs {
        cfg.runs = runs;
    }
    let stage = stage.unwrap_or(cfg.target_e);
    let pn_list = cfg.p_n_list.clone().unwrap_or_else(default_pn_sweep);
    let mut template = cfg.ensemble(cfg.p_n)?;
    template.e_checkpoints = vec![stage];
    template.growth.target_e = stage;
    template.validate()?;

    let points = sweep_pn(&template, &pn_list, stage)?;
    let mut out = Output::create(
        &common.out_dir("sweep"),
        "sweep",
        Some(cfg.seed),
        cfg.to_text(),
    )?;
    if let Some(path) = &common.config {
        out.add_input(path);
    }
    write_config(&mut out, &cfg)?;
    out.write("sweep.csv", |w| write_sweep_csv(w, &points))?;
    out.finish()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let validation = err.chain().any(|cause| {
        cause.is::<Usage>()
            || cause
                .downcast_ref::<radial_core::Error>()
                .is_some_and(radial_core::Error::is_validation)
    });
    if validation {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Grow(common) => cmd_grow(common),
        Command::Measure {
            structure,
            hs,
            common,
        } => cmd_measure(structure, hs.as_deref(), common),
        Command::Ensemble { common, runs } => cmd_ensemble(common, *runs),
        Command::Sweep {
            common,
            runs,
            stage,
        } => cmd_sweep(common, *runs, *stage),
    };
    match result {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
