//! Measurement protocol: the buffered measurement region, border nodes,
//! accessibility densities, seeded ensembles and the `p_n` sweep.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::accessibility::{accessibility_fields, AccessibilityField, FieldMeta, Normalization};
use crate::error::{Error, Result};
use crate::growth::{derive_run_seed, grow_checkpoints, GrowthConfig};
use crate::lattice::{LatticeGraph, Site};
use crate::registry::{self, DEFAULT_NORMALIZATION, DEFAULT_SAMPLER};
use crate::sampler::EdgeSampler;
use crate::stats;

/// Columns `x_min..=x_max`; the two lateral strips of width `h_max` are excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasurementRegion {
    pub x_min: u32,
    pub x_max: u32,
}

impl MeasurementRegion {
    pub fn new(width: u32, h_max: usize) -> Result<Self> {
        let h = h_max as u64;
        if u64::from(width) <= 2 * h {
            return Err(Error::config(format!(
                "L={width} leaves no measurement region with h_max={h_max} (need L > 2*h_max)"
            )));
        }
        Ok(Self {
            x_min: h_max as u32,
            x_max: width - 1 - h_max as u32,
        })
    }

    pub fn contains(&self, site: Site) -> bool {
        site.x >= self.x_min && site.x <= self.x_max
    }
}

/// Nodes inside the measurement region, sorted.
pub fn included_nodes(graph: &LatticeGraph, h_max: usize) -> Result<Vec<Site>> {
    let region = MeasurementRegion::new(graph.width(), h_max)?;
    let mut nodes: Vec<Site> = graph
        .sites()
        .iter()
        .copied()
        .filter(|&s| region.contains(s))
        .collect();
    nodes.sort_unstable();
    Ok(nodes)
}

/// Comparison used to classify border nodes against the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BorderRule {
    /// `alpha <= threshold`
    #[default]
    AtMost,
    /// `alpha < threshold`
    Below,
}

impl BorderRule {
    pub fn is_border(self, alpha: f64, threshold: f64) -> bool {
        match self {
            BorderRule::AtMost => alpha <= threshold,
            BorderRule::Below => alpha < threshold,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BorderRule::AtMost => "le",
            BorderRule::Below => "lt",
        }
    }
}

impl FromStr for BorderRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "le" => Ok(BorderRule::AtMost),
            "lt" => Ok(BorderRule::Below),
            _ => Err(Error::config(format!(
                "border rule must be `le` or `lt`, got `{s}`"
            ))),
        }
    }
}

impl fmt::Display for BorderRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Nodes with `alpha <= threshold`.
pub fn border_nodes(field: &AccessibilityField, threshold: f64) -> BTreeSet<Site> {
    border_nodes_with(field, threshold, BorderRule::AtMost)
}

pub fn border_nodes_with(
    field: &AccessibilityField,
    threshold: f64,
    rule: BorderRule,
) -> BTreeSet<Site> {
    field
        .entries
        .iter()
        .filter(|&&(_, a)| rule.is_border(a, threshold))
        .map(|&(s, _)| s)
        .collect()
}

/// CSV: `x,y,is_border`, one row per node of the field.
pub fn write_borders_csv<W: Write>(
    out: &mut W,
    field: &AccessibilityField,
    border: &BTreeSet<Site>,
) -> Result<()> {
    writeln!(out, "x,y,is_border")?;
    for &(s, _) in &field.entries {
        writeln!(out, "{},{},{}", s.x, s.y, u8::from(border.contains(&s)))?;
    }
    Ok(())
}

/// Density histogram with bins `[k*w, (k+1)*w)` anchored at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_width: f64,
    pub densities: Vec<f64>,
    pub sample_count: usize,
}

impl Histogram {
    pub fn from_values(values: &[f64], bin_width: f64) -> Result<Self> {
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(Error::config(format!(
                "bin width must be positive, got {bin_width}"
            )));
        }
        if values.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let bin = |v: f64| (v / bin_width).floor() as usize;
        let bins = values.iter().map(|&v| bin(v)).max().unwrap_or(0) + 1;
        let mut counts = vec![0usize; bins];
        for &v in values {
            counts[bin(v)] += 1;
        }
        let norm = values.len() as f64 * bin_width;
        Ok(Self {
            bin_width,
            densities: counts.iter().map(|&c| c as f64 / norm).collect(),
            sample_count: values.len(),
        })
    }

    pub fn bin_lo(&self, k: usize) -> f64 {
        k as f64 * self.bin_width
    }

    pub fn bin_hi(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.bin_width
    }

    pub fn bin_edges(&self) -> Vec<f64> {
        (0..=self.densities.len()).map(|k| self.bin_lo(k)).collect()
    }

    /// Sum of density times width; 1 up to rounding.
    pub fn integral(&self) -> f64 {
        self.densities.iter().map(|d| d * self.bin_width).sum()
    }
}

pub fn accessibility_histogram(
    field: &AccessibilityField,
    region: &MeasurementRegion,
    bin_width: f64,
) -> Result<Histogram> {
    let values: Vec<f64> = field
        .entries
        .iter()
        .filter(|&&(s, _)| region.contains(s))
        .map(|&(_, a)| a)
        .collect();
    Histogram::from_values(&values, bin_width)
}

/// How densities are combined across runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HistogramMode {
    /// One histogram per run, then mean and std per bin.
    #[default]
    PerRun,
    /// A single histogram over the nodes of all runs (std reported as 0).
    Pooled,
}

impl FromStr for HistogramMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-run" => Ok(HistogramMode::PerRun),
            "pooled" => Ok(HistogramMode::Pooled),
            _ => Err(Error::config(format!(
                "histogram mode must be `per-run` or `pooled`, got `{s}`"
            ))),
        }
    }
}

impl HistogramMode {
    pub fn as_str(self) -> &'static str {
        match self {
            HistogramMode::PerRun => "per-run",
            HistogramMode::Pooled => "pooled",
        }
    }
}

#[derive(Clone)]
pub struct EnsembleConfig {
    /// Template for every run; its seed and target are replaced per run.
    pub growth: GrowthConfig,
    pub n_runs: usize,
    pub master_seed: u64,
    pub h_list: Vec<usize>,
    pub e_checkpoints: Vec<usize>,
    pub h_max: usize,
    pub bin_width: f64,
    pub border_threshold: f64,
    pub border_rule: BorderRule,
    pub histogram_mode: HistogramMode,
    pub sampler: Arc<dyn EdgeSampler>,
    pub normalization: Arc<dyn Normalization>,
}

impl EnsembleConfig {
    /// Defaults for the axis-growth experiments: `L=60, H=50, h_max=10`,
    /// checkpoints 500..2500, `h in {3, 5, 10}`, 30 runs.
    pub fn standard(p_n: f64, master_seed: u64) -> Self {
        Self {
            growth: GrowthConfig::new(60, 50, p_n, 2500, master_seed),
            n_runs: 30,
            master_seed,
            h_list: vec![3, 5, 10],
            e_checkpoints: vec![500, 1000, 1500, 2500],
            h_max: 10,
            bin_width: 1.0,
            border_threshold: 6.0,
            border_rule: BorderRule::AtMost,
            histogram_mode: HistogramMode::PerRun,
            sampler: registry::samplers()
                .get(DEFAULT_SAMPLER)
                .expect("default sampler"),
            normalization: registry::normalizations()
                .get(DEFAULT_NORMALIZATION)
                .expect("default normalization"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 {
            return Err(Error::config("runs must be at least 1"));
        }
        if self.h_list.is_empty() || self.h_list.contains(&0) {
            return Err(Error::config("h_list must hold hierarchies >= 1"));
        }
        if self.e_checkpoints.is_empty() {
            return Err(Error::config("e_checkpoints must not be empty"));
        }
        if self.bin_width <= 0.0 || self.bin_width.is_nan() {
            return Err(Error::config("bin_width must be positive"));
        }
        self.growth.validate_dims()?;
        for &e in &self.e_checkpoints {
            self.growth.validate_stage(e)?;
        }
        MeasurementRegion::new(self.growth.width, self.h_max)?;
        Ok(())
    }
}

/// Measurements of one run at one `(e, h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeasurement {
    pub run: usize,
    pub seed: u64,
    pub e: usize,
    pub h: usize,
    pub alpha_mean: f64,
    pub border_count: usize,
    pub histogram: Histogram,
    /// Accessibility of every measured node, sorted by site.
    pub values: Vec<f64>,
}

/// Aggregate over all runs at one `(e, h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub p_n: f64,
    pub e: usize,
    pub h: usize,
    pub n_runs: usize,
    pub master_seed: u64,
    pub bin_width: f64,
    pub density_mean: Vec<f64>,
    pub density_std: Vec<f64>,
    /// Per-run mean accessibility over the measurement region, by run index.
    pub run_means: Vec<f64>,
    pub alpha_mean: f64,
    pub alpha_std: f64,
    pub border_counts: Vec<usize>,
    pub sample_counts: Vec<usize>,
}

impl EnsembleSummary {
    pub fn border_counts_f64(&self) -> Vec<f64> {
        self.border_counts.iter().map(|&c| c as f64).collect()
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    /// Ordered by `(e, h)` ascending.
    pub summaries: Vec<EnsembleSummary>,
    /// Ordered by `(run, e, h)`.
    pub runs: Vec<RunMeasurement>,
}

impl EnsembleResult {
    pub fn summary(&self, e: usize, h: usize) -> Option<&EnsembleSummary> {
        self.summaries.iter().find(|s| s.e == e && s.h == h)
    }

    pub fn run(&self, run: usize, e: usize, h: usize) -> Option<&RunMeasurement> {
        self.runs
            .iter()
            .find(|m| m.run == run && m.e == e && m.h == h)
    }
}

fn sorted_unique(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Measures one grown structure at every `h`.
pub fn measure_structure(
    graph: &LatticeGraph,
    cfg: &EnsembleConfig,
    meta: FieldMeta,
) -> Result<Vec<(AccessibilityField, Histogram, usize)>> {
    let region = MeasurementRegion::new(graph.width(), cfg.h_max)?;
    let nodes = included_nodes(graph, cfg.h_max)?;
    if nodes.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let hs = sorted_unique(&cfg.h_list);
    accessibility_fields(graph, &hs, cfg.normalization.as_ref(), Some(&nodes))?
        .into_iter()
        .map(|mut field| {
            field.meta = meta;
            let hist = accessibility_histogram(&field, &region, cfg.bin_width)?;
            let borders = border_nodes_with(&field, cfg.border_threshold, cfg.border_rule).len();
            Ok((field, hist, borders))
        })
        .collect()
}

fn run_one(
    cfg: &EnsembleConfig,
    run: usize,
    stages: &[usize],
    hs: &[usize],
) -> Result<Vec<RunMeasurement>> {
    let seed = derive_run_seed(cfg.master_seed, run);
    let growth = GrowthConfig {
        seed,
        target_e: *stages.last().expect("nonempty checkpoints"),
        ..cfg.growth.clone()
    };
    let wrap = |e: Error| Error::Run {
        run,
        seed,
        source: Box::new(e),
    };
    let (snapshots, _) = grow_checkpoints(&growth, cfg.sampler.as_ref(), stages).map_err(wrap)?;
    let mut out = Vec::with_capacity(stages.len() * hs.len());
    for (e, graph) in &snapshots {
        let meta = FieldMeta {
            e: *e,
            p_n: growth.p_n,
            seed,
        };
        let measured = measure_structure(graph, cfg, meta).map_err(wrap)?;
        for (field, histogram, border_count) in measured {
            let values: Vec<f64> = field.values().collect();
            out.push(RunMeasurement {
                run,
                seed,
                e: *e,
                h: field.h,
                alpha_mean: stats::mean(&values),
                border_count,
                histogram,
                values,
            });
        }
    }
    debug_assert!(out.iter().map(|m| m.h).all(|h| hs.contains(&h)));
    Ok(out)
}

/// Grows `n_runs` seeded realizations (one trajectory each, snapshotted at
/// every checkpoint) and aggregates their measurements per `(e, h)`.
/// Runs execute in parallel; results do not depend on scheduling.
pub fn ensemble(cfg: &EnsembleConfig) -> Result<EnsembleResult> {
    cfg.validate()?;
    let stages = sorted_unique(&cfg.e_checkpoints);
    let hs = sorted_unique(&cfg.h_list);
    let per_run: Vec<Vec<RunMeasurement>> = (0..cfg.n_runs)
        .into_par_iter()
        .map(|run| run_one(cfg, run, &stages, &hs))
        .collect::<Result<_>>()?;
    let runs: Vec<RunMeasurement> = per_run.into_iter().flatten().collect();
    let summaries = aggregate(cfg, &runs, &stages, &hs)?;
    Ok(EnsembleResult { summaries, runs })
}

/// Combines run measurements into per-`(e, h)` summaries. The result does
/// not depend on the order of `runs`.
pub fn aggregate(
    cfg: &EnsembleConfig,
    runs: &[RunMeasurement],
    stages: &[usize],
    hs: &[usize],
) -> Result<Vec<EnsembleSummary>> {
    let mut out = Vec::new();
    for &e in stages {
        for &h in hs {
            let mut group: Vec<&RunMeasurement> =
                runs.iter().filter(|m| m.e == e && m.h == h).collect();
            group.sort_by_key(|m| m.run);
            let run_means: Vec<f64> = group.iter().map(|m| m.alpha_mean).collect();
            let (density_mean, density_std) = match cfg.histogram_mode {
                HistogramMode::PerRun => {
                    let bins = group
                        .iter()
                        .map(|m| m.histogram.densities.len())
                        .max()
                        .unwrap_or(0);
                    (0..bins)
                        .map(|k| {
                            let col: Vec<f64> = group
                                .iter()
                                .map(|m| m.histogram.densities.get(k).copied().unwrap_or(0.0))
                                .collect();
                            (stats::mean(&col), stats::std_dev(&col))
                        })
                        .unzip()
                }
                HistogramMode::Pooled => {
                    let mut pooled: Vec<f64> = group
                        .iter()
                        .flat_map(|m| m.values.iter().copied())
                        .collect();
                    pooled.sort_by(f64::total_cmp);
                    let hist = Histogram::from_values(&pooled, cfg.bin_width)?;
                    let zeros = vec![0.0; hist.densities.len()];
                    (hist.densities, zeros)
                }
            };
            out.push(EnsembleSummary {
                p_n: cfg.growth.p_n,
                e,
                h,
                n_runs: group.len(),
                master_seed: cfg.master_seed,
                bin_width: cfg.bin_width,
                density_mean,
                density_std,
                alpha_mean: stats::mean(&run_means),
                alpha_std: stats::std_dev(&run_means),
                border_counts: group.iter().map(|m| m.border_count).collect(),
                sample_counts: group.iter().map(|m| m.histogram.sample_count).collect(),
                run_means,
            });
        }
    }
    Ok(out)
}

/// One point of the `p_n` sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub p_n: f64,
    pub h: usize,
    pub e: usize,
    pub alpha_mean: f64,
    pub alpha_std: f64,
    pub n_runs: usize,
}

/// Runs one ensemble per `p_n` at a single stage `e` and reports the mean
/// and standard deviation of the per-run mean accessibility per `h`.
pub fn sweep_pn(template: &EnsembleConfig, pn_list: &[f64], e: usize) -> Result<Vec<SweepPoint>> {
    if let Some(bad) = pn_list.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::config(format!(
            "p_n values must lie in [0, 1], got {bad}"
        )));
    }
    if pn_list.is_empty() {
        return Err(Error::config("p_n list must not be empty"));
    }
    let mut points = Vec::new();
    for &p_n in pn_list {
        let mut cfg = template.clone();
        cfg.growth.p_n = p_n;
        cfg.e_checkpoints = vec![e];
        let result = ensemble(&cfg)?;
        for s in &result.summaries {
            points.push(SweepPoint {
                p_n,
                h: s.h,
                e: s.e,
                alpha_mean: s.alpha_mean,
                alpha_std: s.alpha_std,
                n_runs: s.n_runs,
            });
        }
    }
    Ok(points)
}

/// CSV: `p_n,e,h,bin_lo,bin_hi,density_mean,density_std`.
pub fn write_histograms_csv<W: Write>(out: &mut W, summaries: &[EnsembleSummary]) -> Result<()> {
    writeln!(out, "p_n,e,h,bin_lo,bin_hi,density_mean,density_std")?;
    for s in summaries {
        for (k, (m, sd)) in s.density_mean.iter().zip(&s.density_std).enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                s.p_n,
                s.e,
                s.h,
                k as f64 * s.bin_width,
                (k + 1) as f64 * s.bin_width,
                m,
                sd
            )?;
        }
    }
    Ok(())
}

/// CSV: `p_n,h,e,alpha_mean,alpha_std,n_runs`.
pub fn write_sweep_csv<W: Write>(out: &mut W, points: &[SweepPoint]) -> Result<()> {
    writeln!(out, "p_n,h,e,alpha_mean,alpha_std,n_runs")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            p.p_n, p.h, p.e, p.alpha_mean, p.alpha_std, p.n_runs
        )?;
    }
    Ok(())
}

/// CSV: `p_n,e,h,run,seed,alpha_mean,border_count,sample_count`.
pub fn write_runs_csv<W: Write>(out: &mut W, p_n: f64, runs: &[RunMeasurement]) -> Result<()> {
    writeln!(out, "p_n,e,h,run,seed,alpha_mean,border_count,sample_count")?;
    for m in runs {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            p_n, m.e, m.h, m.run, m.seed, m.alpha_mean, m.border_count, m.histogram.sample_count
        )?;
    }
    Ok(())
}
