//! Flat `key=value` run configuration.
//!
//! ```text
//! # comments and blank lines are ignored
//! L=60
//! H=50
//! p_n=0.5
//! e=2500
//! e_checkpoints=500,1000,1500,2500
//! h_list=3,5,10
//! h_max=10
//! sides=both
//! runs=30
//! seed=1
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use crate::analysis::{BorderRule, EnsembleConfig, HistogramMode};
use crate::error::{Error, Result};
use crate::growth::{GrowthConfig, Sides};
use crate::registry::{self, DEFAULT_NORMALIZATION, DEFAULT_SAMPLER};

/// Growth stages shown for a single structure.
pub const GROWTH_STAGES: [usize; 5] = [500, 1000, 1500, 2000, 2500];
/// Growth stages used for accessibility densities.
pub const DENSITY_STAGES: [usize; 4] = [500, 1000, 1500, 2500];

/// `0.05, 0.10, ..., 0.95`.
pub fn default_pn_sweep() -> Vec<f64> {
    (1..=19).map(|k| k as f64 / 20.0).collect()
}

const KEYS: &[&str] = &[
    "L",
    "H",
    "p_n",
    "p_n_list",
    "e",
    "e_checkpoints",
    "h_list",
    "h_max",
    "sides",
    "runs",
    "seed",
    "sampler",
    "normalization",
    "count_axis_edges",
    "bin_width",
    "border_threshold",
    "border_rule",
    "histogram_mode",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub width: u32,
    pub height: u32,
    pub p_n: f64,
    /// Values swept by `sweep` and measured by `ensemble`; defaults to `[p_n]`
    /// for `ensemble` and to `0.05..0.95` for `sweep` when unset.
    pub p_n_list: Option<Vec<f64>>,
    pub target_e: usize,
    /// Unset means the command's own default stage set.
    pub e_checkpoints: Option<Vec<usize>>,
    pub h_list: Vec<usize>,
    pub h_max: usize,
    pub sides: Sides,
    pub runs: usize,
    pub seed: u64,
    pub sampler: String,
    pub normalization: String,
    pub count_axis_edges: bool,
    pub bin_width: f64,
    pub border_threshold: f64,
    pub border_rule: BorderRule,
    pub histogram_mode: HistogramMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            width: 60,
            height: 50,
            p_n: 0.5,
            p_n_list: None,
            target_e: 2500,
            e_checkpoints: None,
            h_list: vec![3, 5, 10],
            h_max: 10,
            sides: Sides::Both,
            runs: 30,
            seed: 1,
            sampler: DEFAULT_SAMPLER.to_owned(),
            normalization: DEFAULT_NORMALIZATION.to_owned(),
            count_axis_edges: true,
            bin_width: 1.0,
            border_threshold: 6.0,
            border_rule: BorderRule::AtMost,
            histogram_mode: HistogramMode::PerRun,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("invalid value for `{key}`: `{value}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items: Vec<T> = value
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_value(key, t))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::config(format!(
            "`{key}` must list at least one value"
        )));
    }
    Ok(items)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Parses config text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            cfg.apply(line).map_err(|e| match e {
                Error::Config(msg) => Error::parse(i + 1, msg),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    /// Applies one `key=value` assignment.
    pub fn apply(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::config(format!("expected key=value, got `{assignment}`")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "L" => self.width = parse_value(key, value)?,
            "H" => self.height = parse_value(key, value)?,
            "p_n" => self.p_n = parse_value(key, value)?,
            "p_n_list" => self.p_n_list = Some(parse_list(key, value)?),
            "e" => self.target_e = parse_value(key, value)?,
            "e_checkpoints" => self.e_checkpoints = Some(parse_list(key, value)?),
            "h_list" => self.h_list = parse_list(key, value)?,
            "h_max" => self.h_max = parse_value(key, value)?,
            "sides" => self.sides = value.parse()?,
            "runs" => self.runs = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "sampler" => self.sampler = value.to_owned(),
            "normalization" => self.normalization = value.to_owned(),
            "count_axis_edges" => self.count_axis_edges = parse_value(key, value)?,
            "bin_width" => self.bin_width = parse_value(key, value)?,
            "border_threshold" => self.border_threshold = parse_value(key, value)?,
            "border_rule" => self.border_rule = value.parse()?,
            "histogram_mode" => self.histogram_mode = value.parse()?,
            _ => {
                return Err(Error::config(format!(
                    "unknown key `{key}` (known: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Every key with its current value, in a stable order; parses back to
    /// the same config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        put("L", self.width.to_string());
        put("H", self.height.to_string());
        put("p_n", self.p_n.to_string());
        if let Some(list) = &self.p_n_list {
            put("p_n_list", join(list));
        }
        put("e", self.target_e.to_string());
        if let Some(list) = &self.e_checkpoints {
            put("e_checkpoints", join(list));
        }
        put("h_list", join(&self.h_list));
        put("h_max", self.h_max.to_string());
        put("sides", self.sides.to_string());
        put("runs", self.runs.to_string());
        put("seed", self.seed.to_string());
        put("sampler", self.sampler.clone());
        put("normalization", self.normalization.clone());
        put("count_axis_edges", self.count_axis_edges.to_string());
        put("bin_width", self.bin_width.to_string());
        put("border_threshold", self.border_threshold.to_string());
        put("border_rule", self.border_rule.to_string());
        put("histogram_mode", self.histogram_mode.as_str().to_owned());
        s
    }

    pub fn growth(&self) -> GrowthConfig {
        GrowthConfig {
            width: self.width,
            height: self.height,
            p_n: self.p_n,
            target_e: self.target_e,
            seed: self.seed,
            sides: self.sides,
            count_axis_edges: self.count_axis_edges,
        }
    }

    /// Checkpoints for `grow`: the configured list, or the standard growth
    /// stages up to `e` followed by `e` itself.
    pub fn growth_checkpoints(&self) -> Vec<usize> {
        self.e_checkpoints.clone().unwrap_or_else(|| {
            let mut v: Vec<usize> = GROWTH_STAGES
                .iter()
                .copied()
                .filter(|&s| s < self.target_e)
                .collect();
            v.push(self.target_e);
            v
        })
    }

    pub fn density_checkpoints(&self) -> Vec<usize> {
        self.e_checkpoints
            .clone()
            .unwrap_or_else(|| DENSITY_STAGES.to_vec())
    }

    pub fn ensemble(&self, p_n: f64) -> Result<EnsembleConfig> {
        let mut growth = self.growth();
        growth.p_n = p_n;
        let cfg = EnsembleConfig {
            growth,
            n_runs: self.runs,
            master_seed: self.seed,
            h_list: self.h_list.clone(),
            e_checkpoints: self.density_checkpoints(),
            h_max: self.h_max,
            bin_width: self.bin_width,
            border_threshold: self.border_threshold,
            border_rule: self.border_rule,
            histogram_mode: self.histogram_mode,
            sampler: registry::samplers().get(&self.sampler)?,
            normalization: registry::normalizations().get(&self.normalization)?,
        };
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_standard_defaults() {
        let text = "# experiment\nL=60\nH=50\np_n=0.1\n\ne_checkpoints=500,1000,1500,2500\nh_list=3,5,10\nh_max=10\nsides=both\nruns=30\nseed=42\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!((cfg.width, cfg.height, cfg.p_n), (60, 50, 0.1));
        assert_eq!(cfg.density_checkpoints(), vec![500, 1000, 1500, 2500]);
        assert_eq!(cfg.h_list, vec![3, 5, 10]);
        assert_eq!(cfg.seed, 42);
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.apply("p_n_list=0.1,0.5,0.9").unwrap();
        cfg.apply("sides=above").unwrap();
        cfg.apply("border_rule=lt").unwrap();
        assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match RunConfig::parse("L=60\nH=abc\n") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains('H'));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(RunConfig::parse("bogus=1").is_err());
        assert!(RunConfig::parse("L 60").is_err());
        assert!(RunConfig::parse("sides=left").is_err());
    }

    #[test]
    fn growth_checkpoints_default_to_standard_stages() {
        assert_eq!(
            RunConfig::default().growth_checkpoints(),
            GROWTH_STAGES.to_vec()
        );
        let cfg = RunConfig {
            target_e: 1200,
            ..Default::default()
        };
        assert_eq!(cfg.growth_checkpoints(), vec![500, 1000, 1200]);
    }

    #[test]
    fn sweep_defaults() {
        let pn = default_pn_sweep();
        assert_eq!(pn.len(), 19);
        assert_eq!(pn[0], 0.05);
        assert_eq!(pn[18], 0.95);
        assert_eq!(pn[9], 0.5);
    }

    #[test]
    fn unknown_strategy_is_rejected() {
        let cfg = RunConfig {
            sampler: "greedy".into(),
            ..Default::default()
        };
        assert!(matches!(
            cfg.ensemble(0.5),
            Err(Error::UnknownStrategy { .. })
        ));
    }
}
