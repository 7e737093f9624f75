//! Run configuration: `key=value` files merged under command-line flags.

use std::path::{Path, PathBuf};

use crate::chain::ChainSpec;
use crate::dynamics::{default_window, TimeGrid, DEFAULT_STEPS};
use crate::error::{Error, Result};

pub const DEFAULT_K: f64 = 1.0;
pub const DEFAULT_DELTA0: f64 = 0.1;
pub const DEFAULT_G_LIST: [f64; 4] = [0.05, 0.1, 0.15, 0.2];
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_SEED: u64 = 0;
/// Strong/weak ratio used by `fluctuate` when none is given.
pub const DEFAULT_FLUCTUATE_LAMBDA_INV: f64 = 20.0;

/// Even chain lengths 4, 6, …, 30.
pub fn default_n_list() -> Vec<usize> {
    (4..=30).step_by(2).collect()
}

/// Every parameter any subcommand can take. `None` means "not given"; the
/// accessors apply defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub k: Option<f64>,
    pub lambda_inv: Option<f64>,
    pub delta_omega: Option<f64>,
    pub delta0: Option<f64>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub g_list: Option<Vec<f64>>,
    pub n_list: Option<Vec<usize>>,
    pub amplitude: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

fn parse_value<T: std::str::FromStr>(field: &'static str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| Error::invalid(field, format!("cannot parse {raw:?}")))
}

/// Comma-separated list, e.g. `0.05,0.1`.
pub fn parse_list<T: std::str::FromStr>(field: &'static str, raw: &str) -> Result<Vec<T>> {
    raw.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_value(field, s))
        .collect()
}

impl RunConfig {
    /// Parses `key=value` lines. Blank lines and `#` comments are skipped;
    /// keys may use `-` or `_`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::invalid("config", format!("expected key=value, got {line:?}"))
            })?;
            let value = value.trim();
            match key.trim().replace('-', "_").as_str() {
                "n" => cfg.n = Some(parse_value("n", value)?),
                "k" => cfg.k = Some(parse_value("k", value)?),
                "lambda_inv" => cfg.lambda_inv = Some(parse_value("lambda_inv", value)?),
                "delta_omega" => cfg.delta_omega = Some(parse_value("delta_omega", value)?),
                "delta0" => cfg.delta0 = Some(parse_value("delta0", value)?),
                "t_max" => cfg.t_max = Some(parse_value("t_max", value)?),
                "steps" => cfg.steps = Some(parse_value("steps", value)?),
                "g_list" => cfg.g_list = Some(parse_list("g_list", value)?),
                "n_list" => cfg.n_list = Some(parse_list("n_list", value)?),
                "amplitude" => cfg.amplitude = Some(parse_value("amplitude", value)?),
                "trials" => cfg.trials = Some(parse_value("trials", value)?),
                "seed" => cfg.seed = Some(parse_value("seed", value)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => return Err(Error::invalid("config", format!("unknown key {other:?}"))),
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Values set in `overrides` win.
    pub fn merged_with(self, overrides: RunConfig) -> RunConfig {
        RunConfig {
            n: overrides.n.or(self.n),
            k: overrides.k.or(self.k),
            lambda_inv: overrides.lambda_inv.or(self.lambda_inv),
            delta_omega: overrides.delta_omega.or(self.delta_omega),
            delta0: overrides.delta0.or(self.delta0),
            t_max: overrides.t_max.or(self.t_max),
            steps: overrides.steps.or(self.steps),
            g_list: overrides.g_list.or(self.g_list),
            n_list: overrides.n_list.or(self.n_list),
            amplitude: overrides.amplitude.or(self.amplitude),
            trials: overrides.trials.or(self.trials),
            seed: overrides.seed.or(self.seed),
            out: overrides.out.or(self.out),
        }
    }

    pub fn n_sites(&self) -> Result<usize> {
        self.n.ok_or_else(|| Error::invalid("n", "required"))
    }

    pub fn k(&self) -> f64 {
        self.k.unwrap_or(DEFAULT_K)
    }

    pub fn delta0(&self) -> f64 {
        self.delta0.unwrap_or(DEFAULT_DELTA0)
    }

    pub fn steps(&self) -> usize {
        self.steps.unwrap_or(DEFAULT_STEPS)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn trials(&self) -> usize {
        self.trials.unwrap_or(DEFAULT_TRIALS)
    }

    pub fn g_list(&self) -> Vec<f64> {
        self.g_list
            .clone()
            .unwrap_or_else(|| DEFAULT_G_LIST.to_vec())
    }

    pub fn n_list(&self) -> Vec<usize> {
        self.n_list.clone().unwrap_or_else(default_n_list)
    }

    /// Validated chain from `n`, `k`, `lambda_inv`, `delta_omega`.
    pub fn chain_spec(&self) -> Result<ChainSpec> {
        let lambda_inv = self
            .lambda_inv
            .ok_or_else(|| Error::invalid("lambda_inv", "required"))?;
        let mut spec = ChainSpec::new(self.n_sites()?, lambda_inv).with_k(self.k());
        if let Some(dw) = self.delta_omega {
            spec = spec.with_delta_omega(dw);
        }
        spec.validate()?;
        Ok(spec)
    }

    /// `--t-max` if given, otherwise one effective cycle of `spec`.
    pub fn grid_for(&self, spec: &ChainSpec) -> Result<TimeGrid> {
        match self.t_max {
            Some(t) => TimeGrid::new(t, self.steps()),
            None => default_window(spec, self.steps()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_value_lines() {
        let cfg = RunConfig::parse(
            "# sweep\nn = 4\nlambda-inv=20\ng_list=0.05, 0.1\n\nseed=7 # trailing\n",
        )
        .unwrap();
        assert_eq!(cfg.n, Some(4));
        assert_eq!(cfg.lambda_inv, Some(20.0));
        assert_eq!(cfg.g_list, Some(vec![0.05, 0.1]));
        assert_eq!(cfg.seed, Some(7));
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(RunConfig::parse("colour=blue").is_err());
        assert!(RunConfig::parse("n").is_err());
        assert!(RunConfig::parse("n=four").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = RunConfig::parse("n=4\nk=2").unwrap();
        let flags = RunConfig {
            n: Some(6),
            ..Default::default()
        };
        let merged = file.merged_with(flags);
        assert_eq!(merged.n, Some(6));
        assert_eq!(merged.k(), 2.0);
        assert_eq!(merged.steps(), DEFAULT_STEPS);
    }

    #[test]
    fn chain_spec_requires_lambda() {
        let cfg = RunConfig {
            n: Some(4),
            ..Default::default()
        };
        assert!(matches!(
            cfg.chain_spec(),
            Err(Error::Invalid {
                field: "lambda_inv",
                ..
            })
        ));
    }
}
