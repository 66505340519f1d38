//! Experiment configuration and the versioned thresholds file.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The thresholds file compiled into the binary.
pub const DEFAULTS_TOML: &str = include_str!("../defaults.toml");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("cannot read thresholds file: {0}")]
    Read(#[from] std::io::Error),
    #[error("cannot parse thresholds file: {0}")]
    Parse(#[from] toml::de::Error),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Defaults {
    pub version: u32,
    pub pd: PdDefaults,
    pub same_cycle: SameCycleDefaults,
    pub edit_verify: EditDefaults,
    pub toggle_verify: ToggleDefaults,
    pub oracle: OracleDefaults,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct PdDefaults {
    pub n: u32,
    pub trials: usize,
    pub gem_tol: f64,
    pub mean_a1_center: f64,
    pub mean_a1_tol: f64,
    pub ks_a1_max: f64,
    pub mean_l1_tol: f64,
    pub p_l1_half_tol: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct SameCycleDefaults {
    pub n: u32,
    pub k: usize,
    pub trials: usize,
    pub p_tol: BTreeMap<String, f64>,
    pub tv_max: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct EditDefaults {
    pub n: u32,
    pub t: usize,
    pub k: usize,
    pub trials: usize,
    pub g_freq_min: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ToggleDefaults {
    pub n: u32,
    pub k: usize,
    pub m: usize,
    pub t: usize,
    pub trials: usize,
    pub region_target: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct OracleDefaults {
    pub cycle_n: Vec<u32>,
    pub moment: Vec<(u32, usize)>,
    pub honest: Vec<(u32, usize)>,
    pub kt: Vec<(u32, usize, usize)>,
    pub relativized: Vec<(u32, usize)>,
}

impl Defaults {
    pub fn builtin() -> Self {
        Self::parse(DEFAULTS_TOML).expect("embedded defaults parse")
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Pd,
    SameCycle,
    EditVerify,
    ToggleVerify,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// One run. `out` and `jobs` do not change results and are left out of
/// the summary so that runs differing only in those stay byte-identical.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: u32,
    pub k: usize,
    pub m: usize,
    pub t: usize,
    pub trials: usize,
    pub seed: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
    #[serde(skip)]
    pub jobs: usize,
    /// Explicit `(max_disp, lo, hi)` regions for toggle-verify.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regions: Option<Vec<(usize, usize, usize)>>,
}

/// Flag values; `None` falls back to the experiment's defaults.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub n: Option<u32>,
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub t: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
    pub regions: Option<Vec<(usize, usize, usize)>>,
}

pub const DEFAULT_SEED: u64 = 1;

impl ExperimentConfig {
    pub fn resolve(experiment: Experiment, o: Overrides, d: &Defaults) -> Result<Self, ConfigError> {
        let (n, k, m, t, trials) = match experiment {
            Experiment::Pd => (d.pd.n, 1, 0, 0, d.pd.trials),
            Experiment::SameCycle => (d.same_cycle.n, d.same_cycle.k, 0, 0, d.same_cycle.trials),
            Experiment::EditVerify => {
                let e = &d.edit_verify;
                (e.n, e.k, 0, e.t, e.trials)
            }
            Experiment::ToggleVerify => {
                let e = &d.toggle_verify;
                (e.n, e.k, e.m, e.t, e.trials)
            }
            Experiment::Oracle => (0, 0, 0, 0, 1),
        };
        let cfg = Self {
            experiment,
            n: o.n.unwrap_or(n),
            k: o.k.unwrap_or(k),
            m: o.m.unwrap_or(m),
            t: o.t.unwrap_or(t),
            trials: o.trials.unwrap_or(trials),
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            out: o.out,
            format: o.format.unwrap_or_default(),
            jobs: o.jobs.unwrap_or(1),
            regions: o.regions,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.jobs == 0 {
            return bad("jobs must be at least 1".into());
        }
        let n_range = match self.experiment {
            Experiment::Pd | Experiment::SameCycle => 1..=28,
            Experiment::EditVerify => 2..=63,
            Experiment::ToggleVerify => 2..=28,
            Experiment::Oracle => 0..=u32::MAX,
        };
        if !n_range.contains(&self.n) {
            return bad(format!("n = {} outside {}..={}", self.n, n_range.start(), n_range.end()));
        }
        match self.experiment {
            Experiment::SameCycle if !(2..=fsr_core::pd::MAX_PERM_K).contains(&self.k) => {
                bad(format!("k = {} outside 2..={}", self.k, fsr_core::pd::MAX_PERM_K))
            }
            Experiment::EditVerify if self.k == 0 => bad("k must be at least 1".into()),
            Experiment::ToggleVerify if !(2..=fsr_core::pd::MAX_PERM_K).contains(&self.k) => {
                bad(format!("k = {} outside 2..={}", self.k, fsr_core::pd::MAX_PERM_K))
            }
            Experiment::ToggleVerify
                if self.regions.is_none() && (self.m == 0 || self.m > fsr_core::pd::MAX_SCHEDULE_LEN) =>
            {
                bad(format!("m = {} outside 1..={}", self.m, fsr_core::pd::MAX_SCHEDULE_LEN))
            }
            _ => Ok(()),
        }
    }
}

/// Parses `"disp:lo:hi,disp:lo:hi"`.
pub fn parse_regions(s: &str) -> Result<Vec<(usize, usize, usize)>, String> {
    s.split(',')
        .map(|part| {
            let v: Vec<usize> = part
                .split(':')
                .map(|x| x.trim().parse::<usize>().map_err(|_| format!("bad region `{part}`")))
                .collect::<Result<_, _>>()?;
            match v[..] {
                [d, lo, hi] => Ok((d, lo, hi)),
                _ => Err(format!("region `{part}` is not disp:lo:hi")),
            }
        })
        .collect()
}
