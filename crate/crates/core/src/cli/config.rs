use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::checks::Thresholds;
use crate::error::{MorreyError, Result};
use crate::grid::GridSpec;
use crate::modular::{MorreyParams, RadiusLadder};
use crate::stencil::Engine;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub half_width: f64,
    pub cells: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { dim: 1, half_width: 8.0, cells: 4096 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderConfig {
    pub r_min: f64,
    pub ratio: f64,
    pub count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub p: f64,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self { p: 2.0, lambda: 0.5, q: None, mu: None, alpha: None, beta: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdConfig {
    pub vanishing: f64,
    pub non_vanishing: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        let t = Thresholds::default();
        Self { vanishing: t.vanishing, non_vanishing: t.non_vanishing }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EngineChoice {
    /// FFT above the default size threshold, direct sums below it.
    #[default]
    Auto,
    Direct,
    Fft,
}

/// Everything that determines a run's numerical output. The worker count is not part of
/// it: results do not depend on it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<LadderConfig>,
    #[serde(default)]
    pub params: ParamsConfig,
    /// Recorded for reproducibility; every built-in family is deterministic.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default)]
    pub thresholds: ThresholdConfig,
    #[serde(default)]
    pub engine: EngineChoice,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| MorreyError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| MorreyError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| MorreyError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid.dim, self.grid.half_width, self.grid.cells)
    }

    pub fn ladder_for(&self, spec: &GridSpec) -> Result<RadiusLadder> {
        match self.ladder {
            Some(l) => RadiusLadder::new(l.r_min, l.ratio, l.count),
            None => Ok(RadiusLadder::covering(spec)),
        }
    }

    /// `(p, lambda)` plus `(q, mu)` when both are set.
    pub fn morrey_params(&self) -> Result<MorreyParams> {
        let p = &self.params;
        let mp = MorreyParams::new(p.p, p.lambda);
        match (p.q, p.mu) {
            (Some(q), Some(mu)) => Ok(mp.with_output(q, mu)),
            (None, None) => Ok(mp),
            _ => Err(MorreyError::Config("q and mu must be given together".into())),
        }
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds { vanishing: self.thresholds.vanishing, non_vanishing: self.thresholds.non_vanishing }
    }

    pub fn engine(&self) -> Engine {
        match self.engine {
            EngineChoice::Auto => Engine::default(),
            EngineChoice::Direct => Engine::direct(),
            EngineChoice::Fft => Engine::fft(),
        }
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str, len: usize) -> Result<Vec<T>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != len {
        return Err(MorreyError::Config(format!("{what} expects {len} comma-separated values, got '{s}'")));
    }
    parts.iter().map(|p| p.parse().map_err(|_| MorreyError::Config(format!("bad {what} value '{p}'")))).collect()
}

/// Parses `dim,L,cells`.
pub fn parse_grid(s: &str) -> Result<GridConfig> {
    let v: Vec<f64> = parse_list(s, "grid", 3)?;
    let int = |x: f64, name: &str| -> Result<usize> {
        if x >= 1.0 && x.fract() == 0.0 {
            Ok(x as usize)
        } else {
            Err(MorreyError::Config(format!("grid {name} must be a positive integer, got {x}")))
        }
    };
    Ok(GridConfig { dim: int(v[0], "dim")?, half_width: v[1], cells: int(v[2], "cells")? })
}

/// Parses `rmin,ratio,count`.
pub fn parse_ladder(s: &str) -> Result<LadderConfig> {
    let v: Vec<f64> = parse_list(s, "ladder", 3)?;
    if !(v[2] >= 1.0 && v[2].fract() == 0.0) {
        return Err(MorreyError::Config(format!("ladder count must be a positive integer, got {}", v[2])));
    }
    Ok(LadderConfig { r_min: v[0], ratio: v[1], count: v[2] as usize })
}

/// Parses a comma-separated list of reals.
pub fn parse_reals(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| MorreyError::Config(format!("bad number '{p}'"))))
        .collect()
}
