//! The maximal, sharp maximal and fractional maximal operators on a radius ladder, the
//! Riesz potential, lower and upper Hardy operators, Hardy-potential hybrids, and
//! truncated singular integrals with pluggable kernels.

mod hardy;
mod maximal;
mod riesz;
mod singular;

pub use hardy::{hardy_lower, hardy_upper, hybrid_calk, hybrid_k};
pub use maximal::{frac_maximal, frac_maximal_with, maximal, maximal_with, sharp_maximal};
pub use riesz::{SelfCell, riesz, riesz_with};
pub use singular::{KernelSpec, builtin_kernel, truncated_singular};

use riesz::distance_power_table;

use serde::{Deserialize, Serialize};

use crate::error::{Result, invalid};
use crate::grid::{GridFunction, GridSpec};
use crate::modular::RadiusLadder;
use crate::stencil::Engine;

/// An operator instance, serialized as e.g. `{"kind": "riesz", "alpha": 0.5}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields, from = "SpecRepr")]
pub enum OperatorSpec {
    Maximal,
    SharpMaximal,
    FracMaximal {
        alpha: f64,
    },
    Riesz {
        alpha: f64,
        #[serde(default)]
        self_cell: SelfCell,
    },
    HardyLower {
        #[serde(default)]
        alpha: f64,
    },
    HardyUpper {
        #[serde(default)]
        alpha: f64,
    },
    HybridK {
        beta: f64,
    },
    HybridCalK {
        beta: f64,
    },
    TruncatedSingular {
        kernel: String,
        epsilon: f64,
    },
}

/// Deserialization form. Internally tagged unit variants would accept stray fields, so the
/// field-free operators are read as empty structs.
#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SpecRepr {
    Maximal {},
    SharpMaximal {},
    FracMaximal {
        alpha: f64,
    },
    Riesz {
        alpha: f64,
        #[serde(default)]
        self_cell: SelfCell,
    },
    HardyLower {
        #[serde(default)]
        alpha: f64,
    },
    HardyUpper {
        #[serde(default)]
        alpha: f64,
    },
    HybridK {
        beta: f64,
    },
    HybridCalK {
        beta: f64,
    },
    TruncatedSingular {
        kernel: String,
        epsilon: f64,
    },
}

impl From<SpecRepr> for OperatorSpec {
    fn from(r: SpecRepr) -> Self {
        match r {
            SpecRepr::Maximal {} => Self::Maximal,
            SpecRepr::SharpMaximal {} => Self::SharpMaximal,
            SpecRepr::FracMaximal { alpha } => Self::FracMaximal { alpha },
            SpecRepr::Riesz { alpha, self_cell } => Self::Riesz { alpha, self_cell },
            SpecRepr::HardyLower { alpha } => Self::HardyLower { alpha },
            SpecRepr::HardyUpper { alpha } => Self::HardyUpper { alpha },
            SpecRepr::HybridK { beta } => Self::HybridK { beta },
            SpecRepr::HybridCalK { beta } => Self::HybridCalK { beta },
            SpecRepr::TruncatedSingular { kernel, epsilon } => Self::TruncatedSingular { kernel, epsilon },
        }
    }
}

impl OperatorSpec {
    pub fn riesz(alpha: f64) -> Self {
        Self::Riesz { alpha, self_cell: SelfCell::default() }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Maximal => "M".into(),
            Self::SharpMaximal => "M#".into(),
            Self::FracMaximal { alpha } => format!("M^{alpha}"),
            Self::Riesz { alpha, .. } => format!("I^{alpha}"),
            Self::HardyLower { alpha } if *alpha == 0.0 => "H".into(),
            Self::HardyLower { alpha } => format!("H^{alpha}"),
            Self::HardyUpper { alpha } if *alpha == 0.0 => "calH".into(),
            Self::HardyUpper { alpha } => format!("calH^{alpha}"),
            Self::HybridK { beta } => format!("K_{beta}"),
            Self::HybridCalK { beta } => format!("calK_{beta}"),
            Self::TruncatedSingular { kernel, epsilon } => format!("S[{kernel},{epsilon}]"),
        }
    }

    /// Operators taking a sup over the radius ladder.
    pub fn uses_ladder(&self) -> bool {
        matches!(self, Self::Maximal | Self::SharpMaximal | Self::FracMaximal { .. })
    }

    /// Order of smoothing: `alpha` for potential-type operators, 0 otherwise.
    pub fn order(&self) -> f64 {
        match self {
            Self::FracMaximal { alpha } | Self::Riesz { alpha, .. } => *alpha,
            Self::HardyLower { alpha } | Self::HardyUpper { alpha } => *alpha,
            _ => 0.0,
        }
    }

    pub fn validate(&self, spec: &GridSpec) -> Result<()> {
        let n = spec.dim() as f64;
        match self {
            Self::Maximal | Self::SharpMaximal => Ok(()),
            Self::FracMaximal { alpha } => check_alpha(*alpha, n, true),
            Self::Riesz { alpha, .. } => check_alpha(*alpha, n, false),
            Self::HardyLower { alpha } | Self::HardyUpper { alpha } => check_alpha(*alpha, n, true),
            Self::HybridK { beta } | Self::HybridCalK { beta } => check_beta(*beta, n),
            Self::TruncatedSingular { kernel, epsilon } => {
                let k = builtin_kernel(kernel)?;
                k.check_dim(spec.dim())?;
                check_epsilon(*epsilon, spec)
            }
        }
    }
}

pub(crate) fn check_alpha(alpha: f64, n: f64, allow_zero: bool) -> Result<()> {
    let lower_ok = if allow_zero { alpha >= 0.0 } else { alpha > 0.0 };
    if lower_ok && alpha < n {
        Ok(())
    } else {
        let lo = if allow_zero { "[0" } else { "(0" };
        Err(invalid(format!("alpha must lie in {lo}, {n}), got {alpha}")))
    }
}

pub(crate) fn check_beta(beta: f64, n: f64) -> Result<()> {
    if beta > 0.0 && beta <= n { Ok(()) } else { Err(invalid(format!("beta must lie in (0, {n}], got {beta}"))) }
}

pub(crate) fn check_epsilon(epsilon: f64, spec: &GridSpec) -> Result<()> {
    if epsilon.is_finite() && epsilon >= spec.spacing() * (1.0 - 1e-12) {
        Ok(())
    } else {
        Err(invalid(format!("truncation radius {epsilon} is below the cell spacing {}", spec.spacing())))
    }
}

/// Applies `op` to `f`. Ladder-based operators use `ladder`; the others ignore it.
pub fn apply(f: &GridFunction, op: &OperatorSpec, ladder: &RadiusLadder, engine: &Engine) -> Result<GridFunction> {
    op.validate(f.spec())?;
    match op {
        OperatorSpec::Maximal => maximal_with(f, ladder, engine),
        OperatorSpec::SharpMaximal => sharp_maximal(f, ladder),
        OperatorSpec::FracMaximal { alpha } => frac_maximal_with(f, *alpha, ladder, engine),
        OperatorSpec::Riesz { alpha, self_cell } => riesz_with(f, *alpha, *self_cell, engine),
        OperatorSpec::HardyLower { alpha } => hardy_lower(f, *alpha),
        OperatorSpec::HardyUpper { alpha } => hardy_upper(f, *alpha),
        OperatorSpec::HybridK { beta } => hybrid_k(f, *beta),
        OperatorSpec::HybridCalK { beta } => hybrid_calk(f, *beta),
        OperatorSpec::TruncatedSingular { kernel, epsilon } => {
            truncated_singular(f, &builtin_kernel(kernel)?, *epsilon)
        }
    }
}

#[cfg(test)]
mod tests;
