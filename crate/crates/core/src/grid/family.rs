use serde::{Deserialize, Serialize};

use super::{GridFunction, GridSpec};
use crate::error::{Result, invalid};

/// One smooth bump of a [`Family::BumpTrain`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
    pub height: f64,
}

/// Analytic test functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// `height * chi_{B(center, radius)}`.
    BallIndicator { center: Vec<f64>, radius: f64, height: f64 },
    /// `|x|^{-gamma}`, capped at the value `(h/2)^{-gamma}` of the innermost cells.
    PowerLaw { gamma: f64 },
    /// `height * exp(-|x - center|^2 / width^2)`.
    Gaussian { center: Vec<f64>, width: f64, height: f64 },
    /// Sum of smooth bumps.
    BumpTrain { bumps: Vec<Bump> },
    /// `height * exp(1 - 1 / (1 - s^2))` for `s = |x - center| / radius < 1`, else 0.
    SmoothBump { center: Vec<f64>, radius: f64, height: f64 },
}

impl Family {
    /// Bumps of radius `radius` at `0, spacing, 2 spacing, ...` along the first axis, up
    /// to `count` of them.
    pub fn regular_train(spacing: f64, radius: f64, height: f64, count: usize) -> Self {
        let bumps = (0..count).map(|k| Bump { center: vec![k as f64 * spacing], radius, height }).collect();
        Family::BumpTrain { bumps }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let check_center = |c: &[f64]| -> Result<()> {
            if c.len() > dim || c.iter().any(|v| !v.is_finite()) {
                return Err(invalid(format!("center {c:?} does not fit dimension {dim}")));
            }
            Ok(())
        };
        let positive = |name: &str, v: f64| -> Result<()> {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
            Ok(())
        };
        match self {
            Family::BallIndicator { center, radius, height } | Family::SmoothBump { center, radius, height } => {
                check_center(center)?;
                positive("radius", *radius)?;
                if !height.is_finite() {
                    return Err(invalid("height must be finite"));
                }
            }
            Family::Gaussian { center, width, height } => {
                check_center(center)?;
                positive("width", *width)?;
                if !height.is_finite() {
                    return Err(invalid("height must be finite"));
                }
            }
            Family::PowerLaw { gamma } => positive("gamma", *gamma)?,
            Family::BumpTrain { bumps } => {
                for b in bumps {
                    check_center(&b.center)?;
                    positive("radius", b.radius)?;
                    if !b.height.is_finite() {
                        return Err(invalid("height must be finite"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Value at `y`; `cell_scale` is `h/2` of the sampling grid (power-law cap).
    pub fn evaluate(&self, y: &[f64], cell_scale: f64) -> f64 {
        match self {
            Family::BallIndicator { center, radius, height } => {
                if dist2(y, center) < radius * radius {
                    *height
                } else {
                    0.0
                }
            }
            Family::PowerLaw { gamma } => {
                let r = dist2(y, &[]).sqrt();
                r.powf(-gamma).min(cell_scale.powf(-gamma))
            }
            Family::Gaussian { center, width, height } => height * (-dist2(y, center) / (width * width)).exp(),
            Family::BumpTrain { bumps } => {
                bumps.iter().map(|b| smooth_bump(dist2(y, &b.center), b.radius, b.height)).sum()
            }
            Family::SmoothBump { center, radius, height } => smooth_bump(dist2(y, center), *radius, *height),
        }
    }
}

fn smooth_bump(d2: f64, radius: f64, height: f64) -> f64 {
    let s2 = d2 / (radius * radius);
    if s2 < 1.0 { height * (1.0 - 1.0 / (1.0 - s2)).exp() } else { 0.0 }
}

/// Squared distance with `c` zero-padded to the length of `y`.
fn dist2(y: &[f64], c: &[f64]) -> f64 {
    y.iter()
        .enumerate()
        .map(|(k, &v)| {
            let d = v - c.get(k).copied().unwrap_or(0.0);
            d * d
        })
        .sum()
}

/// A family together with an argument dilation: samples `f(t x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDescriptor {
    pub variant: Family,
    #[serde(default = "one")]
    pub dilation: f64,
}

fn one() -> f64 {
    1.0
}

impl FamilyDescriptor {
    pub fn new(variant: Family) -> Self {
        Self { variant, dilation: 1.0 }
    }

    pub fn with_dilation(mut self, t: f64) -> Self {
        self.dilation = t;
        self
    }

    /// Analytic value of the dilated family at `x`.
    pub fn evaluate(&self, x: &[f64], cell_scale: f64) -> f64 {
        let mut y = [0.0; 3];
        for (k, v) in x.iter().enumerate() {
            y[k] = self.dilation * v;
        }
        self.variant.evaluate(&y[..x.len()], cell_scale)
    }
}

/// `f(t x)` from `f(x)`, composed multiplicatively with any existing dilation.
pub fn dilate_family(family: &FamilyDescriptor, t: f64) -> Result<FamilyDescriptor> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid(format!("dilation must be positive, got {t}")));
    }
    Ok(FamilyDescriptor { variant: family.variant.clone(), dilation: family.dilation * t })
}

pub fn synthesize(spec: GridSpec, family: &FamilyDescriptor) -> Result<GridFunction> {
    let t = family.dilation;
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid(format!("dilation must be positive, got {t}")));
    }
    family.variant.validate(spec.dim())?;
    let cell_scale = 0.5 * spec.spacing();
    GridFunction::from_fn(spec, |x| family.evaluate(x, cell_scale))
}
