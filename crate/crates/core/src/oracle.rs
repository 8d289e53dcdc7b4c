//! Reference evaluation by plain nested loops over cell pairs. Geometry is decided on
//! integer half-unit coordinates of a grid refined by an integer factor, so refinement 1
//! makes exactly the membership decisions of the fast paths while sharing none of
//! their summation machinery.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MorreyError, Result, invalid};
use crate::grid::{FamilyDescriptor, GridFunction, GridSpec, synthesize};
use crate::modular::RadiusLadder;
use crate::operators::{KernelSpec, OperatorSpec, SelfCell, builtin_kernel};

/// Largest coarse grid accepted without `allow_large`.
pub const SIZE_GUARD: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleOp {
    BallMass { radius: f64 },
    Modular { p: f64, lambda: f64, radius: f64 },
    Operator(OperatorSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRequest {
    pub op: OracleOp,
    /// Evaluate on a grid with this many times more cells per axis.
    #[serde(default = "one")]
    pub refinement: usize,
    /// Radii for maximal-type sups; the ladder is used when absent.
    #[serde(default)]
    pub radius_scan: Option<Vec<f64>>,
    #[serde(default)]
    pub ladder: Option<RadiusLadder>,
    /// Sample this family on the refined grid instead of upsampling `f`.
    #[serde(default)]
    pub family: Option<FamilyDescriptor>,
    #[serde(default)]
    pub allow_large: bool,
}

fn one() -> usize {
    1
}

impl OracleRequest {
    pub fn new(op: OracleOp) -> Self {
        Self { op, refinement: 1, radius_scan: None, ladder: None, family: None, allow_large: false }
    }

    pub fn operator(op: OperatorSpec) -> Self {
        Self::new(OracleOp::Operator(op))
    }

    pub fn with_ladder(mut self, ladder: RadiusLadder) -> Self {
        self.ladder = Some(ladder);
        self
    }

    pub fn with_scan(mut self, radii: Vec<f64>) -> Self {
        self.radius_scan = Some(radii);
        self
    }

    pub fn refined(mut self, factor: usize, family: Option<FamilyDescriptor>) -> Self {
        self.refinement = factor;
        self.family = family;
        self
    }
}

/// Fine cells in half fine units, with their values.
struct Fine {
    spec: GridSpec,
    units: Vec<[i64; 3]>,
    values: Vec<f64>,
}

impl Fine {
    fn half(&self) -> f64 {
        0.5 * self.spec.spacing()
    }

    fn volume(&self) -> f64 {
        self.spec.cell_volume()
    }

    /// Squared radius in half fine units.
    fn units_sq(&self, r: f64) -> f64 {
        let q = r / self.half();
        q * q
    }
}

fn dist2(a: [i64; 3], b: [i64; 3]) -> i64 {
    (0..3).map(|k| (a[k] - b[k]) * (a[k] - b[k])).sum()
}

fn key(a: [i64; 3]) -> i64 {
    a[0] * a[0] + a[1] * a[1] + a[2] * a[2]
}

pub fn oracle_eval(f: &GridFunction, req: &OracleRequest) -> Result<GridFunction> {
    let coarse = *f.spec();
    if coarse.len() > SIZE_GUARD && !req.allow_large {
        return Err(MorreyError::OracleSizeGuard { cells: coarse.len(), limit: SIZE_GUARD });
    }
    let factor = req.refinement;
    if factor < 1 {
        return Err(invalid("refinement must be at least 1"));
    }
    let fine_spec = coarse.refined(factor)?;
    let fine_values = match &req.family {
        Some(fd) => synthesize(fine_spec, fd)?.into_values(),
        None => (0..fine_spec.len())
            .map(|i| {
                let mut m = fine_spec.multi_index(i);
                for a in m.iter_mut().take(coarse.dim()) {
                    *a /= factor;
                }
                f.values()[coarse.flat_index(m)]
            })
            .collect(),
    };
    let fine = Fine {
        spec: fine_spec,
        units: (0..fine_spec.len()).map(|i| fine_spec.half_units(i)).collect(),
        values: fine_values,
    };
    // coarse centers in half fine units
    let points: Vec<[i64; 3]> = (0..coarse.len()).map(|i| coarse.half_units(i).map(|m| m * factor as i64)).collect();

    let radii = || -> Result<Vec<f64>> {
        if let Some(scan) = &req.radius_scan {
            if scan.is_empty() || scan[0] <= 0.0 || scan.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid("radius scan must be positive and strictly increasing"));
            }
            return Ok(scan.clone());
        }
        let ladder = req.ladder.unwrap_or_else(|| RadiusLadder::covering(&coarse));
        ladder.validate()?;
        Ok(ladder.radii())
    };

    let eval: Box<dyn Fn([i64; 3]) -> f64 + Sync> = match &req.op {
        OracleOp::BallMass { radius } => {
            let r = positive(*radius)?;
            Box::new(move |x| ball_mass(&fine, x, r, |v| v))
        }
        OracleOp::Modular { p, lambda, radius } => {
            let (r, p, lambda) = (positive(*radius)?, *p, *lambda);
            if p < 1.0 {
                return Err(invalid("p must be at least 1"));
            }
            Box::new(move |x| r.powf(-lambda) * ball_mass(&fine, x, r, |v| v.abs().powf(p)))
        }
        OracleOp::Operator(op) => {
            op.validate(&coarse)?;
            operator_eval(op, fine, radii()?)?
        }
    };
    let out = points.par_iter().map(|&x| eval(x)).collect();
    Ok(GridFunction::from_raw(coarse, out))
}

fn positive(r: f64) -> Result<f64> {
    if r.is_finite() && r > 0.0 { Ok(r) } else { Err(invalid(format!("radius must be positive, got {r}"))) }
}

fn ball_mass(fine: &Fine, x: [i64; 3], r: f64, g: impl Fn(f64) -> f64) -> f64 {
    let q2 = fine.units_sq(r);
    let mut s = 0.0;
    for (u, &v) in fine.units.iter().zip(&fine.values) {
        if (dist2(x, *u) as f64) < q2 {
            s += g(v);
        }
    }
    s * fine.volume()
}

/// Signed sum, absolute sum and count over the ball.
fn ball_stats(fine: &Fine, x: [i64; 3], r: f64) -> (f64, f64, f64) {
    let q2 = fine.units_sq(r);
    let (mut s, mut a, mut c) = (0.0, 0.0, 0.0);
    for (u, &v) in fine.units.iter().zip(&fine.values) {
        if (dist2(x, *u) as f64) < q2 {
            s += v;
            a += v.abs();
            c += 1.0;
        }
    }
    (s, a, c)
}

fn operator_eval(op: &OperatorSpec, fine: Fine, radii: Vec<f64>) -> Result<Box<dyn Fn([i64; 3]) -> f64 + Sync>> {
    let n = fine.spec.dim() as f64;
    let half = fine.half();
    let hn = fine.volume();
    Ok(match op.clone() {
        OperatorSpec::Maximal => Box::new(move |x| {
            radii
                .iter()
                .map(|&r| {
                    let (_, a, c) = ball_stats(&fine, x, r);
                    a / c
                })
                .fold(0.0, f64::max)
        }),
        OperatorSpec::FracMaximal { alpha } => Box::new(move |x| {
            radii
                .iter()
                .map(|&r| {
                    let (_, a, c) = ball_stats(&fine, x, r);
                    if alpha == 0.0 { a / c } else { (c * hn).powf(alpha / n - 1.0) * (a * hn) }
                })
                .fold(0.0, f64::max)
        }),
        OperatorSpec::SharpMaximal => Box::new(move |x| {
            radii
                .iter()
                .map(|&r| {
                    let (s, _, c) = ball_stats(&fine, x, r);
                    let mean = s / c;
                    let q2 = fine.units_sq(r);
                    let mut dev = 0.0;
                    for (u, &v) in fine.units.iter().zip(&fine.values) {
                        if (dist2(x, *u) as f64) < q2 {
                            dev += (v - mean).abs();
                        }
                    }
                    dev / c
                })
                .fold(0.0, f64::max)
        }),
        OperatorSpec::Riesz { alpha, self_cell } => {
            let w0 = match self_cell {
                SelfCell::Drop => 0.0,
                SelfCell::Ball => {
                    let vn = fine.spec.unit_ball_volume();
                    let rho = fine.spec.spacing() * vn.powf(-1.0 / n);
                    n * vn * rho.powf(alpha) / alpha
                }
            };
            Box::new(move |x| {
                let mut s = 0.0;
                for (u, &v) in fine.units.iter().zip(&fine.values) {
                    let d2 = dist2(x, *u);
                    if d2 == 0 {
                        s += w0 * v;
                    } else {
                        s += hn * ((d2 as f64).sqrt() * half).powf(alpha - n) * v;
                    }
                }
                s
            })
        }
        OperatorSpec::HardyLower { alpha } => Box::new(move |x| {
            let kx = key(x);
            let mut s = 0.0;
            for (u, &v) in fine.units.iter().zip(&fine.values) {
                if key(*u) < kx {
                    s += v;
                }
            }
            ((kx as f64).sqrt() * half).powf(alpha - n) * hn * s
        }),
        OperatorSpec::HardyUpper { alpha } => Box::new(move |x| {
            let kx = key(x);
            let mut s = 0.0;
            for (u, &v) in fine.units.iter().zip(&fine.values) {
                let ky = key(*u);
                if ky > kx {
                    s += v * ((ky as f64).sqrt() * half).powf(-n);
                }
            }
            ((kx as f64).sqrt() * half).powf(alpha) * hn * s
        }),
        OperatorSpec::HybridK { beta } => Box::new(move |x| {
            let kx = key(x);
            let mut s = 0.0;
            for (u, &v) in fine.units.iter().zip(&fine.values) {
                if key(*u) < kx {
                    s += v * ((dist2(x, *u) as f64).sqrt() * half).powf(beta - n);
                }
            }
            ((kx as f64).sqrt() * half).powf(-beta) * hn * s
        }),
        OperatorSpec::HybridCalK { beta } => Box::new(move |x| {
            let kx = key(x);
            let mut s = 0.0;
            for (u, &v) in fine.units.iter().zip(&fine.values) {
                let ky = key(*u);
                if ky > kx {
                    let ny = (ky as f64).sqrt() * half;
                    s += v * ny.powf(-beta) * ((dist2(x, *u) as f64).sqrt() * half).powf(beta - n);
                }
            }
            hn * s
        }),
        OperatorSpec::TruncatedSingular { kernel, epsilon } => {
            let k: KernelSpec = builtin_kernel(&kernel)?;
            let dim = fine.spec.dim();
            Box::new(move |x| {
                let q2 = fine.units_sq(epsilon);
                let cx = x.map(|m| m as f64 * half);
                let mut s = 0.0;
                for (u, &v) in fine.units.iter().zip(&fine.values) {
                    if (dist2(x, *u) as f64) > q2 {
                        s += k.value(dim, &cx, &u.map(|m| m as f64 * half)) * v;
                    }
                }
                hn * s
            })
        }
    })
}
