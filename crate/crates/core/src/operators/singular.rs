use rayon::prelude::*;

use super::check_epsilon;
use crate::error::{MorreyError, Result, invalid};
use crate::grid::{GridFunction, GridSpec};
use crate::stencil;

/// A kernel `K(x, y)` with a claimed size constant `A`, `|K(x,y)| <= A |x-y|^{-n}`.
#[derive(Clone, Debug)]
pub struct KernelSpec {
    pub id: String,
    pub size_constant: f64,
    /// Required dimension, if the kernel is dimension-specific.
    pub dim: Option<usize>,
    /// `K(x, y)` in dimension `n` (first argument); never called with `x = y`.
    pub eval: fn(usize, &[f64; 3], &[f64; 3]) -> f64,
}

fn hilbert1d(_: usize, x: &[f64; 3], y: &[f64; 3]) -> f64 {
    1.0 / (x[0] - y[0])
}

/// First Riesz transform kernel without its normalizing constant.
fn riesz_transform(dim: usize, x: &[f64; 3], y: &[f64; 3]) -> f64 {
    let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    d[0] / r.powi(dim as i32 + 1)
}

/// Kernels registered by id: `hilbert1d` (1D, `1/(x-y)`) and `riesz1` (`(x_1-y_1)/|x-y|^{n+1}`,
/// any dimension).
pub fn builtin_kernel(id: &str) -> Result<KernelSpec> {
    match id {
        "hilbert1d" => Ok(KernelSpec { id: id.into(), size_constant: 1.0, dim: Some(1), eval: hilbert1d }),
        "riesz1" => Ok(KernelSpec { id: id.into(), size_constant: 1.0, dim: None, eval: riesz_transform }),
        _ => Err(MorreyError::UnknownKernel(id.into())),
    }
}

impl KernelSpec {
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self.dim {
            Some(d) if d != dim => Err(invalid(format!("kernel {} needs dimension {d}, grid has {dim}", self.id))),
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn value(&self, dim: usize, x: &[f64; 3], y: &[f64; 3]) -> f64 {
        (self.eval)(dim, x, y)
    }

    /// Largest `|K(x,y)| |x-y|^n / A` over all pairs of distinct cell centers. At most 1
    /// when the size condition holds on the grid.
    pub fn size_ratio(&self, spec: &GridSpec) -> f64 {
        let n = spec.dim() as i32;
        (0..spec.len())
            .into_par_iter()
            .map(|x| {
                let cx = spec.center(x);
                let mut worst = 0.0f64;
                for y in (0..spec.len()).filter(|&y| y != x) {
                    let cy = spec.center(y);
                    let d = (0..3).map(|i| (cx[i] - cy[i]).powi(2)).sum::<f64>().sqrt();
                    worst = worst.max(self.value(spec.dim(), &cx, &cy).abs() * d.powi(n) / self.size_constant);
                }
                worst
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// `S_eps f(x) = h^n sum_{|x-y| > eps} K(x,y) f(y)` at fixed truncation.
pub fn truncated_singular(f: &GridFunction, kernel: &KernelSpec, epsilon: f64) -> Result<GridFunction> {
    let spec = *f.spec();
    kernel.check_dim(spec.dim())?;
    check_epsilon(epsilon, &spec)?;
    let q2 = stencil::radius_sq_units(epsilon, spec.spacing());
    let v = f.values();
    let support: Vec<(usize, [i64; 3], [f64; 3], f64)> = (0..spec.len())
        .filter(|&y| v[y] != 0.0)
        .map(|y| (y, stencil::index_i64(&spec, y), spec.center(y), v[y]))
        .collect();
    let hn = spec.cell_volume();
    let dim = spec.dim();
    let out = (0..spec.len())
        .into_par_iter()
        .map(|x| {
            let (a, cx) = (stencil::index_i64(&spec, x), spec.center(x));
            let mut s = 0.0;
            for (_, b, cy, fy) in &support {
                let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
                if (stencil::norm2(d) as f64) > q2 {
                    s += kernel.value(dim, &cx, cy) * fy;
                }
            }
            hn * s
        })
        .collect();
    Ok(GridFunction::from_raw(spec, out))
}
