use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::check_alpha;
use crate::error::Result;
use crate::grid::{GridFunction, GridSpec};
use crate::stencil::{self, Convolver, Engine};

/// Treatment of the singular `y = x` cell in potential-type sums.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfCell {
    /// Integrate the kernel exactly over the ball with the cell's volume.
    #[default]
    Ball,
    /// Leave the cell out.
    Drop,
}

impl SelfCell {
    /// Weight of `f(x)` in `I^alpha f(x)`: `int_{|z| < rho_h} |z|^{alpha-n} dz` with
    /// `v_n rho_h^n = h^n`.
    pub fn weight(self, spec: &GridSpec, alpha: f64) -> f64 {
        match self {
            SelfCell::Drop => 0.0,
            SelfCell::Ball => {
                let n = spec.dim() as f64;
                let vn = spec.unit_ball_volume();
                let rho = spec.spacing() * vn.powf(-1.0 / n);
                n * vn * rho.powf(alpha) / alpha
            }
        }
    }
}

/// `(h |d|)^exponent` indexed by per-axis absolute offsets `|d_k| < cells`, row-major;
/// the zero offset holds 0.
pub(crate) fn distance_power_table(spec: &GridSpec, exponent: f64) -> Vec<f64> {
    let c = spec.cells_per_axis();
    let h = spec.spacing();
    let sub = GridSpec::new(spec.dim(), spec.half_width(), c).expect("valid spec");
    (0..spec.len())
        .map(|i| {
            let m = sub.multi_index(i);
            let d2 = m.iter().map(|&a| (a * a) as f64).sum::<f64>();
            if d2 == 0.0 { 0.0 } else { (h * d2.sqrt()).powf(exponent) }
        })
        .collect()
}

/// Flat index into [`distance_power_table`] for the offset between two cells.
#[inline]
pub(crate) fn table_index(spec: &GridSpec, a: [i64; 3], b: [i64; 3]) -> usize {
    let c = spec.cells_per_axis();
    (0..spec.dim()).fold(0, |acc, k| acc * c + (a[k] - b[k]).unsigned_abs() as usize)
}

/// `I^alpha f(x) = h^n sum_{y != x} f(y) |x-y|^{alpha-n}` plus the self-cell term.
pub fn riesz(f: &GridFunction, alpha: f64) -> Result<GridFunction> {
    riesz_with(f, alpha, SelfCell::Ball, &Engine::default())
}

pub fn riesz_with(f: &GridFunction, alpha: f64, self_cell: SelfCell, engine: &Engine) -> Result<GridFunction> {
    let spec = *f.spec();
    let n = spec.dim() as f64;
    check_alpha(alpha, n, false)?;
    let hn = spec.cell_volume();
    let w0 = self_cell.weight(&spec, alpha);
    let v = f.values();
    let out = if engine.use_fft(&spec) {
        let h = spec.spacing();
        let conv = Convolver::new(&spec, v);
        conv.convolve(|d| {
            let d2 = stencil::norm2(d);
            if d2 == 0 { w0 } else { hn * (h * (d2 as f64).sqrt()).powf(alpha - n) }
        })
    } else {
        let table: Vec<f64> = distance_power_table(&spec, alpha - n).into_iter().map(|k| k * hn).collect();
        let idx: Vec<[i64; 3]> = (0..spec.len()).map(|i| stencil::index_i64(&spec, i)).collect();
        (0..spec.len())
            .into_par_iter()
            .map(|x| {
                let mut s = w0 * v[x];
                for (y, &fy) in v.iter().enumerate() {
                    if y != x && fy != 0.0 {
                        s += table[table_index(&spec, idx[x], idx[y])] * fy;
                    }
                }
                s
            })
            .collect()
    };
    Ok(GridFunction::from_raw(spec, out))
}
