use rayon::prelude::*;

use super::riesz::table_index;
use super::{check_alpha, check_beta, distance_power_table};
use crate::error::Result;
use crate::grid::{GridFunction, GridSpec};
use crate::stencil;

/// Cells sorted by center norm (ties by flat index), with their exact radial keys.
pub(crate) struct RadialOrder {
    pub order: Vec<usize>,
    pub keys: Vec<i64>,
}

impl RadialOrder {
    pub fn new(spec: &GridSpec) -> Self {
        let mut order: Vec<usize> = (0..spec.len()).collect();
        order.sort_by_key(|&i| (spec.radial_key(i), i));
        let keys = order.iter().map(|&i| spec.radial_key(i)).collect();
        Self { order, keys }
    }

    /// Number of cells with key strictly below `key`.
    pub fn below(&self, key: i64) -> usize {
        self.keys.partition_point(|&k| k < key)
    }

    /// Index of the first cell with key strictly above `key`.
    pub fn above(&self, key: i64) -> usize {
        self.keys.partition_point(|&k| k <= key)
    }
}

/// `H^alpha f(x) = |x|^{alpha-n} int_{|y|<|x|} f(y) dy`, by a prefix sum over the radial
/// order. Cells with `|y| = |x|` are excluded.
pub fn hardy_lower(f: &GridFunction, alpha: f64) -> Result<GridFunction> {
    let spec = *f.spec();
    let n = spec.dim() as f64;
    check_alpha(alpha, n, true)?;
    let ro = RadialOrder::new(&spec);
    let v = f.values();
    let mut prefix = Vec::with_capacity(v.len() + 1);
    let mut acc = 0.0;
    prefix.push(acc);
    for &i in &ro.order {
        acc += v[i];
        prefix.push(acc);
    }
    let hn = spec.cell_volume();
    let out = (0..spec.len())
        .into_par_iter()
        .map(|x| spec.center_norm(x).powf(alpha - n) * hn * prefix[ro.below(spec.radial_key(x))])
        .collect();
    Ok(GridFunction::from_raw(spec, out))
}

/// `calH^alpha f(x) = |x|^alpha int_{|y|>|x|} f(y) |y|^{-n} dy`, by a suffix sum over the
/// radial order.
pub fn hardy_upper(f: &GridFunction, alpha: f64) -> Result<GridFunction> {
    let spec = *f.spec();
    let n = spec.dim() as f64;
    check_alpha(alpha, n, true)?;
    let ro = RadialOrder::new(&spec);
    let v = f.values();
    let mut suffix = vec![0.0; v.len() + 1];
    for j in (0..v.len()).rev() {
        let i = ro.order[j];
        suffix[j] = suffix[j + 1] + v[i] * spec.center_norm(i).powf(-n);
    }
    let hn = spec.cell_volume();
    let out = (0..spec.len())
        .into_par_iter()
        .map(|x| spec.center_norm(x).powf(alpha) * hn * suffix[ro.above(spec.radial_key(x))])
        .collect();
    Ok(GridFunction::from_raw(spec, out))
}

struct Support {
    cells: Vec<(usize, [i64; 3], i64, f64)>,
}

impl Support {
    fn new(spec: &GridSpec, v: &[f64]) -> Self {
        let cells = (0..spec.len())
            .filter(|&y| v[y] != 0.0)
            .map(|y| (y, stencil::index_i64(spec, y), spec.radial_key(y), v[y]))
            .collect();
        Self { cells }
    }
}

/// `K_beta f(x) = |x|^{-beta} int_{|y|<|x|} f(y) |x-y|^{beta-n} dy`, summed directly.
/// Distinct cells are at least `h` apart, so no self-cell correction arises.
pub fn hybrid_k(f: &GridFunction, beta: f64) -> Result<GridFunction> {
    let spec = *f.spec();
    let n = spec.dim() as f64;
    check_beta(beta, n)?;
    let table = distance_power_table(&spec, beta - n);
    let sup = Support::new(&spec, f.values());
    let hn = spec.cell_volume();
    let out = (0..spec.len())
        .into_par_iter()
        .map(|x| {
            let (a, kx) = (stencil::index_i64(&spec, x), spec.radial_key(x));
            let mut s = 0.0;
            for &(_, b, ky, fy) in &sup.cells {
                if ky < kx {
                    s += fy * table[table_index(&spec, a, b)];
                }
            }
            spec.center_norm(x).powf(-beta) * hn * s
        })
        .collect();
    Ok(GridFunction::from_raw(spec, out))
}

/// `calK_beta f(x) = int_{|y|>|x|} f(y) |y|^{-beta} |x-y|^{beta-n} dy`, summed directly.
pub fn hybrid_calk(f: &GridFunction, beta: f64) -> Result<GridFunction> {
    let spec = *f.spec();
    let n = spec.dim() as f64;
    check_beta(beta, n)?;
    let table = distance_power_table(&spec, beta - n);
    let sup = Support::new(&spec, f.values());
    let weights: Vec<f64> = sup.cells.iter().map(|&(y, ..)| spec.center_norm(y).powf(-beta)).collect();
    let hn = spec.cell_volume();
    let out = (0..spec.len())
        .into_par_iter()
        .map(|x| {
            let (a, kx) = (stencil::index_i64(&spec, x), spec.radial_key(x));
            let mut s = 0.0;
            for (&(_, b, ky, fy), &w) in sup.cells.iter().zip(&weights) {
                if ky > kx {
                    s += fy * w * table[table_index(&spec, a, b)];
                }
            }
            hn * s
        })
        .collect();
    Ok(GridFunction::from_raw(spec, out))
}
