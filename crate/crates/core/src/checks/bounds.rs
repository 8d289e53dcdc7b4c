use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, invalid};
use crate::grid::GridFunction;
use crate::modular::{MorreyParams, RadiusLadder, modular_fields};
use crate::stencil::Engine;

pub const STABILITY_FACTOR: f64 = 2.0;

/// `M_{q,mu}(Tf; x, r)` against
/// `r^{n-mu} (int_r^inf t^{lambda/p - n/q - 1} M_{p,lambda}(f; x, t)^{1/p} dt)^q`
/// over all centers and in-domain ladder radii. With `(q, mu) = (p, lambda)` this is
/// the single-index estimate for singular-type operators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub operator: String,
    pub params: MorreyParams,
    pub cells_per_axis: usize,
    /// Largest `LHS/RHS`: the empirical implicit constant.
    pub max_ratio: f64,
    pub argmax_cell: usize,
    pub argmax_radius: f64,
    pub evaluated: usize,
    /// Pairs with `RHS = 0`.
    pub excluded: usize,
    pub radii: Vec<f64>,
    /// Per-radius maximum of `LHS/RHS`.
    pub max_ratio_by_radius: Vec<f64>,
    /// Rung-major `LHS/RHS` field (`NaN` where excluded); exported as CSV only.
    #[serde(skip)]
    pub ratio_field: Vec<f64>,
}

pub fn modular_bound_report(
    f: &GridFunction,
    tf: &GridFunction,
    mp: &MorreyParams,
    ladder: &RadiusLadder,
    operator: &str,
    engine: &Engine,
) -> Result<BoundReport> {
    f.ensure_same_grid(tf)?;
    let spec = *f.spec();
    let n = spec.dim() as f64;
    mp.validate(spec.dim())?;
    if mp.lambda >= n {
        return Err(invalid("the t-integral diverges for lambda = n"));
    }
    if !ladder.reaches(&spec) {
        return Err(invalid("ladder must reach the domain diameter"));
    }
    let out = mp.output().unwrap_or(*mp);
    let (p, lambda, q, mu) = (mp.p, mp.lambda, out.p, out.lambda);
    let all = ladder.radii();
    let diameter = spec.diameter();
    let eval_radii: Vec<f64> = all.iter().copied().filter(|&r| r <= diameter * (1.0 + 1e-9)).collect();

    let fin = modular_fields(f, mp, &all, engine)?;
    let fout = modular_fields(tf, &out, &eval_radii, engine)?;
    let mass = f.p_mass(p);
    let top = *all.last().expect("non-empty ladder");
    let tail = mass.powf(1.0 / p) * (q / n) * top.powf(-n / q);
    let e = lambda / p - n / q;
    let logs: Vec<f64> = all.iter().map(|r| r.ln()).collect();
    let weights: Vec<f64> = all.iter().map(|r| r.powf(e)).collect();
    let len = spec.len();
    let ke = eval_radii.len();

    // per center: suffix trapezoid sums in ln t, then the ratio at each evaluated rung
    let rows: Vec<Vec<f64>> = (0..len)
        .into_par_iter()
        .map(|x| {
            let integrand: Vec<f64> = (0..all.len()).map(|j| weights[j] * fin[j].values()[x].powf(1.0 / p)).collect();
            let mut suffix = vec![0.0; all.len()];
            let mut acc = tail;
            suffix[all.len() - 1] = acc;
            for j in (0..all.len() - 1).rev() {
                acc += 0.5 * (logs[j + 1] - logs[j]) * (integrand[j] + integrand[j + 1]);
                suffix[j] = acc;
            }
            (0..ke)
                .map(|k| {
                    let rhs = eval_radii[k].powf(n - mu) * suffix[k].powf(q);
                    let lhs = fout[k].values()[x];
                    if rhs > 0.0 { lhs / rhs } else { f64::NAN }
                })
                .collect()
        })
        .collect();

    let mut ratio_field = vec![f64::NAN; ke * len];
    let mut max_ratio_by_radius = vec![0.0f64; ke];
    let (mut best, mut arg, mut excluded) = (0.0f64, (0usize, 0usize), 0usize);
    for (x, row) in rows.iter().enumerate() {
        for (k, &r) in row.iter().enumerate() {
            ratio_field[k * len + x] = r;
            if r.is_nan() {
                excluded += 1;
                continue;
            }
            max_ratio_by_radius[k] = max_ratio_by_radius[k].max(r);
            if r > best {
                best = r;
                arg = (x, k);
            }
        }
    }
    Ok(BoundReport {
        operator: operator.into(),
        params: *mp,
        cells_per_axis: spec.cells_per_axis(),
        max_ratio: best,
        argmax_cell: arg.0,
        argmax_radius: eval_radii.get(arg.1).copied().unwrap_or(0.0),
        evaluated: ke * len - excluded,
        excluded,
        radii: eval_radii,
        max_ratio_by_radius,
        ratio_field,
    })
}

impl BoundReport {
    pub fn write_ratio_csv(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let len = if self.radii.is_empty() { 0 } else { self.ratio_field.len() / self.radii.len() };
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["cell", "r", "ratio"])?;
        for (k, r) in self.radii.iter().enumerate() {
            for x in 0..len {
                w.write_record([x.to_string(), r.to_string(), self.ratio_field[k * len + x].to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// The same bound at two resolutions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundStability {
    pub coarse: BoundReport,
    pub fine: BoundReport,
    /// `max(a, b) / min(a, b)` of the two maximal ratios.
    pub factor: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn bound_stability(coarse: BoundReport, fine: BoundReport) -> BoundStability {
    let (a, b) = (coarse.max_ratio, fine.max_ratio);
    let finite = a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0;
    let factor = if a == 0.0 && b == 0.0 {
        1.0
    } else if finite {
        a.max(b) / a.min(b)
    } else {
        f64::INFINITY
    };
    BoundStability { coarse, fine, factor, tolerance: STABILITY_FACTOR, pass: factor <= STABILITY_FACTOR }
}
