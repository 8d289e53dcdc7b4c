use rayon::prelude::*;

use super::check_alpha;
use crate::error::Result;
use crate::grid::{GridFunction, GridSpec};
use crate::modular::RadiusLadder;
use crate::stencil::{self, Convolver, Engine, Offset};

/// Per-rung ball sums and in-domain cell counts, rung-major (`k * len + x`).
pub(crate) struct LadderSums {
    pub sums: Vec<f64>,
    pub counts: Vec<f64>,
}

/// Offsets inside the largest ladder ball, sorted by length, with the number of leading
/// offsets inside each rung's ball.
fn ladder_offsets(spec: &GridSpec, radii: &[f64]) -> (Vec<Offset>, Vec<usize>) {
    let h = spec.spacing();
    let q2: Vec<f64> = radii.iter().map(|&r| stencil::radius_sq_units(r, h)).collect();
    let outer = q2.iter().copied().fold(0.0, f64::max);
    let offsets: Vec<Offset> =
        stencil::sorted_offsets(spec).into_iter().filter(|&d| stencil::in_ball(stencil::norm2(d), outer)).collect();
    let ends = q2.iter().map(|&q| offsets.partition_point(|&d| stencil::in_ball(stencil::norm2(d), q))).collect();
    (offsets, ends)
}

/// Ball sums accumulated per center outward in order of distance; every rung's sum is a
/// prefix of the same fixed-order sequence of nonnegative terms.
fn ladder_sums_direct(spec: &GridSpec, values: &[f64], radii: &[f64]) -> LadderSums {
    let (offsets, ends) = ladder_offsets(spec, radii);
    let len = spec.len();
    let per_center: Vec<Vec<(f64, f64)>> = (0..len)
        .into_par_iter()
        .map(|x| {
            let base = stencil::index_i64(spec, x);
            let mut out = Vec::with_capacity(ends.len());
            let (mut sum, mut count, mut j) = (0.0, 0.0, 0);
            for &end in &ends {
                while j < end {
                    if let Some(y) = stencil::shifted(spec, base, offsets[j]) {
                        sum += values[y];
                        count += 1.0;
                    }
                    j += 1;
                }
                out.push((sum, count));
            }
            out
        })
        .collect();
    let k = radii.len();
    let mut sums = vec![0.0; k * len];
    let mut counts = vec![0.0; k * len];
    for (x, row) in per_center.iter().enumerate() {
        for (r, &(s, c)) in row.iter().enumerate() {
            sums[r * len + x] = s;
            counts[r * len + x] = c;
        }
    }
    LadderSums { sums, counts }
}

fn ladder_sums_fft(spec: &GridSpec, values: &[f64], radii: &[f64]) -> LadderSums {
    let conv = Convolver::new(spec, values);
    let ones = Convolver::new(spec, &vec![1.0; spec.len()]);
    let mut sums = Vec::with_capacity(radii.len() * spec.len());
    let mut counts = Vec::with_capacity(radii.len() * spec.len());
    for &r in radii {
        // sums of nonnegative terms: clamp the transform's roundoff below zero
        sums.extend(conv.ball_sums(r).into_iter().map(|s| s.max(0.0)));
        counts.extend(ones.ball_sums(r).into_iter().map(f64::round));
    }
    LadderSums { sums, counts }
}

pub(crate) fn ladder_sums(spec: &GridSpec, values: &[f64], radii: &[f64], engine: &Engine) -> LadderSums {
    if engine.use_fft(spec) { ladder_sums_fft(spec, values, radii) } else { ladder_sums_direct(spec, values, radii) }
}

fn max_over_rungs(len: usize, rungs: usize, value: impl Fn(usize, usize) -> f64 + Sync) -> Vec<f64> {
    (0..len).into_par_iter().map(|x| (0..rungs).map(|k| value(k, x)).fold(0.0, f64::max)).collect()
}

/// `Mf(x) = max_k` of the counted-cell average of `|f|` over `B(x, r_k)`.
pub fn maximal(f: &GridFunction, ladder: &RadiusLadder) -> Result<GridFunction> {
    maximal_with(f, ladder, &Engine::default())
}

pub fn maximal_with(f: &GridFunction, ladder: &RadiusLadder, engine: &Engine) -> Result<GridFunction> {
    ladder.validate()?;
    let spec = *f.spec();
    let radii = ladder.radii();
    let s = ladder_sums(&spec, f.abs().values(), &radii, engine);
    let len = spec.len();
    let out = max_over_rungs(len, radii.len(), |k, x| s.sums[k * len + x] / s.counts[k * len + x]);
    Ok(GridFunction::from_raw(spec, out))
}

/// `M^alpha f(x) = max_k |B|^{alpha/n - 1} int_B |f|` with `|B|` the counted-cell measure.
pub fn frac_maximal(f: &GridFunction, alpha: f64, ladder: &RadiusLadder) -> Result<GridFunction> {
    frac_maximal_with(f, alpha, ladder, &Engine::default())
}

pub fn frac_maximal_with(f: &GridFunction, alpha: f64, ladder: &RadiusLadder, engine: &Engine) -> Result<GridFunction> {
    let spec = *f.spec();
    check_alpha(alpha, spec.dim() as f64, true)?;
    if alpha == 0.0 {
        return maximal_with(f, ladder, engine);
    }
    ladder.validate()?;
    let radii = ladder.radii();
    let s = ladder_sums(&spec, f.abs().values(), &radii, engine);
    let len = spec.len();
    let hn = spec.cell_volume();
    let e = alpha / spec.dim() as f64 - 1.0;
    let out =
        max_over_rungs(len, radii.len(), |k, x| (s.counts[k * len + x] * hn).powf(e) * (s.sums[k * len + x] * hn));
    Ok(GridFunction::from_raw(spec, out))
}

/// `M#f(x) = max_k` of the counted-cell average of `|f - f_B|` over `B = B(x, r_k)`,
/// with `f_B` the counted-cell mean. Each distinct ball is evaluated in two passes.
pub fn sharp_maximal(f: &GridFunction, ladder: &RadiusLadder) -> Result<GridFunction> {
    ladder.validate()?;
    let spec = *f.spec();
    let radii = ladder.radii();
    let (offsets, ends) = ladder_offsets(&spec, &radii);
    let v = f.values();
    let out = (0..spec.len())
        .into_par_iter()
        .map(|x| {
            let base = stencil::index_i64(&spec, x);
            let mut members: Vec<usize> = Vec::new();
            let (mut sum, mut j, mut best, mut last) = (0.0, 0, 0.0f64, 0.0f64);
            let mut seen = 0;
            for &end in &ends {
                while j < end {
                    if let Some(y) = stencil::shifted(&spec, base, offsets[j]) {
                        members.push(y);
                        sum += v[y];
                    }
                    j += 1;
                }
                if members.len() != seen {
                    seen = members.len();
                    let count = seen as f64;
                    let mean = sum / count;
                    let dev: f64 = members.iter().map(|&y| (v[y] - mean).abs()).sum();
                    last = dev / count;
                }
                best = best.max(last);
            }
            best
        })
        .collect();
    Ok(GridFunction::from_raw(spec, out))
}
