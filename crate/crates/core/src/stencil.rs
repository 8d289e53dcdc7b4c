//! Ball stencils on the lattice and the two convolution back ends.
//!
//! A cell belongs to `B(x, r)` iff its center does. Between cell centers the offset is
//! `h d` for an integer vector `d`, so membership is the integer test
//! `|d|^2 < (r/h)^2`, shared by every path (and by the oracle) so that fast and brute
//! force evaluations make identical inclusion decisions.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;

/// Selects direct sums or FFT convolution by grid size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Engine {
    /// FFT convolution is used when `cells^dim` exceeds this.
    pub fft_threshold: usize,
}

impl Default for Engine {
    fn default() -> Self {
        Self { fft_threshold: 1 << 15 }
    }
}

impl Engine {
    pub fn direct() -> Self {
        Self { fft_threshold: usize::MAX }
    }

    pub fn fft() -> Self {
        Self { fft_threshold: 0 }
    }

    pub fn use_fft(&self, spec: &GridSpec) -> bool {
        spec.len() > self.fft_threshold
    }
}

/// `(r / unit)^2`, the squared radius in lattice units.
#[inline]
pub fn radius_sq_units(r: f64, unit: f64) -> f64 {
    let q = r / unit;
    q * q
}

/// Membership of a lattice offset with squared length `d2` in the open ball.
#[inline]
pub fn in_ball(d2: i64, radius_sq: f64) -> bool {
    (d2 as f64) < radius_sq
}

pub type Offset = [i64; 3];

#[inline]
pub fn norm2(d: Offset) -> i64 {
    d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
}

/// All offsets with `|d_k| < cells` in every used axis, sorted by squared length
/// (ties broken lexicographically so the order is fixed).
pub fn sorted_offsets(spec: &GridSpec) -> Vec<Offset> {
    let c = spec.cells_per_axis() as i64;
    let range = |used: bool| if used { -(c - 1)..=(c - 1) } else { 0..=0 };
    let dim = spec.dim();
    let mut out = Vec::new();
    for a in range(true) {
        for b in range(dim > 1) {
            for e in range(dim > 2) {
                out.push([a, b, e]);
            }
        }
    }
    out.sort_by_key(|&d| (norm2(d), d));
    out
}

/// Neighbor index of `flat` shifted by `d`, if it lies in the domain.
#[inline]
pub fn shifted(spec: &GridSpec, base: [i64; 3], d: Offset) -> Option<usize> {
    let c = spec.cells_per_axis() as i64;
    let mut flat = 0i64;
    for axis in 0..spec.dim() {
        let v = base[axis] + d[axis];
        if v < 0 || v >= c {
            return None;
        }
        flat = flat * c + v;
    }
    Some(flat as usize)
}

pub fn index_i64(spec: &GridSpec, flat: usize) -> [i64; 3] {
    let m = spec.multi_index(flat);
    [m[0] as i64, m[1] as i64, m[2] as i64]
}

/// Sum of `values` over the in-domain cells of `B(x, r)` for every center `x` (no `h^n`
/// factor), by prefix sums along the last axis.
pub fn ball_sums_direct(spec: &GridSpec, values: &[f64], r: f64) -> Vec<f64> {
    let c = spec.cells_per_axis();
    let dim = spec.dim();
    let q2 = radius_sq_units(r, spec.spacing());
    let lines = spec.len() / c;
    // prefix[line * (c + 1) + j] = sum of the first j entries of the line.
    let mut prefix = vec![0.0; lines * (c + 1)];
    prefix.par_chunks_mut(c + 1).enumerate().for_each(|(line, p)| {
        let row = &values[line * c..(line + 1) * c];
        for j in 0..c {
            p[j + 1] = p[j] + row[j];
        }
    });

    // Leading-axis offsets with their last-axis half extent.
    let ci = c as i64;
    let lead_range = |used: bool| if used { -(ci - 1)..=(ci - 1) } else { 0..=0 };
    let mut leads: Vec<([i64; 2], i64)> = Vec::new();
    for a in lead_range(dim > 1) {
        for b in lead_range(dim > 2) {
            let base = a * a + b * b;
            if !in_ball(base, q2) {
                continue;
            }
            let mut e = 0i64;
            while e + 1 < ci && in_ball(base + (e + 1) * (e + 1), q2) {
                e += 1;
            }
            leads.push(([a, b], e));
        }
    }

    (0..spec.len())
        .into_par_iter()
        .map(|flat| {
            let idx = index_i64(spec, flat);
            let j = idx[dim - 1];
            let mut s = 0.0;
            for &([a, b], e) in &leads {
                // leading coordinates of the shifted line
                let (l0, l1) = match dim {
                    1 => (0, 0),
                    2 => (idx[0] + a, 0),
                    _ => (idx[0] + a, idx[1] + b),
                };
                if l0 < 0 || l0 >= ci || l1 < 0 || l1 >= ci {
                    continue;
                }
                let line = match dim {
                    1 => 0,
                    2 => l0,
                    _ => l0 * ci + l1,
                } as usize;
                let lo = (j - e).max(0) as usize;
                let hi = (j + e + 1).min(ci) as usize;
                let p = &prefix[line * (c + 1)..(line + 1) * (c + 1)];
                s += p[hi] - p[lo];
            }
            s
        })
        .collect()
}

/// Number of in-domain cells of `B(x, r)` for every center, exactly.
pub fn ball_counts(spec: &GridSpec, r: f64) -> Vec<f64> {
    ball_sums_direct(spec, &vec![1.0; spec.len()], r)
}

/// Precomputed FFT of a field zero-padded to `2 cells` per axis, reusable for many
/// symmetric or general kernels.
pub struct Convolver {
    spec: GridSpec,
    padded: usize,
    spectrum: Vec<Complex<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Convolver {
    pub fn new(spec: &GridSpec, values: &[f64]) -> Self {
        let c = spec.cells_per_axis();
        let p = 2 * c;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(p);
        let inverse = planner.plan_fft_inverse(p);
        let mut data = vec![Complex::new(0.0, 0.0); p.pow(spec.dim() as u32)];
        for (flat, &v) in values.iter().enumerate() {
            let idx = spec.multi_index(flat);
            let mut pf = 0;
            for &i in &idx[..spec.dim()] {
                pf = pf * p + i;
            }
            data[pf] = Complex::new(v, 0.0);
        }
        let mut conv = Self { spec: *spec, padded: p, spectrum: Vec::new(), forward, inverse };
        conv.transform(&mut data, false);
        conv.spectrum = data;
        conv
    }

    /// `out[x] = sum_y f[y] k(x - y)` with `k` given on offsets `|d_k| <= cells - 1`.
    pub fn convolve(&self, kernel: impl Fn(Offset) -> f64 + Sync) -> Vec<f64> {
        let p = self.padded as i64;
        let c = self.spec.cells_per_axis() as i64;
        let dim = self.spec.dim();
        let total = self.padded.pow(dim as u32);
        let wrap = |u: i64| -> Option<i64> {
            if u < c {
                Some(u)
            } else if u > c {
                Some(u - p)
            } else {
                None
            }
        };
        let mut k: Vec<Complex<f64>> = (0..total)
            .into_par_iter()
            .map(|pf| {
                let mut rem = pf as i64;
                let mut d = [0i64; 3];
                for axis in (0..dim).rev() {
                    match wrap(rem % p) {
                        Some(v) => d[axis] = v,
                        None => return Complex::new(0.0, 0.0),
                    }
                    rem /= p;
                }
                Complex::new(kernel(d), 0.0)
            })
            .collect();
        self.transform(&mut k, false);
        k.par_iter_mut().zip(self.spectrum.par_iter()).for_each(|(a, b)| *a *= *b);
        self.transform(&mut k, true);
        let scale = 1.0 / total as f64;
        (0..self.spec.len())
            .into_par_iter()
            .map(|flat| {
                let idx = self.spec.multi_index(flat);
                let mut pf = 0;
                for &i in &idx[..dim] {
                    pf = pf * self.padded + i;
                }
                k[pf].re * scale
            })
            .collect()
    }

    /// Ball sums `sum_{|d| < r/h} f[x + d]` for every center.
    pub fn ball_sums(&self, r: f64) -> Vec<f64> {
        let q2 = radius_sq_units(r, self.spec.spacing());
        self.convolve(|d| if in_ball(norm2(d), q2) { 1.0 } else { 0.0 })
    }

    fn transform(&self, data: &mut [Complex<f64>], inverse: bool) {
        let p = self.padded;
        let dim = self.spec.dim();
        let plan = if inverse { &self.inverse } else { &self.forward };
        for axis in 0..dim {
            let stride = p.pow((dim - 1 - axis) as u32);
            if stride == 1 {
                data.par_chunks_mut(p).for_each(|line| plan.process(line));
                continue;
            }
            let block = stride * p;
            data.par_chunks_mut(block).for_each(|chunk| {
                let mut line = vec![Complex::new(0.0, 0.0); p];
                for offset in 0..stride {
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = chunk[offset + k * stride];
                    }
                    plan.process(&mut line);
                    for (k, v) in line.iter().enumerate() {
                        chunk[offset + k * stride] = *v;
                    }
                }
            });
        }
    }
}

/// Ball sums through whichever back end `engine` selects.
pub fn ball_sums(spec: &GridSpec, values: &[f64], r: f64, engine: &Engine) -> Vec<f64> {
    if engine.use_fft(spec) { Convolver::new(spec, values).ball_sums(r) } else { ball_sums_direct(spec, values, r) }
}
