//! Ball integrals, the Morrey modular `r^{-lambda} int_{B(x,r)} |f|^p`, sup-over-center
//! profiles on a radius ladder, the Morrey norm, and the far-field sequence
//! `A_N = sup_x int_{B(x,R)} |f|^p chi_{|y| >= N}`.

mod ladder;

pub use ladder::RadiusLadder;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, invalid};
use crate::grid::{GridFunction, GridSpec};
use crate::stencil::{self, Convolver, Engine};

/// Exponent pair `(p, lambda)` with an optional output pair `(q, mu)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorreyParams {
    pub p: f64,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

impl MorreyParams {
    pub fn new(p: f64, lambda: f64) -> Self {
        Self { p, lambda, q: None, mu: None }
    }

    pub fn with_output(mut self, q: f64, mu: f64) -> Self {
        self.q = Some(q);
        self.mu = Some(mu);
        self
    }

    /// The output pair as its own parameter set.
    pub fn output(&self) -> Option<MorreyParams> {
        Some(MorreyParams::new(self.q?, self.mu?))
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let n = dim as f64;
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(invalid(format!("p must satisfy 1 <= p < inf, got {}", self.p)));
        }
        if !(0.0..=n).contains(&self.lambda) {
            return Err(invalid(format!("lambda must lie in [0, {n}], got {}", self.lambda)));
        }
        match (self.q, self.mu) {
            (None, None) => Ok(()),
            (Some(q), Some(mu)) => {
                if !(q > 1.0 && q.is_finite()) {
                    return Err(invalid(format!("q must satisfy 1 < q < inf, got {q}")));
                }
                if !(mu >= 0.0 && mu < n) {
                    return Err(invalid(format!("mu must lie in [0, {n}), got {mu}")));
                }
                Ok(())
            }
            _ => Err(invalid("q and mu must be given together")),
        }
    }
}

/// `h^n * sum_{y in B(x, r)} g(y)` at every cell center.
pub fn ball_mass_field(g: &GridFunction, r: f64) -> Result<GridFunction> {
    ball_mass_field_with(g, r, &Engine::default())
}

pub fn ball_mass_field_with(g: &GridFunction, r: f64, engine: &Engine) -> Result<GridFunction> {
    check_radius(r)?;
    let spec = g.spec();
    let hn = spec.cell_volume();
    let sums = stencil::ball_sums(spec, g.values(), r, engine);
    Ok(GridFunction::from_raw(*spec, sums.into_iter().map(|s| s * hn).collect()))
}

/// `M_{p,lambda}(f; x, r)` at every cell center.
pub fn modular_field(f: &GridFunction, mp: &MorreyParams, r: f64) -> Result<GridFunction> {
    modular_field_with(f, mp, r, &Engine::default())
}

pub fn modular_field_with(f: &GridFunction, mp: &MorreyParams, r: f64, engine: &Engine) -> Result<GridFunction> {
    mp.validate(f.spec().dim())?;
    let mass = ball_mass_field_with(&f.pointwise_power(mp.p)?, r, engine)?;
    let w = r.powf(-mp.lambda);
    Ok(mass.map(|v| v * w))
}

/// Modular fields of `f` at every ladder radius, sharing one FFT of `|f|^p` when the
/// engine selects the FFT path.
pub fn modular_fields(
    f: &GridFunction,
    mp: &MorreyParams,
    radii: &[f64],
    engine: &Engine,
) -> Result<Vec<GridFunction>> {
    mp.validate(f.spec().dim())?;
    for &r in radii {
        check_radius(r)?;
    }
    let spec = *f.spec();
    let g = f.pointwise_power(mp.p)?;
    let hn = spec.cell_volume();
    let conv = engine.use_fft(&spec).then(|| Convolver::new(&spec, g.values()));
    Ok(radii
        .iter()
        .map(|&r| {
            let sums = match &conv {
                Some(c) => c.ball_sums(r),
                None => stencil::ball_sums_direct(&spec, g.values(), r),
            };
            let w = r.powf(-mp.lambda) * hn;
            GridFunction::from_raw(spec, sums.into_iter().map(|s| s * w).collect())
        })
        .collect())
}

fn check_radius(r: f64) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        return Err(invalid(format!("radius must be positive, got {r}")));
    }
    Ok(())
}

/// Sup over centers of the modular at each ladder radius, with the analytic tail
/// `total_p_mass * r^{-lambda}` for radii beyond the domain diameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModularProfile {
    pub params: MorreyParams,
    pub radii: Vec<f64>,
    pub sup_values: Vec<f64>,
    pub total_p_mass: f64,
    /// Radius from which the tail rule applies (the grid diameter).
    pub tail_from: f64,
}

impl ModularProfile {
    /// Tail rule value at `r >= tail_from`.
    pub fn tail(&self, r: f64) -> f64 {
        self.total_p_mass * r.powf(-self.params.lambda)
    }

    /// Largest value over the ladder and the tail.
    pub fn supremum(&self) -> f64 {
        let ladder = self.sup_values.iter().copied().fold(0.0, f64::max);
        ladder.max(self.tail(self.tail_from))
    }

    pub fn write_csv(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["r", "value"])?;
        for (r, v) in self.radii.iter().zip(&self.sup_values) {
            w.write_record([r.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn modular_profile(f: &GridFunction, mp: &MorreyParams, ladder: &RadiusLadder) -> Result<ModularProfile> {
    modular_profile_with(f, mp, ladder, &Engine::default())
}

pub fn modular_profile_with(
    f: &GridFunction,
    mp: &MorreyParams,
    ladder: &RadiusLadder,
    engine: &Engine,
) -> Result<ModularProfile> {
    ladder.validate()?;
    let radii = ladder.radii();
    let fields = modular_fields(f, mp, &radii, engine)?;
    let sup_values = fields.iter().map(|g| g.values().iter().copied().fold(0.0, f64::max)).collect();
    Ok(ModularProfile { params: *mp, radii, sup_values, total_p_mass: f.p_mass(mp.p), tail_from: f.spec().diameter() })
}

/// `||f||_{p,lambda}`: the profile supremum (ladder and tail) to the power `1/p`.
pub fn morrey_norm(f: &GridFunction, mp: &MorreyParams, ladder: &RadiusLadder) -> Result<f64> {
    morrey_norm_with(f, mp, ladder, &Engine::default())
}

pub fn morrey_norm_with(f: &GridFunction, mp: &MorreyParams, ladder: &RadiusLadder, engine: &Engine) -> Result<f64> {
    if !ladder.reaches(f.spec()) {
        return Err(invalid(format!(
            "ladder ends at {} but must reach the domain diameter {}",
            ladder.radius(ladder.count - 1),
            f.spec().diameter()
        )));
    }
    let profile = modular_profile_with(f, mp, ladder, engine)?;
    Ok(profile.supremum().powf(1.0 / mp.p))
}

/// `A_N` for `N = 1..=n_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VStarSequence {
    pub p: f64,
    pub ball_radius: f64,
    pub n_values: Vec<u32>,
    pub a_values: Vec<f64>,
}

impl VStarSequence {
    pub fn write_csv(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["N", "value"])?;
        for (n, v) in self.n_values.iter().zip(&self.a_values) {
            w.write_record([n.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Far-field masses, computed per center by bucketing ball cells by `floor(|y|)` and
/// suffix-summing, so the sequence is nonincreasing in `N` in floating point too.
pub fn vstar_sequence(f: &GridFunction, p: f64, n_max: u32, ball_radius: f64) -> Result<VStarSequence> {
    if n_max < 1 {
        return Err(invalid("N_max must be at least 1"));
    }
    check_radius(ball_radius)?;
    let spec = *f.spec();
    let g = f.pointwise_power(p)?;
    let nm = n_max as usize;
    let buckets = far_field_buckets(&spec, nm);
    let q2 = stencil::radius_sq_units(ball_radius, spec.spacing());
    let offsets: Vec<_> = ball_offsets(&spec, q2);
    let gv = g.values();

    let best = (0..spec.len())
        .into_par_iter()
        .map(|x| {
            let base = stencil::index_i64(&spec, x);
            let mut acc = vec![0.0; nm + 1];
            for &d in &offsets {
                if let Some(y) = stencil::shifted(&spec, base, d) {
                    let b = buckets[y] as usize;
                    if b > 0 {
                        acc[b] += gv[y];
                    }
                }
            }
            // acc[N] becomes sum over buckets >= N
            for n in (1..nm).rev() {
                acc[n] += acc[n + 1];
            }
            acc
        })
        .reduce(|| vec![0.0; nm + 1], |a, b| a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect());
    let hn = spec.cell_volume();
    Ok(VStarSequence {
        p,
        ball_radius,
        n_values: (1..=n_max).collect(),
        a_values: best[1..].iter().map(|v| v * hn).collect(),
    })
}

/// `min(floor(|y|), n_max)` per cell.
fn far_field_buckets(spec: &GridSpec, n_max: usize) -> Vec<u32> {
    (0..spec.len())
        .map(|y| {
            let r = spec.center_norm(y);
            let mut b = r.floor() as usize;
            // guard against sqrt rounding at integer radii
            if ((b + 1) as f64) <= r {
                b += 1;
            }
            b.min(n_max) as u32
        })
        .collect()
}

/// Offsets of the open ball of squared lattice radius `q2`, in fixed order.
pub(crate) fn ball_offsets(spec: &GridSpec, q2: f64) -> Vec<stencil::Offset> {
    let c = spec.cells_per_axis() as i64;
    let ext = (q2.sqrt().ceil() as i64).min(c - 1);
    let range = |used: bool| if used { -ext..=ext } else { 0..=0 };
    let mut out = Vec::new();
    for a in range(true) {
        for b in range(spec.dim() > 1) {
            for e in range(spec.dim() > 2) {
                if stencil::in_ball(a * a + b * b + e * e, q2) {
                    out.push([a, b, e]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;
