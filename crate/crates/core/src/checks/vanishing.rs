use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::GridFunction;
use crate::modular::{self, ModularProfile, MorreyParams, RadiusLadder, VStarSequence};
use crate::stencil::Engine;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Terminal ratio below which a property may be called vanishing.
    pub vanishing: f64,
    /// Terminal ratio above which a property is called non-vanishing.
    pub non_vanishing: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { vanishing: 0.1, non_vanishing: 0.5 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Vanishing,
    NonVanishing,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Property {
    V0,
    VInf,
    VStar,
}

/// Statistics behind one verdict. The verdict is a function of these fields and the
/// thresholds alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyDiagnosis {
    pub property: Property,
    /// Radius (or `N`) at which the terminal value is read.
    pub endpoint: f64,
    pub endpoint_value: f64,
    pub max_value: f64,
    pub terminal_ratio: f64,
    /// Least-squares log-log slope near the endpoint; absent when the endpoint value
    /// is zero or too few positive points exist.
    pub slope: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanishingDiagnosis {
    pub v0: PropertyDiagnosis,
    pub vinf: PropertyDiagnosis,
    pub vstar: PropertyDiagnosis,
    pub thresholds: Thresholds,
}

impl VanishingDiagnosis {
    pub fn get(&self, p: Property) -> &PropertyDiagnosis {
        match p {
            Property::V0 => &self.v0,
            Property::VInf => &self.vinf,
            Property::VStar => &self.vstar,
        }
    }
}

fn slope_fit(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0).map(|&(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `sign` is the slope sign expected of a vanishing profile at this end (+1 when values
/// must decrease toward the endpoint from above in `x`, i.e. `x -> 0`; -1 for `x -> inf`).
fn diagnose(
    property: Property,
    series: &[(f64, f64)],
    endpoint: usize,
    window: &[(f64, f64)],
    sign: f64,
    th: &Thresholds,
) -> PropertyDiagnosis {
    let max_value = series.iter().map(|p| p.1).fold(0.0, f64::max);
    let (x_end, endpoint_value) = series[endpoint];
    let terminal_ratio = if max_value == 0.0 { 0.0 } else { endpoint_value / max_value };
    let slope = if endpoint_value == 0.0 { None } else { slope_fit(window) };
    let sign_ok = endpoint_value == 0.0 || slope.is_some_and(|s| s * sign > 0.0);
    let verdict = if terminal_ratio < th.vanishing && sign_ok {
        Verdict::Vanishing
    } else if terminal_ratio > th.non_vanishing {
        Verdict::NonVanishing
    } else {
        Verdict::Inconclusive
    };
    PropertyDiagnosis { property, endpoint: x_end, endpoint_value, max_value, terminal_ratio, slope, verdict }
}

/// Diagnoses the three properties from stored data. `spacing` is the grid spacing `h`.
///
/// - V0 reads the profile at the smallest ladder radius above `h` (the first ball
///   holding more than one cell) and fits the slope over `[r, 4r]`.
/// - VInf reads it at the largest ladder radius within the domain diameter and fits over
///   `[r/4, r]`.
/// - V* reads `A_N` at `N_max` and fits over `[N_max/2, N_max]`.
pub fn diagnose_vanishing(
    profile: &ModularProfile,
    seq: &VStarSequence,
    spacing: f64,
    th: &Thresholds,
) -> VanishingDiagnosis {
    let series: Vec<(f64, f64)> = profile.radii.iter().copied().zip(profile.sup_values.iter().copied()).collect();
    let last = series.len() - 1;
    let small = series.iter().position(|p| p.0 > spacing * (1.0 + 1e-9)).unwrap_or(last);
    let large = series.iter().rposition(|p| p.0 <= profile.tail_from * (1.0 + 1e-9)).unwrap_or(last);
    let r0 = series[small].0;
    let w0: Vec<_> = series.iter().copied().filter(|p| p.0 >= r0 && p.0 <= 4.0 * r0 * (1.0 + 1e-9)).collect();
    let ri = series[large].0;
    let wi: Vec<_> = series.iter().copied().filter(|p| p.0 <= ri && p.0 >= ri / 4.0 * (1.0 - 1e-9)).collect();
    let v0 = diagnose(Property::V0, &series, small, &w0, 1.0, th);
    let vinf = diagnose(Property::VInf, &series, large, &wi, -1.0, th);

    let ns: Vec<(f64, f64)> = seq.n_values.iter().map(|&n| n as f64).zip(seq.a_values.iter().copied()).collect();
    let nlast = ns.len() - 1;
    let half = ns[nlast].0 / 2.0;
    let ws: Vec<_> = ns.iter().copied().filter(|p| p.0 >= half).collect();
    let vstar = diagnose(Property::VStar, &ns, nlast, &ws, -1.0, th);
    VanishingDiagnosis { v0, vinf, vstar, thresholds: *th }
}

/// Default `N_max`: the largest `N` whose ball-sized annulus still fits in the domain.
pub fn default_n_max(half_width: f64, ball_radius: f64) -> u32 {
    ((half_width - 2.0 * ball_radius).floor() as i64).max(1) as u32
}

/// Inputs to [`classify_vanishing`] beyond the function and exponents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanishingOptions {
    pub n_max: Option<u32>,
    pub ball_radius: f64,
    pub thresholds: Thresholds,
}

impl Default for VanishingOptions {
    fn default() -> Self {
        Self { n_max: None, ball_radius: 1.0, thresholds: Thresholds::default() }
    }
}

/// Everything computed for a diagnosis, kept for reporting and CSV export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanishingReport {
    pub params: MorreyParams,
    pub profile: ModularProfile,
    pub vstar_sequence: VStarSequence,
    pub diagnosis: VanishingDiagnosis,
}

pub fn classify_vanishing(
    f: &GridFunction,
    mp: &MorreyParams,
    ladder: &RadiusLadder,
    opts: &VanishingOptions,
    engine: &Engine,
) -> Result<VanishingReport> {
    let spec = f.spec();
    let profile = modular::modular_profile_with(f, mp, ladder, engine)?;
    let n_max = opts.n_max.unwrap_or_else(|| default_n_max(spec.half_width(), opts.ball_radius));
    let seq = modular::vstar_sequence(f, mp.p, n_max, opts.ball_radius)?;
    let diagnosis = diagnose_vanishing(&profile, &seq, spec.spacing(), &opts.thresholds);
    Ok(VanishingReport { params: *mp, profile, vstar_sequence: seq, diagnosis })
}
