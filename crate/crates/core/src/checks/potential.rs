use serde::{Deserialize, Serialize};

use super::relations::ExponentRegime;
use crate::error::Result;
use crate::grid::{FamilyDescriptor, GridFunction, GridSpec, dilate_family, synthesize};
use crate::modular::{MorreyParams, RadiusLadder, morrey_norm_with};
use crate::operators::{SelfCell, maximal_with, riesz_with};
use crate::stencil::Engine;

pub const HEDBERG_SPREAD_TOL: f64 = 0.25;
pub const HEDBERG_DILATION_TOL: f64 = 0.10;
pub const RATIO_SPREAD_TOL: f64 = 1.10;

/// `c_emp = max |I^a f| / ((Mf)^{p/q} ||f||_{p,lambda}^{1-p/q})` over cells with `Mf > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedConstantReport {
    pub label: String,
    pub cells_per_axis: usize,
    pub alpha: f64,
    pub params: MorreyParams,
    /// Absent when no cell has `Mf > 0`.
    pub c_emp: Option<f64>,
    pub argmax: Option<usize>,
    pub valid_cells: usize,
    pub excluded_cells: usize,
}

pub fn hedberg_report(
    f: &GridFunction,
    alpha: f64,
    mp: &MorreyParams,
    ladder: &RadiusLadder,
    engine: &Engine,
    label: &str,
) -> Result<FittedConstantReport> {
    let spec = f.spec();
    ExponentRegime::Adams.check(spec.dim(), alpha, mp)?;
    let q = mp.q.expect("checked");
    let ia = riesz_with(f, alpha, SelfCell::Ball, engine)?;
    let mf = maximal_with(f, ladder, engine)?;
    let norm = morrey_norm_with(f, &MorreyParams::new(mp.p, mp.lambda), ladder, engine)?;
    let e = mp.p / q;
    let scale = norm.powf(1.0 - e);
    let (mut best, mut arg, mut valid) = (0.0f64, None, 0usize);
    for (x, (&i, &m)) in ia.values().iter().zip(mf.values()).enumerate() {
        if m > 0.0 {
            valid += 1;
            let c = i.abs() / (m.powf(e) * scale);
            if arg.is_none() || c > best {
                best = c;
                arg = Some(x);
            }
        }
    }
    Ok(FittedConstantReport {
        label: label.into(),
        cells_per_axis: spec.cells_per_axis(),
        alpha,
        params: *mp,
        c_emp: arg.map(|_| best),
        argmax: arg,
        valid_cells: valid,
        excluded_cells: spec.len() - valid,
    })
}

/// `max/min - 1` over present constants; 0 when fewer than two exist.
pub fn relative_spread(values: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    if v.len() < 2 {
        return 0.0;
    }
    let hi = v.iter().copied().fold(f64::MIN, f64::max);
    let lo = v.iter().copied().fold(f64::MAX, f64::min);
    hi / lo - 1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HedbergSuiteReport {
    pub families: Vec<FittedConstantReport>,
    /// Spread over every family at both resolutions.
    pub spread: f64,
    pub dilations: Vec<f64>,
    pub dilation_reports: Vec<FittedConstantReport>,
    pub dilation_spread: f64,
    pub spread_tolerance: f64,
    pub dilation_tolerance: f64,
    pub pass: bool,
}

/// Fits the constant for each family on `spec` and on the grid with half as many cells,
/// then sweeps `dilations` of the first family on `spec`.
pub fn hedberg_suite(
    spec: &GridSpec,
    families: &[(String, FamilyDescriptor)],
    dilations: &[f64],
    alpha: f64,
    mp: &MorreyParams,
    engine: &Engine,
) -> Result<HedbergSuiteReport> {
    let coarse = GridSpec::new(spec.dim(), spec.half_width(), spec.cells_per_axis() / 2)?;
    let mut reports = Vec::new();
    for grid in [coarse, *spec] {
        let ladder = RadiusLadder::covering(&grid);
        for (label, fd) in families {
            let f = synthesize(grid, fd)?;
            reports.push(hedberg_report(&f, alpha, mp, &ladder, engine, label)?);
        }
    }
    let ladder = RadiusLadder::covering(spec);
    let mut dilation_reports = Vec::new();
    if let Some((label, fd)) = families.first() {
        for &t in dilations {
            let f = synthesize(*spec, &dilate_family(fd, t)?)?;
            dilation_reports.push(hedberg_report(&f, alpha, mp, &ladder, engine, &format!("{label} t={t}"))?);
        }
    }
    let spread = relative_spread(reports.iter().filter_map(|r| r.c_emp));
    let dilation_spread = relative_spread(dilation_reports.iter().filter_map(|r| r.c_emp));
    Ok(HedbergSuiteReport {
        families: reports,
        spread,
        dilations: dilations.to_vec(),
        dilation_reports,
        dilation_spread,
        spread_tolerance: HEDBERG_SPREAD_TOL,
        dilation_tolerance: HEDBERG_DILATION_TOL,
        pass: spread <= HEDBERG_SPREAD_TOL && dilation_spread <= HEDBERG_DILATION_TOL,
    })
}

/// `R(t) = ||I^a f_t||_{q,mu} / ||f_t||_{p,lambda}` over a dilation sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub family: FamilyDescriptor,
    pub regime: ExponentRegime,
    pub alpha: f64,
    pub params: MorreyParams,
    pub cells_per_axis: usize,
    pub t_list: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `max R / min R`.
    pub spread: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn exponent_ratio_report(
    spec: &GridSpec,
    family: &FamilyDescriptor,
    t_list: &[f64],
    alpha: f64,
    regime: ExponentRegime,
    mp: &MorreyParams,
    engine: &Engine,
) -> Result<RatioReport> {
    regime.check(spec.dim(), alpha, mp)?;
    let out = mp.output().expect("checked");
    let inp = MorreyParams::new(mp.p, mp.lambda);
    let ladder = RadiusLadder::covering(spec);
    let mut ratios = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let f = synthesize(*spec, &dilate_family(family, t)?)?;
        let ia = riesz_with(&f, alpha, SelfCell::Ball, engine)?;
        let num = morrey_norm_with(&ia, &out, &ladder, engine)?;
        let den = morrey_norm_with(&f, &inp, &ladder, engine)?;
        ratios.push(num / den);
    }
    let hi = ratios.iter().copied().fold(f64::MIN, f64::max);
    let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
    let spread = if ratios.is_empty() { 1.0 } else { hi / lo };
    Ok(RatioReport {
        family: family.clone(),
        regime,
        alpha,
        params: *mp,
        cells_per_axis: spec.cells_per_axis(),
        t_list: t_list.to_vec(),
        ratios,
        spread,
        tolerance: RATIO_SPREAD_TOL,
        pass: spread <= RATIO_SPREAD_TOL,
    })
}
