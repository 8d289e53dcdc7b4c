use serde::{Deserialize, Serialize};

use crate::error::{Result, invalid};
use crate::grid::{FamilyDescriptor, GridSpec, dilate_family, synthesize};
use crate::modular::{MorreyParams, RadiusLadder, morrey_norm_with};
use crate::stencil::Engine;

pub const SCALING_TOL: f64 = 0.02;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub family: FamilyDescriptor,
    pub t: f64,
    pub params: MorreyParams,
    pub cells_per_axis: usize,
    pub norm_base: f64,
    pub norm_dilated: f64,
    /// `||f(t.)|| / ||f||`.
    pub measured: f64,
    /// `t^{(lambda - n)/p}`.
    pub predicted: f64,
    /// `|measured / predicted - 1|`.
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn check_scaling(
    spec: &GridSpec,
    family: &FamilyDescriptor,
    t: f64,
    mp: &MorreyParams,
    ladder: &RadiusLadder,
    engine: &Engine,
) -> Result<ScalingReport> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("dilation must be positive, got {t}")));
    }
    mp.validate(spec.dim())?;
    let base = synthesize(*spec, family)?;
    let dilated = synthesize(*spec, &dilate_family(family, t)?)?;
    let norm_base = morrey_norm_with(&base, mp, ladder, engine)?;
    let norm_dilated = morrey_norm_with(&dilated, mp, ladder, engine)?;
    if norm_base == 0.0 {
        return Err(invalid("family has zero norm on this grid"));
    }
    let measured = norm_dilated / norm_base;
    let predicted = t.powf((mp.lambda - spec.dim() as f64) / mp.p);
    let deviation = (measured / predicted - 1.0).abs();
    Ok(ScalingReport {
        family: family.clone(),
        t,
        params: *mp,
        cells_per_axis: spec.cells_per_axis(),
        norm_base,
        norm_dilated,
        measured,
        predicted,
        deviation,
        tolerance: SCALING_TOL,
        pass: deviation <= SCALING_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Family;

    fn gaussian() -> FamilyDescriptor {
        FamilyDescriptor::new(Family::Gaussian { center: vec![0.0], width: 1.0, height: 1.0 })
    }

    #[test]
    fn identity_dilation_is_exact() {
        let spec = GridSpec::new(1, 8.0, 512).unwrap();
        let mp = MorreyParams::new(2.0, 0.5);
        let r =
            check_scaling(&spec, &gaussian(), 1.0, &mp, &RadiusLadder::covering(&spec), &Engine::default()).unwrap();
        assert_eq!(r.measured, 1.0);
        assert_eq!(r.deviation, 0.0);
    }

    #[test]
    fn full_lambda_predicts_one() {
        let spec = GridSpec::new(1, 8.0, 512).unwrap();
        let mp = MorreyParams::new(2.0, 1.0);
        let r =
            check_scaling(&spec, &gaussian(), 2.0, &mp, &RadiusLadder::covering(&spec), &Engine::default()).unwrap();
        assert_eq!(r.predicted, 1.0);
    }

    #[test]
    fn gaussian_scaling_within_tolerance() {
        let spec = GridSpec::new(1, 8.0, 4096).unwrap();
        let mp = MorreyParams::new(2.0, 0.5);
        let r =
            check_scaling(&spec, &gaussian(), 2.0, &mp, &RadiusLadder::covering(&spec), &Engine::default()).unwrap();
        assert!((r.predicted - 2f64.powf(-0.25)).abs() < 1e-15);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn rejects_bad_dilation() {
        let spec = GridSpec::new(1, 8.0, 64).unwrap();
        let mp = MorreyParams::new(2.0, 0.5);
        assert!(
            check_scaling(&spec, &gaussian(), 0.0, &mp, &RadiusLadder::covering(&spec), &Engine::default()).is_err()
        );
    }
}
