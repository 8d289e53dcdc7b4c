use serde::{Deserialize, Serialize};

use super::relations::ExponentRegime;
use super::vanishing::{Property, VanishingOptions, VanishingReport, Verdict, classify_vanishing};
use crate::error::{MorreyError, Result};
use crate::grid::GridFunction;
use crate::modular::{MorreyParams, RadiusLadder};
use crate::operators::{OperatorSpec, apply};
use crate::stencil::Engine;

/// How a property is treated for a given operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coverage {
    /// A boundedness theorem covers the property: it must be preserved.
    Asserted,
    /// The operator maps every Morrey input into the property (upper Hardy operator, V*).
    MapsInto,
    /// No theorem is known; computed and reported without a verdict.
    Exploratory,
    NotCovered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Preserved,
    NotPreserved,
    /// The input lacks the property, so nothing is claimed.
    InputNotVanishing,
    Exploratory,
    NotCovered,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyOutcome {
    pub property: Property,
    pub coverage: Coverage,
    pub input: Verdict,
    pub output: Verdict,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreservationReport {
    pub operator: OperatorSpec,
    pub label: String,
    pub regimes: Vec<ExponentRegime>,
    pub in_params: MorreyParams,
    pub out_params: MorreyParams,
    pub input: VanishingReport,
    pub output: VanishingReport,
    pub outcomes: Vec<PropertyOutcome>,
    pub verdict: String,
    pub pass: bool,
}

fn potential_type(op: &OperatorSpec) -> bool {
    matches!(op, OperatorSpec::Riesz { .. } | OperatorSpec::FracMaximal { .. })
        || matches!(op, OperatorSpec::HardyLower { alpha } | OperatorSpec::HardyUpper { alpha } if *alpha > 0.0)
}

fn coverage(op: &OperatorSpec, regimes: &[ExponentRegime], p: Property) -> Coverage {
    use Coverage::*;
    use Property::*;
    match op {
        OperatorSpec::Maximal | OperatorSpec::SharpMaximal => Asserted,
        OperatorSpec::HardyLower { alpha } if *alpha == 0.0 => Asserted,
        OperatorSpec::HardyUpper { alpha } if *alpha == 0.0 => {
            if p == VStar {
                MapsInto
            } else {
                Asserted
            }
        }
        OperatorSpec::TruncatedSingular { .. } => {
            if p == VStar {
                Exploratory
            } else {
                Asserted
            }
        }
        OperatorSpec::HybridK { .. } | OperatorSpec::HybridCalK { .. } => {
            if p == VInf {
                Asserted
            } else {
                NotCovered
            }
        }
        _ => {
            let adams = regimes.contains(&ExponentRegime::Adams);
            match p {
                V0 | VInf => Asserted,
                VStar if adams => Asserted,
                VStar => NotCovered,
            }
        }
    }
}

/// Validates the exponents against the theorem for `op` and returns the regimes that
/// apply (empty for operators acting on a single space).
pub fn applicable_regimes(
    op: &OperatorSpec,
    dim: usize,
    in_params: &MorreyParams,
    out_params: &MorreyParams,
) -> Result<Vec<ExponentRegime>> {
    let n = dim as f64;
    let (p, lambda) = (in_params.p, in_params.lambda);
    if !(p > 1.0) {
        return Err(MorreyError::ExponentRelation(format!("1 < p (p = {p})")));
    }
    if !(0.0..n).contains(&lambda) {
        return Err(MorreyError::ExponentRelation(format!("0 <= lambda < n (lambda = {lambda})")));
    }
    if !potential_type(op) {
        if out_params.p != p || out_params.lambda != lambda {
            return Err(MorreyError::ExponentRelation(format!(
                "(q, mu) = (p, lambda) for an operator bounded on one space, got ({}, {}) vs ({p}, {lambda})",
                out_params.p, out_params.lambda
            )));
        }
        return Ok(Vec::new());
    }
    let mp = MorreyParams::new(p, lambda).with_output(out_params.p, out_params.lambda);
    let alpha = op.order();
    let mut regimes = Vec::new();
    let mut reasons = Vec::new();
    for regime in [ExponentRegime::Spanne, ExponentRegime::Adams] {
        match regime.check(dim, alpha, &mp) {
            Ok(()) => regimes.push(regime),
            Err(MorreyError::ExponentRelation(m)) => reasons.push(format!("{regime:?}: {m}")),
            Err(e) => return Err(e),
        }
    }
    if regimes.is_empty() {
        return Err(MorreyError::ExponentRelation(reasons.join("; ")));
    }
    Ok(regimes)
}

/// Classifies `f` in `in_params` and `op f` in `out_params` and compares verdicts on the
/// properties the relevant theorems cover.
pub fn preservation_report(
    f: &GridFunction,
    op: &OperatorSpec,
    in_params: &MorreyParams,
    out_params: &MorreyParams,
    ladder: &RadiusLadder,
    opts: &VanishingOptions,
    engine: &Engine,
) -> Result<PreservationReport> {
    let regimes = applicable_regimes(op, f.spec().dim(), in_params, out_params)?;
    let tf = apply(f, op, ladder, engine)?;
    let input = classify_vanishing(f, in_params, ladder, opts, engine)?;
    let output = classify_vanishing(&tf, out_params, ladder, opts, engine)?;
    let mut outcomes = Vec::new();
    for property in [Property::V0, Property::VInf, Property::VStar] {
        let cov = coverage(op, &regimes, property);
        let vin = input.diagnosis.get(property).verdict;
        let vout = output.diagnosis.get(property).verdict;
        let ok = if vout == Verdict::Vanishing { Status::Preserved } else { Status::NotPreserved };
        let status = match cov {
            Coverage::NotCovered => Status::NotCovered,
            Coverage::Exploratory => Status::Exploratory,
            Coverage::MapsInto => ok,
            Coverage::Asserted if vin != Verdict::Vanishing => Status::InputNotVanishing,
            Coverage::Asserted => ok,
        };
        outcomes.push(PropertyOutcome { property, coverage: cov, input: vin, output: vout, status });
    }
    let pass = outcomes.iter().all(|o| o.status != Status::NotPreserved);
    Ok(PreservationReport {
        operator: op.clone(),
        label: op.label(),
        regimes,
        in_params: *in_params,
        out_params: *out_params,
        input,
        output,
        outcomes,
        verdict: if pass { "preserved" } else { "not-preserved" }.into(),
        pass,
    })
}

impl PreservationReport {
    pub fn outcome(&self, p: Property) -> &PropertyOutcome {
        self.outcomes.iter().find(|o| o.property == p).expect("all properties present")
    }
}
