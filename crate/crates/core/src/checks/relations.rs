use serde::{Deserialize, Serialize};

use crate::error::{MorreyError, Result};
use crate::modular::MorreyParams;

const REL_TOL: f64 = 1e-9;

/// The two exponent regimes for `I^alpha` between Morrey spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentRegime {
    /// `1/q = 1/p - alpha/n`, `lambda/p = mu/q`, `lambda < n - alpha p`.
    Spanne,
    /// `mu = lambda`, `1/q = 1/p - alpha/(n - lambda)`, `p < (n - lambda)/alpha`.
    Adams,
}

impl ExponentRegime {
    /// Output exponents `(q, mu)` determined by the regime, without validation.
    pub fn output(self, n: f64, alpha: f64, p: f64, lambda: f64) -> (f64, f64) {
        match self {
            Self::Spanne => {
                let q = 1.0 / (1.0 / p - alpha / n);
                (q, lambda * q / p)
            }
            Self::Adams => (1.0 / (1.0 / p - alpha / (n - lambda)), lambda),
        }
    }

    /// Completes `mp` with the regime's output pair and validates it.
    pub fn params(self, n: usize, alpha: f64, p: f64, lambda: f64) -> Result<MorreyParams> {
        let (q, mu) = self.output(n as f64, alpha, p, lambda);
        let mp = MorreyParams::new(p, lambda).with_output(q, mu);
        self.check(n, alpha, &mp)?;
        Ok(mp)
    }

    /// Verifies every relation of the regime, naming the first one that fails.
    pub fn check(self, n: usize, alpha: f64, mp: &MorreyParams) -> Result<()> {
        let nf = n as f64;
        let (p, lambda) = (mp.p, mp.lambda);
        let fail = |what: String| Err(MorreyError::ExponentRelation(what));
        if !(alpha > 0.0 && alpha < nf) {
            return fail(format!("0 < alpha < n (alpha = {alpha}, n = {n})"));
        }
        if !(p > 1.0) {
            return fail(format!("p > 1 (p = {p})"));
        }
        if !(0.0..nf).contains(&lambda) {
            return fail(format!("0 <= lambda < n (lambda = {lambda})"));
        }
        let (Some(q), Some(mu)) = (mp.q, mp.mu) else {
            return fail("output exponents (q, mu) must be given".into());
        };
        let close = |a: f64, b: f64| (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0);
        match self {
            Self::Spanne => {
                if !(lambda < nf - alpha * p) {
                    return fail(format!("lambda < n - alpha p ({lambda} >= {})", nf - alpha * p));
                }
                if !close(1.0 / q, 1.0 / p - alpha / nf) {
                    return fail(format!("1/q = 1/p - alpha/n ({} vs {})", 1.0 / q, 1.0 / p - alpha / nf));
                }
                if !close(lambda / p, mu / q) {
                    return fail(format!("lambda/p = mu/q ({} vs {})", lambda / p, mu / q));
                }
            }
            Self::Adams => {
                if !(p < (nf - lambda) / alpha) {
                    return fail(format!("p < (n - lambda)/alpha ({p} >= {})", (nf - lambda) / alpha));
                }
                if !close(mu, lambda) {
                    return fail(format!("mu = lambda ({mu} vs {lambda})"));
                }
                let rhs = 1.0 / p - alpha / (nf - lambda);
                if !close(1.0 / q, rhs) {
                    return fail(format!("1/q = 1/p - alpha/(n - lambda) ({} vs {rhs})", 1.0 / q));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn message(r: Result<()>) -> String {
        match r {
            Err(MorreyError::ExponentRelation(m)) => m,
            other => panic!("expected relation error, got {other:?}"),
        }
    }

    #[test]
    fn spanne_output_and_violations() {
        let mp = ExponentRegime::Spanne.params(1, 0.25, 2.0, 0.4).unwrap();
        assert!((mp.q.unwrap() - 4.0).abs() < 1e-12);
        assert!((mp.mu.unwrap() - 0.8).abs() < 1e-12);
        let m = message(ExponentRegime::Spanne.check(1, 0.25, &MorreyParams::new(2.0, 0.6).with_output(4.0, 1.2)));
        assert!(m.contains("lambda < n - alpha p"), "{m}");
        let m = message(ExponentRegime::Spanne.check(1, 0.25, &MorreyParams::new(2.0, 0.4).with_output(4.0, 0.5)));
        assert!(m.contains("lambda/p = mu/q"), "{m}");
        let m = message(ExponentRegime::Spanne.check(1, 0.25, &MorreyParams::new(2.0, 0.4).with_output(3.0, 0.6)));
        assert!(m.contains("1/q = 1/p - alpha/n"), "{m}");
    }

    #[test]
    fn adams_output_and_violations() {
        let mp = ExponentRegime::Adams.params(1, 0.1, 2.0, 0.5).unwrap();
        assert!((mp.q.unwrap() - 10.0 / 3.0).abs() < 1e-12);
        assert_eq!(mp.mu, Some(0.5));
        // 1/q = 1/2 - 1/4 / (1/2) = 0 has no admissible q
        assert!(ExponentRegime::Adams.params(1, 0.25, 2.0, 0.5).is_err());
        let m = message(ExponentRegime::Adams.check(1, 0.1, &MorreyParams::new(2.0, 0.5).with_output(10.0 / 3.0, 0.4)));
        assert!(m.contains("mu = lambda"), "{m}");
        let m = message(ExponentRegime::Adams.check(1, 0.1, &MorreyParams::new(2.0, 0.5)));
        assert!(m.contains("(q, mu)"), "{m}");
    }
}
