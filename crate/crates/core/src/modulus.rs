//! Moduli of continuity.
//!
//! A modulus `ω` is continuous, nondecreasing and concave on `[0, ∞)` with
//! `ω(0) = 0`. Every constructor here returns a finite-valued modulus; the
//! pipeline only ever evaluates `ω` on `[0, diam K]`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Tolerance used by [`Modulus::validate`] for slope and ratio comparisons.
pub const VALIDATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ModulusKind {
    /// `t^alpha`, `alpha ∈ (0, 1]`.
    Power { alpha: f64 },
    /// `t`.
    Linear,
    /// `t (1 + ln(1/t))` on `[0, 1]`, constant `1` beyond.
    LogLipschitz,
    /// Linear interpolation of `(t, ω(t))` knots starting at `(0, 0)`;
    /// extrapolated past the last knot with the last slope.
    Piecewise { knots: Vec<(f64, f64)> },
}

/// A modulus of continuity, optionally raised to a power `exponent ∈ (0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Modulus {
    kind: ModulusKind,
    exponent: f64,
}

impl Modulus {
    pub fn linear() -> Self {
        Self { kind: ModulusKind::Linear, exponent: 1.0 }
    }

    pub fn power(alpha: f64) -> Result<Self> {
        check_exponent(alpha)?;
        Ok(Self { kind: ModulusKind::Power { alpha }, exponent: 1.0 })
    }

    pub fn log_lipschitz() -> Self {
        Self { kind: ModulusKind::LogLipschitz, exponent: 1.0 }
    }

    /// Piecewise-linear modulus through `knots`.
    ///
    /// Knots must start at `(0, 0)`, have strictly increasing abscissae and
    /// finite nonnegative values, and not be identically zero. Concavity is
    /// not enforced here; use [`Modulus::validate`].
    pub fn piecewise(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return domain("piecewise modulus needs at least two knots");
        }
        if knots[0] != (0.0, 0.0) {
            return domain("piecewise modulus must start at the knot (0, 0)");
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) || !w[1].0.is_finite() {
                return domain("piecewise knot abscissae must be finite and strictly increasing");
            }
        }
        if knots.iter().any(|&(_, v)| !v.is_finite() || v < 0.0) {
            return domain("piecewise knot values must be finite and nonnegative");
        }
        if knots.iter().all(|&(_, v)| v == 0.0) {
            return domain("modulus must not be identically zero");
        }
        Ok(Self { kind: ModulusKind::Piecewise { knots }, exponent: 1.0 })
    }

    pub fn kind(&self) -> &ModulusKind {
        &self.kind
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// `t ↦ ω(t)^alpha`, again a modulus for `alpha ∈ (0, 1]`.
    pub fn powered(&self, alpha: f64) -> Result<Self> {
        check_exponent(alpha)?;
        Ok(Self { kind: self.kind.clone(), exponent: self.exponent * alpha })
    }

    /// `ω(t)`; errors on negative or non-finite `t`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return domain(format!("modulus evaluated at invalid t = {t}"));
        }
        Ok(self.at(t))
    }

    /// Unchecked evaluation for `t ≥ 0`.
    pub fn at(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0, "modulus evaluated at negative t = {t}");
        if t == 0.0 {
            return 0.0;
        }
        let base = match &self.kind {
            ModulusKind::Linear => t,
            ModulusKind::Power { alpha } => t.powf(*alpha),
            ModulusKind::LogLipschitz => {
                if t >= 1.0 {
                    1.0
                } else {
                    t * (1.0 - t.ln())
                }
            }
            ModulusKind::Piecewise { knots } => piecewise_eval(knots, t),
        };
        if self.exponent == 1.0 {
            base
        } else {
            base.powf(self.exponent)
        }
    }

    /// Checks monotonicity, concavity and `ω(t)/t` nonincreasing on `grid`.
    ///
    /// The point `t = 0` (where `ω = 0`) is prepended to the grid for the
    /// monotonicity and concavity checks.
    pub fn validate(&self, grid: &[f64]) -> Result<ValidationReport> {
        if grid.is_empty() {
            return domain("validation grid is empty");
        }
        if grid.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
            return domain("validation grid entries must be positive and finite");
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("validation grid must be strictly increasing");
        }
        let mut ts = Vec::with_capacity(grid.len() + 1);
        ts.push(0.0);
        ts.extend_from_slice(grid);
        let ws: Vec<f64> = ts.iter().map(|&t| self.at(t)).collect();

        let mut monotone = Check::default();
        for i in 0..ts.len() - 1 {
            let drop = ws[i] - ws[i + 1];
            if drop > monotone.magnitude {
                monotone.magnitude = drop;
                monotone.witness = vec![ts[i], ts[i + 1]];
            }
        }
        monotone.passed = monotone.magnitude <= VALIDATION_TOL * (1.0 + ws[ws.len() - 1].abs());

        let mut concave = Check::default();
        for i in 0..ts.len().saturating_sub(2) {
            let s1 = (ws[i + 1] - ws[i]) / (ts[i + 1] - ts[i]);
            let s2 = (ws[i + 2] - ws[i + 1]) / (ts[i + 2] - ts[i + 1]);
            let excess = (s2 - s1) / s1.abs().max(1.0);
            if excess > concave.magnitude {
                concave.magnitude = excess;
                concave.witness = vec![ts[i], ts[i + 1], ts[i + 2]];
            }
        }
        concave.passed = concave.magnitude <= VALIDATION_TOL;

        let mut ratio = Check::default();
        for w in grid.windows(2) {
            let (rx, ry) = (self.at(w[0]) / w[0], self.at(w[1]) / w[1]);
            let excess = (ry - rx) / ry.abs().max(1.0);
            if excess > ratio.magnitude {
                ratio.magnitude = excess;
                ratio.witness = vec![w[0], w[1]];
            }
        }
        ratio.passed = ratio.magnitude <= VALIDATION_TOL;

        Ok(ValidationReport {
            passed: monotone.passed && concave.passed && ratio.passed,
            monotone,
            concave,
            ratio_nonincreasing: ratio,
        })
    }

    /// 512 geometric points spanning `[1e-9, t_max]`.
    pub fn default_grid(t_max: f64) -> Vec<f64> {
        let lo: f64 = 1e-9;
        let hi = t_max.max(2.0 * lo);
        let n = 512;
        let ratio = (hi / lo).ln() / (n - 1) as f64;
        (0..n).map(|i| lo * (ratio * i as f64).exp()).collect()
    }
}

fn check_exponent(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        domain(format!("exponent {alpha} outside (0, 1]"))
    }
}

fn piecewise_eval(knots: &[(f64, f64)], t: f64) -> f64 {
    let idx = knots.partition_point(|&(x, _)| x <= t);
    let j = idx.clamp(1, knots.len() - 1);
    let (x0, y0) = knots[j - 1];
    let (x1, y1) = knots[j];
    let slope = (y1 - y0) / (x1 - x0);
    (y0 + slope * (t - x0)).max(0.0)
}

/// One pass/fail line of a [`ValidationReport`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Check {
    pub passed: bool,
    /// The worst violating pair or triple of grid points (empty if none).
    pub witness: Vec<f64>,
    /// Size of the worst violation (0 if none).
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub monotone: Check,
    pub concave: Check,
    pub ratio_nonincreasing: Check,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModulus {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    knots: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exponent: Option<f64>,
}

impl TryFrom<RawModulus> for Modulus {
    type Error = Error;

    fn try_from(raw: RawModulus) -> Result<Self> {
        let base = match raw.kind.as_str() {
            "linear" => Modulus::linear(),
            "power" => {
                let alpha = raw.alpha.ok_or_else(|| Error::Schema("power modulus needs \"alpha\"".into()))?;
                Modulus::power(alpha)?
            }
            "log_lipschitz" => Modulus::log_lipschitz(),
            "piecewise" => {
                let knots = raw.knots.ok_or_else(|| Error::Schema("piecewise modulus needs \"knots\"".into()))?;
                Modulus::piecewise(knots.into_iter().map(|[t, w]| (t, w)).collect())?
            }
            other => return Err(Error::Schema(format!("unknown modulus kind {other:?}"))),
        };
        match raw.exponent {
            Some(e) => base.powered(e),
            None => Ok(base),
        }
    }
}

impl From<&Modulus> for RawModulus {
    fn from(m: &Modulus) -> Self {
        let mut raw = RawModulus { kind: String::new(), alpha: None, knots: None, exponent: None };
        match &m.kind {
            ModulusKind::Linear => raw.kind = "linear".into(),
            ModulusKind::Power { alpha } => {
                raw.kind = "power".into();
                raw.alpha = Some(*alpha);
            }
            ModulusKind::LogLipschitz => raw.kind = "log_lipschitz".into(),
            ModulusKind::Piecewise { knots } => {
                raw.kind = "piecewise".into();
                raw.knots = Some(knots.iter().map(|&(t, w)| [t, w]).collect());
            }
        }
        if m.exponent != 1.0 {
            raw.exponent = Some(m.exponent);
        }
        raw
    }
}

impl Serialize for Modulus {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawModulus::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Modulus {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawModulus::deserialize(d)?;
        Modulus::try_from(raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        assert_eq!(Modulus::power(1.0).unwrap().eval(0.25).unwrap(), 0.25);
        assert_eq!(Modulus::linear().eval(0.25).unwrap(), 0.25);
        assert!((Modulus::power(0.5).unwrap().eval(0.04).unwrap() - 0.2).abs() < 1e-15);
        for m in [
            Modulus::linear(),
            Modulus::power(0.3).unwrap(),
            Modulus::log_lipschitz(),
            Modulus::piecewise(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap(),
        ] {
            assert_eq!(m.eval(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn negative_argument_is_domain_error() {
        assert!(matches!(Modulus::linear().eval(-1e-3), Err(Error::Domain(_))));
    }

    #[test]
    fn powered_examples() {
        let lin = Modulus::linear();
        assert_eq!(lin.powered(0.5).unwrap().at(0.25), 0.5);
        let same = lin.powered(1.0).unwrap();
        for t in [1e-6, 0.1, 0.7, 1.3] {
            assert_eq!(same.at(t), lin.at(t));
        }
        let root = Modulus::power(0.5).unwrap().powered(0.5).unwrap();
        let direct = Modulus::power(0.25).unwrap();
        assert!((root.at(1e-4) - 0.1).abs() < 1e-15);
        assert!((root.at(1e-4) - direct.at(1e-4)).abs() < 1e-15);
        assert!(matches!(lin.powered(1.5), Err(Error::Domain(_))));
        assert!(matches!(lin.powered(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn validate_examples() {
        let grid: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        let rep = Modulus::power(0.5).unwrap().validate(&grid).unwrap();
        assert!(rep.passed);
        let ratios: Vec<f64> = grid.iter().map(|&t| t.sqrt() / t).collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]));

        let good = Modulus::piecewise(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 1.5)]).unwrap();
        assert!(good.validate(&[0.5, 1.0, 1.5, 2.0]).unwrap().passed);

        let bad = Modulus::piecewise(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 3.0)]).unwrap();
        let rep = bad.validate(&[1.0, 2.0]).unwrap();
        assert!(!rep.concave.passed);
        assert_eq!(rep.concave.witness, vec![0.0, 1.0, 2.0]);
        assert!((rep.concave.magnitude - 1.0).abs() < 1e-15);
        assert!(matches!(good.validate(&[]), Err(Error::Domain(_))));
    }

    #[test]
    fn log_lipschitz_is_valid_modulus() {
        let m = Modulus::log_lipschitz();
        assert!(m.validate(&Modulus::default_grid(2.0)).unwrap().passed);
        assert_eq!(m.at(1.0), 1.0);
        assert_eq!(m.at(3.0), 1.0);
    }

    #[test]
    fn json_fragments() {
        let m: Modulus = serde_json::from_str(r#"{"kind": "power", "alpha": 0.5}"#).unwrap();
        assert_eq!(m, Modulus::power(0.5).unwrap());
        let m: Modulus = serde_json::from_str(r#"{"kind": "linear"}"#).unwrap();
        assert_eq!(m, Modulus::linear());
        let m: Modulus = serde_json::from_str(r#"{"kind": "piecewise", "knots": [[0,0],[1,1],[2,1.5]]}"#).unwrap();
        assert_eq!(m.at(1.5), 1.25);
        assert!(serde_json::from_str::<Modulus>(r#"{"kind": "linear", "beta": 1}"#).is_err());
        assert!(serde_json::from_str::<Modulus>(r#"{"kind": "power", "alpha": 2.0}"#).is_err());
        let round: Modulus = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(round, m);
    }

    proptest::proptest! {
        #[test]
        fn ratio_nonincreasing(alpha in 0.05f64..=1.0, x in 1e-8f64..2.0, y in 1e-8f64..2.0) {
            let (x, y) = if x < y { (x, y) } else { (y, x) };
            for m in [Modulus::power(alpha).unwrap(), Modulus::log_lipschitz(), Modulus::linear()] {
                proptest::prop_assert!(m.at(x) / x >= m.at(y) / y - 1e-12 * (m.at(y) / y).max(1.0));
            }
        }

        #[test]
        fn powered_stays_valid(base_alpha in 0.1f64..=1.0, alpha in 0.05f64..=1.0) {
            let grid = Modulus::default_grid(1.5);
            for base in [Modulus::power(base_alpha).unwrap(), Modulus::log_lipschitz()] {
                if base.validate(&grid).unwrap().passed {
                    proptest::prop_assert!(base.powered(alpha).unwrap().validate(&grid).unwrap().passed);
                }
            }
        }
    }
}
