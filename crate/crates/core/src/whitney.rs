//! One-dimensional Whitney extension across the gaps of `K`.
//!
//! On a gap `(a, b)` the extension is `(1 − θ)T_a + θT_b`, where `T_a`, `T_b`
//! are the order-`m` Taylor polynomials of the endpoint jets and `θ` is the
//! bump-generated smooth step from 0 at `a` to 1 at `b`. All derivatives are
//! evaluated in closed form with the Leibniz rule.

use std::io::Write;

use crate::bump::{blend_derivative, bump_derivative};
use crate::compact::CompactSet;
use crate::error::{domain, Error, Result};
use crate::jet::JetFamily;
use crate::poly::Poly;

/// Non-polynomial factor of a [`Term`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Factor {
    One,
    /// `θ((2x − lo − hi)/(hi − lo))`.
    Blend {
        lo: f64,
        hi: f64,
    },
    /// `φ((x − center)/half_width)`.
    Bump {
        center: f64,
        half_width: f64,
    },
}

impl Factor {
    /// `D^j` of the factor at `x`.
    pub fn derivative(&self, j: usize, x: f64) -> f64 {
        match *self {
            Factor::One => {
                if j == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            Factor::Blend { lo, hi } => {
                let c = 2.0 / (hi - lo);
                let s = (2.0 * x - lo - hi) / (hi - lo);
                c.powi(j as i32) * blend_derivative(j, s)
            }
            Factor::Bump { center, half_width } => {
                half_width.recip().powi(j as i32) * bump_derivative(j, (x - center) / half_width)
            }
        }
    }
}

/// `poly(x − center) · factor(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    center: f64,
    factor: Factor,
    /// `poly, poly′, …` down to the last nonzero derivative.
    derivs: Vec<Poly>,
}

impl Term {
    pub fn new(poly: Poly, center: f64, factor: Factor) -> Self {
        let mut derivs = vec![poly];
        while let Some(d) = derivs.last().filter(|p| !p.is_zero()).map(Poly::derivative) {
            derivs.push(d);
        }
        if derivs.len() > 1 {
            derivs.pop();
        }
        Self { center, factor, derivs }
    }

    pub fn poly(&self) -> &Poly {
        &self.derivs[0]
    }

    pub fn factor(&self) -> Factor {
        self.factor
    }

    fn scaled(&self, s: f64) -> Self {
        Self::new(self.derivs[0].scale(s), self.center, self.factor)
    }

    fn derivative(&self, k: usize, x: f64) -> f64 {
        let t = x - self.center;
        if self.factor == Factor::One {
            return self.derivs.get(k).map_or(0.0, |p| p.eval(t));
        }
        let mut sum = 0.0;
        let mut binom = 1.0;
        for j in 0..=k {
            if j > 0 {
                binom = binom * (k + 1 - j) as f64 / j as f64;
            }
            let Some(p) = self.derivs.get(k - j) else { continue };
            let pv = p.eval(t);
            if pv != 0.0 {
                sum += binom * pv * self.factor.derivative(j, x);
            }
        }
        sum
    }
}

/// A smooth function on `[lo, hi]` given as a sum of [`Term`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothPiece {
    lo: f64,
    hi: f64,
    terms: Vec<Term>,
}

impl SmoothPiece {
    pub fn zero(lo: f64, hi: f64) -> Self {
        Self { lo, hi, terms: Vec::new() }
    }

    pub fn from_terms(lo: f64, hi: f64, terms: Vec<Term>) -> Self {
        Self { lo, hi, terms }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.poly().is_zero())
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    /// `D^k` at `x`, summed term by term in order.
    pub fn derivative(&self, k: usize, x: f64) -> f64 {
        self.terms.iter().map(|t| t.derivative(k, x)).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { lo: self.lo, hi: self.hi, terms: self.terms.iter().map(|t| t.scaled(s)).collect() }
    }

    /// Sum of two pieces on the same domain.
    pub fn add(&self, other: &SmoothPiece) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { lo: self.lo, hi: self.hi, terms }
    }
}

/// `(1 − θ)T_a + θT_b` on `[a, b]`, matching both jets exactly.
pub fn whitney_extend_gap(jet_left: &[f64], jet_right: &[f64], a: f64, b: f64) -> Result<SmoothPiece> {
    if !(a < b) {
        return domain(format!("gap needs a < b, got ({a}, {b})"));
    }
    if jet_left.len() != jet_right.len() || jet_left.is_empty() {
        return domain("endpoint jets must have the same nonzero length");
    }
    let ta = Poly::taylor_local(jet_left)?;
    let tb = Poly::taylor_local(jet_right)?;
    let blend = Factor::Blend { lo: a, hi: b };
    Ok(SmoothPiece::from_terms(
        a,
        b,
        vec![Term::new(ta.clone(), a, Factor::One), Term::new(-&ta, a, blend), Term::new(tb, b, blend)],
    ))
}

/// A jet family extended to the hull of `K`: jets on `K`, Whitney pieces on
/// the gaps.
#[derive(Debug, Clone)]
pub struct ExtendedField {
    m: usize,
    set: CompactSet,
    family: JetFamily,
    gaps: Vec<SmoothPiece>,
}

/// Extend `family` (of order `m`) across every gap of `set`.
pub fn extend_field(family: &JetFamily, m: usize, set: &CompactSet) -> Result<ExtendedField> {
    let comps = set.components();
    let gaps = set
        .gaps()
        .into_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let left: Vec<f64> = (0..=m).map(|k| family.value_in(i, k, a)).collect();
            let right: Vec<f64> = (0..=m).map(|k| family.value_in(i + 1, k, b)).collect();
            if left.iter().chain(&right).any(|v| !v.is_finite()) {
                return Err(Error::Domain(format!(
                    "missing or non-finite jet data at gap ({a}, {b}) between components {i} and {}",
                    i + 1
                )));
            }
            debug_assert!(comps[i].b == a && comps[i + 1].a == b);
            whitney_extend_gap(&left, &right, a, b)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExtendedField { m, set: set.clone(), family: family.clone(), gaps })
}

/// Where a point of the hull lies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Component(usize),
    Gap(usize),
}

/// Locate `x` in the hull of `set`.
pub fn locate(set: &CompactSet, x: f64) -> Option<Location> {
    let (lo, hi) = set.hull();
    if !(lo <= x && x <= hi) {
        return None;
    }
    let comps = set.components();
    let i = comps.partition_point(|c| c.b < x);
    if comps[i].contains(x) {
        Some(Location::Component(i))
    } else {
        Some(Location::Gap(i - 1))
    }
}

impl ExtendedField {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn set(&self) -> &CompactSet {
        &self.set
    }

    pub fn gap_pieces(&self) -> &[SmoothPiece] {
        &self.gaps
    }

    /// `D^k` at `x` in the hull, `k ≤ m`.
    pub fn derivative(&self, k: usize, x: f64) -> Result<f64> {
        if k > self.m {
            return domain(format!("order {k} exceeds m = {}", self.m));
        }
        match locate(&self.set, x) {
            Some(Location::Component(i)) => Ok(self.family.value_in(i, k, x)),
            Some(Location::Gap(i)) => Ok(self.gaps[i].derivative(k, x)),
            None => domain(format!("point {x} is outside the hull of K")),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.derivative(0, x)
    }

    /// CSV rows `x, D^0, …, D^m` on `xs`.
    pub fn write_samples_csv<W: Write>(&self, out: W, xs: &[f64]) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["x".to_string()];
        header.extend((0..=self.m).map(|k| format!("D{k}")));
        w.write_record(&header)?;
        for &x in xs {
            let mut row = vec![crate::fmt_f64(x)];
            for k in 0..=self.m {
                row.push(crate::fmt_f64(self.derivative(k, x)?));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
