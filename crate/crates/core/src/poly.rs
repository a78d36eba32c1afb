//! Univariate real polynomials in the monomial basis.
//!
//! Everything the discrepancy and velocity functionals need is here: exact
//! products and definite integrals, real-root isolation on an interval,
//! `∫|p|`, `max |p|`, and the large-value subinterval guaranteed by the
//! Markov inequality.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl From<Vec<f64>> for Poly {
    fn from(coeffs: Vec<f64>) -> Self {
        Poly::new(coeffs)
    }
}

impl From<Poly> for Vec<f64> {
    fn from(p: Poly) -> Self {
        p.coeffs
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Poly {
    /// Builds a polynomial from ascending coefficients, trimming trailing zeros.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Poly::new(vec![0.0, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Compensated Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.coeffs.len();
        if n == 0 {
            return 0.0;
        }
        let mut s = self.coeffs[n - 1];
        let mut c = 0.0;
        for &a in self.coeffs[..n - 1].iter().rev() {
            let (p, pi) = two_prod(s, x);
            let (t, sigma) = two_sum(p, a);
            s = t;
            c = c * x + (pi + sigma);
        }
        s + c
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect())
    }

    pub fn nth_derivative(&self, n: usize) -> Poly {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Poly {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(0.0);
        out.extend(self.coeffs.iter().enumerate().map(|(k, &c)| c / (k + 1) as f64));
        Poly::new(out)
    }

    /// `∫_a^b p` (any order of `a`, `b`).
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        let anti = self.antiderivative();
        anti.eval(b) - anti.eval(a)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `q(t) = p(t + h)`.
    pub fn shift(&self, h: f64) -> Poly {
        // Horner in polynomial arithmetic: p(t+h) = (...(c_n (t+h) + c_{n-1})(t+h) + ...)
        let lin = Poly::new(vec![h, 1.0]);
        let mut acc = Poly::zero();
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Poly::constant(c);
        }
        acc
    }

    /// Taylor polynomial `Σ jet[k]/k! (x − a)^k` expanded in the monomial basis of `x`.
    pub fn taylor_from_jet(jet: &[f64], a: f64) -> Result<Poly> {
        Ok(Poly::taylor_local(jet)?.shift(-a))
    }

    /// Taylor polynomial in the local variable `t = x − a`: coefficients `jet[k]/k!`.
    pub fn taylor_local(jet: &[f64]) -> Result<Poly> {
        if jet.is_empty() {
            return domain("empty jet");
        }
        let mut fact = 1.0;
        let coeffs = jet
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                if k > 0 {
                    fact *= k as f64;
                }
                v / fact
            })
            .collect();
        Ok(Poly::new(coeffs))
    }

    /// Sorted real roots of `p` in `[a, b]`.
    ///
    /// The interval is split at the roots of `p'` (found recursively) so that
    /// `p` is monotone on each piece, and every sign-changing piece is bisected
    /// to full floating-point resolution. Roots of even multiplicity that do not
    /// change sign are reported only if `p` vanishes exactly there. The zero
    /// polynomial has no isolated roots and returns an empty list.
    pub fn roots_in(&self, a: f64, b: f64) -> Vec<f64> {
        if a > b || self.degree() == 0 {
            return Vec::new();
        }
        if self.degree() == 1 {
            let r = -self.coeffs[0] / self.coeffs[1];
            return if r >= a && r <= b { vec![r] } else { Vec::new() };
        }
        let mut breaks = vec![a];
        breaks.extend(self.derivative().roots_in(a, b));
        breaks.push(b);

        let mut roots = Vec::new();
        for w in breaks.windows(2) {
            let (l, r) = (w[0], w[1]);
            let fl = self.eval(l);
            if fl == 0.0 {
                roots.push(l);
            }
            if r <= l {
                continue;
            }
            let fr = self.eval(r);
            if fl != 0.0 && fr != 0.0 && fl.signum() != fr.signum() {
                roots.push(self.bisect(l, r, fl));
            }
        }
        if self.eval(b) == 0.0 {
            roots.push(b);
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + y.abs()));
        roots
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, flo: f64) -> f64 {
        let sl = flo.signum();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = self.eval(mid);
            if fm == 0.0 {
                return mid;
            }
            if fm.signum() == sl {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if self.eval(lo).abs() <= self.eval(hi).abs() {
            lo
        } else {
            hi
        }
    }

    /// `∫_a^b |p|`, splitting at the real roots in `[a, b]`.
    pub fn integral_abs(&self, a: f64, b: f64) -> Result<f64> {
        if !(a < b) {
            return domain(format!("integral_abs needs a < b, got [{a}, {b}]"));
        }
        if self.is_zero() {
            return Ok(0.0);
        }
        let anti = self.antiderivative();
        let mut pts = vec![a];
        pts.extend(self.roots_in(a, b).into_iter().filter(|&r| r > a && r < b));
        pts.push(b);
        Ok(pts.windows(2).map(|w| (anti.eval(w[1]) - anti.eval(w[0])).abs()).sum())
    }

    /// `(max_{[a,b]} |p|, argmax)`, checking endpoints and critical points.
    pub fn max_abs(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        if !(a < b) {
            return domain(format!("max_abs needs a < b, got [{a}, {b}]"));
        }
        let mut best = (self.eval(a).abs(), a);
        let crit = self.derivative().roots_in(a, b);
        for x in crit.into_iter().chain(std::iter::once(b)) {
            let v = self.eval(x).abs();
            if v > best.0 {
                best = (v, x);
            }
        }
        Ok(best)
    }

    /// Leftmost closed subinterval of `[a, b]` of length at least
    /// `(b − a)/(4 deg²)` on which `|p| ≥ M/2`, `M = max_{[a,b]} |p|`.
    ///
    /// Constant nonzero polynomials return the whole interval.
    pub fn big_subinterval(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        if !(a < b) {
            return domain(format!("big_subinterval needs a < b, got [{a}, {b}]"));
        }
        if self.is_zero() {
            return Err(Error::Degenerate("polynomial is identically zero".into()));
        }
        let deg = self.degree();
        if deg == 0 {
            return Ok((a, b));
        }
        let (m, _) = self.max_abs(a, b)?;
        if m == 0.0 {
            return Err(Error::Degenerate("polynomial vanishes on the interval".into()));
        }
        let half = 0.5 * m;
        let need = (b - a) / (4.0 * (deg * deg) as f64);

        let mut pts = vec![a, b];
        pts.extend((self - &Poly::constant(half)).roots_in(a, b));
        pts.extend((self + &Poly::constant(half)).roots_in(a, b));
        pts.sort_by(f64::total_cmp);
        pts.dedup();

        let mut run: Option<(f64, f64)> = None;
        let mut runs = Vec::new();
        for w in pts.windows(2) {
            let (l, r) = (w[0], w[1]);
            let good = self.eval(0.5 * (l + r)).abs() >= half;
            match (good, run) {
                (true, Some((s, _))) => run = Some((s, r)),
                (true, None) => run = Some((l, r)),
                (false, Some(done)) => {
                    runs.push(done);
                    run = None;
                }
                (false, None) => {}
            }
        }
        runs.extend(run);
        runs.into_iter().find(|&(l, r)| r - l >= need * (1.0 - 1e-12)).ok_or_else(|| {
            Error::Internal(format!(
                "no subinterval of length {need} with |p| >= M/2 on [{a}, {b}]; Markov bound violated"
            ))
        })
    }
}

/// `∫_a^b p q`, exact up to rounding.
pub fn integrate_product(p: &Poly, q: &Poly, a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return domain(format!("integrate_product needs a < b, got [{a}, {b}]"));
    }
    Ok((p * q).integrate(a, b))
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeffs.get(i).unwrap_or(&0.0) + rhs.coeffs.get(i).unwrap_or(&0.0)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}
