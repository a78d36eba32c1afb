//! Quadrature: adaptive Simpson for the non-polynomial integrals and cached
//! Gauss–Legendre rules for panel-wise cumulative integrals.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;
const INITIAL_PANELS: usize = 16;
/// Integrand evaluations allowed per call before giving up.
const MAX_EVALS: usize = 4_000_000;

/// Adaptive Simpson with Richardson correction and absolute tolerance `tol`.
///
/// The interval is pre-split into 16 panels so that narrowly supported
/// integrands are not missed by the first five samples.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let tol = tol.max(f64::MIN_POSITIVE);
    let h = (b - a) / INITIAL_PANELS as f64;
    let mut total = 0.0;
    let mut failed = false;
    let mut budget = MAX_EVALS;
    for i in 0..INITIAL_PANELS {
        let l = a + i as f64 * h;
        let r = if i + 1 == INITIAL_PANELS { b } else { l + h };
        let m = 0.5 * (l + r);
        let (fl, fm, fr) = (f(l), f(m), f(r));
        let whole = (r - l) / 6.0 * (fl + 4.0 * fm + fr);
        let st = State { tol: tol / INITIAL_PANELS as f64, depth: MAX_DEPTH };
        total += recurse(f, l, r, fl, fm, fr, whole, st, &mut budget, &mut failed);
    }
    if failed || !total.is_finite() {
        return Err(Error::Numerical(format!("adaptive Simpson did not reach tolerance {tol:e} on [{a}, {b}]")));
    }
    Ok(total)
}

#[derive(Clone, Copy)]
struct State {
    tol: f64,
    depth: u32,
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    st: State,
    budget: &mut usize,
    failed: &mut bool,
) -> f64 {
    let State { tol, depth } = st;
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    // Differences at the level of rounding in the samples cannot be resolved.
    let noise = 64.0 * f64::EPSILON * (b - a) * (fa.abs() + 4.0 * fm.abs() + fb.abs()) / 6.0;
    if delta.abs() <= noise {
        return left + right;
    }
    if depth == 0 || lm <= a || rm >= b || *budget < 2 {
        *failed = true;
        return left + right + delta / 15.0;
    }
    *budget -= 2;
    let st = State { tol: 0.5 * tol, depth: depth - 1 };
    recurse(f, a, m, fa, flm, fm, left, st, budget, failed) + recurse(f, m, b, fm, frm, fb, right, st, budget, failed)
}

/// Adaptive Simpson with tolerance relative to an estimate of `∫|f|`.
///
/// The scale comes from a 64-panel, 16-point Gauss–Legendre pass; an integrand
/// that vanishes at all of those nodes is treated as identically zero.
pub fn simpson_rel(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel: f64) -> Result<f64> {
    simpson_scaled(f, f, a, b, rel)
}

/// Adaptive Simpson with tolerance relative to an estimate of `∫|scale|`.
///
/// For an integrand that is a difference of terms, passing the sum of the
/// terms' absolute values as `scale` keeps the tolerance above the rounding
/// left by their cancellation.
pub fn simpson_scaled(f: &dyn Fn(f64) -> f64, scale: &dyn Fn(f64) -> f64, a: f64, b: f64, rel: f64) -> Result<f64> {
    let s = composite_gauss_legendre(64, a, b, |x| scale(x).abs()).abs();
    if s == 0.0 {
        return Ok(0.0);
    }
    simpson(f, a, b, rel * s)
}

/// `panels` equal panels of 16-point Gauss–Legendre.
pub fn composite_gauss_legendre(panels: usize, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let l = a + i as f64 * h;
            let r = if i + 1 == panels { b } else { l + h };
            gauss_legendre(16, l, r, &mut f)
        })
        .sum()
}

fn rule(n: usize) -> &'static GaussLegendre {
    static R16: OnceLock<GaussLegendre> = OnceLock::new();
    static R64: OnceLock<GaussLegendre> = OnceLock::new();
    let cell = match n {
        16 => &R16,
        64 => &R64,
        _ => panic!("no cached Gauss-Legendre rule of degree {n}"),
    };
    cell.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(n).expect("nonzero degree")))
}

/// Fixed `n`-point Gauss–Legendre on `[a, b]`; `n` must be 16 or 64.
pub fn gauss_legendre(n: usize, a: f64, b: f64, f: impl FnMut(f64) -> f64) -> f64 {
    rule(n).integrate(a, b, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomial_and_transcendental() {
        let v = simpson(&|x: f64| x * x * x - x, 0.0, 2.0, 1e-14).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        let v = simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-13).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        assert_eq!(simpson(&|x: f64| x, 1.0, 1.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn simpson_finds_narrow_bump() {
        let f = |x: f64| if (x - 0.731).abs() < 0.01 { 1.0 - ((x - 0.731) / 0.01).powi(2) } else { 0.0 };
        let v = simpson_rel(&f, 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 4.0 / 3.0 * 0.01).abs() < 1e-9);
    }

    #[test]
    fn simpson_reports_nonconvergence() {
        let f = |x: f64| if x > 0.3 { 1.0 } else { 0.0 };
        assert!(simpson(&f, 0.0, 1.0, 1e-300).is_err());
    }

    #[test]
    fn gauss_legendre_rules() {
        let v = gauss_legendre(16, -1.0, 3.0, |x| x.powi(31));
        assert!((v - (3f64.powi(32) - 1.0) / 32.0).abs() < 1e-13 * v.abs());
        let v = gauss_legendre(64, 0.0, 1.0, |x| x.exp());
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-15);
    }
}
