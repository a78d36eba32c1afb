//! Area discrepancy `A(a, b)`, the velocities `V_ω` and `V₁`, and left
//! translation of jet triples in the Heisenberg group.
//!
//! Taylor polynomials are kept in the local variable `t = x − a`, so every
//! integral below is an exact polynomial integral over `[0, b − a]`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::jet::{Coord, JetFamily, JetTriple};
use crate::modulus::Modulus;
use crate::poly::Poly;

/// Taylor polynomial of order `m` of one family at `a`, in powers of `x − a`.
pub fn taylor_at(jt: &JetTriple, c: Coord, a: f64) -> Result<Poly> {
    Poly::taylor_local(&jt.jet(c, a)?)
}

fn check_pair(jt: &JetTriple, a: f64, b: f64) -> Result<()> {
    if !(a < b) {
        return domain(format!("pair needs a < b, got ({a}, {b})"));
    }
    for x in [a, b] {
        if !jt.set().contains(x) {
            return domain(format!("point {x} is not in K"));
        }
    }
    Ok(())
}

/// `A(a, b) = H(b) − H(a) − 2∫_a^b ((T_aF)′T_aG − (T_aG)′T_aF)
///            + 2F(a)(G(b) − T_aG(b)) − 2G(a)(F(b) − T_aF(b))`.
pub fn area_discrepancy(jt: &JetTriple, a: f64, b: f64) -> Result<f64> {
    check_pair(jt, a, b)?;
    let h = b - a;
    let tf = taylor_at(jt, Coord::F, a)?;
    let tg = taylor_at(jt, Coord::G, a)?;
    let area = (&(&tf.derivative() * &tg) - &(&tg.derivative() * &tf)).integrate(0.0, h);
    let (fa, ga) = (jt.value(Coord::F, 0, a)?, jt.value(Coord::G, 0, a)?);
    let (fb, gb) = (jt.value(Coord::F, 0, b)?, jt.value(Coord::G, 0, b)?);
    let (ha, hb) = (jt.value(Coord::H, 0, a)?, jt.value(Coord::H, 0, b)?);
    Ok(hb - ha - 2.0 * area + 2.0 * fa * (gb - tg.eval(h)) - 2.0 * ga * (fb - tf.eval(h)))
}

/// `∫_a^b |(T_aF)′| + ∫_a^b |(T_aG)′|`.
pub fn taylor_speed(jt: &JetTriple, a: f64, b: f64) -> Result<f64> {
    check_pair(jt, a, b)?;
    let h = b - a;
    let sf = taylor_at(jt, Coord::F, a)?.derivative().integral_abs(0.0, h)?;
    let sg = taylor_at(jt, Coord::G, a)?.derivative().integral_abs(0.0, h)?;
    Ok(sf + sg)
}

fn velocity(weight: f64, m: usize, h: f64, speed: f64) -> f64 {
    let hm = h.powi(m as i32);
    weight * weight * hm * hm + weight * hm * speed
}

/// `V_ω(a, b) = ω(b−a)²(b−a)^{2m} + ω(b−a)(b−a)^m ∫(|(T_aF)′| + |(T_aG)′|)`.
pub fn velocity_omega(jt: &JetTriple, omega: &Modulus, a: f64, b: f64) -> Result<f64> {
    let speed = taylor_speed(jt, a, b)?;
    Ok(velocity(omega.at(b - a), jt.m(), b - a, speed))
}

/// `V₁(a, b)`: `V_ω` with the weight `ω(b−a)` replaced by 1.
pub fn velocity_one(jt: &JetTriple, a: f64, b: f64) -> Result<f64> {
    let speed = taylor_speed(jt, a, b)?;
    Ok(velocity(1.0, jt.m(), b - a, speed))
}

/// `|num| / den`, with `0/0 = 0` and `x/0 = ∞`.
pub(crate) fn safe_ratio(num: f64, den: f64) -> f64 {
    let num = num.abs();
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// All pair statistics at once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairFunctionals {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "A")]
    pub area: f64,
    pub v_omega: f64,
    pub v_one: f64,
    /// `|A| / V_ω`.
    pub ratio_omega: f64,
    /// `|A| / V₁`.
    pub ratio_one: f64,
    /// `|A| / (V₁ ω(b−a))`.
    pub ratio_one_scaled: f64,
}

impl PairFunctionals {
    pub fn compute(jt: &JetTriple, omega: &Modulus, a: f64, b: f64) -> Result<Self> {
        let area = area_discrepancy(jt, a, b)?;
        let speed = taylor_speed(jt, a, b)?;
        let (h, w) = (b - a, omega.at(b - a));
        let v_omega = velocity(w, jt.m(), h, speed);
        let v_one = velocity(1.0, jt.m(), h, speed);
        Ok(Self {
            a,
            b,
            area,
            v_omega,
            v_one,
            ratio_omega: safe_ratio(area, v_omega),
            ratio_one: safe_ratio(area, v_one),
            ratio_one_scaled: safe_ratio(area, v_one * w),
        })
    }
}

/// Pair functionals over many pairs, in parallel, in input order.
pub fn sweep(jt: &JetTriple, omega: &Modulus, pairs: &[(f64, f64)]) -> Result<Vec<PairFunctionals>> {
    pairs.par_iter().map(|&(a, b)| PairFunctionals::compute(jt, omega, a, b)).collect()
}

/// CSV with columns `a, b, A, V_omega, V_one, ratio_omega, ratio_one_scaled`.
pub fn write_sweep_csv<W: Write>(out: W, rows: &[PairFunctionals]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["a", "b", "A", "V_omega", "V_one", "ratio_omega", "ratio_one_scaled"])?;
    for r in rows {
        w.write_record([r.a, r.b, r.area, r.v_omega, r.v_one, r.ratio_omega, r.ratio_one_scaled].map(crate::fmt_f64))?;
    }
    w.flush()?;
    Ok(())
}

/// Left translation by `(F(a), G(a), H(a))^{-1}`:
/// `F̂ = F − F(a)`, `Ĝ = G − G(a)`, `Ĥ = H − H(a) − 2G(a)F + 2F(a)G`,
/// with the same linear combination at every order `k ≥ 1`.
pub fn translate_left(jt: &JetTriple, a: f64) -> Result<JetTriple> {
    let (fa, ga, ha) = (jt.value(Coord::F, 0, a)?, jt.value(Coord::G, 0, a)?, jt.value(Coord::H, 0, a)?);
    let (f, g, h) = (jt.family(Coord::F).clone(), jt.family(Coord::G).clone(), jt.family(Coord::H).clone());
    let fh = JetFamily::combination(-fa, vec![(1.0, f.clone())]);
    let gh = JetFamily::combination(-ga, vec![(1.0, g.clone())]);
    let hh = JetFamily::combination(-ha, vec![(1.0, h), (-2.0 * ga, f), (2.0 * fa, g)]);
    Ok(jt.with_families(fh, gh, hh))
}
