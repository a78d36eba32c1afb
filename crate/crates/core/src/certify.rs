//! Whitney-field certification of jet triples over a finite pair grid.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::discrepancy::{safe_ratio, PairFunctionals};
use crate::error::{domain, Error, Result};
use crate::jet::{Coord, JetTriple};
use crate::modulus::Modulus;
use crate::poly::Poly;

pub const DEFAULT_MAX_PAIRS: usize = 20_000;
pub const DEFAULT_INTERIOR_POINTS: usize = 16;
/// Relative tolerance for the horizontality identity.
pub const HORIZONTALITY_TOL: f64 = 1e-10;

/// `|c^k(b) − T_a^{m−k}c^k(b)| / (ω(|b−a|)|b−a|^{m−k})`. Either ordering of
/// `a`, `b` is allowed; the Taylor base point is always `a`.
pub fn whitney_defect(jt: &JetTriple, c: Coord, k: usize, a: f64, b: f64, omega: &Modulus) -> Result<f64> {
    let m = jt.m();
    if k > m {
        return domain(format!("order {k} exceeds m = {m}"));
    }
    if a == b {
        return domain("whitney_defect needs a ≠ b");
    }
    let jet_a = jt.jet(c, a)?;
    let remainder = jt.value(c, k, b)? - Poly::taylor_local(&jet_a[k..])?.eval(b - a);
    let d = (b - a).abs();
    Ok(safe_ratio(remainder, omega.at(d) * d.powi((m - k) as i32)))
}

/// Residual of `H^k = 2 Σ_{i<k} C(k−1, i)(F^{k−i}G^i − G^{k−i}F^i)` at `x`.
pub fn check_horizontality(jt: &JetTriple, x: f64, k: usize) -> Result<f64> {
    Ok(horizontality_terms(jt, x, k)?.0)
}

/// Residual together with the sum of absolute values of its terms.
fn horizontality_terms(jt: &JetTriple, x: f64, k: usize) -> Result<(f64, f64)> {
    if k == 0 || k > jt.m() {
        return domain(format!("horizontality order must be in 1..={}, got {k}", jt.m()));
    }
    let f = jt.jet(Coord::F, x)?;
    let g = jt.jet(Coord::G, x)?;
    let hk = jt.value(Coord::H, k, x)?;
    let mut sum = 0.0;
    let mut scale = hk.abs();
    let mut binom = 1.0;
    for i in 0..k {
        if i > 0 {
            binom = binom * (k - i) as f64 / i as f64;
        }
        let term = binom * (f[k - i] * g[i] - g[k - i] * f[i]);
        sum += term;
        scale += 2.0 * binom * ((f[k - i] * g[i]).abs() + (g[k - i] * f[i]).abs());
    }
    Ok((hk - 2.0 * sum, scale))
}

/// Default certification pairs `(a, b)`, `a < b`.
///
/// Every pair of component endpoints is included. The remaining pairs of
/// sample points are kept if their index distance is a power of two, and the
/// budget left over is filled by a seeded random draw from the rest.
pub fn default_pair_grid(jt: &JetTriple, max_pairs: usize, seed: u64) -> Vec<(f64, f64)> {
    let per_comp = jt.sample_points(DEFAULT_INTERIOR_POINTS);
    let mut endpoints: Vec<f64> = jt.set().components().iter().flat_map(|c| [c.a, c.b]).collect();
    endpoints.dedup();
    let mut points: Vec<f64> = per_comp.into_iter().flatten().collect();
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut pairs = Vec::new();
    for (i, &a) in endpoints.iter().enumerate() {
        for &b in &endpoints[i + 1..] {
            pairs.push((a, b));
        }
    }
    let is_endpoint = |x: f64| endpoints.binary_search_by(|e| e.total_cmp(&x)).is_ok();
    let mut rest = Vec::new();
    let mut geometric = Vec::new();
    for (i, &a) in points.iter().enumerate() {
        for (j, &b) in points.iter().enumerate().skip(i + 1) {
            if is_endpoint(a) && is_endpoint(b) {
                continue;
            }
            if (j - i).is_power_of_two() {
                geometric.push((a, b));
            } else {
                rest.push((a, b));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = max_pairs.saturating_sub(pairs.len());
    if geometric.len() > budget {
        geometric.shuffle(&mut rng);
        geometric.truncate(budget);
    }
    pairs.extend(geometric);
    let budget = max_pairs.saturating_sub(pairs.len());
    if rest.len() > budget {
        rest.shuffle(&mut rng);
        rest.truncate(budget);
    }
    pairs.extend(rest);
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    pairs
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerCoord<T> {
    #[serde(rename = "F")]
    pub f: T,
    #[serde(rename = "G")]
    pub g: T,
    #[serde(rename = "H")]
    pub h: T,
}

impl<T> PerCoord<T> {
    pub fn get(&self, c: Coord) -> &T {
        match c {
            Coord::F => &self.f,
            Coord::G => &self.g,
            Coord::H => &self.h,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstPair {
    pub statistic: String,
    pub a: f64,
    pub b: f64,
    pub value: f64,
}

/// Which of the three extension conditions the finite grid supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdict {
    /// Finite Whitney constants for `F`, `G`, `H`.
    pub condition_1: bool,
    /// Horizontality identity at every sample of `K`.
    pub condition_2: bool,
    /// Finite `sup |A| / V_ω`.
    pub condition_3: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertReport {
    pub m: usize,
    pub pair_count: usize,
    /// Sup over pairs and orders, per family.
    pub whitney_constants: PerCoord<f64>,
    /// Sup over pairs, per family and order `k = 0..=m`.
    pub whitney_per_order: PerCoord<Vec<f64>>,
    /// Single constant over all families and orders.
    pub whitney_aggregate: f64,
    pub horizontality_max_residual: f64,
    pub ratio_sup_omega: f64,
    pub ratio_sup_one_scaled: f64,
    pub worst_pairs: Vec<WorstPair>,
    pub verdict: Verdict,
}

impl CertReport {
    /// `Ok` if all three conditions hold on the grid, else the first failure.
    pub fn require_extendable(&self) -> Result<()> {
        let fail = |condition: u8, detail: String| Err(Error::Certification { condition, detail });
        if !self.verdict.condition_1 {
            return fail(1, format!("Whitney constants {:?}", self.whitney_constants));
        }
        if !self.verdict.condition_2 {
            return fail(2, format!("horizontality residual {:e}", self.horizontality_max_residual));
        }
        if !self.verdict.condition_3 {
            return fail(3, format!("sup |A|/V_omega = {:e}", self.ratio_sup_omega));
        }
        Ok(())
    }

    pub fn write_worst_pairs_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["statistic", "a", "b", "value"])?;
        for p in &self.worst_pairs {
            w.write_record([p.statistic.clone(), crate::fmt_f64(p.a), crate::fmt_f64(p.b), crate::fmt_f64(p.value)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Running maximum with its witness pair.
#[derive(Debug, Clone, Copy)]
struct Best {
    value: f64,
    a: f64,
    b: f64,
}

impl Best {
    const NONE: Best = Best { value: 0.0, a: f64::NAN, b: f64::NAN };

    fn offer(&mut self, value: f64, a: f64, b: f64) {
        if value > self.value || (value.is_nan() && !self.value.is_nan()) {
            *self = Best { value, a, b };
        }
    }

    fn merge(mut self, other: Best) -> Best {
        self.offer(other.value, other.a, other.b);
        self
    }
}

#[derive(Debug, Clone)]
struct Acc {
    whitney: Vec<Vec<Best>>,
    ratio_omega: Best,
    ratio_one_scaled: Best,
}

impl Acc {
    fn new(m: usize) -> Self {
        Self { whitney: vec![vec![Best::NONE; m + 1]; 3], ratio_omega: Best::NONE, ratio_one_scaled: Best::NONE }
    }

    fn merge(mut self, other: Acc) -> Acc {
        for (xs, ys) in self.whitney.iter_mut().zip(other.whitney) {
            for (x, y) in xs.iter_mut().zip(ys) {
                *x = x.merge(y);
            }
        }
        self.ratio_omega = self.ratio_omega.merge(other.ratio_omega);
        self.ratio_one_scaled = self.ratio_one_scaled.merge(other.ratio_one_scaled);
        self
    }
}

/// Certify `jt` against `omega` over `pairs` (each with `a < b`, both in `K`).
pub fn certify(jt: &JetTriple, omega: &Modulus, pairs: &[(f64, f64)]) -> Result<CertReport> {
    if pairs.is_empty() {
        return domain("certification needs a nonempty pair grid");
    }
    certify_grid(jt, omega, pairs)
}

/// [`certify`] without the nonempty check; a single-point `K` has no pairs.
pub(crate) fn certify_grid(jt: &JetTriple, omega: &Modulus, pairs: &[(f64, f64)]) -> Result<CertReport> {
    let m = jt.m();
    let acc = pairs
        .par_iter()
        .map(|&(a, b)| -> Result<Acc> {
            let mut acc = Acc::new(m);
            for (ci, c) in Coord::ALL.into_iter().enumerate() {
                for k in 0..=m {
                    acc.whitney[ci][k].offer(whitney_defect(jt, c, k, a, b, omega)?, a, b);
                    acc.whitney[ci][k].offer(whitney_defect(jt, c, k, b, a, omega)?, b, a);
                }
            }
            let pf = PairFunctionals::compute(jt, omega, a, b)?;
            acc.ratio_omega.offer(pf.ratio_omega, a, b);
            acc.ratio_one_scaled.offer(pf.ratio_one_scaled, a, b);
            Ok(acc)
        })
        .try_reduce(|| Acc::new(m), |x, y| Ok(x.merge(y)))?;

    let samples: Vec<f64> = jt.sample_points(DEFAULT_INTERIOR_POINTS).into_iter().flatten().collect();
    let (residual, residual_ok) = samples
        .par_iter()
        .map(|&x| -> Result<(f64, bool)> {
            let mut worst: (f64, bool) = (0.0, true);
            for k in 1..=m {
                let (r, scale) = horizontality_terms(jt, x, k)?;
                worst.0 = worst.0.max(r.abs());
                worst.1 &= r.abs() <= HORIZONTALITY_TOL * scale.max(1.0);
            }
            Ok(worst)
        })
        .try_reduce(|| (0.0, true), |x, y| Ok((x.0.max(y.0), x.1 && y.1)))?;

    let per_order = |ci: usize| acc.whitney[ci].iter().map(|b| b.value).collect::<Vec<_>>();
    let sup = |ci: usize| acc.whitney[ci].iter().fold(Best::NONE, |x, &y| x.merge(y));
    let whitney_per_order = PerCoord { f: per_order(0), g: per_order(1), h: per_order(2) };
    let (sf, sg, sh) = (sup(0), sup(1), sup(2));
    let whitney_constants = PerCoord { f: sf.value, g: sg.value, h: sh.value };
    let whitney_aggregate = sf.value.max(sg.value).max(sh.value);

    let mut worst_pairs = Vec::new();
    for (name, b) in [
        ("whitney_F", sf),
        ("whitney_G", sg),
        ("whitney_H", sh),
        ("ratio_omega", acc.ratio_omega),
        ("ratio_one_scaled", acc.ratio_one_scaled),
    ] {
        if !b.a.is_nan() {
            worst_pairs.push(WorstPair { statistic: name.into(), a: b.a, b: b.b, value: b.value });
        }
    }

    let finite = |x: f64| x.is_finite();
    Ok(CertReport {
        m,
        pair_count: pairs.len(),
        verdict: Verdict {
            condition_1: finite(whitney_aggregate),
            condition_2: residual_ok,
            condition_3: finite(acc.ratio_omega.value),
        },
        whitney_constants,
        whitney_per_order,
        whitney_aggregate,
        horizontality_max_residual: residual,
        ratio_sup_omega: acc.ratio_omega.value,
        ratio_sup_one_scaled: acc.ratio_one_scaled.value,
        worst_pairs,
    })
}
