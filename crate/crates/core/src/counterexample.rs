//! The dyadic construction on `K = ⋃ [cₙ, dₙ] ∪ {1}` whose jets satisfy the
//! Whitney and `V₁` bounds for `ω` but admit no horizontal `C^{m,ω^α}`
//! extension once `α > 1/2`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::certify::{check_horizontality, whitney_defect};
use crate::compact::{CompactSet, Component};
use crate::discrepancy::{area_discrepancy, safe_ratio, velocity_omega, velocity_one};
use crate::error::{domain, Result};
use crate::jet::{ComponentJet, Coord, JetFamily, JetTriple, Job};
use crate::modulus::Modulus;
use crate::poly::Poly;

/// Past this index `1 − 2^{−n}` is no longer separated from its neighbours in
/// double precision.
pub const MAX_N: usize = 50;

/// Relative tolerance on the ratio bound.
pub const RATIO_TOL: f64 = 1e-9;

/// Indices below this may fail the monotonicity check of `rₙ`.
pub const BURN_IN: usize = 2;

/// `cₙ = 1 − 2^{−n}`.
pub fn c(n: usize) -> f64 {
    1.0 - 0.5f64.powi(n as i32)
}

/// `dₙ = 1 − (3/4)2^{−n}`.
pub fn d(n: usize) -> f64 {
    1.0 - 0.75 * 0.5f64.powi(n as i32)
}

#[derive(Debug, Clone)]
pub struct CounterexampleData {
    pub m: usize,
    pub omega: Modulus,
    pub n_max: usize,
    /// `H⁰` on `[cₙ, dₙ]`, `n = 0..=n_max`.
    pub heights: Vec<f64>,
    pub triple: JetTriple,
}

/// Build the construction truncated at `n_max`.
pub fn build(m: usize, omega: &Modulus, n_max: usize) -> Result<CounterexampleData> {
    if m == 0 {
        return domain("counterexample needs m ≥ 1");
    }
    if n_max < 2 {
        return domain(format!("n_max must be at least 2, got {n_max}"));
    }
    if n_max > MAX_N {
        return domain(format!("n_max = {n_max} exceeds {MAX_N}; the intervals collapse in double precision"));
    }
    let heights: Vec<f64> =
        (0..=n_max).map(|n| 0.25f64.powi((m * n) as i32) * omega.at(0.5f64.powi(n as i32 + 2))).collect();
    let mut components: Vec<Component> = (0..=n_max).map(|n| Component { a: c(n), b: d(n) }).collect();
    components.push(Component { a: 1.0, b: 1.0 });
    let set = CompactSet::new(components)?;
    let mut hjets: Vec<ComponentJet> =
        heights.iter().map(|&h| ComponentJet::from_poly(&Poly::constant(h), m)).collect();
    hjets.push(ComponentJet::Point(vec![0.0; m + 1]));
    let zero = JetFamily::new(
        vec![ComponentJet::zero(m); n_max + 1].into_iter().chain([ComponentJet::Point(vec![0.0; m + 1])]).collect(),
    );
    let triple = JetTriple::new(m, set, zero.clone(), zero, JetFamily::new(hjets))?;
    Ok(CounterexampleData { m, omega: omega.clone(), n_max, heights, triple })
}

impl CounterexampleData {
    pub fn job(&self) -> Job {
        Job { omega: self.omega.clone(), triple: self.triple.clone() }
    }

    /// All component endpoints, with `1` last.
    pub fn endpoints(&self) -> Vec<(usize, f64)> {
        let mut pts: Vec<(usize, f64)> = (0..=self.n_max).flat_map(|n| [(n, c(n)), (n, d(n))]).collect();
        pts.push((self.n_max + 1, 1.0));
        pts
    }

    /// Pairs `a < b` of endpoints lying in different components.
    pub fn cross_pairs(&self) -> Vec<(f64, f64)> {
        let pts = self.endpoints();
        let mut pairs = Vec::new();
        for (i, &(ci, a)) in pts.iter().enumerate() {
            for &(cj, b) in &pts[i + 1..] {
                if ci != cj {
                    pairs.push((a, b));
                }
            }
        }
        pairs
    }
}

/// One row of the divergence table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RnRow {
    pub n: usize,
    /// `cₙ₊₁ − dₙ`.
    pub gap: f64,
    #[serde(rename = "A")]
    pub area: f64,
    pub v_omega_alpha: f64,
    pub r_n: f64,
    /// `16^m(1 − 4^{−m})ω(gap)^{1−2α}`.
    pub lower_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub m: usize,
    pub alpha: f64,
    pub n_max: usize,
    pub pair_count: usize,
    /// Whitney constant of `H` over cross-component endpoint pairs.
    pub whitney_constant: f64,
    pub whitney_bound: f64,
    pub whitney_worst: (f64, f64),
    pub whitney_ok: bool,
    /// `sup |A| / (V₁ ω)` over the same pairs.
    pub ratio_sup: f64,
    pub ratio_bound: f64,
    pub ratio_worst: (f64, f64),
    pub ratio_ok: bool,
    pub horizontality_max_residual: f64,
    pub rn: Vec<RnRow>,
    /// `None` at `α = 1/2`, where nothing is asserted.
    pub rn_lower_ok: Option<bool>,
    pub rn_monotone: Option<bool>,
    /// `r_{n_max−1} / r₀`.
    pub rn_growth: f64,
    pub failures: Vec<String>,
    pub passed: bool,
}

fn worst(items: impl Iterator<Item = (f64, (f64, f64))>) -> (f64, (f64, f64)) {
    items.fold((0.0, (f64::NAN, f64::NAN)), |best, x| if x.0 > best.0 { x } else { best })
}

/// Check the three numerical statements of the construction for `α ∈ [1/2, 1]`.
pub fn verify_bounds(data: &CounterexampleData, alpha: f64) -> Result<BoundsReport> {
    if !(0.5..=1.0).contains(&alpha) {
        return domain(format!("alpha must lie in [1/2, 1], got {alpha}"));
    }
    let (jt, omega, m) = (&data.triple, &data.omega, data.m);
    let pairs = data.cross_pairs();
    let per_pair: Vec<(f64, f64, (f64, f64))> = pairs
        .par_iter()
        .map(|&(a, b)| -> Result<_> {
            let mut w: f64 = 0.0;
            for k in 0..=m {
                w = w.max(whitney_defect(jt, Coord::H, k, a, b, omega)?);
                w = w.max(whitney_defect(jt, Coord::H, k, b, a, omega)?);
            }
            let ratio = safe_ratio(area_discrepancy(jt, a, b)?, velocity_one(jt, a, b)? * omega.at(b - a));
            Ok((w, ratio, (a, b)))
        })
        .collect::<Result<_>>()?;
    let (whitney_constant, whitney_worst) = worst(per_pair.iter().map(|&(w, _, p)| (w, p)));
    let (ratio_sup, ratio_worst) = worst(per_pair.iter().map(|&(_, r, p)| (r, p)));
    let whitney_bound = 4f64.powi(m as i32);
    let ratio_bound = 16f64.powi(m as i32);
    let whitney_ok = whitney_constant <= whitney_bound;
    let ratio_ok = ratio_sup <= ratio_bound * (1.0 + RATIO_TOL);

    let mut horizontality: f64 = 0.0;
    for (_, x) in data.endpoints() {
        for k in 1..=m {
            horizontality = horizontality.max(check_horizontality(jt, x, k)?.abs());
        }
    }

    let omega_alpha = omega.powered(alpha)?;
    let rn: Vec<RnRow> = (0..data.n_max)
        .into_par_iter()
        .map(|n| -> Result<RnRow> {
            let (a, b) = (d(n), c(n + 1));
            let area = area_discrepancy(jt, a, b)?;
            let v = velocity_omega(jt, &omega_alpha, a, b)?;
            let gap = b - a;
            Ok(RnRow {
                n,
                gap,
                area,
                v_omega_alpha: v,
                r_n: safe_ratio(area, v),
                lower_bound: ratio_bound * (1.0 - 0.25f64.powi(m as i32)) * omega.at(gap).powf(1.0 - 2.0 * alpha),
            })
        })
        .collect::<Result<_>>()?;
    let asserting = alpha > 0.5;
    let lower_ok = rn.iter().all(|r| r.r_n >= r.lower_bound);
    let monotone = rn.windows(2).skip(BURN_IN).all(|w| w[1].r_n > w[0].r_n);
    let rn_growth = rn.last().map_or(f64::NAN, |r| r.r_n) / rn[0].r_n;

    let mut failures = Vec::new();
    if !whitney_ok {
        failures.push(format!(
            "Whitney constant {whitney_constant:e} > {whitney_bound} at ({}, {})",
            whitney_worst.0, whitney_worst.1
        ));
    }
    if !ratio_ok {
        failures.push(format!("ratio {ratio_sup:e} > {ratio_bound} at ({}, {})", ratio_worst.0, ratio_worst.1));
    }
    if horizontality != 0.0 {
        failures.push(format!("horizontality residual {horizontality:e}"));
    }
    if asserting {
        if let Some(r) = rn.iter().find(|r| r.r_n < r.lower_bound) {
            failures.push(format!("r_{} = {:e} below {:e}", r.n, r.r_n, r.lower_bound));
        }
        if !monotone {
            failures.push("r_n is not strictly increasing after burn-in".into());
        }
    }
    Ok(BoundsReport {
        m,
        alpha,
        n_max: data.n_max,
        pair_count: pairs.len(),
        whitney_constant,
        whitney_bound,
        whitney_worst,
        whitney_ok,
        ratio_sup,
        ratio_bound,
        ratio_worst,
        ratio_ok,
        horizontality_max_residual: horizontality,
        rn,
        rn_lower_ok: asserting.then_some(lower_ok),
        rn_monotone: asserting.then_some(monotone),
        rn_growth,
        passed: failures.is_empty(),
        failures,
    })
}

/// CSV with columns `n, gap, A, V_omega_alpha, r_n, lower_bound`.
pub fn write_rn_csv<W: Write>(out: W, rows: &[RnRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "gap", "A", "V_omega_alpha", "r_n", "lower_bound"])?;
    for r in rows {
        let mut rec = vec![r.n.to_string()];
        rec.extend([r.gap, r.area, r.v_omega_alpha, r.r_n, r.lower_bound].map(crate::fmt_f64));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
