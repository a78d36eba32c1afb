//! Horizontal lift of the perturbed gap pieces and assembly of the global
//! curve `Γ = (𝓕, 𝓖, 𝓗)` on the hull of `K`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::certify::{self, CertReport, DEFAULT_MAX_PAIRS};
use crate::discrepancy::{area_discrepancy, safe_ratio, velocity_omega};
use crate::error::{domain, Error, Result};
use crate::jet::{Coord, JetTriple};
use crate::modulus::Modulus;
use crate::perturb::{lift_integral, perturb_gap, Constants, GapDiagnostics, GapProblem};
use crate::poly::Poly;
use crate::quad::gauss_legendre;
use crate::whitney::{extend_field, locate, Factor, Location, SmoothPiece, Term};

/// Relative tolerance on jet matching at the weld points.
pub const WELD_TOL: f64 = 1e-8;
/// Inflation applied to the empirical constant before use.
pub const CONSTANT_SAFETY: f64 = 1.1;

const MIN_PANELS: usize = 1024;
const MAX_PANELS: usize = 16_384;

/// `D^k` of `2(u′v − uv′)`'s antiderivative, i.e. the `k`-th derivative of a
/// horizontal lift, from the jets of `u` and `v` at a point (`k ≥ 1`).
pub fn lift_derivative(u: &[f64], v: &[f64], k: usize) -> f64 {
    let mut sum = 0.0;
    let mut binom = 1.0;
    for j in 0..k {
        if j > 0 {
            binom = binom * (k - j) as f64 / j as f64;
        }
        sum += binom * (u[k - j] * v[j] - v[k - j] * u[j]);
    }
    2.0 * sum
}

/// The third coordinate over one gap: `h(x) = h(a) + 2∫_a^x (u′v − uv′)`.
///
/// The integral is computed in the frame centered at `a` and cached at panel
/// boundaries; the last partial panel is integrated on demand.
#[derive(Debug, Clone)]
pub struct LiftPiece {
    a: f64,
    b: f64,
    h_a: f64,
    u_a: f64,
    v_a: f64,
    u: SmoothPiece,
    v: SmoothPiece,
    uc: SmoothPiece,
    vc: SmoothPiece,
    panel: f64,
    cumulative: Vec<f64>,
}

fn centered(p: &SmoothPiece, at: f64, value: f64) -> SmoothPiece {
    let (lo, hi) = p.domain();
    p.add(&SmoothPiece::from_terms(lo, hi, vec![Term::new(Poly::constant(-value), at, Factor::One)]))
}

/// Lift `(u, v)` on their common domain `[a, b]` starting at height `h_a`.
pub fn lift_gap(u: &SmoothPiece, v: &SmoothPiece, a: f64, h_a: f64) -> Result<LiftPiece> {
    let (lo, b) = u.domain();
    if lo != a || v.domain() != (a, b) || !(a < b) {
        return domain("lift pieces must share the domain [a, b] with a < b");
    }
    let (u_a, v_a) = (u.eval(a), v.eval(a));
    let (uc, vc) = (centered(u, a, u_a), centered(v, a, v_a));
    let integrand = |x: f64| uc.derivative(1, x) * vc.eval(x) - uc.eval(x) * vc.derivative(1, x);
    let (reference, scale) = lift_integral(&uc, &vc, a, b)?;
    let mut panels = MIN_PANELS;
    loop {
        let width = (b - a) / panels as f64;
        let mut cumulative = Vec::with_capacity(panels + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for i in 0..panels {
            let l = a + i as f64 * width;
            let r = if i + 1 == panels { b } else { l + width };
            acc += 2.0 * gauss_legendre(16, l, r, integrand);
            cumulative.push(acc);
        }
        let agrees = (acc - reference).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE);
        if agrees || panels >= MAX_PANELS {
            return Ok(LiftPiece { a, b, h_a, u_a, v_a, u: u.clone(), v: v.clone(), uc, vc, panel: width, cumulative });
        }
        panels *= 2;
    }
}

impl LiftPiece {
    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.cumulative.len() - 1;
        let j = (((x - self.a) / self.panel).floor().max(0.0) as usize).min(n);
        let node = if j == n { self.b } else { self.a + j as f64 * self.panel };
        let mut centered = self.cumulative[j];
        if x > node {
            let (uc, vc) = (&self.uc, &self.vc);
            centered += 2.0
                * gauss_legendre(16, node, x, |t| uc.derivative(1, t) * vc.eval(t) - uc.eval(t) * vc.derivative(1, t));
        }
        self.h_a + centered + 2.0 * self.v_a * self.uc.eval(x) - 2.0 * self.u_a * self.vc.eval(x)
    }

    /// `D^k h(x)`; orders `k ≥ 1` from the Leibniz expansion.
    pub fn derivative(&self, k: usize, x: f64) -> f64 {
        if k == 0 {
            return self.eval(x);
        }
        let u: Vec<f64> = (0..=k).map(|i| self.u.derivative(i, x)).collect();
        let v: Vec<f64> = (0..=k).map(|i| self.v.derivative(i, x)).collect();
        lift_derivative(&u, &v, k)
    }
}

/// One gap of the assembled curve.
#[derive(Debug, Clone)]
pub struct GapCurve {
    /// `f + φ`.
    pub f: SmoothPiece,
    /// `g + ψ`.
    pub g: SmoothPiece,
    pub h: LiftPiece,
    pub phi: SmoothPiece,
    pub psi: SmoothPiece,
}

/// The assembled curve: jets on `K`, lifted perturbed extensions on the gaps.
#[derive(Debug, Clone)]
pub struct PiecewiseCurve {
    triple: JetTriple,
    gaps: Vec<GapCurve>,
}

impl PiecewiseCurve {
    pub fn m(&self) -> usize {
        self.triple.m()
    }

    pub fn triple(&self) -> &JetTriple {
        &self.triple
    }

    pub fn gaps(&self) -> &[GapCurve] {
        &self.gaps
    }

    pub fn hull(&self) -> (f64, f64) {
        self.triple.set().hull()
    }

    /// `D^k` of one coordinate at `x` in the hull, `k ≤ m`.
    pub fn derivative(&self, c: Coord, k: usize, x: f64) -> Result<f64> {
        if k > self.m() {
            return domain(format!("order {k} exceeds m = {}", self.m()));
        }
        match locate(self.triple.set(), x) {
            Some(Location::Component(_)) => self.triple.value(c, k, x),
            Some(Location::Gap(i)) => {
                let g = &self.gaps[i];
                Ok(match c {
                    Coord::F => g.f.derivative(k, x),
                    Coord::G => g.g.derivative(k, x),
                    Coord::H => g.h.derivative(k, x),
                })
            }
            None => domain(format!("point {x} is outside the hull of K")),
        }
    }

    pub fn eval(&self, x: f64) -> Result<[f64; 3]> {
        Ok([self.derivative(Coord::F, 0, x)?, self.derivative(Coord::G, 0, x)?, self.derivative(Coord::H, 0, x)?])
    }

    /// `|𝓗′ − 2(𝓕′𝓖 − 𝓖′𝓕)|` and the tolerance scale `1 + |𝓕′| + |𝓖′|` at `x`.
    pub fn horizontality_residual(&self, x: f64) -> Result<(f64, f64)> {
        let (f, g) = (self.derivative(Coord::F, 0, x)?, self.derivative(Coord::G, 0, x)?);
        let (f1, g1) = (self.derivative(Coord::F, 1, x)?, self.derivative(Coord::G, 1, x)?);
        let h1 = self.derivative(Coord::H, 1, x)?;
        Ok(((h1 - 2.0 * (f1 * g - g1 * f)).abs(), 1.0 + f1.abs() + g1.abs()))
    }

    /// CSV with `x, F, G, H` then `D{k}F, D{k}G, D{k}H` for `k = 1..=m`.
    pub fn write_csv<W: Write>(&self, out: W, xs: &[f64]) -> Result<()> {
        let m = self.m();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["x".to_string(), "F".into(), "G".into(), "H".into()];
        for k in 1..=m {
            for c in Coord::ALL {
                header.push(format!("D{k}{c}"));
            }
        }
        w.write_record(&header)?;
        for &x in xs {
            let mut row = vec![crate::fmt_f64(x)];
            for k in 0..=m {
                for c in Coord::ALL {
                    row.push(crate::fmt_f64(self.derivative(c, k, x)?));
                }
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Options for [`assemble_with`].
#[derive(Debug, Clone, Copy)]
pub struct AssembleOptions {
    pub max_pairs: usize,
    pub seed: u64,
    /// Points per axis for the hull-wide horizontality scan.
    pub hull_samples: usize,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        Self { max_pairs: DEFAULT_MAX_PAIRS, seed: 0, hull_samples: 2000 }
    }
}

/// Per-gap welding and regularity measurements.
#[derive(Debug, Clone, Serialize)]
pub struct GapWeld {
    pub a: f64,
    pub b: f64,
    /// Max over coordinates, endpoints and `k ≤ m` of the relative jet mismatch.
    pub jet_mismatch: f64,
    /// `max |D^k𝓕 − F^k(a)|, |D^k𝓖 − G^k(a)|` over samples, divided by `2C̃ω(b−a)`.
    pub deviation_ratio: f64,
    /// Sampled `D^m` modulus of `𝓕`, `𝓖` divided by `2C̃`.
    pub planar_modulus_ratio: f64,
    /// Sampled `D^m` modulus of `𝓗` (the constant `C₃` is not explicit).
    pub height_modulus: f64,
}

/// Everything checked while assembling.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub certification: CertReport,
    pub constants: Option<Constants>,
    pub gaps: Vec<GapDiagnostics>,
    pub welds: Vec<GapWeld>,
    pub max_jet_mismatch: f64,
    /// Max over hull samples of `residual / (1 + |𝓕′| + |𝓖′|)`.
    pub horizontality_max_residual: f64,
    pub max_goal_residual: f64,
    pub max_height_residual: f64,
    pub bounds_ok: bool,
    pub passed: bool,
}

/// Assemble with default options.
pub fn assemble(jt: &JetTriple, omega: &Modulus) -> Result<(PiecewiseCurve, VerificationReport)> {
    assemble_with(jt, omega, &AssembleOptions::default())
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
}

/// `max |D^m u(x_i) − D^m u(x_j)| / ω(|x_i − x_j|)` over power-of-two index gaps.
fn sampled_seminorm(values: &[(f64, f64)], omega: &Modulus) -> f64 {
    let mut worst: f64 = 0.0;
    let mut step = 1;
    while step < values.len() {
        for i in 0..values.len() - step {
            let ((x, u), (y, v)) = (values[i], values[i + step]);
            let w = omega.at((y - x).abs());
            if w > 0.0 {
                worst = worst.max((u - v).abs() / w);
            }
        }
        step *= 2;
    }
    worst
}

/// Remainder ratio `|D^k u(x) − D^k T(x)| / (ω(x − a)(x − a)^{m−k})` sampled
/// on the gap; roundoff-level numerators count as zero.
fn extension_remainder(u: &SmoothPiece, jet_a: &[f64], a: f64, b: f64, omega: &Modulus) -> Result<f64> {
    let m = jet_a.len() - 1;
    let taylor = Poly::taylor_local(jet_a)?;
    let mut worst: f64 = 0.0;
    for j in 2..=16 {
        let x = a + (b - a) * j as f64 / 16.0;
        let d = x - a;
        for k in 0..=m {
            let (du, dt) = (u.derivative(k, x), taylor.nth_derivative(k).eval(d));
            let num = du - dt;
            if num.abs() <= 1e-13 * (du.abs() + dt.abs()) {
                continue;
            }
            worst = worst.max(num.abs() / (omega.at(d) * d.powi((m - k) as i32)));
        }
    }
    Ok(worst)
}

/// Full pipeline: certify, extend `F` and `G`, perturb and lift every gap,
/// weld and verify.
pub fn assemble_with(
    jt: &JetTriple,
    omega: &Modulus,
    opts: &AssembleOptions,
) -> Result<(PiecewiseCurve, VerificationReport)> {
    let m = jt.m();
    let set = jt.set();
    let pairs = certify::default_pair_grid(jt, opts.max_pairs, opts.seed);
    let report = certify::certify_grid(jt, omega, &pairs)?;
    report.require_extendable()?;

    let fext = extend_field(jt.family(Coord::F), m, set)?;
    let gext = extend_field(jt.family(Coord::G), m, set)?;
    let gaps = set.gaps();
    if gaps.is_empty() {
        let curve = PiecewiseCurve { triple: jt.clone(), gaps: Vec::new() };
        let horizontality = hull_horizontality(&curve, opts.hull_samples)?;
        let passed = report.verdict.condition_2 && horizontality <= 1e-8;
        let verification = VerificationReport {
            certification: report,
            constants: None,
            gaps: Vec::new(),
            welds: Vec::new(),
            max_jet_mismatch: 0.0,
            horizontality_max_residual: horizontality,
            max_goal_residual: 0.0,
            max_height_residual: 0.0,
            bounds_ok: true,
            passed,
        };
        return Ok((curve, verification));
    }

    let problems: Vec<GapProblem> = (0..gaps.len())
        .into_par_iter()
        .map(|i| GapProblem::new(jt, omega, &fext.gap_pieces()[i], &gext.gap_pieces()[i]))
        .collect::<Result<_>>()?;

    // The certified constant must also dominate every quantity the gap
    // construction relies on, measured on this extension.
    let gap_sup = problems
        .par_iter()
        .zip(fext.gap_pieces().par_iter().zip(gext.gap_pieces().par_iter()))
        .map(|(gp, (fp, gpc))| -> Result<f64> {
            let (a, b) = (gp.a, gp.b);
            let v = velocity_omega(jt, omega, a, b)?;
            let big_a = area_discrepancy(jt, a, b)?;
            let mut s = safe_ratio(big_a, v).max(safe_ratio(gp.area_raw, v));
            s = s.max(extension_remainder(fp, &jt.jet(Coord::F, a)?, a, b, omega)?);
            s = s.max(extension_remainder(gpc, &jt.jet(Coord::G, a)?, a, b, omega)?);
            Ok(s)
        })
        .try_reduce(|| 0.0, |x, y| Ok(x.max(y)))?;
    let c = CONSTANT_SAFETY * 1f64.max(report.whitney_aggregate).max(report.ratio_sup_omega).max(gap_sup);
    if !c.is_finite() {
        return Err(Error::Certification { condition: 3, detail: format!("certified constant is not finite: {c}") });
    }
    let constants = Constants::new(c, m, set.diameter())?;

    let solved: Vec<(GapCurve, GapDiagnostics)> = problems
        .par_iter()
        .enumerate()
        .map(|(i, gp)| -> Result<(GapCurve, GapDiagnostics)> {
            let sol = perturb_gap(gp, &constants)?;
            let f = fext.gap_pieces()[i].add(&sol.phi);
            let g = gext.gap_pieces()[i].add(&sol.psi);
            let h = lift_gap(&f, &g, gp.a, jt.value(Coord::H, 0, gp.a)?)?;
            Ok((GapCurve { f, g, h, phi: sol.phi, psi: sol.psi }, sol.diagnostics))
        })
        .collect::<Result<_>>()?;
    let (gap_curves, diagnostics): (Vec<_>, Vec<_>) = solved.into_iter().unzip();
    let curve = PiecewiseCurve { triple: jt.clone(), gaps: gap_curves };

    let welds: Vec<GapWeld> =
        curve.gaps.par_iter().map(|gc| weld_report(&curve, gc, &constants, omega)).collect::<Result<_>>()?;
    let max_jet_mismatch = welds.iter().map(|w| w.jet_mismatch).fold(0.0, f64::max);
    if max_jet_mismatch > WELD_TOL {
        let w = welds.iter().find(|w| w.jet_mismatch == max_jet_mismatch).expect("maximum exists");
        return Err(Error::Construction(format!(
            "lifted curve misses the jets at gap ({}, {}) by {:e} (the height identity of the gap perturbation failed)",
            w.a, w.b, max_jet_mismatch
        )));
    }
    let horizontality = hull_horizontality(&curve, opts.hull_samples)?;
    let max_goal_residual = diagnostics.iter().map(|d| d.goal_residual).fold(0.0, f64::max);
    let max_height_residual = diagnostics.iter().map(|d| d.height_residual).fold(0.0, f64::max);
    let bounds_ok = diagnostics.iter().all(|d| d.bounds_ok)
        && welds.iter().all(|w| w.deviation_ratio <= 1.0 && w.planar_modulus_ratio <= 1.0);
    let passed = report.verdict.condition_2 && horizontality <= 1e-8;
    let verification = VerificationReport {
        certification: report,
        constants: Some(constants),
        gaps: diagnostics,
        welds,
        max_jet_mismatch,
        horizontality_max_residual: horizontality,
        max_goal_residual,
        max_height_residual,
        bounds_ok,
        passed,
    };
    Ok((curve, verification))
}

fn hull_horizontality(curve: &PiecewiseCurve, samples: usize) -> Result<f64> {
    let (lo, hi) = curve.hull();
    if lo == hi {
        return Ok(0.0);
    }
    // Sampled components only carry data at their nodes; elsewhere the
    // nearest-node Taylor expansion is not horizontal, so check the nodes.
    let jt = &curve.triple;
    let sampled: Vec<Option<Vec<f64>>> =
        (0..jt.set().len()).map(|i| Coord::ALL.iter().find_map(|&c| jt.family(c).sample_points(i))).collect();
    let mut xs: Vec<f64> = linspace(lo, hi, samples.max(2))
        .into_iter()
        .filter(|&x| jt.set().component_of(x).is_none_or(|i| sampled[i].is_none()))
        .collect();
    xs.extend(sampled.into_iter().flatten().flatten());
    xs.par_iter().map(|&x| curve.horizontality_residual(x).map(|(r, s)| r / s)).try_reduce(|| 0.0, |x, y| Ok(x.max(y)))
}

fn weld_report(curve: &PiecewiseCurve, gc: &GapCurve, constants: &Constants, omega: &Modulus) -> Result<GapWeld> {
    let jt = &curve.triple;
    let m = jt.m();
    let (a, b) = gc.f.domain();
    let piece = |c: Coord, k: usize, x: f64| match c {
        Coord::F => gc.f.derivative(k, x),
        Coord::G => gc.g.derivative(k, x),
        Coord::H => gc.h.derivative(k, x),
    };
    let mut jet_mismatch: f64 = 0.0;
    for c in Coord::ALL {
        for x in [a, b] {
            for k in 0..=m {
                let want = jt.value(c, k, x)?;
                jet_mismatch = jet_mismatch.max((piece(c, k, x) - want).abs() / want.abs().max(1.0));
            }
        }
    }
    let xs = linspace(a, b, 512);
    let bound = 2.0 * constants.c_tilde * omega.at(b - a);
    let mut deviation: f64 = 0.0;
    for &x in &xs {
        for k in 0..=m {
            deviation = deviation.max((gc.f.derivative(k, x) - jt.value(Coord::F, k, a)?).abs());
            deviation = deviation.max((gc.g.derivative(k, x) - jt.value(Coord::G, k, a)?).abs());
        }
    }
    let dm = |c: Coord| xs.iter().map(|&x| (x, piece(c, m, x))).collect::<Vec<_>>();
    let planar = sampled_seminorm(&dm(Coord::F), omega).max(sampled_seminorm(&dm(Coord::G), omega));
    Ok(GapWeld {
        a,
        b,
        jet_mismatch,
        deviation_ratio: deviation / bound,
        planar_modulus_ratio: planar / (2.0 * constants.c_tilde),
        height_modulus: sampled_seminorm(&dm(Coord::H), omega),
    })
}

/// Sampled `C^{m,ω}` seminorm: max over the three coordinates of
/// `|D^mΓ(x) − D^mΓ(y)| / ω(|x − y|)` on a stratified pair set.
///
/// Far pairs come from a uniform grid of `samples` points (all power-of-two
/// index distances); near pairs put a partner at geometric offsets from
/// `1e−6` up to the shortest gap beside every grid point.
pub fn seminorm_estimate(curve: &PiecewiseCurve, omega: &Modulus, samples: usize) -> Result<f64> {
    if samples < 2 {
        return domain("seminorm_estimate needs at least 2 samples");
    }
    let (lo, hi) = curve.hull();
    if lo == hi {
        return Ok(0.0);
    }
    let m = curve.m();
    let xs = linspace(lo, hi, samples);
    let gap_scale = curve.triple.set().gaps().iter().map(|&(a, b)| b - a).fold(hi - lo, f64::min);
    let mut offsets = Vec::new();
    let mut d = 1e-6f64.min(gap_scale);
    while d <= gap_scale {
        offsets.push(d);
        d *= 2.0;
    }
    Coord::ALL
        .par_iter()
        .map(|&c| -> Result<f64> {
            let values = xs.iter().map(|&x| Ok((x, curve.derivative(c, m, x)?))).collect::<Result<Vec<_>>>()?;
            let mut worst = sampled_seminorm(&values, omega);
            for &(x, u) in &values {
                for &d in &offsets {
                    let y = if x + d <= hi { x + d } else { x - d };
                    if y < lo {
                        continue;
                    }
                    let v = curve.derivative(c, m, y)?;
                    worst = worst.max((u - v).abs() / omega.at(d));
                }
            }
            Ok(worst)
        })
        .try_reduce(|| 0.0, |x, y| Ok(x.max(y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compact::CompactSet;
    use crate::jet::{ComponentJet, JetFamily};

    fn piece_of(p: Poly, lo: f64, hi: f64) -> SmoothPiece {
        SmoothPiece::from_terms(lo, hi, vec![Term::new(p, 0.0, Factor::One)])
    }

    #[test]
    fn lift_of_zero_is_constant() {
        let z = SmoothPiece::zero(0.0, 1.0);
        let h = lift_gap(&z, &z, 0.0, 0.7).unwrap();
        assert!((0..=10).all(|i| h.eval(i as f64 / 10.0) == 0.7));
    }

    #[test]
    fn lift_of_symmetric_pair_is_constant() {
        let x = piece_of(Poly::x(), 0.0, 1.0);
        let h = lift_gap(&x, &x, 0.0, -0.2).unwrap();
        for i in 0..=10 {
            assert!((h.eval(i as f64 / 10.0) + 0.2).abs() < 1e-15);
            assert!(h.derivative(1, i as f64 / 10.0).abs() < 1e-15);
        }
    }

    #[test]
    fn lift_of_polynomial_pair_matches_closed_form() {
        // u = 1 + x, v = x²: 2(u′v − uv′) = 2(x² − 2x − 2x²) = −2x² − 4x.
        let u = piece_of(Poly::new(vec![1.0, 1.0]), 0.0, 2.0);
        let v = piece_of(Poly::new(vec![0.0, 0.0, 1.0]), 0.0, 2.0);
        let h = lift_gap(&u, &v, 0.0, 0.5).unwrap();
        let exact = Poly::new(vec![0.5, 0.0, -2.0, -2.0 / 3.0]);
        for i in 0..=40 {
            let x = 2.0 * i as f64 / 40.0;
            assert!((h.eval(x) - exact.eval(x)).abs() < 1e-13, "x={x}");
            for k in 1..=3 {
                assert!((h.derivative(k, x) - exact.nth_derivative(k).eval(x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_component_curve_is_the_jets() {
        let k = CompactSet::from_intervals(&[(0.0, 1.0)]).unwrap();
        let f = JetFamily::new(vec![ComponentJet::from_poly(&Poly::new(vec![0.0, 0.0, 0.5]), 1)]);
        let z = JetFamily::new(vec![ComponentJet::zero(1)]);
        let jt = JetTriple::new(1, k, f, z.clone(), z).unwrap();
        let (curve, report) = assemble(&jt, &Modulus::linear()).unwrap();
        assert!(report.passed);
        assert!(curve.gaps().is_empty());
        assert_eq!(curve.eval(0.5).unwrap(), [0.125, 0.0, 0.0]);
        let s = seminorm_estimate(&curve, &Modulus::linear(), 200).unwrap();
        assert!((s - 1.0).abs() < 1e-6, "{s}");
    }

    #[test]
    fn zero_jets_with_constant_height() {
        let k = CompactSet::from_intervals(&[(0.0, 0.2), (0.5, 0.5), (0.8, 1.0)]).unwrap();
        let z = || JetFamily::new(vec![ComponentJet::zero(2); 3]);
        let hc = JetFamily::new(vec![
            ComponentJet::from_poly(&Poly::constant(0.3), 2),
            ComponentJet::Point(vec![0.3, 0.0, 0.0]),
            ComponentJet::from_poly(&Poly::constant(0.3), 2),
        ]);
        let jt = JetTriple::new(2, k, z(), z(), hc).unwrap();
        let (curve, report) = assemble(&jt, &Modulus::linear()).unwrap();
        assert!(report.passed, "{report:?}");
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            assert_eq!(curve.eval(x).unwrap(), [0.0, 0.0, 0.3]);
        }
    }
}
