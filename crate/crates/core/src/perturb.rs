//! Gap perturbations `φ, ψ` that steer the horizontal lift of the Euclidean
//! extension `(f, g)` onto the prescribed height `H(b)`.
//!
//! Everything is computed in the frame left-translated so that
//! `F(a) = G(a) = H(a) = 0`; the perturbations only see `f′`, `g′`, so they
//! are the same in either frame.

use serde::Serialize;

use crate::bump::bump_sup_norm;
use crate::error::{domain, Error, Result};
use crate::jet::{Coord, JetTriple};
use crate::modulus::Modulus;
use crate::poly::Poly;
use crate::quad::{simpson_rel, simpson_scaled};
use crate::whitney::{Factor, SmoothPiece, Term};

/// Relative tolerance for every non-polynomial integral in this module.
pub const QUAD_REL_TOL: f64 = 1e-12;
/// `𝒜` below this multiple of the lift's natural scale is treated as zero.
pub const NEGLIGIBLE_AREA: f64 = 1e-11;
/// Tolerance on the goal and height identities.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Tolerance on endpoint flatness of `φ`, `ψ`.
pub const FLATNESS_TOL: f64 = 1e-11;
/// Relative slack allowed when checking the mollifier's inequalities, some of
/// which are attained with equality at the edges of the sampled regions.
pub const CHECK_SLACK: f64 = 1e-12;

const E98: f64 = 3.080_216_848_918_031_6; // e^{9/8}

/// The constants of the construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    pub m: usize,
    pub diam: f64,
    /// Certified constant.
    pub c: f64,
    pub c0_hat: f64,
    /// Mollifier constant.
    pub c0: f64,
    /// `√(6C(1 + 2CC₀))`.
    pub b: f64,
    /// Bound constant for the rescaled mollifiers of the both-small case.
    pub c1: f64,
    /// `max(CC₀, 6C₁)`.
    pub c_tilde: f64,
}

impl Constants {
    pub fn new(c: f64, m: usize, diam: f64) -> Result<Self> {
        if m == 0 {
            return domain("m must be at least 1");
        }
        if !(c >= 1.0 && c.is_finite()) {
            return domain(format!("certified constant must be finite and >= 1, got {c}"));
        }
        if !(diam >= 0.0 && diam.is_finite()) {
            return domain(format!("diameter must be finite and >= 0, got {diam}"));
        }
        let (c0_hat, c0) = mollifier_constants(m, diam);
        Ok(Self::with_c0(c, m, diam, c0_hat, c0))
    }

    /// Constants with an explicit `(Ĉ₀, C₀)`; the dispatch thresholds follow.
    pub fn with_c0(c: f64, m: usize, diam: f64, c0_hat: f64, c0: f64) -> Self {
        let b = (6.0 * c * (1.0 + 2.0 * c * c0)).sqrt();
        let mm = (m * m) as f64;
        let c1 = (b * c0 / (48.0 * mm)).max(1.0);
        Self { m, diam, c, c0_hat, c0, b, c1, c_tilde: (c * c0).max(6.0 * c1) }
    }
}

/// `(Ĉ₀, C₀)` with `Ĉ₀ = max_i 48e^{9/8}36^i m^{2i+2}(‖D^iφ‖ + 1)(diam^{m−i} + 1)`
/// and `C₀ = 36m²Ĉ₀(‖D^{m+1}φ‖ + 1)`.
pub fn mollifier_constants(m: usize, diam: f64) -> (f64, f64) {
    let mf = m as f64;
    let c0_hat = (0..=m)
        .map(|i| {
            48.0 * E98
                * 36f64.powi(i as i32)
                * mf.powi(2 * i as i32 + 2)
                * (bump_sup_norm(i) + 1.0)
                * (diam.powi((m - i) as i32) + 1.0)
        })
        .fold(1.0, f64::max);
    (c0_hat, c0_hat * 36.0 * mf * mf * (bump_sup_norm(m + 1) + 1.0))
}

/// Parameters of a mollifier `η = sign · amplitude · φ(2(x − x₀)/ℓ(J))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MollifierSpec {
    pub gap: (f64, f64),
    pub j: (f64, f64),
    pub amplitude: f64,
    pub sign: f64,
    pub m: usize,
    pub omega_gap: f64,
}

impl MollifierSpec {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.j.0 + self.j.1)
    }

    pub fn piece(&self) -> SmoothPiece {
        let (lo, hi) = self.j;
        SmoothPiece::from_terms(
            self.gap.0,
            self.gap.1,
            vec![Term::new(
                Poly::constant(self.sign * self.amplitude),
                self.midpoint(),
                Factor::Bump { center: self.midpoint(), half_width: 0.5 * (hi - lo) },
            )],
        )
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let sign = if factor < 0.0 { -self.sign } else { self.sign };
        Self { amplitude: self.amplitude * factor.abs(), sign, ..*self }
    }
}

/// The basic mollifier on `J ⊆ [a, b]`:
/// `η(x) = 48e^{9/8}m²ω(b−a)(b−a)^m φ(2(x − x₀)/ℓ(J))`.
pub fn build_mollifier(j: (f64, f64), gap: (f64, f64), omega: &Modulus, m: usize) -> Result<MollifierSpec> {
    let (a, b) = gap;
    if !(a < b) {
        return domain(format!("gap needs a < b, got ({a}, {b})"));
    }
    if m == 0 {
        return domain("m must be at least 1");
    }
    let h = b - a;
    let mm = (m * m) as f64;
    if !(a <= j.0 && j.0 < j.1 && j.1 <= b) {
        return domain(format!("J = [{}, {}] is not a subinterval of [{a}, {b}]", j.0, j.1));
    }
    if j.1 - j.0 < h / (18.0 * mm) * (1.0 - 1e-12) {
        return domain(format!("J has length {} < (b − a)/18m² = {}", j.1 - j.0, h / (18.0 * mm)));
    }
    let omega_gap = omega.at(h);
    Ok(MollifierSpec { gap, j, amplitude: 48.0 * E98 * mm * omega_gap * h.powi(m as i32), sign: 1.0, m, omega_gap })
}

/// Sampled certificate of the mollifier inequalities (a)–(f).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MollifierCheck {
    /// Largest `|η|` outside `J`.
    pub outside_max: f64,
    /// `min η / (48m²ωh^m)` on the middle third of `J`.
    pub middle_ratio: f64,
    /// `min η′ / (81m²ωh^{m−1})` on the second sixth of `J`.
    pub slope_ratio: f64,
    /// `max η / (C₀ωh^m)`.
    pub height_ratio: f64,
    /// `max_i max |D^iη| / (C₀ω)`.
    pub derivative_ratio: f64,
    /// `max |D^mη(x) − D^mη(y)| / (C₀ω(|x − y|))` over sampled pairs.
    pub modulus_ratio: f64,
    pub passed: bool,
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

/// `max |D^m u(x_i) − D^m u(x_j)| / (scale · ω(|x_i − x_j|))` over index
/// distances that are powers of two.
fn sampled_modulus(dm: &[(f64, f64)], omega: &Modulus, scale: f64) -> f64 {
    let mut worst: f64 = 0.0;
    let mut step = 1;
    while step < dm.len() {
        for w in 0..dm.len() - step {
            let ((x, u), (y, v)) = (dm[w], dm[w + step]);
            let r = (u - v).abs() / (scale * omega.at((y - x).abs()));
            if r.is_finite() {
                worst = worst.max(r);
            }
        }
        step *= 2;
    }
    worst
}

/// Check (a)–(f) at `samples` points per region.
pub fn check_mollifier(spec: &MollifierSpec, omega: &Modulus, c0: f64, samples: usize) -> MollifierCheck {
    let (a, b) = spec.gap;
    let (jl, jr) = spec.j;
    let (h, m, w) = (b - a, spec.m, spec.omega_gap);
    let mm = (m * m) as f64;
    let eta = spec.piece();
    let ell = jr - jl;

    let outside_max =
        linspace(a, b, samples).filter(|&x| x < jl || x > jr).map(|x| eta.eval(x).abs()).fold(0.0, f64::max);
    let middle_floor = 48.0 * mm * w * h.powi(m as i32);
    let middle_ratio = linspace(jl + ell / 3.0, jr - ell / 3.0, samples)
        .map(|x| spec.sign * eta.eval(x) / middle_floor)
        .fold(f64::INFINITY, f64::min);
    let slope_floor = 81.0 * mm * w * h.powi(m as i32 - 1);
    let slope_ratio = linspace(jl + ell / 6.0, jl + ell / 3.0, samples)
        .map(|x| spec.sign * eta.derivative(1, x) / slope_floor)
        .fold(f64::INFINITY, f64::min);
    let xs: Vec<f64> = linspace(a, b, samples).collect();
    let height_ratio = xs.iter().map(|&x| eta.eval(x).abs()).fold(0.0, f64::max) / (c0 * w * h.powi(m as i32));
    let derivative_ratio = xs
        .iter()
        .flat_map(|&x| (0..=m).map(move |i| (i, x)))
        .map(|(i, x)| eta.derivative(i, x).abs())
        .fold(0.0, f64::max)
        / (c0 * w);
    let dm: Vec<(f64, f64)> = xs.iter().map(|&x| (x, eta.derivative(m, x))).collect();
    let modulus_ratio = sampled_modulus(&dm, omega, c0);

    let ok = |r: f64, floor: bool| if floor { r >= 1.0 - CHECK_SLACK } else { r <= 1.0 + CHECK_SLACK };
    MollifierCheck {
        outside_max,
        middle_ratio,
        slope_ratio,
        height_ratio,
        derivative_ratio,
        modulus_ratio,
        passed: outside_max == 0.0
            && ok(middle_ratio, true)
            && ok(slope_ratio, true)
            && ok(height_ratio, false)
            && ok(derivative_ratio, false)
            && ok(modulus_ratio, false),
    }
}

/// One gap `(a, b)` of `K` with the Euclidean extension on it, centered.
#[derive(Debug, Clone)]
pub struct GapProblem {
    pub a: f64,
    pub b: f64,
    pub m: usize,
    pub omega: Modulus,
    /// `f − F(a)` on `[a, b]`.
    pub f: SmoothPiece,
    /// `g − G(a)` on `[a, b]`.
    pub g: SmoothPiece,
    /// Height increment in the centered frame, `Ĥ(b)`.
    pub height: f64,
    /// `|H(b)| + |H(a)| + 2|G(a)F(b)| + 2|F(a)G(b)|`, the size of the terms of `Ĥ(b)`.
    pub height_scale: f64,
    /// `𝒜` as computed.
    pub area_raw: f64,
    /// `𝒜` after the negligibility cut.
    pub area: f64,
    pub area_negligible: bool,
    pub omega_gap: f64,
    /// `(T_aF)′` in powers of `x − a`.
    pub tf_prime: Poly,
    pub tg_prime: Poly,
    pub tf_prime_int: f64,
    pub tg_prime_int: f64,
}

/// `∫_lo^hi u` with the module's relative tolerance.
fn integrate(u: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
    if lo >= hi {
        return Ok(0.0);
    }
    simpson_rel(u, lo, hi, QUAD_REL_TOL)
}

/// `∫_lo^hi u` with the tolerance relative to `∫|terms|`.
fn integrate_terms(u: &dyn Fn(f64) -> f64, terms: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
    if lo >= hi {
        return Ok(0.0);
    }
    simpson_scaled(u, terms, lo, hi, QUAD_REL_TOL)
}

/// `2∫_a^b (f′g − g′f)` and the size of its terms, `2∫_a^b (|f′g| + |g′f|)`.
pub fn lift_integral(f: &SmoothPiece, g: &SmoothPiece, a: f64, b: f64) -> Result<(f64, f64)> {
    let integrand = |x: f64| f.derivative(1, x) * g.eval(x) - g.derivative(1, x) * f.eval(x);
    let terms = |x: f64| (f.derivative(1, x) * g.eval(x)).abs() + (g.derivative(1, x) * f.eval(x)).abs();
    let v = integrate_terms(&integrand, &terms, a, b)?;
    let s = integrate(&terms, a, b)?;
    Ok((2.0 * v, 2.0 * s))
}

impl GapProblem {
    /// Center the pieces `f`, `g` (defined on the gap `[a, b]`) at `a` and
    /// compute `𝒜` and the Taylor speeds.
    pub fn new(jt: &JetTriple, omega: &Modulus, f: &SmoothPiece, g: &SmoothPiece) -> Result<Self> {
        let (a, b) = f.domain();
        if !(a < b) || g.domain() != (a, b) {
            return domain("gap pieces must share a nondegenerate domain");
        }
        let m = jt.m();
        let (fa, ga, ha) = (jt.value(Coord::F, 0, a)?, jt.value(Coord::G, 0, a)?, jt.value(Coord::H, 0, a)?);
        let (fb, gb, hb) = (jt.value(Coord::F, 0, b)?, jt.value(Coord::G, 0, b)?, jt.value(Coord::H, 0, b)?);
        let shift = |p: &SmoothPiece, c: f64| {
            if c == 0.0 {
                p.clone()
            } else {
                p.add(&SmoothPiece::from_terms(a, b, vec![Term::new(Poly::constant(-c), a, Factor::One)]))
            }
        };
        let (fc, gc) = (shift(f, fa), shift(g, ga));
        let height = hb - ha - 2.0 * ga * fb + 2.0 * fa * gb;
        let height_scale = hb.abs() + ha.abs() + 2.0 * (ga * fb).abs() + 2.0 * (fa * gb).abs();
        let (lift, lift_abs) = lift_integral(&fc, &gc, a, b)?;
        let area_raw = height - lift;
        let area_negligible = area_raw.abs() <= NEGLIGIBLE_AREA * (height_scale + lift_abs);
        let tf_prime = Poly::taylor_local(&jt.jet(Coord::F, a)?)?.derivative();
        let tg_prime = Poly::taylor_local(&jt.jet(Coord::G, a)?)?.derivative();
        let h = b - a;
        Ok(Self {
            a,
            b,
            m,
            omega: omega.clone(),
            f: fc,
            g: gc,
            height,
            height_scale,
            area_raw,
            area: if area_negligible { 0.0 } else { area_raw },
            area_negligible,
            omega_gap: omega.at(h),
            tf_prime_int: tf_prime.integral_abs(0.0, h)?,
            tg_prime_int: tg_prime.integral_abs(0.0, h)?,
            tf_prime,
            tg_prime,
        })
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    /// `V_ω(a, b)` from the stored Taylor speeds.
    pub fn velocity(&self) -> f64 {
        let hm = self.len().powi(self.m as i32);
        let w = self.omega_gap;
        w * w * hm * hm + w * hm * (self.tf_prime_int + self.tg_prime_int)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Case {
    FBig,
    GBig,
    BothSmall,
}

/// Which of the three constructions applies; `F_BIG` wins ties.
pub fn dispatch_case(gp: &GapProblem, constants: &Constants) -> Case {
    let threshold = constants.c * constants.c0 * gp.omega_gap * gp.len().powi(gp.m as i32);
    let (sf, sg) = (gp.tf_prime_int, gp.tg_prime_int);
    if sf >= sg.max(threshold) {
        Case::FBig
    } else if sg >= sf.max(threshold) {
        Case::GBig
    } else {
        Case::BothSmall
    }
}

/// A pair of perturbations with how they were obtained.
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub phi: SmoothPiece,
    pub psi: SmoothPiece,
    pub case: Case,
    /// Sub-case 1, 2 or 3 of the both-small construction.
    pub sub_case: Option<u8>,
    pub lambda: Option<f64>,
    pub mollifiers: Vec<MollifierSpec>,
}

/// Mollifier on the large-derivative subinterval of `(T_a·)′`, signed like it.
fn steering_mollifier(gp: &GapProblem, t_prime: &Poly) -> Result<Option<MollifierSpec>> {
    let h = gp.len();
    let (l, r) = match t_prime.big_subinterval(0.0, h) {
        Ok(j) => j,
        Err(Error::Degenerate(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let sign = if t_prime.eval(0.5 * (l + r)) < 0.0 { -1.0 } else { 1.0 };
    let mut spec = build_mollifier((gp.a + l, gp.a + r), (gp.a, gp.b), &gp.omega, gp.m)?;
    spec.sign = sign;
    Ok(Some(spec))
}

fn weighted_integral(spec: &MollifierSpec, u: impl Fn(f64) -> f64) -> Result<f64> {
    let eta = spec.piece();
    integrate(&|x| eta.eval(x) * u(x), spec.j.0, spec.j.1)
}

/// `φ ≡ 0`, `ψ = 𝒜/(4∫ηf′) · η`.
pub fn solve_fbig(gp: &GapProblem) -> Result<Perturbation> {
    let zero = SmoothPiece::zero(gp.a, gp.b);
    let trivial = |mollifiers| Perturbation {
        phi: zero.clone(),
        psi: zero.clone(),
        case: Case::FBig,
        sub_case: None,
        lambda: None,
        mollifiers,
    };
    if gp.area == 0.0 {
        return Ok(trivial(Vec::new()));
    }
    let Some(spec) = steering_mollifier(gp, &gp.tf_prime)? else {
        return Ok(trivial(Vec::new()));
    };
    let integral = weighted_integral(&spec, |x| gp.f.derivative(1, x))?;
    if integral.abs() < 1e-300 {
        return Err(Error::Numerical(format!(
            "∫ηf′ = {integral:e} on gap ({}, {}) with 𝒜 = {:e}",
            gp.a, gp.b, gp.area
        )));
    }
    let psi_spec = spec.scaled(gp.area / (4.0 * integral));
    Ok(Perturbation { psi: psi_spec.piece(), mollifiers: vec![spec], ..trivial(Vec::new()) })
}

/// `ψ ≡ 0`, `φ = −𝒜/(4∫ξg′) · ξ`.
pub fn solve_gbig(gp: &GapProblem) -> Result<Perturbation> {
    let zero = SmoothPiece::zero(gp.a, gp.b);
    let trivial = Perturbation {
        phi: zero.clone(),
        psi: zero,
        case: Case::GBig,
        sub_case: None,
        lambda: None,
        mollifiers: Vec::new(),
    };
    if gp.area == 0.0 {
        return Ok(trivial);
    }
    let Some(spec) = steering_mollifier(gp, &gp.tg_prime)? else {
        return Ok(trivial);
    };
    let integral = weighted_integral(&spec, |x| gp.g.derivative(1, x))?;
    if integral.abs() < 1e-300 {
        return Err(Error::Numerical(format!(
            "∫ξg′ = {integral:e} on gap ({}, {}) with 𝒜 = {:e}",
            gp.a, gp.b, gp.area
        )));
    }
    let phi_spec = spec.scaled(-gp.area / (4.0 * integral));
    Ok(Perturbation { phi: phi_spec.piece(), mollifiers: vec![spec], ..trivial })
}

/// The both-small construction with its three sub-cases.
pub fn solve_both_small(gp: &GapProblem, constants: &Constants) -> Result<Perturbation> {
    let (a, b, m) = (gp.a, gp.b, gp.m);
    let h = gp.len();
    let mm = (m * m) as f64;
    let zero = SmoothPiece::zero(a, b);
    let mut out = Perturbation {
        phi: zero.clone(),
        psi: zero,
        case: Case::BothSmall,
        sub_case: Some(1),
        lambda: None,
        mollifiers: Vec::new(),
    };
    if gp.area == 0.0 {
        return Ok(out);
    }
    let xi = build_mollifier((a, b), (a, b), &gp.omega, m)?.scaled(constants.b / (81.0 * mm));
    let eta = build_mollifier((a + h / 6.0, a + h / 3.0), (a, b), &gp.omega, m)?.scaled(constants.b / (48.0 * mm));
    out.mollifiers = vec![xi, eta];
    let xi_piece = xi.piece();
    let eta_f = weighted_integral(&eta, |x| gp.f.derivative(1, x))?;
    let xi_g = weighted_integral(&xi, |x| gp.g.derivative(1, x))?;
    let abs_area = gp.area.abs();

    if eta_f.abs() >= abs_area / 24.0 {
        out.psi = eta.scaled(gp.area / (4.0 * eta_f)).piece();
        return Ok(out);
    }
    if xi_g.abs() >= abs_area / 24.0 {
        out.sub_case = Some(2);
        out.phi = xi.scaled(-gp.area / (4.0 * xi_g)).piece();
        return Ok(out);
    }

    out.sub_case = Some(3);
    let eta_xi = weighted_integral(&eta, |x| xi_piece.derivative(1, x))?;
    let s = gp.area.signum();
    let slope = 4.0 * (eta_f + eta_xi);
    let big_f = |lambda: f64| lambda * slope - s * 4.0 * xi_g;
    let (f0, f1) = (big_f(0.0), big_f(1.0));
    if !(f0 < abs_area / 6.0) {
        return Err(Error::Construction(format!(
            "𝓕(0) = {f0:e} is not below |𝒜|/6 = {:e} on gap ({a}, {b})",
            abs_area / 6.0
        )));
    }
    if !(f1 > abs_area) {
        return Err(Error::Construction(format!(
            "𝓕(1) = {f1:e} does not exceed |𝒜| = {abs_area:e} on gap ({a}, {b}); |𝒜| ≤ CV fails for the supplied C"
        )));
    }
    let tol = 1e-12 * abs_area.max(1.0);
    let mut lambda = ((abs_area + s * 4.0 * xi_g) / slope).clamp(0.0, 1.0);
    if (big_f(lambda) - abs_area).abs() > tol {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            lambda = 0.5 * (lo + hi);
            let v = big_f(lambda) - abs_area;
            if v.abs() <= tol {
                break;
            }
            if v < 0.0 {
                lo = lambda;
            } else {
                hi = lambda;
            }
        }
    }
    out.lambda = Some(lambda);
    out.phi = xi_piece;
    out.psi = eta.scaled(s * lambda).piece();
    Ok(out)
}

/// Postcondition measurements for one gap.
#[derive(Debug, Clone, Serialize)]
pub struct GapDiagnostics {
    pub a: f64,
    pub b: f64,
    pub case: Case,
    pub sub_case: Option<u8>,
    pub lambda: Option<f64>,
    pub area: f64,
    pub area_raw: f64,
    pub area_negligible: bool,
    pub velocity: f64,
    pub constants: Constants,
    pub mollifiers: Vec<MollifierSpec>,
    /// `max_k` of `|D^kφ|`, `|D^kψ|` at both endpoints.
    pub endpoint_flatness: f64,
    /// `max_k sup |D^kφ|, |D^kψ|` over samples, divided by `C̃ω(b−a)`.
    pub bound_ratio: f64,
    /// Sampled `D^m` modulus of `φ`, `ψ`, divided by `C̃`.
    pub modulus_ratio: f64,
    /// `|4∫(ψf′ − φg′ + ψφ′) − 𝒜| / |𝒜|` (0 when `𝒜 = 0` and `φ = ψ = 0`).
    pub goal_residual: f64,
    /// Height identity residual relative to the size of its terms.
    pub height_residual: f64,
    /// Whether the bound and modulus ratios are at most 1.
    pub bounds_ok: bool,
}

/// A solved gap.
#[derive(Debug, Clone)]
pub struct GapSolution {
    pub phi: SmoothPiece,
    pub psi: SmoothPiece,
    pub diagnostics: GapDiagnostics,
}

const DIAGNOSTIC_SAMPLES: usize = 2000;

/// Dispatch, construct and verify the perturbations on one gap.
pub fn perturb_gap(gp: &GapProblem, constants: &Constants) -> Result<GapSolution> {
    let p = match dispatch_case(gp, constants) {
        Case::FBig => solve_fbig(gp)?,
        Case::GBig => solve_gbig(gp)?,
        Case::BothSmall => solve_both_small(gp, constants)?,
    };
    let (a, b, m) = (gp.a, gp.b, gp.m);
    let (phi, psi) = (&p.phi, &p.psi);

    let endpoint_flatness = (0..=m)
        .flat_map(|k| [phi.derivative(k, a), phi.derivative(k, b), psi.derivative(k, a), psi.derivative(k, b)])
        .map(f64::abs)
        .fold(0.0, f64::max);

    let xs: Vec<f64> = linspace(a, b, DIAGNOSTIC_SAMPLES).collect();
    let bound = constants.c_tilde * gp.omega_gap;
    let sup = xs
        .iter()
        .flat_map(|&x| (0..=m).flat_map(move |k| [phi.derivative(k, x), psi.derivative(k, x)]))
        .map(f64::abs)
        .fold(0.0, f64::max);
    let bound_ratio = if sup == 0.0 { 0.0 } else { sup / bound };
    let dm = |u: &SmoothPiece| xs.iter().map(|&x| (x, u.derivative(m, x))).collect::<Vec<_>>();
    let modulus_ratio = sampled_modulus(&dm(phi), &gp.omega, constants.c_tilde).max(sampled_modulus(
        &dm(psi),
        &gp.omega,
        constants.c_tilde,
    ));

    let goal_integrand = |x: f64| {
        psi.eval(x) * gp.f.derivative(1, x) - phi.eval(x) * gp.g.derivative(1, x) + psi.eval(x) * phi.derivative(1, x)
    };
    let goal_terms = |x: f64| {
        (psi.eval(x) * gp.f.derivative(1, x)).abs()
            + (phi.eval(x) * gp.g.derivative(1, x)).abs()
            + (psi.eval(x) * phi.derivative(1, x)).abs()
    };
    let goal =
        if phi.is_zero() && psi.is_zero() { 0.0 } else { 4.0 * integrate_terms(&goal_integrand, &goal_terms, a, b)? };
    let goal_residual = if gp.area == 0.0 { goal.abs() } else { (goal - gp.area).abs() / gp.area.abs() };

    let (ff, gg) = (gp.f.add(phi), gp.g.add(psi));
    let (lift, lift_abs) = lift_integral(&ff, &gg, a, b)?;
    let scale = gp.height_scale.max(lift_abs);
    let height_residual = if scale == 0.0 { 0.0 } else { (gp.height - lift).abs() / scale };

    let diagnostics = GapDiagnostics {
        a,
        b,
        case: p.case,
        sub_case: p.sub_case,
        lambda: p.lambda,
        area: gp.area,
        area_raw: gp.area_raw,
        area_negligible: gp.area_negligible,
        velocity: gp.velocity(),
        constants: *constants,
        mollifiers: p.mollifiers.clone(),
        endpoint_flatness,
        bound_ratio,
        modulus_ratio,
        goal_residual,
        height_residual,
        bounds_ok: bound_ratio <= 1.0 + CHECK_SLACK && modulus_ratio <= 1.0 + CHECK_SLACK,
    };
    if endpoint_flatness > FLATNESS_TOL {
        return Err(Error::Construction(format!(
            "perturbations on gap ({a}, {b}) are not flat at the endpoints: {endpoint_flatness:e}"
        )));
    }
    if goal_residual > IDENTITY_TOL {
        return Err(Error::Construction(format!(
            "goal identity residual {goal_residual:e} on gap ({a}, {b}), case {:?}",
            p.case
        )));
    }
    if !gp.area_negligible && height_residual > IDENTITY_TOL {
        return Err(Error::Construction(format!(
            "height identity residual {height_residual:e} on gap ({a}, {b}), case {:?}",
            p.case
        )));
    }
    Ok(GapSolution { phi: p.phi, psi: p.psi, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compact::CompactSet;
    use crate::jet::{ComponentJet, JetFamily};
    use crate::whitney::whitney_extend_gap;

    #[test]
    fn mollifier_midpoint_and_support() {
        let w = Modulus::linear();
        let spec = build_mollifier((0.2, 0.6), (0.0, 1.0), &w, 2).unwrap();
        let eta = spec.piece();
        let want = 48.0 * (9.0f64 / 8.0).exp() * 4.0 * 1.0 * 1.0 * (-1f64).exp();
        assert!((eta.eval(0.4) - want).abs() < 1e-12 * want);
        for k in 0..=3 {
            assert_eq!(eta.derivative(k, 0.2), 0.0);
            assert_eq!(eta.derivative(k, 0.6), 0.0);
            assert_eq!(eta.derivative(k, 0.0), 0.0);
        }
        assert!(build_mollifier((0.2, 0.2001), (0.0, 1.0), &w, 2).is_err());
        assert!(build_mollifier((0.2, 1.2), (0.0, 1.0), &w, 2).is_err());
    }

    #[test]
    fn mollifier_certificate_holds() {
        for m in 1..=3 {
            let (_, c0) = mollifier_constants(m, 2.0);
            for (j, gap) in [((0.1, 0.4), (0.0, 1.0)), ((0.0, 1.0), (0.0, 1.0)), ((1.5, 1.5 + 0.3 / 18.0), (1.2, 1.5))]
            {
                let j = if j.1 > gap.1 { (gap.1 - (gap.1 - gap.0) / (18.0 * (m * m) as f64), gap.1) } else { j };
                let spec = build_mollifier(j, gap, &Modulus::power(0.5).unwrap(), m).unwrap();
                let chk = check_mollifier(&spec, &Modulus::power(0.5).unwrap(), c0, 2000);
                assert!(chk.passed, "m={m} j={j:?} {chk:?}");
                assert!(chk.middle_ratio >= 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn constants_follow_their_formulas() {
        let (c0_hat, c0) = mollifier_constants(1, 1.0);
        let e98 = (9.0f64 / 8.0).exp();
        let i0 = 48.0 * e98 * (bump_sup_norm(0) + 1.0) * 2.0;
        let i1 = 48.0 * e98 * 36.0 * (bump_sup_norm(1) + 1.0) * 2.0;
        assert!((c0_hat - i0.max(i1)).abs() < 1e-9 * c0_hat);
        assert!((c0 - c0_hat * 36.0 * (bump_sup_norm(2) + 1.0)).abs() < 1e-9 * c0);
        let k = Constants::new(2.0, 1, 1.0).unwrap();
        assert!((k.b - (12.0 * (1.0 + 4.0 * c0)).sqrt()).abs() < 1e-9 * k.b);
        assert_eq!(k.c_tilde, (2.0 * c0).max(6.0 * k.c1));
        assert!(Constants::new(0.5, 1, 1.0).is_err());
    }

    /// Gap (0, 1) of K = {0} ∪ {1} with polynomial f, g and heights.
    fn problem(m: usize, f: &Poly, g: &Poly, h0: f64, h1: f64) -> GapProblem {
        let k = CompactSet::from_intervals(&[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        let jet = |p: &Poly, x: f64| (0..=m).map(|i| p.nth_derivative(i).eval(x)).collect::<Vec<_>>();
        let fam = |p: &Poly| JetFamily::new(vec![ComponentJet::Point(jet(p, 0.0)), ComponentJet::Point(jet(p, 1.0))]);
        let mut hj = vec![0.0; m + 1];
        hj[0] = h0;
        let mut hj1 = vec![0.0; m + 1];
        hj1[0] = h1;
        let h = JetFamily::new(vec![ComponentJet::Point(hj), ComponentJet::Point(hj1)]);
        let jt = JetTriple::new(m, k, fam(f), fam(g), h).unwrap();
        let fp = whitney_extend_gap(&jet(f, 0.0), &jet(f, 1.0), 0.0, 1.0).unwrap();
        let gp = whitney_extend_gap(&jet(g, 0.0), &jet(g, 1.0), 0.0, 1.0).unwrap();
        GapProblem::new(&jt, &Modulus::linear(), &fp, &gp).unwrap()
    }

    #[test]
    fn dispatch_examples() {
        let k = Constants::new(1.0, 1, 1.0).unwrap();
        let gp = problem(1, &Poly::zero(), &Poly::zero(), 0.0, 0.1);
        assert_eq!(dispatch_case(&gp, &k), Case::BothSmall);
        let gp = problem(1, &Poly::new(vec![0.0, 1e9]), &Poly::zero(), 0.0, 0.1);
        assert_eq!(dispatch_case(&gp, &k), Case::FBig);
        let gp = problem(1, &Poly::zero(), &Poly::new(vec![0.0, 1e9]), 0.0, 0.1);
        assert_eq!(dispatch_case(&gp, &k), Case::GBig);
        // Tie at the threshold: both speeds equal CC₀ω h^m.
        let t = k.c * k.c0;
        let gp = problem(1, &Poly::new(vec![0.0, t]), &Poly::new(vec![0.0, t]), 0.0, 0.1);
        assert_eq!(gp.tf_prime_int, t);
        assert_eq!(dispatch_case(&gp, &k), Case::FBig);
    }

    #[test]
    fn fbig_hits_the_target() {
        // f = x, g = 0: 𝒜 = H(1) − H(0).
        let gp = problem(1, &Poly::x(), &Poly::zero(), 0.0, 0.3);
        assert!((gp.area - 0.3).abs() < 1e-15);
        let p = solve_fbig(&gp).unwrap();
        assert!(p.phi.is_zero());
        let got = 4.0 * crate::quad::composite_gauss_legendre(256, 0.0, 1.0, |x| p.psi.eval(x) * gp.f.derivative(1, x));
        assert!((got - 0.3).abs() < 1e-10 * 0.3);
        let gp0 = problem(1, &Poly::x(), &Poly::zero(), 0.0, 0.0);
        assert!(solve_fbig(&gp0).unwrap().psi.is_zero());
        let degenerate = problem(1, &Poly::zero(), &Poly::zero(), 0.0, 0.3);
        assert!(solve_fbig(&degenerate).unwrap().psi.is_zero());
    }

    #[test]
    fn both_small_case_three_and_sign_flip() {
        let k = Constants::new(1.0, 1, 1.0).unwrap();
        for target in [1.0, -1.0] {
            let gp = problem(1, &Poly::zero(), &Poly::zero(), 0.0, target);
            let p = solve_both_small(&gp, &k).unwrap();
            assert_eq!(p.sub_case, Some(3));
            let lambda = p.lambda.unwrap();
            assert!(lambda > 0.0 && lambda < 1.0);
            let got =
                4.0 * crate::quad::composite_gauss_legendre(512, 0.0, 1.0, |x| p.psi.eval(x) * p.phi.derivative(1, x));
            assert!((got - target).abs() < 1e-10, "{got} vs {target}");
            let sol = perturb_gap(&gp, &k).unwrap();
            assert!(sol.diagnostics.goal_residual < 1e-10);
            assert!(sol.diagnostics.bounds_ok, "{:?}", sol.diagnostics);
        }
    }

    #[test]
    fn zero_data_needs_no_perturbation() {
        let k = Constants::new(1.0, 2, 1.0).unwrap();
        let gp = problem(2, &Poly::zero(), &Poly::zero(), 0.5, 0.5);
        let sol = perturb_gap(&gp, &k).unwrap();
        assert!(sol.phi.is_zero() && sol.psi.is_zero());
        assert_eq!(sol.diagnostics.height_residual, 0.0);
    }
}
