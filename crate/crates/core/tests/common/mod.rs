#![allow(dead_code)]

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use heisenberg_whitney::whitney::SmoothPiece;
use heisenberg_whitney::{CompactSet, ComponentJet, Coord, JetFamily, JetTriple, Poly};
use rand::RngExt;

/// Composite Gauss–Legendre built directly on `gauss_quad`, independent of the
/// crate's own quadrature wrappers.
pub fn oracle_integral(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = GaussLegendre::new(NonZeroUsize::new(48).unwrap());
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + i as f64 * w;
            rule.integrate(lo, lo + w, &f)
        })
        .sum()
}

/// Jets of the lifted unit circle `(cos x, sin x, −2x)`.
pub fn circle_jet(c: Coord) -> ComponentJet {
    ComponentJet::func(move |k, x| match c {
        Coord::F => [x.cos(), -x.sin(), -x.cos(), x.sin()][k % 4],
        Coord::G => [x.sin(), x.cos(), -x.sin(), -x.cos()][k % 4],
        Coord::H => match k {
            0 => -2.0 * x,
            1 => -2.0,
            _ => 0.0,
        },
    })
}

/// Exact `D^k` of the lifted circle.
pub fn circle_exact(c: Coord, k: usize, x: f64) -> f64 {
    match circle_jet(c) {
        ComponentJet::Func(f) => f(k, x),
        _ => unreachable!(),
    }
}

pub fn circle_triple(m: usize, intervals: &[(f64, f64)]) -> JetTriple {
    let set = CompactSet::from_intervals(intervals).unwrap();
    let fam = |c| JetFamily::new(intervals.iter().map(|_| circle_jet(c)).collect());
    JetTriple::new(m, set, fam(Coord::F), fam(Coord::G), fam(Coord::H)).unwrap()
}

pub fn random_poly(rng: &mut impl RngExt, degree: usize, scale: f64) -> Poly {
    Poly::new((0..=degree).map(|_| rng.random_range(-scale..scale)).collect())
}

/// `h` with `h(0) = 0` and `h′ = 2(f′g − fg′)`.
pub fn lift_poly(f: &Poly, g: &Poly) -> Poly {
    let integrand = &(&f.derivative() * g) - &(&g.derivative() * f);
    integrand.antiderivative().scale(2.0)
}

/// `n` separated components in `[0, 1]`, some of them single points.
pub fn random_set(rng: &mut impl RngExt, n: usize) -> CompactSet {
    let mut cuts: Vec<f64> = (0..2 * n).map(|_| rng.random_range(0.0..1.0)).collect();
    cuts.sort_by(f64::total_cmp);
    let intervals: Vec<(f64, f64)> =
        cuts.chunks(2).map(|c| if rng.random_bool(0.25) { (c[0], c[0]) } else { (c[0], c[1]) }).collect();
    let ok = intervals.windows(2).all(|w| w[1].0 - w[0].1 > 1e-3) && intervals.iter().all(|i| i.1 - i.0 >= 0.0);
    if ok {
        CompactSet::from_intervals(&intervals).unwrap()
    } else {
        random_set(rng, n)
    }
}

/// Jets of the horizontal polynomial curve `(f, g, lift + offset_i)`, one
/// height offset per component.
pub fn poly_triple(m: usize, set: &CompactSet, f: &Poly, g: &Poly, offsets: &[f64]) -> JetTriple {
    let h = lift_poly(f, g);
    let fam = |p: &Poly| JetFamily::new(set.components().iter().map(|_| ComponentJet::from_poly(p, m)).collect());
    let hf = JetFamily::new(offsets.iter().map(|&o| ComponentJet::from_poly(&(&h + &Poly::constant(o)), m)).collect());
    JetTriple::new(m, set.clone(), fam(f), fam(g), hf).unwrap()
}

/// Goal identity `4∫(ψf′ − φg′ + ψφ′) = 𝒜` on one gap, with both sides
/// recomputed by the oracle from the unperturbed extension pieces `f`, `g`
/// (centered or not) and the perturbations. Returns the relative residual.
pub fn goal_identity_residual(
    jt: &JetTriple,
    f: &SmoothPiece,
    g: &SmoothPiece,
    phi: &SmoothPiece,
    psi: &SmoothPiece,
) -> f64 {
    let (a, b) = f.domain();
    let (f0, g0) = (f.eval(a), g.eval(a));
    let fc = |x: f64| f.eval(x) - f0;
    let gc = |x: f64| g.eval(x) - g0;
    let (f1, g1) = (|x: f64| f.derivative(1, x), |x: f64| g.derivative(1, x));
    let v = |c, x| jt.value(c, 0, x).unwrap();
    let (fa, ga) = (v(Coord::F, a), v(Coord::G, a));
    let height = v(Coord::H, b) - v(Coord::H, a) - 2.0 * ga * v(Coord::F, b) + 2.0 * fa * v(Coord::G, b);
    let lift = 2.0 * oracle_integral(|x| f1(x) * gc(x) - g1(x) * fc(x), a, b, 512);
    let area = height - lift;
    if phi.is_zero() && psi.is_zero() {
        // Nothing to steer: the gap must already be lift-consistent, up to
        // rounding in the terms of the height and of the lift integrand.
        let height_terms = v(Coord::H, b).abs()
            + v(Coord::H, a).abs()
            + 2.0 * (ga * v(Coord::F, b)).abs()
            + 2.0 * (fa * v(Coord::G, b)).abs();
        let lift_terms = 2.0 * oracle_integral(|x| (f1(x) * gc(x)).abs() + (g1(x) * fc(x)).abs(), a, b, 512);
        let scale = height_terms + lift_terms;
        return if scale == 0.0 { 0.0 } else { area.abs() / scale };
    }
    let goal = 4.0
        * oracle_integral(
            |x| psi.eval(x) * f1(x) - phi.eval(x) * g1(x) + psi.eval(x) * phi.derivative(1, x),
            a,
            b,
            512,
        );
    (goal - area).abs() / area.abs()
}
