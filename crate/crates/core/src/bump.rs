//! The standard bump `φ(x) = exp(−1/(1−x²))` on `(−1, 1)` and the smooth step
//! built from its normalized cumulative integral.
//!
//! Derivatives use `D^i φ = P_i(x) / (1−x²)^{2i} · φ(x)` with integer
//! polynomials `P_0 = 1`, `P_{i+1} = P_i'·q² + 4i·x·P_i·q − 2x·P_i`,
//! `q = 1 − x²`.

use std::sync::OnceLock;

use crate::poly::Poly;
use crate::quad::gauss_legendre;

/// Beyond this distance from the origin `φ` and all its derivatives are
/// returned as exactly zero (they underflow long before).
pub const EDGE: f64 = 1.0 - 1e-8;

const CACHED_ORDERS: usize = 16;

fn numerators() -> &'static [Poly] {
    static P: OnceLock<Vec<Poly>> = OnceLock::new();
    P.get_or_init(|| {
        let q = Poly::new(vec![1.0, 0.0, -1.0]);
        let q2 = &q * &q;
        let x = Poly::x();
        let mut out = vec![Poly::constant(1.0)];
        for i in 0..CACHED_ORDERS {
            let p = &out[i];
            let t1 = &p.derivative() * &q2;
            let t2 = (&(&x * p) * &q).scale(4.0 * i as f64);
            let t3 = (&x * p).scale(-2.0);
            out.push(&(&t1 + &t2) + &t3);
        }
        out
    })
}

fn numerator(i: usize) -> Poly {
    if let Some(p) = numerators().get(i) {
        return p.clone();
    }
    let q = Poly::new(vec![1.0, 0.0, -1.0]);
    let q2 = &q * &q;
    let x = Poly::x();
    let mut p = numerators()[CACHED_ORDERS].clone();
    for k in CACHED_ORDERS..i {
        let t1 = &p.derivative() * &q2;
        let t2 = (&(&x * &p) * &q).scale(4.0 * k as f64);
        let t3 = (&x * &p).scale(-2.0);
        p = &(&t1 + &t2) + &t3;
    }
    p
}

pub fn bump(x: f64) -> f64 {
    bump_derivative(0, x)
}

/// `D^i φ(x)`; exactly zero for `|x| ≥ 1 − 1e-8`.
pub fn bump_derivative(i: usize, x: f64) -> f64 {
    if !(x.abs() < EDGE) {
        return 0.0;
    }
    let q = 1.0 - x * x;
    let envelope = (-1.0 / q - 2.0 * i as f64 * q.ln()).exp();
    if i == 0 {
        return envelope;
    }
    let p = match numerators().get(i) {
        Some(p) => p.eval(x),
        None => numerator(i).eval(x),
    };
    p * envelope
}

/// `‖D^i φ‖_∞`, computed numerically by a dense scan refined by golden-section search.
pub fn bump_sup_norm(i: usize) -> f64 {
    static NORMS: OnceLock<Vec<f64>> = OnceLock::new();
    let cached = NORMS.get_or_init(|| (0..=CACHED_ORDERS).map(compute_sup_norm).collect());
    cached.get(i).copied().unwrap_or_else(|| compute_sup_norm(i))
}

fn compute_sup_norm(i: usize) -> f64 {
    // |D^i φ| is even in x, so scanning [0, 1) suffices.
    let n = 20_000;
    let g = |x: f64| bump_derivative(i, x).abs();
    let (mut best_x, mut best) = (0.0, g(0.0));
    for k in 1..n {
        let x = k as f64 / n as f64;
        let v = g(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let step = 1.0 / n as f64;
    let (mut lo, mut hi) = ((best_x - step).max(0.0), (best_x + step).min(EDGE));
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let x1 = hi - ratio * (hi - lo);
        let x2 = lo + ratio * (hi - lo);
        if g(x1) >= g(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    best.max(g(0.5 * (lo + hi)))
}

const BLEND_PANELS: usize = 512;

struct BlendTable {
    cumulative: Vec<f64>,
    mass: f64,
}

fn blend_table() -> &'static BlendTable {
    static T: OnceLock<BlendTable> = OnceLock::new();
    T.get_or_init(|| {
        let h = 1.0 / BLEND_PANELS as f64;
        let mut cumulative = Vec::with_capacity(BLEND_PANELS + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for j in 0..BLEND_PANELS {
            let l = -1.0 + j as f64 * h;
            acc += gauss_legendre(64, l, l + h, bump);
            cumulative.push(acc);
        }
        BlendTable { mass: 2.0 * acc, cumulative }
    })
}

/// `∫_{−1}^{1} φ`.
pub fn bump_mass() -> f64 {
    blend_table().mass
}

/// Smooth step `θ(s) = ∫_{−1}^{s} φ / ∫_{−1}^{1} φ`: `0` for `s ≤ −1`, `1` for `s ≥ 1`,
/// all derivatives vanishing at `±1`.
pub fn blend(s: f64) -> f64 {
    if s <= -1.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    if s > 0.0 {
        return 1.0 - blend(-s);
    }
    let t = blend_table();
    let h = 1.0 / BLEND_PANELS as f64;
    let j = (((s + 1.0) / h).floor() as usize).min(BLEND_PANELS - 1);
    let left = -1.0 + j as f64 * h;
    let partial = if s > left { gauss_legendre(16, left, s, bump) } else { 0.0 };
    (t.cumulative[j] + partial) / t.mass
}

/// `D^j θ(s)`.
pub fn blend_derivative(j: usize, s: f64) -> f64 {
    if j == 0 {
        blend(s)
    } else {
        bump_derivative(j - 1, s) / bump_mass()
    }
}
