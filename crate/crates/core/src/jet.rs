//! Jet families on a compact set and the JSON job format that carries them.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::compact::CompactSet;
use crate::error::{Error, Result};
use crate::modulus::Modulus;
use crate::poly::Poly;

/// Closed-form jet entry: `F^k(x) = func(k, x)`.
pub type JetFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

/// Jet data on a single component of `K`.
#[derive(Clone)]
pub enum ComponentJet {
    /// `F^k(x) = orders[k](x − center)`.
    Poly {
        orders: Vec<Poly>,
        center: f64,
    },
    /// `values[i][k] = F^k(xs[i])`; between samples the nearest sample's Taylor
    /// expansion is used.
    Samples {
        xs: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
    /// Isolated point: `values[k] = F^k`.
    Point(Vec<f64>),
    Func(JetFn),
}

impl fmt::Debug for ComponentJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Poly { orders, center } => {
                f.debug_struct("Poly").field("orders", orders).field("center", center).finish()
            }
            Self::Samples { xs, .. } => f.debug_struct("Samples").field("len", &xs.len()).finish(),
            Self::Point(v) => f.debug_tuple("Point").field(v).finish(),
            Self::Func(_) => f.write_str("Func(..)"),
        }
    }
}

impl ComponentJet {
    /// Jets `p, p′, …, p^{(m)}` of a polynomial in `x`.
    pub fn from_poly(p: &Poly, m: usize) -> Self {
        Self::Poly { orders: (0..=m).map(|k| p.nth_derivative(k)).collect(), center: 0.0 }
    }

    pub fn zero(m: usize) -> Self {
        Self::Poly { orders: vec![Poly::zero(); m + 1], center: 0.0 }
    }

    pub fn func(f: impl Fn(usize, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Func(Arc::new(f))
    }

    fn value(&self, k: usize, x: f64) -> f64 {
        match self {
            Self::Poly { orders, center } => orders.get(k).map_or(0.0, |p| p.eval(x - center)),
            Self::Point(v) => v.get(k).copied().unwrap_or(0.0),
            Self::Func(f) => f(k, x),
            Self::Samples { xs, values } => {
                let i = nearest(xs, x);
                let row = &values[i];
                let dx = x - xs[i];
                if dx == 0.0 {
                    return row.get(k).copied().unwrap_or(0.0);
                }
                let mut sum = 0.0;
                let mut term = 1.0;
                for (j, v) in row.iter().skip(k).enumerate() {
                    if j > 0 {
                        term *= dx / j as f64;
                    }
                    sum += v * term;
                }
                sum
            }
        }
    }

    fn check(&self, m: usize, lo: f64, hi: f64, label: &str) -> Result<()> {
        let bad = |msg: String| Err(Error::Schema(format!("{label}: {msg}")));
        match self {
            Self::Poly { orders, center } => {
                if orders.len() != m + 1 {
                    return bad(format!("expected {} orders, got {}", m + 1, orders.len()));
                }
                if !center.is_finite() || orders.iter().any(|p| p.coeffs().iter().any(|c| !c.is_finite())) {
                    return bad("non-finite polynomial data".into());
                }
            }
            Self::Point(v) => {
                if lo != hi {
                    return bad("point jet on a non-degenerate component".into());
                }
                if v.len() != m + 1 || v.iter().any(|x| !x.is_finite()) {
                    return bad(format!("expected {} finite values", m + 1));
                }
            }
            Self::Samples { xs, values } => {
                if xs.is_empty() || xs.len() != values.len() {
                    return bad("sample grid and value table differ in length".into());
                }
                if xs.windows(2).any(|w| !(w[0] < w[1])) {
                    return bad("sample grid is not strictly increasing".into());
                }
                if xs[0] != lo || xs[xs.len() - 1] != hi {
                    return bad(format!("sample grid must start at {lo} and end at {hi}"));
                }
                if values.iter().any(|r| r.len() != m + 1 || r.iter().any(|v| !v.is_finite())) {
                    return bad(format!("every sample needs {} finite values", m + 1));
                }
            }
            Self::Func(_) => {}
        }
        Ok(())
    }
}

fn nearest(xs: &[f64], x: f64) -> usize {
    let i = xs.partition_point(|&s| s < x);
    if i == 0 {
        0
    } else if i == xs.len() || x - xs[i - 1] <= xs[i] - x {
        i - 1
    } else {
        i
    }
}

/// A jet family `(F^k)_{k ≤ m}` on `K`: per-component data, or a linear
/// combination of other families plus a constant in the order-0 entry.
#[derive(Clone, Debug)]
pub struct JetFamily(Repr);

#[derive(Clone, Debug)]
enum Repr {
    Components(Arc<Vec<ComponentJet>>),
    Combination { constant: f64, terms: Arc<Vec<(f64, JetFamily)>> },
}

impl JetFamily {
    pub fn new(components: Vec<ComponentJet>) -> Self {
        Self(Repr::Components(Arc::new(components)))
    }

    /// `constant + Σ c_j F_j` at order 0 and `Σ c_j F_j^k` at orders `k ≥ 1`,
    /// summed left to right.
    pub fn combination(constant: f64, terms: Vec<(f64, JetFamily)>) -> Self {
        Self(Repr::Combination { constant, terms: Arc::new(terms) })
    }

    /// `F^k(x)` with `x` in component `comp`; membership is the caller's job.
    pub fn value_in(&self, comp: usize, k: usize, x: f64) -> f64 {
        match &self.0 {
            Repr::Components(c) => c[comp].value(k, x),
            Repr::Combination { constant, terms } => {
                let mut acc = if k == 0 { *constant } else { 0.0 };
                let mut first = k != 0;
                for (c, fam) in terms.iter() {
                    let v = c * fam.value_in(comp, k, x);
                    acc = if first { v } else { acc + v };
                    first = false;
                }
                acc
            }
        }
    }

    /// Sample abscissae carried by sampled data on component `comp`, if any.
    pub fn sample_points(&self, comp: usize) -> Option<Vec<f64>> {
        match &self.0 {
            Repr::Components(c) => match &c[comp] {
                ComponentJet::Samples { xs, .. } => Some(xs.clone()),
                _ => None,
            },
            Repr::Combination { terms, .. } => terms.iter().find_map(|(_, f)| f.sample_points(comp)),
        }
    }

    fn components(&self) -> Option<&[ComponentJet]> {
        match &self.0 {
            Repr::Components(c) => Some(c),
            Repr::Combination { .. } => None,
        }
    }

    fn check(&self, m: usize, k: &CompactSet, name: &str) -> Result<()> {
        match &self.0 {
            Repr::Components(c) => {
                if c.len() != k.len() {
                    return Err(Error::Schema(format!(
                        "{name}: jet data for {} components, K has {}",
                        c.len(),
                        k.len()
                    )));
                }
                for (i, (cj, comp)) in c.iter().zip(k.components()).enumerate() {
                    cj.check(m, comp.a, comp.b, &format!("{name} component {i}"))?;
                }
                Ok(())
            }
            Repr::Combination { terms, .. } => terms.iter().try_for_each(|(_, f)| f.check(m, k, name)),
        }
    }
}

/// Jets `(F, G, H)` of order `m` on `K`.
#[derive(Clone, Debug)]
pub struct JetTriple {
    m: usize,
    k: CompactSet,
    f: JetFamily,
    g: JetFamily,
    h: JetFamily,
}

/// Which of the three families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coord {
    F,
    G,
    H,
}

impl Coord {
    pub const ALL: [Coord; 3] = [Coord::F, Coord::G, Coord::H];
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coord::F => "F",
            Coord::G => "G",
            Coord::H => "H",
        })
    }
}

impl JetTriple {
    pub fn new(m: usize, k: CompactSet, f: JetFamily, g: JetFamily, h: JetFamily) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("jet order m must be at least 1".into()));
        }
        f.check(m, &k, "F")?;
        g.check(m, &k, "G")?;
        h.check(m, &k, "H")?;
        Ok(Self { m, k, f, g, h })
    }

    /// All three families identically zero.
    pub fn zero(m: usize, k: CompactSet) -> Result<Self> {
        let fam = || JetFamily::new(k.components().iter().map(|_| ComponentJet::zero(m)).collect());
        Self::new(m, k.clone(), fam(), fam(), fam())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn set(&self) -> &CompactSet {
        &self.k
    }

    pub fn family(&self, c: Coord) -> &JetFamily {
        match c {
            Coord::F => &self.f,
            Coord::G => &self.g,
            Coord::H => &self.h,
        }
    }

    pub fn with_families(&self, f: JetFamily, g: JetFamily, h: JetFamily) -> Self {
        Self { m: self.m, k: self.k.clone(), f, g, h }
    }

    fn locate(&self, x: f64) -> Result<usize> {
        self.k.component_of(x).ok_or_else(|| Error::Domain(format!("point {x} is not in K")))
    }

    /// `c^k(x)` for `x ∈ K`.
    pub fn value(&self, c: Coord, k: usize, x: f64) -> Result<f64> {
        if k > self.m {
            return Err(Error::Domain(format!("jet order {k} exceeds m = {}", self.m)));
        }
        let comp = self.locate(x)?;
        Ok(self.family(c).value_in(comp, k, x))
    }

    /// `(c^0(x), …, c^m(x))`.
    pub fn jet(&self, c: Coord, x: f64) -> Result<Vec<f64>> {
        let comp = self.locate(x)?;
        Ok((0..=self.m).map(|k| self.family(c).value_in(comp, k, x)).collect())
    }

    /// Representative points of each component: endpoints plus `interior`
    /// uniformly spaced interior points, or the sample grid when the data are
    /// sampled.
    pub fn sample_points(&self, interior: usize) -> Vec<Vec<f64>> {
        self.k
            .components()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if c.is_point() {
                    return vec![c.a];
                }
                if let Some(xs) = Coord::ALL.iter().find_map(|&co| self.family(co).sample_points(i)) {
                    return xs;
                }
                let mut xs = vec![c.a];
                for j in 1..=interior {
                    xs.push(c.a + (c.b - c.a) * j as f64 / (interior + 1) as f64);
                }
                xs.push(c.b);
                xs
            })
            .collect()
    }
}

/// A certification / extension job: jets plus the modulus to certify against.
#[derive(Clone, Debug)]
pub struct Job {
    pub omega: Modulus,
    pub triple: JetTriple,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    m: usize,
    omega: Modulus,
    #[serde(rename = "K")]
    k: CompactSet,
    jets: RawJets,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJets {
    #[serde(rename = "F")]
    f: Vec<RawEntry>,
    #[serde(rename = "G")]
    g: Vec<RawEntry>,
    #[serde(rename = "H")]
    h: Vec<RawEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    component_index: usize,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    orders: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    center: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<RawValues>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawValues {
    Flat(Vec<f64>),
    Table(Vec<Vec<f64>>),
}

fn family_from_raw(entries: Vec<RawEntry>, n: usize, name: &str) -> Result<JetFamily> {
    let mut slots: Vec<Option<ComponentJet>> = vec![None; n];
    for e in entries {
        let schema = |msg: &str| Error::Schema(format!("{name} entry for component {}: {msg}", e.component_index));
        if e.component_index >= n {
            return Err(schema("component_index out of range"));
        }
        let cj = match e.kind.as_str() {
            "poly" => {
                if e.x.is_some() || e.values.is_some() {
                    return Err(schema("poly entries take only 'orders' and 'center'"));
                }
                let orders = e.orders.ok_or_else(|| schema("missing 'orders'"))?;
                ComponentJet::Poly {
                    orders: orders.into_iter().map(Poly::new).collect(),
                    center: e.center.unwrap_or(0.0),
                }
            }
            "samples" => {
                if e.orders.is_some() || e.center.is_some() {
                    return Err(schema("samples entries take only 'x' and 'values'"));
                }
                let xs = e.x.ok_or_else(|| schema("missing 'x'"))?;
                let values = match e.values {
                    Some(RawValues::Table(t)) => t,
                    Some(RawValues::Flat(f)) if f.is_empty() => Vec::new(),
                    _ => return Err(schema("'values' must be a list of per-sample jet vectors")),
                };
                ComponentJet::Samples { xs, values }
            }
            "point" => {
                if e.orders.is_some() || e.center.is_some() || e.x.is_some() {
                    return Err(schema("point entries take only 'values'"));
                }
                match e.values {
                    Some(RawValues::Flat(v)) => ComponentJet::Point(v),
                    _ => return Err(schema("'values' must be a flat jet vector")),
                }
            }
            other => return Err(schema(&format!("unknown kind '{other}'"))),
        };
        if slots[e.component_index].replace(cj).is_some() {
            return Err(Error::Schema(format!("{name}: duplicate entry for component {}", e.component_index)));
        }
    }
    let comps = slots
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| Error::Schema(format!("{name}: no jet data for component {i}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(JetFamily::new(comps))
}

fn family_to_raw(fam: &JetFamily, name: &str) -> Result<Vec<RawEntry>> {
    let comps =
        fam.components().ok_or_else(|| Error::Schema(format!("{name}: derived jet families cannot be serialized")))?;
    comps
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut e =
                RawEntry { component_index: i, kind: String::new(), orders: None, center: None, x: None, values: None };
            match c {
                ComponentJet::Poly { orders, center } => {
                    e.kind = "poly".into();
                    e.orders = Some(orders.iter().map(|p| p.coeffs().to_vec()).collect());
                    e.center = (*center != 0.0).then_some(*center);
                }
                ComponentJet::Samples { xs, values } => {
                    e.kind = "samples".into();
                    e.x = Some(xs.clone());
                    e.values = Some(RawValues::Table(values.clone()));
                }
                ComponentJet::Point(v) => {
                    e.kind = "point".into();
                    e.values = Some(RawValues::Flat(v.clone()));
                }
                ComponentJet::Func(_) => {
                    return Err(Error::Schema(format!("{name} component {i}: closed-form jets cannot be serialized")))
                }
            }
            Ok(e)
        })
        .collect()
}

impl Job {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawJob = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let n = raw.k.len();
        let f = family_from_raw(raw.jets.f, n, "F")?;
        let g = family_from_raw(raw.jets.g, n, "G")?;
        let h = family_from_raw(raw.jets.h, n, "H")?;
        let triple = JetTriple::new(raw.m, raw.k, f, g, h).map_err(|e| match e {
            Error::Domain(d) => Error::Schema(d),
            other => other,
        })?;
        Ok(Self { omega: raw.omega, triple })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let t = &self.triple;
        let raw = RawJob {
            m: t.m,
            omega: self.omega.clone(),
            k: t.k.clone(),
            jets: RawJets { f: family_to_raw(&t.f, "F")?, g: family_to_raw(&t.g, "G")?, h: family_to_raw(&t.h, "H")? },
        };
        Ok(serde_json::to_string_pretty(&raw)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}
