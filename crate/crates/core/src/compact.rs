use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed component `[a, b]` of a compact set; `a == b` is an isolated point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub a: f64,
    pub b: f64,
}

impl Component {
    pub fn is_point(&self) -> bool {
        self.a == self.b
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }
}

/// A finite union of disjoint closed intervals (possibly degenerate), sorted.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CompactSet {
    components: Vec<Component>,
}

impl CompactSet {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Domain("compact set needs at least one component".into()));
        }
        for (i, c) in components.iter().enumerate() {
            if !(c.a.is_finite() && c.b.is_finite()) || c.a > c.b {
                return Err(Error::Domain(format!("component {i} = [{}, {}] is not a closed interval", c.a, c.b)));
            }
        }
        for (i, w) in components.windows(2).enumerate() {
            if !(w[0].b < w[1].a) {
                return Err(Error::Domain(format!(
                    "components {i} and {} are not sorted with positive separation",
                    i + 1
                )));
            }
        }
        Ok(Self { components })
    }

    pub fn from_intervals(intervals: &[(f64, f64)]) -> Result<Self> {
        Self::new(intervals.iter().map(|&(a, b)| Component { a, b }).collect())
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn hull(&self) -> (f64, f64) {
        (self.components[0].a, self.components[self.components.len() - 1].b)
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.hull();
        hi - lo
    }

    /// Open gaps `(b_i, a_{i+1})` of the hull minus the set, left to right.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.components.windows(2).map(|w| (w[0].b, w[1].a)).collect()
    }

    /// Index of the component containing `x`, if any.
    pub fn component_of(&self, x: f64) -> Option<usize> {
        let i = self.components.partition_point(|c| c.b < x);
        (i < self.components.len() && self.components[i].contains(x)).then_some(i)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.component_of(x).is_some()
    }
}

impl<'de> Deserialize<'de> for CompactSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let components = Vec::<Component>::deserialize(d)?;
        CompactSet::new(components).map_err(serde::de::Error::custom)
    }
}
