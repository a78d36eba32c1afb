//! Horizontal Whitney extension in the first Heisenberg group.
//!
//! Given jets `(F, G, H)` of order `m` on a compact `K ⊂ ℝ`, the crate
//! certifies the three conditions under which they extend to a `C^{m,ω}`
//! horizontal curve, builds such a curve gap by gap, and generates the dyadic
//! counterexample showing that `ω^α` with `α > 1/2` cannot be reached.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bump;
pub mod certify;
pub mod cli;
pub mod compact;
pub mod counterexample;
pub mod discrepancy;
pub mod error;
pub mod jet;
pub mod lift;
pub mod modulus;
pub mod perturb;
pub mod poly;
pub mod quad;
pub mod whitney;

pub use compact::{CompactSet, Component};
pub use error::{Error, Result};
pub use jet::{ComponentJet, Coord, JetFamily, JetTriple, Job};
pub use modulus::Modulus;
pub use poly::Poly;

/// Round-trip float formatting used in every CSV this crate writes.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
