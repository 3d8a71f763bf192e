//! Exact computation of dimension bounds for unirationality constructions on
//! smooth complete intersections, plus the machinery those bounds rest on:
//!
//! - [`arith`]: big integer, rational, dyadic and certified interval arithmetic;
//! - [`multidegree`]: multi-degrees, multiplicity sequences, derivation chains
//!   and an accelerated chain walker for astronomically long chains;
//! - [`series`]: the truncated generating series family, coefficient
//!   extraction, basis decomposition and interpolating polynomials;
//! - [`bounds`]: the bound recursions (`r0`, `n0`, `r`, `n`), the exact
//!   coefficient table and closed forms for hypersurfaces;
//! - [`verify`]: a machine-checkable audit of every inequality the bound
//!   derivation relies on, with exact or certified-interval evidence;
//! - [`geometry`]: tangent-line expansions, tangency loci and residual point
//!   maps on explicit hypersurfaces over the rationals and prime fields.

pub mod arith;
pub mod bounds;
pub mod geometry;
pub mod multidegree;
pub mod series;
pub mod verify;

pub use arith::{BigInt, BigRational, BigUint};
pub use multidegree::{MultiDegree, MultiplicitySequence};
