//! Vector and scalar moments of two-variable Pick functions in type I form
//! `h(z) = ⟨(A − z_Y)⁻¹α, α⟩`, their residues at infinity, and numerical
//! tests of Löwner-class membership.
//!
//! The numerical core is generic over [`Real`]; the aliases below fix it to
//! `f64` or to IEEE binary128 ([`f128`](::f128::f128)), which the residue
//! ladder needs beyond the first few orders.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod asymptotics;
pub mod classifier;
pub mod error;
pub mod gallery;
pub mod io;
pub mod laurent;
pub mod moments;
pub mod numkernel;
pub mod representation;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{c, Real, C};

pub use ::f128::f128 as F128;

pub type Complex64 = C<f64>;
pub type Matrix = numkernel::CMatrix<f64>;
pub type Vector = numkernel::CVector<f64>;
pub type Rep = representation::TypeIRep<f64>;
pub type Measure = representation::DiscreteMeasure<f64>;
pub type Dir = representation::Direction<f64>;
pub type ComplexDir = representation::ComplexDirection<f64>;
pub type Point = representation::HalfPlanePoint2<f64>;
pub type Layer = laurent::HomogeneousLaurent<f64>;
pub type Grid = asymptotics::RayGrid<f64>;
pub type Ladder = asymptotics::ResidueLadder<f64>;

pub type Matrix128 = numkernel::CMatrix<F128>;
pub type Vector128 = numkernel::CVector<F128>;
pub type Rep128 = representation::TypeIRep<F128>;
pub type Dir128 = representation::Direction<F128>;
pub type Grid128 = asymptotics::RayGrid<F128>;
pub type Ladder128 = asymptotics::ResidueLadder<F128>;
