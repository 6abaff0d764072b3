//! Ruled surfaces as curves on the dual unit sphere.
//!
//! Lines are dual unit vectors (E. Study mapping); a ruled surface is a dual
//! spherical curve carrying a dual Darboux frame. The crate computes the
//! frame and its invariants, constructs Bertrand offsets of a surface by a
//! constant dual angle and checks the offset invariants against closed forms.

// `!(x > tol)` guards are written that way so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod curve;
pub mod dual;
pub mod dual_vector;
pub mod error;
pub mod expr;
pub mod io;
pub mod jet;
pub mod line;
pub mod offset;
pub mod quadrature;
pub mod surface;
pub mod tolerance;

pub use dual::DualScalar;
pub use dual_vector::{DualAngle, DualVector3, Vec3};
pub use error::{Error, Result};
pub use jet::{Jet, JetVec3};
pub use line::PlueckerLine;
pub use offset::{make_offset, OffsetKind, OffsetReport, OffsetSpec};
pub use surface::{DarbouxState, RuledSurface, RulingSource};
pub use tolerance::Tolerances;
