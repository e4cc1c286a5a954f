//! Mass of asymptotically Robertson–Walker spacetimes: curvature from metric
//! expressions, slice and graph mass integrals, their singular limits, and the
//! inverse mean curvature flow in the rotationally symmetric reduction.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod hypersurface;
pub mod imcf;
pub mod jet;
pub mod limits;
pub mod mass;
pub mod sads;
pub mod tensor;

pub use error::{Error, Result};
