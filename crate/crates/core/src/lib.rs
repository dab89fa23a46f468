//! Numerical engine for the relative differential geometry of parametric
//! hypersurfaces in R^4.
//!
//! A hypersurface is given by four coordinate expressions in the chart
//! variables `u1,u2,u3`. All derivatives are carried by truncated Taylor
//! jets ([`jet::Jet`]), so every geometric quantity is exact up to floating
//! point rounding. On top of the pointwise frame machinery ([`frame`]) the
//! crate constructs relatively parallel hypersurfaces `x + mu*y`
//! ([`parallel`]) and evaluates the closed-form parallel distances at which
//! a curvature function of the offset becomes constant ([`bonnet`]).

#![allow(clippy::needless_range_loop)]

pub mod bonnet;
pub mod commands;
pub mod cubic;
pub mod expr;
pub mod frame;
pub mod jet;
pub mod linalg;
pub mod parallel;
pub mod report;
pub mod rng;
pub mod surface;
pub mod tol;

pub use expr::{parse, Expression, ParseError};
pub use frame::{CurvatureSet, NormalizationMode, RelativeFrame};
pub use jet::{Jet, VecJet};
pub use surface::SurfaceSpec;
