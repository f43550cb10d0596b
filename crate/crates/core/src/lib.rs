//! PhaseMax: convex phase retrieval in the original signal dimension.
//!
//! The crate solves
//!
//! ```text
//! maximize Re<x, xhat>  subject to  |<a_i, x>| <= b_i,  i = 1..m
//! ```
//!
//! with a first-order primal-dual splitting, solves its basis pursuit dual
//! `min ||z||_1 s.t. xhat = A B^{-1} z` independently, and ships closed-form
//! success bounds together with geometric oracles (cone feasibility, cap
//! coverage, region counting) that check them.

pub mod ensembles;
pub mod error;
pub mod initializers;
pub mod io;
pub mod linalg;
pub mod oracles;
pub mod seeding;
pub mod solvers;
pub mod sweep;
pub mod theory;
mod util;

pub use error::{Error, Result};
pub use linalg::{align, angle_between, inner, phase, Cx, Field, MeasurementMatrix, Signal};
