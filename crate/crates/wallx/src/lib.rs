//! Exact wall-crossing algebra.
//!
//! The crate is organised bottom-up:
//!
//! - [`scalar`]: the coefficient rings (`Z[L^{±1/2}]`, `Q(t)`, symbolic polynomials, Gaussian rationals).
//! - [`lattice_groupoid`]: groupoids induced by lattice maps, cocycles, the grading lattice.
//! - [`graded_algebra`]: twisted groupoid algebra, Lie bracket, quantum torus, matrices.
//! - [`stability_engine`]: stability data, sector and ray elements, the wall-crossing solver.
//! - [`quiver_an`]: the `A_n` Hom/Ext calculus, the correspondence Hall product and a finite-field oracle.
//! - [`vstab_wcf`]: V-collections, HN sequences, interval elements and the `A_2` atlas.

pub mod error;
pub mod graded_algebra;
pub mod io;
pub mod lattice_groupoid;
pub mod quiver_an;
pub mod scalar;
pub mod stability_engine;
pub mod vstab_wcf;

pub use error::{Result, WallxError};
