//! Robustness certificates for classifiers and weighted ensembles of
//! classifiers, built from sets of achievable gradients.
//!
//! A scalar function `h` is *S-Lipschitz* when its increments are bounded by
//! the support function of a bounded gradient set `S`:
//!
//! ```text
//! -ρ_S(x - y) <= h(y) - h(x) <= ρ_S(y - x),    ρ_S(δ) = sup_{c ∈ S} c·δ
//! ```
//!
//! Ordinary `L`-Lipschitz continuity is the special case where `S` is a
//! dual-norm ball of radius `L`. Certificates are polar sets
//! `{δ : ρ_T(δ) <= r}` of difference bodies `T`, intersected over the
//! competing classes.
//!
//! The crate is `no_std` (it needs `alloc`). Modules:
//!
//! * [`geometry`]: convex bodies through their support functions, Minkowski
//!   algebra, planar hulls, halfspace regions, a dense simplex solver and
//!   exact containment tests.
//! * [`certificates`]: uniform, class-wise and class-difference certificates
//!   for a classifier at a point, in Lipschitz and S-Lipschitz form.
//! * [`ensemble`]: weighted ensembles, regime classification and the
//!   closed-form bounds on what ensembling can gain.
//! * [`simulate`]: seeded Monte Carlo statistics over random simplex
//!   ensembles.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod certificates;
pub mod ensemble;
mod error;
pub mod geometry;
mod linalg;
pub(crate) mod math;
pub mod simulate;
pub mod tol;

pub use error::Error;
pub use linalg::{Matrix, Norm, Vector};

pub type Result<T, E = Error> = core::result::Result<T, E>;
