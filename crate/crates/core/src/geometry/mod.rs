//! Convex bodies through their support functions, polar sets and exact
//! containment tests between certificate regions.

mod body;
mod halfspace;
mod hull;
mod lp;
mod polar;
mod region;

pub use body::{BallShape, ConvexBody, Term};
pub use halfspace::{Halfspace, HalfspaceRegion};
pub use hull::hull_prune;
pub use lp::{lp_maximize, LpOutcome};
pub use polar::{polar_dual_ball, polar_hrep, PolarBall};
pub use region::{
    polytope_vertices, region_minus_subset, region_subset, subset, subset_of_union, Containment,
    NormBall, Region,
};
