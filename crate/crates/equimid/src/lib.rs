//! Equidistant functions: the set of points at equal distance from a
//! horizontal hyperplane and from the epigraph of a positive function `f`
//! is the graph of a function `G`. This crate computes `G` three ways —
//! a brute-force distance oracle plus bisection for any continuous `f`,
//! a parametric closed form with Newton inversion for smooth convex `f`,
//! and an exact cubic-root solution for the hyperboloid of revolution —
//! and provides the reverse direction: testing whether a candidate `G`
//! arises this way and reconstructing its generating `f`.
//!
//! All numerics are generic over the scalar type via [`Scalar`]
//! (`f32` or `f64`); the `*64`/`*32` aliases at the crate root pick a
//! concrete precision.

pub mod characterization;
pub mod dsl;
mod error;
pub mod geometry;
pub mod hyperboloid;
pub(crate) mod linalg;
pub mod parametric;
pub mod sample;
pub mod solver;

pub use error::{Error, Result};

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the library is generic over: `f32` or `f64`.
pub trait Scalar: Float + FromPrimitive + Debug + Send + Sync + 'static {}

impl<T> Scalar for T where T: Float + FromPrimitive + Debug + Send + Sync + 'static {}

/// Shorthand for lifting an `f64` constant into the generic scalar.
pub(crate) fn c<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("constant not representable in this scalar type")
}

pub type ScalarField64 = dsl::ScalarField<f64>;
pub type SpacePoint64 = geometry::SpacePoint<f64>;
pub type EpigraphFocal64 = geometry::EpigraphFocal<f64>;
pub type EquidistantFunction64 = solver::EquidistantFunction<f64>;
pub type EquidistantParam64 = parametric::EquidistantParam<f64>;
pub type CandidateG64 = characterization::CandidateG<f64>;

pub type ScalarField32 = dsl::ScalarField<f32>;
pub type SpacePoint32 = geometry::SpacePoint<f32>;
pub type EpigraphFocal32 = geometry::EpigraphFocal<f32>;
pub type EquidistantFunction32 = solver::EquidistantFunction<f32>;
pub type EquidistantParam32 = parametric::EquidistantParam<f32>;
pub type CandidateG32 = characterization::CandidateG<f32>;
