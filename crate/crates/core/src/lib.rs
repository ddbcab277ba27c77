//! Correlations of antipodal colourings of the Bloch sphere.
//!
//! A deterministic local hidden variable model for two spin-½ measurements
//! assigns each party a ±1 colouring of the sphere. This crate builds such
//! colourings, computes their correlation curves `C(θ)` three ways, compares
//! them to quantum and Bell-type reference values and searches for
//! colourings that beat the hemispherical one.
//!
//! Everything numerical is generic over [`Real`] (`f32`, `f64`); the aliases
//! below fix `f64`.

pub mod bounds;
pub mod colourings;
pub mod correlation;
pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod quantum;
pub mod sampling;
pub mod scalar;
pub mod search;

pub use error::{Error, Result};
pub use sampling::{Estimate, SamplingPlan};
pub use scalar::{Exact, Real};

pub type Rational = num_rational::Ratio<i64>;

pub type Direction = geometry::Direction<f64>;
pub type AxisPair = geometry::AxisPair<f64>;
pub type BandColouring = colourings::BandColouring<f64>;
pub type HarmonicColouring = colourings::HarmonicColouring<f64>;
pub type Colouring = colourings::Colouring<f64>;
pub type ColouringPair = colourings::ColouringPair<f64>;
pub type CatalogueLabel = colourings::CatalogueLabel<f64>;
pub type CorrelationCurve = correlation::CorrelationCurve<f64>;
pub type CurvePoint = correlation::CurvePoint<f64>;
