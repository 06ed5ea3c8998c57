//! Double-pass estimation of single-pass transition probabilities in
//! coherently driven two- and three-level systems.
//!
//! The numerical core ([`drive`], [`evolve`], [`su2`], [`su3`]) is generic
//! over the scalar through [`scalar::Real`]; the closed-form relations also
//! accept exact rationals. The aliases below fix the usual `f64` choice.

pub mod drive;
pub mod evolve;
pub mod harness;
pub mod inversion;
pub mod linalg;
pub mod scalar;
pub mod su2;
pub mod su3;

pub type Mat2 = evolve::Mat2<f64>;
pub type Mat3 = evolve::Mat3<f64>;
pub type PulseShape = drive::PulseShape<f64>;
pub type DetuningShape = drive::DetuningShape<f64>;
pub type Window = drive::Window<f64>;
pub type DriveProfile2 = drive::DriveProfile2<f64>;
pub type DriveProfile3 = drive::DriveProfile3<f64>;
pub type CayleyKlein = evolve::CayleyKlein<f64>;
pub type ResonantCK = su3::ResonantCK<f64>;
pub type PhasePair = su3::PhasePair<f64>;
pub type PassProbabilities2 = su2::PassProbabilities2<f64>;
pub type PassProbabilities3 = su3::PassProbabilities3<f64>;
pub type Estimate = inversion::Estimate<f64>;
pub type NoiseSlack = inversion::NoiseSlack<f64>;
pub type PropagationOptions = evolve::PropagationOptions<f64>;

/// Exact probability for the rational forms of the relations.
pub type ExactProbability = num_rational::BigRational;
