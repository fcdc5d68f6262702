//! Analysis toolkit for a three-stage anaerobic digestion chemostat.
//!
//! The model tracks hydrolysis, acidogenesis and methanogenesis in a
//! continuous reactor, with per-population removal rates that combine
//! hydraulic washout and intrinsic mortality, and a substrate-inhibited
//! (non-monotone) methanogenic growth law. Hydrolysis is either first order
//! or mediated by the acidogenic biomass; the two variants share the same
//! state space but have different equilibrium structure.
//!
//! What the crate provides:
//!
//! * [`kinetics`]: growth laws, derivatives, break-even concentrations;
//! * [`model`]: parameters, the right-hand side, mass bookkeeping;
//! * [`equilibria`]: closed-form equilibria for first-order hydrolysis and
//!   root-based equilibria (with multiplicity counting) for the
//!   biomass-dependent variant;
//! * [`stability`]: analytic classification (sign conditions plus a
//!   Routh-Hurwitz block) cross-checked against a numeric eigenvalue solve
//!   that exploits the block-triangular Jacobian;
//! * [`simulator`]: adaptive Runge-Kutta integration with positivity and
//!   mass-envelope monitors and convergence detection;
//! * [`diagram`]: operating-diagram scans over two operating parameters;
//! * [`validation`]: seeded randomized suites comparing the analytic and
//!   numeric routes.
//!
//! All numerics are generic over [`scalar::Scalar`]; the `*64` aliases below
//! fix `f64`, which is what the command-line tool and the validation suites
//! use.

pub mod diagram;
pub mod equilibria;
pub mod error;
pub mod kinetics;
pub mod linalg;
pub mod model;
pub mod scalar;
pub mod simulator;
pub mod solve;
pub mod stability;
pub mod validation;

pub use error::{Error, Result};

/// Concrete `f64` aliases for the main types.
pub type GrowthCurve64 = kinetics::GrowthCurve<f64>;
pub type BreakEven64 = kinetics::BreakEven<f64>;
pub type ModelParams64 = model::ModelParams<f64>;
pub type Hydrolysis64 = model::Hydrolysis<f64>;
pub type State64 = model::State<f64>;
pub type RemovalRates64 = model::RemovalRates<f64>;
pub type EquilibriumRecord64 = equilibria::EquilibriumRecord<f64>;
pub type MultiplicityReport64 = equilibria::MultiplicityReport<f64>;
pub type RouthReport64 = stability::RouthReport<f64>;
pub type StabilityVerdict64 = stability::StabilityVerdict<f64>;
pub type Matrix5x64 = linalg::Matrix5<f64>;
pub type SimConfig64 = simulator::SimConfig<f64>;
pub type Trajectory64 = simulator::Trajectory<f64>;
pub type ScanSpec64 = diagram::ScanSpec<f64>;
pub type DiagramGrid64 = diagram::DiagramGrid<f64>;

/// Concrete `f32` aliases.
pub type GrowthCurve32 = kinetics::GrowthCurve<f32>;
pub type ModelParams32 = model::ModelParams<f32>;
pub type State32 = model::State<f32>;
