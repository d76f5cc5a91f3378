//! Regulated preemption duopoly.
//!
//! Two firms hold the option to invest in a shared project whose profit level
//! follows a geometric Brownian motion. A regulator randomizes the outcome of
//! simultaneous investment requests. The crate provides
//!
//! * closed-form leader, follower and sharing values ([`model`]),
//! * the regulator's law and the payoffs it induces ([`regulator`]),
//! * strategic thresholds, Nash equilibria and the equilibrium strategy map
//!   ([`equilibrium`]),
//! * the same game for CARA risk-averse agents ([`cara`]),
//! * Monte Carlo and brute-force oracles for all of the above ([`sim`]).
//!
//! All analytic code is generic over the [`Scalar`] type; the aliases below
//! fix it to `f64` or `f32`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cara;
pub mod equilibrium;
pub mod error;
pub mod model;
pub mod regulator;
pub mod roots;
pub mod scalar;
pub mod sim;

pub use cara::RiskProfile;
pub use equilibrium::{
    expected_payoff, outcome_distribution, Game, GameCase, NashSet, OutcomeDistribution,
    RegionLabel, SettledOutcome, StrategyProfile, StrategyReport, Thresholds,
};
pub use error::{Error, Result};
pub use model::{derive, Derived, Model, ModelParams, PayoffTriple};
pub use regulator::{
    blended_payoffs, classify, preference_option, settlement, Agent, Alternative, Position, Regime,
    RegulatorLaw,
};
pub use scalar::Scalar;

pub type ModelParams64 = ModelParams<f64>;
pub type Model64 = Model<f64>;
pub type RegulatorLaw64 = RegulatorLaw<f64>;
pub type PayoffTriple64 = PayoffTriple<f64>;
pub type Thresholds64 = Thresholds<f64>;
pub type Game64 = Game<f64>;
pub type StrategyProfile64 = StrategyProfile<f64>;
pub type OutcomeDistribution64 = OutcomeDistribution<f64>;
pub type RiskProfile64 = RiskProfile<f64>;

pub type ModelParams32 = ModelParams<f32>;
pub type Model32 = Model<f32>;
pub type RegulatorLaw32 = RegulatorLaw<f32>;
pub type Game32 = Game<f32>;
