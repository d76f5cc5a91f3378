//! Monte Carlo and brute-force oracles for the analytic modules.
//!
//! Every trial draws from its own ChaCha8 stream (the seed selects the
//! generator, the trial index selects the stream), so reports only depend on
//! the seed and the inputs.

mod coordination;
mod game;
mod oracle;
mod path;
mod stats;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StandardUniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use coordination::{play_round_game, RoundGame, RoundOutcome, SettledRole};
pub use game::{simulate_game, SimReport, StrategyRule};
pub use oracle::best_response_grid;
pub use path::{sample_path, GbmStepper, Path};
pub use stats::{MeanStat, PassageStats, Proportion};

/// Scalars the simulator can draw.
pub trait SimScalar: Scalar {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
    /// Uniform on `[0, 1)`.
    fn uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

macro_rules! impl_sim_scalar {
    ($t:ty) => {
        impl SimScalar for $t {
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                <StandardNormal as Distribution<$t>>::sample(&StandardNormal, rng)
            }
            fn uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
                <StandardUniform as Distribution<$t>>::sample(&StandardUniform, rng)
            }
        }
    };
}

impl_sim_scalar!(f32);
impl_sim_scalar!(f64);

/// Probability measure driving the profit process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    /// Drift `nu`.
    Physical,
    /// Drift `nu - eta * lambda`; discounted payoffs are prices.
    #[default]
    RiskNeutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig<T> {
    pub n_paths: usize,
    /// Time step in years.
    pub dt: T,
    /// Simulated horizon in years.
    pub horizon: T,
    pub seed: u64,
    #[serde(default)]
    pub measure: Measure,
}

impl<T: Scalar> SimConfig<T> {
    pub fn new(n_paths: usize, dt: T, horizon: T, seed: u64) -> Result<Self> {
        let c = Self {
            n_paths,
            dt,
            horizon,
            seed,
            measure: Measure::RiskNeutral,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::InvalidSimConfig("n_paths must be >= 1".into()));
        }
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(Error::InvalidSimConfig(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if !(self.horizon > T::zero() && self.horizon.is_finite()) {
            return Err(Error::InvalidSimConfig(format!(
                "horizon must be > 0, got {}",
                self.horizon
            )));
        }
        Ok(())
    }

    /// Number of steps covering the horizon.
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt)
            .ceil()
            .to_usize()
            .unwrap_or(usize::MAX)
    }
}

impl<T: Scalar> Default for SimConfig<T> {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            dt: T::lit(1.0 / 250.0),
            horizon: T::lit(10.0),
            seed: 0x5eed,
            measure: Measure::RiskNeutral,
        }
    }
}

/// Generator for trial `index`.
pub fn trial_rng(seed: u64, index: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
