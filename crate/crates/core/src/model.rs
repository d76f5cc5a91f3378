//! Closed-form values of the follower, leader and sharing positions.
//!
//! The profit level `Y` follows `dY = Y (nu dt + eta dW)` and is spanned by a
//! traded asset with drift `mu` and volatility `sigma`, so every position is
//! priced under the unique risk-neutral measure. Under that measure `Y` grows
//! at `r - delta`, where `delta = eta * lambda - (nu - r)` and `lambda` is the
//! Sharpe ratio of the traded asset.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{pow_nonneg, Scalar};

/// Market and project constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    /// Drift of the profit process (per year).
    pub nu: T,
    /// Volatility of the profit process (per sqrt-year).
    pub eta: T,
    /// Drift of the traded asset.
    pub mu: T,
    /// Volatility of the traded asset.
    pub sigma: T,
    /// Risk-free rate.
    pub r: T,
    /// Sunk investment cost.
    #[serde(rename = "K")]
    pub k: T,
    /// Monopoly quantity.
    #[serde(rename = "D1")]
    pub d1: T,
    /// Duopoly quantity.
    #[serde(rename = "D2")]
    pub d2: T,
}

impl<T: Scalar> ModelParams<T> {
    /// The reference market used throughout the docs and tests:
    /// `(K, nu, eta, mu, sigma, r, D1, D2) = (10, 0.01, 0.2, 0.04, 0.3, 0.03, 1, 0.35)`.
    pub fn baseline() -> Self {
        Self {
            nu: T::lit(0.01),
            eta: T::lit(0.2),
            mu: T::lit(0.04),
            sigma: T::lit(0.3),
            r: T::lit(0.03),
            k: T::lit(10.0),
            d1: T::lit(1.0),
            d2: T::lit(0.35),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: T| {
            if v.is_finite() && v > T::zero() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and > 0, got {v}"),
                })
            }
        };
        positive("eta", self.eta)?;
        positive("sigma", self.sigma)?;
        positive("r", self.r)?;
        positive("K", self.k)?;
        positive("D2", self.d2)?;
        if !(self.nu.is_finite() && self.mu.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "nu/mu",
                reason: "drifts must be finite".into(),
            });
        }
        if !(self.d1 > self.d2) {
            return Err(Error::InvalidParameter {
                name: "D1",
                reason: format!("need 0 < D2 < D1, got D1 = {}, D2 = {}", self.d1, self.d2),
            });
        }
        Ok(())
    }
}

/// Constants derived from [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derived<T> {
    /// Sharpe ratio `(mu - r) / sigma`.
    pub lambda: T,
    /// Effective discount gap `eta * lambda - (nu - r)`.
    pub delta: T,
    /// Positive root of the characteristic quadratic, always `> 1`.
    pub beta: T,
    /// Follower investment threshold.
    pub y_f: T,
}

/// Computes `lambda`, `delta`, `beta` and the follower threshold in closed form.
pub fn derive<T: Scalar>(p: &ModelParams<T>) -> Result<Derived<T>> {
    p.validate()?;
    let lambda = (p.mu - p.r) / p.sigma;
    let delta = p.eta * lambda - (p.nu - p.r);
    if !(delta > T::zero()) {
        return Err(Error::NonPositiveDelta {
            delta: delta.to_f64_lossy(),
        });
    }
    let half = T::lit(0.5);
    let eta2 = p.eta * p.eta;
    let a = half - (p.r - delta) / eta2;
    let beta = a + (a * a + T::lit(2.0) * p.r / eta2).sqrt();
    let y_f = delta * p.k * beta / (p.d2 * (beta - T::one()));
    Ok(Derived {
        lambda,
        delta,
        beta,
        y_f,
    })
}

/// Leader, follower and sharing values at one profit level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffTriple<T> {
    pub l: T,
    pub f: T,
    pub s: T,
}

impl<T: Scalar> PayoffTriple<T> {
    pub fn max(&self) -> T {
        self.l.max(self.f).max(self.s)
    }

    pub fn min(&self) -> T {
        self.l.min(self.f).min(self.s)
    }
}

/// Validated parameters bundled with their derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Model<T> {
    params: ModelParams<T>,
    derived: Derived<T>,
}

impl<T: Scalar> Model<T> {
    pub fn new(params: ModelParams<T>) -> Result<Self> {
        let derived = derive(&params)?;
        Ok(Self { params, derived })
    }

    pub fn baseline() -> Self {
        Self::new(ModelParams::baseline()).expect("baseline parameters are valid")
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn derived(&self) -> &Derived<T> {
        &self.derived
    }

    pub fn y_f(&self) -> T {
        self.derived.y_f
    }

    /// `(y / Y_F)^beta`, zero at `y = 0`.
    fn scaled_power(&self, y: T) -> T {
        pow_nonneg(y / self.derived.y_f, self.derived.beta)
    }

    /// Value of the perpetual risk-neutral cash flow `D y` per unit quantity `D`.
    pub fn perpetuity(&self, quantity: T, y: T) -> T {
        quantity * y / self.derived.delta
    }

    /// Follower value: a perpetual call on `D2 y / delta - K` exercised at `Y_F`.
    pub fn follower_value(&self, y: T) -> T {
        let Derived { beta, y_f, .. } = self.derived;
        if y <= y_f {
            self.params.k / (beta - T::one()) * self.scaled_power(y)
        } else {
            self.sharing_value(y)
        }
    }

    /// Leader value: monopoly cash flows until the follower enters at `Y_F`,
    /// net of the investment cost.
    pub fn leader_value(&self, y: T) -> T {
        let p = &self.params;
        let Derived { beta, y_f, .. } = self.derived;
        if y < y_f {
            let monopoly_loss = (p.d1 - p.d2) / p.d2 * p.k * beta / (beta - T::one());
            self.perpetuity(p.d1, y) - monopoly_loss * self.scaled_power(y) - p.k
        } else {
            self.sharing_value(y)
        }
    }

    /// Present value of the leader's project without the sunk cost.
    pub fn leader_project_value(&self, y: T) -> T {
        let p = &self.params;
        if y < self.derived.y_f {
            self.perpetuity(p.d1, y)
                - (p.d1 - p.d2) * self.derived.y_f / self.derived.delta * self.scaled_power(y)
        } else {
            self.perpetuity(p.d2, y)
        }
    }

    /// Value of simultaneous investment: `D2 y / delta - K`.
    pub fn sharing_value(&self, y: T) -> T {
        self.perpetuity(self.params.d2, y) - self.params.k
    }

    pub fn payoff_triple(&self, y: T) -> PayoffTriple<T> {
        PayoffTriple {
            l: self.leader_value(y),
            f: self.follower_value(y),
            s: self.sharing_value(y),
        }
    }
}
