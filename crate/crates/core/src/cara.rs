//! The coordination game for agents with exponential (CARA) utility.
//!
//! Agents keep pricing `L`, `F` and `S` with the risk-neutral measure but rank
//! the regulator's lottery with `U(x) = -exp(-gamma x)`. Every ratio of
//! utility differences reduces to `u(x) = exp(gamma x) - 1` evaluated at
//! payoff gaps, which is what this module computes with.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{outcome_distribution, Game, OutcomeDistribution, StrategyProfile};
use crate::error::{Error, Result};
use crate::regulator::Agent;
use crate::roots::bisect;
use crate::scalar::{rel_tol, Scalar};

/// Absolute risk aversion `gamma > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RiskProfile<T> {
    gamma: T,
}

impl<T: Scalar> RiskProfile<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if !(gamma > T::zero() && gamma.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("risk aversion must be finite and > 0, got {gamma}"),
            });
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }
}

/// `u(x) = exp(gamma x) - 1`.
pub fn u<T: Scalar>(x: T, gamma: T) -> Result<T> {
    let z = gamma * x;
    if z > T::exp_saturation() {
        return Err(Error::Saturated(z.to_f64_lossy()));
    }
    Ok(z.exp_m1())
}

/// `u(a) / u(b)` for `0 <= a <= b`, `b > 0`, without overflow.
fn utility_ratio<T: Scalar>(a: T, b: T, gamma: T) -> T {
    if a <= T::zero() {
        return T::zero();
    }
    // u(a)/u(b) = exp(-gamma (b - a)) * expm1(-gamma a) / expm1(-gamma b)
    (-(gamma * (b - a))).exp() * (-(gamma * a)).exp_m1() / (-(gamma * b)).exp_m1()
}

/// A strategic threshold that may sit at its large-`gamma` limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaThreshold<T> {
    pub value: T,
    /// The root could not be separated from `Y_F`; `value` is the limit `Y_F`.
    pub at_limit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaThresholds<T> {
    pub y_1: GammaThreshold<T>,
    pub y_2: GammaThreshold<T>,
}

impl<T: Scalar> GammaThresholds<T> {
    pub fn lower(&self) -> T {
        self.y_1.value.min(self.y_2.value)
    }
}

/// A game played by two agents with the same CARA risk aversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskAverseGame<T> {
    game: Game<T>,
    risk: RiskProfile<T>,
}

impl<T: Scalar> RiskAverseGame<T> {
    pub fn new(game: Game<T>, risk: RiskProfile<T>) -> Self {
        Self { game, risk }
    }

    pub fn game(&self) -> &Game<T> {
        &self.game
    }

    pub fn gamma(&self) -> T {
        self.risk.gamma
    }

    fn check_interval(&self, what: &'static str, y: T) -> Result<()> {
        let th = self.game.thresholds();
        let tol = self.game.tolerance();
        if !(y >= th.y_l - tol && y < th.y_f) {
            return Err(Error::OutOfDomain {
                what,
                y: y.to_f64_lossy(),
                lo: th.y_l.to_f64_lossy(),
                hi: th.y_f.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// `u(L - F) / u(L - S)` on `[Y_L, Y_F)`: the round probability of the
    /// symmetric game with `qS = 1`.
    pub fn p_gamma(&self, y: T) -> Result<T> {
        self.check_interval("p_gamma", y)?;
        let t = self.game.payoff_triple(y);
        let a = (t.l - t.f).max(T::zero());
        let b = t.l - t.s;
        if !(b > T::zero()) {
            return Err(Error::Numerical(format!(
                "L - S = {b} is not positive at y = {y}"
            )));
        }
        Ok(utility_ratio(a, b, self.risk.gamma).min(T::one()))
    }

    fn mixed_probability(&self, agent: Agent, p: T) -> Result<T> {
        let law = self.game.law();
        let den = law.elect(agent) * p + law.qs;
        if !(den > T::zero()) {
            return Err(Error::DegenerateProbability {
                agent: agent.number(),
            });
        }
        Ok(p / den)
    }

    /// `P_{i,gamma} = u(L-F) / (q_i u(L-F) + qS u(L-S))`.
    pub fn mixed_probabilities(&self, y: T) -> Result<(T, T)> {
        let p = self.p_gamma(y)?;
        Ok((
            self.mixed_probability(Agent::One, p)?,
            self.mixed_probability(Agent::Two, p)?,
        ))
    }

    /// `Y_{i,gamma}`: the level where the opponent's mixed probability reaches one.
    pub fn thresholds(&self) -> Result<GammaThresholds<T>> {
        Ok(GammaThresholds {
            y_1: self.threshold(Agent::One)?,
            y_2: self.threshold(Agent::Two)?,
        })
    }

    fn threshold(&self, agent: Agent) -> Result<GammaThreshold<T>> {
        let law = self.game.law();
        let th = self.game.thresholds();
        let tol = rel_tol::<T>(1e-12, 8.0);
        if law.qs <= tol {
            return Err(Error::Unsupported("qS > 0 for risk-averse thresholds"));
        }
        let q = law.elect(agent);
        if q <= tol {
            return Ok(GammaThreshold {
                value: th.y_f,
                at_limit: true,
            });
        }
        // P_{j,gamma} = 1  <=>  p_gamma = qS / (q_i + qS)
        let target = law.qs / (q + law.qs);
        let upper = th.y_f * (T::one() - rel_tol::<T>(1e-9, 64.0));
        let h = |y: T| self.p_gamma(y).map(|p| p - target).unwrap_or(T::nan());
        if !(h(upper) > T::zero()) {
            return Ok(GammaThreshold {
                value: th.y_f,
                at_limit: true,
            });
        }
        let value = bisect(h, th.y_l, upper, self.game.tolerance())?;
        Ok(GammaThreshold {
            value,
            at_limit: false,
        })
    }

    /// Outcome of the risk-averse mixed equilibrium on `[Y_L, Y_{1,gamma})`.
    pub fn outcome_distribution(&self, y: T) -> Result<OutcomeDistribution<T>> {
        let (p1, p2) = self.mixed_probabilities(y)?;
        if p1.max(p2) <= T::zero() {
            // at Y_L each agent leads with probability 1/2
            let half = T::lit(0.5);
            return Ok(OutcomeDistribution {
                a1: half,
                a2: half,
                a_s: T::zero(),
            });
        }
        let profile = StrategyProfile::new(p1.min(T::one()), p2.min(T::one()))?;
        outcome_distribution(&profile)
    }

    /// Certainty equivalents `(e1, e2)` of the coordination game.
    pub fn indifference_value(&self, y: T) -> Result<(T, T)> {
        let law = *self.game.law();
        if !(law.qs > T::zero()) {
            return Err(Error::Unsupported("qS > 0 for indifference values"));
        }
        let upper = self.thresholds()?.lower();
        if !(y < upper) {
            return Err(Error::OutOfDomain {
                what: "indifference_value",
                y: y.to_f64_lossy(),
                lo: self.game.thresholds().y_l.to_f64_lossy(),
                hi: upper.to_f64_lossy(),
            });
        }
        let a = self.outcome_distribution(y)?;
        let t = self.game.payoff_triple(y);
        let gamma = self.risk.gamma;
        // -E_i = sum_k c_k exp(-gamma V_k) with c_k >= 0, so the inversion is a
        // log-sum-exp without cancellation.
        let certainty_equivalent = |weights: [T; 3]| -> Result<T> {
            let values = [t.l, t.f, t.s];
            let exponents: Vec<T> = weights
                .iter()
                .zip(values)
                .filter(|(w, _)| **w > T::zero())
                .map(|(w, v)| w.ln() - gamma * v)
                .collect();
            let max = exponents.iter().copied().fold(T::neg_infinity(), T::max);
            if !max.is_finite() {
                return Err(Error::Numerical(format!(
                    "expected utility has no negative mass at y = {y}"
                )));
            }
            let sum: T = exponents.iter().map(|e| (*e - max).exp()).sum();
            Ok(-(max + sum.ln()) / gamma)
        };
        let e1 =
            certainty_equivalent([a.a1 + a.a_s * law.q1, a.a2 + a.a_s * law.q2, a.a_s * law.qs])?;
        let e2 =
            certainty_equivalent([a.a2 + a.a_s * law.q2, a.a1 + a.a_s * law.q1, a.a_s * law.qs])?;
        Ok((e1, e2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Model;
    use crate::regulator::RegulatorLaw;
    use approx::assert_relative_eq;

    fn baseline(gamma: f64) -> RiskAverseGame<f64> {
        RiskAverseGame::new(Game::baseline(), RiskProfile::new(gamma).unwrap())
    }

    fn cournot(gamma: f64) -> RiskAverseGame<f64> {
        let g = Game::new(Model::baseline(), RegulatorLaw::cournot()).unwrap();
        RiskAverseGame::new(g, RiskProfile::new(gamma).unwrap())
    }

    #[test]
    fn u_basics() {
        assert_eq!(u(0.0, 2.0).unwrap(), 0.0);
        assert_relative_eq!(u(2f64.ln(), 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(u(1e-12, 1.0).unwrap(), 1e-12, max_relative = 1e-12);
        assert!(matches!(u(800.0, 1.0), Err(Error::Saturated(_))));
        assert!(u(60.0f32, 1.0).is_ok());
        assert!(u(100.0f32, 1.0).is_err());
    }

    #[test]
    fn gamma_must_be_positive() {
        assert!(RiskProfile::new(0.0).is_err());
        assert!(RiskProfile::new(-1.0).is_err());
        assert!(RiskProfile::new(f64::INFINITY).is_err());
    }

    #[test]
    fn utility_ratio_matches_direct_formula() {
        for (a, b, g) in [(0.5f64, 2.0, 0.3), (1.0, 3.0, 2.0), (1e-3, 1e-2, 5.0)] {
            let direct = (g * a).exp_m1() / (g * b).exp_m1();
            assert_relative_eq!(utility_ratio(a, b, g), direct, max_relative = 1e-13);
        }
    }

    #[test]
    fn p_gamma_limits() {
        let th = *Game::<f64>::baseline().thresholds();
        let mid = 0.5 * (th.y_l + th.y_f);
        let g = cournot(1e-8);
        assert_eq!(
            g.p_gamma(th.y_l).unwrap().min(1e-9),
            g.p_gamma(th.y_l).unwrap()
        );
        let p0 = g.game().p0(mid).unwrap();
        assert!((g.p_gamma(mid).unwrap() - p0).abs() < 1e-4);
        assert!(cournot(50.0).p_gamma(mid).unwrap() < 1e-3);
        assert!(g.p_gamma(th.y_f).is_err());
    }

    #[test]
    fn cournot_mixed_probabilities_equal_p_gamma() {
        let g = cournot(0.7);
        let p = g.p_gamma(0.9).unwrap();
        assert_eq!(g.mixed_probabilities(0.9).unwrap(), (p, p));
    }

    #[test]
    fn risk_neutral_limit_of_mixed_probabilities() {
        let neutral = Game::<f64>::baseline();
        let g = baseline(1e-8);
        for y in [0.4, 0.45, 0.5] {
            let (a1, a2) = g.mixed_probabilities(y).unwrap();
            let (b1, b2) = neutral.mixed_probabilities(y).unwrap();
            assert!((a1 - b1).abs() < 1e-4 && (a2 - b2).abs() < 1e-4);
        }
    }

    #[test]
    fn mixed_probabilities_decrease_with_gamma() {
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for gamma in [0.01, 0.1, 1.0, 10.0] {
            let p = baseline(gamma).mixed_probabilities(0.5).unwrap();
            assert!(p.0 <= prev.0 && p.1 <= prev.1);
            prev = p;
        }
    }

    #[test]
    fn thresholds_near_risk_neutral_and_large_gamma() {
        let neutral = *Game::<f64>::baseline().thresholds();
        let t = baseline(1e-8).thresholds().unwrap();
        assert!((t.y_1.value - neutral.y_1).abs() < 1e-6);
        assert!((t.y_2.value - neutral.y_2).abs() < 1e-6);
        // F - S vanishes to second order at Y_F, so the gap closes like
        // Y_F * sqrt(2 ln((q_i + qS) / qS) / (gamma K beta))
        let model = Model::<f64>::baseline();
        let (k, beta) = (model.params().k, model.derived().beta);
        for gamma in [1e3, 1e4] {
            let t = baseline(gamma).thresholds().unwrap();
            for (y, q) in [(t.y_1.value, 0.5), (t.y_2.value, 0.2)] {
                let gap = (neutral.y_f - y) / neutral.y_f;
                let rate = (2.0 * ((q + 0.3) / 0.3f64).ln() / (gamma * k * beta)).sqrt();
                assert!(
                    gap > 0.0 && (gap / rate - 1.0).abs() < 0.1,
                    "gamma {gamma}: {gap} vs {rate}"
                );
            }
        }
        let t = baseline(2e3).thresholds().unwrap();
        assert!(t.y_1.value > 0.99 * neutral.y_f && t.y_2.value > 0.99 * neutral.y_f);
    }

    #[test]
    fn extreme_gamma_reports_the_limit() {
        let t = baseline(1e12).thresholds().unwrap();
        assert!(t.y_1.at_limit || (t.y_1.value - t.y_1.value.min(1.8344845)).abs() < 1e-6);
        assert!(t.y_2.value <= Game::<f64>::baseline().thresholds().y_f);
    }

    #[test]
    fn indifference_values_equal_follower_value() {
        let g = baseline(1.0);
        let th = *g.game().thresholds();
        let k = g.game().model().params().k;
        for y in [th.y_l, 0.4, 0.5, 0.8] {
            let (e1, e2) = g.indifference_value(y).unwrap();
            let f = g.game().payoff_triple(y).f;
            assert!((e1 - f).abs() < 1e-6 * k, "y={y} e1={e1} f={f}");
            assert!((e2 - f).abs() < 1e-6 * k, "y={y} e2={e2} f={f}");
        }
        assert!(g.indifference_value(1.8).is_err());
    }

    #[test]
    fn outcome_ratio_tends_to_one() {
        let mut prev = 0.0;
        for gamma in [0.01, 0.1, 1.0, 10.0, 100.0] {
            let a = baseline(gamma).outcome_distribution(0.5).unwrap();
            let ratio = a.a1 / a.a2;
            assert!(
                ratio <= 1.0 + 1e-12 && ratio >= prev - 1e-12,
                "gamma={gamma} ratio={ratio}"
            );
            prev = ratio;
        }
        assert!(prev > 0.99);
    }
}
