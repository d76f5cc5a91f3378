//! The regulator's law over its four alternatives and the payoffs it induces.
//!
//! When both agents ask to invest at the same instant the regulator refuses
//! both (`q0`), elects agent one (`q1`) or agent two (`q2`), or admits both
//! (`qS`). A refusal only postpones the decision, so every strategic
//! computation works with the reduced law where `q0 = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Model, PayoffTriple};
use crate::scalar::{rel_tol, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Agent {
    One,
    Two,
}

impl Agent {
    pub fn other(self) -> Agent {
        match self {
            Agent::One => Agent::Two,
            Agent::Two => Agent::One,
        }
    }

    /// 1 or 2.
    pub fn number(self) -> u8 {
        match self {
            Agent::One => 1,
            Agent::Two => 2,
        }
    }
}

impl std::fmt::Display for Agent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "agent {}", self.number())
    }
}

/// Probability quartet `(q0, q1, q2, qS)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegulatorLaw<T> {
    #[serde(default)]
    pub q0: T,
    pub q1: T,
    pub q2: T,
    #[serde(rename = "qS")]
    pub qs: T,
}

impl<T: Scalar> RegulatorLaw<T> {
    pub fn new(q0: T, q1: T, q2: T, qs: T) -> Result<Self> {
        let law = Self { q0, q1, q2, qs };
        law.validate()?;
        Ok(law)
    }

    /// A law with `q0 = 0`.
    pub fn reduced(q1: T, q2: T, qs: T) -> Result<Self> {
        Self::new(T::zero(), q1, q2, qs)
    }

    /// `(q1, q2, qS) = (0.5, 0.2, 0.3)`, the law used with [`ModelParams::baseline`](crate::ModelParams::baseline).
    pub fn baseline() -> Self {
        Self::reduced(T::lit(0.5), T::lit(0.2), T::lit(0.3)).expect("valid")
    }

    /// Both agents admitted on simultaneous moves.
    pub fn cournot() -> Self {
        Self::reduced(T::zero(), T::zero(), T::one()).expect("valid")
    }

    /// Fair coin between the two agents.
    pub fn stackelberg() -> Self {
        let half = T::lit(0.5);
        Self::reduced(half, half, T::zero()).expect("valid")
    }

    /// The regulator always favors `agent` on simultaneous moves.
    pub fn weak_stackelberg(agent: Agent) -> Self {
        match agent {
            Agent::One => Self::reduced(T::one(), T::zero(), T::zero()),
            Agent::Two => Self::reduced(T::zero(), T::one(), T::zero()),
        }
        .expect("valid")
    }

    pub fn validate(&self) -> Result<()> {
        let qs = [self.q0, self.q1, self.q2, self.qs];
        if qs.iter().any(|q| !q.is_finite() || *q < T::zero()) {
            return Err(Error::InvalidLaw(format!(
                "probabilities must be finite and >= 0, got {:?}",
                qs.map(Scalar::to_f64_lossy)
            )));
        }
        let total: T = qs.iter().copied().sum();
        if (total - T::one()).abs() > rel_tol::<T>(1e-12, 8.0) {
            return Err(Error::InvalidLaw(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        if self.q0 >= T::one() {
            return Err(Error::InvalidLaw("q0 must be < 1".into()));
        }
        Ok(())
    }

    /// Probability of electing `agent`.
    pub fn elect(&self, agent: Agent) -> T {
        match agent {
            Agent::One => self.q1,
            Agent::Two => self.q2,
        }
    }

    pub fn is_reduced(&self) -> bool {
        self.q0 == T::zero()
    }

    /// Rescales `(q1, q2, qS)` by `1 / (1 - q0)` and sets `q0 = 0`.
    pub fn reduce(&self) -> Result<Self> {
        self.validate()?;
        if self.is_reduced() {
            return Ok(*self);
        }
        let scale = T::one() - self.q0;
        Ok(Self {
            q0: T::zero(),
            q1: self.q1 / scale,
            q2: self.q2 / scale,
            qs: self.qs / scale,
        })
    }

    /// Swaps the roles of the two agents.
    pub fn mirrored(&self) -> Self {
        Self {
            q1: self.q2,
            q2: self.q1,
            ..*self
        }
    }

    pub fn probability(&self, alternative: Alternative) -> T {
        match alternative {
            Alternative::Deny => self.q0,
            Alternative::Elect(a) => self.elect(a),
            Alternative::Share => self.qs,
        }
    }

    /// Maps a uniform draw `u` in `[0, 1)` onto an alternative.
    pub fn alternative_for(&self, u: T) -> Alternative {
        let mut acc = self.q0;
        if u < acc {
            return Alternative::Deny;
        }
        acc = acc + self.q1;
        if u < acc {
            return Alternative::Elect(Agent::One);
        }
        acc = acc + self.q2;
        if u < acc {
            return Alternative::Elect(Agent::Two);
        }
        Alternative::Share
    }
}

/// Regulator decision on a request to invest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Alternative {
    /// Refuse every request.
    Deny,
    /// Elect one agent.
    Elect(Agent),
    /// Admit both.
    Share,
}

/// Timing of an agent's request relative to the opponent's investment time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Position {
    /// Strictly before the opponent.
    First,
    /// At the same instant as the opponent.
    Simultaneous,
    /// Strictly after the opponent.
    Later,
}

/// Settlement received by `agent` asking to invest, given the regulator's decision.
pub fn settlement<T: Scalar>(
    alternative: Alternative,
    position: Position,
    t: &PayoffTriple<T>,
    agent: Agent,
) -> T {
    match alternative {
        Alternative::Deny => T::zero(),
        Alternative::Elect(elected) if elected == agent => match position {
            Position::First | Position::Simultaneous => t.l,
            Position::Later => t.f,
        },
        Alternative::Elect(_) => match position {
            Position::Simultaneous => t.f,
            Position::First | Position::Later => T::zero(),
        },
        Alternative::Share => match position {
            Position::First => t.l,
            Position::Simultaneous => t.s,
            Position::Later => t.f,
        },
    }
}

/// Expected settlements `(S1, S2)` when both agents move at once.
///
/// For an un-reduced law the refusals are repeated until a decision sticks,
/// hence the `1 / (1 - q0)` factor.
pub fn blended_payoffs<T: Scalar>(t: &PayoffTriple<T>, law: &RegulatorLaw<T>) -> (T, T) {
    let scale = T::one() / (T::one() - law.q0);
    let s1 = (law.q1 * t.l + law.q2 * t.f + law.qs * t.s) * scale;
    let s2 = (law.q2 * t.l + law.q1 * t.f + law.qs * t.s) * scale;
    (s1, s2)
}

/// Named special cases of the reduced law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `(q1, q2, qS) = (0, 0, 1)`.
    Cournot,
    /// `(1/2, 1/2, 0)`.
    StackelbergFairCoin,
    /// `qS = 0` with both agents electable.
    StackelbergUnfairCoin,
    /// The favored agent is always elected.
    WeakStackelberg(Agent),
    /// The other agent is never elected alone but sharing is possible.
    DegenerateNoShare(Agent),
    General,
}

impl Regime {
    pub fn label(&self) -> String {
        match self {
            Regime::Cournot => "cournot".into(),
            Regime::StackelbergFairCoin => "stackelberg-fair-coin".into(),
            Regime::StackelbergUnfairCoin => "stackelberg-unfair-coin".into(),
            Regime::WeakStackelberg(a) => format!("weak-stackelberg-{}", a.number()),
            Regime::DegenerateNoShare(a) => format!("degenerate-no-share-{}", a.number()),
            Regime::General => "general".into(),
        }
    }

    /// Agent favored by the regulator, if the regime has one.
    pub fn favored(&self) -> Option<Agent> {
        match self {
            Regime::WeakStackelberg(a) | Regime::DegenerateNoShare(a) => Some(*a),
            _ => None,
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

/// Classifies the reduced form of `law`. Near-singular laws are not snapped.
pub fn classify<T: Scalar>(law: &RegulatorLaw<T>) -> Result<Regime> {
    let law = law.reduce()?;
    let tol = rel_tol::<T>(1e-12, 8.0);
    let is = |a: T, b: T| (a - b).abs() <= tol;
    let zero = T::zero();
    let one = T::one();
    let half = T::lit(0.5);

    if is(law.qs, one) {
        return Ok(Regime::Cournot);
    }
    if is(law.qs, zero) && is(law.q1, half) && is(law.q2, half) {
        return Ok(Regime::StackelbergFairCoin);
    }
    for agent in [Agent::One, Agent::Two] {
        if is(law.elect(agent), one) {
            return Ok(Regime::WeakStackelberg(agent));
        }
    }
    if is(law.qs, zero) {
        return Ok(Regime::StackelbergUnfairCoin);
    }
    for agent in [Agent::One, Agent::Two] {
        if is(law.elect(agent.other()), zero) && law.elect(agent) > tol {
            return Ok(Regime::DegenerateNoShare(agent));
        }
    }
    Ok(Regime::General)
}

/// Marginal value to the favored agent of a weak Stackelberg advantage over
/// the Cournot game: `(L(y) - F(y))^+`.
pub fn preference_option<T: Scalar>(model: &Model<T>, y: T) -> T {
    (model.leader_value(y) - model.follower_value(y)).max(T::zero())
}
