//! Strategic thresholds and equilibria of the regulated preemption game.
//!
//! Below the preemption threshold `Y_L` both agents wait. Between `Y_L` and
//! the follower threshold `Y_F` they play a coordination game whose payoffs
//! are `L`, `F` and the regulator-blended `(S1, S2)`. Its equilibria are
//! organised by two thresholds: `Y_1`, where agent one starts preferring the
//! regulator's draw to the follower position (`F = S1`), and `Y_2`, the same
//! point for agent two (`F = S2`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Model, PayoffTriple};
use crate::regulator::{blended_payoffs, classify, Agent, Regime, RegulatorLaw};
use crate::roots::bisect;
use crate::scalar::{rel_tol, Scalar};

/// How a strategic threshold was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdOrigin {
    /// Interior root on `(Y_L, Y_F)`.
    Root,
    /// Collapsed onto `Y_L` (no sharing: every simultaneous move elects someone).
    AtPreemption,
    /// Collapsed onto `Y_F` (the agent is never elected alone).
    AtFollower,
}

impl ThresholdOrigin {
    pub fn is_collapsed(self) -> bool {
        self != ThresholdOrigin::Root
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds<T> {
    /// Preemption threshold, `L(Y_L) = F(Y_L)`.
    pub y_l: T,
    /// Root of `q1 (L - F) - qS (F - S)`, i.e. `F = S1`.
    pub y_1: T,
    /// Root of `q2 (L - F) - qS (F - S)`, i.e. `F = S2`.
    pub y_2: T,
    /// Follower threshold.
    pub y_f: T,
    pub origin_1: ThresholdOrigin,
    pub origin_2: ThresholdOrigin,
}

impl<T: Scalar> Thresholds<T> {
    /// Threshold at which `agent` switches to investing for sure.
    pub fn of(&self, agent: Agent) -> T {
        match agent {
            Agent::One => self.y_1,
            Agent::Two => self.y_2,
        }
    }
}

fn upper_bracket<T: Scalar>(y_f: T) -> T {
    y_f * (T::one() - rel_tol::<T>(1e-9, 64.0))
}

fn root_tolerance<T: Scalar>(y_f: T) -> T {
    y_f * rel_tol::<T>(1e-10, 4.0)
}

/// Unique root of `L - F` on `(0, Y_F)`.
pub fn preemption_threshold<T: Scalar>(model: &Model<T>) -> Result<T> {
    let y_f = model.y_f();
    bisect(
        |y| model.leader_value(y) - model.follower_value(y),
        T::lit(1e-6) * y_f,
        upper_bracket(y_f),
        root_tolerance(y_f),
    )
}

/// Threshold `Y_i` for the reduced `law`, with the collapses of the singular regimes.
fn agent_threshold<T: Scalar>(
    model: &Model<T>,
    law: &RegulatorLaw<T>,
    agent: Agent,
    y_l: T,
) -> Result<(T, ThresholdOrigin)> {
    let tol = rel_tol::<T>(1e-12, 8.0);
    let q = law.elect(agent);
    let y_f = model.y_f();
    if law.qs <= tol {
        return Ok(if q > tol {
            (y_l, ThresholdOrigin::AtPreemption)
        } else {
            (y_f, ThresholdOrigin::AtFollower)
        });
    }
    if q <= tol {
        return Ok((y_f, ThresholdOrigin::AtFollower));
    }
    let residual = |y: T| {
        let t = model.payoff_triple(y);
        q * (t.l - t.f) - law.qs * (t.f - t.s)
    };
    // the residual is positive just below Y_F, but near Y_F it can drown in
    // rounding noise, so back off until its sign resolves
    let mut upper = upper_bracket(y_f);
    while !(residual(upper) > T::zero()) {
        upper = y_f - T::lit(4.0) * (y_f - upper);
        if upper <= y_l {
            return Ok((y_f, ThresholdOrigin::Root));
        }
    }
    let y = bisect(residual, y_l, upper, root_tolerance(y_f))?;
    Ok((y, ThresholdOrigin::Root))
}

/// Solves `Y_L`, `Y_1`, `Y_2` by bisection; `law` is reduced first.
pub fn solve_thresholds<T: Scalar>(
    model: &Model<T>,
    law: &RegulatorLaw<T>,
) -> Result<Thresholds<T>> {
    let law = law.reduce()?;
    let y_l = preemption_threshold(model)?;
    let (y_1, origin_1) = agent_threshold(model, &law, Agent::One, y_l)?;
    let (y_2, origin_2) = agent_threshold(model, &law, Agent::Two, y_l)?;
    Ok(Thresholds {
        y_l,
        y_1,
        y_2,
        y_f: model.y_f(),
        origin_1,
        origin_2,
    })
}

/// Per-agent probabilities of acting in one round of the coordination game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile<T> {
    pub p1: T,
    pub p2: T,
}

impl<T: Scalar> StrategyProfile<T> {
    pub fn new(p1: T, p2: T) -> Result<Self> {
        let ok = |p: T| p >= T::zero() && p <= T::one();
        if !(ok(p1) && ok(p2)) {
            return Err(Error::Numerical(format!(
                "action probabilities must lie in [0, 1], got ({p1}, {p2})"
            )));
        }
        Ok(Self { p1, p2 })
    }

    pub fn pure(p1: bool, p2: bool) -> Self {
        let b = |x: bool| if x { T::one() } else { T::zero() };
        Self {
            p1: b(p1),
            p2: b(p2),
        }
    }

    /// Only `agent` acts.
    pub fn leader(agent: Agent) -> Self {
        Self::pure(agent == Agent::One, agent == Agent::Two)
    }

    pub fn of(&self, agent: Agent) -> T {
        match agent {
            Agent::One => self.p1,
            Agent::Two => self.p2,
        }
    }

    pub fn distance(&self, other: &Self) -> T {
        (self.p1 - other.p1).abs().max((self.p2 - other.p2).abs())
    }
}

/// Probabilities that the coordination game ends with agent one alone, agent
/// two alone, or both acting in the same round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution<T> {
    pub a1: T,
    pub a2: T,
    #[serde(rename = "aS")]
    pub a_s: T,
}

impl<T: Scalar> OutcomeDistribution<T> {
    pub fn of(&self, agent: Agent) -> T {
        match agent {
            Agent::One => self.a1,
            Agent::Two => self.a2,
        }
    }

    /// Final roles once the regulator has settled simultaneous moves.
    pub fn settle(&self, law: &RegulatorLaw<T>) -> SettledOutcome<T> {
        let law = law.reduce().unwrap_or(*law);
        SettledOutcome {
            leader1: self.a1 + self.a_s * law.q1,
            leader2: self.a2 + self.a_s * law.q2,
            shared: self.a_s * law.qs,
        }
    }
}

/// Probabilities of the final roles: agent one leads, agent two leads, or
/// both invest and share the market.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettledOutcome<T> {
    pub leader1: T,
    pub leader2: T,
    pub shared: T,
}

impl<T: Scalar> SettledOutcome<T> {
    /// Settled outcome of the mixed equilibrium. It only depends on `p0`, not
    /// on the regulator's law.
    pub fn mixed_from_p0(p0: T) -> Self {
        let two = T::lit(2.0);
        let lone = (T::one() - p0) / (two - p0);
        Self {
            leader1: lone,
            leader2: lone,
            shared: p0 / (two - p0),
        }
    }
}

/// Outcome probabilities of the repeated rounds played with `profile`.
pub fn outcome_distribution<T: Scalar>(
    profile: &StrategyProfile<T>,
) -> Result<OutcomeDistribution<T>> {
    let StrategyProfile { p1, p2 } = *profile;
    if !(p1.max(p2) > T::zero()) {
        return Err(Error::NoAction);
    }
    let stop = p1 + p2 - p1 * p2;
    Ok(OutcomeDistribution {
        a1: p1 * (T::one() - p2) / stop,
        a2: p2 * (T::one() - p1) / stop,
        a_s: p1 * p2 / stop,
    })
}

/// Expected payoffs `(E1, E2)` of the coordination game.
pub fn expected_payoff<T: Scalar>(
    profile: &StrategyProfile<T>,
    t: &PayoffTriple<T>,
    law: &RegulatorLaw<T>,
) -> Result<(T, T)> {
    let a = outcome_distribution(profile)?;
    let (s1, s2) = blended_payoffs(t, law);
    Ok((
        a.a1 * t.l + a.a2 * t.f + a.a_s * s1,
        a.a2 * t.l + a.a1 * t.f + a.a_s * s2,
    ))
}

/// Regions of the equilibrium strategy map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionLabel {
    /// `y < Y_L`: both wait.
    Defer,
    /// `y = Y_L`: each agent leads with probability 1/2.
    PreemptBoundary,
    /// Mixed strategies `(P1, P2)`.
    Mixed,
    /// One agent invests and the other becomes follower.
    Leads(Agent),
    /// Both ask to invest and the regulator settles.
    JointExercise,
    /// `y >= Y_F`: both invest at once.
    ImmediateExercise,
}

impl RegionLabel {
    pub fn label(&self) -> String {
        match self {
            RegionLabel::Defer => "defer".into(),
            RegionLabel::PreemptBoundary => "preempt-boundary".into(),
            RegionLabel::Mixed => "mixed".into(),
            RegionLabel::Leads(a) => format!("agent-{}-leads", a.number()),
            RegionLabel::JointExercise => "joint-exercise".into(),
            RegionLabel::ImmediateExercise => "immediate-exercise".into(),
        }
    }
}

impl std::fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

/// The three cases of the coordination game on `(Y_L, Y_F)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GameCase {
    /// Both mixed probabilities below one: two pure and one mixed equilibrium.
    A,
    /// Only the more electable agent wants the regulator's draw.
    B,
    /// Both prefer the regulator's draw to following.
    C,
}

/// Where an equilibrium sits in strategy space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Support<T> {
    Isolated,
    /// The profile stands for the segment where `leader` acts with any
    /// probability in `[from, 1]` and the other agent never acts.
    LeaderSegment {
        leader: Agent,
        from: T,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium<T> {
    pub profile: StrategyProfile<T>,
    pub support: Support<T>,
}

impl<T: Scalar> Equilibrium<T> {
    /// True if `p` lies on this equilibrium within `tol`.
    pub fn contains(&self, p: &StrategyProfile<T>, tol: T) -> bool {
        match self.support {
            Support::Isolated => self.profile.distance(p) <= tol,
            Support::LeaderSegment { leader, from } => {
                p.of(leader.other()) <= tol
                    && p.of(leader) >= from - tol
                    && p.of(leader) <= T::one() + tol
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashSet<T> {
    pub case: GameCase,
    pub equilibria: Vec<Equilibrium<T>>,
    pub selected: StrategyProfile<T>,
}

impl<T: Scalar> NashSet<T> {
    pub fn contains(&self, p: &StrategyProfile<T>, tol: T) -> bool {
        self.equilibria.iter().any(|e| e.contains(p, tol))
    }
}

/// Equilibrium play at one profit level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport<T> {
    pub y: T,
    pub region: RegionLabel,
    /// Round probabilities; absent where the agents do not play the game.
    pub profile: Option<StrategyProfile<T>>,
    pub outcome: Option<OutcomeDistribution<T>>,
    pub settled: Option<SettledOutcome<T>>,
    /// Expected values `(E1, E2)` of following the equilibrium from `y`.
    pub payoffs: (T, T),
}

/// A model, a reduced regulator law and their thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Game<T> {
    model: Model<T>,
    law: RegulatorLaw<T>,
    regime: Regime,
    thresholds: Thresholds<T>,
}

impl<T: Scalar> Game<T> {
    pub fn new(model: Model<T>, law: RegulatorLaw<T>) -> Result<Self> {
        let law = law.reduce()?;
        let regime = classify(&law)?;
        let thresholds = solve_thresholds(&model, &law)?;
        Ok(Self {
            model,
            law,
            regime,
            thresholds,
        })
    }

    pub fn baseline() -> Self {
        Self::new(Model::baseline(), RegulatorLaw::baseline()).expect("baseline game is valid")
    }

    pub fn model(&self) -> &Model<T> {
        &self.model
    }

    /// The reduced law.
    pub fn law(&self) -> &RegulatorLaw<T> {
        &self.law
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn thresholds(&self) -> &Thresholds<T> {
        &self.thresholds
    }

    /// Tolerance used to decide that `y` sits on a threshold.
    pub fn tolerance(&self) -> T {
        root_tolerance(self.thresholds.y_f)
    }

    pub fn payoff_triple(&self, y: T) -> PayoffTriple<T> {
        self.model.payoff_triple(y)
    }

    pub fn blended_payoffs(&self, y: T) -> (T, T) {
        blended_payoffs(&self.payoff_triple(y), &self.law)
    }

    fn check_range(&self, what: &'static str, y: T) -> Result<()> {
        let Thresholds { y_l, y_f, .. } = self.thresholds;
        let tol = self.tolerance();
        if y < y_l - tol || y > y_f + tol || y.is_nan() {
            return Err(Error::OutOfDomain {
                what,
                y: y.to_f64_lossy(),
                lo: y_l.to_f64_lossy(),
                hi: y_f.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// `(L - F) / (L - S)` on `[Y_L, Y_F]`, with the limit 1 at `Y_F`.
    pub fn p0(&self, y: T) -> Result<T> {
        self.check_range("p0", y)?;
        if y >= self.thresholds.y_f {
            return Ok(T::one());
        }
        let t = self.payoff_triple(y);
        let den = t.l - t.s;
        if !(den > T::zero()) {
            return Ok(T::one());
        }
        Ok(((t.l - t.f) / den).max(T::zero()).min(T::one()))
    }

    /// `P_i = p0 / (q_i p0 + qS)`; values above one are returned as is.
    pub fn mixed_probabilities(&self, y: T) -> Result<(T, T)> {
        let p0 = self.p0(y)?;
        Ok((
            self.mixed_probability(Agent::One, p0)?,
            self.mixed_probability(Agent::Two, p0)?,
        ))
    }

    fn mixed_probability(&self, agent: Agent, p0: T) -> Result<T> {
        let den = self.law.elect(agent) * p0 + self.law.qs;
        if !(den > T::zero()) {
            return Err(Error::DegenerateProbability {
                agent: agent.number(),
            });
        }
        Ok(p0 / den)
    }

    /// Agent that acts alone in case (b): the one with the lower threshold.
    pub fn case_b_leader(&self) -> Agent {
        if self.thresholds.y_1 <= self.thresholds.y_2 {
            Agent::One
        } else {
            Agent::Two
        }
    }

    /// Which case of the coordination game applies at `y` in `(Y_L, Y_F)`.
    pub fn case_at(&self, y: T) -> GameCase {
        let lo = self.thresholds.y_1.min(self.thresholds.y_2);
        let hi = self.thresholds.y_1.max(self.thresholds.y_2);
        if y < lo {
            GameCase::A
        } else if y < hi {
            GameCase::B
        } else {
            GameCase::C
        }
    }

    /// Nash equilibria of the coordination game at `y` in `(Y_L, Y_F)`,
    /// with the selected one.
    pub fn nash_equilibria(&self, y: T) -> Result<NashSet<T>> {
        let Thresholds { y_l, y_f, .. } = self.thresholds;
        if !(y > y_l && y < y_f) {
            return Err(Error::OutOfDomain {
                what: "nash_equilibria",
                y: y.to_f64_lossy(),
                lo: y_l.to_f64_lossy(),
                hi: y_f.to_f64_lossy(),
            });
        }
        let p0 = self.p0(y)?;
        let case = self.case_at(y);
        let segment = |leader: Agent| -> Result<Equilibrium<T>> {
            let from = self.mixed_probability(leader, p0)?.min(T::one());
            Ok(Equilibrium {
                profile: StrategyProfile::leader(leader),
                support: Support::LeaderSegment { leader, from },
            })
        };
        let set = match case {
            GameCase::A => {
                let p1 = self.mixed_probability(Agent::One, p0)?;
                let p2 = self.mixed_probability(Agent::Two, p0)?;
                let mixed = StrategyProfile::new(p1, p2)?;
                let selected = match self.regime.favored() {
                    // the disfavored agent can never be elected alone, so the
                    // favored one acts systematically
                    Some(agent) => StrategyProfile::leader(agent),
                    None => mixed,
                };
                NashSet {
                    case,
                    equilibria: vec![
                        segment(Agent::One)?,
                        segment(Agent::Two)?,
                        Equilibrium {
                            profile: mixed,
                            support: Support::Isolated,
                        },
                    ],
                    selected,
                }
            }
            GameCase::B => {
                let leader = self.case_b_leader();
                NashSet {
                    case,
                    equilibria: vec![segment(leader)?],
                    selected: StrategyProfile::leader(leader),
                }
            }
            GameCase::C => {
                let both = StrategyProfile::pure(true, true);
                NashSet {
                    case,
                    equilibria: vec![Equilibrium {
                        profile: both,
                        support: Support::Isolated,
                    }],
                    selected: both,
                }
            }
        };
        Ok(set)
    }

    /// Equilibrium strategy, outcome and expected payoffs at any `y >= 0`.
    pub fn strategy_at(&self, y: T) -> Result<StrategyReport<T>> {
        let mut report = self.strategy_unsettled(y)?;
        report.settled = report.outcome.map(|o| o.settle(&self.law));
        Ok(report)
    }

    fn strategy_unsettled(&self, y: T) -> Result<StrategyReport<T>> {
        if !(y >= T::zero()) {
            return Err(Error::OutOfDomain {
                what: "strategy_at",
                y: y.to_f64_lossy(),
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        let Thresholds { y_l, y_f, .. } = self.thresholds;
        let tol = self.tolerance();
        let t = self.payoff_triple(y);

        if y >= y_f {
            let both = StrategyProfile::pure(true, true);
            return Ok(StrategyReport {
                y,
                region: RegionLabel::ImmediateExercise,
                profile: Some(both),
                outcome: Some(outcome_distribution(&both)?),
                settled: None,
                payoffs: (t.s, t.s),
            });
        }
        if y < y_l - tol {
            // waiting for Y_L and settling there at L(Y_L) = F(Y_L) is worth F(y)
            return Ok(StrategyReport {
                y,
                region: RegionLabel::Defer,
                profile: None,
                outcome: None,
                settled: None,
                payoffs: (t.f, t.f),
            });
        }
        if y <= y_l + tol {
            if let Some(agent) = self.regime.favored() {
                return self.leader_report(y, agent, &t);
            }
            let half = T::lit(0.5);
            let value = half * (t.l + t.f);
            return Ok(StrategyReport {
                y,
                region: RegionLabel::PreemptBoundary,
                profile: None,
                outcome: Some(OutcomeDistribution {
                    a1: half,
                    a2: half,
                    a_s: T::zero(),
                }),
                settled: None,
                payoffs: (value, value),
            });
        }

        let set = self.nash_equilibria(y)?;
        let selected = set.selected;
        let region = match (set.case, self.regime.favored()) {
            (GameCase::A, None) => RegionLabel::Mixed,
            (GameCase::A, Some(agent)) => RegionLabel::Leads(agent),
            (GameCase::B, _) => RegionLabel::Leads(self.case_b_leader()),
            (GameCase::C, _) => RegionLabel::JointExercise,
        };
        Ok(StrategyReport {
            y,
            region,
            profile: Some(selected),
            outcome: Some(outcome_distribution(&selected)?),
            settled: None,
            payoffs: expected_payoff(&selected, &t, &self.law)?,
        })
    }

    fn leader_report(&self, y: T, agent: Agent, t: &PayoffTriple<T>) -> Result<StrategyReport<T>> {
        let profile = StrategyProfile::leader(agent);
        Ok(StrategyReport {
            y,
            region: RegionLabel::Leads(agent),
            profile: Some(profile),
            outcome: Some(outcome_distribution(&profile)?),
            settled: None,
            payoffs: expected_payoff(&profile, t, &self.law)?,
        })
    }
}
