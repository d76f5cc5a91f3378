use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::coordination::{play_round_game_fast, RoundOutcome, SettledRole};
use super::path::GbmStepper;
use super::stats::{MeanStat, PassageStats, Proportion};
use super::{trial_rng, SimConfig, SimScalar};
use crate::equilibrium::{Game, OutcomeDistribution, SettledOutcome};
use crate::error::{Error, Result};
use crate::regulator::{Agent, RegulatorLaw};

type ActionFn<T> = dyn Fn(T) -> T + Send + Sync;

/// Stopping rule of one agent: once `y >= threshold`, act in each round of
/// the coordination game with probability `action(y)`.
#[derive(Clone)]
pub struct StrategyRule<T> {
    pub threshold: T,
    action: Arc<ActionFn<T>>,
}

impl<T: SimScalar> StrategyRule<T> {
    pub fn new(threshold: T, action: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        Self {
            threshold,
            action: Arc::new(action),
        }
    }

    pub fn constant(threshold: T, p: T) -> Self {
        Self::new(threshold, move |_| p)
    }

    /// The selected equilibrium strategy of `agent`.
    pub fn equilibrium(game: &Game<T>, agent: Agent) -> Self {
        let game = *game;
        Self::new(game.thresholds().y_l, move |y| {
            game.strategy_at(y)
                .ok()
                .and_then(|r| r.profile)
                .map_or(T::zero(), |p| p.of(agent))
        })
    }

    /// Round probability at `y`, zero below the threshold.
    pub fn action_probability(&self, y: T) -> T {
        if y >= self.threshold {
            (self.action)(y).max(T::zero()).min(T::one())
        } else {
            T::zero()
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for StrategyRule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StrategyRule")
            .field("threshold", &self.threshold)
            .finish_non_exhaustive()
    }
}

/// Aggregate of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub n_paths: usize,
    pub y0: f64,
    pub seed: u64,
    /// Trials in which the coordination game was played.
    pub games_played: usize,
    /// Deciding-round outcome: agent 1 alone, agent 2 alone, both.
    pub round_outcome: [Proportion; 3],
    /// Roles after the regulator's ruling: 1 leads, 2 leads, shared.
    pub settled: [Proportion; 3],
    /// Discounted payoffs of agents 1 and 2 at time zero.
    pub payoffs: [MeanStat; 2],
    pub settlement_time: MeanStat,
    pub rounds: MeanStat,
    pub passage_leader: PassageStats,
    pub passage_follower: PassageStats,
    /// Trials where nobody acted before the horizon.
    pub unsettled: usize,
    /// Trials whose follower had not entered by the horizon.
    pub follower_truncated: usize,
}

impl SimReport {
    pub fn outcome_frequencies(&self) -> OutcomeDistribution<f64> {
        let [a1, a2, a_s] = self.round_outcome.map(|p| p.value());
        OutcomeDistribution { a1, a2, a_s }
    }

    pub fn settled_frequencies(&self) -> SettledOutcome<f64> {
        let [leader1, leader2, shared] = self.settled.map(|p| p.value());
        SettledOutcome {
            leader1,
            leader2,
            shared,
        }
    }
}

struct Trial<T> {
    game: Option<super::RoundGame>,
    settled_at: Option<T>,
    payoffs: [T; 2],
    tau_l: Option<T>,
    tau_f: Option<Option<T>>,
    follower_truncated: bool,
}

struct Engine<'a, T> {
    game: &'a Game<T>,
    law: &'a RegulatorLaw<T>,
    rules: &'a [StrategyRule<T>; 2],
    stepper: GbmStepper<T>,
    dt: T,
    steps: usize,
    r: T,
    d1: T,
}

impl<T: SimScalar> Engine<'_, T> {
    fn discount(&self, n: usize) -> T {
        (-self.r * T::count(n) * self.dt).exp()
    }

    fn run<R: rand::Rng + ?Sized>(&self, y0: T, rng: &mut R) -> Result<Trial<T>> {
        let y_l = self.game.thresholds().y_l;
        let y_f = self.game.thresholds().y_f;
        let mut y = y0;
        let mut tau_l = None;
        let mut tau_f = None;
        for n in 0..=self.steps {
            let t = T::count(n) * self.dt;
            if tau_l.is_none() && y >= y_l {
                tau_l = Some(t);
            }
            if tau_f.is_none() && y >= y_f {
                tau_f = Some(t);
            }
            let p1 = self.rules[0].action_probability(y);
            let p2 = self.rules[1].action_probability(y);
            if p1.max(p2) > T::zero() {
                let round = play_round_game_fast(p1, p2, self.law, rng)?;
                return Ok(self.settle(round, n, y, tau_l, rng));
            }
            if n < self.steps {
                y = self.stepper.step(y, rng);
            }
        }
        // nobody moved: value the remaining game at its equilibrium
        let tail = self.game.strategy_at(y)?.payoffs;
        let d = self.discount(self.steps);
        Ok(Trial {
            game: None,
            settled_at: None,
            payoffs: [d * tail.0, d * tail.1],
            tau_l,
            tau_f: Some(tau_f),
            follower_truncated: false,
        })
    }

    fn settle<R: rand::Rng + ?Sized>(
        &self,
        round: super::RoundGame,
        n0: usize,
        y0: T,
        tau_l: Option<T>,
        rng: &mut R,
    ) -> Trial<T> {
        let model = self.game.model();
        let k = model.params().k;
        let y_f = model.y_f();
        let t0 = T::count(n0) * self.dt;
        let d0 = self.discount(n0);
        let mut trial = Trial {
            game: Some(round),
            settled_at: Some(t0),
            payoffs: [T::zero(); 2],
            tau_l,
            tau_f: None,
            follower_truncated: false,
        };
        let leader = match round.settled {
            SettledRole::Shared => {
                let v = d0 * model.sharing_value(y0);
                trial.payoffs = [v, v];
                if y0 >= y_f {
                    trial.tau_f = Some(Some(t0));
                }
                return trial;
            }
            SettledRole::Leader(agent) => agent,
        };
        let half = T::lit(0.5);
        let mut leader_value = -d0 * k;
        let follower_value;
        let mut n = n0;
        let mut y = y0;
        let mut flow = d0 * self.d1 * y;
        loop {
            if y >= y_f {
                let d = self.discount(n);
                leader_value = leader_value + d * model.perpetuity(model.params().d2, y);
                follower_value = d * model.sharing_value(y);
                trial.tau_f = Some(Some(T::count(n) * self.dt));
                break;
            }
            if n == self.steps {
                let d = self.discount(n);
                leader_value = leader_value + d * model.leader_project_value(y);
                follower_value = d * model.follower_value(y);
                trial.tau_f = Some(None);
                trial.follower_truncated = true;
                break;
            }
            y = self.stepper.step(y, rng);
            n += 1;
            let next = self.discount(n) * self.d1 * y;
            leader_value = leader_value + half * self.dt * (flow + next);
            flow = next;
        }
        trial.payoffs = match leader {
            Agent::One => [leader_value, follower_value],
            Agent::Two => [follower_value, leader_value],
        };
        trial
    }
}

/// Simulates the full game from `y0` with the given stopping rules.
///
/// `law` is the regulator that rules on simultaneous requests; it may carry
/// refusals but must reduce to the game's law. Until a follower enters the
/// leader earns `D1 y` per unit time; at entry both switch to the shared flow.
/// Trials cut off by the horizon are valued with the closed forms at the
/// horizon and counted in the report.
pub fn simulate_game<T: SimScalar>(
    game: &Game<T>,
    law: &RegulatorLaw<T>,
    y0: T,
    rules: &[StrategyRule<T>; 2],
    config: &SimConfig<T>,
) -> Result<SimReport> {
    config.validate()?;
    if !(y0 > T::zero() && y0.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "y0",
            reason: format!("must be > 0, got {y0}"),
        });
    }
    law.validate()?;
    let reduced = law.reduce()?;
    let target = game.law();
    let tol = T::lit(1e-9).max(T::lit(64.0) * T::epsilon());
    if (reduced.q1 - target.q1).abs() > tol
        || (reduced.q2 - target.q2).abs() > tol
        || (reduced.qs - target.qs).abs() > tol
    {
        return Err(Error::InvalidLaw(
            "simulation law does not reduce to the game's law".into(),
        ));
    }
    let p = game.model().params();
    let engine = Engine {
        game,
        law,
        rules,
        stepper: GbmStepper::new(game.model(), config.measure, config.dt),
        dt: config.dt,
        steps: config.steps(),
        r: p.r,
        d1: p.d1,
    };

    let n = config.n_paths;
    let mut counts_round = [0usize; 3];
    let mut counts_settled = [0usize; 3];
    let mut games_played = 0;
    let mut payoffs = [MeanStat::default(); 2];
    let mut settlement_time = MeanStat::default();
    let mut rounds = MeanStat::default();
    let mut passage_leader = PassageStats::new(game.thresholds().y_l);
    let mut passage_follower = PassageStats::new(game.thresholds().y_f);
    let mut unsettled = 0;
    let mut follower_truncated = 0;

    for i in 0..n {
        let mut rng = trial_rng(config.seed, i as u64);
        let trial = engine.run(y0, &mut rng)?;
        for (stat, v) in payoffs.iter_mut().zip(trial.payoffs) {
            let v = v.to_f64_lossy();
            if !v.is_finite() {
                return Err(Error::Numerical(format!("non-finite payoff in trial {i}")));
            }
            stat.push(v);
        }
        match trial.game {
            Some(g) => {
                games_played += 1;
                counts_round[match g.outcome {
                    RoundOutcome::Alone(Agent::One) => 0,
                    RoundOutcome::Alone(Agent::Two) => 1,
                    RoundOutcome::Simultaneous => 2,
                }] += 1;
                counts_settled[match g.settled {
                    SettledRole::Leader(Agent::One) => 0,
                    SettledRole::Leader(Agent::Two) => 1,
                    SettledRole::Shared => 2,
                }] += 1;
                rounds.push(g.rounds as f64);
            }
            None => unsettled += 1,
        }
        if let Some(t) = trial.settled_at {
            settlement_time.push(t.to_f64_lossy());
        }
        passage_leader.observed += 1;
        if let Some(t) = trial.tau_l {
            passage_leader.time.push(t.to_f64_lossy());
        }
        if let Some(hit) = trial.tau_f {
            passage_follower.observed += 1;
            if let Some(t) = hit {
                passage_follower.time.push(t.to_f64_lossy());
            }
        }
        if trial.follower_truncated {
            follower_truncated += 1;
        }
    }

    Ok(SimReport {
        n_paths: n,
        y0: y0.to_f64_lossy(),
        seed: config.seed,
        games_played,
        round_outcome: counts_round.map(|c| Proportion::new(c, games_played)),
        settled: counts_settled.map(|c| Proportion::new(c, games_played)),
        payoffs,
        settlement_time,
        rounds,
        passage_leader,
        passage_follower,
        unsettled,
        follower_truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Model;

    fn config(n: usize) -> SimConfig<f64> {
        SimConfig::new(n, 1.0 / 250.0, 10.0, 99).unwrap()
    }

    fn equilibrium_rules(game: &Game<f64>) -> [StrategyRule<f64>; 2] {
        [
            StrategyRule::equilibrium(game, Agent::One),
            StrategyRule::equilibrium(game, Agent::Two),
        ]
    }

    #[test]
    fn immediate_exercise_pays_sharing_value() {
        let game = Game::<f64>::baseline();
        let y0 = 2.5;
        let report = simulate_game(
            &game,
            game.law(),
            y0,
            &equilibrium_rules(&game),
            &config(2000),
        )
        .unwrap();
        let s = game.model().sharing_value(y0);
        for stat in report.payoffs {
            assert!((stat.mean - s).abs() < 1e-9 * s.abs());
        }
        assert_eq!(report.round_outcome[2].hits, 2000);
        assert_eq!(report.settlement_time.mean, 0.0);
    }

    #[test]
    fn leader_mean_matches_leader_value() {
        let game = Game::<f64>::baseline();
        let y0 = 1.0;
        let rules = [
            StrategyRule::constant(0.0, 1.0),
            StrategyRule::constant(f64::INFINITY, 0.0),
        ];
        let report = simulate_game(&game, game.law(), y0, &rules, &config(20_000)).unwrap();
        let t = game.payoff_triple(y0);
        assert!(
            report.payoffs[0].agrees_with(t.l, 4.0).unwrap(),
            "{:?} vs {}",
            report.payoffs[0],
            t.l
        );
        assert!(
            report.payoffs[1].agrees_with(t.f, 4.0).unwrap(),
            "{:?} vs {}",
            report.payoffs[1],
            t.f
        );
        assert_eq!(report.settled[0].hits, 20_000);
    }

    #[test]
    fn waiting_below_preemption_is_worth_the_follower_value() {
        // starts below Y_L; the rule's own continuation handles the horizon
        let game = Game::<f64>::baseline();
        let y0 = 0.3;
        let report = simulate_game(
            &game,
            game.law(),
            y0,
            &equilibrium_rules(&game),
            &config(20_000),
        )
        .unwrap();
        let f = game.model().follower_value(y0);
        for stat in report.payoffs {
            assert!(stat.agrees_with(f, 4.0).unwrap(), "{stat:?} vs {f}");
        }
        assert!(report.passage_leader.hits() > 0);
    }

    #[test]
    fn same_seed_same_report() {
        let game = Game::<f64>::baseline();
        let rules = equilibrium_rules(&game);
        let a = simulate_game(&game, game.law(), 0.6, &rules, &config(500)).unwrap();
        let b = simulate_game(&game, game.law(), 0.6, &rules, &config(500)).unwrap();
        assert_eq!(a, b);
        let mut other = config(500);
        other.seed += 1;
        let c = simulate_game(&game, game.law(), 0.6, &rules, &other).unwrap();
        assert_ne!(a.payoffs, c.payoffs);
    }

    #[test]
    fn rejects_foreign_law_and_bad_start() {
        let game = Game::<f64>::baseline();
        let rules = equilibrium_rules(&game);
        let cfg = config(10);
        assert!(matches!(
            simulate_game(&game, &RegulatorLaw::cournot(), 0.6, &rules, &cfg),
            Err(Error::InvalidLaw(_))
        ));
        assert!(simulate_game(&game, game.law(), -1.0, &rules, &cfg).is_err());
        let with_refusals = RegulatorLaw::new(0.5, 0.25, 0.1, 0.15).unwrap();
        assert!(simulate_game(&game, &with_refusals, 0.6, &rules, &cfg).is_ok());
    }

    #[test]
    fn runs_in_single_precision() {
        let game = Game::<f32>::new(Model::baseline(), RegulatorLaw::baseline()).unwrap();
        let rules = [
            StrategyRule::equilibrium(&game, Agent::One),
            StrategyRule::equilibrium(&game, Agent::Two),
        ];
        let cfg = SimConfig::new(200, 1.0f32 / 250.0, 5.0, 1).unwrap();
        let report = simulate_game(&game, game.law(), 0.6, &rules, &cfg).unwrap();
        assert_eq!(report.games_played, 200);
    }
}
