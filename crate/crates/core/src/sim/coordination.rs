use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SimScalar;
use crate::error::{Error, Result};
use crate::regulator::{Agent, Alternative, RegulatorLaw};

/// Rounds after which `play_round_game` gives up.
pub const ROUND_CAP: u64 = 1_000_000;

/// Number of literal rounds played before empty rounds are skipped in bulk.
const LITERAL_ROUNDS: u64 = 1024;

/// Who acted in the deciding round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoundOutcome {
    Alone(Agent),
    Simultaneous,
}

/// Roles once the regulator has ruled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SettledRole {
    Leader(Agent),
    Shared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundGame {
    pub outcome: RoundOutcome,
    pub settled: SettledRole,
    /// Rounds played, the deciding one included.
    pub rounds: u64,
    /// Regulator refusals before a decision stuck.
    pub denials: u64,
}

fn check_probability<T: SimScalar>(p: T, agent: Agent) -> Result<()> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::InvalidParameter {
            name: if agent == Agent::One { "p1" } else { "p2" },
            reason: format!("must lie in [0, 1], got {p}"),
        });
    }
    Ok(())
}

/// Plays Bernoulli rounds until at least one agent acts, then lets the
/// regulator rule on a simultaneous request.
///
/// A lone actor becomes the leader. On a simultaneous request the regulator
/// draws from its full law and draws again after every refusal.
pub fn play_round_game<T: SimScalar, R: Rng + ?Sized>(
    p1: T,
    p2: T,
    law: &RegulatorLaw<T>,
    rng: &mut R,
) -> Result<RoundGame> {
    play(p1, p2, law, rng, false)
}

/// Same distribution as [`play_round_game`], but long runs of empty rounds
/// are skipped with a geometric draw, so tiny probabilities cannot stall.
pub(crate) fn play_round_game_fast<T: SimScalar, R: Rng + ?Sized>(
    p1: T,
    p2: T,
    law: &RegulatorLaw<T>,
    rng: &mut R,
) -> Result<RoundGame> {
    play(p1, p2, law, rng, true)
}

fn play<T: SimScalar, R: Rng + ?Sized>(
    p1: T,
    p2: T,
    law: &RegulatorLaw<T>,
    rng: &mut R,
    skip: bool,
) -> Result<RoundGame> {
    check_probability(p1, Agent::One)?;
    check_probability(p2, Agent::Two)?;
    if !(p1.max(p2) > T::zero()) {
        return Err(Error::NoAction);
    }
    let mut rounds = 0u64;
    let (acts1, acts2) = loop {
        rounds += 1;
        let a1 = T::uniform(rng) < p1;
        let a2 = T::uniform(rng) < p2;
        if a1 || a2 {
            break (a1, a2);
        }
        if skip && rounds >= LITERAL_ROUNDS {
            let (extra, a1, a2) = skip_to_action(p1, p2, rng);
            rounds = rounds.saturating_add(extra);
            break (a1, a2);
        }
        if rounds >= ROUND_CAP {
            return Err(Error::RoundCap(ROUND_CAP));
        }
    };
    let outcome = match (acts1, acts2) {
        (true, false) => RoundOutcome::Alone(Agent::One),
        (false, true) => RoundOutcome::Alone(Agent::Two),
        _ => RoundOutcome::Simultaneous,
    };
    let (settled, denials) = match outcome {
        RoundOutcome::Alone(agent) => (SettledRole::Leader(agent), 0),
        RoundOutcome::Simultaneous => rule(law, rng)?,
    };
    Ok(RoundGame {
        outcome,
        settled,
        rounds,
        denials,
    })
}

/// Draws the number of further rounds up to and including the next one in
/// which somebody acts, and who acts in it.
fn skip_to_action<T: SimScalar, R: Rng + ?Sized>(p1: T, p2: T, rng: &mut R) -> (u64, bool, bool) {
    let ln_idle = (-p1).ln_1p() + (-p2).ln_1p();
    let u = T::one() - T::uniform(rng);
    let idle = (u.ln() / ln_idle).floor();
    let idle = idle.to_u64().unwrap_or(u64::MAX);
    // conditional on someone acting: agent 1 acts with probability p1 / stop
    let stop = p1 + p2 - p1 * p2;
    let a1 = T::uniform(rng) * stop < p1;
    let a2 = if a1 { T::uniform(rng) < p2 } else { true };
    (idle.saturating_add(1), a1, a2)
}

fn rule<T: SimScalar, R: Rng + ?Sized>(
    law: &RegulatorLaw<T>,
    rng: &mut R,
) -> Result<(SettledRole, u64)> {
    let mut denials = 0u64;
    loop {
        match law.alternative_for(T::uniform(rng)) {
            Alternative::Deny => {
                denials += 1;
                if denials >= ROUND_CAP {
                    return Err(Error::RoundCap(ROUND_CAP));
                }
            }
            Alternative::Elect(agent) => return Ok((SettledRole::Leader(agent), denials)),
            Alternative::Share => return Ok((SettledRole::Shared, denials)),
        }
    }
}
