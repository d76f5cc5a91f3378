use crate::equilibrium::{expected_payoff, Game, StrategyProfile};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Mutual best responses of the coordination game at `y` on a grid.
///
/// The grid holds `grid_n` evenly spaced probabilities in `[0, 1]` plus the
/// points of `extra` that fall in that range. A profile is kept when each
/// component attains its agent's best payoff against the other component to
/// within `1e-9` of the payoff scale. The profile `(0, 0)` ends nothing and is
/// excluded.
pub fn best_response_grid<T: Scalar>(
    game: &Game<T>,
    y: T,
    grid_n: usize,
    extra: &[T],
) -> Result<Vec<StrategyProfile<T>>> {
    if grid_n < 2 {
        return Err(Error::InvalidParameter {
            name: "grid_n",
            reason: format!("must be >= 2, got {grid_n}"),
        });
    }
    let step = T::one() / T::count(grid_n - 1);
    let mut grid: Vec<T> = (0..grid_n).map(|i| T::count(i) * step).collect();
    grid.extend(
        extra
            .iter()
            .copied()
            .filter(|p| *p >= T::zero() && *p <= T::one()),
    );
    grid.sort_by(|a, b| a.partial_cmp(b).expect("grid values are finite"));
    grid.dedup();

    let t = game.payoff_triple(y);
    let law = game.law();
    let tol = T::lit(1e-9)
        * t.max()
            .abs()
            .max(t.min().abs())
            .max(game.model().params().k);
    let m = grid.len();
    let mut e1 = vec![T::neg_infinity(); m * m];
    let mut e2 = vec![T::neg_infinity(); m * m];
    for (i, &p1) in grid.iter().enumerate() {
        for (j, &p2) in grid.iter().enumerate() {
            if p1 == T::zero() && p2 == T::zero() {
                continue;
            }
            let (a, b) = expected_payoff(&StrategyProfile { p1, p2 }, &t, law)?;
            e1[i * m + j] = a;
            e2[i * m + j] = b;
        }
    }
    let best1: Vec<T> = (0..m)
        .map(|j| {
            (0..m)
                .map(|i| e1[i * m + j])
                .fold(T::neg_infinity(), T::max)
        })
        .collect();
    let best2: Vec<T> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| e2[i * m + j])
                .fold(T::neg_infinity(), T::max)
        })
        .collect();

    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let a = e1[i * m + j];
            let b = e2[i * m + j];
            if a.is_finite() && b.is_finite() && a >= best1[j] - tol && b >= best2[i] - tol {
                out.push(StrategyProfile {
                    p1: grid[i],
                    p2: grid[j],
                });
            }
        }
    }
    Ok(out)
}
