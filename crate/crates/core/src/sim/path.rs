use rand::Rng;
use serde::Serialize;

use super::{Measure, SimConfig, SimScalar};
use crate::error::{Error, Result};
use crate::model::Model;

/// Exact log-space step of the profit process over a fixed `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbmStepper<T> {
    log_drift: T,
    log_vol: T,
}

impl<T: SimScalar> GbmStepper<T> {
    pub fn new(model: &Model<T>, measure: Measure, dt: T) -> Self {
        let p = model.params();
        let drift = match measure {
            Measure::Physical => p.nu,
            Measure::RiskNeutral => p.nu - p.eta * model.derived().lambda,
        };
        let half = T::lit(0.5);
        Self {
            log_drift: (drift - half * p.eta * p.eta) * dt,
            log_vol: p.eta * dt.sqrt(),
        }
    }

    pub fn step<R: Rng + ?Sized>(&self, y: T, rng: &mut R) -> T {
        y * (self.log_drift + self.log_vol * T::standard_normal(rng)).exp()
    }
}

/// Profit levels sampled on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Path<T> {
    pub dt: T,
    pub values: Vec<T>,
}

impl<T: SimScalar> Path<T> {
    pub fn time(&self, index: usize) -> T {
        T::count(index) * self.dt
    }

    /// First grid time at which the path is at or above `level`.
    pub fn first_passage(&self, level: T) -> Option<T> {
        self.values
            .iter()
            .position(|&y| y >= level)
            .map(|i| self.time(i))
    }
}

/// Samples one path from `y0` over the configured horizon.
pub fn sample_path<T: SimScalar, R: Rng + ?Sized>(
    model: &Model<T>,
    y0: T,
    config: &SimConfig<T>,
    rng: &mut R,
) -> Result<Path<T>> {
    config.validate()?;
    if !(y0 > T::zero() && y0.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "y0",
            reason: format!("must be > 0, got {y0}"),
        });
    }
    let stepper = GbmStepper::new(model, config.measure, config.dt);
    let n = config.steps();
    let mut values = Vec::with_capacity(n + 1);
    let mut y = y0;
    values.push(y);
    for _ in 0..n {
        y = stepper.step(y, rng);
        values.push(y);
    }
    Ok(Path {
        dt: config.dt,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::trial_rng;

    fn normal_cdf(x: f64) -> f64 {
        // Abramowitz-Stegun 7.1.26 on erf, accurate to about 1e-7
        let z = x.abs() / std::f64::consts::SQRT_2;
        let t = 1.0 / (1.0 + 0.3275911 * z);
        let poly = t
            * (0.254829592
                + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
        let erf = 1.0 - poly * (-z * z).exp();
        if x >= 0.0 {
            0.5 * (1.0 + erf)
        } else {
            0.5 * (1.0 - erf)
        }
    }

    /// Probability that a Brownian motion with drift `m` and volatility `s`
    /// started at 0 reaches `b > 0` by time `t`.
    fn passage_probability(b: f64, m: f64, s: f64, t: f64) -> f64 {
        let st = s * t.sqrt();
        normal_cdf((m * t - b) / st) + (2.0 * m * b / (s * s)).exp() * normal_cdf((-b - m * t) / st)
    }

    #[test]
    fn log_increments_have_the_right_moments() {
        let model = Model::<f64>::baseline();
        let config = SimConfig::new(1, 0.01, 200.0, 7).unwrap();
        let path = sample_path(&model, 1.0, &config, &mut trial_rng(7, 0)).unwrap();
        let incs: Vec<f64> = path.values.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
        let n = incs.len() as f64;
        let mean = incs.iter().sum::<f64>() / n;
        let var = incs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let p = model.params();
        let drift = p.nu - p.eta * model.derived().lambda - 0.5 * p.eta * p.eta;
        assert!((mean - drift * 0.01).abs() < 4.0 * (p.eta * p.eta * 0.01 / n).sqrt());
        assert!((var / (p.eta * p.eta * 0.01) - 1.0).abs() < 0.05);
    }

    #[test]
    fn risk_neutral_discounted_level_is_a_martingale_under_delta() {
        // E[e^{-r t} Y_t] = Y_0 e^{-delta t}
        let model = Model::<f64>::baseline();
        let d = model.derived().delta;
        let r = model.params().r;
        let config = SimConfig::new(1, 0.5, 5.0, 3).unwrap();
        let n = 20_000;
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        for i in 0..n {
            let path = sample_path(&model, 1.0, &config, &mut trial_rng(3, i)).unwrap();
            let x = (-r * 5.0).exp() * path.values.last().unwrap();
            acc += x;
            acc2 += x * x;
        }
        let mean = acc / n as f64;
        let se = ((acc2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - (-d * 5.0).exp()).abs() < 4.0 * se);
    }

    #[test]
    fn first_passage_frequency_matches_closed_form() {
        let model = Model::<f64>::baseline();
        let p = model.params();
        let m = p.nu - p.eta * model.derived().lambda - 0.5 * p.eta * p.eta;
        let (y0, level, horizon) = (1.0, 1.3, 2.0);
        let config = SimConfig::new(1, 1.0 / 2000.0, horizon, 11).unwrap();
        let n = 4000;
        let hits = (0..n)
            .filter(|&i| {
                sample_path(&model, y0, &config, &mut trial_rng(11, i))
                    .unwrap()
                    .first_passage(level)
                    .is_some()
            })
            .count();
        let freq = hits as f64 / n as f64;
        let exact = passage_probability((level / y0).ln(), m, p.eta, horizon);
        let se = (exact * (1.0 - exact) / n as f64).sqrt();
        // discrete monitoring misses some crossings, so allow a small downward bias
        assert!(freq <= exact + 3.0 * se, "freq {freq} exact {exact}");
        assert!(freq >= exact - 3.0 * se - 0.02, "freq {freq} exact {exact}");
    }

    #[test]
    fn first_passage_at_start() {
        let path = Path {
            dt: 0.5,
            values: vec![2.0, 1.0, 3.0],
        };
        assert_eq!(path.first_passage(1.5), Some(0.0));
        assert_eq!(path.first_passage(2.5), Some(1.0));
        assert_eq!(path.first_passage(4.0), None);
    }

    #[test]
    fn rejects_bad_start() {
        let model = Model::<f64>::baseline();
        let config = SimConfig::new(1, 0.1, 1.0, 0).unwrap();
        assert!(sample_path(&model, 0.0, &config, &mut trial_rng(0, 0)).is_err());
    }
}
