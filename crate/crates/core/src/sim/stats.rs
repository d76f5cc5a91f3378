use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Running mean with standard error (Welford).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanStat {
    pub n: usize,
    pub mean: f64,
    m2: f64,
}

impl MeanStat {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn variance(&self) -> Option<f64> {
        (self.n > 1).then(|| self.m2 / (self.n - 1) as f64)
    }

    /// `None` with fewer than two samples.
    pub fn std_err(&self) -> Option<f64> {
        self.variance().map(|v| (v / self.n as f64).sqrt())
    }

    /// True if `target` lies within `k` standard errors of the mean. A zero
    /// standard error requires agreement to `1e-9` relative.
    pub fn agrees_with(&self, target: f64, k: f64) -> Option<bool> {
        let se = self.std_err()?;
        let gap = (self.mean - target).abs();
        Some(gap <= k * se || gap <= 1e-9 * target.abs().max(1.0))
    }
}

/// Empirical frequency of an event.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Proportion {
    pub hits: usize,
    pub n: usize,
}

impl Proportion {
    pub fn new(hits: usize, n: usize) -> Self {
        Self { hits, n }
    }

    pub fn value(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.hits as f64 / self.n as f64
        }
    }

    /// Binomial standard error evaluated at `p`.
    pub fn std_err_at(&self, p: f64) -> Option<f64> {
        (self.n > 1).then(|| (p * (1.0 - p) / self.n as f64).sqrt())
    }

    /// Within `k` binomial standard errors of `p` (the error is taken at `p`
    /// so that exact agreement with a degenerate `p` passes).
    pub fn agrees_with(&self, p: f64, k: f64) -> Option<bool> {
        let se = self.std_err_at(p)?;
        let gap = (self.value() - p).abs();
        Some(gap <= k * se + 1e-12)
    }
}

/// First-passage summary of one level.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PassageStats {
    pub level: f64,
    /// Paths on which the passage was monitored.
    pub observed: usize,
    pub time: MeanStat,
}

impl PassageStats {
    pub fn new<T: Scalar>(level: T) -> Self {
        Self {
            level: level.to_f64_lossy(),
            ..Default::default()
        }
    }

    pub fn hits(&self) -> usize {
        self.time.n
    }

    pub fn hit_fraction(&self) -> f64 {
        Proportion::new(self.hits(), self.observed).value()
    }
}
