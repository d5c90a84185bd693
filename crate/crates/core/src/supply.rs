//! Battery-supply model, distribution flattening and Monte Carlo draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF};

use crate::error::{Error, Result};

/// Extension point for non-Gaussian supplies. Flattening only needs the CDF,
/// its inverse and the first moment of the density over an interval.
pub trait SupplyDistribution {
    fn cdf(&self, x: f64) -> f64;
    fn inverse_cdf(&self, p: f64) -> f64;
    /// `∫ₐᵇ x·p(x) dx`; either endpoint may be infinite.
    fn first_moment(&self, a: f64, b: f64) -> f64;
}

/// Gaussian supply of normalized battery power capability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatterySupply {
    pub mean_power: f64,
    pub std_power: f64,
    pub count: usize,
}

impl BatterySupply {
    pub fn new(mean_power: f64, std_power: f64, count: usize) -> Result<Self> {
        let supply = Self {
            mean_power,
            std_power,
            count,
        };
        supply.validate()?;
        Ok(supply)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_power.is_finite() && self.mean_power > 0.0) {
            return Err(Error::param(format!("mean power must be > 0, got {}", self.mean_power)));
        }
        if !(self.std_power.is_finite() && self.std_power >= 0.0) {
            return Err(Error::param(format!("std power must be ≥ 0, got {}", self.std_power)));
        }
        if self.std_power >= self.mean_power {
            return Err(Error::param(format!(
                "std power {} must be below the mean {}",
                self.std_power, self.mean_power
            )));
        }
        if self.count == 0 {
            return Err(Error::param("battery count must be ≥ 1"));
        }
        Ok(())
    }

    fn standard(&self) -> statrs::distribution::Normal {
        statrs::distribution::Normal::standard()
    }
}

impl SupplyDistribution for BatterySupply {
    fn cdf(&self, x: f64) -> f64 {
        if self.std_power == 0.0 {
            return if x < self.mean_power { 0.0 } else { 1.0 };
        }
        self.standard().cdf((x - self.mean_power) / self.std_power)
    }

    fn inverse_cdf(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if p >= 1.0 {
            return f64::INFINITY;
        }
        let std = self.standard();
        let mut z = std.inverse_cdf(p);
        // statrs' quantile is good to ~1e-11; polish with Newton on Φ
        for _ in 0..2 {
            let density = std.pdf(z);
            if density > 0.0 {
                z -= (std.cdf(z) - p) / density;
            }
        }
        self.mean_power + self.std_power * z
    }

    fn first_moment(&self, a: f64, b: f64) -> f64 {
        if self.std_power == 0.0 {
            let inside = a <= self.mean_power && self.mean_power <= b;
            return if inside { self.mean_power } else { 0.0 };
        }
        // ∫ x φ((x−μ)/σ)/σ dx = μ·[Φ(β) − Φ(α)] + σ·[φ(α) − φ(β)]
        let std = self.standard();
        let z = |x: f64| (x - self.mean_power) / self.std_power;
        let (alpha, beta) = (z(a), z(b));
        let pdf = |t: f64| if t.is_finite() { std.pdf(t) } else { 0.0 };
        let mass = std.cdf(beta) - std.cdf(alpha);
        self.mean_power * mass + self.std_power * (pdf(alpha) - pdf(beta))
    }
}

/// Ordered per-slot expected capabilities of an `N`-battery string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedSet {
    capabilities: Vec<f64>,
}

impl ExpectedSet {
    /// Wraps an explicit ascending set, e.g. one read back from a design file.
    pub fn from_capabilities(capabilities: Vec<f64>) -> Result<Self> {
        if capabilities.is_empty() {
            return Err(Error::param("expected set is empty"));
        }
        if capabilities.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::param("expected set entries must be finite and > 0"));
        }
        if capabilities.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::param("expected set must be ascending"));
        }
        Ok(Self { capabilities })
    }

    pub fn capabilities(&self) -> &[f64] {
        &self.capabilities
    }

    pub fn len(&self) -> usize {
        self.capabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.capabilities.is_empty()
    }

    /// Aggregate intrinsic battery power `Σ P̄ᵢ`.
    pub fn intrinsic_power(&self) -> f64 {
        self.capabilities.iter().sum()
    }
}

/// Interval boundaries `P₁ … P_{N+1}` splitting the distribution into `N`
/// equal-probability slices. The outer entries are ±∞.
pub fn equal_probability_bounds<D: SupplyDistribution + ?Sized>(dist: &D, n: usize) -> Vec<f64> {
    (0..=n).map(|k| dist.inverse_cdf(k as f64 / n as f64)).collect()
}

/// Flattens any supply distribution into `n` interval conditional means.
pub fn flatten_distribution<D: SupplyDistribution + ?Sized>(dist: &D, n: usize) -> Vec<f64> {
    let bounds = equal_probability_bounds(dist, n);
    bounds
        .windows(2)
        .map(|w| n as f64 * dist.first_moment(w[0], w[1]))
        .collect()
}

/// Largest distance of any slice's probability from `1/n`.
pub fn slice_mass_error<D: SupplyDistribution + ?Sized>(dist: &D, n: usize) -> f64 {
    equal_probability_bounds(dist, n)
        .windows(2)
        .map(|w| (dist.cdf(w[1]) - dist.cdf(w[0]) - 1.0 / n as f64).abs())
        .fold(0.0, f64::max)
}

pub const MASS_TOL: f64 = 1e-12;

pub fn flatten(supply: &BatterySupply) -> Result<ExpectedSet> {
    supply.validate()?;
    let n = supply.count;
    let capabilities = if supply.std_power == 0.0 {
        vec![supply.mean_power; n]
    } else {
        let err = slice_mass_error(supply, n);
        if err > MASS_TOL {
            return Err(Error::internal(format!("flattening slices off by {err:e} in probability")));
        }
        flatten_distribution(supply, n)
    };
    if capabilities.iter().any(|&p| p <= 0.0) {
        return Err(Error::param(format!(
            "flattened set has a non-positive slot (σ = {} is too large for N = {n})",
            supply.std_power
        )));
    }
    ExpectedSet::from_capabilities(capabilities)
}

/// One realization of a sorted battery string drawn from the supply.
#[derive(Debug, Clone, PartialEq)]
pub struct BatterySample {
    pub capabilities: Vec<f64>,
    /// `capabilities[j] − P̄ⱼ` against the flattened expected set.
    pub deviations: Vec<f64>,
    pub seed: u64,
}

/// Draws `N` Gaussian capabilities, resampling any non-positive draw, and
/// sorts them ascending.
pub fn sample_battery_set(supply: &BatterySupply, seed: u64) -> Result<BatterySample> {
    let expected = flatten(supply)?;
    sample_against(supply, &expected, seed)
}

/// Same as [`sample_battery_set`] with a precomputed expected set.
pub fn sample_against(supply: &BatterySupply, expected: &ExpectedSet, seed: u64) -> Result<BatterySample> {
    if expected.len() != supply.count {
        return Err(Error::param(format!(
            "expected set has {} slots, supply has {} batteries",
            expected.len(),
            supply.count
        )));
    }
    let mut capabilities = raw_draws(supply, seed)?;
    capabilities.sort_by(f64::total_cmp);
    let deviations = capabilities
        .iter()
        .zip(expected.capabilities())
        .map(|(p, e)| p - e)
        .collect();
    Ok(BatterySample {
        capabilities,
        deviations,
        seed,
    })
}

/// Unsorted positive draws in generation order.
pub fn raw_draws(supply: &BatterySupply, seed: u64) -> Result<Vec<f64>> {
    supply.validate()?;
    if supply.std_power == 0.0 {
        return Ok(vec![supply.mean_power; supply.count]);
    }
    let normal = Normal::new(supply.mean_power, supply.std_power)
        .map_err(|e| Error::param(format!("normal distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..supply.count)
        .map(|_| loop {
            let draw = normal.sample(&mut rng);
            if draw > 0.0 {
                break draw;
            }
        })
        .collect())
}
