//! Two-stage LS-HiPPP design.
//!
//! Layer 1 is sized on the flattened expected set by trying every placement
//! of `M` battery-pair converters and keeping the one with the highest output.
//! Layer 2 is the adjacent ladder of identical lite converters; its rating is
//! chosen from a Monte Carlo utilization curve over trial ratings.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::architecture::{Architecture, ConverterEdge, Layer1Design, Layer2Design, Topology};
use crate::error::{Error, Result};
use crate::powerflow::{layer1_design_lp, optimal_flow};
use crate::supply::{flatten, sample_against, BatterySupply, ExpectedSet};

pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// Tolerance used when comparing candidate outputs and processed powers.
const TIE_TOL: f64 = 1e-9;
/// Slack on the monotonicity of the Layer-2 curve.
const CURVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignConfig {
    pub num_layer1: usize,
    pub num_rating_sets: usize,
    pub layer2_trial_ratings: Vec<f64>,
    pub monte_carlo_trials: usize,
    pub base_seed: u64,
    #[serde(default = "default_cap")]
    pub enumeration_cap: u128,
}

fn default_cap() -> u128 {
    DEFAULT_ENUMERATION_CAP
}

impl Default for DesignConfig {
    fn default() -> Self {
        Self {
            num_layer1: 3,
            num_rating_sets: 2,
            layer2_trial_ratings: (0..=10).map(|k| 0.02 * k as f64).collect(),
            monte_carlo_trials: 1000,
            base_seed: 0,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl DesignConfig {
    pub fn validate(&self, batteries: usize) -> Result<()> {
        if batteries < 2 {
            return Err(Error::param("LS-HiPPP needs at least two batteries"));
        }
        if self.num_layer1 == 0 || self.num_layer1 > batteries - 1 {
            return Err(Error::param(format!(
                "number of Layer-1 converters must be in 1..={}, got {}",
                batteries - 1,
                self.num_layer1
            )));
        }
        if self.num_rating_sets == 0 || self.num_rating_sets > self.num_layer1 {
            return Err(Error::param(format!(
                "number of rating sets must be in 1..={}, got {}",
                self.num_layer1, self.num_rating_sets
            )));
        }
        if self.monte_carlo_trials == 0 {
            return Err(Error::param("Monte Carlo trials must be ≥ 1"));
        }
        let ascending = self.layer2_trial_ratings.windows(2).all(|w| w[0] < w[1]);
        let nonneg = self.layer2_trial_ratings.iter().all(|r| r.is_finite() && *r >= 0.0);
        if !(ascending && nonneg) {
            return Err(Error::param("Layer-2 trial ratings must be ascending and ≥ 0"));
        }
        Ok(())
    }
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of `m`-subsets of the `C(n, 2)` battery pairs.
pub fn interconnection_count(n: usize, m: usize) -> u128 {
    let pairs = binomial(n as u128, 2);
    binomial(pairs, m as u128)
}

/// Yields every `m`-subset of battery pairs `(a, b)` with `a < b`, in
/// lexicographic order. Refuses when the count exceeds `cap`.
pub fn enumerate_interconnections(n: usize, m: usize, cap: u128) -> Result<Interconnections> {
    if n < 2 {
        return Err(Error::param("need at least two batteries to place converters"));
    }
    if m == 0 || m > n - 1 {
        return Err(Error::param(format!("converter count must be in 1..={}, got {m}", n - 1)));
    }
    let count = interconnection_count(n, m);
    if count > cap {
        return Err(Error::EnumerationCap { count, cap });
    }
    let pairs = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect::<Vec<_>>();
    Ok(Interconnections {
        pairs,
        cursor: Some((0..m).collect()),
        remaining: count,
    })
}

pub struct Interconnections {
    pairs: Vec<(usize, usize)>,
    cursor: Option<Vec<usize>>,
    remaining: u128,
}

impl Iterator for Interconnections {
    type Item = Vec<(usize, usize)>;

    fn next(&mut self) -> Option<Self::Item> {
        let idx = self.cursor.as_mut()?;
        let item = idx.iter().map(|&i| self.pairs[i]).collect();
        self.remaining -= 1;

        let (m, p) = (idx.len(), self.pairs.len());
        match (0..m).rev().find(|&i| idx[i] < p - m + i) {
            Some(i) => {
                idx[i] += 1;
                for k in i + 1..m {
                    idx[k] = idx[k - 1] + 1;
                }
            }
            None => self.cursor = None,
        }
        Some(item)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (r, Some(r))
    }
}

/// Converter ratings using at most `k` distinct values, each converter rated
/// at least at its processed power, with the smallest total rating.
///
/// The usual two-set rule (busiest converter alone, the rest at the second
/// highest) is returned whenever it is optimal. Otherwise the sorted powers are
/// split into the cheapest `k` contiguous groups, each rated at its maximum.
pub fn partition_ratings(processed: &[f64], k: usize) -> Result<Vec<f64>> {
    let m = processed.len();
    if k == 0 || k > m {
        return Err(Error::param(format!("partition count must be in 1..={m}, got {k}")));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| processed[b].total_cmp(&processed[a]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&i| processed[i]).collect();

    let rule_cost = sorted[..k - 1].iter().sum::<f64>() + sorted[k - 1] * (m - k + 1) as f64;

    // cost[g][i]: cheapest rating of sorted[..i] in g groups
    let mut cost = vec![vec![f64::INFINITY; m + 1]; k + 1];
    let mut cut = vec![vec![0usize; m + 1]; k + 1];
    cost[0][0] = 0.0;
    for g in 1..=k {
        for i in 1..=m {
            for j in g - 1..i {
                let c = cost[g - 1][j] + sorted[j] * (i - j) as f64;
                if c < cost[g][i] {
                    cost[g][i] = c;
                    cut[g][i] = j;
                }
            }
        }
    }
    let best = (1..=k).map(|g| cost[g][m]).fold(f64::INFINITY, f64::min);

    let mut sorted_ratings = vec![0.0; m];
    if rule_cost <= best * (1.0 + 1e-12) + 1e-15 {
        for (i, r) in sorted_ratings.iter_mut().enumerate() {
            *r = sorted[i.min(k - 1)];
        }
    } else {
        let mut g = (1..=k).find(|&g| cost[g][m] == best).unwrap_or(k);
        let mut i = m;
        while g > 0 {
            let j = cut[g][i];
            for r in &mut sorted_ratings[j..i] {
                *r = sorted[j];
            }
            i = j;
            g -= 1;
        }
    }
    let mut ratings = vec![0.0; m];
    for (slot, &i) in order.iter().enumerate() {
        ratings[i] = sorted_ratings[slot];
    }
    Ok(ratings)
}

#[derive(Debug, Clone)]
struct Candidate {
    edges: Vec<(usize, usize)>,
    processed: Vec<f64>,
    output: f64,
}

impl Candidate {
    fn total_processed(&self) -> f64 {
        self.processed.iter().sum()
    }
}

/// Keeps the highest output, then the least processed power, then the
/// lexicographically smallest edge list. Independent of candidate order.
fn select_best(candidates: Vec<Candidate>) -> Option<Candidate> {
    let best_output = candidates.iter().map(|c| c.output).fold(f64::NEG_INFINITY, f64::max);
    let top: Vec<Candidate> = candidates
        .into_iter()
        .filter(|c| c.output >= best_output - TIE_TOL)
        .collect();
    let least = top.iter().map(Candidate::total_processed).fold(f64::INFINITY, f64::min);
    top.into_iter()
        .filter(|c| c.total_processed() <= least + TIE_TOL)
        .min_by(|a, b| a.edges.cmp(&b.edges))
}

/// Exhaustive Layer-1 placement on the expected set.
pub fn design_layer1(expected: &ExpectedSet, cfg: &DesignConfig) -> Result<Layer1Design> {
    let n = expected.len();
    cfg.validate(n)?;
    let edge_sets: Vec<Vec<(usize, usize)>> =
        enumerate_interconnections(n, cfg.num_layer1, cfg.enumeration_cap)?.collect();
    log::debug!("evaluating {} Layer-1 interconnections", edge_sets.len());

    let caps = expected.capabilities();
    let candidates = edge_sets
        .into_par_iter()
        .map(|edges| {
            let (processed, output) = layer1_design_lp(caps, &edges)?;
            Ok(Candidate {
                edges,
                processed,
                output,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let best = select_best(candidates).ok_or_else(|| Error::internal("no Layer-1 candidates"))?;
    let ratings = partition_ratings(&best.processed, cfg.num_rating_sets)?;
    Ok(Layer1Design {
        edges: best
            .edges
            .iter()
            .zip(&ratings)
            .map(|(&(a, b), &r)| ConverterEdge::new(a, b, r))
            .collect(),
        rating_partitions: cfg.num_rating_sets,
        processed_at_design: best.processed,
    })
}

/// Expected utilization as a function of the identical Layer-2 rating.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer2Curve {
    pub points: Vec<(f64, f64)>,
}

impl Layer2Curve {
    /// Largest trial rating not above `max_rating` (zero if none qualifies).
    pub fn select(&self, max_rating: f64) -> Layer2Design {
        let rating = self
            .points
            .iter()
            .map(|&(r, _)| r)
            .filter(|&r| r <= max_rating)
            .fold(0.0, f64::max);
        Layer2Design { rating }
    }

    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[1].1 >= w[0].1 - CURVE_TOL)
    }

    /// Expected utilization at the smallest trial rating reaching `target`.
    pub fn first_reaching(&self, target: f64) -> Option<(f64, f64)> {
        self.points.iter().copied().find(|&(_, u)| u >= target)
    }
}

/// Seed of Monte Carlo trial `trial` under a base seed.
pub fn trial_seed(base_seed: u64, trial: usize) -> u64 {
    base_seed.wrapping_add(trial as u64)
}

/// Mean utilization of an architecture over `trials` seeded samples.
pub(crate) fn mean_utilization(
    arch: &Architecture,
    supply: &BatterySupply,
    expected: &ExpectedSet,
    trials: usize,
    base_seed: u64,
) -> Result<f64> {
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| {
            let sample = sample_against(supply, expected, trial_seed(base_seed, t))?;
            let flow = optimal_flow(&sample.capabilities, arch)?;
            Ok(flow.utilization(&sample.capabilities))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(per_trial.iter().sum::<f64>() / trials as f64)
}

/// Monte Carlo utilization curve over `cfg.layer2_trial_ratings`. Every
/// rating sees the same sample sequence.
pub fn design_layer2(layer1: &Layer1Design, supply: &BatterySupply, cfg: &DesignConfig) -> Result<Layer2Curve> {
    let expected = flatten(supply)?;
    cfg.validate(expected.len())?;
    let mut points = Vec::with_capacity(cfg.layer2_trial_ratings.len());
    for &rating in &cfg.layer2_trial_ratings {
        let arch = Architecture::lshippp(layer1.clone(), Layer2Design { rating }, &expected)?;
        let u = mean_utilization(&arch, supply, &expected, cfg.monte_carlo_trials, cfg.base_seed)?;
        points.push((rating, u));
    }
    let curve = Layer2Curve { points };
    if !curve.is_monotone() {
        return Err(Error::internal(format!(
            "Layer-2 utilization curve is not monotone: {:?}",
            curve.points
        )));
    }
    Ok(curve)
}

/// LS-HiPPP sized to an aggregate rating budget.
///
/// The Layer-1 ratings from the expected-set design are kept and the rest of
/// the budget is spread evenly across the `N − 1` Layer-2 converters. When the
/// budget cannot even cover Layer 1, its ratings are scaled down to fit and
/// Layer 2 gets nothing.
pub fn lshippp_from_budget(budget: f64, layer1: &Layer1Design, expected: &ExpectedSet) -> Result<Architecture> {
    if !(budget.is_finite() && budget >= 0.0) {
        return Err(Error::param(format!("rating budget must be ≥ 0, got {budget}")));
    }
    let n = expected.len();
    if n < 2 {
        return Err(Error::param("LS-HiPPP needs at least two batteries"));
    }
    let total = budget * expected.intrinsic_power();
    let layer1_total = layer1.total_rating();
    let (layer1, layer2_rating) = if layer1_total <= total {
        (layer1.clone(), (total - layer1_total) / (n - 1) as f64)
    } else {
        (layer1.scaled(total / layer1_total), 0.0)
    };
    Architecture::lshippp(layer1, Layer2Design { rating: layer2_rating }, expected)
}

/// The Layer-1 part of an LS-HiPPP architecture, if it is one.
pub fn layer1_of(arch: &Architecture) -> Option<&Layer1Design> {
    match &arch.topology {
        Topology::LsHippp { layer1, .. } => Some(layer1),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        let sets: Vec<_> = enumerate_interconnections(3, 1, DEFAULT_ENUMERATION_CAP).unwrap().collect();
        assert_eq!(sets, vec![vec![(0, 1)], vec![(0, 2)], vec![(1, 2)]]);
        assert_eq!(
            enumerate_interconnections(2, 1, DEFAULT_ENUMERATION_CAP).unwrap().collect::<Vec<_>>(),
            vec![vec![(0, 1)]]
        );
        let it = enumerate_interconnections(9, 3, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(it.size_hint().0, 7140);
        assert_eq!(it.count(), 7140);
    }

    #[test]
    fn enumeration_cap_refuses() {
        let err = enumerate_interconnections(20, 6, DEFAULT_ENUMERATION_CAP).err().unwrap();
        assert!(matches!(err, Error::EnumerationCap { .. }));
        assert!(err.to_string().contains("reduce"));
        assert!(enumerate_interconnections(3, 3, DEFAULT_ENUMERATION_CAP).is_err());
    }

    #[test]
    fn partition_examples() {
        let p = [0.5, 0.3, 0.2];
        assert_eq!(partition_ratings(&p, 1).unwrap(), vec![0.5, 0.5, 0.5]);
        assert_eq!(partition_ratings(&p, 2).unwrap(), vec![0.5, 0.3, 0.3]);
        assert_eq!(partition_ratings(&p, 3).unwrap(), vec![0.5, 0.3, 0.2]);
        assert_eq!(partition_ratings(&[0.2, 0.5, 0.3], 2).unwrap(), vec![0.3, 0.5, 0.3]);
        assert!(partition_ratings(&p, 0).is_err());
        assert!(partition_ratings(&p, 4).is_err());
    }

    #[test]
    fn homogeneous_set_needs_no_layer1_processing() {
        let expected = ExpectedSet::from_capabilities(vec![1.0; 3]).unwrap();
        let cfg = DesignConfig {
            num_layer1: 1,
            num_rating_sets: 1,
            ..DesignConfig::default()
        };
        let design = design_layer1(&expected, &cfg).unwrap();
        assert_eq!(design.edges.len(), 1);
        assert!(design.edges[0].rating.abs() < 1e-12);
        // all three candidates tie; the lexicographic rule picks (0, 1)
        assert_eq!((design.edges[0].from_battery, design.edges[0].to_battery), (0, 1));
    }

    #[test]
    fn budget_split() {
        let expected = ExpectedSet::from_capabilities(vec![1.0; 9]).unwrap();
        let layer1 = Layer1Design {
            edges: vec![ConverterEdge::new(0, 8, 0.3), ConverterEdge::new(1, 7, 0.15)],
            rating_partitions: 2,
            processed_at_design: vec![0.3, 0.15],
        };
        for budget in [0.0, 0.03, 0.05, 0.15, 0.4] {
            let arch = lshippp_from_budget(budget, &layer1, &expected).unwrap();
            assert!((arch.aggregate_rating().unwrap() - budget).abs() < 1e-12);
        }
        let arch = lshippp_from_budget(0.15, &layer1, &expected).unwrap();
        match arch.topology {
            Topology::LsHippp { layer2, .. } => assert!((layer2.rating - (1.35 - 0.45) / 8.0).abs() < 1e-12),
            _ => unreachable!(),
        }
    }

    #[test]
    fn config_validation() {
        let cfg = DesignConfig::default();
        assert!(cfg.validate(9).is_ok());
        assert!(cfg.validate(1).is_err());
        assert!(DesignConfig { num_layer1: 9, ..cfg.clone() }.validate(9).is_err());
        assert!(DesignConfig { num_rating_sets: 4, ..cfg.clone() }.validate(9).is_err());
        assert!(DesignConfig { monte_carlo_trials: 0, ..cfg.clone() }.validate(9).is_err());
        assert!(DesignConfig { layer2_trial_ratings: vec![0.1, 0.05], ..cfg }.validate(9).is_err());
    }

    #[test]
    fn selection_ignores_candidate_order() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        // many exact ties: a homogeneous set makes every edge set optimal
        let caps = [1.0, 1.0, 1.2, 0.8, 1.0];
        let candidates: Vec<Candidate> = enumerate_interconnections(5, 2, DEFAULT_ENUMERATION_CAP)
            .unwrap()
            .map(|edges| {
                let (processed, output) = layer1_design_lp(&caps, &edges).unwrap();
                Candidate { edges, processed, output }
            })
            .collect();
        let reference = select_best(candidates.clone()).unwrap().edges;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let mut shuffled = candidates.clone();
            shuffled.shuffle(&mut rng);
            assert_eq!(select_best(shuffled).unwrap().edges, reference);
        }
    }

    #[test]
    fn curve_selection() {
        let curve = Layer2Curve {
            points: vec![(0.0, 0.9), (0.05, 0.95), (0.1, 0.99)],
        };
        assert_eq!(curve.select(0.07).rating, 0.05);
        assert_eq!(curve.select(1.0).rating, 0.1);
        assert_eq!(curve.first_reaching(0.95), Some((0.05, 0.95)));
        assert!(curve.is_monotone());
    }
}
