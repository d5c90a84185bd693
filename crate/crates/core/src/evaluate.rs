//! Monte Carlo evaluation of architectures and the comparison sweeps.
//!
//! All kinds evaluated in one call share the same per-trial seeds, so the
//! comparisons use common random numbers. Trials run in parallel but are
//! reduced in trial order, which keeps every estimate bit-reproducible
//! regardless of thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::architecture::{cppp_from_budget, fpp_from_budget, Architecture, ArchitectureKind, Layer1Design};
use crate::design::{design_layer1, lshippp_from_budget, trial_seed, DesignConfig};
use crate::error::{Error, Result};
use crate::powerflow::{optimal_flow, FLOW_TOL};
use crate::supply::{flatten, raw_draws, sample_against, BatterySupply, ExpectedSet};

pub const DEFAULT_CONVERTER_EFFICIENCY: f64 = 0.85;

/// `1 − (processed / output)·(1 − η_conv)`.
pub fn system_efficiency(processed: f64, output: f64, converter_efficiency: f64) -> Result<f64> {
    if !(output > 0.0) {
        return Err(Error::UndefinedMetric(format!(
            "system efficiency needs a positive output, got {output}"
        )));
    }
    if !(converter_efficiency > 0.0 && converter_efficiency <= 1.0) {
        return Err(Error::param(format!(
            "converter efficiency must be in (0, 1], got {converter_efficiency}"
        )));
    }
    if !(processed >= 0.0) {
        return Err(Error::param(format!("processed power must be ≥ 0, got {processed}")));
    }
    Ok(1.0 - processed / output * (1.0 - converter_efficiency))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSettings {
    pub trials: usize,
    pub seed: u64,
    pub converter_efficiency: f64,
    pub design: DesignConfig,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 0,
            converter_efficiency: DEFAULT_CONVERTER_EFFICIENCY,
            design: DesignConfig::default(),
        }
    }
}

impl EvalSettings {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::param("trials must be ≥ 1"));
        }
        if !(self.converter_efficiency > 0.0 && self.converter_efficiency <= 1.0) {
            return Err(Error::param(format!(
                "converter efficiency must be in (0, 1], got {}",
                self.converter_efficiency
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub kind: ArchitectureKind,
    /// Aggregate converter rating normalized by `P̄_I`.
    pub rating_norm: f64,
    pub heterogeneity: f64,
    pub trials: usize,
    pub seed: u64,
    /// Mean per-trial utilization.
    pub utilization: f64,
    pub utilization_std: f64,
    /// Mean processed power over `P̄_I`.
    pub processed_norm: f64,
    /// Mean output power over `P̄_I`.
    pub output_norm: f64,
    /// System efficiency of the mean processed and output powers.
    pub system_efficiency: f64,
}

#[derive(Debug, Clone, Copy)]
struct TrialOutcome {
    utilization: f64,
    processed: f64,
    output: f64,
}

fn run_trial(
    arch: &Architecture,
    supply: &BatterySupply,
    expected: &ExpectedSet,
    total_rating: f64,
    seed: u64,
) -> Result<TrialOutcome> {
    let sample = sample_against(supply, expected, seed)?;
    let mut redraw = raw_draws(supply, seed)?;
    redraw.sort_by(f64::total_cmp);
    if redraw != sample.capabilities {
        return Err(Error::internal(format!("sample for seed {seed} is not reproducible")));
    }

    let caps = &sample.capabilities;
    let flow = optimal_flow(caps, arch)?;
    let utilization = flow.utilization(caps);
    if flow.processed_power > total_rating + FLOW_TOL {
        return Err(Error::internal(format!(
            "processed power {} exceeds total rating {total_rating}",
            flow.processed_power
        )));
    }
    if utilization > 1.0 + FLOW_TOL {
        return Err(Error::internal(format!("utilization {utilization} above 1")));
    }
    if arch.kind() != ArchitectureKind::Fpp {
        let n = caps.len() as f64;
        let bare = n * caps[0] / caps.iter().sum::<f64>();
        if utilization < bare - FLOW_TOL {
            return Err(Error::internal(format!(
                "utilization {utilization} below the bare-string value {bare}"
            )));
        }
    }
    Ok(TrialOutcome {
        utilization,
        processed: flow.processed_power,
        output: flow.output_power,
    })
}

/// Monte Carlo metrics of one architecture under the supply.
pub fn evaluate_architecture(
    arch: &Architecture,
    supply: &BatterySupply,
    trials: usize,
    seed: u64,
    converter_efficiency: f64,
) -> Result<MetricsRecord> {
    let expected = flatten(supply)?;
    evaluate_with_expected(arch, supply, &expected, trials, seed, converter_efficiency)
}

fn evaluate_with_expected(
    arch: &Architecture,
    supply: &BatterySupply,
    expected: &ExpectedSet,
    trials: usize,
    seed: u64,
    converter_efficiency: f64,
) -> Result<MetricsRecord> {
    if trials == 0 {
        return Err(Error::param("trials must be ≥ 1"));
    }
    if arch.batteries != supply.count {
        return Err(Error::param(format!(
            "architecture has {} batteries, supply has {}",
            arch.batteries, supply.count
        )));
    }
    let rating_norm = arch.aggregate_rating()?;
    let total_rating = rating_norm * arch.intrinsic_power;

    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(arch, supply, expected, total_rating, trial_seed(seed, t)))
        .collect::<Result<Vec<_>>>()?;

    let count = trials as f64;
    let utilization = outcomes.iter().map(|o| o.utilization).sum::<f64>() / count;
    let utilization_std = if trials > 1 {
        let ss: f64 = outcomes.iter().map(|o| (o.utilization - utilization).powi(2)).sum();
        (ss / (count - 1.0)).sqrt()
    } else {
        0.0
    };
    let processed: f64 = outcomes.iter().map(|o| o.processed).sum();
    let output: f64 = outcomes.iter().map(|o| o.output).sum();

    Ok(MetricsRecord {
        kind: arch.kind(),
        rating_norm,
        heterogeneity: supply.std_power / supply.mean_power,
        trials,
        seed,
        utilization,
        utilization_std,
        processed_norm: processed / count / arch.intrinsic_power,
        output_norm: output / count / arch.intrinsic_power,
        system_efficiency: system_efficiency(processed, output, converter_efficiency)?,
    })
}

/// Builds one architecture of each requested kind at a shared rating budget.
/// LS-HiPPP needs the Layer-1 design of the same supply.
pub fn architecture_for_budget(
    kind: ArchitectureKind,
    budget: f64,
    expected: &ExpectedSet,
    layer1: Option<&Layer1Design>,
) -> Result<Architecture> {
    match kind {
        ArchitectureKind::Fpp => fpp_from_budget(budget, expected),
        ArchitectureKind::Cppp => cppp_from_budget(budget, expected),
        ArchitectureKind::LsHippp => {
            let layer1 = layer1.ok_or_else(|| Error::param("LS-HiPPP budget sizing needs a Layer-1 design"))?;
            lshippp_from_budget(budget, layer1, expected)
        }
    }
}

fn check_kinds(kinds: &[ArchitectureKind]) -> Result<()> {
    if kinds.is_empty() {
        return Err(Error::param("no architecture kinds requested"));
    }
    Ok(())
}

fn check_grid(grid: &[f64], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::param(format!("{what} grid is empty")));
    }
    if grid.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::param(format!("{what} grid values must be finite and ≥ 0")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param(format!("{what} grid must be strictly ascending")));
    }
    Ok(())
}

/// One record per `(kind, budget)`, kinds in the order given.
pub fn sweep_rating(
    kinds: &[ArchitectureKind],
    supply: &BatterySupply,
    rating_grid: &[f64],
    settings: &EvalSettings,
) -> Result<Vec<MetricsRecord>> {
    check_kinds(kinds)?;
    check_grid(rating_grid, "rating")?;
    settings.validate()?;
    let expected = flatten(supply)?;
    let layer1 = if kinds.contains(&ArchitectureKind::LsHippp) {
        Some(design_layer1(&expected, &settings.design)?)
    } else {
        None
    };

    let mut records = Vec::with_capacity(kinds.len() * rating_grid.len());
    for &kind in kinds {
        for &budget in rating_grid {
            let arch = architecture_for_budget(kind, budget, &expected, layer1.as_ref())?;
            records.push(evaluate_with_expected(
                &arch,
                supply,
                &expected,
                settings.trials,
                settings.seed,
                settings.converter_efficiency,
            )?);
        }
    }
    Ok(records)
}

/// One record per `(kind, σ̂)` at a fixed budget. LS-HiPPP is re-designed for
/// every heterogeneity level.
pub fn sweep_heterogeneity(
    kinds: &[ArchitectureKind],
    mean_power: f64,
    batteries: usize,
    sigma_grid: &[f64],
    budget: f64,
    settings: &EvalSettings,
) -> Result<Vec<MetricsRecord>> {
    check_kinds(kinds)?;
    check_grid(sigma_grid, "heterogeneity")?;
    let mut records = Vec::with_capacity(kinds.len() * sigma_grid.len());
    let per_sigma = sigma_grid
        .iter()
        .map(|&sigma| {
            let supply = BatterySupply::new(mean_power, sigma * mean_power, batteries)?;
            sweep_rating(kinds, &supply, &[budget], settings)
        })
        .collect::<Result<Vec<_>>>()?;
    for (k, _) in kinds.iter().enumerate() {
        for rows in &per_sigma {
            records.push(rows[k].clone());
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub rating_norm: f64,
    pub utilization: f64,
    pub processed_norm: f64,
    pub system_efficiency: f64,
}

impl From<&MetricsRecord> for FrontierPoint {
    fn from(r: &MetricsRecord) -> Self {
        Self {
            rating_norm: r.rating_norm,
            utilization: r.utilization,
            processed_norm: r.processed_norm,
            system_efficiency: r.system_efficiency,
        }
    }
}

/// Utilization against processed power and efficiency along the rating grid.
pub fn tradeoff_frontier(
    kind: ArchitectureKind,
    supply: &BatterySupply,
    rating_grid: &[f64],
    settings: &EvalSettings,
) -> Result<Vec<FrontierPoint>> {
    Ok(sweep_rating(&[kind], supply, rating_grid, settings)?
        .iter()
        .map(FrontierPoint::from)
        .collect())
}

/// First frontier point whose utilization reaches `target`.
pub fn first_reaching(points: &[FrontierPoint], target: f64) -> Option<FrontierPoint> {
    points.iter().copied().find(|p| p.utilization >= target)
}
