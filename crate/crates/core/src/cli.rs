//! Experiment configs, design artifacts, CSV output and the flow report used
//! by the `hippp` binary.
//!
//! Configs are TOML with one table per concern:
//!
//! ```toml
//! [supply]
//! mean = 1.0
//! sigma = [0.2, 0.05, 0.1, 0.15, 0.25, 0.3]   # first entry is the reference
//! batteries = 9
//!
//! [architectures]
//! kinds = ["fpp", "cppp", "lshippp"]
//!
//! [design]
//! num_layer1 = 3
//! num_rating_sets = 2
//! layer2_trial_ratings = [0.0, 0.05, 0.1]
//! rating_budget = 0.15
//!
//! [monte_carlo]
//! trials = 1000
//! seed = 42
//!
//! [sweep]
//! rating_grid = [0.05, 0.1, 0.15]
//! heterogeneity_budgets = [0.15, 0.2]
//! converter_efficiency = 0.85
//!
//! [output]
//! dir = "out"
//! ```

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::architecture::{Architecture, ArchitectureKind, ConverterEdge, Layer1Design, Layer2Design};
use crate::design::{design_layer1, design_layer2, DesignConfig, DEFAULT_ENUMERATION_CAP};
use crate::error::Error;
use crate::evaluate::{sweep_heterogeneity, sweep_rating, EvalSettings, MetricsRecord};
use crate::powerflow::{optimal_flow, PowerFlowSolution};
use crate::supply::{flatten, BatterySupply, ExpectedSet};

pub const DESIGN_FILE: &str = "design.toml";
pub const UTILIZATION_VS_RATING: &str = "utilization_vs_rating.csv";
pub const UTILIZATION_VS_HETEROGENEITY: &str = "utilization_vs_heterogeneity.csv";
pub const EFFICIENCY_VS_RATING: &str = "efficiency_vs_rating.csv";
pub const FRONTIER: &str = "frontier.csv";

/// Failure of a CLI command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration or input file (exit 2).
    Config(String),
    /// Failure while running a valid request, including the enumeration cap (exit 3).
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Runtime(msg) => write!(f, "error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn config_err(key: &str, msg: impl fmt::Display) -> CliError {
    CliError::Config(format!("`{key}`: {msg}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupplySection {
    #[serde(default = "one")]
    pub mean: f64,
    pub sigma: Vec<f64>,
    pub batteries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchitecturesSection {
    pub kinds: Vec<ArchitectureKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    #[serde(default = "three")]
    pub num_layer1: usize,
    #[serde(default = "two")]
    pub num_rating_sets: usize,
    #[serde(default = "default_trial_ratings")]
    pub layer2_trial_ratings: Vec<f64>,
    /// Aggregate rating the design command sizes Layer 2 for.
    #[serde(default = "default_budget")]
    pub rating_budget: f64,
    #[serde(default = "default_cap")]
    pub enumeration_cap: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub rating_grid: Vec<f64>,
    #[serde(default = "default_heterogeneity_budgets")]
    pub heterogeneity_budgets: Vec<f64>,
    #[serde(default = "default_efficiency")]
    pub converter_efficiency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out")]
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: default_out() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub supply: SupplySection,
    pub architectures: ArchitecturesSection,
    pub design: DesignSection,
    pub monte_carlo: MonteCarloSection,
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn one() -> f64 {
    1.0
}
fn two() -> usize {
    2
}
fn three() -> usize {
    3
}
fn default_trial_ratings() -> Vec<f64> {
    DesignConfig::default().layer2_trial_ratings
}
fn default_budget() -> f64 {
    0.15
}
fn default_cap() -> u64 {
    DEFAULT_ENUMERATION_CAP as u64
}
fn default_trials() -> usize {
    1000
}
fn default_heterogeneity_budgets() -> Vec<f64> {
    vec![0.15, 0.20]
}
fn default_efficiency() -> f64 {
    0.85
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn apply(&mut self, overrides: &Overrides) -> Result<(), CliError> {
        if let Some(dir) = &overrides.out {
            self.output.dir = dir.clone();
        }
        if let Some(seed) = overrides.seed {
            self.monte_carlo.seed = seed;
        }
        if let Some(trials) = overrides.trials {
            self.monte_carlo.trials = trials;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.supply;
        if !(s.mean.is_finite() && s.mean > 0.0) {
            return Err(config_err("supply.mean", "must be > 0"));
        }
        if s.sigma.is_empty() {
            return Err(config_err("supply.sigma", "must list at least one heterogeneity"));
        }
        if s.sigma.iter().any(|v| !(0.0..1.0).contains(v)) {
            return Err(config_err("supply.sigma", "entries must be in [0, 1) (fraction of the mean)"));
        }
        if s.batteries == 0 {
            return Err(config_err("supply.batteries", "must be ≥ 1"));
        }
        let kinds = &self.architectures.kinds;
        if kinds.is_empty() {
            return Err(config_err("architectures.kinds", "must name at least one architecture"));
        }
        let ppp = kinds.iter().any(|k| *k != ArchitectureKind::Fpp);
        if ppp && s.batteries < 2 {
            return Err(config_err("supply.batteries", "partial power processing needs ≥ 2 batteries"));
        }
        if self.monte_carlo.trials == 0 {
            return Err(config_err("monte_carlo.trials", "must be ≥ 1"));
        }
        let eta = self.sweep.converter_efficiency;
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(config_err("sweep.converter_efficiency", "must be in (0, 1]"));
        }
        check_grid(&self.sweep.rating_grid, "sweep.rating_grid")?;
        check_grid(&self.sweep.heterogeneity_budgets, "sweep.heterogeneity_budgets")?;
        if !(self.design.rating_budget.is_finite() && self.design.rating_budget >= 0.0) {
            return Err(config_err("design.rating_budget", "must be ≥ 0"));
        }
        if kinds.contains(&ArchitectureKind::LsHippp) || s.batteries >= 2 {
            self.design_config()
                .validate(s.batteries.max(2))
                .map_err(|e| config_err("design", e))?;
        }
        Ok(())
    }

    pub fn design_config(&self) -> DesignConfig {
        DesignConfig {
            num_layer1: self.design.num_layer1,
            num_rating_sets: self.design.num_rating_sets,
            layer2_trial_ratings: self.design.layer2_trial_ratings.clone(),
            monte_carlo_trials: self.monte_carlo.trials,
            base_seed: self.monte_carlo.seed,
            enumeration_cap: u128::from(self.design.enumeration_cap),
        }
    }

    pub fn eval_settings(&self) -> EvalSettings {
        EvalSettings {
            trials: self.monte_carlo.trials,
            seed: self.monte_carlo.seed,
            converter_efficiency: self.sweep.converter_efficiency,
            design: self.design_config(),
        }
    }

    pub fn reference_sigma(&self) -> f64 {
        self.supply.sigma[0]
    }

    pub fn supply_at(&self, sigma: f64) -> Result<BatterySupply, CliError> {
        BatterySupply::new(self.supply.mean, sigma * self.supply.mean, self.supply.batteries)
            .map_err(|e| config_err("supply", e))
    }
}

fn check_grid(grid: &[f64], key: &str) -> Result<(), CliError> {
    if grid.is_empty() {
        return Err(config_err(key, "must not be empty"));
    }
    if grid.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(config_err(key, "values must be finite and ≥ 0"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(config_err(key, "must be strictly ascending"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer1Entry {
    pub from: usize,
    pub to: usize,
    pub rating: f64,
    #[serde(default)]
    pub processed_at_design: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveEntry {
    pub rating: f64,
    pub utilization: f64,
}

/// Contents of `design.toml`: everything needed to rebuild the LS-HiPPP
/// architecture for a production unit. Battery indices are zero-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignArtifact {
    pub batteries: usize,
    #[serde(default)]
    pub supply_mean: f64,
    #[serde(default)]
    pub supply_sigma: f64,
    pub expected_set: Vec<f64>,
    #[serde(default)]
    pub rating_norm: f64,
    #[serde(default = "one_usize")]
    pub rating_partitions: usize,
    pub layer2_rating: f64,
    pub layer1: Vec<Layer1Entry>,
    #[serde(default)]
    pub layer2_curve: Vec<CurveEntry>,
}

fn one_usize() -> usize {
    1
}

impl DesignArtifact {
    pub fn architecture(&self) -> Result<Architecture, CliError> {
        if self.expected_set.len() != self.batteries {
            return Err(CliError::Config(format!(
                "design lists {} expected capabilities for {} batteries",
                self.expected_set.len(),
                self.batteries
            )));
        }
        let expected =
            ExpectedSet::from_capabilities(self.expected_set.clone()).map_err(|e| config_err("expected_set", e))?;
        let layer1 = Layer1Design {
            edges: self
                .layer1
                .iter()
                .map(|e| ConverterEdge::new(e.from, e.to, e.rating))
                .collect(),
            rating_partitions: self.rating_partitions,
            processed_at_design: self.layer1.iter().map(|e| e.processed_at_design).collect(),
        };
        Architecture::lshippp(layer1, Layer2Design { rating: self.layer2_rating }, &expected)
            .map_err(|e| config_err("layer1", e))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Runtime(format!("serializing design: {e}")))
    }

    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

/// Designs LS-HiPPP at the reference heterogeneity: Layer 1 by exhaustive
/// search, then the Layer-2 curve, with Layer 2 picked as the largest trial
/// rating the `design.rating_budget` leaves room for.
pub fn run_design(cfg: &ExperimentConfig) -> Result<DesignArtifact, CliError> {
    let sigma = cfg.reference_sigma();
    let supply = cfg.supply_at(sigma)?;
    let expected = flatten(&supply)?;
    let design_cfg = cfg.design_config();
    let layer1 = design_layer1(&expected, &design_cfg)?;
    let curve = design_layer2(&layer1, &supply, &design_cfg)?;

    let n = expected.len();
    let room = cfg.design.rating_budget * expected.intrinsic_power() - layer1.total_rating();
    let layer2 = curve.select((room / (n - 1) as f64).max(0.0));
    let arch = Architecture::lshippp(layer1.clone(), layer2, &expected)?;

    Ok(DesignArtifact {
        batteries: n,
        supply_mean: supply.mean_power,
        supply_sigma: sigma,
        expected_set: expected.capabilities().to_vec(),
        rating_norm: arch.aggregate_rating()?,
        rating_partitions: layer1.rating_partitions,
        layer2_rating: layer2.rating,
        layer1: layer1
            .edges
            .iter()
            .zip(&layer1.processed_at_design)
            .map(|(e, &p)| Layer1Entry {
                from: e.from_battery,
                to: e.to_battery,
                rating: e.rating,
                processed_at_design: p,
            })
            .collect(),
        layer2_curve: curve
            .points
            .iter()
            .map(|&(rating, utilization)| CurveEntry { rating, utilization })
            .collect(),
    })
}

pub fn write_design(artifact: &DesignArtifact, dir: &Path) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("creating {}: {e}", dir.display())))?;
    let path = dir.join(DESIGN_FILE);
    fs::write(&path, artifact.to_toml()?)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
    Ok(path)
}

/// Rounds to six significant digits; the CSV stores exactly this value.
pub fn round_sig6(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let magnitude = v.abs().log10().floor() as i32;
    let text = if (0..=5).contains(&(5 - magnitude)) || magnitude < 0 {
        format!("{:.*}", (5 - magnitude).max(0) as usize, v)
    } else {
        format!("{v:.5e}")
    };
    text.parse().unwrap_or(v)
}

/// One CSV row. Columns match the on-disk header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub arch: ArchitectureKind,
    pub rating_norm: f64,
    pub heterogeneity: f64,
    pub trials: usize,
    pub seed: u64,
    pub util_mean: f64,
    pub util_std: f64,
    pub eff_mean: f64,
    pub proc_mean: f64,
    pub out_mean: f64,
}

impl From<&MetricsRecord> for SweepRow {
    fn from(r: &MetricsRecord) -> Self {
        Self {
            arch: r.kind,
            rating_norm: round_sig6(r.rating_norm),
            heterogeneity: round_sig6(r.heterogeneity),
            trials: r.trials,
            seed: r.seed,
            util_mean: round_sig6(r.utilization),
            util_std: round_sig6(r.utilization_std),
            eff_mean: round_sig6(r.system_efficiency),
            proc_mean: round_sig6(r.processed_norm),
            out_mean: round_sig6(r.output_norm),
        }
    }
}

pub const CSV_HEADER: &str = "arch,rating_norm,heterogeneity,trials,seed,util_mean,util_std,eff_mean,proc_mean,out_mean";

pub fn write_rows(path: &Path, rows: &[SweepRow]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Runtime(format!("writing {}: {e}", path.display()));
    let mut writer = csv::Writer::from_path(path).map_err(io)?;
    if rows.is_empty() {
        writer.write_record(CSV_HEADER.split(',')).map_err(io)?;
    }
    for row in rows {
        writer.serialize(row).map_err(io)?;
    }
    writer
        .flush()
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))
}

pub fn read_rows(path: &Path) -> Result<Vec<SweepRow>, CliError> {
    let io = |e: csv::Error| CliError::Config(format!("reading {}: {e}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(io)?;
    reader.deserialize().collect::<Result<Vec<SweepRow>, _>>().map_err(io)
}

/// All series produced by `sweep`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    /// Every kind across the rating grid at the reference heterogeneity.
    pub utilization_vs_rating: Vec<MetricsRecord>,
    /// Every kind across the heterogeneity list, once per fixed budget.
    pub utilization_vs_heterogeneity: Vec<MetricsRecord>,
    /// Partial-processing kinds across the rating grid for every heterogeneity.
    pub efficiency_vs_rating: Vec<MetricsRecord>,
}

impl SweepOutput {
    /// Frontier rows are the reference rating sweep viewed as
    /// utilization against processed power and efficiency.
    pub fn frontier(&self) -> &[MetricsRecord] {
        &self.utilization_vs_rating
    }
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput, CliError> {
    let settings = cfg.eval_settings();
    let kinds = &cfg.architectures.kinds;
    let grid = &cfg.sweep.rating_grid;

    let reference = cfg.supply_at(cfg.reference_sigma())?;
    let utilization_vs_rating = sweep_rating(kinds, &reference, grid, &settings)?;

    let mut sigmas = cfg.supply.sigma.clone();
    sigmas.sort_by(f64::total_cmp);
    sigmas.dedup();

    let mut utilization_vs_heterogeneity = Vec::new();
    for &budget in &cfg.sweep.heterogeneity_budgets {
        utilization_vs_heterogeneity.extend(sweep_heterogeneity(
            kinds,
            cfg.supply.mean,
            cfg.supply.batteries,
            &sigmas,
            budget,
            &settings,
        )?);
    }

    let ppp: Vec<ArchitectureKind> = kinds.iter().copied().filter(|k| *k != ArchitectureKind::Fpp).collect();
    let mut efficiency_vs_rating = Vec::new();
    if !ppp.is_empty() {
        for &sigma in &sigmas {
            let supply = cfg.supply_at(sigma)?;
            efficiency_vs_rating.extend(sweep_rating(&ppp, &supply, grid, &settings)?);
        }
    }

    Ok(SweepOutput {
        utilization_vs_rating,
        utilization_vs_heterogeneity,
        efficiency_vs_rating,
    })
}

pub fn write_sweep(output: &SweepOutput, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("creating {}: {e}", dir.display())))?;
    let files = [
        (UTILIZATION_VS_RATING, &output.utilization_vs_rating[..]),
        (UTILIZATION_VS_HETEROGENEITY, &output.utilization_vs_heterogeneity[..]),
        (EFFICIENCY_VS_RATING, &output.efficiency_vs_rating[..]),
        (FRONTIER, output.frontier()),
    ];
    let mut written = Vec::new();
    for (name, records) in files {
        let path = dir.join(name);
        let rows: Vec<SweepRow> = records.iter().map(SweepRow::from).collect();
        write_rows(&path, &rows)?;
        written.push(path);
    }
    Ok(written)
}

/// One line per architecture kind summarizing the reference rating sweep.
pub fn summary_lines(records: &[MetricsRecord]) -> Vec<String> {
    let mut kinds: Vec<ArchitectureKind> = records.iter().map(|r| r.kind).collect();
    kinds.dedup();
    kinds
        .into_iter()
        .map(|kind| {
            let rows: Vec<&MetricsRecord> = records.iter().filter(|r| r.kind == kind).collect();
            let range = |f: fn(&MetricsRecord) -> f64| {
                let lo = rows.iter().map(|r| f(r)).fold(f64::INFINITY, f64::min);
                let hi = rows.iter().map(|r| f(r)).fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            };
            let (r0, r1) = range(|r| r.rating_norm);
            let (u0, u1) = range(|r| r.utilization);
            let (e0, e1) = range(|r| r.system_efficiency);
            let (p0, p1) = range(|r| r.processed_norm);
            format!(
                "{:<8} σ̂={:.3} R̂ {r0:.3}..{r1:.3}  util {u0:.4}..{u1:.4}  η_sys {e0:.4}..{e1:.4}  P̂_proc {p0:.4}..{p1:.4}",
                kind.as_str(),
                rows[0].heterogeneity
            )
        })
        .collect()
}

/// Parses whitespace-, comma- or newline-separated capabilities; `#` starts a comment.
pub fn parse_capabilities(text: &str) -> Result<Vec<f64>, CliError> {
    let mut caps = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        for token in content.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let value: f64 = token
                .parse()
                .map_err(|_| CliError::Config(format!("line {}: `{token}` is not a number", lineno + 1)))?;
            if !(value.is_finite() && value > 0.0) {
                return Err(CliError::Config(format!(
                    "line {}: capability {value} must be positive",
                    lineno + 1
                )));
            }
            caps.push(value);
        }
    }
    if caps.is_empty() {
        return Err(CliError::Config("capabilities file lists no values".into()));
    }
    Ok(caps)
}

pub fn load_capabilities(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_capabilities(&text)
}

/// Operating point of one concrete unit.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowReport {
    pub capabilities: Vec<f64>,
    pub edges: Vec<ConverterEdge>,
    pub layer1_count: usize,
    pub solution: PowerFlowSolution,
    pub utilization: f64,
}

pub fn flow_report(artifact: &DesignArtifact, capabilities: &[f64]) -> Result<FlowReport, CliError> {
    if capabilities.len() != artifact.batteries {
        return Err(CliError::Config(format!(
            "capabilities file lists {} batteries, the design has {}",
            capabilities.len(),
            artifact.batteries
        )));
    }
    let arch = artifact.architecture()?;
    let solution = optimal_flow(capabilities, &arch)?;
    Ok(FlowReport {
        capabilities: capabilities.to_vec(),
        edges: arch.battery_edges(),
        layer1_count: artifact.layer1.len(),
        utilization: solution.utilization(capabilities),
        solution,
    })
}

impl fmt::Display for FlowReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.solution;
        writeln!(f, "string current  {:.6}", s.string_current)?;
        writeln!(f, "output power    {:.6}", s.output_power)?;
        writeln!(f, "processed power {:.6}", s.processed_power)?;
        writeln!(f, "utilization     {:.6}", self.utilization)?;
        writeln!(f, "converter flows:")?;
        for (k, (edge, &flow)) in self.edges.iter().zip(&s.converter_flows).enumerate() {
            let layer = if k < self.layer1_count { "L1" } else { "L2" };
            // print each flow in the direction power actually moves
            let (src, dst) = if flow < 0.0 {
                (edge.to_battery, edge.from_battery)
            } else {
                (edge.from_battery, edge.to_battery)
            };
            writeln!(
                f,
                "  {layer} {src:>3} -> {dst:<3} {:>10.6}  (rating {:.6})",
                flow.abs(),
                edge.rating
            )?;
        }
        writeln!(f, "battery powers:")?;
        for (j, (p, cap)) in s.battery_powers.iter().zip(&self.capabilities).enumerate() {
            writeln!(f, "  {j:>3} {p:>10.6} / {cap:.6}")?;
        }
        Ok(())
    }
}
