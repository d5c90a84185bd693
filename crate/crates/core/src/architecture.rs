//! Power-processing architectures: full processing (FPP), the adjacent
//! converter ladder (C-PPP) and the two-layer lite-sparse hierarchy
//! (LS-HiPPP).
//!
//! Battery indices are zero-based positions in the ascending string.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::supply::ExpectedSet;

/// One bidirectional differential converter between two batteries. A positive
/// flow leaves `from_battery` and enters `to_battery`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConverterEdge {
    pub from_battery: usize,
    pub to_battery: usize,
    pub rating: f64,
}

impl ConverterEdge {
    pub fn new(from_battery: usize, to_battery: usize, rating: f64) -> Self {
        Self {
            from_battery,
            to_battery,
            rating,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.from_battery == self.to_battery {
            return Err(Error::structural(format!(
                "converter connects battery {} to itself",
                self.from_battery
            )));
        }
        if self.from_battery >= n || self.to_battery >= n {
            return Err(Error::structural(format!(
                "converter ({}, {}) out of range for {n} batteries",
                self.from_battery, self.to_battery
            )));
        }
        if !(self.rating >= 0.0) {
            return Err(Error::structural(format!("negative or NaN rating {}", self.rating)));
        }
        Ok(())
    }

    pub fn reversed(&self) -> Self {
        Self::new(self.to_battery, self.from_battery, self.rating)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer1Design {
    pub edges: Vec<ConverterEdge>,
    pub rating_partitions: usize,
    /// Optimal processed power of each edge on the expected set.
    pub processed_at_design: Vec<f64>,
}

impl Layer1Design {
    pub fn total_rating(&self) -> f64 {
        self.edges.iter().map(|e| e.rating).sum()
    }

    /// Copy with every rating multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.edges.iter_mut().for_each(|e| e.rating *= factor);
        out
    }

    /// Number of distinct converter ratings actually used.
    pub fn distinct_ratings(&self) -> usize {
        let mut ratings: Vec<f64> = self.edges.iter().map(|e| e.rating).collect();
        ratings.sort_by(f64::total_cmp);
        ratings.dedup();
        ratings.len()
    }
}

/// Identical adjacent-pair converters `(j, j+1)` for every neighbouring pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layer2Design {
    pub rating: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArchitectureKind {
    #[serde(rename = "fpp")]
    Fpp,
    #[serde(rename = "cppp")]
    Cppp,
    #[serde(rename = "lshippp")]
    LsHippp,
}

impl ArchitectureKind {
    pub const ALL: [ArchitectureKind; 3] = [Self::Fpp, Self::Cppp, Self::LsHippp];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Fpp => "fpp",
            Self::Cppp => "cppp",
            Self::LsHippp => "lshippp",
        }
    }
}

impl fmt::Display for ArchitectureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ArchitectureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "fpp" => Ok(Self::Fpp),
            "cppp" => Ok(Self::Cppp),
            "lshippp" => Ok(Self::LsHippp),
            _ => Err(Error::param(format!("unknown architecture kind `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Topology {
    /// One converter per battery, each rated `rating`.
    Fpp { rating: f64 },
    /// Ladder of `N − 1` adjacent converters, each rated `rating`.
    Cppp { rating: f64 },
    #[serde(rename = "lshippp")]
    LsHippp { layer1: Layer1Design, layer2: Layer2Design },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Architecture {
    pub batteries: usize,
    /// `P̄_I` of the expected set the architecture was sized against.
    pub intrinsic_power: f64,
    pub topology: Topology,
}

impl Architecture {
    pub fn kind(&self) -> ArchitectureKind {
        match self.topology {
            Topology::Fpp { .. } => ArchitectureKind::Fpp,
            Topology::Cppp { .. } => ArchitectureKind::Cppp,
            Topology::LsHippp { .. } => ArchitectureKind::LsHippp,
        }
    }

    pub fn lshippp(layer1: Layer1Design, layer2: Layer2Design, expected: &ExpectedSet) -> Result<Self> {
        let arch = Self {
            batteries: expected.len(),
            intrinsic_power: expected.intrinsic_power(),
            topology: Topology::LsHippp { layer1, layer2 },
        };
        arch.validate()?;
        Ok(arch)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.batteries;
        if n == 0 {
            return Err(Error::structural("architecture has no batteries"));
        }
        if !(self.intrinsic_power.is_finite() && self.intrinsic_power > 0.0) {
            return Err(Error::structural(format!(
                "intrinsic power must be > 0, got {}",
                self.intrinsic_power
            )));
        }
        let nonneg = |r: f64, what: &str| {
            if r.is_finite() && r >= 0.0 {
                Ok(())
            } else {
                Err(Error::structural(format!("{what} rating must be ≥ 0, got {r}")))
            }
        };
        match &self.topology {
            Topology::Fpp { rating } => nonneg(*rating, "FPP")?,
            Topology::Cppp { rating } => nonneg(*rating, "C-PPP")?,
            Topology::LsHippp { layer1, layer2 } => {
                nonneg(layer2.rating, "Layer-2")?;
                if layer1.edges.len() != layer1.processed_at_design.len() {
                    return Err(Error::structural(format!(
                        "{} Layer-1 edges but {} design processed powers",
                        layer1.edges.len(),
                        layer1.processed_at_design.len()
                    )));
                }
                if n >= 2 && layer1.edges.len() > n - 1 {
                    return Err(Error::structural(format!(
                        "{} Layer-1 converters exceed N − 1 = {}",
                        layer1.edges.len(),
                        n - 1
                    )));
                }
                for edge in &layer1.edges {
                    edge.validate(n)?;
                }
            }
        }
        Ok(())
    }

    /// Every converter that couples two batteries, in a fixed order: Layer 1
    /// then Layer 2 for LS-HiPPP, the ladder for C-PPP, nothing for FPP.
    pub fn battery_edges(&self) -> Vec<ConverterEdge> {
        match &self.topology {
            Topology::Fpp { .. } => Vec::new(),
            Topology::Cppp { rating } => ladder(self.batteries, *rating),
            Topology::LsHippp { layer1, layer2 } => {
                let mut edges = layer1.edges.clone();
                edges.extend(ladder(self.batteries, layer2.rating));
                edges
            }
        }
    }

    /// Sum of all converter ratings normalized by `P̄_I`.
    pub fn aggregate_rating(&self) -> Result<f64> {
        self.validate()?;
        let n = self.batteries as f64;
        let total = match &self.topology {
            Topology::Fpp { rating } => n * rating,
            Topology::Cppp { rating } => (n - 1.0) * rating,
            Topology::LsHippp { layer1, layer2 } => layer1.total_rating() + (n - 1.0) * layer2.rating,
        };
        Ok(total / self.intrinsic_power)
    }
}

fn ladder(n: usize, rating: f64) -> Vec<ConverterEdge> {
    (1..n).map(|j| ConverterEdge::new(j - 1, j, rating)).collect()
}

pub fn cppp_from_budget(budget: f64, expected: &ExpectedSet) -> Result<Architecture> {
    check_budget(budget)?;
    let n = expected.len();
    if n < 2 {
        return Err(Error::param("C-PPP needs at least two batteries"));
    }
    let intrinsic_power = expected.intrinsic_power();
    Ok(Architecture {
        batteries: n,
        intrinsic_power,
        topology: Topology::Cppp {
            rating: budget * intrinsic_power / (n - 1) as f64,
        },
    })
}

pub fn fpp_from_budget(budget: f64, expected: &ExpectedSet) -> Result<Architecture> {
    check_budget(budget)?;
    let n = expected.len();
    let intrinsic_power = expected.intrinsic_power();
    Ok(Architecture {
        batteries: n,
        intrinsic_power,
        topology: Topology::Fpp {
            rating: budget * intrinsic_power / n as f64,
        },
    })
}

fn check_budget(budget: f64) -> Result<()> {
    if budget.is_finite() && budget >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("rating budget must be ≥ 0, got {budget}")))
    }
}
