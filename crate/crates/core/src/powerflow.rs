//! Power-flow linear programs for a series string with unit normalized
//! battery voltages.
//!
//! Every battery delivers the common string current `I` straight to the bus,
//! and converters move power between batteries. Battery `j` must satisfy
//! `−P_j ≤ I + Σₑ s(j,e)·fₑ ≤ P_j`, where `s(j,e)` is `+1` when `j` is the
//! source end of edge `e` and `−1` when it is the sink end. The LP maximizes
//! the output `N·I`.
//!
//! Optimal flows are rarely unique. [`optimal_flow`] therefore solves a
//! second LP with `I` pinned at its optimum that minimizes `Σ |fₑ|`, so the
//! reported processed power is the least any optimal operating point needs.

use crate::architecture::{Architecture, ConverterEdge, Topology};
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpSolution, LpStatus};

/// Slack allowed on conservation, capability and rating checks.
pub const FLOW_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerFlowSolution {
    pub string_current: f64,
    /// Signed flow per edge, positive from `from_battery` to `to_battery`.
    /// For FPP: the power each battery's own converter delivers.
    pub converter_flows: Vec<f64>,
    pub battery_powers: Vec<f64>,
    pub output_power: f64,
    pub processed_power: f64,
}

impl PowerFlowSolution {
    pub fn utilization(&self, capabilities: &[f64]) -> f64 {
        self.output_power / capabilities.iter().sum::<f64>()
    }
}

fn edge_sign(j: usize, edge: &ConverterEdge) -> f64 {
    if j == edge.from_battery {
        1.0
    } else if j == edge.to_battery {
        -1.0
    } else {
        0.0
    }
}

fn check_inputs(capabilities: &[f64], edges: &[ConverterEdge]) -> Result<()> {
    if capabilities.is_empty() {
        return Err(Error::param("no batteries"));
    }
    if let Some(p) = capabilities.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::param(format!("battery capability must be > 0, got {p}")));
    }
    for edge in edges {
        edge.validate(capabilities.len())?;
    }
    Ok(())
}

/// Variable layout of [`build_flow_lp`]: `[I, f_0 … f_{E−1}, p_0 … p_{N−1}]`.
///
/// The battery powers `p_j` carry the capability bounds so the conservation
/// law can be written as an equality row per battery. A rating of `+∞` leaves
/// the flow unbounded.
pub fn build_flow_lp(capabilities: &[f64], edges: &[ConverterEdge]) -> Result<LinearProgram> {
    check_inputs(capabilities, edges)?;
    let n = capabilities.len();
    let e = edges.len();
    let mut lp = LinearProgram::new(1 + e + n);
    lp.set_objective(0, n as f64).set_bounds(0, 0.0, f64::INFINITY);
    for (k, edge) in edges.iter().enumerate() {
        lp.set_bounds(1 + k, -edge.rating, edge.rating);
    }
    for (j, &cap) in capabilities.iter().enumerate() {
        let pj = 1 + e + j;
        lp.set_bounds(pj, -cap, cap);
        let mut row = vec![(pj, 1.0), (0, -1.0)];
        row.extend(
            edges
                .iter()
                .enumerate()
                .filter(|(_, edge)| edge_sign(j, edge) != 0.0)
                .map(|(k, edge)| (1 + k, -edge_sign(j, edge))),
        );
        lp.add_equality(&row, 0.0);
    }
    Ok(lp)
}

/// Minimum `Σ|fₑ|` over flows that support string current `current`.
/// Layout: `[I, f⁺_0 … f⁺_{E−1}, f⁻_0 … f⁻_{E−1}, p_0 … p_{N−1}]`.
fn build_min_processing_lp(capabilities: &[f64], edges: &[ConverterEdge], current: f64) -> LinearProgram {
    let n = capabilities.len();
    let e = edges.len();
    let mut lp = LinearProgram::new(1 + 2 * e + n);
    lp.set_bounds(0, current, current);
    for (k, edge) in edges.iter().enumerate() {
        lp.set_objective(1 + k, -1.0)
            .set_objective(1 + e + k, -1.0)
            .set_bounds(1 + k, 0.0, edge.rating)
            .set_bounds(1 + e + k, 0.0, edge.rating);
    }
    for (j, &cap) in capabilities.iter().enumerate() {
        let pj = 1 + 2 * e + j;
        lp.set_bounds(pj, -cap, cap);
        let mut row = vec![(pj, 1.0), (0, -1.0)];
        for (k, edge) in edges.iter().enumerate() {
            let s = edge_sign(j, edge);
            if s != 0.0 {
                row.push((1 + k, -s));
                row.push((1 + e + k, s));
            }
        }
        lp.add_equality(&row, 0.0);
    }
    lp
}

fn expect_optimal(sol: LpSolution, what: &str) -> Result<LpSolution> {
    match sol.status {
        LpStatus::Optimal => Ok(sol),
        status => Err(Error::internal(format!("{what} LP returned {status:?}"))),
    }
}

/// Maximum-output flow over explicit battery-to-battery edges.
pub fn solve_edges(capabilities: &[f64], edges: &[ConverterEdge]) -> Result<PowerFlowSolution> {
    let lp = build_flow_lp(capabilities, edges)?;
    let first = expect_optimal(lp::solve(&lp)?, "power-flow")?;
    let current = first.values[0];
    let e = edges.len();

    let n = capabilities.len();
    let mut flows = first.values[1..1 + e].to_vec();
    let mut battery_powers = first.values[1 + e..1 + e + n].to_vec();
    if e > 0 {
        let cleanup = build_min_processing_lp(capabilities, edges, current);
        match lp::solve(&cleanup) {
            Ok(sol) if sol.is_optimal() => {
                flows = (0..e).map(|k| sol.values[1 + k] - sol.values[1 + e + k]).collect();
                battery_powers = sol.values[1 + 2 * e..1 + 2 * e + n].to_vec();
            }
            other => log::debug!("processed-power cleanup fell back to first-stage flows: {other:?}"),
        }
    }

    let solution = PowerFlowSolution {
        string_current: current,
        processed_power: flows.iter().map(|f| f.abs()).sum(),
        converter_flows: flows,
        battery_powers,
        output_power: n as f64 * current,
    };
    verify_flow(capabilities, edges, &solution)?;
    Ok(solution)
}

/// Checks conservation, capability and rating limits of a solution.
pub fn verify_flow(capabilities: &[f64], edges: &[ConverterEdge], sol: &PowerFlowSolution) -> Result<()> {
    if sol.converter_flows.len() != edges.len() || sol.battery_powers.len() != capabilities.len() {
        return Err(Error::internal("flow solution has the wrong shape"));
    }
    if sol.string_current < -FLOW_TOL {
        return Err(Error::internal(format!("negative string current {}", sol.string_current)));
    }
    for (j, (&p, &cap)) in sol.battery_powers.iter().zip(capabilities).enumerate() {
        let net: f64 = edges
            .iter()
            .zip(&sol.converter_flows)
            .map(|(edge, f)| edge_sign(j, edge) * f)
            .sum();
        let residual = (p - sol.string_current - net).abs();
        if residual > FLOW_TOL {
            return Err(Error::internal(format!("conservation residual {residual:e} at battery {j}")));
        }
        if p.abs() > cap + FLOW_TOL {
            return Err(Error::internal(format!("battery {j} power {p} exceeds capability {cap}")));
        }
    }
    for (k, (edge, f)) in edges.iter().zip(&sol.converter_flows).enumerate() {
        if f.abs() > edge.rating + FLOW_TOL {
            return Err(Error::internal(format!(
                "edge {k} flow {f} exceeds rating {}",
                edge.rating
            )));
        }
    }
    let processed: f64 = sol.converter_flows.iter().map(|f| f.abs()).sum();
    if (processed - sol.processed_power).abs() > FLOW_TOL {
        return Err(Error::internal("processed power does not match the flows"));
    }
    Ok(())
}

/// Optimal power flow of an architecture for one concrete battery string.
pub fn optimal_flow(capabilities: &[f64], arch: &Architecture) -> Result<PowerFlowSolution> {
    arch.validate()?;
    if capabilities.len() != arch.batteries {
        return Err(Error::param(format!(
            "{} capabilities for a {}-battery architecture",
            capabilities.len(),
            arch.batteries
        )));
    }
    match &arch.topology {
        // with no converters installed the batteries form a bare series string
        Topology::Fpp { rating } if *rating == 0.0 => solve_edges(capabilities, &[]),
        Topology::Fpp { rating } => fpp_flow(capabilities, *rating),
        _ => solve_edges(capabilities, &arch.battery_edges()),
    }
}

/// Full processing: every battery feeds the bus through its own converter.
pub fn fpp_flow(capabilities: &[f64], rating: f64) -> Result<PowerFlowSolution> {
    check_inputs(capabilities, &[])?;
    let delivered: Vec<f64> = capabilities.iter().map(|&p| p.min(rating)).collect();
    let output: f64 = delivered.iter().sum();
    Ok(PowerFlowSolution {
        string_current: 0.0,
        converter_flows: delivered.clone(),
        battery_powers: delivered,
        output_power: output,
        processed_power: output,
    })
}

/// Layer-1 sizing LP on the expected set: flows are unbounded and the
/// minimum processed power of each edge at maximum output becomes its
/// design value `p*`. Returns `(p*, P_out)`.
pub fn layer1_design_lp(expected: &[f64], edges: &[(usize, usize)]) -> Result<(Vec<f64>, f64)> {
    if expected.len() >= 2 && edges.len() > expected.len() - 1 {
        return Err(Error::param(format!(
            "{} Layer-1 edges exceed N − 1 = {}",
            edges.len(),
            expected.len() - 1
        )));
    }
    let unrated: Vec<ConverterEdge> = edges
        .iter()
        .map(|&(a, b)| ConverterEdge::new(a, b, f64::INFINITY))
        .collect();
    let sol = solve_edges(expected, &unrated)?;
    let processed = sol.converter_flows.iter().map(|f| f.abs()).collect();
    Ok((processed, sol.output_power))
}
