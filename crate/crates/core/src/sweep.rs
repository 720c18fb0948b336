//! Parameter-sweep grids: one decomposition scalar evaluated over a
//! rectangular grid of constructed economies (heat-map data).

use thiserror::Error;

use crate::decomposition::full_report;
use crate::steady_state::{build_three_agent, build_two_agent, ThreeAgentParams, TwoAgentParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("invalid range: {0}")]
    InvalidRange(String),
}

/// A rectangular grid of computed scalars; `None` marks infeasible cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub x_name: String,
    pub y_name: String,
    pub x_values: Vec<f64>,
    pub y_values: Vec<f64>,
    /// Indexed `cells[y][x]`.
    pub cells: Vec<Vec<Option<f64>>>,
}

impl SweepGrid {
    pub fn new(
        x_name: impl Into<String>,
        y_name: impl Into<String>,
        x_values: Vec<f64>,
        y_values: Vec<f64>,
        cells: Vec<Vec<Option<f64>>>,
    ) -> Result<Self, SweepError> {
        if cells.len() != y_values.len() || cells.iter().any(|row| row.len() != x_values.len()) {
            return Err(SweepError::InvalidRange(format!(
                "cell block must be {}x{}",
                y_values.len(),
                x_values.len()
            )));
        }
        Ok(Self {
            x_name: x_name.into(),
            y_name: y_name.into(),
            x_values,
            y_values,
            cells,
        })
    }

    pub fn cell(&self, x_index: usize, y_index: usize) -> Option<f64> {
        self.cells[y_index][x_index]
    }
}

/// The scalar a two-agent sweep extracts from each cell's decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoAgentQuantity {
    /// Aggregate savings probability.
    SavingsProb,
    /// Entropy of the savings distribution (undefined without savings).
    SavingsEntropy,
    /// Binary entropy of the savings-vs-inter-agent split.
    SplitEntropy,
    /// Total cash-flow entropy.
    TotalEntropy,
}

fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    let step = (max - min) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            if i == points - 1 {
                max
            } else {
                min + step * i as f64
            }
        })
        .collect()
}

fn validate_range(
    name: &str,
    (min, max): (f64, f64),
    bounds: (f64, f64),
) -> Result<(), SweepError> {
    if !min.is_finite() || !max.is_finite() || min > max {
        return Err(SweepError::InvalidRange(format!(
            "{name} range [{min}, {max}] is not an ordered finite interval"
        )));
    }
    if min < bounds.0 || max > bounds.1 {
        return Err(SweepError::InvalidRange(format!(
            "{name} range [{min}, {max}] exceeds [{}, {}]",
            bounds.0, bounds.1
        )));
    }
    Ok(())
}

fn validate_resolution(resolution: usize) -> Result<(), SweepError> {
    if resolution < 2 {
        return Err(SweepError::InvalidRange(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    Ok(())
}

/// Evaluates one decomposition scalar of the two-agent economy over an
/// `(a, b)` savings grid.
pub fn two_agent_sweep(
    a_range: (f64, f64),
    b_range: (f64, f64),
    resolution: usize,
    quantity: TwoAgentQuantity,
) -> Result<SweepGrid, SweepError> {
    validate_range("a", a_range, (0.0, f64::MAX))?;
    validate_range("b", b_range, (0.0, f64::MAX))?;
    validate_resolution(resolution)?;
    let a_values = linspace(a_range.0, a_range.1, resolution);
    let b_values = linspace(b_range.0, b_range.1, resolution);
    let cells = b_values
        .iter()
        .map(|&b| {
            a_values
                .iter()
                .map(|&a| {
                    let params =
                        TwoAgentParams::new(a, b).expect("grid points are finite and non-negative");
                    let (report, _) = full_report(&build_two_agent(&params));
                    match quantity {
                        TwoAgentQuantity::SavingsProb => Some(report.savings_prob),
                        TwoAgentQuantity::SavingsEntropy => report.savings_entropy,
                        TwoAgentQuantity::SplitEntropy => Some(report.savings_split_entropy),
                        TwoAgentQuantity::TotalEntropy => Some(report.total_entropy),
                    }
                })
                .collect()
        })
        .collect();
    SweepGrid::new("a", "b", a_values, b_values, cells)
}

/// Evaluates the total cash-flow entropy of the three-agent economy over an
/// `(a, b)` grid at fixed `k`. Infeasible parameter points yield empty cells.
pub fn three_agent_sweep(
    k: f64,
    a_range: (f64, f64),
    b_range: (f64, f64),
    resolution: usize,
) -> Result<SweepGrid, SweepError> {
    if !k.is_finite() || k <= 0.0 || k >= 1.0 {
        return Err(SweepError::InvalidRange(format!(
            "k = {k} must lie strictly inside (0, 1)"
        )));
    }
    validate_range("a", a_range, (0.0, 1.0))?;
    validate_range("b", b_range, (0.0, 1.0))?;
    validate_resolution(resolution)?;
    let a_values = linspace(a_range.0, a_range.1, resolution);
    let b_values = linspace(b_range.0, b_range.1, resolution);
    let cells = b_values
        .iter()
        .map(|&b| {
            a_values
                .iter()
                .map(|&a| {
                    let params =
                        ThreeAgentParams::new(a, b, k).expect("grid points lie inside [0, 1]");
                    build_three_agent(&params)
                        .ok()
                        .map(|m| full_report(&m).0.total_entropy)
                })
                .collect()
        })
        .collect();
    SweepGrid::new("a", "b", a_values, b_values, cells)
}
