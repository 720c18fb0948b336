//! The cash-flow matrix and the probability objects derived from it:
//! the global flow distribution, the savings split, the per-agent
//! inflow/outflow marginals, and the row/column conditional distributions.
//!
//! Convention: entry `[j][k]` is the flow from source agent `j` (row) to
//! destination agent `k` (column); the diagonal holds savings.

use crate::entropy::shannon_bits;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("flow matrix must have at least one agent")]
    Empty,
    #[error("flow matrix row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("{agents} agent ids for a {dim}x{dim} matrix")]
    AgentCountMismatch { agents: usize, dim: usize },
    #[error("agent id at index {0} is empty")]
    EmptyAgentId(usize),
    #[error("duplicate agent id `{0}`")]
    DuplicateAgent(String),
    #[error("flow from `{from}` to `{to}` is negative: {value}")]
    NegativeFlow {
        from: String,
        to: String,
        value: f64,
    },
    #[error("flow from `{from}` to `{to}` is not finite: {value}")]
    NonFiniteFlow {
        from: String,
        to: String,
        value: f64,
    },
    #[error("total cash flow must be positive")]
    ZeroTotalFlow,
    #[error("no inter-agent cash flow: all flows are savings")]
    ZeroInterAgentFlow,
}

/// An N×N matrix of non-negative cash flows between named agents.
///
/// Valid by construction: square, finite, non-negative, with positive total.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMatrix {
    agents: Vec<String>,
    entries: Vec<Vec<f64>>,
}

impl FlowMatrix {
    pub fn new(agents: Vec<String>, entries: Vec<Vec<f64>>) -> Result<Self, FlowError> {
        let n = entries.len();
        if n == 0 {
            return Err(FlowError::Empty);
        }
        if agents.len() != n {
            return Err(FlowError::AgentCountMismatch {
                agents: agents.len(),
                dim: n,
            });
        }
        for (i, id) in agents.iter().enumerate() {
            if id.is_empty() {
                return Err(FlowError::EmptyAgentId(i));
            }
            if agents[..i].contains(id) {
                return Err(FlowError::DuplicateAgent(id.clone()));
            }
        }
        for (j, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(FlowError::NotSquare {
                    row: j,
                    len: row.len(),
                    expected: n,
                });
            }
            for (k, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(FlowError::NonFiniteFlow {
                        from: agents[j].clone(),
                        to: agents[k].clone(),
                        value: v,
                    });
                }
                if v < 0.0 {
                    return Err(FlowError::NegativeFlow {
                        from: agents[j].clone(),
                        to: agents[k].clone(),
                        value: v,
                    });
                }
            }
        }
        let total: f64 = entries.iter().flatten().sum();
        if total <= 0.0 {
            return Err(FlowError::ZeroTotalFlow);
        }
        Ok(Self { agents, entries })
    }

    /// Builds a matrix with generated agent ids `a1..aN`.
    pub fn from_entries(entries: Vec<Vec<f64>>) -> Result<Self, FlowError> {
        let agents = (1..=entries.len()).map(|i| format!("a{i}")).collect();
        Self::new(agents, entries)
    }

    pub fn agent_count(&self) -> usize {
        self.entries.len()
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn entry(&self, from: usize, to: usize) -> f64 {
        self.entries[from][to]
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().flatten().sum()
    }

    /// Sum of the diagonal (savings) entries.
    pub fn savings_total(&self) -> f64 {
        (0..self.agent_count()).map(|j| self.entries[j][j]).sum()
    }

    /// Sum of the off-diagonal (inter-agent) entries.
    pub fn interagent_total(&self) -> f64 {
        let mut s = 0.0;
        for (j, row) in self.entries.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                if j != k {
                    s += v;
                }
            }
        }
        s
    }

    /// The global flow distribution: each entry divided by the grand total.
    pub fn probability_matrix(&self) -> ProbabilityMatrix {
        let total = self.total();
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().map(|v| v / total).collect())
            .collect();
        ProbabilityMatrix { entries }
    }

    /// Splits total probability into the savings share and the inter-agent share.
    pub fn savings_split(&self) -> SavingsSplit {
        let savings_prob = self.savings_total() / self.total();
        SavingsSplit {
            savings_prob,
            interagent_prob: 1.0 - savings_prob,
        }
    }

    /// Per-agent inflow/outflow totals and their normalizations, savings excluded.
    ///
    /// Fails when the matrix has no inter-agent flow at all: the marginal
    /// probabilities are then undefined.
    pub fn marginals(&self) -> Result<FlowMarginals, FlowError> {
        let n = self.agent_count();
        let mut out_flows = vec![0.0; n];
        let mut in_flows = vec![0.0; n];
        for (j, row) in self.entries.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                if j != k {
                    out_flows[j] += v;
                    in_flows[k] += v;
                }
            }
        }
        let total: f64 = out_flows.iter().sum();
        if total <= 0.0 {
            return Err(FlowError::ZeroInterAgentFlow);
        }
        let out_probs = out_flows.iter().map(|c| c / total).collect();
        let in_probs = in_flows.iter().map(|c| c / total).collect();
        Ok(FlowMarginals {
            out_flows,
            in_flows,
            out_probs,
            in_probs,
        })
    }

    /// Row and column conditional distributions over destinations/sources.
    ///
    /// An agent with no outflow (or inflow) gets `None` instead of a
    /// distribution; the diagonal of every defined conditional is exactly 0.
    pub fn conditionals(&self) -> ConditionalFlows {
        let n = self.agent_count();
        let mut row_conditionals = Vec::with_capacity(n);
        for j in 0..n {
            let c_out: f64 = (0..n).filter(|&k| k != j).map(|k| self.entries[j][k]).sum();
            if c_out > 0.0 {
                let dist = (0..n)
                    .map(|k| {
                        if k == j {
                            0.0
                        } else {
                            self.entries[j][k] / c_out
                        }
                    })
                    .collect();
                row_conditionals.push(Some(dist));
            } else {
                row_conditionals.push(None);
            }
        }
        let mut col_conditionals = Vec::with_capacity(n);
        for k in 0..n {
            let c_in: f64 = (0..n).filter(|&j| j != k).map(|j| self.entries[j][k]).sum();
            if c_in > 0.0 {
                let dist = (0..n)
                    .map(|j| {
                        if j == k {
                            0.0
                        } else {
                            self.entries[j][k] / c_in
                        }
                    })
                    .collect();
                col_conditionals.push(Some(dist));
            } else {
                col_conditionals.push(None);
            }
        }
        ConditionalFlows {
            row_conditionals,
            col_conditionals,
        }
    }

    /// Flat entropy in bits of the whole flow matrix, savings included.
    pub fn total_entropy(&self) -> f64 {
        shannon_bits(self.entries.iter().flatten().copied(), self.total())
    }
}

/// The flow matrix normalized by its grand total; entries sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    entries: Vec<Vec<f64>>,
}

impl ProbabilityMatrix {
    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn entry(&self, from: usize, to: usize) -> f64 {
        self.entries[from][to]
    }
}

/// Aggregate probability of savings vs inter-agent flows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SavingsSplit {
    pub savings_prob: f64,
    pub interagent_prob: f64,
}

/// Per-agent off-diagonal row/column sums and their normalizations.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMarginals {
    /// Aggregate outflow per source agent, savings excluded.
    pub out_flows: Vec<f64>,
    /// Aggregate inflow per destination agent, savings excluded.
    pub in_flows: Vec<f64>,
    /// `out_flows` normalized by total inter-agent flow.
    pub out_probs: Vec<f64>,
    /// `in_flows` normalized by total inter-agent flow.
    pub in_probs: Vec<f64>,
}

/// Destination distribution per source agent and source distribution per
/// destination agent; `None` marks agents with no outflow (or inflow).
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalFlows {
    pub row_conditionals: Vec<Option<Vec<f64>>>,
    pub col_conditionals: Vec<Option<Vec<f64>>>,
}
