//! The hierarchical entropy decomposition of a cash-flow matrix: total
//! entropy, the savings/inter-agent split, origin and destination splits
//! with per-agent entropies, the sum/difference identities, the entropy
//! differential balance, and group-tree (sector) decompositions.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::entropy::shannon_bits;
use crate::flow::{FlowError, FlowMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecompositionError {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("marginal distribution undefined: no inter-agent cash flow")]
    UndefinedMarginal,
    #[error("inconsistent group taxonomy: {0}")]
    InvalidGroupPath(String),
}

/// The scalar decomposition of one economy.
///
/// `None` marks quantities whose defining distribution carries no
/// probability mass (e.g. the savings entropy of a savings-free economy);
/// such branches enter every identity with weight zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    /// Flat entropy of all N² flow probabilities, in bits.
    pub total_entropy: f64,
    /// Binary entropy of the savings-vs-inter-agent split.
    pub savings_split_entropy: f64,
    /// Probability of a currency unit sitting in a savings flow.
    pub savings_prob: f64,
    /// Probability of a currency unit moving between agents.
    pub interagent_prob: f64,
    /// Entropy of the savings distribution across agents.
    pub savings_entropy: Option<f64>,
    /// Entropy of all inter-agent flows.
    pub interagent_entropy: Option<f64>,
    /// Entropy of the aggregate outflow shares (origin marginal).
    pub out_marginal_entropy: Option<f64>,
    /// Entropy of the aggregate inflow shares (destination marginal).
    pub in_marginal_entropy: Option<f64>,
    /// Residual of the sum identity relating the two inter-agent expansions.
    pub sum_identity_residual: Option<f64>,
    /// Residual of the difference identity (see [`identity_residuals`]).
    pub diff_identity_residual: Option<f64>,
}

/// Per-agent marginal probabilities, conditional entropies, and the
/// inflow-minus-outflow entropy differential.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentEntropy {
    pub id: String,
    /// Share of inter-agent flow leaving this agent.
    pub out_prob: Option<f64>,
    /// Share of inter-agent flow arriving at this agent.
    pub in_prob: Option<f64>,
    /// Entropy of where this agent's outgoing money goes.
    pub out_entropy: Option<f64>,
    /// Entropy of where this agent's incoming money came from.
    pub in_entropy: Option<f64>,
    /// `in_entropy − out_entropy`.
    pub differential: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentEntropyProfile {
    pub agents: Vec<AgentEntropy>,
}

/// Which marginal a group decomposition applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Income: the inflow marginal.
    In,
    /// Spending: the outflow marginal.
    Out,
}

/// A hierarchical partition of the agents into labeled groups.
///
/// Leaves are agents; internal nodes are named groups (sectors). A valid
/// tree for a matrix holds every agent in exactly one leaf.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupTree {
    root: GroupNode,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GroupNode {
    Agent(String),
    Group {
        label: String,
        children: Vec<GroupNode>,
    },
}

impl GroupTree {
    pub fn new(root: GroupNode) -> Self {
        Self { root }
    }

    /// All agents directly under a single root group.
    pub fn flat<S: AsRef<str>>(agents: &[S]) -> Self {
        Self {
            root: GroupNode::Group {
                label: "all".into(),
                children: agents
                    .iter()
                    .map(|a| GroupNode::Agent(a.as_ref().to_string()))
                    .collect(),
            },
        }
    }

    /// Builds the tree from per-agent group paths (outermost group first).
    /// Agents without a path sit directly under the root.
    ///
    /// Group labels and agent ids must not collide among siblings.
    pub fn from_group_paths(
        agents: &[(String, Option<Vec<String>>)],
    ) -> Result<Self, DecompositionError> {
        let mut root = GroupNode::Group {
            label: "all".into(),
            children: vec![],
        };
        for (id, path) in agents {
            let mut node = &mut root;
            for label in path.iter().flatten() {
                let children = match node {
                    GroupNode::Group { children, .. } => children,
                    GroupNode::Agent(_) => unreachable!("descent stops at groups"),
                };
                if children
                    .iter()
                    .any(|c| matches!(c, GroupNode::Agent(a) if a == label))
                {
                    return Err(DecompositionError::InvalidGroupPath(format!(
                        "group label `{label}` collides with an agent id at the same level"
                    )));
                }
                let pos = children
                    .iter()
                    .position(|c| matches!(c, GroupNode::Group { label: l, .. } if l == label));
                let idx = match pos {
                    Some(i) => i,
                    None => {
                        children.push(GroupNode::Group {
                            label: label.clone(),
                            children: vec![],
                        });
                        children.len() - 1
                    }
                };
                node = &mut children[idx];
            }
            let children = match node {
                GroupNode::Group { children, .. } => children,
                GroupNode::Agent(_) => unreachable!(),
            };
            if children
                .iter()
                .any(|c| matches!(c, GroupNode::Group { label, .. } if label == id))
            {
                return Err(DecompositionError::InvalidGroupPath(format!(
                    "agent id `{id}` collides with a group label at the same level"
                )));
            }
            children.push(GroupNode::Agent(id.clone()));
        }
        Ok(Self { root })
    }

    pub fn root(&self) -> &GroupNode {
        &self.root
    }

    /// Leaf agent ids in tree order.
    pub fn leaf_agents(&self) -> Vec<&str> {
        fn walk<'a>(node: &'a GroupNode, out: &mut Vec<&'a str>) {
            match node {
                GroupNode::Agent(id) => out.push(id),
                GroupNode::Group { children, .. } => {
                    for c in children {
                        walk(c, out);
                    }
                }
            }
        }
        let mut out = vec![];
        walk(&self.root, &mut out);
        out
    }
}

/// One node of a computed group decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupNodeStats {
    pub label: String,
    /// Number of agents under this node.
    pub agent_count: usize,
    /// Probability mass of this node's agents in the chosen marginal.
    pub weight: f64,
    /// Entropy over the node's children, conditional on being in the node.
    pub between_entropy: Option<f64>,
    /// Full internal entropy of the node: between-children term plus the
    /// weighted internal entropies of the children.
    pub total_entropy: Option<f64>,
    /// `ln(agent_count) − total_entropy·ln(2)`, in nats (Theil-T form).
    pub theil_index: Option<f64>,
    pub children: Vec<GroupNodeStats>,
}

/// Recursive entropy decomposition of one marginal over a group tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupDecomposition {
    pub side: Side,
    pub root: GroupNodeStats,
}

/// Inter-agent quantities shared by the report and the identity checks.
struct InterAgentStats {
    interagent_entropy: f64,
    out_marginal_entropy: f64,
    in_marginal_entropy: f64,
    out_probs: Vec<f64>,
    in_probs: Vec<f64>,
    out_entropies: Vec<Option<f64>>,
    in_entropies: Vec<Option<f64>>,
}

fn interagent_stats(m: &FlowMatrix) -> Result<InterAgentStats, FlowError> {
    let marg = m.marginals()?;
    let cond = m.conditionals();
    let n = m.agent_count();
    let interagent_total = m.interagent_total();
    let offdiag =
        (0..n).flat_map(|j| (0..n).filter_map(move |k| if j != k { Some((j, k)) } else { None }));
    let interagent_entropy = shannon_bits(offdiag.map(|(j, k)| m.entry(j, k)), interagent_total);
    let out_marginal_entropy = shannon_bits(marg.out_probs.iter().copied(), 1.0);
    let in_marginal_entropy = shannon_bits(marg.in_probs.iter().copied(), 1.0);
    let out_entropies = cond
        .row_conditionals
        .iter()
        .map(|d| d.as_ref().map(|d| shannon_bits(d.iter().copied(), 1.0)))
        .collect();
    let in_entropies = cond
        .col_conditionals
        .iter()
        .map(|d| d.as_ref().map(|d| shannon_bits(d.iter().copied(), 1.0)))
        .collect();
    Ok(InterAgentStats {
        interagent_entropy,
        out_marginal_entropy,
        in_marginal_entropy,
        out_probs: marg.out_probs,
        in_probs: marg.in_probs,
        out_entropies,
        in_entropies,
    })
}

/// `Σ weight·entropy` with undefined entropies contributing nothing (their
/// weight is zero by construction).
fn weighted_sum(weights: &[f64], entropies: &[Option<f64>]) -> f64 {
    weights
        .iter()
        .zip(entropies)
        .map(|(w, h)| w * h.unwrap_or(0.0))
        .sum()
}

/// Computes the full decomposition of one economy.
///
/// A matrix without inter-agent flow still yields a report: the savings
/// branch is populated and everything downstream of the inter-agent split
/// is marked undefined.
pub fn full_report(m: &FlowMatrix) -> (EntropyReport, AgentEntropyProfile) {
    let split = m.savings_split();
    let total_entropy = m.total_entropy();
    let savings_split_entropy = shannon_bits([split.savings_prob, split.interagent_prob], 1.0);
    let savings_entropy = if m.savings_total() > 0.0 {
        let n = m.agent_count();
        Some(shannon_bits(
            (0..n).map(|j| m.entry(j, j)),
            m.savings_total(),
        ))
    } else {
        None
    };

    match interagent_stats(m) {
        Ok(stats) => {
            let sum_residual = stats.interagent_entropy
                - ((stats.out_marginal_entropy + stats.in_marginal_entropy) / 2.0
                    + 0.5
                        * (weighted_sum(&stats.in_probs, &stats.in_entropies)
                            + weighted_sum(&stats.out_probs, &stats.out_entropies)));
            let diff_residual = (stats.in_marginal_entropy - stats.out_marginal_entropy)
                + (weighted_sum(&stats.in_probs, &stats.in_entropies)
                    - weighted_sum(&stats.out_probs, &stats.out_entropies));
            let agents = m
                .agents()
                .iter()
                .enumerate()
                .map(|(j, id)| {
                    let out_entropy = stats.out_entropies[j];
                    let in_entropy = stats.in_entropies[j];
                    AgentEntropy {
                        id: id.clone(),
                        out_prob: Some(stats.out_probs[j]),
                        in_prob: Some(stats.in_probs[j]),
                        out_entropy,
                        in_entropy,
                        differential: in_entropy.zip(out_entropy).map(|(i, o)| i - o),
                    }
                })
                .collect();
            (
                EntropyReport {
                    total_entropy,
                    savings_split_entropy,
                    savings_prob: split.savings_prob,
                    interagent_prob: split.interagent_prob,
                    savings_entropy,
                    interagent_entropy: Some(stats.interagent_entropy),
                    out_marginal_entropy: Some(stats.out_marginal_entropy),
                    in_marginal_entropy: Some(stats.in_marginal_entropy),
                    sum_identity_residual: Some(sum_residual),
                    diff_identity_residual: Some(diff_residual),
                },
                AgentEntropyProfile { agents },
            )
        }
        Err(_) => {
            let agents = m
                .agents()
                .iter()
                .map(|id| AgentEntropy {
                    id: id.clone(),
                    out_prob: None,
                    in_prob: None,
                    out_entropy: None,
                    in_entropy: None,
                    differential: None,
                })
                .collect();
            (
                EntropyReport {
                    total_entropy,
                    savings_split_entropy,
                    savings_prob: split.savings_prob,
                    interagent_prob: split.interagent_prob,
                    savings_entropy,
                    interagent_entropy: None,
                    out_marginal_entropy: None,
                    in_marginal_entropy: None,
                    sum_identity_residual: None,
                    diff_identity_residual: None,
                },
                AgentEntropyProfile { agents },
            )
        }
    }
}

/// The entropy-differential balance.
///
/// With `stationary` set, returns `Σ p^j·(H_j − H^j)`, which vanishes for
/// flow-balanced economies. Otherwise returns the general residual
/// `(H″ − H′) + Σ (p_j·H_j − p^j·H^j)`, which vanishes identically.
pub fn differential_balance(profile: &AgentEntropyProfile, stationary: bool) -> f64 {
    let out_probs: Vec<f64> = profile
        .agents
        .iter()
        .map(|a| a.out_prob.unwrap_or(0.0))
        .collect();
    let in_probs: Vec<f64> = profile
        .agents
        .iter()
        .map(|a| a.in_prob.unwrap_or(0.0))
        .collect();
    let out_entropies: Vec<Option<f64>> = profile.agents.iter().map(|a| a.out_entropy).collect();
    let in_entropies: Vec<Option<f64>> = profile.agents.iter().map(|a| a.in_entropy).collect();
    if stationary {
        weighted_sum(&out_probs, &in_entropies) - weighted_sum(&out_probs, &out_entropies)
    } else {
        let h_out = shannon_bits(out_probs.iter().copied(), 1.0);
        let h_in = shannon_bits(in_probs.iter().copied(), 1.0);
        (h_in - h_out) + weighted_sum(&in_probs, &in_entropies)
            - weighted_sum(&out_probs, &out_entropies)
    }
}

/// Residuals of the two algebraic identities tying the inter-agent entropy
/// to its origin and destination expansions:
///
/// * sum: `H_c − [(H′+H″)/2 + ½·Σ(p_j·H_j + p^j·H^j)]`
/// * difference: `(H″−H′) + Σ(p_j·H_j − p^j·H^j)`
///
/// Both vanish for every valid matrix, stationary or not.
pub fn identity_residuals(m: &FlowMatrix) -> Result<(f64, f64), DecompositionError> {
    let stats = interagent_stats(m).map_err(|_| DecompositionError::UndefinedMarginal)?;
    let sum_residual = stats.interagent_entropy
        - ((stats.out_marginal_entropy + stats.in_marginal_entropy) / 2.0
            + 0.5
                * (weighted_sum(&stats.in_probs, &stats.in_entropies)
                    + weighted_sum(&stats.out_probs, &stats.out_entropies)));
    let diff_residual = (stats.in_marginal_entropy - stats.out_marginal_entropy)
        + (weighted_sum(&stats.in_probs, &stats.in_entropies)
            - weighted_sum(&stats.out_probs, &stats.out_entropies));
    Ok((sum_residual, diff_residual))
}

/// Decomposes the chosen marginal over a group tree by recursive application
/// of the grouping identity.
///
/// The root's `total_entropy` equals the flat marginal entropy; each node's
/// `theil_index` is the Theil-T of its internal distribution, in nats.
pub fn group_decomposition(
    m: &FlowMatrix,
    tree: &GroupTree,
    side: Side,
) -> Result<GroupDecomposition, DecompositionError> {
    let leaves = tree.leaf_agents();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for id in &leaves {
        let count = seen.entry(id).or_insert(0);
        *count += 1;
        if *count > 1 {
            return Err(DecompositionError::InvalidPartition(format!(
                "agent `{id}` appears in more than one leaf"
            )));
        }
    }
    for id in m.agents() {
        if !seen.contains_key(id.as_str()) {
            return Err(DecompositionError::InvalidPartition(format!(
                "agent `{id}` missing from the tree"
            )));
        }
    }
    if leaves.len() != m.agent_count() {
        let unknown = leaves
            .iter()
            .find(|id| !m.agents().iter().any(|a| a == *id))
            .unwrap_or(&"?");
        return Err(DecompositionError::InvalidPartition(format!(
            "tree agent `{unknown}` is not in the matrix"
        )));
    }

    let marg = m
        .marginals()
        .map_err(|_| DecompositionError::UndefinedMarginal)?;
    let probs = match side {
        Side::In => &marg.in_probs,
        Side::Out => &marg.out_probs,
    };
    let masses: HashMap<&str, f64> = m
        .agents()
        .iter()
        .map(String::as_str)
        .zip(probs.iter().copied())
        .collect();

    fn node_stats(node: &GroupNode, masses: &HashMap<&str, f64>) -> GroupNodeStats {
        match node {
            GroupNode::Agent(id) => {
                let weight = masses[id.as_str()];
                let defined = if weight > 0.0 { Some(0.0) } else { None };
                GroupNodeStats {
                    label: id.clone(),
                    agent_count: 1,
                    weight,
                    between_entropy: defined,
                    total_entropy: defined,
                    theil_index: defined,
                    children: vec![],
                }
            }
            GroupNode::Group { label, children } => {
                let kids: Vec<GroupNodeStats> =
                    children.iter().map(|c| node_stats(c, masses)).collect();
                let weight: f64 = kids.iter().map(|k| k.weight).sum();
                let agent_count: usize = kids.iter().map(|k| k.agent_count).sum();
                let (between_entropy, total_entropy, theil_index) = if weight > 0.0 {
                    let between = shannon_bits(kids.iter().map(|k| k.weight), weight);
                    let total = between
                        + kids
                            .iter()
                            .map(|k| (k.weight / weight) * k.total_entropy.unwrap_or(0.0))
                            .sum::<f64>();
                    let theil =
                        ((agent_count as f64).ln() - total * std::f64::consts::LN_2).max(0.0);
                    (Some(between), Some(total), Some(theil))
                } else {
                    (None, None, None)
                };
                GroupNodeStats {
                    label: label.clone(),
                    agent_count,
                    weight,
                    between_entropy,
                    total_entropy,
                    theil_index,
                    children: kids,
                }
            }
        }
    }

    Ok(GroupDecomposition {
        side,
        root: node_stats(tree.root(), &masses),
    })
}
