//! Shannon entropy primitives: normalized and un-normalized entropy in bits,
//! and the grouping identity `H = H_g + Σ p_j H_j`.

use thiserror::Error;

/// Tolerance for the sum-to-one check on [`ProbVector`].
pub const PROB_SUM_TOLERANCE: f64 = 1e-12;

/// Relative tolerance for group-weight vs member-sum consistency in
/// [`GroupedDistribution`].
pub const GROUP_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("all weights are zero")]
    AllZeroWeights,
    #[error("negative weight at index {index}: {value}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("non-finite weight at index {index}: {value}")]
    NonFiniteWeight { index: usize, value: f64 },
    #[error("group {group}: declared weight {declared} does not match member sum {member_sum}")]
    InconsistentGroupSums {
        group: usize,
        declared: f64,
        member_sum: f64,
    },
}

/// `−Σ (w/total)·log2(w/total)` over the positive weights, in bits.
///
/// Zero weights contribute nothing (`0·log2(0) = 0`). The caller guarantees
/// `total > 0`.
pub(crate) fn shannon_bits<I>(weights: I, total: f64) -> f64
where
    I: IntoIterator<Item = f64>,
{
    debug_assert!(total > 0.0);
    let mut h = 0.0;
    for w in weights {
        if w > 0.0 {
            let p = w / total;
            h -= p * p.log2();
        }
    }
    // Guard against -0.0 and roundoff just below zero for near-degenerate input.
    h.max(0.0)
}

/// A probability distribution: non-negative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    values: Vec<f64>,
}

impl ProbVector {
    pub fn new(values: Vec<f64>) -> Result<Self, EntropyError> {
        if values.is_empty() {
            return Err(EntropyError::InvalidDistribution(
                "distribution must have at least one outcome".into(),
            ));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(EntropyError::InvalidDistribution(format!(
                    "entry {i} is not finite: {v}"
                )));
            }
            if v < 0.0 {
                return Err(EntropyError::InvalidDistribution(format!(
                    "entry {i} is negative: {v}"
                )));
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(EntropyError::InvalidDistribution(format!(
                "entries sum to {sum}, expected 1"
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Non-negative weights on an arbitrary scale (e.g. currency units).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    values: Vec<f64>,
}

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self, EntropyError> {
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(EntropyError::NonFiniteWeight { index: i, value: v });
            }
            if v < 0.0 {
                return Err(EntropyError::NegativeWeight { index: i, value: v });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A weight vector partitioned into groups, carrying both the per-group
/// aggregate weights and each group's member weights.
///
/// Invariant: each group's declared weight equals the sum of its member
/// weights within [`GROUP_SUM_TOLERANCE`] (relative).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedDistribution {
    group_weights: WeightVector,
    member_weights: Vec<WeightVector>,
}

impl GroupedDistribution {
    pub fn new(
        group_weights: WeightVector,
        member_weights: Vec<WeightVector>,
    ) -> Result<Self, EntropyError> {
        if group_weights.len() != member_weights.len() {
            return Err(EntropyError::InvalidDistribution(format!(
                "{} group weights but {} member groups",
                group_weights.len(),
                member_weights.len()
            )));
        }
        for (g, members) in member_weights.iter().enumerate() {
            let declared = group_weights.values()[g];
            let member_sum = members.total();
            let scale = declared.abs().max(member_sum.abs()).max(1e-300);
            if (declared - member_sum).abs() > GROUP_SUM_TOLERANCE * scale {
                return Err(EntropyError::InconsistentGroupSums {
                    group: g,
                    declared,
                    member_sum,
                });
            }
        }
        Ok(Self {
            group_weights,
            member_weights,
        })
    }

    /// Builds the grouping from member weights alone, deriving each group's
    /// aggregate weight as the sum of its members.
    pub fn from_members(member_weights: Vec<WeightVector>) -> Self {
        let group_weights =
            WeightVector::new(member_weights.iter().map(WeightVector::total).collect())
                .expect("sums of non-negative finite weights are non-negative and finite");
        Self {
            group_weights,
            member_weights,
        }
    }

    pub fn group_weights(&self) -> &WeightVector {
        &self.group_weights
    }

    pub fn member_weights(&self) -> &[WeightVector] {
        &self.member_weights
    }
}

/// Result of [`grouped_entropy_decomposition`].
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedEntropy {
    /// Entropy of the normalized group weights (the between-group term).
    pub group_entropy: f64,
    /// Each group's internal entropy over its normalized member weights.
    pub internal_entropies: Vec<f64>,
    /// `group_entropy + Σ p_g · internal_entropies[g]`; equals the pooled
    /// entropy of all member weights.
    pub total: f64,
}

/// Shannon entropy in bits, `−Σ p_i·log2(p_i)`, with `0·log2(0) = 0`.
pub fn entropy(p: &ProbVector) -> f64 {
    shannon_bits(p.values().iter().copied(), 1.0)
}

/// Entropy of the normalized weights: `K(x) = H(x / Σx)`.
pub fn entropy_unnormalized(x: &WeightVector) -> Result<f64, EntropyError> {
    let total = x.total();
    if total <= 0.0 {
        return Err(EntropyError::AllZeroWeights);
    }
    Ok(shannon_bits(x.values().iter().copied(), total))
}

/// Splits the pooled entropy of a grouped weight vector into a between-group
/// term and probability-weighted within-group terms.
///
/// Groups with zero weight get internal entropy 0; they carry no probability
/// mass, so this is the continuous extension.
pub fn grouped_entropy_decomposition(
    g: &GroupedDistribution,
) -> Result<GroupedEntropy, EntropyError> {
    let total_weight = g.group_weights().total();
    if total_weight <= 0.0 {
        return Err(EntropyError::AllZeroWeights);
    }
    let group_entropy = shannon_bits(g.group_weights().values().iter().copied(), total_weight);
    let mut internal_entropies = Vec::with_capacity(g.member_weights().len());
    let mut total = group_entropy;
    for (gw, members) in g
        .group_weights()
        .values()
        .iter()
        .zip(g.member_weights().iter())
    {
        let member_sum = members.total();
        let internal = if member_sum > 0.0 {
            shannon_bits(members.values().iter().copied(), member_sum)
        } else {
            0.0
        };
        total += (gw / total_weight) * internal;
        internal_entropies.push(internal);
    }
    Ok(GroupedEntropy {
        group_entropy,
        internal_entropies,
        total,
    })
}
