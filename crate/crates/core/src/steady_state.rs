//! Stationarity machinery: flow-balance checks, the left fixed-point test,
//! exact two- and three-agent economy constructors, and a seeded generator
//! of random flow-balanced matrices for property testing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::flow::{FlowError, FlowMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SteadyStateError {
    #[error("parameter {name} = {value} is outside {range}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("agent count must be at least 2, got {0}")]
    TooFewAgents(usize),
    #[error("singular parameter system (det = {det:.3e})")]
    SingularSystem { det: f64 },
    #[error("infeasible parameters: implied outflow of agent {agent} is {value}")]
    InfeasibleParameters { agent: usize, value: f64 },
    #[error("constructed matrix failed the balance check (imbalance {imbalance:.3e})")]
    BalanceCheckFailed { imbalance: f64 },
    #[error("matrix balancing did not converge within {iterations} iterations; the sparsity pattern may make balance unreachable")]
    UnreachableBalance { iterations: usize },
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// Result of [`check_stationarity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityCheck {
    /// `max_j |c^j − c_j| / max(c^j, c_j)` over all agents.
    pub max_relative_imbalance: f64,
    /// Whether the imbalance is within the requested tolerance.
    pub is_stationary: bool,
    /// L∞ norm of `p·P − p` for the outflow shares `p` under the
    /// row-conditional transition matrix `P`.
    pub fixed_point_residual: f64,
}

/// Floor keeping the relative imbalance defined for isolated agents.
const IMBALANCE_FLOOR: f64 = 1e-300;

fn max_relative_imbalance(out_flows: &[f64], in_flows: &[f64]) -> f64 {
    out_flows
        .iter()
        .zip(in_flows)
        .map(|(&o, &i)| (o - i).abs() / o.max(i).max(IMBALANCE_FLOOR))
        .fold(0.0, f64::max)
}

/// Measures how far an economy is from per-agent flow balance `c^j = c_j`
/// and how far its outflow shares are from being a left fixed point of the
/// row-conditional transition matrix.
pub fn check_stationarity(
    m: &FlowMatrix,
    tolerance: f64,
) -> Result<StationarityCheck, SteadyStateError> {
    let marg = m.marginals()?;
    let imbalance = max_relative_imbalance(&marg.out_flows, &marg.in_flows);
    let cond = m.conditionals();
    let n = m.agent_count();
    let mut residual = 0.0f64;
    for k in 0..n {
        let mut propagated = 0.0;
        for j in 0..n {
            if let Some(row) = &cond.row_conditionals[j] {
                propagated += marg.out_probs[j] * row[k];
            }
        }
        residual = residual.max((propagated - marg.out_probs[k]).abs());
    }
    Ok(StationarityCheck {
        max_relative_imbalance: imbalance,
        is_stationary: imbalance <= tolerance,
        fixed_point_residual: residual,
    })
}

/// Savings levels of the two agents, measured relative to the unit
/// cross-flows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoAgentParams {
    a: f64,
    b: f64,
}

impl TwoAgentParams {
    pub fn new(a: f64, b: f64) -> Result<Self, SteadyStateError> {
        for (name, value) in [("a", a), ("b", b)] {
            if !value.is_finite() || value < 0.0 {
                return Err(SteadyStateError::InvalidParameter {
                    name,
                    value,
                    range: "[0, ∞)",
                });
            }
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// The two-agent economy `[[a, 1], [1, b]]`: savings on the diagonal, unit
/// cross-flows. Always flow-balanced.
pub fn build_two_agent(p: &TwoAgentParams) -> FlowMatrix {
    FlowMatrix::new(
        vec!["a1".into(), "a2".into()],
        vec![vec![p.a, 1.0], vec![1.0, p.b]],
    )
    .expect("two-agent matrix with unit cross-flows is always valid")
}

/// Outflow fractions of the savings-free three-agent economy:
/// `a = c^1_2/c^1`, `b = c^2_3/c^2`, `k = c^3_1/c^3`.
///
/// Boundary values (0 or 1) are accepted but may make the implied economy
/// degenerate; construction reports that as an infeasibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeAgentParams {
    a: f64,
    b: f64,
    k: f64,
}

impl ThreeAgentParams {
    pub fn new(a: f64, b: f64, k: f64) -> Result<Self, SteadyStateError> {
        for (name, value) in [("a", a), ("b", b), ("k", k)] {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(SteadyStateError::InvalidParameter {
                    name,
                    value,
                    range: "[0, 1]",
                });
            }
        }
        Ok(Self { a, b, k })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Builds the stationary savings-free three-agent economy for the given
/// outflow fractions.
///
/// The per-agent outflows `c^j` solve the linear system encoding the two
/// balance constraints and the normalization `c^1 + c^2 + c^3 = 3` (mean
/// income of one); the system is solved in closed form by Cramer's rule,
/// and the balance of the constructed matrix is verified before returning.
pub fn build_three_agent(p: &ThreeAgentParams) -> Result<FlowMatrix, SteadyStateError> {
    let (a, b, k) = (p.a, p.b, p.k);
    let system = [[-1.0, 1.0 - b, k], [a, -1.0, 1.0 - k], [1.0, 1.0, 1.0]];
    let rhs = [0.0, 0.0, 3.0];
    let det = det3(&system);
    if det.abs() < 1e-12 {
        return Err(SteadyStateError::SingularSystem { det });
    }
    let mut outflows = [0.0; 3];
    for (i, out) in outflows.iter_mut().enumerate() {
        let mut replaced = system;
        for row in 0..3 {
            replaced[row][i] = rhs[row];
        }
        *out = det3(&replaced) / det;
    }
    for (i, &c) in outflows.iter().enumerate() {
        if c <= 0.0 {
            return Err(SteadyStateError::InfeasibleParameters {
                agent: i + 1,
                value: c,
            });
        }
    }
    let [c1, c2, c3] = outflows;
    let entries = vec![
        vec![0.0, a * c1, (1.0 - a) * c1],
        vec![(1.0 - b) * c2, 0.0, b * c2],
        vec![k * c3, (1.0 - k) * c3, 0.0],
    ];
    let m = FlowMatrix::new(vec!["a1".into(), "a2".into(), "a3".into()], entries)?;
    // The system rows are the balance constraints; verify they actually
    // carried through to the constructed matrix.
    let marg = m.marginals()?;
    let imbalance = max_relative_imbalance(&marg.out_flows, &marg.in_flows);
    if imbalance > 1e-9 {
        return Err(SteadyStateError::BalanceCheckFailed { imbalance });
    }
    Ok(m)
}

/// Iteration cap for the row/column balancing loop.
const BALANCE_MAX_ITERATIONS: usize = 10_000;

/// Imbalance at which the balancing loop stops.
const BALANCE_TOLERANCE: f64 = 1e-12;

/// Generates a random zero-diagonal flow matrix with `c^j = c_j` for every
/// agent, deterministically from the seed.
///
/// A random positive matrix supported on a union of cyclic shift-diagonals
/// (the shift-by-one cycle always included, further shifts thinned per
/// `sparsity`) is scaled by iterative proportional fitting until every row
/// and column sums to one. Each shift-diagonal is a derangement, so every
/// retained entry lies on a positive permutation; that keeps the balancing
/// problem feasible and the iteration geometric for any sparsity pattern.
pub fn random_stationary(
    n: usize,
    seed: u64,
    sparsity: f64,
) -> Result<FlowMatrix, SteadyStateError> {
    if n < 2 {
        return Err(SteadyStateError::TooFewAgents(n));
    }
    if !(0.0..1.0).contains(&sparsity) {
        return Err(SteadyStateError::InvalidParameter {
            name: "sparsity",
            value: sparsity,
            range: "[0, 1)",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shifts: Vec<usize> = (1..n)
        .filter(|&d| d == 1 || rng.random::<f64>() >= sparsity)
        .collect();
    let mut entries = vec![vec![0.0; n]; n];
    for j in 0..n {
        for &d in &shifts {
            entries[j][(j + d) % n] = rng.random_range(0.1..1.1);
        }
    }

    for _ in 0..BALANCE_MAX_ITERATIONS {
        for row in entries.iter_mut() {
            let row_sum: f64 = row.iter().sum();
            for v in row.iter_mut() {
                *v /= row_sum;
            }
        }
        for k in 0..n {
            let col_sum: f64 = (0..n).map(|j| entries[j][k]).sum();
            for row in entries.iter_mut() {
                row[k] /= col_sum;
            }
        }
        let row_sums: Vec<f64> = entries.iter().map(|r| r.iter().sum()).collect();
        let col_sums: Vec<f64> = (0..n).map(|k| entries.iter().map(|r| r[k]).sum()).collect();
        if max_relative_imbalance(&row_sums, &col_sums) <= BALANCE_TOLERANCE {
            let agents = (1..=n).map(|i| format!("a{i}")).collect();
            return Ok(FlowMatrix::new(agents, entries)?);
        }
    }
    Err(SteadyStateError::UnreachableBalance {
        iterations: BALANCE_MAX_ITERATIONS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{differential_balance, full_report};
    use crate::test_support::three_agent_reference;

    #[test]
    fn reference_matrix_is_stationary_at_print_precision() {
        let check = check_stationarity(&three_agent_reference(), 1e-3).unwrap();
        assert!(check.is_stationary);
        assert!(check.max_relative_imbalance < 1e-3);
    }

    #[test]
    fn unbalanced_cross_flows_are_flagged() {
        let m = FlowMatrix::from_entries(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        let check = check_stationarity(&m, 1e-6).unwrap();
        assert!(!check.is_stationary);
        assert_eq!(check.max_relative_imbalance, 0.5);
    }

    #[test]
    fn balanced_cycle_has_zero_residual() {
        let m = FlowMatrix::from_entries(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let check = check_stationarity(&m, 1e-12).unwrap();
        assert_eq!(check.max_relative_imbalance, 0.0);
        assert_eq!(check.fixed_point_residual, 0.0);
        assert!(check.is_stationary);
    }

    #[test]
    fn stationarity_check_requires_interagent_flow() {
        let m = FlowMatrix::from_entries(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            check_stationarity(&m, 1e-9).unwrap_err(),
            SteadyStateError::Flow(FlowError::ZeroInterAgentFlow)
        ));
    }

    #[test]
    fn two_agent_symmetric_savings() {
        let m = build_two_agent(&TwoAgentParams::new(1.0, 1.0).unwrap());
        let (report, _) = full_report(&m);
        assert_eq!(report.savings_prob, 0.5);
        assert_eq!(report.savings_entropy, Some(1.0));
        assert_eq!(report.savings_split_entropy, 1.0);
    }

    #[test]
    fn two_agent_without_savings() {
        let m = build_two_agent(&TwoAgentParams::new(0.0, 0.0).unwrap());
        let (report, _) = full_report(&m);
        assert_eq!(report.interagent_prob, 1.0);
        assert_eq!(report.total_entropy, 1.0);
    }

    #[test]
    fn two_agent_asymmetric_savings() {
        let m = build_two_agent(&TwoAgentParams::new(3.0, 1.0).unwrap());
        let (report, _) = full_report(&m);
        assert!((report.savings_prob - 2.0 / 3.0).abs() < 1e-15);
        // Binary entropy at (0.75, 0.25), straight from the definition.
        let oracle = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((report.savings_entropy.unwrap() - oracle).abs() < 1e-15);
    }

    #[test]
    fn two_agent_params_reject_negatives() {
        assert!(matches!(
            TwoAgentParams::new(-0.1, 1.0).unwrap_err(),
            SteadyStateError::InvalidParameter { name: "a", .. }
        ));
        assert!(TwoAgentParams::new(0.0, f64::NAN).is_err());
    }

    #[test]
    fn three_agent_reproduces_reference_entries() {
        let m = build_three_agent(&ThreeAgentParams::new(0.1, 0.3, 0.7).unwrap()).unwrap();
        let printed = [
            [0.0, 0.1235, 1.1118],
            [0.3516, 0.0, 0.1507],
            [0.8837, 0.3787, 0.0],
        ];
        for (j, row) in printed.iter().enumerate() {
            for (k, &expected) in row.iter().enumerate() {
                assert!(
                    (m.entry(j, k) - expected).abs() < 5e-4,
                    "entry ({j},{k}): {} vs {expected}",
                    m.entry(j, k)
                );
            }
        }
    }

    #[test]
    fn three_agent_symmetric_parameters() {
        let m = build_three_agent(&ThreeAgentParams::new(0.5, 0.5, 0.5).unwrap()).unwrap();
        for j in 0..3 {
            let row_sum: f64 = m.entries()[j].iter().sum();
            assert!((row_sum - 1.0).abs() < 1e-12);
            for k in 0..3 {
                if j != k {
                    assert!((m.entry(j, k) - 0.5).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)] // in-place elimination wants indices
    fn three_agent_matches_independent_elimination() {
        // Solve the same linear system by Gaussian elimination with partial
        // pivoting, independent of the Cramer path.
        let (a, b, k) = (0.2, 0.6, 0.4);
        let mut aug: [[f64; 4]; 3] = [
            [-1.0, 1.0 - b, k, 0.0],
            [a, -1.0, 1.0 - k, 0.0],
            [1.0, 1.0, 1.0, 3.0],
        ];
        for col in 0..3 {
            let pivot = (col..3)
                .max_by(|&r, &s| aug[r][col].abs().total_cmp(&aug[s][col].abs()))
                .unwrap();
            aug.swap(col, pivot);
            for row in (col + 1)..3 {
                let f = aug[row][col] / aug[col][col];
                for c in col..4 {
                    aug[row][c] -= f * aug[col][c];
                }
            }
        }
        let mut oracle = [0.0; 3];
        for row in (0..3).rev() {
            let mut rhs = aug[row][3];
            for c in (row + 1)..3 {
                rhs -= aug[row][c] * oracle[c];
            }
            oracle[row] = rhs / aug[row][row];
        }

        let m = build_three_agent(&ThreeAgentParams::new(a, b, k).unwrap()).unwrap();
        let marg = m.marginals().unwrap();
        for ((out, expect), inflow) in marg.out_flows.iter().zip(&oracle).zip(&marg.in_flows) {
            assert!((out - expect).abs() < 1e-10);
            assert!((out - inflow).abs() < 1e-12);
        }
        let total: f64 = marg.out_flows.iter().sum();
        assert!((total - 3.0).abs() < 1e-12);
    }

    #[test]
    fn three_agent_rejects_infeasible_corner() {
        // a = 1, b = 0 forces agent 3's outflow to zero.
        let err = build_three_agent(&ThreeAgentParams::new(1.0, 0.0, 0.5).unwrap()).unwrap_err();
        assert!(matches!(
            err,
            SteadyStateError::InfeasibleParameters { agent: 3, .. }
        ));
    }

    #[test]
    fn three_agent_params_reject_out_of_range() {
        assert!(ThreeAgentParams::new(1.2, 0.5, 0.5).is_err());
        assert!(ThreeAgentParams::new(0.5, -0.1, 0.5).is_err());
        assert!(ThreeAgentParams::new(0.5, 0.5, f64::INFINITY).is_err());
    }

    #[test]
    fn random_stationary_two_agents_has_equal_cross_flows() {
        for seed in [0u64, 1, 99] {
            let m = random_stationary(2, seed, 0.0).unwrap();
            let diff = (m.entry(0, 1) - m.entry(1, 0)).abs();
            assert!(diff / m.entry(0, 1) < 1e-9);
        }
    }

    #[test]
    fn random_stationary_passes_stationarity_check() {
        let m = random_stationary(5, 42, 0.0).unwrap();
        let check = check_stationarity(&m, 1e-9).unwrap();
        assert!(check.is_stationary);
        assert!(check.fixed_point_residual <= 1e-9);
    }

    #[test]
    fn random_stationary_is_deterministic() {
        let m1 = random_stationary(6, 7, 0.3).unwrap();
        let m2 = random_stationary(6, 7, 0.3).unwrap();
        assert_eq!(m1.entries(), m2.entries());
        let m3 = random_stationary(6, 8, 0.3).unwrap();
        assert_ne!(m1.entries(), m3.entries());
    }

    #[test]
    fn random_stationary_honors_sparsity() {
        let dense = random_stationary(8, 3, 0.0).unwrap();
        let sparse = random_stationary(8, 3, 0.7).unwrap();
        let zeros = |m: &FlowMatrix| m.entries().iter().flatten().filter(|&&v| v == 0.0).count();
        assert!(zeros(&sparse) > zeros(&dense));
        assert!(check_stationarity(&sparse, 1e-9).unwrap().is_stationary);
    }

    #[test]
    fn random_stationary_rejects_bad_arguments() {
        assert!(matches!(
            random_stationary(1, 0, 0.0).unwrap_err(),
            SteadyStateError::TooFewAgents(1)
        ));
        assert!(random_stationary(4, 0, 1.0).is_err());
        assert!(random_stationary(4, 0, -0.1).is_err());
    }

    #[test]
    fn random_stationary_balances_differentials() {
        for seed in 0..20u64 {
            let n = 3 + (seed as usize % 6);
            let m = random_stationary(n, seed, 0.2).unwrap();
            let (_, profile) = full_report(&m);
            assert!(differential_balance(&profile, true).abs() <= 1e-9);
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            /// Every feasible interior parameter point yields a balanced economy.
            #[test]
            fn three_agent_interior_is_stationary(
                a in 0.01f64..0.99,
                b in 0.01f64..0.99,
                k in 0.01f64..0.99,
            ) {
                let m = build_three_agent(&ThreeAgentParams::new(a, b, k).unwrap()).unwrap();
                let check = check_stationarity(&m, 1e-9).unwrap();
                prop_assert!(check.is_stationary);
            }

            /// Two equal cross-flows carry exactly one bit regardless of savings.
            #[test]
            fn two_agent_interagent_entropy_is_one(a in 0.0f64..10.0, b in 0.0f64..10.0) {
                let m = build_two_agent(&TwoAgentParams::new(a, b).unwrap());
                let (report, _) = full_report(&m);
                prop_assert_eq!(report.interagent_entropy, Some(1.0));
            }
        }
    }
}
