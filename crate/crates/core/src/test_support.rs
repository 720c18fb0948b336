//! Helpers shared by the unit tests of several modules.

use crate::flow::FlowMatrix;

/// The stationary three-agent economy with outflow fractions
/// a = 0.1, b = 0.3, k = 0.7, rounded to four decimals.
pub(crate) fn three_agent_reference() -> FlowMatrix {
    FlowMatrix::from_entries(vec![
        vec![0.0, 0.1235, 1.1118],
        vec![0.3516, 0.0, 0.1507],
        vec![0.8837, 0.3787, 0.0],
    ])
    .unwrap()
}

/// Deterministic pseudo-random flow matrix for identity sweeps.
///
/// Mixes dense, sparse, and savings-heavy cases depending on the seed while
/// always keeping at least one off-diagonal entry positive.
pub(crate) fn random_flow_matrix(n: usize, seed: u64) -> FlowMatrix {
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
    let mut next = move || {
        // xorshift64*
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        (state.wrapping_mul(0x2545f4914f6cdd1d) >> 11) as f64 / (1u64 << 53) as f64
    };
    let sparsity = match seed % 3 {
        0 => 0.0,
        1 => 0.4,
        _ => 0.7,
    };
    let savings_scale = if seed.is_multiple_of(5) { 50.0 } else { 1.0 };
    let with_savings = seed.is_multiple_of(2);
    let mut entries = vec![vec![0.0; n]; n];
    for (j, row) in entries.iter_mut().enumerate() {
        for (k, slot) in row.iter_mut().enumerate() {
            let drop = next() < sparsity;
            let v = next() * 2.0;
            if j == k {
                *slot = if with_savings { v * savings_scale } else { 0.0 };
            } else if !drop {
                *slot = v;
            }
        }
    }
    // Keep the marginals defined.
    if entries
        .iter()
        .enumerate()
        .all(|(j, row)| row.iter().enumerate().all(|(k, &v)| j == k || v == 0.0))
    {
        entries[0][n - 1] = 1.0;
    }
    FlowMatrix::from_entries(entries).unwrap()
}
