//! Weighted proportional-fairness DL scheduling.
//!
//! Stations are weighted by `exp(-z)` of the z-score of their delivered bytes,
//! ranked by weighted log-utility per byte and admitted greedily until the
//! byte budget of the TXOP is spent. Logs are natural; the base only rescales
//! the objective and leaves both the ranking and the exact optimum unchanged.

use thiserror::Error;

/// Exhaustive search cap for [`exact_knapsack`].
pub const EXACT_KNAPSACK_MAX: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SchedError {
    #[error("exact knapsack supports at most {EXACT_KNAPSACK_MAX} candidates, got {0}")]
    TooManyCandidates(usize),
}

/// Population z-scores; all zero when the values have no spread.
pub fn zscore(values: &[f64]) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    if sd == 0.0 || !sd.is_finite() {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - mean) / sd).collect()
}

pub fn weight(z: f64) -> f64 {
    (-z).exp()
}

/// `w · ln(b) / b`; callers only pass eligible backlogs (`b ≥ 1`).
pub fn utility_per_byte(w: f64, backlog: u64) -> f64 {
    let b = backlog as f64;
    w * b.ln() / b
}

/// Shannon-Hartley byte capacity of `time_budget` seconds at `ref_snr`.
pub fn byte_budget(bandwidth: f64, ref_snr: f64, time_budget: f64) -> u64 {
    if !(time_budget > 0.0) || !(ref_snr > 0.0) {
        return 0;
    }
    (bandwidth * (1.0 + ref_snr).log2() * time_budget / 8.0).floor() as u64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommCandidate {
    pub id: usize,
    pub bytes_received: u64,
    pub backlog: u64,
    pub weight: f64,
    pub utility_per_byte: f64,
}

/// Weights every available station by the z-score of its delivered bytes and
/// keeps the ones with at least one byte waiting.
///
/// `available` holds `(id, bytes_received, backlog)`.
pub fn build_candidates(available: &[(usize, u64, u64)]) -> Vec<CommCandidate> {
    let received: Vec<f64> = available.iter().map(|&(_, r, _)| r as f64).collect();
    let z = zscore(&received);
    available
        .iter()
        .zip(z)
        .filter(|(&(_, _, backlog), _)| backlog >= 1)
        .map(|(&(id, bytes_received, backlog), z)| {
            let w = weight(z);
            CommCandidate { id, bytes_received, backlog, weight: w, utility_per_byte: utility_per_byte(w, backlog) }
        })
        .collect()
}

/// Byte allowance of one communications TXOP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ByteBudget {
    pub limit: u64,
    /// Goes negative once the overflowing station is admitted.
    pub remaining: i64,
}

impl ByteBudget {
    pub fn new(limit: u64) -> Self {
        Self { limit, remaining: i64::try_from(limit).unwrap_or(i64::MAX) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grant {
    pub id: usize,
    pub bytes: u64,
}

/// Sorts candidates by `ψ` descending (ties to the lower id).
pub fn rank_by_utility(candidates: &[CommCandidate]) -> Vec<CommCandidate> {
    let mut order = candidates.to_vec();
    order.sort_by(|a, b| b.utility_per_byte.total_cmp(&a.utility_per_byte).then(a.id.cmp(&b.id)));
    order
}

/// Greedy admission in ψ order. Each station is added and its backlog
/// subtracted; the loop stops right after the budget goes negative. The
/// station that overflows stays selected but is granted only what was left.
pub fn select_comm_stas(candidates: &[CommCandidate], budget: &mut ByteBudget) -> Vec<Grant> {
    admit_in_order(&rank_by_utility(candidates), budget)
}

/// Same add-then-check admission over a caller-supplied order.
pub fn admit_in_order(order: &[CommCandidate], budget: &mut ByteBudget) -> Vec<Grant> {
    let mut grants = Vec::new();
    for c in order {
        let before = budget.remaining;
        budget.remaining = before.saturating_sub(i64::try_from(c.backlog).unwrap_or(i64::MAX));
        if budget.remaining < 0 {
            grants.push(Grant { id: c.id, bytes: before.max(0) as u64 });
            break;
        }
        grants.push(Grant { id: c.id, bytes: c.backlog });
    }
    grants
}

/// `Σ w · ln(b^x)` over the selected candidates.
pub fn weighted_pf_objective(selected: &[CommCandidate]) -> f64 {
    selected.iter().map(|c| c.weight * (c.backlog as f64).ln()).sum()
}

/// Optimal subset under the strict constraint `Σ b^x ≤ limit`, by enumeration.
/// Returns the selected candidate ids (ascending) and the objective.
pub fn exact_knapsack(candidates: &[CommCandidate], limit: u64) -> Result<(Vec<usize>, f64), SchedError> {
    let n = candidates.len();
    if n > EXACT_KNAPSACK_MAX {
        return Err(SchedError::TooManyCandidates(n));
    }
    let mut best_mask = 0u32;
    let mut best_value = 0.0;
    for mask in 1u32..(1u32 << n) {
        let mut bytes = 0u64;
        let mut value = 0.0;
        for (i, c) in candidates.iter().enumerate() {
            if mask & (1 << i) != 0 {
                bytes = bytes.saturating_add(c.backlog);
                value += c.weight * (c.backlog as f64).ln();
            }
        }
        if bytes <= limit && value > best_value {
            best_value = value;
            best_mask = mask;
        }
    }
    let mut ids: Vec<usize> =
        (0..n).filter(|i| best_mask & (1 << i) != 0).map(|i| candidates[i].id).collect();
    ids.sort_unstable();
    Ok((ids, best_value))
}

/// `(Σx)² / (n Σx²)`; an all-zero (or empty) allocation counts as fair.
pub fn jain_index(values: &[f64]) -> f64 {
    let sum: f64 = values.iter().sum();
    let sq: f64 = values.iter().map(|v| v * v).sum();
    if sq == 0.0 {
        return 1.0;
    }
    sum * sum / (values.len() as f64 * sq)
}
