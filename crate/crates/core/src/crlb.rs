//! Cramér-Rao bounds for UL range sensing and three-responder trilateration,
//! candidate nomination and sensing-triple selection.
//!
//! The range bound of one responder is `μ / (ω² ξ)` with
//! `μ = 3c² / (8π² η)`. For a triple the Fisher information about the target
//! position is `Ψ = Γ D Γᵀ`, where the columns of `Γ` are unit vectors from
//! each responder toward the reference position and `D = diag(ρ_j)` holds the
//! inverse range bounds. `Tr{Ψ⁻¹}` is the position bound used as the
//! selection metric.

use std::f64::consts::PI;

use thiserror::Error;

use crate::config::Position;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// A triple is degenerate when `det Ψ / (Tr Ψ)²` falls below this.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum CrlbError {
    #[error("UL SNR must be positive, got {0}")]
    NonPositiveSnr(f64),
    #[error("bandwidth must be positive, got {0}")]
    NonPositiveBandwidth(f64),
    #[error("EHT-LTF repetitions must be at least 1")]
    NoRepetitions,
    #[error("responder geometry cannot resolve a 2-D position")]
    DegenerateGeometry,
    #[error("every candidate triple is degenerate")]
    AllDegenerate,
    #[error("need at least 3 candidates, got {0}")]
    TooFewCandidates(usize),
}

pub fn mu_constant(eta: u32) -> f64 {
    3.0 * SPEED_OF_LIGHT * SPEED_OF_LIGHT / (8.0 * PI * PI * eta as f64)
}

fn check_inputs(ul_snr: f64, bandwidth: f64, eta: u32) -> Result<(), CrlbError> {
    if !(ul_snr > 0.0) {
        return Err(CrlbError::NonPositiveSnr(ul_snr));
    }
    if !(bandwidth > 0.0) {
        return Err(CrlbError::NonPositiveBandwidth(bandwidth));
    }
    if eta == 0 {
        return Err(CrlbError::NoRepetitions);
    }
    Ok(())
}

/// Range variance bound (m²) for one responder.
pub fn range_crlb(ul_snr: f64, bandwidth: f64, eta: u32) -> Result<f64, CrlbError> {
    check_inputs(ul_snr, bandwidth, eta)?;
    Ok(mu_constant(eta) / (bandwidth * bandwidth * ul_snr))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Responder {
    pub pos: Position,
    pub ul_snr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingGeometry {
    pub ref_pos: Position,
    pub stas: [Responder; 3],
    pub bandwidth: f64,
    pub eta: u32,
}

/// Symmetric 2x2 Fisher information (1/m²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherInfo2x2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl FisherInfo2x2 {
    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    /// `Tr{Ψ⁻¹}` via the closed-form 2x2 inverse.
    pub fn inverse_trace(&self) -> f64 {
        self.trace() / self.det()
    }
}

fn unit_toward(from: &Position, to: &Position) -> Result<(f64, f64), CrlbError> {
    let (dx, dy) = (to.x - from.x, to.y - from.y);
    let d = dx.hypot(dy);
    // Only the direction enters Γ; a coincident point has none.
    if !(d > 0.0) {
        return Err(CrlbError::DegenerateGeometry);
    }
    Ok((dx / d, dy / d))
}

pub fn fisher_info(geom: &SensingGeometry) -> Result<FisherInfo2x2, CrlbError> {
    let mu = mu_constant(geom.eta);
    let mut psi = FisherInfo2x2 { xx: 0.0, xy: 0.0, yy: 0.0 };
    for r in &geom.stas {
        check_inputs(r.ul_snr, geom.bandwidth, geom.eta)?;
        let rho = geom.bandwidth * geom.bandwidth * r.ul_snr / mu;
        let (g1, g2) = unit_toward(&r.pos, &geom.ref_pos)?;
        psi.xx += g1 * g1 * rho;
        psi.xy += g1 * g2 * rho;
        psi.yy += g2 * g2 * rho;
    }
    let tr = psi.trace();
    if !(psi.det() / (tr * tr) >= DEGENERACY_TOL) {
        return Err(CrlbError::DegenerateGeometry);
    }
    Ok(psi)
}

/// Position bound `Tr{Ψ⁻¹}` (m²) at the geometry's reference position.
pub fn predicted_trilat_crlb(geom: &SensingGeometry) -> Result<f64, CrlbError> {
    Ok(fisher_info(geom)?.inverse_trace())
}

/// Lower bound `4μ / (ω² ξ*)` over all triples of the given UL SNRs, where
/// `ξ*` is the largest three-term SNR sum.
pub fn trilat_lower_bound(ul_snrs: &[f64], bandwidth: f64, eta: u32) -> Result<f64, CrlbError> {
    if ul_snrs.len() < 3 {
        return Err(CrlbError::TooFewCandidates(ul_snrs.len()));
    }
    let mut sorted = ul_snrs.to_vec();
    for &s in &sorted {
        check_inputs(s, bandwidth, eta)?;
    }
    sorted.sort_by(|a, b| b.total_cmp(a));
    let best_sum: f64 = sorted[..3].iter().sum();
    Ok(4.0 * mu_constant(eta) / (bandwidth * bandwidth * best_sum))
}

/// Up to `k` station ids with the highest UL SNR (ties to the lower id),
/// returned in ascending id order. `ul_snr` is indexed by station id.
pub fn nominate_candidates(available: &[usize], ul_snr: &[f64], k: usize) -> Vec<usize> {
    let mut ids = available.to_vec();
    if ids.len() > k {
        ids.sort_by(|&a, &b| ul_snr[b].total_cmp(&ul_snr[a]).then(a.cmp(&b)));
        ids.truncate(k);
    }
    ids.sort_unstable();
    ids
}

/// Station ids of a sensing triple, ascending.
pub type Triple = [usize; 3];

/// Per-link view of the station population used by the selectors.
#[derive(Debug, Clone, Copy)]
pub struct LinkView<'a> {
    pub positions: &'a [Position],
    pub ul_snr: &'a [f64],
    pub bandwidth: f64,
    pub eta: u32,
}

impl LinkView<'_> {
    pub fn geometry(&self, triple: &Triple, ref_pos: Position) -> SensingGeometry {
        let r = |id: usize| Responder { pos: self.positions[id], ul_snr: self.ul_snr[id] };
        SensingGeometry {
            ref_pos,
            stas: [r(triple[0]), r(triple[1]), r(triple[2])],
            bandwidth: self.bandwidth,
            eta: self.eta,
        }
    }
}

/// Exhaustive argmin of `Tr{Ψ⁻¹}` over the 3-subsets of `candidates`.
/// Degenerate triples are skipped; ties keep the lexicographically smallest
/// triple.
pub fn select_sensing_triple(
    candidates: &[usize],
    ref_pos: Position,
    link: &LinkView<'_>,
) -> Result<(Triple, f64), CrlbError> {
    if candidates.len() < 3 {
        return Err(CrlbError::TooFewCandidates(candidates.len()));
    }
    let mut ids = candidates.to_vec();
    ids.sort_unstable();
    let n = ids.len();
    let mut best: Option<(Triple, f64)> = None;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let triple = [ids[a], ids[b], ids[c]];
                let Ok(value) = predicted_trilat_crlb(&link.geometry(&triple, ref_pos)) else {
                    continue;
                };
                if best.is_none_or(|(_, v)| value < v) {
                    best = Some((triple, value));
                }
            }
        }
    }
    best.ok_or(CrlbError::AllDegenerate)
}

/// Per-axis measurement noise variance for a selected triple: half the
/// trilateration bound at the true target position, so that `Tr{Q_v}` equals
/// the bound. Falls back to the predicted position when the true geometry is
/// degenerate.
pub fn measurement_variance(
    triple: &Triple,
    true_pos: Position,
    predicted_pos: Position,
    link: &LinkView<'_>,
) -> Result<f64, CrlbError> {
    match predicted_trilat_crlb(&link.geometry(triple, true_pos)) {
        Ok(v) => Ok(v / 2.0),
        Err(CrlbError::DegenerateGeometry) => predicted_trilat_crlb(&link.geometry(triple, predicted_pos))
            .map(|v| v / 2.0)
            .map_err(|e| match e {
                CrlbError::DegenerateGeometry => CrlbError::AllDegenerate,
                other => other,
            }),
        Err(e) => Err(e),
    }
}
