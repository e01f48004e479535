//! Nearly-constant-velocity motion, Kalman prediction/update and synthetic
//! trilateration measurements.

use nalgebra::{Matrix2, Matrix2x4, Matrix4, Matrix4x2, Vector2};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::config::{BeliefKind, CvOffDiag, TargetState, TrackBelief};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum KalmanError {
    #[error("elapsed time must be non-negative, got {0}")]
    NegativeElapsed(f64),
    #[error("prediction expects an updated belief")]
    NotUpdated,
    #[error("update expects a predicted belief")]
    NotPredicted,
    #[error("measurement noise variance must be positive, got {0}")]
    NonPositiveNoise(f64),
    #[error("innovation covariance is singular")]
    SingularInnovation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionModel {
    /// Process noise intensity (m²/s³).
    pub g_s: f64,
    pub offdiag: CvOffDiag,
}

impl MotionModel {
    pub fn new(g_s: f64, offdiag: CvOffDiag) -> Self {
        Self { g_s, offdiag }
    }
}

/// Trilateration fix of the target position with isotropic noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub z: Vector2<f64>,
    pub noise_var: f64,
}

fn observation() -> Matrix2x4<f64> {
    Matrix2x4::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0)
}

fn check_elapsed(t: f64) -> Result<(), KalmanError> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(KalmanError::NegativeElapsed(t))
    }
}

/// `I2 ⊗ [[1, T], [0, 1]]` acting on `[x, vx, y, vy]`.
pub fn transition_matrix(elapsed: f64) -> Result<Matrix4<f64>, KalmanError> {
    check_elapsed(elapsed)?;
    let mut f = Matrix4::identity();
    f[(0, 1)] = elapsed;
    f[(2, 3)] = elapsed;
    Ok(f)
}

/// White-noise-acceleration covariance `g_s · I2 ⊗ [[T³/3, c], [c, T]]` with
/// `c = T²` (printed) or `c = T²/2` (standard).
pub fn process_noise_cov(elapsed: f64, g_s: f64, offdiag: CvOffDiag) -> Result<Matrix4<f64>, KalmanError> {
    check_elapsed(elapsed)?;
    let t = elapsed;
    let cross = match offdiag {
        CvOffDiag::Printed => t * t,
        CvOffDiag::Standard => t * t / 2.0,
    };
    let block = [[t * t * t / 3.0, cross], [cross, t]];
    let mut q = Matrix4::zeros();
    for axis in 0..2 {
        let o = 2 * axis;
        for r in 0..2 {
            for c in 0..2 {
                q[(o + r, o + c)] = g_s * block[r][c];
            }
        }
    }
    Ok(q)
}

pub fn predict(prior: &TrackBelief, elapsed: f64, model: &MotionModel) -> Result<TrackBelief, KalmanError> {
    if prior.kind != BeliefKind::Updated {
        return Err(KalmanError::NotUpdated);
    }
    let f = transition_matrix(elapsed)?;
    let q = process_noise_cov(elapsed, model.g_s, model.offdiag)?;
    let state = f * prior.state.to_vector();
    let mse = f * prior.mse * f.transpose() + q;
    Ok(TrackBelief { state: TargetState::from_vector(&state), mse, kind: BeliefKind::Predicted })
}

fn inverse_2x2(m: &Matrix2<f64>) -> Option<Matrix2<f64>> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    if !(det.is_finite() && det > 0.0) {
        return None;
    }
    Some(Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det)
}

pub fn update(pred: &TrackBelief, meas: &Measurement) -> Result<TrackBelief, KalmanError> {
    if pred.kind != BeliefKind::Predicted {
        return Err(KalmanError::NotPredicted);
    }
    if !(meas.noise_var > 0.0) {
        return Err(KalmanError::NonPositiveNoise(meas.noise_var));
    }
    let h = observation();
    let p = pred.mse;
    let innovation_cov = Matrix2::identity() * meas.noise_var + h * p * h.transpose();
    let s_inv = inverse_2x2(&innovation_cov).ok_or(KalmanError::SingularInnovation)?;
    let gain: Matrix4x2<f64> = p * h.transpose() * s_inv;

    let x_hat = pred.state.to_vector();
    let state = x_hat + gain * (meas.z - h * x_hat);
    let mse = (Matrix4::identity() - gain * h) * p;
    let mse = (mse + mse.transpose()) * 0.5;
    Ok(TrackBelief { state: TargetState::from_vector(&state), mse, kind: BeliefKind::Updated })
}

/// Advances ground truth by `elapsed` seconds, drawing the process noise from
/// the positive semidefinite (standard) covariance block.
pub fn propagate_truth<R: Rng + ?Sized>(
    truth: &TargetState,
    elapsed: f64,
    g_s: f64,
    rng: &mut R,
) -> Result<TargetState, KalmanError> {
    check_elapsed(elapsed)?;
    if elapsed == 0.0 {
        return Ok(*truth);
    }
    let t = elapsed;
    // Cholesky factor of [[t³/3, t²/2], [t²/2, t]] is [[a, 0], [b, c]].
    let a = (t * t * t / 3.0).sqrt();
    let b = (t * t / 2.0) / a;
    let c = (t / 4.0).sqrt();
    let scale = g_s.sqrt();
    let mut draw = || -> (f64, f64) {
        let u: f64 = rng.sample(StandardNormal);
        let v: f64 = rng.sample(StandardNormal);
        (scale * a * u, scale * (b * u + c * v))
    };
    let (gx, gvx) = draw();
    let (gy, gvy) = draw();
    Ok(TargetState {
        x: truth.x + t * truth.vx + gx,
        vx: truth.vx + gvx,
        y: truth.y + t * truth.vy + gy,
        vy: truth.vy + gvy,
    })
}

pub fn synthesize_measurement<R: Rng + ?Sized>(truth: &TargetState, noise_var: f64, rng: &mut R) -> Measurement {
    let sd = noise_var.sqrt();
    let nx: f64 = rng.sample(StandardNormal);
    let ny: f64 = rng.sample(StandardNormal);
    Measurement { z: Vector2::new(truth.x + sd * nx, truth.y + sd * ny), noise_var }
}
