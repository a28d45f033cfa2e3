//! Controller-side estimate and the estimation-error process.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, symmetrize, trace_tolerance};
use crate::model::SystemModel;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorState {
    /// `X̃_t = E[X_t | controller information]`.
    pub x_filtered: DVector<f64>,
    /// `X̂_t = A X̃_{t-1} + B U_{t-1}`.
    pub x_predicted: DVector<f64>,
    /// `Δ_t = X_t − X̃_t`. Kept for diagnostics only; the controller never
    /// reads it.
    pub delta: DVector<f64>,
}

impl EstimatorState {
    /// State before the first measurement: `X̂_0 = μ₀`.
    pub fn initial(model: &SystemModel) -> Self {
        let n = model.state_dim();
        Self {
            x_filtered: model.init_mean.clone(),
            x_predicted: model.init_mean.clone(),
            delta: DVector::zeros(n),
        }
    }

    pub fn predict(&self, model: &SystemModel, u: &DVector<f64>) -> Self {
        Self {
            x_predicted: &model.a * &self.x_filtered + &model.b * u,
            ..self.clone()
        }
    }

    pub fn correct(&self, received: &DVector<f64>) -> Self {
        Self {
            x_filtered: &self.x_predicted + received,
            ..self.clone()
        }
    }
}

/// `Δ_t = A Δ_{t−1} + W_{t−1} − ŵ_{t−1}`.
pub fn advance_error(
    a: &DMatrix<f64>,
    delta: &DVector<f64>,
    w: &DVector<f64>,
    received: &DVector<f64>,
) -> DVector<f64> {
    a * delta + w - received
}

/// `A ΣΔ Aᵀ + 𝒲 − F`.
pub fn propagate_error_cov(
    sigma: &DMatrix<f64>,
    model: &SystemModel,
    reduction: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    propagate_with_residual(sigma, &model.a, &(&model.noise_cov - reduction))
}

/// `A ΣΔ Aᵀ + residual`, where `residual` is the noise covariance left after
/// quantization.
pub fn propagate_with_residual(
    sigma: &DMatrix<f64>,
    a: &DMatrix<f64>,
    residual: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let next = symmetrize(&(a * sigma * a.transpose() + residual));
    let min_eig = min_eigenvalue(&next);
    if min_eig < -trace_tolerance(&next) {
        return Err(Error::InvalidReduction(format!(
            "propagated error covariance has eigenvalue {min_eig:e}"
        )));
    }
    Ok(next)
}
