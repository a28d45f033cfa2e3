//! Plant, noise and cost description.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{check_pd, check_psd};

/// Tolerance on the minimum eigenvalue of the PSD inputs.
pub const PSD_TOL: f64 = 1e-10;

/// Linear time-invariant plant `X_{t+1} = A X_t + B U_t + W_t` with the
/// finite-horizon quadratic cost
/// `E[Σ_t (XᵀQ1X + UᵀRU + λ_{θ_t}) + X_TᵀQ2X_T]`.
///
/// `X_0 ~ N(init_mean, init_cov)`, `W_t ~ N(0, noise_cov)` i.i.d.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub noise_cov: DMatrix<f64>,
    pub init_mean: DVector<f64>,
    pub init_cov: DMatrix<f64>,
    pub q1: DMatrix<f64>,
    pub q2: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub horizon: usize,
    /// Per-quantizer operating cost `λ_i`, one entry per bank slot.
    pub quantizer_costs: Vec<f64>,
}

impl SystemModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        noise_cov: DMatrix<f64>,
        init_mean: DVector<f64>,
        init_cov: DMatrix<f64>,
        q1: DMatrix<f64>,
        q2: DMatrix<f64>,
        r: DMatrix<f64>,
        horizon: usize,
        quantizer_costs: Vec<f64>,
    ) -> Result<Self> {
        let model = Self {
            a,
            b,
            noise_cov,
            init_mean,
            init_cov,
            q1,
            q2,
            r,
            horizon,
            quantizer_costs,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.a.nrows();
        if n == 0 || !self.a.is_square() {
            return Err(Error::Dimension(format!(
                "A must be square and non-empty, got {}x{}",
                self.a.nrows(),
                self.a.ncols()
            )));
        }
        let m = self.b.ncols();
        if self.b.nrows() != n || m == 0 {
            return Err(Error::Dimension(format!(
                "B must be {n}xm with m > 0, got {}x{}",
                self.b.nrows(),
                self.b.ncols()
            )));
        }
        let square = |name: &str, x: &DMatrix<f64>, d: usize| {
            if x.nrows() != d || x.ncols() != d {
                Err(Error::Dimension(format!(
                    "{name} must be {d}x{d}, got {}x{}",
                    x.nrows(),
                    x.ncols()
                )))
            } else {
                Ok(())
            }
        };
        square("noise_cov", &self.noise_cov, n)?;
        square("init_cov", &self.init_cov, n)?;
        square("Q1", &self.q1, n)?;
        square("Q2", &self.q2, n)?;
        square("R", &self.r, m)?;
        if self.init_mean.len() != n {
            return Err(Error::Dimension(format!(
                "init_mean must have length {n}, got {}",
                self.init_mean.len()
            )));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidModel("horizon must be positive".into()));
        }
        let finite = [
            &self.a,
            &self.b,
            &self.noise_cov,
            &self.init_cov,
            &self.q1,
            &self.q2,
            &self.r,
        ]
        .iter()
        .all(|x| x.iter().all(|v| v.is_finite()))
            && self.init_mean.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidModel("non-finite matrix entry".into()));
        }
        check_psd("Q1", &self.q1, PSD_TOL)?;
        check_psd("Q2", &self.q2, PSD_TOL)?;
        check_psd("noise_cov", &self.noise_cov, PSD_TOL)?;
        check_psd("init_cov", &self.init_cov, PSD_TOL)?;
        check_pd("R", &self.r, PSD_TOL)?;
        if let Some(bad) = self
            .quantizer_costs
            .iter()
            .position(|c| !(c.is_finite() && *c >= 0.0))
        {
            return Err(Error::InvalidModel(format!(
                "quantizer cost {bad} must be finite and nonnegative"
            )));
        }
        Ok(())
    }

    /// Same plant with a different cost vector `Λ`.
    pub fn with_costs(&self, costs: Vec<f64>) -> Result<Self> {
        let mut m = self.clone();
        m.quantizer_costs = costs;
        m.validate()?;
        Ok(m)
    }

    /// Same plant with a different horizon.
    pub fn with_horizon(&self, horizon: usize) -> Result<Self> {
        let mut m = self.clone();
        m.horizon = horizon;
        m.validate()?;
        Ok(m)
    }
}
