//! Noise distributions driving the plant: the Gaussian law of the model and a
//! finite sigma-point discretization of it used by the scenario-tree oracle.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gaussian::hermite_points;
use crate::linalg::{check_psd, psd_factor};

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseLaw {
    /// `N(0, cov)`; `factor` satisfies `factor · factorᵀ = cov`.
    Gaussian {
        cov: DMatrix<f64>,
        factor: DMatrix<f64>,
    },
    /// Finite support with probabilities summing to one.
    Discrete {
        points: Vec<DVector<f64>>,
        probs: Vec<f64>,
        cumulative: Vec<f64>,
    },
}

impl NoiseLaw {
    pub fn gaussian(cov: &DMatrix<f64>) -> Result<Self> {
        check_psd("noise covariance", cov, 1e-10)?;
        Ok(NoiseLaw::Gaussian {
            cov: cov.clone(),
            factor: psd_factor(cov),
        })
    }

    pub fn discrete(points: Vec<DVector<f64>>, probs: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != probs.len() {
            return Err(Error::InvalidArgument(
                "discrete law needs one probability per support point".into(),
            ));
        }
        let dim = points[0].len();
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::Dimension("support points differ in length".into()));
        }
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::InvalidArgument("negative support probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "support probabilities sum to {total}"
            )));
        }
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        Ok(NoiseLaw::Discrete {
            points,
            probs,
            cumulative,
        })
    }

    /// Tensorized Gauss–Hermite discretization of `N(0, cov)` with `order`
    /// points per axis (3 or 5). Mean and covariance are matched exactly.
    pub fn sigma_points(cov: &DMatrix<f64>, order: usize) -> Result<Self> {
        check_psd("noise covariance", cov, 1e-10)?;
        let (nodes, weights) = hermite_points(order).ok_or_else(|| {
            Error::InvalidArgument(format!("sigma-point order must be 3 or 5, got {order}"))
        })?;
        let dim = cov.nrows();
        let factor = psd_factor(cov);
        let count = order.pow(dim as u32);
        let mut points = Vec::with_capacity(count);
        let mut probs = Vec::with_capacity(count);
        for flat in 0..count {
            let mut rest = flat;
            let mut z = DVector::zeros(dim);
            let mut prob = 1.0;
            // First axis varies slowest.
            for axis in (0..dim).rev() {
                let idx = rest % order;
                rest /= order;
                z[axis] = nodes[idx];
                prob *= weights[idx];
            }
            points.push(&factor * z);
            probs.push(prob);
        }
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        Self::discrete(points, probs)
    }

    pub fn dim(&self) -> usize {
        match self {
            NoiseLaw::Gaussian { cov, .. } => cov.nrows(),
            NoiseLaw::Discrete { points, .. } => points[0].len(),
        }
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        match self {
            NoiseLaw::Gaussian { cov, .. } => cov.clone(),
            NoiseLaw::Discrete { points, probs, .. } => {
                let dim = points[0].len();
                let mut acc = DMatrix::zeros(dim, dim);
                for (p, w) in points.iter().zip(probs) {
                    acc += p * p.transpose() * *w;
                }
                acc
            }
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, NoiseLaw::Discrete { .. })
    }

    /// Support points and probabilities of a discrete law.
    pub fn support(&self) -> Option<(&[DVector<f64>], &[f64])> {
        match self {
            NoiseLaw::Discrete { points, probs, .. } => Some((points, probs)),
            NoiseLaw::Gaussian { .. } => None,
        }
    }

    /// Draws one sample. Discrete laws also report the support index.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (DVector<f64>, Option<usize>) {
        match self {
            NoiseLaw::Gaussian { factor, .. } => {
                let dim = factor.nrows();
                let z = DVector::from_iterator(dim, (0..dim).map(|_| rng.sample(StandardNormal)));
                (factor * z, None)
            }
            NoiseLaw::Discrete {
                points, cumulative, ..
            } => {
                let u: f64 = rng.random();
                let idx = cumulative
                    .iter()
                    .position(|c| u < *c)
                    .unwrap_or(points.len() - 1);
                (points[idx].clone(), Some(idx))
            }
        }
    }
}
