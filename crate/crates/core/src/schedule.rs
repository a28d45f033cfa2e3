//! Offline quantizer selection under the quantized-measurement pattern and
//! the closed-form expected cost of a fixed schedule.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::estimator::propagate_with_residual;
use crate::instance::Instance;
use crate::linalg::{quad_form, trace_product};

/// Quantizer index per decision time `0..T`. Depends on `k` only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OfflineSchedule {
    pub selections: Vec<usize>,
}

impl OfflineSchedule {
    pub fn constant(index: usize, horizon: usize) -> Self {
        Self {
            selections: vec![index; horizon],
        }
    }

    pub fn len(&self) -> usize {
        self.selections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selections.is_empty()
    }

    pub fn at(&self, k: usize) -> usize {
        self.selections[k]
    }

    fn check(&self, inst: &Instance) -> Result<()> {
        if self.len() != inst.horizon() {
            return Err(Error::InvalidSchedule(format!(
                "schedule has {} entries, horizon is {}",
                self.len(),
                inst.horizon()
            )));
        }
        if let Some(k) = self.selections.iter().position(|&i| i >= inst.bank_len()) {
            return Err(Error::InvalidSchedule(format!(
                "index {} at k = {k} outside bank of size {}",
                self.selections[k],
                inst.bank_len()
            )));
        }
        Ok(())
    }
}

/// Lowest index attaining the minimum.
pub fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// Stage scores `tr(Ω_k (cov − Fⁱ)) + λ_i` for every `k` and `i`, with the
/// given costs in place of the bank's own.
pub fn schedule_scores(inst: &Instance, costs: &[f64]) -> Result<Vec<Vec<f64>>> {
    if costs.len() != inst.bank_len() {
        return Err(Error::Dimension(format!(
            "{} costs for {} quantizers",
            costs.len(),
            inst.bank_len()
        )));
    }
    Ok((0..inst.horizon())
        .map(|k| {
            let bank = inst.banks.at(k);
            let omega = &inst.ricc.omega[k];
            (0..bank.len())
                .map(|i| trace_product(omega, &bank.residual(i)) + costs[i])
                .collect()
        })
        .collect())
}

/// Offline schedule for explicit costs (used by the weighted sweep).
pub fn offline_schedule_with_costs(inst: &Instance, costs: &[f64]) -> Result<OfflineSchedule> {
    let scores = schedule_scores(inst, costs)?;
    Ok(OfflineSchedule {
        selections: scores.iter().map(|s| argmin(s)).collect(),
    })
}

/// `θ*_k = argmin_i tr(Ω_k (cov − Fⁱ)) + λ_i`.
pub fn offline_schedule(inst: &Instance) -> Result<OfflineSchedule> {
    offline_schedule_with_costs(inst, inst.costs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostDecomposition {
    /// `tr(P₀Σ₀) + μ₀ᵀP₀μ₀ + r₀`.
    pub control_part: f64,
    /// `Σ_t tr(N_t ΣΔ_t) + λ_{θ_t}`.
    pub selection_part: f64,
    /// `ΣΔ_0..ΣΔ_{T-1}`.
    pub error_covs: Vec<DMatrix<f64>>,
}

impl CostDecomposition {
    pub fn total(&self) -> f64 {
        self.control_part + self.selection_part
    }
}

/// Expected cost of playing `schedule`, split into the part no quantizer can
/// remove and the part that depends on the selections.
pub fn analytic_cost_decomposition(
    inst: &Instance,
    schedule: &OfflineSchedule,
) -> Result<CostDecomposition> {
    schedule.check(inst)?;
    let model = &inst.model;
    let ricc = &inst.ricc;
    let init_cov = inst.banks.initial.law.covariance();
    let control_part = trace_product(&ricc.p[0], &init_cov)
        + quad_form(&ricc.p[0], &model.init_mean)
        + ricc.r[0];

    let mut error_covs = Vec::with_capacity(inst.horizon());
    let mut selection_part = 0.0;
    let zero = DMatrix::zeros(inst.state_dim(), inst.state_dim());
    let mut sigma = zero.clone();
    for k in 0..inst.horizon() {
        let bank = inst.banks.at(k);
        let i = schedule.at(k);
        let a = if k == 0 { &zero } else { &model.a };
        sigma = propagate_with_residual(&sigma, a, &bank.residual(i))?;
        selection_part += trace_product(&ricc.n[k], &sigma) + bank.get(i).cost;
        error_covs.push(sigma.clone());
    }
    Ok(CostDecomposition {
        control_part,
        selection_part,
        error_covs,
    })
}
