//! A solved problem: model, recursions and quantizer banks bundled together.

use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::noise::NoiseLaw;
use crate::quantizer::{BankSet, QuantizerSpec};
use crate::riccati::{solve, RiccatiSolution};

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub model: SystemModel,
    pub ricc: RiccatiSolution,
    pub banks: BankSet,
}

impl Instance {
    /// Builds Gaussian banks for `W_{-1} ~ N(0, Σ₀)` and `W_t ~ N(0, 𝒲)`.
    ///
    /// `model.quantizer_costs` is filled from the bank when empty; otherwise
    /// it must equal the bank costs slot by slot.
    pub fn new(model: SystemModel, specs: &[QuantizerSpec], include_open_loop: bool) -> Result<Self> {
        model.validate()?;
        let initial = NoiseLaw::gaussian(&model.init_cov)?;
        let process = NoiseLaw::gaussian(&model.noise_cov)?;
        Self::with_laws(model, specs, include_open_loop, &initial, &process)
    }

    /// Same instance with both noise laws replaced by tensorized sigma points
    /// (`order` per axis). Quantizer centroids are recomputed on the
    /// discrete laws.
    pub fn new_discretized(
        model: SystemModel,
        specs: &[QuantizerSpec],
        include_open_loop: bool,
        order: usize,
    ) -> Result<Self> {
        model.validate()?;
        let initial = NoiseLaw::sigma_points(&model.init_cov, order)?;
        let process = NoiseLaw::sigma_points(&model.noise_cov, order)?;
        Self::with_laws(model, specs, include_open_loop, &initial, &process)
    }

    pub fn with_laws(
        mut model: SystemModel,
        specs: &[QuantizerSpec],
        include_open_loop: bool,
        initial: &NoiseLaw,
        process: &NoiseLaw,
    ) -> Result<Self> {
        let n = model.state_dim();
        if initial.dim() != n || process.dim() != n {
            return Err(Error::Dimension("noise law dimension differs from state".into()));
        }
        let banks = BankSet::build(specs, initial, process, include_open_loop)?;
        let costs = banks.costs();
        if model.quantizer_costs.is_empty() {
            model.quantizer_costs = costs;
        } else if model.quantizer_costs != costs {
            return Err(Error::InvalidArgument(format!(
                "model lists {} quantizer costs {:?}, bank has {:?}",
                model.quantizer_costs.len(),
                model.quantizer_costs,
                costs
            )));
        }
        let ricc = solve(&model)?;
        Ok(Self { model, ricc, banks })
    }

    pub fn horizon(&self) -> usize {
        self.model.horizon
    }

    pub fn state_dim(&self) -> usize {
        self.model.state_dim()
    }

    pub fn bank_len(&self) -> usize {
        self.banks.len()
    }

    pub fn costs(&self) -> &[f64] {
        &self.model.quantizer_costs
    }

    /// Copy with new quantizer costs. The recursions are reused untouched.
    pub fn with_costs(&self, costs: &[f64]) -> Result<Self> {
        let mut out = self.clone();
        out.banks.set_costs(costs)?;
        out.model.quantizer_costs = costs.to_vec();
        Ok(out)
    }

    /// Does the instance carry finite noise supports?
    pub fn is_discrete(&self) -> bool {
        self.banks.initial.law.is_discrete() && self.banks.process.law.is_discrete()
    }
}
