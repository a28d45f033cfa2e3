//! Exact selection policy on discretized noise by scenario-tree backward
//! induction.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::linalg::quad_form;
use nalgebra::DVector;

/// Largest scenario tree the oracle will expand.
pub const ORACLE_NODE_LIMIT: u128 = 1_000_000;

/// Optimal action at one history, with the optimal continuation indexed by
/// the support index of the next noise sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyNode {
    pub action: usize,
    /// Optimal expected cost from this node on.
    pub value: f64,
    pub children: Vec<PolicyNode>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OraclePolicy {
    /// One root per support point of `W_{-1}`.
    pub roots: Vec<PolicyNode>,
    /// `E[Σ_t ‖Δ_t‖²_{N_t} + λ_{θ_t}]` under the optimal policy.
    pub value: f64,
    /// Nodes expanded during the search.
    pub nodes: u128,
}

impl OraclePolicy {
    /// First-stage action for each support point of `W_{-1}`.
    pub fn first_stage(&self) -> Vec<usize> {
        self.roots.iter().map(|r| r.action).collect()
    }
}

/// `Σ_{t<T} K^{t+1} M^t` nodes for support size `K` and bank size `M`.
pub fn oracle_tree_size(support: usize, bank: usize, horizon: usize) -> u128 {
    let (k, m) = (support as u128, bank as u128);
    let mut total: u128 = 0;
    let mut layer: u128 = k;
    for _ in 0..horizon {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(k).saturating_mul(m);
    }
    total
}

struct Search<'a> {
    inst: &'a Instance,
    nodes: u128,
}

impl Search<'_> {
    fn expand(&mut self, k: usize, delta_prev: &DVector<f64>, w: &DVector<f64>) -> Result<PolicyNode> {
        self.nodes += 1;
        let inst = self.inst;
        let bank = inst.banks.at(k);
        let drift = &inst.model.a * delta_prev + w;
        let mut best: Option<PolicyNode> = None;
        for (i, q) in bank.quantizers.iter().enumerate() {
            let delta = &drift - q.quantize(w)?.1;
            let mut value = quad_form(&inst.ricc.n[k], &delta) + q.cost;
            let mut children = Vec::new();
            if k + 1 < inst.horizon() {
                let (points, probs) = inst.banks.process.law.support().ok_or_else(|| {
                    Error::InvalidArgument("oracle needs a discrete noise law".into())
                })?;
                children.reserve(points.len());
                for (point, p) in points.iter().zip(probs) {
                    let child = self.expand(k + 1, &delta, point)?;
                    value += p * child.value;
                    children.push(child);
                }
            }
            if best.as_ref().is_none_or(|b| value < b.value) {
                best = Some(PolicyNode {
                    action: i,
                    value,
                    children,
                });
            }
        }
        Ok(best.expect("bank is never empty"))
    }
}

/// Solves the selection MDP exactly on an instance whose noise laws are
/// discrete. The value excludes the control part of the cost, which no
/// selection policy can change.
pub fn brute_force_mdp(inst: &Instance) -> Result<OraclePolicy> {
    let (init_points, init_probs) = inst.banks.initial.law.support().ok_or_else(|| {
        Error::InvalidArgument("oracle needs a discretized instance".into())
    })?;
    let process = inst.banks.process.law.support().ok_or_else(|| {
        Error::InvalidArgument("oracle needs a discretized instance".into())
    })?;
    let support = init_points.len().max(process.0.len());
    let nodes = oracle_tree_size(support, inst.bank_len(), inst.horizon());
    if nodes > ORACLE_NODE_LIMIT {
        return Err(Error::TooLarge {
            nodes,
            limit: ORACLE_NODE_LIMIT,
        });
    }
    let mut search = Search { inst, nodes: 0 };
    let zero = DVector::zeros(inst.state_dim());
    let mut roots = Vec::with_capacity(init_points.len());
    let mut value = 0.0;
    for (point, p) in init_points.iter().zip(init_probs) {
        let root = search.expand(0, &zero, point)?;
        value += p * root.value;
        roots.push(root);
    }
    Ok(OraclePolicy {
        roots,
        value,
        nodes: search.nodes,
    })
}
