//! Quantizer selection under the perfect-measurement pattern.
//!
//! The selector observes `S_k = [Δ_{k-1}; W_{k-1}]` and picks the quantizer
//! applied to `W_{k-1}`. Selecting `i` yields
//! `Δ_k = A Δ_{k-1} + W_{k-1} − ŵⁱ(W_{k-1})` and the stage cost
//! `‖Δ_k‖²_{N_k} + λ_i`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::linalg::{pairwise_sum, quad_form};
use crate::oracle::OraclePolicy;
use crate::rng::{substream, StreamTag};
use crate::schedule::{argmin, OfflineSchedule};

/// Builds `S = [Δ; W]`.
pub fn mdp_state(delta: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
    let n = delta.len();
    let mut s = DVector::zeros(2 * n);
    s.rows_mut(0, n).copy_from(delta);
    s.rows_mut(n, n).copy_from(w);
    s
}

fn split_state(inst: &Instance, s: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
    let n = inst.state_dim();
    if s.len() != 2 * n {
        return Err(Error::Dimension(format!(
            "MDP state has length {}, expected {}",
            s.len(),
            2 * n
        )));
    }
    Ok((s.rows(0, n).into_owned(), s.rows(n, n).into_owned()))
}

fn check_stage(inst: &Instance, k: usize) -> Result<()> {
    if k >= inst.horizon() {
        return Err(Error::InvalidArgument(format!(
            "decision time {k} outside horizon {}",
            inst.horizon()
        )));
    }
    Ok(())
}

/// `Δ_k` for every quantizer in the bank active at `k`.
pub fn candidate_errors(inst: &Instance, k: usize, s: &DVector<f64>) -> Result<Vec<DVector<f64>>> {
    check_stage(inst, k)?;
    let (delta, w) = split_state(inst, s)?;
    let drift = &inst.model.a * delta + &w;
    inst.banks
        .at(k)
        .quantizers
        .iter()
        .map(|q| Ok(&drift - q.quantize(&w)?.1))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageDecision {
    pub index: usize,
    pub value: f64,
}

/// Single-stage scores `‖Δ_kⁱ‖²_{N_k} + λ_i`.
pub fn greedy_scores(inst: &Instance, k: usize, s: &DVector<f64>) -> Result<Vec<f64>> {
    let errors = candidate_errors(inst, k, s)?;
    let n_k = &inst.ricc.n[k];
    let costs = inst.banks.at(k).costs();
    Ok(errors
        .iter()
        .zip(costs)
        .map(|(d, c)| quad_form(n_k, d) + c)
        .collect())
}

/// Minimizer of the single-stage cost at `k`.
pub fn greedy_policy(inst: &Instance, k: usize, s: &DVector<f64>) -> Result<usize> {
    Ok(argmin(&greedy_scores(inst, k, s)?))
}

/// `Φ = HᵀÑH` with `H = [[A, I], [0, 0]]` and `Ñ = diag(N_{T-1}, 0)`.
pub fn terminal_value_matrix(inst: &Instance) -> DMatrix<f64> {
    let n = inst.state_dim();
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(&inst.model.a);
    h.view_mut((0, n), (n, n)).fill_with_identity();
    let mut n_tilde = DMatrix::zeros(2 * n, 2 * n);
    n_tilde
        .view_mut((0, 0), (n, n))
        .copy_from(&inst.ricc.n[inst.horizon() - 1]);
    h.transpose() * n_tilde * h
}

/// `ψⁱ(s) = −2 sᵀ[AᵀNŵⁱ; Nŵⁱ] + ŵⁱᵀNŵⁱ + λ_i` at the last stage.
pub fn terminal_psi(inst: &Instance, s: &DVector<f64>) -> Result<Vec<f64>> {
    let k = inst.horizon() - 1;
    let (_, w) = split_state(inst, s)?;
    let n_last = &inst.ricc.n[k];
    let at = inst.model.a.transpose();
    inst.banks
        .at(k)
        .quantizers
        .iter()
        .map(|q| {
            let w_hat = q.quantize(&w)?.1;
            let nw = n_last * w_hat;
            let cross = mdp_state(&(&at * &nw), &nw);
            Ok(-2.0 * s.dot(&cross) + w_hat.dot(&nw) + q.cost)
        })
        .collect()
}

/// Exact last-stage decision through the quadratic-plus-ψ form:
/// `C_{T-1}(s) = sᵀΦs + min_i ψⁱ(s)`.
pub fn terminal_stage_policy(inst: &Instance, s: &DVector<f64>) -> Result<StageDecision> {
    let psi = terminal_psi(inst, s)?;
    let index = argmin(&psi);
    let value = quad_form(&terminal_value_matrix(inst), s) + psi[index];
    Ok(StageDecision { index, value })
}

/// The same decision evaluated directly as `min_i ‖AΔ + W − ŵⁱ‖²_N + λ_i`.
pub fn terminal_stage_direct(inst: &Instance, s: &DVector<f64>) -> Result<StageDecision> {
    let scores = greedy_scores(inst, inst.horizon() - 1, s)?;
    let index = argmin(&scores);
    Ok(StageDecision {
        index,
        value: scores[index],
    })
}

/// Addresses the random streams of a rollout evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RolloutKey {
    pub seed: u64,
    pub run: u64,
}

/// Rollout estimates `Q_i = ‖Δ_kⁱ‖²_{N_k} + λ_i + E[cost-to-go under base]`.
///
/// Sample `j` draws `W_k..W_{T-2}` from its own substream and is shared by
/// every action.
pub fn rollout_scores(
    inst: &Instance,
    k: usize,
    s: &DVector<f64>,
    base: &OfflineSchedule,
    n_samples: usize,
    key: RolloutKey,
) -> Result<Vec<f64>> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("rollout needs at least one sample".into()));
    }
    if base.len() != inst.horizon() {
        return Err(Error::InvalidSchedule(format!(
            "base schedule has {} entries, horizon is {}",
            base.len(),
            inst.horizon()
        )));
    }
    let stage = greedy_scores(inst, k, s)?;
    let horizon = inst.horizon();
    if k + 1 == horizon {
        return Ok(stage);
    }
    let starts = candidate_errors(inst, k, s)?;
    let a = &inst.model.a;
    let law = &inst.banks.process.law;

    let per_sample: Vec<Vec<f64>> = (0..n_samples)
        .into_par_iter()
        .map(|j| {
            let mut rng = substream(key.seed, key.run, k as u64, StreamTag::Rollout, j as u64);
            let future: Vec<DVector<f64>> =
                (k + 1..horizon).map(|_| law.sample(&mut rng).0).collect();
            starts
                .iter()
                .map(|start| {
                    let mut delta = start.clone();
                    let mut acc = 0.0;
                    for (t, w) in (k + 1..horizon).zip(&future) {
                        let q = inst.banks.at(t).get(base.at(t));
                        let w_hat = q.quantize(w)?.1;
                        delta = a * &delta + w - w_hat;
                        acc += quad_form(&inst.ricc.n[t], &delta) + q.cost;
                    }
                    Ok(acc)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    Ok(stage
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let column: Vec<f64> = per_sample.iter().map(|row| row[i]).collect();
            c + pairwise_sum(&column) / n_samples as f64
        })
        .collect())
}

pub fn rollout_policy(
    inst: &Instance,
    k: usize,
    s: &DVector<f64>,
    base: &OfflineSchedule,
    n_samples: usize,
    key: RolloutKey,
) -> Result<usize> {
    Ok(argmin(&rollout_scores(inst, k, s, base, n_samples, key)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyFlavor {
    Offline,
    Greedy,
    Rollout,
    Oracle,
}

impl PolicyFlavor {
    pub fn name(self) -> &'static str {
        match self {
            PolicyFlavor::Offline => "offline",
            PolicyFlavor::Greedy => "greedy",
            PolicyFlavor::Rollout => "rollout",
            PolicyFlavor::Oracle => "oracle",
        }
    }
}

/// A complete selection rule for the closed loop.
#[derive(Debug, Clone, PartialEq)]
pub enum SelectionPolicy {
    Offline(OfflineSchedule),
    Greedy,
    Rollout {
        base: OfflineSchedule,
        n_samples: usize,
    },
    /// Exact scenario-tree policy; only valid on discretized instances.
    Oracle(OraclePolicy),
}

impl SelectionPolicy {
    pub fn flavor(&self) -> PolicyFlavor {
        match self {
            SelectionPolicy::Offline(_) => PolicyFlavor::Offline,
            SelectionPolicy::Greedy => PolicyFlavor::Greedy,
            SelectionPolicy::Rollout { .. } => PolicyFlavor::Rollout,
            SelectionPolicy::Oracle(_) => PolicyFlavor::Oracle,
        }
    }
}
