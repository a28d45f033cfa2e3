//! Closed-loop Monte Carlo: plant, quantizer, estimator and certainty-
//! equivalent controller under a selection policy.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimator::{advance_error, EstimatorState};
use crate::instance::Instance;
use crate::linalg::{pairwise_sum, quad_form};
use crate::oracle::PolicyNode;
use crate::policy::{greedy_policy, mdp_state, rollout_policy, RolloutKey, SelectionPolicy};
use crate::rng::{stream, StreamTag};
use crate::schedule::{offline_schedule_with_costs, OfflineSchedule};

/// Everything that happened in one closed-loop run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    /// `X_0..X_T`.
    pub states: Vec<DVector<f64>>,
    /// `U_0..U_{T-1}`.
    pub inputs: Vec<DVector<f64>>,
    /// Entry `t` holds `W_{t-1}`, for `t = 0..=T`.
    pub noise: Vec<DVector<f64>>,
    /// `θ_0..θ_{T-1}`.
    pub selections: Vec<usize>,
    /// Cell index reported at each step.
    pub cells: Vec<usize>,
    /// `ŵ_{t-1}` delivered at each step.
    pub received: Vec<DVector<f64>>,
    /// `X̂_0..X̂_{T-1}`.
    pub predicted: Vec<DVector<f64>>,
    /// `X̃_0..X̃_{T-1}`.
    pub filtered: Vec<DVector<f64>>,
    /// `Δ_0..Δ_{T-1}`.
    pub errors: Vec<DVector<f64>>,
    /// `X_tᵀQ1X_t + U_tᵀRU_t` per step, then `X_TᵀQ2X_T` last.
    pub control_costs: Vec<f64>,
    /// `λ_{θ_t}` per step.
    pub quant_costs: Vec<f64>,
    /// `‖Δ_t‖²_{N_t} + λ_{θ_t}` per step.
    pub selection_costs: Vec<f64>,
    pub j_lqg: f64,
    pub j_quant: f64,
    /// `(1/T) Σ_t log₂ ℓ_{θ_t}`.
    pub bit_rate: f64,
}

impl SimTrace {
    pub fn total_cost(&self) -> f64 {
        self.j_lqg + self.j_quant
    }

    pub fn selection_cost(&self) -> f64 {
        self.selection_costs.iter().sum()
    }

    /// Recomputes the total cost from states, inputs and selections alone.
    pub fn recompute_cost(&self, inst: &Instance) -> f64 {
        let m = &inst.model;
        let horizon = self.inputs.len();
        let mut acc = quad_form(&m.q2, &self.states[horizon]);
        for t in 0..horizon {
            acc += quad_form(&m.q1, &self.states[t])
                + quad_form(&m.r, &self.inputs[t])
                + inst.banks.at(t).get(self.selections[t]).cost;
        }
        acc
    }
}

fn check_finite(t: usize, x: &DVector<f64>) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Overflow { t })
    }
}

/// One run with the instance's own gains.
pub fn simulate_run(inst: &Instance, policy: &SelectionPolicy, seed: u64, run: u64) -> Result<SimTrace> {
    simulate_run_with_gains(inst, &inst.ricc.l, policy, seed, run)
}

/// One run with arbitrary feedback gains `U_t = −gains[t] X̃_t`.
///
/// Noise is drawn from the streams `(seed, run, t, tag)`, so runs that share
/// `seed` and `run` see the same noise whatever the gains or policy.
pub fn simulate_run_with_gains(
    inst: &Instance,
    gains: &[DMatrix<f64>],
    policy: &SelectionPolicy,
    seed: u64,
    run: u64,
) -> Result<SimTrace> {
    let model = &inst.model;
    let horizon = inst.horizon();
    if gains.len() != horizon {
        return Err(Error::Dimension(format!(
            "{} gains for horizon {horizon}",
            gains.len()
        )));
    }
    match policy {
        SelectionPolicy::Offline(s) | SelectionPolicy::Rollout { base: s, .. } if s.len() != horizon => {
            return Err(Error::InvalidSchedule(format!(
                "schedule has {} entries, horizon is {horizon}",
                s.len()
            )));
        }
        SelectionPolicy::Oracle(_) if !inst.is_discrete() => {
            return Err(Error::InvalidArgument(
                "oracle policy needs a discretized instance".into(),
            ));
        }
        _ => {}
    }

    let n = inst.state_dim();
    let mut trace = SimTrace {
        states: Vec::with_capacity(horizon + 1),
        inputs: Vec::with_capacity(horizon),
        noise: Vec::with_capacity(horizon + 1),
        selections: Vec::with_capacity(horizon),
        cells: Vec::with_capacity(horizon),
        received: Vec::with_capacity(horizon),
        predicted: Vec::with_capacity(horizon),
        filtered: Vec::with_capacity(horizon),
        errors: Vec::with_capacity(horizon),
        control_costs: Vec::with_capacity(horizon + 1),
        quant_costs: Vec::with_capacity(horizon),
        selection_costs: Vec::with_capacity(horizon),
        j_lqg: 0.0,
        j_quant: 0.0,
        bit_rate: 0.0,
    };

    let mut rng = stream(seed, run, 0, StreamTag::InitialState);
    let (mut w_prev, mut support) = inst.banks.initial.law.sample(&mut rng);
    let mut x = &model.init_mean + &w_prev;
    let mut est = EstimatorState::initial(model);
    let mut delta = DVector::zeros(n);
    let mut node: Option<&PolicyNode> = None;
    let mut bits = 0.0;
    trace.states.push(x.clone());
    trace.noise.push(w_prev.clone());

    for t in 0..horizon {
        let theta = match policy {
            SelectionPolicy::Offline(schedule) => schedule.at(t),
            SelectionPolicy::Greedy => greedy_policy(inst, t, &mdp_state(&delta, &w_prev))?,
            SelectionPolicy::Rollout { base, n_samples } => rollout_policy(
                inst,
                t,
                &mdp_state(&delta, &w_prev),
                base,
                *n_samples,
                RolloutKey { seed, run },
            )?,
            SelectionPolicy::Oracle(oracle) => {
                let j = support.ok_or_else(|| {
                    Error::InvalidArgument("oracle policy needs discrete noise".into())
                })?;
                let next = match node {
                    None => &oracle.roots[j],
                    Some(parent) => &parent.children[j],
                };
                node = Some(next);
                next.action
            }
        };
        let quantizer = inst.banks.at(t).get(theta);
        let (cell, w_hat) = quantizer.quantize(&w_prev)?;
        let w_hat = w_hat.clone();

        est = est.correct(&w_hat);
        delta = advance_error(&model.a, &delta, &w_prev, &w_hat);
        est.delta = delta.clone();
        let u = -(&gains[t] * &est.x_filtered);

        let stage_control = quad_form(&model.q1, &x) + quad_form(&model.r, &u);
        trace.control_costs.push(stage_control);
        trace.quant_costs.push(quantizer.cost);
        trace
            .selection_costs
            .push(quad_form(&inst.ricc.n[t], &delta) + quantizer.cost);
        trace.j_lqg += stage_control;
        trace.j_quant += quantizer.cost;
        bits += quantizer.bits();

        trace.selections.push(theta);
        trace.cells.push(cell);
        trace.received.push(w_hat);
        trace.predicted.push(est.x_predicted.clone());
        trace.filtered.push(est.x_filtered.clone());
        trace.errors.push(delta.clone());

        let mut rng = stream(seed, run, t as u64, StreamTag::ProcessNoise);
        let (w, idx) = inst.banks.process.law.sample(&mut rng);
        x = &model.a * &x + &model.b * &u + &w;
        check_finite(t, &x)?;
        est = est.predict(model, &u);
        trace.inputs.push(u);
        trace.states.push(x.clone());
        trace.noise.push(w.clone());
        w_prev = w;
        support = idx;
    }
    let terminal = quad_form(&model.q2, &x);
    trace.control_costs.push(terminal);
    trace.j_lqg += terminal;
    trace.bit_rate = if horizon == 0 { 0.0 } else { bits / horizon as f64 };
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub n_runs: usize,
    pub mean_cost: f64,
    pub cost_se: f64,
    pub j_lqg: f64,
    pub j_lqg_se: f64,
    pub j_quant: f64,
    pub j_quant_se: f64,
    /// Mean of `Σ_t ‖Δ_t‖²_{N_t} + λ_{θ_t}`.
    pub selection_cost: f64,
    pub selection_cost_se: f64,
    pub bit_rate: f64,
    /// `usage[t][i]`: number of runs that selected `i` at time `t`.
    pub usage: Vec<Vec<u64>>,
    /// `ρ_i(t)` for `t = 1..=T` (row `t-1`).
    pub utilization: DMatrix<f64>,
    /// Full traces of the first runs, if requested.
    pub traces: Vec<SimTrace>,
}

/// Mean and standard error of the mean with order-fixed summation.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `ρ_i(t)` from per-time selection counts over `n_runs` runs.
pub fn utilization_from_usage(usage: &[Vec<u64>], bank_len: usize, n_runs: usize) -> DMatrix<f64> {
    let horizon = usage.len();
    let mut out = DMatrix::zeros(horizon, bank_len);
    let mut cumulative = vec![0u64; bank_len];
    for (t, counts) in usage.iter().enumerate() {
        for (c, u) in cumulative.iter_mut().zip(counts) {
            *c += u;
        }
        let denom = ((t + 1) * n_runs) as f64;
        for i in 0..bank_len {
            out[(t, i)] = cumulative[i] as f64 / denom;
        }
    }
    out
}

fn count_usage(selections: &[&[usize]], horizon: usize, bank_len: usize) -> Vec<Vec<u64>> {
    let mut usage = vec![vec![0u64; bank_len]; horizon];
    for sel in selections {
        for (t, &i) in sel.iter().enumerate() {
            usage[t][i] += 1;
        }
    }
    usage
}

/// `ρ_i(t) = (uses of i up to t) / t`, pooled over the given traces.
pub fn utilization(traces: &[SimTrace], bank_len: usize) -> DMatrix<f64> {
    let horizon = traces.first().map_or(0, |t| t.selections.len());
    let sels: Vec<&[usize]> = traces.iter().map(|t| t.selections.as_slice()).collect();
    utilization_from_usage(&count_usage(&sels, horizon, bank_len), bank_len, traces.len())
}

/// Utilization of a fixed schedule, without simulating.
pub fn schedule_utilization(schedule: &OfflineSchedule, bank_len: usize) -> DMatrix<f64> {
    let usage = count_usage(&[schedule.selections.as_slice()], schedule.len(), bank_len);
    utilization_from_usage(&usage, bank_len, 1)
}

struct RunSummary {
    j_lqg: f64,
    j_quant: f64,
    selection_cost: f64,
    bit_rate: f64,
    selections: Vec<usize>,
    trace: Option<SimTrace>,
}

/// Runs `n_runs` independent simulations in parallel and aggregates them.
/// Run `r` uses streams `(seed, r, ·, ·)`; the result does not depend on
/// the number of worker threads.
pub fn monte_carlo(
    inst: &Instance,
    policy: &SelectionPolicy,
    n_runs: usize,
    seed: u64,
) -> Result<ExperimentResult> {
    monte_carlo_with_traces(inst, policy, n_runs, seed, 0)
}

/// As [`monte_carlo`], keeping the full traces of the first `keep` runs.
pub fn monte_carlo_with_traces(
    inst: &Instance,
    policy: &SelectionPolicy,
    n_runs: usize,
    seed: u64,
    keep: usize,
) -> Result<ExperimentResult> {
    if n_runs == 0 {
        return Err(Error::InvalidArgument("n_runs must be at least 1".into()));
    }
    let summaries: Vec<RunSummary> = (0..n_runs)
        .into_par_iter()
        .map(|r| {
            let trace = simulate_run(inst, policy, seed, r as u64).map_err(|e| Error::Run {
                run: r as u64,
                source: Box::new(e),
            })?;
            Ok(RunSummary {
                j_lqg: trace.j_lqg,
                j_quant: trace.j_quant,
                selection_cost: trace.selection_cost(),
                bit_rate: trace.bit_rate,
                selections: trace.selections.clone(),
                trace: (r < keep).then_some(trace),
            })
        })
        .collect::<Result<_>>()?;

    let column = |f: fn(&RunSummary) -> f64| summaries.iter().map(f).collect::<Vec<f64>>();
    let totals = column(|s| s.j_lqg + s.j_quant);
    let (mean_cost, cost_se) = mean_and_se(&totals);
    let (j_lqg, j_lqg_se) = mean_and_se(&column(|s| s.j_lqg));
    let (j_quant, j_quant_se) = mean_and_se(&column(|s| s.j_quant));
    let (selection_cost, selection_cost_se) = mean_and_se(&column(|s| s.selection_cost));
    let bit_rate = pairwise_sum(&column(|s| s.bit_rate)) / n_runs as f64;

    let bank_len = inst.bank_len();
    let sels: Vec<&[usize]> = summaries.iter().map(|s| s.selections.as_slice()).collect();
    let usage = count_usage(&sels, inst.horizon(), bank_len);
    let utilization = utilization_from_usage(&usage, bank_len, n_runs);
    let traces = summaries.into_iter().filter_map(|s| s.trace).collect();

    Ok(ExperimentResult {
        n_runs,
        mean_cost,
        cost_se,
        j_lqg,
        j_lqg_se,
        j_quant,
        j_quant_se,
        selection_cost,
        selection_cost_se,
        bit_rate,
        usage,
        utilization,
        traces,
    })
}

/// Default weight grid: 25 log-spaced points from 0.01 to 1.
pub fn default_betas() -> Vec<f64> {
    (0..25).map(|i| 10f64.powf(-2.0 + 2.0 * i as f64 / 24.0)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoPoint {
    pub beta: f64,
    pub schedule: OfflineSchedule,
    pub j_lqg: f64,
    pub j_lqg_se: f64,
    /// `Σ_t λ_{θ_t}` in the original cost units.
    pub j_quant: f64,
    pub dominated: bool,
}

/// Marks every point beaten by another on both axes (strictly on one).
pub fn flag_dominated(points: &mut [ParetoPoint]) {
    let coords: Vec<(f64, f64)> = points.iter().map(|p| (p.j_lqg, p.j_quant)).collect();
    for (i, p) in points.iter_mut().enumerate() {
        p.dominated = coords.iter().enumerate().any(|(j, &(l, q))| {
            j != i && l <= coords[i].0 && q <= coords[i].1 && (l < coords[i].0 || q < coords[i].1)
        });
    }
}

/// Weighted sweep `min β J_LQG + (1 − β) J_quant` through the offline
/// schedule, with costs scaled to `((1 − β)/β) Λ` in the selection score
/// only. Every β reuses the same noise streams.
pub fn pareto_sweep(inst: &Instance, betas: &[f64], n_runs: usize, seed: u64) -> Result<Vec<ParetoPoint>> {
    if betas.is_empty() {
        return Err(Error::InvalidArgument("beta grid is empty".into()));
    }
    let mut points = Vec::with_capacity(betas.len());
    for &beta in betas {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidArgument(format!("beta must lie in (0, 1], got {beta}")));
        }
        let scale = (1.0 - beta) / beta;
        let scaled: Vec<f64> = inst.costs().iter().map(|c| c * scale).collect();
        let schedule = offline_schedule_with_costs(inst, &scaled)?;
        let result = monte_carlo(inst, &SelectionPolicy::Offline(schedule.clone()), n_runs, seed)?;
        let j_quant = schedule
            .selections
            .iter()
            .enumerate()
            .map(|(t, &i)| inst.banks.at(t).get(i).cost)
            .sum();
        points.push(ParetoPoint {
            beta,
            schedule,
            j_lqg: result.j_lqg,
            j_lqg_se: result.j_lqg_se,
            j_quant,
            dominated: false,
        });
    }
    flag_dominated(&mut points);
    Ok(points)
}
