mod common;

use approx::assert_abs_diff_eq;
use nalgebra::DVector;
use qflqg_core::policy::{greedy_scores, rollout_scores, terminal_psi, terminal_value_matrix};
use qflqg_core::presets::{self, STABLE_COSTS};
use qflqg_core::schedule::schedule_scores;
use qflqg_core::{
    analytic_cost_decomposition, brute_force_mdp, greedy_policy, mdp_state, offline_schedule,
    rollout_policy, terminal_stage_direct, terminal_stage_policy, Error, Instance, OfflineSchedule,
    RolloutKey,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{four_cell, half_space, scalar_model, scalar_pair, v};

const F_HALF: f64 = 0.159_154_943_091_895_35;

#[test]
fn scalar_offline_threshold() {
    let cheap = scalar_pair(1.0, 0.25, 0.25, 1, 0.05);
    assert_abs_diff_eq!(cheap.ricc.omega[0][(0, 0)], 0.5, epsilon = 1e-15);
    let scores = schedule_scores(&cheap, cheap.costs()).unwrap();
    assert_abs_diff_eq!(scores[0][0], 0.125, epsilon = 1e-15);
    assert_abs_diff_eq!(scores[0][1], 0.5 * (0.25 - F_HALF) + 0.05, epsilon = 1e-12);
    assert_abs_diff_eq!(scores[0][1], 0.09543, epsilon = 1e-5);
    assert_eq!(offline_schedule(&cheap).unwrap().selections, vec![1]);

    let dear = cheap.with_costs(&[0.0, 0.09]).unwrap();
    assert_eq!(offline_schedule(&dear).unwrap().selections, vec![0]);
    // At λ = Ω₀F the scores tie and the lower index wins.
    let tie = cheap.with_costs(&[0.0, 0.5 * F_HALF]).unwrap();
    let s = schedule_scores(&tie, tie.costs()).unwrap();
    assert!((s[0][0] - s[0][1]).abs() < 1e-15);
    assert_eq!(offline_schedule(&tie).unwrap().selections, vec![0]);
}

#[test]
fn free_quantizers_pick_the_finest() {
    let inst = presets::unstable().unwrap().with_costs(&[0.0, 0.0, 0.0]).unwrap();
    assert!(offline_schedule(&inst).unwrap().selections.iter().all(|&i| i == 2));
}

#[test]
fn stable_plant_schedules() {
    let dear = presets::stable([1.0, 2.0, 3.0]).unwrap();
    assert!(offline_schedule(&dear).unwrap().selections.iter().all(|&i| i == 0));
    let cheap = presets::stable([1e-4, 2e-4, 3e-4]).unwrap();
    assert!(offline_schedule(&cheap).unwrap().selections.iter().all(|&i| i == 2));
    let mid = presets::stable(STABLE_COSTS).unwrap();
    let a = offline_schedule(&mid).unwrap();
    let b = offline_schedule(&mid).unwrap();
    assert_eq!(a, b);
    // Finer quantizers early, coarser near the end of the horizon.
    assert!(a.selections.windows(2).all(|w| w[0] >= w[1]));
}

fn random_state(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(2 * n, |_, _| scale * (2.0 * rng.random::<f64>() - 1.0))
}

#[test]
fn structured_and_direct_terminal_values_agree() {
    let inst = presets::unstable().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..1000 {
        let s = random_state(&mut rng, 2, 3.0);
        let structured = terminal_stage_policy(&inst, &s).unwrap();
        let direct = terminal_stage_direct(&inst, &s).unwrap();
        assert_eq!(structured.index, direct.index);
        let scale = direct.value.abs().max(1.0);
        assert!((structured.value - direct.value).abs() <= 1e-9 * scale);
        let greedy = greedy_policy(&inst, inst.horizon() - 1, &s).unwrap();
        assert_eq!(greedy, structured.index);
    }
}

#[test]
fn zero_dynamics_drop_the_error_block() {
    let inst = scalar_pair(0.0, 0.25, 0.25, 3, 0.01);
    let base = terminal_psi(&inst, &v(&[0.0, 0.3])).unwrap();
    let shifted = terminal_psi(&inst, &v(&[5.0, 0.3])).unwrap();
    assert_eq!(base, shifted);
    let n = inst.ricc.n[2][(0, 0)];
    let w_hat = (2.0 / std::f64::consts::PI).sqrt() * 0.5;
    assert_abs_diff_eq!(base[1] - base[0], -2.0 * 0.3 * n * w_hat + n * w_hat * w_hat + 0.01, epsilon = 1e-14);
    let phi = terminal_value_matrix(&inst);
    assert_eq!(phi[(0, 0)], 0.0);
    assert_eq!(phi[(1, 1)], n);
}

#[test]
fn terminal_choice_switches_only_at_psi_crossings() {
    let inst = scalar_pair(1.2, 0.25, 0.25, 4, 0.02);
    let mut previous: Option<(usize, f64)> = None;
    let mut switches = 0;
    for i in 0..=4000 {
        let w = -2.0 + i as f64 * 1e-3;
        let s = v(&[0.1, w]);
        let psi = terminal_psi(&inst, &s).unwrap();
        let gap = psi[1] - psi[0];
        let index = terminal_stage_policy(&inst, &s).unwrap().index;
        assert_eq!(index, usize::from(gap < 0.0));
        if let Some((prev_index, prev_gap)) = previous {
            if prev_index != index {
                switches += 1;
                assert!(prev_gap.signum() != gap.signum() || prev_gap == 0.0 || gap == 0.0);
            }
        }
        previous = Some((index, gap));
    }
    assert!(switches >= 1);
}

#[test]
fn greedy_compares_residuals() {
    let inst = scalar_pair(1.0, 0.25, 0.25, 5, 0.0);
    for w in [0.1, 0.3, 0.5, 1.0, 2.0] {
        let s = v(&[0.0, w]);
        let scores = greedy_scores(&inst, 2, &s).unwrap();
        let w_hat = 0.398_942_280_401_432_7;
        let expect = usize::from((w - w_hat).powi(2) < w * w);
        assert_eq!(greedy_policy(&inst, 2, &s).unwrap(), expect);
        assert!(scores.iter().all(|x| x.is_finite()));
    }
    // s = 0: the half-space quantizer delivers w_hat and pays for it.
    let s = v(&[0.0, 0.0]);
    let n2 = inst.ricc.n[2][(0, 0)];
    let scores = greedy_scores(&inst, 2, &s).unwrap();
    assert_eq!(scores[0], 0.0);
    assert_abs_diff_eq!(scores[1], n2 * 0.398_942_280_401_432_7f64.powi(2), epsilon = 1e-14);
    assert_eq!(greedy_policy(&inst, 2, &s).unwrap(), 0);
}

#[test]
fn rollout_reduces_to_terminal_at_the_last_stage() {
    let inst = presets::stable(STABLE_COSTS).unwrap();
    let base = offline_schedule(&inst).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let s = random_state(&mut rng, 2, 1.5);
        let key = RolloutKey { seed: 1, run: 0 };
        let r = rollout_policy(&inst, inst.horizon() - 1, &s, &base, 4, key).unwrap();
        assert_eq!(r, terminal_stage_policy(&inst, &s).unwrap().index);
    }
}

#[test]
fn rollout_matches_restricted_enumeration() {
    let inst = scalar_pair(1.1, 0.25, 0.25, 6, 0.01);
    let k = inst.horizon() - 2;
    let base = OfflineSchedule::constant(0, inst.horizon());
    let n_samples = 20_000;
    let (a, w) = (1.1, 0.25);
    let n_k = inst.ricc.n[k][(0, 0)];
    let n_last = inst.ricc.n[k + 1][(0, 0)];
    let w_hat: f64 = 0.398_942_280_401_432_7;
    for (delta, noise) in [(0.0, 0.3), (0.5, -0.2), (-1.0, 0.7), (0.2, 0.05)] {
        let s = v(&[delta, noise]);
        let scores = rollout_scores(&inst, k, &s, &base, n_samples, RolloutKey { seed: 5, run: 3 }).unwrap();
        let start = a * delta + noise;
        let candidates = [start, start - w_hat.copysign(if noise >= 0.0 { 1.0 } else { -1.0 })];
        for (i, d) in candidates.iter().enumerate() {
            let exact = n_k * d * d + inst.costs()[i] + n_last * (a * a * d * d + w);
            let sd = n_last * (2.0 * w * w + 4.0 * a * a * d * d * w).sqrt();
            let tol = 5.0 * sd / (n_samples as f64).sqrt();
            assert!((scores[i] - exact).abs() < tol, "i = {i}: {} vs {exact}", scores[i]);
        }
    }
}

#[test]
fn oracle_with_one_quantizer_matches_the_closed_form() {
    let model = scalar_model(1.1, 1.0, 0.25, 0.5, 3);
    let inst = Instance::new_discretized(model, &[half_space(0.2)], false, 3).unwrap();
    let oracle = brute_force_mdp(&inst).unwrap();
    let analytic = analytic_cost_decomposition(&inst, &OfflineSchedule::constant(0, 3)).unwrap();
    assert!((oracle.value - analytic.selection_part).abs() < 1e-12 * analytic.selection_part);
}

#[test]
fn one_step_oracle_equals_terminal_stage() {
    for cost in [0.0, 0.01, 0.05, 0.2] {
        let model = scalar_model(1.3, 1.0, 0.25, 0.4, 1);
        let inst = Instance::new_discretized(model, &[half_space(cost), four_cell(2.0 * cost)], true, 5)
            .unwrap();
        let oracle = brute_force_mdp(&inst).unwrap();
        let (points, _) = inst.banks.initial.law.support().unwrap();
        for (j, w) in points.iter().enumerate() {
            let s = mdp_state(&DVector::zeros(1), w);
            let terminal = terminal_stage_policy(&inst, &s).unwrap();
            assert_eq!(oracle.roots[j].action, terminal.index);
            assert!((oracle.roots[j].value - terminal.value).abs() < 1e-12);
        }
    }
}

#[test]
fn free_refinement_is_always_taken() {
    let model = scalar_model(0.9, 1.0, 0.25, 0.25, 3);
    let inst = Instance::new_discretized(model, &[half_space(0.0), four_cell(0.0)], true, 3).unwrap();
    let oracle = brute_force_mdp(&inst).unwrap();
    let finest = analytic_cost_decomposition(&inst, &OfflineSchedule::constant(2, 3)).unwrap();
    assert!((oracle.value - finest.selection_part).abs() < 1e-12);
}

#[test]
fn oracle_refuses_large_trees() {
    let model = presets::plant(presets::STABLE_A, 5).unwrap();
    let inst = Instance::new_discretized(model, &presets::three_level_specs(STABLE_COSTS), false, 5)
        .unwrap();
    match brute_force_mdp(&inst) {
        Err(Error::TooLarge { nodes, limit }) => assert!(nodes > limit),
        other => panic!("expected size error, got {other:?}"),
    }
    assert!(brute_force_mdp(&presets::stable(STABLE_COSTS).unwrap()).is_err());
}
