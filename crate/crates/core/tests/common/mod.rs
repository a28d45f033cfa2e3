#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use qflqg_core::{Instance, QuantizerSpec, SystemModel};

pub fn scalar_model(a: f64, b: f64, w: f64, sigma0: f64, horizon: usize) -> SystemModel {
    let one = DMatrix::from_element(1, 1, 1.0);
    SystemModel::new(
        DMatrix::from_element(1, 1, a),
        DMatrix::from_element(1, 1, b),
        DMatrix::from_element(1, 1, w),
        DVector::zeros(1),
        DMatrix::from_element(1, 1, sigma0),
        one.clone(),
        one.clone(),
        one,
        horizon,
        vec![],
    )
    .unwrap()
}

pub fn half_space(cost: f64) -> QuantizerSpec {
    QuantizerSpec::grid("half", &[vec![0.0]], cost).unwrap()
}

pub fn four_cell(cost: f64) -> QuantizerSpec {
    QuantizerSpec::grid("four", &[vec![-0.5, 0.0, 0.5]], cost).unwrap()
}

/// Scalar plant with the open-loop quantizer at index 0 and a half-space
/// quantizer at index 1.
pub fn scalar_pair(a: f64, w: f64, sigma0: f64, horizon: usize, cost: f64) -> Instance {
    Instance::new(scalar_model(a, 1.0, w, sigma0, horizon), &[half_space(cost)], true).unwrap()
}

pub fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

fn matrix(rows: usize, cols: usize, scale: f64) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-scale..scale, rows * cols)
        .prop_map(move |xs| DMatrix::from_row_slice(rows, cols, &xs))
}

fn psd(n: usize, ridge: f64) -> impl Strategy<Value = DMatrix<f64>> {
    matrix(n, n, 1.0).prop_map(move |g| &g * g.transpose() + DMatrix::identity(n, n) * ridge)
}

/// Random valid models with `n ≤ 4`, `m ≤ 3`, `T ≤ 20`.
pub fn random_model() -> impl Strategy<Value = SystemModel> {
    (1usize..=4, 1usize..=3, 1usize..=20).prop_flat_map(|(n, m, horizon)| {
        (
            matrix(n, n, 1.2),
            matrix(n, m, 1.0),
            psd(n, 0.01),
            psd(n, 0.01),
            psd(n, 0.0),
            psd(n, 0.0),
            psd(m, 0.1),
            prop::collection::vec(-1.0f64..1.0, n),
        )
            .prop_map(move |(a, b, w, s0, q1, q2, r, mu)| {
                SystemModel::new(a, b, w, DVector::from_vec(mu), s0, q1, q2, r, horizon, vec![])
                    .unwrap()
            })
    })
}
