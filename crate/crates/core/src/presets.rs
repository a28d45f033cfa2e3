//! Reference plants and the three-quantizer bank used throughout the tests
//! and benchmarks. The same data ships as `configs/unstable.cfg` and
//! `configs/stable.cfg`.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::instance::Instance;
use crate::model::SystemModel;
use crate::quantizer::QuantizerSpec;

pub const HORIZON: usize = 50;
pub const UNSTABLE_COSTS: [f64; 3] = [1e4, 2e4, 3e4];
pub const STABLE_COSTS: [f64; 3] = [0.03, 0.06, 0.09];

/// Two-state plant with `B = diag(0.1, 0.15)`, `𝒲 = ¼I`, `Σ₀ = I`, `μ₀ = 0`
/// and `Q1 = Q2 = R = ½I`.
pub fn plant(a: [[f64; 2]; 2], horizon: usize) -> Result<SystemModel> {
    SystemModel::new(
        DMatrix::from_row_slice(2, 2, &[a[0][0], a[0][1], a[1][0], a[1][1]]),
        DMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.0, 0.15]),
        DMatrix::identity(2, 2) * 0.25,
        DVector::zeros(2),
        DMatrix::identity(2, 2),
        DMatrix::identity(2, 2) * 0.5,
        DMatrix::identity(2, 2) * 0.5,
        DMatrix::identity(2, 2) * 0.5,
        horizon,
        vec![],
    )
}

pub const UNSTABLE_A: [[f64; 2]; 2] = [[1.01, 0.5], [0.0, 1.1]];
pub const STABLE_A: [[f64; 2]; 2] = [[0.9, 0.2], [0.0, 0.7]];

/// Two, four and eight cells: a sign split of the first axis, the sign
/// quadrants, and the quadrants with the first axis further split at ±0.5.
pub fn three_level_specs(costs: [f64; 3]) -> Vec<QuantizerSpec> {
    let grids: [(&str, Vec<Vec<f64>>); 3] = [
        ("Q1", vec![vec![0.0], vec![]]),
        ("Q2", vec![vec![0.0], vec![0.0]]),
        ("Q3", vec![vec![-0.5, 0.0, 0.5], vec![0.0]]),
    ];
    grids
        .iter()
        .zip(costs)
        .map(|((name, bps), c)| QuantizerSpec::grid(name, bps, c).expect("static grid"))
        .collect()
}

pub fn unstable() -> Result<Instance> {
    Instance::new(plant(UNSTABLE_A, HORIZON)?, &three_level_specs(UNSTABLE_COSTS), false)
}

pub fn stable(costs: [f64; 3]) -> Result<Instance> {
    Instance::new(plant(STABLE_A, HORIZON)?, &three_level_specs(costs), false)
}
