//! Backward recursions: the control Riccati pair and the selection weights.
//!
//! Indexing follows decision time: `p`, `pi`, `upsilon` and `r` have length
//! `T + 1`; `l`, `n` and `omega` have length `T`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{spd_solve, symmetrize, trace_product};
use crate::model::SystemModel;

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiSolution {
    /// Cost-to-go matrices `P_0..P_T`, `P_T = Q2`.
    pub p: Vec<DMatrix<f64>>,
    /// Feedback gains `L_0..L_{T-1}`; the control law is `U_k = -L_k X̃_k`.
    pub l: Vec<DMatrix<f64>>,
    /// Estimation-error weights `N_k = L_kᵀ (R + BᵀP_{k+1}B) L_k`.
    pub n: Vec<DMatrix<f64>>,
    /// Noise offsets `r_0..r_T`, `r_T = 0`.
    pub r: Vec<f64>,
    /// `Π_k = Aᵀ(Π_{k+1} + N_k)A`, `Π_T = 0`. Empty until the selection
    /// recursions have run.
    pub pi: Vec<DMatrix<f64>>,
    /// `Υ_k = AᵀΥ_{k+1}A + Q1`, `Υ_T = Q2`.
    pub upsilon: Vec<DMatrix<f64>>,
    /// Selection weights `Ω_k = Π_{k+1} + N_k`.
    pub omega: Vec<DMatrix<f64>>,
}

impl RiccatiSolution {
    pub fn horizon(&self) -> usize {
        self.l.len()
    }

    pub fn has_selection_weights(&self) -> bool {
        !self.omega.is_empty()
    }
}

/// Runs the control Riccati recursion backwards from `P_T = Q2`.
pub fn solve_control_riccati(model: &SystemModel) -> Result<RiccatiSolution> {
    model.validate()?;
    let t_end = model.horizon;
    let a = &model.a;
    let b = &model.b;
    let at = a.transpose();
    let bt = b.transpose();

    let mut p = vec![DMatrix::zeros(0, 0); t_end + 1];
    let mut l = vec![DMatrix::zeros(0, 0); t_end];
    let mut n = vec![DMatrix::zeros(0, 0); t_end];
    let mut r = vec![0.0; t_end + 1];
    p[t_end] = symmetrize(&model.q2);

    for k in (0..t_end).rev() {
        let p_next = &p[k + 1];
        let s = symmetrize(&(&model.r + &bt * p_next * b));
        let rhs = &bt * p_next * a;
        let gain = spd_solve(&s, &rhs).map_err(|rcond| Error::IllConditioned { k, rcond })?;
        let n_k = symmetrize(&(gain.transpose() * &s * &gain));
        let p_k = symmetrize(&(&model.q1 + &at * p_next * a - &n_k));
        r[k] = r[k + 1] + trace_product(p_next, &model.noise_cov);
        l[k] = gain;
        n[k] = n_k;
        p[k] = p_k;
    }

    Ok(RiccatiSolution {
        p,
        l,
        n,
        r,
        pi: Vec::new(),
        upsilon: Vec::new(),
        omega: Vec::new(),
    })
}

/// Fills `Π`, `Υ` and `Ω` on top of a control solution.
pub fn solve_selection_recursions(
    model: &SystemModel,
    ricc: &RiccatiSolution,
) -> Result<RiccatiSolution> {
    let t_end = model.horizon;
    let dim = model.state_dim();
    if ricc.p.len() != t_end + 1 || ricc.n.len() != t_end || ricc.l.len() != t_end {
        return Err(Error::Dimension(format!(
            "Riccati solution covers {} steps, model horizon is {t_end}",
            ricc.l.len()
        )));
    }
    if ricc.n.iter().any(|x| x.nrows() != dim || x.ncols() != dim) {
        return Err(Error::Dimension("N_k does not match state dimension".into()));
    }
    let a = &model.a;
    let at = a.transpose();

    let mut pi = vec![DMatrix::zeros(dim, dim); t_end + 1];
    let mut upsilon = vec![DMatrix::zeros(dim, dim); t_end + 1];
    let mut omega = vec![DMatrix::zeros(dim, dim); t_end];
    upsilon[t_end] = symmetrize(&model.q2);

    for k in (0..t_end).rev() {
        let weight = symmetrize(&(&pi[k + 1] + &ricc.n[k]));
        pi[k] = symmetrize(&(&at * &weight * a));
        upsilon[k] = symmetrize(&(&at * &upsilon[k + 1] * a + &model.q1));
        omega[k] = weight;
    }

    let mut out = ricc.clone();
    out.pi = pi;
    out.upsilon = upsilon;
    out.omega = omega;
    Ok(out)
}

/// Both recursions in one call.
pub fn solve(model: &SystemModel) -> Result<RiccatiSolution> {
    let ricc = solve_control_riccati(model)?;
    solve_selection_recursions(model, &ricc)
}
