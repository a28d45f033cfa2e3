//! Small dense helpers on top of `nalgebra` used by the recursions.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Reciprocal condition threshold below which a symmetric solve is rejected.
pub const RCOND_MIN: f64 = 1e-12;

/// `(X + Xᵀ) / 2`.
pub fn symmetrize(x: &DMatrix<f64>) -> DMatrix<f64> {
    (x + x.transpose()) * 0.5
}

pub fn min_eigenvalue(x: &DMatrix<f64>) -> f64 {
    if x.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(symmetrize(x))
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Reciprocal condition number `λ_min / λ_max` of a symmetric matrix.
pub fn rcond_symmetric(x: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(symmetrize(x)).eigenvalues;
    let hi = eig.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if hi == 0.0 {
        0.0
    } else {
        lo / hi
    }
}

pub fn is_symmetric(x: &DMatrix<f64>, tol: f64) -> bool {
    if !x.is_square() {
        return false;
    }
    let scale = x.amax().max(1.0);
    (x - x.transpose()).amax() <= tol * scale
}

/// Rejects matrices that are asymmetric or have an eigenvalue below `-tol`.
pub fn check_psd(what: &str, x: &DMatrix<f64>, tol: f64) -> Result<()> {
    if !is_symmetric(x, 1e-9) {
        return Err(Error::NotPsd {
            what: format!("{what} (asymmetric)"),
            min_eig: f64::NAN,
        });
    }
    let min_eig = min_eigenvalue(x);
    if min_eig < -tol {
        return Err(Error::NotPsd {
            what: what.to_string(),
            min_eig,
        });
    }
    Ok(())
}

pub fn check_pd(what: &str, x: &DMatrix<f64>, tol: f64) -> Result<()> {
    if !is_symmetric(x, 1e-9) {
        return Err(Error::NotPd {
            what: format!("{what} (asymmetric)"),
            min_eig: f64::NAN,
        });
    }
    let min_eig = min_eigenvalue(x);
    if min_eig <= tol {
        return Err(Error::NotPd {
            what: what.to_string(),
            min_eig,
        });
    }
    Ok(())
}

/// PSD tolerance scaled by the trace, as used for the recursion outputs.
pub fn trace_tolerance(x: &DMatrix<f64>) -> f64 {
    1e-10 * x.trace().abs().max(1.0)
}

/// Solves `S X = rhs` for symmetric positive definite `S`, refusing when the
/// reciprocal condition estimate drops below [`RCOND_MIN`].
///
/// Returns the reciprocal condition on failure so callers can report it.
pub fn spd_solve(s: &DMatrix<f64>, rhs: &DMatrix<f64>) -> std::result::Result<DMatrix<f64>, f64> {
    let s = symmetrize(s);
    let rcond = rcond_symmetric(&s);
    if !(rcond >= RCOND_MIN) {
        return Err(rcond);
    }
    match s.clone().cholesky() {
        Some(ch) => Ok(ch.solve(rhs)),
        None => Err(rcond),
    }
}

/// Lower Cholesky-like factor of a PSD matrix, tolerant of singular inputs.
///
/// Falls back to an eigen-decomposition square root when Cholesky fails.
pub fn psd_factor(x: &DMatrix<f64>) -> DMatrix<f64> {
    let s = symmetrize(x);
    if let Some(ch) = s.clone().cholesky() {
        return ch.l();
    }
    let eig = SymmetricEigen::new(s);
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals)
}

/// `xᵀ M x`.
pub fn quad_form(m: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    x.dot(&(m * x))
}

/// `tr(A B)` without forming the product.
pub fn trace_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Pairwise (cascade) summation. The split points depend only on the slice
/// length, so the result is a pure function of the input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

pub fn is_diagonal(x: &DMatrix<f64>) -> bool {
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            if i != j && x[(i, j)] != 0.0 {
                return false;
            }
        }
    }
    true
}
