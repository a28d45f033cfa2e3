//! Quantizers over the process noise.
//!
//! A quantizer is a partition of ℝⁿ into axis-aligned half-open boxes. Its
//! reconstruction points are always recomputed as the conditional means of
//! the noise law over each cell, so the delivered value is `E[W | g(W)]`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::{halton, std_quantile, truncated_moments};
use crate::linalg::{is_diagonal, min_eigenvalue, symmetrize};
use crate::noise::NoiseLaw;

/// Cells below this probability have no well-defined centroid.
pub const MIN_CELL_PROB: f64 = 1e-12;
/// Base Halton points for non-diagonal covariances; each is paired with its
/// antithetic mirror, giving 2^16 evaluation points.
pub const QMC_BASE_POINTS: u64 = 1 << 15;

/// Half-open box `[lower, upper)`; bounds may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
}

impl Cell {
    pub fn new(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Dimension("cell bounds differ in length".into()));
        }
        if lower.iter().zip(upper.iter()).any(|(l, u)| !(l < u)) {
            return Err(Error::InvalidPartition(format!(
                "cell bounds must satisfy lower < upper, got {:?} / {:?}",
                lower.as_slice(),
                upper.as_slice()
            )));
        }
        Ok(Self { lower, upper })
    }

    /// The whole space.
    pub fn everything(dim: usize) -> Self {
        Self {
            lower: DVector::from_element(dim, f64::NEG_INFINITY),
            upper: DVector::from_element(dim, f64::INFINITY),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, w: &DVector<f64>) -> bool {
        w.iter()
            .zip(self.lower.iter().zip(self.upper.iter()))
            .all(|(x, (l, u))| *l <= *x && *x < *u)
    }

    pub fn overlaps(&self, other: &Cell) -> bool {
        (0..self.dim()).all(|i| {
            self.lower[i].max(other.lower[i]) < self.upper[i].min(other.upper[i])
        })
    }

    /// Splits the cell at `at` along `axis`, if `at` is strictly inside.
    pub fn split(&self, axis: usize, at: f64) -> Option<(Cell, Cell)> {
        if !(self.lower[axis] < at && at < self.upper[axis]) {
            return None;
        }
        let mut left = self.clone();
        let mut right = self.clone();
        left.upper[axis] = at;
        right.lower[axis] = at;
        Some((left, right))
    }
}

/// Product partition from per-axis breakpoint lists. The first axis varies
/// slowest. An empty list leaves that axis unsplit.
pub fn grid_cells(breakpoints: &[Vec<f64>]) -> Result<Vec<Cell>> {
    if breakpoints.is_empty() {
        return Err(Error::InvalidPartition("no axes given".into()));
    }
    let mut edges = Vec::with_capacity(breakpoints.len());
    for (axis, bps) in breakpoints.iter().enumerate() {
        if bps.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidPartition(format!(
                "axis {axis}: breakpoints must be finite"
            )));
        }
        if bps.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidPartition(format!(
                "axis {axis}: breakpoints must be strictly increasing"
            )));
        }
        let mut e = Vec::with_capacity(bps.len() + 2);
        e.push(f64::NEG_INFINITY);
        e.extend_from_slice(bps);
        e.push(f64::INFINITY);
        edges.push(e);
    }
    let dim = edges.len();
    let counts: Vec<usize> = edges.iter().map(|e| e.len() - 1).collect();
    let total: usize = counts.iter().product();
    let mut cells = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rest = flat;
        let mut lower = DVector::zeros(dim);
        let mut upper = DVector::zeros(dim);
        for axis in (0..dim).rev() {
            let idx = rest % counts[axis];
            rest /= counts[axis];
            lower[axis] = edges[axis][idx];
            upper[axis] = edges[axis][idx + 1];
        }
        cells.push(Cell { lower, upper });
    }
    Ok(cells)
}

/// Quantizer with centroid reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer {
    pub name: String,
    pub cells: Vec<Cell>,
    /// `q_j = E[W | W ∈ cell_j]`.
    pub centroids: Vec<DVector<f64>>,
    /// `p_j = P(W ∈ cell_j)`.
    pub probs: Vec<f64>,
    /// Operating cost `λ`.
    pub cost: f64,
    /// `F = Σ_j p_j q_j q_jᵀ`, the covariance of the delivered estimate.
    pub reduction: DMatrix<f64>,
    /// Optional user-supplied symbols, kept for output only.
    pub representatives: Option<Vec<DVector<f64>>>,
}

impl Quantizer {
    pub fn levels(&self) -> usize {
        self.cells.len()
    }

    pub fn dim(&self) -> usize {
        self.reduction.nrows()
    }

    /// Bits needed by a fixed-length code, `log₂ ℓ`.
    pub fn bits(&self) -> f64 {
        (self.levels() as f64).log2()
    }

    /// The single-level quantizer: it delivers no information and costs nothing.
    pub fn open_loop(dim: usize) -> Self {
        Self {
            name: "open-loop".into(),
            cells: vec![Cell::everything(dim)],
            centroids: vec![DVector::zeros(dim)],
            probs: vec![1.0],
            cost: 0.0,
            reduction: DMatrix::zeros(dim, dim),
            representatives: None,
        }
    }

    /// Index of the cell containing `w` and its centroid.
    pub fn quantize(&self, w: &DVector<f64>) -> Result<(usize, &DVector<f64>)> {
        self.cells
            .iter()
            .position(|c| c.contains(w))
            .map(|j| (j, &self.centroids[j]))
            .ok_or_else(|| Error::PartitionGap(w.iter().copied().collect()))
    }

    pub fn mean_output(&self) -> DVector<f64> {
        self.centroids
            .iter()
            .zip(&self.probs)
            .fold(DVector::zeros(self.dim()), |acc, (q, p)| acc + q * *p)
    }
}

fn validate_cells(cells: &[Cell], dim: usize) -> Result<()> {
    if cells.is_empty() {
        return Err(Error::InvalidPartition("quantizer needs at least one cell".into()));
    }
    if let Some(bad) = cells.iter().position(|c| c.dim() != dim) {
        return Err(Error::Dimension(format!(
            "cell {bad} has dimension {}, noise has {dim}",
            cells[bad].dim()
        )));
    }
    for i in 0..cells.len() {
        for j in (i + 1)..cells.len() {
            if cells[i].overlaps(&cells[j]) {
                return Err(Error::InvalidPartition(format!("cells {i} and {j} overlap")));
            }
        }
    }
    Ok(())
}

/// Per-cell `(p_j, q_j)` for a diagonal Gaussian, axis by axis.
fn diagonal_moments(cells: &[Cell], cov: &DMatrix<f64>) -> Vec<(f64, DVector<f64>)> {
    let dim = cov.nrows();
    let sigmas: Vec<f64> = (0..dim).map(|i| cov[(i, i)].max(0.0).sqrt()).collect();
    cells
        .iter()
        .map(|cell| {
            let mut prob = 1.0;
            let mut mean = DVector::zeros(dim);
            for axis in 0..dim {
                let (p, m) = truncated_moments(sigmas[axis], cell.lower[axis], cell.upper[axis]);
                prob *= p;
                mean[axis] = m;
            }
            (prob, mean)
        })
        .collect()
}

/// Quasi-random estimate of `(p_j, q_j)` for a general Gaussian. Antithetic
/// pairs keep the overall mean at zero.
fn quadrature_moments(
    cells: &[Cell],
    factor: &DMatrix<f64>,
) -> Result<Vec<(f64, DVector<f64>)>> {
    let dim = factor.nrows();
    let mut counts = vec![0u64; cells.len()];
    let mut sums = vec![DVector::<f64>::zeros(dim); cells.len()];
    let locate = |w: &DVector<f64>| {
        cells
            .iter()
            .position(|c| c.contains(w))
            .ok_or_else(|| Error::PartitionGap(w.iter().copied().collect()))
    };
    for index in 1..=QMC_BASE_POINTS {
        let u = halton(index, dim);
        let z = DVector::from_iterator(dim, u.iter().map(|&x| std_quantile(x)));
        let w = factor * z;
        let mirrored = -&w;
        for point in [w, mirrored] {
            let j = locate(&point)?;
            counts[j] += 1;
            sums[j] += point;
        }
    }
    let total = (2 * QMC_BASE_POINTS) as f64;
    Ok(counts
        .into_iter()
        .zip(sums)
        .map(|(c, s)| {
            if c == 0 {
                (0.0, DVector::zeros(dim))
            } else {
                (c as f64 / total, s / c as f64)
            }
        })
        .collect())
}

fn discrete_moments(
    cells: &[Cell],
    points: &[DVector<f64>],
    probs: &[f64],
) -> Result<Vec<(f64, DVector<f64>)>> {
    let dim = points[0].len();
    let mut mass = vec![0.0; cells.len()];
    let mut sums = vec![DVector::<f64>::zeros(dim); cells.len()];
    for (w, p) in points.iter().zip(probs) {
        let j = cells
            .iter()
            .position(|c| c.contains(w))
            .ok_or_else(|| Error::PartitionGap(w.iter().copied().collect()))?;
        mass[j] += p;
        sums[j] += w * *p;
    }
    Ok(mass
        .into_iter()
        .zip(sums)
        .map(|(m, s)| if m > 0.0 { (m, s / m) } else { (0.0, DVector::zeros(dim)) })
        .collect())
}

/// Builds a quantizer over `N(0, noise_cov)`.
pub fn build_quantizer(cells: Vec<Cell>, noise_cov: &DMatrix<f64>, cost: f64) -> Result<Quantizer> {
    build_quantizer_with_law(cells, &NoiseLaw::gaussian(noise_cov)?, cost)
}

/// Builds a quantizer against an arbitrary noise law.
///
/// Gaussian laws with diagonal covariance use closed-form truncated-normal
/// moments; other Gaussians use a fixed 2^16-point quasi-random rule.
/// Discrete laws are enumerated exactly and may leave cells empty (such
/// cells are unreachable and get a zero centroid).
pub fn build_quantizer_with_law(cells: Vec<Cell>, law: &NoiseLaw, cost: f64) -> Result<Quantizer> {
    let dim = law.dim();
    validate_cells(&cells, dim)?;
    if !(cost.is_finite() && cost >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "quantizer cost must be finite and nonnegative, got {cost}"
        )));
    }
    let moments = match law {
        NoiseLaw::Gaussian { cov, .. } if is_diagonal(cov) => diagonal_moments(&cells, cov),
        NoiseLaw::Gaussian { factor, .. } => quadrature_moments(&cells, factor)?,
        NoiseLaw::Discrete { points, probs, .. } => discrete_moments(&cells, points, probs)?,
    };

    let total: f64 = moments.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidPartition(format!(
            "cells cover probability {total}, expected 1"
        )));
    }
    if !law.is_discrete() {
        if let Some((cell, (prob, _))) = moments
            .iter()
            .enumerate()
            .find(|(_, (p, _))| *p < MIN_CELL_PROB)
        {
            return Err(Error::DegenerateCell { cell, prob: *prob });
        }
    }

    let mut reduction = DMatrix::zeros(dim, dim);
    for (p, q) in &moments {
        reduction += q * q.transpose() * *p;
    }
    let reduction = symmetrize(&reduction);
    let residual = law.covariance() - &reduction;
    let min_eig = min_eigenvalue(&residual);
    if min_eig < -1e-10 * residual.trace().abs().max(1.0) {
        return Err(Error::InvalidReduction(format!(
            "noise covariance minus F has eigenvalue {min_eig:e}"
        )));
    }

    let (probs, centroids) = moments.into_iter().unzip();
    Ok(Quantizer {
        name: String::new(),
        cells,
        centroids,
        probs,
        cost,
        reduction,
        representatives: None,
    })
}

/// Declarative description of one quantizer, independent of the noise law.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerSpec {
    pub name: String,
    pub cells: Vec<Cell>,
    pub cost: f64,
    pub representatives: Option<Vec<DVector<f64>>>,
}

impl QuantizerSpec {
    pub fn grid(name: &str, breakpoints: &[Vec<f64>], cost: f64) -> Result<Self> {
        Ok(Self {
            name: name.to_string(),
            cells: grid_cells(breakpoints)?,
            cost,
            representatives: None,
        })
    }
}

/// An ordered set of quantizers built against one noise law.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerBank {
    pub quantizers: Vec<Quantizer>,
    pub law: NoiseLaw,
}

impl QuantizerBank {
    /// Builds every spec against `law`, optionally prepending the free
    /// single-level quantizer at index 0.
    pub fn build(specs: &[QuantizerSpec], law: &NoiseLaw, include_open_loop: bool) -> Result<Self> {
        let mut quantizers = Vec::with_capacity(specs.len() + 1);
        if include_open_loop {
            quantizers.push(Quantizer::open_loop(law.dim()));
        }
        for spec in specs {
            let mut q = build_quantizer_with_law(spec.cells.clone(), law, spec.cost)?;
            q.name = spec.name.clone();
            if let Some(reps) = &spec.representatives {
                if reps.len() != q.levels() || reps.iter().any(|r| r.len() != law.dim()) {
                    return Err(Error::Dimension(format!(
                        "quantizer {}: one representative per cell required",
                        spec.name
                    )));
                }
                q.representatives = Some(reps.clone());
            }
            quantizers.push(q);
        }
        if quantizers.is_empty() {
            return Err(Error::InvalidArgument("quantizer bank is empty".into()));
        }
        Ok(Self {
            quantizers,
            law: law.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.quantizers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quantizers.is_empty()
    }

    pub fn get(&self, i: usize) -> &Quantizer {
        &self.quantizers[i]
    }

    pub fn costs(&self) -> Vec<f64> {
        self.quantizers.iter().map(|q| q.cost).collect()
    }

    pub fn set_costs(&mut self, costs: &[f64]) -> Result<()> {
        if costs.len() != self.len() {
            return Err(Error::Dimension(format!(
                "{} costs for {} quantizers",
                costs.len(),
                self.len()
            )));
        }
        for (q, c) in self.quantizers.iter_mut().zip(costs) {
            q.cost = *c;
        }
        Ok(())
    }

    /// Residual covariance `cov(W) − F_i` of quantizer `i`.
    pub fn residual(&self, i: usize) -> DMatrix<f64> {
        self.law.covariance() - &self.quantizers[i].reduction
    }

    /// Adjacent pairs whose residual covariance grows with the index, which
    /// breaks the coarse-to-fine ordering convention. Reported, not enforced.
    pub fn ordering_warnings(&self) -> Vec<String> {
        self.quantizers
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1].reduction.trace() < w[0].reduction.trace() - 1e-12)
            .map(|(i, w)| {
                format!(
                    "quantizer {} ({}) retains more error than quantizer {} ({})",
                    i + 1,
                    w[1].name,
                    i,
                    w[0].name
                )
            })
            .collect()
    }
}

/// The banks in use over the horizon: `initial` quantizes `W_{-1}` (law of
/// the initial-state deviation), `process` quantizes `W_0..W_{T-2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BankSet {
    pub initial: QuantizerBank,
    pub process: QuantizerBank,
}

impl BankSet {
    pub fn build(
        specs: &[QuantizerSpec],
        initial_law: &NoiseLaw,
        process_law: &NoiseLaw,
        include_open_loop: bool,
    ) -> Result<Self> {
        Ok(Self {
            initial: QuantizerBank::build(specs, initial_law, include_open_loop)?,
            process: QuantizerBank::build(specs, process_law, include_open_loop)?,
        })
    }

    /// Bank used for the selection at decision time `t`.
    pub fn at(&self, t: usize) -> &QuantizerBank {
        if t == 0 {
            &self.initial
        } else {
            &self.process
        }
    }

    pub fn len(&self) -> usize {
        self.process.len()
    }

    pub fn is_empty(&self) -> bool {
        self.process.is_empty()
    }

    pub fn costs(&self) -> Vec<f64> {
        self.process.costs()
    }

    pub fn set_costs(&mut self, costs: &[f64]) -> Result<()> {
        self.initial.set_costs(costs)?;
        self.process.set_costs(costs)
    }
}

/// `E[W | o]` when the quantizer output passes through a noisy channel with
/// `channel[(j, o)] = p(o | q_j)`.
pub fn channel_posterior_mean(
    quantizer: &Quantizer,
    channel: &DMatrix<f64>,
    observed: usize,
) -> Result<DVector<f64>> {
    if channel.nrows() != quantizer.levels() {
        return Err(Error::InvalidChannel(format!(
            "channel has {} input rows, quantizer has {} levels",
            channel.nrows(),
            quantizer.levels()
        )));
    }
    if observed >= channel.ncols() {
        return Err(Error::InvalidChannel(format!(
            "observed symbol {observed} outside alphabet of size {}",
            channel.ncols()
        )));
    }
    for (j, row) in channel.row_iter().enumerate() {
        if row.iter().any(|p| !(*p >= 0.0)) || (row.sum() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidChannel(format!("row {j} is not a distribution")));
        }
    }
    let joint: Vec<f64> = quantizer
        .probs
        .iter()
        .enumerate()
        .map(|(j, p)| p * channel[(j, observed)])
        .collect();
    let marginal: f64 = joint.iter().sum();
    if marginal <= 0.0 {
        return Err(Error::ImpossibleObservation(observed));
    }
    Ok(joint
        .iter()
        .zip(&quantizer.centroids)
        .fold(DVector::zeros(quantizer.dim()), |acc, (w, q)| acc + q * (*w / marginal)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const HALF_NORMAL: f64 = 0.398_942_280_401_432_7;

    fn scalar_cov(v: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, v)
    }

    fn half_space() -> Quantizer {
        build_quantizer(grid_cells(&[vec![0.0]]).unwrap(), &scalar_cov(0.25), 0.0).unwrap()
    }

    #[test]
    fn half_space_moments() {
        let q = half_space();
        assert_eq!(q.probs, vec![0.5, 0.5]);
        assert_abs_diff_eq!(q.centroids[0][0], -0.5 * HALF_NORMAL * 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.centroids[1][0], HALF_NORMAL, epsilon = 1e-15);
        assert_abs_diff_eq!(q.reduction[(0, 0)], 0.5 / std::f64::consts::PI, epsilon = 1e-15);
    }

    #[test]
    fn one_level_is_open_loop() {
        let q = build_quantizer(vec![Cell::everything(2)], &(DMatrix::identity(2, 2) * 0.3), 0.0)
            .unwrap();
        assert_eq!(q.probs, vec![1.0]);
        assert_eq!(q.centroids[0], DVector::zeros(2));
        assert_eq!(q.reduction, DMatrix::zeros(2, 2));
    }

    #[test]
    fn quantize_uses_half_open_cells() {
        let q = half_space();
        let (j, c) = q.quantize(&DVector::from_element(1, -0.2)).unwrap();
        assert_eq!(j, 0);
        assert_abs_diff_eq!(c[0], -HALF_NORMAL, epsilon = 1e-15);
        assert_eq!(q.quantize(&DVector::from_element(1, 0.0)).unwrap().0, 1);
    }

    #[test]
    fn example_eight_level_partition() {
        // First axis split at -0.5, 0, 0.5; second at 0.
        let cells = grid_cells(&[vec![-0.5, 0.0, 0.5], vec![0.0]]).unwrap();
        let q = build_quantizer(cells, &(DMatrix::identity(2, 2) * 0.25), 3.0).unwrap();
        let (j, _) = q.quantize(&DVector::from_vec(vec![0.7, -0.1])).unwrap();
        let cell = &q.cells[j];
        assert_eq!(cell.lower.as_slice(), &[0.5, f64::NEG_INFINITY]);
        assert_eq!(cell.upper.as_slice(), &[f64::INFINITY, 0.0]);
    }

    #[test]
    fn gap_and_overlap_are_rejected() {
        let cov = scalar_cov(1.0);
        let left = Cell::new(DVector::from_element(1, f64::NEG_INFINITY), DVector::from_element(1, 0.0))
            .unwrap();
        let right = Cell::new(DVector::from_element(1, 0.5), DVector::from_element(1, f64::INFINITY))
            .unwrap();
        assert!(matches!(
            build_quantizer(vec![left.clone(), right], &cov, 0.0),
            Err(Error::InvalidPartition(_))
        ));
        let overlapping =
            Cell::new(DVector::from_element(1, -1.0), DVector::from_element(1, f64::INFINITY)).unwrap();
        assert!(matches!(
            build_quantizer(vec![left.clone(), overlapping], &cov, 0.0),
            Err(Error::InvalidPartition(_))
        ));
        let q = build_quantizer(vec![left], &scalar_cov(0.0), 0.0);
        assert!(q.is_err());
    }

    #[test]
    fn degenerate_cell_is_rejected() {
        let cells = grid_cells(&[vec![0.0, 60.0]]).unwrap();
        match build_quantizer(cells, &scalar_cov(1.0), 0.0) {
            Err(Error::DegenerateCell { cell, .. }) => assert_eq!(cell, 2),
            other => panic!("expected degenerate cell, got {other:?}"),
        }
    }

    #[test]
    fn bad_cell_bounds() {
        assert!(Cell::new(DVector::from_element(1, 1.0), DVector::from_element(1, 1.0)).is_err());
        assert!(grid_cells(&[vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn channel_identity_and_uniform() {
        let q = half_space();
        let id = DMatrix::identity(2, 2);
        let out = channel_posterior_mean(&q, &id, 1).unwrap();
        assert_eq!(out, q.centroids[1]);
        let uniform = DMatrix::from_element(2, 3, 1.0 / 3.0);
        let out = channel_posterior_mean(&q, &uniform, 2).unwrap();
        assert_abs_diff_eq!(out[0], 0.0, epsilon = 1e-16);
    }

    #[test]
    fn binary_symmetric_channel() {
        let q = half_space();
        let bsc = DMatrix::from_row_slice(2, 2, &[0.9, 0.1, 0.1, 0.9]);
        // Enumerate the two cells directly.
        let num = 0.5 * 0.9 * HALF_NORMAL + 0.5 * 0.1 * (-HALF_NORMAL);
        let den = 0.5 * 0.9 + 0.5 * 0.1;
        let out = channel_posterior_mean(&q, &bsc, 1).unwrap();
        assert_abs_diff_eq!(out[0], num / den, epsilon = 1e-15);
        assert_abs_diff_eq!(out[0], 0.31915, epsilon = 1e-5);
    }

    #[test]
    fn impossible_observation() {
        let q = half_space();
        let ch = DMatrix::from_row_slice(2, 3, &[0.5, 0.5, 0.0, 0.5, 0.5, 0.0]);
        assert!(matches!(
            channel_posterior_mean(&q, &ch, 2),
            Err(Error::ImpossibleObservation(2))
        ));
        let bad = DMatrix::from_row_slice(2, 2, &[0.5, 0.6, 0.5, 0.5]);
        assert!(matches!(channel_posterior_mean(&q, &bad, 0), Err(Error::InvalidChannel(_))));
    }

    #[test]
    fn correlated_covariance_uses_quadrature() {
        let cov = DMatrix::from_row_slice(2, 2, &[0.25, 0.1, 0.1, 0.25]);
        let q = build_quantizer(grid_cells(&[vec![0.0], vec![0.0]]).unwrap(), &cov, 0.0).unwrap();
        // Orthant probabilities of a bivariate normal with correlation ρ:
        // P(X>0, Y>0) = 1/4 + asin(ρ)/(2π).
        let rho: f64 = 0.4;
        let same = 0.25 + rho.asin() / (2.0 * std::f64::consts::PI);
        assert_abs_diff_eq!(q.probs[0], same, epsilon = 1e-4);
        assert_abs_diff_eq!(q.probs[1], 0.5 - same, epsilon = 1e-4);
        assert!(q.mean_output().amax() < 1e-12);
    }

    #[test]
    fn ordering_is_reported_not_enforced() {
        let specs = vec![
            QuantizerSpec::grid("fine", &[vec![-0.5, 0.0, 0.5]], 1.0).unwrap(),
            QuantizerSpec::grid("coarse", &[vec![0.0]], 0.5).unwrap(),
        ];
        let law = NoiseLaw::gaussian(&scalar_cov(0.25)).unwrap();
        let bank = QuantizerBank::build(&specs, &law, true).unwrap();
        assert_eq!(bank.len(), 3);
        assert_eq!(bank.ordering_warnings().len(), 1);
    }
}
