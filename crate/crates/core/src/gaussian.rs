//! Gaussian phase-space distributions and their exact moment arithmetic.
//!
//! Coordinates are always ordered `(q1, p1, q2, p2, ...)`. The vacuum has
//! `Δ²q = Δ²p = 1/2` (ħ = 1), so the coherent state `W(q, p) = e^{-q²-p²}/π`
//! is the Gaussian with covariance `diag(1/2, 1/2)`.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the symmetry and positive-semidefiniteness checks.
pub const PSD_TOLERANCE: f64 = 1e-12;

/// Smallest eigenvalue a covariance block may have before it is treated as degenerate.
pub const DEGENERATE_EIGENVALUE: f64 = 1e-10;

/// Variance of either quadrature of the vacuum.
pub const VACUUM_VARIANCE: f64 = 0.5;

/// A point `(q, p)` in single-mode phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { q: 0.0, p: 0.0 };

    pub fn new(q: f64, p: f64) -> Result<Self> {
        let point = PhasePoint { q, p };
        if !point.is_finite() {
            return Err(Error::InvalidState(format!("non-finite phase point ({q}, {p})")));
        }
        Ok(point)
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.p.is_finite()
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.q, self.p]
    }
}

/// A normalized Gaussian density given by its mean vector and covariance matrix.
///
/// The dimension is usually `2n` for `n` modes, but marginals and conditionals
/// may keep any subset of coordinates, so odd dimensions are allowed.
/// Zero eigenvalues of the covariance are permitted; they mark delta-limit
/// directions that [`GaussianState::density_at`] refuses to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

impl TryFrom<StateRepr> for GaussianState {
    type Error = Error;

    fn try_from(repr: StateRepr) -> Result<Self> {
        let dim = repr.mean.len();
        if repr.cov.len() != dim || repr.cov.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidState("covariance must be square and match the mean".into()));
        }
        let cov = DMatrix::from_fn(dim, dim, |i, j| repr.cov[i][j]);
        GaussianState::new(DVector::from_vec(repr.mean), cov)
    }
}

impl From<GaussianState> for StateRepr {
    fn from(state: GaussianState) -> Self {
        let dim = state.dim();
        StateRepr {
            mean: state.mean.iter().copied().collect(),
            cov: (0..dim).map(|i| state.cov.row(i).iter().copied().collect()).collect(),
        }
    }
}

impl GaussianState {
    /// Validates and builds a state. The stored covariance is the symmetrized input.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 {
            return Err(Error::InvalidState("state must have at least one coordinate".into()));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: cov.nrows() });
        }
        if mean.iter().chain(cov.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidState("non-finite mean or covariance entry".into()));
        }
        let scale = cov.norm();
        if !is_symmetric(&cov, PSD_TOLERANCE * scale) {
            return Err(Error::InvalidState("covariance is not symmetric".into()));
        }
        let cov = symmetrize(cov);
        let min = min_eigenvalue(&cov);
        if min < -PSD_TOLERANCE * scale {
            return Err(Error::InvalidState(format!(
                "covariance is not positive semidefinite (smallest eigenvalue {min:e})"
            )));
        }
        Ok(GaussianState { mean, cov })
    }

    /// Builds a state from moments already known to be valid (results of exact
    /// propagation of valid states). Only symmetrizes.
    pub(crate) fn from_parts(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        debug_assert_eq!(mean.len(), cov.nrows());
        GaussianState { mean, cov: symmetrize(cov) }
    }

    pub fn single_mode(mean: [f64; 2], cov: [[f64; 2]; 2]) -> Result<Self> {
        GaussianState::new(
            DVector::from_row_slice(&mean),
            DMatrix::from_row_slice(2, 2, &[cov[0][0], cov[0][1], cov[1][0], cov[1][1]]),
        )
    }

    /// Coherent state centred at `(q, p)`: covariance `diag(1/2, 1/2)`.
    pub fn coherent(q: f64, p: f64) -> Result<Self> {
        GaussianState::single_mode([q, p], [[VACUUM_VARIANCE, 0.0], [0.0, VACUUM_VARIANCE]])
    }

    pub fn vacuum() -> Self {
        GaussianState::from_parts(
            DVector::zeros(2),
            DMatrix::from_diagonal_element(2, 2, VACUUM_VARIANCE),
        )
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Number of modes, or `None` when the dimension is odd.
    pub fn modes(&self) -> Option<usize> {
        self.dim().is_multiple_of(2).then_some(self.dim() / 2)
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Mean of a single-mode state as an array.
    pub fn mean_2(&self) -> Option<[f64; 2]> {
        (self.dim() == 2).then(|| [self.mean[0], self.mean[1]])
    }

    /// Covariance of a single-mode state as a row-major array.
    pub fn cov_2(&self) -> Option<[[f64; 2]; 2]> {
        (self.dim() == 2).then(|| [[self.cov[(0, 0)], self.cov[(0, 1)]], [self.cov[(1, 0)], self.cov[(1, 1)]]])
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.cov)
    }

    /// Density `(2π)^{-d/2} (det V)^{-1/2} exp(-½ ηᵀV⁻¹η)` at `point`, `η = point - mean`.
    pub fn density_at(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: point.len() });
        }
        let chol = proper_cholesky(&self.cov, |min_eigenvalue| Error::DegenerateCovariance { min_eigenvalue })?;
        let eta = DVector::from_row_slice(point) - &self.mean;
        Ok(gaussian_value(&chol, &eta))
    }

    /// Marginal over the coordinates in `keep` (in the given order).
    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        check_indices(keep, self.dim())?;
        Ok(GaussianState {
            mean: self.mean.select_rows(keep),
            cov: self.cov.select_rows(keep).select_columns(keep),
        })
    }

    /// Adds independent zero-mean Gaussian noise: the mean is unchanged and
    /// the covariance becomes `cov + noise_cov`.
    pub fn convolve(&self, noise_cov: &DMatrix<f64>) -> Result<Self> {
        let dim = self.dim();
        if noise_cov.nrows() != dim || noise_cov.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: noise_cov.nrows() });
        }
        if noise_cov.iter().any(|x| !x.is_finite()) || !is_symmetric(noise_cov, PSD_TOLERANCE * noise_cov.norm()) {
            return Err(Error::NonSymmetricNoise);
        }
        let min = min_eigenvalue(noise_cov);
        if min < -PSD_TOLERANCE * noise_cov.norm() {
            return Err(Error::IndefiniteNoise { min_eigenvalue: min });
        }
        Ok(GaussianState::from_parts(self.mean.clone(), &self.cov + noise_cov))
    }

    /// Conditions on `observed` coordinates taking `values`; returns the
    /// Gaussian on the remaining coordinates (in increasing index order).
    ///
    /// Mean `μ_u + Σ_uo Σ_oo⁻¹ (v - μ_o)`, covariance `Σ_uu - Σ_uo Σ_oo⁻¹ Σ_ou`.
    pub fn condition(&self, observed: &[usize], values: &[f64]) -> Result<Self> {
        check_indices(observed, self.dim())?;
        if values.len() != observed.len() {
            return Err(Error::DimensionMismatch { expected: observed.len(), found: values.len() });
        }
        let unobserved: Vec<usize> = (0..self.dim()).filter(|i| !observed.contains(i)).collect();
        if unobserved.is_empty() {
            return Err(Error::InvalidIndices("cannot condition on every coordinate".into()));
        }

        let sigma_oo = self.cov.select_rows(observed).select_columns(observed);
        let chol = proper_cholesky(&sigma_oo, |min_eigenvalue| Error::DegenerateObservedBlock { min_eigenvalue })?;
        let sigma_uo = self.cov.select_rows(&unobserved).select_columns(observed);
        let sigma_uu = self.cov.select_rows(&unobserved).select_columns(&unobserved);

        let residual = DVector::from_row_slice(values) - self.mean.select_rows(observed);
        // gain = Σ_uo Σ_oo⁻¹, computed as (Σ_oo⁻¹ Σ_ou)ᵀ
        let gain = chol.solve(&sigma_uo.transpose()).transpose();
        let mean = self.mean.select_rows(&unobserved) + &gain * residual;
        let cov = sigma_uu - &gain * sigma_uo.transpose();
        Ok(GaussianState::from_parts(mean, cov))
    }

    /// Pushes the distribution through the affine map `x ↦ A x + offset`.
    pub fn linear_map(&self, matrix: &DMatrix<f64>, offset: Option<&DVector<f64>>) -> Result<Self> {
        if matrix.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: matrix.ncols() });
        }
        let mut mean = matrix * &self.mean;
        if let Some(offset) = offset {
            if offset.len() != matrix.nrows() {
                return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: offset.len() });
            }
            mean += offset;
        }
        let cov = matrix * &self.cov * matrix.transpose();
        Ok(GaussianState::from_parts(mean, cov))
    }

    /// Joint distribution of two statistically independent states.
    pub fn product(&self, other: &GaussianState) -> Self {
        let (d1, d2) = (self.dim(), other.dim());
        let mut mean = DVector::zeros(d1 + d2);
        mean.rows_mut(0, d1).copy_from(&self.mean);
        mean.rows_mut(d1, d2).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(d1 + d2, d1 + d2);
        cov.view_mut((0, 0), (d1, d1)).copy_from(&self.cov);
        cov.view_mut((d1, d1), (d2, d2)).copy_from(&other.cov);
        GaussianState { mean, cov }
    }

    /// Rank-revealing square-root factor `L` with `L Lᵀ = cov`; columns beyond
    /// the numerical rank are zero, so exactly degenerate directions stay exact
    /// when sampling `mean + L z`.
    pub fn sampling_factor(&self) -> DMatrix<f64> {
        pivoted_cholesky(&self.cov)
    }
}

/// `∫ W₁ W₂ = exp(-½ δᵀ(V₁+V₂)⁻¹δ) / ((2π)^{d/2} √det(V₁+V₂))`, `δ = mean₁ - mean₂`.
///
/// For Wigner functions this is `(2π)^{-n} Tr[ρ₁ρ₂]`.
pub fn overlap(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    if s1.dim() != s2.dim() {
        return Err(Error::DimensionMismatch { expected: s1.dim(), found: s2.dim() });
    }
    let sum = &s1.cov + &s2.cov;
    let chol = proper_cholesky(&sum, |min_eigenvalue| Error::DegenerateCovariance { min_eigenvalue })?;
    let delta = &s1.mean - &s2.mean;
    Ok(gaussian_value(&chol, &delta))
}

/// Standard-form two-mode covariance parameters
///
/// ```text
/// V = | a  0  c1 0  |
///     | 0  a  0  c2 |
///     | c1 0  b  0  |
///     | 0  c2 0  b  |
/// ```
/// over `(q2, p2, q3, p3)`, zero mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceParams {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
}

impl ResourceParams {
    /// Accepts any finite tuple with `a, b ≥ 0`. Tuples with `ab < c²` are kept
    /// (the averaged-output and closed-form fidelity formulas still apply) but
    /// cannot be expanded into a density; see [`ResourceParams::is_proper`].
    pub fn new(a: f64, b: f64, c1: f64, c2: f64) -> Result<Self> {
        if ![a, b, c1, c2].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidResource("parameters must be finite".into()));
        }
        if a < 0.0 || b < 0.0 {
            return Err(Error::InvalidResource(format!("variances must be non-negative (a = {a}, b = {b})")));
        }
        Ok(ResourceParams { a, b, c1, c2 })
    }

    pub const fn zero() -> Self {
        ResourceParams { a: 0.0, b: 0.0, c1: 0.0, c2: 0.0 }
    }

    /// `(ab - c1², ab - c2²)`.
    pub fn block_determinants(&self) -> (f64, f64) {
        let ab = self.a * self.b;
        (ab - self.c1 * self.c1, ab - self.c2 * self.c2)
    }

    /// `det V = (ab - c1²)(ab - c2²)`.
    pub fn det(&self) -> f64 {
        let (d1, d2) = self.block_determinants();
        d1 * d2
    }

    /// Whether the covariance is positive semidefinite, i.e. defines a
    /// (possibly degenerate) density.
    pub fn is_proper(&self) -> bool {
        let (d1, d2) = self.block_determinants();
        let tol = PSD_TOLERANCE * (self.a * self.b).max(1.0);
        d1 >= -tol && d2 >= -tol
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        let Self { a, b, c1, c2 } = *self;
        #[rustfmt::skip]
        let cov = DMatrix::from_row_slice(4, 4, &[
            a,   0.0, c1,  0.0,
            0.0, a,   0.0, c2,
            c1,  0.0, b,   0.0,
            0.0, c2,  0.0, b,
        ]);
        cov
    }

    /// Expands into a zero-mean two-mode state.
    pub fn to_state(&self) -> Result<GaussianState> {
        if !self.is_proper() {
            let (det1, det2) = self.block_determinants();
            return Err(Error::ImproperResource { det1, det2 });
        }
        Ok(GaussianState::from_parts(DVector::zeros(4), self.covariance()))
    }
}

fn gaussian_value(chol: &Cholesky<f64, nalgebra::Dyn>, eta: &DVector<f64>) -> f64 {
    let dim = eta.len() as f64;
    let solved = chol.solve(eta);
    let quad = eta.dot(&solved);
    let log_det: f64 = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    (-0.5 * quad - 0.5 * dim * (2.0 * PI).ln() - 0.5 * log_det).exp()
}

fn proper_cholesky(
    cov: &DMatrix<f64>,
    err: impl Fn(f64) -> Error,
) -> Result<Cholesky<f64, nalgebra::Dyn>> {
    let min = min_eigenvalue(cov);
    if min < DEGENERATE_EIGENVALUE {
        return Err(err(min));
    }
    Cholesky::new(cov.clone()).ok_or_else(|| err(min))
}

fn check_indices(indices: &[usize], dim: usize) -> Result<()> {
    if indices.is_empty() {
        return Err(Error::InvalidIndices("index set is empty".into()));
    }
    for (k, &i) in indices.iter().enumerate() {
        if i >= dim {
            return Err(Error::DimensionMismatch { expected: dim, found: i + 1 });
        }
        if indices[..k].contains(&i) {
            return Err(Error::InvalidIndices(format!("index {i} repeated")));
        }
    }
    Ok(())
}

fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    m.is_square()
        && (0..m.nrows()).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= tol))
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

/// Cholesky with diagonal pivoting for positive semidefinite matrices.
fn pivoted_cholesky(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut work = m.clone();
    let mut factor = DMatrix::<f64>::zeros(n, n);
    let mut done = vec![false; n];
    let cutoff = PSD_TOLERANCE * m.norm();

    for col in 0..n {
        let pivot = (0..n)
            .filter(|&i| !done[i])
            .max_by(|&i, &j| work[(i, i)].total_cmp(&work[(j, j)]));
        let Some(pivot) = pivot else { break };
        let d = work[(pivot, pivot)];
        if d <= cutoff {
            break;
        }
        done[pivot] = true;
        let root = d.sqrt();
        for i in 0..n {
            factor[(i, col)] = if i == pivot {
                root
            } else if done[i] {
                0.0
            } else {
                work[(i, pivot)] / root
            };
        }
        for i in (0..n).filter(|&i| !done[i]) {
            for j in (0..n).filter(|&j| !done[j]) {
                work[(i, j)] -= factor[(i, col)] * factor[(j, col)];
            }
        }
    }
    factor
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_state(mean: &[f64], variances: &[f64]) -> GaussianState {
        GaussianState::new(
            DVector::from_row_slice(mean),
            DMatrix::from_diagonal(&DVector::from_row_slice(variances)),
        )
        .unwrap()
    }

    /// Trapezoid rule over a square box; spectrally accurate for Gaussians.
    fn integrate_2d(f: impl Fn(f64, f64) -> f64, half_width: f64, steps: usize) -> f64 {
        let h = 2.0 * half_width / steps as f64;
        let mut total = 0.0;
        for i in 0..=steps {
            let x = -half_width + i as f64 * h;
            let wx = if i == 0 || i == steps { 0.5 } else { 1.0 };
            for j in 0..=steps {
                let y = -half_width + j as f64 * h;
                let wy = if j == 0 || j == steps { 0.5 } else { 1.0 };
                total += wx * wy * f(x, y);
            }
        }
        total * h * h
    }

    #[test]
    fn coherent_density_at_origin_is_one_over_pi() {
        let s = GaussianState::coherent(0.0, 0.0).unwrap();
        assert!((s.density_at(&[0.0, 0.0]).unwrap() - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn density_at_mean_depends_only_on_determinant() {
        let s = GaussianState::single_mode([1.5, -0.25], [[2.0, 0.3], [0.3, 0.7]]).unwrap();
        let det: f64 = 2.0 * 0.7 - 0.09;
        let expected = 1.0 / (2.0 * PI * det.sqrt());
        assert!((s.density_at(&[1.5, -0.25]).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn vacuum_pair_density_at_origin() {
        let s = ResourceParams::new(0.5, 0.5, 0.0, 0.0).unwrap().to_state().unwrap();
        let d = s.density_at(&[0.0; 4]).unwrap();
        assert!((d - 1.0 / (PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn density_refuses_degenerate_and_wrong_dimension() {
        let s = diag_state(&[0.0, 0.0], &[1.0, 0.0]);
        assert!(matches!(s.density_at(&[0.0, 0.0]), Err(Error::DegenerateCovariance { .. })));
        let s = GaussianState::vacuum();
        assert!(matches!(s.density_at(&[0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn constructor_rejects_bad_covariances() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(GaussianState::new(DVector::zeros(2), asym).is_err());
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(GaussianState::new(DVector::zeros(2), indefinite).is_err());
        let nan = DMatrix::from_row_slice(2, 2, &[f64::NAN, 0.0, 0.0, 1.0]);
        assert!(GaussianState::new(DVector::zeros(2), nan).is_err());
        // exact zero eigenvalues are allowed
        assert!(GaussianState::new(DVector::zeros(2), DMatrix::zeros(2, 2)).is_ok());
    }

    #[test]
    fn normalization_by_quadrature() {
        let s = GaussianState::single_mode([0.3, -1.0], [[0.8, -0.35], [-0.35, 0.5]]).unwrap();
        let total = integrate_2d(|q, p| s.density_at(&[q + 0.3, p - 1.0]).unwrap(), 8.0, 400);
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }

    #[test]
    fn marginal_of_tmss_like_state_reads_diagonal_block() {
        let s = ResourceParams::new(1.0, 1.0, 0.9, -0.9).unwrap().to_state().unwrap();
        let m = s.marginal(&[2, 3]).unwrap();
        assert_eq!(m.mean().as_slice(), &[0.0, 0.0]);
        assert_eq!(m.cov(), &DMatrix::from_diagonal_element(2, 2, 1.0));

        let single = GaussianState::single_mode([1.0, 2.0], [[0.7, 0.1], [0.1, 0.4]]).unwrap();
        let q = single.marginal(&[0]).unwrap();
        assert_eq!(q.dim(), 1);
        assert_eq!(q.cov()[(0, 0)], 0.7);
        assert_eq!(q.mean()[0], 1.0);
    }

    #[test]
    fn receiver_marginal_matches_integration_over_sender() {
        let s = ResourceParams::new(1.0, 2.0, 0.5, 0.5).unwrap().to_state().unwrap();
        let m = s.marginal(&[2, 3]).unwrap();
        assert_eq!(m.cov(), &DMatrix::from_diagonal_element(2, 2, 2.0));
        for &(q3, p3) in &[(0.0, 0.0), (0.7, -1.2), (-2.0, 0.4)] {
            let integrated = integrate_2d(|q2, p2| s.density_at(&[q2, p2, q3, p3]).unwrap(), 9.0, 360);
            let direct = m.density_at(&[q3, p3]).unwrap();
            assert!((integrated - direct).abs() < 1e-9, "{integrated} vs {direct}");
        }
    }

    #[test]
    fn marginal_rejects_bad_index_sets() {
        let s = GaussianState::vacuum();
        assert!(s.marginal(&[]).is_err());
        assert!(s.marginal(&[2]).is_err());
        assert!(s.marginal(&[0, 0]).is_err());
    }

    #[test]
    fn overlap_examples() {
        let c = GaussianState::coherent(0.0, 0.0).unwrap();
        assert!((overlap(&c, &c).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);

        // V1 + V2 = I, so the exponent is -|δ|²/2 = -2.
        let shifted = GaussianState::coherent(2.0, 0.0).unwrap();
        let expected = (-2.0f64).exp() / (2.0 * PI);
        assert!((overlap(&c, &shifted).unwrap() - expected).abs() < 1e-15);
        let quad = integrate_2d(
            |q, p| c.density_at(&[q, p]).unwrap() * shifted.density_at(&[q, p]).unwrap(),
            10.0,
            400,
        );
        assert!((quad - expected).abs() < 1e-10);

        let thermal = diag_state(&[0.0, 0.0], &[1.5, 1.5]);
        assert!((overlap(&c, &thermal).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn overlap_requires_matching_dimensions() {
        let a = GaussianState::vacuum();
        let b = diag_state(&[0.0], &[1.0]);
        assert!(matches!(overlap(&a, &b), Err(Error::DimensionMismatch { .. })));
        let zero = diag_state(&[0.0, 0.0], &[0.0, 0.0]);
        assert!(matches!(overlap(&zero, &zero), Err(Error::DegenerateCovariance { .. })));
    }

    #[test]
    fn convolve_examples() {
        let c = GaussianState::coherent(0.4, -0.1).unwrap();
        assert_eq!(c.convolve(&DMatrix::zeros(2, 2)).unwrap(), c);
        let out = c.convolve(&DMatrix::identity(2, 2)).unwrap();
        assert_eq!(out.cov(), &DMatrix::from_diagonal_element(2, 2, 1.5));
        assert_eq!(out.mean(), c.mean());

        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.0, 1.0]);
        assert_eq!(c.convolve(&asym), Err(Error::NonSymmetricNoise));
        assert!(matches!(c.convolve(&DMatrix::identity(3, 3)), Err(Error::DimensionMismatch { .. })));
        let neg = DMatrix::from_diagonal_element(2, 2, -1.0);
        assert!(matches!(c.convolve(&neg), Err(Error::IndefiniteNoise { .. })));
    }

    #[test]
    fn condition_examples() {
        let joint = GaussianState::new(
            DVector::zeros(2),
            DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]),
        )
        .unwrap();
        let c = joint.condition(&[1], &[2.0]).unwrap();
        assert!((c.mean()[0] - 1.0).abs() < 1e-15);
        assert!((c.cov()[(0, 0)] - 0.75).abs() < 1e-15);

        let other = joint.condition(&[1], &[-7.0]).unwrap();
        assert_eq!(other.cov(), c.cov());

        let independent = diag_state(&[1.0, 2.0, 3.0], &[0.5, 2.0, 4.0]);
        let c = independent.condition(&[1], &[10.0]).unwrap();
        assert_eq!(c, independent.marginal(&[0, 2]).unwrap());
    }

    #[test]
    fn condition_errors() {
        let s = diag_state(&[0.0, 0.0], &[1.0, 0.0]);
        assert!(matches!(s.condition(&[1], &[0.0]), Err(Error::DegenerateObservedBlock { .. })));
        assert!(matches!(s.condition(&[0], &[0.0, 1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(s.condition(&[0, 1], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn resource_params_expand_to_standard_form() {
        let r = ResourceParams::new(1.0, 2.0, 0.5, -0.25).unwrap();
        let s = r.to_state().unwrap();
        let v = s.cov();
        assert_eq!((v[(0, 0)], v[(1, 1)], v[(2, 2)], v[(3, 3)]), (1.0, 1.0, 2.0, 2.0));
        assert_eq!((v[(0, 2)], v[(1, 3)], v[(0, 1)], v[(0, 3)]), (0.5, -0.25, 0.0, 0.0));
        assert!((r.det() - (2.0 - 0.25) * (2.0 - 0.0625)).abs() < 1e-15);

        assert!(ResourceParams::new(-1.0, 0.0, 0.0, 0.0).is_err());
        assert!(ResourceParams::new(f64::NAN, 0.0, 0.0, 0.0).is_err());
        let improper = ResourceParams::new(0.5, 0.5, 2.0, 0.0).unwrap();
        assert!(matches!(improper.to_state(), Err(Error::ImproperResource { .. })));
    }

    #[test]
    fn pivoted_factor_reproduces_covariance() {
        let r = ResourceParams::new(1.0, 1.0, 1.0, -1.0).unwrap().to_state().unwrap();
        let l = r.sampling_factor();
        assert!((&l * l.transpose() - r.cov()).norm() < 1e-14);
        // rank 2: two zero columns
        let nonzero = (0..4).filter(|&j| l.column(j).norm() > 0.0).count();
        assert_eq!(nonzero, 2);

        let s = GaussianState::single_mode([0.0, 0.0], [[0.8, -0.35], [-0.35, 0.5]]).unwrap();
        let l = s.sampling_factor();
        assert!((&l * l.transpose() - s.cov()).norm() < 1e-15);
        assert_eq!(GaussianState::new(DVector::zeros(2), DMatrix::zeros(2, 2)).unwrap().sampling_factor(), DMatrix::zeros(2, 2));
    }

    #[test]
    fn repr_round_trip() {
        let s = GaussianState::single_mode([0.1, 0.2], [[0.8, -0.35], [-0.35, 0.5]]).unwrap();
        let repr: StateRepr = s.clone().into();
        assert_eq!(repr.cov[0][1], -0.35);
        assert_eq!(GaussianState::try_from(repr).unwrap(), s);
        let ragged = StateRepr { mean: vec![0.0, 0.0], cov: vec![vec![1.0, 0.0], vec![0.0]] };
        assert!(GaussianState::try_from(ragged).is_err());
    }
}
