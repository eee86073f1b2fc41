use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;


use super::linalg::{self, eigenvalues_hermitian};
use super::wires;
use super::{Matrix, Vector, C64, DEFAULT_TOL};
use crate::{Error, Result};

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::DimensionMismatch("empty dimension vector".into()));
    }
    if let Some(&d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidDimension(d));
    }
    Ok(dims.iter().product())
}

/// A positive, trace-one operator with labelled subsystem wires.
///
/// A sub-normalized variant (trace in `(0, 1]`) is available through
/// [`DensityOperator::subnormalized`] for intermediate results of post-selected
/// operations.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: Matrix,
    dims: Vec<usize>,
    labels: Option<Vec<String>>,
}

impl DensityOperator {
    pub fn new(matrix: Matrix, dims: Vec<usize>) -> Result<Self> {
        Self::with_tolerance(matrix, dims, DEFAULT_TOL)
    }

    /// Validate Hermiticity, positivity and unit trace to within `tol`.
    pub fn with_tolerance(matrix: Matrix, dims: Vec<usize>, tol: f64) -> Result<Self> {
        let state = Self::subnormalized_with_tolerance(matrix, dims, tol)?;
        let tr = state.trace();
        if (tr - 1.0).abs() > tol {
            return Err(Error::InvalidState(alloc::format!("trace {tr} differs from 1")));
        }
        Ok(state)
    }

    /// Accept a positive operator whose trace lies in `(0, 1]`.
    pub fn subnormalized(matrix: Matrix, dims: Vec<usize>) -> Result<Self> {
        Self::subnormalized_with_tolerance(matrix, dims, DEFAULT_TOL)
    }

    fn subnormalized_with_tolerance(matrix: Matrix, dims: Vec<usize>, tol: f64) -> Result<Self> {
        let n = check_dims(&dims)?;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch(alloc::format!(
                "matrix is {}x{} but dims {:?} give {}",
                matrix.nrows(),
                matrix.ncols(),
                dims,
                n
            )));
        }
        let herm = linalg::hermiticity_residual(&matrix);
        if herm > tol {
            return Err(Error::NotHermitian(herm));
        }
        let min = eigenvalues_hermitian(&matrix)[0];
        if min < -tol {
            return Err(Error::NotPsd(min));
        }
        let tr = matrix.trace().re;
        if tr <= tol || tr > 1.0 + tol {
            return Err(Error::InvalidState(alloc::format!("trace {tr} outside (0, 1]")));
        }
        Ok(Self { matrix, dims, labels: None })
    }

    /// Wrap a matrix produced by an internal operation that preserves validity.
    pub(crate) fn from_parts_unchecked(matrix: Matrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(matrix.nrows(), dims.iter().product::<usize>());
        Self { matrix, dims, labels: None }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let n = check_dims(&dims)?;
        Ok(Self::from_parts_unchecked(Matrix::identity(n, n).unscale(n as f64), dims))
    }

    /// Computational basis projector `|index><index|`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        Ok(PureState::basis(dims, index)?.to_density())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dims.len() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} labels for {} wires",
                labels.len(),
                self.dims.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_wires(&self) -> usize {
        self.dims.len()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigenvalues_hermitian(&self.matrix)
    }

    /// Rescale to unit trace.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= 0.0 {
            return Err(Error::ZeroProbability);
        }
        Ok(Self { matrix: self.matrix.unscale(tr), dims: self.dims.clone(), labels: self.labels.clone() })
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::from_parts_unchecked(wires::kron(&self.matrix, &other.matrix), dims)
    }

    /// Reduced state on `keep`, in the order listed.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let m = wires::partial_trace(&self.matrix, &self.dims, keep)?;
        let dims = keep.iter().map(|&w| self.dims[w]).collect();
        Ok(Self::from_parts_unchecked(m, dims))
    }

    /// Partial transpose on `part`; the result is Hermitian but not necessarily positive.
    pub fn partial_transpose(&self, part: &[usize]) -> Result<Matrix> {
        wires::partial_transpose(&self.matrix, &self.dims, part)
    }

    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let (m, dims) = wires::permute_wires(&self.matrix, &self.dims, order)?;
        let labels = self.labels.as_ref().map(|l| order.iter().map(|&w| l[w].clone()).collect());
        Ok(Self { matrix: m, dims, labels })
    }

    /// `U ρ U†` with `op` acting on `wires`.
    pub fn evolve(&self, op: &Matrix, wires_: &[usize]) -> Result<Self> {
        let m = wires::conjugate_on(&self.matrix, &self.dims, op, wires_)?;
        Ok(Self::from_parts_unchecked(m, self.dims.clone()))
    }

    /// `tr(A ρ)` for a Hermitian observable on the full space.
    pub fn expectation(&self, obs: &Matrix) -> Result<f64> {
        if obs.shape() != self.matrix.shape() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "observable {:?} for state {:?}",
                obs.shape(),
                self.matrix.shape()
            )));
        }
        let herm = linalg::hermiticity_residual(obs);
        if herm > DEFAULT_TOL {
            return Err(Error::NotHermitian(herm));
        }
        Ok((obs * &self.matrix).trace().re)
    }

    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        linalg::fidelity(&self.matrix, &other.matrix)
    }

    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        linalg::trace_distance(&self.matrix, &other.matrix)
    }
}

/// A normalized state vector over labelled wires.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    vector: Vector,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(vector: Vector, dims: Vec<usize>) -> Result<Self> {
        let n = check_dims(&dims)?;
        if vector.len() != n {
            return Err(Error::DimensionMismatch(alloc::format!(
                "vector of length {} for dims {:?}",
                vector.len(),
                dims
            )));
        }
        let norm = vector.norm();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidState(alloc::format!("vector norm {norm} differs from 1")));
        }
        Ok(Self { vector, dims })
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn from_unnormalized(vector: Vector, dims: Vec<usize>) -> Result<Self> {
        let norm = vector.norm();
        if norm <= f64::EPSILON {
            return Err(Error::ZeroProbability);
        }
        Self::new(vector.unscale(norm), dims)
    }

    pub(crate) fn from_parts_unchecked(vector: Vector, dims: Vec<usize>) -> Self {
        Self { vector, dims }
    }

    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let n = check_dims(&dims)?;
        if index >= n {
            return Err(Error::DimensionMismatch(alloc::format!("basis index {index} for dimension {n}")));
        }
        let mut v = Vector::zeros(n);
        v[index] = C64::new(1.0, 0.0);
        Ok(Self { vector: v, dims })
    }

    pub fn vector(&self) -> &Vector {
        &self.vector
    }

    pub fn into_vector(self) -> Vector {
        self.vector
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator::from_parts_unchecked(&self.vector * self.vector.adjoint(), self.dims.clone())
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { vector: wires::kron_vec(&self.vector, &other.vector), dims }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.vector.len() != other.vector.len() {
            return Err(Error::DimensionMismatch("inner product of different dimensions".into()));
        }
        Ok(self.vector.dotc(&other.vector))
    }

    /// Apply a unitary on `wires_`.
    pub fn evolve(&self, op: &Matrix, wires_: &[usize]) -> Result<Self> {
        let v = wires::apply_to_vector(&self.vector, &self.dims, op, wires_)?;
        Ok(Self { vector: v, dims: self.dims.clone() })
    }

    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let v = wires::permute_vector(&self.vector, &self.dims, order)?;
        Ok(Self { vector: v, dims: order.iter().map(|&w| self.dims[w]).collect() })
    }
}

/// `|+>`, `|->`, `|+i>`, `|-i>` and friends as density operators on one qubit.
pub fn qubit_state(amp0: C64, amp1: C64) -> Result<DensityOperator> {
    let v = Vector::from_vec(vec![amp0, amp1]);
    Ok(PureState::from_unnormalized(v, vec![2])?.to_density())
}
