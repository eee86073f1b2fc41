use alloc::vec::Vec;

use super::{Matrix, C64};
use crate::{Error, Result};
// Float math for targets without std; shadowed by inherent methods otherwise.
#[allow(unused_imports)]
use num_traits::Float;

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn trace(m: &Matrix) -> C64 {
    m.trace()
}

/// Max-abs deviation of `m` from its adjoint.
pub fn hermiticity_residual(m: &Matrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Max-abs deviation of `u†u` from the identity.
pub fn unitarity_residual(u: &Matrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &Matrix::identity(n, n))
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are returned in ascending order; column `k` of the matrix is the
/// eigenvector for eigenvalue `k`. The input is symmetrized first, so small
/// anti-Hermitian noise is ignored.
pub fn eig_hermitian(m: &Matrix) -> (Vec<f64>, Matrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), Matrix::zeros(0, 0));
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn eigenvalues_hermitian(m: &Matrix) -> Vec<f64> {
    eig_hermitian(m).0
}

/// Rebuild `V diag(f(λ)) V†` from an eigendecomposition.
pub fn spectral_map(values: &[f64], vectors: &Matrix, f: impl Fn(f64) -> f64) -> Matrix {
    let n = vectors.nrows();
    let mut scaled = vectors.clone();
    for (c, &v) in values.iter().enumerate() {
        let s = f(v);
        for r in 0..n {
            scaled[(r, c)] *= s;
        }
    }
    scaled * vectors.adjoint()
}

/// Principal square root of a positive semidefinite operator.
///
/// Eigenvalues in `[-tol, 0)` are clipped to zero; anything more negative is
/// rejected.
pub fn psd_sqrt(m: &Matrix, tol: f64) -> Result<Matrix> {
    let (values, vectors) = eig_hermitian(m);
    if let Some(&min) = values.first() {
        if min < -tol {
            return Err(Error::NotPsd(min));
        }
    }
    Ok(spectral_map(&values, &vectors, |v| v.max(0.0).sqrt()))
}

/// Eigenvalues below this are treated as numerical zeros by [`fidelity`].
const FIDELITY_CUTOFF: f64 = 1e-13;

/// Uhlmann fidelity `(tr sqrt(sqrt(ρ) σ sqrt(ρ)))²`, clamped to `[0, 1]`.
///
/// Computed as `‖√μ W √ν‖₁²` from the two spectral decompositions, which keeps
/// noise-level eigenvalues from entering through a square root.
pub fn fidelity(rho: &Matrix, sigma: &Matrix) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "fidelity between {:?} and {:?}",
            rho.shape(),
            sigma.shape()
        )));
    }
    let (nu, ur) = eig_hermitian(rho);
    let (mu, us) = eig_hermitian(sigma);
    let root = |v: f64| if v > FIDELITY_CUTOFF { v.sqrt() } else { 0.0 };
    let mut w = us.adjoint() * ur;
    for i in 0..w.nrows() {
        for j in 0..w.ncols() {
            w[(i, j)] *= C64::new(root(mu[i]) * root(nu[j]), 0.0);
        }
    }
    let nuclear: f64 = w.singular_values().iter().sum();
    Ok((nuclear * nuclear).clamp(0.0, 1.0))
}

/// Trace distance `½ ‖ρ − σ‖₁`.
pub fn trace_distance(rho: &Matrix, sigma: &Matrix) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "trace distance between {:?} and {:?}",
            rho.shape(),
            sigma.shape()
        )));
    }
    let diff = rho - sigma;
    Ok(0.5 * eigenvalues_hermitian(&diff).iter().map(|v| v.abs()).sum::<f64>())
}

/// Von Neumann entropy in nats.
pub fn von_neumann_entropy(rho: &Matrix) -> f64 {
    eigenvalues_hermitian(rho)
        .iter()
        .filter(|&&p| p > 1e-15)
        .map(|&p| -p * p.ln())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{random, DEFAULT_TOL};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sqrt_of_identity() {
        let id = Matrix::identity(3, 3);
        assert!(max_abs_diff(&psd_sqrt(&id, DEFAULT_TOL).unwrap(), &id) < 1e-14);
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random::random_density(5, &mut rng).into_matrix();
        let s = psd_sqrt(&rho, DEFAULT_TOL).unwrap();
        assert!(max_abs_diff(&(&s * &s), &rho) < 1e-12);
    }

    #[test]
    fn sqrt_rejects_negative_operator() {
        let mut m = Matrix::identity(2, 2);
        m[(1, 1)] = C64::new(-0.1, 0.0);
        assert!(matches!(psd_sqrt(&m, DEFAULT_TOL), Err(Error::NotPsd(_))));
    }

    #[test]
    fn sqrt_clips_tiny_negative_eigenvalues() {
        let mut m = Matrix::identity(2, 2);
        m[(1, 1)] = C64::new(-1e-12, 0.0);
        let s = psd_sqrt(&m, DEFAULT_TOL).unwrap();
        assert_eq!(s[(1, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn fidelity_with_self_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random::random_density(4, &mut rng).into_matrix();
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eig_reconstructs_random_hermitian_up_to_64() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &n in &[1usize, 2, 7, 16, 33, 64] {
            let g = random::ginibre(n, n, &mut rng);
            let h = &g + g.adjoint();
            let (vals, vecs) = eig_hermitian(&h);
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
            let back = spectral_map(&vals, &vecs, |v| v);
            assert!(max_abs_diff(&back, &h) < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn trace_distance_of_orthogonal_states_is_one() {
        let mut a = Matrix::zeros(2, 2);
        a[(0, 0)] = C64::new(1.0, 0.0);
        let mut b = Matrix::zeros(2, 2);
        b[(1, 1)] = C64::new(1.0, 0.0);
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-14);
    }
}
