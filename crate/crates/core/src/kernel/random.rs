//! Seeded sampling of random matrices and states. Every function takes the
//! generator explicitly.

use alloc::vec;

use rand::Rng;
use rand_distr::StandardNormal;

use super::state::{DensityOperator, PureState};
use super::{Matrix, Vector, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-distributed `d x d` unitary (QR of a Ginibre matrix with the phase of
/// `R`'s diagonal divided out).
pub fn haar_random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for c in 0..d {
        let diag = r[(c, c)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { C64::new(1.0, 0.0) };
        for row in 0..d {
            q[(row, c)] *= phase;
        }
    }
    q
}

/// Haar-random `rows x cols` isometry (`rows >= cols`), the first columns of a Haar unitary.
pub fn haar_random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let u = haar_random_unitary(rows, rng);
    u.columns(0, cols).into_owned()
}

/// Uniformly random pure state of dimension `d` on a single wire.
pub fn random_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState {
    let v = Vector::from_fn(d, |_, _| gaussian(rng));
    let norm = v.norm();
    PureState::from_parts_unchecked(v.unscale(norm), vec![d])
}

/// Random density operator drawn from the Hilbert-Schmidt measure.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityOperator {
    let g = ginibre(d, d, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::from_parts_unchecked(m.unscale(tr), vec![d])
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix {
    let g = ginibre(d, d, rng);
    (&g + g.adjoint()).scale(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::linalg::{max_abs_diff, unitarity_residual};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_samples_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 2..6 {
            assert!(unitarity_residual(&haar_random_unitary(d, &mut rng)) < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_sample() {
        let a = haar_random_unitary(3, &mut ChaCha8Rng::seed_from_u64(9));
        let b = haar_random_unitary(3, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    /// First moment: E[U|0><0|U†] = I/d. Each entry of the sample mean has
    /// standard deviation at most 1/sqrt(samples), so 3σ is 0.03 for 1e4 draws.
    #[test]
    fn haar_first_moment() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let samples = 10_000;
        for d in [2usize, 3] {
            let mut mean = Matrix::zeros(d, d);
            for _ in 0..samples {
                let u = haar_random_unitary(d, &mut rng);
                let col = u.column(0);
                mean += col * col.adjoint();
            }
            mean.unscale_mut(samples as f64);
            let target = Matrix::identity(d, d).unscale(d as f64);
            assert!(max_abs_diff(&mean, &target) < 3.0 / (samples as f64).sqrt());
        }
    }

    /// Left-invariance: the distribution of V·U matches that of U, checked on
    /// the statistic |U_00|² whose Haar mean is 1/d.
    #[test]
    fn haar_left_invariance_statistic() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let d = 3;
        let v = haar_random_unitary(d, &mut rng);
        let samples = 10_000;
        let mut plain = 0.0;
        let mut shifted = 0.0;
        for _ in 0..samples {
            let u = haar_random_unitary(d, &mut rng);
            plain += u[(0, 0)].norm_sqr();
            shifted += (&v * &u)[(0, 0)].norm_sqr();
        }
        let (plain, shifted) = (plain / samples as f64, shifted / samples as f64);
        // Var |U_00|² = (d-1)/(d²(d+1)) for Haar U; 5σ band on each mean.
        let sigma = (((d - 1) as f64) / ((d * d * (d + 1)) as f64) / samples as f64).sqrt();
        assert!((plain - 1.0 / d as f64).abs() < 5.0 * sigma);
        assert!((shifted - 1.0 / d as f64).abs() < 5.0 * sigma);
    }

    #[test]
    fn random_density_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rho = random_density(4, &mut rng);
        assert!(DensityOperator::new(rho.matrix().clone(), vec![4]).is_ok());
    }
}
