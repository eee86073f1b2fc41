//! Standard gate matrices and qudit Pauli operators.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::kernel::{c, Matrix, C64};

fn m2(a: C64, b: C64, c_: C64, d: C64) -> Matrix {
    Matrix::from_row_slice(2, 2, &[a, b, c_, d])
}

pub fn identity(d: usize) -> Matrix {
    Matrix::identity(d, d)
}

pub fn x() -> Matrix {
    m2(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

pub fn y() -> Matrix {
    m2(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
}

pub fn z() -> Matrix {
    m2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

pub fn h() -> Matrix {
    let s = FRAC_1_SQRT_2;
    m2(c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0))
}

/// Phase gate `S = Z^{1/2}`.
pub fn s() -> Matrix {
    m2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0))
}

/// `T = Z^{1/4}`.
pub fn t() -> Matrix {
    m2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, PI / 4.0))
}

/// CNOT with wire 0 as control.
pub fn cnot() -> Matrix {
    let mut m = Matrix::zeros(4, 4);
    m[(0, 0)] = c(1.0, 0.0);
    m[(1, 1)] = c(1.0, 0.0);
    m[(2, 3)] = c(1.0, 0.0);
    m[(3, 2)] = c(1.0, 0.0);
    m
}

pub fn cz() -> Matrix {
    let mut m = Matrix::identity(4, 4);
    m[(3, 3)] = c(-1.0, 0.0);
    m
}

pub fn swap() -> Matrix {
    let mut m = Matrix::zeros(4, 4);
    m[(0, 0)] = c(1.0, 0.0);
    m[(1, 2)] = c(1.0, 0.0);
    m[(2, 1)] = c(1.0, 0.0);
    m[(3, 3)] = c(1.0, 0.0);
    m
}

/// Qudit shift `X|j> = |j+1 mod d>`.
pub fn shift(d: usize) -> Matrix {
    let mut m = Matrix::zeros(d, d);
    for j in 0..d {
        m[((j + 1) % d, j)] = c(1.0, 0.0);
    }
    m
}

/// Qudit clock `Z|j> = e^{2πij/d}|j>`.
pub fn clock(d: usize) -> Matrix {
    let mut m = Matrix::zeros(d, d);
    for j in 0..d {
        m[(j, j)] = C64::from_polar(1.0, 2.0 * PI * j as f64 / d as f64);
    }
    m
}

/// `X^x Z^z` on one qudit of dimension `d`.
pub fn pauli(d: usize, x_exp: usize, z_exp: usize) -> Matrix {
    let mut m = Matrix::zeros(d, d);
    for j in 0..d {
        let phase = C64::from_polar(1.0, 2.0 * PI * ((z_exp * j) % d) as f64 / d as f64);
        m[((j + x_exp) % d, j)] = phase;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::linalg::{max_abs_diff, unitarity_residual};

    #[test]
    fn pauli_matches_shift_and_clock_products() {
        for d in [2usize, 3, 4] {
            for a in 0..d {
                for b in 0..d {
                    let mut expected = identity(d);
                    for _ in 0..a {
                        expected = shift(d) * expected;
                    }
                    let mut zb = identity(d);
                    for _ in 0..b {
                        zb = clock(d) * zb;
                    }
                    expected *= zb;
                    assert!(max_abs_diff(&pauli(d, a, b), &expected) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn qubit_paulis_agree() {
        assert!(max_abs_diff(&pauli(2, 1, 0), &x()) < 1e-15);
        assert!(max_abs_diff(&pauli(2, 0, 1), &z()) < 1e-15);
    }

    #[test]
    fn t_squared_is_s() {
        assert!(max_abs_diff(&(t() * t()), &s()) < 1e-15);
    }

    #[test]
    fn all_gates_unitary() {
        for g in [x(), y(), z(), h(), s(), t(), cnot(), cz(), swap(), shift(3), clock(5)] {
            assert!(unitarity_residual(&g) < 1e-14);
        }
    }
}
