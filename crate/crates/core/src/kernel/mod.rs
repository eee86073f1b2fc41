//! Dense complex linear algebra over multi-wire Hilbert spaces.

pub mod linalg;
pub mod random;
pub mod state;
pub mod wires;

pub use linalg::{eig_hermitian, fidelity, max_abs_diff, psd_sqrt, trace_distance};
pub use random::{haar_random_unitary, random_density, random_pure};
pub use state::{DensityOperator, PureState};
pub use wires::{kron, partial_trace, partial_transpose};

pub type C64 = num_complex::Complex64;
pub type Matrix = nalgebra::DMatrix<C64>;
pub type Vector = nalgebra::DVector<C64>;

/// Default tolerance for positivity, trace and unitarity checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
