//! Program memory: writing inputs into tails, reading outputs from heads.
//!
//! An input `ρ` is written into a program's tail by the binary measurement
//! `{√ρᵗ, √(1−ρᵗ)}`. On the `√ρᵗ` outcome the head holds `E(ρ)/tr E(ρ)` and
//! the outcome has probability `tr E(ρ)/d_tail`.

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::Rng;

use crate::channel::{unitary_program, Channel, ProgramState};
use crate::gates;
use crate::kernel::linalg::psd_sqrt;
use crate::kernel::wires::{conjugate_on, partial_trace};
use crate::kernel::{DensityOperator, Matrix, C64, DEFAULT_TOL};
use crate::{Error, Result};
// Float math for targets without std; shadowed by inherent methods otherwise.
#[allow(unused_imports)]
use num_traits::Float;

/// Result of one write-in measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct WriteOutcome {
    pub success: bool,
    /// Probability of the outcome that occurred (or was post-selected).
    pub probability: f64,
    /// Normalized head state for that outcome; `None` if it has probability 0.
    pub head_state: Option<DensityOperator>,
}

fn tail_operator(p: &ProgramState, rho: &DensityOperator, complement: bool) -> Result<Matrix> {
    let tail_dims = p.tail_dims();
    if rho.dims() != tail_dims.as_slice() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "input dims {:?} do not match tail dims {:?}",
            rho.dims(),
            tail_dims
        )));
    }
    let rt = rho.matrix().transpose();
    let m = if complement { Matrix::identity(rt.nrows(), rt.ncols()) - rt } else { rt };
    psd_sqrt(&m, DEFAULT_TOL)
}

fn branch(p: &ProgramState, rho: &DensityOperator, complement: bool) -> Result<WriteOutcome> {
    let op = tail_operator(p, rho, complement)?;
    let post = conjugate_on(p.matrix(), p.state().dims(), &op, p.tail_wires())?;
    let head = partial_trace(&post, p.state().dims(), p.head_wires())?;
    let prob = head.trace().re.clamp(0.0, 1.0);
    let head_state = if prob > f64::EPSILON {
        Some(DensityOperator::new(head.unscale(prob), p.head_dims())?)
    } else {
        None
    };
    Ok(WriteOutcome { success: !complement, probability: prob, head_state })
}

/// Write `ρ` into the tail and post-select the `√ρᵗ` outcome.
pub fn write_input(p: &ProgramState, rho: &DensityOperator) -> Result<WriteOutcome> {
    branch(p, rho, false)
}

/// Both branches of the write-in measurement: `(success, failure)`.
pub fn write_branches(p: &ProgramState, rho: &DensityOperator) -> Result<(WriteOutcome, WriteOutcome)> {
    Ok((branch(p, rho, false)?, branch(p, rho, true)?))
}

/// Perform the write-in measurement once, sampling the outcome.
pub fn write_input_sampled<R: Rng + ?Sized>(
    p: &ProgramState,
    rho: &DensityOperator,
    rng: &mut R,
) -> Result<WriteOutcome> {
    let ok = branch(p, rho, false)?;
    if rng.random::<f64>() < ok.probability {
        Ok(ok)
    } else {
        branch(p, rho, true)
    }
}

/// Write `ρ` into a subset of the tail wires (success branch) and keep every
/// other wire. `wires` are indices into the program's state; the returned
/// state lives on the remaining wires in ascending order.
pub fn write_partial(p: &ProgramState, rho: &DensityOperator, wires: &[usize]) -> Result<(DensityOperator, f64)> {
    if let Some(&w) = wires.iter().find(|w| !p.tail_wires().contains(w)) {
        return Err(Error::InvalidState(alloc::format!("wire {w} is not a tail wire")));
    }
    let dims = p.state().dims();
    let sub: Vec<usize> = wires.iter().map(|&w| dims[w]).collect();
    if rho.dims() != sub.as_slice() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "input dims {:?} do not match wires {:?}",
            rho.dims(),
            sub
        )));
    }
    let op = psd_sqrt(&rho.matrix().transpose(), DEFAULT_TOL)?;
    let post = conjugate_on(p.matrix(), dims, &op, wires)?;
    let keep: Vec<usize> = (0..dims.len()).filter(|w| !wires.contains(w)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&w| dims[w]).collect();
    let reduced = partial_trace(&post, dims, &keep)?;
    let prob = reduced.trace().re;
    if prob <= f64::EPSILON {
        return Err(Error::ZeroProbability);
    }
    Ok((DensityOperator::new(reduced.unscale(prob), kept_dims)?, prob))
}

/// `tr(obs · head)`.
pub fn read_expectation(head: &DensityOperator, obs: &Matrix) -> Result<f64> {
    head.expectation(obs)
}

/// The classical channel `ρ ↦ Σ_i tr(F_i ρ)|i><i|` with `F_i = Σ_j S_ij |j><j|`.
///
/// `s` must be column-stochastic: column `j` is the output distribution for
/// input `j`.
pub fn stochastic_to_channel(s: &DMatrix<f64>) -> Result<Channel> {
    let (rows, cols) = s.shape();
    if rows < 2 || cols < 2 {
        return Err(Error::NotStochastic(alloc::format!("{rows}x{cols} matrix is too small")));
    }
    if let Some(v) = s.iter().find(|v| !v.is_finite() || **v < -DEFAULT_TOL) {
        return Err(Error::NotStochastic(alloc::format!("entry {v} is negative")));
    }
    for (j, col) in s.column_iter().enumerate() {
        let sum: f64 = col.sum();
        if (sum - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotStochastic(alloc::format!("column {j} sums to {sum}")));
        }
    }
    let mut kraus = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let w = s[(i, j)].max(0.0);
            if w > 0.0 {
                let mut k = Matrix::zeros(rows, cols);
                k[(i, j)] = C64::new(w.sqrt(), 0.0);
                kraus.push(k);
            }
        }
    }
    Channel::from_kraus(kraus, alloc::vec![cols], alloc::vec![rows])
}

/// Somewhere to fetch named programs from.
pub trait ProgramStore {
    fn fetch(&self, name: &str) -> Result<ProgramState>;
}

/// The qubit gate programs every machine ships with: `I`, `X`, `Z`, `H`,
/// `S`, `T` and `CNOT`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuiltinPrograms;

impl BuiltinPrograms {
    pub const NAMES: [&'static str; 7] = ["CNOT", "H", "I", "S", "T", "X", "Z"];

    pub fn gate(name: &str) -> Option<Matrix> {
        Some(match name {
            "I" => gates::identity(2),
            "X" => gates::x(),
            "Z" => gates::z(),
            "H" => gates::h(),
            "S" => gates::s(),
            "T" => gates::t(),
            "CNOT" => gates::cnot(),
            _ => return None,
        })
    }
}

impl ProgramStore for BuiltinPrograms {
    fn fetch(&self, name: &str) -> Result<ProgramState> {
        let u = Self::gate(name).ok_or_else(|| Error::MissingProgram(String::from(name)))?;
        let wires = if u.nrows() == 4 { alloc::vec![2, 2] } else { alloc::vec![2] };
        unitary_program(&u, wires)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply, choi_of};
    use crate::kernel::linalg::max_abs_diff;
    use crate::kernel::random::{haar_random_unitary, random_density};
    use crate::kernel::state::qubit_state;
    use crate::kernel::wires::kron;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    // Independent oracle: d · tr_tail[(1 ⊗ √ρᵗ) ω (1 ⊗ √ρᵗ)] written out with
    // explicit index loops (single head and tail wire).
    fn oracle_head(p: &ProgramState, rho: &DensityOperator) -> Matrix {
        let (dh, dt) = (p.head_dim(), p.tail_dim());
        let a = psd_sqrt(&rho.matrix().transpose(), 1e-12).unwrap();
        let full = kron(&Matrix::identity(dh, dh), &a);
        let post = &full * p.matrix() * full.adjoint();
        let mut out = Matrix::zeros(dh, dh);
        for i in 0..dh {
            for j in 0..dh {
                for t in 0..dt {
                    out[(i, j)] += post[(i * dt + t, j * dt + t)];
                }
            }
        }
        out
    }

    #[test]
    fn identity_program_writes_zero() {
        let p = BuiltinPrograms.fetch("I").unwrap();
        let rho = DensityOperator::basis(alloc::vec![2], 0).unwrap();
        let w = write_input(&p, &rho).unwrap();
        assert!(w.success);
        assert!((w.probability - 0.5).abs() < 1e-12);
        let head = w.head_state.unwrap();
        assert!(max_abs_diff(head.matrix(), rho.matrix()) < 1e-12);
        assert!(max_abs_diff(&oracle_head(&p, &rho).scale(2.0), rho.matrix()) < 1e-12);
    }

    #[test]
    fn hadamard_program_makes_plus() {
        let p = BuiltinPrograms.fetch("H").unwrap();
        let rho = DensityOperator::basis(alloc::vec![2], 0).unwrap();
        let head = write_input(&p, &rho).unwrap().head_state.unwrap();
        let plus = Matrix::from_element(2, 2, r(0.5));
        assert!(max_abs_diff(head.matrix(), &plus) < 1e-12);
    }

    #[test]
    fn mixed_input_gives_channel_of_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let ch = Channel::random(3, 3, 2, &mut rng).unwrap();
        let p = choi_of(&ch).unwrap();
        let rho = DensityOperator::maximally_mixed(alloc::vec![3]).unwrap();
        let head = write_input(&p, &rho).unwrap().head_state.unwrap();
        let direct = apply(&ch, &rho).unwrap();
        assert!(max_abs_diff(head.matrix(), direct.matrix()) < 1e-12);
    }

    #[test]
    fn write_matches_oracle_on_random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for d in [2usize, 3] {
            for _ in 0..5 {
                let ch = Channel::random(d, d, 3, &mut rng).unwrap();
                let p = choi_of(&ch).unwrap();
                let rho = random_density(d, &mut rng);
                let w = write_input(&p, &rho).unwrap();
                assert!((w.probability - 1.0 / d as f64).abs() < 1e-10);
                let oracle = oracle_head(&p, &rho).scale(d as f64);
                assert!(max_abs_diff(w.head_state.unwrap().matrix(), &oracle) < 1e-10);
            }
        }
    }

    #[test]
    fn branch_probabilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let p = unitary_program(&haar_random_unitary(2, &mut rng), alloc::vec![2]).unwrap();
        let rho = random_density(2, &mut rng);
        let (ok, fail) = write_branches(&p, &rho).unwrap();
        assert!(!fail.success);
        assert!((ok.probability + fail.probability - 1.0).abs() < 1e-12);
        assert!((fail.head_state.unwrap().trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn write_rejects_wrong_dims() {
        let p = BuiltinPrograms.fetch("H").unwrap();
        let rho = DensityOperator::maximally_mixed(alloc::vec![3]).unwrap();
        assert!(matches!(write_input(&p, &rho), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn read_out_of_t_program() {
        let p = BuiltinPrograms.fetch("T").unwrap();
        let s = 0.5f64.sqrt();
        let plus = qubit_state(r(s), r(s)).unwrap();
        let head = write_input(&p, &plus).unwrap().head_state.unwrap();
        let y = read_expectation(&head, &gates::y()).unwrap();
        assert!((y - s).abs() < 1e-12);
        assert!((read_expectation(&head, &Matrix::identity(2, 2)).unwrap() - 1.0).abs() < 1e-12);
        assert!(read_expectation(&head, &gates::s()).is_err());
    }

    #[test]
    fn partial_write_into_cnot_control() {
        let p = BuiltinPrograms.fetch("CNOT").unwrap();
        let one = DensityOperator::basis(alloc::vec![2], 1).unwrap();
        // Write |1> into the control tail (wire 2); the target stays open.
        let (rest, prob) = write_partial(&p, &one, &[2]).unwrap();
        assert!((prob - 0.5).abs() < 1e-12);
        assert_eq!(rest.dims(), &[2, 2, 2]);
        let zero = DensityOperator::basis(alloc::vec![2], 0).unwrap();
        let prog = ProgramState::from_choi_matrix(rest.into_matrix(), alloc::vec![2, 2], alloc::vec![2]).unwrap();
        let out = write_input(&prog, &zero).unwrap().head_state.unwrap();
        // CNOT|10> = |11>
        assert!((out.matrix()[(3, 3)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn permutation_matrix_is_deterministic_channel() {
        let s = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let ch = stochastic_to_channel(&s).unwrap();
        for j in 0..3 {
            let out = apply(&ch, &DensityOperator::basis(alloc::vec![3], j).unwrap()).unwrap();
            let target = (j + 1) % 3;
            assert!((out.matrix()[(target, target)].re - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn five_step_markov_iteration() {
        let s = DMatrix::from_row_slice(3, 3, &[0.5, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.25, 0.5]);
        let ch = stochastic_to_channel(&s).unwrap();
        let mut rho = DensityOperator::basis(alloc::vec![3], 0).unwrap();
        for _ in 0..5 {
            rho = apply(&ch, &rho).unwrap();
        }
        let s5 = s.pow(5);
        for i in 0..3 {
            assert!((rho.matrix()[(i, i)].re - s5[(i, 0)]).abs() < 1e-12);
        }
    }

    #[test]
    fn non_stochastic_rejected() {
        let s = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.6, 0.5]);
        assert!(matches!(stochastic_to_channel(&s), Err(Error::NotStochastic(_))));
        let s = DMatrix::from_row_slice(2, 2, &[1.5, 0.0, -0.5, 1.0]);
        assert!(stochastic_to_channel(&s).is_err());
    }

    #[test]
    fn missing_builtin() {
        assert!(matches!(BuiltinPrograms.fetch("Toffoli"), Err(Error::MissingProgram(_))));
    }
}
