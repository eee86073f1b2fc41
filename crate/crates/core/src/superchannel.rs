//! Program conversion by superchannels.
//!
//! A superchannel is realized as `Ŝ(ω_E) = tr_e (V ⊗ U)(ω_E ⊗ ω)` with the
//! ebit tail projected onto `|0>`. `V` acts on the program head and the ebit
//! head, `U` on the program tail and the ebit tail.
//!
//! Working wire layout is `[heads…, tails…, ebit head, ebit tail]`.
//!
//! Transpose convention: `U = G ⊗ I` on the tail side turns `ω_E` into the
//! Choi state of `E ∘ Ad(Gᵀ)`, since `(1 ⊗ G)|ω> = (Gᵀ ⊗ 1)|ω>`.

use alloc::vec::Vec;

use rand::Rng;

use crate::channel::{ebit, ebit_multi, ProgramState};
use crate::kernel::linalg::{self, max_abs_diff};
use crate::kernel::random::haar_random_unitary;
use crate::kernel::wires::{apply_to_vector, conjugate_on, contract_vector, contract_wires, partial_trace};
use crate::kernel::{DensityOperator, Matrix, Vector, C64, DEFAULT_TOL};
use crate::{Error, Result};

/// `V` on (program head ⊗ ebit head) and `U` on (program tail ⊗ ebit tail).
#[derive(Debug, Clone, PartialEq)]
pub struct SuperchannelSpec {
    v: Matrix,
    u: Matrix,
    head_dims: Vec<usize>,
    tail_dims: Vec<usize>,
    ancilla_dim: usize,
}

/// Output of [`apply_superchannel`].
#[derive(Debug, Clone, PartialEq)]
pub struct Conversion {
    pub program: ProgramState,
    /// Probability of the `|0>` projection on the ebit tail.
    pub probability: f64,
    pub ebits_consumed: usize,
}

fn dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

impl SuperchannelSpec {
    pub fn new(v: Matrix, u: Matrix, head_dims: Vec<usize>, tail_dims: Vec<usize>, ancilla_dim: usize) -> Result<Self> {
        let spec = Self::with_operators(v, u, head_dims, tail_dims, ancilla_dim)?;
        for m in [&spec.v, &spec.u] {
            let r = linalg::unitarity_residual(m);
            if r > DEFAULT_TOL {
                return Err(Error::NotUnitary(r));
            }
        }
        Ok(spec)
    }

    /// Like [`SuperchannelSpec::new`] but without the unitarity check, for
    /// modelling lossy (e.g. non-unital) tail actions.
    pub fn with_operators(
        v: Matrix,
        u: Matrix,
        head_dims: Vec<usize>,
        tail_dims: Vec<usize>,
        ancilla_dim: usize,
    ) -> Result<Self> {
        if ancilla_dim < 2 {
            return Err(Error::InvalidDimension(ancilla_dim));
        }
        if let Some(&d) = head_dims.iter().chain(&tail_dims).find(|&&d| d < 2) {
            return Err(Error::InvalidDimension(d));
        }
        if head_dims.is_empty() || tail_dims.is_empty() {
            return Err(Error::DimensionMismatch("superchannel needs head and tail wires".into()));
        }
        let dv = dim(&head_dims) * ancilla_dim;
        let du = dim(&tail_dims) * ancilla_dim;
        if v.shape() != (dv, dv) || u.shape() != (du, du) {
            return Err(Error::DimensionMismatch(alloc::format!(
                "V is {:?} (expected {dv}x{dv}), U is {:?} (expected {du}x{du})",
                v.shape(),
                u.shape()
            )));
        }
        Ok(Self { v, u, head_dims, tail_dims, ancilla_dim })
    }

    pub fn identity(head_dims: Vec<usize>, tail_dims: Vec<usize>, ancilla_dim: usize) -> Result<Self> {
        let dv = dim(&head_dims) * ancilla_dim;
        let du = dim(&tail_dims) * ancilla_dim;
        Self::new(Matrix::identity(dv, dv), Matrix::identity(du, du), head_dims, tail_dims, ancilla_dim)
    }

    /// Post-processing `E ↦ W ∘ E`.
    pub fn post_processing(w: &Matrix, head_dims: Vec<usize>, tail_dims: Vec<usize>, ancilla_dim: usize) -> Result<Self> {
        let v = crate::kernel::kron(w, &Matrix::identity(ancilla_dim, ancilla_dim));
        let du = dim(&tail_dims) * ancilla_dim;
        Self::new(v, Matrix::identity(du, du), head_dims, tail_dims, ancilla_dim)
    }

    /// Tail-side pre-processing by `G`; realizes `E ↦ E ∘ Ad(Gᵀ)`.
    pub fn pre_processing(g: &Matrix, head_dims: Vec<usize>, tail_dims: Vec<usize>, ancilla_dim: usize) -> Result<Self> {
        let u = crate::kernel::kron(g, &Matrix::identity(ancilla_dim, ancilla_dim));
        let dv = dim(&head_dims) * ancilla_dim;
        Self::new(Matrix::identity(dv, dv), u, head_dims, tail_dims, ancilla_dim)
    }

    pub fn random<R: Rng + ?Sized>(head_dims: Vec<usize>, tail_dims: Vec<usize>, ancilla_dim: usize, rng: &mut R) -> Result<Self> {
        let v = haar_random_unitary(dim(&head_dims) * ancilla_dim, rng);
        let u = haar_random_unitary(dim(&tail_dims) * ancilla_dim, rng);
        Self::new(v, u, head_dims, tail_dims, ancilla_dim)
    }

    pub fn v(&self) -> &Matrix {
        &self.v
    }

    pub fn u(&self) -> &Matrix {
        &self.u
    }

    pub fn head_dims(&self) -> &[usize] {
        &self.head_dims
    }

    pub fn tail_dims(&self) -> &[usize] {
        &self.tail_dims
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    fn wire_groups(&self) -> (Vec<usize>, Vec<usize>) {
        let (nh, nt) = (self.head_dims.len(), self.tail_dims.len());
        let n = nh + nt;
        let v_wires = (0..nh).chain([n]).collect();
        let u_wires = (nh..n).chain([n + 1]).collect();
        (v_wires, u_wires)
    }

    /// Unnormalized image `tr_e <0|(V ⊗ U)(m ⊗ ω)(V ⊗ U)†|0>` of an operator
    /// on (heads, tails).
    fn image(&self, m: &Matrix) -> Result<Matrix> {
        let mut dims = self.head_dims.clone();
        dims.extend_from_slice(&self.tail_dims);
        let n = dims.len();
        let anc = ebit(self.ancilla_dim)?.to_density();
        let joint = crate::kernel::kron(m, anc.matrix());
        dims.extend_from_slice(&[self.ancilla_dim, self.ancilla_dim]);
        let (v_wires, u_wires) = self.wire_groups();
        let joint = conjugate_on(&joint, &dims, &self.v, &v_wires)?;
        let joint = conjugate_on(&joint, &dims, &self.u, &u_wires)?;
        let zero = Vector::from_fn(self.ancilla_dim, |i, _| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0));
        let projected = contract_wires(&joint, &dims, &[n + 1], &zero)?;
        let keep: Vec<usize> = (0..n).collect();
        partial_trace(&projected, &dims[..n + 1], &keep)
    }

    /// The tail-side map `X ↦ <0|U (X ⊗ I/d_e) U†|0>`.
    fn tail_map(&self, x: &Matrix) -> Result<Matrix> {
        let da = self.ancilla_dim;
        let mut dims = self.tail_dims.clone();
        dims.push(da);
        let n = dims.len();
        let joint = crate::kernel::kron(x, &Matrix::identity(da, da).unscale(da as f64));
        let all: Vec<usize> = (0..n).collect();
        let joint = conjugate_on(&joint, &dims, &self.u, &all)?;
        let zero = Vector::from_fn(da, |i, _| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0));
        contract_wires(&joint, &dims, &[n - 1], &zero)
    }
}

/// Convert a program with a superchannel. Returns the renormalized output
/// together with the projection probability.
pub fn apply_superchannel(s: &SuperchannelSpec, p: &ProgramState) -> Result<Conversion> {
    let p = p.canonical()?;
    if p.head_dims() != s.head_dims || p.tail_dims() != s.tail_dims {
        return Err(Error::DimensionMismatch(alloc::format!(
            "spec expects head {:?} / tail {:?}, program has {:?} / {:?}",
            s.head_dims,
            s.tail_dims,
            p.head_dims(),
            p.tail_dims()
        )));
    }
    let out = s.image(p.matrix())?;
    let prob = out.trace().re;
    if prob <= f64::EPSILON {
        return Err(Error::ZeroProbability);
    }
    let state = DensityOperator::new(out.unscale(prob), p.state().dims().to_vec())?;
    let program = ProgramState::new(state, p.head_wires().to_vec(), p.tail_wires().to_vec())?.with_norm_factor(prob);
    Ok(Conversion { program, probability: prob.min(1.0), ebits_consumed: 1 })
}

/// Store a superchannel as a state: the (normalized) Choi state of the
/// unnormalized conversion map, on wires `[heads, tails, heads', tails']`.
/// Its first half is the output program, its second half the slot where an
/// input program is written. Writing `p` into the slot reproduces
/// [`apply_superchannel`].
pub fn choi_of_superchannel(s: &SuperchannelSpec) -> Result<ProgramState> {
    let mut slot = s.head_dims.clone();
    slot.extend_from_slice(&s.tail_dims);
    let k = slot.len();
    let da = s.ancilla_dim;
    let omega = ebit_multi(&slot)?;
    let anc = ebit(da)?;
    let v = crate::kernel::wires::kron_vec(omega.vector(), anc.vector());
    let mut dims = slot.clone();
    dims.extend_from_slice(&slot);
    dims.extend_from_slice(&[da, da]);
    let (eh, et) = (2 * k, 2 * k + 1);
    let nh = s.head_dims.len();
    let v_wires: Vec<usize> = (0..nh).chain([eh]).collect();
    let u_wires: Vec<usize> = (nh..k).chain([et]).collect();
    let v = apply_to_vector(&v, &dims, &s.v, &v_wires)?;
    let v = apply_to_vector(&v, &dims, &s.u, &u_wires)?;
    let zero = Vector::from_fn(da, |i, _| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0));
    let v = contract_vector(&v, &dims, &[et], &zero)?;
    // Remaining wires: [slot, slot', eh]; trace eh with eh the fastest index.
    let rest = v.len() / da;
    let mut j = Matrix::zeros(rest, rest);
    for e in 0..da {
        let col = Vector::from_fn(rest, |r, _| v[r * da + e]);
        j += &col * col.adjoint();
    }
    let tr = j.trace().re;
    if tr <= f64::EPSILON {
        return Err(Error::ZeroProbability);
    }
    let mut out_dims = slot.clone();
    out_dims.extend_from_slice(&slot);
    let state = DensityOperator::new(j.unscale(tr), out_dims)?;
    Ok(ProgramState::new(state, (0..k).collect(), (k..2 * k).collect())?.with_norm_factor(tr))
}

/// Diagnostics from [`validate_superchannel`].
#[derive(Debug, Clone, PartialEq)]
pub struct SuperchannelReport {
    pub trials: usize,
    /// Smallest output eigenvalue seen.
    pub min_eigenvalue: f64,
    /// Worst `max|tail marginal − I/d|` over the outputs.
    pub max_tail_deviation: f64,
    /// `max|Λ(I)/tr Λ(I) − I/d|` for the tail-side map `Λ`.
    pub unital_residual: f64,
    pub tail_unital: bool,
    pub min_probability: f64,
    pub passed: bool,
}

/// Feed random Choi states of TP channels through `s` and check that the
/// outputs stay valid Choi states.
pub fn validate_superchannel<R: Rng + ?Sized>(s: &SuperchannelSpec, trials: usize, tol: f64, rng: &mut R) -> Result<SuperchannelReport> {
    let d_in = dim(&s.tail_dims);
    let d_out = dim(&s.head_dims);
    let mut min_eig = f64::INFINITY;
    let mut max_dev: f64 = 0.0;
    let mut min_prob = f64::INFINITY;
    for _ in 0..trials {
        let ch = crate::channel::Channel::random(d_in, d_out, 2, rng)?;
        let choi = ch.choi().clone();
        let mut dims = s.head_dims.clone();
        dims.extend_from_slice(&s.tail_dims);
        let nh = s.head_dims.len();
        let state = DensityOperator::new(choi, dims.clone())?;
        let p = ProgramState::new(state, (0..nh).collect(), (nh..dims.len()).collect())?;
        let out = apply_superchannel(s, &p)?;
        min_prob = min_prob.min(out.probability);
        min_eig = min_eig.min(out.program.state().eigenvalues()[0]);
        max_dev = max_dev.max(out.program.tail_marginal_deviation());
    }
    let lam = s.tail_map(&Matrix::identity(d_in, d_in))?;
    let tr = lam.trace().re;
    let unital_residual = if tr > f64::EPSILON {
        max_abs_diff(&lam.unscale(tr), &Matrix::identity(d_in, d_in).unscale(d_in as f64))
    } else {
        f64::INFINITY
    };
    let tail_unital = unital_residual <= tol;
    Ok(SuperchannelReport {
        trials,
        min_eigenvalue: if trials == 0 { 0.0 } else { min_eig },
        max_tail_deviation: max_dev,
        unital_residual,
        tail_unital,
        min_probability: if trials == 0 { 1.0 } else { min_prob },
        passed: min_eig >= -tol && max_dev <= tol && tail_unital,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::channel::{channel_from_choi, choi_of, unitary_program, Channel};
    use crate::gates;
    use crate::kernel::wires::kron;
    use crate::memory::write_input;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_program(rng: &mut ChaCha8Rng) -> ProgramState {
        choi_of(&Channel::random(2, 2, 2, rng).unwrap()).unwrap()
    }

    #[test]
    fn identity_spec_is_identity_with_probability_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let s = SuperchannelSpec::identity(vec![2], vec![2], 2).unwrap();
        let p = random_program(&mut rng);
        let out = apply_superchannel(&s, &p).unwrap();
        assert!((out.probability - 0.5).abs() < 1e-12);
        assert!(out.program.distance(&p).unwrap() < 1e-12);
        assert_eq!(out.ebits_consumed, 1);
    }

    #[test]
    fn identity_spec_probability_is_inverse_ancilla_dim() {
        let s = SuperchannelSpec::identity(vec![2], vec![2], 3).unwrap();
        let p = unitary_program(&gates::h(), vec![2]).unwrap();
        let out = apply_superchannel(&s, &p).unwrap();
        assert!((out.probability - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn post_processing_matches_channel_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..5 {
            let w = haar(&mut rng, 2);
            let p = random_program(&mut rng);
            let s = SuperchannelSpec::post_processing(&w, vec![2], vec![2], 2).unwrap();
            let out = apply_superchannel(&s, &p).unwrap();
            let e = channel_from_choi(&p).unwrap();
            let oracle = choi_of(&Channel::unitary(w, vec![2]).unwrap().after(&e).unwrap()).unwrap();
            assert!(out.program.distance(&oracle).unwrap() < 1e-9);
        }
    }

    fn haar(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
        haar_random_unitary(d, rng)
    }

    #[test]
    fn pre_processing_pins_transpose_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..5 {
            let g = haar(&mut rng, 2);
            let p = random_program(&mut rng);
            let s = SuperchannelSpec::pre_processing(&g, vec![2], vec![2], 2).unwrap();
            let out = apply_superchannel(&s, &p).unwrap();
            let e = channel_from_choi(&p).unwrap();
            let gt = Channel::unitary(g.transpose(), vec![2]).unwrap();
            let oracle = choi_of(&e.after(&gt).unwrap()).unwrap();
            assert!(out.program.distance(&oracle).unwrap() < 1e-9);
        }
    }

    #[test]
    fn stored_superchannel_reproduces_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..4 {
            let s = SuperchannelSpec::random(vec![2], vec![2], 2, &mut rng).unwrap();
            let stored = choi_of_superchannel(&s).unwrap();
            assert!(stored.state().eigenvalues()[0] > -1e-10);
            assert!((stored.state().trace() - 1.0).abs() < 1e-12);
            let p = random_program(&mut rng);
            let direct = apply_superchannel(&s, &p).unwrap();
            let via_write = write_input(&stored, p.state()).unwrap().head_state.unwrap();
            let f = via_write.fidelity(direct.program.state()).unwrap();
            assert!(f > 1.0 - 1e-9, "fidelity {f}");
        }
    }

    #[test]
    fn stored_identity_spec_acts_as_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let s = SuperchannelSpec::identity(vec![2], vec![2], 2).unwrap();
        let stored = choi_of_superchannel(&s).unwrap();
        for _ in 0..10 {
            let p = random_program(&mut rng);
            let out = write_input(&stored, p.state()).unwrap().head_state.unwrap();
            assert!(max_abs_diff(out.matrix(), p.matrix()) < 1e-10);
        }
    }

    #[test]
    fn post_processing_stored_on_hadamard() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        let w = haar(&mut rng, 2);
        let s = SuperchannelSpec::post_processing(&w, vec![2], vec![2], 2).unwrap();
        let stored = choi_of_superchannel(&s).unwrap();
        let p = unitary_program(&gates::h(), vec![2]).unwrap();
        let out = write_input(&stored, p.state()).unwrap().head_state.unwrap();
        let oracle = unitary_program(&(&w * gates::h()), vec![2]).unwrap();
        assert!(max_abs_diff(out.matrix(), oracle.matrix()) < 1e-10);
    }

    #[test]
    fn validate_identity_and_random_specs() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let s = SuperchannelSpec::identity(vec![2], vec![2], 2).unwrap();
        let r = validate_superchannel(&s, 10, 1e-9, &mut rng).unwrap();
        assert!(r.passed);
        assert!(r.max_tail_deviation < 1e-12);
        let s = SuperchannelSpec::random(vec![2], vec![2], 2, &mut rng).unwrap();
        let r = validate_superchannel(&s, 50, 1e-9, &mut rng).unwrap();
        assert!(r.min_eigenvalue > -1e-10);
        assert!(r.tail_unital);
    }

    #[test]
    fn non_unital_tail_is_flagged() {
        let mut rng = ChaCha8Rng::seed_from_u64(38);
        let gamma: f64 = 0.6;
        let mut k0 = Matrix::identity(2, 2);
        k0[(1, 1)] = C64::new((1.0 - gamma).sqrt(), 0.0);
        let u = kron(&k0, &Matrix::identity(2, 2));
        let s = SuperchannelSpec::with_operators(Matrix::identity(4, 4), u, vec![2], vec![2], 2).unwrap();
        assert!(SuperchannelSpec::new(Matrix::identity(4, 4), s.u().clone(), vec![2], vec![2], 2).is_err());
        let r = validate_superchannel(&s, 5, 1e-9, &mut rng).unwrap();
        assert!(!r.tail_unital);
        assert!(r.max_tail_deviation > 1e-3);
        assert!(!r.passed);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let s = SuperchannelSpec::identity(vec![2], vec![2], 2).unwrap();
        let p = unitary_program(&gates::cnot(), vec![2, 2]).unwrap();
        assert!(matches!(apply_superchannel(&s, &p), Err(Error::DimensionMismatch(_))));
    }
}
