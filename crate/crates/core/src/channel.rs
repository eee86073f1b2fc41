//! Channels and their dual (Choi) states.
//!
//! A channel `E` with input wires `dims_in` and output wires `dims_out` is
//! stored together with its Choi state `(E ⊗ 1)(ω)`, where
//! `|ω> = Σ_i |ii>/√d_in`. The Choi state is kept at unit trace for
//! trace-preserving maps; multiply by `d_in` to get the trace-`d_in`
//! convention. The output ("head") wires come first, the input ("tail")
//! wires second.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::kernel::linalg::{self, eig_hermitian, max_abs_diff};
use crate::kernel::random::haar_random_isometry;
use crate::kernel::wires::{self, partial_trace, permute_wires};
use crate::kernel::{DensityOperator, Matrix, PureState, Vector, C64, DEFAULT_TOL};
use crate::{Error, Result};
// Float math for targets without std; shadowed by inherent methods otherwise.
#[allow(unused_imports)]
use num_traits::Float;

/// Choi eigenvalues below this are dropped when extracting Kraus operators.
pub const KRAUS_CUTOFF: f64 = 1e-12;

/// A linear map between operator spaces, held as a Choi matrix and, when the
/// map is completely positive, a Kraus decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    choi: Matrix,
    kraus: Option<Vec<Matrix>>,
    dims_in: Vec<usize>,
    dims_out: Vec<usize>,
}

fn product(dims: &[usize]) -> usize {
    dims.iter().product()
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::DimensionMismatch("empty dimension vector".into()));
    }
    match dims.iter().find(|&&d| d < 2) {
        Some(&d) => Err(Error::InvalidDimension(d)),
        None => Ok(()),
    }
}

fn choi_from_kraus(kraus: &[Matrix], d_in: usize, d_out: usize) -> Matrix {
    let n = d_in * d_out;
    let mut j = Matrix::zeros(n, n);
    for k in kraus {
        let v = Vector::from_fn(n, |idx, _| k[(idx / d_in, idx % d_in)]);
        j += &v * v.adjoint();
    }
    j.unscale(d_in as f64)
}

fn kraus_from_choi(choi: &Matrix, d_in: usize, d_out: usize, tol: f64) -> Result<Vec<Matrix>> {
    let (values, vectors) = eig_hermitian(choi);
    if let Some(&min) = values.first() {
        if min < -tol {
            return Err(Error::NotPsd(min));
        }
    }
    let mut kraus = Vec::new();
    for (k, &lambda) in values.iter().enumerate().rev() {
        if lambda <= KRAUS_CUTOFF {
            continue;
        }
        let scale = (lambda * d_in as f64).sqrt();
        kraus.push(Matrix::from_fn(d_out, d_in, |o, i| vectors[(o * d_in + i, k)] * scale));
    }
    Ok(kraus)
}

impl Channel {
    /// Build from Kraus operators (each `d_out x d_in`). Complete positivity is
    /// automatic; trace preservation is not required here (see [`is_cptp`]).
    pub fn from_kraus(kraus: Vec<Matrix>, dims_in: Vec<usize>, dims_out: Vec<usize>) -> Result<Self> {
        check_dims(&dims_in)?;
        check_dims(&dims_out)?;
        let (d_in, d_out) = (product(&dims_in), product(&dims_out));
        if kraus.is_empty() {
            return Err(Error::DimensionMismatch("empty Kraus set".into()));
        }
        if let Some(k) = kraus.iter().find(|k| k.nrows() != d_out || k.ncols() != d_in) {
            return Err(Error::DimensionMismatch(alloc::format!(
                "Kraus operator is {}x{}, expected {}x{}",
                k.nrows(),
                k.ncols(),
                d_out,
                d_in
            )));
        }
        let choi = choi_from_kraus(&kraus, d_in, d_out);
        Ok(Self { choi, kraus: Some(kraus), dims_in, dims_out })
    }

    /// Build from a Choi matrix on `(dims_out, dims_in)` in the unit-trace
    /// convention. The map need not be completely positive; Kraus operators are
    /// only attached when the matrix is PSD.
    pub fn from_choi(choi: Matrix, dims_out: Vec<usize>, dims_in: Vec<usize>) -> Result<Self> {
        check_dims(&dims_in)?;
        check_dims(&dims_out)?;
        let (d_in, d_out) = (product(&dims_in), product(&dims_out));
        if choi.nrows() != d_in * d_out || choi.ncols() != d_in * d_out {
            return Err(Error::DimensionMismatch(alloc::format!(
                "Choi matrix is {}x{}, expected {}",
                choi.nrows(),
                choi.ncols(),
                d_in * d_out
            )));
        }
        let herm = linalg::hermiticity_residual(&choi);
        if herm > DEFAULT_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let kraus = kraus_from_choi(&choi, d_in, d_out, DEFAULT_TOL).ok();
        Ok(Self { choi, kraus, dims_in, dims_out })
    }

    pub fn unitary(u: Matrix, dims: Vec<usize>) -> Result<Self> {
        let res = linalg::unitarity_residual(&u);
        if res > DEFAULT_TOL {
            return Err(Error::NotUnitary(res));
        }
        Self::from_kraus(vec![u], dims.clone(), dims)
    }

    pub fn identity(dims: Vec<usize>) -> Result<Self> {
        let d = product(&dims);
        Self::unitary(Matrix::identity(d, d), dims)
    }

    /// `ρ ↦ (1-p) ρ + p tr(ρ) I/d`.
    pub fn depolarizing(d: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidState(alloc::format!("depolarizing probability {p} outside [0, 1]")));
        }
        // Kraus: sqrt(1-p) I plus sqrt(p)/d times every qudit Pauli.
        let mut kraus = vec![Matrix::identity(d, d).scale((1.0 - p).sqrt())];
        let w = p.sqrt() / d as f64;
        for a in 0..d {
            for b in 0..d {
                kraus.push(crate::gates::pauli(d, a, b).scale(w));
            }
        }
        Self::from_kraus(kraus, vec![d], vec![d])
    }

    pub fn completely_depolarizing(d: usize) -> Result<Self> {
        Self::depolarizing(d, 1.0)
    }

    /// Measure-and-prepare channel `ρ ↦ Σ_i tr(F_i ρ) σ_i`.
    pub fn measure_prepare(povm: &[Matrix], states: &[DensityOperator]) -> Result<Self> {
        if povm.is_empty() || povm.len() != states.len() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} POVM elements for {} states",
                povm.len(),
                states.len()
            )));
        }
        let d_in = povm[0].nrows();
        let dims_out = states[0].dims().to_vec();
        let mut kraus = Vec::new();
        for (f, sigma) in povm.iter().zip(states) {
            if f.nrows() != d_in || f.ncols() != d_in || sigma.dims() != dims_out.as_slice() {
                return Err(Error::DimensionMismatch("inconsistent measure-and-prepare operands".into()));
            }
            let (fv, fvec) = eig_hermitian(f);
            let (sv, svec) = eig_hermitian(sigma.matrix());
            for (a, &fa) in fv.iter().enumerate() {
                if fa < -DEFAULT_TOL {
                    return Err(Error::NotPsd(fa));
                }
                if fa <= KRAUS_CUTOFF {
                    continue;
                }
                for (b, &sb) in sv.iter().enumerate() {
                    if sb <= KRAUS_CUTOFF {
                        continue;
                    }
                    let ket = svec.column(b);
                    let bra = fvec.column(a).adjoint();
                    kraus.push((ket * &bra).scale((fa * sb).sqrt()));
                }
            }
        }
        Self::from_kraus(kraus, vec![d_in], dims_out)
    }

    /// Random channel from a Haar-random Stinespring isometry with the given
    /// number of Kraus operators.
    pub fn random<R: Rng + ?Sized>(d_in: usize, d_out: usize, kraus_rank: usize, rng: &mut R) -> Result<Self> {
        if kraus_rank == 0 || d_out * kraus_rank < d_in {
            return Err(Error::InvalidState(alloc::format!(
                "no isometry from dimension {d_in} into {d_out} x {kraus_rank}"
            )));
        }
        let v = haar_random_isometry(d_out * kraus_rank, d_in, rng);
        let kraus = (0..kraus_rank).map(|k| v.rows(k * d_out, d_out).into_owned()).collect();
        Self::from_kraus(kraus, vec![d_in], vec![d_out])
    }

    /// Tensor product `self ⊗ other`, wires of `self` first on both sides.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut dims_in = self.dims_in.clone();
        dims_in.extend_from_slice(&other.dims_in);
        let mut dims_out = self.dims_out.clone();
        dims_out.extend_from_slice(&other.dims_out);
        if let (Some(ka), Some(kb)) = (&self.kraus, &other.kraus) {
            let kraus = ka.iter().flat_map(|a| kb.iter().map(move |b| wires::kron(a, b))).collect();
            return Self::from_kraus(kraus, dims_in, dims_out);
        }
        // Choi of a product: reorder (oA, iA, oB, iB) into (oA, oB, iA, iB).
        let joint = wires::kron(&self.choi, &other.choi);
        let mut joint_dims = self.dims_out.clone();
        joint_dims.extend_from_slice(&self.dims_in);
        joint_dims.extend_from_slice(&other.dims_out);
        joint_dims.extend_from_slice(&other.dims_in);
        let (oa, ia, ob, ib) = (self.dims_out.len(), self.dims_in.len(), other.dims_out.len(), other.dims_in.len());
        let order: Vec<usize> = (0..oa)
            .chain(oa + ia..oa + ia + ob)
            .chain(oa..oa + ia)
            .chain(oa + ia + ob..oa + ia + ob + ib)
            .collect();
        let (choi, _) = permute_wires(&joint, &joint_dims, &order)?;
        Self::from_choi(choi, dims_out, dims_in)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Self) -> Result<Self> {
        if self.dims_in != first.dims_out {
            return Err(Error::DimensionMismatch("composition of incompatible channels".into()));
        }
        match (&self.kraus, &first.kraus) {
            (Some(a), Some(b)) => {
                let kraus = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
                Self::from_kraus(kraus, first.dims_in.clone(), self.dims_out.clone())
            }
            _ => Err(Error::Unsupported("composition requires Kraus representations".into())),
        }
    }

    pub fn choi(&self) -> &Matrix {
        &self.choi
    }

    pub fn kraus(&self) -> Option<&[Matrix]> {
        self.kraus.as_deref()
    }

    pub fn dims_in(&self) -> &[usize] {
        &self.dims_in
    }

    pub fn dims_out(&self) -> &[usize] {
        &self.dims_out
    }

    pub fn dim_in(&self) -> usize {
        product(&self.dims_in)
    }

    pub fn dim_out(&self) -> usize {
        product(&self.dims_out)
    }

    /// Choi matrix wire dims: outputs then inputs.
    pub fn choi_dims(&self) -> Vec<usize> {
        let mut d = self.dims_out.clone();
        d.extend_from_slice(&self.dims_in);
        d
    }
}

/// Residuals reported by [`is_cptp`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport {
    pub completely_positive: bool,
    pub trace_preserving: bool,
    /// Smallest eigenvalue of the Choi matrix.
    pub min_choi_eigenvalue: f64,
    /// `max|Σ K†K − I|`, when Kraus operators are available.
    pub kraus_completeness_residual: Option<f64>,
    /// `max|tr_head(choi) − I/d_in|`.
    pub tail_marginal_residual: f64,
}

impl CptpReport {
    pub fn is_cptp(&self) -> bool {
        self.completely_positive && self.trace_preserving
    }
}

/// Check complete positivity (Choi PSD) and trace preservation.
pub fn is_cptp(ch: &Channel, tol: f64) -> CptpReport {
    let min = linalg::eigenvalues_hermitian(&ch.choi)[0];
    let d_in = ch.dim_in();
    let kraus_res = ch.kraus.as_ref().map(|ks| {
        let mut sum = Matrix::zeros(d_in, d_in);
        for k in ks {
            sum += k.adjoint() * k;
        }
        max_abs_diff(&sum, &Matrix::identity(d_in, d_in))
    });
    let dims = ch.choi_dims();
    let tails: Vec<usize> = (ch.dims_out.len()..dims.len()).collect();
    let tail = partial_trace(&ch.choi, &dims, &tails).expect("tail wires are in range");
    let tail_res = max_abs_diff(&tail, &Matrix::identity(d_in, d_in).unscale(d_in as f64));
    let tp = tail_res <= tol && kraus_res.is_none_or(|r| r <= tol);
    CptpReport {
        completely_positive: min >= -tol,
        trace_preserving: tp,
        min_choi_eigenvalue: min,
        kraus_completeness_residual: kraus_res,
        tail_marginal_residual: tail_res,
    }
}

/// `E(ρ)`.
pub fn apply(ch: &Channel, rho: &DensityOperator) -> Result<DensityOperator> {
    if rho.dims() != ch.dims_in.as_slice() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "channel expects input dims {:?}, state has {:?}",
            ch.dims_in,
            rho.dims()
        )));
    }
    let out = match &ch.kraus {
        Some(ks) => {
            let mut acc = Matrix::zeros(ch.dim_out(), ch.dim_out());
            for k in ks {
                acc += k * rho.matrix() * k.adjoint();
            }
            acc
        }
        None => {
            // d_in · tr_in[(1 ⊗ ρᵗ) J]
            let dims = ch.choi_dims();
            let tails: Vec<usize> = (ch.dims_out.len()..dims.len()).collect();
            let heads: Vec<usize> = (0..ch.dims_out.len()).collect();
            let lifted = wires::left_multiply_on(&ch.choi, &dims, &rho.matrix().transpose(), &tails)?;
            partial_trace(&lifted, &dims, &heads)?.scale(ch.dim_in() as f64)
        }
    };
    DensityOperator::subnormalized(out, ch.dims_out.clone())
}

/// The maximally entangled state `Σ_i |ii>/√d`.
pub fn ebit(d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let amp = 1.0 / (d as f64).sqrt();
    let v = Vector::from_fn(d * d, |idx, _| if idx / d == idx % d { C64::new(amp, 0.0) } else { C64::new(0.0, 0.0) });
    PureState::new(v, vec![d, d])
}

/// `|ω>` over multi-wire systems: `⊗_w ebit(d_w)` reordered to (all heads, all tails).
pub fn ebit_multi(dims: &[usize]) -> Result<PureState> {
    let mut state: Option<PureState> = None;
    for &d in dims {
        let e = ebit(d)?;
        state = Some(match state {
            None => e,
            Some(s) => s.kron(&e),
        });
    }
    let state = state.ok_or_else(|| Error::DimensionMismatch("empty dimension vector".into()))?;
    let k = dims.len();
    let order: Vec<usize> = (0..k).map(|w| 2 * w).chain((0..k).map(|w| 2 * w + 1)).collect();
    state.permute(&order)
}

/// A bipartite state holding a program: head wires carry the channel output,
/// tail wires the remnant of the ebit where inputs are written.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgramState {
    state: DensityOperator,
    head_wires: Vec<usize>,
    tail_wires: Vec<usize>,
    norm_factor: f64,
}

impl ProgramState {
    pub fn new(state: DensityOperator, head_wires: Vec<usize>, tail_wires: Vec<usize>) -> Result<Self> {
        let n = state.n_wires();
        let mut seen = vec![false; n];
        for &w in head_wires.iter().chain(&tail_wires) {
            if w >= n {
                return Err(Error::WireOutOfRange { wire: w, n_wires: n });
            }
            if seen[w] {
                return Err(Error::DuplicateWire(w));
            }
            seen[w] = true;
        }
        if seen.iter().any(|s| !s) || head_wires.is_empty() || tail_wires.is_empty() {
            return Err(Error::DimensionMismatch("head and tail wires must partition the state".into()));
        }
        Ok(Self { state, head_wires, tail_wires, norm_factor: 1.0 })
    }

    /// Program whose matrix is laid out as (heads, tails).
    pub fn from_choi_matrix(matrix: Matrix, head_dims: Vec<usize>, tail_dims: Vec<usize>) -> Result<Self> {
        let mut dims = head_dims.clone();
        dims.extend_from_slice(&tail_dims);
        let state = DensityOperator::new(matrix, dims)?;
        let h = head_dims.len();
        Self::new(state, (0..h).collect(), (h..h + tail_dims.len()).collect())
    }

    pub(crate) fn canonical_unchecked(state: DensityOperator, n_heads: usize) -> Self {
        let n = state.n_wires();
        Self { state, head_wires: (0..n_heads).collect(), tail_wires: (n_heads..n).collect(), norm_factor: 1.0 }
    }

    /// Record the probability weight of a post-selected intermediate.
    pub fn with_norm_factor(mut self, norm_factor: f64) -> Self {
        self.norm_factor = norm_factor;
        self
    }

    pub fn state(&self) -> &DensityOperator {
        &self.state
    }

    pub fn matrix(&self) -> &Matrix {
        self.state.matrix()
    }

    pub fn head_wires(&self) -> &[usize] {
        &self.head_wires
    }

    pub fn tail_wires(&self) -> &[usize] {
        &self.tail_wires
    }

    pub fn norm_factor(&self) -> f64 {
        self.norm_factor
    }

    pub fn head_dims(&self) -> Vec<usize> {
        self.head_wires.iter().map(|&w| self.state.dims()[w]).collect()
    }

    pub fn tail_dims(&self) -> Vec<usize> {
        self.tail_wires.iter().map(|&w| self.state.dims()[w]).collect()
    }

    pub fn head_dim(&self) -> usize {
        self.head_dims().iter().product()
    }

    pub fn tail_dim(&self) -> usize {
        self.tail_dims().iter().product()
    }

    /// Same program with wires reordered to (heads, tails).
    pub fn canonical(&self) -> Result<Self> {
        let order: Vec<usize> = self.head_wires.iter().chain(&self.tail_wires).copied().collect();
        let h = self.head_wires.len();
        let state = self.state.permute(&order)?;
        Ok(Self::canonical_unchecked(state, h).with_norm_factor(self.norm_factor))
    }

    pub fn is_canonical(&self) -> bool {
        self.head_wires.iter().chain(&self.tail_wires).enumerate().all(|(k, &w)| k == w)
    }

    pub fn head_marginal(&self) -> DensityOperator {
        self.state.partial_trace(&self.head_wires).expect("head wires are valid")
    }

    pub fn tail_marginal(&self) -> DensityOperator {
        self.state.partial_trace(&self.tail_wires).expect("tail wires are valid")
    }

    /// `max|tr_head(ω) − I/d_tail|`; zero for Choi states of TP channels.
    pub fn tail_marginal_deviation(&self) -> f64 {
        let d = self.tail_dim();
        max_abs_diff(self.tail_marginal().matrix(), &Matrix::identity(d, d).unscale(d as f64))
    }

    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        let a = self.canonical()?;
        let b = other.canonical()?;
        if a.state.dims() != b.state.dims() || a.head_wires.len() != b.head_wires.len() {
            return Err(Error::DimensionMismatch("programs have different wire layouts".into()));
        }
        a.state.fidelity(&b.state)
    }

    /// Max-abs distance between the canonical matrices of two programs.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        let a = self.canonical()?;
        let b = other.canonical()?;
        if a.state.dims() != b.state.dims() {
            return Err(Error::DimensionMismatch("programs have different wire layouts".into()));
        }
        Ok(max_abs_diff(a.matrix(), b.matrix()))
    }

    /// The unitary stored in a pure program (up to global phase), if it is one.
    pub fn as_unitary(&self, tol: f64) -> Option<Matrix> {
        if (self.state.purity() - 1.0).abs() > tol || self.tail_marginal_deviation() > tol {
            return None;
        }
        let ch = channel_from_choi(self).ok()?;
        match ch.kraus() {
            Some([u]) if self.head_dim() == self.tail_dim() => Some(u.clone()),
            _ => None,
        }
    }
}

/// The Choi state `ω_E = (E ⊗ 1)(ω)` of a CPTP channel.
pub fn choi_of(ch: &Channel) -> Result<ProgramState> {
    choi_of_with_tolerance(ch, DEFAULT_TOL)
}

pub fn choi_of_with_tolerance(ch: &Channel, tol: f64) -> Result<ProgramState> {
    let report = is_cptp(ch, tol);
    if !report.is_cptp() {
        return Err(Error::NotCptp(alloc::format!(
            "min Choi eigenvalue {:e}, tail marginal residual {:e}",
            report.min_choi_eigenvalue,
            report.tail_marginal_residual
        )));
    }
    let state = DensityOperator::from_parts_unchecked(ch.choi.clone(), ch.choi_dims());
    Ok(ProgramState::canonical_unchecked(state, ch.dims_out.len()))
}

/// Recover a channel (with Kraus operators) from its Choi state.
pub fn channel_from_choi(p: &ProgramState) -> Result<Channel> {
    channel_from_choi_with_tolerance(p, DEFAULT_TOL)
}

pub fn channel_from_choi_with_tolerance(p: &ProgramState, tol: f64) -> Result<Channel> {
    let dev = p.tail_marginal_deviation();
    if dev > tol {
        return Err(Error::NotTracePreserving(dev));
    }
    let p = p.canonical()?;
    let (dims_out, dims_in) = (p.head_dims(), p.tail_dims());
    let (d_in, d_out) = (product(&dims_in), product(&dims_out));
    let kraus = kraus_from_choi(p.matrix(), d_in, d_out, tol)?;
    Ok(Channel { choi: p.matrix().clone(), kraus: Some(kraus), dims_in, dims_out })
}

/// The Choi state of a unitary gate.
pub fn unitary_program(u: &Matrix, dims: Vec<usize>) -> Result<ProgramState> {
    choi_of(&Channel::unitary(u.clone(), dims)?)
}
