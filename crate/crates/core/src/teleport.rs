//! Composition of programs by generalized teleportation.
//!
//! Bell outcome `(a, b)` labels `(XᵃZᵇ ⊗ 1)|ω>`. Projecting a live wire `l`
//! and a program tail `t` onto it leaves `(XᵃZᵇ)†` on the program head, which
//! is recorded as the frame `(−a, −b) mod d`.
//!
//! Frames follow `actual = P_F · ideal` with `P_F = X^x Z^z` per wire.
//! Frames compose by adding exponents (global phases are dropped).

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::channel::{ebit, ProgramState};
use crate::gates;
use crate::kernel::wires::{contract_wires, kron, kron_vec};
use crate::kernel::{DensityOperator, Matrix, Vector};
use crate::{Error, Result};

pub type BellOutcome = (usize, usize);

/// Per-wire Pauli byproducts `(x, z)` in `Z_d × Z_d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliFrame {
    d: usize,
    exps: Vec<(usize, usize)>,
}

impl PauliFrame {
    pub fn identity(d: usize, n_wires: usize) -> Self {
        Self { d, exps: vec![(0, 0); n_wires] }
    }

    pub fn from_exponents(d: usize, exps: Vec<(usize, usize)>) -> Self {
        let exps = exps.into_iter().map(|(x, z)| (x % d, z % d)).collect();
        Self { d, exps }
    }

    /// The frame left behind by Bell outcomes, one per wire.
    pub fn from_outcomes(d: usize, outcomes: &[BellOutcome]) -> Self {
        Self { d, exps: outcomes.iter().map(|&(a, b)| ((d - a % d) % d, (d - b % d) % d)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n_wires(&self) -> usize {
        self.exps.len()
    }

    pub fn get(&self, wire: usize) -> (usize, usize) {
        self.exps[wire]
    }

    pub fn exponents(&self) -> &[(usize, usize)] {
        &self.exps
    }

    pub fn set(&mut self, wire: usize, x: usize, z: usize) {
        self.exps[wire] = (x % self.d, z % self.d);
    }

    /// Multiply `X^x Z^z` onto `wire` (from the left).
    pub fn add(&mut self, wire: usize, x: usize, z: usize) {
        let (x0, z0) = self.exps[wire];
        self.exps[wire] = ((x0 + x) % self.d, (z0 + z) % self.d);
    }

    pub fn clear(&mut self, wire: usize) {
        self.exps[wire] = (0, 0);
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|&e| e == (0, 0))
    }

    /// `⊗_w X^x Z^z`.
    pub fn operator(&self) -> Matrix {
        let mut op = Matrix::identity(1, 1);
        for &(x, z) in &self.exps {
            op = kron(&op, &gates::pauli(self.d, x, z));
        }
        op
    }

    /// `P_F†`, the operator that undoes the frame.
    pub fn correction(&self) -> Matrix {
        self.operator().adjoint()
    }

    /// Undo the frame on a state whose wires match the frame.
    pub fn correct(&self, state: &DensityOperator) -> Result<DensityOperator> {
        if state.n_wires() != self.exps.len() || state.dims().iter().any(|&d| d != self.d) {
            return Err(Error::DimensionMismatch("frame does not match state wires".into()));
        }
        let all: Vec<usize> = (0..self.exps.len()).collect();
        state.evolve(&self.correction(), &all)
    }
}

/// Gates a frame can be pushed through (qubit frames only, except `Pauli`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameGate {
    H(usize),
    S(usize),
    T(usize),
    Cnot { control: usize, target: usize },
    Pauli { wire: usize, x: usize, z: usize },
}

/// A non-Pauli correction that must be applied before the frame, i.e.
/// `actual = R · P_F · ideal`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Residual {
    /// An `S` on the given wire (left by `T` acting on an `X` byproduct).
    S(usize),
}

/// Push a frame through a gate: returns `F'` with `G · P_F = P_F' · G` up to
/// phase, plus any non-Pauli residual.
pub fn commute_frame_through(frame: &PauliFrame, gate: FrameGate) -> Result<(PauliFrame, Option<Residual>)> {
    let n = frame.n_wires();
    let check = |w: usize| if w < n { Ok(()) } else { Err(Error::WireOutOfRange { wire: w, n_wires: n }) };
    let qubit = || {
        if frame.d == 2 {
            Ok(())
        } else {
            Err(Error::Unsupported(alloc::format!("{gate:?} frames need d = 2, got {}", frame.d)))
        }
    };
    let mut out = frame.clone();
    let mut residual = None;
    match gate {
        FrameGate::H(w) => {
            check(w)?;
            qubit()?;
            let (x, z) = frame.get(w);
            out.set(w, z, x);
        }
        FrameGate::S(w) => {
            // S X S† = i X Z
            check(w)?;
            qubit()?;
            let (x, z) = frame.get(w);
            out.set(w, x, z + x);
        }
        FrameGate::T(w) => {
            // T X T† = e^{-iπ/4} S X: the X part leaves an S behind.
            check(w)?;
            qubit()?;
            if frame.get(w).0 % 2 == 1 {
                residual = Some(Residual::S(w));
            }
        }
        FrameGate::Cnot { control, target } => {
            check(control)?;
            check(target)?;
            qubit()?;
            if control == target {
                return Err(Error::DuplicateWire(control));
            }
            let (xc, zc) = frame.get(control);
            let (xt, zt) = frame.get(target);
            out.set(target, xt + xc, zt);
            out.set(control, xc, zc + zt);
        }
        FrameGate::Pauli { wire, .. } => check(wire)?,
    }
    Ok((out, residual))
}

/// `(XᵃZᵇ ⊗ 1)|ω>`.
pub fn bell_vector(d: usize, outcome: BellOutcome) -> Result<Vector> {
    let omega = ebit(d)?;
    let p = kron(&gates::pauli(d, outcome.0 % d, outcome.1 % d), &Matrix::identity(d, d));
    Ok(p * omega.vector())
}

/// One Bell-measurement branch.
#[derive(Debug, Clone, PartialEq)]
pub struct BellMeasurement {
    pub outcome: BellOutcome,
    pub probability: f64,
    /// Normalized state of the remaining wires (ascending); `None` when no
    /// wires remain or the branch has probability zero.
    pub post_state: Option<DensityOperator>,
}

fn check_pair(state: &DensityOperator, wa: usize, wb: usize) -> Result<usize> {
    let dims = state.dims();
    let n = dims.len();
    for w in [wa, wb] {
        if w >= n {
            return Err(Error::WireOutOfRange { wire: w, n_wires: n });
        }
    }
    if wa == wb {
        return Err(Error::DuplicateWire(wa));
    }
    if dims[wa] != dims[wb] {
        return Err(Error::DimensionMismatch(alloc::format!(
            "Bell measurement between wires of dimension {} and {}",
            dims[wa],
            dims[wb]
        )));
    }
    Ok(dims[wa])
}

/// Project wires `(wa, wb)` onto a given Bell outcome.
pub fn bell_project(state: &DensityOperator, wa: usize, wb: usize, outcome: BellOutcome) -> Result<BellMeasurement> {
    let d = check_pair(state, wa, wb)?;
    let bra = bell_vector(d, outcome)?;
    let reduced = contract_wires(state.matrix(), state.dims(), &[wa, wb], &bra)?;
    let prob = reduced.trace().re.max(0.0);
    let rest: Vec<usize> =
        (0..state.n_wires()).filter(|&w| w != wa && w != wb).map(|w| state.dims()[w]).collect();
    let post_state = if rest.is_empty() || prob <= f64::EPSILON {
        None
    } else {
        Some(DensityOperator::new(reduced.unscale(prob), rest)?)
    };
    Ok(BellMeasurement { outcome: (outcome.0 % d, outcome.1 % d), probability: prob, post_state })
}

/// Every Bell branch of `(wa, wb)`, outcomes in lexicographic order.
pub fn bell_branches(state: &DensityOperator, wa: usize, wb: usize) -> Result<Vec<BellMeasurement>> {
    let d = check_pair(state, wa, wb)?;
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            out.push(bell_project(state, wa, wb, (a, b))?);
        }
    }
    Ok(out)
}

fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let mut r = rng.random::<f64>() * total;
    for (k, &p) in probs.iter().enumerate() {
        if r < p {
            return k;
        }
        r -= p;
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Measure `(wa, wb)` in the Bell basis, sampling the outcome.
pub fn bell_measure<R: Rng + ?Sized>(state: &DensityOperator, wa: usize, wb: usize, rng: &mut R) -> Result<BellMeasurement> {
    let branches = bell_branches(state, wa, wb)?;
    let probs: Vec<f64> = branches.iter().map(|b| b.probability).collect();
    let k = sample_index(&probs, rng);
    Ok(branches.into_iter().nth(k).expect("index within branch list"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompositionStrategy {
    /// Project every Bell pair onto `(0, 0)`.
    Postselect,
    /// Accept any outcome and report the byproduct frame.
    FrameTracked,
    /// Heralded repeat-until-success on the trivial outcome.
    Covariant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositionResult {
    /// Program on (second's heads, first's tails).
    pub program: ProgramState,
    /// Frame on the interface wires, sitting between the two programs:
    /// the program equals `choi(U₂ P_F U₁)`.
    pub frame: PauliFrame,
    pub strategy: CompositionStrategy,
    pub attempts: usize,
    pub ebits_consumed: usize,
    pub outcomes: Vec<BellOutcome>,
    /// Probability of the accepted branch (per attempt).
    pub probability: f64,
}

/// Join `first ⊗ second` and return it with the interface pairs
/// `(first head k, second tail k)` and the wire counts.
type Joint = (DensityOperator, Vec<(usize, usize)>, usize);

fn joint(first: &ProgramState, second: &ProgramState) -> Result<Joint> {
    let a = first.canonical()?;
    let b = second.canonical()?;
    if a.head_dims() != b.tail_dims() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "first head {:?} does not match second tail {:?}",
            a.head_dims(),
            b.tail_dims()
        )));
    }
    let d = a.head_dims()[0];
    if a.head_dims().iter().any(|&x| x != d) {
        return Err(Error::Unsupported("interface wires of mixed dimension".into()));
    }
    let (h1, t1, h2) = (a.head_wires().len(), a.tail_wires().len(), b.head_wires().len());
    let off = h1 + t1;
    let pairs = (0..h1).map(|k| (k, off + h2 + k)).collect();
    Ok((a.state().kron(b.state()), pairs, d))
}

/// Project all interface pairs on the given outcomes and rebuild the program
/// as (second's heads, first's tails).
/// Project several wire pairs onto the given Bell outcomes at once.
/// Returns the normalized state of the remaining wires (ascending) and the
/// branch probability.
pub fn bell_project_pairs(
    state: &DensityOperator,
    pairs: &[(usize, usize)],
    outcomes: &[BellOutcome],
) -> Result<(DensityOperator, f64)> {
    if pairs.is_empty() || pairs.len() != outcomes.len() {
        return Err(Error::DimensionMismatch("one outcome per Bell pair required".into()));
    }
    let mut bra: Option<Vector> = None;
    let mut wires = Vec::new();
    for (&(a, b), &o) in pairs.iter().zip(outcomes) {
        let d = check_pair(state, a, b)?;
        let v = bell_vector(d, o)?;
        bra = Some(match bra {
            None => v,
            Some(acc) => kron_vec(&acc, &v),
        });
        wires.extend_from_slice(&[a, b]);
    }
    let bra = bra.expect("at least one pair");
    let reduced = contract_wires(state.matrix(), state.dims(), &wires, &bra)?;
    let prob = reduced.trace().re;
    if prob <= f64::EPSILON {
        return Err(Error::ZeroProbability);
    }
    let rest: Vec<usize> = (0..state.n_wires()).filter(|w| !wires.contains(w)).map(|w| state.dims()[w]).collect();
    if rest.is_empty() {
        return Err(Error::DimensionMismatch("no wires remain after the Bell measurement".into()));
    }
    Ok((DensityOperator::new(reduced.unscale(prob), rest)?, prob))
}

fn project_all(
    state: &DensityOperator,
    pairs: &[(usize, usize)],
    outcomes: &[BellOutcome],
    first_tails: usize,
    second_heads: usize,
) -> Result<(ProgramState, f64)> {
    let (rest_state, prob) = bell_project_pairs(state, pairs, outcomes)?;
    // Remaining wires ascending: [first tails, second heads].
    let order: Vec<usize> = (first_tails..first_tails + second_heads).chain(0..first_tails).collect();
    let rest_state = rest_state.permute(&order)?;
    Ok((ProgramState::canonical_unchecked(rest_state, second_heads), prob))
}

fn sample_outcomes<R: Rng + ?Sized>(state: &DensityOperator, pairs: &[(usize, usize)], rng: &mut R) -> Result<Vec<BellOutcome>> {
    // Sequential measurement; wire indices shift as pairs are removed.
    let mut current = state.clone();
    let mut removed: Vec<usize> = Vec::new();
    let mut outcomes = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        let shift = |w: usize| w - removed.iter().filter(|&&r| r < w).count();
        let m = bell_measure(&current, shift(a), shift(b), rng)?;
        outcomes.push(m.outcome);
        removed.extend_from_slice(&[a, b]);
        match m.post_state {
            Some(s) => current = s,
            None => break,
        }
    }
    Ok(outcomes)
}

/// Compose `second ∘ first` by Bell-measuring first's head with second's tail.
pub fn compose_standard<R: Rng + ?Sized>(
    first: &ProgramState,
    second: &ProgramState,
    strategy: CompositionStrategy,
    rng: &mut R,
) -> Result<CompositionResult> {
    let (state, pairs, d) = joint(first, second)?;
    let (t1, h2) = (first.tail_wires().len(), second.head_wires().len());
    let outcomes = match strategy {
        CompositionStrategy::Postselect => vec![(0, 0); pairs.len()],
        CompositionStrategy::FrameTracked => sample_outcomes(&state, &pairs, rng)?,
        CompositionStrategy::Covariant => return compose_covariant(first, second, rng, usize::MAX),
    };
    let (program, probability) = project_all(&state, &pairs, &outcomes, t1, h2)?;
    Ok(CompositionResult {
        program,
        frame: PauliFrame::from_outcomes(d, &outcomes),
        strategy,
        attempts: 1,
        ebits_consumed: 0,
        outcomes,
        probability,
    })
}

/// Heralded composition: accept only the trivial byproduct and otherwise
/// retry with a fresh copy of `second`. Fails after `max_attempts`.
pub fn compose_covariant<R: Rng + ?Sized>(
    first: &ProgramState,
    second: &ProgramState,
    rng: &mut R,
    max_attempts: usize,
) -> Result<CompositionResult> {
    let (state, pairs, d) = joint(first, second)?;
    let (t1, h2) = (first.tail_wires().len(), second.head_wires().len());
    let mut attempts = 0;
    while attempts < max_attempts {
        attempts += 1;
        let outcomes = sample_outcomes(&state, &pairs, rng)?;
        if outcomes.iter().all(|&o| o == (0, 0)) {
            let (program, probability) = project_all(&state, &pairs, &outcomes, t1, h2)?;
            return Ok(CompositionResult {
                program,
                frame: PauliFrame::identity(d, pairs.len()),
                strategy: CompositionStrategy::Covariant,
                attempts,
                ebits_consumed: attempts,
                outcomes,
                probability,
            });
        }
    }
    Err(Error::HeraldedFailure { attempts })
}

/// Every frame-tracked branch of a composition, with its probability.
pub fn composition_branches(first: &ProgramState, second: &ProgramState) -> Result<Vec<CompositionResult>> {
    let (state, pairs, d) = joint(first, second)?;
    let (t1, h2) = (first.tail_wires().len(), second.head_wires().len());
    let k = pairs.len();
    let total = (d * d).pow(k as u32);
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut outcomes = vec![(0, 0); k];
        for o in outcomes.iter_mut().rev() {
            let v = rem % (d * d);
            rem /= d * d;
            *o = (v / d, v % d);
        }
        let (program, probability) = project_all(&state, &pairs, &outcomes, t1, h2)?;
        out.push(CompositionResult {
            program,
            frame: PauliFrame::from_outcomes(d, &outcomes),
            strategy: CompositionStrategy::FrameTracked,
            attempts: 1,
            ebits_consumed: 0,
            outcomes,
            probability,
        });
    }
    Ok(out)
}
