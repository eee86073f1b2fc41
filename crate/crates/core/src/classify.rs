//! Resource classification of programs against the three machine
//! generations.
//!
//! * QvN-I: free programs are Choi states of entanglement-breaking channels
//!   (separable across head | tail); unitary programs are universal.
//! * QvN-II: free programs are separable bipartite channels (Choi separable
//!   across A | B); unitaries locally equivalent to CNOT are universal.
//! * QvN-III: free programs are products of local channels.
//!
//! Separability is decided with the PPT test, which is exact only when the
//! cut is at most 2 ⊗ 3. Larger PPT cuts are reported as inconclusive.

use alloc::vec::Vec;
use core::fmt;

use crate::channel::{choi_of, unitary_program, Channel, ProgramState};
use crate::gates;
use crate::kernel::linalg::{eigenvalues_hermitian, max_abs_diff, von_neumann_entropy};
use crate::kernel::wires::{kron, partial_trace, partial_transpose, permute_wires};
use crate::kernel::DensityOperator;
use crate::{Error, Result};

/// Outcome of a membership test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Yes,
    No,
    Inconclusive,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Yes => "yes",
            Decision::No => "no",
            Decision::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenerationVerdict {
    Free,
    Resource,
    UniversalCandidate,
    Inconclusive,
}

impl GenerationVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            GenerationVerdict::Free => "free",
            GenerationVerdict::Resource => "resource",
            GenerationVerdict::UniversalCandidate => "universal-candidate",
            GenerationVerdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for GenerationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Split of a channel's wires into parties A and B. `side_a` lists channel
/// wire indices (shared by input and output); the rest belong to B.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    pub side_a: Vec<usize>,
}

impl Bipartition {
    pub fn new(side_a: Vec<usize>) -> Self {
        Self { side_a }
    }

    /// Choi-state wires on side A for a program with `n` heads and `n` tails.
    fn choi_side(&self, n: usize) -> Result<Vec<usize>> {
        if self.side_a.is_empty() || self.side_a.len() >= n {
            return Err(Error::InvalidState(alloc::format!(
                "bipartition side {:?} must be a proper subset of {n} wires",
                self.side_a
            )));
        }
        let mut seen = alloc::vec![false; n];
        for &w in &self.side_a {
            if w >= n {
                return Err(Error::WireOutOfRange { wire: w, n_wires: n });
            }
            if seen[w] {
                return Err(Error::DuplicateWire(w));
            }
            seen[w] = true;
        }
        let mut side: Vec<usize> = self.side_a.clone();
        side.sort_unstable();
        let tails: Vec<usize> = side.iter().map(|&w| w + n).collect();
        side.extend(tails);
        Ok(side)
    }
}

/// Largest cut (product of side dimensions) on which PPT implies separability.
pub const PPT_EXACT_LIMIT: usize = 6;

/// PPT diagnostics across a cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptReport {
    pub min_eigenvalue: f64,
    pub negativity: f64,
    pub ppt: bool,
    /// Whether PPT decides separability for this cut.
    pub exact: bool,
}

impl PptReport {
    pub fn decision(&self) -> Decision {
        match (self.ppt, self.exact) {
            (false, _) => Decision::No,
            (true, true) => Decision::Yes,
            (true, false) => Decision::Inconclusive,
        }
    }
}

fn check_cut(dims: &[usize], part: &[usize]) -> Result<()> {
    if part.is_empty() || part.len() >= dims.len() {
        return Err(Error::InvalidState(alloc::format!("cut {part:?} is not a proper subset of {} wires", dims.len())));
    }
    Ok(())
}

pub fn ppt_report(state: &DensityOperator, part: &[usize], tol: f64) -> Result<PptReport> {
    check_cut(state.dims(), part)?;
    let pt = partial_transpose(state.matrix(), state.dims(), part)?;
    let eig = eigenvalues_hermitian(&pt);
    let negativity: f64 = eig.iter().filter(|&&v| v < 0.0).map(|v| -v).sum();
    let min = eig.first().copied().unwrap_or(0.0);
    let da: usize = part.iter().map(|&w| state.dims()[w]).product();
    let db = state.dim() / da;
    Ok(PptReport { min_eigenvalue: min, negativity, ppt: min >= -tol, exact: da * db <= PPT_EXACT_LIMIT })
}

/// Sum of the magnitudes of the negative partial-transpose eigenvalues.
pub fn negativity(state: &DensityOperator, part: &[usize]) -> Result<f64> {
    Ok(ppt_report(state, part, 0.0)?.negativity)
}

fn head_cut(p: &ProgramState) -> Vec<usize> {
    p.head_wires().to_vec()
}

/// Entanglement-breaking test on a Choi state (separability across head | tail).
/// Beyond the exact PPT range only product Choi states are certified.
pub fn is_entanglement_breaking_choi(p: &ProgramState, tol: f64) -> Result<Decision> {
    let cut = head_cut(p);
    let decision = ppt_report(p.state(), &cut, tol)?.decision();
    if decision == Decision::Inconclusive && cut_product_distance(p.state(), &cut)? < tol {
        return Ok(Decision::Yes);
    }
    Ok(decision)
}

pub fn is_entanglement_breaking(ch: &Channel, tol: f64) -> Result<Decision> {
    is_entanglement_breaking_choi(&choi_of(ch)?, tol)
}

/// `max|ρ − ρ_A ⊗ ρ_B|` for the cut `side_a` | rest, marginals taken in place.
fn cut_product_distance(state: &DensityOperator, side_a: &[usize]) -> Result<f64> {
    let dims = state.dims();
    let side_b: Vec<usize> = (0..dims.len()).filter(|w| !side_a.contains(w)).collect();
    let wa = partial_trace(state.matrix(), dims, side_a)?;
    let wb = partial_trace(state.matrix(), dims, &side_b)?;
    let joint = kron(&wa, &wb);
    // joint is on [side_a…, side_b…]; move wires back to their places.
    let joint_dims: Vec<usize> = side_a.iter().chain(&side_b).map(|&w| dims[w]).collect();
    let labels: Vec<usize> = side_a.iter().chain(&side_b).copied().collect();
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by_key(|&i| labels[i]);
    let (back, _) = permute_wires(&joint, &joint_dims, &order)?;
    Ok(max_abs_diff(&back, state.matrix()))
}

/// `max|ω − ω_A ⊗ ω_B|` with the local Choi states taken as marginals.
pub fn factorization_distance(p: &ProgramState, bip: &Bipartition) -> Result<f64> {
    let p = p.canonical()?;
    let side_a = bip.choi_side(p.head_wires().len())?;
    cut_product_distance(p.state(), &side_a)
}

pub fn is_product_choi(p: &ProgramState, bip: &Bipartition, tol: f64) -> Result<(Decision, f64)> {
    let dist = factorization_distance(p, bip)?;
    Ok((if dist < tol { Decision::Yes } else { Decision::No }, dist))
}

pub fn is_product_channel(ch: &Channel, bip: &Bipartition, tol: f64) -> Result<Decision> {
    Ok(is_product_choi(&choi_of(ch)?, bip, tol)?.0)
}

/// Separability of a bipartite channel across A | B.
pub fn is_separable_choi(p: &ProgramState, bip: &Bipartition, tol: f64) -> Result<Decision> {
    let p = p.canonical()?;
    let side = bip.choi_side(p.head_wires().len())?;
    let ppt = ppt_report(p.state(), &side, tol)?;
    if !ppt.ppt {
        return Ok(Decision::No);
    }
    if ppt.exact || is_product_choi(&p, bip, tol)?.0 == Decision::Yes {
        return Ok(Decision::Yes);
    }
    Ok(Decision::Inconclusive)
}

pub fn is_separable_bipartite_channel(ch: &Channel, bip: &Bipartition, tol: f64) -> Result<Decision> {
    is_separable_choi(&choi_of(ch)?, bip, tol)
}

/// Negativity of the CNOT program across its control | target cut.
pub fn cnot_negativity() -> f64 {
    let p = unitary_program(&gates::cnot(), alloc::vec![2, 2]).expect("CNOT is unitary");
    negativity(p.state(), &[0, 2]).expect("valid cut")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResourceMeasures {
    pub purity: f64,
    /// Negativity across head | tail.
    pub negativity_head_tail: f64,
    pub min_pt_eigenvalue_head_tail: f64,
    /// Entanglement entropy (nats) across head | tail, for pure programs.
    pub entanglement_entropy: Option<f64>,
    pub negativity_ab: Option<f64>,
    pub min_pt_eigenvalue_ab: Option<f64>,
    pub factorization_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResourceReport {
    pub unitary: bool,
    pub entanglement_breaking: Decision,
    /// `None` when no bipartition was given.
    pub separable: Option<Decision>,
    pub product: Option<Decision>,
    pub qvn1: GenerationVerdict,
    pub qvn2: Option<GenerationVerdict>,
    pub qvn3: Option<GenerationVerdict>,
    pub measures: ResourceMeasures,
    pub tolerance: f64,
}

impl ResourceReport {
    /// Verdicts respect PROC ⊂ SEPC: a product verdict never coexists with
    /// a non-separable one.
    pub fn is_consistent(&self) -> bool {
        !(self.product == Some(Decision::Yes) && self.separable != Some(Decision::Yes))
    }
}

/// Tolerance used when matching a program's A | B negativity against CNOT's.
pub const CNOT_MATCH_TOL: f64 = 1e-6;

/// Classify a program. A bipartition is needed for the QvN-II and QvN-III tests.
pub fn classify(p: &ProgramState, bip: Option<&Bipartition>, tol: f64) -> Result<ResourceReport> {
    let p = p.canonical()?;
    let ht = ppt_report(p.state(), &head_cut(&p), tol)?;
    let purity = p.state().purity();
    let pure = (purity - 1.0).abs() <= tol;
    let unitary = p.as_unitary(tol.max(1e-9)).is_some();
    let entropy = pure.then(|| von_neumann_entropy(p.head_marginal().matrix()));
    let eb = is_entanglement_breaking_choi(&p, tol)?;
    let qvn1 = match eb {
        Decision::Yes => GenerationVerdict::Free,
        Decision::No if unitary => GenerationVerdict::UniversalCandidate,
        Decision::No => GenerationVerdict::Resource,
        Decision::Inconclusive => GenerationVerdict::Inconclusive,
    };
    let mut measures = ResourceMeasures {
        purity,
        negativity_head_tail: ht.negativity,
        min_pt_eigenvalue_head_tail: ht.min_eigenvalue,
        entanglement_entropy: entropy,
        negativity_ab: None,
        min_pt_eigenvalue_ab: None,
        factorization_distance: None,
    };
    let (mut separable, mut product, mut qvn2, mut qvn3) = (None, None, None, None);
    if let Some(bip) = bip {
        let side = bip.choi_side(p.head_wires().len())?;
        let ab = ppt_report(p.state(), &side, tol)?;
        let (prod, dist) = is_product_choi(&p, bip, tol)?;
        let sep = if !ab.ppt {
            Decision::No
        } else if ab.exact || prod == Decision::Yes {
            Decision::Yes
        } else {
            Decision::Inconclusive
        };
        measures.negativity_ab = Some(ab.negativity);
        measures.min_pt_eigenvalue_ab = Some(ab.min_eigenvalue);
        measures.factorization_distance = Some(dist);
        let cnot_like = unitary && p.head_dims() == [2, 2] && (ab.negativity - cnot_negativity()).abs() < CNOT_MATCH_TOL;
        qvn2 = Some(match sep {
            Decision::Yes => GenerationVerdict::Free,
            Decision::No if cnot_like => GenerationVerdict::UniversalCandidate,
            Decision::No => GenerationVerdict::Resource,
            Decision::Inconclusive => GenerationVerdict::Inconclusive,
        });
        qvn3 = Some(match prod {
            Decision::Yes => GenerationVerdict::Free,
            _ => GenerationVerdict::Resource,
        });
        separable = Some(sep);
        product = Some(prod);
    }
    Ok(ResourceReport {
        unitary,
        entanglement_breaking: eb,
        separable,
        product,
        qvn1,
        qvn2,
        qvn3,
        measures,
        tolerance: tol,
    })
}
