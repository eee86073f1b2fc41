//! Covariant (blind) programming of single-qubit unitaries.
//!
//! A program for `U` is `|p_U⟩ = (U^{⊗n} ⊗ 1)|Φ⟩` on `n` program slots plus
//! `n` reference slots. Decoding measures the program with the covariant
//! POVM `{dÛ |η_Û⟩⟨η_Û|}` and rotates the data by the outcome `Û`.
//!
//! `|Φ⟩` is built from the total-spin sectors of the `n` program qubits:
//! `Φ = Σ_j c_j vec(P_j)/√(d_j m_j)` with `P_j` the spin-`j` isotypic
//! projector, `d_j = 2j+1` and `m_j` its multiplicity. The seed is
//! `η = Σ_j √(d_j/m_j) vec(P_j)`. With that pairing the entanglement
//! fidelity is the quadratic form `cᵀMc` over sector coefficients, where
//! `M_jk = (1/π)∫₀^{2π} sin(a_jθ/2) sin(a_kθ/2) cos²(θ/2) dθ` and
//! `a_j = 2j+1`. The optimal `c` is the top eigenvector of `M`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;

use crate::kernel::linalg::max_abs_diff;
use crate::kernel::random::haar_random_unitary;
use crate::kernel::wires::{apply_to_vector, embed, kron, permute_vector};
use crate::kernel::{c, DensityOperator, Matrix, PureState, Vector, C64};
use crate::{Error, Result};
// Float math for targets without std; shadowed by inherent methods otherwise.
#[allow(unused_imports)]
use num_traits::Float;

/// Largest supported number of program copies (states on `2n` qubits).
pub const MAX_COPIES: usize = 5;

/// Completeness residual above which a POVM is rejected.
pub const DEFAULT_MAX_RESIDUAL: f64 = 1e-6;

/// One total-spin sector of `n` qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sector {
    /// `2j`.
    pub twice_spin: usize,
    /// `2j + 1`.
    pub dim: usize,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Points of the uniform θ grid; `None` picks an exact size.
    pub grid_points: Option<usize>,
    pub max_iterations: usize,
    pub eigen_tolerance: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { grid_points: None, max_iterations: 10_000, eigen_tolerance: 1e-15 }
    }
}

/// Program resource `|Φ⟩` together with the data needed to decode it.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgramStateFamily {
    n: usize,
    d: usize,
    phi: PureState,
    sectors: Vec<Sector>,
    sector_coefficients: Vec<f64>,
    /// Unnormalized decoding seed.
    seed: Vector,
    entanglement_fidelity: f64,
}

impl ProgramStateFamily {
    /// Family with the given sector coefficients (normalized internally).
    pub fn from_coefficients(n: usize, coefficients: &[f64]) -> Result<Self> {
        check_copies(n)?;
        let sectors = sectors(n);
        if coefficients.len() != sectors.len() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} coefficients for {} sectors",
                coefficients.len(),
                sectors.len()
            )));
        }
        let norm = coefficients.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::InvalidState("sector coefficients must be finite and nonzero".into()));
        }
        let coeffs: Vec<f64> = coefficients.iter().map(|x| x / norm).collect();
        let projectors = spin_projectors(n, &sectors);
        let big = 1usize << n;
        let mut phi = Vector::zeros(big * big);
        let mut seed = Vector::zeros(big * big);
        for ((s, p), &cj) in sectors.iter().zip(&projectors).zip(&coeffs) {
            let dm = (s.dim * s.multiplicity) as f64;
            let a = cj / dm.sqrt();
            let b = (s.dim as f64 / s.multiplicity as f64).sqrt();
            for r in 0..big {
                for col in 0..big {
                    let v = p[(r, col)];
                    phi[r * big + col] += v * a;
                    seed[r * big + col] += v * b;
                }
            }
        }
        let m = fidelity_matrix(n, &sectors, None);
        let cv = nalgebra::DVector::from_column_slice(&coeffs);
        let fe = (cv.transpose() * &m * &cv)[(0, 0)];
        Ok(Self {
            n,
            d: 2,
            phi: PureState::new(phi, vec![2; 2 * n])?,
            sectors,
            sector_coefficients: coeffs,
            seed,
            entanglement_fidelity: fe,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn phi(&self) -> &PureState {
        &self.phi
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn sector_coefficients(&self) -> &[f64] {
        &self.sector_coefficients
    }

    pub fn seed(&self) -> &Vector {
        &self.seed
    }

    pub fn entanglement_fidelity(&self) -> f64 {
        self.entanglement_fidelity
    }

    /// Average gate fidelity over Haar-random pure inputs.
    pub fn average_fidelity(&self) -> f64 {
        let d = self.d as f64;
        (d * self.entanglement_fidelity + 1.0) / (d + 1.0)
    }
}

fn check_copies(n: usize) -> Result<()> {
    if n == 0 || n > MAX_COPIES {
        return Err(Error::Unsupported(alloc::format!("{n} program copies (supported: 1..={MAX_COPIES})")));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Spin sectors of `n` qubits, highest spin first.
pub fn sectors(n: usize) -> Vec<Sector> {
    let mut out = Vec::new();
    let mut tj = n as isize;
    while tj >= 0 {
        let k = (n - tj as usize) / 2;
        let mult = binomial(n, k) - if k == 0 { 0 } else { binomial(n, k - 1) };
        out.push(Sector { twice_spin: tj as usize, dim: tj as usize + 1, multiplicity: mult });
        tj -= 2;
    }
    out
}

/// Isotypic projectors from the total angular momentum `J²`.
fn spin_projectors(n: usize, sectors: &[Sector]) -> Vec<Matrix> {
    let half = c(0.5, 0.0);
    let paulis = [crate::gates::x(), crate::gates::y(), crate::gates::z()];
    let dims = vec![2; n];
    let big = 1usize << n;
    let mut j2 = Matrix::zeros(big, big);
    for p in &paulis {
        let mut ja = Matrix::zeros(big, big);
        for w in 0..n {
            ja += embed(&(p * half), &[w], &dims).expect("wire in range");
        }
        j2 += &ja * &ja;
    }
    let eig = |s: &Sector| {
        let j = s.twice_spin as f64 / 2.0;
        j * (j + 1.0)
    };
    sectors
        .iter()
        .map(|s| {
            let mut p = Matrix::identity(big, big);
            for o in sectors.iter().filter(|o| o.twice_spin != s.twice_spin) {
                let shifted = &j2 - Matrix::identity(big, big) * c(eig(o), 0.0);
                p = p * shifted * c(1.0 / (eig(s) - eig(o)), 0.0);
            }
            p
        })
        .collect()
}

/// `M_jk`, computed on a uniform θ grid. The integrand is a trigonometric
/// polynomial of degree at most `n + 2`, so the default grid is exact.
fn fidelity_matrix(n: usize, sectors: &[Sector], grid: Option<usize>) -> DMatrix<f64> {
    let points = grid.unwrap_or(4 * n + 8);
    let k = sectors.len();
    let mut m = DMatrix::<f64>::zeros(k, k);
    let h = 2.0 * PI / points as f64;
    for step in 0..points {
        let th = step as f64 * h;
        let cos2 = (th / 2.0).cos().powi(2);
        let vals: Vec<f64> = sectors.iter().map(|s| (s.dim as f64 * th / 2.0).sin()).collect();
        for a in 0..k {
            for b in 0..k {
                m[(a, b)] += vals[a] * vals[b] * cos2 * h / PI;
            }
        }
    }
    m
}

/// Optimal program resource for `n` copies of a qubit unitary.
pub fn optimize_phi(n: usize, d: usize, config: &OptimizerConfig) -> Result<ProgramStateFamily> {
    if d != 2 {
        return Err(Error::Unsupported(alloc::format!("covariant optimizer for d = {d}")));
    }
    check_copies(n)?;
    let secs = sectors(n);
    let m = fidelity_matrix(n, &secs, config.grid_points);
    let best_diag = (0..m.nrows()).map(|i| m[(i, i)]).fold(f64::NEG_INFINITY, f64::max);
    let eig = nalgebra::SymmetricEigen::try_new(m, config.eigen_tolerance, config.max_iterations).ok_or(
        Error::NonConvergence { iterations: config.max_iterations, best_fidelity: best_diag },
    )?;
    let top = eig.eigenvalues.iter().enumerate().fold(0, |best, (i, v)| if *v > eig.eigenvalues[best] { i } else { best });
    let mut coeffs: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
    if coeffs.iter().sum::<f64>() < 0.0 {
        coeffs.iter_mut().for_each(|x| *x = -*x);
    }
    ProgramStateFamily::from_coefficients(n, &coeffs)
}

/// Program state sealed against inspection of the unitary that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgramHandle {
    state: PureState,
    n: usize,
}

impl ProgramHandle {
    /// Wrap an externally supplied program state on `2n` qubits.
    pub fn from_state(state: PureState, n: usize) -> Result<Self> {
        check_copies(n)?;
        if state.dims() != vec![2; 2 * n].as_slice() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "program dims {:?} do not match {n} qubit copies",
                state.dims()
            )));
        }
        Ok(Self { state, n })
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

fn tensor_power(u: &Matrix, n: usize) -> Matrix {
    (1..n).fold(u.clone(), |acc, _| kron(&acc, u))
}

fn check_unitary(u: &Matrix, d: usize) -> Result<()> {
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch(alloc::format!("expected a {d}x{d} unitary, got {}x{}", u.nrows(), u.ncols())));
    }
    let r = crate::kernel::linalg::unitarity_residual(u);
    if r > 1e-9 {
        return Err(Error::NotUnitary(r));
    }
    Ok(())
}

/// `(U^{⊗n} ⊗ 1)|Φ⟩`.
pub fn build_program_state(u: &Matrix, fam: &ProgramStateFamily) -> Result<PureState> {
    check_unitary(u, fam.d)?;
    let wires: Vec<usize> = (0..fam.n).collect();
    fam.phi.evolve(&tensor_power(u, fam.n), &wires)
}

/// Encode `U` as a sealed program.
pub fn encode(u: &Matrix, fam: &ProgramStateFamily) -> Result<ProgramHandle> {
    Ok(ProgramHandle { state: build_program_state(u, fam)?, n: fam.n })
}

/// Isometric encoding `|f⟩ = U|d⟩ ↦ |d⟩|p_U⟩`. Returns the data slot of the
/// joint register (see [`joint_register`]) and the program.
pub fn encode_isometry(u: &Matrix, fam: &ProgramStateFamily) -> Result<(usize, ProgramHandle)> {
    Ok((0, encode(u, fam)?))
}

/// `|d⟩ ⊗ |p_U⟩` with the data on wire 0.
pub fn joint_register(data: &PureState, program: &ProgramHandle) -> Result<PureState> {
    if data.dims() != [2] {
        return Err(Error::DimensionMismatch(alloc::format!("data dims {:?}, expected [2]", data.dims())));
    }
    Ok(data.kron(&program.state))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sampling {
    /// Euler-angle product rule exact for the decoding integrand.
    Design,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PovmConfig {
    pub sampling: Sampling,
    pub max_residual: f64,
}

impl Default for PovmConfig {
    fn default() -> Self {
        Self { sampling: Sampling::Design, max_residual: DEFAULT_MAX_RESIDUAL }
    }
}

/// Discretized covariant POVM `{w_k |η_k⟩⟨η_k|}` with `η_k = (U_k^{⊗n} ⊗ 1)η`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariantPovm {
    n: usize,
    seed: PureState,
    unitaries: Vec<Matrix>,
    /// Quadrature weight times `‖η‖²`.
    weights: Vec<f64>,
    rotated: Vec<Vector>,
    completeness_residual: f64,
}

impl CovariantPovm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed_vector(&self) -> &PureState {
        &self.seed
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    pub fn sample(&self) -> impl Iterator<Item = (&Matrix, f64)> {
        self.unitaries.iter().zip(self.weights.iter().copied())
    }

    pub fn completeness_residual(&self) -> f64 {
        self.completeness_residual
    }

    /// POVM element `k`, as a matrix on the program register.
    pub fn element(&self, k: usize) -> Matrix {
        let v = &self.rotated[k];
        v * v.adjoint() * c(self.weights[k], 0.0)
    }

    fn outcome_weights(&self, program: &ProgramHandle) -> Result<Vec<f64>> {
        if program.n != self.n {
            return Err(Error::DimensionMismatch(alloc::format!(
                "program has {} copies, POVM expects {}",
                program.n, self.n
            )));
        }
        let p = program.state.vector();
        Ok(self.rotated.iter().zip(&self.weights).map(|(v, w)| w * v.dotc(p).norm_sqr()).collect())
    }
}

/// Support of the POVM: operators invariant under simultaneous permutation
/// of the slots, `(1/n!) Σ_π π ⊗ π`.
pub fn support_projector(n: usize) -> Result<Matrix> {
    check_copies(n)?;
    let dims = vec![2; 2 * n];
    let dim = 1usize << (2 * n);
    let perms = permutations(n);
    let mut proj = Matrix::zeros(dim, dim);
    for perm in &perms {
        let order: Vec<usize> = perm.iter().copied().chain(perm.iter().map(|&w| w + n)).collect();
        for col in 0..dim {
            let mut e = Vector::zeros(dim);
            e[col] = c(1.0, 0.0);
            let moved = permute_vector(&e, &dims, &order)?;
            for row in 0..dim {
                proj[(row, col)] += moved[row];
            }
        }
    }
    Ok(proj * c(1.0 / perms.len() as f64, 0.0))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(points: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(points);
    for i in 0..points {
        let mut x = (PI * (i as f64 + 0.75) / (points as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=points {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if points == 0 { 1.0 } else if points == 1 { x } else { p1 };
            let pm = if points == 1 { 1.0 } else { p0 };
            dp = points as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn euler(alpha: f64, cos_beta: f64, gamma: f64) -> Matrix {
    let beta = cos_beta.clamp(-1.0, 1.0).acos();
    let (cb, sb) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let ph = |a: f64| C64::from_polar(1.0, a);
    let (s, dl) = ((alpha + gamma) / 2.0, (alpha - gamma) / 2.0);
    Matrix::from_row_slice(2, 2, &[ph(-s) * cb, -ph(-dl) * sb, ph(dl) * sb, ph(s) * cb])
}

/// Haar quadrature exact for polynomials of degree `t` in `U` and in `Ū`.
pub fn su2_design(t: usize) -> Vec<(Matrix, f64)> {
    let k = 2 * t + 2;
    let gl = gauss_legendre(t + 1);
    let mut out = Vec::with_capacity(k * k * gl.len());
    for a in 0..k {
        let alpha = 2.0 * PI * a as f64 / k as f64;
        for &(x, w) in &gl {
            for g in 0..k {
                let gamma = 2.0 * PI * g as f64 / k as f64;
                out.push((euler(alpha, x, gamma), w / 2.0 / (k * k) as f64));
            }
        }
    }
    out
}

pub fn build_covariant_povm(fam: &ProgramStateFamily, config: &PovmConfig) -> Result<CovariantPovm> {
    let povm = discretize(fam, &config.sampling)?;
    if povm.completeness_residual.is_nan() || povm.completeness_residual >= config.max_residual {
        return Err(Error::PovmRejected(povm.completeness_residual));
    }
    Ok(povm)
}

fn discretize(fam: &ProgramStateFamily, sampling: &Sampling) -> Result<CovariantPovm> {
    let n = fam.n;
    let quad = match sampling {
        Sampling::Design => su2_design(n + 1),
        Sampling::MonteCarlo { samples, seed } => {
            if *samples == 0 {
                return Err(Error::InvalidState("Monte Carlo POVM needs at least one sample".into()));
            }
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(*seed);
            let w = 1.0 / *samples as f64;
            (0..*samples).map(|_| (haar_random_unitary(2, &mut rng), w)).collect()
        }
    };
    let norm2 = fam.seed.norm_squared();
    let seed_unit = PureState::new(fam.seed.unscale(norm2.sqrt()), vec![2; 2 * n])?;
    let dims = vec![2; 2 * n];
    let wires: Vec<usize> = (0..n).collect();
    let dim = 1usize << (2 * n);
    let mut total = Matrix::zeros(dim, dim);
    let mut unitaries = Vec::with_capacity(quad.len());
    let mut weights = Vec::with_capacity(quad.len());
    let mut rotated = Vec::with_capacity(quad.len());
    for (u, w) in quad {
        let v = apply_to_vector(seed_unit.vector(), &dims, &tensor_power(&u, n), &wires)?;
        let weight = w * norm2;
        total += &v * v.adjoint() * c(weight, 0.0);
        unitaries.push(u);
        weights.push(weight);
        rotated.push(v);
    }
    let residual = max_abs_diff(&total, &support_projector(n)?);
    Ok(CovariantPovm { n, seed: seed_unit, unitaries, weights, rotated, completeness_residual: residual })
}

/// Completeness residual of an unvalidated discretization.
pub fn completeness_residual(fam: &ProgramStateFamily, sampling: &Sampling) -> Result<f64> {
    Ok(discretize(fam, sampling)?.completeness_residual)
}

fn check_data(data: &DensityOperator) -> Result<()> {
    if data.dims() != [2] {
        return Err(Error::DimensionMismatch(alloc::format!("data dims {:?}, expected [2]", data.dims())));
    }
    Ok(())
}

/// Average output of measure-and-rotate decoding, integrated over the POVM.
/// The trace equals the total outcome probability (1 for programs on the
/// POVM support).
pub fn decode(data: &DensityOperator, program: &ProgramHandle, povm: &CovariantPovm) -> Result<DensityOperator> {
    check_data(data)?;
    let probs = povm.outcome_weights(program)?;
    let mut out = Matrix::zeros(2, 2);
    for (u, p) in povm.unitaries.iter().zip(&probs) {
        out += u * data.matrix() * u.adjoint() * c(*p, 0.0);
    }
    DensityOperator::subnormalized(out, vec![2])
}

/// Empirical decode: `shots` sampled outcomes, averaged.
pub fn decode_sampled<R: Rng + ?Sized>(
    data: &DensityOperator,
    program: &ProgramHandle,
    povm: &CovariantPovm,
    shots: usize,
    rng: &mut R,
) -> Result<DensityOperator> {
    check_data(data)?;
    if shots == 0 {
        return Err(Error::InvalidState("decode needs at least one shot".into()));
    }
    let probs = povm.outcome_weights(program)?;
    let total: f64 = probs.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::ZeroProbability);
    }
    let mut out = Matrix::zeros(2, 2);
    for _ in 0..shots {
        let mut r = rng.random::<f64>() * total;
        let mut k = probs.len() - 1;
        for (i, p) in probs.iter().enumerate() {
            if r < *p {
                k = i;
                break;
            }
            r -= p;
        }
        let u = &povm.unitaries[k];
        out += u * data.matrix() * u.adjoint();
    }
    DensityOperator::new(out * c(1.0 / shots as f64, 0.0), vec![2])
}

/// Sequential blind decoding: stage `i` acts on the output of stage `i − 1`.
pub fn blind_compose(programs: &[ProgramHandle], data: &DensityOperator, povm: &CovariantPovm) -> Result<DensityOperator> {
    if programs.is_empty() {
        return Err(Error::InvalidState("blind composition needs at least one program".into()));
    }
    programs.iter().try_fold(data.clone(), |acc, p| decode(&acc, p, povm))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    /// Sample mean of the decode fidelity.
    pub fidelity: f64,
    pub epsilon: f64,
    /// Standard error of the mean.
    pub sigma: f64,
    /// Closed-form average fidelity of the optimized family.
    pub predicted_fidelity: f64,
    pub completeness_residual: f64,
}

/// Haar-averaged decode fidelity for `n = 1..=n_max`.
pub fn benchmark<R: Rng + ?Sized>(n_max: usize, samples: usize, rng: &mut R) -> Result<Vec<BenchRow>> {
    check_copies(n_max)?;
    (1..=n_max).map(|n| benchmark_row(n, samples, rng)).collect()
}

/// One benchmark row: optimize, build the design POVM, and average the decode
/// fidelity over `samples` Haar-random (unitary, pure input) pairs.
pub fn benchmark_row<R: Rng + ?Sized>(n: usize, samples: usize, rng: &mut R) -> Result<BenchRow> {
    if samples < 2 {
        return Err(Error::InvalidState("benchmark needs at least two samples".into()));
    }
    let fam = optimize_phi(n, 2, &OptimizerConfig::default())?;
    let povm = build_covariant_povm(&fam, &PovmConfig::default())?;
    let mut fids = Vec::with_capacity(samples);
    for _ in 0..samples {
        let u = haar_random_unitary(2, rng);
        let data = crate::kernel::random::random_pure(2, rng);
        let program = encode(&u, &fam)?;
        let out = decode(&data.to_density(), &program, &povm)?;
        let target = data.evolve(&u, &[0])?;
        fids.push(target.vector().dotc(&(out.matrix() * target.vector())).re);
    }
    let (mean, sigma) = mean_and_error(&fids);
    Ok(BenchRow {
        n,
        fidelity: mean,
        epsilon: 1.0 - mean,
        sigma,
        predicted_fidelity: fam.average_fidelity(),
        completeness_residual: povm.completeness_residual,
    })
}

fn mean_and_error(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Least-squares slope of `ln ε` against `ln n`.
pub fn log_log_slope(rows: &[BenchRow]) -> Option<f64> {
    if rows.len() < 2 || rows.iter().any(|r| r.epsilon.is_nan() || r.epsilon <= 0.0) {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| ((r.n as f64).ln(), r.epsilon.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}
