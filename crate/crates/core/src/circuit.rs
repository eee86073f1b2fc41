//! Tailed circuits: {H, T, CNOT} circuits executed by composing stored gate
//! programs, with Pauli byproducts pulled to the end.
//!
//! Junction flavors follow the compile rule: a junction into a CNOT is a
//! standard teleportation, a junction into a qubit gate that follows a CNOT
//! is covariant. A junction into `T` is always covariant, since a `T` cannot
//! absorb an `X` byproduct; a junction into a switched-off gate is standard.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::channel::{ebit, ProgramState};
use crate::gates;
use crate::kernel::{DensityOperator, Matrix, C64};
use crate::memory::{write_partial, ProgramStore};
use crate::teleport::{bell_branches, bell_project, bell_project_pairs, commute_frame_through, BellOutcome, FrameGate, PauliFrame};
use crate::{Error, Result};

/// Largest circuit the engine will run (live wires plus one CNOT program).
pub const MAX_WIRES: usize = 6;

/// Default attempt budget per covariant junction.
pub const DEFAULT_BUDGET: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    T,
    Cnot,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }

    /// Name of the stored program implementing the gate.
    pub fn program_name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::T => "T",
            GateKind::Cnot => "CNOT",
        }
    }

    pub fn matrix(self) -> Matrix {
        match self {
            GateKind::H => gates::h(),
            GateKind::T => gates::t(),
            GateKind::Cnot => gates::cnot(),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.program_name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" | "h" => Ok(GateKind::H),
            "T" | "t" => Ok(GateKind::T),
            "CNOT" | "cnot" | "CX" | "cx" => Ok(GateKind::Cnot),
            _ => Err(Error::InvalidCircuit(alloc::format!("unknown gate `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Switch {
    #[default]
    On,
    Off,
}

impl FromStr for Switch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "on" => Ok(Switch::On),
            "off" => Ok(Switch::Off),
            _ => Err(Error::InvalidCircuit(alloc::format!("switch state must be on or off, got `{s}`"))),
        }
    }
}

/// Single-qubit input states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum InputState {
    #[default]
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
    Mixed,
}

impl InputState {
    pub const ALL: [InputState; 7] = [
        InputState::Zero,
        InputState::One,
        InputState::Plus,
        InputState::Minus,
        InputState::PlusI,
        InputState::MinusI,
        InputState::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InputState::Zero => "zero",
            InputState::One => "one",
            InputState::Plus => "plus",
            InputState::Minus => "minus",
            InputState::PlusI => "plus_i",
            InputState::MinusI => "minus_i",
            InputState::Mixed => "mixed",
        }
    }

    pub fn density(self) -> DensityOperator {
        let h = 0.5;
        let (a, b) = match self {
            InputState::Zero => return DensityOperator::basis(vec![2], 0).expect("valid basis state"),
            InputState::One => return DensityOperator::basis(vec![2], 1).expect("valid basis state"),
            InputState::Mixed => return DensityOperator::maximally_mixed(vec![2]).expect("valid mixed state"),
            InputState::Plus => (C64::new(h, 0.0), C64::new(h, 0.0)),
            InputState::Minus => (C64::new(h, 0.0), C64::new(-h, 0.0)),
            InputState::PlusI => (C64::new(h, 0.0), C64::new(0.0, -h)),
            InputState::MinusI => (C64::new(h, 0.0), C64::new(0.0, h)),
        };
        // |ψ><ψ| with |ψ> = (|0> + e^{iφ}|1>)/√2: off-diagonal <0|ρ|1> = b.
        let m = Matrix::from_row_slice(2, 2, &[C64::new(h, 0.0), b, b.conj(), a]);
        DensityOperator::new(m, vec![2]).expect("valid pure state")
    }
}

impl FromStr for InputState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InputState::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| Error::InvalidCircuit(alloc::format!("unknown input state `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GateRecord {
    pub kind: GateKind,
    pub wires: Vec<usize>,
    pub switchable: bool,
    pub switch: Switch,
}

impl GateRecord {
    pub fn new(kind: GateKind, wires: Vec<usize>) -> Self {
        Self { kind, wires, switchable: false, switch: Switch::On }
    }

    pub fn switched(kind: GateKind, wires: Vec<usize>, switch: Switch) -> Self {
        Self { kind, wires, switchable: true, switch }
    }

    pub fn is_active(&self) -> bool {
        self.switch == Switch::On
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TailedCircuit {
    n_wires: usize,
    gates: Vec<GateRecord>,
    inputs: Vec<InputState>,
}

impl TailedCircuit {
    pub fn new(n_wires: usize, gates: Vec<GateRecord>, inputs: Vec<InputState>) -> Result<Self> {
        let c = Self { n_wires, gates, inputs };
        c.validate()?;
        Ok(c)
    }

    /// Circuit with every input `|0>`.
    pub fn with_gates(n_wires: usize, gates: Vec<GateRecord>) -> Result<Self> {
        Self::new(n_wires, gates, vec![InputState::Zero; n_wires])
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_wires == 0 || self.n_wires > MAX_WIRES {
            return Err(Error::InvalidCircuit(alloc::format!("wire count {} outside 1..={MAX_WIRES}", self.n_wires)));
        }
        if self.inputs.len() != self.n_wires {
            return Err(Error::InvalidCircuit(alloc::format!(
                "{} input states for {} wires",
                self.inputs.len(),
                self.n_wires
            )));
        }
        if self.gates.is_empty() {
            return Err(Error::InvalidCircuit("circuit has no gates".into()));
        }
        for (i, g) in self.gates.iter().enumerate() {
            if g.wires.len() != g.kind.arity() {
                return Err(Error::InvalidCircuit(alloc::format!(
                    "gate {i} ({}) expects {} wires, got {}",
                    g.kind,
                    g.kind.arity(),
                    g.wires.len()
                )));
            }
            if let Some(&w) = g.wires.iter().find(|&&w| w >= self.n_wires) {
                return Err(Error::InvalidCircuit(alloc::format!("gate {i} uses wire {w} of {}", self.n_wires)));
            }
            if g.wires.len() == 2 && g.wires[0] == g.wires[1] {
                return Err(Error::InvalidCircuit(alloc::format!("gate {i}: CNOT control equals target")));
            }
            if !g.switchable && g.switch == Switch::Off {
                return Err(Error::InvalidCircuit(alloc::format!("gate {i} is off but not switchable")));
            }
        }
        Ok(())
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn gates(&self) -> &[GateRecord] {
        &self.gates
    }

    pub fn inputs(&self) -> &[InputState] {
        &self.inputs
    }

    pub fn input_states(&self) -> Vec<DensityOperator> {
        self.inputs.iter().map(|i| i.density()).collect()
    }

    /// Random circuit over {H, T, CNOT} with `depth` gates and random inputs.
    pub fn random<R: Rng + ?Sized>(n_wires: usize, depth: usize, rng: &mut R) -> Result<Self> {
        let mut gates = Vec::with_capacity(depth);
        for _ in 0..depth.max(1) {
            let kind = match rng.random_range(0..3) {
                0 => GateKind::H,
                1 => GateKind::T,
                _ => GateKind::Cnot,
            };
            if kind == GateKind::Cnot && n_wires >= 2 {
                let c = rng.random_range(0..n_wires);
                let mut t = rng.random_range(0..n_wires - 1);
                if t >= c {
                    t += 1;
                }
                gates.push(GateRecord::new(kind, vec![c, t]));
            } else {
                let k = if kind == GateKind::Cnot { GateKind::H } else { kind };
                gates.push(GateRecord::new(k, vec![rng.random_range(0..n_wires)]));
            }
        }
        let inputs = (0..n_wires).map(|_| InputState::ALL[rng.random_range(0..InputState::ALL.len())]).collect();
        Self::new(n_wires, gates, inputs)
    }

    /// Direct simulation of the ideal circuit (switched-off gates act as identity).
    pub fn oracle_output(&self, inputs: &[DensityOperator]) -> Result<DensityOperator> {
        let mut state = product_state(inputs)?;
        for g in self.gates.iter().filter(|g| g.is_active()) {
            state = state.evolve(&g.kind.matrix(), &g.wires)?;
        }
        Ok(state)
    }
}

fn product_state(inputs: &[DensityOperator]) -> Result<DensityOperator> {
    let mut iter = inputs.iter();
    let first = iter.next().ok_or_else(|| Error::InvalidCircuit("no inputs".into()))?;
    Ok(iter.fold(first.clone(), |acc, s| acc.kron(s)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    Standard,
    Covariant,
}

/// A composition linking the head of `from_step` to the tail of the
/// current step on `wire`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Junction {
    pub wire: usize,
    pub from_step: usize,
    pub flavor: Flavor,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlanStep {
    pub gate: GateRecord,
    pub program: String,
    /// Junctions into this step, in gate-wire order.
    pub junctions: Vec<Junction>,
    /// Wires whose input is written into this step's tail.
    pub injections: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompositionPlan {
    n_wires: usize,
    steps: Vec<PlanStep>,
    inputs: Vec<InputState>,
}

impl CompositionPlan {
    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn steps(&self) -> &[PlanStep] {
        &self.steps
    }

    pub fn inputs(&self) -> &[InputState] {
        &self.inputs
    }

    pub fn compositions(&self) -> impl Iterator<Item = (usize, &Junction)> {
        self.steps.iter().enumerate().flat_map(|(i, s)| s.junctions.iter().map(move |j| (i, j)))
    }

    /// Every program head and tail takes part in at most one composition.
    pub fn check_flow(&self) -> Result<()> {
        let mut heads = Vec::new();
        let mut tails = Vec::new();
        for (step, j) in self.compositions() {
            if heads.contains(&(j.from_step, j.wire)) || tails.contains(&(step, j.wire)) {
                return Err(Error::InvalidCircuit(alloc::format!("wire {} of step {step} is linked twice", j.wire)));
            }
            if j.from_step >= step {
                return Err(Error::InvalidCircuit(alloc::format!("step {step} links forward to {}", j.from_step)));
            }
            heads.push((j.from_step, j.wire));
            tails.push((step, j.wire));
        }
        Ok(())
    }
}

/// Compile a circuit into a composition plan.
pub fn compile(c: &TailedCircuit) -> Result<CompositionPlan> {
    c.validate()?;
    let mut last: Vec<Option<usize>> = vec![None; c.n_wires];
    let mut steps = Vec::with_capacity(c.gates.len());
    for (i, g) in c.gates.iter().enumerate() {
        let mut junctions = Vec::new();
        let mut injections = Vec::new();
        for &w in &g.wires {
            match last[w] {
                None => injections.push(w),
                Some(prev) => {
                    let prev_gate = &c.gates[prev];
                    let after_cnot = prev_gate.is_active() && prev_gate.kind == GateKind::Cnot;
                    let flavor = match (g.is_active(), g.kind) {
                        (false, _) | (true, GateKind::Cnot) => Flavor::Standard,
                        (true, GateKind::T) => Flavor::Covariant,
                        (true, GateKind::H) if after_cnot => Flavor::Covariant,
                        (true, GateKind::H) => Flavor::Standard,
                    };
                    junctions.push(Junction { wire: w, from_step: prev, flavor });
                }
            }
            last[w] = Some(i);
        }
        steps.push(PlanStep { gate: g.clone(), program: String::from(g.kind.program_name()), junctions, injections });
    }
    let plan = CompositionPlan { n_wires: c.n_wires, steps, inputs: c.inputs.clone() };
    plan.check_flow()?;
    Ok(plan)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostReport {
    pub gate_count: usize,
    /// Number of compositions (each consumes one teleportation link).
    pub ebit_count: usize,
    /// `1` per standard step plus `d²` per covariant step.
    pub expected_attempts: usize,
    pub covariant_steps: usize,
}

pub fn cost_report(plan: &CompositionPlan) -> CostReport {
    let d = 2;
    let (mut std_steps, mut cov) = (0, 0);
    for (_, j) in plan.compositions() {
        match j.flavor {
            Flavor::Standard => std_steps += 1,
            Flavor::Covariant => cov += 1,
        }
    }
    CostReport {
        gate_count: plan.steps.len(),
        ebit_count: std_steps + cov,
        expected_attempts: std_steps + d * d * cov,
        covariant_steps: cov,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Every measurement post-selected on its ideal outcome (analysis mode).
    Postselect,
    /// Accept every outcome and track the Pauli frame; fails on `T` residuals.
    Frame,
    /// Covariant junctions repeat until the byproduct cancels the frame.
    CovariantRetry { budget: usize },
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy::CovariantRetry { budget: DEFAULT_BUDGET }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "postselect" => Ok(Strategy::Postselect),
            "frame" => Ok(Strategy::Frame),
            "covariant-retry" | "covariant" => Ok(Strategy::default()),
            _ => Err(Error::InvalidCircuit(alloc::format!("unknown strategy `{s}`"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Postselect => f.write_str("postselect"),
            Strategy::Frame => f.write_str("frame"),
            Strategy::CovariantRetry { .. } => f.write_str("covariant-retry"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JunctionRecord {
    pub step: usize,
    pub wire: usize,
    pub flavor: Flavor,
    pub outcome: BellOutcome,
    pub attempts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionTrace {
    pub junctions: Vec<JunctionRecord>,
    /// Write-in measurements performed (including failed ones).
    pub write_attempts: usize,
    /// Program copies consumed by compositions, retries included.
    pub ebits_consumed: usize,
    /// Frame removed by the final correction.
    pub final_frame: PauliFrame,
    /// Product of the accepted branch probabilities.
    pub branch_probability: f64,
    /// Non-Pauli residuals left at the end (always 0 for a completed run).
    pub residuals: usize,
}

impl ExecutionTrace {
    pub fn covariant_attempts(&self) -> impl Iterator<Item = usize> + '_ {
        self.junctions.iter().filter(|j| j.flavor == Flavor::Covariant).map(|j| j.attempts)
    }
}

/// Index of the first branch whose cumulative weight exceeds a uniform draw.
fn sample<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
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

/// Run a plan. `inputs` gives one qubit state per wire.
pub fn execute<S: ProgramStore + ?Sized, R: Rng + ?Sized>(
    plan: &CompositionPlan,
    inputs: &[DensityOperator],
    store: &S,
    strategy: Strategy,
    rng: &mut R,
) -> Result<(DensityOperator, ExecutionTrace)> {
    let n = plan.n_wires;
    if inputs.len() != n || inputs.iter().any(|s| s.dims() != [2]) {
        return Err(Error::DimensionMismatch(alloc::format!("expected {n} qubit inputs")));
    }
    let budget = match strategy {
        Strategy::CovariantRetry { budget } => budget.max(1),
        _ => DEFAULT_BUDGET,
    };
    let used: Vec<bool> = (0..n).map(|w| plan.steps.iter().any(|s| s.gate.wires.contains(&w))).collect();
    // Live wires (logical indices, ascending) and their joint state.
    let mut live: Vec<usize> = (0..n).filter(|&w| !used[w]).collect();
    let mut state: Option<DensityOperator> = if live.is_empty() {
        None
    } else {
        Some(product_state(&live.iter().map(|&w| inputs[w].clone()).collect::<Vec<_>>())?)
    };
    let mut frame = PauliFrame::identity(2, n);
    let mut trace = ExecutionTrace {
        junctions: Vec::new(),
        write_attempts: 0,
        ebits_consumed: 0,
        final_frame: frame.clone(),
        branch_probability: 1.0,
        residuals: 0,
    };

    for (si, step) in plan.steps.iter().enumerate() {
        let g = &step.gate;
        let k = g.wires.len();
        let mut program = store.fetch(&step.program)?.canonical()?;
        if program.head_dims() != vec![2; k] || program.tail_dims() != vec![2; k] {
            return Err(Error::MissingProgram(alloc::format!("{} has the wrong shape", step.program)));
        }
        if !g.is_active() {
            program = match strategy {
                Strategy::Postselect => switch_gate(&program, Switch::Off)?,
                _ => switch_gate_sampled(&program, Switch::Off, rng)?.0,
            };
        }

        // Write inputs of fresh wires into their tails (product write).
        let inj_pos: Vec<usize> = (0..k).filter(|&p| step.injections.contains(&g.wires[p])).collect();
        let prog_state = if inj_pos.is_empty() {
            program.state().clone()
        } else {
            let rho = product_state(&inj_pos.iter().map(|&p| inputs[g.wires[p]].clone()).collect::<Vec<_>>())?;
            let tails: Vec<usize> = inj_pos.iter().map(|&p| k + p).collect();
            let mut tries = 0;
            let written = loop {
                tries += 1;
                let (s, prob) = write_partial(&program, &rho, &tails)?;
                let accept = match strategy {
                    Strategy::Postselect => true,
                    _ => rng.random::<f64>() < prob,
                };
                if accept {
                    if strategy == Strategy::Postselect {
                        trace.branch_probability *= prob;
                    }
                    break s;
                }
                if tries >= budget {
                    return Err(Error::HeraldedFailure { attempts: tries });
                }
            };
            trace.write_attempts += tries;
            written
        };
        for &p in &inj_pos {
            frame.clear(g.wires[p]);
        }
        // Remaining program wires: heads 0..k, then tails of junction wires (ascending gate position).
        let junction_pos: Vec<usize> = (0..k).filter(|p| !inj_pos.contains(p)).collect();

        let l = live.len();
        let mut joint = match &state {
            Some(s) => s.kron(&prog_state),
            None => prog_state,
        };
        // Track the current index of every original joint wire as pairs are removed.
        let mut alive: Vec<usize> = (0..joint.n_wires()).collect();
        for (ti, &p) in junction_pos.iter().enumerate() {
            let w = g.wires[p];
            let flavor = step
                .junctions
                .iter()
                .find(|j| j.wire == w)
                .map(|j| j.flavor)
                .ok_or_else(|| Error::InvalidCircuit(alloc::format!("step {si} lacks a junction for wire {w}")))?;
            let lw = live.iter().position(|&x| x == w).expect("junction wire is live");
            let tw = l + k + ti;
            let pos = |orig: usize, alive: &[usize]| alive.iter().position(|&x| x == orig).expect("wire still present");
            let (a, b) = (pos(lw, &alive), pos(tw, &alive));
            let (x, z) = frame.get(w);
            let mut attempts = 0;
            let (outcome, post, prob) = loop {
                attempts += 1;
                let outcome = match strategy {
                    Strategy::Postselect => (0, 0),
                    _ => {
                        let branches = bell_branches(&joint, a, b)?;
                        let probs: Vec<f64> = branches.iter().map(|m| m.probability).collect();
                        branches[sample(&probs, rng)].outcome
                    }
                };
                let wanted = (x, z);
                let retry = matches!(strategy, Strategy::CovariantRetry { .. })
                    && flavor == Flavor::Covariant
                    && outcome != wanted;
                if !retry {
                    let m = bell_project(&joint, a, b, outcome)?;
                    let post = m.post_state.ok_or(Error::ZeroProbability)?;
                    break (outcome, post, m.probability);
                }
                if attempts >= budget {
                    trace.ebits_consumed += attempts;
                    return Err(Error::HeraldedFailure { attempts });
                }
            };
            if strategy == Strategy::Postselect {
                trace.branch_probability *= prob;
            }
            joint = post;
            alive.retain(|&x| x != lw && x != tw);
            frame.add(w, 2 - outcome.0, 2 - outcome.1);
            trace.ebits_consumed += attempts;
            trace.junctions.push(JunctionRecord { step: si, wire: w, flavor, outcome, attempts });
        }

        // Push the frame through the gate the program applied.
        if g.is_active() {
            let fg = match g.kind {
                GateKind::H => FrameGate::H(g.wires[0]),
                GateKind::T => FrameGate::T(g.wires[0]),
                GateKind::Cnot => FrameGate::Cnot { control: g.wires[0], target: g.wires[1] },
            };
            let (next, residual) = commute_frame_through(&frame, fg)?;
            if let Some(r) = residual {
                trace.residuals += 1;
                let crate::teleport::Residual::S(w) = r;
                return Err(Error::UnresolvedResidual(w));
            }
            frame = next;
        }

        // Remaining joint wires: untouched live wires (ascending), then heads.
        let mut labels: Vec<usize> = live.iter().copied().filter(|w| !g.wires.contains(w)).collect();
        labels.extend_from_slice(&g.wires);
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by_key(|&i| labels[i]);
        joint = joint.permute(&order)?;
        labels.sort_unstable();
        live = labels;
        state = Some(joint);
    }

    let state = state.ok_or_else(|| Error::InvalidCircuit("empty circuit".into()))?;
    debug_assert_eq!(live, (0..n).collect::<Vec<_>>());
    let out = frame.correct(&state)?;
    trace.final_frame = frame;
    Ok((out, trace))
}

/// Wires of the switch gadget for a `k`-wire program: `[h.., t.., (e1, e2)..]`.
type Gadget = (DensityOperator, Vec<(usize, usize)>, usize);

fn gadget(p: &ProgramState, state: Switch) -> Result<Gadget> {
    let p = p.canonical()?;
    let k = p.head_wires().len();
    if !(1..=2).contains(&k) || p.head_dims() != vec![2; k] || p.tail_dims() != vec![2; k] {
        return Err(Error::Unsupported("switching needs a 1- or 2-qubit gate program".into()));
    }
    let mut joint = p.state().clone();
    for _ in 0..k {
        joint = joint.kron(&ebit(2)?.to_density());
    }
    let e1 = |j: usize| 2 * k + 2 * j;
    let pairs = match state {
        // ON: the ebits are erased and the program path is kept.
        Switch::On => (0..k).map(|j| (e1(j), e1(j) + 1)).collect(),
        // OFF: three CNOTs swap each head into the ebit, then the program
        // pair is erased, leaving (h, e2) holding a fresh ebit.
        Switch::Off => {
            for j in 0..k {
                let (h, e) = (j, e1(j));
                joint = joint.evolve(&gates::cnot(), &[h, e])?;
                joint = joint.evolve(&gates::cnot(), &[e, h])?;
                joint = joint.evolve(&gates::cnot(), &[h, e])?;
            }
            (0..k).map(|j| (e1(j), k + j)).collect()
        }
    };
    Ok((joint, pairs, k))
}

fn finish_switch(rest: DensityOperator, k: usize) -> Result<ProgramState> {
    // Remaining wires: heads then the k surviving tails (t or e2).
    ProgramState::new(rest, (0..k).collect(), (k..2 * k).collect())
}

/// Switch a gate program on or off in analysis mode: the most likely Bell
/// branch is post-selected (every branch gives the same program).
pub fn switch_gate(p: &ProgramState, state: Switch) -> Result<ProgramState> {
    let branches = switch_branches(p, state)?;
    let best = branches
        .into_iter()
        .reduce(|a, b| if b.1 > a.1 + 1e-12 { b } else { a })
        .ok_or(Error::ZeroProbability)?;
    Ok(best.2)
}

/// Every Bell branch of the switch gadget with nonzero probability.
pub fn switch_branches(p: &ProgramState, state: Switch) -> Result<Vec<(Vec<BellOutcome>, f64, ProgramState)>> {
    let (joint, pairs, k) = gadget(p, state)?;
    let mut out = Vec::new();
    for idx in 0..(1usize << (2 * k)) {
        let outcomes: Vec<BellOutcome> = (0..k).map(|j| ((idx >> (2 * j + 1)) & 1, (idx >> (2 * j)) & 1)).collect();
        match bell_project_pairs(&joint, &pairs, &outcomes) {
            Ok((rest, prob)) => out.push((outcomes, prob, finish_switch(rest, k)?)),
            Err(Error::ZeroProbability) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Switch with sampled Bell outcomes. Returns the program, the outcomes and
/// the Pauli frame they leave on the program (identity for this gadget).
pub fn switch_gate_sampled<R: Rng + ?Sized>(
    p: &ProgramState,
    state: Switch,
    rng: &mut R,
) -> Result<(ProgramState, Vec<BellOutcome>, PauliFrame)> {
    let branches = switch_branches(p, state)?;
    let probs: Vec<f64> = branches.iter().map(|b| b.1).collect();
    let (outcomes, _, prog) = branches.into_iter().nth(sample(&probs, rng)).expect("at least one branch");
    let k = outcomes.len();
    Ok((prog, outcomes, PauliFrame::identity(2, k)))
}
