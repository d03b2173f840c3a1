//! Feedforward network architectures and the per-history operator.
//!
//! Neurons are numbered from 0 across all layers in order, so in a `[1, 2, 1]`
//! network the input is neuron 0, the middle layer is 1 and 2 and the output
//! is 3. Every history starts from the all-non-firing state.

use std::ops::Range;

use num_complex::Complex64;

use crate::boolfn::{apply_synaptic_in_place, compile_synaptic, BooleanFunction, SynapticGate};
use crate::error::{Error, Result};
use crate::gates::{apply_single_in_place, fixed_gate, u2_from_params, FixedGate, GateParams, Unitary2};
use crate::qstate::{basis_label, bit_position, StateVector, DEFAULT_MAX_QUBITS};

/// Probability tolerance used when checking that an output layer reads a
/// definite pattern.
pub const TRUTH_TABLE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum SynapticStep {
    /// `Σ_s |s⟩⟨s| ⊗ B_{g(s)}` from `controls` onto `targets`.
    Boolean {
        function: BooleanFunction,
        gate: SynapticGate,
        controls: Vec<usize>,
        targets: Vec<usize>,
    },
    /// One single-qubit unitary per target, no controls.
    PostUnitary { gates: Vec<Unitary2>, targets: Vec<usize> },
}

impl SynapticStep {
    pub fn boolean(function: BooleanFunction, controls: Vec<usize>, targets: Vec<usize>) -> Result<Self> {
        if controls.len() != function.m() || targets.len() != function.n() {
            return Err(Error::config(format!(
                "function of arity {} -> {} wired to {} controls and {} targets",
                function.m(),
                function.n(),
                controls.len(),
                targets.len()
            )));
        }
        let gate = compile_synaptic(&function);
        Ok(SynapticStep::Boolean {
            function,
            gate,
            controls,
            targets,
        })
    }

    pub fn post_unitary(gates: Vec<Unitary2>, targets: Vec<usize>) -> Result<Self> {
        if gates.len() != targets.len() {
            return Err(Error::config(format!(
                "{} unitaries for {} targets",
                gates.len(),
                targets.len()
            )));
        }
        Ok(SynapticStep::PostUnitary { gates, targets })
    }

    /// The same fixed gate on every listed target.
    pub fn post_gate(gate: FixedGate, targets: Vec<usize>) -> Self {
        SynapticStep::PostUnitary {
            gates: vec![fixed_gate(gate); targets.len()],
            targets,
        }
    }

    pub fn controls(&self) -> &[usize] {
        match self {
            SynapticStep::Boolean { controls, .. } => controls,
            SynapticStep::PostUnitary { .. } => &[],
        }
    }

    pub fn targets(&self) -> &[usize] {
        match self {
            SynapticStep::Boolean { targets, .. } | SynapticStep::PostUnitary { targets, .. } => targets,
        }
    }

    fn apply_in_place(&self, amps: &mut [Complex64], n_qubits: usize) {
        match self {
            SynapticStep::Boolean {
                gate,
                controls,
                targets,
                ..
            } => apply_synaptic_in_place(amps, n_qubits, gate, controls, targets),
            SynapticStep::PostUnitary { gates, targets } => {
                for (u, &t) in gates.iter().zip(targets) {
                    apply_single_in_place(amps, n_qubits, u, t);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    layers: Vec<usize>,
    steps: Vec<SynapticStep>,
}

impl NetworkSpec {
    pub fn new(layers: Vec<usize>, steps: Vec<SynapticStep>) -> Result<Self> {
        Self::with_max_qubits(layers, steps, DEFAULT_MAX_QUBITS)
    }

    pub fn with_max_qubits(layers: Vec<usize>, steps: Vec<SynapticStep>, max_qubits: usize) -> Result<Self> {
        let total: usize = layers.iter().sum();
        if total == 0 {
            return Err(Error::config("network has no neurons"));
        }
        if total > max_qubits {
            return Err(Error::config(format!(
                "network has {total} neurons, above the cap of {max_qubits}"
            )));
        }
        for (k, step) in steps.iter().enumerate() {
            let mut seen = vec![false; total];
            for &q in step.controls().iter().chain(step.targets()) {
                if q >= total {
                    return Err(Error::config(format!(
                        "step {k} references neuron {q}, but the network has {total}"
                    )));
                }
                if std::mem::replace(&mut seen[q], true) {
                    return Err(Error::config(format!(
                        "step {k} uses neuron {q} more than once"
                    )));
                }
            }
        }
        Ok(Self { layers, steps })
    }

    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    pub fn steps(&self) -> &[SynapticStep] {
        &self.steps
    }

    pub fn n_neurons(&self) -> usize {
        self.layers.iter().sum()
    }

    /// Neuron indices belonging to layer `layer`.
    pub fn layer_neurons(&self, layer: usize) -> Range<usize> {
        let start: usize = self.layers[..layer].iter().sum();
        start..start + self.layers[layer]
    }

    pub fn input_neurons(&self) -> Vec<usize> {
        self.layer_neurons(0).collect()
    }

    pub fn output_neurons(&self) -> Vec<usize> {
        self.layer_neurons(self.layers.len() - 1).collect()
    }

    /// Neurons in neither the first nor the last layer.
    pub fn hidden_neurons(&self) -> usize {
        if self.layers.len() <= 2 {
            0
        } else {
            self.layers[1..self.layers.len() - 1].iter().sum()
        }
    }

    /// Applies the synaptic steps, in order, to a raw amplitude buffer.
    pub(crate) fn apply_steps_in_place(&self, amps: &mut [Complex64]) {
        let n = self.n_neurons();
        for step in &self.steps {
            step.apply_in_place(amps, n);
        }
    }
}

/// `N_φ`: a U(2) gate on each input neuron followed by the network's steps.
#[derive(Debug, Clone)]
pub struct HistoryOperator<'a> {
    net: &'a NetworkSpec,
    input_gates: Vec<(usize, Unitary2)>,
}

impl<'a> HistoryOperator<'a> {
    pub fn new(net: &'a NetworkSpec, phis: &[GateParams], input_neurons: &[usize]) -> Result<Self> {
        if phis.len() != input_neurons.len() {
            return Err(Error::config(format!(
                "{} parameter tuples for {} input neurons",
                phis.len(),
                input_neurons.len()
            )));
        }
        check_inputs(net, input_neurons)?;
        Ok(Self {
            net,
            input_gates: input_neurons
                .iter()
                .zip(phis)
                .map(|(&q, phi)| (q, u2_from_params(phi)))
                .collect(),
        })
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let n = self.net.n_neurons();
        if state.n_qubits() != n {
            return Err(Error::argument(format!(
                "history operator on {n} neurons applied to a {}-qubit state",
                state.n_qubits()
            )));
        }
        let mut out = state.clone();
        for (q, u) in &self.input_gates {
            apply_single_in_place(out.amplitudes_mut(), n, u, *q);
        }
        self.net.apply_steps_in_place(out.amplitudes_mut());
        Ok(out)
    }

    /// `N_φ|0…0⟩`.
    pub fn run(&self) -> StateVector {
        let ground = StateVector::basis(self.net.n_neurons(), 0).expect("network size is within the cap");
        self.apply(&ground).expect("ground state matches the network size")
    }
}

pub(crate) fn check_inputs(net: &NetworkSpec, input_neurons: &[usize]) -> Result<()> {
    let n = net.n_neurons();
    let mut seen = vec![false; n];
    for &q in input_neurons {
        if q >= n {
            return Err(Error::config(format!("input neuron {q} out of range for {n} neurons")));
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(Error::config(format!("input neuron {q} listed twice")));
        }
    }
    Ok(())
}

/// One history of the network: `N_φ|0…0⟩`.
pub fn run_history(net: &NetworkSpec, phis: &[GateParams], input_neurons: &[usize]) -> Result<StateVector> {
    Ok(HistoryOperator::new(net, phis, input_neurons)?.run())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub index: usize,
    pub label: String,
    pub amplitude: Complex64,
}

/// Basis components with `|amplitude| > threshold`, in index order.
pub fn branch_amplitudes(state: &StateVector, threshold: f64) -> Result<Vec<Branch>> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::argument(format!("threshold must be non-negative, got {threshold}")));
    }
    let n = state.n_qubits();
    Ok(state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| threshold == 0.0 || a.norm() > threshold)
        .map(|(index, &amplitude)| Branch {
            index,
            label: basis_label(index, n),
            amplitude,
        })
        .collect())
}

/// Two layers, `g.m()` inputs and `g.n()` outputs, one Boolean step between them.
pub fn boolean_network_for(g: &BooleanFunction) -> NetworkSpec {
    let (m, n) = (g.m(), g.n());
    let step = SynapticStep::boolean(g.clone(), (0..m).collect(), (m..m + n).collect())
        .expect("arity matches by construction");
    NetworkSpec::with_max_qubits(vec![m, n], vec![step], usize::MAX).expect("wiring is valid by construction")
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthTableRow {
    pub input: String,
    pub expected: String,
    /// Probability that the output neurons read `expected`.
    pub probability: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TruthTableReport {
    pub rows: Vec<TruthTableRow>,
}

impl TruthTableReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Fails with the first row that did not reproduce the table.
    pub fn ensure_all_pass(&self) -> Result<()> {
        match self.rows.iter().find(|r| !r.pass) {
            None => Ok(()),
            Some(r) => Err(Error::Verification {
                input: r.input.clone(),
                expected: r.expected.clone(),
                probability: r.probability,
            }),
        }
    }
}

/// Probability that `outputs` read the pattern `expected` (MSB-first).
pub fn pattern_probability(state: &StateVector, outputs: &[usize], expected: usize) -> f64 {
    let n = state.n_qubits();
    let read = |i: usize| outputs.iter().fold(0usize, |acc, &q| acc << 1 | (i >> bit_position(n, q) & 1));
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| read(*i) == expected)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Runs every input pattern through the network (first layer as inputs,
/// last layer as outputs) and checks the output layer reads `g(s)`.
pub fn verify_truth_table(net: &NetworkSpec, g: &BooleanFunction) -> Result<TruthTableReport> {
    verify_truth_table_on(net, g, &net.input_neurons(), &net.output_neurons())
}

/// [`verify_truth_table`] with explicit input and output neurons.
pub fn verify_truth_table_on(
    net: &NetworkSpec,
    g: &BooleanFunction,
    inputs: &[usize],
    outputs: &[usize],
) -> Result<TruthTableReport> {
    if inputs.len() != g.m() || outputs.len() != g.n() {
        return Err(Error::config(format!(
            "function of arity {} -> {} checked against {} inputs and {} outputs",
            g.m(),
            g.n(),
            inputs.len(),
            outputs.len()
        )));
    }
    let n = net.n_neurons();
    if let Some(&q) = outputs.iter().find(|&&q| q >= n) {
        return Err(Error::config(format!("output neuron {q} out of range for {n} neurons")));
    }
    let m = g.m();
    let rows = (0..1usize << m)
        .map(|s| {
            let phis: Vec<GateParams> = (0..m)
                .map(|k| {
                    if s >> (m - 1 - k) & 1 == 1 {
                        GateParams::NOT
                    } else {
                        GateParams::IDENTITY
                    }
                })
                .collect();
            let state = run_history(net, &phis, inputs)?;
            let probability = pattern_probability(&state, outputs, g.eval(s));
            Ok(TruthTableRow {
                input: basis_label(s, m),
                expected: g.output_label(s),
                probability,
                pass: (probability - 1.0).abs() <= TRUTH_TABLE_TOLERANCE,
            })
        })
        .collect::<Result<_>>()?;
    Ok(TruthTableReport { rows })
}

/// The networks analysed in the scenario reports.
pub mod builtin {
    use super::*;

    /// The four functions `{0,1} → {0,1}`: constant 0, identity, negation, constant 1.
    pub fn unary_functions() -> [(&'static str, BooleanFunction); 4] {
        let f = |outs: [usize; 2]| BooleanFunction::new(1, 1, outs.to_vec()).expect("valid table");
        [
            ("g(s)=0", f([0, 0])),
            ("g(s)=s", f([0, 1])),
            ("g(s)=1-s", f([1, 0])),
            ("g(s)=1", f([1, 1])),
        ]
    }

    /// Input to middle layer: `g(0) = 01`, `g(1) = 10`.
    pub fn fan_out() -> BooleanFunction {
        BooleanFunction::new(1, 2, vec![0b01, 0b10]).expect("valid table")
    }

    /// Exclusive or on the middle layer.
    pub fn xor() -> BooleanFunction {
        BooleanFunction::new(2, 1, vec![0, 1, 1, 0]).expect("valid table")
    }

    /// `h(00) = h(11) = h(01) = 0`, `h(10) = 1`.
    pub fn hadamard_variant_readout() -> BooleanFunction {
        BooleanFunction::new(2, 1, vec![0, 0, 1, 0]).expect("valid table")
    }

    /// `N1 → N2` with the synaptic gate of `g`.
    pub fn two_neuron(g: &BooleanFunction) -> NetworkSpec {
        boolean_network_for(g)
    }

    /// The `[1, 2, 1]` network whose output neuron computes XOR of the middle layer.
    pub fn xor_network() -> NetworkSpec {
        NetworkSpec::new(
            vec![1, 2, 1],
            vec![
                SynapticStep::boolean(fan_out(), vec![0], vec![1, 2]).expect("arity"),
                SynapticStep::boolean(xor(), vec![1, 2], vec![3]).expect("arity"),
            ],
        )
        .expect("valid network")
    }

    /// Same architecture, with the last step replaced by `U_H U_h`.
    pub fn hadamard_variant_network() -> NetworkSpec {
        NetworkSpec::new(
            vec![1, 2, 1],
            vec![
                SynapticStep::boolean(fan_out(), vec![0], vec![1, 2]).expect("arity"),
                SynapticStep::boolean(hadamard_variant_readout(), vec![1, 2], vec![3]).expect("arity"),
                SynapticStep::post_gate(FixedGate::Hadamard, vec![3]),
            ],
        )
        .expect("valid network")
    }

    /// `S12 = |0⟩⟨0| ⊗ U_H + |1⟩⟨1| ⊗ U_H U_NOT`, written as CNOT(1) followed by H on the output.
    pub fn complementarity_network() -> NetworkSpec {
        NetworkSpec::new(
            vec![1, 1],
            vec![
                SynapticStep::boolean(BooleanFunction::new(1, 1, vec![0, 1]).expect("valid"), vec![0], vec![1])
                    .expect("arity"),
                SynapticStep::post_gate(FixedGate::Hadamard, vec![1]),
            ],
        )
        .expect("valid network")
    }
}
