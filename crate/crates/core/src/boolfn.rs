//! Boolean functions `{0,1}^m → {0,1}^n` and the synaptic gates compiled from them.
//!
//! A synaptic gate is `Σ_s |s⟩⟨s| ⊗ B_{g(s)}` where `B_{g(s)}` puts a NOT on
//! every target whose bit of `g(s)` is set. It is stored as the map from
//! control pattern to target flip mask, so applying it is a basis permutation.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::{basis_label, bit_position, parse_bits, StateVector};

/// Largest input or output arity accepted for a truth table.
pub const MAX_ARITY: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    m: usize,
    n: usize,
    /// `table[s]` is `g(s)`; both sides are MSB-first integers.
    table: Vec<usize>,
}

impl BooleanFunction {
    pub fn new(m: usize, n: usize, table: Vec<usize>) -> Result<Self> {
        if m > MAX_ARITY || n > MAX_ARITY || n == 0 {
            return Err(Error::config(format!(
                "arity {m} -> {n} outside the supported range (n >= 1, both <= {MAX_ARITY})"
            )));
        }
        if table.len() != 1 << m {
            return Err(Error::config(format!(
                "truth table for {m} inputs needs {} rows, got {}",
                1usize << m,
                table.len()
            )));
        }
        if let Some((s, &out)) = table.iter().enumerate().find(|(_, &out)| out >> n != 0) {
            return Err(Error::config(format!(
                "output {out} for input {} does not fit in {n} bits",
                basis_label(s, m)
            )));
        }
        Ok(Self { m, n, table })
    }

    pub fn from_fn(m: usize, n: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        if m > MAX_ARITY {
            return Err(Error::config(format!("input arity {m} exceeds {MAX_ARITY}")));
        }
        Self::new(m, n, (0..1usize << m).map(f).collect())
    }

    /// Builds a table from output bitstrings listed in ascending input order.
    pub fn from_output_strings(m: usize, outputs: &[&str]) -> Result<Self> {
        let n = outputs.first().map(|s| s.len()).unwrap_or(0);
        if let Some(bad) = outputs.iter().find(|s| s.len() != n) {
            return Err(Error::config(format!("output {bad:?} does not have length {n}")));
        }
        let table = outputs.iter().map(|s| parse_bits(s)).collect::<Result<_>>()?;
        Self::new(m, n, table)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// `g(s)` with `s` and the result as MSB-first integers.
    pub fn eval(&self, s: usize) -> usize {
        self.table[s]
    }

    pub fn output_label(&self, s: usize) -> String {
        basis_label(self.table[s], self.n)
    }

    /// `g_l(s)`: bit `l` (0 = leftmost) of `g(s)`.
    pub fn local_map(&self, l: usize, s: &str) -> Result<bool> {
        if l >= self.n {
            return Err(Error::argument(format!(
                "output component {l} out of range for arity {}",
                self.n
            )));
        }
        if s.len() != self.m {
            return Err(Error::argument(format!(
                "input {s:?} has length {}, expected {}",
                s.len(),
                self.m
            )));
        }
        let out = self.table[parse_bits(s)?];
        Ok(out >> bit_position(self.n, l) & 1 == 1)
    }

    /// Reads the `input -> output` text format. Rows must cover every input
    /// exactly once, in ascending order; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut m = None;
        let mut n = None;
        let mut table = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| Error::parse(line_no, format!("expected `input -> output`, got {line:?}")))?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            let arity_in = *m.get_or_insert(lhs.len());
            let arity_out = *n.get_or_insert(rhs.len());
            if lhs.len() != arity_in || rhs.len() != arity_out {
                return Err(Error::parse(
                    line_no,
                    format!("row {line:?} does not match arity {arity_in} -> {arity_out}"),
                ));
            }
            let s = parse_bits(lhs).map_err(|e| Error::parse(line_no, e.to_string()))?;
            if s != table.len() {
                return Err(Error::parse(
                    line_no,
                    format!(
                        "expected input {} next (rows must be complete and ascending)",
                        basis_label(table.len(), arity_in)
                    ),
                ));
            }
            table.push(parse_bits(rhs).map_err(|e| Error::parse(line_no, e.to_string()))?);
        }
        let (Some(m), Some(n)) = (m, n) else {
            return Err(Error::parse(last_line.max(1), "truth table has no rows"));
        };
        if table.len() != 1 << m {
            return Err(Error::parse(
                last_line,
                format!("truth table has {} rows, expected {}", table.len(), 1usize << m),
            ));
        }
        Self::new(m, n, table).map_err(|e| Error::parse(last_line, e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in 0..self.table.len() {
            let _ = writeln!(out, "{} -> {}", basis_label(s, self.m), self.output_label(s));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SynapticGate {
    m: usize,
    n: usize,
    /// Flip mask over the targets (MSB-first) for each control pattern.
    masks: Vec<usize>,
}

impl SynapticGate {
    /// `|0⟩⟨0| ⊗ 1 + |1⟩⟨1| ⊗ NOT` (`on = true`) or the inhibitory form
    /// `|0⟩⟨0| ⊗ NOT + |1⟩⟨1| ⊗ 1` (`on = false`).
    pub fn controlled_not(on: bool) -> Self {
        let masks = if on { vec![0, 1] } else { vec![1, 0] };
        Self { m: 1, n: 1, masks }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn flip_mask(&self, s: usize) -> usize {
        self.masks[s]
    }

    /// The gate as a permutation of the `2^{m+n}` basis with controls
    /// leading: entry `i` is the image of basis index `i`.
    pub fn permutation(&self) -> Vec<usize> {
        (0..1usize << (self.m + self.n))
            .map(|i| i ^ self.masks[i >> self.n])
            .collect()
    }

    /// Dense `2^{m+n}` matrix, controls leading. Only meant for small gates.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let dim = 1usize << (self.m + self.n);
        let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for (col, row) in self.permutation().into_iter().enumerate() {
            out[row][col] = Complex64::new(1.0, 0.0);
        }
        out
    }
}

pub fn compile_synaptic(g: &BooleanFunction) -> SynapticGate {
    SynapticGate {
        m: g.m,
        n: g.n,
        masks: g.table.clone(),
    }
}

fn check_wiring(n_qubits: usize, controls: &[usize], targets: &[usize]) -> Result<()> {
    let mut seen = vec![false; n_qubits];
    for &q in controls.iter().chain(targets) {
        if q >= n_qubits {
            return Err(Error::argument(format!(
                "qubit {q} out of range for {n_qubits} qubits"
            )));
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(Error::argument(format!(
                "qubit {q} appears more than once among controls and targets"
            )));
        }
    }
    Ok(())
}

pub(crate) fn apply_synaptic_in_place(
    amps: &mut [Complex64],
    n_qubits: usize,
    gate: &SynapticGate,
    controls: &[usize],
    targets: &[usize],
) {
    let ctrl_pos: Vec<usize> = controls.iter().map(|&q| bit_position(n_qubits, q)).collect();
    let tgt_pos: Vec<usize> = targets.iter().map(|&q| bit_position(n_qubits, q)).collect();
    // Flip masks translated into register coordinates.
    let flips: Vec<usize> = gate
        .masks
        .iter()
        .map(|&mask| {
            tgt_pos
                .iter()
                .enumerate()
                .filter(|(j, _)| mask >> (gate.n - 1 - j) & 1 == 1)
                .fold(0usize, |acc, (_, &p)| acc | 1 << p)
        })
        .collect();
    for i in 0..amps.len() {
        let s = ctrl_pos.iter().fold(0usize, |acc, &p| acc << 1 | (i >> p & 1));
        let j = i ^ flips[s];
        if j > i {
            amps.swap(i, j);
        }
    }
}

/// XORs `g(s)` into the `targets` wherever the `controls` read `s`.
pub fn apply_synaptic(
    state: &StateVector,
    gate: &SynapticGate,
    controls: &[usize],
    targets: &[usize],
) -> Result<StateVector> {
    if controls.len() != gate.m || targets.len() != gate.n {
        return Err(Error::argument(format!(
            "gate arity {} -> {} wired to {} controls and {} targets",
            gate.m,
            gate.n,
            controls.len(),
            targets.len()
        )));
    }
    check_wiring(state.n_qubits(), controls, targets)?;
    let mut out = state.clone();
    apply_synaptic_in_place(out.amplitudes_mut(), state.n_qubits(), gate, controls, targets);
    Ok(out)
}

/// Recovers `g` by running the gate on every `|s⟩|0…0⟩`.
pub fn truth_table_of(gate: &SynapticGate) -> BooleanFunction {
    let total = gate.m + gate.n;
    let controls: Vec<usize> = (0..gate.m).collect();
    let targets: Vec<usize> = (gate.m..total).collect();
    let out_mask = (1usize << gate.n) - 1;
    let table = (0..1usize << gate.m)
        .map(|s| {
            let mut amps = vec![Complex64::new(0.0, 0.0); 1 << total];
            amps[s << gate.n] = Complex64::new(1.0, 0.0);
            apply_synaptic_in_place(&mut amps, total, gate, &controls, &targets);
            let image = amps.iter().position(|a| a.re == 1.0).expect("permutation keeps a unit entry");
            image & out_mask
        })
        .collect();
    BooleanFunction {
        m: gate.m,
        n: gate.n,
        table,
    }
}
