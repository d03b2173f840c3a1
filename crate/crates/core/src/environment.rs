//! The environment register: free-particle modes on the 4-torus, wave packets
//! built from them, and the network density matrix averaged over the packet.
//!
//! Each input neuron gets its own packet over its own gate angles. Tracing the
//! angle register out of `∫ Ψ(φ)|φ⟩ ⊗ N_φ|0…0⟩` leaves
//! `ρ = ∫ |Ψ(φ)|² N_φ|0…0⟩⟨0…0|N_φ†`, which the quadrature grid evaluates.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gates::GateParams;
use crate::network::{check_inputs, run_history, NetworkSpec};
use crate::qstate::{DensityMatrix, StateVector};
use crate::quadrature::QuadratureGrid;

/// Normalization of a single torus eigenfunction, `1/(4π²)`.
pub const EIGENFUNCTION_SCALE: f64 = 1.0 / (4.0 * PI * PI);

pub const DEFAULT_N_MAX: u32 = 3;

/// Packets whose norm is off by more than this are renormalized with a warning.
pub const PACKET_NORM_WARNING: f64 = 1e-6;

/// Tolerance on Σ|A_n|² for a packet built with [`WavePacket::new`].
pub const PACKET_NORM_TOLERANCE: f64 = 1e-12;

/// Averaged density matrices are dense, so they are limited to this many neurons.
pub const MAX_DENSITY_QUBITS: usize = 12;

/// Node budget for [`averaged_density_direct`], which visits the full product grid.
pub const DIRECT_NODE_LIMIT: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeIndex(pub [i32; 4]);

impl ModeIndex {
    pub const ZERO: ModeIndex = ModeIndex([0; 4]);

    /// Largest `|n_k|`.
    pub fn max_abs(&self) -> u32 {
        self.0.iter().map(|n| n.unsigned_abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// `λ_n = n0² + n1² + n2² + n3²`.
pub fn energy(n: &ModeIndex) -> i64 {
    n.0.iter().map(|&k| i64::from(k) * i64::from(k)).sum()
}

fn eigenfunction_at(n: &ModeIndex, angles: &[f64; 4]) -> Complex64 {
    let phase: f64 = n.0.iter().zip(angles).map(|(&k, a)| f64::from(k) * a).sum();
    Complex64::from_polar(EIGENFUNCTION_SCALE, phase)
}

/// `Ψ_n(φ) = exp(i n·φ) / (4π²)`.
pub fn eigenfunction(n: &ModeIndex, phi: &GateParams) -> Complex64 {
    eigenfunction_at(n, &phi.angles())
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    modes: BTreeMap<ModeIndex, Complex64>,
    n_max: u32,
}

impl WavePacket {
    /// Requires Σ|A_n|² = 1 within [`PACKET_NORM_TOLERANCE`] and every mode
    /// inside the truncation `|n_k| ≤ n_max`.
    pub fn new(coefficients: impl IntoIterator<Item = (ModeIndex, Complex64)>, n_max: u32) -> Result<Self> {
        let packet = Self::collect(coefficients, n_max)?;
        let norm = packet.norm_sqr();
        if (norm - 1.0).abs() > PACKET_NORM_TOLERANCE {
            return Err(Error::config(format!("packet is not normalized: Σ|A|² = {norm}")));
        }
        Ok(packet)
    }

    /// Rescales the coefficients to unit norm. Also returns the original Σ|A_n|².
    pub fn normalized(
        coefficients: impl IntoIterator<Item = (ModeIndex, Complex64)>,
        n_max: u32,
    ) -> Result<(Self, f64)> {
        let mut packet = Self::collect(coefficients, n_max)?;
        let norm = packet.norm_sqr();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::config(format!("packet norm {norm} cannot be normalized")));
        }
        let scale = norm.sqrt().recip();
        packet.modes.values_mut().for_each(|a| *a *= scale);
        Ok((packet, norm))
    }

    fn collect(coefficients: impl IntoIterator<Item = (ModeIndex, Complex64)>, n_max: u32) -> Result<Self> {
        let mut modes = BTreeMap::new();
        for (n, a) in coefficients {
            if n.max_abs() > n_max {
                return Err(Error::config(format!("mode {n} exceeds the truncation N_max = {n_max}")));
            }
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::config(format!("coefficient of mode {n} is not finite")));
            }
            if modes.insert(n, a).is_some() {
                return Err(Error::config(format!("mode {n} given twice")));
            }
        }
        if modes.is_empty() {
            return Err(Error::config("packet has no modes"));
        }
        Ok(Self { modes, n_max })
    }

    pub fn single_mode(n: ModeIndex) -> Self {
        Self {
            modes: BTreeMap::from([(n, Complex64::new(1.0, 0.0))]),
            n_max: n.max_abs(),
        }
    }

    /// The constant packet `A_0 = 1`.
    pub fn uniform() -> Self {
        Self::single_mode(ModeIndex::ZERO)
    }

    /// Random coefficients on every mode of the cube `|n_k| ≤ n_max`.
    pub fn random<R: Rng + ?Sized>(n_max: u32, rng: &mut R) -> Self {
        let r = n_max as i32;
        let mut coefficients = Vec::new();
        for a in -r..=r {
            for b in -r..=r {
                for c in -r..=r {
                    for d in -r..=r {
                        let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                        coefficients.push((ModeIndex([a, b, c, d]), z));
                    }
                }
            }
        }
        Self::normalized(coefficients, n_max).expect("random packet has positive norm").0
    }

    /// Reads `n0 n1 n2 n3 re im` lines (`#` comments allowed) and renormalizes.
    /// The second value is a warning when the input norm was off by more than
    /// [`PACKET_NORM_WARNING`]. Without `n_max` the truncation is taken from the data.
    pub fn parse(text: &str, n_max: Option<u32>) -> Result<(Self, Option<String>)> {
        let mut coefficients = Vec::new();
        let mut seen = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 6 {
                return Err(Error::parse(
                    line_no,
                    format!("expected `n0 n1 n2 n3 re im`, got {} fields", fields.len()),
                ));
            }
            let mut n = [0i32; 4];
            for (slot, field) in n.iter_mut().zip(&fields[..4]) {
                *slot = field
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("mode index {field:?} is not an integer")))?;
            }
            let parse_real = |field: &str| {
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(line_no, format!("coefficient {field:?} is not a finite number")))
            };
            let a = Complex64::new(parse_real(fields[4])?, parse_real(fields[5])?);
            let mode = ModeIndex(n);
            if let Some(bound) = n_max {
                if mode.max_abs() > bound {
                    return Err(Error::parse(line_no, format!("mode {mode} exceeds N_max = {bound}")));
                }
            }
            if let Some(prev) = seen.insert(mode, line_no) {
                return Err(Error::parse(line_no, format!("mode {mode} already given on line {prev}")));
            }
            coefficients.push((mode, a));
        }
        let bound = n_max.unwrap_or_else(|| coefficients.iter().map(|(n, _)| n.max_abs()).max().unwrap_or(0));
        let (packet, norm) =
            Self::normalized(coefficients, bound).map_err(|e| Error::parse(text.lines().count().max(1), e.to_string()))?;
        let warning = ((norm - 1.0).abs() > PACKET_NORM_WARNING)
            .then(|| format!("packet norm Σ|A|² = {norm} renormalized to 1"));
        Ok((packet, warning))
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (ModeIndex, Complex64)> + '_ {
        self.modes.iter().map(|(n, a)| (*n, *a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.modes.values().map(|a| a.norm_sqr()).sum()
    }

    /// `A_n e^{−iλ_n t}`.
    pub fn evolved_coefficients(&self, t: f64) -> Vec<(ModeIndex, Complex64)> {
        self.modes
            .iter()
            .map(|(n, a)| (*n, a * Complex64::from_polar(1.0, -(energy(n) as f64) * t)))
            .collect()
    }

    /// `Ψ(φ, t)` on every node of `grid`, last axis fastest.
    pub fn on_grid(&self, t: f64, grid: &QuadratureGrid) -> Vec<Complex64> {
        let r = self.n_max as i32;
        let width = (2 * r + 1) as usize;
        // Dense coefficient cube, then one axis contracted at a time.
        let mut data = vec![Complex64::new(0.0, 0.0); width.pow(4)];
        for (n, a) in self.evolved_coefficients(t) {
            let [i0, i1, i2, i3] = n.0.map(|k| (k + r) as usize);
            data[((i0 * width + i1) * width + i2) * width + i3] = a * EIGENFUNCTION_SCALE;
        }
        let mut dims = [width; 4];
        for axis in (0..4).rev() {
            let nodes = grid.axis_nodes(axis);
            let table: Vec<Complex64> = (-r..=r)
                .flat_map(|k| nodes.iter().map(move |x| Complex64::from_polar(1.0, f64::from(k) * x)))
                .collect();
            data = contract_axis(&data, dims, axis, &table, nodes.len());
            dims[axis] = nodes.len();
        }
        data
    }
}

/// Replaces axis `axis` (length `L`) of a row-major 4-D array by `G` points
/// using `table[l * G + g]`.
fn contract_axis(data: &[Complex64], dims: [usize; 4], axis: usize, table: &[Complex64], g: usize) -> Vec<Complex64> {
    let l = dims[axis];
    let outer: usize = dims[..axis].iter().product();
    let inner: usize = dims[axis + 1..].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); outer * g * inner];
    for o in 0..outer {
        for k in 0..l {
            let src = &data[(o * l + k) * inner..][..inner];
            if src.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                continue;
            }
            for j in 0..g {
                let e = table[k * g + j];
                let dst = &mut out[(o * g + j) * inner..][..inner];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += e * s;
                }
            }
        }
    }
    out
}

/// `Ψ(φ, t) = Σ_n A_n Ψ_n(φ) e^{−iλ_n t}`.
pub fn evaluate_packet(packet: &WavePacket, phi: &GateParams, t: f64) -> Complex64 {
    let angles = phi.angles();
    packet
        .evolved_coefficients(t)
        .into_iter()
        .map(|(n, a)| a * eigenfunction_at(&n, &angles))
        .sum()
}

/// Quadrature weight times `|Ψ(φ, t)|²` at every grid node.
fn node_weights(packet: &WavePacket, t: f64, grid: &QuadratureGrid) -> Vec<f64> {
    packet
        .on_grid(t, grid)
        .iter()
        .enumerate()
        .map(|(flat, psi)| psi.norm_sqr() * grid.weight(grid.unravel(flat)))
        .collect()
}

/// `∫ |Ψ(φ, t)|² d⁴φ` on the grid; 1 for a normalized packet.
pub fn packet_probability(packet: &WavePacket, t: f64, grid: &QuadratureGrid) -> f64 {
    node_weights(packet, t, grid).iter().sum()
}

/// `∫ |Ψ(φ,t)|² |ψ_φ⟩⟨ψ_φ|` for one input neuron, as a row-major 2×2 block.
fn input_block(packet: &WavePacket, t: f64, grid: &QuadratureGrid) -> [Complex64; 4] {
    let weights = node_weights(packet, t, grid);
    let [s0, s1, s2, s3] = grid.shape();
    let slab = s1 * s2 * s3;
    // Per-slab partial sums, reduced in index order so the result is reproducible.
    let partials: Vec<[Complex64; 4]> = (0..s0)
        .into_par_iter()
        .map(|i0| {
            let mut acc = [Complex64::new(0.0, 0.0); 4];
            for local in 0..slab {
                let flat = i0 * slab + local;
                let w = weights[flat];
                if w == 0.0 {
                    continue;
                }
                let [p0, p1, p2, p3] = grid.node(grid.unravel(flat));
                let (s, c) = (p3 / 4.0).sin_cos();
                let psi0 = Complex64::from_polar(c, p0 + p1);
                let psi1 = -Complex64::from_polar(s, p0 - p2);
                acc[0] += w * psi0 * psi0.conj();
                acc[1] += w * psi0 * psi1.conj();
                acc[2] += w * psi1 * psi0.conj();
                acc[3] += w * psi1 * psi1.conj();
            }
            acc
        })
        .collect();
    partials.into_iter().fold([Complex64::new(0.0, 0.0); 4], |mut total, p| {
        for (t, x) in total.iter_mut().zip(p) {
            *t += x;
        }
        total
    })
}

fn check_environment(net: &NetworkSpec, packets: &[WavePacket], input_neurons: &[usize]) -> Result<()> {
    if packets.len() != input_neurons.len() {
        return Err(Error::config(format!(
            "{} packets for {} input neurons",
            packets.len(),
            input_neurons.len()
        )));
    }
    check_inputs(net, input_neurons)?;
    if net.n_neurons() > MAX_DENSITY_QUBITS {
        return Err(Error::config(format!(
            "averaged density matrix limited to {MAX_DENSITY_QUBITS} neurons, network has {}",
            net.n_neurons()
        )));
    }
    Ok(())
}

fn finish(mut rho: DMatrix<Complex64>) -> Result<DensityMatrix> {
    let tr = rho.trace().re;
    if !(tr > 0.0 && tr.is_finite()) {
        return Err(Error::config(format!("averaged density matrix has trace {tr}")));
    }
    rho /= Complex64::new(tr, 0.0);
    DensityMatrix::from_matrix_unchecked(rho)
}

/// The network state averaged over the environment at time `t`, with one
/// packet per input neuron.
///
/// The gates of `N_φ` after the input layer do not depend on φ, and the
/// packets are independent, so the average factorizes: each input neuron's
/// block `∫|Ψ_k|²|ψ_φ⟩⟨ψ_φ|` is integrated on its own and the steps are then
/// applied to the product state by conjugation.
pub fn averaged_density(
    net: &NetworkSpec,
    packets: &[WavePacket],
    input_neurons: &[usize],
    t: f64,
    grid: &QuadratureGrid,
) -> Result<DensityMatrix> {
    check_environment(net, packets, input_neurons)?;
    let n = net.n_neurons();
    let dim = 1usize << n;

    let mut blocks: Vec<Option<[Complex64; 4]>> = vec![None; n];
    for (packet, &q) in packets.iter().zip(input_neurons) {
        blocks[q] = Some(input_block(packet, t, grid));
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut rho = DMatrix::<Complex64>::from_fn(dim, dim, |i, j| {
        (0..n).fold(one, |acc, q| {
            let shift = n - 1 - q;
            let (bi, bj) = (i >> shift & 1, j >> shift & 1);
            match &blocks[q] {
                Some(b) => acc * b[bi * 2 + bj],
                None if bi == 0 && bj == 0 => acc,
                None => zero,
            }
        })
    });

    // ρ → W ρ W†, one column at a time, twice through the adjoint.
    for _ in 0..2 {
        for mut col in rho.column_iter_mut() {
            let mut buf: Vec<Complex64> = col.iter().copied().collect();
            net.apply_steps_in_place(&mut buf);
            col.copy_from_slice(&buf);
        }
        rho = rho.adjoint();
    }
    finish(rho)
}

/// The same average computed literally: one history per node of the product
/// grid over all input neurons. Cost grows as `grid.len()^inputs`.
pub fn averaged_density_direct(
    net: &NetworkSpec,
    packets: &[WavePacket],
    input_neurons: &[usize],
    t: f64,
    grid: &QuadratureGrid,
) -> Result<DensityMatrix> {
    check_environment(net, packets, input_neurons)?;
    let nodes = grid.len();
    let total = (0..packets.len()).try_fold(1usize, |acc, _| acc.checked_mul(nodes));
    if total.is_none_or(|t| t > DIRECT_NODE_LIMIT) {
        return Err(Error::config(format!(
            "direct average over {} inputs exceeds {DIRECT_NODE_LIMIT} nodes",
            packets.len()
        )));
    }
    let total = total.unwrap_or(0);
    let weights: Vec<Vec<f64>> = packets.iter().map(|p| node_weights(p, t, grid)).collect();
    let dim = 1usize << net.n_neurons();
    let chunk = nodes.max(1);

    let partials: Vec<Result<DMatrix<Complex64>>> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
            for combo in c * chunk..((c + 1) * chunk).min(total) {
                let mut rest = combo;
                let mut w = 1.0;
                let mut phis = Vec::with_capacity(packets.len());
                for k in (0..packets.len()).rev() {
                    let flat = rest % nodes;
                    rest /= nodes;
                    w *= weights[k][flat];
                    phis.push(GateParams::from_array(grid.node(grid.unravel(flat)))?);
                }
                if w == 0.0 {
                    continue;
                }
                phis.reverse();
                let state: StateVector = run_history(net, &phis, input_neurons)?;
                let v = nalgebra::DVector::from_column_slice(state.amplitudes());
                acc += (&v * v.adjoint()) * Complex64::new(w, 0.0);
            }
            Ok(acc)
        })
        .collect();
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for p in partials {
        rho += p?;
    }
    finish(rho)
}

/// `trace(ρ²)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}
