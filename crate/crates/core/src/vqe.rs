//! Statevector simulation of the layered RY/RZ + circular-CNOT ansatz and a
//! deterministic gradient optimizer for diagonal Hamiltonians.
//!
//! Qubit `q` is bit `q` of the basis-state index (little-endian).

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::distributions::{Distribution, Uniform, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintsMatrix;
use crate::error::{invalid, Error, Result};
use crate::hamiltonian::{build_hamiltonian, energy_table, reduce_gram, MAX_QUBITS};
use crate::lattice::GramMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `qubits` qubits.
    pub fn zero(qubits: usize) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::ResourceLimit {
                required: qubits,
                limit: MAX_QUBITS,
            });
        }
        let mut amplitudes = vec![ZERO; 1 << qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { qubits, amplitudes })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() || len > 1 << MAX_QUBITS {
            return invalid(format!("amplitude count {len} is not 2^n for 1 ≤ n ≤ {MAX_QUBITS}"));
        }
        Ok(StateVector {
            qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }

    /// Basis state of largest probability, smallest index on ties.
    pub fn most_probable(&self) -> usize {
        let mut best = 0;
        let mut best_p = -1.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p > best_p {
                best = i;
                best_p = p;
            }
        }
        best
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply(&mut self, gate: Gate) -> Result<()> {
        let n = self.qubits;
        match gate {
            Gate::Ry(_, q) | Gate::Rz(_, q) if q >= n => {
                invalid(format!("qubit {q} out of range for {n} qubits"))
            }
            Gate::Cnot(c, t) if c >= n || t >= n || c == t => {
                invalid(format!("invalid CNOT({c}, {t}) on {n} qubits"))
            }
            Gate::Ry(theta, q) => {
                apply_1q(&mut self.amplitudes, q, ry_matrix(theta));
                Ok(())
            }
            Gate::Rz(theta, q) => {
                apply_1q(&mut self.amplitudes, q, rz_matrix(theta));
                Ok(())
            }
            Gate::Cnot(c, t) => {
                apply_cnot(&mut self.amplitudes, c, t);
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// `RY(θ) = exp(-iθY/2)` on a qubit.
    Ry(f64, usize),
    /// `RZ(θ) = exp(-iθZ/2)` on a qubit.
    Rz(f64, usize),
    /// Control, target.
    Cnot(usize, usize),
}

type Mat2 = [[Complex64; 2]; 2];

fn ry_matrix(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

fn rz_matrix(theta: f64) -> Mat2 {
    [
        [Complex64::from_polar(1.0, -theta / 2.0), ZERO],
        [ZERO, Complex64::from_polar(1.0, theta / 2.0)],
    ]
}

fn mat_mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn adjoint2(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

#[inline]
fn apply_1q(amps: &mut [Complex64], q: usize, m: Mat2) {
    let stride = 1usize << q;
    for block in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a0, *a1);
            *a0 = m[0][0] * x + m[0][1] * y;
            *a1 = m[1][0] * x + m[1][1] * y;
        }
    }
}

#[inline]
fn apply_cnot(amps: &mut [Complex64], c: usize, t: usize) {
    let (cb, tb) = (1usize << c, 1usize << t);
    for i in 0..amps.len() {
        if i & cb != 0 && i & tb == 0 {
            amps.swap(i, i | tb);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub qubits: usize,
    pub layers: usize,
}

impl AnsatzSpec {
    pub const DEFAULT_LAYERS: usize = 3;

    pub fn new(qubits: usize, layers: usize) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::ResourceLimit {
                required: qubits,
                limit: MAX_QUBITS,
            });
        }
        if layers == 0 {
            return invalid("ansatz needs at least one layer");
        }
        Ok(AnsatzSpec { qubits, layers })
    }

    pub fn parameter_count(&self) -> usize {
        2 * self.qubits * self.layers
    }

    /// Index of the RY (`rz = false`) or RZ angle on qubit `q` in layer `l`.
    pub fn parameter_index(&self, layer: usize, qubit: usize, rz: bool) -> usize {
        (layer * self.qubits + qubit) * 2 + usize::from(rz)
    }

    fn cnots(&self) -> Vec<(usize, usize)> {
        let n = self.qubits;
        if n == 1 {
            return Vec::new();
        }
        (0..n).map(|q| (q, (q + 1) % n)).collect()
    }

    /// Gate sequence for `params`, in application order.
    pub fn gates(&self, params: &[f64]) -> Result<Vec<Gate>> {
        self.check_params(params)?;
        let mut out = Vec::with_capacity(self.parameter_count() + self.layers * self.qubits);
        for l in 0..self.layers {
            for q in 0..self.qubits {
                out.push(Gate::Ry(params[self.parameter_index(l, q, false)], q));
                out.push(Gate::Rz(params[self.parameter_index(l, q, true)], q));
            }
            out.extend(self.cnots().into_iter().map(|(c, t)| Gate::Cnot(c, t)));
        }
        Ok(out)
    }

    /// Number of gates on the longest path through the circuit, counting each
    /// gate once on every qubit it touches.
    pub fn circuit_depth(&self) -> usize {
        let mut level = vec![0usize; self.qubits];
        for _ in 0..self.layers {
            for l in level.iter_mut() {
                *l += 2;
            }
            for (c, t) in self.cnots() {
                let d = level[c].max(level[t]) + 1;
                level[c] = d;
                level[t] = d;
            }
        }
        level.into_iter().max().unwrap_or(0)
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.parameter_count() {
            return invalid(format!(
                "ansatz takes {} parameters, got {}",
                self.parameter_count(),
                params.len()
            ));
        }
        Ok(())
    }
}

/// The ansatz state `U(θ)|0…0⟩`.
pub fn run_circuit(spec: &AnsatzSpec, params: &[f64]) -> Result<StateVector> {
    spec.check_params(params)?;
    let mut state = StateVector::zero(spec.qubits)?;
    forward(spec, &mut Ladder::new(spec), params, &mut state.amplitudes);
    Ok(state)
}

fn layer_gate(spec: &AnsatzSpec, params: &[f64], l: usize, q: usize) -> Mat2 {
    let ry = ry_matrix(params[spec.parameter_index(l, q, false)]);
    let rz = rz_matrix(params[spec.parameter_index(l, q, true)]);
    mat_mul2(&rz, &ry)
}

/// The CNOT ladder of a layer as one basis permutation, `|i⟩ -> |perm[i]⟩`.
struct Ladder {
    perm: Vec<u32>,
    scratch: Vec<Complex64>,
}

impl Ladder {
    fn new(spec: &AnsatzSpec) -> Self {
        let cnots = spec.cnots();
        let perm = if cnots.is_empty() {
            Vec::new()
        } else {
            (0..1u32 << spec.qubits)
                .map(|i| {
                    cnots.iter().fold(i, |b, &(c, t)| {
                        if b >> c & 1 == 1 {
                            b ^ (1 << t)
                        } else {
                            b
                        }
                    })
                })
                .collect()
        };
        let scratch = vec![ZERO; perm.len()];
        Ladder { perm, scratch }
    }

    fn apply(&mut self, amps: &mut Vec<Complex64>) {
        if self.perm.is_empty() {
            return;
        }
        for (&p, &a) in self.perm.iter().zip(amps.iter()) {
            self.scratch[p as usize] = a;
        }
        std::mem::swap(amps, &mut self.scratch);
    }

    fn undo(&mut self, amps: &mut Vec<Complex64>) {
        if self.perm.is_empty() {
            return;
        }
        for (s, &p) in self.scratch.iter_mut().zip(&self.perm) {
            *s = amps[p as usize];
        }
        std::mem::swap(amps, &mut self.scratch);
    }
}

fn forward(spec: &AnsatzSpec, ladder: &mut Ladder, params: &[f64], amps: &mut Vec<Complex64>) {
    for l in 0..spec.layers {
        for q in 0..spec.qubits {
            apply_1q(amps, q, layer_gate(spec, params, l, q));
        }
        ladder.apply(amps);
    }
}

/// `Σ_b |ψ_b|² table[b]`.
pub fn expectation(state: &StateVector, table: &[f64]) -> Result<f64> {
    if table.len() != state.amplitudes.len() {
        return invalid(format!(
            "energy table has {} entries, state has {}",
            table.len(),
            state.amplitudes.len()
        ));
    }
    Ok(expectation_unchecked(&state.amplitudes, table))
}

fn expectation_unchecked(amps: &[Complex64], table: &[f64]) -> f64 {
    amps.iter().zip(table).map(|(a, e)| a.norm_sqr() * e).sum()
}

fn check_table(spec: &AnsatzSpec, table: &[f64]) -> Result<()> {
    if table.len() != 1usize << spec.qubits {
        return invalid(format!(
            "energy table has {} entries, ansatz has {} qubits",
            table.len(),
            spec.qubits
        ));
    }
    Ok(())
}

/// Expectation and its exact gradient by reverse-mode (adjoint) differentiation.
pub fn expectation_and_gradient(
    spec: &AnsatzSpec,
    params: &[f64],
    table: &[f64],
) -> Result<(f64, Vec<f64>)> {
    spec.check_params(params)?;
    check_table(spec, table)?;
    let mut ladder = Ladder::new(spec);
    let mut psi = StateVector::zero(spec.qubits)?.amplitudes;
    forward(spec, &mut ladder, params, &mut psi);
    Ok(adjoint_gradient(spec, &mut ladder, params, table, psi))
}

/// Gradient of `⟨ψ|H|ψ⟩` given the final state `psi` of `params`.
///
/// Walks the circuit backwards carrying `ψ_k` and `λ_k = U_{>k}† H ψ`; for a
/// rotation `exp(-iθP/2)` the derivative is `Im⟨λ_k|P|ψ_k⟩` taken right after
/// the gate. RY and RZ on the same qubit are handled in one pass.
fn adjoint_gradient(
    spec: &AnsatzSpec,
    ladder: &mut Ladder,
    params: &[f64],
    table: &[f64],
    mut psi: Vec<Complex64>,
) -> (f64, Vec<f64>) {
    let value = expectation_unchecked(&psi, table);
    let mut lambda: Vec<Complex64> = psi.iter().zip(table).map(|(a, e)| a * e).collect();
    let mut grad = vec![0.0; spec.parameter_count()];
    for l in (0..spec.layers).rev() {
        ladder.undo(&mut psi);
        ladder.undo(&mut lambda);
        for q in (0..spec.qubits).rev() {
            let ry = params[spec.parameter_index(l, q, false)];
            let rz = params[spec.parameter_index(l, q, true)];
            let (gz, gy) = fused_backward(&mut psi, &mut lambda, q, ry, rz);
            grad[spec.parameter_index(l, q, false)] = gy;
            grad[spec.parameter_index(l, q, true)] = gz;
        }
    }
    (value, grad)
}

/// Undoes `RZ(rz)·RY(ry)` on qubit `q` of both vectors and returns the
/// `(RZ, RY)` derivatives.
fn fused_backward(
    psi: &mut [Complex64],
    lambda: &mut [Complex64],
    q: usize,
    ry: f64,
    rz: f64,
) -> (f64, f64) {
    let undo_z = adjoint2(&rz_matrix(rz));
    let undo_y = adjoint2(&ry_matrix(ry));
    let stride = 1usize << q;
    let mut gz = ZERO;
    let mut gy = ZERO;
    for (pb, lb) in psi
        .chunks_exact_mut(stride << 1)
        .zip(lambda.chunks_exact_mut(stride << 1))
    {
        let (p0s, p1s) = pb.split_at_mut(stride);
        let (l0s, l1s) = lb.split_at_mut(stride);
        for i in 0..stride {
            let (p0, p1, l0, l1) = (p0s[i], p1s[i], l0s[i], l1s[i]);
            // ⟨λ|Z|ψ⟩ after RZ
            gz += l0.conj() * p0 - l1.conj() * p1;
            let (p0, p1) = (undo_z[0][0] * p0, undo_z[1][1] * p1);
            let (l0, l1) = (undo_z[0][0] * l0, undo_z[1][1] * l1);
            // ⟨λ|Y|ψ⟩ after RY, Y = [[0, -i], [i, 0]]
            gy += l0.conj() * Complex64::new(p1.im, -p1.re) + l1.conj() * Complex64::new(-p0.im, p0.re);
            p0s[i] = undo_y[0][0] * p0 + undo_y[0][1] * p1;
            p1s[i] = undo_y[1][0] * p0 + undo_y[1][1] * p1;
            l0s[i] = undo_y[0][0] * l0 + undo_y[0][1] * l1;
            l1s[i] = undo_y[1][0] * l0 + undo_y[1][1] * l1;
        }
    }
    (gz.im, gy.im)
}

/// Gradient by the two-term parameter-shift rule; slow reference for tests.
pub fn parameter_shift_gradient(spec: &AnsatzSpec, params: &[f64], table: &[f64]) -> Result<Vec<f64>> {
    check_table(spec, table)?;
    let mut shifted = params.to_vec();
    let mut grad = Vec::with_capacity(params.len());
    for i in 0..params.len() {
        shifted[i] = params[i] + PI / 2.0;
        let plus = expectation(&run_circuit(spec, &shifted)?, table)?;
        shifted[i] = params[i] - PI / 2.0;
        let minus = expectation(&run_circuit(spec, &shifted)?, table)?;
        shifted[i] = params[i];
        grad.push((plus - minus) / 2.0);
    }
    Ok(grad)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Initial step in radians along the gradient scaled to unit max-norm.
    pub step: f64,
    /// Step at iteration `t` is `step / (1 + decay·t)`.
    pub decay: f64,
    /// Seeded measurement shots for picking the output state; `None` takes
    /// the most probable basis state.
    pub shots: Option<usize>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            step: 1.0,
            decay: 0.01,
            shots: None,
        }
    }
}

pub const DEFAULT_BUDGET: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    /// Output basis state, qubit 0 first.
    pub best_bits: String,
    pub best_state: usize,
    /// Register values of the output state (`m` for reduced runs).
    pub decoded: Vec<i64>,
    /// Lattice coefficients `n` (equal to `decoded` for full runs).
    pub lattice_vector: Vec<i64>,
    pub energy: f64,
    pub initial_expectation: f64,
    pub final_expectation: f64,
    pub expectation_trace: Vec<f64>,
    pub qubits_used: usize,
    pub seed: u64,
    pub parameters: Vec<f64>,
}

/// Gradient descent on `⟨ψ(θ)|H|ψ(θ)⟩` with a decaying step and a trust
/// factor that halves on rejected steps, so the expectation never increases.
/// Runs `budget` iterations; `expectation_trace[t]` is the expectation held
/// after iteration `t`.
pub fn optimize(
    table: &[f64],
    spec: &AnsatzSpec,
    seed: u64,
    budget: usize,
    config: &OptimizerConfig,
) -> Result<VqeResult> {
    check_table(spec, table)?;
    if budget == 0 {
        return invalid("iteration budget must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angle = Uniform::new(0.0, 2.0 * PI);
    let mut params: Vec<f64> = (0..spec.parameter_count())
        .map(|_| angle.sample(&mut rng))
        .collect();

    let mut ladder = Ladder::new(spec);
    let run = |p: &[f64], ladder: &mut Ladder| {
        let mut amps = StateVector::zero(spec.qubits).expect("checked").amplitudes;
        forward(spec, ladder, p, &mut amps);
        amps
    };
    let mut psi = run(&params, &mut ladder);
    let (mut value, mut grad) = adjoint_gradient(spec, &mut ladder, &params, table, psi.clone());
    let initial = value;
    let mut trust = 1.0f64;
    let mut trace = Vec::with_capacity(budget);
    let mut candidate = params.clone();
    for t in 0..budget {
        let scale = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if scale == 0.0 {
            trace.push(value);
            continue;
        }
        let step = trust * config.step / (1.0 + config.decay * t as f64) / scale;
        for ((c, p), g) in candidate.iter_mut().zip(&params).zip(&grad) {
            *c = p - step * g;
        }
        let next = run(&candidate, &mut ladder);
        let next_value = expectation_unchecked(&next, table);
        if next_value <= value {
            std::mem::swap(&mut params, &mut candidate);
            psi = next;
            let (v, g) = adjoint_gradient(spec, &mut ladder, &params, table, psi.clone());
            value = v;
            grad = g;
            trust = (trust * 2.0).min(1.0);
        } else {
            trust *= 0.5;
        }
        trace.push(value);
    }

    let state = StateVector {
        qubits: spec.qubits,
        amplitudes: psi,
    };
    let best_state = match config.shots {
        None => state.most_probable(),
        Some(shots) => sample_mode(&state, shots, seed)?,
    };
    let bits: String = (0..spec.qubits)
        .map(|q| if best_state >> q & 1 == 1 { '1' } else { '0' })
        .collect();
    Ok(VqeResult {
        best_bits: bits,
        best_state,
        decoded: Vec::new(),
        lattice_vector: Vec::new(),
        energy: table[best_state],
        initial_expectation: initial,
        final_expectation: value,
        expectation_trace: trace,
        qubits_used: spec.qubits,
        seed,
        parameters: params,
    })
}

/// Most frequent outcome of `shots` seeded measurements, smallest index on ties.
fn sample_mode(state: &StateVector, shots: usize, seed: u64) -> Result<usize> {
    if shots == 0 {
        return invalid("shot count must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let dist = WeightedIndex::new(state.probabilities())
        .map_err(|e| Error::InvalidArgument(format!("cannot sample state: {e}")))?;
    let mut counts = std::collections::BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(dist.sample(&mut rng)).or_insert(0usize) += 1;
    }
    let max = counts.values().copied().max().unwrap_or(0);
    Ok(counts
        .into_iter()
        .find(|&(_, c)| c == max)
        .map_or(0, |(b, _)| b))
}

/// Full (`a = None`, one register per basis vector) or reduced (one register
/// per column of `a`) variational search with penalty `G₀₀` on the zero state.
pub fn run_vqe(
    gram: &GramMatrix,
    a: Option<&ConstraintsMatrix>,
    k: usize,
    seed: u64,
    budget: usize,
    config: &OptimizerConfig,
) -> Result<VqeResult> {
    run_vqe_with_penalty(gram, a, k, seed, budget, config, gram.get(0, 0))
}

pub fn run_vqe_with_penalty(
    gram: &GramMatrix,
    a: Option<&ConstraintsMatrix>,
    k: usize,
    seed: u64,
    budget: usize,
    config: &OptimizerConfig,
    penalty: f64,
) -> Result<VqeResult> {
    let reduced = a.map(|a| reduce_gram(gram, a)).transpose()?;
    let form = reduced.as_ref().map_or(gram, |r| &r.form);
    let h = build_hamiltonian(form, k, penalty)?;
    let table = energy_table(&h)?;
    let spec = AnsatzSpec::new(h.layout.total_qubits(), AnsatzSpec::DEFAULT_LAYERS)?;
    let mut result = optimize(&table, &spec, seed, budget, config)?;
    result.decoded = h.layout.decode(result.best_state);
    result.lattice_vector = match &reduced {
        Some(r) => r.lift(&result.decoded)?,
        None => result.decoded.clone(),
    };
    Ok(result)
}
