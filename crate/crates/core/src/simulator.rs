//! Dense statevector simulation: gate application, Born-rule measurement,
//! partial trace, and the reduced-state checks behind the erasure argument.
//!
//! Qubit k is bit k of the amplitude index (qubit 0 is least significant),
//! matching the canonical edge order, so circuit goldens and state dumps are
//! reproducible across platforms. Registers are capped at 24 qubits; the
//! edge code at Ñ=6 needs 15, and larger instances are covered by algebraic
//! checks instead of statevector runs.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuits::{Circuit, CircuitError, Gate};
use crate::code::{CodeError, PauliOperator, StabilizerCode};
use crate::gf2::BitVector;

/// Hard cap on register width; 2^24 amplitudes is the largest register the
/// dense representation is allowed to allocate.
pub const MAX_QUBITS: usize = 24;

const NORM_TOL: f64 = 1e-9;

/// Errors from simulation and reduced-state analysis.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("{n} qubits exceeds the dense-statevector cap of {MAX_QUBITS}")]
    TooManyQubits { n: usize },
    #[error("amplitude count {len} is not a power of two")]
    BadAmplitudeCount { len: usize },
    #[error("state norm {norm} is not 1 within tolerance")]
    NotNormalized { norm: f64 },
    #[error("operand sizes differ: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("kept qubit {q} out of range for {n} qubits")]
    KeepOutOfRange { q: usize, n: usize },
    #[error("kept qubits must be strictly ascending")]
    KeepNotAscending,
    #[error("keeping {kept} qubits exceeds the dense reduced-state cap of 10")]
    KeepTooLarge { kept: usize },
    #[error("density matrix invalid: {detail}")]
    InvalidDensity { detail: String },
    #[error("state dump malformed: {detail}")]
    DumpFormat { detail: String },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn mask_u64(v: &BitVector) -> u64 {
    debug_assert!(v.len() <= 64);
    let mut mask = 0u64;
    for pos in v.support() {
        mask |= 1 << pos;
    }
    mask
}

/// Pure state over n qubits as a dense amplitude array.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// Outcomes and Born probabilities of the measurements a circuit performed,
/// indexed by classical bit. Outcomes are ±1 eigenvalues; classical bit
/// value 1 corresponds to eigenvalue −1.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    outcomes: Vec<Option<i8>>,
    probabilities: Vec<Option<f64>>,
    rng_seed: u64,
}

impl MeasurementRecord {
    fn new(n_cbits: usize, rng_seed: u64) -> Self {
        MeasurementRecord {
            outcomes: vec![None; n_cbits],
            probabilities: vec![None; n_cbits],
            rng_seed,
        }
    }

    /// The ±1 eigenvalue stored in classical bit k, if written.
    pub fn outcome(&self, k: usize) -> Option<i8> {
        self.outcomes.get(k).copied().flatten()
    }

    /// Classical bit value: eigenvalue +1 → 0, eigenvalue −1 → 1.
    pub fn bit(&self, k: usize) -> Option<u8> {
        self.outcome(k).map(|s| if s == 1 { 0 } else { 1 })
    }

    /// Born probability of the outcome that was actually recorded in bit k.
    pub fn probability(&self, k: usize) -> Option<f64> {
        self.probabilities.get(k).copied().flatten()
    }

    pub fn n_cbits(&self) -> usize {
        self.outcomes.len()
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    /// All written classical bits in index order.
    pub fn bits(&self) -> Vec<u8> {
        (0..self.outcomes.len()).filter_map(|k| self.bit(k)).collect()
    }
}

impl StateVector {
    /// |0…0⟩ on n qubits.
    pub fn zero_state(n_qubits: usize) -> Result<Self, SimError> {
        if n_qubits > MAX_QUBITS {
            return Err(SimError::TooManyQubits { n: n_qubits });
        }
        let mut amps = vec![Complex64::ZERO; 1 << n_qubits];
        amps[0] = Complex64::ONE;
        Ok(StateVector { n_qubits, amps })
    }

    /// Builds a state from raw amplitudes; the length must be a power of
    /// two and the norm must already be 1 within 1e−9.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(SimError::BadAmplitudeCount { len });
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(SimError::TooManyQubits { n: n_qubits });
        }
        let state = StateVector { n_qubits, amps };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(SimError::NotNormalized { norm });
        }
        Ok(state)
    }

    /// α|0⟩ + β|1⟩ on a single qubit.
    pub fn single_qubit(alpha: Complex64, beta: Complex64) -> Result<Self, SimError> {
        Self::from_amplitudes(vec![alpha, beta])
    }

    /// α|0…0⟩ + β|0…01⟩: the logical input sitting on qubit 0 of an
    /// otherwise blank register, the encoder's expected input layout.
    pub fn with_input_qubit(
        n_qubits: usize,
        alpha: Complex64,
        beta: Complex64,
    ) -> Result<Self, SimError> {
        let mut state = Self::zero_state(n_qubits)?;
        state.amps[0] = alpha;
        state.amps[1] = beta;
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(SimError::NotNormalized { norm });
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_qubit(&self, q: usize) -> Result<(), SimError> {
        if q >= self.n_qubits {
            return Err(SimError::KeepOutOfRange {
                q,
                n: self.n_qubits,
            });
        }
        Ok(())
    }

    pub fn apply_h(&mut self, q: usize) -> Result<(), SimError> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        for b in 0..self.amps.len() {
            if b & bit == 0 {
                let a0 = self.amps[b];
                let a1 = self.amps[b | bit];
                self.amps[b] = (a0 + a1) * inv_sqrt2;
                self.amps[b | bit] = (a0 - a1) * inv_sqrt2;
            }
        }
        Ok(())
    }

    pub fn apply_x(&mut self, q: usize) -> Result<(), SimError> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        for b in 0..self.amps.len() {
            if b & bit == 0 {
                self.amps.swap(b, b | bit);
            }
        }
        Ok(())
    }

    pub fn apply_z(&mut self, q: usize) -> Result<(), SimError> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        for b in 0..self.amps.len() {
            if b & bit != 0 {
                self.amps[b] = -self.amps[b];
            }
        }
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<(), SimError> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for b in 0..self.amps.len() {
            if b & cbit != 0 && b & tbit == 0 {
                self.amps.swap(b, b | tbit);
            }
        }
        Ok(())
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<(), SimError> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        let mask = (1usize << a) | (1usize << b);
        for idx in 0..self.amps.len() {
            if idx & mask == mask {
                self.amps[idx] = -self.amps[idx];
            }
        }
        Ok(())
    }

    /// Applies a Pauli product with the phase convention P = i^{|Y|} X^x Z^z,
    /// under which every Pauli product is Hermitian.
    pub fn apply_pauli(&mut self, p: &PauliOperator) -> Result<(), SimError> {
        self.amps = self.pauli_applied(p)?;
        Ok(())
    }

    fn pauli_applied(&self, p: &PauliOperator) -> Result<Vec<Complex64>, SimError> {
        if p.n_qubits() != self.n_qubits {
            return Err(SimError::DimensionMismatch {
                left: p.n_qubits(),
                right: self.n_qubits,
            });
        }
        let z_mask = mask_u64(p.z_part());
        let x_mask = mask_u64(p.x_part());
        let y_count = (z_mask & x_mask).count_ones();
        let global = Complex64::i().powu(y_count);
        let mut out = vec![Complex64::ZERO; self.amps.len()];
        for (b, &amp) in self.amps.iter().enumerate() {
            let sign = if (b as u64 & z_mask).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            out[b ^ x_mask as usize] = global * sign * amp;
        }
        Ok(out)
    }

    /// ⟨ψ|P|ψ⟩ for a Hermitian Pauli product; always real.
    pub fn expectation(&self, p: &PauliOperator) -> Result<f64, SimError> {
        let pv = self.pauli_applied(p)?;
        let value: Complex64 = self
            .amps
            .iter()
            .zip(&pv)
            .map(|(a, b)| a.conj() * b)
            .sum();
        debug_assert!(value.im.abs() < 1e-10, "Hermitian expectation drifted complex");
        Ok(value.re)
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, SimError> {
        if self.n_qubits != other.n_qubits {
            return Err(SimError::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Runs a circuit in gate order. Pauli-product measurements sample the
    /// Born rule from a ChaCha stream seeded by `seed` (same seed, same
    /// platform-independent outcomes), project onto the sampled eigenspace,
    /// and renormalize; conditioned gates consult the record so far.
    pub fn apply_circuit(
        &mut self,
        circuit: &Circuit,
        seed: u64,
    ) -> Result<MeasurementRecord, SimError> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(SimError::DimensionMismatch {
                left: circuit.n_qubits(),
                right: self.n_qubits,
            });
        }
        circuit.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut record = MeasurementRecord::new(circuit.n_cbits(), seed);
        for gate in circuit.gates() {
            match gate {
                Gate::H { q } => self.apply_h(*q)?,
                Gate::X { q } => self.apply_x(*q)?,
                Gate::Z { q } => self.apply_z(*q)?,
                Gate::Cnot { control, target } => self.apply_cnot(*control, *target)?,
                Gate::Cz { a, b } => self.apply_cz(*a, *b)?,
                Gate::MeasurePauliProduct { pauli, out } => {
                    let p_plus = (1.0 + self.expectation(pauli)?) / 2.0;
                    let p_plus = p_plus.clamp(0.0, 1.0);
                    let draw: f64 = rng.random();
                    let outcome: i8 = if draw < p_plus { 1 } else { -1 };
                    let pv = self.pauli_applied(pauli)?;
                    let sign = f64::from(outcome);
                    for (a, p) in self.amps.iter_mut().zip(&pv) {
                        *a = (*a + sign * p) * 0.5;
                    }
                    let norm = self.norm();
                    assert!(
                        norm > 1e-12,
                        "projection onto the sampled eigenspace has nonzero norm"
                    );
                    for a in &mut self.amps {
                        *a /= norm;
                    }
                    record.outcomes[*out] = Some(outcome);
                    record.probabilities[*out] =
                        Some(if outcome == 1 { p_plus } else { 1.0 - p_plus });
                }
                Gate::XIf { bit, q } => {
                    if record.bit(*bit).expect("validated write-before-read") == 1 {
                        self.apply_x(*q)?;
                    }
                }
                Gate::ZIf { bit, q } => {
                    if record.bit(*bit).expect("validated write-before-read") == 1 {
                        self.apply_z(*q)?;
                    }
                }
            }
        }
        Ok(record)
    }

    /// Reduced density matrix over the kept qubits (strictly ascending).
    /// The lowest kept qubit becomes qubit 0 of the reduced system.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix, SimError> {
        if keep.len() > 10 {
            return Err(SimError::KeepTooLarge { kept: keep.len() });
        }
        for &q in keep {
            self.check_qubit(q)?;
        }
        if keep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SimError::KeepNotAscending);
        }
        let traced: Vec<usize> = (0..self.n_qubits).filter(|q| !keep.contains(q)).collect();
        let dim_k = 1usize << keep.len();
        let dim_t = 1usize << traced.len();
        let mut rho = DMatrix::<Complex64>::zeros(dim_k, dim_k);
        let mut column = vec![Complex64::ZERO; dim_k];
        for t_pat in 0..dim_t {
            let mut base = 0usize;
            for (i, &q) in traced.iter().enumerate() {
                if t_pat >> i & 1 == 1 {
                    base |= 1 << q;
                }
            }
            for (k_pat, slot) in column.iter_mut().enumerate() {
                let mut b = base;
                for (i, &q) in keep.iter().enumerate() {
                    if k_pat >> i & 1 == 1 {
                        b |= 1 << q;
                    }
                }
                *slot = self.amps[b];
            }
            for i in 0..dim_k {
                for j in 0..dim_k {
                    rho[(i, j)] += column[i] * column[j].conj();
                }
            }
        }
        Ok(DensityMatrix {
            n_qubits: keep.len(),
            entries: rho,
        })
    }

    /// Binary dump: u32 qubit count, then little-endian f64 (re, im) pairs
    /// in amplitude-index order.
    pub fn write_dump<W: Write>(&self, writer: &mut W) -> Result<(), SimError> {
        writer.write_all(&(self.n_qubits as u32).to_le_bytes())?;
        for amp in &self.amps {
            writer.write_all(&amp.re.to_le_bytes())?;
            writer.write_all(&amp.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a dump produced by [`StateVector::write_dump`]; trailing bytes
    /// are an error.
    pub fn read_dump<R: Read>(reader: &mut R) -> Result<Self, SimError> {
        let mut header = [0u8; 4];
        reader.read_exact(&mut header)?;
        let n_qubits = u32::from_le_bytes(header) as usize;
        if n_qubits > MAX_QUBITS {
            return Err(SimError::TooManyQubits { n: n_qubits });
        }
        let mut amps = Vec::with_capacity(1 << n_qubits);
        let mut pair = [0u8; 16];
        for _ in 0..1usize << n_qubits {
            reader.read_exact(&mut pair).map_err(|_| SimError::DumpFormat {
                detail: "truncated amplitude data".into(),
            })?;
            let re = f64::from_le_bytes(pair[..8].try_into().unwrap());
            let im = f64::from_le_bytes(pair[8..].try_into().unwrap());
            amps.push(Complex64::new(re, im));
        }
        let mut probe = [0u8; 1];
        if reader.read(&mut probe)? != 0 {
            return Err(SimError::DumpFormat {
                detail: "trailing bytes after amplitude data".into(),
            });
        }
        StateVector::from_amplitudes(amps)
    }
}

/// Dense density matrix over a few qubits, produced by partial trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Wraps a square 2^n × 2^n matrix without validating its physicality;
    /// call [`DensityMatrix::validate`] for that.
    pub fn from_entries(entries: DMatrix<Complex64>) -> Result<Self, SimError> {
        let dim = entries.nrows();
        if entries.ncols() != dim || dim < 2 || !dim.is_power_of_two() {
            return Err(SimError::BadAmplitudeCount { len: dim });
        }
        Ok(DensityMatrix {
            n_qubits: dim.trailing_zeros() as usize,
            entries,
        })
    }

    /// |ψ⟩⟨ψ| of a pure state.
    pub fn from_pure(state: &StateVector) -> Self {
        let dim = state.amps.len();
        let mut entries = DMatrix::<Complex64>::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                entries[(i, j)] = state.amps[i] * state.amps[j].conj();
            }
        }
        DensityMatrix {
            n_qubits: state.n_qubits,
            entries,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.diagonal().sum()
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim(), "density matrices must match in size");
        let mut max = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                max = max.max((self.entries[(i, j)] - other.entries[(i, j)]).norm());
            }
        }
        max
    }

    /// Physicality check: Hermitian within 1e−12, unit trace within 1e−12,
    /// eigenvalues ≥ −1e−10. Eigenvalues come from the real symmetric
    /// embedding [[A, −B], [B, A]] of ρ = A + iB, which has ρ's spectrum
    /// with doubled multiplicity.
    pub fn validate(&self) -> Result<(), SimError> {
        let dim = self.dim();
        let mut herm_drift = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                herm_drift = herm_drift
                    .max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        if herm_drift > 1e-12 {
            return Err(SimError::InvalidDensity {
                detail: format!("not Hermitian, drift {herm_drift:.3e}"),
            });
        }
        let trace = self.trace();
        if (trace - Complex64::ONE).norm() > 1e-12 {
            return Err(SimError::InvalidDensity {
                detail: format!("trace {trace} differs from 1"),
            });
        }
        let mut embedding = DMatrix::<f64>::zeros(2 * dim, 2 * dim);
        for i in 0..dim {
            for j in 0..dim {
                let entry = self.entries[(i, j)];
                embedding[(i, j)] = entry.re;
                embedding[(i + dim, j + dim)] = entry.re;
                embedding[(i, j + dim)] = -entry.im;
                embedding[(i + dim, j)] = entry.im;
            }
        }
        let eigen = embedding.symmetric_eigen();
        let min_eigenvalue = eigen.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
        if min_eigenvalue < -1e-10 {
            return Err(SimError::InvalidDensity {
                detail: format!("negative eigenvalue {min_eigenvalue:.3e}"),
            });
        }
        Ok(())
    }

    /// ⟨ψ|ρ|ψ⟩ for a single-qubit ρ and pure |ψ⟩.
    pub fn fidelity_qubit(&self, psi: &StateVector) -> Result<f64, SimError> {
        if self.n_qubits != 1 || psi.n_qubits != 1 {
            return Err(SimError::DimensionMismatch {
                left: self.n_qubits,
                right: psi.n_qubits,
            });
        }
        let mut value = Complex64::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                value += psi.amps[i].conj() * self.entries[(i, j)] * psi.amps[j];
            }
        }
        Ok(value.re)
    }
}

/// Tests whether ρ_r is the equally weighted mixture of the branch states
/// |φ_x⟩ = α|x_r⟩ + β|1+x_r⟩ over all codewords x, where x_r is x restricted
/// to the star of r — the reduced state an erasure leaves behind. True iff
/// the entrywise distance is within 1e−10.
pub fn codeword_mixture_check(
    rho_r: &DensityMatrix,
    code: &StabilizerCode,
    r: usize,
    alpha: Complex64,
    beta: Complex64,
) -> Result<bool, SimError> {
    let star = code.star_positions(r)?;
    let n_held = star.len();
    if n_held > 10 {
        return Err(SimError::KeepTooLarge { kept: n_held });
    }
    if rho_r.n_qubits() != n_held {
        return Err(SimError::DimensionMismatch {
            left: rho_r.n_qubits(),
            right: n_held,
        });
    }
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(SimError::NotNormalized { norm: norm.sqrt() });
    }

    let k = code.c2().n_rows();
    let dim = 1usize << n_held;
    let full = (1usize << n_held) - 1;
    let mut mixture = DMatrix::<Complex64>::zeros(dim, dim);
    let weight = 1.0 / f64::from(1u32 << k);
    for combo in 0u32..1 << k {
        let mut x = BitVector::zeros(code.n_qubits());
        for row in 0..k {
            if combo >> row & 1 == 1 {
                x.xor_assign(code.c2().row(row));
            }
        }
        let projected = x.select(&star);
        let mut pattern = 0usize;
        for (bit, &_pos) in star.iter().enumerate() {
            if projected.get(bit) {
                pattern |= 1 << bit;
            }
        }
        let branch = [(pattern, alpha), (pattern ^ full, beta)];
        for &(i, ai) in &branch {
            for &(j, aj) in &branch {
                mixture[(i, j)] += weight * ai * aj.conj();
            }
        }
    }
    let mixture = DensityMatrix {
        n_qubits: n_held,
        entries: mixture,
    };
    Ok(rho_r.max_abs_diff(&mixture) <= 1e-10)
}
