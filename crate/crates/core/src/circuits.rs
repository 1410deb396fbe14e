//! Circuit synthesis for the summoning code: encoder, erasure decoder, and
//! graph-state preparation, plus gate counting and a text serialization.
//!
//! Qubit order everywhere is the canonical edge order of [`crate::gf2`];
//! qubit 0 carries the lowest edge. Golden files under `goldens/` are
//! byte-exact renderings of these circuits and pin the synthesis order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::code::{CodeError, PauliOperator, SimpleGraph, StabilizerCode};
use crate::gf2::BitVector;
use thiserror::Error;

/// Errors from circuit construction and synthesis.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("qubit {q} out of range for {n} qubits")]
    QubitOutOfRange { q: usize, n: usize },
    #[error("classical bit {bit} out of range for {n} bits")]
    CbitOutOfRange { bit: usize, n: usize },
    #[error("two-qubit gate needs distinct qubits, got {q} twice")]
    DuplicateQubit { q: usize },
    #[error("classical bit {bit} read before any measurement writes it")]
    CbitReadBeforeWrite { bit: usize },
    #[error("expected {expected} labels, got {got}")]
    LabelCountMismatch { expected: usize, got: usize },
    #[error("qubit map must cover {expected} qubits, got {got}")]
    RemapSizeMismatch { expected: usize, got: usize },
    #[error("branch strings cannot be disambiguated: complement shift stays inside the codeword projection")]
    AmbiguousBranches,
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Gf2(#[from] crate::gf2::Gf2Error),
}

/// One circuit operation. Measurement projects onto a ±1 eigenspace of a
/// Pauli product and stores the outcome (+1 → 0, −1 → 1) in a classical bit;
/// conditioned gates apply iff their bit is 1.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H { q: usize },
    X { q: usize },
    Z { q: usize },
    Cnot { control: usize, target: usize },
    Cz { a: usize, b: usize },
    MeasurePauliProduct { pauli: PauliOperator, out: usize },
    XIf { bit: usize, q: usize },
    ZIf { bit: usize, q: usize },
}

/// Gate species, used for counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GateKind {
    H,
    X,
    Z,
    Cnot,
    Cz,
    MeasurePauliProduct,
    XIf,
    ZIf,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::MeasurePauliProduct => "MPP",
            GateKind::XIf => "X?",
            GateKind::ZIf => "Z?",
        }
    }
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::H { .. } => GateKind::H,
            Gate::X { .. } => GateKind::X,
            Gate::Z { .. } => GateKind::Z,
            Gate::Cnot { .. } => GateKind::Cnot,
            Gate::Cz { .. } => GateKind::Cz,
            Gate::MeasurePauliProduct { .. } => GateKind::MeasurePauliProduct,
            Gate::XIf { .. } => GateKind::XIf,
            Gate::ZIf { .. } => GateKind::ZIf,
        }
    }
}

/// Ordered gate list over a fixed qubit/classical register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    n_cbits: usize,
    qubit_labels: Vec<Option<String>>,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_cbits: usize) -> Self {
        Circuit {
            n_qubits,
            n_cbits,
            qubit_labels: vec![None; n_qubits],
            gates: Vec::new(),
        }
    }

    /// Replaces all qubit labels; one entry per qubit.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, CircuitError> {
        if labels.len() != self.n_qubits {
            return Err(CircuitError::LabelCountMismatch {
                expected: self.n_qubits,
                got: labels.len(),
            });
        }
        self.qubit_labels = labels.into_iter().map(Some).collect();
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_cbits(&self) -> usize {
        self.n_cbits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn qubit_label(&self, q: usize) -> Option<&str> {
        self.qubit_labels[q].as_deref()
    }

    /// Appends a gate after range-checking its indices.
    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        let check_q = |q: usize| {
            if q >= self.n_qubits {
                Err(CircuitError::QubitOutOfRange {
                    q,
                    n: self.n_qubits,
                })
            } else {
                Ok(())
            }
        };
        let check_c = |bit: usize| {
            if bit >= self.n_cbits {
                Err(CircuitError::CbitOutOfRange {
                    bit,
                    n: self.n_cbits,
                })
            } else {
                Ok(())
            }
        };
        match &gate {
            Gate::H { q } | Gate::X { q } | Gate::Z { q } => check_q(*q)?,
            Gate::Cnot {
                control: a,
                target: b,
            }
            | Gate::Cz { a, b } => {
                check_q(*a)?;
                check_q(*b)?;
                if a == b {
                    return Err(CircuitError::DuplicateQubit { q: *a });
                }
            }
            Gate::MeasurePauliProduct { pauli, out } => {
                if pauli.n_qubits() != self.n_qubits {
                    return Err(CircuitError::QubitOutOfRange {
                        q: pauli.n_qubits(),
                        n: self.n_qubits,
                    });
                }
                check_c(*out)?;
            }
            Gate::XIf { bit, q } | Gate::ZIf { bit, q } => {
                check_c(*bit)?;
                check_q(*q)?;
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Whole-circuit consistency: every conditioned gate reads a classical
    /// bit some earlier measurement wrote.
    pub fn validate(&self) -> Result<(), CircuitError> {
        let mut written = vec![false; self.n_cbits];
        for gate in &self.gates {
            match gate {
                Gate::MeasurePauliProduct { out, .. } => written[*out] = true,
                Gate::XIf { bit, .. } | Gate::ZIf { bit, .. } if !written[*bit] => {
                    return Err(CircuitError::CbitReadBeforeWrite { bit: *bit });
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Exact tally per gate species; absent kinds count zero.
    pub fn gate_count(&self) -> BTreeMap<GateKind, usize> {
        let mut counts = BTreeMap::new();
        for gate in &self.gates {
            *counts.entry(gate.kind()).or_insert(0) += 1;
        }
        counts
    }

    pub fn count_of(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind() == kind).count()
    }

    /// Rebuilds the circuit on a larger register, sending local qubit k to
    /// `map[k]`. Classical bits are unchanged; labels come from the target
    /// register's own naming.
    pub fn remap(
        &self,
        n_qubits: usize,
        map: &[usize],
        labels: Vec<Option<String>>,
    ) -> Result<Circuit, CircuitError> {
        if map.len() != self.n_qubits {
            return Err(CircuitError::RemapSizeMismatch {
                expected: self.n_qubits,
                got: map.len(),
            });
        }
        for &q in map {
            if q >= n_qubits {
                return Err(CircuitError::QubitOutOfRange { q, n: n_qubits });
            }
        }
        let qubit_labels = if labels.is_empty() {
            vec![None; n_qubits]
        } else if labels.len() == n_qubits {
            labels
        } else {
            return Err(CircuitError::LabelCountMismatch {
                expected: n_qubits,
                got: labels.len(),
            });
        };
        let mut out = Circuit {
            n_qubits,
            n_cbits: self.n_cbits,
            qubit_labels,
            gates: Vec::with_capacity(self.gates.len()),
        };
        for gate in &self.gates {
            let mapped = match gate {
                Gate::H { q } => Gate::H { q: map[*q] },
                Gate::X { q } => Gate::X { q: map[*q] },
                Gate::Z { q } => Gate::Z { q: map[*q] },
                Gate::Cnot { control, target } => Gate::Cnot {
                    control: map[*control],
                    target: map[*target],
                },
                Gate::Cz { a, b } => Gate::Cz {
                    a: map[*a],
                    b: map[*b],
                },
                Gate::MeasurePauliProduct { pauli, out: bit } => Gate::MeasurePauliProduct {
                    pauli: PauliOperator::new(
                        pauli.z_part().scatter(n_qubits, map),
                        pauli.x_part().scatter(n_qubits, map),
                    )?,
                    out: *bit,
                },
                Gate::XIf { bit, q } => Gate::XIf {
                    bit: *bit,
                    q: map[*q],
                },
                Gate::ZIf { bit, q } => Gate::ZIf {
                    bit: *bit,
                    q: map[*q],
                },
            };
            out.push(mapped)?;
        }
        Ok(out)
    }

    /// Text rendering: `qubits`/`cbits` header, `label` lines for named
    /// qubits, then one line per gate.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "qubits {}", self.n_qubits).unwrap();
        writeln!(out, "cbits {}", self.n_cbits).unwrap();
        for (q, label) in self.qubit_labels.iter().enumerate() {
            if let Some(name) = label {
                writeln!(out, "label q{q} = {name}").unwrap();
            }
        }
        for gate in &self.gates {
            match gate {
                Gate::H { q } => writeln!(out, "H q{q}").unwrap(),
                Gate::X { q } => writeln!(out, "X q{q}").unwrap(),
                Gate::Z { q } => writeln!(out, "Z q{q}").unwrap(),
                Gate::Cnot { control, target } => {
                    writeln!(out, "CNOT q{control} q{target}").unwrap()
                }
                Gate::Cz { a, b } => writeln!(out, "CZ q{a} q{b}").unwrap(),
                Gate::MeasurePauliProduct { pauli, out: bit } => {
                    let mut terms = String::new();
                    for q in 0..pauli.n_qubits() {
                        let letter = match (pauli.z_part().get(q), pauli.x_part().get(q)) {
                            (false, false) => continue,
                            (true, false) => 'Z',
                            (false, true) => 'X',
                            (true, true) => 'Y',
                        };
                        if !terms.is_empty() {
                            terms.push(' ');
                        }
                        write!(terms, "{letter} q{q}").unwrap();
                    }
                    writeln!(out, "MPP {terms} -> c{bit}").unwrap();
                }
                Gate::XIf { bit, q } => writeln!(out, "X? c{bit} q{q}").unwrap(),
                Gate::ZIf { bit, q } => writeln!(out, "Z? c{bit} q{q}").unwrap(),
            }
        }
        out
    }
}

fn edge_labels(code: &StabilizerCode) -> Vec<String> {
    (0..code.n_qubits())
        .map(|pos| code.edges().label(pos).expect("position in range"))
        .collect()
}

/// Synthesizes the encoder. Input convention: the qubit of edge {1,2}
/// carries α|0⟩+β|1⟩, all others |0⟩.
///
/// Stage 1 fans the input out over the star of vertex 1 (the edge {1,2}
/// already holds the bit, so Ñ−2 CNOTs suffice), yielding α|0…0⟩+β|star 1⟩.
/// Stage 2 sums, for each j in 2..Ñ−1, the generator A_1+A_j into the still
/// blank qubit of edge {j,Ñ}: H there, then CNOTs onto the rest of that
/// generator's support. Total: Ñ−2 Hadamards and 2(Ñ−2)² CNOTs.
pub fn synth_encoder(code: &StabilizerCode) -> Result<Circuit, CircuitError> {
    let n_tilde = code.n_vertices();
    let edges = code.edges();
    let mut circuit =
        Circuit::new(code.n_qubits(), 0).with_labels(edge_labels(code))?;

    let input = edges.index(1, 2)?;
    for i in 3..=n_tilde {
        circuit.push(Gate::Cnot {
            control: input,
            target: edges.index(1, i)?,
        })?;
    }

    for (row, j) in code.x_rows().rows().zip(2..n_tilde) {
        let control = edges.index(j, n_tilde)?;
        debug_assert!(row.get(control), "edge {{j,Ñ}} lies in A_1+A_j");
        circuit.push(Gate::H { q: control })?;
        for target in row.support() {
            if target != control {
                circuit.push(Gate::Cnot { control, target })?;
            }
        }
    }
    circuit.validate()?;
    Ok(circuit)
}

/// Synthesizes the decoder run by the reveal agent at vertex r, acting on
/// the Ñ−1 held qubits (the star of r) in canonical order.
///
/// The Ñ−2 adjacent-pair Z-parity measurements pin the branch string up to
/// complement; the complement is resolved against the projection of C2 onto
/// the held edges, which has codimension 1 there. Both the membership form
/// and the per-qubit corrections are linear in the outcomes, so they compile
/// to classically conditioned X gates. A final CNOT fan-out from the first
/// held qubit leaves α|0⟩+β|1⟩ on that qubit.
pub fn synth_decoder(code: &StabilizerCode, r: usize) -> Result<Circuit, CircuitError> {
    let star = code.star_positions(r)?;
    let n_held = star.len();
    let n_meas = n_held - 1;
    let labels: Vec<String> = star
        .iter()
        .map(|&pos| code.edges().label(pos).expect("position in range"))
        .collect();
    let mut circuit = Circuit::new(n_held, n_meas).with_labels(labels)?;

    for t in 0..n_meas {
        let mut z = BitVector::zeros(n_held);
        z.set(t, true);
        z.set(t + 1, true);
        circuit.push(Gate::MeasurePauliProduct {
            pauli: PauliOperator::from_z(z),
            out: t,
        })?;
    }

    // Dual vector of the projected codeword space W = proj_star(C2):
    // y ∈ W iff d·y = 0. Complements must fall outside W, i.e. d·1 = 1.
    let projected = code.c2().select_columns(&star);
    let dual = projected.kernel();
    if dual.n_rows() != 1 {
        return Err(CircuitError::AmbiguousBranches);
    }
    let d = dual.row(0);
    if d.weight().is_multiple_of(2) {
        return Err(CircuitError::AmbiguousBranches);
    }

    // Branch string y(m) with y_t = c ⊕ m_0 ⊕ … ⊕ m_{t−1} and free bit
    // c = d·y forced to 0: c = Σ_s λ_s m_s with λ_s the suffix parity of d.
    let mut lambda = vec![false; n_meas];
    let mut suffix = false;
    for s in (0..n_meas).rev() {
        suffix ^= d.get(s + 1);
        lambda[s] = suffix;
    }
    for t in 0..n_held {
        for (s, &lam) in lambda.iter().enumerate() {
            if lam ^ (s < t) {
                circuit.push(Gate::XIf { bit: s, q: t })?;
            }
        }
    }

    for target in 1..n_held {
        circuit.push(Gate::Cnot { control: 0, target })?;
    }
    circuit.validate()?;
    Ok(circuit)
}

/// H on every vertex, then CZ per edge: |V| Hadamards and |E| CZs.
pub fn synth_graph_state(graph: &SimpleGraph) -> Result<Circuit, CircuitError> {
    let mut circuit = Circuit::new(graph.n_vertices(), 0);
    for q in 0..graph.n_vertices() {
        circuit.push(Gate::H { q })?;
    }
    for &(a, b) in graph.edges() {
        circuit.push(Gate::Cz { a, b })?;
    }
    Ok(circuit)
}
