//! The summoning CSS code on the edges of K_Ñ, and the CWS comparison code.
//!
//! For an even vertex count Ñ the code places one qubit on each of the
//! C(Ñ,2) edges. Z-type generators are the triangles through vertex 1,
//! X-type generators are the star sums A_1+A_j; together they stabilize a
//! single logical qubit whose logical operators act on the star of
//! vertex 1. The decisive property is that erasing every edge *not*
//! adjacent to a chosen vertex r is correctable, for every r, which is what
//! lets any reveal agent holding only the star of r reconstruct the state.
//!
//! Key spans, all subspaces of GF(2)^C(Ñ,2):
//! - cut space C1 = span{A_1,...,A_{Ñ-1}} (stars), dimension Ñ−1;
//! - cycle space C1⊥ = span of triangles through vertex 1;
//! - C2 = span{A_1+A_j} ⊂ C1, dimension Ñ−2, exactly the star sums over
//!   even-size vertex subsets.

use crate::circuits::GateKind;
use crate::gf2::{BitMatrix, BitVector, EdgeIndexMap, Gf2Error};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Errors from code construction and verification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    /// The edge-per-qubit construction requires an even vertex count ≥ 4;
    /// odd counts break erasure correctability.
    #[error("vertex count must be even and at least 4, got {n_tilde}")]
    InvalidVertexCount { n_tilde: usize },
    #[error("vertex {v} out of range 1..={n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("triangle needs three distinct vertices, got ({i},{j},{k})")]
    NonDistinctTriangle { i: usize, j: usize, k: usize },
    #[error("operators act on {left} vs {right} qubits")]
    QubitCountMismatch { left: usize, right: usize },
    #[error("comparison code needs at least 3 diamonds, got {n}")]
    TooFewDiamonds { n: usize },
    #[error("enumeration over {qubits} qubits exceeds the oracle size limit")]
    EnumerationTooLarge { qubits: usize },
    #[error("unknown Pauli letter '{letter}', expected I/X/Y/Z")]
    BadPauliLetter { letter: char },
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// Pauli operator modulo phase, as a symplectic pair (Z part, X part).
///
/// Two operators commute iff the symplectic form
/// dot(z, x') XOR dot(x, z') vanishes.
#[derive(Clone, PartialEq, Eq)]
pub struct PauliOperator {
    z: BitVector,
    x: BitVector,
}

impl PauliOperator {
    pub fn new(z: BitVector, x: BitVector) -> Result<Self, CodeError> {
        if z.len() != x.len() {
            return Err(CodeError::QubitCountMismatch {
                left: z.len(),
                right: x.len(),
            });
        }
        Ok(PauliOperator { z, x })
    }

    pub fn identity(n_qubits: usize) -> Self {
        PauliOperator {
            z: BitVector::zeros(n_qubits),
            x: BitVector::zeros(n_qubits),
        }
    }

    /// Pure Z-type operator with the given support.
    pub fn from_z(z: BitVector) -> Self {
        let x = BitVector::zeros(z.len());
        PauliOperator { z, x }
    }

    /// Pure X-type operator with the given support.
    pub fn from_x(x: BitVector) -> Self {
        let z = BitVector::zeros(x.len());
        PauliOperator { z, x }
    }

    /// Parses letters like "ZZI" or "IXX" (Y sets both parts).
    pub fn from_letters(letters: &str) -> Result<Self, CodeError> {
        let n = letters.chars().count();
        let mut z = BitVector::zeros(n);
        let mut x = BitVector::zeros(n);
        for (q, letter) in letters.chars().enumerate() {
            match letter {
                'I' => {}
                'Z' => z.set(q, true),
                'X' => x.set(q, true),
                'Y' => {
                    z.set(q, true);
                    x.set(q, true);
                }
                other => return Err(CodeError::BadPauliLetter { letter: other }),
            }
        }
        Ok(PauliOperator { z, x })
    }

    pub fn n_qubits(&self) -> usize {
        self.z.len()
    }

    pub fn z_part(&self) -> &BitVector {
        &self.z
    }

    pub fn x_part(&self) -> &BitVector {
        &self.x
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        (0..self.z.len())
            .filter(|&q| self.z.get(q) || self.x.get(q))
            .count()
    }

    pub fn is_identity(&self) -> bool {
        self.z.is_zero() && self.x.is_zero()
    }

    /// Symplectic commutation test: true iff dot(z,x') XOR dot(x,z') = 0.
    pub fn commutes(&self, other: &PauliOperator) -> Result<bool, CodeError> {
        if self.n_qubits() != other.n_qubits() {
            return Err(CodeError::QubitCountMismatch {
                left: self.n_qubits(),
                right: other.n_qubits(),
            });
        }
        Ok(!(self.z.dot(&other.x)? ^ self.x.dot(&other.z)?))
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOperator({self})")
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits() {
            let letter = match (self.z.get(q), self.x.get(q)) {
                (false, false) => 'I',
                (true, false) => 'Z',
                (false, true) => 'X',
                (true, true) => 'Y',
            };
            write!(f, "{letter}")?;
        }
        Ok(())
    }
}

/// Weight-3 indicator vector of the triangle {i,j,k} in K_n.
pub fn triangle_vector(i: usize, j: usize, k: usize, n: usize) -> Result<BitVector, CodeError> {
    if i == j || j == k || i == k {
        return Err(CodeError::NonDistinctTriangle { i, j, k });
    }
    let map = EdgeIndexMap::new(n)?;
    Ok(BitVector::from_support(
        map.n_edges(),
        &[map.index(i, j)?, map.index(j, k)?, map.index(k, i)?],
    ))
}

/// Weight-(n−1) indicator vector of all edges adjacent to vertex j.
pub fn star_vector(j: usize, n: usize) -> Result<BitVector, CodeError> {
    if j < 1 || j > n {
        return Err(CodeError::VertexOutOfRange { v: j, n });
    }
    let map = EdgeIndexMap::new(n)?;
    let support: Vec<usize> = (1..=n)
        .filter(|&l| l != j)
        .map(|l| map.index(l, j))
        .collect::<Result<_, _>>()?;
    Ok(BitVector::from_support(map.n_edges(), &support))
}

/// CSS stabilizer code with one qubit per edge of K_{n_vertices}.
///
/// Generators are stored as separate pure-Z and pure-X row blocks; the full
/// symplectic matrix [Z-block | 0 ; 0 | X-block] is assembled on demand.
#[derive(Clone)]
pub struct StabilizerCode {
    n_vertices: usize,
    edges: EdgeIndexMap,
    z_rows: BitMatrix,
    x_rows: BitMatrix,
    logical_x: PauliOperator,
    logical_z: PauliOperator,
    c1: BitMatrix,
    c1_perp: BitMatrix,
    c2: BitMatrix,
}

/// Builds the summoning code on an even number of vertices.
///
/// Z-rows: triangles T_{1jk} for 2 ≤ j < k ≤ Ñ (C(Ñ−1,2) rows).
/// X-rows: A_1+A_j for 2 ≤ j ≤ Ñ−1 (Ñ−2 rows).
/// Logicals: X̄ = X on A_1, Z̄ = Z on A_1.
pub fn build_css(n_tilde: usize) -> Result<StabilizerCode, CodeError> {
    if n_tilde < 4 || !n_tilde.is_multiple_of(2) {
        return Err(CodeError::InvalidVertexCount { n_tilde });
    }
    let edges = EdgeIndexMap::new(n_tilde)?;
    let n_edges = edges.n_edges();

    let mut z_rows = BitMatrix::new(n_edges);
    for j in 2..n_tilde {
        for k in j + 1..=n_tilde {
            z_rows.push_row(triangle_vector(1, j, k, n_tilde)?)?;
        }
    }

    let a1 = star_vector(1, n_tilde)?;
    let mut x_rows = BitMatrix::new(n_edges);
    for j in 2..n_tilde {
        x_rows.push_row(&a1 ^ &star_vector(j, n_tilde)?)?;
    }

    let mut c1 = BitMatrix::new(n_edges);
    for j in 1..n_tilde {
        c1.push_row(star_vector(j, n_tilde)?)?;
    }

    Ok(StabilizerCode {
        n_vertices: n_tilde,
        edges,
        c1_perp: z_rows.clone(),
        c2: x_rows.clone(),
        z_rows,
        x_rows,
        logical_x: PauliOperator::from_x(a1.clone()),
        logical_z: PauliOperator::from_z(a1),
        c1,
    })
}

impl StabilizerCode {
    /// Assembles a CSS code from explicit generator blocks.
    ///
    /// No commutation or rank checks are performed here: deliberately broken
    /// codes must be constructible so that [`verify`] and fault-injection
    /// tests have something to catch. C1 is derived as the dual of the
    /// Z-rows.
    pub fn from_parts(
        n_vertices: usize,
        z_rows: BitMatrix,
        x_rows: BitMatrix,
        logical_x: PauliOperator,
        logical_z: PauliOperator,
    ) -> Result<Self, CodeError> {
        let edges = EdgeIndexMap::new(n_vertices)?;
        let n_edges = edges.n_edges();
        let widths = [
            (z_rows.n_rows() > 0).then(|| z_rows.n_cols()),
            (x_rows.n_rows() > 0).then(|| x_rows.n_cols()),
            Some(logical_x.n_qubits()),
            Some(logical_z.n_qubits()),
        ];
        for width in widths.into_iter().flatten() {
            if width != n_edges {
                return Err(CodeError::QubitCountMismatch {
                    left: width,
                    right: n_edges,
                });
            }
        }
        Ok(StabilizerCode {
            n_vertices,
            edges,
            c1: z_rows.kernel(),
            c1_perp: z_rows.clone(),
            c2: x_rows.clone(),
            z_rows,
            x_rows,
            logical_x,
            logical_z,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_qubits(&self) -> usize {
        self.edges.n_edges()
    }

    pub fn edges(&self) -> &EdgeIndexMap {
        &self.edges
    }

    pub fn z_rows(&self) -> &BitMatrix {
        &self.z_rows
    }

    pub fn x_rows(&self) -> &BitMatrix {
        &self.x_rows
    }

    pub fn logical_x(&self) -> &PauliOperator {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliOperator {
        &self.logical_z
    }

    /// Cut-space basis (stars of vertices 1..Ñ−1).
    pub fn c1(&self) -> &BitMatrix {
        &self.c1
    }

    /// Cycle-space basis (the Z-generator rows).
    pub fn c1_perp(&self) -> &BitMatrix {
        &self.c1_perp
    }

    /// Basis of C2 (the X-generator rows).
    pub fn c2(&self) -> &BitMatrix {
        &self.c2
    }

    /// Generators in canonical order: Z-rows, then X-rows.
    pub fn generators(&self) -> Vec<PauliOperator> {
        let mut gens: Vec<PauliOperator> = self
            .z_rows
            .rows()
            .map(|row| PauliOperator::from_z(row.clone()))
            .collect();
        gens.extend(self.x_rows.rows().map(|row| PauliOperator::from_x(row.clone())));
        gens
    }

    pub fn n_generators(&self) -> usize {
        self.z_rows.n_rows() + self.x_rows.n_rows()
    }

    /// Full symplectic generator matrix, rows [z | 0] then [0 | x].
    pub fn h_matrix(&self) -> BitMatrix {
        let n = self.n_qubits();
        let mut rows = Vec::with_capacity(self.n_generators());
        for row in self.z_rows.rows() {
            let mut full = BitVector::zeros(2 * n);
            for pos in row.support() {
                full.set(pos, true);
            }
            rows.push(full);
        }
        for row in self.x_rows.rows() {
            let mut full = BitVector::zeros(2 * n);
            for pos in row.support() {
                full.set(n + pos, true);
            }
            rows.push(full);
        }
        BitMatrix::from_rows(rows).expect("blocks share the qubit count")
    }

    /// True iff `p` is a product of generators: both symplectic parts lie in
    /// the respective row spans (valid because the code is CSS).
    pub fn in_stabilizer(&self, p: &PauliOperator) -> bool {
        assert_eq!(p.n_qubits(), self.n_qubits(), "operator size mismatch");
        self.z_rows.in_span(p.z_part()).expect("width checked")
            && self.x_rows.in_span(p.x_part()).expect("width checked")
    }

    /// True iff `p` commutes with every generator.
    pub fn in_centralizer(&self, p: &PauliOperator) -> bool {
        assert_eq!(p.n_qubits(), self.n_qubits(), "operator size mismatch");
        let z_ok = self
            .z_rows
            .rows()
            .all(|t| !p.x_part().dot(t).expect("width checked"));
        let x_ok = self
            .x_rows
            .rows()
            .all(|a| !p.z_part().dot(a).expect("width checked"));
        z_ok && x_ok
    }

    /// Positions of the edges adjacent to vertex r, ascending.
    pub fn star_positions(&self, r: usize) -> Result<Vec<usize>, CodeError> {
        if r < 1 || r > self.n_vertices {
            return Err(CodeError::VertexOutOfRange {
                v: r,
                n: self.n_vertices,
            });
        }
        let mut positions: Vec<usize> = (1..=self.n_vertices)
            .filter(|&k| k != r)
            .map(|k| self.edges.index(r, k))
            .collect::<Result<_, _>>()?;
        positions.sort_unstable();
        Ok(positions)
    }

    /// Positions of the edges NOT adjacent to vertex r, ascending.
    pub fn erased_positions(&self, r: usize) -> Result<Vec<usize>, CodeError> {
        let star = self.star_positions(r)?;
        Ok((0..self.n_qubits()).filter(|p| !star.contains(p)).collect())
    }
}

/// Decides whether losing every qubit outside the star of r is correctable:
/// every Pauli supported on the lost edges that commutes with all generators
/// must itself be a stabilizer element.
///
/// Computed algebraically: restrict the generator blocks to the lost
/// coordinates, take the kernels (the centralizer directions living there),
/// and test span inclusion back in the full code. Scales to Ñ=12 where
/// enumeration cannot.
pub fn erasure_correctable(code: &StabilizerCode, r: usize) -> Result<bool, CodeError> {
    let erased = code.erased_positions(r)?;
    let n = code.n_qubits();

    // Z side: candidate P_Z on erased coords must kill every X-row.
    let x_restricted = code.x_rows().select_columns(&erased);
    for kernel_vec in x_restricted.kernel().rows() {
        let full = kernel_vec.scatter(n, &erased);
        if !code.z_rows().in_span(&full)? {
            return Ok(false);
        }
    }

    // X side: candidate P_X on erased coords must kill every Z-row.
    let z_restricted = code.z_rows().select_columns(&erased);
    for kernel_vec in z_restricted.kernel().rows() {
        let full = kernel_vec.scatter(n, &erased);
        if !code.x_rows().in_span(&full)? {
            return Ok(false);
        }
    }

    Ok(true)
}

/// Brute-force oracle for [`erasure_correctable`]: enumerates every Pauli
/// supported on the lost edges (4^m of them) and checks centralizer ⇒
/// stabilizer directly. Only usable while m stays small.
pub fn erasure_correctable_by_enumeration(
    code: &StabilizerCode,
    r: usize,
) -> Result<bool, CodeError> {
    let erased = code.erased_positions(r)?;
    if erased.len() > 10 {
        return Err(CodeError::EnumerationTooLarge {
            qubits: erased.len(),
        });
    }
    let n = code.n_qubits();
    for z_mask in 0u32..1 << erased.len() {
        for x_mask in 0u32..1 << erased.len() {
            let mut z = BitVector::zeros(n);
            let mut x = BitVector::zeros(n);
            for (k, &pos) in erased.iter().enumerate() {
                z.set(pos, z_mask >> k & 1 == 1);
                x.set(pos, x_mask >> k & 1 == 1);
            }
            let p = PauliOperator::new(z, x)?;
            if code.in_centralizer(&p) && !code.in_stabilizer(&p) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Outcome of a bounded minimum-weight search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceResult {
    /// Minimum weight of a centralizer element outside the stabilizer.
    Exact(usize),
    /// No such element up to the search bound; the true distance is at least
    /// this value.
    AtLeast(usize),
}

/// Minimum weight over C(S)∖S by support-pattern enumeration: choose a
/// support of size w, then one of {Z,X,Y} per supported qubit. Conclusive
/// only if `max_weight` reaches the true distance.
pub fn distance(code: &StabilizerCode, max_weight: usize) -> DistanceResult {
    let n = code.n_qubits();
    for w in 1..=max_weight.min(n) {
        if weight_w_logical_exists(code, w) {
            return DistanceResult::Exact(w);
        }
    }
    DistanceResult::AtLeast(max_weight + 1)
}

fn weight_w_logical_exists(code: &StabilizerCode, w: usize) -> bool {
    let n = code.n_qubits();
    let mut support: Vec<usize> = (0..w).collect();
    loop {
        let mut assignment = vec![0u8; w];
        loop {
            let mut z = BitVector::zeros(n);
            let mut x = BitVector::zeros(n);
            for (&pos, &axis) in support.iter().zip(&assignment) {
                match axis {
                    0 => z.set(pos, true),
                    1 => x.set(pos, true),
                    _ => {
                        z.set(pos, true);
                        x.set(pos, true);
                    }
                }
            }
            let p = PauliOperator::new(z, x).expect("equal lengths");
            if code.in_centralizer(&p) && !code.in_stabilizer(&p) {
                return true;
            }
            // Next base-3 assignment.
            let mut carry = 0;
            while carry < w {
                assignment[carry] += 1;
                if assignment[carry] < 3 {
                    break;
                }
                assignment[carry] = 0;
                carry += 1;
            }
            if carry == w {
                break;
            }
        }
        // Next lexicographic support.
        let mut k = w;
        while k > 0 && support[k - 1] == n - w + k - 1 {
            k -= 1;
        }
        if k == 0 {
            return false;
        }
        support[k - 1] += 1;
        for idx in k..w {
            support[idx] = support[idx - 1] + 1;
        }
    }
}

/// Z on a perfect matching of the vertices: pairs (1,2),(3,4),...,(Ñ−1,Ñ).
/// For every even Ñ this weight-Ñ/2 operator commutes with all generators
/// yet is no stabilizer element, witnessing distance ≤ Ñ/2.
pub fn perfect_matching_z(code: &StabilizerCode) -> Result<PauliOperator, CodeError> {
    let n_tilde = code.n_vertices();
    if !n_tilde.is_multiple_of(2) {
        return Err(CodeError::InvalidVertexCount { n_tilde });
    }
    let mut z = BitVector::zeros(code.n_qubits());
    for i in 1..=n_tilde / 2 {
        z.set(code.edges().index(2 * i - 1, 2 * i)?, true);
    }
    Ok(PauliOperator::from_z(z))
}

/// One verification check with a human-readable outcome.
#[derive(Debug, Clone)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Aggregate of all structural checks for a code.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub items: Vec<CheckItem>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|item| item.passed)
    }
}

/// Runs every structural invariant check: pairwise commutation, rank
/// (exactly one logical qubit), logical-operator algebra, and erasure
/// correctability for every vertex.
pub fn verify(code: &StabilizerCode) -> VerificationReport {
    let mut items = Vec::new();
    let gens = code.generators();

    let mut commuting = true;
    let mut first_clash = String::new();
    for (a, ga) in gens.iter().enumerate() {
        for (b, gb) in gens.iter().enumerate().skip(a + 1) {
            if !ga.commutes(gb).expect("equal sizes") {
                commuting = false;
                if first_clash.is_empty() {
                    first_clash = format!("generators {a} and {b} anti-commute");
                }
            }
        }
    }
    items.push(CheckItem {
        name: "generator commutation".into(),
        passed: commuting,
        detail: if commuting {
            format!("all {} generator pairs commute", gens.len() * (gens.len() - 1) / 2)
        } else {
            first_clash
        },
    });

    let expected_rank = code.n_qubits() - 1;
    let rank = code.h_matrix().rank();
    items.push(CheckItem {
        name: "generator rank".into(),
        passed: rank == expected_rank,
        detail: format!("rank {rank}, expected {expected_rank} (one logical qubit)"),
    });

    let lx = code.logical_x();
    let lz = code.logical_z();
    let logicals_commute = gens
        .iter()
        .all(|g| g.commutes(lx).expect("equal sizes") && g.commutes(lz).expect("equal sizes"));
    let pair_anticommutes = !lx.commutes(lz).expect("equal sizes");
    let outside = !code.in_stabilizer(lx) && !code.in_stabilizer(lz);
    items.push(CheckItem {
        name: "logical operators".into(),
        passed: logicals_commute && pair_anticommutes && outside,
        detail: format!(
            "commute with generators: {logicals_commute}, anti-commute with each other: \
             {pair_anticommutes}, outside stabilizer: {outside}"
        ),
    });

    let mut erasure_ok = true;
    let mut erasure_detail = String::new();
    for r in 1..=code.n_vertices() {
        match erasure_correctable(code, r) {
            Ok(true) => {}
            Ok(false) => {
                erasure_ok = false;
                erasure_detail = format!("loss of edges away from vertex {r} is not correctable");
                break;
            }
            Err(e) => {
                erasure_ok = false;
                erasure_detail = e.to_string();
                break;
            }
        }
    }
    items.push(CheckItem {
        name: "erasure correctability".into(),
        passed: erasure_ok,
        detail: if erasure_ok {
            format!("all {} vertex stars recover the state", code.n_vertices())
        } else {
            erasure_detail
        },
    });

    VerificationReport { items }
}

/// Comparison code: the codeword-stabilized construction on the line graph
/// of K_N′ (N′ = N+1), represented structurally for resource counting only.
#[derive(Debug, Clone)]
pub struct CwsCode {
    n: usize,
    vertex_labels: Vec<(usize, (usize, usize))>,
    graph: SimpleGraph,
    word_operators: [PauliOperator; 2],
}

impl CwsCode {
    pub fn n_diamonds(&self) -> usize {
        self.n
    }

    /// Vertex label (j, (j,k)): endpoint j of underlying edge {j,k}.
    pub fn vertex_labels(&self) -> &[(usize, (usize, usize))] {
        &self.vertex_labels
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn n_vertices(&self) -> usize {
        self.graph.n_vertices()
    }

    pub fn n_edges(&self) -> usize {
        self.graph.n_edges()
    }

    /// The two word operators: identity and all-Z.
    pub fn word_operators(&self) -> &[PauliOperator; 2] {
        &self.word_operators
    }
}

/// Undirected simple graph on 0-based vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    /// Edges are normalized to (low, high), sorted, deduplicated.
    pub fn new(n_vertices: usize, edges: &[(usize, usize)]) -> Result<Self, CodeError> {
        let mut normalized = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b || a >= n_vertices || b >= n_vertices {
                return Err(CodeError::VertexOutOfRange {
                    v: a.max(b),
                    n: n_vertices,
                });
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        normalized.dedup();
        Ok(SimpleGraph {
            n_vertices,
            edges: normalized,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// Builds the comparison code for n diamonds: one vertex (j,(j,k)) per
/// half-edge of K_n, with (j,(j,k)) adjacent to its twin (k,(j,k)) and to
/// every sibling (j,(j,l)). That yields N(N−1) vertices and N(N−1)²/2 edges.
pub fn build_cws(n: usize) -> Result<CwsCode, CodeError> {
    if n < 3 {
        return Err(CodeError::TooFewDiamonds { n });
    }
    let mut vertex_labels = Vec::new();
    for j in 1..=n {
        for k in (1..=n).filter(|&k| k != j) {
            vertex_labels.push((j, (j.min(k), j.max(k))));
        }
    }
    let position = |j: usize, edge: (usize, usize)| -> usize {
        vertex_labels
            .iter()
            .position(|&(owner, e)| owner == j && e == edge)
            .expect("label enumerated above")
    };

    let mut edges = Vec::new();
    for (v, &(j, edge)) in vertex_labels.iter().enumerate() {
        let (a, b) = edge;
        let other_end = if j == a { b } else { a };
        let twin = position(other_end, edge);
        if v < twin {
            edges.push((v, twin));
        }
        for l in (1..=n).filter(|&l| l != j && l != other_end) {
            let sibling = position(j, (j.min(l), j.max(l)));
            if v < sibling {
                edges.push((v, sibling));
            }
        }
    }
    let n_qubits = vertex_labels.len();
    let all_z = PauliOperator::from_z(BitVector::from_support(
        n_qubits,
        &(0..n_qubits).collect::<Vec<_>>(),
    ));

    Ok(CwsCode {
        n,
        graph: SimpleGraph::new(n_qubits, &edges)?,
        vertex_labels,
        word_operators: [PauliOperator::identity(n_qubits), all_z],
    })
}

/// Side-by-side resource tally for the two constructions at the same
/// diamond count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceCounts {
    pub n: usize,
    /// Vertex count of the edge code's complete graph (n rounded up to even).
    pub n_tilde: usize,
    /// Qubits in the edge code: one per edge of K_Ñ.
    pub q_css: usize,
    /// Qubits in the comparison code: one per half-edge of K_n.
    pub q_cws: usize,
    /// Gate tally of the synthesized encoder.
    pub css_gates: BTreeMap<GateKind, usize>,
    /// Gate tally of the comparison code's graph-state preparation.
    pub cws_prep_gates: BTreeMap<GateKind, usize>,
    /// Single-qubit Z count to apply the nontrivial word operator.
    pub cws_word_z: usize,
}

/// Tallies qubits and gates for both constructions on n diamonds. The edge
/// code numbers come from synthesizing the actual encoder, not from closed
/// forms; the comparison code's preparation is |V| Hadamards and |E| CZs.
pub fn resource_counts(n: usize) -> Result<ResourceCounts, CodeError> {
    if n < 3 {
        return Err(CodeError::TooFewDiamonds { n });
    }
    let n_tilde = n + n % 2;
    let css = build_css(n_tilde)?;
    let encoder = crate::circuits::synth_encoder(&css)
        .expect("encoder synthesis cannot fail on a built code");
    let cws = build_cws(n)?;
    let prep = crate::circuits::synth_graph_state(cws.graph())
        .expect("graph-state synthesis cannot fail on a built graph");
    Ok(ResourceCounts {
        n,
        n_tilde,
        q_css: css.n_qubits(),
        q_cws: cws.graph().n_vertices(),
        css_gates: encoder.gate_count(),
        cws_prep_gates: prep.gate_count(),
        cws_word_z: cws.word_operators()[1].weight(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_vector_hits_exactly_three_edges() {
        let t = triangle_vector(1, 2, 3, 4).unwrap();
        assert_eq!(t.support(), vec![0, 1, 3]); // e_1_2, e_1_3, e_2_3
    }

    #[test]
    fn triangle_vector_is_permutation_invariant() {
        let a = triangle_vector(1, 2, 3, 5).unwrap();
        let b = triangle_vector(1, 3, 2, 5).unwrap();
        let c = triangle_vector(3, 1, 2, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn triangle_sum_identity() {
        let sum = &(&triangle_vector(1, 2, 3, 4).unwrap() ^ &triangle_vector(1, 2, 4, 4).unwrap())
            ^ &triangle_vector(1, 3, 4, 4).unwrap();
        assert_eq!(sum, triangle_vector(2, 3, 4, 4).unwrap());
    }

    #[test]
    fn triangle_vector_rejects_repeats() {
        assert!(matches!(
            triangle_vector(1, 1, 3, 4),
            Err(CodeError::NonDistinctTriangle { .. })
        ));
    }

    #[test]
    fn star_vector_examples() {
        let a1 = star_vector(1, 4).unwrap();
        assert_eq!(a1.support(), vec![0, 1, 2]); // e_1_2, e_1_3, e_1_4
        for n in 3..=8 {
            let mut total = BitVector::zeros(n * (n - 1) / 2);
            for j in 1..=n {
                total.xor_assign(&star_vector(j, n).unwrap());
                assert_eq!(star_vector(j, n).unwrap().weight(), n - 1);
            }
            assert!(total.is_zero(), "each edge is counted by both endpoints");
        }
        assert!(matches!(
            star_vector(5, 4),
            Err(CodeError::VertexOutOfRange { v: 5, n: 4 })
        ));
    }

    #[test]
    fn build_css_four_vertices_has_expected_shape() {
        let code = build_css(4).unwrap();
        assert_eq!(code.n_qubits(), 6);
        assert_eq!(code.n_generators(), 5);
        assert_eq!(code.z_rows().n_rows(), 3);
        assert_eq!(code.x_rows().n_rows(), 2);
        assert_eq!(code.h_matrix().rank(), 5);
    }

    #[test]
    fn build_css_six_vertices_has_expected_shape() {
        let code = build_css(6).unwrap();
        assert_eq!(code.n_qubits(), 15);
        assert_eq!(code.n_generators(), 14);
        assert_eq!(code.z_rows().n_rows(), 10);
        assert_eq!(code.x_rows().n_rows(), 4);
        assert_eq!(code.h_matrix().rank(), 14);
    }

    #[test]
    fn build_css_rejects_odd_or_small_counts() {
        for bad in [0, 2, 3, 5, 7] {
            assert!(matches!(
                build_css(bad),
                Err(CodeError::InvalidVertexCount { .. })
            ));
        }
    }

    #[test]
    fn commutes_basic_cases() {
        let zi = PauliOperator::from_letters("ZI").unwrap();
        let xi = PauliOperator::from_letters("XI").unwrap();
        let ix = PauliOperator::from_letters("IX").unwrap();
        assert!(!zi.commutes(&xi).unwrap());
        assert!(zi.commutes(&ix).unwrap());
        assert!(matches!(
            zi.commutes(&PauliOperator::identity(3)),
            Err(CodeError::QubitCountMismatch { .. })
        ));
    }

    #[test]
    fn all_generator_pairs_commute_for_six_vertices() {
        let code = build_css(6).unwrap();
        let gens = code.generators();
        for (a, ga) in gens.iter().enumerate() {
            for gb in gens.iter().skip(a + 1) {
                assert!(ga.commutes(gb).unwrap());
            }
        }
    }

    #[test]
    fn in_stabilizer_examples() {
        let code = build_css(4).unwrap();
        assert!(code.in_stabilizer(&PauliOperator::identity(6)));
        let t234 = PauliOperator::from_z(triangle_vector(2, 3, 4, 4).unwrap());
        assert!(code.in_stabilizer(&t234));
        let a1_z = PauliOperator::from_z(star_vector(1, 4).unwrap());
        assert!(!code.in_stabilizer(&a1_z));
    }

    #[test]
    fn in_centralizer_examples() {
        let code = build_css(4).unwrap();
        assert!(code.in_centralizer(code.logical_x()));
        // Z on the single edge {1,2} anti-commutes with the X-row A_1+A_3,
        // whose support contains that edge.
        let z12 = PauliOperator::from_z(BitVector::from_support(6, &[0]));
        assert!(!code.in_centralizer(&z12));
        let witness = perfect_matching_z(&code).unwrap();
        assert!(code.in_centralizer(&witness));
        assert!(!code.in_stabilizer(&witness));
    }

    #[test]
    fn erasure_correctable_for_every_vertex() {
        for n_tilde in [4, 6] {
            let code = build_css(n_tilde).unwrap();
            for r in 1..=n_tilde {
                assert!(erasure_correctable(&code, r).unwrap(), "vertex {r}");
            }
        }
    }

    #[test]
    fn erasure_enumeration_oracle_agrees_at_four_vertices() {
        let code = build_css(4).unwrap();
        for r in 1..=4 {
            assert_eq!(
                erasure_correctable(&code, r).unwrap(),
                erasure_correctable_by_enumeration(&code, r).unwrap()
            );
        }
    }

    #[test]
    fn erasure_oracle_guards_its_size() {
        let code = build_css(8).unwrap();
        assert!(matches!(
            erasure_correctable_by_enumeration(&code, 1),
            Err(CodeError::EnumerationTooLarge { .. })
        ));
    }

    /// Three-qubit counterexample: with an odd vertex count the construction
    /// loses erasure correctability. ZII commutes with {ZZZ, IXX} but is no
    /// stabilizer element, and it is supported away from qubit 3's star.
    #[test]
    fn odd_counterexample_is_not_erasure_correctable() {
        let z_rows = BitMatrix::from_rows(vec![BitVector::from_support(3, &[0, 1, 2])]).unwrap();
        let x_rows = BitMatrix::from_rows(vec![BitVector::from_support(3, &[1, 2])]).unwrap();
        let code = StabilizerCode::from_parts(
            3,
            z_rows,
            x_rows,
            PauliOperator::from_letters("XXI").unwrap(),
            PauliOperator::from_letters("IZZ").unwrap(),
        )
        .unwrap();

        let zii = PauliOperator::from_letters("ZII").unwrap();
        assert!(code.in_centralizer(&zii));
        assert!(!code.in_stabilizer(&zii));
        assert!(!erasure_correctable(&code, 3).unwrap());
        assert!(!erasure_correctable_by_enumeration(&code, 3).unwrap());
    }

    #[test]
    fn distance_of_four_vertex_code_is_two() {
        let code = build_css(4).unwrap();
        assert_eq!(distance(&code, 3), DistanceResult::Exact(2));
        assert_eq!(distance(&code, 1), DistanceResult::AtLeast(2));
    }

    #[test]
    fn distance_of_six_vertex_code_is_three() {
        let code = build_css(6).unwrap();
        assert_eq!(distance(&code, 3), DistanceResult::Exact(3));
    }

    #[test]
    fn matching_witness_is_logical_up_to_twelve_vertices() {
        for n_tilde in [4, 6, 8, 10, 12] {
            let code = build_css(n_tilde).unwrap();
            let witness = perfect_matching_z(&code).unwrap();
            assert_eq!(witness.weight(), n_tilde / 2);
            assert!(code.in_centralizer(&witness), "n_tilde={n_tilde}");
            assert!(!code.in_stabilizer(&witness), "n_tilde={n_tilde}");
        }
    }

    #[test]
    fn z_rows_span_cycle_space_and_x_rows_span_c2() {
        let code = build_css(6).unwrap();
        // Kernel of the stars = cycle space; mutual inclusion with Z-rows.
        let cycles = code.c1().kernel();
        for row in code.z_rows().rows() {
            assert!(cycles.in_span(row).unwrap());
        }
        for row in cycles.rows() {
            assert!(code.z_rows().in_span(row).unwrap());
        }
        // C2 sits inside the cut space and has codimension 1 there.
        for row in code.c2().rows() {
            assert!(code.c1().in_span(row).unwrap());
        }
        assert_eq!(code.c2().rank(), code.c1().rank() - 1);
    }

    #[test]
    fn verify_passes_for_built_codes_and_catches_mutations() {
        for n_tilde in [4, 6] {
            let report = verify(&build_css(n_tilde).unwrap());
            assert!(report.all_passed(), "{:?}", report.items);
        }

        // Replace one Z-row by a vector anti-commuting with an X-row.
        let good = build_css(4).unwrap();
        let mut rows: Vec<BitVector> = good.z_rows().rows().cloned().collect();
        rows[0] = BitVector::from_support(6, &[0]); // Z on e_1_2 alone
        let broken = StabilizerCode::from_parts(
            4,
            BitMatrix::from_rows(rows).unwrap(),
            good.x_rows().clone(),
            good.logical_x().clone(),
            good.logical_z().clone(),
        )
        .unwrap();
        assert!(!verify(&broken).all_passed());
    }

    #[test]
    fn cws_code_sizes() {
        let cws4 = build_cws(4).unwrap();
        assert_eq!(cws4.n_vertices(), 12);
        assert_eq!(cws4.n_edges(), 18);
        let cws3 = build_cws(3).unwrap();
        assert_eq!(cws3.n_vertices(), 6);
        assert_eq!(cws3.n_edges(), 6);
        assert!(matches!(build_cws(2), Err(CodeError::TooFewDiamonds { n: 2 })));
    }

    #[test]
    fn resource_counts_at_small_sizes() {
        let four = resource_counts(4).unwrap();
        assert_eq!(four.n_tilde, 4);
        assert_eq!(four.q_css, 6);
        assert_eq!(four.q_cws, 12);
        assert_eq!(four.css_gates[&GateKind::H], 2);
        assert_eq!(four.css_gates[&GateKind::Cnot], 8);
        assert_eq!(four.cws_prep_gates[&GateKind::H], 12);
        assert_eq!(four.cws_prep_gates[&GateKind::Cz], 18);
        assert_eq!(four.cws_word_z, 12);

        // Odd counts round up to the next even vertex set for the edge code
        // but keep the true diamond count for the comparison code.
        let five = resource_counts(5).unwrap();
        assert_eq!(five.n_tilde, 6);
        assert_eq!(five.q_css, 15);
        assert_eq!(five.q_cws, 20);

        assert!(matches!(
            resource_counts(2),
            Err(CodeError::TooFewDiamonds { n: 2 })
        ));
    }
}
