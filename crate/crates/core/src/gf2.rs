//! GF(2) linear algebra on bit-packed vectors, plus edge indexing for K_n.
//!
//! Everything downstream identifies qubits with edges of a complete graph.
//! The canonical edge order is row-major over vertex pairs
//! (1,2),(1,3),...,(1,n),(2,3),...,(n-1,n); [`EdgeIndexMap`] fixes that
//! bijection once and all circuits and golden files depend on it.
//! Vertices are 1-based externally, matching the usual labelling of graph
//! vertices; positions inside vectors are 0-based.

use std::fmt;
use std::ops::BitXor;

use thiserror::Error;

/// Errors from GF(2) and edge-index operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    /// Two operands (or a vector and a matrix) disagree in length.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    /// Vertex pair does not name an edge of K_n.
    #[error("invalid edge ({i},{j}) on {n} vertices")]
    InvalidEdge { i: usize, j: usize, n: usize },
    /// Complete graphs need at least two vertices to have an edge set.
    #[error("need at least 2 vertices, got {n}")]
    TooFewVertices { n: usize },
    /// Edge position is outside [0, C(n,2)).
    #[error("edge position {pos} out of range for {n} vertices")]
    EdgeOutOfRange { pos: usize, n: usize },
    /// Rows of a matrix must share one length.
    #[error("ragged rows: expected length {expected}, got {got}")]
    RaggedRows { expected: usize, got: usize },
}

const WORD_BITS: usize = 64;

/// Dense GF(2) vector packed into 64-bit words.
///
/// Unused high bits of the last word are kept zero, so word-level
/// XOR/AND/popcount kernels never see stale data.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    /// All-zero vector of the given length.
    pub fn zeros(len: usize) -> Self {
        let n_words = len.div_ceil(WORD_BITS);
        BitVector {
            words: vec![0; n_words],
            len,
        }
    }

    /// Vector with ones exactly at `support` (0-based positions).
    ///
    /// Panics if a position is out of range; support sets are produced by
    /// internal enumeration, not user input.
    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &pos in support {
            v.set(pos, true);
        }
        v
    }

    /// Length in bits.
    pub fn len(&self) -> usize {
        self.len
    }

    /// True when the length is zero.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit at `pos`.
    pub fn get(&self, pos: usize) -> bool {
        assert!(pos < self.len, "bit {pos} out of range {}", self.len);
        self.words[pos / WORD_BITS] >> (pos % WORD_BITS) & 1 == 1
    }

    /// Sets bit at `pos`.
    pub fn set(&mut self, pos: usize, value: bool) {
        assert!(pos < self.len, "bit {pos} out of range {}", self.len);
        let mask = 1u64 << (pos % WORD_BITS);
        if value {
            self.words[pos / WORD_BITS] |= mask;
        } else {
            self.words[pos / WORD_BITS] &= !mask;
        }
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// True iff every bit is zero.
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// 0-based positions of the ones, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (wi, &w) in self.words.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                out.push(wi * WORD_BITS + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }

    /// Position of the lowest set bit, if any.
    pub fn first_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// In-place XOR. Lengths must match; a mismatch is a construction bug.
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of mismatched lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Inner product Σ u_i v_i mod 2.
    pub fn dot(&self, other: &BitVector) -> Result<bool, Gf2Error> {
        if self.len != other.len {
            return Err(Gf2Error::DimensionMismatch {
                left: self.len,
                right: other.len,
            });
        }
        let parity: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            & 1;
        Ok(parity == 1)
    }

    /// Bits as a 0/1 string, position 0 first.
    pub fn to_01_string(&self) -> String {
        (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }

    /// The subvector at the given positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> BitVector {
        let mut out = BitVector::zeros(positions.len());
        for (k, &pos) in positions.iter().enumerate() {
            out.set(k, self.get(pos));
        }
        out
    }

    /// Embeds `self` into a vector of length `len`, placing bit k of `self`
    /// at `positions[k]` and zeros elsewhere.
    pub fn scatter(&self, len: usize, positions: &[usize]) -> BitVector {
        assert_eq!(self.len, positions.len(), "scatter needs one position per bit");
        let mut out = BitVector::zeros(len);
        for (k, &pos) in positions.iter().enumerate() {
            if self.get(k) {
                out.set(pos, true);
            }
        }
        out
    }
}

impl BitXor for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(rhs);
        out
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({})", self.to_01_string())
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_01_string())
    }
}

/// Row-list GF(2) matrix; all rows share one length.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<BitVector>,
    n_cols: usize,
}

impl BitMatrix {
    /// Matrix with zero rows and the given column count.
    pub fn new(n_cols: usize) -> Self {
        BitMatrix {
            rows: Vec::new(),
            n_cols,
        }
    }

    /// Builds from rows; they must all have the same length.
    pub fn from_rows(rows: Vec<BitVector>) -> Result<Self, Gf2Error> {
        let n_cols = rows.first().map_or(0, BitVector::len);
        for row in &rows {
            if row.len() != n_cols {
                return Err(Gf2Error::RaggedRows {
                    expected: n_cols,
                    got: row.len(),
                });
            }
        }
        Ok(BitMatrix { rows, n_cols })
    }

    /// Identity matrix of size n.
    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| BitVector::from_support(n, &[i])).collect();
        BitMatrix { rows, n_cols: n }
    }

    /// Appends a row of matching length.
    pub fn push_row(&mut self, row: BitVector) -> Result<(), Gf2Error> {
        if row.len() != self.n_cols {
            return Err(Gf2Error::RaggedRows {
                expected: self.n_cols,
                got: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> impl Iterator<Item = &BitVector> {
        self.rows.iter()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    /// Rows of `self` followed by rows of `other`; column counts must match
    /// (an empty matrix adopts the other's width).
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.n_rows() == 0 {
            return Ok(other.clone());
        }
        if other.n_rows() == 0 {
            return Ok(self.clone());
        }
        if self.n_cols != other.n_cols {
            return Err(Gf2Error::DimensionMismatch {
                left: self.n_cols,
                right: other.n_cols,
            });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(BitMatrix {
            rows,
            n_cols: self.n_cols,
        })
    }

    /// Reduced row echelon form: (nonzero reduced rows, their pivot columns).
    /// Pivot columns are strictly increasing; every pivot column has a single
    /// one across the returned rows.
    fn rref(&self) -> (Vec<BitVector>, Vec<usize>) {
        let mut rows: Vec<BitVector> = self.rows.iter().filter(|r| !r.is_zero()).cloned().collect();
        let mut pivots = Vec::new();
        let mut done = 0;
        for col in 0..self.n_cols {
            let Some(pick) = (done..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(done, pick);
            let pivot_row = rows[done].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != done && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            done += 1;
            if done == rows.len() {
                break;
            }
        }
        rows.truncate(done);
        (rows, pivots)
    }

    /// GF(2) row rank via Gaussian elimination.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// True iff `v` is a GF(2) linear combination of the rows.
    pub fn in_span(&self, v: &BitVector) -> Result<bool, Gf2Error> {
        if v.len() != self.n_cols {
            return Err(Gf2Error::DimensionMismatch {
                left: v.len(),
                right: self.n_cols,
            });
        }
        let (rows, pivots) = self.rref();
        let mut residual = v.clone();
        for (row, &p) in rows.iter().zip(&pivots) {
            if residual.get(p) {
                residual.xor_assign(row);
            }
        }
        Ok(residual.is_zero())
    }

    /// The submatrix keeping only the given columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> BitMatrix {
        BitMatrix {
            rows: self.rows.iter().map(|r| r.select(columns)).collect(),
            n_cols: columns.len(),
        }
    }

    /// Basis of {v : Mv = 0}; every returned row has zero dot with every row
    /// of `self`, and there are exactly n_cols − rank of them.
    pub fn kernel(&self) -> BitMatrix {
        let (rows, pivots) = self.rref();
        let mut basis = Vec::with_capacity(self.n_cols - pivots.len());
        let mut is_pivot = vec![false; self.n_cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for free in (0..self.n_cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVector::zeros(self.n_cols);
            v.set(free, true);
            for (row, &p) in rows.iter().zip(&pivots) {
                if row.get(free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        BitMatrix {
            rows: basis,
            n_cols: self.n_cols,
        }
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.n_rows(), self.n_cols)?;
        for row in &self.rows {
            writeln!(f, "  {}", row.to_01_string())?;
        }
        write!(f, "]")
    }
}

/// Bijection between unordered vertex pairs of K_n and positions
/// [0, C(n,2)) in row-major order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeIndexMap {
    n: usize,
}

impl EdgeIndexMap {
    pub fn new(n: usize) -> Result<Self, Gf2Error> {
        if n < 2 {
            return Err(Gf2Error::TooFewVertices { n });
        }
        Ok(EdgeIndexMap { n })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    /// C(n,2).
    pub fn n_edges(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// Canonical position of edge {i,j}; symmetric in its arguments.
    pub fn index(&self, i: usize, j: usize) -> Result<usize, Gf2Error> {
        if i == j || i < 1 || j < 1 || i > self.n || j > self.n {
            return Err(Gf2Error::InvalidEdge { i, j, n: self.n });
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        Ok((a - 1) * (2 * self.n - a) / 2 + (b - a - 1))
    }

    /// Inverse of [`Self::index`]: the pair (i, j) with i < j.
    pub fn endpoints(&self, pos: usize) -> Result<(usize, usize), Gf2Error> {
        if pos >= self.n_edges() {
            return Err(Gf2Error::EdgeOutOfRange { pos, n: self.n });
        }
        let mut rest = pos;
        let mut i = 1;
        while rest >= self.n - i {
            rest -= self.n - i;
            i += 1;
        }
        Ok((i, i + 1 + rest))
    }

    /// All edges in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.n).flat_map(move |i| (i + 1..=self.n).map(move |j| (i, j)))
    }

    /// Unit vector e_ij of length C(n,2).
    pub fn basis_vector(&self, i: usize, j: usize) -> Result<BitVector, Gf2Error> {
        let pos = self.index(i, j)?;
        Ok(BitVector::from_support(self.n_edges(), &[pos]))
    }

    /// Text label "e_i_j" for the edge at `pos`.
    pub fn label(&self, pos: usize) -> Result<String, Gf2Error> {
        let (i, j) = self.endpoints(pos)?;
        Ok(format!("e_{i}_{j}"))
    }
}

/// Canonical position of edge {i,j} in K_n; see [`EdgeIndexMap::index`].
pub fn edge_index(i: usize, j: usize, n: usize) -> Result<usize, Gf2Error> {
    EdgeIndexMap::new(n)?.index(i, j)
}
