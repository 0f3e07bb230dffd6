//! Directed weighted multigraphs in compressed sparse row form, the R-MAT
//! generator that produces the SSCA#2 input, and a plain-text edge list
//! format for dumping and reloading graphs.

mod io;
mod rmat;

use std::fmt;
use std::ops::Range;

pub use self::io::{read_edge_list, write_edge_list};
pub use self::rmat::{generate, generate_hub_skewed, GenConfig, DEFAULT_RMAT_PROBS};

use crate::{Error, Result, VertexId};

/// Directed graph with per-edge integer weights. Duplicate edges and
/// self-loops are allowed.
#[derive(Clone, PartialEq, Eq)]
pub struct CsrGraph {
    num_vertices: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<VertexId>,
    weights: Vec<u32>,
}

/// First broken [`CsrGraph`] invariant found by [`validate_csr`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CsrViolation {
    OffsetsLength {
        expected: usize,
        found: usize,
    },
    FirstOffsetNonzero(usize),
    DecreasingOffset {
        vertex: usize,
    },
    LastOffsetMismatch {
        last_offset: usize,
        num_edges: usize,
    },
    WeightsLength {
        expected: usize,
        found: usize,
    },
    ColumnOutOfRange {
        edge: usize,
        col: VertexId,
    },
    ZeroWeight {
        edge: usize,
    },
}

impl fmt::Display for CsrViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CsrViolation::OffsetsLength { expected, found } => {
                write!(f, "row_offsets has {found} entries, expected {expected}")
            }
            CsrViolation::FirstOffsetNonzero(v) => write!(f, "row_offsets[0] = {v}, expected 0"),
            CsrViolation::DecreasingOffset { vertex } => {
                write!(f, "row_offsets decreases at vertex {vertex}")
            }
            CsrViolation::LastOffsetMismatch {
                last_offset,
                num_edges,
            } => write!(
                f,
                "row_offsets ends at {last_offset} but there are {num_edges} edges"
            ),
            CsrViolation::WeightsLength { expected, found } => {
                write!(f, "{found} weights for {expected} edges")
            }
            CsrViolation::ColumnOutOfRange { edge, col } => {
                write!(f, "edge {edge} points at vertex {col}, out of range")
            }
            CsrViolation::ZeroWeight { edge } => write!(f, "edge {edge} has weight 0"),
        }
    }
}

impl std::error::Error for CsrViolation {}

/// Checks every CSR invariant, returning the first violation.
pub fn validate_csr(g: &CsrGraph) -> Result<(), CsrViolation> {
    let n = g.num_vertices;
    let m = g.col_indices.len();
    if g.row_offsets.len() != n + 1 {
        return Err(CsrViolation::OffsetsLength {
            expected: n + 1,
            found: g.row_offsets.len(),
        });
    }
    if g.row_offsets[0] != 0 {
        return Err(CsrViolation::FirstOffsetNonzero(g.row_offsets[0]));
    }
    if let Some(vertex) = g.row_offsets.windows(2).position(|w| w[1] < w[0]) {
        return Err(CsrViolation::DecreasingOffset { vertex });
    }
    if g.row_offsets[n] != m {
        return Err(CsrViolation::LastOffsetMismatch {
            last_offset: g.row_offsets[n],
            num_edges: m,
        });
    }
    if g.weights.len() != m {
        return Err(CsrViolation::WeightsLength {
            expected: m,
            found: g.weights.len(),
        });
    }
    if let Some(edge) = g.col_indices.iter().position(|&c| c as usize >= n) {
        return Err(CsrViolation::ColumnOutOfRange {
            edge,
            col: g.col_indices[edge],
        });
    }
    if let Some(edge) = g.weights.iter().position(|&w| w == 0) {
        return Err(CsrViolation::ZeroWeight { edge });
    }
    Ok(())
}

impl CsrGraph {
    /// Builds a graph from `(src, dst, weight)` triples. Edges leaving the
    /// same vertex keep their input order.
    pub fn from_edges(num_vertices: usize, edges: &[(VertexId, VertexId, u32)]) -> Result<Self> {
        if num_vertices > VertexId::MAX as usize {
            return Err(Error::config(format!(
                "{num_vertices} vertices do not fit a vertex id"
            )));
        }
        for (i, &(s, d, w)) in edges.iter().enumerate() {
            if s as usize >= num_vertices || d as usize >= num_vertices {
                return Err(Error::config(format!(
                    "edge {i} ({s} -> {d}) references a vertex outside 0..{num_vertices}"
                )));
            }
            if w == 0 {
                return Err(Error::config(format!("edge {i} has weight 0")));
            }
        }
        let mut row_offsets = vec![0usize; num_vertices + 1];
        for &(s, _, _) in edges {
            row_offsets[s as usize + 1] += 1;
        }
        for v in 0..num_vertices {
            row_offsets[v + 1] += row_offsets[v];
        }
        let mut cursor = row_offsets.clone();
        let mut col_indices = vec![0; edges.len()];
        let mut weights = vec![0; edges.len()];
        for &(s, d, w) in edges {
            let slot = &mut cursor[s as usize];
            col_indices[*slot] = d;
            weights[*slot] = w;
            *slot += 1;
        }
        Ok(CsrGraph {
            num_vertices,
            row_offsets,
            col_indices,
            weights,
        })
    }

    /// Unweighted convenience constructor (every weight is 1).
    pub fn from_pairs(num_vertices: usize, pairs: &[(VertexId, VertexId)]) -> Result<Self> {
        let edges: Vec<_> = pairs.iter().map(|&(s, d)| (s, d, 1)).collect();
        Self::from_edges(num_vertices, &edges)
    }

    /// Assembles a graph from raw arrays without checking them. Run
    /// [`validate_csr`] before handing the result to a kernel.
    pub fn from_raw_parts(
        num_vertices: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<VertexId>,
        weights: Vec<u32>,
    ) -> Self {
        CsrGraph {
            num_vertices,
            row_offsets,
            col_indices,
            weights,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.col_indices.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[VertexId] {
        &self.col_indices
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    #[inline]
    pub fn edge_range(&self, v: VertexId) -> Range<usize> {
        self.row_offsets[v as usize]..self.row_offsets[v as usize + 1]
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.col_indices[self.edge_range(v)]
    }

    #[inline]
    pub fn out_degree(&self, v: VertexId) -> usize {
        self.row_offsets[v as usize + 1] - self.row_offsets[v as usize]
    }

    /// All edges as `(src, dst, weight)` in CSR order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, u32)> + '_ {
        (0..self.num_vertices as VertexId).flat_map(move |v| {
            self.edge_range(v)
                .map(move |e| (v, self.col_indices[e], self.weights[e]))
        })
    }

    pub fn max_out_degree(&self) -> usize {
        (0..self.num_vertices as VertexId)
            .map(|v| self.out_degree(v))
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Debug for CsrGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CsrGraph")
            .field("num_vertices", &self.num_vertices)
            .field("num_edges", &self.num_edges())
            .finish()
    }
}
