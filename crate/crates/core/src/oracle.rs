//! Slow reference implementations.
//!
//! Nothing here shares code with the fast kernels. [`bc_bruteforce`] counts
//! shortest paths through each vertex pair by pair; [`brandes_reference`] is
//! a plain single-threaded Brandes accumulation. They check each other and
//! both check [`crate::bc::compute_bc`].

use std::collections::VecDeque;

use crate::bc::EdgeFilter;
use crate::gf2_stream::Gf2Stream;
use crate::graph::CsrGraph;
use crate::gups::{table_index, UpdateTable};
use crate::{Error, Result, VertexId};

/// Largest graph the oracles accept.
pub const ORACLE_VERTEX_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub bc_exact: Vec<f64>,
    /// `sigma_table[i][t]`: shortest paths from `sources[i]` to `t`.
    pub sigma_table: Vec<Vec<u64>>,
    /// `distance_table[i][t]`: hop distance from `sources[i]` to `t`, or -1.
    pub distance_table: Vec<Vec<i64>>,
}

fn guard(g: &CsrGraph) -> Result<()> {
    if g.num_vertices() > ORACLE_VERTEX_LIMIT {
        return Err(Error::OracleGuard {
            vertices: g.num_vertices(),
            limit: ORACLE_VERTEX_LIMIT,
        });
    }
    Ok(())
}

/// Distances and path counts from `s`, one queue, no predecessor lists.
fn distances_and_counts(
    g: &CsrGraph,
    s: usize,
    filter: EdgeFilter,
) -> Result<(Vec<i64>, Vec<u64>)> {
    let n = g.num_vertices();
    let mut dist = vec![-1i64; n];
    let mut count = vec![0u64; n];
    dist[s] = 0;
    count[s] = 1;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        let lo = g.row_offsets()[u];
        let hi = g.row_offsets()[u + 1];
        for e in lo..hi {
            if !filter.accepts(g.weights()[e]) {
                continue;
            }
            let w = g.col_indices()[e] as usize;
            if dist[w] == -1 {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[u] + 1 {
                count[w] = count[w].checked_add(count[u]).ok_or(Error::SigmaOverflow {
                    source_vertex: s as VertexId,
                })?;
            }
        }
    }
    Ok((dist, count))
}

/// Betweenness by direct pair counting: for each source `s`, target `t` and
/// intermediate `v`, a shortest `s -> t` path runs through `v` exactly when
/// `d(s,v) + d(v,t) = d(s,t)`, and there are `sigma(s,v) * sigma(v,t)` of
/// them. Sums `sigma_st(v) / sigma_st` over `s` in `sources`.
pub fn bc_bruteforce(
    g: &CsrGraph,
    sources: &[VertexId],
    filter: EdgeFilter,
) -> Result<OracleResult> {
    guard(g)?;
    let n = g.num_vertices();
    let all: Vec<(Vec<i64>, Vec<u64>)> = (0..n)
        .map(|u| distances_and_counts(g, u, filter))
        .collect::<Result<_>>()?;

    let mut bc = vec![0.0f64; n];
    let mut sigma_table = Vec::with_capacity(sources.len());
    let mut distance_table = Vec::with_capacity(sources.len());
    for &s in sources {
        let s = s as usize;
        let (ds, cs) = &all[s];
        for v in 0..n {
            if v == s || ds[v] < 0 {
                continue;
            }
            let (dv, cv) = &all[v];
            let mut through_v = 0.0;
            for t in 0..n {
                if t == s || t == v || ds[t] < 0 || dv[t] < 0 {
                    continue;
                }
                if ds[v] + dv[t] == ds[t] {
                    let paths = cs[v] as u128 * cv[t] as u128;
                    through_v += paths as f64 / cs[t] as f64;
                }
            }
            bc[v] += through_v;
        }
        sigma_table.push(cs.clone());
        distance_table.push(ds.clone());
    }
    Ok(OracleResult {
        bc_exact: bc,
        sigma_table,
        distance_table,
    })
}

/// Textbook Brandes over adjacency lists: queue BFS with predecessor lists,
/// then pop the stack and accumulate dependencies.
pub fn brandes_reference(
    g: &CsrGraph,
    sources: &[VertexId],
    filter: EdgeFilter,
) -> Result<Vec<f64>> {
    guard(g)?;
    let n = g.num_vertices();
    let adjacency: Vec<Vec<usize>> = (0..n)
        .map(|u| {
            (g.row_offsets()[u]..g.row_offsets()[u + 1])
                .filter(|&e| filter.accepts(g.weights()[e]))
                .map(|e| g.col_indices()[e] as usize)
                .collect()
        })
        .collect();

    let mut bc = vec![0.0; n];
    for &s in sources {
        let s = s as usize;
        let mut stack = Vec::new();
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0u64; n];
        let mut dist = vec![-1i64; n];
        sigma[s] = 1;
        dist[s] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in &adjacency[v] {
                if dist[w] < 0 {
                    queue.push_back(w);
                    dist[w] = dist[v] + 1;
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] = sigma[w].checked_add(sigma[v]).ok_or(Error::SigmaOverflow {
                        source_vertex: s as VertexId,
                    })?;
                    pred[w].push(v);
                }
            }
        }
        let mut delta = vec![0.0; n];
        while let Some(w) = stack.pop() {
            for &v in &pred[w] {
                delta[v] += sigma[v] as f64 / sigma[w] as f64 * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    Ok(bc)
}

/// Lossless sequential GUPS: the first `stream_len` stream values applied in
/// order to a fresh table.
pub fn gups_replay(n: u32, stream_len: u64) -> UpdateTable {
    let mut table: Vec<u64> = (0..1u64 << n).collect();
    let mut stream = Gf2Stream::new();
    for _ in 0..stream_len {
        let a = stream.next();
        table[table_index(a, n)] ^= a;
    }
    UpdateTable::from_values(n, table)
}

/// `|a - b| <= rel * max(|a|, |b|)`. Two zeros compare equal.
pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}
