use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CsrGraph;
use crate::{Error, Result, VertexId};

/// Quadrant probabilities `(a, b, c, d)` used by SSCA#2.
pub const DEFAULT_RMAT_PROBS: [f64; 4] = [0.55, 0.1, 0.1, 0.25];

/// R-MAT generator settings.
///
/// Randomness comes from ChaCha8 seeded with `seed`; the same config always
/// yields the same graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    /// `|V| = 2^scale`.
    pub scale: u32,
    /// `|E| = edge_factor * 2^scale`.
    pub edge_factor: usize,
    pub seed: u64,
    pub rmat_probs: [f64; 4],
    /// Relabel vertices with a random permutation after sampling.
    pub permute_vertices: bool,
}

impl GenConfig {
    pub fn new(scale: u32) -> Self {
        GenConfig {
            scale,
            edge_factor: 8,
            seed: 1,
            rmat_probs: DEFAULT_RMAT_PROBS,
            permute_vertices: false,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn edge_factor(mut self, edge_factor: usize) -> Self {
        self.edge_factor = edge_factor;
        self
    }

    pub fn probs(mut self, rmat_probs: [f64; 4]) -> Self {
        self.rmat_probs = rmat_probs;
        self
    }

    pub fn num_vertices(&self) -> usize {
        1usize << self.scale
    }

    pub fn num_edges(&self) -> usize {
        self.edge_factor << self.scale
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=30).contains(&self.scale) {
            return Err(Error::config(format!(
                "scale {} outside 1..=30",
                self.scale
            )));
        }
        if self.edge_factor == 0 {
            return Err(Error::config("edge factor must be at least 1"));
        }
        if self.rmat_probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::config("R-MAT probabilities must lie in [0, 1]"));
        }
        let sum: f64 = self.rmat_probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::config(format!(
                "R-MAT probabilities sum to {sum}, not 1"
            )));
        }
        Ok(())
    }
}

/// Samples `edge_factor * 2^scale` R-MAT edges with weights uniform in
/// `[1, 2^scale]` and builds the CSR graph.
pub fn generate(cfg: &GenConfig) -> Result<CsrGraph> {
    let edges = sample_edges(cfg)?;
    CsrGraph::from_edges(cfg.num_vertices(), &edges)
}

/// Like [`generate`], but rewires the first `ceil(hub_share * |E|)` sampled
/// edges to leave vertex 0, making it a hub. `|E|` is unchanged.
pub fn generate_hub_skewed(cfg: &GenConfig, hub_share: f64) -> Result<CsrGraph> {
    if !(0.0..=1.0).contains(&hub_share) {
        return Err(Error::config(format!(
            "hub share {hub_share} outside [0, 1]"
        )));
    }
    let mut edges = sample_edges(cfg)?;
    let hub_edges = (hub_share * edges.len() as f64).ceil() as usize;
    for e in edges.iter_mut().take(hub_edges) {
        e.0 = 0;
    }
    CsrGraph::from_edges(cfg.num_vertices(), &edges)
}

fn sample_edges(cfg: &GenConfig) -> Result<Vec<(VertexId, VertexId, u32)>> {
    cfg.validate()?;
    let m = cfg.num_edges();
    let mut edges = Vec::new();
    edges.try_reserve_exact(m).map_err(|_| Error::Alloc {
        what: "edge list",
        bytes: m.saturating_mul(12),
    })?;

    let [a, b, c, _] = cfg.rmat_probs;
    let (ab, abc) = (a + b, a + b + c);
    let max_weight = 1u32 << cfg.scale;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..m {
        let (mut src, mut dst) = (0u32, 0u32);
        for _ in 0..cfg.scale {
            let r: f64 = rng.gen();
            let (sbit, dbit) = if r < a {
                (0, 0)
            } else if r < ab {
                (0, 1)
            } else if r < abc {
                (1, 0)
            } else {
                (1, 1)
            };
            src = (src << 1) | sbit;
            dst = (dst << 1) | dbit;
        }
        let weight = rng.gen_range(1..=max_weight);
        edges.push((src, dst, weight));
    }

    if cfg.permute_vertices {
        let mut perm: Vec<VertexId> = (0..cfg.num_vertices() as VertexId).collect();
        perm.shuffle(&mut rng);
        for e in edges.iter_mut() {
            e.0 = perm[e.0 as usize];
            e.1 = perm[e.1 as usize];
        }
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_csr;

    #[test]
    fn scale_one_has_sixteen_edges() {
        let g = generate(&GenConfig::new(1)).unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.num_edges(), 16);
        assert_eq!(validate_csr(&g), Ok(()));
    }

    #[test]
    fn deterministic_under_seed() {
        let cfg = GenConfig::new(8).seed(42);
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
        assert_ne!(
            generate(&cfg).unwrap(),
            generate(&cfg.clone().seed(43)).unwrap()
        );
    }

    #[test]
    fn weights_in_range() {
        let g = generate(&GenConfig::new(7).seed(3)).unwrap();
        assert!(g.weights().iter().all(|&w| (1..=128).contains(&w)));
        assert_eq!(g.num_edges(), 8 * 128);
    }

    #[test]
    fn degree_distribution_is_skewed() {
        // A uniform graph at this size tops out near 2x the mean.
        let mut ratios: Vec<f64> = (0..20)
            .map(|seed| {
                let g = generate(&GenConfig::new(6).seed(seed)).unwrap();
                let mean = g.num_edges() as f64 / g.num_vertices() as f64;
                g.max_out_degree() as f64 / mean
            })
            .collect();
        assert!(ratios.iter().all(|&r| r >= 3.0), "{ratios:?}");
        ratios.sort_by(f64::total_cmp);
        assert!(ratios[ratios.len() / 2] >= 4.0, "{ratios:?}");
    }

    #[test]
    fn permutation_preserves_counts() {
        let mut cfg = GenConfig::new(6).seed(9);
        cfg.permute_vertices = true;
        let g = generate(&cfg).unwrap();
        assert_eq!(validate_csr(&g), Ok(()));
        assert_eq!(g.num_edges(), 8 * 64);
    }

    #[test]
    fn hub_gets_its_share() {
        let g = generate_hub_skewed(&GenConfig::new(8).seed(5), 0.3).unwrap();
        assert_eq!(g.num_edges(), 8 * 256);
        assert!(g.out_degree(0) * 4 >= g.num_edges());
    }

    #[test]
    fn rejects_bad_probs() {
        assert!(generate(&GenConfig::new(4).probs([0.5, 0.5, 0.5, 0.0])).is_err());
        assert!(generate(&GenConfig::new(0)).is_err());
        assert!(generate(&GenConfig::new(4).edge_factor(0)).is_err());
    }
}
