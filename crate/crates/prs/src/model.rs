//! The planted ranked subgraph (PRS) probability model and its samplers.
//!
//! Under the null distribution each vertex pair independently carries no edge
//! with probability `1 - p` and an edge in either direction with probability
//! `p/2` each. Under the planted distribution a hidden community `S` (each
//! vertex joins independently with rate `k/n`) carries a hidden uniform
//! ranking `pi_S`, and pairs inside `S` orient their edge toward the
//! lower-ranked endpoint with probability `p(1/2 + q)`.
//!
//! Sampling is a pure function of `(params, seed)`: per-pair randomness is
//! keyed on the pair itself (canonical `i < j` order), so outputs are
//! bit-identical regardless of iteration strategy, platform, or thread count.

use crate::metrics::Ranking;
use crate::rng::{self, SplitMix64};
use std::error::Error as StdError;
use std::fmt;

/// Domain separators for keyed randomness.
const DOM_MEMBERSHIP: u64 = 1;
const DOM_RANKING: u64 = 2;
const DOM_EDGE: u64 = 3;

#[derive(Debug, PartialEq)]
pub enum ModelError {
    InvalidParams(String),
    /// `sample_planted_given` got a ranking that is not a bijection on the
    /// community.
    RankingMismatch,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::InvalidParams(msg) => write!(f, "invalid model parameters: {msg}"),
            ModelError::RankingMismatch => {
                write!(f, "ranking is not a bijection on the given community")
            }
        }
    }
}

impl StdError for ModelError {}

/// Model parameters `(n, k, p, q)`.
///
/// `k` is a real rate parameter: each vertex joins the community with
/// probability `k/n`, so `|S|` is binomial, not fixed. The log-density
/// exponents `alpha`, `beta`, `gamma` are derived views of the same numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    n: usize,
    k: f64,
    p: f64,
    q: f64,
}

impl ModelParams {
    pub fn new(n: usize, k: f64, p: f64, q: f64) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::InvalidParams("n must be positive".into()));
        }
        if !(k > 0.0 && k <= n as f64) {
            return Err(ModelError::InvalidParams(format!(
                "k must satisfy 0 < k <= n, got {k}"
            )));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(ModelError::InvalidParams(format!(
                "p must lie in [0, 1], got {p}"
            )));
        }
        if !(0.0..=0.5).contains(&q) {
            return Err(ModelError::InvalidParams(format!(
                "q must lie in [0, 1/2], got {q}"
            )));
        }
        Ok(ModelParams { n, k, p, q })
    }

    /// Build from log-density exponents: `k = n^beta`, `p = n^-gamma`,
    /// `q = n^-alpha`.
    pub fn from_exponents(n: usize, alpha: f64, beta: f64, gamma: f64) -> Result<Self, ModelError> {
        let nf = n as f64;
        ModelParams::new(n, nf.powf(beta), nf.powf(-gamma), nf.powf(-alpha))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Community rate `k/n`.
    pub fn community_rate(&self) -> f64 {
        self.k / self.n as f64
    }

    /// `alpha = -ln q / ln n`.
    pub fn alpha(&self) -> f64 {
        -self.q.ln() / (self.n as f64).ln()
    }

    /// `beta = ln k / ln n`.
    pub fn beta(&self) -> f64 {
        self.k.ln() / (self.n as f64).ln()
    }

    /// `gamma = -ln p / ln n`.
    pub fn gamma(&self) -> f64 {
        -self.p.ln() / (self.n as f64).ln()
    }
}

/// Skew-symmetric observation matrix `Y` with entries in `{-1, 0, +1}`,
/// stored dense row-major, one byte per entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedAdjacency {
    n: usize,
    entries: Vec<i8>,
}

impl DirectedAdjacency {
    pub fn zeros(n: usize) -> Self {
        DirectedAdjacency {
            n,
            entries: vec![0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.n + j]
    }

    /// Insert the directed edge `u -> v`, keeping skew-symmetry.
    #[inline]
    pub fn set_edge(&mut self, u: usize, v: usize) {
        debug_assert_ne!(u, v);
        self.entries[u * self.n + v] = 1;
        self.entries[v * self.n + u] = -1;
    }

    /// Remove any edge between `u` and `v`.
    pub fn clear_pair(&mut self, u: usize, v: usize) {
        self.entries[u * self.n + v] = 0;
        self.entries[v * self.n + u] = 0;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Net wins of vertex `i`: the row sum of `Y`.
    pub fn score(&self, i: usize) -> i64 {
        self.row(i).iter().map(|&e| e as i64).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.entries.iter().filter(|&&e| e == 1).count()
    }

    /// True when every off-diagonal pair carries exactly one directed edge.
    pub fn is_tournament(&self) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.get(i, j) == 0 {
                    return false;
                }
            }
        }
        true
    }

    /// Exact skew-symmetry check (a structural invariant; used in tests).
    pub fn is_skew_symmetric(&self) -> bool {
        for i in 0..self.n {
            if self.get(i, i) != 0 {
                return false;
            }
            for j in (i + 1)..self.n {
                if self.get(i, j) != -self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }

    /// Subgraph induced by `verts` (in the given vertex order).
    pub fn induced(&self, verts: &[usize]) -> DirectedAdjacency {
        let m = verts.len();
        let mut g = DirectedAdjacency::zeros(m);
        for (a, &i) in verts.iter().enumerate() {
            for (b, &j) in verts.iter().enumerate() {
                g.entries[a * m + b] = self.get(i, j);
            }
        }
        g
    }

    /// Relabel vertices: vertex `i` of the result is vertex `perm[i]` of
    /// `self` (conjugation by the permutation matrix of `perm`).
    pub fn relabeled(&self, perm: &[usize]) -> DirectedAdjacency {
        assert_eq!(perm.len(), self.n);
        self.induced(perm)
    }
}

/// Ground truth produced by the planted sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedInstance {
    pub params: ModelParams,
    /// Community `S`, sorted ascending.
    pub community: Vec<usize>,
    /// Hidden ranking `pi_S`, a bijection from `community` onto `1..=|S|`.
    pub ranking: Ranking,
    pub graph: DirectedAdjacency,
}

/// Orientation of one sampled pair.
#[derive(Debug, Clone, Copy, PartialEq)]
enum PairDraw {
    None,
    /// Edge from the canonical lower-index endpoint `i` to `j`.
    Forward,
    /// Edge from `j` to `i`.
    Backward,
}

/// Null draw for the unordered pair `{i, j}`, `i < j`.
#[inline]
fn draw_null_pair(p: f64, seed: u64, i: usize, j: usize) -> PairDraw {
    let u = rng::unit_f64(rng::keyed(seed, DOM_EDGE, i as u64, j as u64));
    if u < 0.5 * p {
        PairDraw::Forward
    } else if u < p {
        PairDraw::Backward
    } else {
        PairDraw::None
    }
}

/// Planted draw for an in-community pair `{i, j}`, `i < j`: the edge points
/// away from the better-ranked endpoint with probability `p(1/2 + q)`.
#[inline]
fn draw_planted_pair(
    p: f64,
    q: f64,
    seed: u64,
    i: usize,
    j: usize,
    i_ranks_higher: bool,
) -> PairDraw {
    let u = rng::unit_f64(rng::keyed(seed, DOM_EDGE, i as u64, j as u64));
    if u >= p {
        return PairDraw::None;
    }
    let toward_lower_rank = u < p * (0.5 + q);
    if toward_lower_rank == i_ranks_higher {
        PairDraw::Forward
    } else {
        PairDraw::Backward
    }
}

fn apply_draw(graph: &mut DirectedAdjacency, i: usize, j: usize, d: PairDraw) {
    match d {
        PairDraw::None => {}
        PairDraw::Forward => graph.set_edge(i, j),
        PairDraw::Backward => graph.set_edge(j, i),
    }
}

/// Sample from the null distribution. Deterministic given `seed`.
pub fn sample_null(params: &ModelParams, seed: u64) -> DirectedAdjacency {
    let n = params.n();
    let mut graph = DirectedAdjacency::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            apply_draw(&mut graph, i, j, draw_null_pair(params.p(), seed, i, j));
        }
    }
    graph
}

/// Sample from the planted distribution. Deterministic given `seed`.
pub fn sample_planted(params: &ModelParams, seed: u64) -> PlantedInstance {
    let n = params.n();
    let rate = params.community_rate();
    let community: Vec<usize> = (0..n)
        .filter(|&v| rng::unit_f64(rng::keyed(seed, DOM_MEMBERSHIP, v as u64, 0)) < rate)
        .collect();
    let mut order = community.clone();
    let mut shuffler = SplitMix64::new(rng::keyed(seed, DOM_RANKING, 0, 0));
    shuffler.shuffle(&mut order);
    let ranking = Ranking::from_order(order).expect("community vertices are distinct");
    fill_edges(params, &community, &ranking, seed)
}

/// Sample edges only, with the community and ranking fixed by the caller.
pub fn sample_planted_given(
    params: &ModelParams,
    community: &[usize],
    ranking: &Ranking,
    seed: u64,
) -> Result<PlantedInstance, ModelError> {
    let mut sorted = community.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != community.len() || sorted.iter().any(|&v| v >= params.n()) {
        return Err(ModelError::RankingMismatch);
    }
    if ranking.len() != sorted.len() || sorted.iter().any(|&v| !ranking.contains(v)) {
        return Err(ModelError::RankingMismatch);
    }
    Ok(fill_edges(params, &sorted, ranking, seed))
}

fn fill_edges(
    params: &ModelParams,
    community: &[usize],
    ranking: &Ranking,
    seed: u64,
) -> PlantedInstance {
    let n = params.n();
    // Dense rank table: usize::MAX marks non-members.
    let mut rank = vec![usize::MAX; n];
    for &v in community {
        rank[v] = ranking.rank_of(v).expect("ranking covers the community");
    }
    let mut graph = DirectedAdjacency::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = if rank[i] != usize::MAX && rank[j] != usize::MAX {
                draw_planted_pair(params.p(), params.q(), seed, i, j, rank[i] < rank[j])
            } else {
                draw_null_pair(params.p(), seed, i, j)
            };
            apply_draw(&mut graph, i, j, d);
        }
    }
    PlantedInstance {
        params: *params,
        community: community.to_vec(),
        ranking: ranking.clone(),
        graph,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(10, 5.0, 0.5, 0.25).is_ok());
        assert!(ModelParams::new(0, 1.0, 0.5, 0.25).is_err());
        assert!(ModelParams::new(10, 0.0, 0.5, 0.25).is_err());
        assert!(ModelParams::new(10, 11.0, 0.5, 0.25).is_err());
        assert!(ModelParams::new(10, 5.0, 1.5, 0.25).is_err());
        assert!(ModelParams::new(10, 5.0, 0.5, 0.75).is_err());
    }

    #[test]
    fn exponents_round_trip() {
        let n = 1000;
        let (alpha, beta, gamma) = (0.6, 0.7, 0.3);
        let params = ModelParams::from_exponents(n, alpha, beta, gamma).unwrap();
        assert!((params.alpha() - alpha).abs() < 1e-12);
        assert!((params.beta() - beta).abs() < 1e-12);
        assert!((params.gamma() - gamma).abs() < 1e-12);
        let nf = n as f64;
        assert!((params.k() - nf.powf(beta)).abs() < 1e-9);
    }

    #[test]
    fn null_p_zero_is_empty_and_p_one_is_tournament() {
        let empty = sample_null(&ModelParams::new(30, 1.0, 0.0, 0.0).unwrap(), 99);
        assert_eq!(empty.edge_count(), 0);
        let full = sample_null(&ModelParams::new(50, 1.0, 1.0, 0.0).unwrap(), 99);
        assert!(full.is_tournament());
        assert!(full.is_skew_symmetric());
    }

    #[test]
    fn same_seed_same_output() {
        let params = ModelParams::new(60, 12.0, 0.7, 0.3).unwrap();
        assert_eq!(sample_null(&params, 5), sample_null(&params, 5));
        let a = sample_planted(&params, 5);
        let b = sample_planted(&params, 5);
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.community, b.community);
        assert_eq!(a.ranking, b.ranking);
        assert_ne!(
            sample_planted(&params, 5).graph,
            sample_planted(&params, 6).graph
        );
    }

    #[test]
    fn sampled_graphs_are_skew_symmetric() {
        let params = ModelParams::new(40, 10.0, 0.6, 0.4).unwrap();
        for seed in 0..20 {
            assert!(sample_null(&params, seed).is_skew_symmetric());
            let inst = sample_planted(&params, seed);
            assert!(inst.graph.is_skew_symmetric());
            // Ranking is a bijection on the community.
            assert_eq!(inst.ranking.len(), inst.community.len());
            for &v in &inst.community {
                assert!(inst.ranking.contains(v));
            }
        }
    }

    #[test]
    fn null_edge_density_matches_p() {
        // Forgetting directions yields an Erdos-Renyi graph with rate p.
        let n = 2000;
        let p = 0.37;
        let params = ModelParams::new(n, 1.0, p, 0.0).unwrap();
        let g = sample_null(&params, 31337);
        let pairs = (n * (n - 1) / 2) as f64;
        let density = g.edge_count() as f64 / pairs;
        let tol = 4.0 * (p / pairs).sqrt();
        assert!(
            (density - p).abs() <= tol,
            "density {density} vs p {p} (tol {tol})"
        );
    }

    #[test]
    fn null_orientations_are_balanced() {
        let n = 2000;
        let params = ModelParams::new(n, 1.0, 0.5, 0.0).unwrap();
        let g = sample_null(&params, 4242);
        let mut forward = 0u64;
        let mut present = 0u64;
        for i in 0..n {
            for j in (i + 1)..n {
                match g.get(i, j) {
                    1 => {
                        forward += 1;
                        present += 1;
                    }
                    -1 => present += 1,
                    _ => {}
                }
            }
        }
        let frac = forward as f64 / present as f64;
        assert!((frac - 0.5).abs() < 0.01, "forward fraction {frac}");
    }

    #[test]
    fn community_size_is_binomial_with_mean_k() {
        let params = ModelParams::new(400, 80.0, 0.5, 0.25).unwrap();
        let trials = 400;
        let mean = (0..trials)
            .map(|s| sample_planted(&params, s as u64).community.len() as f64)
            .sum::<f64>()
            / trials as f64;
        let tol = 3.0 * params.k().sqrt() / (trials as f64).sqrt();
        assert!((mean - params.k()).abs() <= tol, "mean {mean} tol {tol}");
    }

    #[test]
    fn planted_extreme_is_acyclic_tournament_of_ranking() {
        // p=1, q=1/2, k=n: the tournament is exactly the ranking's order.
        let params = ModelParams::new(25, 25.0, 1.0, 0.5).unwrap();
        let inst = sample_planted(&params, 7);
        assert_eq!(inst.community.len(), 25);
        for i in 0..25 {
            for j in (i + 1)..25 {
                let expect = inst.ranking.pair_sign(i, j) as i8;
                assert_eq!(inst.graph.get(i, j), expect);
            }
        }
    }

    #[test]
    fn planted_given_empty_community_matches_null() {
        let params = ModelParams::new(30, 5.0, 0.6, 0.4).unwrap();
        let inst = sample_planted_given(&params, &[], &Ranking::empty(), 11).unwrap();
        assert_eq!(inst.graph, sample_null(&params, 11));
    }

    #[test]
    fn planted_given_forced_edge() {
        let params = ModelParams::new(4, 2.0, 1.0, 0.5).unwrap();
        let ranking = Ranking::from_order(vec![1, 2]).unwrap();
        for seed in 0..50 {
            let inst = sample_planted_given(&params, &[1, 2], &ranking, seed).unwrap();
            assert_eq!(inst.graph.get(1, 2), 1);
        }
    }

    #[test]
    fn planted_given_rejects_bad_ranking() {
        let params = ModelParams::new(10, 3.0, 1.0, 0.5).unwrap();
        let ranking = Ranking::from_order(vec![1, 2]).unwrap();
        assert_eq!(
            sample_planted_given(&params, &[1, 2, 3], &ranking, 0),
            Err(ModelError::RankingMismatch)
        );
        let off_support = Ranking::from_order(vec![1, 4]).unwrap();
        assert_eq!(
            sample_planted_given(&params, &[1, 2], &off_support, 0),
            Err(ModelError::RankingMismatch)
        );
    }

    #[test]
    fn planted_given_full_community_mean_matches_bias() {
        // With S = [n], identity ranking, p = 1: E[Y_ij] = 2q for i < j.
        let n = 200;
        let q = 0.1;
        let params = ModelParams::new(n, n as f64, 1.0, q).unwrap();
        let ranking = Ranking::identity(n);
        let community: Vec<usize> = (0..n).collect();
        let trials = 4000;
        // Sample 20 fixed entries.
        let entries: Vec<(usize, usize)> = (0..20).map(|t| (t, 3 * t + 7)).collect();
        let mut sums = vec![0f64; entries.len()];
        for seed in 0..trials {
            let inst = sample_planted_given(&params, &community, &ranking, seed as u64).unwrap();
            for (idx, &(i, j)) in entries.iter().enumerate() {
                sums[idx] += inst.graph.get(i, j) as f64;
            }
        }
        let sigma = (1.0f64 - 4.0 * q * q).sqrt() / (trials as f64).sqrt();
        for (idx, &(i, j)) in entries.iter().enumerate() {
            let mean = sums[idx] / trials as f64;
            assert!(
                (mean - 2.0 * q).abs() <= 3.0 * sigma,
                "entry ({i},{j}): mean {mean}, expected {} +/- {}",
                2.0 * q,
                3.0 * sigma
            );
        }
    }

    #[test]
    fn planted_q_zero_pair_frequencies_match_null() {
        // q = 0 removes the bias: per-pair orientation frequencies agree with
        // the null within 3 sigma on a sample of pairs.
        let n = 200;
        let params = ModelParams::new(n, 60.0, 0.6, 0.0).unwrap();
        let trials = 2000u64;
        let pairs: Vec<(usize, usize)> = vec![(0, 1), (5, 9), (17, 103), (50, 51)];
        let mut forward = vec![0u32; pairs.len()];
        for seed in 0..trials {
            let inst = sample_planted(&params, seed);
            for (idx, &(i, j)) in pairs.iter().enumerate() {
                if inst.graph.get(i, j) == 1 {
                    forward[idx] += 1;
                }
            }
        }
        let expect = 0.5 * params.p();
        let sigma = (expect * (1.0 - expect) / trials as f64).sqrt();
        for (idx, &(i, j)) in pairs.iter().enumerate() {
            let freq = forward[idx] as f64 / trials as f64;
            assert!(
                (freq - expect).abs() <= 3.0 * sigma,
                "pair ({i},{j}): forward freq {freq} vs {expect}"
            );
        }
    }

    #[test]
    fn induced_and_relabeled_agree() {
        let params = ModelParams::new(12, 6.0, 0.8, 0.3).unwrap();
        let g = sample_planted(&params, 3).graph;
        let verts = vec![11, 0, 7, 3];
        let h = g.induced(&verts);
        for (a, &i) in verts.iter().enumerate() {
            for (b, &j) in verts.iter().enumerate() {
                assert_eq!(h.get(a, b), g.get(i, j));
            }
        }
        assert!(h.is_skew_symmetric());
    }
}
