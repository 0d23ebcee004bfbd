//! Recovery algorithms: Ranking By Wins, spectral community-and-ranking
//! recovery, exact brute-force search, ordered-clique recovery, and the
//! bitmask dynamic program that maximizes edge agreement over orderings of a
//! small vertex set.

use crate::metrics::{Ranking, RankingEstimate};
use crate::model::DirectedAdjacency;
use crate::spectral::{self, ComplexVector, EigenError, PowerOpts};
use std::error::Error as StdError;
use std::fmt;

#[derive(Debug)]
pub enum RecoverError {
    Eigen(EigenError),
    /// The refined vertex set induces a cyclic tournament; the algorithm
    /// declares failure rather than emit a non-ordering.
    CyclicRefinedSet,
    /// No guessed subset produced an acyclic candidate.
    NoAcyclicCandidate,
    /// The input must be a tournament (every pair carries an edge).
    NotTournament,
    TooLarge {
        what: &'static str,
        cap: usize,
        got: usize,
    },
    BadInput(String),
}

impl fmt::Display for RecoverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecoverError::Eigen(e) => write!(f, "eigensolver failure: {e}"),
            RecoverError::CyclicRefinedSet => {
                write!(f, "refined vertex set induces a cyclic tournament")
            }
            RecoverError::NoAcyclicCandidate => {
                write!(f, "no guessed subset produced an acyclic candidate")
            }
            RecoverError::NotTournament => write!(f, "input graph is not a tournament"),
            RecoverError::TooLarge { what, cap, got } => {
                write!(f, "{what} too large: {got} > {cap}")
            }
            RecoverError::BadInput(msg) => write!(f, "{msg}"),
        }
    }
}

impl StdError for RecoverError {}

impl From<EigenError> for RecoverError {
    fn from(e: EigenError) -> Self {
        RecoverError::Eigen(e)
    }
}

/// Net-win scores `s_i = sum_k Y_ik`; they sum to zero by skew-symmetry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreVector {
    pub scores: Vec<i64>,
}

pub fn scores(graph: &DirectedAdjacency) -> ScoreVector {
    ScoreVector {
        scores: (0..graph.n()).map(|i| graph.score(i)).collect(),
    }
}

/// Rank all vertices by descending score; on ties the smaller vertex index
/// is ranked below the larger.
pub fn ranking_by_wins(graph: &DirectedAdjacency) -> Ranking {
    let s = scores(graph).scores;
    let mut order: Vec<usize> = (0..graph.n()).collect();
    order.sort_by(|&a, &b| s[b].cmp(&s[a]).then(b.cmp(&a)));
    Ranking::from_order(order).expect("vertex indices are distinct")
}

/// Polar view of an eigenvector on a support set: each selected coordinate
/// `v_i` is multiplied by the conjugated coordinate sum over the support,
/// which cancels the arbitrary global phase; angles then carry the order.
#[derive(Debug, Clone)]
pub struct AngularEmbedding {
    pub support: Vec<usize>,
    pub magnitudes: Vec<f64>,
    pub angles: Vec<f64>,
}

pub fn angular_embedding(v: &ComplexVector, support: &[usize]) -> AngularEmbedding {
    let (mut xre, mut xim) = (0.0f64, 0.0f64);
    for &i in support {
        xre += v.re[i];
        xim += v.im[i];
    }
    let mut magnitudes = Vec::with_capacity(support.len());
    let mut angles = Vec::with_capacity(support.len());
    for &i in support {
        // s_i = v_i * conj(x).
        let re = v.re[i] * xre + v.im[i] * xim;
        let im = v.im[i] * xre - v.re[i] * xim;
        magnitudes.push((re * re + im * im).sqrt());
        let mut theta = im.atan2(re);
        if theta >= std::f64::consts::PI {
            theta = -std::f64::consts::PI;
        }
        angles.push(theta);
    }
    AngularEmbedding {
        support: support.to_vec(),
        magnitudes,
        angles,
    }
}

/// The eigenvector-driven half of spectral recovery: threshold coordinate
/// mass at `1/(2k)`, then rank the surviving vertices by descending angle of
/// the phase-cancelled coordinates (ties: lower vertex index ranks higher).
pub fn spectral_recover_from(v: &ComplexVector, k: f64) -> RankingEstimate {
    let threshold = 1.0 / (2.0 * k);
    let support: Vec<usize> = (0..v.len()).filter(|&i| v.abs2(i) >= threshold).collect();
    if support.is_empty() {
        return RankingEstimate::empty();
    }
    let emb = angular_embedding(v, &support);
    let order = order_by_angle_desc(&emb);
    RankingEstimate::new(Ranking::from_order(order).expect("support vertices are distinct"))
}

fn order_by_angle_desc(emb: &AngularEmbedding) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..emb.support.len()).collect();
    idx.sort_by(|&a, &b| {
        emb.angles[b]
            .partial_cmp(&emb.angles[a])
            .expect("angles are finite")
            .then(emb.support[a].cmp(&emb.support[b]))
    });
    idx.into_iter().map(|a| emb.support[a]).collect()
}

/// Spectral recovery: top eigenvector of `iY`, support by coordinate mass,
/// ranking by phase-cancelled angles.
pub fn spectral_recover(
    graph: &DirectedAdjacency,
    k: f64,
    opts: &PowerOpts,
) -> Result<RankingEstimate, RecoverError> {
    if graph.n() < 2 {
        return Err(RecoverError::TooLarge {
            what: "spectral recovery needs n >= 2; vertex count",
            cap: usize::MAX,
            got: graph.n(),
        });
    }
    if k.is_nan() || k <= 0.0 {
        return Err(RecoverError::BadInput(format!(
            "community size parameter must be positive, got {k}"
        )));
    }
    let pair = spectral::top_eigenpair(graph, opts)?;
    Ok(spectral_recover_from(&pair.vector, k))
}

/// Estimate the community size from eigenvector coordinate mass: the number
/// of coordinates with `|v_i|^2` at least `factor / n`. A convenience for
/// callers without a known `k`; the recovery routines take `k` explicitly.
pub fn estimate_k(v: &ComplexVector, factor: f64) -> usize {
    let n = v.len().max(1);
    let threshold = factor / n as f64;
    (0..v.len()).filter(|&i| v.abs2(i) >= threshold).count()
}

const DP_CAP: usize = 22;

/// Per-subset tables of the alignment-maximization dynamic program over all
/// submasks of `verts`: `value[m]` is the best achievable agreement sum on
/// the submask `m`, and `choice[m]` the last-placed local index (smallest
/// index on ties).
pub(crate) fn alignment_dp_tables(
    graph: &DirectedAdjacency,
    verts: &[usize],
) -> (Vec<i32>, Vec<u8>) {
    let s = verts.len();
    debug_assert!(s <= DP_CAP);
    // beats_mask[v]: local indices u with an edge verts[u] -> verts[v].
    let mut in_mask = vec![0u32; s];
    let mut out_mask = vec![0u32; s];
    for v in 0..s {
        for u in 0..s {
            match graph.get(verts[u], verts[v]) {
                1 => in_mask[v] |= 1 << u,
                -1 => out_mask[v] |= 1 << u,
                _ => {}
            }
        }
    }
    let full = 1usize << s;
    let mut value = vec![0i32; full];
    let mut choice = vec![0u8; full];
    for m in 1..full {
        let mut best = i32::MIN;
        let mut best_v = 0u8;
        let mut bits = m;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let rest = (m & !(1 << v)) as u32;
            let cand = value[rest as usize] + (in_mask[v] & rest).count_ones() as i32
                - (out_mask[v] & rest).count_ones() as i32;
            if cand > best {
                best = cand;
                best_v = v as u8;
            }
        }
        value[m] = best;
        choice[m] = best_v;
    }
    (value, choice)
}

/// Ordering of `subset` maximizing the signed edge-agreement sum, by a
/// Held-Karp style dynamic program over submasks (placing one vertex last at
/// a time). Ties take the smallest vertex index at each choice.
pub fn max_acyclic_ordering_dp(
    graph: &DirectedAdjacency,
    subset: &[usize],
) -> Result<(Ranking, i64), RecoverError> {
    let mut verts = subset.to_vec();
    verts.sort_unstable();
    verts.dedup();
    if verts.len() != subset.len() {
        return Err(RecoverError::BadInput(
            "subset has repeated vertices".into(),
        ));
    }
    if verts.iter().any(|&v| v >= graph.n()) {
        return Err(RecoverError::BadInput("subset vertex out of range".into()));
    }
    if verts.len() > DP_CAP {
        return Err(RecoverError::TooLarge {
            what: "subset",
            cap: DP_CAP,
            got: verts.len(),
        });
    }
    let (value, choice) = alignment_dp_tables(graph, &verts);
    let full = (1usize << verts.len()) - 1;
    let mut order_rev = Vec::with_capacity(verts.len());
    let mut m = full;
    while m != 0 {
        let v = choice[m] as usize;
        order_rev.push(verts[v]);
        m &= !(1 << v);
    }
    order_rev.reverse();
    let ranking = Ranking::from_order(order_rev).expect("subset vertices are distinct");
    Ok((ranking, value[full] as i64))
}

const MLE_CAP: usize = 22;

/// Exact search over all size-`k` supports, each scored by the ordering
/// dynamic program; ties take the lexicographically smallest support.
/// Returns the best estimate and its objective value.
pub fn mle_recover(
    graph: &DirectedAdjacency,
    k: usize,
) -> Result<(RankingEstimate, i64), RecoverError> {
    let n = graph.n();
    if n > MLE_CAP {
        return Err(RecoverError::TooLarge {
            what: "vertex count",
            cap: MLE_CAP,
            got: n,
        });
    }
    if k > n {
        return Err(RecoverError::BadInput(format!(
            "community size {k} exceeds n = {n}"
        )));
    }
    let mut best_value = i64::MIN;
    let mut best: Option<RankingEstimate> = None;
    crate::lowdeg::for_each_combination(n, k, |chosen| {
        let verts: Vec<usize> = chosen.to_vec();
        let (ranking, value) =
            max_acyclic_ordering_dp(graph, &verts).expect("subset within DP cap");
        if value > best_value {
            best_value = value;
            best = Some(RankingEstimate::new(ranking));
        }
    });
    let est = best.expect("at least the empty or first subset is scored");
    Ok((est, best_value))
}

/// Unique topological order of an acyclic tournament on `verts`, or `None`
/// when the induced tournament has a cycle.
fn transitive_order(graph: &DirectedAdjacency, verts: &[usize]) -> Option<Vec<usize>> {
    let m = verts.len();
    let mut order = verts.to_vec();
    // In a transitive tournament the within-set out-degrees are distinct.
    let out_deg = |v: usize| -> usize {
        verts
            .iter()
            .filter(|&&u| u != v && graph.get(v, u) == 1)
            .count()
    };
    order.sort_by_key(|&v| std::cmp::Reverse(out_deg(v)));
    for a in 0..m {
        for b in (a + 1)..m {
            if graph.get(order[a], order[b]) != 1 {
                return None;
            }
        }
    }
    Some(order)
}

/// The refinement half of ordered-clique recovery, driven by a supplied top
/// eigenvector: threshold to a rough support, split it into angular halves,
/// re-select every vertex whose in-degree from the top half or out-degree
/// into the bottom half reaches `(3/8) k`, and read off the unique ordering
/// if the refined set is acyclic.
pub fn ordered_clique_from(
    graph: &DirectedAdjacency,
    v: &ComplexVector,
    k: f64,
) -> Result<RankingEstimate, RecoverError> {
    let n = graph.n();
    let threshold = 1.0 / (2.0 * k);
    let rough: Vec<usize> = (0..n).filter(|&i| v.abs2(i) >= threshold).collect();
    let sorted = {
        let emb = angular_embedding(v, &rough);
        order_by_angle_desc(&emb)
    };
    // Top half by angle (odd sizes put the extra element on the top side).
    let top_len = sorted.len() - sorted.len() / 2;
    let top = &sorted[..top_len];
    let bottom = &sorted[top_len..];
    let bar = 0.375 * k;
    let mut refined: Vec<usize> = Vec::new();
    for j in 0..n {
        let deg_in = top
            .iter()
            .filter(|&&i| i != j && graph.get(i, j) == 1)
            .count() as f64;
        let deg_out = bottom
            .iter()
            .filter(|&&i| i != j && graph.get(j, i) == 1)
            .count() as f64;
        if deg_in >= bar || deg_out >= bar {
            refined.push(j);
        }
    }
    match transitive_order(graph, &refined) {
        Some(order) => Ok(RankingEstimate::new(
            Ranking::from_order(order).expect("refined vertices are distinct"),
        )),
        None => Err(RecoverError::CyclicRefinedSet),
    }
}

/// Ordered-clique recovery on a tournament: eigenvector, angular split,
/// degree refinement, and an explicit acyclicity check.
pub fn ordered_clique_recover(
    graph: &DirectedAdjacency,
    k: f64,
    opts: &PowerOpts,
) -> Result<RankingEstimate, RecoverError> {
    if graph.n() < 2 {
        return Err(RecoverError::BadInput(
            "ordered-clique recovery needs n >= 2".into(),
        ));
    }
    if !graph.is_tournament() {
        return Err(RecoverError::NotTournament);
    }
    if k.is_nan() || k <= 0.0 {
        return Err(RecoverError::BadInput(format!(
            "community size parameter must be positive, got {k}"
        )));
    }
    let pair = spectral::top_eigenpair(graph, opts)?;
    ordered_clique_from(graph, &pair.vector, k)
}

const ENHANCED_B_CAP: usize = 3;

/// Guess-augmented ordered-clique recovery: for every size-`b` vertex set
/// `B`, restrict to the vertices dominated by all of `B`, run the plain
/// recovery there, and keep `B` together with the recovered set when their
/// union is acyclic. Returns the largest acyclic candidate (ties:
/// lexicographically smallest sorted vertex set).
pub fn ordered_clique_recover_enhanced(
    graph: &DirectedAdjacency,
    k: f64,
    b: usize,
    opts: &PowerOpts,
) -> Result<RankingEstimate, RecoverError> {
    if b > ENHANCED_B_CAP {
        return Err(RecoverError::TooLarge {
            what: "guess size",
            cap: ENHANCED_B_CAP,
            got: b,
        });
    }
    if graph.n() < 2 {
        return Err(RecoverError::BadInput(
            "ordered-clique recovery needs n >= 2".into(),
        ));
    }
    if !graph.is_tournament() {
        return Err(RecoverError::NotTournament);
    }
    let n = graph.n();
    let mut best: Option<(Vec<usize>, Ranking)> = None;
    crate::lowdeg::for_each_combination(n, b, |guess| {
        let dominated: Vec<usize> = (0..n)
            .filter(|&i| !guess.contains(&i) && guess.iter().all(|&g| graph.get(g, i) == 1))
            .collect();
        if dominated.len() < 2 {
            return;
        }
        let induced = graph.induced(&dominated);
        let recovered = match ordered_clique_recover(&induced, k, opts) {
            Ok(est) => est,
            Err(_) => return,
        };
        let mut candidate: Vec<usize> = guess
            .iter()
            .copied()
            .chain(recovered.support_sorted().iter().map(|&a| dominated[a]))
            .collect();
        candidate.sort_unstable();
        let Some(order) = transitive_order(graph, &candidate) else {
            return;
        };
        let better = match &best {
            None => true,
            Some((set, _)) => {
                candidate.len() > set.len() || (candidate.len() == set.len() && candidate < *set)
            }
        };
        if better {
            let ranking = Ranking::from_order(order).expect("candidate vertices distinct");
            best = Some((candidate, ranking));
        }
    });
    match best {
        Some((_, ranking)) => Ok(RankingEstimate::new(ranking)),
        None => Err(RecoverError::NoAcyclicCandidate),
    }
}
