//! Rankings over vertex subsets, and the distances and objectives used to
//! score detection and recovery outputs.
//!
//! A [`Ranking`] is a bijection from a vertex subset onto `1..=len`; rank 1 is
//! the top of the order. Distances follow the usual conventions: Hamming on
//! supports, Kendall tau on the common support of two rankings, and the
//! alignment objective between a full ranking and an observed digraph.

use crate::model::DirectedAdjacency;
use std::collections::HashMap;
use std::error::Error as StdError;
use std::fmt;

#[derive(Debug, PartialEq, Eq)]
pub enum MetricsError {
    /// A vertex appears twice in a ranking order.
    DuplicateVertex(usize),
    /// A ranking claimed to be a permutation of `[h]` is not.
    NotOnRange { expected: usize },
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::DuplicateVertex(v) => write!(f, "vertex {v} appears twice"),
            MetricsError::NotOnRange { expected } => {
                write!(f, "ranking is not a permutation of 0..{expected}")
            }
        }
    }
}

impl StdError for MetricsError {}

/// A bijection from a vertex subset onto ranks `1..=len` (rank 1 highest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    /// `order[r]` is the vertex holding rank `r + 1`.
    order: Vec<usize>,
    rank: HashMap<usize, usize>,
}

impl Ranking {
    /// Build from the rank order (first element gets rank 1).
    pub fn from_order(order: Vec<usize>) -> Result<Self, MetricsError> {
        let mut rank = HashMap::with_capacity(order.len());
        for (r, &v) in order.iter().enumerate() {
            if rank.insert(v, r + 1).is_some() {
                return Err(MetricsError::DuplicateVertex(v));
            }
        }
        Ok(Ranking { order, rank })
    }

    /// The identity permutation on `0..h`.
    pub fn identity(h: usize) -> Self {
        Ranking::from_order((0..h).collect()).expect("range has no duplicates")
    }

    /// The reversal of the identity on `0..h`.
    pub fn reversal(h: usize) -> Self {
        Ranking::from_order((0..h).rev().collect()).expect("range has no duplicates")
    }

    pub fn empty() -> Self {
        Ranking::identity(0)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Vertices listed by rank, best first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Support as a sorted vertex list.
    pub fn support_sorted(&self) -> Vec<usize> {
        let mut s = self.order.clone();
        s.sort_unstable();
        s
    }

    /// 1-based rank of `v`, if ranked.
    pub fn rank_of(&self, v: usize) -> Option<usize> {
        self.rank.get(&v).copied()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.rank.contains_key(&v)
    }

    /// `+1` if `i` is ranked above `j`, `-1` otherwise. Both must be ranked.
    pub fn pair_sign(&self, i: usize, j: usize) -> i64 {
        let ri = self.rank[&i];
        let rj = self.rank[&j];
        if ri < rj {
            1
        } else {
            -1
        }
    }

    /// True when the support is exactly `0..h` for `h = len`.
    pub fn is_on_range(&self) -> bool {
        self.order.iter().all(|&v| v < self.order.len())
    }
}

/// An algorithm's output: a support estimate with a ranking on it.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingEstimate {
    pub ranking: Ranking,
}

impl RankingEstimate {
    pub fn new(ranking: Ranking) -> Self {
        RankingEstimate { ranking }
    }

    pub fn empty() -> Self {
        RankingEstimate {
            ranking: Ranking::empty(),
        }
    }

    pub fn support_sorted(&self) -> Vec<usize> {
        self.ranking.support_sorted()
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }
}

/// Hamming distance `|a symmetric-difference b|` between two vertex sets.
pub fn hamming(a: &[usize], b: &[usize]) -> usize {
    let sa: std::collections::HashSet<usize> = a.iter().copied().collect();
    let sb: std::collections::HashSet<usize> = b.iter().copied().collect();
    sa.symmetric_difference(&sb).count()
}

/// Kendall tau distance: unordered pairs of the common support that the two
/// rankings order oppositely. `O(m log m)` by merge counting.
pub fn kendall_tau(sigma: &Ranking, tau: &Ranking) -> u64 {
    // Common support, listed by sigma-rank; then inversions of the tau-ranks.
    let mut common: Vec<(usize, usize)> = sigma
        .order()
        .iter()
        .filter_map(|&v| tau.rank_of(v).map(|rt| (sigma.rank_of(v).unwrap(), rt)))
        .collect();
    common.sort_unstable_by_key(|&(rs, _)| rs);
    let mut seq: Vec<usize> = common.into_iter().map(|(_, rt)| rt).collect();
    count_inversions(&mut seq)
}

/// Inversions of a permutation of `0..h` relative to the identity.
pub fn inversions(pi: &Ranking) -> Result<u64, MetricsError> {
    if !pi.is_on_range() {
        return Err(MetricsError::NotOnRange { expected: pi.len() });
    }
    Ok(kendall_tau(pi, &Ranking::identity(pi.len())))
}

fn count_inversions(seq: &mut [usize]) -> u64 {
    let n = seq.len();
    if n < 2 {
        return 0;
    }
    let mut buf = vec![0usize; n];
    merge_count(seq, &mut buf)
}

fn merge_count(seq: &mut [usize], buf: &mut [usize]) -> u64 {
    let n = seq.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = seq.split_at_mut(mid);
    let mut inv = merge_count(left, &mut buf[..mid]) + merge_count(right, &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < left.len() && j < right.len() {
        if left[i] <= right[j] {
            buf[k] = left[i];
            i += 1;
        } else {
            buf[k] = right[j];
            inv += (left.len() - i) as u64;
            j += 1;
        }
        k += 1;
    }
    while i < left.len() {
        buf[k] = left[i];
        i += 1;
        k += 1;
    }
    while j < right.len() {
        buf[k] = right[j];
        j += 1;
        k += 1;
    }
    seq.copy_from_slice(&buf[..n]);
    inv
}

/// Alignment objective of a full ranking against an observed digraph: the
/// number of directed edges the ranking agrees with minus the number it
/// disagrees with. `estimate` must rank all of `0..n`.
pub fn alignment(estimate: &Ranking, graph: &DirectedAdjacency) -> i64 {
    let n = graph.n();
    assert_eq!(estimate.len(), n, "alignment needs a full ranking of [n]");
    assert!(estimate.is_on_range(), "alignment needs a ranking of 0..n");
    let mut total = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let y = graph.get(i, j) as i64;
            if y != 0 {
                total += y * estimate.pair_sign(i, j);
            }
        }
    }
    total
}
