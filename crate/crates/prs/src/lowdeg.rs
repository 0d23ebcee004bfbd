//! Exact small-instance oracles for the model's moment structure: planted
//! monomial expectations, the low-degree advantage, chi-squared divergence
//! between the planted and null laws, and the moment generating function of
//! permutation inversions.
//!
//! Everything here is computed by exhaustive enumeration at small sizes, with
//! exact rational arithmetic for the ordering sign expectations. These values
//! serve as ground truth for the Monte Carlo samplers and the detection
//! statistics.

use crate::model::{DirectedAdjacency, ModelParams};
use std::collections::{BTreeSet, HashMap};
use std::error::Error as StdError;
use std::fmt;

#[derive(Debug, PartialEq)]
pub enum LowDegError {
    /// An enumeration cap was exceeded.
    TooLarge {
        what: &'static str,
        cap: usize,
        got: usize,
    },
    BadInput(String),
}

impl fmt::Display for LowDegError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LowDegError::TooLarge { what, cap, got } => {
                write!(f, "{what} too large for exact enumeration: {got} > {cap}")
            }
            LowDegError::BadInput(msg) => write!(f, "{msg}"),
        }
    }
}

impl StdError for LowDegError {}

/// An exact fraction with a small denominator (a count over a factorial).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    num: i64,
    den: i64,
}

impl Ratio {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        Ratio {
            num: sign * num / g,
            den: sign.abs() * den.abs() / g,
        }
    }

    pub fn zero() -> Self {
        Ratio { num: 0, den: 1 }
    }

    pub fn one() -> Self {
        Ratio { num: 1, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn mul(&self, other: &Ratio) -> Ratio {
        // Cross-reduce before multiplying; components are tiny.
        let g1 = gcd(self.num.unsigned_abs(), other.den.unsigned_abs()) as i64;
        let g2 = gcd(other.num.unsigned_abs(), self.den.unsigned_abs()) as i64;
        Ratio::new(
            (self.num / g1) * (other.num / g2),
            (self.den / g2) * (other.den / g1),
        )
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// A set of unordered vertex pairs, interpreted as a graph (monomial index).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeSet {
    edges: BTreeSet<(usize, usize)>,
}

impl EdgeSet {
    pub fn new() -> Self {
        EdgeSet::default()
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self, LowDegError> {
        let mut edges = BTreeSet::new();
        for &(u, v) in pairs {
            if u == v {
                return Err(LowDegError::BadInput(format!("self-loop at vertex {u}")));
            }
            edges.insert((u.min(v), u.max(v)));
        }
        Ok(EdgeSet { edges })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn is_disjoint(&self, other: &EdgeSet) -> bool {
        self.edges.is_disjoint(&other.edges)
    }

    /// Vertex support, sorted ascending (isolated vertices never appear).
    pub fn support(&self) -> Vec<usize> {
        let mut verts = BTreeSet::new();
        for &(u, v) in &self.edges {
            verts.insert(u);
            verts.insert(v);
        }
        verts.into_iter().collect()
    }

    /// Connected components as separate edge sets.
    pub fn components(&self) -> Vec<EdgeSet> {
        let verts = self.support();
        let index: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut dsu: Vec<usize> = (0..verts.len()).collect();
        fn find(dsu: &mut Vec<usize>, x: usize) -> usize {
            if dsu[x] != x {
                let root = find(dsu, dsu[x]);
                dsu[x] = root;
            }
            dsu[x]
        }
        for &(u, v) in &self.edges {
            let (ru, rv) = (find(&mut dsu, index[&u]), find(&mut dsu, index[&v]));
            if ru != rv {
                dsu[ru] = rv;
            }
        }
        let mut groups: HashMap<usize, EdgeSet> = HashMap::new();
        for &(u, v) in &self.edges {
            let root = find(&mut dsu, index[&u]);
            groups.entry(root).or_default().edges.insert((u, v));
        }
        let mut comps: Vec<EdgeSet> = groups.into_values().collect();
        comps.sort_by(|a, b| a.edges.iter().next().cmp(&b.edges.iter().next()));
        comps
    }

    /// Even means every connected component has an even number of edges.
    pub fn is_even(&self) -> bool {
        self.components().iter().all(|c| c.len() % 2 == 0)
    }
}

fn factorial(h: usize) -> i64 {
    (1..=h as i64).product::<i64>().max(1)
}

/// Run `f` on every permutation of `0..h` (as a slice `pos` where `pos[v]`
/// is the rank of item `v`). Plain recursive enumeration.
fn for_each_permutation<F: FnMut(&[usize])>(h: usize, mut f: F) {
    let mut items: Vec<usize> = (0..h).collect();
    permute_rec(&mut items, 0, &mut f);
}

fn permute_rec<F: FnMut(&[usize])>(items: &mut Vec<usize>, at: usize, f: &mut F) {
    if at == items.len() {
        f(items);
        return;
    }
    for i in at..items.len() {
        items.swap(at, i);
        permute_rec(items, at + 1, f);
        items.swap(at, i);
    }
}

const SIGN_SUPPORT_CAP: usize = 10;

/// Expectation, over a uniform ordering of the support of `a`, of the sign
/// `(-1)^(number of edges {i,j} in a, i < j, placed with i after j)`.
///
/// The full-graph expectation depends only on the relative order of the
/// support, so enumerating the `|V(a)|!` relative orderings is exact.
pub fn ordering_sign_expectation(a: &EdgeSet) -> Result<Ratio, LowDegError> {
    let verts = a.support();
    if verts.len() > SIGN_SUPPORT_CAP {
        return Err(LowDegError::TooLarge {
            what: "edge-set support",
            cap: SIGN_SUPPORT_CAP,
            got: verts.len(),
        });
    }
    Ok(sign_expectation_mapped(
        &mapped_edges(a, &verts),
        verts.len(),
    ))
}

/// Edges with support relabeled to `0..h` (label order preserved, so the
/// `i < j` comparison convention is unchanged).
fn mapped_edges(a: &EdgeSet, sorted_support: &[usize]) -> Vec<(usize, usize)> {
    let index: HashMap<usize, usize> = sorted_support
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    a.edges().map(|(u, v)| (index[&u], index[&v])).collect()
}

fn sign_expectation_mapped(edges: &[(usize, usize)], h: usize) -> Ratio {
    if h == 0 {
        return Ratio::one();
    }
    let mut pos = vec![0usize; h];
    let mut total: i64 = 0;
    for_each_permutation(h, |arrangement| {
        for (rank, &v) in arrangement.iter().enumerate() {
            pos[v] = rank;
        }
        let swaps = edges.iter().filter(|&&(u, v)| pos[u] > pos[v]).count();
        total += if swaps % 2 == 0 { 1 } else { -1 };
    });
    Ratio::new(total, factorial(h))
}

/// Planted expectation of the monomial `Y^a`:
/// `(k/n)^|V(a)| (2pq)^|a|` times the product over connected components of
/// their ordering sign expectations.
pub fn planted_monomial_expectation(a: &EdgeSet, model: &ModelParams) -> Result<f64, LowDegError> {
    let verts = a.support();
    if verts.len() > SIGN_SUPPORT_CAP {
        return Err(LowDegError::TooLarge {
            what: "edge-set support",
            cap: SIGN_SUPPORT_CAP,
            got: verts.len(),
        });
    }
    let mut sign = Ratio::one();
    for comp in a.components() {
        sign = sign.mul(&ordering_sign_expectation(&comp)?);
    }
    let rate = model.community_rate();
    Ok(rate.powi(verts.len() as i32)
        * (2.0 * model.p() * model.q()).powi(a.len() as i32)
        * sign.to_f64())
}

/// Degree bound plus model parameters for the advantage computation.
#[derive(Debug, Clone, Copy)]
pub struct LowDegParams {
    pub degree: usize,
    pub model: ModelParams,
}

const ADV_N_CAP: usize = 7;
const ADV_DEGREE_CAP: usize = 6;

/// Exact low-degree advantage: the squared advantage is the sum, over even
/// edge sets `A` with `|A| <= D`, of the squared planted expectation of the
/// orthonormal basis polynomial `h_A`; basis polynomials with a nonempty
/// edge-square part contribute zero.
pub fn advantage_exact(params: &LowDegParams) -> Result<f64, LowDegError> {
    let n = params.model.n();
    if n > ADV_N_CAP {
        return Err(LowDegError::TooLarge {
            what: "vertex count",
            cap: ADV_N_CAP,
            got: n,
        });
    }
    if params.degree > ADV_DEGREE_CAP {
        return Err(LowDegError::TooLarge {
            what: "degree bound",
            cap: ADV_DEGREE_CAP,
            got: params.degree,
        });
    }
    let all_pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let rate = params.model.community_rate();
    let factor = 2.0 * params.model.q() * params.model.p().sqrt();
    let mut cache: HashMap<Vec<(usize, usize)>, Ratio> = HashMap::new();
    let mut total = 0.0f64;
    for size in 0..=params.degree.min(all_pairs.len()) {
        for_each_combination(all_pairs.len(), size, |chosen| {
            let pairs: Vec<(usize, usize)> = chosen.iter().map(|&e| all_pairs[e]).collect();
            let a = EdgeSet::from_pairs(&pairs).expect("no self-loops in pair list");
            if !a.is_even() {
                return;
            }
            let mut sign = Ratio::one();
            for comp in a.components() {
                let verts = comp.support();
                let key = mapped_edges(&comp, &verts);
                let r = *cache
                    .entry(key.clone())
                    .or_insert_with(|| sign_expectation_mapped(&key, verts.len()));
                sign = sign.mul(&r);
            }
            let mean =
                rate.powi(a.support().len() as i32) * factor.powi(a.len() as i32) * sign.to_f64();
            total += mean * mean;
        });
    }
    Ok(total.sqrt())
}

const CHI2_N_CAP: usize = 4;

/// Exact chi-squared divergence of the planted law conditioned on community
/// size `community_size` against the null, by enumerating all observation
/// matrices on the support of the null.
pub fn chi2_exact(model: &ModelParams, community_size: usize) -> Result<f64, LowDegError> {
    let n = model.n();
    if n > CHI2_N_CAP {
        return Err(LowDegError::TooLarge {
            what: "vertex count",
            cap: CHI2_N_CAP,
            got: n,
        });
    }
    if community_size > n {
        return Err(LowDegError::BadInput(format!(
            "community size {community_size} exceeds n = {n}"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let (p, q) = (model.p(), model.q());

    // All (S, pi) conditionals, each weighted equally.
    let mut conditionals: Vec<(Vec<bool>, Vec<usize>)> = Vec::new();
    for_each_combination(n, community_size, |chosen| {
        let mut member = vec![false; n];
        for &v in chosen {
            member[v] = true;
        }
        let verts: Vec<usize> = chosen.to_vec();
        for_each_permutation(community_size, |arrangement| {
            // rank[v] for v in the community; usize::MAX elsewhere.
            let mut rank = vec![usize::MAX; n];
            for (r, &idx) in arrangement.iter().enumerate() {
                rank[verts[idx]] = r;
            }
            conditionals.push((member.clone(), rank));
        });
    });
    let weight = 1.0 / conditionals.len() as f64;

    let mut chi = 0.0f64;
    let mut state = vec![0u8; pairs.len()]; // 0 none, 1 forward, 2 backward
    loop {
        // Null probability of this observation.
        let mut q_prob = 1.0f64;
        for &s in &state {
            q_prob *= if s == 0 { 1.0 - p } else { 0.5 * p };
        }
        if q_prob > 0.0 {
            let mut p_prob = 0.0f64;
            for (member, rank) in &conditionals {
                let mut lik = 1.0f64;
                for (idx, &(i, j)) in pairs.iter().enumerate() {
                    let inside = member[i] && member[j];
                    lik *= match state[idx] {
                        0 => 1.0 - p,
                        s => {
                            if inside {
                                // Edge toward the lower-ranked endpoint has
                                // probability p(1/2 + q).
                                let forward_is_down = rank[i] < rank[j];
                                let is_forward = s == 1;
                                if is_forward == forward_is_down {
                                    p * (0.5 + q)
                                } else {
                                    p * (0.5 - q)
                                }
                            } else {
                                0.5 * p
                            }
                        }
                    };
                }
                p_prob += weight * lik;
            }
            chi += p_prob * p_prob / q_prob;
        }
        // Advance the base-3 counter.
        let mut carry = true;
        for s in state.iter_mut() {
            *s += 1;
            if *s == 3 {
                *s = 0;
            } else {
                carry = false;
                break;
            }
        }
        if carry {
            break;
        }
    }
    Ok(chi - 1.0)
}

const MGF_H_CAP: usize = 9;

/// Exact `E[(1 + x)^(C(h,2) - 2 inv(pi))]` over uniform permutations of `[h]`.
pub fn inversion_mgf(h: usize, x: f64) -> Result<f64, LowDegError> {
    if h == 0 {
        return Err(LowDegError::BadInput("h must be at least 1".into()));
    }
    if h > MGF_H_CAP {
        return Err(LowDegError::TooLarge {
            what: "permutation size",
            cap: MGF_H_CAP,
            got: h,
        });
    }
    let binom = (h * (h - 1) / 2) as i32;
    let mut total = 0.0f64;
    for_each_permutation(h, |arrangement| {
        let mut inv = 0i32;
        for a in 0..h {
            for b in (a + 1)..h {
                if arrangement[a] > arrangement[b] {
                    inv += 1;
                }
            }
        }
        total += (1.0 + x).powi(binom - 2 * inv);
    });
    Ok(total / factorial(h) as f64)
}

/// Closed-form upper bound `exp(x^2 h^3 / 2) (1 + 2 sqrt(pi x^2 h^3 / 2))`
/// for the inversion MGF; valid for any `h >= 1` and `x >= 0`.
pub fn inversion_mgf_bound(h: usize, x: f64) -> f64 {
    let x2h3 = x * x * (h as f64).powi(3);
    (0.5 * x2h3).exp() * (1.0 + 2.0 * (std::f64::consts::PI * 0.5 * x2h3).sqrt())
}

/// Evaluate the null-orthonormal basis polynomial indexed by the disjoint
/// edge sets `(a, b)` at an observation `y`:
/// `p^(-|a|/2) Y^a  (p(1-p))^(-|b|/2) prod_b (Y_ij^2 - p)`.
pub fn h_eval(a: &EdgeSet, b: &EdgeSet, y: &DirectedAdjacency, p: f64) -> Result<f64, LowDegError> {
    if !a.is_disjoint(b) {
        return Err(LowDegError::BadInput(
            "basis index sets must be disjoint".into(),
        ));
    }
    let mut value = p.powf(-(a.len() as f64) / 2.0);
    for (u, v) in a.edges() {
        value *= y.get(u, v) as f64;
    }
    value *= (p * (1.0 - p)).powf(-(b.len() as f64) / 2.0);
    for (u, v) in b.edges() {
        let e = y.get(u, v) as f64;
        value *= e * e - p;
    }
    Ok(value)
}

/// Run `f` on every size-`k` combination of `0..m`, in lexicographic order.
pub(crate) fn for_each_combination<F: FnMut(&[usize])>(m: usize, k: usize, mut f: F) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // Advance to the next combination.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
