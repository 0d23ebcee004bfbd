//! Eigensolver for the Hermitian matrix `iY` attached to a skew-symmetric
//! observation `Y`, plus the closed-form eigendecomposition of the full
//! ordering matrix used as a test oracle.
//!
//! For real skew-symmetric `Y` the matrix `iY` is Hermitian with a spectrum
//! symmetric about zero, so the largest eigenvalue of `iY` equals the largest
//! singular value of `Y`. [`sigma_max`] runs power iteration on the real PSD
//! matrix `Y^T Y = -Y^2`; [`top_eigenpair`] finds the eigenvector of `iY`
//! with the largest signed eigenvalue by shifted power iteration on
//! `iY + sI`, `s = sigma_max + 1`, which makes that eigenvalue dominant.
//!
//! Complex arithmetic stays out of the hot loop: for `v = a + ib`,
//! `iY v = -Yb + i(Ya)`, two real matrix-vector products.

use crate::model::DirectedAdjacency;
use crate::rng::SplitMix64;
use std::error::Error as StdError;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum EigenError {
    /// Input smaller than the operation supports.
    TooSmall { n: usize, need: usize },
    /// Input above the cap of a test-only dense routine.
    TooLarge { n: usize, cap: usize },
    /// Power iteration did not reach the residual tolerance. Expected under
    /// pure noise, where the top eigenvalues of `iY` are nearly degenerate;
    /// the caller decides policy.
    NotConverged {
        best: f64,
        residual: f64,
        iterations: usize,
    },
}

impl fmt::Display for EigenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigenError::TooSmall { n, need } => {
                write!(f, "matrix of size {n} below minimum {need}")
            }
            EigenError::TooLarge { n, cap } => {
                write!(f, "matrix of size {n} above the dense-oracle cap {cap}")
            }
            EigenError::NotConverged {
                best,
                residual,
                iterations,
            } => write!(
                f,
                "power iteration failed to converge after {iterations} iterations \
                 (last value {best}, relative residual {residual:e})"
            ),
        }
    }
}

impl StdError for EigenError {}

/// Power iteration controls. The start vector is derived from `seed`, so a
/// failing run is reproducible.
#[derive(Debug, Clone, Copy)]
pub struct PowerOpts {
    /// Relative residual target.
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for PowerOpts {
    fn default() -> Self {
        PowerOpts {
            tol: 1e-8,
            max_iters: 20_000,
            seed: 0,
        }
    }
}

impl PowerOpts {
    pub fn with_seed(seed: u64) -> Self {
        PowerOpts {
            seed,
            ..PowerOpts::default()
        }
    }
}

/// A complex vector stored as separate real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexVector {
    pub fn zeros(n: usize) -> Self {
        ComplexVector {
            re: vec![0.0; n],
            im: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(a, b)| a * a + b * b)
            .sum::<f64>()
            .sqrt()
    }

    /// Scale to unit norm; returns the previous norm.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.re.iter_mut().for_each(|x| *x *= inv);
            self.im.iter_mut().for_each(|x| *x *= inv);
        }
        n
    }

    /// Hermitian inner product `<self, other> = sum conj(self_i) other_i`,
    /// returned as `(re, im)`.
    pub fn herm_dot(&self, other: &ComplexVector) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for i in 0..self.len() {
            re += self.re[i] * other.re[i] + self.im[i] * other.im[i];
            im += self.re[i] * other.im[i] - self.im[i] * other.re[i];
        }
        (re, im)
    }

    /// `|v_i|^2`.
    pub fn abs2(&self, i: usize) -> f64 {
        self.re[i] * self.re[i] + self.im[i] * self.im[i]
    }

    /// Multiply in place by the unit complex number `exp(i phi)`.
    pub fn rotate(&mut self, phi: f64) {
        let (s, c) = phi.sin_cos();
        for i in 0..self.len() {
            let (a, b) = (self.re[i], self.im[i]);
            self.re[i] = c * a - s * b;
            self.im[i] = s * a + c * b;
        }
    }

    fn random_unit(n: usize, seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let mut v = ComplexVector {
            re: (0..n).map(|_| 2.0 * rng.next_unit_f64() - 1.0).collect(),
            im: (0..n).map(|_| 2.0 * rng.next_unit_f64() - 1.0).collect(),
        };
        v.normalize();
        v
    }
}

/// An eigenpair of `iY` with its convergence diagnostics.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: ComplexVector,
    /// `norm(iY v - value v)` at return.
    pub residual: f64,
    pub iterations: usize,
}

/// `out = Y x` for real `x`.
fn apply(graph: &DirectedAdjacency, x: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let row = graph.row(i);
        let mut acc = 0.0f64;
        for (&e, &xj) in row.iter().zip(x) {
            acc += e as f64 * xj;
        }
        *o = acc;
    }
}

/// Largest singular value of `Y` with iteration count.
pub fn sigma_max_detailed(
    graph: &DirectedAdjacency,
    opts: &PowerOpts,
) -> Result<(f64, usize), EigenError> {
    let n = graph.n();
    if n == 0 {
        return Err(EigenError::TooSmall { n, need: 1 });
    }
    if graph.edge_count() == 0 {
        return Ok((0.0, 0));
    }
    let mut rng = SplitMix64::new(opts.seed ^ 0x5157_u64);
    let mut x: Vec<f64> = (0..n).map(|_| 2.0 * rng.next_unit_f64() - 1.0).collect();
    normalize_real(&mut x);
    let mut z = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let mut best = 0.0f64;
    let mut best_resid = f64::INFINITY;
    for iter in 1..=opts.max_iters {
        // w = Y^T Y x = -Y (Y x).
        apply(graph, &x, &mut z);
        apply(graph, &z, &mut w);
        w.iter_mut().for_each(|e| *e = -*e);
        let lam: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum();
        let resid: f64 = x
            .iter()
            .zip(&w)
            .map(|(a, b)| (b - lam * a) * (b - lam * a))
            .sum::<f64>()
            .sqrt();
        if lam > 0.0 {
            best = lam.sqrt();
            best_resid = resid / lam;
            if resid <= opts.tol * lam {
                return Ok((best, iter));
            }
        }
        let nw = normalize_real(&mut w);
        if nw == 0.0 {
            // Start vector hit the kernel; redraw.
            x = (0..n).map(|_| 2.0 * rng.next_unit_f64() - 1.0).collect();
            normalize_real(&mut x);
        } else {
            std::mem::swap(&mut x, &mut w);
        }
    }
    Err(EigenError::NotConverged {
        best,
        residual: best_resid,
        iterations: opts.max_iters,
    })
}

/// Largest singular value of `Y` (equivalently `lambda_max(iY)`).
pub fn sigma_max(graph: &DirectedAdjacency, opts: &PowerOpts) -> Result<f64, EigenError> {
    sigma_max_detailed(graph, opts).map(|(v, _)| v)
}

fn normalize_real(x: &mut [f64]) -> f64 {
    let n = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if n > 0.0 {
        let inv = 1.0 / n;
        x.iter_mut().for_each(|a| *a *= inv);
    }
    n
}

/// Eigenpair of `iY` with the largest signed eigenvalue, by power iteration
/// on `iY + sI` with `s = sigma_max(Y) + 1`.
pub fn top_eigenpair(graph: &DirectedAdjacency, opts: &PowerOpts) -> Result<EigenPair, EigenError> {
    let n = graph.n();
    if n < 2 {
        return Err(EigenError::TooSmall { n, need: 2 });
    }
    let (sigma, _) = sigma_max_detailed(graph, opts)?;
    let shift = sigma + 1.0;
    let mut v = ComplexVector::random_unit(n, opts.seed ^ 0xE1E7_u64);
    let mut w = ComplexVector::zeros(n);
    let mut best = 0.0f64;
    let mut best_resid = f64::INFINITY;
    for iter in 1..=opts.max_iters {
        // w = (iY + sI) v: re = -Y v.im + s v.re, im = Y v.re + s v.im.
        apply(graph, &v.im, &mut w.re);
        for i in 0..n {
            w.re[i] = -w.re[i] + shift * v.re[i];
        }
        apply(graph, &v.re, &mut w.im);
        for i in 0..n {
            w.im[i] += shift * v.im[i];
        }
        let (rho_re, _rho_im) = v.herm_dot(&w);
        let mut resid2 = 0.0f64;
        for i in 0..n {
            let dre = w.re[i] - rho_re * v.re[i];
            let dim = w.im[i] - rho_re * v.im[i];
            resid2 += dre * dre + dim * dim;
        }
        let resid = resid2.sqrt();
        if rho_re > 0.0 {
            best = rho_re - shift;
            best_resid = resid / rho_re;
            if resid <= opts.tol * rho_re {
                return Ok(EigenPair {
                    value: rho_re - shift,
                    vector: v,
                    residual: resid,
                    iterations: iter,
                });
            }
        }
        let nw = w.normalize();
        if nw == 0.0 {
            v = ComplexVector::random_unit(n, opts.seed ^ (iter as u64));
        } else {
            std::mem::swap(&mut v, &mut w);
        }
    }
    Err(EigenError::NotConverged {
        best,
        residual: best_resid,
        iterations: opts.max_iters,
    })
}

/// Closed-form eigendecomposition of the `l x l` ordering matrix (the
/// Hermitian matrix with `i` above the diagonal and `-i` below): eigenvalue
/// `1 / tan((2i - 1) pi / (2l))` with unnormalized eigenvector entries
/// `exp(-i pi (2i - 1) j / l)`, `j = 1..=l`, for `i = 1..=l`.
pub fn analytic_ordering_eigs(l: usize) -> Vec<(f64, ComplexVector)> {
    use std::f64::consts::PI;
    (1..=l)
        .map(|i| {
            let lam = 1.0 / ((2 * i - 1) as f64 * PI / (2 * l) as f64).tan();
            let mut v = ComplexVector::zeros(l);
            for j in 1..=l {
                let phase = -PI * ((2 * i - 1) * j) as f64 / l as f64;
                v.re[j - 1] = phase.cos();
                v.im[j - 1] = phase.sin();
            }
            (lam, v)
        })
        .collect()
}

const DENSE_CAP: usize = 200;

/// All eigenvalues of `iY`, descending, by cyclic Jacobi on the real
/// symmetric `2n x 2n` embedding `[[0, -Y], [Y, 0]]`. A test oracle:
/// `O(n^3)` and capped at `n = 200`.
pub fn dense_hermitian_eigs(graph: &DirectedAdjacency) -> Result<Vec<f64>, EigenError> {
    let n = graph.n();
    if n > DENSE_CAP {
        return Err(EigenError::TooSmall { n, need: DENSE_CAP });
    }
    let m = 2 * n;
    let mut a = vec![0.0f64; m * m];
    for i in 0..n {
        for j in 0..n {
            let y = graph.get(i, j) as f64;
            a[i * m + (n + j)] = -y;
            a[(n + i) * m + j] = y;
        }
    }
    jacobi_eigenvalues(&mut a, m);
    // Each eigenvalue of iY appears twice in the embedding; keep one copy.
    let mut eigs: Vec<f64> = (0..m).map(|i| a[i * m + i]).collect();
    eigs.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(eigs.into_iter().step_by(2).collect())
}

/// In-place cyclic Jacobi for a dense symmetric matrix; diagonal holds the
/// eigenvalues afterwards.
fn jacobi_eigenvalues(a: &mut [f64], m: usize) {
    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if frob == 0.0 {
        return;
    }
    let target = 1e-13 * frob;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..m {
            for q in (p + 1)..m {
                off += 2.0 * a[p * m + q] * a[p * m + q];
            }
        }
        if off.sqrt() <= target {
            return;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q * m + q] - a[p * m + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_null, ModelParams};

    /// Full acyclic tournament of the identity order on `l` vertices; `iY`
    /// is then exactly the ordering matrix.
    pub(crate) fn ordering_tournament(l: usize) -> DirectedAdjacency {
        let mut g = DirectedAdjacency::zeros(l);
        for i in 0..l {
            for j in (i + 1)..l {
                g.set_edge(i, j);
            }
        }
        g
    }

    /// `iY v` for a complex vector, straightforwardly.
    fn iy_apply(graph: &DirectedAdjacency, v: &ComplexVector) -> ComplexVector {
        let n = graph.n();
        let mut out = ComplexVector::zeros(n);
        apply(graph, &v.im, &mut out.re);
        out.re.iter_mut().for_each(|x| *x = -*x);
        apply(graph, &v.re, &mut out.im);
        out
    }

    #[test]
    fn analytic_eigs_small_values() {
        let eigs = analytic_ordering_eigs(2);
        assert!((eigs[0].0 - 1.0).abs() < 1e-12);
        assert!((eigs[1].0 + 1.0).abs() < 1e-12);
        let eigs = analytic_ordering_eigs(3);
        assert!((eigs[0].0 - 3.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn analytic_eigs_satisfy_eigen_equation() {
        for l in 1..=32 {
            let g = ordering_tournament(l);
            for (lam, v) in analytic_ordering_eigs(l) {
                let av = iy_apply(&g, &v);
                let mut err2 = 0.0;
                for i in 0..l {
                    let dre = av.re[i] - lam * v.re[i];
                    let dim = av.im[i] - lam * v.im[i];
                    err2 += dre * dre + dim * dim;
                }
                assert!(
                    err2.sqrt() <= 1e-9 * v.norm(),
                    "l={l}, lambda={lam}: residual {}",
                    err2.sqrt()
                );
            }
        }
    }

    #[test]
    fn analytic_eigs_trace_pairing() {
        for l in [3usize, 17, 64, 512] {
            let sum: f64 = analytic_ordering_eigs(l).iter().map(|(lam, _)| lam).sum();
            assert!(sum.abs() < 1e-9, "l={l}: eigenvalue sum {sum}");
        }
    }

    #[test]
    fn sigma_max_zero_matrix() {
        let g = DirectedAdjacency::zeros(8);
        assert_eq!(sigma_max(&g, &PowerOpts::default()).unwrap(), 0.0);
    }

    #[test]
    fn sigma_max_ordering_tournament_matches_formula() {
        let g = ordering_tournament(100);
        let expect = 1.0 / (std::f64::consts::PI / 200.0).tan();
        let got = sigma_max(&g, &PowerOpts::default()).unwrap();
        assert!(
            (got - expect).abs() < 1e-6 * expect,
            "sigma {got} vs formula {expect}"
        );
    }

    #[test]
    fn sigma_max_matches_dense_oracle() {
        for (n, p, seed) in [(40, 0.8, 1u64), (60, 0.5, 2), (200, 0.6, 3)] {
            let params = ModelParams::new(n, 1.0, p, 0.0).unwrap();
            let g = sample_null(&params, seed);
            let dense = dense_hermitian_eigs(&g).unwrap();
            let top = dense[0].max(-dense[dense.len() - 1]);
            let got = sigma_max(&g, &PowerOpts::with_seed(seed)).unwrap();
            assert!(
                (got - top).abs() <= 1e-6 * top.max(1.0),
                "n={n}: power {got} vs dense {top}"
            );
        }
    }

    #[test]
    fn dense_oracle_spectrum_is_symmetric() {
        let params = ModelParams::new(30, 1.0, 0.7, 0.0).unwrap();
        let g = sample_null(&params, 9);
        let eigs = dense_hermitian_eigs(&g).unwrap();
        assert_eq!(eigs.len(), 30);
        for i in 0..eigs.len() {
            let mirror = -eigs[eigs.len() - 1 - i];
            assert!(
                (eigs[i] - mirror).abs() < 1e-8,
                "spectrum asymmetric at {i}: {} vs {}",
                eigs[i],
                mirror
            );
        }
    }

    #[test]
    fn top_eigenpair_two_vertices() {
        let mut g = DirectedAdjacency::zeros(2);
        g.set_edge(0, 1);
        let pair = top_eigenpair(&g, &PowerOpts::default()).unwrap();
        assert!((pair.value - 1.0).abs() < 1e-8);
        // Eigenvector proportional to (1, -i): check v1 = -i v0 up to phase.
        let (re0, im0) = (pair.vector.re[0], pair.vector.im[0]);
        let (re1, im1) = (pair.vector.re[1], pair.vector.im[1]);
        // -i (re0 + i im0) = im0 - i re0.
        assert!((re1 - im0).abs() < 1e-7 && (im1 + re0).abs() < 1e-7);
    }

    #[test]
    fn top_eigenpair_matches_analytic_on_ordering_matrix() {
        let l = 64;
        let g = ordering_tournament(l);
        let pair = top_eigenpair(&g, &PowerOpts::default()).unwrap();
        let analytic = analytic_ordering_eigs(l);
        assert!((pair.value - analytic[0].0).abs() < 1e-7);
        let mut v_ref = analytic[0].1.clone();
        v_ref.normalize();
        let (dre, dim) = v_ref.herm_dot(&pair.vector);
        let overlap = (dre * dre + dim * dim).sqrt();
        assert!(overlap >= 1.0 - 1e-8, "overlap {overlap}");
        // Rayleigh quotient of the returned vector is real.
        let av = iy_apply(&g, &pair.vector);
        let (_, rho_im) = pair.vector.herm_dot(&av);
        assert!(rho_im.abs() <= 1e-10);
        // Residual field is honest.
        let mut err2 = 0.0;
        for i in 0..l {
            let dre = av.re[i] - pair.value * pair.vector.re[i];
            let dim = av.im[i] - pair.value * pair.vector.im[i];
            err2 += dre * dre + dim * dim;
        }
        assert!((err2.sqrt() - pair.residual).abs() < 1e-9);
    }

    #[test]
    fn rotate_preserves_norm() {
        let mut v = ComplexVector::random_unit(16, 5);
        v.rotate(1.234);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }
}
