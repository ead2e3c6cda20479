//! Second adjacency eigenvalue of regular graphs and the Cheeger check.
//!
//! Two routes:
//! * dense: full symmetric eigendecomposition. Graphs above [`DENSE_MAX`]
//!   vertices can still be solved densely when they carry a free action of an
//!   abelian group of automorphisms whose orbit space fits under the cap; the
//!   adjacency then splits into one Hermitian block per character.
//! * iterative: block orthogonal iteration with a Chebyshev filter that damps
//!   `[-d, theta_min]`, the constant vector deflated after every operator
//!   application, and a Rayleigh-Ritz projection per outer step.
//!
//! All reductions over vertices are chunked with a fixed chunk size and the
//! chunk partials are combined in order, so results do not depend on the
//! number of worker threads.

use std::collections::VecDeque;
use std::fmt;

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::ExactRatio;
use crate::slcayley::BoundaryReport;

pub const DENSE_MAX: usize = 5_000;
pub const ITERATIVE_MAX: usize = 10_000_000;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 100_000;
pub const CHEEGER_SLACK: f64 = 1e-9;
const CHUNK: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("vector has length {got}, graph has {expected} vertices")]
    LengthMismatch { got: usize, expected: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("{n} vertices exceed the {mode} cap {cap}")]
    TooLarge { mode: Method, n: usize, cap: usize },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("reports describe different graphs: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Iterative,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Dense => "dense",
            Method::Iterative => "iterative",
        })
    }
}

/// A free action of `Z_{m_1} x ... x Z_{m_r}` by graph automorphisms.
#[derive(Debug, Clone)]
struct AbelianSymmetry {
    orders: Vec<usize>,
    /// For every vertex: (orbit index, flat group index) with
    /// `v = sigma^a(rep)`, `a` in mixed radix with `a_1` least significant.
    place: Vec<(u32, u32)>,
    reps: Vec<u32>,
}

impl AbelianSymmetry {
    fn group_order(&self) -> usize {
        self.orders.iter().product()
    }

    fn digits(&self, mut flat: usize) -> Vec<usize> {
        self.orders
            .iter()
            .map(|&m| {
                let d = flat % m;
                flat /= m;
                d
            })
            .collect()
    }

    fn flat(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.orders).rev().fold(0, |acc, (&d, &m)| acc * m + d)
    }
}

/// A d-regular undirected graph as a flat neighbour table.
#[derive(Debug, Clone)]
pub struct RegularGraph {
    n: usize,
    d: usize,
    nbrs: Vec<u32>,
    symmetry: Option<AbelianSymmetry>,
}

impl RegularGraph {
    /// `nbrs[u*d .. (u+1)*d]` are the neighbours of `u`; the table must be
    /// symmetric as a multiset relation.
    pub fn from_neighbors(d: usize, nbrs: Vec<u32>) -> Result<Self, SpectralError> {
        if d == 0 || !nbrs.len().is_multiple_of(d) {
            return Err(SpectralError::InvalidGraph(format!(
                "table of length {} is not a multiple of degree {d}",
                nbrs.len()
            )));
        }
        let n = nbrs.len() / d;
        if nbrs.iter().any(|&v| v as usize >= n) {
            return Err(SpectralError::InvalidGraph("neighbour out of range".into()));
        }
        let g = RegularGraph {
            n,
            d,
            nbrs,
            symmetry: None,
        };
        let count = |u: usize, v: u32| g.neighbors(u).iter().filter(|&&x| x == v).count();
        let symmetric = (0..n).into_par_iter().all(|u| {
            g.neighbors(u)
                .iter()
                .all(|&v| count(u, v) == count(v as usize, u as u32))
        });
        if !symmetric {
            return Err(SpectralError::InvalidGraph("adjacency is not symmetric".into()));
        }
        Ok(g)
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        let nbrs = (0..n)
            .flat_map(|u| [((u + 1) % n) as u32, ((u + n - 1) % n) as u32])
            .collect();
        RegularGraph::from_neighbors(2, nbrs).expect("cycle is symmetric")
    }

    pub fn complete(m: usize) -> Self {
        assert!(m >= 2);
        let nbrs = (0..m)
            .flat_map(|u| (0..m).filter(move |&v| v != u).map(|v| v as u32))
            .collect();
        RegularGraph::from_neighbors(m - 1, nbrs).expect("complete graph is symmetric")
    }

    /// Attaches pairwise commuting automorphisms generating a group that
    /// acts freely; the dense route uses it to split the matrix.
    pub fn with_symmetry(mut self, perms: &[Vec<u32>]) -> Result<Self, SpectralError> {
        let bad = |m: &str| Err(SpectralError::InvalidGraph(m.to_string()));
        if perms.is_empty() {
            return bad("no automorphisms given");
        }
        for perm in perms {
            if perm.len() != self.n {
                return Err(SpectralError::LengthMismatch {
                    got: perm.len(),
                    expected: self.n,
                });
            }
            let is_aut = (0..self.n).into_par_iter().all(|u| {
                let mut a: Vec<u32> = self.neighbors(u).iter().map(|&v| perm[v as usize]).collect();
                let mut b: Vec<u32> = self.neighbors(perm[u] as usize).to_vec();
                a.sort_unstable();
                b.sort_unstable();
                a == b
            });
            if !is_aut {
                return bad("permutation is not an automorphism");
            }
        }
        for (i, p) in perms.iter().enumerate() {
            for q in &perms[i + 1..] {
                if (0..self.n).any(|u| p[q[u] as usize] != q[p[u] as usize]) {
                    return bad("automorphisms do not commute");
                }
            }
        }
        let orders: Vec<usize> = perms
            .iter()
            .map(|p| {
                let mut v = p[0] as usize;
                let mut m = 1;
                while v != 0 && m <= self.n {
                    v = p[v] as usize;
                    m += 1;
                }
                m
            })
            .collect();
        for (p, &m) in perms.iter().zip(&orders) {
            let periodic = (0..self.n).into_par_iter().all(|u| {
                let mut v = u;
                for _ in 0..m {
                    v = p[v] as usize;
                }
                v == u
            });
            if !periodic {
                return bad("automorphism orders differ between vertices");
            }
        }
        let mut sym = AbelianSymmetry {
            orders,
            place: vec![(u32::MAX, 0); self.n],
            reps: Vec::new(),
        };
        let big_m = sym.group_order();
        if !self.n.is_multiple_of(big_m) {
            return bad("group order does not divide the vertex count");
        }
        let mut orbit = vec![0u32; big_m];
        for u in 0..self.n {
            if sym.place[u].0 != u32::MAX {
                continue;
            }
            let r = sym.reps.len() as u32;
            sym.reps.push(u as u32);
            for f in 0..big_m {
                let v = if f == 0 {
                    u as u32
                } else {
                    let mut dg = sym.digits(f);
                    let k = dg.iter().position(|&x| x > 0).expect("nonzero index");
                    dg[k] -= 1;
                    perms[k][orbit[sym.flat(&dg)] as usize]
                };
                if sym.place[v as usize].0 != u32::MAX {
                    return bad("action is not free");
                }
                sym.place[v as usize] = (r, f as u32);
                orbit[f] = v;
            }
        }
        self.symmetry = Some(sym);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Order of the attached symmetry group, if any.
    pub fn symmetry_order(&self) -> Option<usize> {
        self.symmetry.as_ref().map(|s| s.group_order())
    }

    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.nbrs[u * self.d..(u + 1) * self.d]
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbors(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                    queue.push_back(v as usize);
                }
            }
        }
        count == self.n
    }
}

/// `(Av)[u] = sum of v over the neighbours of u`.
pub fn adjacency_apply(g: &RegularGraph, v: &[f64]) -> Result<Vec<f64>, SpectralError> {
    if v.len() != g.n {
        return Err(SpectralError::LengthMismatch {
            got: v.len(),
            expected: g.n,
        });
    }
    Ok((0..g.n)
        .into_par_iter()
        .map(|u| g.neighbors(u).iter().map(|&w| v[w as usize]).sum())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub graph: String,
    pub n: usize,
    pub d: usize,
    pub lambda2: f64,
    pub gap: f64,
    pub cheeger_lower: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_upper: Option<ExactRatio>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cheeger_ok: Option<bool>,
    pub method: Method,
    /// `||A x - lambda2 x|| / d` for the returned eigenvector.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Number of Hermitian blocks the dense route used (1 when unsplit).
    pub blocks: usize,
}

impl SpectralReport {
    fn new(g: &RegularGraph, method: Method, lambda2: f64, residual: f64) -> Self {
        let gap = g.d as f64 - lambda2;
        SpectralReport {
            graph: String::new(),
            n: g.n,
            d: g.d,
            lambda2,
            gap,
            cheeger_lower: gap / 2.0,
            h_upper: None,
            cheeger_ok: None,
            method,
            residual,
            iterations: 0,
            converged: true,
            blocks: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub block: usize,
    /// Chebyshev filter degree per outer step; below 2 plain shifted
    /// orthogonal iteration on `A + dI` is used.
    pub degree: usize,
}

impl Default for IterOptions {
    fn default() -> Self {
        IterOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: 0x5eed,
            block: 16,
            degree: 12,
        }
    }
}

pub fn lambda2(g: &RegularGraph, method: Method) -> Result<SpectralReport, SpectralError> {
    match method {
        Method::Dense => lambda2_dense(g),
        Method::Iterative => lambda2_iterative(g, IterOptions::default()),
    }
}

fn check_connected(g: &RegularGraph) -> Result<(), SpectralError> {
    if g.n < 2 || !g.is_connected() {
        return Err(SpectralError::Disconnected);
    }
    Ok(())
}

pub fn lambda2_dense(g: &RegularGraph) -> Result<SpectralReport, SpectralError> {
    check_connected(g)?;
    if g.n <= DENSE_MAX {
        return Ok(dense_unsplit(g));
    }
    match &g.symmetry {
        Some(sym) if sym.reps.len() <= DENSE_MAX => Ok(dense_split(g, sym)),
        _ => Err(SpectralError::TooLarge {
            mode: Method::Dense,
            n: g.n,
            cap: DENSE_MAX,
        }),
    }
}

fn dense_unsplit(g: &RegularGraph) -> SpectralReport {
    let n = g.n;
    let mut a = DMatrix::<f64>::zeros(n, n);
    for u in 0..n {
        for &v in g.neighbors(u) {
            a[(u, v as usize)] += 1.0;
        }
    }
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let k = order[1];
    let lambda = eig.eigenvalues[k];
    let x = eig.eigenvectors.column(k);
    let r = (&a * x - x * lambda).norm() / g.d as f64;
    SpectralReport::new(g, Method::Dense, lambda, r)
}

fn character_block(g: &RegularGraph, sym: &AbelianSymmetry, j: &[usize]) -> Block2 {
    let b = sym.reps.len();
    let real = j.iter().zip(&sym.orders).all(|(&jk, &m)| (2 * jk) % m == 0);
    let phase = |flat: u32| -> f64 {
        let a = sym.digits(flat as usize);
        let turns: f64 = a
            .iter()
            .zip(j)
            .zip(&sym.orders)
            .map(|((&ak, &jk), &m)| ((ak * jk) % m) as f64 / m as f64)
            .sum();
        2.0 * std::f64::consts::PI * turns
    };
    if real {
        let mut h = DMatrix::<f64>::zeros(b, b);
        for (r, &rep) in sym.reps.iter().enumerate() {
            for &v in g.neighbors(rep as usize) {
                let (s, a) = sym.place[v as usize];
                h[(r, s as usize)] += phase(a).cos().round();
            }
        }
        Block2::Real(h)
    } else {
        let mut h = DMatrix::<Complex<f64>>::zeros(b, b);
        for (r, &rep) in sym.reps.iter().enumerate() {
            for &v in g.neighbors(rep as usize) {
                let (s, a) = sym.place[v as usize];
                let t = phase(a);
                h[(r, s as usize)] += Complex::new(t.cos(), t.sin());
            }
        }
        Block2::Complex(h)
    }
}

enum Block2 {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex<f64>>),
}

impl Block2 {
    fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = match self {
            Block2::Real(h) => h.symmetric_eigenvalues().iter().copied().collect(),
            Block2::Complex(h) => h.symmetric_eigenvalues().iter().copied().collect(),
        };
        v.sort_by(|x, y| y.total_cmp(x));
        v
    }

    /// `||H x - lambda x||` for the eigenvector closest to `lambda`.
    fn residual(&self, lambda: f64) -> f64 {
        fn pick<T: nalgebra::ComplexField<RealField = f64>>(h: &DMatrix<T>, lambda: f64) -> f64 {
            let eig = h.clone().symmetric_eigen();
            let k = (0..eig.eigenvalues.len())
                .min_by(|&a, &b| {
                    (eig.eigenvalues[a] - lambda)
                        .abs()
                        .total_cmp(&(eig.eigenvalues[b] - lambda).abs())
                })
                .expect("non-empty block");
            let x = eig.eigenvectors.column(k);
            (h * &x - x * T::from_real(eig.eigenvalues[k])).norm()
        }
        match self {
            Block2::Real(h) => pick(h, lambda),
            Block2::Complex(h) => pick(h, lambda),
        }
    }
}

fn dense_split(g: &RegularGraph, sym: &AbelianSymmetry) -> SpectralReport {
    let big_m = sym.group_order();
    // conjugate characters give conjugate blocks with the same spectrum
    let chars: Vec<usize> = (0..big_m)
        .filter(|&f| {
            let conj: Vec<usize> = sym
                .digits(f)
                .iter()
                .zip(&sym.orders)
                .map(|(&jk, &m)| (m - jk) % m)
                .collect();
            f <= sym.flat(&conj)
        })
        .collect();
    let spectra: Vec<Vec<f64>> = chars
        .par_iter()
        .map(|&f| character_block(g, sym, &sym.digits(f)).eigenvalues())
        .collect();
    // the trivial character carries the constant vector
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (c, vals) in spectra.iter().enumerate() {
        let skip = usize::from(chars[c] == 0);
        if let Some(&v) = vals.get(skip) {
            if v > best.0 {
                best = (v, c);
            }
        }
    }
    let (lambda, c) = best;
    let block = character_block(g, sym, &sym.digits(chars[c]));
    let mut rep = SpectralReport::new(g, Method::Dense, lambda, block.residual(lambda) / g.d as f64);
    rep.blocks = big_m;
    rep
}

/// Deterministic parallel sum: fixed chunks, partials combined in order.
fn chunked<F>(n: usize, width: usize, f: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    let partials: Vec<Vec<f64>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; width];
            for u in c * CHUNK..((c + 1) * CHUNK).min(n) {
                f(u, &mut acc);
            }
            acc
        })
        .collect();
    let mut out = vec![0.0; width];
    for p in partials {
        for (o, x) in out.iter_mut().zip(p) {
            *o += x;
        }
    }
    out
}

/// Row-major n x k block of vectors.
struct Block {
    n: usize,
    k: usize,
    data: Vec<f64>,
}

impl Block {
    fn row(&self, u: usize) -> &[f64] {
        &self.data[u * self.k..(u + 1) * self.k]
    }

    fn apply(&self, g: &RegularGraph, shift: f64) -> Block {
        let k = self.k;
        let mut data = vec![0.0; self.n * k];
        data.par_chunks_mut(k).enumerate().for_each(|(u, out)| {
            for &v in g.neighbors(u) {
                for (o, x) in out.iter_mut().zip(self.row(v as usize)) {
                    *o += x;
                }
            }
            if shift != 0.0 {
                for (o, x) in out.iter_mut().zip(self.row(u)) {
                    *o += shift * x;
                }
            }
        });
        Block { n: self.n, k, data }
    }

    fn deflate_constant(&mut self) {
        let k = self.k;
        let sums = chunked(self.n, k, |u, acc| {
            for (a, x) in acc.iter_mut().zip(self.row(u)) {
                *a += x;
            }
        });
        let mean: Vec<f64> = sums.iter().map(|s| s / self.n as f64).collect();
        self.data.par_chunks_mut(k).for_each(|row| {
            for (x, m) in row.iter_mut().zip(&mean) {
                *x -= m;
            }
        });
    }

    /// `self^T other` as a k x k matrix.
    fn inner(&self, other: &Block) -> DMatrix<f64> {
        let k = self.k;
        let flat = chunked(self.n, k * k, |u, acc| {
            let (a, b) = (self.row(u), other.row(u));
            for i in 0..k {
                for j in 0..k {
                    acc[i * k + j] += a[i] * b[j];
                }
            }
        });
        DMatrix::from_row_slice(k, k, &flat)
    }

    fn times(&self, m: &DMatrix<f64>) -> Block {
        let k = self.k;
        let mut data = vec![0.0; self.n * k];
        data.par_chunks_mut(k).enumerate().for_each(|(u, out)| {
            let row = self.row(u);
            for (j, o) in out.iter_mut().enumerate() {
                *o = (0..k).map(|i| row[i] * m[(i, j)]).sum();
            }
        });
        Block { n: self.n, k, data }
    }

    /// Cholesky QR, twice for stability. Returns false on breakdown.
    fn orthonormalize(&mut self) -> bool {
        for _ in 0..2 {
            let gram = self.inner(self);
            let Some(chol) = gram.cholesky() else {
                return false;
            };
            let Some(rinv) = chol.l().transpose().try_inverse() else {
                return false;
            };
            *self = self.times(&rinv);
        }
        true
    }
}

pub fn lambda2_iterative(g: &RegularGraph, opts: IterOptions) -> Result<SpectralReport, SpectralError> {
    check_connected(g)?;
    if g.n > ITERATIVE_MAX {
        return Err(SpectralError::TooLarge {
            mode: Method::Iterative,
            n: g.n,
            cap: ITERATIVE_MAX,
        });
    }
    let n = g.n;
    let d = g.d as f64;
    let k = opts.block.clamp(1, n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x = Block {
        n,
        k,
        data: (0..n * k).map(|_| rng.random_range(-1.0..1.0)).collect(),
    };
    x.deflate_constant();
    x.orthonormalize();

    let mut theta = 0.0;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let ax = x.apply(g, 0.0);
        // Rayleigh-Ritz on span(x)
        let h = x.inner(&ax);
        let h = (&h + h.transpose()) * 0.5;
        let eig = h.symmetric_eigen();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let v = DMatrix::from_fn(k, k, |r, c| eig.eigenvectors[(r, order[c])]);
        x = x.times(&v);
        let ax = ax.times(&v);
        theta = eig.eigenvalues[order[0]];
        let theta_min = eig.eigenvalues[order[k - 1]];
        let r2 = chunked(n, 1, |u, acc| {
            let e = ax.row(u)[0] - theta * x.row(u)[0];
            acc[0] += e * e;
        })[0];
        residual = r2.sqrt() / d;
        if residual <= opts.tol {
            break;
        }
        // Chebyshev filter damping [-d, hi]; falls back to a shifted power
        // step while the Ritz values have not separated yet.
        let hi = theta_min.min(theta - 1e-3 * d);
        let mut y = if opts.degree >= 2 && hi > -d {
            chebyshev_filter(g, &x, &ax, opts.degree, -d, hi)
        } else {
            Block {
                n,
                k,
                data: ax.data.iter().zip(&x.data).map(|(a, b)| a + d * b).collect(),
            }
        };
        y.deflate_constant();
        if !y.orthonormalize() {
            break;
        }
        x = y;
    }
    let mut rep = SpectralReport::new(g, Method::Iterative, theta, residual);
    rep.iterations = iterations;
    rep.converged = residual <= opts.tol;
    Ok(rep)
}

/// `T_m` of `(A - c)/e` applied to `x`, with `c, e` mapping `[lo, hi]` to
/// `[-1, 1]`; `ax = A x` is passed in to save one application.
fn chebyshev_filter(g: &RegularGraph, x: &Block, ax: &Block, m: usize, lo: f64, hi: f64) -> Block {
    let e = (hi - lo) / 2.0;
    let c = (hi + lo) / 2.0;
    let combine = |a: &Block, b: &Block, prev: Option<&Block>, scale: f64| -> Block {
        let data = match prev {
            Some(p) => a
                .data
                .par_iter()
                .zip(b.data.par_iter())
                .zip(p.data.par_iter())
                .map(|((ai, bi), pi)| scale * (ai - c * bi) / e - pi)
                .collect(),
            None => a
                .data
                .par_iter()
                .zip(b.data.par_iter())
                .map(|(ai, bi)| scale * (ai - c * bi) / e)
                .collect(),
        };
        let mut out = Block { n: a.n, k: a.k, data };
        out.deflate_constant();
        out
    };
    let mut prev = Block {
        n: x.n,
        k: x.k,
        data: x.data.clone(),
    };
    let mut cur = combine(ax, x, None, 1.0);
    for _ in 2..=m {
        let acur = cur.apply(g, 0.0);
        let next = combine(&acur, &cur, Some(&prev), 2.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `(d - lambda2)/2 <= |dS|/|S| + slack`. The cut ratio bounds the
/// isoperimetric number from above because `|S| <= |V|/2`.
pub fn cheeger_consistency(spec: &SpectralReport, boundary: &BoundaryReport) -> Result<bool, SpectralError> {
    if Some(spec.n as u128) != boundary.group_order || spec.d != boundary.degree {
        return Err(SpectralError::Mismatch(format!(
            "spectral n={} d={}, boundary |G|={:?} d={}",
            spec.n, spec.d, boundary.group_order, boundary.degree
        )));
    }
    Ok(cheeger_holds(spec, boundary.ratio))
}

pub fn cheeger_holds(spec: &SpectralReport, ratio: ExactRatio) -> bool {
    spec.cheeger_lower <= ratio.to_f64() + CHEEGER_SLACK
}

/// Fills the Cheeger fields of a spectral report.
pub fn attach_boundary(spec: &mut SpectralReport, boundary: &BoundaryReport) -> Result<bool, SpectralError> {
    let ok = cheeger_consistency(spec, boundary)?;
    spec.h_upper = Some(boundary.ratio);
    spec.cheeger_ok = Some(ok);
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cycle_lambda2_closed_form() {
        for n in [5usize, 8, 13, 40] {
            let g = RegularGraph::cycle(n);
            let want = 2.0 * (2.0 * std::f64::consts::PI / n as f64).cos();
            let dense = lambda2_dense(&g).unwrap();
            assert!((dense.lambda2 - want).abs() < 1e-10, "n={n}");
            let it = lambda2_iterative(&g, IterOptions { block: 4, ..Default::default() }).unwrap();
            assert!(it.converged);
            assert!((it.lambda2 - want).abs() < 1e-6 * 2.0, "n={n}: {}", it.lambda2);
        }
    }

    #[test]
    fn complete_graph_second_eigenvalue() {
        for m in [3usize, 5, 9] {
            let g = RegularGraph::complete(m);
            let r = lambda2_dense(&g).unwrap();
            assert!((r.lambda2 + 1.0).abs() < 1e-10);
            assert!((r.gap - m as f64).abs() < 1e-10);
            let it = lambda2_iterative(&g, IterOptions::default()).unwrap();
            assert!((it.lambda2 + 1.0).abs() < 1e-6 * (m - 1) as f64);
        }
    }

    #[test]
    fn split_dense_matches_unsplit() {
        // rotation of the cycle acts freely; every block is 1x1 or small
        let n = 30;
        let g = RegularGraph::cycle(n);
        let rot: Vec<u32> = (0..n).map(|u| ((u + 6) % n) as u32).collect();
        let g = g.with_symmetry(&[rot]).unwrap();
        assert_eq!(g.symmetry_order(), Some(5));
        let sym = g.symmetry.clone().unwrap();
        let split = dense_split(&g, &sym);
        let plain = dense_unsplit(&g);
        assert!((split.lambda2 - plain.lambda2).abs() < 1e-10);
        assert_eq!(split.blocks, 5);
    }

    #[test]
    fn split_dense_two_commuting_shifts() {
        // 12 x 10 torus, shifted by 4 along one axis and 5 along the other
        let (a, b) = (12usize, 10usize);
        let at = |x: usize, y: usize| ((x % a) * b + (y % b)) as u32;
        let mut nbrs = Vec::new();
        for x in 0..a {
            for y in 0..b {
                nbrs.extend([at(x + 1, y), at(x + a - 1, y), at(x, y + 1), at(x, y + b - 1)]);
            }
        }
        let g = RegularGraph::from_neighbors(4, nbrs).unwrap();
        let sx: Vec<u32> = (0..a * b).map(|u| at(u / b + 4, u % b)).collect();
        let sy: Vec<u32> = (0..a * b).map(|u| at(u / b, u % b + 5)).collect();
        let g = g.with_symmetry(&[sx, sy]).unwrap();
        assert_eq!(g.symmetry_order(), Some(6));
        let sym = g.symmetry.clone().unwrap();
        let split = dense_split(&g, &sym);
        let plain = dense_unsplit(&g);
        assert!((split.lambda2 - plain.lambda2).abs() < 1e-10);
        let want = 2.0 + 2.0 * (2.0 * std::f64::consts::PI / 12.0).cos();
        assert!((plain.lambda2 - want).abs() < 1e-10);
    }

    #[test]
    fn bad_inputs() {
        assert!(RegularGraph::from_neighbors(1, vec![1, 1]).is_err());
        assert!(RegularGraph::from_neighbors(2, vec![1, 2, 0, 0, 1, 1]).is_err());
        let two_triangles: Vec<u32> = vec![1, 2, 0, 2, 0, 1, 4, 5, 3, 5, 3, 4];
        let g = RegularGraph::from_neighbors(2, two_triangles).unwrap();
        assert_eq!(lambda2_dense(&g).unwrap_err(), SpectralError::Disconnected);
        let c = RegularGraph::cycle(6);
        assert!(adjacency_apply(&c, &[1.0; 5]).is_err());
        let reflect: Vec<u32> = (0..6).map(|u| ((6 - u) % 6) as u32).collect();
        // reflection fixes vertices 0 and 3, so orbits have unequal sizes
        assert!(c.with_symmetry(&[reflect]).is_err());
    }

    #[test]
    fn adjacency_examples() {
        let g = RegularGraph::complete(4);
        assert_eq!(adjacency_apply(&g, &[1.0; 4]).unwrap(), vec![3.0; 4]);
        let e0 = [1.0, 0.0, 0.0, 0.0];
        assert_eq!(adjacency_apply(&g, &e0).unwrap(), vec![0.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn non_convergence_is_flagged() {
        let g = RegularGraph::cycle(200);
        let r = lambda2_iterative(&g, IterOptions { max_iter: 3, block: 2, ..Default::default() }).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }

    proptest! {
        #[test]
        fn adjacency_is_symmetric(
            u in prop::collection::vec(-1.0..1.0f64, 12),
            v in prop::collection::vec(-1.0..1.0f64, 12),
        ) {
            let g = RegularGraph::cycle(12);
            let au = adjacency_apply(&g, &u).unwrap();
            let av = adjacency_apply(&g, &v).unwrap();
            let lhs: f64 = au.iter().zip(&v).map(|(a, b)| a * b).sum();
            let rhs: f64 = u.iter().zip(&av).map(|(a, b)| a * b).sum();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
