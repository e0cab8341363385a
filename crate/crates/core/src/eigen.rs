//! Block preconditioned eigensolver (LOBPCG) for the smallest eigenvalue of a
//! Hermitian pencil `K x = lambda G x` with `G` positive definite on the
//! admissible subspace.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::scalar::{axpy, dot, Scalar};

/// A Hermitian pencil `(K, G)` restricted to an admissible subspace.
pub trait Pencil<S: Scalar> {
    fn dim(&self) -> usize;
    /// Overwrites `kx = K x` and `gx = G x`.
    fn apply(&self, x: &[S], kx: &mut [S], gx: &mut [S]);
    /// Approximate `G^{-1} r`.
    fn precondition(&self, r: &[S], out: &mut [S]);
    /// Orthogonal projection onto the admissible subspace.
    fn project(&self, x: &mut [S]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LobpcgOptions {
    pub block: usize,
    /// Target for `|K x - lambda G x|` in the preconditioner norm, `x`
    /// `G`-normalized.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// A stagnated iteration is accepted once its residual is below this.
    /// Stagnation means that over the last `STALL_WINDOW` iterations the
    /// residual has not halved or the Ritz value moved by at most
    /// `tol * max(1, |value|)`.
    pub stall_tol: f64,
}

impl Default for LobpcgOptions {
    fn default() -> Self {
        Self { block: 4, tol: 1e-9, max_iter: 2000, seed: 0x5eed_0f_e1a5, stall_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair<S> {
    pub value: f64,
    /// `G`-normalized eigenvector.
    pub vector: Vec<S>,
    pub residual: f64,
    pub iterations: usize,
    /// All Ritz vectors of the final block, ascending; a warm start for a
    /// nearby pencil.
    pub block: Vec<Vec<S>>,
}

/// Tracked `K` and `G` images are recomputed this often to stop drift.
const REFRESH_EVERY: usize = 16;

/// Directions whose normalized Gram eigenvalue falls below this are dropped
/// from the Rayleigh-Ritz basis.
const GRAM_DROP: f64 = 1e-12;

struct Block<S> {
    v: Vec<Vec<S>>,
    k: Vec<Vec<S>>,
    g: Vec<Vec<S>>,
}

impl<S: Scalar> Block<S> {
    fn empty() -> Self {
        Self { v: Vec::new(), k: Vec::new(), g: Vec::new() }
    }

    fn len(&self) -> usize {
        self.v.len()
    }

    fn fresh<P: Pencil<S>>(pencil: &P, v: Vec<Vec<S>>) -> Self {
        let d = pencil.dim();
        let mut k = Vec::with_capacity(v.len());
        let mut g = Vec::with_capacity(v.len());
        for x in &v {
            let mut kx = vec![S::zero(); d];
            let mut gx = vec![S::zero(); d];
            pencil.apply(x, &mut kx, &mut gx);
            k.push(kx);
            g.push(gx);
        }
        Self { v, k, g }
    }

    fn extend(&mut self, other: &Block<S>) {
        self.v.extend(other.v.iter().cloned());
        self.k.extend(other.k.iter().cloned());
        self.g.extend(other.g.iter().cloned());
    }
}

/// `sum_i cols[i] * c[(offset + i, j)]` for each requested column `j`.
fn combine<S: Scalar>(cols: &[Vec<S>], c: &DMatrix<S>, offset: usize, ncols: usize) -> Vec<Vec<S>> {
    let d = cols.first().map_or(0, Vec::len);
    (0..ncols)
        .map(|j| {
            let mut out = vec![S::zero(); d];
            for (i, col) in cols.iter().enumerate() {
                let w = c[(offset + i, j)];
                if w != S::zero() {
                    for (o, &x) in out.iter_mut().zip(col) {
                        *o += w * x;
                    }
                }
            }
            out
        })
        .collect()
}

fn gram<S: Scalar>(left: &[Vec<S>], right: &[Vec<S>]) -> DMatrix<S> {
    let m = left.len();
    let mut a = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = dot(&left[i], &right[j]);
            a[(i, j)] = v;
            a[(j, i)] = v.conjugate();
        }
    }
    a
}

/// A column keeping less than this fraction of its `G`-norm after
/// projection is treated as linearly dependent.
const ORTHO_DROP: f64 = 1e-10;

/// `G`-orthonormal basis of span(b) with the span of the (orthonormal)
/// `priors` projected out; two passes of each step.
fn orthonormalize<S: Scalar>(mut b: Block<S>, priors: &[&Block<S>]) -> Block<S> {
    let g_norm = |b: &Block<S>, j: usize| dot(&b.v[j], &b.g[j]).real().max(0.0).sqrt();
    let project = |b: &mut Block<S>, j: usize| {
        for q in priors {
            for i in 0..q.len() {
                let c = -dot(&q.v[i], &b.g[j]);
                axpy(c, &q.v[i], &mut b.v[j]);
                axpy(c, &q.k[i], &mut b.k[j]);
                axpy(c, &q.g[i], &mut b.g[j]);
            }
        }
    };
    let mut keep = Vec::with_capacity(b.len());
    for j in 0..b.len() {
        let before = g_norm(&b, j);
        project(&mut b, j);
        let mut after = g_norm(&b, j);
        // a second pass only when the first cancelled most of the column
        if after < 0.5 * before {
            project(&mut b, j);
            after = g_norm(&b, j);
        }
        if after > ORTHO_DROP * before {
            keep.push(j);
        }
    }
    if keep.len() < b.len() {
        let pick = |cols: &[Vec<S>]| -> Vec<Vec<S>> { keep.iter().map(|&j| cols[j].clone()).collect() };
        b = Block { v: pick(&b.v), k: pick(&b.k), g: pick(&b.g) };
    }
    for _ in 0..2 {
        if b.len() == 0 {
            break;
        }
        let e = gram(&b.v, &b.g).symmetric_eigen();
        let max = e.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let min = e.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let cols: Vec<usize> = (0..b.len()).filter(|&i| e.eigenvalues[i] > GRAM_DROP * max).collect();
        let mut y = DMatrix::zeros(b.len(), cols.len());
        for (c, &i) in cols.iter().enumerate() {
            let inv = 1.0 / e.eigenvalues[i].sqrt();
            for row in 0..b.len() {
                y[(row, c)] = e.eigenvectors[(row, i)].scale(inv);
            }
        }
        let r = cols.len();
        b = Block { v: combine(&b.v, &y, 0, r), k: combine(&b.k, &y, 0, r), g: combine(&b.g, &y, 0, r) };
        if min > 1e-4 * max {
            break;
        }
    }
    b
}

/// Rayleigh-Ritz on span(basis): returns ascending Ritz values and the
/// coefficient matrix (columns `G`-orthonormal Ritz vectors).
fn rayleigh_ritz<S: Scalar>(basis: &Block<S>) -> Option<(Vec<f64>, DMatrix<S>)> {
    let m = basis.len();
    let mut b = gram(&basis.v, &basis.g);
    // unit diagonal scaling, folded into the coefficient matrix below
    let scale: Vec<f64> = (0..m).map(|i| 1.0 / b[(i, i)].real().max(f64::MIN_POSITIVE).sqrt()).collect();
    for i in 0..m {
        for j in 0..m {
            b[(i, j)] = b[(i, j)].scale(scale[i] * scale[j]);
        }
    }
    let be = b.symmetric_eigen();
    let bmax = be.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..m).filter(|&i| be.eigenvalues[i] > GRAM_DROP * bmax).collect();
    if keep.is_empty() {
        return None;
    }
    let r = keep.len();
    let mut y = DMatrix::zeros(m, r);
    for (c, &i) in keep.iter().enumerate() {
        let inv = 1.0 / be.eigenvalues[i].sqrt();
        for row in 0..m {
            y[(row, c)] = be.eigenvectors[(row, i)].scale(inv * scale[row]);
        }
    }
    let a = gram(&basis.v, &basis.k);
    let reduced = y.adjoint() * &a * &y;
    let reduced = (&reduced + reduced.adjoint()).scale(0.5);
    let re = reduced.symmetric_eigen();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| re.eigenvalues[i].total_cmp(&re.eigenvalues[j]));
    let values = order.iter().map(|&i| re.eigenvalues[i]).collect();
    let mut u = DMatrix::zeros(r, r);
    for (c, &i) in order.iter().enumerate() {
        u.set_column(c, &re.eigenvectors.column(i));
    }
    Some((values, y * u))
}

fn random_block<S: Scalar, P: Pencil<S>>(pencil: &P, m: usize, seed: u64) -> Vec<Vec<S>> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut uniform = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
    (0..m)
        .map(|_| {
            let mut x: Vec<S> = (0..pencil.dim())
                .map(|_| {
                    let re = uniform();
                    let im = uniform();
                    S::from_c64(Complex64::new(re, im))
                })
                .collect();
            pencil.project(&mut x);
            x
        })
        .collect()
}

/// Smallest eigenpair of the pencil.
///
/// Starts from a seeded random block of `opts.block` vectors. If that has not
/// converged after `STALL_ITERATIONS`, the iteration restarts from the
/// current iterates padded to `EXPANDED_FACTOR` times the block size, which
/// speeds up tight eigenvalue clusters such as the shear modes of a
/// homogeneous isotropic cell. Inside such a cluster the iteration may
/// stagnate; it is then stopped at `stall_tol` and the returned residual
/// says so. The value is always the Rayleigh quotient of an admissible
/// vector.
pub fn lobpcg_min<S: Scalar, P: Pencil<S>>(pencil: &P, opts: &LobpcgOptions) -> Result<EigenPair<S>> {
    lobpcg_min_from(pencil, opts, Vec::new())
}

/// As [`lobpcg_min`], starting from `start` (projected, then padded with
/// seeded random vectors to the block size).
pub fn lobpcg_min_from<S: Scalar, P: Pencil<S>>(pencil: &P, opts: &LobpcgOptions, mut start: Vec<Vec<S>>) -> Result<EigenPair<S>> {
    let d = pencil.dim();
    let cap = (d / 3).max(1);
    let m = start.len().max(opts.block.max(1)).min(cap);
    start.truncate(m);
    for v in &mut start {
        if v.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: v.len() });
        }
        pencil.project(v);
    }
    let missing = m - start.len();
    start.extend(random_block(pencil, missing, opts.seed));
    let first = opts.max_iter.min(STALL_ITERATIONS);
    let stalled = match iterate(pencil, start, m, opts, first)? {
        Ok(pair) => return Ok(pair),
        Err(stalled) => stalled,
    };
    let big = (EXPANDED_FACTOR * m).min(cap);
    if first == opts.max_iter || big == m {
        return Err(Error::NotConverged { residual: stalled.residual, iterations: first });
    }
    let mut start = stalled.x;
    start.extend(random_block(pencil, big - start.len(), opts.seed ^ 0x9e37_79b9_7f4a_7c15));
    match iterate(pencil, start, big, opts, opts.max_iter - first)? {
        Ok(mut pair) => {
            pair.iterations += first;
            Ok(pair)
        }
        Err(stalled) => Err(Error::NotConverged { residual: stalled.residual, iterations: opts.max_iter }),
    }
}

const STALL_ITERATIONS: usize = 300;
const STALL_WINDOW: usize = 50;
const EXPANDED_FACTOR: usize = 3;

struct Stalled<S> {
    residual: f64,
    x: Vec<Vec<S>>,
}

type Attempt<S> = Result<core::result::Result<EigenPair<S>, Stalled<S>>>;

fn iterate<S: Scalar, P: Pencil<S>>(pencil: &P, start: Vec<Vec<S>>, m: usize, opts: &LobpcgOptions, max_iter: usize) -> Attempt<S> {
    let d = pencil.dim();
    let mut x = Block::fresh(pencil, start);
    let (mut theta, c) = rayleigh_ritz(&x).ok_or(Error::NotConverged { residual: f64::INFINITY, iterations: 0 })?;
    let cols = c.ncols().min(m);
    x = Block { v: combine(&x.v, &c, 0, cols), k: combine(&x.k, &c, 0, cols), g: combine(&x.g, &c, 0, cols) };
    let mut p = Block::<S>::empty();
    let mut last_residual = f64::INFINITY;
    let mut since_refresh = 0;
    let mut history = Vec::with_capacity(max_iter);
    for iter in 1..=max_iter {
        // residuals and preconditioned residuals
        let mut w = Vec::with_capacity(x.len());
        let mut res0 = 0.0;
        for i in 0..x.len() {
            let mut r = x.k[i].clone();
            for (rk, &gk) in r.iter_mut().zip(&x.g[i]) {
                *rk -= gk.scale(theta[i]);
            }
            let mut t = vec![S::zero(); d];
            pencil.precondition(&r, &mut t);
            pencil.project(&mut t);
            let norm = dot(&r, &t).real().max(0.0).sqrt();
            if i == 0 {
                res0 = norm;
            }
            w.push(t);
        }
        last_residual = res0;
        history.push((res0, theta[0]));
        let stalled = iter > STALL_WINDOW && res0 <= opts.stall_tol && {
            let (r_old, t_old) = history[iter - 1 - STALL_WINDOW];
            res0 > 0.5 * r_old || (t_old - theta[0]).abs() <= opts.tol * theta[0].abs().max(1.0)
        };
        if stalled && since_refresh == 0 {
            return Ok(Ok(EigenPair { value: theta[0], vector: x.v[0].clone(), residual: res0, iterations: iter, block: x.v }));
        }
        if res0 <= opts.tol {
            if since_refresh == 0 {
                return Ok(Ok(EigenPair { value: theta[0], vector: x.v[0].clone(), residual: res0, iterations: iter, block: x.v }));
            }
            // confirm against fresh operator images
            x = Block::fresh(pencil, x.v);
            since_refresh = 0;
            p = Block::empty();
            let (t, c) = rayleigh_ritz(&x).ok_or(Error::NotConverged { residual: res0, iterations: iter })?;
            let cols = c.ncols().min(m);
            x = Block { v: combine(&x.v, &c, 0, cols), k: combine(&x.k, &c, 0, cols), g: combine(&x.g, &c, 0, cols) };
            theta = t;
            continue;
        }
        p = orthonormalize(p, &[&x]);
        let wb = orthonormalize(Block::fresh(pencil, w), &[&x, &p]);
        let mut basis = Block::empty();
        basis.extend(&x);
        basis.extend(&wb);
        basis.extend(&p);
        let Some((t, c)) = rayleigh_ritz(&basis) else {
            return Err(Error::NotConverged { residual: res0, iterations: iter });
        };
        let cols = c.ncols().min(m);
        let nx = x.len();
        // new P is the W/P part of the Ritz vectors; new X adds the X part
        p = Block {
            v: combine(&basis.v[nx..], &c, nx, cols),
            k: combine(&basis.k[nx..], &c, nx, cols),
            g: combine(&basis.g[nx..], &c, nx, cols),
        };
        let add = |xs: &[Vec<S>], ps: &[Vec<S>]| -> Vec<Vec<S>> {
            let mut out = combine(xs, &c, 0, cols);
            for (o, q) in out.iter_mut().zip(ps) {
                axpy(S::one(), q, o);
            }
            out
        };
        x = Block { v: add(&basis.v[..nx], &p.v), k: add(&basis.k[..nx], &p.k), g: add(&basis.g[..nx], &p.g) };
        theta = t;
        since_refresh += 1;
        if since_refresh >= REFRESH_EVERY || cols < m {
            x = Block::fresh(pencil, x.v);
            p = if cols < m { Block::empty() } else { Block::fresh(pencil, p.v) };
            since_refresh = 0;
            let (t, c) = rayleigh_ritz(&x).ok_or(Error::NotConverged { residual: res0, iterations: iter })?;
            let cols = c.ncols().min(m);
            x = Block { v: combine(&x.v, &c, 0, cols), k: combine(&x.k, &c, 0, cols), g: combine(&x.g, &c, 0, cols) };
            theta = t;
        }
    }
    Ok(Err(Stalled { residual: last_residual, x: x.v }))
}
