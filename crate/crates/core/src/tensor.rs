//! Fourth-order elasticity tensors in two dimensions.
//!
//! A tensor is stored as the symmetric 4x4 matrix of its quadratic form acting
//! on `vec(A) = (a11, a12, a21, a22)`, so that `A . L A = vec(A)^T C vec(A)`.
//! The full (non-symmetrized) matrix is kept because the spectral shifts
//! `L - t Id4` act on the antisymmetric part of a gradient as well.

use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};

#[allow(unused_imports)] // f64 methods are inherent when std is linked
use num_traits::Float;

use crate::error::{Error, GutierrezConstraint, Result};

/// Index of entry `(i, j)` of a 2x2 matrix in `vec(A)`.
#[inline]
pub const fn vec_index(i: usize, j: usize) -> usize {
    2 * i + j
}

/// A real 2x2 matrix, `entries[i][j] = a_{i+1, j+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Matrix2 {
    pub entries: [[f64; 2]; 2],
}

impl Matrix2 {
    pub const ZERO: Self = Self { entries: [[0.0; 2]; 2] };
    pub const IDENTITY: Self = Self { entries: [[1.0, 0.0], [0.0, 1.0]] };

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self { entries: [[a11, a12], [a21, a22]] }
    }

    /// The elementary matrix `e_i (x) e_j` (zero-based indices).
    pub fn unit(i: usize, j: usize) -> Self {
        let mut m = Self::ZERO;
        m.entries[i][j] = 1.0;
        m
    }

    /// `a (x) b`, i.e. `(a_i b_j)_{ij}`.
    pub fn outer(a: [f64; 2], b: [f64; 2]) -> Self {
        Self::new(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    }

    pub fn from_vec(v: [f64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_vec(&self) -> [f64; 4] {
        let e = &self.entries;
        [e[0][0], e[0][1], e[1][0], e[1][1]]
    }

    pub fn det(&self) -> f64 {
        let e = &self.entries;
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }

    pub fn transpose(&self) -> Self {
        let e = &self.entries;
        Self::new(e[0][0], e[1][0], e[0][1], e[1][1])
    }

    pub fn norm_squared(&self) -> f64 {
        self.to_vec().iter().map(|x| x * x).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_vec(self.to_vec().map(|x| x * s))
    }

    pub fn is_finite(&self) -> bool {
        self.to_vec().iter().all(|x| x.is_finite())
    }
}

impl Add for Matrix2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (self.to_vec(), rhs.to_vec());
        Self::from_vec([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
    }
}

impl Sub for Matrix2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(-1.0)
    }
}

/// Lamé coefficients of an isotropic phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LameParams {
    pub lambda: f64,
    pub mu: f64,
}

impl LameParams {
    pub const fn new(lambda: f64, mu: f64) -> Self {
        Self { lambda, mu }
    }

    /// Strict strong (Legendre-Hadamard) ellipticity of the isotropic tensor.
    pub fn is_strictly_strongly_elliptic(&self) -> bool {
        self.mu > 0.0 && self.lambda + 2.0 * self.mu > 0.0
    }
}

/// Symmetric quadratic form on 2x2 matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticForm4 {
    coeffs: [[f64; 4]; 4],
}

impl QuadraticForm4 {
    pub const ZERO: Self = Self { coeffs: [[0.0; 4]; 4] };

    /// The identity 4-tensor, `A . Id4 A = |A|^2`.
    pub fn identity() -> Self {
        let mut c = [[0.0; 4]; 4];
        for (k, row) in c.iter_mut().enumerate() {
            row[k] = 1.0;
        }
        Self { coeffs: c }
    }

    /// Builds a form from coefficients, which must be symmetric up to
    /// `1e-12` relative to the largest entry. The stored matrix is the
    /// exact symmetric part.
    pub fn from_coeffs(c: [[f64; 4]; 4]) -> Result<Self> {
        let scale = c.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        for i in 0..4 {
            for j in 0..4 {
                if !c[i][j].is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "coeffs",
                        reason: "entries must be finite",
                    });
                }
                if (c[i][j] - c[j][i]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidParameter {
                        name: "coeffs",
                        reason: "coefficient matrix must be symmetric",
                    });
                }
            }
        }
        Ok(Self::symmetrized(c))
    }

    /// Symmetric part of an arbitrary coefficient matrix.
    pub fn symmetrized(c: [[f64; 4]; 4]) -> Self {
        let mut s = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                s[i][j] = 0.5 * (c[i][j] + c[j][i]);
            }
        }
        Self { coeffs: s }
    }

    pub fn coeffs(&self) -> &[[f64; 4]; 4] {
        &self.coeffs
    }

    /// `A . L B`.
    pub fn bilinear(&self, a: &Matrix2, b: &Matrix2) -> f64 {
        let (x, y) = (a.to_vec(), b.to_vec());
        let mut acc = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                acc += x[i] * self.coeffs[i][j] * y[j];
            }
        }
        acc
    }

    /// `A . L A`.
    pub fn eval(&self, a: &Matrix2) -> f64 {
        self.bilinear(a, a)
    }

    /// `L - t Id4`.
    pub fn shifted(&self, t: f64) -> Self {
        let mut c = self.coeffs;
        for (k, row) in c.iter_mut().enumerate() {
            row[k] -= t;
        }
        Self { coeffs: c }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { coeffs: self.coeffs.map(|row| row.map(|x| x * s)) }
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Conjugation by the coordinate swap `e1 <-> e2`, i.e. the form
    /// `A -> (P A P) . L (P A P)` with `P` the swap permutation.
    pub fn axis_swapped(&self) -> Self {
        const PERM: [usize; 4] = [3, 2, 1, 0];
        let mut c = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                c[i][j] = self.coeffs[PERM[i]][PERM[j]];
            }
        }
        Self { coeffs: c }
    }

    /// Acoustic tensor `Gamma(b)_{ik} = L_{ijkl} b_j b_l`, so that
    /// `(a (x) b) . L (a (x) b) = a . Gamma(b) a`.
    pub fn acoustic(&self, b: [f64; 2]) -> [[f64; 2]; 2] {
        let mut g = [[0.0; 2]; 2];
        for i in 0..2 {
            for k in 0..2 {
                let mut acc = 0.0;
                for j in 0..2 {
                    for l in 0..2 {
                        acc += self.coeffs[vec_index(i, j)][vec_index(k, l)] * b[j] * b[l];
                    }
                }
                g[i][k] = acc;
            }
        }
        g
    }

    /// Matrix of the form restricted to symmetric matrices in the
    /// orthonormal basis `e11`, `e22`, `(e12 + e21)/sqrt 2`.
    pub fn symmetric_block(&self) -> [[f64; 3]; 3] {
        let r = core::f64::consts::FRAC_1_SQRT_2;
        let basis = [
            Matrix2::unit(0, 0),
            Matrix2::unit(1, 1),
            Matrix2::new(0.0, r, r, 0.0),
        ];
        let mut h = [[0.0; 3]; 3];
        for p in 0..3 {
            for q in 0..3 {
                h[p][q] = self.bilinear(&basis[p], &basis[q]);
            }
        }
        h
    }
}

impl Add for QuadraticForm4 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut c = self.coeffs;
        for i in 0..4 {
            for j in 0..4 {
                c[i][j] += rhs.coeffs[i][j];
            }
        }
        Self { coeffs: c }
    }
}

impl Sub for QuadraticForm4 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(-1.0)
    }
}

impl Mul<QuadraticForm4> for f64 {
    type Output = QuadraticForm4;
    fn mul(self, rhs: QuadraticForm4) -> QuadraticForm4 {
        rhs.scale(self)
    }
}

/// Isotropic tensor with the given Lamé coefficients:
/// `Q(A) = (lambda + 2 mu)(a11^2 + a22^2) + 2 lambda a11 a22 + mu (a12 + a21)^2`.
pub fn iso_tensor(p: LameParams) -> QuadraticForm4 {
    let (l, m) = (p.lambda, p.mu);
    let mut c = [[0.0; 4]; 4];
    c[0][0] = l + 2.0 * m;
    c[3][3] = l + 2.0 * m;
    c[0][3] = l;
    c[3][0] = l;
    c[1][1] = m;
    c[2][2] = m;
    c[1][2] = m;
    c[2][1] = m;
    QuadraticForm4 { coeffs: c }
}

/// Which phase of a two-phase composite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    /// `chi = 1`
    Strong,
    /// `chi = 0`
    Weak,
}

/// A pair of isotropic phases satisfying
/// `0 < mu1 = -(lambda2 + mu2) < mu2` and `lambda1 + mu1 > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GutierrezPair {
    strong: LameParams,
    weak: LameParams,
}

impl GutierrezPair {
    pub fn strong(&self) -> LameParams {
        self.strong
    }

    pub fn weak(&self) -> LameParams {
        self.weak
    }

    pub fn phase(&self, phase: Phase) -> LameParams {
        match phase {
            Phase::Strong => self.strong,
            Phase::Weak => self.weak,
        }
    }

    /// `alpha = min(mu1, mu2 - mu1)`, the coercivity margin of the lower bound.
    pub fn alpha(&self) -> f64 {
        self.strong.mu.min(self.weak.mu - self.strong.mu)
    }

    /// Both phase tensors multiplied by `c > 0`; the constraints are
    /// homogeneous so the result is again a Gutiérrez pair.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        make_gutierrez(
            c * self.strong.mu,
            c * self.strong.lambda,
            c * self.weak.mu,
            c * self.weak.lambda,
        )
    }
}

/// Validates the Gutiérrez constraints. The equality is checked to `1e-12`
/// relative to the largest modulus.
pub fn make_gutierrez(mu1: f64, lambda1: f64, mu2: f64, lambda2: f64) -> Result<GutierrezPair> {
    let violation = |constraint| Err(Error::ConstraintViolation { constraint });
    if !(mu1 > 0.0) {
        return violation(GutierrezConstraint::PositiveStrongShear);
    }
    let scale = mu1.abs().max(lambda2.abs()).max(mu2.abs());
    if !((mu1 + lambda2 + mu2).abs() <= 1e-12 * scale) {
        return violation(GutierrezConstraint::WeakBulkBalance);
    }
    if !(mu1 < mu2) {
        return violation(GutierrezConstraint::ShearOrdering);
    }
    if !(lambda1 + mu1 > 0.0) {
        return violation(GutierrezConstraint::StrongBulkPositive);
    }
    Ok(GutierrezPair {
        strong: LameParams::new(lambda1, mu1),
        weak: LameParams::new(lambda2, mu2),
    })
}

/// The isotropic tensor with `mu = mu1`, `lambda = -2 mu1`, whose form is
/// `-4 mu1 det(A) + mu1 (a12 - a21)^2`.
pub fn underline_tensor(mu1: f64) -> Result<QuadraticForm4> {
    if !(mu1 > 0.0) {
        return Err(Error::NonPositiveMu(mu1));
    }
    Ok(iso_tensor(LameParams::new(-2.0 * mu1, mu1)))
}

/// `Q_phase(A) - [-4 mu1 det(A) + alpha * S_phase(A)]`, where `S` is
/// `(a11 + a22)^2 + (a12 - a21)^2` on the strong phase and
/// `(a11 - a22)^2 + a12^2 + a21^2` on the weak phase. Nonnegative up to
/// rounding.
pub fn lower_bound_residual(pair: &GutierrezPair, a: &Matrix2, phase: Phase) -> f64 {
    let e = &a.entries;
    let (a11, a12, a21, a22) = (e[0][0], e[0][1], e[1][0], e[1][1]);
    let squares = match phase {
        Phase::Strong => (a11 + a22).powi(2) + (a12 - a21).powi(2),
        Phase::Weak => (a11 - a22).powi(2) + a12 * a12 + a21 * a21,
    };
    let bound = -4.0 * pair.strong.mu * a.det() + pair.alpha() * squares;
    iso_tensor(pair.phase(phase)).eval(a) - bound
}

/// Eigenvalues of a symmetric 2x2 matrix in ascending order, with the unit
/// eigenvector of the smaller one.
pub fn sym2_eigen(m: [[f64; 2]; 2]) -> ([f64; 2], [f64; 2]) {
    let (a, b, d) = (m[0][0], 0.5 * (m[0][1] + m[1][0]), m[1][1]);
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    let lo = mean - rad;
    let hi = mean + rad;
    // eigenvector of `lo`: pick the better conditioned of the two rows
    let v = if (a - lo).abs() >= (d - lo).abs() { [-b, a - lo] } else { [d - lo, -b] };
    let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
    let v = if norm > 0.0 { [v[0] / norm, v[1] / norm] } else { [1.0, 0.0] };
    ([lo, hi], v)
}

/// Eigenvalues of a symmetric 3x3 matrix in ascending order.
pub fn sym3_eigenvalues(m: [[f64; 3]; 3]) -> [f64; 3] {
    let mat = nalgebra::Matrix3::from_fn(|i, j| 0.5 * (m[i][j] + m[j][i]));
    let ev = mat.symmetric_eigenvalues();
    let mut d = [ev[0], ev[1], ev[2]];
    d.sort_by(|x, y| x.total_cmp(y));
    d
}

/// Smallest eigenvalue of the form on symmetric matrices.
pub fn sym_min(l: &QuadraticForm4) -> f64 {
    sym3_eigenvalues(l.symmetric_block())[0]
}

/// Minimum of a form over unit rank-one matrices `a (x) b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankOneMin {
    pub value: f64,
    pub a: [f64; 2],
    pub b: [f64; 2],
    /// Angle of `b` in `[0, pi)`.
    pub phi_b: f64,
    /// Angle of `a` in `[0, pi)`.
    pub phi_a: f64,
}

pub const RANK_ONE_SCAN_SAMPLES: usize = 720;
const GOLDEN_TOL: f64 = 1e-10;

fn unit(phi: f64) -> [f64; 2] {
    [phi.cos(), phi.sin()]
}

fn acoustic_min(l: &QuadraticForm4, phi: f64) -> f64 {
    sym2_eigen(l.acoustic(unit(phi))).0[0]
}

/// Golden-section minimization on `[lo, hi]` down to `tol` bracket width.
pub(crate) fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 { (x1, f1) } else { (x2, f2) }
}

fn wrap_half_turn(phi: f64) -> f64 {
    let w = crate::scalar::rem_euclid(phi, PI);
    if w >= PI { 0.0 } else { w }
}

/// `rank_one_min` with a configurable number of scan samples for the
/// direction `b`; the polarization `a` is resolved exactly by the 2x2
/// eigendecomposition of the acoustic tensor.
pub fn rank_one_min_with(l: &QuadraticForm4, samples: usize) -> RankOneMin {
    let samples = samples.max(4);
    let step = PI / samples as f64;
    let (mut best_k, mut best) = (0, f64::INFINITY);
    for k in 0..samples {
        let v = acoustic_min(l, k as f64 * step);
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let center = best_k as f64 * step;
    let (phi, refined) = golden_section(|p| acoustic_min(l, p), center - step, center + step, GOLDEN_TOL);
    let (phi_b, value) = if refined <= best { (wrap_half_turn(phi), refined) } else { (center, best) };
    let b = unit(phi_b);
    let a = sym2_eigen(l.acoustic(b)).1;
    let phi_a = wrap_half_turn(a[1].atan2(a[0]));
    RankOneMin { value, a: unit(phi_a), b, phi_b, phi_a }
}

/// Minimum of `(a (x) b) . L (a (x) b)` over unit vectors, via a dense scan
/// of the acoustic tensor's smallest eigenvalue plus golden-section refinement.
pub fn rank_one_min(l: &QuadraticForm4) -> RankOneMin {
    rank_one_min_with(l, RANK_ONE_SCAN_SAMPLES)
}
