//! Periodic Q1 finite elements on the pixel grid.
//!
//! Node `(ix, iy)` sits at `(ix/n, iy/n)` and has index `iy * n + ix`; dof
//! `2 * node + i` holds component `i`. Pixel `(ix, iy)` is the element with
//! corner nodes `(ix + dx, iy + dy) mod n`. Quasi-periodic (Bloch) fields
//! pick up the factor `exp(i gamma_k)` across the `x_k` wrap.

pub mod corrector;
pub mod dense;
pub mod element;
pub mod precond;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::microstructure::PixelGrid;
use crate::scalar::Scalar;
use crate::tensor::{iso_tensor, GutierrezPair, Matrix2, QuadraticForm4};
use element::{element_form, element_load, mean_gradient_map, ElementMatrix};
pub use corrector::{homogenized_tensor, solve_corrector, CorrectorSolution, HomogenizedResult, SolverOptions};
pub use precond::LaplaceInverse;

/// Phase tensors of a two-phase medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub strong: QuadraticForm4,
    pub weak: QuadraticForm4,
}

impl Material {
    pub fn new(strong: QuadraticForm4, weak: QuadraticForm4) -> Self {
        Self { strong, weak }
    }

    /// Both phases equal to `c`.
    pub fn homogeneous(c: QuadraticForm4) -> Self {
        Self { strong: c, weak: c }
    }

    pub fn form(&self, strong: bool) -> &QuadraticForm4 {
        if strong {
            &self.strong
        } else {
            &self.weak
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { strong: self.strong.scale(c), weak: self.weak.scale(c) }
    }
}

impl From<&GutierrezPair> for Material {
    fn from(pair: &GutierrezPair) -> Self {
        Self { strong: iso_tensor(pair.strong()), weak: iso_tensor(pair.weak()) }
    }
}

/// Quasi-periodicity factors across the `x1` and `x2` wraps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist<S> {
    pub x1: S,
    pub x2: S,
    pub gamma: [f64; 2],
}

impl<S: Scalar> Twist<S> {
    pub fn periodic() -> Self {
        Self { x1: S::one(), x2: S::one(), gamma: [0.0, 0.0] }
    }

    /// Factors for quasi-momentum `gamma`; `None` when `S` is real and
    /// `gamma != 0`.
    pub fn bloch(gamma: [f64; 2]) -> Option<Self> {
        Some(Self { x1: S::phase(gamma[0])?, x2: S::phase(gamma[1])?, gamma })
    }

    pub fn is_periodic(&self) -> bool {
        self.gamma == [0.0, 0.0]
    }
}

/// Visits every element with its pixel index, global node indices and the
/// Bloch factor of each local node.
#[inline]
fn for_each_element<S: Scalar>(n: usize, twist: &Twist<S>, mut f: impl FnMut(usize, [usize; 4], [S; 4])) {
    let one = S::one();
    for iy in 0..n {
        let (iy1, fy) = if iy + 1 == n { (0, twist.x2) } else { (iy + 1, one) };
        for ix in 0..n {
            let (ix1, fx) = if ix + 1 == n { (0, twist.x1) } else { (ix + 1, one) };
            let nodes = [iy * n + ix, iy * n + ix1, iy1 * n + ix, iy1 * n + ix1];
            f(iy * n + ix, nodes, [one, fx, fy, fx * fy]);
        }
    }
}

#[inline]
fn gather<S: Scalar>(v: &[S], nodes: &[usize; 4], phases: &[S; 4]) -> [S; 8] {
    core::array::from_fn(|d| phases[d / 2] * v[2 * nodes[d / 2] + d % 2])
}

#[inline]
fn local_apply<S: Scalar>(k: &ElementMatrix, ve: &[S; 8]) -> [S; 8] {
    core::array::from_fn(|r| {
        let row = &k[r];
        let mut acc = S::zero();
        for s in 0..8 {
            acc += ve[s].scale(row[s]);
        }
        acc
    })
}

#[inline]
fn scatter<S: Scalar>(out: &mut [S], local: &[S; 8], nodes: &[usize; 4], phases: &[S; 4]) {
    for d in 0..8 {
        out[2 * nodes[d / 2] + d % 2] += phases[d / 2].conjugate() * local[d];
    }
}

/// Subtracts the mean of each displacement component.
pub fn project_mean_zero<S: Scalar>(v: &mut [S]) {
    let nodes = v.len() / 2;
    for i in 0..2 {
        let mut mean = S::zero();
        for k in 0..nodes {
            mean += v[2 * k + i];
        }
        mean = mean.scale(1.0 / nodes as f64);
        for k in 0..nodes {
            v[2 * k + i] -= mean;
        }
    }
}

/// The periodic cell problem for the shifted tensor `L - shift Id4`.
#[derive(Debug, Clone)]
pub struct CellProblem {
    grid: PixelGrid,
    material: Material,
    shift: f64,
    /// Shifted element stiffness, indexed by `chi`.
    stiffness: [ElementMatrix; 2],
    gram: ElementMatrix,
}

impl CellProblem {
    pub fn new(grid: PixelGrid, material: Material, shift: f64) -> Self {
        let gram = element_form(&QuadraticForm4::identity());
        let shifted = |c: &QuadraticForm4| element_form(&c.shifted(shift));
        let stiffness = [shifted(&material.weak), shifted(&material.strong)];
        Self { grid, material, shift, stiffness, gram }
    }

    pub fn with_shift(&self, shift: f64) -> Self {
        Self::new(self.grid.clone(), self.material, shift)
    }

    pub fn grid(&self) -> &PixelGrid {
        &self.grid
    }

    pub fn material(&self) -> &Material {
        &self.material
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn dofs(&self) -> usize {
        2 * self.n() * self.n()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dofs() {
            return Err(Error::DimensionMismatch { expected: self.dofs(), found: len });
        }
        Ok(())
    }

    /// `K v` for a periodic real field.
    pub fn apply_operator(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v.len())?;
        let mut kv = vec![0.0; v.len()];
        self.apply_into(&Twist::periodic(), v, &mut kv, None);
        Ok(kv)
    }

    /// Accumulates `K v` into `kv` and, if requested, `G v` into `gv`, where
    /// `G` is the gradient Gram matrix (the unshifted identity tensor).
    pub fn apply_into<S: Scalar>(&self, twist: &Twist<S>, v: &[S], kv: &mut [S], mut gv: Option<&mut [S]>) {
        let chi = self.grid.bits();
        for_each_element(self.n(), twist, |pixel, nodes, phases| {
            let ve = gather(v, &nodes, &phases);
            let k = &self.stiffness[chi[pixel] as usize];
            scatter(kv, &local_apply(k, &ve), &nodes, &phases);
            if let Some(gv) = gv.as_deref_mut() {
                scatter(gv, &local_apply(&self.gram, &ve), &nodes, &phases);
            }
        });
    }

    /// `G v` alone.
    pub fn apply_gram<S: Scalar>(&self, twist: &Twist<S>, v: &[S], gv: &mut [S]) {
        apply_gram(self.n(), twist, v, gv);
    }

    /// Assembled load `f(M)`: the energy of `v` under loading `M` is
    /// `constant_energy(M) + 2 f.v + v.K v`.
    pub fn load(&self, m: &Matrix2) -> Vec<f64> {
        let n = self.n();
        let h = 1.0 / n as f64;
        let mv = m.to_vec();
        let local = [
            element_load(&self.material.weak.shifted(self.shift), mv),
            element_load(&self.material.strong.shifted(self.shift), mv),
        ];
        let chi = self.grid.bits();
        let mut f = vec![0.0; self.dofs()];
        for_each_element(n, &Twist::<f64>::periodic(), |pixel, nodes, _| {
            let fe = &local[chi[pixel] as usize];
            for d in 0..8 {
                f[2 * nodes[d / 2] + d % 2] += h * fe[d];
            }
        });
        f
    }

    /// Cell average of `M.(L - shift Id4)M`.
    pub fn constant_energy(&self, m: &Matrix2) -> f64 {
        let strong = self.grid.strong_count() as f64;
        let total = (self.n() * self.n()) as f64;
        let es = self.material.strong.shifted(self.shift).eval(m);
        let ew = self.material.weak.shifted(self.shift).eval(m);
        (strong * es + (total - strong) * ew) / total
    }

    /// The cell energy `sum_elements int (M + grad v).(L - shift Id4)(M + grad v)`.
    pub fn energy(&self, m: &Matrix2, v: &[f64]) -> Result<f64> {
        let kv = self.apply_operator(v)?;
        let f = self.load(m);
        let quad: f64 = v.iter().zip(&kv).map(|(a, b)| a * b).sum();
        let lin: f64 = v.iter().zip(&f).map(|(a, b)| a * b).sum();
        Ok(self.constant_energy(m) + 2.0 * lin + quad)
    }

    /// Element-average gradients of a periodic field, one per pixel.
    pub fn element_gradients(&self, v: &[f64]) -> Vec<Matrix2> {
        element_gradients(self.n(), v)
    }
}

/// `G v` on an `n x n` cell.
pub fn apply_gram<S: Scalar>(n: usize, twist: &Twist<S>, v: &[S], gv: &mut [S]) {
    let gram = element_form(&QuadraticForm4::identity());
    for_each_element(n, twist, |_, nodes, phases| {
        let ve = gather(v, &nodes, &phases);
        scatter(gv, &local_apply(&gram, &ve), &nodes, &phases);
    });
}

/// `|grad v|^2` summed over the cell.
pub fn gradient_norm_squared(n: usize, v: &[f64]) -> f64 {
    let mut gv = vec![0.0; v.len()];
    apply_gram(n, &Twist::periodic(), v, &mut gv);
    v.iter().zip(&gv).map(|(a, b)| a * b).sum()
}

/// Element-average gradients of a periodic field on an `n x n` cell.
pub fn element_gradients(n: usize, v: &[f64]) -> Vec<Matrix2> {
    let b = mean_gradient_map();
    let scale = n as f64;
    let mut out = Vec::with_capacity(n * n);
    for_each_element(n, &Twist::<f64>::periodic(), |_, nodes, phases| {
        let ve = gather(v, &nodes, &phases);
        let g: [f64; 4] = core::array::from_fn(|p| scale * (0..8).map(|d| b[p][d] * ve[d]).sum::<f64>());
        out.push(Matrix2::from_vec(g));
    });
    out
}

/// `sum_elements int det(grad v)` for a periodic field on an `n x n` cell,
/// with quadrature that is exact for bilinear elements.
pub fn det_integral(n: usize, v: &[f64]) -> Result<f64> {
    if v.len() != 2 * n * n {
        return Err(Error::DimensionMismatch { expected: 2 * n * n, found: v.len() });
    }
    // det A = a11 a22 - a12 a21 as a symmetric form on vec(A)
    let mut c = [[0.0; 4]; 4];
    c[0][3] = 0.5;
    c[3][0] = 0.5;
    c[1][2] = -0.5;
    c[2][1] = -0.5;
    let k = element_form(&QuadraticForm4::symmetrized(c));
    let mut kv = vec![0.0; v.len()];
    for_each_element(n, &Twist::<f64>::periodic(), |_, nodes, phases| {
        let ve = gather(v, &nodes, &phases);
        scatter(&mut kv, &local_apply(&k, &ve), &nodes, &phases);
    });
    Ok(v.iter().zip(&kv).map(|(a, b)| a * b).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::microstructure::{laminate, Axis};
    use crate::scalar::dot;
    use crate::tensor::{make_gutierrez, LameParams};
    use core::f64::consts::PI;
    use num_complex::Complex64;

    fn gutierrez() -> Material {
        Material::from(&make_gutierrez(1.0, 1.0, 2.0, -3.0).unwrap())
    }

    fn pseudo_random(len: usize, seed: u64) -> Vec<f64> {
        use rand_core::{RngCore, SeedableRng};
        let mut rng = rand_xoshiro::SplitMix64::seed_from_u64(seed);
        (0..len).map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5).collect()
    }

    #[test]
    fn translations_are_in_the_kernel() {
        let p = CellProblem::new(laminate(8, 0.25, Axis::X1).unwrap(), gutierrez(), 0.0);
        let mut v = vec![0.0; p.dofs()];
        for k in 0..v.len() / 2 {
            v[2 * k] = 1.5;
            v[2 * k + 1] = -0.5;
        }
        assert!(p.apply_operator(&v).unwrap().iter().all(|x| x.abs() < 1e-14));
        assert_eq!(p.apply_operator(&[0.0; 3]), Err(Error::DimensionMismatch { expected: 128, found: 3 }));
    }

    #[test]
    fn operator_is_symmetric() {
        let p = CellProblem::new(laminate(8, 0.25, Axis::X2).unwrap(), gutierrez(), 0.3);
        let v = pseudo_random(p.dofs(), 1);
        let w = pseudo_random(p.dofs(), 2);
        let kv = p.apply_operator(&v).unwrap();
        let kw = p.apply_operator(&w).unwrap();
        let a: f64 = w.iter().zip(&kv).map(|(x, y)| x * y).sum();
        let b: f64 = v.iter().zip(&kw).map(|(x, y)| x * y).sum();
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn bloch_operator_is_hermitian() {
        let p = CellProblem::new(laminate(8, 0.5, Axis::X1).unwrap(), gutierrez(), 0.0);
        let tw = Twist::<Complex64>::bloch([0.7, -2.1]).unwrap();
        let re = pseudo_random(2 * p.dofs(), 3);
        let v: Vec<Complex64> = re.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let re = pseudo_random(2 * p.dofs(), 4);
        let w: Vec<Complex64> = re.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let mut kv = vec![Complex64::default(); v.len()];
        let mut kw = vec![Complex64::default(); v.len()];
        p.apply_into(&tw, &v, &mut kv, None);
        p.apply_into(&tw, &w, &mut kw, None);
        let a = dot(&w, &kv);
        let b = dot(&kw, &v);
        assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn homogeneous_fourier_mode_is_an_eigenvector() {
        // v = e cos(2 pi (k1 x + k2 y)): the Q1 operator with constant C acts on
        // the mode through its symbol, a 2x2 matrix built from 1D stiffness
        // and mass symbols.
        let n = 16;
        let c = iso_tensor(LameParams::new(1.0, 1.0));
        let p = CellProblem::new(PixelGrid::uniform(n, true).unwrap(), Material::homogeneous(c), 0.0);
        let (k1, k2) = (2usize, 3usize);
        let (t1, t2) = (2.0 * PI * k1 as f64 / n as f64, 2.0 * PI * k2 as f64 / n as f64);
        // 1D symbols of stiffness, mass and the first-derivative pairing
        let (s1, s2) = (2.0 - 2.0 * t1.cos(), 2.0 - 2.0 * t2.cos());
        let (m1, m2) = ((4.0 + 2.0 * t1.cos()) / 6.0, (4.0 + 2.0 * t2.cos()) / 6.0);
        let (d1, d2) = (t1.sin(), t2.sin());
        // symbol of int d_j u d_l w, indexed [j][l]
        let sym = [[s1 * m2, d1 * d2], [d1 * d2, m1 * s2]];
        let coeffs = c.coeffs();
        let mut gamma = [[0.0; 2]; 2];
        for i in 0..2 {
            for k in 0..2 {
                for j in 0..2 {
                    for l in 0..2 {
                        gamma[i][k] += coeffs[2 * i + j][2 * k + l] * sym[j][l];
                    }
                }
            }
        }
        let mut field = vec![0.0; p.dofs()];
        let e = [0.6, -0.8];
        for iy in 0..n {
            for ix in 0..n {
                let phase = (t1 * ix as f64 + t2 * iy as f64).cos();
                field[2 * (iy * n + ix)] = e[0] * phase;
                field[2 * (iy * n + ix) + 1] = e[1] * phase;
            }
        }
        let kv = p.apply_operator(&field).unwrap();
        let ge = [gamma[0][0] * e[0] + gamma[0][1] * e[1], gamma[1][0] * e[0] + gamma[1][1] * e[1]];
        for iy in 0..n {
            for ix in 0..n {
                let phase = (t1 * ix as f64 + t2 * iy as f64).cos();
                for i in 0..2 {
                    let got = kv[2 * (iy * n + ix) + i];
                    assert!((got - ge[i] * phase).abs() < 1e-12, "{got} vs {}", ge[i] * phase);
                }
            }
        }
    }

    #[test]
    fn det_integral_vanishes() {
        let n = 16;
        assert_eq!(det_integral(n, &vec![0.0; 2 * n * n]).unwrap(), 0.0);
        for seed in 0..5 {
            let v = pseudo_random(2 * n * n, seed);
            let d = det_integral(n, &v).unwrap();
            assert!(d.abs() <= 1e-12 * gradient_norm_squared(n, &v), "{d}");
        }
        // v = (sin 2 pi x, sin 2 pi y) has det grad v = 4 pi^2 cos cos, which
        // integrates to zero
        let mut v = vec![0.0; 2 * n * n];
        for iy in 0..n {
            for ix in 0..n {
                let (x, y) = (ix as f64 / n as f64, iy as f64 / n as f64);
                v[2 * (iy * n + ix)] = (2.0 * PI * x).sin();
                v[2 * (iy * n + ix) + 1] = (2.0 * PI * y).sin();
            }
        }
        assert!(det_integral(n, &v).unwrap().abs() < 1e-12);
    }

    #[test]
    fn gutierrez_energy_bounded_below_by_null_lagrangian() {
        let pair = make_gutierrez(1.0, 1.0, 2.0, -3.0).unwrap();
        let p = CellProblem::new(laminate(16, 0.5, Axis::X1).unwrap(), Material::from(&pair), 0.0);
        for seed in 0..5 {
            let v = pseudo_random(p.dofs(), 10 + seed);
            let kv = p.apply_operator(&v).unwrap();
            let quad: f64 = v.iter().zip(&kv).map(|(a, b)| a * b).sum();
            let g = gradient_norm_squared(16, &v);
            let bound = -4.0 * pair.strong().mu * det_integral(16, &v).unwrap();
            assert!(quad >= bound - 1e-10 * g);
            assert!(quad >= -1e-10 * g);
        }
    }
}
