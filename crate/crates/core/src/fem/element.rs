//! Bilinear (Q1) square element with a constant tensor.
//!
//! Local node `a = dx + 2 dy` sits at `(dx, dy)` in reference coordinates;
//! local dof `2a + i` is component `i` at node `a`. Gradients are taken on
//! the unit reference square; the element matrices below are independent of
//! the pixel size because `int grad v . C grad w` is scale-invariant in 2D.

use crate::tensor::{vec_index, QuadraticForm4};

#[allow(unused_imports)]
use num_traits::Float;

pub type ElementMatrix = [[f64; 8]; 8];

/// `vec(grad v)` on the reference square as a map from local dofs.
pub type GradientMap = [[f64; 8]; 4];

/// Gradient map at reference point `(xi, eta)`.
pub fn gradient_map(xi: f64, eta: f64) -> GradientMap {
    // dN_a/dxi, dN_a/deta for N0=(1-xi)(1-eta), N1=xi(1-eta), N2=(1-xi)eta, N3=xi eta
    let dn = [
        [-(1.0 - eta), -(1.0 - xi)],
        [1.0 - eta, -xi],
        [-eta, 1.0 - xi],
        [eta, xi],
    ];
    let mut b = [[0.0; 8]; 4];
    for (a, d) in dn.iter().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                b[vec_index(i, j)][2 * a + i] = d[j];
            }
        }
    }
    b
}

/// The 2x2 Gauss points of the unit square; each carries weight 1/4.
pub fn gauss_points() -> [(f64, f64); 4] {
    let d = 0.5 / 3.0f64.sqrt();
    let (lo, hi) = (0.5 - d, 0.5 + d);
    [(lo, lo), (hi, lo), (lo, hi), (hi, hi)]
}

/// `sum_q w_q B_q`: the element-average gradient map (the gradient at the
/// centroid).
pub fn mean_gradient_map() -> GradientMap {
    gradient_map(0.5, 0.5)
}

/// `int_element B^T C B` by 2x2 Gauss quadrature, exact for Q1.
pub fn element_form(c: &QuadraticForm4) -> ElementMatrix {
    let coeffs = c.coeffs();
    let mut k = [[0.0; 8]; 8];
    for (xi, eta) in gauss_points() {
        let b = gradient_map(xi, eta);
        let mut cb = [[0.0; 8]; 4];
        for p in 0..4 {
            for d in 0..8 {
                cb[p][d] = (0..4).map(|q| coeffs[p][q] * b[q][d]).sum();
            }
        }
        for r in 0..8 {
            for s in 0..8 {
                k[r][s] += 0.25 * (0..4).map(|p| b[p][r] * cb[p][s]).sum::<f64>();
            }
        }
    }
    // exact symmetrization removes quadrature-order rounding
    for r in 0..8 {
        for s in r + 1..8 {
            let m = 0.5 * (k[r][s] + k[s][r]);
            k[r][s] = m;
            k[s][r] = m;
        }
    }
    k
}

/// Local load `B_mean^T C m` for unit pixel size; the assembled load for a
/// pixel of side `h` is `h` times this.
pub fn element_load(c: &QuadraticForm4, m: [f64; 4]) -> [f64; 8] {
    let b = mean_gradient_map();
    let coeffs = c.coeffs();
    let cm: [f64; 4] = core::array::from_fn(|p| (0..4).map(|q| coeffs[p][q] * m[q]).sum());
    core::array::from_fn(|d| (0..4).map(|p| b[p][d] * cm[p]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{iso_tensor, LameParams};

    fn matvec(k: &ElementMatrix, v: &[f64; 8]) -> [f64; 8] {
        core::array::from_fn(|r| (0..8).map(|s| k[r][s] * v[s]).sum())
    }

    #[test]
    fn identity_form_is_the_vector_laplacian() {
        // scalar Q1 Laplacian on the unit square: diagonal 2/3, edge -1/6, diagonal -1/3
        let k = element_form(&QuadraticForm4::identity());
        let scalar = [
            [4.0, -1.0, -1.0, -2.0],
            [-1.0, 4.0, -2.0, -1.0],
            [-1.0, -2.0, 4.0, -1.0],
            [-2.0, -1.0, -1.0, 4.0],
        ];
        for a in 0..4 {
            for b in 0..4 {
                for i in 0..2 {
                    for j in 0..2 {
                        let expect = if i == j { scalar[a][b] / 6.0 } else { 0.0 };
                        assert!((k[2 * a + i][2 * b + j] - expect).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn isotropic_kernel_is_rigid_motions() {
        let k = element_form(&iso_tensor(LameParams::new(1.0, 1.0)));
        for i in 0..2 {
            let t: [f64; 8] = core::array::from_fn(|d| if d % 2 == i { 1.0 } else { 0.0 });
            assert!(matvec(&k, &t).iter().all(|x| x.abs() < 1e-14));
        }
        // the isotropic form only sees sym(grad v), so the infinitesimal
        // rotation (-y, x) is a third kernel vector of the element matrix
        let rot = [0.0, 0.0, 0.0, 1.0, -1.0, 0.0, -1.0, 1.0];
        assert!(matvec(&k, &rot).iter().all(|x| x.abs() < 1e-14));
        let m = nalgebra::SMatrix::<f64, 8, 8>::from_fn(|r, s| k[r][s]);
        let ev = m.symmetric_eigenvalues();
        let zero = ev.iter().filter(|e| e.abs() < 1e-12).count();
        assert_eq!(zero, 3);
        assert!(ev.iter().all(|&e| e > -1e-12));
        // the full-gradient identity form does see the rotation
        let g = element_form(&QuadraticForm4::identity());
        let gr = matvec(&g, &rot);
        let g_energy: f64 = rot.iter().zip(&gr).map(|(a, b)| a * b).sum();
        assert!((g_energy - 2.0).abs() < 1e-14);
    }

    #[test]
    fn element_matrix_symmetric() {
        let c = QuadraticForm4::symmetrized([
            [1.0, 0.3, -0.2, 0.7],
            [0.3, 2.0, 0.1, -0.4],
            [-0.2, 0.1, 0.5, 0.9],
            [0.7, -0.4, 0.9, 3.0],
        ]);
        let k = element_form(&c);
        for r in 0..8 {
            for s in 0..8 {
                assert!((k[r][s] - k[s][r]).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn load_matches_energy_derivative() {
        // f.v = int m . C grad v for the affine field v = A x has grad v = A
        let c = iso_tensor(LameParams::new(-3.0, 2.0));
        let a = [0.4, -1.0, 0.25, 2.0];
        let m = [1.0, 0.5, -0.5, 0.2];
        let nodes = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
        let mut v = [0.0; 8];
        for (k, &(x, y)) in nodes.iter().enumerate() {
            v[2 * k] = a[0] * x + a[1] * y;
            v[2 * k + 1] = a[2] * x + a[3] * y;
        }
        let f = element_load(&c, m);
        let lhs: f64 = f.iter().zip(&v).map(|(p, q)| p * q).sum();
        let rhs: f64 = (0..4).map(|p| (0..4).map(|q| m[p] * c.coeffs()[p][q] * a[q]).sum::<f64>()).sum();
        assert!((lhs - rhs).abs() < 1e-14);
    }
}
