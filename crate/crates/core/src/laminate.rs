//! Closed-form homogenization of two-phase laminates.
//!
//! For bands normal to `e_j` the corrector gradient is constant in each
//! phase, `c1 (x) e_j` in the strong and `c2 (x) e_j` in the weak phase, with
//! the zero-mean constraint `theta c1 + (1 - theta) c2 = 0`. Eliminating
//! `c2` leaves a 2x2 quadratic minimization in `c1`:
//! `H c1 = -g` with `H = theta G1 + theta^2 / (1 - theta) G2` (`Gk` the
//! acoustic tensor of phase `k` along `e_j`) and `g = theta (b1 - b2)`,
//! `bk = (C_k m)` restricted to the `e_j` column.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fem::Material;
use crate::microstructure::Axis;
use crate::tensor::{sym2_eigen, vec_index, Matrix2, QuadraticForm4};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaminateSpec {
    /// Strong-phase volume fraction, in `(0, 1)`.
    pub theta: f64,
    pub normal_axis: Axis,
    pub material: Material,
}

impl LaminateSpec {
    pub fn new(theta: f64, normal_axis: Axis, material: Material) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidParameter { name: "theta", reason: "must lie in (0, 1)" });
        }
        Ok(Self { theta, normal_axis, material })
    }

    fn normal(&self) -> usize {
        match self.normal_axis {
            Axis::X1 => 0,
            Axis::X2 => 1,
        }
    }
}

/// Eigenvalues of `H` below this fraction of its largest are treated as zero.
const SINGULAR_REL: f64 = 1e-12;

fn acoustic_column(c: &QuadraticForm4, j: usize) -> [[f64; 2]; 2] {
    let k = c.coeffs();
    [
        [k[vec_index(0, j)][vec_index(0, j)], k[vec_index(0, j)][vec_index(1, j)]],
        [k[vec_index(1, j)][vec_index(0, j)], k[vec_index(1, j)][vec_index(1, j)]],
    ]
}

fn load_column(c: &QuadraticForm4, j: usize, m: &Matrix2) -> [f64; 2] {
    let k = c.coeffs();
    let mv = m.to_vec();
    core::array::from_fn(|i| (0..4).map(|q| k[vec_index(i, j)][q] * mv[q]).sum())
}

/// Per-phase corrector gradients `(c1, c2)` for loading `M`: the fields are
/// `c1 (x) e_j` in the strong and `c2 (x) e_j` in the weak phase.
pub fn laminate_corrector(spec: &LaminateSpec, m: &Matrix2) -> Result<([f64; 2], [f64; 2])> {
    let j = spec.normal();
    let t = spec.theta;
    let r = t / (1.0 - t);
    let (g1, g2) = (acoustic_column(&spec.material.strong, j), acoustic_column(&spec.material.weak, j));
    let h: [[f64; 2]; 2] = core::array::from_fn(|a| core::array::from_fn(|b| t * g1[a][b] + t * r * g2[a][b]));
    let (b1, b2) = (load_column(&spec.material.strong, j, m), load_column(&spec.material.weak, j, m));
    let g = [t * (b1[0] - b2[0]), t * (b1[1] - b2[1])];

    // pseudo-inverse through the eigendecomposition of H
    let (ev, v0) = sym2_eigen(h);
    let v1 = [-v0[1], v0[0]];
    let scale = ev[0].abs().max(ev[1].abs()).max(f64::MIN_POSITIVE);
    let gnorm = (g[0] * g[0] + g[1] * g[1]).sqrt();
    let mut c1 = [0.0; 2];
    for (lam, v) in [(ev[0], v0), (ev[1], v1)] {
        let proj = v[0] * g[0] + v[1] * g[1];
        if lam > SINGULAR_REL * scale {
            c1[0] -= proj / lam * v[0];
            c1[1] -= proj / lam * v[1];
        } else if lam < -SINGULAR_REL * scale || proj.abs() > 1e-12 * gnorm.max(1.0) {
            // unbounded below along v: no minimizer
            return Err(Error::SingularSystem { null_direction: v });
        }
    }
    let c2 = [-r * c1[0], -r * c1[1]];
    Ok((c1, c2))
}

fn with_column(m: &Matrix2, j: usize, c: [f64; 2]) -> Matrix2 {
    let mut out = *m;
    out.entries[0][j] += c[0];
    out.entries[1][j] += c[1];
    out
}

/// Energy `theta Q1(M + c1 (x) e_j) + (1 - theta) Q2(M + c2 (x) e_j)`.
pub fn laminate_energy(spec: &LaminateSpec, m: &Matrix2, c1: [f64; 2], c2: [f64; 2]) -> f64 {
    let j = spec.normal();
    spec.theta * spec.material.strong.eval(&with_column(m, j, c1))
        + (1.0 - spec.theta) * spec.material.weak.eval(&with_column(m, j, c2))
}

/// Effective tensor of the laminate, from the four basis loadings and their
/// pairwise sums.
pub fn laminate_lstar(spec: &LaminateSpec) -> Result<QuadraticForm4> {
    let energy = |m: &Matrix2| -> Result<f64> {
        let (c1, c2) = laminate_corrector(spec, m)?;
        Ok(laminate_energy(spec, m, c1, c2))
    };
    let basis = |a: usize| Matrix2::from_vec(core::array::from_fn(|k| if k == a { 1.0 } else { 0.0 }));
    let mut coeffs = [[0.0; 4]; 4];
    for a in 0..4 {
        coeffs[a][a] = energy(&basis(a))?;
    }
    for a in 0..4 {
        for b in a + 1..4 {
            let pair = energy(&(basis(a) + basis(b)))?;
            let off = 0.5 * (pair - coeffs[a][a] - coeffs[b][b]);
            coeffs[a][b] = off;
            coeffs[b][a] = off;
        }
    }
    Ok(QuadraticForm4::symmetrized(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{iso_tensor, make_gutierrez, LameParams};

    fn gutierrez() -> Material {
        Material::from(&make_gutierrez(1.0, 1.0, 2.0, -3.0).unwrap())
    }

    #[test]
    fn balanced_gutierrez_corrector() {
        let spec = LaminateSpec::new(0.5, Axis::X1, gutierrez()).unwrap();
        let m = Matrix2::unit(1, 1);
        let (c1, c2) = laminate_corrector(&spec, &m).unwrap();
        assert!((c1[0] + 1.0).abs() < 1e-14 && c1[1].abs() < 1e-14);
        assert!((c2[0] - 1.0).abs() < 1e-14 && c2[1].abs() < 1e-14);
        let l = laminate_lstar(&spec).unwrap();
        assert!(l.eval(&m).abs() < 1e-14);
    }

    #[test]
    fn zero_loading_has_zero_corrector() {
        let spec = LaminateSpec::new(0.25, Axis::X2, gutierrez()).unwrap();
        assert_eq!(laminate_corrector(&spec, &Matrix2::ZERO).unwrap(), ([0.0; 2], [0.0; 2]));
    }

    #[test]
    fn single_phase_is_unchanged() {
        let c = iso_tensor(LameParams::new(1.0, 1.0));
        for theta in [0.1, 0.5, 0.8] {
            let spec = LaminateSpec::new(theta, Axis::X1, Material::homogeneous(c)).unwrap();
            let l = laminate_lstar(&spec).unwrap();
            for a in 0..4 {
                for b in 0..4 {
                    assert!((l.coeffs()[a][b] - c.coeffs()[a][b]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn mean_constraint_holds() {
        let spec = LaminateSpec::new(0.3, Axis::X1, gutierrez()).unwrap();
        let (c1, c2) = laminate_corrector(&spec, &Matrix2::new(0.2, -1.0, 0.7, 0.4)).unwrap();
        for i in 0..2 {
            assert!((0.3 * c1[i] + 0.7 * c2[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_system_is_rejected() {
        let weak = iso_tensor(LameParams::new(-10.0, 2.0));
        let spec = LaminateSpec::new(0.5, Axis::X1, Material::new(iso_tensor(LameParams::new(1.0, 1.0)), weak)).unwrap();
        assert!(matches!(laminate_lstar(&spec), Err(Error::SingularSystem { .. })));
    }
}
