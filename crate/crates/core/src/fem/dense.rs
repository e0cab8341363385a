//! Dense assembly and direct solves, for small cells and cross-checks.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::{project_mean_zero, CellProblem, Twist};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Matrix2;

/// Largest cell size accepted by the dense routines.
pub const DENSE_MAX_N: usize = 16;

fn check_size(problem: &CellProblem) -> Result<()> {
    if problem.n() > DENSE_MAX_N {
        return Err(Error::InvalidParameter { name: "n", reason: "dense fallback supports n <= 16 only" });
    }
    Ok(())
}

/// Assembled `(K, G)` by applying the operator to unit vectors.
pub fn assemble<S: Scalar>(problem: &CellProblem, twist: &Twist<S>) -> (DMatrix<S>, DMatrix<S>) {
    let d = problem.dofs();
    let mut k = DMatrix::zeros(d, d);
    let mut g = DMatrix::zeros(d, d);
    let mut e = vec![S::zero(); d];
    let mut kc = vec![S::zero(); d];
    let mut gc = vec![S::zero(); d];
    for col in 0..d {
        e[col] = S::one();
        kc.fill(S::zero());
        gc.fill(S::zero());
        problem.apply_into(twist, &e, &mut kc, Some(&mut gc));
        for row in 0..d {
            k[(row, col)] = kc[row];
            g[(row, col)] = gc[row];
        }
        e[col] = S::zero();
    }
    (k, g)
}

/// Basis of the mean-zero subspace: `e_(2k+i) - e_(2(N-1)+i)` for the first
/// `N - 1` nodes.
fn mean_zero_basis<S: Scalar>(dofs: usize) -> DMatrix<S> {
    let last = dofs - 2;
    let mut z = DMatrix::zeros(dofs, dofs - 2);
    for c in 0..dofs - 2 {
        z[(c, c)] = S::one();
        z[(last + c % 2, c)] = -S::one();
    }
    z
}

/// Generalized eigenvalues of `(K, G)`, ascending, over mean-zero fields when
/// the twist is periodic and over all quasi-periodic fields otherwise.
pub fn dense_eigenvalues<S: Scalar>(problem: &CellProblem, twist: &Twist<S>) -> Result<Vec<f64>> {
    check_size(problem)?;
    let (mut k, mut g) = assemble(problem, twist);
    if twist.is_periodic() {
        let z = mean_zero_basis::<S>(problem.dofs());
        k = z.adjoint() * &k * &z;
        g = z.adjoint() * &g * &z;
    }
    let chol = g.cholesky().ok_or(Error::InvalidParameter { name: "gram", reason: "not positive definite" })?;
    let l = chol.l();
    let y = l.solve_lower_triangular(&k).expect("nonsingular triangle");
    let c = l.solve_lower_triangular(&y.adjoint()).expect("nonsingular triangle");
    let c = (&c + c.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = c.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    Ok(ev)
}

pub fn dense_min_eigenvalue<S: Scalar>(problem: &CellProblem, twist: &Twist<S>) -> Result<f64> {
    Ok(dense_eigenvalues(problem, twist)?[0])
}

/// Direct solve of the corrector system; returns the displacement and the
/// cell energy.
pub fn dense_corrector(problem: &CellProblem, m: &Matrix2) -> Result<(Vec<f64>, f64)> {
    check_size(problem)?;
    let (k, _) = assemble::<f64>(problem, &Twist::periodic());
    let z = mean_zero_basis::<f64>(problem.dofs());
    let kz = z.transpose() * &k * &z;
    let f = nalgebra::DVector::from_vec(problem.load(m));
    let rhs = -(z.transpose() * &f);
    let y = kz.lu().solve(&rhs).ok_or(Error::IndefinitenessDetected { rayleigh_quotient: 0.0 })?;
    let mut v: Vec<f64> = (&z * y).iter().copied().collect();
    project_mean_zero(&mut v);
    let lin: f64 = f.iter().zip(&v).map(|(a, b)| a * b).sum();
    Ok((v, problem.constant_energy(m) + lin))
}
