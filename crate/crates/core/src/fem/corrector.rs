use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{project_mean_zero, CellProblem, LaplaceInverse, Twist};
use crate::error::{Error, Result};
use crate::tensor::{Matrix2, QuadraticForm4};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative residual target `|K v + f| <= tol |f|`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 20_000 }
    }
}

/// Curvature `p.K p` at or below this multiple of `p.G p` stops CG.
const CURVATURE_FLOOR: f64 = 1e-12;

/// Absolute residual floor, relative to the norm of the unassembled loads;
/// below it the residual is pure rounding (e.g. a homogeneous cell, whose
/// assembled load cancels to machine precision).
const ROUNDING_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectorSolution {
    /// Periodic nodal displacement, mean zero per component.
    pub displacement: Vec<f64>,
    /// Cell energy at the minimizer.
    pub energy: f64,
    /// Final relative residual.
    pub residual: f64,
    pub iterations: usize,
    /// Smallest `p.K p / p.G p` met along the CG search directions.
    pub min_curvature: f64,
}

struct CgOutcome {
    x: Vec<f64>,
    residual: f64,
    iterations: usize,
    min_curvature: f64,
}

/// Preconditioned CG for `K x = b` on mean-zero periodic fields, `b` mean
/// zero. Reports `IndefinitenessDetected` on nonpositive curvature, with the
/// unshifted Rayleigh quotient `p.(K + shift G) p / p.G p` of the direction.
fn pcg(problem: &CellProblem, precond: &LaplaceInverse, b: &[f64], floor: f64, opts: &SolverOptions) -> Result<CgOutcome> {
    let len = b.len();
    let twist = Twist::<f64>::periodic();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let b_norm = dot(b, b).sqrt();
    let target = (opts.tol * b_norm).max(floor);
    let mut x = vec![0.0; len];
    if b_norm <= target {
        return Ok(CgOutcome { x, residual: 0.0, iterations: 0, min_curvature: f64::INFINITY });
    }
    let mut r = b.to_vec();
    let mut z = vec![0.0; len];
    precond.apply(&r, &mut z);
    project_mean_zero(&mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut kp = vec![0.0; len];
    let mut gp = vec![0.0; len];
    let mut min_curvature = f64::INFINITY;
    for iter in 1..=opts.max_iter {
        kp.fill(0.0);
        gp.fill(0.0);
        problem.apply_into(&twist, &p, &mut kp, Some(&mut gp));
        let pkp = dot(&p, &kp);
        let pgp = dot(&p, &gp);
        let curvature = pkp / pgp;
        min_curvature = min_curvature.min(curvature);
        if pkp <= CURVATURE_FLOOR * pgp {
            return Err(Error::IndefinitenessDetected { rayleigh_quotient: curvature + problem.shift() });
        }
        let alpha = rz / pkp;
        for k in 0..len {
            x[k] += alpha * p[k];
            r[k] -= alpha * kp[k];
        }
        let r_norm = dot(&r, &r).sqrt();
        if r_norm <= target {
            project_mean_zero(&mut x);
            return Ok(CgOutcome { x, residual: r_norm / b_norm, iterations: iter, min_curvature });
        }
        precond.apply(&r, &mut z);
        project_mean_zero(&mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for k in 0..len {
            p[k] = z[k] + beta * p[k];
        }
    }
    let r_norm = dot(&r, &r).sqrt();
    Err(Error::NotConverged { residual: r_norm / b_norm, iterations: opts.max_iter })
}

/// Norm of the load before assembly, the natural scale for rounding.
fn unassembled_load_norm(problem: &CellProblem, m: &Matrix2) -> f64 {
    let n = problem.n();
    let h = 1.0 / n as f64;
    let mv = m.to_vec();
    let material = problem.material();
    let strong = problem.grid().strong_count() as f64;
    let weak = (n * n) as f64 - strong;
    let sq = |c: &QuadraticForm4| {
        let fe = super::element::element_load(&c.shifted(problem.shift()), mv);
        fe.iter().map(|x| x * x).sum::<f64>()
    };
    h * (strong * sq(&material.strong) + weak * sq(&material.weak)).sqrt()
}

/// Minimizes the shifted cell energy under loading `M` over mean-zero
/// periodic fields by solving `K v = -f(M)`.
pub fn solve_corrector(problem: &CellProblem, m: &Matrix2, opts: &SolverOptions) -> Result<CorrectorSolution> {
    let precond = LaplaceInverse::new(problem.n(), [0.0, 0.0]);
    solve_with(problem, &precond, m, opts)
}

fn solve_with(problem: &CellProblem, precond: &LaplaceInverse, m: &Matrix2, opts: &SolverOptions) -> Result<CorrectorSolution> {
    let f = problem.load(m);
    let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
    let floor = ROUNDING_FLOOR * unassembled_load_norm(problem, m);
    let out = pcg(problem, precond, &rhs, floor, opts)?;
    let lin: f64 = f.iter().zip(&out.x).map(|(a, b)| a * b).sum();
    Ok(CorrectorSolution {
        energy: problem.constant_energy(m) + lin,
        displacement: out.x,
        residual: out.residual,
        iterations: out.iterations,
        min_curvature: out.min_curvature,
    })
}

/// Effective tensor of a cell problem with its corrector data.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogenizedResult {
    pub lstar: QuadraticForm4,
    /// Cell energies keyed by loading: `e11`, `e12`, `e21`, `e22` for the
    /// basis matrices and `e11+e22` style keys for pair sums.
    pub per_direction_energy: BTreeMap<String, f64>,
    /// Element-average corrector gradients per basis loading, in `vec` order.
    pub corrector_gradients: Vec<Vec<Matrix2>>,
    pub iterations: usize,
    pub max_residual: f64,
    pub min_curvature: f64,
}

const BASIS_NAMES: [&str; 4] = ["e11", "e12", "e21", "e22"];

/// The homogenized form of the (shifted) cell problem: four basis corrector
/// solves, off-diagonal entries by polarization with the corrector of the
/// summed loading (by linearity, the sum of the basis correctors).
pub fn homogenized_tensor(problem: &CellProblem, opts: &SolverOptions) -> Result<HomogenizedResult> {
    let precond = LaplaceInverse::new(problem.n(), [0.0, 0.0]);
    let degenerate = |e: Error| match e {
        Error::IndefinitenessDetected { rayleigh_quotient } => {
            Error::DegenerateCell { shift: problem.shift(), rayleigh_quotient }
        }
        other => other,
    };
    let mut solutions = Vec::with_capacity(4);
    let mut loads = Vec::with_capacity(4);
    for a in 0..4 {
        let m = Matrix2::from_vec(core::array::from_fn(|k| if k == a { 1.0 } else { 0.0 }));
        solutions.push(solve_with(problem, &precond, &m, opts).map_err(degenerate)?);
        loads.push(problem.load(&m));
    }
    let mut energy = BTreeMap::new();
    let mut coeffs = [[0.0; 4]; 4];
    for a in 0..4 {
        coeffs[a][a] = solutions[a].energy;
        energy.insert(String::from(BASIS_NAMES[a]), solutions[a].energy);
    }
    for a in 0..4 {
        for b in a + 1..4 {
            let m = Matrix2::from_vec(core::array::from_fn(|k| if k == a || k == b { 1.0 } else { 0.0 }));
            let lin: f64 = (0..loads[a].len())
                .map(|k| (loads[a][k] + loads[b][k]) * (solutions[a].displacement[k] + solutions[b].displacement[k]))
                .sum();
            let pair = problem.constant_energy(&m) + lin;
            energy.insert(format!("{}+{}", BASIS_NAMES[a], BASIS_NAMES[b]), pair);
            let off = 0.5 * (pair - coeffs[a][a] - coeffs[b][b]);
            coeffs[a][b] = off;
            coeffs[b][a] = off;
        }
    }
    Ok(HomogenizedResult {
        lstar: QuadraticForm4::symmetrized(coeffs),
        per_direction_energy: energy,
        corrector_gradients: solutions.iter().map(|s| problem.element_gradients(&s.displacement)).collect(),
        iterations: solutions.iter().map(|s| s.iterations).sum(),
        max_residual: solutions.iter().map(|s| s.residual).fold(0.0, f64::max),
        min_curvature: solutions.iter().map(|s| s.min_curvature).fold(f64::INFINITY, f64::min),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::Material;
    use crate::microstructure::{laminate, Axis, PixelGrid};
    use crate::tensor::{iso_tensor, make_gutierrez, LameParams};

    fn gutierrez() -> Material {
        Material::from(&make_gutierrez(1.0, 1.0, 2.0, -3.0).unwrap())
    }

    #[test]
    fn homogeneous_corrector_is_zero() {
        let c = iso_tensor(LameParams::new(1.0, 1.0));
        let p = CellProblem::new(PixelGrid::uniform(8, false).unwrap(), Material::homogeneous(c), 0.0);
        let m = Matrix2::new(0.3, -1.0, 2.0, 0.5);
        let s = solve_corrector(&p, &m, &SolverOptions::default()).unwrap();
        assert!(s.displacement.iter().all(|x| x.abs() < 1e-13));
        assert!((s.energy - c.eval(&m)).abs() < 1e-13);
        let h = homogenized_tensor(&p, &SolverOptions::default()).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert!((h.lstar.coeffs()[a][b] - c.coeffs()[a][b]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn balanced_laminate_has_exact_degenerate_corrector() {
        let grid = laminate(16, 0.5, Axis::X1).unwrap();
        let p = CellProblem::new(grid.clone(), gutierrez(), 0.0);
        let s = solve_corrector(&p, &Matrix2::unit(1, 1), &SolverOptions::default()).unwrap();
        assert!(s.energy.abs() <= 1e-10, "energy {}", s.energy);
        for (k, g) in p.element_gradients(&s.displacement).iter().enumerate() {
            let sign = if grid.bits()[k] { -1.0 } else { 1.0 };
            let expect = Matrix2::new(sign, 0.0, 0.0, 0.0);
            assert!((*g - expect).norm_squared().sqrt() < 1e-6, "pixel {k}: {g:?}");
        }
    }

    #[test]
    fn energy_at_solution_matches_direct_evaluation() {
        let p = CellProblem::new(laminate(8, 0.25, Axis::X2).unwrap(), gutierrez(), 0.2);
        let m = Matrix2::new(1.0, 0.2, -0.4, 0.7);
        let s = solve_corrector(&p, &m, &SolverOptions::default()).unwrap();
        let direct = p.energy(&m, &s.displacement).unwrap();
        assert!((direct - s.energy).abs() <= 1e-10 * s.energy.abs().max(1.0));
        let mean: f64 = s.displacement.iter().step_by(2).sum::<f64>() / 64.0;
        assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn shift_beyond_spectrum_is_detected() {
        let p = CellProblem::new(laminate(8, 0.5, Axis::X1).unwrap(), gutierrez(), 50.0);
        match homogenized_tensor(&p, &SolverOptions::default()) {
            Err(Error::DegenerateCell { shift, .. }) => assert_eq!(shift, 50.0),
            other => panic!("expected DegenerateCell, got {other:?}"),
        }
    }
}
