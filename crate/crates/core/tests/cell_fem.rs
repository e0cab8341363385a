use ellipthom_core::fem::{homogenized_tensor, solve_corrector, CellProblem, Material, SolverOptions};
use ellipthom_core::microstructure::{disks, laminate, random_disks, Axis, PixelGrid, RandomDisks};
use ellipthom_core::tensor::{make_gutierrez, Matrix2};

fn gutierrez() -> Material {
    Material::from(&make_gutierrez(1.0, 1.0, 2.0, -3.0).unwrap())
}

fn opts() -> SolverOptions {
    SolverOptions { tol: 1e-12, ..SolverOptions::default() }
}

fn corpus() -> Vec<PixelGrid> {
    vec![
        laminate(8, 0.25, Axis::X1).unwrap(),
        disks(8, &[[0.5, 0.5]], 0.3, true).unwrap(),
        disks(8, &[[0.5, 0.5]], 0.3, false).unwrap(),
        random_disks(&RandomDisks { n: 16, seed: 3, target_theta: 0.3, min_gap: 0.0, radius: Some(0.15) }).unwrap(),
    ]
}

#[test]
fn energies_do_not_increase_under_refinement() {
    let loads = [Matrix2::unit(0, 0), Matrix2::new(0.4, 1.0, -0.2, 0.7)];
    for grid in corpus() {
        for m in &loads {
            let coarse = solve_corrector(&CellProblem::new(grid.clone(), gutierrez(), 0.0), m, &opts()).unwrap();
            let fine = solve_corrector(&CellProblem::new(grid.refined(2), gutierrez(), 0.0), m, &opts()).unwrap();
            assert!(fine.energy <= coarse.energy + 1e-9 * coarse.energy.abs().max(1.0), "{} > {}", fine.energy, coarse.energy);
        }
    }
}

#[test]
fn corrected_energy_is_below_the_unrelaxed_average() {
    for grid in corpus() {
        let p = CellProblem::new(grid, gutierrez(), 0.0);
        for m in [Matrix2::unit(1, 1), Matrix2::new(1.0, -0.5, 0.25, 2.0)] {
            let s = solve_corrector(&p, &m, &opts()).unwrap();
            assert!(s.energy <= p.constant_energy(&m) + 1e-12);
        }
    }
}

#[test]
fn axis_swap_transposes_the_effective_tensor() {
    for theta in [0.25, 0.5] {
        let a = homogenized_tensor(&CellProblem::new(laminate(8, theta, Axis::X1).unwrap(), gutierrez(), 0.0), &opts()).unwrap();
        let b = homogenized_tensor(&CellProblem::new(laminate(8, theta, Axis::X2).unwrap(), gutierrez(), 0.0), &opts()).unwrap();
        let swapped = a.lstar.axis_swapped();
        for i in 0..4 {
            for j in 0..4 {
                assert!((swapped.coeffs()[i][j] - b.lstar.coeffs()[i][j]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn effective_tensor_reproduces_direct_solves() {
    for grid in corpus() {
        let p = CellProblem::new(grid, gutierrez(), 0.0);
        let h = homogenized_tensor(&p, &opts()).unwrap();
        for m in [Matrix2::new(0.3, -1.2, 0.8, 0.1), Matrix2::new(-2.0, 0.5, 0.5, 1.5)] {
            let direct = solve_corrector(&p, &m, &opts()).unwrap().energy;
            let via = h.lstar.eval(&m);
            assert!((direct - via).abs() <= 1e-9 * direct.abs().max(1.0), "{direct} vs {via}");
        }
    }
}

#[test]
fn energies_are_translation_invariant() {
    let grid = disks(8, &[[0.3, 0.6]], 0.25, true).unwrap();
    let m = Matrix2::new(0.5, 0.2, -0.7, 1.0);
    let base = solve_corrector(&CellProblem::new(grid.clone(), gutierrez(), 0.0), &m, &opts()).unwrap().energy;
    let moved = solve_corrector(&CellProblem::new(grid.shifted(3, 5), gutierrez(), 0.0), &m, &opts()).unwrap().energy;
    assert!((base - moved).abs() < 1e-9);
}
