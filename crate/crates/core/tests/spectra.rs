use std::f64::consts::PI;

use ellipthom_core::fem::Material;
use ellipthom_core::microstructure::{checkerboard, disks, laminate, Axis, PixelGrid};
use ellipthom_core::spectra::{
    bloch_min, lambda1, lambda3_supercell, lambda4, lambda5, lambda6, spectral_report, supercell_bloch_min,
    SpectraOptions,
};
use ellipthom_core::tensor::{iso_tensor, make_gutierrez, LameParams};
use proptest::prelude::*;

fn gutierrez() -> Material {
    Material::from(&make_gutierrez(1.0, 1.0, 2.0, -3.0).unwrap())
}

fn opts() -> SpectraOptions {
    SpectraOptions::default()
}

#[test]
fn homogeneous_constants_approach_one_from_above() {
    let m = Material::homogeneous(iso_tensor(LameParams::new(1.0, 1.0)));
    let mut prev = [f64::INFINITY; 3];
    for n in [8, 16] {
        let grid = PixelGrid::uniform(n, true).unwrap();
        let l6 = lambda6(&grid, &m, &opts()).unwrap().value;
        let l4 = lambda4(&grid, &m, l6, &opts()).unwrap().value.value;
        let l5 = lambda5(&grid, &m, &opts()).unwrap().value.value;
        let l1 = lambda1(&grid, &m, Some(l5), &opts()).unwrap().value.value;
        let now = [l6, l4, l1];
        for (v, p) in now.iter().zip(&prev) {
            assert!((1.0 - 1e-9..=1.02).contains(v), "{now:?}");
            assert!(*v <= p + 1e-9);
        }
        prev = now;
    }
}

#[test]
fn balanced_laminate_loses_rank_one_coercivity_only() {
    let grid = laminate(16, 0.5, Axis::X1).unwrap();
    let l6 = lambda6(&grid, &gutierrez(), &opts()).unwrap().value;
    assert!(l6 >= 1e-2, "{l6}");
    let l4 = lambda4(&grid, &gutierrez(), l6, &opts()).unwrap();
    assert!(l4.value.value.abs() <= 1e-6, "{}", l4.value.value);
    // degenerate direction e2 (x) e2
    assert!(l4.argmin.b[0].abs() < 1e-3 && l4.argmin.a[0].abs() < 1e-3, "{:?}", l4.argmin);
}

#[test]
fn small_momentum_limit_matches_lambda4_on_laminates() {
    for theta in [0.25, 0.5] {
        let grid = laminate(8, theta, Axis::X2).unwrap();
        let l6 = lambda6(&grid, &gutierrez(), &opts()).unwrap().value;
        let l4 = lambda4(&grid, &gutierrez(), l6, &opts()).unwrap().value.value;
        let l5 = lambda5(&grid, &gutierrez(), &opts()).unwrap().value.value;
        assert!((l5 - l4).abs() <= 1e-4, "theta {theta}: {l5} vs {l4}");
    }
}

#[test]
fn supercells_decompose_into_bloch_momenta() {
    let grid = disks(8, &[[0.4, 0.5]], 0.3, true).unwrap();
    let l6 = lambda6(&grid, &gutierrez(), &opts()).unwrap().value;
    assert_eq!(lambda3_supercell(&grid, &gutierrez(), 1, &opts()).unwrap().value, l6);
    for k in [2, 3] {
        let tiled = lambda3_supercell(&grid, &gutierrez(), k, &opts()).unwrap().value;
        let bloch = supercell_bloch_min(&grid, &gutierrez(), k, &opts()).unwrap();
        assert!((tiled - bloch).abs() <= 1e-8, "k = {k}: {tiled} vs {bloch}");
        assert!(tiled <= l6 + 1e-8);
    }
}

#[test]
fn zero_momentum_is_the_periodic_problem() {
    let grid = checkerboard(8).unwrap();
    let l6 = lambda6(&grid, &gutierrez(), &opts()).unwrap().value;
    for gamma in [[0.0, 0.0], [2.0 * PI, -2.0 * PI]] {
        let b = bloch_min(&grid, &gutierrez(), gamma, &opts()).unwrap().value;
        assert!((b - l6).abs() <= 1e-10);
    }
}

#[test]
fn constants_scale_with_the_phases() {
    let grid = disks(8, &[[0.5, 0.5]], 0.25, false).unwrap();
    let base = gutierrez();
    let scaled = base.scaled(2.5);
    let o = opts();
    let a6 = lambda6(&grid, &base, &o).unwrap().value;
    let b6 = lambda6(&grid, &scaled, &o).unwrap().value;
    assert!((b6 - 2.5 * a6).abs() <= 1e-8 * b6.abs());
    let a4 = lambda4(&grid, &base, a6, &o).unwrap();
    let b4 = lambda4(&grid, &scaled, b6, &o).unwrap();
    assert!((b4.value.value - 2.5 * a4.value.value).abs() <= 1e-8 * b4.value.value.abs());
    let a1 = lambda1(&grid, &base, None, &o).unwrap();
    let b1 = lambda1(&grid, &scaled, None, &o).unwrap();
    assert!((b1.value.value - 2.5 * a1.value.value).abs() <= 1e-8 * b1.value.value.abs());
    assert_eq!(a1.gamma.is_some(), b1.gamma.is_some());

    // the disk cell has symmetric ties, so angles are compared on a laminate
    let lam = laminate(8, 0.25, Axis::X1).unwrap();
    let a = lambda4(&lam, &base, lambda6(&lam, &base, &o).unwrap().value, &o).unwrap();
    let b = lambda4(&lam, &scaled, lambda6(&lam, &scaled, &o).unwrap().value, &o).unwrap();
    assert!((a.argmin.phi_b - b.argmin.phi_b).abs() < 1e-3 && (a.argmin.phi_a - b.argmin.phi_a).abs() < 1e-3);
    assert!((b.value.value - 2.5 * a.value.value).abs() <= 1e-8 * b.value.value.abs());
}

#[test]
fn report_orderings_hold_on_a_class_a_cell() {
    let grid = disks(8, &[[0.5, 0.5]], 0.25, true).unwrap();
    let r = spectral_report(&grid, &gutierrez(), &[1, 2], &opts()).unwrap();
    let c = r.checks;
    assert!(
        c.lambda6_ge_lambda4 && c.lambda4_ge_lambda1 && c.lambda1_le_lambda6 && c.lambda5_ge_lambda1 && c.lstar_ge_lambda4 && c.lambda3_monotone,
        "{c:?}"
    );
    assert!(r.lambda4.value.value > 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bloch_quotients_are_nonnegative(g1 in 0.0..2.0 * PI, g2 in 0.0..2.0 * PI, which in 0usize..4) {
        let grid = match which {
            0 => laminate(8, 0.5, Axis::X1).unwrap(),
            1 => checkerboard(8).unwrap(),
            2 => disks(8, &[[0.5, 0.5]], 0.25, true).unwrap(),
            _ => disks(8, &[[0.5, 0.5]], 0.25, false).unwrap(),
        };
        let v = bloch_min(&grid, &gutierrez(), [g1, g2], &opts()).unwrap().value;
        prop_assert!(v >= -1e-8, "{}", v);
    }
}
