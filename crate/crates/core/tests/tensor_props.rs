use ellipthom_core::tensor::{
    iso_tensor, lower_bound_residual, make_gutierrez, rank_one_min, underline_tensor, GutierrezPair, LameParams,
    Matrix2, Phase, QuadraticForm4,
};
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = Matrix2> {
    prop::array::uniform4(-10.0f64..10.0).prop_map(Matrix2::from_vec)
}

/// Gutiérrez pairs `0 < mu1 = -(lambda2 + mu2) < mu2`, `lambda1 + mu1 > 0`.
fn pair() -> impl Strategy<Value = GutierrezPair> {
    (0.1f64..5.0, 0.05f64..5.0, 0.0f64..5.0).prop_map(|(mu1, gap, bulk)| {
        let mu2 = mu1 + gap;
        make_gutierrez(mu1, bulk - mu1 + 1e-3, mu2, -(mu1 + mu2)).unwrap()
    })
}

fn close(a: f64, b: f64, rel: f64, scale: f64) -> bool {
    (a - b).abs() <= rel * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn strong_decomposition(p in pair(), a in matrix()) {
        let s = p.strong();
        let e = a.entries;
        let q = iso_tensor(s).eval(&a);
        let rest = (s.lambda + 2.0 * s.mu) * (e[0][0] + e[1][1]).powi(2);
        let under = underline_tensor(s.mu).unwrap().eval(&a);
        prop_assert!(close(q, under + rest, 1e-12, q.abs() + a.norm_squared()));
    }

    #[test]
    fn weak_decomposition(p in pair(), a in matrix()) {
        let (s, w) = (p.strong(), p.weak());
        let e = a.entries;
        let q = iso_tensor(w).eval(&a);
        let rest = (w.mu - s.mu) * ((e[0][0] - e[1][1]).powi(2) + (e[0][1] + e[1][0]).powi(2));
        let under = underline_tensor(s.mu).unwrap().eval(&a);
        prop_assert!(close(q, under + rest, 1e-12, q.abs() + a.norm_squared() * w.mu));
    }

    #[test]
    fn lower_bound_holds(p in pair(), a in matrix()) {
        for phase in [Phase::Strong, Phase::Weak] {
            let r = lower_bound_residual(&p, &a, phase);
            let mag = iso_tensor(p.weak()).max_abs().max(iso_tensor(p.strong()).max_abs());
            prop_assert!(r >= -1e-12 * a.norm_squared() * mag.max(1.0), "{phase:?}: {r}");
        }
    }

    #[test]
    fn determinant_identity(mu1 in 0.01f64..10.0, a in matrix()) {
        let e = a.entries;
        let lhs = -4.0 * mu1 * e[0][0] * e[1][1] + mu1 * (e[0][1] + e[1][0]).powi(2);
        let rhs = -4.0 * mu1 * a.det() + mu1 * (e[0][1] - e[1][0]).powi(2);
        prop_assert!(close(lhs, rhs, 1e-12, mu1 * a.norm_squared()));
        prop_assert!(close(underline_tensor(mu1).unwrap().eval(&a), lhs, 1e-12, mu1 * a.norm_squared()));
    }

    #[test]
    fn rank_one_min_isotropic(lambda in -5.0f64..5.0, mu in 0.01f64..5.0) {
        let got = rank_one_min(&iso_tensor(LameParams::new(lambda, mu))).value;
        prop_assert!((got - mu.min(lambda + 2.0 * mu)).abs() <= 1e-8, "{got}");
    }

    #[test]
    fn rank_one_min_bounded_by_unit_dyad(c in prop::array::uniform16(-3.0f64..3.0)) {
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = c[4 * i + j];
            }
        }
        let l = QuadraticForm4::symmetrized(m);
        let r = rank_one_min(&l);
        prop_assert!(r.value <= l.eval(&Matrix2::unit(0, 0)) + 1e-12);
        prop_assert!(r.value <= l.eval(&Matrix2::unit(1, 1)) + 1e-12);
        let at = l.eval(&Matrix2::outer(r.a, r.b));
        prop_assert!((at - r.value).abs() <= 1e-9 * (1.0 + l.max_abs()));
    }

    #[test]
    fn rank_one_min_scales(c in prop::array::uniform16(-3.0f64..3.0), s in 0.01f64..100.0) {
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = c[4 * i + j];
            }
        }
        let l = QuadraticForm4::symmetrized(m);
        let base = rank_one_min(&l);
        let scaled = rank_one_min(&l.scale(s));
        prop_assert!((scaled.value - s * base.value).abs() <= 1e-9 * s * (1.0 + l.max_abs()));
    }
}

#[test]
fn lower_bound_hundred_thousand_samples() {
    use rand_core::{RngCore, SeedableRng};
    let mut rng = rand_xoshiro::SplitMix64::seed_from_u64(7);
    let mut uniform = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
    let p = make_gutierrez(1.0, 1.0, 2.0, -3.0).unwrap();
    let mut worst = f64::INFINITY;
    for _ in 0..100_000 {
        let a = Matrix2::new(uniform(), uniform(), uniform(), uniform());
        for phase in [Phase::Strong, Phase::Weak] {
            worst = worst.min(lower_bound_residual(&p, &a, phase) / a.norm_squared());
        }
    }
    assert!(worst >= -1e-12, "worst normalized residual {worst}");
}
