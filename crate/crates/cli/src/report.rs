//! JSON forms of the solver results.

use ellipthom_core::fem::HomogenizedResult;
use ellipthom_core::microstructure::{classify, volume_fraction, PixelGrid};
use ellipthom_core::spectra::{SpectralReport, SpectralValue};
use ellipthom_core::tensor::{sym_min, QuadraticForm4, RankOneMin};
use serde_json::{json, Map, Value};

use crate::config::RunConfig;

pub fn tensor(l: &QuadraticForm4) -> Value {
    json!(l.coeffs().iter().map(|row| row.to_vec()).collect::<Vec<_>>())
}

pub fn rank_one(r: &RankOneMin) -> Value {
    json!({ "value": r.value, "a": r.a, "b": r.b, "phi_a": r.phi_a, "phi_b": r.phi_b })
}

pub fn spectral_value(v: &SpectralValue) -> Value {
    json!({ "value": v.value, "tolerance": v.tolerance, "method": v.method, "iterations": v.iterations })
}

fn extend(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

pub fn grid_summary(grid: &PixelGrid) -> Value {
    json!({ "n": grid.n(), "theta": volume_fraction(grid), "class": classify(grid).as_str() })
}

pub fn inputs(cfg: &RunConfig) -> Value {
    let p = &cfg.phases;
    json!({
        "phases": { "mu1": p.mu1, "lambda1": p.lambda1, "mu2": p.mu2, "lambda2": p.lambda2 },
        "gutierrez": cfg.is_gutierrez(),
    })
}

pub fn homogenized(cfg: &RunConfig, grid: &PixelGrid, h: &HomogenizedResult, angle_samples: usize) -> Value {
    let r1 = ellipthom_core::tensor::rank_one_min_with(&h.lstar, angle_samples);
    let energies: Map<String, Value> = h.per_direction_energy.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    extend(
        inputs(cfg),
        json!({
            "grid": grid_summary(grid),
            "lstar": tensor(&h.lstar),
            "per_direction_energy": energies,
            "rank_one_min": rank_one(&r1),
            "symmetric_min": sym_min(&h.lstar),
            "solver": {
                "iterations": h.iterations,
                "max_residual": h.max_residual,
                "min_curvature": h.min_curvature,
            },
        }),
    )
}

pub fn spectral(cfg: &RunConfig, grid: &PixelGrid, r: &SpectralReport) -> Value {
    let lambda3: Map<String, Value> = r.lambda3.iter().map(|(k, v)| (k.to_string(), spectral_value(v))).collect();
    let c = &r.checks;
    extend(
        inputs(cfg),
        json!({
            "grid": grid_summary(grid),
            "lambda6": spectral_value(&r.lambda6),
            "lambda4": extend(spectral_value(&r.lambda4.value), json!({
                "argmin": rank_one(&r.lambda4.argmin),
                "bracket": r.lambda4.bracket,
                "capped": r.lambda4.capped,
            })),
            "lambda5": extend(spectral_value(&r.lambda5.value), json!({
                "residual": r.lambda5.residual,
                "direction": r.lambda5.direction,
            })),
            "lambda1": extend(spectral_value(&r.lambda1.value), json!({ "gamma": r.lambda1.gamma })),
            "lambda3": lambda3,
            "lstar": tensor(&r.lstar),
            "lstar_rank_one_min": rank_one(&r.lstar_rank_one_min),
            "checks": {
                "lambda6_ge_lambda4": c.lambda6_ge_lambda4,
                "lambda4_ge_lambda1": c.lambda4_ge_lambda1,
                "lambda1_le_lambda6": c.lambda1_le_lambda6,
                "lambda5_ge_lambda1": c.lambda5_ge_lambda1,
                "lstar_ge_lambda4": c.lstar_ge_lambda4,
                "lambda3_monotone": c.lambda3_monotone,
            },
            "seed": r.seed,
        }),
    )
}
