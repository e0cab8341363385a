//! The subcommands. Each returns the paths it wrote.

use std::path::{Path, PathBuf};

use ellipthom_core::fem::{homogenized_tensor, CellProblem};
use ellipthom_core::laminate::{laminate_lstar, LaminateSpec};
use ellipthom_core::microstructure::{classify as classify_grid, Axis, PixelGrid};
use ellipthom_core::spectra::spectral_report;
use ellipthom_core::tensor::QuadraticForm4;
use serde_json::json;

use crate::config::{GridKind, RunConfig};
use crate::{canonical, gridio, report, svg, sweep, CliError};

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

fn write_grid(cfg: &RunConfig, grid: &PixelGrid, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let dir = &cfg.output.dir;
    if cfg.wants("json") {
        written.push(write(dir, "grid.json", &canonical::to_string(&gridio::to_json(grid)))?);
    }
    if cfg.wants("pbm") {
        written.push(write(dir, "grid.pbm", &gridio::to_pbm(grid))?);
    }
    Ok(())
}

pub fn homogenize(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let grid = cfg.grid()?.build()?;
    let h = homogenized_tensor(&CellProblem::new(grid.clone(), cfg.material(), 0.0), &cfg.corrector_options())?;
    let doc = report::homogenized(cfg, &grid, &h, cfg.solver.angle_samples);
    let mut written = vec![write(&cfg.output.dir, "homogenized.json", &canonical::to_string(&doc))?];
    write_grid(cfg, &grid, &mut written)?;
    Ok(written)
}

pub fn spectra(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let grid = cfg.grid()?.build()?;
    let r = spectral_report(&grid, &cfg.material(), &cfg.solver.supercells, &cfg.spectra_options())?;
    let doc = report::spectral(cfg, &grid, &r);
    let mut written = vec![write(&cfg.output.dir, "spectra.json", &canonical::to_string(&doc))?];
    write_grid(cfg, &grid, &mut written)?;
    Ok(written)
}

pub fn phase_diagram(cfg: &RunConfig, jobs: usize) -> Result<Vec<PathBuf>, CliError> {
    let rows = sweep::run(cfg, jobs)?;
    let sw = cfg.sweep.clone().unwrap_or_default();
    let dir = &cfg.output.dir;
    let mut written = Vec::new();
    if cfg.wants("csv") {
        written.push(write(dir, "phase_diagram.csv", &sweep::to_csv(&rows))?);
    }
    if cfg.wants("svg") {
        written.push(write(dir, "phase_diagram.svg", &svg::render(&rows))?);
    }
    if cfg.wants("json") {
        let doc = json!({
            "n": sw.n,
            "loss_threshold": sw.loss_threshold,
            "inputs": report::inputs(cfg),
            "rows": rows.iter().map(sweep::PhaseDiagramRow::to_json).collect::<Vec<_>>(),
        });
        written.push(write(dir, "phase_diagram.json", &canonical::to_string(&doc))?);
    }
    Ok(written)
}

/// The class name of a grid file, or of the configured grid.
pub fn classify(grid_file: Option<&Path>, cfg: Option<&RunConfig>) -> Result<String, CliError> {
    let grid = match (grid_file, cfg) {
        (Some(path), _) => gridio::read(path)?,
        (None, Some(cfg)) => cfg.grid()?.build()?,
        (None, None) => return Err(CliError::Config("classify needs --grid or --config".into())),
    };
    Ok(classify_grid(&grid).as_str().to_string())
}

/// Largest entrywise deviation relative to `max(|b_ij|, max |b|)`.
pub fn relative_deviation(a: &QuadraticForm4, b: &QuadraticForm4) -> f64 {
    let scale = b.max_abs();
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let (x, y) = (a.coeffs()[i][j], b.coeffs()[i][j]);
            let denom = y.abs().max(scale);
            if denom > 0.0 {
                worst = worst.max((x - y).abs() / denom);
            } else {
                worst = worst.max((x - y).abs());
            }
        }
    }
    worst
}

/// Closed-form laminate tensor against the finite-element one.
pub fn oracle(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let g = cfg.grid()?;
    if g.kind != GridKind::Laminate {
        return Err(CliError::Config("oracle needs a laminate grid".into()));
    }
    let grid = g.build()?;
    let axis = Axis::from_index(g.axis).map_err(|e| CliError::Config(e.to_string()))?;
    let theta = g.theta.expect("validated");
    let spec = LaminateSpec::new(theta, axis, cfg.material()).map_err(|e| CliError::Config(e.to_string()))?;
    let exact = laminate_lstar(&spec)?;
    let fem = homogenized_tensor(&CellProblem::new(grid.clone(), cfg.material(), 0.0), &cfg.corrector_options())?.lstar;
    let doc = json!({
        "grid": report::grid_summary(&grid),
        "axis": g.axis,
        "closed_form": report::tensor(&exact),
        "fem": report::tensor(&fem),
        "max_relative_deviation": relative_deviation(&fem, &exact),
        "inputs": report::inputs(cfg),
    });
    Ok(vec![write(&cfg.output.dir, "oracle.json", &canonical::to_string(&doc))?])
}
