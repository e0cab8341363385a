//! Run configuration: parsing, defaults and validation.

use std::path::{Path, PathBuf};

use ellipthom_core::eigen::LobpcgOptions;
use ellipthom_core::fem::{Material, SolverOptions};
use ellipthom_core::microstructure::{self as micro, Axis, PixelGrid, RandomDisks};
use ellipthom_core::spectra::{EigenMethod, SpectraOptions};
use ellipthom_core::tensor::{iso_tensor, make_gutierrez, LameParams};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub phases: PhasesConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Laminate,
    Checkerboard,
    Disks,
    RandomDisks,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub kind: GridKind,
    pub n: usize,
    pub theta: Option<f64>,
    #[serde(default = "default_axis")]
    pub axis: u32,
    #[serde(default)]
    pub seed: u64,
    pub radius: Option<f64>,
    pub centers: Option<Vec<[f64; 2]>>,
    #[serde(default = "default_true")]
    pub strong_inside: bool,
    #[serde(default)]
    pub min_gap: f64,
}

fn default_axis() -> u32 {
    1
}

fn default_true() -> bool {
    true
}

/// Lamé parameters; phase 1 is the strong phase (`chi = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhasesConfig {
    pub mu1: f64,
    pub lambda1: f64,
    pub mu2: f64,
    pub lambda2: f64,
}

impl Default for PhasesConfig {
    fn default() -> Self {
        Self { mu1: 1.0, lambda1: 1.0, mu2: 2.0, lambda2: -3.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenChoice {
    Lobpcg,
    Dense,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub angle_samples: usize,
    pub bisect_tol: f64,
    pub gamma_grid: usize,
    pub eigen: EigenChoice,
    /// Supercell sizes reported by `spectra`.
    pub supercells: Vec<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 20_000,
            angle_samples: 64,
            bisect_tol: 1e-6,
            gamma_grid: 8,
            eigen: EigenChoice::Lobpcg,
            supercells: vec![1, 2, 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<String>,
    /// Wall-clock seconds in sweep rows; off by default so that repeated
    /// runs are byte-identical.
    pub record_timings: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), formats: vec!["json".into(), "csv".into(), "svg".into()], record_timings: false }
    }
}

pub const FORMATS: [&str; 4] = ["json", "csv", "svg", "pbm"];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub kinds: Vec<SweepKind>,
    pub thetas: Vec<f64>,
    pub n: usize,
    pub loss_threshold: f64,
    /// Seed of `random_disks` points.
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            kinds: vec![SweepKind::Laminate, SweepKind::Checkerboard, SweepKind::DisksA, SweepKind::DisksB],
            thetas: vec![0.25, 0.5, 0.75],
            n: 16,
            loss_threshold: 1e-6,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
pub enum SweepKind {
    #[serde(rename = "laminate")]
    Laminate,
    #[serde(rename = "checkerboard")]
    Checkerboard,
    #[serde(rename = "disks_A")]
    DisksA,
    #[serde(rename = "disks_B")]
    DisksB,
    #[serde(rename = "random_disks")]
    RandomDisks,
}

impl SweepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Laminate => "laminate",
            Self::Checkerboard => "checkerboard",
            Self::DisksA => "disks_A",
            Self::DisksB => "disks_B",
            Self::RandomDisks => "random_disks",
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn finite_positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be a positive number, got {v}")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let p = &self.phases;
        for (name, v) in [("mu1", p.mu1), ("lambda1", p.lambda1), ("mu2", p.mu2), ("lambda2", p.lambda2)] {
            if !v.is_finite() {
                return Err(invalid(format!("phases.{name} must be finite")));
            }
        }
        for (i, l) in [self.phases.strong(), self.phases.weak()].iter().enumerate() {
            if !l.is_strictly_strongly_elliptic() {
                return Err(invalid(format!("phase {} is not strictly strongly elliptic (need mu > 0, lambda + 2 mu > 0)", i + 1)));
            }
        }
        let s = &self.solver;
        finite_positive("solver.tol", s.tol)?;
        finite_positive("solver.bisect_tol", s.bisect_tol)?;
        if s.max_iter == 0 {
            return Err(invalid("solver.max_iter must be positive"));
        }
        if s.angle_samples < 16 {
            return Err(invalid("solver.angle_samples must be at least 16"));
        }
        if s.gamma_grid < 4 {
            return Err(invalid("solver.gamma_grid must be at least 4"));
        }
        if s.supercells.contains(&0) {
            return Err(invalid("solver.supercells entries must be positive"));
        }
        for f in &self.output.formats {
            if !FORMATS.contains(&f.as_str()) {
                return Err(invalid(format!("unknown output format `{f}`")));
            }
        }
        if let Some(g) = &self.grid {
            g.validate()?;
        }
        if let Some(sw) = &self.sweep {
            if sw.kinds.is_empty() || sw.thetas.is_empty() {
                return Err(invalid("sweep lists must not be empty"));
            }
            if sw.n < 2 {
                return Err(invalid("sweep.n must be at least 2"));
            }
            if sw.thetas.iter().any(|t| !(t.is_finite() && *t > 0.0 && *t < 1.0)) {
                return Err(invalid("sweep.thetas must lie in (0, 1)"));
            }
            if !(sw.loss_threshold.is_finite() && sw.loss_threshold >= 0.0) {
                return Err(invalid("sweep.loss_threshold must be nonnegative"));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<&GridConfig, CliError> {
        self.grid.as_ref().ok_or_else(|| invalid("missing `grid` section"))
    }

    pub fn material(&self) -> Material {
        Material::new(iso_tensor(self.phases.strong()), iso_tensor(self.phases.weak()))
    }

    pub fn is_gutierrez(&self) -> bool {
        let p = &self.phases;
        make_gutierrez(p.mu1, p.lambda1, p.mu2, p.lambda2).is_ok()
    }

    pub fn spectra_options(&self) -> SpectraOptions {
        let s = &self.solver;
        SpectraOptions {
            eigen: LobpcgOptions::default(),
            method: match s.eigen {
                EigenChoice::Lobpcg => EigenMethod::Lobpcg,
                EigenChoice::Dense => EigenMethod::Dense,
            },
            corrector: self.corrector_options(),
            angle_samples: s.angle_samples,
            bisect_tol: s.bisect_tol,
            gamma_grid: s.gamma_grid,
            ..SpectraOptions::default()
        }
    }

    pub fn corrector_options(&self) -> SolverOptions {
        SolverOptions { tol: self.solver.tol, max_iter: self.solver.max_iter }
    }

    /// Applies a command-line seed to the grid and the sweep.
    pub fn override_seed(&mut self, seed: u64) {
        if let Some(g) = &mut self.grid {
            g.seed = seed;
        }
        self.sweep.get_or_insert_with(SweepConfig::default).seed = seed;
    }

    pub fn wants(&self, format: &str) -> bool {
        self.output.formats.iter().any(|f| f == format)
    }
}

impl PhasesConfig {
    pub fn strong(&self) -> LameParams {
        LameParams::new(self.lambda1, self.mu1)
    }

    pub fn weak(&self) -> LameParams {
        LameParams::new(self.lambda2, self.mu2)
    }
}

impl GridConfig {
    fn validate(&self) -> Result<(), CliError> {
        if self.n < 2 {
            return Err(invalid("grid.n must be at least 2"));
        }
        if let Some(t) = self.theta {
            if !(t.is_finite() && t > 0.0 && t < 1.0) {
                return Err(invalid("grid.theta must lie in (0, 1)"));
            }
        }
        match self.kind {
            GridKind::Laminate | GridKind::RandomDisks if self.theta.is_none() => {
                Err(invalid("grid.theta is required for this kind"))
            }
            GridKind::Disks if self.radius.is_none() => Err(invalid("grid.radius is required for disks")),
            _ => Ok(()),
        }
    }

    /// Builds the pixel grid; generator failures other than a stalled
    /// packing are configuration errors.
    pub fn build(&self) -> Result<PixelGrid, CliError> {
        let built = match self.kind {
            GridKind::Laminate => {
                let axis = Axis::from_index(self.axis).map_err(|e| invalid(e.to_string()))?;
                micro::laminate(self.n, self.theta.unwrap_or(0.5), axis)
            }
            GridKind::Checkerboard => micro::checkerboard(self.n),
            GridKind::Disks => {
                let centers = self.centers.clone().unwrap_or_else(|| vec![[0.5, 0.5]]);
                micro::disks(self.n, &centers, self.radius.unwrap_or(0.25), self.strong_inside)
            }
            GridKind::RandomDisks => micro::random_disks(&RandomDisks {
                n: self.n,
                seed: self.seed,
                target_theta: self.theta.unwrap_or(0.3),
                min_gap: self.min_gap,
                radius: self.radius,
            }),
        };
        built.map_err(|e| match e {
            ellipthom_core::Error::PackingStalled { .. } => CliError::Solver(e.to_string()),
            e => invalid(e.to_string()),
        })
    }
}
