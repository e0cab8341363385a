//! Phase-diagram sweeps over microstructure kinds and volume fractions.

use std::time::Instant;

use ellipthom_core::fem::{homogenized_tensor, CellProblem};
use ellipthom_core::microstructure::{self as micro, classify, Axis, MicroClass, PixelGrid, RandomDisks};
use ellipthom_core::spectra::{lambda4, lambda6};
use ellipthom_core::tensor::rank_one_min_with;
use ellipthom_core::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::canonical::format_g17;
use crate::config::{RunConfig, SweepConfig, SweepKind};
use crate::CliError;

pub const CSV_HEADER: &str = "kind,theta,n,lambda6,lambda4,lambda_star,loss_flag,seconds,status";

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagramRow {
    pub kind: SweepKind,
    pub theta: f64,
    pub n: usize,
    pub lambda6: f64,
    pub lambda4: f64,
    /// Rank-one minimum of the homogenized tensor.
    pub lambda_star: f64,
    pub loss_flag: bool,
    pub seconds: f64,
    /// Class of the generated grid, when generation succeeded.
    pub class: Option<MicroClass>,
    /// `None` on success, else the failure message.
    pub error: Option<String>,
}

impl PhaseDiagramRow {
    pub fn status(&self) -> &str {
        self.error.as_deref().map_or("ok", |_| "error")
    }

    pub fn csv_line(&self) -> String {
        let num = |x: f64| if self.error.is_some() { String::new() } else { format_g17(x) };
        let status = match &self.error {
            None => "ok".to_string(),
            Some(m) => csv_field(&format!("error: {m}")),
        };
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.kind.as_str(),
            format_g17(self.theta),
            self.n,
            num(self.lambda6),
            num(self.lambda4),
            num(self.lambda_star),
            if self.error.is_some() { "" } else if self.loss_flag { "true" } else { "false" },
            format_g17(self.seconds),
            status
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.as_str(),
            "theta": self.theta,
            "n": self.n,
            "lambda6": self.lambda6,
            "lambda4": self.lambda4,
            "lambda_star": self.lambda_star,
            "loss_flag": self.loss_flag,
            "seconds": self.seconds,
            "class": self.class.map(|c| c.as_str()),
            "status": self.status(),
            "error": self.error,
        })
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn to_csv(rows: &[PhaseDiagramRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_line());
        s.push('\n');
    }
    s
}

/// The grid of a sweep point, or `None` when the kind cannot realize this
/// volume fraction at this resolution.
pub fn sweep_grid(kind: SweepKind, theta: f64, n: usize, seed: u64) -> Option<Result<PixelGrid, Error>> {
    match kind {
        SweepKind::Laminate => match micro::laminate(n, theta, Axis::X1) {
            Err(Error::NonIntegerBandWidth { .. }) => None,
            other => Some(other),
        },
        SweepKind::Checkerboard => (theta == 0.5).then(|| micro::checkerboard(n)),
        // one disk per cell, of the phase that must stay disconnected
        SweepKind::DisksA | SweepKind::DisksB => {
            let (inclusion, strong_inside, class) = match kind {
                SweepKind::DisksA => (theta, true, MicroClass::A),
                _ => (1.0 - theta, false, MicroClass::B),
            };
            let radius = (inclusion / core::f64::consts::PI).sqrt();
            match micro::disks(n, &[[0.5, 0.5]], radius, strong_inside) {
                Ok(g) if classify(&g) == class => Some(Ok(g)),
                Ok(_) => None,
                Err(e) => Some(Err(e)),
            }
        }
        SweepKind::RandomDisks => Some(micro::random_disks(&RandomDisks::new(n, seed, theta, 0.0))),
    }
}

fn evaluate(cfg: &RunConfig, sweep: &SweepConfig, kind: SweepKind, theta: f64, grid: Result<PixelGrid, Error>) -> PhaseDiagramRow {
    let start = Instant::now();
    let mut row = PhaseDiagramRow {
        kind,
        theta,
        n: sweep.n,
        lambda6: f64::NAN,
        lambda4: f64::NAN,
        lambda_star: f64::NAN,
        loss_flag: false,
        seconds: 0.0,
        class: None,
        error: None,
    };
    let outcome = grid.and_then(|grid| {
        row.class = Some(classify(&grid));
        let material = cfg.material();
        let opts = cfg.spectra_options();
        let lstar = homogenized_tensor(&CellProblem::new(grid.clone(), material, 0.0), &opts.corrector)?.lstar;
        let lambda_star = rank_one_min_with(&lstar, opts.angle_samples).value;
        let l6 = lambda6(&grid, &material, &opts)?.value;
        let l4 = lambda4(&grid, &material, l6, &opts)?.value.value;
        Ok((l6, l4, lambda_star))
    });
    match outcome {
        Ok((l6, l4, ls)) => {
            row.lambda6 = l6;
            row.lambda4 = l4;
            row.lambda_star = ls;
            row.loss_flag = ls <= sweep.loss_threshold;
        }
        Err(e) => {
            log::error!("{} theta {theta}: {e}", kind.as_str());
            row.error = Some(e.to_string());
        }
    }
    if cfg.output.record_timings {
        row.seconds = start.elapsed().as_secs_f64();
    }
    log::info!("{} theta {theta}: {}", kind.as_str(), row.status());
    row
}

/// Runs every representable `(kind, theta)` point, at most `jobs` at a time.
/// Rows come back in sweep order whatever the thread count.
pub fn run(cfg: &RunConfig, jobs: usize) -> Result<Vec<PhaseDiagramRow>, CliError> {
    let sweep = cfg.sweep.clone().unwrap_or_default();
    let mut points = Vec::new();
    for &kind in &sweep.kinds {
        for &theta in &sweep.thetas {
            match sweep_grid(kind, theta, sweep.n, sweep.seed) {
                Some(grid) => points.push((kind, theta, grid)),
                None => log::info!("{} cannot realize theta {theta} at n = {}", kind.as_str(), sweep.n),
            }
        }
    }
    if points.is_empty() {
        return Err(CliError::Config("no sweep point is representable".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Solver(e.to_string()))?;
    Ok(pool.install(|| points.into_par_iter().map(|(k, t, g)| evaluate(cfg, &sweep, k, t, g)).collect()))
}
