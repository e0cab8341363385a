//! Discrete coercivity constants of a periodic two-phase cell.
//!
//! Every value here is computed in the conforming Q1 space and is therefore
//! an upper bound for the corresponding continuum constant.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::eigen::{lobpcg_min, lobpcg_min_from, LobpcgOptions, Pencil};
use crate::error::{Error, Result};
use crate::fem::dense::{dense_min_eigenvalue, DENSE_MAX_N};
use crate::fem::{homogenized_tensor, project_mean_zero, CellProblem, LaplaceInverse, Material, SolverOptions, Twist};
use crate::microstructure::PixelGrid;
use crate::scalar::{rem_euclid, Scalar};
use crate::tensor::{rank_one_min_with, QuadraticForm4, RankOneMin};

/// Which eigen solver backs the Rayleigh-quotient minima.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    Lobpcg,
    /// Dense generalized eigendecomposition; cells up to `n = 16`.
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectraOptions {
    pub eigen: LobpcgOptions,
    pub method: EigenMethod,
    pub corrector: SolverOptions,
    /// Angle samples for rank-one minimization.
    pub angle_samples: usize,
    pub bisect_tol: f64,
    /// Coarse momentum grid is `gamma_grid x gamma_grid`.
    pub gamma_grid: usize,
    /// Bracket width at which the local momentum refinement stops.
    pub gamma_tol: f64,
    /// Exponents `j` of the small-momentum sequence `2 pi 2^-j`.
    pub gamma_exponents: (u32, u32),
    pub gamma_directions: usize,
    /// Parabolic refinement steps in the angle of the small-momentum ray.
    pub direction_refinements: usize,
}

impl Default for SpectraOptions {
    fn default() -> Self {
        Self {
            eigen: LobpcgOptions::default(),
            method: EigenMethod::Lobpcg,
            corrector: SolverOptions::default(),
            angle_samples: 64,
            bisect_tol: 1e-6,
            gamma_grid: 8,
            gamma_tol: 1e-3,
            gamma_exponents: (1, 6),
            gamma_directions: 8,
            direction_refinements: 3,
        }
    }
}

/// A computed constant with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralValue {
    pub value: f64,
    pub tolerance: f64,
    pub method: &'static str,
    pub iterations: usize,
}

/// `(K, G)` of a cell problem at a fixed quasi-momentum.
pub struct CellPencil<'a, S> {
    problem: &'a CellProblem,
    twist: Twist<S>,
    precond: LaplaceInverse,
}

impl<'a, S: Scalar> CellPencil<'a, S> {
    pub fn new(problem: &'a CellProblem, twist: Twist<S>) -> Self {
        let precond = LaplaceInverse::new(problem.n(), twist.gamma);
        Self { problem, twist, precond }
    }
}

impl<S: Scalar> Pencil<S> for CellPencil<'_, S> {
    fn dim(&self) -> usize {
        self.problem.dofs()
    }

    fn apply(&self, x: &[S], kx: &mut [S], gx: &mut [S]) {
        kx.fill(S::zero());
        gx.fill(S::zero());
        self.problem.apply_into(&self.twist, x, kx, Some(gx));
    }

    fn precondition(&self, r: &[S], out: &mut [S]) {
        self.precond.apply(r, out);
    }

    fn project(&self, x: &mut [S]) {
        if self.twist.is_periodic() {
            project_mean_zero(x);
        }
    }
}

fn min_eigen<S: Scalar>(problem: &CellProblem, twist: Twist<S>, opts: &SpectraOptions) -> Result<SpectralValue> {
    match opts.method {
        EigenMethod::Dense if problem.n() <= DENSE_MAX_N => Ok(SpectralValue {
            value: dense_min_eigenvalue(problem, &twist)?,
            tolerance: 0.0,
            method: "dense generalized eigendecomposition",
            iterations: 0,
        }),
        _ => {
            let pair = lobpcg_min(&CellPencil::new(problem, twist), &opts.eigen)?;
            Ok(SpectralValue {
                value: pair.value,
                tolerance: pair.residual.max(opts.eigen.tol),
                method: "LOBPCG, block 4, Laplacian preconditioner",
                iterations: pair.iterations,
            })
        }
    }
}

/// Smallest Rayleigh quotient `sum grad v.L grad v / sum |grad v|^2` over
/// mean-zero periodic fields.
pub fn lambda6(grid: &PixelGrid, material: &Material, opts: &SpectraOptions) -> Result<SpectralValue> {
    let problem = CellProblem::new(grid.clone(), *material, 0.0);
    min_eigen::<f64>(&problem, Twist::periodic(), opts)
}

/// `gamma` reduced to `[0, 2 pi)` componentwise.
pub fn reduce_momentum(gamma: [f64; 2]) -> [f64; 2] {
    gamma.map(|g| {
        let r = rem_euclid(g, 2.0 * PI);
        if r >= 2.0 * PI - 1e-14 {
            0.0
        } else {
            r
        }
    })
}

/// Smallest Rayleigh quotient over quasi-periodic fields with momentum
/// `gamma`; at `gamma = 0` this is `lambda6`.
pub fn bloch_min(grid: &PixelGrid, material: &Material, gamma: [f64; 2], opts: &SpectraOptions) -> Result<SpectralValue> {
    let gamma = reduce_momentum(gamma);
    if gamma == [0.0, 0.0] {
        return lambda6(grid, material, opts);
    }
    let problem = CellProblem::new(grid.clone(), *material, 0.0);
    let twist = Twist::<Complex64>::bloch(gamma).expect("complex phases");
    min_eigen(&problem, twist, opts)
}

/// Bloch minima along a path of nearby momenta. Each solve starts from the
/// previous Ritz block multiplied by the nodal phase `exp(i delta.x)`, which
/// carries momentum `gamma` to `gamma + delta`.
struct BlochSweep<'a> {
    problem: CellProblem,
    opts: &'a SpectraOptions,
    warm: Option<([f64; 2], Vec<Vec<Complex64>>)>,
    iterations: usize,
}

impl<'a> BlochSweep<'a> {
    fn new(grid: &PixelGrid, material: &Material, opts: &'a SpectraOptions) -> Self {
        Self { problem: CellProblem::new(grid.clone(), *material, 0.0), opts, warm: None, iterations: 0 }
    }

    fn eval(&mut self, gamma: [f64; 2]) -> Result<f64> {
        let gamma = reduce_momentum(gamma);
        let dense = self.opts.method == EigenMethod::Dense && self.problem.n() <= DENSE_MAX_N;
        if gamma == [0.0, 0.0] || dense {
            let v = if gamma == [0.0, 0.0] {
                min_eigen::<f64>(&self.problem, Twist::periodic(), self.opts)?
            } else {
                min_eigen(&self.problem, Twist::<Complex64>::bloch(gamma).expect("complex phases"), self.opts)?
            };
            self.iterations += v.iterations;
            return Ok(v.value);
        }
        let start = match self.warm.take() {
            Some((from, block)) => shift_momentum(self.problem.n(), block, from, gamma),
            None => Vec::new(),
        };
        let twist = Twist::<Complex64>::bloch(gamma).expect("complex phases");
        let pair = lobpcg_min_from(&CellPencil::new(&self.problem, twist), &self.opts.eigen, start)?;
        self.iterations += pair.iterations;
        self.warm = Some((gamma, pair.block));
        Ok(pair.value)
    }
}

fn shift_momentum(n: usize, mut block: Vec<Vec<Complex64>>, from: [f64; 2], to: [f64; 2]) -> Vec<Vec<Complex64>> {
    // smallest representative of to - from, so the factor varies slowly
    let delta = [0, 1].map(|i| {
        let d = rem_euclid(to[i] - from[i], 2.0 * PI);
        if d > PI {
            d - 2.0 * PI
        } else {
            d
        }
    });
    let h = 1.0 / n as f64;
    for v in &mut block {
        for iy in 0..n {
            for ix in 0..n {
                let f = Complex64::from_polar(1.0, delta[0] * ix as f64 * h + delta[1] * iy as f64 * h);
                let node = iy * n + ix;
                v[2 * node] *= f;
                v[2 * node + 1] *= f;
            }
        }
    }
    block
}

/// `lambda6` of the `k x k` tiled cell.
pub fn lambda3_supercell(grid: &PixelGrid, material: &Material, k: usize, opts: &SpectraOptions) -> Result<SpectralValue> {
    if k == 0 {
        return Err(Error::InvalidParameter { name: "k", reason: "must be at least 1" });
    }
    let mut v = lambda6(&grid.tiled(k), material, opts)?;
    v.method = "LOBPCG on the tiled cell";
    Ok(v)
}

/// Minimum of `bloch_min` over the `k^2` momenta `2 pi m / k`: by Bloch
/// decomposition this equals `lambda3_supercell(k)`.
pub fn supercell_bloch_min(grid: &PixelGrid, material: &Material, k: usize, opts: &SpectraOptions) -> Result<f64> {
    let mut best = f64::INFINITY;
    for (m1, m2) in supercell_momenta(k) {
        let gamma = [2.0 * PI * m1 as f64 / k as f64, 2.0 * PI * m2 as f64 / k as f64];
        best = best.min(bloch_min(grid, material, gamma, opts)?.value);
    }
    Ok(best)
}

fn supercell_momenta(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).flat_map(move |a| (0..k).map(move |b| (a, b)))
}

/// Small-momentum limit of the Bloch minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct Lambda5 {
    pub value: SpectralValue,
    /// Difference of the last two extrapolants along the minimizing direction.
    pub residual: f64,
    /// Direction angle of the minimizing momentum ray.
    pub direction: f64,
}

/// For each ray direction, `bloch_min` along `|gamma| = 2 pi 2^-j` is
/// extrapolated to `gamma -> 0` by Richardson extrapolation in `|gamma|^2`.
/// The best of the equally spaced directions is then refined by parabolic
/// steps in the angle, and the minimum over all rays is reported.
pub fn lambda5(grid: &PixelGrid, material: &Material, opts: &SpectraOptions) -> Result<Lambda5> {
    let (j0, j1) = opts.gamma_exponents;
    if j1 < j0 + 2 {
        return Err(Error::InvalidParameter { name: "gamma_exponents", reason: "need at least three magnitudes" });
    }
    let nd = opts.gamma_directions;
    if nd < 1 {
        return Err(Error::InvalidParameter { name: "gamma_directions", reason: "must be positive" });
    }
    let mut iterations = 0;
    let mut ray = |phi: f64| -> Result<(f64, f64)> {
        let mut sweep = BlochSweep::new(grid, material, opts);
        let mut values = Vec::new();
        for j in j0..=j1 {
            let s = 2.0 * PI * 0.5f64.powi(j as i32);
            values.push(sweep.eval([s * phi.cos(), s * phi.sin()])?);
        }
        iterations += sweep.iterations;
        // order-2 Richardson with magnitude ratio 2: (4 f(s/2) - f(s)) / 3
        let extrap: Vec<f64> = values.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect();
        let last = extrap[extrap.len() - 1];
        Ok((last, (last - extrap[extrap.len() - 2]).abs()))
    };
    let step = PI / nd as f64;
    let mut scan = Vec::with_capacity(nd);
    for d in 0..nd {
        scan.push(ray(step * d as f64)?);
    }
    let d = (0..nd).min_by(|&a, &b| scan[a].0.total_cmp(&scan[b].0)).expect("at least one direction");
    let (mut best_phi, mut best) = (step * d as f64, scan[d]);
    // Bloch minima are even in gamma, so the angle is periodic with period pi.
    if nd >= 3 {
        let mut pts = [
            (best_phi - step, scan[(d + nd - 1) % nd].0),
            (best_phi, scan[d].0),
            (best_phi + step, scan[(d + 1) % nd].0),
        ];
        for _ in 0..opts.direction_refinements {
            let [(a, fa), (b, fb), (c, fc)] = pts;
            let num = (b - a).powi(2) * (fb - fc) - (b - c).powi(2) * (fb - fa);
            let den = (b - a) * (fb - fc) - (b - c) * (fb - fa);
            if den.abs() <= f64::EPSILON * num.abs() {
                break;
            }
            let x = (b - 0.5 * num / den).clamp(a, c);
            if (x - b).abs() < 1e-6 * step || x == a || x == c {
                break;
            }
            let (fx, res) = ray(x)?;
            if fx < best.0 {
                best_phi = x;
                best = (fx, res);
            }
            pts = match (x < b, fx < fb) {
                (true, true) => [(a, fa), (x, fx), (b, fb)],
                (true, false) => [(x, fx), (b, fb), (c, fc)],
                (false, true) => [(b, fb), (x, fx), (c, fc)],
                (false, false) => [(a, fa), (b, fb), (x, fx)],
            };
        }
    }
    Ok(Lambda5 {
        value: SpectralValue { value: best.0, tolerance: best.1, method: "Richardson extrapolation in |gamma|^2", iterations },
        residual: best.1,
        direction: rem_euclid(best_phi, PI),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lambda1 {
    pub value: SpectralValue,
    /// Minimizing momentum; `None` when the minimum is the small-momentum
    /// limit.
    pub gamma: Option<[f64; 2]>,
}

/// Minimum of `bloch_min` over momenta: a coarse uniform grid (together with
/// the supercell momenta for `k = 2, 3`), refined locally around its best
/// point by coordinate-wise parabolic steps (kept outside the smallest
/// momentum used by `lambda5`), and compared against the
/// small-momentum limit `small_gamma_limit` when one is supplied (the
/// infimum may only be approached as `gamma -> 0`).
pub fn lambda1(
    grid: &PixelGrid,
    material: &Material,
    small_gamma_limit: Option<f64>,
    opts: &SpectraOptions,
) -> Result<Lambda1> {
    let g = opts.gamma_grid;
    if g < 4 {
        return Err(Error::InvalidParameter { name: "gamma_grid", reason: "must be at least 4" });
    }
    let mut sweep = BlochSweep::new(grid, material, opts);
    // Closer to zero momentum the twisted constant mode makes the pencil
    // ill-conditioned; that region is covered by the small-momentum limit.
    let r_min = 2.0 * PI * 0.5f64.powi(opts.gamma_exponents.1 as i32);
    let mut eval = |gamma: [f64; 2]| -> Result<f64> {
        let red = reduce_momentum(gamma);
        let dist = red.map(|g| g.min(2.0 * PI - g));
        if red != [0.0, 0.0] && dist[0].hypot(dist[1]) < r_min {
            return Ok(f64::INFINITY);
        }
        sweep.eval(gamma)
    };
    let mut samples: Vec<[f64; 2]> = Vec::new();
    for a in 0..g {
        for b in 0..g {
            samples.push([2.0 * PI * a as f64 / g as f64, 2.0 * PI * b as f64 / g as f64]);
        }
    }
    for k in [2usize, 3] {
        for (a, b) in supercell_momenta(k) {
            let gamma = [2.0 * PI * a as f64 / k as f64, 2.0 * PI * b as f64 / k as f64];
            if !samples.iter().any(|s| (s[0] - gamma[0]).abs() < 1e-12 && (s[1] - gamma[1]).abs() < 1e-12) {
                samples.push(gamma);
            }
        }
    }
    let mut best_gamma = [0.0, 0.0];
    let mut best = f64::INFINITY;
    let mut best_nonzero: Option<([f64; 2], f64)> = None;
    for gamma in samples {
        let v = eval(gamma)?;
        if v < best {
            best = v;
            best_gamma = gamma;
        }
        if gamma != [0.0, 0.0] && best_nonzero.is_none_or(|(_, b)| v < b) {
            best_nonzero = Some((gamma, v));
        }
    }
    // local refinement around the best nonzero momentum
    if let Some((mut center, mut fc)) = best_nonzero {
        let mut h = 2.0 * PI / g as f64;
        while h > opts.gamma_tol {
            for axis in 0..2 {
                let mut lo = center;
                lo[axis] -= h;
                let mut hi = center;
                hi[axis] += h;
                let (fl, fh) = (eval(lo)?, eval(hi)?);
                let curvature = fl + fh - 2.0 * fc;
                let mut step = if curvature.is_finite() && curvature > 0.0 { 0.5 * h * (fl - fh) / curvature } else if fl < fh { -h } else { h };
                step = step.clamp(-h, h);
                let mut cand = center;
                cand[axis] += step;
                let fcand = if step == -h {
                    fl
                } else if step == h {
                    fh
                } else {
                    eval(cand)?
                };
                for (p, f) in [(cand, fcand), (lo, fl), (hi, fh)] {
                    if f < fc {
                        center = p;
                        fc = f;
                    }
                }
            }
            h *= 0.5;
        }
        if fc < best {
            best = fc;
            best_gamma = reduce_momentum(center);
        }
    }
    let mut gamma = Some(best_gamma);
    if let Some(limit) = small_gamma_limit {
        if limit < best {
            best = limit;
            gamma = None;
        }
    }
    Ok(Lambda1 {
        value: SpectralValue {
            value: best,
            tolerance: opts.eigen.tol,
            method: "momentum grid scan, parabolic refinement, small-momentum limit",
            iterations: sweep.iterations,
        },
        gamma,
    })
}

/// Shear-coercivity constant with its minimizing rank-one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Lambda4 {
    pub value: SpectralValue,
    pub argmin: RankOneMin,
    /// Final bisection bracket `[lo, hi]`.
    pub bracket: [f64; 2],
    /// Whether the rank-one minimum stayed nonnegative up to the cap below
    /// `lambda6`, so that `lambda4 = lambda6`.
    pub capped: bool,
    /// Number of homogenized-tensor evaluations.
    pub evaluations: usize,
}

/// Cap on the bisection: this far (relative) below `lambda6`.
const LAMBDA6_MARGIN: f64 = 1e-6;

/// `lambda4 = sup { t < lambda6 : rank_one_min(L*(t)) >= 0 }`, where `L*(t)`
/// is the homogenized tensor of `L - t Id4`.
///
/// This is the minimum over unit rank-one `M` of the root `t*(M)` of
/// `g(M, t) = inf_v sum (M + grad v).(L - t Id4)(M + grad v)`, since
/// `g(M, t) = M.L*(t) M`. The function `h(t) = rank_one_min(L*(t))` is
/// decreasing and concave, so its root is bracketed and bisected, then
/// polished by Illinois steps.
pub fn lambda4(grid: &PixelGrid, material: &Material, lambda6: f64, opts: &SpectraOptions) -> Result<Lambda4> {
    if opts.angle_samples < 16 {
        return Err(Error::InvalidParameter { name: "angle_samples", reason: "must be at least 16" });
    }
    let base = CellProblem::new(grid.clone(), *material, 0.0);
    let mut evaluations = 0;
    let mut h = |t: f64| -> Result<Option<(f64, QuadraticForm4)>> {
        evaluations += 1;
        match homogenized_tensor(&base.with_shift(t), &opts.corrector) {
            Ok(res) => Ok(Some((rank_one_min_with(&res.lstar, opts.angle_samples).value, res.lstar))),
            Err(Error::DegenerateCell { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let cap = lambda6 - LAMBDA6_MARGIN * lambda6.abs().max(1.0);
    let finish = |t: f64, lstar: &QuadraticForm4, bracket: [f64; 2], capped: bool, evaluations: usize| Lambda4 {
        value: SpectralValue {
            value: t,
            tolerance: if capped { LAMBDA6_MARGIN * lambda6.abs().max(1.0) } else { opts.bisect_tol },
            method: "bisection on the shift of the homogenized rank-one minimum",
            iterations: evaluations,
        },
        argmin: rank_one_min_with(lstar, opts.angle_samples),
        bracket,
        capped,
        evaluations,
    };
    let top = h(cap)?;
    if let Some((v, lstar)) = top {
        if v >= 0.0 {
            let ev = evaluations;
            return Ok(finish(lambda6, &lstar, [cap, lambda6], true, ev));
        }
    }
    // lower end with h >= 0
    let mut lo = if cap > 0.0 { 0.0 } else { cap - 1.0 };
    let mut step = 1.0;
    let (mut f_lo, mut l_lo) = loop {
        match h(lo)? {
            Some((v, l)) if v >= 0.0 => break (v, l),
            _ => {
                lo -= step;
                step *= 2.0;
                if step > 1e12 {
                    return Err(Error::ShiftExceedsLambda6 { shift: lo, lambda6 });
                }
            }
        }
    };
    let mut hi = cap;
    let mut f_hi = top.map(|(v, _)| v);
    while hi - lo > opts.bisect_tol {
        let mid = 0.5 * (lo + hi);
        match h(mid)? {
            Some((v, l)) if v >= 0.0 => {
                lo = mid;
                f_lo = v;
                l_lo = l;
            }
            other => {
                hi = mid;
                f_hi = other.map(|(v, _)| v);
            }
        }
    }
    // Illinois polish inside the final bracket
    let mut root = lo;
    let mut root_lstar = l_lo;
    if let Some(mut fh) = f_hi {
        let (mut a, mut fa, mut b) = (lo, f_lo, hi);
        let mut side = 0i8;
        for _ in 0..40 {
            if fa - fh == 0.0 {
                break;
            }
            let t = (a - fa * (b - a) / (fh - fa)).clamp(a, b);
            let Some((ft, lt)) = h(t)? else { break };
            root = t;
            root_lstar = lt;
            if ft.abs() <= 1e-15 * material.strong.max_abs().max(material.weak.max_abs()) || b - a < 1e-15 {
                break;
            }
            if ft >= 0.0 {
                a = t;
                fa = ft;
                if side == 1 {
                    fh *= 0.5;
                }
                side = 1;
            } else {
                b = t;
                fh = ft;
                if side == -1 {
                    fa *= 0.5;
                }
                side = -1;
            }
        }
    }
    let ev = evaluations;
    Ok(finish(root, &root_lstar, [lo, hi], false, ev))
}

/// All discrete constants of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub lambda6: SpectralValue,
    pub lambda4: Lambda4,
    pub lambda5: Lambda5,
    pub lambda1: Lambda1,
    /// Supercell size `k` to `lambda6` of the `k x k` tiling.
    pub lambda3: BTreeMap<usize, SpectralValue>,
    pub lstar: QuadraticForm4,
    /// Rank-one minimum of the homogenized tensor.
    pub lstar_rank_one_min: RankOneMin,
    pub checks: OrderingChecks,
    pub seed: u64,
}

/// Discrete analogues of the ordering between the constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderingChecks {
    /// `lambda6 >= lambda4 - 1e-8`
    pub lambda6_ge_lambda4: bool,
    /// `lambda4 >= lambda1 - 1e-6`
    pub lambda4_ge_lambda1: bool,
    /// `lambda1 <= lambda6 + 1e-10`
    pub lambda1_le_lambda6: bool,
    /// `lambda5 >= lambda1 - 1e-6`
    pub lambda5_ge_lambda1: bool,
    /// `rank_one_min(L*) >= lambda4 - 1e-6`
    pub lstar_ge_lambda4: bool,
    /// `lambda3(k') <= lambda3(k)` whenever `k` divides `k'`
    pub lambda3_monotone: bool,
}

/// Computes every constant. `supercells` lists the tiling sizes for
/// `lambda3`.
pub fn spectral_report(grid: &PixelGrid, material: &Material, supercells: &[usize], opts: &SpectraOptions) -> Result<SpectralReport> {
    let l6 = lambda6(grid, material, opts)?;
    let problem = CellProblem::new(grid.clone(), *material, 0.0);
    let lstar = homogenized_tensor(&problem, &opts.corrector)?.lstar;
    let lstar_min = rank_one_min_with(&lstar, opts.angle_samples.max(16));
    let l4 = lambda4(grid, material, l6.value, opts)?;
    let l5 = lambda5(grid, material, opts)?;
    let l1 = lambda1(grid, material, Some(l5.value.value), opts)?;
    let mut l3 = BTreeMap::new();
    for &k in supercells {
        l3.insert(k, lambda3_supercell(grid, material, k, opts)?);
    }
    let lambda3_monotone = l3
        .iter()
        .all(|(k, a)| l3.iter().all(|(k2, b)| k2 % k != 0 || b.value <= a.value + 1e-8));
    let checks = OrderingChecks {
        lambda6_ge_lambda4: l6.value >= l4.value.value - 1e-8,
        lambda4_ge_lambda1: l4.value.value >= l1.value.value - 1e-6,
        lambda1_le_lambda6: l1.value.value <= l6.value + 1e-10,
        lambda5_ge_lambda1: l5.value.value >= l1.value.value - 1e-6,
        lstar_ge_lambda4: lstar_min.value >= l4.value.value - 1e-6,
        lambda3_monotone,
    };
    Ok(SpectralReport {
        lambda6: l6,
        lambda4: l4,
        lambda5: l5,
        lambda1: l1,
        lambda3: l3,
        lstar,
        lstar_rank_one_min: lstar_min,
        checks,
        seed: opts.eigen.seed,
    })
}
