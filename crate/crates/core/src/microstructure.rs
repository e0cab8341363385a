//! Periodic pixel microstructures on the unit cell and their connectivity
//! classes.
//!
//! Pixel `(ix, iy)` covers `[ix/n, (ix+1)/n) x [iy/n, (iy+1)/n)`; `ix` runs
//! along `e1`. Storage is row-major with rows along `e2`: index `iy * n + ix`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // f64 methods are inherent when std is linked
use num_traits::Float;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};

/// Coordinate axis of the unit cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X1,
    X2,
}

impl Axis {
    pub fn from_index(axis: u32) -> Result<Self> {
        match axis {
            1 => Ok(Self::X1),
            2 => Ok(Self::X2),
            _ => Err(Error::InvalidParameter { name: "axis", reason: "must be 1 or 2" }),
        }
    }

    pub fn index(self) -> u32 {
        match self {
            Self::X1 => 1,
            Self::X2 => 2,
        }
    }
}

/// How a grid was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Laminate { theta: f64, axis: Axis },
    Checkerboard,
    Disks { centers: Vec<[f64; 2]>, radius: f64, strong_inside: bool },
    RandomDisks { seed: u64, target_theta: f64, min_gap: f64, radius: f64, disks: usize },
    Uniform { strong: bool },
    Complement(Box<Provenance>),
    Tiled { copies: usize, base: Box<Provenance> },
    Refined { factor: usize, base: Box<Provenance> },
    Custom,
}

/// An `n x n` periodic characteristic function of the strong phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelGrid {
    n: usize,
    chi: Vec<bool>,
    provenance: Provenance,
}

impl PixelGrid {
    pub fn from_bits(n: usize, chi: Vec<bool>, provenance: Provenance) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter { name: "n", reason: "must be at least 2" });
        }
        if chi.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: chi.len() });
        }
        Ok(Self { n, chi, provenance })
    }

    /// A single-phase grid.
    pub fn uniform(n: usize, strong: bool) -> Result<Self> {
        Self::from_bits(n, vec![strong; n * n], Provenance::Uniform { strong })
    }

    fn from_fn(n: usize, provenance: Provenance, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let mut chi = Vec::with_capacity(n * n);
        for iy in 0..n {
            for ix in 0..n {
                chi.push(f(ix, iy));
            }
        }
        Self::from_bits(n, chi, provenance)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[bool] {
        &self.chi
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `chi` at pixel `(ix, iy)`, indices taken modulo `n`.
    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> bool {
        self.chi[(iy % self.n) * self.n + ix % self.n]
    }

    pub fn strong_count(&self) -> usize {
        self.chi.iter().filter(|&&c| c).count()
    }

    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            chi: self.chi.iter().map(|c| !c).collect(),
            provenance: Provenance::Complement(Box::new(self.provenance.clone())),
        }
    }

    /// Cyclic shift: the new pixel `(ix, iy)` is the old `(ix + dx, iy + dy)`.
    pub fn shifted(&self, dx: usize, dy: usize) -> Self {
        let n = self.n;
        let chi = (0..n * n).map(|k| self.get(k % n + dx, k / n + dy)).collect();
        Self { n, chi, provenance: Provenance::Custom }
    }

    /// One of the 8 symmetries of the square cell, `code` in `0..8`: bit 0
    /// transposes, bit 1 flips `e1`, bit 2 flips `e2`.
    pub fn transformed(&self, code: u8) -> Self {
        let n = self.n;
        let chi = (0..n * n)
            .map(|k| {
                let (mut ix, mut iy) = (k % n, k / n);
                if code & 2 != 0 {
                    ix = n - 1 - ix;
                }
                if code & 4 != 0 {
                    iy = n - 1 - iy;
                }
                if code & 1 != 0 {
                    core::mem::swap(&mut ix, &mut iy);
                }
                self.get(ix, iy)
            })
            .collect();
        Self { n, chi, provenance: Provenance::Custom }
    }

    /// The `copies x copies` periodic tiling, an `(copies n)`-pixel grid.
    pub fn tiled(&self, copies: usize) -> Self {
        let m = self.n * copies;
        let chi = (0..m * m).map(|k| self.get(k % m, k / m)).collect();
        Self {
            n: m,
            chi,
            provenance: Provenance::Tiled { copies, base: Box::new(self.provenance.clone()) },
        }
    }

    /// Same geometry with every pixel split into `factor x factor` pixels.
    pub fn refined(&self, factor: usize) -> Self {
        let m = self.n * factor;
        let chi = (0..m * m).map(|k| self.get((k % m) / factor, (k / m) / factor)).collect();
        Self {
            n: m,
            chi,
            provenance: Provenance::Refined { factor, base: Box::new(self.provenance.clone()) },
        }
    }

    /// Whether `chi` is constant along `e1` (depends on `x2` only).
    fn constant_along_x1(&self) -> bool {
        (0..self.n).all(|iy| (1..self.n).all(|ix| self.get(ix, iy) == self.get(0, iy)))
    }

    fn constant_along_x2(&self) -> bool {
        (0..self.n).all(|ix| (1..self.n).all(|iy| self.get(ix, iy) == self.get(ix, 0)))
    }
}

/// Strong-phase volume fraction `theta1`.
pub fn volume_fraction(grid: &PixelGrid) -> f64 {
    grid.strong_count() as f64 / (grid.n * grid.n) as f64
}

/// Bands of strong phase of width `theta * n` pixels, normal to `axis`
/// (`axis = X1` makes `chi` depend on `x1` only).
pub fn laminate(n: usize, theta: f64, axis: Axis) -> Result<PixelGrid> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter { name: "theta", reason: "must lie in [0, 1]" });
    }
    let width = theta * n as f64;
    let pixels = width.round();
    if (width - pixels).abs() > 1e-9 {
        return Err(Error::NonIntegerBandWidth { width });
    }
    let w = pixels as usize;
    PixelGrid::from_fn(n, Provenance::Laminate { theta, axis }, |ix, iy| match axis {
        Axis::X1 => ix < w,
        Axis::X2 => iy < w,
    })
}

/// Two strong squares on one diagonal of the 2x2 block pattern.
pub fn checkerboard(n: usize) -> Result<PixelGrid> {
    if n % 2 != 0 {
        return Err(Error::OddN(n));
    }
    let half = n / 2;
    PixelGrid::from_fn(n, Provenance::Checkerboard, |ix, iy| (ix < half) == (iy < half))
}

#[inline]
fn periodic_delta(d: f64) -> f64 {
    d - d.round()
}

fn periodic_dist2(p: [f64; 2], q: [f64; 2]) -> f64 {
    let dx = periodic_delta(p[0] - q[0]);
    let dy = periodic_delta(p[1] - q[1]);
    dx * dx + dy * dy
}

fn pixel_center(n: usize, ix: usize, iy: usize) -> [f64; 2] {
    [(ix as f64 + 0.5) / n as f64, (iy as f64 + 0.5) / n as f64]
}

/// Periodically wrapped disks; a pixel belongs to a disk when its center does.
/// With `strong_inside` the disks are strong inclusions in a weak matrix,
/// otherwise the reverse.
pub fn disks(n: usize, centers: &[[f64; 2]], radius: f64, strong_inside: bool) -> Result<PixelGrid> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter { name: "radius", reason: "must be positive" });
    }
    let r2 = radius * radius;
    let provenance = Provenance::Disks { centers: centers.to_vec(), radius, strong_inside };
    PixelGrid::from_fn(n, provenance, |ix, iy| {
        let c = pixel_center(n, ix, iy);
        let inside = centers.iter().any(|&p| periodic_dist2(c, p) <= r2);
        inside == strong_inside
    })
}

/// Parameters of the hard-core random disk generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomDisks {
    pub n: usize,
    pub seed: u64,
    pub target_theta: f64,
    pub min_gap: f64,
    /// Disk radius in cell units; defaults to four pixels.
    pub radius: Option<f64>,
}

/// Consecutive rejected insertions after which packing is declared stalled.
pub const MAX_CONSECUTIVE_REJECTIONS: usize = 10_000;

pub const DEFAULT_RANDOM_DISK_RADIUS_PIXELS: f64 = 4.0;

impl RandomDisks {
    pub fn new(n: usize, seed: u64, target_theta: f64, min_gap: f64) -> Self {
        Self { n, seed, target_theta, min_gap, radius: None }
    }

    pub fn radius(&self) -> f64 {
        self.radius.unwrap_or(DEFAULT_RANDOM_DISK_RADIUS_PIXELS / self.n as f64)
    }
}

fn unit_f64(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Random sequential adsorption of equal strong disks with periodic wrap.
/// Centers are uniform in the cell and drawn from SplitMix64 seeded with
/// `seed`; a candidate is rejected when it comes closer than
/// `2 radius + min_gap` to an accepted center. Insertion stops once the
/// pixel volume fraction reaches `target_theta`.
pub fn random_disks(params: &RandomDisks) -> Result<PixelGrid> {
    let RandomDisks { n, seed, target_theta, min_gap, .. } = *params;
    if n < 2 {
        return Err(Error::InvalidParameter { name: "n", reason: "must be at least 2" });
    }
    if !(target_theta > 0.0 && target_theta < 1.0) {
        return Err(Error::InvalidParameter { name: "target_theta", reason: "must lie in (0, 1)" });
    }
    if !(min_gap >= 0.0) {
        return Err(Error::InvalidParameter { name: "min_gap", reason: "must be nonnegative" });
    }
    let radius = params.radius();
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter { name: "radius", reason: "must be positive" });
    }
    let exclusion2 = (2.0 * radius + min_gap).powi(2);
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut chi = vec![false; n * n];
    let mut strong = 0usize;
    let mut centers: Vec<[f64; 2]> = Vec::new();
    let mut rejections = 0usize;
    let target = target_theta * (n * n) as f64;
    while (strong as f64) < target {
        if rejections >= MAX_CONSECUTIVE_REJECTIONS {
            return Err(Error::PackingStalled { achieved: strong as f64 / (n * n) as f64 });
        }
        let c = [unit_f64(&mut rng), unit_f64(&mut rng)];
        if centers.iter().any(|&p| periodic_dist2(c, p) < exclusion2) {
            rejections += 1;
            continue;
        }
        rejections = 0;
        centers.push(c);
        let r2 = radius * radius;
        for iy in 0..n {
            for ix in 0..n {
                let k = iy * n + ix;
                if !chi[k] && periodic_dist2(pixel_center(n, ix, iy), c) <= r2 {
                    chi[k] = true;
                    strong += 1;
                }
            }
        }
    }
    let provenance = Provenance::RandomDisks { seed, target_theta, min_gap, radius, disks: centers.len() };
    PixelGrid::from_bits(n, chi, provenance)
}

/// Connectivity class of a two-phase microstructure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MicroClass {
    /// Weak phase connected, strong phase not.
    A,
    /// Strong phase connected, weak phase not.
    B,
    /// Bands: `chi` constant along one axis.
    CLaminate,
    /// Neither phase connected, not a laminate.
    COther,
    Homogeneous,
    /// Connectivity differs between tilings, or both phases look connected.
    Ambiguous,
}

impl MicroClass {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::A => "A",
            Self::B => "B",
            Self::CLaminate => "C_laminate",
            Self::COther => "C_other",
            Self::Homogeneous => "homogeneous",
            Self::Ambiguous => "ambiguous",
        }
    }
}

impl core::fmt::Display for MicroClass {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Number of 4-connected components of `{chi == phase}` on the torus formed
/// by `copies x copies` tiles of the cell.
pub fn tiled_component_count(grid: &PixelGrid, phase: bool, copies: usize) -> usize {
    let m = grid.n * copies;
    let mut seen = vec![false; m * m];
    let mut stack = Vec::new();
    let mut components = 0;
    for start in 0..m * m {
        if seen[start] || grid.get(start % m, start / m) != phase {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(k) = stack.pop() {
            let (x, y) = (k % m, k / m);
            let neighbours = [
                ((x + 1) % m, y),
                ((x + m - 1) % m, y),
                (x, (y + 1) % m),
                (x, (y + m - 1) % m),
            ];
            for (nx, ny) in neighbours {
                let j = ny * m + nx;
                if !seen[j] && grid.get(nx, ny) == phase {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    components
}

fn connectivity(grid: &PixelGrid, copies: usize) -> (bool, bool) {
    (
        tiled_component_count(grid, true, copies) == 1,
        tiled_component_count(grid, false, copies) == 1,
    )
}

/// Classifies a grid by connectivity of its phases in the infinite tiling.
///
/// Both phases are flood-filled with 4-adjacency, so pixels that meet only
/// at a corner are not connected (the phases are open sets). A phase counts
/// as connected when it forms a single component on the 3x3-tiled torus; the
/// result is `Ambiguous` if the 5x5-tiled torus disagrees.
pub fn classify(grid: &PixelGrid) -> MicroClass {
    let strong = grid.strong_count();
    if strong == 0 || strong == grid.n * grid.n {
        return MicroClass::Homogeneous;
    }
    if grid.constant_along_x1() || grid.constant_along_x2() {
        return MicroClass::CLaminate;
    }
    let three = connectivity(grid, 3);
    if three != connectivity(grid, 5) {
        return MicroClass::Ambiguous;
    }
    match three {
        (false, true) => MicroClass::A,
        (true, false) => MicroClass::B,
        (false, false) => MicroClass::COther,
        (true, true) => MicroClass::Ambiguous,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn laminate_construction() {
        let g = laminate(8, 0.5, Axis::X1).unwrap();
        for iy in 0..8 {
            for ix in 0..8 {
                assert_eq!(g.get(ix, iy), ix < 4);
            }
        }
        assert_eq!(volume_fraction(&g), 0.5);
        assert_eq!(volume_fraction(&laminate(8, 0.25, Axis::X1).unwrap()), 0.25);
        assert!(matches!(laminate(8, 0.3, Axis::X1), Err(Error::NonIntegerBandWidth { .. })));
        let g2 = laminate(8, 0.25, Axis::X2).unwrap();
        assert!(g2.get(5, 1) && !g2.get(1, 2));
    }

    #[test]
    fn checkerboard_construction() {
        let g = checkerboard(2).unwrap();
        assert_eq!(g.bits(), &[true, false, false, true]);
        let g = checkerboard(8).unwrap();
        assert_eq!(volume_fraction(&g), 0.5);
        assert_eq!(classify(&g), MicroClass::COther);
        assert_eq!(checkerboard(7), Err(Error::OddN(7)));
    }

    #[test]
    fn disk_classes() {
        let a = disks(32, &[[0.5, 0.5]], 0.25, true).unwrap();
        let theta = volume_fraction(&a);
        // pixelized disk area: within one perimeter's worth of pixels
        assert!((theta - PI / 16.0).abs() < 2.0 * PI * 0.25 / 32.0, "theta = {theta}");
        assert_eq!(classify(&a), MicroClass::A);
        let b = disks(32, &[[0.5, 0.5]], 0.25, false).unwrap();
        assert_eq!(classify(&b), MicroClass::B);
        assert_eq!(volume_fraction(&b), 1.0 - theta);
        // percolating strong disk
        let big = disks(32, &[[0.5, 0.5]], 0.6, true).unwrap();
        assert_eq!(classify(&big), MicroClass::B);
        let full = disks(32, &[[0.5, 0.5]], 0.71, true).unwrap();
        assert_ne!(classify(&full), MicroClass::A);
    }

    #[test]
    fn laminate_and_homogeneous_classes() {
        assert_eq!(classify(&laminate(8, 0.5, Axis::X1).unwrap()), MicroClass::CLaminate);
        assert_eq!(classify(&laminate(8, 0.25, Axis::X2).unwrap()), MicroClass::CLaminate);
        assert_eq!(classify(&PixelGrid::uniform(8, true).unwrap()), MicroClass::Homogeneous);
        assert_eq!(classify(&laminate(8, 0.0, Axis::X1).unwrap()), MicroClass::Homogeneous);
    }

    #[test]
    fn random_disks_deterministic() {
        let p = RandomDisks::new(64, 42, 0.3, 0.02);
        let g1 = random_disks(&p).unwrap();
        let g2 = random_disks(&p).unwrap();
        assert_eq!(g1, g2);
        let g3 = random_disks(&RandomDisks { seed: 43, ..p }).unwrap();
        assert_ne!(g1.bits(), g3.bits());
        for g in [&g1, &g3] {
            let theta = volume_fraction(g);
            assert!(theta >= 0.3 && theta - 0.3 <= 2.0 / 64.0, "theta = {theta}");
        }
    }

    #[test]
    fn random_disks_stall() {
        let p = RandomDisks::new(64, 42, 0.9, 0.2);
        match random_disks(&p) {
            Err(Error::PackingStalled { achieved }) => assert!(achieved < 0.9),
            other => panic!("expected PackingStalled, got {other:?}"),
        }
    }

    #[test]
    fn tiling_and_refinement() {
        let g = checkerboard(4).unwrap();
        let t = g.tiled(3);
        assert_eq!(t.n(), 12);
        assert_eq!(t.get(5, 9), g.get(1, 1));
        let r = g.refined(2);
        assert_eq!(r.n(), 8);
        assert_eq!(r.bits(), checkerboard(8).unwrap().bits());
    }

    #[test]
    fn symmetries_preserve_class() {
        let g = disks(16, &[[0.3, 0.6]], 0.2, true).unwrap();
        for code in 0..8 {
            let t = g.transformed(code);
            assert_eq!(t.strong_count(), g.strong_count());
            assert_eq!(classify(&t), MicroClass::A);
        }
        assert_eq!(classify(&g.shifted(5, 11)), MicroClass::A);
    }
}
