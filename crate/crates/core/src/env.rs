//! Occupancy maps, point/segment collision checks and free-space sampling.
//!
//! World coordinates are meters. Cell `(col, row)` covers
//! `[col·res, (col+1)·res) × [row·res, (row+1)·res)`, with row 0 being the
//! first raster row, so the y axis points down the image.

use alloc::vec::Vec;
use rand::Rng;

use crate::error::{Error, Result};

/// Seedable generator used by every stochastic operation (PCG-XSH-RR with a
/// 64-bit LCG state).
pub type Prng = rand_pcg::Pcg32;

/// Consecutive rejections after which [`sample_free`] gives up.
pub const MAX_CONSECUTIVE_REJECTIONS: usize = 10_000;

/// Default cell size in meters.
pub const DEFAULT_RESOLUTION: f64 = 0.01;

/// Gray values at or above this are free.
pub const FREE_THRESHOLD: u8 = 204;
/// Gray values at or below this are obstacles.
pub const OBSTACLE_THRESHOLD: u8 = 51;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Free,
    Obstacle,
    Unknown,
}

impl Cell {
    /// Classifies an 8-bit gray value.
    pub fn from_gray(value: u8) -> Self {
        if value >= FREE_THRESHOLD {
            Cell::Free
        } else if value <= OBSTACLE_THRESHOLD {
            Cell::Obstacle
        } else {
            Cell::Unknown
        }
    }
}

/// A configuration (position) in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Config2 {
    pub x: f64,
    pub y: f64,
}

impl Config2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Config2) -> f64 {
        libm::hypot(self.x - other.x, self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub(crate) fn lex_cmp(&self, other: &Config2) -> core::cmp::Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

/// Immutable discretized environment.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyMap {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
    resolution: f64,
}

impl OccupancyMap {
    /// `cells` is row-major, `width × height` entries.
    pub fn new(width: usize, height: usize, cells: Vec<Cell>, resolution: f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidMap("width and height must be at least 1"));
        }
        if cells.len() != width * height {
            return Err(Error::InvalidMap("cell count does not match width × height"));
        }
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(Error::InvalidMap("resolution must be positive and finite"));
        }
        Ok(Self {
            width,
            height,
            cells,
            resolution,
        })
    }

    /// Builds a map from 8-bit gray values using the free/obstacle thresholds.
    pub fn from_gray(width: usize, height: usize, pixels: &[u8], resolution: f64) -> Result<Self> {
        let cells = pixels.iter().copied().map(Cell::from_gray).collect();
        Self::new(width, height, cells, resolution)
    }

    pub fn filled(width: usize, height: usize, cell: Cell, resolution: f64) -> Result<Self> {
        Self::new(width, height, alloc::vec![cell; width * height], resolution)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Extent in meters along x.
    pub fn width_m(&self) -> f64 {
        self.width as f64 * self.resolution
    }

    /// Extent in meters along y.
    pub fn height_m(&self) -> f64 {
        self.height as f64 * self.resolution
    }

    pub fn cell(&self, col: usize, row: usize) -> Cell {
        self.cells[row * self.width + col]
    }

    pub fn free_cell_count(&self) -> usize {
        self.cells.iter().filter(|c| **c == Cell::Free).count()
    }

    /// Center of cell `(col, row)` in meters.
    pub fn cell_center(&self, col: usize, row: usize) -> Config2 {
        Config2::new(
            (col as f64 + 0.5) * self.resolution,
            (row as f64 + 0.5) * self.resolution,
        )
    }

    /// Cell containing `p`, or `None` outside the map.
    pub fn cell_index(&self, p: Config2) -> Option<(usize, usize)> {
        if !p.is_finite() || p.x < 0.0 || p.y < 0.0 {
            return None;
        }
        let col = libm::floor(p.x / self.resolution);
        let row = libm::floor(p.y / self.resolution);
        if col >= self.width as f64 || row >= self.height as f64 {
            return None;
        }
        Some((col as usize, row as usize))
    }

    /// True iff `p` is inside the map and its cell is free.
    pub fn is_free(&self, p: Config2) -> bool {
        match self.cell_index(p) {
            Some((col, row)) => self.cell(col, row) == Cell::Free,
            None => false,
        }
    }

    /// True iff every sample along `ab` at spacing at most half a cell,
    /// endpoints included, is free.
    pub fn segment_free(&self, a: Config2, b: Config2) -> bool {
        self.segment_witness(a, b).is_none()
    }

    /// First non-free sample along `ab`, if any. Endpoints are put in
    /// lexicographic order first so the result does not depend on the
    /// direction of the segment.
    pub fn segment_witness(&self, a: Config2, b: Config2) -> Option<Config2> {
        let (from, to) = if a.lex_cmp(&b).is_le() { (a, b) } else { (b, a) };
        let length = from.distance(&to);
        if !length.is_finite() {
            return Some(from);
        }
        let spacing = self.resolution / 2.0;
        let steps = libm::ceil(length / spacing).max(1.0) as usize;
        (0..=steps)
            .map(|i| {
                if i == steps {
                    to
                } else {
                    let t = i as f64 / steps as f64;
                    Config2::new(from.x + (to.x - from.x) * t, from.y + (to.y - from.y) * t)
                }
            })
            .find(|p| !self.is_free(*p))
    }

    /// One uniform sample over the map rectangle, rejected until free.
    pub fn sample_one_free(&self, rng: &mut Prng) -> Result<Config2> {
        let (w, h) = (self.width_m(), self.height_m());
        for _ in 0..MAX_CONSECUTIVE_REJECTIONS {
            let p = Config2::new(rng.random::<f64>() * w, rng.random::<f64>() * h);
            if self.is_free(p) {
                return Ok(p);
            }
        }
        Err(Error::FreeSpaceTooSparse(MAX_CONSECUTIVE_REJECTIONS))
    }
}

/// Draws `count` free configurations uniformly by rejection sampling.
pub fn sample_free(map: &OccupancyMap, count: usize, rng: &mut Prng) -> Result<Vec<Config2>> {
    (0..count).map(|_| map.sample_one_free(rng)).collect()
}
