//! Procedural scenario maps, 8 m x 8 m at 4 cm per cell.
//!
//! * `O`: one large round obstacle in the middle, narrow passages below it.
//! * `X`: a round obstacle in the middle and a block in every corner.
//! * `Z`: a single long corridor folded into a Z.
//!
//! All three have about 43 m² of free space.
//!
//! Each map is framed by a band of unknown (gray) cells. The same rasters
//! ship as `maps/{o,x,z}.pgm`.

use crate::pgm::Graymap;

pub const SIZE: usize = 200;
pub const RESOLUTION: f64 = 0.04;

const FREE: u8 = 255;
const OBSTACLE: u8 = 0;
const UNKNOWN: u8 = 128;
/// Width of the unknown frame, meters.
const FRAME: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    O,
    X,
    Z,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::O, Scenario::X, Scenario::Z];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::O => "o",
            Scenario::X => "x",
            Scenario::Z => "z",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(s))
    }

    pub fn raster(self) -> Graymap {
        let mut pixels = Vec::with_capacity(SIZE * SIZE);
        for row in 0..SIZE {
            for col in 0..SIZE {
                let (x, y) = ((col as f64 + 0.5) * RESOLUTION, (row as f64 + 0.5) * RESOLUTION);
                let side = SIZE as f64 * RESOLUTION;
                let value = if x < FRAME || y < FRAME || x > side - FRAME || y > side - FRAME {
                    UNKNOWN
                } else if self.blocked(x, y) {
                    OBSTACLE
                } else {
                    FREE
                };
                pixels.push(value);
            }
        }
        Graymap { width: SIZE, height: SIZE, pixels }
    }

    fn blocked(self, x: f64, y: f64) -> bool {
        let disk = |cx: f64, cy: f64, r: f64| (x - cx).powi(2) + (y - cy).powi(2) < r * r;
        let rect = |x0: f64, y0: f64, x1: f64, y1: f64| (x0..x1).contains(&x) && (y0..y1).contains(&y);
        match self {
            Scenario::O => {
                // wall across the lower part, pierced by three 0.48 m gaps
                let wall = rect(0.0, 6.0, 8.0, 6.6);
                let gap = [1.6, 4.0, 6.4].iter().any(|&c| (x - c).abs() < 0.24);
                disk(4.0, 3.3, 1.9) || (wall && !gap)
            }
            Scenario::X => {
                disk(4.0, 4.0, 1.2)
                    || rect(0.8, 0.8, 2.4, 2.4)
                    || rect(5.6, 0.8, 7.2, 2.4)
                    || rect(0.8, 5.6, 2.4, 7.2)
                    || rect(5.6, 5.6, 7.2, 7.2)
            }
            Scenario::Z => {
                // 2 m wide corridor: top bar, diagonal, bottom bar
                let (ax, ay, bx, by) = (6.8, 1.2, 1.2, 6.8);
                let (dx, dy) = (bx - ax, by - ay);
                let t = (((x - ax) * dx + (y - ay) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
                let dist = ((x - ax - t * dx).powi(2) + (y - ay - t * dy).powi(2)).sqrt();
                !(y < 2.2 || y > 5.8 || dist < 1.0)
            }
        }
    }
}
