//! Portable graymap input (`P2` ASCII and `P5` binary) and a binary writer.

use std::io::{self, Write};

use drm_core::OccupancyMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PgmError {
    #[error("byte {offset}: bad magic, expected P2 or P5")]
    BadMagic { offset: usize },
    #[error("byte {offset}: malformed header field `{field}`")]
    MalformedHeader { offset: usize, field: &'static str },
    #[error("byte {offset}: maxval {maxval} not supported (1..=255)")]
    UnsupportedMaxval { offset: usize, maxval: u32 },
    #[error("byte {offset}: expected {expected} pixels, found {found}")]
    DimensionMismatch { offset: usize, expected: usize, found: usize },
    #[error("byte {offset}: pixel value {value} exceeds maxval {maxval}")]
    ValueOutOfRange { offset: usize, value: u32, maxval: u32 },
    #[error("invalid map: {0}")]
    Map(#[from] drm_core::Error),
}

/// Decoded raster, rows top to bottom, values rescaled to 0..=255.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graymap {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Next unsigned decimal token; `None` at end of input.
    fn number(&mut self, field: &'static str) -> Result<Option<(usize, u32)>, PgmError> {
        self.skip_space();
        let start = self.pos;
        if start >= self.bytes.len() {
            return Ok(None);
        }
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        let end_ok = self.bytes.get(self.pos).is_none_or(|b| b.is_ascii_whitespace() || *b == b'#');
        if self.pos == start || !end_ok {
            return Err(PgmError::MalformedHeader { offset: start, field });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .map(|v| Some((start, v)))
            .ok_or(PgmError::MalformedHeader { offset: start, field })
    }

    fn header_field(&mut self, field: &'static str) -> Result<(usize, u32), PgmError> {
        let offset = self.pos;
        self.number(field)?.ok_or(PgmError::MalformedHeader { offset, field })
    }
}

pub fn parse(bytes: &[u8]) -> Result<Graymap, PgmError> {
    let binary = match bytes.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => return Err(PgmError::BadMagic { offset: 0 }),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    if !cur.bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(PgmError::BadMagic { offset: 2 });
    }
    let (woff, width) = cur.header_field("width")?;
    let (hoff, height) = cur.header_field("height")?;
    if width == 0 {
        return Err(PgmError::MalformedHeader { offset: woff, field: "width" });
    }
    if height == 0 {
        return Err(PgmError::MalformedHeader { offset: hoff, field: "height" });
    }
    let (moff, maxval) = cur.header_field("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(PgmError::UnsupportedMaxval { offset: moff, maxval });
    }
    let expected = width as usize * height as usize;
    let scale = |v: u32| ((v * 255 + maxval / 2) / maxval) as u8;

    let mut pixels = Vec::with_capacity(expected.min(bytes.len()));
    if binary {
        // exactly one whitespace byte separates maxval from the raster
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => return Err(PgmError::MalformedHeader { offset: cur.pos, field: "raster separator" }),
        }
        let raster = &bytes[cur.pos..];
        if raster.len() != expected {
            return Err(PgmError::DimensionMismatch { offset: cur.pos, expected, found: raster.len() });
        }
        for (k, &v) in raster.iter().enumerate() {
            if u32::from(v) > maxval {
                return Err(PgmError::ValueOutOfRange { offset: cur.pos + k, value: v.into(), maxval });
            }
            pixels.push(scale(v.into()));
        }
    } else {
        while let Some((offset, v)) = cur.number("pixel")? {
            if pixels.len() == expected {
                return Err(PgmError::DimensionMismatch { offset, expected, found: expected + 1 });
            }
            if v > maxval {
                return Err(PgmError::ValueOutOfRange { offset, value: v, maxval });
            }
            pixels.push(scale(v));
        }
        if pixels.len() != expected {
            return Err(PgmError::DimensionMismatch { offset: bytes.len(), expected, found: pixels.len() });
        }
    }
    Ok(Graymap { width: width as usize, height: height as usize, pixels })
}

/// Parses a graymap and classifies it into an occupancy map.
pub fn load_map(bytes: &[u8], resolution: f64) -> Result<OccupancyMap, PgmError> {
    let g = parse(bytes)?;
    Ok(OccupancyMap::from_gray(g.width, g.height, &g.pixels, resolution)?)
}

/// Binary `P5` with maxval 255.
pub fn write_binary<W: Write>(mut out: W, g: &Graymap) -> io::Result<()> {
    write!(out, "P5\n{} {}\n255\n", g.width, g.height)?;
    out.write_all(&g.pixels)
}
