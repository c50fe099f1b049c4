//! SVG 1.1 rendering of maps, roadmaps and paths.
//!
//! Coordinates stay in meters (the `viewBox`), map row 0 at the top. All
//! numbers are printed with four decimals so output bytes depend only on
//! the inputs.

use std::fmt::Write as _;

use drm_core::{Cell, Config2, OccupancyMap, RelaxedDrm};

/// |d| at which an edge is drawn fully green.
pub const COLOR_SATURATION: f64 = 5.0;

const OBSTACLE: &str = "#202020";
const UNKNOWN: &str = "#a0a0a0";
/// Longest side of the rendered image, pixels.
const TARGET_PIXELS: f64 = 800.0;

/// Red at `d = 0`, green once `|d| >= COLOR_SATURATION`.
pub fn edge_color(d: f64) -> String {
    let t = (d.abs().min(COLOR_SATURATION) / COLOR_SATURATION).clamp(0.0, 1.0);
    let r = (220.0 * (1.0 - t)).round() as u8;
    let g = (170.0 * t).round() as u8;
    format!("#{r:02x}{g:02x}00")
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Frame {
    width: f64,
    height: f64,
    stroke: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Scene<'a> {
    pub map: Option<&'a OccupancyMap>,
    pub graph: Option<&'a RelaxedDrm>,
    /// Drawn as a black polyline on top.
    pub path: Option<Vec<Config2>>,
    pub title: Option<String>,
}

impl Scene<'_> {
    fn frame(&self) -> Frame {
        let (width, height) = match (self.map, self.graph) {
            (Some(m), _) => (m.width_m(), m.height_m()),
            (None, Some(g)) if g.vertex_count() > 0 => {
                let max_x = g.vertices().iter().map(|p| p.x).fold(0.0, f64::max);
                let max_y = g.vertices().iter().map(|p| p.y).fold(0.0, f64::max);
                (max_x * 1.05 + 0.1, max_y * 1.05 + 0.1)
            }
            _ => (1.0, 1.0),
        };
        Frame { width, height, stroke: width.max(height) / 400.0 }
    }

    pub fn render(&self) -> String {
        let f = self.frame();
        let scale = TARGET_PIXELS / f.width.max(f.height);
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.4} {:.4}\">",
            f.width * scale,
            f.height * scale,
            f.width,
            f.height
        )
        .unwrap();
        if let Some(title) = &self.title {
            writeln!(s, "<title>{}</title>", escape(title)).unwrap();
        }
        writeln!(s, "<rect x=\"0\" y=\"0\" width=\"{:.4}\" height=\"{:.4}\" fill=\"#ffffff\"/>", f.width, f.height)
            .unwrap();
        if let Some(map) = self.map {
            draw_map(&mut s, map);
        }
        if let Some(g) = self.graph {
            draw_graph(&mut s, g, f.stroke);
        }
        if let Some(path) = &self.path {
            let points: Vec<String> = path.iter().map(|p| format!("{:.4},{:.4}", p.x, p.y)).collect();
            writeln!(
                s,
                "<polyline class=\"path\" points=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"{:.4}\"/>",
                points.join(" "),
                2.0 * f.stroke
            )
            .unwrap();
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Non-free cells as horizontal runs, one rect per run.
fn draw_map(s: &mut String, map: &OccupancyMap) {
    let r = map.resolution();
    s.push_str("<g class=\"map\" shape-rendering=\"crispEdges\">\n");
    for row in 0..map.height() {
        let mut col = 0;
        while col < map.width() {
            let cell = map.cell(col, row);
            let start = col;
            while col < map.width() && map.cell(col, row) == cell {
                col += 1;
            }
            let fill = match cell {
                Cell::Free => continue,
                Cell::Obstacle => OBSTACLE,
                Cell::Unknown => UNKNOWN,
            };
            writeln!(
                s,
                "<rect x=\"{:.4}\" y=\"{:.4}\" width=\"{:.4}\" height=\"{:.4}\" fill=\"{fill}\"/>",
                start as f64 * r,
                row as f64 * r,
                (col - start) as f64 * r,
                r
            )
            .unwrap();
        }
    }
    s.push_str("</g>\n");
}

fn draw_graph(s: &mut String, g: &RelaxedDrm, stroke: f64) {
    s.push_str("<g class=\"edges\">\n");
    for e in g.edges() {
        // arrows point the way the edge is currently more likely to be used
        let (from, to) = if e.d >= 0.0 { (g.vertex(e.u), g.vertex(e.v)) } else { (g.vertex(e.v), g.vertex(e.u)) };
        let color = edge_color(e.d);
        writeln!(
            s,
            "<line x1=\"{:.4}\" y1=\"{:.4}\" x2=\"{:.4}\" y2=\"{:.4}\" stroke=\"{color}\" stroke-width=\"{stroke:.4}\"/>",
            from.x, from.y, to.x, to.y
        )
        .unwrap();
        let len = from.distance(&to);
        if len > 0.0 {
            let (ux, uy) = ((to.x - from.x) / len, (to.y - from.y) / len);
            let size = (4.0 * stroke).min(len / 3.0);
            let mid = Config2::new((from.x + to.x) / 2.0, (from.y + to.y) / 2.0);
            let tip = Config2::new(mid.x + ux * size / 2.0, mid.y + uy * size / 2.0);
            let back = Config2::new(mid.x - ux * size / 2.0, mid.y - uy * size / 2.0);
            let (px, py) = (-uy * size / 2.0, ux * size / 2.0);
            writeln!(
                s,
                "<polygon points=\"{:.4},{:.4} {:.4},{:.4} {:.4},{:.4}\" fill=\"{color}\"/>",
                tip.x,
                tip.y,
                back.x + px,
                back.y + py,
                back.x - px,
                back.y - py
            )
            .unwrap();
        }
    }
    s.push_str("</g>\n<g class=\"vertices\" fill=\"#1f4e9c\">\n");
    for p in g.vertices() {
        writeln!(s, "<circle cx=\"{:.4}\" cy=\"{:.4}\" r=\"{:.4}\"/>", p.x, p.y, 1.5 * stroke).unwrap();
    }
    s.push_str("</g>\n");
}
