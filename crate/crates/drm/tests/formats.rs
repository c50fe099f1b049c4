use std::collections::BTreeSet;

use drm::pgm::{self, Graymap, PgmError};
use drm::roadmap;
use drm::svg::Scene;
use drm_core::drm::Edge;
use drm_core::{Config2, RelaxedDrm};
use proptest::prelude::*;

fn any_graph() -> impl Strategy<Value = RelaxedDrm> {
    (1usize..12)
        .prop_flat_map(|n| {
            let coords = prop::collection::vec((-1e6..1e6f64, -1e6..1e6f64), n);
            let pairs = prop::collection::vec((0..n, 0..n, prop::num::f64::NORMAL | prop::num::f64::ZERO), 0..30);
            (coords, pairs, "[a-z._/]{0,12}")
        })
        .prop_map(|(coords, pairs, id)| {
            let mut seen = BTreeSet::new();
            let edges = pairs
                .into_iter()
                .filter(|(a, b, _)| a != b && seen.insert((*a.min(b), *a.max(b))))
                .map(|(a, b, d)| Edge { u: a.min(b), v: a.max(b), d })
                .collect();
            let vertices = coords.into_iter().map(|(x, y)| Config2::new(x, y)).collect();
            RelaxedDrm::from_parts(vertices, edges, id).unwrap()
        })
}

/// Arrowhead polygons in drawing order, as `(tip, base midpoint)`.
fn arrowheads(svg: &str) -> Vec<(Config2, Config2)> {
    svg.lines()
        .filter_map(|l| l.strip_prefix("<polygon points=\""))
        .map(|l| {
            let pts: Vec<Config2> = l
                .split('"')
                .next()
                .unwrap()
                .split(' ')
                .map(|p| {
                    let (x, y) = p.split_once(',').unwrap();
                    Config2::new(x.parse().unwrap(), y.parse().unwrap())
                })
                .collect();
            let base = Config2::new((pts[1].x + pts[2].x) / 2.0, (pts[1].y + pts[2].y) / 2.0);
            (pts[0], base)
        })
        .collect()
}

proptest! {
    #[test]
    fn drm_round_trip_is_bit_exact(g in any_graph(), res in 1e-4..1.0f64) {
        let text = roadmap::serialize(&g, res);
        let back = roadmap::parse(&text).unwrap();
        prop_assert_eq!(back.resolution.to_bits(), res.to_bits());
        prop_assert_eq!(back.graph.vertices(), g.vertices());
        for (a, b) in back.graph.edges().iter().zip(g.edges()) {
            prop_assert_eq!((a.u, a.v, a.d.to_bits()), (b.u, b.v, b.d.to_bits()));
        }
        prop_assert_eq!(back.graph.edges().len(), g.edges().len());
        prop_assert_eq!(roadmap::serialize(&back.graph, back.resolution), text);
    }

    #[test]
    fn pgm_binary_and_ascii_agree(w in 1usize..20, h in 1usize..20, seed: u64) {
        let pixels: Vec<u8> = (0..w * h).map(|k| (seed.wrapping_mul(k as u64 + 1) >> 13) as u8).collect();
        let g = Graymap { width: w, height: h, pixels };
        let mut bin = Vec::new();
        pgm::write_binary(&mut bin, &g).unwrap();
        let mut ascii = format!("P2\n# generated\n{w} {h}\n255\n");
        for row in g.pixels.chunks(w) {
            ascii += &row.iter().map(u8::to_string).collect::<Vec<_>>().join(" ");
            ascii += "\n";
        }
        prop_assert_eq!(pgm::parse(&bin).unwrap(), g.clone());
        prop_assert_eq!(pgm::parse(ascii.as_bytes()).unwrap(), g);
    }

    #[test]
    fn truncated_binary_is_rejected(w in 1usize..10, h in 1usize..10, cut in 1usize..5) {
        let g = Graymap { width: w, height: h, pixels: vec![7; w * h] };
        let mut bin = Vec::new();
        pgm::write_binary(&mut bin, &g).unwrap();
        let keep = bin.len() - cut.min(w * h);
        let is_mismatch = matches!(pgm::parse(&bin[..keep]), Err(PgmError::DimensionMismatch { .. }));
        prop_assert!(is_mismatch);
    }

    #[test]
    fn arrowheads_point_from_u_to_v_iff_d_is_non_negative(g in any_graph()) {
        let g = g.with_positions(g.vertices().iter().map(|p| Config2::new(p.x * 1e-6 + 2.0, p.y * 1e-6 + 2.0)).collect()).unwrap();
        let svg = Scene { graph: Some(&g), ..Scene::default() }.render();
        let heads = arrowheads(&svg);
        let drawn: Vec<&Edge> = g.edges().iter().filter(|e| g.vertex(e.u) != g.vertex(e.v)).collect();
        prop_assert_eq!(heads.len(), drawn.len());
        for (e, (tip, base)) in drawn.into_iter().zip(heads) {
            let head = if e.d >= 0.0 { g.vertex(e.v) } else { g.vertex(e.u) };
            // rounding to 1e-4 can blur arrows on edges shorter than that
            if g.vertex(e.u).distance(&g.vertex(e.v)) > 1e-2 {
                prop_assert!(tip.distance(&head) < base.distance(&head), "edge {:?}", e);
            }
        }
    }
}

#[test]
fn render_is_byte_stable() {
    let g = RelaxedDrm::from_parts(
        vec![Config2::new(0.1, 0.1), Config2::new(0.9, 0.2), Config2::new(0.4, 0.8)],
        vec![Edge { u: 0, v: 1, d: -2.0 }, Edge { u: 1, v: 2, d: 0.0 }, Edge { u: 0, v: 2, d: 7.0 }],
        String::new(),
    )
    .unwrap();
    let scene = Scene { graph: Some(&g), path: Some(vec![Config2::new(0.0, 0.0), g.vertex(0)]), ..Scene::default() };
    assert_eq!(scene.render(), scene.render());
    let svg = scene.render();
    // d = -2 draws 1 -> 0, d = 0 draws 1 -> 2
    assert!(svg.contains("<line x1=\"0.9000\" y1=\"0.2000\" x2=\"0.1000\" y2=\"0.1000\""));
    assert!(svg.contains("<line x1=\"0.9000\" y1=\"0.2000\" x2=\"0.4000\" y2=\"0.8000\" stroke=\"#dc0000\""));
    assert!(svg.contains("stroke=\"#00aa00\""));
}
