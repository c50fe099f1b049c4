use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use drm::pgm::{write_binary, Graymap};
use drm::roadmap;
use drm::scenario::Scenario;
use drm_core::drm::Edge;
use drm_core::{Config2, RelaxedDrm};
use tempfile::TempDir;

fn drm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("maps").join(name)
}

/// 2 m x 2 m at 5 cm, split by a wall at x = 1 m with a 10 cm door at
/// y = 1 m. Vertices sit left of, inside, and right of the door; both
/// edges point left to right.
fn two_rooms(dir: &Path) -> (PathBuf, PathBuf) {
    let (w, h) = (40, 40);
    let mut pixels = vec![255u8; w * h];
    for row in 0..h {
        if row != 19 && row != 20 {
            pixels[row * w + 19] = 0;
            pixels[row * w + 20] = 0;
        }
    }
    let map = dir.join("rooms.pgm");
    write_binary(fs::File::create(&map).unwrap(), &Graymap { width: w, height: h, pixels }).unwrap();
    let g = RelaxedDrm::from_parts(
        vec![Config2::new(0.5, 1.0), Config2::new(1.0, 1.0), Config2::new(1.5, 1.0)],
        vec![Edge { u: 0, v: 1, d: 5.0 }, Edge { u: 1, v: 2, d: 5.0 }],
        "rooms.pgm".into(),
    )
    .unwrap();
    let rm = dir.join("rooms.drm");
    fs::write(&rm, roadmap::serialize(&g, 0.05)).unwrap();
    (map, rm)
}

fn optimize(dir: &Path, name: &str, batches: &str) -> (PathBuf, PathBuf, Output) {
    let out = dir.join(format!("{name}.drm"));
    let o = drm(&[
        "optimize",
        "--map",
        p(&bundled("z.pgm")),
        "--resolution",
        "0.04",
        "--vertices",
        "20",
        "--batches",
        batches,
        "--batch-size",
        "8",
        "--eval-set",
        "8",
        "--seed",
        "3",
        "--out",
        p(&out),
    ]);
    let metrics = out.with_extension("metrics.csv");
    (out, metrics, o)
}

#[test]
fn optimize_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let (a, am, o) = optimize(dir.path(), "a", "5");
    assert!(o.status.success(), "{}", stderr(&o));
    let (b, bm, o) = optimize(dir.path(), "b", "5");
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::read(&am).unwrap(), fs::read(&bm).unwrap());

    let parsed = roadmap::parse(&fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(parsed.graph.vertex_count(), 20);
    assert_eq!(parsed.map_id, "z.pgm");
    assert_eq!(parsed.resolution, 0.04);
    let metrics = fs::read_to_string(&am).unwrap();
    assert_eq!(metrics.lines().count(), 6);
    assert!(metrics.starts_with("batch,batch_cost,feasible,grad_norm,eval_cost\n0,"));

    let manifest = fs::read_to_string(dir.path().join("a.drm.manifest.txt")).unwrap();
    assert!(manifest.contains("seed: 3\n"));
    assert!(manifest.contains("param vertices: 20\n"));
    assert!(manifest.contains("z.pgm: sha256 "));
    assert!(dir.path().join("a.metrics.csv.manifest.txt").exists());
}

#[test]
fn zero_batches_writes_the_initial_roadmap() {
    let dir = TempDir::new().unwrap();
    let (rm, metrics, o) = optimize(dir.path(), "zero", "0");
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(metrics).unwrap(), "batch,batch_cost,feasible,grad_norm,eval_cost\n");
    let parsed = roadmap::parse(&fs::read_to_string(rm).unwrap()).unwrap();
    assert!(parsed.graph.edges().iter().all(|e| e.d == 0.0));
}

#[test]
fn frames_are_written_on_schedule() {
    let dir = TempDir::new().unwrap();
    let frames = dir.path().join("frames");
    let out = dir.path().join("f.drm");
    let o = drm(&[
        "optimize",
        "--map",
        p(&bundled("o.pgm")),
        "--resolution",
        "0.04",
        "--vertices",
        "15",
        "--batches",
        "5",
        "--batch-size",
        "4",
        "--eval-set",
        "4",
        "--out",
        p(&out),
        "--frames-dir",
        p(&frames),
        "--frame-every",
        "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut names: Vec<String> = fs::read_dir(&frames)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".svg"))
        .collect();
    names.sort();
    assert_eq!(names, ["frame_000000.svg", "frame_000002.svg", "frame_000004.svg"]);
    let svg = fs::read_to_string(frames.join("frame_000002.svg")).unwrap();
    assert!(svg.starts_with("<?xml") && svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn missing_or_malformed_inputs_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.drm");
    let o = drm(&["optimize", "--map", "/nonexistent.pgm", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/nonexistent.pgm"));

    let bad = dir.path().join("bad.pgm");
    fs::write(&bad, b"P2 2 2 255 0 0 0").unwrap();
    let o = drm(&["optimize", "--map", p(&bad), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("expected 4 pixels, found 3"), "{}", stderr(&o));

    let rm = dir.path().join("bad.drm");
    fs::write(&rm, "DRMv1\nmap - 0.1\nvertices 1\n0 0 zero\nedges 0\n").unwrap();
    let o = drm(&["export", "--roadmap", p(&rm), "--out", p(&dir.path().join("x.svg"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 4: y:"), "{}", stderr(&o));

    let o = drm(&["optimize", "--map", p(&bundled("z.pgm")), "--out", p(&out), "--batch-size", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());

    assert_eq!(drm(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn query_follows_edge_directions() {
    let dir = TempDir::new().unwrap();
    let (map, rm) = two_rooms(dir.path());
    let q = |start: &str, goal: &str, hard: bool| {
        let mut args = vec!["query", "--map", p(&map), "--roadmap", p(&rm), "--start", start, "--goal", goal];
        if hard {
            args.push("--hard");
        }
        drm(&args)
    };

    let o = q("0.5,0.2", "1.5,0.2", true);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("waypoints 0 1 2\n"), "{text}");
    // both tails 0.8 m: 2 * 3 * (0.64 + 0.8) plus 1 m of edges
    let hard: f64 = text.lines().find_map(|l| l.strip_prefix("hard_cost ")).unwrap().parse().unwrap();
    assert!((hard - 9.64).abs() < 1e-9, "{hard}");

    let o = q("1.5,0.2", "0.5,0.2", true);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("infeasible under edge directions"));

    // the relaxed graph still allows it, at a price
    let o = q("1.5,0.2", "0.5,0.2", false);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("waypoints 2 1 0\n"));
    assert!(stdout(&o).contains("hard_cost infeasible under edge directions\n"));
}

#[test]
fn degenerate_query_reports_both_tails() {
    let dir = TempDir::new().unwrap();
    let (map, rm) = two_rooms(dir.path());
    let svg = dir.path().join("q.svg");
    let o = drm(&[
        "query", "--map", p(&map), "--roadmap", p(&rm), "--start", "0.5,0.6", "--goal", "0.5,0.6", "--svg", p(&svg),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("waypoints 0\n"), "{text}");
    let tail = |key: &str| -> f64 {
        text.lines().find_map(|l| l.strip_prefix(key)).unwrap().parse().unwrap()
    };
    assert!((tail("start_tail ") - 0.4).abs() < 1e-12);
    assert!((tail("goal_tail ") - 0.4).abs() < 1e-12);
    assert!(fs::read_to_string(&svg).unwrap().contains("class=\"path\""));
    assert!(dir.path().join("q.svg.manifest.txt").exists());
}

#[test]
fn unreachable_start_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let (map, rm) = two_rooms(dir.path());
    // inside the wall
    let o = drm(&["query", "--map", p(&map), "--roadmap", p(&rm), "--start", "0.97,0.3", "--goal", "1.5,0.2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("start"));
}

#[test]
fn export_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (map, rm) = two_rooms(dir.path());
    let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
    for out in [&a, &b] {
        let o = drm(&["export", "--map", p(&map), "--roadmap", p(&rm), "--out", p(out)]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let svg = fs::read(&a).unwrap();
    assert_eq!(svg, fs::read(&b).unwrap());
    let svg = String::from_utf8(svg).unwrap();
    assert_eq!(svg.matches("<line").count(), 2);
    assert_eq!(svg.matches("<circle").count(), 3);
    assert!(svg.contains("fill=\"#202020\""));
}

#[test]
fn export_of_edgeless_roadmap_draws_vertices_only() {
    let dir = TempDir::new().unwrap();
    let rm = dir.path().join("v.drm");
    fs::write(&rm, "DRMv1\nmap - 0.05\nvertices 2\n0 0.5 0.5\n1 1 1\nedges 0\n").unwrap();
    let out = dir.path().join("v.svg");
    let o = drm(&["export", "--roadmap", p(&rm), "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let svg = fs::read_to_string(out).unwrap();
    assert_eq!(svg.matches("<circle").count(), 2);
    assert!(!svg.contains("<line") && !svg.contains("<polygon"));
}

#[test]
fn evaluate_mapf_single_agent_grid() {
    let dir = TempDir::new().unwrap();
    let (map, rm) = two_rooms(dir.path());
    let out = dir.path().join("results.csv");
    let o = drm(&[
        "evaluate", "mapf", "--roadmap", p(&rm), "--map", p(&map), "--graph", "grid", "--agents", "1", "--runs", "5",
        "--out", p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut reader = csv::Reader::from_path(&out).unwrap();
    assert_eq!(
        reader.headers().unwrap(),
        vec![
            "graph_kind",
            "agents",
            "run",
            "seed",
            "success",
            "avg_arrival",
            "makespan",
            "compute_seconds",
            "conflicts_resolved"
        ]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| &r[0] == "grid" && &r[4] == "true"));
    let summary = fs::read_to_string(out.with_extension("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 2);
    assert!(summary.lines().nth(1).unwrap().starts_with("grid,1,5,1,"));
}

#[test]
fn evaluate_mapf_groups_by_kind_and_agent_count() {
    let dir = TempDir::new().unwrap();
    let (map, rm) = two_rooms(dir.path());
    let out = dir.path().join("r.csv");
    let o = drm(&[
        "evaluate", "mapf", "--roadmap", p(&rm), "--map", p(&map), "--graph", "odrm,udrm,grid", "--agents", "1,2",
        "--runs", "2", "--time-limit", "5", "--out", p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = fs::read_to_string(out.with_extension("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 7);

    let o = drm(&["evaluate", "mapf", "--roadmap", p(&rm), "--graph", "grid", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--map"));
}

#[test]
fn evaluate_flow_has_one_row_per_seed_and_kind() {
    let dir = TempDir::new().unwrap();
    let (_, rm) = two_rooms(dir.path());
    let out = dir.path().join("flow.csv");
    let o = drm(&[
        "evaluate", "flow", "--roadmap", p(&rm), "--agents", "2", "--radius", "0.2", "--seeds", "4", "--out", p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "graph_kind,agents,radius,seed,events,steps");
    assert_eq!(lines.len(), 1 + 2 * 4);
    assert!(lines[1].starts_with("odrm,") && lines[5].starts_with("udrm,"));
}

#[test]
fn bundled_maps_match_their_generators() {
    for s in Scenario::ALL {
        let bytes = fs::read(bundled(&format!("{}.pgm", s.name()))).unwrap();
        assert_eq!(drm::pgm::parse(&bytes).unwrap(), s.raster(), "{}", s.name());
    }
}
