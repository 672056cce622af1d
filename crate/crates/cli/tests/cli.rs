use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sdl_core::families::hanoi_graph;
use sdl_core::graph::Multigraph;
use tempfile::TempDir;

fn sdl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdl"))
        .args(args)
        .env("SDL_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn gen_writes_a_loadable_graph() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("h3.json");
    let o = sdl(&[
        "gen",
        "--family",
        "hanoi",
        "--level",
        "3",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let g = Multigraph::load(&out).unwrap();
    assert_eq!(g.vertex_count(), 27);
    assert_eq!(g, hanoi_graph(3).unwrap());
}

#[test]
fn sweep_reports_diameters() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g.csv");
    let o = sdl(&[
        "sweep",
        "--family",
        "grigorchuk",
        "--levels",
        "1..8",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|&h| h == name).unwrap();
    let (n_col, delta_col) = (col("n"), col("delta"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 8);
    for row in rows {
        let n: u32 = row[n_col].parse().unwrap();
        let delta: u32 = row[delta_col].parse().unwrap();
        assert_eq!(delta, (1 << n) - 1);
    }
}

#[test]
fn sweep_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = sdl(&[
            "sweep",
            "--family",
            "hanoi",
            "--levels",
            "1..4",
            "--p",
            "1.5,2",
            "--eps",
            "0.5,0.6667",
            "--seed",
            "3",
            "--out",
            path_str(out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn sweep_json_output() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("rows.json");
    let o = sdl(&[
        "sweep",
        "--family",
        "lamplighter",
        "--levels",
        "2,3",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["rows"][1]["vertices"], 24);
}

#[test]
fn bipartite_cycle_has_no_adjacency_bound() {
    let o = sdl(&[
        "verify", "--family", "cycle", "--level", "4", "--ineq", "eq8",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bipartite-degenerate"));
}

#[test]
fn verify_passes() {
    for args in [
        vec![
            "verify", "--family", "hanoi", "--level", "3", "--ineq", "thm3",
        ],
        vec![
            "verify", "--family", "hanoi", "--level", "3", "--ineq", "thm3", "--method", "lattice",
            "--eps", "0.6667",
        ],
        vec![
            "verify", "--family", "cycle", "--level", "5", "--ineq", "eq8",
        ],
        vec![
            "verify",
            "--family",
            "grigorchuk",
            "--level",
            "5",
            "--ineq",
            "eq6",
        ],
        vec![
            "verify", "--family", "cycle", "--level", "9", "--ineq", "prop6",
        ],
    ] {
        let o = sdl(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        assert!(String::from_utf8_lossy(&o.stdout).contains("pass"));
    }
}

#[test]
fn spectral_and_rho_json() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.json");
    let o = sdl(&[
        "spectral",
        "--family",
        "cycle",
        "--level",
        "6",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(fs::read_to_string(&out).unwrap().contains("lambda"));
    let out = dir.path().join("r.json");
    let o = sdl(&[
        "rho",
        "--family",
        "cycle",
        "--level",
        "6",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(fs::read_to_string(&out).unwrap().contains("exact"));
}

#[test]
fn embed_then_measure() {
    let dir = TempDir::new().unwrap();
    let emb = dir.path().join("e.json");
    let o = sdl(&[
        "embed",
        "--family",
        "hanoi",
        "--level",
        "2",
        "--method",
        "lattice",
        "--out",
        path_str(&emb),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = sdl(&[
        "distortion",
        "--family",
        "hanoi",
        "--level",
        "2",
        "--embedding",
        path_str(&emb),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn spec_file_source() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("hanoi.txt");
    fs::write(&spec, sdl_core::families::HANOI_SPEC).unwrap();
    let out = dir.path().join("g.json");
    let o = sdl(&[
        "gen",
        "--spec",
        path_str(&spec),
        "--level",
        "2",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(Multigraph::load(&out).unwrap(), hanoi_graph(2).unwrap());
}

#[test]
fn bad_inputs_exit_one() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("bad.txt");
    fs::write(&spec, "alphabet 3\na = (0 3) [1, 1, 1]\n").unwrap();
    let out = dir.path().join("g.json");
    let cases: Vec<Vec<&str>> = vec![
        vec![
            "gen",
            "--spec",
            path_str(&spec),
            "--level",
            "2",
            "--out",
            path_str(&out),
        ],
        vec![
            "gen",
            "--family",
            "basilica",
            "--level",
            "2",
            "--out",
            path_str(&out),
        ],
        vec![
            "gen",
            "--family",
            "hanoi",
            "--level",
            "9",
            "--out",
            path_str(&out),
        ],
        vec!["frobnicate"],
        vec![
            "sweep",
            "--family",
            "hanoi",
            "--levels",
            "4..1",
            "--out",
            path_str(&out),
        ],
        vec![
            "gen",
            "--graph",
            "/nonexistent/graph.json",
            "--out",
            path_str(&out),
        ],
    ];
    for args in cases {
        let o = sdl(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
    assert!(!out.exists());
}

#[test]
fn help_exits_zero() {
    assert_eq!(sdl(&["--help"]).status.code(), Some(0));
}
