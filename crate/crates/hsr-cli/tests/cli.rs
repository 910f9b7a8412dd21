//! End-to-end checks of the binary: the gen -> run -> verify pipeline,
//! determinism, failure diagnostics and rendering.

use std::path::PathBuf;
use std::process::{Command, Output};

fn hsr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hsr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("hsr-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn gen_run_verify_round_trip() {
    let scene = tmp("scene.txt");
    let csv = tmp("regions.csv");
    let out = hsr(&[
        "gen",
        "--n",
        "40",
        "--seed",
        "11",
        "-o",
        scene.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = hsr(&[
        "run",
        "-i",
        scene.to_str().unwrap(),
        "-o",
        csv.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("k="), "run reports k: {stderr}");
    let out = hsr(&[
        "verify",
        "-i",
        scene.to_str().unwrap(),
        "-r",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS"));
}

#[test]
fn same_seed_gives_byte_identical_scene_files() {
    let a = hsr(&["gen", "--n", "25", "--seed", "7", "--kind", "grid-stress"]);
    let b = hsr(&["gen", "--n", "25", "--seed", "7", "--kind", "grid-stress"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = hsr(&["gen", "--n", "25", "--seed", "8", "--kind", "grid-stress"]);
    assert_eq!(c.stdout, a.stdout, "grid-stress ignores the seed");
    let d = hsr(&["gen", "--n", "25", "--seed", "8"]);
    assert_ne!(d.stdout, a.stdout);
}

#[test]
fn run_on_single_rect_writes_one_row() {
    let scene = tmp("one.txt");
    std::fs::write(&scene, "7 0 10 0 5 3\n").unwrap();
    let out = hsr(&["run", "-i", scene.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = stdout.trim().lines().collect();
    assert_eq!(lines.len(), 2, "{stdout}");
    assert_eq!(lines[0], "owner_id,x_start,x_end,y_low,y_high");
    assert!(lines[1].starts_with("7,"));
}

#[test]
fn verify_rejects_tampered_regions_with_cell_diagnostic() {
    let scene = tmp("tamper-scene.txt");
    let csv = tmp("tamper.csv");
    hsr(&[
        "gen",
        "--n",
        "6",
        "--seed",
        "2",
        "-o",
        scene.to_str().unwrap(),
    ]);
    hsr(&[
        "run",
        "-i",
        scene.to_str().unwrap(),
        "-o",
        csv.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    assert!(lines.len() > 1);
    // Swap the first region's owner for a different id.
    let mut fields: Vec<String> = lines[1].split(',').map(String::from).collect();
    fields[0] = if fields[0] == "0" {
        "1".into()
    } else {
        "0".into()
    };
    lines[1] = fields.join(",");
    std::fs::write(&csv, lines.join("\n") + "\n").unwrap();
    let out = hsr(&[
        "verify",
        "-i",
        scene.to_str().unwrap(),
        "-r",
        csv.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("FAIL"), "{stdout}");
    assert!(stdout.contains("cell"), "diagnostic names a cell: {stdout}");
}

#[test]
fn parse_errors_carry_line_numbers() {
    let scene = tmp("bad.txt");
    std::fs::write(&scene, "1 0 10 0 5 3\nnot a rectangle\n").unwrap();
    let out = hsr(&["run", "-i", scene.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn render_produces_svg_from_csv_alone() {
    let scene = tmp("render-scene.txt");
    let csv = tmp("render.csv");
    let svg = tmp("render.svg");
    hsr(&[
        "gen",
        "--n",
        "12",
        "--seed",
        "4",
        "-o",
        scene.to_str().unwrap(),
    ]);
    hsr(&[
        "run",
        "-i",
        scene.to_str().unwrap(),
        "-o",
        csv.to_str().unwrap(),
    ]);
    let out = hsr(&[
        "render",
        "-r",
        csv.to_str().unwrap(),
        "-o",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(&svg).unwrap();
    assert!(body.starts_with("<svg"));
    assert!(body.contains("</svg>"));
}

#[test]
fn coalesce_only_merges_output() {
    let scene = tmp("coalesce-scene.txt");
    let plain = tmp("plain.csv");
    let merged = tmp("merged.csv");
    hsr(&[
        "gen",
        "--n",
        "30",
        "--seed",
        "9",
        "-o",
        scene.to_str().unwrap(),
    ]);
    hsr(&[
        "run",
        "-i",
        scene.to_str().unwrap(),
        "-o",
        plain.to_str().unwrap(),
    ]);
    hsr(&[
        "run",
        "-i",
        scene.to_str().unwrap(),
        "-o",
        merged.to_str().unwrap(),
        "--coalesce",
    ]);
    let plain_rows = std::fs::read_to_string(&plain).unwrap().lines().count();
    let merged_rows = std::fs::read_to_string(&merged).unwrap().lines().count();
    assert!(merged_rows <= plain_rows);
    // The merged output still verifies.
    let out = hsr(&[
        "verify",
        "-i",
        scene.to_str().unwrap(),
        "-r",
        merged.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn bench_prints_one_row_per_size() {
    let out = hsr(&["bench", "--min-exp", "5", "--max-exp", "7", "--seed", "1"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<&str> = stdout.trim().lines().collect();
    assert_eq!(rows.len(), 4, "{stdout}"); // header + 3 sizes
    assert!(rows[1].trim_start().starts_with("32"));
}

#[test]
fn slab_override_changes_slab_count_not_output() {
    let scene = tmp("slabs-scene.txt");
    let a = tmp("slabs-a.csv");
    let b = tmp("slabs-b.csv");
    hsr(&[
        "gen",
        "--n",
        "20",
        "--seed",
        "5",
        "-o",
        scene.to_str().unwrap(),
    ]);
    hsr(&[
        "run",
        "-i",
        scene.to_str().unwrap(),
        "-o",
        a.to_str().unwrap(),
    ]);
    let out = hsr(&[
        "run",
        "-i",
        scene.to_str().unwrap(),
        "-o",
        b.to_str().unwrap(),
        "--slab-size-override",
        "2",
    ]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("slabs=20"), "{stderr}");
    for csv in [&a, &b] {
        let out = hsr(&[
            "verify",
            "-i",
            scene.to_str().unwrap(),
            "-r",
            csv.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
}

#[test]
fn counters_dump_is_json() {
    let scene = tmp("counters-scene.txt");
    let json = tmp("counters.json");
    hsr(&[
        "gen",
        "--n",
        "15",
        "--seed",
        "3",
        "-o",
        scene.to_str().unwrap(),
    ]);
    let out = hsr(&[
        "run",
        "-i",
        scene.to_str().unwrap(),
        "-o",
        tmp("counters-regions.csv").to_str().unwrap(),
        "--counters",
        json.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(&json).unwrap();
    let value: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert!(value["regions"].is_u64());
    assert!(value["aux_peak"].is_u64());
}

#[test]
fn non_finite_coordinates_are_rejected() {
    let scene = tmp("naughty.txt");
    std::fs::write(&scene, "1 0 inf 0 5 3
").unwrap();
    let out = hsr(&["run", "-i", scene.to_str().unwrap()]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("non-finite"), "{stderr}");
}

#[test]
fn debug_checks_env_var_is_accepted() {
    let scene = tmp("dbg-scene.txt");
    hsr(&[
        "gen",
        "--n",
        "10",
        "--seed",
        "6",
        "-o",
        scene.to_str().unwrap(),
    ]);
    let out = Command::new(env!("CARGO_BIN_EXE_hsr"))
        .args(["run", "-i", scene.to_str().unwrap()])
        .env("HSR_DEBUG_CHECKS", "1")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
