use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hgbc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgbc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn mesh_square_one_refinement() {
    let dir = tempfile::tempdir().unwrap();
    let o = hgbc(&[
        "mesh",
        "--polygon",
        "square",
        "--refine",
        "1",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("computation.json")).unwrap())
            .unwrap();
    assert_eq!(doc["triangles"].as_array().unwrap().len(), 8);
    let stats = fs::read_to_string(dir.path().join("mesh_stats.csv")).unwrap();
    let mut lines = stats.lines();
    assert_eq!(
        lines.next().unwrap(),
        "mesh,vertices,triangles,boundary_vertices,interior_vertices,beta,size"
    );
    assert!(lines.next().unwrap().starts_with("design,4,2,4,0,"));
    let comp = lines.next().unwrap();
    assert!(comp.starts_with("computation,9,8,8,1,"), "{comp}");
    // β of the right isosceles triangle: √2 / (1 − 1/√2)
    let beta: f64 = comp.split(',').nth(5).unwrap().parse().unwrap();
    let s = 2f64.sqrt();
    assert!((beta - s / (1.0 - 1.0 / s)).abs() < 1e-12);
    assert!(stdout(&o).contains("beta 4.828427"));
}

#[test]
fn self_intersecting_polygon_file_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bowtie.json");
    fs::write(&file, r#"{"vertices": [[0,0],[1,1],[1,0],[0,1]]}"#).unwrap();
    let o = hgbc(&[
        "mesh",
        "--polygon-file",
        file.to_str().unwrap(),
        "--out",
        &out_arg(&dir.path().join("o")),
    ]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert!(err.contains("edge 0 (0-1) crosses edge 2 (2-3)"), "{err}");
}

#[test]
fn invalid_arguments_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    for args in [
        vec!["gbc", "--grid", "1", "--out", &out],
        vec!["gbc", "--tol", "0", "--out", &out],
        vec!["gbc", "--refine", "0", "--out", &out],
        vec!["gbc", "--degree", "4", "--out", &out],
        vec!["gbc", "--polygon", "hexagon", "--out", &out],
    ] {
        let o = hgbc(&args);
        assert!(!o.status.success(), "{args:?}");
    }
}

#[test]
fn gbc_reports_identities_and_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let o = hgbc(&[
        "gbc",
        "--polygon",
        "lshape",
        "--degree",
        "2",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let pou: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("partition of unity residual: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(pou <= 1e-9);
    assert!(text.contains("reload check: bit-identical"));
    let timings = fs::read_to_string(dir.path().join("timings.csv")).unwrap();
    assert!(timings.starts_with("field,seconds\n"));
    assert_eq!(timings.lines().count(), 1 + 45);
    assert!(dir.path().join("gbc/manifest.json").exists());
}

#[test]
fn gbc_output_independent_of_workers() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, w) in [(&a, "1"), (&b, "3")] {
        let o = hgbc(&[
            "gbc",
            "--polygon",
            "nonconvex-quad",
            "--workers",
            w,
            "--out",
            &out_arg(dir.path()),
        ]);
        assert!(o.status.success());
    }
    let fields = |d: &Path| {
        let mut names: Vec<_> = fs::read_dir(d.join("gbc/fields"))
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        names
    };
    let names = fields(a.path());
    assert_eq!(names, fields(b.path()));
    for n in names {
        assert_eq!(
            fs::read(a.path().join("gbc/fields").join(&n)).unwrap(),
            fs::read(b.path().join("gbc/fields").join(&n)).unwrap()
        );
    }
}

#[test]
fn locality_rectangle_flags_linear_decay() {
    let dir = tempfile::tempdir().unwrap();
    let o = hgbc(&[
        "locality",
        "--polygon",
        "square",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("decay S_0000: sigma 0.7262, sub-exponential yes"),
        "{}",
        stdout(&o)
    );
    let summary = fs::read_to_string(dir.path().join("decay_summary.csv")).unwrap();
    assert!(
        summary.starts_with("field,ring_mesh,rings,sigma,k_fit,growth_flagged,sub_exponential\n")
    );
    assert!(summary.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn locality_tables_monotone_on_convex_quad() {
    let dir = tempfile::tempdir().unwrap();
    let o = hgbc(&[
        "locality",
        "--polygon",
        "convex-quad",
        "--rings",
        "1,2,3,12",
        "--interior-center",
        "5",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(dir.path().join("lvg_S_0004.csv")).unwrap();
    let errors: Vec<f64> = table
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(errors.len(), 4);
    assert!(errors.windows(2).all(|w| w[1] <= w[0]));
    assert!(errors[3] <= 1e-10);
    assert!(dir.path().join("lvg_R_0005.csv").exists());
    assert!(dir.path().join("decay/S_0000.csv").exists());
}

#[test]
fn locality_center_overrides_validated() {
    let dir = tempfile::tempdir().unwrap();
    let o = hgbc(&[
        "locality",
        "--polygon",
        "convex-quad",
        "--interior-center",
        "0",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("not an interior vertex"));
}

#[test]
fn poisson_benchmark_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = hgbc(&[
        "poisson",
        "--polygon",
        "nonconvex-quad",
        "--grid",
        "51",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let residual: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("superposition equivalence residual: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual <= 1e-9);
    let csv = fs::read_to_string(dir.path().join("poisson.csv")).unwrap();
    assert!(csv.starts_with("case,method,refinement,max_error,grid\n"));
    // 5 cases x 2 methods x 2 levels
    assert_eq!(csv.lines().count(), 1 + 20);
    let rates = fs::read_to_string(dir.path().join("rates.csv")).unwrap();
    for case in 1..=5 {
        assert!(rates
            .lines()
            .any(|l| l.starts_with(&format!("{case},gbc-superposition,0,1,"))));
    }
    let run: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(run["seed"], 20);
    assert_eq!(run["grid"], 51);
}

#[test]
fn poisson_rejects_unknown_case() {
    let dir = tempfile::tempdir().unwrap();
    let o = hgbc(&["poisson", "--cases", "6", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}
