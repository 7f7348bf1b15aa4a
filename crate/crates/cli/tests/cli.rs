use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn radial(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radial"))
        .args(args)
        .env_remove("RADIAL_OUT")
        .output()
        .expect("spawn radial")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Small but valid ensemble settings.
#[rustfmt::skip]
const SMALL: &[&str] = &[
    "--set", "L=24",
    "--set", "H=16",
    "--set", "e=260",
    "--set", "e_checkpoints=120,260",
    "--set", "h_list=2,4",
    "--set", "h_max=4",
];

#[test]
fn grow_writes_five_checkpoints_by_default() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g");
    let res = radial(&["grow", "--seed", "3", "--out", path(&out)]);
    assert!(res.status.success(), "{}", stderr(&res));
    let mut names: Vec<_> = fs::read_dir(out.join("structures"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "e1000.edges",
            "e1500.edges",
            "e2000.edges",
            "e2500.edges",
            "e500.edges"
        ]
    );
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 1 + 2500 - 59);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"], 3);
    assert_eq!(manifest["layout_version"], 1);
    assert!(manifest["rng"].as_str().unwrap().contains("ChaCha8"));
}

#[test]
fn missing_config_is_a_usage_error() {
    let res = radial(&["grow", "--config", "/definitely/not/here.conf"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("/definitely/not/here.conf"));
}

#[test]
fn target_below_axis_is_rejected() {
    let dir = TempDir::new().unwrap();
    let res = radial(&["grow", "--set", "e=30", "--out", path(dir.path())]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("L-1"), "{}", stderr(&res));
}

#[test]
fn bad_config_line_is_reported() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, "L=60\nH=fifty\n").unwrap();
    let res = radial(&["grow", "--config", path(&cfg)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("line 2"), "{}", stderr(&res));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(radial(&["shrink"]).status.code(), Some(2));
}

#[test]
fn measure_h1_equals_degree() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g");
    assert!(radial(&["grow", "--set", "e=800", "--out", path(&g)])
        .status
        .success());
    let structure = g.join("structures/e800.edges");
    let m = dir.path().join("m");
    let res = radial(&[
        "measure",
        path(&structure),
        "--h",
        "1,3,5,10",
        "--out",
        path(&m),
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    for h in [1, 3, 5, 10] {
        assert!(m.join(format!("alpha_h{h}.csv")).exists());
        assert!(m.join(format!("borders_h{h}.csv")).exists());
    }

    let mut degree = std::collections::HashMap::new();
    for line in fs::read_to_string(&structure).unwrap().lines().skip(1) {
        let c: Vec<u32> = line.split(' ').map(|t| t.parse().unwrap()).collect();
        *degree.entry((c[0], c[1])).or_insert(0) += 1;
        *degree.entry((c[2], c[3])).or_insert(0) += 1;
    }
    let csv = fs::read_to_string(m.join("alpha_h1.csv")).unwrap();
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let site = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let alpha: f64 = f[3].parse().unwrap();
        assert!((alpha - degree[&site] as f64).abs() < 1e-9);
        rows += 1;
    }
    assert_eq!(rows, degree.len());
}

#[test]
fn malformed_structure_names_the_line() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("bad.edges");
    fs::write(
        &file,
        "# L=5 H=5 y_axis=2 e=2 seed=0 p_n=0.5\n0 2 1 2\n1 2 2\n",
    )
    .unwrap();
    let res = radial(&["measure", path(&file), "--out", path(&dir.path().join("m"))]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("line 3"), "{}", stderr(&res));

    fs::write(&file, "").unwrap();
    let res = radial(&["measure", path(&file), "--out", path(&dir.path().join("m"))]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("line 1"), "{}", stderr(&res));
}

#[test]
fn ensemble_is_reproducible_and_job_independent() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, jobs: &str| {
        let out = dir.path().join(name);
        let mut args = vec![
            "--jobs",
            jobs,
            "ensemble",
            "--runs",
            "4",
            "--seed",
            "11",
            "--out",
            path(&out),
        ];
        args.extend_from_slice(SMALL);
        let res = radial(&args);
        assert!(res.status.success(), "{}", stderr(&res));
        out
    };
    let a = run("a", "1");
    let b = run("b", "3");
    for file in [
        "histograms.csv",
        "summary.csv",
        "runs/pn0.5.csv",
        "fields/pn0.5_e260_h2.csv",
    ] {
        assert_eq!(
            fs::read(a.join(file)).unwrap(),
            fs::read(b.join(file)).unwrap(),
            "{file} differs"
        );
    }
    let header = fs::read_to_string(a.join("histograms.csv")).unwrap();
    assert!(header.starts_with("p_n,e,h,bin_lo,bin_hi,density_mean,density_std\n"));
}

#[test]
fn single_run_has_zero_spread() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("e");
    let mut args = vec!["ensemble", "--runs", "1", "--out", path(&out)];
    args.extend_from_slice(SMALL);
    assert!(radial(&args).status.success());
    for (file, std_col) in [("histograms.csv", 6), ("summary.csv", 4)] {
        let csv = fs::read_to_string(out.join(file)).unwrap();
        for line in csv.lines().skip(1) {
            let std: f64 = line.split(',').nth(std_col).unwrap().parse().unwrap();
            assert_eq!(std, 0.0, "{file}: {line}");
        }
    }
}

#[test]
fn sweep_rows_cover_every_preference_and_hierarchy() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s");
    let mut args = vec![
        "sweep",
        "--runs",
        "2",
        "--stage",
        "200",
        "--out",
        path(&out),
    ];
    args.extend_from_slice(&SMALL[..SMALL.len() - 6]);
    args.extend_from_slice(&["--set", "h_list=3,5,10", "--set", "h_max=10"]);
    let res = radial(&args);
    assert!(res.status.success(), "{}", stderr(&res));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("p_n,h,e,alpha_mean,alpha_std,n_runs"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 19 * 3);
    assert!(rows[0].starts_with("0.05,3,200,"));
    assert!(rows[rows.len() - 1].starts_with("0.95,10,200,"));
}

#[test]
fn output_root_from_environment() {
    let dir = TempDir::new().unwrap();
    let res = Command::new(env!("CARGO_BIN_EXE_radial"))
        .args(["grow", "--set", "e=200"])
        .env("RADIAL_OUT", dir.path())
        .output()
        .unwrap();
    assert!(res.status.success(), "{}", stderr(&res));
    assert!(dir.path().join("grow/structures/e200.edges").exists());
}
