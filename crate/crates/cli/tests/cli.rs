use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use casimir_cli::record::{read_csv, read_json};
use tempfile::tempdir;

const BIN: &str = env!("CARGO_BIN_EXE_casimir");

fn casimir(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("CASIMIR_CONFIG").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const GOLD: [&str; 8] = [
    "--radius",
    "1e-4",
    "--distance",
    "1e-6",
    "--sphere",
    "plasma:wp=9eV",
    "--plate",
    "plasma:wp=9eV",
];

#[test]
fn bad_configuration_exits_2() {
    let o = casimir(&["compute", "--radius", "1e-4", "--distance", "-1e-6", "--sphere", "pc", "--plate", "pc"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let o = casimir(&["compute", "--radius", "1e-4", "--distance", "1e-6", "--sphere", "gold", "--plate", "pc"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("sphere"), "{}", stderr(&o));
    // energy only for the exact method
    let o = casimir(&["oracle", "--quantity", "force", "--radius", "1e-6", "--distance", "1e-7", "--sphere", "pc", "--plate", "pc"]);
    assert_eq!(code(&o), 2);

    let dir = tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[geometry]\nradius = 1e-4\nbogus = 1\n").unwrap();
    let o = casimir(&["--config", path(&cfg), "compute"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bogus"), "{}", stderr(&o));
}

#[test]
fn unconverged_quadrature_exits_3_and_still_writes() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = casimir(&[
        "compute", "--radius", "1e-4", "--distance", "1e-7", "--sphere", "pc", "--plate", "pc",
        "--phi-nodes", "4", "--t-nodes", "4", "--max-refinements", "0", "-o", path(&out),
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let doc = read_csv(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc.records.len(), 1);
    assert!(doc.records[0].status.starts_with("error"));
}

#[test]
fn missing_files_exit_4() {
    let o = casimir(&["--config", "/nonexistent/run.toml", "compute"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    let o = casimir(&["compute", "--radius", "1e-4", "--distance", "1e-6", "--sphere", "table:/nonexistent/eps.txt", "--plate", "pc"]);
    assert_eq!(code(&o), 4);
    let o = casimir(&["compare", "/nonexistent/a.csv", "/nonexistent/b.csv"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn csv_and_json_carry_identical_values() {
    let dir = tempdir().unwrap();
    let (c, j) = (dir.path().join("r.csv"), dir.path().join("r.json"));
    let mut args = vec!["compute", "--quantity", "all"];
    args.extend(GOLD);
    let mut a = args.clone();
    a.extend(["-o", path(&c)]);
    assert_eq!(code(&casimir(&a)), 0);
    let mut b = args.clone();
    b.extend(["-o", path(&j), "--format", "json"]);
    assert_eq!(code(&casimir(&b)), 0);

    let dc = read_csv(&fs::read_to_string(&c).unwrap()).unwrap();
    let dj = read_json(&fs::read_to_string(&j).unwrap()).unwrap();
    assert_eq!(dc.records, dj.records);
    assert_eq!(dc.records[0].values.len(), 3);
    let text = fs::read_to_string(&c).unwrap();
    assert!(text.starts_with("# casimir "));
    assert!(text.contains("E_leading_J") && text.contains("F_ntlo_N") && text.contains("G_sum_N_per_m"));
}

#[test]
fn compare_with_itself_is_unity() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = casimir(&[
        "sweep", "--radius", "1e-4", "--d-min", "2e-7", "--d-max", "1e-6", "--points", "3",
        "--sphere", "pc", "--plate", "pc", "--method", "pfa", "-o", path(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = casimir(&["compare", path(&out), path(&out)]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 3);
    for r in rows {
        for cell in r.split(',').skip(1).filter(|c| !c.is_empty()) {
            assert_eq!(cell.parse::<f64>().unwrap(), 1.0, "{r}");
        }
    }
    assert!(text.lines().any(|l| l.starts_with("# max |ratio - 1|:") && l.trim_end().ends_with("0e0")), "{text}");
}

#[test]
fn compare_rejects_mismatched_grids() {
    let dir = tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for (p, d) in [(&a, "1e-6"), (&b, "2e-6")] {
        let o = casimir(&["compute", "--radius", "1e-4", "--distance", d, "--sphere", "pc", "--plate", "pc", "--method", "pfa", "-o", path(p)]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(code(&casimir(&["compare", path(&a), path(&b)])), 5);
}

#[test]
fn pc_series_for_perfect_conductors() {
    let o = casimir(&["compute", "--method", "pc-series", "--quantity", "all", "--radius", "1e-4", "--distance", "1e-6", "--sphere", "pc", "--plate", "pc", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc = read_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    let r = &doc.records[0];
    let pi2 = std::f64::consts::PI.powi(2);
    for (col, theta) in [
        ("theta1_E", 1.0 / 3.0 - 20.0 / pi2),
        ("theta1_F", 1.0 / 6.0 - 10.0 / pi2),
        ("theta1_G", 1.0 / 9.0 - 20.0 / (3.0 * pi2)),
    ] {
        assert!((r.get(col).unwrap() - theta).abs() < 1e-12, "{col}");
    }
    assert_eq!(r.get("E_normalized_leading"), Some(1.0));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "[run]\nmethod = \"pfa\"\nquantity = \"energy\"\n\n[geometry]\nradius = 1e-4\ndistance = 1e-6\n\n\
         [materials]\nsphere = \"pc\"\nplate = \"pc\"\n\n[output]\nformat = \"json\"\n",
    )
    .unwrap();
    let o = casimir(&["--config", path(&cfg), "compute"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let base = read_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(base.records[0].d, 1e-6);
    assert_eq!(base.records[0].get("E_normalized_leading").map(|v| (v - 1.0).abs() < 1e-6), Some(true));

    let o = casimir(&["--config", path(&cfg), "compute", "--distance", "2e-6"]);
    assert_eq!(code(&o), 0);
    let over = read_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(over.records[0].d, 2e-6);
    assert_eq!(over.records[0].method, "pfa");

    // same file through the environment
    let o = Command::new(BIN).arg("compute").env("CASIMIR_CONFIG", &cfg).output().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let env = read_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(env.records, base.records);
}

#[test]
fn sweep_is_ordered_and_deterministic() {
    let args = [
        "sweep", "--radius", "1e-4", "--d-min", "1e-7", "--d-max", "1e-6", "--points", "5",
        "--sphere", "plasma:wp=9eV", "--plate", "pc", "--jobs", "3",
    ];
    let a = casimir(&args);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    let b = casimir(&args);
    assert_eq!(a.stdout, b.stdout);
    let doc = read_csv(&String::from_utf8(a.stdout).unwrap()).unwrap();
    let d: Vec<f64> = doc.records.iter().map(|r| r.d).collect();
    assert_eq!(d.first(), Some(&1e-7));
    assert_eq!(d.last(), Some(&1e-6));
    assert!(d.windows(2).all(|w| w[0] < w[1]));
    assert!((d[1] / d[0] - 10f64.powf(0.25)).abs() < 1e-12);
}

#[test]
fn oracle_agrees_with_ntlo_at_moderate_separation() {
    let base = ["--radius", "1e-6", "--distance", "1e-7", "--sphere", "pc", "--plate", "pc", "--format", "json"];
    let mut oa = vec!["oracle", "--l-max", "40"];
    oa.extend(base);
    let o = casimir(&oa);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let exact = read_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    let mut na = vec!["compute", "--method", "pc-series", "--quantity", "energy"];
    na.extend(base);
    let series = read_json(&String::from_utf8(casimir(&na).stdout).unwrap()).unwrap();
    let e = exact.records[0].get("E_sum_J").unwrap();
    let s = series.records[0].get("E_sum_J").unwrap();
    assert!(e < 0.0 && (e / s - 1.0).abs() < 0.1, "{e} vs {s}");
}

#[test]
fn tables_print_both_families() {
    let o = casimir(&["tables", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("beta") && text.contains("lambda"));
}
