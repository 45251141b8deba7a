use std::path::Path;

use clap::Parser;
use hommeas_cli::{parse_grid, run, Cli, CSV_HEADER};

fn exec(args: &[&str]) -> anyhow::Result<String> {
    let cli = Cli::try_parse_from(std::iter::once("hommeas").chain(args.iter().copied()))?;
    let mut out = Vec::new();
    run(cli, &mut out)?;
    Ok(String::from_utf8(out).unwrap())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn build_summaries() {
    assert!(exec(&["build", "--shape", "torus", "--d", "3"])
        .unwrap()
        .starts_with("[[18,2,3]]"));
    assert!(exec(&["build", "--shape", "cylinder", "--c", "3", "--h", "3"])
        .unwrap()
        .starts_with("[[15,1,3]]"));
    let planar = exec(&["build", "--shape", "planar-fig5"]).unwrap();
    assert!(planar.starts_with("[[31,2,"), "{planar}");
}

#[test]
fn build_writes_loadable_files() {
    let dir = tempfile::tempdir().unwrap();
    let (cx, code) = (dir.path().join("c.json"), dir.path().join("code.json"));
    exec(&["build", "--d", "4", "--complex-out", p(&cx), "--code-out", p(&code)]).unwrap();
    let from_code = exec(&["distance", "--code", p(&code)]).unwrap();
    let from_complex = exec(&["distance", "--complex", p(&cx)]).unwrap();
    assert_eq!(from_code, from_complex);
    assert!(from_code.starts_with("[[32,2,4]]"));
}

#[test]
fn gadget_reports() {
    let r = exec(&["gadget", "--d", "3", "--loop", "Z1"]).unwrap();
    assert!(r.contains("m = 15, k' = 1, d_z' = 3, d_x' = 3"), "{r}");
    assert!(r.contains("generator 0: Z1 "));
    assert!(r.contains("effective X-distance: 3"));

    let r = exec(&["gadget", "--d", "5", "--loop", "Z1Z2"]).unwrap();
    assert!(r.contains("generator 0: Z1·Z2"), "{r}");
    let r = exec(&["gadget", "--d", "5", "--loop", "Z1Z2-fig8"]).unwrap();
    assert!(r.contains("rows of Γ with weight ≥ 2: 28"), "{r}");

    let r = exec(&["gadget", "--d", "3", "--loop", "Z1", "--width", "1"]).unwrap();
    assert!(r.contains("effective X-distance: 1"));
    assert!(r.contains("warning:"));

    assert!(exec(&["gadget", "--loop", "Z3"]).is_err());
}

#[test]
fn explicit_walks() {
    // Row 1 of the d = 3 torus.
    let r = exec(&["gadget", "--d", "3", "--walk", "3,4,5"]).unwrap();
    assert!(r.contains("generator 0: Z1 "), "{r}");
    assert!(exec(&["gadget", "--d", "3", "--walk", "3,4"]).is_err());
}

#[test]
fn tampered_bundle_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("g.json");
    exec(&["gadget", "--d", "3", "--bundle-out", p(&good)]).unwrap();
    let mut bundle: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    bundle.as_object_mut().unwrap().remove("cell_map");
    let gamma = bundle["gamma"].as_array_mut().unwrap();
    let row = gamma.iter().position(|r| !r.as_str().unwrap().contains('1')).unwrap();
    let mut bits: Vec<char> = gamma[row].as_str().unwrap().chars().collect();
    bits[0] = '1';
    gamma[row] = serde_json::Value::String(bits.into_iter().collect());
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&bundle).unwrap()).unwrap();
    let out = dir.path().join("out.json");
    assert!(exec(&["gadget", "--bundle", p(&bad), "--bundle-out", p(&out)]).is_err());
    assert!(!out.exists());
    assert!(exec(&["gadget", "--bundle", p(&good)]).is_ok());
}

#[test]
fn zero_trials_gives_header_only() {
    let out = exec(&["simulate", "--d", "3", "--trials", "0"]).unwrap();
    assert_eq!(out, format!("{CSV_HEADER}\n"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"shape": "cylinder", "c": 3, "h": 5}"#).unwrap();
    assert!(exec(&["--config", p(&cfg), "build"]).unwrap().starts_with("[[27,1,3]]"));
    assert!(exec(&["--config", p(&cfg), "build", "--h", "3"])
        .unwrap()
        .starts_with("[[15,1,3]]"));
    std::fs::write(&cfg, r#"{"colour": 3}"#).unwrap();
    assert!(exec(&["--config", p(&cfg), "build"]).is_err());
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for f in [&a, &b] {
        exec(&[
            "simulate",
            "--d",
            "3",
            "--p",
            "0.01,0.03",
            "--trials",
            "3000",
            "--seed",
            "9",
            "--csv-out",
            p(f),
        ])
        .unwrap();
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn shor_rounds_need_cat_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    exec(&["gadget", "--d", "3", "--bundle-out", p(&g)]).unwrap();
    assert!(exec(&["simulate", "--bundle", p(&g), "--rounds", "1", "--trials", "10"]).is_err());
    let s = dir.path().join("s.json");
    exec(&["gadget", "--kind", "shor", "--d", "3", "--bundle-out", p(&s)]).unwrap();
    let csv = exec(&[
        "simulate",
        "--bundle",
        p(&s),
        "--rounds",
        "3",
        "--p",
        "0",
        "--trials",
        "50",
    ])
    .unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("0,50,0,0,"));
    assert!(exec(&["simulate", "--bundle", p(&s), "--rounds", "2", "--trials", "10"]).is_err());
}

#[test]
fn grids() {
    assert_eq!(parse_grid("0.1,0.2").unwrap(), vec![0.1, 0.2]);
    let g = parse_grid("0.001:0.1:log10:3").unwrap();
    assert_eq!(g, vec![0.001, 0.01, 0.1]);
    assert_eq!(parse_grid("0:0.2:lin:3").unwrap(), vec![0.0, 0.1, 0.2]);
    assert_eq!(parse_grid("0.001:0.05:log10").unwrap().len(), 5);
    assert!(parse_grid("0:0.1:log10").is_err());
    assert!(parse_grid("1.5").is_err());
}

#[test]
fn size_report_lists_every_preset() {
    let out = exec(&["report", "--sizes", "3"]).unwrap();
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("Z1,3,2,15,18,3,"));
}
