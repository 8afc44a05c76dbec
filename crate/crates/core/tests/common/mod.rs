//! Golden-file cases shared by the CLI tests and the acceptance suite.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_pillowcase");

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    /// Fixture passed with `--in`.
    pub input: Option<&'static str>,
}

const SURFACES: [&str; 5] = [
    "surface_unit.json",
    "surface_acute.json",
    "surface_obtuse.json",
    "surface_clockwise.json",
    "surface_scrambled.json",
];

macro_rules! over_surfaces {
    ($prefix:literal, $args:expr) => {
        [
            Case { name: concat!($prefix, "_unit"), args: $args, input: Some(SURFACES[0]) },
            Case { name: concat!($prefix, "_acute"), args: $args, input: Some(SURFACES[1]) },
            Case { name: concat!($prefix, "_obtuse"), args: $args, input: Some(SURFACES[2]) },
            Case { name: concat!($prefix, "_clockwise"), args: $args, input: Some(SURFACES[3]) },
            Case { name: concat!($prefix, "_scrambled"), args: $args, input: Some(SURFACES[4]) },
        ]
    };
}

pub fn cases() -> Vec<Case> {
    let mut v = vec![
        Case {
            name: "build_unit",
            args: &["surface", "build", "--v1", "1,0", "--v2", "0,1", "--lambda", "1,1,1"],
            input: None,
        },
        Case {
            name: "build_acute",
            args: &["surface", "build", "--v1", "1,0", "--v2", "-0.5,0.8", "--lambda", "1.2,0.9,1.1"],
            input: None,
        },
        Case {
            name: "build_default_lambda",
            args: &["surface", "build", "--v1", "2,0.5", "--v2", "-1.5,1.2"],
            input: None,
        },
        Case {
            name: "build_clockwise",
            args: &["surface", "build", "--v1", "0,1", "--v2", "1,-0.3", "--lambda", "0.4,2.5,1.7"],
            input: None,
        },
        Case {
            name: "build_csv",
            args: &["--format", "csv", "surface", "build", "--v1", "3,-1", "--v2", "-1,2.5", "--lambda", "0.1,8,3"],
            input: None,
        },
    ];
    v.extend(over_surfaces!("validate", &["surface", "validate"]));
    v.extend(over_surfaces!("delaunay", &["delaunay", "--engine", "both"]));
    v.extend(over_surfaces!("veech", &["veech", "--lengths"]));
    v.extend([
        Case { name: "inverse_boundary", args: &["inverse"], input: Some("target_boundary.json") },
        Case { name: "inverse_symmetric", args: &["inverse"], input: Some("target_symmetric.json") },
        Case { name: "inverse_mixed", args: &["inverse"], input: Some("target_mixed.json") },
        Case { name: "inverse_near", args: &["inverse"], input: Some("target_near.json") },
        Case { name: "inverse_far_csv", args: &["--format", "csv", "inverse"], input: Some("target_far.json") },
        Case { name: "svg_unit", args: &["export", "svg"], input: Some("surface_unit.json") },
        Case { name: "svg_acute", args: &["export", "svg"], input: Some("surface_acute.json") },
        Case { name: "svg_clockwise", args: &["export", "svg"], input: Some("surface_clockwise.json") },
        Case { name: "svg_trace_obtuse", args: &["export", "svg"], input: Some("trace_obtuse.json") },
        Case { name: "svg_trace_scrambled", args: &["export", "svg"], input: Some("trace_scrambled.json") },
    ]);
    v
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.out"))
}

pub fn run(args: &[&str], input: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env("RUST_LOG", "off");
    if let Some(f) = input {
        cmd.arg("--in").arg(fixture(f));
    }
    cmd.output().expect("binary runs")
}

/// Outcome of one golden case: both runs identical and equal to the stored
/// file. With `PILLOWCASE_BLESS=1` the stored file is rewritten first.
pub fn check(case: &Case) -> Result<(), String> {
    let a = run(case.args, case.input);
    let b = run(case.args, case.input);
    if !a.status.success() {
        return Err(format!("{}: exit {:?}: {}", case.name, a.status.code(), String::from_utf8_lossy(&a.stderr)));
    }
    if a.stdout != b.stdout {
        return Err(format!("{}: two runs differ", case.name));
    }
    let path = golden(case.name);
    if std::env::var_os("PILLOWCASE_BLESS").is_some() {
        std::fs::write(&path, &a.stdout).map_err(|e| e.to_string())?;
    }
    let stored = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if stored != a.stdout {
        return Err(format!("{}: output differs from {}", case.name, path.display()));
    }
    Ok(())
}
