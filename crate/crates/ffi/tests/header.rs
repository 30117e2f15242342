use std::path::{Path, PathBuf};
use std::process::Command;

const HEADER: &str = include_str!("../include/bopert.h");
const SOURCE: &str = include_str!("../src/lib.rs");

#[test]
fn header_declares_every_export() {
    let exports: Vec<&str> = SOURCE
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .filter_map(|rest| rest.split('(').next())
        .collect();
    assert_eq!(exports.len(), 28);
    for name in exports {
        assert!(HEADER.contains(&format!("{name}(")), "{name} missing from header");
    }
    for ty in ["BopertField", "BopertSymbol", "BopertTrajectory", "BopertSolverParams"] {
        assert!(HEADER.contains(ty), "{ty} missing from header");
    }
    assert!(HEADER.contains("BOPERT_STATUS_OK = 0"));
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include <string.h>
#include "bopert.h"

int main(void) {
    double re[2] = {0.0, 1.0}, im[2] = {0.0, 0.0};
    BopertField *u = NULL;
    if (bopert_field_new(re, im, 2, &u) != BOPERT_STATUS_OK) return 10;
    double b = 0.0;
    if (bopert_beta(u, 2.0, 2, &b) != BOPERT_STATUS_OK || fabs(b - 0.4) > 1e-14) return 11;
    if (bopert_beta(u, 0.5, 2, &b) != BOPERT_STATUS_NOT_POSITIVE_DEFINITE) return 12;
    if (strlen(bopert_last_error()) == 0) return 13;
    BopertSymbol *a = NULL;
    if (bopert_symbol_ilw_boosted(1.0, &a) != BOPERT_STATUS_OK) return 14;
    BopertSolverParams p = bopert_solver_params_default(8);
    p.horizon = 0.01;
    BopertTrajectory *traj = NULL;
    if (bopert_evolve(u, a, &p, &traj) != BOPERT_STATUS_OK) return 15;
    if (bopert_trajectory_len(traj) != 11) return 16;
    printf("%s %.15f\n", bopert_version(), b);
    bopert_trajectory_free(traj);
    bopert_symbol_free(a);
    bopert_field_free(u);
    return 0;
}
"#;

#[test]
fn c_program_links_against_static_library() {
    let lib = target_dir().join("libbopert_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = match Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
    {
        Ok(s) => s,
        Err(e) => {
            eprintln!("skipping: no C compiler ({e})");
            return;
        }
    };
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "smoke program exited with {:?}", out.status);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("0.400000000000000"), "{stdout}");
}
