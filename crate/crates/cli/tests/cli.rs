//! End-to-end checks of the binary: file round trips, exit codes,
//! determinism of generated files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use workbench_cli::{experiment, io};
use workbench_core::families::{generate_qn_pcr_refutation, generate_qn_sos_refutation};
use workbench_core::{pcr, sos, Rat};

fn workbench(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_workbench"))
        .args(args)
        .current_dir(dir)
        .env_remove("WORKBENCH_MAX_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmpdir() -> tempfile::TempDir {
    tempfile::tempdir().expect("tempdir")
}

#[test]
fn round_trip_generate_verify_metrics() {
    let dir = tmpdir();
    for n in 1..=4u32 {
        for kind in ["pcr", "sos"] {
            let file = format!("q{n}.{kind}");
            let gen = workbench(
                &["gen", "proof", "--system", "qn", "--n", &n.to_string(), "--kind", kind, "-o", &file],
                dir.path(),
            );
            assert!(gen.status.success(), "gen failed: {}", String::from_utf8_lossy(&gen.stderr));

            let verify = workbench(&["verify", kind, &file], dir.path());
            assert_eq!(verify.status.code(), Some(0), "{}", stdout(&verify));

            // Reparsed metrics equal the in-memory metrics.
            let path = dir.path().join(&file);
            match kind {
                "pcr" => {
                    let reloaded = io::load_pcr(&path).unwrap();
                    let fresh = generate_qn_pcr_refutation::<Rat>(n);
                    assert_eq!(reloaded, fresh);
                    assert_eq!(
                        pcr::pcr_metrics(&reloaded).unwrap(),
                        pcr::pcr_metrics(&fresh).unwrap()
                    );
                }
                _ => {
                    let reloaded = io::load_sos(&path).unwrap();
                    let fresh = generate_qn_sos_refutation::<Rat>(n);
                    assert_eq!(reloaded, fresh);
                    assert_eq!(
                        sos::sos_metrics(&reloaded).unwrap(),
                        sos::sos_metrics(&fresh).unwrap()
                    );
                }
            }
        }
    }
}

#[test]
fn generated_files_are_byte_identical() {
    let dir = tmpdir();
    for args in [
        vec!["gen", "system", "--family", "qn", "--n", "2", "-o"],
        vec!["gen", "proof", "--system", "qn", "--n", "2", "--kind", "pcr", "-o"],
        vec!["gen", "proof", "--system", "qn", "--n", "2", "--kind", "sos", "-o"],
    ] {
        let mut first = args.clone();
        first.push("a.out");
        let mut second = args.clone();
        second.push("b.out");
        assert!(workbench(&first, dir.path()).status.success());
        assert!(workbench(&second, dir.path()).status.success());
        let a = std::fs::read(dir.path().join("a.out")).unwrap();
        let b = std::fs::read(dir.path().join("b.out")).unwrap();
        assert_eq!(a, b, "nondeterministic output for {args:?}");
    }
}

#[test]
fn corrupted_certificate_fails_with_residual() {
    let dir = tmpdir();
    assert!(workbench(
        &["gen", "proof", "--system", "qn", "--n", "1", "--kind", "sos", "-o", "good.sos"],
        dir.path()
    )
    .status
    .success());
    let path = dir.path().join("good.sos");
    let text = std::fs::read_to_string(&path).unwrap();
    let corrupted = text.replace("[TARGET]\n-1", "[TARGET]\n-2");
    assert_ne!(text, corrupted);
    std::fs::write(dir.path().join("bad.sos"), corrupted).unwrap();

    let out = workbench(&["verify", "sos", "bad.sos"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("residual"), "{}", stdout(&out));
}

#[test]
fn corrupted_line_proof_reports_the_line() {
    let dir = tmpdir();
    assert!(workbench(
        &["gen", "proof", "--system", "qn", "--n", "1", "--kind", "pcr", "-o", "good.pcr"],
        dir.path()
    )
    .status
    .success());
    let text = std::fs::read_to_string(dir.path().join("good.pcr")).unwrap();
    // Break the first lift line's polynomial.
    let corrupted = text.replacen("x[1,1]^2", "2*x[1,1]^2", 1);
    assert_ne!(text, corrupted);
    std::fs::write(dir.path().join("bad.pcr"), corrupted).unwrap();

    let out = workbench(&["verify", "pcr", "bad.pcr"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("line"), "{}", stdout(&out));
}

#[test]
fn exit_codes_for_usage_errors() {
    let dir = tmpdir();
    let out = workbench(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = workbench(&["verify", "pcr", "no-such-file.pcr"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = workbench(&["experiment", "--n-max", "9", "-o", "x.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = workbench(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn experiment_writes_one_row_per_cell() {
    let dir = tmpdir();
    let out = workbench(&["experiment", "--n-max", "3", "-o", "growth.csv"], dir.path());
    assert!(out.status.success());
    let rows = experiment::read_rows(&dir.path().join("growth.csv")).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.verify_ok && r.degree == 2));
    let n1_sos = rows.iter().find(|r| r.n == 1 && r.system == "sos").unwrap();
    assert_eq!(n1_sos.max_coeff_bits, 3);
}

#[test]
fn bit_cap_aborts_in_a_controlled_way() {
    let dir = tmpdir();
    let out = Command::new(env!("CARGO_BIN_EXE_workbench"))
        .args(["experiment", "--n-max", "4", "-o", "growth.csv"])
        .current_dir(dir.path())
        .env("WORKBENCH_MAX_BITS", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("WORKBENCH_MAX_BITS"));
}

#[test]
fn bounded_answers_exactly_at_the_threshold() {
    let dir = tmpdir();
    assert!(workbench(
        &["gen", "proof", "--system", "qn", "--n", "3", "--kind", "pcr", "-o", "q3.pcr"],
        dir.path()
    )
    .status
    .success());
    let yes = workbench(&["bounded", "pcr", "q3.pcr", "--R", "256"], dir.path());
    assert_eq!(stdout(&yes).trim(), "true");
    let no = workbench(&["bounded", "pcr", "q3.pcr", "--R", "255"], dir.path());
    assert_eq!(stdout(&no).trim(), "false");
}

#[test]
fn psd_command_decides_matrix_files() {
    let dir = tmpdir();
    std::fs::write(dir.path().join("ok.mat"), "2\n1 0\n0 1\n").unwrap();
    std::fs::write(dir.path().join("bad.mat"), "2\n0 1\n1 0\n").unwrap();
    let yes = workbench(&["pe", "psd", "--matrix", "ok.mat"], dir.path());
    assert_eq!(stdout(&yes).trim(), "true");
    let no = workbench(&["pe", "psd", "--matrix", "bad.mat"], dir.path());
    assert_eq!(stdout(&no).trim(), "false");
}

#[test]
fn bound_cert_output_verifies_through_the_cli() {
    let dir = tmpdir();
    std::fs::write(dir.path().join("set.txt"), "pairs: 2\n1\nx[1]\nx[2]\n").unwrap();
    let out = workbench(
        &[
            "bound-cert",
            "--poly",
            "-3*x[1] + 1/2*x[1]*x[2]",
            "--monomials",
            "set.txt",
            "-o",
            "bound.sos",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("bound: 1/2"));
    let verify = workbench(&["verify", "sos", "bound.sos"], dir.path());
    assert_eq!(verify.status.code(), Some(0));
}

#[test]
fn pe_product_runs_from_a_monomial_file() {
    let dir = tmpdir();
    std::fs::write(dir.path().join("mono.txt"), "1\nx[1,1]\nx[1,2]\n").unwrap();
    let out = workbench(
        &["pe", "product", "--n", "1", "--monomials", "mono.txt", "--seed", "7"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("(vii) moment matrix PSD: ok"));
}

#[test]
fn gen_system_matches_library_output() {
    let dir = tmpdir();
    assert!(workbench(&["gen", "system", "--family", "qn", "--n", "2", "-o", "q2.sys"], dir.path())
        .status
        .success());
    let sys = io::load_system(&PathBuf::from(dir.path().join("q2.sys"))).unwrap();
    assert_eq!(sys, workbench_core::families::qn_system::<Rat>(2));
}
