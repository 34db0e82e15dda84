use std::path::{Path, PathBuf};
use std::process::Command;

use packbound::cli::run;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

fn packbound(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("packbound").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn edited(name: &str, dir: &Path, edit: impl FnOnce(&mut serde_json::Value)) -> PathBuf {
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(data_dir().join(name)).unwrap()).unwrap();
    edit(&mut v);
    let p = dir.join(name.replace('/', "_"));
    std::fs::write(&p, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    p
}

#[test]
fn rectangle_certificate_proves_768_over_413() {
    let (code, out, _) = packbound(&["verify-dual", "rect-1p859", "table9-cert"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("bound = 768/413 ≈ 1.8595642"));
    assert!(out.contains("status: PROVEN"));
}

#[test]
fn square_certificate_is_refuted_on_class_two() {
    let (code, out, _) = packbound(&["verify-dual", "squares-1p68.json", "table3-cert.json"]);
    assert_eq!(code, 1);
    assert!(out.contains("bound = 569767590/338989303 ≈ 1.6807834"));
    assert!(out.contains("status: REFUTED (class 2 heaviest"));
}

#[test]
fn negative_lambda_is_refuted() {
    let dir = tempfile::tempdir().unwrap();
    let cert = edited("table9-cert.json", dir.path(), |v| v["lambda"][0] = "-1".into());
    let (code, out, _) = packbound(&["verify-dual", "rect-1p859", cert.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("lambda1 >= 0") && out.contains("VIOLATED"));
}

#[test]
fn rectangle_scheme_is_certified_and_halving_breaks_it() {
    let (code, out, _) = packbound(&["verify-opt", "rect-1p859", "figure2-scheme"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("prefix") && l.ends_with(": PROVEN")).count(), 9);

    let dir = tempfile::tempdir().unwrap();
    let scheme = edited("figure2-scheme.json", dir.path(), |v| {
        for e in v["prefixes"][4]["entries"].as_array_mut().unwrap() {
            let b = packbound::exactnum::parse_rational(e["bins"].as_str().unwrap()).unwrap();
            e["bins"] = packbound::exactnum::format_rational(&(b / packbound::exactnum::int(2))).into();
        }
    });
    let (code, out, _) = packbound(&["verify-opt", "rect-1p859", scheme.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("prefix  5: REFUTED (coverage shortfall"));
    assert!(out.contains("prefix 5 coverage type 5: 1/2 >= 1"));
}

#[test]
fn square_scheme_reports_oversized_patterns() {
    let (code, out, _) = packbound(&["verify-opt", "squares-1p68", "table2-scheme"]);
    assert_eq!(code, 1);
    assert!(out.contains("prefix 10: PROVEN"));
    assert!(out.contains("839 anchors free for 839 sand items"));
    assert!(out.contains("limit volume 446/441 exceeds the bin"));
}

#[test]
fn primal_and_dual_lp_agree() {
    let (code, out, _) = packbound(&["solve-lp", "rect-1p859", "table7-patterns", "--form", "primal"]);
    assert_eq!(code, 0);
    assert!(out.contains("primal: R = 768/413"));
    let (code, out, _) = packbound(&["solve-lp", "rect-1p859", "table7-patterns", "--form", "dual"]);
    assert_eq!(code, 0);
    assert!(out.contains("dual: objective = 768/413"));
    let (code, out, _) = packbound(&["solve-lp", "rect-1p859", "table7-patterns"]);
    assert_eq!(code, 0);
    assert!(out.contains("strong duality: primal = dual"));
}

#[test]
fn pattern_set_without_last_type_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let pats = edited("table7-patterns.json", dir.path(), |v| {
        v["patterns"].as_array_mut().unwrap().retain(|p| p["counts"][8] == 0);
    });
    let (code, out, _) = packbound(&["solve-lp", "rect-1p859", pats.to_str().unwrap(), "--form", "primal"]);
    assert_eq!(code, 1);
    assert!(out.contains("primal LP is infeasible"));
    assert!(out.contains("coverage type 9 cannot be met"));
}

#[test]
fn primal_solution_is_tight() {
    let (code, out, _) = packbound(&["verify-primal", "rect-1p859", "table7-primal"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("all constraints tight: yes"));
}

#[test]
fn harmonic_bounds() {
    let (code, out, _) = packbound(&["bound", "harmonic", "--d", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("4045/1728 ≈ 2.34085"));
    let (_, out, _) = packbound(&["bound", "harmonic", "--d", "1"]);
    assert!(out.contains("bound = 19/12"));
    let (code, out, _) = packbound(&["bound", "harmonic", "--table6"]);
    assert_eq!(code, 0);
    for v in ["19/12", "97/48", "2.8112914", "inf"] {
        assert!(out.contains(v), "{v} missing from\n{out}");
    }
}

#[test]
fn class_bounds() {
    let (code, out, _) = packbound(&["bound", "b2"]);
    assert_eq!(code, 0);
    assert!(out.contains("(529 - sqrt(274441))/54"));
    assert!(out.contains("≈ 0.0949784") && out.contains("bound > 2.0954"));
    let (_, out, _) = packbound(&["bound", "b1", "--precision", "4"]);
    assert!(out.contains("≈ 0.2164") && out.contains("bound > 2.0043"));
}

#[test]
fn worst_case_from_params_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("params.json");
    std::fs::write(&p, r#"{ "d": 2, "y": ["2/5"], "m": ["3"] }"#).unwrap();
    let (code, out, _) = packbound(&["bound", "worst-case", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("(3) = 101/50"));
}

#[test]
fn exploration_never_proves() {
    let (code, out, _) = packbound(&["bound", "harmonic-explore", "--d", "2", "--h-max", "3"]);
    assert_eq!(code, 2);
    assert!(out.contains("limit:   R = 97/48"));
}

#[test]
fn json_reports_parse() {
    let (code, out, _) = packbound(&["--format", "json", "verify-dual", "rect-1p859", "table9-cert"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["bound"], "768/413");
    assert_eq!(v["verdict"]["status"], "proven");
    assert_eq!(v["classes"].as_array().unwrap().len(), 9);
}

#[test]
fn reports_are_deterministic() {
    let a = packbound(&["verify-dual", "squares-1p68", "table3-cert"]);
    let b = packbound(&["verify-dual", "squares-1p68", "table3-cert"]);
    assert_eq!(a, b);
}

#[test]
fn io_and_schema_errors_exit_three() {
    let (code, _, err) = packbound(&["verify-dual", "no-such-instance", "table9-cert"]);
    assert_eq!(code, 3);
    assert!(err.starts_with("error:"));
    let dir = tempfile::tempdir().unwrap();
    let bad = edited("table9-cert.json", dir.path(), |v| v["lambda"][0] = "1/0".into());
    assert_eq!(packbound(&["verify-dual", "rect-1p859", bad.to_str().unwrap()]).0, 3);
    let extra = edited("rect-1p859.json", dir.path(), |v| v["surprise"] = 1.into());
    assert_eq!(packbound(&["verify-dual", extra.to_str().unwrap(), "table9-cert"]).0, 3);
    assert_eq!(packbound(&["bound", "harmonic", "--d", "0"]).0, 3);
}

#[test]
fn binary_reads_data_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["rect-1p859.json", "table9-cert.json"] {
        std::fs::copy(data_dir().join(f), dir.path().join(f)).unwrap();
    }
    let out = Command::new(env!("CARGO_BIN_EXE_packbound"))
        .args(["verify-dual", "rect-1p859", "table9-cert"])
        .env("PACKBOUND_DATA", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = Command::new(env!("CARGO_BIN_EXE_packbound"))
        .args(["verify-dual", "squares-1p68", "table3-cert"])
        .env("PACKBOUND_DATA", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}
