use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use tangles::cli::{build_from_spec, ConstructSpec, ElementFile};
use tangles::perfect::{perfect_report, tl2_perfect, Sign, TOL_NONDEGEN, TOL_ZERO};
use tangles::{TLContext, TLElement};

fn tangle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tangle"))
        .args(args)
        .env_remove("TANGLE_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tangle-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_element(name: &str, element: TLElement, q: f64) -> String {
    let path = scratch(name);
    fs::write(&path, serde_json::to_string(&ElementFile { element, q: Some(q) }).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn verify_exit_codes() {
    let good = write_element("tl2_q1.json", tl2_perfect(1.0, Sign::Plus).unwrap(), 1.0);
    let out = tangle(&["verify", "--input", &good]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("perfect"));

    let identity = write_element("identity2.json", TLElement::one(2), 1.0);
    assert_eq!(code(&tangle(&["verify", "--input", &identity])), 1);

    let broken = scratch("broken.json");
    fs::write(&broken, "{\"box_size\": 2, \"terms\": [").unwrap();
    let out = tangle(&["verify", "--input", broken.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    assert_eq!(code(&tangle(&["verify", "--input", "/nonexistent/file.json"])), 2);
    let zero = write_element("zero.json", TLElement::zero(2), 1.0);
    assert_eq!(code(&tangle(&["verify", "--input", &zero])), 3);
    assert_eq!(code(&tangle(&["frobnicate"])), 2);
    assert_eq!(code(&tangle(&["basis", "--k", "3", "--json"])), 0);
}

#[test]
fn construct_then_verify_is_bit_identical() {
    let spec = ConstructSpec { base: "tl2".into(), q: 1.5, sign: Sign::Plus, n: Some(3), horizontal: None };
    let spec_path = scratch("spec.json");
    fs::write(&spec_path, serde_json::to_string(&spec).unwrap()).unwrap();
    let element_path = scratch("a3.json");
    let out = tangle(&["construct", "--spec", spec_path.to_str().unwrap(), "--out", element_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let verify = tangle(&["verify", "--input", element_path.to_str().unwrap(), "--json"]);
    assert_eq!(code(&verify), 0);

    let element = build_from_spec(&spec).unwrap();
    let report = perfect_report(&element, &TLContext::new(1.5).unwrap(), TOL_ZERO, TOL_NONDEGEN).unwrap();
    let expected = format!("{}\n", serde_json::to_string(&report).unwrap());
    assert_eq!(String::from_utf8(verify.stdout).unwrap(), expected);

    let file: ElementFile = serde_json::from_str(&fs::read_to_string(&element_path).unwrap()).unwrap();
    assert_eq!(file.element, element);
}

#[test]
fn horizontal_flags_match_spec_file() {
    let flags = tangle(&["construct", "--q", "1.5", "--perm", "0,2,1,3", "--blocks", "2,2", "--json"]);
    assert_eq!(code(&flags), 0);
    let spec = scratch("horizontal.json");
    fs::write(&spec, r#"{"base": "tl2", "q": 1.5, "sign": "+", "horizontal": {"perm": [0, 2, 1, 3], "blocks": [2, 2]}}"#)
        .unwrap();
    let file = tangle(&["construct", "--spec", spec.to_str().unwrap(), "--json"]);
    assert_eq!(code(&file), 0);
    assert_eq!(flags.stdout, file.stdout);
    let bad = tangle(&["construct", "--q", "1.5", "--perm", "1,0,2,3", "--blocks", "2,2"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let runs: Vec<Vec<&str>> = vec![
        vec!["search", "--k", "3", "--q", "1.8", "--ansatz", "rotation-invariant", "--restarts", "20", "--seed", "4", "--json"],
        vec!["cubic", "search", "--preset", "g2-8th", "--restarts", "10", "--json"],
        vec!["tensor", "check", "--builtin", "ame43", "--json"],
        vec!["construct", "--q", "1.2", "--n", "4", "--json"],
    ];
    for args in runs {
        let first = tangle(&args);
        let second = tangle(&args);
        assert!(code(&first) <= 1, "{args:?}: {}", String::from_utf8_lossy(&first.stderr));
        assert!(!first.stdout.is_empty());
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
    let mut threaded = vec!["search", "--k", "3", "--q", "1.8", "--ansatz", "rotation-invariant"];
    threaded.extend(["--restarts", "20", "--seed", "4", "--json"]);
    let one = tangle(&threaded);
    threaded.extend(["--threads", "4"]);
    assert_eq!(one.stdout, tangle(&threaded).stdout);
}

#[test]
fn search_and_cubic_outcomes() {
    let out = tangle(&["search", "--k", "2", "--q", "1.2", "--restarts", "20", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["solutions"].as_array().unwrap().len(), 2);

    let out = tangle(&["search", "--k", "3", "--q", "1.0", "--ansatz", "rotation-invariant", "--restarts", "20"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("min residual"));

    let g2 = scratch("g2.json");
    fs::write(&g2, r#"{"alpha": [1, 0], "beta": [0, 0], "gamma": [0, 0], "delta": [-2, 0], "params": {"preset": "g2-8th"}}"#)
        .unwrap();
    assert_eq!(code(&tangle(&["cubic", "verify", "--input", g2.to_str().unwrap()])), 0);
    let out = tangle(&["cubic", "verify", "--input", g2.to_str().unwrap(), "--preset", "fibonacci"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("TL"));
}

#[test]
fn tensor_checks() {
    assert_eq!(code(&tangle(&["tensor", "check", "--builtin", "bell"])), 0);
    assert_eq!(code(&tangle(&["tensor", "check", "--builtin", "ghz", "--legs", "4"])), 1);
    let steane = ["tensor", "check", "--builtin", "steane", "--ordering", "7,0,1,3,2,5,4,6"];
    assert_eq!(code(&tangle(&[&steane[..], &["--mode", "planar"]].concat())), 0);
    assert_eq!(code(&tangle(&[&steane[..], &["--mode", "perfect"]].concat())), 1);
    assert_eq!(code(&tangle(&["tensor", "check"])), 2);
}
