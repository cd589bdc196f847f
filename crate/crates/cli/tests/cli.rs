use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use brach_cli::json::{JsonComplexMatrix, JsonSample, StateFile, TrajectoryFile};
use proptest::prelude::*;
use serde_json::Value;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn brach(args: &[&str]) -> (i32, String) {
    let mut argv = vec!["brach"];
    argv.extend_from_slice(args);
    let (code, stdout, _) = brach_cli::run(argv);
    (code, stdout)
}

fn value<'a>(stdout: &'a str, key: &str) -> &'a str {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in\n{stdout}"))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let f = Self { dir };
        f.file("zero.json", r#"{"n":2,"amplitudes":[[1,0],[0,0]]}"#);
        f.file("one.json", r#"{"n":2,"amplitudes":[[0,0],[1,0]]}"#);
        f.file("one_phase.json", r#"{"n":2,"amplitudes":[[0,0],[0,-1]]}"#);
        f.file("zero3.json", r#"{"n":3,"amplitudes":[[1,0],[0,0],[0,0]]}"#);
        f.file(
            "sy.json",
            r#"{"n":2,"rows":[[[0,0],[0,-1]],[[0,1],[0,0]]],"kind":"hermitian"}"#,
        );
        f.file(
            "sxz.json",
            r#"{"n":2,"rows":[[[1,0],[1,0]],[[1,0],[-1,0]]],"kind":"hermitian"}"#,
        );
        f.file(
            "sz.json",
            r#"{"n":2,"rows":[[[1,0],[0,0]],[[0,0],[-1,0]]],"kind":"hermitian"}"#,
        );
        f
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        write(self.dir.path(), name, text)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

#[test]
fn synthesize_qubit() {
    let f = Fixture::new();
    let out = f.path("ham.json");
    let (code, stdout) = brach(&[
        "synthesize",
        "--from",
        p(&f.path("zero.json")),
        "--to",
        p(&f.path("one.json")),
        "--energy",
        "1",
        "--out",
        p(&out),
    ]);
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(value(&stdout, "T").parse::<f64>().unwrap(), FRAC_PI_2);
    let m: JsonComplexMatrix =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let h = m.to_matrix().unwrap();
    let expected = [[0.0, 0.0], [0.0, -1.0], [0.0, 1.0], [0.0, 0.0]];
    for (z, e) in h.transpose().iter().zip(expected) {
        assert!((z.re - e[0]).abs() < 1e-15 && (z.im - e[1]).abs() < 1e-15);
    }
}

#[test]
fn synthesize_family_keeps_the_time() {
    let f = Fixture::new();
    f.file("a.json", r#"{"n":3,"amplitudes":[[0.6,0],[0,0.8],[0,0]]}"#);
    f.file(
        "b.json",
        r#"{"n":3,"amplitudes":[[0,0],[0.28,0],[0,0.96]]}"#,
    );
    let (a, b) = (f.path("a.json"), f.path("b.json"));
    let run = |extra: &[&str], out: &str| {
        let out = f.path(out);
        let mut args = vec![
            "synthesize",
            "--from",
            p(&a),
            "--to",
            p(&b),
            "--energy",
            "0.7",
            "--out",
            p(&out),
        ];
        args.extend_from_slice(extra);
        let (code, stdout) = brach(&args);
        assert_eq!(code, 0, "{stdout}");
        (
            value(&stdout, "T").to_string(),
            std::fs::read_to_string(&out).unwrap(),
        )
    };
    let (t_core, h_core) = run(&[], "core.json");
    let (t_family, h_family) = run(&["--family-seed", "9"], "family.json");
    assert_eq!(t_core, t_family);
    assert_ne!(h_core, h_family);
}

#[test]
fn synthesize_errors() {
    let f = Fixture::new();
    let out = f.path("ham.json");
    let (code, stdout) = brach(&[
        "synthesize",
        "--from",
        p(&f.path("one.json")),
        "--to",
        p(&f.path("one_phase.json")),
        "--energy",
        "1",
        "--out",
        p(&out),
    ]);
    assert_eq!(code, 4);
    assert_eq!(value(&stdout, "T"), "0.0");

    let (code, _) = brach(&[
        "synthesize",
        "--from",
        p(&f.path("zero.json")),
        "--to",
        p(&f.path("zero3.json")),
        "--energy",
        "1",
        "--out",
        p(&out),
    ]);
    assert_eq!(code, 3);

    let broken = f.file("broken.json", "{\"n\":2,");
    let (code, _) = brach(&[
        "synthesize",
        "--from",
        p(&broken),
        "--to",
        p(&f.path("one.json")),
        "--energy",
        "1",
        "--out",
        p(&out),
    ]);
    assert_eq!(code, 2);

    let (code, _) = brach(&[
        "synthesize",
        "--from",
        p(&f.path("zero.json")),
        "--to",
        p(&f.path("one.json")),
        "--energy",
        "-1",
        "--out",
        p(&out),
    ]);
    assert_eq!(code, 2);
    let (code, _) = brach(&["synthesize", "--from", p(&f.path("zero.json"))]);
    assert_eq!(code, 2);
}

#[test]
fn check_verdicts_and_exit_codes() {
    let f = Fixture::new();
    let state = f.path("zero.json");
    let cases = [
        ("sy.json", 0, "Optimal"),
        ("sxz.json", 1, "Suboptimal"),
        ("sz.json", 5, "Stationary"),
    ];
    for (ham, code, verdict) in cases {
        let (c, stdout) = brach(&["check", "--ham", p(&f.path(ham)), "--state", p(&state)]);
        assert_eq!(c, code, "{ham}: {stdout}");
        assert_eq!(value(&stdout, "verdict"), verdict);
    }
    let (_, stdout) = brach(&[
        "check",
        "--ham",
        p(&f.path("sxz.json")),
        "--state",
        p(&state),
    ]);
    assert_eq!(value(&stdout, "delta_e").parse::<f64>().unwrap(), 1.0);
    assert!((value(&stdout, "delta_e_max").parse::<f64>().unwrap() - 2f64.sqrt()).abs() < 1e-15);

    let (c, _) = brach(&[
        "check",
        "--ham",
        p(&f.path("sy.json")),
        "--state",
        p(&f.path("zero3.json")),
    ]);
    assert_eq!(c, 3);
    let skew = f.file(
        "skew.json",
        r#"{"n":2,"rows":[[[0,0],[-1,0]],[[1,0],[0,0]]],"kind":"skew-hermitian"}"#,
    );
    let (c, _) = brach(&["check", "--ham", p(&skew), "--state", p(&state)]);
    assert_eq!(c, 2);
}

#[test]
fn equigeodesic_examples() {
    let f = Fixture::new();
    let in_m = f.file(
        "m.json",
        r#"{"n":3,"rows":[[[0,0],[-1,0],[0,0]],[[1,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]]],"kind":"skew-hermitian"}"#,
    );
    let truthy = f.file(
        "t.json",
        r#"{"n":3,"rows":[[[0,1],[-1,0],[0,0]],[[1,0],[0,1],[0,0]],[[0,0],[0,0],[0,-2]]],"kind":"skew-hermitian"}"#,
    );
    let falsy = f.file(
        "f.json",
        r#"{"n":3,"rows":[[[0,1],[-1,0],[0,0]],[[1,0],[0,-2],[0,0]],[[0,0],[0,0],[0,1]]],"kind":"skew-hermitian"}"#,
    );
    for (path, code) in [(&in_m, 0), (&truthy, 0), (&falsy, 1)] {
        let (c, stdout) = brach(&[
            "equigeodesic",
            "--vector",
            p(path),
            "--blocks",
            "1,2",
            "--samples",
            "16",
            "--seed",
            "3",
        ]);
        assert_eq!(c, code, "{stdout}");
        assert_eq!(value(&stdout, "structural"), value(&stdout, "variational"));
    }
    let (c, _) = brach(&["equigeodesic", "--vector", p(&truthy), "--blocks", "1,3"]);
    assert_eq!(c, 3);
    let (c, _) = brach(&[
        "equigeodesic",
        "--vector",
        p(&truthy),
        "--blocks",
        "one,two",
    ]);
    assert_eq!(c, 2);
}

#[test]
fn evolve_qubit_to_its_target() {
    let f = Fixture::new();
    let out = f.path("traj.json");
    let half_pi = FRAC_PI_2.to_string();
    let (code, stdout) = brach(&[
        "evolve",
        "--ham",
        p(&f.path("sy.json")),
        "--state",
        p(&f.path("zero.json")),
        "--t0",
        "0",
        "--t1",
        &half_pi,
        "--steps",
        "100",
        "--out",
        p(&out),
    ]);
    assert_eq!(code, 0, "{stdout}");
    assert!(value(&stdout, "norm_drift").parse::<f64>().unwrap() < 1e-12);
    let traj: TrajectoryFile =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(traj.times.len(), 101);
    let JsonSample::Pure(last) = traj.states.last().unwrap() else {
        panic!("pure trajectory")
    };
    let overlap = (last[1][0].powi(2) + last[1][1].powi(2)).sqrt();
    assert!((overlap - 1.0).abs() < 1e-12);

    let (code, stdout) = brach(&[
        "evolve",
        "--ham",
        p(&f.path("sy.json")),
        "--state",
        p(&f.path("zero.json")),
        "--t0",
        "0.5",
        "--t1",
        "0.5",
        "--steps",
        "10",
        "--out",
        p(&out),
    ]);
    assert_eq!(code, 0);
    assert_eq!(value(&stdout, "samples"), "1");
}

#[test]
fn evolve_density_keeps_the_spectrum() {
    let f = Fixture::new();
    // quasi-pure: 0.7 on (|0> + |1>)/sqrt2, 0.15 on its complement
    let rho = f.file(
        "rho.json",
        r#"{"n":3,"rows":[[[0.425,0],[0.275,0],[0,0]],[[0.275,0],[0.425,0],[0,0]],[[0,0],[0,0],[0.15,0]]],"kind":"density"}"#,
    );
    let ham = f.file(
        "h3.json",
        r#"{"n":3,"rows":[[[0.3,0],[0,-1],[0.2,0.1]],[[0,1],[-0.4,0],[0,0]],[[0.2,-0.1],[0,0],[1,0]]],"kind":"hermitian"}"#,
    );
    let out = f.path("traj.json");
    let (code, stdout) = brach(&[
        "evolve",
        "--ham",
        p(&ham),
        "--state",
        p(&rho),
        "--t0",
        "0",
        "--t1",
        "5",
        "--steps",
        "40",
        "--density",
        "--out",
        p(&out),
    ]);
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(value(&stdout, "kind"), "density");
    assert!(value(&stdout, "spectrum_drift").parse::<f64>().unwrap() < 1e-10);
    assert!(value(&stdout, "trace_drift").parse::<f64>().unwrap() < 1e-12);
    let traj: TrajectoryFile =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(matches!(traj.states[0], JsonSample::Density(_)));

    let (code, _) = brach(&[
        "evolve",
        "--ham",
        p(&ham),
        "--state",
        p(&f.path("zero.json")),
        "--t0",
        "0",
        "--t1",
        "1",
        "--steps",
        "4",
        "--out",
        p(&out),
    ]);
    assert_eq!(code, 3);
    let (code, _) = brach(&[
        "evolve",
        "--ham",
        p(&ham),
        "--state",
        p(&rho),
        "--t0",
        "1",
        "--t1",
        "0",
        "--steps",
        "4",
        "--out",
        p(&out),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn verify_exit_codes() {
    let (code, stdout) = brach(&[
        "verify",
        "--suite",
        "synthesis",
        "--trials",
        "3",
        "--seed",
        "1",
    ]);
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(value(&stdout, "failed"), "0");
    assert!(value(&stdout, "qsl_inequality").starts_with("pass "));

    let (code, _) = brach(&["verify", "--suite", "all", "--trials", "0", "--seed", "1"]);
    assert_eq!(code, 2);

    let (code, stdout) = brach(&[
        "verify",
        "--suite",
        "algebra",
        "--trials",
        "2",
        "--seed",
        "1",
        "--negative-control",
    ]);
    assert_eq!(code, 1);
    assert!(value(&stdout, "negative_control").starts_with("fail "));
}

#[test]
fn verify_is_deterministic() {
    let args = [
        "verify",
        "--suite",
        "evolution",
        "--trials",
        "4",
        "--seed",
        "77",
        "--n-max",
        "5",
    ];
    assert_eq!(brach(&args), brach(&args));
}

#[test]
fn json_report_carries_seed_and_digest() {
    let f = Fixture::new();
    let (code, stdout) = brach(&[
        "--json",
        "check",
        "--ham",
        p(&f.path("sy.json")),
        "--state",
        p(&f.path("zero.json")),
    ]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert!(report.get("seed").unwrap().is_null());
    assert_eq!(report["outputs"]["verdict"], "Optimal");
    assert_eq!(report["exit_code"], 0);
    assert_eq!(report["inputs_digest"].as_str().unwrap().len(), 64);
    assert!(report["wall_time_s"].as_f64().unwrap() >= 0.0);

    let (_, again) = brach(&[
        "--json",
        "check",
        "--ham",
        p(&f.path("sy.json")),
        "--state",
        p(&f.path("zero.json")),
    ]);
    let again: Value = serde_json::from_str(&again).unwrap();
    assert_eq!(report["inputs_digest"], again["inputs_digest"]);

    let (_, stdout) = brach(&[
        "verify", "--suite", "algebra", "--trials", "1", "--seed", "5", "--json",
    ]);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["seed"], 5);
    assert_eq!(report["outputs"]["flow"], Value::Null);
    assert_eq!(report["outputs"]["eig_round_trip"]["status"], "pass");
}

#[test]
fn binary_exit_status_matches() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(
        dir.path(),
        "z.json",
        r#"{"n":2,"amplitudes":[[1,0],[0,0]]}"#,
    );
    let ham = write(
        dir.path(),
        "h.json",
        r#"{"n":2,"rows":[[[1,0],[0,0]],[[0,0],[-1,0]]]}"#,
    );
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_brach"))
        .args(["check", "--ham", p(&ham), "--state", p(&state)])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&status.stdout).contains("verdict=Stationary"));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
        Just(5e-324),
        Just(f64::MAX),
    ]
}

proptest! {
    #[test]
    fn matrix_json_round_trip_is_bit_exact(n in 1usize..5, seed in prop::collection::vec(finite(), 50)) {
        let rows: Vec<Vec<[f64; 2]>> = (0..n)
            .map(|i| (0..n).map(|j| [seed[(2 * (i * n + j)) % 50], seed[(2 * (i * n + j) + 1) % 50]]).collect())
            .collect();
        let m = JsonComplexMatrix { n, rows, kind: None }.to_matrix().unwrap();
        let text = serde_json::to_string(&JsonComplexMatrix::from_matrix(&m, None)).unwrap();
        let back = serde_json::from_str::<JsonComplexMatrix>(&text).unwrap().to_matrix().unwrap();
        for (a, b) in m.iter().zip(back.iter()) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn state_json_round_trip_is_bit_exact(amps in prop::collection::vec((finite(), finite()), 1..6), hbar in 1e-3f64..1e3) {
        let file = StateFile {
            n: amps.len(),
            amplitudes: amps.iter().map(|&(re, im)| [re, im]).collect(),
            units: Some(brach_cli::json::JsonUnits { hbar }),
        };
        let back: StateFile = serde_json::from_str(&serde_json::to_string(&file).unwrap()).unwrap();
        prop_assert_eq!(back.n, file.n);
        prop_assert_eq!(back.units.unwrap().hbar.to_bits(), hbar.to_bits());
        for (a, b) in file.amplitudes.iter().zip(&back.amplitudes) {
            prop_assert_eq!(a[0].to_bits(), b[0].to_bits());
            prop_assert_eq!(a[1].to_bits(), b[1].to_bits());
        }
    }
}
