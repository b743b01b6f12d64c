use branchlab_cli::args::{Command, GridArgs};
use branchlab_cli::*;
use branchlab_core::{GridSpec, LateralBc, Magnetisation, Mode, StrayField};
use std::path::PathBuf;
use std::process::Command as Process;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("branchlab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_branchlab"))
}

#[test]
fn construct_example_parses() {
    let cfg = parse_args(
        "branchlab construct --d 2 --L 8 --T 1 --nh 256 --nv 128 --levels 4 --bc zero-flux --out run/".split(' '),
    )
    .unwrap();
    match cfg.command {
        Command::Construct(a) => {
            assert_eq!(
                a.grid,
                GridArgs {
                    d: 2,
                    l: 8.0,
                    t: 1.0,
                    nh: 256,
                    nv: 128,
                    bc: LateralBc::ZeroFlux
                }
            );
            assert_eq!(a.levels, 4);
            assert_eq!(a.out, PathBuf::from("run/"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn three_dimensions_are_a_usage_error() {
    let err = parse_args(
        "branchlab construct --d 3 --L 8 --T 1 --nh 256 --nv 128 --levels 4 --out r".split(' '),
    )
    .unwrap_err();
    assert!(matches!(err, CliError::Usage(_)));
    assert_eq!(err.exit_code(), 1);
    let bad_nh = parse_args(
        "branchlab construct --d 1 --L 8 --T 1 --nh 100 --nv 8 --levels 1 --out r".split(' '),
    )
    .unwrap_err();
    assert!(matches!(bad_nh, CliError::Validation(_)));
    assert!(matches!(
        parse_args(["branchlab", "sweep", "--T", "1", "--frobnicate"]),
        Err(CliError::Usage(_))
    ));
    assert!(matches!(
        parse_args(["branchlab", "sweep", "--T", "1", "--bc", "free"]),
        Err(CliError::Usage(_))
    ));
}

#[test]
fn sweep_heights_parse_as_a_list() {
    let cfg = parse_args("branchlab sweep --T 1,8,64 --c-lt 4 --sigma 1".split(' ')).unwrap();
    match cfg.command {
        Command::Sweep(a) => {
            assert_eq!(a.heights, vec![1.0, 8.0, 64.0]);
            assert_eq!(a.c_lt, 4.0);
            assert_eq!(a.sigma, 1.0);
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        parse_args("branchlab sweep --T 1,-8".split(' ')),
        Err(CliError::Validation(_))
    ));
}

#[test]
fn exit_codes_follow_the_error_class() {
    assert_eq!(CliError::Validation(String::new()).exit_code(), 1);
    assert_eq!(CliError::Check(String::new()).exit_code(), 2);
    assert_eq!(CliError::Io(String::new()).exit_code(), 3);
    let usage = bin().args(["construct", "--d", "3"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(1));
    let missing = bin()
        .args(["energy", "--field", "/nonexistent/m.field"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(3));
    let threads = bin()
        .args(["verify", "--seeds", "1"])
        .env("BRANCHLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(1));
}

#[test]
fn files_round_trip_on_disk() {
    let dir = scratch("files");
    let g = GridSpec::new(1, 8, 4, 2.0, 0.3, LateralBc::ZeroFlux).unwrap();
    let m = Magnetisation::from_fn(g, Mode::Relaxed, |i, _, k| ((i * 5 + k) as f64).sin() / 3.0)
        .unwrap();
    save_magnetisation(&dir.join("m.field"), &m).unwrap();
    assert_eq!(load_magnetisation(&dir.join("m.field")).unwrap(), m);
    let zeros = StrayField::zeros(g);
    let comps = [0, 1].map(|a| {
        (0..zeros.comps()[a].len())
            .map(|i| 1.0 / (i as f64 + 3.0))
            .collect()
    });
    let h = StrayField::from_parts(g, comps).unwrap();
    save_stray_field(&dir.join("h.field"), &h).unwrap();
    assert_eq!(load_stray_field(&dir.join("h.field")).unwrap(), h);
    std::fs::write(
        dir.join("bad.field"),
        "version=7\nkind=magnetisation\n\n1 2",
    )
    .unwrap();
    let err = load_magnetisation(&dir.join("bad.field")).unwrap_err();
    assert!(matches!(err, FieldFileError::Version { expected: 1, .. }));
}

#[test]
fn pipeline_writes_every_artifact() {
    let dir = scratch("pipeline");
    let run_dir = dir.join("run");
    let out = bin()
        .args([
            "construct",
            "--d",
            "1",
            "--L",
            "1",
            "--T",
            "1",
            "--nh",
            "64",
            "--nv",
            "32",
            "--levels",
            "2",
            "--save-field",
        ])
        .arg("--out")
        .arg(&run_dir)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let line = String::from_utf8(out.stdout).unwrap();
    assert!(
        line.starts_with("status=ok command=construct N=1 K=2"),
        "{line}"
    );
    for f in ["m.field", "h.field", "manifest.jsonl"] {
        assert!(run_dir.join(f).exists(), "{f}");
    }
    let field = run_dir.join("m.field");
    let probe = bin()
        .args([
            "probe", "--a", "0", "--half", "0.5", "--height", "0.5", "--theta", "0.25", "--depth",
            "1",
        ])
        .arg("--field")
        .arg(&field)
        .arg("--out")
        .arg(&run_dir)
        .output()
        .unwrap();
    assert_eq!(
        probe.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&probe.stderr)
    );
    let csv = std::fs::read_to_string(run_dir.join("probe.csv")).unwrap();
    assert!(csv.starts_with("k,l,t,f,f0,n,e\n"));
    assert_eq!(csv.lines().count(), 3);
    let min = bin()
        .args(["minimize", "--steps", "500", "--seed", "3"])
        .arg("--field")
        .arg(&field)
        .arg("--out")
        .arg(dir.join("min"))
        .output()
        .unwrap();
    assert_eq!(
        min.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&min.stderr)
    );
    let trace = std::fs::read_to_string(dir.join("min/trace.csv")).unwrap();
    assert!(trace.starts_with("step,temperature,energy\n"));
    let sweep = bin()
        .args([
            "sweep", "--T", "1,8,64", "--c-lt", "4", "--nh", "512", "--nv", "160",
        ])
        .arg("--out")
        .arg(dir.join("sweep"))
        .output()
        .unwrap();
    assert_eq!(
        sweep.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&sweep.stderr)
    );
    let csv = std::fs::read_to_string(dir.join("sweep/sweep.csv")).unwrap();
    assert!(csv.starts_with("T,L,N,K,interfacial,stray,total,density,chain_lb\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn verify_passes_on_a_fresh_checkout() {
    let out = bin().args(["verify", "--seeds", "5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("FAIL"), "{text}");
    assert!(text
        .trim_end()
        .ends_with("status=ok command=verify suites=9"));
}
