use std::fs;
use std::process::Command;

fn saso() -> Command {
    Command::new(env!("CARGO_BIN_EXE_saso"))
}

#[test]
fn run_writes_one_csv_per_metric_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = saso()
        .args([
            "run",
            "--scenario",
            "life",
            "--seed",
            "3",
            "--ticks",
            "80",
            "--param",
            "width=12",
            "--param",
            "height=12",
        ])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout.lines().any(|l| l.starts_with("metric=coherence, mean=")),
        "{stdout}"
    );

    for metric in [
        "coherence",
        "stability",
        "variability",
        "global_usage",
        "average_usage",
        "transferability",
    ] {
        let csv = fs::read_to_string(dir.path().join(format!("life_{metric}.csv"))).unwrap();
        assert!(csv.starts_with("tick,value\n"), "{metric}");
        assert!(csv.ends_with('\n'));
    }
    let summary = fs::read_to_string(dir.path().join("life_summary.txt")).unwrap();
    assert_eq!(summary, stdout);
}

#[test]
fn reruns_are_byte_identical() {
    let read = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let status = saso()
            .args([
                "run",
                "--scenario",
                "flocking",
                "--seed",
                seed,
                "--ticks",
                "90",
                "--param",
                "birds=15",
            ])
            .arg("--out")
            .arg(dir.path())
            .status()
            .unwrap();
        assert!(status.success());
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        files
    };
    let a = read("7");
    assert_eq!(a.len(), 7);
    assert_eq!(a, read("7"));
    assert_ne!(a, read("8"));
}

#[test]
fn bad_parameters_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    for param in ["epsilon", "epsilon=-1", "no_such_key=1", "m=1"] {
        let out = saso()
            .args(["run", "--scenario", "traffic", "--ticks", "100", "--param", param])
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(2), "{param}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "), "{param}");
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn unknown_scenario_is_a_usage_error() {
    let out = saso().args(["run", "--scenario", "weather"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("weather"));
}
