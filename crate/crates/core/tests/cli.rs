use std::fmt::Write as _;
use std::fs;
use std::process::Command;

use sizesched::experiment::parse_results_json;
use sizesched::workload::{generate, load_trace};
use sizesched::GenParams;

fn sizesched() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sizesched"));
    cmd.env("SIZESCHED_WORKERS", "2");
    cmd
}

#[test]
fn csv_sweep_to_stdout() {
    let out = sizesched()
        .args([
            "run",
            "--policy",
            "ps,srpt,psbs",
            "--shape",
            "0.5,1",
            "--njobs",
            "300",
            "--reps",
            "2",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("policy,shape,sigma,load,timeshape,njobs,reps,mst_mean"));
    assert_eq!(lines.len(), 1 + 2 * 3);
    let ps_rows: Vec<_> = lines.iter().filter(|l| l.starts_with("ps,")).collect();
    assert!(
        ps_rows.iter().all(|l| l.split(',').nth(9) == Some("1.0")),
        "{ps_rows:?}"
    );
}

#[test]
fn json_output_file_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let raw = dir.path().join("raw.csv");
    let status = sizesched()
        .args([
            "run", "--policy", "spte,las", "--njobs", "200", "--reps", "3", "--format", "json", "--out",
        ])
        .arg(&path)
        .arg("--raw")
        .arg(&raw)
        .status()
        .unwrap();
    assert!(status.success());
    let results = parse_results_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(results.len(), 2);
    assert!(results
        .iter()
        .all(|r| r.repetitions == 3 && r.mst_mean > 0.0 && r.slowdown_cdf.len() == 200));
    let dump = fs::read_to_string(&raw).unwrap();
    assert_eq!(dump.lines().count(), 1 + 2 * 3 * 200);
}

#[test]
fn bad_input_fails_with_diagnostic() {
    let out = sizesched().args(["run", "--policy", "fifo"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("fifo"));

    let out = sizesched()
        .args(["run", "--policy", "ps", "--load", "1.5", "--njobs", "10"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("load"));

    let out = sizesched()
        .args(["run", "--preset", "no-such-preset"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn listings() {
    let out = sizesched().arg("list-policies").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 12);
    assert!(text.contains("mcsse"));
    let out = sizesched().arg("list-presets").output().unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains("ci-fig2"));
}

#[test]
fn trace_round_trip_and_replay() {
    let w = generate(&GenParams {
        njobs: 150,
        seed: 9,
        ..GenParams::default()
    })
    .unwrap();
    let origin = w.jobs[0].arrival;
    let mut text = String::from("job_id,arrival,size,estimate\n");
    for j in &w.jobs {
        writeln!(text, "{},{},{},{}", j.id, j.arrival, j.size, j.estimate).unwrap();
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    fs::write(&path, &text).unwrap();

    let back = load_trace(&path, 0.5, 0).unwrap();
    assert_eq!(back.len(), w.len());
    for (a, b) in w.jobs.iter().zip(&back.jobs) {
        assert_eq!((a.id, a.size, a.estimate), (b.id, b.size, b.estimate));
        assert_eq!(b.arrival, a.arrival - origin);
    }

    let out = sizesched().arg("validate-trace").arg(&path).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("jobs: 150"));

    let out = sizesched()
        .args([
            "run",
            "--preset",
            "fig7-trace",
            "--reps",
            "2",
            "--sigma",
            "0.5,2",
            "--trace",
        ])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().count() > 2);

    fs::write(&path, "0,0,1\n1,x,2\n").unwrap();
    let out = sizesched().arg("validate-trace").arg(&path).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}
