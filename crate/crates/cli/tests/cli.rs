use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use excursion_core::experiments::{parse_report, CampaignKind};
use excursion_core::grid::read_field;
use tempfile::tempdir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_excursion-lab"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn run_err(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(!out.status.success(), "command {args:?} unexpectedly succeeded");
    out
}

/// Samples a small field and returns its path.
fn sample(dir: &Path, name: &str, extent: &str, seed: &str) -> PathBuf {
    let path = dir.join(name);
    let stdout = run_ok(&[
        "sample",
        "--pitch",
        "0.25",
        "--extent",
        extent,
        "--seed",
        seed,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(stdout.contains("wrote"));
    path
}

#[test]
fn sample_dump_is_readable() {
    let dir = tempdir().unwrap();
    let path = sample(dir.path(), "f.excf", "0,0,2,1", "5");
    let field = read_field(&path).unwrap();
    assert_eq!(field.seed(), 5);
    assert_eq!(field.grid().nx(), 9);
    assert_eq!(field.grid().ny(), 5);
    // Unknown kernels are refused.
    run_err(&[
        "sample", "--kernel", "sinc", "--pitch", "0.25", "--extent", "0,0,1,1", "--seed", "1",
        "--out", "/dev/null",
    ]);
}

#[test]
fn crossing_tracks_the_level() {
    let dir = tempdir().unwrap();
    let path = sample(dir.path(), "f.excf", "0,0,4,2", "7");
    let f = path.to_str().unwrap();
    let base = ["crossing", "--in", f, "--rect", "0,0,4,2", "--dir", "lr", "--level"];

    let open = run_ok(&[&base[..], &["10"]].concat());
    assert_eq!(open.trim(), "true");
    let closed = run_ok(&[&base[..], &["-10"]].concat());
    assert_eq!(closed.trim(), "false");

    let csv = run_ok(&[&base[..], &["10", "--csv"]].concat());
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[1], "x0,y0,x1,y1,dir,level,crossing");
    assert_eq!(lines[2], "0,0,4,2,lr,10,1");

    let err = run_err(&["crossing", "--in", f, "--rect", "0,0,4,2", "--dir", "up", "--level", "0"]);
    assert!(String::from_utf8_lossy(&err.stderr).contains("lr or bt"));
}

#[test]
fn chemdist_reports_soft_failures() {
    let dir = tempdir().unwrap();
    let path = sample(dir.path(), "f.excf", "0,0,4,2", "3");
    let f = path.to_str().unwrap();

    let out = run_ok(&[
        "chemdist", "--in", f, "--level", "10", "--from", "0.5,1", "--to", "3.5,1",
    ]);
    let row = out.lines().nth(1).unwrap();
    assert!(row.starts_with("1,"), "row {row:?}");
    let d: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!(d >= 3.0 && d < 3.3, "distance {d}");

    let out = run_ok(&[
        "chemdist", "--in", f, "--level", "-10", "--from", "0.5,1", "--to", "3.5,1",
    ]);
    assert_eq!(out.lines().nth(1).unwrap(), "0,inf,endpoint-closed");
}

#[test]
fn sstat_emits_components_and_total() {
    let dir = tempdir().unwrap();
    let path = sample(dir.path(), "f.excf", "0,0,4,2", "21");
    let f = path.to_str().unwrap();
    for mode in ["exact", "sweep"] {
        let out = run_ok(&[
            "sstat", "--in", f, "--level", "10", "--box", "0,0,2,2", "--mode", mode,
        ]);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "label,diameter");
        assert!(lines.last().unwrap().starts_with("total,"));
        // Fully open box: a single component.
        assert_eq!(lines.len(), 3);
    }
}

#[test]
fn boundary_emits_certificates() {
    let dir = tempdir().unwrap();
    let path = sample(dir.path(), "f.excf", "0,0,4,2", "13");
    let out = run_ok(&[
        "boundary", "--in", path.to_str().unwrap(), "--level", "0", "--box", "0,0,4,2",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "label,n_holes,boundary_length,diam_exact,ratio,holds");
    for row in &lines[1..] {
        let holds = row.rsplit(',').next().unwrap();
        assert_eq!(holds, "1", "certificate failed in {row:?}");
    }
}

#[test]
fn gstruct_emits_one_event_row() {
    let dir = tempdir().unwrap();
    let path = sample(dir.path(), "f.excf", "-2,-2,6,2", "9");
    let out = run_ok(&[
        "gstruct",
        "--in",
        path.to_str().unwrap(),
        "--x",
        "4",
        "--delta",
        "0.5",
        "--level",
        "1",
        "--epsilon",
        "0.25",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "g1,h,h1,h2,h3,h4,h1p,h2p,h3p,h4p,g2,sup_diff"
    );
    let cells: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cells.len(), 12);
    for flag in &cells[..11] {
        assert!(*flag == "0" || *flag == "1");
    }
    let sup: f64 = cells[11].parse().unwrap();
    assert!(sup >= 0.0 && sup.is_finite());
}

#[test]
fn run_executes_resumes_and_stays_deterministic() {
    let dir = tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let config = |out: &Path| {
        format!(
            "campaign = crossing-scaling\n\
             pitch = 0.25\n\
             level = 10\n\
             lambda_values = 2\n\
             epsilon_values = 0.5\n\
             n_trials = 3\n\
             master_seed = 11\n\
             output_path = {}\n",
            out.display()
        )
    };
    let cfg_a = dir.path().join("a.cfg");
    let cfg_b = dir.path().join("b.cfg");
    std::fs::write(&cfg_a, config(&out_a)).unwrap();
    std::fs::write(&cfg_b, config(&out_b)).unwrap();

    run_ok(&["run", "--config", cfg_a.to_str().unwrap()]);
    let (kind, records) = parse_report(&out_a).unwrap();
    assert_eq!(kind, CampaignKind::CrossingScaling);
    assert_eq!(records.len(), 3);
    assert!(records.iter().all(|r| r.value("crossing_f") == Some(1.0)));
    assert!(out_a.with_file_name("a.csv.meta").exists());

    // Resuming over a complete report recomputes nothing and keeps
    // the bytes; a different worker count changes nothing either.
    let first = std::fs::read(&out_a).unwrap();
    let msg = run_ok(&["run", "--config", cfg_a.to_str().unwrap(), "--resume"]);
    assert!(msg.contains("3 kept"), "message {msg:?}");
    assert_eq!(std::fs::read(&out_a).unwrap(), first);

    run_ok(&["run", "--config", cfg_b.to_str().unwrap(), "--threads", "2"]);
    assert_eq!(std::fs::read(&out_b).unwrap(), first);
}

#[test]
fn missing_inputs_fail_with_context() {
    let err = run_err(&[
        "chemdist", "--in", "/nonexistent/f.excf", "--level", "1", "--from", "0,0", "--to", "1,1",
    ]);
    assert!(String::from_utf8_lossy(&err.stderr).contains("/nonexistent/f.excf"));
    let err = run_err(&["run", "--config", "/nonexistent/exp.cfg"]);
    assert!(String::from_utf8_lossy(&err.stderr).contains("/nonexistent/exp.cfg"));
}
