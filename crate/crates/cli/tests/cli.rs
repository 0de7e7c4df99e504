use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use humannav::harness::{load_episodes, load_scenario_dir, ExperimentReport};
use humannav::metrics::CSV_HEADER;
use humannav::sim::TrajectoryLog;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_humannav"))
}

fn ok(out: Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn generate(dir: &Path, seed: u64, n: usize) {
    ok(bin()
        .args([
            "generate",
            "--seed",
            &seed.to_string(),
            "--buildings",
            &n.to_string(),
            "--out",
        ])
        .arg(dir)
        .output()
        .unwrap());
}

#[test]
fn generate_writes_scenarios_and_episodes() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), 9, 3);
    let scenarios = load_scenario_dir(dir.path()).unwrap();
    assert_eq!(scenarios.len(), 3);
    let episodes = load_episodes(&dir.path().join("episodes.json")).unwrap();
    assert!(!episodes.is_empty());
    assert!(episodes
        .iter()
        .all(|e| scenarios.iter().any(|s| s.id == e.scenario)));

    let again = tempfile::tempdir().unwrap();
    generate(again.path(), 9, 3);
    for s in &scenarios {
        let name = format!("{}.scenario.json", s.id);
        assert_eq!(
            fs::read(dir.path().join(&name)).unwrap(),
            fs::read(again.path().join(&name)).unwrap()
        );
    }
}

#[test]
fn eval_writes_report_csv_and_logs() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), 4, 2);
    let report = dir.path().join("out/optimal.json");
    let stdout = ok(bin()
        .args(["eval", "--policy", "oracle-optimal", "--scenarios"])
        .arg(dir.path())
        .arg("--episodes")
        .arg(dir.path().join("episodes.json"))
        .args([
            "--mode",
            "panoramic",
            "--env",
            "dynamic",
            "--seed",
            "1",
            "--report",
        ])
        .arg(&report)
        .output()
        .unwrap());
    assert!(stdout.starts_with(CSV_HEADER));

    let r: ExperimentReport = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(r.errors(), 0);
    let m = r.metrics.unwrap();
    assert_eq!(m.sr_goal, 1.0);
    assert_eq!(m.ne, 0.0);

    let csv = fs::read_to_string(dir.path().join("out/optimal.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    assert_eq!(csv.lines().count(), 1 + r.rows.len());

    let logs: Vec<_> = fs::read_dir(dir.path().join("out/optimal.json.logs"))
        .unwrap()
        .collect();
    assert_eq!(logs.len(), r.episodes.len());
    for entry in logs {
        let bytes = fs::read(entry.unwrap().path()).unwrap();
        let log = TrajectoryLog::read_jsonl(&bytes[..]).unwrap();
        assert!(log.is_complete());
    }
}

#[test]
fn eval_rejects_bad_arguments() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), 4, 1);
    let out = bin()
        .args(["eval", "--policy", "telepathic", "--scenarios"])
        .arg(dir.path())
        .arg("--episodes")
        .arg(dir.path().join("episodes.json"))
        .arg("--report")
        .arg(dir.path().join("r.json"))
        .output()
        .unwrap();
    assert!(!out.status.success());

    let out = bin()
        .args(["eval", "--policy", "greedy", "--scenarios"])
        .arg(dir.path())
        .arg("--episodes")
        .arg(dir.path().join("missing.json"))
        .arg("--report")
        .arg(dir.path().join("r.json"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn datagen_follows_the_config() {
    let dir = tempfile::tempdir().unwrap();
    generate(&dir.path().join("world"), 6, 2);
    let cfg = dir.path().join("job.json");
    fs::write(
        &cfg,
        r#"{"scenarios": "world", "dataset": {"num_trajectories": 50, "max_len": 12, "context_window": 6, "seed": 3}}"#,
    )
    .unwrap();
    let out = dir.path().join("walks.jsonl");
    ok(bin()
        .args(["datagen", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap());
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let header: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(header["config"]["num_trajectories"], 50);
    let records: Vec<serde_json::Value> = lines.map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 50);
    assert!(records
        .iter()
        .all(|r| r["steps"].as_array().unwrap().len() <= 12));

    let again = dir.path().join("again.jsonl");
    ok(bin()
        .args(["datagen", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&again)
        .output()
        .unwrap());
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());

    fs::write(
        &cfg,
        r#"{"scenarios": "world", "dataset": {"context_window": 0}}"#,
    )
    .unwrap();
    let out = bin()
        .args(["datagen", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&again)
        .output()
        .unwrap();
    assert!(!out.status.success());
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port()
}

fn http_get(port: u16, path: &str) -> Option<(u16, String)> {
    let mut s = TcpStream::connect(("127.0.0.1", port)).ok()?;
    write!(
        s,
        "GET {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n"
    )
    .ok()?;
    let mut r = BufReader::new(s);
    let mut status = String::new();
    r.read_line(&mut status).ok()?;
    let code = status.split_whitespace().nth(1)?.parse().ok()?;
    let mut rest = String::new();
    r.read_to_string(&mut rest).ok()?;
    Some((code, rest))
}

#[test]
fn serve_answers_http() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), 8, 1);
    let port = free_port();
    let mut child = bin()
        .args(["serve", "--port", &port.to_string(), "--scenarios"])
        .arg(dir.path())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let deadline = Instant::now() + Duration::from_secs(20);
    let res = loop {
        if let Some(r) = http_get(port, "/v1/activities") {
            break Some(r);
        }
        if Instant::now() > deadline {
            break None;
        }
        std::thread::sleep(Duration::from_millis(50));
    };
    let scenarios = http_get(port, "/v1/scenarios");
    child.kill().unwrap();
    child.wait().unwrap();
    let (code, body) = res.expect("server did not come up");
    assert_eq!(code, 200);
    assert!(body.contains("\"regions\""));
    let (code, body) = scenarios.unwrap();
    assert_eq!(code, 200);
    assert!(body.contains("\"b000\""), "{body}");
}
