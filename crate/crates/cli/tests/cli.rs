use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};
use tangram_core::pipeline::RawAssembly;
use tangram_core::tangram::{parse_tce, TceInstance};
use tempfile::TempDir;

fn tce(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tce"))
        .args(args)
        .current_dir(dir)
        .env_remove("TCE_CONFIG")
        .env_remove("TCE_SERVICE_PORT")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json") && !p.to_string_lossy().ends_with("manifest.json"))
        .collect();
    v.sort();
    v
}

fn load(dir: &Path) -> Vec<TceInstance> {
    json_files(dir).iter().map(|p| parse_tce(&fs::read_to_string(p).unwrap()).0.unwrap()).collect()
}

fn corpus(tmp: &TempDir, name: &str, count: usize, seed: u64) -> PathBuf {
    let out = tmp.path().join(name);
    let o = tce(tmp.path(), &["gen-corpus", "--count", &count.to_string(), "--seed", &seed.to_string(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn manifest(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gen_corpus_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let a = corpus(&tmp, "a", 5, 3);
    let b = corpus(&tmp, "b", 5, 3);
    let (fa, fb) = (json_files(&a), json_files(&b));
    assert_eq!(fa.len(), 5);
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.file_name(), y.file_name());
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
    }
    let m = manifest(&a.join("run_manifest.json"));
    assert_eq!(m["subcommand"], "gen-corpus");
    assert_eq!(m["seed"], 3);
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 5);
    assert!(m["started_at"].is_string() && m["finished_at"].is_string());
}

#[test]
fn config_file_and_flags() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("tce.toml");
    fs::write(&cfg, "seed = 9\n").unwrap();
    let out = tmp.path().join("c");
    let run = |extra: &[&str]| {
        let mut args = vec!["gen-corpus", "--count", "1", "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        Command::new(env!("CARGO_BIN_EXE_tce")).args(&args).current_dir(tmp.path()).env("TCE_CONFIG", &cfg).output().unwrap()
    };
    assert_eq!(code(&run(&[])), 0);
    assert_eq!(manifest(&out.join("run_manifest.json"))["seed"], 9);
    assert_eq!(code(&run(&["--seed", "4"])), 0);
    let m = manifest(&out.join("run_manifest.json"));
    assert_eq!(m["seed"], 4);
    assert_eq!(m["config_path"], json!(cfg));

    fs::write(&cfg, "nonsense = [\n").unwrap();
    assert_eq!(code(&run(&[])), 1);
}

#[test]
fn usage_errors() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&tce(tmp.path(), &["frobnicate"])), 1);
    assert_eq!(code(&tce(tmp.path(), &["solve"])), 1);
    assert_eq!(code(&tce(tmp.path(), &["gen-corpus", "--count", "x", "--out", "o"])), 1);
    assert_eq!(code(&tce(tmp.path(), &["--help"])), 0);
}

#[test]
fn normalize_raw_exports() {
    let tmp = TempDir::new().unwrap();
    let truths = load(&corpus(&tmp, "truth", 3, 21));
    let mut lines: Vec<String> = truths.iter().enumerate().map(|(k, t)| RawAssembly::from_pieces(&t.final_state).translate(k as f64 * 1.5, -0.25).to_line()).collect();
    let mut detached = RawAssembly::from_pieces(&truths[0].final_state);
    for v in &mut detached.pieces[3].vertices {
        v[1] += 20.0;
    }
    lines.push(detached.to_line());
    lines.push("{broken".into());
    let raw = tmp.path().join("raw.jsonl");
    fs::write(&raw, lines.join("\n") + "\n").unwrap();
    let out = tmp.path().join("norm");
    let o = tce(tmp.path(), &["normalize", raw.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let got = load(&out);
    assert_eq!(got.len(), 3);
    for t in &truths {
        assert!(got.contains(t), "{} not reproduced", t.instance_id);
    }
    let log: Vec<Value> = fs::read_to_string(out.join("normalize_log.jsonl")).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(log.len(), 5);
    assert!(log[..3].iter().all(|e| e["status"] == "accepted"));
    assert_eq!((log[3]["line"].as_u64(), log[3]["reason"].as_str()), (Some(4), Some("disconnected")));
    assert_eq!(log[4]["reason"], "parse");

    let empty = tmp.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    let out2 = tmp.path().join("norm2");
    assert_eq!(code(&tce(tmp.path(), &["normalize", empty.to_str().unwrap(), "--out", out2.to_str().unwrap()])), 0);
    assert!(json_files(&out2).is_empty());

    assert_eq!(code(&tce(tmp.path(), &["normalize", "missing.jsonl", "--out", "x"])), 2);
}

#[test]
fn task_generation() {
    let tmp = TempDir::new().unwrap();
    let dir = corpus(&tmp, "truth", 6, 5);
    let (o1, o2) = (tmp.path().join("t1a"), tmp.path().join("t1b"));
    for o in [&o1, &o2] {
        let r = tce(tmp.path(), &["gen-task1", dir.to_str().unwrap(), "--seed", "8", "--out", o.to_str().unwrap()]);
        assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    }
    let keys = fs::read_to_string(o1.join("answers.jsonl")).unwrap();
    assert_eq!(keys, fs::read_to_string(o2.join("answers.jsonl")).unwrap());
    assert_eq!(keys.lines().count(), 6);
    for l in keys.lines() {
        let v: Value = serde_json::from_str(l).unwrap();
        assert!(["A", "B", "C", "D"].contains(&v["answer"].as_str().unwrap()));
        assert!(o1.join(format!("{}.svg", v["instance_id"].as_str().unwrap())).exists());
    }

    let small = tmp.path().join("small");
    fs::create_dir(&small).unwrap();
    for p in json_files(&dir).iter().take(3) {
        fs::copy(p, small.join(p.file_name().unwrap())).unwrap();
    }
    assert_eq!(code(&tce(tmp.path(), &["gen-task1", small.to_str().unwrap(), "--seed", "1", "--out", "t1c"])), 2);

    let prompts = |variant: &str, shots: &str| {
        let out = tmp.path().join(format!("t2-{variant}-{shots}"));
        let r = tce(tmp.path(), &["gen-task2", dir.to_str().unwrap(), "--variant", variant, "--shots", shots, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
        fs::read_to_string(out.join("prompts.jsonl")).unwrap().lines().map(|l| serde_json::from_str::<Value>(l).unwrap()).collect::<Vec<_>>()
    };
    let full = prompts("full", "0");
    assert_eq!(full.len(), 6);
    assert!(full.iter().all(|b| b["text"].as_str().unwrap().contains("### Target outline")));
    let visual = prompts("visual-centric", "3");
    for b in &visual {
        let text = b["text"].as_str().unwrap();
        assert!(!text.contains("### Target outline"));
        assert_eq!(text.matches("### Solved example").count(), 3);
        assert_eq!(b["exemplars"].as_array().unwrap().len(), 3);
    }
    assert_eq!(code(&tce(tmp.path(), &["gen-task2", dir.to_str().unwrap(), "--shots", "6", "--out", "t2x"])), 2);
    assert_eq!(code(&tce(tmp.path(), &["gen-task2", dir.to_str().unwrap(), "--variant", "audio", "--out", "t2y"])), 1);
}

#[test]
fn verify_and_score() {
    let tmp = TempDir::new().unwrap();
    let dir = corpus(&tmp, "truth", 6, 13);
    let truths = load(&dir);
    let line = |id: &str, text: String| json!({"instance_id": id, "raw_text": text}).to_string();

    let all: Vec<String> = truths.iter().map(|t| line(&t.instance_id, format!("```json\n{}\n```", fs::read_to_string(dir.join(format!("{}.json", t.instance_id))).unwrap()))).collect();
    let responses = tmp.path().join("all.jsonl");
    fs::write(&responses, all.join("\n")).unwrap();
    let report = tmp.path().join("report.csv");
    let o = tce(tmp.path(), &["verify", responses.to_str().unwrap(), "--truth", dir.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&report).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "TSE,RGE,PE,VPR,IoU,Hausdorff,Success");
    assert!(rows[1].starts_with("0.00,0.00,0.00,100.00,100.00,"), "{}", rows[1]);
    assert!(stdout(&o).contains("100.00"));
    assert!(report.with_file_name("report.csv.manifest.json").exists());

    // Three intact, one empty, one with a piece dropped, one missing: three
    // syntax failures out of six.
    let mut mixed: Vec<String> = all[..3].to_vec();
    mixed.push(line(&truths[3].instance_id, String::new()));
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(dir.join(format!("{}.json", truths[4].instance_id))).unwrap()).unwrap();
    doc["final_state"].as_array_mut().unwrap().pop();
    mixed.push(line(&truths[4].instance_id, doc.to_string()));
    let responses = tmp.path().join("mixed.jsonl");
    fs::write(&responses, mixed.join("\n")).unwrap();
    let o = tce(tmp.path(), &["verify", responses.to_str().unwrap(), "--truth", dir.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(&report).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("50.00,0.00,"), "{csv}");
    assert!(csv.lines().nth(1).unwrap().contains(",50.00,"), "{csv}");

    let keys = tmp.path().join("keys.jsonl");
    let answers = tmp.path().join("answers.jsonl");
    fs::write(&keys, "{\"instance_id\": \"q1\", \"answer\": \"B\"}\n{\"instance_id\": \"q2\", \"answer\": \"C\"}\n").unwrap();
    fs::write(&answers, "{\"instance_id\": \"q1\", \"raw_text\": \"The answer is B\"}\n{\"instance_id\": \"q2\", \"raw_text\": \"no idea\"}\n").unwrap();
    let o = tce(tmp.path(), &["score-task1", answers.to_str().unwrap(), "--keys", keys.to_str().unwrap(), "--report", "t1.csv"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("50.00  50.00"), "{}", stdout(&o));
    assert_eq!(fs::read_to_string(tmp.path().join("t1.csv")).unwrap(), "Acc,Invalid\n50.00,50.00\n");
    assert_eq!(code(&tce(tmp.path(), &["score-task1", answers.to_str().unwrap(), "--keys", "absent.jsonl"])), 2);
}

#[test]
fn solve_targets() {
    let tmp = TempDir::new().unwrap();
    let write = |name: &str, v: Value| {
        let p = tmp.path().join(name);
        fs::write(&p, v.to_string()).unwrap();
        p
    };
    let square = write("square.json", json!({"vertices": [["0", "0"], ["2\\sqrt{2}", "0"], ["2\\sqrt{2}", "2\\sqrt{2}"], ["0", "2\\sqrt{2}"]]}));
    let o = tce(tmp.path(), &["solve", square.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "solved");
    assert_eq!(v["solutions"][0].as_array().unwrap().len(), 7);
    assert!(tmp.path().join("tce-solve.manifest.json").exists());

    let o = tce(tmp.path(), &["solve", square.to_str().unwrap(), "--all", "--out", "all.json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("all.json")).unwrap()).unwrap();
    assert_eq!(v["complete"], true);
    assert!(v["solutions"].as_array().unwrap().len() > 1);

    let seven = write("seven.json", json!({"target_outline": {"vertices": [["0", "0"], ["7", "0"], ["7", "1"], ["0", "1"]]}}));
    let o = tce(tmp.path(), &["solve", seven.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((v["status"].as_str(), v["reason"].as_str()), (Some("unsat"), Some("area-mismatch")));

    let garbage = write("garbage.json", json!({"vertices": 5}));
    assert_eq!(code(&tce(tmp.path(), &["solve", garbage.to_str().unwrap()])), 2);
}

#[test]
fn render_files() {
    let tmp = TempDir::new().unwrap();
    let dir = corpus(&tmp, "truth", 1, 2);
    let doc = json_files(&dir).remove(0);
    let (a, b) = (tmp.path().join("a.svg"), tmp.path().join("b.svg"));
    for out in [&a, &b] {
        assert_eq!(code(&tce(tmp.path(), &["render", doc.to_str().unwrap(), "--out", out.to_str().unwrap()])), 0);
    }
    let svg = fs::read(&a).unwrap();
    assert_eq!(svg, fs::read(&b).unwrap());
    assert!(svg.starts_with(b"<svg"));
    let pieces = tmp.path().join("p.svg");
    assert_eq!(code(&tce(tmp.path(), &["render", doc.to_str().unwrap(), "--assembly", "--out", pieces.to_str().unwrap()])), 0);
    assert_eq!(fs::read_to_string(&pieces).unwrap().matches("data-piece=").count(), 7);
    assert_ne!(code(&tce(tmp.path(), &["render", "nowhere.json", "--out", "x.svg"])), 0);
}

#[test]
fn serve_answers_pieces() {
    let tmp = TempDir::new().unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_tce"))
        .args(["serve", "--port", "0"])
        .current_dir(tmp.path())
        .env_remove("TCE_CONFIG")
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut err = BufReader::new(child.stderr.take().unwrap());
    let mut line = String::new();
    err.read_line(&mut line).unwrap();
    let addr = line.trim().rsplit("http://").next().unwrap().to_owned();
    let mut s = std::net::TcpStream::connect(&addr).unwrap();
    write!(s, "GET /pieces HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").unwrap();
    let mut body = String::new();
    s.read_to_string(&mut body).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(body.starts_with("HTTP/1.1 200"), "{body}");
    assert!(body.contains("\"large_triangle_1\""));
    assert!(tmp.path().join("tce-serve.manifest.json").exists());

    let o = tce(tmp.path(), &["serve", "--host", "0.0.0.0", "--port", "0"]);
    assert_eq!(code(&o), 1);
}
