use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL: &[&str] = &[
    "--set",
    "synthetic.high_accounts=40",
    "--set",
    "synthetic.low_accounts=40",
    "--set",
    "synthetic.high_sources=8",
    "--set",
    "synthetic.low_sources=8",
    "--set",
    "node2vec.dimension=8",
    "--set",
    "node2vec.walks_per_node=4",
    "--set",
    "node2vec.walk_length=20",
    "--set",
    "node2vec.epochs=1",
];

fn crednet(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crednet"))
        .current_dir(dir)
        .env("RUST_LOG", "info")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = crednet(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    crednet(dir, args).status.code().expect("exited normally")
}

fn with_small<'a>(args: &[&'a str]) -> Vec<&'a str> {
    args.iter().copied().chain(SMALL.iter().copied()).collect()
}

/// synth followed by ingest of its output.
fn synth_and_ingest(dir: &Path, extra: &[&str]) {
    let mut a = with_small(&["synth", "--set", "synthetic.mu=0"]);
    a.extend(extra);
    ok(dir, &a);
    ok(
        dir,
        &with_small(&[
            "ingest",
            "--posts",
            "out/posts.jsonl",
            "--ratings",
            "out/ratings.csv",
        ]),
    );
}

fn read_csv(path: &Path) -> Vec<BTreeMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            headers
                .iter()
                .zip(rec.unwrap().iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect()
        })
        .collect()
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn write_fixture(dir: &Path, posts: &[(&str, &[&str], Option<&str>)], creds: &str) {
    let out = dir.join("out");
    fs::create_dir_all(&out).unwrap();
    let lines: Vec<String> = posts
        .iter()
        .enumerate()
        .map(|(i, (account, domains, from))| {
            let mut v = serde_json::json!({"account": account, "post": format!("p{i}"), "domains": domains});
            if let Some(f) = from {
                v["reshared_from"] = serde_json::json!(f);
            }
            v.to_string()
        })
        .collect();
    fs::write(out.join("records.jsonl"), lines.join("\n") + "\n").unwrap();
    fs::write(out.join("credibilities.csv"), creds).unwrap();
}

#[test]
fn synthetic_data_survives_ingest_unchanged() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    synth_and_ingest(dir, &[]);
    let out = dir.join("out");
    assert_eq!(
        fs::read(out.join("records.jsonl")).unwrap(),
        fs::read(out.join("posts.jsonl")).unwrap()
    );

    let truth: BTreeMap<String, String> = read_csv(&out.join("truth.csv"))
        .into_iter()
        .map(|r| (r["account_id"].clone(), r["label"].clone()))
        .collect();
    let labels: BTreeMap<String, String> = read_csv(&out.join("credibilities.csv"))
        .into_iter()
        .map(|r| (r["account_id"].clone(), r["label"].clone()))
        .collect();
    assert_eq!(truth.len(), 80);
    assert_eq!(labels, truth);

    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    let ingest = &manifest["runs"]["ingest"];
    assert_eq!(ingest["inputs"][0]["path"], "out/posts.jsonl");
    assert_eq!(ingest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(ingest["outputs"].as_array().unwrap().len(), 2);
    assert!(manifest["runs"]["synth"].is_object());
}

#[test]
fn missing_inputs_exit_with_2() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    ok(dir, &with_small(&["synth"]));
    assert_eq!(code(dir, &["ingest", "--posts", "out/posts.jsonl"]), 2);
    assert_eq!(
        code(
            dir,
            &[
                "ingest",
                "--posts",
                "out/posts.jsonl",
                "--ratings",
                "nope.csv"
            ]
        ),
        2
    );
    assert_eq!(code(dir, &["rank", "--algorithm", "locred"]), 2);
    assert_eq!(code(dir, &["synth", "--config", "missing.toml"]), 2);
}

#[test]
fn bad_configuration_exits_with_2() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    synth_and_ingest(dir, &[]);
    assert_eq!(code(dir, &["rank", "--algorithm", "pagerank"]), 2);
    assert_eq!(code(dir, &["evaluate", "--algorithms", "locred,bogus"]), 2);
    assert_eq!(code(dir, &["synth", "--set", "nonsense=1"]), 2);
    assert_eq!(code(dir, &["synth", "--set", "node2vec.p=0"]), 2);
    assert_eq!(code(dir, &["evaluate", "--set", "evaluation.folds=1"]), 2);
    assert_eq!(code(dir, &["embed", "--network", "bipartite"]), 2);
}

#[test]
fn reruns_reproduce_every_output() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let pipeline = |dir: &Path| {
        synth_and_ingest(dir, &["--set", "synthetic.mu=0.1"]);
        ok(
            dir,
            &with_small(&["build", "--network", "coshare", "--backbone"]),
        );
        ok(dir, &with_small(&["rank", "--algorithm", "trustrank"]));
        ok(
            dir,
            &with_small(&["embed", "--deterministic", "--threads", "2"]),
        );
        ok(
            dir,
            &with_small(&[
                "evaluate",
                "--deterministic",
                "--algorithms",
                "locred,node2vec_reshare,cohits",
            ]),
        );
    };
    pipeline(dir);
    let first = snapshot(&dir.join("out"));
    assert!(first.contains_key("embedding_reshare.bin") && first.contains_key("report.json"));
    pipeline(dir);
    let second = snapshot(&dir.join("out"));
    assert_eq!(
        first.keys().collect::<Vec<_>>(),
        second.keys().collect::<Vec<_>>()
    );
    for (name, bytes) in &first {
        assert!(bytes == &second[name], "{name} changed between runs");
    }
}

#[test]
fn seed_controls_the_report() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    synth_and_ingest(dir, &["--set", "synthetic.mu=0.2"]);
    let report = |seed: &str| {
        ok(
            dir,
            &with_small(&["evaluate", "--seed", seed, "--algorithms", "locred,cocred"]),
        );
        fs::read(dir.join("out/report.json")).unwrap()
    };
    let a = report("5");
    assert_eq!(a, report("5"));
    assert_ne!(a, report("6"));
}

#[test]
fn reshare_free_data_is_not_applicable() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    synth_and_ingest(dir, &["--set", "synthetic.reshare_fraction=0"]);
    assert_eq!(code(dir, &["build", "--network", "reshare"]), 3);
    assert_eq!(code(dir, &["build", "--network", "trust"]), 3);
    assert_eq!(code(dir, &["rank", "--algorithm", "locred"]), 3);
    assert_eq!(
        code(dir, &with_small(&["embed", "--network", "reshare"])),
        3
    );
    ok(dir, &["build", "--network", "bipartite"]);

    let out = ok(
        dir,
        &with_small(&[
            "evaluate",
            "--algorithms",
            "locred,pagerank_trust,cocred,hits",
        ]),
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout
            .lines()
            .any(|l| l.starts_with("locred") && l.contains("N/A")),
        "{stdout}"
    );

    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.join("out/report.json")).unwrap()).unwrap();
    let status: BTreeMap<String, String> = report["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            (
                r["algorithm"].as_str().unwrap().into(),
                r["status"].as_str().unwrap().into(),
            )
        })
        .collect();
    assert_eq!(status["locred"], "not_applicable");
    assert_eq!(status["pagerank_trust"], "not_applicable");
    assert_eq!(status["cocred"], "ok");
    assert_eq!(status["hits"], "ok");
    let rows = read_csv(&dir.join("out/report.csv"));
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r["network"] == "bipartite"));
}

#[test]
fn k_core_trims_a_pendant_from_a_triangle() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    // Reshares b<-a, c<-b, a<-c form a directed triangle; d reshares a once.
    write_fixture(
        dir,
        &[
            ("b", &["x.com"], Some("a")),
            ("c", &["x.com"], Some("b")),
            ("a", &["x.com"], Some("c")),
            ("d", &["x.com"], Some("a")),
        ],
        "account_id,score,label,confidence\na,80,high,1\nb,70,high,1\nc,10,low,1\nd,,,0\n",
    );
    ok(dir, &["build", "--network", "reshare"]);
    let nodes = read_csv(&dir.join("out/reshare_nodes.csv"));
    let cores: BTreeMap<&str, &str> = nodes
        .iter()
        .map(|r| (r["node"].as_str(), r["core_number"].as_str()))
        .collect();
    assert_eq!(
        cores,
        BTreeMap::from([("a", "2"), ("b", "2"), ("c", "2"), ("d", "1")])
    );
    assert_eq!(nodes[3]["score"], "");

    ok(dir, &["build", "--network", "reshare", "--k-core", "2"]);
    let nodes = read_csv(&dir.join("out/reshare_nodes.csv"));
    assert_eq!(
        nodes.iter().map(|r| r["node"].as_str()).collect::<Vec<_>>(),
        ["a", "b", "c"]
    );
    assert_eq!(nodes[2]["label"], "low");
    let edges = read_csv(&dir.join("out/reshare_edges.csv"));
    let arcs: Vec<(&str, &str)> = edges
        .iter()
        .map(|r| (r["src"].as_str(), r["dst"].as_str()))
        .collect();
    assert_eq!(arcs, [("a", "b"), ("b", "c"), ("c", "a")]);

    ok(dir, &["build", "--network", "reshare", "--k-core"]);
    assert!(read_csv(&dir.join("out/reshare_nodes.csv")).is_empty());
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.join("out/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["runs"]["build reshare"]["arguments"]["k_core"], 3);
}

#[test]
fn coshare_weights_are_tfidf_cosines() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    // Every shared domain has document frequency 2, so idf is ln 2 for all of
    // them and cancels: a = (2, 1, 0), b = (1, 0, 1), c = (0, 1, 2).
    write_fixture(
        dir,
        &[
            ("a", &["x.org", "y.org"], None),
            ("a", &["x.org"], None),
            ("b", &["x.org", "z.org"], None),
            ("c", &["y.org", "z.org"], None),
            ("c", &["z.org"], None),
            ("d", &["w.org"], None),
        ],
        "account_id,score,label,confidence\na,90,high,1\nb,90,high,1\nc,10,low,1\nd,10,low,1\n",
    );
    ok(dir, &["build", "--network", "coshare"]);
    let expect = BTreeMap::from([
        (("a", "b"), 2.0 / 10f64.sqrt()),
        (("a", "c"), 1.0 / 5.0),
        (("b", "c"), 2.0 / 10f64.sqrt()),
    ]);
    let edges = read_csv(&dir.join("out/coshare_edges.csv"));
    assert_eq!(edges.len(), 3);
    for r in &edges {
        let w: f64 = r["weight"].parse().unwrap();
        let want = expect[&(r["src"].as_str(), r["dst"].as_str())];
        assert!((w - want).abs() < 1e-12, "{r:?} vs {want}");
    }
    let nodes = read_csv(&dir.join("out/coshare_nodes.csv"));
    assert_eq!(
        nodes.iter().map(|r| r["node"].as_str()).collect::<Vec<_>>(),
        ["a", "b", "c"]
    );
}

#[test]
fn cocred_pins_known_accounts() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    synth_and_ingest(dir, &["--set", "synthetic.mu=0.1"]);
    ok(dir, &["rank", "--algorithm", "cocred"]);
    let labels: BTreeMap<String, String> = read_csv(&dir.join("out/credibilities.csv"))
        .into_iter()
        .map(|r| (r["account_id"].clone(), r["label"].clone()))
        .collect();
    let rows = read_csv(&dir.join("out/scores_cocred.csv"));
    assert_eq!(rows.len(), labels.len());
    let n_low = labels.values().filter(|l| *l == "low").count() as f64;
    let mut previous = f64::INFINITY;
    for r in &rows {
        let s: f64 = r["score"].parse().unwrap();
        assert!(s <= previous, "rows must be sorted by suspicion");
        previous = s;
        assert_eq!(r["polarity"], "suspicion");
        match labels[&r["node"]].as_str() {
            "high" => assert_eq!(s, 0.0),
            _ => assert!((s - 1.0 / n_low).abs() < 1e-12),
        }
    }
}

#[test]
fn too_few_known_accounts_for_the_folds() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write_fixture(
        dir,
        &[
            ("a", &["x.org"], None),
            ("b", &["x.org"], None),
            ("c", &["y.org"], None),
        ],
        "account_id,score,label,confidence\na,90,high,1\nb,10,low,1\nc,10,low,1\n",
    );
    assert_eq!(code(dir, &["evaluate", "--algorithms", "cocred"]), 2);
}
