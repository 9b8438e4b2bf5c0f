use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nodeloc"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Stdout without the provenance header, which embeds absolute paths.
fn body(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter(|l| !l.starts_with("# nodeloc"))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[test]
fn analyze_all_mechanisms() {
    let out = run(&["analyze", "--topology", &fixture("sample.edges")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.starts_with("# nodeloc 0.1.0 schema=1 command=analyze seed=- flags="));
    assert_eq!(
        body(&out),
        "node,degree,monitor_degree,non_monitor_degree,cap_lo,cap_hi,csp_lo,csp_hi,up_lo,up_hi\n\
         v1,3,2,1,4,4,4,4,4,4\n\
         v2,4,1,3,4,4,3,3,1,1\n\
         v3,3,2,1,4,4,4,4,4,4\n\
         v4,3,2,1,4,4,4,4,0,0\n"
    );
}

#[test]
fn analyze_given_paths_with_set() {
    let out = run(&[
        "analyze",
        "--topology",
        &fixture("sample.edges"),
        "--paths",
        &fixture("sample_up.paths"),
        "--set",
        "v1,v2,v4",
    ]);
    assert!(out.status.success());
    assert_eq!(
        body(&out),
        "# set v1,v2,v4: up=1\n\
         node,degree,monitor_degree,non_monitor_degree,up_lo,up_hi\n\
         v1,3,2,1,4,4\n\
         v4,3,2,1,4,4\n\
         v2,4,1,3,1,1\n\
         v3,3,2,1,0,0\n"
    );
}

#[test]
fn maxset_and_ccdf_for_given_paths() {
    let topo = fixture("sample.edges");
    let paths = fixture("sample_up.paths");
    let out = run(&["maxset", "--topology", &topo, "--paths", &paths]);
    assert_eq!(
        body(&out),
        "mechanism,k,inner,outer,exact\n\
         up,1,v1 v2 v4,v1 v2 v4,true\n\
         up,2,v1 v4,v1 v4,true\n\
         up,3,v1 v4,v1 v4,true\n\
         up,4,v1 v4,v1 v4,true\n"
    );
    let out = run(&["ccdf", "--topology", &topo, "--paths", &paths]);
    assert_eq!(body(&out), "k,up_inner,up_outer\n1,0.75,0.75\n2,0.5,0.5\n3,0.5,0.5\n4,0.5,0.5\n");
}

#[test]
fn ccdf_simple_paths_given_exact() {
    let out = run(&[
        "ccdf",
        "--topology",
        &fixture("sample.edges"),
        "--paths",
        &fixture("sample_csp.paths"),
        "--exact",
    ]);
    assert!(out.status.success());
    assert_eq!(body(&out), "k,up_inner,up_outer\n1,1,1\n2,1,1\n3,1,1\n4,0.75,0.75\n");
}

#[test]
fn oracle_answers() {
    let topo = fixture("sample.edges");
    let out = run(&[
        "oracle",
        "--topology",
        &topo,
        "--paths",
        &fixture("sample_up.paths"),
        "--set",
        "v1,v2,v4",
        "--k",
        "2",
    ]);
    assert!(out.status.success());
    assert_eq!(body(&out), "identifiable,k,set\nfalse,2,\"v1,v2,v4\"\n");
    let out = run(&["oracle", "--topology", &topo, "--mechanism", "csp"]);
    assert_eq!(body(&out), "node,omega,min_cover\nv1,4,\nv2,3,\nv3,4,\nv4,4,\n");
}

#[test]
fn chain_json() {
    let out = run(&[
        "analyze",
        "--topology",
        &fixture("chain.edges"),
        "--mechanism",
        "csp",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = doc["report"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert_eq!(row["omega"][0]["hi"], 0);
    }
}

#[test]
fn gen_is_reproducible_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.edges");
    let file = file.to_str().unwrap();
    let args = ["gen", "--nodes", "9", "-p", "0.4", "--mu", "3", "--seed", "11", "--out", file];
    assert!(run(&args).status.success());
    let first = std::fs::read_to_string(file).unwrap();
    assert!(run(&args).status.success());
    assert_eq!(first, std::fs::read_to_string(file).unwrap());
    assert!(first.contains("# monitors: "));
    let out = run(&["analyze", "--topology", file, "--mechanism", "cap"]);
    assert!(out.status.success());
    assert_eq!(body(&out).lines().count(), 1 + 6);
}

#[test]
fn verify_batch_and_fault() {
    let batch = fixture("small_batch.toml");
    let out = run(&["verify", "--batch", &batch]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["instances"], 12);
    let out = run(&["verify", "--batch", &batch, "--inject-fault"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_codes() {
    let topo = fixture("sample.edges");
    assert_eq!(run(&["analyze"]).status.code(), Some(1));
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    let conflict = run(&["analyze", "--topology", &topo, "--mechanism", "cap", "--paths", &fixture("sample_up.paths")]);
    assert_eq!(conflict.status.code(), Some(1));
    assert_eq!(run(&["analyze", "--topology", "/no/such/file"]).status.code(), Some(2));
    let unknown = run(&["analyze", "--topology", &topo, "--monitors", "m1,zz"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("zz"));
}

#[test]
fn enumeration_cap_is_an_error() {
    let out = run(&[
        "analyze",
        "--topology",
        &fixture("sample.edges"),
        "--mechanism",
        "csp",
        "--exact",
        "--max-edges",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn set_query_answers_with_rules() {
    let out = run(&["analyze", "--topology", &fixture("sample.edges"), "--set", "v1,v2,v4", "--k", "2"]);
    assert!(out.status.success());
    let text = body(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# set v1,v2,v4: cap=4 csp=3 up=0"));
    assert_eq!(
        lines.next(),
        Some(
            "# set v1,v2,v4 k=2: cap=identifiable (star-cut) csp=identifiable (cut-sufficient) \
             up=not-identifiable (cover-necessary)"
        )
    );
    assert_eq!(run(&["analyze", "--topology", &fixture("sample.edges"), "--k", "2"]).status.code(), Some(1));
}
