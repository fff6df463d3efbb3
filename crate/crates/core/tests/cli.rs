mod common;

use std::path::{Path, PathBuf};

use msp_localization::cli::run;
use msp_localization::format::{parse_graph, write_graph};
use msp_localization::graph::{is_pure_loop, is_regular, DecoratedGraph, GraphBuilder, Level};
use msp_localization::Rat;
use tempfile::TempDir;

struct Output {
    code: u8,
    out: String,
    err: String,
}

fn msp(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("msp-loc").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Output { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn graph_file(dir: &TempDir, name: &str, g: &DecoratedGraph) -> PathBuf {
    file(dir, name, &write_graph(g))
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_round_trips_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    for (i, g) in [common::string_graph(), common::pure_loop(4, &[1, 2])].iter().enumerate() {
        let text = write_graph(g);
        let path = file(&dir, &format!("g{i}.json"), &text);
        let o = msp(&["validate", arg(&path)]);
        assert_eq!(o.code, 0, "{}", o.err);
        assert_eq!(o.out, format!("{text}\n"));
        assert_eq!(parse_graph(o.out.trim_end()).unwrap(), *g);
    }
}

#[test]
fn vdim_of_the_string_graph() {
    let dir = TempDir::new().unwrap();
    let path = graph_file(&dir, "string.json", &common::string_graph());
    let o = msp(&["vdim", "--pretty", arg(&path)]);
    assert_eq!((o.code, o.out.as_str()), (0, "-4 2 6 → 4\n"));
    let o = msp(&["vdim", arg(&path)]);
    let doc: serde_json::Value = serde_json::from_str(&o.out).unwrap();
    assert_eq!(doc["total"], "4");
    assert_eq!(doc["dim_d"], "-4");
}

#[test]
fn certify_verdicts_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let path = graph_file(&dir, "loop.json", &common::pure_loop(4, &[1]));
    let o = msp(&["certify", arg(&path)]);
    assert_eq!(o.code, 0);
    let doc: serde_json::Value = serde_json::from_str(&o.out).unwrap();
    assert_eq!(doc["verdict"], "PureLoop");
    assert_eq!(doc["trace"], serde_json::json!([]));
    assert_eq!(doc["terminal_vdims"], serde_json::json!([]));

    let path = graph_file(&dir, "string.json", &common::string_graph());
    let o = msp(&["certify", arg(&path)]);
    assert_eq!(o.code, 1);
    assert!(o.out.contains("\"Invalid\""));

    let mut b = GraphBuilder::new();
    let a = b.stable(Level::Zero, 1);
    let z = b.stable(Level::Infinity, 1);
    b.e0inf(a, z, Rat::ONE);
    let path = graph_file(&dir, "edge.json", &b.build());
    let o = msp(&["certify", "--pretty", arg(&path)]);
    assert_eq!(o.code, 0);
    assert!(o.out.starts_with("verdict: Vanishes\n"), "{}", o.out);

    let o = msp(&["certify", "--nmsp", "3", arg(&path)]);
    assert_eq!(o.code, 1);
    assert_eq!(o.err.lines().count(), 1);
}

#[test]
fn usage_and_parse_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(msp(&["frobnicate"]).code, 2);
    assert_eq!(msp(&["validate", "/nonexistent/graph.json"]).code, 2);
    assert_eq!(msp(&["enumerate", "--max-deg", "0"]).code, 2);

    let bad = file(
        &dir,
        "bad.json",
        r#"{"vertices":[{"id":0,"level":"2","genus":0,"deg0":"0","degInf":"0","stable":true}],"edges":[],"legs":[]}"#,
    );
    let o = msp(&["validate", arg(&bad)]);
    assert_eq!(o.code, 2);
    assert_eq!(o.err.lines().count(), 1);
    assert!(o.err.contains("vertices[0].level"), "{}", o.err);

    let extra = file(&dir, "extra.json", r#"{"vertices":[],"edges":[],"legs":[],"colour":1}"#);
    assert_eq!(msp(&["validate", arg(&extra)]).code, 2);
}

#[test]
fn invalid_graphs_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let mut b = GraphBuilder::new();
    let v0 = b.stable(Level::Zero, 0);
    let v1 = b.point(Level::One);
    b.edge(v0, v1, Rat::int(-1), Rat::ZERO, false, false);
    let path = graph_file(&dir, "neg.json", &b.build());
    for cmd in ["validate", "flatten", "weights", "vdim", "certify"] {
        let o = msp(&[cmd, arg(&path)]);
        assert_eq!(o.code, 1, "{cmd}");
    }
}

#[test]
fn weights_are_printed_as_fractions() {
    let dir = TempDir::new().unwrap();
    let mut b = GraphBuilder::new();
    let a = b.stable(Level::Zero, 0);
    let c = b.point(Level::One);
    b.e01(a, c, Rat::int(2));
    let path = graph_file(&dir, "e01.json", &b.build());
    let o = msp(&["weights", arg(&path)]);
    assert_eq!(o.code, 0);
    let doc: serde_json::Value = serde_json::from_str(&o.out).unwrap();
    assert_eq!(doc["edges"][0]["low"], "1/2");
    assert_eq!(doc["edges"][0]["high"], "-1/2");
    assert_eq!(doc["levels"].as_array().unwrap().len(), 3);
}

#[test]
fn flatten_removes_balanced_nodes() {
    let dir = TempDir::new().unwrap();
    let mut b = GraphBuilder::new();
    let v0 = b.point(Level::Zero);
    let v1 = b.point(Level::One);
    let vi = b.stable(Level::Infinity, 0);
    b.e01(v0, v1, Rat::ONE);
    b.e1inf(v1, vi, Rat::int(-1), true);
    let path = graph_file(&dir, "elbow.json", &b.build());
    let o = msp(&["flatten", arg(&path)]);
    assert_eq!(o.code, 0);
    let flat = parse_graph(o.out.trim_end()).unwrap();
    assert_eq!((flat.vertices().len(), flat.edges().len()), (2, 1));
}

#[test]
fn lg_index_table() {
    let o = msp(&["lg-index", "--genus", "0", "--m-max", "4", "--d-max", "1"]);
    assert_eq!(o.code, 0);
    let rows: Vec<serde_json::Value> = o.out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let pairs: Vec<(u64, u64)> =
        rows.iter().map(|r| (r["m"].as_u64().unwrap(), r["d_prime"].as_u64().unwrap())).collect();
    assert_eq!(pairs, vec![(1, 0), (1, 1), (4, 0), (4, 1)]);
    assert!(rows.iter().all(|r| r["vdim"] == r["m"]));
}

fn verdict_lines(out: &str) -> Vec<(DecoratedGraph, &str)> {
    out.lines()
        .map(|line| {
            let (graph, verdict) = line.split_once('\t').unwrap();
            (parse_graph(graph).unwrap(), verdict)
        })
        .collect()
}

#[test]
fn enumerate_and_certify_matches_golden_file() {
    let args = ["enumerate", "--max-edges", "2", "--max-legs", "0", "--max-deg", "1", "--certify", "--jobs", "1"];
    let o = msp(&args);
    assert_eq!(o.code, 0);
    assert_eq!(o.out, include_str!("data/enumerate_e2_l0_d1_certify.tsv"));
    assert_eq!(msp(&args).out, o.out);
}

#[test]
fn enumerate_with_default_caps_certifies_every_irregular_graph() {
    let o = msp(&["enumerate", "--max-edges", "2", "--certify"]);
    assert_eq!(o.code, 0);
    let mut tally = [0usize; 3];
    for (g, verdict) in verdict_lines(&o.out) {
        let slot = match (is_regular(&g), is_pure_loop(&g)) {
            (_, true) => 0,
            (true, false) => 1,
            (false, false) => 2,
        };
        let expected = ["PureLoop", "RegularNotCovered", "Vanishes"][slot];
        assert_eq!(verdict, expected, "{}", write_graph(&g));
        tally[slot] += 1;
    }
    assert_eq!(tally, [19, 22718, 6755]);
}
