use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn ellfrob(args: &[&str], cache: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ellfrob"));
    c.args(args).env_remove("ELLFROB_CACHE_DIR");
    if let Some(d) = cache {
        c.env("ELLFROB_CACHE_DIR", d);
    }
    c.output().expect("ellfrob runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", stdout(o)))
}

#[test]
fn verify_g2_passes() {
    let o = ellfrob(&["verify", "--type", "G2", "--q-order", "20"], None);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(!text.contains("FAIL"), "{text}");
    assert!(text.contains("drift q20 -> q25"), "{text}");
}

#[test]
fn e7_has_codimension_one() {
    let o = ellfrob(&["coxeter", "--type", "E", "--rank", "7", "--json"], None);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["result"]["codim"], 1);
    assert_eq!(v["result"]["d_n"], 4);
    assert_eq!(v["ok"], true);
}

#[test]
fn malformed_configs_exit_with_two() {
    for args in [
        &["describe"][..],
        &["describe", "--type", "Q9"],
        &["describe", "--type", "B1"],
        &["describe", "--type", "G2", "--rank", "3"],
        &["triplet", "--type", "G2", "--r", "x/0"],
        &["verify", "--type", "G2", "--q-order", "0"],
        &["verify", "--type", "G2", "--precision", "64"],
        &["verify", "--type", "G2", "--tol", "-1"],
        &["describe", "--type", "G2", "--no-such-flag"],
        &["expand", "/nonexistent/file.inv"],
    ] {
        let o = ellfrob(args, None);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn expand_rejects_a_malformed_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.inv");
    std::fs::write(&p, "ellfrob-invariants 1\ntype G2\ndegrees 1 1 2\nq_order 12\njet x1 1 5\n").unwrap();
    let o = ellfrob(&["expand", p.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn frobenius_needs_codimension_one() {
    let o = ellfrob(&["frobenius", "--type", "A1", "--q-order", "8"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("codimension 2"));
}

#[test]
fn same_seed_same_bytes() {
    let args = ["frobenius", "--type", "G2", "--q-order", "10", "--seed", "7", "--json"];
    let a = ellfrob(&args, None);
    let b = ellfrob(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let t1 = ellfrob(&["triplet", "--type", "D4", "--seed", "3"], None);
    let t2 = ellfrob(&["triplet", "--type", "D4", "--seed", "3"], None);
    assert_eq!(t1.stdout, t2.stdout);
}

#[test]
fn json_envelope_and_encodings() {
    let v = json(&ellfrob(&["describe", "--type", "F4", "--json"], None));
    assert_eq!(v["schema"], "ellfrob/1");
    assert_eq!(v["command"], "describe");
    assert_eq!(v["config"]["type"], "F4");
    assert!(is_rational_string(&v["result"]["c0"]));
    assert!(v["result"]["gram"][0][0].is_string());

    let v = json(&ellfrob(&["frobenius", "--type", "G2", "--q-order", "10", "--json"], None));
    let c = &v["result"]["c"];
    assert_eq!(c.as_array().unwrap().len(), 2);
    let im: f64 = c[1].as_str().unwrap().parse().unwrap();
    assert!((im + std::f64::consts::PI).abs() < 1e-12, "c = {c}");
    assert_eq!(v["result"]["metric"][0][3], "1");
    assert!(v["result"]["report"]["worst"].as_f64().unwrap() < 1e-8);
}

#[test]
fn cache_round_trip_and_expand() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let file = dir.path().join("g2.inv");
    let args = ["invariants", "--good", "--type", "G2", "--q-order", "12", "--json", "--out", file.to_str().unwrap()];

    let first = ellfrob(&args, Some(&cache));
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let v1 = json(&first);
    assert_eq!(v1["result"]["cached"], false);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let text1 = std::fs::read_to_string(&file).unwrap();

    let second = ellfrob(&args, Some(&cache));
    let v2 = json(&second);
    assert_eq!(v2["result"]["cached"], true);
    assert_eq!(v1["result"]["goodness_report"], v2["result"]["goodness_report"]);
    assert_eq!(text1, std::fs::read_to_string(&file).unwrap());

    // Each jet of the file is the corresponding basic invariant: expand returns x^a itself.
    let o = ellfrob(&["expand", file.to_str().unwrap(), "--json"], Some(&cache));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["config"]["type"], "G2");
    let exps = v["result"]["expansions"].as_array().unwrap();
    assert_eq!(exps.len(), 3);
    for (a, e) in exps.iter().enumerate() {
        let mut want = vec![0u64; 3];
        want[a] = 1;
        for t in e["coefficients"].as_array().unwrap() {
            let b: Vec<u64> = t["x"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
            let mag = t["series"]["terms"]
                .as_array()
                .unwrap()
                .iter()
                .map(|c| {
                    let q = c["q"].as_str().unwrap();
                    let re: f64 = c["c"][0].as_str().unwrap().parse().unwrap();
                    let im: f64 = c["c"][1].as_str().unwrap().parse().unwrap();
                    let one = if b == want && q == "0" { 1.0 } else { 0.0 };
                    (re - one).hypot(im)
                })
                .fold(0.0, f64::max);
            assert!(mag < 1e-20, "x{} coefficient of {b:?}: {mag:e}", a + 1);
        }
    }
}

#[test]
fn text_artifact_goes_to_stdout_without_out() {
    let o = ellfrob(&["invariants", "--type", "G2", "--q-order", "8"], None);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("ellfrob-invariants 1\n") && s.ends_with("end\n"));
}

#[test]
fn triplet_signatures_by_r() {
    for (r, sig) in [("-1", [3, 0, 1]), ("0", [3, 1, 0]), ("1", [4, 0, 0])] {
        let v = json(&ellfrob(&["triplet", "--type", "B3", "--r", r, "--json"], None));
        assert_eq!(v["ok"], true, "r = {r}");
        let got: Vec<u64> = v["result"]["signature"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
        assert_eq!(got, sig, "r = {r}");
    }
}

/// Exact values are "p" or "p/q" strings.
fn is_rational_string(v: &Value) -> bool {
    let Some(s) = v.as_str() else { return false };
    let mut parts = s.splitn(2, '/');
    let p = parts.next().unwrap_or("");
    p.parse::<i64>().is_ok() && parts.next().map_or(true, |q| q.parse::<u64>().map_or(false, |q| q > 0))
}

#[test]
fn verify_fails_when_a_residual_exceeds_the_tolerance() {
    let o = ellfrob(&["verify", "--type", "G2", "--q-order", "10", "--tol", "1e-40", "--skip-drift"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL theta W-invariance"));
    // Double precision cannot carry the goodness normalization.
    let o = ellfrob(&["verify", "--type", "G2", "--q-order", "10", "--precision", "53", "--skip-drift", "--json"], None);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["result"]["passed"], false);
}
