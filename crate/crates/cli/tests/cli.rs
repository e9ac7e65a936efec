use std::process::{Command, Output};

use serde_json::Value;

fn baxterq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_baxterq"))
        .args(args)
        .env_remove("BAXTERQ_PRECISION_DIGITS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_all_default_chain_passes() {
    let out = baxterq(&["verify", "--all", "-L", "2", "-p", "2/3", "-q", "3/5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["all_passed"], true);
    assert_eq!(doc["reports"].as_array().unwrap().len(), 20);
    assert!(doc["precision_digits"].is_u64());
}

#[test]
fn verify_single_relation_reports_exact_zero() {
    let out = baxterq(&["verify", "--relation", "tq_equation", "-L", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let r = &doc["reports"][0];
    assert_eq!(r["name"], "tq_equation");
    assert_eq!(r["max_deviation"], "0/1");
    assert_eq!(r["mode"], "exact_polynomial");
}

#[test]
fn pole_parameters_are_usage_errors() {
    let out = baxterq(&["verify", "-p", "1/1", "-q", "1/1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("integer"));
    assert_eq!(baxterq(&["verify", "-p", "two/3"]).status.code(), Some(2));
    assert_eq!(baxterq(&["verify", "-r", "no_such_check"]).status.code(), Some(2));
    assert_eq!(baxterq(&["verify", "-r", "monodromy_bybe", "-L", "3"]).status.code(), Some(2));
    assert_eq!(baxterq(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn perturbation_fails_with_witness() {
    let out = baxterq(&["verify", "-r", "rll", "-r", "unitarity_lax", "--perturb", "L+:0:1"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    assert_eq!(doc["all_passed"], false);
    let r = &doc["reports"][0];
    assert_eq!(r["verdict"], "fail");
    assert!(r["witness"]["lhs"].is_string());
}

#[test]
fn refused_checks_do_not_fail_the_run() {
    let out = baxterq(&["verify", "-L", "5", "-r", "ybe"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn build_q_plus_single_site() {
    let out = baxterq(&["build", "--op", "Q+", "-L", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["operator"], "Q+");
    assert_eq!(doc["blocks"][0]["m"], 0);
    // -1/(p + q + 1) at p = 2/3, q = 3/5
    assert_eq!(doc["blocks"][0]["entries"], serde_json::json!([[["-15/34"]]]));
}

#[test]
fn build_transfer_degree() {
    let doc = json(&baxterq(&["build", "--op", "T", "-L", "2"]));
    let mut max_len = 0;
    for block in doc["blocks"].as_array().unwrap() {
        for row in block["entries"].as_array().unwrap() {
            for e in row.as_array().unwrap() {
                max_len = max_len.max(e.as_array().unwrap().len());
            }
        }
    }
    // degree 2L + 2: leading term 2z^6 on the diagonal
    assert_eq!(max_len, 7);
}

#[test]
fn build_round_trips_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("qm.json");
    let out = baxterq(&["build", "--op", "Q-", "-L", "2", "-p", "-2/7", "-q", "5/9", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let doc = baxterq_core::io::OperatorDocument::from_json(&text).unwrap();
    let op = doc.to_operator().unwrap();
    let params = baxterq_core::ChainParams::new(2, baxterq_core::exact::rat(-2, 7), baxterq_core::exact::rat(5, 9)).unwrap();
    assert_eq!(op, baxterq_core::operators::q_operator(&params, baxterq_core::Sign::Minus).unwrap());
}

#[test]
fn bethe_sector_one_csv() {
    let out = baxterq(&["bethe", "-L", "2", "--sector", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "residual").unwrap();
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        let residual: f64 = row.split(',').nth(col).unwrap().parse().unwrap();
        assert!(residual < 1e-8);
    }
}

#[test]
fn spectrum_energies_match_hamiltonian() {
    let out = baxterq(&["spectrum", "-L", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["energies"]["transfer_matches_exact"], true);
    assert!(doc["energies"]["max_deviation"].as_f64().unwrap() < 1e-9);
    assert_eq!(doc["records"].as_array().unwrap().len(), 4);
}

#[test]
fn oracle_table_converges_monotonically() {
    let out = baxterq(&["oracle", "--cutoff", "8,16,32,64", "-L", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let scans = doc["scans"].as_array().unwrap();
    assert!(!scans.is_empty());
    for s in scans {
        assert_eq!(s["monotone"], true);
        assert_eq!(s["rows"].as_array().unwrap().len(), 4);
    }
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        &["verify", "-r", "ybe", "-r", "trace_formula"][..],
        &["spectrum", "-L", "3", "--format", "csv"][..],
        &["bethe", "-L", "3", "--sign", "-"][..],
    ] {
        assert_eq!(baxterq(args).stdout, baxterq(args).stdout);
    }
}

#[test]
fn precision_env_controls_digits() {
    let run = |d: &str| {
        Command::new(env!("CARGO_BIN_EXE_baxterq"))
            .args(["bethe", "-L", "2", "--sector", "1"])
            .env("BAXTERQ_PRECISION_DIGITS", d)
            .output()
            .unwrap()
    };
    let out = run("4");
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["precision_digits"], 4);
    let e = doc["records"][0]["energy"].as_f64().unwrap();
    assert_eq!(e, format!("{e:.3e}").parse::<f64>().unwrap());
    assert_eq!(run("0").status.code(), Some(2));
}
