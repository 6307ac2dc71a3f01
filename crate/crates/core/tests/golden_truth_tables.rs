use std::collections::BTreeMap;

use hyperconc::devices::truth_tables;
use serde_json::Value;

const GOLDEN: &str = include_str!("golden/truth_tables.json");

fn rows() -> Vec<Value> {
    serde_json::from_str(&serde_json::to_string(&truth_tables().unwrap()).unwrap()).unwrap()
}

fn find<'a>(rows: &'a [Value], device: &str, input: &str) -> &'a Value {
    rows.iter()
        .find(|r| r["device"] == device && r["input"] == input)
        .unwrap_or_else(|| panic!("no row {device} {input}"))
}

#[test]
fn truth_tables_match_golden_file() {
    let golden: Value = serde_json::from_str(GOLDEN).unwrap();
    assert_eq!(Value::Array(rows()), golden);
    let pretty = serde_json::to_string_pretty(&truth_tables().unwrap()).unwrap();
    assert_eq!(pretty, GOLDEN.trim_end());
}

fn terms(row: &Value) -> BTreeMap<String, f64> {
    row["routed_terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| (t[0].as_str().unwrap().to_string(), t[1].as_f64().unwrap()))
        .collect()
}

fn photons_at(term: &str) -> (usize, usize) {
    let port1 = term.matches("@x1").count();
    (port1, term.split_whitespace().count() - port1)
}

#[test]
fn parity_check_routing_by_parity_class() {
    let rows = rows();
    // Even parity: one photon stays, one reaches the detectors, in every term.
    for input in ["|HH>(x1u+x1d)(x2u+x2d)/2", "|VV>(x1u+x1d)(x2u+x2d)/2"] {
        let r = find(&rows, "PPC", input);
        let t = terms(r);
        assert_eq!(t.len(), 4);
        assert!(t.iter().all(|(k, &a)| photons_at(k) == (1, 1) && (a - 0.5).abs() < 1e-12));
        assert_eq!(r["accept_pnr"], 1.0);
        assert_eq!(r["verdict"], "1 detector photons, Accept");
    }
    // |HV>: both photons end on port 1.
    let r = find(&rows, "PPC", "|HV>(x1u+x1d)(x2u+x2d)/2");
    assert!(terms(r).keys().all(|k| photons_at(k) == (2, 0)));
    assert_eq!(r["verdict"], "0 detector photons, both port 1, Reject");
    // |VH>: both photons reach the detectors.
    let r = find(&rows, "PPC", "|VH>(x1u+x1d)(x2u+x2d)/2");
    assert!(terms(r).keys().all(|k| photons_at(k) == (0, 2)));
    assert_eq!(r["verdict"], "2 detector photons, Reject");
    assert_eq!(r["false_accept_bucket"], 1.0);
    let r = find(&rows, "improved PPC", "|VH>(x1u+x1d)(x2u+x2d)/2");
    assert_eq!(r["false_accept_bucket"], 0.0);
    assert_eq!(r["shared_detector"], 0.0);
}

#[test]
fn spatial_check_routing() {
    let rows = rows();
    for pol in ["HH", "VV"] {
        for (modes, verdict) in [
            ("y1u y2u", "1 detector photons, Accept"),
            ("y1d y2d", "1 detector photons, Accept"),
            ("y1u y2d", "0 detector photons, both port 1, Reject"),
            ("y1d y2u", "2 detector photons, Reject"),
        ] {
            let r = find(&rows, "SPC", &format!("|{pol}>|{modes}>"));
            assert_eq!(r["verdict"], verdict, "{pol} {modes}");
        }
        // The two detector photons bunch half of the time.
        let r = find(&rows, "SPC", &format!("|{pol}>|y1d y2u>"));
        assert_eq!(r["false_accept_bucket"], 0.5);
    }
}
