//! Plain-text renderings of the JSON reports.

use serde_json::Value;

/// `key: value` lines for the top-level fields of an object.
pub fn fields(v: &Value) -> String {
    match v.as_object() {
        Some(o) => o.iter().map(|(k, x)| format!("{k}: {x}\n")).collect(),
        None => format!("{v}\n"),
    }
}

fn weight_list(v: &Value) -> String {
    v.as_array()
        .map(|entries| {
            entries
                .iter()
                .map(|e| format!("{}x{}", e["weight"], e["multiplicity"]))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .unwrap_or_default()
}

pub fn weights(v: &Value) -> String {
    let mut s = format!(
        "weights: {}\nfixed dimension: {}\ntrivial weight: {}\n",
        weight_list(&v["weights"]),
        v["fixed_dim"],
        v["has_trivial_weight"]
    );
    for l in v["layers"].as_array().into_iter().flatten() {
        s += &format!(
            "layer {}: dim {}, compact {}, weights {}\n",
            l["layer"],
            l["dim"],
            l["compact_dim"],
            weight_list(&l["weights"])
        );
    }
    s
}

pub fn decision(v: &Value) -> String {
    let mut s = format!("verdict: {}\n", v["verdict"].as_str().unwrap_or("?"));
    for (k, c) in v["conditions"].as_object().into_iter().flatten() {
        s += &format!("  ({k}) {}: {}\n", c["statement"].as_str().unwrap_or(""), c["holds"]);
    }
    for l in v["layer_reports"].as_array().into_iter().flatten() {
        s += &format!(
            "  layer {}: weights {} trivial-weight-free {}\n",
            l["layer"],
            weight_list(&l["weights"]),
            l["trivial_weight_free"]
        );
    }
    if let Some(d) = v.get("sampling") {
        s += &format!("  elliptic density: {} ({} undetermined)\n", d["fraction"], d["undetermined"]);
    }
    for w in v["warnings"].as_array().into_iter().flatten() {
        s += &format!("  warning: {}\n", w.as_str().unwrap_or(""));
    }
    s
}

pub fn battery(v: &Value) -> String {
    let mut s = format!("all conditions: {}\n", v["value"]);
    for (k, c) in v["conditions"].as_object().into_iter().flatten() {
        s += &format!("  ({k}) {} [{}]: {}\n", c["statement"].as_str().unwrap_or(""), c["method"].as_str().unwrap_or(""), c["holds"]);
    }
    s
}

pub fn gallery(v: &Value) -> String {
    let mut s = String::new();
    for e in v["entries"].as_array().into_iter().flatten() {
        let mark = if e["passed"] == Value::Bool(true) { "pass" } else { "FAIL" };
        s += &format!("{mark} {}: {}\n", e["name"].as_str().unwrap_or(""), e["summary"].as_str().unwrap_or(""));
        for c in e["checks"].as_array().into_iter().flatten() {
            let mark = if c["passed"] == Value::Bool(true) { "ok" } else { "failed" };
            s += &format!("    {} {mark}\n", c["name"].as_str().unwrap_or(""));
        }
    }
    s
}
