//! CSV and JSON renderings of experiment results.
//!
//! Floats are written with Rust's shortest round-trip formatting, so output
//! is locale independent and byte-stable for equal values.

use std::io::{self, Write};

use serde_json::{json, Map, Value};

use crate::experiment::{ExperimentResult, Output};

pub const CSV_HEADER: [&str; 15] = [
    "n",
    "mu",
    "k",
    "trials",
    "seed",
    "p_connected",
    "ci_low",
    "ci_high",
    "mean_y",
    "p_y_zero",
    "upper_bound",
    "lower_bound",
    "lower_bound_valid",
    "second_moment_bound",
    "union_bound",
];

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One CSV row per result. Absent bounds are empty fields.
pub fn write_csv<W: Write>(results: &[ExperimentResult], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in results {
        let b = &r.bounds;
        w.write_record([
            r.params.n().to_string(),
            join(r.params.mu()),
            join(r.params.k()),
            r.trials.to_string(),
            r.master_seed.to_string(),
            r.empirical_p_connected.to_string(),
            r.ci_low.to_string(),
            r.ci_high.to_string(),
            r.mean_y.to_string(),
            r.empirical_p_y_zero.to_string(),
            b.upper_bound_asymptotic.to_string(),
            opt(b.lower_bound_one_law),
            opt(b.lower_bound_valid),
            opt(b.second_moment_upper_bound),
            b.union_bound_disconnect_clamped.to_string(),
        ])?;
    }
    w.flush()
}

/// JSON object for one result, keeping only the selected sections.
pub fn result_json(r: &ExperimentResult, outputs: &[Output]) -> Value {
    let mut obj = Map::new();
    obj.insert("params".into(), json!(r.params));
    obj.insert("trials".into(), json!(r.trials));
    obj.insert("master_seed".into(), json!(r.master_seed));
    obj.insert("confidence_level".into(), json!(r.confidence_level));
    obj.insert("connected_trials".into(), json!(r.connected_trials));
    obj.insert("empirical_p_connected".into(), json!(r.empirical_p_connected));
    obj.insert("ci_low".into(), json!(r.ci_low));
    obj.insert("ci_high".into(), json!(r.ci_high));
    if outputs.contains(&Output::YStats) {
        obj.insert("mean_y".into(), json!(r.mean_y));
        obj.insert("var_y".into(), json!(r.var_y));
        obj.insert("empirical_p_y_zero".into(), json!(r.empirical_p_y_zero));
    }
    if outputs.contains(&Output::EdgeCount) {
        obj.insert("mean_edges".into(), json!(r.mean_edges));
        obj.insert("var_edges".into(), json!(r.var_edges));
    }
    if outputs.contains(&Output::ComponentHistogram) {
        if let Some(h) = &r.component_histogram {
            let m: Map<String, Value> = h.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            obj.insert("component_histogram".into(), Value::Object(m));
        }
    }
    obj.insert("bounds".into(), json!(r.bounds));
    Value::Object(obj)
}

/// A single result as an object, several as an array; pretty printed with a
/// trailing newline.
pub fn write_json<W: Write>(
    results: &[ExperimentResult],
    outputs: &[Output],
    mut out: W,
) -> io::Result<()> {
    let value = match results {
        [one] => result_json(one, outputs),
        many => Value::Array(many.iter().map(|r| result_json(r, outputs)).collect()),
    };
    serde_json::to_writer_pretty(&mut out, &value)?;
    writeln!(out)
}
