//! JSON renderings of obligations and discharge reports.
//!
//! Everything except the `timestamp` field is a function of the inputs, so
//! two runs can be compared after dropping it.

use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::proofkit::{proof_digest, sort_proof_digest};
use crate::syntax::{parse_sexps, Sexp};
use crate::translate::{DischargeReport, Evidence, Obligation, Status};

pub const SCHEMA_VERSION: u64 = 1;
pub const TIMESTAMP_FIELD: &str = "timestamp";

/// Proof text as nested arrays of strings.
fn nested(text: &str) -> Value {
    fn go(s: &Sexp) -> Value {
        match s {
            Sexp::Atom(a, _) => Value::String(a.clone()),
            Sexp::List(items, _) => Value::Array(items.iter().map(go).collect()),
        }
    }
    match parse_sexps(text).as_deref() {
        Ok([one]) => go(one),
        _ => Value::String(text.to_string()),
    }
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn obligation_fields(o: &Obligation) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("rule".into(), json!(o.source_rule.as_str()));
    m.insert("kind".into(), json!(o.kind.as_str()));
    m.insert("statement".into(), json!(o.to_string()));
    m
}

pub fn obligations_json(compiler: &str, obls: &[Obligation]) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "compiler": compiler,
        TIMESTAMP_FIELD: now(),
        "obligations": obls.iter().map(|o| Value::Object(obligation_fields(o))).collect::<Vec<_>>(),
    })
}

pub fn report_json(compiler: &str, report: &DischargeReport) -> Value {
    let entries: Vec<Value> = report
        .entries
        .iter()
        .map(|e| {
            let mut m = obligation_fields(&e.obligation);
            m.insert("status".into(), json!(e.status.label()));
            m.insert("replayed".into(), json!(e.replayed));
            let (steps, digest, proof, reason) = match &e.status {
                Status::Auto { evidence, steps } => match evidence {
                    Evidence::Wf => (*steps, Value::Null, Value::Null, Value::Null),
                    Evidence::Term(p) => (*steps, json!(proof_digest(p)), nested(&p.to_string()), Value::Null),
                    Evidence::Sort(p) => (*steps, json!(sort_proof_digest(p)), nested(&p.to_string()), Value::Null),
                },
                Status::Manual { proof, .. } => (0, json!(proof_digest(proof)), nested(&proof.to_string()), Value::Null),
                Status::Open { reason } => (0, Value::Null, Value::Null, json!(reason)),
            };
            m.insert("steps".into(), json!(steps));
            m.insert("digest".into(), digest);
            m.insert("proof".into(), proof);
            if !reason.is_null() {
                m.insert("reason".into(), reason);
            }
            Value::Object(m)
        })
        .collect();
    json!({
        "schema": SCHEMA_VERSION,
        "compiler": compiler,
        TIMESTAMP_FIELD: now(),
        "summary": {
            "obligations": report.entries.len(),
            "auto": report.count("auto"),
            "manual": report.count("manual"),
            "open": report.count("open"),
        },
        "obligations": entries,
    })
}

/// Drops the timestamp so reports from different runs compare equal.
pub fn without_timestamp(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.remove(TIMESTAMP_FIELD);
    }
    v
}
