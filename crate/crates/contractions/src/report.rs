//! Encoding of core results as document values.

use contractions_core::order::RelationVerdict;
use contractions_core::verdict::{Certificate, Diagnostics, OrderVerdict, Witness};
use contractions_core::Subspace;
use serde_json::{json, Value};

use crate::config::Config;
use crate::document::{complex, matrix, real};

pub fn subspace(s: &Subspace) -> Value {
    json!({
        "dim": s.dim(),
        "ambient_dim": s.ambient_dim(),
        "frame": matrix(s.frame()),
    })
}

pub fn certificate(c: &Certificate) -> Value {
    let body = match c {
        Certificate::Dimension { dim_a, dim_b } => json!({ "dim_a": dim_a, "dim_b": dim_b }),
        Certificate::Defect {
            defect_a,
            codefect_a,
            defect_b,
            codefect_b,
        } => json!({
            "defect_a": defect_a,
            "codefect_a": codefect_a,
            "defect_b": defect_b,
            "codefect_b": codefect_b,
        }),
        Certificate::PointSpectrum {
            eigenvalue,
            multiplicity_a,
            multiplicity_b,
        } => json!({
            "eigenvalue": complex(*eigenvalue),
            "multiplicity_a": multiplicity_a,
            "multiplicity_b": multiplicity_b,
        }),
        Certificate::WordTrace {
            word,
            trace_a,
            trace_b,
        } => json!({
            "word": word,
            "trace_a": complex(*trace_a),
            "trace_b": complex(*trace_b),
        }),
        Certificate::SingularValueProduct { point, k, lhs, rhs } => json!({
            "point": point,
            "k": k,
            "lhs": real(*lhs),
            "rhs": real(*rhs),
        }),
        Certificate::BlockShape { left, right } => json!({
            "left": [left.0, left.1],
            "right": [right.0, right.1],
        }),
    };
    let mut out = json!({ "kind": c.kind() });
    if let (Value::Object(out), Value::Object(body)) = (&mut out, body) {
        out.extend(body);
    }
    out
}

pub fn witness(w: &Witness) -> Value {
    match w {
        Witness::Isometry(m) => json!({ "kind": "isometry", "omega": matrix(m) }),
        Witness::Coincidence { tau, tau_prime } => json!({
            "kind": "coincidence",
            "tau": matrix(tau),
            "tau_prime": matrix(tau_prime),
        }),
    }
}

pub fn diagnostics(d: &Diagnostics) -> Value {
    json!({
        "starts_used": d.starts_used,
        "iterations": d.iterations,
        "best_residual": real(d.best_residual),
        "grid_points": d.grid_points,
        "notes": d.notes,
    })
}

/// A verdict with the configuration that produced it.
pub fn verdict(v: &OrderVerdict, config: &Config) -> Value {
    json!({
        "status": v.status.as_str(),
        "witness": v.witness.as_ref().map(witness),
        "certificate": v.certificate.as_ref().map(certificate),
        "diagnostics": diagnostics(&v.diagnostics),
        "config": config,
    })
}

pub fn relation_verdict(v: &RelationVerdict, config: &Config) -> Value {
    json!({
        "relation": v.relation.as_str(),
        "status": v.status.as_str(),
        "forward": verdict(&v.forward, config),
        "reverse": v.reverse.as_ref().map(|r| verdict(r, config)),
        "config": config,
    })
}
