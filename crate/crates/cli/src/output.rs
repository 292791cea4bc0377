//! Plain-text and JSON rendering. All computational output is deterministic
//! given the flags; cache-hit notices go to stderr so stdout stays
//! byte-reproducible.

use serde_json::{json, Value};
use srconst_core::constants::{ConstantResult, Provenance, TableRow};
use srconst_core::verify::IdentityReport;

fn bound_str(r: &ConstantResult) -> String {
    r.error_bound.to_decimal_string(3)
}

/// Flat JSON record per the documented schema.
pub fn constant_record(r: &ConstantResult) -> Value {
    let (nodes, truncation) = match &r.provenance {
        Provenance::Quadrature { nodes, truncation_t } => {
            (json!(nodes), json!(truncation_t))
        }
        _ => (Value::Null, Value::Null),
    };
    json!({
        "kind": r.kind.as_str(),
        "n": r.n,
        "digits": r.digits,
        "method": r.method_used.as_str(),
        "value": r.decimal,
        "error_bound": bound_str(r),
        "nodes": nodes,
        "truncation_T": truncation,
    })
}

pub fn constant_plain(results: &[ConstantResult], agreement: Option<&str>) -> String {
    let mut out = String::new();
    // the primary value line comes first, bare, so scripts can take line 1
    out.push_str(&results[0].decimal);
    out.push('\n');
    for r in results {
        let prov = match &r.provenance {
            Provenance::Quadrature { nodes, truncation_t } => {
                format!("nodes={nodes} T={truncation_t}")
            }
            Provenance::EulerMaclaurin { s, j } => format!("s={s} J={j}"),
            Provenance::Relation { base } => format!("from {base}"),
        };
        out.push_str(&format!(
            "{}({}) [{}] = {}  error_bound<={}  {prov}\n",
            r.kind.as_str(),
            r.n,
            r.method_used.as_str(),
            r.decimal,
            bound_str(r),
        ));
    }
    if let Some(a) = agreement {
        out.push_str(&format!("method agreement |integral - euler_maclaurin| = {a}\n"));
    }
    out
}

pub fn table_plain(rows: &[TableRow]) -> String {
    let width = rows
        .iter()
        .map(|r| r.integral.decimal.len().max(r.euler_maclaurin.decimal.len()))
        .max()
        .unwrap_or(12)
        .max(15);
    let mut out = format!(
        "{:>4}  {:<w$}  {:<w$}  {}\n",
        "n",
        "integral",
        "euler_maclaurin",
        "|diff|",
        w = width
    );
    for r in rows {
        out.push_str(&format!(
            "{:>4}  {:<w$}  {:<w$}  {}\n",
            r.n,
            r.integral.decimal,
            r.euler_maclaurin.decimal,
            r.agreement.to_decimal_string(3),
            w = width
        ));
    }
    out
}

pub fn table_json(rows: &[TableRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "n": r.n,
                    "digits": r.integral.digits,
                    "integral": constant_record(&r.integral),
                    "euler_maclaurin": constant_record(&r.euler_maclaurin),
                    "agreement": r.agreement.to_decimal_string(3),
                })
            })
            .collect(),
    )
}

pub fn report_json(r: &IdentityReport) -> Value {
    json!({
        "name": r.name,
        "n": r.n,
        "s": r.s.as_ref().map(|s| s.to_string()),
        "lhs": r.lhs.to_decimal_string(30),
        "rhs": r.rhs.to_decimal_string(30),
        "abs_diff": r.abs_diff.to_decimal_string(3),
        "tolerance": r.tolerance.to_decimal_string(3),
        "pass": r.pass,
    })
}

pub fn reports_plain(reports: &[IdentityReport]) -> String {
    let name_w = reports.iter().map(|r| r.name.len()).max().unwrap_or(20);
    let mut out = String::new();
    for r in reports {
        let params = match (&r.n, &r.s) {
            (Some(n), Some(s)) => format!("n={n} s={s}"),
            (Some(n), None) => format!("n={n}"),
            (None, Some(s)) => format!("s={s}"),
            (None, None) => String::new(),
        };
        out.push_str(&format!(
            "{:<name_w$}  {:<12}  diff={:<12}  tol={:<10}  {}\n",
            r.name,
            params,
            r.abs_diff.to_decimal_string(3),
            r.tolerance.to_decimal_string(2),
            if r.pass { "pass" } else { "FAIL" },
        ));
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    out.push_str(&format!("{} checks, {} failed\n", reports.len(), failed));
    out
}

pub fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json renders"));
}
