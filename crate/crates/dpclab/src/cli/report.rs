//! Check rows and their text, JSON and CSV renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::bounds::BoundReport;
use crate::progeny::PropertyCheck;

/// One check outcome. The JSON form is `{check, pass, lhs, rhs, witness}`
/// plus the relation between each `lhs`/`rhs` pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Row {
    pub check: String,
    pub pass: bool,
    pub lhs: Vec<String>,
    pub rel: Vec<String>,
    pub rhs: Vec<String>,
    pub witness: BTreeMap<String, String>,
}

impl Row {
    pub fn new(check: impl Into<String>) -> Self {
        Row {
            check: check.into(),
            pass: true,
            lhs: Vec::new(),
            rel: Vec::new(),
            rhs: Vec::new(),
            witness: BTreeMap::new(),
        }
    }

    /// Records `lhs rel rhs` and whether it holds.
    pub fn cmp(mut self, lhs: impl ToString, rel: &str, rhs: impl ToString, holds: bool) -> Self {
        self.lhs.push(lhs.to_string());
        self.rel.push(rel.to_string());
        self.rhs.push(rhs.to_string());
        self.pass &= holds;
        self
    }

    /// `lhs == rhs` on displayed values.
    pub fn eq(self, lhs: impl ToString, rhs: impl ToString) -> Self {
        let (l, r) = (lhs.to_string(), rhs.to_string());
        let holds = l == r;
        self.cmp(l, "=", r, holds)
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.witness.insert(key.to_string(), value.to_string());
        self
    }

    pub fn fail(mut self, reason: impl ToString) -> Self {
        self.pass = false;
        self.witness.insert("error".into(), reason.to_string());
        self
    }

    pub fn from_report(r: &BoundReport) -> Self {
        let mut row = Row::new(r.check.clone());
        for i in &r.inequalities {
            row = row.cmp(&i.lhs, &i.rel.to_string(), &i.rhs, i.holds);
        }
        row.pass = r.pass();
        row.witness = r.witness.clone();
        row
    }

    /// Collapses property checks into one row: total violations `= 0`.
    pub fn from_properties(check: impl Into<String>, props: &[PropertyCheck]) -> Self {
        let violations: usize = props.iter().map(|p| p.violations.len()).sum();
        let checked: usize = props.iter().map(|p| p.checked).sum();
        let mut row = Row::new(check).cmp(violations, "=", 0, violations == 0).with("checked", checked);
        let failed: Vec<&str> = props.iter().filter(|p| !p.passed()).map(|p| p.name).collect();
        if !failed.is_empty() {
            row = row.with("failed", failed.join(","));
            if let Some(v) = props.iter().flat_map(|p| p.violations.first()).next() {
                row = row.with("first_violation", v);
            }
        }
        row
    }
}

pub fn all_pass(rows: &[Row]) -> bool {
    rows.iter().all(|r| r.pass)
}

pub fn rows_text(rows: &[Row]) -> String {
    let mut s = String::new();
    for r in rows {
        let rel: Vec<String> = (0..r.lhs.len()).map(|i| format!("{} {} {}", r.lhs[i], r.rel[i], r.rhs[i])).collect();
        let _ = write!(s, "{} {}", if r.pass { "PASS" } else { "FAIL" }, r.check);
        if !rel.is_empty() {
            let _ = write!(s, ": {}", rel.join("; "));
        }
        if !r.witness.is_empty() {
            let w: Vec<String> = r.witness.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = write!(s, " [{}]", w.join(" "));
        }
        s.push('\n');
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    let _ = writeln!(s, "{passed}/{} passed", rows.len());
    s
}

pub fn rows_json(rows: &[Row]) -> serde_json::Value {
    serde_json::to_value(rows).expect("rows serialize")
}

/// CSV with header `check,pass,lhs,rel,rhs,witness`; list cells are joined by `;`.
pub fn rows_csv(rows: &[Row]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check", "pass", "lhs", "rel", "rhs", "witness"]).expect("in-memory write");
    for r in rows {
        let wit: Vec<String> = r.witness.iter().map(|(k, v)| format!("{k}={v}")).collect();
        w.write_record([
            r.check.as_str(),
            if r.pass { "true" } else { "false" },
            &r.lhs.join(";"),
            &r.rel.join(";"),
            &r.rhs.join(";"),
            &wit.join(";"),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flushed")).expect("utf-8 input")
}

/// Generic table as CSV.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flushed")).expect("utf-8 input")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_rendering() {
        let rows = vec![
            Row::new("a").cmp(1, "<=", 2, true).with("k", "v"),
            Row::new("b,c").eq(3, 4),
        ];
        assert!(!all_pass(&rows));
        let t = rows_text(&rows);
        assert!(t.starts_with("PASS a: 1 <= 2 [k=v]\nFAIL b,c: 3 = 4\n1/2 passed"));
        let c = rows_csv(&rows);
        assert_eq!(c.lines().next(), Some("check,pass,lhs,rel,rhs,witness"));
        assert_eq!(c.lines().nth(2), Some("\"b,c\",false,3,=,4,"));
        let j = rows_json(&rows);
        assert_eq!(j[0]["check"], "a");
        assert_eq!(j[1]["pass"], false);
        assert_eq!(j[0]["witness"]["k"], "v");
    }
}
