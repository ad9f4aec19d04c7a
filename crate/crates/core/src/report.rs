//! Verification reports and the mid-density window table, with JSON, CSV
//! and aligned-text renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::families::list_valid_families;
use crate::formulas::mu_mid;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Match,
    Mismatch,
    SearchInfeasible,
    /// A documented disagreement with a printed value; not a failure.
    KnownDiscrepancy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyPermanent {
    pub family: String,
    pub per: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub engine: String,
    pub max_per: String,
    pub is_exact: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub class_count: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub n: usize,
    pub tau: usize,
    pub sigma: usize,
    /// The claimed value under test.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expected: Option<String>,
    /// Closed-form value, when one applies.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub formula: Option<String>,
    /// Best exact evidence: family permanents or an exhaustive maximum.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub computed: Option<String>,
    pub families: Vec<FamilyPermanent>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub search: Option<SearchSummary>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl CaseRecord {
    pub fn new(n: usize, sigma: usize) -> Self {
        CaseRecord {
            n,
            tau: n * n - sigma,
            sigma,
            expected: None,
            formula: None,
            computed: None,
            families: Vec::new(),
            search: None,
            verdict: Verdict::Match,
            notes: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub n: usize,
    pub sigma: usize,
    pub note: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub records: usize,
    pub matched: usize,
    pub mismatched: usize,
    pub search_infeasible: usize,
    pub known_discrepancies: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub tool_version: String,
    /// What the suite does and does not establish.
    pub scope: Vec<String>,
    pub records: Vec<CaseRecord>,
    pub discrepancies: Vec<Discrepancy>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing_ms: Option<f64>,
}

impl Report {
    pub fn new(suite: &str, scope: Vec<String>, records: Vec<CaseRecord>) -> Self {
        let mut summary = Summary {
            records: records.len(),
            ..Default::default()
        };
        let mut discrepancies = Vec::new();
        for r in &records {
            match r.verdict {
                Verdict::Match => summary.matched += 1,
                Verdict::Mismatch => summary.mismatched += 1,
                Verdict::SearchInfeasible => summary.search_infeasible += 1,
                Verdict::KnownDiscrepancy => summary.known_discrepancies += 1,
            }
            if r.verdict == Verdict::KnownDiscrepancy {
                discrepancies.push(Discrepancy {
                    n: r.n,
                    sigma: r.sigma,
                    note: r.notes.join("; "),
                });
            }
        }
        Report {
            suite: suite.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            scope,
            records,
            discrepancies,
            summary,
            timing_ms: None,
        }
    }

    pub fn has_mismatch(&self) -> bool {
        self.summary.mismatched > 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }

    /// `sigma,tau,mu,families,verdict`; `mu` is the computed value when
    /// there is one, else the expected value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sigma,tau,mu,families,verdict\n");
        for r in &self.records {
            let mu = r
                .computed
                .as_ref()
                .or(r.expected.as_ref())
                .cloned()
                .unwrap_or_default();
            let fams: Vec<&str> = r.families.iter().map(|f| f.family.as_str()).collect();
            let verdict = serde_json::to_value(r.verdict).expect("verdict serializes");
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.sigma,
                r.tau,
                mu,
                csv_field(&fams.join(" ")),
                verdict.as_str().unwrap_or_default()
            );
        }
        out
    }

    /// Aligned text, one line per record.
    pub fn to_text(&self) -> String {
        let mut out = format!("suite {} (permax {})\n", self.suite, self.tool_version);
        for s in &self.scope {
            let _ = writeln!(out, "  note: {s}");
        }
        let header = [
            "n", "sigma", "tau", "expected", "computed", "search", "verdict", "families",
        ];
        let mut rows: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for r in &self.records {
            let search = r.search.as_ref().map_or(String::from("-"), |s| {
                format!("{}{}", s.max_per, if s.is_exact { "" } else { "+" })
            });
            let verdict = serde_json::to_value(r.verdict).expect("verdict serializes");
            rows.push(vec![
                r.n.to_string(),
                r.sigma.to_string(),
                r.tau.to_string(),
                r.expected.clone().unwrap_or_else(|| "-".into()),
                r.computed.clone().unwrap_or_else(|| "-".into()),
                search,
                verdict.as_str().unwrap_or_default().to_string(),
                r.families
                    .iter()
                    .map(|f| f.family.as_str())
                    .collect::<Vec<_>>()
                    .join(" "),
            ]);
        }
        out.push_str(&align(&rows));
        for d in &self.discrepancies {
            let _ = writeln!(out, "discrepancy n={} sigma={}: {}", d.n, d.sigma, d.note);
        }
        for r in self
            .records
            .iter()
            .filter(|r| r.verdict != Verdict::KnownDiscrepancy)
        {
            for note in &r.notes {
                let _ = writeln!(out, "n={} sigma={}: {note}", r.n, r.sigma);
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} records: {} match, {} mismatch, {} search-infeasible, {} known discrepancies",
            s.records, s.matched, s.mismatched, s.search_infeasible, s.known_discrepancies
        );
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.first().map_or(0, Vec::len);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Printed values of the reference order-8 table as `(sigma, mu, families)`.
pub const REFERENCE_ORDER8: [(usize, u64, &str); 8] = [
    (17, 16, "Pstar, T"),
    (18, 18, "M"),
    (19, 24, "U, U"),
    (20, 36, "R"),
    (21, 48, "N"),
    (22, 72, "F"),
    (23, 72, "Pstar, Q"),
    (24, 108, "M"),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub sigma: usize,
    pub tau: usize,
    pub mu: String,
    pub families: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

/// The mid-density window `2n+1 <= sigma <= 3n` for one order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowTable {
    pub n: usize,
    pub rows: Vec<TableRow>,
}

pub fn window_table(n: usize) -> Result<WindowTable> {
    if !(3..=64).contains(&n) {
        return Err(crate::Error::Domain(format!(
            "the mid-density window needs 3 <= n <= 64, got {n}"
        )));
    }
    let mut rows = Vec::new();
    for sigma in 2 * n + 1..=3 * n {
        let tau = n * n - sigma;
        let mu = mu_mid(n, tau)?.integer();
        let families: Vec<String> = list_valid_families(n, tau)
            .iter()
            .map(|f| f.id.to_string())
            .collect();
        let mut notes = Vec::new();
        if n == 8 {
            if let Some(&(_, printed, _)) = REFERENCE_ORDER8.iter().find(|r| r.0 == sigma) {
                if mu != printed.into() {
                    notes.push(format!("reference table prints {printed}"));
                }
            }
        }
        if families.is_empty() {
            notes.push("no listed family is constructible".to_string());
        }
        rows.push(TableRow {
            sigma,
            tau,
            mu: mu.to_string(),
            families,
            note: (!notes.is_empty()).then(|| notes.join("; ")),
        });
    }
    Ok(WindowTable { n, rows })
}

impl WindowTable {
    pub fn to_text(&self) -> String {
        let mut rows = vec![vec![
            "sigma".to_string(),
            "tau".into(),
            "mu".into(),
            "families".into(),
            "note".into(),
        ]];
        for r in &self.rows {
            rows.push(vec![
                r.sigma.to_string(),
                r.tau.to_string(),
                r.mu.clone(),
                r.families.join(", "),
                r.note.clone().unwrap_or_default(),
            ]);
        }
        align(&rows)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("sigma,tau,mu,families\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.sigma,
                r.tau,
                r.mu,
                csv_field(&r.families.join(" "))
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_eight_table() {
        let t = window_table(8).unwrap();
        assert_eq!(t.rows.len(), 8);
        let mus: Vec<&str> = t.rows.iter().map(|r| r.mu.as_str()).collect();
        assert_eq!(mus, ["16", "24", "24", "36", "48", "72", "72", "108"]);
        assert_eq!(t.rows[1].note.as_deref(), Some("reference table prints 18"));
        assert!(t.rows[7]
            .note
            .as_deref()
            .unwrap()
            .contains("no listed family"));
        let csv = t.to_csv();
        assert!(csv.starts_with("sigma,tau,mu,families\n17,47,16,"));
        assert!(t.to_text().lines().next().unwrap().starts_with("sigma"));
    }

    #[test]
    fn summary_counts_and_round_trip() {
        let mut a = CaseRecord::new(8, 18);
        a.verdict = Verdict::KnownDiscrepancy;
        a.notes.push("printed 18".into());
        let mut b = CaseRecord::new(8, 20);
        b.expected = Some("36".into());
        b.computed = Some("36".into());
        let r = Report::new("demo", vec![], vec![a, b]);
        assert_eq!(r.summary.records, 2);
        assert_eq!(r.summary.matched + r.summary.known_discrepancies, 2);
        assert_eq!(r.discrepancies.len(), 1);
        assert!(!r.has_mismatch());
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
        assert!(r.to_csv().contains("20,44,36,,match"));
    }
}
