use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};
use wmcs_core::matching::AuditOptions;
use wmcs_core::Limits;

use crate::Result;

/// One named result. When `expected` is present the verdict is asserted and
/// `pass` records whether the observed value matched.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// The enumeration limits a report was produced under.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub max_elements: usize,
    pub exhaustive_sublattices: usize,
    pub max_profiles: usize,
    pub stable_set_contracts: usize,
    pub characterization_contracts: usize,
    pub axiom_exhaustive: usize,
    pub max_divisions: usize,
    pub audit_samples: u64,
}

impl Caps {
    pub fn new(limits: &Limits, audit: &AuditOptions) -> Self {
        Caps {
            max_elements: limits.max_elements,
            exhaustive_sublattices: limits.exhaustive_sublattices,
            max_profiles: limits.max_profiles,
            stable_set_contracts: limits.stable_set_contracts,
            characterization_contracts: limits.characterization_contracts,
            axiom_exhaustive: limits.axiom_exhaustive,
            max_divisions: limits.max_divisions,
            audit_samples: audit.samples,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    /// SHA-256 of the scenario bytes (or of the suite descriptor).
    pub input_sha256: String,
    pub seed: Option<u64>,
    pub caps: Caps,
    pub tool_version: String,
}

impl Provenance {
    pub fn new(input: &[u8], seed: Option<u64>, caps: Caps) -> Self {
        Provenance {
            input_sha256: sha256_hex(input),
            seed,
            caps,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub title: String,
    pub kind: String,
    pub verdicts: Vec<Verdict>,
    pub witnesses: Vec<String>,
    pub tables: Vec<Table>,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(title: impl Into<String>, kind: impl Into<String>, provenance: Provenance) -> Self {
        Report {
            title: title.into(),
            kind: kind.into(),
            verdicts: Vec::new(),
            witnesses: Vec::new(),
            tables: Vec::new(),
            provenance,
        }
    }

    pub fn verdict(&mut self, name: impl Into<String>, value: impl ToString) {
        self.verdicts.push(Verdict {
            name: name.into(),
            value: value.to_string(),
            expected: None,
            pass: None,
        });
    }

    /// A verdict asserted against a known value.
    pub fn check(&mut self, name: impl Into<String>, expected: impl ToString, value: impl ToString) {
        let (expected, value) = (expected.to_string(), value.to_string());
        self.verdicts.push(Verdict {
            name: name.into(),
            pass: Some(expected == value),
            expected: Some(expected),
            value,
        });
    }

    pub fn witness(&mut self, w: impl Into<String>) {
        self.witnesses.push(w.into());
    }

    pub fn table(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) {
        self.tables.push(Table {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows,
        });
    }

    pub fn failures(&self) -> Vec<&Verdict> {
        self.verdicts.iter().filter(|v| v.pass == Some(false)).collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Writes `report.json` and one CSV per table into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json())?;
        for t in &self.tables {
            let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", t.name)))
                .map_err(|e| std::io::Error::other(e.to_string()))?;
            let rows = std::iter::once(&t.header).chain(&t.rows);
            for row in rows {
                w.write_record(row).map_err(|e| std::io::Error::other(e.to_string()))?;
            }
            w.flush()?;
        }
        Ok(())
    }

    /// Plain-text rendering for the terminal.
    pub fn render(&self) -> String {
        let mut out = format!("{} [{}]\n", self.title, self.kind);
        let width = self.verdicts.iter().map(|v| v.name.chars().count()).max().unwrap_or(0);
        for v in &self.verdicts {
            let mark = match v.pass {
                Some(true) => "ok  ",
                Some(false) => "FAIL",
                None => "    ",
            };
            let pad = width - v.name.chars().count();
            let _ = write!(out, "  {mark} {}{}  {}", v.name, " ".repeat(pad), v.value);
            if v.pass == Some(false) {
                let _ = write!(out, "  (expected {})", v.expected.as_deref().unwrap_or(""));
            }
            out.push('\n');
        }
        for w in &self.witnesses {
            let _ = writeln!(out, "  witness: {w}");
        }
        for t in &self.tables {
            let _ = writeln!(out, "  table {} ({} rows)", t.name, t.rows.len());
        }
        let failures = self.failures().len();
        let asserted = self.verdicts.iter().filter(|v| v.pass.is_some()).count();
        let _ = writeln!(out, "  {} of {asserted} asserted verdicts hold", asserted - failures);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let caps = Caps::new(&Limits::default(), &AuditOptions::default());
        let mut r = Report::new("t", "order", Provenance::new(b"{}", Some(3), caps));
        r.verdict("free", 1);
        r.check("pinned", "a", "a");
        r.table("rows", &["x", "y"], vec![vec!["1".into(), "a,b".into()]]);
        r
    }

    #[test]
    fn failures_come_from_asserted_verdicts_only() {
        let mut r = sample();
        assert!(r.passed());
        r.check("bad", "true", "false");
        assert_eq!(r.failures().len(), 1);
        assert!(r.render().contains("FAIL bad"));
    }

    #[test]
    fn sha_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn files_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let r = sample();
        r.write_to(dir.path()).unwrap();
        let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
        assert_eq!(json, r.to_json());
        let csv = std::fs::read_to_string(dir.path().join("rows.csv")).unwrap();
        assert_eq!(csv, "x,y\n1,\"a,b\"\n");
    }
}
