//! Reference tables of zero ordinates: parsing, serialization, matching.
//!
//! Format: one decimal ordinate per line, ascending; blank lines and lines
//! starting with `#` are ignored. The first comment line, if any, is kept as
//! the provenance label.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{AuditReport, Verdict};
use crate::rszeta::ZeroList;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTable {
    pub ordinates: Vec<f64>,
    /// Decimal places carried by the table (maximum over its entries).
    pub declared_precision: u32,
    pub provenance: String,
}

impl ReferenceTable {
    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// Number of ordinates `<= t`.
    pub fn count_below(&self, t: f64) -> usize {
        self.ordinates.partition_point(|&g| g <= t)
    }

    /// Ordinates in `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> &[f64] {
        let a = self.ordinates.partition_point(|&g| g < lo);
        let b = self.ordinates.partition_point(|&g| g <= hi);
        &self.ordinates[a..b.max(a)]
    }

    /// Build from computed ordinates, rounding nothing.
    pub fn from_zero_list(zeros: &ZeroList, declared_precision: u32, provenance: &str) -> Self {
        ReferenceTable {
            ordinates: zeros.ordinates.clone(),
            declared_precision,
            provenance: provenance.to_string(),
        }
    }
}

/// Parse a table from text.
pub fn load_table<R: BufRead>(reader: R) -> Result<ReferenceTable> {
    let mut ordinates: Vec<f64> = Vec::new();
    let mut precision = 0u32;
    let mut provenance = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let s = line.trim();
        if s.is_empty() {
            continue;
        }
        if let Some(c) = s.strip_prefix('#') {
            provenance.get_or_insert_with(|| c.trim().to_string());
            continue;
        }
        let v: f64 = s.parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("not a number: `{s}`"),
        })?;
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("ordinate must be positive and finite: `{s}`"),
            });
        }
        let places = s.split_once('.').map_or(0, |(_, f)| {
            f.chars().take_while(|c| c.is_ascii_digit()).count() as u32
        });
        precision = precision.max(places);
        ordinates.push(v);
    }
    let gap = 10f64.powi(-(precision as i32));
    for w in ordinates.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::integrity(w[0], w[1], "ordinates not ascending"));
        }
        if w[1] - w[0] <= gap * 0.5 {
            return Err(Error::integrity(
                w[0],
                w[1],
                format!("gap below declared precision 1e-{precision}"),
            ));
        }
    }
    Ok(ReferenceTable {
        ordinates,
        declared_precision: precision,
        provenance: provenance.unwrap_or_else(|| "unlabeled".to_string()),
    })
}

/// Parse a table from a file; the provenance defaults to the path.
pub fn load_table_file(path: impl AsRef<Path>) -> Result<ReferenceTable> {
    let path = path.as_ref();
    let mut t = load_table(BufReader::new(File::open(path)?))?;
    if t.provenance == "unlabeled" {
        t.provenance = path.display().to_string();
    }
    Ok(t)
}

/// Write in the format read by [`load_table`].
pub fn write_table<W: Write>(table: &ReferenceTable, mut w: W) -> Result<()> {
    writeln!(w, "# {}", table.provenance)?;
    let p = table.declared_precision as usize;
    for g in &table.ordinates {
        writeln!(w, "{g:.p$}")?;
    }
    Ok(())
}

pub fn serialize(table: &ReferenceTable) -> String {
    let mut buf = Vec::new();
    write_table(table, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ASCII output")
}

/// Outcome of matching computed ordinates against a table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatchSummary {
    pub matched: usize,
    /// Reference ordinates with no computed partner.
    pub missing: Vec<f64>,
    /// Computed ordinates with no reference partner.
    pub spurious: Vec<f64>,
    pub max_discrepancy: f64,
}

/// Greedy nearest-neighbour matching of two ascending lists.
pub fn match_ordinates(computed: &[f64], reference: &[f64], match_tol: f64) -> MatchSummary {
    let mut out = MatchSummary::default();
    let (mut i, mut j) = (0, 0);
    while i < computed.len() && j < reference.len() {
        let (c, r) = (computed[i], reference[j]);
        let d = c - r;
        if d.abs() <= match_tol {
            // prefer the closer partner if the next reference entry beats this one
            if j + 1 < reference.len() && (c - reference[j + 1]).abs() < d.abs() {
                out.missing.push(r);
                j += 1;
                continue;
            }
            out.matched += 1;
            out.max_discrepancy = out.max_discrepancy.max(d.abs());
            i += 1;
            j += 1;
        } else if c < r {
            out.spurious.push(c);
            i += 1;
        } else {
            out.missing.push(r);
            j += 1;
        }
    }
    out.spurious.extend_from_slice(&computed[i..]);
    out.missing.extend_from_slice(&reference[j..]);
    out
}

/// Classify computed zeros against the table over `[t_min, t_max]`.
pub fn validate_window(
    zeros: &ZeroList,
    table: &ReferenceTable,
    match_tol: f64,
    t_min: f64,
    t_max: f64,
) -> AuditReport {
    let computed: Vec<f64> = zeros
        .ordinates
        .iter()
        .copied()
        .filter(|&g| g >= t_min && g <= t_max)
        .collect();
    let reference = table.window(t_min, t_max);
    let m = match_ordinates(&computed, reference, match_tol);
    let ok = m.missing.is_empty() && m.spurious.is_empty();
    let mut report = AuditReport::new("zero-table-validation")
        .param("match_tol", match_tol)
        .param("t_min", t_min)
        .param("t_max", t_max)
        .param("provenance", &table.provenance)
        .stat("computed", computed.len())
        .stat("reference", reference.len())
        .stat("matched", m.matched)
        .stat("missing", m.missing.len())
        .stat("spurious", m.spurious.len())
        .stat("max_discrepancy", m.max_discrepancy)
        .with_verdict(if ok { Verdict::Pass } else { Verdict::Fail });
    if !ok {
        let first: Vec<f64> = m.missing.iter().chain(&m.spurious).take(10).copied().collect();
        report = report.stat("first_mismatches", first);
    }
    report
}

/// As [`validate_window`] over the range both lists cover.
pub fn validate(zeros: &ZeroList, table: &ReferenceTable, match_tol: f64) -> AuditReport {
    let span = |v: &[f64]| (v.first().copied(), v.last().copied());
    let (lo, hi) = match (span(&zeros.ordinates), span(&table.ordinates)) {
        ((Some(a0), Some(a1)), (Some(b0), Some(b1))) => {
            (a0.max(b0) - match_tol, a1.min(b1) + match_tol)
        }
        _ => (0.0, f64::INFINITY),
    };
    validate_window(zeros, table, match_tol, lo, hi)
}
