use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::json;

use crate::config::ConfigurationSet;
use crate::exact::Vec4;
use crate::geometry::{classify_line_flat2, IncidenceOutcome};
use crate::partition::{cell_id, PartitionPolynomial, SignVector};

/// One line meeting one plane in a single point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceRecord {
    pub line: usize,
    pub plane: usize,
    pub location: Vec4,
    /// Open cell of the location, or `None` on the zero set. Without a
    /// partition every record sits in the single empty-signature cell.
    pub cell: Option<SignVector>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IncidenceReport {
    pub point_incidences: usize,
    pub containments: usize,
    /// Sorted by (line, plane).
    pub records: Vec<IncidenceRecord>,
    /// (line, plane) pairs where the line lies in the plane.
    pub contained_pairs: Vec<(usize, usize)>,
    pub per_cell: BTreeMap<SignVector, usize>,
    pub zero_set_count: usize,
}

impl IncidenceReport {
    /// Structured text (JSON) mirroring the report fields.
    pub fn to_json(&self) -> serde_json::Value {
        let records: Vec<_> = self
            .records
            .iter()
            .map(|r| {
                json!({
                    "line": r.line,
                    "plane": r.plane,
                    "location": r.location.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "cell": cell_label(&r.cell),
                })
            })
            .collect();
        let per_cell: serde_json::Map<String, serde_json::Value> =
            self.per_cell.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
        json!({
            "point_incidences": self.point_incidences,
            "containments": self.containments,
            "incidence_records": records,
            "contained_pairs": self.contained_pairs,
            "per_cell": per_cell,
            "zero_set_count": self.zero_set_count,
        })
    }

    /// CSV with columns `line_idx, plane_idx, x1..x4, cell`; the cell column
    /// holds the sign signature or `ZERO_SET`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["line_idx", "plane_idx", "x1", "x2", "x3", "x4", "cell"]).expect("in-memory write");
        for r in &self.records {
            let mut row = vec![r.line.to_string(), r.plane.to_string()];
            row.extend(r.location.iter().map(ToString::to_string));
            row.push(cell_label(&r.cell));
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

fn cell_label(cell: &Option<SignVector>) -> String {
    match cell {
        Some(sv) => sv.to_string(),
        None => "ZERO_SET".to_string(),
    }
}

/// Classifies every (line, plane) pair exactly.
pub fn count_incidences(cfg: &ConfigurationSet) -> IncidenceReport {
    let per_line: Vec<(Vec<IncidenceRecord>, Vec<(usize, usize)>)> = cfg
        .lines()
        .par_iter()
        .enumerate()
        .map(|(i, ln)| {
            let mut records = Vec::new();
            let mut contained = Vec::new();
            for (j, fl) in cfg.planes().iter().enumerate() {
                match classify_line_flat2(ln, fl) {
                    IncidenceOutcome::Point(location) => {
                        records.push(IncidenceRecord { line: i, plane: j, location, cell: Some(SignVector(Vec::new())) })
                    }
                    IncidenceOutcome::Contained => contained.push((i, j)),
                    IncidenceOutcome::Disjoint => {}
                }
            }
            (records, contained)
        })
        .collect();
    let mut report = IncidenceReport::default();
    for (records, contained) in per_line {
        report.records.extend(records);
        report.contained_pairs.extend(contained);
    }
    report.point_incidences = report.records.len();
    report.containments = report.contained_pairs.len();
    if report.point_incidences > 0 {
        report.per_cell.insert(SignVector(Vec::new()), report.point_incidences);
    }
    report
}

/// [`count_incidences`] with every incidence point assigned to its open cell
/// of `part` or to the zero set.
pub fn classify_by_partition(cfg: &ConfigurationSet, part: &PartitionPolynomial) -> IncidenceReport {
    let mut report = count_incidences(cfg);
    let cells: Vec<SignVector> = report.records.par_iter().map(|r| cell_id(&r.location, part)).collect();
    report.per_cell.clear();
    report.zero_set_count = 0;
    for (r, sv) in report.records.iter_mut().zip(cells) {
        if sv.on_zero_set() {
            report.zero_set_count += 1;
            r.cell = None;
        } else {
            *report.per_cell.entry(sv.clone()).or_default() += 1;
            r.cell = Some(sv);
        }
    }
    report
}
