use serde::Serialize;

use super::{
    eval_g2_bound, eval_g3_bound, eval_total_and_dominance, eval_two_surface_cases, eval_zero_set_cases, BoundError,
    BoundParams, ConstantsProfile,
};
use crate::exact::ExactScalar;

/// One grid point of a bound table; values are enclosure midpoints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub l: u64,
    pub s: u64,
    pub d: u64,
    pub epsilon: String,
    pub c1: String,
    pub c2: String,
    pub c3: String,
    pub c4: String,
    pub main: f64,
    pub cells: f64,
    pub two_surface_1: f64,
    pub two_surface_2: f64,
    pub two_surface_3: f64,
    pub three_surface_1: f64,
    pub three_surface_2: f64,
    pub zero_set_1: f64,
    pub zero_set_2: f64,
    pub zero_set_3: f64,
    pub zero_set_4: f64,
    pub total: f64,
    pub ratio: f64,
    pub regime_ok: bool,
    pub g2_ok: bool,
    pub g3_ok: bool,
    pub two_surface_2_ok: bool,
    pub zero_set_3_ok: bool,
    pub dominated: bool,
}

impl BoundRow {
    pub fn evaluate(p: &BoundParams, c: &ConstantsProfile, dominance_constant: &ExactScalar) -> Result<Self, BoundError> {
        let total = eval_total_and_dominance(p, c, dominance_constant)?;
        let value = |name: &str| {
            total.summands.iter().find(|(n, _)| *n == name).map(|(_, v)| v.to_f64()).expect("known summand")
        };
        Ok(Self {
            l: p.l,
            s: p.s,
            d: p.d,
            epsilon: p.epsilon.to_string(),
            c1: c.c1().to_string(),
            c2: c.c2().to_string(),
            c3: c.c3().to_string(),
            c4: c.c4().to_string(),
            main: total.main.value.to_f64(),
            cells: value("cells"),
            two_surface_1: value("two_surface_1"),
            two_surface_2: value("two_surface_2"),
            two_surface_3: value("two_surface_3"),
            three_surface_1: value("three_surface_1"),
            three_surface_2: value("three_surface_2"),
            zero_set_1: value("zero_set_1"),
            zero_set_2: value("zero_set_2"),
            zero_set_3: value("zero_set_3"),
            zero_set_4: value("zero_set_4"),
            total: total.total.value.to_f64(),
            ratio: total.ratio.to_f64(),
            regime_ok: total.main.hypothesis_satisfied,
            g2_ok: eval_g2_bound(p)?.bound.hypothesis_satisfied,
            g3_ok: eval_g3_bound(p)?.bound.hypothesis_satisfied,
            two_surface_2_ok: eval_two_surface_cases(p, c)?[1].hypothesis_satisfied,
            zero_set_3_ok: eval_zero_set_cases(p, c)?.cases[2].hypothesis_satisfied,
            dominated: total.dominated,
        })
    }
}

/// CSV with a header and one row per grid point.
pub fn bound_table_csv(rows: &[BoundRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory write");
    }
    if rows.is_empty() {
        return String::new();
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}
