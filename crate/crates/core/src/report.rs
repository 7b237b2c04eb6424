//! Audit reports: exact left-hand sides next to the two terms of a bound.
//!
//! For an upper bound `lhs <= main + C * unit` the implied constant is
//! `C* = (lhs - main) / unit` (zero when `lhs <= main`). For a lower bound
//! `lhs >> min(main, unit)` it is `C* = min(main, unit) / lhs`, the factor by
//! which the prediction exceeds what the instance achieved.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Upper,
    Lower,
    /// `|lhs - main| <= C * unit`.
    TwoSided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Side conditions hold; `c_star` is informative only.
    Reported,
    /// At least one side condition fails; the audit still ran.
    Informational,
    /// Explicit-constant bound satisfied.
    Pass,
    /// Explicit-constant bound violated.
    Fail,
    /// `c_star` is within the frozen ceiling.
    WithinCeiling,
    /// `c_star` exceeds the frozen ceiling.
    Regression,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideCondition {
    pub name: String,
    pub holds: bool,
}

impl SideCondition {
    pub fn new(name: impl Into<String>, holds: bool) -> Self {
        SideCondition {
            name: name.into(),
            holds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub theorem: String,
    pub q: u32,
    pub d: usize,
    pub sizes: BTreeMap<String, u64>,
    pub bound: BoundKind,
    pub lhs: u128,
    pub main_term: f64,
    pub error_term_unit: f64,
    pub c_star: f64,
    pub side_conditions: Vec<SideCondition>,
    pub verdict: Verdict,
}

impl AuditReport {
    pub fn upper(theorem: &str, q: u32, d: usize, lhs: u128, main: f64, unit: f64) -> Self {
        let excess = lhs as f64 - main;
        let c_star = if excess > 0.0 && unit > 0.0 {
            excess / unit
        } else {
            0.0
        };
        Self::assemble(theorem, q, d, BoundKind::Upper, lhs, main, unit, c_star)
    }

    pub fn lower(theorem: &str, q: u32, d: usize, lhs: u128, main: f64, unit: f64) -> Self {
        let predicted = main.min(unit);
        let c_star = if lhs > 0 { predicted / lhs as f64 } else { 0.0 };
        Self::assemble(theorem, q, d, BoundKind::Lower, lhs, main, unit, c_star)
    }

    pub fn two_sided(theorem: &str, q: u32, d: usize, lhs: u128, main: f64, unit: f64) -> Self {
        let dev = (lhs as f64 - main).abs();
        let c_star = if unit > 0.0 { dev / unit } else { 0.0 };
        Self::assemble(theorem, q, d, BoundKind::TwoSided, lhs, main, unit, c_star)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        theorem: &str,
        q: u32,
        d: usize,
        bound: BoundKind,
        lhs: u128,
        main: f64,
        unit: f64,
        c_star: f64,
    ) -> Self {
        AuditReport {
            theorem: theorem.to_string(),
            q,
            d,
            sizes: BTreeMap::new(),
            bound,
            lhs,
            main_term: main,
            error_term_unit: unit,
            c_star,
            side_conditions: Vec::new(),
            verdict: Verdict::Reported,
        }
    }

    pub fn size(mut self, name: &str, n: u64) -> Self {
        self.sizes.insert(name.to_string(), n);
        self
    }

    pub fn condition(mut self, name: impl Into<String>, holds: bool) -> Self {
        self.side_conditions.push(SideCondition::new(name, holds));
        if !holds && self.verdict == Verdict::Reported {
            self.verdict = Verdict::Informational;
        }
        self
    }

    pub fn side_conditions_hold(&self) -> bool {
        self.side_conditions.iter().all(|c| c.holds)
    }

    /// Marks an explicit-constant bound as passed or failed.
    pub fn judged(mut self, pass: bool) -> Self {
        self.verdict = if pass { Verdict::Pass } else { Verdict::Fail };
        self
    }

    /// Compares `c_star` with a frozen ceiling. Audits outside their
    /// hypotheses stay informational; explicit-constant verdicts are kept.
    pub fn against_ceiling(mut self, ceiling: Option<f64>) -> Self {
        if matches!(self.verdict, Verdict::Pass | Verdict::Fail) {
            return self;
        }
        if let (Some(c), true) = (ceiling, self.side_conditions_hold()) {
            self.verdict = if self.c_star <= c {
                Verdict::WithinCeiling
            } else {
                Verdict::Regression
            };
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    fn csv_record(&self) -> Vec<String> {
        let sizes = self
            .sizes
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        let conds = self
            .side_conditions
            .iter()
            .map(|c| format!("{}:{}", c.name, c.holds))
            .collect::<Vec<_>>()
            .join("|");
        vec![
            self.theorem.clone(),
            self.q.to_string(),
            self.d.to_string(),
            sizes,
            serde_json::to_string(&self.bound).unwrap().trim_matches('"').to_string(),
            self.lhs.to_string(),
            self.main_term.to_string(),
            self.error_term_unit.to_string(),
            self.c_star.to_string(),
            conds,
            serde_json::to_string(&self.verdict).unwrap().trim_matches('"').to_string(),
        ]
    }
}

pub const CSV_HEADER: [&str; 11] = [
    "theorem",
    "q",
    "d",
    "sizes",
    "bound",
    "lhs",
    "main_term",
    "error_term_unit",
    "c_star",
    "side_conditions",
    "verdict",
];

/// One JSON object per line.
pub fn write_json_lines<W: Write>(mut w: W, reports: &[AuditReport]) -> std::io::Result<()> {
    for r in reports {
        writeln!(w, "{}", r.to_json())?;
    }
    Ok(())
}

pub fn write_csv<W: Write>(w: W, reports: &[AuditReport]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in reports {
        out.write_record(r.csv_record())?;
    }
    out.flush()?;
    Ok(())
}
