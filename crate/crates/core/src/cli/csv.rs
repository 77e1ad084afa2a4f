//! CSV emission and schema checks for trajectories, sweep summaries and
//! bound reports.

use std::fmt::Write as _;

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::sim::{RunResult, SweepPoint};

pub const TRAJECTORY_COLUMNS: [&str; 6] = ["step", "objective", "grad_l1", "lr", "flipped_coords", "tie_coords"];
pub const SUMMARY_COLUMNS: [&str; 5] = ["axis_value", "repeat", "final_objective", "mean_flip_rate", "seed"];
pub const BOUNDS_COLUMNS: [&str; 18] = [
    "q",
    "alpha",
    "p",
    "s",
    "sigma_l1",
    "smoothness_l1",
    "f0_minus_fstar",
    "k_iters",
    "lemma1_wrong_sign_bound",
    "vote_failure_bound_raw",
    "vote_failure_bound",
    "vote_failure_bound_vacuous",
    "vote_failure_bound_snr_raw",
    "exact_vote_failure",
    "rate_rhs_proof_form",
    "rate_rhs_statement_form",
    "alpha_threshold",
    "tolerable_byzantine_count",
];

/// Real numbers in scientific notation with 13 significant digits.
pub fn fmt_real(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.12e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_real).unwrap_or_default()
}

pub fn trajectory_csv(result: &RunResult) -> String {
    let mut out = TRAJECTORY_COLUMNS.join(",");
    out.push('\n');
    for r in &result.trajectory {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.step,
            fmt_real(r.objective),
            fmt_real(r.grad_l1),
            fmt_real(r.lr),
            r.flipped_coords,
            r.tie_coords
        );
    }
    out
}

/// One row per `(value, repeat)`; failed points carry `nan` metrics.
pub fn summary_csv(points: &[SweepPoint]) -> String {
    let mut out = SUMMARY_COLUMNS.join(",");
    out.push('\n');
    for p in points {
        let (final_objective, flip_rate) = match &p.result {
            Ok(r) => (r.final_objective, r.mean_flip_rate()),
            Err(_) => (f64::NAN, f64::NAN),
        };
        let _ = writeln!(out, "{},{},{},{},{}", p.value, p.repeat, fmt_real(final_objective), fmt_real(flip_rate), p.seed);
    }
    out
}

pub fn bounds_csv(report: &BoundReport) -> String {
    let i = &report.inputs;
    let row = [
        i.q.to_string(),
        fmt_real(i.alpha),
        fmt_real(i.p),
        fmt_opt(i.s),
        fmt_real(i.sigma_l1),
        fmt_real(i.smoothness_l1),
        fmt_real(i.f0_minus_fstar),
        i.k_iters.to_string(),
        fmt_opt(report.lemma1_wrong_sign_bound),
        fmt_real(report.vote_failure_bound.raw),
        fmt_real(report.vote_failure_bound.clamped),
        report.vote_failure_bound.vacuous().to_string(),
        fmt_opt(report.vote_failure_bound_snr.map(|b| b.raw)),
        fmt_real(report.exact_vote_failure),
        fmt_real(report.rate_rhs_proof_form),
        fmt_real(report.rate_rhs_statement_form),
        fmt_real(report.alpha_threshold),
        report.tolerable_byzantine_count.to_string(),
    ];
    format!("{}\n{}\n", BOUNDS_COLUMNS.join(","), row.join(","))
}

/// Parsed CSV: header plus rows of raw fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Table> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::input("csv: missing header"))?;
        let header: Vec<String> = header.split(',').map(str::to_string).collect();
        let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != header.len() {
                return Err(Error::input(format!("csv: row {} has {} fields, expected {}", i + 1, row.len(), header.len())));
            }
        }
        Ok(Table { header, rows })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::input(format!("csv: missing column `{name}`")))
    }

    pub fn reals(&self, name: &str) -> Result<Vec<f64>> {
        let c = self.column(name)?;
        self.rows
            .iter()
            .map(|r| r[c].parse::<f64>().map_err(|_| Error::input(format!("csv: `{}` is not a number", r[c]))))
            .collect()
    }
}

fn significant_digits(field: &str) -> usize {
    let mantissa = field.split(['e', 'E']).next().unwrap_or("");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    match digits.trim_start_matches('0').len() {
        // zero carries as many significant digits as it prints
        0 => digits.len(),
        n => n,
    }
}

fn check_schema(text: &str, columns: &[&str], rows: usize, real_columns: &[&str], int_columns: &[&str]) -> Result<()> {
    let table = Table::parse(text)?;
    if table.header != columns {
        return Err(Error::input(format!("csv: header {:?} != {:?}", table.header, columns)));
    }
    if table.rows.len() != rows {
        return Err(Error::input(format!("csv: {} rows, expected {rows}", table.rows.len())));
    }
    for name in real_columns {
        let c = table.column(name)?;
        for row in &table.rows {
            let f = &row[c];
            let ok = f == "nan" || f == "inf" || f == "-inf" || (f.parse::<f64>().is_ok() && significant_digits(f) >= 9);
            if !ok {
                return Err(Error::input(format!("csv: `{f}` in `{name}` is not a real with >= 9 significant digits")));
            }
        }
    }
    for name in int_columns {
        let c = table.column(name)?;
        for row in &table.rows {
            row[c].parse::<u64>().map_err(|_| Error::input(format!("csv: `{}` in `{name}` is not an integer", row[c])))?;
        }
    }
    Ok(())
}

pub fn check_trajectory_csv(text: &str, iterations: usize) -> Result<()> {
    check_schema(
        text,
        &TRAJECTORY_COLUMNS,
        iterations,
        &["objective", "grad_l1", "lr"],
        &["step", "flipped_coords", "tie_coords"],
    )
}

pub fn check_summary_csv(text: &str, rows: usize) -> Result<()> {
    check_schema(text, &SUMMARY_COLUMNS, rows, &["final_objective", "mean_flip_rate"], &["repeat", "seed"])
}
