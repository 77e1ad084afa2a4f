//! Grid verification of the case analysis that reduces the piecewise
//! wrong-sign bound to the unified form `1/2 - S / (2 sqrt(4 + S^2))`.

use serde::Serialize;

use super::lemma1_bound_unchecked;

/// SNR at which the piecewise bound switches branch.
pub fn case_boundary() -> f64 {
    2.0 / 3f64.sqrt()
}

/// `(4 sqrt(4+S^2) + 9 S^3) / (18 S^2 sqrt(4+S^2))`; the high-SNR case holds
/// iff this is at most 1/2.
pub fn high_snr_expression(s: f64) -> f64 {
    let r = (4.0 + s * s).sqrt();
    (4.0 * r + 9.0 * s * s * s) / (18.0 * s * s * r)
}

/// The earlier piecewise bound on the wrong-sign probability:
/// `2 / (9 S^2)` above the boundary, `1/2 - S / (2 sqrt 3)` otherwise.
pub fn piecewise_bound(s: f64) -> f64 {
    if s > case_boundary() {
        2.0 / (9.0 * s * s)
    } else {
        0.5 - s / (2.0 * 3f64.sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AppendixCheck {
    /// High-SNR expression at most 1/2.
    HighSnr,
    /// `sqrt 3 <= sqrt(4 + S^2)`.
    LowSnr,
    /// Piecewise bound at most the unified bound.
    PiecewiseDominated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixViolation {
    pub check: AppendixCheck,
    pub s: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// A value of a checked quantity and the SNR where it occurs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub value: f64,
    pub at_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixReport {
    pub grid_max: f64,
    pub grid_step: f64,
    pub grid_points: usize,
    pub boundary_s: f64,
    /// High-SNR expression evaluated at the case boundary.
    pub high_snr_at_boundary: f64,
    /// Largest high-SNR expression over grid points above the boundary.
    pub high_snr_max: Option<Extremum>,
    /// Smallest high-SNR expression over grid points above the boundary
    /// (the turning point between the decreasing and increasing ranges).
    pub high_snr_min: Option<Extremum>,
    /// `min(1/2 - expr)` over the high-SNR grid points and the boundary.
    pub high_snr_min_margin: f64,
    /// `min(sqrt(4+S^2) - sqrt 3)` over the low-SNR grid points.
    pub low_snr_min_margin: Option<f64>,
    /// `min(unified - piecewise)` over every grid point.
    pub piecewise_min_margin: f64,
    pub violations: Vec<AppendixViolation>,
}

impl AppendixReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn better(current: Option<Extremum>, value: f64, s: f64, larger: bool) -> Option<Extremum> {
    match current {
        Some(e) if (larger && e.value >= value) || (!larger && e.value <= value) => Some(e),
        _ => Some(Extremum { value, at_s: s }),
    }
}

/// Check all three inequalities on `S = k * grid_step`, `0 < S <= grid_max`,
/// plus the analytic boundary point.
///
/// Violations are collected, never raised. Non-positive or non-finite
/// steps produce an empty grid.
pub fn verify_appendix_cases(grid_max: f64, grid_step: f64) -> AppendixReport {
    let boundary = case_boundary();
    let sqrt3 = 3f64.sqrt();
    let mut grid: Vec<f64> = Vec::new();
    if grid_step > 0.0 && grid_step.is_finite() && grid_max.is_finite() {
        let count = (grid_max / grid_step + 1e-9).floor() as u64;
        grid.extend((1..=count).map(|k| k as f64 * grid_step));
    }

    let at_boundary = high_snr_expression(boundary);
    let mut report = AppendixReport {
        grid_max,
        grid_step,
        grid_points: grid.len(),
        boundary_s: boundary,
        high_snr_at_boundary: at_boundary,
        high_snr_max: None,
        high_snr_min: None,
        high_snr_min_margin: 0.5 - at_boundary,
        low_snr_min_margin: None,
        piecewise_min_margin: f64::INFINITY,
        violations: Vec::new(),
    };
    if at_boundary > 0.5 {
        report.violations.push(AppendixViolation {
            check: AppendixCheck::HighSnr,
            s: boundary,
            lhs: at_boundary,
            rhs: 0.5,
        });
    }

    for &s in grid.iter().chain(std::iter::once(&boundary)) {
        if s > boundary {
            let e = high_snr_expression(s);
            report.high_snr_max = better(report.high_snr_max, e, s, true);
            report.high_snr_min = better(report.high_snr_min, e, s, false);
            report.high_snr_min_margin = report.high_snr_min_margin.min(0.5 - e);
            if e > 0.5 {
                report.violations.push(AppendixViolation { check: AppendixCheck::HighSnr, s, lhs: e, rhs: 0.5 });
            }
        } else {
            let r = (4.0 + s * s).sqrt();
            let margin = r - sqrt3;
            report.low_snr_min_margin = Some(report.low_snr_min_margin.map_or(margin, |m| m.min(margin)));
            if sqrt3 > r {
                report.violations.push(AppendixViolation { check: AppendixCheck::LowSnr, s, lhs: sqrt3, rhs: r });
            }
        }
        let piecewise = piecewise_bound(s);
        let unified = lemma1_bound_unchecked(s);
        report.piecewise_min_margin = report.piecewise_min_margin.min(unified - piecewise);
        if piecewise > unified {
            report.violations.push(AppendixViolation {
                check: AppendixCheck::PiecewiseDominated,
                s,
                lhs: piecewise,
                rhs: unified,
            });
        }
    }
    report
}
