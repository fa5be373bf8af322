//! Output documents and their renderers. Every report renders three ways:
//! an aligned text table with numbers at 4 decimals, CSV with a header row
//! and full-precision numbers (shortest strings that parse back exactly),
//! and JSON mirroring the domain types field-for-field.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::Result;
use crate::montecarlo::{ModelCheckResult, PerformanceRow};
use crate::predictions::IntervalKind;
use crate::twoparam::SensitivityPoint;

/// How a document is rendered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(OutputFormat::Table),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(crate::error::Error::Domain(format!(
                "unknown output format '{other}' (expected table, csv, or json)"
            ))),
        }
    }
}

/// Full-precision text for CSV: the shortest decimal string that parses
/// back to exactly the same f64.
fn full(x: f64) -> String {
    format!("{x}")
}

/// Table-mode numeric formatting.
fn fixed(x: f64) -> String {
    format!("{x:.4}")
}

/// Align rows into a text table: headers, then one line per row, columns
/// padded to their widest entry. The first column is left-aligned, the rest
/// right-aligned.
fn aligned_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let render_line = |out: &mut String, cells: &[String]| {
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            if i == 0 {
                let _ = write!(out, "{cell:<w$}");
            } else {
                let _ = write!(out, "{cell:>w$}");
            }
        }
        while out.ends_with(' ') {
            out.pop();
        }
        out.push('\n');
    };
    let header_cells: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    render_line(&mut out, &header_cells);
    for row in rows {
        render_line(&mut out, row);
    }
    out
}

fn csv_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = headers.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn units_prefix(units: Option<&str>, format: OutputFormat) -> String {
    match (units, format) {
        (Some(u), OutputFormat::Table) => format!("units: {u}\n"),
        (Some(u), OutputFormat::Csv) => format!("# units: {u}\n"),
        _ => String::new(),
    }
}

fn to_json<T: Serialize>(doc: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    Ok(text)
}

/// One prediction interval for one target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalRow {
    pub m: u32,
    pub k: u32,
    pub kind: IntervalKind,
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub units: Option<String>,
    pub rows: Vec<IntervalRow>,
}

impl IntervalReport {
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        if format == OutputFormat::Json {
            return to_json(self);
        }
        let prefix = units_prefix(self.units.as_deref(), format);
        let body = match format {
            OutputFormat::Table => {
                let rows: Vec<Vec<String>> = self
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.m.to_string(),
                            r.k.to_string(),
                            r.kind.to_string(),
                            format!(
                                "({},{}) [{}]",
                                fixed(r.lower),
                                fixed(r.upper),
                                // width of the displayed digits, so the row
                                // is self-consistent at 4 decimals
                                fixed(((r.upper * 1e4).round() - (r.lower * 1e4).round()) / 1e4),
                            ),
                            fixed(r.level),
                        ]
                    })
                    .collect();
                aligned_table(&["m", "k", "method", "interval [width]", "level"], &rows)
            }
            OutputFormat::Csv => {
                let rows: Vec<Vec<String>> = self
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.m.to_string(),
                            r.k.to_string(),
                            r.kind.to_string(),
                            full(r.lower),
                            full(r.upper),
                            full(r.width),
                            full(r.level),
                        ]
                    })
                    .collect();
                csv_table(&["m", "k", "method", "lower", "upper", "width", "level"], &rows)
            }
            OutputFormat::Json => unreachable!(),
        };
        Ok(prefix + &body)
    }
}

/// Point predictors for one target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointRow {
    pub m: u32,
    pub k: u32,
    pub sel: f64,
    pub ael: f64,
    pub mode: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub units: Option<String>,
    /// When set to "sel", "ael", or "mode", text renderings show only that
    /// predictor's column; JSON always carries all three.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub loss: Option<String>,
    pub rows: Vec<PointRow>,
}

impl PointReport {
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        if format == OutputFormat::Json {
            return to_json(self);
        }
        let prefix = units_prefix(self.units.as_deref(), format);
        let fmt: fn(f64) -> String = match format {
            OutputFormat::Table => fixed,
            _ => full,
        };
        let column: Option<(&str, fn(&PointRow) -> f64)> = match self.loss.as_deref() {
            Some("sel") => Some(("sel", |r| r.sel)),
            Some("ael") => Some(("ael", |r| r.ael)),
            Some("mode") => Some(("mode", |r| r.mode)),
            _ => None,
        };
        let (headers, rows): (Vec<&str>, Vec<Vec<String>>) = match column {
            Some((name, pick)) => (
                vec!["m", "k", name],
                self.rows
                    .iter()
                    .map(|r| vec![r.m.to_string(), r.k.to_string(), fmt(pick(r))])
                    .collect(),
            ),
            None => (
                vec!["m", "k", "sel", "ael", "mode"],
                self.rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.m.to_string(),
                            r.k.to_string(),
                            fmt(r.sel),
                            fmt(r.ael),
                            fmt(r.mode),
                        ]
                    })
                    .collect(),
            ),
        };
        let body = match format {
            OutputFormat::Table => aligned_table(&headers, &rows),
            _ => csv_table(&headers, &rows),
        };
        Ok(prefix + &body)
    }
}

/// A sampled curve: (u, value) pairs of a density or survival function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub u: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub units: Option<String>,
    /// Name of the evaluated quantity ("density" or "survival").
    pub quantity: String,
    pub m: u32,
    pub k: u32,
    pub rows: Vec<GridPoint>,
}

impl GridReport {
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        if format == OutputFormat::Json {
            return to_json(self);
        }
        let prefix = units_prefix(self.units.as_deref(), format);
        let fmt: fn(f64) -> String = match format {
            OutputFormat::Table => fixed,
            _ => full,
        };
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|p| vec![fmt(p.u), fmt(p.value)])
            .collect();
        let headers = ["u", self.quantity.as_str()];
        let body = match format {
            OutputFormat::Table => aligned_table(&headers, &rows),
            _ => csv_table(&headers, &rows),
        };
        Ok(prefix + &body)
    }
}

/// Maximum-likelihood fit plus the goodness-of-fit statistic at the fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// Which model was fitted ("two-param" or "scaled").
    pub model: String,
    pub mu_hat: f64,
    pub sigma_hat: f64,
    pub converged: bool,
    pub boundary: bool,
    pub printed_score_residual: f64,
    pub log_likelihood: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ks_d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub units: Option<String>,
}

impl FitReport {
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        if format == OutputFormat::Json {
            return to_json(self);
        }
        let prefix = units_prefix(self.units.as_deref(), format);
        let fmt: fn(f64) -> String = match format {
            OutputFormat::Table => fixed,
            _ => full,
        };
        let mut pairs = vec![
            ("model", self.model.clone()),
            ("mu_hat", fmt(self.mu_hat)),
            ("sigma_hat", fmt(self.sigma_hat)),
            ("converged", self.converged.to_string()),
            ("boundary", self.boundary.to_string()),
            ("printed_score_residual", fmt(self.printed_score_residual)),
            ("log_likelihood", fmt(self.log_likelihood)),
        ];
        if let Some(d) = self.ks_d {
            pairs.push(("ks_d", fmt(d)));
        }
        let body = match format {
            OutputFormat::Table => {
                let rows: Vec<Vec<String>> = pairs
                    .into_iter()
                    .map(|(k, v)| vec![k.to_string(), v])
                    .collect();
                aligned_table(&["field", "value"], &rows)
            }
            _ => {
                let headers: Vec<&str> = pairs.iter().map(|(k, _)| *k).collect();
                let row: Vec<String> = pairs.iter().map(|(_, v)| v.clone()).collect();
                csv_table(&headers, &[row])
            }
        };
        Ok(prefix + &body)
    }
}

/// Simulation-study document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub replications: usize,
    pub discarded: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub units: Option<String>,
    pub rows: Vec<PerformanceRow>,
}

impl StudyReport {
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        if format == OutputFormat::Json {
            return to_json(self);
        }
        let prefix = units_prefix(self.units.as_deref(), format);
        let fmt: fn(f64) -> String = match format {
            OutputFormat::Table => fixed,
            _ => full,
        };
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.target.m().to_string(),
                    r.target.k().to_string(),
                    r.method.to_string(),
                    fmt(r.er_sel),
                    fmt(r.er_ael),
                    fmt(r.er_zeroone),
                    fmt(r.aw),
                    fmt(r.cp),
                ]
            })
            .collect();
        let headers = [
            "m", "k", "method", "er_sel", "er_ael", "er_zeroone", "aw", "cp",
        ];
        let body = match format {
            OutputFormat::Table => {
                let mut text = aligned_table(&headers, &rows);
                let _ = write!(
                    text,
                    "replications: {}  discarded: {}\n",
                    self.replications, self.discarded
                );
                text
            }
            _ => csv_table(&headers, &rows),
        };
        Ok(prefix + &body)
    }
}

/// Model-check document; the ecdf curves are emitted as separate plot files
/// by the caller, so text renderings show the scan and the summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelCheckReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub units: Option<String>,
    pub m: u32,
    pub k: u32,
    pub result: ModelCheckResult,
}

impl ModelCheckReport {
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        if format == OutputFormat::Json {
            return to_json(self);
        }
        let prefix = units_prefix(self.units.as_deref(), format);
        let r = &self.result;
        let body = match format {
            OutputFormat::Table => {
                let scan_rows: Vec<Vec<String>> = r
                    .scan
                    .iter()
                    .map(|p| {
                        vec![
                            p.l.to_string(),
                            full(p.tau),
                            fixed(p.d1),
                            if p.l == r.l_star { "*".into() } else { String::new() },
                        ]
                    })
                    .collect();
                let mut text = aligned_table(&["l", "tau", "d1", "selected"], &scan_rows);
                let _ = write!(
                    text,
                    "tau_star: {}  d1: {}  d2: {}  d3: {}\n",
                    full(r.tau_star),
                    fixed(r.d1),
                    fixed(r.d2),
                    fixed(r.d3),
                );
                if r.fallback {
                    text.push_str("note: every scanned precision had d1 > 1; reported the closest\n");
                }
                let _ = write!(
                    text,
                    "replications: {}  discarded: {}\n",
                    r.replications, r.discarded
                );
                text
            }
            _ => {
                let headers = [
                    "tau_star",
                    "l_star",
                    "d1",
                    "d2",
                    "d3",
                    "ss1",
                    "ss2",
                    "fallback",
                    "replications",
                    "discarded",
                ];
                let row = vec![
                    full(r.tau_star),
                    r.l_star.to_string(),
                    full(r.d1),
                    full(r.d2),
                    full(r.d3),
                    full(r.ss1),
                    full(r.ss2),
                    r.fallback.to_string(),
                    r.replications.to_string(),
                    r.discarded.to_string(),
                ];
                csv_table(&headers, &[row])
            }
        };
        Ok(prefix + &body)
    }
}

/// Prior-sensitivity sweep document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub units: Option<String>,
    pub m: u32,
    pub k: u32,
    pub xi: f64,
    pub rows: Vec<SensitivityPoint>,
}

impl SensitivityReport {
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        if format == OutputFormat::Json {
            return to_json(self);
        }
        let prefix = units_prefix(self.units.as_deref(), format);
        let fmt: fn(f64) -> String = match format {
            OutputFormat::Table => fixed,
            _ => full,
        };
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|p| vec![full(p.l), fmt(p.tau), fmt(p.sel)])
            .collect();
        let headers = ["l", "tau", "sel"];
        let body = match format {
            OutputFormat::Table => aligned_table(&headers, &rows),
            _ => csv_table(&headers, &rows),
        };
        Ok(prefix + &body)
    }
}

/// Two-column plot data (used for the ecdf files).
pub fn plot_csv(header: (&str, &str), points: &[(f64, f64)]) -> String {
    let mut out = format!("{},{}\n", header.0, header.1);
    for (x, y) in points {
        let _ = writeln!(out, "{},{}", full(*x), full(*y));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_interval_report() -> IntervalReport {
        IntervalReport {
            units: Some("hours".into()),
            rows: vec![IntervalRow {
                m: 1,
                k: 1,
                kind: IntervalKind::EquiTailed,
                lower: 0.15751234,
                upper: 1.52349876,
                width: 1.36598642,
                level: 0.95,
            }],
        }
    }

    #[test]
    fn table_mode_uses_four_decimals_and_bracketed_width() {
        let text = sample_interval_report().render(OutputFormat::Table).unwrap();
        assert!(text.contains("(0.1575,1.5235) [1.3660]"), "got:\n{text}");
        assert!(text.starts_with("units: hours\n"));
        assert!(text.contains("equi-tailed"));
    }

    #[test]
    fn csv_mode_is_full_precision() {
        let text = sample_interval_report().render(OutputFormat::Csv).unwrap();
        let data_line = text.lines().last().unwrap();
        let fields: Vec<&str> = data_line.split(',').collect();
        assert_eq!(fields[3].parse::<f64>().unwrap(), 0.15751234);
        assert_eq!(fields[4].parse::<f64>().unwrap(), 1.52349876);
        assert!(text.lines().any(|l| l.starts_with("m,k,method,")));
    }

    #[test]
    fn json_round_trips_exactly() {
        let report = sample_interval_report();
        let text = report.render(OutputFormat::Json).unwrap();
        let back: IntervalReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn table_values_are_csv_values_rounded() {
        let report = PointReport {
            units: None,
            loss: None,
            rows: vec![PointRow {
                m: 2,
                k: 3,
                sel: 0.123456789,
                ael: 0.987654321,
                mode: 0.5,
            }],
        };
        let table = report.render(OutputFormat::Table).unwrap();
        let csv = report.render(OutputFormat::Csv).unwrap();
        let csv_fields: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
        for (idx, text) in [(2, "0.1235"), (3, "0.9877"), (4, "0.5000")] {
            assert!(table.contains(text), "missing {text} in:\n{table}");
            let full_value: f64 = csv_fields[idx].parse().unwrap();
            assert_eq!(format!("{full_value:.4}"), text);
        }
    }

    #[test]
    fn fit_report_renders_all_fields() {
        let report = FitReport {
            model: "two-param".into(),
            mu_hat: 0.1,
            sigma_hat: 0.2,
            converged: true,
            boundary: false,
            printed_score_residual: -3.5,
            log_likelihood: 1.25,
            ks_d: Some(0.1982),
            units: None,
        };
        let table = report.render(OutputFormat::Table).unwrap();
        for key in [
            "mu_hat",
            "sigma_hat",
            "converged",
            "boundary",
            "printed_score_residual",
            "log_likelihood",
            "ks_d",
        ] {
            assert!(table.contains(key), "missing {key}");
        }
        let csv = report.render(OutputFormat::Csv).unwrap();
        assert_eq!(csv.lines().count(), 2);
        let json = report.render(OutputFormat::Json).unwrap();
        let back: FitReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn plot_csv_shape() {
        let text = plot_csv(("u", "cdf"), &[(0.5, 0.25), (1.0, 1.0)]);
        assert_eq!(text, "u,cdf\n0.5,0.25\n1,1\n");
    }
}
