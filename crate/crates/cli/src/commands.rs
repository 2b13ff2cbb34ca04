//! Subcommand bodies. Each builds one document plus a status.

use rayon::prelude::*;
use serde::Serialize;

use qflat_core::asymptotics::{check_asymptotics, AsymptoticCheck};
use qflat_core::flatness::{
    centrality_check, curvature_samples, flat_target, matches_theorem, rationality_argument, theorem_scan,
    CentralityEntry, FlatMode, FlatnessReport, RationalityArgument, ScanOptions,
};
use qflat_core::quadrature::{dlogq, DerivativeOrder, LogDerivative};
use qflat_core::rational::format_rational;
use qflat_core::spaces::{chi_params, RootData};

use crate::args::{CentralityArgs, CurvatureArgs, Format, QtableArgs, ScanArgs, VerifyArgs};
use crate::format::{sci, sci_scaled, tau as tau_str};
use crate::{CliError, Document, Status};

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn csv_document(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn json_document<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

fn ok_or_failed(failed: bool) -> Status {
    if failed {
        Status::CellFailed
    } else {
        Status::Ok
    }
}

#[derive(Serialize)]
struct Header {
    command: &'static str,
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at_unix: Option<u64>,
}

fn header(command: &'static str, timestamps: bool) -> Header {
    let generated_at_unix = timestamps.then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    Header {
        command,
        version: VERSION,
        generated_at_unix,
    }
}

// ---------------------------------------------------------------- list

#[derive(Serialize)]
struct ListEntry {
    space: String,
    #[serde(flatten)]
    root: RootData,
    #[serde(rename = "A")]
    a_param: u32,
    mu: String,
    kappa: String,
    nu: String,
}

#[derive(Serialize)]
struct ListDoc {
    #[serde(flatten)]
    header: Header,
    spaces: Vec<ListEntry>,
}

pub fn list(format: Format, timestamps: bool) -> Result<Document, CliError> {
    let spaces: Vec<ListEntry> = qflat_core::spaces::catalog()
        .into_iter()
        .map(|root| {
            let p = chi_params(&root, 0);
            ListEntry {
                space: root.name(),
                a_param: root.a_param(),
                mu: format_rational(&p.mu),
                kappa: format_rational(&p.kappa),
                nu: format_rational(&p.nu),
                root,
            }
        })
        .collect();
    let text = match format {
        Format::Json => json_document(&ListDoc {
            header: header("list", timestamps),
            spaces,
        })?,
        Format::Csv => csv_document(
            &["space", "family", "m", "m_beta", "m_half", "B", "A", "mu", "kappa", "nu"],
            spaces.iter().map(|e| {
                vec![
                    e.space.clone(),
                    serde_json::to_value(e.root.family)
                        .ok()
                        .and_then(|v| v.as_str().map(str::to_owned))
                        .unwrap_or_default(),
                    e.root.m.to_string(),
                    e.root.m_beta.to_string(),
                    e.root.m_half.to_string(),
                    tau_str(e.root.b),
                    e.a_param.to_string(),
                    e.mu.clone(),
                    e.kappa.clone(),
                    e.nu.clone(),
                ]
            }),
        )?,
    };
    Ok(Document { text, status: Status::Ok })
}

// ---------------------------------------------------------------- qtable / curvature

/// One (space, n, τ) evaluation of q and (log q)″.
#[derive(Serialize)]
struct Cell {
    space: String,
    n: u32,
    tau: f64,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    q: Option<String>,
    abs_err: Option<String>,
    ln_q: Option<f64>,
    dlogq2: Option<f64>,
    cancellation_flag: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    prefactor_residual: Option<f64>,
}

impl Cell {
    fn new(space: &RootData, n: u32, tau: f64, result: qflat_core::Result<LogDerivative>) -> Self {
        match result {
            Ok(d) => Cell {
                space: space.name(),
                n,
                tau,
                status: "ok",
                error: None,
                q: Some(sci_scaled(d.q.mantissa, d.q.ln_scale)),
                abs_err: Some(sci_scaled(d.q.error_mantissa, d.q.ln_scale)),
                ln_q: Some(d.q.ln_value()),
                dlogq2: Some(d.value),
                cancellation_flag: Some(d.cancellation_flag),
                prefactor_residual: None,
            },
            Err(e) => Cell {
                space: space.name(),
                n,
                tau,
                status: "error",
                error: Some(e.to_string()),
                q: None,
                abs_err: None,
                ln_q: None,
                dlogq2: None,
                cancellation_flag: None,
                prefactor_residual: None,
            },
        }
    }

    fn failed(&self) -> bool {
        self.error.is_some()
    }

    fn csv_row(&self, with_residual: bool) -> Vec<String> {
        let mut row = vec![
            self.space.clone(),
            self.n.to_string(),
            tau_str(self.tau),
            self.q.clone().unwrap_or_default(),
            self.abs_err.clone().unwrap_or_default(),
            opt(self.dlogq2),
        ];
        if with_residual {
            row.push(opt(self.prefactor_residual));
        }
        row
    }
}

fn report_failures(cells: &[Cell]) {
    for c in cells.iter().filter(|c| c.failed()) {
        eprintln!(
            "qflat: {} n={} tau={}: {}",
            c.space,
            c.n,
            tau_str(c.tau),
            c.error.as_deref().unwrap_or("")
        );
    }
}

#[derive(Serialize)]
struct QtableDoc<'a> {
    #[serde(flatten)]
    header: Header,
    tol: f64,
    cells: &'a [Cell],
}

pub fn qtable(a: &QtableArgs, format: Format) -> Result<Document, CliError> {
    let jobs: Vec<(&RootData, u32, f64)> = a
        .space
        .0
        .iter()
        .flat_map(|s| a.n.0.iter().flat_map(move |&n| a.tau.0.iter().map(move |&t| (s, n, t))))
        .collect();
    let cells: Vec<Cell> = jobs
        .par_iter()
        .map(|&(s, n, t)| Cell::new(s, n, t, dlogq(s, n, t, DerivativeOrder::Second, a.tol)))
        .collect();
    report_failures(&cells);
    let text = match format {
        Format::Json => json_document(&QtableDoc {
            header: header("qtable", a.out.timestamps),
            tol: a.tol,
            cells: &cells,
        })?,
        Format::Csv => csv_document(
            &["space", "n", "tau", "q", "abs_err", "dlogq2"],
            cells.iter().map(|c| c.csv_row(false)),
        )?,
    };
    Ok(Document {
        text,
        status: ok_or_failed(cells.iter().any(Cell::failed)),
    })
}

#[derive(Serialize)]
struct CurvatureSummary {
    space: String,
    max_chi_deviation: Option<f64>,
    max_prefactor_residual: Option<f64>,
}

#[derive(Serialize)]
struct CurvatureDoc<'a> {
    #[serde(flatten)]
    header: Header,
    tol: f64,
    mode: FlatMode,
    #[serde(rename = "B")]
    b: f64,
    tau_grid: &'a [f64],
    summary: Vec<CurvatureSummary>,
    cells: &'a [Cell],
}

pub fn curvature(a: &CurvatureArgs, format: Format) -> Result<Document, CliError> {
    let g = &a.grid;
    let mode = FlatMode::from(g.mode);
    let mut cells = Vec::new();
    let mut summary = Vec::new();
    for space in &a.space.0 {
        let space = space.clone().with_scale(g.b)?;
        let grid = curvature_samples(&space, g.n_max, &g.tau.0, g.tol)?;
        summary.push(CurvatureSummary {
            space: space.name(),
            max_chi_deviation: grid.max_chi_deviation(),
            max_prefactor_residual: grid.flat_residual(space.m, mode),
        });
        for c in grid.cells {
            let result = match (c.dlogq2, c.error) {
                (Some(_), _) => Ok(()),
                (None, e) => Err(e.unwrap_or_default()),
            };
            let mut cell = Cell {
                space: space.name(),
                n: c.n,
                tau: c.tau,
                status: if result.is_ok() { "ok" } else { "error" },
                error: result.err(),
                q: None,
                abs_err: None,
                ln_q: None,
                dlogq2: c.dlogq2,
                cancellation_flag: c.dlogq2.map(|_| c.cancellation_flag),
                prefactor_residual: c.dlogq2.map(|v| (v - flat_target(space.m, c.tau, mode)).abs()),
            };
            if let (Some(q), Some(e)) = (c.q, c.q_abs_error) {
                // Curvature grids stay well inside the double range.
                cell.q = Some(sci(q));
                cell.abs_err = Some(sci(e));
                cell.ln_q = Some(q.ln());
            }
            cells.push(cell);
        }
    }
    report_failures(&cells);
    let text = match format {
        Format::Json => json_document(&CurvatureDoc {
            header: header("curvature", a.out.timestamps),
            tol: g.tol,
            mode,
            b: g.b,
            tau_grid: &g.tau.0,
            summary,
            cells: &cells,
        })?,
        Format::Csv => csv_document(
            &["space", "n", "tau", "q", "abs_err", "dlogq2", "prefactor_residual"],
            cells.iter().map(|c| c.csv_row(true)),
        )?,
    };
    Ok(Document {
        text,
        status: ok_or_failed(cells.iter().any(Cell::failed)),
    })
}

// ---------------------------------------------------------------- centrality

#[derive(Serialize)]
struct SpaceCentrality {
    space: String,
    entries: Vec<CentralityEntry>,
    rationality: RationalityArgument,
}

#[derive(Serialize)]
struct CentralityDoc {
    #[serde(flatten)]
    header: Header,
    results: Vec<SpaceCentrality>,
}

pub fn centrality(a: &CentralityArgs, format: Format) -> Result<Document, CliError> {
    if a.n.0.contains(&0) {
        return Err(CliError::Config("centrality isotypes must be positive".into()));
    }
    let results: Vec<SpaceCentrality> = a
        .space
        .0
        .iter()
        .map(|s| {
            Ok(SpaceCentrality {
                space: s.name(),
                entries: centrality_check(s, &a.n.0)?,
                rationality: rationality_argument(s),
            })
        })
        .collect::<Result<_, qflat_core::Error>>()?;
    let text = match format {
        Format::Json => json_document(&CentralityDoc {
            header: header("centrality", a.out.timestamps),
            results,
        })?,
        Format::Csv => csv_document(
            &["space", "n", "lhs", "rhs", "lhs_exact", "rhs_exact", "pass"],
            results.iter().flat_map(|r| {
                r.entries.iter().map(|e| {
                    vec![
                        r.space.clone(),
                        e.n.to_string(),
                        format_rational(&e.lhs),
                        e.rhs.to_string(),
                        e.lhs_exact.to_string(),
                        e.rhs_exact.to_string(),
                        e.pass.to_string(),
                    ]
                })
            }),
        )?,
    };
    Ok(Document { text, status: Status::Ok })
}

// ---------------------------------------------------------------- scan

#[derive(Serialize)]
struct ScanDoc<'a> {
    #[serde(flatten)]
    header: Header,
    options: ScanOptions,
    #[serde(rename = "B")]
    b: f64,
    matches_theorem: bool,
    reports: &'a [FlatnessReport],
}

fn verdict_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

pub fn scan(a: &ScanArgs, format: Format) -> Result<Document, CliError> {
    let g = &a.grid;
    let spaces = a
        .spaces
        .0
        .iter()
        .map(|s| s.clone().with_scale(g.b))
        .collect::<Result<Vec<_>, _>>()?;
    let opts = ScanOptions {
        n_max: g.n_max,
        tol: g.tol,
        mode: g.mode.into(),
    };
    let reports = theorem_scan(&spaces, &g.tau.0, &opts)?;
    let matches = matches_theorem(&reports);
    for r in &reports {
        for e in &r.errors {
            eprintln!("qflat: {}: {e}", r.space);
        }
    }
    let text = match format {
        Format::Json => json_document(&ScanDoc {
            header: header("scan", a.out.timestamps),
            options: opts,
            b: g.b,
            matches_theorem: matches,
            reports: &reports,
        })?,
        Format::Csv => csv_document(
            &[
                "space",
                "verdict",
                "max_chi_deviation",
                "prefactor_residual",
                "witness_n",
                "witness_lhs",
                "witness_rhs",
                "failed_cells",
            ],
            reports.iter().map(|r| {
                let w = r.exact_witness.as_ref();
                vec![
                    r.space.clone(),
                    verdict_name(&r.verdict),
                    opt(r.max_chi_deviation),
                    opt(r.prefactor_residual),
                    w.map(|w| w.n.to_string()).unwrap_or_default(),
                    w.map(|w| w.lhs.clone()).unwrap_or_default(),
                    w.map(|w| w.rhs.clone()).unwrap_or_default(),
                    r.failed_cells.to_string(),
                ]
            }),
        )?,
    };
    let failed = reports.iter().any(|r| !r.errors.is_empty());
    let status = if failed {
        Status::CellFailed
    } else if a.expect_theorem && !matches {
        Status::TheoremMismatch
    } else {
        Status::Ok
    };
    Ok(Document { text, status })
}

// ---------------------------------------------------------------- verify-asymptotics

#[derive(Serialize)]
struct VerifyDoc<'a> {
    #[serde(flatten)]
    header: Header,
    tol: f64,
    watson_taus: [f64; 2],
    large_taus: [f64; 2],
    checks: &'a [AsymptoticCheck],
}

pub fn verify_asymptotics(a: &VerifyArgs, format: Format) -> Result<Document, CliError> {
    use qflat_core::asymptotics::{LARGE_TAUS, WATSON_TAUS};
    let jobs: Vec<(&RootData, u32)> = a
        .spaces
        .0
        .iter()
        .flat_map(|s| a.n.0.iter().map(move |&n| (s, n)))
        .collect();
    let checks = jobs
        .par_iter()
        .map(|&(s, n)| check_asymptotics(s, n, a.tol))
        .collect::<Result<Vec<_>, _>>();
    let checks = match checks {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qflat: {e}");
            return Ok(Document {
                text: String::new(),
                status: Status::CellFailed,
            });
        }
    };
    let text = match format {
        Format::Json => json_document(&VerifyDoc {
            header: header("verify-asymptotics", a.out.timestamps),
            tol: a.tol,
            watson_taus: WATSON_TAUS,
            large_taus: LARGE_TAUS,
            checks: &checks,
        })?,
        Format::Csv => csv_document(
            &[
                "space",
                "n",
                "watson_rel_err",
                "watson_rel_err_half",
                "watson_err_ratio",
                "watson_pass",
                "large_ratio",
                "large_ratio_far",
                "large_pass",
            ],
            checks.iter().map(|c| {
                vec![
                    c.space.clone(),
                    c.n.to_string(),
                    sci(c.watson_rel_err[0]),
                    sci(c.watson_rel_err[1]),
                    sci(c.watson_err_ratio),
                    c.watson_pass.to_string(),
                    opt(c.large_ratio.map(|r| r[0])),
                    opt(c.large_ratio.map(|r| r[1])),
                    c.large_pass.map(|p| p.to_string()).unwrap_or_default(),
                ]
            }),
        )?,
    };
    Ok(Document { text, status: Status::Ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_cell_keeps_columns_and_fails_status() {
        let space: RootData = "S3".parse().unwrap();
        let err = qflat_core::Error::NonConvergence {
            best: 1.0,
            abs_error: 1.0,
            panels: 7,
        };
        let cell = Cell::new(&space, 2, 0.5, Err(err));
        assert!(cell.failed());
        assert_eq!(cell.csv_row(false), ["S3", "2", "0.5", "", "", ""]);
        assert_eq!(cell.csv_row(true).len(), 7);
        assert_eq!(cell.status, "error");
        assert_eq!(ok_or_failed(true).exit_code(), 2);
        assert_eq!(ok_or_failed(false).exit_code(), 0);
    }

    #[test]
    fn csv_uses_lf_and_quotes_when_needed() {
        let doc = csv_document(&["a", "b"], [vec!["x,y".to_string(), "z".to_string()]]).unwrap();
        assert_eq!(doc, "a,b\n\"x,y\",z\n");
    }
}
