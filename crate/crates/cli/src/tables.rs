//! Per-seed benchmark tables: raw CSV rows plus an across-seed median
//! summary in markdown.
//!
//! The CSV column set and order is the stable machine interface; `status`
//! extends it with per-row outcome tags so failed cells stay visible without
//! breaking the leading columns. Floats are written with `Display`, which
//! round-trips, and rows are fully sorted, so rendering is byte-deterministic
//! for a given config.

use std::fmt::Write as _;

use hilreg::iteration::Method;

use crate::config::{ExperimentConfig, StartRule};
use crate::error::CliError;
use crate::runs::{run_sweep, status_tag, SweepResult, SweepRow};
use crate::write_text;

pub const CSV_HEADER: &str = "method,start,seed,n,alpha_n,sigma_n,d_n,e_n,status";

pub fn render_csv(sweep: &SweepResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &sweep.rows {
        let (n, alpha_n, sigma_n, d_n, e_n) = match &row.report {
            Ok(r) => (r.n, r.alpha_n, r.sigma_n, r.d_n, r.e_n.unwrap_or(f64::NAN)),
            Err(_) => (0, f64::NAN, f64::NAN, f64::NAN, f64::NAN),
        };
        writeln!(
            out,
            "{},{},{},{n},{alpha_n},{sigma_n},{d_n},{e_n},{}",
            row.method.tag(),
            row.start.tag(),
            row.seed,
            status_tag(&row.report),
        )
        .expect("string write");
    }
    out
}

/// Lower median, so the reported step count is one an actual run reached.
fn median_count(mut xs: Vec<usize>) -> Option<usize> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_unstable();
    Some(xs[(xs.len() - 1) / 2])
}

pub(crate) fn median_value(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(|a, b| a.partial_cmp(b).expect("run outputs are finite"));
    let n = xs.len();
    Some(if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    })
}

/// Across-seed medians of one `(method, start)` cell, over converged runs.
pub struct CellSummary {
    pub method: Method,
    pub start: StartRule,
    pub n: Option<usize>,
    pub alpha_n: Option<f64>,
    pub d_n: Option<f64>,
    pub e_n: Option<f64>,
    pub converged: usize,
    pub total: usize,
    /// Status tags of the non-converged rows, with multiplicities.
    pub excluded: Vec<(String, usize)>,
}

pub fn summarize_cell(rows: &[&SweepRow]) -> CellSummary {
    let method = rows[0].method;
    let start = rows[0].start;
    let ok: Vec<_> = rows
        .iter()
        .filter_map(|r| match &r.report {
            Ok(rep) if rep.status == hilreg::iteration::RunStatus::Converged => Some(rep),
            _ => None,
        })
        .collect();
    let mut excluded: Vec<(String, usize)> = Vec::new();
    for row in rows {
        let tag = status_tag(&row.report);
        if tag == "ok" {
            continue;
        }
        match excluded.iter_mut().find(|(t, _)| *t == tag) {
            Some((_, count)) => *count += 1,
            None => excluded.push((tag, 1)),
        }
    }
    excluded.sort();
    CellSummary {
        method,
        start,
        n: median_count(ok.iter().map(|r| r.n).collect()),
        alpha_n: median_value(ok.iter().map(|r| r.alpha_n).collect()),
        d_n: median_value(ok.iter().map(|r| r.d_n).collect()),
        e_n: median_value(ok.iter().filter_map(|r| r.e_n).collect()),
        converged: ok.len(),
        total: rows.len(),
        excluded,
    }
}

pub fn summarize(sweep: &SweepResult) -> Vec<CellSummary> {
    let mut cells = Vec::new();
    for &start in &StartRule::ALL {
        for &method in &Method::ALL {
            let rows: Vec<&SweepRow> = sweep
                .rows
                .iter()
                .filter(|r| r.method == method && r.start == start)
                .collect();
            if !rows.is_empty() {
                cells.push(summarize_cell(&rows));
            }
        }
    }
    cells
}

fn fmt_cell_value(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.2e}"),
        None => "-".to_string(),
    }
}

pub fn render_markdown(cfg: &ExperimentConfig, sweep: &SweepResult) -> String {
    let cells = summarize(sweep);
    let mut out = String::new();
    writeln!(
        out,
        "# Variant {} at m = {}, sigma = {}\n",
        cfg.variant, cfg.m, cfg.sigma
    )
    .expect("string write");
    writeln!(
        out,
        "Noise level delta = {:.2e}; medians over {} seeds per cell.",
        sweep.delta,
        cfg.seeds.len()
    )
    .expect("string write");
    for &start in &StartRule::ALL {
        let block: Vec<&CellSummary> = cells.iter().filter(|c| c.start == start).collect();
        if block.is_empty() {
            continue;
        }
        let label = match start {
            StartRule::Bound => "residual bound",
            StartRule::One => "alpha_1 = 1",
        };
        writeln!(out, "\nStart rule `{}` ({label}):\n", start.tag()).expect("string write");
        out.push_str("| method | n | alpha_n | d_n | e_n |\n");
        out.push_str("|--------|--:|--------:|----:|----:|\n");
        for cell in &block {
            writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                cell.method.tag(),
                cell.n.map_or("-".to_string(), |n| n.to_string()),
                fmt_cell_value(cell.alpha_n),
                fmt_cell_value(cell.d_n),
                fmt_cell_value(cell.e_n),
            )
            .expect("string write");
        }
        for cell in &block {
            if cell.converged < cell.total {
                let detail: Vec<String> = cell
                    .excluded
                    .iter()
                    .map(|(tag, count)| format!("{count} {tag}"))
                    .collect();
                writeln!(
                    out,
                    "\n{}: medians over {} of {} runs ({})",
                    cell.method.tag(),
                    cell.converged,
                    cell.total,
                    detail.join(", ")
                )
                .expect("string write");
            }
        }
    }
    out
}

pub fn cmd_tables(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let sweep = run_sweep(cfg)?;
    let csv_path = cfg.out.join(format!("tables_{}.csv", cfg.variant));
    let md_path = cfg.out.join(format!("tables_{}.md", cfg.variant));
    let markdown = render_markdown(cfg, &sweep);
    write_text(&csv_path, &render_csv(&sweep))?;
    write_text(&md_path, &markdown)?;
    print!("{markdown}");
    println!("\nwrote {}", csv_path.display());
    println!("wrote {}", md_path.display());
    Ok(())
}
