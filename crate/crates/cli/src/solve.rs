//! Single-run driver: one (method, start rule, seed) cell with the full
//! iteration trace written to CSV.

use hilreg::iteration::{IterationConfig, Method, RunReport, Runner};
use hilreg::problems::{add_noise, TestProblem};
use hilreg::scale::build_scale_operator;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::runs::run_cell;
use crate::write_text;

pub const TRACE_CSV_HEADER: &str = "k,alpha,d,e,e_s";

/// The method tag contains a slash, which would read as a path separator.
pub fn trace_filename(method: Method, seed: u64) -> String {
    format!("trace_{}_{seed}.csv", method.tag().replace('/', "-"))
}

/// One row per completed step; the error columns are NaN when the true
/// solution was not supplied.
pub fn render_trace_csv(report: &RunReport) -> String {
    let mut out = String::from(TRACE_CSV_HEADER);
    out.push('\n');
    for row in &report.trace {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.k,
            row.alpha,
            row.d,
            row.e.unwrap_or(f64::NAN),
            row.e_s.unwrap_or(f64::NAN)
        ));
    }
    out
}

/// Runs the first configured method on the first configured seed. Extra list
/// entries are accepted so the same config file can drive `tables` too.
pub fn cmd_solve(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let method = cfg.methods[0];
    let seed = cfg.seeds[0];
    let problem = TestProblem::build(cfg.variant, cfg.m)?;
    let scale = build_scale_operator(cfg.m)?;
    let itcfg = IterationConfig {
        s: cfg.s,
        c: cfg.c,
        ..IterationConfig::default()
    };
    let runner = Runner::new(&problem.a, &scale, &itcfg)?;
    let noisy = add_noise(&problem.y, cfg.sigma, seed)?;
    let report = run_cell(&runner, cfg.q, &noisy, Some(&problem.x_true), method, cfg.start)?;

    let path = cfg.out.join(trace_filename(method, seed));
    write_text(&path, &render_trace_csv(&report))?;

    println!(
        "variant {} at m = {}, sigma = {}, seed {}: delta = {:.6e}",
        cfg.variant.tag(),
        cfg.m,
        cfg.sigma,
        seed,
        noisy.delta
    );
    println!(
        "{method} with start rule `{}`: status {}, n = {}, alpha_n = {:.6e}, d_n = {:.6e}",
        cfg.start,
        report.status.tag(),
        report.n,
        report.alpha_n,
        report.d_n
    );
    if let Some(e) = report.e_n {
        println!("reconstruction error = {e:.6e}");
    }
    println!("wrote {}", path.display());
    Ok(())
}
