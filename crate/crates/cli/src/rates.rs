//! Noise-ladder study: rerun one problem over decreasing noise levels and
//! fit the slope of `log(median error)` against `log(delta)`.

use hilreg::iteration::{IterationConfig, Method, Runner};
use hilreg::problems::{add_noise, TestProblem};
use hilreg::scale::build_scale_operator;

use crate::config::{RateStudyConfig, StartRule};
use crate::error::CliError;
use crate::runs::run_cell;
use crate::tables::median_value;
use crate::write_text;

#[derive(Debug, Clone)]
pub struct LevelSummary {
    pub method: Method,
    pub sigma: f64,
    pub delta: f64,
    pub median_e: Option<f64>,
    pub ok: usize,
    pub failed: usize,
}

#[derive(Debug, Clone)]
pub struct RateFit {
    pub method: Method,
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub points: usize,
}

pub struct RateStudy {
    pub levels: Vec<LevelSummary>,
    pub fits: Vec<RateFit>,
    pub aborted: Option<String>,
}

/// Ordinary least squares for `y = slope * x + intercept` plus the root mean
/// square residual of the fit.
pub fn least_squares(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rms = (points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

pub fn run_rates(cfg: &RateStudyConfig) -> Result<RateStudy, CliError> {
    let problem = TestProblem::build(cfg.variant, cfg.m)?;
    let scale = build_scale_operator(cfg.m)?;
    let itcfg = IterationConfig {
        s: cfg.s,
        c: cfg.c,
        ..IterationConfig::default()
    };
    let runner = Runner::new(&problem.a, &scale, &itcfg)?;

    let mut levels = Vec::new();
    let mut fits = Vec::new();
    let mut aborted = None;
    'methods: for &method in &cfg.methods {
        let mut points = Vec::new();
        for &sigma in &cfg.levels {
            let mut delta = 0.0;
            let mut errors = Vec::new();
            let mut failed = 0;
            for &seed in &cfg.seeds {
                let noisy = add_noise(&problem.y, sigma, seed)?;
                delta = noisy.delta;
                let outcome = run_cell(
                    &runner,
                    0.5,
                    &noisy,
                    Some(&problem.x_true),
                    method,
                    StartRule::Bound,
                );
                match outcome {
                    Ok(report) if report.status == hilreg::iteration::RunStatus::Converged => {
                        match report.e_n {
                            Some(e) => errors.push(e),
                            None => failed += 1,
                        }
                    }
                    _ => failed += 1,
                }
            }
            let ok = errors.len();
            let median_e = median_value(errors);
            levels.push(LevelSummary {
                method,
                sigma,
                delta,
                median_e,
                ok,
                failed,
            });
            match median_e {
                Some(e) => points.push((delta.ln(), e.ln())),
                None => {
                    aborted = Some(format!(
                        "no {method} run converged at sigma = {sigma:e}; stopping the study"
                    ));
                    break 'methods;
                }
            }
        }
        if points.len() >= 2 {
            let (slope, intercept, rms_residual) = least_squares(&points);
            fits.push(RateFit {
                method,
                slope,
                intercept,
                rms_residual,
                points: points.len(),
            });
        }
    }
    Ok(RateStudy {
        levels,
        fits,
        aborted,
    })
}

pub const RATES_CSV_HEADER: &str = "method,sigma,delta,median_e_n,runs_ok,runs_failed";

pub fn render_rates_csv(study: &RateStudy) -> String {
    let mut out = String::from(RATES_CSV_HEADER);
    out.push('\n');
    for level in &study.levels {
        let median = level.median_e.unwrap_or(f64::NAN);
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            level.method, level.sigma, level.delta, median, level.ok, level.failed
        ));
    }
    out
}

pub fn cmd_rates(cfg: &RateStudyConfig) -> Result<(), CliError> {
    let study = run_rates(cfg)?;
    let path = cfg.out.join(format!("rates_{}.csv", cfg.variant.tag()));
    write_text(&path, &render_rates_csv(&study))?;
    println!("wrote {}", path.display());
    for fit in &study.fits {
        let expectation = match cfg.expected_slope() {
            Some(p) => format!("expected ~{p:.3}"),
            None => "expected saturation near the noise floor, no power rate".to_string(),
        };
        println!(
            "{}: slope {:.3} over {} levels (rms residual {:.3}; {expectation})",
            fit.method, fit.slope, fit.points, fit.rms_residual
        );
    }
    if let Some(reason) = &study.aborted {
        return Err(CliError::Study(reason.clone()));
    }
    Ok(())
}
