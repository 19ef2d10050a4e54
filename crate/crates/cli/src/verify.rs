//! Structural self-checks: filter algebra on random sequences, agreement of
//! the stepped iteration with its closed spectral form, and the recorded-run
//! properties every method must satisfy.
//!
//! The run checkers are pure functions over [`RunReport`] values so the same
//! code audits live runs, stored traces, and deliberately corrupted reports
//! (the unit tests corrupt reports to prove each checker actually fires).

use std::fmt;

use hilreg::filters::{check_properties, log_grid, oracle_solution, AlphaSequence};
use hilreg::iteration::{IterationConfig, Method, RunReport, RunStatus, Runner};
use hilreg::problems::{add_noise, TestProblem, Variant};
use hilreg::rules::alpha_upper_bound;
use hilreg::scale::build_scale_operator;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::StartRule;
use crate::error::CliError;
use crate::runs::run_cell;

#[derive(Debug, Clone)]
pub struct Violation {
    pub module: &'static str,
    pub property: &'static str,
    pub witness: String,
}

impl Violation {
    fn new(module: &'static str, property: &'static str, witness: String) -> Violation {
        Violation {
            module,
            property,
            witness,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}: {}", self.module, self.property, self.witness)
    }
}

pub struct SuiteResult {
    pub name: &'static str,
    pub checks: usize,
    pub violations: Vec<Violation>,
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * unit(rng)).exp()
}

/// Filter bounds and the `r + lambda g = 1` identity on random sequences.
/// Violations are relative where the bound has a scale, so one tolerance
/// covers sequences spanning many orders of magnitude.
pub fn filter_suite(sequences: usize, seed: u64, tol: f64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambdas = log_grid(1e-10, 1e2, 31);
    let mut violations = Vec::new();
    let mut checks = 0;
    for i in 0..sequences {
        let n = 1 + (rng.next_u64() % 20) as usize;
        let alphas: Vec<f64> = (0..n).map(|_| log_uniform(&mut rng, 1e-8, 1e3)).collect();
        let seq = AlphaSequence::new(alphas).expect("positive finite draws");
        let report = check_properties(&seq, &lambdas);
        checks += 4;
        if report.max_violation() > tol {
            violations.push(Violation::new(
                "filters",
                "filter-bounds",
                format!("sequence {i} (n = {n}): violation {:.3e}", report.max_violation()),
            ));
        }
        for &lambda in &lambdas {
            checks += 1;
            let r = seq.eval_r(lambda);
            let g = seq.eval_g(lambda);
            let defect = (r + lambda * g - 1.0).abs();
            if defect > tol {
                violations.push(Violation::new(
                    "filters",
                    "filter-identity",
                    format!("sequence {i}, lambda = {lambda:.3e}: defect {defect:.3e}"),
                ));
            }
        }
    }
    SuiteResult {
        name: "filters",
        checks,
        violations,
    }
}

/// Stepping through random parameter sequences must land on the closed
/// spectral form of the same regularized solution.
pub fn oracle_suite(instances: usize, seed: u64, tol: f64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grades = [0.0, 0.5, 1.0, 2.0];
    let mut violations = Vec::new();
    for i in 0..instances {
        let variant = Variant::ALL[i % Variant::ALL.len()];
        let m = 6 + (rng.next_u64() % 45) as usize;
        let n = 1 + (rng.next_u64() % 10) as usize;
        let s = grades[(rng.next_u64() % grades.len() as u64) as usize];
        let alpha1 = log_uniform(&mut rng, 1e-6, 1e2);
        let q = 0.3 + 0.6 * unit(&mut rng);
        let witness = |msg: String| {
            Violation::new(
                "oracle",
                "oracle-equivalence",
                format!("instance {i} (variant {variant}, m = {m}, n = {n}, s = {s}): {msg}"),
            )
        };
        let outcome = (|| -> hilreg::Result<f64> {
            let problem = TestProblem::build(variant, m)?;
            let noisy = add_noise(&problem.y, 0.01, 1000 + i as u64)?;
            let scale = build_scale_operator(m)?;
            let cfg = IterationConfig {
                s,
                ..IterationConfig::default()
            };
            let runner = Runner::new(&problem.a, &scale, &cfg)?;
            let seq = AlphaSequence::geometric(alpha1, q, n)?;
            let x0 = vec![0.0; m];
            let mut x = x0.clone();
            for &alpha in seq.alphas() {
                x = runner.step(alpha, &x, &noisy.y_delta)?;
            }
            let oracle = oracle_solution(&problem.a, &scale, s, &seq, &x0, &noisy.y_delta)?;
            let num: f64 = x
                .iter()
                .zip(&oracle)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let den = oracle.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
            Ok(num / den)
        })();
        match outcome {
            Ok(rel) if rel <= tol => {}
            Ok(rel) => violations.push(witness(format!("relative gap {rel:.3e}"))),
            Err(e) => violations.push(witness(format!("failed to run: {e}"))),
        }
    }
    SuiteResult {
        name: "oracle",
        checks: instances,
        violations,
    }
}

fn converged(report: &RunReport) -> bool {
    report.status == RunStatus::Converged
}

fn label(report: &RunReport) -> String {
    format!("{} n = {}", report.method, report.n)
}

/// Trace parameters must strictly decrease (equivalently, the Newton
/// reciprocals strictly increase).
pub fn check_alpha_strictly_decreasing(report: &RunReport) -> Option<Violation> {
    for pair in report.trace.windows(2) {
        if !(pair[1].alpha < pair[0].alpha) {
            return Some(Violation::new(
                "rules",
                "alpha-decreasing",
                format!(
                    "{}: alpha_{} = {:.6e} then alpha_{} = {:.6e}",
                    label(report),
                    pair[0].k,
                    pair[0].alpha,
                    pair[1].k,
                    pair[1].alpha
                ),
            ));
        }
    }
    None
}

/// The recorded discrepancies strictly decrease along every trace.
pub fn check_discrepancy_strictly_decreasing(report: &RunReport) -> Option<Violation> {
    for pair in report.trace.windows(2) {
        if !(pair[1].d < pair[0].d) {
            return Some(Violation::new(
                "iteration",
                "discrepancy-decreasing",
                format!(
                    "{}: d_{} = {:.6e} then d_{} = {:.6e}",
                    label(report),
                    pair[0].k,
                    pair[0].d,
                    pair[1].k,
                    pair[1].d
                ),
            ));
        }
    }
    None
}

/// Graded error `e_s` strictly decreases at every step whose discrepancy is
/// still at or above the noise level. The implicit iterations carry the
/// iterate forward, so consecutive rows must decrease. Each row of a
/// Tikhonov parameter search is a fresh single-step solve from the start
/// vector (the search refines the parameter, not the iterate), so its rows
/// are compared against the start error `e_s_start` instead; consecutive
/// search rows can tick up near saturation without breaking anything.
pub fn check_error_monotone(report: &RunReport, e_s_start: f64, delta: f64) -> Option<Violation> {
    let carries_iterate = report.method != Method::TiDp;
    let mut prev = e_s_start;
    for row in &report.trace {
        let e_s = row.e_s?;
        if row.d >= delta && !(e_s < prev) {
            return Some(Violation::new(
                "iteration",
                "error-monotone",
                format!(
                    "{}: step {} has d = {:.6e} >= delta but e_s {:.6e} -> {:.6e}",
                    label(report),
                    row.k,
                    row.d,
                    prev,
                    e_s
                ),
            ));
        }
        if carries_iterate {
            prev = e_s;
        }
    }
    None
}

/// `sigma_n` must match its definition: the reciprocal sum over the trace for
/// the iterative methods, the final reciprocal for `TI/DP`.
pub fn check_sigma_consistent(report: &RunReport) -> Option<Violation> {
    if report.n == 0 {
        return None;
    }
    let expected = match report.method {
        Method::TiDp => 1.0 / report.alpha_n,
        Method::IimA1 | Method::IimGs => report.trace.iter().map(|r| 1.0 / r.alpha).sum(),
    };
    let rel = (report.sigma_n - expected).abs() / expected.abs().max(1e-300);
    if rel > 1e-9 {
        return Some(Violation::new(
            "rules",
            "sigma-consistency",
            format!(
                "{}: sigma_n = {:.9e} but the trace gives {expected:.9e}",
                label(report),
                report.sigma_n
            ),
        ));
    }
    None
}

/// Converged runs must end at or below the target `c * delta`; `TI/DP`
/// approaches the discrepancy from above, so it must also stay at or above
/// `delta`. The adaptive and geometric methods may legitimately land below.
pub fn check_final_bracketing(report: &RunReport, delta: f64, c: f64) -> Option<Violation> {
    if !converged(report) {
        return None;
    }
    let upper_ok = report.d_n <= c * delta * (1.0 + 1e-12);
    let lower_ok = report.method != Method::TiDp || report.d_n >= delta * (1.0 - 1e-9);
    if upper_ok && lower_ok {
        return None;
    }
    Some(Violation::new(
        "rules",
        "final-bracketing",
        format!(
            "{}: d_n = {:.6e} outside its bracket for delta = {delta:.6e}, c = {c}",
            label(report),
            report.d_n
        ),
    ))
}

/// The discrepancy parameter must sit strictly below the residual upper
/// bound computed from the same data.
pub fn check_alpha_within_bound(report: &RunReport, bound: f64) -> Option<Violation> {
    if !converged(report) {
        return None;
    }
    if report.alpha_n < bound * (1.0 + 1e-12) {
        return None;
    }
    Some(Violation::new(
        "rules",
        "dp-bound",
        format!(
            "{}: alpha_n = {:.6e} is not below the bound {bound:.6e}",
            label(report),
            report.alpha_n
        ),
    ))
}

/// Adaptive-run tail diagnostics: exchanging the last two parameters must
/// leave the previous iterate infeasible, and the recorded tail ratio must
/// be finite.
pub fn check_adaptive_tail(report: &RunReport, delta: f64) -> Option<Violation> {
    if report.method != Method::IimA1 || !converged(report) || report.n < 2 {
        return None;
    }
    let make = |msg: String| Some(Violation::new("rules", "tail-swap", format!("{}: {msg}", label(report))));
    match report.swapped_tail_d {
        None => make("missing swapped-parameter discrepancy".to_string()),
        Some(d) if d <= delta * (1.0 - 1e-9) => {
            make(format!("swapped-parameter discrepancy {d:.6e} <= delta {delta:.6e}"))
        }
        Some(_) => match report.tail_ratio {
            Some(r) if r.is_finite() => None,
            other => make(format!("tail ratio {other:?} is not finite")),
        },
    }
}

/// Geometric runs must flag that the stopping index obeyed the sequence
/// growth condition.
pub fn check_geometric_tail(report: &RunReport) -> Option<Violation> {
    if report.method != Method::IimGs || !converged(report) {
        return None;
    }
    if report.geometric_tail_ok == Some(true) {
        return None;
    }
    Some(Violation::new(
        "rules",
        "tail-geometric",
        format!(
            "{}: growth condition flag is {:?}",
            label(report),
            report.geometric_tail_ok
        ),
    ))
}

/// The adaptive method never needs more steps than the Newton discrepancy
/// search for Tikhonov on the same data and start.
pub fn check_step_pairing(adaptive: &RunReport, tikhonov: &RunReport) -> Option<Violation> {
    if !converged(adaptive) || !converged(tikhonov) {
        return None;
    }
    if adaptive.n <= tikhonov.n {
        return None;
    }
    Some(Violation::new(
        "rules",
        "step-pairing",
        format!(
            "adaptive n = {} exceeds paired Tikhonov search n = {}",
            adaptive.n, tikhonov.n
        ),
    ))
}

/// Applies every applicable checker to one report; `bound` is the residual
/// upper bound for the `TI/DP` parameter check.
pub fn check_report(
    report: &RunReport,
    e_s_start: f64,
    delta: f64,
    c: f64,
    bound: f64,
) -> (usize, Vec<Violation>) {
    let mut violations = Vec::new();
    let mut checks = 0;
    let mut run = |v: Option<Violation>| {
        checks += 1;
        violations.extend(v);
    };
    run(check_alpha_strictly_decreasing(report));
    run(check_discrepancy_strictly_decreasing(report));
    run(check_error_monotone(report, e_s_start, delta));
    run(check_sigma_consistent(report));
    run(check_final_bracketing(report, delta, c));
    run(check_adaptive_tail(report, delta));
    run(check_geometric_tail(report));
    if report.method == Method::TiDp {
        run(check_alpha_within_bound(report, bound));
    }
    (checks, violations)
}

/// Full-size spot check: every method under both start rules on real data.
pub fn structure_suite(m: usize, sigma: f64, seeds: &[u64]) -> SuiteResult {
    let mut violations = Vec::new();
    let mut checks = 0;
    for variant in Variant::ALL {
        let outcome = (|| -> hilreg::Result<()> {
            let problem = TestProblem::build(variant, m)?;
            let scale = build_scale_operator(m)?;
            let cfg = IterationConfig::default();
            let runner = Runner::new(&problem.a, &scale, &cfg)?;
            let e_s_start = scale.norm(cfg.s, &problem.x_true)?;
            for &seed in seeds {
                let noisy = add_noise(&problem.y, sigma, seed)?;
                let bound = alpha_upper_bound(&runner, &noisy, cfg.c)?;
                for start in StartRule::ALL {
                    let mut reports = Vec::new();
                    for method in Method::ALL {
                        match run_cell(&runner, 0.5, &noisy, Some(&problem.x_true), method, start) {
                            Ok(report) => {
                                let (c_done, v) =
                                    check_report(&report, e_s_start, noisy.delta, cfg.c, bound);
                                checks += c_done;
                                violations.extend(v.into_iter().map(|mut v| {
                                    v.witness = format!("variant {variant} seed {seed} {}: {}", start, v.witness);
                                    v
                                }));
                                reports.push(report);
                            }
                            Err(e) => violations.push(Violation::new(
                                "rules",
                                "run-failure",
                                format!("variant {variant} seed {seed} {method} {start}: {e}"),
                            )),
                        }
                    }
                    if let [ti, a1, _] = &reports[..] {
                        checks += 1;
                        violations.extend(check_step_pairing(a1, ti).map(|mut v| {
                            v.witness = format!("variant {variant} seed {seed} {start}: {}", v.witness);
                            v
                        }));
                    }
                }
            }
            Ok(())
        })();
        if let Err(e) = outcome {
            violations.push(Violation::new(
                "rules",
                "setup-failure",
                format!("variant {variant}: {e}"),
            ));
        }
    }
    SuiteResult {
        name: "structure",
        checks,
        violations,
    }
}

pub fn cmd_verify() -> Result<(), CliError> {
    let suites = [
        filter_suite(500, 17, 1e-12),
        oracle_suite(120, 23, 1e-8),
        structure_suite(400, 0.01, &[1]),
    ];
    let mut total = 0;
    for suite in &suites {
        let verdict = if suite.violations.is_empty() { "ok" } else { "FAIL" };
        println!(
            "{}: {} checks, {} violations .. {verdict}",
            suite.name,
            suite.checks,
            suite.violations.len()
        );
        for v in &suite.violations {
            println!("  {v}");
        }
        total += suite.violations.len();
    }
    if total > 0 {
        return Err(CliError::Violations(total));
    }
    Ok(())
}
