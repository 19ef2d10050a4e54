//! Acceptance gate: every release criterion as one test with a printed
//! pass/fail line. Run with `--nocapture` to see the lines for passing
//! criteria too.
//!
//! The full-size sweep (three problem variants, three methods, two start
//! rules, ten seeds each at m = 400) is computed once and shared.

use std::process::Command;
use std::sync::LazyLock;
use std::time::Instant;

use hilreg::iteration::{IterationConfig, Method, RunStatus, Runner};
use hilreg::problems::{add_noise, TestProblem, Variant};
use hilreg::rules::alpha_upper_bound;
use hilreg::scale::{build_scale_operator, ScaleOperator};
use hilreg_cli::config::{ExperimentConfig, RateStudyConfig, StartRule};
use hilreg_cli::rates::run_rates;
use hilreg_cli::runs::{run_sweep, SweepResult};
use hilreg_cli::tables::summarize;
use hilreg_cli::verify::{
    check_alpha_strictly_decreasing, check_alpha_within_bound, check_error_monotone,
    check_step_pairing, filter_suite, oracle_suite,
};

fn criterion(number: usize, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("[{verdict}] criterion {number} ({name}): {detail}");
    assert!(pass, "criterion {number} ({name}): {detail}");
}

struct VariantData {
    variant: Variant,
    problem: TestProblem,
    scale: ScaleOperator,
    sweep: SweepResult,
}

static SWEEPS: LazyLock<Vec<VariantData>> = LazyLock::new(|| {
    Variant::ALL
        .iter()
        .map(|&variant| {
            let cfg = ExperimentConfig {
                variant,
                ..ExperimentConfig::default()
            };
            let sweep = run_sweep(&cfg).expect("benchmark sweep");
            let problem = TestProblem::build(variant, cfg.m).expect("problem");
            let scale = build_scale_operator(cfg.m).expect("scale");
            VariantData {
                variant,
                problem,
                scale,
                sweep,
            }
        })
        .collect()
});

#[test]
fn criterion_1_filter_properties() {
    let t0 = Instant::now();
    let suite = filter_suite(1000, 2024, 1e-12);
    let secs = t0.elapsed().as_secs_f64();
    let pass = suite.violations.is_empty() && secs < 5.0;
    criterion(
        1,
        "filter properties on random sequences",
        pass,
        &format!(
            "1000 sequences, {} checks, {} violations in {secs:.2} s (limit 5 s)",
            suite.checks,
            suite.violations.len()
        ),
    );
}

#[test]
fn criterion_2_closed_form_agreement() {
    let t0 = Instant::now();
    let suite = oracle_suite(120, 4096, 1e-8);
    let secs = t0.elapsed().as_secs_f64();
    let pass = suite.violations.is_empty() && secs < 30.0;
    criterion(
        2,
        "stepped iteration matches the closed spectral form",
        pass,
        &format!(
            "120 random instances, {} violations in {secs:.2} s (limit 30 s)",
            suite.violations.len()
        ),
    );
}

#[test]
fn criterion_3_operator_calibration() {
    use std::f64::consts::PI;

    // Sampled sine modes are eigenvectors of the integral operator.
    let m = 200;
    let a = hilreg::problems::galerkin_deriv2(m).unwrap();
    let h = 1.0 / m as f64;
    let mut worst = 0.0f64;
    for k in 1..=10 {
        let x: Vec<f64> = (0..m)
            .map(|j| (k as f64 * PI * (j as f64 + 0.5) * h).sin())
            .collect();
        let lambda = (k as f64 * PI).powi(-2);
        let ax = a.matvec(&x);
        let num: f64 = ax
            .iter()
            .zip(&x)
            .map(|(av, xv)| (av - lambda * xv).powi(2))
            .sum::<f64>()
            .sqrt();
        let den: f64 = x.iter().map(|v| (lambda * v).powi(2)).sum::<f64>().sqrt();
        worst = worst.max(num / den);
    }

    // Low-mode link ratio between the operator and the inverse penalty.
    let m = 400;
    let a = hilreg::problems::galerkin_deriv2(m).unwrap();
    let scale = build_scale_operator(m).unwrap();
    let mut state = 0x1234_5678u64;
    let mut coeff = vec![0.0; m];
    for c in coeff.iter_mut().take(m / 4) {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        *c = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
    }
    let x = scale.eigen().vectors.matvec(&coeff);
    let num: f64 = a.matvec(&x).iter().map(|v| v * v).sum::<f64>().sqrt();
    let den = scale.norm(-2.0, &x).unwrap() / (PI * PI);
    let ratio = num / den;

    let pass = worst <= 2e-2 && (0.97..=1.03).contains(&ratio);
    criterion(
        3,
        "operator calibration against sine modes",
        pass,
        &format!(
            "worst mode residual {worst:.3e} (limit 2e-2), link ratio {ratio:.4} (band [0.97, 1.03])"
        ),
    );
}

/// Expected per-cell medians for the benchmark sweep: stopping index and
/// reconstruction error under both start rules, plus the noise level.
fn expected_cells(variant: Variant) -> (f64, [(Method, StartRule, usize, f64); 6]) {
    use Method::*;
    use StartRule::*;
    match variant {
        Variant::Sine => (
            1.79e-4,
            [
                (TiDp, Bound, 3, 3.79e-3),
                (IimA1, Bound, 2, 2.94e-3),
                (IimGs, Bound, 2, 2.95e-3),
                (TiDp, One, 4, 3.79e-3),
                (IimA1, One, 3, 2.94e-3),
                (IimGs, One, 17, 2.83e-3),
            ],
        ),
        Variant::Bump => (
            7.39e-4,
            [
                (TiDp, Bound, 3, 1.62e-2),
                (IimA1, Bound, 2, 1.70e-2),
                (IimGs, Bound, 2, 1.70e-2),
                (TiDp, One, 4, 1.62e-2),
                (IimA1, One, 3, 1.70e-2),
                (IimGs, One, 12, 2.46e-2),
            ],
        ),
        Variant::Ramp => (
            4.60e-4,
            [
                (TiDp, Bound, 6, 1.51e-1),
                (IimA1, Bound, 5, 1.51e-1),
                (IimGs, Bound, 9, 1.62e-1),
                (TiDp, One, 7, 1.51e-1),
                (IimA1, One, 6, 1.51e-1),
                (IimGs, One, 22, 1.65e-1),
            ],
        ),
    }
}

#[test]
fn criterion_4_benchmark_table_reproduction() {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    for data in SWEEPS.iter() {
        let (delta_exp, cells_exp) = expected_cells(data.variant);
        let delta = data.sweep.delta;
        if ((delta - delta_exp) / delta_exp).abs() > 0.01 {
            failures.push(format!(
                "variant {}: delta {delta:.4e} differs from {delta_exp:.4e}",
                data.variant
            ));
        }
        for row in &data.sweep.rows {
            match &row.report {
                Ok(rep) if rep.status == RunStatus::Converged => {
                    if rep.d_n > 1.1 * delta * (1.0 + 1e-12) {
                        failures.push(format!(
                            "variant {} {} {} seed {}: d_n = {:.4e} above 1.1 delta",
                            data.variant, row.method, row.start, row.seed, rep.d_n
                        ));
                    }
                }
                _ => failures.push(format!(
                    "variant {} {} {} seed {}: run did not converge",
                    data.variant, row.method, row.start, row.seed
                )),
            }
        }
        let cells = summarize(&data.sweep);
        for (method, start, n_exp, e_exp) in cells_exp {
            let cell = cells
                .iter()
                .find(|c| c.method == method && c.start == start)
                .expect("cell present");
            match (cell.n, cell.e_n) {
                (Some(n), Some(e)) => {
                    if n.abs_diff(n_exp) > 1 {
                        failures.push(format!(
                            "variant {} {method} {start}: median n = {n}, expected {n_exp} +- 1",
                            data.variant
                        ));
                    }
                    let ratio = e / e_exp;
                    if !(0.5..=2.0).contains(&ratio) {
                        failures.push(format!(
                            "variant {} {method} {start}: median e = {e:.4e}, expected within 2x of {e_exp:.4e}",
                            data.variant
                        ));
                    }
                }
                _ => failures.push(format!(
                    "variant {} {method} {start}: no converged runs to summarize",
                    data.variant
                )),
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let pass = failures.is_empty() && secs < 600.0;
    criterion(
        4,
        "benchmark table reproduction",
        pass,
        &format!(
            "180 runs over 3 variants, 36 cell medians checked in {secs:.1} s (limit 600 s){}{}",
            if failures.is_empty() { "" } else { "; " },
            failures.join("; ")
        ),
    );
}

/// Secant slope of `log e` against `log delta` for each adjacent level pair,
/// in ladder order (largest noise first).
fn local_slopes(levels: &[(f64, f64)]) -> Vec<f64> {
    levels
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
        .collect()
}

#[test]
fn criterion_5_noise_ladder_slopes() {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let mut studies = Vec::new();
    for &variant in &Variant::ALL {
        let cfg = RateStudyConfig {
            variant,
            ..RateStudyConfig::default()
        };
        match run_rates(&cfg) {
            Ok(study) => {
                if let Some(reason) = &study.aborted {
                    failures.push(format!("variant {variant}: {reason}"));
                }
                for level in &study.levels {
                    if level.failed > 0 {
                        failures.push(format!(
                            "variant {variant} sigma {:e}: {} runs failed",
                            level.sigma, level.failed
                        ));
                    }
                }
                studies.push((variant, study));
            }
            Err(e) => failures.push(format!("variant {variant}: {e}")),
        }
    }
    let secs = t0.elapsed().as_secs_f64();

    let slope_of = |v: Variant| -> f64 {
        studies
            .iter()
            .find(|(variant, _)| *variant == v)
            .and_then(|(_, s)| s.fits.first())
            .map_or(f64::NAN, |f| f.slope)
    };
    let levels_of = |v: Variant| -> Vec<(f64, f64)> {
        studies
            .iter()
            .find(|(variant, _)| *variant == v)
            .map_or_else(Vec::new, |(_, s)| {
                s.levels
                    .iter()
                    .filter_map(|l| l.median_e.map(|e| (l.delta, e)))
                    .collect()
            })
    };
    let (s1, s2, s3) = (
        slope_of(Variant::Sine),
        slope_of(Variant::Bump),
        slope_of(Variant::Ramp),
    );
    if !(0.4..=0.7).contains(&s2) {
        failures.push(format!("variant ii slope {s2:.3} outside [0.4, 0.7]"));
    }
    if !(0.1..=0.35).contains(&s3) {
        failures.push(format!("variant iii slope {s3:.3} outside [0.1, 0.35]"));
    }

    // The smoothest solution starts far more accurate than the others and
    // saturates: its error sits on the resolution floor of the discrete
    // model well before the smallest noise level, so the ladder curve
    // flattens instead of following a power law.
    let sine = levels_of(Variant::Sine);
    let bump = levels_of(Variant::Bump);
    let locs = local_slopes(&sine);
    match (locs.first(), locs.last()) {
        (Some(&top), Some(&bottom)) if locs.len() >= 2 => {
            if !(top > 1.5 * bottom) {
                failures.push(format!(
                    "variant i ladder does not flatten: local slopes {top:.3} -> {bottom:.3}"
                ));
            }
        }
        _ => failures.push("variant i ladder has too few usable levels".to_string()),
    }
    match (sine.first(), bump.first()) {
        (Some(&(_, e_sine)), Some(&(_, e_bump))) => {
            if !(3.0 * e_sine <= e_bump) {
                failures.push(format!(
                    "variant i top-level error {e_sine:.3e} not well below variant ii {e_bump:.3e}"
                ));
            }
        }
        _ => failures.push("missing top-level medians".to_string()),
    }

    let pass = failures.is_empty() && secs < 1200.0;
    let flat = if locs.len() >= 2 {
        format!("{:.2} -> {:.2}", locs[0], locs[locs.len() - 1])
    } else {
        "n/a".to_string()
    };
    criterion(
        5,
        "noise ladder convergence slopes",
        pass,
        &format!(
            "ii = {s2:.3} (theory 0.556, band [0.4, 0.7]), iii = {s3:.3} (theory 0.2, band [0.1, 0.35]), \
             i = {s1:.3} with local slope {flat} (saturation at the resolution floor) in {secs:.1} s{}{}",
            if failures.is_empty() { "" } else { "; " },
            failures.join("; ")
        ),
    );
}

#[test]
fn criterion_6_error_monotone_above_noise_level() {
    let mut checked = 0usize;
    let mut violations = Vec::new();
    let mut search_upticks = 0usize;
    for data in SWEEPS.iter() {
        let e_s_start = data.scale.norm(1.0, &data.problem.x_true).unwrap();
        for row in &data.sweep.rows {
            if let Ok(rep) = &row.report {
                checked += 1;
                if let Some(v) = check_error_monotone(rep, e_s_start, data.sweep.delta) {
                    violations.push(format!("variant {} seed {}: {v}", data.variant, row.seed));
                }
                // Informational: consecutive rows of a parameter search are
                // independent single-step solves, so they carry no pairwise
                // ordering; count how often they move up anyway.
                if row.method == Method::TiDp {
                    for pair in rep.trace.windows(2) {
                        if let (Some(a), Some(b)) = (pair[0].e_s, pair[1].e_s) {
                            if pair[1].d >= data.sweep.delta && b >= a {
                                search_upticks += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    let pass = violations.is_empty() && checked == 180;
    criterion(
        6,
        "graded error decreases while the discrepancy is above the noise level",
        pass,
        &format!(
            "{checked} recorded runs, {} violations (implicit steps pairwise, search rows \
             against the start; {search_upticks} search rows moved up against their \
             predecessor near stopping, where single-step solves are unordered){}{}",
            violations.len(),
            if violations.is_empty() { "" } else { "; " },
            violations.join("; ")
        ),
    );
}

#[test]
fn criterion_7_parameter_rule_structure() {
    let mut checked = 0usize;
    let mut violations = Vec::new();
    for data in SWEEPS.iter() {
        let itcfg = IterationConfig::default();
        let runner = Runner::new(&data.problem.a, &data.scale, &itcfg).unwrap();
        let seeds: Vec<u64> = (1..=10).collect();
        for &seed in &seeds {
            let noisy = add_noise(&data.problem.y, 0.01, seed).unwrap();
            let bound = alpha_upper_bound(&runner, &noisy, itcfg.c).unwrap();
            for start in StartRule::ALL {
                let find = |method: Method| {
                    data.sweep
                        .rows
                        .iter()
                        .find(|r| r.method == method && r.start == start && r.seed == seed)
                        .and_then(|r| r.report.as_ref().ok())
                };
                let mut push = |v: Option<hilreg_cli::verify::Violation>| {
                    checked += 1;
                    if let Some(v) = v {
                        violations.push(format!("variant {} seed {seed} {start}: {v}", data.variant));
                    }
                };
                let ti = find(Method::TiDp);
                let a1 = find(Method::IimA1);
                if let Some(rep) = ti {
                    push(check_alpha_strictly_decreasing(rep));
                    push(check_alpha_within_bound(rep, bound));
                }
                if let Some(rep) = a1 {
                    push(check_alpha_strictly_decreasing(rep));
                }
                if let (Some(a1), Some(ti)) = (a1, ti) {
                    push(check_step_pairing(a1, ti));
                }
            }
        }
    }
    let pass = violations.is_empty() && checked == 240;
    criterion(
        7,
        "parameter sequence structure and step pairing",
        pass,
        &format!(
            "{checked} structural checks, {} violations{}{}",
            violations.len(),
            if violations.is_empty() { "" } else { "; " },
            violations.join("; ")
        ),
    );
}

#[test]
fn criterion_8_deterministic_table_output() {
    let bin = env!("CARGO_BIN_EXE_hilreg");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let out = Command::new(bin)
            .args([
                "tables", "--variant", "ii", "--m", "80", "--sigma", "0.01", "--seed", "1,2,3",
                "--out",
            ])
            .arg(dir.path())
            .output()
            .expect("spawn benchmark binary");
        assert!(
            out.status.success(),
            "tables run failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let mut same = true;
    let mut sizes = Vec::new();
    for file in ["tables_ii.csv", "tables_ii.md"] {
        let a = std::fs::read(dirs[0].path().join(file)).unwrap();
        let b = std::fs::read(dirs[1].path().join(file)).unwrap();
        same &= a == b;
        sizes.push(format!("{file} {} bytes", a.len()));
    }
    criterion(
        8,
        "repeated table runs are byte-identical",
        same,
        &format!("two invocations compared: {}", sizes.join(", ")),
    );
}
