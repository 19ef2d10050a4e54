//! The implicit iteration and its geometric-sequence driver.
//!
//! One step of the iteration solves
//!
//! ```text
//! (A^T A + alpha_k B^{2s}) x_k = A^T y_delta + alpha_k B^{2s} x_{k-1}
//! ```
//!
//! equivalently `x_k = x_{k-1} + (A^T A + alpha_k B^{2s})^{-1} A^T (y_delta -
//! A x_{k-1})`. The penalty power `2s` trades smoothness for conditioning:
//! with `s = 1` the system matrix stays comfortably conditioned even for
//! alphas around 1e-7, which is why plain Cholesky is enough here.
//!
//! [`Runner`] owns the parts shared by every step (`A^T A`, `B^{2s}`, the
//! start vector) and re-factors `A^T A + alpha B^{2s}` once per step.
//! [`Runner::run_geometric`] drives the step over `alpha_k = q^{k-1} alpha_1`
//! and stops at the first iterate whose residual drops to `C * delta`, the
//! usual discrepancy rule. Error norms against a known solution are recorded
//! per step when the caller supplies one, in both the plain and the graded
//! `s`-norm; the latter is the norm in which the error is provably monotone
//! while the residual stays above `delta`.

use crate::error::{Error, Result};
use crate::filters::AlphaSequence;
use crate::linalg::{spd_factor, DenseMatrix, SpdFactorization};
use crate::problems::NoisyData;
use crate::scale::ScaleOperator;

/// Method tags as they appear in CLI arguments and output files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Tikhonov regularization with a Newton search for the discrepancy
    /// parameter.
    TiDp,
    /// Implicit iteration with Newton-chosen step parameters.
    IimA1,
    /// Implicit iteration over a fixed geometric alpha sequence.
    IimGs,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::TiDp, Method::IimA1, Method::IimGs];

    pub fn tag(self) -> &'static str {
        match self {
            Method::TiDp => "TI/DP",
            Method::IimA1 => "IIM/A1",
            Method::IimGs => "IIM/GS",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Method> {
        match tag {
            "TI/DP" => Some(Method::TiDp),
            "IIM/A1" => Some(Method::IimA1),
            "IIM/GS" => Some(Method::IimGs),
            _ => None,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    /// The start vector already met the discrepancy target; no step taken.
    AlreadyFeasible,
    /// `delta = 0`: the discrepancy rule cannot terminate, so nothing ran.
    DegenerateNoiseless,
}

impl RunStatus {
    pub fn tag(self) -> &'static str {
        match self {
            RunStatus::Converged => "ok",
            RunStatus::AlreadyFeasible => "already-feasible",
            RunStatus::DegenerateNoiseless => "degenerate",
        }
    }
}

/// One recorded iteration: the parameter used, the discrepancy reached, and
/// (when the true solution is known) the error in the plain and graded norms.
#[derive(Clone, Debug)]
pub struct TraceRow {
    pub k: usize,
    pub alpha: f64,
    pub d: f64,
    pub e: Option<f64>,
    pub e_s: Option<f64>,
}

/// Outcome of one complete run of any of the three methods.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub method: Method,
    pub status: RunStatus,
    /// Number of steps taken (Newton steps for `TI/DP`).
    pub n: usize,
    /// Final regularization parameter; NaN when no step was taken.
    pub alpha_n: f64,
    /// `sum_k 1/alpha_k` for the iterative methods, `1/alpha_n` for `TI/DP`.
    pub sigma_n: f64,
    /// Final discrepancy `|A x_n - y_delta|_2`.
    pub d_n: f64,
    /// Final error `|x_n - x_true|_2`, when the truth was supplied.
    pub e_n: Option<f64>,
    /// Final iterate.
    pub x: Vec<f64>,
    pub trace: Vec<TraceRow>,
    /// `IIM/GS` only: whether `1/alpha_n <= (1/q) sigma_{n-1}` held at the
    /// stopping index (vacuously true for `n <= 1`).
    pub geometric_tail_ok: Option<bool>,
    /// `IIM/A1` only: measured `(1/alpha_n) / sigma_{n-1}`; infinite tails
    /// would indicate a runaway Newton step.
    pub tail_ratio: Option<f64>,
    /// `IIM/A1` only: discrepancy of the alternative iterate with the last
    /// two step parameters exchanged, recorded for diagnosis.
    pub swapped_tail_d: Option<f64>,
}

/// Shared settings for all three methods.
#[derive(Clone, Debug)]
pub struct IterationConfig {
    /// Smoothness index of the penalty norm `|B^s x|_2`.
    pub s: f64,
    /// Start vector; `None` means zero.
    pub x0: Option<Vec<f64>>,
    /// Discrepancy constant: stop once `d <= c * delta`.
    pub c: f64,
    pub max_iter: usize,
}

impl Default for IterationConfig {
    fn default() -> Self {
        IterationConfig {
            s: 1.0,
            x0: None,
            c: 1.1,
            max_iter: 100,
        }
    }
}

/// Mutable state of a run: after `k` steps, `x` is the current iterate, `seq`
/// the parameters consumed so far, and `d` the discrepancy of `x`.
#[derive(Clone, Debug)]
pub struct IterationState {
    pub k: usize,
    pub x: Vec<f64>,
    pub seq: AlphaSequence,
    pub d: f64,
    pub trace: Vec<TraceRow>,
}

/// `|A x - y_delta|_2`.
pub fn discrepancy(a: &DenseMatrix, x: &[f64], y_delta: &[f64]) -> f64 {
    let ax = a.matvec(x);
    ax.iter()
        .zip(y_delta)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}

/// `|B^r (x - x_ref)|_2`.
pub fn error_norm(scale: &ScaleOperator, r: f64, x: &[f64], x_ref: &[f64]) -> Result<f64> {
    if x.len() != x_ref.len() {
        return Err(Error::DimensionMismatch {
            expected: x_ref.len(),
            got: x.len(),
        });
    }
    let diff: Vec<f64> = x.iter().zip(x_ref).map(|(a, b)| a - b).collect();
    scale.norm(r, &diff)
}

/// One-shot implicit step; forms `A^T A` on every call. Loops should go
/// through [`Runner`], which precomputes both matrices once.
pub fn implicit_step(
    a: &DenseMatrix,
    b2s: &DenseMatrix,
    alpha: f64,
    x_prev: &[f64],
    y_delta: &[f64],
) -> Result<Vec<f64>> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::param(
            "alpha",
            format!("must be positive and finite, got {alpha}"),
        ));
    }
    let ata = a.gram();
    step_inner(a, &ata, b2s, alpha, x_prev, y_delta).map(|(x, _)| x)
}

fn step_inner(
    a: &DenseMatrix,
    ata: &DenseMatrix,
    b2s: &DenseMatrix,
    alpha: f64,
    x_prev: &[f64],
    y_delta: &[f64],
) -> Result<(Vec<f64>, SpdFactorization)> {
    let mut system = DenseMatrix::zeros(ata.rows(), ata.cols());
    ata.add_scaled_into(b2s, alpha, &mut system);
    let factor = spd_factor(&system)?;
    let ax = a.matvec(x_prev);
    let residual: Vec<f64> = y_delta.iter().zip(&ax).map(|(y, v)| y - v).collect();
    let rhs = a.tr_matvec(&residual);
    let dx = factor.solve(&rhs)?;
    let x_new = x_prev.iter().zip(&dx).map(|(x, d)| x + d).collect();
    Ok((x_new, factor))
}

/// Precomputed context for repeated implicit steps on one problem.
pub struct Runner<'a> {
    a: &'a DenseMatrix,
    scale: &'a ScaleOperator,
    cfg: IterationConfig,
    ata: DenseMatrix,
    b2s: DenseMatrix,
    x0: Vec<f64>,
}

impl<'a> Runner<'a> {
    pub fn new(
        a: &'a DenseMatrix,
        scale: &'a ScaleOperator,
        cfg: &IterationConfig,
    ) -> Result<Runner<'a>> {
        let m = scale.m();
        if a.rows() != m || a.cols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: if a.rows() != m { a.rows() } else { a.cols() },
            });
        }
        if !(cfg.c >= 1.0) {
            return Err(Error::param(
                "c",
                format!("discrepancy constant must be >= 1, got {}", cfg.c),
            ));
        }
        if !cfg.s.is_finite() || cfg.s < 0.0 {
            return Err(Error::param(
                "s",
                format!("smoothness index must be non-negative, got {}", cfg.s),
            ));
        }
        if cfg.max_iter == 0 {
            return Err(Error::param("max_iter", "must be at least 1"));
        }
        let x0 = match &cfg.x0 {
            Some(v) => {
                if v.len() != m {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        got: v.len(),
                    });
                }
                v.clone()
            }
            None => vec![0.0; m],
        };
        Ok(Runner {
            a,
            scale,
            cfg: cfg.clone(),
            ata: a.gram(),
            b2s: scale.power_matrix(2.0 * cfg.s),
            x0,
        })
    }

    pub fn config(&self) -> &IterationConfig {
        &self.cfg
    }

    pub fn matrix(&self) -> &DenseMatrix {
        self.a
    }

    pub fn scale(&self) -> &ScaleOperator {
        self.scale
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn b2s(&self) -> &DenseMatrix {
        &self.b2s
    }

    /// One implicit step from `x` with parameter `alpha`.
    pub fn step(&self, alpha: f64, x: &[f64], y_delta: &[f64]) -> Result<Vec<f64>> {
        self.step_with_factor(alpha, x, y_delta).map(|(x, _)| x)
    }

    /// Same as [`Runner::step`] but hands back the Cholesky factor of
    /// `A^T A + alpha B^{2s}` for callers that need extra solves with the
    /// same matrix (the Newton direction does).
    pub fn step_with_factor(
        &self,
        alpha: f64,
        x: &[f64],
        y_delta: &[f64],
    ) -> Result<(Vec<f64>, SpdFactorization)> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::param(
                "alpha",
                format!("must be positive and finite, got {alpha}"),
            ));
        }
        step_inner(self.a, &self.ata, &self.b2s, alpha, x, y_delta)
    }

    pub(crate) fn check_data(&self, noisy: &NoisyData) -> Result<()> {
        if noisy.y_delta.len() != self.scale.m() {
            return Err(Error::DimensionMismatch {
                expected: self.scale.m(),
                got: noisy.y_delta.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn trace_row(
        &self,
        k: usize,
        alpha: f64,
        d: f64,
        x: &[f64],
        x_true: Option<&[f64]>,
    ) -> TraceRow {
        let (e, e_s) = match x_true {
            Some(t) => (
                Some(error_norm(self.scale, 0.0, x, t).expect("length checked")),
                Some(error_norm(self.scale, self.cfg.s, x, t).expect("length checked")),
            ),
            None => (None, None),
        };
        TraceRow { k, alpha, d, e, e_s }
    }

    /// Report for a run that never stepped (start already feasible, or no
    /// noise to measure against).
    pub(crate) fn null_report(
        &self,
        method: Method,
        status: RunStatus,
        d0: f64,
        x_true: Option<&[f64]>,
    ) -> RunReport {
        let e_n = x_true.map(|t| error_norm(self.scale, 0.0, &self.x0, t).expect("length checked"));
        RunReport {
            method,
            status,
            n: 0,
            alpha_n: f64::NAN,
            sigma_n: 0.0,
            d_n: d0,
            e_n,
            x: self.x0.clone(),
            trace: Vec::new(),
            geometric_tail_ok: None,
            tail_ratio: None,
            swapped_tail_d: None,
        }
    }

    /// Runs the iteration over the geometric sequence `alpha_k = q^{k-1}
    /// alpha1` until the discrepancy drops to `C * delta`.
    ///
    /// For `n >= 2` the report notes whether the final parameter satisfied
    /// `1/alpha_n <= (1/q) sigma_{n-1}`, the growth condition under which the
    /// discrepancy stop is order-optimal for geometric sequences.
    pub fn run_geometric(
        &self,
        noisy: &NoisyData,
        x_true: Option<&[f64]>,
        alpha1: f64,
        q: f64,
    ) -> Result<RunReport> {
        self.check_data(noisy)?;
        if !alpha1.is_finite() || alpha1 <= 0.0 {
            return Err(Error::param(
                "alpha1",
                format!("must be positive and finite, got {alpha1}"),
            ));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::param("q", format!("must be in (0, 1), got {q}")));
        }
        let y = &noisy.y_delta;
        let target = self.cfg.c * noisy.delta;
        let d0 = discrepancy(self.a, &self.x0, y);
        if noisy.delta == 0.0 {
            return Ok(self.null_report(Method::IimGs, RunStatus::DegenerateNoiseless, d0, x_true));
        }
        if d0 <= target {
            return Ok(self.null_report(Method::IimGs, RunStatus::AlreadyFeasible, d0, x_true));
        }

        let mut state = IterationState {
            k: 0,
            x: self.x0.clone(),
            seq: AlphaSequence::empty(),
            d: d0,
            trace: Vec::new(),
        };
        let mut alpha = alpha1;
        while state.k < self.cfg.max_iter {
            if alpha == 0.0 {
                return Err(Error::param("alpha", "geometric sequence underflowed to 0"));
            }
            let x_new = self.step(alpha, &state.x, y)?;
            let d = discrepancy(self.a, &x_new, y);
            state.k += 1;
            state.seq.push(alpha)?;
            state.x = x_new;
            state.d = d;
            state
                .trace
                .push(self.trace_row(state.k, alpha, d, &state.x, x_true));

            if d <= target {
                let n = state.k;
                let sigma_prev = state.seq.sigma() - 1.0 / alpha;
                // At n = 2 the growth bound holds with equality in exact
                // arithmetic, so leave room for rounding in the reciprocals.
                let tail_ok = n <= 1 || 1.0 / alpha <= (sigma_prev / q) * (1.0 + 1e-12);
                let last = state.trace.last().expect("nonempty");
                return Ok(RunReport {
                    method: Method::IimGs,
                    status: RunStatus::Converged,
                    n,
                    alpha_n: alpha,
                    sigma_n: state.seq.sigma(),
                    d_n: d,
                    e_n: last.e,
                    x: state.x,
                    trace: state.trace,
                    geometric_tail_ok: Some(tail_ok),
                    tail_ratio: None,
                    swapped_tail_d: None,
                });
            }
            alpha *= q;
        }
        Err(Error::NonTermination {
            max_iter: self.cfg.max_iter,
            last_d: state.d,
            trace: state.trace,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{oracle_solution, AlphaSequence};
    use crate::linalg::{norm2, svd};
    use crate::problems::{add_noise, galerkin_deriv2, TestProblem, Variant};
    use crate::scale::build_scale_operator;

    fn setup(m: usize) -> (DenseMatrix, ScaleOperator) {
        (galerkin_deriv2(m).unwrap(), build_scale_operator(m).unwrap())
    }

    #[test]
    fn consistent_data_leaves_iterate_fixed() {
        let (a, scale) = setup(12);
        let cfg = IterationConfig::default();
        let runner = Runner::new(&a, &scale, &cfg).unwrap();
        let x: Vec<f64> = (0..12).map(|i| (i as f64 * 0.7).sin()).collect();
        let y = a.matvec(&x);
        let x1 = runner.step(1.0, &x, &y).unwrap();
        let diff: f64 = x1.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        assert!(diff <= 1e-12 * norm2(&x));
    }

    #[test]
    fn huge_alpha_freezes_the_iterate() {
        let (a, scale) = setup(10);
        let cfg = IterationConfig::default();
        let runner = Runner::new(&a, &scale, &cfg).unwrap();
        let x: Vec<f64> = (0..10).map(|i| 1.0 + i as f64).collect();
        let y: Vec<f64> = (0..10).map(|i| (i as f64).cos()).collect();
        let alpha = 1e16 * runner.ata.max_abs();
        let x1 = runner.step(alpha, &x, &y).unwrap();
        let rel: f64 = x1
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
            / norm2(&x);
        assert!(rel <= 1e-8, "relative movement {rel:e}");
    }

    #[test]
    fn iterates_match_filter_oracle() {
        // The same alpha sequence, walked step by step and evaluated in the
        // SVD closed form, must produce the same vector.
        let m = 30;
        let p = TestProblem::build(Variant::Bump, m).unwrap();
        let scale = build_scale_operator(m).unwrap();
        for s in [0.0, 0.5, 1.0, 2.0] {
            let cfg = IterationConfig {
                s,
                ..IterationConfig::default()
            };
            let runner = Runner::new(&p.a, &scale, &cfg).unwrap();
            let noisy = add_noise(&p.y, 0.01, 1).unwrap();
            let seq = AlphaSequence::geometric(1e-3, 0.5, 5).unwrap();
            let mut x = vec![0.0; m];
            for &alpha in seq.alphas() {
                x = runner.step(alpha, &x, &noisy.y_delta).unwrap();
            }
            let oracle = oracle_solution(&p.a, &scale, s, &seq, &vec![0.0; m], &noisy.y_delta)
                .unwrap();
            let diff: f64 = x
                .iter()
                .zip(&oracle)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(
                diff <= 1e-8 * norm2(&oracle).max(1e-300),
                "s={s}: deviation {diff:e}"
            );
        }
    }

    #[test]
    fn residual_has_product_form() {
        // After n steps the data residual is the filter factor r_n applied to
        // the initial residual in the spectral calculus of T T^T.
        let m = 20;
        let p = TestProblem::build(Variant::Sine, m).unwrap();
        let scale = build_scale_operator(m).unwrap();
        let cfg = IterationConfig::default();
        let runner = Runner::new(&p.a, &scale, &cfg).unwrap();
        let noisy = add_noise(&p.y, 0.05, 9).unwrap();
        let seq = AlphaSequence::geometric(1e-2, 0.5, 4).unwrap();
        let mut x = vec![0.0; m];
        for &alpha in seq.alphas() {
            x = runner.step(alpha, &x, &noisy.y_delta).unwrap();
        }
        let measured = discrepancy(&p.a, &x, &noisy.y_delta);

        let t = p.a.matmul(&scale.power_matrix(-cfg.s));
        let dec = svd(&t).unwrap();
        let mut predicted_sq = 0.0;
        for i in 0..m {
            let ui: Vec<f64> = (0..m).map(|r| dec.u.get(r, i)).collect();
            let c = crate::linalg::dot(&ui, &noisy.y_delta);
            let rf = seq.eval_r(dec.sigma[i] * dec.sigma[i]);
            predicted_sq += (rf * c) * (rf * c);
        }
        let predicted = predicted_sq.sqrt();
        assert!(
            (measured - predicted).abs() <= 1e-8 * predicted,
            "measured {measured:e} vs predicted {predicted:e}"
        );
    }

    #[test]
    fn geometric_run_stops_at_discrepancy_target() {
        let m = 60;
        let p = TestProblem::build(Variant::Bump, m).unwrap();
        let scale = build_scale_operator(m).unwrap();
        let cfg = IterationConfig::default();
        let runner = Runner::new(&p.a, &scale, &cfg).unwrap();
        for seed in [1, 2, 3] {
            let noisy = add_noise(&p.y, 0.01, seed).unwrap();
            let rep = runner
                .run_geometric(&noisy, Some(&p.x_true), 1.0, 0.5)
                .unwrap();
            assert_eq!(rep.status, RunStatus::Converged);
            assert!(rep.d_n <= cfg.c * noisy.delta);
            assert!(rep.n >= 1);
            // Every earlier iterate must still have been infeasible.
            for row in &rep.trace[..rep.n - 1] {
                assert!(row.d > cfg.c * noisy.delta);
            }
            // Discrepancies decrease monotonically along the run.
            for w in rep.trace.windows(2) {
                assert!(w[1].d < w[0].d);
            }
            // Graded-norm error decreases while the residual is above delta.
            let e0 = error_norm(&scale, cfg.s, &vec![0.0; m], &p.x_true).unwrap();
            let mut prev = e0;
            for row in &rep.trace {
                if row.d >= noisy.delta {
                    let e_s = row.e_s.unwrap();
                    assert!(e_s < prev, "step {}: {e_s} !< {prev}", row.k);
                    prev = e_s;
                }
            }
            assert_eq!(rep.geometric_tail_ok, Some(true));
        }
    }

    #[test]
    fn already_feasible_start_returns_zero_steps() {
        let m = 25;
        let p = TestProblem::build(Variant::Ramp, m).unwrap();
        let scale = build_scale_operator(m).unwrap();
        // Huge sigma makes C*delta exceed |y_delta| so x0 = 0 is feasible:
        // |y_delta| <= (1 + sigma)|y| while C*delta = 1.1 sigma |y|.
        let noisy = add_noise(&p.y, 100.0, 4).unwrap();
        let cfg = IterationConfig::default();
        let runner = Runner::new(&p.a, &scale, &cfg).unwrap();
        let rep = runner
            .run_geometric(&noisy, Some(&p.x_true), 1.0, 0.5)
            .unwrap();
        assert_eq!(rep.status, RunStatus::AlreadyFeasible);
        assert_eq!(rep.n, 0);
        assert!(rep.alpha_n.is_nan());
        assert!(rep.trace.is_empty());
    }

    #[test]
    fn noiseless_data_is_degenerate() {
        let m = 25;
        let p = TestProblem::build(Variant::Sine, m).unwrap();
        let scale = build_scale_operator(m).unwrap();
        let noisy = add_noise(&p.y, 0.0, 0).unwrap();
        let cfg = IterationConfig::default();
        let runner = Runner::new(&p.a, &scale, &cfg).unwrap();
        let rep = runner.run_geometric(&noisy, None, 1.0, 0.5).unwrap();
        assert_eq!(rep.status, RunStatus::DegenerateNoiseless);
        assert_eq!(rep.n, 0);
    }

    #[test]
    fn non_termination_keeps_the_trace() {
        let m = 20;
        let p = TestProblem::build(Variant::Bump, m).unwrap();
        let scale = build_scale_operator(m).unwrap();
        let cfg = IterationConfig {
            max_iter: 3,
            ..IterationConfig::default()
        };
        let runner = Runner::new(&p.a, &scale, &cfg).unwrap();
        // Tiny noise with a tiny iteration budget cannot terminate.
        let noisy = add_noise(&p.y, 1e-6, 2).unwrap();
        match runner.run_geometric(&noisy, None, 1.0, 0.9) {
            Err(Error::NonTermination {
                max_iter, trace, ..
            }) => {
                assert_eq!(max_iter, 3);
                assert_eq!(trace.len(), 3);
            }
            other => panic!("expected NonTermination, got {other:?}"),
        }
    }

    #[test]
    fn state_discrepancy_matches_recomputation() {
        let m = 40;
        let p = TestProblem::build(Variant::Bump, m).unwrap();
        let scale = build_scale_operator(m).unwrap();
        let cfg = IterationConfig::default();
        let runner = Runner::new(&p.a, &scale, &cfg).unwrap();
        let noisy = add_noise(&p.y, 0.01, 8).unwrap();
        let rep = runner.run_geometric(&noisy, None, 1.0, 0.5).unwrap();
        let re_d = discrepancy(&p.a, &rep.x, &noisy.y_delta);
        assert!((re_d - rep.d_n).abs() <= 1e-12 * rep.d_n.max(1e-300));
        assert_eq!(rep.trace.len(), rep.n);
    }

    #[test]
    fn one_shot_step_agrees_with_runner() {
        let (a, scale) = setup(15);
        let cfg = IterationConfig::default();
        let runner = Runner::new(&a, &scale, &cfg).unwrap();
        let x: Vec<f64> = (0..15).map(|i| (i as f64 / 3.0).sin()).collect();
        let y: Vec<f64> = (0..15).map(|i| (i as f64 / 5.0).cos()).collect();
        let via_runner = runner.step(0.3, &x, &y).unwrap();
        let b2s = scale.power_matrix(2.0);
        let via_free = implicit_step(&a, &b2s, 0.3, &x, &y).unwrap();
        for (p, q) in via_runner.iter().zip(&via_free) {
            assert!((p - q).abs() <= 1e-13);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let (a, scale) = setup(6);
        let cfg = IterationConfig {
            c: 0.5,
            ..IterationConfig::default()
        };
        assert!(Runner::new(&a, &scale, &cfg).is_err());

        let cfg = IterationConfig::default();
        let runner = Runner::new(&a, &scale, &cfg).unwrap();
        let noisy = add_noise(&[1.0; 6], 0.1, 0).unwrap();
        assert!(runner.run_geometric(&noisy, None, -1.0, 0.5).is_err());
        assert!(runner.run_geometric(&noisy, None, 1.0, 1.5).is_err());
    }
}
