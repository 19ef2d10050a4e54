//! Parameter choice rules.
//!
//! Three ways to pick regularization parameters for one data set:
//!
//! - an a-priori rule converting smoothness information (an index function
//!   `rho`, a source bound `E`, a link constant) into a target value for the
//!   reciprocal cumulative parameter `1/sigma_n`;
//! - [`alpha_upper_bound`], the largest single-step parameter compatible with
//!   the discrepancy target, which doubles as a starting value;
//! - two Newton-driven searches for the discrepancy parameter: classical
//!   Tikhonov re-solved from a fixed start vector ([`newton_dp_tikhonov`],
//!   tag `TI/DP`), and the adaptive implicit iteration that promotes each
//!   Newton parameter to the next step's `alpha` ([`newton_dp_implicit`],
//!   tag `IIM/A1`).
//!
//! Both searches solve `1/d(1/r) = 1/delta` for the reciprocal parameter
//! `r = 1/alpha`. On that scale the residual map is increasing and concave,
//! so starting left of the root every Newton update grows `r` strictly and
//! never crosses to the far side. Termination is declared earlier, at
//! `d <= c * delta` with `c > 1`; that overshoot margin is what lets a
//! single Newton update per accepted iterate suffice.

use crate::error::{Error, Result};
use crate::filters::{log_grid, AlphaSequence};
use crate::iteration::{discrepancy, Method, RunReport, RunStatus, Runner, TraceRow};
use crate::linalg::{dot, norm2};
use crate::problems::NoisyData;

/// Strictly increasing map `t -> rho(t)` on `(0, t_max]` with `rho(0+) = 0`,
/// grading how fast the smooth part of the solution decays along the scale.
pub struct IndexFunction {
    form: Form,
}

enum Form {
    Power { a: f64 },
    Custom {
        rho: Box<dyn Fn(f64) -> f64 + Send + Sync>,
        t_max: f64,
    },
}

/// Grid used to vet custom index functions for strict increase.
const RHO_GRID_POINTS: usize = 240;
const RHO_GRID_SPAN: f64 = 1e-9;

impl IndexFunction {
    /// `rho(t) = t^a` with `a > 0`; unbounded domain, closed-form inverse.
    pub fn power(a: f64) -> Result<IndexFunction> {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::param(
                "a",
                format!("power exponent must be positive and finite, got {a}"),
            ));
        }
        Ok(IndexFunction {
            form: Form::Power { a },
        })
    }

    /// Wraps an arbitrary evaluator, vetting it on a logarithmic grid over
    /// `(t_max * 1e-9, t_max]`: values must be finite, positive, and strictly
    /// increasing. The limit `rho(0+) = 0` itself is not observable, so the
    /// proxy check is strict order between the two smallest sample points.
    pub fn custom(
        rho: impl Fn(f64) -> f64 + Send + Sync + 'static,
        t_max: f64,
    ) -> Result<IndexFunction> {
        if !t_max.is_finite() || t_max <= 0.0 {
            return Err(Error::param(
                "t_max",
                format!("domain end must be positive and finite, got {t_max}"),
            ));
        }
        let t_min = t_max * RHO_GRID_SPAN;
        let grid = log_grid(t_min, t_max, RHO_GRID_POINTS);
        let mut prev_t = grid[0];
        let mut prev = f64::NEG_INFINITY;
        for &t in &grid {
            let val = rho(t);
            if !val.is_finite() || val <= 0.0 {
                return Err(Error::param(
                    "rho",
                    format!("must be positive and finite on (0, t_max], got {val} at t = {t:e}"),
                ));
            }
            if val <= prev {
                return Err(Error::NotIncreasing { t: prev_t });
            }
            prev = val;
            prev_t = t;
        }
        if !(rho(t_min) < rho(2.0 * t_min)) {
            return Err(Error::NotIncreasing { t: t_min });
        }
        Ok(IndexFunction {
            form: Form::Custom {
                rho: Box::new(rho),
                t_max,
            },
        })
    }

    /// Upper end of the vetted domain; infinite for power forms.
    pub fn t_max(&self) -> f64 {
        match &self.form {
            Form::Power { .. } => f64::INFINITY,
            Form::Custom { t_max, .. } => *t_max,
        }
    }

    /// The exponent when the function is a pure power, else `None`.
    pub fn power_exponent(&self) -> Option<f64> {
        match &self.form {
            Form::Power { a } => Some(*a),
            Form::Custom { .. } => None,
        }
    }

    /// `rho(t)` with domain checks.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::param(
                "t",
                format!("argument must be positive and finite, got {t}"),
            ));
        }
        if t > self.t_max() {
            return Err(Error::OutOfRange {
                value: t,
                max: self.t_max(),
            });
        }
        Ok(match &self.form {
            Form::Power { a } => t.powf(*a),
            Form::Custom { rho, .. } => rho(t),
        })
    }
}

/// `psi_p(t) = t^p * rho(t)`, the map whose inverse drives the a-priori rule.
pub fn psi_p(rho: &IndexFunction, p: f64, t: f64) -> Result<f64> {
    if !p.is_finite() || p < 0.0 {
        return Err(Error::param(
            "p",
            format!("smoothness grade must be non-negative, got {p}"),
        ));
    }
    Ok(t.powf(p) * rho.eval(t)?)
}

/// The unique `t` with `psi_p(t) = v`. Power forms invert in closed form as
/// `v^{1/(p+a)}`; custom forms bisect in log-t space down to relative
/// tolerance 1e-12 in `t`.
pub fn psi_p_inverse(rho: &IndexFunction, p: f64, v: f64) -> Result<f64> {
    if !p.is_finite() || p < 0.0 {
        return Err(Error::param(
            "p",
            format!("smoothness grade must be non-negative, got {p}"),
        ));
    }
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::param(
            "v",
            format!("value to invert must be positive and finite, got {v}"),
        ));
    }
    match &rho.form {
        Form::Power { a } => Ok(v.powf(1.0 / (p + a))),
        Form::Custom { t_max, .. } => {
            let top = psi_p(rho, p, *t_max)?;
            if v > top {
                return Err(Error::OutOfRange { value: v, max: top });
            }
            // psi_p inherits strict increase from rho, so plain bisection on
            // ln t converges; the bracket spans about 280 decades below
            // t_max, far wider than any sensible noise-to-scale ratio.
            let mut hi = t_max.ln();
            let mut lo = hi - 645.0;
            if psi_p(rho, p, lo.exp())? > v {
                return Err(Error::param(
                    "v",
                    format!("value {v:e} lies below the bisection bracket"),
                ));
            }
            while hi - lo > 1e-13 {
                let mid = 0.5 * (hi + lo);
                if psi_p(rho, p, mid.exp())? > v {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok((0.5 * (hi + lo)).exp())
        }
    }
}

/// Inputs of the a-priori rule. The solution is assumed to satisfy
/// `|B^p (x_true - x0)| <= E`, and `m_link` is the lower constant of the
/// norm link between `|A x|` and the scale norms.
pub struct AprioriInputs {
    pub rho: IndexFunction,
    pub p: f64,
    pub e: f64,
    pub m_link: f64,
    pub s: f64,
    pub delta: f64,
}

/// Target value of the reciprocal cumulative parameter,
///
/// ```text
/// 1/sigma_n = (delta/E)^2 * [psi_p^{-1}(delta / (m_link E))]^{2(s-p)} .
/// ```
///
/// For the power form `rho(t) = t^a` this collapses to
/// `m_link^2 * (delta/(m_link E))^{2(s+a)/(a+p)}`; both branches produce the
/// same value on power inputs.
pub fn apriori_sigma_inv(inputs: &AprioriInputs) -> Result<f64> {
    for (name, val) in [
        ("p", inputs.p),
        ("E", inputs.e),
        ("m_link", inputs.m_link),
        ("delta", inputs.delta),
    ] {
        if !val.is_finite() || val <= 0.0 {
            return Err(Error::param(
                name,
                format!("must be positive and finite, got {val}"),
            ));
        }
    }
    if !inputs.s.is_finite() {
        return Err(Error::param(
            "s",
            format!("must be finite, got {}", inputs.s),
        ));
    }
    let v = inputs.delta / (inputs.m_link * inputs.e);
    match inputs.rho.power_exponent() {
        Some(a) => Ok(inputs.m_link.powi(2) * v.powf(2.0 * (inputs.s + a) / (a + inputs.p))),
        None => {
            let t = psi_p_inverse(&inputs.rho, inputs.p, v)?;
            Ok((inputs.delta / inputs.e).powi(2) * t.powf(2.0 * (inputs.s - inputs.p)))
        }
    }
}

/// State of a Newton search for the discrepancy parameter. The reciprocal
/// parameter `r = 1/alpha` increases strictly across steps; `x` and `d`
/// cache the iterate and residual norm of the most recent solve.
#[derive(Clone, Debug)]
pub struct NewtonDpState {
    pub r: f64,
    pub x: Vec<f64>,
    pub d: f64,
}

/// Largest regularization parameter whose single-step residual can reach the
/// target `c * delta`, computed from the start residual `w = y_delta - A x0`:
///
/// ```text
/// c delta |B^{-s} A^T w|^2 / ((|w| - c delta) |w|^2) .
/// ```
///
/// Every converged discrepancy parameter lies strictly below this value,
/// which also makes it the natural first guess for the Newton searches
/// (taken at `c = 1`).
pub fn alpha_upper_bound(runner: &Runner, noisy: &NoisyData, c: f64) -> Result<f64> {
    runner.check_data(noisy)?;
    if !c.is_finite() || c < 1.0 {
        return Err(Error::param(
            "c",
            format!("discrepancy constant must be >= 1, got {c}"),
        ));
    }
    if noisy.delta <= 0.0 {
        return Err(Error::param(
            "delta",
            format!("noise level must be positive, got {}", noisy.delta),
        ));
    }
    let a = runner.matrix();
    let ax0 = a.matvec(runner.x0());
    let w: Vec<f64> = noisy.y_delta.iter().zip(&ax0).map(|(y, v)| y - v).collect();
    let nw = norm2(&w);
    let threshold = c * noisy.delta;
    if nw <= threshold {
        return Err(Error::InfeasibleStart { d0: nw, threshold });
    }
    let aty = a.tr_matvec(&w);
    let smoothed = runner.scale().apply_power(-runner.config().s, &aty)?;
    let num = threshold * norm2(&smoothed).powi(2);
    let den = (nw - threshold) * nw * nw;
    Ok(num / den)
}

/// `B^{2s}(x - base)`, the penalty-space image both Newton updates project
/// onto.
fn penalty_image(runner: &Runner, x: &[f64], base: &[f64]) -> Vec<f64> {
    let diff: Vec<f64> = x.iter().zip(base).map(|(a, b)| a - b).collect();
    runner.b2s().matvec(&diff)
}

/// One Newton update for `r = 1/alpha` toward the residual target `delta`.
/// `inner = (v, B^{2s}(x - base))` with `v` solved from the current system
/// matrix; it is positive whenever the step moved, and its underflow or a
/// non-increasing update signal numerical breakdown rather than conditions
/// worth patching over.
fn newton_update(r: f64, d: f64, delta: f64, inner: f64) -> Result<f64> {
    if !(inner > 1e-300) {
        return Err(Error::NewtonDenominatorUnderflow { value: inner });
    }
    let rd = r * d;
    let r_new = r + (1.0 / delta - 1.0 / d) * rd * rd * rd / inner;
    if !r_new.is_finite() || r_new <= r {
        return Err(Error::NewtonNotIncreasing { r_old: r, r_new });
    }
    Ok(r_new)
}

/// Tikhonov regularization with a Newton search for the discrepancy
/// parameter (tag `TI/DP`). Every candidate re-solves the penalized system
/// from the same start vector; only `alpha` moves. Stops at the first
/// solve with `d <= c * delta`. Because the search approaches the target
/// from the large-`alpha` side, the accepted residual also stays above
/// `delta` up to rounding.
pub fn newton_dp_tikhonov(
    runner: &Runner,
    noisy: &NoisyData,
    x_true: Option<&[f64]>,
    alpha1: f64,
) -> Result<RunReport> {
    runner.check_data(noisy)?;
    if !alpha1.is_finite() || alpha1 <= 0.0 {
        return Err(Error::param(
            "alpha1",
            format!("must be positive and finite, got {alpha1}"),
        ));
    }
    let y = &noisy.y_delta;
    let cfg = runner.config();
    let target = cfg.c * noisy.delta;
    let d0 = discrepancy(runner.matrix(), runner.x0(), y);
    if noisy.delta == 0.0 {
        return Ok(runner.null_report(Method::TiDp, RunStatus::DegenerateNoiseless, d0, x_true));
    }
    if d0 <= target {
        return Ok(runner.null_report(Method::TiDp, RunStatus::AlreadyFeasible, d0, x_true));
    }

    let mut state = NewtonDpState {
        r: 1.0 / alpha1,
        x: runner.x0().to_vec(),
        d: d0,
    };
    let mut trace: Vec<TraceRow> = Vec::new();
    for k in 1..=cfg.max_iter {
        let alpha = 1.0 / state.r;
        let (x, factor) = runner.step_with_factor(alpha, runner.x0(), y)?;
        let d = discrepancy(runner.matrix(), &x, y);
        trace.push(runner.trace_row(k, alpha, d, &x, x_true));
        state.x = x;
        state.d = d;
        if d <= target {
            let last = trace.last().expect("nonempty");
            return Ok(RunReport {
                method: Method::TiDp,
                status: RunStatus::Converged,
                n: k,
                alpha_n: alpha,
                sigma_n: state.r,
                d_n: d,
                e_n: last.e,
                x: state.x,
                trace,
                geometric_tail_ok: None,
                tail_ratio: None,
                swapped_tail_d: None,
            });
        }
        let w_pen = penalty_image(runner, &state.x, runner.x0());
        let v = factor.solve(&w_pen)?;
        state.r = newton_update(state.r, d, noisy.delta, dot(&v, &w_pen))?;
    }
    Err(Error::NonTermination {
        max_iter: cfg.max_iter,
        last_d: state.d,
        trace,
    })
}

/// The implicit iteration with Newton-chosen step parameters (tag `IIM/A1`).
///
/// Each accepted iterate supplies one Newton update for `r = 1/alpha`, and
/// the updated parameter drives the next implicit step whose base is the
/// iterate just accepted. With `alpha1 = None` the run starts from
/// [`alpha_upper_bound`] at `c = 1`.
///
/// Runs stop at `d <= c * delta`. For `n >= 2` the report also records
/// `tail_ratio = (1/alpha_n) / sigma_{n-1}` and the residual of the
/// alternative final iterate with the last two parameters exchanged; that
/// exchanged residual staying above `delta` is what keeps the produced
/// parameter sequence admissible for the stopping analysis.
pub fn newton_dp_implicit(
    runner: &Runner,
    noisy: &NoisyData,
    x_true: Option<&[f64]>,
    alpha1: Option<f64>,
) -> Result<RunReport> {
    runner.check_data(noisy)?;
    if let Some(a1) = alpha1 {
        if !a1.is_finite() || a1 <= 0.0 {
            return Err(Error::param(
                "alpha1",
                format!("must be positive and finite, got {a1}"),
            ));
        }
    }
    let y = &noisy.y_delta;
    let cfg = runner.config();
    let target = cfg.c * noisy.delta;
    let d0 = discrepancy(runner.matrix(), runner.x0(), y);
    if noisy.delta == 0.0 {
        return Ok(runner.null_report(Method::IimA1, RunStatus::DegenerateNoiseless, d0, x_true));
    }
    if d0 <= target {
        return Ok(runner.null_report(Method::IimA1, RunStatus::AlreadyFeasible, d0, x_true));
    }

    let mut alpha = match alpha1 {
        Some(a1) => a1,
        None => alpha_upper_bound(runner, noisy, 1.0)?,
    };
    // `prev_base` is the vector the current iterate was stepped from;
    // `grand_base` is one generation older, kept for the exchanged-parameter
    // diagnostic at termination.
    let mut grand_base: Option<Vec<f64>> = None;
    let mut prev_base = runner.x0().to_vec();
    let (mut x, mut factor) = runner.step_with_factor(alpha, &prev_base, y)?;
    let mut d = discrepancy(runner.matrix(), &x, y);
    let mut seq = AlphaSequence::empty();
    seq.push(alpha)?;
    let mut trace = vec![runner.trace_row(1, alpha, d, &x, x_true)];
    let mut k = 1usize;

    loop {
        if d <= target {
            let (tail_ratio, swapped_tail_d) = match &grand_base {
                Some(gb) if k >= 2 => {
                    let sigma_prev = seq.sigma() - 1.0 / alpha;
                    let x_swap = runner.step(alpha, gb, y)?;
                    (
                        Some((1.0 / alpha) / sigma_prev),
                        Some(discrepancy(runner.matrix(), &x_swap, y)),
                    )
                }
                _ => (None, None),
            };
            let last = trace.last().expect("nonempty");
            return Ok(RunReport {
                method: Method::IimA1,
                status: RunStatus::Converged,
                n: k,
                alpha_n: alpha,
                sigma_n: seq.sigma(),
                d_n: d,
                e_n: last.e,
                x,
                trace,
                geometric_tail_ok: None,
                tail_ratio,
                swapped_tail_d,
            });
        }
        if k >= cfg.max_iter {
            return Err(Error::NonTermination {
                max_iter: cfg.max_iter,
                last_d: d,
                trace,
            });
        }
        let w_pen = penalty_image(runner, &x, &prev_base);
        let v = factor.solve(&w_pen)?;
        let r_new = newton_update(1.0 / alpha, d, noisy.delta, dot(&v, &w_pen))?;
        alpha = 1.0 / r_new;
        grand_base = Some(std::mem::replace(&mut prev_base, x));
        let (x_new, factor_new) = runner.step_with_factor(alpha, &prev_base, y)?;
        x = x_new;
        factor = factor_new;
        d = discrepancy(runner.matrix(), &x, y);
        k += 1;
        seq.push(alpha)?;
        trace.push(runner.trace_row(k, alpha, d, &x, x_true));
    }
}
