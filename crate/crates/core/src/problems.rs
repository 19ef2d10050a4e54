//! The second-derivative benchmark problem and reproducible noisy data.
//!
//! The forward operator is the integral operator with the Green's-function
//! kernel of `-u''` on `[0, 1]` with zero boundary values:
//!
//! ```text
//! K(s, t) = s (1 - t)  for s <= t,      t (1 - s)  for s >= t.
//! ```
//!
//! Discretization is Galerkin with the orthonormal piecewise-constant basis
//! `phi_i = h^{-1/2} * 1_{((i-1)h, ih)}`, `h = 1/m`, so matrix entries are
//! exact double integrals of `K` over cell pairs and right-hand sides are
//! exact cell averages (times `h^{1/2}`) of the data function. All integrals
//! below are closed forms; the antiderivative differences are written in
//! factored form (`d^2 - c^2 = h (c + d)` and friends) so entries stay
//! accurate to near machine precision even for small `h`.

use crate::error::{Error, Result};
use crate::linalg::{norm2, DenseMatrix};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The three exact solution/data pairs, ordered by decreasing smoothness of
/// the solution. Interface tags (`i`, `ii`, `iii`) follow the benchmark
/// numbering used by the CLI and output files.
///
/// * `Sine`: `x(t) = sin(2 pi t)`, `y(s) = sin(2 pi s) / (4 pi^2)`.
/// * `Bump`: `x(t) = 4 t (1 - t)`, `y(s) = (s/3)(1 - 2 s^2 + s^3)`.
/// * `Ramp`: `x(t) = t`, `y(s) = (s/6)(1 - s^2)`. The solution does not
///   vanish at `t = 1`, which limits how fast reconstructions can converge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Sine,
    Bump,
    Ramp,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Sine, Variant::Bump, Variant::Ramp];

    pub fn tag(self) -> &'static str {
        match self {
            Variant::Sine => "i",
            Variant::Bump => "ii",
            Variant::Ramp => "iii",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Variant> {
        match tag {
            "i" => Some(Variant::Sine),
            "ii" => Some(Variant::Bump),
            "iii" => Some(Variant::Ramp),
            _ => None,
        }
    }

    /// Supremum of the grades `p` for which `|B^p x_true|` stays bounded as
    /// the discretization is refined. `sin(2 pi t)` is an eigenfunction of
    /// the penalty, so it lies in every grade; the other two solutions are
    /// capped by how their boundary behavior clashes with the zero boundary
    /// conditions built into `B` (`4t(1-t)` has nonzero curvature at the
    /// endpoints, `t` is nonzero at `t = 1`).
    pub fn smoothness_limit(self) -> f64 {
        match self {
            Variant::Sine => f64::INFINITY,
            Variant::Bump => 2.5,
            Variant::Ramp => 0.5,
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Galerkin matrix of the kernel above: `A_ij = h^{-1} * iint K` over
/// `cell_i x cell_j`. Off-diagonal entries reduce to the midpoint product
/// `h * mid_i * (1 - mid_j)` (the kernel is bilinear away from the diagonal,
/// so the midpoint rule is exact); diagonal entries integrate the kink at
/// `s = t` analytically.
pub fn galerkin_deriv2(m: usize) -> Result<DenseMatrix> {
    if m < 2 {
        return Err(Error::InvalidDimension { min: 2, got: m });
    }
    let h = 1.0 / m as f64;
    let mid = |i: usize| (i as f64 + 0.5) * h;
    let mut a = DenseMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = if i == j {
                diagonal_entry(i as f64 * h, (i as f64 + 1.0) * h)
            } else {
                h * mid(i) * (1.0 - mid(j))
            };
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    Ok(a)
}

/// `(2/h) * int_c^d int_s^d s (1 - t) dt ds / h * h` rearranged with the
/// common factor `h = d - c` cancelled analytically:
/// `2 [ (c+d)(d - d^2/2)/2 - (c^2 + c d + d^2)/3 + (c+d)(c^2 + d^2)/8 ]`.
fn diagonal_entry(c: f64, d: f64) -> f64 {
    let s1 = c + d;
    let s2 = c * c + c * d + d * d;
    let s2e = c * c + d * d;
    2.0 * (s1 * (d - 0.5 * d * d) / 2.0 - s2 / 3.0 + s1 * s2e / 8.0)
}

/// Returns `(x_true, y)` as coefficient vectors in the orthonormal
/// piecewise-constant basis: component `i` is `h^{-1/2}` times the exact
/// integral over cell `i`.
pub fn exact_pair(variant: Variant, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if m < 2 {
        return Err(Error::InvalidDimension { min: 2, got: m });
    }
    let h = 1.0 / m as f64;
    let root_h_inv = 1.0 / h.sqrt();
    let mut x = Vec::with_capacity(m);
    let mut y = Vec::with_capacity(m);
    for i in 0..m {
        let c = i as f64 * h;
        let d = (i as f64 + 1.0) * h;
        let (xi, yi) = cell_integrals(variant, c, d, h);
        x.push(root_h_inv * xi);
        y.push(root_h_inv * yi);
    }
    Ok((x, y))
}

/// Exact integrals of the solution and data functions over `[c, d]`,
/// `d - c = h`. Polynomial antiderivative differences use the factorizations
/// `d^2-c^2 = h(c+d)`, `d^3-c^3 = h(c^2+cd+d^2)`, `d^4-c^4 = h(c+d)(c^2+d^2)`,
/// `d^5-c^5 = h(c^4+c^3 d+c^2 d^2+c d^3+d^4)`; the sine integrals use the
/// product form of the cosine difference for the same reason.
fn cell_integrals(variant: Variant, c: f64, d: f64, h: f64) -> (f64, f64) {
    use std::f64::consts::PI;
    let p2 = c + d;
    let p3 = c * c + c * d + d * d;
    let p4 = p2 * (c * c + d * d);
    match variant {
        Variant::Sine => {
            // cos(2 pi d) - cos(2 pi c) = -2 sin(pi (c + d)) sin(pi (d - c)).
            let dcos = -2.0 * (PI * p2).sin() * (PI * h).sin();
            // x = sin(2 pi t):            int = -(dcos) / (2 pi).
            // y = sin(2 pi s)/(4 pi^2):   int = -(dcos) / (8 pi^3).
            (-dcos / (2.0 * PI), -dcos / (8.0 * PI * PI * PI))
        }
        Variant::Bump => {
            let p5 = c * c * c * c + c * c * c * d + c * c * d * d + c * d * d * d + d * d * d * d;
            // x = 4 t (1 - t):                 X = 2 t^2 - (4/3) t^3.
            let xi = h * (2.0 * p2 - 4.0 * p3 / 3.0);
            // y = s/3 - (2/3) s^3 + s^4/3:     Y = s^2/6 - s^4/6 + s^5/15.
            let yi = h * (p2 / 6.0 - p4 / 6.0 + p5 / 15.0);
            (xi, yi)
        }
        Variant::Ramp => {
            // x = t:                  X = t^2 / 2.
            let xi = h * p2 / 2.0;
            // y = s/6 - s^3/6:        Y = s^2/12 - s^4/24.
            let yi = h * (p2 / 12.0 - p4 / 24.0);
            (xi, yi)
        }
    }
}

/// A noisy right-hand side with its exact noise level.
#[derive(Clone, Debug)]
pub struct NoisyData {
    pub y_delta: Vec<f64>,
    /// `delta = sigma * |y|_2`, the exact Euclidean size of the perturbation.
    pub delta: f64,
    pub sigma: f64,
    pub seed: u64,
}

/// Perturbs `y` with seeded Gaussian noise rescaled so the relative error is
/// exactly `sigma`:
///
/// ```text
/// y_delta = y + sigma * (|y|_2 / |e|_2) * e,    e ~ N(0, I).
/// ```
///
/// The generator is ChaCha8 seeded directly from `seed`; normals come from a
/// Box-Muller transform over explicitly constructed 53-bit uniforms, so the
/// realization depends only on `(len, seed)` and nothing else.
pub fn add_noise(y: &[f64], sigma: f64, seed: u64) -> Result<NoisyData> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidNoiseLevel(sigma));
    }
    if sigma == 0.0 {
        return Ok(NoisyData {
            y_delta: y.to_vec(),
            delta: 0.0,
            sigma,
            seed,
        });
    }
    let e = standard_normals(y.len(), seed);
    let y_norm = norm2(y);
    let e_norm = norm2(&e);
    let delta = sigma * y_norm;
    if e_norm == 0.0 || y_norm == 0.0 {
        // Degenerate inputs: nothing to perturb against.
        return Ok(NoisyData {
            y_delta: y.to_vec(),
            delta,
            sigma,
            seed,
        });
    }
    let factor = sigma * y_norm / e_norm;
    let y_delta = y.iter().zip(&e).map(|(v, n)| v + factor * n).collect();
    Ok(NoisyData {
        y_delta,
        delta,
        sigma,
        seed,
    })
}

/// Standard normal draws via Box-Muller. Uniforms are built from the top 53
/// bits of each 64-bit ChaCha8 output; `u1` is shifted into `(0, 1]` so the
/// logarithm never sees zero.
fn standard_normals(n: usize, seed: u64) -> Vec<f64> {
    const SCALE: f64 = 1.0 / 9007199254740992.0; // 2^-53
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n + 1);
    while out.len() < n {
        let u1 = ((rng.next_u64() >> 11) + 1) as f64 * SCALE;
        let u2 = (rng.next_u64() >> 11) as f64 * SCALE;
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        out.push(r * theta.cos());
        out.push(r * theta.sin());
    }
    out.truncate(n);
    out
}

/// Bundles everything fixed about one benchmark instance.
#[derive(Clone, Debug)]
pub struct TestProblem {
    pub variant: Variant,
    pub m: usize,
    pub a: DenseMatrix,
    pub x_true: Vec<f64>,
    pub y: Vec<f64>,
}

impl TestProblem {
    pub fn build(variant: Variant, m: usize) -> Result<TestProblem> {
        let a = galerkin_deriv2(m)?;
        let (x_true, y) = exact_pair(variant, m)?;
        Ok(TestProblem {
            variant,
            m,
            a,
            x_true,
            y,
        })
    }
}
