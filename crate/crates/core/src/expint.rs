//! Exact integrals of exponentials of linear forms over simplices and polygons.
//!
//! Everything rests on the identity
//!
//! ```text
//! ∫_Δ e^{ℓ(x)} dx = d! · vol(Δ) · exp[ℓ(v₀), …, ℓ(v_d)]
//! ```
//!
//! where `exp[…]` is the divided difference of the exponential at the values of
//! `ℓ` on the vertices. Differentiating in the node values gives the first and
//! second moments: `∂/∂t_j` of a divided difference repeats node `t_j`, so
//! `∫ λ_j e^ℓ` and `∫ λ_j λ_k e^ℓ` (barycentric coordinates) are divided
//! differences with one or two extra confluent nodes.
//!
//! [`quadrature_oracle`] is an independent numerical path used to check the
//! exact engine.

use thiserror::Error;

use crate::polytope::{Point, Polytope, Simplex};

/// Node spread at or below which the divided difference is summed as a
/// Taylor series about the mean node.
const TAYLOR_SPREAD: f64 = 1.0;
/// Series terms beyond the leading one; |δ| ≤ 1 makes term k at most 1/k!.
const TAYLOR_TERMS: usize = 26;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpIntError {
    #[error("quadrature did not reach tolerance {tol:e} after {levels} refinements (last change {change:e})")]
    NoConvergence { tol: f64, levels: u32, change: f64 },
    #[error("invalid quadrature tolerance {0}")]
    BadTolerance(f64),
    #[error("dimension mismatch: form has {form} coefficients, polytope has dimension {polytope}")]
    DimensionMismatch { form: usize, polytope: usize },
}

/// The affine function `x ↦ ⟨coefficients, x⟩ + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    pub coefficients: Vec<f64>,
    pub offset: f64,
}

impl LinearForm {
    pub fn new(coefficients: Vec<f64>) -> Self {
        LinearForm {
            coefficients,
            offset: 0.0,
        }
    }

    pub fn with_offset(coefficients: Vec<f64>, offset: f64) -> Self {
        LinearForm {
            coefficients,
            offset,
        }
    }

    pub fn zero(dim: usize) -> Self {
        LinearForm::new(vec![0.0; dim])
    }

    /// `c · (x₁ + … + x_d)`.
    pub fn diagonal(c: f64, dim: usize) -> Self {
        LinearForm::new(vec![c; dim])
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    /// Linear part only (the offset is excluded).
    pub fn linear_at(&self, p: &Point) -> f64 {
        self.coefficients
            .iter()
            .zip(p.coords())
            .map(|(c, x)| c * x)
            .sum()
    }

    pub fn eval(&self, p: &Point) -> f64 {
        self.linear_at(p) + self.offset
    }

    pub fn scaled(&self, s: f64) -> LinearForm {
        LinearForm {
            coefficients: self.coefficients.iter().map(|c| c * s).collect(),
            offset: self.offset * s,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.offset.is_finite() && self.coefficients.iter().all(|c| c.is_finite())
    }
}

/// Divided-difference arguments, each node value carrying a multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeList {
    values: Vec<f64>,
    multiplicities: Vec<usize>,
}

impl NodeList {
    /// Panics if lengths differ, the list is empty, or a multiplicity is zero.
    pub fn new(values: Vec<f64>, multiplicities: Vec<usize>) -> Self {
        assert_eq!(
            values.len(),
            multiplicities.len(),
            "one multiplicity per node"
        );
        assert!(!values.is_empty(), "at least one node");
        assert!(
            multiplicities.iter().all(|&m| m >= 1),
            "multiplicities are positive"
        );
        NodeList {
            values,
            multiplicities,
        }
    }

    /// Every node with multiplicity one.
    pub fn simple(values: Vec<f64>) -> Self {
        let n = values.len();
        NodeList::new(values, vec![1; n])
    }

    pub fn total_multiplicity(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    fn expanded(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&v, &m)| std::iter::repeat_n(v, m))
            .collect()
    }
}

/// Confluent divided difference `exp[t₀, …, t_{m-1}]`.
pub fn dd_exp(nodes: &NodeList) -> f64 {
    dd_exp_args(nodes.expanded())
}

/// Divided difference over a flat argument list; repeated values are confluent.
pub(crate) fn dd_exp_args(mut t: Vec<f64>) -> f64 {
    debug_assert!(!t.is_empty());
    t.sort_by(f64::total_cmp);
    let m = t.len();
    if t[m - 1] - t[0] <= TAYLOR_SPREAD {
        return dd_exp_series(&t);
    }
    // Difference table over the sorted nodes: row k holds exp[t_i..t_{i+k}].
    let mut row: Vec<f64> = t.iter().map(|x| x.exp()).collect();
    for k in 1..m {
        for i in 0..m - k {
            let h = t[i + k] - t[i];
            row[i] = if h <= TAYLOR_SPREAD {
                dd_exp_series(&t[i..=i + k])
            } else {
                (row[i + 1] - row[i]) / h
            };
        }
    }
    row[0]
}

/// `exp[t] = e^μ Σ_k h_k(t − μ) / (k + m − 1)!` with `h_k` the complete
/// homogeneous symmetric polynomials and `μ` the mean node.
fn dd_exp_series(t: &[f64]) -> f64 {
    let m = t.len();
    let mean = t.iter().sum::<f64>() / m as f64;
    let mut h = [0.0f64; TAYLOR_TERMS + 1];
    h[0] = 1.0;
    for &x in t {
        let d = x - mean;
        for k in 1..=TAYLOR_TERMS {
            h[k] += d * h[k - 1];
        }
    }
    let mut inv_fact = 1.0;
    for j in 2..m {
        inv_fact /= j as f64;
    }
    let mut sum = 0.0;
    for (k, hk) in h.iter().enumerate() {
        if k > 0 {
            inv_fact /= (k + m - 1) as f64;
        }
        sum += hk * inv_fact;
    }
    mean.exp() * sum
}

fn factorial(d: usize) -> f64 {
    (2..=d).map(|k| k as f64).product()
}

fn simplex_nodes(s: &Simplex, form: &LinearForm) -> Vec<f64> {
    s.vertices().iter().map(|v| form.linear_at(v)).collect()
}

/// `∫_s e^{ℓ(x)} dx`.
pub fn simplex_exp_integral(s: &Simplex, form: &LinearForm) -> f64 {
    let nodes = simplex_nodes(s, form);
    factorial(s.dim()) * s.volume() * dd_exp_args(nodes) * form.offset.exp()
}

/// `∫_s x_i e^{ℓ(x)} dx` via `x_i = Σ_j λ_j (v_j)_i`.
pub fn simplex_moment1(s: &Simplex, form: &LinearForm, i: usize) -> f64 {
    let nodes = simplex_nodes(s, form);
    let mut acc = 0.0;
    for (j, v) in s.vertices().iter().enumerate() {
        let mut args = nodes.clone();
        args.push(nodes[j]);
        acc += v[i] * dd_exp_args(args);
    }
    factorial(s.dim()) * s.volume() * acc * form.offset.exp()
}

/// `∫_s x_i x_k e^{ℓ(x)} dx`.
pub fn simplex_moment2(s: &Simplex, form: &LinearForm, i: usize, k: usize) -> f64 {
    let nodes = simplex_nodes(s, form);
    let verts = s.vertices();
    let mut acc = 0.0;
    for (j, vj) in verts.iter().enumerate() {
        for (l, vl) in verts.iter().enumerate() {
            let mut args = nodes.clone();
            args.push(nodes[j]);
            args.push(nodes[l]);
            // ∂²/∂t_j² of a divided difference with t_j doubled carries a factor 2.
            let weight = if j == l { 2.0 } else { 1.0 };
            acc += vj[i] * vl[k] * weight * dd_exp_args(args);
        }
    }
    factorial(s.dim()) * s.volume() * acc * form.offset.exp()
}

fn check_dim(p: &Polytope, form: &LinearForm) {
    assert_eq!(
        form.dim(),
        p.dimension(),
        "linear form and polytope dimensions differ"
    );
}

/// `∫_p e^{ℓ(x)} dx`, summed over the fan triangulation.
pub fn polytope_exp_integral(p: &Polytope, form: &LinearForm) -> f64 {
    check_dim(p, form);
    p.triangulate()
        .iter()
        .map(|s| simplex_exp_integral(s, form))
        .sum()
}

/// `∫_p x_i e^{ℓ(x)} dx`.
pub fn polytope_moment1(p: &Polytope, form: &LinearForm, i: usize) -> f64 {
    check_dim(p, form);
    assert!(i < p.dimension(), "coordinate index out of range");
    p.triangulate()
        .iter()
        .map(|s| simplex_moment1(s, form, i))
        .sum()
}

/// `∫_p x_i x_j e^{ℓ(x)} dx`.
pub fn polytope_moment2(p: &Polytope, form: &LinearForm, i: usize, j: usize) -> f64 {
    check_dim(p, form);
    assert!(
        i < p.dimension() && j < p.dimension(),
        "coordinate index out of range"
    );
    p.triangulate()
        .iter()
        .map(|s| simplex_moment2(s, form, i, j))
        .sum()
}

/// Gauss-Legendre nodes and weights on [0, 1].
fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (x + 1.0), 0.5 * w));
    }
    out
}

/// Collapsed product rule on the reference triangle: points `(u, v)` with
/// weights summing to 1/2.
fn reference_triangle_rule() -> Vec<(f64, f64, f64)> {
    const ORDER: usize = 10;
    let gl = gauss_legendre_unit(ORDER);
    let mut rule = Vec::with_capacity(ORDER * ORDER);
    for &(xi, wx) in &gl {
        for &(eta, wy) in &gl {
            rule.push((xi, eta * (1.0 - xi), wx * wy * (1.0 - xi)));
        }
    }
    rule
}

/// Result of the quadrature oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    /// `max(1, ∫|x^α| e^ℓ)`, the scale the tolerance is measured against.
    pub scale: f64,
    pub levels: u32,
}

const MAX_REFINEMENT: u32 = 7;

/// Numerical `∫_p x^monomial e^{ℓ(x)} dx`.
///
/// Every fan triangle is split uniformly into `4^L` pieces and integrated with
/// a degree-19 collapsed Gauss rule; `L` grows until two successive levels
/// agree to `tol · max(1, ∫|x^α| e^ℓ)`.
pub fn quadrature_oracle(
    p: &Polytope,
    form: &LinearForm,
    monomial: &[u32],
    tol: f64,
) -> Result<f64, ExpIntError> {
    quadrature_estimate(p, form, monomial, tol).map(|q| q.value)
}

pub fn quadrature_estimate(
    p: &Polytope,
    form: &LinearForm,
    monomial: &[u32],
    tol: f64,
) -> Result<QuadratureEstimate, ExpIntError> {
    if !(tol > 0.0) {
        return Err(ExpIntError::BadTolerance(tol));
    }
    if form.dim() != p.dimension() {
        return Err(ExpIntError::DimensionMismatch {
            form: form.dim(),
            polytope: p.dimension(),
        });
    }
    let rule = reference_triangle_rule();
    let tris = p.triangulate();
    let integrand = |x: f64, y: f64| -> f64 {
        let mut v = (form.coefficients[0] * x + form.coefficients[1] * y + form.offset).exp();
        for (c, &a) in [x, y].iter().zip(monomial) {
            v *= c.powi(a as i32);
        }
        v
    };

    let mut prev: Option<f64> = None;
    let mut last_change = f64::INFINITY;
    for level in 0..=MAX_REFINEMENT {
        let (value, abs) = refined_sum(&tris, &rule, 1usize << level, &integrand);
        let scale = abs.max(1.0);
        if let Some(q) = prev {
            last_change = (value - q).abs();
            if last_change <= tol * scale {
                return Ok(QuadratureEstimate {
                    value,
                    scale,
                    levels: level,
                });
            }
        }
        prev = Some(value);
    }
    Err(ExpIntError::NoConvergence {
        tol,
        levels: MAX_REFINEMENT,
        change: last_change,
    })
}

fn refined_sum(
    tris: &[Simplex],
    rule: &[(f64, f64, f64)],
    divisions: usize,
    integrand: &impl Fn(f64, f64) -> f64,
) -> (f64, f64) {
    let mut total = 0.0;
    let mut total_abs = 0.0;
    let n = divisions as f64;
    for s in tris {
        let v = s.vertices();
        let (ax, ay) = (v[0][0], v[0][1]);
        let (ux, uy) = (v[1][0] - ax, v[1][1] - ay);
        let (wx, wy) = (v[2][0] - ax, v[2][1] - ay);
        let at = |a: f64, b: f64| (ax + a * ux + b * wx, ay + a * uy + b * wy);
        // Each sub-triangle has 1/n² of the parent's area; 2·vol maps the
        // reference weights (summing to 1/2) onto it.
        let jac = 2.0 * s.volume() / (n * n);
        let mut sub = |p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)| {
            let (mut acc, mut acc_abs) = (0.0, 0.0);
            for &(u, w, wt) in rule {
                let x = p0.0 + u * (p1.0 - p0.0) + w * (p2.0 - p0.0);
                let y = p0.1 + u * (p1.1 - p0.1) + w * (p2.1 - p0.1);
                let f = integrand(x, y);
                acc += wt * f;
                acc_abs += wt * f.abs();
            }
            total += jac * acc;
            total_abs += jac * acc_abs;
        };
        for i in 0..divisions {
            for j in 0..divisions - i {
                let (fi, fj) = (i as f64 / n, j as f64 / n);
                let step = 1.0 / n;
                sub(at(fi, fj), at(fi + step, fj), at(fi, fj + step));
                if i + j + 1 < divisions {
                    sub(
                        at(fi + step, fj),
                        at(fi + step, fj + step),
                        at(fi, fj + step),
                    );
                }
            }
        }
    }
    (total, total_abs)
}
