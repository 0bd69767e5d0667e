//! Minimizers: bracketed scalar search for rational Calabi-energy profiles and
//! damped Newton for smooth strictly convex functionals on ℝᵈ.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Golden-section shrink factor, (√5 − 1)/2.
const INV_PHI: f64 = 0.618_033_988_749_894_9;
const GOLDEN_MAX_ITER: usize = 500;
const NEWTON_MAX_ITER: usize = 100;
const MAX_HALVINGS: usize = 40;
const MAX_CONDITION: f64 = 1e14;
/// Distance from a real denominator root inside which evaluation is refused.
const POLE_GUARD: f64 = 1e-12;

pub const DEFAULT_SCALAR_TOL: f64 = 1e-10;
pub const DEFAULT_NEWTON_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizeError {
    #[error("bad bracket [{lo}, {hi}]: {reason}")]
    BadBracket { lo: f64, hi: f64, reason: String },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("denominator root at {root} lies in [{lo}, {hi}]")]
    PoleInBracket { root: f64, lo: f64, hi: f64 },
    #[error("evaluation at {0} is within {POLE_GUARD:e} of a denominator root")]
    Pole(f64),
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("Hessian is singular or indefinite (condition estimate {0:e})")]
    SingularHessian(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizationResult {
    pub argmin: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Horner evaluation of ascending-power coefficients.
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `scale · N(x) / D(x)` with polynomial coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFn {
    scale: f64,
    numerator: Vec<f64>,
    denominator: Vec<f64>,
    real_poles: Vec<f64>,
}

impl RationalFn {
    pub fn new(
        scale: f64,
        numerator: Vec<f64>,
        denominator: Vec<f64>,
    ) -> Result<Self, OptimizeError> {
        let mut denominator = denominator;
        while denominator.last() == Some(&0.0) {
            denominator.pop();
        }
        if denominator.is_empty() {
            return Err(OptimizeError::ZeroDenominator);
        }
        let real_poles = real_roots(&denominator);
        Ok(RationalFn {
            scale,
            numerator,
            denominator,
            real_poles,
        })
    }

    /// Calabi-energy profile of the Chen-LeBrun-Weber Kähler class.
    pub fn clbw_profile() -> Self {
        RationalFn::new(
            3.0,
            vec![32.0, 176.0, 318.0, 280.0, 132.0, 32.0, 3.0],
            vec![12.0, 72.0, 138.0, 120.0, 54.0, 12.0, 1.0],
        )
        .expect("nonzero denominator")
    }

    /// Calabi-energy profile for the Page metric; the denominator is
    /// `x(6 + 6x + x²)`.
    pub fn page_profile() -> Self {
        RationalFn::new(1.0, vec![4.0, 14.0, 16.0, 3.0], vec![0.0, 6.0, 6.0, 1.0])
            .expect("nonzero denominator")
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn numerator(&self) -> &[f64] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[f64] {
        &self.denominator
    }

    /// Real roots of the denominator, ascending.
    pub fn poles(&self) -> &[f64] {
        &self.real_poles
    }

    pub fn eval(&self, x: f64) -> Result<f64, OptimizeError> {
        if self.real_poles.iter().any(|r| (x - r).abs() <= POLE_GUARD) {
            return Err(OptimizeError::Pole(x));
        }
        Ok(self.scale * horner(&self.numerator, x) / horner(&self.denominator, x))
    }
}

/// Real roots via companion-matrix eigenvalues.
fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let mut coeffs = coeffs.to_vec();
    let mut roots = Vec::new();
    // Factor out roots at zero first; the companion matrix handles the rest.
    while coeffs.len() > 1 && coeffs[0] == 0.0 {
        coeffs.remove(0);
        roots.push(0.0);
    }
    let deg = coeffs.len() - 1;
    if deg >= 1 {
        let lead = coeffs[deg];
        let mut comp = DMatrix::<f64>::zeros(deg, deg);
        for i in 1..deg {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..deg {
            comp[(i, deg - 1)] = -coeffs[i] / lead;
        }
        for z in comp.complex_eigenvalues().iter() {
            if z.im.abs() <= 1e-9 * (1.0 + z.re.abs()) {
                roots.push(z.re);
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

fn central_derivatives(f: &impl Fn(f64) -> f64, x: f64) -> (f64, f64, f64) {
    let h = 1e-5 * x.abs().max(1.0);
    let (fm, f0, fp) = (f(x - h), f(x), f(x + h));
    ((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h), f0)
}

/// Golden-section search on `[lo, hi]` down to width `tol`, followed by a few
/// Newton steps on central-difference derivatives.
///
/// Multi-modal functions may return any local minimum.
pub fn minimize_scalar(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<MinimizationResult, OptimizeError> {
    let bad = |reason: &str| OptimizeError::BadBracket {
        lo,
        hi,
        reason: reason.to_string(),
    };
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(bad("need finite lo < hi"));
    }
    if !(tol > 0.0) {
        return Err(bad("tolerance must be positive"));
    }
    let checked = |x: f64| -> Result<f64, OptimizeError> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad(&format!("non-finite value at {x}")))
        }
    };
    checked(lo)?;
    checked(hi)?;

    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = checked(x1)?;
    let mut f2 = checked(x2)?;
    let mut iterations = 0;
    while b - a > tol {
        if iterations >= GOLDEN_MAX_ITER {
            return Err(OptimizeError::NoConvergence {
                iterations,
                residual: b - a,
            });
        }
        iterations += 1;
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = checked(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = checked(x2)?;
        }
    }
    let (mut x, mut fx) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };

    // Golden section cannot resolve the argmin below ~sqrt(eps) because the
    // function is flat there; Newton on the derivative can.
    let h_guard = 1e-5 * x.abs().max(1.0);
    let interior = |x: f64| x - h_guard > lo && x + h_guard < hi;
    let mut polished_inside = true;
    for _ in 0..4 {
        if !interior(x) {
            break;
        }
        let (d1, d2, _) = central_derivatives(&f, x);
        if !(d2 > 0.0) || !d1.is_finite() {
            break;
        }
        let step = -d1 / d2;
        let cand = x + step;
        if !interior(cand) {
            polished_inside = false;
            break;
        }
        let fc = f(cand);
        if !(fc <= fx + 4.0 * f64::EPSILON * fx.abs()) {
            break;
        }
        x = cand;
        fx = fc;
        iterations += 1;
        if step.abs() < 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    let gradient_norm = if interior(x) {
        central_derivatives(&f, x).0.abs()
    } else {
        f64::NAN
    };
    Ok(MinimizationResult {
        argmin: vec![x],
        value: fx,
        gradient_norm,
        iterations,
        converged: polished_inside,
    })
}

/// Minimizes a rational function on a pole-free bracket.
pub fn minimize_rational(
    r: &RationalFn,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<MinimizationResult, OptimizeError> {
    if let Some(&root) = r
        .poles()
        .iter()
        .find(|&&p| p >= lo - POLE_GUARD && p <= hi + POLE_GUARD)
    {
        return Err(OptimizeError::PoleInBracket { root, lo, hi });
    }
    let eval = |x: f64| r.eval(x).unwrap_or(f64::NAN);
    minimize_scalar(eval, lo, hi, tol)
}

/// Value, gradient and Hessian of a smooth function at one point.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

/// A twice-differentiable objective with exact derivatives.
pub trait SmoothObjective {
    fn dim(&self) -> usize;
    fn value(&self, x: &DVector<f64>) -> f64;
    fn evaluate(&self, x: &DVector<f64>) -> Evaluation;
}

/// Damped Newton iteration for a strictly convex objective.
///
/// Each step solves `H p = −g` and halves `p` until the value does not
/// increase (up to rounding). Stops once `‖g‖ ≤ tol`.
pub fn minimize_convex_newton(
    objective: &impl SmoothObjective,
    init: &[f64],
    tol: f64,
) -> Result<MinimizationResult, OptimizeError> {
    assert_eq!(init.len(), objective.dim(), "initial point dimension");
    let mut x = DVector::from_column_slice(init);
    let mut last_norm = f64::INFINITY;
    for iter in 0..=NEWTON_MAX_ITER {
        let ev = objective.evaluate(&x);
        let gnorm = ev.gradient.norm();
        last_norm = gnorm;
        if gnorm <= tol {
            return Ok(MinimizationResult {
                argmin: x.iter().copied().collect(),
                value: ev.value,
                gradient_norm: gnorm,
                iterations: iter,
                converged: true,
            });
        }
        if iter == NEWTON_MAX_ITER {
            break;
        }
        let eig = ev.hessian.clone().symmetric_eigenvalues();
        let (lmin, lmax) = eig
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &l| {
                (a.min(l), b.max(l))
            });
        if !(lmin > 0.0) || lmax / lmin > MAX_CONDITION {
            return Err(OptimizeError::SingularHessian(lmax / lmin));
        }
        let chol = ev
            .hessian
            .clone()
            .cholesky()
            .ok_or(OptimizeError::SingularHessian(lmax / lmin))?;
        let step = chol.solve(&(-&ev.gradient));

        let slack = 4.0 * f64::EPSILON * ev.value.abs();
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let trial = &x + &step * t;
            let v = objective.value(&trial);
            if v <= ev.value + slack {
                x = trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(OptimizeError::NoConvergence {
                iterations: iter,
                residual: gnorm,
            });
        }
    }
    Err(OptimizeError::NoConvergence {
        iterations: NEWTON_MAX_ITER,
        residual: last_norm,
    })
}
