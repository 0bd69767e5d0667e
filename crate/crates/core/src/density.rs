//! Gaussian densities Θ = e^ν for Einstein metrics, conformally Kähler
//! Einstein metrics, and toric Kähler-Ricci solitons.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expint::{polytope_exp_integral, polytope_moment1, polytope_moment2, LinearForm};
use crate::optimize::{
    minimize_convex_newton, minimize_rational, Evaluation, MinimizationResult, OptimizeError,
    RationalFn, SmoothObjective, DEFAULT_NEWTON_TOL, DEFAULT_SCALAR_TOL,
};
use crate::polytope::{self, Polytope};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("scalar curvature must be positive, got {0}")]
    NonpositiveCurvature(f64),
    #[error("volume must be positive, got {0}")]
    NonpositiveVolume(f64),
    #[error("dimension must be positive, got {0}")]
    NonpositiveDimension(f64),
    #[error("Calabi energy must be nonnegative, got {0}")]
    NegativeCalabiEnergy(f64),
    #[error("inputs give a nonpositive density Θ = {0}")]
    NonpositiveDensity(f64),
    #[error("β must be positive, got {0}")]
    NonpositiveBeta(f64),
    #[error("polytope has dimension {polytope} but the complex dimension is {complex}")]
    DimensionMismatch { polytope: usize, complex: usize },
    #[error("symmetry reduction requested but the polytope is not invariant under x1 <-> x2")]
    SymmetryMismatch,
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
}

/// Euler characteristic and signature of a compact 4-manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopologyInvariants {
    pub euler_characteristic: i64,
    pub signature: i64,
}

impl TopologyInvariants {
    pub const fn new(euler_characteristic: i64, signature: i64) -> Self {
        TopologyInvariants {
            euler_characteristic,
            signature,
        }
    }

    /// CP² # CP̄²
    pub const ONE_POINT_BLOWUP: Self = Self::new(4, 0);
    /// CP² # 2CP̄²
    pub const TWO_POINT_BLOWUP: Self = Self::new(5, -1);
}

/// Extremal-metric Calabi energy as `prefactor · min rational` over `bracket`.
#[derive(Debug, Clone, PartialEq)]
pub struct CalabiProfile {
    pub rational: RationalFn,
    pub prefactor: f64,
    pub bracket: (f64, f64),
}

impl CalabiProfile {
    pub fn new(rational: RationalFn, prefactor: f64, bracket: (f64, f64)) -> Self {
        assert!(prefactor > 0.0, "Calabi prefactor must be positive");
        CalabiProfile {
            rational,
            prefactor,
            bracket,
        }
    }

    pub fn clbw() -> Self {
        CalabiProfile::new(RationalFn::clbw_profile(), 32.0 * PI * PI, (0.0, 5.0))
    }

    pub fn page() -> Self {
        CalabiProfile::new(RationalFn::page_profile(), 96.0 * PI * PI, (0.1, 10.0))
    }
}

/// A toric soliton problem on a moment polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonProblem {
    pub polytope: Polytope,
    pub complex_dimension: usize,
    /// Restrict the potential to `c · (x₁ + … + x_d)`.
    pub symmetry_reduce: bool,
}

impl SolitonProblem {
    pub fn new(
        polytope: Polytope,
        complex_dimension: usize,
        symmetry_reduce: bool,
    ) -> Result<Self, DensityError> {
        if polytope.dimension() != complex_dimension {
            return Err(DensityError::DimensionMismatch {
                polytope: polytope.dimension(),
                complex: complex_dimension,
            });
        }
        if symmetry_reduce && !polytope.is_swap_symmetric(1e-12) {
            return Err(DensityError::SymmetryMismatch);
        }
        Ok(SolitonProblem {
            polytope,
            complex_dimension,
            symmetry_reduce,
        })
    }

    /// Built-in polytopes default to the symmetric reduction.
    pub fn builtin(name: &str) -> Result<Self, crate::Error> {
        let p = polytope::builtin(name)?;
        Ok(SolitonProblem::new(p, 2, true)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub metric_label: String,
    pub theta: f64,
    pub nu: f64,
    pub intermediates: BTreeMap<String, f64>,
}

impl DensityReport {
    fn from_theta(label: &str, theta: f64, intermediates: BTreeMap<String, f64>) -> Self {
        DensityReport {
            metric_label: label.to_string(),
            theta,
            nu: theta.ln(),
            intermediates,
        }
    }

    fn from_nu(label: &str, nu: f64, intermediates: BTreeMap<String, f64>) -> Self {
        DensityReport {
            metric_label: label.to_string(),
            theta: nu.exp(),
            nu,
            intermediates,
        }
    }

    pub fn intermediate(&self, key: &str) -> Option<f64> {
        self.intermediates.get(key).copied()
    }
}

fn labelled(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// Θ = (R / (2πne))^{n/2} · Vol for an Einstein metric of scalar curvature R
/// on a real n-manifold.
pub fn einstein_density(
    scalar_curvature: f64,
    volume: f64,
    dim: f64,
) -> Result<DensityReport, DensityError> {
    if !(scalar_curvature > 0.0) {
        return Err(DensityError::NonpositiveCurvature(scalar_curvature));
    }
    if !(volume > 0.0) {
        return Err(DensityError::NonpositiveVolume(volume));
    }
    if !(dim > 0.0) {
        return Err(DensityError::NonpositiveDimension(dim));
    }
    let theta = (scalar_curvature / (2.0 * PI * dim * E)).powf(dim / 2.0) * volume;
    Ok(DensityReport::from_theta(
        "Einstein",
        theta,
        labelled(&[
            ("scalar_curvature", scalar_curvature),
            ("volume", volume),
            ("dimension", dim),
        ]),
    ))
}

/// Θ = 3(2χ + 3σ)/(2e²) − 2 c_min/(8πe)² for an Einstein metric conformal to an
/// extremal Kähler metric of Calabi energy `c_min`.
pub fn conformal_density(
    topo: TopologyInvariants,
    c_min: f64,
) -> Result<DensityReport, DensityError> {
    if !(c_min >= 0.0) {
        return Err(DensityError::NegativeCalabiEnergy(c_min));
    }
    let chi = topo.euler_characteristic as f64;
    let sigma = topo.signature as f64;
    let topological = 1.5 / (E * E) * (2.0 * chi + 3.0 * sigma);
    let theta = topological - 2.0 * c_min / (8.0 * PI * E).powi(2);
    if !(theta > 0.0) {
        return Err(DensityError::NonpositiveDensity(theta));
    }
    Ok(DensityReport::from_theta(
        "conformally Kähler Einstein",
        theta,
        labelled(&[("chi", chi), ("sigma", sigma), ("c_min", c_min)]),
    ))
}

/// Minimum Calabi energy together with the profile minimizer.
pub fn calabi_minimum(profile: &CalabiProfile) -> Result<(f64, MinimizationResult), DensityError> {
    let (lo, hi) = profile.bracket;
    let m = minimize_rational(&profile.rational, lo, hi, DEFAULT_SCALAR_TOL)?;
    Ok((profile.prefactor * m.value, m))
}

pub fn calabi_cmin(profile: &CalabiProfile) -> Result<f64, DensityError> {
    calabi_minimum(profile).map(|(c, _)| c)
}

/// `c ↦ ∫_P e^{−⟨Bs, x⟩} dx` in the reduced variables `s`, with `c = B s`.
pub struct PolytopeFunctional<'a> {
    polytope: &'a Polytope,
    basis: DMatrix<f64>,
}

impl<'a> PolytopeFunctional<'a> {
    /// Full coefficient space, `B = I`.
    pub fn full(polytope: &'a Polytope) -> Self {
        let d = polytope.dimension();
        PolytopeFunctional {
            polytope,
            basis: DMatrix::identity(d, d),
        }
    }

    /// The diagonal line `c = s · (1, …, 1)`.
    pub fn diagonal(polytope: &'a Polytope) -> Self {
        let d = polytope.dimension();
        PolytopeFunctional {
            polytope,
            basis: DMatrix::from_element(d, 1, 1.0),
        }
    }

    pub fn coefficients(&self, s: &DVector<f64>) -> DVector<f64> {
        &self.basis * s
    }

    /// The integrand exponent `−⟨c, x⟩`.
    fn form(&self, s: &DVector<f64>) -> LinearForm {
        LinearForm::new(self.coefficients(s).iter().map(|c| -c).collect())
    }
}

impl SmoothObjective for PolytopeFunctional<'_> {
    fn dim(&self) -> usize {
        self.basis.ncols()
    }

    fn value(&self, s: &DVector<f64>) -> f64 {
        polytope_exp_integral(self.polytope, &self.form(s))
    }

    fn evaluate(&self, s: &DVector<f64>) -> Evaluation {
        let d = self.polytope.dimension();
        let form = self.form(s);
        let value = polytope_exp_integral(self.polytope, &form);
        let grad_c = DVector::from_fn(d, |i, _| -polytope_moment1(self.polytope, &form, i));
        let mut hess_c = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let m = polytope_moment2(self.polytope, &form, i, j);
                hess_c[(i, j)] = m;
                hess_c[(j, i)] = m;
            }
        }
        let bt = self.basis.transpose();
        Evaluation {
            value,
            gradient: &bt * grad_c,
            hessian: &bt * hess_c * &self.basis,
        }
    }
}

/// The soliton potential coefficients and the minimization record.
pub fn solve_soliton_constant(
    prob: &SolitonProblem,
    tol: f64,
) -> Result<(LinearForm, MinimizationResult), DensityError> {
    let functional = if prob.symmetry_reduce {
        PolytopeFunctional::diagonal(&prob.polytope)
    } else {
        PolytopeFunctional::full(&prob.polytope)
    };
    let init = vec![0.0; functional.dim()];
    let result = minimize_convex_newton(&functional, &init, tol)?;
    let s = DVector::from_vec(result.argmin.clone());
    let coeffs = functional.coefficients(&s);
    Ok((LinearForm::new(coeffs.iter().copied().collect()), result))
}

/// The unique linear potential `f = ⟨c, x⟩` whose weighted first moments
/// `∫ x_i e^{−f}` vanish.
pub fn soliton_constant(prob: &SolitonProblem, tol: f64) -> Result<LinearForm, DensityError> {
    solve_soliton_constant(prob, tol).map(|(f, _)| f)
}

/// `∫_P e^{−β f} dx`.
fn weighted_integral(prob: &SolitonProblem, potential: &LinearForm, beta: f64) -> f64 {
    polytope_exp_integral(&prob.polytope, &potential.scaled(-beta))
}

/// Z(β) = (2πe)^{−n} ∫_M e^{−βf} dV, with the torus fibres contributing (2π)ⁿ.
pub fn soliton_z(
    prob: &SolitonProblem,
    potential: &LinearForm,
    beta: f64,
) -> Result<f64, DensityError> {
    if !(beta > 0.0) {
        return Err(DensityError::NonpositiveBeta(beta));
    }
    let n = prob.complex_dimension as i32;
    Ok(E.powi(-n) * weighted_integral(prob, potential, beta))
}

/// S(β) = log Z(β) + β ⟨f⟩_β, the mean taken against e^{−βf} dx.
pub fn soliton_s(
    prob: &SolitonProblem,
    potential: &LinearForm,
    beta: f64,
) -> Result<f64, DensityError> {
    let z = soliton_z(prob, potential, beta)?;
    let form = potential.scaled(-beta);
    let mass = polytope_exp_integral(&prob.polytope, &form);
    let first: f64 = potential
        .coefficients
        .iter()
        .enumerate()
        .map(|(i, c)| c * polytope_moment1(&prob.polytope, &form, i))
        .sum();
    let mean = first / mass + potential.offset;
    Ok(z.ln() + beta * mean)
}

/// soliton constant → Z(1) → ν = S(1) → Θ.
pub fn soliton_density(prob: &SolitonProblem, tol: f64) -> Result<DensityReport, DensityError> {
    let (potential, min) = solve_soliton_constant(prob, tol)?;
    let z1 = soliton_z(prob, &potential, 1.0)?;
    let nu = soliton_s(prob, &potential, 1.0)?;
    let mut inter = BTreeMap::new();
    for (i, c) in potential.coefficients.iter().enumerate() {
        inter.insert(format!("soliton_constant_{}", i + 1), *c);
    }
    inter.insert("min_integral".into(), min.value);
    inter.insert("Z1".into(), z1);
    inter.insert("log_Z1".into(), z1.ln());
    inter.insert("gradient_norm".into(), min.gradient_norm);
    inter.insert("newton_iterations".into(), min.iterations as f64);
    inter.insert("complex_dimension".into(), prob.complex_dimension as f64);
    Ok(DensityReport::from_nu("Kähler-Ricci soliton", nu, inter))
}

/// Pentagon closed form `(e^{2c} − 2 + (1 − c)e^{−c}) / c²` as displayed in the
/// literature for `∫_P e^{−c(x₁+x₂)}`.
pub fn pentagon_displayed_closed_form(c: f64) -> f64 {
    ((2.0 * c).exp() - 2.0 + (1.0 - c) * (-c).exp()) / (c * c)
}

/// Trapezium closed form as displayed in the literature,
/// `(e^{2c} − e^{−c} − 3c e^{−c}) / c²`. Its c → 0 limit is 4.5, not the area 4.
pub fn trapezium_displayed_closed_form(c: f64) -> f64 {
    ((2.0 * c).exp() - (-c).exp() - 3.0 * c * (-c).exp()) / (c * c)
}

/// `∫_T e^{−c(x₁+x₂)} = (e^{c}(c + 1) − e^{−c}(3c + 1)) / c²`, from slicing
/// T along x₁ + x₂ = s, where each slice has length proportional to s + 2.
pub fn trapezium_derived_closed_form(c: f64) -> f64 {
    (c.exp() * (c + 1.0) - (-c).exp() * (3.0 * c + 1.0)) / (c * c)
}

/// Comparison of the engine's integral with a displayed closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormDiagnostic {
    pub polytope: String,
    pub c: f64,
    pub engine_value: f64,
    pub displayed_value: f64,
    pub derived_value: Option<f64>,
    pub discrepancy: f64,
    pub flagged: bool,
}

impl ClosedFormDiagnostic {
    pub fn render(&self) -> String {
        let mut s = format!(
            "closed-form check ({}) at c = {:.6}: engine {:.6}, displayed {:.6}",
            self.polytope, self.c, self.engine_value, self.displayed_value
        );
        if let Some(d) = self.derived_value {
            s.push_str(&format!(", derived {d:.6}"));
        }
        if self.flagged {
            s.push_str(&format!(
                "; DISCREPANCY {:.6}: displayed closed form disagrees with the integral",
                self.discrepancy
            ));
        } else {
            s.push_str("; consistent");
        }
        s
    }
}

/// Diagnostic for the built-in pentagon and trapezium; `None` otherwise.
pub fn closed_form_diagnostic(prob: &SolitonProblem, c: f64) -> Option<ClosedFormDiagnostic> {
    let (name, displayed, derived) = if prob.polytope == polytope::pentagon() {
        ("pentagon", pentagon_displayed_closed_form(c), None)
    } else if prob.polytope == polytope::trapezium() {
        (
            "trapezium",
            trapezium_displayed_closed_form(c),
            Some(trapezium_derived_closed_form(c)),
        )
    } else {
        return None;
    };
    let engine = polytope_exp_integral(&prob.polytope, &LinearForm::diagonal(-c, 2));
    let discrepancy = (displayed - engine).abs();
    Some(ClosedFormDiagnostic {
        polytope: name.to_string(),
        c,
        engine_value: engine,
        displayed_value: displayed,
        derived_value: derived,
        discrepancy,
        flagged: discrepancy > 1e-6 * engine.abs().max(1.0),
    })
}

/// One row of the density table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub manifold: &'static str,
    pub metric_name: &'static str,
    pub metric_type: &'static str,
    pub report: DensityReport,
}

fn labelled_report(mut report: DensityReport, label: &str) -> DensityReport {
    report.metric_label = label.to_string();
    report
}

fn conformal_from_profile(
    topo: TopologyInvariants,
    profile: &CalabiProfile,
    label: &str,
) -> Result<DensityReport, DensityError> {
    let (c_min, m) = calabi_minimum(profile)?;
    let mut report = conformal_density(topo, c_min)?;
    report
        .intermediates
        .insert("profile_argmin".into(), m.argmin[0]);
    report.intermediates.insert("profile_min".into(), m.value);
    Ok(labelled_report(report, label))
}

/// Rows in order: Koiso-Cao, Page, Chen-LeBrun-Weber, Wang-Zhu.
pub fn paper_table_rows() -> Result<Vec<TableRow>, DensityError> {
    let kc = SolitonProblem::new(polytope::trapezium(), 2, true)?;
    let wz = SolitonProblem::new(polytope::pentagon(), 2, true)?;
    Ok(vec![
        TableRow {
            manifold: "CP2#-CP2",
            metric_name: "Koiso-Cao Soliton",
            metric_type: "Kähler-Ricci Soliton",
            report: labelled_report(
                soliton_density(&kc, DEFAULT_NEWTON_TOL)?,
                "Koiso-Cao soliton",
            ),
        },
        TableRow {
            manifold: "CP2#-CP2",
            metric_name: "Page metric",
            metric_type: "Einstein",
            report: conformal_from_profile(
                TopologyInvariants::ONE_POINT_BLOWUP,
                &CalabiProfile::page(),
                "Page metric",
            )?,
        },
        TableRow {
            manifold: "CP2#2(-CP2)",
            metric_name: "Chen-LeBrun-Weber metric",
            metric_type: "Einstein",
            report: conformal_from_profile(
                TopologyInvariants::TWO_POINT_BLOWUP,
                &CalabiProfile::clbw(),
                "Chen-LeBrun-Weber metric",
            )?,
        },
        TableRow {
            manifold: "CP2#2(-CP2)",
            metric_name: "Wang-Zhu Soliton",
            metric_type: "Kähler-Ricci Soliton",
            report: labelled_report(
                soliton_density(&wz, DEFAULT_NEWTON_TOL)?,
                "Wang-Zhu soliton",
            ),
        },
    ])
}

pub fn paper_table() -> Result<Vec<DensityReport>, DensityError> {
    Ok(paper_table_rows()?.into_iter().map(|r| r.report).collect())
}
