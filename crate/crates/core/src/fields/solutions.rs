use std::sync::Arc;

use nalgebra::{Matrix3, SMatrix};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{KForm, Vector6, DIM};
use crate::scalar::{Rational, Scalar};
use crate::symplectic::SymplecticSpace;

use super::form::{map_points, FormField, Point};
use super::poly::Polynomial;

pub type Point3 = [f64; 3];
pub type ValueFn = Arc<dyn Fn(&Point3) -> Result<f64> + Send + Sync>;
pub type GradFn = Arc<dyn Fn(&Point3) -> Result<Point3> + Send + Sync>;

/// Default finite-difference step.
pub const DEFAULT_H: f64 = 1e-4;
/// Default tolerance for solution checks.
pub const DEFAULT_SOLUTION_TOL: f64 = 1e-6;

fn finite(v: f64, x: &Point3) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("non-finite value at {x:?}")))
    }
}

/// A function f: ℝ³ → ℝ with access to its first and second derivatives.
#[derive(Clone)]
pub enum SectionMap {
    /// Polynomial in the first three variables; derivatives exact.
    Poly(Polynomial),
    /// Evaluator with an optional closed-form gradient. Missing derivatives
    /// come from central differences.
    BlackBox { value: ValueFn, gradient: Option<GradFn> },
}

impl std::fmt::Debug for SectionMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Poly(p) => write!(f, "SectionMap({p:?})"),
            Self::BlackBox { gradient, .. } => write!(f, "SectionMap(<black box>, gradient: {})", gradient.is_some()),
        }
    }
}

fn lift(x: &Point3) -> Point {
    [x[0], x[1], x[2], 0.0, 0.0, 0.0]
}

impl SectionMap {
    pub fn poly(p: Polynomial) -> Result<Self> {
        if p.terms().any(|(e, _)| e[3..].iter().any(|&k| k > 0)) {
            return Err(Error::Invalid("section polynomials use only the first three variables".into()));
        }
        Ok(Self::Poly(p))
    }

    pub fn black_box(value: impl Fn(&Point3) -> Result<f64> + Send + Sync + 'static, gradient: Option<GradFn>) -> Self {
        Self::BlackBox { value: Arc::new(value), gradient }
    }

    pub fn value(&self, x: &Point3) -> Result<f64> {
        match self {
            Self::Poly(p) => Ok(p.eval(&lift(x))),
            Self::BlackBox { value, .. } => finite(value(x)?, x),
        }
    }

    pub fn gradient(&self, x: &Point3, h: f64) -> Result<Point3> {
        match self {
            Self::Poly(p) => Ok(std::array::from_fn(|i| p.derivative(i).eval(&lift(x)))),
            Self::BlackBox { gradient: Some(g), .. } => {
                let v = g(x)?;
                for c in v {
                    finite(c, x)?;
                }
                Ok(v)
            }
            Self::BlackBox { .. } => {
                let mut g = [0.0; 3];
                for (j, gj) in g.iter_mut().enumerate() {
                    let (xp, xm) = shifted(x, j, h);
                    *gj = (self.value(&xp)? - self.value(&xm)?) / (2.0 * h);
                }
                Ok(g)
            }
        }
    }

    /// Hessian. With a gradient available it is differenced once with step
    /// h; from values alone it uses second differences with the larger step
    /// `max(h, 0.1·√h)` to keep rounding error below truncation error.
    pub fn hessian(&self, x: &Point3, h: f64) -> Result<[[f64; 3]; 3]> {
        match self {
            Self::Poly(p) => {
                Ok(std::array::from_fn(|i| std::array::from_fn(|j| p.derivative(i).derivative(j).eval(&lift(x)))))
            }
            Self::BlackBox { gradient: Some(_), .. } => {
                let mut hm = [[0.0; 3]; 3];
                for j in 0..3 {
                    let (xp, xm) = shifted(x, j, h);
                    let (gp, gm) = (self.gradient(&xp, h)?, self.gradient(&xm, h)?);
                    for i in 0..3 {
                        hm[i][j] = (gp[i] - gm[i]) / (2.0 * h);
                    }
                }
                symmetrize(&mut hm);
                Ok(hm)
            }
            Self::BlackBox { .. } => {
                let s = h.max(0.1 * h.sqrt());
                let f0 = self.value(x)?;
                let mut hm = [[0.0; 3]; 3];
                for i in 0..3 {
                    let (xp, xm) = shifted(x, i, s);
                    hm[i][i] = (self.value(&xp)? - 2.0 * f0 + self.value(&xm)?) / (s * s);
                    for j in i + 1..3 {
                        let corner = |si: f64, sj: f64| {
                            let mut y = *x;
                            y[i] += si * s;
                            y[j] += sj * s;
                            self.value(&y)
                        };
                        let v = (corner(1.0, 1.0)? - corner(1.0, -1.0)? - corner(-1.0, 1.0)? + corner(-1.0, -1.0)?)
                            / (4.0 * s * s);
                        hm[i][j] = v;
                        hm[j][i] = v;
                    }
                }
                Ok(hm)
            }
        }
    }
}

fn shifted(x: &Point3, j: usize, h: f64) -> (Point3, Point3) {
    let mut xp = *x;
    let mut xm = *x;
    xp[j] += h;
    xm[j] -= h;
    (xp, xm)
}

fn symmetrize(m: &mut [[f64; 3]; 3]) {
    for i in 0..3 {
        for j in i + 1..3 {
            let v = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
}

/// Tangent vectors `e_j + Σ_i H_ij e_{3+i}` of the graph of df.
fn graph_tangents<S: Scalar>(hess: &[[S; 3]; 3]) -> [Vector6<S>; 3] {
    std::array::from_fn(|j| {
        Vector6::from_fn(|a| {
            if a < 3 {
                if a == j {
                    S::one()
                } else {
                    S::zero()
                }
            } else {
                hess[a - 3][j].clone()
            }
        })
    })
}

/// `Δ_ω(f)` at base point x: the dx₁∧dx₂∧dx₃ coefficient of `(df)*ω`.
pub fn ma_operator(w: &FormField, f: &SectionMap, x: &Point3, h: f64) -> Result<f64> {
    if w.grade() != 3 {
        return Err(Error::WrongGrade { expected: 3, got: w.grade() });
    }
    let p = f.gradient(x, h)?;
    let form = w.eval(&[x[0], x[1], x[2], p[0], p[1], p[2]])?;
    form.evaluate(&graph_tangents(&f.hessian(x, h)?))
}

/// `Δ_ω(f)` for a constant form and `f = ½xᵀHx` (H symmetric), exactly.
pub fn ma_operator_quadratic(w: &KForm<Rational>, hess: &[[Rational; 3]; 3]) -> Result<Rational> {
    if w.grade() != 3 {
        return Err(Error::WrongGrade { expected: 3, got: w.grade() });
    }
    w.evaluate(&graph_tangents(hess))
}

pub type ParamFn = Arc<dyn Fn(&Point3) -> Result<Point> + Send + Sync>;
pub type ParamJacFn = Arc<dyn Fn(&Point3) -> Result<[Vector6<f64>; 3]> + Send + Sync>;

/// A parametrized 3-dim submanifold of ℝ⁶.
#[derive(Clone)]
pub struct Submanifold3 {
    map: ParamFn,
    jacobian: Option<ParamJacFn>,
}

impl std::fmt::Debug for Submanifold3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Submanifold3(analytic jacobian: {})", self.jacobian.is_some())
    }
}

impl Submanifold3 {
    pub fn new(map: impl Fn(&Point3) -> Result<Point> + Send + Sync + 'static) -> Self {
        Self { map: Arc::new(map), jacobian: None }
    }

    pub fn with_jacobian(mut self, j: impl Fn(&Point3) -> Result<[Vector6<f64>; 3]> + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(j));
        self
    }

    /// The graph `u ↦ (u, ∇f(u))` of df.
    pub fn graph_of_gradient(f: SectionMap, h: f64) -> Self {
        let g = f.clone();
        Self::new(move |u| {
            let p = g.gradient(u, h)?;
            Ok([u[0], u[1], u[2], p[0], p[1], p[2]])
        })
        .with_jacobian(move |u| Ok(graph_tangents(&f.hessian(u, h)?)))
    }

    pub fn point(&self, u: &Point3) -> Result<Point> {
        let p = (self.map)(u)?;
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite point at {u:?}")));
        }
        Ok(p)
    }

    /// Tangent vectors ∂/∂u_j.
    pub fn tangents(&self, u: &Point3, h: f64) -> Result<[Vector6<f64>; 3]> {
        if let Some(j) = &self.jacobian {
            return j(u);
        }
        let mut out: [Vector6<f64>; 3] = std::array::from_fn(|_| Vector6::zero());
        for (j, t) in out.iter_mut().enumerate() {
            let (up, um) = shifted(u, j, h);
            let (pp, pm) = (self.point(&up)?, self.point(&um)?);
            *t = Vector6::from_fn(|i| (pp[i] - pm[i]) / (2.0 * h));
        }
        Ok(out)
    }

    /// Rank of the Jacobian, judged by the ratio of extreme singular values.
    pub fn rank(&self, u: &Point3, h: f64) -> Result<usize> {
        let t = self.tangents(u, h)?;
        let m = SMatrix::<f64, DIM, 3>::from_fn(|i, j| t[j][i]);
        let sv = m.singular_values();
        let top = sv.max();
        Ok(sv.iter().filter(|s| **s > 1e-8 * top.max(1e-300)).count())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneralizedSolutionReport {
    pub checked: usize,
    /// Indices of parameter points dropped for rank deficiency or domain errors.
    pub excluded: Vec<usize>,
    pub lagrangian_residual: f64,
    pub omega_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks that L is Lagrangian for Ω and that ω vanishes on it.
pub fn check_generalized_solution(
    l: &Submanifold3,
    w: &FormField,
    s: &SymplecticSpace<f64>,
    params: &[Point3],
    h: f64,
    tol: f64,
) -> Result<GeneralizedSolutionReport> {
    if w.grade() != 3 {
        return Err(Error::WrongGrade { expected: 3, got: w.grade() });
    }
    let per_point = map_points(params, w.is_serial(), |u| -> Result<Option<(f64, f64)>> {
        if l.rank(u, h)? < 3 {
            return Ok(None);
        }
        let t = l.tangents(u, h)?;
        let mut lag = 0.0f64;
        for i in 0..3 {
            for j in i + 1..3 {
                lag = lag.max(s.eval(&t[i], &t[j]).abs());
            }
        }
        let om = w.eval(&l.point(u)?)?.evaluate(&t)?.abs();
        Ok(Some((lag, om)))
    });
    let mut rep = GeneralizedSolutionReport {
        checked: 0,
        excluded: Vec::new(),
        lagrangian_residual: 0.0,
        omega_residual: 0.0,
        tol,
        pass: false,
    };
    for (i, r) in per_point.into_iter().enumerate() {
        match r {
            Ok(Some((lag, om))) => {
                rep.checked += 1;
                rep.lagrangian_residual = rep.lagrangian_residual.max(lag);
                rep.omega_residual = rep.omega_residual.max(om);
            }
            Ok(None) | Err(Error::Domain(_)) => rep.excluded.push(i),
            Err(e) => return Err(e),
        }
    }
    rep.pass = rep.checked > 0 && rep.lagrangian_residual <= tol && rep.omega_residual <= tol;
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularSolutionReport {
    pub checked: usize,
    pub excluded: Vec<usize>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// `|Δ_ω(f)| ≤ tol` at each base point.
pub fn check_regular_solution(
    w: &FormField,
    f: &SectionMap,
    points: &[Point3],
    h: f64,
    tol: f64,
) -> Result<RegularSolutionReport> {
    let vals = map_points(points, w.is_serial(), |x| ma_operator(w, f, x, h));
    let mut rep = RegularSolutionReport { checked: 0, excluded: Vec::new(), max_residual: 0.0, tol, pass: false };
    for (i, v) in vals.into_iter().enumerate() {
        match v {
            Ok(v) => {
                rep.checked += 1;
                rep.max_residual = rep.max_residual.max(v.abs());
            }
            Err(Error::Domain(_)) => rep.excluded.push(i),
            Err(e) => return Err(e),
        }
    }
    rep.pass = rep.checked > 0 && rep.max_residual <= tol;
    Ok(rep)
}

/// `det` of a 3×3 Hessian, for hess(f) = 1 checks.
pub fn hessian_det(hm: &[[f64; 3]; 3]) -> f64 {
    Matrix3::from_fn(|i, j| hm[i][j]).determinant()
}
