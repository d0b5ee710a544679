use nalgebra::DMatrix;
use serde::Serialize;

use crate::classifier::Regime;
use crate::error::{Error, Result};
use crate::exterior::{KForm, DIM};
use crate::hitchin::{dual_form, pfaffian, split_pair};
use crate::invariants::q_form;
use crate::scalar::ComplexScalar;
use crate::symplectic::SymplecticSpace;

use super::form::{d_numeric, map_points, FormField, Point};
use super::metric::MetricField;

/// Points with `|λ| < 1e-8·(1 + max|coeff|)⁴` count as degenerate.
pub fn degeneracy_threshold(max_coeff: f64) -> f64 {
    1e-8 * (1.0 + max_coeff).powi(4)
}

fn check_grade3(w: &FormField) -> Result<()> {
    if w.grade() == 3 {
        Ok(())
    } else {
        Err(Error::WrongGrade { expected: 3, got: w.grade() })
    }
}

pub fn lambda_field(w: &FormField, s: &SymplecticSpace<f64>, x: &Point) -> Result<f64> {
    check_grade3(w)?;
    pfaffian(&w.eval(x)?, s.theta())
}

fn normalize(form: &KForm<f64>, s: &SymplecticSpace<f64>) -> Result<KForm<f64>> {
    let lambda = pfaffian(form, s.theta())?;
    if lambda.abs() < degeneracy_threshold(form.max_abs()) {
        return Err(Error::Degenerate);
    }
    Ok(form.scale(&lambda.abs().powf(-0.25)))
}

/// `ω(x)/|λ(x)|^{1/4}`.
pub fn normalized_field(w: &FormField, s: &SymplecticSpace<f64>, x: &Point) -> Result<KForm<f64>> {
    check_grade3(w)?;
    normalize(&w.eval(x)?, s)
}

/// `ω̂(x)/|λ(x)|^{1/4}`, which equals the dual of the normalized form.
pub fn dual_field(w: &FormField, s: &SymplecticSpace<f64>, x: &Point) -> Result<KForm<f64>> {
    dual_form(&normalized_field(w, s, x)?, s.theta())
}

fn pointwise(
    w: &FormField,
    s: &SymplecticSpace<f64>,
    f: fn(&FormField, &SymplecticSpace<f64>, &Point) -> Result<KForm<f64>>,
) -> FormField {
    let (w2, s2) = (w.clone(), s.clone());
    let out = FormField::from_pointwise(3, move |x| f(&w2, &s2, x));
    if w.is_serial() {
        out.serial()
    } else {
        out
    }
}

/// Regime shared by all non-degenerate sample points, plus the skipped ones.
pub fn regime_scan(w: &FormField, s: &SymplecticSpace<f64>, points: &[Point]) -> Result<(Regime, Vec<usize>)> {
    check_grade3(w)?;
    let signs = map_points(points, w.is_serial(), |x| -> Result<i32> {
        let form = w.eval(x)?;
        let lambda = pfaffian(&form, s.theta())?;
        Ok(if lambda.abs() < degeneracy_threshold(form.max_abs()) {
            0
        } else if lambda > 0.0 {
            1
        } else {
            -1
        })
    });
    let mut skipped = Vec::new();
    let mut seen = 0;
    for (i, sg) in signs.into_iter().enumerate() {
        match sg? {
            0 => skipped.push(i),
            v if seen == 0 => seen = v,
            v if v != seen => return Err(Error::BranchChange),
            _ => {}
        }
    }
    let regime = match seen {
        1 => Regime::Hyperbolic,
        -1 => Regime::Elliptic,
        _ => Regime::Degenerate,
    };
    Ok((regime, skipped))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosednessReport {
    pub regime: Regime,
    pub checked: usize,
    pub skipped: Vec<usize>,
    pub normalized_residual: f64,
    pub dual_residual: f64,
    pub h: f64,
    pub tol: f64,
    pub pass: bool,
}

fn max_d(field: &FormField, x: &Point, h: f64) -> Result<f64> {
    Ok(d_numeric(field, x, h)?.max_abs())
}

/// `d(ω/|λ|^{1/4}) = 0` and `d(ω̂/|λ|^{1/4}) = 0` at the sample points.
pub fn closedness_check(
    w: &FormField,
    s: &SymplecticSpace<f64>,
    points: &[Point],
    h: f64,
    tol: f64,
) -> Result<ClosednessReport> {
    let (regime, skipped) = regime_scan(w, s, points)?;
    if regime == Regime::Degenerate {
        return Err(Error::Degenerate);
    }
    let nf = pointwise(w, s, normalized_field);
    let df = pointwise(w, s, dual_field);
    let active: Vec<Point> = points.iter().enumerate().filter(|(i, _)| !skipped.contains(i)).map(|(_, p)| *p).collect();
    let res =
        map_points(&active, w.is_serial(), |x| -> Result<(f64, f64)> { Ok((max_d(&nf, x, h)?, max_d(&df, x, h)?)) });
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for r in res {
        let (ra, rb) = r?;
        a = a.max(ra);
        b = b.max(rb);
    }
    Ok(ClosednessReport {
        regime,
        checked: active.len(),
        skipped,
        normalized_residual: a,
        dual_residual: b,
        h,
        tol,
        pass: a <= tol && b <= tol,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegrabilityReport {
    pub regime: Regime,
    pub checked: usize,
    pub skipped: Vec<usize>,
    pub alpha_residual: f64,
    pub beta_residual: f64,
    /// `(α∧β)/Ω³` at the first point, as `[re, im]`.
    pub ratio: [f64; 2],
    pub ratio_spread: f64,
    pub integrable: bool,
    pub closed: bool,
    /// The two verdicts coincide.
    pub agrees: bool,
    pub h: f64,
    pub tol: f64,
}

fn piece_fields(w: &FormField, s: &SymplecticSpace<f64>) -> [FormField; 4] {
    let make = |which: usize| {
        let (w2, s2) = (w.clone(), s.clone());
        let f = FormField::from_pointwise(3, move |x| {
            let split = split_pair(&normalized_field(&w2, &s2, x)?, s2.theta())?;
            let (a, b) = split.pieces();
            Ok(match which {
                0 => a.re,
                1 => a.im,
                2 => b.re,
                _ => b.im,
            })
        });
        if w.is_serial() {
            f.serial()
        } else {
            f
        }
    };
    [make(0), make(1), make(2), make(3)]
}

/// `dα = dβ = 0` for the split of the normalized form, constancy of
/// `(α∧β)/Ω³`, and agreement with [`closedness_check`].
pub fn gcy_integrability_check(
    w: &FormField,
    s: &SymplecticSpace<f64>,
    points: &[Point],
    h: f64,
    tol: f64,
) -> Result<IntegrabilityReport> {
    let closed = closedness_check(w, s, points, h, tol)?;
    let skipped = closed.skipped.clone();
    let active: Vec<Point> = points.iter().enumerate().filter(|(i, _)| !skipped.contains(i)).map(|(_, p)| *p).collect();
    let pieces = piece_fields(w, s);
    let om3 = *s.omega().wedge(s.omega())?.wedge(s.omega())?.top();
    let res = map_points(&active, w.is_serial(), |x| -> Result<(f64, f64, ComplexScalar<f64>)> {
        let d: Vec<f64> = pieces.iter().map(|f| max_d(f, x, h)).collect::<Result<_>>()?;
        let split = split_pair(&normalized_field(w, s, x)?, s.theta())?;
        let (a, b) = split.pieces();
        let ratio = a.wedge(&b)?.top().checked_div(&ComplexScalar::real(om3))?;
        Ok((d[0].max(d[1]), d[2].max(d[3]), ratio))
    });
    let (mut da, mut db, mut spread) = (0.0f64, 0.0f64, 0.0f64);
    let mut first: Option<ComplexScalar<f64>> = None;
    for r in res {
        let (a, b, ratio) = r?;
        da = da.max(a);
        db = db.max(b);
        match &first {
            None => first = Some(ratio),
            Some(r0) => spread = spread.max(ratio.sub(r0).norm_sqr().sqrt()),
        }
    }
    let integrable = da <= tol && db <= tol && spread <= tol;
    let r0 = first.unwrap_or(ComplexScalar::real(0.0));
    Ok(IntegrabilityReport {
        regime: closed.regime,
        checked: active.len(),
        skipped,
        alpha_residual: da,
        beta_residual: db,
        ratio: [r0.re, r0.im],
        ratio_spread: spread,
        integrable,
        closed: closed.pass,
        agrees: integrable == closed.pass,
        h,
        tol,
    })
}

/// `q_ω` of the normalized form as a metric on the 6-dim chart.
pub fn q_metric(w: &FormField, s: &SymplecticSpace<f64>) -> MetricField {
    let (w2, s2) = (w.clone(), s.clone());
    MetricField::new(DIM, move |x| {
        let p: Point = std::array::from_fn(|i| x[i]);
        let q = q_form(&normalized_field(&w2, &s2, &p)?, &s2)?;
        Ok(DMatrix::from_fn(DIM, DIM, |i, j| q.m.m[i][j]))
    })
}
