use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exterior::{dimension, KForm, MultiIndex, DIM};
use crate::scalar::{Rational, Scalar};

use super::poly::Polynomial;

pub type Point = [f64; DIM];
pub type PointFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
pub type PointFormFn = Arc<dyn Fn(&Point) -> Result<KForm<f64>> + Send + Sync>;

/// Coordinate names of a 6-dim chart; the first three are base coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    names: [String; DIM],
}

impl Chart {
    pub fn new(names: [&str; DIM]) -> Result<Self> {
        for i in 0..DIM {
            if names[..i].contains(&names[i]) {
                return Err(Error::Invalid(format!("duplicate coordinate name {}", names[i])));
            }
        }
        Ok(Self { names: names.map(String::from) })
    }

    /// `(q₁, q₂, q₃, p₁, p₂, p₃)`.
    pub fn darboux() -> Self {
        Self::new(["q1", "q2", "q3", "p1", "p2", "p3"]).unwrap()
    }

    /// `(x, y, z, p, q, h)`.
    pub fn contact() -> Self {
        Self::new(["x", "y", "z", "p", "q", "h"]).unwrap()
    }

    pub fn names(&self) -> &[String; DIM] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn base(&self) -> &[String] {
        &self.names[..3]
    }

    pub fn fiber(&self) -> &[String] {
        &self.names[3..]
    }
}

#[derive(Clone)]
pub enum CoefFn {
    Poly(Polynomial),
    BlackBox(PointFn),
}

impl CoefFn {
    pub fn eval(&self, x: &Point) -> f64 {
        match self {
            Self::Poly(p) => p.eval(x),
            Self::BlackBox(f) => f(x),
        }
    }

    pub fn as_poly(&self) -> Option<&Polynomial> {
        match self {
            Self::Poly(p) => Some(p),
            Self::BlackBox(_) => None,
        }
    }
}

impl fmt::Debug for CoefFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Poly(p) => write!(f, "{p:?}"),
            Self::BlackBox(_) => f.write_str("<black box>"),
        }
    }
}

#[derive(Clone)]
enum Repr {
    Coeffs(Vec<CoefFn>),
    Pointwise(PointFormFn),
}

/// A k-form field on a 6-dim chart.
#[derive(Clone)]
pub struct FormField {
    grade: usize,
    repr: Repr,
    serial: bool,
}

impl fmt::Debug for FormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Coeffs(c) => {
                let mut m = f.debug_map();
                for (idx, c) in MultiIndex::all(self.grade).zip(c) {
                    if !matches!(c, CoefFn::Poly(p) if p.is_zero()) {
                        m.entry(&idx, c);
                    }
                }
                m.finish()
            }
            Repr::Pointwise(_) => write!(f, "<pointwise {}-form>", self.grade),
        }
    }
}

impl FormField {
    pub fn from_coeffs(grade: usize, coeffs: Vec<CoefFn>) -> Result<Self> {
        if grade > DIM {
            return Err(Error::GradeTooHigh { got: grade, max: DIM });
        }
        if coeffs.len() != dimension(grade) {
            return Err(Error::Invalid(format!("{} coefficients for grade {grade}", coeffs.len())));
        }
        Ok(Self { grade, repr: Repr::Coeffs(coeffs), serial: false })
    }

    pub fn from_polys(grade: usize, polys: Vec<Polynomial>) -> Result<Self> {
        Self::from_coeffs(grade, polys.into_iter().map(CoefFn::Poly).collect())
    }

    pub fn zero(grade: usize) -> Self {
        Self::from_polys(grade, vec![Polynomial::zero(); dimension(grade)]).unwrap()
    }

    /// A constant-coefficient field.
    pub fn constant(w: &KForm<Rational>) -> Self {
        Self::from_polys(w.grade(), w.coeffs().iter().map(|c| Polynomial::constant(c.clone())).collect()).unwrap()
    }

    /// A field given by a pointwise evaluator.
    pub fn from_pointwise(grade: usize, f: impl Fn(&Point) -> Result<KForm<f64>> + Send + Sync + 'static) -> Self {
        Self { grade, repr: Repr::Pointwise(Arc::new(f)), serial: false }
    }

    /// `c(x)·ω` for a scalar function c.
    pub fn scaled_by(&self, c: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        let inner = self.clone();
        let mut out = Self::from_pointwise(self.grade, move |x| Ok(inner.eval(x)?.scale(&c(x))));
        out.serial = self.serial;
        out
    }

    /// Marks the evaluator as unsafe for concurrent use; samplers then run
    /// serially.
    pub fn serial(mut self) -> Self {
        self.serial = true;
        self
    }

    pub fn is_serial(&self) -> bool {
        self.serial
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn coeffs(&self) -> Option<&[CoefFn]> {
        match &self.repr {
            Repr::Coeffs(c) => Some(c),
            Repr::Pointwise(_) => None,
        }
    }

    /// Polynomial coefficients, when every coefficient is a polynomial.
    pub fn polys(&self) -> Option<Vec<&Polynomial>> {
        self.coeffs()?.iter().map(CoefFn::as_poly).collect()
    }

    pub fn eval(&self, x: &Point) -> Result<KForm<f64>> {
        let w = match &self.repr {
            Repr::Coeffs(c) => KForm::from_coeffs(self.grade, c.iter().map(|c| c.eval(x)).collect())?,
            Repr::Pointwise(f) => f(x)?,
        };
        if w.grade() != self.grade {
            return Err(Error::WrongGrade { expected: self.grade, got: w.grade() });
        }
        if w.coeffs().iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("non-finite coefficient at {x:?}")));
        }
        Ok(w)
    }

    /// Exact value at a rational point; polynomial fields only.
    pub fn eval_exact(&self, x: &[Rational; DIM]) -> Result<KForm<Rational>> {
        let polys = self.polys().ok_or(Error::NotPolynomial)?;
        KForm::from_coeffs(self.grade, polys.iter().map(|p| p.eval_exact(x)).collect())
    }
}

/// `dx_j ∧ e_I = sign · e_J`, tabulated as `(J position, sign)`.
fn d_basis(j: usize, idx: MultiIndex) -> Option<(usize, i64)> {
    let one = KForm::<Rational>::monomial(&[j]);
    let form = KForm::<Rational>::monomial(&idx.indices());
    let w = one.wedge(&form).ok()?;
    let found = w.terms().find(|(_, c)| !c.is_zero()).map(|(m, c)| (m.position(), c.to_f64() as i64));
    found
}

/// Exact exterior derivative of a polynomial field.
pub fn d_exact(w: &FormField) -> Result<FormField> {
    let polys = w.polys().ok_or(Error::NotPolynomial)?;
    let k = w.grade();
    if k == DIM {
        return Ok(FormField::zero(DIM));
    }
    let mut out = vec![Polynomial::zero(); dimension(k + 1)];
    for (idx, p) in MultiIndex::all(k).zip(&polys) {
        for j in 0..DIM {
            let Some((pos, sign)) = d_basis(j, idx) else { continue };
            let dp = p.derivative(j);
            out[pos] = &out[pos] + &dp.scale(&Rational::from_integer(sign.into()));
        }
    }
    FormField::from_polys(k + 1, out)
}

/// Central-difference exterior derivative at x.
pub fn d_numeric(w: &FormField, x: &Point, h: f64) -> Result<KForm<f64>> {
    let k = w.grade();
    if k == DIM {
        return Ok(KForm::zero(DIM));
    }
    let mut out = KForm::zero(k + 1);
    for j in 0..DIM {
        let mut xp = *x;
        let mut xm = *x;
        xp[j] += h;
        xm[j] -= h;
        let deriv = (w.eval(&xp)? - w.eval(&xm)?).scale(&(0.5 / h));
        out = out + KForm::<f64>::monomial(&[j]).wedge(&deriv)?;
    }
    Ok(out)
}

/// The field `x ↦ d_numeric(w, x, h)`.
pub fn d_numeric_field(w: &FormField, h: f64) -> FormField {
    let inner = w.clone();
    let mut out = FormField::from_pointwise(w.grade() + 1, move |x| d_numeric(&inner, x, h));
    out.serial = w.serial;
    out
}

/// Axis-aligned box in `n` dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| !(a <= b)) {
            return Err(Error::Invalid("box bounds must satisfy lo ≤ hi componentwise".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self { lo: vec![lo; dim], hi: vec![hi; dim] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// `n` uniform points from a ChaCha8 stream seeded with `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                self.lo.iter().zip(&self.hi).map(|(a, b)| if a == b { *a } else { rng.random_range(*a..*b) }).collect()
            })
            .collect()
    }

    pub fn sample6(&self, n: usize, seed: u64) -> Result<Vec<Point>> {
        self.sample_fixed(n, seed)
    }

    pub fn sample3(&self, n: usize, seed: u64) -> Result<Vec<[f64; 3]>> {
        self.sample_fixed(n, seed)
    }

    fn sample_fixed<const N: usize>(&self, n: usize, seed: u64) -> Result<Vec<[f64; N]>> {
        if self.dim() != N {
            return Err(Error::Invalid(format!("expected a {N}-dim box, got {}", self.dim())));
        }
        Ok(self.sample(n, seed).into_iter().map(|v| std::array::from_fn(|i| v[i])).collect())
    }
}

/// Evaluates `f` at every point, in parallel unless `serial`, keeping order.
pub fn map_points<P: Sync, T: Send>(points: &[P], serial: bool, f: impl Fn(&P) -> T + Send + Sync) -> Vec<T> {
    use rayon::prelude::*;
    if serial {
        points.iter().map(f).collect()
    } else {
        points.par_iter().map(f).collect()
    }
}
