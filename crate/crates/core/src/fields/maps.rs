use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exterior::{dimension, KForm, MultiIndex, DIM};
use crate::linalg::LinearMap6;
use crate::scalar::{Rational, Scalar};
use crate::symplectic::SymplecticSpace;

use super::form::{FormField, Point};
use super::poly::Polynomial;

pub type MapFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;
pub type JacFn = Arc<dyn Fn(&Point) -> LinearMap6<f64> + Send + Sync>;

/// A map ℝ⁶ → ℝ⁶. Affine maps are handled exactly.
#[derive(Clone)]
pub enum DiffeoMap {
    /// `x ↦ Ax + b`.
    Affine {
        a: LinearMap6<Rational>,
        b: [Rational; DIM],
    },
    Function {
        map: MapFn,
        jacobian: Option<JacFn>,
    },
}

impl std::fmt::Debug for DiffeoMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Affine { a, b } => f.debug_struct("Affine").field("a", a).field("b", b).finish(),
            Self::Function { jacobian, .. } => write!(f, "Function(analytic jacobian: {})", jacobian.is_some()),
        }
    }
}

impl DiffeoMap {
    pub fn identity() -> Self {
        Self::linear(LinearMap6::identity())
    }

    pub fn linear(a: LinearMap6<Rational>) -> Self {
        Self::Affine { a, b: std::array::from_fn(|_| Rational::from_i64(0)) }
    }

    pub fn function(map: impl Fn(&Point) -> Point + Send + Sync + 'static, jacobian: Option<JacFn>) -> Self {
        Self::Function { map: Arc::new(map), jacobian }
    }

    pub fn apply(&self, x: &Point) -> Point {
        match self {
            Self::Affine { a, b } => {
                let af = a.to_f64();
                std::array::from_fn(|i| (0..DIM).map(|j| af.m[i][j] * x[j]).sum::<f64>() + b[i].to_f64())
            }
            Self::Function { map, .. } => map(x),
        }
    }

    /// Dφ at x; central differences with step h when no Jacobian is known.
    pub fn jacobian(&self, x: &Point, h: f64) -> LinearMap6<f64> {
        match self {
            Self::Affine { a, .. } => a.to_f64(),
            Self::Function { jacobian: Some(j), .. } => j(x),
            Self::Function { map, .. } => {
                let mut jac = LinearMap6::zero();
                for j in 0..DIM {
                    let mut xp = *x;
                    let mut xm = *x;
                    xp[j] += h;
                    xm[j] -= h;
                    let (fp, fm) = (map(&xp), map(&xm));
                    for i in 0..DIM {
                        jac.m[i][j] = (fp[i] - fm[i]) / (2.0 * h);
                    }
                }
                jac
            }
        }
    }

    /// Inverse of an affine map.
    pub fn inverse_affine(&self) -> Result<Self> {
        let Self::Affine { a, b } = self else {
            return Err(Error::Invalid("only affine maps are inverted exactly".into()));
        };
        let ai = a.inverse()?;
        let bv = crate::exterior::Vector6(b.clone());
        let shift = ai.apply(&bv);
        Ok(Self::Affine { a: ai, b: std::array::from_fn(|i| -shift[i].clone()) })
    }

    /// `self ∘ other` for affine maps.
    pub fn compose_affine(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Self::Affine { a, b }, Self::Affine { a: a2, b: b2 }) => {
                let shift = a.apply(&crate::exterior::Vector6(b2.clone()));
                Ok(Self::Affine { a: a.compose(a2), b: std::array::from_fn(|i| shift[i].clone() + b[i].clone()) })
            }
            _ => Err(Error::Invalid("only affine maps are composed exactly".into())),
        }
    }
}

/// `(φ*ω)_x = (Dφ_x)* ω_{φ(x)}`.
pub fn pullback_map(phi: &DiffeoMap, w: &FormField, x: &Point, h: f64) -> Result<KForm<f64>> {
    let jac = phi.jacobian(x, h);
    if jac.det().abs() <= 1e-12 * (1.0 + jac.max_abs()).powi(DIM as i32) {
        return Err(Error::Singular);
    }
    Ok(w.eval(&phi.apply(x))?.pullback(&jac))
}

/// Symbolic pullback of a polynomial field by an affine map.
pub fn pullback_affine(phi: &DiffeoMap, w: &FormField) -> Result<FormField> {
    let DiffeoMap::Affine { a, b } = phi else {
        return Err(Error::Invalid("symbolic pullback needs an affine map".into()));
    };
    let polys = w.polys().ok_or(Error::NotPolynomial)?;
    let k = w.grade();
    let mut out = vec![Polynomial::zero(); dimension(k)];
    for (idx, p) in MultiIndex::all(k).zip(polys) {
        if p.is_zero() {
            continue;
        }
        let moved = p.compose_affine(a, b);
        let basis = KForm::<Rational>::monomial(&idx.indices()).pullback(a);
        for (pos, c) in basis.coeffs().iter().enumerate() {
            if !c.is_zero() {
                out[pos] = &out[pos] + &moved.scale(c);
            }
        }
    }
    FormField::from_polys(k, out)
}

/// φ*Ω = Ω at every sample point, within `tol`.
pub fn is_symplectomorphism(phi: &DiffeoMap, s: &SymplecticSpace<f64>, points: &[Point], tol: f64, h: f64) -> bool {
    let om = FormField::from_pointwise(2, {
        let o = s.omega().clone();
        move |_| Ok(o.clone())
    });
    points.iter().all(|x| match pullback_map(phi, &om, x, h) {
        Ok(p) => p.approx_eq(s.omega(), tol),
        Err(_) => false,
    })
}

/// Exact version for affine maps: `AᵀWA = W`.
pub fn is_symplectomorphism_exact(phi: &DiffeoMap, s: &SymplecticSpace<Rational>) -> Result<bool> {
    let DiffeoMap::Affine { a, .. } = phi else {
        return Err(Error::Invalid("exact check needs an affine map".into()));
    };
    Ok(&s.omega().pullback(a) == s.omega())
}
