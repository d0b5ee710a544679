//! Orbit classification of effective 3-forms and the pointwise generalized
//! almost Calabi-Yau data of a nondegenerate form.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::KForm;
use crate::hitchin::{
    float_tolerance, hitchin_k, is_decomposable, is_decomposable_complex, pfaffian, split_pair, SplitPair,
};
use crate::invariants::{in_sp3, in_sp3_tol, omega_k_form, q_form, signature, QuadForm6, Signature};
use crate::linalg::LinearMap6;
use crate::scalar::{ComplexScalar, Scalar};
use crate::symplectic::SymplecticSpace;

/// The nine rows of the classification table, in table order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum OrbitClass {
    /// hess f = 1
    HessianOne,
    /// Δf − hess f = 0
    SpecialLagrangianElliptic,
    /// □f + hess f = 0
    SpecialLagrangianHyperbolic,
    /// Δf = 0
    Laplace,
    /// □f = 0
    Wave,
    Laplace2D,
    Wave2D,
    /// ∂²f/∂q₁² = 0
    SecondDerivative,
    Zero,
}

impl OrbitClass {
    pub const ALL: [OrbitClass; 9] = [
        Self::HessianOne,
        Self::SpecialLagrangianElliptic,
        Self::SpecialLagrangianHyperbolic,
        Self::Laplace,
        Self::Wave,
        Self::Laplace2D,
        Self::Wave2D,
        Self::SecondDerivative,
        Self::Zero,
    ];

    /// 1-based table row.
    pub fn row(self) -> usize {
        Self::ALL.iter().position(|c| *c == self).unwrap() + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::HessianOne => "HessianOne",
            Self::SpecialLagrangianElliptic => "SpecialLagrangianElliptic",
            Self::SpecialLagrangianHyperbolic => "SpecialLagrangianHyperbolic",
            Self::Laplace => "Laplace",
            Self::Wave => "Wave",
            Self::Laplace2D => "Laplace2D",
            Self::Wave2D => "Wave2D",
            Self::SecondDerivative => "SecondDerivative",
            Self::Zero => "Zero",
        }
    }

    pub fn equation(self) -> &'static str {
        match self {
            Self::HessianOne => "hess(f) = 1",
            Self::SpecialLagrangianElliptic => "Δf − hess(f) = 0",
            Self::SpecialLagrangianHyperbolic => "□f + hess(f) = 0",
            Self::Laplace => "Δf = 0",
            Self::Wave => "□f = 0",
            Self::Laplace2D => "Δ_{q2,q3} f = 0",
            Self::Wave2D => "□_{q1,q2} f = 0",
            Self::SecondDerivative => "∂²f/∂q1² = 0",
            Self::Zero => "0 = 0",
        }
    }
}

impl std::fmt::Display for OrbitClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    Hyperbolic,
    Elliptic,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantReport<S> {
    pub lambda: S,
    pub signature: Signature,
    pub effective: bool,
    pub nondegenerate: bool,
    pub regime: Regime,
}

/// Tolerance for the sign of λ on floats. λ is quartic in the coefficients.
pub fn lambda_tolerance(max_coeff: f64) -> f64 {
    1e-9 * (1.0 + max_coeff).powi(4)
}

pub const SIGNATURE_TOL: f64 = 1e-9;

/// Invariants without the table lookup. Fails on non-effective input.
pub fn invariants<S: Scalar>(w: &KForm<S>, s: &SymplecticSpace<S>) -> Result<InvariantReport<S>> {
    let q = q_form(w, s)?;
    let lambda = pfaffian(w, s.theta())?;
    let sign = lambda.signum_i(lambda_tolerance(w.max_abs()));
    let regime = match sign {
        1 => Regime::Hyperbolic,
        -1 => Regime::Elliptic,
        _ => Regime::Degenerate,
    };
    Ok(InvariantReport {
        lambda,
        signature: signature(&q, SIGNATURE_TOL),
        effective: true,
        nondegenerate: regime != Regime::Degenerate,
        regime,
    })
}

/// Lookup from `(sign λ, ε(q_ω))`; rows 8 and 9 are told apart by ω = 0.
pub fn classify<S: Scalar>(w: &KForm<S>, s: &SymplecticSpace<S>) -> Result<(OrbitClass, InvariantReport<S>)> {
    let report = invariants(w, s)?;
    let class = lookup(&report, w)?;
    Ok((class, report))
}

fn lookup<S: Scalar>(r: &InvariantReport<S>, w: &KForm<S>) -> Result<OrbitClass> {
    let (pos, neg) = r.signature.ordered_pair();
    let outside = || Error::OutsideTable(format!("λ-regime {:?} with ε = ({pos},{neg})", r.regime));
    match r.regime {
        Regime::Hyperbolic => Ok(OrbitClass::HessianOne),
        Regime::Elliptic => match (pos, neg) {
            (0, 6) => Ok(OrbitClass::SpecialLagrangianElliptic),
            (4, 2) => Ok(OrbitClass::SpecialLagrangianHyperbolic),
            _ => Err(outside()),
        },
        Regime::Degenerate => match (pos, neg) {
            (0, 3) | (3, 0) => Ok(OrbitClass::Laplace),
            (2, 1) | (1, 2) => Ok(OrbitClass::Wave),
            (0, 1) => Ok(OrbitClass::Laplace2D),
            (1, 0) => Ok(OrbitClass::Wave2D),
            (0, 0) => {
                let zero = if S::EXACT { w.is_zero() } else { w.max_abs() <= SIGNATURE_TOL };
                Ok(if zero { OrbitClass::Zero } else { OrbitClass::SecondDerivative })
            }
            _ => Err(outside()),
        },
    }
}

/// Pointwise generalized almost Calabi-Yau data `(g, Ω, K, α, β)` of the
/// normalized form `ω/|λ|^{1/4}`.
#[derive(Clone, Debug)]
pub struct GczStructure<S: Scalar> {
    /// `g(U, V) = Ω(KU, V)`.
    pub g: QuadForm6<S>,
    pub omega: KForm<S>,
    pub k: LinearMap6<S>,
    pub split: SplitPair<S>,
    /// `(α∧β)/Ω³`; purely imaginary in the elliptic case.
    pub ratio: ComplexScalar<S>,
    /// The normalized 3-form.
    pub form: KForm<S>,
    /// `λ` of the normalized form, ±1.
    pub lambda: S,
}

/// Outcome of [`GczStructure::verify`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GczCheck {
    pub k_squared: bool,
    pub compatible: bool,
    pub symplectic_k: bool,
    pub decomposable: bool,
    pub eigenforms: bool,
    pub reconstructs: bool,
}

impl GczCheck {
    pub fn all(&self) -> bool {
        self.k_squared
            && self.compatible
            && self.symplectic_k
            && self.decomposable
            && self.eigenforms
            && self.reconstructs
    }
}

pub fn build_gcy<S: Scalar>(w: &KForm<S>, s: &SymplecticSpace<S>) -> Result<GczStructure<S>> {
    let lambda0 = pfaffian(w, s.theta())?;
    if lambda0.signum_i(lambda_tolerance(w.max_abs())) == 0 {
        return Err(Error::Degenerate);
    }
    let r = lambda0.abs().root4().ok_or_else(|| {
        Error::NotExact(format!("|λ| = {} has no rational fourth root; use the float backend", lambda0.to_f64()))
    })?;
    let form = w.scale(&S::one().checked_div(&r)?);
    let k = hitchin_k(&form, s.theta())?;
    let lambda = k.compose(&k).trace() * S::from_ratio(1, 6);
    let split = split_pair(&form, s.theta())?;
    let (alpha, beta) = split.pieces();
    let om3 = s.omega().wedge(s.omega())?.wedge(s.omega())?.top().clone();
    let ab = alpha.wedge(&beta)?.top();
    let ratio = ab.checked_div(&ComplexScalar::real(om3))?;
    Ok(GczStructure { g: omega_k_form(&k, s), omega: s.omega().clone(), k, split, ratio, form, lambda })
}

impl<S: Scalar> GczStructure<S> {
    /// Checks every structure identity. `tol` is ignored on exact backends.
    ///
    /// The eigenform check asserts `K*α = μα` and `K*β = μ'β` with
    /// `μ, μ' ∈ {±1, ±i}`; since K is invertible this also makes the kernel
    /// distributions of α and β K-invariant.
    pub fn verify(&self, s: &SymplecticSpace<S>, tol: f64) -> Result<GczCheck> {
        let id = LinearMap6::identity();
        let k2 = self.k.compose(&self.k);
        let k_squared = k2.approx_eq(&id, tol) || k2.approx_eq(&id.scale(&-S::one()), tol);
        let compatible = self.g.m.approx_eq(&omega_k_form(&self.k, s).m, tol);
        let symplectic_k = if S::EXACT { in_sp3(&self.k, s) } else { in_sp3_tol(&self.k, s, tol) };
        let theta = s.theta();
        let (alpha, beta) = self.split.pieces();
        let decomposable = match &self.split {
            SplitPair::Hyperbolic { alpha, beta } => is_decomposable(alpha, theta)? && is_decomposable(beta, theta)?,
            SplitPair::Elliptic { alpha } => is_decomposable_complex(alpha, theta)?,
        };
        let eigen = |a: &crate::exterior::ComplexKForm<S>| -> bool {
            let pulled = crate::exterior::ComplexKForm { re: a.re.pullback(&self.k), im: a.im.pullback(&self.k) };
            let units = [
                ComplexScalar::real(S::one()),
                ComplexScalar::real(-S::one()),
                ComplexScalar::i(),
                ComplexScalar::new(S::zero(), -S::one()),
            ];
            units.iter().any(|mu| {
                let d = pulled.sub(&a.scale(mu));
                if S::EXACT {
                    d.is_zero()
                } else {
                    d.re.max_abs().max(d.im.max_abs()) <= tol
                }
            })
        };
        let eigenforms = eigen(&alpha) && eigen(&beta);
        let rec = self.split.reconstruct();
        let reconstructs = if S::EXACT { rec == self.form } else { rec.approx_eq(&self.form, tol) };
        Ok(GczCheck { k_squared, compatible, symplectic_k, decomposable, eigenforms, reconstructs })
    }

    pub fn default_tolerance(&self) -> f64 {
        float_tolerance(self.form.max_abs())
    }
}
