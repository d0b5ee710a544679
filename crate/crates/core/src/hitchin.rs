//! Hitchin's invariants of 3-forms in six dimensions.
//!
//! The map `A: Λ⁵ → V ⊗ Λ⁶` is fixed by `ξ ∧ ψ = ξ(A(ψ))·θ` for every
//! covector ξ. With this orientation the K-map of `dq₁∧dq₂∧dq₃ + dp₁∧dp₂∧dp₃`
//! is `diag(1,1,1,−1,−1,−1)`.
//!
//! On the exact backend, operations that need `|λ|^{1/2}` succeed only when
//! λ is the square of a rational; otherwise they return [`Error::NotExact`]
//! and the caller should switch to `f64`.

use crate::error::{Error, Result};
use crate::exterior::{ComplexKForm, KForm, Vector6, DIM};
use crate::linalg::LinearMap6;
use crate::scalar::{ComplexScalar, Scalar};

fn check_grade<S: Scalar>(w: &KForm<S>, g: usize) -> Result<()> {
    if w.grade() != g {
        return Err(Error::WrongGrade { expected: g, got: w.grade() });
    }
    Ok(())
}

fn volume<S: Scalar>(theta: &KForm<S>) -> Result<S> {
    check_grade(theta, 6)?;
    let t = theta.top().clone();
    if t.is_zero() {
        return Err(Error::ZeroVolume);
    }
    Ok(t)
}

/// `A(ψ)`: the vector `v` with `ξ∧ψ = ξ(v)θ`.
pub fn a_iso<S: Scalar>(psi: &KForm<S>, theta: &KForm<S>) -> Result<Vector6<S>> {
    check_grade(psi, 5)?;
    let t = volume(theta)?;
    let mut v = Vector6::zero();
    for i in 0..DIM {
        let xi = KForm::monomial(&[i]);
        v.0[i] = xi.wedge(psi)?.top().checked_div(&t)?;
    }
    Ok(v)
}

/// Bilinear form behind K: column `j` is `A(i_{e_j}u ∧ v)`.
pub fn k_bilinear<S: Scalar>(u: &KForm<S>, v: &KForm<S>, theta: &KForm<S>) -> Result<LinearMap6<S>> {
    check_grade(u, 3)?;
    check_grade(v, 3)?;
    let cols = (0..DIM).map(|j| a_iso(&u.interior_basis(j)?.wedge(v)?, theta)).collect::<Result<Vec<_>>>()?;
    Ok(LinearMap6::from_columns(&cols))
}

/// `K_ω^θ` with `K(X)θ = A(i_Xω ∧ ω)`.
pub fn hitchin_k<S: Scalar>(w: &KForm<S>, theta: &KForm<S>) -> Result<LinearMap6<S>> {
    k_bilinear(w, w, theta)
}

/// Complex-bilinear extension of K to `a + ib`.
pub fn hitchin_k_complex<S: Scalar>(w: &ComplexKForm<S>, theta: &KForm<S>) -> Result<(LinearMap6<S>, LinearMap6<S>)> {
    let aa = k_bilinear(&w.re, &w.re, theta)?;
    let bb = k_bilinear(&w.im, &w.im, theta)?;
    let ab = k_bilinear(&w.re, &w.im, theta)?;
    let ba = k_bilinear(&w.im, &w.re, theta)?;
    Ok((aa.sub(&bb), ab.add(&ba)))
}

/// Hitchin pfaffian `λ = (1/6) tr(K∘K)`.
pub fn pfaffian<S: Scalar>(w: &KForm<S>, theta: &KForm<S>) -> Result<S> {
    let k = hitchin_k(w, theta)?;
    Ok(k.compose(&k).trace() * S::from_ratio(1, 6))
}

pub fn k_squared<S: Scalar>(w: &KForm<S>, theta: &KForm<S>) -> Result<LinearMap6<S>> {
    let k = hitchin_k(w, theta)?;
    Ok(k.compose(&k))
}

/// `(K*ω)(X,Y,Z) = ω(KX,KY,KZ)`.
pub fn pullback_3form<S: Scalar>(k: &LinearMap6<S>, w: &KForm<S>) -> KForm<S> {
    w.pullback(k)
}

/// `|λ|^{1/2}`, failing on the exact backend when it is irrational.
pub fn sqrt_abs<S: Scalar>(lambda: &S) -> Result<S> {
    lambda
        .abs()
        .sqrt()
        .ok_or_else(|| Error::NotExact(format!("|λ| = {lambda:?} is not a rational square; use the float backend")))
}

/// `|λ|^{-3/2} K*ω` together with λ.
pub fn normalized_k_pullback<S: Scalar>(w: &KForm<S>, theta: &KForm<S>) -> Result<(S, KForm<S>)> {
    let k = hitchin_k(w, theta)?;
    let lambda = k.compose(&k).trace() * S::from_ratio(1, 6);
    if lambda.is_zero() {
        return Err(Error::Degenerate);
    }
    let r = sqrt_abs(&lambda)?;
    let cube = lambda.abs() * r;
    let inv = S::one().checked_div(&cube)?;
    Ok((lambda, w.pullback(&k).scale(&inv)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Hyperbolic,
    Elliptic,
}

/// Decomposition of a nondegenerate 3-form into decomposable pieces.
#[derive(Clone, Debug, PartialEq)]
pub enum SplitPair<S: Scalar> {
    /// `ω = α + β` with α, β real decomposable and `(α∧β)/θ > 0`.
    Hyperbolic { alpha: KForm<S>, beta: KForm<S> },
    /// `ω = α + ᾱ` with α complex decomposable and `(α∧ᾱ)/(iθ) > 0`.
    Elliptic { alpha: ComplexKForm<S> },
}

impl<S: Scalar> SplitPair<S> {
    pub fn branch(&self) -> Branch {
        match self {
            Self::Hyperbolic { .. } => Branch::Hyperbolic,
            Self::Elliptic { .. } => Branch::Elliptic,
        }
    }

    /// `α + β` or `α + ᾱ`.
    pub fn reconstruct(&self) -> KForm<S> {
        match self {
            Self::Hyperbolic { alpha, beta } => alpha.clone() + beta.clone(),
            Self::Elliptic { alpha } => alpha.re.scale(&S::from_i64(2)),
        }
    }

    /// Hitchin's dual: `α − β`, or `i(ᾱ − α) = 2 Im α`.
    pub fn dual(&self) -> KForm<S> {
        match self {
            Self::Hyperbolic { alpha, beta } => alpha.clone() - beta.clone(),
            Self::Elliptic { alpha } => alpha.im.scale(&S::from_i64(2)),
        }
    }

    /// `(α∧β)/θ`, or `(α∧ᾱ)/(iθ)`; positive after normalization.
    pub fn orientation(&self, theta: &KForm<S>) -> Result<S> {
        let t = volume(theta)?;
        match self {
            Self::Hyperbolic { alpha, beta } => alpha.wedge(beta)?.top().checked_div(&t),
            Self::Elliptic { alpha } => {
                let aa = alpha.wedge(&alpha.conj())?;
                aa.im.top().checked_div(&t)
            }
        }
    }

    /// The two pieces as complex forms (β = ᾱ in the elliptic branch).
    pub fn pieces(&self) -> (ComplexKForm<S>, ComplexKForm<S>) {
        match self {
            Self::Hyperbolic { alpha, beta } => (ComplexKForm::real(alpha.clone()), ComplexKForm::real(beta.clone())),
            Self::Elliptic { alpha } => (alpha.clone(), alpha.conj()),
        }
    }
}

/// Splits a nondegenerate 3-form: hyperbolic when λ > 0, elliptic when λ < 0.
pub fn split_pair<S: Scalar>(w: &KForm<S>, theta: &KForm<S>) -> Result<SplitPair<S>> {
    check_grade(w, 3)?;
    let (lambda, kw) = normalized_k_pullback(w, theta)?;
    let half = S::from_ratio(1, 2);
    let split = if lambda > S::zero() {
        let alpha = (w.clone() + kw.clone()).scale(&half);
        let beta = (w.clone() - kw).scale(&half);
        let pair = SplitPair::Hyperbolic { alpha, beta };
        if pair.orientation(theta)? < S::zero() {
            let SplitPair::Hyperbolic { alpha, beta } = pair else { unreachable!() };
            SplitPair::Hyperbolic { alpha: beta, beta: alpha }
        } else {
            pair
        }
    } else {
        // the ½ makes α + ᾱ = ω
        let alpha = ComplexKForm::new(w.scale(&half), kw.scale(&half))?;
        let pair = SplitPair::Elliptic { alpha };
        if pair.orientation(theta)? < S::zero() {
            let SplitPair::Elliptic { alpha } = pair else { unreachable!() };
            SplitPair::Elliptic { alpha: alpha.conj() }
        } else {
            pair
        }
    };
    Ok(split)
}

/// Hitchin's dual form ω̂ (α − β or i(ᾱ − α) of the normalized split).
pub fn dual_form<S: Scalar>(w: &KForm<S>, theta: &KForm<S>) -> Result<KForm<S>> {
    Ok(split_pair(w, theta)?.dual())
}

/// Tolerance used for decomposability and `K² = λ·Id` on floats:
/// `1e-9·(1 + max|coeff|)³`.
pub fn float_tolerance(max_coeff: f64) -> f64 {
    1e-9 * (1.0 + max_coeff).powi(3)
}

/// A 3-form in six variables is decomposable iff its K-map vanishes.
pub fn is_decomposable<S: Scalar>(w: &KForm<S>, theta: &KForm<S>) -> Result<bool> {
    let k = hitchin_k(w, theta)?;
    Ok(if S::EXACT { k.is_zero() } else { k.max_abs() <= float_tolerance(w.max_abs()) })
}

pub fn is_decomposable_complex<S: Scalar>(w: &ComplexKForm<S>, theta: &KForm<S>) -> Result<bool> {
    let (re, im) = hitchin_k_complex(w, theta)?;
    Ok(if S::EXACT {
        re.is_zero() && im.is_zero()
    } else {
        let tol = float_tolerance(w.re.max_abs().max(w.im.max_abs()));
        re.max_abs() <= tol && im.max_abs() <= tol
    })
}

/// `Θ(ω, ω′) = (ω∧ω′)/θ`.
pub fn theta_pairing<S: Scalar>(w: &KForm<S>, w2: &KForm<S>, theta: &KForm<S>) -> Result<S> {
    check_grade(w, 3)?;
    check_grade(w2, 3)?;
    let t = volume(theta)?;
    w.wedge(w2)?.top().checked_div(&t)
}

/// `(α∧β)/θ` for complex 3-forms.
pub fn theta_pairing_complex<S: Scalar>(
    a: &ComplexKForm<S>,
    b: &ComplexKForm<S>,
    theta: &KForm<S>,
) -> Result<ComplexScalar<S>> {
    let t = volume(theta)?;
    let w = a.wedge(b)?;
    Ok(ComplexScalar::new(w.re.top().checked_div(&t)?, w.im.top().checked_div(&t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    type Q = KForm<Rational>;

    fn theta() -> Q {
        Q::e(&[1, 2, 3, 4, 5, 6])
    }

    fn row1(g: Rational) -> Q {
        Q::e(&[1, 2, 3]) + Q::e(&[4, 5, 6]).scale(&g)
    }

    fn row2(nu: Rational) -> Q {
        Q::e(&[4, 2, 3]) - Q::e(&[5, 1, 3]) + Q::e(&[6, 1, 2]) - Q::e(&[4, 5, 6]).scale(&(nu.clone() * nu))
    }

    #[test]
    fn a_iso_examples() {
        let t = theta();
        let psi = t.interior_basis(0).unwrap();
        let v = a_iso(&psi, &t).unwrap();
        assert_eq!(v, Vector6::basis(0));
        assert!(a_iso(&Q::zero(5), &t).unwrap().is_zero());
        assert_eq!(a_iso(&psi, &Q::zero(6)), Err(Error::ZeroVolume));
        let psi2 = Q::e(&[1, 3, 4, 5, 6]).scale(&rat(2, 1)) + Q::e(&[1, 2, 3, 4, 6]);
        let lhs = a_iso(&(psi.clone() + psi2.clone()), &t).unwrap();
        let rhs = a_iso(&psi, &t).unwrap() + a_iso(&psi2, &t).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn k_of_real_calabi_yau_form() {
        let k = hitchin_k(&row1(rat(1, 1)), &theta()).unwrap();
        let expected = LinearMap6::diagonal(std::array::from_fn(|i| rat(if i < 3 { 1 } else { -1 }, 1)));
        assert_eq!(k, expected);
        assert!(hitchin_k(&Q::zero(3), &theta()).unwrap().is_zero());
    }

    #[test]
    fn pfaffian_of_normal_forms() {
        // computed with the pinned conventions: λ(row 1) = γ², λ(rows 2, 3) = −4ν²
        assert_eq!(pfaffian(&row1(rat(2, 1)), &theta()).unwrap(), rat(4, 1));
        assert_eq!(pfaffian(&row1(rat(1, 1)), &theta()).unwrap(), rat(1, 1));
        assert_eq!(pfaffian(&row2(rat(1, 1)), &theta()).unwrap(), rat(-4, 1));
        assert_eq!(pfaffian(&row2(rat(3, 1)), &theta()).unwrap(), rat(-36, 1));
        let laplace = Q::e(&[4, 2, 3]) - Q::e(&[5, 1, 3]) + Q::e(&[6, 1, 2]);
        assert_eq!(pfaffian(&laplace, &theta()).unwrap(), rat(0, 1));
    }

    #[test]
    fn k_squared_examples() {
        assert_eq!(k_squared(&row1(rat(1, 1)), &theta()).unwrap(), LinearMap6::identity());
        assert!(k_squared(&Q::zero(3), &theta()).unwrap().is_zero());
        let w = row2(rat(1, 2));
        let lam = pfaffian(&w, &theta()).unwrap();
        assert_eq!(k_squared(&w, &theta()).unwrap(), LinearMap6::identity().scale(&lam));
    }

    #[test]
    fn pullback_examples() {
        let w = row2(rat(2, 1));
        assert_eq!(pullback_3form(&LinearMap6::identity(), &w), w);
        let c = rat(-3, 2);
        let cid = LinearMap6::identity().scale(&c);
        assert_eq!(pullback_3form(&cid, &w), w.scale(&(c.clone() * c.clone() * c)));
        let k = hitchin_k(&w, &theta()).unwrap();
        let lam = pfaffian(&w, &theta()).unwrap();
        let twice = pullback_3form(&k, &pullback_3form(&k, &w));
        assert_eq!(twice, w.scale(&(lam.clone() * lam.clone() * lam)));
    }

    #[test]
    fn split_row1() {
        let w = row1(rat(2, 1));
        let sp = split_pair(&w, &theta()).unwrap();
        let SplitPair::Hyperbolic { alpha, beta } = &sp else { panic!("expected hyperbolic") };
        assert_eq!(alpha, &Q::e(&[1, 2, 3]));
        assert_eq!(beta, &Q::e(&[4, 5, 6]).scale(&rat(2, 1)));
        assert!(sp.orientation(&theta()).unwrap() > rat(0, 1));
        assert_eq!(sp.reconstruct(), w);
        let dual = dual_form(&row1(rat(1, 1)), &theta()).unwrap();
        assert_eq!(dual, Q::e(&[1, 2, 3]) - Q::e(&[4, 5, 6]));
    }

    #[test]
    fn split_recovers_known_decomposables() {
        let a = Q::e(&[1]) + Q::e(&[4]).scale(&rat(2, 1));
        let alpha = a.wedge(&Q::e(&[2])).unwrap().wedge(&(Q::e(&[3]) - Q::e(&[5]))).unwrap();
        let beta = Q::e(&[4, 5, 6]).scale(&rat(3, 1));
        let w = alpha.clone() + beta.clone();
        let lam = pfaffian(&w, &theta()).unwrap();
        assert!(lam > rat(0, 1));
        let sp = split_pair(&w, &theta()).unwrap();
        let SplitPair::Hyperbolic { alpha: a2, beta: b2 } = sp else { panic!() };
        let matches = (a2 == alpha && b2 == beta) || (a2 == beta && b2 == alpha);
        assert!(matches);
    }

    #[test]
    fn split_row2_is_elliptic() {
        let w = row2(rat(1, 1));
        let sp = split_pair(&w, &theta()).unwrap();
        let SplitPair::Elliptic { alpha } = &sp else { panic!("expected elliptic") };
        assert!(is_decomposable_complex(alpha, &theta()).unwrap());
        assert_eq!(sp.reconstruct(), w);
        assert!(sp.orientation(&theta()).unwrap() > rat(0, 1));
        // the dual is the imaginary-part partner of ω
        let (_, kw) = normalized_k_pullback(&w, &theta()).unwrap();
        assert_eq!(sp.dual(), kw);
    }

    #[test]
    fn dual_is_homogeneous_of_degree_one() {
        let w = row1(rat(1, 1));
        let c = rat(4, 1);
        let d1 = dual_form(&w, &theta()).unwrap();
        let dc = dual_form(&w.scale(&c), &theta()).unwrap();
        assert_eq!(dc, d1.scale(&c));
    }

    #[test]
    fn degenerate_forms_have_no_split() {
        let laplace = Q::e(&[4, 2, 3]) - Q::e(&[5, 1, 3]) + Q::e(&[6, 1, 2]);
        assert_eq!(split_pair(&laplace, &theta()), Err(Error::Degenerate));
        assert_eq!(dual_form(&laplace, &theta()), Err(Error::Degenerate));
    }

    #[test]
    fn exact_backend_refuses_irrational_roots() {
        let w = row1(rat(2, 1)) + Q::e(&[1, 5, 6]);
        let lam = pfaffian(&w, &theta()).unwrap();
        if lam.abs().sqrt().is_none() {
            assert!(matches!(split_pair(&w, &theta()), Err(Error::NotExact(_))));
        }
        let wf = w.to_f64();
        let sp = split_pair(&wf, &theta().to_f64()).unwrap();
        assert!(sp.reconstruct().approx_eq(&wf, 1e-12));
    }

    #[test]
    fn decomposability_examples() {
        let t = theta();
        assert!(is_decomposable(&Q::e(&[1, 2, 3]), &t).unwrap());
        assert!(!is_decomposable(&row1(rat(1, 1)), &t).unwrap());
        let z = |r: usize, i: usize| ComplexKForm::new(Q::e(&[r]), Q::e(&[i])).unwrap();
        let alpha = z(1, 4).wedge(&z(2, 5)).unwrap().wedge(&z(3, 6)).unwrap();
        assert!(is_decomposable_complex(&alpha, &t).unwrap());
        assert!(!is_decomposable(&alpha.re.scale(&rat(2, 1)), &t).unwrap());
    }

    #[test]
    fn theta_pairing_examples() {
        let t = theta();
        let w = row2(rat(1, 1));
        assert_eq!(theta_pairing(&w, &w, &t).unwrap(), rat(0, 1));
        assert_eq!(theta_pairing(&Q::e(&[1, 2, 3]), &Q::e(&[4, 5, 6]), &t).unwrap(), rat(1, 1));
        let u = row1(rat(3, 1));
        assert_eq!(theta_pairing(&u, &w, &t).unwrap(), -theta_pairing(&w, &u, &t).unwrap());
        assert_eq!(theta_pairing(&u, &w, &Q::zero(6)), Err(Error::ZeroVolume));
    }
}
