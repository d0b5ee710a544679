//! Worked examples: the Chynoweth–Sewell equation and the associative
//! 3-form on S⁶.
//!
//! Chart for the Chynoweth–Sewell example is `(x, y, z, p, q, h)`, with
//! `Ω₀ = dx∧dp + dy∧dq + dz∧dh`.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::classifier::{classify, OrbitClass};
use crate::error::{Error, Result};
use crate::exterior::{KForm, MultiIndex, Vector6};
use crate::fields::{
    check_generalized_solution, check_regular_solution, hessian_det, is_symplectomorphism_exact, pullback_affine,
    DiffeoMap, FormField, GeneralizedSolutionReport, Point3, RegularSolutionReport, SampleBox, SectionMap,
    Submanifold3,
};
use crate::hitchin::{hitchin_k, pfaffian};
use crate::linalg::LinearMap6;
use crate::scalar::{Rational, Scalar};
use crate::symplectic::SymplecticSpace;

/// `ω = dp∧dq∧dz + dx∧dy∧dh − γ dx∧dy∧dz`.
pub fn cs_form(gamma: &Rational) -> KForm<Rational> {
    KForm::e(&[4, 5, 3]) + KForm::e(&[1, 2, 6]) - KForm::e(&[1, 2, 3]).scale(gamma)
}

/// `dp∧dq∧dh − dx∧dy∧dz`, whose Monge-Ampère operator is `hess(f) − 1`.
pub fn hess_one_form() -> KForm<Rational> {
    KForm::e(&[4, 5, 6]) - KForm::e(&[1, 2, 3])
}

/// `φ(x, y, z, p, q, h) = (x, y, h, p, q, γh − z)`.
pub fn cs_reduction(gamma: &Rational) -> DiffeoMap {
    let mut a = LinearMap6::<Rational>::zero();
    let one = Rational::from_i64(1);
    for i in [0, 1, 3, 4] {
        a.m[i][i] = one.clone();
    }
    a.m[2][5] = one.clone();
    a.m[5][5] = gamma.clone();
    a.m[5][2] = -one;
    DiffeoMap::linear(a)
}

/// `f = ⅓(x² + 2y)^{3/2} − ½z²`, a solution for γ = 0.
pub fn cs_regular_solution() -> SectionMap {
    let u = |x: &Point3| -> Result<f64> {
        let u = x[0] * x[0] + 2.0 * x[1];
        if u > 0.0 {
            Ok(u)
        } else {
            Err(Error::Domain(format!("x² + 2y = {u} ≤ 0")))
        }
    };
    SectionMap::black_box(
        move |x| Ok(u(x)?.powf(1.5) / 3.0 - 0.5 * x[2] * x[2]),
        Some(Arc::new(move |x: &Point3| {
            let r = u(x)?.sqrt();
            Ok([x[0] * r, r, -x[2]])
        })),
    )
}

fn sigma(x: &Point3) -> Result<f64> {
    let s2 = x[0] * x[1] + x[1] * x[2] + x[2] * x[0];
    if s2 > 0.0 {
        Ok(s2.sqrt())
    } else {
        Err(Error::Domain(format!("xy + yz + zx = {s2} ≤ 0")))
    }
}

/// Adaptive Simpson quadrature.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rule(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = rule(f, a, fa, m, fm);
        let (rm, frm, right) = rule(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = rule(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 48)
}

/// `f = ∫_a^{√(xy+yz+zx)} (b + 4ξ³)^{1/3} dξ`, a solution of hess(f) = 1.
/// The gradient is closed-form: `∂f/∂x = (b + 4s³)^{1/3}(y + z)/(2s)`.
pub fn hess_one_solution(a: f64, b: f64) -> SectionMap {
    SectionMap::black_box(
        move |x| {
            let s = sigma(x)?;
            Ok(simpson(&|t: f64| (b + 4.0 * t * t * t).cbrt(), a, s, 1e-12))
        },
        Some(Arc::new(move |x: &Point3| {
            let al = alpha(x, b)?;
            Ok([(x[1] + x[2]) * al, (x[0] + x[2]) * al, (x[0] + x[1]) * al])
        })),
    )
}

/// `α = ½(b/(xy+yz+zx)^{3/2} + 4)^{1/3}`.
fn alpha(x: &Point3, b: f64) -> Result<f64> {
    let s = sigma(x)?;
    Ok(0.5 * (b / (s * s * s) + 4.0).cbrt())
}

/// `L = {(x, y, (x+y)α, (y+z)α, (z+x)α, γ(x+y)α − z)}`, the image under
/// [`cs_reduction`] of the graph of d of [`hess_one_solution`].
pub fn cs_generalized_solution(gamma: f64, b: f64) -> Submanifold3 {
    Submanifold3::new(move |u| {
        let al = alpha(u, b)?;
        let (x, y, z) = (u[0], u[1], u[2]);
        Ok([x, y, (x + y) * al, (y + z) * al, (z + x) * al, gamma * (x + y) * al - z])
    })
}

fn cs_space() -> SymplecticSpace<Rational> {
    SymplecticSpace::standard()
}

#[derive(Clone, Debug, Serialize)]
pub struct CsReport {
    pub gamma: String,
    pub class: OrbitClass,
    pub lambda: String,
    pub effective: bool,
    pub reduction_symplectic: bool,
    pub reduction_normal_form: bool,
    /// Only run for γ = 0, where the closed-form solution applies.
    pub regular_solution: Option<RegularSolutionReport>,
    pub hess_one_max_residual: f64,
    pub hess_one_pass: bool,
    pub generalized_solution: GeneralizedSolutionReport,
    pub seed: u64,
    pub samples: usize,
    pub h: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Every Chynoweth–Sewell check for one γ.
pub fn cs_demo(gamma: &Rational, b: f64, samples: usize, seed: u64, h: f64, tol: f64) -> Result<CsReport> {
    let s = cs_space();
    let w = cs_form(gamma);
    let (class, inv) = classify(&w, &s)?;
    let phi = cs_reduction(gamma);
    let reduction_symplectic = is_symplectomorphism_exact(&phi, &s)?;
    let pulled = pullback_affine(&phi, &FormField::constant(&w))?;
    let reduction_normal_form = pulled.eval_exact(&std::array::from_fn(|_| Rational::from_i64(0)))? == hess_one_form()
        && pulled.polys().is_some_and(|p| p.iter().all(|c| c.is_constant()));

    let bx = SampleBox::cube(3, 0.5, 2.0);
    let pts = bx.sample3(samples, seed)?;
    let g = gamma.to_f64();
    let wf = FormField::constant(&w);
    let regular_solution = if gamma == &Rational::from_i64(0) {
        Some(check_regular_solution(&wf, &cs_regular_solution(), &pts, h, tol)?)
    } else {
        None
    };
    let f = hess_one_solution(1.0, b);
    let mut hess_one_max_residual = 0.0f64;
    for x in &pts {
        hess_one_max_residual = hess_one_max_residual.max((hessian_det(&f.hessian(x, h)?) - 1.0).abs());
    }
    let hess_one_pass = hess_one_max_residual <= tol;
    let sf = SymplecticSpace::<f64>::standard();
    let generalized_solution = check_generalized_solution(&cs_generalized_solution(g, b), &wf, &sf, &pts, h, tol)?;
    let pass = class == OrbitClass::HessianOne
        && reduction_symplectic
        && reduction_normal_form
        && regular_solution.as_ref().is_none_or(|r| r.pass)
        && hess_one_pass
        && generalized_solution.pass;
    Ok(CsReport {
        gamma: crate::scalar::format_rational(gamma),
        class,
        lambda: crate::scalar::format_rational(&inv.lambda),
        effective: inv.effective,
        reduction_symplectic,
        reduction_normal_form,
        regular_solution,
        hess_one_max_residual,
        hess_one_pass,
        generalized_solution,
        seed,
        samples,
        h,
        tol,
        pass,
    })
}

/// An octonion `a₀ + a₁e₁ + … + a₇e₇`.
#[derive(Clone, Debug, PartialEq)]
pub struct Octonion<S>(pub [S; 8]);

fn quat_mul<S: Scalar>(a: &[S], b: &[S]) -> [S; 4] {
    let (a0, a1, a2, a3) = (&a[0], &a[1], &a[2], &a[3]);
    let (b0, b1, b2, b3) = (&b[0], &b[1], &b[2], &b[3]);
    let m = |x: &S, y: &S| x.clone() * y.clone();
    [
        m(a0, b0) - m(a1, b1) - m(a2, b2) - m(a3, b3),
        m(a0, b1) + m(a1, b0) + m(a2, b3) - m(a3, b2),
        m(a0, b2) - m(a1, b3) + m(a2, b0) + m(a3, b1),
        m(a0, b3) + m(a1, b2) - m(a2, b1) + m(a3, b0),
    ]
}

fn quat_conj<S: Scalar>(a: &[S]) -> [S; 4] {
    [a[0].clone(), -a[1].clone(), -a[2].clone(), -a[3].clone()]
}

impl<S: Scalar> Octonion<S> {
    pub fn basis(i: usize) -> Self {
        Self(std::array::from_fn(|j| if i == j { S::one() } else { S::zero() }))
    }

    /// The imaginary octonion with components `v` along e₁…e₇.
    pub fn imaginary(v: &[S; 7]) -> Self {
        Self(std::array::from_fn(|j| if j == 0 { S::zero() } else { v[j - 1].clone() }))
    }

    pub fn im(&self) -> [S; 7] {
        std::array::from_fn(|j| self.0[j + 1].clone())
    }

    pub fn conj(&self) -> Self {
        Self(std::array::from_fn(|j| if j == 0 { self.0[0].clone() } else { -self.0[j].clone() }))
    }

    /// Cayley–Dickson: `(a, b)(c, d) = (ac − d̄b, da + bc̄)`.
    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = self.0.split_at(4);
        let (c, d) = o.0.split_at(4);
        let l = quat_mul(a, c);
        let r = quat_mul(&quat_conj(d), b);
        let u = quat_mul(d, a);
        let v = quat_mul(b, &quat_conj(c));
        Self(std::array::from_fn(
            |i| if i < 4 { l[i].clone() - r[i].clone() } else { u[i - 4].clone() + v[i - 4].clone() },
        ))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i].clone() + o.0[i].clone()))
    }

    pub fn dot(&self, o: &Self) -> S {
        (0..8).fold(S::zero(), |acc, i| acc + self.0[i].clone() * o.0[i].clone())
    }

    pub fn norm_sqr(&self) -> S {
        self.dot(self)
    }
}

/// `φ(x, y, z) = ⟨x, yz⟩` on imaginary octonions.
pub fn associative_form<S: Scalar>(x: &[S; 7], y: &[S; 7], z: &[S; 7]) -> S {
    Octonion::imaginary(x).dot(&Octonion::imaginary(y).mul(&Octonion::imaginary(z)))
}

fn dot7(a: &[f64; 7], b: &[f64; 7]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal basis of `T_xS⁶ = x^⊥ ⊂ Im 𝕆`, oriented so that
/// `det[x, t₁, …, t₆] > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentFrame {
    pub x: [f64; 7],
    pub t: [[f64; 7]; 6],
}

impl TangentFrame {
    /// Gram–Schmidt from the standard basis with x's largest component dropped.
    pub fn standard(x: &[f64; 7]) -> Result<Self> {
        let drop = (0..7).max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs())).unwrap();
        let seeds: Vec<[f64; 7]> =
            (0..7).filter(|&i| i != drop).map(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 })).collect();
        Self::from_seeds(x, &seeds)
    }

    /// Gram–Schmidt from a Gaussian random seed basis.
    pub fn seeded(x: &[f64; 7], seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seeds: Vec<[f64; 7]> = (0..6).map(|_| std::array::from_fn(|_| StandardNormal.sample(&mut rng))).collect();
        Self::from_seeds(x, &seeds)
    }

    fn from_seeds(x: &[f64; 7], seeds: &[[f64; 7]]) -> Result<Self> {
        let n = dot7(x, x).sqrt();
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!("|x| = {n}, expected a point of S⁶")));
        }
        let mut basis: Vec<[f64; 7]> = vec![*x];
        for s in seeds {
            let mut v = *s;
            for b in &basis {
                let c = dot7(&v, b);
                for k in 0..7 {
                    v[k] -= c * b[k];
                }
            }
            let len = dot7(&v, &v).sqrt();
            if len < 1e-8 {
                return Err(Error::Degenerate);
            }
            basis.push(v.map(|c| c / len));
        }
        let m = nalgebra::SMatrix::<f64, 7, 7>::from_fn(|i, j| basis[j][i]);
        if m.determinant() < 0.0 {
            basis[6] = basis[6].map(|c| -c);
        }
        Ok(Self { x: *x, t: std::array::from_fn(|i| basis[i + 1]) })
    }

    /// Coordinates of a tangent vector in this frame.
    pub fn coords(&self, v: &[f64; 7]) -> Vector6<f64> {
        Vector6::from_fn(|i| dot7(&self.t[i], v))
    }
}

/// The global sign with `K = SIGN · I_x`; calibrated once on S⁶.
pub const S6_K_SIGN: f64 = 1.0;

#[derive(Clone, Debug)]
pub struct S6Invariant {
    pub lambda: f64,
    pub k: LinearMap6<f64>,
    /// `I_x(Y) = xY` in frame coordinates.
    pub i_x: LinearMap6<f64>,
    pub frame: TangentFrame,
}

/// λ and K of `ω = 2^{-1/2}φ|_{T_xS⁶}` with θ the frame volume form.
pub fn s6_invariant(frame: &TangentFrame) -> Result<S6Invariant> {
    let mut w = KForm::<f64>::zero(3);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    for idx in MultiIndex::all(3) {
        let ix = idx.indices();
        w.set(idx, scale * associative_form(&frame.t[ix[0]], &frame.t[ix[1]], &frame.t[ix[2]]));
    }
    let theta = KForm::<f64>::e(&[1, 2, 3, 4, 5, 6]);
    let lambda = pfaffian(&w, &theta)?;
    let k = hitchin_k(&w, &theta)?;
    let xo = Octonion::imaginary(&frame.x);
    let i_x = LinearMap6::from_columns(&std::array::from_fn::<_, 6, _>(|j| {
        frame.coords(&xo.mul(&Octonion::imaginary(&frame.t[j])).im())
    }));
    Ok(S6Invariant { lambda, k, i_x, frame: frame.clone() })
}

/// Uniform point on S⁶.
pub fn random_s6_point(rng: &mut ChaCha8Rng) -> [f64; 7] {
    let v: [f64; 7] = std::array::from_fn(|_| StandardNormal.sample(rng));
    let n = dot7(&v, &v).sqrt();
    v.map(|c| c / n)
}

#[derive(Clone, Debug, Serialize)]
pub struct S6Report {
    pub samples: usize,
    pub seed: u64,
    pub max_lambda_error: f64,
    pub max_k_squared_error: f64,
    pub max_k_vs_ix_error: f64,
    pub k_sign: f64,
    pub lambda_tol: f64,
    pub k_tol: f64,
    pub pass: bool,
}

/// λ = −1, K² = −Id and K = ±I_x at random points of S⁶.
pub fn s6_demo(samples: usize, seed: u64) -> Result<S6Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut el, mut ek, mut ei) = (0.0f64, 0.0f64, 0.0f64);
    let minus_id = LinearMap6::<f64>::identity().scale(&-1.0);
    for _ in 0..samples {
        let x = random_s6_point(&mut rng);
        let inv = s6_invariant(&TangentFrame::standard(&x)?)?;
        el = el.max((inv.lambda + 1.0).abs());
        ek = ek.max(inv.k.compose(&inv.k).sub(&minus_id).max_abs());
        ei = ei.max(inv.k.sub(&inv.i_x.scale(&S6_K_SIGN)).max_abs());
    }
    let (lambda_tol, k_tol) = (1e-9, 1e-8);
    Ok(S6Report {
        samples,
        seed,
        max_lambda_error: el,
        max_k_squared_error: ek,
        max_k_vs_ix_error: ei,
        k_sign: S6_K_SIGN,
        lambda_tol,
        k_tol,
        pass: samples > 0 && el <= lambda_tol && ek <= k_tol && ei <= k_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{ma_operator, DEFAULT_H};
    use crate::scalar::rat;

    #[test]
    fn cs_reduction_pullbacks() {
        let s = cs_space();
        for g in [rat(0, 1), rat(1, 1), rat(5, 1), rat(7, 1)] {
            let phi = cs_reduction(&g);
            assert!(is_symplectomorphism_exact(&phi, &s).unwrap());
            let pulled = cs_form(&g).pullback(match &phi {
                DiffeoMap::Affine { a, .. } => a,
                _ => unreachable!(),
            });
            assert_eq!(pulled, hess_one_form());
            assert!(s.is_effective(&cs_form(&g)));
            assert_eq!(classify(&cs_form(&g), &s).unwrap().0, OrbitClass::HessianOne);
        }
        let phi = cs_reduction(&rat(3, 1));
        let id = phi.compose_affine(&phi.inverse_affine().unwrap()).unwrap();
        assert!(matches!(id, DiffeoMap::Affine { a, .. } if a == LinearMap6::identity()));
    }

    #[test]
    fn regular_solutions() {
        let pts = SampleBox::cube(3, 0.5, 2.0).sample3(20, 1).unwrap();
        let w = FormField::constant(&cs_form(&rat(0, 1)));
        let f = cs_regular_solution();
        for x in &pts {
            assert!(ma_operator(&w, &f, x, DEFAULT_H).unwrap().abs() < 1e-6);
        }
        let h1 = FormField::constant(&hess_one_form());
        let f = hess_one_solution(1.0, 1.0);
        for x in &pts {
            assert!(ma_operator(&h1, &f, x, DEFAULT_H).unwrap().abs() < 1e-6);
        }
        assert!(matches!(f.gradient(&[1.0, -1.0, 0.0], DEFAULT_H), Err(Error::Domain(_))));
    }

    #[test]
    fn quadrature_matches_gradient() {
        let f = hess_one_solution(0.5, 1.0);
        let x = [1.0, 1.2, 0.7];
        let g = f.gradient(&x, DEFAULT_H).unwrap();
        let h = 1e-5;
        let fd = (f.value(&[x[0] + h, x[1], x[2]]).unwrap() - f.value(&[x[0] - h, x[1], x[2]]).unwrap()) / (2.0 * h);
        assert!((fd - g[0]).abs() < 1e-6);
    }

    #[test]
    fn generalized_solution() {
        let s = SymplecticSpace::<f64>::standard();
        let pts = SampleBox::cube(3, 0.5, 2.0).sample3(20, 2).unwrap();
        for (g, b) in [(2.0, 1.0), (0.0, 0.0), (5.0, 3.0)] {
            let w = FormField::constant(&cs_form(&rat(g as i64, 1)));
            let r = check_generalized_solution(&cs_generalized_solution(g, b), &w, &s, &pts, DEFAULT_H, 1e-6).unwrap();
            assert!(r.pass, "γ={g} b={b}: {r:?}");
        }
        assert_eq!(cs_generalized_solution(2.0, 1.0).rank(&[1.0, 1.0, 1.0], DEFAULT_H).unwrap(), 3);
    }

    #[test]
    fn octonion_basics() {
        let e = |i| Octonion::<f64>::basis(i);
        assert_eq!(e(1).mul(&e(2)), e(3));
        assert_eq!(e(1).mul(&e(1)), Octonion([-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        assert_ne!(e(1).mul(&e(2)).mul(&e(4)), e(1).mul(&e(2).mul(&e(4))));
        let im = |i: usize| -> [Rational; 7] { std::array::from_fn(|j| rat((j + 1 == i) as i64, 1)) };
        for i in 1..8 {
            for j in 1..8 {
                for k in 1..8 {
                    let v = associative_form(&im(i), &im(j), &im(k));
                    assert!([rat(-1, 1), rat(0, 1), rat(1, 1)].contains(&v));
                }
            }
        }
    }

    #[test]
    fn s6_examples() {
        let x = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let inv = s6_invariant(&TangentFrame::standard(&x).unwrap()).unwrap();
        assert!((inv.lambda + 1.0).abs() < 1e-9);
        let other = s6_invariant(&TangentFrame::seeded(&x, 9).unwrap()).unwrap();
        assert!((other.lambda - inv.lambda).abs() < 1e-9);
        assert!(other.k.approx_eq(&other.i_x.scale(&S6_K_SIGN), 1e-8));
        let r = s6_demo(25, 4).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(TangentFrame::standard(&[2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn cs_demo_passes() {
        for g in [rat(0, 1), rat(2, 1)] {
            let r = cs_demo(&g, 1.0, 20, 0, DEFAULT_H, 1e-6).unwrap();
            assert!(r.pass, "{r:?}");
            assert_eq!(r.regular_solution.is_some(), g == rat(0, 1));
        }
    }
}
