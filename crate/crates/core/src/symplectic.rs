//! The symplectic structure Ω, the operators `⊤ = ·∧Ω` and `⊥ = i_{X_Ω}`,
//! effectiveness and the Hodge–Lepage–Lychagin decomposition.
//!
//! `X_Ω` is normalized so that `⊥Ω = 3`, which is the normalization under
//! which `[⊥,⊤] = (3 − k)·Id` on k-forms.

use crate::error::{Error, Result};
use crate::exterior::{Bivector6, KForm, MultiIndex, Vector6, DIM};
use crate::linalg::LinearMap6;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticSpace<S: Scalar> {
    omega: KForm<S>,
    /// `W[i][j] = Ω(e_i, e_j)`.
    matrix: LinearMap6<S>,
    /// `Γ(X) = i_X Ω` as a matrix acting on components.
    gamma: LinearMap6<S>,
    x_omega: Bivector6<S>,
    theta: KForm<S>,
}

impl<S: Scalar> SymplecticSpace<S> {
    /// Ω₀ = Σ dq_i∧dp_i = e₁∧e₄ + e₂∧e₅ + e₃∧e₆.
    pub fn standard() -> Self {
        let omega = KForm::e(&[1, 4]) + KForm::e(&[2, 5]) + KForm::e(&[3, 6]);
        Self::new(omega).expect("standard form is nondegenerate")
    }

    /// Builds the structure from an arbitrary nondegenerate 2-form.
    pub fn new(omega: KForm<S>) -> Result<Self> {
        if omega.grade() != 2 {
            return Err(Error::WrongGrade { expected: 2, got: omega.grade() });
        }
        let mut matrix = LinearMap6::zero();
        for (m, c) in omega.terms() {
            let ix = m.indices();
            matrix.m[ix[0]][ix[1]] = c.clone();
            matrix.m[ix[1]][ix[0]] = -c.clone();
        }
        let inv = matrix.inverse().map_err(|_| Error::DegenerateSymplectic)?;
        let mut x_omega = Bivector6::zero();
        for m in MultiIndex::all(2) {
            let ix = m.indices();
            // P = −W⁻¹ gives ⊥Ω = ½ tr(W⁻¹W) = 3
            x_omega.add_term(ix[0], ix[1], -inv.m[ix[0]][ix[1]].clone());
        }
        let cube = omega.wedge(&omega)?.wedge(&omega)?;
        let theta = cube.scale(&S::from_ratio(-1, 6));
        let gamma = matrix.transpose();
        Ok(Self { omega, matrix, gamma, x_omega, theta })
    }

    pub fn omega(&self) -> &KForm<S> {
        &self.omega
    }

    pub fn to_f64(&self) -> Result<SymplecticSpace<f64>> {
        SymplecticSpace::new(self.omega.to_f64())
    }

    pub fn matrix(&self) -> &LinearMap6<S> {
        &self.matrix
    }

    pub fn gamma(&self) -> &LinearMap6<S> {
        &self.gamma
    }

    pub fn x_omega(&self) -> &Bivector6<S> {
        &self.x_omega
    }

    /// θ = −(1/6)Ω³.
    pub fn theta(&self) -> &KForm<S> {
        &self.theta
    }

    /// `Γ(X) = i_X Ω` as a 1-form.
    pub fn flat(&self, x: &Vector6<S>) -> KForm<S> {
        self.omega.interior(x).expect("grade 2")
    }

    /// Ω(U, V).
    pub fn eval(&self, u: &Vector6<S>, v: &Vector6<S>) -> S {
        let mut acc = S::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                if !self.matrix.m[i][j].is_zero() {
                    acc = acc + u[i].clone() * self.matrix.m[i][j].clone() * v[j].clone();
                }
            }
        }
        acc
    }

    /// ⊤ω = ω∧Ω.
    pub fn top(&self, w: &KForm<S>) -> Result<KForm<S>> {
        if w.grade() > 4 {
            return Err(Error::GradeTooHigh { got: w.grade(), max: 4 });
        }
        w.wedge(&self.omega)
    }

    /// ⊥ω = i_{X_Ω} ω.
    pub fn bot(&self, w: &KForm<S>) -> Result<KForm<S>> {
        w.interior_bivector(&self.x_omega)
    }

    /// `⊥ω = 0`; forms of grade below 2 are trivially effective.
    pub fn is_effective(&self, w: &KForm<S>) -> bool {
        if w.grade() < 2 {
            return true;
        }
        self.bot(w).expect("grade >= 2").is_zero()
    }

    /// Tolerance version of [`SymplecticSpace::is_effective`] for floats.
    pub fn is_effective_tol(&self, w: &KForm<S>, tol: f64) -> bool {
        if w.grade() < 2 {
            return true;
        }
        self.bot(w).expect("grade >= 2").is_negligible(tol)
    }

    /// The other route to effectiveness in middle degree: ω∧Ω = 0.
    pub fn wedge_omega_vanishes(&self, w: &KForm<S>) -> Result<bool> {
        Ok(w.wedge(&self.omega)?.is_zero())
    }

    /// Unique decomposition `ω = ω₀ + ⊤ω₁ (+ ⊤²ω₂ …)` with effective parts,
    /// for grades up to 3.
    pub fn hll_decompose(&self, w: &KForm<S>) -> Result<Hll<S>> {
        match w.grade() {
            0 | 1 => Ok(Hll { parts: vec![w.clone()] }),
            2 | 3 => {
                let k = w.grade() as i64;
                // ⊥⊤ω₁ = (3 − (k−2))ω₁ for effective ω₁ of grade k−2
                let c = S::from_ratio(1, 3 - (k - 2));
                let w1 = self.bot(w)?.scale(&c);
                let w0 = w.clone() - self.top(&w1)?;
                Ok(Hll { parts: vec![w0, w1] })
            }
            g => Err(Error::GradeTooHigh { got: g, max: 3 }),
        }
    }

    pub fn project_effective(&self, w: &KForm<S>) -> Result<KForm<S>> {
        let mut h = self.hll_decompose(w)?;
        Ok(h.parts.swap_remove(0))
    }
}

/// Parts `ω₀, ω₁, …` of the Hodge–Lepage–Lychagin decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct Hll<S: Scalar> {
    pub parts: Vec<KForm<S>>,
}

impl<S: Scalar> Hll<S> {
    pub fn effective_part(&self) -> &KForm<S> {
        &self.parts[0]
    }

    /// `Σ ⊤^i ω_i`.
    pub fn reconstruct(&self, s: &SymplecticSpace<S>) -> Result<KForm<S>> {
        let mut acc = self.parts[0].clone();
        for (i, p) in self.parts.iter().enumerate().skip(1) {
            let mut t = p.clone();
            for _ in 0..i {
                t = s.top(&t)?;
            }
            acc = acc + t;
        }
        Ok(acc)
    }
}
