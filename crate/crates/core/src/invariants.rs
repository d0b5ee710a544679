//! The Lychagin–Roubtsov quadratic invariant `q_ω(X) = −¼⊥²(i_Xω∧i_Xω)`,
//! its inertia, the characteristic pencil of `i_Xω`, and sp(3) membership.

use nalgebra::{Matrix6, SymmetricEigen};

use crate::error::{Error, Result};
use crate::exterior::{KForm, Vector6, DIM};
use crate::hitchin::hitchin_k;
use crate::linalg::LinearMap6;
use crate::scalar::Scalar;
use crate::symplectic::SymplecticSpace;

/// Signatures are reported as `(positive, negative)`: row 2 computes to a
/// negative definite form and reads `(0,6)`.
pub const SIGNATURE_POS_FIRST: bool = true;

/// Symmetric bilinear form `Q(X,Y) = Xᵀ M Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadForm6<S> {
    pub m: LinearMap6<S>,
}

impl<S: Scalar> QuadForm6<S> {
    pub fn new(m: LinearMap6<S>) -> Self {
        Self { m }
    }

    pub fn eval(&self, x: &Vector6<S>) -> S {
        self.bilinear(x, x)
    }

    pub fn bilinear(&self, x: &Vector6<S>, y: &Vector6<S>) -> S {
        let my = self.m.apply(y);
        (0..DIM).fold(S::zero(), |acc, i| acc + x[i].clone() * my[i].clone())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.m.approx_eq(&self.m.transpose(), tol)
    }

    pub fn scale(&self, c: &S) -> Self {
        Self { m: self.m.scale(c) }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn to_f64(&self) -> QuadForm6<f64> {
        QuadForm6 { m: self.m.to_f64() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

impl Signature {
    pub fn rank(&self) -> usize {
        self.pos + self.neg
    }

    /// The pair in reporting order.
    pub fn ordered_pair(&self) -> (usize, usize) {
        if SIGNATURE_POS_FIRST {
            (self.pos, self.neg)
        } else {
            (self.neg, self.pos)
        }
    }
}

fn effective_checked<S: Scalar>(w: &KForm<S>, s: &SymplecticSpace<S>) -> Result<()> {
    if w.grade() != 3 {
        return Err(Error::WrongGrade { expected: 3, got: w.grade() });
    }
    let ok = if S::EXACT { s.is_effective(w) } else { s.is_effective_tol(w, 1e-9 * (1.0 + w.max_abs()).powi(1)) };
    if ok {
        Ok(())
    } else {
        Err(Error::NotEffective)
    }
}

/// `Q_ab = −¼ ⊥²(i_{e_a}ω ∧ i_{e_b}ω)` for effective ω.
pub fn q_form<S: Scalar>(w: &KForm<S>, s: &SymplecticSpace<S>) -> Result<QuadForm6<S>> {
    effective_checked(w, s)?;
    let contractions = (0..DIM).map(|a| w.interior_basis(a)).collect::<Result<Vec<_>>>()?;
    let quarter = S::from_ratio(-1, 4);
    let mut m = LinearMap6::zero();
    for a in 0..DIM {
        for b in a..DIM {
            let four = contractions[a].wedge(&contractions[b])?;
            let v = s.bot(&s.bot(&four)?)?.coeffs()[0].clone() * quarter.clone();
            m.m[a][b] = v.clone();
            m.m[b][a] = v;
        }
    }
    Ok(QuadForm6 { m })
}

/// The symmetric form `(X, Y) ↦ ½(Ω(KX, Y) + Ω(KY, X))`, whose diagonal is
/// `Ω(K_ωX, X)`.
pub fn omega_k_form<S: Scalar>(k: &LinearMap6<S>, s: &SymplecticSpace<S>) -> QuadForm6<S> {
    // Ω(KX, Y) = Xᵀ Kᵀ W Y
    let b = k.transpose().compose(s.matrix());
    let half = S::from_ratio(1, 2);
    QuadForm6 { m: b.add(&b.transpose()).scale(&half) }
}

/// Both sides of `q_ω(X) = Ω(K_ωX, X)` as symmetric matrices.
#[derive(Clone, Debug)]
pub struct CompatResidual<S> {
    pub q: QuadForm6<S>,
    pub omega_k: QuadForm6<S>,
    pub residual: LinearMap6<S>,
}

impl<S: Scalar> CompatResidual<S> {
    pub fn holds(&self, tol: f64) -> bool {
        if S::EXACT {
            self.residual.is_zero()
        } else {
            self.residual.max_abs() <= tol
        }
    }

    /// Constant `c` with `q = c·Ω(K·,·)`, when one exists.
    pub fn ratio(&self) -> Option<S> {
        let (mut found, mut ratio): (bool, Option<S>) = (false, None);
        for i in 0..DIM {
            for j in 0..DIM {
                let d = self.omega_k.m.m[i][j].clone();
                let q = self.q.m.m[i][j].clone();
                if d.is_zero() {
                    if !q.is_zero() {
                        return None;
                    }
                    continue;
                }
                let r = q.checked_div(&d).ok()?;
                match &ratio {
                    None => ratio = Some(r),
                    Some(prev) if *prev != r => return None,
                    _ => {}
                }
                found = true;
            }
        }
        if found {
            ratio
        } else {
            None
        }
    }
}

pub fn compat_q_k<S: Scalar>(w: &KForm<S>, s: &SymplecticSpace<S>) -> Result<CompatResidual<S>> {
    let q = q_form(w, s)?;
    let k = hitchin_k(w, s.theta())?;
    let omega_k = omega_k_form(&k, s);
    let residual = q.m.sub(&omega_k.m);
    Ok(CompatResidual { q, omega_k, residual })
}

/// Sylvester inertia. Exact: symmetric congruence elimination over the
/// rationals. Float: eigenvalue signs, `|μ| ≤ tol·(1 + max|Q|)` counted as 0.
pub fn signature<S: Scalar>(q: &QuadForm6<S>, tol: f64) -> Signature {
    if S::EXACT {
        congruence_inertia(q.m.to_rows())
    } else {
        let f = q.m.to_f64();
        let mat = Matrix6::from_fn(|i, j| 0.5 * (f.m[i][j] + f.m[j][i]));
        let eig = SymmetricEigen::new(mat);
        let thresh = tol * (1.0 + f.max_abs());
        let mut sig = Signature { pos: 0, neg: 0, zero: 0 };
        for mu in eig.eigenvalues.iter() {
            if mu.abs() <= thresh {
                sig.zero += 1;
            } else if *mu > 0.0 {
                sig.pos += 1;
            } else {
                sig.neg += 1;
            }
        }
        sig
    }
}

fn congruence_inertia<S: Scalar>(mut a: Vec<Vec<S>>) -> Signature {
    let n = a.len();
    let mut sig = Signature { pos: 0, neg: 0, zero: 0 };
    for k in 0..n {
        let diag = (k..n).find(|&i| !a[i][i].is_zero());
        let pivot = match diag {
            Some(i) => i,
            None => {
                let off = (k..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero());
                let Some((i, j)) = off else {
                    sig.zero += n - k;
                    return sig;
                };
                // e_i ← e_i + e_j makes the diagonal entry 2a_ij
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[i][c] = a[i][c].clone() + v;
                }
                for r in 0..n {
                    let v = a[r][j].clone();
                    a[r][i] = a[r][i].clone() + v;
                }
                i
            }
        };
        a.swap(k, pivot);
        for row in a.iter_mut() {
            row.swap(k, pivot);
        }
        let p = a[k][k].clone();
        if p > S::zero() {
            sig.pos += 1;
        } else {
            sig.neg += 1;
        }
        for r in k + 1..n {
            if a[r][k].is_zero() {
                continue;
            }
            let f = a[r][k].checked_div(&p).expect("nonzero pivot");
            for c in k..n {
                let v = f.clone() * a[k][c].clone();
                a[r][c] = a[r][c].clone() - v;
            }
            for rr in k..n {
                let v = f.clone() * a[rr][k].clone();
                a[rr][r] = a[rr][r].clone() - v;
            }
        }
    }
    sig
}

/// Coefficients of `ξ ↦ (i_Xω − ξΩ)³ / Ω³ = c₃ξ³ + c₂ξ² + c₁ξ + c₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicPencil<S> {
    pub c3: S,
    pub c2: S,
    pub c1: S,
    pub c0: S,
}

pub fn char_pencil<S: Scalar>(w: &KForm<S>, s: &SymplecticSpace<S>, x: &Vector6<S>) -> Result<CubicPencil<S>> {
    effective_checked(w, s)?;
    let a = w.interior(x)?;
    let om = s.omega();
    let om2 = om.wedge(om)?;
    let om3 = om2.wedge(om)?.top().clone();
    let aa = a.wedge(&a)?;
    let ratio = |f: KForm<S>| f.top().checked_div(&om3);
    // (a − ξΩ)³ = a³ − 3ξ a²Ω + 3ξ² aΩ² − ξ³Ω³ (2-forms commute)
    Ok(CubicPencil {
        c3: -S::one(),
        c2: ratio(a.wedge(&om2)?)? * S::from_i64(3),
        c1: -(ratio(aa.wedge(om)?)? * S::from_i64(3)),
        c0: ratio(aa.wedge(&a)?)?,
    })
}

/// `Ω(KX, Y) + Ω(X, KY) = 0` for all X, Y, i.e. `KᵀW + WK = 0`.
pub fn in_sp3<S: Scalar>(k: &LinearMap6<S>, s: &SymplecticSpace<S>) -> bool {
    sp3_defect(k, s).is_zero()
}

pub fn in_sp3_tol<S: Scalar>(k: &LinearMap6<S>, s: &SymplecticSpace<S>, tol: f64) -> bool {
    sp3_defect(k, s).max_abs() <= tol
}

fn sp3_defect<S: Scalar>(k: &LinearMap6<S>, s: &SymplecticSpace<S>) -> LinearMap6<S> {
    let w = s.matrix();
    k.transpose().compose(w).add(&w.compose(k))
}
