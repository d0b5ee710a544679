//! Exterior algebra of a fixed 6-dimensional space.
//!
//! Forms are stored densely: a grade-k form keeps C(6,k) coefficients indexed
//! by strictly increasing multi-indices in lexicographic order. Basis vectors
//! are `e_0..e_5` internally (`e₁..e₆` in documents and display), identified
//! with the Darboux coordinates `(q₁,q₂,q₃,p₁,p₂,p₃)`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Neg, Sub};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::LinearMap6;
use crate::scalar::{ComplexScalar, Scalar};

pub const DIM: usize = 6;

struct Tables {
    masks: [Vec<u8>; DIM + 1],
    pos: [usize; 64],
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut masks: [Vec<u8>; DIM + 1] = Default::default();
        let mut pos = [0usize; 64];
        for (k, slot) in masks.iter_mut().enumerate() {
            let mut out = Vec::new();
            lex_subsets(0, k, 0, &mut out);
            for (p, m) in out.iter().enumerate() {
                pos[*m as usize] = p;
            }
            *slot = out;
        }
        Tables { masks, pos }
    })
}

fn lex_subsets(start: usize, remaining: usize, acc: u8, out: &mut Vec<u8>) {
    if remaining == 0 {
        out.push(acc);
        return;
    }
    for i in start..=(DIM - remaining) {
        lex_subsets(i + 1, remaining - 1, acc | (1 << i), out);
    }
}

/// Number of coefficients of a grade-k form.
pub fn dimension(grade: usize) -> usize {
    tables().masks[grade].len()
}

/// Sign of `e_a ∧ e_b` relative to the sorted basis monomial of `a | b`;
/// zero if the index sets overlap.
pub(crate) fn merge_sign(a: u8, b: u8) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut inversions = 0;
    for j in 0..DIM {
        if b & (1 << j) != 0 {
            inversions += (a >> (j + 1)).count_ones();
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Strictly increasing index tuple, stored as a bit mask over `0..6`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(u8);

impl MultiIndex {
    /// From zero-based indices; they must be strictly increasing.
    pub fn new(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u8;
        let mut last: Option<usize> = None;
        for &i in indices {
            if i >= DIM || last.is_some_and(|l| l >= i) {
                return Err(Error::Invalid(format!("multi-index {indices:?} is not strictly increasing in 0..6")));
            }
            mask |= 1 << i;
            last = Some(i);
        }
        Ok(Self(mask))
    }

    pub fn from_mask(mask: u8) -> Self {
        Self(mask & 0x3f)
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn indices(self) -> Vec<usize> {
        (0..DIM).filter(|i| self.0 & (1 << i) != 0).collect()
    }

    pub fn position(self) -> usize {
        tables().pos[self.0 as usize]
    }

    /// All multi-indices of a grade, lexicographically.
    pub fn all(grade: usize) -> impl Iterator<Item = MultiIndex> {
        tables().masks[grade].iter().map(|&m| MultiIndex(m))
    }

    pub fn at(grade: usize, position: usize) -> MultiIndex {
        MultiIndex(tables().masks[grade][position])
    }

    /// One-based digit string, e.g. `"126"`; the empty index is `""`.
    pub fn label(self) -> String {
        self.indices().iter().map(|i| char::from(b'1' + *i as u8)).collect()
    }

    pub fn parse_label(s: &str) -> Result<Self> {
        let idx: Vec<usize> = s
            .chars()
            .map(|c| match c {
                '1'..='6' => Ok(c as usize - '1' as usize),
                _ => Err(Error::Invalid(format!("bad index digit {c:?} in {s:?}"))),
            })
            .collect::<Result<_>>()?;
        Self::new(&idx)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.label())
    }
}

#[derive(Clone, PartialEq)]
pub struct Vector6<S>(pub [S; DIM]);

impl<S: Scalar> Vector6<S> {
    pub fn zero() -> Self {
        Self(std::array::from_fn(|_| S::zero()))
    }

    pub fn basis(i: usize) -> Self {
        Self(std::array::from_fn(|j| if i == j { S::one() } else { S::zero() }))
    }

    pub fn from_fn(f: impl FnMut(usize) -> S) -> Self {
        Self(std::array::from_fn(f))
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_fn(|i| self.0[i].clone() * c.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Vector6<T> {
        Vector6::from_fn(|i| f(&self.0[i]))
    }
}

impl<S: Scalar> Add for Vector6<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::from_fn(|i| self.0[i].clone() + o.0[i].clone())
    }
}

impl<S: Scalar> Sub for Vector6<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::from_fn(|i| self.0[i].clone() - o.0[i].clone())
    }
}

impl<S> Index<usize> for Vector6<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.0[i]
    }
}

impl<S: fmt::Debug> fmt::Debug for Vector6<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Element of Λ²(V), coefficients over 2-element multi-indices.
#[derive(Clone, PartialEq, Debug)]
pub struct Bivector6<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Bivector6<S> {
    pub fn zero() -> Self {
        Self { coeffs: vec![S::zero(); dimension(2)] }
    }

    /// `e_i ∧ e_j` for zero-based `i != j` (antisymmetric in the pair).
    pub fn basis(i: usize, j: usize) -> Self {
        let mut b = Self::zero();
        b.add_term(i, j, S::one());
        b
    }

    /// `x ∧ y` for two vectors.
    pub fn wedge(x: &Vector6<S>, y: &Vector6<S>) -> Self {
        let mut b = Self::zero();
        for m in MultiIndex::all(2) {
            let ix = m.indices();
            let (i, j) = (ix[0], ix[1]);
            b.coeffs[m.position()] = x[i].clone() * y[j].clone() - x[j].clone() * y[i].clone();
        }
        b
    }

    pub fn add_term(&mut self, i: usize, j: usize, c: S) {
        assert!(i != j && i < DIM && j < DIM);
        let (lo, hi, c) = if i < j { (i, j, c) } else { (j, i, -c) };
        let p = MultiIndex((1 << lo) | (1 << hi)).position();
        self.coeffs[p] = self.coeffs[p].clone() + c;
    }

    pub fn coeff(&self, m: MultiIndex) -> &S {
        &self.coeffs[m.position()]
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }
}

/// A homogeneous exterior form on the 6-dimensional space.
#[derive(Clone, PartialEq)]
pub struct KForm<S> {
    grade: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> KForm<S> {
    pub fn zero(grade: usize) -> Self {
        assert!(grade <= DIM, "grade {grade} > 6");
        Self { grade, coeffs: vec![S::zero(); dimension(grade)] }
    }

    pub fn scalar(s: S) -> Self {
        Self { grade: 0, coeffs: vec![s] }
    }

    pub fn from_coeffs(grade: usize, coeffs: Vec<S>) -> Result<Self> {
        if grade > DIM {
            return Err(Error::GradeTooHigh { got: grade, max: DIM });
        }
        if coeffs.len() != dimension(grade) {
            return Err(Error::Invalid(format!(
                "grade {grade} needs {} coefficients, got {}",
                dimension(grade),
                coeffs.len()
            )));
        }
        Ok(Self { grade, coeffs })
    }

    /// The monomial `e_{i1}∧…∧e_{ik}` for zero-based indices in any order
    /// (sign of the sorting permutation applied; repeated indices give 0).
    pub fn monomial(indices: &[usize]) -> Self {
        let mut out = Self::zero(indices.len());
        let mut acc = 0u8;
        let mut sign = 1;
        for &i in indices {
            assert!(i < DIM, "index {i} out of range");
            sign *= merge_sign(acc, 1 << i);
            acc |= 1 << i;
        }
        if sign != 0 && acc.count_ones() as usize == indices.len() {
            out.coeffs[MultiIndex(acc).position()] = S::from_i64(sign as i64);
        }
        out
    }

    /// Same as [`KForm::monomial`] with one-based indices, matching the
    /// e₁..e₆ notation.
    pub fn e(indices: &[usize]) -> Self {
        let zero_based: Vec<usize> = indices.iter().map(|i| i - 1).collect();
        Self::monomial(&zero_based)
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn get(&self, m: MultiIndex) -> &S {
        debug_assert_eq!(m.grade(), self.grade);
        &self.coeffs[m.position()]
    }

    pub fn set(&mut self, m: MultiIndex, v: S) {
        assert_eq!(m.grade(), self.grade, "index grade mismatch");
        self.coeffs[m.position()] = v;
    }

    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, &S)> {
        MultiIndex::all(self.grade).zip(self.coeffs.iter())
    }

    /// Coefficient of a grade-6 form (its ratio to e₁∧…∧e₆).
    pub fn top(&self) -> &S {
        assert_eq!(self.grade, DIM, "top() on grade {}", self.grade);
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.is_negligible(tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.grade == other.grade && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn scale(&self, c: &S) -> Self {
        Self { grade: self.grade, coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect() }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> KForm<T> {
        KForm { grade: self.grade, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> KForm<f64> {
        self.map(|c| c.to_f64())
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        let grade = self.grade + other.grade;
        if grade > DIM {
            return Err(Error::GradeOverflow(self.grade, other.grade));
        }
        let mut out = Self::zero(grade);
        for (a, ca) in self.terms() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in other.terms() {
                let s = merge_sign(a.0, b.0);
                if s == 0 || cb.is_zero() {
                    continue;
                }
                let p = MultiIndex(a.0 | b.0).position();
                let prod = ca.clone() * cb.clone();
                out.coeffs[p] = if s > 0 { out.coeffs[p].clone() + prod } else { out.coeffs[p].clone() - prod };
            }
        }
        Ok(out)
    }

    /// Contraction with the basis vector `e_j` (zero-based).
    pub fn interior_basis(&self, j: usize) -> Result<Self> {
        if self.grade == 0 {
            return Err(Error::GradeTooLow { got: 0, min: 1 });
        }
        let mut out = Self::zero(self.grade - 1);
        let bit = 1u8 << j;
        for (m, c) in self.terms() {
            if m.0 & bit == 0 || c.is_zero() {
                continue;
            }
            // number of indices of m before j
            let before = (m.0 & (bit - 1)).count_ones();
            let p = MultiIndex(m.0 & !bit).position();
            out.coeffs[p] = if before.is_multiple_of(2) {
                out.coeffs[p].clone() + c.clone()
            } else {
                out.coeffs[p].clone() - c.clone()
            };
        }
        Ok(out)
    }

    /// `i_X ω`.
    pub fn interior(&self, x: &Vector6<S>) -> Result<Self> {
        if self.grade == 0 {
            return Err(Error::GradeTooLow { got: 0, min: 1 });
        }
        let mut out = Self::zero(self.grade - 1);
        for j in 0..DIM {
            if x[j].is_zero() {
                continue;
            }
            out = out + self.interior_basis(j)?.scale(&x[j]);
        }
        Ok(out)
    }

    /// `i_B ω` with `i_{X∧Y} = i_Y ∘ i_X`.
    pub fn interior_bivector(&self, b: &Bivector6<S>) -> Result<Self> {
        if self.grade < 2 {
            return Err(Error::GradeTooLow { got: self.grade, min: 2 });
        }
        let mut out = Self::zero(self.grade - 2);
        for m in MultiIndex::all(2) {
            let c = b.coeff(m);
            if c.is_zero() {
                continue;
            }
            let ix = m.indices();
            let term = self.interior_basis(ix[0])?.interior_basis(ix[1])?;
            out = out + term.scale(c);
        }
        Ok(out)
    }

    /// `ω(v₁,…,v_k)` with the determinant convention
    /// `(e₁∧…∧e_k)(e₁,…,e_k) = 1`.
    pub fn evaluate(&self, vectors: &[Vector6<S>]) -> Result<S> {
        if vectors.len() != self.grade {
            return Err(Error::WrongGrade { expected: self.grade, got: vectors.len() });
        }
        let mut total = S::zero();
        for (m, c) in self.terms() {
            if c.is_zero() {
                continue;
            }
            let ix = m.indices();
            let minor: Vec<Vec<S>> = ix.iter().map(|&row| vectors.iter().map(|v| v[row].clone()).collect()).collect();
            total = total + c.clone() * crate::linalg::det(&minor);
        }
        Ok(total)
    }

    /// Pullback by a linear map: `(M*ω)(v₁,…) = ω(Mv₁,…)`.
    pub fn pullback(&self, m: &LinearMap6<S>) -> Self {
        let cols: Vec<Vector6<S>> = (0..DIM).map(|j| m.column(j)).collect();
        let mut out = Self::zero(self.grade);
        for idx in MultiIndex::all(self.grade) {
            let vs: Vec<Vector6<S>> = idx.indices().iter().map(|&j| cols[j].clone()).collect();
            out.coeffs[idx.position()] = self.evaluate(&vs).expect("grade matches");
        }
        out
    }
}

impl<S: Scalar> Add for KForm<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        assert_eq!(self.grade, o.grade, "adding forms of different grade");
        Self { grade: self.grade, coeffs: self.coeffs.into_iter().zip(o.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl<S: Scalar> Sub for KForm<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        assert_eq!(self.grade, o.grade, "subtracting forms of different grade");
        Self { grade: self.grade, coeffs: self.coeffs.into_iter().zip(o.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl<S: Scalar> Neg for KForm<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { grade: self.grade, coeffs: self.coeffs.into_iter().map(|a| -a).collect() }
    }
}

impl<S: Scalar> Index<MultiIndex> for KForm<S> {
    type Output = S;
    fn index(&self, m: MultiIndex) -> &S {
        self.get(m)
    }
}

impl<S: Scalar> IndexMut<MultiIndex> for KForm<S> {
    fn index_mut(&mut self, m: MultiIndex) -> &mut S {
        assert_eq!(m.grade(), self.grade);
        &mut self.coeffs[m.position()]
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in self.terms() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if self.grade == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})·e{}", m.label())?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<S: fmt::Debug + Scalar> fmt::Debug for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KForm[{}]{{", self.grade)?;
        let mut first = true;
        for (m, c) in self.terms() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{}: {:?}", m.label(), c)?;
        }
        write!(f, "}}")
    }
}

/// Complex form stored as a pair of real forms of equal grade.
#[derive(Clone, PartialEq, Debug)]
pub struct ComplexKForm<S: Scalar> {
    pub re: KForm<S>,
    pub im: KForm<S>,
}

impl<S: Scalar> ComplexKForm<S> {
    pub fn new(re: KForm<S>, im: KForm<S>) -> Result<Self> {
        if re.grade() != im.grade() {
            return Err(Error::WrongGrade { expected: re.grade(), got: im.grade() });
        }
        Ok(Self { re, im })
    }

    pub fn real(re: KForm<S>) -> Self {
        let im = KForm::zero(re.grade());
        Self { re, im }
    }

    pub fn grade(&self) -> usize {
        self.re.grade()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, c: &ComplexScalar<S>) -> Self {
        Self { re: self.re.scale(&c.re) - self.im.scale(&c.im), im: self.re.scale(&c.im) + self.im.scale(&c.re) }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { re: self.re.clone() + o.re.clone(), im: self.im.clone() + o.im.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { re: self.re.clone() - o.re.clone(), im: self.im.clone() - o.im.clone() }
    }

    pub fn wedge(&self, o: &Self) -> Result<Self> {
        Ok(Self {
            re: self.re.wedge(&o.re)? - self.im.wedge(&o.im)?,
            im: self.re.wedge(&o.im)? + self.im.wedge(&o.re)?,
        })
    }

    /// Contraction with a real vector.
    pub fn interior(&self, x: &Vector6<S>) -> Result<Self> {
        Ok(Self { re: self.re.interior(x)?, im: self.im.interior(x)? })
    }

    pub fn interior_bivector(&self, b: &Bivector6<S>) -> Result<Self> {
        Ok(Self { re: self.re.interior_bivector(b)?, im: self.im.interior_bivector(b)? })
    }

    pub fn top(&self) -> ComplexScalar<S> {
        ComplexScalar::new(self.re.top().clone(), self.im.top().clone())
    }

    pub fn to_f64(&self) -> ComplexKForm<f64> {
        ComplexKForm { re: self.re.to_f64(), im: self.im.to_f64() }
    }
}
