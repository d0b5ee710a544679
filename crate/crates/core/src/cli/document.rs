//! JSON interchange format for forms and form fields.
//!
//! ```json
//! {"version": 1, "scalar": "exact", "grade": 3,
//!  "coefficients": {"123": "1", "456": "3/4"}}
//! ```
//!
//! Field documents use polynomial coefficients keyed by comma-separated
//! exponent vectors, and may carry an exponential factor `e^{P(x)}`:
//!
//! ```json
//! {"version": 1, "grade": 3, "exp_factor": {"1,0,0,0,0,0": 1},
//!  "coefficients": {"123": {"0,0,0,0,0,0": 1, "2,0,0,0,0,0": "1/2"}}}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exterior::{dimension, KForm, MultiIndex, DIM};
use crate::fields::{CoefFn, Exponents, FormField, Polynomial};
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};
use crate::symplectic::SymplecticSpace;

pub const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    #[default]
    Exact,
    Float,
}

/// A number, an exact-rational string, or (fields only) a polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefValue {
    Number(serde_json::Number),
    Text(String),
    Poly(BTreeMap<String, NumberOrText>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberOrText {
    Number(serde_json::Number),
    Text(String),
}

impl NumberOrText {
    fn rational(&self) -> Result<Rational> {
        match self {
            Self::Number(n) => parse_rational(&n.to_string()),
            Self::Text(s) => parse_rational(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormDocument {
    pub version: u32,
    #[serde(default)]
    pub scalar: ScalarMode,
    pub grade: usize,
    pub coefficients: BTreeMap<String, CoefValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symplectic: Option<BTreeMap<String, NumberOrText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp_factor: Option<BTreeMap<String, NumberOrText>>,
}

fn parse_index(label: &str, grade: usize) -> Result<MultiIndex> {
    if label.len() != grade {
        return Err(Error::Invalid(format!("index {label:?} does not have {grade} digits")));
    }
    MultiIndex::parse_label(label)
}

fn parse_exponents(key: &str) -> Result<Exponents> {
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    if parts.len() != DIM {
        return Err(Error::Invalid(format!("exponent vector {key:?} must have {DIM} entries")));
    }
    let mut e = [0u32; DIM];
    for (slot, p) in e.iter_mut().zip(parts) {
        *slot = p.parse().map_err(|_| Error::Invalid(format!("bad exponent in {key:?}")))?;
    }
    Ok(e)
}

fn parse_poly(map: &BTreeMap<String, NumberOrText>) -> Result<Polynomial> {
    let mut p = Polynomial::zero();
    for (k, v) in map {
        p.add_term(parse_exponents(k)?, v.rational()?);
    }
    Ok(p)
}

fn format_exponents(e: &Exponents) -> String {
    e.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

impl FormDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        if doc.version != VERSION {
            return Err(Error::Invalid(format!("unsupported version {}", doc.version)));
        }
        if doc.grade > DIM {
            return Err(Error::GradeTooHigh { got: doc.grade, max: DIM });
        }
        for key in doc.coefficients.keys() {
            parse_index(key, doc.grade)?;
        }
        Ok(doc)
    }

    pub fn is_field(&self) -> bool {
        self.exp_factor.is_some() || self.coefficients.values().any(|v| matches!(v, CoefValue::Poly(_)))
    }

    /// The constant form; fails on field documents.
    pub fn form(&self) -> Result<KForm<Rational>> {
        let mut w = KForm::zero(self.grade);
        for (key, v) in &self.coefficients {
            let c = match v {
                CoefValue::Number(n) => parse_rational(&n.to_string())?,
                CoefValue::Text(s) => parse_rational(s)?,
                CoefValue::Poly(_) => return Err(Error::Invalid("document has polynomial coefficients".into())),
            };
            w.set(parse_index(key, self.grade)?, c);
        }
        Ok(w)
    }

    pub fn field(&self) -> Result<FormField> {
        let mut polys = vec![Polynomial::zero(); dimension(self.grade)];
        for (key, v) in &self.coefficients {
            let p = match v {
                CoefValue::Number(n) => Polynomial::constant(parse_rational(&n.to_string())?),
                CoefValue::Text(s) => Polynomial::constant(parse_rational(s)?),
                CoefValue::Poly(m) => parse_poly(m)?,
            };
            polys[parse_index(key, self.grade)?.position()] = p;
        }
        match &self.exp_factor {
            None => FormField::from_polys(self.grade, polys),
            Some(m) => {
                let e = parse_poly(m)?;
                let coeffs = polys
                    .into_iter()
                    .map(|p| {
                        let e = e.clone();
                        CoefFn::BlackBox(std::sync::Arc::new(move |x: &[f64; DIM]| e.eval(x).exp() * p.eval(x)))
                    })
                    .collect();
                FormField::from_coeffs(self.grade, coeffs)
            }
        }
    }

    pub fn symplectic_form(&self) -> Result<KForm<Rational>> {
        match &self.symplectic {
            None => Ok(SymplecticSpace::<Rational>::standard().omega().clone()),
            Some(m) => {
                let mut w = KForm::zero(2);
                for (k, v) in m {
                    w.set(parse_index(k, 2)?, v.rational()?);
                }
                Ok(w)
            }
        }
    }

    pub fn from_form<S: JsonScalar>(w: &KForm<S>) -> Self {
        let coefficients = w.terms().filter(|(_, c)| !c.is_zero()).map(|(m, c)| (m.label(), c.coef_value())).collect();
        Self {
            version: VERSION,
            scalar: if S::EXACT { ScalarMode::Exact } else { ScalarMode::Float },
            grade: w.grade(),
            coefficients,
            symplectic: None,
            exp_factor: None,
        }
    }

    pub fn from_polys(grade: usize, polys: &[&Polynomial]) -> Self {
        let coefficients = MultiIndex::all(grade)
            .zip(polys)
            .filter(|(_, p)| !p.is_zero())
            .map(|(m, p)| {
                let map =
                    p.terms().map(|(e, c)| (format_exponents(e), NumberOrText::Text(format_rational(c)))).collect();
                (m.label(), CoefValue::Poly(map))
            })
            .collect();
        Self { version: VERSION, scalar: ScalarMode::Exact, grade, coefficients, symplectic: None, exp_factor: None }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }
}

/// Scalars that can be written into reports and documents.
pub trait JsonScalar: Scalar {
    fn json(&self) -> Value;
    fn coef_value(&self) -> CoefValue;
}

impl JsonScalar for Rational {
    fn json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn coef_value(&self) -> CoefValue {
        CoefValue::Text(format_rational(self))
    }
}

impl JsonScalar for f64 {
    fn json(&self) -> Value {
        serde_json::Number::from_f64(*self).map_or(Value::Null, Value::Number)
    }

    fn coef_value(&self) -> CoefValue {
        serde_json::Number::from_f64(*self).map_or(CoefValue::Text(self.to_string()), CoefValue::Number)
    }
}
