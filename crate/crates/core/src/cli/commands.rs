use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::cases::{
    cs_demo, cs_form, cs_generalized_solution, cs_regular_solution, hess_one_form, hess_one_solution, s6_demo,
};
use crate::classifier::{build_gcy, classify};
use crate::error::{Error, Result};
use crate::exterior::{KForm, DIM};
use crate::fields::{
    check_generalized_solution, check_regular_solution, closedness_check, flatness_check, gcy_integrability_check,
    q_metric, regime_scan, FormField, Point3, Polynomial, SampleBox, SectionMap, Submanifold3, DEFAULT_CURVATURE_TOL,
    DEFAULT_H, DEFAULT_SOLUTION_TOL,
};
use crate::hitchin::{split_pair, SplitPair};
use crate::scalar::{parse_rational, Rational, Scalar};
use crate::symplectic::SymplecticSpace;

use super::document::{FormDocument, JsonScalar, NumberOrText, ScalarMode};
use super::{Cli, Command, DemoName, Outcome, SolutionKind, EXIT_FAIL, EXIT_PASS};

const SOLUTION_SAMPLES: usize = 64;
const STRUCTURE_SAMPLES: usize = 16;
const S6_SAMPLES: usize = 100;
const SOLUTION_BOX: (f64, f64) = (0.5, 2.0);
const STRUCTURE_BOX: (f64, f64) = (-0.5, 0.5);

pub(super) fn dispatch(cli: &Cli, doc: Option<&FormDocument>) -> Result<Outcome> {
    match &cli.command {
        Command::Classify { project } => classify_document(doc.ok_or_else(missing)?, cli.scalar, *project),
        Command::Split => split_document(doc.ok_or_else(missing)?, cli.scalar),
        Command::CheckSolution { solution, poly, gamma, a, b, perturb } => {
            solution_cmd(cli, doc, *solution, poly.as_deref(), gamma, *a, *b, *perturb)
        }
        Command::CheckStructure => structure_cmd(cli, doc.ok_or_else(missing)?),
        Command::Demo { name: DemoName::Cs, gamma, b } => {
            let r = cs_demo(
                &parse_rational(gamma)?,
                *b,
                cli.samples.unwrap_or(SOLUTION_SAMPLES),
                cli.seed,
                cli.h.unwrap_or(DEFAULT_H),
                cli.tol.unwrap_or(DEFAULT_SOLUTION_TOL),
            )?;
            Ok(outcome(to_value(&r), r.pass))
        }
        Command::Demo { name: DemoName::S6, .. } => {
            let r = s6_demo(cli.samples.unwrap_or(S6_SAMPLES), cli.seed)?;
            Ok(outcome(to_value(&r), r.pass))
        }
    }
}

/// `classify` on a parsed document; `scalar` overrides the document's mode.
pub fn classify_document(doc: &FormDocument, scalar: Option<ScalarMode>, project: bool) -> Result<Outcome> {
    match scalar.unwrap_or(doc.scalar) {
        ScalarMode::Exact => classify_cmd(doc.form()?, symplectic_space(doc)?, project),
        ScalarMode::Float => classify_cmd(doc.form()?.to_f64(), symplectic_space(doc)?.to_f64()?, project),
    }
}

/// `split` on a parsed document, falling back to floats when an exact root is missing.
pub fn split_document(doc: &FormDocument, scalar: Option<ScalarMode>) -> Result<Outcome> {
    match scalar.unwrap_or(doc.scalar) {
        ScalarMode::Exact => match split_cmd(doc.form()?, symplectic_space(doc)?) {
            Err(Error::NotExact(why)) => {
                let mut o = split_cmd(doc.form()?.to_f64(), symplectic_space(doc)?.to_f64()?)?;
                o.warnings.push(format!("fell back to floats: {why}"));
                o.report["fallback"] = Value::Bool(true);
                Ok(o)
            }
            r => r,
        },
        ScalarMode::Float => split_cmd(doc.form()?.to_f64(), symplectic_space(doc)?.to_f64()?),
    }
}

fn missing() -> Error {
    Error::Invalid("this command needs a form document".into())
}

pub fn symplectic_space(doc: &FormDocument) -> Result<SymplecticSpace<Rational>> {
    SymplecticSpace::new(doc.symplectic_form()?)
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn outcome(report: Value, pass: bool) -> Outcome {
    Outcome { report, code: if pass { EXIT_PASS } else { EXIT_FAIL }, warnings: Vec::new() }
}

fn scalar_name<S: Scalar>() -> &'static str {
    if S::EXACT {
        "exact"
    } else {
        "float"
    }
}

fn classify_cmd<S: JsonScalar>(w: KForm<S>, s: SymplecticSpace<S>, project: bool) -> Result<Outcome> {
    let w = if project { s.project_effective(&w)? } else { w };
    let (class, r) = classify(&w, &s)?;
    let report = json!({
        "class": class.name(),
        "row": class.row(),
        "equation": class.equation(),
        "lambda": r.lambda.json(),
        "signature": r.signature,
        "effective": r.effective,
        "nondegenerate": r.nondegenerate,
        "regime": r.regime,
        "projected": project,
        "form": FormDocument::from_form(&w).to_json(),
        "scalar": scalar_name::<S>(),
    });
    Ok(outcome(report, true))
}

fn split_cmd<S: JsonScalar>(w: KForm<S>, s: SymplecticSpace<S>) -> Result<Outcome> {
    let theta = s.theta();
    let split = split_pair(&w, theta)?;
    let doc = |f: &KForm<S>| FormDocument::from_form(f).to_json();
    let pieces = match &split {
        SplitPair::Hyperbolic { alpha, beta } => json!({ "alpha": doc(alpha), "beta": doc(beta) }),
        SplitPair::Elliptic { alpha } => json!({
            "alpha": { "re": doc(&alpha.re), "im": doc(&alpha.im) },
            "beta": { "re": doc(&alpha.re), "im": doc(&-alpha.im.clone()) },
        }),
    };
    let gcy = build_gcy(&w, &s)?;
    let check = gcy.verify(&s, gcy.default_tolerance())?;
    let rec = split.reconstruct();
    let reconstructs = if S::EXACT { rec == w } else { rec.approx_eq(&w, gcy.default_tolerance()) };
    let report = json!({
        "branch": format!("{:?}", split.branch()),
        "split": pieces,
        "reconstructs": reconstructs,
        "dual": doc(&split.dual()),
        "normalized": {
            "form": doc(&gcy.form),
            "lambda": gcy.lambda.json(),
            "k": gcy.k.to_rows().iter().map(|r| r.iter().map(JsonScalar::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "ratio": [gcy.ratio.re.json(), gcy.ratio.im.json()],
            "check": check,
        },
        "fallback": false,
        "scalar": scalar_name::<S>(),
    });
    Ok(outcome(report, reconstructs && check.all()))
}

fn parse_box(specs: &[String], dim: usize, default: (f64, f64)) -> Result<SampleBox> {
    let mut pairs = Vec::new();
    for spec in specs.iter().flat_map(|s| s.split(';')) {
        let v: Vec<f64> = spec
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("bad box bound in {spec:?}"))))
            .collect::<Result<_>>()?;
        let [lo, hi] = v[..] else {
            return Err(Error::Invalid(format!("box entry {spec:?} must be \"lo,hi\"")));
        };
        pairs.push((lo, hi));
    }
    let pairs = match pairs.len() {
        0 => vec![default; dim],
        1 => vec![pairs[0]; dim],
        n if n >= dim && (n == dim || n == DIM) => pairs[..dim].to_vec(),
        n => return Err(Error::Invalid(format!("box has {n} axes, expected 1 or {dim}"))),
    };
    SampleBox::new(pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect())
}

fn box_json(b: &SampleBox) -> Value {
    json!({ "lo": b.lo, "hi": b.hi })
}

/// `f + ε·x³`.
fn perturbed(f: SectionMap, eps: f64, h: f64) -> SectionMap {
    let g = f.clone();
    SectionMap::black_box(
        move |x| Ok(f.value(x)? + eps * x[0].powi(3)),
        Some(std::sync::Arc::new(move |x: &Point3| {
            let mut d = g.gradient(x, h)?;
            d[0] += 3.0 * eps * x[0] * x[0];
            Ok(d)
        })),
    )
}

fn parse_section_poly(text: &str) -> Result<Polynomial> {
    let map: BTreeMap<String, NumberOrText> =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("--poly: {e}")))?;
    let mut p = Polynomial::zero();
    for (key, c) in map {
        let mut e = [0u32; DIM];
        let parts: Vec<&str> = key.split(',').map(str::trim).collect();
        if parts.len() != 3 && parts.len() != DIM {
            return Err(Error::Invalid(format!("--poly exponent {key:?} needs 3 entries")));
        }
        for (slot, t) in e.iter_mut().zip(parts) {
            *slot = t.parse().map_err(|_| Error::Invalid(format!("--poly exponent {key:?}")))?;
        }
        let c = match c {
            NumberOrText::Number(n) => parse_rational(&n.to_string())?,
            NumberOrText::Text(s) => parse_rational(&s)?,
        };
        p.add_term(e, c);
    }
    Ok(p)
}

#[allow(clippy::too_many_arguments)]
fn solution_cmd(
    cli: &Cli,
    doc: Option<&FormDocument>,
    kind: SolutionKind,
    poly: Option<&str>,
    gamma: &str,
    a: f64,
    b: f64,
    perturb: Option<f64>,
) -> Result<Outcome> {
    let h = cli.h.unwrap_or(DEFAULT_H);
    let tol = cli.tol.unwrap_or(DEFAULT_SOLUTION_TOL);
    let samples = cli.samples.unwrap_or(SOLUTION_SAMPLES);
    let bx = parse_box(&cli.sample_box, 3, SOLUTION_BOX)?;
    let points = bx.sample3(samples, cli.seed)?;
    let gamma_q = parse_rational(gamma)?;
    let g = gamma_q.to_f64();
    let form = |default: KForm<Rational>| -> Result<FormField> {
        match doc {
            Some(d) if d.is_field() => d.field(),
            Some(d) => Ok(FormField::constant(&d.form()?)),
            None => Ok(FormField::constant(&default)),
        }
    };
    let s = match doc {
        Some(d) => symplectic_space(d)?.to_f64()?,
        None => SymplecticSpace::standard(),
    };
    let eps = perturb.unwrap_or(0.0);
    let regular = |w: FormField, f: SectionMap| -> Result<(Value, bool, usize)> {
        let f = if perturb.is_some() { perturbed(f, eps, h) } else { f };
        let r = check_regular_solution(&w, &f, &points, h, tol)?;
        Ok((to_value(&r), r.pass, r.excluded.len()))
    };
    let (report, pass, excluded) = match kind {
        SolutionKind::CsRegular => regular(form(cs_form(&Rational::from_i64(0)))?, cs_regular_solution())?,
        SolutionKind::HessOne => regular(form(hess_one_form())?, hess_one_solution(a, b))?,
        SolutionKind::Poly => {
            let text = poly.ok_or_else(|| Error::Invalid("--solution poly needs --poly".into()))?;
            if doc.is_none() {
                return Err(missing());
            }
            regular(form(KForm::zero(3))?, SectionMap::poly(parse_section_poly(text)?)?)?
        }
        SolutionKind::CsGeneralized => {
            let base = cs_generalized_solution(g, b);
            // d(ε·x³) shifts the p-coordinate of the Lagrangian
            let l = if perturb.is_some() {
                Submanifold3::new(move |u| {
                    let mut p = base.point(u)?;
                    p[3] += 3.0 * eps * u[0] * u[0];
                    Ok(p)
                })
            } else {
                base
            };
            let r = check_generalized_solution(&l, &form(cs_form(&gamma_q))?, &s, &points, h, tol)?;
            (to_value(&r), r.pass, r.excluded.len())
        }
    };
    let mut o = outcome(
        json!({
            "solution": kind_name(kind),
            "gamma": crate::scalar::format_rational(&gamma_q),
            "perturb": perturb,
            "report": report,
            "box": box_json(&bx),
            "samples": samples,
            "seed": cli.seed,
            "h": h,
            "tol": tol,
            "pass": pass,
        }),
        pass,
    );
    if excluded > 0 {
        o.warnings.push(format!("{excluded} of {samples} sample points excluded"));
    }
    Ok(o)
}

fn kind_name(k: SolutionKind) -> &'static str {
    match k {
        SolutionKind::CsRegular => "cs-regular",
        SolutionKind::HessOne => "hess-one",
        SolutionKind::CsGeneralized => "cs-generalized",
        SolutionKind::Poly => "poly",
    }
}

fn structure_cmd(cli: &Cli, doc: &FormDocument) -> Result<Outcome> {
    let h = cli.h.unwrap_or(DEFAULT_H);
    let tol = cli.tol.unwrap_or(DEFAULT_SOLUTION_TOL);
    let curvature_tol = cli.tol.unwrap_or(DEFAULT_CURVATURE_TOL);
    let samples = cli.samples.unwrap_or(STRUCTURE_SAMPLES);
    let bx = parse_box(&cli.sample_box, DIM, STRUCTURE_BOX)?;
    let points = bx.sample6(samples, cli.seed)?;
    let w = doc.field()?;
    let s = symplectic_space(doc)?.to_f64()?;
    let (regime, skipped) = regime_scan(&w, &s, &points)?;
    if skipped.len() == points.len() {
        return Err(Error::Degenerate);
    }
    let closed = closedness_check(&w, &s, &points, h, tol)?;
    let integrable = gcy_integrability_check(&w, &s, &points, h, tol)?;
    let active: Vec<Vec<f64>> =
        points.iter().enumerate().filter(|(i, _)| !skipped.contains(i)).map(|(_, p)| p.to_vec()).collect();
    let flat = flatness_check(&q_metric(&w, &s), &active, h, curvature_tol)?;
    let nondegenerate = skipped.is_empty();
    let pass = nondegenerate && closed.pass && integrable.integrable && flat.pass;
    let mut o = outcome(
        json!({
            "nondegenerate": { "regime": regime, "skipped": skipped, "pass": nondegenerate },
            "closedness": closed,
            "integrability": integrable,
            "flatness": flat,
            "box": box_json(&bx),
            "samples": samples,
            "seed": cli.seed,
            "pass": pass,
        }),
        pass,
    );
    if !nondegenerate {
        o.warnings.push(format!("{} sample points are degenerate", skipped.len()));
    }
    Ok(o)
}
