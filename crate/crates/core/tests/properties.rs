use maforms::classifier::classify;
use maforms::cli::FormDocument;
use maforms::exterior::{dimension, KForm};
use maforms::fields::{d_exact, FormField, Polynomial};
use maforms::hitchin::{hitchin_k, pfaffian};
use maforms::invariants::{compat_q_k, q_form};
use maforms::linalg::LinearMap6;
use maforms::scalar::{rat, Rational};
use maforms::symplectic::SymplecticSpace;
use proptest::prelude::*;

type Q = KForm<Rational>;

fn rational() -> impl Strategy<Value = Rational> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

fn form(k: usize) -> impl Strategy<Value = Q> {
    prop::collection::vec(rational(), dimension(k)).prop_map(move |c| Q::from_coeffs(k, c).unwrap())
}

fn effective() -> impl Strategy<Value = Q> {
    form(3).prop_map(|w| SymplecticSpace::standard().project_effective(&w).unwrap())
}

/// `[[I, S], [0, I]]` with S symmetric, times `[[I, 0], [T, I]]`; both preserve Ω₀.
fn symplectic_map() -> impl Strategy<Value = LinearMap6<Rational>> {
    (prop::collection::vec(rational(), 6), prop::collection::vec(rational(), 6)).prop_map(|(s, t)| {
        let sym = |v: &[Rational], i: usize, j: usize| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            v[a * 3 + b - a * (a + 1) / 2].clone()
        };
        let upper = LinearMap6::from_fn(|i, j| match (i < 3, j < 3) {
            _ if i == j => rat(1, 1),
            (true, false) => sym(&s, i, j - 3),
            _ => rat(0, 1),
        });
        let lower = LinearMap6::from_fn(|i, j| match (i < 3, j < 3) {
            _ if i == j => rat(1, 1),
            (false, true) => sym(&t, i - 3, j),
            _ => rat(0, 1),
        });
        upper.compose(&lower)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wedge_is_graded_commutative(a in form(1), b in form(2), c in form(3)) {
        prop_assert_eq!(a.wedge(&c).unwrap(), -c.wedge(&a).unwrap());
        prop_assert_eq!(b.wedge(&c).unwrap(), c.wedge(&b).unwrap());
        prop_assert_eq!(a.wedge(&b).unwrap().wedge(&a).unwrap(), Q::zero(4));
    }

    #[test]
    fn wedge_is_associative(a in form(1), b in form(2), c in form(2)) {
        prop_assert_eq!(a.wedge(&b).unwrap().wedge(&c).unwrap(), a.wedge(&b.wedge(&c).unwrap()).unwrap());
    }

    #[test]
    fn top_bot_commutator(w1 in form(1), w2 in form(2), w3 in form(3)) {
        let s = SymplecticSpace::standard();
        for (k, w) in [(1i64, w1), (2, w2), (3, w3)] {
            let bt = s.bot(&s.top(&w).unwrap()).unwrap();
            // ⊥ of a 1-form is zero
            let tb = if k < 2 { Q::zero(k as usize) } else { s.top(&s.bot(&w).unwrap()).unwrap() };
            prop_assert_eq!(bt - tb, w.scale(&rat(3 - k, 1)));
        }
    }

    #[test]
    fn k_squared_is_lambda(w in effective()) {
        let s = SymplecticSpace::standard();
        let k = hitchin_k(&w, s.theta()).unwrap();
        let lambda = pfaffian(&w, s.theta()).unwrap();
        prop_assert_eq!(k.compose(&k), LinearMap6::identity().scale(&lambda));
    }

    #[test]
    fn q_is_half_omega_k(w in effective()) {
        let s = SymplecticSpace::standard();
        let r = compat_q_k(&w, &s).unwrap();
        if !r.q.is_zero() {
            prop_assert_eq!(r.ratio(), Some(rat(1, 2)));
        }
    }

    #[test]
    fn invariants_are_symplectic_invariants(w in effective(), a in symplectic_map()) {
        let s = SymplecticSpace::standard();
        prop_assert_eq!(&s.omega().pullback(&a), s.omega());
        let moved = w.pullback(&a);
        prop_assert!(s.is_effective(&moved));
        prop_assert_eq!(pfaffian(&moved, s.theta()).unwrap(), pfaffian(&w, s.theta()).unwrap());
        let (c0, r0) = classify(&w, &s).unwrap();
        let (c1, r1) = classify(&moved, &s).unwrap();
        prop_assert_eq!(c0, c1);
        prop_assert_eq!(r0.signature, r1.signature);
    }

    #[test]
    fn class_ignores_sign_and_scale(w in effective(), c in 1i64..=5) {
        let s = SymplecticSpace::standard();
        let (base, _) = classify(&w, &s).unwrap();
        prop_assert_eq!(classify(&-w.clone(), &s).unwrap().0, base);
        prop_assert_eq!(classify(&w.scale(&rat(c, 2)), &s).unwrap().0, base);
        prop_assert_eq!(q_form(&-w.clone(), &s).unwrap(), q_form(&w, &s).unwrap());
    }

    #[test]
    fn pullback_is_contravariant(w in form(3), a in symplectic_map(), b in symplectic_map()) {
        prop_assert_eq!(w.pullback(&a.compose(&b)), w.pullback(&a).pullback(&b));
    }

    #[test]
    fn documents_roundtrip(w in form(3)) {
        let text = serde_json::to_string(&FormDocument::from_form(&w)).unwrap();
        prop_assert_eq!(FormDocument::parse(&text).unwrap().form().unwrap(), w);
    }

    #[test]
    fn d_squared_vanishes(coeffs in prop::collection::vec((0u32..3, 0usize..6, rational()), 1..6)) {
        let mut polys = vec![Polynomial::zero(); dimension(1)];
        for (i, (deg, var, c)) in coeffs.into_iter().enumerate() {
            let mono = &Polynomial::var(var).pow(deg) * &Polynomial::var((var + i) % 6);
            polys[i % 6] = &polys[i % 6] + &mono.scale(&c);
        }
        let w = FormField::from_polys(1, polys).unwrap();
        let dd = d_exact(&d_exact(&w).unwrap()).unwrap();
        prop_assert!(dd.polys().unwrap().iter().all(|p| p.is_zero()));
    }
}
