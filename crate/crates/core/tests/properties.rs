mod common;

use std::cmp::Ordering;

use proptest::prelude::*;

use valflag::polyhedra::{flag_from_matrix, FlagKind};
use valflag::prime::{canonicalize, compare, decide_equal, final_kernel, DefiningMatrix, EqualityVerdict};
use valflag::scalars::{rat, Scalar};
use valflag::tropical::{default_vars, Term, TropPolynomial};

use common::{random_cont_prime, random_matrix, rng, scramble};

const RADICANDS: [u64; 4] = [1, 2, 3, 6];

fn scalar() -> impl Strategy<Value = Scalar> {
    prop::collection::vec((-6i64..=6, 1i64..=4), 4).prop_map(|cs| {
        cs.iter()
            .zip(RADICANDS)
            .map(|(&(n, d), r)| Scalar::radical(rat(n, d), r))
            .sum()
    })
}

fn term(n: usize) -> impl Strategy<Value = Term> {
    ((-8i64..=8, 1i64..=3), prop::collection::vec(-3i64..=3, n))
        .prop_map(|((g, d), u)| Term::new(rat(g, d), u))
}

fn poly(n: usize) -> impl Strategy<Value = TropPolynomial> {
    prop::collection::vec(term(n), 0..4).prop_map(move |ts| TropPolynomial::from_terms(n, ts).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
        }
    }

    #[test]
    fn sign_is_ordered(a in scalar(), b in scalar()) {
        let approx = a.to_f64() - b.to_f64();
        let exact = (&a - &b).signum();
        if approx.abs() > 1e-9 {
            prop_assert_eq!(exact, approx.signum() as i8);
        }
        prop_assert_eq!((&a * &a).signum() >= 0, true);
        prop_assert_eq!((&a * &b).signum(), a.signum() * b.signum());
    }

    #[test]
    fn scalar_print_parse(a in scalar()) {
        prop_assert_eq!(Scalar::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn semiring_axioms(f in poly(2), g in poly(2), h in poly(2)) {
        prop_assert_eq!(f.add(&g).unwrap(), g.add(&f).unwrap());
        prop_assert_eq!(f.mul(&g).unwrap(), g.mul(&f).unwrap());
        prop_assert_eq!(f.add(&f).unwrap(), f.clone());
        prop_assert_eq!(f.mul(&TropPolynomial::one(2)).unwrap(), f.clone());
        prop_assert_eq!(f.add(&TropPolynomial::zero(2)).unwrap(), f.clone());
        prop_assert_eq!(
            f.mul(&g.add(&h).unwrap()).unwrap(),
            f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap()
        );
    }

    #[test]
    fn poly_print_parse(f in poly(3)) {
        let vars = default_vars(3);
        prop_assert_eq!(TropPolynomial::parse(&f.display_with(&vars), &vars).unwrap(), f);
    }

    #[test]
    fn canonical_forms(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let m = random_matrix(&mut r, n);
        let p = canonicalize(&m).unwrap();
        prop_assert_eq!(&canonicalize(p.matrix()).unwrap(), &p);
        let q = canonicalize(&scramble(&mut r, &m)).unwrap();
        prop_assert_eq!(&q, &p);
    }

    #[test]
    fn equality_is_an_equivalence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = canonicalize(&random_matrix(&mut r, 2)).unwrap();
        let b = canonicalize(&random_matrix(&mut r, 2)).unwrap();
        prop_assert!(decide_equal(&a, &a).unwrap().is_equal());
        let ab = decide_equal(&a, &b).unwrap();
        let ba = decide_equal(&b, &a).unwrap();
        prop_assert_eq!(ab.is_equal(), ba.is_equal());
        if let EqualityVerdict::Distinguished(w) = ab {
            prop_assert_ne!(a.sign(&w), b.sign(&w));
        }
    }

    #[test]
    fn kernel_elements_are_trivial(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let p = random_cont_prime(&mut r, n);
        for g in final_kernel(&p).unwrap().generators().unwrap() {
            prop_assert_eq!(p.sign(&g), 0);
            let t = g.to_term();
            prop_assert_eq!(compare(&p, &t.to_poly(), &TropPolynomial::one(n)).unwrap(), Ordering::Equal);
        }
    }

    #[test]
    fn flag_round_trip(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let p = random_cont_prime(&mut r, n);
        for kind in [FlagKind::Polyhedra, FlagKind::Cones] {
            let f = flag_from_matrix(&p, kind).unwrap();
            prop_assert_eq!(&canonicalize(&f.to_matrix().unwrap()).unwrap(), &p);
        }
    }
}

#[test]
fn defining_matrix_rejects_negative_first_column() {
    let m = DefiningMatrix::parse(&[&["0", "1"], &["-1", "0"]]);
    assert!(m.is_err());
}
