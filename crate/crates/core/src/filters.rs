//! The prime filter `F_P` of a cont prime, queried through neighborhoods of
//! its flag of polyhedra, plus Farkas certificates for containments of
//! half-spaces.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::polyhedra::{flag_from_matrix, int_vec, is_neighborhood, FlagKind, GammaPolyhedralSet, GammaPolyhedron, IneqSystem};
use crate::prime::{compare_terms, final_kernel, min_filter_dim, require_cont, Prime};
use crate::scalars::{Rational, Scalar};
use crate::tropical::{ExponentVector, Term};

/// Half-width of the cube used by [`mindim_witness`].
pub const MINDIM_BOX_HALF_WIDTH: i64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MembershipAnswer {
    pub member: bool,
    /// First piece that is itself a neighborhood of the flag.
    pub piece_index: Option<usize>,
}

pub fn filter_member(p: &Prime, u: &GammaPolyhedralSet) -> Result<MembershipAnswer> {
    require_cont(p, "filter membership")?;
    if u.n() != p.n() {
        return Err(Error::dim(p.n(), u.n()));
    }
    let flag = flag_from_matrix(p, FlagKind::Polyhedra)?;
    for (i, piece) in u.pieces().iter().enumerate() {
        if is_neighborhood(piece, &flag)? {
            return Ok(MembershipAnswer {
                member: true,
                piece_index: Some(i),
            });
        }
    }
    Ok(MembershipAnswer {
        member: false,
        piece_index: None,
    })
}

/// Whether `{ x : a(x) <= 0 }` lies in the filter, i.e. `a <= 1` under `P`.
pub fn halfspace_member(p: &Prime, a: &Term) -> Result<bool> {
    require_cont(p, "half-space membership")?;
    Ok(compare_terms(p, a, &Term::unit(p.n()))? != Ordering::Greater)
}

/// `b * (a chi^u)^m = prod (a_l chi^{u_l})^{m_l}` with `b >= 0` in log form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub m: BigInt,
    pub m_l: Vec<BigInt>,
    pub b: Rational,
}

impl FarkasCertificate {
    /// Checks the multiplicative identity exactly.
    pub fn verify(&self, a_l: &[Term], a: &Term) -> bool {
        let Ok(target) = finite(a) else { return false };
        let Ok(factors) = a_l.iter().map(finite).collect::<Result<Vec<_>>>() else {
            return false;
        };
        if !self.m.is_positive()
            || self.b.is_negative()
            || self.m_l.len() != factors.len()
            || self.m_l.iter().any(Signed::is_negative)
        {
            return false;
        }
        let n = target.n();
        let mut gamma = Rational::zero();
        let mut u = vec![BigInt::zero(); n];
        for (k, w) in self.m_l.iter().zip(&factors) {
            if w.n() != n {
                return false;
            }
            gamma += Rational::from_integer(k.clone()) * &w.gamma;
            for (acc, e) in u.iter_mut().zip(&w.u) {
                *acc += k * BigInt::from(*e);
            }
        }
        let lhs_gamma = &self.b + Rational::from_integer(self.m.clone()) * &target.gamma;
        let lhs_u: Vec<BigInt> = target.u.iter().map(|e| &self.m * BigInt::from(*e)).collect();
        lhs_gamma == gamma && lhs_u == u
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FarkasOutcome {
    Certificate(FarkasCertificate),
    /// A point of every `R(1, a_l)` at which `a` is positive.
    Counterexample(Vec<Scalar>),
}

fn finite(t: &Term) -> Result<ExponentVector> {
    t.exponent_vector()
        .ok_or_else(|| Error::Precondition("terms need a finite coefficient".into()))
}

/// `{ x : gamma_l + <x, u_l> <= 0 for all l }`.
fn halfspace_system(n: usize, ws: &[ExponentVector]) -> Result<IneqSystem> {
    let mut sys = IneqSystem::new(n);
    for w in ws {
        sys.le(int_vec(&w.u), Scalar::from_rational(-w.gamma.clone()))?;
    }
    Ok(sys)
}

/// Decides `R(1, a_1) ∩ ... ∩ R(1, a_L) ⊆ R(1, a)` and returns either an
/// integer certificate or a point violating the containment.
pub fn farkas_certify(a_l: &[Term], a: &Term) -> Result<FarkasOutcome> {
    let target = finite(a)?;
    let n = target.n();
    let ws = a_l.iter().map(finite).collect::<Result<Vec<_>>>()?;
    if let Some(w) = ws.iter().find(|w| w.n() != n) {
        return Err(Error::dim(n, w.n()));
    }
    let region = halfspace_system(n, &ws)?;
    if !region.is_feasible()? {
        return Err(Error::Precondition("the intersection of the half-spaces is empty".into()));
    }

    // r_l >= 0, sum r_l u_l = u, sum r_l gamma_l >= gamma.
    let l = ws.len();
    let mut lp = IneqSystem::new(l);
    for j in 0..l {
        let mut e = vec![Scalar::zero(); l];
        e[j] = Scalar::from_int(-1);
        lp.le(e, Scalar::zero())?;
    }
    for i in 0..n {
        lp.equal(
            ws.iter().map(|w| Scalar::from_int(w.u[i])).collect(),
            Scalar::from_int(target.u[i]),
        )?;
    }
    lp.ge(
        ws.iter().map(|w| Scalar::from_rational(w.gamma.clone())).collect(),
        Scalar::from_rational(target.gamma.clone()),
    )?;

    if let Some(r) = lp.sample_point()? {
        let r: Vec<Rational> = r
            .iter()
            .map(|x| {
                x.to_rational()
                    .ok_or_else(|| Error::Contract("rational LP returned an irrational point".into()))
            })
            .collect::<Result<_>>()?;
        let m = r.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let mq = Rational::from_integer(m.clone());
        let m_l: Vec<BigInt> = r.iter().map(|q| (q * &mq).to_integer()).collect();
        let b = m_l
            .iter()
            .zip(&ws)
            .map(|(k, w)| Rational::from_integer(k.clone()) * &w.gamma)
            .fold(Rational::zero(), |acc, x| acc + x)
            - &mq * &target.gamma;
        let cert = FarkasCertificate { m, m_l, b };
        if !cert.verify(a_l, a) {
            return Err(Error::Contract("constructed certificate fails its identity".into()));
        }
        return Ok(FarkasOutcome::Certificate(cert));
    }

    let mut bad = region;
    bad.gt(int_vec(&target.u), Scalar::from_rational(-target.gamma.clone()))?;
    let x = bad.sample_point()?.ok_or_else(|| {
        Error::Contract("no certificate and no counterexample; Farkas alternative broken".into())
    })?;
    Ok(FarkasOutcome::Counterexample(x))
}

/// A member polyhedron of `F_P` of the smallest possible dimension: the
/// kernel hyperplanes through the vertex, cut down by a cube around it.
pub fn mindim_witness(p: &Prime) -> Result<GammaPolyhedron> {
    require_cont(p, "minimum-dimension witness")?;
    let n = p.n();
    let kernel = final_kernel(p)?;
    let flag = flag_from_matrix(p, FlagKind::Polyhedra)?;
    let center: Vec<BigInt> = flag.base().iter().map(Scalar::round).collect();
    let mut u = GammaPolyhedron::cube(&center, MINDIM_BOX_HALF_WIDTH);
    for b in kernel.lattice_basis() {
        // (ell(b), b) is in the kernel, so <xi_0, b> = -ell(b).
        let ell: Rational = kernel
            .ell()
            .iter()
            .zip(b)
            .map(|(l, k)| l * Rational::from_integer(k.clone()))
            .fold(Rational::zero(), |acc, x| acc + x);
        let bi = b
            .iter()
            .map(|x| x.to_i64().ok_or_else(|| Error::Contract("kernel vector overflows i64".into())))
            .collect::<Result<Vec<_>>>()?;
        u.push_equality(bi, -ell)?;
    }
    if !is_neighborhood(&u, &flag)? {
        return Err(Error::Contract("minimum-dimension witness is not a neighborhood".into()));
    }
    let expected = min_filter_dim(p)?;
    if u.dimension()? != Some(expected) {
        return Err(Error::Contract(format!(
            "minimum-dimension witness has dimension {:?}, expected {expected}",
            u.dimension()?
        )));
    }
    debug_assert_eq!(u.n(), n);
    Ok(u)
}

/// Recovers `s <=> t` from half-space membership answers: `s <= t` iff
/// `R(1, s/t)` is in the filter.
pub fn reconstruct_preorder<F>(oracle: F, pairs: &[(Term, Term)]) -> Result<Vec<Ordering>>
where
    F: Fn(&Term) -> Result<bool>,
{
    pairs
        .iter()
        .map(|(s, t)| {
            let le = oracle(&s.div(t)?)?;
            let ge = oracle(&t.div(s)?)?;
            match (le, ge) {
                (true, true) => Ok(Ordering::Equal),
                (true, false) => Ok(Ordering::Less),
                (false, true) => Ok(Ordering::Greater),
                (false, false) => Err(Error::Contract(
                    "oracle rejects both half-spaces; not a filter".into(),
                )),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedra::rational_polyhedral_set;
    use crate::prime::{canonicalize, DefiningMatrix};
    use crate::scalars::rat_int;
    use crate::tropical::default_vars;

    fn prime(rows: &[&[&str]]) -> Prime {
        canonicalize(&DefiningMatrix::parse(rows).unwrap()).unwrap()
    }

    fn term(text: &str) -> Term {
        Term::parse(text, &default_vars(2)).unwrap()
    }

    fn poly_set(rows: Vec<(Vec<i64>, Rational)>) -> GammaPolyhedralSet {
        GammaPolyhedron::from_rows(2, rows).unwrap().into()
    }

    #[test]
    fn membership_examples() {
        let p = prime(&[&["1", "0", "0"]]);
        let mut origin = GammaPolyhedron::full(2);
        origin.push_equality(vec![1, 0], rat_int(0)).unwrap();
        origin.push_equality(vec![0, 1], rat_int(0)).unwrap();
        let ans = filter_member(&p, &origin.clone().into()).unwrap();
        assert_eq!(ans, MembershipAnswer { member: true, piece_index: Some(0) });

        let q = prime(&[&["1", "sqrt(2)", "0"]]);
        for k in -3..=3 {
            let mut pt = GammaPolyhedron::full(2);
            pt.push_equality(vec![2, 0], rat_int(k)).unwrap();
            pt.push_equality(vec![0, 1], rat_int(0)).unwrap();
            assert!(!filter_member(&q, &pt.into()).unwrap().member);
        }
        let seg = poly_set(vec![
            (vec![-1, 0], rat_int(0)),
            (vec![1, 0], rat_int(2)),
            (vec![0, 1], rat_int(0)),
            (vec![0, -1], rat_int(0)),
        ]);
        assert!(filter_member(&q, &seg).unwrap().member);

        let blind = prime(&[&["0", "1", "0"]]);
        assert!(matches!(filter_member(&blind, &seg), Err(Error::Domain(_))));
    }

    #[test]
    fn union_membership_reports_the_piece() {
        let q = prime(&[&["1", "sqrt(2)", "0"]]);
        let far = GammaPolyhedron::cube(&[BigInt::from(10), BigInt::from(10)], 1);
        let near = GammaPolyhedron::cube(&[BigInt::from(1), BigInt::from(0)], 1);
        let set = GammaPolyhedralSet::new(vec![far, near]).unwrap();
        assert_eq!(filter_member(&q, &set).unwrap().piece_index, Some(1));
    }

    #[test]
    fn halfspace_examples() {
        let p = prime(&[&["1", "sqrt(2)", "sqrt(3)"]]);
        assert!(halfspace_member(&p, &term("t^1*x^-1")).unwrap());
        assert!(halfspace_member(&p, &term("1")).unwrap());
        let q = prime(&[&["1", "0", "0"], &["0", "1", "0"]]);
        assert!(!halfspace_member(&q, &term("x")).unwrap());
    }

    #[test]
    fn halfspace_agrees_with_the_polyhedral_path() {
        let p = prime(&[&["1", "sqrt(2)", "0"], &["0", "0", "1"]]);
        for text in ["x", "t^-2*x", "t^-1*x", "y", "y^-1", "t^1", "t^-1", "t^-1*x*y^5"] {
            let a = term(text);
            let set = rational_polyhedral_set(&[Term::unit(2).to_poly(), a.to_poly()]).unwrap();
            assert_eq!(
                halfspace_member(&p, &a).unwrap(),
                filter_member(&p, &set).unwrap().member,
                "{text}"
            );
        }
    }

    #[test]
    fn farkas_examples() {
        let out = farkas_certify(&[term("t^-1*x"), term("t^-1*y")], &term("t^-2*x*y")).unwrap();
        assert_eq!(
            out,
            FarkasOutcome::Certificate(FarkasCertificate {
                m: BigInt::from(1),
                m_l: vec![BigInt::from(1), BigInt::from(1)],
                b: rat_int(0),
            })
        );
        let out = farkas_certify(&[term("t^-1*x")], &term("t^-1*x")).unwrap();
        assert!(matches!(out, FarkasOutcome::Certificate(ref c) if c.m == BigInt::from(1) && c.b.is_zero()));

        let FarkasOutcome::Counterexample(x) = farkas_certify(&[term("t^-1*x")], &term("t^-1*y")).unwrap() else {
            panic!("containment should fail");
        };
        assert!(x[0] <= Scalar::one());
        assert!(x[1] > Scalar::one());

        let err = farkas_certify(&[term("t^1"), term("x")], &term("y")).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn farkas_with_slack_and_fractions() {
        // x <= 1 implies 2x <= 3 with slack: t^-3 * x^2 <= 1 follows from (t^-1 x)^2.
        let out = farkas_certify(&[term("t^-1*x")], &term("t^-3*x^2")).unwrap();
        let FarkasOutcome::Certificate(c) = out else { panic!() };
        assert!(c.verify(&[term("t^-1*x")], &term("t^-3*x^2")));
        assert!(c.b > rat_int(0));
        // x^2 <= t^1 implies x <= t^(1/2): needs m = 2.
        let out = farkas_certify(&[term("t^-1*x^2")], &term("t^-1/2*x")).unwrap();
        let FarkasOutcome::Certificate(c) = out else { panic!() };
        assert_eq!(c.m, BigInt::from(2));
    }

    #[test]
    fn mindim_examples() {
        let w = mindim_witness(&prime(&[&["1", "0", "0"]])).unwrap();
        assert_eq!(w.dimension().unwrap(), Some(0));
        assert!(w.contains(&[Scalar::zero(), Scalar::zero()]));
        let w = mindim_witness(&prime(&[&["1", "sqrt(2)", "0"]])).unwrap();
        assert_eq!(w.dimension().unwrap(), Some(1));
        assert!(w.contains(&[Scalar::from_int(3), Scalar::zero()]));
        assert!(!w.contains(&[Scalar::from_int(1), Scalar::one()]));
        let w = mindim_witness(&prime(&[&["1", "sqrt(2)", "sqrt(3)"]])).unwrap();
        assert_eq!(w.dimension().unwrap(), Some(2));
        // Rational shifts: the kernel hyperplane passes through the vertex.
        let w = mindim_witness(&prime(&[&["1", "1/2", "sqrt(2)"]])).unwrap();
        assert_eq!(w.dimension().unwrap(), Some(1));
        assert!(w.contains(&[Scalar::parse("1/2").unwrap(), Scalar::zero()]));
    }

    #[test]
    fn reconstruction() {
        let p = prime(&[&["1", "0", "0"], &["0", "1", "0"]]);
        let oracle = |a: &Term| halfspace_member(&p, a);
        let pairs = vec![(term("t^1"), term("x^2")), (term("t^1"), term("t^1")), (term("y"), term("x"))];
        let got = reconstruct_preorder(oracle, &pairs).unwrap();
        assert_eq!(got, vec![Ordering::Greater, Ordering::Equal, Ordering::Less]);
        let liar = |_: &Term| Ok(false);
        assert!(matches!(reconstruct_preorder(liar, &pairs), Err(Error::Contract(_))));
    }
}
