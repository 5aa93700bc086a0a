//! The semifield `Q_max` in log convention and sparse max-plus Laurent
//! polynomials over it.
//!
//! The tropical element `t^a` is stored as the rational `a`; the tropical zero
//! is `-inf`. Addition is `max`, multiplication is `+`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalars::{fmt_rational, Rational, Scalar, ScalarParser};

/// An element of `Q ∪ {-inf}` stored additively.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TropNumber {
    NegInf,
    Finite(Rational),
}

impl TropNumber {
    pub fn one() -> Self {
        TropNumber::Finite(Rational::zero())
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            TropNumber::Finite(q) => Some(q),
            TropNumber::NegInf => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, TropNumber::NegInf)
    }

    pub fn tadd(&self, other: &Self) -> Self {
        std::cmp::max(self, other).clone()
    }

    pub fn tmul(&self, other: &Self) -> Self {
        match (self, other) {
            (TropNumber::Finite(a), TropNumber::Finite(b)) => TropNumber::Finite(a + b),
            _ => TropNumber::NegInf,
        }
    }
}

impl PartialOrd for TropNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TropNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (TropNumber::NegInf, TropNumber::NegInf) => Ordering::Equal,
            (TropNumber::NegInf, _) => Ordering::Less,
            (_, TropNumber::NegInf) => Ordering::Greater,
            (TropNumber::Finite(a), TropNumber::Finite(b)) => a.cmp(b),
        }
    }
}

/// `(gamma, u)`: the exponent vector of the term `t^gamma * chi^u`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentVector {
    pub gamma: Rational,
    pub u: Vec<i64>,
}

impl ExponentVector {
    pub fn new(gamma: Rational, u: Vec<i64>) -> Self {
        Self { gamma, u }
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn to_term(&self) -> Term {
        Term::new(self.gamma.clone(), self.u.clone())
    }

    /// `(gamma, u)` as a scalar vector of length `n + 1`.
    pub fn to_scalars(&self) -> Vec<Scalar> {
        std::iter::once(Scalar::from_rational(self.gamma.clone()))
            .chain(self.u.iter().map(|&e| Scalar::from_int(e)))
            .collect()
    }
}

/// A monomial `a * chi^u` with `a` in `Q_max`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: TropNumber,
    pub exp: Vec<i64>,
}

impl Term {
    pub fn new(gamma: Rational, exp: Vec<i64>) -> Self {
        Self {
            coeff: TropNumber::Finite(gamma),
            exp,
        }
    }

    /// The unit term `1 = t^0 chi^0`.
    pub fn unit(n: usize) -> Self {
        Self::new(Rational::zero(), vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.exp.len()
    }

    pub fn exponent_vector(&self) -> Option<ExponentVector> {
        self.coeff
            .finite()
            .map(|g| ExponentVector::new(g.clone(), self.exp.clone()))
    }

    pub fn mul(&self, other: &Term) -> Result<Term> {
        check_n(self.n(), other.n())?;
        Ok(Term {
            coeff: self.coeff.tmul(&other.coeff),
            exp: self.exp.iter().zip(&other.exp).map(|(a, b)| a + b).collect(),
        })
    }

    /// Multiplicative inverse of a nonzero term.
    pub fn inv(&self) -> Result<Term> {
        match &self.coeff {
            TropNumber::Finite(g) => Ok(Term::new(-g, self.exp.iter().map(|e| -e).collect())),
            TropNumber::NegInf => Err(Error::DivisionByZero),
        }
    }

    pub fn div(&self, other: &Term) -> Result<Term> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, k: u64) -> Term {
        match &self.coeff {
            TropNumber::NegInf if k > 0 => self.clone(),
            TropNumber::NegInf => Term::unit(self.n()),
            TropNumber::Finite(g) => Term::new(
                g * Rational::from_integer(k.into()),
                self.exp.iter().map(|e| e * k as i64).collect(),
            ),
        }
    }

    pub fn to_poly(&self) -> TropPolynomial {
        let mut p = TropPolynomial::zero(self.n());
        if let TropNumber::Finite(g) = &self.coeff {
            p.terms.insert(self.exp.clone(), g.clone());
        }
        p
    }

    pub fn display_with(&self, vars: &[String]) -> String {
        match &self.coeff {
            TropNumber::NegInf => "0".to_string(),
            TropNumber::Finite(g) => fmt_term(g, &self.exp, vars),
        }
    }

    pub fn parse(text: &str, vars: &[String]) -> Result<Term> {
        let p = TropPolynomial::parse(text, vars)?;
        match p.terms.len() {
            0 => Ok(Term {
                coeff: TropNumber::NegInf,
                exp: vec![0; vars.len()],
            }),
            1 => {
                let (exp, g) = p.terms.into_iter().next().expect("one term");
                Ok(Term::new(g, exp))
            }
            _ => Err(Error::parse_at(text, 0, "expected a single term")),
        }
    }
}

/// A lexicographically ordered value in `R^{k+1} ∪ {-inf}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexValue {
    NegInf,
    Finite(Vec<Scalar>),
}

impl LexValue {
    /// Sign of the first nonzero entry; `None` for `-inf`.
    pub fn sign(&self) -> Option<i8> {
        match self {
            LexValue::NegInf => None,
            LexValue::Finite(v) => Some(lex_sign(v)),
        }
    }
}

pub fn lex_sign(v: &[Scalar]) -> i8 {
    v.iter()
        .map(Scalar::signum)
        .find(|&s| s != 0)
        .unwrap_or(0)
}

pub fn lex_cmp(a: &[Scalar], b: &[Scalar]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

impl PartialOrd for LexValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LexValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (LexValue::NegInf, LexValue::NegInf) => Ordering::Equal,
            (LexValue::NegInf, _) => Ordering::Less,
            (_, LexValue::NegInf) => Ordering::Greater,
            (LexValue::Finite(a), LexValue::Finite(b)) => lex_cmp(a, b),
        }
    }
}

/// A sparse tropical Laurent polynomial in `n` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TropPolynomial {
    n: usize,
    terms: BTreeMap<Vec<i64>, Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Mul,
}

fn check_n(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::dim(expected, found))
    }
}

impl TropPolynomial {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Term::unit(n).to_poly()
    }

    pub fn constant(gamma: Rational, n: usize) -> Self {
        Term::new(gamma, vec![0; n]).to_poly()
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = Term>) -> Result<Self> {
        let mut p = Self::zero(n);
        for t in terms {
            check_n(n, t.n())?;
            p.insert_max(t);
        }
        Ok(p)
    }

    fn insert_max(&mut self, t: Term) {
        if let TropNumber::Finite(g) = t.coeff {
            self.terms
                .entry(t.exp)
                .and_modify(|c| {
                    if g > *c {
                        *c = g.clone();
                    }
                })
                .or_insert(g);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms
            .iter()
            .map(|(e, g)| Term::new(g.clone(), e.clone()))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_n(self.n, other.n)?;
        let mut out = self.clone();
        for t in other.terms() {
            out.insert_max(t);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_n(self.n, other.n)?;
        let mut out = Self::zero(self.n);
        for a in self.terms() {
            for b in other.terms() {
                out.insert_max(a.mul(&b)?);
            }
        }
        Ok(out)
    }

    pub fn arith(&self, other: &Self, op: PolyOp) -> Result<Self> {
        match op {
            PolyOp::Add => self.add(other),
            PolyOp::Mul => self.mul(other),
        }
    }

    /// `max_u (gamma_u + <x, u>)`; `None` is `-inf`.
    pub fn eval(&self, x: &[Scalar]) -> Result<Option<Scalar>> {
        check_n(self.n, x.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(u, g)| {
                let mut v = Scalar::from_rational(g.clone());
                for (xi, &ui) in x.iter().zip(u) {
                    if ui != 0 {
                        v += &(xi * &Scalar::from_int(ui));
                    }
                }
                v
            })
            .max())
    }

    /// `max_u (r * gamma_u + <x, u>)` for `r >= 0`.
    pub fn eval_homog(&self, r: &Scalar, x: &[Scalar]) -> Result<Option<Scalar>> {
        if r.is_negative() {
            return Err(Error::Domain(format!(
                "homogenizing coordinate must be nonnegative, got {r}"
            )));
        }
        check_n(self.n, x.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(u, g)| {
                let mut v = r * &Scalar::from_rational(g.clone());
                for (xi, &ui) in x.iter().zip(u) {
                    if ui != 0 {
                        v += &(xi * &Scalar::from_int(ui));
                    }
                }
                v
            })
            .max())
    }

    pub fn display_with(&self, vars: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(u, g)| fmt_term(g, u, vars))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn parse(text: &str, vars: &[String]) -> Result<Self> {
        let mut p = PolyParser {
            inner: ScalarParser::new(text),
            vars,
        };
        let poly = p.poly()?;
        p.inner.skip_ws();
        if p.inner.pos < text.len() {
            return Err(Error::parse_at(text, p.inner.pos, "unexpected trailing input"));
        }
        Ok(poly)
    }
}

impl fmt::Display for TropPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&default_vars(self.n)))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&default_vars(self.n())))
    }
}

/// `x, y, z` for up to three variables, `x1..xn` beyond.
pub fn default_vars(n: usize) -> Vec<String> {
    if n <= 3 {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

fn fmt_term(gamma: &Rational, u: &[i64], vars: &[String]) -> String {
    let mut factors = Vec::new();
    if !gamma.is_zero() {
        factors.push(format!("t^{}", fmt_rational(gamma)));
    }
    for (name, &e) in vars.iter().zip(u) {
        match e {
            0 => {}
            1 => factors.push(name.clone()),
            _ => factors.push(format!("{name}^{e}")),
        }
    }
    if factors.is_empty() {
        "1".to_string()
    } else {
        factors.join("*")
    }
}

struct PolyParser<'a, 'v> {
    inner: ScalarParser<'a>,
    vars: &'v [String],
}

impl PolyParser<'_, '_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::parse_at(self.inner.text, self.inner.pos, message)
    }

    fn rest(&self) -> &str {
        &self.inner.text[self.inner.pos..]
    }

    fn ident(&mut self) -> Option<String> {
        self.inner.skip_ws();
        let rest = self.rest();
        let len = rest
            .char_indices()
            .take_while(|&(i, c)| c.is_ascii_alphabetic() || c == '_' || (i > 0 && c.is_ascii_digit()))
            .count();
        if len == 0 {
            return None;
        }
        let name = rest[..len].to_string();
        self.inner.pos += len;
        Some(name)
    }

    fn eat(&mut self, c: char) -> bool {
        self.inner.skip_ws();
        if self.rest().starts_with(c) {
            self.inner.pos += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<i64> {
        self.inner.skip_ws();
        let negative = self.eat('-');
        let v = self.inner.uint()?;
        let v = i64::try_from(v).map_err(|_| self.err("exponent out of range"))?;
        Ok(if negative { -v } else { v })
    }

    fn term(&mut self) -> Result<Option<Term>> {
        let n = self.vars.len();
        let mut gamma = Rational::zero();
        let mut exp = vec![0i64; n];
        let mut is_zero = false;
        loop {
            self.inner.skip_ws();
            if self.rest().starts_with(|c: char| c.is_ascii_digit()) {
                let start = self.inner.pos;
                let q = self.inner.rational()?;
                if q.is_zero() {
                    is_zero = true;
                } else if !q.is_one() {
                    self.inner.pos = start;
                    return Err(self.err("numeric factors must be 0 or 1; write coefficients as t^a"));
                }
            } else {
                let start = self.inner.pos;
                let Some(name) = self.ident() else {
                    return Err(self.err("expected a factor"));
                };
                if name == "t" {
                    if self.eat('^') {
                        gamma += self.inner.rational()?;
                    } else {
                        gamma += Rational::one();
                    }
                } else {
                    let Some(idx) = self.vars.iter().position(|v| *v == name) else {
                        self.inner.pos = start;
                        return Err(self.err(format!("unknown variable '{name}'")));
                    };
                    exp[idx] += if self.eat('^') { self.int()? } else { 1 };
                }
            }
            if !self.eat('*') {
                break;
            }
        }
        if is_zero {
            Ok(None)
        } else {
            Ok(Some(Term::new(gamma, exp)))
        }
    }

    fn poly(&mut self) -> Result<TropPolynomial> {
        let mut p = TropPolynomial::zero(self.vars.len());
        loop {
            if let Some(t) = self.term()? {
                p.insert_max(t);
            }
            if !self.eat('+') {
                return Ok(p);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{rat, rat_int};

    fn xy() -> Vec<String> {
        default_vars(2)
    }

    fn poly(text: &str) -> TropPolynomial {
        TropPolynomial::parse(text, &xy()).unwrap()
    }

    #[test]
    fn addition_is_idempotent() {
        let f = poly("t^1 + x");
        assert_eq!(f.add(&f).unwrap(), f);
    }

    #[test]
    fn product_of_variables() {
        let p = poly("x").mul(&poly("y")).unwrap();
        assert_eq!(p, TropPolynomial::from_terms(2, [Term::new(rat_int(0), vec![1, 1])]).unwrap());
    }

    #[test]
    fn square_of_binomial() {
        // (t ⊕ x)^2 = t^2 ⊕ t x ⊕ x^2; the cross term appears twice with the same coefficient.
        let f = poly("t^1 + x");
        assert_eq!(f.mul(&f).unwrap(), poly("t^2 + t^1*x + x^2"));
    }

    #[test]
    fn dimension_mismatch() {
        let f = poly("x");
        let g = TropPolynomial::one(3);
        assert_eq!(f.add(&g), Err(Error::dim(2, 3)));
    }

    #[test]
    fn evaluation() {
        let f = poly("t^1 + x");
        let r2 = Scalar::sqrt(2);
        assert_eq!(f.eval(&[r2.clone(), Scalar::zero()]).unwrap(), Some(r2.clone()));
        assert_eq!(TropPolynomial::zero(2).eval(&[r2.clone(), r2.clone()]).unwrap(), None);
        assert_eq!(
            poly("t^3").eval(&[r2.clone(), Scalar::from_int(-7)]).unwrap(),
            Some(Scalar::from_int(3))
        );
    }

    #[test]
    fn homogenized_evaluation() {
        let f = poly("t^1 + x");
        let zero = Scalar::zero();
        assert_eq!(
            f.eval_homog(&zero, &[Scalar::from_int(5), zero.clone()]).unwrap(),
            Some(Scalar::from_int(5))
        );
        let x = [Scalar::sqrt(2), zero.clone()];
        assert_eq!(f.eval_homog(&Scalar::one(), &x).unwrap(), f.eval(&x).unwrap());
        assert_eq!(
            poly("t^2").eval_homog(&zero, &[Scalar::from_int(9), Scalar::from_int(9)]).unwrap(),
            Some(Scalar::zero())
        );
        assert!(matches!(
            f.eval_homog(&Scalar::from_int(-1), &x),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn parse_term() {
        let t = Term::parse("t^-2*x^3*y^-1", &xy()).unwrap();
        assert_eq!(t, Term::new(rat_int(-2), vec![3, -1]));
        let t = Term::parse("t^-1/2*y", &xy()).unwrap();
        assert_eq!(t, Term::new(rat(-1, 2), vec![0, 1]));
        assert_eq!(Term::parse("1", &xy()).unwrap(), Term::unit(2));
        assert!(Term::parse("z", &xy()).is_err());
        assert!(Term::parse("x + y", &xy()).is_err());
    }

    #[test]
    fn display_round_trip() {
        for text in ["0", "1", "t^1 + x", "t^-2*x^3*y^-1 + t^1/3", "x*y"] {
            let p = poly(text);
            assert_eq!(poly(&p.to_string()), p, "{text}");
        }
    }

    #[test]
    fn lex_values_order() {
        let a = LexValue::Finite(vec![Scalar::one(), Scalar::zero()]);
        let b = LexValue::Finite(vec![Scalar::zero(), Scalar::from_int(2)]);
        assert!(a > b);
        assert!(LexValue::NegInf < b);
        assert_eq!(b.sign(), Some(1));
    }
}
