//! Exact arithmetic in real multi-quadratic fields `Q(sqrt(d1), ..., sqrt(dr))`.
//!
//! A [`Scalar`] is stored as a finite sum `sum q_n * sqrt(n)` over squarefree
//! keys `n`, with key `1` holding the rational part. Square roots of distinct
//! squarefree integers are linearly independent over `Q`, so equality and the
//! zero test are structural. Signs are decided by interval enclosures of the
//! radicals at doubling precision.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub const DEFAULT_RADICAL_CAP: usize = 8;

/// Fractional bits used by the first sign enclosure.
const INITIAL_PRECISION: u64 = 64;

static RADICAL_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_RADICAL_CAP);

/// Current bound on the number of distinct radicals a checked result may carry.
pub fn radical_cap() -> usize {
    RADICAL_CAP.load(AtomicOrdering::Relaxed)
}

pub fn set_radical_cap(cap: usize) {
    RADICAL_CAP.store(cap, AtomicOrdering::Relaxed);
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Splits `n` into `(s, r)` with `n = s^2 * r` and `r` squarefree.
pub fn squarefree_split(mut n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 0);
    }
    let mut square = 1u64;
    let mut core = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        square *= p.pow(e / 2);
        if e % 2 == 1 {
            core *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    core *= n;
    (square, core)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    terms: BTreeMap<u64, Rational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(1, q);
        }
        Self { terms }
    }

    /// `sqrt(n)`, reduced to `s * sqrt(r)` with `r` squarefree.
    pub fn sqrt(n: u64) -> Self {
        let (s, r) = squarefree_split(n);
        Self::radical(Rational::from_integer(BigInt::from(s)), r)
    }

    /// `q * sqrt(n)` for squarefree `n`.
    pub fn radical(q: Rational, n: u64) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() && n != 0 {
            debug_assert_eq!(squarefree_split(n).0, 1, "radicand must be squarefree");
            terms.insert(n, q);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&k| k == 1)
    }

    /// The rational value, if there are no radical terms.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.is_rational() {
            Some(self.rational_part())
        } else {
            None
        }
    }

    pub fn rational_part(&self) -> Rational {
        self.terms.get(&1).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of `sqrt(n)`.
    pub fn coeff(&self, n: u64) -> Rational {
        self.terms.get(&n).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(&k, q)| (k, q))
    }

    /// Squarefree keys other than `1`.
    pub fn radicals(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.keys().copied().filter(|&k| k != 1)
    }

    pub fn radical_count(&self) -> usize {
        self.radicals().count()
    }

    pub fn check_capacity(self) -> Result<Self> {
        let found = self.radical_count();
        let cap = radical_cap();
        if found > cap {
            Err(Error::RadicalCapacity { found, cap })
        } else {
            Ok(self)
        }
    }

    fn add_term(&mut self, key: u64, q: Rational) {
        if q.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_insert_with(Rational::zero);
        *slot += q;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&k, c)| (k, c * q)).collect(),
        }
    }

    /// Flips the sign of every radical divisible by the prime `p`.
    fn conjugate_at(&self, p: u64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&k, c)| (k, if k % p == 0 { -c } else { c.clone() }))
                .collect(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut num = Self::one();
        let mut den = self.clone();
        loop {
            let prime = den.radicals().flat_map(prime_factors).next();
            let Some(p) = prime else { break };
            let conj = den.conjugate_at(p);
            num = &num * &conj;
            den = &den * &conj;
        }
        let d = den.rational_part();
        Ok(num.scale(&d.recip()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// Lower and upper rational bounds on the value, each within `2^-bits`
    /// per radical term.
    pub fn enclosure(&self, bits: u64) -> (Rational, Rational) {
        let scale = BigUint::one() << bits;
        let denom = BigInt::from(scale.clone());
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        for (&n, q) in &self.terms {
            if n == 1 {
                lo += q;
                hi += q;
                continue;
            }
            let s = (BigUint::from(n) * &scale * &scale).sqrt();
            let r_lo = Rational::new(BigInt::from(s.clone()), denom.clone());
            let r_hi = Rational::new(BigInt::from(s + 1u32), denom.clone());
            if q.is_positive() {
                lo += q * &r_lo;
                hi += q * &r_hi;
            } else {
                lo += q * &r_hi;
                hi += q * &r_lo;
            }
        }
        (lo, hi)
    }

    pub fn signum(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        if let Some(q) = self.to_rational() {
            return if q.is_positive() { 1 } else { -1 };
        }
        let mut bits = INITIAL_PRECISION;
        loop {
            let (lo, hi) = self.enclosure(bits);
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            bits *= 2;
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(&n, q)| q.to_f64().unwrap_or(f64::NAN) * (n as f64).sqrt())
            .sum()
    }

    /// Nearest integer (ties away from zero is not guaranteed; any nearest works).
    pub fn round(&self) -> BigInt {
        if let Some(q) = self.to_rational() {
            return q.round().to_integer();
        }
        let (lo, _) = self.enclosure(INITIAL_PRECISION);
        lo.round().to_integer()
    }

    /// Decimal rendering with `digits` digits after the point, rounded from a
    /// rational enclosure far tighter than the last digit.
    pub fn to_decimal(&self, digits: usize) -> String {
        let bits = (digits as u64) * 4 + 16;
        let (lo, _) = self.enclosure(bits);
        let ten = BigInt::from(10u32).pow(digits as u32);
        let scaled = (lo * Rational::from_integer(ten.clone())).round().to_integer();
        let negative = scaled.is_negative();
        let mag = scaled.abs();
        let (int, frac) = mag.div_rem(&ten);
        let sign = if negative && !(int.is_zero() && frac.is_zero()) {
            "-"
        } else {
            ""
        };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits)
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut p = ScalarParser::new(text);
        let value = p.expr()?;
        p.skip_ws();
        if p.pos < text.len() {
            return Err(Error::parse_at(text, p.pos, "unexpected trailing input"));
        }
        Ok(value)
    }
}

/// Exact field operation on two scalars, subject to the radical cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn scalar_arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar> {
    let out = match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.checked_div(b)?,
    };
    out.check_capacity()
}

pub fn scalar_sign(a: &Scalar) -> i8 {
    a.signum()
}

/// Coefficient matrix of the radical parts of `v`: one row per radical
/// `n != 1` occurring in `v` (ascending), with entry `i` the coefficient of
/// `sqrt(n)` in `v[i]`. An integer vector `m` has `sum m_i v_i` rational iff
/// it annihilates every row.
pub fn rational_part_basis(v: &[Scalar]) -> Vec<Vec<Rational>> {
    coefficient_rows(v, false)
}

/// Like [`rational_part_basis`], optionally including the row of rational parts.
pub fn coefficient_rows(v: &[Scalar], include_rational: bool) -> Vec<Vec<Rational>> {
    let keys: BTreeSet<u64> = v
        .iter()
        .flat_map(|s| s.terms.keys().copied())
        .filter(|&k| include_rational || k != 1)
        .collect();
    keys.into_iter()
        .map(|k| v.iter().map(|s| s.coeff(k)).collect())
        .collect()
}

/// The simplest rational (smallest denominator, then smallest magnitude)
/// strictly inside the open interval `(lo, hi)`; `hi = None` means `+inf`.
pub fn simplest_rational_in(lo: &Rational, hi: Option<&Rational>) -> Rational {
    if let Some(h) = hi {
        assert!(lo < h, "empty interval");
        if lo.is_negative() && h.is_positive() {
            return Rational::zero();
        }
        if !h.is_positive() {
            let neg_lo = -h;
            let neg_hi = -lo;
            return -simplest_rational_in(&neg_lo, Some(&neg_hi));
        }
    } else if lo.is_negative() {
        return Rational::zero();
    }
    // 0 <= lo < hi
    let floor = lo.floor();
    let next = &floor + Rational::one();
    if hi.is_none_or(|h| &next < h) {
        return next;
    }
    let h = hi.expect("bounded here");
    let frac_lo = lo - &floor;
    let frac_hi = h - &floor;
    let inner_lo = frac_hi.recip();
    let inner_hi = if frac_lo.is_zero() {
        None
    } else {
        Some(frac_lo.recip())
    };
    floor + simplest_rational_in(&inner_lo, inner_hi.as_ref()).recip()
}

/// A rational strictly between `a < b`, preferring simple ones.
pub fn rational_between(a: &Scalar, b: &Scalar) -> Rational {
    debug_assert!(a < b);
    let mut bits = 8;
    loop {
        let (_, a_hi) = a.enclosure(bits);
        let (b_lo, _) = b.enclosure(bits);
        if a_hi < b_lo {
            let lo = if a.is_rational() { a.rational_part() } else { a_hi };
            let hi = if b.is_rational() { b.rational_part() } else { b_lo };
            return simplest_rational_in(&lo, Some(&hi));
        }
        bits *= 2;
    }
}

/// A rational strictly above `a`.
pub fn rational_above(a: &Scalar) -> Rational {
    let (_, hi) = a.enclosure(8);
    let lo = if a.is_rational() { a.rational_part() } else { hi };
    simplest_rational_in(&lo, None)
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Self::from_rational(q)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(&k, c)| (k, -c)).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (&k, c) in &rhs.terms {
            self.add_term(k, c.clone());
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        for (&k, c) in &rhs.terms {
            self.add_term(k, -c);
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (&m, a) in &self.terms {
            for (&n, b) in &rhs.terms {
                let g = m.gcd(&n);
                let key = (m / g) * (n / g);
                let coeff = a * b * Rational::from_integer(BigInt::from(g));
                out.add_term(key, coeff);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $f:ident),*) => {$(
        impl $tr for Scalar {
            type Output = Scalar;
            fn $f(self, rhs: Scalar) -> Scalar { (&self).$f(&rhs) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, rhs: &Scalar) -> Scalar { (&self).$f(rhs) }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $f(self, rhs: Scalar) -> Scalar { self.$f(&rhs) }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul);

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        let mut acc = Scalar::zero();
        for s in iter {
            acc += &s;
        }
        acc
    }
}

pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (&n, q)) in self.terms.iter().enumerate() {
            let mag = if i > 0 { q.abs() } else { q.clone() };
            if i > 0 {
                f.write_str(if q.is_negative() { " - " } else { " + " })?;
            }
            if n == 1 {
                f.write_str(&fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "sqrt({n})")?;
            } else {
                write!(f, "{}*sqrt({n})", fmt_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

pub(crate) struct ScalarParser<'a> {
    pub(crate) text: &'a str,
    pub(crate) pos: usize,
}

impl<'a> ScalarParser<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Self { text, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    pub(crate) fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::parse_at(self.text, self.pos, message)
    }

    pub(crate) fn uint(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let digits: usize = self
            .rest()
            .bytes()
            .take_while(|b| b.is_ascii_digit())
            .count();
        if digits == 0 {
            return Err(self.err("expected digits"));
        }
        let value = self.rest()[..digits].parse::<BigInt>().expect("ascii digits");
        self.pos += digits;
        Ok(value)
    }

    /// `int ('/' uint)?` where `int` may carry a sign.
    pub(crate) fn rational(&mut self) -> Result<Rational> {
        self.skip_ws();
        let negative = if self.eat("-") {
            true
        } else {
            self.eat("+");
            false
        };
        let num = self.uint()?;
        let num = if negative { -num } else { num };
        let start = self.pos;
        if self.eat("/") {
            let den = self.uint()?;
            if den.is_zero() {
                self.pos = start;
                return Err(self.err("zero denominator"));
            }
            Ok(Rational::new(num, den))
        } else {
            Ok(Rational::from_integer(num))
        }
    }

    fn sqrt_call(&mut self) -> Result<Scalar> {
        if !self.eat("(") {
            return Err(self.err("expected '(' after sqrt"));
        }
        let n = self.uint()?;
        let n = n
            .to_u64()
            .ok_or_else(|| self.err("radicand does not fit in 64 bits"))?;
        if !self.eat(")") {
            return Err(self.err("expected ')'"));
        }
        Ok(Scalar::sqrt(n))
    }

    fn term(&mut self) -> Result<Scalar> {
        self.skip_ws();
        if self.eat("sqrt") {
            return self.sqrt_call();
        }
        if self.rest().starts_with("-sqrt") {
            self.pos += 1;
            self.eat("sqrt");
            return Ok(-self.sqrt_call()?);
        }
        let q = self.rational()?;
        let save = self.pos;
        if self.eat("*") {
            if self.eat("sqrt") {
                return Ok(&Scalar::from_rational(q) * &self.sqrt_call()?);
            }
            self.pos = save;
            return Err(self.err("expected sqrt(...) after '*'"));
        }
        Ok(Scalar::from_rational(q))
    }

    pub(crate) fn expr(&mut self) -> Result<Scalar> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            if self.eat("+") {
                acc += &self.term()?;
            } else if self.rest().starts_with('-') {
                self.pos += 1;
                acc -= &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }
}
