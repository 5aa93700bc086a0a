//! Prime congruences on `Q_max[x1^±1, ..., xn^±1]` given by defining matrices.
//!
//! A defining matrix `C` with rows `(c_i, xi_i)` orders terms by the
//! lexicographic order of `C * (log a, u)`. Two matrices define the same
//! prime exactly when they induce the same lexicographic sign on every
//! exponent vector in `Q x Z^n`; [`decide_equal`] decides this with a finite
//! recursion over kernel subgroups and returns a verified witness otherwise.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{hermite_rows, integer_kernel};
use crate::scalars::{coefficient_rows, rational_above, rational_between, Rational, Scalar};
use crate::tropical::{lex_cmp, lex_sign, ExponentVector, LexValue, Term, TropPolynomial};

/// Coefficient bound (in bits of precision) for the open-cone witness search.
const MAX_APPROX_BITS: u64 = 1 << 12;

/// Hard cap on witness candidates examined by the open-cone search.
pub const WITNESS_CANDIDATE_CAP: usize = 1_000_000;

/// A `(k+1) x (n+1)` matrix whose first column is lexicographically `>= 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DefiningMatrix {
    n: usize,
    rows: Vec<Vec<Scalar>>,
}

impl DefiningMatrix {
    pub fn new(n: usize, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        for row in &rows {
            if row.len() != n + 1 {
                return Err(Error::dim(n + 1, row.len()));
            }
        }
        let first_col: Vec<Scalar> = rows.iter().map(|r| r[0].clone()).collect();
        if lex_sign(&first_col) < 0 {
            return Err(Error::InvalidMatrix(
                "first column is lexicographically negative".into(),
            ));
        }
        Ok(Self { n, rows })
    }

    /// Builds a matrix from rows of scalar-grammar strings.
    pub fn parse(rows: &[&[&str]]) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.len().saturating_sub(1));
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| Scalar::parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// `C * (gamma, u)`.
    pub fn apply(&self, w: &ExponentVector) -> Vec<Scalar> {
        let v = w.to_scalars();
        self.rows
            .iter()
            .map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Lexicographic sign of `C * w`.
    pub fn sign(&self, w: &ExponentVector) -> i8 {
        lex_sign(&self.apply(w))
    }
}

impl fmt::Debug for DefiningMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect::<Vec<_>>()))
            .finish()
    }
}

/// A prime congruence, held as its canonical defining matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Prime {
    canon: DefiningMatrix,
}

impl Prime {
    pub fn matrix(&self) -> &DefiningMatrix {
        &self.canon
    }

    pub fn n(&self) -> usize {
        self.canon.n
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.canon.rows
    }

    pub fn sign(&self, w: &ExponentVector) -> i8 {
        self.canon.sign(w)
    }

    pub fn classify(&self) -> Classification {
        classify(self)
    }

    pub fn is_cont(&self) -> bool {
        classify(self) == Classification::Cont
    }
}

/// Normal form under positive row scaling and adding multiples of a row to
/// rows below it, with zero rows removed.
///
/// Each row is reduced to vanish at the pivot columns of the rows above it and
/// then scaled so its first nonzero entry is `±1`. The result depends only on
/// the orbit of `c` under those operations, so two matrices are related by
/// them iff their canonical forms agree.
pub fn canonicalize(c: &DefiningMatrix) -> Result<Prime> {
    // Reduced basis of the span of processed rows: (pivot column, vector with
    // 1 at its pivot and 0 at every other basis pivot).
    let mut basis: Vec<(usize, Vec<Scalar>)> = Vec::new();
    let mut out = Vec::new();
    for row in &c.rows {
        let mut r = row.clone();
        for (p, e) in &basis {
            if r[*p].is_zero() {
                continue;
            }
            let factor = r[*p].clone();
            for (x, y) in r.iter_mut().zip(e) {
                *x -= &(&factor * y);
            }
        }
        let Some(q) = r.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        let lead = r[q].clone();
        let scale = lead.abs().inv()?;
        let normalized: Vec<Scalar> = r.iter().map(|x| x * &scale).collect();
        let lead_inv = lead.inv()?;
        let e_new: Vec<Scalar> = r.iter().map(|x| x * &lead_inv).collect();
        for (_, e) in basis.iter_mut() {
            if e[q].is_zero() {
                continue;
            }
            let factor = e[q].clone();
            for (x, y) in e.iter_mut().zip(&e_new) {
                *x -= &(&factor * y);
            }
        }
        basis.push((q, e_new));
        out.push(normalized);
    }
    Ok(Prime {
        canon: DefiningMatrix::new(c.n, out)?,
    })
}

/// `max` over the terms of `f` of `C * (gamma, u)`, or `-inf` for `f = 0`.
pub fn phi(p: &Prime, f: &TropPolynomial) -> Result<LexValue> {
    if f.n() != p.n() {
        return Err(Error::dim(p.n(), f.n()));
    }
    Ok(f.terms()
        .map(|t| {
            let w = t.exponent_vector().expect("stored terms are finite");
            p.canon.apply(&w)
        })
        .max_by(|a, b| lex_cmp(a, b))
        .map_or(LexValue::NegInf, LexValue::Finite))
}

pub fn compare(p: &Prime, f: &TropPolynomial, g: &TropPolynomial) -> Result<Ordering> {
    Ok(phi(p, f)?.cmp(&phi(p, g)?))
}

pub fn compare_terms(p: &Prime, a: &Term, b: &Term) -> Result<Ordering> {
    compare(p, &a.to_poly(), &b.to_poly())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Cont,
    CoefficientBlind,
    NonContinuous,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Cont => "cont",
            Classification::CoefficientBlind => "coefficient_blind",
            Classification::NonContinuous => "non_continuous",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify(p: &Prime) -> Classification {
    let rows = p.rows();
    if rows.first().is_some_and(|r| r[0].is_positive()) {
        Classification::Cont
    } else if rows.iter().all(|r| r[0].is_zero()) {
        Classification::CoefficientBlind
    } else {
        Classification::NonContinuous
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// `Q x Λ`.
    Product,
    /// `{ (ell(m), m) : m in Λ }`.
    Graph,
}

/// A subgroup of `Q x Z^n` of product or graph shape over a saturated
/// sublattice `Λ` given by a Hermite-form basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelSubgroup {
    pub kind: KernelKind,
    n: usize,
    basis: Vec<Vec<BigInt>>,
    /// Rational covector on `Q^n`; only meaningful for [`KernelKind::Graph`].
    ell: Vec<Rational>,
}

fn int_scalar(x: &BigInt) -> Scalar {
    Scalar::from_rational(Rational::from_integer(x.clone()))
}

fn dot(xi: &[Scalar], m: &[BigInt]) -> Scalar {
    xi.iter()
        .zip(m)
        .filter(|(_, k)| !k.is_zero())
        .map(|(a, k)| a * &int_scalar(k))
        .sum()
}

fn dot_rat(ell: &[Rational], m: &[BigInt]) -> Rational {
    ell.iter()
        .zip(m)
        .map(|(a, k)| a * Rational::from_integer(k.clone()))
        .fold(Rational::zero(), |acc, x| acc + x)
}

fn to_i64_vec(m: &[BigInt]) -> Result<Vec<i64>> {
    m.iter()
        .map(|x| {
            x.to_i64()
                .ok_or_else(|| Error::Contract(format!("witness coordinate {x} overflows i64")))
        })
        .collect()
}

/// Integer combination `sum z_j * basis_j`.
fn combine(z: &[BigInt], basis: &[Vec<BigInt>], n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n];
    for (zj, b) in z.iter().zip(basis) {
        for (o, x) in out.iter_mut().zip(b) {
            *o += zj * x;
        }
    }
    out
}

impl KernelSubgroup {
    fn full(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from(u8::from(i == j))).collect())
            .collect();
        Self {
            kind: KernelKind::Product,
            n,
            basis,
            ell: vec![Rational::zero(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Rank of the lattice part `Λ`.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn lattice_basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn ell(&self) -> &[Rational] {
        &self.ell
    }

    pub fn is_trivial(&self) -> bool {
        self.kind == KernelKind::Graph && self.basis.is_empty()
    }

    fn element(&self, m: &[BigInt], gamma: Rational) -> Result<ExponentVector> {
        let gamma = match self.kind {
            KernelKind::Product => gamma,
            KernelKind::Graph => dot_rat(&self.ell, m),
        };
        Ok(ExponentVector::new(gamma, to_i64_vec(m)?))
    }

    /// Generators: `(ell(b), b)` for graph kind; `(1, 0)` and `(0, b)` for
    /// product kind.
    pub fn generators(&self) -> Result<Vec<ExponentVector>> {
        let mut out = Vec::new();
        if self.kind == KernelKind::Product {
            out.push(ExponentVector::new(Rational::from_integer(1.into()), vec![0; self.n]));
        }
        for b in &self.basis {
            out.push(self.element(b, Rational::zero())?);
        }
        Ok(out)
    }

    /// Values of the row `(c, xi)` on the lattice generators; for product kind
    /// the `Q` direction is reported separately as `c`.
    fn restrict(&self, row: &[Scalar]) -> Vec<Scalar> {
        let c = &row[0];
        let xi = &row[1..];
        self.basis
            .iter()
            .map(|b| {
                let mut v = dot(xi, b);
                if self.kind == KernelKind::Graph && !c.is_zero() {
                    v += &(c * &Scalar::from_rational(dot_rat(&self.ell, b)));
                }
                v
            })
            .collect()
    }

    fn vanishes(&self, row: &[Scalar]) -> bool {
        if self.kind == KernelKind::Product && !row[0].is_zero() {
            return false;
        }
        self.restrict(row).iter().all(Scalar::is_zero)
    }

    /// Sublattice of `Λ` given by integer coordinate vectors `z`.
    fn sublattice(&self, z: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        let vecs: Vec<Vec<BigInt>> = z.iter().map(|zi| combine(zi, &self.basis, self.n)).collect();
        hermite_rows(&vecs)
    }
}

/// Outcome of [`decide_equal`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EqualityVerdict {
    Equal,
    Distinguished(ExponentVector),
}

impl EqualityVerdict {
    /// A `Distinguished` verdict, rejected unless `w` really separates `a` and `b`.
    pub fn distinguished(a: &DefiningMatrix, b: &DefiningMatrix, w: ExponentVector) -> Result<Self> {
        if a.sign(&w) == b.sign(&w) {
            return Err(Error::Contract(format!(
                "candidate witness {:?} does not separate the matrices",
                w
            )));
        }
        Ok(EqualityVerdict::Distinguished(w))
    }

    pub fn is_equal(&self) -> bool {
        matches!(self, EqualityVerdict::Equal)
    }

    pub fn witness(&self) -> Option<&ExponentVector> {
        match self {
            EqualityVerdict::Equal => None,
            EqualityVerdict::Distinguished(w) => Some(w),
        }
    }
}

enum Stage {
    Continue(KernelSubgroup),
    /// Candidates in preference order; the last one is guaranteed to separate.
    Separate(Vec<ExponentVector>),
}

/// Decides whether two primes coincide, i.e. whether their matrices give the
/// same lexicographic sign on every exponent vector in `Q x Z^n`.
pub fn decide_equal(a: &Prime, b: &Prime) -> Result<EqualityVerdict> {
    Ok(run_recursion(a, b)?.0)
}

/// `{ w in Q x Z^n : C w = 0 }`.
pub fn final_kernel(p: &Prime) -> Result<KernelSubgroup> {
    let (verdict, h) = run_recursion(p, p)?;
    debug_assert!(verdict.is_equal());
    Ok(h)
}

fn run_recursion(a: &Prime, b: &Prime) -> Result<(EqualityVerdict, KernelSubgroup)> {
    if a.n() != b.n() {
        return Err(Error::dim(a.n(), b.n()));
    }
    let n = a.n();
    let mut h = KernelSubgroup::full(n);
    let (mut ia, mut ib) = (0usize, 0usize);
    loop {
        while ia < a.rows().len() && h.vanishes(&a.rows()[ia]) {
            ia += 1;
        }
        while ib < b.rows().len() && h.vanishes(&b.rows()[ib]) {
            ib += 1;
        }
        let stage = match (a.rows().get(ia), b.rows().get(ib)) {
            (None, None) => return Ok((EqualityVerdict::Equal, h)),
            (Some(f), None) | (None, Some(f)) => {
                let mut cands = h.generators()?;
                cands.push(nonvanishing_element(&h, f)?);
                Stage::Separate(cands)
            }
            (Some(f), Some(g)) => step(&h, f, g)?,
        };
        match stage {
            Stage::Continue(next) => {
                h = next;
                ia += 1;
                ib += 1;
            }
            Stage::Separate(cands) => {
                let last = cands.len() - 1;
                for (i, w) in cands.into_iter().enumerate() {
                    if a.sign(&w) != b.sign(&w) {
                        return Ok((EqualityVerdict::distinguished(&a.canon, &b.canon, w)?, h));
                    }
                    if i == last {
                        return Err(Error::Contract(format!(
                            "constructed witness {w:?} failed to separate"
                        )));
                    }
                }
                unreachable!("candidate list is nonempty");
            }
        }
    }
}

/// Some element of `h` on which the effective row `f` is nonzero.
fn nonvanishing_element(h: &KernelSubgroup, f: &[Scalar]) -> Result<ExponentVector> {
    if h.kind == KernelKind::Product && !f[0].is_zero() {
        return Ok(ExponentVector::new(Rational::from_integer(1.into()), vec![0; h.n]));
    }
    let vals = h.restrict(f);
    let j = vals
        .iter()
        .position(|v| !v.is_zero())
        .ok_or_else(|| Error::Contract("effective row vanishes on the kernel".into()))?;
    h.element(&h.basis[j], Rational::zero())
}

fn step(h: &KernelSubgroup, f: &[Scalar], g: &[Scalar]) -> Result<Stage> {
    if h.kind == KernelKind::Product {
        let (cf, cg) = (&f[0], &g[0]);
        match (cf.is_zero(), cg.is_zero()) {
            (false, false) => return product_threshold_step(h, f, g),
            (false, true) => return Ok(Stage::Separate(one_sided_candidates(h, f, g, false)?)),
            (true, false) => return Ok(Stage::Separate(one_sided_candidates(h, g, f, true)?)),
            (true, true) => {}
        }
    }
    covector_step(h, f, g)
}

/// Product kind where `f` has a nonzero coefficient entry and `g` does not.
fn one_sided_candidates(
    h: &KernelSubgroup,
    f: &[Scalar],
    g: &[Scalar],
    _swapped: bool,
) -> Result<Vec<ExponentVector>> {
    let mut cands = vec![ExponentVector::new(Rational::from_integer(1.into()), vec![0; h.n])];
    cands.extend(h.generators()?);
    // g is effective, so it is nonzero on some lattice generator b; with
    // s = sign g(b), the vector (gamma, -s b) makes g negative and, for gamma
    // large enough, f positive.
    let gv = h.restrict(g);
    let j = gv
        .iter()
        .position(|v| !v.is_zero())
        .ok_or_else(|| Error::Contract("effective row vanishes on the kernel".into()))?;
    let s = gv[j].signum();
    let b: Vec<BigInt> = h.basis[j].iter().map(|x| -x * BigInt::from(s)).collect();
    let c = &f[0];
    // f(gamma, b) = c * gamma + xi_f . b > 0  <=>  gamma > -(xi_f . b) / c (c > 0).
    let threshold = (-dot(&f[1..], &b)).checked_div(c)?;
    let gamma = rational_above(&threshold);
    cands.push(ExponentVector::new(gamma, to_i64_vec(&b)?));
    Ok(cands)
}

/// Product kind, both coefficient entries positive.
fn product_threshold_step(h: &KernelSubgroup, f: &[Scalar], g: &[Scalar]) -> Result<Stage> {
    let cf_inv = f[0].inv()?;
    let cg_inv = g[0].inv()?;
    let xf: Vec<Scalar> = f[1..].iter().map(|x| x * &cf_inv).collect();
    let xg: Vec<Scalar> = g[1..].iter().map(|x| x * &cg_inv).collect();
    for b in &h.basis {
        // f(gamma, b) > 0 iff gamma > -(xf . b); likewise for g.
        let tf = -dot(&xf, b);
        let tg = -dot(&xg, b);
        if tf != tg {
            let (lo, hi) = if tf < tg { (&tf, &tg) } else { (&tg, &tf) };
            let gamma = rational_between(lo, hi);
            let w = ExponentVector::new(gamma, to_i64_vec(b)?);
            let mut cands = vec![w];
            cands.extend(h.generators()?);
            let guaranteed = cands[0].clone();
            cands.push(guaranteed);
            return Ok(Stage::Separate(cands));
        }
    }
    // Kernel of f on Q x Λ: gamma = -(xf . m), which must be rational.
    let vals: Vec<Scalar> = h.basis.iter().map(|b| dot(&xf, b)).collect();
    let z = integer_kernel(&coefficient_rows(&vals, false), h.basis.len());
    let ell = xf.iter().map(|x| -x.rational_part()).collect();
    Ok(Stage::Continue(KernelSubgroup {
        kind: KernelKind::Graph,
        n: h.n,
        basis: h.sublattice(&z),
        ell,
    }))
}

/// Both rows act through covectors on `Λ`; they agree in sign everywhere iff
/// one is a positive multiple of the other.
fn covector_step(h: &KernelSubgroup, f: &[Scalar], g: &[Scalar]) -> Result<Stage> {
    let gf = h.restrict(f);
    let gg = h.restrict(g);
    let j0 = gf
        .iter()
        .position(|v| !v.is_zero())
        .ok_or_else(|| Error::Contract("effective row vanishes on the kernel".into()))?;
    let lambda = gg[j0].checked_div(&gf[j0])?;
    let proportional =
        lambda.is_positive() && gf.iter().zip(&gg).all(|(x, y)| &(x * &lambda) == y);
    if proportional {
        let z = integer_kernel(&coefficient_rows(&gf, true), gf.len());
        return Ok(Stage::Continue(KernelSubgroup {
            kind: h.kind,
            n: h.n,
            basis: h.sublattice(&z),
            ell: h.ell.clone(),
        }));
    }
    let mut cands = h.generators()?;
    let m = open_cone_point(&gf, &gg)?;
    let m = combine(&m, &h.basis, h.n);
    cands.push(h.element(&m, Rational::zero())?);
    Ok(Stage::Separate(cands))
}

/// Integer coordinates `z` with `gf(z)` and `gg(z)` nonzero of opposite signs,
/// given that `gg` is not a positive multiple of `gf`.
fn open_cone_point(gf: &[Scalar], gg: &[Scalar]) -> Result<Vec<BigInt>> {
    let r = gf.len();
    let unit = |j: usize, s: i64| -> Vec<BigInt> {
        (0..r).map(|k| BigInt::from(if k == j { s } else { 0 })).collect()
    };
    let mut pair = None;
    'outer: for i in 0..r {
        for j in i + 1..r {
            let det = &(&gf[i] * &gg[j]) - &(&gf[j] * &gg[i]);
            if !det.is_zero() {
                pair = Some((i, j, det));
                break 'outer;
            }
        }
    }
    let Some((i, j, det)) = pair else {
        // Linearly dependent with a negative ratio: any generator where gf is
        // nonzero already separates.
        let k = gf.iter().position(|v| !v.is_zero()).expect("effective row");
        return Ok(unit(k, 1));
    };
    // Solve [[gf_i, gf_j], [gg_i, gg_j]] (p, q)^T = (1, -1)^T.
    let det_inv = det.inv()?;
    let p = &(&gg[j] + &gf[j]) * &det_inv;
    let q = &(-(&gg[i] + &gf[i])) * &det_inv;
    let mut bits = 2u64;
    let mut tried = 0usize;
    while bits <= MAX_APPROX_BITS && tried < WITNESS_CANDIDATE_CAP {
        tried += 1;
        let (p_lo, _) = p.enclosure(bits);
        let (q_lo, _) = q.enclosure(bits);
        let denom = num_integer::Integer::lcm(p_lo.denom(), q_lo.denom());
        let zp = (p_lo * Rational::from_integer(denom.clone())).to_integer();
        let zq = (q_lo * Rational::from_integer(denom)).to_integer();
        let vf = &(&gf[i] * &int_scalar(&zp)) + &(&gf[j] * &int_scalar(&zq));
        let vg = &(&gg[i] * &int_scalar(&zp)) + &(&gg[j] * &int_scalar(&zq));
        if vf.is_positive() && vg.is_negative() {
            let mut z = vec![BigInt::zero(); r];
            z[i] = zp;
            z[j] = zq;
            return Ok(z);
        }
        bits *= 2;
    }
    Err(Error::SearchExhausted(tried))
}

pub fn min_filter_dim(p: &Prime) -> Result<usize> {
    require_cont(p, "minimum filter dimension")?;
    Ok(p.n() - final_kernel(p)?.rank())
}

pub fn height(p: &Prime) -> Result<usize> {
    require_cont(p, "height")?;
    Ok(final_kernel(p)?.rank())
}

/// True iff distinct terms are never equivalent, i.e. the kernel is trivial.
///
/// For cont primes this is the familiar complete-flag condition. The kernel
/// test is applied verbatim to every prime; beyond cont primes that is an
/// extension, not a characterization taken from the flag picture.
pub fn is_order(p: &Prime) -> Result<bool> {
    Ok(final_kernel(p)?.is_trivial())
}

pub(crate) fn require_cont(p: &Prime, what: &str) -> Result<()> {
    if p.is_cont() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{what} requires a prime whose canonical matrix has a positive top-left entry (got {})",
            classify(p)
        )))
    }
}
