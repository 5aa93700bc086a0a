//! Exact polyhedral geometry over the scalar field: Fourier–Motzkin with
//! strict rows, Γ-rational polyhedra, rational sets, and flags of polyhedra
//! and cones.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::prime::{canonicalize, classify, decide_equal, Classification, DefiningMatrix, EqualityVerdict, Prime};
use crate::scalars::{rational_above, rational_between, Rational, Scalar};
use crate::tropical::TropPolynomial;

pub(crate) fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

pub(crate) fn int_vec(u: &[i64]) -> Vec<Scalar> {
    u.iter().map(|&e| Scalar::from_int(e)).collect()
}

/// `<x, normal> <= rhs`, or `< rhs` when `strict`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IneqRow {
    pub normal: Vec<Scalar>,
    pub rhs: Scalar,
    pub strict: bool,
}

impl IneqRow {
    pub fn satisfied_by(&self, x: &[Scalar]) -> bool {
        let lhs = dot(&self.normal, x);
        if self.strict {
            lhs < self.rhs
        } else {
            lhs <= self.rhs
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IneqSystem {
    d: usize,
    rows: Vec<IneqRow>,
}

impl IneqSystem {
    pub fn new(d: usize) -> Self {
        Self { d, rows: Vec::new() }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rows(&self) -> &[IneqRow] {
        &self.rows
    }

    pub fn push(&mut self, normal: Vec<Scalar>, rhs: Scalar, strict: bool) -> Result<()> {
        if normal.len() != self.d {
            return Err(Error::dim(self.d, normal.len()));
        }
        self.rows.push(IneqRow { normal, rhs, strict });
        Ok(())
    }

    pub fn le(&mut self, normal: Vec<Scalar>, rhs: Scalar) -> Result<()> {
        self.push(normal, rhs, false)
    }

    pub fn lt(&mut self, normal: Vec<Scalar>, rhs: Scalar) -> Result<()> {
        self.push(normal, rhs, true)
    }

    pub fn ge(&mut self, normal: Vec<Scalar>, rhs: Scalar) -> Result<()> {
        self.push(normal.iter().map(|x| -x).collect(), -rhs, false)
    }

    pub fn gt(&mut self, normal: Vec<Scalar>, rhs: Scalar) -> Result<()> {
        self.push(normal.iter().map(|x| -x).collect(), -rhs, true)
    }

    pub fn equal(&mut self, normal: Vec<Scalar>, rhs: Scalar) -> Result<()> {
        self.ge(normal.clone(), rhs.clone())?;
        self.le(normal, rhs)
    }

    pub fn contains(&self, x: &[Scalar]) -> bool {
        x.len() == self.d && self.rows.iter().all(|r| r.satisfied_by(x))
    }

    pub fn sample_point(&self) -> Result<Option<Vec<Scalar>>> {
        fm_feasible(self)
    }

    pub fn is_feasible(&self) -> Result<bool> {
        Ok(fm_feasible(self)?.is_some())
    }
}

enum Normalized {
    Trivial,
    Contradiction,
    Row(IneqRow),
}

fn normalize(row: IneqRow) -> Result<Normalized> {
    let Some(q) = row.normal.iter().position(|x| !x.is_zero()) else {
        let ok = if row.strict {
            row.rhs.is_positive()
        } else {
            !row.rhs.is_negative()
        };
        return Ok(if ok { Normalized::Trivial } else { Normalized::Contradiction });
    };
    let lead = &row.normal[q];
    if lead.is_rational() && lead.abs() == Scalar::one() {
        return Ok(Normalized::Row(row));
    }
    let s = lead.abs().inv()?;
    Ok(Normalized::Row(IneqRow {
        normal: row.normal.iter().map(|x| x * &s).collect(),
        rhs: &row.rhs * &s,
        strict: row.strict,
    }))
}

/// Keeps only the tightest row per normal direction.
fn dedup(rows: Vec<IneqRow>) -> Vec<IneqRow> {
    let mut index: HashMap<Vec<Scalar>, usize> = HashMap::new();
    let mut out: Vec<IneqRow> = Vec::new();
    for row in rows {
        match index.get(&row.normal) {
            Some(&i) => {
                let cur = &mut out[i];
                if row.rhs < cur.rhs || (row.rhs == cur.rhs && row.strict) {
                    *cur = row;
                }
            }
            None => {
                index.insert(row.normal.clone(), out.len());
                out.push(row);
            }
        }
    }
    out
}

/// Fourier–Motzkin feasibility. On success returns an exact point satisfying
/// every row, preferring simple rational coordinates.
pub fn fm_feasible(s: &IneqSystem) -> Result<Option<Vec<Scalar>>> {
    let d = s.d;
    let mut cur = Vec::new();
    for row in &s.rows {
        if row.normal.len() != d {
            return Err(Error::dim(d, row.normal.len()));
        }
        match normalize(row.clone())? {
            Normalized::Trivial => {}
            Normalized::Contradiction => return Ok(None),
            Normalized::Row(r) => cur.push(r),
        }
    }
    cur = dedup(cur);

    // stages[j] holds the system in variables 0..=d-1-j.
    let mut stages: Vec<Vec<IneqRow>> = Vec::with_capacity(d);
    for k in (0..d).rev() {
        let mut next = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for row in &cur {
            if row.normal[k].is_zero() {
                next.push(row.clone());
            } else if row.normal[k].is_positive() {
                pos.push(row);
            } else {
                neg.push(row);
            }
        }
        for p in &pos {
            for n in &neg {
                let ap = &p.normal[k];
                let an = n.normal[k].abs();
                let normal: Vec<Scalar> = p
                    .normal
                    .iter()
                    .zip(&n.normal)
                    .map(|(x, y)| &(x * &an) + &(y * ap))
                    .collect();
                let row = IneqRow {
                    normal,
                    rhs: &(&p.rhs * &an) + &(&n.rhs * ap),
                    strict: p.strict || n.strict,
                };
                match normalize(row)? {
                    Normalized::Trivial => {}
                    Normalized::Contradiction => return Ok(None),
                    Normalized::Row(r) => next.push(r),
                }
            }
        }
        stages.push(std::mem::replace(&mut cur, dedup(next)));
    }
    debug_assert!(cur.is_empty());

    let mut x = vec![Scalar::zero(); d];
    for k in 0..d {
        let stage = &stages[d - 1 - k];
        let mut lo: Option<(Scalar, bool)> = None;
        let mut hi: Option<(Scalar, bool)> = None;
        for row in stage {
            let a = &row.normal[k];
            if a.is_zero() {
                continue;
            }
            let rest = dot(&row.normal[..k], &x[..k]);
            let bound = (&row.rhs - &rest).checked_div(a)?;
            if a.is_positive() {
                tighten(&mut hi, bound, row.strict, true);
            } else {
                tighten(&mut lo, bound, row.strict, false);
            }
        }
        x[k] = pick(lo, hi);
    }
    if !s.contains(&x) {
        return Err(Error::Contract(
            "Fourier-Motzkin back-substitution produced an infeasible point".into(),
        ));
    }
    Ok(Some(x))
}

fn tighten(slot: &mut Option<(Scalar, bool)>, bound: Scalar, strict: bool, upper: bool) {
    match slot {
        None => *slot = Some((bound, strict)),
        Some((cur, cur_strict)) => {
            let better = if upper { bound < *cur } else { bound > *cur };
            if better {
                *slot = Some((bound, strict));
            } else if bound == *cur {
                *cur_strict |= strict;
            }
        }
    }
}

fn pick(lo: Option<(Scalar, bool)>, hi: Option<(Scalar, bool)>) -> Scalar {
    let r = match (lo, hi) {
        (None, None) => return Scalar::zero(),
        (Some((l, _)), None) => rational_above(&l),
        (None, Some((h, _))) => -rational_above(&-h),
        (Some((l, _)), Some((h, _))) => {
            if l == h {
                return l;
            }
            rational_between(&l, &h)
        }
    };
    Scalar::from_rational(r)
}

/// Row-reduces `m` to reduced echelon form; returns the pivot columns.
pub(crate) fn row_reduce(m: &mut [Vec<Scalar>]) -> Result<Vec<usize>> {
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv()?;
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            let (src, dst) = if i < r {
                let (a, b) = m.split_at_mut(r);
                (&b[0], &mut a[i])
            } else {
                let (a, b) = m.split_at_mut(i);
                (&a[r], &mut b[0])
            };
            for (x, y) in dst.iter_mut().zip(src) {
                *x -= &(&f * y);
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    Ok(pivots)
}

pub fn scalar_rank(rows: &[Vec<Scalar>]) -> Result<usize> {
    let mut m = rows.to_vec();
    Ok(row_reduce(&mut m)?.len())
}

/// Coefficients `c` with `sum c_j basis_j = v`, if `v` lies in the span.
pub fn solve_combination(basis: &[Vec<Scalar>], v: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    let k = basis.len();
    let mut m: Vec<Vec<Scalar>> = (0..v.len())
        .map(|i| {
            let mut row: Vec<Scalar> = basis.iter().map(|b| b[i].clone()).collect();
            row.push(v[i].clone());
            row
        })
        .collect();
    let pivots = row_reduce(&mut m)?;
    if pivots.last() == Some(&k) {
        return Ok(None);
    }
    let mut c = vec![Scalar::zero(); k];
    for (r, &p) in pivots.iter().enumerate() {
        c[p] = m[r][k].clone();
    }
    Ok(Some(c))
}

/// `{ x in N_R : <x, u_i> <= gamma_i }` with integral `u_i` and rational `gamma_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GammaPolyhedron {
    n: usize,
    rows: Vec<(Vec<i64>, Rational)>,
}

impl GammaPolyhedron {
    /// The whole space.
    pub fn full(n: usize) -> Self {
        Self { n, rows: Vec::new() }
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            rows: vec![(vec![0; n], Rational::from_integer((-1).into()))],
        }
    }

    pub fn from_rows(n: usize, rows: Vec<(Vec<i64>, Rational)>) -> Result<Self> {
        let mut p = Self::full(n);
        for (u, g) in rows {
            p.push(u, g)?;
        }
        Ok(p)
    }

    pub fn push(&mut self, u: Vec<i64>, gamma: Rational) -> Result<()> {
        if u.len() != self.n {
            return Err(Error::dim(self.n, u.len()));
        }
        self.rows.push((u, gamma));
        Ok(())
    }

    /// `<x, u> = gamma` as a pair of rows.
    pub fn push_equality(&mut self, u: Vec<i64>, gamma: Rational) -> Result<()> {
        let neg: Vec<i64> = u.iter().map(|x| -x).collect();
        self.push(u, gamma.clone())?;
        self.push(neg, -gamma)
    }

    /// `|x_i - center_i| <= half_width` for every coordinate.
    pub fn cube(center: &[BigInt], half_width: i64) -> Self {
        let n = center.len();
        let mut p = Self::full(n);
        for (i, c) in center.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            let c = Rational::from_integer(c.clone());
            let w = Rational::from_integer(half_width.into());
            p.rows.push((e.clone(), &c + &w));
            p.rows.push((e.iter().map(|x| -x).collect(), -(c - w)));
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[(Vec<i64>, Rational)] {
        &self.rows
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::dim(self.n, other.n));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Self { n: self.n, rows })
    }

    pub fn to_system(&self) -> IneqSystem {
        IneqSystem {
            d: self.n,
            rows: self
                .rows
                .iter()
                .map(|(u, g)| IneqRow {
                    normal: int_vec(u),
                    rhs: Scalar::from_rational(g.clone()),
                    strict: false,
                })
                .collect(),
        }
    }

    pub fn contains(&self, x: &[Scalar]) -> bool {
        self.to_system().contains(x)
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(!self.to_system().is_feasible()?)
    }

    /// Affine dimension, or `None` for the empty polyhedron.
    pub fn dimension(&self) -> Result<Option<usize>> {
        let sys = self.to_system();
        if !sys.is_feasible()? {
            return Ok(None);
        }
        // A row is an implicit equality iff tightening it to strict empties
        // the polyhedron.
        let mut equalities = Vec::new();
        for i in 0..sys.rows.len() {
            let mut probe = sys.clone();
            probe.rows[i].strict = true;
            if !probe.is_feasible()? {
                equalities.push(sys.rows[i].normal.clone());
            }
        }
        Ok(Some(self.n - scalar_rank(&equalities)?))
    }
}

/// A finite union of Γ-rational polyhedra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaPolyhedralSet {
    n: usize,
    pieces: Vec<GammaPolyhedron>,
}

impl GammaPolyhedralSet {
    pub fn new(pieces: Vec<GammaPolyhedron>) -> Result<Self> {
        let Some(first) = pieces.first() else {
            return Err(Error::Precondition("a polyhedral set needs at least one piece".into()));
        };
        let n = first.n;
        if let Some(bad) = pieces.iter().find(|p| p.n != n) {
            return Err(Error::dim(n, bad.n));
        }
        Ok(Self { n, pieces })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pieces(&self) -> &[GammaPolyhedron] {
        &self.pieces
    }

    pub fn contains(&self, x: &[Scalar]) -> bool {
        self.pieces.iter().any(|p| p.contains(x))
    }
}

impl From<GammaPolyhedron> for GammaPolyhedralSet {
    fn from(p: GammaPolyhedron) -> Self {
        Self { n: p.n, pieces: vec![p] }
    }
}

/// The cone region `{ (r, x) : r >= 0, r * c_i + <x, u_i> <= 0 }`, one piece per
/// maximizing term of `f0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeRegion {
    pub n: usize,
    /// Each piece is a list of rows `(c, u)`.
    pub pieces: Vec<Vec<(Rational, Vec<i64>)>>,
}

impl ConeRegion {
    pub fn contains(&self, r: &Scalar, x: &[Scalar]) -> bool {
        if r.is_negative() || x.len() != self.n {
            return false;
        }
        self.pieces.iter().any(|rows| {
            rows.iter().all(|(c, u)| {
                let v = &(r * &Scalar::from_rational(c.clone())) + &dot(&int_vec(u), x);
                !v.is_positive()
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RationalSet {
    Polyhedral(GammaPolyhedralSet),
    Cone(ConeRegion),
}

/// `{ x : f0(x) >= fi(x) for all i }` (or its homogenized cone version).
pub fn rational_set(fs: &[TropPolynomial], homog: bool) -> Result<RationalSet> {
    let Some(f0) = fs.first() else {
        return Err(Error::Precondition("rational set needs at least f0".into()));
    };
    let n = f0.n();
    if let Some(bad) = fs.iter().find(|f| f.n() != n) {
        return Err(Error::dim(n, bad.n()));
    }
    let others: Vec<(Rational, Vec<i64>)> = fs[1..]
        .iter()
        .flat_map(|f| f.terms().map(|t| {
            let w = t.exponent_vector().expect("stored terms are finite");
            (w.gamma, w.u)
        }))
        .collect();
    let mut pieces: Vec<Vec<(Rational, Vec<i64>)>> = Vec::new();
    for t0 in f0.terms() {
        let w0 = t0.exponent_vector().expect("stored terms are finite");
        // gamma0 + <x,u0> >= gamma' + <x,u'>  <=>  (gamma' - gamma0) + <x, u' - u0> <= 0
        pieces.push(
            others
                .iter()
                .map(|(g, u)| {
                    let du = u.iter().zip(&w0.u).map(|(a, b)| a - b).collect();
                    (g - &w0.gamma, du)
                })
                .collect(),
        );
    }
    if pieces.is_empty() {
        // f0 = 0: only x with every fi = 0 qualify, which for any nonempty fi
        // is nothing.
        pieces.push(if others.is_empty() {
            Vec::new()
        } else {
            vec![(Rational::from_integer(1.into()), vec![0; n])]
        });
    }
    if homog {
        return Ok(RationalSet::Cone(ConeRegion { n, pieces }));
    }
    let polys = pieces
        .into_iter()
        .map(|rows| GammaPolyhedron {
            n,
            rows: rows.into_iter().map(|(c, u)| (u, -c)).collect(),
        })
        .collect();
    Ok(RationalSet::Polyhedral(GammaPolyhedralSet::new(polys)?))
}

/// Polyhedral piece of `rational_set`, for callers that know they passed a
/// non-homogeneous request.
pub fn rational_polyhedral_set(fs: &[TropPolynomial]) -> Result<GammaPolyhedralSet> {
    match rational_set(fs, false)? {
        RationalSet::Polyhedral(s) => Ok(s),
        RationalSet::Cone(_) => unreachable!("non-homogeneous request"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlagKind {
    Cones,
    Polyhedra,
}

/// A simplicial flag: member `i` is `base + cone(dirs[..i])` (polyhedra) or
/// `cone(base, dirs[..i])` (cones).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flag {
    pub kind: FlagKind,
    base: Vec<Scalar>,
    dirs: Vec<Vec<Scalar>>,
}

impl Flag {
    pub fn new(kind: FlagKind, base: Vec<Scalar>, dirs: Vec<Vec<Scalar>>) -> Result<Self> {
        let d = base.len();
        if let Some(bad) = dirs.iter().find(|v| v.len() != d) {
            return Err(Error::dim(d, bad.len()));
        }
        let mut gens = dirs.clone();
        if kind == FlagKind::Cones {
            gens.insert(0, base.clone());
        }
        if scalar_rank(&gens)? != gens.len() {
            return Err(Error::NotAFlag("generators are not independent".into()));
        }
        Ok(Self { kind, base, dirs })
    }

    pub fn base(&self) -> &[Scalar] {
        &self.base
    }

    pub fn dirs(&self) -> &[Vec<Scalar>] {
        &self.dirs
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    /// Rows of the defining matrix whose prime this flag defines.
    pub fn to_matrix(&self) -> Result<DefiningMatrix> {
        let rows: Vec<Vec<Scalar>> = match self.kind {
            FlagKind::Cones => std::iter::once(self.base.clone()).chain(self.dirs.iter().cloned()).collect(),
            FlagKind::Polyhedra => {
                let lift = |c: Scalar, v: &[Scalar]| std::iter::once(c).chain(v.iter().cloned()).collect();
                std::iter::once(lift(Scalar::one(), &self.base))
                    .chain(self.dirs.iter().map(|d| lift(Scalar::zero(), d)))
                    .collect()
            }
        };
        let n = match self.kind {
            FlagKind::Cones => self.base.len() - 1,
            FlagKind::Polyhedra => self.base.len(),
        };
        DefiningMatrix::new(n, rows)
    }
}

pub fn flag_from_matrix(p: &Prime, kind: FlagKind) -> Result<Flag> {
    let rows = p.rows();
    if rows.is_empty() {
        return Err(Error::Domain("the trivial prime has no flag".into()));
    }
    match kind {
        FlagKind::Cones => Flag::new(kind, rows[0].clone(), rows[1..].to_vec()),
        FlagKind::Polyhedra => {
            if classify(p) != Classification::Cont {
                return Err(Error::Domain(format!(
                    "a flag of polyhedra needs a cont prime (got {})",
                    classify(p)
                )));
            }
            // Canonical cont matrices have first column e_1.
            Flag::new(
                kind,
                rows[0][1..].to_vec(),
                rows[1..].iter().map(|r| r[1..].to_vec()).collect(),
            )
        }
    }
}

/// Points `base + sum_{j<i} lambda_j dirs_j` of `u` with `lambda` constrained
/// by `lambda_strict` (`> 0`) or `>= 0`; the last multiplier is always `> 0`.
fn slice_system(u: &GammaPolyhedron, f: &Flag, i: usize, all_strict: bool) -> Result<IneqSystem> {
    let mut sys = IneqSystem::new(i);
    for (normal, gamma) in &u.rows {
        let un = int_vec(normal);
        let coeffs = f.dirs[..i].iter().map(|d| dot(d, &un)).collect();
        let rhs = &Scalar::from_rational(gamma.clone()) - &dot(&f.base, &un);
        sys.le(coeffs, rhs)?;
    }
    for j in 0..i {
        let mut e = vec![Scalar::zero(); i];
        e[j] = Scalar::from_int(-1);
        sys.push(e, Scalar::zero(), all_strict || j + 1 == i)?;
    }
    Ok(sys)
}

fn check_neighborhood_args(u: &GammaPolyhedron, f: &Flag) -> Result<()> {
    if f.kind != FlagKind::Polyhedra {
        return Err(Error::Precondition("neighborhoods are tested against flags of polyhedra".into()));
    }
    if u.n != f.ambient_dim() {
        return Err(Error::dim(f.ambient_dim(), u.n));
    }
    Ok(())
}

/// True iff `u` meets the relative interior of every member of the flag.
pub fn is_neighborhood(u: &GammaPolyhedron, f: &Flag) -> Result<bool> {
    check_neighborhood_args(u, f)?;
    for i in 0..=f.dirs.len() {
        if !slice_system(u, f, i, true)?.is_feasible()? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The same test phrased as "contains the vertex and meets each `P_i \ P_{i-1}`".
pub fn is_neighborhood_by_differences(u: &GammaPolyhedron, f: &Flag) -> Result<bool> {
    check_neighborhood_args(u, f)?;
    if !u.contains(&f.base) {
        return Ok(false);
    }
    for i in 1..=f.dirs.len() {
        if !slice_system(u, f, i, false)?.is_feasible()? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn locally_equivalent(f: &Flag, g: &Flag) -> Result<EqualityVerdict> {
    if f.kind != g.kind {
        return Err(Error::Precondition("flags of different kinds".into()));
    }
    if f.ambient_dim() != g.ambient_dim() {
        return Err(Error::dim(f.ambient_dim(), g.ambient_dim()));
    }
    decide_equal(&canonicalize(&f.to_matrix()?)?, &canonicalize(&g.to_matrix()?)?)
}

/// Whether `v` is a nonnegative combination of `gens`.
pub fn in_cone(gens: &[Vec<Scalar>], v: &[Scalar]) -> Result<bool> {
    let m = gens.len();
    let mut sys = IneqSystem::new(m);
    for (i, vi) in v.iter().enumerate() {
        sys.equal(gens.iter().map(|g| g[i].clone()).collect(), vi.clone())?;
    }
    for j in 0..m {
        let mut e = vec![Scalar::zero(); m];
        e[j] = Scalar::from_int(-1);
        sys.le(e, Scalar::zero())?;
    }
    sys.is_feasible()
}

/// Rows `sum of generators of C_i`: a point of each relative interior.
pub fn relint_matrix(cones: &[Vec<Vec<Scalar>>]) -> Result<DefiningMatrix> {
    let d = cones
        .first()
        .and_then(|c| c.first())
        .map(Vec::len)
        .ok_or_else(|| Error::NotAFlag("empty flag".into()))?;
    let rows = cones
        .iter()
        .map(|gens| {
            (0..d)
                .map(|k| gens.iter().map(|g| g[k].clone()).sum())
                .collect()
        })
        .collect();
    DefiningMatrix::new(d - 1, rows)
}

/// Replaces a flag of cones by a locally equivalent simplicial one, picking
/// for each member the first generator outside the previous member.
pub fn simplicialize(cones: &[Vec<Vec<Scalar>>]) -> Result<Flag> {
    let first = cones
        .first()
        .filter(|c| !c.is_empty())
        .ok_or_else(|| Error::NotAFlag("empty flag".into()))?;
    let d = first[0].len();
    for c in cones {
        if c.is_empty() {
            return Err(Error::NotAFlag("a member has no generators".into()));
        }
        if let Some(bad) = c.iter().find(|g| g.len() != d) {
            return Err(Error::dim(d, bad.len()));
        }
    }
    let rho0 = first[0].clone();
    if rho0.iter().all(Scalar::is_zero) {
        return Err(Error::NotAFlag("zero generator in the first member".into()));
    }
    for g in first {
        let ok = solve_combination(std::slice::from_ref(&rho0), g)?
            .is_some_and(|c| c[0].is_positive());
        if !ok {
            return Err(Error::NotAFlag("the first member is not a ray".into()));
        }
    }
    let mut dirs = Vec::new();
    for i in 1..cones.len() {
        let (prev, cur) = (&cones[i - 1], &cones[i]);
        if scalar_rank(cur)? != i + 1 {
            return Err(Error::NotAFlag(format!("member {i} does not have dimension {}", i + 1)));
        }
        for g in prev {
            if !in_cone(cur, g)? {
                return Err(Error::NotAFlag(format!("member {} is not contained in member {i}", i - 1)));
            }
        }
        let mut basis: Vec<Vec<Scalar>> = Vec::new();
        for g in prev {
            basis.push(g.clone());
            if scalar_rank(&basis)? < basis.len() {
                basis.pop();
            }
        }
        let rho = cur
            .iter()
            .find(|g| matches!(solve_combination(&basis, g), Ok(None)))
            .cloned()
            .ok_or_else(|| Error::NotAFlag(format!("member {i} adds no new direction")))?;
        basis.push(rho.clone());
        for g in cur {
            let c = solve_combination(&basis, g)?
                .ok_or_else(|| Error::NotAFlag(format!("member {i} has unexpected rank")))?;
            let t = c.last().expect("basis includes rho");
            if t.is_negative() || (t.is_zero() && !in_cone(prev, g)?) {
                return Err(Error::NotAFlag(format!("member {} is not a face of member {i}", i - 1)));
            }
        }
        dirs.push(rho);
    }
    Flag::new(FlagKind::Cones, rho0, dirs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prime::DefiningMatrix;
    use crate::scalars::rat_int;
    use crate::tropical::default_vars;

    fn s(text: &str) -> Scalar {
        Scalar::parse(text).unwrap()
    }

    fn v(texts: &[&str]) -> Vec<Scalar> {
        texts.iter().map(|t| s(t)).collect()
    }

    fn prime(rows: &[&[&str]]) -> Prime {
        canonicalize(&DefiningMatrix::parse(rows).unwrap()).unwrap()
    }

    fn poly(text: &str) -> TropPolynomial {
        TropPolynomial::parse(text, &default_vars(2)).unwrap()
    }

    #[test]
    fn fm_examples() {
        let mut a = IneqSystem::new(1);
        a.lt(v(&["1"]), s("1")).unwrap();
        a.gt(v(&["1"]), s("1")).unwrap();
        assert_eq!(fm_feasible(&a).unwrap(), None);

        let mut b = IneqSystem::new(1);
        b.le(v(&["1"]), s("sqrt(2)")).unwrap();
        b.ge(v(&["1"]), s("sqrt(2)")).unwrap();
        assert_eq!(fm_feasible(&b).unwrap(), Some(v(&["sqrt(2)"])));

        let mut c = IneqSystem::new(1);
        c.lt(v(&["1"]), s("sqrt(2)")).unwrap();
        c.gt(v(&["1"]), s("1")).unwrap();
        let x = fm_feasible(&c).unwrap().unwrap();
        assert!(x[0].is_rational());
        assert!(x[0] > s("1") && x[0] < s("sqrt(2)"));

        let mut wrong = IneqSystem::new(2);
        assert!(matches!(wrong.le(v(&["1"]), s("0")), Err(Error::Dimension { .. })));
    }

    #[test]
    fn fm_two_dimensional() {
        // The open triangle x + y < 1, x > 0, y > 0.
        let mut sys = IneqSystem::new(2);
        sys.lt(v(&["1", "1"]), s("1")).unwrap();
        sys.gt(v(&["1", "0"]), s("0")).unwrap();
        sys.gt(v(&["0", "1"]), s("0")).unwrap();
        let p = sys.sample_point().unwrap().unwrap();
        assert!(sys.contains(&p));
        sys.ge(v(&["1", "1"]), s("1")).unwrap();
        assert!(!sys.is_feasible().unwrap());
    }

    #[test]
    fn rational_set_examples() {
        let r = rational_polyhedral_set(&[poly("1"), poly("t^-1*x")]).unwrap();
        assert_eq!(r.pieces().len(), 1);
        assert_eq!(r.pieces()[0].rows(), &[(vec![1, 0], rat_int(1))]);

        let r = rational_polyhedral_set(&[poly("1"), poly("0")]).unwrap();
        assert_eq!(r.pieces()[0], GammaPolyhedron::full(2));

        let RationalSet::Cone(c) = rational_set(&[poly("1"), poly("t^1")], true).unwrap() else {
            panic!("cone requested");
        };
        assert!(c.contains(&Scalar::zero(), &v(&["5", "-3"])));
        assert!(!c.contains(&Scalar::one(), &v(&["0", "0"])));
        assert!(!c.contains(&s("-1"), &v(&["0", "0"])));

        let empty = rational_polyhedral_set(&[poly("0"), poly("x")]).unwrap();
        assert!(empty.pieces()[0].is_empty().unwrap());
    }

    #[test]
    fn flags_from_matrices() {
        let dolphin = flag_from_matrix(&prime(&[&["1", "sqrt(2)", "0"], &["0", "0", "1"]]), FlagKind::Polyhedra).unwrap();
        assert_eq!(dolphin.base(), &v(&["sqrt(2)", "0"])[..]);
        assert_eq!(dolphin.dirs(), &[v(&["0", "1"])]);
        let point = flag_from_matrix(&prime(&[&["1", "sqrt(2)", "sqrt(3)"]]), FlagKind::Polyhedra).unwrap();
        assert!(point.dirs().is_empty());
        let ray = flag_from_matrix(&prime(&[&["0", "1", "0"]]), FlagKind::Cones).unwrap();
        assert_eq!(ray.base(), &v(&["0", "1", "0"])[..]);
        assert!(matches!(
            flag_from_matrix(&prime(&[&["0", "1", "0"]]), FlagKind::Polyhedra),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn neighborhood_examples() {
        let point = flag_from_matrix(&prime(&[&["1", "sqrt(2)", "sqrt(3)"]]), FlagKind::Polyhedra).unwrap();
        let square = GammaPolyhedron::from_rows(
            2,
            vec![
                (vec![1, 0], rat_int(2)),
                (vec![-1, 0], rat_int(-1)),
                (vec![0, 1], rat_int(2)),
                (vec![0, -1], rat_int(-1)),
            ],
        )
        .unwrap();
        assert!(is_neighborhood(&square, &point).unwrap());
        let half = GammaPolyhedron::from_rows(2, vec![(vec![1, 0], rat_int(1))]).unwrap();
        assert!(!is_neighborhood(&half, &point).unwrap());

        let dolphin = flag_from_matrix(&prime(&[&["1", "sqrt(2)", "0"], &["0", "0", "1"]]), FlagKind::Polyhedra).unwrap();
        let upper = GammaPolyhedron::from_rows(2, vec![(vec![0, -1], rat_int(0))]).unwrap();
        assert!(is_neighborhood(&upper, &dolphin).unwrap());
        assert!(is_neighborhood_by_differences(&upper, &dolphin).unwrap());
        let lower = GammaPolyhedron::from_rows(2, vec![(vec![0, 1], rat_int(0))]).unwrap();
        assert!(!is_neighborhood(&lower, &dolphin).unwrap());
        assert!(!is_neighborhood_by_differences(&lower, &dolphin).unwrap());
    }

    #[test]
    fn local_equivalence_examples() {
        let whale = flag_from_matrix(&prime(&[&["1", "sqrt(2)", "0"], &["0", "1", "sqrt(3)"]]), FlagKind::Polyhedra).unwrap();
        let dolphin = flag_from_matrix(&prime(&[&["1", "sqrt(2)", "0"], &["0", "0", "1"]]), FlagKind::Polyhedra).unwrap();
        assert!(locally_equivalent(&whale, &dolphin).unwrap().is_equal());
        assert!(locally_equivalent(&whale, &whale).unwrap().is_equal());
        let origin = Flag::new(FlagKind::Polyhedra, v(&["0", "0"]), vec![]).unwrap();
        let shifted = Flag::new(FlagKind::Polyhedra, v(&["sqrt(2)", "0"]), vec![]).unwrap();
        assert!(!locally_equivalent(&origin, &shifted).unwrap().is_equal());
    }

    #[test]
    fn simplicialize_examples() {
        let c0 = vec![v(&["1", "0", "0"])];
        let c1 = vec![v(&["1", "0", "0"]), v(&["1", "1", "0"]), v(&["1", "2", "0"])];
        let f = simplicialize(&[c0.clone(), c1.clone()]).unwrap();
        assert_eq!(f.dirs(), &[v(&["1", "1", "0"])]);

        // Already simplicial input comes back unchanged.
        let c1s = vec![v(&["1", "0", "0"]), v(&["1", "1", "0"])];
        let g = simplicialize(&[c0.clone(), c1s.clone()]).unwrap();
        assert_eq!(g.base(), &c0[0][..]);
        assert_eq!(g.dirs(), &[c1s[1].clone()]);

        // A square cone over the segment.
        let c2 = vec![
            v(&["1", "0", "0"]),
            v(&["1", "1", "0"]),
            v(&["1", "1", "1"]),
            v(&["1", "0", "1"]),
        ];
        let cones = [c0.clone(), c1s.clone(), c2];
        let h = simplicialize(&cones).unwrap();
        let relint = canonicalize(&relint_matrix(&cones).unwrap()).unwrap();
        let simp = canonicalize(&h.to_matrix().unwrap()).unwrap();
        assert!(decide_equal(&relint, &simp).unwrap().is_equal());

        // (1,0,0) is not a nonnegative combination of (1,1,0) and (1,2,0).
        let bad = [c0.clone(), vec![v(&["1", "1", "0"]), v(&["1", "2", "0"])]];
        assert!(matches!(simplicialize(&bad), Err(Error::NotAFlag(_))));
        // Previous member not a face: the segment from (1,-1) to (1,1) contains (1,0) in its interior.
        let interior = [c0, vec![v(&["1", "-1", "0"]), v(&["1", "1", "0"])]];
        assert!(matches!(simplicialize(&interior), Err(Error::NotAFlag(_))));
    }

    #[test]
    fn dimensions() {
        let mut p = GammaPolyhedron::cube(&[BigInt::from(1), BigInt::from(0)], 3);
        assert_eq!(p.dimension().unwrap(), Some(2));
        p.push_equality(vec![0, 1], rat_int(0)).unwrap();
        assert_eq!(p.dimension().unwrap(), Some(1));
        p.push_equality(vec![1, 0], rat_int(0)).unwrap();
        assert_eq!(p.dimension().unwrap(), Some(0));
        assert_eq!(GammaPolyhedron::empty(2).dimension().unwrap(), None);
    }

    #[test]
    fn linear_algebra() {
        assert_eq!(scalar_rank(&[v(&["1", "sqrt(2)"]), v(&["sqrt(2)", "2"])]).unwrap(), 1);
        let c = solve_combination(&[v(&["1", "0"]), v(&["1", "1"])], &v(&["3", "sqrt(2)"])).unwrap().unwrap();
        assert_eq!(c, v(&["3 - sqrt(2)", "sqrt(2)"]));
        assert_eq!(solve_combination(&[v(&["1", "1"])], &v(&["1", "2"])).unwrap(), None);
    }
}
