//! Random generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use valflag::prime::{canonicalize, DefiningMatrix, Prime};
use valflag::scalars::{rat, Scalar};
use valflag::tropical::{ExponentVector, Term};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const POOL: &[&str] = &[
    "0", "0", "0", "1", "-1", "2", "1/2", "-3/2", "sqrt(2)", "-sqrt(2)", "sqrt(3)", "1 + sqrt(2)",
    "1/2*sqrt(3)", "sqrt(6)", "1 - 1/3*sqrt(2)", "2/3",
];

pub fn s(text: &str) -> Scalar {
    Scalar::parse(text).unwrap()
}

pub fn pick(rng: &mut ChaCha8Rng) -> Scalar {
    s(POOL.choose(rng).unwrap())
}

pub fn small_rational(rng: &mut ChaCha8Rng, max_abs: i64, max_den: i64) -> BigRational {
    let d = rng.gen_range(1..=max_den);
    let n = rng.gen_range(-max_abs * d..=max_abs * d);
    rat(n, d)
}

/// A cont prime: first row `(1, xi_0)`, then up to `n` rows `(0, xi_i)`.
pub fn random_cont_prime(rng: &mut ChaCha8Rng, n: usize) -> Prime {
    let k = rng.gen_range(0..=n);
    let mut rows = Vec::new();
    let mut first = vec![Scalar::one()];
    first.extend((0..n).map(|_| pick(rng)));
    rows.push(first);
    for _ in 0..k {
        let mut r = vec![Scalar::zero()];
        r.extend((0..n).map(|_| pick(rng)));
        rows.push(r);
    }
    canonicalize(&DefiningMatrix::new(n, rows).unwrap()).unwrap()
}

/// Any defining matrix with nonnegative first column.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DefiningMatrix {
    let k = rng.gen_range(1..=n + 1);
    let rows = (0..k)
        .map(|_| {
            let c = Scalar::from_int(*[0, 0, 1, 1, 2].choose(rng).unwrap());
            std::iter::once(c).chain((0..n).map(|_| pick(rng))).collect()
        })
        .collect();
    DefiningMatrix::new(n, rows).unwrap()
}

/// Applies random prime-preserving row operations: positive scaling, adding
/// multiples of a row to a later row, and inserting zero rows.
pub fn scramble(rng: &mut ChaCha8Rng, m: &DefiningMatrix) -> DefiningMatrix {
    let mut rows = m.rows().to_vec();
    for _ in 0..rng.gen_range(1..5) {
        match rng.gen_range(0..3) {
            0 => {
                let i = rng.gen_range(0..rows.len());
                let f = s(["2", "1/3", "sqrt(2)", "1 + sqrt(3)"].choose(rng).unwrap());
                rows[i] = rows[i].iter().map(|x| x * &f).collect();
            }
            1 if rows.len() > 1 => {
                let j = rng.gen_range(1..rows.len());
                let i = rng.gen_range(0..j);
                let f = pick(rng);
                let add: Vec<Scalar> = rows[i].iter().map(|x| x * &f).collect();
                rows[j] = rows[j].iter().zip(&add).map(|(a, b)| a + b).collect();
            }
            _ => {
                let at = rng.gen_range(0..=rows.len());
                rows.insert(at, vec![Scalar::zero(); m.n() + 1]);
            }
        }
    }
    DefiningMatrix::new(m.n(), rows).unwrap()
}

pub fn random_term(rng: &mut ChaCha8Rng, n: usize, max_exp: i64) -> Term {
    let g = small_rational(rng, 3, 3);
    Term::new(g, (0..n).map(|_| rng.gen_range(-max_exp..=max_exp)).collect())
}

/// Lex sign of `C w` with a floating-point fast path; exact whenever the
/// float is too close to zero to trust.
pub fn oracle_sign(m: &DefiningMatrix, w: &ExponentVector) -> i8 {
    let v = w.to_scalars();
    for row in m.rows() {
        let approx: f64 = row.iter().zip(&v).map(|(a, b)| a.to_f64() * b.to_f64()).sum();
        if approx > 1e-9 {
            return 1;
        }
        if approx < -1e-9 {
            return -1;
        }
        let exact: Scalar = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        match exact.signum() {
            0 => continue,
            s => return s,
        }
    }
    0
}

/// Exponent vectors with `u` in `{-r..r}^n` and `gamma = p/q`, `|gamma| <= r`, `q <= max_den`.
pub fn exponent_grid(n: usize, r: i64, max_den: i64) -> Vec<ExponentVector> {
    let mut gammas: Vec<BigRational> = Vec::new();
    for q in 1..=max_den {
        for p in -r * q..=r * q {
            let g = rat(p, q);
            if !gammas.contains(&g) {
                gammas.push(g);
            }
        }
    }
    let mut us: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..n {
        us = us
            .into_iter()
            .flat_map(|u| (-r..=r).map(move |e| {
                let mut v = u.clone();
                v.push(e);
                v
            }))
            .collect();
    }
    let mut out = Vec::new();
    for g in &gammas {
        for u in &us {
            out.push(ExponentVector::new(g.clone(), u.clone()));
        }
    }
    out
}
