//! Deterministic sample points for pointwise certificates.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Poly, Rational};

const GRID: [i64; 5] = [0, 1, -1, 2, -2];
const GRID_FULL_LIMIT: usize = 4;

/// Grid points `{0, 1, -1, 2, -2}^n`, sparsest first. For more than four
/// variables only points with at most two nonzero coordinates are kept.
pub fn grid_points(n: usize) -> Vec<Vec<Rational>> {
    let max_support = if n <= GRID_FULL_LIMIT { n } else { 2 };
    let total = GRID.len().pow(n as u32);
    let mut pts: Vec<Vec<usize>> = (0..total)
        .map(|mut code| {
            let mut idx = vec![0usize; n];
            for k in (0..n).rev() {
                idx[k] = code % GRID.len();
                code /= GRID.len();
            }
            idx
        })
        .filter(|idx| idx.iter().filter(|&&i| i != 0).count() <= max_support)
        .collect();
    pts.sort_by_key(|p| (p.iter().filter(|&&i| i != 0).count(), p.iter().copied().max().unwrap_or(0)));
    pts.into_iter()
        .map(|p| p.into_iter().map(|i| Rational::from_integer(BigInt::from(GRID[i]))).collect())
        .collect()
}

/// `count` pseudo-random rational points from a fixed seed.
pub fn random_points(n: usize, count: usize, seed: u64) -> Vec<Vec<Rational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let num: i64 = rng.gen_range(-9..=9);
                    let den: i64 = rng.gen_range(1..=5);
                    Rational::new(BigInt::from(num), BigInt::from(den))
                })
                .collect()
        })
        .collect()
}

/// Points where one coordinate is a root of an entry that is linear in that
/// coordinate once the others are set to zero.
pub fn linear_roots<'a>(n: usize, polys: impl IntoIterator<Item = &'a Poly>) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for p in polys {
        for k in 0..n {
            let mut a = Rational::zero();
            let mut b = Rational::zero();
            let mut linear = true;
            for (m, c) in p.terms() {
                let e = m.exponents();
                if e.iter().enumerate().any(|(i, &d)| i != k && d > 0) {
                    continue;
                }
                match e[k] {
                    0 => b = c.clone(),
                    1 => a = c.clone(),
                    _ => linear = false,
                }
            }
            if linear && !a.is_zero() && !b.is_zero() {
                let mut pt = vec![Rational::zero(); n];
                pt[k] = -b / a;
                if !out.contains(&pt) {
                    out.push(pt);
                }
            }
        }
    }
    out
}

/// Standard candidate list: grid, then linear roots, then random points.
pub fn candidate_points<'a>(n: usize, polys: impl IntoIterator<Item = &'a Poly>, random: usize) -> Vec<Vec<Rational>> {
    let mut pts = grid_points(n);
    for p in linear_roots(n, polys) {
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts.extend(random_points(n, random, 0));
    pts
}
