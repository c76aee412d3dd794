//! Degree-bounded dense linear membership, independent of Gröbner bases.
//!
//! Unknowns are the coefficients of cofactors `h_i` of degree at most `bound`;
//! `Σ h_i g_i = v` is compared coefficientwise and solved over ℚ by
//! fraction-free elimination.

use std::collections::BTreeMap;

use algebroid_core::algebra::{Monomial, Poly, Rational};
use algebroid_core::submodule::SubmodulePresentation;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// All exponent vectors in `n` variables of total degree at most `d`.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Monomial> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if cur.len() == n {
            out.push(Monomial::from_exponents(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

/// Cofactors of degree at most `bound` expressing `v`, if any exist.
pub fn bounded_membership(v: &[Poly], gens: &SubmodulePresentation, bound: u32) -> Option<Vec<Poly>> {
    let ring = gens.ring();
    let n = ring.nvars();
    let monos = monomials_up_to(n, bound);
    let g = gens.generators();
    let unknowns = g.len() * monos.len();
    // Row index per (position, monomial) of the product space.
    let mut rows: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    let mut entries: Vec<(usize, usize, Rational)> = Vec::new();
    for (i, gi) in g.iter().enumerate() {
        for (k, m) in monos.iter().enumerate() {
            let col = i * monos.len() + k;
            for (pos, p) in gi.iter().enumerate() {
                for (t, c) in p.terms() {
                    let key = (pos, t.mul(m));
                    let next = rows.len();
                    let row = *rows.entry(key).or_insert(next);
                    entries.push((row, col, c.clone()));
                }
            }
        }
    }
    for (pos, p) in v.iter().enumerate() {
        for (t, _) in p.terms() {
            let next = rows.len();
            rows.entry((pos, t.clone())).or_insert(next);
        }
    }
    // Augmented system, last column is `v`.
    let mut a = vec![vec![Rational::zero(); unknowns + 1]; rows.len()];
    for (r, c, x) in entries {
        a[r][c] += x;
    }
    for (pos, p) in v.iter().enumerate() {
        for (t, c) in p.terms() {
            a[rows[&(pos, t.clone())]][unknowns] = c.clone();
        }
    }
    let x = solve_augmented(a, unknowns)?;
    Some(
        (0..g.len())
            .map(|i| {
                Poly::from_terms(
                    ring,
                    monos.iter().enumerate().map(|(k, m)| (m.clone(), x[i * monos.len() + k].clone())),
                )
            })
            .collect(),
    )
}

fn integer_row(row: Vec<Rational>) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    row.into_iter().map(|q| q.numer() * (&l / q.denom())).collect()
}

/// Bareiss elimination on `[A | b]`, then back substitution with free
/// unknowns set to zero.
pub fn solve_augmented(rows: Vec<Vec<Rational>>, unknowns: usize) -> Option<Vec<Rational>> {
    let mut m: Vec<Vec<BigInt>> = rows.into_iter().map(integer_row).filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..=unknowns {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        if col == unknowns {
            return None;
        }
        m.swap(row, p);
        let (top, rest) = m.split_at_mut(row + 1);
        let pivot_row = &top[row];
        for r in rest.iter_mut() {
            let f = std::mem::take(&mut r[col]);
            for c in col + 1..=unknowns {
                r[c] = (&pivot_row[col] * &r[c] - &f * &pivot_row[c]) / &prev;
            }
        }
        prev = m[row][col].clone();
        pivots.push(col);
        row += 1;
    }
    let mut x = vec![Rational::zero(); unknowns];
    for (i, &p) in pivots.iter().enumerate().rev() {
        let r = &m[i];
        let mut acc = Rational::from(r[unknowns].clone());
        for (c, xc) in x.iter().enumerate().skip(p + 1) {
            if !r[c].is_zero() && !xc.is_zero() {
                acc -= Rational::from(r[c].clone()) * xc;
            }
        }
        x[p] = acc / Rational::from(r[p].clone());
    }
    Some(x)
}
