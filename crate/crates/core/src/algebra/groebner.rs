//! Buchberger's algorithm for submodules of free modules `R^m`, `R = Q[x]`.
//!
//! Module terms are compared position-over-term: a smaller position index is
//! a larger term, ties are broken by the monomial order. Ideals are the
//! `m = 1` case. Vectors keep their terms sorted in ascending order so the
//! leading term is the last entry.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Zero};

use super::poly::Poly;
use super::ring::{Monomial, MonomialOrder, Ring, RingRef};
use super::Rational;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Term {
    pub pos: usize,
    pub mono: Monomial,
}

pub(crate) fn term_cmp(order: MonomialOrder, a: &Term, b: &Term) -> Ordering {
    b.pos.cmp(&a.pos).then_with(|| order.cmp(&a.mono, &b.mono))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct MVec {
    pub terms: Vec<(Term, Rational)>,
}

impl MVec {
    pub fn zero() -> Self {
        MVec { terms: Vec::new() }
    }

    pub fn from_components(comps: &[Poly], offset: usize, order: MonomialOrder) -> Self {
        let mut terms: Vec<(Term, Rational)> = Vec::new();
        for (i, p) in comps.iter().enumerate() {
            for (m, c) in p.terms() {
                terms.push((
                    Term {
                        pos: offset + i,
                        mono: m.clone(),
                    },
                    c.clone(),
                ));
            }
        }
        terms.sort_by(|a, b| term_cmp(order, &a.0, &b.0));
        MVec { terms }
    }

    pub fn components(&self, ring: &RingRef, from: usize, len: usize) -> Vec<Poly> {
        let mut buckets: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); len];
        for (t, c) in &self.terms {
            if t.pos >= from && t.pos < from + len {
                buckets[t.pos - from].push((t.mono.clone(), c.clone()));
            }
        }
        buckets.into_iter().map(|b| Poly::from_terms(ring, b)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> &(Term, Rational) {
        self.terms.last().expect("lead of zero vector")
    }

    pub fn lead_pos(&self) -> usize {
        self.lead().0.pos
    }

    pub fn make_monic(&mut self) {
        if let Some((_, lc)) = self.terms.last() {
            if lc.is_one() {
                return;
            }
            let inv = lc.recip();
            for (_, c) in self.terms.iter_mut() {
                *c *= &inv;
            }
        }
    }

    /// `self - k * m * other`.
    pub fn sub_scaled(&self, k: &Rational, m: &Monomial, other: &MVec, order: MonomialOrder) -> MVec {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = other
            .terms
            .iter()
            .map(|(t, c)| {
                (
                    Term {
                        pos: t.pos,
                        mono: t.mono.mul(m),
                    },
                    -(c * k),
                )
            })
            .peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => out.push(a.next().unwrap().clone()),
                (None, Some(_)) => out.push(b.next().unwrap()),
                (Some(x), Some(y)) => match term_cmp(order, &x.0, &y.0) {
                    Ordering::Less => out.push(a.next().unwrap().clone()),
                    Ordering::Greater => out.push(b.next().unwrap()),
                    Ordering::Equal => {
                        let (t, c1) = a.next().unwrap().clone();
                        let (_, c2) = b.next().unwrap();
                        let s = c1 + c2;
                        if !s.is_zero() {
                            out.push((t, s));
                        }
                    }
                },
            }
        }
        MVec { terms: out }
    }
}

fn find_reducer<'a>(t: &Term, basis: &'a [MVec]) -> Option<&'a MVec> {
    basis
        .iter()
        .find(|g| g.lead().0.pos == t.pos && g.lead().0.mono.divides(&t.mono))
}

/// Full normal form of `v` modulo `basis`.
pub(crate) fn reduce(v: &MVec, basis: &[MVec], order: MonomialOrder) -> MVec {
    let mut v = v.clone();
    let mut rem: Vec<(Term, Rational)> = Vec::new();
    while let Some((t, c)) = v.terms.last() {
        if let Some(g) = find_reducer(t, basis) {
            let (gt, gc) = g.lead();
            let m = t.mono.div(&gt.mono).unwrap();
            let k = c / gc;
            v = v.sub_scaled(&k, &m, g, order);
        } else {
            rem.push(v.terms.pop().unwrap());
        }
    }
    rem.reverse();
    MVec { terms: rem }
}

fn chain_criterion(i: usize, j: usize, lcm: &Monomial, pos: usize, g: &[MVec], pending: &BTreeSet<(usize, usize)>) -> bool {
    let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
    (0..g.len()).any(|k| {
        k != i
            && k != j
            && g[k].lead_pos() == pos
            && g[k].lead().0.mono.divides(lcm)
            && !pending.contains(&key(i, k))
            && !pending.contains(&key(j, k))
    })
}

/// Reduced Gröbner basis, sorted by decreasing leading term.
///
/// `product_criterion` may only be set for ideals (all vectors supported in
/// a single position); coprime leading monomials do not certify a zero
/// S-vector in modules of higher rank.
pub(crate) fn buchberger(gens: &[MVec], order: MonomialOrder, product_criterion: bool) -> Vec<MVec> {
    let Some(cache) = current_cache() else {
        return buchberger_uncached(gens, order, product_criterion);
    };
    let key = cache_key(gens, order, product_criterion);
    if let Some(hit) = cache.get(&key).and_then(|s| deserialize(&s)) {
        return hit;
    }
    let out = buchberger_uncached(gens, order, product_criterion);
    cache.put(&key, &serialize(&out));
    out
}

fn buchberger_uncached(gens: &[MVec], order: MonomialOrder, product_criterion: bool) -> Vec<MVec> {
    let mut g: Vec<MVec> = Vec::new();
    let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();

    let push = |g: &mut Vec<MVec>, pending: &mut BTreeSet<(usize, usize)>, mut v: MVec| {
        v.make_monic();
        let n = g.len();
        for k in 0..n {
            if g[k].lead_pos() == v.lead_pos() {
                pending.insert((k, n));
            }
        }
        g.push(v);
    };

    for v in gens {
        let r = reduce(v, &g, order);
        if !r.is_zero() {
            push(&mut g, &mut pending, r);
        }
    }

    while !pending.is_empty() {
        let &(i, j) = pending
            .iter()
            .min_by(|&&(a, b), &&(c, d)| {
                let l1 = g[a].lead().0.mono.lcm(&g[b].lead().0.mono);
                let l2 = g[c].lead().0.mono.lcm(&g[d].lead().0.mono);
                l1.degree()
                    .cmp(&l2.degree())
                    .then_with(|| order.cmp(&l1, &l2))
                    .then_with(|| (a, b).cmp(&(c, d)))
            })
            .unwrap();
        pending.remove(&(i, j));
        let (ti, _) = g[i].lead().clone();
        let (tj, _) = g[j].lead().clone();
        if product_criterion && ti.mono.is_coprime(&tj.mono) {
            continue;
        }
        let lcm = ti.mono.lcm(&tj.mono);
        if chain_criterion(i, j, &lcm, ti.pos, &g, &pending) {
            continue;
        }
        let mi = lcm.div(&ti.mono).unwrap();
        let mj = lcm.div(&tj.mono).unwrap();
        let a = MVec::zero().sub_scaled(&-Rational::one(), &mi, &g[i], order);
        let s = a.sub_scaled(&Rational::one(), &mj, &g[j], order);
        let r = reduce(&s, &g, order);
        if !r.is_zero() {
            push(&mut g, &mut pending, r);
        }
    }

    interreduce(g, order)
}

fn interreduce(g: Vec<MVec>, order: MonomialOrder) -> Vec<MVec> {
    let mut minimal: Vec<MVec> = Vec::new();
    for (i, v) in g.iter().enumerate() {
        let (t, _) = v.lead();
        let redundant = g.iter().enumerate().any(|(k, w)| {
            let (s, _) = w.lead();
            k != i && s.pos == t.pos && s.mono.divides(&t.mono) && (s.mono != t.mono || k < i)
        });
        if !redundant {
            minimal.push(v.clone());
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<MVec> = minimal
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, w)| w.clone())
            .collect();
        let mut r = reduce(&minimal[i], &others, order);
        r.make_monic();
        out.push(r);
    }
    out.sort_by(|a, b| term_cmp(order, &b.lead().0, &a.lead().0));
    out
}

/// Persistent store for computed bases. Implementations must return exactly
/// what was stored; a cache hit never changes a result.
pub trait GroebnerCache: Send + Sync {
    fn get(&self, key: &str) -> Option<String>;
    fn put(&self, key: &str, value: &str);
}

fn cache_slot() -> &'static RwLock<Option<Arc<dyn GroebnerCache>>> {
    static SLOT: OnceLock<RwLock<Option<Arc<dyn GroebnerCache>>>> = OnceLock::new();
    SLOT.get_or_init(|| RwLock::new(None))
}

/// Install (or remove) the process-wide basis cache.
pub fn set_groebner_cache(cache: Option<Arc<dyn GroebnerCache>>) {
    *cache_slot().write().unwrap() = cache;
}

fn current_cache() -> Option<Arc<dyn GroebnerCache>> {
    cache_slot().read().unwrap().clone()
}

fn cache_key(gens: &[MVec], order: MonomialOrder, product: bool) -> String {
    format!("gb1|{}|{}|{}", order.tag(), product, serialize(gens))
}

pub(crate) fn serialize(vs: &[MVec]) -> String {
    let mut s = String::new();
    for v in vs {
        for (t, c) in &v.terms {
            let exps: Vec<String> = t.mono.0.iter().map(|e| e.to_string()).collect();
            s.push_str(&format!("{}:{}:{};", t.pos, exps.join(","), c));
        }
        s.push('\n');
    }
    s
}

pub(crate) fn deserialize(s: &str) -> Option<Vec<MVec>> {
    let mut out = Vec::new();
    for line in s.lines() {
        let mut terms = Vec::new();
        for item in line.split(';').filter(|x| !x.is_empty()) {
            let mut parts = item.split(':');
            let pos = parts.next()?.parse().ok()?;
            let exps = parts.next()?;
            let exps: Vec<u32> = if exps.is_empty() {
                Vec::new()
            } else {
                exps.split(',').map(|e| e.parse().ok()).collect::<Option<_>>()?
            };
            let c: Rational = parts.next()?.parse().ok()?;
            terms.push((
                Term {
                    pos,
                    mono: Monomial(exps),
                },
                c,
            ));
        }
        out.push(MVec { terms });
    }
    Some(out)
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
pub fn groebner_basis(gens: &[Poly], order: MonomialOrder) -> Result<Vec<Poly>> {
    let Some(first) = gens.first() else {
        return Ok(Vec::new());
    };
    let ring = first.ring().clone();
    for p in gens {
        Ring::check_same(&ring, p.ring())?;
    }
    let vs: Vec<MVec> = gens
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| MVec::from_components(std::slice::from_ref(p), 0, order))
        .collect();
    let gb = buchberger(&vs, order, true);
    Ok(gb.iter().map(|v| v.components(&ring, 0, 1).remove(0)).collect())
}

/// Normal form of `p` modulo a Gröbner basis `gb` computed under `order`.
pub fn normal_form(p: &Poly, gb: &[Poly], order: MonomialOrder) -> Poly {
    let basis: Vec<MVec> = gb
        .iter()
        .map(|g| MVec::from_components(std::slice::from_ref(g), 0, order))
        .collect();
    let v = MVec::from_components(std::slice::from_ref(p), 0, order);
    reduce(&v, &basis, order).components(p.ring(), 0, 1).remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> RingRef {
        Ring::new(&["x", "y"]).unwrap()
    }

    fn ps(r: &RingRef, xs: &[&str]) -> Vec<Poly> {
        xs.iter().map(|s| Poly::parse(r, s).unwrap()).collect()
    }

    #[test]
    fn unit_ideal() {
        let r = ring();
        let gb = groebner_basis(&ps(&r, &["x", "x - 1"]), MonomialOrder::GRevLex).unwrap();
        assert_eq!(gb, vec![Poly::one(&r)]);
    }

    #[test]
    fn already_reduced() {
        let r = ring();
        let gb = groebner_basis(&ps(&r, &["x^2", "y^2"]), MonomialOrder::GRevLex).unwrap();
        assert_eq!(gb, ps(&r, &["x^2", "y^2"]));
    }

    #[test]
    fn mixed_rings_rejected() {
        let r = ring();
        let s = Ring::new(&["u"]).unwrap();
        let err = groebner_basis(&[Poly::var(&r, 0), Poly::var(&s, 0)], MonomialOrder::GRevLex);
        assert!(matches!(err, Err(crate::Error::RingMismatch { .. })));
    }

    #[test]
    fn serialization_round_trip() {
        let r = ring();
        let order = MonomialOrder::GRevLex;
        let v = MVec::from_components(&ps(&r, &["3/2*x^2 - y", "7"]), 0, order);
        let back = deserialize(&serialize(&[v.clone(), MVec::zero()])).unwrap();
        assert_eq!(back, vec![v, MVec::zero()]);
    }

    #[test]
    fn module_basis_without_product_criterion() {
        // x*e1 + e2 and y*e1: the S-vector y*e2 survives.
        let r = ring();
        let order = MonomialOrder::GRevLex;
        let a = MVec::from_components(&ps(&r, &["x", "1"]), 0, order);
        let b = MVec::from_components(&ps(&r, &["y", "0"]), 0, order);
        let gb = buchberger(&[a, b], order, false);
        assert_eq!(gb.len(), 3);
        assert!(gb.iter().any(|v| v.components(&r, 0, 2) == ps(&r, &["0", "y"])));
    }
}
