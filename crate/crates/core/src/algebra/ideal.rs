use super::groebner::{groebner_basis, normal_form};
use super::poly::Poly;
use super::ring::{MonomialOrder, Ring, RingRef};
use crate::error::Result;

/// Ideal given by generators in one ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ideal {
    ring: RingRef,
    gens: Vec<Poly>,
}

impl Ideal {
    pub fn new(ring: &RingRef, gens: Vec<Poly>) -> Result<Self> {
        for g in &gens {
            Ring::check_same(ring, g.ring())?;
        }
        Ok(Ideal {
            ring: ring.clone(),
            gens,
        })
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn generators(&self) -> &[Poly] {
        &self.gens
    }

    pub fn groebner(&self, order: MonomialOrder) -> Vec<Poly> {
        groebner_basis(&self.gens, order).expect("generators share the ideal's ring")
    }

    /// Whether 1 lies in the ideal. A `true` answer means the generators
    /// have no common zero over any extension field; `false` says nothing
    /// about real zeros.
    pub fn contains_one(&self) -> bool {
        if self.gens.iter().any(|g| g.is_constant() && !g.is_zero()) {
            return true;
        }
        self.groebner(MonomialOrder::GRevLex)
            .iter()
            .any(|g| g.is_constant() && !g.is_zero())
    }

    pub fn contains(&self, p: &Poly) -> Result<bool> {
        Ring::check_same(&self.ring, p.ring())?;
        if p.is_zero() {
            return Ok(true);
        }
        let gb = self.groebner(MonomialOrder::GRevLex);
        Ok(normal_form(p, &gb, MonomialOrder::GRevLex).is_zero())
    }
}

/// Convenience wrapper: whether 1 lies in the ideal.
pub fn ideal_contains_one(ideal: &Ideal) -> bool {
    ideal.contains_one()
}
