//! The group `Lambda^p = phi_m^{-1}(H)` inside `G(Z[1/p])`, its standard
//! generators, and the growth of its Cayley ball.
//!
//! Elements of `G(Z[1/p])` are order elements of norm `p^k` modulo the
//! scalars `+-p^j`. Dividing by the content and fixing the sign gives a
//! unique representative.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, rem};
use crate::congruence::CongruencePair;
use crate::error::{Error, Result};
use crate::finite::FiniteGroupTable;
use crate::quat::{IbukiyamaOrder, OrderElement};
use crate::units::{norm_class_representatives, unit_group};

/// Default largest radius for [`ball_sizes`].
pub const DEFAULT_RADIUS_CAP: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PadicClass {
    /// Primitive, first nonzero coordinate positive.
    pub representative: OrderElement,
    /// `N(representative) = p^k`.
    pub k: u32,
}

/// Exponent `k` with `n = p^k`, if any.
fn p_power(mut n: i64, p: i64) -> Option<u32> {
    if n <= 0 {
        return None;
    }
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    (n == 1).then_some(k)
}

/// The class of `a` in `G(Z[1/p])`.
pub fn canonicalize(order: &IbukiyamaOrder, a: &OrderElement, p: i64) -> Result<PadicClass> {
    if a.is_zero() {
        return Err(Error::NotPIntegralUnit { norm: 0, p });
    }
    let c = a.content();
    let prim = OrderElement(a.0.map(|x| x / c)).sign_normalized();
    let n = order.norm(&prim);
    let k = p_power(n, p).ok_or(Error::NotPIntegralUnit { norm: n, p })?;
    Ok(PadicClass { representative: prim, k })
}

/// `p + 1` elements of norm `p` generating `Lambda^p`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub p: i64,
    pub m: u32,
    pub elements: Vec<PadicClass>,
    /// `inverse[k]` is the index of the class of `conj(elements[k])`.
    pub inverse: Vec<usize>,
}

impl GeneratorSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn representatives(&self) -> Vec<OrderElement> {
        self.elements.iter().map(|c| c.representative).collect()
    }
}

/// Picks, in each left unit-orbit of norm-`p` elements, the one class that
/// reduces into `H`.
pub fn build_generator_set(
    order: &IbukiyamaOrder,
    p: i64,
    g: &FiniteGroupTable,
    pair: &CongruencePair,
) -> Result<GeneratorSet> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let m = pair.m as i64;
    if rem(m, p) == 0 || order.params.ramified == p {
        return Err(Error::Parameter(format!("p={p} must not divide m*P = {}", m * order.params.ramified)));
    }
    let classes = norm_class_representatives(order, p)?;
    let mut elements = Vec::with_capacity(classes.orbits.len());
    for orbit in &classes.orbits {
        let mut hits: Vec<OrderElement> = orbit
            .iter()
            .filter(|a| g.index_of(a).is_some_and(|i| pair.h.contains(i)))
            .map(|a| a.sign_normalized())
            .collect();
        hits.sort_unstable();
        hits.dedup();
        if hits.len() != 1 {
            return Err(Error::Consistency(format!(
                "orbit of {} has {} classes reducing into H, expected exactly one",
                orbit[0],
                hits.len()
            )));
        }
        elements.push(canonicalize(order, &hits[0], p)?);
    }
    let inverse = elements
        .iter()
        .map(|s| {
            let c = canonicalize(order, &order.conjugate(&s.representative), p)?;
            elements
                .iter()
                .position(|t| *t == c)
                .ok_or_else(|| Error::Consistency(format!("conjugate of {} is not a generator", s.representative)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratorSet { p, m: pair.m, elements, inverse })
}

/// Checks the invariants of a generator set: size, inverse pairing, `s * conj(s)`
/// trivial, every generator in `H`, and no nontrivial unit in `H`.
pub fn check_generator_set(
    order: &IbukiyamaOrder,
    s: &GeneratorSet,
    g: &FiniteGroupTable,
    pair: &CongruencePair,
) -> Result<()> {
    let fail = |msg: String| Err(Error::Consistency(msg));
    if s.len() as i64 != s.p + 1 {
        return fail(format!("{} generators, expected {}", s.len(), s.p + 1));
    }
    for (k, x) in s.elements.iter().enumerate() {
        let inv = &s.elements[s.inverse[k]];
        let prod = canonicalize(order, &order.multiply(&x.representative, &inv.representative), s.p)?;
        if prod.representative != OrderElement::ONE {
            return fail(format!("{} times its inverse is {}", x.representative, prod.representative));
        }
        if s.inverse[s.inverse[k]] != k {
            return fail("inverse pairing is not an involution".into());
        }
        if !g.index_of(&x.representative).is_some_and(|i| pair.h.contains(i)) {
            return fail(format!("generator {} does not reduce into H", x.representative));
        }
    }
    let units = unit_group(order)?;
    for u in units.elements.iter().skip(1) {
        if g.index_of(u).is_some_and(|i| pair.h.contains(i)) {
            return fail(format!("unit {u} reduces into H"));
        }
    }
    Ok(())
}

/// Sphere sizes `|S_0|, ..., |S_R|` of the Cayley ball of `Lambda^p`.
pub fn ball_sizes(order: &IbukiyamaOrder, s: &GeneratorSet, radius: usize) -> Result<Vec<usize>> {
    ball_sizes_with_cap(order, s, radius, DEFAULT_RADIUS_CAP)
}

pub fn ball_sizes_with_cap(order: &IbukiyamaOrder, s: &GeneratorSet, radius: usize, cap: usize) -> Result<Vec<usize>> {
    if radius > cap {
        return Err(Error::Resource { what: "ball radius", size: radius, cap });
    }
    let identity = canonicalize(order, &OrderElement::ONE, s.p)?;
    let mut seen: HashSet<OrderElement> = HashSet::from([identity.representative]);
    let mut sphere = vec![identity];
    let mut sizes = vec![1];
    for r in 1..=radius {
        let mut next = Vec::new();
        for x in &sphere {
            for g in &s.elements {
                let prod = order.multiply(&x.representative, &g.representative);
                if order.norm(&prod) != s.p.pow(x.k + 1) {
                    return Err(Error::Consistency(format!("norm of a length-{r} product is not p^(k+1)")));
                }
                let c = canonicalize(order, &prod, s.p)?;
                if seen.insert(c.representative) {
                    next.push(c);
                }
            }
        }
        // deterministic regardless of hash order
        next.sort_unstable();
        sizes.push(next.len());
        sphere = next;
    }
    Ok(sizes)
}

/// Sphere sizes of the `(p+1)`-regular tree.
pub fn tree_sphere_sizes(p: i64, radius: usize) -> Vec<usize> {
    let p = p as usize;
    (0..=radius).map(|r| if r == 0 { 1 } else { (p + 1) * p.pow(r as u32 - 1) }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::congruence_pairs;
    use crate::quat::AlgebraParams;

    fn reference(p: i64) -> IbukiyamaOrder {
        IbukiyamaOrder::new(AlgebraParams::reference(p).unwrap()).unwrap()
    }

    fn generators(big_p: i64, m: u32, p: i64) -> (IbukiyamaOrder, GeneratorSet) {
        let o = reference(big_p);
        let (g, r) = congruence_pairs(&o, m).unwrap();
        let s = build_generator_set(&o, p, &g, &r.pairs[0]).unwrap();
        check_generator_set(&o, &s, &g, &r.pairs[0]).unwrap();
        (o, s)
    }

    #[test]
    fn canonical_forms() {
        let o = reference(2);
        let id = canonicalize(&o, &OrderElement([5, 0, 0, 0]), 5).unwrap();
        assert_eq!(id.representative, OrderElement::ONE);
        assert_eq!(id.k, 0);
        let a = OrderElement([1, 0, 0, 1]);
        assert_eq!(canonicalize(&o, &a, 2).unwrap(), canonicalize(&o, &-a, 2).unwrap());
        let n = o.norm(&a);
        let prod = o.multiply(&a, &o.conjugate(&a));
        assert_eq!(canonicalize(&o, &prod, n).unwrap().representative, OrderElement::ONE);
    }

    #[test]
    fn non_p_units_rejected() {
        let o = reference(2);
        // norm 2 is not a power of 5
        assert!(matches!(
            canonicalize(&o, &OrderElement([1, 0, 0, 1]), 5),
            Err(Error::NotPIntegralUnit { norm: 2, p: 5 })
        ));
    }

    #[test]
    fn generator_counts() {
        assert_eq!(generators(2, 3, 5).1.len(), 6);
        assert_eq!(generators(13, 1, 2).1.len(), 3);
        assert_eq!(generators(7, 2, 3).1.len(), 4);
    }

    #[test]
    fn p_dividing_modulus_rejected() {
        let o = reference(2);
        let (g, r) = congruence_pairs(&o, 3).unwrap();
        assert!(build_generator_set(&o, 3, &g, &r.pairs[0]).is_err());
    }

    #[test]
    fn small_balls() {
        let (o, s) = generators(7, 2, 3);
        assert_eq!(ball_sizes(&o, &s, 0).unwrap(), vec![1]);
        assert_eq!(ball_sizes(&o, &s, 2).unwrap(), vec![1, 4, 12]);
        assert!(ball_sizes(&o, &s, 6).is_err());
    }

    #[test]
    fn tree_growth_p2_p5() {
        let (o, s) = generators(2, 3, 5);
        assert_eq!(ball_sizes(&o, &s, 4).unwrap(), vec![1, 6, 30, 150, 750]);
        assert_eq!(tree_sphere_sizes(5, 4), vec![1, 6, 30, 150, 750]);
    }

    #[test]
    fn all_norm_p_classes_do_not_act_freely() {
        // without the congruence condition the p+1 orbit representatives
        // need not form an inverse-closed set, and the ball falls short
        let o = reference(2);
        let reps = norm_class_representatives(&o, 5).unwrap().representatives;
        let elements: Vec<PadicClass> = reps.iter().map(|r| canonicalize(&o, r, 5).unwrap()).collect();
        let s = GeneratorSet { p: 5, m: 1, elements, inverse: vec![] };
        let sizes = ball_sizes(&o, &s, 3).unwrap();
        assert_ne!(sizes, tree_sphere_sizes(5, 3));
    }
}
