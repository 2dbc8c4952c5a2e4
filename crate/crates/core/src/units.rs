//! Unit groups, the Eichler class number, and classes of elements of prime
//! norm modulo units.

use std::collections::HashMap;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, kronecker, prime_factors};
use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::lattice::enumerate_norm_solutions;
use crate::quat::{IbukiyamaOrder, OrderElement};

impl OrderElement {
    /// `self` or `-self`, whichever has its first nonzero coordinate positive.
    pub fn sign_normalized(self) -> Self {
        match self.0.iter().find(|&&c| c != 0) {
            Some(&c) if c < 0 => -self,
            _ => self,
        }
    }
}

/// `O^x / {+-1}` with its multiplication table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnitGroup {
    /// Every solution of `N = 1`, both signs, sorted.
    pub all: Vec<OrderElement>,
    /// One sign-normalized representative per `+-` pair; the identity first.
    pub elements: Vec<OrderElement>,
    /// `table[a][b]` is the index of `elements[a] * elements[b]`.
    pub table: Vec<Vec<usize>>,
    pub fingerprint: Fingerprint,
    pub label: String,
}

impl UnitGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, e: &OrderElement) -> Option<usize> {
        let e = e.sign_normalized();
        self.elements.iter().position(|x| *x == e)
    }
}

/// Units of the order modulo `+-1`. The labels that occur for class number
/// one are `A4, S3, C3, C2, C1` for `P = 2, 3, 5, 7, 13`.
pub fn unit_group(order: &IbukiyamaOrder) -> Result<UnitGroup> {
    let all = enumerate_norm_solutions(order, 1);
    let mut elements: Vec<OrderElement> = all.iter().map(|u| u.sign_normalized()).collect();
    elements.sort_unstable();
    elements.dedup();
    if let Some(pos) = elements.iter().position(|e| *e == OrderElement::ONE) {
        elements.remove(pos);
    } else {
        return Err(Error::Consistency("1 is not a unit".into()));
    }
    elements.insert(0, OrderElement::ONE);

    let index: HashMap<OrderElement, usize> =
        elements.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let mut table = vec![vec![0; elements.len()]; elements.len()];
    for (a, ea) in elements.iter().enumerate() {
        for (b, eb) in elements.iter().enumerate() {
            let prod = order.multiply(ea, eb).sign_normalized();
            table[a][b] = *index.get(&prod).ok_or_else(|| {
                Error::Consistency(format!("unit product {ea}*{eb} = {prod} left the unit set"))
            })?;
        }
    }
    let ids: Vec<usize> = (0..elements.len()).collect();
    let fingerprint = Fingerprint::of(&ids, 0, |a, b| table[a][b]);
    let label = fingerprint.label();
    Ok(UnitGroup { all, elements, table, fingerprint, label })
}

/// Eichler's class number of the definite quaternion algebra whose
/// discriminant is the squarefree integer `disc`.
pub fn class_number(disc: u64) -> Result<u64> {
    if disc < 2 {
        return Err(Error::Parameter(format!("discriminant {disc} must be at least 2")));
    }
    let primes = prime_factors(disc);
    if primes.iter().product::<u64>() != disc {
        return Err(Error::Parameter(format!("discriminant {disc} is not squarefree")));
    }
    let prod = |f: &dyn Fn(i64) -> i64| primes.iter().map(|&p| f(p as i64)).product::<i64>();
    let h = Rational64::new(prod(&|p| p - 1), 12)
        + Rational64::new(prod(&|p| 1 - kronecker(-4, p) as i64), 4)
        + Rational64::new(prod(&|p| 1 - kronecker(-3, p) as i64), 3);
    if !h.is_integer() || *h.numer() <= 0 {
        return Err(Error::FormulaMisuse { disc, value: h.to_string() });
    }
    Ok(*h.numer() as u64)
}

/// Left unit-orbits `{u * a : u in O^x}` of the elements of norm `n`, each
/// sorted, listed by their least member.
pub fn unit_orbits(order: &IbukiyamaOrder, units: &UnitGroup, n: i64) -> Vec<Vec<OrderElement>> {
    let sols = enumerate_norm_solutions(order, n);
    let mut seen: HashMap<OrderElement, usize> = HashMap::with_capacity(sols.len());
    let mut orbits: Vec<Vec<OrderElement>> = Vec::new();
    for a in &sols {
        if seen.contains_key(a) {
            continue;
        }
        let mut orbit: Vec<OrderElement> = units.all.iter().map(|u| order.multiply(u, a)).collect();
        orbit.sort_unstable();
        orbit.dedup();
        for x in &orbit {
            seen.insert(*x, orbits.len());
        }
        orbits.push(orbit);
    }
    orbits
}

/// `p + 1` elements of norm `p`, one per left unit-orbit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormClassSet {
    pub p: i64,
    /// Lexicographically least member of each orbit.
    pub representatives: Vec<OrderElement>,
    pub orbits: Vec<Vec<OrderElement>>,
    /// `conjugate_pairing[k]` is the orbit containing `conj(representatives[k])`.
    /// Conjugation turns left orbits into right orbits, so this is an
    /// involution only when the unit group is trivial.
    pub conjugate_pairing: Vec<usize>,
    pub raw_solutions: usize,
}

pub fn norm_class_representatives(order: &IbukiyamaOrder, p: i64) -> Result<NormClassSet> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if order.params.ramified == p {
        return Err(Error::Parameter(format!("p={p} divides the discriminant; the algebra does not split")));
    }
    let units = unit_group(order)?;
    let orbits = unit_orbits(order, &units, p);
    if orbits.len() as i64 != p + 1 {
        return Err(Error::Consistency(format!(
            "found {} unit-orbits of norm {p}, expected {}",
            orbits.len(),
            p + 1
        )));
    }
    let representatives: Vec<OrderElement> = orbits.iter().map(|o| o[0]).collect();
    let conjugate_pairing = representatives
        .iter()
        .map(|r| {
            let c = order.conjugate(r);
            orbits
                .iter()
                .position(|o| o.binary_search(&c).is_ok())
                .ok_or_else(|| Error::Consistency(format!("conjugate of {r} has no orbit")))
        })
        .collect::<Result<Vec<_>>>()?;
    let raw_solutions = orbits.iter().map(Vec::len).sum();
    Ok(NormClassSet { p, representatives, orbits, conjugate_pairing, raw_solutions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_in;
    use crate::quat::{ibukiyama_order, AlgebraParams};

    fn reference(p: i64) -> IbukiyamaOrder {
        IbukiyamaOrder::new(AlgebraParams::reference(p).unwrap()).unwrap()
    }

    #[test]
    fn unit_group_labels() {
        let expect = [(2, 24, "A4"), (3, 12, "S3"), (5, 6, "C3"), (7, 4, "C2"), (13, 2, "C1")];
        for (p, raw, label) in expect {
            let u = unit_group(&reference(p)).unwrap();
            assert_eq!(u.all.len(), raw, "P={p}");
            assert_eq!(u.order(), raw / 2);
            assert_eq!(u.label, label);
        }
    }

    #[test]
    fn p5_units_are_one_w1_and_one_minus_w1() {
        let u = unit_group(&reference(5)).unwrap();
        let mut want = vec![
            OrderElement([1, 0, 0, 0]),
            OrderElement([0, 1, 0, 0]),
            OrderElement([1, -1, 0, 0]),
        ];
        want.sort();
        let mut got = u.elements.clone();
        got.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn p7_units_are_one_and_w3() {
        let u = unit_group(&reference(7)).unwrap();
        assert_eq!(u.elements, vec![OrderElement::ONE, OrderElement([0, 0, 0, 1])]);
    }

    #[test]
    fn class_numbers() {
        assert_eq!(class_number(2).unwrap(), 1);
        assert_eq!(class_number(13).unwrap(), 1);
        assert_eq!(class_number(11).unwrap(), 2);
        let ones: Vec<i64> = primes_in(2, 100)
            .into_iter()
            .filter(|&d| class_number(d as u64).unwrap() == 1)
            .collect();
        assert_eq!(ones, vec![2, 3, 5, 7, 13]);
        // three ramified primes
        assert_eq!(class_number(30).unwrap(), 2);
    }

    #[test]
    fn class_number_rejects_misuse() {
        assert!(matches!(class_number(6), Err(Error::FormulaMisuse { .. })));
        assert!(matches!(class_number(12), Err(Error::Parameter(_))));
    }

    #[test]
    fn norm_classes_examples() {
        let s = norm_class_representatives(&reference(2), 3).unwrap();
        assert_eq!(s.representatives.len(), 4);
        assert_eq!(s.raw_solutions, 96);
        let s = norm_class_representatives(&ibukiyama_order(13, None, None).unwrap(), 2).unwrap();
        assert_eq!(s.representatives.len(), 3);
        let s = norm_class_representatives(&reference(5), 2).unwrap();
        assert_eq!(s.representatives.len(), 3);
        assert_eq!(s.raw_solutions, 18);
    }

    #[test]
    fn norm_classes_brute_force_partition() {
        // oracle: union-find over all solutions under left multiplication by
        // each unit, independent of the orbit routine
        let o = reference(2);
        let u = unit_group(&o).unwrap();
        let sols = enumerate_norm_solutions(&o, 3);
        let mut parent: Vec<usize> = (0..sols.len()).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for (i, a) in sols.iter().enumerate() {
            for unit in &u.all {
                let j = sols.binary_search(&o.multiply(unit, a)).unwrap();
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
        let mut roots: Vec<usize> = (0..sols.len()).map(|i| find(&mut parent, i)).collect();
        roots.sort();
        roots.dedup();
        assert_eq!(roots.len(), 4);
    }

    #[test]
    fn conjugate_pairing_lands_in_orbits() {
        for p in [2, 3, 5, 7, 13] {
            let o = reference(p);
            for ell in primes_in(2, 11).into_iter().filter(|&l| l != p) {
                let s = norm_class_representatives(&o, ell).unwrap();
                for (k, &j) in s.conjugate_pairing.iter().enumerate() {
                    let c = o.conjugate(&s.representatives[k]);
                    assert!(s.orbits[j].binary_search(&c).is_ok());
                }
            }
        }
    }

    #[test]
    fn conjugate_pairing_is_involution_with_trivial_units() {
        let o = ibukiyama_order(13, None, None).unwrap();
        for ell in [2, 3, 5, 7, 11] {
            let s = norm_class_representatives(&o, ell).unwrap();
            for (k, &j) in s.conjugate_pairing.iter().enumerate() {
                assert_eq!(s.conjugate_pairing[j], k);
            }
        }
    }

    #[test]
    fn ramified_prime_rejected() {
        assert!(matches!(norm_class_representatives(&reference(3), 3), Err(Error::Parameter(_))));
    }
}
