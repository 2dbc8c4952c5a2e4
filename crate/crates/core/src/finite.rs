//! The finite groups `G(Z/mZ) = (O/mO)^x / (Z/mZ)^x`, represented by
//! residue coordinates in the order's basis.
//!
//! A class is stored by the lexicographically least tuple among its scalar
//! multiples `u * (x, y, z, w)`, `u` a unit mod `m`. Normalising the first
//! invertible coordinate to 1 does not work for composite `m` (e.g. `m = 4`,
//! where a class may have no invertible coordinate at all).


use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::quat::{IbukiyamaOrder, OrderElement};

/// Default largest group for which a full product table is built.
pub const DEFAULT_TABLE_CAP: usize = 2500;

/// Element of `G(Z/mZ)` in canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjClass {
    pub modulus: u32,
    pub coords: [u32; 4],
}

/// Residue arithmetic of one order modulo one `m`.
#[derive(Clone, Debug)]
pub struct ResidueRing {
    pub modulus: u32,
    structure: [[[u32; 4]; 4]; 4],
    gram: [[i64; 4]; 4],
    scalars: Vec<u32>,
}

impl ResidueRing {
    pub fn new(order: &IbukiyamaOrder, modulus: u32) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Parameter("modulus must be positive".into()));
        }
        let m = modulus as i64;
        let s = order.structure();
        let structure = std::array::from_fn(|u| {
            std::array::from_fn(|v| std::array::from_fn(|k| s[u][v][k].rem_euclid(m) as u32))
        });
        let scalars = (0..modulus.max(1)).filter(|&u| gcd(u as i64, m) == 1).collect::<Vec<_>>();
        Ok(ResidueRing {
            modulus,
            structure,
            gram: order.norm_form().gram,
            scalars: if modulus == 1 { vec![0] } else { scalars },
        })
    }

    /// The scalar units `(Z/mZ)^x`.
    pub fn scalars(&self) -> &[u32] {
        &self.scalars
    }

    pub fn reduce(&self, a: &OrderElement) -> [u32; 4] {
        let m = self.modulus as i64;
        a.0.map(|c| c.rem_euclid(m) as u32)
    }

    pub fn norm(&self, c: &[u32; 4]) -> u64 {
        let m = self.modulus as i128;
        let mut acc: i128 = 0;
        for r in 0..4 {
            for s in 0..4 {
                acc += c[r] as i128 * self.gram[r][s] as i128 * c[s] as i128;
            }
        }
        ((acc / 2).rem_euclid(m)) as u64
    }

    pub fn is_unit(&self, c: &[u32; 4]) -> bool {
        gcd(self.norm(c) as i64, self.modulus as i64) == 1
    }

    pub fn mul(&self, a: &[u32; 4], b: &[u32; 4]) -> [u32; 4] {
        let m = self.modulus as u64;
        let mut acc = [0u64; 4];
        for u in 0..4 {
            if a[u] == 0 {
                continue;
            }
            for v in 0..4 {
                if b[v] == 0 {
                    continue;
                }
                let s = a[u] as u64 * b[v] as u64 % m;
                for k in 0..4 {
                    acc[k] += s * self.structure[u][v][k] as u64;
                }
            }
        }
        acc.map(|x| (x % m) as u32)
    }

    fn scale(&self, u: u32, c: &[u32; 4]) -> [u32; 4] {
        let m = self.modulus as u64;
        c.map(|x| (u as u64 * x as u64 % m) as u32)
    }

    pub fn canonical(&self, c: &[u32; 4]) -> [u32; 4] {
        self.scalars.iter().map(|&u| self.scale(u, c)).min().expect("nonempty scalar group")
    }

    /// Reduction map `O -> G(Z/mZ)`.
    pub fn reduce_class(&self, a: &OrderElement, norm: i64) -> Result<ProjClass> {
        if gcd(norm, self.modulus as i64) != 1 {
            return Err(Error::NotInvertible { norm, modulus: self.modulus });
        }
        Ok(ProjClass { modulus: self.modulus, coords: self.canonical(&self.reduce(a)) })
    }
}

/// Canonical projective class of `a` modulo `m`.
pub fn reduce_mod(order: &IbukiyamaOrder, a: &OrderElement, modulus: u32) -> Result<ProjClass> {
    ResidueRing::new(order, modulus)?.reduce_class(a, order.norm(a))
}

/// Order of `G(Z/mZ)`, counted without building a product table.
pub fn group_order(order: &IbukiyamaOrder, modulus: u32) -> Result<usize> {
    let ring = ResidueRing::new(order, modulus)?;
    let mut units = 0usize;
    for_each_tuple(modulus, |c| {
        if ring.is_unit(&c) {
            units += 1;
        }
    });
    Ok(units / ring.scalars.len())
}

fn for_each_tuple(modulus: u32, mut f: impl FnMut([u32; 4])) {
    let m = modulus;
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                for w in 0..m {
                    f([x, y, z, w]);
                }
            }
        }
    }
}

/// `G(Z/mZ)` with every element listed in canonical order and a full
/// product table.
#[derive(Clone, Debug)]
pub struct FiniteGroupTable {
    ring: ResidueRing,
    pub elements: Vec<[u32; 4]>,
    /// tuple code -> element index, for every unit tuple (not just canonical ones)
    class_of: Vec<u32>,
    table: Vec<u32>,
    inverses: Vec<u32>,
    identity: usize,
}

const NONE: u32 = u32::MAX;

/// Builds `G(Z/mZ)`; fails with a resource error when it would exceed `cap`
/// elements.
pub fn enumerate_group(order: &IbukiyamaOrder, modulus: u32, cap: usize) -> Result<FiniteGroupTable> {
    let ring = ResidueRing::new(order, modulus)?;
    let m = modulus as usize;
    let total = m.pow(4);
    let mut class_of = vec![NONE; total];
    let mut elements = Vec::new();
    let code = |c: &[u32; 4]| c.iter().fold(0usize, |acc, &x| acc * m + x as usize);
    let mut overflow = false;
    for_each_tuple(modulus, |c| {
        if overflow || class_of[code(&c)] != NONE || !ring.is_unit(&c) {
            return;
        }
        // tuples are visited in lexicographic order, so `c` is the least
        // member of its scalar orbit
        let idx = elements.len() as u32;
        for &u in &ring.scalars {
            class_of[code(&ring.scale(u, &c))] = idx;
        }
        elements.push(c);
        if elements.len() > cap {
            overflow = true;
        }
    });
    if overflow {
        return Err(Error::Resource { what: "G(Z/mZ) order", size: group_order(order, modulus)?, cap });
    }

    let n = elements.len();
    let mut table = vec![0u32; n * n];
    for a in 0..n {
        for b in 0..n {
            let prod = ring.mul(&elements[a], &elements[b]);
            table[a * n + b] = class_of[code(&prod)];
        }
    }
    let identity = class_of[code(&[1 % modulus, 0, 0, 0])] as usize;
    let mut inverses = vec![NONE; n];
    for a in 0..n {
        for b in 0..n {
            if table[a * n + b] as usize == identity {
                inverses[a] = b as u32;
                break;
            }
        }
    }
    let group = FiniteGroupTable { ring, elements, class_of, table, inverses, identity };
    group.check_axioms()?;
    Ok(group)
}

impl FiniteGroupTable {
    pub fn modulus(&self) -> u32 {
        self.ring.modulus
    }

    pub fn ring(&self) -> &ResidueRing {
        &self.ring
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.elements.len() + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a] as usize
    }

    pub fn class(&self, idx: usize) -> ProjClass {
        ProjClass { modulus: self.ring.modulus, coords: self.elements[idx] }
    }

    /// Index of the class of an arbitrary residue tuple, `None` if it is not a unit.
    pub fn index_of_residue(&self, c: &[u32; 4]) -> Option<usize> {
        let m = self.ring.modulus as usize;
        let code = c.iter().fold(0usize, |acc, &x| acc * m + (x as usize % m));
        match self.class_of[code] {
            NONE => None,
            i => Some(i as usize),
        }
    }

    /// Index of `phi_m(a)`.
    pub fn index_of(&self, a: &OrderElement) -> Option<usize> {
        self.index_of_residue(&self.ring.reduce(a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    fn check_axioms(&self) -> Result<()> {
        let n = self.order();
        if self.inverses.contains(&NONE) || self.table.contains(&NONE) {
            return Err(Error::Consistency("product table is not closed".into()));
        }
        for a in 0..n {
            if self.mul(self.identity, a) != a || self.mul(a, self.identity) != a {
                return Err(Error::Consistency("identity law fails".into()));
            }
        }
        // associativity on a spread of triples; the full check is cubic
        let step = (n / 17).max(1);
        for a in (0..n).step_by(step) {
            for b in (0..n).step_by(step) {
                for c in (0..n).step_by(step) {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::Consistency("associativity fails".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{ibukiyama_order, AlgebraParams, IbukiyamaOrder, RatQuat};
    use crate::units::unit_group;

    fn reference(p: i64) -> IbukiyamaOrder {
        IbukiyamaOrder::new(AlgebraParams::reference(p).unwrap()).unwrap()
    }

    #[test]
    fn identity_and_sign() {
        let o = reference(2);
        for m in [2, 3, 4, 5, 9] {
            let one = reduce_mod(&o, &OrderElement::ONE, m).unwrap();
            assert_eq!(one.coords, [1 % m, 0, 0, 0]);
            let a = OrderElement([1, -3, -1, 5]);
            assert_eq!(reduce_mod(&o, &a, m).unwrap(), reduce_mod(&o, &-a, m).unwrap());
        }
    }

    #[test]
    fn non_unit_norm_rejected() {
        let o = reference(2);
        // w3 + 1 has norm 2
        assert!(matches!(
            reduce_mod(&o, &OrderElement([1, 0, 0, 1]), 4),
            Err(Error::NotInvertible { norm: 2, modulus: 4 })
        ));
    }

    #[test]
    fn p3_units_distinct_mod_4() {
        let o = reference(3);
        let u = unit_group(&o).unwrap();
        let mut images: Vec<_> = u.elements.iter().map(|e| reduce_mod(&o, e, 4).unwrap()).collect();
        images.sort();
        images.dedup();
        assert_eq!(images.len(), 6);
    }

    #[test]
    fn group_orders_from_worked_cases() {
        assert_eq!(enumerate_group(&reference(7), 7, DEFAULT_TABLE_CAP).unwrap().order(), 392);
        assert_eq!(enumerate_group(&reference(3), 3, DEFAULT_TABLE_CAP).unwrap().order(), 36);
        assert_eq!(enumerate_group(&reference(2), 3, DEFAULT_TABLE_CAP).unwrap().order(), 24);
        assert_eq!(enumerate_group(&reference(3), 4, DEFAULT_TABLE_CAP).unwrap().order(), 48);
        assert_eq!(enumerate_group(&reference(13), 1, DEFAULT_TABLE_CAP).unwrap().order(), 1);
    }

    #[test]
    fn split_primes_give_pgl2() {
        for p in [2, 3, 5, 7, 13] {
            let o = reference(p);
            let (q_aux, disc) = (o.params.aux, o.params.ramified);
            for m in [3u32, 5, 7, 11, 13] {
                if (2 * disc * q_aux) % m as i64 == 0 {
                    continue;
                }
                let m64 = m as usize;
                assert_eq!(group_order(&o, m).unwrap(), m64 * (m64 * m64 - 1), "P={p} m={m}");
            }
        }
    }

    #[test]
    fn ramified_prime_semidirect_split() {
        // G(Z/P) = N H with N = {1 + x i + y ij}, H = {x + y j}/scalars
        for p in [3i64, 5, 7] {
            let o = reference(p);
            let g = enumerate_group(&o, p as u32, DEFAULT_TABLE_CAP).unwrap();
            assert_eq!(g.order() as i64, p * p * (p + 1));
            let idx = |c: [i64; 4]| {
                let e = o.from_standard(&RatQuat::from_ints(c)).unwrap();
                g.index_of(&e)
            };
            let mut n_set: Vec<usize> = Vec::new();
            let mut h_set: Vec<usize> = Vec::new();
            for x in 0..p {
                for y in 0..p {
                    n_set.push(idx([1, x, 0, y]).unwrap());
                    if (x, y) != (0, 0) {
                        h_set.push(idx([x, 0, y, 0]).unwrap());
                    }
                }
            }
            n_set.sort();
            n_set.dedup();
            h_set.sort();
            h_set.dedup();
            assert_eq!(n_set.len() as i64, p * p);
            assert_eq!(h_set.len() as i64, p + 1);
            let common: Vec<_> = n_set.iter().filter(|x| h_set.contains(x)).collect();
            assert_eq!(common, vec![&g.identity()]);
            let mut prod: Vec<usize> =
                n_set.iter().flat_map(|&a| h_set.iter().map(move |&b| (a, b))).map(|(a, b)| g.mul(a, b)).collect();
            prod.sort();
            prod.dedup();
            assert_eq!(prod.len(), g.order());
        }
    }

    #[test]
    fn reduction_is_multiplicative() {
        let o = ibukiyama_order(5, None, None).unwrap();
        let g = enumerate_group(&o, 7, DEFAULT_TABLE_CAP).unwrap();
        let sample = [
            OrderElement([1, 2, 0, -1]),
            OrderElement([3, 0, 1, 1]),
            OrderElement([0, 1, 1, 0]),
            OrderElement([2, -1, 0, 5]),
        ];
        for a in &sample {
            for b in &sample {
                let (Some(ia), Some(ib)) = (g.index_of(a), g.index_of(b)) else { continue };
                let ab = o.multiply(a, b);
                assert_eq!(g.index_of(&ab), Some(g.mul(ia, ib)));
            }
        }
    }

    #[test]
    fn table_cap_enforced() {
        let o = reference(2);
        assert!(matches!(enumerate_group(&o, 5, 50), Err(Error::Resource { size: 120, .. })));
    }
}
