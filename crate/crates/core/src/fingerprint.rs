//! Isomorphism fingerprints and names for the small groups that show up as
//! unit groups and congruence complements.
//!
//! A fingerprint is `(order, abelian?, multiset of element orders)`. For
//! abelian groups this determines the isomorphism type, and the name is
//! reconstructed from the invariant factors. For the nonabelian groups we
//! meet, a short table suffices.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::prime_factors;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fingerprint {
    pub order: usize,
    pub abelian: bool,
    /// element order -> number of elements of that order
    pub element_orders: BTreeMap<usize, usize>,
}

impl Fingerprint {
    /// Computes the fingerprint of the subset `elements` of a group given by
    /// its product map. `elements` must be closed under `mul`.
    pub fn of(elements: &[usize], identity: usize, mul: impl Fn(usize, usize) -> usize) -> Self {
        let mut element_orders = BTreeMap::new();
        for &g in elements {
            let mut k = 1;
            let mut x = g;
            while x != identity {
                x = mul(x, g);
                k += 1;
            }
            *element_orders.entry(k).or_insert(0) += 1;
        }
        let abelian = elements
            .iter()
            .enumerate()
            .all(|(i, &a)| elements[i + 1..].iter().all(|&b| mul(a, b) == mul(b, a)));
        Fingerprint { order: elements.len(), abelian, element_orders }
    }

    pub fn count_of_order(&self, k: usize) -> usize {
        self.element_orders.get(&k).copied().unwrap_or(0)
    }

    /// Conventional name: `C1`, `C2^3`, `C4xC2^2`, `S3`, `D4`, `Q8`, `A4`,
    /// `C5:D5`, ... Unrecognised nonabelian groups get `order-N`.
    pub fn label(&self) -> String {
        if self.order == 1 {
            return "C1".into();
        }
        if self.abelian {
            return abelian_name(self);
        }
        let o = |k| self.count_of_order(k);
        match self.order {
            6 => "S3".into(),
            8 if o(2) == 5 => "D4".into(),
            8 if o(2) == 1 => "Q8".into(),
            10 => "D5".into(),
            12 if o(3) == 8 => "A4".into(),
            12 if o(2) == 7 => "D6".into(),
            12 if o(2) == 1 => "Dic3".into(),
            14 => "D7".into(),
            18 if o(2) == 9 && o(9) == 6 => "D9".into(),
            18 if o(2) == 9 && o(3) == 8 => "C3:S3".into(),
            18 if o(2) == 3 => "S3xC3".into(),
            20 if o(2) == 11 => "D10".into(),
            20 if o(4) == 10 && o(2) == 5 => "C5:C4".into(),
            20 if o(2) == 1 => "Dic5".into(),
            21 => "C7:C3".into(),
            24 if o(2) == 9 && o(3) == 8 && o(4) == 6 => "S4".into(),
            24 if o(2) == 1 && o(3) == 8 && o(4) == 6 => "SL(2,3)".into(),
            42 if o(6) == 0 && o(2) == 7 => "C7:C6".into(),
            50 if o(2) == 25 && o(5) == 24 => "C5:D5".into(),
            60 if o(2) == 15 && o(3) == 20 && o(5) == 24 => "A5".into(),
            120 if o(2) == 25 && o(3) == 20 && o(4) == 30 => "S5".into(),
            n => format!("order-{n}"),
        }
    }
}

/// Invariant-factor style name from the counts of elements of each
/// prime-power order.
fn abelian_name(fp: &Fingerprint) -> String {
    let mut factors: Vec<(u64, Vec<u32>)> = Vec::new();
    for p in prime_factors(fp.order as u64) {
        // s_k = log_p #{x : x^(p^k) = 1}
        let mut s = vec![0u32];
        let mut k = 1;
        loop {
            let pk = p.pow(k);
            let count: usize = fp
                .element_orders
                .iter()
                .filter(|(&ord, _)| pk % ord as u64 == 0)
                .map(|(_, &c)| c)
                .sum();
            let mut e = 0;
            let mut c = count as u64;
            while c > 1 {
                c /= p;
                e += 1;
            }
            if e == *s.last().unwrap() {
                break;
            }
            s.push(e);
            k += 1;
        }
        // number of cyclic factors of exponent >= k is s_k - s_{k-1}
        let mut parts = Vec::new();
        for k in (1..s.len()).rev() {
            let ge_k = s[k] - s[k - 1];
            let ge_k1 = if k + 1 < s.len() { s[k + 1] - s[k] } else { 0 };
            for _ in 0..(ge_k - ge_k1) {
                parts.push(k as u32);
            }
        }
        factors.push((p, parts));
    }
    // group equal cyclic factors per prime power, largest first
    let mut pieces: Vec<(u64, usize)> = Vec::new();
    for (p, parts) in factors {
        for e in parts {
            let q = p.pow(e);
            match pieces.iter_mut().find(|(c, _)| *c == q) {
                Some(entry) => entry.1 += 1,
                None => pieces.push((q, 1)),
            }
        }
    }
    pieces.sort_by_key(|piece| std::cmp::Reverse(piece.0));
    pieces
        .iter()
        .map(|&(c, mult)| if mult == 1 { format!("C{c}") } else { format!("C{c}^{mult}") })
        .collect::<Vec<_>>()
        .join("x")
}
