//! Subgroups of `G(Z/mZ)`, complements of the embedded unit group, and
//! congruence pairs `(m, H)`.
//!
//! Subgroups are found by cyclic extension: start from the trivial group and
//! repeatedly adjoin one cyclic subgroup, deduplicating by element bitset.
//! With an order filter, only subgroups whose order divides the target are
//! kept. This loses nothing, since every subgroup of a subgroup of order `t`
//! has order dividing `t`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::finite::{enumerate_group, FiniteGroupTable, DEFAULT_TABLE_CAP};
use crate::quat::{IbukiyamaOrder, OrderElement};
use crate::units::{unit_group, UnitGroup};

/// Default largest group order accepted by the subgroup search.
pub const DEFAULT_SUBGROUP_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn of(n: usize, elems: &[usize]) -> Self {
        let mut b = Bits::new(n);
        for &e in elems {
            b.set(e);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// A subgroup of a [`FiniteGroupTable`], by element indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgroup {
    /// Sorted element indices.
    pub elements: Vec<usize>,
    /// A generating set from which no member can be dropped.
    pub generators: Vec<usize>,
    pub fingerprint: Fingerprint,
    pub label: String,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    fn build(g: &FiniteGroupTable, mut elements: Vec<usize>, generators: Vec<usize>) -> Self {
        elements.sort_unstable();
        let generators = prune_generators(g, generators, elements.len());
        let fingerprint = Fingerprint::of(&elements, g.identity(), |a, b| g.mul(a, b));
        let label = fingerprint.label();
        Subgroup { elements, generators, fingerprint, label }
    }

    /// The subgroup generated by `gens`.
    pub fn generated_by(g: &FiniteGroupTable, gens: &[usize]) -> Self {
        let elems = closure(g, &[g.identity()], gens);
        Subgroup::build(g, elems, gens.to_vec())
    }
}

/// Smallest subgroup containing the subgroup `base` and `gens`.
fn closure(g: &FiniteGroupTable, base: &[usize], gens: &[usize]) -> Vec<usize> {
    let mut seen = Bits::of(g.order(), base);
    let mut out = base.to_vec();
    let mut i = 0;
    while i < out.len() {
        let x = out[i];
        for &s in gens {
            let y = g.mul(x, s);
            if !seen.get(y) {
                seen.set(y);
                out.push(y);
            }
        }
        i += 1;
    }
    out
}

fn prune_generators(g: &FiniteGroupTable, mut gens: Vec<usize>, order: usize) -> Vec<usize> {
    gens.retain(|&x| x != g.identity());
    gens.sort_unstable();
    gens.dedup();
    let mut k = 0;
    while k < gens.len() {
        let mut rest = gens.clone();
        rest.remove(k);
        if closure(g, &[g.identity()], &rest).len() == order {
            gens = rest;
        } else {
            k += 1;
        }
    }
    gens
}

/// Every subgroup of `g` (or every subgroup of order `order_filter`), sorted
/// by order and then by element list.
pub fn enumerate_subgroups(g: &FiniteGroupTable, order_filter: Option<usize>, cap: usize) -> Result<Vec<Subgroup>> {
    let n = g.order();
    if n > cap {
        return Err(Error::Resource { what: "subgroup search group order", size: n, cap });
    }
    let allowed = |k: usize| order_filter.is_none_or(|t| t % k == 0);

    // one generator per cyclic subgroup
    let mut cyclic_seen: Vec<bool> = vec![false; n];
    let mut cyclic_gens = Vec::new();
    for x in 0..n {
        if cyclic_seen[x] || x == g.identity() {
            continue;
        }
        let cyc = closure(g, &[g.identity()], &[x]);
        // every generator of the same cyclic group gives the same extension
        for &y in &cyc {
            if closure(g, &[g.identity()], &[y]).len() == cyc.len() {
                cyclic_seen[y] = true;
            }
        }
        cyclic_gens.push(x);
    }

    let mut index: HashMap<Bits, usize> = HashMap::new();
    let mut found: Vec<(Vec<usize>, Vec<usize>)> = vec![(vec![g.identity()], vec![])];
    index.insert(Bits::of(n, &[g.identity()]), 0);
    let mut i = 0;
    while i < found.len() {
        let (elems, gens) = found[i].clone();
        let mine = Bits::of(n, &elems);
        for &c in &cyclic_gens {
            if mine.get(c) {
                continue;
            }
            let mut new_gens = gens.clone();
            new_gens.push(c);
            let bigger = closure(g, &elems, &new_gens);
            if !allowed(bigger.len()) {
                continue;
            }
            let key = Bits::of(n, &bigger);
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(key) {
                e.insert(found.len());
                found.push((bigger, new_gens));
            }
        }
        i += 1;
    }

    let mut out: Vec<Subgroup> = found
        .into_iter()
        .filter(|(e, _)| order_filter.is_none_or(|t| e.len() == t))
        .map(|(e, gens)| Subgroup::build(g, e, gens))
        .collect();
    out.sort_by(|a, b| (a.order(), &a.elements).cmp(&(b.order(), &b.elements)));
    Ok(out)
}

/// Partition of `subs` into conjugacy classes, as lists of indices into `subs`.
pub fn conjugacy_classes(g: &FiniteGroupTable, subs: &[Subgroup]) -> Vec<Vec<usize>> {
    let n = g.order();
    let lookup: HashMap<Bits, usize> = subs.iter().enumerate().map(|(i, s)| (Bits::of(n, &s.elements), i)).collect();
    let mut class_of = vec![usize::MAX; subs.len()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, s) in subs.iter().enumerate() {
        if class_of[i] != usize::MAX {
            continue;
        }
        let mut members = Vec::new();
        for x in 0..n {
            let xi = g.inv(x);
            let conj: Vec<usize> = s.elements.iter().map(|&h| g.mul(g.mul(x, h), xi)).collect();
            if let Some(&j) = lookup.get(&Bits::of(n, &conj)) {
                if class_of[j] == usize::MAX {
                    class_of[j] = classes.len();
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        classes.push(members);
    }
    classes
}

/// Whether reduction mod `m` is injective on `O^x / {+-1}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmbedCheck {
    pub injective: bool,
    /// Group index of the image of each unit, in unit-group order.
    pub images: Vec<usize>,
    /// Two distinct units with the same image.
    pub collision: Option<(OrderElement, OrderElement)>,
}

pub fn embed_check(g: &FiniteGroupTable, units: &UnitGroup) -> Result<EmbedCheck> {
    let images = units
        .elements
        .iter()
        .map(|u| {
            g.index_of(u)
                .ok_or_else(|| Error::Consistency(format!("unit {u} is not invertible mod {}", g.modulus())))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut first: HashMap<usize, usize> = HashMap::new();
    let mut collision = None;
    for (k, &img) in images.iter().enumerate() {
        if let Some(&j) = first.get(&img) {
            collision = Some((units.elements[j], units.elements[k]));
            break;
        }
        first.insert(img, k);
    }
    Ok(EmbedCheck { injective: collision.is_none(), images, collision })
}

/// Subgroups `K` with `U n K = 1` and `U K = G`, checked by forming the
/// product set.
pub fn find_complements(g: &FiniteGroupTable, u: &Subgroup, cap: usize) -> Result<Vec<Subgroup>> {
    let n = g.order();
    if !n.is_multiple_of(u.order()) {
        return Ok(Vec::new());
    }
    let target = n / u.order();
    let candidates = enumerate_subgroups(g, Some(target), cap)?;
    Ok(candidates.into_iter().filter(|k| is_complement(g, u, k)).collect())
}

fn is_complement(g: &FiniteGroupTable, u: &Subgroup, k: &Subgroup) -> bool {
    intersection_size(u, k) == 1 && product_cover(g, u, k) == g.order()
}

fn intersection_size(a: &Subgroup, b: &Subgroup) -> usize {
    a.elements.iter().filter(|&&x| b.contains(x)).count()
}

/// Number of distinct products `u k`.
fn product_cover(g: &FiniteGroupTable, u: &Subgroup, k: &Subgroup) -> usize {
    let mut bits = Bits::new(g.order());
    for &a in &u.elements {
        for &b in &k.elements {
            bits.set(g.mul(a, b));
        }
    }
    bits.count()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCertificate {
    /// Images of the units mod `m`, pairwise distinct.
    pub unit_images: Vec<usize>,
    /// Size of `phi_m(units) n H`; must be 1.
    pub intersection_size: usize,
    /// Number of distinct products `u h`; must be `|G(Z/mZ)|`.
    pub product_cover: usize,
    pub group_order: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CongruencePair {
    pub m: u32,
    pub h: Subgroup,
    /// Conjugacy class (within the complements at this `m`) of `h`.
    pub conjugacy_class: usize,
    pub certificate: PairCertificate,
}

impl CongruencePair {
    /// Generators of `H` as residue tuples.
    pub fn generator_residues(&self, g: &FiniteGroupTable) -> Vec<[u32; 4]> {
        self.h.generators.iter().map(|&x| g.elements[x]).collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub m: u32,
    pub group_order: usize,
    pub unit_label: String,
    pub embed: EmbedCheck,
    pub pairs: Vec<CongruencePair>,
    /// No pair exists at this modulus.
    pub negative: bool,
    pub reason: Option<String>,
}

impl CongruenceReport {
    /// Distinct complement labels, one per conjugacy class.
    pub fn class_labels(&self) -> Vec<String> {
        let mut seen: Vec<(usize, String)> = Vec::new();
        for p in &self.pairs {
            if !seen.iter().any(|(c, _)| *c == p.conjugacy_class) {
                seen.push((p.conjugacy_class, p.h.label.clone()));
            }
        }
        seen.into_iter().map(|(_, l)| l).collect()
    }

    pub fn class_count(&self) -> usize {
        self.class_labels().len()
    }
}

/// The subgroup `phi_m(O^x)` of `g`.
pub fn unit_image(g: &FiniteGroupTable, embed: &EmbedCheck) -> Subgroup {
    let mut elems = embed.images.clone();
    elems.sort_unstable();
    elems.dedup();
    Subgroup::build(g, elems, embed.images.clone())
}

/// All congruence pairs at modulus `m` with certificates.
pub fn congruence_pairs(order: &IbukiyamaOrder, m: u32) -> Result<(FiniteGroupTable, CongruenceReport)> {
    congruence_pairs_with_caps(order, m, DEFAULT_TABLE_CAP, DEFAULT_SUBGROUP_CAP)
}

pub fn congruence_pairs_with_caps(
    order: &IbukiyamaOrder,
    m: u32,
    table_cap: usize,
    subgroup_cap: usize,
) -> Result<(FiniteGroupTable, CongruenceReport)> {
    let units = unit_group(order)?;
    let g = enumerate_group(order, m, table_cap)?;
    let embed = embed_check(&g, &units)?;
    let mut report = CongruenceReport {
        m,
        group_order: g.order(),
        unit_label: units.label.clone(),
        embed: embed.clone(),
        pairs: Vec::new(),
        negative: true,
        reason: None,
    };
    if !embed.injective {
        let (a, b) = embed.collision.expect("collision recorded");
        report.reason = Some(format!("units {a} and {b} agree mod {m}"));
        return Ok((g, report));
    }
    let u = unit_image(&g, &embed);
    if g.order() % u.order() != 0 {
        report.reason = Some(format!("|units| = {} does not divide {}", u.order(), g.order()));
        return Ok((g, report));
    }
    let complements = find_complements(&g, &u, subgroup_cap)?;
    if complements.is_empty() {
        report.reason = Some(format!("no subgroup of order {} complements the units", g.order() / u.order()));
        return Ok((g, report));
    }
    let classes = conjugacy_classes(&g, &complements);
    let mut class_of = vec![0; complements.len()];
    for (c, members) in classes.iter().enumerate() {
        for &i in members {
            class_of[i] = c;
        }
    }
    report.pairs = complements
        .into_iter()
        .enumerate()
        .map(|(i, h)| {
            let certificate = PairCertificate {
                unit_images: embed.images.clone(),
                intersection_size: intersection_size(&u, &h),
                product_cover: product_cover(&g, &u, &h),
                group_order: g.order(),
            };
            CongruencePair { m, h, conjugacy_class: class_of[i], certificate }
        })
        .collect();
    report.negative = false;
    Ok((g, report))
}

/// Re-checks a pair from scratch: reduces the units again, recomputes `H`
/// from its generators, and forms the full product set.
pub fn verify_pair(order: &IbukiyamaOrder, g: &FiniteGroupTable, pair: &CongruencePair) -> Result<()> {
    let units = unit_group(order)?;
    let fail = |msg: String| Err(Error::Consistency(msg));
    let mut images = Vec::new();
    for u in &units.elements {
        let c = g.ring().canonical(&g.ring().reduce(u));
        match g.elements.iter().position(|e| *e == c) {
            Some(i) => images.push(i),
            None => return fail(format!("unit {u} has no image mod {}", pair.m)),
        }
    }
    let mut distinct = images.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != images.len() {
        return fail("reduction is not injective on units".into());
    }
    let h = closure(g, &[g.identity()], &pair.h.generators);
    let mut h_sorted = h.clone();
    h_sorted.sort_unstable();
    if h_sorted != pair.h.elements {
        return fail("H differs from the group generated by its generators".into());
    }
    if distinct.iter().filter(|x| h_sorted.binary_search(x).is_ok()).count() != 1 {
        return fail("H meets the unit image nontrivially".into());
    }
    let mut products: Vec<usize> = Vec::with_capacity(distinct.len() * h.len());
    for &a in &distinct {
        for &b in &h {
            products.push(g.mul(a, b));
        }
    }
    products.sort_unstable();
    products.dedup();
    if products.len() != g.order() {
        return fail(format!("unit image times H covers {} of {} elements", products.len(), g.order()));
    }
    Ok(())
}
