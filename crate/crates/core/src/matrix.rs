//! The explicit splitting `O -> M_2(F_q)` and projective 2x2 matrices.

use serde::{Deserialize, Serialize};

use crate::arith::{inv_mod, is_prime, legendre, modular_sqrt, rem};
use crate::error::{Error, Result};
use crate::quat::{AlgebraParams, IbukiyamaOrder, OrderElement};

/// A matrix over `F_q` modulo scalars, scaled so that its first nonzero
/// entry (row-major) is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjMatrix {
    pub q: u32,
    /// `[a, b, c, d]` for `[[a, b], [c, d]]`
    pub entries: [u32; 4],
}

impl ProjMatrix {
    pub fn identity(q: u32) -> Self {
        ProjMatrix { q, entries: [1, 0, 0, 1] }
    }

    /// Canonical class of a nonzero matrix.
    pub fn new(q: u32, entries: [u32; 4]) -> Self {
        let lead = *entries.iter().find(|&&x| x != 0).expect("zero matrix has no class");
        let s = inv_mod(lead as i64, q as i64).expect("q is prime") as u64;
        ProjMatrix { q, entries: entries.map(|x| (x as u64 * s % q as u64) as u32) }
    }

    pub fn mul(&self, other: &ProjMatrix) -> ProjMatrix {
        ProjMatrix::new(self.q, mat_mul(self.q, &self.entries, &other.entries))
    }

    /// Determinant of the canonical representative.
    pub fn det(&self) -> u32 {
        mat_det(self.q, &self.entries)
    }

    /// Packs the canonical entries into one integer key.
    pub fn key(&self) -> u64 {
        let q = self.q as u64;
        self.entries.iter().fold(0u64, |acc, &x| acc * q + x as u64)
    }

    pub fn from_key(q: u32, mut key: u64) -> Self {
        let mut e = [0u32; 4];
        for k in (0..4).rev() {
            e[k] = (key % q as u64) as u32;
            key /= q as u64;
        }
        ProjMatrix { q, entries: e }
    }
}

pub fn mat_mul(q: u32, a: &[u32; 4], b: &[u32; 4]) -> [u32; 4] {
    let q = q as u64;
    let [a0, a1, a2, a3] = a.map(u64::from);
    let [b0, b1, b2, b3] = b.map(u64::from);
    [
        ((a0 * b0 + a1 * b2) % q) as u32,
        ((a0 * b1 + a1 * b3) % q) as u32,
        ((a2 * b0 + a3 * b2) % q) as u32,
        ((a2 * b1 + a3 * b3) % q) as u32,
    ]
}

pub fn mat_det(q: u32, a: &[u32; 4]) -> u32 {
    let q = q as i64;
    rem(a[0] as i64 * a[3] as i64 - a[1] as i64 * a[2] as i64, q) as u32
}

/// Whether the class lies in `PSL_2(F_q)`: some representative has
/// determinant 1, i.e. the determinant is a nonzero square.
pub fn psl_member(m: &ProjMatrix) -> bool {
    let d = m.det();
    d != 0 && (m.q == 2 || legendre(d as i64, m.q as i64) == 1)
}

/// The matrix map for a fixed prime `q` and fixed choices of `sqrt(-P)` and
/// `sqrt(Q)` in `F_q`:
///
/// ```text
/// x + y w1 + z w2 + w w3  ->  1/(2Q) [[A11, A12], [A21, A22]]
/// A11 = (2Qx + Qy) + Qz s          A12 =  r (Qy + 2Tw + (Qz + 2w) s)
/// A21 = -r (Qy + 2Tw - (Qz + 2w) s)  A22 = (2Qx + Qy) - Qz s
/// ```
///
/// with `s = sqrt(-P)`, `r = sqrt(Q)`. Its determinant is the norm mod `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaMap {
    pub params: AlgebraParams,
    pub q: u32,
    pub sqrt_neg_p: u32,
    pub sqrt_q: u32,
}

impl BetaMap {
    /// Uses the least non-negative square roots.
    pub fn new(params: AlgebraParams, q: i64) -> Result<Self> {
        Self::check_prime(params, q)?;
        let s = modular_sqrt(-params.ramified, q)?;
        let r = modular_sqrt(params.aux, q)?;
        Ok(BetaMap { params, q: q as u32, sqrt_neg_p: s as u32, sqrt_q: r as u32 })
    }

    /// Uses caller-supplied roots, which are verified.
    pub fn with_roots(params: AlgebraParams, q: i64, sqrt_neg_p: i64, sqrt_q: i64) -> Result<Self> {
        Self::check_prime(params, q)?;
        if rem(sqrt_neg_p * sqrt_neg_p + params.ramified, q) != 0 {
            return Err(Error::Parameter(format!("{sqrt_neg_p} is not a square root of -P mod {q}")));
        }
        if rem(sqrt_q * sqrt_q - params.aux, q) != 0 {
            return Err(Error::Parameter(format!("{sqrt_q} is not a square root of Q mod {q}")));
        }
        Ok(BetaMap { params, q: q as u32, sqrt_neg_p: rem(sqrt_neg_p, q) as u32, sqrt_q: rem(sqrt_q, q) as u32 })
    }

    /// Same map with `sqrt(-P)` replaced by its negative.
    pub fn with_other_root(&self) -> Self {
        BetaMap { sqrt_neg_p: (self.q - self.sqrt_neg_p) % self.q, ..*self }
    }

    fn check_prime(params: AlgebraParams, q: i64) -> Result<()> {
        if q < 3 || !is_prime(q) {
            return Err(Error::Parameter(format!("q={q} must be an odd prime")));
        }
        if (2 * params.ramified * params.aux) % q == 0 {
            return Err(Error::Parameter(format!("q={q} divides 2PQ")));
        }
        if legendre(-params.ramified, q) != 1 {
            return Err(Error::Parameter(format!("(-P/q) != 1 for P={}, q={q}", params.ramified)));
        }
        if legendre(params.aux, q) != 1 {
            return Err(Error::Parameter(format!("(Q/q) != 1 for Q={}, q={q}", params.aux)));
        }
        Ok(())
    }

    /// The actual matrix (not just its class), with `det = N(a) mod q`.
    pub fn matrix(&self, a: &OrderElement) -> [u32; 4] {
        let q = self.q as i64;
        let (big_q, t) = (self.params.aux, self.params.t);
        let s = self.sqrt_neg_p as i64;
        let r = self.sqrt_q as i64;
        let [x, y, z, w] = a.0.map(|c| rem(c, q));
        let md = |v: i64| rem(v, q);
        let diag = md(2 * big_q * x + big_q * y);
        let iz = md(md(big_q * z) * s);
        let jpart = md(big_q * y + 2 * t * w);
        let kpart = md(md(big_q * z + 2 * w) * s);
        let a11 = md(diag + iz);
        let a22 = md(diag - iz);
        let a12 = md(r * md(jpart + kpart));
        let a21 = md(-r * md(jpart - kpart));
        let scale = inv_mod(md(2 * big_q), q).expect("q does not divide 2Q");
        [a11, a12, a21, a22].map(|v| md(v * scale) as u32)
    }

    pub fn apply(&self, a: &OrderElement) -> ProjMatrix {
        ProjMatrix::new(self.q, self.matrix(a))
    }
}

/// `beta_q(a)` with the least square roots.
pub fn beta_q(order: &IbukiyamaOrder, a: &OrderElement, q: i64) -> Result<ProjMatrix> {
    Ok(BetaMap::new(order.params, q)?.apply(a))
}
