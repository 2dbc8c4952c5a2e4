//! Small number-theoretic helpers: primality, Legendre/Kronecker symbols,
//! modular inverses and square roots.

use crate::error::{Error, Result};

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes in `lo..=hi`.
pub fn primes_in(lo: i64, hi: i64) -> Vec<i64> {
    (lo.max(2)..=hi).filter(|&n| is_prime(n)).collect()
}

/// Distinct prime factors in increasing order, with multiplicity dropped.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// Least non-negative residue.
#[inline]
pub fn rem(a: i64, m: i64) -> i64 {
    a.rem_euclid(m)
}

pub fn pow_mod(base: i64, mut exp: u64, m: i64) -> i64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as i128;
    let mut b = rem(base, m) as i128;
    let mut acc: i128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as i64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i64, m: i64) -> Option<i64> {
    let (mut old_r, mut r) = (rem(a, m), m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1 || m == 1).then(|| rem(old_s, m))
}

/// Legendre symbol (a/p) for an odd prime p, in {-1, 0, 1}.
pub fn legendre(a: i64, p: i64) -> i32 {
    debug_assert!(p > 2);
    let a = rem(a, p);
    if a == 0 {
        return 0;
    }
    if pow_mod(a, ((p - 1) / 2) as u64, p) == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker symbol (a/p) for a prime p, including p = 2.
pub fn kronecker(a: i64, p: i64) -> i32 {
    if p == 2 {
        if a % 2 == 0 {
            0
        } else if matches!(rem(a, 8), 1 | 7) {
            1
        } else {
            -1
        }
    } else {
        legendre(a, p)
    }
}

/// Square root of `a` modulo an odd prime `q` (Tonelli–Shanks). Returns the
/// least non-negative root.
pub fn modular_sqrt(a: i64, q: i64) -> Result<i64> {
    if q < 3 || !is_prime(q) {
        return Err(Error::Parameter(format!("modulus {q} must be an odd prime")));
    }
    let a = rem(a, q);
    if a == 0 {
        return Ok(0);
    }
    if legendre(a, q) != 1 {
        return Err(Error::NonResidue { value: a, modulus: q });
    }
    // q - 1 = s * 2^e
    let mut s = q - 1;
    let mut e = 0u32;
    while s % 2 == 0 {
        s /= 2;
        e += 1;
    }
    let root = if e == 1 {
        pow_mod(a, ((q + 1) / 4) as u64, q)
    } else {
        let mut z = 2;
        while legendre(z, q) != -1 {
            z += 1;
        }
        let mut x = pow_mod(a, ((s + 1) / 2) as u64, q);
        let mut b = pow_mod(a, s as u64, q);
        let mut g = pow_mod(z, s as u64, q);
        let mut r = e;
        while b != 1 {
            let mut t = b;
            let mut k = 0;
            while t != 1 {
                t = t * t % q;
                k += 1;
            }
            let gs = pow_mod(g, 1u64 << (r - k - 1), q);
            x = x * gs % q;
            g = gs * gs % q;
            b = b * g % q;
            r = k;
        }
        x
    };
    Ok(root.min(q - root))
}

/// Exact integer square root, if `n` is a perfect square.
pub fn exact_isqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}
