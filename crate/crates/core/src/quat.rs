//! Exact arithmetic in the definite algebras `H(-P,-Q)` and their Ibukiyama
//! maximal orders.
//!
//! An order element is stored by its integer coordinates in the basis
//! `1, w1 = (1+j)/2, w2 = (i+ij)/2, w3 = (T j + ij)/Q`. Rational
//! `1, i, j, ij` coordinates are a derived view computed through the
//! base-change matrix, and are what the structure constants, the conjugation
//! matrix and the trace form are built from.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{exact_isqrt, is_prime, legendre, rem};
use crate::error::{Error, Result};

/// Parameters `(P, Q, T)` of an Ibukiyama order: `i^2 = -P`, `j^2 = -Q`,
/// `T^2 = -P mod Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraParams {
    #[serde(rename = "P")]
    pub ramified: i64,
    #[serde(rename = "Q")]
    pub aux: i64,
    #[serde(rename = "T")]
    pub t: i64,
}

impl AlgebraParams {
    /// Validates an explicit `(P, Q, T)` triple.
    pub fn new(ramified: i64, aux: i64, t: i64) -> Result<Self> {
        if !is_prime(ramified) {
            return Err(Error::NotPrime(ramified));
        }
        Self::check_aux(ramified, aux)?;
        if t <= 0 || rem(t * t + ramified, aux) != 0 {
            return Err(Error::Parameter(format!(
                "T={t} must be positive with T^2 = -{ramified} mod {aux}"
            )));
        }
        Ok(Self { ramified, aux, t })
    }

    /// `Q` must be a prime `= 3 mod 8`, with `-Q` a non-residue mod `P` for odd `P`.
    pub fn check_aux(ramified: i64, aux: i64) -> Result<()> {
        if !is_prime(aux) {
            return Err(Error::Parameter(format!("Q={aux} is not prime")));
        }
        if aux % 8 != 3 {
            return Err(Error::Parameter(format!("Q={aux} is not 3 mod 8")));
        }
        if ramified != 2 && legendre(-aux, ramified) != -1 {
            return Err(Error::Parameter(format!(
                "-Q={} is not a non-residue mod P={ramified}",
                -aux
            )));
        }
        Ok(())
    }

    /// The smallest admissible `Q`, then the smallest positive `T`.
    pub fn smallest(ramified: i64) -> Result<Self> {
        Self::candidates(ramified)?
            .next()
            .ok_or_else(|| Error::Consistency(format!("no Q found for P={ramified}")))
    }

    /// Admissible `(Q, T)` choices for `P` in increasing `Q`, each with its
    /// smallest positive `T`.
    pub fn candidates(ramified: i64) -> Result<impl Iterator<Item = AlgebraParams>> {
        if !is_prime(ramified) {
            return Err(Error::NotPrime(ramified));
        }
        Ok((3..)
            .step_by(8)
            .filter(move |&q| Self::check_aux(ramified, q).is_ok())
            .filter_map(move |q| {
                (1..q)
                    .find(|&t| rem(t * t + ramified, q) == 0)
                    .map(|t| AlgebraParams { ramified, aux: q, t })
            }))
    }

    /// The `(Q, T)` used for each class-number-one discriminant in the worked
    /// examples: `(11,3)`, `(19,4)`, `(3,1)`, `(11,2)`; `P = 13` uses the
    /// smallest choice `(11,3)`.
    pub fn reference(ramified: i64) -> Result<Self> {
        match ramified {
            2 => Self::new(2, 11, 3),
            3 => Self::new(3, 19, 4),
            5 => Self::new(5, 3, 1),
            7 => Self::new(7, 11, 2),
            _ => Self::smallest(ramified),
        }
    }

    /// The algebra `H(a, b)` with `a = -P`, `b = -Q`.
    pub fn algebra(&self) -> QuatAlgebra {
        QuatAlgebra {
            a: BigInt::from(-self.ramified),
            b: BigInt::from(-self.aux),
        }
    }
}

/// An element `c0 + c1 i + c2 j + c3 ij` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatQuat(pub [BigRational; 4]);

impl RatQuat {
    pub fn zero() -> Self {
        RatQuat(std::array::from_fn(|_| BigRational::zero()))
    }

    pub fn from_ints(c: [i64; 4]) -> Self {
        RatQuat(c.map(|x| BigRational::from_integer(BigInt::from(x))))
    }

    /// Builds from `(numerator, denominator)` pairs.
    pub fn from_fractions(c: [(i64, i64); 4]) -> Self {
        RatQuat(c.map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d))))
    }

    pub fn add(&self, other: &RatQuat) -> RatQuat {
        RatQuat(std::array::from_fn(|k| &self.0[k] + &other.0[k]))
    }

    pub fn scale(&self, s: &BigRational) -> RatQuat {
        RatQuat(std::array::from_fn(|k| &self.0[k] * s))
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }
}

impl fmt::Display for RatQuat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i + {}j + {}ij", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

/// The quaternion algebra `H(a, b)`: `i^2 = a`, `j^2 = b`, `ij = -ji`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuatAlgebra {
    pub a: BigInt,
    pub b: BigInt,
}

impl QuatAlgebra {
    pub fn mul(&self, x: &RatQuat, y: &RatQuat) -> RatQuat {
        let a = BigRational::from_integer(self.a.clone());
        let b = BigRational::from_integer(self.b.clone());
        let ab = &a * &b;
        let [x0, x1, x2, x3] = &x.0;
        let [y0, y1, y2, y3] = &y.0;
        RatQuat([
            x0 * y0 + &a * x1 * y1 + &b * x2 * y2 - &ab * x3 * y3,
            x0 * y1 + x1 * y0 - &b * x2 * y3 + &b * x3 * y2,
            x0 * y2 + x2 * y0 + &a * x1 * y3 - &a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        ])
    }

    pub fn conj(&self, x: &RatQuat) -> RatQuat {
        let [x0, x1, x2, x3] = &x.0;
        RatQuat([x0.clone(), -x1, -x2, -x3])
    }

    pub fn norm(&self, x: &RatQuat) -> BigRational {
        self.mul(x, &self.conj(x)).0[0].clone()
    }

    /// Reduced trace `x + conj(x)`.
    pub fn trace(&self, x: &RatQuat) -> BigRational {
        &x.0[0] + &x.0[0]
    }
}

/// Integer coordinates `(x, y, z, w)` of `x + y w1 + z w2 + w w3`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct OrderElement(pub [i64; 4]);

impl std::ops::Neg for OrderElement {
    type Output = OrderElement;

    fn neg(self) -> Self {
        OrderElement(self.0.map(|c| -c))
    }
}

impl OrderElement {
    pub const ONE: OrderElement = OrderElement([1, 0, 0, 0]);

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// gcd of the coordinates.
    pub fn content(&self) -> i64 {
        self.0.iter().fold(0, |g, &c| crate::arith::gcd(g, c))
    }
}

impl From<[i64; 4]> for OrderElement {
    fn from(c: [i64; 4]) -> Self {
        OrderElement(c)
    }
}

impl fmt::Display for OrderElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z, w] = self.0;
        write!(f, "({x}, {y}, {z}, {w})")
    }
}

/// The norm as an integral quadratic form, `N(v) = v^T G v / 2` for the
/// doubled Gram matrix `G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormForm {
    pub gram: [[i64; 4]; 4],
}

impl NormForm {
    pub fn eval(&self, v: &[i64; 4]) -> i64 {
        let mut acc: i128 = 0;
        for r in 0..4 {
            for c in 0..4 {
                acc += v[r] as i128 * self.gram[r][c] as i128 * v[c] as i128;
            }
        }
        (acc / 2) as i64
    }

    /// Leading principal minors of the Gram matrix, all positive for a
    /// positive definite form.
    pub fn leading_minors(&self) -> [i64; 4] {
        std::array::from_fn(|k| {
            let m: Vec<Vec<BigRational>> = (0..=k)
                .map(|r| {
                    (0..=k)
                        .map(|c| BigRational::from_integer(self.gram[r][c].into()))
                        .collect()
                })
                .collect();
            determinant(m).to_integer().to_i64().expect("minor fits in i64")
        })
    }

    /// Coefficients in the order `x^2, y^2, z^2, w^2, xy, xz, xw, yz, yw, zw`.
    pub fn coefficients(&self) -> [i64; 10] {
        let g = &self.gram;
        [
            g[0][0] / 2,
            g[1][1] / 2,
            g[2][2] / 2,
            g[3][3] / 2,
            g[0][1],
            g[0][2],
            g[0][3],
            g[1][2],
            g[1][3],
            g[2][3],
        ]
    }
}

impl fmt::Display for NormForm {
    /// Renders e.g. `x^2+3y^2+6z^2+w^2+xy+3yw+2zw`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const MONOMIALS: [&str; 10] = ["x^2", "y^2", "z^2", "w^2", "xy", "xz", "xw", "yz", "yw", "zw"];
        let mut first = true;
        for (c, m) in self.coefficients().into_iter().zip(MONOMIALS) {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sign}{m}")?;
            } else {
                write!(f, "{sign}{mag}{m}")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// The maximal order `Z + Z w1 + Z w2 + Z w3` of `H(-P,-Q)`.
#[derive(Clone, Debug)]
pub struct IbukiyamaOrder {
    pub params: AlgebraParams,
    algebra: QuatAlgebra,
    basis: [RatQuat; 4],
    /// Rows: standard coordinates -> basis coordinates.
    from_standard: [[BigRational; 4]; 4],
    structure: [[[i64; 4]; 4]; 4],
    conj_matrix: [[i64; 4]; 4],
    norm_form: NormForm,
}

/// JSON view of an order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OrderSummary {
    #[serde(rename = "P")]
    pub ramified: i64,
    #[serde(rename = "Q")]
    pub aux: i64,
    #[serde(rename = "T")]
    pub t: i64,
    pub norm_form: String,
    pub gram: [[i64; 4]; 4],
    pub structure_constants: [[[i64; 4]; 4]; 4],
    pub reduced_discriminant: i64,
}

/// Builds the Ibukiyama order for `P`, using the smallest admissible `(Q, T)`
/// unless both are supplied.
pub fn ibukiyama_order(ramified: i64, aux: Option<i64>, t: Option<i64>) -> Result<IbukiyamaOrder> {
    let params = match (aux, t) {
        (Some(q), Some(t)) => AlgebraParams::new(ramified, q, t)?,
        (Some(q), None) => {
            if !is_prime(ramified) {
                return Err(Error::NotPrime(ramified));
            }
            AlgebraParams::check_aux(ramified, q)?;
            let t = (1..q).find(|&t| rem(t * t + ramified, q) == 0).ok_or_else(|| {
                Error::Parameter(format!("no T with T^2 = -{ramified} mod {q}"))
            })?;
            AlgebraParams::new(ramified, q, t)?
        }
        (None, Some(_)) => {
            return Err(Error::Parameter("T given without Q".into()));
        }
        (None, None) => AlgebraParams::smallest(ramified)?,
    };
    IbukiyamaOrder::new(params)
}

impl IbukiyamaOrder {
    pub fn new(params: AlgebraParams) -> Result<Self> {
        let algebra = params.algebra();
        let (p, q, t) = (params.ramified, params.aux, params.t);
        let basis = [
            RatQuat::from_ints([1, 0, 0, 0]),
            RatQuat::from_fractions([(1, 2), (0, 1), (1, 2), (0, 1)]),
            RatQuat::from_fractions([(0, 1), (1, 2), (0, 1), (1, 2)]),
            RatQuat::from_fractions([(0, 1), (0, 1), (t, q), (1, q)]),
        ];
        let from_standard = invert(&std::array::from_fn(|r| basis[r].0.clone()))
            .ok_or_else(|| Error::Consistency("basis is singular".into()))?;

        let mut order = IbukiyamaOrder {
            params,
            algebra,
            basis,
            from_standard,
            structure: [[[0; 4]; 4]; 4],
            conj_matrix: [[0; 4]; 4],
            norm_form: NormForm { gram: [[0; 4]; 4] },
        };

        for u in 0..4 {
            for v in 0..4 {
                let prod = order.algebra.mul(&order.basis[u], &order.basis[v]);
                order.structure[u][v] = order.integral_coords(&prod).ok_or_else(|| {
                    Error::Consistency(format!("w{u}*w{v} is not in the order"))
                })?;
            }
            let c = order.algebra.conj(&order.basis[u]);
            order.conj_matrix[u] = order
                .integral_coords(&c)
                .ok_or_else(|| Error::Consistency(format!("conj(w{u}) is not in the order")))?;
        }
        order.norm_form.gram = trace_gram(&order.algebra, &order.basis)?;

        let minors = order.norm_form.leading_minors();
        if minors.iter().any(|&m| m <= 0) {
            return Err(Error::Consistency(format!("norm form not positive definite: {minors:?}")));
        }
        let disc = order.reduced_discriminant()?;
        if disc != p {
            return Err(Error::Consistency(format!(
                "reduced discriminant {disc} != P={p}; order is not maximal"
            )));
        }
        Ok(order)
    }

    pub fn algebra(&self) -> &QuatAlgebra {
        &self.algebra
    }

    pub fn basis(&self) -> &[RatQuat; 4] {
        &self.basis
    }

    /// `structure()[u][v]` holds the basis coordinates of `w_u * w_v`.
    pub fn structure(&self) -> &[[[i64; 4]; 4]; 4] {
        &self.structure
    }

    pub fn norm_form(&self) -> &NormForm {
        &self.norm_form
    }

    pub fn multiply(&self, a: &OrderElement, b: &OrderElement) -> OrderElement {
        let mut acc = [0i128; 4];
        for u in 0..4 {
            if a.0[u] == 0 {
                continue;
            }
            for v in 0..4 {
                if b.0[v] == 0 {
                    continue;
                }
                let s = a.0[u] as i128 * b.0[v] as i128;
                for k in 0..4 {
                    acc[k] += s * self.structure[u][v][k] as i128;
                }
            }
        }
        OrderElement(acc.map(|c| i64::try_from(c).expect("order product overflows i64")))
    }

    pub fn conjugate(&self, a: &OrderElement) -> OrderElement {
        let mut out = [0i64; 4];
        for u in 0..4 {
            for k in 0..4 {
                out[k] += a.0[u] * self.conj_matrix[u][k];
            }
        }
        OrderElement(out)
    }

    pub fn norm(&self, a: &OrderElement) -> i64 {
        self.norm_form.eval(&a.0)
    }

    /// The reduced trace `a + conj(a)`, an integer.
    pub fn trace(&self, a: &OrderElement) -> i64 {
        let s = self.conjugate(a);
        let sum = OrderElement(std::array::from_fn(|k| a.0[k] + s.0[k]));
        debug_assert!(sum.0[1..].iter().all(|&c| c == 0));
        sum.0[0]
    }

    /// Standard `1, i, j, ij` view of an element.
    pub fn to_standard(&self, a: &OrderElement) -> RatQuat {
        let mut out = RatQuat::zero();
        for u in 0..4 {
            let s = BigRational::from_integer(BigInt::from(a.0[u]));
            out = out.add(&self.basis[u].scale(&s));
        }
        out
    }

    /// Basis coordinates of a rational quaternion, `None` unless it lies in
    /// the order.
    pub fn from_standard(&self, x: &RatQuat) -> Option<OrderElement> {
        self.integral_coords(x).map(OrderElement)
    }

    fn rational_coords(&self, x: &RatQuat) -> [BigRational; 4] {
        std::array::from_fn(|k| {
            (0..4).fold(BigRational::zero(), |acc, r| acc + &x.0[r] * &self.from_standard[r][k])
        })
    }

    fn integral_coords(&self, x: &RatQuat) -> Option<[i64; 4]> {
        let c = self.rational_coords(x);
        if c.iter().all(|v| v.is_integer()) {
            Some(c.map(|v| v.to_integer().to_i64().expect("coordinate fits in i64")))
        } else {
            None
        }
    }

    /// The square root of the determinant of the trace pairing on the basis.
    /// Equals `P` for every Ibukiyama order.
    pub fn reduced_discriminant(&self) -> Result<i64> {
        reduced_discriminant_of(&self.algebra, &self.basis)
    }

    pub fn summary(&self) -> OrderSummary {
        OrderSummary {
            ramified: self.params.ramified,
            aux: self.params.aux,
            t: self.params.t,
            norm_form: self.norm_form.to_string(),
            gram: self.norm_form.gram,
            structure_constants: self.structure,
            reduced_discriminant: self.params.ramified,
        }
    }
}

/// Integer matrix of `trd(e_u conj(e_v))`; this is twice the norm form's
/// bilinear form, so its determinant is the squared reduced discriminant.
fn trace_gram(alg: &QuatAlgebra, basis: &[RatQuat; 4]) -> Result<[[i64; 4]; 4]> {
    let mut gram = [[0i64; 4]; 4];
    for u in 0..4 {
        for v in 0..4 {
            let tr = alg.trace(&alg.mul(&basis[u], &alg.conj(&basis[v])));
            if !tr.is_integer() {
                return Err(Error::Consistency(format!("trace pairing ({u},{v}) = {tr} not integral")));
            }
            gram[u][v] = tr.to_integer().to_i64().expect("trace fits in i64");
        }
    }
    Ok(gram)
}

/// Reduced discriminant of the lattice spanned by `basis`, which must be an
/// order (integral trace pairing).
pub fn reduced_discriminant_of(alg: &QuatAlgebra, basis: &[RatQuat; 4]) -> Result<i64> {
    let gram = trace_gram(alg, basis)?;
    let m: Vec<Vec<BigRational>> = gram
        .iter()
        .map(|row| row.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let det = determinant(m);
    let det = det.to_integer().abs().to_i64().ok_or_else(|| {
        Error::Consistency("trace determinant does not fit in i64".into())
    })?;
    exact_isqrt(det)
        .ok_or_else(|| Error::Consistency(format!("trace determinant {det} is not a square")))
}

fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            let f = &m[r][col] / &p;
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let delta = &f * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    det
}

fn invert(m: &[[BigRational; 4]; 4]) -> Option<[[BigRational; 4]; 4]> {
    let mut a: Vec<Vec<BigRational>> = m.iter().map(|r| r.to_vec()).collect();
    let mut inv: Vec<Vec<BigRational>> = (0..4)
        .map(|r| (0..4).map(|c| if r == c { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for col in 0..4 {
        let piv = (col..4).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        inv.swap(piv, col);
        let p = a[col][col].clone();
        for c in 0..4 {
            a[col][c] /= &p;
            inv[col][c] /= &p;
        }
        for r in 0..4 {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..4 {
                let d1 = &f * &a[col][c];
                a[r][c] -= d1;
                let d2 = &f * &inv[col][c];
                inv[r][c] -= d2;
            }
        }
    }
    Some(std::array::from_fn(|r| std::array::from_fn(|c| inv[r][c].clone())))
}
