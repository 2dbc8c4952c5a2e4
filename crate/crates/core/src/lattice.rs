//! Lattice points of prescribed value in a positive definite integral
//! quadratic form.
//!
//! The form is diagonalised as `sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2` and
//! coordinates are enumerated from the last one down, pruning with the
//! remaining budget (Fincke–Pohst). The floating-point bounds are widened
//! slightly and every candidate is re-checked in exact integer arithmetic, so
//! rounding can only cost time, never solutions.

use crate::quat::{IbukiyamaOrder, NormForm, OrderElement};

const SLACK: f64 = 1e-7;

struct Decomposition {
    diag: [f64; 4],
    mu: [[f64; 4]; 4],
}

fn decompose(gram: &[[i64; 4]; 4]) -> Decomposition {
    // vector form of v^T G v, i.e. twice the norm
    let mut diag = [0.0; 4];
    let mut mu = [[0.0; 4]; 4];
    for i in 0..4 {
        let mut d = gram[i][i] as f64;
        for k in 0..i {
            d -= diag[k] * mu[k][i] * mu[k][i];
        }
        diag[i] = d;
        for j in i + 1..4 {
            let mut s = gram[i][j] as f64;
            for k in 0..i {
                s -= diag[k] * mu[k][i] * mu[k][j];
            }
            mu[i][j] = s / d;
        }
    }
    Decomposition { diag, mu }
}

/// Calls `visit` on every `v` with `v^T G v / 2 <= bound`.
pub fn for_each_in_ellipsoid(form: &NormForm, bound: i64, mut visit: impl FnMut([i64; 4])) {
    let dec = decompose(&form.gram);
    let mut x = [0i64; 4];
    recurse(&dec, 3, 2.0 * bound as f64, &mut x, &mut visit);
}

fn recurse(dec: &Decomposition, i: usize, budget: f64, x: &mut [i64; 4], visit: &mut impl FnMut([i64; 4])) {
    let center: f64 = -(i + 1..4).map(|j| dec.mu[i][j] * x[j] as f64).sum::<f64>();
    let radius = ((budget.max(0.0) + SLACK) / dec.diag[i]).sqrt() + SLACK;
    let lo = (center - radius).ceil() as i64;
    let hi = (center + radius).floor() as i64;
    for xi in lo..=hi {
        x[i] = xi;
        let t = xi as f64 - center;
        let rest = budget - dec.diag[i] * t * t;
        if rest < -SLACK * (1.0 + budget.abs()) {
            continue;
        }
        if i == 0 {
            visit(*x);
        } else {
            recurse(dec, i - 1, rest, x, visit);
        }
    }
    x[i] = 0;
}

/// All integer vectors with form value exactly `n`, sorted lexicographically.
pub fn solutions_of_form(form: &NormForm, n: i64) -> Vec<[i64; 4]> {
    let mut out = Vec::new();
    for_each_in_ellipsoid(form, n, |v| {
        if form.eval(&v) == n {
            out.push(v);
        }
    });
    out.sort_unstable();
    out.dedup();
    out
}

/// Every order element of norm `n`, in lexicographic coordinate order.
pub fn enumerate_norm_solutions(order: &IbukiyamaOrder, n: i64) -> Vec<OrderElement> {
    solutions_of_form(order.norm_form(), n).into_iter().map(OrderElement).collect()
}

/// Per-coordinate bound `|x_i| <= floor(sqrt(2 n (G^-1)_ii))` for the box
/// containing all vectors of value `<= n`, computed in exact arithmetic.
pub fn coordinate_box(form: &NormForm, n: i64) -> [i64; 4] {
    use num_rational::BigRational;
    use num_traits::{ToPrimitive, Zero};
    // adjugate diagonal / det via rational Gaussian elimination on [G | I]
    let mut a: Vec<Vec<BigRational>> = (0..4)
        .map(|r| {
            (0..8)
                .map(|c| {
                    if c < 4 {
                        BigRational::from_integer(form.gram[r][c].into())
                    } else if c - 4 == r {
                        BigRational::from_integer(1.into())
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..4 {
        let piv = (col..4).find(|&r| !a[r][col].is_zero()).expect("definite form");
        a.swap(piv, col);
        let p = a[col][col].clone();
        for c in 0..8 {
            a[col][c] /= &p;
        }
        for r in 0..4 {
            if r != col {
                let f = a[r][col].clone();
                for c in 0..8 {
                    let d = &f * &a[col][c];
                    a[r][c] -= d;
                }
            }
        }
    }
    std::array::from_fn(|i| {
        let limit = &a[i][4 + i] * BigRational::from_integer((2 * n).into());
        // floor(sqrt(limit))
        let approx = limit.to_f64().unwrap().sqrt().floor() as i64;
        let mut r = approx.max(0);
        let sq = |r: i64| BigRational::from_integer((r * r).into());
        while r > 0 && sq(r) > limit {
            r -= 1;
        }
        while sq(r + 1) <= limit {
            r += 1;
        }
        r
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{AlgebraParams, IbukiyamaOrder};

    fn brute(form: &NormForm, n: i64) -> Vec<[i64; 4]> {
        let b = coordinate_box(form, n);
        let mut out = Vec::new();
        for x in -b[0]..=b[0] {
            for y in -b[1]..=b[1] {
                for z in -b[2]..=b[2] {
                    for w in -b[3]..=b[3] {
                        if form.eval(&[x, y, z, w]) == n {
                            out.push([x, y, z, w]);
                        }
                    }
                }
            }
        }
        out
    }

    fn reference(p: i64) -> IbukiyamaOrder {
        IbukiyamaOrder::new(AlgebraParams::reference(p).unwrap()).unwrap()
    }

    #[test]
    fn unit_counts() {
        assert_eq!(enumerate_norm_solutions(&reference(2), 1).len(), 24);
        assert_eq!(enumerate_norm_solutions(&reference(3), 1).len(), 12);
    }

    #[test]
    fn norm_three_for_p2_matches_brute_force() {
        let o = reference(2);
        let fast = solutions_of_form(o.norm_form(), 3);
        assert_eq!(fast.len(), 96);
        assert_eq!(fast, brute(o.norm_form(), 3));
    }

    #[test]
    fn agrees_with_brute_force_on_small_norms() {
        for p in [2, 3, 5, 7, 13] {
            let o = reference(p);
            for n in 1..=12 {
                assert_eq!(solutions_of_form(o.norm_form(), n), brute(o.norm_form(), n), "P={p} n={n}");
            }
        }
    }

    #[test]
    fn box_is_tight_enough_to_matter() {
        // the w-coordinate of a norm-3 vector for P=2 reaches far past the
        // naive sqrt(n) guess
        let o = reference(2);
        let b = coordinate_box(o.norm_form(), 3);
        assert_eq!(b, [4, 7, 2, 14]);
        assert!(solutions_of_form(o.norm_form(), 3).iter().any(|v| v[3].abs() > 10));
    }

    #[test]
    fn solutions_closed_under_negation() {
        let o = reference(7);
        let sols = solutions_of_form(o.norm_form(), 9);
        for v in &sols {
            assert!(sols.binary_search(&v.map(|c| -c)).is_ok());
        }
    }
}
