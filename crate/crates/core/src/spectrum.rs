//! Adjacency spectra and the Ramanujan test.
//!
//! Small graphs get the full spectrum from a dense symmetric eigensolver.
//! Larger ones get the extreme nontrivial eigenvalues from Lanczos with full
//! reorthogonalisation, run on the complement of the trivial eigenvectors;
//! the verdict is then only as good as the reported residual.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Largest vertex count handled by the dense solver.
pub const DEFAULT_DENSE_CAP: usize = 5000;
/// Absolute slack in the comparison with `2 sqrt(k - 1)`.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Lanczos,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub n_vertices: usize,
    pub degree: u32,
    pub method: Method,
    /// Ascending. Complete for the dense method; for Lanczos only the
    /// smallest and largest nontrivial Ritz values.
    pub eigenvalues: Vec<f64>,
    pub top: f64,
    /// Largest `|lambda|` over eigenvalues other than `+-degree`.
    pub second_largest_abs: f64,
    /// `2 sqrt(degree - 1)`.
    pub bound: f64,
    pub tolerance: f64,
    /// Multiplicity of the eigenvalue `degree` (number of components).
    pub top_multiplicity: usize,
    pub bipartite: bool,
    /// Largest Ritz residual `|A x - theta x|` for the Lanczos method.
    pub residual: Option<f64>,
    pub ramanujan: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct SpectrumOptions {
    pub dense_cap: usize,
    pub tolerance: f64,
    pub lanczos_steps: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { dense_cap: DEFAULT_DENSE_CAP, tolerance: DEFAULT_TOLERANCE, lanczos_steps: 2000 }
    }
}

/// Eigenvalues closer than this to `+-degree` count as trivial.
const TRIVIAL_GAP: f64 = 1e-6;

pub fn spectrum(g: &WeightedGraph) -> Result<SpectrumReport> {
    spectrum_with(g, SpectrumOptions::default())
}

pub fn spectrum_with(g: &WeightedGraph, opts: SpectrumOptions) -> Result<SpectrumReport> {
    let degree = g
        .regular_degree()
        .ok_or_else(|| Error::Parameter("spectrum report needs a regular graph".into()))?;
    if g.n() <= opts.dense_cap {
        dense(g, degree, opts.tolerance)
    } else {
        lanczos(g, degree, opts)
    }
}

fn to_dense(g: &WeightedGraph) -> DMatrix<f64> {
    let n = g.n();
    let mut a = DMatrix::zeros(n, n);
    for (u, row) in g.adj.iter().enumerate() {
        for &(v, w) in row {
            a[(u, v)] = w as f64;
        }
    }
    a
}

/// All eigenvalues of the adjacency matrix, ascending.
pub fn dense_eigenvalues(g: &WeightedGraph) -> Vec<f64> {
    let mut ev: Vec<f64> = to_dense(g).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

fn dense(g: &WeightedGraph, degree: u32, tolerance: f64) -> Result<SpectrumReport> {
    let ev = dense_eigenvalues(g);
    let n = g.n() as f64;
    let sum: f64 = ev.iter().sum();
    let sum_sq: f64 = ev.iter().map(|x| x * x).sum();
    if (sum - g.trace() as f64).abs() > 1e-6 * n.max(1.0) || (sum_sq - g.trace_of_square() as f64).abs() > 1e-6 * n.max(1.0) * degree as f64 {
        return Err(Error::Consistency(format!(
            "eigenvalue traces {sum:.6}, {sum_sq:.6} disagree with {}, {}",
            g.trace(),
            g.trace_of_square()
        )));
    }
    let k = degree as f64;
    let top = *ev.last().unwrap_or(&0.0);
    let top_multiplicity = ev.iter().filter(|&&x| (x - k).abs() < TRIVIAL_GAP).count();
    let bipartite = g.bipartition().is_some();
    let second = ev
        .iter()
        .map(|x| x.abs())
        .filter(|x| (x - k).abs() >= TRIVIAL_GAP)
        .fold(0.0, f64::max);
    Ok(finish(g.n(), degree, Method::Dense, ev, top, second, top_multiplicity, bipartite, None, tolerance))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    n_vertices: usize,
    degree: u32,
    method: Method,
    eigenvalues: Vec<f64>,
    top: f64,
    second_largest_abs: f64,
    top_multiplicity: usize,
    bipartite: bool,
    residual: Option<f64>,
    tolerance: f64,
) -> SpectrumReport {
    let bound = 2.0 * ((degree as f64) - 1.0).max(0.0).sqrt();
    let ramanujan = top_multiplicity == 1 && second_largest_abs <= bound + tolerance + residual.unwrap_or(0.0);
    SpectrumReport {
        n_vertices,
        degree,
        method,
        eigenvalues,
        top,
        second_largest_abs,
        bound,
        tolerance,
        top_multiplicity,
        bipartite,
        residual,
        ramanujan,
    }
}

fn apply(g: &WeightedGraph, x: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(g.n(), g.adj.iter().map(|row| row.iter().map(|&(v, w)| w as f64 * x[v]).sum::<f64>()))
}

/// Number of eigenvalues of the symmetric tridiagonal `(a, b)` below `x`.
fn sturm_count(a: &[f64], b: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..a.len() {
        let off = if i == 0 { 0.0 } else { b[i - 1] * b[i - 1] };
        d = a[i] - x - if off == 0.0 { 0.0 } else { off / d };
        if d == 0.0 {
            d = -f64::EPSILON * (a[i].abs() + x.abs() + 1.0);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `index`-th smallest eigenvalue by bisection.
fn tridiagonal_eigenvalue(a: &[f64], b: &[f64], index: usize) -> f64 {
    let radius = (0..a.len())
        .map(|i| a[i].abs() + if i > 0 { b[i - 1].abs() } else { 0.0 } + b.get(i).map_or(0.0, |x| x.abs()))
        .fold(0.0, f64::max);
    let (mut lo, mut hi) = (-radius - 1.0, radius + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if sturm_count(a, b, mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Unit eigenvector for an extreme eigenvalue `theta` by inverse iteration.
/// The shift sits just outside the spectrum, so `T - shift` is definite and
/// elimination without pivoting is stable.
fn tridiagonal_extreme_vector(a: &[f64], b: &[f64], theta: f64, above: bool) -> Vec<f64> {
    let k = a.len();
    let eps = 1e-10 * (theta.abs() + 1.0);
    let shift = if above { theta + eps } else { theta - eps };
    let mut x = vec![1.0; k];
    for _ in 0..3 {
        // Thomas algorithm on (T - shift) y = x
        let mut c = vec![0.0; k];
        let mut y = vec![0.0; k];
        let mut denom = a[0] - shift;
        c[0] = if k > 1 { b[0] / denom } else { 0.0 };
        y[0] = x[0] / denom;
        for i in 1..k {
            denom = a[i] - shift - b[i - 1] * c[i - 1];
            if i + 1 < k {
                c[i] = b[i] / denom;
            }
            y[i] = (x[i] - b[i - 1] * y[i - 1]) / denom;
        }
        for i in (0..k - 1).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = y.into_iter().map(|v| v / norm).collect();
    }
    x
}

/// Extreme Ritz values with their residuals `beta_k |s_k|`.
fn extreme_ritz(alpha: &[f64], beta: &[f64]) -> [(f64, f64); 2] {
    let k = alpha.len();
    let off = &beta[..k - 1];
    let last_beta = beta[k - 1];
    [(0, false), (k - 1, true)].map(|(index, above)| {
        let theta = tridiagonal_eigenvalue(alpha, off, index);
        let s = tridiagonal_extreme_vector(alpha, off, theta, above);
        (theta, (last_beta * s[k - 1]).abs())
    })
}

/// Ritz residual below which the iteration stops early.
const LANCZOS_TARGET: f64 = 1e-9;
/// Ritz residual above which the result is rejected.
const LANCZOS_ACCEPT: f64 = 1e-6;
const LANCZOS_BLOCK: usize = 50;

fn lanczos(g: &WeightedGraph, degree: u32, opts: SpectrumOptions) -> Result<SpectrumReport> {
    let n = g.n();
    if !g.is_connected() {
        return Err(Error::Parameter("the iterative spectrum path needs a connected graph".into()));
    }
    let bipartition = g.bipartition();
    // trivial eigenvectors: constant, and the +-1 side vector if bipartite
    let mut trivial = vec![DVector::from_element(n, 1.0 / (n as f64).sqrt())];
    if let Some(side) = &bipartition {
        trivial.push(DVector::from_iterator(
            n,
            side.iter().map(|&s| if s { 1.0 } else { -1.0 } / (n as f64).sqrt()),
        ));
    }
    let project = |v: &mut DVector<f64>, basis: &[DVector<f64>]| {
        for b in basis {
            let c = b.dot(v);
            v.axpy(-c, b, 1.0);
        }
    };
    // fixed pseudo-random start for reproducibility
    let mut v = DVector::from_iterator(n, (0..n).map(|i| ((i as u64 * 2654435761 % 1000003) as f64 / 1000003.0) - 0.5));
    project(&mut v, &trivial);
    v /= v.norm();

    // keep the Krylov basis under about 512 MiB
    let steps = opts.lanczos_steps.min(n - trivial.len()).min((1 << 26) / n).max(1);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(steps);
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    let mut ritz = [(0.0, f64::INFINITY); 2];
    basis.push(v);
    for j in 0..steps {
        let mut w = apply(g, &basis[j]);
        alpha.push(basis[j].dot(&w));
        project(&mut w, &trivial);
        // full reorthogonalisation, twice
        for _ in 0..2 {
            project(&mut w, &basis);
        }
        let b = w.norm();
        beta.push(b);
        let done = j + 1 == steps || b < 1e-12;
        if done || (j + 1) % LANCZOS_BLOCK == 0 {
            ritz = extreme_ritz(&alpha, &beta);
            if done || ritz[0].1.max(ritz[1].1) < LANCZOS_TARGET {
                break;
            }
        }
        basis.push(w / b);
    }
    let [lo, hi] = ritz;
    let residual = lo.1.max(hi.1);
    if residual > LANCZOS_ACCEPT {
        return Err(Error::NoConvergence { residual, iterations: alpha.len() });
    }
    Ok(finish(
        n,
        degree,
        Method::Lanczos,
        vec![lo.0, hi.0],
        degree as f64,
        lo.0.abs().max(hi.0.abs()),
        1,
        bipartition.is_some(),
        Some(residual),
        opts.tolerance,
    ))
}

/// Largest pointwise difference between two ascending spectra.
pub fn max_spectral_difference(a: &[f64], b: &[f64]) -> Option<f64> {
    (a.len() == b.len()).then(|| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}
