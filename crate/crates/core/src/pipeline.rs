//! End-to-end construction: order, congruence pair, generators, graph.

use crate::congruence::{congruence_pairs_with_caps, CongruenceReport, DEFAULT_SUBGROUP_CAP};
use crate::error::{Error, Result};
use crate::export::GraphReport;
use crate::finite::{FiniteGroupTable, DEFAULT_TABLE_CAP};
use crate::graph::{admissible_q, build_cayley, expected_order, CayleyGraph, Mode};
use crate::matrix::BetaMap;
use crate::quat::{AlgebraParams, IbukiyamaOrder};
use crate::spectrum::SpectrumReport;
use crate::tree::{build_generator_set, check_generator_set, GeneratorSet};

/// The modulus at which each class-number-one order has a known congruence
/// pair.
pub fn default_modulus(ramified: i64) -> Result<u32> {
    match ramified {
        2 => Ok(3),
        3 => Ok(4),
        5 => Ok(5),
        7 => Ok(2),
        13 => Ok(1),
        _ => Err(Error::Parameter(format!("P={ramified} does not give class number one"))),
    }
}

#[derive(Clone, Debug)]
pub struct ConstructionOptions {
    pub m: Option<u32>,
    /// Index into the congruence pairs found at `m`.
    pub h_index: usize,
    pub mode: Mode,
    /// Use `-sqrt(-P)` instead of the least root.
    pub other_root: bool,
    pub table_cap: usize,
    pub subgroup_cap: usize,
}

impl Default for ConstructionOptions {
    fn default() -> Self {
        ConstructionOptions {
            m: None,
            h_index: 0,
            mode: Mode::Psl,
            other_root: false,
            table_cap: DEFAULT_TABLE_CAP,
            subgroup_cap: DEFAULT_SUBGROUP_CAP,
        }
    }
}

/// Everything up to (but excluding) the graph.
#[derive(Clone, Debug)]
pub struct Generators {
    pub order: IbukiyamaOrder,
    pub table: FiniteGroupTable,
    pub pairs: CongruenceReport,
    pub pair_index: usize,
    pub generators: GeneratorSet,
}

impl Generators {
    pub fn h_label(&self) -> &str {
        &self.pairs.pairs[self.pair_index].h.label
    }
}

pub fn generators(params: AlgebraParams, p: i64, opts: &ConstructionOptions) -> Result<Generators> {
    let order = IbukiyamaOrder::new(params)?;
    let m = match opts.m {
        Some(m) => m,
        None => default_modulus(params.ramified)?,
    };
    let (table, pairs) = congruence_pairs_with_caps(&order, m, opts.table_cap, opts.subgroup_cap)?;
    let pair = pairs.pairs.get(opts.h_index).ok_or_else(|| {
        Error::Parameter(format!(
            "no congruence pair with index {} at m={m} ({} found)",
            opts.h_index,
            pairs.pairs.len()
        ))
    })?;
    let generators = build_generator_set(&order, p, &table, pair)?;
    check_generator_set(&order, &generators, &table, pair)?;
    Ok(Generators { order, table, pairs, pair_index: opts.h_index, generators })
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub gens: Generators,
    pub graph: CayleyGraph,
}

pub fn construct(params: AlgebraParams, p: i64, q: i64, opts: &ConstructionOptions) -> Result<Construction> {
    let gens = generators(params, p, opts)?;
    let mut beta = BetaMap::new(params, q)?;
    if opts.other_root {
        beta = beta.with_other_root();
    }
    let graph = build_cayley(&gens.generators, &beta, opts.mode)?;
    Ok(Construction { gens, graph })
}

/// Smallest admissible `q` whose PSL graph has at most `max_vertices` vertices.
pub fn smallest_q(params: AlgebraParams, p: i64, max_vertices: usize) -> Option<i64> {
    admissible_q(params, p, 3, 1000)
        .into_iter()
        .find(|&q| expected_order(q as u32, Mode::Psl) <= max_vertices)
}

/// `(Q, T)` for `P` together with the smallest admissible `q` within the
/// vertex budget. The reference choice is tried first, then further `Q` in
/// increasing order; all of them give isomorphic orders.
pub fn params_with_small_q(ramified: i64, p: i64, max_vertices: usize) -> Result<(AlgebraParams, i64)> {
    let reference = AlgebraParams::reference(ramified)?;
    let rest = AlgebraParams::candidates(ramified)?.filter(|c| *c != reference).take(200);
    for params in std::iter::once(reference).chain(rest) {
        if let Some(q) = smallest_q(params, p, max_vertices) {
            return Ok((params, q));
        }
    }
    Err(Error::Parameter(format!(
        "no Q up to the search limit admits q with at most {max_vertices} vertices for P={ramified}, p={p}"
    )))
}

pub fn graph_report(c: &Construction, s: &SpectrumReport) -> GraphReport {
    let params = c.gens.order.params;
    GraphReport {
        P: params.ramified,
        Q: params.aux,
        T: params.t,
        p: c.graph.p,
        q: c.graph.q,
        m: c.gens.pairs.m,
        H_label: c.gens.h_label().to_string(),
        n_vertices: c.graph.n_vertices(),
        degree: s.degree,
        second_eigenvalue: s.second_largest_abs,
        bound: s.bound,
        ramanujan: s.ramanujan,
        tolerance: s.tolerance,
    }
}
