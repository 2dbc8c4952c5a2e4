//! End-to-end acceptance battery. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quatgraph::arith::{is_prime, primes_in, rem};
use quatgraph::congruence::{congruence_pairs, verify_pair};
use quatgraph::finite::group_order;
use quatgraph::graph::{expected_order, Mode};
use quatgraph::matrix::{mat_det, mat_mul, BetaMap, ProjMatrix};
use quatgraph::pipeline::{construct, generators, params_with_small_q, ConstructionOptions, Construction};
use quatgraph::quat::{ibukiyama_order, AlgebraParams, IbukiyamaOrder, OrderElement};
use quatgraph::spectrum::{dense_eigenvalues, max_spectral_difference, spectrum};
use quatgraph::tree::{ball_sizes, tree_sphere_sizes};
use quatgraph::units::{class_number, norm_class_representatives, unit_group, unit_orbits};

type Check = std::result::Result<String, String>;

const CLASS_NUMBER_ONE: [i64; 5] = [2, 3, 5, 7, 13];
const TREE_CASES: [(i64, i64); 5] = [(2, 5), (3, 5), (5, 2), (7, 3), (13, 2)];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn reference(p: i64) -> IbukiyamaOrder {
    IbukiyamaOrder::new(AlgebraParams::reference(p).unwrap()).unwrap()
}

fn unit_groups() -> Check {
    let want = [(2, 24, 12, "A4"), (3, 12, 6, "S3"), (5, 6, 3, "C3"), (7, 4, 2, "C2")];
    let mut orders = Vec::new();
    for (p, raw, order, label) in want {
        let u = unit_group(&reference(p)).map_err(|e| e.to_string())?;
        ensure(u.all.len() == raw && u.order() == order && u.label == label, || {
            format!("P={p}: {} solutions, order {}, {}", u.all.len(), u.order(), u.label)
        })?;
        orders.push(u.order());
    }
    let u = unit_group(&ibukiyama_order(13, None, None).unwrap()).map_err(|e| e.to_string())?;
    ensure(u.all.len() == 2 && u.order() == 1 && u.label == "C1", || format!("P=13: {}", u.label))?;
    orders.push(1);
    Ok(format!("orders {orders:?}"))
}

fn class_numbers() -> Check {
    let ones: Vec<i64> = primes_in(2, 100).into_iter().filter(|&d| class_number(d as u64) == Ok(1)).collect();
    ensure(ones == CLASS_NUMBER_ONE, || format!("h=1 for {ones:?}"))?;
    ensure(class_number(11) == Ok(2), || "h(11) != 2".into())?;
    Ok(format!("h=1 exactly for {ones:?}, h(11)=2"))
}

fn norm_classes() -> Check {
    let mut checked = 0;
    for big_p in CLASS_NUMBER_ONE {
        let o = reference(big_p);
        let units = unit_group(&o).map_err(|e| e.to_string())?;
        for p in primes_in(2, 13).into_iter().filter(|&p| p != big_p) {
            let s = norm_class_representatives(&o, p).map_err(|e| format!("P={big_p} p={p}: {e}"))?;
            ensure(s.representatives.len() as i64 == p + 1, || format!("P={big_p} p={p}"))?;
            checked += 1;
            if p <= 5 {
                let orbits = unit_orbits(&o, &units, p * p).len() as i64;
                ensure(orbits == 1 + p + p * p, || format!("P={big_p} p^2={}: {orbits} orbits", p * p))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} orbit counts"))
}

fn positive_pairs() -> Check {
    let mut notes = Vec::new();
    for (p, m) in [(2, 3), (3, 4), (5, 5), (7, 2)] {
        let o = reference(p);
        let (g, r) = congruence_pairs(&o, m).map_err(|e| e.to_string())?;
        for pair in &r.pairs {
            verify_pair(&o, &g, pair).map_err(|e| format!("P={p} m={m}: {e}"))?;
        }
        let labels = r.class_labels();
        let ok = match p {
            2 => labels.iter().any(|l| l == "C2"),
            3 => labels.len() >= 2 && labels.iter().any(|l| l == "D4"),
            5 => r.pairs.iter().any(|x| x.h.order() == 50 && x.h.label == "C5:D5"),
            _ => labels.iter().any(|l| l == "C3"),
        };
        ensure(ok, || format!("P={p} m={m}: classes {labels:?}"))?;
        notes.push(format!("P={p} m={m} {labels:?}"));
    }
    Ok(notes.join("; "))
}

fn negative_pairs() -> Check {
    for (p, m) in [(3, 3), (3, 5), (7, 7), (7, 3), (7, 5)] {
        let (_, r) = congruence_pairs(&reference(p), m).map_err(|e| e.to_string())?;
        ensure(r.negative && r.pairs.is_empty(), || format!("P={p} m={m}: {} pairs", r.pairs.len()))?;
    }
    Ok("no complements at (3,3) (3,5) (7,7) (7,3) (7,5)".into())
}

fn group_orders() -> Check {
    let mut checked = 0;
    for big_p in [3, 5, 7] {
        let n = group_order(&reference(big_p), big_p as u32).map_err(|e| e.to_string())?;
        ensure(n as i64 == big_p * big_p * (big_p + 1), || format!("|G(Z/{big_p})| = {n}"))?;
        checked += 1;
    }
    for big_p in CLASS_NUMBER_ONE {
        let o = reference(big_p);
        let q = o.params.aux;
        for m in primes_in(3, 13).into_iter().filter(|&m| (2 * big_p * q) % m != 0) {
            let n = group_order(&o, m as u32).map_err(|e| e.to_string())?;
            ensure(n as i64 == m * (m * m - 1), || format!("P={big_p} m={m}: {n}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} group orders"))
}

fn tree_action() -> Check {
    let mut notes = Vec::new();
    for (big_p, p) in TREE_CASES {
        let start = Instant::now();
        let gens = generators(AlgebraParams::reference(big_p).unwrap(), p, &ConstructionOptions::default())
            .map_err(|e| format!("P={big_p} p={p}: {e}"))?;
        let sizes = ball_sizes(&gens.order, &gens.generators, 4).map_err(|e| e.to_string())?;
        ensure(sizes == tree_sphere_sizes(p, 4), || format!("P={big_p} p={p}: {sizes:?}"))?;
        ensure(start.elapsed() < Duration::from_secs(120), || format!("P={big_p} too slow"))?;
        notes.push(format!("({big_p},{p})"));
    }
    Ok(format!("tree growth to radius 4 for {}", notes.join(" ")))
}

/// The graph for each `(P, p)` with the smallest admissible `q` inside the
/// vertex budget.
fn small_graphs() -> Vec<Result<Construction, String>> {
    TREE_CASES
        .iter()
        .map(|&(big_p, p)| {
            let (params, q) = params_with_small_q(big_p, p, 5000).map_err(|e| e.to_string())?;
            construct(params, p, q, &ConstructionOptions::default()).map_err(|e| format!("P={big_p}: {e}"))
        })
        .collect()
}

fn ramanujan(graphs: &[Result<Construction, String>]) -> Check {
    let mut notes = Vec::new();
    for c in graphs {
        let c = c.as_ref().map_err(|e| e.clone())?;
        let start = Instant::now();
        let g = &c.graph;
        let params = c.gens.order.params;
        let tag = format!("P={} Q={} p={} q={}", params.ramified, params.aux, g.p, g.q);
        ensure(g.n_vertices() == expected_order(g.q, Mode::Psl), || format!("{tag}: {} vertices", g.n_vertices()))?;
        ensure(g.graph.is_connected(), || format!("{tag}: disconnected"))?;
        let s = spectrum(&g.graph).map_err(|e| format!("{tag}: {e}"))?;
        let k = (g.p + 1) as f64;
        ensure((s.top - k).abs() <= 1e-9, || format!("{tag}: top eigenvalue {}", s.top))?;
        let bound = 2.0 * (g.p as f64).sqrt();
        ensure(s.second_largest_abs <= bound + 1e-8, || {
            format!("{tag}: second |lambda| {} > {bound}", s.second_largest_abs)
        })?;
        ensure(start.elapsed() < Duration::from_secs(300), || format!("{tag}: too slow"))?;
        notes.push(format!("{tag} n={} |l2|={:.4}<={bound:.4}", g.n_vertices(), s.second_largest_abs));
    }
    Ok(notes.join("; "))
}

fn beta_contract() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checked = 0;
    for big_p in CLASS_NUMBER_ONE {
        let o = reference(big_p);
        let qs: Vec<i64> = (3..500)
            .filter(|&q| is_prime(q) && BetaMap::new(o.params, q).is_ok())
            .take(3)
            .collect();
        ensure(qs.len() == 3, || format!("P={big_p}: only {qs:?}"))?;
        for q in qs {
            let b = BetaMap::new(o.params, q).unwrap();
            let mut random = || OrderElement(std::array::from_fn(|_| rng.gen_range(-50..=50)));
            for _ in 0..1000 {
                let a = random();
                ensure(mat_det(q as u32, &b.matrix(&a)) as i64 == rem(o.norm(&a), q), || {
                    format!("P={big_p} q={q}: det mismatch at {a}")
                })?;
                let c = random();
                let prod = o.multiply(&a, &c);
                let lhs = b.matrix(&prod);
                let rhs = mat_mul(q as u32, &b.matrix(&a), &b.matrix(&c));
                ensure(lhs == rhs, || format!("P={big_p} q={q}: not multiplicative at {a}, {c}"))?;
                if lhs.iter().any(|&x| x != 0) {
                    ensure(ProjMatrix::new(q as u32, lhs) == b.apply(&a).mul(&b.apply(&c)), || {
                        "projective product mismatch".into()
                    })?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} determinant and product checks"))
}

fn root_independence(graphs: &[Result<Construction, String>]) -> Check {
    let mut worst: f64 = 0.0;
    for c in graphs {
        let c = c.as_ref().map_err(|e| e.clone())?;
        let params = c.gens.order.params;
        let opts = ConstructionOptions { other_root: true, ..Default::default() };
        let flipped = construct(params, c.graph.p, c.graph.q as i64, &opts).map_err(|e| e.to_string())?;
        ensure(flipped.graph.beta.sqrt_neg_p != c.graph.beta.sqrt_neg_p, || "roots coincide".into())?;
        let a = dense_eigenvalues(&c.graph.graph);
        let b = dense_eigenvalues(&flipped.graph.graph);
        let d = max_spectral_difference(&a, &b).ok_or("spectra differ in length")?;
        ensure(d <= 1e-9, || format!("P={}: spectra differ by {d:e}", params.ramified))?;
        worst = worst.max(d);
    }
    Ok(format!("max pointwise difference {worst:.1e}"))
}

fn main() {
    let mut failures = 0;
    let mut report = |n: usize, name: &str, budget: Duration, f: &mut dyn FnMut() -> Check| {
        let start = Instant::now();
        let mut result = f();
        let elapsed = start.elapsed();
        if result.is_ok() && elapsed > budget {
            result = Err(format!("took {elapsed:.1?}, budget {budget:?}"));
        }
        match result {
            Ok(msg) => println!("criterion {n:>2} PASS {name} ({elapsed:.2?}): {msg}"),
            Err(msg) => {
                failures += 1;
                println!("criterion {n:>2} FAIL {name} ({elapsed:.2?}): {msg}");
            }
        }
    };
    let secs = Duration::from_secs;
    report(1, "unit groups", secs(1), &mut unit_groups);
    report(2, "class numbers", secs(1), &mut class_numbers);
    report(3, "norm classes", secs(30), &mut norm_classes);
    report(4, "congruence pairs", secs(120), &mut positive_pairs);
    report(5, "negative moduli", secs(120), &mut negative_pairs);
    report(6, "group orders", secs(30), &mut group_orders);
    report(7, "tree action", secs(600), &mut tree_action);
    let graphs = small_graphs();
    report(8, "ramanujan", secs(1500), &mut || ramanujan(&graphs));
    report(9, "splitting map", secs(10), &mut beta_contract);
    report(10, "square-root independence", secs(600), &mut || root_independence(&graphs));
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
