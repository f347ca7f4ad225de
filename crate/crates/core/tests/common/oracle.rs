// Independent reference computations used by the integration and acceptance tests.
// Nothing here calls the transport solver or the Wasserstein module.
#![allow(dead_code)]

use haarwalk::{AtomicMeasure, Element, Group};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Minimum of `Σ c_ij f_ij` over the transportation polytope, by enumerating
/// every basis: sets of `n + m − 1` cells forming a spanning tree of the
/// bipartite graph. Each basis has a unique flow; the feasible ones are the
/// polytope's vertices and a linear objective attains its minimum at one.
pub fn brute_force_transport(a: &[f64], b: &[f64], cost: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let m = b.len();
    let k = n + m - 1;
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    let mut best = f64::INFINITY;
    let mut chosen = Vec::with_capacity(k);
    enumerate_subsets(&cells, k, 0, &mut chosen, &mut |basis| {
        if let Some(flow) = tree_flow(a, b, basis) {
            if flow.iter().all(|&f| f >= -1e-12) {
                let c: f64 = basis.iter().zip(&flow).map(|(&(i, j), f)| f * cost[i][j]).sum();
                best = best.min(c);
            }
        }
    });
    best
}

fn enumerate_subsets(
    cells: &[(usize, usize)],
    k: usize,
    start: usize,
    chosen: &mut Vec<(usize, usize)>,
    visit: &mut dyn FnMut(&[(usize, usize)]),
) {
    if chosen.len() == k {
        visit(chosen);
        return;
    }
    for idx in start..cells.len() {
        if cells.len() - idx < k - chosen.len() {
            break;
        }
        chosen.push(cells[idx]);
        enumerate_subsets(cells, k, idx + 1, chosen, visit);
        chosen.pop();
    }
}

/// Flow on a spanning-tree basis by leaf elimination; `None` if the cells contain a cycle.
fn tree_flow(a: &[f64], b: &[f64], basis: &[(usize, usize)]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut residual: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut flow = vec![f64::NAN; basis.len()];
    let mut alive = vec![true; basis.len()];
    let node = |side_row: bool, idx: usize| if side_row { idx } else { n + idx };
    for _ in 0..basis.len() {
        let mut degree = vec![0usize; residual.len()];
        for (e, &(i, j)) in basis.iter().enumerate() {
            if alive[e] {
                degree[node(true, i)] += 1;
                degree[node(false, j)] += 1;
            }
        }
        let leaf_edge = basis.iter().enumerate().find_map(|(e, &(i, j))| {
            if !alive[e] {
                return None;
            }
            if degree[node(true, i)] == 1 {
                Some((e, node(true, i), node(false, j)))
            } else if degree[node(false, j)] == 1 {
                Some((e, node(false, j), node(true, i)))
            } else {
                None
            }
        });
        let (e, leaf, other) = leaf_edge?;
        flow[e] = residual[leaf];
        residual[other] -= residual[leaf];
        residual[leaf] = 0.0;
        alive[e] = false;
    }
    Some(flow)
}

/// `W1` between two atomic measures via [`brute_force_transport`] with the group metric.
pub fn brute_force_w1(mu: &AtomicMeasure, nu: &AtomicMeasure) -> f64 {
    let g = mu.group();
    let a: Vec<f64> = mu.atoms().iter().map(|(_, w)| *w).collect();
    let b: Vec<f64> = nu.atoms().iter().map(|(_, w)| *w).collect();
    let cost: Vec<Vec<f64>> = mu
        .atoms()
        .iter()
        .map(|(x, _)| nu.atoms().iter().map(|(y, _)| g.metric(x, y).unwrap()).collect())
        .collect();
    brute_force_transport(&a, &b, &cost)
}

/// Circle `W1` between atomic measures: `min_c ∫ |F_μ − F_ν − c|`. The CDF
/// difference is piecewise constant, so the optimal `c` is a weighted median.
pub fn circle_w1_atomic(mu: &[(f64, f64)], nu: &[(f64, f64)]) -> f64 {
    let mut events: Vec<(f64, f64)> = mu.iter().copied().chain(nu.iter().map(|&(x, w)| (x, -w))).collect();
    events.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut pieces = Vec::new(); // (value of F_μ − F_ν, length)
    let mut level = 0.0;
    let mut prev = 0.0;
    for (x, w) in events {
        pieces.push((level, x - prev));
        level += w;
        prev = x;
    }
    pieces.push((level, 1.0 - prev));
    let c = weighted_median(&mut pieces.clone());
    pieces.iter().map(|(v, l)| l * (v - c).abs()).sum()
}

fn weighted_median(pieces: &mut [(f64, f64)]) -> f64 {
    pieces.sort_by(|p, q| p.0.total_cmp(&q.0));
    let total: f64 = pieces.iter().map(|p| p.1).sum();
    let mut acc = 0.0;
    for &(v, l) in pieces.iter() {
        acc += l;
        if acc >= total / 2.0 {
            return v;
        }
    }
    pieces.last().map_or(0.0, |p| p.0)
}

/// Circle `W1` between an atomic measure and Lebesgue measure:
/// `min_c ∫_0^1 |F_μ(x) − x − c| dx`, minimized by ternary search over the convex objective.
pub fn circle_w1_to_lebesgue(mu: &[(f64, f64)]) -> f64 {
    let mut atoms = mu.to_vec();
    atoms.sort_by(|p, q| p.0.total_cmp(&q.0));
    // Segments where F_μ is constant: (start, end, F).
    let mut segs = Vec::new();
    let mut level = 0.0;
    let mut prev = 0.0;
    for (x, w) in atoms {
        segs.push((prev, x, level));
        level += w;
        prev = x;
    }
    segs.push((prev, 1.0, level));
    let objective = |c: f64| -> f64 {
        segs.iter()
            .map(|&(s, e, f)| {
                // ∫_s^e |f − x − c| dx: the integrand is linear in x with slope −1.
                let u = f - c - s;
                let v = f - c - e;
                if u >= 0.0 && v >= 0.0 || u <= 0.0 && v <= 0.0 {
                    (u + v).abs() / 2.0 * (e - s)
                } else {
                    (u * u + v * v) / 2.0
                }
            })
            .sum()
    };
    let (mut lo, mut hi) = (-2.0, 2.0);
    for _ in 0..300 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if objective(m1) <= objective(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    objective((lo + hi) / 2.0)
}

/// `ln C(n, k)`.
fn ln_choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Exact `P(|A_n| > ε)` for the walk on ℤ/2 with steps ½δ_0 + ½δ_1 from 0 and
/// the ±1 character: positions after the first step are i.i.d. uniform, so
/// `n·A_n = 1 + (2B − (n − 1))` with `B ~ Binomial(n − 1, ½)`.
pub fn z2_lazy_tail(n: u64, eps: f64) -> f64 {
    let trials = n - 1;
    let ln_half = (0.5f64).ln() * trials as f64;
    (0..=trials)
        .filter(|&b| ((1 + 2 * b as i64 - trials as i64) as f64 / n as f64).abs() > eps)
        .map(|b| (ln_choose(trials, b) + ln_half).exp())
        .sum()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A product of one to three cyclic groups with order at most `max_order`.
pub fn random_finite_group<R: Rng>(rng: &mut R, max_order: u64) -> Group {
    loop {
        let k = rng.random_range(1..=3);
        let moduli: Vec<u64> = (0..k).map(|_| rng.random_range(2..=max_order.min(16))).collect();
        if moduli.iter().product::<u64>() <= max_order {
            return Group::finite(&moduli).unwrap();
        }
    }
}

/// A probability measure with up to `max_atoms` distinct random atoms and weights in `[0.2, 1]`.
pub fn random_measure<R: Rng>(rng: &mut R, g: &Group, max_atoms: usize) -> AtomicMeasure {
    let k = rng.random_range(1..=max_atoms);
    let atoms: Vec<(Element, f64)> = (0..k).map(|_| (g.haar_sample(rng), rng.random_range(0.2..=1.0))).collect();
    AtomicMeasure::probability(g.clone(), atoms).unwrap()
}
