//! Dense balanced transportation problem solved by successive shortest paths.
//!
//! Sources `i` carry supply `a[i]`, sinks `j` demand `b[j]`, every pair is
//! connected by an uncapacitated arc of cost `c[i][j] ≥ 0`. Each round runs a
//! dense Dijkstra over the residual graph with reduced costs, then pushes the
//! bottleneck amount along the shortest path from a source with remaining
//! supply to the nearest sink with remaining demand. Every augmentation
//! exhausts a supply, a demand or a backward arc, so the number of rounds is
//! finite and small in practice (about `n + m`).

/// Flow below this fraction of the total mass is treated as zero.
const REL_EPS: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct TransportSolution {
    /// `(source, sink, mass)` for every arc with positive flow.
    pub flows: Vec<(usize, usize, f64)>,
    pub cost: f64,
}

/// Solve `min Σ c_ij f_ij` subject to row sums `a` and column sums `b`.
///
/// The demands are rescaled to the supply total, so callers should check
/// that the two totals agree to their own tolerance first.
pub fn solve(a: &[f64], b: &[f64], cost: &[Vec<f64>]) -> TransportSolution {
    let n = a.len();
    let m = b.len();
    let total_a: f64 = a.iter().sum();
    let total_b: f64 = b.iter().sum();
    if n == 0 || m == 0 || total_a <= 0.0 {
        return TransportSolution { flows: Vec::new(), cost: 0.0 };
    }
    let eps = REL_EPS * total_a;
    let scale = total_a / total_b;
    let mut supply = a.to_vec();
    let mut demand: Vec<f64> = b.iter().map(|v| v * scale).collect();
    let mut flow = vec![0.0f64; n * m];
    let mut pot_s = vec![0.0f64; n];
    let mut pot_t = vec![0.0f64; m];

    let mut dist_s = vec![0.0f64; n];
    let mut dist_t = vec![0.0f64; m];
    let mut done_s = vec![false; n];
    let mut done_t = vec![false; m];
    let mut pred_s = vec![usize::MAX; n]; // sink reached through a backward arc
    let mut pred_t = vec![usize::MAX; m]; // source reached through a forward arc

    loop {
        if supply.iter().all(|&s| s <= eps) || demand.iter().all(|&d| d <= eps) {
            break;
        }
        for i in 0..n {
            dist_s[i] = if supply[i] > eps { 0.0 } else { f64::INFINITY };
            done_s[i] = false;
            pred_s[i] = usize::MAX;
        }
        dist_t.fill(f64::INFINITY);
        done_t.fill(false);
        pred_t.fill(usize::MAX);

        let target = loop {
            // Pick the unsettled node of smallest tentative distance.
            let mut best = f64::INFINITY;
            let mut pick: Option<(bool, usize)> = None;
            for i in 0..n {
                if !done_s[i] && dist_s[i] < best {
                    best = dist_s[i];
                    pick = Some((true, i));
                }
            }
            for j in 0..m {
                if !done_t[j] && dist_t[j] < best {
                    best = dist_t[j];
                    pick = Some((false, j));
                }
            }
            match pick {
                None => break None,
                Some((true, i)) => {
                    done_s[i] = true;
                    for j in 0..m {
                        if done_t[j] {
                            continue;
                        }
                        let rc = (cost[i][j] + pot_s[i] - pot_t[j]).max(0.0);
                        if best + rc < dist_t[j] {
                            dist_t[j] = best + rc;
                            pred_t[j] = i;
                        }
                    }
                }
                Some((false, j)) => {
                    done_t[j] = true;
                    if demand[j] > eps {
                        break Some(j);
                    }
                    for i in 0..n {
                        if done_s[i] || flow[i * m + j] <= eps {
                            continue;
                        }
                        let rc = (pot_t[j] - cost[i][j] - pot_s[i]).max(0.0);
                        if best + rc < dist_s[i] {
                            dist_s[i] = best + rc;
                            pred_s[i] = j;
                        }
                    }
                }
            }
        };
        let Some(t) = target else { break };
        let reach = dist_t[t];
        for i in 0..n {
            pot_s[i] += dist_s[i].min(reach);
        }
        for j in 0..m {
            pot_t[j] += dist_t[j].min(reach);
        }

        // Walk back to the originating source, collecting the bottleneck.
        let mut theta = demand[t];
        let mut j = t;
        let source = loop {
            let i = pred_t[j];
            match pred_s[i] {
                usize::MAX => break i,
                prev => {
                    theta = theta.min(flow[i * m + prev]);
                    j = prev;
                }
            }
        };
        theta = theta.min(supply[source]);

        let mut j = t;
        loop {
            let i = pred_t[j];
            flow[i * m + j] += theta;
            match pred_s[i] {
                usize::MAX => break,
                prev => {
                    let f = &mut flow[i * m + prev];
                    *f -= theta;
                    if *f <= eps {
                        *f = 0.0;
                    }
                    j = prev;
                }
            }
        }
        supply[source] -= theta;
        demand[t] -= theta;
    }

    let mut flows = Vec::new();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..m {
            let f = flow[i * m + j];
            if f > 0.0 {
                flows.push((i, j, f));
                total += f * cost[i][j];
            }
        }
    }
    TransportSolution { flows, cost: total }
}
