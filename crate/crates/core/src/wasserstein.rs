//! Exact Wasserstein-1 distance between atomic measures.
//!
//! `W(μ, ν) = inf_γ ∬ d(x, y) dγ(x, y)` over couplings γ with marginals μ and ν,
//! computed as a balanced transportation problem on the complete bipartite
//! graph of atoms with group-metric costs.

use thiserror::Error;

use crate::group::{Element, Group};
use crate::measure::{convolve_sequence, AtomicMeasure, MeasureError};
use crate::transport;

/// Absolute tolerance for W1 comparisons on finite groups.
pub const FINITE_TOL: f64 = 1e-10;
/// Absolute tolerance for W1 comparisons on the torus.
pub const TORUS_TOL: f64 = 1e-8;
/// Largest grid measure used by the torus upper bound.
pub const MAX_GRID_ATOMS: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WassersteinError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("wasserstein: total masses differ ({0} vs {1})")]
    MassMismatch(f64, f64),
    #[error("wasserstein: {0} requires a finite group; use the torus upper bound or Monte Carlo instead")]
    NotFinite(&'static str),
    #[error("wasserstein: {0} requires a torus")]
    NotTorus(&'static str),
    #[error("wasserstein: grid_n must be >= 2, got {0}")]
    BadGrid(usize),
    #[error("wasserstein: grid of {atoms} atoms exceeds the cap of {cap}")]
    AtomCap { atoms: usize, cap: usize },
}

/// A coupling between two atomic measures realizing a W1 value.
#[derive(Clone, Debug)]
pub struct TransportPlan {
    pub source: AtomicMeasure,
    pub target: AtomicMeasure,
    /// `(source atom index, target atom index, mass)`.
    pub flows: Vec<(usize, usize, f64)>,
    pub cost: f64,
}

impl TransportPlan {
    /// Largest deviation of the plan's marginals from the two measures.
    pub fn marginal_error(&self) -> f64 {
        let mut rows: Vec<f64> = self.source.atoms().iter().map(|(_, w)| *w).collect();
        let mut cols: Vec<f64> = self.target.atoms().iter().map(|(_, w)| *w).collect();
        for &(i, j, f) in &self.flows {
            rows[i] -= f;
            cols[j] -= f;
        }
        rows.iter().chain(&cols).map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// `Σ flow · d(atom pair)`, recomputed from the flows.
    pub fn recomputed_cost(&self) -> f64 {
        let g = self.source.group();
        self.flows
            .iter()
            .map(|&(i, j, f)| f * g.metric_unchecked(&self.source.atoms()[i].0, &self.target.atoms()[j].0))
            .sum()
    }
}

/// Exact W1 distance and an optimal plan.
pub fn w1_exact(mu: &AtomicMeasure, nu: &AtomicMeasure) -> Result<(f64, TransportPlan), WassersteinError> {
    mu.same_group(nu)?;
    let (ma, mb) = (mu.total_mass(), nu.total_mass());
    if (ma - mb).abs() > FINITE_TOL {
        return Err(WassersteinError::MassMismatch(ma, mb));
    }
    let g = mu.group();
    let a: Vec<f64> = mu.atoms().iter().map(|(_, w)| *w).collect();
    let b: Vec<f64> = nu.atoms().iter().map(|(_, w)| *w).collect();
    let cost: Vec<Vec<f64>> = mu
        .atoms()
        .iter()
        .map(|(x, _)| nu.atoms().iter().map(|(y, _)| g.metric_unchecked(x, y)).collect())
        .collect();
    let sol = transport::solve(&a, &b, &cost);
    let plan = TransportPlan { source: mu.clone(), target: nu.clone(), flows: sol.flows, cost: sol.cost };
    Ok((sol.cost, plan))
}

pub fn w1(mu: &AtomicMeasure, nu: &AtomicMeasure) -> Result<f64, WassersteinError> {
    w1_exact(mu, nu).map(|(v, _)| v)
}

/// `W(ν, h)` for a probability measure on a finite group.
pub fn w1_to_haar(nu: &AtomicMeasure) -> Result<f64, WassersteinError> {
    if !nu.group().is_finite() {
        return Err(WassersteinError::NotFinite("w1_to_haar"));
    }
    nu.require_probability()?;
    let h = AtomicMeasure::uniform(nu.group().clone())?;
    w1(nu, &h)
}

/// `W(δ_x, h) = ∫ d(x, y) dh(y)`, exact on every group.
///
/// On the sup-metric torus of dimension d this is the mean of the maximum of
/// d independent Uniform(0, ½) variables, `d / (2(d + 1))`.
pub fn dirac_to_haar(group: &Group, x: &Element) -> Result<f64, WassersteinError> {
    group.check(x).map_err(MeasureError::from)?;
    if group.is_torus() {
        let d = group.rank() as f64;
        return Ok(d / (2.0 * (d + 1.0)));
    }
    let els = group.elements().map_err(MeasureError::from)?;
    let sum: f64 = els.iter().map(|y| group.metric_unchecked(x, y)).sum();
    Ok(sum / els.len() as f64)
}

/// Certified upper bound `U ≥ W(ν, h)` on the torus.
///
/// Atoms are snapped to the grid `{k / grid_n}^d` (each moves at most the snap
/// radius `1 / (2 grid_n)`), the snapped measure is transported exactly to the
/// uniform grid measure, and the uniform grid measure is itself within one
/// snap radius of Lebesgue measure. Hence
/// `U = W(snapped, grid) + 2 · snap_radius`.
pub fn w1_haar_upper_bound_torus(nu: &AtomicMeasure, grid_n: usize) -> Result<f64, WassersteinError> {
    let g = nu.group();
    if !g.is_torus() {
        return Err(WassersteinError::NotTorus("w1_haar_upper_bound_torus"));
    }
    if grid_n < 2 {
        return Err(WassersteinError::BadGrid(grid_n));
    }
    nu.require_probability()?;
    let atoms = grid_n.checked_pow(g.rank() as u32).unwrap_or(usize::MAX);
    if atoms > MAX_GRID_ATOMS {
        return Err(WassersteinError::AtomCap { atoms, cap: MAX_GRID_ATOMS });
    }
    let n = grid_n as f64;
    let snapped_atoms = nu
        .atoms()
        .iter()
        .map(|(x, w)| {
            let coords: Vec<f64> = x.point().expect("torus point").iter().map(|c| (c * n).round() / n).collect();
            Ok((g.element_from_reals(&coords).map_err(MeasureError::from)?, *w))
        })
        .collect::<Result<Vec<_>, WassersteinError>>()?;
    let snapped = AtomicMeasure::new(g.clone(), snapped_atoms)?;
    let grid = AtomicMeasure::torus_grid(g.clone(), grid_n)?;
    let snap_radius = 1.0 / (2.0 * n);
    Ok(w1(&snapped, &grid)? + 2.0 * snap_radius)
}

/// Worst-case W1 between images of two starting measures under the window.
///
/// With `C = μ_k * … * μ_1`, returns `max_{x,y} W(C * δ_x, C * δ_y)`. By
/// convexity of W in each argument this equals the supremum over all pairs of
/// probability measures, and by translation invariance it reduces to
/// `max_z W(C, C * δ_z)`. An empty window gives the diameter.
pub fn contraction_coefficient(group: &Group, window: &[AtomicMeasure]) -> Result<f64, WassersteinError> {
    if !group.is_finite() {
        return Err(WassersteinError::NotFinite("contraction_coefficient"));
    }
    let c = if window.is_empty() {
        AtomicMeasure::dirac(group.clone(), group.zero())?
    } else {
        for mu in window {
            if mu.group() != group {
                return Err(MeasureError::GroupMismatch { left: group.to_string(), right: mu.group().to_string() }.into());
            }
            mu.require_probability()?;
        }
        convolve_sequence(window)?
    };
    let mut best = 0.0f64;
    for z in group.elements().map_err(MeasureError::from)? {
        let shifted = c.translate(&z)?;
        best = best.max(w1(&c, &shifted)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: f64) -> Element {
        Element::Point(vec![v])
    }

    fn r(v: u64) -> Element {
        Element::Residues(vec![v])
    }

    #[test]
    fn self_distance_is_zero() {
        let g = Group::finite(&[3, 4]).unwrap();
        let u = AtomicMeasure::uniform(g).unwrap();
        assert_eq!(w1(&u, &u).unwrap(), 0.0);
    }

    #[test]
    fn torus_single_atoms() {
        let t = Group::torus(1).unwrap();
        let a = AtomicMeasure::dirac(t.clone(), p(0.0)).unwrap();
        let b = AtomicMeasure::dirac(t.clone(), p(0.5)).unwrap();
        assert_eq!(w1(&a, &b).unwrap(), 0.5);
    }

    #[test]
    fn torus_two_to_one() {
        // Only one coupling exists: move ½ mass from ½ to 0.
        let t = Group::torus(1).unwrap();
        let a = AtomicMeasure::new(t.clone(), vec![(p(0.0), 0.5), (p(0.5), 0.5)]).unwrap();
        let b = AtomicMeasure::dirac(t, p(0.0)).unwrap();
        let (v, plan) = w1_exact(&a, &b).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        assert!(plan.marginal_error() < 1e-12);
        assert!((plan.recomputed_cost() - v).abs() < 1e-12);
    }

    #[test]
    fn mass_mismatch_rejected() {
        let g = Group::cyclic(3).unwrap();
        let a = AtomicMeasure::dirac(g.clone(), r(0)).unwrap();
        let b = a.scaled(0.5);
        assert!(matches!(w1(&a, &b), Err(WassersteinError::MassMismatch(..))));
    }

    #[test]
    fn to_haar_examples() {
        let z2 = Group::cyclic(2).unwrap();
        let u = AtomicMeasure::uniform(z2.clone()).unwrap();
        assert_eq!(w1_to_haar(&u).unwrap(), 0.0);
        let d0 = AtomicMeasure::dirac(z2.clone(), r(0)).unwrap();
        assert!((w1_to_haar(&d0).unwrap() - 0.25).abs() < 1e-15);
        assert!((dirac_to_haar(&z2, &r(0)).unwrap() - 0.25).abs() < 1e-15);

        let t = Group::torus(1).unwrap();
        let dt = AtomicMeasure::dirac(t.clone(), p(0.3)).unwrap();
        assert!(matches!(w1_to_haar(&dt), Err(WassersteinError::NotFinite(_))));
        assert_eq!(dirac_to_haar(&t, &p(0.3)).unwrap(), 0.25);
    }

    #[test]
    fn torus_upper_bound_examples() {
        let t = Group::torus(1).unwrap();
        let d0 = AtomicMeasure::dirac(t.clone(), p(0.0)).unwrap();
        let u = w1_haar_upper_bound_torus(&d0, 2).unwrap();
        assert!((0.25..=0.75 + 1e-15).contains(&u));
        assert!((u - 0.75).abs() < 1e-15);

        let grid = AtomicMeasure::torus_grid(t.clone(), 8).unwrap();
        assert!(w1_haar_upper_bound_torus(&grid, 8).unwrap() <= 2.0 / 16.0 + 1e-15);

        assert!(matches!(w1_haar_upper_bound_torus(&d0, 1), Err(WassersteinError::BadGrid(1))));
        let t3 = Group::torus(3).unwrap();
        let d3 = AtomicMeasure::dirac(t3.clone(), t3.zero()).unwrap();
        assert!(matches!(w1_haar_upper_bound_torus(&d3, 64), Err(WassersteinError::AtomCap { .. })));
    }

    #[test]
    fn contraction_coefficient_examples() {
        let z2 = Group::cyclic(2).unwrap();
        let u = AtomicMeasure::uniform(z2.clone()).unwrap();
        assert_eq!(contraction_coefficient(&z2, &[u]).unwrap(), 0.0);
        assert_eq!(contraction_coefficient(&z2, &[]).unwrap(), 0.5);
        let d1 = AtomicMeasure::dirac(z2.clone(), r(1)).unwrap();
        assert_eq!(contraction_coefficient(&z2, &[d1]).unwrap(), 0.5);
        let t = Group::torus(1).unwrap();
        assert!(contraction_coefficient(&t, &[]).is_err());
    }
}
