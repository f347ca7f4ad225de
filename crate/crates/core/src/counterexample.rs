//! Two walks on the circle that do not converge to Haar measure.
//!
//! Rotation by a fixed irrational angle: `μ = δ_α` has `μ^{*n} = δ_{nα}`, a
//! single atom for every n, so `W(μ^{*n}, h)` is the constant Dirac-to-Haar
//! distance even though the orbit is dense.
//!
//! Shrinking steps: `μ_n = ½δ_0 + ½δ_{α/2^n}` are each strictly aperiodic,
//! yet every atom of `μ_n * … * μ_1` is `α·K/2^n` with an integer
//! `0 ≤ K ≤ 2^n − 1`, so the support never leaves `[0, α)`.

use serde::Serialize;
use thiserror::Error;

use crate::group::{Element, Group};
use crate::measure::{convolve, AtomicMeasure, MeasureError};
use crate::wasserstein::{dirac_to_haar, w1_haar_upper_bound_torus, WassersteinError};

/// Largest n for which the shrinking-support sum-set is enumerated.
pub const MAX_ENUMERATED_STEPS: u32 = 20;
/// Largest n for which the float torus convolution is also checked.
pub const MAX_FLOAT_STEPS: u32 = 12;
/// Largest n supported by the integer check (coefficients fit in u64 comfortably).
pub const MAX_SHRINKING_STEPS: u32 = 62;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CounterexampleError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Wasserstein(#[from] WassersteinError),
    #[error("counterexample: angle must lie in (0, 1), got {0}")]
    BadAngle(f64),
    #[error("counterexample: n = {0} exceeds the supported maximum {MAX_SHRINKING_STEPS}")]
    TooManySteps(u32),
    #[error("counterexample: {0}-fold power has {1} atoms, expected a single atom")]
    NotSingleAtom(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationRow {
    pub n: usize,
    /// The single atom `nα mod 1`.
    pub position: f64,
    /// `W(δ_{nα}, h)`.
    pub w1: f64,
    /// Grid-certified upper bound on the same distance.
    pub upper_bound: f64,
}

/// `W(μ^{*n}, h)` for `μ = δ_α` on the circle, `n = 1..=n_max`.
pub fn dirac_rotation(alpha: f64, n_max: usize, grid_n: usize) -> Result<Vec<RotationRow>, CounterexampleError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CounterexampleError::BadAngle(alpha));
    }
    let t = Group::torus(1).expect("circle");
    let mu = AtomicMeasure::dirac(t.clone(), Element::Point(vec![alpha]))?;
    let mut power = mu.clone();
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        if n > 1 {
            power = convolve(&mu, &power)?;
        }
        if power.len() != 1 {
            return Err(CounterexampleError::NotSingleAtom(n, power.len()));
        }
        let x = &power.atoms()[0].0;
        rows.push(RotationRow {
            n,
            position: x.point().expect("torus point")[0],
            w1: dirac_to_haar(&t, x)?,
            upper_bound: w1_haar_upper_bound_torus(&power, grid_n)?,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShrinkingRow {
    pub n: u32,
    /// Largest coefficient `K` (atom `α·K/2^n`) reachable, computed exactly.
    pub max_coefficient: u64,
    /// `2^n − 1`, the coefficient of `α(1 − 2^{−n})`.
    pub bound_coefficient: u64,
    /// Number of distinct atoms when the sum-set was enumerated.
    pub enumerated_atoms: Option<u64>,
    /// Largest atom of the float torus convolution, when computed.
    pub float_max_atom: Option<f64>,
    /// `α(1 − 2^{−n})`.
    pub bound: f64,
    pub within_bound: bool,
}

/// Exact support bounds for `μ_n * … * μ_1`, `μ_j = ½δ_0 + ½δ_{α/2^j}`, for `n = 1..=n_max`.
///
/// In units of `α/2^n` step j contributes 0 or `2^{n−j}`. The maximum of the
/// sum-set is the sum of the per-step maxima; for `n ≤` [`MAX_ENUMERATED_STEPS`]
/// the whole sum-set is also enumerated, and for `n ≤` [`MAX_FLOAT_STEPS`]
/// the measures are convolved on the torus as a floating-point cross-check.
pub fn shrinking_support(alpha: f64, n_max: u32) -> Result<Vec<ShrinkingRow>, CounterexampleError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CounterexampleError::BadAngle(alpha));
    }
    if n_max > MAX_SHRINKING_STEPS {
        return Err(CounterexampleError::TooManySteps(n_max));
    }
    let t = Group::torus(1).expect("circle");
    let mut product: Option<AtomicMeasure> = None;
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let step_coeffs: Vec<u64> = (1..=n).map(|j| 1u64 << (n - j)).collect();
        let max_coefficient: u64 = step_coeffs.iter().sum();
        let bound_coefficient = (1u64 << n) - 1;
        let enumerated_atoms = (n <= MAX_ENUMERATED_STEPS).then(|| {
            let mut reachable = vec![false; 1usize << n];
            reachable[0] = true;
            let mut top = 0usize;
            for &c in &step_coeffs {
                let c = c as usize;
                for k in (0..=top).rev() {
                    if reachable[k] {
                        reachable[k + c] = true;
                    }
                }
                top += c;
            }
            debug_assert_eq!(top as u64, max_coefficient);
            reachable.iter().filter(|&&r| r).count() as u64
        });
        let float_max_atom = if n <= MAX_FLOAT_STEPS {
            let step = AtomicMeasure::probability(
                t.clone(),
                vec![(Element::Point(vec![0.0]), 1.0), (Element::Point(vec![alpha / (1u64 << n) as f64]), 1.0)],
            )?;
            let next = match &product {
                Some(p) => convolve(&step, p)?,
                None => step,
            };
            let max = next.atoms().iter().map(|(x, _)| x.point().expect("torus point")[0]).fold(0.0, f64::max);
            product = Some(next);
            Some(max)
        } else {
            None
        };
        rows.push(ShrinkingRow {
            n,
            max_coefficient,
            bound_coefficient,
            enumerated_atoms,
            float_max_atom,
            bound: alpha * (1.0 - (-(n as f64)).exp2()),
            within_bound: max_coefficient <= bound_coefficient,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: f64 = 0.618_033_988_749_894_9;

    #[test]
    fn rotation_distance_is_constant() {
        let rows = dirac_rotation(GOLDEN, 40, 64).unwrap();
        assert_eq!(rows.len(), 40);
        for row in &rows {
            assert_eq!(row.w1, 0.25);
            assert!(row.upper_bound >= row.w1 && row.upper_bound <= 0.25 + 2.0 / 64.0 + 1e-12);
            let expect = (row.n as f64 * GOLDEN).rem_euclid(1.0);
            let d = (row.position - expect).abs();
            assert!(d.min(1.0 - d) < 1e-12);
        }
        assert!(dirac_rotation(1.5, 3, 10).is_err());
    }

    #[test]
    fn shrinking_support_stays_below_alpha() {
        let rows = shrinking_support(GOLDEN, 16).unwrap();
        for row in &rows {
            assert!(row.within_bound);
            assert_eq!(row.max_coefficient, row.bound_coefficient);
            assert_eq!(row.enumerated_atoms, Some(1u64 << row.n));
            if let Some(m) = row.float_max_atom {
                assert!(m < GOLDEN);
                assert!((m - row.bound).abs() < 1e-12);
            }
        }
        assert!(shrinking_support(GOLDEN, 63).is_err());
    }
}
