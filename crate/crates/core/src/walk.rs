//! Nonstationary walks: schedules, observables, Birkhoff averages, exact
//! push-forwards and large-deviation tail estimates.
//!
//! A trajectory is `x_k = x_0 + α_1 + … + α_k` with independent `α_j ~ μ_j`,
//! and its Birkhoff average is `(1/n) Σ_{k<n} φ(x_k)`. Trial `i` draws from
//! [`trial_stream`]`(seed, i)`, so reports do not depend on thread count or
//! execution order.

use std::f64::consts::PI;
use std::time::Instant;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::group::{Element, Group, GroupError};
use crate::measure::{convolve_capped, AtomicMeasure, MeasureError, DEFAULT_ATOM_CAP};
use crate::rng::{indexed_choice, trial_stream};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;
/// Largest quadrature grid for torus bump integrals.
const MAX_QUADRATURE_POINTS: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("walk: invalid schedule ({0})")]
    BadSchedule(String),
    #[error("walk: observable does not fit the group ({0})")]
    BadObservable(String),
    #[error("walk: step law {0} is not atomic, exact push-forward unavailable")]
    NotAtomic(usize),
    #[error("walk: n must be at least 1")]
    ZeroSteps,
    #[error("walk: tail estimation needs at least 100 trials, got {0}")]
    TooFewTrials(usize),
    #[error("walk: n_grid must be nonempty and strictly increasing with entries >= 1")]
    BadGrid,
}

/// A step law that can be sampled.
#[derive(Clone, Debug)]
pub enum StepLaw {
    Atomic { measure: AtomicMeasure, index: WeightedIndex<f64> },
    Haar(Group),
}

impl StepLaw {
    pub fn atomic(measure: AtomicMeasure) -> Result<Self, WalkError> {
        measure.require_probability()?;
        let index = WeightedIndex::new(measure.atoms().iter().map(|(_, w)| *w))
            .map_err(|e| WalkError::BadSchedule(e.to_string()))?;
        Ok(StepLaw::Atomic { measure, index })
    }

    pub fn group(&self) -> &Group {
        match self {
            StepLaw::Atomic { measure, .. } => measure.group(),
            StepLaw::Haar(g) => g,
        }
    }

    pub fn as_atomic(&self) -> Option<&AtomicMeasure> {
        match self {
            StepLaw::Atomic { measure, .. } => Some(measure),
            StepLaw::Haar(_) => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        match self {
            StepLaw::Atomic { measure, index } => measure.atoms()[index.sample(rng)].0.clone(),
            StepLaw::Haar(g) => g.haar_sample(rng),
        }
    }
}

/// Which family member is used at time `n ≥ 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleRule {
    /// Listed indices for `n = 1, 2, …`; the last index repeats afterwards.
    Explicit(Vec<usize>),
    /// The pattern repeated forever.
    Cyclic(Vec<usize>),
    /// Independent uniform choices, fixed by the seed.
    SeededChoice(u64),
}

#[derive(Clone, Debug)]
pub struct WalkSchedule {
    laws: Vec<StepLaw>,
    rule: ScheduleRule,
}

impl WalkSchedule {
    pub fn new(laws: Vec<StepLaw>, rule: ScheduleRule) -> Result<Self, WalkError> {
        let first = laws.first().ok_or_else(|| WalkError::BadSchedule("empty family".into()))?;
        if laws.iter().any(|l| l.group() != first.group()) {
            return Err(WalkError::BadSchedule("family members live on different groups".into()));
        }
        match &rule {
            ScheduleRule::Explicit(idx) | ScheduleRule::Cyclic(idx) => {
                if idx.is_empty() {
                    return Err(WalkError::BadSchedule("empty index list".into()));
                }
                if let Some(i) = idx.iter().find(|&&i| i >= laws.len()) {
                    return Err(WalkError::BadSchedule(format!("index {i} out of range for {} laws", laws.len())));
                }
            }
            ScheduleRule::SeededChoice(_) => {}
        }
        Ok(WalkSchedule { laws, rule })
    }

    /// Constant schedule `μ_n = μ`.
    pub fn constant(mu: AtomicMeasure) -> Result<Self, WalkError> {
        Self::new(vec![StepLaw::atomic(mu)?], ScheduleRule::Cyclic(vec![0]))
    }

    pub fn group(&self) -> &Group {
        self.laws[0].group()
    }

    pub fn laws(&self) -> &[StepLaw] {
        &self.laws
    }

    pub fn rule(&self) -> &ScheduleRule {
        &self.rule
    }

    /// Family index used at time `n ≥ 1`.
    pub fn index(&self, n: usize) -> usize {
        assert!(n >= 1, "schedule times start at 1");
        match &self.rule {
            ScheduleRule::Explicit(idx) => idx[(n - 1).min(idx.len() - 1)],
            ScheduleRule::Cyclic(idx) => idx[(n - 1) % idx.len()],
            ScheduleRule::SeededChoice(seed) => indexed_choice(*seed, n as u64, self.laws.len()),
        }
    }

    pub fn law(&self, n: usize) -> &StepLaw {
        &self.laws[self.index(n)]
    }

    /// Exact step measure at time `n`, if atomic.
    pub fn atomic_step(&self, n: usize) -> Result<&AtomicMeasure, WalkError> {
        let i = self.index(n);
        self.laws[i].as_atomic().ok_or(WalkError::NotAtomic(i))
    }
}

/// Real-valued continuous test function.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// `cos(2π Σ k_i x_i / m_i)` on finite groups, `cos(2π k·x)` on the torus.
    Character(Vec<i64>),
    /// Values at every element of a finite group, in enumeration order.
    Table(Vec<f64>),
    /// `max(0, 1 − d(x, center) / width)`, Lipschitz with constant `1 / width`.
    Bump { center: Element, width: f64 },
}

impl Observable {
    pub fn validate(&self, g: &Group) -> Result<(), WalkError> {
        match self {
            Observable::Character(k) => {
                let want = if g.is_torus() { g.rank() } else { g.cyclic_moduli().map_or(0, |m| m.len()) };
                if k.len() != want {
                    return Err(WalkError::BadObservable(format!("character needs {want} frequencies, got {}", k.len())));
                }
            }
            Observable::Table(v) => {
                let order = g.order().ok_or_else(|| WalkError::BadObservable("tables need a finite group".into()))?;
                if v.len() as u64 != order {
                    return Err(WalkError::BadObservable(format!("table has {} values for {order} elements", v.len())));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(WalkError::BadObservable("table values must be finite".into()));
                }
            }
            Observable::Bump { center, width } => {
                g.check(center)?;
                if !(width.is_finite() && *width > 0.0) {
                    return Err(WalkError::BadObservable(format!("bump width must be positive, got {width}")));
                }
            }
        }
        Ok(())
    }

    /// Evaluate at `x`; the observable must have been validated for `g`.
    pub fn eval(&self, g: &Group, x: &Element) -> f64 {
        match self {
            Observable::Character(k) => (2.0 * PI * phase(g, k, x)).cos(),
            Observable::Table(v) => v[g.index_of(x)],
            Observable::Bump { center, width } => (1.0 - g.metric_unchecked(x, center) / width).max(0.0),
        }
    }

    /// `sup |φ|`.
    pub fn sup_norm(&self) -> f64 {
        match self {
            Observable::Character(_) | Observable::Bump { .. } => 1.0,
            Observable::Table(v) => v.iter().fold(0.0, |a, x| a.max(x.abs())),
        }
    }
}

/// Fractional phase `Σ k_i x_i / m_i` reduced to `[0, 1)`.
fn phase(g: &Group, k: &[i64], x: &Element) -> f64 {
    match x {
        Element::Point(p) => k.iter().zip(p).map(|(&ki, &xi)| ki as f64 * xi).sum::<f64>().rem_euclid(1.0),
        Element::Residues(r) => {
            let moduli = g.cyclic_moduli().expect("finite group");
            k.iter()
                .zip(r)
                .zip(&moduli)
                .map(|((&ki, &xi), &m)| {
                    let num = (ki.rem_euclid(m as i64) as u128 * xi as u128) % m as u128;
                    num as f64 / m as f64
                })
                .sum::<f64>()
                .rem_euclid(1.0)
        }
    }
}

/// `∫ φ dh`.
pub fn haar_integral(phi: &Observable, g: &Group) -> Result<f64, WalkError> {
    haar_integral_with_error(phi, g).map(|(v, _)| v)
}

/// `∫ φ dh` and an absolute error bound (0 where exact).
///
/// Characters use orthogonality, finite groups sum exactly, torus bumps use
/// the midpoint rule on a grid of side `h` with error at most `L·h/2`.
pub fn haar_integral_with_error(phi: &Observable, g: &Group) -> Result<(f64, f64), WalkError> {
    phi.validate(g)?;
    match phi {
        Observable::Character(k) => {
            let trivial = match g.cyclic_moduli() {
                Some(m) if !g.is_torus() => k.iter().zip(&m).all(|(&ki, &mi)| ki.rem_euclid(mi as i64) == 0),
                _ => k.iter().all(|&ki| ki == 0),
            };
            Ok((if trivial { 1.0 } else { 0.0 }, 0.0))
        }
        Observable::Table(v) => Ok((v.iter().sum::<f64>() / v.len() as f64, 0.0)),
        Observable::Bump { width, .. } if g.is_torus() => {
            let dim = g.rank() as u32;
            let n = ((MAX_QUADRATURE_POINTS as f64).powf(1.0 / dim as f64).floor() as usize).max(1);
            let h = 1.0 / n as f64;
            let points = n.pow(dim);
            let mut sum = 0.0;
            let mut coords = vec![0.0; dim as usize];
            for mut idx in 0..points {
                for c in coords.iter_mut().rev() {
                    *c = ((idx % n) as f64 + 0.5) * h;
                    idx /= n;
                }
                sum += phi.eval(g, &Element::Point(coords.clone()));
            }
            Ok((sum / points as f64, h / (2.0 * width)))
        }
        Observable::Bump { .. } => {
            let els = g.elements()?;
            Ok((els.iter().map(|x| phi.eval(g, x)).sum::<f64>() / els.len() as f64, 0.0))
        }
    }
}

/// Result of one simulated trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct TrialReport {
    pub seed: u64,
    pub trial: u64,
    pub n: usize,
    pub birkhoff: f64,
    pub haar_integral: f64,
    pub deviation: f64,
    /// Seconds; excluded from equality so reports compare by content.
    pub wall_time: f64,
}

impl PartialEq for TrialReport {
    fn eq(&self, o: &Self) -> bool {
        self.seed == o.seed
            && self.trial == o.trial
            && self.n == o.n
            && self.birkhoff.to_bits() == o.birkhoff.to_bits()
            && self.haar_integral.to_bits() == o.haar_integral.to_bits()
            && self.deviation.to_bits() == o.deviation.to_bits()
    }
}

fn check_walk(sched: &WalkSchedule, phi: &Observable, x0: &Element) -> Result<(), WalkError> {
    let g = sched.group();
    g.check(x0)?;
    phi.validate(g)
}

/// Birkhoff averages `(1/n) Σ_{k<n} φ(x_k)` for every `n` in the increasing grid, along one trajectory.
pub fn birkhoff_prefixes(
    sched: &WalkSchedule,
    phi: &Observable,
    x0: &Element,
    n_grid: &[usize],
    root_seed: u64,
    trial: u64,
) -> Result<Vec<f64>, WalkError> {
    check_walk(sched, phi, x0)?;
    if n_grid.is_empty() || n_grid[0] == 0 || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(WalkError::BadGrid);
    }
    Ok(prefixes_unchecked(sched, phi, x0, n_grid, root_seed, trial))
}

fn prefixes_unchecked(
    sched: &WalkSchedule,
    phi: &Observable,
    x0: &Element,
    n_grid: &[usize],
    root_seed: u64,
    trial: u64,
) -> Vec<f64> {
    let g = sched.group();
    let mut rng = trial_stream(root_seed, trial);
    let mut x = x0.clone();
    let mut sum = phi.eval(g, &x);
    let mut out = Vec::with_capacity(n_grid.len());
    let mut k = 1;
    for &n in n_grid {
        while k < n {
            let a = sched.law(k).sample(&mut rng);
            x = g.add_unchecked(&x, &a);
            sum += phi.eval(g, &x);
            k += 1;
        }
        out.push(sum / n as f64);
    }
    out
}

/// One trajectory of length `n`, drawn from trial stream `trial` of `root_seed`.
pub fn simulate_birkhoff(
    sched: &WalkSchedule,
    phi: &Observable,
    x0: &Element,
    n: usize,
    root_seed: u64,
    trial: u64,
) -> Result<TrialReport, WalkError> {
    if n == 0 {
        return Err(WalkError::ZeroSteps);
    }
    check_walk(sched, phi, x0)?;
    let integral = haar_integral(phi, sched.group())?;
    Ok(trial_unchecked(sched, phi, x0, n, root_seed, trial, integral))
}

fn trial_unchecked(
    sched: &WalkSchedule,
    phi: &Observable,
    x0: &Element,
    n: usize,
    root_seed: u64,
    trial: u64,
    integral: f64,
) -> TrialReport {
    let start = Instant::now();
    let birkhoff = prefixes_unchecked(sched, phi, x0, &[n], root_seed, trial)[0];
    TrialReport {
        seed: root_seed,
        trial,
        n,
        birkhoff,
        haar_integral: integral,
        deviation: (birkhoff - integral).abs(),
        wall_time: start.elapsed().as_secs_f64(),
    }
}

/// Trials `0..trials` in parallel on the current rayon pool, returned in trial order.
pub fn simulate_trials(
    sched: &WalkSchedule,
    phi: &Observable,
    x0: &Element,
    n: usize,
    root_seed: u64,
    trials: u64,
) -> Result<Vec<TrialReport>, WalkError> {
    if n == 0 {
        return Err(WalkError::ZeroSteps);
    }
    check_walk(sched, phi, x0)?;
    let integral = haar_integral(phi, sched.group())?;
    Ok((0..trials)
        .into_par_iter()
        .map(|t| trial_unchecked(sched, phi, x0, n, root_seed, t, integral))
        .collect())
}

/// Exact `ν_1, …, ν_n` with `ν_k = μ_k * ν_{k−1}`.
pub fn distribution_pushforward(
    sched: &WalkSchedule,
    nu0: &AtomicMeasure,
    n: usize,
) -> Result<Vec<AtomicMeasure>, WalkError> {
    distribution_pushforward_capped(sched, nu0, n, DEFAULT_ATOM_CAP)
}

pub fn distribution_pushforward_capped(
    sched: &WalkSchedule,
    nu0: &AtomicMeasure,
    n: usize,
    cap: usize,
) -> Result<Vec<AtomicMeasure>, WalkError> {
    if nu0.group() != sched.group() {
        return Err(MeasureError::GroupMismatch { left: nu0.group().to_string(), right: sched.group().to_string() }.into());
    }
    let mut out: Vec<AtomicMeasure> = Vec::with_capacity(n);
    for k in 1..=n {
        let prev = out.last().unwrap_or(nu0);
        let next = convolve_capped(sched.atomic_step(k)?, prev, cap)?;
        out.push(next);
    }
    Ok(out)
}

/// `(1/n) Σ_{k<n} ∫ φ dν_k` from the exact push-forwards.
pub fn birkhoff_mean_of_integrals(
    sched: &WalkSchedule,
    nu0: &AtomicMeasure,
    phi: &Observable,
    n: usize,
) -> Result<f64, WalkError> {
    if n == 0 {
        return Err(WalkError::ZeroSteps);
    }
    let g = sched.group();
    phi.validate(g)?;
    let integrate = |nu: &AtomicMeasure| nu.atoms().iter().map(|(x, w)| w * phi.eval(g, x)).sum::<f64>();
    let pushed = distribution_pushforward(sched, nu0, n - 1)?;
    let total = integrate(nu0) + pushed.iter().map(integrate).sum::<f64>();
    Ok(total / n as f64)
}

/// Wilson score interval at 95% for `k` successes in `t` trials.
pub fn wilson_interval(k: u64, t: u64) -> (f64, f64) {
    let t = t as f64;
    let p = k as f64 / t;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / t;
    let center = (p + z2 / (2.0 * t)) / denom;
    let half = Z95 * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k as f64 == t { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailRow {
    pub n: usize,
    pub exceed: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FitOutcome {
    /// `log p̂_n ≈ intercept + slope·n`; standard errors are scaled by `max(1, χ²_red)^{1/2}`.
    Fitted { slope: f64, slope_se: f64, intercept: f64, intercept_se: f64, reduced_chi2: f64, points: usize },
    /// Fewer than three grid points with `p̂_n > 0`.
    TooFewPoints { points: usize },
    /// Every `p̂_n` is 0: the tail is below the resolution of this many trials.
    BelowResolution,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailReport {
    pub epsilon: f64,
    pub trials: u64,
    pub seed: u64,
    pub haar_integral: f64,
    pub rows: Vec<TailRow>,
    pub fit: FitOutcome,
}

impl TailReport {
    /// Estimated decay rate `δ̂ = −slope` and its standard error.
    pub fn rate(&self) -> Option<(f64, f64)> {
        match self.fit {
            FitOutcome::Fitted { slope, slope_se, .. } => Some((-slope, slope_se)),
            _ => None,
        }
    }
}

/// Estimate `P(|Birkhoff_n − ∫φ dh| > ε)` for each `n` in the grid and fit its exponential decay.
///
/// Each trial is one trajectory observed at every grid point.
pub fn ld_tail_estimate(
    sched: &WalkSchedule,
    phi: &Observable,
    x0: &Element,
    eps: f64,
    n_grid: &[usize],
    trials: u64,
    seed: u64,
) -> Result<TailReport, WalkError> {
    if trials < 100 {
        return Err(WalkError::TooFewTrials(trials as usize));
    }
    check_walk(sched, phi, x0)?;
    if n_grid.is_empty() || n_grid[0] == 0 || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(WalkError::BadGrid);
    }
    let integral = haar_integral(phi, sched.group())?;
    let counts = (0..trials)
        .into_par_iter()
        .map(|t| {
            prefixes_unchecked(sched, phi, x0, n_grid, seed, t)
                .into_iter()
                .map(|b| u64::from((b - integral).abs() > eps))
                .collect::<Vec<u64>>()
        })
        .reduce(|| vec![0; n_grid.len()], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    let rows: Vec<TailRow> = n_grid
        .iter()
        .zip(&counts)
        .map(|(&n, &k)| {
            let (ci_lo, ci_hi) = wilson_interval(k, trials);
            TailRow { n, exceed: k, p_hat: k as f64 / trials as f64, ci_lo, ci_hi }
        })
        .collect();
    let fit = fit_log_tail(&rows, trials);
    Ok(TailReport { epsilon: eps, trials, seed, haar_integral: integral, rows, fit })
}

/// Weighted least squares of `log p̂` on `n` with delta-method variances `(1 − p)/(T p)`.
pub fn fit_log_tail(rows: &[TailRow], trials: u64) -> FitOutcome {
    let t = trials as f64;
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter(|r| r.p_hat > 0.0)
        .map(|r| {
            let var = ((1.0 - r.p_hat) / (t * r.p_hat)).max(1.0 / (t * t));
            (r.n as f64, r.p_hat.ln(), 1.0 / var)
        })
        .collect();
    if pts.is_empty() {
        return FitOutcome::BelowResolution;
    }
    if pts.len() < 3 {
        return FitOutcome::TooFewPoints { points: pts.len() };
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let sx: f64 = pts.iter().map(|p| p.2 * p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.2 * p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.2 * p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * p.0 * p.1).sum();
    let det = sw * sxx - sx * sx;
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let chi2: f64 = pts.iter().map(|p| p.2 * (p.1 - intercept - slope * p.0).powi(2)).sum();
    let reduced_chi2 = chi2 / (pts.len() - 2) as f64;
    let scale = reduced_chi2.max(1.0);
    FitOutcome::Fitted {
        slope,
        slope_se: (scale * sw / det).sqrt(),
        intercept,
        intercept_se: (scale * sxx / det).sqrt(),
        reduced_chi2,
        points: pts.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: u64) -> Element {
        Element::Residues(vec![v])
    }

    fn z(m: u64) -> Group {
        Group::cyclic(m).unwrap()
    }

    fn lazy(g: &Group) -> AtomicMeasure {
        AtomicMeasure::probability(g.clone(), vec![(g.zero(), 1.0), (g.element_from_ints(&[1]).unwrap(), 1.0)]).unwrap()
    }

    #[test]
    fn schedule_rules() {
        let g = z(3);
        let laws: Vec<StepLaw> = (0..3)
            .map(|i| StepLaw::atomic(AtomicMeasure::dirac(g.clone(), r(i)).unwrap()).unwrap())
            .collect();
        let s = WalkSchedule::new(laws.clone(), ScheduleRule::Explicit(vec![2, 0])).unwrap();
        assert_eq!((1..=5).map(|n| s.index(n)).collect::<Vec<_>>(), vec![2, 0, 0, 0, 0]);
        let s = WalkSchedule::new(laws.clone(), ScheduleRule::Cyclic(vec![1, 2])).unwrap();
        assert_eq!((1..=5).map(|n| s.index(n)).collect::<Vec<_>>(), vec![1, 2, 1, 2, 1]);
        let s = WalkSchedule::new(laws.clone(), ScheduleRule::SeededChoice(9)).unwrap();
        assert!((1..=1000).all(|n| s.index(n) < 3));
        assert!(WalkSchedule::new(laws.clone(), ScheduleRule::Cyclic(vec![3])).is_err());
        assert!(WalkSchedule::new(laws, ScheduleRule::Explicit(vec![])).is_err());
    }

    #[test]
    fn haar_integral_examples() {
        let g = z(4);
        assert_eq!(haar_integral(&Observable::Character(vec![1]), &g).unwrap(), 0.0);
        assert_eq!(haar_integral(&Observable::Character(vec![0]), &g).unwrap(), 1.0);
        assert_eq!(haar_integral(&Observable::Character(vec![4]), &g).unwrap(), 1.0);
        assert_eq!(haar_integral(&Observable::Table(vec![1.0, 2.0, 3.0, 4.0]), &g).unwrap(), 2.5);
        assert!(haar_integral(&Observable::Table(vec![1.0]), &g).is_err());
        let t = Group::torus(1).unwrap();
        assert_eq!(haar_integral(&Observable::Character(vec![3]), &t).unwrap(), 0.0);
    }

    #[test]
    fn torus_bump_quadrature_matches_closed_form() {
        // Sup-metric bump of width w ≤ ½ integrates to (2w)^d / (d + 1).
        for (dim, w) in [(1usize, 0.2), (2, 0.3), (1, 0.5)] {
            let t = Group::torus(dim).unwrap();
            let phi = Observable::Bump { center: Element::Point(vec![0.1; dim]), width: w };
            let (v, err) = haar_integral_with_error(&phi, &t).unwrap();
            let exact = (2.0 * w).powi(dim as i32) / (dim as f64 + 1.0);
            assert!((v - exact).abs() <= err, "dim {dim}: {v} vs {exact} (err {err})");
            assert!(err < 1e-2);
        }
    }

    #[test]
    fn character_values() {
        let g = z(2);
        let phi = Observable::Character(vec![1]);
        assert_eq!(phi.eval(&g, &r(0)), 1.0);
        assert_eq!(phi.eval(&g, &r(1)), -1.0);
        let t = Group::torus(1).unwrap();
        assert!((phi.eval(&t, &Element::Point(vec![0.25]))).abs() < 1e-15);
    }

    #[test]
    fn dirac_zero_schedule_stays_put() {
        let g = z(5);
        let s = WalkSchedule::constant(AtomicMeasure::dirac(g.clone(), r(0)).unwrap()).unwrap();
        let phi = Observable::Table(vec![0.5, 1.0, 2.0, 3.0, 4.0]);
        for n in [1, 10, 1000] {
            let rep = simulate_birkhoff(&s, &phi, &r(3), n, 1, 0).unwrap();
            assert_eq!(rep.birkhoff, 3.0);
        }
        assert!(matches!(simulate_birkhoff(&s, &phi, &r(3), 0, 1, 0), Err(WalkError::ZeroSteps)));
    }

    #[test]
    fn simulation_is_deterministic() {
        let g = z(8);
        let s = WalkSchedule::constant(lazy(&g)).unwrap();
        let phi = Observable::Character(vec![1]);
        let a = simulate_trials(&s, &phi, &r(0), 500, 77, 8).unwrap();
        let b = simulate_trials(&s, &phi, &r(0), 500, 77, 8).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[3], simulate_birkhoff(&s, &phi, &r(0), 500, 77, 3).unwrap());
        assert_ne!(a[0].birkhoff, a[1].birkhoff);
    }

    #[test]
    fn pushforward_examples() {
        let g = z(4);
        let s = WalkSchedule::constant(lazy(&g)).unwrap();
        let d0 = AtomicMeasure::dirac(g.clone(), r(0)).unwrap();
        assert!(distribution_pushforward(&s, &d0, 0).unwrap().is_empty());
        let nus = distribution_pushforward(&s, &d0, 2).unwrap();
        let w: Vec<f64> = (0..4).map(|i| nus[1].weight_of(&r(i))).collect();
        assert_eq!(w, vec![0.25, 0.5, 0.25, 0.0]);
        let h = AtomicMeasure::uniform(g.clone()).unwrap();
        for nu in distribution_pushforward(&s, &h, 5).unwrap() {
            for (_, w) in nu.atoms() {
                assert!((w - 0.25).abs() < 1e-15);
            }
        }
        let haar = WalkSchedule::new(vec![StepLaw::Haar(g)], ScheduleRule::Cyclic(vec![0])).unwrap();
        assert!(matches!(distribution_pushforward(&haar, &d0, 1), Err(WalkError::NotAtomic(0))));
    }

    #[test]
    fn mean_of_integrals() {
        let g = z(6);
        let phi = Observable::Table(vec![1.0, 0.0, 2.0, 5.0, 0.0, 1.0]);
        let s = WalkSchedule::constant(lazy(&g)).unwrap();
        let h = AtomicMeasure::uniform(g.clone()).unwrap();
        let v = birkhoff_mean_of_integrals(&s, &h, &phi, 7).unwrap();
        assert!((v - 1.5).abs() < 1e-14);
        let still = WalkSchedule::constant(AtomicMeasure::dirac(g.clone(), r(0)).unwrap()).unwrap();
        let d = AtomicMeasure::dirac(g.clone(), r(3)).unwrap();
        assert_eq!(birkhoff_mean_of_integrals(&still, &d, &phi, 9).unwrap(), 5.0);
        let devs: Vec<f64> = [10, 100, 1000]
            .iter()
            .map(|&n| (birkhoff_mean_of_integrals(&s, &d, &phi, n).unwrap() - 1.5).abs())
            .collect();
        assert!(devs[0] > devs[1] && devs[1] > devs[2], "{devs:?}");
    }

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(30, 1000);
        assert!(lo < 0.03 && 0.03 < hi);
        let (lo, hi) = wilson_interval(0, 1000);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.005);
    }

    #[test]
    fn fit_recovers_exact_exponential() {
        let rows: Vec<TailRow> = [10usize, 20, 30, 40]
            .iter()
            .map(|&n| {
                let p = 0.8 * (-0.05 * n as f64).exp();
                TailRow { n, exceed: 0, p_hat: p, ci_lo: p, ci_hi: p }
            })
            .collect();
        match fit_log_tail(&rows, 100_000) {
            FitOutcome::Fitted { slope, intercept, .. } => {
                assert!((slope + 0.05).abs() < 1e-12);
                assert!((intercept - 0.8f64.ln()).abs() < 1e-10);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(fit_log_tail(&rows[..2], 100), FitOutcome::TooFewPoints { points: 2 });
    }

    #[test]
    fn tail_below_resolution_when_eps_is_huge() {
        let g = z(2);
        let s = WalkSchedule::constant(lazy(&g)).unwrap();
        let phi = Observable::Character(vec![1]);
        let rep = ld_tail_estimate(&s, &phi, &r(0), 2.0, &[5, 10], 200, 3).unwrap();
        assert!(rep.rows.iter().all(|row| row.p_hat == 0.0));
        assert_eq!(rep.fit, FitOutcome::BelowResolution);
        assert!(matches!(ld_tail_estimate(&s, &phi, &r(0), 0.1, &[5, 10], 99, 3), Err(WalkError::TooFewTrials(99))));
        assert!(matches!(ld_tail_estimate(&s, &phi, &r(0), 0.1, &[10, 5], 100, 3), Err(WalkError::BadGrid)));
    }
}
