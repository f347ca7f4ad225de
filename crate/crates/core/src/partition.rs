//! ε-wide partitions, the wide-set mass bound, the `ν = ν₀ + ν₁`
//! decomposition and the contraction certificate built from them.
//!
//! A set `Q` is ε-wide when it sits inside a ball of radius ε and contains a
//! ball of radius ε/3. Cells here are certified with the open outer ball
//! `B(c, ε)` and the closed inner ball `B̄(c, ε/3)`.
//!
//! The certificate runs the mass-extraction argument on a concrete schedule:
//! every window of `m` steps pushes any measure to one that gives each
//! ε-wide cell at least a δ share of its Haar mass, so a δ fraction of the
//! remaining mass can be matched to Haar measure cell by cell. After `r`
//! rounds the unmatched mass is `(1 − δ)^r < ε`.

use serde::Serialize;
use thiserror::Error;

use crate::aperiodicity::{generated_subgroup, AperiodicityError};
use crate::group::{Element, Group, GroupError};
use crate::measure::{convolve, convolve_sequence, support, total_variation, AtomicMeasure, MeasureError};
use crate::wasserstein::{w1_to_haar, WassersteinError};

/// Largest number of torus boxes a partition may have.
pub const MAX_TORUS_CELLS: usize = 1 << 18;
/// Largest torus grid used by [`wide_set_mass_lower_bound`].
const MAX_MASS_GRID: usize = 4_000_000;
/// Cells with more members than this get the bound `2 · max d(x, c)` instead of an exact diameter.
const EXACT_DIAMETER_LIMIT: usize = 2048;
/// Relative slack for the δ-admissibility check in [`decompose`].
const RATIO_TOL: f64 = 1e-12;
/// Windows inspected per candidate length before ranking candidates.
const PROBE_WINDOWS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Wasserstein(#[from] WassersteinError),
    #[error(transparent)]
    Aperiodicity(#[from] AperiodicityError),
    #[error("partition: epsilon must be positive and finite, got {0}")]
    BadEpsilon(f64),
    #[error("partition: epsilon {eps} is below the resolution limit ({cells} cells exceed the cap of {cap})")]
    TooFine { eps: f64, cells: usize, cap: usize },
    #[error("partition: only finite groups and tori are supported, got {0}")]
    Unsupported(String),
    #[error("partition: cell {cell} failed verification: {reason}")]
    Verification { cell: usize, reason: String },
    #[error("partition: wide-set mass hypothesis violated, cell {cell} has zero mass")]
    WideMassViolated { cell: usize },
    #[error("partition: delta {delta} exceeds the admissible maximum {max}")]
    DeltaTooLarge { delta: f64, max: f64 },
    #[error("certificate: wide-set mass stays 0 for every window length up to {m_cap} (first window of length {m_cap} has delta 0)")]
    DeltaStaysZero { m_cap: usize },
    #[error("certificate: steps are confined to cosets of a proper subgroup of order {order} (index {index})")]
    NonAperiodic { order: usize, index: u64 },
    #[error("certificate: schedule has {available} steps but {needed} are required")]
    ScheduleTooShort { needed: usize, available: usize },
    #[error("certificate: delta {delta} needs {rounds} rounds, over the cap of {cap}")]
    RoundsCap { delta: f64, rounds: usize, cap: usize },
}

/// Ball certificates and mass of one cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellCertificate {
    pub outer_center: Element,
    /// Every member is at distance `< outer_radius` from the outer center.
    pub outer_radius: f64,
    pub inner_center: Element,
    /// Every point at distance `≤ inner_radius` from the inner center is a member.
    pub inner_radius: f64,
    pub haar_mass: f64,
    /// Upper bound on the cell diameter (exact for small finite cells).
    pub diameter: f64,
}

#[derive(Clone, Debug, PartialEq)]
enum Cells {
    /// Finite group: cell index of every element (by enumeration index) and the members.
    Assigned { cell_of: Vec<usize>, members: Vec<Vec<Element>> },
    /// Torus: `per_axis^dim` half-open boxes `Π [i_k / per_axis, (i_k + 1) / per_axis)`.
    Boxes { per_axis: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct WideSetPartition {
    group: Group,
    epsilon: f64,
    cells: Cells,
    certificates: Vec<CellCertificate>,
}

impl WideSetPartition {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn len(&self) -> usize {
        self.certificates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.certificates.is_empty()
    }

    pub fn certificates(&self) -> &[CellCertificate] {
        &self.certificates
    }

    pub fn haar_masses(&self) -> Vec<f64> {
        self.certificates.iter().map(|c| c.haar_mass).collect()
    }

    pub fn max_cell_diameter(&self) -> f64 {
        self.certificates.iter().map(|c| c.diameter).fold(0.0, f64::max)
    }

    /// Members of a finite cell; `None` on the torus or out of range.
    pub fn members(&self, cell: usize) -> Option<&[Element]> {
        match &self.cells {
            Cells::Assigned { members, .. } => members.get(cell).map(Vec::as_slice),
            Cells::Boxes { .. } => None,
        }
    }

    /// `[lo, hi)` per coordinate of a torus box; `None` on finite groups.
    pub fn box_bounds(&self, cell: usize) -> Option<Vec<(f64, f64)>> {
        let Cells::Boxes { per_axis } = self.cells else { return None };
        if cell >= self.len() {
            return None;
        }
        let k = per_axis as f64;
        Some(box_digits(cell, per_axis, self.group.rank()).into_iter().map(|i| (i as f64 / k, (i + 1) as f64 / k)).collect())
    }

    pub fn cell_of(&self, x: &Element) -> Result<usize, PartitionError> {
        self.group.check(x)?;
        Ok(self.cell_of_unchecked(x))
    }

    fn cell_of_unchecked(&self, x: &Element) -> usize {
        match &self.cells {
            Cells::Assigned { cell_of, .. } => cell_of[self.group.index_of(x)],
            Cells::Boxes { per_axis } => {
                let k = *per_axis;
                x.point().expect("torus point").iter().fold(0, |acc, &c| {
                    let i = ((c * k as f64).floor() as usize).min(k - 1);
                    acc * k + i
                })
            }
        }
    }

    /// Re-check every cell certificate against the cell contents.
    pub fn verify(&self) -> Result<(), PartitionError> {
        let total: f64 = self.certificates.iter().map(|c| c.haar_mass).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(PartitionError::Verification { cell: 0, reason: format!("haar masses sum to {total}") });
        }
        match &self.cells {
            Cells::Assigned { members, .. } => {
                let g = &self.group;
                let els = g.elements()?;
                for (j, (cert, mem)) in self.certificates.iter().zip(members).enumerate() {
                    if let Some(x) = mem.iter().find(|x| g.metric_unchecked(x, &cert.outer_center) >= cert.outer_radius) {
                        return Err(PartitionError::Verification { cell: j, reason: format!("member {x} outside the outer ball") });
                    }
                    if let Some(y) = els.iter().find(|y| {
                        g.metric_unchecked(y, &cert.inner_center) <= cert.inner_radius && self.cell_of_unchecked(y) != j
                    }) {
                        return Err(PartitionError::Verification { cell: j, reason: format!("inner ball point {y} not in the cell") });
                    }
                }
                Ok(())
            }
            Cells::Boxes { per_axis } => {
                let half = 0.5 / *per_axis as f64;
                for (j, cert) in self.certificates.iter().enumerate() {
                    // Sup-metric radius of the box around its center.
                    let reach = if *per_axis == 1 { self.group.diameter() } else { half };
                    if reach >= cert.outer_radius {
                        return Err(PartitionError::Verification { cell: j, reason: format!("box reach {reach} not inside the outer ball") });
                    }
                    if *per_axis > 1 && cert.inner_radius >= half {
                        return Err(PartitionError::Verification { cell: j, reason: "inner ball leaves the half-open box".into() });
                    }
                }
                Ok(())
            }
        }
    }
}

fn box_digits(mut cell: usize, k: usize, dim: usize) -> Vec<usize> {
    let mut out = vec![0; dim];
    for d in out.iter_mut().rev() {
        *d = cell % k;
        cell /= k;
    }
    out
}

/// Partition the group into ε-wide cells.
///
/// Finite groups: greedy centers pairwise more than `2ε/3` apart (a maximal
/// such set covers the group within `2ε/3`), each point joins its nearest
/// center, ties to the lower center index. When ε exceeds the diameter the
/// whole group is one cell. Inner balls `B̄(c, ε/3)` are then
/// disjoint and each lies in its own cell. Torus: `k^d` half-open boxes with
/// `k = ⌊1/(2ε)⌋ + 1`, so the half side lies in `(ε/3, ε)`.
pub fn vitali_partition(g: &Group, eps: f64) -> Result<WideSetPartition, PartitionError> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(PartitionError::BadEpsilon(eps));
    }
    let p = if g.is_finite() {
        finite_partition(g, eps)?
    } else if g.is_torus() {
        torus_partition(g, eps)?
    } else {
        return Err(PartitionError::Unsupported(g.to_string()));
    };
    p.verify()?;
    Ok(p)
}

fn finite_partition(g: &Group, eps: f64) -> Result<WideSetPartition, PartitionError> {
    let els = g.elements()?;
    let sep = 2.0 * eps / 3.0;
    let mut centers: Vec<Element> = Vec::new();
    if eps > g.diameter() {
        centers.push(g.zero());
    } else {
        for x in &els {
            if centers.iter().all(|c| g.metric_unchecked(x, c) > sep) {
                centers.push(x.clone());
            }
        }
    }
    let mut cell_of = Vec::with_capacity(els.len());
    let mut members = vec![Vec::new(); centers.len()];
    for x in &els {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (j, c) in centers.iter().enumerate() {
            let d = g.metric_unchecked(x, c);
            if d < best_d {
                best = j;
                best_d = d;
            }
        }
        cell_of.push(best);
        members[best].push(x.clone());
    }
    let order = els.len() as f64;
    let certificates = centers
        .iter()
        .zip(&members)
        .map(|(c, mem)| CellCertificate {
            outer_center: c.clone(),
            outer_radius: eps,
            inner_center: c.clone(),
            inner_radius: eps / 3.0,
            haar_mass: mem.len() as f64 / order,
            diameter: cell_diameter(g, c, mem),
        })
        .collect();
    Ok(WideSetPartition { group: g.clone(), epsilon: eps, cells: Cells::Assigned { cell_of, members }, certificates })
}

fn cell_diameter(g: &Group, center: &Element, mem: &[Element]) -> f64 {
    if mem.len() <= EXACT_DIAMETER_LIMIT {
        let mut d: f64 = 0.0;
        for (i, x) in mem.iter().enumerate() {
            for y in &mem[i + 1..] {
                d = d.max(g.metric_unchecked(x, y));
            }
        }
        d
    } else {
        let r = mem.iter().map(|x| g.metric_unchecked(x, center)).fold(0.0, f64::max);
        (2.0 * r).min(g.diameter())
    }
}

fn torus_partition(g: &Group, eps: f64) -> Result<WideSetPartition, PartitionError> {
    let dim = g.rank();
    let k = (1.0 / (2.0 * eps)).floor() as usize + 1;
    let cells = k
        .checked_pow(dim as u32)
        .filter(|&c| c <= MAX_TORUS_CELLS)
        .ok_or(PartitionError::TooFine { eps, cells: usize::MAX, cap: MAX_TORUS_CELLS })?;
    let side = 1.0 / k as f64;
    let mass = side.powi(dim as i32);
    let diameter = side.min(g.diameter());
    let certificates = (0..cells)
        .map(|j| {
            let c = Element::Point(box_digits(j, k, dim).into_iter().map(|i| (i as f64 + 0.5) * side).collect());
            CellCertificate {
                outer_center: c.clone(),
                outer_radius: eps,
                inner_center: c,
                inner_radius: eps / 3.0,
                haar_mass: mass,
                diameter,
            }
        })
        .collect();
    Ok(WideSetPartition { group: g.clone(), epsilon: eps, cells: Cells::Boxes { per_axis: k }, certificates })
}

/// Lower bound δ on the ν-mass of every ε-wide set: `min_x ν(B̄(x, ε/3))`.
///
/// Exact on finite groups. On the torus every ball `B̄(x, ε/3)` contains the
/// ball of radius `ε/3 − s` around the nearest point of a grid of half
/// spacing `s ≤ ε/24`, so the minimum over grid points of those smaller
/// balls is a valid lower bound. A result of 0 is not an error.
pub fn wide_set_mass_lower_bound(nu: &AtomicMeasure, eps: f64) -> Result<f64, PartitionError> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(PartitionError::BadEpsilon(eps));
    }
    let g = nu.group();
    let radius = eps / 3.0;
    if g.is_finite() {
        let els = g.elements()?;
        return Ok(els.iter().map(|x| nu.ball_mass(x, radius)).fold(f64::INFINITY, f64::min));
    }
    if !g.is_torus() {
        return Err(PartitionError::Unsupported(g.to_string()));
    }
    let dim = g.rank();
    let n = (12.0 / eps).ceil() as usize;
    let points = n
        .checked_pow(dim as u32)
        .filter(|&p| p <= MAX_MASS_GRID)
        .ok_or(PartitionError::TooFine { eps, cells: usize::MAX, cap: MAX_MASS_GRID })?;
    let shrunk = radius - 0.5 / n as f64;
    let mut best = f64::INFINITY;
    for idx in 0..points {
        let x = Element::Point(box_digits(idx, n, dim).into_iter().map(|i| i as f64 / n as f64).collect());
        best = best.min(nu.ball_mass(&x, shrunk));
        if best == 0.0 {
            break;
        }
    }
    Ok(best)
}

/// Output of [`decompose`].
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    /// The remainder `ν − ν₁`.
    pub nu0: AtomicMeasure,
    /// The extracted part, with `ν₁(Q_j) = δ·h(Q_j)` in every cell.
    pub nu1: AtomicMeasure,
    pub delta: f64,
    /// `(ν₁(Q_j), δ·h(Q_j))` per cell.
    pub cell_masses: Vec<(f64, f64)>,
    /// Bound on `W(ν₁, δ·h)`: pairing `ν₁` and `δ·h` inside each cell moves mass at most the cell diameter.
    pub coupling_bound: f64,
}

/// Split `ν = ν₀ + ν₁` where `ν₁` has density `δ h(Q_j) / ν(Q_j)` against ν on cell `Q_j`.
///
/// `δ` is an absolute mass and must satisfy `δ ≤ min_j ν(Q_j) / h(Q_j)`.
pub fn decompose(nu: &AtomicMeasure, p: &WideSetPartition, delta: f64) -> Result<Decomposition, PartitionError> {
    nu.same_group(&AtomicMeasure::zero(p.group().clone()))?;
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(PartitionError::DeltaTooLarge { delta, max: f64::NAN });
    }
    let mut cell_mass = vec![0.0; p.len()];
    let cells: Vec<usize> = nu.atoms().iter().map(|(x, _)| p.cell_of_unchecked(x)).collect();
    for ((_, w), &j) in nu.atoms().iter().zip(&cells) {
        cell_mass[j] += w;
    }
    let haar = p.haar_masses();
    if let Some(j) = cell_mass.iter().position(|&m| m <= 0.0) {
        return Err(PartitionError::WideMassViolated { cell: j });
    }
    let max = cell_mass.iter().zip(&haar).map(|(m, h)| m / h).fold(f64::INFINITY, f64::min);
    if delta > max * (1.0 + RATIO_TOL) {
        return Err(PartitionError::DeltaTooLarge { delta, max });
    }
    let factor: Vec<f64> = cell_mass.iter().zip(&haar).map(|(m, h)| (delta * h / m).min(1.0)).collect();
    let mut a0 = Vec::with_capacity(nu.len());
    let mut a1 = Vec::with_capacity(nu.len());
    let mut extracted = vec![0.0; p.len()];
    for ((x, w), &j) in nu.atoms().iter().zip(&cells) {
        let e = w * factor[j];
        extracted[j] += e;
        a1.push((x.clone(), e));
        a0.push((x.clone(), w - e));
    }
    let g = nu.group().clone();
    let cell_masses = extracted.into_iter().zip(&haar).map(|(e, h)| (e, delta * h)).collect();
    Ok(Decomposition {
        nu0: AtomicMeasure::from_merged(g.clone(), a0),
        nu1: AtomicMeasure::from_merged(g, a1),
        delta,
        cell_masses,
        coupling_bound: delta * p.max_cell_diameter(),
    })
}

/// Limits for [`contraction_certificate`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CertificateOptions {
    /// Largest window length tried.
    pub m_cap: usize,
    /// Largest number of extraction rounds.
    pub rounds_cap: usize,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions { m_cap: 64, rounds_cap: 100_000 }
    }
}

/// One extraction round.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    /// Steps `(stage − 1)·m + 1 ..= stage·m`.
    pub first_step: usize,
    /// `wide_set_mass_lower_bound` of this window's convolution alone.
    pub window_delta: f64,
    pub extracted: f64,
    pub residual: f64,
    pub residual_expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionCertificate {
    pub m: usize,
    pub r: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub diameter: f64,
    pub cells: usize,
    pub max_cell_diameter: f64,
    /// Measured residual mass after `j = 0..=r` rounds.
    pub residual_masses: Vec<f64>,
    /// `(Diam + 1)·ε`.
    pub nominal_bound: f64,
    /// `ρ·Diam + (1 − ρ)·max_cell_diameter` with `ρ = (1 − δ)^r`.
    pub structural_bound: f64,
    /// `W(final, h)` for the exact distribution after `m·r` steps.
    pub final_w1: f64,
    /// Total variation between the reassembled pieces and the directly convolved final distribution.
    pub reassembly_error: f64,
    pub stages: Vec<StageRecord>,
}

impl ContractionCertificate {
    /// `max_j |residual_j − (1 − δ)^j|`.
    pub fn residual_error(&self) -> f64 {
        self.residual_masses
            .iter()
            .enumerate()
            .map(|(j, &r)| (r - (1.0 - self.delta).powi(j as i32)).abs())
            .fold(0.0, f64::max)
    }

    pub fn within_nominal(&self) -> bool {
        self.final_w1 <= self.nominal_bound + 1e-10
    }

    pub fn within_structural(&self) -> bool {
        self.final_w1 <= self.structural_bound + 1e-10
    }
}

/// `r = ⌈log_{1−δ} ε⌉ + 1`, the first count with `(1 − δ)^r < ε` strictly.
pub fn rounds_for(delta: f64, eps: f64) -> usize {
    if delta >= 1.0 || eps >= 1.0 {
        return 1;
    }
    let x = eps.ln() / (1.0 - delta).ln();
    (x.ceil().max(0.0) as usize) + 1
}

/// Certificate for a finite list of steps `μ_1, μ_2, …`.
pub fn contraction_certificate(
    steps: &[AtomicMeasure],
    nu: &AtomicMeasure,
    eps: f64,
    opts: CertificateOptions,
) -> Result<ContractionCertificate, PartitionError> {
    contraction_certificate_with(|n| steps.get(n - 1).cloned(), nu, eps, opts)
        .map_err(|e| match e {
            PartitionError::ScheduleTooShort { needed, .. } => {
                PartitionError::ScheduleTooShort { needed, available: steps.len() }
            }
            e => e,
        })
}

/// Certificate for steps supplied by `step(n)`, `n ≥ 1`; `None` ends the schedule.
pub fn contraction_certificate_with<F>(
    mut step: F,
    nu: &AtomicMeasure,
    eps: f64,
    opts: CertificateOptions,
) -> Result<ContractionCertificate, PartitionError>
where
    F: FnMut(usize) -> Option<AtomicMeasure>,
{
    let g = nu.group().clone();
    if !g.is_finite() {
        return Err(GroupError::NotFinite(g.to_string()).into());
    }
    nu.require_probability()?;
    let partition = vitali_partition(&g, eps)?;

    let mut fetched: Vec<AtomicMeasure> = Vec::new();
    let mut get = |n: usize, fetched: &mut Vec<AtomicMeasure>| -> Result<AtomicMeasure, PartitionError> {
        while fetched.len() < n {
            let next = fetched.len() + 1;
            match step(next) {
                Some(mu) => {
                    mu.same_group(nu)?;
                    mu.require_probability()?;
                    fetched.push(mu);
                }
                None => return Err(PartitionError::ScheduleTooShort { needed: n, available: fetched.len() }),
            }
        }
        Ok(fetched[n - 1].clone())
    };

    let mut window = |m: usize, k: usize| -> Result<(AtomicMeasure, f64), PartitionError> {
        let steps: Vec<AtomicMeasure> =
            (k * m + 1..=(k + 1) * m).map(|n| get(n, &mut fetched)).collect::<Result<_, _>>()?;
        let c = convolve_sequence(&steps)?;
        let d = wide_set_mass_lower_bound(&c, eps)?;
        Ok((c, d))
    };

    // Probe each window length on its first few windows and rank by the
    // predicted number of steps m·r(δ); longer windows often give a much
    // larger δ, which more than pays for itself.
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    let mut best_cost = usize::MAX;
    let mut short: Option<PartitionError> = None;
    for m in 1..=opts.m_cap {
        if m > best_cost {
            break;
        }
        let mut delta = f64::INFINITY;
        let mut usable = true;
        for k in 0..PROBE_WINDOWS {
            match window(m, k) {
                Ok((_, d)) if d > 0.0 => delta = delta.min(d),
                Ok(_) => {
                    usable = false;
                    break;
                }
                Err(e @ PartitionError::ScheduleTooShort { .. }) => {
                    if k == 0 {
                        usable = false;
                        short.get_or_insert(e);
                    }
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if usable {
            let cost = m.saturating_mul(rounds_for(delta, eps));
            best_cost = best_cost.min(cost);
            candidates.push((cost, m));
        }
    }
    candidates.sort();

    let mut chosen = None;
    let mut last_err = None;
    for &(_, m) in &candidates {
        match full_windows(&mut window, m, eps, opts.rounds_cap) {
            Ok(Some((delta, windows))) => {
                chosen = Some((m, delta, windows));
                break;
            }
            Ok(None) => {}
            Err(e) => last_err = Some(e),
        }
    }
    let Some((m, delta, windows)) = chosen else {
        if let Some(e) = last_err.or(short) {
            return Err(e);
        }
        return Err(zero_delta_error(&fetched, &g, opts.m_cap));
    };
    let r = windows.len();

    let mut residual = nu.clone();
    let mut assembled = AtomicMeasure::zero(g.clone());
    let mut direct = nu.clone();
    let mut residual_masses = vec![1.0];
    let mut stages = Vec::with_capacity(r);
    for (k, (c, window_delta)) in windows.iter().enumerate() {
        let expected_before = (1.0 - delta).powi(k as i32);
        let pushed = convolve(c, &residual)?;
        let dec = decompose(&pushed, &partition, delta * expected_before)?;
        assembled = convolve(c, &assembled)?.plus(&dec.nu1)?;
        direct = convolve(c, &direct)?;
        residual = dec.nu0;
        let mass = residual.total_mass();
        residual_masses.push(mass);
        stages.push(StageRecord {
            stage: k + 1,
            first_step: k * m + 1,
            window_delta: *window_delta,
            extracted: dec.nu1.total_mass(),
            residual: mass,
            residual_expected: (1.0 - delta).powi(k as i32 + 1),
        });
    }
    let full = assembled.plus(&residual)?;
    let reassembly_error = total_variation(&full, &direct)?;
    let final_w1 = w1_to_haar(&direct)?;
    let diameter = g.diameter();
    let rho = (1.0 - delta).powi(r as i32);
    let max_cell_diameter = partition.max_cell_diameter();
    Ok(ContractionCertificate {
        m,
        r,
        delta,
        epsilon: eps,
        diameter,
        cells: partition.len(),
        max_cell_diameter,
        residual_masses,
        nominal_bound: (diameter + 1.0) * eps,
        structural_bound: rho * diameter + (1.0 - rho) * max_cell_diameter,
        final_w1,
        reassembly_error,
        stages,
    })
}

/// Windows `1..=r` of length `m` with `r = r(δ)` and δ their minimum bound;
/// `None` if some window has bound 0.
fn full_windows<W>(
    window: &mut W,
    m: usize,
    eps: f64,
    rounds_cap: usize,
) -> Result<Option<(f64, Vec<(AtomicMeasure, f64)>)>, PartitionError>
where
    W: FnMut(usize, usize) -> Result<(AtomicMeasure, f64), PartitionError>,
{
    let mut windows: Vec<(AtomicMeasure, f64)> = Vec::new();
    let mut delta = f64::INFINITY;
    loop {
        let r = if windows.is_empty() { 1 } else { rounds_for(delta, eps) };
        if r > rounds_cap {
            return Err(PartitionError::RoundsCap { delta, rounds: r, cap: rounds_cap });
        }
        if !windows.is_empty() && windows.len() >= r {
            return Ok(Some((delta, windows)));
        }
        while windows.len() < r {
            let (c, d) = window(m, windows.len())?;
            if d <= 0.0 {
                return Ok(None);
            }
            delta = delta.min(d);
            windows.push((c, d));
        }
    }
}

/// Explain a certificate search that never found positive δ.
fn zero_delta_error(steps: &[AtomicMeasure], g: &Group, m_cap: usize) -> PartitionError {
    let mut diffs = Vec::new();
    for mu in steps {
        let supp = support(mu);
        for a in &supp {
            diffs.push(g.add_unchecked(a, &g.neg_unchecked(&supp[0])));
        }
    }
    diffs.sort();
    diffs.dedup();
    if let (Ok(sub), Some(order)) = (generated_subgroup(&diffs, g), g.order()) {
        if (sub.len() as u64) < order {
            return PartitionError::NonAperiodic { order: sub.len(), index: order / sub.len() as u64 };
        }
    }
    PartitionError::DeltaStaysZero { m_cap }
}
