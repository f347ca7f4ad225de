//! Finitely supported measures and their convolution.

use std::collections::HashMap;

use thiserror::Error;

use crate::group::{Element, Group, GroupError};

/// Torus atoms closer than this in the metric are the same atom.
pub const TORUS_MERGE_TOL: f64 = 1e-12;
/// Tolerance for total-mass bookkeeping.
pub const MASS_TOL: f64 = 1e-12;
/// Default cap on the number of atoms a convolution may produce.
pub const DEFAULT_ATOM_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("measures: group mismatch ({left} vs {right})")]
    GroupMismatch { left: String, right: String },
    #[error("measures: weight {0} is not a positive finite number")]
    BadWeight(f64),
    #[error("measures: expected a probability measure, total mass is {0}")]
    NotProbability(f64),
    #[error("measures: convolution would exceed the atom cap of {cap}; switch to Monte Carlo")]
    AtomCap { cap: usize },
    #[error("measures: empty input")]
    Empty,
}

/// A finitely supported nonnegative measure.
///
/// Atoms are kept sorted and pairwise distinct, all with positive weight.
/// Sub-probability measures (including the zero measure) are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicMeasure {
    group: Group,
    atoms: Vec<(Element, f64)>,
}

impl AtomicMeasure {
    pub fn new(group: Group, atoms: Vec<(Element, f64)>) -> Result<Self, MeasureError> {
        for (x, w) in &atoms {
            group.check(x)?;
            if !(w.is_finite() && *w > 0.0) {
                return Err(MeasureError::BadWeight(*w));
            }
        }
        let atoms = merge_atoms(&group, atoms);
        Ok(AtomicMeasure { group, atoms })
    }

    /// Same as [`AtomicMeasure::new`] but normalizes weights to total mass 1.
    pub fn probability(group: Group, atoms: Vec<(Element, f64)>) -> Result<Self, MeasureError> {
        let m = Self::new(group, atoms)?;
        if m.atoms.is_empty() {
            return Err(MeasureError::Empty);
        }
        Ok(m.normalized())
    }

    pub fn zero(group: Group) -> Self {
        AtomicMeasure { group, atoms: Vec::new() }
    }

    pub fn dirac(group: Group, x: Element) -> Result<Self, MeasureError> {
        group.check(&x)?;
        Ok(AtomicMeasure { group, atoms: vec![(x, 1.0)] })
    }

    /// Haar measure of a finite group as an atomic measure.
    pub fn uniform(group: Group) -> Result<Self, MeasureError> {
        let elements = group.elements()?;
        let w = 1.0 / elements.len() as f64;
        let atoms = elements.into_iter().map(|x| (x, w)).collect();
        Ok(AtomicMeasure { group, atoms })
    }

    /// Uniform measure on the points `k / n` of each torus coordinate.
    pub fn torus_grid(group: Group, n: usize) -> Result<Self, MeasureError> {
        let dim = group.rank();
        let count = n.checked_pow(dim as u32).ok_or(MeasureError::AtomCap { cap: DEFAULT_ATOM_CAP })?;
        if count > DEFAULT_ATOM_CAP {
            return Err(MeasureError::AtomCap { cap: DEFAULT_ATOM_CAP });
        }
        let w = 1.0 / count as f64;
        let mut atoms = Vec::with_capacity(count);
        for mut idx in 0..count {
            let mut coords = vec![0.0; dim];
            for c in coords.iter_mut().rev() {
                *c = (idx % n) as f64 / n as f64;
                idx /= n;
            }
            atoms.push((group.element_from_reals(&coords)?, w));
        }
        Ok(Self::from_merged(group, atoms))
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn atoms(&self) -> &[(Element, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= MASS_TOL
    }

    pub fn require_probability(&self) -> Result<(), MeasureError> {
        if self.is_probability() {
            Ok(())
        } else {
            Err(MeasureError::NotProbability(self.total_mass()))
        }
    }

    /// Weight of the atom at `x` (0 if absent). Torus lookups use the merge tolerance.
    pub fn weight_of(&self, x: &Element) -> f64 {
        match self.atoms.binary_search_by(|(a, _)| a.cmp(x)) {
            Ok(i) => self.atoms[i].1,
            Err(_) if self.group.is_torus() => self
                .atoms
                .iter()
                .filter(|(a, _)| self.group.metric_unchecked(a, x) <= TORUS_MERGE_TOL)
                .map(|(_, w)| w)
                .sum(),
            Err(_) => 0.0,
        }
    }

    /// Mass of the set `{x : pred(x)}`.
    pub fn mass_where(&self, mut pred: impl FnMut(&Element) -> bool) -> f64 {
        self.atoms.iter().filter(|(x, _)| pred(x)).map(|(_, w)| w).sum()
    }

    /// Mass of the closed ball `B(center, r)`.
    pub fn ball_mass(&self, center: &Element, r: f64) -> f64 {
        self.mass_where(|x| self.group.metric_unchecked(x, center) <= r)
    }

    pub fn scaled(&self, c: f64) -> Self {
        if c == 0.0 {
            return Self::zero(self.group.clone());
        }
        AtomicMeasure {
            group: self.group.clone(),
            atoms: self.atoms.iter().map(|(x, w)| (x.clone(), w * c)).collect(),
        }
    }

    pub fn normalized(&self) -> Self {
        let m = self.total_mass();
        if m == 0.0 {
            self.clone()
        } else {
            self.scaled(1.0 / m)
        }
    }

    /// Sum of two measures on the same group.
    pub fn plus(&self, other: &Self) -> Result<Self, MeasureError> {
        self.same_group(other)?;
        let atoms = self.atoms.iter().chain(&other.atoms).cloned().collect();
        Ok(AtomicMeasure { group: self.group.clone(), atoms: merge_atoms(&self.group, atoms) })
    }

    /// `t·self + (1 − t)·other`.
    pub fn mix(&self, other: &Self, t: f64) -> Result<Self, MeasureError> {
        self.scaled(t).plus(&other.scaled(1.0 - t))
    }

    /// Pushforward under the translation `x ↦ x + alpha`.
    pub fn translate(&self, alpha: &Element) -> Result<Self, MeasureError> {
        self.group.check(alpha)?;
        let atoms = self
            .atoms
            .iter()
            .map(|(x, w)| (self.group.add_unchecked(x, alpha), *w))
            .collect();
        Ok(AtomicMeasure { group: self.group.clone(), atoms: merge_atoms(&self.group, atoms) })
    }

    pub(crate) fn same_group(&self, other: &Self) -> Result<(), MeasureError> {
        if self.group == other.group {
            Ok(())
        } else {
            Err(MeasureError::GroupMismatch { left: self.group.to_string(), right: other.group.to_string() })
        }
    }

    pub(crate) fn from_merged(group: Group, atoms: Vec<(Element, f64)>) -> Self {
        let atoms = merge_atoms(&group, atoms);
        AtomicMeasure { group, atoms }
    }
}

/// Sort atoms, combine coincident ones and drop nonpositive weights.
///
/// Finite groups merge on exact equality. Torus atoms within
/// [`TORUS_MERGE_TOL`] in the metric are merged into the smallest of them,
/// including across the wrap at 1 ≡ 0.
fn merge_atoms(group: &Group, mut atoms: Vec<(Element, f64)>) -> Vec<(Element, f64)> {
    atoms.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(Element, f64)> = Vec::with_capacity(atoms.len());
    for (x, w) in atoms {
        match out.last_mut() {
            Some((y, v)) if *y == x => *v += w,
            _ => out.push((x, w)),
        }
    }
    if group.is_torus() && out.len() > 1 {
        let first = |e: &Element| e.point().expect("torus point")[0];
        let mut alive = vec![true; out.len()];
        for i in 0..out.len() {
            if !alive[i] {
                continue;
            }
            let xi = first(&out[i].0);
            let mut j = i + 1;
            while j < out.len() && first(&out[j].0) - xi <= TORUS_MERGE_TOL {
                if alive[j] && group.metric_unchecked(&out[i].0, &out[j].0) <= TORUS_MERGE_TOL {
                    alive[j] = false;
                    out[i].1 += out[j].1;
                }
                j += 1;
            }
        }
        // Wrap-around: atoms near 1 against atoms near 0.
        let n = out.len();
        for j in (0..n).rev() {
            if first(&out[j].0) < 1.0 - TORUS_MERGE_TOL {
                break;
            }
            if !alive[j] {
                continue;
            }
            for i in 0..j {
                if first(&out[i].0) > TORUS_MERGE_TOL {
                    break;
                }
                if alive[i] && group.metric_unchecked(&out[i].0, &out[j].0) <= TORUS_MERGE_TOL {
                    alive[j] = false;
                    out[i].1 += out[j].1;
                    break;
                }
            }
        }
        out = out.into_iter().zip(alive).filter(|(_, a)| *a).map(|(x, _)| x).collect();
    }
    out.retain(|(_, w)| *w > 0.0);
    out
}

/// `μ * ν` with the default atom cap.
pub fn convolve(mu: &AtomicMeasure, nu: &AtomicMeasure) -> Result<AtomicMeasure, MeasureError> {
    convolve_capped(mu, nu, DEFAULT_ATOM_CAP)
}

/// Distribution of `α + β` with `α ~ ν`, `β ~ μ` independent.
pub fn convolve_capped(mu: &AtomicMeasure, nu: &AtomicMeasure, cap: usize) -> Result<AtomicMeasure, MeasureError> {
    mu.same_group(nu)?;
    let g = &mu.group;
    if g.is_finite() {
        let mut acc: HashMap<Element, f64> = HashMap::with_capacity(mu.len() * nu.len());
        for (b, wb) in &mu.atoms {
            for (a, wa) in &nu.atoms {
                *acc.entry(g.add_unchecked(a, b)).or_insert(0.0) += wa * wb;
            }
            if acc.len() > cap {
                return Err(MeasureError::AtomCap { cap });
            }
        }
        return Ok(AtomicMeasure::from_merged(g.clone(), acc.into_iter().collect()));
    }
    let pairs = mu.len().saturating_mul(nu.len());
    let mut atoms = Vec::with_capacity(pairs.min(cap.saturating_mul(2)));
    for (b, wb) in &mu.atoms {
        for (a, wa) in &nu.atoms {
            atoms.push((g.add_unchecked(a, b), wa * wb));
        }
        if atoms.len() > cap.saturating_mul(2) {
            atoms = merge_atoms(g, atoms);
            if atoms.len() > cap {
                return Err(MeasureError::AtomCap { cap });
            }
        }
    }
    let out = AtomicMeasure::from_merged(g.clone(), atoms);
    if out.len() > cap {
        return Err(MeasureError::AtomCap { cap });
    }
    Ok(out)
}

/// n-fold convolution power; `n = 0` is `δ₀`.
pub fn convolve_power(mu: &AtomicMeasure, n: usize) -> Result<AtomicMeasure, MeasureError> {
    let mut acc = AtomicMeasure::dirac(mu.group.clone(), mu.group.zero())?;
    for _ in 0..n {
        acc = convolve(mu, &acc)?;
    }
    Ok(acc)
}

/// Left fold `μ_k * (… * (μ_2 * μ_1))`.
pub fn convolve_sequence(mus: &[AtomicMeasure]) -> Result<AtomicMeasure, MeasureError> {
    let (first, rest) = mus.split_first().ok_or(MeasureError::Empty)?;
    rest.iter().try_fold(first.clone(), |acc, mu| convolve(mu, &acc))
}

/// Atoms with positive weight, in canonical order.
pub fn support(nu: &AtomicMeasure) -> Vec<Element> {
    nu.atoms.iter().map(|(x, _)| x.clone()).collect()
}

/// `½ Σ |μ(x) − ν(x)|` over the union of atoms.
pub fn total_variation(mu: &AtomicMeasure, nu: &AtomicMeasure) -> Result<f64, MeasureError> {
    mu.same_group(nu)?;
    mu.require_probability()?;
    nu.require_probability()?;
    if mu.group.is_finite() {
        let mut diffs: HashMap<&Element, f64> = HashMap::new();
        for (x, w) in &mu.atoms {
            *diffs.entry(x).or_insert(0.0) += w;
        }
        for (x, w) in &nu.atoms {
            *diffs.entry(x).or_insert(0.0) -= w;
        }
        return Ok(0.5 * diffs.values().map(|v| v.abs()).sum::<f64>());
    }
    let mut tv = 0.0;
    let mut matched = vec![false; nu.len()];
    for (x, w) in &mu.atoms {
        let mut other = 0.0;
        for (k, (y, v)) in nu.atoms.iter().enumerate() {
            if !matched[k] && mu.group.metric_unchecked(x, y) <= TORUS_MERGE_TOL {
                other += v;
                matched[k] = true;
            }
        }
        tv += (w - other).abs();
    }
    tv += nu.atoms.iter().zip(&matched).filter(|(_, m)| !**m).map(|((_, v), _)| v).sum::<f64>();
    Ok(0.5 * tv)
}

/// Equal-weight measure on the samples, merging repeats.
pub fn empirical_measure(group: &Group, samples: &[Element]) -> Result<AtomicMeasure, MeasureError> {
    if samples.is_empty() {
        return Err(MeasureError::Empty);
    }
    let w = 1.0 / samples.len() as f64;
    AtomicMeasure::new(group.clone(), samples.iter().map(|x| (x.clone(), w)).collect())
}

/// A finite family of probability measures on one group.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureFamily {
    members: Vec<AtomicMeasure>,
}

impl MeasureFamily {
    pub fn new(members: Vec<AtomicMeasure>) -> Result<Self, MeasureError> {
        let first = members.first().ok_or(MeasureError::Empty)?;
        for m in &members {
            first.same_group(m)?;
            m.require_probability()?;
        }
        Ok(MeasureFamily { members })
    }

    pub fn members(&self) -> &[AtomicMeasure] {
        &self.members
    }

    pub fn group(&self) -> &Group {
        self.members[0].group()
    }
}
