//! Strict aperiodicity and support density.
//!
//! A measure is strictly aperiodic when the smallest semigroup containing the
//! difference set `{α − β : α, β ∈ supp μ}` is dense. The difference set is
//! symmetric and contains 0, so on a compact group the closure of that
//! semigroup is a closed subgroup; the checks below use subgroup closure.
//!
//! Finite groups are decided exactly. On the torus, irrationality cannot be
//! detected from floating-point data, so coordinates are classified as
//! rational (declared or recognized as an exactly rounded `p/q`), declared
//! irrational, or unknown, and the verdict is `Undecided` whenever the
//! classification does not settle the question.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::group::{Element, Group, GroupError};
use crate::measure::{support, AtomicMeasure, MeasureError};

/// Default cap for [`minimal_dense_power`].
pub const DEFAULT_POWER_CAP: usize = 10_000;
/// Largest denominator recognized when auto-classifying torus coordinates.
pub const MAX_AUTO_DENOMINATOR: u64 = 1024;
/// Largest torus grid used by the certified density check.
const MAX_DENSITY_GRID: usize = 4_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AperiodicityError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("aperiodicity: measure is not strictly aperiodic ({0})")]
    NotAperiodic(String),
    #[error("aperiodicity: strict aperiodicity is undecided ({0})")]
    Undecided(String),
    #[error("aperiodicity: no dense power found up to the cap of {0}")]
    CapExceeded(usize),
    #[error("aperiodicity: density grid of {0} points is too fine")]
    GridTooFine(usize),
    #[error("aperiodicity: annotation does not match the measure ({0})")]
    BadAnnotation(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Aperiodic,
    NotAperiodic,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactFinite,
    RationalizedTorus,
    DeclaredIrrational,
    DeclaredFullSupport,
}

/// A proper closed subgroup whose coset contains the support.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub generators: Vec<Element>,
    /// Elements of the subgroup when it was enumerated.
    pub subgroup: Option<Vec<Element>>,
    pub coset_representative: Element,
    /// Index in the ambient group; `None` when infinite (torus).
    pub index: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AperiodicityVerdict {
    pub verdict: Verdict,
    pub method: Method,
    pub witness: Option<Witness>,
    pub note: String,
}

/// Classification of one torus coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coordinate {
    Rational { num: i64, den: u64 },
    Irrational,
    Unknown,
}

/// Per-atom coordinate classes for a torus measure, keyed by atom.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TorusAnnotation {
    coords: HashMap<Element, Vec<Coordinate>>,
}

impl TorusAnnotation {
    /// Classify every coordinate automatically: exact small-denominator
    /// rationals are recognized, everything else is `Unknown`.
    pub fn auto(mu: &AtomicMeasure) -> Self {
        let coords = mu
            .atoms()
            .iter()
            .filter_map(|(x, _)| x.point().map(|p| (x.clone(), p.iter().map(|&c| classify(c)).collect())))
            .collect();
        TorusAnnotation { coords }
    }

    /// Override the class of an atom's coordinates.
    pub fn declare(&mut self, atom: Element, classes: Vec<Coordinate>) {
        self.coords.insert(atom, classes);
    }

    fn get(&self, x: &Element) -> Option<&[Coordinate]> {
        self.coords.get(x).map(Vec::as_slice)
    }
}

/// Recognize `x` as `p/q` (q ≤ [`MAX_AUTO_DENOMINATOR`]) when the float is the
/// correctly rounded value of that fraction.
pub fn classify(x: f64) -> Coordinate {
    for q in 1..=MAX_AUTO_DENOMINATOR {
        let p = (x * q as f64).round();
        if p / q as f64 == x {
            return Coordinate::Rational { num: p as i64, den: q };
        }
    }
    Coordinate::Unknown
}

/// All pairwise differences `α − β` of support atoms.
pub fn difference_set(mu: &AtomicMeasure) -> Vec<Element> {
    let g = mu.group();
    let supp = support(mu);
    let mut out = BTreeSet::new();
    for a in &supp {
        for b in &supp {
            out.insert(g.add_unchecked(a, &g.neg_unchecked(b)));
        }
    }
    out.into_iter().collect()
}

/// Subgroup of a finite group generated by `generators`, sorted.
pub fn generated_subgroup(generators: &[Element], g: &Group) -> Result<Vec<Element>, AperiodicityError> {
    if !g.is_finite() {
        return Err(GroupError::NotFinite(g.to_string()).into());
    }
    for s in generators {
        g.check(s)?;
    }
    let zero = g.zero();
    let mut seen: HashSet<Element> = HashSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    while let Some(h) = queue.pop_front() {
        for s in generators {
            let next = g.add_unchecked(&h, s);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<Element> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Decide strict aperiodicity with automatic torus coordinate classification.
pub fn is_strictly_aperiodic(mu: &AtomicMeasure) -> Result<AperiodicityVerdict, AperiodicityError> {
    is_strictly_aperiodic_annotated(mu, &TorusAnnotation::auto(mu))
}

/// Decide strict aperiodicity; `annotation` classifies torus coordinates.
pub fn is_strictly_aperiodic_annotated(
    mu: &AtomicMeasure,
    annotation: &TorusAnnotation,
) -> Result<AperiodicityVerdict, AperiodicityError> {
    mu.require_probability()?;
    let g = mu.group();
    if g.is_finite() {
        return finite_verdict(mu);
    }
    torus_verdict(mu, annotation)
}

fn finite_verdict(mu: &AtomicMeasure) -> Result<AperiodicityVerdict, AperiodicityError> {
    let g = mu.group();
    let diffs = difference_set(mu);
    let sub = generated_subgroup(&diffs, g)?;
    let order = g.order().expect("finite");
    if sub.len() as u64 == order {
        return Ok(AperiodicityVerdict {
            verdict: Verdict::Aperiodic,
            method: Method::ExactFinite,
            witness: None,
            note: "differences generate the whole group".into(),
        });
    }
    let rep = mu.atoms()[0].0.clone();
    let index = order / sub.len() as u64;
    Ok(AperiodicityVerdict {
        verdict: Verdict::NotAperiodic,
        method: Method::ExactFinite,
        note: format!("support lies in a coset of a subgroup of order {} (index {index})", sub.len()),
        witness: Some(Witness { generators: diffs, subgroup: Some(sub), coset_representative: rep, index: Some(index) }),
    })
}

fn torus_verdict(mu: &AtomicMeasure, annotation: &TorusAnnotation) -> Result<AperiodicityVerdict, AperiodicityError> {
    let g = mu.group();
    let dim = g.rank();
    let mut classes = Vec::with_capacity(mu.len());
    for (x, _) in mu.atoms() {
        let c = annotation
            .get(x)
            .map(<[Coordinate]>::to_vec)
            .unwrap_or_else(|| x.point().expect("torus point").iter().map(|&v| classify(v)).collect());
        if c.len() != dim {
            return Err(AperiodicityError::BadAnnotation(format!("atom {x} has {} classes, expected {dim}", c.len())));
        }
        classes.push(c);
    }
    let rep = mu.atoms()[0].0.clone();

    if mu.len() == 1 {
        return Ok(AperiodicityVerdict {
            verdict: Verdict::NotAperiodic,
            method: if classes[0].contains(&Coordinate::Irrational) {
                Method::DeclaredIrrational
            } else {
                Method::RationalizedTorus
            },
            witness: Some(Witness {
                generators: vec![g.zero()],
                subgroup: Some(vec![g.zero()]),
                coset_representative: rep.clone(),
                index: None,
            }),
            note: format!("single atom: difference set is {{0}}, support is the coset {rep} + {{0}}"),
        });
    }

    if classes.iter().flatten().all(|c| matches!(c, Coordinate::Rational { .. })) {
        return rational_torus_verdict(mu, &classes);
    }

    // Difference coordinate i of atoms a, b is known irrational when exactly
    // one side is irrational and the other rational. A difference vector that
    // is known irrational in coordinate i and known rational elsewhere has a
    // multiple that is an irrational rotation of factor i alone, whose closure
    // is that whole circle factor.
    let mut covered = vec![false; dim];
    for a in &classes {
        for b in &classes {
            let kinds: Vec<Option<bool>> = a
                .iter()
                .zip(b)
                .map(|(u, v)| match (u, v) {
                    (Coordinate::Rational { .. }, Coordinate::Rational { .. }) => Some(false),
                    (Coordinate::Irrational, Coordinate::Rational { .. })
                    | (Coordinate::Rational { .. }, Coordinate::Irrational) => Some(true),
                    _ => None,
                })
                .collect();
            if kinds.iter().all(Option::is_some) && kinds.iter().filter(|k| **k == Some(true)).count() == 1 {
                let i = kinds.iter().position(|k| *k == Some(true)).expect("one irrational coordinate");
                covered[i] = true;
            }
        }
    }
    if covered.iter().all(|c| *c) {
        return Ok(AperiodicityVerdict {
            verdict: Verdict::Aperiodic,
            method: Method::DeclaredIrrational,
            witness: None,
            note: "every circle factor is reached by an irrational rotation in the difference set".into(),
        });
    }
    let missing: Vec<usize> = covered.iter().enumerate().filter(|(_, c)| !**c).map(|(i, _)| i).collect();
    Ok(AperiodicityVerdict {
        verdict: Verdict::Undecided,
        method: Method::DeclaredIrrational,
        witness: None,
        note: format!("density of circle factors {missing:?} is not settled by the declared coordinate classes"),
    })
}

fn rational_torus_verdict(
    mu: &AtomicMeasure,
    classes: &[Vec<Coordinate>],
) -> Result<AperiodicityVerdict, AperiodicityError> {
    let g = mu.group();
    let dim = g.rank();
    let mut lcms = vec![1u64; dim];
    for c in classes {
        for (i, k) in c.iter().enumerate() {
            if let Coordinate::Rational { den, .. } = k {
                lcms[i] = lcm(lcms[i], *den);
            }
        }
    }
    let rep = mu.atoms()[0].0.clone();
    let to_residues = |c: &[Coordinate]| -> Vec<i64> {
        c.iter()
            .zip(&lcms)
            .map(|(k, &l)| match k {
                Coordinate::Rational { num, den } => num * (l / den) as i64,
                _ => unreachable!("all rational"),
            })
            .collect()
    };
    let to_point = |r: &[u64]| -> Element {
        Element::Point(r.iter().zip(&lcms).map(|(&v, &l)| v as f64 / l as f64).collect())
    };
    let note_base = format!("all coordinates rational; cleared denominators to Z/{lcms:?}");
    let lifted = Group::finite(&lcms.iter().map(|&l| l.max(2)).collect::<Vec<_>>());
    let witness = match lifted {
        Ok(h) => {
            let atoms: Vec<Element> = classes
                .iter()
                .map(|c| h.element_from_ints(&to_residues(c)))
                .collect::<Result<_, _>>()?;
            let mut diffs = BTreeSet::new();
            for a in &atoms {
                for b in &atoms {
                    diffs.insert(h.add_unchecked(a, &h.neg_unchecked(b)));
                }
            }
            let diffs: Vec<Element> = diffs.into_iter().collect();
            let sub = generated_subgroup(&diffs, &h)?;
            Witness {
                generators: diffs.iter().map(|d| to_point(d.residues().expect("residues"))).collect(),
                subgroup: Some(sub.iter().map(|d| to_point(d.residues().expect("residues"))).collect()),
                coset_representative: rep,
                index: None,
            }
        }
        // Denominators too large to enumerate: report generators only.
        Err(_) => Witness {
            generators: mu.atoms().iter().map(|(x, _)| x.clone()).collect(),
            subgroup: None,
            coset_representative: rep,
            index: None,
        },
    };
    Ok(AperiodicityVerdict {
        verdict: Verdict::NotAperiodic,
        method: Method::RationalizedTorus,
        witness: Some(witness),
        note: format!("{note_base}; a finite subgroup is never dense in the torus"),
    })
}

/// Verdict for a step law with full support (e.g. Haar measure): always aperiodic.
pub fn full_support_verdict() -> AperiodicityVerdict {
    AperiodicityVerdict {
        verdict: Verdict::Aperiodic,
        method: Method::DeclaredFullSupport,
        witness: None,
        note: "declared full support: the difference set is the whole group".into(),
    }
}

/// `∫ d(y, H) dh(y)`: lower bound on `W(ν, h)` for every ν supported on a coset of `H`.
pub fn coset_floor(g: &Group, subgroup: &[Element]) -> Result<f64, AperiodicityError> {
    let els = g.elements()?;
    let total: f64 = els
        .iter()
        .map(|y| subgroup.iter().map(|s| g.metric_unchecked(y, s)).fold(f64::INFINITY, f64::min))
        .sum();
    Ok(total / els.len() as f64)
}

/// Whether every group point lies within `eps` of `set`.
///
/// Exact on finite groups. On the torus a grid of spacing at most `ε/4` is
/// used and grid points must lie within `7ε/8` of the set, so `true` is
/// certified while `false` may be conservative.
pub fn is_eps_dense(set: &[Element], g: &Group, eps: f64) -> Result<bool, AperiodicityError> {
    if set.is_empty() {
        return Err(MeasureError::Empty.into());
    }
    for s in set {
        g.check(s)?;
    }
    if g.is_finite() {
        return Ok(g
            .elements()?
            .iter()
            .all(|y| set.iter().any(|s| g.metric_unchecked(y, s) <= eps)));
    }
    if eps >= g.diameter() {
        return Ok(true);
    }
    let n = (4.0 / eps).ceil() as usize;
    let dim = g.rank();
    let points = n.checked_pow(dim as u32).filter(|&p| p <= MAX_DENSITY_GRID).ok_or(AperiodicityError::GridTooFine(n))?;
    let half_spacing = 0.5 / n as f64;
    let reach = eps - half_spacing;
    let sorted_1d: Option<Vec<f64>> = (dim == 1).then(|| {
        let mut v: Vec<f64> = set.iter().map(|s| s.point().expect("torus")[0]).collect();
        v.sort_by(f64::total_cmp);
        v
    });
    for mut idx in 0..points {
        let mut coords = vec![0.0; dim];
        for c in coords.iter_mut().rev() {
            *c = ((idx % n) as f64 + 0.5) / n as f64;
            idx /= n;
        }
        let near = match &sorted_1d {
            Some(v) => circle_gap(v, coords[0]) <= reach,
            None => {
                let y = Element::Point(coords);
                set.iter().any(|s| g.metric_unchecked(&y, s) <= reach)
            }
        };
        if !near {
            return Ok(false);
        }
    }
    Ok(true)
}

fn circle_gap(sorted: &[f64], y: f64) -> f64 {
    let k = sorted.partition_point(|&v| v < y);
    let dist = |v: f64| {
        let d = (v - y).abs();
        d.min(1.0 - d)
    };
    let after = sorted.get(k).copied().unwrap_or(sorted[0]);
    let before = if k == 0 { sorted[sorted.len() - 1] } else { sorted[k - 1] };
    dist(after).min(dist(before))
}

/// Support of `μ_k * … * μ_1`, computed as an iterated sum-set.
pub fn product_support(mus: &[AtomicMeasure]) -> Result<Vec<Element>, AperiodicityError> {
    let (first, rest) = mus.split_first().ok_or(MeasureError::Empty)?;
    let mut acc = support(first);
    for mu in rest {
        first.same_group(mu)?;
        acc = sumset(first.group(), &acc, &support(mu))?;
    }
    Ok(acc)
}

fn sumset(g: &Group, a: &[Element], b: &[Element]) -> Result<Vec<Element>, AperiodicityError> {
    let sums: Vec<(Element, f64)> =
        a.iter().flat_map(|x| b.iter().map(move |y| (g.add_unchecked(x, y), 1.0))).collect();
    if sums.len() > crate::measure::DEFAULT_ATOM_CAP * 4 {
        return Err(MeasureError::AtomCap { cap: crate::measure::DEFAULT_ATOM_CAP }.into());
    }
    let m = AtomicMeasure::from_merged(g.clone(), sums);
    if m.len() > crate::measure::DEFAULT_ATOM_CAP {
        return Err(MeasureError::AtomCap { cap: crate::measure::DEFAULT_ATOM_CAP }.into());
    }
    Ok(support(&m))
}

/// Smallest `m` with `supp(μ^{*m})` ε-dense.
pub fn minimal_dense_power(mu: &AtomicMeasure, eps: f64, cap: usize) -> Result<usize, AperiodicityError> {
    let v = is_strictly_aperiodic(mu)?;
    minimal_dense_power_given(mu, &v, eps, cap)
}

/// As [`minimal_dense_power`], with a verdict computed elsewhere (e.g. from declared coordinates).
pub fn minimal_dense_power_given(
    mu: &AtomicMeasure,
    verdict: &AperiodicityVerdict,
    eps: f64,
    cap: usize,
) -> Result<usize, AperiodicityError> {
    match verdict.verdict {
        Verdict::Aperiodic => {}
        Verdict::NotAperiodic => return Err(AperiodicityError::NotAperiodic(verdict.note.clone())),
        Verdict::Undecided => return Err(AperiodicityError::Undecided(verdict.note.clone())),
    }
    let g = mu.group();
    let step = support(mu);
    let mut acc = step.clone();
    for m in 1..=cap {
        if is_eps_dense(&acc, g, eps)? {
            return Ok(m);
        }
        acc = sumset(g, &acc, &step)?;
    }
    Err(AperiodicityError::CapExceeded(cap))
}

/// Whether `supp(μ_k * … * μ_1)` is ε-dense.
pub fn sequence_support_dense(mus: &[AtomicMeasure], eps: f64) -> Result<bool, AperiodicityError> {
    let supp = product_support(mus)?;
    is_eps_dense(&supp, mus[0].group(), eps)
}

/// `supp(μ) ⊂ supp(μ̃) + B(0, ε̃)` with the open ball.
pub fn support_inclusion_with_radius(
    mu: &AtomicMeasure,
    mu_tilde: &AtomicMeasure,
    radius: f64,
) -> Result<bool, AperiodicityError> {
    mu.same_group(mu_tilde)?;
    let g = mu.group();
    Ok(mu
        .atoms()
        .iter()
        .all(|(x, _)| mu_tilde.atoms().iter().any(|(y, _)| g.metric_unchecked(x, y) < radius)))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: u64) -> Element {
        Element::Residues(vec![v])
    }

    fn p(v: f64) -> Element {
        Element::Point(vec![v])
    }

    fn z(m: u64) -> Group {
        Group::cyclic(m).unwrap()
    }

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    #[test]
    fn difference_set_examples() {
        let d = AtomicMeasure::dirac(z(4), r(2)).unwrap();
        assert_eq!(difference_set(&d), vec![r(0)]);
        let mu = AtomicMeasure::probability(z(4), vec![(r(0), 1.0), (r(1), 1.0)]).unwrap();
        let ds = difference_set(&mu);
        assert_eq!(ds, vec![r(0), r(1), r(3)]);
        let g = z(4);
        for s in &ds {
            assert!(ds.contains(&g.neg(s).unwrap()));
        }
    }

    #[test]
    fn generated_subgroup_examples() {
        let g = z(4);
        assert_eq!(generated_subgroup(&[r(0)], &g).unwrap(), vec![r(0)]);
        assert_eq!(generated_subgroup(&[r(1)], &g).unwrap().len(), 4);
        assert_eq!(generated_subgroup(&[r(2)], &g).unwrap(), vec![r(0), r(2)]);
        assert!(generated_subgroup(&[], &Group::torus(1).unwrap()).is_err());
    }

    #[test]
    fn finite_verdicts() {
        let mu = AtomicMeasure::probability(z(4), vec![(r(0), 1.0), (r(1), 1.0)]).unwrap();
        let v = is_strictly_aperiodic(&mu).unwrap();
        assert_eq!(v.verdict, Verdict::Aperiodic);
        assert_eq!(v.method, Method::ExactFinite);

        let d1 = AtomicMeasure::dirac(z(2), r(1)).unwrap();
        let v = is_strictly_aperiodic(&d1).unwrap();
        assert_eq!(v.verdict, Verdict::NotAperiodic);
        let w = v.witness.unwrap();
        assert_eq!(w.subgroup, Some(vec![r(0)]));
        assert_eq!(w.coset_representative, r(1));

        // Support {1, 3} in Z/4 is a coset of {0, 2}.
        let odd = AtomicMeasure::probability(z(4), vec![(r(1), 1.0), (r(3), 2.0)]).unwrap();
        let v = is_strictly_aperiodic(&odd).unwrap();
        assert_eq!(v.verdict, Verdict::NotAperiodic);
        assert_eq!(v.witness.unwrap().index, Some(2));
    }

    #[test]
    fn irrational_dirac_is_not_aperiodic() {
        let t = Group::torus(1).unwrap();
        let a = p(golden());
        let mu = AtomicMeasure::dirac(t, a.clone()).unwrap();
        let mut ann = TorusAnnotation::default();
        ann.declare(a.clone(), vec![Coordinate::Irrational]);
        let v = is_strictly_aperiodic_annotated(&mu, &ann).unwrap();
        assert_eq!(v.verdict, Verdict::NotAperiodic);
        assert_eq!(v.method, Method::DeclaredIrrational);
        let w = v.witness.unwrap();
        assert_eq!(w.subgroup, Some(vec![p(0.0)]));
        assert_eq!(w.coset_representative, a);
    }

    #[test]
    fn torus_lazy_irrational_step_is_aperiodic() {
        let t = Group::torus(1).unwrap();
        let mu = AtomicMeasure::probability(t, vec![(p(0.0), 1.0), (p(golden()), 1.0)]).unwrap();
        // Undeclared float: never guessed.
        assert_eq!(is_strictly_aperiodic(&mu).unwrap().verdict, Verdict::Undecided);
        let mut ann = TorusAnnotation::auto(&mu);
        ann.declare(p(golden()), vec![Coordinate::Irrational]);
        assert_eq!(is_strictly_aperiodic_annotated(&mu, &ann).unwrap().verdict, Verdict::Aperiodic);
    }

    #[test]
    fn rational_torus_is_never_dense() {
        let t = Group::torus(1).unwrap();
        let mu = AtomicMeasure::probability(t, vec![(p(0.0), 1.0), (p(0.25), 1.0), (p(1.0 / 3.0), 1.0)]).unwrap();
        let v = is_strictly_aperiodic(&mu).unwrap();
        assert_eq!(v.verdict, Verdict::NotAperiodic);
        assert_eq!(v.method, Method::RationalizedTorus);
        // Differences 1/4, 1/3 generate the multiples of 1/12.
        assert_eq!(v.witness.unwrap().subgroup.unwrap().len(), 12);
    }

    #[test]
    fn two_dim_torus_needs_every_factor() {
        let t = Group::torus(2).unwrap();
        let g = golden();
        let s2 = 2f64.sqrt() - 1.0;
        let atoms = vec![
            (Element::Point(vec![0.0, 0.0]), 1.0),
            (Element::Point(vec![g, 0.0]), 1.0),
            (Element::Point(vec![0.0, s2]), 1.0),
        ];
        let mu = AtomicMeasure::probability(t.clone(), atoms).unwrap();
        let mut ann = TorusAnnotation::auto(&mu);
        ann.declare(Element::Point(vec![g, 0.0]), vec![Coordinate::Irrational, Coordinate::Rational { num: 0, den: 1 }]);
        ann.declare(Element::Point(vec![0.0, s2]), vec![Coordinate::Rational { num: 0, den: 1 }, Coordinate::Irrational]);
        assert_eq!(is_strictly_aperiodic_annotated(&mu, &ann).unwrap().verdict, Verdict::Aperiodic);

        // A diagonal step only: undecided (it is in fact not dense).
        let diag = AtomicMeasure::probability(
            t,
            vec![(Element::Point(vec![0.0, 0.0]), 1.0), (Element::Point(vec![g, g]), 1.0)],
        )
        .unwrap();
        let mut ann = TorusAnnotation::auto(&diag);
        ann.declare(Element::Point(vec![g, g]), vec![Coordinate::Irrational; 2]);
        assert_eq!(is_strictly_aperiodic_annotated(&diag, &ann).unwrap().verdict, Verdict::Undecided);
    }

    #[test]
    fn classify_recognizes_exact_fractions() {
        assert_eq!(classify(0.25), Coordinate::Rational { num: 1, den: 4 });
        assert_eq!(classify(1.0 / 3.0), Coordinate::Rational { num: 1, den: 3 });
        assert_eq!(classify(0.0), Coordinate::Rational { num: 0, den: 1 });
        assert_eq!(classify(golden()), Coordinate::Unknown);
    }

    #[test]
    fn density_examples() {
        let g = z(4);
        let all = g.elements().unwrap();
        assert!(is_eps_dense(&all, &g, 0.01).unwrap());
        assert!(!is_eps_dense(&[r(0)], &g, 0.1).unwrap());
        let t = Group::torus(1).unwrap();
        let quarters = vec![p(0.0), p(0.25), p(0.5), p(0.75)];
        assert!(is_eps_dense(&quarters, &t, 0.2).unwrap());
        assert!(!is_eps_dense(&quarters, &t, 0.1).unwrap());
    }

    #[test]
    fn minimal_dense_power_examples() {
        let g = z(4);
        let full = AtomicMeasure::uniform(g.clone()).unwrap();
        assert_eq!(minimal_dense_power(&full, 0.1, DEFAULT_POWER_CAP).unwrap(), 1);
        let mu = AtomicMeasure::probability(g.clone(), vec![(r(0), 1.0), (r(1), 1.0)]).unwrap();
        assert_eq!(minimal_dense_power(&mu, 0.1, DEFAULT_POWER_CAP).unwrap(), 3);
        let z2 = AtomicMeasure::probability(z(2), vec![(r(0), 1.0), (r(1), 1.0)]).unwrap();
        assert_eq!(minimal_dense_power(&z2, 0.01, DEFAULT_POWER_CAP).unwrap(), 1);
        assert_eq!(minimal_dense_power(&z2, 0.9, DEFAULT_POWER_CAP).unwrap(), 1);

        let d = AtomicMeasure::dirac(g.clone(), r(1)).unwrap();
        assert!(matches!(minimal_dense_power(&d, 0.1, 10), Err(AperiodicityError::NotAperiodic(_))));
        // Z/12 with steps {0, 1}: eleven steps needed at the finest scale.
        let slow = AtomicMeasure::probability(z(12), vec![(r(0), 1.0), (r(1), 1.0)]).unwrap();
        assert!(matches!(minimal_dense_power(&slow, 0.01, 5), Err(AperiodicityError::CapExceeded(5))));
        assert_eq!(minimal_dense_power(&slow, 0.01, 20).unwrap(), 11);
    }

    #[test]
    fn sequence_density_examples() {
        let g = z(6);
        let full = AtomicMeasure::uniform(g.clone()).unwrap();
        assert!(sequence_support_dense(std::slice::from_ref(&full), 0.01).unwrap());
        let d = AtomicMeasure::dirac(g.clone(), r(2)).unwrap();
        assert!(sequence_support_dense(&[full, d.clone()], 0.01).unwrap());
        assert!(!sequence_support_dense(&[d], 0.1).unwrap());
    }

    #[test]
    fn support_inclusion_examples() {
        let t = Group::torus(1).unwrap();
        let a = AtomicMeasure::dirac(t.clone(), p(0.0)).unwrap();
        let b = AtomicMeasure::dirac(t, p(0.5)).unwrap();
        assert!(support_inclusion_with_radius(&a, &a, 1e-9).unwrap());
        assert!(!support_inclusion_with_radius(&a, &b, 0.1).unwrap());
    }

    #[test]
    fn coset_floor_positive_for_proper_subgroup() {
        let g = z(4);
        let f = coset_floor(&g, &[r(0), r(2)]).unwrap();
        // Odd elements are at distance 1/4 from {0, 2}.
        assert!((f - 0.125).abs() < 1e-15);
        let all = g.elements().unwrap();
        assert_eq!(coset_floor(&g, &all).unwrap(), 0.0);
    }
}
