//! Concrete compact abelian groups.
//!
//! Four families are supported:
//!
//! - `Finite(m₁, …, m_k)`: the product ℤ/m₁ × … × ℤ/m_k with the normalized
//!   cyclic sup-metric `max_i min(|Δᵢ|, mᵢ − |Δᵢ|) / mᵢ`, so that it sits
//!   isometrically inside the torus of the same dimension.
//! - `Torus(d)`: (ℝ/ℤ)^d with the sup over coordinates of the circle distance.
//! - `DyadicCantor(k)`: (ℤ/2)^k, the depth-k truncation of the Cantor group,
//!   with the ultrametric `2^{-j}` where `j` is the first (1-based) differing bit.
//! - `PAdic(p, k)`: ℤ/p^k, the depth-k truncation of the p-adic integers, with
//!   the ultrametric `p^{-(v+1)}` where `v` is the p-adic valuation of `x − y`.
//!
//! All four are shift-invariant. Balls are closed: `B(x, r) = {y : d(x, y) ≤ r}`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("group: invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("group: element {element} does not belong to {group}")]
    Mismatch { element: String, group: String },
    #[error("group: {0} is not a finite group")]
    NotFinite(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Finite { moduli: Vec<u64> },
    Torus { dim: usize },
    DyadicCantor { depth: u32 },
    PAdic { p: u64, depth: u32 },
}

/// A validated group descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Group(GroupKind);

/// Largest finite group order accepted. Element enumeration is dense.
pub const MAX_FINITE_ORDER: u64 = 1 << 24;

impl Group {
    pub fn new(kind: GroupKind) -> Result<Self, GroupError> {
        let bad = |msg: String| Err(GroupError::InvalidDescriptor(msg));
        match &kind {
            GroupKind::Finite { moduli } => {
                if moduli.is_empty() {
                    return bad("finite group needs at least one modulus".into());
                }
                if let Some(m) = moduli.iter().find(|&&m| m < 2) {
                    return bad(format!("modulus {m} must be >= 2"));
                }
                let order = moduli
                    .iter()
                    .try_fold(1u64, |acc, &m| acc.checked_mul(m))
                    .filter(|&o| o <= MAX_FINITE_ORDER);
                if order.is_none() {
                    return bad(format!("group order exceeds {MAX_FINITE_ORDER}"));
                }
            }
            GroupKind::Torus { dim } => {
                if *dim == 0 {
                    return bad("torus dimension must be >= 1".into());
                }
            }
            GroupKind::DyadicCantor { depth } => {
                if *depth == 0 || *depth > 24 {
                    return bad(format!("cantor depth {depth} must be in 1..=24"));
                }
            }
            GroupKind::PAdic { p, depth } => {
                if !is_prime(*p) {
                    return bad(format!("p = {p} is not prime"));
                }
                if *depth == 0 {
                    return bad("p-adic depth must be >= 1".into());
                }
                let order = p.checked_pow(*depth).filter(|&o| o <= MAX_FINITE_ORDER);
                if order.is_none() {
                    return bad(format!("p^depth exceeds {MAX_FINITE_ORDER}"));
                }
            }
        }
        Ok(Group(kind))
    }

    pub fn finite(moduli: &[u64]) -> Result<Self, GroupError> {
        Self::new(GroupKind::Finite { moduli: moduli.to_vec() })
    }

    pub fn cyclic(m: u64) -> Result<Self, GroupError> {
        Self::finite(&[m])
    }

    pub fn torus(dim: usize) -> Result<Self, GroupError> {
        Self::new(GroupKind::Torus { dim })
    }

    pub fn cantor(depth: u32) -> Result<Self, GroupError> {
        Self::new(GroupKind::DyadicCantor { depth })
    }

    pub fn padic(p: u64, depth: u32) -> Result<Self, GroupError> {
        Self::new(GroupKind::PAdic { p, depth })
    }

    pub fn kind(&self) -> &GroupKind {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self.0, GroupKind::Torus { .. })
    }

    pub fn is_torus(&self) -> bool {
        matches!(self.0, GroupKind::Torus { .. })
    }

    /// Number of coordinates of an element.
    pub fn rank(&self) -> usize {
        match &self.0 {
            GroupKind::Finite { moduli } => moduli.len(),
            GroupKind::Torus { dim } => *dim,
            GroupKind::DyadicCantor { depth } => *depth as usize,
            GroupKind::PAdic { .. } => 1,
        }
    }

    /// The cyclic factors realizing a finite variant, `None` for the torus.
    pub fn cyclic_moduli(&self) -> Option<Vec<u64>> {
        match &self.0 {
            GroupKind::Finite { moduli } => Some(moduli.clone()),
            GroupKind::Torus { .. } => None,
            GroupKind::DyadicCantor { depth } => Some(vec![2; *depth as usize]),
            GroupKind::PAdic { p, depth } => Some(vec![p.pow(*depth)]),
        }
    }

    pub fn order(&self) -> Option<u64> {
        self.cyclic_moduli().map(|m| m.iter().product())
    }

    pub fn zero(&self) -> Element {
        match &self.0 {
            GroupKind::Torus { dim } => Element::Point(vec![0.0; *dim]),
            _ => Element::Residues(vec![0; self.rank()]),
        }
    }

    pub fn contains(&self, x: &Element) -> bool {
        match (&self.0, x) {
            (GroupKind::Torus { dim }, Element::Point(c)) => {
                c.len() == *dim && c.iter().all(|v| (0.0..1.0).contains(v) && !v.is_sign_negative())
            }
            (GroupKind::Torus { .. }, _) | (_, Element::Point(_)) => false,
            (_, Element::Residues(r)) => {
                let moduli = self.cyclic_moduli().expect("finite variant");
                r.len() == moduli.len() && r.iter().zip(&moduli).all(|(v, m)| v < m)
            }
        }
    }

    pub fn check(&self, x: &Element) -> Result<(), GroupError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(GroupError::Mismatch { element: x.to_string(), group: self.to_string() })
        }
    }

    /// Build an element from raw coordinates, reducing into canonical range.
    pub fn element_from_ints(&self, coords: &[i64]) -> Result<Element, GroupError> {
        let moduli = self.cyclic_moduli().ok_or_else(|| GroupError::NotFinite(self.to_string()))?;
        if coords.len() != moduli.len() {
            return Err(GroupError::Mismatch { element: format!("{coords:?}"), group: self.to_string() });
        }
        Ok(Element::Residues(
            coords.iter().zip(&moduli).map(|(&c, &m)| c.rem_euclid(m as i64) as u64).collect(),
        ))
    }

    pub fn element_from_reals(&self, coords: &[f64]) -> Result<Element, GroupError> {
        match &self.0 {
            GroupKind::Torus { dim } if coords.len() == *dim && coords.iter().all(|c| c.is_finite()) => {
                Ok(Element::Point(coords.iter().map(|&c| reduce_unit(c)).collect()))
            }
            _ => Err(GroupError::Mismatch { element: format!("{coords:?}"), group: self.to_string() }),
        }
    }

    pub fn add(&self, x: &Element, y: &Element) -> Result<Element, GroupError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.add_unchecked(x, y))
    }

    pub fn neg(&self, x: &Element) -> Result<Element, GroupError> {
        self.check(x)?;
        Ok(self.neg_unchecked(x))
    }

    pub fn sub(&self, x: &Element, y: &Element) -> Result<Element, GroupError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.add_unchecked(x, &self.neg_unchecked(y)))
    }

    pub fn metric(&self, x: &Element, y: &Element) -> Result<f64, GroupError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.metric_unchecked(x, y))
    }

    pub(crate) fn add_unchecked(&self, x: &Element, y: &Element) -> Element {
        match (x, y) {
            (Element::Point(a), Element::Point(b)) => {
                Element::Point(a.iter().zip(b).map(|(u, v)| reduce_unit(u + v)).collect())
            }
            (Element::Residues(a), Element::Residues(b)) => {
                let moduli = self.cyclic_moduli().expect("finite variant");
                Element::Residues(
                    a.iter().zip(b).zip(&moduli).map(|((u, v), m)| (u + v) % m).collect(),
                )
            }
            _ => unreachable!("element kinds checked by caller"),
        }
    }

    pub(crate) fn neg_unchecked(&self, x: &Element) -> Element {
        match x {
            Element::Point(a) => Element::Point(a.iter().map(|&u| reduce_unit(-u)).collect()),
            Element::Residues(a) => {
                let moduli = self.cyclic_moduli().expect("finite variant");
                Element::Residues(a.iter().zip(&moduli).map(|(&u, &m)| (m - u) % m).collect())
            }
        }
    }

    pub(crate) fn metric_unchecked(&self, x: &Element, y: &Element) -> f64 {
        match (&self.0, x, y) {
            (GroupKind::Torus { .. }, Element::Point(a), Element::Point(b)) => a
                .iter()
                .zip(b)
                .map(|(u, v)| {
                    let d = (u - v).abs();
                    d.min(1.0 - d)
                })
                .fold(0.0, f64::max),
            (GroupKind::Finite { moduli }, Element::Residues(a), Element::Residues(b)) => a
                .iter()
                .zip(b)
                .zip(moduli)
                .map(|((&u, &v), &m)| cyclic_distance(u, v, m))
                .fold(0.0, f64::max),
            (GroupKind::DyadicCantor { .. }, Element::Residues(a), Element::Residues(b)) => {
                match a.iter().zip(b).position(|(u, v)| u != v) {
                    Some(j) => 0.5f64.powi(j as i32 + 1),
                    None => 0.0,
                }
            }
            (GroupKind::PAdic { p, depth }, Element::Residues(a), Element::Residues(b)) => {
                let modulus = p.pow(*depth);
                let diff = (a[0] + modulus - b[0]) % modulus;
                if diff == 0 {
                    0.0
                } else {
                    (*p as f64).powi(-(valuation(diff, *p) as i32 + 1))
                }
            }
            _ => unreachable!("element kinds checked by caller"),
        }
    }

    /// Supremum of the metric over the group.
    pub fn diameter(&self) -> f64 {
        match &self.0 {
            GroupKind::Torus { .. } | GroupKind::DyadicCantor { .. } => 0.5,
            GroupKind::PAdic { p, .. } => 1.0 / *p as f64,
            GroupKind::Finite { moduli } => {
                moduli.iter().map(|&m| (m / 2) as f64 / m as f64).fold(0.0, f64::max)
            }
        }
    }

    /// Smallest positive distance between two elements of a finite group.
    pub fn min_positive_distance(&self) -> Option<f64> {
        match &self.0 {
            GroupKind::Torus { .. } => None,
            GroupKind::Finite { moduli } => {
                moduli.iter().map(|&m| 1.0 / m as f64).reduce(f64::min)
            }
            GroupKind::DyadicCantor { depth } => Some(0.5f64.powi(*depth as i32)),
            GroupKind::PAdic { p, depth } => Some((*p as f64).powi(-(*depth as i32))),
        }
    }

    /// Haar measure of the closed ball of radius `r` (independent of the center).
    pub fn haar_ball_mass(&self, r: f64) -> f64 {
        if r < 0.0 {
            return 0.0;
        }
        match &self.0 {
            GroupKind::Torus { dim } => (2.0 * r).min(1.0).powi(*dim as i32),
            GroupKind::Finite { moduli } => moduli
                .iter()
                .map(|&m| {
                    let inside = (0..m).filter(|&t| cyclic_distance(0, t, m) <= r).count();
                    inside as f64 / m as f64
                })
                .product(),
            GroupKind::DyadicCantor { depth } => {
                // Points agreeing with the center on the first j0 − 1 bits.
                let k = *depth as i32;
                match (1..=k).find(|&j| 0.5f64.powi(j) <= r) {
                    Some(j0) => 0.5f64.powi(j0 - 1),
                    None => 0.5f64.powi(k),
                }
            }
            GroupKind::PAdic { p, depth } => {
                let k = *depth as i32;
                let pf = *p as f64;
                match (0..k).find(|&v| pf.powi(-(v + 1)) <= r) {
                    Some(v0) => pf.powi(-v0),
                    None => pf.powi(-k),
                }
            }
        }
    }

    /// Draw one Haar-distributed element.
    pub fn haar_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        match &self.0 {
            GroupKind::Torus { dim } => {
                Element::Point((0..*dim).map(|_| rng.random::<f64>()).collect())
            }
            _ => {
                let moduli = self.cyclic_moduli().expect("finite variant");
                Element::Residues(moduli.iter().map(|&m| rng.random_range(0..m)).collect())
            }
        }
    }

    /// All elements of a finite group in mixed-radix order (last coordinate fastest).
    pub fn elements(&self) -> Result<Vec<Element>, GroupError> {
        let order = self.order().ok_or_else(|| GroupError::NotFinite(self.to_string()))?;
        Ok((0..order).map(|i| self.element_at(i)).collect())
    }

    pub(crate) fn element_at(&self, mut index: u64) -> Element {
        let moduli = self.cyclic_moduli().expect("finite variant");
        let mut coords = vec![0; moduli.len()];
        for (c, &m) in coords.iter_mut().zip(&moduli).rev() {
            *c = index % m;
            index /= m;
        }
        Element::Residues(coords)
    }

    pub(crate) fn index_of(&self, x: &Element) -> usize {
        let moduli = self.cyclic_moduli().expect("finite variant");
        match x {
            Element::Residues(r) => r.iter().zip(&moduli).fold(0u64, |acc, (&c, &m)| acc * m + c) as usize,
            Element::Point(_) => unreachable!("finite element expected"),
        }
    }
}

impl<'de> Deserialize<'de> for Group {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let kind = GroupKind::deserialize(de)?;
        Group::new(kind).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            GroupKind::Finite { moduli } => {
                let parts: Vec<String> = moduli.iter().map(|m| format!("Z/{m}")).collect();
                write!(f, "{}", parts.join(" x "))
            }
            GroupKind::Torus { dim } => write!(f, "T^{dim}"),
            GroupKind::DyadicCantor { depth } => write!(f, "Cantor(depth {depth})"),
            GroupKind::PAdic { p, depth } => write!(f, "Z_{p} mod {p}^{depth}"),
        }
    }
}

/// A group element in canonical reduced form.
///
/// Torus coordinates compare by exact bit pattern; geometric closeness is the
/// metric's job.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Element {
    Residues(Vec<u64>),
    Point(Vec<f64>),
}

impl Element {
    pub fn residues(&self) -> Option<&[u64]> {
        match self {
            Element::Residues(r) => Some(r),
            Element::Point(_) => None,
        }
    }

    pub fn point(&self) -> Option<&[f64]> {
        match self {
            Element::Point(p) => Some(p),
            Element::Residues(_) => None,
        }
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Element {}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Element::Residues(a), Element::Residues(b)) => a.cmp(b),
            (Element::Point(a), Element::Point(b)) => {
                for (u, v) in a.iter().zip(b) {
                    match u.total_cmp(v) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                a.len().cmp(&b.len())
            }
            (Element::Residues(_), Element::Point(_)) => Ordering::Less,
            (Element::Point(_), Element::Residues(_)) => Ordering::Greater,
        }
    }
}

impl Hash for Element {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Element::Residues(r) => {
                0u8.hash(state);
                r.hash(state);
            }
            Element::Point(p) => {
                1u8.hash(state);
                for v in p {
                    v.to_bits().hash(state);
                }
            }
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Residues(r) => write!(f, "{r:?}"),
            Element::Point(p) => write!(f, "{p:?}"),
        }
    }
}

/// Reduce a real into [0, 1). Negative zero and values rounding up to 1 map to 0.
pub fn reduce_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 || r == 0.0 {
        0.0
    } else {
        r
    }
}

fn cyclic_distance(u: u64, v: u64, m: u64) -> f64 {
    let d = u.abs_diff(v);
    d.min(m - d) as f64 / m as f64
}

fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn res(v: &[u64]) -> Element {
        Element::Residues(v.to_vec())
    }

    fn pt(v: f64) -> Element {
        Element::Point(vec![v])
    }

    #[test]
    fn torus_addition_wraps() {
        let g = Group::torus(1).unwrap();
        let s = g.add(&pt(0.7), &pt(0.6)).unwrap();
        assert!((s.point().unwrap()[0] - 0.3).abs() < 1e-12);
        assert_eq!(g.add(&pt(0.25), &g.zero()).unwrap(), pt(0.25));
    }

    #[test]
    fn cyclic_addition_and_negation() {
        let g = Group::cyclic(4).unwrap();
        assert_eq!(g.add(&res(&[3]), &res(&[2])).unwrap(), res(&[1]));
        assert_eq!(g.neg(&res(&[1])).unwrap(), res(&[3]));
        assert_eq!(g.neg(&res(&[0])).unwrap(), res(&[0]));
        let t = Group::torus(1).unwrap();
        assert!((t.neg(&pt(0.3)).unwrap().point().unwrap()[0] - 0.7).abs() < 1e-12);
        assert_eq!(t.neg(&pt(0.0)).unwrap(), pt(0.0));
    }

    #[test]
    fn mismatch_is_rejected() {
        let g = Group::cyclic(4).unwrap();
        assert!(matches!(g.add(&res(&[4]), &res(&[0])), Err(GroupError::Mismatch { .. })));
        assert!(g.metric(&pt(0.1), &res(&[0])).is_err());
        let t = Group::torus(2).unwrap();
        assert!(t.neg(&pt(0.1)).is_err());
    }

    #[test]
    fn invalid_descriptors() {
        assert!(Group::finite(&[]).is_err());
        assert!(Group::finite(&[1]).is_err());
        assert!(Group::torus(0).is_err());
        assert!(Group::cantor(0).is_err());
        assert!(Group::padic(4, 2).is_err());
        assert!(Group::padic(3, 0).is_err());
    }

    #[test]
    fn metric_examples() {
        let t = Group::torus(1).unwrap();
        assert!((t.metric(&pt(0.1), &pt(0.9)).unwrap() - 0.2).abs() < 1e-12);
        assert_eq!(t.metric(&pt(0.4), &pt(0.4)).unwrap(), 0.0);

        let c = Group::cantor(3).unwrap();
        assert_eq!(c.metric(&res(&[0, 0, 0]), &res(&[0, 1, 0])).unwrap(), 0.25);
    }

    #[test]
    fn cantor_metric_matches_first_differing_bit_table() {
        // Exhaustive table at depth 3: distance is 2^-j for first differing bit j.
        let c = Group::cantor(3).unwrap();
        for x in c.elements().unwrap() {
            for y in c.elements().unwrap() {
                let (a, b) = (x.residues().unwrap(), y.residues().unwrap());
                let expected = match (0..3).find(|&i| a[i] != b[i]) {
                    Some(i) => 1.0 / (1u32 << (i + 1)) as f64,
                    None => 0.0,
                };
                assert_eq!(c.metric(&x, &y).unwrap(), expected);
            }
        }
    }

    #[test]
    fn padic_metric_uses_valuation() {
        let g = Group::padic(3, 3).unwrap();
        // 9 − 0 has valuation 2, distance 3^-3.
        assert!((g.metric(&res(&[9]), &res(&[0])).unwrap() - 1.0 / 27.0).abs() < 1e-15);
        assert!((g.metric(&res(&[1]), &res(&[0])).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((g.metric(&res(&[6]), &res(&[3])).unwrap() - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn diameters_match_enumeration() {
        let groups = [
            Group::cyclic(2).unwrap(),
            Group::finite(&[3, 5]).unwrap(),
            Group::cantor(1).unwrap(),
            Group::cantor(4).unwrap(),
            Group::padic(3, 2).unwrap(),
        ];
        for g in &groups {
            let els = g.elements().unwrap();
            let max = els
                .iter()
                .flat_map(|x| els.iter().map(move |y| (x, y)))
                .map(|(x, y)| g.metric(x, y).unwrap())
                .fold(0.0, f64::max);
            assert_eq!(g.diameter(), max, "{g}");
        }
        assert_eq!(Group::torus(1).unwrap().diameter(), 0.5);
        assert_eq!(Group::cyclic(2).unwrap().diameter(), 0.5);
    }

    #[test]
    fn ball_mass_examples() {
        let t = Group::torus(1).unwrap();
        assert_eq!(t.haar_ball_mass(0.25), 0.5);
        assert_eq!(t.haar_ball_mass(0.5), 1.0);
        assert_eq!(Group::torus(2).unwrap().haar_ball_mass(0.25), 0.25);

        let z4 = Group::cyclic(4).unwrap();
        let by_count = z4
            .elements()
            .unwrap()
            .iter()
            .filter(|y| z4.metric(&z4.zero(), y).unwrap() <= 0.25)
            .count() as f64
            / 4.0;
        assert_eq!(by_count, 0.75);
        assert_eq!(z4.haar_ball_mass(0.25), 0.75);
    }

    #[test]
    fn ball_mass_matches_enumeration_on_all_finite_variants() {
        let groups = [
            Group::finite(&[4, 3]).unwrap(),
            Group::cantor(4).unwrap(),
            Group::padic(2, 4).unwrap(),
            Group::padic(5, 2).unwrap(),
        ];
        for g in &groups {
            let els = g.elements().unwrap();
            let mut radii: Vec<f64> = els.iter().map(|y| g.metric(&g.zero(), y).unwrap()).collect();
            radii.extend([0.0, 0.01, 0.2, 0.3, 0.6, 1.0]);
            for r in radii {
                let count = els.iter().filter(|y| g.metric(&g.zero(), y).unwrap() <= r).count();
                assert_eq!(g.haar_ball_mass(r), count as f64 / els.len() as f64, "{g} r={r}");
            }
            assert_eq!(g.haar_ball_mass(g.diameter()), 1.0);
        }
    }

    #[test]
    fn haar_sampling_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let z2 = Group::cyclic(2).unwrap();
        let zeros = (0..100_000).filter(|_| z2.haar_sample(&mut rng) == z2.zero()).count();
        let freq = zeros as f64 / 1e5;
        assert!((0.49..=0.51).contains(&freq), "{freq}");

        let t = Group::torus(1).unwrap();
        let mean = (0..100_000)
            .map(|_| (2.0 * std::f64::consts::PI * t.haar_sample(&mut rng).point().unwrap()[0]).cos())
            .sum::<f64>()
            / 1e5;
        assert!(mean.abs() <= 0.01, "{mean}");
    }

    #[test]
    fn haar_sampling_is_deterministic() {
        let g = Group::finite(&[3, 7]).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| g.haar_sample(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(5), draw(5));
    }

    #[test]
    fn element_indexing_round_trips() {
        let g = Group::finite(&[2, 3, 4]).unwrap();
        for (i, x) in g.elements().unwrap().iter().enumerate() {
            assert_eq!(g.index_of(x), i);
        }
    }
}
