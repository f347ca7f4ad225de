//! Experiment configuration: JSON in, validated core objects out.

use haarwalk::aperiodicity::{classify, Coordinate, TorusAnnotation};
use haarwalk::walk::{Observable, ScheduleRule, StepLaw, WalkSchedule};
use haarwalk::{AtomicMeasure, Element, Group};
use serde::{Deserialize, Serialize};

use crate::error::RunError;

pub const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    /// Product of cyclic groups `ℤ/m_1 × … × ℤ/m_k`.
    Finite(Vec<u64>),
    /// `𝕋^d`.
    Torus(usize),
    /// `(ℤ/2)^depth` with the dyadic ultrametric.
    DyadicCantor(u32),
    /// `ℤ/p^depth` with the p-adic ultrametric.
    PAdic { p: u64, depth: u32 },
}

impl GroupSpec {
    pub fn build(&self) -> Result<Group, RunError> {
        let g = match self {
            GroupSpec::Finite(m) => Group::finite(m),
            GroupSpec::Torus(d) => Group::torus(*d),
            GroupSpec::DyadicCantor(k) => Group::cantor(*k),
            GroupSpec::PAdic { p, depth } => Group::padic(*p, *depth),
        };
        g.map_err(|e| RunError::Config(e.to_string()))
    }
}

/// Named measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedMeasure {
    /// Haar measure: exact uniform on finite groups, a sampler on the torus.
    Uniform,
    /// `δ_at`.
    Dirac,
    /// `½δ_0 + ½δ_at`.
    LazyStep,
}

/// One measure: either explicit atoms or a named preset.
///
/// Coordinates of finite-group atoms must be integers. `irrational` marks
/// torus coordinates whose value is known to be irrational; unmarked
/// coordinates are classified automatically (small-denominator rationals
/// are recognized, anything else is unknown).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<(Vec<f64>, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<NamedMeasure>,
    /// Atom location for `dirac` and `lazy-step`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<Vec<f64>>,
    /// Per-atom, per-coordinate flags; for presets a single list for `at`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irrational: Option<Vec<Vec<bool>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    Explicit(Vec<usize>),
    Cyclic(Vec<usize>),
    SeededChoice(u64),
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        ScheduleSpec::Cyclic(vec![0])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservableSpec {
    /// Frequency vector of a character; its real part is the observable.
    Character(Vec<i64>),
    /// Values on a finite group in enumeration order.
    Table(Vec<f64>),
    /// `max(0, 1 − d(x, center)/width)`.
    Bump { center: Vec<f64>, width: f64 },
}

/// Numeric run parameters; every field has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunParams {
    /// Trajectory length for `simulate`.
    pub n: usize,
    /// Number of trials for `simulate`.
    pub trials: u64,
    /// Deviation tolerance for `simulate`.
    pub tolerance: f64,
    /// Quantile of the deviations compared with `tolerance`.
    pub quantile: f64,
    /// Tail threshold for `ldtail`.
    pub epsilon: f64,
    pub n_grid: Vec<usize>,
    /// Number of trials for `ldtail`.
    pub ld_trials: u64,
    /// Number of steps for `converge`.
    pub steps: usize,
    /// Torus grid resolution for Wasserstein upper bounds.
    pub grid_n: usize,
    pub atom_cap: usize,
    /// Target scale for `certify`.
    pub certify_epsilon: f64,
    pub m_cap: usize,
    pub rounds_cap: usize,
    /// Steps available to `certify`.
    pub schedule_length: usize,
    /// Angle for the counterexamples.
    pub alpha: f64,
    pub rotation_n: usize,
    pub shrinking_n: u32,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            n: 100_000,
            trials: 100,
            tolerance: 0.05,
            quantile: 0.95,
            epsilon: 0.2,
            n_grid: vec![20, 40, 80, 160],
            ld_trials: 100_000,
            steps: 64,
            grid_n: 64,
            atom_cap: haarwalk::measure::DEFAULT_ATOM_CAP,
            certify_epsilon: 0.25,
            m_cap: 64,
            rounds_cap: 100_000,
            schedule_length: 1_000_000,
            alpha: GOLDEN,
            rotation_n: 100,
            shrinking_n: 30,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: GroupSpec,
    pub family: Vec<MeasureSpec>,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    /// Defaults to the character with every frequency equal to 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<ObservableSpec>,
    /// Starting point `x_0`; defaults to the identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
    /// Initial distribution for `converge` and `certify`; defaults to `δ_start`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<MeasureSpec>,
    /// Root seed; required by `simulate` and `ldtail`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub run: RunParams,
}

/// A family member after validation.
#[derive(Clone, Debug)]
pub struct ResolvedMeasure {
    pub law: StepLaw,
    /// Coordinate classes for torus atoms.
    pub annotation: Option<TorusAnnotation>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Checks that every part builds and every parameter is in range.
    pub fn validate(&self) -> Result<(), RunError> {
        let g = self.group.build()?;
        self.family()?;
        self.schedule()?;
        self.observable(&g)?;
        self.start(&g)?;
        self.initial()?;
        let r = &self.run;
        let bad = |what: &str| Err(RunError::Config(format!("run.{what}")));
        if r.n == 0 {
            return bad("n must be at least 1");
        }
        if r.trials == 0 {
            return bad("trials must be at least 1");
        }
        if !(r.tolerance > 0.0 && r.tolerance.is_finite()) {
            return bad("tolerance must be positive");
        }
        if !(r.quantile > 0.0 && r.quantile <= 1.0) {
            return bad("quantile must lie in (0, 1]");
        }
        if !(r.epsilon > 0.0 && r.epsilon.is_finite()) {
            return bad("epsilon must be positive");
        }
        if r.n_grid.is_empty() || r.n_grid[0] == 0 || r.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return bad("n_grid must be nonempty and strictly increasing with entries >= 1");
        }
        if r.ld_trials < 100 {
            return bad("ld_trials must be at least 100");
        }
        if r.grid_n < 2 {
            return bad("grid_n must be at least 2");
        }
        if r.atom_cap == 0 || r.m_cap == 0 || r.rounds_cap == 0 || r.schedule_length == 0 {
            return bad("caps must be positive");
        }
        if !(r.certify_epsilon > 0.0 && r.certify_epsilon.is_finite()) {
            return bad("certify_epsilon must be positive");
        }
        if !(r.alpha > 0.0 && r.alpha < 1.0) {
            return bad("alpha must lie in (0, 1)");
        }
        if r.rotation_n == 0 || r.shrinking_n == 0 {
            return bad("counterexample lengths must be at least 1");
        }
        Ok(())
    }

    pub fn group(&self) -> Result<Group, RunError> {
        self.group.build()
    }

    pub fn family(&self) -> Result<Vec<ResolvedMeasure>, RunError> {
        let g = self.group()?;
        if self.family.is_empty() {
            return Err(RunError::Config("family must have at least one member".into()));
        }
        self.family
            .iter()
            .enumerate()
            .map(|(i, m)| resolve_measure(&g, m).map_err(|e| e.context(&format!("family[{i}]"))))
            .collect()
    }

    pub fn schedule(&self) -> Result<WalkSchedule, RunError> {
        let laws = self.family()?.into_iter().map(|m| m.law).collect();
        let rule = match &self.schedule {
            ScheduleSpec::Explicit(v) => ScheduleRule::Explicit(v.clone()),
            ScheduleSpec::Cyclic(v) => ScheduleRule::Cyclic(v.clone()),
            ScheduleSpec::SeededChoice(s) => ScheduleRule::SeededChoice(*s),
        };
        WalkSchedule::new(laws, rule).map_err(|e| RunError::Config(e.to_string()))
    }

    pub fn observable(&self, g: &Group) -> Result<Observable, RunError> {
        let phi = match &self.observable {
            None => Observable::Character(vec![1; character_len(g)]),
            Some(ObservableSpec::Character(k)) => Observable::Character(k.clone()),
            Some(ObservableSpec::Table(v)) => Observable::Table(v.clone()),
            Some(ObservableSpec::Bump { center, width }) => {
                Observable::Bump { center: element(g, center).map_err(|e| e.context("observable"))?, width: *width }
            }
        };
        phi.validate(g).map_err(|e| RunError::Config(e.to_string()))?;
        Ok(phi)
    }

    pub fn start(&self, g: &Group) -> Result<Element, RunError> {
        match &self.start {
            None => Ok(g.zero()),
            Some(c) => element(g, c).map_err(|e| e.context("start")),
        }
    }

    /// The initial distribution as an atomic probability measure.
    pub fn initial(&self) -> Result<AtomicMeasure, RunError> {
        let g = self.group()?;
        match &self.initial {
            None => AtomicMeasure::dirac(g.clone(), self.start(&g)?).map_err(|e| RunError::Config(e.to_string())),
            Some(spec) => match resolve_measure(&g, spec).map_err(|e| e.context("initial"))?.law {
                StepLaw::Atomic { measure, .. } => Ok(measure),
                StepLaw::Haar(_) => {
                    Err(RunError::Config("initial: Haar measure on the torus is not atomic".into()))
                }
            },
        }
    }

    pub fn seed(&self) -> Result<u64, RunError> {
        self.seed.ok_or_else(|| RunError::Config("seed is required for stochastic commands (set \"seed\" or pass --seed)".into()))
    }
}

fn character_len(g: &Group) -> usize {
    g.rank()
}

fn element(g: &Group, coords: &[f64]) -> Result<Element, RunError> {
    if g.is_torus() {
        return g.element_from_reals(coords).map_err(|e| RunError::Config(e.to_string()));
    }
    let ints: Vec<i64> = coords
        .iter()
        .map(|&c| {
            if c.fract() == 0.0 && c.abs() < 9.0e15 {
                Ok(c as i64)
            } else {
                Err(RunError::Config(format!("coordinate {c} is not an integer")))
            }
        })
        .collect::<Result<_, _>>()?;
    g.element_from_ints(&ints).map_err(|e| RunError::Config(e.to_string()))
}

fn classes(g: &Group, coords: &[f64], flags: Option<&Vec<bool>>) -> Result<Vec<Coordinate>, RunError> {
    match flags {
        Some(f) if f.len() != coords.len() => {
            Err(RunError::Config(format!("irrational flags have {} entries for {} coordinates", f.len(), coords.len())))
        }
        Some(f) if !g.is_torus() && f.iter().any(|&b| b) => {
            Err(RunError::Config("irrational flags only apply to torus coordinates".into()))
        }
        _ => Ok(coords
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if flags.is_some_and(|f| f[i]) {
                    Coordinate::Irrational
                } else {
                    classify(c.rem_euclid(1.0))
                }
            })
            .collect()),
    }
}

fn resolve_measure(g: &Group, spec: &MeasureSpec) -> Result<ResolvedMeasure, RunError> {
    let cfg = |m: &str| RunError::Config(m.to_string());
    let flags = spec.irrational.as_ref();
    let (atoms, flag_rows): (Vec<(Vec<f64>, f64)>, Vec<Option<&Vec<bool>>>) = match (&spec.atoms, spec.preset) {
        (Some(_), Some(_)) => return Err(cfg("give either atoms or preset, not both")),
        (None, None) => return Err(cfg("a measure needs atoms or a preset")),
        (Some(atoms), None) => {
            if spec.at.is_some() {
                return Err(cfg("at only applies to presets"));
            }
            if let Some(f) = flags {
                if f.len() != atoms.len() {
                    return Err(cfg(&format!("irrational has {} rows for {} atoms", f.len(), atoms.len())));
                }
            }
            (atoms.clone(), (0..atoms.len()).map(|i| flags.map(|f| &f[i])).collect())
        }
        (None, Some(NamedMeasure::Uniform)) => {
            if spec.at.is_some() || flags.is_some() {
                return Err(cfg("uniform takes no at or irrational fields"));
            }
            if g.is_torus() {
                return Ok(ResolvedMeasure { law: StepLaw::Haar(g.clone()), annotation: None });
            }
            let mu = AtomicMeasure::uniform(g.clone()).map_err(|e| RunError::Config(e.to_string()))?;
            return Ok(ResolvedMeasure { law: StepLaw::atomic(mu).map_err(|e| RunError::Config(e.to_string()))?, annotation: None });
        }
        (None, Some(named)) => {
            let at = match &spec.at {
                Some(a) => a.clone(),
                None if named == NamedMeasure::LazyStep && !g.is_torus() => vec![1.0; character_len(g)],
                None if named == NamedMeasure::Dirac => vec![0.0; g.rank()],
                None => return Err(cfg("lazy-step on the torus needs an explicit at")),
            };
            let row = match flags {
                None => None,
                Some(f) if f.len() == 1 => Some(&f[0]),
                Some(_) => return Err(cfg("irrational for a preset is a single list of per-coordinate flags")),
            };
            let zero = vec![0.0; at.len()];
            match named {
                NamedMeasure::Dirac => (vec![(at, 1.0)], vec![row]),
                _ => (vec![(zero, 0.5), (at, 0.5)], vec![None, row]),
            }
        }
    };
    let mut pts = Vec::with_capacity(atoms.len());
    let mut annotation = g.is_torus().then(TorusAnnotation::default);
    for ((coords, w), row) in atoms.iter().zip(flag_rows) {
        let x = element(g, coords)?;
        let cls = classes(g, coords, row)?;
        if let Some(a) = annotation.as_mut() {
            a.declare(x.clone(), cls);
        }
        pts.push((x, *w));
    }
    let mu = AtomicMeasure::probability(g.clone(), pts).map_err(|e| RunError::Config(e.to_string()))?;
    let law = StepLaw::atomic(mu).map_err(|e| RunError::Config(e.to_string()))?;
    Ok(ResolvedMeasure { law, annotation })
}
