//! Command dispatch.

use std::path::{Path, PathBuf};

use haarwalk::aperiodicity::{full_support_verdict, is_strictly_aperiodic_annotated, AperiodicityVerdict, TorusAnnotation, Verdict};
use haarwalk::counterexample::{dirac_rotation, shrinking_support};
use haarwalk::measure::{total_variation, AtomicMeasure};
use haarwalk::partition::{contraction_certificate_with, CertificateOptions};
use haarwalk::walk::{distribution_pushforward_capped, ld_tail_estimate, simulate_trials, FitOutcome, StepLaw};
use haarwalk::wasserstein::{w1_haar_upper_bound_torus, w1_to_haar};
use serde::Serialize;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::{exit, RunError};
use crate::output::{Cell, Outputs};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    DiracRotation,
    ShrinkingSupport,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::DiracRotation => "dirac-rotation",
            Scenario::ShrinkingSupport => "shrinking-support",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Converge,
    Ldtail,
    AperiodicCheck,
    Certify,
    Counterexample(Scenario),
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Converge => "converge",
            Command::Ldtail => "ldtail",
            Command::AperiodicCheck => "aperiodic-check",
            Command::Certify => "certify",
            Command::Counterexample(s) => s.name(),
        }
    }
}

/// Exit code, human-readable summary and the files written.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

/// Run `cmd` with a validated config, writing outputs under `out`.
///
/// Outcomes that still produce outputs (a verdict of not aperiodic, a tail
/// below resolution) return `Ok` with a nonzero exit code; errors that stop
/// the run before any output return `Err`.
pub fn run(cmd: Command, cfg: &ExperimentConfig, preset: Option<&str>, out: &Path) -> Result<RunOutcome, RunError> {
    cfg.validate()?;
    let label = match cmd {
        Command::Counterexample(_) => "counterexample",
        c => c.name(),
    };
    let mut o = Outputs::new(out, label, preset, cfg)?;
    let (code, lines, summary) = match cmd {
        Command::Simulate => simulate(cfg, &mut o)?,
        Command::Converge => converge(cfg, &mut o)?,
        Command::Ldtail => ldtail(cfg, &mut o)?,
        Command::AperiodicCheck => aperiodic_check(cfg, &mut o)?,
        Command::Certify => certify(cfg, &mut o)?,
        Command::Counterexample(Scenario::DiracRotation) => rotation(cfg, &mut o)?,
        Command::Counterexample(Scenario::ShrinkingSupport) => shrinking(cfg, &mut o)?,
    };
    let files = o.manifest(cmd.name(), code, summary)?;
    Ok(RunOutcome { exit_code: code, lines, files })
}

/// Run inside a pool of `threads` workers, or the default pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, RunError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(RunError::Config("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| RunError::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

type Step = (i32, Vec<String>, serde_json::Value);

/// Empirical `q`-quantile: the smallest sample with at least `q·T` samples at or below it.
pub fn empirical_quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[k - 1]
}

fn simulate(cfg: &ExperimentConfig, o: &mut Outputs) -> Result<Step, RunError> {
    let seed = cfg.seed()?;
    let g = cfg.group()?;
    let sched = cfg.schedule()?;
    let phi = cfg.observable(&g)?;
    let x0 = cfg.start(&g)?;
    let r = &cfg.run;
    let reps = simulate_trials(&sched, &phi, &x0, r.n, seed, r.trials)?;
    let rows = reps.iter().map(|t| vec![t.n.into(), t.trial.into(), t.deviation.into()]).collect();
    o.csv("simulate.csv", &["n", "trial", "deviation"], rows)?;
    let devs: Vec<f64> = reps.iter().map(|t| t.deviation).collect();
    let q = empirical_quantile(&devs, r.quantile);
    let within = devs.iter().filter(|&&d| d < r.tolerance).count();
    let pass = q < r.tolerance;
    let lines = vec![
        format!("walk: {} trials of n = {} on {g}", r.trials, r.n),
        format!("walk: haar integral {:?}", reps[0].haar_integral),
        format!("walk: {}% quantile of |birkhoff - integral| = {q:.6} (tolerance {})", r.quantile * 100.0, r.tolerance),
        format!("walk: {within}/{} trials within tolerance", r.trials),
    ];
    let summary = json!({
        "haar_integral": reps[0].haar_integral,
        "quantile": r.quantile,
        "quantile_deviation": q,
        "tolerance": r.tolerance,
        "within_tolerance": within,
        "trials": r.trials,
        "pass": pass,
    });
    Ok((if pass { exit::OK } else { exit::HYPOTHESIS }, lines, summary))
}

fn converge(cfg: &ExperimentConfig, o: &mut Outputs) -> Result<Step, RunError> {
    let g = cfg.group()?;
    let sched = cfg.schedule()?;
    let nu0 = cfg.initial()?;
    let r = &cfg.run;
    let mut dists = vec![nu0.clone()];
    dists.extend(distribution_pushforward_capped(&sched, &nu0, r.steps, r.atom_cap)?);
    let exact = g.is_finite();
    let haar = if exact { Some(AtomicMeasure::uniform(g.clone())?) } else { None };
    let mut rows = Vec::with_capacity(dists.len());
    let mut w = Vec::with_capacity(dists.len());
    for (n, nu) in dists.iter().enumerate() {
        let (w1, tv) = match &haar {
            Some(h) => (w1_to_haar(nu)?, total_variation(nu, h)?),
            // An atomic measure is singular to Lebesgue measure.
            None => (w1_haar_upper_bound_torus(nu, r.grid_n)?, 1.0),
        };
        w.push(w1);
        rows.push(vec![n.into(), w1.into(), tv.into()]);
    }
    o.csv("converge.csv", &["n", "w1_to_haar", "total_variation"], rows)?;
    let worst_rise = w.windows(2).map(|p| p[1] - p[0]).fold(f64::NEG_INFINITY, f64::max);
    let nonincreasing = worst_rise <= haarwalk::wasserstein::FINITE_TOL;
    let kind = if exact { "exact" } else { "grid_upper_bound" };
    let mut lines = vec![
        format!("wasserstein: {} steps on {g}, w1 column is {kind}", r.steps),
        format!("wasserstein: W(nu_0, h) = {:.6}, W(nu_{}, h) = {:.6}", w[0], r.steps, w[r.steps]),
    ];
    // Monotonicity under convolution is a theorem only for the exact distance.
    let code = if exact && !nonincreasing {
        lines.push(format!("wasserstein: distance rose by {worst_rise:e} between consecutive steps"));
        exit::HYPOTHESIS
    } else {
        exit::OK
    };
    let summary = json!({
        "w1_kind": kind,
        "grid_n": if exact { None } else { Some(r.grid_n) },
        "first_w1": w[0],
        "last_w1": w[r.steps],
        "nonincreasing": nonincreasing,
    });
    Ok((code, lines, summary))
}

fn ldtail(cfg: &ExperimentConfig, o: &mut Outputs) -> Result<Step, RunError> {
    let seed = cfg.seed()?;
    let g = cfg.group()?;
    let sched = cfg.schedule()?;
    let phi = cfg.observable(&g)?;
    let x0 = cfg.start(&g)?;
    let r = &cfg.run;
    let rep = ld_tail_estimate(&sched, &phi, &x0, r.epsilon, &r.n_grid, r.ld_trials, seed)?;
    let rows = rep
        .rows
        .iter()
        .map(|row| vec![row.n.into(), row.p_hat.into(), row.ci_lo.into(), row.ci_hi.into()])
        .collect();
    o.csv("ldtail.csv", &["n", "p_hat", "ci_lo", "ci_hi"], rows)?;
    o.json("ldtail.json", &rep)?;
    let mut lines = vec![format!("walk: tail of |birkhoff - integral| > {} over {} trials on {g}", r.epsilon, r.ld_trials)];
    for row in &rep.rows {
        lines.push(format!("walk: n = {:>6}  p_hat = {:.6}  [{:.6}, {:.6}]", row.n, row.p_hat, row.ci_lo, row.ci_hi));
    }
    let code = match rep.fit {
        FitOutcome::Fitted { slope, slope_se, intercept, reduced_chi2, .. } => {
            lines.push(format!(
                "walk: log p_hat = {intercept:.4} + ({slope:.6} +- {slope_se:.6}) n, reduced chi2 {reduced_chi2:.3}"
            ));
            exit::OK
        }
        FitOutcome::TooFewPoints { points } => {
            lines.push(format!("walk: only {points} grid points have p_hat > 0; no fit (increase trials or lower epsilon)"));
            exit::RESOLUTION
        }
        FitOutcome::BelowResolution => {
            lines.push("walk: tail below resolution; increase trials or lower epsilon".into());
            exit::RESOLUTION
        }
    };
    let summary = json!({
        "fit": rep.fit,
        "rate": rep.rate().map(|(d, se)| json!({"delta_hat": d, "se": se})),
    });
    Ok((code, lines, summary))
}

#[derive(Serialize)]
struct MemberVerdict {
    member: usize,
    #[serde(flatten)]
    verdict: AperiodicityVerdict,
}

fn aperiodic_check(cfg: &ExperimentConfig, o: &mut Outputs) -> Result<Step, RunError> {
    let family = cfg.family()?;
    let mut out = Vec::with_capacity(family.len());
    for (i, m) in family.iter().enumerate() {
        let v = match &m.law {
            StepLaw::Haar(_) => full_support_verdict(),
            StepLaw::Atomic { measure, .. } => {
                let auto;
                let ann = match &m.annotation {
                    Some(a) => a,
                    None => {
                        auto = TorusAnnotation::auto(measure);
                        &auto
                    }
                };
                is_strictly_aperiodic_annotated(measure, ann)?
            }
        };
        out.push(MemberVerdict { member: i, verdict: v });
    }
    let rows = out
        .iter()
        .map(|m| {
            let w = m.verdict.witness.as_ref();
            vec![
                m.member.into(),
                Cell::Text(to_snake(&m.verdict.verdict)),
                Cell::Text(to_snake(&m.verdict.method)),
                w.and_then(|w| w.index).into(),
                Cell::Text(w.map_or(String::new(), |w| w.coset_representative.to_string())),
            ]
        })
        .collect();
    o.csv("aperiodic.csv", &["member", "verdict", "method", "subgroup_index", "coset_representative"], rows)?;
    o.json("aperiodic.json", &out)?;
    let mut lines = Vec::new();
    for m in &out {
        let v = &m.verdict;
        lines.push(format!("aperiodicity: member {}: {} ({})", m.member, to_snake(&v.verdict), to_snake(&v.method)));
        lines.push(format!("aperiodicity:   {}", v.note));
        if let Some(w) = &v.witness {
            let gens: Vec<String> = w.generators.iter().map(ToString::to_string).collect();
            let index = w.index.map_or("infinite".to_string(), |i| i.to_string());
            lines.push(format!(
                "aperiodicity:   witness: coset {} + <{}>, index {index}",
                w.coset_representative,
                gens.join(", ")
            ));
        }
    }
    let any = |t: Verdict| out.iter().any(|m| m.verdict.verdict == t);
    let code = if any(Verdict::NotAperiodic) {
        exit::HYPOTHESIS
    } else if any(Verdict::Undecided) {
        exit::UNDECIDED
    } else {
        exit::OK
    };
    let verdicts: Vec<String> = out.iter().map(|m| to_snake(&m.verdict.verdict)).collect();
    Ok((code, lines, json!({ "verdicts": verdicts })))
}

fn to_snake<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn certify(cfg: &ExperimentConfig, o: &mut Outputs) -> Result<Step, RunError> {
    let g = cfg.group()?;
    let sched = cfg.schedule()?;
    let nu = cfg.initial()?;
    let r = &cfg.run;
    let opts = CertificateOptions { m_cap: r.m_cap, rounds_cap: r.rounds_cap };
    let step = |n: usize| (n <= r.schedule_length).then(|| sched.atomic_step(n).ok().cloned()).flatten();
    let c = contraction_certificate_with(step, &nu, r.certify_epsilon, opts)?;
    let rows = c
        .stages
        .iter()
        .map(|s| {
            vec![
                s.stage.into(),
                s.first_step.into(),
                s.window_delta.into(),
                s.extracted.into(),
                s.residual.into(),
                s.residual_expected.into(),
            ]
        })
        .collect();
    o.csv(
        "certificate.csv",
        &["stage", "first_step", "window_delta", "extracted", "residual", "residual_expected"],
        rows,
    )?;
    o.json("certificate.json", &c)?;
    let ok = c.within_nominal() && c.within_structural();
    let mut lines = vec![
        format!("certificate: {g}, epsilon = {}, {} cells of diameter <= {:.6}", c.epsilon, c.cells, c.max_cell_diameter),
        format!("certificate: m = {}, delta = {:e}, r = {} rounds ({} steps)", c.m, c.delta, c.r, c.m * c.r),
        format!("certificate: residual mass (1 - delta)^r = {:e}, max deviation {:e}", c.residual_masses[c.r], c.residual_error()),
        format!("certificate: exact W(final, h) = {:.6}", c.final_w1),
        format!("certificate: nominal bound (Diam + 1) eps = {:.6}, structural bound = {:.6}", c.nominal_bound, c.structural_bound),
    ];
    if !ok {
        lines.push("certificate: the final distance exceeds a bound".into());
    }
    let summary = json!({
        "m": c.m,
        "r": c.r,
        "delta": c.delta,
        "final_w1": c.final_w1,
        "nominal_bound": c.nominal_bound,
        "structural_bound": c.structural_bound,
        "within_nominal": c.within_nominal(),
        "within_structural": c.within_structural(),
        "residual_error": c.residual_error(),
        "reassembly_error": c.reassembly_error,
    });
    Ok((if ok { exit::OK } else { exit::HYPOTHESIS }, lines, summary))
}

fn rotation(cfg: &ExperimentConfig, o: &mut Outputs) -> Result<Step, RunError> {
    let r = &cfg.run;
    let rows = dirac_rotation(r.alpha, r.rotation_n, r.grid_n)?;
    let w0 = rows[0].w1;
    let constant = rows.iter().all(|row| row.w1 == w0) && w0 > 0.0;
    let min_upper = rows.iter().map(|row| row.upper_bound).fold(f64::INFINITY, f64::min);
    o.csv(
        "dirac_rotation.csv",
        &["n", "position", "w1_to_haar", "upper_bound"],
        rows.iter().map(|row| vec![row.n.into(), row.position.into(), row.w1.into(), row.upper_bound.into()]).collect(),
    )?;
    let lines = vec![
        format!("counterexample: mu = delta_alpha on the circle, alpha = {:?}", r.alpha),
        format!("counterexample: mu^n is the single atom n alpha for n = 1..{}", r.rotation_n),
        format!("counterexample: W(mu^n, h) = {w0} for every n; no convergence to Haar measure"),
    ];
    let summary = json!({
        "alpha": r.alpha,
        "n_max": r.rotation_n,
        "w1_constant": w0,
        "constant": constant,
        "min_upper_bound": min_upper,
    });
    Ok((if constant { exit::OK } else { exit::HYPOTHESIS }, lines, summary))
}

fn shrinking(cfg: &ExperimentConfig, o: &mut Outputs) -> Result<Step, RunError> {
    let r = &cfg.run;
    let rows = shrinking_support(r.alpha, r.shrinking_n)?;
    let all = rows.iter().all(|row| row.within_bound);
    o.csv(
        "shrinking_support.csv",
        &["n", "max_coefficient", "bound_coefficient", "enumerated_atoms", "float_max_atom", "bound", "within_bound"],
        rows.iter()
            .map(|row| {
                vec![
                    row.n.into(),
                    row.max_coefficient.into(),
                    row.bound_coefficient.into(),
                    row.enumerated_atoms.into(),
                    row.float_max_atom.into(),
                    row.bound.into(),
                    row.within_bound.into(),
                ]
            })
            .collect(),
    )?;
    let last = rows.last().expect("n_max >= 1");
    let lines = vec![
        format!("counterexample: mu_j = 1/2 delta_0 + 1/2 delta_(alpha/2^j), alpha = {:?}", r.alpha),
        format!(
            "counterexample: atoms of mu_n * ... * mu_1 are alpha K / 2^n with K <= 2^n - 1, checked for n = 1..{}",
            r.shrinking_n
        ),
        format!("counterexample: n = {}: largest atom alpha (1 - 2^-n) = {:?} < alpha", last.n, last.bound),
    ];
    let summary = json!({ "alpha": r.alpha, "n_max": r.shrinking_n, "all_within_bound": all });
    Ok((if all { exit::OK } else { exit::HYPOTHESIS }, lines, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_is_the_order_statistic() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(empirical_quantile(&v, 0.95), 95.0);
        assert_eq!(empirical_quantile(&v, 1.0), 100.0);
        assert_eq!(empirical_quantile(&[3.0], 0.5), 3.0);
    }
}
