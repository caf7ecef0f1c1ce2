//! End-to-end implication checks on corpora, and a margin-minimizing search.
//!
//! A theorem `Re H(f) > a  =>  Re C(f) > b` is checked on a function by
//! measuring both margins on the same grid. A function whose sampled
//! hypothesis margin is positive while its conclusion margin is not would be
//! a counterexample; such a result is recomputed at four times the angular
//! resolution (and with the expansion padded by 16 terms) before it is
//! reported as [`Status::Violation`].

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::corpus::{binomial_series, default_corpus, CorpusEntry, CorpusManifest};
use crate::error::{Error, Result};
use crate::functionals::{profile, FunctionalKind, FunctionalProfile};
use crate::grid::DiskGrid;
use crate::series::{MultivalentFunction, PowerSeries};
use crate::thresholds::{
    feasible_t37, t24_lower_endpoint, ThresholdSpec, TheoremId,
};

/// Weight of the hypothesis violation in the sharpness objective.
pub const PENALTY_WEIGHT: f64 = 1e3;
/// Factor applied to the angular count before a violation is reported.
pub const RECHECK_FACTOR: usize = 4;
/// Extra zero terms appended to the expansion for the recheck.
pub const RECHECK_EXTRA_ORDER: usize = 16;

/// `Re kind(f) > bound`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub kind: FunctionalKind,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImplicationCase {
    pub case_id: String,
    pub theorem_id: TheoremId,
    pub p: u32,
    pub b: Option<f64>,
    pub level: Option<f64>,
    pub hypothesis: Condition,
    pub conclusion: Condition,
}

impl ImplicationCase {
    /// Whether a function must carry the declared fixed coefficient.
    pub fn fixed_coefficient(&self) -> Option<f64> {
        if self.theorem_id.uses_fixed_coefficient() {
            self.b
        } else {
            None
        }
    }

    fn accepts(&self, f: &MultivalentFunction) -> bool {
        f.p() == self.p && self.fixed_coefficient().is_none_or(|b| f.b() == Some(b))
    }
}

fn case_id(theorem: TheoremId, p: u32, b: Option<f64>, level: Option<f64>) -> String {
    let mut id = format!("{theorem}/p{p}");
    if let Some(b) = b {
        id.push_str(&format!("/b{b}"));
    }
    if let (Some(name), Some(level)) = (theorem.level_name(), level) {
        id.push_str(&format!("/{name}{level}"));
    }
    id
}

/// Pairs a theorem's hypothesis and conclusion with bounds from [`crate::thresholds`].
pub fn build_case(theorem: TheoremId, p: u32, b: Option<f64>, level: Option<f64>) -> Result<ImplicationCase> {
    use FunctionalKind::*;
    let spec = ThresholdSpec::compute(theorem, p, b, level)?;
    let out = spec.output_level;
    let lv = spec.input_level;
    let (hypothesis, conclusion) = match theorem {
        TheoremId::T22 | TheoremId::T33 => ((Convexity, out), (SqrtDerivative, lv.unwrap())),
        TheoremId::T24 | TheoremId::T37 => ((SqrtDerivative, out), (PowerRatio, lv.unwrap())),
        TheoremId::T25 | TheoremId::T38 => ((SqrtDerivative, out), (PowerRatio, 0.5)),
        TheoremId::T31 => ((Convexity, out), (Starlikeness, lv.unwrap())),
        TheoremId::T32 => ((Starlikeness, out), (PowerRatio, lv.unwrap())),
        TheoremId::LemmaPhi => {
            return Err(Error::Domain("the auxiliary lemma is not an implication".into()));
        }
    };
    Ok(ImplicationCase {
        case_id: case_id(theorem, p, spec.b, lv),
        theorem_id: theorem,
        p,
        b: spec.b,
        level: lv,
        hypothesis: Condition {
            kind: hypothesis.0,
            bound: hypothesis.1,
        },
        conclusion: Condition {
            kind: conclusion.0,
            bound: conclusion.1,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Status {
    HypothesisFails,
    Verified,
    #[serde(rename = "VIOLATION")]
    Violation,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::HypothesisFails => "HypothesisFails",
            Status::Verified => "Verified",
            Status::Violation => "VIOLATION",
        })
    }
}

fn classify(hypothesis_margin: f64, conclusion_margin: f64) -> Status {
    if hypothesis_margin <= 0.0 {
        Status::HypothesisFails
    } else if conclusion_margin > 0.0 {
        Status::Verified
    } else {
        Status::Violation
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub case_id: String,
    pub function_id: String,
    pub hypothesis_margin: f64,
    pub conclusion_margin: f64,
    pub status: Status,
    pub grid_fingerprint: String,
    pub truncation_warning: bool,
    /// Set when the first evaluation looked like a violation and was recomputed.
    pub rechecked: bool,
}

fn require_guards(f: &FunctionalProfile, case: &ImplicationCase) -> Result<()> {
    let kinds = [case.hypothesis.kind, case.conclusion.kind];
    let needs_derivative = kinds
        .iter()
        .any(|k| matches!(k, FunctionalKind::Convexity | FunctionalKind::SqrtDerivative));
    if needs_derivative && !f.derivative_zero_free() {
        return Err(Error::NotLocallyValent);
    }
    if kinds.contains(&FunctionalKind::Starlikeness) && !f.unit_zero_free() {
        return Err(Error::UnitVanishes {
            min_modulus: f.min_modulus_unit,
            winding: f.winding_unit,
        });
    }
    Ok(())
}

fn check_class(f: &MultivalentFunction, case: &ImplicationCase) -> Result<()> {
    if f.p() != case.p {
        return Err(Error::ClassMismatch(format!("function has p = {}, case needs p = {}", f.p(), case.p)));
    }
    if let Some(b) = case.fixed_coefficient() {
        if f.b() != Some(b) {
            return Err(Error::ClassMismatch(format!(
                "function declares b = {:?}, case needs b = {b}",
                f.b()
            )));
        }
    }
    Ok(())
}

fn margins(prof: &FunctionalProfile, case: &ImplicationCase) -> (f64, f64) {
    (
        prof.estimate(case.hypothesis.kind).value - case.hypothesis.bound,
        prof.estimate(case.conclusion.kind).value - case.conclusion.bound,
    )
}

fn check_with_profile(
    f: &MultivalentFunction,
    function_id: &str,
    case: &ImplicationCase,
    grid: &DiskGrid,
    prof: &FunctionalProfile,
) -> Result<VerificationReport> {
    check_class(f, case)?;
    require_guards(prof, case)?;
    let (mut hm, mut cm) = margins(prof, case);
    let mut status = classify(hm, cm);
    let mut fingerprint = prof.grid_fingerprint.clone();
    let mut truncation_warning = prof.truncation_warning;
    let mut rechecked = false;
    if status == Status::Violation {
        let fine = grid.with_angular_count(grid.angular_count() * RECHECK_FACTOR)?;
        let padded = f.with_order(f.unit().order() + RECHECK_EXTRA_ORDER);
        let again = profile(&padded, &fine);
        (hm, cm) = margins(&again, case);
        status = classify(hm, cm);
        fingerprint = again.grid_fingerprint;
        truncation_warning = again.truncation_warning;
        rechecked = true;
    }
    Ok(VerificationReport {
        case_id: case.case_id.clone(),
        function_id: function_id.to_string(),
        hypothesis_margin: hm,
        conclusion_margin: cm,
        status,
        grid_fingerprint: fingerprint,
        truncation_warning,
        rechecked,
    })
}

/// Checks one function against one implication on `grid`.
pub fn check(
    f: &MultivalentFunction,
    function_id: &str,
    case: &ImplicationCase,
    grid: &DiskGrid,
) -> Result<VerificationReport> {
    check_class(f, case)?;
    check_with_profile(f, function_id, case, grid, &profile(f, grid))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusCounts {
    pub hypothesis_fails: usize,
    pub verified: usize,
    pub violation: usize,
    /// Functions of the case's class that failed a zero-freeness guard on this grid.
    pub excluded: usize,
}

impl StatusCounts {
    fn add(&mut self, status: Status) {
        match status {
            Status::HypothesisFails => self.hypothesis_fails += 1,
            Status::Verified => self.verified += 1,
            Status::Violation => self.violation += 1,
        }
    }

    fn merge(&mut self, other: &StatusCounts) {
        self.hypothesis_fails += other.hypothesis_fails;
        self.verified += other.verified;
        self.violation += other.violation;
        self.excluded += other.excluded;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub case: ImplicationCase,
    pub counts: StatusCounts,
    pub min_conclusion_margin_verified: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub grid_fingerprint: String,
    pub corpus_seed: u64,
    pub cases: Vec<CaseSummary>,
    pub totals: StatusCounts,
    pub reports: Vec<VerificationReport>,
    /// No violation survived the recheck.
    pub passed: bool,
}

impl SuiteReport {
    /// `case_id,function_id,hypothesis_margin,conclusion_margin,status,truncation_warning,rechecked,grid_fingerprint`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "case_id,function_id,hypothesis_margin,conclusion_margin,status,truncation_warning,rechecked,grid_fingerprint\n",
        );
        for r in &self.reports {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.case_id,
                r.function_id,
                r.hypothesis_margin,
                r.conclusion_margin,
                r.status,
                r.truncation_warning,
                r.rechecked,
                r.grid_fingerprint
            ));
        }
        out
    }
}

/// Checks every case against every corpus function of its class, in parallel.
///
/// Each function's profile is computed once. Reports are ordered by
/// `(case_id, function_id)` regardless of scheduling.
pub fn run_suite(cases: &[ImplicationCase], corpus: &CorpusManifest, grid: &DiskGrid) -> Result<SuiteReport> {
    let profiles: Vec<FunctionalProfile> = corpus
        .entries
        .par_iter()
        .map(|e| profile(&e.function, grid))
        .collect();

    let pairs: Vec<(usize, usize)> = cases
        .iter()
        .enumerate()
        .flat_map(|(ci, case)| {
            corpus
                .entries
                .iter()
                .enumerate()
                .filter(move |(_, e)| case.accepts(&e.function))
                .map(move |(ei, _)| (ci, ei))
        })
        .collect();

    let results: Vec<(usize, Result<VerificationReport>)> = pairs
        .par_iter()
        .map(|&(ci, ei)| {
            let e: &CorpusEntry = &corpus.entries[ei];
            (ci, check_with_profile(&e.function, &e.function_id, &cases[ci], grid, &profiles[ei]))
        })
        .collect();

    let mut per_case: BTreeMap<String, (usize, StatusCounts, Option<f64>)> = BTreeMap::new();
    for (ci, case) in cases.iter().enumerate() {
        per_case.entry(case.case_id.clone()).or_insert((ci, StatusCounts::default(), None));
    }
    let mut reports = Vec::with_capacity(results.len());
    for (ci, result) in results {
        let slot = per_case.get_mut(&cases[ci].case_id).expect("case registered");
        match result {
            Ok(report) => {
                slot.1.add(report.status);
                if report.status == Status::Verified {
                    slot.2 = Some(slot.2.map_or(report.conclusion_margin, |m: f64| m.min(report.conclusion_margin)));
                }
                reports.push(report);
            }
            Err(Error::NotLocallyValent | Error::UnitVanishes { .. }) => slot.1.excluded += 1,
            Err(e) => return Err(e),
        }
    }
    reports.sort_by(|a, b| (&a.case_id, &a.function_id).cmp(&(&b.case_id, &b.function_id)));

    let mut totals = StatusCounts::default();
    let summaries: Vec<CaseSummary> = per_case
        .into_values()
        .map(|(ci, counts, min_margin)| {
            totals.merge(&counts);
            CaseSummary {
                case: cases[ci].clone(),
                counts,
                min_conclusion_margin_verified: min_margin,
            }
        })
        .collect();
    Ok(SuiteReport {
        grid_fingerprint: grid.fingerprint(),
        corpus_seed: corpus.seed,
        passed: totals.violation == 0,
        cases: summaries,
        totals,
        reports,
    })
}

/// Fixed coefficients used by the default sweep.
pub const DEFAULT_B_VALUES: [f64; 4] = [0.0, 0.25, 0.5, 1.0];
pub const DEFAULT_P_VALUES: [u32; 3] = [1, 2, 3];

/// In-domain parameter sweep of one theorem over `p_values` and [`DEFAULT_B_VALUES`].
pub fn default_cases(theorem: TheoremId, p_values: &[u32]) -> Vec<ImplicationCase> {
    let mut out = Vec::new();
    for &p in p_values {
        let pf = p as f64;
        let mut params: Vec<(Option<f64>, Option<f64>)> = Vec::new();
        match theorem {
            TheoremId::T22 => params.extend([0.25, 0.5, 0.75].map(|l| (None, Some(l)))),
            TheoremId::T24 => {
                let lo = t24_lower_endpoint(p).expect("p >= 1");
                params.extend([lo + 0.5 * (1.0 - lo), 0.95].map(|l| (None, Some(l))));
            }
            TheoremId::T25 => params.push((None, None)),
            TheoremId::T31 => {
                for frac in [0.25, 0.5, 0.75] {
                    for b in DEFAULT_B_VALUES {
                        params.push((Some(b), Some(frac * pf)));
                    }
                }
            }
            TheoremId::T32 | TheoremId::T33 => {
                for l in [0.25, 0.5, 0.75] {
                    for b in DEFAULT_B_VALUES {
                        params.push((Some(b), Some(l)));
                    }
                }
            }
            TheoremId::T37 => {
                for g in [0.8, 0.9, 0.95] {
                    for b in DEFAULT_B_VALUES {
                        if feasible_t37(g, p, b).unwrap_or(false) {
                            params.push((Some(b), Some(g)));
                        }
                    }
                }
            }
            TheoremId::T38 => params.extend(DEFAULT_B_VALUES.map(|b| (Some(b), None))),
            TheoremId::LemmaPhi => {}
        }
        out.extend(params.into_iter().filter_map(|(b, l)| build_case(theorem, p, b, l).ok()));
    }
    out
}

/// Every implication theorem over its default sweep.
pub fn default_suite_cases(p_values: &[u32]) -> Vec<ImplicationCase> {
    TheoremId::IMPLICATIONS
        .iter()
        .flat_map(|&t| default_cases(t, p_values))
        .collect()
}

/// Default corpora for every class the cases need, merged into one manifest
/// with class-prefixed function ids.
pub fn corpus_for_cases(cases: &[ImplicationCase], seed: u64) -> Result<CorpusManifest> {
    corpus_for_cases_with(cases, seed, |p, b| default_corpus(p, b, seed))
}

/// As [`corpus_for_cases`], with `make(p, b)` building each class corpus.
pub fn corpus_for_cases_with<F>(cases: &[ImplicationCase], seed: u64, make: F) -> Result<CorpusManifest>
where
    F: Fn(u32, Option<f64>) -> Result<CorpusManifest> + Sync,
{
    let mut classes: Vec<(u32, Option<u64>)> = cases
        .iter()
        .map(|c| (c.p, c.fixed_coefficient().map(f64::to_bits)))
        .collect();
    classes.sort_unstable();
    classes.dedup();
    let corpora: Vec<Result<CorpusManifest>> = classes
        .par_iter()
        .map(|&(p, b)| make(p, b.map(f64::from_bits)))
        .collect();
    let mut entries = Vec::new();
    for ((p, b), corpus) in classes.iter().zip(corpora) {
        let prefix = match b {
            Some(b) => format!("p{p}-b{}", f64::from_bits(*b)),
            None => format!("p{p}"),
        };
        for mut e in corpus?.entries {
            e.function_id = format!("{prefix}/{}", e.function_id);
            entries.push(e);
        }
    }
    Ok(CorpusManifest { seed, entries })
}

/// Where the sharpness search starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StartPoint {
    /// `z^p`, or `z^p (1 + b z)` in `A_{p,b}`.
    Monomial,
    /// Dilated, truncated `z^p (1 - rz)^{-t}` with `t = b` in `A_{p,b}` (keeping `u_1 = b`)
    /// and `t = 1` in `A_p`. Falls back to the monomial when no dilation satisfies the hypothesis.
    HalfPlaneKernel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub case: ImplicationCase,
    pub seed: u64,
    pub budget: usize,
    pub free_degrees: usize,
    pub start: StartPoint,
    pub penalty_weight: f64,
    pub evaluations: usize,
    pub best: MultivalentFunction,
    pub hypothesis_margin: f64,
    pub conclusion_margin: f64,
    pub status: Status,
    /// Objective after the start point and after each accepted step.
    pub trace: Vec<f64>,
    /// Present when the best point looked like a violation and was re-evaluated on a doubled grid.
    pub recheck: Option<VerificationReport>,
    pub grid_fingerprint: String,
}

fn objective(hm: f64, cm: f64) -> f64 {
    cm + PENALTY_WEIGHT * (-hm).max(0.0)
}

struct Probe<'a> {
    case: &'a ImplicationCase,
    grid: &'a DiskGrid,
    p: u32,
    b: Option<f64>,
    evaluations: usize,
}

impl Probe<'_> {
    fn function(&self, unit: &[Complex64]) -> Result<MultivalentFunction> {
        let unit = PowerSeries::new(unit.to_vec())?;
        match self.b {
            Some(b) => MultivalentFunction::with_fixed_coefficient(self.p, b, unit),
            None => MultivalentFunction::new(self.p, unit),
        }
    }

    /// `(objective, hypothesis margin, conclusion margin)`; infinite objective off the guards.
    fn eval(&mut self, unit: &[Complex64]) -> Result<(f64, f64, f64)> {
        self.evaluations += 1;
        let f = self.function(unit)?;
        let prof = profile(&f, self.grid);
        if require_guards(&prof, self.case).is_err() {
            return Ok((f64::INFINITY, f64::NAN, f64::NAN));
        }
        let (hm, cm) = margins(&prof, self.case);
        Ok((objective(hm, cm), hm, cm))
    }
}

/// Dilation factors tried, in order, for the kernel start.
const WARM_START_DILATIONS: [f64; 7] = [0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3];

/// Start coefficients and their evaluation. Kernel starts use `u(rz)` truncated
/// at `degree`, with the largest dilation `r` whose evaluation satisfies the
/// guards and the hypothesis; each attempt counts against the budget.
fn start_point(
    probe: &mut Probe<'_>,
    budget: usize,
    start: StartPoint,
    degree: usize,
) -> Result<(Vec<Complex64>, (f64, f64, f64))> {
    let b = probe.b;
    let mut monomial = vec![Complex64::new(1.0, 0.0), Complex64::new(b.unwrap_or(0.0), 0.0)];
    monomial = pad(monomial, degree);
    let t = match (start, b) {
        (StartPoint::Monomial, _) | (_, Some(0.0)) => {
            let eval = probe.eval(&monomial)?;
            return Ok((monomial, eval));
        }
        (StartPoint::HalfPlaneKernel, Some(b)) => b,
        (StartPoint::HalfPlaneKernel, None) => 1.0,
    };
    let kernel = binomial_series(t, degree);
    for r in WARM_START_DILATIONS {
        if probe.evaluations + 1 >= budget {
            break;
        }
        let mut unit: Vec<Complex64> = kernel.iter().zip(0..).map(|(c, k)| c * r.powi(k)).collect();
        if let Some(b) = b {
            unit[1] = Complex64::new(b, 0.0);
        }
        let eval = probe.eval(&unit)?;
        if eval.0.is_finite() && eval.1 > 0.0 {
            return Ok((unit, eval));
        }
    }
    let eval = probe.eval(&monomial)?;
    Ok((monomial, eval))
}

fn pad(mut unit: Vec<Complex64>, degree: usize) -> Vec<Complex64> {
    unit.resize(degree + 1, Complex64::new(0.0, 0.0));
    unit
}

/// Seeded hill climb over the free coefficients of `u` minimizing
/// `conclusion_margin + PENALTY_WEIGHT * max(0, -hypothesis_margin)`.
///
/// The free coefficients are `u_1..u_d` in `A_p` and `u_2..u_{d+1}` in `A_{p,b}`
/// (`d = free_degrees`), real and imaginary parts moved one at a time with a
/// step that shrinks after repeated rejections. `budget` counts function
/// evaluations, including the start point.
pub fn sharpness_search(
    case: &ImplicationCase,
    free_degrees: usize,
    budget: usize,
    seed: u64,
    start: StartPoint,
    grid: &DiskGrid,
) -> Result<SharpnessReport> {
    if budget == 0 {
        return Err(Error::Domain("budget must be at least 1".into()));
    }
    let first_free = if case.fixed_coefficient().is_some() { 2 } else { 1 };
    let degree = first_free + free_degrees.max(1) - 1;
    let mut probe = Probe {
        case,
        grid,
        p: case.p,
        b: case.fixed_coefficient(),
        evaluations: 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (mut best, (mut best_obj, mut best_hm, mut best_cm)) = start_point(&mut probe, budget, start, degree)?;
    let mut trace = vec![best_obj];
    let mut step = 0.1;
    let mut rejections = 0;
    while probe.evaluations < budget {
        let index = rng.gen_range(first_free..=degree);
        let imaginary = rng.gen_bool(0.5);
        let delta = step * (2.0 * rng.gen::<f64>() - 1.0) / index as f64;
        let mut candidate = best.clone();
        if imaginary {
            candidate[index].im += delta;
        } else {
            candidate[index].re += delta;
        }
        let (obj, hm, cm) = probe.eval(&candidate)?;
        if obj < best_obj {
            best = candidate;
            (best_obj, best_hm, best_cm) = (obj, hm, cm);
            trace.push(obj);
            rejections = 0;
        } else {
            rejections += 1;
            if rejections >= 20 {
                step = (step * 0.5).max(1e-6);
                rejections = 0;
            }
        }
    }

    let best_f = probe.function(&best)?;
    let mut status = if best_obj.is_finite() {
        classify(best_hm, best_cm)
    } else {
        Status::HypothesisFails
    };
    let mut recheck = None;
    if status == Status::Violation {
        let fine = grid.with_angular_count(grid.angular_count() * 2)?;
        let report = check(&best_f, "sharpness-best", case, &fine)?;
        status = report.status;
        recheck = Some(report);
    }
    Ok(SharpnessReport {
        case: case.clone(),
        seed,
        budget,
        free_degrees: degree + 1 - first_free,
        start,
        penalty_weight: PENALTY_WEIGHT,
        evaluations: probe.evaluations,
        best: best_f,
        hypothesis_margin: best_hm,
        conclusion_margin: best_cm,
        status,
        trace,
        recheck,
        grid_fingerprint: grid.fingerprint(),
    })
}
