//! Subcommand bodies. Each returns the rendered output and an exit code.

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use strohhacker_core::admissibility::{sup_on_region, boundary_curve_csv, DEFAULT_RHO_MAX, DEFAULT_SAMPLES, REGION_NOTE};
use strohhacker_core::verify::{
    build_case, corpus_for_cases, corpus_for_cases_with, default_cases, run_suite, sharpness_search, StartPoint,
    DEFAULT_P_VALUES, PENALTY_WEIGHT,
};
use strohhacker_core::{
    AdmissibilityProblem, CorpusManifest, DiskGrid, Error, ImplicationCase, SharpnessReport, Status, SupReport,
    TheoremId, ThresholdSpec,
};

use crate::args::{usage, AdmissibleArgs, Format, GridArgs, Params, SharpnessArgs, Sweep, SweepArgs, VerifyArgs};
use crate::format::{csv, opt, sig12, table};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;

pub struct Outcome {
    pub body: String,
    pub exit: u8,
}

pub struct RunContext<'a> {
    pub format: Format,
    pub seed: u64,
    pub params: &'a Params,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    grid_fingerprint: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
    results: T,
}

/// Renders JSON directly, or CSV/table with `#` metadata lines ahead of the header.
fn render<T: Serialize>(
    ctx: &RunContext<'_>,
    command: &str,
    grid_fingerprint: Option<String>,
    note: Option<&'static str>,
    results: &T,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<String> {
    if ctx.format == Format::Json {
        let envelope = Envelope {
            tool: "strohhacker",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed: ctx.seed,
            grid_fingerprint,
            note,
            results,
        };
        return Ok(serde_json::to_string_pretty(&envelope)? + "\n");
    }
    let mut out = format!("# strohhacker {} {command}\n# seed={}\n", env!("CARGO_PKG_VERSION"), ctx.seed);
    out.push_str(&format!("# grid_fingerprint={}\n", grid_fingerprint.as_deref().unwrap_or("none")));
    if let Some(note) = note {
        out.push_str(&format!("# note={note}\n"));
    }
    out.push_str(&match ctx.format {
        Format::Csv => csv(header, rows),
        _ => table(header, rows),
    });
    Ok(out)
}

type Combo = (TheoremId, u32, Option<f64>, Option<f64>);

/// Cross product of the sweep, with `b` and the level only where the theorem takes them.
fn combos(sweep: &Sweep, theorems: &[TheoremId], default_p: &[u32]) -> Vec<Combo> {
    let ps = sweep.p.clone().unwrap_or_else(|| default_p.to_vec());
    let mut out = Vec::new();
    for &t in theorems {
        let bs: Vec<Option<f64>> = if t.uses_fixed_coefficient() || t == TheoremId::LemmaPhi {
            if sweep.b.is_empty() { vec![None] } else { sweep.b.iter().copied().map(Some).collect() }
        } else {
            vec![None]
        };
        let levels: Vec<Option<f64>> = if t.level_name().is_some() {
            if sweep.level.is_empty() { vec![None] } else { sweep.level.iter().copied().map(Some).collect() }
        } else {
            vec![None]
        };
        for &p in &ps {
            for &b in &bs {
                for &l in &levels {
                    out.push((t, p, b, l));
                }
            }
        }
    }
    out
}

#[derive(Serialize)]
struct ThresholdRow {
    theorem: TheoremId,
    p: u32,
    b: Option<f64>,
    level: Option<f64>,
    bound: Option<f64>,
    error: Option<String>,
}

pub fn thresholds(ctx: &RunContext<'_>, args: &SweepArgs) -> Result<Outcome> {
    let sweep = Sweep::resolve(args, ctx.params)?;
    let theorems = sweep.theorems.clone().unwrap_or_else(|| TheoremId::IMPLICATIONS.to_vec());
    let rows: Vec<ThresholdRow> = combos(&sweep, &theorems, &DEFAULT_P_VALUES)
        .into_iter()
        .map(|(theorem, p, b, level)| {
            let (bound, error) = match ThresholdSpec::compute(theorem, p, b, level) {
                Ok(spec) => (Some(spec.output_level), None),
                Err(e) => (None, Some(e.to_string())),
            };
            ThresholdRow { theorem, p, b, level, bound, error }
        })
        .collect();
    let text_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.theorem.to_string(),
                r.p.to_string(),
                opt(r.b),
                opt(r.level),
                opt(r.bound),
                r.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let body = render(ctx, "thresholds", None, None, &rows, &["theorem", "p", "b", "level", "bound", "error"], &text_rows)?;
    Ok(Outcome { body, exit: EXIT_OK })
}

#[derive(Serialize)]
struct CertificateRow {
    theorem: TheoremId,
    p: u32,
    b: Option<f64>,
    level: Option<f64>,
    /// `threshold - sup`; non-negative up to the certificate tolerance.
    gap: Option<f64>,
    report: Option<SupReport>,
    error: Option<String>,
}

pub fn admissible(ctx: &RunContext<'_>, args: &AdmissibleArgs) -> Result<Outcome> {
    let sweep = Sweep::resolve(&args.sweep, ctx.params)?;
    let rho_max = ctx.params.number(args.rho_max, "rho_max")?.unwrap_or(DEFAULT_RHO_MAX);
    let samples = ctx.params.number(args.samples, "samples")?.unwrap_or(DEFAULT_SAMPLES);
    let theorems = sweep.theorems.clone().unwrap_or_else(|| TheoremId::IMPLICATIONS.to_vec());
    let problems = combos(&sweep, &theorems, &DEFAULT_P_VALUES);

    if let Some(path) = &args.curve_csv {
        let [(t, p, b, l)] = problems.as_slice() else {
            return usage("--curve-csv needs exactly one problem");
        };
        let problem = AdmissibilityProblem::new(*t, *p, *b, *l)?;
        let curve = boundary_curve_csv(&problem, rho_max, samples)?;
        std::fs::write(path, curve).with_context(|| format!("writing {}", path.display()))?;
    }

    let rows: Vec<CertificateRow> = problems
        .par_iter()
        .map(|&(theorem, p, b, level)| {
            let result = AdmissibilityProblem::new(theorem, p, b, level)
                .and_then(|problem| sup_on_region(&problem, rho_max, samples));
            match result {
                Ok(report) => CertificateRow {
                    theorem,
                    p,
                    b,
                    level,
                    gap: Some(report.margin),
                    report: Some(report),
                    error: None,
                },
                Err(e) => CertificateRow {
                    theorem,
                    p,
                    b,
                    level,
                    gap: None,
                    report: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let failed = rows.iter().any(|r| r.report.as_ref().is_some_and(|s| !s.passed));
    let text_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let s = r.report.as_ref();
            vec![
                r.theorem.to_string(),
                r.p.to_string(),
                opt(r.b),
                opt(r.level),
                opt(s.map(|s| s.curve_k)),
                opt(s.map(|s| s.threshold)),
                opt(s.map(|s| s.sup_value)),
                opt(r.gap),
                s.map(|s| s.attained_at_infinity.to_string()).unwrap_or_default(),
                s.map(|s| s.passed.to_string()).unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let header = [
        "theorem",
        "p",
        "b",
        "level",
        "curve_k",
        "threshold",
        "sup",
        "gap",
        "attained_at_infinity",
        "passed",
        "error",
    ];
    let body = render(ctx, "admissible", None, Some(REGION_NOTE), &rows, &header, &text_rows)?;
    Ok(Outcome {
        body,
        exit: if failed { EXIT_FAILED } else { EXIT_OK },
    })
}

fn grid(args: &GridArgs, params: &Params) -> Result<DiskGrid> {
    let angles = params.number(args.angles, "angles")?;
    let steps = params.number(args.radial_steps, "radial_steps")?;
    if angles.is_none() && steps.is_none() {
        return Ok(DiskGrid::default());
    }
    let default = DiskGrid::default();
    match DiskGrid::geometric(steps.unwrap_or(default.radii().len() as u32), angles.unwrap_or(default.angular_count())) {
        Ok(g) => Ok(g),
        Err(e) => usage(e.to_string()),
    }
}

/// Explicit cases from the sweep, or each theorem's default sweep where its
/// required `b` or level is not given. Infeasible parameters are an error.
fn cases(sweep: &Sweep) -> Result<Vec<ImplicationCase>> {
    let theorems = sweep.theorems.clone().unwrap_or_else(|| TheoremId::IMPLICATIONS.to_vec());
    let ps = sweep.p.clone().unwrap_or_else(|| DEFAULT_P_VALUES.to_vec());
    let mut out = Vec::new();
    for t in theorems {
        if t == TheoremId::LemmaPhi {
            return usage("PHI is not an implication");
        }
        let missing_level = t.level_name().is_some() && sweep.level.is_empty();
        let missing_b = t.uses_fixed_coefficient() && sweep.b.is_empty();
        if missing_level || missing_b {
            out.extend(default_cases(t, &ps).into_iter().filter(|c| {
                (sweep.b.is_empty() || c.b.is_some_and(|b| sweep.b.contains(&b)))
                    && (sweep.level.is_empty() || c.level.is_some_and(|l| sweep.level.contains(&l)))
            }));
            continue;
        }
        let one = Sweep {
            p: Some(ps.clone()),
            ..sweep.clone()
        };
        for (t, p, b, l) in combos(&one, &[t], &ps) {
            match build_case(t, p, b, l) {
                Ok(case) => out.push(case),
                Err(e @ Error::Infeasible(_)) => return Err(e.into()),
                Err(e) => return usage(format!("{t} p={p} b={b:?} level={l:?}: {e}")),
            }
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct VerifyResults<'a> {
    corpus: &'a str,
    corpus_size: usize,
    #[serde(flatten)]
    suite: strohhacker_core::SuiteReport,
}

pub fn verify(ctx: &RunContext<'_>, args: &VerifyArgs) -> Result<Outcome> {
    let sweep = Sweep::resolve(&args.sweep, ctx.params)?;
    let grid = grid(&args.grid, ctx.params)?;
    let cases = cases(&sweep)?;
    let corpus_name = ctx.params.resolve(&args.corpus, "corpus").unwrap_or_else(|| "default".into());
    let manifest = match corpus_name.as_str() {
        "default" => corpus_for_cases(&cases, ctx.seed)?,
        // z^p only belongs to the unfixed class and to b = 0.
        "monomials" => corpus_for_cases_with(&cases, ctx.seed, |p, b| match b {
            Some(b) if b != 0.0 => Ok(CorpusManifest::default()),
            _ => CorpusManifest::monomials(p, b),
        })?,
        path => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading corpus {path}"))?;
            match serde_json::from_str(&text) {
                Ok(m) => m,
                Err(e) => return usage(format!("corpus {path}: {e}")),
            }
        }
    };
    if let Some(path) = &args.corpus_out {
        std::fs::write(path, serde_json::to_string_pretty(&manifest)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let suite = run_suite(&cases, &manifest, &grid)?;
    let exit = if suite.passed { EXIT_OK } else { EXIT_FAILED };
    let text_rows: Vec<Vec<String>> = suite
        .reports
        .iter()
        .map(|r| {
            vec![
                r.case_id.clone(),
                r.function_id.clone(),
                sig12(r.hypothesis_margin),
                sig12(r.conclusion_margin),
                r.status.to_string(),
                r.truncation_warning.to_string(),
                r.rechecked.to_string(),
            ]
        })
        .collect();
    let header = [
        "case_id",
        "function_id",
        "hypothesis_margin",
        "conclusion_margin",
        "status",
        "truncation_warning",
        "rechecked",
    ];
    let results = VerifyResults {
        corpus: &corpus_name,
        corpus_size: manifest.entries.len(),
        suite,
    };
    let fingerprint = grid.fingerprint();
    let body = render(ctx, "verify", Some(fingerprint), None, &results, &header, &text_rows)?;
    Ok(Outcome { body, exit })
}

#[derive(Serialize)]
struct SharpnessResults {
    penalty_weight: f64,
    reports: Vec<SharpnessReport>,
}

pub fn sharpness(ctx: &RunContext<'_>, args: &SharpnessArgs) -> Result<Outcome> {
    let sweep = Sweep::resolve(&args.sweep, ctx.params)?;
    let grid = grid(&args.grid, ctx.params)?;
    let free_degrees = ctx.params.number(args.free_degrees, "free_degrees")?.unwrap_or(6);
    let budget = ctx.params.number(args.budget, "budget")?.unwrap_or(500);
    if budget == 0 {
        return usage("--budget must be at least 1");
    }
    let start = if ctx.params.flag(args.warm_start, "warm_start")? {
        StartPoint::HalfPlaneKernel
    } else {
        StartPoint::Monomial
    };
    let cases = cases(&sweep)?;
    let reports: Vec<SharpnessReport> = cases
        .par_iter()
        .map(|case| sharpness_search(case, free_degrees, budget, ctx.seed, start, &grid))
        .collect::<strohhacker_core::Result<_>>()?;
    let exit = if reports.iter().any(|r| r.status == Status::Violation) {
        EXIT_FAILED
    } else {
        EXIT_OK
    };
    let text_rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let coeffs: Vec<String> = r
                .best
                .unit()
                .coeffs()
                .iter()
                .map(|c| {
                    let im = sig12(c.im);
                    let sign = if im.starts_with('-') { "" } else { "+" };
                    format!("{}{sign}{im}i", sig12(c.re))
                })
                .collect();
            vec![
                r.case.case_id.clone(),
                format!("{:?}", r.start),
                r.evaluations.to_string(),
                sig12(r.hypothesis_margin),
                sig12(r.conclusion_margin),
                r.status.to_string(),
                coeffs.join(" "),
            ]
        })
        .collect();
    let header = [
        "case_id",
        "start",
        "evaluations",
        "hypothesis_margin",
        "conclusion_margin",
        "status",
        "unit_coeffs",
    ];
    let results = SharpnessResults {
        penalty_weight: PENALTY_WEIGHT,
        reports,
    };
    let body = render(ctx, "sharpness", Some(grid.fingerprint()), None, &results, &header, &text_rows)?;
    Ok(Outcome { body, exit })
}
