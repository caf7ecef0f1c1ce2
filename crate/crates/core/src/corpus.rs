//! Families of test functions in `A_p` and `A_{p,b}`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::grid::{zero_scan, DiskGrid};
use crate::series::{MultivalentFunction, PowerSeries, DEFAULT_ORDER};

/// Modulus below which `u` or `f'/(p z^{p-1})` counts as vanishing.
pub const VANISHING_TOL: f64 = 1e-8;
pub const MAX_RETRIES: u32 = 8;
/// Order used for the families with a boundary singularity.
///
/// The convexity functional needs `z v'` whose coefficients grow like
/// `k^{t+1}` for the kernel `(1 - z)^{-t}`. With `t <= 2` and the default
/// outer radius `1 - 2^-10`, the dropped tail is below `1e-13` at `2^16`
/// terms, while `2^15` still leaves errors of order `0.1`.
pub const KERNEL_ORDER: usize = 1 << 16;
pub const DEFAULT_CORPUS_SIZE: usize = 20;
/// Largest `b (1 + 1/p)` for which perturbations are built around `1 + b z`.
pub const POLYNOMIAL_BASE_LIMIT: f64 = 0.75;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `z^p`.
    Monomial,
    /// `z^p (1 - z)^{-t}`, `parameter = t` in `(0, 2p]`.
    HalfPlaneKernel,
    /// `f' = p z^{p-1} ((1 + z)/(1 - z))^s`, `parameter = s > 0`.
    ConvexExtremal,
    /// `z^p (1 + b z + eps sum_{k>=2} d_k z^k)` with `|d_k| <= 1`, `parameter = eps`.
    ///
    /// Once `b (1 + 1/p)` exceeds [`POLYNOMIAL_BASE_LIMIT`], `1 + b z` is
    /// replaced by `(1 - z)^{-b}` (expanded to [`KERNEL_ORDER`]) and the noise
    /// enters as a factor `1 + eps sum d_k z^k`; `f'/(p z^{p-1})` of `z^p (1 + b z)`
    /// would otherwise vanish in or near the disk.
    FixedBPerturbation,
    /// Tail coefficients `|a_{p+k}| <= eps / k^2`, `parameter = eps`.
    RandomBounded,
}

impl Family {
    fn is_random(self) -> bool {
        matches!(self, Family::FixedBPerturbation | Family::RandomBounded)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Recipe for one corpus function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub p: u32,
    /// Declared fixed coefficient; `None` generates a plain `A_p` member.
    pub b: Option<f64>,
    pub parameter: f64,
    pub seed: u64,
    pub order: usize,
}

impl FamilySpec {
    pub fn new(family: Family, p: u32, b: Option<f64>, parameter: f64) -> Self {
        Self {
            family,
            p,
            b,
            parameter,
            seed: 0,
            order: DEFAULT_ORDER,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }
}

/// Uniform point of the closed unit disk.
fn disk_point(rng: &mut ChaCha8Rng) -> Complex64 {
    let r: f64 = rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, 2.0 * PI * rng.gen::<f64>())
}

/// `(1 - z)^{-t}` to order `n`.
pub(crate) fn binomial_series(t: f64, n: usize) -> Vec<Complex64> {
    let mut c = Vec::with_capacity(n + 1);
    let mut x = 1.0;
    c.push(Complex64::new(1.0, 0.0));
    for k in 1..=n {
        x *= (t + k as f64 - 1.0) / k as f64;
        c.push(Complex64::new(x, 0.0));
    }
    c
}

/// `((1 + z)/(1 - z))^s` to order `n`, from `(1 - z^2) w' = 2 s w`.
fn lune_power_series(s: f64, n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    w[0] = 1.0;
    if n >= 1 {
        w[1] = 2.0 * s;
    }
    for k in 1..n {
        w[k + 1] = (2.0 * s * w[k] + (k as f64 - 1.0) * w[k - 1]) / (k as f64 + 1.0);
    }
    w
}

/// `long * short` truncated to the length of `long`, in `O(len(long) len(short))`.
fn mul_short(long: &[Complex64], short: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); long.len()];
    for (j, s) in short.iter().enumerate().filter(|(_, s)| s.norm_sqr() > 0.0) {
        for (o, l) in out[j..].iter_mut().zip(long) {
            *o += s * l;
        }
    }
    out
}

fn build(p: u32, b: Option<f64>, unit: Vec<Complex64>) -> Result<MultivalentFunction> {
    let unit = PowerSeries::new(unit)?;
    match b {
        Some(b) => MultivalentFunction::with_fixed_coefficient(p, b, unit),
        None => MultivalentFunction::new(p, unit),
    }
}

fn check_unit(f: &MultivalentFunction, grid: &DiskGrid) -> Result<()> {
    let (min_modulus, winding) = zero_scan(f.unit().coeffs(), grid);
    if min_modulus <= VANISHING_TOL || winding != 0 {
        return Err(Error::UnitVanishes { min_modulus, winding });
    }
    Ok(())
}

/// Builds the function described by `spec` and rejects it if `u` vanishes on the default grid.
pub fn generate(spec: &FamilySpec) -> Result<MultivalentFunction> {
    let f = construct(spec)?;
    check_unit(&f, &DiskGrid::default())?;
    Ok(f)
}

fn construct(spec: &FamilySpec) -> Result<MultivalentFunction> {
    let p = spec.p;
    let n = spec.order;
    let t = spec.parameter;
    if p == 0 {
        return domain("valence p must be at least 1");
    }
    if !t.is_finite() {
        return domain(format!("family parameter {t} is not finite"));
    }
    match spec.family {
        Family::Monomial => build(p, spec.b.map(|_| 0.0), vec![Complex64::new(1.0, 0.0)]),
        Family::HalfPlaneKernel => {
            if !(t > 0.0 && t <= 2.0 * p as f64) {
                return domain(format!("kernel exponent t = {t} outside (0, 2p]"));
            }
            if let Some(b) = spec.b {
                if b != t {
                    return Err(Error::ClassMismatch(format!("kernel has second coefficient {t}, not {b}")));
                }
            }
            build(p, spec.b, binomial_series(t, n))
        }
        Family::ConvexExtremal => {
            if !(t > 0.0) {
                return domain(format!("exponent s = {t} must be positive"));
            }
            let pf = p as f64;
            let w = lune_power_series(t, n);
            let mut unit: Vec<Complex64> = w
                .iter()
                .enumerate()
                .map(|(k, &x)| Complex64::new(pf * x / (pf + k as f64), 0.0))
                .collect();
            if let (Some(b), true) = (spec.b, n >= 1) {
                // the integration only reproduces b up to rounding
                if (unit[1].re - b).abs() > 1e-12 * b.max(1.0) {
                    return Err(Error::ClassMismatch(format!(
                        "exponent {t} gives second coefficient {}, not {b}",
                        unit[1].re
                    )));
                }
                unit[1] = Complex64::new(b, 0.0);
            }
            build(p, spec.b, unit)
        }
        Family::FixedBPerturbation => {
            let b = spec.b.unwrap_or(0.0);
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let mut noise = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
            for _ in 2..=n {
                noise.push(t * disk_point(&mut rng));
            }
            let unit = if b * (1.0 + 1.0 / p as f64) <= POLYNOMIAL_BASE_LIMIT {
                let mut unit = noise;
                unit.truncate(n + 1);
                if n >= 1 {
                    unit[1] = Complex64::new(b, 0.0);
                }
                unit
            } else {
                let mut unit = mul_short(&binomial_series(b, KERNEL_ORDER), &noise);
                unit[1] = Complex64::new(b, 0.0);
                unit
            };
            build(p, spec.b.or(Some(0.0)), unit)
        }
        Family::RandomBounded => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let mut unit = vec![Complex64::new(1.0, 0.0)];
            for k in 1..=n {
                let d = disk_point(&mut rng);
                match (k, spec.b) {
                    (1, Some(b)) => unit.push(Complex64::new(b, 0.0)),
                    _ => unit.push(t * d / (k * k) as f64),
                }
            }
            build(p, spec.b, unit)
        }
    }
}

/// A generated function with the recipe that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub function_id: String,
    /// Recipe after retries (the parameter may have been halved).
    pub spec: FamilySpec,
    pub retries: u32,
    pub function: MultivalentFunction,
}

/// Generates `spec`, halving the perturbation size of the random families
/// after each rejection, and additionally requires local p-valence on the
/// default grid. Deterministic families are not retried.
pub fn generate_with_retries(spec: &FamilySpec) -> Result<(FamilySpec, MultivalentFunction, u32)> {
    let grid = DiskGrid::default();
    let mut current = spec.clone();
    let mut retries = 0;
    loop {
        let attempt = construct(&current).and_then(|f| {
            check_unit(&f, &grid)?;
            if !local_valence_guard(&f, &grid) {
                return Err(Error::NotLocallyValent);
            }
            Ok(f)
        });
        match attempt {
            Ok(f) => return Ok((current, f, retries)),
            Err(e @ (Error::UnitVanishes { .. } | Error::NotLocallyValent))
                if current.family.is_random() && retries < MAX_RETRIES =>
            {
                let _ = e;
                current.parameter /= 2.0;
                retries += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Grid surrogate for local p-valence: `|f'/(p z^{p-1})| > 1e-8` at every grid
/// point and no zero enclosed by the largest circle.
pub fn local_valence_guard(f: &MultivalentFunction, grid: &DiskGrid) -> bool {
    let (min_modulus, winding) = zero_scan(f.normalized_derivative().coeffs(), grid);
    min_modulus > VANISHING_TOL && winding == 0
}

/// Reproducible list of corpus functions.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub seed: u64,
    pub entries: Vec<CorpusEntry>,
}

impl CorpusManifest {
    pub fn from_specs(seed: u64, specs: &[FamilySpec]) -> Result<Self> {
        let mut entries = Vec::with_capacity(specs.len());
        for (i, spec) in specs.iter().enumerate() {
            let (spec, function, retries) = generate_with_retries(spec)?;
            entries.push(CorpusEntry {
                function_id: format!("{}-{i:02}", spec.family),
                spec,
                retries,
                function,
            });
        }
        Ok(Self { seed, entries })
    }

    /// Only `z^p` (declared with `b = 0` when `b` is given).
    pub fn monomials(p: u32, b: Option<f64>) -> Result<Self> {
        Self::from_specs(0, &[FamilySpec::new(Family::Monomial, p, b, 0.0)])
    }
}

fn entry_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(index as u64)
        .rotate_left(17)
}

/// The standard 20-function corpus for class `A_p` (`b = None`) or `A_{p,b}`.
///
/// Deterministic families come first: the monomial (when it is in the
/// class), the half-plane kernel and the convex extremal with matching second
/// coefficient. The rest are random perturbations of decreasing size. Entries
/// whose recipe is outside the class or fails the guards are skipped.
pub fn default_corpus(p: u32, b: Option<f64>, seed: u64) -> Result<CorpusManifest> {
    let pf = p as f64;
    let mut deterministic = Vec::new();
    match b {
        None => {
            deterministic.push(FamilySpec::new(Family::Monomial, p, None, 0.0));
            for t in [0.5, 1.0, 2.0] {
                deterministic.push(FamilySpec::new(Family::HalfPlaneKernel, p, None, t).with_order(KERNEL_ORDER));
            }
            deterministic.push(FamilySpec::new(Family::ConvexExtremal, p, None, 0.5).with_order(KERNEL_ORDER));
        }
        Some(b) => {
            if b == 0.0 {
                deterministic.push(FamilySpec::new(Family::Monomial, p, Some(0.0), 0.0));
            } else {
                deterministic
                    .push(FamilySpec::new(Family::HalfPlaneKernel, p, Some(b), b).with_order(KERNEL_ORDER));
                let s = b * (pf + 1.0) / (2.0 * pf);
                deterministic.push(FamilySpec::new(Family::ConvexExtremal, p, Some(b), s).with_order(KERNEL_ORDER));
            }
            deterministic.push(FamilySpec::new(Family::FixedBPerturbation, p, Some(b), 0.0).with_order(1));
        }
    }
    let mut entries = Vec::with_capacity(DEFAULT_CORPUS_SIZE);
    let push = |spec: &FamilySpec, entries: &mut Vec<CorpusEntry>| -> Result<()> {
        match generate_with_retries(spec) {
            Ok((spec, function, retries)) => {
                let index = entries.len();
                entries.push(CorpusEntry {
                    function_id: format!("{}-{index:02}", spec.family),
                    spec,
                    retries,
                    function,
                });
                Ok(())
            }
            Err(Error::UnitVanishes { .. } | Error::NotLocallyValent | Error::ClassMismatch(_) | Error::Domain(_)) => Ok(()),
            Err(e) => Err(e),
        }
    };
    for spec in &deterministic {
        push(spec, &mut entries)?;
    }

    let sizes = [0.02, 0.05, 0.1, 0.2, 0.4];
    let mut i = 0usize;
    while entries.len() < DEFAULT_CORPUS_SIZE && i < 50 * DEFAULT_CORPUS_SIZE {
        let eps = sizes[(i / 2) % sizes.len()];
        let spec = if i.is_multiple_of(2) {
            FamilySpec::new(Family::FixedBPerturbation, p, Some(b.unwrap_or(0.0)), eps).with_order(8)
        } else {
            FamilySpec::new(Family::RandomBounded, p, b, eps).with_order(DEFAULT_ORDER)
        };
        push(&spec.with_seed(entry_seed(seed, i)), &mut entries)?;
        i += 1;
    }
    Ok(CorpusManifest { seed, entries })
}
