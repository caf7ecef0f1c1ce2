//! Admissibility regions of the implication theorems and numerical suprema over them.
//!
//! Each theorem writes its hypothesis as `psi(q, z q') in Omega` for a
//! normalized `q` with `q(0) = 1` and `Omega = {Re w > threshold}`. The
//! conclusion `Re q > 0` follows once `Re psi(i rho, sigma) <= threshold` for all
//! real `rho` and `sigma <= -k (1 + rho^2)`. [`sup_on_region`] estimates the
//! supremum of `Re psi` over that region and compares it with the threshold.
//!
//! The region constant is `k = 1/2` for the unfixed classes and
//! `k = 2 / (2 + zeta)` when the first coefficient `zeta` of `q` is fixed.
//! The boundary is taken as `-k (1 + rho^2)`, which is what every proof uses;
//! [`REGION_NOTE`] records this in the serialized reports.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::thresholds::{ThresholdSpec, TheoremId};

/// Smallest denominator modulus accepted by [`AdmissibilityProblem::psi`].
pub const POLE_TOL: f64 = 1e-12;
/// Allowed excess of the supremum over the threshold.
pub const CERTIFICATE_TOL: f64 = 1e-9;
pub const DEFAULT_RHO_MAX: f64 = 1e3;
pub const DEFAULT_SAMPLES: usize = 4097;
/// Multipliers `c` of the interior lines `sigma = c * sigma_boundary(rho)`.
pub const INTERIOR_LINES: [f64; 8] = [1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0];

pub const REGION_NOTE: &str = "region boundary sigma = -k(1 + rho^2); the unfixed-class lemma \
     is sometimes printed with (1 + rho)^2, which its applications do not use";

/// Principal square root without the cancellation of the polar form near the negative axis.
fn principal_sqrt(w: Complex64) -> Complex64 {
    if w.re == 0.0 && w.im == 0.0 {
        return w;
    }
    let t = ((w.re.abs() + w.re.hypot(w.im)) / 2.0).sqrt();
    if w.re >= 0.0 {
        Complex64::new(t, w.im / (2.0 * t))
    } else {
        Complex64::new(w.im.abs() / (2.0 * t), t.copysign(w.im))
    }
}

/// A theorem's `psi` with its parameters, region and target half-plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityProblem {
    pub theorem: TheoremId,
    pub p: u32,
    pub b: Option<f64>,
    /// `beta` or `gamma`, depending on the theorem.
    pub level: Option<f64>,
    pub curve_k: f64,
    /// Fixed first coefficient of `q`, for the fixed-coefficient theorems.
    pub zeta: Option<f64>,
    pub threshold: f64,
}

impl AdmissibilityProblem {
    /// Validates the parameters against the theorem's stated range and derives region and threshold.
    pub fn new(theorem: TheoremId, p: u32, b: Option<f64>, level: Option<f64>) -> Result<Self> {
        if theorem == TheoremId::LemmaPhi {
            return domain("the auxiliary lemma has no admissibility problem");
        }
        let spec = ThresholdSpec::compute(theorem, p, b, level)?;
        let pf = p as f64;
        let zeta = match theorem {
            TheoremId::T31 => Some(spec.b.unwrap() / (pf - spec.input_level.unwrap())),
            TheoremId::T32 | TheoremId::T37 => Some(spec.b.unwrap() / (1.0 - spec.input_level.unwrap())),
            TheoremId::T33 => {
                Some((pf + 1.0) * spec.b.unwrap() / (2.0 * pf * (1.0 - spec.input_level.unwrap())))
            }
            TheoremId::T38 => Some(2.0 * spec.b.unwrap()),
            _ => None,
        };
        if let Some(z) = zeta {
            if !(0.0..=2.0 + 1e-12).contains(&z) {
                return domain(format!("fixed coefficient zeta = {z} outside [0, 2]"));
            }
        }
        let curve_k = zeta.map_or(0.5, |z| 2.0 / (2.0 + z));
        Ok(Self {
            theorem,
            p,
            b: spec.b,
            level: spec.input_level,
            curve_k,
            zeta,
            threshold: spec.output_level,
        })
    }

    fn level(&self) -> f64 {
        self.level.unwrap_or(0.0)
    }

    /// `psi(r, s)`; square roots use the principal branch.
    pub fn psi(&self, r: Complex64, s: Complex64) -> Result<Complex64> {
        let p = self.p as f64;
        let lv = self.level();
        let pole_checked = |den: Complex64| {
            if den.norm() <= POLE_TOL {
                Err(Error::PoleHit { modulus: den.norm() })
            } else {
                Ok(den)
            }
        };
        Ok(match self.theorem {
            TheoremId::T22 | TheoremId::T33 => {
                let den = pole_checked((1.0 - lv) * r + lv)?;
                2.0 * (1.0 - lv) * s / den + p
            }
            TheoremId::T31 => {
                let den = pole_checked((p - lv) * r + lv)?;
                (p - lv) * s / den + (p - lv) * r + lv
            }
            TheoremId::T32 => {
                let den = pole_checked((1.0 - lv) * r + lv)?;
                (1.0 - lv) * s / den + p
            }
            TheoremId::T24 | TheoremId::T37 => principal_sqrt((1.0 - lv) * r + lv + (1.0 - lv) * s / p),
            TheoremId::T25 | TheoremId::T38 => principal_sqrt(0.5 * (r + s / p + 1.0)),
            TheoremId::LemmaPhi => unreachable!("rejected in new"),
        })
    }

    /// `Re psi(i rho, sigma)`.
    pub fn re_psi(&self, rho: f64, sigma: f64) -> Result<f64> {
        Ok(self
            .psi(Complex64::new(0.0, rho), Complex64::new(sigma, 0.0))?
            .re)
    }

    /// `sigma` on the region boundary above `rho`.
    pub fn boundary_sigma(&self, rho: f64) -> f64 {
        -self.curve_k * (1.0 + rho * rho)
    }

    /// Limit of `Re psi` along the boundary as `|rho| -> infinity`.
    pub fn asymptotic_limit(&self) -> f64 {
        let p = self.p as f64;
        let k = self.curve_k;
        let lv = self.level();
        match self.theorem {
            TheoremId::T22 | TheoremId::T33 => p - 2.0 * lv * k / (1.0 - lv),
            TheoremId::T31 => lv * (1.0 - k / (p - lv)),
            TheoremId::T32 => p - lv * k / (1.0 - lv),
            TheoremId::T24 | TheoremId::T37 => (p * (1.0 - lv) / (4.0 * k)).sqrt(),
            TheoremId::T25 | TheoremId::T38 => (p / (8.0 * k)).sqrt(),
            TheoremId::LemmaPhi => unreachable!("rejected in new"),
        }
    }
}

/// Result of the supremum search over one admissibility region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupReport {
    pub theorem: TheoremId,
    pub p: u32,
    pub b: Option<f64>,
    pub level: Option<f64>,
    pub curve_k: f64,
    pub sup_value: f64,
    /// Sampled `rho` of the largest value seen on the grid.
    pub arg_rho: f64,
    /// `sigma / sigma_boundary(arg_rho)` at the sampled maximum (1 on the boundary).
    pub arg_line: f64,
    pub sampled_max: f64,
    pub asymptotic_limit: f64,
    pub attained_at_infinity: bool,
    pub threshold: f64,
    /// `threshold - sup_value`.
    pub margin: f64,
    pub passed: bool,
    pub note: String,
}

/// `rho` grid: `samples` points in `[-rho_max, rho_max]`, uniform in `asinh(rho)`,
/// ordered `0, r_1, -r_1, r_2, -r_2, ...` so ties resolve to the smallest `|rho|`.
pub fn rho_grid(rho_max: f64, samples: usize) -> Vec<f64> {
    let half = (samples.max(1) - 1) / 2;
    let top = rho_max.asinh();
    let mut rhos = Vec::with_capacity(2 * half + 1);
    rhos.push(0.0);
    for i in 1..=half {
        let rho = (top * i as f64 / half as f64).sinh();
        rhos.push(rho);
        rhos.push(-rho);
    }
    rhos
}

/// Estimates `sup Re psi` over the region `sigma <= -k (1 + rho^2)`.
///
/// The boundary curve and the interior lines `sigma = c sigma_boundary(rho)`,
/// `c` in [`INTERIOR_LINES`], are sampled on [`rho_grid`]. When the largest
/// values sit in the last decade of `rho`, the supremum is taken to be
/// approached at infinity and the closed-form limit is used.
pub fn sup_on_region(problem: &AdmissibilityProblem, rho_max: f64, samples: usize) -> Result<SupReport> {
    if !(rho_max > 0.0 && rho_max.is_finite()) {
        return domain(format!("rho_max = {rho_max} must be positive"));
    }
    if samples < 64 {
        return domain(format!("samples = {samples} must be at least 64"));
    }
    let rhos = rho_grid(rho_max, samples);
    let lines: Vec<f64> = std::iter::once(1.0).chain(INTERIOR_LINES).collect();
    let decade = rho_max / 10.0;

    let mut best = (f64::NEG_INFINITY, 0.0, 1.0);
    let mut inner_max = f64::NEG_INFINITY;
    let mut outer_max = f64::NEG_INFINITY;
    for &rho in &rhos {
        let boundary = problem.boundary_sigma(rho);
        for &c in &lines {
            let value = problem.re_psi(rho, c * boundary)?;
            if value > best.0 + tie_tol(best.0) {
                best = (value, rho, c);
            }
            if rho.abs() >= decade {
                outer_max = outer_max.max(value);
            } else {
                inner_max = inner_max.max(value);
            }
        }
    }

    let limit = problem.asymptotic_limit();
    let attained_at_infinity = outer_max > inner_max + tie_tol(inner_max);
    let sup_value = if attained_at_infinity { best.0.max(limit) } else { best.0 };
    let margin = problem.threshold - sup_value;
    Ok(SupReport {
        theorem: problem.theorem,
        p: problem.p,
        b: problem.b,
        level: problem.level,
        curve_k: problem.curve_k,
        sup_value,
        arg_rho: best.1,
        arg_line: best.2,
        sampled_max: best.0,
        asymptotic_limit: limit,
        attained_at_infinity,
        threshold: problem.threshold,
        margin,
        passed: margin >= -CERTIFICATE_TOL,
        note: REGION_NOTE.to_string(),
    })
}

/// Values closer than a few ulps count as ties.
fn tie_tol(x: f64) -> f64 {
    if x.is_finite() {
        8.0 * f64::EPSILON * x.abs().max(1.0)
    } else {
        0.0
    }
}

/// Whether `Re psi(i rho, sigma)` is non-decreasing in `sigma` below the boundary,
/// so that the supremum over the region lies on the boundary curve.
///
/// Sampled on 256 points of `[min(-10, 10 sigma_b), sigma_b]`.
pub fn interior_monotonicity_check(problem: &AdmissibilityProblem, rho: f64) -> bool {
    let top = problem.boundary_sigma(rho);
    let bottom = (-10.0f64).min(10.0 * top);
    let n = 256;
    let mut prev = f64::NEG_INFINITY;
    for i in 0..n {
        let sigma = bottom + (top - bottom) * i as f64 / (n - 1) as f64;
        let Ok(value) = problem.re_psi(rho, sigma) else {
            return false;
        };
        if value < prev - 1e-12 * prev.abs().max(1.0) {
            return false;
        }
        prev = value;
    }
    true
}

/// `rho,sigma,re_psi` rows along the boundary curve, in increasing `rho`.
pub fn boundary_curve_csv(problem: &AdmissibilityProblem, rho_max: f64, samples: usize) -> Result<String> {
    let mut rhos = rho_grid(rho_max, samples);
    rhos.sort_by(f64::total_cmp);
    let mut out = String::from("rho,sigma,re_psi\n");
    for rho in rhos {
        let sigma = problem.boundary_sigma(rho);
        out.push_str(&format!("{rho},{sigma},{}\n", problem.re_psi(rho, sigma)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thresholds::{alpha_t22, beta_t25};

    fn problem(t: TheoremId, p: u32, b: Option<f64>, level: Option<f64>) -> AdmissibilityProblem {
        AdmissibilityProblem::new(t, p, b, level).unwrap()
    }

    #[test]
    fn region_constants() {
        assert_eq!(problem(TheoremId::T22, 1, None, Some(0.3)).curve_k, 0.5);
        let t31 = problem(TheoremId::T31, 2, Some(1.0), Some(1.0));
        assert_eq!(t31.zeta, Some(1.0));
        assert!((t31.curve_k - 2.0 / 3.0).abs() < 1e-15);
        let t38 = problem(TheoremId::T38, 1, Some(0.5), None);
        assert!((t38.curve_k - 1.0 / 1.5).abs() < 1e-15);
        let t33 = problem(TheoremId::T33, 1, Some(0.5), Some(0.5));
        assert!((t33.zeta.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn psi_examples() {
        let t22 = problem(TheoremId::T22, 3, None, Some(0.4));
        let v = t22.psi(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(v, Complex64::new(3.0, 0.0));

        let (p, beta, b) = (3u32, 1.2, 0.5);
        let t31 = problem(TheoremId::T31, p, Some(b), Some(beta));
        let sigma = -0.8;
        let pb = p as f64 - beta;
        let expected = beta * (pb * sigma / (beta * beta) + 1.0);
        assert!((t31.re_psi(0.0, sigma).unwrap() - expected).abs() < 1e-14);
        let rho = 0.7;
        let expected = beta * (pb * sigma / (beta * beta + pb * pb * rho * rho) + 1.0);
        assert!((t31.re_psi(rho, sigma).unwrap() - expected).abs() < 1e-14);

        let t25 = problem(TheoremId::T25, 1, None, None);
        assert!((t25.re_psi(0.0, -0.5).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pole_is_reported() {
        let t22 = problem(TheoremId::T22, 1, None, Some(0.0));
        assert!(matches!(t22.re_psi(0.0, -0.5), Err(Error::PoleHit { .. })));
        assert!(sup_on_region(&t22, 100.0, 65).is_err());
    }

    #[test]
    fn sup_examples() {
        let r = sup_on_region(&problem(TheoremId::T31, 2, Some(2.0), Some(1.0)), DEFAULT_RHO_MAX, DEFAULT_SAMPLES)
            .unwrap();
        assert!((r.sup_value - 0.5).abs() < 1e-6, "{r:?}");
        assert!(r.passed);

        let r = sup_on_region(&problem(TheoremId::T25, 1, None, None), DEFAULT_RHO_MAX, DEFAULT_SAMPLES).unwrap();
        assert!((r.sup_value - 0.5).abs() < 1e-9, "{r:?}");
        assert_eq!(r.arg_rho, 0.0);
        assert_eq!(r.arg_line, 1.0);

        let r = sup_on_region(&problem(TheoremId::T22, 1, None, Some(0.75)), DEFAULT_RHO_MAX, DEFAULT_SAMPLES)
            .unwrap();
        assert!((r.sup_value - 2.0 / 3.0).abs() < 1e-6);
        assert_eq!(r.arg_rho, 0.0);
        assert!(!r.attained_at_infinity);
    }

    #[test]
    fn asymptotic_branch_uses_the_limit() {
        let t22 = problem(TheoremId::T22, 2, None, Some(0.2));
        let r = sup_on_region(&t22, DEFAULT_RHO_MAX, DEFAULT_SAMPLES).unwrap();
        assert!(r.attained_at_infinity);
        assert!((r.asymptotic_limit - alpha_t22(0.2, 2).unwrap()).abs() < 1e-14);
        assert!(r.sampled_max < r.asymptotic_limit);
        assert!(r.margin.abs() < 1e-12);

        let t25 = problem(TheoremId::T25, 3, None, None);
        let r = sup_on_region(&t25, DEFAULT_RHO_MAX, DEFAULT_SAMPLES).unwrap();
        assert!(r.attained_at_infinity);
        assert!((r.sup_value - beta_t25(3).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn even_in_rho() {
        let cases = [
            problem(TheoremId::T22, 2, None, Some(0.3)),
            problem(TheoremId::T24, 2, None, Some(0.8)),
            problem(TheoremId::T25, 2, None, None),
            problem(TheoremId::T31, 2, Some(0.5), Some(0.7)),
            problem(TheoremId::T32, 2, Some(0.5), Some(0.6)),
            problem(TheoremId::T33, 2, Some(0.5), Some(0.6)),
            problem(TheoremId::T37, 2, Some(0.1), Some(0.9)),
            problem(TheoremId::T38, 2, Some(0.5), None),
        ];
        for pr in &cases {
            for rho in [0.1, 0.9, 3.0, 40.0] {
                for sigma in [-0.6, -2.0, -50.0] {
                    let a = pr.re_psi(rho, sigma).unwrap();
                    let b = pr.re_psi(-rho, sigma).unwrap();
                    assert!((a - b).abs() < 1e-12, "{:?}", pr.theorem);
                }
            }
        }
    }

    #[test]
    fn monotone_below_boundary() {
        for pr in [
            problem(TheoremId::T32, 2, Some(0.3), Some(0.4)),
            problem(TheoremId::T22, 1, None, Some(0.6)),
            problem(TheoremId::T24, 1, None, Some(0.7)),
        ] {
            for rho in [0.0, 1.0, 5.0] {
                assert!(interior_monotonicity_check(&pr, rho), "{:?} {rho}", pr.theorem);
            }
        }
    }

    #[test]
    fn larger_b_narrows_the_region() {
        let small = problem(TheoremId::T32, 2, Some(0.2), Some(0.4));
        let large = problem(TheoremId::T32, 2, Some(0.9), Some(0.4));
        for rho in [0.0, 0.5, 5.0] {
            assert!(large.boundary_sigma(rho) >= small.boundary_sigma(rho));
        }
        let s = sup_on_region(&small, DEFAULT_RHO_MAX, 1025).unwrap();
        let l = sup_on_region(&large, DEFAULT_RHO_MAX, 1025).unwrap();
        assert!(l.sup_value >= s.sup_value);
    }

    #[test]
    fn principal_sqrt_matches_library_branch() {
        for (x, y) in [(4.0, 0.0), (-4.0, 0.0), (-4.0, -0.0), (0.3, -2.0), (-7.0, 1e-3), (-1e5, 30.0)] {
            let w = Complex64::new(x, y);
            let a = principal_sqrt(w);
            let b = w.sqrt();
            assert!((a - b).norm() < 1e-10 * b.norm().max(1.0), "{w}: {a} vs {b}");
            assert!((a * a - w).norm() < 1e-12 * w.norm().max(1.0));
        }
    }

    #[test]
    fn rho_grid_shape() {
        let g = rho_grid(1e3, 65);
        assert_eq!(g.len(), 65);
        assert_eq!(g[0], 0.0);
        assert!((g[1] - 1e3).abs() > 0.0 && g[1] > 0.0 && g[2] == -g[1]);
        assert!((g[63] - 1e3).abs() < 1e-9);
    }

    #[test]
    fn curve_csv_rows() {
        let csv = boundary_curve_csv(&problem(TheoremId::T25, 1, None, None), 10.0, 65).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "rho,sigma,re_psi");
        assert_eq!(lines.len(), 66);
    }
}
