//! The four disk functionals of the implication chains and their real-part infima.
//!
//! For `f = z^p u` with `v = f' / (p z^{p-1}) = u + z u' / p`:
//!
//! | kind             | expression           | computed as          |
//! |------------------|----------------------|----------------------|
//! | `Convexity`      | `1 + z f'' / f'`     | `p + z v' / v`       |
//! | `Starlikeness`   | `z f' / f`           | `p + z u' / u`       |
//! | `SqrtDerivative` | `sqrt(f'/(p z^{p-1}))` | `sqrt(v)`, `sqrt(1) = 1` |
//! | `PowerRatio`     | `f / z^p`            | `u`                  |
//!
//! Two routes are provided. [`functional_series`] builds the truncated Taylor
//! series of a functional and [`inf_real_disk`] minimizes any series over a
//! grid. [`profile`] instead evaluates each functional exactly at every grid
//! point for the stored polynomial `f`, which is what the implication checks
//! use: it carries no truncation error, so a reported violation can only come
//! from the sampling itself.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{
    minimize_real, truncation_warning, winding_number, CircleEvaluator, CircleFunction, DiskGrid,
    InfEstimate, PolynomialOnCircle,
};
use crate::series::{horner, MultivalentFunction, PowerSeries};

/// Steps used to continue the square-root branch from the origin out to the largest radius.
const RADIAL_STEPS: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FunctionalKind {
    Convexity,
    Starlikeness,
    SqrtDerivative,
    PowerRatio,
}

impl FunctionalKind {
    pub const ALL: [FunctionalKind; 4] = [
        FunctionalKind::Convexity,
        FunctionalKind::Starlikeness,
        FunctionalKind::SqrtDerivative,
        FunctionalKind::PowerRatio,
    ];

    pub fn expression(self) -> &'static str {
        match self {
            FunctionalKind::Convexity => "Re(1 + z f''/f')",
            FunctionalKind::Starlikeness => "Re(z f'/f)",
            FunctionalKind::SqrtDerivative => "Re sqrt(f'/(p z^(p-1)))",
            FunctionalKind::PowerRatio => "Re(f/z^p)",
        }
    }
}

impl fmt::Display for FunctionalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Truncated Taylor series of a functional of `f`, at the order of `f.unit()`.
pub fn functional_series(f: &MultivalentFunction, kind: FunctionalKind) -> Result<PowerSeries> {
    let p = Complex64::new(f.p() as f64, 0.0);
    let u = f.unit();
    match kind {
        FunctionalKind::PowerRatio => Ok(u.clone()),
        FunctionalKind::Starlikeness => {
            let ratio = u.z_derive().div(u)?;
            Ok(&PowerSeries::constant(p, ratio.order()) + &ratio)
        }
        FunctionalKind::Convexity => {
            let v = f.normalized_derivative();
            let ratio = v.z_derive().div(&v)?;
            Ok(&PowerSeries::constant(p, ratio.order()) + &ratio)
        }
        FunctionalKind::SqrtDerivative => f.normalized_derivative().sqrt1(),
    }
}

/// Minimum of `Re h` over the grid; the value reported is the one on the largest circle.
pub fn inf_real_disk(h: &PowerSeries, grid: &DiskGrid) -> InfEstimate {
    let func = PolynomialOnCircle {
        coeffs: h.coeffs(),
        evaluator: CircleEvaluator::new(grid.angular_count()),
    };
    minimize_real(&func, grid)
}

/// Whether the last retained coefficient of `h` is still visible at the grid's largest radius.
pub fn series_truncation_warning(h: &PowerSeries, grid: &DiskGrid) -> bool {
    truncation_warning(h.coeffs(), grid.max_radius())
}

/// Grid minima of all four functionals of one function, evaluated pointwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalProfile {
    pub estimates: BTreeMap<FunctionalKind, InfEstimate>,
    /// Tail of the stored unit factor is not negligible at the largest radius.
    pub truncation_warning: bool,
    /// `min |u|` over the grid circles.
    pub min_modulus_unit: f64,
    /// `min |f'/(p z^{p-1})|` over the grid circles.
    pub min_modulus_derivative: f64,
    /// Zeros of `u` inside the largest circle.
    pub winding_unit: i64,
    /// Zeros of `f'/(p z^{p-1})` inside the largest circle.
    pub winding_derivative: i64,
    pub grid_fingerprint: String,
}

impl FunctionalProfile {
    pub fn estimate(&self, kind: FunctionalKind) -> &InfEstimate {
        &self.estimates[&kind]
    }

    /// `u` is zero-free on the sampled disk.
    pub fn unit_zero_free(&self) -> bool {
        self.min_modulus_unit > 1e-8 && self.winding_unit == 0
    }

    /// `f'/(p z^{p-1})` is zero-free on the sampled disk (grid surrogate for local p-valence).
    pub fn derivative_zero_free(&self) -> bool {
        self.min_modulus_derivative > 1e-8 && self.winding_derivative == 0
    }
}

/// The polynomials `u`, `z u'`, `v`, `z v'` of a function and their circle samples.
struct Sampled {
    p: f64,
    u: Vec<Complex64>,
    zu: Vec<Complex64>,
    v: Vec<Complex64>,
    zv: Vec<Complex64>,
    circles: Vec<[Vec<Complex64>; 4]>,
    sqrt_anchors: Vec<Complex64>,
}

const U: usize = 0;
const ZU: usize = 1;
const V: usize = 2;
const ZV: usize = 3;

impl Sampled {
    fn new(f: &MultivalentFunction, grid: &DiskGrid) -> Self {
        let u = f.unit().coeffs().to_vec();
        let zu = f.unit().z_derive().into_coeffs();
        let v_series = f.normalized_derivative();
        let zv = v_series.z_derive().into_coeffs();
        let v = v_series.into_coeffs();
        let evaluator = CircleEvaluator::new(grid.angular_count());
        let circles = grid
            .radii()
            .iter()
            .map(|&r| {
                [
                    evaluator.eval(&u, r),
                    evaluator.eval(&zu, r),
                    evaluator.eval(&v, r),
                    evaluator.eval(&zv, r),
                ]
            })
            .collect();
        let sqrt_anchors = radial_sqrt_anchors(&v, grid.radii());
        Self {
            p: f.p() as f64,
            u,
            zu,
            v,
            zv,
            circles,
            sqrt_anchors,
        }
    }
}

fn nearest_root(w: Complex64, reference: Complex64) -> Complex64 {
    let s = w.sqrt();
    if (s - reference).norm_sqr() <= (-s - reference).norm_sqr() {
        s
    } else {
        -s
    }
}

/// Square-root branch values at `z = r` for each radius, continued from `sqrt(v(0)) = 1`.
///
/// Steps along the real radius adapt so that consecutive roots differ by at
/// most a quarter of their modulus, far from where the nearest-root rule
/// could switch branches.
fn radial_sqrt_anchors(v: &[Complex64], radii: &[f64]) -> Vec<Complex64> {
    let max_step = radii.last().copied().unwrap_or(1.0) / RADIAL_STEPS as f64;
    let min_step = max_step * 1e-6;
    let mut t = 0.0;
    let mut h = max_step;
    let mut s = Complex64::new(1.0, 0.0);
    let mut anchors = Vec::with_capacity(radii.len());
    for &r in radii {
        while t < r {
            let x = (t + h).min(r);
            let next = nearest_root(horner(v, Complex64::new(x, 0.0)), s);
            let change = (next - s).norm() / s.norm().max(f64::MIN_POSITIVE);
            if change > 0.25 && h > min_step {
                h *= 0.5;
                continue;
            }
            s = next;
            t = x;
            if change < 0.05 {
                h = (h * 2.0).min(max_step * 64.0);
            }
        }
        anchors.push(s);
    }
    anchors
}

struct Pointwise<'a> {
    kind: FunctionalKind,
    data: &'a Sampled,
}

impl CircleFunction for Pointwise<'_> {
    fn on_circle(&self, radius_index: usize, _r: f64) -> (Vec<Complex64>, Option<f64>) {
        let c = &self.data.circles[radius_index];
        let p = self.data.p;
        let min_mod = |vals: &[Complex64]| vals.iter().map(|x| x.norm()).fold(f64::INFINITY, f64::min);
        match self.kind {
            FunctionalKind::PowerRatio => (c[U].clone(), Some(min_mod(&c[U]))),
            FunctionalKind::Starlikeness => (
                c[ZU].iter().zip(&c[U]).map(|(w, u)| p + w / u).collect(),
                Some(min_mod(&c[U])),
            ),
            FunctionalKind::Convexity => (
                c[ZV].iter().zip(&c[V]).map(|(y, v)| p + y / v).collect(),
                Some(min_mod(&c[V])),
            ),
            FunctionalKind::SqrtDerivative => {
                let mut prev = self.data.sqrt_anchors[radius_index];
                let values = c[V]
                    .iter()
                    .map(|&v| {
                        prev = nearest_root(v, prev);
                        prev
                    })
                    .collect();
                (values, Some(min_mod(&c[V])))
            }
        }
    }

    fn at(&self, z: Complex64, reference: Complex64) -> Complex64 {
        let d = self.data;
        match self.kind {
            FunctionalKind::PowerRatio => horner(&d.u, z),
            FunctionalKind::Starlikeness => d.p + horner(&d.zu, z) / horner(&d.u, z),
            FunctionalKind::Convexity => d.p + horner(&d.zv, z) / horner(&d.v, z),
            FunctionalKind::SqrtDerivative => nearest_root(horner(&d.v, z), reference),
        }
    }
}

/// Evaluates all four functionals of `f` pointwise on `grid`.
pub fn profile(f: &MultivalentFunction, grid: &DiskGrid) -> FunctionalProfile {
    let data = Sampled::new(f, grid);
    let estimates = FunctionalKind::ALL
        .iter()
        .map(|&kind| (kind, minimize_real(&Pointwise { kind, data: &data }, grid)))
        .collect();
    let min_over = |idx: usize| {
        data.circles
            .iter()
            .flat_map(|c| c[idx].iter())
            .map(|x| x.norm())
            .fold(f64::INFINITY, f64::min)
    };
    let outer = data.circles.last().expect("grid has radii");
    FunctionalProfile {
        estimates,
        truncation_warning: truncation_warning(f.unit().coeffs(), grid.max_radius()),
        min_modulus_unit: min_over(U),
        min_modulus_derivative: min_over(V),
        winding_unit: winding_number(&outer[U]),
        winding_derivative: winding_number(&outer[V]),
        grid_fingerprint: grid.fingerprint(),
    }
}

/// Result of testing `Re functional > bound` on the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointwiseReport {
    pub kind: FunctionalKind,
    pub bound: f64,
    pub estimate: InfEstimate,
    pub margin: f64,
    pub pass: bool,
    pub truncation_warning: bool,
    pub grid_fingerprint: String,
}

pub(crate) fn report_from_profile(profile: &FunctionalProfile, kind: FunctionalKind, bound: f64) -> PointwiseReport {
    let estimate = profile.estimate(kind).clone();
    let margin = estimate.value - bound;
    PointwiseReport {
        kind,
        bound,
        margin,
        pass: margin > 0.0,
        estimate,
        truncation_warning: profile.truncation_warning,
        grid_fingerprint: profile.grid_fingerprint.clone(),
    }
}

/// Checks `Re functional(f) > bound` on the sampled disk.
pub fn pointwise_check(
    f: &MultivalentFunction,
    kind: FunctionalKind,
    bound: f64,
    grid: &DiskGrid,
) -> PointwiseReport {
    report_from_profile(&profile(f, grid), kind, bound)
}
