//! Polar sampling grids on the unit disk and the real-part minimizer that runs on them.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::horner;

pub const DEFAULT_ANGULAR_COUNT: usize = 4096;
pub const DEFAULT_RADIUS_STEPS: u32 = 10;
pub const DEFAULT_REFINE_ROUNDS: u32 = 3;
/// Bisection rounds on the largest circle, whose minimum is the reported value.
/// Enough to reach round-off in the angle, so the estimate does not depend on
/// where the coarse samples happen to fall.
pub const OUTER_REFINE_ROUNDS: u32 = 48;

/// Radii in `(0, 1)` times `angular_count` equispaced angles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskGrid {
    radii: Vec<f64>,
    angular_count: usize,
    refine_rounds: u32,
}

impl DiskGrid {
    pub fn new(radii: Vec<f64>, angular_count: usize) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidGrid("no radii".into()));
        }
        if radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
            return Err(Error::InvalidGrid("radii must lie in (0, 1)".into()));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("radii must be strictly increasing".into()));
        }
        if angular_count < 8 || !angular_count.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "angular_count {angular_count} must be a power of two >= 8"
            )));
        }
        Ok(Self {
            radii,
            angular_count,
            refine_rounds: DEFAULT_REFINE_ROUNDS,
        })
    }

    /// Radii `1 - 2^{-j}` for `j = 1..=steps`.
    pub fn geometric(steps: u32, angular_count: usize) -> Result<Self> {
        let radii = (1..=steps).map(|j| 1.0 - 0.5f64.powi(j as i32)).collect();
        Self::new(radii, angular_count)
    }

    /// A single circle of radius `r`.
    pub fn circle(r: f64, angular_count: usize) -> Result<Self> {
        Self::new(vec![r], angular_count)
    }

    pub fn with_refine_rounds(mut self, rounds: u32) -> Self {
        self.refine_rounds = rounds;
        self
    }

    pub fn with_angular_count(&self, angular_count: usize) -> Result<Self> {
        Ok(Self::new(self.radii.clone(), angular_count)?.with_refine_rounds(self.refine_rounds))
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angular_count(&self) -> usize {
        self.angular_count
    }

    pub fn refine_rounds(&self) -> u32 {
        self.refine_rounds
    }

    pub fn max_radius(&self) -> f64 {
        *self.radii.last().expect("grid has radii")
    }

    pub fn angle(&self, index: usize) -> f64 {
        2.0 * PI * index as f64 / self.angular_count as f64
    }

    /// Short stable description used to tag reports computed on this grid.
    pub fn fingerprint(&self) -> String {
        let bits = self
            .radii
            .iter()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, r| fnv(h, r.to_bits()));
        format!(
            "r{}[{:.6}..{:.6}]/m{}/refine{}/{:016x}",
            self.radii.len(),
            self.radii[0],
            self.max_radius(),
            self.angular_count,
            self.refine_rounds,
            bits
        )
    }
}

impl Default for DiskGrid {
    fn default() -> Self {
        Self::geometric(DEFAULT_RADIUS_STEPS, DEFAULT_ANGULAR_COUNT).expect("default grid is valid")
    }
}

fn fnv(mut h: u64, word: u64) -> u64 {
    for byte in word.to_le_bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Evaluates polynomials at the `M` grid angles of a circle with one inverse FFT.
///
/// Coefficients are folded modulo `M` first, which is exact because
/// `e^{i k theta_m}` only depends on `k mod M`.
pub(crate) struct CircleEvaluator {
    fft: Arc<dyn Fft<f64>>,
    m: usize,
}

impl CircleEvaluator {
    pub(crate) fn new(m: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_inverse(m);
        Self { fft, m }
    }

    pub(crate) fn eval(&self, coeffs: &[Complex64], r: f64) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.m];
        let mut power = 1.0;
        for (k, c) in coeffs.iter().enumerate() {
            // Below the normal range the remaining terms are negligible, and
            // subnormal `power *= r` can stall at the smallest subnormal.
            if power < f64::MIN_POSITIVE {
                break;
            }
            buf[k % self.m] += c * power;
            power *= r;
        }
        self.fft.process(&mut buf);
        buf
    }
}

/// Something whose real part is minimized over a grid circle.
pub(crate) trait CircleFunction {
    /// Values at the grid angles of `|z| = r`, plus the minimum modulus of the
    /// denominator met along the way (if the function has one).
    fn on_circle(&self, radius_index: usize, r: f64) -> (Vec<Complex64>, Option<f64>);

    /// Value at one off-grid point; `reference` is a nearby value used to pick a branch.
    fn at(&self, z: Complex64, reference: Complex64) -> Complex64;
}

/// Outcome of the disk minimization of a real part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfEstimate {
    /// Minimum over the largest sampled circle: an upper bound of the disk infimum.
    pub value: f64,
    pub argmin: Complex64,
    pub per_radius_min: Vec<f64>,
    pub min_modulus_denominator: Option<f64>,
}

impl InfEstimate {
    /// `radius,min` rows for plotting.
    pub fn per_radius_csv(&self, grid: &DiskGrid) -> String {
        let mut out = String::from("radius,min_real_part\n");
        for (r, m) in grid.radii().iter().zip(&self.per_radius_min) {
            out.push_str(&format!("{r},{m}\n"));
        }
        out
    }
}

pub(crate) fn minimize_real<F: CircleFunction>(func: &F, grid: &DiskGrid) -> InfEstimate {
    let m = grid.angular_count();
    let mut per_radius_min = Vec::with_capacity(grid.radii().len());
    let mut denominator: Option<f64> = None;
    let mut last_argmin = Complex64::new(0.0, 0.0);

    for (ri, &r) in grid.radii().iter().enumerate() {
        let (values, denom) = func.on_circle(ri, r);
        if let Some(d) = denom {
            denominator = Some(denominator.map_or(d, |cur: f64| cur.min(d)));
        }
        // first index wins ties
        let mut best_index = 0;
        for (i, v) in values.iter().enumerate() {
            if v.re < values[best_index].re {
                best_index = i;
            }
        }
        let mut best_theta = grid.angle(best_index);
        let mut best_value = values[best_index];
        let mut step = 2.0 * PI / m as f64;
        let rounds = if ri + 1 == grid.radii().len() {
            grid.refine_rounds().max(OUTER_REFINE_ROUNDS)
        } else {
            grid.refine_rounds()
        };
        for _ in 0..rounds {
            step *= 0.5;
            let centre = best_theta;
            let reference = best_value;
            for theta in [centre - step, centre + step] {
                let value = func.at(Complex64::from_polar(r, theta), reference);
                if value.re < best_value.re {
                    best_value = value;
                    best_theta = theta;
                }
            }
        }
        per_radius_min.push(best_value.re);
        last_argmin = Complex64::from_polar(r, best_theta);
    }

    InfEstimate {
        value: *per_radius_min.last().expect("grid has radii"),
        argmin: last_argmin,
        per_radius_min,
        min_modulus_denominator: denominator,
    }
}

/// A bare polynomial as a circle function.
pub(crate) struct PolynomialOnCircle<'a> {
    pub(crate) coeffs: &'a [Complex64],
    pub(crate) evaluator: CircleEvaluator,
}

impl CircleFunction for PolynomialOnCircle<'_> {
    fn on_circle(&self, _radius_index: usize, r: f64) -> (Vec<Complex64>, Option<f64>) {
        (self.evaluator.eval(self.coeffs, r), None)
    }

    fn at(&self, z: Complex64, _reference: Complex64) -> Complex64 {
        horner(self.coeffs, z)
    }
}

/// Net number of turns of a closed sampled curve around the origin.
pub(crate) fn winding_number(values: &[Complex64]) -> i64 {
    let n = values.len();
    let total: f64 = (0..n)
        .map(|i| (values[(i + 1) % n] / values[i]).arg())
        .sum();
    (total / (2.0 * PI)).round() as i64
}

/// Minimum modulus of a polynomial over all grid circles and its winding number on the largest one.
pub(crate) fn zero_scan(coeffs: &[Complex64], grid: &DiskGrid) -> (f64, i64) {
    let evaluator = CircleEvaluator::new(grid.angular_count());
    let mut min_modulus = f64::INFINITY;
    let mut outer = Vec::new();
    for &r in grid.radii() {
        let values = evaluator.eval(coeffs, r);
        min_modulus = values.iter().map(|v| v.norm()).fold(min_modulus, f64::min);
        outer = values;
    }
    (min_modulus, winding_number(&outer))
}

/// `|c_N| r^N (N + 1) > 1e-8`: the highest retained term is not negligible at radius `r`.
pub(crate) fn truncation_warning(coeffs: &[Complex64], r: f64) -> bool {
    let n = coeffs.len() - 1;
    n > 0 && coeffs[n].norm() * r.powi(n as i32) * (n as f64 + 1.0) > 1e-8
}
