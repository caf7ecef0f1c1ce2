//! Truncated complex power series on the unit disk.
//!
//! A [`PowerSeries`] stores the dense coefficients `c_0..=c_N`. Binary
//! operations truncate to the smaller of the two orders, so a chain of
//! operations never invents trailing terms that the inputs did not determine.

use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default truncation degree.
pub const DEFAULT_ORDER: usize = 32;

/// Tolerance below which a leading coefficient counts as a structural zero.
pub const LEADING_TOL: f64 = 1e-14;

/// Slack allowed on `|z| <= 1` before evaluation is refused.
pub const DISK_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    /// Builds a series from its coefficients `c_0..=c_N`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("a power series needs at least one coefficient".into()));
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(value: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = value;
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(Complex64::new(0.0, 0.0), order)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Complex64::new(1.0, 0.0), order)
    }

    /// The identity function `z`, truncated at `order` (which must be at least 1).
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order.max(1));
        s.coeffs[1] = Complex64::new(1.0, 0.0);
        s
    }

    /// Truncation degree `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient `k`, zero past the truncation degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Drops or zero-pads coefficients so that the result has degree `order`.
    pub fn with_order(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    /// Term-wise derivative; the order drops by one (a constant maps to the zero series of order 0).
    pub fn derive(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(0);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        Self { coeffs }
    }

    /// `z f'(z)`, which keeps the truncation degree.
    pub fn z_derive(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * k as f64)
            .collect();
        Self { coeffs }
    }

    /// Antiderivative vanishing at the origin; the order grows by one.
    pub fn integrate(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / (k + 1) as f64),
        );
        Self { coeffs }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Cauchy product truncated to the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let a = &self.coeffs;
        let b = &other.coeffs;
        let coeffs = (0..=n)
            .map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum())
            .collect();
        Self { coeffs }
    }

    /// Quotient `h` with `h * other = self` up to the common truncation order.
    pub fn div(&self, other: &Self) -> Result<Self> {
        let g0 = other.coeffs[0];
        if g0.norm() < LEADING_TOL {
            return Err(Error::ZeroLeadingCoefficient { modulus: g0.norm() });
        }
        let n = self.order().min(other.order());
        let g = &other.coeffs;
        let mut h: Vec<Complex64> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let acc: Complex64 = (1..=k).map(|j| g[j] * h[k - j]).sum();
            h.push((self.coeffs[k] - acc) / g0);
        }
        Self::checked(h)
    }

    /// Square root on the branch with value 1 at the origin.
    ///
    /// Coefficients follow `s_0 = 1`, `s_n = (g_n - sum_{k=1}^{n-1} s_k s_{n-k}) / 2`.
    pub fn sqrt1(&self) -> Result<Self> {
        self.require_normalized()?;
        let n = self.order();
        let mut s = vec![Complex64::new(0.0, 0.0); n + 1];
        s[0] = Complex64::new(1.0, 0.0);
        for m in 1..=n {
            let acc: Complex64 = (1..m).map(|k| s[k] * s[m - k]).sum();
            s[m] = (self.coeffs[m] - acc) * 0.5;
        }
        Self::checked(s)
    }

    /// Logarithm on the branch vanishing at the origin; needs a unit constant term.
    pub fn log1(&self) -> Result<Self> {
        self.require_normalized()?;
        if self.order() == 0 {
            return Ok(Self::zero(0));
        }
        let quotient = self.derive().div(&self.with_order(self.order() - 1))?;
        Ok(quotient.integrate())
    }

    /// `exp` of the series, through `n E_n = sum_{k=1}^n k h_k E_{n-k}`.
    pub fn exp(&self) -> Result<Self> {
        let n = self.order();
        let h = &self.coeffs;
        let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
        e[0] = h[0].exp();
        for m in 1..=n {
            let acc: Complex64 = (1..=m).map(|k| h[k] * e[m - k] * k as f64).sum();
            e[m] = acc / m as f64;
        }
        Self::checked(e)
    }

    /// Horner evaluation on the closed unit disk.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let modulus = z.norm();
        if modulus > 1.0 + DISK_SLACK {
            return Err(Error::OutOfDisk { modulus });
        }
        Ok(self.eval_unchecked(z))
    }

    /// Horner evaluation without the disk check.
    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        horner(&self.coeffs, z)
    }

    fn require_normalized(&self) -> Result<()> {
        let c0 = self.coeffs[0];
        if (c0 - Complex64::new(1.0, 0.0)).norm() > LEADING_TOL {
            return Err(Error::NotNormalized { re: c0.re, im: c0.im });
        }
        Ok(())
    }

    fn checked(coeffs: Vec<Complex64>) -> Result<Self> {
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { coeffs })
    }
}

pub(crate) fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    const LANES: usize = 8;
    let zero = Complex64::new(0.0, 0.0);
    if coeffs.len() < 8 * LANES {
        return coeffs.iter().rev().fold(zero, |acc, &c| acc * z + c);
    }
    // Independent Horner chains in w = z^LANES keep the multiplier pipeline
    // busy: p(z) = sum_j z^j P_j(w).
    let mut powers = [Complex64::new(1.0, 0.0); LANES];
    for j in 1..LANES {
        powers[j] = powers[j - 1] * z;
    }
    let w = powers[LANES - 1] * z;
    let mut acc = [zero; LANES];
    let chunks = coeffs.chunks_exact(LANES);
    let top = chunks.remainder().iter().rev().fold(zero, |t, &c| t * z + c);
    for chunk in chunks.rev() {
        for lane in 0..LANES {
            acc[lane] = acc[lane] * w + chunk[lane];
        }
    }
    let head: Complex64 = acc.iter().zip(&powers).map(|(a, zj)| a * zj).sum();
    head + top * w.powu((coeffs.len() / LANES) as u32)
}

impl Add for &PowerSeries {
    type Output = PowerSeries;

    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        let n = self.order().min(rhs.order());
        PowerSeries {
            coeffs: (0..=n).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect(),
        }
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;

    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        let n = self.order().min(rhs.order());
        PowerSeries {
            coeffs: (0..=n).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect(),
        }
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;

    fn neg(self) -> PowerSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Serialize for PowerSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PowerSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(deserializer)?;
        let coeffs = pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        PowerSeries::new(coeffs).map_err(serde::de::Error::custom)
    }
}

/// A function `f(z) = z^p u(z)` in `A_p`, optionally declared in the
/// fixed-coefficient class `A_{p,b}` (second coefficient `u_1 = b`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMultivalent", into = "RawMultivalent")]
pub struct MultivalentFunction {
    p: u32,
    b: Option<f64>,
    unit: PowerSeries,
}

#[derive(Serialize, Deserialize)]
struct RawMultivalent {
    p: u32,
    b: Option<f64>,
    unit_coeffs: PowerSeries,
}

impl TryFrom<RawMultivalent> for MultivalentFunction {
    type Error = Error;

    fn try_from(raw: RawMultivalent) -> Result<Self> {
        match raw.b {
            Some(b) => Self::with_fixed_coefficient(raw.p, b, raw.unit_coeffs),
            None => Self::new(raw.p, raw.unit_coeffs),
        }
    }
}

impl From<MultivalentFunction> for RawMultivalent {
    fn from(f: MultivalentFunction) -> Self {
        RawMultivalent {
            p: f.p,
            b: f.b,
            unit_coeffs: f.unit,
        }
    }
}

impl MultivalentFunction {
    /// A member of `A_p`: `unit` must have constant term exactly 1.
    pub fn new(p: u32, unit: PowerSeries) -> Result<Self> {
        if p == 0 {
            return Err(Error::Domain("valence p must be at least 1".into()));
        }
        let c0 = unit.coeff(0);
        if c0 != Complex64::new(1.0, 0.0) {
            return Err(Error::NotNormalized { re: c0.re, im: c0.im });
        }
        Ok(Self { p, b: None, unit })
    }

    /// A member of `A_{p,b}`: additionally `unit_1 = b` with `b >= 0` real.
    pub fn with_fixed_coefficient(p: u32, b: f64, unit: PowerSeries) -> Result<Self> {
        if !(b.is_finite() && b >= 0.0) {
            return Err(Error::Domain(format!("fixed coefficient b = {b} must be a finite non-negative real")));
        }
        let mut f = Self::new(p, unit)?;
        let c1 = f.unit.coeff(1);
        if c1 != Complex64::new(b, 0.0) {
            return Err(Error::ClassMismatch(format!(
                "second coefficient {} + {}i differs from declared b = {b}",
                c1.re, c1.im
            )));
        }
        f.b = Some(b);
        Ok(f)
    }

    /// `z^p`, which belongs to `A_{p,0}`.
    pub fn monomial(p: u32) -> Result<Self> {
        Self::with_fixed_coefficient(p, 0.0, PowerSeries::one(0))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn b(&self) -> Option<f64> {
        self.b
    }

    /// The normalized factor `u = f / z^p`.
    pub fn unit(&self) -> &PowerSeries {
        &self.unit
    }

    pub fn second_coefficient(&self) -> Complex64 {
        self.unit.coeff(1)
    }

    /// `f'(z) / (p z^{p-1}) = u + z u' / p`, exact for the stored polynomial.
    pub fn normalized_derivative(&self) -> PowerSeries {
        let p = self.p as f64;
        let coeffs = self
            .unit
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c * (1.0 + k as f64 / p))
            .collect();
        PowerSeries { coeffs }
    }

    /// Same function with the unit factor zero-padded (or truncated) to `order`.
    pub fn with_order(&self, order: usize) -> Self {
        Self {
            p: self.p,
            b: self.b,
            unit: self.unit.with_order(order),
        }
    }

    /// Full coefficient list of `f`, starting at `z^0`.
    pub fn coefficients(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.p as usize];
        out.extend_from_slice(self.unit.coeffs());
        out
    }
}
