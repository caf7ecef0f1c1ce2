//! Closed-form thresholds of the differential implications.
//!
//! Every piecewise bound here comes out of the two-branch minimum of
//! `phi(x, a, b) = (1 + x) / ((a - b)^2 x + b^2)` ([`phi_min`]). At a branch
//! junction the first branch is evaluated; both branches agree there.
//!
//! Parameters outside a theorem's stated range are rejected with
//! [`Error::Domain`] rather than clamped.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    T22,
    T24,
    T25,
    T31,
    T32,
    T33,
    T37,
    T38,
    LemmaPhi,
}

impl TheoremId {
    /// The eight implication theorems, without the auxiliary lemma.
    pub const IMPLICATIONS: [TheoremId; 8] = [
        TheoremId::T22,
        TheoremId::T24,
        TheoremId::T25,
        TheoremId::T31,
        TheoremId::T32,
        TheoremId::T33,
        TheoremId::T37,
        TheoremId::T38,
    ];

    /// Theorems stated for the fixed-coefficient class `A_{p,b}`.
    pub fn uses_fixed_coefficient(self) -> bool {
        matches!(
            self,
            TheoremId::T31 | TheoremId::T32 | TheoremId::T33 | TheoremId::T37 | TheoremId::T38
        )
    }

    /// Name of the level argument (`beta` or `gamma`), if the theorem takes one.
    pub fn level_name(self) -> Option<&'static str> {
        match self {
            TheoremId::T22 | TheoremId::T31 | TheoremId::T33 => Some("beta"),
            TheoremId::T24 | TheoremId::T32 | TheoremId::T37 => Some("gamma"),
            TheoremId::T25 | TheoremId::T38 | TheoremId::LemmaPhi => None,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "T22" => Ok(TheoremId::T22),
            "T24" => Ok(TheoremId::T24),
            "T25" => Ok(TheoremId::T25),
            "T31" => Ok(TheoremId::T31),
            "T32" => Ok(TheoremId::T32),
            "T33" => Ok(TheoremId::T33),
            "T37" => Ok(TheoremId::T37),
            "T38" => Ok(TheoremId::T38),
            "LEMMAPHI" | "PHI" => Ok(TheoremId::LemmaPhi),
            other => domain(format!("unknown theorem id {other:?}")),
        }
    }
}

/// A computed bound together with the parameters that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub theorem_id: TheoremId,
    pub p: u32,
    pub b: Option<f64>,
    pub input_level: Option<f64>,
    pub output_level: f64,
}

impl ThresholdSpec {
    /// Evaluates the implication bound of `theorem` (for `LemmaPhi`, `phi_min(p, b)`).
    ///
    /// `b` is required by the fixed-coefficient theorems and `level` by those
    /// taking a `beta` or `gamma` argument.
    pub fn compute(theorem: TheoremId, p: u32, b: Option<f64>, level: Option<f64>) -> Result<Self> {
        let need_b = || b.ok_or_else(|| Error::Domain(format!("{theorem} needs the fixed coefficient b")));
        let need_level = || {
            level.ok_or_else(|| {
                Error::Domain(format!("{theorem} needs {}", theorem.level_name().unwrap_or("a level")))
            })
        };
        let output_level = match theorem {
            TheoremId::T22 => alpha_t22(need_level()?, p)?,
            TheoremId::T24 => beta_t24(need_level()?, p)?,
            TheoremId::T25 => beta_t25(p)?,
            TheoremId::T31 => alpha_t31(need_level()?, p, need_b()?)?,
            TheoremId::T32 => beta_t32(need_level()?, p, need_b()?)?,
            TheoremId::T33 => alpha_t33(need_level()?, p, need_b()?)?,
            TheoremId::T37 => beta_t37(need_level()?, p, need_b()?)?,
            TheoremId::T38 => beta_t38(p, need_b()?)?,
            TheoremId::LemmaPhi => phi_min(p as f64, need_b()?)?,
        };
        let b = if theorem.uses_fixed_coefficient() || theorem == TheoremId::LemmaPhi { b } else { None };
        let input_level = if theorem.level_name().is_some() { level } else { None };
        Ok(Self {
            theorem_id: theorem,
            p,
            b,
            input_level,
            output_level,
        })
    }
}

/// `gamma_1 < gamma_3 < 1 <= min(gamma_2, gamma_4)` for admissible `(p, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootQuadruple {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
}

const UPPER_SLACK: f64 = 1e-12;

fn check_p(p: u32) -> Result<f64> {
    if p == 0 {
        return domain("valence p must be at least 1");
    }
    Ok(p as f64)
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if !x.is_finite() {
        return domain(format!("{name} = {x} is not finite"));
    }
    Ok(())
}

/// `x <= bound` up to a relative round-off allowance, so that a parameter
/// computed as exactly the range end point is accepted.
fn at_most(x: f64, bound: f64) -> bool {
    x <= bound + UPPER_SLACK * bound.abs().max(1.0)
}

fn check_b_range(b: f64, upper: f64, what: &str) -> Result<()> {
    check_finite("b", b)?;
    if b < 0.0 || !at_most(b, upper) {
        return domain(format!("b = {b} outside [0, {upper}] ({what})"));
    }
    Ok(())
}

pub fn phi(x: f64, a: f64, b: f64) -> Result<f64> {
    check_finite("x", x)?;
    if x < 0.0 {
        return domain(format!("x = {x} must be non-negative"));
    }
    if !(b >= 0.0 && b < a) {
        return domain(format!("phi needs 0 <= b < a, got a = {a}, b = {b}"));
    }
    let den = (a - b).powi(2) * x + b * b;
    if den == 0.0 {
        return Err(Error::SingularDenominator("phi(0, a, 0) is undefined".into()));
    }
    Ok((1.0 + x) / den)
}

/// Minimum of `phi(., a, b)` over `[0, inf)`: the limit at infinity for
/// `b <= a/2`, the value at the origin for `b >= a/2`.
pub fn phi_min(a: f64, b: f64) -> Result<f64> {
    check_finite("a", a)?;
    if !(b >= 0.0 && b < a) {
        return domain(format!("phi_min needs 0 <= b < a, got a = {a}, b = {b}"));
    }
    if b <= a / 2.0 {
        Ok(1.0 / (a - b).powi(2))
    } else {
        Ok(1.0 / (b * b))
    }
}

/// Convexity order that forces `Re sqrt(f'/(p z^{p-1})) > beta` on `A_p`.
pub fn alpha_t22(beta: f64, p: u32) -> Result<f64> {
    let pf = check_p(p)?;
    if !(0.0..1.0).contains(&beta) {
        return domain(format!("T22 needs 0 <= beta < 1, got {beta}"));
    }
    if beta <= 0.5 {
        Ok(pf - beta / (1.0 - beta))
    } else {
        Ok(pf - (1.0 - beta) / beta)
    }
}

/// Open lower end `(p^2 + 1)/(p + 1)^2` of the `gamma` range of [`beta_t24`].
pub fn t24_lower_endpoint(p: u32) -> Result<f64> {
    let pf = check_p(p)?;
    Ok((pf * pf + 1.0) / (pf + 1.0).powi(2))
}

fn check_t24(gamma: f64, p: u32) -> Result<f64> {
    let lo = t24_lower_endpoint(p)?;
    if !(gamma > lo && gamma < 1.0) {
        return domain(format!("T24 needs {lo} < gamma < 1, got {gamma}"));
    }
    Ok(p as f64)
}

/// `sqrt(((2p + 1) gamma - 1) / (2p))`.
pub fn beta_t24(gamma: f64, p: u32) -> Result<f64> {
    let pf = check_t24(gamma, p)?;
    Ok((((2.0 * pf + 1.0) * gamma - 1.0) / (2.0 * pf)).sqrt())
}

/// `sqrt(p) / 2`.
pub fn beta_t25(p: u32) -> Result<f64> {
    Ok(check_p(p)?.sqrt() / 2.0)
}

/// `xi + sqrt(xi^2 + eta^2)` with `xi = c - eta^2 / k`, written to avoid
/// cancellation when `xi < 0`.
fn xi_plus_modulus(xi: f64, eta: f64) -> f64 {
    let modulus = xi.hypot(eta);
    if xi >= 0.0 {
        xi + modulus
    } else if modulus == 0.0 {
        0.0
    } else {
        eta * eta / (modulus - xi)
    }
}

/// Majorant `h(eta)` of `xi + sqrt(xi^2 + eta^2)` on the admissibility boundary of T24.
pub fn h_function(eta: f64, gamma: f64, p: u32) -> Result<f64> {
    let pf = check_t24(gamma, p)?;
    check_finite("eta", eta)?;
    let xi = gamma - ((1.0 - gamma).powi(2) + eta * eta) / (2.0 * pf * (1.0 - gamma));
    Ok(xi_plus_modulus(xi, eta))
}

/// Closed form of `h''(0)`.
pub fn h_second_deriv_at0(gamma: f64, p: u32) -> Result<f64> {
    let pf = check_t24(gamma, p)?;
    let num = 2.0 * (1.0 - (2.0 * pf + 1.0) * gamma + pf * pf * (1.0 - gamma));
    let den = pf * (1.0 - gamma) * ((2.0 * pf + 1.0) * gamma - 1.0);
    Ok(num / den)
}

/// Convexity order that forces starlikeness of order `beta` on `A_{p,b}`.
pub fn alpha_t31(beta: f64, p: u32, b: f64) -> Result<f64> {
    let pf = check_p(p)?;
    if !(beta >= 0.0 && beta < pf) {
        return domain(format!("T31 needs 0 <= beta < p, got beta = {beta}, p = {p}"));
    }
    check_b_range(b, 2.0 * (pf - beta), "T31: b <= 2(p - beta)")?;
    let d = 2.0 * (pf - beta) + b;
    if beta <= pf / 2.0 {
        Ok(beta * (1.0 - 2.0 / d))
    } else {
        Ok(beta * (1.0 - 2.0 * (pf - beta).powi(2) / (beta * beta * d)))
    }
}

/// Starlikeness order that forces `Re(f/z^p) > gamma` on `A_{p,b}`.
pub fn beta_t32(gamma: f64, p: u32, b: f64) -> Result<f64> {
    let pf = check_p(p)?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return domain(format!("T32 needs 0 < gamma < 1, got {gamma}"));
    }
    check_b_range(b, 2.0 * (1.0 - gamma), "T32: b <= 2(1 - gamma)")?;
    let d = 2.0 * (1.0 - gamma) + b;
    if gamma <= 0.5 {
        Ok(pf - 2.0 * gamma / d)
    } else {
        Ok(pf - 2.0 * (1.0 - gamma).powi(2) / (gamma * d))
    }
}

/// Convexity order that forces `Re sqrt(f'/(p z^{p-1})) > beta` on `A_{p,b}`.
pub fn alpha_t33(beta: f64, p: u32, b: f64) -> Result<f64> {
    let pf = check_p(p)?;
    if !(0.0..1.0).contains(&beta) {
        return domain(format!("T33 needs 0 <= beta < 1, got {beta}"));
    }
    check_finite("b", b)?;
    if b < 0.0 || !at_most((pf + 1.0) * b, 4.0 * pf * (1.0 - beta)) {
        return domain(format!("T33 needs 0 <= (p + 1) b <= 4p(1 - beta), got b = {b}"));
    }
    let d = 4.0 * pf * (1.0 - beta) + (pf + 1.0) * b;
    if beta <= 0.5 {
        Ok(pf - 8.0 * pf * beta / d)
    } else {
        Ok(pf - 8.0 * pf * (1.0 - beta).powi(2) / (beta * d))
    }
}

fn check_t37_domain(gamma: f64, p: u32, b: f64) -> Result<f64> {
    let pf = check_p(p)?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return domain(format!("T37 needs 0 < gamma < 1, got {gamma}"));
    }
    check_b_range(b, 2.0 * (1.0 - gamma), "T37: b <= 2(1 - gamma)")?;
    Ok(pf)
}

/// Left-hand side of the T37 feasibility inequality (feasible iff negative).
pub fn t37_condition(gamma: f64, p: u32, b: f64) -> Result<f64> {
    let pf = check_t37_domain(gamma, p, b)?;
    let d = 2.0 * (1.0 - gamma) + b;
    Ok(pf * pf * d * d + 16.0 * (1.0 - gamma).powi(2) - 8.0 * pf * gamma * d)
}

pub fn feasible_t37(gamma: f64, p: u32, b: f64) -> Result<bool> {
    Ok(t37_condition(gamma, p, b)? < 0.0)
}

/// `(4 + (2 + b)p) gamma - 2(1 + p) gamma^2 - 2`, the numerator shared by the T37 bound and `g`.
fn t37_numerator(gamma: f64, pf: f64, b: f64) -> f64 {
    (4.0 + (2.0 + b) * pf) * gamma - 2.0 * (1.0 + pf) * gamma * gamma - 2.0
}

/// `beta(gamma, p, b)` of T37; requires the feasibility inequality.
pub fn beta_t37(gamma: f64, p: u32, b: f64) -> Result<f64> {
    let pf = check_t37_domain(gamma, p, b)?;
    if !feasible_t37(gamma, p, b)? {
        return Err(Error::Infeasible(format!(
            "T37 feasibility condition fails at gamma = {gamma}, p = {p}, b = {b}"
        )));
    }
    let d = b + 2.0 * (1.0 - gamma);
    Ok((t37_numerator(gamma, pf, b) / (pf * d)).sqrt())
}

/// Closed-form roots `gamma_1..gamma_4` of the two quadratics in `g''(0)`.
pub fn gamma_roots(p: u32, b: f64) -> Result<RootQuadruple> {
    let pf = check_p(p)?;
    check_finite("b", b)?;
    if b < 0.0 {
        return domain(format!("b = {b} must be non-negative"));
    }
    let lin = 4.0 + (2.0 + b) * pf;
    let disc12 = (pf * (b * (8.0 + b * pf) + 4.0 * pf * (1.0 + b))).sqrt();
    let centre34 = 8.0 + pf * (2.0 + b) * (2.0 + pf);
    let disc34 = 4.0 * (pf * pf * (1.0 + b) + 2.0 * pf * b).sqrt();
    let den34 = 2.0 * (pf + 2.0).powi(2);
    Ok(RootQuadruple {
        gamma1: (lin - disc12) / (4.0 * (1.0 + pf)),
        gamma2: (lin + disc12) / (4.0 * (1.0 + pf)),
        gamma3: (centre34 - disc34) / den34,
        gamma4: (centre34 + disc34) / den34,
    })
}

/// Majorant `g(eta)` of `xi + sqrt(xi^2 + eta^2)` on the admissibility boundary of T37.
pub fn g_function(eta: f64, gamma: f64, p: u32, b: f64) -> Result<f64> {
    let pf = check_t37_domain(gamma, p, b)?;
    check_finite("eta", eta)?;
    let d = 2.0 * (1.0 - gamma) + b;
    let xi = (t37_numerator(gamma, pf, b) - 2.0 * eta * eta) / (pf * d);
    Ok(xi_plus_modulus(xi, eta))
}

/// Closed form of `g''(0)`.
pub fn g_second_deriv_at0(gamma: f64, p: u32, b: f64) -> Result<f64> {
    let num = t37_condition(gamma, p, b)?;
    let pf = p as f64;
    let d = 2.0 * (1.0 - gamma) + b;
    Ok(num / (pf * d * t37_numerator(gamma, pf, b)))
}

/// `g''(0)` through the factorization in `gamma_1..gamma_4`.
pub fn g_second_deriv_at0_factored(gamma: f64, p: u32, b: f64) -> Result<f64> {
    let pf = check_t37_domain(gamma, p, b)?;
    let r = gamma_roots(p, b)?;
    let d = 2.0 * (1.0 - gamma) + b;
    let num = 2.0 * (pf + 2.0).powi(2) * (gamma - r.gamma3) * (gamma - r.gamma4);
    let den = pf * (pf + 1.0) * d * (gamma - r.gamma1) * (r.gamma2 - gamma);
    Ok(num / den)
}

/// `sqrt((1 + b) p / 8)`.
pub fn beta_t38(p: u32, b: f64) -> Result<f64> {
    let pf = check_p(p)?;
    check_b_range(b, 1.0, "T38: 0 <= b <= 1")?;
    Ok(((1.0 + b) * pf / 8.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn phi_examples() {
        assert_eq!(phi(0.0, 1.0, 0.5).unwrap(), 4.0);
        assert_abs_diff_eq!(phi(1.0, 2.0, 0.5).unwrap(), 0.8, epsilon = 1e-15);
        assert!(matches!(phi(0.0, 1.0, 0.0), Err(Error::SingularDenominator(_))));
        assert!(matches!(phi(1.0, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(phi(1.0, 1.0, -0.1), Err(Error::Domain(_))));
        // b = 0: (1 + x)/(a^2 x) decreases towards 1/a^2
        let a = 3.0;
        let vals: Vec<f64> = [0.5, 1.0, 10.0, 1e6].iter().map(|&x| phi(x, a, 0.0).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        assert_abs_diff_eq!(vals[3], 1.0 / 9.0, epsilon = 1e-6);
    }

    #[test]
    fn phi_min_examples() {
        assert_eq!(phi_min(1.0, 0.5).unwrap(), 4.0);
        assert_eq!(1.0 / (0.5f64 * 0.5), 4.0);
        assert_abs_diff_eq!(phi_min(2.0, 1.8).unwrap(), 1.0 / 3.24, epsilon = 1e-15);
        assert_eq!(phi_min(2.5, 0.0).unwrap(), 1.0 / 6.25);
        assert!(phi_min(1.0, 1.0).is_err());
    }

    #[test]
    fn alpha_t22_examples() {
        assert_eq!(alpha_t22(0.5, 1).unwrap(), 0.0);
        for p in 1..6 {
            assert_eq!(alpha_t22(0.0, p).unwrap(), p as f64);
        }
        assert_abs_diff_eq!(alpha_t22(0.75, 2).unwrap(), 5.0 / 3.0, epsilon = 1e-15);
        assert!(alpha_t22(1.0, 1).is_err());
        assert!(alpha_t22(-0.1, 1).is_err());
    }

    #[test]
    fn beta_t24_examples() {
        assert_abs_diff_eq!(beta_t24(1.0 - 1e-12, 1).unwrap(), 1.0, epsilon = 1e-11);
        assert_abs_diff_eq!(beta_t24(2.0 / 3.0, 1).unwrap(), 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(beta_t24(0.9, 2).unwrap(), 0.875f64.sqrt(), epsilon = 1e-15);
        // the lower end point is excluded
        assert!(beta_t24(0.5, 1).is_err());
        assert!(beta_t24(5.0 / 9.0, 2).is_err());
        assert!(beta_t24(1.0, 2).is_err());
    }

    #[test]
    fn beta_t25_examples() {
        assert_eq!(beta_t25(1).unwrap(), 0.5);
        assert_eq!(beta_t25(4).unwrap(), 1.0);
        assert_abs_diff_eq!(beta_t25(2).unwrap(), 0.707_106_781_186_547_5, epsilon = 1e-15);
        assert!(beta_t25(0).is_err());
    }

    #[test]
    fn h_at_origin() {
        for p in 1..5u32 {
            let pf = p as f64;
            let gamma = 0.5 * (t24_lower_endpoint(p).unwrap() + 1.0);
            assert_abs_diff_eq!(
                h_function(0.0, gamma, p).unwrap(),
                ((2.0 * pf + 1.0) * gamma - 1.0) / pf,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn alpha_t31_examples() {
        for p in 1..5u32 {
            let pf = p as f64;
            let beta = 0.3 * pf;
            let b = 2.0 * (pf - beta);
            assert_abs_diff_eq!(
                alpha_t31(beta, p, b).unwrap(),
                beta * (1.0 - 1.0 / (2.0 * (pf - beta))),
                epsilon = 1e-14
            );
            assert_eq!(alpha_t31(0.0, p, 0.3).unwrap(), 0.0);
        }
        assert_abs_diff_eq!(alpha_t31(1.0, 2, 2.0).unwrap(), 0.5, epsilon = 1e-15);
        assert!(alpha_t31(1.0, 2, 2.1).is_err());
        assert!(alpha_t31(2.0, 2, 0.0).is_err());
    }

    #[test]
    fn beta_t32_examples() {
        for p in 1..5u32 {
            for b in [0.0, 0.25, 0.5, 1.0] {
                assert_abs_diff_eq!(
                    beta_t32(0.5, p, b).unwrap(),
                    p as f64 - 1.0 / (1.0 + b),
                    epsilon = 1e-14
                );
            }
        }
        assert_eq!(beta_t32(0.5, 1, 0.0).unwrap(), 0.0);
        // b = 2(1 - gamma): the unfixed bound p - gamma/(2(1 - gamma)) resp. p - (1 - gamma)/(2 gamma)
        let g = 0.3;
        assert_abs_diff_eq!(beta_t32(g, 2, 2.0 * (1.0 - g)).unwrap(), 2.0 - g / (2.0 * (1.0 - g)), epsilon = 1e-14);
        let g = 0.8;
        assert_abs_diff_eq!(beta_t32(g, 2, 2.0 * (1.0 - g)).unwrap(), 2.0 - (1.0 - g) / (2.0 * g), epsilon = 1e-14);
        assert!(beta_t32(0.5, 1, 1.01).is_err());
        assert!(beta_t32(0.0, 1, 0.0).is_err());
    }

    #[test]
    fn alpha_t33_examples() {
        for p in 1..5u32 {
            let pf = p as f64;
            for beta in [0.1, 0.5, 0.7] {
                let b = 4.0 * pf * (1.0 - beta) / (pf + 1.0);
                assert_abs_diff_eq!(alpha_t33(beta, p, b).unwrap(), alpha_t22(beta, p).unwrap(), epsilon = 1e-13);
            }
            let b = 0.4;
            assert_abs_diff_eq!(
                alpha_t33(0.5, p, b).unwrap(),
                pf - 4.0 * pf / (2.0 * pf + (pf + 1.0) * b),
                epsilon = 1e-14
            );
            assert_abs_diff_eq!(alpha_t33(0.3, p, 0.0).unwrap(), pf - 0.6 / 0.7, epsilon = 1e-14);
        }
        assert!(alpha_t33(0.5, 1, 1.01).is_err());
    }

    #[test]
    fn t37_examples() {
        for p in 1..5u32 {
            let pf = p as f64;
            for gamma in [0.85, 0.9, 0.97] {
                let b = 2.0 * (1.0 - gamma);
                if gamma > t24_lower_endpoint(p).unwrap() {
                    assert_abs_diff_eq!(beta_t37(gamma, p, b).unwrap(), beta_t24(gamma, p).unwrap(), epsilon = 1e-13);
                    let sq = ((2.0 * pf + 1.0) * gamma - 1.0) / (2.0 * pf);
                    assert_abs_diff_eq!(beta_t37(gamma, p, b).unwrap().powi(2), sq, epsilon = 1e-13);
                }
            }
        }
        assert!(!feasible_t37(0.3, 1, 0.1).unwrap());
        assert!(matches!(beta_t37(0.3, 1, 0.1), Err(Error::Infeasible(_))));
        assert!(matches!(beta_t37(0.9, 1, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn roots_at_b_zero() {
        for p in 1..6 {
            let r = gamma_roots(p, 0.0).unwrap();
            assert_eq!(r.gamma2, 1.0);
            assert_eq!(r.gamma4, 1.0);
            assert!(r.gamma1 < r.gamma3 && r.gamma3 < 1.0);
        }
    }

    #[test]
    fn beta_t38_examples() {
        for p in 1..6 {
            assert_abs_diff_eq!(beta_t38(p, 1.0).unwrap(), beta_t25(p).unwrap(), epsilon = 1e-15);
        }
        assert_eq!(beta_t38(1, 1.0).unwrap(), 0.5);
        assert_eq!(beta_t38(2, 0.0).unwrap(), 0.5);
        assert!(beta_t38(1, 1.5).is_err());
    }

    #[test]
    fn junctions_are_continuous() {
        for p in 1..6u32 {
            let pf = p as f64;
            let eps = 1e-12;
            let a = alpha_t22(0.5 - eps, p).unwrap();
            let c = alpha_t22(0.5 + eps, p).unwrap();
            assert!((a - c).abs() < 1e-10);
            for b in [0.0, 0.3, 0.9] {
                let (l, r) = (alpha_t31(pf / 2.0 - eps, p, b).unwrap(), alpha_t31(pf / 2.0 + eps, p, b).unwrap());
                assert!((l - r).abs() < 1e-10);
                let (l, r) = (beta_t32(0.5 - eps, p, b).unwrap(), beta_t32(0.5 + eps, p, b).unwrap());
                assert!((l - r).abs() < 1e-10);
                let (l, r) = (alpha_t33(0.5 - eps, p, b).unwrap(), alpha_t33(0.5 + eps, p, b).unwrap());
                assert!((l - r).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn compute_dispatch() {
        let spec = ThresholdSpec::compute(TheoremId::T31, 2, Some(2.0), Some(1.0)).unwrap();
        assert_abs_diff_eq!(spec.output_level, 0.5, epsilon = 1e-15);
        assert!(ThresholdSpec::compute(TheoremId::T31, 2, None, Some(1.0)).is_err());
        let spec = ThresholdSpec::compute(TheoremId::T25, 4, Some(3.0), Some(0.1)).unwrap();
        assert_eq!(spec.output_level, 1.0);
        assert_eq!(spec.b, None);
        assert_eq!(spec.input_level, None);
        assert_eq!("t37".parse::<TheoremId>().unwrap(), TheoremId::T37);
        assert!("T99".parse::<TheoremId>().is_err());
    }
}
