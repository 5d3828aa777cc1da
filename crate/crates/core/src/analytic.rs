//! Closed forms for the worked example families.
//!
//! - squeezed vacuum `λ` (probe = tick):
//!   `W(α) = (2/π) e^{−2x²/λ − 2λy²}`, `Γ(τ) = π⁻² e^{−τ_x²/λ − λτ_y²}`, `τ_c = 1/(2π³)`
//! - two squeezed vacua `λ` (probe), `μ` (tick):
//!   `Γ(τ) = π⁻² e^{−(λ+μ)τ_x²/(2λμ) − (λ+μ)τ_y²/2}`, `τ_c = π⁻³ √(λ/μ)/(1 + λ/μ)`
//! - number state `n` (probe = tick):
//!   `W(α) = (2(−1)ⁿ/π) e^{−2|α|²} L_n(4|α|²)`, `Γ(τ) = π⁻² e^{−|τ|²} L_n(|τ|²)²`

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::laguerre;
use crate::quad::adaptive_gk;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticCase {
    Squeezed(f64),
    TwoSqueezed(f64, f64),
    Number(usize),
}

impl AnalyticCase {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AnalyticCase::Squeezed(l) if !(l > 0.0 && l.is_finite()) => {
                Err(Error::input(format!("squeezing must be > 0, got {l}")))
            }
            AnalyticCase::TwoSqueezed(l, m)
                if !(l > 0.0 && m > 0.0 && l.is_finite() && m.is_finite()) =>
            {
                Err(Error::input(format!(
                    "squeezings must be > 0, got ({l}, {m})"
                )))
            }
            _ => Ok(()),
        }
    }
}

pub fn gamma_analytic(case: &AnalyticCase, tau: Complex64) -> Result<f64> {
    case.validate()?;
    let (tx2, ty2) = (tau.re * tau.re, tau.im * tau.im);
    let pi2 = PI * PI;
    Ok(match *case {
        AnalyticCase::Squeezed(l) => (-tx2 / l - l * ty2).exp() / pi2,
        AnalyticCase::TwoSqueezed(l, m) => {
            (-(l + m) * tx2 / (2.0 * l * m) - (l + m) * ty2 / 2.0).exp() / pi2
        }
        AnalyticCase::Number(n) => {
            let t = tx2 + ty2;
            let ln = laguerre(n, 0, t)?;
            (-t).exp() * ln * ln / pi2
        }
    })
}

/// `∫d²τ |Γ(τ)|²`.
///
/// The number-state value has no closed form; the angular integral is done
/// analytically and the radial one by adaptive quadrature,
/// `π⁻³ ∫₀^∞ e^{−2t} L_n(t)⁴ dt`.
pub fn tau_c_analytic(case: &AnalyticCase) -> Result<f64> {
    case.validate()?;
    let pi3 = PI.powi(3);
    match *case {
        AnalyticCase::Squeezed(_) => Ok(1.0 / (2.0 * pi3)),
        AnalyticCase::TwoSqueezed(l, m) => {
            let q = l / m;
            Ok(q.sqrt() / (1.0 + q) / pi3)
        }
        AnalyticCase::Number(n) => {
            laguerre(n, 0, 0.0)?;
            // e^{−2t} L_n(t)⁴ is negligible beyond the largest zero plus a margin
            let upper = 4.0 * n as f64 + 60.0;
            let integrand = |t: f64| {
                let l = laguerre(n, 0, t).unwrap_or(f64::NAN);
                (-2.0 * t).exp() * l.powi(4)
            };
            Ok(adaptive_gk(integrand, 0.0, upper, 1e-12) / pi3)
        }
    }
}

pub fn wigner_analytic(case: &AnalyticCase, alpha: Complex64) -> Result<f64> {
    case.validate()?;
    match *case {
        AnalyticCase::Squeezed(l) => {
            let (x, y) = (alpha.re, alpha.im);
            Ok(2.0 / PI * (-2.0 * x * x / l - 2.0 * l * y * y).exp())
        }
        AnalyticCase::Number(n) => {
            let r2 = alpha.norm_sqr();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            Ok(2.0 * sign / PI * (-2.0 * r2).exp() * laguerre(n, 0, 4.0 * r2)?)
        }
        AnalyticCase::TwoSqueezed(..) => Err(Error::input(
            "two different squeezed states have no single Wigner function",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_values() {
        let g0 = gamma_analytic(&AnalyticCase::Squeezed(1.0), c(0.0, 0.0)).unwrap();
        assert_relative_eq!(g0, 1.0 / (PI * PI));
        assert!((g0 - 0.101321).abs() < 1e-6);
        for tau in [c(0.3, -1.1), c(2.0, 0.4), c(-0.7, 0.0)] {
            for l in [0.3, 1.0, 2.5] {
                assert_eq!(
                    gamma_analytic(&AnalyticCase::TwoSqueezed(l, l), tau).unwrap(),
                    gamma_analytic(&AnalyticCase::Squeezed(l), tau).unwrap()
                );
            }
            assert_relative_eq!(
                gamma_analytic(&AnalyticCase::Number(0), tau).unwrap(),
                gamma_analytic(&AnalyticCase::Squeezed(1.0), tau).unwrap(),
                max_relative = 1e-15
            );
        }
        let root = (2.0 + 2f64.sqrt()).sqrt();
        assert!(
            gamma_analytic(&AnalyticCase::Number(2), c(root, 0.0))
                .unwrap()
                .abs()
                < 1e-20
        );
    }

    #[test]
    fn tau_c_values() {
        let pi3 = PI.powi(3);
        assert_relative_eq!(
            tau_c_analytic(&AnalyticCase::Squeezed(0.37)).unwrap(),
            1.0 / (2.0 * pi3)
        );
        let two = tau_c_analytic(&AnalyticCase::TwoSqueezed(1.0, 4.0)).unwrap();
        assert_relative_eq!(two, 0.4 / pi3, max_relative = 1e-15);
        // moment expansion: ∫e^{−2t}(1−t)⁴ dt = 1/2 − 1 + 3/2 − 3/2 + 3/4 = 1/4
        let one = tau_c_analytic(&AnalyticCase::Number(1)).unwrap();
        assert_relative_eq!(one, 0.25 / pi3, max_relative = 1e-9);
        let zero = tau_c_analytic(&AnalyticCase::Number(0)).unwrap();
        assert_relative_eq!(zero, 1.0 / (2.0 * pi3), max_relative = 1e-9);
    }

    #[test]
    fn number_tau_c_matches_moment_expansion() {
        // independent check: expand L_n(t)⁴ into powers of t, ∫t^k e^{−2t} dt = k!/2^{k+1}
        for n in 2..6usize {
            let mut coeffs = vec![0.0f64; n + 1];
            let mut binom = 1.0;
            let mut fact = 1.0;
            for (j, cj) in coeffs.iter_mut().enumerate() {
                if j > 0 {
                    binom *= (n + 1 - j) as f64 / j as f64;
                    fact *= j as f64;
                }
                *cj = if j % 2 == 0 { 1.0 } else { -1.0 } * binom / fact;
            }
            let mul = |a: &[f64], b: &[f64]| {
                let mut out = vec![0.0; a.len() + b.len() - 1];
                for (i, x) in a.iter().enumerate() {
                    for (j, y) in b.iter().enumerate() {
                        out[i + j] += x * y;
                    }
                }
                out
            };
            let sq = mul(&coeffs, &coeffs);
            let quart = mul(&sq, &sq);
            let mut kfact = 1.0;
            let mut integral = 0.0;
            for (k, ck) in quart.iter().enumerate() {
                if k > 0 {
                    kfact *= k as f64;
                }
                integral += ck * kfact / 2f64.powi(k as i32 + 1);
            }
            let oracle = integral / PI.powi(3);
            assert_relative_eq!(
                tau_c_analytic(&AnalyticCase::Number(n)).unwrap(),
                oracle,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn tau_c_two_squeezed_peaks_at_equal_squeezing() {
        let mu = 1.3;
        let best = (0..=200)
            .map(|i| 0.1 * 100f64.powf(i as f64 / 200.0))
            .map(|q| {
                (
                    q,
                    tau_c_analytic(&AnalyticCase::TwoSqueezed(q * mu, mu)).unwrap(),
                )
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!((best.0 - 1.0).abs() < 0.03, "peak at ratio {}", best.0);
    }

    #[test]
    fn tau_c_number_decreasing() {
        let v: Vec<f64> = (0..=5)
            .map(|n| tau_c_analytic(&AnalyticCase::Number(n)).unwrap())
            .collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]), "{v:?}");
    }

    #[test]
    fn wigner_values() {
        assert_relative_eq!(
            wigner_analytic(&AnalyticCase::Squeezed(1.0), c(0.0, 0.0)).unwrap(),
            2.0 / PI
        );
        assert_relative_eq!(
            wigner_analytic(&AnalyticCase::Number(1), c(0.0, 0.0)).unwrap(),
            -2.0 / PI
        );
        assert!(wigner_analytic(&AnalyticCase::TwoSqueezed(1.0, 2.0), c(0.0, 0.0)).is_err());
        assert!(gamma_analytic(&AnalyticCase::Squeezed(-1.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn wigner_normalization_by_quadrature() {
        let h = 0.05;
        for case in [AnalyticCase::Squeezed(0.6), AnalyticCase::Number(3)] {
            let mut s = 0.0;
            for i in -160..=160 {
                for j in -160..=160 {
                    s += wigner_analytic(&case, c(i as f64 * h, j as f64 * h)).unwrap();
                }
            }
            assert!((s * h * h - 1.0).abs() < 1e-9, "{case:?}: {}", s * h * h);
        }
    }
}
