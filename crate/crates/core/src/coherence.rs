//! Mutual coherence function, outcome statistics and the functionals built on them.
//!
//! For a pure probe `ψ` and tick `Π₀ = |φ⟩⟨φ|/π`:
//!
//! ```text
//! p(μ) = π⁻¹ |⟨ψ|D(μ)|φ⟩|²
//! Γ(τ) = π⁻¹ ∫d²α W*_{|ψ⟩⟨φ|}(α) W_{|ψ⟩⟨φ|}(α+τ) = π⁻² C*_ψ(τ) C_φ(τ)
//! p(μ) = ∫d²τ e^{τμ* − τ*μ} Γ(τ)
//! ```
//!
//! Every identity above is computed along separate routes so the gaps between
//! them can be reported.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{covariance_matrix, cross_covariance_matrix, FockVector, MixedState};
use crate::phase_space::{
    autocorrelate, characteristic_field, row_sums, symplectic_ft_with, wigner_cross, Direction,
    Engine, FieldKind, Grid2D, GridField, ALIASING_TOLERANCE,
};

/// Allowed drift of `∫p` away from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-5;

/// How `Γ` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaRoute {
    Characteristic,
    Wigner,
}

fn require_normalized(v: &FockVector, what: &str) -> Result<()> {
    if !v.is_normalized() {
        return Err(Error::input(format!(
            "{what} has norm {}, expected 1",
            v.norm()
        )));
    }
    Ok(())
}

fn require_kind(field: &GridField, kind: FieldKind) -> Result<()> {
    if field.kind() != kind {
        return Err(Error::input(format!(
            "expected a {kind:?} field, got {:?}",
            field.kind()
        )));
    }
    Ok(())
}

/// `Γ` as the autocorrelation of the probe–tick cross-Wigner function.
pub fn gamma_wigner_route(psi: &FockVector, phi: &FockVector, grid: &Grid2D) -> Result<GridField> {
    require_normalized(psi, "probe")?;
    require_normalized(phi, "tick state")?;
    let w = wigner_cross(psi, phi, grid)?;
    autocorrelate(&w, 1.0 / PI)
}

/// `Γ(τ) = π⁻² C*_ψ(τ) C_φ(τ)`.
pub fn gamma_char_route(psi: &FockVector, phi: &FockVector, grid: &Grid2D) -> Result<GridField> {
    require_normalized(psi, "probe")?;
    require_normalized(phi, "tick state")?;
    let cpsi = characteristic_field(psi, psi, grid)?;
    let cphi = if psi == phi {
        cpsi.clone()
    } else {
        characteristic_field(phi, phi, grid)?
    };
    let values = cpsi
        .values()
        .iter()
        .zip(cphi.values())
        .map(|(a, b)| a.conj() * b / (PI * PI))
        .collect();
    GridField::new(*grid, FieldKind::Gamma, values)
}

pub fn gamma_route(
    route: GammaRoute,
    psi: &FockVector,
    phi: &FockVector,
    grid: &Grid2D,
) -> Result<GridField> {
    match route {
        GammaRoute::Characteristic => gamma_char_route(psi, phi, grid),
        GammaRoute::Wigner => gamma_wigner_route(psi, phi, grid),
    }
}

/// `Γ = Σ_{j,k} p_j p'_k Γ_{j,k}` over the components of probe and tick.
pub fn gamma_mixed(rho: &MixedState, tick: &MixedState, grid: &Grid2D) -> Result<GridField> {
    gamma_mixed_with(rho, tick, grid, GammaRoute::Characteristic)
}

pub fn gamma_mixed_with(
    rho: &MixedState,
    tick: &MixedState,
    grid: &Grid2D,
    route: GammaRoute,
) -> Result<GridField> {
    mix_pairs(rho, tick, grid, FieldKind::Gamma, |psi, phi| {
        gamma_route(route, psi, phi, grid)
    })
}

fn mix_pairs(
    rho: &MixedState,
    tick: &MixedState,
    grid: &Grid2D,
    kind: FieldKind,
    f: impl Fn(&FockVector, &FockVector) -> Result<GridField>,
) -> Result<GridField> {
    let m = grid.points();
    let mut acc = GridField::new(*grid, kind, vec![Complex64::new(0.0, 0.0); m * m])?;
    for (pj, psi) in rho.components() {
        for (pk, phi) in tick.components() {
            let term = f(psi, phi)?;
            acc.add_scaled(&term, pj * pk)?;
        }
    }
    Ok(acc)
}

/// `p(μ) = π⁻¹ |⟨ψ|D(μ)|φ⟩|²`, checked to integrate to one.
pub fn prob_direct(psi: &FockVector, phi: &FockVector, grid: &Grid2D) -> Result<GridField> {
    prob_direct_with(psi, phi, grid, NORMALIZATION_TOLERANCE)
}

pub fn prob_direct_with(
    psi: &FockVector,
    phi: &FockVector,
    grid: &Grid2D,
    norm_tol: f64,
) -> Result<GridField> {
    require_normalized(psi, "probe")?;
    require_normalized(phi, "tick state")?;
    let amp = crate::phase_space::characteristic_field(psi, phi, grid)?;
    let values = amp
        .values()
        .iter()
        .map(|a| Complex64::new(a.norm_sqr() / PI, 0.0))
        .collect();
    let p = GridField::new(*grid, FieldKind::Probability, values)?;
    check_normalization(&p, norm_tol)?;
    Ok(p)
}

/// Statistics of a mixed probe against a mixed tick.
pub fn prob_mixed(rho: &MixedState, tick: &MixedState, grid: &Grid2D) -> Result<GridField> {
    let p = mix_pairs(rho, tick, grid, FieldKind::Probability, |psi, phi| {
        prob_direct_with(psi, phi, grid, f64::INFINITY)
    })?;
    check_normalization(&p, NORMALIZATION_TOLERANCE)?;
    Ok(p)
}

fn check_normalization(p: &GridField, tol: f64) -> Result<()> {
    let total = p.integral().re;
    if (total - 1.0).abs() > tol {
        return Err(Error::GridTruncation {
            message: format!(
                "outcome statistics integrate to {total:.8} on a grid of extent {}",
                p.grid().extent()
            ),
            suggested_extent: p.grid().extent() * 1.5,
        });
    }
    Ok(())
}

/// `p(μ) = ∫d²τ e^{τμ* − τ*μ} Γ(τ)`.
pub fn prob_from_gamma(gamma: &GridField) -> Result<GridField> {
    prob_from_gamma_with(gamma, Engine::Fft, ALIASING_TOLERANCE)
}

pub fn prob_from_gamma_with(
    gamma: &GridField,
    engine: Engine,
    alias_tol: f64,
) -> Result<GridField> {
    require_kind(gamma, FieldKind::Gamma)?;
    symplectic_ft_with(gamma, Direction::Forward, engine, alias_tol)
}

/// `τ_c = ∫d²τ |Γ(τ)|²`.
pub fn coherence_time(gamma: &GridField) -> Result<f64> {
    require_kind(gamma, FieldKind::Gamma)?;
    let s: Complex64 = row_sums(gamma.values(), gamma.grid().points(), |v| {
        Complex64::new(v.norm_sqr(), 0.0)
    })
    .into_iter()
    .sum();
    Ok(s.re * gamma.grid().cell_area())
}

/// `Δβ = 1 / ∫d²μ p²(μ)`.
pub fn resolution(p: &GridField) -> Result<f64> {
    require_kind(p, FieldKind::Probability)?;
    let s: Complex64 = row_sums(p.values(), p.grid().points(), |v| {
        Complex64::new(v.norm_sqr(), 0.0)
    })
    .into_iter()
    .sum();
    Ok(1.0 / (s.re * p.grid().cell_area()))
}

/// `∫d²τ (τ·n)² Γ(τ)`, split into the reported real value and the imaginary residue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionalMoment {
    pub value: f64,
    pub imag_residue: f64,
}

pub fn directional_coherence(gamma: &GridField, n: [f64; 2]) -> Result<DirectionalMoment> {
    require_kind(gamma, FieldKind::Gamma)?;
    let len = n[0].hypot(n[1]);
    if (len - 1.0).abs() > 1e-12 {
        return Err(Error::input(format!(
            "direction must be a unit vector, |n| = {len}"
        )));
    }
    let grid = gamma.grid();
    let m = grid.points();
    let xs = grid.coords();
    let rows: Vec<Complex64> = (0..m)
        .map(|ix| {
            (0..m)
                .map(|iy| {
                    let proj = xs[ix] * n[0] + xs[iy] * n[1];
                    gamma.at(ix, iy) * (proj * proj)
                })
                .sum()
        })
        .collect();
    let total: Complex64 = rows.into_iter().sum::<Complex64>() * grid.cell_area();
    Ok(DirectionalMoment {
        value: total.re,
        imag_residue: total.im,
    })
}

/// `Γ_G(τ) = ∫dτ_y Γ(τ, τ_y)` on the grid's `τ_x` samples.
pub fn marginal_gamma(gamma: &GridField) -> Result<Vec<Complex64>> {
    require_kind(gamma, FieldKind::Gamma)?;
    let h = gamma.grid().spacing();
    Ok(row_sums(gamma.values(), gamma.grid().points(), |v| v)
        .into_iter()
        .map(|s| s * h)
        .collect())
}

/// `(2/π) nᵀ C n`, the directional coherence implied by a covariance matrix.
pub fn covariance_directional(c: &Matrix2<f64>, n: [f64; 2]) -> f64 {
    2.0 / PI * quadratic_form(c, n)
}

fn quadratic_form(c: &Matrix2<f64>, n: [f64; 2]) -> f64 {
    n[0] * n[0] * c[(0, 0)] + 2.0 * n[0] * n[1] * c[(0, 1)] + n[1] * n[1] * c[(1, 1)]
}

/// One direction's entry in a [`CoherenceReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionalEntry {
    pub n: [f64; 2],
    /// Moment integral `∫(τ·n)² Γ`.
    pub moment: f64,
    pub imag_residue: f64,
    /// `(2/π) nᵀCn`, the value the moment integral equals for `ψ = φ`.
    pub covariance_form: Option<f64>,
    /// `2 nᵀCn` without the `1/π`; differs from the moment by `π`.
    pub unscaled_form: Option<f64>,
    /// `unscaled_form / moment`; ≈ π when the moment matches `covariance_form`.
    pub unscaled_over_moment: Option<f64>,
}

/// Scalar functionals and route diagnostics for one probe/tick pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceReport {
    pub cutoff: usize,
    pub grid: Grid2D,
    /// Probe and tick are the same pure state.
    pub probe_equals_tick: bool,
    /// `τ_c` from the characteristic-function route.
    pub tau_c: f64,
    /// `τ_c` from the Wigner-autocorrelation route.
    pub tau_c_wigner: f64,
    /// `Δβ` from the directly computed statistics.
    pub delta_beta: f64,
    /// `τ_c · Δβ`.
    pub product: f64,
    /// `|τ_c Δβ π² − 1|`.
    pub parseval_residual: f64,
    /// `[Re Γ(0), Im Γ(0)]`.
    pub gamma_at_origin: [f64; 2],
    /// `max |Γ_wigner − Γ_char|`.
    pub gamma_route_gap: f64,
    /// `max |p_direct − FT[Γ]|`; `None` when `Γ` is not decayed enough to transform.
    pub theorem_gap: Option<f64>,
    /// `max |p − πΓ|`, only for `ψ = φ`.
    pub proportionality_gap: Option<f64>,
    pub normalization: f64,
    /// Symmetrically ordered covariance matrix (cross form for `ψ ≠ φ`); pure states only.
    pub covariance: Option<[[f64; 2]; 2]>,
    pub directional: Vec<DirectionalEntry>,
}

/// Default directions: the two axes and the diagonal.
pub fn default_directions() -> Vec<[f64; 2]> {
    let d = std::f64::consts::FRAC_1_SQRT_2;
    vec![[1.0, 0.0], [0.0, 1.0], [d, d]]
}

pub fn coherence_report(
    probe: &MixedState,
    tick: &MixedState,
    grid: &Grid2D,
    directions: &[[f64; 2]],
) -> Result<CoherenceReport> {
    let gamma = gamma_mixed_with(probe, tick, grid, GammaRoute::Characteristic)?;
    let gamma_w = gamma_mixed_with(probe, tick, grid, GammaRoute::Wigner)?;
    let p = prob_mixed(probe, tick, grid)?;

    let tau_c = coherence_time(&gamma)?;
    let tau_c_wigner = coherence_time(&gamma_w)?;
    let delta_beta = resolution(&p)?;
    let product = tau_c * delta_beta;

    let theorem_gap = match prob_from_gamma(&gamma) {
        Ok(pf) => Some(pf.max_abs_diff(&p)?),
        Err(Error::Aliasing { .. }) => None,
        Err(e) => return Err(e),
    };
    let same = probe == tick && probe.is_pure();
    let proportionality_gap = if same {
        Some(
            p.max_abs_diff(
                &gamma
                    .scaled(Complex64::new(PI, 0.0))
                    .with_kind(FieldKind::Probability),
            )?,
        )
    } else {
        None
    };

    let covariance = if probe.is_pure() && tick.is_pure() {
        let psi = &probe.components()[0].1;
        let phi = &tick.components()[0].1;
        Some(if same {
            covariance_matrix(psi)?
        } else {
            cross_covariance_matrix(phi, psi)?
        })
    } else {
        None
    };

    let directional = directions
        .iter()
        .map(|&n| {
            let mom = directional_coherence(&gamma, n)?;
            let cov_form = covariance.as_ref().map(|c| covariance_directional(c, n));
            let unscaled = covariance.as_ref().map(|c| 2.0 * quadratic_form(c, n));
            Ok(DirectionalEntry {
                n,
                moment: mom.value,
                imag_residue: mom.imag_residue,
                covariance_form: cov_form,
                unscaled_form: unscaled,
                unscaled_over_moment: unscaled.map(|v| v / mom.value),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CoherenceReport {
        cutoff: probe.cutoff(),
        grid: *grid,
        probe_equals_tick: same,
        tau_c,
        tau_c_wigner,
        delta_beta,
        product,
        parseval_residual: (product * PI * PI - 1.0).abs(),
        gamma_at_origin: {
            let g0 = gamma.at_origin()?;
            [g0.re, g0.im]
        },
        gamma_route_gap: gamma_w.max_abs_diff(&gamma)?,
        theorem_gap,
        proportionality_gap,
        normalization: p.integral().re,
        covariance: covariance.map(|c| [[c[(0, 0)], c[(0, 1)]], [c[(1, 0)], c[(1, 1)]]]),
        directional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{gamma_analytic, tau_c_analytic, AnalyticCase};
    use crate::fock::{number_state, squeezed_vacuum};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn analytic_field(grid: Grid2D, case: AnalyticCase) -> GridField {
        GridField::from_fn(grid, FieldKind::Gamma, |t| {
            c(gamma_analytic(&case, t).unwrap(), 0.0)
        })
    }

    #[test]
    fn wigner_route_matches_closed_forms() {
        let grid = Grid2D::default();
        let vac = FockVector::vacuum(60);
        let g = gamma_wigner_route(&vac, &vac, &grid).unwrap();
        assert!(
            g.max_abs_diff(&analytic_field(grid, AnalyticCase::Squeezed(1.0)))
                .unwrap()
                < 1e-6
        );
        let two = number_state(2, 60).unwrap();
        let g = gamma_wigner_route(&two, &two, &grid).unwrap();
        assert!(
            g.max_abs_diff(&analytic_field(grid, AnalyticCase::Number(2)))
                .unwrap()
                < 1e-6
        );
        let (a, b) = (
            squeezed_vacuum(1.0, 60).unwrap(),
            squeezed_vacuum(4.0, 60).unwrap(),
        );
        let g = gamma_wigner_route(&a, &b, &Grid2D::fft(8.0, 128).unwrap()).unwrap();
        let exact = analytic_field(*g.grid(), AnalyticCase::TwoSqueezed(1.0, 4.0));
        assert!(g.max_abs_diff(&exact).unwrap() < 1e-6);
    }

    #[test]
    fn char_route_basic_properties() {
        let grid = Grid2D::default();
        let vac = FockVector::vacuum(60);
        let g = gamma_char_route(&vac, &vac, &grid).unwrap();
        assert!(
            g.max_abs_diff(&analytic_field(grid, AnalyticCase::Squeezed(1.0)))
                .unwrap()
                < 1e-14
        );
        let s = squeezed_vacuum(0.6, 60).unwrap();
        let g = gamma_char_route(&s, &vac, &grid).unwrap();
        assert!((g.at_origin().unwrap() - 1.0 / (PI * PI)).norm() < 1e-15);
    }

    #[test]
    fn routes_agree_on_number_three() {
        let grid = Grid2D::default();
        let v = number_state(3, 60).unwrap();
        let a = gamma_char_route(&v, &v, &grid).unwrap();
        let b = gamma_wigner_route(&v, &v, &grid).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-6);
    }

    #[test]
    fn routes_agree_for_complex_states() {
        // states without parity symmetry exercise the imaginary parts
        let grid = Grid2D::fft(6.0, 96).unwrap();
        let psi = FockVector::new(vec![c(0.6, 0.0), c(0.0, 0.64), c(0.48, 0.0)])
            .unwrap()
            .normalized()
            .unwrap();
        let phi = FockVector::new(vec![c(0.0, 0.0), c(0.8, 0.0), c(0.0, -0.6)]).unwrap();
        let a = gamma_char_route(&psi, &phi, &grid).unwrap();
        let b = gamma_wigner_route(&psi, &phi, &grid).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-6);
        assert!(a.max_imag() > 1e-3);
        assert!(a.conjugate_symmetry_deviation().unwrap() < 1e-12);
        let p = prob_direct(&psi, &phi, &grid).unwrap();
        let pf = prob_from_gamma(&a).unwrap();
        assert!(p.max_abs_diff(&pf).unwrap() < 1e-5);
    }

    #[test]
    fn mixed_gamma_is_linear() {
        let grid = Grid2D::fft(6.0, 64).unwrap();
        let (v0, v1) = (FockVector::vacuum(30), number_state(1, 30).unwrap());
        let rho = MixedState::new(vec![(0.5, v0.clone()), (0.5, v1.clone())]).unwrap();
        let tick = MixedState::pure(v0.clone()).unwrap();
        let g = gamma_mixed(&rho, &tick, &grid).unwrap();
        assert!((g.at_origin().unwrap() - 1.0 / (PI * PI)).norm() < 1e-15);

        let mut manual = gamma_char_route(&v0, &v0, &grid)
            .unwrap()
            .scaled(c(0.5, 0.0));
        manual
            .add_scaled(&gamma_char_route(&v1, &v0, &grid).unwrap(), 0.5)
            .unwrap();
        assert!(g.max_abs_diff(&manual).unwrap() < 1e-12);

        let single = gamma_mixed(&MixedState::pure(v1.clone()).unwrap(), &tick, &grid).unwrap();
        assert_eq!(single, gamma_char_route(&v1, &v0, &grid).unwrap());

        // p(0) of the mixture from explicit traces: tr[ρ Π₀] = ½ (1/π) + ½ · 0
        let p = prob_mixed(&rho, &tick, &grid).unwrap();
        assert!((p.at_origin().unwrap().re - 0.5 / PI).abs() < 1e-15);
    }

    #[test]
    fn direct_statistics() {
        let grid = Grid2D::default();
        let vac = FockVector::vacuum(60);
        let p = prob_direct(&vac, &vac, &grid).unwrap();
        assert!((p.at_origin().unwrap().re - 1.0 / PI).abs() < 1e-15);
        let q = GridField::from_fn(grid, FieldKind::Probability, |m| {
            c((-m.norm_sqr()).exp() / PI, 0.0)
        });
        assert!(p.max_abs_diff(&q).unwrap() < 1e-14);

        let s = squeezed_vacuum(0.5, 60).unwrap();
        let p = prob_direct(&s, &s, &grid).unwrap();
        let g = analytic_field(grid, AnalyticCase::Squeezed(0.5)).scaled(c(PI, 0.0));
        assert!(
            p.max_abs_diff(&g.with_kind(FieldKind::Probability))
                .unwrap()
                < 1e-10
        );

        let one = number_state(1, 60).unwrap();
        let p = prob_direct(&vac, &one, &grid).unwrap();
        assert_eq!(p.at_origin().unwrap().re, 0.0);
        assert!(p.values().iter().all(|v| v.re >= 0.0));
    }

    #[test]
    fn direct_statistics_detect_small_grid() {
        let s = squeezed_vacuum(4.0, 60).unwrap();
        let grid = Grid2D::fft(3.0, 64).unwrap();
        assert!(matches!(
            prob_direct(&s, &s, &grid),
            Err(Error::GridTruncation { .. })
        ));
    }

    #[test]
    fn statistics_from_gamma() {
        let grid = Grid2D::default();
        let vac = FockVector::vacuum(60);
        let g = gamma_char_route(&vac, &vac, &grid).unwrap();
        let p = prob_from_gamma(&g).unwrap();
        let q = GridField::from_fn(grid, FieldKind::Probability, |m| {
            c((-m.norm_sqr()).exp() / PI, 0.0)
        });
        assert!(p.max_abs_diff(&q).unwrap() < 1e-12);

        let two = number_state(2, 60).unwrap();
        let g = gamma_char_route(&two, &two, &grid).unwrap();
        let p = prob_from_gamma(&g).unwrap();
        assert!(
            p.max_abs_diff(&prob_direct(&two, &two, &grid).unwrap())
                .unwrap()
                < 1e-5
        );
        assert!(p.max_imag() < 1e-9);

        let w = wigner_cross(&vac, &vac, &grid).unwrap();
        assert!(prob_from_gamma(&w).is_err());
    }

    #[test]
    fn coherence_time_values() {
        let grid = Grid2D::default();
        let target = 1.0 / (2.0 * PI.powi(3));
        for lambda in [1.0, 0.25] {
            let s = squeezed_vacuum(lambda, 60).unwrap();
            let t = coherence_time(&gamma_char_route(&s, &s, &grid).unwrap()).unwrap();
            assert!((t / target - 1.0).abs() < 1e-5, "lambda={lambda}: {t}");
        }
        let one = number_state(1, 60).unwrap();
        let t = coherence_time(&gamma_char_route(&one, &one, &grid).unwrap()).unwrap();
        let oracle = tau_c_analytic(&AnalyticCase::Number(1)).unwrap();
        assert!((t / oracle - 1.0).abs() < 1e-4);
    }

    #[test]
    fn resolution_and_parseval() {
        let grid = Grid2D::default();
        let vac = FockVector::vacuum(60);
        let p = prob_direct(&vac, &vac, &grid).unwrap();
        let db = resolution(&p).unwrap();
        assert!((db / (2.0 * PI) - 1.0).abs() < 1e-4);
        for psi in [
            vac,
            squeezed_vacuum(3.0, 60).unwrap(),
            number_state(2, 60).unwrap(),
        ] {
            let g = gamma_char_route(&psi, &psi, &grid).unwrap();
            let p = prob_direct(&psi, &psi, &grid).unwrap();
            let prod = coherence_time(&g).unwrap() * resolution(&p).unwrap();
            assert!((prod * PI * PI - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn resolution_tracks_coherence_for_two_squeezed() {
        let grid = Grid2D::fft(8.0, 128).unwrap();
        let mu = 1.0;
        let mut rows = Vec::new();
        for lambda in [1.0, 2.0, 4.0] {
            let (a, b) = (
                squeezed_vacuum(lambda, 60).unwrap(),
                squeezed_vacuum(mu, 60).unwrap(),
            );
            let tau_c = coherence_time(&gamma_char_route(&a, &b, &grid).unwrap()).unwrap();
            let db = resolution(&prob_direct(&a, &b, &grid).unwrap()).unwrap();
            rows.push((tau_c, db));
        }
        for w in rows.windows(2) {
            assert!(w[1].0 < w[0].0 && w[1].1 > w[0].1, "{rows:?}");
        }
    }

    #[test]
    fn directional_values() {
        let grid = Grid2D::default();
        let vac = FockVector::vacuum(60);
        let g = gamma_char_route(&vac, &vac, &grid).unwrap();
        for n in default_directions() {
            let m = directional_coherence(&g, n).unwrap();
            assert!((m.value - 1.0 / (2.0 * PI)).abs() < 1e-5);
        }
        for k in 1..=3 {
            let v = number_state(k, 60).unwrap();
            let g = gamma_char_route(&v, &v, &grid).unwrap();
            let cov = covariance_matrix(&v).unwrap();
            for n in default_directions() {
                let m = directional_coherence(&g, n).unwrap().value;
                assert!((m / covariance_directional(&cov, n) - 1.0).abs() < 1e-4);
            }
        }
        let wide = Grid2D::fft(10.0, 160).unwrap();
        let s = squeezed_vacuum(2.0, 60).unwrap();
        let s4 = squeezed_vacuum(4.0, 60).unwrap();
        let m2 = directional_coherence(&gamma_char_route(&s, &s, &wide).unwrap(), [1.0, 0.0])
            .unwrap()
            .value;
        let m4 = directional_coherence(&gamma_char_route(&s4, &s4, &wide).unwrap(), [1.0, 0.0])
            .unwrap()
            .value;
        assert!((m4 / m2 - 2.0).abs() < 1e-6);
        assert!(directional_coherence(&g, [1.0, 1.0]).is_err());
    }

    #[test]
    fn marginal_of_vacuum_gamma() {
        let grid = Grid2D::default();
        let vac = FockVector::vacuum(60);
        let g = gamma_char_route(&vac, &vac, &grid).unwrap();
        let marg = marginal_gamma(&g).unwrap();
        assert_eq!(marg.len(), 128);
        for (x, v) in grid.coords().iter().zip(&marg) {
            assert!((v - (-x * x).exp() / PI.powf(1.5)).norm() < 1e-6);
        }
        let c0 = grid.origin_index().unwrap();
        for k in 1..64 {
            assert!((marg[c0 + k].conj() - marg[c0 - k]).norm() < 1e-15);
        }
        let h = grid.spacing();
        let total: Complex64 = marg.iter().sum::<Complex64>() * h;
        assert!((total - g.integral()).norm() < 1e-14);
    }

    #[test]
    fn report_for_vacuum() {
        let vac = MixedState::pure(FockVector::vacuum(60)).unwrap();
        let r = coherence_report(&vac, &vac, &Grid2D::default(), &default_directions()).unwrap();
        assert!(r.parseval_residual < 1e-4);
        assert!(r.gamma_route_gap < 1e-6);
        assert!(r.theorem_gap.unwrap() < 1e-5);
        assert!(r.proportionality_gap.unwrap() < 1e-6);
        for d in &r.directional {
            assert!((d.unscaled_over_moment.unwrap() - PI).abs() < 1e-4);
        }
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("tau_c"));
    }
}
