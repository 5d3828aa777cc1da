//! The displacement ruler `Π(α) = D(α) Π₀ D†(α)` and its verification.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{
    displace_state, displaced_bilinear, visit_displacement, FockOperator, FockVector, MixedState,
};
use crate::phase_space::Grid2D;
use crate::quad::gauss_legendre;

/// Tolerance on `tr Π₀ = 1/π`.
pub const TRACE_TOLERANCE: f64 = 1e-10;
/// Most negative eigenvalue accepted as rounding.
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;
/// Completeness residual above which a convergence warning is raised.
pub const COMPLETENESS_TOLERANCE: f64 = 1e-3;

/// The reference POVM element `Π₀`, proportional to a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tick {
    operator: FockOperator,
    state: MixedState,
    source: Option<FockVector>,
}

impl Tick {
    /// `Π₀ = |φ⟩⟨φ|/π`.
    pub fn from_state(phi: &FockVector) -> Result<Self> {
        if !phi.is_normalized() {
            return Err(Error::input(format!(
                "tick state has norm {}, expected 1",
                phi.norm()
            )));
        }
        let tick = Tick {
            operator: FockOperator::projector(phi, 1.0 / PI),
            state: MixedState::pure(phi.clone())?,
            source: Some(phi.clone()),
        };
        tick.validate()?;
        Ok(tick)
    }

    /// `Π₀ = ρ/π`.
    pub fn from_mixed(state: &MixedState) -> Result<Self> {
        if state.is_pure() {
            return Self::from_state(&state.components()[0].1);
        }
        let operator = FockOperator::hermitian(state.density().matrix() / Complex64::new(PI, 0.0))?;
        let tick = Tick {
            operator,
            state: state.clone(),
            source: None,
        };
        tick.validate()?;
        Ok(tick)
    }

    /// Accepts any Hermitian, positive operator with trace `1/π`.
    pub fn from_operator(op: FockOperator) -> Result<Self> {
        let tick = Tick {
            state: MixedState::from_operator(&op, PI)?,
            operator: op,
            source: None,
        };
        tick.validate()?;
        Ok(tick)
    }

    fn validate(&self) -> Result<()> {
        let op = &self.operator;
        if !op.is_hermitian() {
            return Err(Error::input(format!(
                "tick is not Hermitian (deviation {:.3e})",
                op.hermitian_deviation()
            )));
        }
        let tr = op.trace();
        if (tr.re - 1.0 / PI).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::input(format!("tick trace {tr} differs from 1/pi")));
        }
        let min = op.min_eigenvalue();
        if min < -POSITIVITY_TOLERANCE {
            return Err(Error::input(format!(
                "tick has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    pub fn operator(&self) -> &FockOperator {
        &self.operator
    }

    pub fn source(&self) -> Option<&FockVector> {
        self.source.as_ref()
    }

    /// `π Π₀` as a weighted mixture of pure states.
    pub fn state(&self) -> &MixedState {
        &self.state
    }

    pub fn cutoff(&self) -> usize {
        self.operator.cutoff()
    }

    pub fn trace(&self) -> f64 {
        self.operator.trace().re
    }
}

/// `Π(α) = D(α) Π₀ D†(α)`, built from the displaced eigenvectors of `Π₀`.
pub fn povm_element(tick: &Tick, alpha: Complex64) -> Result<FockOperator> {
    if alpha == Complex64::new(0.0, 0.0) {
        return Ok(tick.operator.clone());
    }
    let dim = tick.cutoff() + 1;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (w, phi) in tick.state.components() {
        let d = displace_state(phi, alpha)?;
        let a = d.amplitudes();
        m += (a * a.adjoint()) * Complex64::new(w / PI, 0.0);
    }
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let op = FockOperator::hermitian(m)?;
    let loss = (op.trace().re - tick.trace()).abs();
    if loss > 1e-8 {
        return Err(Error::truncation(
            format!("Pi({alpha}) loses {loss:.3e} of its trace"),
            crate::fock::suggested_cutoff(alpha, tick.cutoff(), 8),
        ));
    }
    Ok(op)
}

fn trace_product(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    a.iter().zip(b.transpose().iter()).map(|(x, y)| x * y).sum()
}

/// `p(α|β) = tr[ρ(β) Π(α)]` with `ρ(β) = D(β) ρ₀ D†(β)`, by explicit traces.
pub fn conditional_prob(
    rho0: &MixedState,
    tick: &Tick,
    alpha: Complex64,
    beta: Complex64,
) -> Result<f64> {
    if rho0.cutoff() != tick.cutoff() {
        return Err(Error::GridMismatch(format!(
            "probe cutoff {} differs from tick cutoff {}",
            rho0.cutoff(),
            tick.cutoff()
        )));
    }
    let dim = rho0.cutoff() + 1;
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for (p, psi) in rho0.components() {
        let d = displace_state(psi, beta)?;
        let a = d.amplitudes();
        rho += (a * a.adjoint()) * Complex64::new(*p, 0.0);
    }
    let pi_alpha = povm_element(tick, alpha)?;
    Ok(trace_product(&rho, pi_alpha.matrix()).re)
}

/// `max |p(α|β) − p(α−β|0)|` over the grid points `α` and the given signals `β`.
pub fn shift_invariance_check(
    rho0: &FockVector,
    tick: &Tick,
    betas: &[Complex64],
    grid: &Grid2D,
) -> Result<f64> {
    if !rho0.is_normalized() {
        return Err(Error::input("probe must be normalized"));
    }
    let comps: Vec<(f64, Vec<Complex64>)> = tick
        .state
        .components()
        .iter()
        .map(|(w, phi)| (*w, phi.head(phi.support_len()).iter().copied().collect()))
        .collect();
    let psi: Vec<Complex64> = rho0.head(rho0.support_len()).iter().copied().collect();
    let m = grid.points();
    let mut worst = 0.0f64;
    for &beta in betas {
        if beta == Complex64::new(0.0, 0.0) {
            continue;
        }
        let shifted = displace_state(rho0, beta)?;
        let shifted: Vec<Complex64> = shifted
            .head(shifted.support_len())
            .iter()
            .copied()
            .collect();
        let prob = |alpha: Complex64, ket: &[Complex64]| -> f64 {
            comps
                .iter()
                .map(|(w, phi)| w / PI * displaced_bilinear(phi, -alpha, ket).norm_sqr())
                .sum()
        };
        let dev = (0..m)
            .into_par_iter()
            .map(|ix| {
                (0..m)
                    .map(|iy| {
                        let alpha = grid.point(ix, iy);
                        (prob(alpha, &shifted) - prob(alpha - beta, &psi)).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// Outcome of [`completeness_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub radius: f64,
    pub subspace: usize,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    /// `max_{m,n<d} |M_mn − δ_mn|`.
    pub max_deviation: f64,
    /// `tr M / d`.
    pub trace_ratio: f64,
    pub warning: Option<String>,
}

/// `M = ∫_{|α|<R} d²α Π(α)` on the first `d` Fock levels, by polar quadrature.
pub fn completeness_check(
    tick: &Tick,
    radius: f64,
    resolution: usize,
    subspace: usize,
) -> Result<CompletenessReport> {
    if !(radius > 0.0) || resolution < 2 || subspace == 0 {
        return Err(Error::input(
            "completeness check needs radius > 0, resolution >= 2, subspace >= 1",
        ));
    }
    let d = subspace;
    let comps: Vec<(f64, Vec<Complex64>)> = tick
        .state
        .components()
        .iter()
        .map(|(w, phi)| (*w, phi.head(phi.support_len()).iter().copied().collect()))
        .collect();
    let support = comps.iter().map(|c| c.1.len()).max().unwrap_or(1);
    // the integrand is a trigonometric polynomial of degree < 2(d + support) in the angle
    let angular = (2 * resolution).max(2 * (d + support) + 2);
    let radial = gauss_legendre(resolution, 0.0, radius);
    let dtheta = 2.0 * PI / angular as f64;

    let contributions: Vec<DMatrix<Complex64>> = radial
        .par_iter()
        .map(|&(r, w)| {
            let mut acc = DMatrix::<Complex64>::zeros(d, d);
            for k in 0..angular {
                let alpha = Complex64::from_polar(r, k as f64 * dtheta);
                for (p, phi) in &comps {
                    let mut col = vec![Complex64::new(0.0, 0.0); d];
                    visit_displacement(alpha, d, phi.len(), |i, j, v| col[i] += v * phi[j]);
                    let s = p / PI * w * r * dtheta;
                    for i in 0..d {
                        for j in 0..d {
                            acc[(i, j)] += col[i] * col[j].conj() * s;
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let total = pairwise_sum(&contributions, d);

    let mut max_deviation = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { 1.0 } else { 0.0 };
            max_deviation = max_deviation.max((total[(i, j)] - target).norm());
        }
    }
    let trace_ratio = total.trace().re / d as f64;
    let warning = (max_deviation > COMPLETENESS_TOLERANCE).then(|| {
        format!(
            "completeness residual {max_deviation:.3e} at R = {radius}, resolution {resolution}; increase R or the resolution"
        )
    });
    Ok(CompletenessReport {
        radius,
        subspace: d,
        radial_nodes: resolution,
        angular_nodes: angular,
        max_deviation,
        trace_ratio,
        warning,
    })
}

fn pairwise_sum(parts: &[DMatrix<Complex64>], d: usize) -> DMatrix<Complex64> {
    match parts.len() {
        0 => DMatrix::zeros(d, d),
        1 => parts[0].clone(),
        n => pairwise_sum(&parts[..n / 2], d) + pairwise_sum(&parts[n / 2..], d),
    }
}
