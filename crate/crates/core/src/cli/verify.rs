//! Verification suites: named checks with measured value, bound and verdict.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::config::{ScenarioConfig, Suite, Tolerances};
use super::output::{figure1_data, figure2_data};
use crate::coherence::{
    coherence_time, covariance_directional, directional_coherence, gamma_char_route,
    gamma_wigner_route, marginal_gamma, prob_direct, prob_direct_with, prob_from_gamma, resolution,
};
use crate::error::Result;
use crate::fock::{covariance_matrix, number_state, squeezed_vacuum, FockVector, MixedState};
use crate::phase_space::{overlap, wigner_cross, Grid2D};
use crate::ruler::{
    completeness_check, conditional_prob, povm_element, shift_invariance_check, Tick,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value ≤ bound`; NaN fails.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            passed: value <= bound,
        }
    }

    /// Passes when `value < bound`.
    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            passed: value < bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

pub fn run_suite(suite: Suite, cfg: &ScenarioConfig) -> Result<VerifyReport> {
    let grid = cfg.grid()?;
    let ctx = Ctx {
        grid,
        cutoff: cfg.cutoff,
        tol: cfg.tolerance,
    };
    let checks = match suite {
        Suite::Povm => povm(&ctx)?,
        Suite::Theorem => theorem(&ctx)?,
        Suite::Metrics => metrics(&ctx)?,
        Suite::Examples => examples(&ctx)?,
        Suite::All => {
            let mut all = povm(&ctx)?;
            all.extend(theorem(&ctx)?);
            all.extend(metrics(&ctx)?);
            all.extend(examples(&ctx)?);
            all
        }
    };
    Ok(VerifyReport {
        suite,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

struct Ctx {
    grid: Grid2D,
    cutoff: usize,
    tol: Tolerances,
}

impl Ctx {
    fn vac(&self) -> FockVector {
        FockVector::vacuum(self.cutoff)
    }

    fn number(&self, n: usize) -> Result<FockVector> {
        number_state(n, self.cutoff)
    }

    fn squeezed(&self, l: f64) -> Result<FockVector> {
        squeezed_vacuum(l, self.cutoff)
    }

    /// Same spacing as the working grid, extent at least `extent`.
    fn widened(&self, extent: f64) -> Result<Grid2D> {
        let h = self.grid.spacing();
        let e = extent.max(self.grid.extent());
        let points = ((2.0 * e / h).ceil() as usize + 1) & !1;
        Grid2D::fft(points as f64 * h / 2.0, points)
    }

    /// The probe/tick pairs of the theorem suite.
    fn case_matrix(&self) -> Result<Vec<(&'static str, FockVector, FockVector)>> {
        Ok(vec![
            ("vac_vac", self.vac(), self.vac()),
            ("sq0.5_sq2", self.squeezed(0.5)?, self.squeezed(2.0)?),
            ("n2_n2", self.number(2)?, self.number(2)?),
            ("n0_n2", self.vac(), self.number(2)?),
        ])
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn povm(ctx: &Ctx) -> Result<Vec<Check>> {
    let t = &ctx.tol;
    let mut out = Vec::new();
    let vac_tick = Tick::from_state(&ctx.vac())?;
    let mixed = MixedState::new(vec![(0.5, ctx.vac()), (0.5, ctx.number(1)?)])?;
    let mixed_tick = Tick::from_mixed(&mixed)?;
    let n2_tick = Tick::from_state(&ctx.number(2)?)?;

    out.push(Check::at_most(
        "tick_trace_pure",
        (vac_tick.trace() - 1.0 / PI).abs(),
        t.trace,
    ));
    out.push(Check::at_most(
        "tick_trace_mixed",
        (mixed_tick.trace() - 1.0 / PI).abs(),
        t.trace,
    ));
    for (name, tick) in [("pure", &vac_tick), ("mixed", &mixed_tick)] {
        let rep = completeness_check(tick, 6.0, 48, 5)?;
        out.push(Check::at_most(
            format!("completeness_{name}_r6_d5"),
            rep.max_deviation,
            t.completeness,
        ));
        out.push(Check::at_most(
            format!("completeness_trace_{name}"),
            (rep.trace_ratio - 1.0).abs(),
            t.completeness,
        ));
    }
    let residuals: Vec<f64> = [3.0, 4.5, 6.0]
        .iter()
        .map(|&r| completeness_check(&vac_tick, r, 48, 5).map(|c| c.max_deviation))
        .collect::<Result<_>>()?;
    out.push(Check::below(
        "completeness_decreasing_in_radius",
        (residuals[2] / residuals[1]).max(residuals[1] / residuals[0]),
        1.0,
    ));

    let alpha = Complex64::new(1.0, 1.0);
    let p = povm_element(&mixed_tick, alpha)?;
    out.push(Check::at_most(
        "povm_trace_displaced",
        (p.trace().re - 1.0 / PI).abs(),
        t.povm_trace,
    ));
    out.push(Check::at_most(
        "povm_positivity",
        (-p.min_eigenvalue()).max(0.0),
        t.positivity,
    ));

    let betas = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(1.0, 1.0),
    ];
    out.push(Check::at_most(
        "shift_invariance_vacuum",
        shift_invariance_check(&ctx.vac(), &vac_tick, &betas, &ctx.grid)?,
        t.shift,
    ));
    out.push(Check::at_most(
        "shift_invariance_n2",
        shift_invariance_check(
            &ctx.number(2)?,
            &n2_tick,
            &[Complex64::new(0.5, 0.0)],
            &ctx.grid,
        )?,
        t.shift,
    ));

    // raw traces against the statistics formula
    let psi = ctx.number(2)?;
    let phi = ctx.squeezed(2.0)?;
    let tick = Tick::from_state(&phi)?;
    let rho = MixedState::pure(psi.clone())?;
    let p = prob_direct_with(&psi, &phi, &ctx.grid, f64::INFINITY)?;
    let m = ctx.grid.points();
    let beta = Complex64::new(0.4, -0.3);
    let mut worst = 0.0f64;
    for (ix, iy) in [
        (m / 2, m / 2),
        (m / 2 + 5, m / 2 - 7),
        (m / 2 - 11, m / 2 + 3),
        (m / 2 + 9, m / 2 + 9),
    ] {
        let mu = ctx.grid.point(ix, iy);
        let raw = conditional_prob(&rho, &tick, mu + beta, beta)?;
        worst = worst.max((raw - p.at(ix, iy).re).abs());
    }
    out.push(Check::at_most(
        "conditional_vs_direct",
        worst,
        t.conditional,
    ));
    Ok(out)
}

fn theorem(ctx: &Ctx) -> Result<Vec<Check>> {
    let t = &ctx.tol;
    let mut out = Vec::new();
    for (name, psi, phi) in ctx.case_matrix()? {
        let g = gamma_char_route(&psi, &phi, &ctx.grid)?;
        let gw = gamma_wigner_route(&psi, &phi, &ctx.grid)?;
        let p = prob_direct(&psi, &phi, &ctx.grid)?;
        let pf = prob_from_gamma(&g)?;
        out.push(Check::at_most(
            format!("theorem_{name}"),
            pf.max_abs_diff(&p)?,
            t.theorem,
        ));
        out.push(Check::at_most(
            format!("routes_{name}"),
            gw.max_abs_diff(&g)?,
            t.routes,
        ));
        if psi == phi {
            let scaled = g.scaled(Complex64::new(PI, 0.0)).with_kind(p.kind());
            out.push(Check::at_most(
                format!("proportionality_{name}"),
                p.max_abs_diff(&scaled)?,
                t.proportionality,
            ));
        }
    }
    Ok(out)
}

fn metrics(ctx: &Ctx) -> Result<Vec<Check>> {
    let t = &ctx.tol;
    let mut out = Vec::new();
    let pi3 = PI.powi(3);

    let mut pure_cases = vec![("vac", ctx.vac()), ("n2", ctx.number(2)?)];
    for l in [0.5, 2.0] {
        pure_cases.push((if l < 1.0 { "sq0.5" } else { "sq2" }, ctx.squeezed(l)?));
    }
    for (name, psi) in &pure_cases {
        let g = gamma_char_route(psi, psi, &ctx.grid)?;
        let p = prob_direct(psi, psi, &ctx.grid)?;
        let prod = coherence_time(&g)? * resolution(&p)?;
        out.push(Check::at_most(
            format!("parseval_{name}"),
            (prod * PI * PI - 1.0).abs(),
            t.parseval,
        ));
    }

    let wide = ctx.widened(10.0)?;
    for l in [0.25, 1.0, 4.0] {
        let s = ctx.squeezed(l)?;
        let tc = coherence_time(&gamma_char_route(&s, &s, &wide)?)?;
        out.push(Check::at_most(
            format!("tau_c_squeezed_{l}"),
            rel(tc, 0.5 / pi3),
            t.tau_c,
        ));
    }
    let (a, b) = (ctx.squeezed(1.0)?, ctx.squeezed(4.0)?);
    let tc = coherence_time(&gamma_char_route(&a, &b, &wide)?)?;
    out.push(Check::at_most(
        "tau_c_two_squeezed_1_4",
        rel(tc, 0.4 / pi3),
        t.tau_c,
    ));
    let one = ctx.number(1)?;
    let tc = coherence_time(&gamma_char_route(&one, &one, &ctx.grid)?)?;
    out.push(Check::at_most(
        "tau_c_n1",
        rel(tc, 0.25 / pi3),
        t.tau_c_number,
    ));

    let ex = [1.0, 0.0];
    let ey = [0.0, 1.0];
    let diag = [std::f64::consts::FRAC_1_SQRT_2; 2];
    let mut dir_cases = vec![("vac", ctx.vac(), vec![ex, ey, diag], ctx.grid)];
    dir_cases.push(("sq4", ctx.squeezed(4.0)?, vec![ex, ey], wide));
    for n in 1..=3 {
        let name = ["n1", "n2", "n3"][n - 1];
        dir_cases.push((name, ctx.number(n)?, vec![ex, ey, diag], ctx.widened(8.0)?));
    }
    for (name, psi, dirs, grid) in dir_cases {
        let g = gamma_char_route(&psi, &psi, &grid)?;
        let cov = covariance_matrix(&psi)?;
        for n in dirs {
            let moment = directional_coherence(&g, n)?.value;
            let label = if n == ex {
                "x"
            } else if n == ey {
                "y"
            } else {
                "diag"
            };
            out.push(Check::at_most(
                format!("directional_{name}_{label}"),
                rel(moment, covariance_directional(&cov, n)),
                t.directional,
            ));
        }
    }

    let rows = figure2_data(5, ctx.cutoff)?;
    let worst_ratio = rows
        .windows(2)
        .map(|w| w[1].tau_c_numeric / w[0].tau_c_numeric)
        .fold(0.0, f64::max);
    out.push(Check::below("tau_c_decreasing_n0_to_n5", worst_ratio, 1.0));
    out.push(Check::at_most(
        "figure2_n0",
        rel(rows[0].tau_c_numeric, 0.5 / pi3),
        t.tau_c,
    ));
    out.push(Check::at_most(
        "figure2_n1",
        rel(rows[1].tau_c_numeric, 0.25 / pi3),
        t.tau_c_number,
    ));
    let oracle_gap = rows
        .iter()
        .map(|r| rel(r.tau_c_numeric, r.tau_c_oracle))
        .fold(0.0, f64::max);
    out.push(Check::at_most(
        "figure2_vs_oracle",
        oracle_gap,
        t.tau_c_number,
    ));
    Ok(out)
}

fn examples(ctx: &Ctx) -> Result<Vec<Check>> {
    let t = &ctx.tol;
    let mut out = Vec::new();
    let vac = ctx.vac();
    let n2 = ctx.number(2)?;
    let sq = ctx.squeezed(0.5)?;

    for (name, psi, phi) in [("vac", &vac, &vac), ("n2", &n2, &n2), ("n0_n2", &vac, &n2)] {
        let p = prob_direct_with(psi, phi, &ctx.grid, f64::INFINITY)?;
        out.push(Check::at_most(
            format!("normalization_{name}"),
            (p.integral().re - 1.0).abs(),
            t.normalization,
        ));
    }

    let cplx = FockVector::new(vec![
        Complex64::new(0.6, 0.0),
        Complex64::new(0.0, 0.64),
        Complex64::new(0.48, 0.0),
    ])?
    .normalized()?
    .with_cutoff(ctx.cutoff);
    for (name, psi, phi) in [
        ("n0_n2", &vac, &n2),
        ("sq0.5_n2", &sq, &n2),
        ("complex_n2", &cplx, &n2),
    ] {
        let g = gamma_char_route(psi, phi, &ctx.grid)?;
        let g0 = g.at_origin()?;
        out.push(Check::at_most(
            format!("gamma_origin_{name}"),
            (g0 - 1.0 / (PI * PI)).norm(),
            t.origin,
        ));
        let gw = gamma_wigner_route(psi, phi, &ctx.grid)?;
        out.push(Check::at_most(
            format!("conjugate_symmetry_{name}"),
            gw.conjugate_symmetry_deviation()?,
            t.symmetry,
        ));
    }

    for (name, psi) in [("n2", &n2), ("sq0.5", &sq), ("complex", &cplx)] {
        let w = wigner_cross(psi, psi, &ctx.grid)?;
        out.push(Check::at_most(
            format!("wigner_reality_{name}"),
            w.max_imag(),
            t.reality,
        ));
    }

    // π∫W_ψ W_φ = |⟨ψ|φ⟩|²
    for (name, psi, phi) in [
        ("sq0.5_vac", &sq, &vac),
        ("complex_sq0.5", &cplx, &sq),
        ("n2_n2", &n2, &n2),
    ] {
        let wa = wigner_cross(psi, psi, &ctx.grid)?;
        let wb = wigner_cross(phi, phi, &ctx.grid)?;
        let ov = overlap(&wa, &wb)?;
        let exact = psi.inner(phi).norm_sqr();
        out.push(Check::at_most(
            format!("overlap_vs_trace_{name}"),
            (ov - exact).norm(),
            t.overlap,
        ));
    }

    let vac_tick = Tick::from_state(&vac)?;
    out.push(Check::at_most(
        "shift_invariance_vacuum",
        shift_invariance_check(&vac, &vac_tick, &[Complex64::new(1.0, 1.0)], &ctx.grid)?,
        t.shift,
    ));

    let g = gamma_char_route(&vac, &vac, &ctx.grid)?;
    let marg = marginal_gamma(&g)?;
    let worst = ctx
        .grid
        .coords()
        .iter()
        .zip(&marg)
        .map(|(x, v)| (v - (-x * x).exp() / PI.powf(1.5)).norm())
        .fold(0.0, f64::max);
    out.push(Check::at_most(
        "marginal_gaussian_vacuum",
        worst,
        t.marginal,
    ));

    let fig = figure1_data(&ctx.grid, ctx.cutoff)?;
    out.push(Check::at_most(
        "figure1_vs_closed_form",
        fig.max_error(),
        t.figure,
    ));
    let zeros = fig.n2_zeros();
    out.push(Check::at_most(
        "figure1_n2_zero_count",
        (zeros.len() as f64 - 2.0).abs(),
        0.0,
    ));
    for (k, exact) in [2.0 - 2f64.sqrt(), 2.0 + 2f64.sqrt()]
        .into_iter()
        .enumerate()
    {
        let found = zeros
            .iter()
            .min_by(|a, b| (a.0 - exact).abs().total_cmp(&(b.0 - exact).abs()))
            .copied()
            .unwrap_or((f64::NAN, 0.0));
        out.push(Check::at_most(
            format!("figure1_n2_zero_{k}"),
            (found.0 - exact).abs(),
            found.1,
        ));
    }
    Ok(out)
}
