//! Phase-space grids and transforms.
//!
//! Conventions: `α = α_x + iα_y`, `d²α = dα_x dα_y`, Wigner functions
//! `W_A(α) = tr[A Ω(α)]` with `Ω(α) = (2/π) D(α) P D†(α) = (2/π) D(2α) P` where
//! `P` is the photon-number parity. Integrals are plain Riemann sums with
//! weight `h²` per cell.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{displaced_bilinear, FockVector};

/// Default relative boundary magnitude tolerated by Fourier-type transforms.
pub const ALIASING_TOLERANCE: f64 = 1e-10;

/// Sample placement along each axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    /// `x_j = −L + j·2L/M`, so the origin sits on index `M/2`.
    FftAligned,
    /// `x_j = −L + j·2L/(M−1)`, both end points included.
    Inclusive,
}

/// Uniform square grid over `[−L, L]²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    extent: f64,
    points: usize,
    mode: GridMode,
}

impl Default for Grid2D {
    fn default() -> Self {
        Self {
            extent: 6.0,
            points: 128,
            mode: GridMode::FftAligned,
        }
    }
}

impl Grid2D {
    pub fn new(extent: f64, points: usize, mode: GridMode) -> Result<Self> {
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::input(format!(
                "grid extent must be > 0, got {extent}"
            )));
        }
        if points < 16 || points % 2 != 0 {
            return Err(Error::input(format!(
                "grid points must be an even number >= 16, got {points}"
            )));
        }
        Ok(Self {
            extent,
            points,
            mode,
        })
    }

    /// FFT-aligned grid.
    pub fn fft(extent: f64, points: usize) -> Result<Self> {
        Self::new(extent, points, GridMode::FftAligned)
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }

    pub fn spacing(&self) -> f64 {
        match self.mode {
            GridMode::FftAligned => 2.0 * self.extent / self.points as f64,
            GridMode::Inclusive => 2.0 * self.extent / (self.points - 1) as f64,
        }
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing().powi(2)
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.extent + i as f64 * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.coord(i)).collect()
    }

    /// Complex phase-space point at `(ix, iy)`.
    pub fn point(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(self.coord(ix), self.coord(iy))
    }

    /// Index of the origin, when it lies on the grid.
    pub fn origin_index(&self) -> Option<usize> {
        match self.mode {
            GridMode::FftAligned => Some(self.points / 2),
            GridMode::Inclusive => None,
        }
    }

    fn require_origin(&self, what: &str) -> Result<usize> {
        self.origin_index()
            .ok_or_else(|| Error::GridMismatch(format!("{what} needs an FFT-aligned grid")))
    }
}

/// What a [`GridField`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Wigner,
    Characteristic,
    Gamma,
    Probability,
}

/// Complex samples of a phase-space function, stored `values[ix * M + iy]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    grid: Grid2D,
    kind: FieldKind,
    values: Vec<Complex64>,
}

impl GridField {
    pub fn new(grid: Grid2D, kind: FieldKind, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.points * grid.points {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {}",
                grid.points * grid.points,
                values.len()
            )));
        }
        Ok(Self { grid, kind, values })
    }

    /// Samples `f` at every grid point, row-parallel.
    pub fn from_fn<F>(grid: Grid2D, kind: FieldKind, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        let m = grid.points;
        let values: Vec<Complex64> = (0..m)
            .into_par_iter()
            .flat_map_iter(|ix| {
                let f = &f;
                (0..m).map(move |iy| f(grid.point(ix, iy)))
            })
            .collect();
        Self { grid, kind, values }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn with_kind(mut self, kind: FieldKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[ix * self.grid.points + iy]
    }

    /// Bilinear interpolation; zero outside the grid.
    pub fn sample(&self, alpha: Complex64) -> Complex64 {
        let h = self.grid.spacing();
        let m = self.grid.points;
        let fx = (alpha.re + self.grid.extent) / h;
        let fy = (alpha.im + self.grid.extent) / h;
        if fx < 0.0 || fy < 0.0 || fx > (m - 1) as f64 || fy > (m - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let ix = (fx.floor() as usize).min(m - 2);
        let iy = (fy.floor() as usize).min(m - 2);
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        self.at(ix, iy) * ((1.0 - tx) * (1.0 - ty))
            + self.at(ix + 1, iy) * (tx * (1.0 - ty))
            + self.at(ix, iy + 1) * ((1.0 - tx) * ty)
            + self.at(ix + 1, iy + 1) * (tx * ty)
    }

    /// `h² Σ f`.
    pub fn integral(&self) -> Complex64 {
        row_sums(&self.values, self.grid.points, |v| v)
            .into_iter()
            .sum::<Complex64>()
            * self.grid.cell_area()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.norm()))
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.im.abs()))
    }

    /// Largest magnitude on the outermost rows and columns.
    pub fn boundary_max(&self) -> f64 {
        let m = self.grid.points;
        let mut worst = 0.0f64;
        for i in 0..m {
            for (ix, iy) in [(0, i), (m - 1, i), (i, 0), (i, m - 1)] {
                worst = worst.max(self.at(ix, iy).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &GridField) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).norm())))
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            grid: self.grid,
            kind: self.kind,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid,
            kind: self.kind,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Pointwise `self + w·other`.
    pub fn add_scaled(&mut self, other: &GridField, w: f64) -> Result<()> {
        self.check_grid(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b * w;
        }
        Ok(())
    }

    /// Largest `|f*(τ) − f(−τ)|`, using the grid points whose mirror image is on the grid.
    pub fn conjugate_symmetry_deviation(&self) -> Result<f64> {
        let c = self.grid.require_origin("conjugate symmetry")?;
        let m = self.grid.points;
        let mut worst = 0.0f64;
        for ix in 1..m {
            for iy in 1..m {
                let mirror = self.at(2 * c - ix, 2 * c - iy);
                worst = worst.max((self.at(ix, iy).conj() - mirror).norm());
            }
        }
        Ok(worst)
    }

    /// Value at the origin of an FFT-aligned grid.
    pub fn at_origin(&self) -> Result<Complex64> {
        let c = self.grid.require_origin("origin lookup")?;
        Ok(self.at(c, c))
    }

    pub(crate) fn check_grid(&self, other: &GridField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    fn check_decay(&self, tol: f64) -> Result<()> {
        let boundary = self.boundary_max();
        if !(boundary <= tol) {
            return Err(Error::Aliasing {
                boundary,
                threshold: tol,
            });
        }
        Ok(())
    }
}

/// Per-row sums in a fixed order, independent of thread scheduling.
pub(crate) fn row_sums<F>(values: &[Complex64], m: usize, f: F) -> Vec<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    values
        .par_chunks(m)
        .map(|row| row.iter().map(|&v| f(v)).sum::<Complex64>())
        .collect()
}

fn check_same_cutoff(a: &FockVector, b: &FockVector) -> Result<()> {
    if a.cutoff() != b.cutoff() {
        return Err(Error::input(format!(
            "states have different cutoffs ({} vs {})",
            a.cutoff(),
            b.cutoff()
        )));
    }
    Ok(())
}

fn trimmed(v: &FockVector) -> Vec<Complex64> {
    v.amplitudes()
        .iter()
        .take(v.support_len())
        .copied()
        .collect()
}

/// Cross-Wigner function `W_{|ψ⟩⟨φ|}(α) = (2/π)⟨φ|D(2α) P|ψ⟩`.
///
/// Only displacement matrix elements between the supports of the two states are
/// needed, and those are exact, so the result does not degrade with grid extent.
pub fn wigner_cross(psi: &FockVector, phi: &FockVector, grid: &Grid2D) -> Result<GridField> {
    check_same_cutoff(psi, phi)?;
    let bra = trimmed(phi);
    let ket: Vec<Complex64> = trimmed(psi)
        .into_iter()
        .enumerate()
        .map(|(n, c)| if n % 2 == 0 { c } else { -c })
        .collect();
    Ok(GridField::from_fn(*grid, FieldKind::Wigner, |alpha| {
        displaced_bilinear(&bra, alpha * 2.0, &ket) * (2.0 / PI)
    }))
}

/// `⟨ψ|D(τ)|φ⟩`; the symmetrically ordered characteristic function when `ψ = φ`.
pub fn characteristic(psi: &FockVector, phi: &FockVector, tau: Complex64) -> Result<Complex64> {
    check_same_cutoff(psi, phi)?;
    Ok(displaced_bilinear(&trimmed(psi), tau, &trimmed(phi)))
}

/// [`characteristic`] sampled on a grid.
pub fn characteristic_field(
    psi: &FockVector,
    phi: &FockVector,
    grid: &Grid2D,
) -> Result<GridField> {
    check_same_cutoff(psi, phi)?;
    let bra = trimmed(psi);
    let ket = trimmed(phi);
    Ok(GridField::from_fn(
        *grid,
        FieldKind::Characteristic,
        |tau| displaced_bilinear(&bra, tau, &ket),
    ))
}

/// Which way the symplectic transform runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `g(μ) = ∫d²τ e^{τμ* − τ*μ} f(τ)`
    Forward,
    /// `f(τ) = π⁻² ∫d²μ e^{μτ* − μ*τ} g(μ)`
    Inverse,
}

/// Evaluation strategy for Fourier-type sums. Both produce the same Riemann sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Direct,
    Fft,
}

/// Symplectic Fourier transform with the FFT engine and default aliasing guard.
pub fn symplectic_ft(field: &GridField) -> Result<GridField> {
    symplectic_ft_with(field, Direction::Forward, Engine::Fft, ALIASING_TOLERANCE)
}

/// Symplectic Fourier transform `∫d²τ e^{τμ* − τ*μ} f(τ)` onto the same grid.
///
/// The kernel `e^{τμ* − τ*μ} = e^{2i(τ_y μ_x − τ_x μ_y)}` factorizes, so the 2-D sum
/// is two passes of the 1-D transform `Σ_j v_j e^{2iσ x_j x_k}`. The FFT engine
/// evaluates that with a chirp-z convolution, which works for any spacing.
pub fn symplectic_ft_with(
    field: &GridField,
    direction: Direction,
    engine: Engine,
    alias_tol: f64,
) -> Result<GridField> {
    field.check_decay(alias_tol)?;
    let grid = field.grid;
    let m = grid.points;
    // The kernel is its own inverse up to π⁻², so both directions share the sums.
    let first = Transform1d::new(&grid, -1.0, engine);
    let second = Transform1d::new(&grid, 1.0, engine);

    // Pass over τ_x (kernel e^{−2iσ τ_x μ_y}) for each τ_y column.
    let mut columns: Vec<Vec<Complex64>> = (0..m)
        .into_par_iter()
        .map(|jy| {
            let col: Vec<Complex64> = (0..m).map(|jx| field.at(jx, jy)).collect();
            first.apply(&col)
        })
        .collect();
    // columns[jy][ky]; pass over τ_y (kernel e^{2iσ τ_y μ_x}) for each μ_y.
    let rows: Vec<Vec<Complex64>> = (0..m)
        .into_par_iter()
        .map(|ky| {
            let v: Vec<Complex64> = (0..m).map(|jy| columns[jy][ky]).collect();
            second.apply(&v)
        })
        .collect();
    columns.clear();

    let mut weight = grid.cell_area();
    if direction == Direction::Inverse {
        weight /= PI * PI;
    }
    let mut values = vec![Complex64::new(0.0, 0.0); m * m];
    for (ky, row) in rows.iter().enumerate() {
        for (kx, v) in row.iter().enumerate() {
            values[kx * m + ky] = v * weight;
        }
    }
    let kind = match (field.kind, direction) {
        (FieldKind::Gamma, Direction::Forward) => FieldKind::Probability,
        (FieldKind::Probability, Direction::Inverse) => FieldKind::Gamma,
        (k, _) => k,
    };
    GridField::new(grid, kind, values)
}

/// `v ↦ Σ_j v_j e^{2iσ x_j x_k}` on the grid coordinates.
enum Transform1d {
    Direct(Vec<Complex64>, usize),
    Chirp(ChirpZ),
}

impl Transform1d {
    fn new(grid: &Grid2D, sigma: f64, engine: Engine) -> Self {
        let m = grid.points;
        match engine {
            Engine::Direct => {
                let xs = grid.coords();
                let mut k = Vec::with_capacity(m * m);
                for xk in &xs {
                    for xj in &xs {
                        k.push(Complex64::from_polar(1.0, 2.0 * sigma * xj * xk));
                    }
                }
                Transform1d::Direct(k, m)
            }
            Engine::Fft => Transform1d::Chirp(ChirpZ::new(grid, sigma)),
        }
    }

    fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        match self {
            Transform1d::Direct(k, m) => (0..*m)
                .map(|row| {
                    k[row * m..(row + 1) * m]
                        .iter()
                        .zip(v)
                        .map(|(a, b)| a * b)
                        .sum()
                })
                .collect(),
            Transform1d::Chirp(c) => c.apply(v),
        }
    }
}

/// Bluestein evaluation of `Σ_j v_j e^{2iσ x_j x_k}` with `x_j = x₀ + jh`.
///
/// Writing `a = 2σh²` and `jk = (j² + k² − (k−j)²)/2` turns the sum into a
/// linear convolution with the chirp `e^{−ia d²/2}`.
struct ChirpZ {
    m: usize,
    p: usize,
    pre: Vec<Complex64>,
    post: Vec<Complex64>,
    chirp_hat: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl ChirpZ {
    fn new(grid: &Grid2D, sigma: f64) -> Self {
        let m = grid.points;
        let p = (2 * m - 1).next_power_of_two();
        let h = grid.spacing();
        let x0 = grid.coord(0);
        let a = 2.0 * sigma * h * h;
        let b = 2.0 * sigma * x0 * h;
        let half_sq = |j: usize| 0.5 * a * (j * j) as f64;
        let pre = (0..m)
            .map(|j| Complex64::from_polar(1.0, b * j as f64 + half_sq(j)))
            .collect();
        let post = (0..m)
            .map(|k| Complex64::from_polar(1.0, 2.0 * sigma * x0 * x0 + b * k as f64 + half_sq(k)))
            .collect();
        let mut chirp = vec![Complex64::new(0.0, 0.0); p];
        for d in 0..m {
            let w = Complex64::from_polar(1.0, -half_sq(d));
            chirp[d] = w;
            if d > 0 {
                chirp[p - d] = w;
            }
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(p);
        let inv = planner.plan_fft_inverse(p);
        fwd.process(&mut chirp);
        Self {
            m,
            p,
            pre,
            post,
            chirp_hat: chirp,
            fwd,
            inv,
        }
    }

    fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.p];
        for j in 0..self.m {
            buf[j] = v[j] * self.pre[j];
        }
        self.fwd.process(&mut buf);
        for (b, c) in buf.iter_mut().zip(&self.chirp_hat) {
            *b *= c;
        }
        self.inv.process(&mut buf);
        let norm = 1.0 / self.p as f64;
        (0..self.m).map(|k| buf[k] * self.post[k] * norm).collect()
    }
}

/// `π h² Σ a b`, the phase-space form of `tr(AB)`.
pub fn overlap(a: &GridField, b: &GridField) -> Result<Complex64> {
    a.check_grid(b)?;
    let m = a.grid.points;
    let sums: Vec<Complex64> = a
        .values
        .par_chunks(m)
        .zip(b.values.par_chunks(m))
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x * y).sum::<Complex64>())
        .collect();
    Ok(sums.into_iter().sum::<Complex64>() * (PI * a.grid.cell_area()))
}

/// `scale · ∫d²α f*(α) f(α + τ)` on the lag grid, using the FFT engine.
pub fn autocorrelate(field: &GridField, scale: f64) -> Result<GridField> {
    autocorrelate_with(field, scale, Engine::Fft, ALIASING_TOLERANCE)
}

/// Autocorrelation with a selectable engine.
///
/// Lags coincide with the grid points themselves, so the grid must contain the
/// origin. Samples shifted off the grid count as zero.
pub fn autocorrelate_with(
    field: &GridField,
    scale: f64,
    engine: Engine,
    alias_tol: f64,
) -> Result<GridField> {
    let grid = field.grid;
    let c = grid.require_origin("autocorrelation")?;
    field.check_decay(alias_tol)?;
    let m = grid.points;
    let w = Complex64::new(scale * grid.cell_area(), 0.0);
    let kind = if field.kind == FieldKind::Wigner {
        FieldKind::Gamma
    } else {
        field.kind
    };
    let values = match engine {
        Engine::Direct => {
            let f = &field.values;
            (0..m)
                .into_par_iter()
                .flat_map_iter(|kx| {
                    (0..m).map(move |ky| {
                        let sx = kx as isize - c as isize;
                        let sy = ky as isize - c as isize;
                        let mut acc = Complex64::new(0.0, 0.0);
                        for jx in 0..m {
                            let tx = jx as isize + sx;
                            if tx < 0 || tx >= m as isize {
                                continue;
                            }
                            for jy in 0..m {
                                let ty = jy as isize + sy;
                                if ty < 0 || ty >= m as isize {
                                    continue;
                                }
                                acc += f[jx * m + jy].conj() * f[tx as usize * m + ty as usize];
                            }
                        }
                        acc * w
                    })
                })
                .collect()
        }
        Engine::Fft => {
            let p = 2 * m;
            let mut buf = vec![Complex64::new(0.0, 0.0); p * p];
            for jx in 0..m {
                for jy in 0..m {
                    buf[jx * p + jy] = field.at(jx, jy);
                }
            }
            let mut planner = FftPlanner::new();
            fft2(&mut buf, p, planner.plan_fft_forward(p));
            for v in buf.iter_mut() {
                *v = Complex64::new(v.norm_sqr(), 0.0);
            }
            fft2(&mut buf, p, planner.plan_fft_inverse(p));
            let norm = 1.0 / (p * p) as f64;
            let wrap = |s: isize| {
                if s < 0 {
                    (s + p as isize) as usize
                } else {
                    s as usize
                }
            };
            let mut out = Vec::with_capacity(m * m);
            for kx in 0..m {
                for ky in 0..m {
                    let sx = wrap(kx as isize - c as isize);
                    let sy = wrap(ky as isize - c as isize);
                    out.push(buf[sx * p + sy] * norm * w);
                }
            }
            out
        }
    };
    GridField::new(grid, kind, values)
}

/// In-place 2-D transform of a row-major `p × p` buffer.
fn fft2(buf: &mut [Complex64], p: usize, plan: Arc<dyn Fft<f64>>) {
    plan.process(buf);
    let mut t = vec![Complex64::new(0.0, 0.0); p * p];
    for i in 0..p {
        for j in 0..p {
            t[j * p + i] = buf[i * p + j];
        }
    }
    plan.process(&mut t);
    for i in 0..p {
        for j in 0..p {
            buf[j * p + i] = t[i * p + j];
        }
    }
}
