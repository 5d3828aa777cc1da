//! CSV artifacts and figure data.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::analytic::{gamma_analytic, tau_c_analytic, AnalyticCase};
use crate::coherence::{coherence_time, gamma_char_route, gamma_wigner_route};
use crate::error::{Error, Result};
use crate::fock::number_state;
use crate::phase_space::{Grid2D, GridField};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits, fixed layout.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table with its provenance comment line.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub comment: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(cutoff: usize, grid: &str, header: Vec<&'static str>) -> Self {
        Self {
            comment: format!("cutoff={cutoff} {grid} version={VERSION}"),
            header,
            rows: Vec::new(),
        }
    }

    pub fn for_grid(cutoff: usize, grid: &Grid2D, header: Vec<&'static str>) -> Self {
        Self::new(
            cutoff,
            &format!(
                "grid_extent={} grid_points={}",
                grid.extent(),
                grid.points()
            ),
            header,
        )
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {}", self.comment);
        let _ = writeln!(s, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_file(path, &self.render())
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .map_err(|e| Error::input(format!("cannot create {}: {e}", dir.display())))?;
        }
    }
    std::fs::write(path, text)
        .map_err(|e| Error::input(format!("cannot write {}: {e}", path.display())))
}

/// Grid field as `x, y, re, im` rows.
pub fn field_table(field: &GridField, cutoff: usize, header: Vec<&'static str>) -> Table {
    let grid = *field.grid();
    let mut t = Table::for_grid(cutoff, &grid, header);
    let m = grid.points();
    for ix in 0..m {
        for iy in 0..m {
            let v = field.at(ix, iy);
            t.rows.push(vec![
                num(grid.coord(ix)),
                num(grid.coord(iy)),
                num(v.re),
                num(v.im),
            ]);
        }
    }
    t
}

/// `Γ(|τ|²)` for `n = 0` and `n = 2` along the positive `τ_x` axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure1 {
    pub grid: Grid2D,
    pub tau_sq: Vec<f64>,
    pub n0_numeric: Vec<f64>,
    pub n0_analytic: Vec<f64>,
    pub n2_numeric: Vec<f64>,
    pub n2_analytic: Vec<f64>,
}

impl Figure1 {
    pub fn max_error(&self) -> f64 {
        let e0 = self
            .n0_numeric
            .iter()
            .zip(&self.n0_analytic)
            .map(|(a, b)| (a - b).abs());
        let e2 = self
            .n2_numeric
            .iter()
            .zip(&self.n2_analytic)
            .map(|(a, b)| (a - b).abs());
        e0.chain(e2).fold(0.0, f64::max)
    }

    /// Zeros of the numerical `n = 2` curve. `Γ` is a square there, so its zeros are
    /// touching minima: each near-zero local minimum is refined by a parabola through
    /// the neighbouring samples and reported with the local sample spacing in `|τ|²`.
    pub fn n2_zeros(&self) -> Vec<(f64, f64)> {
        let (x, y) = (&self.tau_sq, &self.n2_numeric);
        let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (1..x.len().saturating_sub(1))
            .filter(|&i| y[i] <= y[i - 1] && y[i] < y[i + 1] && y[i].abs() < 1e-2 * scale)
            .map(|i| {
                let (x0, x1, x2) = (x[i - 1], x[i], x[i + 1]);
                let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
                let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
                let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
                let vertex = if den != 0.0 { x1 - 0.5 * num / den } else { x1 };
                (vertex, (x2 - x1).max(x1 - x0))
            })
            .collect()
    }

    pub fn table(&self, cutoff: usize) -> Table {
        let mut t = Table::for_grid(
            cutoff,
            &self.grid,
            vec![
                "tau_sq",
                "gamma_n0_numeric",
                "gamma_n0_analytic",
                "gamma_n2_numeric",
                "gamma_n2_analytic",
            ],
        );
        for i in 0..self.tau_sq.len() {
            t.rows.push(vec![
                num(self.tau_sq[i]),
                num(self.n0_numeric[i]),
                num(self.n0_analytic[i]),
                num(self.n2_numeric[i]),
                num(self.n2_analytic[i]),
            ]);
        }
        t
    }
}

/// Numerical curves come from the Wigner-autocorrelation route.
pub fn figure1_data(grid: &Grid2D, cutoff: usize) -> Result<Figure1> {
    let c0 = grid
        .origin_index()
        .ok_or_else(|| Error::input("figure 1 needs a grid containing the origin"))?;
    let mut curves = Vec::new();
    for n in [0usize, 2] {
        let v = number_state(n, cutoff)?;
        let g = gamma_wigner_route(&v, &v, grid)?;
        curves.push((n, g));
    }
    let m = grid.points();
    let mut fig = Figure1 {
        grid: *grid,
        tau_sq: Vec::new(),
        n0_numeric: Vec::new(),
        n0_analytic: Vec::new(),
        n2_numeric: Vec::new(),
        n2_analytic: Vec::new(),
    };
    for ix in c0..m {
        let x = grid.coord(ix);
        let tau = Complex64::new(x, 0.0);
        fig.tau_sq.push(x * x);
        fig.n0_numeric.push(curves[0].1.at(ix, c0).re);
        fig.n0_analytic
            .push(gamma_analytic(&AnalyticCase::Number(0), tau)?);
        fig.n2_numeric.push(curves[1].1.at(ix, c0).re);
        fig.n2_analytic
            .push(gamma_analytic(&AnalyticCase::Number(2), tau)?);
    }
    Ok(fig)
}

/// The grid used for `τ_c(n)`: its extent grows with the spread of `Γ`, spacing ≤ 0.08.
pub fn figure2_grid(n: usize) -> Result<Grid2D> {
    let extent = 6.0 + 2.0 * (n as f64).sqrt();
    let points = ((2.0 * extent / 0.08).ceil() as usize + 1) & !1;
    Grid2D::fft(extent, points)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure2Row {
    pub n: usize,
    pub tau_c_numeric: f64,
    pub tau_c_oracle: f64,
}

/// `τ_c(n)` for number states `n = 0..=n_max`.
pub fn figure2_data(n_max: usize, cutoff: usize) -> Result<Vec<Figure2Row>> {
    (0..=n_max)
        .map(|n| {
            let grid = figure2_grid(n)?;
            let v = number_state(n, cutoff)?;
            let g = gamma_char_route(&v, &v, &grid)?;
            Ok(Figure2Row {
                n,
                tau_c_numeric: coherence_time(&g)?,
                tau_c_oracle: tau_c_analytic(&AnalyticCase::Number(n))?,
            })
        })
        .collect()
}

pub fn figure2_table(rows: &[Figure2Row], cutoff: usize) -> Table {
    let mut t = Table::new(
        cutoff,
        "grid_extent=6+2*sqrt(n) grid_spacing<=0.08",
        vec!["n", "tau_c_numeric", "tau_c_oracle"],
    );
    for r in rows {
        t.rows.push(vec![
            r.n.to_string(),
            num(r.tau_c_numeric),
            num(r.tau_c_oracle),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_is_fixed() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
    }

    #[test]
    fn table_layout() {
        let mut t = Table::for_grid(60, &Grid2D::default(), vec!["a", "b"]);
        t.rows.push(vec![num(1.0), num(2.0)]);
        let s = t.render();
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# cutoff=60 grid_extent=6 grid_points=128 version="));
        assert_eq!(lines[1], "a,b");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn figure1_zeros_of_n2() {
        let fig = figure1_data(&Grid2D::default(), 60).unwrap();
        assert!(fig.max_error() < 1e-6);
        let zeros = fig.n2_zeros();
        assert_eq!(zeros.len(), 2);
        for ((z, width), exact) in zeros.iter().zip([2.0 - 2f64.sqrt(), 2.0 + 2f64.sqrt()]) {
            assert!((z - exact).abs() < *width, "{z} vs {exact}");
        }
    }

    #[test]
    fn figure2_grids_are_valid() {
        for n in 0..=8 {
            let g = figure2_grid(n).unwrap();
            assert!(g.spacing() <= 0.08 + 1e-12);
        }
    }
}
