//! Truncated Fock-space linear algebra.
//!
//! States live on `|0⟩..|N⟩`. Displacement matrix elements are evaluated one by
//! one from the closed form
//!
//! ```text
//! ⟨m|D(β)|n⟩ = √(n!/m!) β^{m−n} e^{−|β|²/2} L_n^{(m−n)}(|β|²),   m ≥ n
//! ```
//!
//! in log space, so every element inside the cutoff is exact to rounding no matter
//! how large `|β|` is. What truncation does break is unitarity near the top of the
//! basis; operators carry the size of the block where it still holds.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest Laguerre degree or order accepted by [`laguerre`].
pub const MAX_LAGUERRE_DEGREE: usize = 512;

/// Tail mass below which a truncated state counts as converged.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Tolerance for states declared normalized.
pub const NORM_TOLERANCE: f64 = 1e-12;

const LN_FACTORIAL_TABLE: usize = 8192;
const RESCALE: f64 = 1e150;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACTORIAL_TABLE);
        t.push(0.0);
        let mut acc = 0.0f64;
        for k in 1..LN_FACTORIAL_TABLE {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    let table = ln_factorial_table();
    if n < table.len() {
        table[n]
    } else {
        // Stirling series, far beyond any cutoff used in practice.
        let x = n as f64 + 1.0;
        (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3))
    }
}

/// `L_0^{(k)}(x) .. L_nmax^{(k)}(x)` as `(sign, ln|L|)` pairs.
///
/// Three-term recurrence in the degree with periodic rescaling, so the values never
/// overflow even where the polynomials are astronomically large.
pub(crate) fn laguerre_log_sequence(nmax: usize, k: usize, x: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(nmax + 1);
    let kf = k as f64;
    let mut prev = 1.0f64;
    let mut scale = 0.0f64;
    out.push((1.0, 0.0));
    if nmax == 0 {
        return out;
    }
    let mut cur = 1.0 + kf - x;
    out.push(split_log(cur, scale));
    for n in 1..nmax {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 + kf - x) * cur - (nf + kf) * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            scale += RESCALE.ln();
        }
        out.push(split_log(cur, scale));
    }
    out
}

fn split_log(v: f64, scale: f64) -> (f64, f64) {
    if v == 0.0 {
        (0.0, f64::NEG_INFINITY)
    } else {
        (v.signum(), v.abs().ln() + scale)
    }
}

/// Generalized Laguerre polynomial `L_n^{(k)}(x)`.
pub fn laguerre(n: usize, k: usize, x: f64) -> Result<f64> {
    if n > MAX_LAGUERRE_DEGREE || k > MAX_LAGUERRE_DEGREE {
        return Err(Error::input(format!(
            "laguerre degree {n} / order {k} exceeds {MAX_LAGUERRE_DEGREE}"
        )));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::input(format!(
            "laguerre argument must be finite and >= 0, got {x}"
        )));
    }
    let kf = k as f64;
    let mut prev = 1.0f64;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 + kf - x;
    for m in 1..n {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0 + kf - x) * cur - (mf + kf) * prev) / (mf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Visits every `⟨m|D(β)|n⟩` with `m < rows`, `n < cols`.
///
/// Entries are exact matrix elements of the untruncated operator. Along each
/// diagonal `m − n = k` the Laguerre recurrence and the factorial prefactor are
/// advanced together, so no element needs a logarithm or exponential.
#[inline]
pub(crate) fn visit_displacement<F: FnMut(usize, usize, Complex64)>(
    beta: Complex64,
    rows: usize,
    cols: usize,
    mut f: F,
) {
    if rows == 0 || cols == 0 {
        return;
    }
    let r = beta.norm();
    if r == 0.0 {
        for i in 0..rows.min(cols) {
            f(i, i, Complex64::new(1.0, 0.0));
        }
        return;
    }
    let x = r * r;
    let ln_r = r.ln();
    let unit = beta / r;

    // m = n + k, phase β^k/|β|^k
    let mut phase = Complex64::new(1.0, 0.0);
    for k in 0..rows {
        let len = (rows - k).min(cols);
        visit_diagonal(k, len, x, ln_r, |i, v| f(i + k, i, phase * v));
        phase *= unit;
    }
    // n = m + k, phase (−β*)^k/|β|^k
    let step = -unit.conj();
    let mut phase = step;
    for k in 1..cols {
        let len = (cols - k).min(rows);
        visit_diagonal(k, len, x, ln_r, |i, v| f(i, i + k, phase * v));
        phase *= step;
    }
}

/// `√(i!/(i+k)!) r^k e^{−x/2} L_i^{(k)}(x)` for `i < len`.
#[inline]
fn visit_diagonal(k: usize, len: usize, x: f64, ln_r: f64, mut g: impl FnMut(usize, f64)) {
    if len == 0 {
        return;
    }
    let kf = k as f64;
    let ln_pref0 = kf * ln_r - 0.5 * ln_factorial(k) - 0.5 * x;
    if ln_pref0 < -700.0 {
        // prefactor underflows; fall back to log-space evaluation
        for (i, (sign, ln_l)) in laguerre_log_sequence(len - 1, k, x).into_iter().enumerate() {
            if sign != 0.0 {
                let ln_mag =
                    kf * ln_r - 0.5 * x + 0.5 * (ln_factorial(i) - ln_factorial(i + k)) + ln_l;
                g(i, sign * ln_mag.exp());
            }
        }
        return;
    }
    let mut pref = ln_pref0.exp();
    let mut prev = 0.0f64;
    let mut cur = 1.0f64;
    g(0, pref * cur);
    for i in 1..len {
        let im = (i - 1) as f64;
        let next = if i == 1 {
            1.0 + kf - x
        } else {
            ((2.0 * im + 1.0 + kf - x) * cur - (im + kf) * prev) / (i as f64)
        };
        prev = cur;
        cur = next;
        pref *= (i as f64 / (i as f64 + kf)).sqrt();
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            pref *= RESCALE;
        }
        g(i, pref * cur);
    }
}

/// Block `⟨m|D(β)|n⟩` for `m < rows`, `n < cols`.
pub(crate) fn displacement_block(beta: Complex64, rows: usize, cols: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::<Complex64>::zeros(rows, cols);
    visit_displacement(beta, rows, cols, |m, n, v| out[(m, n)] = v);
    out
}

/// `Σ_{m,n} bra*_m ⟨m|D(β)|n⟩ ket_n` without materializing the matrix.
pub(crate) fn displaced_bilinear(
    bra: &[Complex64],
    beta: Complex64,
    ket: &[Complex64],
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    visit_displacement(beta, bra.len(), ket.len(), |m, n, v| {
        acc += bra[m].conj() * v * ket[n];
    });
    acc
}

/// Number of basis states at the top of the truncated space excluded from
/// unitarity checks of `D(β)`: the rows of the truncated matrix that have lost more
/// than [`TAIL_TOLERANCE`] of their norm, and never fewer than 8.
pub fn guard_band(beta: Complex64, cutoff: usize) -> usize {
    let dim = cutoff + 1;
    dim - trusted_rows(&displacement_block(beta, dim, dim)).min(dim.saturating_sub(8))
}

/// Leading rows of a truncated unitary whose norm deficit is within [`TAIL_TOLERANCE`].
fn trusted_rows(m: &DMatrix<Complex64>) -> usize {
    (0..m.nrows())
        .take_while(|&i| 1.0 - m.row(i).iter().map(|v| v.norm_sqr()).sum::<f64>() <= TAIL_TOLERANCE)
        .count()
}

/// Smallest cutoff (by doubling from `start`) for which `D(β)` keeps a trusted block
/// of at least `min_trusted` states.
pub fn suggested_cutoff(beta: Complex64, start: usize, min_trusted: usize) -> usize {
    let mut n = start.max(1);
    while n + 1 < guard_band(beta, n) + min_trusted {
        n *= 2;
    }
    n
}

/// Complex amplitudes over `|0⟩..|N⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: DVector<Complex64>,
}

impl FockVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::input("a Fock vector needs at least one amplitude"));
        }
        if amplitudes
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::input("non-finite amplitude"));
        }
        Ok(Self {
            amplitudes: DVector::from_vec(amplitudes),
        })
    }

    pub fn from_dvector(amplitudes: DVector<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn vacuum(cutoff: usize) -> Self {
        let mut a = DVector::zeros(cutoff + 1);
        a[0] = Complex64::new(1.0, 0.0);
        Self { amplitudes: a }
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() < NORM_TOLERANCE
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::input("cannot normalize the zero vector"));
        }
        Ok(Self {
            amplitudes: self.amplitudes.unscale(n),
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Index one past the last amplitude with magnitude above 1e−17.
    pub fn support_len(&self) -> usize {
        self.amplitudes
            .iter()
            .rposition(|c| c.norm() > 1e-17)
            .map_or(1, |i| i + 1)
    }

    /// Probability carried by the top `margin` basis states.
    pub fn tail_mass(&self, margin: usize) -> f64 {
        let start = self.dim().saturating_sub(margin);
        self.amplitudes
            .rows(start, self.dim() - start)
            .norm_squared()
    }

    /// Same state embedded in (or cut down to) a different cutoff.
    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        let mut a = DVector::zeros(cutoff + 1);
        let n = self.dim().min(cutoff + 1);
        a.rows_mut(0, n).copy_from(&self.amplitudes.rows(0, n));
        Self { amplitudes: a }
    }

    pub(crate) fn head(&self, len: usize) -> DVector<Complex64> {
        let mut a = DVector::zeros(len);
        let n = len.min(self.dim());
        a.rows_mut(0, n).copy_from(&self.amplitudes.rows(0, n));
        a
    }
}

/// Dense operator on the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    matrix: DMatrix<Complex64>,
    hermitian: bool,
    /// Leading block on which the operator is known to be unitary, if it is a
    /// truncated unitary.
    trusted_dim: Option<usize>,
}

impl FockOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::input(format!(
                "operator must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            matrix,
            hermitian: false,
            trusted_dim: None,
        })
    }

    /// Builds an operator flagged Hermitian, rejecting matrices that are not.
    pub fn hermitian(matrix: DMatrix<Complex64>) -> Result<Self> {
        let mut op = Self::new(matrix)?;
        let dev = op.hermitian_deviation();
        if dev >= 1e-12 {
            return Err(Error::input(format!(
                "matrix is not Hermitian (deviation {dev:.3e})"
            )));
        }
        op.hermitian = true;
        Ok(op)
    }

    pub fn identity(cutoff: usize) -> Self {
        Self {
            matrix: DMatrix::identity(cutoff + 1, cutoff + 1),
            hermitian: true,
            trusted_dim: Some(cutoff + 1),
        }
    }

    /// `weight · |v⟩⟨v|`.
    pub fn projector(v: &FockVector, weight: f64) -> Self {
        let a = v.amplitudes();
        Self {
            matrix: a * a.adjoint() * Complex64::new(weight, 0.0),
            hermitian: true,
            trusted_dim: None,
        }
    }

    pub fn cutoff(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn trusted_dim(&self) -> Option<usize> {
        self.trusted_dim
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            hermitian: self.hermitian,
            trusted_dim: self.trusted_dim,
        }
    }

    pub fn hermitian_deviation(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Largest `|(M M†)_{mn} − δ_{mn}|` on the trusted block (whole matrix if unset).
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.trusted_dim.unwrap_or(self.matrix.nrows());
        let prod = &self.matrix * self.matrix.adjoint();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        self.check_dim(v)?;
        Ok(FockVector::from_dvector(&self.matrix * v.amplitudes()))
    }

    /// `⟨bra|M|ket⟩`.
    pub fn sandwich(&self, bra: &FockVector, ket: &FockVector) -> Result<Complex64> {
        self.check_dim(bra)?;
        self.check_dim(ket)?;
        Ok(bra.amplitudes().dotc(&(&self.matrix * ket.amplitudes())))
    }

    pub fn compose(&self, other: &FockOperator) -> Result<Self> {
        if self.matrix.nrows() != other.matrix.nrows() {
            return Err(Error::input("operator cutoff mismatch"));
        }
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
            hermitian: false,
            trusted_dim: None,
        })
    }

    /// `U M U†`.
    pub fn conjugated_by(&self, u: &FockOperator) -> Result<Self> {
        if self.matrix.nrows() != u.matrix.nrows() {
            return Err(Error::input("operator cutoff mismatch"));
        }
        Ok(Self {
            matrix: &u.matrix * &self.matrix * u.matrix.adjoint(),
            hermitian: self.hermitian,
            trusted_dim: None,
        })
    }

    fn check_dim(&self, v: &FockVector) -> Result<()> {
        if v.dim() != self.matrix.nrows() {
            return Err(Error::input(format!(
                "vector cutoff {} does not match operator cutoff {}",
                v.cutoff(),
                self.cutoff()
            )));
        }
        Ok(())
    }
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |acc, c| acc.max(c.norm()))
}

/// Convex mixture of normalized pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    components: Vec<(f64, FockVector)>,
}

impl MixedState {
    /// Weight below which an eigencomponent is dropped.
    pub const WEIGHT_FLOOR: f64 = 1e-12;

    pub fn new(components: Vec<(f64, FockVector)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::input("a mixture needs at least one component"));
        }
        let cutoff = components[0].1.cutoff();
        let mut total = 0.0;
        for (w, v) in &components {
            if !(*w > 0.0 && *w <= 1.0) {
                return Err(Error::input(format!("mixture weight {w} outside (0, 1]")));
            }
            if !v.is_normalized() {
                return Err(Error::input(format!(
                    "mixture component has norm {}, expected 1",
                    v.norm()
                )));
            }
            if v.cutoff() != cutoff {
                return Err(Error::input("mixture components have different cutoffs"));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::input(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { components })
    }

    pub fn pure(v: FockVector) -> Result<Self> {
        Self::new(vec![(1.0, v)])
    }

    /// Eigendecomposition of a density matrix (trace `scale`) into weighted pure states.
    pub fn from_operator(op: &FockOperator, scale: f64) -> Result<Self> {
        let h = (op.matrix() + op.matrix().adjoint()) * Complex64::new(0.5 / scale, 0.0);
        let eig = h.symmetric_eigen();
        let mut comps = Vec::new();
        for (i, &w) in eig.eigenvalues.iter().enumerate() {
            if w < -1e-10 {
                return Err(Error::input(format!(
                    "operator has negative eigenvalue {w:.3e}"
                )));
            }
            if w < Self::WEIGHT_FLOOR {
                continue;
            }
            let v = FockVector::from_dvector(eig.eigenvectors.column(i).into_owned());
            comps.push((w, v.normalized()?));
        }
        let total: f64 = comps.iter().map(|(w, _)| w).sum();
        for (w, _) in comps.iter_mut() {
            *w /= total;
        }
        Self::new(comps)
    }

    pub fn components(&self) -> &[(f64, FockVector)] {
        &self.components
    }

    pub fn cutoff(&self) -> usize {
        self.components[0].1.cutoff()
    }

    pub fn is_pure(&self) -> bool {
        self.components.len() == 1
    }

    pub fn with_cutoff(&self, cutoff: usize) -> Result<Self> {
        let comps = self
            .components
            .iter()
            .map(|(w, v)| Ok((*w, v.with_cutoff(cutoff).normalized()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }

    /// `Σ w |v⟩⟨v|`.
    pub fn density(&self) -> FockOperator {
        let dim = self.cutoff() + 1;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for (w, v) in &self.components {
            m += FockOperator::projector(v, *w).matrix();
        }
        FockOperator {
            matrix: m,
            hermitian: true,
            trusted_dim: None,
        }
    }
}

/// Truncated `D(β)` with its trusted block recorded.
pub fn displacement_operator(beta: Complex64, cutoff: usize) -> Result<FockOperator> {
    let dim = cutoff + 1;
    let matrix = displacement_block(beta, dim, dim);
    let guard = dim - trusted_rows(&matrix).min(dim.saturating_sub(8));
    if guard >= dim {
        return Err(Error::truncation(
            format!(
                "no trusted block left for |beta| = {:.3} at cutoff {cutoff}",
                beta.norm()
            ),
            suggested_cutoff(beta, cutoff, 8),
        ));
    }
    if beta.norm_sqr() > cutoff as f64 / 4.0 {
        log::warn!(
            "|beta|^2 = {:.3} exceeds cutoff/4 = {:.3}; displacement is poorly resolved",
            beta.norm_sqr(),
            cutoff as f64 / 4.0
        );
    }
    Ok(FockOperator {
        matrix,
        hermitian: beta.norm() == 0.0,
        trusted_dim: Some(dim - guard),
    })
}

/// Squeezed vacuum with `Δ²X = λ/4`, `Δ²Y = 1/(4λ)`.
///
/// `λ = e^{−2r}`; amplitudes `c_{2k} = (−tanh r)^k √((2k)!) / (2^k k!) / √(cosh r)`.
/// Fails if more than [`TAIL_TOLERANCE`] of the probability lies above the cutoff.
pub fn squeezed_vacuum(lambda: f64, cutoff: usize) -> Result<FockVector> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::input(format!(
            "squeezing parameter must be > 0, got {lambda}"
        )));
    }
    let r = -0.5 * lambda.ln();
    let t = r.tanh();
    let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    let mut c = 1.0 / r.cosh().sqrt();
    let mut k = 0usize;
    while 2 * k <= cutoff {
        amps[2 * k] = Complex64::new(c, 0.0);
        let kf = k as f64;
        c *= -t * ((2.0 * kf + 1.0) / (2.0 * kf + 2.0)).sqrt();
        k += 1;
    }
    let v = FockVector::new(amps)?;
    let tail = (1.0 - v.norm().powi(2)).max(0.0);
    if tail > TAIL_TOLERANCE {
        // the mass above 2k decays roughly like tanh^{2k} r
        let mut n = cutoff.max(2);
        while t.abs().powi(n as i32) > TAIL_TOLERANCE * 1e-2 && n < 1 << 16 {
            n *= 2;
        }
        return Err(Error::truncation(
            format!("squeezed vacuum lambda={lambda} loses {tail:.3e} of its norm above cutoff {cutoff}"),
            n,
        ));
    }
    v.normalized()
}

/// [`squeezed_vacuum`] with the cutoff doubled until the tail converges.
pub fn squeezed_vacuum_converged(lambda: f64, start_cutoff: usize) -> Result<FockVector> {
    let mut n = start_cutoff.max(2);
    loop {
        match squeezed_vacuum(lambda, n) {
            Ok(v) => return Ok(v),
            Err(Error::Truncation { .. }) if n < (1 << 14) => n *= 2,
            Err(e) => return Err(e),
        }
    }
}

pub fn number_state(n: usize, cutoff: usize) -> Result<FockVector> {
    if n > cutoff {
        return Err(Error::input(format!(
            "photon number {n} exceeds cutoff {cutoff}"
        )));
    }
    let mut a = DVector::zeros(cutoff + 1);
    a[n] = Complex64::new(1.0, 0.0);
    Ok(FockVector::from_dvector(a))
}

/// Quadratures `X = (a + a†)/2`, `Y = i(a† − a)/2` truncated at the cutoff.
pub fn quadrature_operators(cutoff: usize) -> Result<(FockOperator, FockOperator)> {
    if cutoff < 1 {
        return Err(Error::input("quadratures need cutoff >= 1"));
    }
    let dim = cutoff + 1;
    let mut x = DMatrix::<Complex64>::zeros(dim, dim);
    let mut y = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 1..dim {
        let s = 0.5 * (n as f64).sqrt();
        // a_{n−1,n} = √n, a†_{n,n−1} = √n
        x[(n - 1, n)] = Complex64::new(s, 0.0);
        x[(n, n - 1)] = Complex64::new(s, 0.0);
        y[(n, n - 1)] = Complex64::new(0.0, s);
        y[(n - 1, n)] = Complex64::new(0.0, -s);
    }
    Ok((FockOperator::hermitian(x)?, FockOperator::hermitian(y)?))
}

/// `D(β)|ψ⟩`. Fails if the displaced state leaks out of the truncated space.
pub fn displace_state(state: &FockVector, beta: Complex64) -> Result<FockVector> {
    let dim = state.dim();
    let block = displacement_block(beta, dim, state.support_len());
    let out = &block * state.head(state.support_len());
    let loss = (state.norm() - out.norm()).abs();
    if loss > 1e-8 {
        let reach = (state.support_len() as f64).sqrt() + beta.norm() + 6.0;
        return Err(Error::truncation(
            format!("displacing by {beta} loses {loss:.3e} of the norm"),
            (reach * reach).ceil() as usize,
        ));
    }
    Ok(FockVector::from_dvector(out))
}

fn check_normalized(v: &FockVector, what: &str) -> Result<()> {
    if !v.is_normalized() {
        return Err(Error::input(format!(
            "{what} has norm {}, expected 1",
            v.norm()
        )));
    }
    Ok(())
}

/// Symmetrically ordered quadrature covariance matrix of a pure state.
pub fn covariance_matrix(psi: &FockVector) -> Result<Matrix2<f64>> {
    check_normalized(psi, "state")?;
    let (x, y) = quadrature_operators(psi.cutoff().max(1))?;
    let psi = psi.with_cutoff(x.cutoff());
    let xp = x.apply(&psi)?;
    let yp = y.apply(&psi)?;
    let mx = psi.inner(&xp).re;
    let my = psi.inner(&yp).re;
    let xx = xp.inner(&xp).re - mx * mx;
    let yy = yp.inner(&yp).re - my * my;
    let xy = 0.5 * (xp.inner(&yp) + yp.inner(&xp)).re - mx * my;
    Ok(Matrix2::new(xx, xy, xy, yy))
}

/// Cross-state covariance entries
///
/// ```text
/// C_xx = Re⟨φ|X²|ψ⟩ − |⟨φ|X|ψ⟩|²
/// C_yy = Re⟨φ|Y²|ψ⟩ − |⟨φ|Y|ψ⟩|²
/// C_xy = Re{½⟨φ|XY+YX|ψ⟩ − ⟨φ|X|ψ⟩⟨ψ|Y|φ⟩}
/// ```
///
/// Reduces to [`covariance_matrix`] when `φ = ψ`.
pub fn cross_covariance_matrix(phi: &FockVector, psi: &FockVector) -> Result<Matrix2<f64>> {
    check_normalized(phi, "phi")?;
    check_normalized(psi, "psi")?;
    if phi.cutoff() != psi.cutoff() {
        return Err(Error::input(format!(
            "cutoff mismatch: {} vs {}",
            phi.cutoff(),
            psi.cutoff()
        )));
    }
    let (x, y) = quadrature_operators(psi.cutoff().max(1))?;
    let (phi, psi) = (phi.with_cutoff(x.cutoff()), psi.with_cutoff(x.cutoff()));
    let xpsi = x.apply(&psi)?;
    let ypsi = y.apply(&psi)?;
    let xphi = x.apply(&phi)?;
    let yphi = y.apply(&phi)?;
    let x_fp = phi.inner(&xpsi);
    let y_fp = phi.inner(&ypsi);
    let y_pf = psi.inner(&yphi);
    let xx = xphi.inner(&xpsi).re - x_fp.norm_sqr();
    let yy = yphi.inner(&ypsi).re - y_fp.norm_sqr();
    let xy = (0.5 * (xphi.inner(&ypsi) + yphi.inner(&xpsi)) - x_fp * y_pf).re;
    Ok(Matrix2::new(xx, xy, xy, yy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(laguerre(0, 0, 3.7).unwrap(), 1.0);
        assert_abs_diff_eq!(laguerre(1, 0, 1.0).unwrap(), 0.0);
        let s = 2.0f64.sqrt();
        for t in [2.0 - s, 2.0 + s] {
            assert!(laguerre(2, 0, t).unwrap().abs() < 1e-10);
        }
        // L_2^{(1)}(x) = (x² − 6x + 6)/2
        assert_abs_diff_eq!(
            laguerre(2, 1, 0.7).unwrap(),
            (0.49 - 4.2 + 6.0) / 2.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn laguerre_rejects_out_of_range() {
        assert!(matches!(laguerre(513, 0, 1.0), Err(Error::Input(_))));
        assert!(matches!(laguerre(3, 600, 1.0), Err(Error::Input(_))));
        assert!(matches!(laguerre(3, 0, -1.0), Err(Error::Input(_))));
    }

    #[test]
    fn log_sequence_matches_direct() {
        let seq = laguerre_log_sequence(40, 3, 17.5);
        for (n, &(s, l)) in seq.iter().enumerate() {
            let direct = laguerre(n, 3, 17.5).unwrap();
            let v = s * l.exp();
            assert!(
                (v - direct).abs() <= 1e-10 * direct.abs().max(1.0),
                "n={n}: {v} vs {direct}"
            );
        }
    }

    #[test]
    fn displacement_at_zero_is_identity() {
        let d = displacement_operator(c(0.0, 0.0), 20).unwrap();
        assert_eq!(d.matrix(), &DMatrix::identity(21, 21));
    }

    #[test]
    fn vacuum_displacement_amplitude() {
        for beta in [c(0.3, -0.2), c(1.0, 1.0), c(-2.0, 0.5)] {
            let d = displacement_operator(beta, 60).unwrap();
            assert_abs_diff_eq!(
                d.matrix()[(0, 0)].norm(),
                (-beta.norm_sqr() / 2.0).exp(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn displacement_inverse_on_trusted_block() {
        let beta = c(1.0, 0.0);
        let d = displacement_operator(beta, 60).unwrap();
        let dm = displacement_operator(-beta, 60).unwrap();
        let prod = d.compose(&dm).unwrap();
        let t = d.trusted_dim().unwrap();
        assert!(t >= 20);
        for i in 0..t {
            for j in 0..t {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((prod.matrix()[(i, j)] - target).norm() < 1e-10, "({i},{j})");
            }
        }
        assert!(d.unitarity_deviation() < 1e-10);
    }

    #[test]
    fn displacement_elements_match_generator_exponential() {
        // Compare with the Taylor series of exp(βa† − β*a) at a large cutoff.
        let beta = c(0.4, -0.7);
        let big = 80;
        let dim = big + 1;
        let mut g = DMatrix::<Complex64>::zeros(dim, dim);
        for n in 1..dim {
            let s = (n as f64).sqrt();
            g[(n, n - 1)] += beta * s;
            g[(n - 1, n)] -= beta.conj() * s;
        }
        let mut term = DMatrix::<Complex64>::identity(dim, dim);
        let mut sum = term.clone();
        for k in 1..80 {
            term = &term * &g / Complex64::new(k as f64, 0.0);
            sum += &term;
        }
        let block = displacement_block(beta, 12, 12);
        for i in 0..12 {
            for j in 0..12 {
                assert!((block[(i, j)] - sum[(i, j)]).norm() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn displacement_errors_when_cutoff_too_small() {
        match displacement_operator(c(3.0, 0.0), 20) {
            Err(Error::Truncation {
                suggested_cutoff, ..
            }) => {
                assert!(displacement_operator(c(3.0, 0.0), suggested_cutoff).is_ok());
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn squeezed_vacuum_variances() {
        assert_eq!(squeezed_vacuum(1.0, 10).unwrap(), FockVector::vacuum(10));
        let v = squeezed_vacuum(0.5, 60).unwrap();
        let cov = covariance_matrix(&v).unwrap();
        assert_abs_diff_eq!(cov[(0, 0)], 0.125, epsilon = 1e-6);
        for lambda in [0.3, 1.0, 3.0] {
            let cov = covariance_matrix(&squeezed_vacuum(lambda, 60).unwrap()).unwrap();
            assert_abs_diff_eq!((cov[(0, 0)] * cov[(1, 1)]).sqrt(), 0.25, epsilon = 1e-6);
            assert_abs_diff_eq!(cov[(0, 0)], lambda / 4.0, epsilon = 1e-9);
            assert_abs_diff_eq!(cov[(0, 1)], 0.0, epsilon = 1e-12);
        }
        let cov = covariance_matrix(&squeezed_vacuum(4.0, 60).unwrap()).unwrap();
        assert_abs_diff_eq!(cov[(0, 0)], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(cov[(1, 1)], 1.0 / 16.0, epsilon = 1e-9);
    }

    #[test]
    fn squeezed_vacuum_only_even_amplitudes() {
        let v = squeezed_vacuum(0.4, 40).unwrap();
        for (n, a) in v.amplitudes().iter().enumerate() {
            if n % 2 == 1 {
                assert_eq!(a.norm(), 0.0);
            }
        }
        assert!(v.is_normalized());
    }

    #[test]
    fn squeezed_vacuum_tail_escalation() {
        assert!(matches!(
            squeezed_vacuum(0.05, 60),
            Err(Error::Truncation { .. })
        ));
        let v = squeezed_vacuum_converged(0.05, 60).unwrap();
        assert!(v.cutoff() > 60);
        let cov = covariance_matrix(&v).unwrap();
        assert_abs_diff_eq!(cov[(0, 0)], 0.0125, epsilon = 1e-8);
    }

    #[test]
    fn number_states() {
        let v = number_state(0, 10).unwrap();
        assert_eq!(v, FockVector::vacuum(10));
        let a = number_state(2, 10).unwrap();
        let b = number_state(3, 10).unwrap();
        assert_eq!(a.inner(&b), c(0.0, 0.0));
        assert!(matches!(number_state(11, 10), Err(Error::Input(_))));
    }

    #[test]
    fn number_state_variance_from_matrix_moments() {
        // oracle: explicit X·X product
        let (x, _) = quadrature_operators(60).unwrap();
        let x2 = x.compose(&x).unwrap();
        let v = number_state(2, 60).unwrap();
        let mean = x.sandwich(&v, &v).unwrap().re;
        let second = x2.sandwich(&v, &v).unwrap().re;
        assert_abs_diff_eq!(second - mean * mean, 1.25, epsilon = 1e-14);
        let cov = covariance_matrix(&v).unwrap();
        assert_abs_diff_eq!(cov[(0, 0)], 1.25, epsilon = 1e-14);
    }

    #[test]
    fn quadrature_algebra() {
        let (x, y) = quadrature_operators(30).unwrap();
        let vac = FockVector::vacuum(30);
        assert_eq!(x.sandwich(&vac, &vac).unwrap(), c(0.0, 0.0));
        let x2 = x.compose(&x).unwrap();
        assert_abs_diff_eq!(x2.sandwich(&vac, &vac).unwrap().re, 0.25, epsilon = 1e-15);
        let comm = x.compose(&y).unwrap().matrix() - y.compose(&x).unwrap().matrix();
        for m in 0..29 {
            for n in 0..29 {
                let target = if m == n { c(0.0, 0.5) } else { c(0.0, 0.0) };
                assert!((comm[(m, n)] - target).norm() < 1e-12);
            }
        }
        assert!(x.hermitian_deviation() < 1e-15 && y.hermitian_deviation() < 1e-15);
        assert!(quadrature_operators(0).is_err());
    }

    #[test]
    fn displaced_vacuum_mean() {
        let vac = FockVector::vacuum(60);
        assert_eq!(displace_state(&vac, c(0.0, 0.0)).unwrap(), vac);
        let beta = c(1.0, 0.5);
        let d = displace_state(&vac, beta).unwrap();
        assert_abs_diff_eq!(d.norm(), 1.0, epsilon = 1e-8);
        let (x, y) = quadrature_operators(60).unwrap();
        assert_abs_diff_eq!(x.sandwich(&d, &d).unwrap().re, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(y.sandwich(&d, &d).unwrap().re, 0.5, epsilon = 1e-10);
    }

    #[test]
    fn displace_state_detects_leak() {
        let v = number_state(5, 12).unwrap();
        assert!(matches!(
            displace_state(&v, c(2.5, 0.0)),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn covariance_small_cases() {
        let cov = covariance_matrix(&FockVector::vacuum(20)).unwrap();
        assert_abs_diff_eq!(cov, Matrix2::new(0.25, 0.0, 0.0, 0.25), epsilon = 1e-15);
        let cov = covariance_matrix(&number_state(1, 20).unwrap()).unwrap();
        assert_abs_diff_eq!(cov, Matrix2::new(0.75, 0.0, 0.0, 0.75), epsilon = 1e-14);
    }

    #[test]
    fn cross_covariance_cases() {
        let psi = squeezed_vacuum(0.7, 60).unwrap();
        let direct = covariance_matrix(&psi).unwrap();
        let cross = cross_covariance_matrix(&psi, &psi).unwrap();
        assert_abs_diff_eq!(direct, cross, epsilon = 1e-12);

        let a = squeezed_vacuum(0.5, 60).unwrap();
        let b = squeezed_vacuum(2.0, 60).unwrap();
        let ab = cross_covariance_matrix(&a, &b).unwrap();
        let ba = cross_covariance_matrix(&b, &a).unwrap();
        assert_abs_diff_eq!(ab, ba, epsilon = 1e-12);

        let zero = number_state(0, 20).unwrap();
        let two = number_state(2, 20).unwrap();
        let m = cross_covariance_matrix(&zero, &two).unwrap();
        assert_abs_diff_eq!(m[(0, 0)], 2.0f64.sqrt() / 4.0, epsilon = 1e-14);

        assert!(cross_covariance_matrix(&zero, &number_state(2, 10).unwrap()).is_err());
    }

    #[test]
    fn mixed_state_validation() {
        let a = number_state(0, 5).unwrap();
        let b = number_state(1, 5).unwrap();
        assert!(MixedState::new(vec![(0.5, a.clone()), (0.5, b.clone())]).is_ok());
        assert!(MixedState::new(vec![(0.5, a.clone()), (0.4, b.clone())]).is_err());
        let unnorm = FockVector::new(vec![c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(MixedState::pure(unnorm).is_err());

        let rho = MixedState::new(vec![(0.25, a), (0.75, b)])
            .unwrap()
            .density();
        let back = MixedState::from_operator(&rho, 1.0).unwrap();
        assert_eq!(back.components().len(), 2);
        assert!(max_abs(&(back.density().matrix() - rho.matrix())) < 1e-12);
    }
}
