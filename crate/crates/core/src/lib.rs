//! Numerics for displacement-based quantum rulers on a single bosonic mode.
//!
//! A ruler is the family of displaced ticks `Π(α) = D(α) Π₀ D†(α)`. Probing a
//! displacement `β` with it yields outcome statistics `p(α − β)` that form a
//! symplectic Fourier pair with the mutual coherence function `Γ(τ)`. This crate
//! computes `Γ` and `p` by independent routes, evaluates the coherence time and
//! resolution functionals, and checks the whole chain against closed forms.
//!
//! Conventions: `X = (a + a†)/2`, `Y = i(a† − a)/2`, `[X, Y] = i/2`, phase-space
//! measure `d²α = dα_x dα_y`, Wigner functions normalized to unit integral.
//!
//! Module map:
//! - [`fock`]: truncated Fock-space states, operators, displacement matrices, moments.
//! - [`phase_space`]: grids, cross-Wigner and characteristic functions, the
//!   symplectic Fourier transform, overlaps and autocorrelations.
//! - [`analytic`]: closed forms for the squeezed-vacuum and number-state families.
//! - [`coherence`]: `Γ` and `p` routes, coherence time, resolution, directional
//!   coherence, marginals.
//! - [`ruler`]: tick validation, POVM elements, completeness and shift invariance.
//! - [`cli`]: configuration, scenario execution and the verification suites behind
//!   the `ruler` binary.

pub mod analytic;
pub mod cli;
pub mod coherence;
pub mod error;
pub mod fock;
pub mod phase_space;
pub(crate) mod quad;
pub mod ruler;

pub use analytic::AnalyticCase;
pub use coherence::CoherenceReport;
pub use error::{Error, Result};
pub use fock::{FockOperator, FockVector, MixedState};
pub use phase_space::{FieldKind, Grid2D, GridField, GridMode};
pub use ruler::Tick;

/// Default Fock cutoff.
pub const DEFAULT_CUTOFF: usize = 60;
