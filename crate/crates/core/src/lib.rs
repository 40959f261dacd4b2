//! Weighted Bergman kernels and balanced-metric diagnostics on Hartogs domains.
//!
//! A Hartogs domain `D_F ⊂ C^n` is cut out by a decreasing profile `F` as
//! `|z0|² < x0, ‖z‖² < F(|z0|²)` and carries the Kähler potential
//! `Φ_F = -log(F(|z0|²) - ‖z‖²)`. This crate evaluates the reproducing kernels
//! of the weighted spaces `H_{mΦ_F}`, the ε-functions `e^{-mΦ} K_{mΦ}`, the
//! moment identity parameter γ, and the metric quantities (volume density,
//! scalar curvature) used to decide whether `m g_F` is balanced.

pub mod epsilon;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod kernel;
pub mod moments;
pub mod profile;
pub mod quadrature;
pub mod sampling;
pub mod special;

pub use error::{Error, Result};
pub use profile::{Completeness, DomainPoint, HartogsProfile, ProfileSource};
