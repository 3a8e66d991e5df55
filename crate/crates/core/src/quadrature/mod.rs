//! Singular quadrature: the 1-D adaptive engine, sphere rules, the field
//! catalog and pointwise evaluation of `(−Δ)^s`.

pub mod field;
pub mod flap;
pub mod radial;
pub mod rules;
pub mod sphere;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub use field::{FieldSpec, Profile, RadialSamples};
pub use flap::{frac_laplacian_at, frac_laplacian_generic, frac_laplacian_power_law, truncation_budget};
pub use radial::{integrate_radial_singular, radial_integral};
pub use rules::{fixed_legendre, gauss_legendre, integrate, AdaptiveOptions, Estimate};

/// Truncation radii, subdivision depth and tolerance shared by every
/// singular integral in the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Radius, relative to the local length scale of the integrand, below
    /// which the symmetrized difference is replaced by its Taylor term.
    pub inner_radius: f64,
    /// Far-field truncation; contributions beyond it are added analytically.
    pub outer_radius: f64,
    /// Bisection limit per initial panel of the adaptive rule.
    pub max_depth: usize,
    pub rel_tol: f64,
    /// Order of the product sphere rules used for non-radial integrands.
    pub angular_order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            inner_radius: 1e-3,
            outer_radius: 1e3,
            max_depth: 30,
            rel_tol: 1e-7,
            angular_order: 16,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.inner_radius > 0.0 && self.inner_radius < self.outer_radius) {
            return domain(format!(
                "need 0 < inner_radius < outer_radius, got {} and {}",
                self.inner_radius, self.outer_radius
            ));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return domain(format!("rel_tol = {} outside (0, 1e-2]", self.rel_tol));
        }
        if self.max_depth < 4 {
            return domain(format!("max_depth = {} below 4", self.max_depth));
        }
        if self.angular_order < 2 {
            return domain(format!("angular_order = {} below 2", self.angular_order));
        }
        Ok(())
    }

    /// Adaptive options at `rel_tol·factor`.
    pub fn adaptive(&self, factor: f64) -> AdaptiveOptions {
        AdaptiveOptions::new(self.rel_tol * factor, 0.0, self.max_depth)
    }

    /// The next level of a refinement study: half the tolerance and a
    /// finer sphere rule.
    pub fn refined(&self) -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: self.rel_tol * 0.5,
            angular_order: self.angular_order * 2,
            ..self.clone()
        }
    }
}
