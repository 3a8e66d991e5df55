//! Gamma-function constants of the fractional Hardy operator
//! `(−Δ)^s − θ|x|^{−2s}` and the bijection between the Hardy strength θ and
//! the singular exponent γ.
//!
//! Every Gamma ratio is formed as a difference of log-Gammas so that large
//! dimensions do not overflow.

pub mod gamma;
mod roots;

use std::f64::consts::PI;

use serde::Serialize;

pub use gamma::{gamma, gamma_sign, ln_gamma_signed, log_gamma};
pub use roots::{brent, Root};

use crate::error::{domain, Error, Result};

fn check_order(order: f64) -> Result<()> {
    if !(order > 0.0 && order < 1.0) {
        return domain(format!("order s = {order} must lie in (0, 1)"));
    }
    Ok(())
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return domain("dimension N must be at least 1");
    }
    Ok(())
}

fn check_subcritical(dim: usize, order: f64) -> Result<()> {
    check_dim(dim)?;
    check_order(order)?;
    if (dim as f64) <= 2.0 * order {
        return domain(format!("need N > 2s, got N = {dim}, s = {order}"));
    }
    Ok(())
}

/// Normalizing constant `c_{N,s} = 4^s Γ(N/2 + s) / (π^{N/2} |Γ(−s)|)` of the
/// singular-integral form of `(−Δ)^s`.
pub fn frac_laplacian_normalizer(dim: usize, order: f64) -> Result<f64> {
    check_dim(dim)?;
    check_order(order)?;
    let n = dim as f64;
    let ln = order * 4f64.ln() + log_gamma(n / 2.0 + order)? - 0.5 * n * PI.ln() - log_gamma(-order)?;
    Ok(ln.exp())
}

/// Sharp Hardy constant `Λ_{N,s} = 4^s Γ²((N+2s)/4) / Γ²((N−2s)/4)`.
pub fn sharp_hardy_constant(dim: usize, order: f64) -> Result<f64> {
    check_subcritical(dim, order)?;
    let n = dim as f64;
    let ln = order * 4f64.ln()
        + 2.0 * (log_gamma((n + 2.0 * order) / 4.0)? - log_gamma((n - 2.0 * order) / 4.0)?);
    Ok(ln.exp())
}

/// Upper end `(N − 2s)/2` of the admissible γ range.
pub fn critical_gamma(dim: usize, order: f64) -> f64 {
    (dim as f64 - 2.0 * order) / 2.0
}

/// Hardy strength θ corresponding to the exponent γ ∈ (0, (N−2s)/2].
pub fn theta_of_gamma(gamma: f64, dim: usize, order: f64) -> Result<f64> {
    check_subcritical(dim, order)?;
    let n = dim as f64;
    let top = critical_gamma(dim, order);
    if !(gamma > 0.0 && gamma <= top) {
        return domain(format!("γ = {gamma} outside (0, {top}]"));
    }
    let ln = order * 4f64.ln() + log_gamma((gamma + 2.0 * order) / 2.0)? + log_gamma((n - gamma) / 2.0)?
        - log_gamma((n - gamma - 2.0 * order) / 2.0)?
        - log_gamma(gamma / 2.0)?;
    Ok(ln.exp())
}

/// Inverts [`theta_of_gamma`] on the open range θ ∈ (0, Λ_{N,s}).
pub fn gamma_of_theta(theta: f64, dim: usize, order: f64) -> Result<f64> {
    let lambda = sharp_hardy_constant(dim, order)?;
    if !(theta > 0.0 && theta < lambda) {
        return domain(format!("θ = {theta} outside (0, Λ = {lambda})"));
    }
    let top = critical_gamma(dim, order);
    let eps = 1e-12 * (dim as f64 - 2.0 * order);
    let f = |g: f64| theta_of_gamma(g, dim, order).map(|t| t - theta).unwrap_or(f64::NAN);
    let root = brent(f, eps, top - eps, 0.0, 8, 200)?;
    if !(root.residual.abs() <= 1e-12 * lambda) {
        return Err(Error::Convergence(format!(
            "γ(θ = {theta}) residual {:e} above 1e-12·Λ",
            root.residual
        )));
    }
    Ok(root.x)
}

/// Constant `a(N,s) = Γ(N/2 − s) / (4^s π^{N/2} Γ(s))` of the Riesz kernel
/// `a(N,s)|x|^{2s−N}`, the fundamental solution of `(−Δ)^s`.
pub fn riesz_normalization(dim: usize, order: f64) -> Result<f64> {
    check_subcritical(dim, order)?;
    let n = dim as f64;
    let ln = log_gamma(n / 2.0 - order)? - order * 4f64.ln() - 0.5 * n * PI.ln() - log_gamma(order)?;
    Ok(ln.exp())
}

/// Multiplier `m(α)` in `(−Δ)^s |x|^{−α} = m(α) |x|^{−α−2s}` on ℝ^N ∖ {0},
///
/// `m(α) = 4^s Γ((N−α)/2) Γ((α+2s)/2) / (Γ(α/2) Γ((N−α−2s)/2))`, α ∈ (0, N).
///
/// Positive for α < N − 2s, zero at α = N − 2s, negative above. For
/// α = N − 2s − γ it equals `theta_of_gamma(γ)`.
pub fn power_law_multiplier(alpha: f64, dim: usize, order: f64) -> Result<f64> {
    check_subcritical(dim, order)?;
    let n = dim as f64;
    if !(alpha > 0.0 && alpha < n) {
        return domain(format!("power-law exponent α = {alpha} outside (0, {n})"));
    }
    let last = (n - alpha - 2.0 * order) / 2.0;
    if last == last.floor() && last <= 0.0 {
        // 1/Γ vanishes at its poles
        return Ok(0.0);
    }
    let (ln_last, sign) = ln_gamma_signed(last)?;
    let ln = order * 4f64.ln() + log_gamma((n - alpha) / 2.0)? + log_gamma((alpha + 2.0 * order) / 2.0)?
        - log_gamma(alpha / 2.0)?
        - ln_last;
    Ok(sign * ln.exp())
}

/// The triple (N, s, θ) together with every derived constant.
///
/// θ = 0 is admitted as the Riesz endpoint (γ = 0), where the Green function
/// is known exactly; otherwise θ must lie strictly below Λ_{N,s}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemParams {
    dim: usize,
    order: f64,
    hardy_strength: f64,
    exponent_gamma: f64,
    sharp_constant: f64,
    normalizer: f64,
    sobolev_exponent: f64,
}

impl ProblemParams {
    pub fn new(dim: usize, order: f64, theta: f64) -> Result<Self> {
        check_subcritical(dim, order)?;
        let sharp = sharp_hardy_constant(dim, order)?;
        if !(theta >= 0.0 && theta < sharp) {
            return domain(format!("θ = {theta} must satisfy 0 ≤ θ < Λ_{{N,s}} = {sharp}"));
        }
        let gamma = if theta == 0.0 {
            0.0
        } else {
            gamma_of_theta(theta, dim, order)?
        };
        Self::assemble(dim, order, theta, gamma, sharp)
    }

    /// Builds the parameters from γ ∈ [0, (N−2s)/2) instead of θ.
    pub fn from_gamma(dim: usize, order: f64, gamma: f64) -> Result<Self> {
        check_subcritical(dim, order)?;
        let top = critical_gamma(dim, order);
        if !(gamma >= 0.0 && gamma < top) {
            return domain(format!("γ = {gamma} must satisfy 0 ≤ γ < (N−2s)/2 = {top}"));
        }
        let sharp = sharp_hardy_constant(dim, order)?;
        let theta = if gamma == 0.0 {
            0.0
        } else {
            theta_of_gamma(gamma, dim, order)?
        };
        Self::assemble(dim, order, theta, gamma, sharp)
    }

    /// The θ = 0 parameters, where P reduces to `(−Δ)^s`.
    pub fn riesz(dim: usize, order: f64) -> Result<Self> {
        Self::new(dim, order, 0.0)
    }

    fn assemble(dim: usize, order: f64, theta: f64, gamma: f64, sharp: f64) -> Result<Self> {
        let n = dim as f64;
        Ok(ProblemParams {
            dim,
            order,
            hardy_strength: theta,
            exponent_gamma: gamma,
            sharp_constant: sharp,
            normalizer: frac_laplacian_normalizer(dim, order)?,
            sobolev_exponent: 2.0 * n / (n - 2.0 * order),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The fractional order s.
    pub fn order(&self) -> f64 {
        self.order
    }

    /// θ.
    pub fn theta(&self) -> f64 {
        self.hardy_strength
    }

    /// γ.
    pub fn gamma(&self) -> f64 {
        self.exponent_gamma
    }

    /// Λ_{N,s}.
    pub fn sharp_constant(&self) -> f64 {
        self.sharp_constant
    }

    /// c_{N,s}.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// 2N/(N − 2s).
    pub fn sobolev_exponent(&self) -> f64 {
        self.sobolev_exponent
    }

    pub fn is_riesz(&self) -> bool {
        self.hardy_strength == 0.0
    }

    /// Exponent N − 2s − γ of the homogeneous solution |x|^{−(N−2s−γ)}.
    pub fn homogeneous_exponent(&self) -> f64 {
        self.dim as f64 - 2.0 * self.order - self.exponent_gamma
    }

    pub(crate) fn n(&self) -> f64 {
        self.dim as f64
    }
}
