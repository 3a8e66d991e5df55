//! Half-line integrals `∫₀^∞ g(t) t^p dt` of radial integrands, evaluated in
//! logarithmic coordinates with power-law extrapolation at both ends.

use crate::error::{Error, Result};
use crate::geometry::sphere_area;
use crate::quadrature::field::{FieldSpec, RadialView};
use crate::quadrature::rules::{integrate, AdaptiveOptions, Estimate};
use crate::quadrature::sphere::sphere_mean_power;
use crate::quadrature::QuadratureSpec;

/// What is known about a radial integrand `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialHints {
    /// Radii where g is only finitely smooth.
    pub breakpoints: Vec<f64>,
    /// g vanishes beyond this radius.
    pub support: Option<f64>,
    /// g(t) ~ t^h as t → 0.
    pub head_exponent: f64,
    /// g(t) ~ t^{−d} as t → ∞.
    pub tail_exponent: Option<f64>,
    pub lower_scale: f64,
    pub upper_scale: f64,
}

impl RadialHints {
    pub(crate) fn from_view(view: &RadialView<'_>) -> Self {
        let (lower_scale, upper_scale) = view.scale_range();
        let mut breakpoints = view.breakpoints();
        if let Some(s) = view.support() {
            breakpoints.push(s);
        }
        RadialHints {
            breakpoints,
            support: view.support(),
            head_exponent: view.head_exponent(),
            tail_exponent: view.decay(),
            lower_scale,
            upper_scale,
        }
    }
}

/// `∫₀^∞ g(t) t^p dt`.
///
/// The range `[1e−12·lower_scale, outer_radius·upper_scale]` (or up to the
/// support) is integrated adaptively in `u = ln t`; the two end pieces are
/// added from the power behaviour in `hints`, the far one also to the error.
pub fn radial_integral<F: Fn(f64) -> f64>(g: F, p: f64, hints: &RadialHints, quad: &QuadratureSpec) -> Result<Estimate> {
    radial_integral_with(g, p, hints, quad, &quad.adaptive(1e-2))
}

pub(crate) fn radial_integral_with<F: Fn(f64) -> f64>(
    g: F,
    p: f64,
    hints: &RadialHints,
    quad: &QuadratureSpec,
    opts: &AdaptiveOptions,
) -> Result<Estimate> {
    let head = p + 1.0 + hints.head_exponent;
    if !(head > 0.0) {
        return Err(Error::Divergence(format!(
            "integrand ~ t^{} is not integrable at the origin",
            p + hints.head_exponent
        )));
    }
    let t_hi = match hints.support {
        Some(s) => s,
        None => {
            let Some(d) = hints.tail_exponent else {
                return Err(Error::Divergence("integrand has neither compact support nor a decay rate".into()));
            };
            if !(d > p + 1.0) {
                return Err(Error::Divergence(format!(
                    "integrand ~ t^{} is not integrable at infinity",
                    p - d
                )));
            }
            quad.outer_radius * hints.upper_scale
        }
    };
    let t_lo = (1e-12 * hints.lower_scale).min(1e-6 * t_hi);
    let (u_lo, u_hi) = (t_lo.ln(), t_hi.ln());
    let mut points: Vec<f64> = hints
        .breakpoints
        .iter()
        .filter(|&&b| b > t_lo && b < t_hi)
        .map(|b| b.ln())
        .collect();
    points.push(u_lo);
    points.push(u_hi);
    // panels no longer than two decades
    let step = 100f64.ln();
    let mut u = u_lo + step;
    while u < u_hi {
        points.push(u);
        u += step;
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut est = integrate(|u: f64| {
        let t = u.exp();
        g(t) * (u * (p + 1.0)).exp()
    }, &points, opts)?;
    let head_part = g(t_lo) * t_lo.powf(p + 1.0) / head;
    est.value += head_part;
    est.error += head_part.abs() * 1e-2;
    if hints.support.is_none() {
        let d = hints.tail_exponent.expect("checked above");
        let tail = g(t_hi) * t_hi.powf(p + 1.0) / (d - p - 1.0);
        est.value += tail;
        // corrections to the power behaviour are O((scale/t)²)
        let ratio = hints.upper_scale / t_hi;
        est.error += 10.0 * tail.abs() * ratio * ratio;
    }
    Ok(est)
}

/// `∫_{ℝ^N} f(z)|z|^{−β} dz` for a field built from radial terms.
///
/// Terms centered at the origin reduce to one radial integral; off-center
/// terms use the sphere mean of `|z|^{−β}`.
pub fn integrate_radial_singular(f: &FieldSpec, beta: f64, quad: &QuadratureSpec) -> Result<Estimate> {
    let dim = f.dim();
    let n = dim as f64;
    if !(beta < n) {
        return Err(Error::Divergence(format!("|z|^(-{beta}) is not integrable at the origin in dimension {dim}")));
    }
    quad.validate()?;
    let mut total = Estimate::default();
    for term in f.terms() {
        if term.amplitude == 0.0 {
            continue;
        }
        let view = RadialView::from_term(term);
        let mut hints = RadialHints::from_view(&view);
        let c = term.center.norm();
        let est = if c == 0.0 {
            radial_integral(|t| view.value(t), n - 1.0 - beta, &hints, quad)?.scale(sphere_area(dim))
        } else {
            hints.breakpoints.push(c);
            hints.tail_exponent = hints.tail_exponent.map(|d| d + beta);
            hints.lower_scale = hints.lower_scale.min(c);
            hints.upper_scale = hints.upper_scale.max(c);
            radial_integral(
                |t| view.value(t) * sphere_mean_power(dim, c, t, beta, 0.0).unwrap_or(f64::NAN),
                n - 1.0,
                &hints,
                quad,
            )?
        };
        total = total + est;
    }
    Ok(total)
}
