//! Closed-form kernels: the two-sided heat-kernel comparison profile, its
//! time integral (the Green surrogate), the exponentially weighted resolvent
//! profile, and the exact θ = 0 Riesz kernel.
//!
//! The true heat kernel of the Hardy operator is only known up to two-sided
//! bounds, so everything here works with the comparison profile
//!
//! ```text
//! p̃(t,x,y) = (1 + t^{γ/2s}|x|^{−γ})(1 + t^{γ/2s}|y|^{−γ}) · min(t^{−N/2s}, t/|x−y|^{N+2s})
//! ```
//!
//! and every statement about `G_P` made with it is a comparability
//! statement. Only at θ = 0 is the kernel exact.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::geometry::SpacePoint;
use crate::quadrature::{integrate, QuadratureSpec};
use crate::spectral::{riesz_normalization, ProblemParams};

fn check_pair(x: &SpacePoint, y: &SpacePoint, params: &ProblemParams) -> Result<()> {
    x.check_dim(params.dim())?;
    y.check_dim(params.dim())?;
    x.require_nonzero()?;
    y.require_nonzero()?;
    Ok(())
}

fn check_distinct(x: &SpacePoint, y: &SpacePoint) -> Result<f64> {
    let d = x.distance(y);
    if d == 0.0 {
        return Err(Error::Degenerate("x = y on the kernel diagonal".into()));
    }
    Ok(d)
}

/// Comparison profile `p̃(t, x, y)`. At x = y only the `t^{−N/2s}` branch
/// remains.
pub fn heat_profile(t: f64, x: &SpacePoint, y: &SpacePoint, params: &ProblemParams) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("time t = {t} must be positive"));
    }
    check_pair(x, y, params)?;
    Ok(heat_profile_scalar(t, x.norm(), y.norm(), x.distance(y), params))
}

pub(crate) fn heat_profile_scalar(t: f64, rx: f64, ry: f64, d: f64, params: &ProblemParams) -> f64 {
    let (n, s, g) = (params.n(), params.order(), params.gamma());
    let tg = t.powf(g / (2.0 * s));
    let weight = (1.0 + tg * rx.powf(-g)) * (1.0 + tg * ry.powf(-g));
    let on_diag = t.powf(-n / (2.0 * s));
    let off_diag = if d == 0.0 { f64::INFINITY } else { t * d.powf(-(n + 2.0 * s)) };
    weight * on_diag.min(off_diag)
}

/// Coefficients of the closed-form time integral of the profile.
///
/// Splitting at `t = |x−y|^{2s}` (where the two branches of the minimum
/// cross) gives `I₁ + I₂`, each a sum of three power integrals:
///
/// | term | `I₁` (short time) | `I₂` (long time) |
/// |------|-------------------|------------------|
/// | `|x−y|^{−(N−2s)}` | 1/2 | 2s/(N−2s) |
/// | `(|x|^{−γ}+|y|^{−γ})|x−y|^{−(N−2s−γ)}` | 2s/(γ+4s) | 2s/(N−2s−γ) |
/// | `|x|^{−γ}|y|^{−γ}|x−y|^{−(N−2s−2γ)}` | s/(γ+2s) | 2s/(N−2s−2γ) |
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeIntegralCoefficients {
    pub short_time: [f64; 3],
    pub long_time: [f64; 3],
}

impl TimeIntegralCoefficients {
    pub fn new(params: &ProblemParams) -> Self {
        let (n, s, g) = (params.n(), params.order(), params.gamma());
        TimeIntegralCoefficients {
            short_time: [0.5, 2.0 * s / (g + 4.0 * s), s / (g + 2.0 * s)],
            long_time: [
                2.0 * s / (n - 2.0 * s),
                2.0 * s / (n - 2.0 * s - g),
                2.0 * s / (n - 2.0 * s - 2.0 * g),
            ],
        }
    }

    pub fn combined(&self) -> [f64; 3] {
        [
            self.short_time[0] + self.long_time[0],
            self.short_time[1] + self.long_time[1],
            self.short_time[2] + self.long_time[2],
        ]
    }

    /// Envelope `[min, max]` of `green_time_integral / green_surrogate_product`.
    ///
    /// The closed integral is a positive combination of the three expanded
    /// terms, and the product form is their plain sum.
    pub fn comparability_envelope(&self) -> (f64, f64) {
        let c = self.combined();
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(0.0, f64::max);
        (lo, hi)
    }
}

/// The three terms of the expanded surrogate at (|x|, |y|, |x−y|).
fn expanded_terms(rx: f64, ry: f64, d: f64, params: &ProblemParams) -> [f64; 3] {
    let (n, s, g) = (params.n(), params.order(), params.gamma());
    let (ax, ay) = (rx.powf(-g), ry.powf(-g));
    [
        d.powf(-(n - 2.0 * s)),
        (ax + ay) * d.powf(-(n - 2.0 * s - g)),
        ax * ay * d.powf(-(n - 2.0 * s - 2.0 * g)),
    ]
}

pub(crate) fn green_closed_scalar(rx: f64, ry: f64, d: f64, params: &ProblemParams) -> f64 {
    let c = TimeIntegralCoefficients::new(params).combined();
    let t = expanded_terms(rx, ry, d, params);
    c[0] * t[0] + c[1] * t[1] + c[2] * t[2]
}

pub(crate) fn green_product_scalar(rx: f64, ry: f64, d: f64, params: &ProblemParams) -> f64 {
    let (n, s, g) = (params.n(), params.order(), params.gamma());
    let dg = d.powf(-g);
    // pair the x and y factors first so the result is bitwise symmetric
    d.powf(-(n - 2.0 * s - 2.0 * g)) * ((dg + rx.powf(-g)) * (dg + ry.powf(-g)))
}

/// `∫₀^∞ p̃(t, x, y) dt` in closed form (see [`TimeIntegralCoefficients`]).
pub fn green_time_integral(x: &SpacePoint, y: &SpacePoint, params: &ProblemParams) -> Result<f64> {
    check_pair(x, y, params)?;
    let d = check_distinct(x, y)?;
    Ok(green_closed_scalar(x.norm(), y.norm(), d, params))
}

/// Product form `|x−y|^{−(N−2s−2γ)}(|x−y|^{−γ}+|x|^{−γ})(|x−y|^{−γ}+|y|^{−γ})`.
pub fn green_surrogate_product(x: &SpacePoint, y: &SpacePoint, params: &ProblemParams) -> Result<f64> {
    check_pair(x, y, params)?;
    let d = check_distinct(x, y)?;
    Ok(green_product_scalar(x.norm(), y.norm(), d, params))
}

/// Expanded form: the sum of the three power terms of the product.
pub fn green_surrogate_expanded(x: &SpacePoint, y: &SpacePoint, params: &ProblemParams) -> Result<f64> {
    check_pair(x, y, params)?;
    let d = check_distinct(x, y)?;
    Ok(expanded_terms(x.norm(), y.norm(), d, params).iter().sum())
}

/// All three surrogate evaluations at one pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreenSurrogateEval {
    pub source: SpacePoint,
    pub target: SpacePoint,
    pub product_form: f64,
    pub expanded_form: f64,
    pub closed_time_integral: f64,
}

pub fn green_surrogate(x: &SpacePoint, y: &SpacePoint, params: &ProblemParams) -> Result<GreenSurrogateEval> {
    check_pair(x, y, params)?;
    let d = check_distinct(x, y)?;
    let (rx, ry) = (x.norm(), y.norm());
    Ok(GreenSurrogateEval {
        source: x.clone(),
        target: y.clone(),
        product_form: green_product_scalar(rx, ry, d, params),
        expanded_form: expanded_terms(rx, ry, d, params).iter().sum(),
        closed_time_integral: green_closed_scalar(rx, ry, d, params),
    })
}

/// Time quadrature of the profile weighted by `e^{−αt}`, in log-time
/// coordinates split where the minimum switches branch. `alpha = 0` gives
/// the unweighted integral by quadrature.
pub(crate) fn weighted_time_integral(
    alpha: f64,
    rx: f64,
    ry: f64,
    d: f64,
    params: &ProblemParams,
    quad: &QuadratureSpec,
) -> Result<crate::quadrature::Estimate> {
    let (n, s, g) = (params.n(), params.order(), params.gamma());
    let crossing = d.powf(2.0 * s);
    // t = crossing · e^u
    let integrand = |u: f64| {
        let t = crossing * u.exp();
        heat_profile_scalar(t, rx, ry, d, params) * (-alpha * t).exp() * t
    };
    // Below u = −40 the short-time part is O(e^{−80}) of the total.
    let lower = -40.0;
    // Long-time decay: the slowest power is t^{−(N−2γ)/2s} (times t from dt).
    let slowest = (n - 2.0 * g) / (2.0 * s) - 1.0;
    let mut points = vec![lower, 0.0];
    let tol = quad.rel_tol * 1e-2;
    let mut upper = (1.0 / tol).ln() / slowest;
    if alpha > 0.0 {
        let u_alpha = (1.0 / (alpha * crossing)).ln();
        if u_alpha > 0.0 {
            points.push(u_alpha);
        }
        // e^{−αt} below tol beyond t = ln(1/tol)/α
        let u_cut = ((1.0 / tol).ln() / (alpha * crossing)).ln() + 1.0;
        upper = upper.min(u_cut.max(1.0));
    }
    upper = upper.max(points.last().copied().unwrap_or(0.0) + 1.0);
    points.push(upper);
    let mut est = integrate(integrand, &points, &quad.adaptive(1e-2))?;
    // profile beyond the cut, bounded without the exponential factor
    let t_max = crossing * upper.exp();
    let c = TimeIntegralCoefficients::new(params).long_time;
    let terms = [
        t_max.powf(1.0 - n / (2.0 * s)),
        (rx.powf(-g) + ry.powf(-g)) * t_max.powf(1.0 - (n - g) / (2.0 * s)),
        rx.powf(-g) * ry.powf(-g) * t_max.powf(1.0 - (n - 2.0 * g) / (2.0 * s)),
    ];
    let tail: f64 = c.iter().zip(&terms).map(|(c, t)| c * t).sum::<f64>() * (-alpha * t_max).exp();
    est.error += tail;
    Ok(est)
}

/// Fixed-rule counterpart of [`weighted_time_integral`] for use inside
/// potential integrals: Gauss–Legendre panels of unit width in log time.
pub(crate) fn resolvent_fixed(alpha: f64, rx: f64, ry: f64, d: f64, params: &ProblemParams) -> f64 {
    let (n, s, g) = (params.n(), params.order(), params.gamma());
    let crossing = d.powf(2.0 * s);
    let rate = (n - 2.0 * g) / (2.0 * s) - 1.0;
    let mut upper = 40.0 / rate;
    if alpha > 0.0 {
        upper = upper.min((40.0 / (alpha * crossing)).ln().max(0.0) + 1.0);
    }
    let rule = crate::quadrature::gauss_legendre(8);
    let mut acc = 0.0;
    let mut a = -40.0;
    while a < upper {
        let b = (a + 1.0).min(upper);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        for (x, w) in rule.0.iter().zip(&rule.1) {
            let t = crossing * (c + h * x).exp();
            acc += w * h * heat_profile_scalar(t, rx, ry, d, params) * (-alpha * t).exp() * t;
        }
        a = b;
    }
    acc
}

/// `∫₀^∞ e^{−αt} p̃(t, x, y) dt`, the kernel-level resolvent weight.
///
/// Decreasing in α and tending to [`green_time_integral`] as α → 0+.
pub fn resolvent_profile_integral(
    alpha: f64,
    x: &SpacePoint,
    y: &SpacePoint,
    params: &ProblemParams,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !(alpha > 0.0) {
        return domain(format!("resolvent parameter α = {alpha} must be positive"));
    }
    check_pair(x, y, params)?;
    let d = check_distinct(x, y)?;
    weighted_time_integral(alpha, x.norm(), y.norm(), d, params, quad).map(|e| e.value)
}

/// Numerical `∫₀^∞ p̃ dt`, the quadrature counterpart of
/// [`green_time_integral`].
pub fn green_time_quadrature(
    x: &SpacePoint,
    y: &SpacePoint,
    params: &ProblemParams,
    quad: &QuadratureSpec,
) -> Result<crate::quadrature::Estimate> {
    check_pair(x, y, params)?;
    let d = check_distinct(x, y)?;
    weighted_time_integral(0.0, x.norm(), y.norm(), d, params, quad)
}

/// Exact θ = 0 Green function `a(N,s)|x−y|^{2s−N}`.
///
/// Depends only on x − y, so unlike the surrogates the origin is allowed.
pub fn riesz_kernel(x: &SpacePoint, y: &SpacePoint, params: &ProblemParams) -> Result<f64> {
    x.check_dim(params.dim())?;
    y.check_dim(params.dim())?;
    let d = check_distinct(x, y)?;
    Ok(riesz_normalization(params.dim(), params.order())? * d.powf(2.0 * params.order() - params.n()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p3() -> ProblemParams {
        ProblemParams::from_gamma(3, 0.5, 0.25).unwrap()
    }

    fn pt(c: &[f64]) -> SpacePoint {
        SpacePoint::new(c.to_vec())
    }

    #[test]
    fn fixed_resolvent_rule_matches_adaptive() {
        let p = p3();
        for &(alpha, rx, ry, d) in &[(1.0, 1.0, 2.0, 1.5), (1e-3, 0.1, 1.0, 1.05), (10.0, 2.0, 0.5, 2.2)] {
            let fixed = resolvent_fixed(alpha, rx, ry, d, &p);
            let adaptive = weighted_time_integral(alpha, rx, ry, d, &p, &QuadratureSpec::default()).unwrap().value;
            assert!((fixed - adaptive).abs() < 1e-6 * adaptive, "{fixed} {adaptive}");
        }
    }

    #[test]
    fn profile_switches_branch_at_crossing() {
        let p = p3();
        let (x, y) = (pt(&[1.0, 0.0, 0.0]), pt(&[0.0, 2.0, 0.0]));
        let d = x.distance(&y);
        let t = d.powf(2.0 * p.order());
        let w = |t: f64| {
            let tg = t.powf(p.gamma() / (2.0 * p.order()));
            (1.0 + tg) * (1.0 + tg * 2f64.powf(-p.gamma()))
        };
        let below = heat_profile(t * 0.999, &x, &y, &p).unwrap() / w(t * 0.999);
        let above = heat_profile(t * 1.001, &x, &y, &p).unwrap() / w(t * 1.001);
        // below the crossing the t/|x−y|^{N+2s} branch is active
        assert!((below - t * 0.999 * d.powf(-4.0)).abs() < 1e-14 * below);
        assert!((above - (t * 1.001).powf(-3.0)).abs() < 1e-14 * above);
    }

    #[test]
    fn profile_at_gamma_zero_has_weight_four() {
        let p = ProblemParams::riesz(3, 0.5).unwrap();
        let (x, y) = (pt(&[1.0, 0.0, 0.0]), pt(&[0.5, 0.5, 0.0]));
        let d = x.distance(&y);
        for t in [0.01, 0.3, 4.0] {
            let v = heat_profile(t, &x, &y, &p).unwrap();
            let want = 4.0 * t.powf(-3.0).min(t * d.powf(-4.0));
            assert!((v - want).abs() < 1e-14 * want);
        }
    }

    #[test]
    fn profile_reference_point() {
        // |x| = |y| = |x−y| = 1, t = 1: weight (1+1)², min(1, 1) = 1.
        let p = p3();
        let x = pt(&[1.0, 0.0, 0.0]);
        let y = pt(&[0.5, 0.75f64.sqrt(), 0.0]);
        let v = heat_profile(1.0, &x, &y, &p).unwrap();
        assert!((v - 4.0).abs() < 1e-13);
        let v = heat_profile(2.0, &x, &y, &p).unwrap();
        let w = 1.0 + 2f64.powf(0.25);
        assert!((v - w * w * 2f64.powf(-3.0)).abs() < 1e-13);
    }

    #[test]
    fn profile_diagonal_and_errors() {
        let p = p3();
        let x = pt(&[1.0, 1.0, 0.0]);
        let v = heat_profile(2.0, &x, &x, &p).unwrap();
        assert!(v.is_finite() && v > 0.0);
        assert!(heat_profile(0.0, &x, &x, &p).is_err());
        assert_eq!(heat_profile(1.0, &SpacePoint::origin(3), &x, &p), Err(Error::Origin));
    }

    #[test]
    fn surrogate_special_values() {
        let x = pt(&[1.0, 0.0, 0.0]);
        let y = pt(&[0.5, 0.75f64.sqrt(), 0.0]);
        assert!((green_surrogate_product(&x, &y, &p3()).unwrap() - 4.0).abs() < 1e-13);
        let r = ProblemParams::riesz(3, 0.5).unwrap();
        let y2 = pt(&[0.0, 3.0, 0.0]);
        let d = x.distance(&y2);
        let v = green_surrogate_product(&x, &y2, &r).unwrap();
        assert!((v - 4.0 * d.powf(-2.0)).abs() < 1e-14);
        assert!(matches!(green_time_integral(&x, &x, &r), Err(Error::Degenerate(_))));
    }

    #[test]
    fn closed_integral_matches_time_quadrature() {
        let p = p3();
        let q = QuadratureSpec::default();
        for (x, y) in [
            (pt(&[1.0, 0.0, 0.0]), pt(&[0.0, 2.0, 0.0])),
            (pt(&[0.01, 0.0, 0.0]), pt(&[0.0, 0.02, 0.0])),
            (pt(&[5.0, 1.0, -2.0]), pt(&[-3.0, 0.5, 0.1])),
        ] {
            let closed = green_time_integral(&x, &y, &p).unwrap();
            let numeric = green_time_quadrature(&x, &y, &p, &q).unwrap();
            assert!(((closed - numeric.value) / closed).abs() < 1e-8, "{closed} {numeric:?}");
        }
    }

    #[test]
    fn resolvent_limits() {
        let p = p3();
        let q = QuadratureSpec::default();
        let (x, y) = (pt(&[1.0, 0.0, 0.0]), pt(&[0.0, 0.7, 0.2]));
        let g = green_time_integral(&x, &y, &p).unwrap();
        let small = resolvent_profile_integral(1e-8, &x, &y, &p, &q).unwrap();
        assert!(((small - g) / g).abs() < 1e-4);
        let mut prev = f64::INFINITY;
        for a in [1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0] {
            let v = resolvent_profile_integral(a, &x, &y, &p, &q).unwrap();
            assert!(v < prev && v > 0.0);
            prev = v;
        }
        assert!(resolvent_profile_integral(0.0, &x, &y, &p, &q).is_err());
    }

    #[test]
    fn riesz_kernel_shape() {
        let p = ProblemParams::riesz(3, 0.5).unwrap();
        let (x, y) = (pt(&[1.0, 2.0, 0.0]), pt(&[0.0, 0.0, 1.0]));
        let v = riesz_kernel(&x, &y, &p).unwrap();
        assert!((v - 1.0 / (2.0 * PI * PI * 6.0)).abs() < 1e-15);
        let shift = pt(&[0.3, -1.0, 2.0]);
        let moved = riesz_kernel(&x.add(&shift), &y.add(&shift), &p).unwrap();
        assert!((moved - v).abs() < 1e-15);
        let scaled = riesz_kernel(&x.scaled(2.0), &y.scaled(2.0), &p).unwrap();
        assert!((scaled - v * 2f64.powf(-2.0)).abs() < 1e-15);
        // the origin is a regular point of the Riesz kernel
        assert!(riesz_kernel(&SpacePoint::origin(3), &y, &p).is_ok());
    }

    #[test]
    fn blow_up() {
        let p = p3();
        let y = pt(&[1.0, 0.0, 0.0]);
        let near = pt(&[1.0 + 1e-6, 0.0, 0.0]);
        let far = pt(&[2.0, 0.0, 0.0]);
        assert!(green_surrogate_product(&near, &y, &p).unwrap() > 1e10);
        assert!(green_surrogate_product(&far, &y, &p).unwrap() < 10.0);
        let g0 = green_surrogate_product(&pt(&[1e-3, 0.0, 0.0]), &y, &p).unwrap();
        let g1 = green_surrogate_product(&pt(&[1e-9, 0.0, 0.0]), &y, &p).unwrap();
        assert!(g1 > g0);
    }
}
