//! Pointwise `(−Δ)^s u(x) = c_{N,s} P.V.∫ (u(x) − u(y))|x−y|^{−N−2s} dy`.
//!
//! Around x the integral is split at a radius δ. Inside, the symmetrized
//! second difference `2u(x) − u(x+z) − u(x−z)` removes the principal value;
//! below `inner_radius·scale` it is replaced by its Taylor term `−(z·∇)²u`.
//! Outside, `u(x)` integrates in closed form against the kernel and the
//! remainder `∫_{|z|>δ} u(x+z)|z|^{−N−2s}` is a one-dimensional integral
//! against the truncated sphere kernel for radial u, or a product sphere
//! rule otherwise.

use crate::error::{Error, Result};
use crate::geometry::{sphere_area, SpacePoint};
use crate::quadrature::field::{FieldSpec, Profile, RadialSamples, RadialView};

use rayon::prelude::*;
use crate::quadrature::radial::{radial_integral_with, RadialHints};
use crate::quadrature::rules::{fixed_legendre, integrate, AdaptiveOptions, Estimate};
use crate::quadrature::sphere::{sphere_mean_power, sphere_rule};
use crate::quadrature::QuadratureSpec;
use crate::spectral::{frac_laplacian_normalizer, power_law_multiplier, ProblemParams};

fn check_inputs(u: &FieldSpec, x: &SpacePoint, params: &ProblemParams, quad: &QuadratureSpec) -> Result<()> {
    if u.dim() != params.dim() {
        return Err(Error::Dimension {
            expected: params.dim(),
            got: u.dim(),
        });
    }
    x.check_dim(params.dim())?;
    quad.validate()
}

/// `(−Δ)^s u(x)` with an error estimate.
///
/// Terms sharing a center are evaluated together by the radial reduction
/// and the contributions of distinct centers are summed.
pub fn frac_laplacian_at(
    u: &FieldSpec,
    x: &SpacePoint,
    params: &ProblemParams,
    quad: &QuadratureSpec,
) -> Result<Estimate> {
    check_inputs(u, x, params, quad)?;
    let groups = u.center_groups();
    let mut total = Estimate::default();
    for g in &groups {
        let view = g.as_radial().expect("grouped by center");
        total = total + radial_flap(&view, x.distance(view.center), params.dim(), params.order(), quad)?;
    }
    Ok(total)
}

/// Spherical second difference
/// `∫_{S^{N−1}} (2f(r) − f(|x+ρω|) − f(|x−ρω|)) dω` at |x| = r.
pub(crate) fn sphere_second_difference(view: &RadialView<'_>, r: f64, rho: f64, dim: usize, breakpoints: &[f64]) -> f64 {
    let fr = view.value(r);
    if dim == 1 {
        return 2.0 * ((fr - view.value(r + rho)) + (fr - view.value((r - rho).abs())));
    }
    if r == 0.0 {
        return 2.0 * sphere_area(dim) * (fr - view.value(rho));
    }
    let mut cuts = vec![0.0, std::f64::consts::PI];
    for &b in breakpoints {
        let c = (b * b - r * r - rho * rho) / (2.0 * r * rho);
        if c.abs() < 1.0 {
            cuts.push(c.acos());
        }
    }
    cuts.sort_by(f64::total_cmp);
    let nodes = if cuts.len() == 2 { 48 } else { 24 };
    let m = dim as i32 - 2;
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        acc += fixed_legendre(
            |psi| {
                let d2 = r * r + rho * rho + 2.0 * r * rho * psi.cos();
                (fr - view.value(d2.max(0.0).sqrt())) * psi.sin().powi(m)
            },
            w[0],
            w[1],
            nodes,
        );
    }
    2.0 * sphere_area(dim - 1) * acc
}

pub(crate) fn radial_flap(view: &RadialView<'_>, r: f64, dim: usize, s: f64, quad: &QuadratureSpec) -> Result<Estimate> {
    if view.is_empty() {
        return Ok(Estimate::exact(0.0));
    }
    if r == 0.0 && view.singular_at_origin() {
        return Err(Error::Singularity(
            "power law evaluated at its singular point; use frac_laplacian_power_law".into(),
        ));
    }
    let n = dim as f64;
    let c = frac_laplacian_normalizer(dim, s)?;
    let area = sphere_area(dim);
    let lambda = n + 2.0 * s;
    let ell = view.scale_at(r);
    let delta = 0.25 * if view.singular_at_origin() { ell.min(r) } else { ell };
    let rho0 = (quad.inner_radius * ell).min(0.5 * delta);
    let jet = view.jet(r);

    // far field: f(r)∫_{|z|>δ}|z|^{−N−2s} − ∫_{|z|>δ} f(|x+z|)|z|^{−N−2s}
    let mut hints = RadialHints::from_view(view);
    hints
        .breakpoints
        .extend([r - delta, r, r + delta, delta - r].into_iter().filter(|&b| b > 0.0));
    hints.tail_exponent = hints.tail_exponent.map(|d| d + lambda);
    hints.lower_scale = hints.lower_scale.min(delta);
    hints.upper_scale = hints.upper_scale.max(r + delta);
    let opts = quad.adaptive(1e-2);
    let far = radial_integral_with(
        |t| {
            let f = view.value(t);
            if f == 0.0 {
                0.0
            } else {
                f * sphere_mean_power(dim, r, t, lambda, delta).unwrap_or(f64::NAN)
            }
        },
        n - 1.0,
        &hints,
        quad,
        &opts,
    )?;
    let local = jet.value * area * delta.powf(-2.0 * s) / (2.0 * s);

    let taylor = -area * jet.laplacian(dim) / n * rho0.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    let taylor_err = taylor.abs() * (rho0 / ell).powi(2);

    let mut breakpoints = view.breakpoints();
    if let Some(sup) = view.support() {
        breakpoints.push(sup);
    }
    let mut points = vec![rho0.ln(), delta.ln()];
    for &b in &breakpoints {
        for rho in [(r - b).abs(), r + b] {
            if rho > rho0 && rho < delta {
                points.push(rho.ln());
            }
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let magnitude = local.abs() + far.value.abs() + taylor.abs();
    let near_opts = AdaptiveOptions::new(opts.rel_tol, (opts.rel_tol * magnitude).max(f64::MIN_POSITIVE), opts.max_depth);
    let near = integrate(
        |v: f64| {
            let rho = v.exp();
            rho.powf(-2.0 * s) * sphere_second_difference(view, r, rho, dim, &breakpoints)
        },
        &points,
        &near_opts,
    )?;

    let value = 0.5 * (taylor + near.value) + local - far.value;
    let error = 0.5 * (near.error + taylor_err) + far.error + 4.0 * f64::EPSILON * local.abs();
    Ok(Estimate::new(c * value, c * error))
}

/// `(−Δ)^s` of one radial group tabulated on [0, ∞) for spline lookup:
/// uniform up to `reach`, then geometric out to `1e3·reach`.
pub(crate) fn flap_table(
    view: &RadialView<'_>,
    reach: f64,
    dim: usize,
    s: f64,
    decay: f64,
    quad: &QuadratureSpec,
) -> Result<RadialSamples> {
    let mut radii: Vec<f64> = (0..=800).map(|i| reach * i as f64 / 800.0).collect();
    let mut r = reach;
    while r < 1e3 * reach {
        r *= 1.05;
        radii.push(r);
    }
    let values: Vec<f64> = radii
        .par_iter()
        .map(|&t| radial_flap(view, t, dim, s, quad).map(|e| e.value))
        .collect::<Result<_>>()?;
    RadialSamples::new(radii, values, Some(decay))
}

/// `(−Δ)^s u(x)` by a product sphere rule around x, valid for any field in
/// dimensions 1 to 3. Slower and less accurate than [`frac_laplacian_at`];
/// kept as an independent cross-check.
pub fn frac_laplacian_generic(
    u: &FieldSpec,
    x: &SpacePoint,
    params: &ProblemParams,
    quad: &QuadratureSpec,
) -> Result<Estimate> {
    check_inputs(u, x, params, quad)?;
    if u.is_zero() {
        return Ok(Estimate::exact(0.0));
    }
    let dim = params.dim();
    let (n, s) = (dim as f64, params.order());
    let rule = sphere_rule(dim, quad.angular_order)?;
    let c = frac_laplacian_normalizer(dim, s)?;
    let area = sphere_area(dim);
    let xc = x.coords();

    let mut ell = f64::INFINITY;
    let mut upper = 0.0f64;
    let mut points = Vec::new();
    let mut tail = 0.0;
    for term in u.terms() {
        let r = x.distance(&term.center);
        if r == 0.0 && term.profile.singular_at_origin() {
            return Err(Error::Singularity("power law evaluated at its singular point".into()));
        }
        let scale = term.profile.scale_at(r);
        ell = ell.min(if term.profile.singular_at_origin() { scale.min(r) } else { scale });
        let mut bps = term.profile.breakpoints();
        bps.extend(term.profile.support());
        for b in bps {
            points.extend([(r - b).abs(), r + b]);
        }
        points.push(r);
        let (_, hi) = term.profile.scale_range();
        upper = upper.max(hi + r);
        if term.profile.support().is_none() {
            let d = term.profile.decay().expect("non-compact profiles decay");
            let big_r = quad.outer_radius * upper.max(1.0);
            tail += term.amplitude * area * term.profile.value(big_r) * big_r.powf(-2.0 * s) / (d + 2.0 * s);
        }
    }
    let delta = 0.25 * ell;
    let rho0 = quad.inner_radius * ell;
    let big_r = quad.outer_radius * upper.max(1.0);
    let u0 = u.value(x);

    let shifted = |rho: f64, omega: &[f64], sign: f64| -> f64 {
        let y: Vec<f64> = xc.iter().zip(omega).map(|(a, w)| a + sign * rho * w).collect();
        u.value_at(&y)
    };
    let second = |rho: f64| -> f64 {
        rule.iter()
            .map(|(w, q)| q * (2.0 * u0 - shifted(rho, w, 1.0) - shifted(rho, w, -1.0)))
            .sum()
    };
    let mean = |rho: f64| -> f64 { rule.iter().map(|(w, q)| q * shifted(rho, w, 1.0)).sum() };

    let taylor = -area * u.laplacian(x) / n * rho0.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    let local = u0 * area * delta.powf(-2.0 * s) / (2.0 * s);
    let opts = quad.adaptive(1e-1);
    let abs = opts.rel_tol * (local.abs() + u.sup_norm().min(1e300) * area * delta.powf(-2.0 * s));

    let mut near_pts: Vec<f64> = points.iter().filter(|&&p| p > rho0 && p < delta).map(|p| p.ln()).collect();
    near_pts.extend([rho0.ln(), delta.ln()]);
    near_pts.sort_by(f64::total_cmp);
    near_pts.dedup();
    let near = integrate(
        |v: f64| {
            let rho = v.exp();
            rho.powf(-2.0 * s) * second(rho)
        },
        &near_pts,
        &AdaptiveOptions::new(opts.rel_tol, abs.max(f64::MIN_POSITIVE), opts.max_depth),
    )?;

    let mut far_pts: Vec<f64> = points.iter().filter(|&&p| p > delta && p < big_r).map(|p| p.ln()).collect();
    far_pts.extend([delta.ln(), big_r.ln()]);
    let step = 10f64.ln();
    let mut v = delta.ln() + step;
    while v < big_r.ln() {
        far_pts.push(v);
        v += step;
    }
    far_pts.sort_by(f64::total_cmp);
    far_pts.dedup();
    let far = integrate(
        |v: f64| {
            let rho = v.exp();
            rho.powf(-2.0 * s) * mean(rho)
        },
        &far_pts,
        &AdaptiveOptions::new(opts.rel_tol, abs.max(f64::MIN_POSITIVE), opts.max_depth),
    )?;

    let value = 0.5 * (taylor + near.value) + local - far.value - tail;
    let error = 0.5 * (near.error + taylor.abs() * 1e-3) + far.error + 1e-2 * tail.abs();
    Ok(Estimate::new(c * value, c * error))
}

/// Closed form `(−Δ)^s|x|^{−α} = m(α)|x|^{−α−2s}` for 0 < α < N, where the
/// multiplier m(α) is θ(γ) at γ = N − 2s − α.
pub fn frac_laplacian_power_law(alpha: f64, x: &SpacePoint, params: &ProblemParams) -> Result<f64> {
    x.check_dim(params.dim())?;
    x.require_nonzero()?;
    let m = power_law_multiplier(alpha, params.dim(), params.order())?;
    Ok(m * x.norm().powf(-alpha - 2.0 * params.order()))
}

/// Bound on `|(−Δ)^s(u_pure − u)(x)|` for a truncated power law u, where
/// u_pure is the untruncated power law with the same amplitude.
///
/// Requires inner_cut < |x| < outer_cut. Inside B_a the integrand is
/// bounded with |x − y| ≥ |x| − a; outside B_b with |x−y| ≥ |y|(1 − |x|/b).
pub fn truncation_budget(u: &FieldSpec, x: &SpacePoint, params: &ProblemParams) -> Result<f64> {
    x.check_dim(params.dim())?;
    let [term] = u.terms() else {
        return Err(Error::Domain("truncation budget needs a single truncated power law".into()));
    };
    let Profile::TruncatedPowerLaw(t) = &term.profile else {
        return Err(Error::Domain("truncation budget needs a truncated power law".into()));
    };
    let r = x.distance(&term.center);
    let (a, b) = (t.inner_cut, t.outer_cut);
    if !(r > a && r < b) {
        return Err(Error::Domain(format!("|x| = {r} outside the truncation window ({a}, {b})")));
    }
    let dim = params.dim();
    let (n, s) = (dim as f64, params.order());
    let lambda = n + 2.0 * s;
    let area = sphere_area(dim);
    let alpha = t.exponent;
    let inner = (r - a).powf(-lambda) * area * t.inner_defect_bound(dim);
    let outer = (1.0 - r / b).powf(-lambda) * area * b.powf(-alpha - 2.0 * s) / (alpha + 2.0 * s);
    let taper = t.taper_max() * b.powf(-alpha) * (b - r).powf(-lambda) * area * ((2.0 * b).powf(n) - b.powf(n)) / n;
    Ok(frac_laplacian_normalizer(dim, s)? * term.amplitude.abs() * (inner + outer + taper))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn zero_field() {
        let p = ProblemParams::riesz(3, 0.5).unwrap();
        let x = SpacePoint::new(vec![0.3, 0.0, 0.1]);
        let v = frac_laplacian_at(&FieldSpec::zero(3), &x, &p, &quad()).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn bubble_closed_form() {
        // (−Δ)^s(1+|x|²)^{−(N−2s)/2} = 4^s Γ((N+2s)/2)/Γ((N−2s)/2)·(1+|x|²)^{−(N+2s)/2}
        use crate::spectral::gamma::gamma;
        for &(dim, s) in &[(3usize, 0.5), (2, 0.4), (1, 0.25), (4, 0.75), (3, 0.2)] {
            let p = ProblemParams::riesz(dim, s).unwrap();
            let n = dim as f64;
            let k = 4f64.powf(s) * gamma((n + 2.0 * s) / 2.0).unwrap() / gamma((n - 2.0 * s) / 2.0).unwrap();
            let u = FieldSpec::bubble(dim, s);
            for r in [0.0, 0.4, 1.0, 3.0, 20.0] {
                let x = SpacePoint::on_axis(dim, r);
                let got = frac_laplacian_at(&u, &x, &p, &quad()).unwrap();
                let want = k * (1.0 + r * r).powf(-(n + 2.0 * s) / 2.0);
                assert!((got.value - want).abs() < 1e-6 * want, "N={dim} s={s} r={r}: {} vs {want}", got.value);
                assert!(got.error < 1e-5 * want, "error {} at r={r}", got.error);
            }
        }
    }

    #[test]
    fn compact_bump_decays_like_kernel() {
        // outside the support (−Δ)^s f < 0 and |(−Δ)^s f| ~ C|x|^{−N−2s}; C depends on f
        for &(dim, s) in &[(3usize, 0.5), (2, 0.4), (1, 0.25)] {
            let p = ProblemParams::riesz(dim, s).unwrap();
            let f = FieldSpec::bump(SpacePoint::origin(dim), 1.0).unwrap();
            let radii = [8.0, 16.0, 32.0, 64.0];
            let logs: Vec<(f64, f64)> = radii
                .iter()
                .map(|&r| {
                    let v = frac_laplacian_at(&f, &SpacePoint::on_axis(dim, r), &p, &quad()).unwrap().value;
                    assert!(v < 0.0);
                    (r.ln(), (-v).ln())
                })
                .collect();
            let slope = (logs[3].1 - logs[0].1) / (logs[3].0 - logs[0].0);
            let n = dim as f64;
            assert!((slope + n + 2.0 * s).abs() < 0.02, "N={dim} s={s}: slope {slope}");
            let c = logs.iter().map(|&(lr, lv)| (lv + (n + 2.0 * s) * lr).exp()).collect::<Vec<_>>();
            assert!((c[3] - c[2]).abs() < 1e-2 * c[3], "fitted C not settled: {c:?}");
        }
    }

    #[test]
    fn gaussian_at_center() {
        // Fourier side: (2π)^{−N}∫|ξ|^{2s}π^{N/2}e^{−|ξ|²/4}dξ = 4^s Γ(s+N/2)/Γ(N/2)
        use crate::spectral::gamma::gamma;
        for &(dim, s) in &[(1usize, 0.25), (2, 0.6), (3, 0.5), (4, 0.9)] {
            let p = ProblemParams::riesz(dim, s).unwrap();
            let u = FieldSpec::gaussian(dim, 1.0).unwrap();
            let got = frac_laplacian_at(&u, &SpacePoint::origin(dim), &p, &quad()).unwrap().value;
            let n = dim as f64;
            let want = 4f64.powf(s) * gamma(s + n / 2.0).unwrap() / gamma(n / 2.0).unwrap();
            assert!((got - want).abs() < 1e-6 * want, "N={dim} s={s}: {got} {want}");
        }
    }

    #[test]
    fn pure_power_law_matches_multiplier() {
        let p = ProblemParams::from_gamma(3, 0.5, 0.25).unwrap();
        let u = FieldSpec::power_law(3, 1.75).unwrap();
        for r in [0.5, 1.0, 2.0] {
            let x = SpacePoint::on_axis(3, r);
            let got = frac_laplacian_at(&u, &x, &p, &quad()).unwrap().value;
            let want = frac_laplacian_power_law(1.75, &x, &p).unwrap();
            assert!((got - want).abs() < 1e-6 * want, "r={r} {got} {want}");
        }
        assert!(matches!(
            frac_laplacian_at(&u, &SpacePoint::origin(3), &p, &quad()),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn truncated_power_law_within_budget() {
        let p = ProblemParams::from_gamma(3, 0.5, 0.25).unwrap();
        let u = FieldSpec::truncated_power_law(3, 1.75, 1e-5, 1e3).unwrap();
        for r in [0.5, 1.0, 2.0] {
            let x = SpacePoint::on_axis(3, r);
            let got = frac_laplacian_at(&u, &x, &p, &quad()).unwrap();
            let want = frac_laplacian_power_law(1.75, &x, &p).unwrap();
            let budget = truncation_budget(&u, &x, &p).unwrap();
            assert!(budget < 1e-3 * want, "budget {budget}");
            assert!((got.value - want).abs() <= 1e-3 * want + budget + got.error, "r={r}");
        }
    }

    #[test]
    fn rotation_invariance() {
        let p = ProblemParams::riesz(3, 0.3).unwrap();
        let u = FieldSpec::bump(SpacePoint::origin(3), 1.0).unwrap();
        let a = frac_laplacian_at(&u, &SpacePoint::new(vec![0.6, 0.0, 0.0]), &p, &quad()).unwrap().value;
        let b = frac_laplacian_at(&u, &SpacePoint::new(vec![0.0, 0.36, 0.48]), &p, &quad()).unwrap().value;
        assert!((a - b).abs() < 1e-8 * a.abs());
    }

    #[test]
    fn generic_path_agrees_with_radial_path() {
        let p = ProblemParams::riesz(3, 0.5).unwrap();
        let u = FieldSpec::bump(SpacePoint::new(vec![0.5, 0.0, 0.0]), 1.0)
            .unwrap()
            .plus(FieldSpec::gaussian(3, 0.8).unwrap().scaled(-0.5));
        let x = SpacePoint::new(vec![0.2, 0.3, -0.1]);
        let fast = frac_laplacian_at(&u, &x, &p, &quad()).unwrap().value;
        let slow = frac_laplacian_generic(&u, &x, &p, &quad()).unwrap().value;
        assert!((fast - slow).abs() < 1e-4 * fast.abs().max(1.0), "{fast} {slow}");
    }

    #[test]
    fn second_difference_is_quadratic_near_zero() {
        let u = FieldSpec::bump(SpacePoint::origin(3), 1.0).unwrap();
        let view = u.as_radial().unwrap();
        let lap = view.jet(0.4).laplacian(3);
        for rho in [1e-2, 1e-3, 1e-4] {
            let g = sphere_second_difference(&view, 0.4, rho, 3, &[]);
            let ratio = g / (rho * rho);
            // −|S²|Δf/3
            let want = -4.0 * std::f64::consts::PI * lap / 3.0;
            assert!((ratio - want).abs() < 1e-3 * want.abs().max(1.0), "rho={rho} {ratio} {want}");
        }
    }

    #[test]
    fn power_law_closed_form_checks() {
        let p = ProblemParams::from_gamma(3, 0.5, 0.25).unwrap();
        let x = SpacePoint::on_axis(3, 1.0);
        let v = frac_laplacian_power_law(1.75, &x, &p).unwrap();
        assert!((v - p.theta()).abs() < 1e-13);
        let v2 = frac_laplacian_power_law(1.75, &x.scaled(2.0), &p).unwrap();
        assert!((v / v2 - 2f64.powf(2.75)).abs() < 1e-12);
        assert!(frac_laplacian_power_law(3.0, &x, &p).is_err());
        assert!(frac_laplacian_power_law(1.0, &SpacePoint::origin(3), &p).is_err());
    }
}
