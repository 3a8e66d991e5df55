//! Green potentials `ψ(x) = ∫ G(x, y) φ(y) dy` and the checks built on them.
//!
//! At θ = 0 the Green function is the Riesz kernel `a(N,s)|x−y|^{2s−N}` and
//! the identities checked here are exact. For θ > 0 only two-sided bounds
//! on the kernel are known, so the surrogate potentials certify structure
//! (positivity, the `|x|^{−γ}` blow-up at the origin, integrability) rather
//! than values.

use std::collections::BTreeMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, sphere_area, SpacePoint};
use crate::kernel::{green_closed_scalar, resolvent_fixed};
use crate::quadrature::field::{RadialTerm, RadialView};
use crate::quadrature::flap::{flap_table, radial_flap};
use crate::quadrature::radial::{radial_integral_with, RadialHints};
use crate::quadrature::sphere::{sphere_mean_power, sphere_rule, AxialRule};
use crate::quadrature::{
    fixed_legendre, frac_laplacian_at, integrate, AdaptiveOptions, Estimate, FieldSpec, Profile, QuadratureSpec, RadialSamples,
};
use crate::report::{Row, VerificationReport};
use crate::spectral::{riesz_normalization, ProblemParams};

/// Which Green function a potential is built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKind {
    /// `a(N,s)|x−y|^{2s−N}`, exact at θ = 0.
    RieszExact,
    /// Closed-form time integral of the heat-kernel comparison profile.
    Surrogate,
    /// `∫ e^{−αt} p̃ dt`.
    ResolventSurrogate { alpha: f64 },
}

impl KernelKind {
    pub fn label(&self) -> String {
        match self {
            KernelKind::RieszExact => "riesz_exact".into(),
            KernelKind::Surrogate => "surrogate".into(),
            KernelKind::ResolventSurrogate { alpha } => format!("resolvent_surrogate({alpha})"),
        }
    }
}

fn check_density(phi: &FieldSpec, params: &ProblemParams) -> Result<()> {
    if phi.dim() != params.dim() {
        return Err(Error::Dimension {
            expected: params.dim(),
            got: phi.dim(),
        });
    }
    if phi.terms().iter().any(|t| t.profile.support().is_none()) {
        return Err(Error::Domain("the density must be compactly supported".into()));
    }
    Ok(())
}

/// Riesz potential of one radial group at distance r from its center.
pub(crate) fn riesz_radial(view: &RadialView<'_>, r: f64, params: &ProblemParams, quad: &QuadratureSpec) -> Result<Estimate> {
    let dim = params.dim();
    let lambda = params.n() - 2.0 * params.order();
    let mut hints = RadialHints::from_view(view);
    if r > 0.0 {
        hints.breakpoints.push(r);
    }
    let a = riesz_normalization(dim, params.order())?;
    let est = radial_integral_with(
        |t| {
            let f = view.value(t);
            if f == 0.0 {
                0.0
            } else {
                f * sphere_mean_power(dim, r, t, lambda, 0.0).unwrap_or(f64::NAN)
            }
        },
        params.n() - 1.0,
        &hints,
        quad,
        &quad.adaptive(1e-1),
    )?;
    Ok(est.scale(a))
}

/// Surrogate potential of one compactly supported radial term, in polar
/// coordinates about x with the axis pointing at the term's center.
fn surrogate_term(term: &RadialTerm, x: &SpacePoint, kind: KernelKind, params: &ProblemParams, quad: &QuadratureSpec) -> Result<Estimate> {
    let dim = params.dim();
    let s = params.order();
    let support = term.profile.support().expect("checked compact");
    let c = &term.center;
    let d = x.distance(c);
    let rx = x.norm();
    let kernel = |ry: f64, rho: f64| match kind {
        KernelKind::ResolventSurrogate { alpha } => resolvent_fixed(alpha, rx, ry, rho, params),
        _ => green_closed_scalar(rx, ry, rho, params),
    };
    // axis e₁ toward the center; x = xa·e₁ + b·e₂
    let centered = d <= 1e-12 * support;
    let (xa, b) = if centered {
        (rx, 0.0)
    } else {
        let xa = dot(x.coords(), c.sub(x).coords()) / d;
        (xa, (rx * rx - xa * xa).max(0.0).sqrt())
    };
    let order = quad.angular_order;
    let polar = AxialRule::polar(dim, order);
    let n = params.n();
    let at_rho = |rho: f64| -> f64 {
        let mut acc = 0.0;
        if centered {
            // the density is constant on the sphere; the axis is x̂
            let f = term.profile.value(rho);
            if f == 0.0 {
                return 0.0;
            }
            for &(cs, _, w) in &polar.nodes {
                let ry = (rx * rx + rho * rho + 2.0 * rho * rx * cs).max(0.0).sqrt();
                acc += w * kernel(ry, rho);
            }
            acc *= f;
        } else {
            let mu = (d * d + rho * rho - support * support) / (2.0 * d * rho);
            if mu >= 1.0 {
                return 0.0;
            }
            let rule = AxialRule::new(dim, mu.max(-1.0).acos(), order);
            for &(cs, sb, w) in &rule.nodes {
                let dc = (d * d + rho * rho - 2.0 * d * rho * cs).max(0.0).sqrt();
                let f = term.profile.value(dc);
                if f == 0.0 {
                    continue;
                }
                let ry = (rx * rx + rho * rho + 2.0 * rho * (xa * cs + b * sb)).max(0.0).sqrt();
                acc += w * f * kernel(ry, rho);
            }
        }
        acc * rho.powf(n - 1.0)
    };
    // τ = ρ^{2s} absorbs the ρ^{2s−N} singularity at ρ = 0
    let to_tau = |rho: f64| rho.powf(2.0 * s);
    let (lo, hi) = ((d - support).max(0.0), d + support);
    let mut points = vec![to_tau(lo), to_tau(hi)];
    for rho in [support - d, rx] {
        if rho > lo && rho < hi {
            points.push(to_tau(rho));
        }
    }
    points.sort_by(f64::total_cmp);
    let est = integrate(
        |tau: f64| {
            let rho = tau.powf(1.0 / (2.0 * s));
            at_rho(rho) * rho / (2.0 * s * tau)
        },
        &points,
        &quad.adaptive(10.0),
    )?;
    Ok(est.scale(term.amplitude))
}

/// `ψ(x) = ∫ G(x, y) φ(y) dy` for compactly supported φ and x ≠ 0.
pub fn green_potential(
    phi: &FieldSpec,
    x: &SpacePoint,
    kind: KernelKind,
    params: &ProblemParams,
    quad: &QuadratureSpec,
) -> Result<Estimate> {
    check_density(phi, params)?;
    x.check_dim(params.dim())?;
    x.require_nonzero()?;
    quad.validate()?;
    if let KernelKind::ResolventSurrogate { alpha } = kind {
        if !(alpha > 0.0) {
            return Err(Error::Domain(format!("resolvent parameter α = {alpha} must be positive")));
        }
    }
    let mut total = Estimate::default();
    match kind {
        KernelKind::RieszExact => {
            for g in phi.center_groups() {
                let view = g.as_radial().expect("grouped");
                total = total + riesz_radial(&view, x.distance(view.center), params, quad)?;
            }
        }
        _ => {
            for term in phi.terms().iter().filter(|t| t.amplitude != 0.0) {
                total = total + surrogate_term(term, x, kind, params, quad)?;
            }
        }
    }
    Ok(total)
}

/// A potential with its evaluations memoized per point.
#[derive(Debug)]
pub struct PotentialField {
    kernel_kind: KernelKind,
    density: FieldSpec,
    params: ProblemParams,
    quad: QuadratureSpec,
    eval_cache: Mutex<BTreeMap<Vec<u64>, Estimate>>,
}

impl PotentialField {
    pub fn new(density: FieldSpec, kernel_kind: KernelKind, params: ProblemParams, quad: QuadratureSpec) -> Result<Self> {
        check_density(&density, &params)?;
        quad.validate()?;
        Ok(PotentialField {
            kernel_kind,
            density,
            params,
            quad,
            eval_cache: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn kernel_kind(&self) -> KernelKind {
        self.kernel_kind
    }

    pub fn density(&self) -> &FieldSpec {
        &self.density
    }

    pub fn value(&self, x: &SpacePoint) -> Result<Estimate> {
        let key: Vec<u64> = x.coords().iter().map(|c| c.to_bits()).collect();
        if let Some(v) = self.eval_cache.lock().expect("cache poisoned").get(&key) {
            return Ok(*v);
        }
        let v = green_potential(&self.density, x, self.kernel_kind, &self.params, &self.quad)?;
        self.eval_cache.lock().expect("cache poisoned").insert(key, v);
        Ok(v)
    }

    /// Values at many points, evaluated in parallel and returned in order.
    pub fn values(&self, xs: &[SpacePoint]) -> Result<Vec<Estimate>> {
        xs.par_iter().map(|x| self.value(x)).collect()
    }

    pub fn cached_points(&self) -> usize {
        self.eval_cache.lock().expect("cache poisoned").len()
    }
}

/// Least-squares fit of `log ψ` against `log |x|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms: f64,
    pub radii: Vec<f64>,
    /// Direction-averaged potential at each radius.
    pub values: Vec<Estimate>,
}

/// Log-spaced radii on [1e−3, 1e−2] used by [`origin_slope_fit`].
pub fn default_slope_radii() -> Vec<f64> {
    (0..9).map(|i| 10f64.powf(-3.0 + i as f64 / 8.0)).collect()
}

pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

/// Fits the blow-up of ψ at the origin on the default radii, averaging over
/// the 2N coordinate directions at each radius.
pub fn origin_slope_fit(phi: &FieldSpec, kind: KernelKind, params: &ProblemParams, quad: &QuadratureSpec) -> Result<SlopeFit> {
    origin_slope_fit_on(phi, kind, &default_slope_radii(), params, quad)
}

pub fn origin_slope_fit_on(
    phi: &FieldSpec,
    kind: KernelKind,
    radii: &[f64],
    params: &ProblemParams,
    quad: &QuadratureSpec,
) -> Result<SlopeFit> {
    if radii.len() < 3 {
        return Err(Error::InsufficientGrid(format!("{} radii, need at least 3", radii.len())));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || radii[0] <= 0.0 {
        return Err(Error::InsufficientGrid("radii must be positive and increasing".into()));
    }
    let field = PotentialField::new(phi.clone(), kind, params.clone(), quad.clone())?;
    let dim = params.dim();
    let mut points = Vec::new();
    for &r in radii {
        for axis in 0..dim {
            for sign in [1.0, -1.0] {
                let mut c = vec![0.0; dim];
                c[axis] = sign * r;
                points.push(SpacePoint::new(c));
            }
        }
    }
    let vals = field.values(&points)?;
    let per = 2 * dim;
    let values: Vec<Estimate> = vals
        .chunks(per)
        .map(|c| c.iter().copied().sum::<Estimate>().scale(1.0 / per as f64))
        .collect();
    if values.iter().any(|v| !(v.value > 0.0)) {
        return Err(Error::InsufficientGrid("the potential is not positive on the fit grid".into()));
    }
    let lx: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ly: Vec<f64> = values.iter().map(|v| v.value.ln()).collect();
    let (slope, intercept, rms) = least_squares(&lx, &ly);
    Ok(SlopeFit {
        slope,
        intercept,
        rms,
        radii: radii.to_vec(),
        values,
    })
}

/// Refinement levels of the integrability check: (panels per decade,
/// angular order).
const INTEGRABILITY_LEVELS: [(usize, usize); 3] = [(2, 8), (4, 16), (8, 32)];

/// `∫ ψ²|x|^{−2s} dx`, split at a radius R with supp φ ⊂ B_{R/2}, at three
/// refinement levels.
///
/// Passes if each piece changes by less than 5% between successive levels
/// and the far-field integrand decays at least like `|x|^{−2(N−s−γ)+0.1}`.
pub fn hardy_integrability_check(
    phi: &FieldSpec,
    kind: KernelKind,
    params: &ProblemParams,
    quad: &QuadratureSpec,
) -> Result<VerificationReport> {
    check_density(phi, params)?;
    if phi.is_zero() {
        return Ok(VerificationReport::at_most("hardy_integrability", 0.0, 0.05, vec![Row::new("zero density").exact("integral", 0.0)]));
    }
    let dim = params.dim();
    let (n, s, g) = (params.n(), params.order(), params.gamma());
    let reach = phi
        .terms()
        .iter()
        .map(|t| t.center.norm() + t.profile.support().unwrap_or(0.0))
        .fold(0.0, f64::max);
    let big_r = 2.2 * reach;
    let t_lo = 1e-4 * big_r;
    let t_far = 1e3 * big_r;
    let decay = n - 2.0 * s - 2.0 * g;

    // directions: axial rule about the common center's axis when there is one
    let axis: Option<Vec<f64>> = phi.common_center().map(|c| {
        if c.is_origin() {
            SpacePoint::on_axis(dim, 1.0).coords().to_vec()
        } else {
            c.scaled(1.0 / c.norm()).coords().to_vec()
        }
    });
    let perp: Vec<f64> = match &axis {
        Some(a) if dim > 1 => {
            // any unit vector orthogonal to a
            let k = (0..dim).min_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs())).expect("dim ≥ 1");
            let mut e = vec![0.0; dim];
            e[k] = 1.0;
            let p = dot(&e, a);
            let v: Vec<f64> = e.iter().zip(a).map(|(x, y)| x - p * y).collect();
            let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter().map(|x| x / nv).collect()
        }
        _ => vec![0.0; dim],
    };
    let directions = |order: usize| -> Result<Vec<(Vec<f64>, f64)>> {
        match &axis {
            Some(a) => Ok(AxialRule::polar(dim, order)
                .nodes
                .iter()
                .map(|&(cs, _, w)| {
                    let sn = (1.0 - cs * cs).max(0.0).sqrt();
                    (a.iter().zip(&perp).map(|(x, y)| cs * x + sn * y).collect(), w)
                })
                .collect()),
            None => sphere_rule(dim, order),
        }
    };
    let potential_quad = QuadratureSpec {
        angular_order: 8,
        ..quad.clone()
    };
    let field = PotentialField::new(phi.clone(), kind, params.clone(), potential_quad)?;
    // h(t) = t^{N−2s}∫_S ψ(tω)² dω, the integrand in u = ln t
    let h = |t: f64, dirs: &[(Vec<f64>, f64)]| -> Result<f64> {
        let pts: Vec<SpacePoint> = dirs.iter().map(|(w, _)| SpacePoint::new(w.iter().map(|c| c * t).collect())).collect();
        let vals = field.values(&pts)?;
        Ok(t.powf(n - 2.0 * s) * vals.iter().zip(dirs).map(|(v, (_, q))| q * v.value * v.value).sum::<f64>())
    };
    let piece = |a: f64, b: f64, per_decade: usize, dirs: &[(Vec<f64>, f64)]| -> Result<f64> {
        let panels = ((b / a).log10() * per_decade as f64).ceil() as usize;
        let (ua, ub) = (a.ln(), b.ln());
        let width = (ub - ua) / panels as f64;
        let mut nodes = Vec::new();
        for k in 0..panels {
            let (pa, pb) = (ua + k as f64 * width, ua + (k + 1) as f64 * width);
            let rule = crate::quadrature::gauss_legendre(6);
            for (x, w) in rule.0.iter().zip(&rule.1) {
                nodes.push((0.5 * (pa + pb) + 0.5 * (pb - pa) * x, 0.5 * (pb - pa) * w));
            }
        }
        let hv: Vec<f64> = nodes.iter().map(|(u, _)| h(u.exp(), dirs)).collect::<Result<_>>()?;
        Ok(nodes.iter().zip(&hv).map(|((_, w), v)| w * v).sum())
    };
    let mut rows = Vec::new();
    let mut interiors = Vec::new();
    let mut exteriors = Vec::new();
    for (level, &(per_decade, order)) in INTEGRABILITY_LEVELS.iter().enumerate() {
        let dirs = directions(order)?;
        let head = h(t_lo, &dirs)? / decay;
        let tail = h(t_far, &dirs)? / decay;
        let interior = piece(t_lo, big_r, per_decade, &dirs)? + head;
        let exterior = piece(big_r, t_far, per_decade, &dirs)? + tail;
        rows.push(
            Row::new(format!("level {level}"))
                .exact("panels_per_decade", per_decade as f64)
                .exact("angular_order", order as f64)
                .exact("interior", interior)
                .exact("exterior", exterior)
                .exact("total", interior + exterior),
        );
        interiors.push(interior);
        exteriors.push(exterior);
    }
    let mut worst = 0.0f64;
    for k in 1..interiors.len() {
        let ri = interiors[k] / interiors[k - 1];
        let re = exteriors[k] / exteriors[k - 1];
        worst = worst.max((ri - 1.0).abs()).max((re - 1.0).abs());
        rows.push(Row::new(format!("ratio {k}/{}", k - 1)).exact("interior_ratio", ri).exact("exterior_ratio", re));
    }
    // far-field slope of the angular mean of ψ²|x|^{−2s}
    let dirs = directions(8)?;
    let area = sphere_area(dim);
    let far_r: Vec<f64> = (0..7).map(|i| 10.0 * big_r * 10f64.powf(i as f64 / 3.0)).collect();
    let far_v: Vec<f64> = far_r
        .iter()
        .map(|&t| h(t, &dirs).map(|v| v * t.powf(-n) / area))
        .collect::<Result<_>>()?;
    if far_v.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Divergence("the far-field integrand is not positive".into()));
    }
    let lx: Vec<f64> = far_r.iter().map(|r| r.ln()).collect();
    let ly: Vec<f64> = far_v.iter().map(|v| v.ln()).collect();
    let (slope, _, _) = least_squares(&lx, &ly);
    let bound = -2.0 * (n - s - g) + 0.1;
    rows.push(Row::new("far field").exact("fitted_slope", slope).exact("slope_bound", bound));
    let mut report = VerificationReport::at_most("hardy_integrability", worst, 0.05, rows)
        .note(format!("split radius R = {big_r}"))
        .note(format!("far-field slope {slope} against bound {bound}"));
    report.passed &= slope <= bound;
    Ok(report)
}

/// Checks `∫ G(x0, z) P f(z) dz = f(x0)`.
///
/// At θ = 0 the kernel is exact and the check passes at 1e−3 (relative when
/// |f(x0)| ≥ 1e−2‖f‖_∞, else absolute against ‖f‖_∞). For θ > 0 the
/// surrogate kernel is used and the report only records the ratio to
/// f(x0) at two refinement levels; asking for a strict verdict then fails
/// with a mode error.
pub fn delta_identity_check(
    f: &FieldSpec,
    x0: &SpacePoint,
    params: &ProblemParams,
    quad: &QuadratureSpec,
    strict: bool,
) -> Result<VerificationReport> {
    check_density(f, params)?;
    x0.check_dim(params.dim())?;
    x0.require_nonzero()?;
    if f.terms().iter().any(|t| t.profile.singular_at_origin()) {
        return Err(Error::Domain("the test function must be smooth".into()));
    }
    let fx0 = f.value(x0);
    let sup = f.sup_norm();
    if params.theta() > 0.0 {
        if strict {
            return Err(Error::Mode("an exact δ-identity check needs θ = 0; the θ > 0 kernel is only a surrogate".into()));
        }
        let coarse = surrogate_pairing(f, x0, params, quad)?;
        let fine = surrogate_pairing(f, x0, params, &quad.refined())?;
        let change = ((fine - coarse) / fine).abs();
        let rows = vec![
            Row::new("coarse").exact("integral", coarse).exact("ratio", coarse / fx0),
            Row::new("refined").exact("integral", fine).exact("ratio", fine / fx0),
        ];
        return Ok(VerificationReport::informational("delta_identity", change, rows)
            .note("comparability mode: surrogate kernel, ratio to f(x0) reported without verdict"));
    }
    let dim = params.dim();
    let s = params.order();
    let lambda = params.n() - 2.0 * s;
    let a = riesz_normalization(dim, s)?;
    let mut total = Estimate::default();
    for group in f.center_groups() {
        let view = group.as_radial().expect("grouped");
        if view.is_empty() {
            continue;
        }
        let d = x0.distance(view.center);
        let mut hints = RadialHints::from_view(&view);
        hints.support = None;
        hints.tail_exponent = Some(2.0 * params.n());
        hints.breakpoints.push(d);
        hints.upper_scale = hints.upper_scale.max(d);
        let failure = Mutex::new(None);
        let est = radial_integral_with(
            |t| match radial_flap(&view, t, dim, s, quad) {
                Ok(l) => l.value * sphere_mean_power(dim, d, t, lambda, 0.0).unwrap_or(f64::NAN),
                Err(e) => {
                    failure.lock().expect("poisoned").get_or_insert(e);
                    f64::NAN
                }
            },
            params.n() - 1.0,
            &hints,
            quad,
            // the integral cancels to 0 where f(x0) = 0, so a relative target alone is unreachable
            &AdaptiveOptions::new(quad.rel_tol * 1e-1, 1e-6 * sup / a, quad.max_depth),
        );
        if let Some(e) = failure.into_inner().expect("poisoned") {
            return Err(e);
        }
        total = total + est?.scale(a);
    }
    let (stat, mode) = if fx0.abs() >= 1e-2 * sup {
        ((total.value - fx0).abs() / fx0.abs(), "relative")
    } else {
        ((total.value - fx0).abs() / sup, "absolute against sup norm")
    };
    let row = Row::new(format!("x0={x0}"))
        .with("integral", total)
        .exact("f_x0", fx0)
        .exact("deviation", stat);
    Ok(VerificationReport::at_most("delta_identity", stat, 1e-3, vec![row]).note(format!("deviation measured {mode}")))
}

/// `∫ G̃(x0, z) P f(z) dz` with the surrogate kernel, in polar coordinates
/// about x0 with a product sphere rule.
fn surrogate_pairing(f: &FieldSpec, x0: &SpacePoint, params: &ProblemParams, quad: &QuadratureSpec) -> Result<f64> {
    let dim = params.dim();
    let (n, s) = (params.n(), params.order());
    let mut flap_field = FieldSpec::zero(dim);
    for group in f.center_groups() {
        let view = group.as_radial().expect("grouped");
        let (_, hi) = view.scale_range();
        let reach = 4.0 * view.support().unwrap_or(hi);
        let table = flap_table(&view, reach, params.dim(), params.order(), params.n() + 2.0 * params.order(), quad)?;
        flap_field = flap_field.plus(FieldSpec::radial(Profile::Samples(table), view.center.clone()));
    }
    let rule = sphere_rule(dim, quad.angular_order)?;
    let rx = x0.norm();
    let reach = f
        .terms()
        .iter()
        .map(|t| t.center.distance(x0) + t.profile.support().unwrap_or(0.0))
        .fold(rx, f64::max);
    let theta = params.theta();
    let at_rho = |rho: f64| -> f64 {
        let mut acc = 0.0;
        for (w, q) in &rule {
            let z: Vec<f64> = x0.coords().iter().zip(w).map(|(a, b)| a + rho * b).collect();
            let rz = z.iter().map(|c| c * c).sum::<f64>().sqrt();
            if rz == 0.0 {
                continue;
            }
            let pf = flap_field.value_at(&z) - theta * f.value_at(&z) * rz.powf(-2.0 * s);
            acc += q * green_closed_scalar(rx, rz, rho, params) * pf;
        }
        acc * rho.powf(n - 1.0)
    };
    let to_tau = |rho: f64| rho.powf(2.0 * s);
    let rho_max = 1e2 * reach;
    let mut points = vec![0.0, to_tau(rx), to_tau(reach), to_tau(rho_max)];
    points.sort_by(f64::total_cmp);
    points.dedup();
    // fixed panels: the product rule makes the integrand only piecewise smooth
    let mut total = 0.0;
    for w in points.windows(2) {
        let panels = 32;
        let width = (w[1] - w[0]) / panels as f64;
        for k in 0..panels {
            let (a, b) = (w[0] + k as f64 * width, w[0] + (k + 1) as f64 * width);
            total += fixed_legendre(
                |tau| {
                    let rho = tau.powf(1.0 / (2.0 * s));
                    at_rho(rho) * rho / (2.0 * s * tau)
                },
                a,
                b,
                8,
            );
        }
    }
    Ok(total)
}

/// Samples the Riesz potential of φ into a field, so that `(−Δ)^s` can be
/// applied to it by the pointwise engine.
pub fn riesz_potential_field(phi: &FieldSpec, params: &ProblemParams, quad: &QuadratureSpec) -> Result<FieldSpec> {
    check_density(phi, params)?;
    let mut out = FieldSpec::zero(params.dim());
    for group in phi.center_groups() {
        let view = group.as_radial().expect("grouped");
        let reach = view.support().expect("compact");
        let mut radii: Vec<f64> = (0..=2400).map(|i| 6.0 * reach * i as f64 / 2400.0).collect();
        let mut r = 6.0 * reach;
        while r < 1e3 * reach {
            r *= 1.02;
            radii.push(r);
        }
        let values: Vec<f64> = radii
            .par_iter()
            .map(|&t| riesz_radial(&view, t, params, quad).map(|e| e.value))
            .collect::<Result<_>>()?;
        let samples = RadialSamples::new(radii, values, Some(params.n() - 2.0 * params.order()))?;
        out = out.plus(FieldSpec::radial(Profile::Samples(samples), view.center.clone()));
    }
    Ok(out)
}

/// Applies `(−Δ)^s` to the Riesz potential of φ and compares with φ.
pub fn riesz_round_trip(
    phi: &FieldSpec,
    points: &[SpacePoint],
    params: &ProblemParams,
    quad: &QuadratureSpec,
) -> Result<VerificationReport> {
    if !params.is_riesz() {
        return Err(Error::Mode("the round trip is exact only at θ = 0".into()));
    }
    if points.is_empty() {
        return Err(Error::InsufficientGrid("no test points".into()));
    }
    let psi = riesz_potential_field(phi, params, quad)?;
    let sup = phi.sup_norm();
    let rows: Vec<(Row, f64)> = points
        .par_iter()
        .map(|x| -> Result<(Row, f64)> {
            let got = frac_laplacian_at(&psi, x, params, quad)?;
            let want = phi.value(x);
            let dev = if want.abs() >= 1e-2 * sup {
                (got.value - want).abs() / want.abs()
            } else {
                (got.value - want).abs() / sup
            };
            Ok((
                Row::new(format!("x={x}")).with("flap_of_potential", got).exact("density", want).exact("deviation", dev),
                dev,
            ))
        })
        .collect::<Result<_>>()?;
    let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(VerificationReport::at_most("riesz_round_trip", worst, 1e-3, rows.into_iter().map(|r| r.0).collect()))
}
