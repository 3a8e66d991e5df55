//! The four subcommands, each producing a [`Document`].

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::SpacePoint;
use crate::kernel::{
    green_surrogate, green_time_quadrature, heat_profile, resolvent_profile_integral, riesz_kernel,
};
use crate::operator::{fundamental_residual_with, hardy_ratio_check};
use crate::quadrature::{Estimate, FieldSpec, QuadratureSpec};
use crate::report::{Row, VerificationReport};
use crate::representation::{
    delta_identity_check, hardy_integrability_check, least_squares, origin_slope_fit, KernelKind, PotentialField,
};
use crate::spectral::{
    critical_gamma, frac_laplacian_normalizer, gamma_of_theta, riesz_normalization, sharp_hardy_constant,
    theta_of_gamma, ProblemParams,
};

use super::config::{bumps_to_field, RunConfig};
use super::output::{Document, ParamSummary};

pub fn cmd_constants(cfg: &RunConfig) -> Result<Document> {
    let (dim, s) = (cfg.params.dim, cfg.params.s);
    let params = cfg.optional_params()?;
    let lambda = sharp_hardy_constant(dim, s)?;
    let top = critical_gamma(dim, s);
    let mut constants = vec![
        Row::new("sharp_constant").exact("Lambda", lambda),
        Row::new("normalizer").exact("c_Ns", frac_laplacian_normalizer(dim, s)?),
        Row::new("riesz_normalization").exact("a_Ns", riesz_normalization(dim, s)?),
        Row::new("critical_gamma").exact("gamma_star", top),
        Row::new("sobolev_exponent").exact("two_star", 2.0 * dim as f64 / (dim as f64 - 2.0 * s)),
    ];
    let summary = match &params {
        Some(p) => {
            let back = if p.theta() == 0.0 { 0.0 } else { theta_of_gamma(p.gamma(), dim, s)? };
            constants.push(
                Row::new("given")
                    .exact("theta", p.theta())
                    .with("gamma_of_theta", Estimate::new(p.gamma(), (back - p.theta()).abs())),
            );
            ParamSummary::from_params(p)
        }
        None => ParamSummary {
            dim,
            s,
            theta: None,
            gamma: None,
        },
    };
    let n = cfg.constants.gamma_points;
    let grid: Vec<Row> = (1..=n)
        .map(|i| -> Result<Row> {
            let g = top * i as f64 / (n + 1) as f64;
            let t = theta_of_gamma(g, dim, s)?;
            let back = gamma_of_theta(t, dim, s)?;
            Ok(Row::new(format!("gamma={g}"))
                .exact("gamma", g)
                .exact("theta_of_gamma", t)
                .with("gamma_roundtrip", Estimate::new(back, (back - g).abs())))
        })
        .collect::<Result<_>>()?;
    Ok(Document::new("constants", summary)
        .section("constants", constants)
        .section("gamma_theta_table", grid))
}

fn default_pairs(dim: usize) -> Vec<(SpacePoint, SpacePoint)> {
    let radii = [0.5, 1.0, 2.0];
    let angles: Vec<f64> = if dim == 1 { vec![PI] } else { vec![PI / 3.0, 2.0 * PI / 3.0, PI] };
    let mut out = Vec::new();
    for &ri in &radii {
        for &rj in &radii {
            for &a in &angles {
                let x = SpacePoint::on_axis(dim, ri);
                let mut y = vec![0.0; dim];
                y[0] = rj * a.cos();
                if dim > 1 {
                    y[1] = rj * a.sin();
                }
                let y = SpacePoint::new(y);
                out.push((x.clone(), y.clone()));
                out.push((y, x));
            }
        }
    }
    out
}

pub fn cmd_kernel(cfg: &RunConfig) -> Result<Document> {
    let params = cfg.params()?;
    let quad = cfg.quad();
    let pairs: Vec<(SpacePoint, SpacePoint)> = if cfg.kernel.pairs.is_empty() {
        default_pairs(params.dim())
    } else {
        cfg.kernel
            .pairs
            .iter()
            .map(|[x, y]| (SpacePoint::new(x.clone()), SpacePoint::new(y.clone())))
            .collect()
    };
    let (t, alpha) = (cfg.kernel.time, cfg.kernel.alpha);
    let rows: Vec<Row> = pairs
        .par_iter()
        .map(|(x, y)| -> Result<Row> {
            let g = green_surrogate(x, y, &params)?;
            let quadrature = green_time_quadrature(x, y, &params, &quad)?;
            let forms = (g.product_form - g.expanded_form).abs() / g.expanded_form.abs();
            let closed = (g.closed_time_integral - quadrature.value).abs() / g.closed_time_integral.abs();
            Ok(Row::new(format!("x={x} y={y}"))
                .exact("heat_profile", heat_profile(t, x, y, &params)?)
                .exact("product_form", g.product_form)
                .exact("expanded_form", g.expanded_form)
                .exact("forms_rel_diff", forms)
                .exact("closed_time_integral", g.closed_time_integral)
                .with("time_quadrature", quadrature)
                .with("closed_vs_quadrature_rel_diff", Estimate::new(closed, quadrature.error / g.closed_time_integral))
                .exact("resolvent", resolvent_profile_integral(alpha, x, y, &params, &quad)?)
                .exact("riesz_kernel", riesz_kernel(x, y, &params)?))
        })
        .collect::<Result<_>>()?;
    Ok(Document::new("kernel", ParamSummary::from_params(&params))
        .section("settings", vec![Row::new("kernel").exact("time", t).exact("alpha", alpha)])
        .section("kernel_pairs", rows))
}

/// Which verification checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub residual: bool,
    pub hardy: bool,
    pub delta: bool,
    pub slope: bool,
    pub integrability: bool,
}

impl Selection {
    pub const ALL: Selection = Selection {
        residual: true,
        hardy: true,
        delta: true,
        slope: true,
        integrability: true,
    };
}

fn failed(check: &str, e: Error) -> VerificationReport {
    VerificationReport::at_most(check, f64::NAN, 0.0, vec![]).note(format!("error: {e}"))
}

/// Unit vector along (1, …, 1) restricted to the first k coordinates.
fn diagonal(dim: usize, k: usize) -> Vec<f64> {
    let k = k.clamp(1, dim);
    let mut v = vec![0.0; dim];
    for c in v.iter_mut().take(k) {
        *c = 1.0 / (k as f64).sqrt();
    }
    v
}

fn residual_report(cfg: &RunConfig, p: &ProblemParams, quad: &QuadratureSpec) -> Result<VerificationReport> {
    if p.is_riesz() {
        return Ok(VerificationReport::informational("fundamental_residual", f64::NAN, vec![])
            .note("skipped: the residual is measured relative to θ and is undefined at θ = 0"));
    }
    let grid: Vec<SpacePoint> = cfg
        .verify
        .residual_radii
        .iter()
        .enumerate()
        .map(|(i, &r)| SpacePoint::new(diagonal(p.dim(), i % 3 + 1).iter().map(|c| c * r).collect()))
        .collect();
    fundamental_residual_with(&grid, p, p.theta() * cfg.verify.theta_scale, quad)
}

/// Smooth, compactly supported functions for the Hardy ratio check.
pub fn hardy_catalog(dim: usize) -> Result<Vec<(String, FieldSpec)>> {
    Ok(vec![
        ("bump R=1".to_string(), FieldSpec::bump(SpacePoint::origin(dim), 1.0)?),
        ("bump R=1 at e1/2".to_string(), FieldSpec::bump(SpacePoint::on_axis(dim, 0.5), 1.0)?),
        ("gaussian w=1".to_string(), FieldSpec::gaussian(dim, 1.0)?),
        (
            "bump pair".to_string(),
            FieldSpec::bump(SpacePoint::origin(dim), 1.0)?.plus(FieldSpec::bump(SpacePoint::on_axis(dim, 0.3), 0.5)?.scaled(-0.5)),
        ),
    ])
}

/// Bumps and evaluation points of the θ = 0 δ-identity check: three points
/// inside each support and one outside.
pub fn delta_cases(dim: usize) -> Result<Vec<(FieldSpec, Vec<SpacePoint>)>> {
    let e = |v: f64| SpacePoint::on_axis(dim, v);
    let off = |a: f64, b: f64| {
        let mut c = vec![0.0; dim];
        c[0] = a;
        if dim > 1 {
            c[1] = b;
        }
        SpacePoint::new(c)
    };
    Ok(vec![
        (FieldSpec::bump(e(1.0), 1.0)?, vec![e(1.0), off(1.3, 0.2), e(0.4), e(2.5)]),
        (FieldSpec::bump(SpacePoint::origin(dim), 0.7)?, vec![e(0.1), off(0.2, -0.2), e(0.45), e(1.5)]),
        (FieldSpec::bump(off(-0.5, 0.5), 1.2)?.scaled(2.0), vec![off(-0.5, 0.6), off(-0.2, 0.1), off(-1.0, 1.0), e(1.2)]),
    ])
}

fn delta_report(p: &ProblemParams, quad: &QuadratureSpec) -> Result<VerificationReport> {
    let riesz = ProblemParams::riesz(p.dim(), p.order())?;
    let cases = delta_cases(p.dim())?;
    let jobs: Vec<(usize, &FieldSpec, &SpacePoint)> = cases
        .iter()
        .enumerate()
        .flat_map(|(i, (f, xs))| xs.iter().map(move |x| (i, f, x)))
        .collect();
    let reports: Vec<VerificationReport> = jobs
        .par_iter()
        .map(|(_, f, x)| delta_identity_check(f, x, &riesz, quad, true))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for ((i, _, _), r) in jobs.iter().zip(&reports) {
        worst = worst.max(r.statistic);
        for row in &r.rows {
            let mut row = row.clone();
            row.label = format!("bump {i} {}", row.label);
            rows.push(row);
        }
    }
    Ok(VerificationReport::at_most("delta_identity", worst, 1e-3, rows).note("evaluated at θ = 0 with the exact Riesz kernel"))
}

fn slope_report(cfg: &RunConfig, p: &ProblemParams, quad: &QuadratureSpec) -> Result<VerificationReport> {
    let phi = FieldSpec::bump(SpacePoint::on_axis(p.dim(), cfg.verify.slope_distance), cfg.verify.slope_radius)?;
    let fit = origin_slope_fit(&phi, KernelKind::Surrogate, p, quad)?;
    let g = p.gamma();
    let stat = if g > 0.0 { (fit.slope + g).abs() / g } else { fit.slope.abs() };
    let mut rows: Vec<Row> = fit
        .radii
        .iter()
        .zip(&fit.values)
        .map(|(r, v)| Row::new(format!("r={r}")).exact("radius", *r).with("potential", *v))
        .collect();
    rows.push(
        Row::new("fit")
            .exact("slope", fit.slope)
            .exact("minus_gamma", -g)
            .exact("intercept", fit.intercept)
            .exact("rms", fit.rms),
    );
    Ok(VerificationReport::at_most("origin_slope", stat, 0.05, rows)
        .note("statistic is |slope + γ|/γ, or |slope| at γ = 0"))
}

fn integrability_report(cfg: &RunConfig, p: &ProblemParams, quad: &QuadratureSpec) -> Result<VerificationReport> {
    let phi = FieldSpec::bump(SpacePoint::on_axis(p.dim(), cfg.verify.integrability_distance), cfg.verify.integrability_radius)?;
    hardy_integrability_check(&phi, KernelKind::Surrogate, p, quad)
}

pub fn cmd_verify(cfg: &RunConfig, sel: Selection) -> Result<Document> {
    let p = cfg.params()?;
    let quad = cfg.quad();
    let mut reports = Vec::new();
    if sel.residual {
        reports.push(residual_report(cfg, &p, &quad).unwrap_or_else(|e| failed("fundamental_residual", e)));
    }
    if sel.hardy {
        let r = hardy_catalog(p.dim()).and_then(|c| hardy_ratio_check(&c, &cfg.verify.hardy_eps, &p, &quad));
        reports.push(r.unwrap_or_else(|e| failed("hardy_ratio", e)));
    }
    if sel.delta {
        reports.push(delta_report(&p, &quad).unwrap_or_else(|e| failed("delta_identity", e)));
    }
    if sel.slope {
        reports.push(slope_report(cfg, &p, &quad).unwrap_or_else(|e| failed("origin_slope", e)));
    }
    if sel.integrability {
        reports.push(integrability_report(cfg, &p, &quad).unwrap_or_else(|e| failed("hardy_integrability", e)));
    }
    let mut doc = Document::new("verify", ParamSummary::from_params(&p));
    doc.passed = Some(reports.iter().all(|r| r.passed));
    doc.reports = reports;
    Ok(doc)
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<Document> {
    let p = cfg.params()?;
    let quad = cfg.quad();
    let kind = cfg.solve_kernel();
    let phi = bumps_to_field(p.dim(), &cfg.solve.density)?;
    let dir = match &cfg.solve.direction {
        Some(d) => d.clone(),
        None => diagonal(p.dim(), 1),
    };
    let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
    let radii = &cfg.solve.radii;
    let points: Vec<SpacePoint> = radii
        .iter()
        .map(|r| SpacePoint::new(dir.iter().map(|c| c * r / norm).collect()))
        .collect();
    let field = PotentialField::new(phi, kind, p.clone(), quad)?;
    let values = field.values(&points)?;
    let positive = values.len() >= 2 && values.iter().all(|v| v.value > 0.0);
    let lr: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let mut rows = Vec::new();
    for (i, (x, v)) in points.iter().zip(&values).enumerate() {
        let mut row = Row::new(format!("x={x}")).exact("radius", radii[i]).with("potential", *v);
        if positive {
            // one-sided at the ends, central inside
            let (a, b) = (i.saturating_sub(1), (i + 1).min(values.len() - 1));
            let dl = lr[b] - lr[a];
            let slope = (values[b].value.ln() - values[a].value.ln()) / dl;
            let err = (values[a].error / values[a].value + values[b].error / values[b].value) / dl.abs();
            row = row.with("local_slope", Estimate::new(slope, err));
        }
        rows.push(row);
    }
    let mut doc = Document::new("solve", ParamSummary::from_params(&p))
        .section("settings", vec![Row::new(kind.label()).exact("minus_gamma", -p.gamma())])
        .section("potential", rows);
    if positive && values.len() >= 3 {
        let ly: Vec<f64> = values.iter().map(|v| v.value.ln()).collect();
        let (slope, intercept, rms) = least_squares(&lr, &ly);
        doc = doc.section(
            "slope_fit",
            vec![Row::new("least_squares")
                .exact("slope", slope)
                .exact("intercept", intercept)
                .exact("rms", rms)],
        );
    }
    Ok(doc)
}
