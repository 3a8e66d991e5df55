//! Integrals over the unit sphere S^{N−1}.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::sphere_area;
use crate::quadrature::rules::{gauss_legendre, integrate, AdaptiveOptions};

/// `∫_lo^hi D^{p−1} dD`, stable as p → 0.
pub(crate) fn pow_integral(p: f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if lo == 0.0 {
        return if p > 0.0 { hi.powf(p) / p } else { f64::INFINITY };
    }
    let l = (hi / lo).ln();
    let x = p * l;
    if x.abs() < 1e-8 {
        lo.powf(p) * l * (1.0 + 0.5 * x)
    } else {
        lo.powf(p) * x.exp_m1() / p
    }
}

/// `∫_{S^{N−1}} |r·e − t·ω|^{−λ} 1{|r·e − t·ω| > δ} dω` for a unit vector e.
///
/// Closed form in dimensions 1 and 3; adaptive quadrature in the polar
/// angle otherwise. With δ = 0 and t = r the integral is finite only for
/// λ < N − 1.
pub fn sphere_mean_power(dim: usize, r: f64, t: f64, lambda: f64, exclusion: f64) -> Result<f64> {
    if !(r >= 0.0 && t >= 0.0) {
        return Err(Error::Domain(format!("radii must be non-negative, got {r}, {t}")));
    }
    let big = r.max(t);
    let small = r.min(t);
    if big == 0.0 {
        return Err(Error::Singularity("sphere mean at r = t = 0".into()));
    }
    if exclusion >= r + t {
        return Ok(0.0);
    }
    if small <= 1e-7 * big {
        return Ok(if big > exclusion { sphere_area(dim) * big.powf(-lambda) } else { 0.0 });
    }
    let lo = exclusion.max((r - t).abs());
    if lo == 0.0 && lambda >= dim as f64 - 1.0 {
        return Err(Error::Singularity(format!(
            "sphere mean with λ = {lambda} diverges at r = t in dimension {dim}"
        )));
    }
    match dim {
        1 => {
            let mut v = (r + t).powf(-lambda);
            let d = (r - t).abs();
            if d > exclusion {
                v += d.powf(-lambda);
            }
            Ok(v)
        }
        3 => Ok(2.0 * PI / (r * t) * pow_integral(2.0 - lambda, lo, r + t)),
        _ => numeric_sphere_mean(dim, r, t, lambda, exclusion, lo),
    }
}

fn numeric_sphere_mean(dim: usize, r: f64, t: f64, lambda: f64, exclusion: f64, lo: f64) -> Result<f64> {
    let rt = r * t;
    let d0 = (r - t) * (r - t);
    let psi0 = if exclusion > (r - t).abs() {
        let q = ((exclusion * exclusion - d0) / (4.0 * rt)).sqrt().min(1.0);
        2.0 * q.asin()
    } else {
        0.0
    };
    let m = dim as f64 - 2.0;
    let integrand = |psi: f64| {
        let h = (0.5 * psi).sin();
        let dist2 = d0 + 4.0 * rt * h * h;
        dist2.powf(-0.5 * lambda) * psi.sin().powf(m)
    };
    let w = (lo / rt.sqrt()).max(1e-6).min(PI - psi0);
    let mut points = vec![psi0 + w];
    let mut step = 2.0 * w;
    while psi0 + step < PI {
        points.push(psi0 + step);
        step *= 2.0;
    }
    points.push(PI);
    let opts = AdaptiveOptions::new(1e-11, 0.0, 50);
    let mut total = if points.len() > 1 && points[0] < PI {
        integrate(integrand, &points, &opts)?.value
    } else {
        0.0
    };
    // first panel: at r = t the integrand is ~ψ^{N−2−λ}, which ψ = v^{1/q},
    // q = N − 1 − λ, turns into a constant
    let q = dim as f64 - 1.0 - lambda;
    if psi0 == 0.0 && q > 0.0 {
        let head = integrate(
            |v: f64| {
                let psi = v.powf(1.0 / q);
                integrand(psi) * psi / (q * v)
            },
            &[0.0, w.powf(q)],
            &opts,
        )?;
        total += head.value;
    } else {
        total += integrate(integrand, &[psi0, psi0 + w], &opts)?.value;
    }
    Ok(sphere_area(dim - 1) * total)
}

/// Quadrature over the part of S^{N−1} with polar angle ψ ≤ ψmax about e₁,
/// for integrands depending on ω only through (ω·e₁, ω·e₂).
///
/// Each node is `(cos ψ, sin ψ cos β, weight)`.
#[derive(Debug, Clone)]
pub(crate) struct AxialRule {
    pub nodes: Vec<(f64, f64, f64)>,
}

impl AxialRule {
    pub fn new(dim: usize, psi_max: f64, order: usize) -> AxialRule {
        let psi_max = psi_max.clamp(0.0, PI);
        let mut nodes = Vec::new();
        match dim {
            1 => {
                nodes.push((1.0, 0.0, 1.0));
                if psi_max >= PI {
                    nodes.push((-1.0, 0.0, 1.0));
                }
            }
            2 => {
                let rule = gauss_legendre(order);
                let h = 0.5 * psi_max;
                for (x, w) in rule.0.iter().zip(&rule.1) {
                    let psi = h * (1.0 + x);
                    let (sn, cs) = psi.sin_cos();
                    nodes.push((cs, sn, w * h));
                    nodes.push((cs, -sn, w * h));
                }
            }
            _ => {
                let rule = gauss_legendre(order);
                let h = 0.5 * psi_max;
                let area = sphere_area(dim - 2);
                let (mp, mb) = (dim as i32 - 2, dim as i32 - 3);
                for (x, w) in rule.0.iter().zip(&rule.1) {
                    let psi = h * (1.0 + x);
                    let (sn, cs) = psi.sin_cos();
                    for (y, v) in rule.0.iter().zip(&rule.1) {
                        let beta = 0.5 * PI * (1.0 + y);
                        let (sb, cb) = beta.sin_cos();
                        // |S^{N−3}| sin^{N−2}ψ sin^{N−3}β dψ dβ
                        let wb = v * 0.5 * PI * sb.powi(mb);
                        nodes.push((cs, sn * cb, area * w * h * sn.powi(mp) * wb));
                    }
                }
            }
        }
        AxialRule { nodes }
    }

    /// Full-sphere rule for integrands depending on ω only through ω·e₁.
    pub fn polar(dim: usize, order: usize) -> AxialRule {
        if dim == 1 {
            return AxialRule::new(1, PI, order);
        }
        let rule = gauss_legendre(order);
        let h = 0.5 * PI;
        let area = sphere_area(dim - 1);
        let nodes = rule
            .0
            .iter()
            .zip(&rule.1)
            .map(|(x, w)| {
                let psi = h * (1.0 + x);
                (psi.cos(), 0.0, area * w * h * psi.sin().powi(dim as i32 - 2))
            })
            .collect();
        AxialRule { nodes }
    }
}

/// Product rule on the full sphere: `(ω, weight)` pairs. Supports N ≤ 3.
pub(crate) fn sphere_rule(dim: usize, order: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    match dim {
        1 => Ok(vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)]),
        2 => {
            let m = 2 * order;
            let w = 2.0 * PI / m as f64;
            Ok((0..m)
                .map(|k| {
                    let (s, c) = ((k as f64 + 0.5) * w).sin_cos();
                    (vec![c, s], w)
                })
                .collect())
        }
        3 => {
            let rule = gauss_legendre(order);
            let m = 2 * order;
            let wphi = 2.0 * PI / m as f64;
            let mut out = Vec::with_capacity(order * m);
            for (z, wz) in rule.0.iter().zip(&rule.1) {
                let rho = (1.0 - z * z).sqrt();
                for k in 0..m {
                    let (s, c) = ((k as f64 + 0.5) * wphi).sin_cos();
                    out.push((vec![rho * c, rho * s, *z], wz * wphi));
                }
            }
            Ok(out)
        }
        _ => Err(Error::Unsupported(format!(
            "non-radial fields are supported in dimensions 1 to 3, not {dim}"
        ))),
    }
}
