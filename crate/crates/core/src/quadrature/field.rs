//! Scalar functions on ℝ^N built from radial profiles.
//!
//! Every field is a finite linear combination of profiles, each radial
//! about its own center. When all centers coincide the field is radial and
//! the fast one-dimensional reductions apply.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::geometry::SpacePoint;

/// Value and radial derivatives of a profile at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    /// f'(r)/r, finite at r = 0 for profiles smooth at the origin.
    pub d1_over_r: f64,
    pub d2: f64,
}

impl Jet {
    fn scaled(self, a: f64) -> Jet {
        Jet {
            value: a * self.value,
            d1: a * self.d1,
            d1_over_r: a * self.d1_over_r,
            d2: a * self.d2,
        }
    }

    fn add(self, o: Jet) -> Jet {
        Jet {
            value: self.value + o.value,
            d1: self.d1 + o.d1,
            d1_over_r: self.d1_over_r + o.d1_over_r,
            d2: self.d2 + o.d2,
        }
    }

    /// Laplacian of the radial function in ℝ^dim.
    pub fn laplacian(&self, dim: usize) -> f64 {
        self.d2 + (dim as f64 - 1.0) * self.d1_over_r
    }
}

/// `|x|^{−α}` on `[inner_cut, outer_cut]`, capped inside by an even quartic
/// and tapered to zero on `[outer_cut, 2·outer_cut]` by a quintic, both
/// matched to second order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedPowerLaw {
    pub exponent: f64,
    pub inner_cut: f64,
    pub outer_cut: f64,
    cap: [f64; 3],
}

impl TruncatedPowerLaw {
    pub fn new(exponent: f64, inner_cut: f64, outer_cut: f64) -> Result<Self> {
        if !(exponent > 0.0) {
            return domain(format!("power-law exponent {exponent} must be positive"));
        }
        if !(inner_cut > 0.0 && inner_cut < outer_cut && outer_cut.is_finite()) {
            return domain(format!("need 0 < inner_cut < outer_cut, got {inner_cut}, {outer_cut}"));
        }
        let a = exponent;
        let cap = [1.0 + (a * a + 6.0 * a) / 8.0, -a * (a + 4.0) / 4.0, a * (a + 2.0) / 8.0];
        Ok(TruncatedPowerLaw {
            exponent,
            inner_cut,
            outer_cut,
            cap,
        })
    }

    fn jet(&self, r: f64) -> Jet {
        let (a, lo, hi) = (self.exponent, self.inner_cut, self.outer_cut);
        if r < lo {
            let v = lo.powf(-a);
            let s = r / lo;
            let [k0, k2, k4] = self.cap;
            let s2 = s * s;
            Jet {
                value: v * (k0 + k2 * s2 + k4 * s2 * s2),
                d1: v / lo * (2.0 * k2 * s + 4.0 * k4 * s2 * s),
                d1_over_r: v / (lo * lo) * (2.0 * k2 + 4.0 * k4 * s2),
                d2: v / (lo * lo) * (2.0 * k2 + 12.0 * k4 * s2),
            }
        } else if r <= hi {
            let v = r.powf(-a);
            Jet {
                value: v,
                d1: -a * v / r,
                d1_over_r: -a * v / (r * r),
                d2: a * (a + 1.0) * v / (r * r),
            }
        } else if r < 2.0 * hi {
            let v = hi.powf(-a);
            let s = (r - hi) / hi;
            let (q, dq, ddq) = taper(s, a);
            Jet {
                value: v * q,
                d1: v * dq / hi,
                d1_over_r: v * dq / (hi * r),
                d2: v * ddq / (hi * hi),
            }
        } else {
            Jet::default()
        }
    }

    /// Bound on ∫_{B_a} ||y|^{−α} − cap(|y|)| dy / |S^{N−1}|.
    pub(crate) fn inner_defect_bound(&self, dim: usize) -> f64 {
        let n = dim as f64;
        let (a, lo) = (self.exponent, self.inner_cut);
        let v = lo.powf(-a);
        let [k0, k2, k4] = self.cap;
        let cap = v * lo.powf(n) * (k0.abs() / n + k2.abs() / (n + 2.0) + k4.abs() / (n + 4.0));
        lo.powf(n - a) / (n - a) + cap
    }

    /// Maximum of |taper| relative to `outer_cut^{−α}`.
    pub(crate) fn taper_max(&self) -> f64 {
        (0..=1000)
            .map(|i| taper(i as f64 / 1000.0, self.exponent).0.abs())
            .fold(0.0, f64::max)
            * 1.01
    }
}

/// Quintic Hermite taper q(s) on [0,1]: q(0) = 1, q'(0) = −α, q''(0) = α(α+1),
/// and q = q' = q'' = 0 at s = 1. Returns (q, q', q'').
fn taper(s: f64, a: f64) -> (f64, f64, f64) {
    let (s2, s3) = (s * s, s * s * s);
    let (s4, s5) = (s3 * s, s3 * s2);
    let h0 = (1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5, -30.0 * s2 + 60.0 * s3 - 30.0 * s4, -60.0 * s + 180.0 * s2 - 120.0 * s3);
    let h1 = (s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5, 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4, -36.0 * s + 96.0 * s2 - 60.0 * s3);
    let h2 = (
        0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5),
        0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4),
        0.5 * (2.0 - 18.0 * s + 36.0 * s2 - 20.0 * s3),
    );
    let (c1, c2) = (-a, a * (a + 1.0));
    (
        h0.0 + c1 * h1.0 + c2 * h2.0,
        h0.1 + c1 * h1.1 + c2 * h2.1,
        h0.2 + c1 * h1.2 + c2 * h2.2,
    )
}

/// Radial samples interpolated by a cubic spline with zero slope at the
/// origin, extended beyond the last knot by `v_last·(r/r_last)^{−decay}` or by
/// zero when no decay exponent is given.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSamples {
    radii: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
    decay: Option<f64>,
}

impl RadialSamples {
    pub fn new(radii: Vec<f64>, values: Vec<f64>, decay: Option<f64>) -> Result<Self> {
        if radii.len() != values.len() || radii.len() < 3 {
            return domain("radial samples need at least three (radius, value) pairs");
        }
        if radii[0] != 0.0 {
            return domain("radial samples must start at radius 0");
        }
        if radii.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("sample radii must be strictly increasing");
        }
        if let Some(d) = decay {
            if !(d > 0.0) {
                return domain(format!("decay exponent {d} must be positive"));
            }
        }
        let second = spline_second_derivatives(&radii, &values);
        Ok(RadialSamples {
            radii,
            values,
            second,
            decay,
        })
    }

    /// Tabulates `f` on `radii`.
    pub fn from_fn<F: Fn(f64) -> f64>(radii: Vec<f64>, f: F, decay: Option<f64>) -> Result<Self> {
        let values = radii.iter().map(|&r| f(r)).collect();
        Self::new(radii, values, decay)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn decay(&self) -> Option<f64> {
        self.decay
    }

    fn last(&self) -> f64 {
        *self.radii.last().expect("nonempty")
    }

    fn jet(&self, r: f64) -> Jet {
        let last = self.last();
        if r >= last {
            let Some(d) = self.decay else {
                return Jet::default();
            };
            let v = self.values[self.values.len() - 1] * (r / last).powf(-d);
            return Jet {
                value: v,
                d1: -d * v / r,
                d1_over_r: -d * v / (r * r),
                d2: d * (d + 1.0) * v / (r * r),
            };
        }
        let i = match self.radii.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => i.min(self.radii.len() - 2),
            Err(i) => i - 1,
        };
        let (x0, x1) = (self.radii[i], self.radii[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let h = x1 - x0;
        let (a, b) = ((x1 - r) / h, (r - x0) / h);
        let value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (y1 - y0) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0 + (3.0 * b * b - 1.0) / 6.0 * h * m1;
        let d2 = a * m0 + b * m1;
        let d1_over_r = if r == 0.0 { d2 } else { d1 / r };
        Jet {
            value,
            d1,
            d1_over_r,
            d2,
        }
    }
}

/// Second derivatives of the cubic spline with f'(x₀) = 0 and a natural
/// right end.
fn spline_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut lower = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let h0 = x[1] - x[0];
    diag[0] = h0 / 3.0;
    upper[0] = h0 / 6.0;
    rhs[0] = (y[1] - y[0]) / h0;
    for i in 1..n - 1 {
        let (hl, hr) = (x[i] - x[i - 1], x[i + 1] - x[i]);
        lower[i] = hl / 6.0;
        diag[i] = (hl + hr) / 3.0;
        upper[i] = hr / 6.0;
        rhs[i] = (y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl;
    }
    diag[n - 1] = 1.0;
    rhs[n - 1] = 0.0;
    // Thomas algorithm
    for i in 1..n {
        let w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut m = vec![0.0; n];
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    }
    m
}

/// Radial profile catalog.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `exp(1 − 1/(1 − (r/R)²))` on r < R, zero outside; equals 1 at r = 0.
    Bump { radius: f64 },
    /// `(1 + r²)^{−exponent}`; with exponent (N−2s)/2 this is the
    /// extremal bubble of the fractional Sobolev inequality.
    Bubble { exponent: f64 },
    Gaussian { width: f64 },
    /// Pure `r^{−α}`, singular at the origin.
    PowerLaw { exponent: f64 },
    TruncatedPowerLaw(TruncatedPowerLaw),
    Samples(RadialSamples),
}

/// Beyond this many widths a Gaussian is below 1e-300 and treated as zero.
const GAUSSIAN_CUTOFF: f64 = 26.3;

impl Profile {
    pub fn jet(&self, r: f64) -> Jet {
        match self {
            Profile::Bump { radius } => {
                let q = (r / radius) * (r / radius);
                if q >= 1.0 {
                    return Jet::default();
                }
                let g = 1.0 / (1.0 - q);
                if g > 700.0 {
                    return Jet::default();
                }
                let f = (1.0 - g).exp();
                let r2 = radius * radius;
                let d1_over_r = -2.0 * f * g * g / r2;
                let h = 2.0 * r * g * g / r2;
                let dh = 2.0 * g * g / r2 + 8.0 * g * g * g * r * r / (r2 * r2);
                Jet {
                    value: f,
                    d1: d1_over_r * r,
                    d1_over_r,
                    d2: f * h * h - f * dh,
                }
            }
            Profile::Bubble { exponent: e } => {
                let b = 1.0 + r * r;
                let f = b.powf(-e);
                let d1_over_r = -2.0 * e * f / b;
                Jet {
                    value: f,
                    d1: d1_over_r * r,
                    d1_over_r,
                    d2: d1_over_r + 4.0 * e * (e + 1.0) * r * r * f / (b * b),
                }
            }
            Profile::Gaussian { width } => {
                let w2 = width * width;
                let f = (-r * r / w2).exp();
                let d1_over_r = -2.0 * f / w2;
                Jet {
                    value: f,
                    d1: d1_over_r * r,
                    d1_over_r,
                    d2: d1_over_r + 4.0 * r * r * f / (w2 * w2),
                }
            }
            Profile::PowerLaw { exponent: a } => {
                let v = r.powf(-a);
                Jet {
                    value: v,
                    d1: -a * v / r,
                    d1_over_r: -a * v / (r * r),
                    d2: a * (a + 1.0) * v / (r * r),
                }
            }
            Profile::TruncatedPowerLaw(t) => t.jet(r),
            Profile::Samples(s) => s.jet(r),
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match self {
            Profile::PowerLaw { exponent } => r.powf(-exponent),
            _ => self.jet(r).value,
        }
    }

    /// Radius beyond which the profile vanishes.
    pub fn support(&self) -> Option<f64> {
        match self {
            Profile::Bump { radius } => Some(*radius),
            Profile::Gaussian { width } => Some(GAUSSIAN_CUTOFF * width),
            Profile::TruncatedPowerLaw(t) => Some(2.0 * t.outer_cut),
            Profile::Samples(s) if s.decay.is_none() => Some(s.last()),
            _ => None,
        }
    }

    /// Exponent d with f(r) ~ r^{−d} as r → ∞, for profiles without compact
    /// support.
    pub fn decay(&self) -> Option<f64> {
        match self {
            Profile::Bubble { exponent } => Some(2.0 * exponent),
            Profile::PowerLaw { exponent } => Some(*exponent),
            Profile::Samples(s) => s.decay,
            _ => None,
        }
    }

    /// Exponent h with f(r) ~ r^{h} as r → 0.
    pub fn head_exponent(&self) -> f64 {
        match self {
            Profile::PowerLaw { exponent } => -exponent,
            _ => 0.0,
        }
    }

    pub fn singular_at_origin(&self) -> bool {
        matches!(self, Profile::PowerLaw { .. })
    }

    /// Radii where the profile is only finitely smooth or changes form.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Profile::Bump { radius } => vec![*radius],
            Profile::TruncatedPowerLaw(t) => vec![t.inner_cut, t.outer_cut, 2.0 * t.outer_cut],
            Profile::Samples(s) => vec![s.last()],
            _ => Vec::new(),
        }
    }

    /// Smallest and largest radii at which the profile changes character.
    pub fn scale_range(&self) -> (f64, f64) {
        match self {
            Profile::Bump { radius } => (*radius, *radius),
            Profile::Bubble { .. } | Profile::PowerLaw { .. } => (1.0, 1.0),
            Profile::Gaussian { width } => (*width, *width),
            Profile::TruncatedPowerLaw(t) => (t.inner_cut, 2.0 * t.outer_cut),
            Profile::Samples(s) => (s.radii[1], s.last()),
        }
    }

    /// Length over which the profile varies appreciably near radius r.
    pub fn scale_at(&self, r: f64) -> f64 {
        match self {
            Profile::Bump { radius } => *radius,
            Profile::Bubble { .. } => r.max(1.0),
            Profile::Gaussian { width } => *width,
            Profile::PowerLaw { .. } => r,
            Profile::TruncatedPowerLaw(t) => {
                if r < t.inner_cut {
                    t.inner_cut
                } else if r > t.outer_cut {
                    t.outer_cut
                } else {
                    r
                }
            }
            Profile::Samples(s) => r.max(s.radii[1]),
        }
    }
}

/// One radial piece `amplitude · profile(|x − center|)` of a field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialTerm {
    pub profile: Profile,
    pub center: SpacePoint,
    pub amplitude: f64,
}

/// A scalar function on ℝ^N: a linear combination of radial terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSpec {
    dim: usize,
    terms: Vec<RadialTerm>,
}

impl FieldSpec {
    pub fn zero(dim: usize) -> Self {
        FieldSpec { dim, terms: Vec::new() }
    }

    pub fn radial(profile: Profile, center: SpacePoint) -> Self {
        FieldSpec {
            dim: center.dim(),
            terms: vec![RadialTerm {
                profile,
                center,
                amplitude: 1.0,
            }],
        }
    }

    /// Smooth bump of the given radius, equal to 1 at its center.
    pub fn bump(center: SpacePoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return domain(format!("bump radius {radius} must be positive"));
        }
        Ok(Self::radial(Profile::Bump { radius }, center))
    }

    /// `(1 + |x|²)^{−(N−2s)/2}` centered at the origin.
    pub fn bubble(dim: usize, order: f64) -> Self {
        Self::radial(
            Profile::Bubble {
                exponent: (dim as f64 - 2.0 * order) / 2.0,
            },
            SpacePoint::origin(dim),
        )
    }

    pub fn gaussian(dim: usize, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return domain(format!("Gaussian width {width} must be positive"));
        }
        Ok(Self::radial(Profile::Gaussian { width }, SpacePoint::origin(dim)))
    }

    /// Pure `|x|^{−α}` with 0 < α < N.
    pub fn power_law(dim: usize, exponent: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent < dim as f64) {
            return domain(format!("power-law exponent {exponent} outside (0, {dim})"));
        }
        Ok(Self::radial(Profile::PowerLaw { exponent }, SpacePoint::origin(dim)))
    }

    pub fn truncated_power_law(dim: usize, exponent: f64, inner_cut: f64, outer_cut: f64) -> Result<Self> {
        if !(exponent < dim as f64) {
            return domain(format!("power-law exponent {exponent} must be below N = {dim}"));
        }
        Ok(Self::radial(
            Profile::TruncatedPowerLaw(TruncatedPowerLaw::new(exponent, inner_cut, outer_cut)?),
            SpacePoint::origin(dim),
        ))
    }

    pub fn samples(dim: usize, samples: RadialSamples) -> Self {
        Self::radial(Profile::Samples(samples), SpacePoint::origin(dim))
    }

    /// Moves every term by `shift`.
    pub fn translated(mut self, shift: &SpacePoint) -> Self {
        for t in &mut self.terms {
            t.center = t.center.add(shift);
        }
        self
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for t in &mut self.terms {
            t.amplitude *= factor;
        }
        self
    }

    pub fn plus(mut self, other: FieldSpec) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[RadialTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude == 0.0)
    }

    pub fn value(&self, x: &SpacePoint) -> f64 {
        self.terms
            .iter()
            .map(|t| t.amplitude * t.profile.value(x.distance(&t.center)))
            .sum()
    }

    pub(crate) fn value_at(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let r = x
                    .iter()
                    .zip(t.center.coords())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                t.amplitude * t.profile.value(r)
            })
            .sum()
    }

    pub fn laplacian(&self, x: &SpacePoint) -> f64 {
        self.terms
            .iter()
            .map(|t| t.amplitude * t.profile.jet(x.distance(&t.center)).laplacian(self.dim))
            .sum()
    }

    /// The common center when every term is radial about the same point.
    pub fn common_center(&self) -> Option<&SpacePoint> {
        let first = &self.terms.first()?.center;
        self.terms.iter().all(|t| &t.center == first).then_some(first)
    }

    /// Splits the field into sub-fields, each radial about one center, in
    /// order of first appearance.
    pub fn center_groups(&self) -> Vec<FieldSpec> {
        let mut groups: Vec<FieldSpec> = Vec::new();
        for term in &self.terms {
            match groups.iter_mut().find(|g| g.terms[0].center == term.center) {
                Some(g) => g.terms.push(term.clone()),
                None => groups.push(FieldSpec {
                    dim: self.dim,
                    terms: vec![term.clone()],
                }),
            }
        }
        groups
    }

    /// View of a field radial about a single center.
    pub(crate) fn as_radial(&self) -> Option<RadialView<'_>> {
        let center = self.common_center()?;
        Some(RadialView {
            terms: &self.terms,
            center,
        })
    }

    /// Supremum of |u| estimated on the profiles (exact for the catalog's
    /// decreasing profiles).
    pub fn sup_norm(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let peak = match &t.profile {
                    Profile::PowerLaw { .. } => f64::INFINITY,
                    Profile::Samples(s) => s.values.iter().fold(0.0f64, |m, v| m.max(v.abs())),
                    p => p.value(0.0).abs(),
                };
                t.amplitude.abs() * peak
            })
            .sum()
    }
}

/// Radial combination about a single center, seen as a function of radius.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RadialView<'a> {
    terms: &'a [RadialTerm],
    pub center: &'a SpacePoint,
}

impl<'a> RadialView<'a> {
    pub fn from_term(term: &'a RadialTerm) -> Self {
        RadialView {
            terms: std::slice::from_ref(term),
            center: &term.center,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.terms.iter().map(|t| t.amplitude * t.profile.value(r)).sum()
    }

    pub fn jet(&self, r: f64) -> Jet {
        self.terms
            .iter()
            .fold(Jet::default(), |acc, t| acc.add(t.profile.jet(r).scaled(t.amplitude)))
    }

    pub fn support(&self) -> Option<f64> {
        self.terms
            .iter()
            .map(|t| t.profile.support())
            .try_fold(0.0f64, |m, s| s.map(|s| m.max(s)))
    }

    pub fn decay(&self) -> Option<f64> {
        self.terms
            .iter()
            .filter_map(|t| t.profile.decay())
            .reduce(f64::min)
    }

    pub fn head_exponent(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.profile.head_exponent())
            .fold(0.0, f64::min)
    }

    pub fn singular_at_origin(&self) -> bool {
        self.terms.iter().any(|t| t.profile.singular_at_origin())
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.terms.iter().flat_map(|t| t.profile.breakpoints()).collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    pub fn scale_at(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.profile.scale_at(r))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn scale_range(&self) -> (f64, f64) {
        self.terms
            .iter()
            .map(|t| t.profile.scale_range())
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude == 0.0)
    }
}
