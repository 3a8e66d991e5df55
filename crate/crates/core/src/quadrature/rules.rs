//! One-dimensional rules: fixed Gauss–Legendre and a globally adaptive
//! Gauss–Kronrod (7/15) integrator.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};

/// A value together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Estimate { value, error }
    }

    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0 }
    }

    pub fn scale(self, factor: f64) -> Self {
        Estimate {
            value: self.value * factor,
            error: self.error * factor.abs(),
        }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
        }
    }
}

impl std::ops::Sub for Estimate {
    type Output = Estimate;
    fn sub(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value - rhs.value,
            error: self.error + rhs.error,
        }
    }
}

impl std::iter::Sum for Estimate {
    fn sum<I: Iterator<Item = Estimate>>(iter: I) -> Estimate {
        iter.fold(Estimate::default(), |a, b| a + b)
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// 15-point Kronrod estimate on [a, b] with the QUADPACK error heuristic.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Estimate> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    if !kronrod.is_finite() {
        return Err(Error::Singularity(format!(
            "non-finite integrand on [{a:e}, {b:e}]"
        )));
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let round = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(round);
    }
    Ok(Estimate::new(result, err))
}

/// Limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections applied to any initial panel.
    pub max_depth: usize,
    /// Cap on the number of live panels.
    pub max_intervals: usize,
}

impl AdaptiveOptions {
    pub fn new(rel_tol: f64, abs_tol: f64, max_depth: usize) -> Self {
        AdaptiveOptions {
            rel_tol,
            abs_tol,
            max_depth,
            max_intervals: 4000,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    est: Estimate,
    depth: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est
            .error
            .total_cmp(&other.est.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Integrates `f` over the polyline `points[0] < points[1] < …`, treating
/// each consecutive pair as an initial panel.
///
/// Panels are bisected worst-first until the summed error estimate drops
/// below `max(abs_tol, rel_tol·|I|)`. Fails with [`Error::Tolerance`] if the
/// depth or panel limits are exhausted first.
pub fn integrate<F: Fn(f64) -> f64>(f: F, points: &[f64], opts: &AdaptiveOptions) -> Result<Estimate> {
    let est = integrate_best_effort(&f, points, opts)?;
    let target = opts.abs_tol.max(opts.rel_tol * est.value.abs());
    if est.error > target {
        return Err(Error::Tolerance {
            estimate: est.value,
            error: est.error,
            requested: target,
        });
    }
    Ok(est)
}

/// As [`integrate`], but returns the final estimate even when the tolerance
/// was not reached.
pub fn integrate_best_effort<F: Fn(f64) -> f64>(
    f: &F,
    points: &[f64],
    opts: &AdaptiveOptions,
) -> Result<Estimate> {
    let mut heap = BinaryHeap::new();
    let mut frozen = Vec::new();
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b < a {
            return Err(Error::Domain(format!("integration points not increasing: {a} > {b}")));
        }
        if b == a {
            continue;
        }
        heap.push(Panel { a, b, est: gk15(f, a, b)?, depth: 0 });
    }
    let total = |heap: &BinaryHeap<Panel>, frozen: &[Panel]| -> Estimate {
        heap.iter().chain(frozen.iter()).map(|p| p.est).sum()
    };
    let mut sum = total(&heap, &frozen);
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * sum.value.abs());
        if sum.error <= target || heap.len() + frozen.len() >= opts.max_intervals {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if worst.depth >= opts.max_depth || mid <= worst.a || mid >= worst.b {
            frozen.push(worst);
            continue;
        }
        let left = gk15(f, worst.a, mid)?;
        let right = gk15(f, mid, worst.b)?;
        sum.value += left.value + right.value - worst.est.value;
        sum.error += left.error + right.error - worst.est.error;
        heap.push(Panel { a: worst.a, b: mid, est: left, depth: worst.depth + 1 });
        heap.push(Panel { a: mid, b: worst.b, est: right, depth: worst.depth + 1 });
    }
    Ok(total(&heap, &frozen))
}

type RuleCache = Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>;

fn rule_cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    assert!(n > 0, "Gauss–Legendre rule needs at least one node");
    let mut cache = rule_cache().lock().expect("rule cache poisoned");
    cache
        .entry(n)
        .or_insert_with(|| Arc::new(compute_gauss_legendre(n)))
        .clone()
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Fixed Gauss–Legendre sum of `f` over [a, b].
pub fn fixed_legendre<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    rule.0
        .iter()
        .zip(&rule.1)
        .map(|(x, w)| w * f(c + h * x))
        .sum::<f64>()
        * h
}
