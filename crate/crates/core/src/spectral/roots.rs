//! Bracketed root finding: a few bisection steps, then Brent's method.

use crate::error::{Error, Result};

/// Outcome of a bracketed solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Finds a root of `f` in `[lo, hi]`, which must bracket a sign change.
///
/// `warm_bisections` halvings shrink the bracket before Brent's method runs
/// to `x_tol` (absolute) or an exact zero.
pub fn brent<F>(f: F, lo: f64, hi: f64, x_tol: f64, warm_bisections: usize, max_iter: usize) -> Result<Root>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(Root { x: a, residual: 0.0, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, residual: 0.0, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Convergence(format!(
            "interval [{lo}, {hi}] does not bracket a root (f = {fa:e}, {fb:e})"
        )));
    }

    let mut iterations = 0;
    for _ in 0..warm_bisections {
        let m = 0.5 * (a + b);
        let fm = f(m);
        iterations += 1;
        if fm == 0.0 {
            return Ok(Root { x: m, residual: 0.0, iterations });
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }

    // Brent, following the classic zeroin layout: b is the best estimate,
    // c the previous contrapoint.
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    while iterations < max_iter {
        iterations += 1;
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * x_tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(Root { x: b, residual: fb, iterations });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::Convergence(format!(
        "Brent iteration budget {max_iter} exhausted near x = {b}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15, 4, 100).unwrap();
        assert!((r.x - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn transcendental_root() {
        let r = brent(|x: f64| x.cos() - x, 0.0, 1.0, 1e-15, 0, 100).unwrap();
        assert!((r.x - 0.739_085_133_215_160_6).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_bracket() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 2, 50).is_err());
    }

    #[test]
    fn exact_endpoint() {
        let r = brent(|x| x - 1.0, 1.0, 3.0, 1e-12, 2, 50).unwrap();
        assert_eq!(r.x, 1.0);
    }
}
