use fractional_hardy::kernel::{
    green_surrogate, green_surrogate_product, green_time_integral, green_time_quadrature, heat_profile,
    resolvent_profile_integral, riesz_kernel,
};
use fractional_hardy::operator::{apply_p, energy_form};
use fractional_hardy::quadrature::frac_laplacian_at;
use fractional_hardy::representation::{green_potential, KernelKind};
use fractional_hardy::spectral::{
    critical_gamma, frac_laplacian_normalizer, gamma_of_theta, riesz_normalization, sharp_hardy_constant, theta_of_gamma,
};
use fractional_hardy::{FieldSpec, ProblemParams, QuadratureSpec, SpacePoint};
use proptest::prelude::*;

/// (N, s) with N ≤ 10, s ∈ (0, 1), N > 2s.
fn dim_order() -> impl Strategy<Value = (usize, f64)> {
    (1usize..=10, 0.02f64..0.98).prop_filter("N > 2s", |(n, s)| *n as f64 > 2.0 * s)
}

fn point(dim: usize, lo: f64, hi: f64) -> impl Strategy<Value = SpacePoint> {
    (prop::collection::vec(-1.0f64..1.0, dim), lo..hi).prop_filter_map("nonzero direction", |(v, r)| {
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        (n > 1e-3).then(|| SpacePoint::new(v.iter().map(|c| c * r / n).collect()))
    })
}

/// A random point pair in dimension 1..=5 with valid (s, γ).
fn kernel_case() -> impl Strategy<Value = (ProblemParams, SpacePoint, SpacePoint)> {
    (1usize..=5, 0.05f64..0.95, 0.0f64..0.95)
        .prop_filter("N > 2s", |(n, s, _)| *n as f64 > 2.0 * s)
        .prop_flat_map(|(n, s, frac)| {
            let p = ProblemParams::from_gamma(n, s, frac * critical_gamma(n, s)).unwrap();
            (Just(p), point(n, 0.05, 3.0), point(n, 0.05, 3.0))
        })
        .prop_filter("distinct", |(_, x, y)| x.distance(y) > 1e-3)
}

proptest! {
    #[test]
    fn constants_positive_and_finite((n, s) in dim_order()) {
        for v in [
            sharp_hardy_constant(n, s).unwrap(),
            frac_laplacian_normalizer(n, s).unwrap(),
            riesz_normalization(n, s).unwrap(),
            critical_gamma(n, s),
        ] {
            prop_assert!(v.is_finite() && v > 0.0, "{v}");
        }
    }

    #[test]
    fn theta_strictly_increasing_with_sharp_endpoint((n, s) in dim_order()) {
        let top = critical_gamma(n, s);
        let grid: Vec<f64> = (1..=100).map(|i| theta_of_gamma(top * (i as f64 / 100.0), n, s).unwrap()).collect();
        prop_assert!(grid.windows(2).all(|w| w[1] > w[0]));
        let lambda = sharp_hardy_constant(n, s).unwrap();
        prop_assert!((grid[99] - lambda).abs() <= 1e-10 * lambda);
    }

    #[test]
    fn gamma_theta_round_trip((n, s) in dim_order(), frac in 0.001f64..0.999) {
        let g = frac * critical_gamma(n, s);
        let back = gamma_of_theta(theta_of_gamma(g, n, s).unwrap(), n, s).unwrap();
        prop_assert!((back - g).abs() <= 1e-10);
    }

    #[test]
    fn surrogate_forms_agree((p, x, y) in kernel_case()) {
        let g = green_surrogate(&x, &y, &p).unwrap();
        prop_assert!((g.product_form - g.expanded_form).abs() <= 1e-12 * g.expanded_form);
    }

    #[test]
    fn kernels_symmetric_and_positive((p, x, y) in kernel_case(), t in 1e-3f64..1e2) {
        let q = QuadratureSpec::default();
        let pairs = [
            (heat_profile(t, &x, &y, &p).unwrap(), heat_profile(t, &y, &x, &p).unwrap()),
            (green_surrogate_product(&x, &y, &p).unwrap(), green_surrogate_product(&y, &x, &p).unwrap()),
            (green_time_integral(&x, &y, &p).unwrap(), green_time_integral(&y, &x, &p).unwrap()),
            (
                resolvent_profile_integral(1.0, &x, &y, &p, &q).unwrap(),
                resolvent_profile_integral(1.0, &y, &x, &p, &q).unwrap(),
            ),
            (riesz_kernel(&x, &y, &p).unwrap(), riesz_kernel(&y, &x, &p).unwrap()),
        ];
        for (a, b) in pairs {
            prop_assert!(a > 0.0 && a.is_finite());
            prop_assert!((a - b).abs() <= 1e-12 * a, "{a} {b}");
        }
    }

    #[test]
    fn surrogate_blows_up_monotonically((p, x, y) in kernel_case()) {
        // y → x radially from outside, so |x − y| and |y| both shrink
        let along: Vec<f64> = [0.5, 5e-2, 5e-3, 5e-4, 5e-5]
            .iter()
            .map(|&r| green_surrogate_product(&x, &x.scaled(1.0 + r), &p).unwrap())
            .collect();
        prop_assert!(along.windows(2).all(|w| w[1] > w[0]), "{along:?}");
        if p.gamma() > 0.0 {
            // x = −t·y keeps |x − y| shrinking as well
            let shrink: Vec<f64> = [0.5, 1e-2, 1e-4, 1e-6]
                .iter()
                .map(|&t| green_surrogate_product(&y.scaled(-t), &y, &p).unwrap())
                .collect();
            prop_assert!(shrink.windows(2).all(|w| w[1] > w[0]), "{shrink:?}");
        }
    }

    #[test]
    fn symmetrized_difference_is_quadratic(dim in 1usize..=4, x in -2.0f64..2.0, h in 1e-4f64..1e-1) {
        // |2u(x) − u(x+z) − u(x−z)| ≤ sup|D²u|·|z|² for the bubble
        let u = FieldSpec::bubble(dim, 0.5);
        let a = (dim as f64 - 1.0) / 2.0;
        let hess = 2.0 * a * (2.0 * a + 3.0);
        let x = SpacePoint::on_axis(dim, x);
        let z = SpacePoint::new((0..dim).map(|i| if i == 0 { h * 0.6 } else { h * 0.8 / (dim as f64 - 1.0).sqrt() }).collect());
        let d2 = 2.0 * u.value(&x) - u.value(&x.add(&z)) - u.value(&x.sub(&z));
        prop_assert!(d2.abs() <= hess * z.norm().powi(2) + 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn closed_time_integral_matches_quadrature((p, x, y) in kernel_case()) {
        let q = green_time_quadrature(&x, &y, &p, &QuadratureSpec::default()).unwrap();
        let c = green_time_integral(&x, &y, &p).unwrap();
        prop_assert!((q.value - c).abs() <= 1e-6 * c);
    }

    #[test]
    fn flap_is_rotation_invariant(dim in 2usize..=4, s in 0.1f64..0.9, a in point(4, 0.2, 3.0), b in point(4, 0.1, 1.0)) {
        let p = ProblemParams::riesz(dim, s).unwrap();
        let q = QuadratureSpec::default();
        let u = FieldSpec::gaussian(dim, 0.7).unwrap();
        let r = a.norm();
        let x1 = SpacePoint::on_axis(dim, r);
        let mut c = b.coords()[..dim].to_vec();
        let n = c.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-9);
        c.iter_mut().for_each(|v| *v *= r / n);
        let x2 = SpacePoint::new(c);
        prop_assume!((x2.norm() - r).abs() < 1e-12 * r);
        let v1 = frac_laplacian_at(&u, &x1, &p, &q).unwrap().value;
        let v2 = frac_laplacian_at(&u, &x2, &p, &q).unwrap().value;
        prop_assert!((v1 - v2).abs() <= 1e-8 * v1.abs().max(1e-8));
    }

    #[test]
    fn halving_tolerance_stays_within_error(dim in 1usize..=4, s in 0.1f64..0.9, r in 0.0f64..3.0) {
        prop_assume!(dim as f64 > 2.0 * s);
        let p = ProblemParams::riesz(dim, s).unwrap();
        let u = FieldSpec::bubble(dim, s);
        let x = SpacePoint::on_axis(dim, r);
        let q = QuadratureSpec::default();
        let fine = QuadratureSpec { rel_tol: q.rel_tol * 0.5, ..q.clone() };
        let a = frac_laplacian_at(&u, &x, &p, &q).unwrap();
        let b = frac_laplacian_at(&u, &x, &p, &fine).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.error, "{a:?} {b:?}");
    }

    #[test]
    fn apply_p_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, x in point(3, 0.2, 2.0)) {
        let p = ProblemParams::new(3, 0.5, 0.3).unwrap();
        let q = QuadratureSpec::default();
        let f = FieldSpec::bump(SpacePoint::on_axis(3, 0.5), 1.0).unwrap();
        let g = FieldSpec::gaussian(3, 0.8).unwrap();
        let lhs = apply_p(&f.clone().scaled(a).plus(g.clone().scaled(b)), &x, &p, &q).unwrap();
        let pf = apply_p(&f, &x, &p, &q).unwrap();
        let pg = apply_p(&g, &x, &p, &q).unwrap();
        let rhs = a * pf.p_value + b * pg.p_value;
        let tol = lhs.error_estimate + a.abs() * pf.error_estimate + b.abs() * pg.error_estimate + 1e-12;
        prop_assert!((lhs.p_value - rhs).abs() <= tol);
    }

    #[test]
    fn modified_form_is_nonnegative(frac in 0.0f64..0.999, shift in 0.0f64..1.5, radius in 0.3f64..2.0) {
        let lambda = sharp_hardy_constant(3, 0.5).unwrap();
        let p = ProblemParams::new(3, 0.5, frac * lambda).unwrap();
        let f = FieldSpec::bump(SpacePoint::on_axis(3, shift), radius).unwrap();
        let form = energy_form(&f, &p, &QuadratureSpec::default()).unwrap();
        prop_assert_eq!(form.tilde_energy.value, form.energy.value - form.hardy_term.value);
        prop_assert!(form.tilde_energy.value >= -form.tilde_energy.error);
    }

    #[test]
    fn potentials_linear_positive_and_alpha_ordered(
        a in 0.1f64..2.0,
        b in 0.1f64..2.0,
        x in point(3, 0.05, 3.0),
        alphas in (0.05f64..5.0, 0.05f64..5.0),
    ) {
        let p = ProblemParams::new(3, 0.5, 0.25).unwrap();
        let q = QuadratureSpec::default();
        let f = FieldSpec::bump(SpacePoint::on_axis(3, 1.0), 0.6).unwrap();
        let g = FieldSpec::bump(SpacePoint::new(vec![-0.5, 1.0, 0.0]), 0.4).unwrap();
        let psi = |h: &FieldSpec, k| green_potential(h, &x, k, &p, &q).unwrap();
        let (pf, pg) = (psi(&f, KernelKind::Surrogate), psi(&g, KernelKind::Surrogate));
        let sum = psi(&f.clone().scaled(a).plus(g.clone().scaled(b)), KernelKind::Surrogate);
        prop_assert!(pf.value > 0.0 && pg.value > 0.0);
        prop_assert!((sum.value - a * pf.value - b * pg.value).abs() <= sum.error + a * pf.error + b * pg.error + 1e-12);
        let (hi, lo) = if alphas.0 >= alphas.1 { alphas } else { (alphas.1, alphas.0) };
        let v_hi = psi(&f, KernelKind::ResolventSurrogate { alpha: hi });
        let v_lo = psi(&f, KernelKind::ResolventSurrogate { alpha: lo });
        prop_assert!(v_hi.value <= v_lo.value + v_hi.error + v_lo.error);
    }

    #[test]
    fn narrow_bump_potential_is_symmetric(x in point(3, 0.3, 2.0), y in point(3, 0.3, 2.0)) {
        prop_assume!(x.distance(&y) > 0.2);
        let p = ProblemParams::new(3, 0.5, 0.25).unwrap();
        let q = QuadratureSpec::default();
        let width = 1e-3;
        let at_y = FieldSpec::bump(y.clone(), width).unwrap();
        let at_x = FieldSpec::bump(x.clone(), width).unwrap();
        let a = green_potential(&at_y, &x, KernelKind::Surrogate, &p, &q).unwrap().value;
        let b = green_potential(&at_x, &y, KernelKind::Surrogate, &p, &q).unwrap().value;
        // both approximate mass·G(x, y); the difference is second order in the width
        prop_assert!((a - b).abs() <= 1e-4 * a, "{a} {b}");
    }
}
