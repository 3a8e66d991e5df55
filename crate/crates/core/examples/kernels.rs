//! Heat-kernel comparison profile and the Green-function surrogates.
//!
//! cargo run --example kernels

use fractional_hardy::kernel::{
    green_surrogate, green_time_quadrature, heat_profile, resolvent_profile_integral, riesz_kernel,
};
use fractional_hardy::{ProblemParams, QuadratureSpec, SpacePoint};

fn main() -> fractional_hardy::Result<()> {
    let params = ProblemParams::new(3, 0.5, 1.0 / std::f64::consts::PI)?;
    let quad = QuadratureSpec::default();
    let x = SpacePoint::new(vec![0.5, 0.0, 0.0]);
    let y = SpacePoint::new(vec![-0.3, 0.8, 0.1]);
    println!("gamma = {}", params.gamma());
    for t in [0.01, 0.1, 1.0, 10.0] {
        println!("p~({t}, x, y) = {:.6e}", heat_profile(t, &x, &y, &params)?);
    }
    let g = green_surrogate(&x, &y, &params)?;
    println!("product form   {:.15e}", g.product_form);
    println!("expanded form  {:.15e}", g.expanded_form);
    let q = green_time_quadrature(&x, &y, &params, &quad)?;
    println!("time integral  {:.12e} (quadrature {:.12e} +- {:.1e})", g.closed_time_integral, q.value, q.error);
    for alpha in [0.1, 1.0, 10.0] {
        println!("resolvent alpha={alpha}: {:.6e}", resolvent_profile_integral(alpha, &x, &y, &params, &quad)?);
    }
    let riesz = ProblemParams::riesz(3, 0.5)?;
    println!("riesz kernel at theta=0: {:.6e}", riesz_kernel(&x, &y, &riesz)?);
    Ok(())
}
