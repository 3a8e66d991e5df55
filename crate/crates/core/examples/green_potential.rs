//! Surrogate Green potentials and their |x|^{−γ} blow-up at the origin.
//!
//! cargo run --release --example green_potential

use fractional_hardy::representation::{green_potential, origin_slope_fit, KernelKind};
use fractional_hardy::{FieldSpec, ProblemParams, QuadratureSpec, SpacePoint};

fn main() -> fractional_hardy::Result<()> {
    let quad = QuadratureSpec::default();
    let params = ProblemParams::new(3, 0.5, 1.0 / std::f64::consts::PI)?;
    let phi = FieldSpec::bump(SpacePoint::on_axis(3, 1.0), 0.5)?;
    let x = SpacePoint::new(vec![0.2, 0.3, 0.0]);
    for kind in [
        KernelKind::Surrogate,
        KernelKind::ResolventSurrogate { alpha: 1.0 },
        KernelKind::ResolventSurrogate { alpha: 10.0 },
    ] {
        let v = green_potential(&phi, &x, kind, &params, &quad)?;
        println!("{}: psi(x) = {:.8e} +- {:.1e}", kind.label(), v.value, v.error);
    }
    // the density sits far away so the constant part of ψ is small near 0
    let far = FieldSpec::bump(SpacePoint::on_axis(3, 5000.0), 2000.0)?;
    let fit = origin_slope_fit(&far, KernelKind::Surrogate, &params, &quad)?;
    println!("slope {:.5} vs -gamma {:.5} (rms {:.1e})", fit.slope, -params.gamma(), fit.rms);
    Ok(())
}
