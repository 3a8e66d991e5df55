//! Energy form and Hardy ratio 𝓔(f)/∫f²|x|^{−2s} against the sharp constant.
//!
//! cargo run --release --example hardy_ratio

use fractional_hardy::operator::{energy_form, hardy_ratio, near_optimizer};
use fractional_hardy::{FieldSpec, ProblemParams, QuadratureSpec, SpacePoint};

fn main() -> fractional_hardy::Result<()> {
    let params = ProblemParams::new(3, 0.5, 0.2)?;
    let quad = QuadratureSpec::default();
    let lambda = params.sharp_constant();
    let bump = FieldSpec::bump(SpacePoint::on_axis(3, 0.5), 1.0)?;
    let form = energy_form(&bump, &params, &quad)?;
    println!(
        "bump: energy {:.6} hardy term {:.6} P-form {:.6} (nonnegative since theta < Lambda)",
        form.energy.value, form.hardy_term.value, form.tilde_energy.value
    );
    for (name, f) in [("bump", bump), ("gaussian", FieldSpec::gaussian(3, 1.0)?)] {
        let r = hardy_ratio(&f, &params, &quad)?;
        println!("{name}: ratio / Lambda = {:.6}", r.value / lambda);
    }
    for eps in [0.2, 0.1, 0.05] {
        let r = hardy_ratio(&near_optimizer(3, 0.5, eps)?, &params, &quad)?;
        println!("near optimizer eps={eps}: ratio / Lambda = {:.6}", r.value / lambda);
    }
    Ok(())
}
