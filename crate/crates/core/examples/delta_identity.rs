//! At θ = 0 the Riesz kernel inverts (−Δ)^s in both orders.
//!
//! cargo run --release --example delta_identity

use fractional_hardy::representation::{delta_identity_check, riesz_round_trip};
use fractional_hardy::{FieldSpec, ProblemParams, QuadratureSpec, SpacePoint};

fn main() -> fractional_hardy::Result<()> {
    let quad = QuadratureSpec::default();
    let params = ProblemParams::riesz(3, 0.5)?;
    let f = FieldSpec::bump(SpacePoint::on_axis(3, 1.0), 1.0)?;
    for x0 in [SpacePoint::on_axis(3, 1.0), SpacePoint::new(vec![1.3, 0.2, 0.0]), SpacePoint::on_axis(3, 2.5)] {
        let r = delta_identity_check(&f, &x0, &params, &quad, true)?;
        println!("x0={x0}: {} deviation {:.2e}", r.verdict(), r.statistic);
    }
    let points: Vec<SpacePoint> = (0..5).map(|i| SpacePoint::new(vec![0.6 + 0.2 * i as f64, 0.1, 0.0])).collect();
    let r = riesz_round_trip(&f, &points, &params, &quad)?;
    println!("(-Delta)^s of the Riesz potential: {} worst deviation {:.2e}", r.verdict(), r.statistic);

    // for θ > 0 only a comparability report is available
    let p = ProblemParams::new(3, 0.5, 0.2)?;
    let info = delta_identity_check(&f, &SpacePoint::on_axis(3, 1.1), &p, &quad, false)?;
    println!("theta=0.2 surrogate pairing (info only): {:?}", info.rows[0].get("ratio").map(|c| c.value));
    Ok(())
}
