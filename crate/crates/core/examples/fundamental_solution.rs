//! P|x|^{−(N−2s−γ)} = 0 away from the origin, and the wrong-θ control.
//!
//! cargo run --release --example fundamental_solution

use fractional_hardy::operator::{fundamental_residual, fundamental_residual_with};
use fractional_hardy::{ProblemParams, QuadratureSpec, SpacePoint};

fn main() -> fractional_hardy::Result<()> {
    let params = ProblemParams::new(3, 0.5, 1.0 / std::f64::consts::PI)?;
    let quad = QuadratureSpec::default();
    let grid: Vec<SpacePoint> = [0.5, 1.0, 1.5, 2.0].iter().map(|&r| SpacePoint::on_axis(3, r)).collect();
    let report = fundamental_residual(&grid, &params, &quad)?;
    for row in &report.rows {
        let cell = |n: &str| row.get(n).map_or(f64::NAN, |c| c.value);
        println!(
            "{}: P = {:.3e}, budget = {:.3e}, residual = {:.3e}",
            row.label,
            cell("p_value"),
            cell("truncation_budget"),
            cell("residual")
        );
    }
    println!("{} (worst {:.2e})", report.verdict(), report.statistic);
    let control = fundamental_residual_with(&grid, &params, params.theta() / 2.0, &quad)?;
    println!("theta/2 control: {} (residual {:.4})", control.verdict(), control.statistic);
    Ok(())
}
