//! Refinement study of ∫ψ²|x|^{−2s} for a surrogate potential.
//!
//! cargo run --release --example integrability

use fractional_hardy::representation::{hardy_integrability_check, KernelKind};
use fractional_hardy::{FieldSpec, ProblemParams, QuadratureSpec, SpacePoint};

fn main() -> fractional_hardy::Result<()> {
    let params = ProblemParams::new(3, 0.5, 1.0 / std::f64::consts::PI)?;
    let phi = FieldSpec::bump(SpacePoint::on_axis(3, 1.0), 0.5)?;
    let report = hardy_integrability_check(&phi, KernelKind::Surrogate, &params, &QuadratureSpec::default())?;
    for row in &report.rows {
        let cells: Vec<String> = row.cells.iter().map(|c| format!("{}={:.6}", c.name, c.value)).collect();
        println!("{:>10}  {}", row.label, cells.join(" "));
    }
    println!("{} (worst relative change {:.2e})", report.verdict(), report.statistic);
    Ok(())
}
