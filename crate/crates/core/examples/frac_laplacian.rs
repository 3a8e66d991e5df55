//! Pointwise (−Δ)^s by singular quadrature, against closed forms.
//!
//! cargo run --release --example frac_laplacian

use fractional_hardy::quadrature::{frac_laplacian_at, frac_laplacian_power_law, truncation_budget};
use fractional_hardy::spectral::gamma::gamma;
use fractional_hardy::{FieldSpec, ProblemParams, QuadratureSpec, SpacePoint};

fn main() -> fractional_hardy::Result<()> {
    let quad = QuadratureSpec::default();
    let (n, s) = (3usize, 0.5);
    let params = ProblemParams::riesz(n, s)?;
    let nf = n as f64;

    // (1+|x|²)^{−(N−2s)/2} ↦ 4^s Γ((N+2s)/2)/Γ((N−2s)/2) (1+|x|²)^{−(N+2s)/2}
    let bubble = FieldSpec::bubble(n, s);
    let k = 4f64.powf(s) * gamma((nf + 2.0 * s) / 2.0)? / gamma((nf - 2.0 * s) / 2.0)?;
    for r in [0.0, 0.5, 2.0] {
        let x = SpacePoint::on_axis(n, r);
        let got = frac_laplacian_at(&bubble, &x, &params, &quad)?;
        let want = k * (1.0 + r * r).powf(-(nf + 2.0 * s) / 2.0);
        println!("bubble r={r}: {:.12} vs {:.12} (est. error {:.1e})", got.value, want, got.error);
    }

    // truncated |x|^{−α}: closed multiplier up to the truncation budget
    let alpha = 1.2;
    let u = FieldSpec::truncated_power_law(n, alpha, 1e-5, 1e3)?;
    for r in [0.5, 1.0, 2.0] {
        let x = SpacePoint::new(vec![r * 0.6, r * 0.8, 0.0]);
        let got = frac_laplacian_at(&u, &x, &params, &quad)?;
        let want = frac_laplacian_power_law(alpha, &x, &params)?;
        let budget = truncation_budget(&u, &x, &params)?;
        println!(
            "power law r={r}: |diff|/want = {:.2e}, budget/want = {:.2e}",
            (got.value - want).abs() / want,
            budget / want
        );
    }
    Ok(())
}
