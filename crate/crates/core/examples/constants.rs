//! Sharp Hardy constant, operator normalizers and the γ ↔ θ map.
//!
//! cargo run --example constants

use fractional_hardy::spectral::{
    critical_gamma, frac_laplacian_normalizer, gamma_of_theta, riesz_normalization, sharp_hardy_constant, theta_of_gamma,
};

fn main() -> fractional_hardy::Result<()> {
    for (n, s) in [(3, 0.5), (2, 0.4), (4, 0.75), (1, 0.25)] {
        let lambda = sharp_hardy_constant(n, s)?;
        println!(
            "N={n} s={s}: Lambda={lambda:.12} c={:.12} a={:.12}",
            frac_laplacian_normalizer(n, s)?,
            riesz_normalization(n, s)?
        );
        let top = critical_gamma(n, s);
        for k in 1..5 {
            let g = top * k as f64 / 5.0;
            let t = theta_of_gamma(g, n, s)?;
            println!("  gamma={g:.4} theta={t:.10} back={:.3e}", (gamma_of_theta(t, n, s)? - g).abs());
        }
        // θ(γ) reaches Λ at the critical exponent
        println!("  theta(gamma*)/Lambda = {:.15}", theta_of_gamma(top, n, s)? / lambda);
    }
    Ok(())
}
