//! Driving the command layer from a TOML config and rendering a report.
//!
//! cargo run --release --example run_config

use fractional_hardy::cli::{cmd_solve, cmd_verify, Format, RunConfig, Selection};

const CONFIG: &str = r#"
[params]
N = 3
s = 0.5
theta = 0.0

[solve]
kernel = "riesz_exact"
density = [{ center = [1.0, 0.0, 0.0], radius = 1.0 }]
radii = [0.25, 0.5, 1.0, 2.0]
"#;

fn main() -> fractional_hardy::Result<()> {
    let cfg = RunConfig::from_toml(CONFIG)?;
    print!("{}", cmd_solve(&cfg)?.render(Format::Csv)?);
    let only_delta = Selection {
        residual: false,
        hardy: false,
        delta: true,
        slope: false,
        integrability: false,
    };
    let doc = cmd_verify(&cfg, only_delta)?;
    println!("verify --delta passed: {:?}", doc.passed);
    Ok(())
}
