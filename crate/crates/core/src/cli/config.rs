//! Run configuration, loaded from TOML and overridden by command-line flags.

use std::f64::consts::PI;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geometry::SpacePoint;
use crate::quadrature::{FieldSpec, QuadratureSpec};
use crate::representation::KernelKind;
use crate::spectral::ProblemParams;

/// θ used by every command except `constants` when neither θ nor γ is set.
pub const DEFAULT_THETA: f64 = 1.0 / PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsBlock {
    #[serde(rename = "N")]
    pub dim: usize,
    pub s: f64,
    pub theta: Option<f64>,
    pub gamma: Option<f64>,
}

impl Default for ParamsBlock {
    fn default() -> Self {
        ParamsBlock {
            dim: 3,
            s: 0.5,
            theta: None,
            gamma: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsBlock {
    /// Number of γ values, spread over (0, (N−2s)/2).
    pub gamma_points: usize,
}

impl Default for ConstantsBlock {
    fn default() -> Self {
        ConstantsBlock { gamma_points: 11 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelBlock {
    /// Point pairs `[x, y]`; empty selects the built-in grid.
    pub pairs: Vec<[Vec<f64>; 2]>,
    /// Time at which the heat profile is tabulated.
    pub time: f64,
    /// Resolvent parameter α.
    pub alpha: f64,
}

impl Default for KernelBlock {
    fn default() -> Self {
        KernelBlock {
            pairs: Vec::new(),
            time: 1.0,
            alpha: 1.0,
        }
    }
}

/// One compactly supported bump `amplitude·φ_R(x − center)`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub center: Vec<f64>,
    pub radius: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

pub(crate) fn bumps_to_field(dim: usize, bumps: &[BumpSpec]) -> Result<FieldSpec> {
    let mut f = FieldSpec::zero(dim);
    for b in bumps {
        let c = SpacePoint::new(b.center.clone());
        c.check_dim(dim)?;
        f = f.plus(FieldSpec::bump(c, b.radius)?.scaled(b.amplitude));
    }
    Ok(f)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyBlock {
    /// Radii of the fundamental-solution residual grid.
    pub residual_radii: Vec<f64>,
    /// Multiplies θ inside P for the residual; 0.5 is the sensitivity control.
    pub theta_scale: f64,
    /// Near-optimizer ε values of the Hardy sweep.
    pub hardy_eps: Vec<f64>,
    /// Distance from the origin of the slope-fit density.
    pub slope_distance: f64,
    pub slope_radius: f64,
    /// Bump distance from the origin and radius for the integrability check.
    pub integrability_distance: f64,
    pub integrability_radius: f64,
}

impl Default for VerifyBlock {
    fn default() -> Self {
        VerifyBlock {
            residual_radii: vec![0.5, 0.75, 1.0, 1.5, 2.0],
            theta_scale: 1.0,
            hardy_eps: vec![0.2, 0.1, 0.05],
            slope_distance: 5000.0,
            slope_radius: 2000.0,
            integrability_distance: 1.0,
            integrability_radius: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum KernelChoice {
    RieszExact,
    Surrogate,
    ResolventSurrogate,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveBlock {
    pub kernel: KernelChoice,
    pub alpha: f64,
    /// The density; an empty list is φ = 0.
    pub density: Vec<BumpSpec>,
    /// Evaluation radii along `direction`.
    pub radii: Vec<f64>,
    pub direction: Option<Vec<f64>>,
}

impl Default for SolveBlock {
    fn default() -> Self {
        SolveBlock {
            kernel: KernelChoice::Surrogate,
            alpha: 1.0,
            density: Vec::new(),
            radii: (0..9).map(|i| 10f64.powf(-3.0 + i as f64 / 8.0)).collect(),
            direction: None,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub format: Option<Format>,
    pub path: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureBlock {
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub max_depth: usize,
    pub rel_tol: f64,
    pub angular_order: usize,
}

impl Default for QuadratureBlock {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        QuadratureBlock {
            inner_radius: q.inner_radius,
            outer_radius: q.outer_radius,
            max_depth: q.max_depth,
            rel_tol: q.rel_tol,
            angular_order: q.angular_order,
        }
    }
}

/// Everything a command needs.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsBlock,
    pub quadrature: QuadratureBlock,
    pub constants: ConstantsBlock,
    pub kernel: KernelBlock,
    pub verify: VerifyBlock,
    pub solve: SolveBlock,
    pub output: OutputBlock,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Domain(format!("config: {}", e.message())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn quad(&self) -> QuadratureSpec {
        let q = &self.quadrature;
        QuadratureSpec {
            inner_radius: q.inner_radius,
            outer_radius: q.outer_radius,
            max_depth: q.max_depth,
            rel_tol: q.rel_tol,
            angular_order: q.angular_order,
        }
    }

    /// Parameters with θ (or γ) if one was given.
    pub fn optional_params(&self) -> Result<Option<ProblemParams>> {
        let p = &self.params;
        match (p.theta, p.gamma) {
            (Some(_), Some(_)) => Err(Error::Domain("give either θ or γ, not both".into())),
            (Some(t), None) => ProblemParams::new(p.dim, p.s, t).map(Some),
            (None, Some(g)) => ProblemParams::from_gamma(p.dim, p.s, g).map(Some),
            (None, None) => Ok(None),
        }
    }

    /// Parameters, falling back to θ = 1/π.
    pub fn params(&self) -> Result<ProblemParams> {
        match self.optional_params()? {
            Some(p) => Ok(p),
            None => ProblemParams::new(self.params.dim, self.params.s, DEFAULT_THETA),
        }
    }

    pub fn solve_kernel(&self) -> KernelKind {
        match self.solve.kernel {
            KernelChoice::RieszExact => KernelKind::RieszExact,
            KernelChoice::Surrogate => KernelKind::Surrogate,
            KernelChoice::ResolventSurrogate => KernelKind::ResolventSurrogate { alpha: self.solve.alpha },
        }
    }

    /// Checks everything that does not depend on the command.
    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        if p.dim == 0 {
            return Err(Error::Domain("N must be at least 1".into()));
        }
        if !(p.s > 0.0 && p.s < 1.0) {
            return Err(Error::Domain(format!("s = {} must lie in (0, 1)", p.s)));
        }
        if !(p.dim as f64 > 2.0 * p.s) {
            return Err(Error::Domain(format!("N = {} must exceed 2s = {}", p.dim, 2.0 * p.s)));
        }
        self.optional_params()?;
        self.quad().validate()?;
        if self.constants.gamma_points == 0 {
            return Err(Error::Domain("constants.gamma_points must be positive".into()));
        }
        let v = &self.verify;
        sorted_positive("verify.residual_radii", &v.residual_radii)?;
        if v.hardy_eps.is_empty() || v.hardy_eps.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::Domain("verify.hardy_eps must be a nonempty list of positive values".into()));
        }
        if !(v.theta_scale > 0.0) {
            return Err(Error::Domain("verify.theta_scale must be positive".into()));
        }
        for (name, d, r) in [
            ("slope", v.slope_distance, v.slope_radius),
            ("integrability", v.integrability_distance, v.integrability_radius),
        ] {
            if !(r > 0.0 && d >= 0.0) {
                return Err(Error::Domain(format!("verify.{name}_distance/radius must be non-negative/positive")));
            }
        }
        sorted_positive("solve.radii", &self.solve.radii)?;
        if !(self.solve.alpha > 0.0) {
            return Err(Error::Domain("solve.alpha must be positive".into()));
        }
        if let Some(d) = &self.solve.direction {
            if d.len() != p.dim || d.iter().all(|c| *c == 0.0) {
                return Err(Error::Domain("solve.direction must be a nonzero vector of length N".into()));
            }
        }
        for b in &self.solve.density {
            if b.center.len() != p.dim || !(b.radius > 0.0) {
                return Err(Error::Domain("each solve.density entry needs an N-vector center and a positive radius".into()));
            }
        }
        if !(self.kernel.time > 0.0 && self.kernel.alpha > 0.0) {
            return Err(Error::Domain("kernel.time and kernel.alpha must be positive".into()));
        }
        for [x, y] in &self.kernel.pairs {
            if x.len() != p.dim || y.len() != p.dim {
                return Err(Error::Domain("every kernel pair needs two N-vectors".into()));
            }
        }
        Ok(())
    }
}

fn sorted_positive(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() || v[0] <= 0.0 || v.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(format!("{name} must be nonempty, positive and strictly increasing")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_blocks() {
        let cfg = RunConfig::from_toml("").unwrap();
        assert_eq!(cfg.params.dim, 3);
        assert!(cfg.optional_params().unwrap().is_none());
        assert!((cfg.params().unwrap().theta() - DEFAULT_THETA).abs() < 1e-15);
        let cfg = RunConfig::from_toml(
            "[params]\nN = 2\ns = 0.4\ngamma = 0.3\n[verify]\ntheta_scale = 0.5\n[solve]\nkernel = \"riesz_exact\"\ndensity = [{ center = [1.0, 0.0], radius = 0.5 }]\n",
        )
        .unwrap();
        assert!((cfg.params().unwrap().gamma() - 0.3).abs() < 1e-12);
        assert_eq!(cfg.solve_kernel(), KernelKind::RieszExact);
        assert_eq!(cfg.solve.density[0].amplitude, 1.0);
    }

    #[test]
    fn malformed_configs_are_rejected() {
        for bad in [
            "[params]\nN = 3\ns = 1.5\n",
            "[params]\nN = 1\ns = 0.5\n",
            "[params]\nN = 3\ns = 0.5\ntheta = 2.0\n",
            "[params]\nN = 3\ns = 0.5\ntheta = 0.1\ngamma = 0.1\n",
            "[verify]\nresidual_radii = [2.0, 1.0]\n",
            "[verify]\nunknown = 1\n",
            "[solve]\nradii = []\n",
            "not toml at all [",
        ] {
            assert!(matches!(RunConfig::from_toml(bad), Err(Error::Domain(_))), "{bad}");
        }
    }
}
