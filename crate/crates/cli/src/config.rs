//! Sectioned key-value run configuration with CLI overrides.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use cusplab::profiles::{calibrate_epsilon, ProfileVariant};
use cusplab::solver::calibrate_h;
use cusplab::{Metric, Model, Profile};

pub const SCHEMA_VERSION: u32 = 1;

fn default_alpha() -> f64 {
    1.5
}
fn default_kappa() -> f64 {
    0.9
}
fn default_one() -> f64 {
    1.0
}
fn default_series_m() -> usize {
    60_000
}
fn default_depth() -> usize {
    1
}
fn default_exp_m() -> usize {
    50
}
fn default_k_max() -> usize {
    40
}
fn default_a_max() -> f64 {
    64.0
}
fn default_grid_points() -> usize {
    4000
}
fn default_sigma_min() -> f64 {
    1.0
}
fn default_sigma_max() -> f64 {
    400.0
}
fn default_d_min() -> f64 {
    1.0
}
fn default_d_max() -> f64 {
    1e4
}
fn default_d_points() -> usize {
    25
}
fn default_a_grid_points() -> usize {
    20
}
fn default_threads() -> usize {
    1
}
fn default_true() -> bool {
    true
}
fn default_out_dir() -> String {
    "out".into()
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    #[serde(default)]
    pub variant: Option<ProfileVariant>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    /// Ramp rate; omit to calibrate it from (alpha, kappa).
    #[serde(default)]
    pub epsilon0: Option<f64>,
}

impl Default for ProfileSection {
    fn default() -> Self {
        Self {
            variant: None,
            alpha: default_alpha(),
            kappa: default_kappa(),
            epsilon0: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "default_one")]
    pub s_p: f64,
    #[serde(default = "default_one")]
    pub l_h: f64,
    /// Junction defect applied once per syllable boundary.
    #[serde(default)]
    pub c: f64,
    /// Stripe depth of the metric.
    #[serde(default)]
    pub a: f64,
    /// Replace h by its smallest contracting power before solving.
    #[serde(default = "default_true")]
    pub auto_calibrate_h: bool,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            s_p: 1.0,
            l_h: 1.0,
            c: 0.0,
            a: 0.0,
            auto_calibrate_h: true,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    /// Truncation of one-letter and lattice sums.
    #[serde(default = "default_series_m")]
    pub series_m: usize,
    /// Cylinder depth of the level-1 discretization.
    #[serde(default = "default_depth")]
    pub depth: usize,
    /// Exponent truncation for level-1 states and word enumeration.
    #[serde(default = "default_exp_m")]
    pub exp_m: usize,
    /// Iterate budget for divergence diagnostics and certificates.
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    /// Upper end of the geometric bracket search for a*.
    #[serde(default = "default_a_max")]
    pub a_max: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_sigma_min")]
    pub sigma_min: f64,
    #[serde(default = "default_sigma_max")]
    pub sigma_max: f64,
    #[serde(default = "default_d_min")]
    pub d_min: f64,
    #[serde(default = "default_d_max")]
    pub d_max: f64,
    #[serde(default = "default_d_points")]
    pub d_points: usize,
    #[serde(default = "default_a_grid_points")]
    pub a_grid_points: usize,
    #[serde(default = "default_threads")]
    pub threads: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            series_m: default_series_m(),
            depth: default_depth(),
            exp_m: default_exp_m(),
            k_max: default_k_max(),
            a_max: default_a_max(),
            grid_points: default_grid_points(),
            sigma_min: default_sigma_min(),
            sigma_max: default_sigma_max(),
            d_min: default_d_min(),
            d_max: default_d_max(),
            d_points: default_d_points(),
            a_grid_points: default_a_grid_points(),
            threads: default_threads(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out_dir")]
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_out_dir(),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub profile: ProfileSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn load(path: Option<&str>) -> anyhow::Result<Self> {
        let cfg = match path {
            None => RunConfig::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("cannot read config {p}"))?;
                toml::from_str(&text).map_err(|e| anyhow::anyhow!("{p}: {e}"))?
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if !(self.profile.kappa > 0.0 && self.profile.kappa < 1.0) {
            bail!("profile.kappa must lie in (0, 1)");
        }
        if self.profile.alpha < 0.0 {
            bail!("profile.alpha must be nonnegative");
        }
        if self.model.s_p <= 0.0 || self.model.l_h <= 0.0 {
            bail!("model.s_p and model.l_h must be positive");
        }
        if self.model.c < 0.0 {
            bail!("model.c must be nonnegative");
        }
        if self.model.a < 0.0 {
            bail!("model.a must be nonnegative");
        }
        if self.solver.series_m < 1_000 {
            bail!("solver.series_m must be at least 1000");
        }
        if self.solver.depth < 1 {
            bail!("solver.depth must be at least 1");
        }
        if self.solver.exp_m < 2 {
            bail!("solver.exp_m must be at least 2");
        }
        if self.solver.threads == 0 {
            bail!("solver.threads must be positive");
        }
        Ok(())
    }

    /// Profile per the config; lemma22 ramps are calibrated when epsilon0 is
    /// omitted.
    pub fn profile(&self) -> anyhow::Result<Profile> {
        let variant = self.profile.variant.unwrap_or(ProfileVariant::Lemma22);
        Ok(match variant {
            ProfileVariant::PureLog => Profile::pure_log(),
            ProfileVariant::Remark24 => Profile::remark24(),
            ProfileVariant::Lemma22 => match self.profile.epsilon0 {
                Some(eps) => Profile::lemma22(self.profile.alpha, eps, self.profile.kappa),
                None => {
                    let report = calibrate_epsilon(self.profile.alpha, self.profile.kappa)?;
                    Profile::lemma22(self.profile.alpha, report.epsilon, self.profile.kappa)
                }
            },
        })
    }

    pub fn metric(&self) -> anyhow::Result<Metric> {
        Ok(Metric::new(self.model.a, self.profile()?))
    }

    /// Orbit model; `h` is replaced by its contracting power when calibration
    /// is enabled. Returns the model and the chosen power.
    pub fn calibrated_model(&self) -> anyhow::Result<(Model, usize)> {
        let model = Model::new(self.model.s_p, self.model.l_h, self.model.c, self.metric()?);
        if self.model.auto_calibrate_h {
            let (k, cal) = calibrate_h(&model, self.solver.series_m)?;
            Ok((cal, k))
        } else {
            Ok((model, 1))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected_with_position() {
        let err = toml::from_str::<RunConfig>("[profile]\nbogus = 1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.solver.series_m, cfg.solver.series_m);
    }
}
