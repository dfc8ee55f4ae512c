//! Campaign configuration files (TOML, unknown keys rejected).

use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::besov::BesovParams;
use crate::error::{LabError, Result};
use crate::fd::FdSystem;
use crate::model::ModelParams;
use crate::operators::Domain;
use crate::semigroup::ContourSpec;
use crate::spectral::SpectralGrid;
use crate::verifier::{sector_arguments, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CampaignKind {
    ResolventSolve,
    SqrVerify,
    L1Quadrature,
    Duhamel,
    OracleCompare,
}

impl CampaignKind {
    pub const ALL: [CampaignKind; 5] = [
        CampaignKind::ResolventSolve,
        CampaignKind::SqrVerify,
        CampaignKind::L1Quadrature,
        CampaignKind::Duhamel,
        CampaignKind::OracleCompare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CampaignKind::ResolventSolve => "resolvent-solve",
            CampaignKind::SqrVerify => "sqr-verify",
            CampaignKind::L1Quadrature => "l1-quadrature",
            CampaignKind::Duhamel => "duhamel",
            CampaignKind::OracleCompare => "oracle-compare",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            CampaignKind::ResolventSolve => "solve the resolvent problem over a λ sweep and check residuals",
            CampaignKind::SqrVerify => "fit λ-decay slopes of the resolvent norm lines with negative controls",
            CampaignKind::L1Quadrature => "dyadic L1-in-time sums and envelope slopes of the Lamé semigroup",
            CampaignKind::Duhamel => "Stokes trajectory by contour inversion with a time-residual check",
            CampaignKind::OracleCompare => "spectral against finite-difference resolvent on a sector sample",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainChoice {
    #[default]
    WholeSpace,
    HalfSpace,
}

impl From<DomainChoice> for Domain {
    fn from(d: DomainChoice) -> Self {
        match d {
            DomainChoice::WholeSpace => Domain::WholeSpace,
            DomainChoice::HalfSpace => Domain::HalfSpace,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemChoice {
    #[default]
    Lame,
    Stokes,
}

impl From<SystemChoice> for FdSystem {
    fn from(s: SystemChoice) -> Self {
        match s {
            SystemChoice::Lame => FdSystem::Lame,
            SystemChoice::Stokes => FdSystem::Stokes,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn quarter_pi() -> f64 {
    FRAC_PI_4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default = "one")]
    pub rho_star: f64,
    #[serde(default = "one")]
    pub p_prime: f64,
    /// Amplitude `a` of the density perturbation `a·exp(−x_N²/4)`.
    #[serde(default)]
    pub eta_amplitude: f64,
}

impl ModelConfig {
    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.alpha, self.beta, self.rho_star, self.p_prime)
    }

    pub fn eta_profile(&self, x_normal: f64) -> f64 {
        self.eta_amplitude * (-x_normal * x_normal / 4.0).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Periodic lengths; for half-spaces the tangential ones.
    pub lengths: Vec<f64>,
    pub points: Vec<usize>,
    pub x_max: Option<f64>,
    pub normal_points: Option<usize>,
}

impl GridConfig {
    pub fn build(&self, domain: DomainChoice) -> Result<SpectralGrid> {
        match domain {
            DomainChoice::WholeSpace => {
                if self.x_max.is_some() || self.normal_points.is_some() {
                    return Err(config_error("grid", "x_max and normal_points only apply to half-spaces"));
                }
                SpectralGrid::periodic(&self.lengths, &self.points)
            }
            DomainChoice::HalfSpace => {
                let (Some(x), Some(n)) = (self.x_max, self.normal_points) else {
                    return Err(config_error("grid", "half-space grids need x_max and normal_points"));
                };
                SpectralGrid::half_space(&self.lengths, &self.points, x, n)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesovConfig {
    pub s: f64,
    pub q: f64,
    pub r: f64,
    pub sigma: f64,
}

impl BesovConfig {
    pub fn params(&self) -> Result<BesovParams> {
        BesovParams::new(self.s, self.q, self.r)?.with_sigma(self.sigma)
    }
}

fn twelve() -> u32 {
    12
}

fn one_u32() -> u32 {
    1
}

fn slope_tolerance() -> f64 {
    0.15
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// First `|λ|`; for Stokes sweeps left empty to use the estimated `λ3`.
    pub lambda_start: Option<f64>,
    #[serde(default = "twelve")]
    pub doublings: u32,
    #[serde(default = "one_u32")]
    pub per_octave: u32,
    #[serde(default = "quarter_pi")]
    pub epsilon: f64,
    /// Arguments of `λ`; defaults to `{0, ±(π−ε)/2, ±(π−ε)}`.
    pub args: Option<Vec<f64>>,
    #[serde(default = "slope_tolerance")]
    pub tolerance: f64,
}

impl SweepConfig {
    pub fn spec(&self, lambda_start: f64) -> Result<SweepSpec> {
        let mut spec = SweepSpec::standard(lambda_start, self.epsilon);
        spec.doublings = self.doublings;
        spec.per_octave = self.per_octave;
        spec.tolerance = self.tolerance;
        if let Some(a) = &self.args {
            spec.args = a.clone();
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn args(&self) -> Vec<f64> {
        self.args.clone().unwrap_or_else(|| sector_arguments(self.epsilon))
    }
}

fn forty() -> usize {
    40
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourConfig {
    pub gamma: f64,
    #[serde(default = "quarter_pi")]
    pub epsilon: f64,
    pub r_max: Option<f64>,
    #[serde(default = "forty")]
    pub nodes_per_decade: usize,
}

impl ContourConfig {
    pub fn spec(&self) -> Result<ContourSpec> {
        let mut c = ContourSpec::new(self.gamma, self.epsilon)?.with_nodes_per_decade(self.nodes_per_decade)?;
        if let Some(r) = self.r_max {
            c = c.with_r_max(r)?;
        }
        Ok(c)
    }
}

fn eight() -> usize {
    8
}

fn default_modes() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 96.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct L1Config {
    pub j_min: i32,
    pub j_max: i32,
    #[serde(default = "eight")]
    pub samples_per_block: usize,
    /// Blocks used for the envelope slope fit.
    pub fit: (i32, i32),
    /// Wavenumbers of the single-mode envelope probes.
    #[serde(default = "default_modes")]
    pub modes: Vec<f64>,
    /// Block range of the envelope probes.
    pub envelope_range: (i32, i32),
    /// Band limit of the seeded random data.
    #[serde(default = "eight")]
    pub band: usize,
}

fn residual_tolerance() -> f64 {
    1e-4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub start: f64,
    pub step: f64,
    pub count: usize,
    /// Scale of a seeded constant-in-time forcing; zero disables it.
    #[serde(default)]
    pub forcing_amplitude: f64,
    #[serde(default = "four")]
    pub band: usize,
    #[serde(default = "residual_tolerance")]
    pub tolerance: f64,
}

fn four() -> usize {
    4
}

fn six() -> f64 {
    6.0
}

fn default_refinements() -> Vec<usize> {
    vec![1, 2]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub dim: usize,
    #[serde(default = "six")]
    pub modulus: f64,
    /// Arguments of `λ`; defaults to `{0, ±0.9, ±1.8}`.
    pub args: Option<Vec<f64>>,
    pub fd_x_max: f64,
    pub fd_intervals: usize,
    /// Tangential FD points at refinement 1 (2D only).
    pub fd_tangential_points: Option<usize>,
    #[serde(default = "default_refinements")]
    pub refinements: Vec<usize>,
}

impl OracleConfig {
    pub fn args(&self) -> Vec<f64> {
        self.args.clone().unwrap_or_else(|| vec![0.0, 0.9, -0.9, 1.8, -1.8])
    }
}

fn solve_tolerance() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    #[serde(default = "solve_tolerance")]
    pub tolerance: f64,
    #[serde(default = "four")]
    pub band: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub name: String,
    pub kind: CampaignKind,
    #[serde(default)]
    pub system: SystemChoice,
    #[serde(default)]
    pub domain: DomainChoice,
    #[serde(default)]
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub model: ModelConfig,
    pub grid: Option<GridConfig>,
    pub besov: Option<BesovConfig>,
    pub sweep: Option<SweepConfig>,
    pub contour: Option<ContourConfig>,
    pub l1: Option<L1Config>,
    pub time: Option<TimeConfig>,
    pub oracle: Option<OracleConfig>,
    pub solve: Option<SolveConfig>,
}

pub(crate) fn config_error(field: &str, reason: impl Into<String>) -> LabError {
    LabError::Config { field: field.to_string(), reason: reason.into() }
}

pub(crate) fn require<'a, T>(v: &'a Option<T>, field: &str, kind: CampaignKind) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| config_error(field, format!("section required by {} campaigns", kind.name())))
}

/// Tags a parameter error with the config section it came from.
fn within<T>(field: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        LabError::Config { .. } => e,
        other => config_error(field, other.to_string()),
    })
}

impl CampaignConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text).map_err(|e| config_error("config", e.message().to_string()))?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config_error("config", e.to_string()))
    }

    /// Checks every section the campaign kind uses, naming the offending one.
    pub fn validate(&self) -> Result<()> {
        let kind = self.kind;
        if self.name.trim().is_empty() {
            return Err(config_error("name", "must not be empty"));
        }
        let model = within("model", self.model.params())?;
        if self.model.eta_amplitude != 0.0 {
            let (lo, hi) = (self.model.rho_star + self.model.eta_amplitude.min(0.0), self.model.rho_star + self.model.eta_amplitude.max(0.0));
            if !(lo >= model.rho1 && hi <= model.rho2) {
                return Err(config_error("model.eta_amplitude", "density leaves [ρ*/2, 2ρ*]"));
            }
        }
        let stokes = self.system == SystemChoice::Stokes;
        match kind {
            CampaignKind::ResolventSolve => {
                let grid = within("grid", require(&self.grid, "grid", kind)?.build(self.domain))?;
                let sweep = require(&self.sweep, "sweep", kind)?;
                let start = sweep.lambda_start.ok_or_else(|| config_error("sweep.lambda_start", "required"))?;
                within("sweep", sweep.spec(start))?;
                let solve = require(&self.solve, "solve", kind)?;
                if !(solve.tolerance > 0.0) || solve.band == 0 {
                    return Err(config_error("solve", "need tolerance > 0 and band ≥ 1"));
                }
                if self.model.eta_amplitude != 0.0 && !stokes {
                    return Err(config_error("model.eta_amplitude", "only the Stokes system carries a density"));
                }
                if self.model.eta_amplitude != 0.0 && grid.dim() != 1 {
                    return Err(config_error("model.eta_amplitude", "variable density is sampled on 1D grids only"));
                }
            }
            CampaignKind::SqrVerify => {
                within("besov", require(&self.besov, "besov", kind)?.params())?;
                let sweep = require(&self.sweep, "sweep", kind)?;
                match (sweep.lambda_start, stokes) {
                    (Some(l), _) => {
                        within("sweep", sweep.spec(l))?;
                    }
                    (None, true) => {
                        within("sweep", sweep.spec(1.0))?;
                    }
                    (None, false) => return Err(config_error("sweep.lambda_start", "required for Lamé sweeps")),
                }
                if stokes && self.domain == DomainChoice::HalfSpace {
                    return Err(config_error("domain", "Stokes sweeps run on the whole space"));
                }
                if self.model.eta_amplitude != 0.0 {
                    return Err(config_error("model.eta_amplitude", "sweeps use constant density"));
                }
            }
            CampaignKind::L1Quadrature => {
                let besov = within("besov", require(&self.besov, "besov", kind)?.params())?;
                let grid = within("grid", require(&self.grid, "grid", kind)?.build(DomainChoice::WholeSpace))?;
                if grid.dim() != 1 {
                    return Err(config_error("grid", "L1 campaigns run on a periodic line"));
                }
                if besov.q != 2.0 {
                    return Err(config_error("besov.q", "L1 campaigns use q = 2"));
                }
                within("contour", require(&self.contour, "contour", kind)?.spec())?;
                let l1 = require(&self.l1, "l1", kind)?;
                if l1.j_min >= l1.j_max || l1.samples_per_block == 0 || l1.band == 0 {
                    return Err(config_error("l1", "need j_min < j_max, samples and band ≥ 1"));
                }
                let (a, b) = l1.envelope_range;
                if !(a <= l1.fit.0 && l1.fit.0 + 2 <= l1.fit.1 && l1.fit.1 <= b) {
                    return Err(config_error("l1.fit", "needs at least 3 blocks inside envelope_range"));
                }
                let k_max = grid.points()[0] as f64 / 2.0;
                if l1.modes.len() < 2 || l1.modes.iter().any(|k| !(*k > 0.0 && *k < k_max && k.fract() == 0.0)) {
                    return Err(config_error("l1.modes", format!("need ≥ 2 integer wavenumbers in (0, {k_max})")));
                }
                if stokes || self.domain == DomainChoice::HalfSpace {
                    return Err(config_error("system", "L1 campaigns use the whole-space Lamé family"));
                }
            }
            CampaignKind::Duhamel => {
                if !stokes || self.domain != DomainChoice::WholeSpace {
                    return Err(config_error("system", "Duhamel campaigns use the whole-space Stokes system"));
                }
                within("grid", require(&self.grid, "grid", kind)?.build(DomainChoice::WholeSpace))?;
                within("contour", require(&self.contour, "contour", kind)?.spec())?;
                let t = require(&self.time, "time", kind)?;
                if !(t.start > 0.0 && t.step > 0.0) || t.count < 4 || t.band == 0 || !(t.tolerance > 0.0) {
                    return Err(config_error("time", "need start > 0, step > 0, count ≥ 4, band ≥ 1, tolerance > 0"));
                }
                if self.model.eta_amplitude != 0.0 {
                    return Err(config_error("model.eta_amplitude", "Duhamel campaigns use constant density"));
                }
            }
            CampaignKind::OracleCompare => {
                if self.domain != DomainChoice::HalfSpace {
                    return Err(config_error("domain", "oracle comparisons run on the half-space"));
                }
                let o = require(&self.oracle, "oracle", kind)?;
                let grid = within("grid", require(&self.grid, "grid", kind)?.build(DomainChoice::HalfSpace))?;
                if !(1..=2).contains(&o.dim) || grid.dim() != o.dim {
                    return Err(config_error("oracle.dim", "must be 1 or 2 and match the spectral grid"));
                }
                if (o.dim == 2) != o.fd_tangential_points.is_some() {
                    return Err(config_error("oracle.fd_tangential_points", "required exactly in 2D"));
                }
                if o.refinements.len() < 2 || o.refinements.windows(2).any(|w| w[1] != 2 * w[0]) {
                    return Err(config_error("oracle.refinements", "need ≥ 2 successive doublings"));
                }
                if !(o.modulus > 0.0) || !(o.fd_x_max > 0.0) || o.fd_intervals < 4 {
                    return Err(config_error("oracle", "need modulus > 0, fd_x_max > 0, fd_intervals ≥ 4"));
                }
                if grid.x_max().is_some_and(|x| x < o.fd_x_max) {
                    return Err(config_error("oracle.fd_x_max", "FD box must fit inside the spectral box"));
                }
                if self.model.eta_amplitude != 0.0 && (!stokes || o.dim != 1) {
                    return Err(config_error("model.eta_amplitude", "variable density is compared for 1D Stokes only"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQR: &str = r#"
name = "ws"
kind = "sqr-verify"

[model]
alpha = 1.0
beta = 0.5

[besov]
s = 0.0
q = 2.0
r = 2.0
sigma = 0.4

[sweep]
lambda_start = 4.0
"#;

    #[test]
    fn parses_and_round_trips() {
        let c = CampaignConfig::from_toml(SQR).unwrap();
        c.validate().unwrap();
        assert_eq!(c.sweep.as_ref().unwrap().doublings, 12);
        let back = CampaignConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let text = SQR.replace("sigma = 0.4", "sigma = 0.4\nsgima = 0.1");
        let err = CampaignConfig::from_toml(&text).unwrap_err();
        assert!(err.to_string().contains("sgima"), "{err}");
    }

    #[test]
    fn sigma_window_is_named() {
        let text = SQR.replace("sigma = 0.4", "sigma = 0.6");
        let err = CampaignConfig::from_toml(&text).unwrap().validate().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("besov") && msg.contains("-1 + 1/q < s - sigma"), "{msg}");
    }

    #[test]
    fn missing_section_is_named() {
        let text = SQR.replace("kind = \"sqr-verify\"", "kind = \"duhamel\"\nsystem = \"stokes\"");
        let err = CampaignConfig::from_toml(&text).unwrap().validate().unwrap_err();
        assert!(err.to_string().contains("grid"), "{err}");
    }
}
