//! Experiment configuration. Every block is optional and every key has a
//! default; unknown keys are rejected.
//!
//! ```toml
//! seed = 7
//! out = "runs/a"
//!
//! [grid]
//! n = 2
//! m = 64
//! k = 64
//!
//! [decompose]
//! field = "noise"          # noise | plane-wave | localized
//! samples = 2
//!
//! [verify]
//! ids = ["ge", "ge2", "ge3"]
//! samples = 50
//!
//! [solve]
//! epsilon = 1e-3
//! checks = ["contraction", "lipschitz"]
//!
//! [solver]
//! s = 1.1
//! tol = 1e-40
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lab::estimates::{info, DEFAULT_CAP, ESTIMATES};
use crate::regression::RegressionConstants;
use crate::solver::SolverConfig;
use crate::spectral::GridSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Regression constants file; the built-in table when absent.
    pub constants: Option<PathBuf>,
    pub grid: GridConfig,
    pub decompose: DecomposeConfig,
    pub norms: NormsConfig,
    pub verify: VerifyConfig,
    pub solve: SolveConfig,
    pub solver: SolverConfig,
    pub report: ReportConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            out: None,
            constants: None,
            grid: GridConfig::default(),
            decompose: DecomposeConfig::default(),
            norms: NormsConfig::default(),
            verify: VerifyConfig::default(),
            solve: SolveConfig::default(),
            solver: SolverConfig::default(),
            report: ReportConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: usize,
    pub m: usize,
    pub k: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n: 2, m: 64, k: 64 }
    }
}

impl GridConfig {
    pub fn spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.n, self.m, self.k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    /// Uniform complex noise on every lattice point.
    Noise,
    /// One mode on the paraboloid, τ = |ξ|².
    PlaneWave,
    /// Random field localized near the paraboloid in one annulus.
    Localized,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecomposeConfig {
    pub field: FieldKind,
    pub samples: usize,
    /// Spatial frequency of the plane wave.
    pub mode: Vec<i64>,
    /// Read the field from a file instead of generating it.
    pub input: Option<PathBuf>,
    /// Modulation measured from P̄ instead of P.
    pub conjugate: bool,
    pub tolerance: f64,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            field: FieldKind::Noise,
            samples: 1,
            mode: vec![1, 0],
            input: None,
            conjugate: false,
            tolerance: 1e-12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormName {
    Hs,
    Xsb,
    XPlus,
    XMinus,
    Y,
    Scripty,
    W,
    Z,
}

impl NormName {
    pub const ALL: [NormName; 8] =
        [NormName::Hs, NormName::Xsb, NormName::XPlus, NormName::XMinus, NormName::Y, NormName::Scripty, NormName::W, NormName::Z];

    pub fn name(&self) -> &'static str {
        match self {
            NormName::Hs => "hs",
            NormName::Xsb => "xsb",
            NormName::XPlus => "x-plus",
            NormName::XMinus => "x-minus",
            NormName::Y => "y",
            NormName::Scripty => "scripty",
            NormName::W => "w",
            NormName::Z => "z",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormsConfig {
    pub s: f64,
    /// Exponent b of X^{s,b}.
    pub b: f64,
    /// Exponent p of X^{s,±1/2,p}.
    pub p: f64,
    pub conjugate: bool,
    pub samples: usize,
    pub norms: Vec<NormName>,
    /// Samples per embedding sweep; 0 skips the sweeps.
    pub embedding_samples: usize,
    /// Samples for the time-truncation sweep; 0 skips it.
    pub truncation_samples: usize,
    /// (M, K) of the base sweep grid; n is taken from [grid].
    pub sweep_grid: [usize; 2],
    pub histogram_bins: usize,
}

impl Default for NormsConfig {
    fn default() -> Self {
        NormsConfig {
            s: 1.1,
            b: 0.5,
            p: 1.0,
            conjugate: false,
            samples: 4,
            norms: NormName::ALL.to_vec(),
            embedding_samples: 50,
            truncation_samples: 20,
            sweep_grid: [32, 64],
            histogram_bins: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Estimate ids; "all" selects every id.
    pub ids: Vec<String>,
    pub samples: usize,
    pub s: f64,
    /// Lattice points per random input.
    pub cap: usize,
    /// Every random input is multiplied by this.
    pub scale: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { ids: vec!["ge".into(), "ge2".into(), "ge3".into()], samples: 50, s: 1.1, cap: DEFAULT_CAP, scale: 1.0 }
    }
}

impl VerifyConfig {
    /// Requested ids with "all" expanded, in registry order.
    pub fn resolved_ids(&self) -> Result<Vec<&'static str>> {
        if self.ids.is_empty() {
            return Err(Error::Config("verify.ids is empty".into()));
        }
        let mut want = Vec::new();
        for id in &self.ids {
            if id == "all" {
                want.extend(ESTIMATES.iter().map(|e| e.id));
            } else {
                want.push(info(id).ok_or_else(|| Error::Config(format!("unknown estimate id {id}")))?.id);
            }
        }
        Ok(ESTIMATES.iter().map(|e| e.id).filter(|id| want.contains(id)).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// ε e^{iξ·x}, so ε is the amplitude.
    PlaneWave,
    /// Random modes with ⟨ξ⟩ ≤ 2^{annulus+1}, scaled to ‖u₀‖_{H^s} = ε.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveCheck {
    /// At least five iterations contracting by 1/2, residual ≤ 10 tol.
    Contraction,
    /// Lipschitz quotient stable as the perturbation halves.
    Lipschitz,
    /// Energy drift shrinks on the doubled grid with two more series terms.
    EnergyRefinement,
    /// Far-shell excess over the free solution shrinks as ε halves.
    FarShell,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    pub epsilon: f64,
    pub profile: Profile,
    pub mode: Vec<i64>,
    pub annulus: u32,
    /// Bisect for the largest convergent amplitude of the profile.
    pub find_delta: bool,
    pub checks: Vec<SolveCheck>,
    pub lipschitz_etas: Vec<f64>,
    /// Largest absolute energy drift accepted.
    pub energy_tolerance: f64,
    pub far_threshold: i64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            epsilon: 1e-3,
            profile: Profile::PlaneWave,
            mode: vec![1, 0],
            annulus: 1,
            find_delta: false,
            checks: Vec::new(),
            lipschitz_etas: vec![1e-4, 5e-5, 2.5e-5],
            energy_tolerance: 1e-6,
            far_threshold: 4,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportConfig {
    /// Output directories of earlier runs.
    pub inputs: Vec<PathBuf>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn constants(&self) -> Result<RegressionConstants> {
        match &self.constants {
            Some(p) => RegressionConstants::load(p).map_err(|e| Error::Config(format!("{}: {e}", p.display()))),
            None => Ok(RegressionConstants::embedded()),
        }
    }

    /// Checks that do not need any computation.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid.spec().map_err(|e| Error::Config(e.to_string()))?;
        let d = &self.decompose;
        if d.samples == 0 || !(d.tolerance > 0.0) {
            return Err(Error::Config("decompose needs samples ≥ 1 and a positive tolerance".into()));
        }
        if d.field == FieldKind::PlaneWave && d.mode.len() != grid.n() {
            return Err(Error::Config(format!("decompose.mode needs {} entries", grid.n())));
        }
        let tau: i64 = d.mode.iter().map(|v| v * v).sum();
        if d.field == FieldKind::PlaneWave && !grid.contains(&crate::spectral::Freq::new(&d.mode, tau)) {
            return Err(Error::Config(format!("plane wave {:?} is outside the grid", d.mode)));
        }
        let nc = &self.norms;
        if !(nc.s.is_finite() && nc.b.is_finite() && nc.p >= 1.0) || nc.histogram_bins == 0 {
            return Err(Error::Config("norms needs finite s and b, p ≥ 1 and at least one histogram bin".into()));
        }
        if nc.sweep_grid.iter().any(|v| *v < 8) {
            return Err(Error::Config("norms.sweep_grid entries must be at least 8".into()));
        }
        let v = &self.verify;
        if v.samples == 0 || v.cap == 0 || !(v.scale > 0.0 && v.scale.is_finite()) {
            return Err(Error::Config("verify needs samples ≥ 1, cap ≥ 1 and a positive scale".into()));
        }
        let s = &self.solve;
        if !(s.epsilon >= 0.0 && s.epsilon.is_finite()) {
            return Err(Error::Config("solve.epsilon must be a finite nonnegative number".into()));
        }
        if s.profile == Profile::PlaneWave && s.mode.len() != grid.n() {
            return Err(Error::Config(format!("solve.mode needs {} entries", grid.n())));
        }
        let tau: i64 = s.mode.iter().map(|v| v * v).sum();
        if s.profile == Profile::PlaneWave && !grid.contains(&crate::spectral::Freq::new(&s.mode, tau)) {
            return Err(Error::Config(format!("solve.mode {:?} does not fit the grid", s.mode)));
        }
        if !(s.energy_tolerance > 0.0) || s.lipschitz_etas.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::Config("solve tolerances and perturbation sizes must be positive".into()));
        }
        if s.checks.contains(&SolveCheck::Lipschitz) && s.lipschitz_etas.len() < 2 {
            return Err(Error::Config("the lipschitz check needs at least two perturbation sizes".into()));
        }
        self.solver.validate(grid.n())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_and_unknown_keys_fail() {
        let c = RunConfig::default();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(RunConfig::parse(&text).unwrap(), c);
        assert!(RunConfig::parse("sede = 3").is_err());
        assert!(RunConfig::parse("[grid]\nm = 32\nkk = 4").is_err());
        assert!(RunConfig::parse("[solver]\nsign = \"printed\"").is_ok());
    }

    #[test]
    fn validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = RunConfig::parse("[grid]\nm = 7").unwrap();
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = RunConfig::parse("[solver]\ns = 0.9").unwrap();
        assert!(bad.validate().is_err());
        let c = RunConfig::parse("[verify]\nids = []").unwrap();
        assert!(c.verify.resolved_ids().is_err());
        let c = RunConfig::parse("[verify]\nids = [\"ge\", \"nope\"]").unwrap();
        assert!(c.verify.resolved_ids().is_err());
        let c = RunConfig::parse("[verify]\nids = [\"ge3\", \"ge\"]").unwrap();
        assert_eq!(c.verify.resolved_ids().unwrap(), vec!["ge", "ge3"]);
    }
}
