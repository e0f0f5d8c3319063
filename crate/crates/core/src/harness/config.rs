//! Run configuration read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iteration::{profile_family, EnergyProfile, ScheduleParams};
use crate::spectral::{fft_size, FourierGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Init,
    Iterate,
    Galerkin,
    DemoNonuniqueness,
    Diagnose,
    ScheduleReport,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Init => "init",
            Task::Iterate => "iterate",
            Task::Galerkin => "galerkin",
            Task::DemoNonuniqueness => "demo_nonuniqueness",
            Task::Diagnose => "diagnose",
            Task::ScheduleReport => "schedule_report",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Desk,
    Strict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_q_max")]
    pub q_max: usize,
}

fn default_epsilon() -> f64 {
    0.01
}

fn default_q_max() -> usize {
    3
}

impl ScheduleSection {
    pub fn params(&self) -> ScheduleParams {
        ScheduleParams { a: self.a, b: self.b, c: self.c, alpha: self.alpha, epsilon: self.epsilon }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    /// Retained fraction as [numerator, denominator].
    #[serde(default = "default_dealias")]
    pub dealias: [u32; 2],
}

fn default_dealias() -> [u32; 2] {
    [2, 3]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant { value: f64 },
    Cosine { mean: f64, amplitude: f64, frequency: f64 },
    /// Member `member` of profile_family(k, count, seed).
    Family { k: f64, count: usize, member: usize },
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec::Cosine { mean: 0.75, amplitude: 0.2, frequency: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub k: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_diagnostics")]
    pub diagnostics: String,
    #[serde(default = "default_summary")]
    pub summary: String,
    #[serde(default = "default_true")]
    pub snapshots: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: default_dir(), diagnostics: default_diagnostics(), summary: default_summary(), snapshots: true }
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_diagnostics() -> String {
    "diagnostics.csv".into()
}

fn default_summary() -> String {
    "summary.toml".into()
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterateSection {
    #[serde(default = "default_stages")]
    pub stages: usize,
    #[serde(default)]
    pub refine: u32,
    #[serde(default = "default_sample_times")]
    pub sample_times: Vec<f64>,
    /// Times at which the inductive-estimate ledger is measured (it is costly).
    #[serde(default = "default_ledger_times")]
    pub ledger_times: Vec<f64>,
    #[serde(default = "default_true")]
    pub double_sum: bool,
    #[serde(default = "default_snapshot_times")]
    pub snapshot_times: Vec<f64>,
}

impl Default for IterateSection {
    fn default() -> Self {
        IterateSection {
            stages: default_stages(),
            refine: 0,
            sample_times: default_sample_times(),
            ledger_times: default_ledger_times(),
            double_sum: true,
            snapshot_times: default_snapshot_times(),
        }
    }
}

fn default_stages() -> usize {
    1
}

fn default_sample_times() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75, 1.0]
}

fn default_ledger_times() -> Vec<f64> {
    vec![0.5]
}

fn default_snapshot_times() -> Vec<f64> {
    vec![0.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GalerkinData {
    /// The starting velocity of the configured profile at the start time.
    Start,
    /// Seeded random divergence-free data.
    Random,
    /// A velocity snapshot file.
    Snapshot(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalerkinSection {
    pub radius: usize,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_data")]
    pub data: GalerkinData,
    #[serde(default)]
    pub start_time: f64,
}

fn default_horizon() -> f64 {
    1.0
}

fn default_tol() -> f64 {
    1e-9
}

fn default_data() -> GalerkinData {
    GalerkinData::Random
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseSection {
    pub snapshots: Vec<PathBuf>,
    #[serde(default = "default_holder")]
    pub holder_orders: Vec<f64>,
}

fn default_holder() -> Vec<f64> {
    vec![0.15, 0.5, 1.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    pub schedule: ScheduleSection,
    pub grid: GridSection,
    #[serde(default)]
    pub profile: ProfileSpec,
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub iterate: IterateSection,
    pub galerkin: Option<GalerkinSection>,
    pub diagnose: Option<DiagnoseSection>,
}

fn bad(field: &str, msg: impl Into<String>) -> Error {
    Error::Config { field: field.into(), msg: msg.into() }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let field = e.span().map(|s| format!("bytes {}..{}", s.start, s.end)).unwrap_or_else(|| "<document>".into());
            Error::Config { field, msg: e.message().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn strict(&self) -> bool {
        self.mode == Mode::Strict
    }

    pub fn grid(&self) -> Result<FourierGrid> {
        FourierGrid::with_fraction(self.grid.n, self.grid.dealias[0], self.grid.dealias[1])
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.schedule;
        self.schedule
            .params()
            .validate()
            .map_err(|e| bad("schedule", e.to_string()))?;
        if s.q_max == 0 {
            return Err(bad("schedule.q_max", "must be at least 1"));
        }
        let n = self.grid.n;
        if n < 8 || fft_size(n) != n {
            return Err(bad("grid.n", format!("{n} is not a supported transform size (even, >= 8, 2-3-5-7 smooth)")));
        }
        self.grid().map_err(|e| bad("grid.dealias", e.to_string()))?;
        self.profile().map_err(|e| bad("profile", e.to_string()))?;
        for (name, ts) in [
            ("iterate.sample_times", &self.iterate.sample_times),
            ("iterate.ledger_times", &self.iterate.ledger_times),
            ("iterate.snapshot_times", &self.iterate.snapshot_times),
        ] {
            if let Some(t) = ts.iter().find(|t| !(0.0..=1.0).contains(*t)) {
                return Err(bad(name, format!("time {t} lies outside [0, 1]")));
            }
        }
        if self.iterate.stages == 0 || self.iterate.stages > s.q_max {
            return Err(bad("iterate.stages", format!("must lie in 1..={}", s.q_max)));
        }
        if self.iterate.refine > 12 {
            return Err(bad("iterate.refine", "at most 12 doublings"));
        }
        match self.task {
            Task::Galerkin => {
                let g = self.galerkin.as_ref().ok_or_else(|| bad("galerkin", "required for task galerkin"))?;
                if g.radius == 0 || g.radius > self.grid()?.retained_limit() {
                    return Err(bad("galerkin.radius", format!("must lie in 1..={}", self.grid()?.retained_limit())));
                }
                if !(g.horizon > 0.0) {
                    return Err(bad("galerkin.horizon", "must be positive"));
                }
                if !(g.tol > 0.0 && g.tol < 1.0) {
                    return Err(bad("galerkin.tol", "must lie in (0, 1)"));
                }
            }
            Task::DemoNonuniqueness => {
                let f = self.family.as_ref().ok_or_else(|| bad("family", "required for task demo_nonuniqueness"))?;
                if f.count < 2 {
                    return Err(bad("family.count", "need at least two profiles"));
                }
            }
            Task::Diagnose => {
                let d = self.diagnose.as_ref().ok_or_else(|| bad("diagnose", "required for task diagnose"))?;
                if d.snapshots.is_empty() {
                    return Err(bad("diagnose.snapshots", "list at least one snapshot"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// The configured energy profile.
    pub fn profile(&self) -> Result<EnergyProfile> {
        match &self.profile {
            ProfileSpec::Constant { value } => EnergyProfile::constant(*value),
            ProfileSpec::Cosine { mean, amplitude, frequency } => EnergyProfile::cosine(*mean, *amplitude, *frequency),
            ProfileSpec::Family { k, count, member } => {
                if member >= count {
                    return Err(Error::ParameterDomain(format!("member {member} of a family of {count}")));
                }
                Ok(profile_family(*k, *count, self.seed)?.swap_remove(*member))
            }
        }
    }

    pub fn output_path(&self, name: &str) -> PathBuf {
        self.output.dir.join(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DESK: &str = r#"
task = "schedule_report"
[schedule]
a = 2.0
b = 1.1
c = 2.6
alpha = 0.15
[grid]
n = 64
"#;

    #[test]
    fn parses_with_defaults() {
        let c = RunConfig::from_toml(DESK).unwrap();
        assert_eq!(c.task, Task::ScheduleReport);
        assert_eq!(c.mode, Mode::Desk);
        assert_eq!(c.grid.dealias, [2, 3]);
        assert_eq!(c.schedule.epsilon, 0.01);
        let back = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn field_level_errors() {
        let e = RunConfig::from_toml(&DESK.replace("n = 64", "n = 66")).unwrap_err();
        assert!(matches!(e, Error::Config { ref field, .. } if field == "grid.n"), "{e}");
        let e = RunConfig::from_toml(&DESK.replace("a = 2.0", "a = 0.5")).unwrap_err();
        assert!(matches!(e, Error::Config { ref field, .. } if field == "schedule"), "{e}");
        let e = RunConfig::from_toml(&DESK.replace("schedule_report", "galerkin")).unwrap_err();
        assert!(matches!(e, Error::Config { ref field, .. } if field == "galerkin"), "{e}");
        let e = RunConfig::from_toml(&format!("{DESK}\nbogus = 1\n")).unwrap_err();
        assert!(matches!(e, Error::Config { .. }), "{e}");
    }
}
