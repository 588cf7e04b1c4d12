//! Experiment configuration: flat `key = value` files overridden by flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::bloch_grid::{BlochGrid, CellId};
use crate::par::Exec;
use crate::state_prep::{PrepGateset, ShufflePolicy};
use crate::su2::BlochPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    StatePrep,
    HtStates,
    Compile,
    BruteForce,
    Landscape,
    Verify,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::StatePrep,
        ExperimentKind::HtStates,
        ExperimentKind::Compile,
        ExperimentKind::BruteForce,
        ExperimentKind::Landscape,
        ExperimentKind::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::StatePrep => "state-prep",
            ExperimentKind::HtStates => "ht-states",
            ExperimentKind::Compile => "compile",
            ExperimentKind::BruteForce => "brute-force",
            ExperimentKind::Landscape => "landscape",
            ExperimentKind::Verify => "verify",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s || (s == "verify-tables" && *k == ExperimentKind::Verify))
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

/// Every tunable of every experiment. Unused fields are carried along so a
/// report always shows the complete resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: Option<u64>,
    pub k: u32,
    pub gateset: PrepGateset,
    /// Discount; `None` resolves to the gateset (or compile) default.
    pub gamma: Option<f64>,
    pub tol: f64,
    pub samples: usize,
    pub restarts: usize,
    pub max_len: usize,
    pub shuffle: ShufflePolicy,
    pub start: Option<CellId>,
    pub start_state: Option<BlochPoint>,
    pub target: CellId,
    pub n: Vec<u64>,
    pub delta_bin: f64,
    pub eps: f64,
    pub rollouts: usize,
    pub rollout_len: usize,
    pub episodes: usize,
    pub max_n: u32,
    pub target_file: Option<PathBuf>,
    /// Haar-random targets drawn when no target file is given.
    pub targets: usize,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
    pub exec: Exec,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        let gateset = match kind {
            ExperimentKind::HtStates => PrepGateset::Iht,
            _ => PrepGateset::Rotations { l: 160 },
        };
        ExperimentConfig {
            kind,
            seed: None,
            k: 16,
            gateset,
            gamma: None,
            tol: 1e-8,
            samples: 1_000_000,
            restarts: 100,
            max_len: 50,
            shuffle: ShufflePolicy::Auto,
            start: None,
            start_state: None,
            target: CellId::SouthCap,
            n: vec![
                100,
                1_000,
                10_000,
                1_000_000,
                10_000_000,
                100_000_000,
                1_000_000_000,
                10_000_000_000,
            ],
            delta_bin: 0.15,
            eps: 0.3,
            rollouts: 1000,
            rollout_len: 50,
            episodes: 500,
            max_n: 20,
            target_file: None,
            targets: 30,
            output: None,
            threads: None,
            exec: Exec::default(),
        }
    }

    /// Reads a flat config file; it must name the experiment with `kind`.
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let pairs = parse_pairs(&text)?;
        let kind = pairs
            .iter()
            .find(|(k, _)| k == "kind")
            .ok_or_else(|| HarnessError::Config(format!("{}: missing `kind`", path.display())))?;
        let mut config = ExperimentConfig::new(kind.1.parse().map_err(HarnessError::Config)?);
        for (k, v) in &pairs {
            config.set(k, v)?;
        }
        Ok(config)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let v = value.trim();
        let bad = |e: String| HarnessError::Config(format!("{key} = {v}: {e}"));
        fn num<T: FromStr>(v: &str) -> Result<T, String>
        where
            T::Err: fmt::Display,
        {
            v.replace('_', "").parse::<T>().map_err(|e| e.to_string())
        }
        let count = |v: &str| -> Result<usize, String> { num::<f64>(v).and_then(as_count) };
        match key.trim().replace('-', "_").as_str() {
            "kind" => {
                let kind: ExperimentKind = v.parse().map_err(bad)?;
                if kind != self.kind {
                    return Err(bad(format!("config is for `{}`", self.kind)));
                }
            }
            "seed" => self.seed = Some(num(v).map_err(bad)?),
            "k" => self.k = num(v).map_err(bad)?,
            "gateset" => self.gateset = v.parse().map_err(bad)?,
            "gamma" => self.gamma = Some(num(v).map_err(bad)?),
            "tol" => self.tol = num(v).map_err(bad)?,
            "samples" | "n_samples" => self.samples = count(v).map_err(bad)?,
            "restarts" => self.restarts = count(v).map_err(bad)?,
            "max_len" => self.max_len = count(v).map_err(bad)?,
            "shuffle" => {
                self.shuffle = match v {
                    "off" => ShufflePolicy::Off,
                    "on" => ShufflePolicy::On,
                    "auto" => ShufflePolicy::Auto,
                    _ => return Err(bad("expected off, on or auto".into())),
                }
            }
            "start" => self.start = Some(v.parse().map_err(bad)?),
            "start_state" => self.start_state = Some(parse_point(v).map_err(bad)?),
            "target" => self.target = v.parse().map_err(bad)?,
            "n" => {
                self.n = v
                    .split(',')
                    .map(|x| num::<f64>(x.trim()).and_then(|x| as_count(x).map(|n| n as u64)))
                    .collect::<Result<_, _>>()
                    .map_err(bad)?
            }
            "delta_bin" => self.delta_bin = num(v).map_err(bad)?,
            "eps" => self.eps = num(v).map_err(bad)?,
            "rollouts" => self.rollouts = count(v).map_err(bad)?,
            "rollout_len" => self.rollout_len = count(v).map_err(bad)?,
            "episodes" => self.episodes = count(v).map_err(bad)?,
            "max_n" => self.max_n = num(v).map_err(bad)?,
            "target_file" => self.target_file = Some(PathBuf::from(v)),
            "targets" => self.targets = count(v).map_err(bad)?,
            "output" => self.output = Some(PathBuf::from(v)),
            "threads" => self.threads = Some(count(v).map_err(bad)?),
            "exec" => {
                self.exec = match v {
                    "parallel" => Exec::Parallel,
                    "sequential" => Exec::Sequential,
                    _ => return Err(bad("expected parallel or sequential".into())),
                }
            }
            other => return Err(HarnessError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn resolved_gamma(&self) -> f64 {
        self.gamma.unwrap_or(match self.kind {
            ExperimentKind::Compile | ExperimentKind::BruteForce => 0.8,
            _ => self.gateset.default_gamma(),
        })
    }

    /// Config with every default filled in, as embedded in reports.
    pub fn resolved(&self) -> Self {
        ExperimentConfig {
            gamma: Some(self.resolved_gamma()),
            ..self.clone()
        }
    }

    fn is_stochastic(&self) -> bool {
        match self.kind {
            ExperimentKind::BruteForce => self.target_file.is_none(),
            ExperimentKind::Verify => false,
            _ => true,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.is_stochastic() && self.seed.is_none() {
            return bad(format!("`{}` is stochastic and needs a seed", self.kind));
        }
        let grid = BlochGrid::new(self.k).map_err(|e| HarnessError::Config(e.to_string()))?;
        self.gateset
            .check(&grid)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        let gamma = self.resolved_gamma();
        if !(gamma > 0.0 && gamma < 1.0) {
            return bad(format!("gamma must lie in (0, 1), got {gamma}"));
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive".into());
        }
        if self.samples < crate::state_prep::MIN_SAMPLES {
            return bad(format!(
                "samples must be at least {}",
                crate::state_prep::MIN_SAMPLES
            ));
        }
        if self.restarts == 0
            || self.max_len == 0
            || self.rollouts == 0
            || self.rollout_len == 0
            || self.episodes == 0
        {
            return bad(
                "restarts, max_len, rollouts, rollout_len and episodes must be positive".into(),
            );
        }
        if !(self.delta_bin > 0.0 && self.delta_bin < 1.0) {
            return bad(format!(
                "delta_bin must lie in (0, 1), got {}",
                self.delta_bin
            ));
        }
        if !(self.eps > 0.0) {
            return bad("eps must be positive".into());
        }
        if self.max_n == 0 || self.max_n > 30 {
            return bad("max_n must lie in 1..=30".into());
        }
        if self.targets == 0 {
            return bad("targets must be positive".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        for cell in self.start.iter().chain([&self.target]) {
            grid.validate(*cell)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        Ok(())
    }
}

fn as_count(x: f64) -> Result<usize, String> {
    if x >= 0.0 && x.fract() == 0.0 && x < 1e18 {
        Ok(x as usize)
    } else {
        Err(format!("{x} is not a non-negative integer"))
    }
}

/// `theta,phi` in radians.
fn parse_point(v: &str) -> Result<BlochPoint, String> {
    let (t, p) = v.split_once(',').ok_or("expected theta,phi")?;
    let t: f64 = t.trim().parse().map_err(|e| format!("{e}"))?;
    let p: f64 = p.trim().parse().map_err(|e| format!("{e}"))?;
    BlochPoint::new(t, p).map_err(|e| e.to_string())
}

fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, HarnessError> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i, line.split('#').next().unwrap_or("").trim()))
        .filter(|(_, line)| !line.is_empty())
        .map(|(i, line)| {
            line.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| {
                    HarnessError::Config(format!("line {}: expected key = value", i + 1))
                })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(
            &path,
            "# sweep\nkind = compile\nseed = 7\neps = 0.25 # tighter\nrollouts = 2e3\n",
        )
        .unwrap();
        let mut c = ExperimentConfig::from_file(&path).unwrap();
        assert_eq!((c.seed, c.eps, c.rollouts), (Some(7), 0.25, 2000));
        c.set("eps", "0.3").unwrap();
        assert_eq!(c.eps, 0.3);
        assert_eq!(c.resolved_gamma(), 0.8);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = ExperimentConfig::new(ExperimentKind::StatePrep);
        assert!(matches!(c.validate(), Err(HarnessError::Config(_))));
        c.seed = Some(1);
        c.validate().unwrap();
        assert!(c.set("bogus", "1").is_err());
        assert!(c.set("samples", "1.5").is_err());
        assert!(c.set("kind", "compile").is_err());
        c.set("gamma", "1.0").unwrap();
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::new(ExperimentKind::StatePrep);
        c.seed = Some(1);
        c.set("gateset", "rzry:100").unwrap();
        assert!(c.validate().is_err());
        c.set("n", "1e2, 1000").unwrap();
        assert_eq!(c.n, vec![100, 1000]);
        c.set("start-state", "1.5707963,0").unwrap();
        assert!(c.start_state.is_some());
        assert_eq!(
            ExperimentConfig::new(ExperimentKind::HtStates).resolved_gamma(),
            0.95
        );
        assert!(ExperimentConfig::new(ExperimentKind::BruteForce)
            .validate()
            .is_err());
    }
}
