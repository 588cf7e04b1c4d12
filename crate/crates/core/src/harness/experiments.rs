//! One function per experiment kind, each returning a serializable result.

use rand::Rng;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::golden::parse_targets;
use super::verify::{run_all, CriterionReport, VerifyContext};
use super::HarnessError;
use crate::bloch_grid::{BlochGrid, CellId};
use crate::gate_compile::{brute_force_shortest, compile_with_mdp, CompileOptions, CompileResult};
use crate::mdp::{policy_iteration, Solution, SolverOptions};
use crate::rng::SeedStreams;
use crate::state_prep::{
    build_prep_mdp, estimate_dynamics, extract_program, ht_target, ActionSet, ExtractOptions,
    PrepDynamics, PrepProgram, PrepTask,
};
use crate::su2::{haar_random_su2, BlochPoint, Quaternion};

fn seed(config: &ExperimentConfig) -> Result<u64, HarnessError> {
    config
        .seed
        .ok_or_else(|| HarnessError::Config(format!("`{}` needs a seed", config.kind)))
}

struct PrepSetup {
    grid: BlochGrid,
    actions: ActionSet,
    dynamics: PrepDynamics,
    streams: SeedStreams,
}

impl PrepSetup {
    fn new(config: &ExperimentConfig) -> Result<Self, HarnessError> {
        let grid = BlochGrid::new(config.k)?;
        let streams = SeedStreams::new(seed(config)?);
        let dynamics =
            estimate_dynamics(&grid, config.gateset, config.samples, &streams, config.exec)?;
        Ok(PrepSetup {
            grid,
            actions: ActionSet::new(config.gateset)?,
            dynamics,
            streams,
        })
    }

    fn solve(&self, target: CellId, config: &ExperimentConfig) -> Result<Solution, HarnessError> {
        let mdp = build_prep_mdp(&self.dynamics, target, config.resolved_gamma())?;
        Ok(policy_iteration(
            &mdp,
            &SolverOptions::with_tol(config.tol),
        )?)
    }

    fn extract(
        &self,
        sol: &Solution,
        task: &PrepTask,
        config: &ExperimentConfig,
    ) -> Result<PrepProgram, HarnessError> {
        let opts = ExtractOptions {
            restarts: config.restarts,
            max_len: config.max_len,
            shuffle: config.shuffle,
        };
        Ok(extract_program(
            &self.grid,
            &self.actions,
            &sol.policy,
            task,
            &opts,
            &self.streams,
            config.exec,
        )?)
    }

    /// Exact pole states for the caps, the cell center elsewhere.
    fn representative(&self, cell: CellId) -> BlochPoint {
        match cell {
            CellId::NorthCap => BlochPoint::ZERO,
            CellId::SouthCap => BlochPoint::ONE,
            _ => {
                let (theta, phi) = self.grid.center(cell);
                BlochPoint::new(theta, phi).expect("cell centers are valid points")
            }
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ProgramEntry {
    pub start: CellId,
    pub value: f64,
    #[serde(flatten)]
    pub outcome: Outcome<ProgramSummary>,
}

#[derive(Debug, Serialize)]
pub struct ProgramSummary {
    pub sequence: String,
    pub length: usize,
    pub fidelity: f64,
    pub shuffle: crate::state_prep::ShuffleMode,
    pub convergent_episodes: usize,
}

impl From<PrepProgram> for ProgramSummary {
    fn from(p: PrepProgram) -> Self {
        ProgramSummary {
            sequence: p.sequence.render(),
            length: p.len(),
            fidelity: p.fidelity,
            shuffle: p.shuffle,
            convergent_episodes: p.convergent_episodes,
        }
    }
}

/// A per-item result that failed without sinking the whole experiment.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Outcome<T> {
    Ok(T),
    Err { error: String },
}

impl<T, E: std::fmt::Display> From<Result<T, E>> for Outcome<T> {
    fn from(r: Result<T, E>) -> Self {
        match r {
            Ok(t) => Outcome::Ok(t),
            Err(e) => Outcome::Err {
                error: e.to_string(),
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StatePrepResult {
    pub target: CellId,
    pub target_value: f64,
    pub policy_rounds: usize,
    pub programs: Vec<ProgramEntry>,
}

fn programs(
    setup: &PrepSetup,
    sol: &Solution,
    target: CellId,
    starts: &[CellId],
    config: &ExperimentConfig,
) -> Vec<ProgramEntry> {
    starts
        .iter()
        .map(|&start| {
            let start_state = if Some(start) == config.start {
                config.start_state
            } else {
                None
            }
            .or(match start {
                CellId::NorthCap => Some(BlochPoint::ZERO),
                CellId::SouthCap => Some(BlochPoint::ONE),
                _ => None,
            });
            let task = PrepTask {
                start,
                start_state,
                target,
                target_state: setup.representative(target),
            };
            let outcome = setup
                .extract(sol, &task, config)
                .map(ProgramSummary::from)
                .into();
            ProgramEntry {
                start,
                value: sol.values.get(setup.grid.index(start)),
                outcome,
            }
        })
        .collect()
}

pub fn state_prep(config: &ExperimentConfig) -> Result<StatePrepResult, HarnessError> {
    let setup = PrepSetup::new(config)?;
    let sol = setup.solve(config.target, config)?;
    let starts = match config.start {
        Some(s) => vec![s],
        None => setup.grid.cells().collect(),
    };
    Ok(StatePrepResult {
        target: config.target,
        target_value: sol.values.get(setup.grid.index(config.target)),
        policy_rounds: sol.rounds,
        programs: programs(&setup, &sol, config.target, &starts, config),
    })
}

#[derive(Debug, Serialize)]
pub struct HtEntry {
    pub n: u64,
    pub target_cell: CellId,
    pub target_state: BlochPoint,
    #[serde(flatten)]
    pub outcome: Outcome<ProgramSummary>,
}

pub fn ht_states(config: &ExperimentConfig) -> Result<Vec<HtEntry>, HarnessError> {
    let setup = PrepSetup::new(config)?;
    config
        .n
        .iter()
        .map(|&n| {
            let (cell, state) = ht_target(&setup.grid, n)?;
            let sol = setup.solve(cell, config)?;
            let task = PrepTask {
                start: CellId::NorthCap,
                start_state: Some(BlochPoint::ZERO),
                target: cell,
                target_state: state,
            };
            let outcome = setup
                .extract(&sol, &task, config)
                .map(ProgramSummary::from)
                .into();
            Ok(HtEntry {
                n,
                target_cell: cell,
                target_state: state,
                outcome,
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct LandscapeRow {
    pub cell_kind: &'static str,
    pub n_band: Option<u32>,
    pub m_band: Option<u32>,
    pub theta_center: f64,
    pub phi_center: f64,
    pub value: f64,
    pub best_action: String,
    pub program_length: Option<usize>,
}

pub fn landscape(config: &ExperimentConfig) -> Result<Vec<LandscapeRow>, HarnessError> {
    let setup = PrepSetup::new(config)?;
    let sol = setup.solve(config.target, config)?;
    let starts: Vec<CellId> = setup.grid.cells().collect();
    let entries = programs(&setup, &sol, config.target, &starts, config);
    entries
        .into_iter()
        .map(|e| -> Result<LandscapeRow, HarnessError> {
            let (theta_center, phi_center) = setup.grid.center(e.start);
            let (cell_kind, n_band, m_band) = match e.start {
                CellId::NorthCap => ("north_cap", None, None),
                CellId::SouthCap => ("south_cap", None, None),
                CellId::Cell { band, sector } => ("cell", Some(band), Some(sector)),
            };
            let s = setup.grid.index(e.start);
            Ok(LandscapeRow {
                cell_kind,
                n_band,
                m_band,
                theta_center,
                phi_center,
                value: e.value,
                best_action: setup.actions.gates[sol.policy.action(s)].to_string(),
                program_length: match e.outcome {
                    Outcome::Ok(p) => Some(p.length),
                    Outcome::Err { .. } => None,
                },
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct CompileSummary {
    pub sequence: String,
    pub length: usize,
    pub distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<crate::gate_compile::EpisodeStats>,
}

impl From<CompileResult> for CompileSummary {
    fn from(r: CompileResult) -> Self {
        CompileSummary {
            sequence: r.rendered(),
            length: r.len(),
            distance: r.distance,
            stats: r.stats,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CompileEntry {
    pub index: usize,
    pub target: Quaternion,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mdp: Option<Outcome<CompileSummary>>,
    pub brute_force: Outcome<CompileSummary>,
}

fn targets(config: &ExperimentConfig) -> Result<Vec<Quaternion>, HarnessError> {
    match &config.target_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
            parse_targets(&text)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
        }
        None => {
            let mut rng = SeedStreams::new(seed(config)?).rng("haar-targets", 0);
            Ok((0..config.targets)
                .map(|_| haar_random_su2(&mut rng))
                .collect())
        }
    }
}

pub fn compile(
    config: &ExperimentConfig,
    with_mdp: bool,
) -> Result<Vec<CompileEntry>, HarnessError> {
    let opts = CompileOptions {
        eps: config.eps,
        delta_bin: config.delta_bin,
        gamma: config.resolved_gamma(),
        rollouts: config.rollouts,
        rollout_len: config.rollout_len,
        episodes: config.episodes,
        max_len: config.max_len,
    };
    let streams = config.seed.map(SeedStreams::new);
    targets(config)?
        .into_iter()
        .enumerate()
        .map(|(index, target)| {
            let mdp = if with_mdp {
                let per_target = SeedStreams::new(
                    streams
                        .as_ref()
                        .expect("validated seed")
                        .rng("compile-target", index as u64)
                        .random(),
                );
                Some(
                    compile_with_mdp(target, &opts, &per_target, config.exec)
                        .map(CompileSummary::from)
                        .into(),
                )
            } else {
                None
            };
            let brute_force = brute_force_shortest(target, config.eps, config.max_n, config.exec)
                .map(CompileSummary::from)
                .into();
            Ok(CompileEntry {
                index,
                target,
                mdp,
                brute_force,
            })
        })
        .collect()
}

pub fn verify(config: &ExperimentConfig) -> Vec<CriterionReport> {
    let ctx = VerifyContext::new(config.seed.unwrap_or(7), config.exec);
    run_all(&ctx)
}
