//! State preparation as an MDP over Bloch cells.
//!
//! Dynamics are estimated by pushing area-uniform sphere samples through every
//! action and counting which cell they land in. Rewards follow the arrival
//! convention: a transition pays 1 iff its successor is the target cell.
//! Programs are read off the solved policy by replaying it on concrete states
//! drawn inside the start cell.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bloch_grid::{sample_uniform_sphere, BlochGrid, CellId, GridError};
use crate::mdp::{MdpError, Policy, TabularMdp, Transition};
use crate::par::{self, Exec};
use crate::rng::SeedStreams;
use crate::su2::{fidelity, rotate, BlochPoint, Gate, GateSequence, Quaternion, Su2Error};

pub const MIN_SAMPLES: usize = 10_000;
const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PrepError {
    #[error("need at least {MIN_SAMPLES} dynamics samples, got {0}")]
    TooFewSamples(usize),
    #[error("rotation resolution l={l} is too coarse for k={k}: need l/k >= 10")]
    CoarseRotations { l: u32, k: u32 },
    #[error("restarts and max_len must be positive")]
    BadExtractOptions,
    #[error("no convergent program from {start} to {target} ({diagnostics})")]
    NoPath {
        start: CellId,
        target: CellId,
        diagnostics: String,
    },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Mdp(#[from] MdpError),
    #[error(transparent)]
    Su2(#[from] Su2Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrepGateset {
    /// `RZ(jπ/l)` and `RY(jπ/l)` for `j = 0..2l`.
    Rotations {
        l: u32,
    },
    Ihst,
    Iht,
}

impl PrepGateset {
    pub fn gates(&self) -> Vec<Gate> {
        match *self {
            PrepGateset::Rotations { l } => {
                let delta = PI / l as f64;
                let rz = (0..2 * l).map(|j| Gate::Rz(j as f64 * delta));
                let ry = (0..2 * l).map(|j| Gate::Ry(j as f64 * delta));
                rz.chain(ry).collect()
            }
            PrepGateset::Ihst => vec![Gate::I, Gate::H, Gate::S, Gate::T],
            PrepGateset::Iht => vec![Gate::I, Gate::H, Gate::T],
        }
    }

    pub fn check(&self, grid: &BlochGrid) -> Result<(), PrepError> {
        match *self {
            PrepGateset::Rotations { l } if l < 10 * grid.k() => {
                Err(PrepError::CoarseRotations { l, k: grid.k() })
            }
            _ => Ok(()),
        }
    }

    pub fn default_gamma(&self) -> f64 {
        match self {
            PrepGateset::Rotations { .. } => 0.8,
            _ => 0.95,
        }
    }
}

impl fmt::Display for PrepGateset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrepGateset::Rotations { l } => write!(f, "rzry:{l}"),
            PrepGateset::Ihst => f.write_str("ihst"),
            PrepGateset::Iht => f.write_str("iht"),
        }
    }
}

impl FromStr for PrepGateset {
    type Err = String;

    /// `ihst`, `iht`, `rzry` (l = 160) or `rzry:<l>`.
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ihst" => Ok(PrepGateset::Ihst),
            "iht" => Ok(PrepGateset::Iht),
            "rzry" | "rotations" => Ok(PrepGateset::Rotations { l: 160 }),
            other => other
                .strip_prefix("rzry:")
                .and_then(|l| l.parse().ok())
                .filter(|&l| l > 0)
                .map(|l| PrepGateset::Rotations { l })
                .ok_or_else(|| {
                    format!("unknown gateset `{s}` (expected ihst, iht, rzry or rzry:<l>)")
                }),
        }
    }
}

/// Gates of a gateset together with their quaternions and Bloch rotations.
#[derive(Debug, Clone)]
pub struct ActionSet {
    pub gates: Vec<Gate>,
    pub quaternions: Vec<Quaternion>,
    pub rotations: Vec<[[f64; 3]; 3]>,
}

impl ActionSet {
    pub fn new(gateset: PrepGateset) -> Result<Self, Su2Error> {
        let gates = gateset.gates();
        let quaternions = gates
            .iter()
            .map(Gate::quaternion)
            .collect::<Result<Vec<_>, _>>()?;
        let rotations = quaternions.iter().map(Quaternion::bloch_rotation).collect();
        Ok(ActionSet {
            gates,
            quaternions,
            rotations,
        })
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.gates.iter().map(Gate::to_string).collect()
    }

    fn step(
        &self,
        grid: &BlochGrid,
        action: usize,
        v: [f64; 3],
        from: CellId,
    ) -> ([f64; 3], CellId) {
        if self.gates[action].is_identity() {
            return (v, from);
        }
        let w = rotate(&self.rotations[action], v);
        (w, grid.classify_vector(w))
    }
}

#[derive(Debug, Clone)]
struct Counts {
    per_state: Vec<u64>,
    rows: Vec<Vec<(u32, u64)>>,
}

impl Counts {
    fn new(n_states: usize, n_actions: usize) -> Self {
        Counts {
            per_state: vec![0; n_states],
            rows: vec![Vec::new(); n_states * n_actions],
        }
    }

    fn add(&mut self, row: usize, next: u32) {
        let r = &mut self.rows[row];
        match r.iter_mut().find(|(s, _)| *s == next) {
            Some((_, c)) => *c += 1,
            None => r.push((next, 1)),
        }
    }

    fn merge(mut self, other: Counts) -> Counts {
        for (a, b) in self.per_state.iter_mut().zip(other.per_state) {
            *a += b;
        }
        for (i, row) in other.rows.into_iter().enumerate() {
            for (next, c) in row {
                match self.rows[i].iter_mut().find(|(s, _)| *s == next) {
                    Some((_, x)) => *x += c,
                    None => self.rows[i].push((next, c)),
                }
            }
        }
        self
    }
}

/// Normalized successor counts `p(s′ | s, a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepDynamics {
    pub grid: BlochGrid,
    pub gateset: PrepGateset,
    pub n_samples: usize,
    n_actions: usize,
    /// Samples that started in each state (shared by all its actions).
    pub samples_per_state: Vec<u64>,
    rows: Vec<Vec<(u32, u64)>>,
}

impl PrepDynamics {
    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    /// `(successor index, count)` sorted by successor.
    pub fn successors(&self, state: usize, action: usize) -> &[(u32, u64)] {
        &self.rows[state * self.n_actions + action]
    }

    pub fn probability(&self, state: usize, action: usize, next: usize) -> f64 {
        let total = self.samples_per_state[state];
        if total == 0 {
            return 0.0;
        }
        self.successors(state, action)
            .iter()
            .find(|(s, _)| *s as usize == next)
            .map_or(0.0, |&(_, c)| c as f64 / total as f64)
    }
}

pub fn estimate_dynamics(
    grid: &BlochGrid,
    gateset: PrepGateset,
    n_samples: usize,
    streams: &SeedStreams,
    exec: Exec,
) -> Result<PrepDynamics, PrepError> {
    if n_samples < MIN_SAMPLES {
        return Err(PrepError::TooFewSamples(n_samples));
    }
    gateset.check(grid)?;
    let actions = ActionSet::new(gateset)?;
    let (n_states, n_actions) = (grid.n_cells(), actions.len());
    let n_chunks = n_samples.div_ceil(CHUNK);
    let counts = par::fold_merge(
        exec,
        n_chunks,
        || Counts::new(n_states, n_actions),
        |mut acc, chunk| {
            let mut rng = streams.rng("prep-dynamics", chunk as u64);
            let len = CHUNK.min(n_samples - chunk * CHUNK);
            for _ in 0..len {
                let v = sample_uniform_sphere(&mut rng).to_vector();
                let from = grid.classify_vector(v);
                let s = grid.index(from);
                acc.per_state[s] += 1;
                for a in 0..n_actions {
                    let (_, to) = actions.step(grid, a, v, from);
                    acc.add(s * n_actions + a, grid.index(to) as u32);
                }
            }
            acc
        },
        Counts::merge,
    );
    let rows = counts
        .rows
        .into_iter()
        .map(|mut r| {
            r.sort_unstable();
            r
        })
        .collect();
    Ok(PrepDynamics {
        grid: *grid,
        gateset,
        n_samples,
        n_actions,
        samples_per_state: counts.per_state,
        rows,
    })
}

/// MDP over all cells; transitions into `target` pay 1.
pub fn build_prep_mdp(
    dynamics: &PrepDynamics,
    target: CellId,
    gamma: f64,
) -> Result<TabularMdp, PrepError> {
    let grid = dynamics.grid;
    let target = grid.index(grid.validate(target)?);
    let actions = ActionSet::new(dynamics.gateset)?;
    let mut mdp = TabularMdp::new(grid.n_cells(), actions.labels(), gamma)?;
    for s in 0..grid.n_cells() {
        let total = dynamics.samples_per_state[s];
        if total == 0 {
            continue;
        }
        for a in 0..dynamics.n_actions {
            let outcomes = dynamics
                .successors(s, a)
                .iter()
                .map(|&(next, c)| Transition {
                    next: next as usize,
                    reward: if next as usize == target { 1.0 } else { 0.0 },
                    prob: c as f64 / total as f64,
                })
                .collect();
            mdp.set_transitions(s, a, outcomes)?;
        }
    }
    Ok(mdp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShuffleMode {
    /// Only the start state is drawn at random; evolution is exact.
    Off,
    /// The state is redrawn inside its current cell before every step.
    On,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShufflePolicy {
    Off,
    On,
    /// `Off` first, `On` only if nothing converged.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractOptions {
    pub restarts: usize,
    pub max_len: usize,
    pub shuffle: ShufflePolicy,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            restarts: 100,
            max_len: 50,
            shuffle: ShufflePolicy::Auto,
        }
    }
}

/// Where to start, where to end, and the exact states fidelity is judged by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrepTask {
    pub start: CellId,
    /// Exact start state; when absent each episode's own sampled start is replayed.
    pub start_state: Option<BlochPoint>,
    pub target: CellId,
    pub target_state: BlochPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepProgram {
    pub start: CellId,
    pub target: CellId,
    pub sequence: GateSequence,
    pub fidelity: f64,
    pub shuffle: ShuffleMode,
    pub episodes: usize,
    pub convergent_episodes: usize,
}

impl PrepProgram {
    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }
}

struct Episode {
    actions: Vec<usize>,
    start: BlochPoint,
}

fn run_episode<R: Rng>(
    grid: &BlochGrid,
    actions: &ActionSet,
    policy: &Policy,
    task: &PrepTask,
    max_len: usize,
    mode: ShuffleMode,
    rng: &mut R,
) -> Result<Option<Episode>, PrepError> {
    let start = grid.sample_in_cell(task.start, rng)?;
    let mut v = start.to_vector();
    let mut cell = task.start;
    let mut taken = Vec::new();
    while taken.len() < max_len {
        let a = policy.action(grid.index(cell));
        taken.push(a);
        if mode == ShuffleMode::On {
            v = grid.sample_in_cell(cell, rng)?.to_vector();
        }
        (v, cell) = actions.step(grid, a, v, cell);
        if cell == task.target {
            return Ok(Some(Episode {
                actions: taken,
                start,
            }));
        }
    }
    Ok(None)
}

/// Runs `restarts` policy rollouts from random states in the start cell and
/// keeps the shortest one that reaches the target; equal lengths are ranked by
/// fidelity of the exact replay, then by episode order.
pub fn extract_program(
    grid: &BlochGrid,
    actions: &ActionSet,
    policy: &Policy,
    task: &PrepTask,
    opts: &ExtractOptions,
    streams: &SeedStreams,
    exec: Exec,
) -> Result<PrepProgram, PrepError> {
    if opts.restarts == 0 || opts.max_len == 0 {
        return Err(PrepError::BadExtractOptions);
    }
    grid.validate(task.start)?;
    grid.validate(task.target)?;
    let modes: &[ShuffleMode] = match opts.shuffle {
        ShufflePolicy::Off => &[ShuffleMode::Off],
        ShufflePolicy::On => &[ShuffleMode::On],
        ShufflePolicy::Auto => &[ShuffleMode::Off, ShuffleMode::On],
    };
    for &mode in modes {
        let stage = format!(
            "prep-extract/{}/{}",
            grid.index(task.start),
            mode == ShuffleMode::On
        );
        let episodes = par::map_indexed(exec, opts.restarts, |i| {
            let mut rng = streams.rng(&stage, i as u64);
            run_episode(grid, actions, policy, task, opts.max_len, mode, &mut rng)
        });
        let mut best: Option<(GateSequence, f64)> = None;
        let mut convergent = 0;
        for ep in episodes {
            let Some(ep) = ep? else { continue };
            convergent += 1;
            let sequence = GateSequence(ep.actions.iter().map(|&a| actions.gates[a]).collect());
            let from = task.start_state.unwrap_or(ep.start);
            let reached = sequence.unitary()?.apply_to_bloch(from);
            let fid = fidelity(&reached, &task.target_state);
            let better = match &best {
                None => true,
                Some((b, f)) => sequence.len() < b.len() || (sequence.len() == b.len() && fid > *f),
            };
            if better {
                best = Some((sequence, fid));
            }
        }
        if let Some((sequence, fidelity)) = best {
            return Ok(PrepProgram {
                start: task.start,
                target: task.target,
                sequence,
                fidelity,
                shuffle: mode,
                episodes: opts.restarts,
                convergent_episodes: convergent,
            });
        }
    }
    Err(PrepError::NoPath {
        start: task.start,
        target: task.target,
        diagnostics: format!(
            "{} episodes per mode, max_len {}, shuffle {:?}",
            opts.restarts, opts.max_len, opts.shuffle
        ),
    })
}

/// The exact state `(HT)^n |0⟩` and the cell containing it.
pub fn ht_target(grid: &BlochGrid, n: u64) -> Result<(CellId, BlochPoint), Su2Error> {
    let ht = Gate::H.quaternion()?.compose(Gate::T.quaternion()?);
    let p = ht.power(n).apply_to_bloch(BlochPoint::ZERO);
    Ok((grid.classify(&p), p))
}
