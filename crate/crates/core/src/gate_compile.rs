//! Compiling a target SU(2) element into `{H, T}` sequences.
//!
//! Quaternion space `[−1, 1]⁴` is cut into hypercubes of side `Δ_bin`. Random
//! `{H, T}` rollouts from the identity estimate `p(s′, r | s, a)` over the
//! cells they visit, with `r = 1` whenever the evolved quaternion lies within
//! `ε` of the target. The solved policy is then replayed against those
//! estimated dynamics and the shortest sequence that passes an exact precision
//! check is kept. [`brute_force_shortest`] is the exhaustive reference.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::mdp::{policy_iteration, MdpError, Policy, SolverOptions, TabularMdp, Transition};
use crate::par::{self, Exec};
use crate::rng::SeedStreams;
use crate::su2::{Gate, GateSequence, Quaternion, Su2Error};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompileError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(
        "no episode passed the precision check after {episodes} episodes (best distance {best_distance:?}, soft bound {soft_bound:.4})"
    )]
    NoValidSequence {
        episodes: usize,
        best_distance: Option<f64>,
        soft_bound: f64,
    },
    #[error("no sequence of length <= {max_n} is within eps")]
    DepthExceeded { max_n: u32 },
    #[error(transparent)]
    Mdp(#[from] MdpError),
    #[error(transparent)]
    Su2(#[from] Su2Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CompileAction {
    I,
    H,
    T,
}

impl CompileAction {
    pub const ALL: [CompileAction; 3] = [CompileAction::I, CompileAction::H, CompileAction::T];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn gate(self) -> Gate {
        match self {
            CompileAction::I => Gate::I,
            CompileAction::H => Gate::H,
            CompileAction::T => Gate::T,
        }
    }

    pub fn apply(self, q: Quaternion) -> Quaternion {
        match self {
            CompileAction::I => q,
            CompileAction::H => q.apply_h(),
            CompileAction::T => q.apply_t(),
        }
    }
}

/// Hypercube binning of `[−1, 1]⁴`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuatGrid {
    bin: f64,
    n_bins: u32,
}

impl QuatGrid {
    pub fn new(bin: f64) -> Result<Self, CompileError> {
        if !(bin > 0.0 && bin < 1.0) {
            return Err(CompileError::Parameter(format!(
                "delta_bin must lie in (0, 1), got {bin}"
            )));
        }
        Ok(QuatGrid {
            bin,
            n_bins: (2.0 / bin).floor() as u32 + 1,
        })
    }

    pub fn bin(&self) -> f64 {
        self.bin
    }

    pub fn bins_per_axis(&self) -> u32 {
        self.n_bins
    }

    pub fn quantize(&self, q: &Quaternion) -> [u32; 4] {
        q.to_array()
            .map(|x| (((x + 1.0) / self.bin).floor().max(0.0) as u32).min(self.n_bins - 1))
    }

    pub fn encode(&self, cell: [u32; 4]) -> u32 {
        cell.iter().fold(0, |acc, &i| acc * self.n_bins + i)
    }

    pub fn decode(&self, mut code: u32) -> [u32; 4] {
        let mut cell = [0; 4];
        for slot in cell.iter_mut().rev() {
            *slot = code % self.n_bins;
            code /= self.n_bins;
        }
        cell
    }

    pub fn cell_code(&self, q: &Quaternion) -> u32 {
        self.encode(self.quantize(q))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompileOptions {
    pub eps: f64,
    pub delta_bin: f64,
    pub gamma: f64,
    pub rollouts: usize,
    pub rollout_len: usize,
    pub episodes: usize,
    pub max_len: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            eps: 0.3,
            delta_bin: 0.15,
            gamma: 0.8,
            rollouts: 1000,
            rollout_len: 50,
            episodes: 500,
            max_len: 50,
        }
    }
}

impl CompileOptions {
    pub fn validate(&self) -> Result<(), CompileError> {
        QuatGrid::new(self.delta_bin)?;
        let bad = |m: &str| Err(CompileError::Parameter(m.to_string()));
        if !(self.eps > 0.0) {
            return bad("eps must be positive");
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        if self.rollouts == 0 || self.rollout_len == 0 || self.episodes == 0 || self.max_len == 0 {
            return bad("rollouts, rollout_len, episodes and max_len must be positive");
        }
        Ok(())
    }
}

/// One random `{H, T}` walk from the identity: the action taken and the
/// quaternion after it, for each step.
pub fn rollout(
    streams: &SeedStreams,
    index: usize,
    len: usize,
) -> Vec<(CompileAction, Quaternion)> {
    let mut rng = streams.rng("compile-rollout", index as u64);
    let mut q = Quaternion::IDENTITY;
    (0..len)
        .map(|_| {
            let a = if rng.random_bool(0.5) {
                CompileAction::H
            } else {
                CompileAction::T
            };
            q = a.apply(q);
            (a, q)
        })
        .collect()
}

type RowCounts = BTreeMap<(u32, u8), BTreeMap<(u32, bool), u64>>;

fn record(counts: &mut RowCounts, s: u32, a: CompileAction, next: u32, r: bool) {
    *counts
        .entry((s, a as u8))
        .or_default()
        .entry((next, r))
        .or_default() += 1;
}

/// Estimated `p(s′, r | s, a)` over the cells visited by rollouts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileDynamics {
    pub grid: QuatGrid,
    pub target: Quaternion,
    pub eps: f64,
    /// Cell codes; position is the MDP state index.
    pub states: Vec<u32>,
    pub start: usize,
    /// `(next state, reward, count)` per `state * 3 + action`.
    rows: Vec<Vec<(usize, bool, u64)>>,
}

impl CompileDynamics {
    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_of(&self, q: &Quaternion) -> Option<usize> {
        self.states.binary_search(&self.grid.cell_code(q)).ok()
    }

    pub fn outcomes(&self, state: usize, action: CompileAction) -> &[(usize, bool, u64)] {
        &self.rows[state * 3 + action.index()]
    }

    /// Distinct successor cells of `(state, action)`, ignoring reward.
    pub fn successor_cells(&self, state: usize, action: CompileAction) -> usize {
        let mut cells: Vec<usize> = self.outcomes(state, action).iter().map(|o| o.0).collect();
        cells.dedup();
        cells.len()
    }

    fn sample<R: Rng>(&self, state: usize, action: CompileAction, rng: &mut R) -> (usize, bool) {
        let row = self.outcomes(state, action);
        let total: u64 = row.iter().map(|o| o.2).sum();
        if total == 0 {
            return (state, false);
        }
        let mut u = rng.random_range(0..total);
        for &(next, r, c) in row {
            if u < c {
                return (next, r);
            }
            u -= c;
        }
        unreachable!("draw below row total")
    }
}

pub fn estimate_rollout_dynamics(
    target: Quaternion,
    opts: &CompileOptions,
    streams: &SeedStreams,
    exec: Exec,
) -> Result<CompileDynamics, CompileError> {
    opts.validate()?;
    let grid = QuatGrid::new(opts.delta_bin)?;
    let hit = |q: &Quaternion| q.distance(&target) < opts.eps;
    let counts = par::fold_merge(
        exec,
        opts.rollouts,
        RowCounts::new,
        |mut acc, i| {
            let mut s = grid.cell_code(&Quaternion::IDENTITY);
            // the start cell is never a successor, so log its identity move too
            record(&mut acc, s, CompileAction::I, s, hit(&Quaternion::IDENTITY));
            for (a, q) in rollout(streams, i, opts.rollout_len) {
                let (next, r) = (grid.cell_code(&q), hit(&q));
                record(&mut acc, s, a, next, r);
                record(&mut acc, next, CompileAction::I, next, r);
                s = next;
            }
            acc
        },
        |mut a, b| {
            for (key, row) in b {
                let dst = a.entry(key).or_default();
                for (k, c) in row {
                    *dst.entry(k).or_default() += c;
                }
            }
            a
        },
    );
    let mut states: Vec<u32> = counts
        .iter()
        .flat_map(|(&(s, _), row)| std::iter::once(s).chain(row.keys().map(|k| k.0)))
        .collect();
    states.sort_unstable();
    states.dedup();
    let index = |code: u32| {
        states
            .binary_search(&code)
            .expect("every cell is collected")
    };
    let mut rows = vec![Vec::new(); states.len() * 3];
    for ((s, a), row) in &counts {
        rows[index(*s) * 3 + *a as usize] = row
            .iter()
            .map(|(&(next, r), &c)| (index(next), r, c))
            .collect();
    }
    let start = index(grid.cell_code(&Quaternion::IDENTITY));
    Ok(CompileDynamics {
        grid,
        target,
        eps: opts.eps,
        states,
        start,
        rows,
    })
}

pub fn build_compile_mdp(
    dynamics: &CompileDynamics,
    gamma: f64,
) -> Result<TabularMdp, CompileError> {
    let labels = CompileAction::ALL
        .iter()
        .map(|a| format!("{a:?}"))
        .collect();
    let mut mdp = TabularMdp::new(dynamics.n_states(), labels, gamma)?;
    for s in 0..dynamics.n_states() {
        for a in CompileAction::ALL {
            let row = dynamics.outcomes(s, a);
            let total: u64 = row.iter().map(|o| o.2).sum();
            if total == 0 {
                continue;
            }
            let outcomes = row
                .iter()
                .map(|&(next, r, c)| Transition {
                    next,
                    reward: if r { 1.0 } else { 0.0 },
                    prob: c as f64 / total as f64,
                })
                .collect();
            mdp.set_transitions(s, a.index(), outcomes)?;
        }
    }
    Ok(mdp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Mdp,
    BruteForce,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Mdp => "mdp",
            Method::BruteForce => "brute-force",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeStats {
    pub states: usize,
    pub episodes: usize,
    /// Episodes that sampled a reward within `max_len` steps.
    pub rewarded: usize,
    /// Sequences whose exact replay lies within `ε`.
    pub valid: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileResult {
    pub target: Quaternion,
    pub sequence: GateSequence,
    pub distance: f64,
    pub method: Method,
    pub stats: Option<EpisodeStats>,
}

impl CompileResult {
    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn rendered(&self) -> String {
        self.sequence.render()
    }
}

/// Drops identity gates; a sequence of identities alone becomes `I`.
fn strip_identities(actions: &[CompileAction]) -> GateSequence {
    let gates: Vec<Gate> = actions
        .iter()
        .filter(|a| **a != CompileAction::I)
        .map(|a| a.gate())
        .collect();
    if gates.is_empty() {
        GateSequence(vec![Gate::I])
    } else {
        GateSequence(gates)
    }
}

pub fn extract_sequence(
    dynamics: &CompileDynamics,
    policy: &Policy,
    episodes: usize,
    max_len: usize,
    streams: &SeedStreams,
    exec: Exec,
) -> Result<CompileResult, CompileError> {
    if episodes == 0 || max_len == 0 {
        return Err(CompileError::Parameter(
            "episodes and max_len must be positive".into(),
        ));
    }
    let runs = par::map_indexed(exec, episodes, |i| {
        let mut rng = streams.rng("compile-extract", i as u64);
        let mut state = dynamics.start;
        let mut taken = Vec::new();
        let mut rewarded = false;
        while taken.len() < max_len {
            let a = CompileAction::ALL[policy.action(state)];
            taken.push(a);
            let (next, r) = dynamics.sample(state, a, &mut rng);
            state = next;
            if r {
                rewarded = true;
                break;
            }
        }
        (strip_identities(&taken), rewarded)
    });
    let mut best: Option<(GateSequence, f64)> = None;
    let mut closest: Option<(f64, usize)> = None;
    let (mut rewarded, mut valid) = (0, 0);
    for (sequence, hit) in runs {
        rewarded += hit as usize;
        let distance = sequence.unitary()?.distance(&dynamics.target);
        if closest.is_none_or(|(d, _)| distance < d) {
            closest = Some((distance, sequence.len()));
        }
        if distance >= dynamics.eps {
            continue;
        }
        valid += 1;
        let better = match &best {
            None => true,
            Some((b, d)) => {
                sequence.len() < b.len() || (sequence.len() == b.len() && distance < *d)
            }
        };
        if better {
            best = Some((sequence, distance));
        }
    }
    let stats = EpisodeStats {
        states: dynamics.n_states(),
        episodes,
        rewarded,
        valid,
    };
    match best {
        Some((sequence, distance)) => Ok(CompileResult {
            target: dynamics.target,
            sequence,
            distance,
            method: Method::Mdp,
            stats: Some(stats),
        }),
        None => Err(CompileError::NoValidSequence {
            episodes,
            best_distance: closest.map(|c| c.0),
            soft_bound: dynamics.grid.bin() * closest.map_or(max_len, |c| c.1) as f64,
        }),
    }
}

/// Estimate, solve and extract in one go.
pub fn compile_with_mdp(
    target: Quaternion,
    opts: &CompileOptions,
    streams: &SeedStreams,
    exec: Exec,
) -> Result<CompileResult, CompileError> {
    let dynamics = estimate_rollout_dynamics(target, opts, streams, exec)?;
    let mdp = build_compile_mdp(&dynamics, opts.gamma)?;
    let solution = policy_iteration(&mdp, &SolverOptions::default())?;
    extract_sequence(
        &dynamics,
        &solution.policy,
        opts.episodes,
        opts.max_len,
        streams,
        exec,
    )
}

fn decode_bits(bits: u64, n: u32) -> GateSequence {
    GateSequence(
        (0..n)
            .rev()
            .map(|i| {
                if (bits >> i) & 1 == 0 {
                    Gate::H
                } else {
                    Gate::T
                }
            })
            .collect(),
    )
}

fn search(q: Quaternion, target: &Quaternion, remaining: u32, bits: u64) -> (f64, u64) {
    if remaining == 0 {
        return (q.distance(target), bits);
    }
    let h = search(q.apply_h(), target, remaining - 1, bits << 1);
    let t = search(q.apply_t(), target, remaining - 1, (bits << 1) | 1);
    if t.0 < h.0 {
        t
    } else {
        h
    }
}

/// Closest length-`n` `{H, T}` sequence: `(distance, bits)` where bit `n−1`
/// is the first gate applied and `0` means `H`. Ties go to the smaller index.
fn closest_at_length(target: &Quaternion, n: u32, exec: Exec) -> (f64, u64) {
    let prefix = n.min(8);
    let shards = par::map_indexed(exec, 1 << prefix, |p| {
        let q = (0..prefix).rev().fold(Quaternion::IDENTITY, |q, i| {
            if (p >> i) & 1 == 0 {
                q.apply_h()
            } else {
                q.apply_t()
            }
        });
        search(q, target, n - prefix, p as u64)
    });
    shards.into_iter().fold(
        (f64::INFINITY, 0),
        |best, s| if s.0 < best.0 { s } else { best },
    )
}

/// Shortest `{H, T}` sequence within `ε` of `target`, closest at that length.
pub fn brute_force_shortest(
    target: Quaternion,
    eps: f64,
    max_n: u32,
    exec: Exec,
) -> Result<CompileResult, CompileError> {
    if !(eps > 0.0) {
        return Err(CompileError::Parameter("eps must be positive".into()));
    }
    if max_n > 40 {
        return Err(CompileError::Parameter(format!(
            "max_n {max_n} is beyond exhaustive reach"
        )));
    }
    for n in 1..=max_n {
        let (distance, bits) = closest_at_length(&target, n, exec);
        if distance < eps {
            let sequence = decode_bits(bits, n);
            let distance = sequence.unitary()?.distance(&target);
            return Ok(CompileResult {
                target,
                sequence,
                distance,
                method: Method::BruteForce,
                stats: None,
            });
        }
    }
    Err(CompileError::DepthExceeded { max_n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn q(v: [f64; 4]) -> Quaternion {
        Quaternion::from(v)
    }

    #[test]
    fn quantize_examples() {
        let g = QuatGrid::new(0.15).unwrap();
        assert_eq!(g.bins_per_axis(), 14);
        assert_eq!(g.quantize(&Quaternion::IDENTITY), [13, 6, 6, 6]);
        assert_eq!(g.quantize(&q([-1.0, 0.0, 0.0, 0.0])), [0, 6, 6, 6]);
        let a = q([0.52, 0.48, 0.52, 0.4749]);
        let b = q([0.52 + 1e-9, 0.48, 0.52 - 1e-9, 0.4749]);
        assert_eq!(g.quantize(&a), g.quantize(&b));
        for cell in [[13, 6, 6, 6], [0, 0, 0, 0], [13, 13, 13, 13], [3, 7, 11, 2]] {
            assert_eq!(g.decode(g.encode(cell)), cell);
        }
        assert!(QuatGrid::new(0.0).is_err() && QuatGrid::new(1.0).is_err());
    }

    #[test]
    fn dynamics_structure() {
        let target = q([-0.54981, 0.35852, 0.41549, 0.62972]);
        let streams = SeedStreams::new(3);
        let opts = CompileOptions::default();
        let d = estimate_rollout_dynamics(target, &opts, &streams, Exec::Parallel).unwrap();
        assert_eq!(
            d,
            estimate_rollout_dynamics(target, &opts, &streams, Exec::Sequential).unwrap()
        );
        for s in 0..d.n_states() {
            for &(next, _, _) in d.outcomes(s, CompileAction::I) {
                assert_eq!(next, s);
            }
            for a in [CompileAction::H, CompileAction::T] {
                assert!(d.successor_cells(s, a) <= 16);
            }
        }
        let mdp = build_compile_mdp(&d, 0.8).unwrap();
        for s in 0..mdp.n_states() {
            for a in 0..3 {
                let mut p = 0.0;
                mdp.outcomes(s, a).for_each(|t| p += t.prob);
                assert!((p - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rewards_match_exact_distances() {
        let target = Quaternion::IDENTITY;
        let streams = SeedStreams::new(11);
        let opts = CompileOptions {
            rollouts: 200,
            ..CompileOptions::default()
        };
        let d = estimate_rollout_dynamics(target, &opts, &streams, Exec::Parallel).unwrap();
        let recorded: u64 = (0..d.n_states())
            .flat_map(|s| [CompileAction::H, CompileAction::T].map(|a| (s, a)))
            .flat_map(|(s, a)| {
                d.outcomes(s, a)
                    .iter()
                    .filter(|o| o.1)
                    .map(|o| o.2)
                    .collect::<Vec<_>>()
            })
            .sum();
        // replay the same walks through the matrix-product route
        let mut expected = 0;
        for i in 0..opts.rollouts {
            let walk = rollout(&streams, i, opts.rollout_len);
            let gates: Vec<Gate> = walk.iter().map(|(a, _)| a.gate()).collect();
            for t in 1..=gates.len() {
                let u = GateSequence(gates[..t].to_vec()).unitary().unwrap();
                assert_abs_diff_eq!(u.distance(&walk[t - 1].1), 0.0, epsilon = 1e-9);
                expected += (u.distance(&target) < opts.eps) as u64;
            }
        }
        assert!(expected > 0);
        assert_eq!(recorded, expected);
    }

    #[test]
    fn rewarded_self_loops_reach_the_discount_bound() {
        let target = Gate::H.quaternion().unwrap();
        let streams = SeedStreams::new(5);
        let d =
            estimate_rollout_dynamics(target, &CompileOptions::default(), &streams, Exec::Parallel)
                .unwrap();
        let sol = policy_iteration(
            &build_compile_mdp(&d, 0.8).unwrap(),
            &SolverOptions::default(),
        )
        .unwrap();
        for s in 0..d.n_states() {
            let row = d.outcomes(s, CompileAction::I);
            if !row.is_empty() && row.iter().all(|o| o.1) {
                assert_abs_diff_eq!(sol.values.get(s), 5.0, epsilon = 1e-6);
            }
            assert!(sol.values.get(s) <= 5.0 + 1e-9);
        }
    }

    #[test]
    fn mdp_compiles_simple_targets() {
        let streams = SeedStreams::new(9);
        let opts = CompileOptions::default();
        let h = compile_with_mdp(
            Gate::H.quaternion().unwrap(),
            &opts,
            &streams,
            Exec::Parallel,
        )
        .unwrap();
        assert_eq!(h.rendered(), "H");
        assert_abs_diff_eq!(h.distance, 0.0, epsilon = 1e-12);
        let id = compile_with_mdp(Quaternion::IDENTITY, &opts, &streams, Exec::Parallel).unwrap();
        assert_eq!(id.rendered(), "I");
        let row1 = q([-0.54981, 0.35852, 0.41549, 0.62972]);
        let r = compile_with_mdp(row1, &opts, &streams, Exec::Parallel).unwrap();
        assert_eq!(r.len(), 5);
        assert!(r.distance < 0.3);
        assert_abs_diff_eq!(
            r.sequence.unitary().unwrap().distance(&row1),
            r.distance,
            epsilon = 1e-12
        );
    }

    #[test]
    fn brute_force_examples() {
        let r = brute_force_shortest(
            q([-0.54981, 0.35852, 0.41549, 0.62972]),
            0.3,
            12,
            Exec::Parallel,
        )
        .unwrap();
        assert_eq!(r.rendered(), "THTTH");
        assert_abs_diff_eq!(r.distance, 0.19996, epsilon = 1e-4);
        let r = brute_force_shortest(
            q([-0.98674, 0.06886, -0.1264, 0.07503]),
            0.3,
            12,
            Exec::Sequential,
        )
        .unwrap();
        assert_eq!(r.rendered(), "HH");
        assert_abs_diff_eq!(r.distance, 0.16286, epsilon = 1e-4);
        let r =
            brute_force_shortest(Gate::H.quaternion().unwrap(), 0.3, 12, Exec::Sequential).unwrap();
        assert_eq!(r.rendered(), "H");
        assert_eq!(r.distance, 0.0);
        assert_eq!(
            brute_force_shortest(
                q([-0.54981, 0.35852, 0.41549, 0.62972]),
                0.3,
                4,
                Exec::Sequential
            ),
            Err(CompileError::DepthExceeded { max_n: 4 })
        );
    }

    #[test]
    fn brute_force_matches_plain_enumeration() {
        // independent route: enumerate every sequence, compose gate matrices
        let target = q([-0.27418, 0.40672, -0.46718, 0.73563]);
        let eps = 0.3;
        let mut found = None;
        'outer: for n in 1..=10u32 {
            let mut best: Option<(f64, GateSequence)> = None;
            for bits in 0..(1u64 << n) {
                let seq = decode_bits(bits, n);
                let d = seq.unitary().unwrap().distance(&target);
                if best.as_ref().is_none_or(|b| d < b.0) {
                    best = Some((d, seq));
                }
            }
            let (d, seq) = best.unwrap();
            if d < eps {
                found = Some((d, seq));
                break 'outer;
            }
        }
        let (d, seq) = found.unwrap();
        let r = brute_force_shortest(target, eps, 10, Exec::Parallel).unwrap();
        assert_eq!(r.sequence, seq);
        assert_abs_diff_eq!(r.distance, d, epsilon = 1e-12);
        assert_eq!(decode_bits(0b01, 2).0, vec![Gate::H, Gate::T]);
    }

    #[test]
    fn parameter_validation() {
        let bad = CompileOptions {
            eps: 0.0,
            ..CompileOptions::default()
        };
        assert!(matches!(
            estimate_rollout_dynamics(
                Quaternion::IDENTITY,
                &bad,
                &SeedStreams::new(1),
                Exec::Sequential
            ),
            Err(CompileError::Parameter(_))
        ));
        assert!(brute_force_shortest(Quaternion::IDENTITY, -1.0, 4, Exec::Sequential).is_err());
    }
}
