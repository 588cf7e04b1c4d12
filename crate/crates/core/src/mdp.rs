//! Finite MDPs with sparse estimated dynamics, solved by policy iteration.
//!
//! Rewards live on transitions: `p(s′, r | s, a)` is a list of
//! `(next, reward, prob)` triples. A `(s, a)` pair with no entries is read as a
//! probability-one self-loop paying nothing.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MdpError {
    #[error("discount must lie in [0, 1), got {0}")]
    Discount(f64),
    #[error("MDP needs at least one state and one action")]
    Empty,
    #[error("state {0} out of range")]
    State(usize),
    #[error("action {0} out of range")]
    Action(usize),
    #[error("transition ({state}, {action}) invalid: {reason}")]
    Transition {
        state: usize,
        action: usize,
        reason: String,
    },
    #[error("policy has {got} entries for {expected} states, or names an unknown action")]
    Policy { expected: usize, got: usize },
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error("policy evaluation did not converge within {sweeps} sweeps (last change {delta:e})")]
    NotConverged { sweeps: usize, delta: f64 },
    #[error("policy iteration did not stabilise within {0} rounds")]
    PolicyCycle(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub next: usize,
    pub reward: f64,
    pub prob: f64,
}

/// Transitions of one `(s, a)` pair.
#[derive(Debug, Clone, Copy)]
pub enum Outcomes<'a> {
    Listed(&'a [Transition]),
    /// Never observed: stay put, no reward.
    SelfLoop(usize),
}

impl Outcomes<'_> {
    pub fn for_each(&self, mut f: impl FnMut(Transition)) {
        match *self {
            Outcomes::Listed(ts) => ts.iter().copied().for_each(f),
            Outcomes::SelfLoop(s) => f(Transition {
                next: s,
                reward: 0.0,
                prob: 1.0,
            }),
        }
    }

    pub fn is_observed(&self) -> bool {
        matches!(self, Outcomes::Listed(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MdpDocument", into = "MdpDocument")]
pub struct TabularMdp {
    n_states: usize,
    actions: Vec<String>,
    gamma: f64,
    rows: Vec<Vec<Transition>>,
}

impl TabularMdp {
    pub fn new(n_states: usize, actions: Vec<String>, gamma: f64) -> Result<Self, MdpError> {
        if n_states == 0 || actions.is_empty() {
            return Err(MdpError::Empty);
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(MdpError::Discount(gamma));
        }
        let rows = vec![Vec::new(); n_states * actions.len()];
        Ok(TabularMdp {
            n_states,
            actions,
            gamma,
            rows,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn action_labels(&self) -> &[String] {
        &self.actions
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Replaces the outcomes of `(state, action)`. Probabilities must be
    /// non-negative and sum to one within 1e-9; an empty list marks the pair
    /// as unobserved.
    pub fn set_transitions(
        &mut self,
        state: usize,
        action: usize,
        outcomes: Vec<Transition>,
    ) -> Result<(), MdpError> {
        if state >= self.n_states {
            return Err(MdpError::State(state));
        }
        if action >= self.n_actions() {
            return Err(MdpError::Action(action));
        }
        let bad = |reason: String| MdpError::Transition {
            state,
            action,
            reason,
        };
        if !outcomes.is_empty() {
            let mut total = 0.0;
            for t in &outcomes {
                if t.next >= self.n_states {
                    return Err(bad(format!("successor {} out of range", t.next)));
                }
                if !(t.prob >= 0.0) || !t.reward.is_finite() {
                    return Err(bad(format!(
                        "bad probability {} or reward {}",
                        t.prob, t.reward
                    )));
                }
                total += t.prob;
            }
            if (total - 1.0).abs() > 1e-9 {
                return Err(bad(format!("probabilities sum to {total}")));
            }
        }
        let idx = state * self.n_actions() + action;
        self.rows[idx] = outcomes;
        Ok(())
    }

    pub fn outcomes(&self, state: usize, action: usize) -> Outcomes<'_> {
        let row = &self.rows[state * self.n_actions() + action];
        if row.is_empty() {
            Outcomes::SelfLoop(state)
        } else {
            Outcomes::Listed(row)
        }
    }

    /// `Σ p(s′, r | s, a) [r + γ V(s′)]`.
    pub fn q_value(&self, state: usize, action: usize, values: &[f64]) -> f64 {
        let mut q = 0.0;
        self.outcomes(state, action)
            .for_each(|t| q += t.prob * (t.reward + self.gamma * values[t.next]));
        q
    }

    fn check_policy(&self, policy: &Policy) -> Result<(), MdpError> {
        if policy.0.len() != self.n_states || policy.0.iter().any(|&a| a >= self.n_actions()) {
            return Err(MdpError::Policy {
                expected: self.n_states,
                got: policy.0.len(),
            });
        }
        Ok(())
    }
}

/// Deterministic policy: one action index per state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy(pub Vec<usize>);

impl Policy {
    pub fn uniform(n_states: usize, action: usize) -> Self {
        Policy(vec![action; n_states])
    }

    pub fn action(&self, state: usize) -> usize {
        self.0[state]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueFunction(pub Vec<f64>);

impl ValueFunction {
    pub fn get(&self, state: usize) -> f64 {
        self.0[state]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Stop evaluating once no state changes by more than this in a sweep.
    pub tol: f64,
    pub max_sweeps: usize,
    /// An action must beat the incumbent by more than this to replace it.
    pub tie_tol: f64,
    pub max_rounds: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-8,
            max_sweeps: 1_000_000,
            tie_tol: 1e-9,
            max_rounds: 10_000,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions {
            tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub policy: Policy,
    pub values: ValueFunction,
    pub rounds: usize,
}

/// Iterative policy evaluation with in-place sweeps in ascending state order.
pub fn policy_evaluation(
    mdp: &TabularMdp,
    policy: &Policy,
    opts: &SolverOptions,
) -> Result<ValueFunction, MdpError> {
    evaluate_from(mdp, policy, vec![0.0; mdp.n_states], opts)
}

fn evaluate_from(
    mdp: &TabularMdp,
    policy: &Policy,
    mut v: Vec<f64>,
    opts: &SolverOptions,
) -> Result<ValueFunction, MdpError> {
    mdp.check_policy(policy)?;
    if !(opts.tol > 0.0) {
        return Err(MdpError::Tolerance(opts.tol));
    }
    let mut delta = f64::INFINITY;
    for _ in 0..opts.max_sweeps {
        delta = 0.0;
        for s in 0..mdp.n_states {
            let new = mdp.q_value(s, policy.action(s), &v);
            delta = f64::max(delta, (new - v[s]).abs());
            v[s] = new;
        }
        if delta < opts.tol {
            return Ok(ValueFunction(v));
        }
    }
    Err(MdpError::NotConverged {
        sweeps: opts.max_sweeps,
        delta,
    })
}

/// Greedy policy; among actions within `1e-12` of the best, the lowest index wins.
pub fn policy_improvement(mdp: &TabularMdp, values: &ValueFunction) -> Policy {
    Policy(
        (0..mdp.n_states)
            .map(|s| {
                let qs: Vec<f64> = (0..mdp.n_actions())
                    .map(|a| mdp.q_value(s, a, &values.0))
                    .collect();
                let best = qs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                qs.iter().position(|&q| q >= best - 1e-12).unwrap_or(0)
            })
            .collect(),
    )
}

/// Greedy step that keeps the incumbent action unless another action is
/// better by more than `tie_tol`; the replacement is the lowest-index action
/// within `tie_tol` of the best.
pub fn policy_improvement_from(
    mdp: &TabularMdp,
    values: &ValueFunction,
    current: &Policy,
    tie_tol: f64,
) -> Policy {
    Policy(
        (0..mdp.n_states)
            .map(|s| {
                let qs: Vec<f64> = (0..mdp.n_actions())
                    .map(|a| mdp.q_value(s, a, &values.0))
                    .collect();
                let best = qs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let incumbent = current.action(s);
                if qs[incumbent] >= best - tie_tol {
                    incumbent
                } else {
                    qs.iter()
                        .position(|&q| q >= best - tie_tol)
                        .unwrap_or(incumbent)
                }
            })
            .collect(),
    )
}

/// Alternates evaluation and improvement until the policy stops changing.
/// Starts from the all-zeros policy; each evaluation warm-starts from the last.
pub fn policy_iteration(mdp: &TabularMdp, opts: &SolverOptions) -> Result<Solution, MdpError> {
    let mut policy = Policy::uniform(mdp.n_states, 0);
    let mut values = vec![0.0; mdp.n_states];
    for round in 1..=opts.max_rounds {
        let v = evaluate_from(mdp, &policy, values, opts)?;
        let next = policy_improvement_from(mdp, &v, &policy, opts.tie_tol);
        if next == policy {
            return Ok(Solution {
                policy,
                values: v,
                rounds: round,
            });
        }
        policy = next;
        values = v.0;
    }
    Err(MdpError::PolicyCycle(opts.max_rounds))
}

/// Flat JSON form of an MDP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdpDocument {
    pub schema_version: u32,
    pub n_states: usize,
    pub action_labels: Vec<String>,
    pub gamma: f64,
    /// `[state, action, next, reward, prob]`
    pub transitions: Vec<(usize, usize, usize, f64, f64)>,
}

impl From<TabularMdp> for MdpDocument {
    fn from(mdp: TabularMdp) -> Self {
        let n_actions = mdp.n_actions();
        let transitions = mdp
            .rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter()
                    .map(move |t| (i / n_actions, i % n_actions, t.next, t.reward, t.prob))
            })
            .collect();
        MdpDocument {
            schema_version: SCHEMA_VERSION,
            n_states: mdp.n_states,
            action_labels: mdp.actions,
            gamma: mdp.gamma,
            transitions,
        }
    }
}

impl TryFrom<MdpDocument> for TabularMdp {
    type Error = MdpError;

    fn try_from(doc: MdpDocument) -> Result<Self, MdpError> {
        let mut mdp = TabularMdp::new(doc.n_states, doc.action_labels, doc.gamma)?;
        let mut grouped: std::collections::BTreeMap<(usize, usize), Vec<Transition>> =
            Default::default();
        for (s, a, next, reward, prob) in doc.transitions {
            grouped
                .entry((s, a))
                .or_default()
                .push(Transition { next, reward, prob });
        }
        for ((s, a), ts) in grouped {
            mdp.set_transitions(s, a, ts)?;
        }
        Ok(mdp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("a{i}")).collect()
    }

    fn det(next: usize, reward: f64) -> Vec<Transition> {
        vec![Transition {
            next,
            reward,
            prob: 1.0,
        }]
    }

    /// States 0 → 1 → 2 = target; action 0 is "stay", action 1 moves forward.
    fn chain() -> TabularMdp {
        let mut m = TabularMdp::new(3, labels(2), 0.8).unwrap();
        m.set_transitions(0, 0, det(0, 0.0)).unwrap();
        m.set_transitions(0, 1, det(1, 0.0)).unwrap();
        m.set_transitions(1, 0, det(1, 0.0)).unwrap();
        m.set_transitions(1, 1, det(2, 1.0)).unwrap();
        m.set_transitions(2, 0, det(2, 1.0)).unwrap();
        m.set_transitions(2, 1, det(0, 0.0)).unwrap();
        m
    }

    #[test]
    fn single_rewarded_self_loop() {
        let mut m = TabularMdp::new(1, labels(1), 0.8).unwrap();
        m.set_transitions(0, 0, det(0, 1.0)).unwrap();
        let v = policy_evaluation(&m, &Policy(vec![0]), &SolverOptions::default()).unwrap();
        assert!((v.get(0) - 5.0).abs() < 1e-7);
    }

    #[test]
    fn arrival_reward_chain() {
        let m = chain();
        let v = policy_evaluation(&m, &Policy(vec![1, 1, 0]), &SolverOptions::default()).unwrap();
        assert!((v.get(2) - 5.0).abs() < 1e-7);
        assert!((v.get(1) - 5.0).abs() < 1e-7);
        assert!((v.get(0) - 4.0).abs() < 1e-7);
    }

    #[test]
    fn greedy_picks_the_rewarding_action() {
        let m = chain();
        let v = ValueFunction(vec![0.0, 0.0, 0.0]);
        assert_eq!(policy_improvement(&m, &v).action(1), 1);
        let mut same = TabularMdp::new(2, labels(3), 0.9).unwrap();
        for a in 0..3 {
            same.set_transitions(0, a, det(1, 0.0)).unwrap();
            same.set_transitions(1, a, det(0, 0.0)).unwrap();
        }
        assert_eq!(
            policy_improvement(&same, &ValueFunction(vec![1.0, 2.0])),
            Policy(vec![0, 0])
        );
    }

    #[test]
    fn greedy_matches_brute_force_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let m = oracle::random_mdp(&mut rng, 10, 4, 0.9);
            let v = ValueFunction((0..10).map(|i| (i as f64 * 0.37).sin() * 3.0).collect());
            let expect = oracle::greedy_by_enumeration(&m, &v.0);
            assert_eq!(policy_improvement(&m, &v).0, expect);
        }
    }

    #[test]
    fn iteration_solves_target_mdp() {
        let sol = policy_iteration(&chain(), &SolverOptions::default()).unwrap();
        assert_eq!(sol.policy, Policy(vec![1, 1, 0]));
        assert!((sol.values.get(2) - 5.0).abs() < 1e-6);
    }

    #[test]
    fn unreachable_reward_means_zero_value() {
        let mut m = chain();
        // state 0 can no longer leave
        m.set_transitions(0, 1, det(0, 0.0)).unwrap();
        let sol = policy_iteration(&m, &SolverOptions::default()).unwrap();
        assert_eq!(sol.values.get(0), 0.0);
    }

    #[test]
    fn missing_pairs_are_unrewarded_self_loops() {
        let mut m = TabularMdp::new(2, labels(2), 0.5).unwrap();
        m.set_transitions(1, 1, det(1, 1.0)).unwrap();
        assert!(!m.outcomes(0, 0).is_observed());
        let sol = policy_iteration(&m, &SolverOptions::default()).unwrap();
        assert_eq!(sol.values.get(0), 0.0);
        assert!((sol.values.get(1) - 2.0).abs() < 1e-7);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            TabularMdp::new(1, labels(1), 1.0),
            Err(MdpError::Discount(1.0))
        );
        assert_eq!(TabularMdp::new(0, labels(1), 0.5), Err(MdpError::Empty));
        let mut m = TabularMdp::new(2, labels(1), 0.5).unwrap();
        assert!(matches!(
            m.set_transitions(0, 0, det(2, 0.0)),
            Err(MdpError::Transition { .. })
        ));
        let half = vec![Transition {
            next: 0,
            reward: 0.0,
            prob: 0.5,
        }];
        assert!(matches!(
            m.set_transitions(0, 0, half),
            Err(MdpError::Transition { .. })
        ));
        assert_eq!(m.set_transitions(0, 3, vec![]), Err(MdpError::Action(3)));
        assert!(matches!(
            policy_evaluation(&m, &Policy(vec![0]), &SolverOptions::default()),
            Err(MdpError::Policy { .. })
        ));
        assert_eq!(
            policy_evaluation(&m, &Policy(vec![0, 0]), &SolverOptions::with_tol(0.0)),
            Err(MdpError::Tolerance(0.0))
        );
        let capped = SolverOptions {
            max_sweeps: 2,
            ..Default::default()
        };
        let mut loopy = TabularMdp::new(1, labels(1), 0.99).unwrap();
        loopy.set_transitions(0, 0, det(0, 1.0)).unwrap();
        assert!(matches!(
            policy_evaluation(&loopy, &Policy(vec![0]), &capped),
            Err(MdpError::NotConverged { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let m = chain();
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("\"schema_version\":1"));
        let back: TabularMdp = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        let p = Policy(vec![1, 0, 1]);
        assert_eq!(
            serde_json::from_str::<Policy>(&serde_json::to_string(&p).unwrap()).unwrap(),
            p
        );
    }

    #[test]
    fn deterministic_solutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let m = oracle::random_mdp(&mut rng, 30, 5, 0.95);
        let a = policy_iteration(&m, &SolverOptions::default()).unwrap();
        let b = policy_iteration(&m, &SolverOptions::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.values.0.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            b.values.0.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
    }

    proptest! {
        #[test]
        fn matches_exhaustive_enumeration(seed in any::<u64>(), n in 1usize..=6, k in 1usize..=3, gamma in 0.0f64..0.95) {
            let m = oracle::random_mdp(&mut ChaCha8Rng::seed_from_u64(seed), n, k, gamma);
            let sol = policy_iteration(&m, &SolverOptions::default()).unwrap();
            let best = oracle::best_by_enumeration(&m);
            let vi = oracle::value_iteration(&m, 1e-12);
            for s in 0..n {
                prop_assert!((sol.values.get(s) - best[s]).abs() < 1e-6);
                prop_assert!((sol.values.get(s) - vi[s]).abs() < 1e-6);
            }
        }

        #[test]
        fn improvement_is_monotone_and_bounded(seed in any::<u64>(), gamma in 0.0f64..0.95) {
            let m = oracle::random_mdp(&mut ChaCha8Rng::seed_from_u64(seed), 8, 3, gamma);
            let opts = SolverOptions::default();
            let mut policy = Policy::uniform(8, 0);
            let mut v = policy_evaluation(&m, &policy, &opts).unwrap();
            for _ in 0..50 {
                let next = policy_improvement_from(&m, &v, &policy, opts.tie_tol);
                let nv = policy_evaluation(&m, &next, &opts).unwrap();
                for s in 0..8 {
                    prop_assert!(nv.get(s) >= v.get(s) - 1e-6);
                    prop_assert!(nv.get(s) >= 0.0 && nv.get(s) <= 1.0 / (1.0 - gamma) + 1e-6);
                }
                if next == policy { break; }
                policy = next;
                v = nv;
            }
        }
    }
}
