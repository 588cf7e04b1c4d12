//! Reference computations used to check the solvers and the gate algebra.
//!
//! Nothing here shares a code path with the production routines it checks:
//! policies are valued by exact linear solves instead of sweeps, optimal values
//! come from enumerating every deterministic policy or from Jacobi value
//! iteration, and Jacobians are taken by central differences.

use rand::Rng;

use crate::mdp::{TabularMdp, Transition};

/// Random MDP with rewards in `{0, 1}` and 1–3 successors per pair.
pub fn random_mdp<R: Rng + ?Sized>(
    rng: &mut R,
    n_states: usize,
    n_actions: usize,
    gamma: f64,
) -> TabularMdp {
    let labels = (0..n_actions).map(|a| format!("a{a}")).collect();
    let mut mdp = TabularMdp::new(n_states, labels, gamma).expect("valid random MDP shape");
    for s in 0..n_states {
        for a in 0..n_actions {
            // leave some pairs unobserved to exercise the self-loop fill
            if rng.random_bool(0.1) {
                continue;
            }
            let k = rng.random_range(1..=3);
            let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = weights.iter().sum();
            let outcomes = weights
                .iter()
                .map(|w| Transition {
                    next: rng.random_range(0..n_states),
                    reward: if rng.random_bool(0.3) { 1.0 } else { 0.0 },
                    prob: w / total,
                })
                .collect();
            mdp.set_transitions(s, a, outcomes)
                .expect("normalized outcomes");
        }
    }
    mdp
}

fn expected_reward_and_row(mdp: &TabularMdp, s: usize, a: usize) -> (f64, Vec<f64>) {
    let mut r = 0.0;
    let mut row = vec![0.0; mdp.n_states()];
    mdp.outcomes(s, a).for_each(|t| {
        r += t.prob * t.reward;
        row[t.next] += t.prob;
    });
    (r, row)
}

/// Solves `(I − γ P_π) V = R_π` by Gaussian elimination with partial pivoting.
pub fn exact_policy_values(mdp: &TabularMdp, policy: &[usize]) -> Vec<f64> {
    let n = mdp.n_states();
    let mut m = vec![vec![0.0; n + 1]; n];
    for s in 0..n {
        let (r, row) = expected_reward_and_row(mdp, s, policy[s]);
        for j in 0..n {
            m[s][j] = if s == j { 1.0 } else { 0.0 } - mdp.gamma() * row[j];
        }
        m[s][n] = r;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                let pivot_row = m[col].clone();
                for (x, p) in m[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    (0..n).map(|s| m[s][n] / m[s][s]).collect()
}

/// Per-state maximum over all `|A|^|S|` deterministic policies.
pub fn best_by_enumeration(mdp: &TabularMdp) -> Vec<f64> {
    let (n, k) = (mdp.n_states(), mdp.n_actions());
    let mut best = vec![f64::NEG_INFINITY; n];
    let mut policy = vec![0usize; n];
    loop {
        for (b, v) in best.iter_mut().zip(exact_policy_values(mdp, &policy)) {
            *b = b.max(v);
        }
        // odometer increment
        let mut i = 0;
        while i < n {
            policy[i] += 1;
            if policy[i] < k {
                break;
            }
            policy[i] = 0;
            i += 1;
        }
        if i == n {
            return best;
        }
    }
}

/// Jacobi value iteration, stopping when the max change drops below `tol`.
pub fn value_iteration(mdp: &TabularMdp, tol: f64) -> Vec<f64> {
    let n = mdp.n_states();
    let mut v = vec![0.0; n];
    loop {
        let next: Vec<f64> = (0..n)
            .map(|s| {
                (0..mdp.n_actions())
                    .map(|a| {
                        let (r, row) = expected_reward_and_row(mdp, s, a);
                        r + mdp.gamma() * row.iter().zip(&v).map(|(p, x)| p * x).sum::<f64>()
                    })
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        let delta = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        if delta < tol {
            return v;
        }
    }
}

/// Lowest-index argmax of the one-step lookahead, computed from scratch.
pub fn greedy_by_enumeration(mdp: &TabularMdp, values: &[f64]) -> Vec<usize> {
    (0..mdp.n_states())
        .map(|s| {
            let mut best = (f64::NEG_INFINITY, 0);
            for a in 0..mdp.n_actions() {
                let (r, row) = expected_reward_and_row(mdp, s, a);
                let q = r + mdp.gamma() * row.iter().zip(values).map(|(p, x)| p * x).sum::<f64>();
                if q > best.0 + 1e-12 {
                    best = (q, a);
                }
            }
            best.1
        })
        .collect()
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn det4(m: [[f64; 4]; 4]) -> f64 {
    (0..4)
        .map(|col| {
            let minor: [[f64; 3]; 3] = std::array::from_fn(|r| {
                let mut row = [0.0; 3];
                for (k, c) in (0..4).filter(|&c| c != col).enumerate() {
                    row[k] = m[r + 1][c];
                }
                row
            });
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][col] * det3(minor)
        })
        .sum()
}

/// Determinant of the central-difference Jacobian of `f` at `x`.
pub fn jacobian_det(f: impl Fn([f64; 4]) -> [f64; 4], x: [f64; 4]) -> f64 {
    let h = 1e-6;
    let mut j = [[0.0; 4]; 4];
    for col in 0..4 {
        let (mut plus, mut minus) = (x, x);
        plus[col] += h;
        minus[col] -= h;
        let (fp, fm) = (f(plus), f(minus));
        for row in 0..4 {
            j[row][col] = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    det4(j)
}
