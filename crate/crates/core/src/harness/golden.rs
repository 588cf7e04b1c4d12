//! Published reference results reproduced by the verification suite, and the
//! target-file reader.

use crate::su2::Quaternion;

/// Shortest known `{H, T}` compilations at `ε = 0.3`, sequences rendered
/// right-to-left. Targets are printed to five decimals and are not renormalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenCompile {
    pub target: [f64; 4],
    pub mdp: &'static str,
    pub brute_force: &'static str,
    pub mdp_distance: f64,
    pub brute_force_distance: f64,
}

pub const COMPILE_EPS: f64 = 0.3;

#[allow(clippy::approx_constant)]
pub const GOLDEN_COMPILE: [GoldenCompile; 29] = [
    GoldenCompile {
        target: [-0.54981, 0.35852, 0.41549, 0.62972],
        mdp: "THTTH",
        brute_force: "THTTH",
        mdp_distance: 0.19996,
        brute_force_distance: 0.19996,
    },
    GoldenCompile {
        target: [-0.76688, 0.32823, -0.37129, 0.4078],
        mdp: "HTHT",
        brute_force: "HTHT",
        mdp_distance: 0.2483,
        brute_force_distance: 0.2483,
    },
    GoldenCompile {
        target: [-0.52514, -0.38217, 0.72416, 0.23187],
        mdp: "HTTTTHHHTH",
        brute_force: "HTTTTHTHHH",
        mdp_distance: 0.18812,
        brute_force_distance: 0.18812,
    },
    GoldenCompile {
        target: [-0.94809, 0.13988, 0.25424, -0.13006],
        mdp: "HTTHTHHHTT",
        brute_force: "THTTHHHTHT",
        mdp_distance: 0.23144,
        brute_force_distance: 0.20043,
    },
    GoldenCompile {
        target: [-0.66457, -0.47827, 0.45341, 0.35218],
        mdp: "HTTTTHHHTH",
        brute_force: "HTTHHTHTTH",
        mdp_distance: 0.29977,
        brute_force_distance: 0.26614,
    },
    GoldenCompile {
        target: [-0.93392, -0.04759, -0.14279, -0.32426],
        mdp: "THHHTHTHT",
        brute_force: "TTHHHTHTH",
        mdp_distance: 0.25982,
        brute_force_distance: 0.24801,
    },
    GoldenCompile {
        target: [-0.06813, -0.20031, 0.97526, -0.06406],
        mdp: "TTTTHTTTTH",
        brute_force: "TTTTHTTTTH",
        mdp_distance: 0.22244,
        brute_force_distance: 0.22244,
    },
    GoldenCompile {
        target: [-0.52828, 0.65335, -0.26856, 0.47109],
        mdp: "HTHTT",
        brute_force: "HTHTT",
        mdp_distance: 0.23627,
        brute_force_distance: 0.23627,
    },
    GoldenCompile {
        target: [-0.62701, 0.42767, -0.1176, 0.64041],
        mdp: "HTTHT",
        brute_force: "HTTHT",
        mdp_distance: 0.22121,
        brute_force_distance: 0.22121,
    },
    GoldenCompile {
        target: [-0.27418, 0.40672, -0.46718, 0.73563],
        mdp: "HTTTHTT",
        brute_force: "HTTTHTT",
        mdp_distance: 0.24486,
        brute_force_distance: 0.24486,
    },
    GoldenCompile {
        target: [-0.09875, 0.75277, 0.50256, -0.41354],
        mdp: "TTHTTTTT",
        brute_force: "TTHTTTTT",
        mdp_distance: 0.28736,
        brute_force_distance: 0.28736,
    },
    GoldenCompile {
        target: [-0.04894, -0.00402, -0.83205, 0.55252],
        mdp: "HTTTTHTT",
        brute_force: "HTTTTHTT",
        mdp_distance: 0.20474,
        brute_force_distance: 0.20474,
    },
    GoldenCompile {
        target: [-0.68691, 0.36726, 0.04274, -0.62566],
        mdp: "TTHTTT",
        brute_force: "TTHTTT",
        mdp_distance: 0.25131,
        brute_force_distance: 0.25131,
    },
    GoldenCompile {
        target: [-0.06072, 0.76411, -0.12676, -0.62959],
        mdp: "TTTTHTTT",
        brute_force: "TTTTHTTT",
        mdp_distance: 0.27854,
        brute_force_distance: 0.27854,
    },
    GoldenCompile {
        target: [-0.62191, -0.0639, -0.76511, 0.1541],
        mdp: "TTTTH",
        brute_force: "TTTTH",
        mdp_distance: 0.19609,
        brute_force_distance: 0.19609,
    },
    GoldenCompile {
        target: [-0.98674, 0.06886, -0.1264, 0.07503],
        mdp: "HH",
        brute_force: "HH",
        mdp_distance: 0.16286,
        brute_force_distance: 0.16286,
    },
    GoldenCompile {
        target: [-0.86814, 0.26898, 0.38056, 0.17075],
        mdp: "HTTTHTHHHTT",
        brute_force: "HTHHTHTHTTT",
        mdp_distance: 0.22221,
        brute_force_distance: 0.09319,
    },
    GoldenCompile {
        target: [-0.2836, -0.03982, 0.95045, -0.12098],
        mdp: "HTTTHTHTHTTT",
        brute_force: "HTTTHTHTHTTT",
        mdp_distance: 0.07442,
        brute_force_distance: 0.07442,
    },
    GoldenCompile {
        target: [-0.45815, -0.60513, -0.62792, 0.17215],
        mdp: "TTTTTHHHTTH",
        brute_force: "TTTTHTHTHTH",
        mdp_distance: 0.2187,
        brute_force_distance: 0.19569,
    },
    GoldenCompile {
        target: [-0.60091, -0.54151, 0.58106, 0.08967],
        mdp: "HTHHTTHTH",
        brute_force: "HTTHHTHTH",
        mdp_distance: 0.16617,
        brute_force_distance: 0.16617,
    },
    GoldenCompile {
        target: [-0.3671, -0.15162, -0.40285, 0.8246],
        mdp: "HTHTHTHTTTTH",
        brute_force: "HTHTHTHTTTTH",
        mdp_distance: 0.15013,
        brute_force_distance: 0.15013,
    },
    GoldenCompile {
        target: [-0.33288, 0.42797, 0.28725, 0.78963],
        mdp: "THTTTH",
        brute_force: "THTTTH",
        mdp_distance: 0.29693,
        brute_force_distance: 0.29693,
    },
    GoldenCompile {
        target: [-0.84802, -0.1492, 0.02132, 0.50808],
        mdp: "HTH",
        brute_force: "HTH",
        mdp_distance: 0.21022,
        brute_force_distance: 0.21022,
    },
    GoldenCompile {
        target: [-0.88329, -0.28327, -0.28398, 0.2427],
        mdp: "THTHTHHTTH",
        brute_force: "THTHHHTTTH",
        mdp_distance: 0.21036,
        brute_force_distance: 0.21036,
    },
    GoldenCompile {
        target: [-0.3926, -0.75829, 0.34643, -0.38838],
        mdp: "THTHHHTTTT",
        brute_force: "TTHTHTTTHH",
        mdp_distance: 0.26302,
        brute_force_distance: 0.22761,
    },
    GoldenCompile {
        target: [-0.85775, 0.2746, 0.42074, -0.10883],
        mdp: "HTHTHTHHTT",
        brute_force: "HTHTHTHHTT",
        mdp_distance: 0.12494,
        brute_force_distance: 0.12494,
    },
    GoldenCompile {
        target: [-0.27497, 0.25412, 0.69666, 0.61195],
        mdp: "TTHTTTH",
        brute_force: "TTHTTTH",
        mdp_distance: 0.0623,
        brute_force_distance: 0.0623,
    },
    GoldenCompile {
        target: [-0.47217, 0.0121, 0.23258, 0.85018],
        mdp: "HTTTH",
        brute_force: "HTTTH",
        mdp_distance: 0.26015,
        brute_force_distance: 0.26015,
    },
    GoldenCompile {
        target: [-0.67911, -0.46404, -0.35643, 0.4432],
        mdp: "HTTHTHHTTH",
        brute_force: "HTTHTHHTTH",
        mdp_distance: 0.27136,
        brute_force_distance: 0.27136,
    },
];

/// The row whose shortest path is non-monotone in both distance and trace overlap.
pub const NON_MONOTONE_ROW: usize = 2;

/// `(n, sequence)` preparing `(HT)^n |0⟩` to about 99% fidelity with `{I, H, T}`
/// on the `k = 16` grid.
pub const GOLDEN_HT_STATES: [(u64, &str); 8] = [
    (100, "TTHTHTHTH"),
    (1_000, "TTTHTHTTTH"),
    (10_000, "HTH"),
    (1_000_000, "HTTTTHTH"),
    (10_000_000, "HTTTTTHTHTHTHTTTH"),
    (100_000_000, "I"),
    (1_000_000_000, "I"),
    (10_000_000_000, "HTTTHTHTHTH"),
];

/// One quaternion per line as four whitespace- or comma-separated numbers;
/// brackets, blank lines and `#` comments are ignored.
pub fn parse_targets(text: &str) -> Result<Vec<Quaternion>, String> {
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            (
                i,
                line.split('#')
                    .next()
                    .unwrap_or("")
                    .replace(['[', ']', ','], " "),
            )
        })
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            let xs: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|e| format!("line {}: {e}", i + 1))?;
            let q: [f64; 4] = xs.try_into().map_err(|v: Vec<f64>| {
                format!("line {}: expected 4 numbers, got {}", i + 1, v.len())
            })?;
            let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-3 {
                return Err(format!("line {}: norm {norm:.6} is not close to 1", i + 1));
            }
            Ok(Quaternion::from(q))
        })
        .collect()
}
