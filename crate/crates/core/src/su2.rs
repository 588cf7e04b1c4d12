//! SU(2) elements as unit quaternions.
//!
//! A quaternion `(a, b, c, d)` stands for the unit-determinant matrix
//!
//! ```text
//!     U = [[ a + ib,   c + id ],
//!          [ -c + id,  a - ib ]]
//! ```
//!
//! which expands as `U = a·1 + i(b·σz + c·σy + d·σx)`. The vector part therefore
//! pairs `(b, c, d)` with `(σz, σy, σx)`, and the Bloch-sphere rotation axis of `U`
//! is `-(d, c, b)` in `(x, y, z)` order.
//!
//! Gates carry no global phase: `H = RY(π/2)·RZ(π)` and `T = RZ(π/4)`, so that
//! `H² = T⁸ = -1`. The sign of a quaternion is significant.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI, TAU};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Norm drift tolerated before a product is renormalized.
pub const NORM_DRIFT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Su2Error {
    #[error("rotation angle must be finite, got {0}")]
    NonFiniteAngle(f64),
    #[error("rotation axis undefined for ±identity")]
    DegenerateAxis,
    #[error("invalid Bloch point (theta={theta}, phi={phi})")]
    InvalidBlochPoint { theta: f64, phi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl From<[f64; 4]> for Quaternion {
    fn from(v: [f64; 4]) -> Self {
        Quaternion::new(v[0], v[1], v[2], v[3])
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        q.to_array()
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.5} {:.5} {:.5} {:.5}]",
            self.a, self.b, self.c, self.d
        )
    }
}

impl std::ops::Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.a, -self.b, -self.c, -self.d)
    }
}

/// ZYZ Euler angles with `U = RZ(alpha)·RY(beta)·RZ(gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZyzAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl ZyzAngles {
    pub fn recompose(&self) -> Quaternion {
        let rz = |t: f64| Quaternion::new((t / 2.0).cos(), -(t / 2.0).sin(), 0.0, 0.0);
        let ry = Quaternion::new((self.beta / 2.0).cos(), 0.0, -(self.beta / 2.0).sin(), 0.0);
        rz(self.alpha).compose(ry).compose(rz(self.gamma))
    }
}

/// Bloch-sphere rotation: unit axis in `(x, y, z)` and angle in `[0, 2π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisAngle {
    pub axis: [f64; 3],
    pub angle: f64,
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 0.0,
    };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quaternion { a, b, c, d }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        Quaternion::new(self.a / n, self.b / n, self.c / n, self.d / n)
    }

    fn renormalized(self) -> Self {
        if (self.norm_sqr() - 1.0).abs() > NORM_DRIFT {
            self.normalized()
        } else {
            self
        }
    }

    /// Quaternion of the matrix product `self · u` (`u` acts first).
    pub fn compose(self, u: Quaternion) -> Quaternion {
        let g = self;
        Quaternion::new(
            g.a * u.a - g.b * u.b - g.c * u.c - g.d * u.d,
            g.a * u.b + g.b * u.a - g.d * u.c + g.c * u.d,
            g.a * u.c - g.b * u.d + g.c * u.a + g.d * u.b,
            g.a * u.d + g.b * u.c + g.d * u.a - g.c * u.b,
        )
        .renormalized()
    }

    /// Left multiplication by `T`, written out component by component.
    pub fn apply_t(self) -> Quaternion {
        Quaternion::from(t_map(self.to_array())).renormalized()
    }

    /// Left multiplication by `H`, written out component by component.
    pub fn apply_h(self) -> Quaternion {
        Quaternion::from(h_map(self.to_array())).renormalized()
    }

    /// `self^n` by repeated squaring, renormalizing after every product.
    ///
    /// Multiplying angles instead (`n·θ mod 4π`) loses all precision for
    /// `n` around `10^10`.
    pub fn power(self, mut n: u64) -> Quaternion {
        let mut acc = Quaternion::IDENTITY;
        let mut base = self;
        while n > 0 {
            if n & 1 == 1 {
                acc = base.compose(acc).normalized();
            }
            n >>= 1;
            if n > 0 {
                base = base.compose(base).normalized();
            }
        }
        acc
    }

    pub fn conj(self) -> Quaternion {
        Quaternion::new(self.a, -self.b, -self.c, -self.d)
    }

    /// Euclidean distance in R⁴.
    pub fn distance(&self, other: &Quaternion) -> f64 {
        let (da, db, dc, dd) = (
            self.a - other.a,
            self.b - other.b,
            self.c - other.c,
            self.d - other.d,
        );
        (da * da + db * db + dc * dc + dd * dd).sqrt()
    }

    /// `Re tr(U† V)` for `U = self`, `V = other`.
    pub fn hilbert_schmidt(&self, other: &Quaternion) -> f64 {
        2.0 * (self.a * other.a + self.b * other.b + self.c * other.c + self.d * other.d)
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [
            [
                Complex64::new(self.a, self.b),
                Complex64::new(self.c, self.d),
            ],
            [
                Complex64::new(-self.c, self.d),
                Complex64::new(self.a, -self.b),
            ],
        ]
    }

    /// Reads `(a, b, c, d)` off the first row of an SU(2) matrix.
    pub fn from_matrix(m: &[[Complex64; 2]; 2]) -> Quaternion {
        Quaternion::new(m[0][0].re, m[0][0].im, m[0][1].re, m[0][1].im)
    }

    /// ZYZ decomposition with quadrant-aware arctangents.
    ///
    /// `beta = 0` resolves to `alpha = gamma = delta/2`, `beta = π` to `gamma = 0`.
    pub fn zyz(&self) -> ZyzAngles {
        let diag = (self.a * self.a + self.b * self.b).sqrt();
        let off = (self.c * self.c + self.d * self.d).sqrt();
        let beta = 2.0 * diag.min(1.0).acos();
        // half-sum (alpha+gamma)/2 and half-difference (alpha-gamma)/2
        let sum = if diag > 1e-12 {
            (-self.b).atan2(self.a)
        } else {
            0.0
        };
        let diff = if off > 1e-12 {
            self.d.atan2(-self.c)
        } else {
            0.0
        };
        if diag <= 1e-12 {
            ZyzAngles {
                alpha: 2.0 * diff,
                beta,
                gamma: 0.0,
            }
        } else {
            ZyzAngles {
                alpha: sum + diff,
                beta,
                gamma: sum - diff,
            }
        }
    }

    pub fn axis_angle(&self) -> Result<AxisAngle, Su2Error> {
        let v = (self.b * self.b + self.c * self.c + self.d * self.d).sqrt();
        if v < 1e-12 {
            return Err(Su2Error::DegenerateAxis);
        }
        let angle = 2.0 * self.a.clamp(-1.0, 1.0).acos();
        Ok(AxisAngle {
            axis: [-self.d / v, -self.c / v, -self.b / v],
            angle,
        })
    }

    /// SO(3) rotation this element induces on Bloch vectors.
    pub fn bloch_rotation(&self) -> [[f64; 3]; 3] {
        // standard (w, x, y, z) rotation quaternion
        let (w, x, y, z) = (self.a, -self.d, -self.c, -self.b);
        [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ]
    }

    /// Bloch angles of `U|ψ(θ, φ)⟩`, global phase discarded.
    pub fn apply_to_bloch(&self, p: BlochPoint) -> BlochPoint {
        let [amp0, amp1] = p.spinor();
        let m = self.matrix();
        let out0 = m[0][0] * amp0 + m[0][1] * amp1;
        let out1 = m[1][0] * amp0 + m[1][1] * amp1;
        let theta = 2.0 * out1.norm().atan2(out0.norm());
        let phi = if out0.norm() < 1e-15 || out1.norm() < 1e-15 {
            p.phi
        } else {
            out1.arg() - out0.arg()
        };
        BlochPoint::wrap(theta, phi)
    }
}

/// Pure single-qubit state `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub theta: f64,
    pub phi: f64,
}

impl BlochPoint {
    pub const ZERO: BlochPoint = BlochPoint {
        theta: 0.0,
        phi: 0.0,
    };
    pub const ONE: BlochPoint = BlochPoint {
        theta: PI,
        phi: 0.0,
    };

    pub fn new(theta: f64, phi: f64) -> Result<Self, Su2Error> {
        if !theta.is_finite() || !phi.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Su2Error::InvalidBlochPoint { theta, phi });
        }
        Ok(BlochPoint::wrap(theta, phi))
    }

    /// Clamps `theta` into `[0, π]` and reduces `phi` modulo 2π.
    pub(crate) fn wrap(theta: f64, phi: f64) -> Self {
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        BlochPoint {
            theta: theta.clamp(0.0, PI),
            phi,
        }
    }

    pub fn from_vector(v: [f64; 3]) -> Self {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        BlochPoint::wrap((v[2] / n).clamp(-1.0, 1.0).acos(), v[1].atan2(v[0]))
    }

    pub fn to_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn spinor(&self) -> [Complex64; 2] {
        let half = self.theta / 2.0;
        [
            Complex64::new(half.cos(), 0.0),
            Complex64::from_polar(half.sin(), self.phi),
        ]
    }
}

/// The linear map `q ↦ T·q` on R⁴, without renormalization.
pub fn t_map(v: [f64; 4]) -> [f64; 4] {
    let (c, s) = (FRAC_PI_8.cos(), FRAC_PI_8.sin());
    [
        v[0] * c + v[1] * s,
        v[1] * c - v[0] * s,
        v[2] * c + v[3] * s,
        v[3] * c - v[2] * s,
    ]
}

/// The linear map `q ↦ H·q` on R⁴, without renormalization.
pub fn h_map(v: [f64; 4]) -> [f64; 4] {
    let r = FRAC_1_SQRT_2;
    [
        (v[1] + v[3]) * r,
        (v[2] - v[0]) * r,
        (v[3] - v[1]) * r,
        -(v[0] + v[2]) * r,
    ]
}

/// `|⟨ψ₁|ψ₂⟩|²`.
pub fn fidelity(p1: &BlochPoint, p2: &BlochPoint) -> f64 {
    let (u, v) = (p1.to_vector(), p2.to_vector());
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    ((1.0 + dot) / 2.0).clamp(0.0, 1.0)
}

pub fn rotate(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// Haar-random SU(2) element: four standard normals, normalized.
pub fn haar_random_su2<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        let q = Quaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if q.norm_sqr() > 1e-24 {
            return q.normalized();
        }
    }
}

/// Gate alphabet shared by both MDPs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    I,
    H,
    S,
    T,
    Rz(f64),
    Ry(f64),
}

impl Gate {
    pub fn quaternion(&self) -> Result<Quaternion, Su2Error> {
        Ok(match *self {
            Gate::I => Quaternion::IDENTITY,
            Gate::H => Quaternion::new(0.0, -FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2),
            Gate::T => Gate::Rz(FRAC_PI_4).quaternion()?,
            Gate::S => Gate::Rz(FRAC_PI_2).quaternion()?,
            Gate::Rz(beta) => {
                check_angle(beta)?;
                Quaternion::new((beta / 2.0).cos(), -(beta / 2.0).sin(), 0.0, 0.0)
            }
            Gate::Ry(gamma) => {
                check_angle(gamma)?;
                Quaternion::new((gamma / 2.0).cos(), 0.0, -(gamma / 2.0).sin(), 0.0)
            }
        })
    }

    /// One-letter label, when the gate has one.
    pub fn letter(&self) -> Option<char> {
        match self {
            Gate::I => Some('I'),
            Gate::H => Some('H'),
            Gate::S => Some('S'),
            Gate::T => Some('T'),
            _ => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        match *self {
            Gate::I => true,
            Gate::Rz(t) | Gate::Ry(t) => t == 0.0,
            _ => false,
        }
    }
}

fn check_angle(t: f64) -> Result<(), Su2Error> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Su2Error::NonFiniteAngle(t))
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.letter(), self) {
            (Some(c), _) => write!(f, "{c}"),
            (None, Gate::Rz(t)) => write!(f, "RZ({t:.6})"),
            (None, Gate::Ry(t)) => write!(f, "RY({t:.6})"),
            _ => unreachable!(),
        }
    }
}

/// Gates in application order: `gates[0]` acts first.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GateSequence(pub Vec<Gate>);

impl GateSequence {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Product of the sequence applied to the identity.
    pub fn unitary(&self) -> Result<Quaternion, Su2Error> {
        self.0.iter().try_fold(Quaternion::IDENTITY, |acc, g| {
            Ok(g.quaternion()?.compose(acc))
        })
    }

    /// Operator-product order: the rightmost gate acts first.
    pub fn render(&self) -> String {
        let letters: Option<String> = self.0.iter().rev().map(Gate::letter).collect();
        match letters {
            Some(s) => s,
            None => self
                .0
                .iter()
                .rev()
                .map(Gate::to_string)
                .collect::<Vec<_>>()
                .join(" "),
        }
    }

    /// Parses a one-letter string in operator-product order (rightmost acts first).
    pub fn parse_rendered(s: &str) -> Option<GateSequence> {
        s.chars()
            .rev()
            .map(|c| match c {
                'I' => Some(Gate::I),
                'H' => Some(Gate::H),
                'S' => Some(Gate::S),
                'T' => Some(Gate::T),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(GateSequence)
    }
}

impl fmt::Display for GateSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
