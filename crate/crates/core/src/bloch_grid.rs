//! Polar caps plus `(θ, φ)` cells on the Bloch sphere.
//!
//! With `ε = π/k` the north cap is `θ < ε`, the south cap `θ > π − ε`, and the
//! interior is cut into bands `n = 1..=k−2` of height `ε` and sectors
//! `m = 0..2k` of width `ε`. Binning is half-open (floor), except that the last
//! interior band also owns `θ = π − ε`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::su2::BlochPoint;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("grid resolution k must be at least 3, got {0}")]
    Resolution(u32),
    #[error("cell {0:?} does not exist on a k={1} grid")]
    InvalidCell(CellId, u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CellId {
    NorthCap,
    SouthCap,
    Cell { band: u32, sector: u32 },
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellId::NorthCap => f.write_str("north"),
            CellId::SouthCap => f.write_str("south"),
            CellId::Cell { band, sector } => write!(f, "{band},{sector}"),
        }
    }
}

impl std::str::FromStr for CellId {
    type Err = String;

    /// Accepts `north`, `south`, or `band,sector`.
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "north" | "0" | "zero" => Ok(CellId::NorthCap),
            "south" | "1" | "one" => Ok(CellId::SouthCap),
            other => {
                let (n, m) = other
                    .split_once(',')
                    .ok_or_else(|| format!("bad cell id `{s}`"))?;
                let band = n.trim().parse().map_err(|_| format!("bad band in `{s}`"))?;
                let sector = m
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad sector in `{s}`"))?;
                Ok(CellId::Cell { band, sector })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochGrid {
    k: u32,
}

impl BlochGrid {
    pub fn new(k: u32) -> Result<Self, GridError> {
        if k < 3 {
            return Err(GridError::Resolution(k));
        }
        Ok(BlochGrid { k })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Angular width `π/k` of bands and sectors.
    pub fn eps(&self) -> f64 {
        PI / self.k as f64
    }

    pub fn sectors(&self) -> u32 {
        2 * self.k
    }

    pub fn n_cells(&self) -> usize {
        2 + (self.k as usize - 2) * self.sectors() as usize
    }

    /// Dense index: north cap first, then interior cells band-major, south cap last.
    pub fn index(&self, id: CellId) -> usize {
        match id {
            CellId::NorthCap => 0,
            CellId::Cell { band, sector } => 1 + ((band - 1) * self.sectors() + sector) as usize,
            CellId::SouthCap => self.n_cells() - 1,
        }
    }

    pub fn cell(&self, index: usize) -> CellId {
        let last = self.n_cells() - 1;
        match index {
            0 => CellId::NorthCap,
            i if i == last => CellId::SouthCap,
            i => {
                let j = (i - 1) as u32;
                CellId::Cell {
                    band: j / self.sectors() + 1,
                    sector: j % self.sectors(),
                }
            }
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        (0..self.n_cells()).map(move |i| self.cell(i))
    }

    pub fn validate(&self, id: CellId) -> Result<CellId, GridError> {
        match id {
            CellId::Cell { band, sector }
                if band < 1 || band > self.k - 2 || sector >= self.sectors() =>
            {
                Err(GridError::InvalidCell(id, self.k))
            }
            _ => Ok(id),
        }
    }

    pub fn classify(&self, p: &BlochPoint) -> CellId {
        let eps = self.eps();
        if p.theta < eps {
            CellId::NorthCap
        } else if p.theta > PI - eps {
            CellId::SouthCap
        } else {
            let band = ((p.theta / eps).floor() as u32).clamp(1, self.k - 2);
            let sector = ((p.phi / eps).floor() as u32).min(self.sectors() - 1);
            CellId::Cell { band, sector }
        }
    }

    pub fn classify_vector(&self, v: [f64; 3]) -> CellId {
        self.classify(&BlochPoint::from_vector(v))
    }

    /// `(θ_lo, θ_hi, φ_lo, φ_hi)` covered by a cell.
    pub fn bounds(&self, id: CellId) -> (f64, f64, f64, f64) {
        let eps = self.eps();
        match id {
            CellId::NorthCap => (0.0, eps, 0.0, TAU),
            CellId::SouthCap => (PI - eps, PI, 0.0, TAU),
            CellId::Cell { band, sector } => (
                band as f64 * eps,
                (band + 1) as f64 * eps,
                sector as f64 * eps,
                (sector + 1) as f64 * eps,
            ),
        }
    }

    /// Band and sector centres; caps report their pole with `φ = 0`.
    pub fn center(&self, id: CellId) -> (f64, f64) {
        match id {
            CellId::NorthCap => (0.0, 0.0),
            CellId::SouthCap => (PI, 0.0),
            _ => {
                let (t0, t1, p0, p1) = self.bounds(id);
                ((t0 + t1) / 2.0, (p0 + p1) / 2.0)
            }
        }
    }

    /// Area-uniform point inside `id`.
    pub fn sample_in_cell<R: Rng + ?Sized>(
        &self,
        id: CellId,
        rng: &mut R,
    ) -> Result<BlochPoint, GridError> {
        let id = self.validate(id)?;
        let (t0, t1, p0, p1) = self.bounds(id);
        let (z_hi, z_lo) = (t0.cos(), t1.cos());
        // rejection only triggers for draws that round onto a shared boundary
        loop {
            let z: f64 = rng.random_range(z_lo..=z_hi);
            let phi: f64 = rng.random_range(p0..p1);
            let p = BlochPoint::wrap(z.clamp(-1.0, 1.0).acos(), phi);
            if self.classify(&p) == id {
                return Ok(p);
            }
        }
    }
}

/// Area-uniform point on the sphere: `cos θ ~ U[−1, 1]`, `φ ~ U[0, 2π)`.
pub fn sample_uniform_sphere<R: Rng + ?Sized>(rng: &mut R) -> BlochPoint {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..TAU);
    BlochPoint::wrap(z.acos(), phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::{fidelity, Gate};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn grid() -> BlochGrid {
        BlochGrid::new(16).unwrap()
    }

    fn pt(theta: f64, phi: f64) -> BlochPoint {
        BlochPoint::new(theta, phi).unwrap()
    }

    #[test]
    fn classify_examples() {
        let g = grid();
        assert_eq!(g.classify(&pt(0.05, 3.0)), CellId::NorthCap);
        assert_eq!(
            g.classify(&pt(PI / 2.0, PI / 2.0)),
            CellId::Cell { band: 8, sector: 8 }
        );
        assert_eq!(g.classify(&pt(PI - 0.01, 0.0)), CellId::SouthCap);
    }

    #[test]
    fn boundary_conventions() {
        let g = grid();
        let eps = g.eps();
        assert_eq!(
            g.classify(&pt(eps, 0.0)),
            CellId::Cell { band: 1, sector: 0 }
        );
        assert_eq!(
            g.classify(&pt(PI - eps, 0.0)),
            CellId::Cell {
                band: 14,
                sector: 0
            }
        );
        assert_eq!(
            g.classify(&pt(PI / 2.0, TAU - 1e-15)),
            CellId::Cell {
                band: 8,
                sector: 31
            }
        );
        assert_eq!(g.classify(&pt(0.0, 0.0)), CellId::NorthCap);
        assert_eq!(g.classify(&pt(PI, 0.0)), CellId::SouthCap);
    }

    #[test]
    fn index_round_trip() {
        for k in [3, 4, 16, 33] {
            let g = BlochGrid::new(k).unwrap();
            assert_eq!(g.n_cells(), 2 + (k as usize - 2) * 2 * k as usize);
            for i in 0..g.n_cells() {
                assert_eq!(g.index(g.cell(i)), i);
                assert!(g.validate(g.cell(i)).is_ok());
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(BlochGrid::new(2), Err(GridError::Resolution(2)));
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for bad in [
            CellId::Cell { band: 0, sector: 0 },
            CellId::Cell {
                band: 15,
                sector: 0,
            },
            CellId::Cell {
                band: 3,
                sector: 32,
            },
        ] {
            assert!(matches!(
                g.sample_in_cell(bad, &mut rng),
                Err(GridError::InvalidCell(..))
            ));
        }
    }

    #[test]
    fn parse_cell_ids() {
        assert_eq!("north".parse(), Ok(CellId::NorthCap));
        assert_eq!("south".parse(), Ok(CellId::SouthCap));
        assert_eq!("8, 0".parse(), Ok(CellId::Cell { band: 8, sector: 0 }));
        assert!("8".parse::<CellId>().is_err());
    }

    #[test]
    fn samples_stay_in_their_cell() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for id in g.cells() {
            for _ in 0..100 {
                let p = g.sample_in_cell(id, &mut rng).unwrap();
                assert_eq!(g.classify(&p), id);
                if id == CellId::NorthCap {
                    assert!(p.theta < g.eps());
                }
            }
        }
    }

    #[test]
    fn cell_samples_are_centred() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let id = CellId::Cell { band: 8, sector: 8 };
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| g.sample_in_cell(id, &mut rng).unwrap().phi)
            .sum::<f64>()
            / n as f64;
        assert!((mean - g.center(id).1).abs() < g.eps() / 10.0);
    }

    #[test]
    fn uniform_sphere_statistics() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 1_000_000;
        let mut north = 0usize;
        let mut sum_z = 0.0;
        let mut seen = HashSet::new();
        for _ in 0..n {
            let p = sample_uniform_sphere(&mut rng);
            assert!((0.0..=PI).contains(&p.theta) && (0.0..TAU).contains(&p.phi));
            let id = g.classify(&p);
            assert!(g.validate(id).is_ok());
            north += (id == CellId::NorthCap) as usize;
            sum_z += p.theta.cos();
            seen.insert(id);
        }
        let frac = (1.0 - g.eps().cos()) / 2.0;
        let sigma = (frac * (1.0 - frac) / n as f64).sqrt();
        assert!((north as f64 / n as f64 - frac).abs() < 3.0 * sigma);
        assert!((sum_z / n as f64).abs() < 0.005);
        // every constructed cell is reached, and nothing else
        assert_eq!(seen.len(), g.n_cells());
    }

    #[test]
    fn north_cap_fidelity_floor() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let floor = (PI / 32.0).cos().powi(2);
        for _ in 0..10_000 {
            let p = g.sample_in_cell(CellId::NorthCap, &mut rng).unwrap();
            assert!(fidelity(&p, &BlochPoint::ZERO) >= floor);
        }
    }

    #[test]
    fn z_rotations_keep_the_band() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let band = |id: CellId| match id {
            CellId::Cell { band, .. } => band,
            CellId::NorthCap => 0,
            CellId::SouthCap => u32::MAX,
        };
        for _ in 0..10_000 {
            let p = sample_uniform_sphere(&mut rng);
            let beta: f64 = rng.random_range(0.0..TAU);
            let q = Gate::Rz(beta).quaternion().unwrap().apply_to_bloch(p);
            let (a, b) = (g.classify(&p), g.classify(&q));
            // points within rounding of a band edge may legitimately flip
            let eps = g.eps();
            let edge = (p.theta / eps - (p.theta / eps).round()).abs() < 1e-9;
            assert!(edge || band(a) == band(b), "{p:?} {q:?}");
        }
    }
}
