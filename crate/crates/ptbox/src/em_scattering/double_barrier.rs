//! The PT-symmetric double barrier: an absorbing slab and its time-reversed
//! (amplifying) partner a distance `δ` apart.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rayon::prelude::*;

use super::transfer::{shift, time_reverse, to_smatrix, transfer_from_params, ScatteringMatrix, SlabParams, TransferMatrix};
use crate::error::{Error, Result};

/// Absorber centred at `−δ/2`, amplifier at `+δ/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleBarrier {
    pub slab: SlabParams,
    pub delta: f64,
}

impl DoubleBarrier {
    pub fn new(slab: SlabParams, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidParameter(format!("separation must be positive, got {delta}")));
        }
        Ok(Self { slab, delta })
    }
}

/// `T^D = [U(δ/2) T^R U†(δ/2)] · [U(−δ/2) T U†(−δ/2)]`; the wave meets the
/// absorber first.
#[must_use]
pub fn double_barrier_transfer(db: &DoubleBarrier, k: f64) -> TransferMatrix {
    let t = transfer_from_params(db.slab);
    let absorber = shift(&t, -0.5 * db.delta, k);
    let gain = shift(&time_reverse(&t), 0.5 * db.delta, k);
    gain.compose(&absorber)
}

/// One row of a transmission sweep. Absorptions are `1 − |t|² − |r|²` per
/// side, negative where the structure amplifies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub k: f64,
    pub t2: f64,
    pub rl2: f64,
    pub rr2: f64,
    pub al2: f64,
    pub ar2: f64,
    /// S-matrix pole at this `k`; the other columns are NaN.
    pub pole: bool,
}

fn sweep_row(db: &DoubleBarrier, k: f64) -> SweepRow {
    match to_smatrix(&double_barrier_transfer(db, k)) {
        Ok(s) => {
            let t2 = s.t_l.norm_sqr();
            let rl2 = s.r_l.norm_sqr();
            let rr2 = s.r_r.norm_sqr();
            SweepRow { k, t2, rl2, rr2, al2: 1.0 - t2 - rl2, ar2: 1.0 - t2 - rr2, pole: false }
        }
        Err(_) => {
            let nan = f64::NAN;
            SweepRow { k, t2: nan, rl2: nan, rr2: nan, al2: nan, ar2: nan, pole: true }
        }
    }
}

/// Sweeps `k_grid` in parallel; rows keep the grid order.
#[must_use]
pub fn transmission_sweep(db: &DoubleBarrier, k_grid: &[f64]) -> Vec<SweepRow> {
    k_grid.par_iter().map(|&k| sweep_row(db, k)).collect()
}

/// Eigen-decomposition of a 2×2 S matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SEigensystem {
    pub values: [Complex64; 2],
    /// Unit eigenvectors.
    pub vectors: [Vector2<Complex64>; 2],
    /// `v₁†v₂`.
    pub overlap: Complex64,
    /// Eigenvectors parallel within `1e-10`: an exceptional point.
    pub defective: bool,
}

fn eigenvector(m: &Matrix2<Complex64>, lambda: Complex64) -> Vector2<Complex64> {
    let a = Vector2::new(m[(0, 1)], lambda - m[(0, 0)]);
    let b = Vector2::new(lambda - m[(1, 1)], m[(1, 0)]);
    let v = if a.norm() >= b.norm() { a } else { b };
    if v.norm() == 0.0 {
        // Scalar matrix: any basis works.
        return Vector2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    }
    v.unscale(v.norm())
}

#[must_use]
pub fn smatrix_eigensystem(s: &ScatteringMatrix) -> SEigensystem {
    let m = s.matrix();
    let tr = m.trace();
    let disc = (tr * tr - 4.0 * m.determinant()).sqrt();
    let values = [0.5 * (tr + disc), 0.5 * (tr - disc)];
    let mut vectors = values.map(|l| eigenvector(&m, l));
    if (values[0] - values[1]).norm() == 0.0 && (m - Matrix2::identity() * values[0]).norm() == 0.0 {
        vectors[1] = Vector2::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    }
    let overlap = vectors[0].dotc(&vectors[1]);
    SEigensystem { values, vectors, overlap, defective: overlap.norm() > 1.0 - 1e-10 }
}

/// `(incident, transmitted)` power of `αv₁ + βv₂` for the balanced S matrix
/// with eigenvectors `(1, ±ρ)/√(1 + ρ²)` and relative eigenphase `2ξ`.
#[must_use]
pub fn interference_power(alpha: Complex64, beta: Complex64, rho: f64, xi: f64) -> (f64, f64) {
    let g = (1.0 - rho * rho) / (1.0 + rho * rho);
    let base = alpha.norm_sqr() + beta.norm_sqr();
    let cross = alpha.conj() * beta;
    let rot = Complex64::from_polar(1.0, 2.0 * xi);
    let incident = base + g * (cross + cross.conj()).re;
    let transmitted = base + g * (cross * rot + (cross * rot).conj()).re;
    (incident, transmitted)
}
