//! GUE sampling and the Hermitian Jacobi eigenvalue solver.
//!
//! Entries: real diagonal `N(0, 1)`, off-diagonal real and imaginary parts
//! independent `N(0, 1/2)`. At this normalization the top eigenvalue of an
//! `m x m` draw times `sqrt(t)` is the time-`t` top particle of Dyson
//! Brownian motion with `m` particles started at the origin.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::env::derive_seed;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_TOL: f64 = 1e-10;

/// Dense Hermitian matrix, row-major real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    pub size: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl HermitianMatrix {
    pub fn zeros(size: usize) -> Self {
        Self { size, re: vec![0.0; size * size], im: vec![0.0; size * size] }
    }

    pub fn get(&self, i: usize, j: usize) -> (f64, f64) {
        let k = i * self.size + j;
        (self.re[k], self.im[k])
    }

    /// Sets `(i, j)` and its conjugate mirror.
    pub fn set(&mut self, i: usize, j: usize, v: (f64, f64)) {
        let n = self.size;
        self.re[i * n + j] = v.0;
        self.im[i * n + j] = v.1;
        self.re[j * n + i] = v.0;
        self.im[j * n + i] = if i == j { 0.0 } else { -v.1 };
    }

    fn off_norm(&self) -> f64 {
        let n = self.size;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let k = i * n + j;
                    s += self.re[k] * self.re[k] + self.im[k] * self.im[k];
                }
            }
        }
        s.sqrt()
    }

    /// All eigenvalues in ascending order, by cyclic Jacobi rotations.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut a = self.clone();
        let n = a.size;
        let mut sweeps = 0;
        while a.off_norm() >= OFF_TOL {
            if sweeps == MAX_SWEEPS {
                return Err(Error::Numeric(format!(
                    "Jacobi did not converge in {MAX_SWEEPS} sweeps (off-diagonal norm {})",
                    a.off_norm()
                )));
            }
            for p in 0..n {
                for q in p + 1..n {
                    a.rotate(p, q);
                }
            }
            sweeps += 1;
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a.re[i * n + i]).collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    pub fn top_eigenvalue(&self) -> Result<f64> {
        Ok(*self.eigenvalues()?.last().expect("nonempty matrix"))
    }

    /// Zeroes entry `(p, q)` with the unitary `U = diag(1, e^{-i phi}) J`,
    /// where `a_pq = |a_pq| e^{i phi}` and `J` is the real Jacobi rotation of
    /// the phase-corrected 2x2 block.
    fn rotate(&mut self, p: usize, q: usize) {
        let n = self.size;
        let (br, bi) = (self.re[p * n + q], self.im[p * n + q]);
        let b = br.hypot(bi);
        if b < 1e-300 {
            return;
        }
        let (cr, ci) = (br / b, -bi / b); // e^{-i phi}
        let app = self.re[p * n + p];
        let aqq = self.re[q * n + q];
        let tau = (aqq - app) / (2.0 * b);
        let t = if tau >= 0.0 { 1.0 / (tau + (1.0 + tau * tau).sqrt()) } else { -1.0 / (-tau + (1.0 + tau * tau).sqrt()) };
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = t * c;
        // columns: A <- A U
        for k in 0..n {
            let (xr, xi) = (self.re[k * n + p], self.im[k * n + p]);
            let (yr, yi) = (self.re[k * n + q], self.im[k * n + q]);
            // y e^{-i phi}
            let (er, ei) = (yr * cr - yi * ci, yr * ci + yi * cr);
            self.re[k * n + p] = c * xr - s * er;
            self.im[k * n + p] = c * xi - s * ei;
            self.re[k * n + q] = s * xr + c * er;
            self.im[k * n + q] = s * xi + c * ei;
        }
        // rows: A <- U^H A
        for k in 0..n {
            let (xr, xi) = (self.re[p * n + k], self.im[p * n + k]);
            let (yr, yi) = (self.re[q * n + k], self.im[q * n + k]);
            // y e^{+i phi}
            let (er, ei) = (yr * cr + yi * ci, yi * cr - yr * ci);
            self.re[p * n + k] = c * xr - s * er;
            self.im[p * n + k] = c * xi - s * ei;
            self.re[q * n + k] = s * xr + c * er;
            self.im[q * n + k] = s * xi + c * ei;
        }
        self.re[p * n + q] = 0.0;
        self.im[p * n + q] = 0.0;
        self.re[q * n + p] = 0.0;
        self.im[q * n + p] = 0.0;
        self.im[p * n + p] = 0.0;
        self.im[q * n + q] = 0.0;
    }
}

/// A GUE draw of size `m`, determined by `seed`. Entries are drawn row by
/// row over the upper triangle, diagonal first in each row.
pub fn sample_gue(m: usize, seed: u64) -> HermitianMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, 0x6775_65]));
    let mut h = HermitianMatrix::zeros(m);
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..m {
        let d: f64 = StandardNormal.sample(&mut rng);
        h.set(i, i, (d, 0.0));
        for j in i + 1..m {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            h.set(i, j, (a * half, b * half));
        }
    }
    h
}

pub fn sample_gue_top_eigenvalue(m: usize, seed: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Precondition("matrix size must be at least 1".into()));
    }
    sample_gue(m, seed).top_eigenvalue()
}

/// Top particle at time `t` of Dyson Brownian motion with `particles`
/// particles started at zero.
pub fn dyson_top_oracle(particles: usize, t: f64, seed: u64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Precondition("time must be positive".into()));
    }
    Ok(t.sqrt() * sample_gue_top_eigenvalue(particles, seed)?)
}
