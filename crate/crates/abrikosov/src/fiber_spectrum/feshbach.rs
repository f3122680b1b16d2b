//! Feshbach–Schur map `F_P(λ) = PHP − PHP̄(P̄HP̄ − λ)⁻¹P̄HP` on finite matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::C64;

/// `H` split along an orthogonal projection `P`, in orthonormal bases of `Ran P` and `Ran P̄`.
#[derive(Debug, Clone)]
pub struct FeshbachSplit {
    /// Columns span `Ran P`.
    pub up: DMatrix<C64>,
    /// Columns span `Ran P̄`.
    pub uq: DMatrix<C64>,
    hpp: DMatrix<C64>,
    hpq: DMatrix<C64>,
    hqq: DMatrix<C64>,
    complement: DVector<f64>,
    scale: f64,
}

const RANK_EPS: f64 = 1e-8;

impl FeshbachSplit {
    pub fn new(h: &DMatrix<C64>, p: &DMatrix<C64>) -> Result<Self> {
        let n = h.nrows();
        if h.ncols() != n || p.nrows() != n || p.ncols() != n {
            return Err(Error::Domain("H and P must be square of equal size".into()));
        }
        if (p * p - p).norm() > 1e-10 * n as f64 || (p - p.adjoint()).norm() > 1e-10 * n as f64 {
            return Err(Error::Domain("P is not an orthogonal projection".into()));
        }
        let e = p.clone().symmetric_eigen();
        let (mut ip, mut iq) = (Vec::new(), Vec::new());
        for (i, v) in e.eigenvalues.iter().enumerate() {
            if (v - 1.0).abs() < RANK_EPS {
                ip.push(i);
            } else {
                iq.push(i);
            }
        }
        let cols = |idx: &[usize]| DMatrix::from_fn(n, idx.len(), |r, c| e.eigenvectors[(r, idx[c])]);
        let (up, uq) = (cols(&ip), cols(&iq));
        let hpp = up.adjoint() * h * &up;
        let hpq = up.adjoint() * h * &uq;
        let hqq = uq.adjoint() * h * &uq;
        let complement = hqq.clone().symmetric_eigen().eigenvalues;
        let scale = h.norm().max(1.0);
        Ok(FeshbachSplit { up, uq, hpp, hpq, hqq, complement, scale })
    }

    pub fn rank(&self) -> usize {
        self.up.ncols()
    }

    /// `min σ(P̄HP̄)`; the map is monotone below it.
    pub fn complement_gap(&self) -> f64 {
        self.complement.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    fn check_invertible(&self, lambda: f64) -> Result<()> {
        let d = self.complement.iter().map(|v| (v - lambda).abs()).fold(f64::INFINITY, f64::min);
        if d <= 1e-12 * self.scale {
            return Err(Error::Invertibility { lambda });
        }
        Ok(())
    }

    /// `(P̄HP̄ − λ)⁻¹ P̄HP` in the split bases.
    fn resolvent_times_hqp(&self, lambda: f64) -> Result<DMatrix<C64>> {
        self.check_invertible(lambda)?;
        let m = self.uq.ncols();
        let a = &self.hqq - DMatrix::<C64>::identity(m, m) * C64::new(lambda, 0.0);
        a.lu().solve(&self.hpq.adjoint()).ok_or(Error::Invertibility { lambda })
    }

    /// `F_P(λ)` as an `r×r` matrix in the basis `up`.
    pub fn map(&self, lambda: f64) -> Result<DMatrix<C64>> {
        if self.uq.ncols() == 0 {
            return Ok(self.hpp.clone());
        }
        Ok(&self.hpp - &self.hpq * self.resolvent_times_hqp(lambda)?)
    }

    /// `Q = P − R_{P̄}HP`, mapping `Ker(F_P(λ) − λ)` into `Ker(H − λ)`; `n×r` acting on `up` coordinates.
    pub fn lift(&self, lambda: f64) -> Result<DMatrix<C64>> {
        if self.uq.ncols() == 0 {
            return Ok(self.up.clone());
        }
        Ok(&self.up - &self.uq * self.resolvent_times_hqp(lambda)?)
    }

    /// Number of eigenvalues of `H` below `λ < gap`, from the inertia of `F_P(λ) − λ`.
    fn count_below(&self, lambda: f64) -> Result<usize> {
        let r = self.rank();
        let f = self.map(lambda)? - DMatrix::<C64>::identity(r, r) * C64::new(lambda, 0.0);
        let f = (&f + f.adjoint()) * C64::new(0.5, 0.0);
        Ok(f.symmetric_eigen().eigenvalues.iter().filter(|v| **v < 0.0).count())
    }

    /// Eigenvalues of `H` strictly below the complement gap, found by bisection on
    /// the isospectral family `F_P(λ)`.
    pub fn eigenvalues_below_gap(&self, tol: f64) -> Result<Vec<f64>> {
        let gap = self.complement_gap();
        let lo0 = -self.scale;
        let hi0 = if gap.is_finite() { gap - 1e-11 * self.scale } else { self.scale };
        let total = self.count_below(hi0)?;
        let mut out = Vec::with_capacity(total);
        for i in 1..=total {
            let (mut lo, mut hi) = (lo0, hi0);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if self.count_below(mid)? >= i {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        Ok(out)
    }
}

/// `F_P(λ)` for Hermitian `H`, orthogonal projection `P`.
pub fn feshbach_map(h: &DMatrix<C64>, p: &DMatrix<C64>, lambda: f64) -> Result<DMatrix<C64>> {
    FeshbachSplit::new(h, p)?.map(lambda)
}
