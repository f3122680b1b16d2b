//! Perturbative spectrum of the fiber Hessians `K_k` near the bifurcation point.

mod feshbach;
mod galerkin;

pub use feshbach::{feshbach_map, FeshbachSplit};
pub use galerkin::{galerkin_fiber_spectrum, FiberHessian, GalerkinBasis, GalerkinSpectrum};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice_geometry::{frame, Characteristic, ShapeParameter};
use crate::lattice_sums::{gamma_01, gamma_q1, gamma_q2, CertifiedValue};
use crate::quadrature_oracle::{cell_grid, mean};
use crate::stability_functions::gamma;
use crate::theta::NormalizedCellFunction;
use crate::C64;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PerturbationParams {
    pub kappa: f64,
    pub b_field: f64,
    pub beta: f64,
    pub epsilon: f64,
    /// `λ¹ = ½ + (κ² − ½)β`
    pub lambda1: f64,
}

impl PerturbationParams {
    pub fn new(tau: &ShapeParameter, kappa: f64, b_field: f64, tol: f64) -> Result<Self> {
        let beta = gamma_01(tau, tol)?.value;
        let epsilon = epsilon_of(kappa, b_field, beta)?;
        Ok(PerturbationParams { kappa, b_field, beta, epsilon, lambda1: 0.5 + (kappa * kappa - 0.5) * beta })
    }
}

/// `ε = √((κ² − b) / (κ²[(2κ² − 1)β + 1]))`
pub fn epsilon_of(kappa: f64, b_field: f64, beta: f64) -> Result<f64> {
    let k2 = kappa * kappa;
    let num = k2 - b_field;
    let den = k2 * ((2.0 * k2 - 1.0) * beta + 1.0);
    if num == 0.0 {
        return Ok(0.0);
    }
    let r = num / den;
    if !(r >= 0.0) || den == 0.0 {
        return Err(Error::Regime(format!(
            "(κ²−b)/(κ²[(2κ²−1)β+1]) = {num}/{den} is negative: field on the wrong side of the bifurcation"
        )));
    }
    Ok(r.sqrt())
}

/// Fourier series of `a¹`, the first-order vector potential, as a complex field `a₁ + ia₂`.
#[derive(Debug, Clone)]
pub struct A1Fourier {
    pub tau: ShapeParameter,
    /// `(n, m, t*, â(t*))` over the dual shells `|n|, |m| ≤ cutoff`.
    pub coeffs: Vec<(i64, i64, C64, C64)>,
}

const A1_GRID: usize = 64;

impl A1Fourier {
    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs.iter().map(|(_, _, t, c)| c * plane(*t, x)).sum()
    }

    /// `(∂₁ + i∂₂)a¹` at `x`.
    pub fn dbar(&self, x: C64) -> C64 {
        self.coeffs.iter().map(|(_, _, t, c)| C64::i() * t * c * plane(*t, x)).sum()
    }

    /// `Δa¹` at `x`.
    pub fn laplacian(&self, x: C64) -> C64 {
        self.coeffs.iter().map(|(_, _, t, c)| -t.norm_sqr() * c * plane(*t, x)).sum()
    }

    /// Max residuals of `i∂̄a¹ = ½(1 − |φ₀|²)` and `Δa¹ = (i/2)φ̄₀∂_{a⁰}φ₀` on a 24×24 grid.
    pub fn residuals(&self) -> Result<(f64, f64)> {
        let f0 = NormalizedCellFunction::new(&self.tau, &Characteristic::ZERO, Default::default())?;
        let (mut r1, mut r2) = (0f64, 0f64);
        for x in cell_grid(&self.tau, 24) {
            let lv = f0.levels(x, 1);
            let rho = lv.f[0].norm_sqr();
            r1 = r1.max((C64::i() * self.dbar(x) - 0.5 * (1.0 - rho)).norm());
            let d_phi0 = -(2f64.sqrt()) * lv.f[1];
            r2 = r2.max((self.laplacian(x) - 0.5 * C64::i() * lv.f[0].conj() * d_phi0).norm());
        }
        Ok((r1, r2))
    }
}

/// `e^{i t·x}` for a dual vector `t` written as a complex number.
pub(crate) fn plane(t: C64, x: C64) -> C64 {
    C64::from_polar(1.0, (t.conj() * x).re)
}

/// `a¹` from `i∂̄a¹ = ½(⟨|φ₀|²⟩ − |φ₀|²)`: `â(t*) = ĉ(t*) / (2t*)` with `ĉ` the Fourier
/// coefficients of `|φ₀|²`, zero mean.
pub fn a1_fourier(tau: &ShapeParameter, shell_cutoff: usize) -> Result<A1Fourier> {
    let s = shell_cutoff.max(1) as i64;
    let fr = frame(tau);
    let f0 = NormalizedCellFunction::new(tau, &Characteristic::ZERO, Default::default())?;
    let grid = cell_grid(tau, A1_GRID);
    let rho: Vec<f64> = grid.iter().map(|x| f0.eval(*x).norm_sqr()).collect();
    let mut coeffs = Vec::new();
    for m in -s..=s {
        for n in -s..=s {
            let t = fr.dual_point(n, m);
            let c = if n == 0 && m == 0 {
                C64::new(0.0, 0.0)
            } else {
                let hat = mean(grid.iter().zip(&rho).map(|(x, r)| *r * plane(-t, *x)));
                hat / (2.0 * t)
            };
            coeffs.push((n, m, t, c));
        }
    }
    Ok(A1Fourier { tau: *tau, coeffs })
}

/// The second-order Feshbach–Schur block on `span{v⁰₁, v⁰₂}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct F2Matrix {
    pub m: [[C64; 2]; 2],
    pub remainder_bound: f64,
}

impl F2Matrix {
    /// Sorted eigenvalues `(low, high)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let d = self.m[0][0].re;
        let r = self.m[0][1].norm();
        (d - r, d + r)
    }

    pub fn is_hermitian(&self, eps: f64) -> bool {
        (self.m[0][1] - self.m[1][0].conj()).norm() <= eps
            && self.m[0][0].im.abs() <= eps
            && self.m[1][1].im.abs() <= eps
            && (self.m[0][0] - self.m[1][1]).norm() <= eps
    }
}

fn delta_k0(ch: &Characteristic) -> f64 {
    if ch.is_zero_mod_lattice() {
        1.0
    } else {
        0.0
    }
}

/// `(κ²−½)[[2A − β, B], [B̄, 2A − β]] + δ_{k,0}`, with `A = ⟨|φ₀|²|φ_k|²⟩`, `B = ⟨φ₀²φ̄_kφ̄_{−k}⟩`.
pub fn f2_matrix(tau: &ShapeParameter, q: &Characteristic, kappa: f64, tol: f64) -> Result<F2Matrix> {
    if !(tol > 0.0) {
        return Err(Error::Domain("tol must be positive".into()));
    }
    let a = gamma_q1(tau, q, tol / 4.0)?;
    let b = gamma_q2(tau, q, tol / 4.0)?;
    let beta = gamma_01(tau, tol / 4.0)?;
    let p = kappa * kappa - 0.5;
    let d = C64::new(p * (2.0 * a.value - beta.value) + delta_k0(q), 0.0);
    let off = b.value * p;
    let remainder_bound = p.abs() * (2.0 * a.remainder_bound + b.remainder_bound + beta.remainder_bound);
    Ok(F2Matrix { m: [[d, off], [off.conj(), d]], remainder_bound })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MuPair {
    /// Branch with `+|B|`.
    pub plus: f64,
    /// Branch with `−|B|`.
    pub minus: f64,
    pub remainder_bound: f64,
}

/// `μ_± = (κ²−½){2A ± |B| − β} + δ_{k,0}`, labelled by the sign in front of `|B|`.
pub fn mu_pm(tau: &ShapeParameter, q: &Characteristic, kappa: f64, tol: f64) -> Result<MuPair> {
    let f = f2_matrix(tau, q, kappa, tol)?;
    let p = kappa * kappa - 0.5;
    let d = f.m[0][0].re;
    let r = f.m[0][1].norm() * p.signum();
    Ok(MuPair { plus: d + r, minus: d - r, remainder_bound: f.remainder_bound })
}

/// Leading term `b(κ²−½)γ(τ)ε²` of the bottom of the Hessian spectrum.
pub fn mu_star(tau: &ShapeParameter, kappa: f64, b_field: f64, tol: f64) -> Result<CertifiedValue<f64>> {
    let pp = PerturbationParams::new(tau, kappa, b_field, tol)?;
    let e2 = pp.epsilon * pp.epsilon;
    let scale = b_field * (kappa * kappa - 0.5) * e2;
    if e2 == 0.0 {
        return Ok(CertifiedValue { value: 0.0, remainder_bound: 0.0, truncation_radius: 0 });
    }
    let g = gamma(tau, tol)?.value;
    Ok(CertifiedValue {
        value: scale * g.value,
        remainder_bound: scale.abs() * g.remainder_bound,
        truncation_radius: g.truncation_radius,
    })
}
