//! Brute-force cell averages on uniform grids, independent of the lattice-sum formulas.
//!
//! Cell functions are built from the literal theta series and every average is divided
//! by the matching `⟨|φ|²⟩` products, so no normalization constant is trusted.

use crate::error::{Error, Result};
use crate::lattice_geometry::{frame, Characteristic, ShapeParameter};
use crate::theta::{theta_q, ThetaSeriesParams};
use crate::C64;

#[derive(Debug, Clone, Copy)]
pub struct QuadratureValue<T> {
    pub value: T,
    pub grid: usize,
    /// Change from the previous grid.
    pub difference: f64,
}

const START_GRID: usize = 16;
const MAX_GRID: usize = 512;

/// `n×n` uniform grid on the fundamental cell, offsets in `[−½, ½)`.
pub fn cell_grid(tau: &ShapeParameter, n: usize) -> Vec<C64> {
    let fr = frame(tau);
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(fr.nu1 * (i as f64 / n as f64 - 0.5) + fr.nu2 * (j as f64 / n as f64 - 0.5));
        }
    }
    out
}

/// Grid mean.
pub fn mean(v: impl Iterator<Item = C64>) -> C64 {
    let mut n = 0usize;
    let s: C64 = v.inspect(|_| n += 1).sum();
    s / n.max(1) as f64
}

/// Unnormalized cell function: `e^{−|z|²/4 + z²/4} θ_{−q}(z/ω, τ)`.
fn raw(z: C64, tau: &ShapeParameter, ch: &Characteristic, omega: f64, p: &ThetaSeriesParams) -> Result<C64> {
    let g = (-z.norm_sqr() / 4.0 + z * z / 4.0).exp();
    Ok(g * theta_q(z / omega, tau, &ch.neg(), p)?)
}

/// Grid means of the given integrands over the fundamental cell.
fn means<const N: usize>(
    tau: &ShapeParameter,
    n: usize,
    chars: &[Characteristic],
    integrand: impl Fn(&[C64]) -> [C64; N],
) -> Result<[C64; N]> {
    let fr = frame(tau);
    let p = ThetaSeriesParams::default();
    let mut acc = [C64::new(0.0, 0.0); N];
    let mut vals = vec![C64::new(0.0, 0.0); chars.len()];
    for i in 0..n {
        for j in 0..n {
            let x = fr.nu1 * (i as f64 / n as f64) + fr.nu2 * (j as f64 / n as f64);
            for (v, c) in vals.iter_mut().zip(chars) {
                *v = raw(x, tau, c, fr.omega, &p)?;
            }
            for (a, v) in acc.iter_mut().zip(integrand(&vals)) {
                *a += v;
            }
        }
    }
    let nn = (n * n) as f64;
    Ok(acc.map(|a| a / nn))
}

fn refine(tol: f64, eval: impl Fn(usize) -> Result<C64>) -> Result<QuadratureValue<C64>> {
    let mut n = START_GRID;
    let mut prev = eval(n)?;
    loop {
        n *= 2;
        let cur = eval(n)?;
        let d = (cur - prev).norm();
        if d <= tol {
            return Ok(QuadratureValue { value: cur, grid: n, difference: d });
        }
        if n >= MAX_GRID {
            return Err(Error::Quadrature { grid: n, difference: d });
        }
        prev = cur;
    }
}

fn real(v: QuadratureValue<C64>) -> QuadratureValue<f64> {
    QuadratureValue { value: v.value.re, grid: v.grid, difference: v.difference }
}

/// `⟨|φ₀|²|φ_k|²⟩`
pub fn avg_abs2_abs2(tau: &ShapeParameter, ch: &Characteristic, tol: f64) -> Result<QuadratureValue<f64>> {
    let chars = [Characteristic::ZERO, *ch];
    refine(tol, |n| {
        let [num, n0, nk] = means(tau, n, &chars, |v| {
            let (a, b) = (v[0].norm_sqr(), v[1].norm_sqr());
            [C64::new(a * b, 0.0), C64::new(a, 0.0), C64::new(b, 0.0)]
        })?;
        Ok(num / (n0 * nk))
    })
    .map(real)
}

/// `⟨φ₀² φ̄_k φ̄_{−k}⟩`
pub fn avg_cross(tau: &ShapeParameter, ch: &Characteristic, tol: f64) -> Result<QuadratureValue<C64>> {
    let chars = [Characteristic::ZERO, *ch, ch.neg()];
    refine(tol, |n| {
        let [num, n0, nk, nmk] = means(tau, n, &chars, |v| {
            [
                v[0] * v[0] * (v[1] * v[2]).conj(),
                C64::new(v[0].norm_sqr(), 0.0),
                C64::new(v[1].norm_sqr(), 0.0),
                C64::new(v[2].norm_sqr(), 0.0),
            ]
        })?;
        Ok(num / (n0 * (nk * nmk).sqrt()))
    })
}

/// `⟨|φ₀|⁴⟩`
pub fn avg_abs4(tau: &ShapeParameter, tol: f64) -> Result<QuadratureValue<f64>> {
    refine(tol, |n| {
        let [num, n0] = means(tau, n, &[Characteristic::ZERO], |v| {
            let a = v[0].norm_sqr();
            [C64::new(a * a, 0.0), C64::new(a, 0.0)]
        })?;
        Ok(num / (n0 * n0))
    })
    .map(real)
}

/// `γ_k` from the three quadratures.
pub fn gamma_k_quadrature(tau: &ShapeParameter, ch: &Characteristic, tol: f64) -> Result<f64> {
    let q1 = avg_abs2_abs2(tau, ch, tol / 4.0)?.value;
    let q2 = avg_cross(tau, ch, tol / 4.0)?.value;
    let q0 = avg_abs4(tau, tol / 4.0)?.value;
    Ok(2.0 * q1 + q2.norm() - q0)
}
